// attrfuse: train and apply fused attribute predictors over local product
// catalogs. Subcommands: generate, train, predict, calibrate, evaluate,
// sweep. All outputs are headered delimiter-separated text; every run is
// deterministic given (inputs, flags, seed).

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "attrfuse/catalog.hpp"
#include "attrfuse/csv.hpp"
#include "attrfuse/ensemble.hpp"
#include "attrfuse/model_bundle.hpp"
#include "attrfuse/pipeline.hpp"
#include "attrfuse/synthetic.hpp"
#include "attrfuse/util.hpp"

namespace fs = std::filesystem;
using namespace attrfuse;

namespace {

// Failures carry the pipeline stage so batch drivers can tell a bad input
// file from a bad model.
struct StageError : std::runtime_error {
  StageError(const std::string& stage, const std::string& message)
      : std::runtime_error(stage + ": " + message) {}
};

template <typename Fn>
auto stage(const std::string& name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

std::array<double, 3> parse_ratios(const std::string& text) {
  auto parts = split_on(text, ',');
  if (parts.size() != 3)
    throw std::runtime_error("--ratios wants three comma-separated numbers");
  std::array<double, 3> ratios{};
  for (std::size_t i = 0; i < 3; ++i) ratios[i] = std::stod(parts[i]);
  return ratios;
}

GlobalAttributeSpec pick_spec(const std::vector<GlobalAttributeSpec>& specs,
                              const std::string& target) {
  for (const auto& spec : specs)
    if (spec.name == target) return spec;
  throw std::runtime_error("no attribute '" + target + "' in the spec file");
}

std::vector<std::string> split_ids(const ModelBundle& bundle,
                                   const std::string& which) {
  if (which == "train") return bundle.split.train;
  if (which == "validation") return bundle.split.validation;
  if (which == "test") return bundle.split.test;
  throw std::runtime_error("unknown split '" + which + "'");
}

// Outcomes for the chosen split ("all" = whole catalog as-is).
std::vector<PredictionOutcome> predict_split(const ModelBundle& bundle,
                                             const Catalog& catalog,
                                             const std::string& which,
                                             double tau, int threads) {
  if (which == "all") return predict_catalog(bundle, catalog, tau, threads);
  Catalog subset = subset_catalog(catalog, split_ids(bundle, which));
  return predict_catalog(bundle, subset, tau, threads);
}

int argmax_low(const std::vector<double>& v) {
  int best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  return best;
}

std::string descriptions_digest(const ProductRecord& record) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (const std::string& d : record.descriptions) {
    h = fnv1a64(d, h);
    h = fnv1a64(std::string_view("\x1f", 1), h);
  }
  return to_hex16(h);
}

void write_predictions(const std::string& path,
                       const std::vector<PredictionOutcome>& outcomes,
                       const GlobalAttributeSpec& spec) {
  std::vector<std::vector<std::string>> rows;
  for (const PredictionOutcome& o : outcomes) {
    if (o.abstained) continue;
    int sbm_top = argmax_low(o.sbm);
    int uts_top = argmax_low(o.uts);
    rows.push_back({o.id,
                    spec.states[static_cast<std::size_t>(o.predicted)],
                    format_double(o.cop),
                    spec.states[static_cast<std::size_t>(sbm_top)],
                    spec.states[static_cast<std::size_t>(uts_top)],
                    format_double(o.sbm[static_cast<std::size_t>(sbm_top)]),
                    format_double(o.uts[static_cast<std::size_t>(uts_top)]),
                    format_double(
                        o.combined[static_cast<std::size_t>(o.predicted)])});
  }
  write_csv_file(path,
                 {"id", "predicted", "cop", "sbm_top", "uts_top", "sbm_prob",
                  "uts_prob", "combined_prob"},
                 rows);
}

void write_abstentions(const std::string& path,
                       const std::vector<PredictionOutcome>& outcomes,
                       const Catalog& catalog,
                       const GlobalAttributeSpec& spec) {
  std::vector<std::vector<std::string>> rows;
  for (const PredictionOutcome& o : outcomes) {
    if (!o.abstained) continue;
    const ProductRecord* rec = catalog.find(o.id);
    std::vector<int> order(o.combined.size());
    for (std::size_t i = 0; i < order.size(); ++i)
      order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      double pa = o.combined[static_cast<std::size_t>(a)];
      double pb = o.combined[static_cast<std::size_t>(b)];
      if (pa != pb) return pa > pb;
      return a < b;
    });
    std::vector<std::string> row{o.id, rec ? descriptions_digest(*rec) : ""};
    for (std::size_t k = 0; k < 3; ++k) {
      if (k < order.size()) {
        row.push_back(spec.states[static_cast<std::size_t>(order[k])]);
        row.push_back(
            format_double(o.combined[static_cast<std::size_t>(order[k])]));
      } else {
        row.push_back("");
        row.push_back("");
      }
    }
    row.push_back(format_double(o.cop));
    rows.push_back(std::move(row));
  }
  write_csv_file(
      path,
      {"id", "desc_digest", "top1", "p1", "top2", "p2", "top3", "p3", "cop"},
      rows);
}

struct LabeledEval {
  std::vector<double> cops;
  std::vector<bool> correct;
};

LabeledEval labeled_eval(const std::vector<PredictionOutcome>& outcomes,
                         const LabelSet& labels,
                         const GlobalAttributeSpec& spec) {
  std::vector<int> truth = truth_states(outcomes, labels, spec);
  for (std::size_t i = 0; i < truth.size(); ++i)
    if (truth[i] < 0)
      throw std::runtime_error("record '" + outcomes[i].id +
                               "' has no usable label for this split");
  return {outcome_cops(outcomes), outcome_correct(outcomes, truth)};
}

// ---- subcommand bodies ----

struct TrainArgs {
  std::string catalog_path, specs_path, labels_path, out_path, target;
  bool all_targets = false;
  TrainOptions options;
  std::string ratios_text = "0.6,0.2,0.2";
  std::string orient_text = "target";
};

int run_train(const TrainArgs& args) {
  TrainOptions options = args.options;
  options.ratios = parse_ratios(args.ratios_text);
  options.orient = args.orient_text == "exhaustive" ? OrientMode::kExhaustive
                                                    : OrientMode::kRootedAtTarget;

  Catalog catalog =
      stage("load-catalog", [&] { return load_local_catalog(args.catalog_path); });
  auto specs =
      stage("load-specs", [&] { return load_global_specs(args.specs_path); });

  std::vector<GlobalAttributeSpec> targets;
  if (args.all_targets) {
    targets = specs;
  } else {
    targets.push_back(stage("load-specs", [&] {
      return pick_spec(specs, args.target);
    }));
  }

  std::string catalog_digest = to_hex16(fnv1a64_file(args.catalog_path));
  std::string labels_digest = to_hex16(fnv1a64_file(args.labels_path));
  std::string specs_digest = to_hex16(fnv1a64_file(args.specs_path));

  for (const GlobalAttributeSpec& spec : targets) {
    LabelSet labels = stage("load-labels", [&] {
      return load_label_set(args.labels_path, spec.name);
    });
    ModelBundle bundle = stage("train", [&] {
      return train_model(catalog, spec, labels, options);
    });
    bundle.catalog_digest = catalog_digest;
    bundle.labels_digest = labels_digest;
    bundle.specs_digest = specs_digest;

    std::string out = args.out_path;
    if (args.all_targets)
      out = (fs::path(args.out_path) / (spec.name + ".json")).string();
    stage("save-model", [&] { save_bundle(out, bundle); return 0; });

    std::cout << "target: " << spec.name << "\n"
              << "tree: " << tree_to_string(bundle.net) << "\n"
              << "split: train=" << bundle.split.train.size()
              << " validation=" << bundle.split.validation.size()
              << " test=" << bundle.split.test.size() << "\n"
              << "model: " << out << "\n";
  }
  return 0;
}

struct PredictArgs {
  std::string model_path, catalog_path, out_path, abstained_path;
  double tau = -1.0;  // <0 = use the bundle's
  int threads = 0;
};

int run_predict(const PredictArgs& args) {
  ModelBundle bundle =
      stage("load-model", [&] { return load_bundle(args.model_path); });
  Catalog catalog =
      stage("load-catalog", [&] { return load_local_catalog(args.catalog_path); });
  double tau = args.tau < 0 ? bundle.tau : args.tau;
  auto outcomes = stage("predict", [&] {
    return predict_catalog(bundle, catalog, tau, args.threads);
  });
  stage("write-predictions", [&] {
    write_predictions(args.out_path, outcomes, bundle.spec);
    return 0;
  });
  std::size_t abstained = 0;
  for (const auto& o : outcomes) abstained += o.abstained ? 1 : 0;
  if (!args.abstained_path.empty())
    stage("write-abstentions", [&] {
      write_abstentions(args.abstained_path, outcomes, catalog, bundle.spec);
      return 0;
    });
  std::cout << "predicted: " << (outcomes.size() - abstained) << " committed, "
            << abstained << " abstained (tau=" << format_double(tau) << ")\n";
  return 0;
}

struct CalibrateArgs {
  std::string model_path, catalog_path, labels_path, report_path, out_model;
  std::string split = "validation";
  double step = 0.05, lambda_pi = -1.0, lambda_np = -1.0;
  int threads = 0;
};

int run_calibrate(const CalibrateArgs& args) {
  ModelBundle bundle =
      stage("load-model", [&] { return load_bundle(args.model_path); });
  Catalog catalog =
      stage("load-catalog", [&] { return load_local_catalog(args.catalog_path); });
  LabelSet labels = stage("load-labels", [&] {
    return load_label_set(args.labels_path, bundle.spec.name);
  });
  double lambda_pi = args.lambda_pi < 0 ? bundle.lambda_pi : args.lambda_pi;
  double lambda_np = args.lambda_np < 0 ? bundle.lambda_np : args.lambda_np;

  auto outcomes = stage("predict", [&] {
    return predict_split(bundle, catalog, args.split, 0.0, args.threads);
  });
  LabeledEval eval = stage("calibrate", [&] {
    return labeled_eval(outcomes, labels, bundle.spec);
  });
  CalibrationReport report = stage("calibrate", [&] {
    return calibrate_tau(eval.cops, eval.correct, lambda_pi, lambda_np,
                         args.step);
  });
  stage("write-report", [&] {
    write_grid_file(args.report_path, report.rows, &report);
    return 0;
  });
  if (!args.out_model.empty()) {
    bundle.tau = report.selected_tau;
    bundle.lambda_pi = lambda_pi;
    bundle.lambda_np = lambda_np;
    stage("save-model", [&] { save_bundle(args.out_model, bundle); return 0; });
  }
  double best_j = 0.0;
  for (const GridRow& row : report.rows)
    if (row.tau == report.selected_tau) best_j = row.objective;
  std::cout << "selected tau=" << format_double(report.selected_tau)
            << " (objective=" << format_double(best_j) << ", n="
            << outcomes.size() << ")\n";
  return 0;
}

struct EvaluateArgs {
  std::string model_path, catalog_path, labels_path, out_path;
  std::string split = "test";
  std::string mode = "ensemble";
  double tau = -1.0;
  int threads = 0;
};

int run_evaluate(const EvaluateArgs& args) {
  ModelBundle bundle =
      stage("load-model", [&] { return load_bundle(args.model_path); });
  Catalog catalog =
      stage("load-catalog", [&] { return load_local_catalog(args.catalog_path); });
  LabelSet labels = stage("load-labels", [&] {
    return load_label_set(args.labels_path, bundle.spec.name);
  });
  double tau = args.tau < 0 ? bundle.tau : args.tau;

  auto outcomes = stage("predict", [&] {
    return predict_split(bundle, catalog, args.split, tau, args.threads);
  });
  if (args.mode != "ensemble") {
    // Single-model scoring: prediction and CoP come from that
    // distribution alone.
    for (PredictionOutcome& o : outcomes) {
      const std::vector<double>& dist = args.mode == "sbm" ? o.sbm : o.uts;
      o.predicted = argmax_low(dist);
      o.cop = confidence(dist, o.predicted);
      o.abstained = o.cop <= tau;
    }
  }
  LabeledEval eval = stage("evaluate", [&] {
    return labeled_eval(outcomes, labels, bundle.spec);
  });
  EvalMetrics metrics = evaluate_outcomes(eval.cops, eval.correct, tau);

  std::string acc = metrics.accuracy_on_predicted
                        ? format_double(*metrics.accuracy_on_predicted)
                        : "none";
  std::cout << "mode=" << args.mode << " split=" << args.split
            << " tau=" << format_double(tau) << " n=" << metrics.n
            << " pc_pct=" << format_double(metrics.pc_pct)
            << " pi_pct=" << format_double(metrics.pi_pct)
            << " np_pct=" << format_double(metrics.np_pct)
            << " accuracy_on_predicted=" << acc
            << " overall_accuracy=" << format_double(metrics.overall_accuracy)
            << "\n";
  if (!args.out_path.empty()) {
    stage("write-report", [&] {
      write_csv_file(args.out_path,
                     {"mode", "split", "tau", "n", "pc_pct", "pi_pct",
                      "np_pct", "accuracy_on_predicted", "overall_accuracy"},
                     {{args.mode, args.split, format_double(tau),
                       std::to_string(metrics.n),
                       format_double(metrics.pc_pct),
                       format_double(metrics.pi_pct),
                       format_double(metrics.np_pct),
                       metrics.accuracy_on_predicted
                           ? format_double(*metrics.accuracy_on_predicted)
                           : "",
                       format_double(metrics.overall_accuracy)}});
      return 0;
    });
  }
  return 0;
}

struct SweepArgs {
  std::string model_path, catalog_path, labels_path, out_path;
  std::string split = "validation";
  double step = 0.05, lambda_pi = -1.0, lambda_np = -1.0;
  int threads = 0;
};

int run_sweep(const SweepArgs& args) {
  ModelBundle bundle =
      stage("load-model", [&] { return load_bundle(args.model_path); });
  Catalog catalog =
      stage("load-catalog", [&] { return load_local_catalog(args.catalog_path); });
  LabelSet labels = stage("load-labels", [&] {
    return load_label_set(args.labels_path, bundle.spec.name);
  });
  double lambda_pi = args.lambda_pi < 0 ? bundle.lambda_pi : args.lambda_pi;
  double lambda_np = args.lambda_np < 0 ? bundle.lambda_np : args.lambda_np;
  auto outcomes = stage("predict", [&] {
    return predict_split(bundle, catalog, args.split, 0.0, args.threads);
  });
  LabeledEval eval = stage("sweep", [&] {
    return labeled_eval(outcomes, labels, bundle.spec);
  });
  auto rows = stage("sweep", [&] {
    return sweep_grid(eval.cops, eval.correct, args.step, lambda_pi, lambda_np);
  });
  stage("write-report", [&] {
    write_grid_file(args.out_path, rows);
    return 0;
  });
  std::cout << "wrote " << rows.size() << " grid rows to " << args.out_path
            << "\n";
  return 0;
}

struct GenerateArgs {
  std::string out_dir;
  SyntheticConfig config;
};

int run_generate(const GenerateArgs& args) {
  SyntheticData data =
      stage("generate", [&] { return generate_synthetic(args.config); });
  stage("write-data", [&] {
    fs::create_directories(args.out_dir);
    fs::path dir(args.out_dir);
    write_local_catalog((dir / "catalog.csv").string(), data.catalog);
    write_global_specs((dir / "specs.csv").string(), {data.spec});
    std::vector<std::string> id_order;
    for (const auto& rec : data.catalog.records) id_order.push_back(rec.id);
    write_label_set((dir / "labels.csv").string(), data.labels, id_order);
    save_network((dir / "truth.json").string(), data.truth);
    return 0;
  });
  std::cout << "wrote " << data.catalog.records.size() << " records ("
            << args.config.node_count << " nodes, "
            << args.config.states_per_node << " states) to " << args.out_dir
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fused global-attribute prediction over local product catalogs"};
  app.require_subcommand(1);

  TrainArgs train_args;
  CLI::App* train = app.add_subcommand(
      "train", "Learn a model for one target attribute (or all of them)");
  train->add_option("--catalog", train_args.catalog_path, "Local catalog CSV")
      ->required();
  train->add_option("--specs", train_args.specs_path, "Attribute states CSV")
      ->required();
  train->add_option("--labels", train_args.labels_path, "Training labels CSV")
      ->required();
  train->add_option("--target", train_args.target, "Target attribute name");
  train->add_flag("--all-targets", train_args.all_targets,
                  "Train every attribute in the spec file; --out is a directory");
  train->add_option("--out", train_args.out_path,
                    "Model file (or directory with --all-targets)")
      ->required();
  train->add_option("--eta", train_args.options.eta,
                    "Characteristics kept by relevance selection");
  train->add_option("--alpha", train_args.options.alpha, "Laplace smoothing");
  train->add_option("--ngram-max", train_args.options.ngram_max,
                    "Largest description n-gram");
  train->add_option("--temperature", train_args.options.temperature,
                    "Text softmax temperature");
  train->add_option("--tau", train_args.options.tau,
                    "Initial abstention threshold");
  train->add_option("--lambda-pi", train_args.options.lambda_pi,
                    "Penalty weight for confident errors");
  train->add_option("--lambda-np", train_args.options.lambda_np,
                    "Penalty weight for abstentions");
  train->add_option("--ratios", train_args.ratios_text,
                    "train,validation,test fractions");
  train->add_option("--seed", train_args.options.seed, "Split shuffle seed");
  train->add_flag("--ordered-split", train_args.options.ordered_split,
                  "Split in file order instead of shuffling");
  train->add_option("--orient", train_args.orient_text,
                    "Edge orientation: target|exhaustive")
      ->check(CLI::IsMember({"target", "exhaustive"}));

  PredictArgs predict_args;
  CLI::App* predict =
      app.add_subcommand("predict", "Predict a catalog with a trained model");
  predict->add_option("--model", predict_args.model_path, "Model file")
      ->required();
  predict->add_option("--catalog", predict_args.catalog_path, "Catalog CSV")
      ->required();
  predict->add_option("--out", predict_args.out_path,
                      "Committed predictions CSV")
      ->required();
  predict->add_option("--abstained", predict_args.abstained_path,
                      "Abstention queue CSV (for annotation)");
  predict->add_option("--tau", predict_args.tau,
                      "Override the model's abstention threshold");
  predict->add_option("--threads", predict_args.threads,
                      "Worker threads (0 = auto)");

  CalibrateArgs cal_args;
  CLI::App* calibrate = app.add_subcommand(
      "calibrate", "Pick the abstention threshold on a labeled split");
  calibrate->add_option("--model", cal_args.model_path, "Model file")
      ->required();
  calibrate->add_option("--catalog", cal_args.catalog_path, "Catalog CSV")
      ->required();
  calibrate->add_option("--labels", cal_args.labels_path, "Labels CSV")
      ->required();
  calibrate->add_option("--out-report", cal_args.report_path,
                        "Threshold grid CSV")
      ->required();
  calibrate->add_option("--out-model", cal_args.out_model,
                        "Write a copy of the model with the selected threshold");
  calibrate->add_option("--split", cal_args.split,
                        "train|validation|test|all")
      ->check(CLI::IsMember({"train", "validation", "test", "all"}));
  calibrate->add_option("--step", cal_args.step, "Grid step");
  calibrate->add_option("--lambda-pi", cal_args.lambda_pi,
                        "Penalty weight for confident errors");
  calibrate->add_option("--lambda-np", cal_args.lambda_np,
                        "Penalty weight for abstentions");
  calibrate->add_option("--threads", cal_args.threads, "Worker threads");

  EvaluateArgs eval_args;
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "Score a model on a labeled split");
  evaluate->add_option("--model", eval_args.model_path, "Model file")
      ->required();
  evaluate->add_option("--catalog", eval_args.catalog_path, "Catalog CSV")
      ->required();
  evaluate->add_option("--labels", eval_args.labels_path, "Labels CSV")
      ->required();
  evaluate->add_option("--split", eval_args.split, "train|validation|test|all")
      ->check(CLI::IsMember({"train", "validation", "test", "all"}));
  evaluate->add_option("--mode", eval_args.mode,
                       "ensemble|sbm|uts (single-model scoring)")
      ->check(CLI::IsMember({"ensemble", "sbm", "uts"}));
  evaluate->add_option("--tau", eval_args.tau, "Override threshold");
  evaluate->add_option("--out", eval_args.out_path, "Metrics CSV");
  evaluate->add_option("--threads", eval_args.threads, "Worker threads");

  SweepArgs sweep_args;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "Write the full threshold grid without selecting");
  sweep->add_option("--model", sweep_args.model_path, "Model file")->required();
  sweep->add_option("--catalog", sweep_args.catalog_path, "Catalog CSV")
      ->required();
  sweep->add_option("--labels", sweep_args.labels_path, "Labels CSV")
      ->required();
  sweep->add_option("--out", sweep_args.out_path, "Grid CSV")->required();
  sweep->add_option("--split", sweep_args.split, "train|validation|test|all")
      ->check(CLI::IsMember({"train", "validation", "test", "all"}));
  sweep->add_option("--step", sweep_args.step, "Grid step");
  sweep->add_option("--lambda-pi", sweep_args.lambda_pi, "Penalty weight");
  sweep->add_option("--lambda-np", sweep_args.lambda_np, "Penalty weight");
  sweep->add_option("--threads", sweep_args.threads, "Worker threads");

  GenerateArgs gen_args;
  CLI::App* generate = app.add_subcommand(
      "generate", "Write a synthetic benchmark dataset with known truth");
  generate->add_option("--out", gen_args.out_dir, "Output directory")
      ->required();
  generate->add_option("--nodes", gen_args.config.node_count,
                       "Tree nodes (target + locals)");
  generate->add_option("--states", gen_args.config.states_per_node,
                       "States per node");
  generate->add_option("--samples", gen_args.config.sample_count, "Records");
  generate->add_option("--noise", gen_args.config.description_noise,
                       "P(descriptions omit the state label)");
  generate->add_option("--local-missing", gen_args.config.local_missing_rate,
                       "P(a local value is masked)");
  generate->add_option("--seed", gen_args.config.seed, "Generator seed");
  generate->add_flag("--sort-by-state", gen_args.config.sort_by_state,
                     "Group records by true state");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      if (!train_args.all_targets && train_args.target.empty())
        throw StageError("train", "--target or --all-targets is required");
      return run_train(train_args);
    }
    if (predict->parsed()) return run_predict(predict_args);
    if (calibrate->parsed()) return run_calibrate(cal_args);
    if (evaluate->parsed()) return run_evaluate(eval_args);
    if (sweep->parsed()) return run_sweep(sweep_args);
    if (generate->parsed()) return run_generate(gen_args);
  } catch (const std::exception& e) {
    std::cerr << "attrfuse: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
