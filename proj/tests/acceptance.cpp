// Release acceptance checks. Each check prints one [PASS]/[FAIL] line with
// measured evidence; the process exits nonzero if any check fails. Checks
// with a runtime budget time themselves and fail when over budget.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "attrfuse/catalog.hpp"
#include "attrfuse/csv.hpp"
#include "attrfuse/ensemble.hpp"
#include "attrfuse/model_bundle.hpp"
#include "attrfuse/pipeline.hpp"
#include "attrfuse/synthetic.hpp"
#include "attrfuse/text_similarity.hpp"
#include "attrfuse/tree_bayes.hpp"
#include "attrfuse/util.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

#ifndef ATTRFUSE_CLI_PATH
#error "ATTRFUSE_CLI_PATH must point at the command-line binary"
#endif

namespace {

using attrfuse::Rng;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool ok = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<double> random_dist(Rng& rng, std::size_t m) {
  std::vector<double> d(m);
  double sum = 0.0;
  for (double& v : d) {
    v = 0.01 + rng.next_unit();
    sum += v;
  }
  for (double& v : d) v /= sum;
  return d;
}

int argmax(const std::vector<double>& d) {
  return static_cast<int>(std::max_element(d.begin(), d.end()) - d.begin());
}

std::set<std::pair<std::string, std::string>> skeleton(
    const attrfuse::TreeBayesNet& net) {
  std::set<std::pair<std::string, std::string>> edges;
  for (const auto& node : net.nodes) {
    if (node.parent < 0) continue;
    const std::string& pa = net.nodes[static_cast<std::size_t>(node.parent)].name;
    edges.insert({std::min(node.name, pa), std::max(node.name, pa)});
  }
  return edges;
}

struct SplitAccuracy {
  double ensemble = 0.0;  // percent correct of combined argmax
  double model = 0.0;     // percent correct of the network posterior argmax
  double text = 0.0;      // percent correct of the text-similarity argmax
};

SplitAccuracy split_accuracy(const attrfuse::ModelBundle& bundle,
                             const attrfuse::SyntheticData& data,
                             const std::vector<std::string>& ids) {
  attrfuse::Catalog part = attrfuse::subset_catalog(data.catalog, ids);
  auto outcomes = attrfuse::predict_catalog(bundle, part, 0.0, 0);
  auto truth = attrfuse::truth_states(outcomes, data.labels, data.spec);
  SplitAccuracy acc;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    acc.ensemble += outcomes[i].predicted == truth[i];
    acc.model += argmax(outcomes[i].sbm) == truth[i];
    acc.text += argmax(outcomes[i].uts) == truth[i];
  }
  double n = static_cast<double>(outcomes.size());
  acc.ensemble *= 100.0 / n;
  acc.model *= 100.0 / n;
  acc.text *= 100.0 / n;
  return acc;
}

// --- check 1: exact inference agrees with full joint enumeration ----------

Outcome check_inference_enumeration() {
  auto t0 = Clock::now();
  Rng rng(2024);
  double max_err = 0.0;
  long long cases = 0;
  for (int trial = 0; trial < 200; ++trial) {
    attrfuse::TreeBayesNet net = oracles::random_net(rng, 6, 5);
    std::size_t n = net.nodes.size();
    std::size_t target_idx = rng.next_index(n);
    const std::string& target = net.nodes[target_idx].name;
    std::vector<std::size_t> others;
    for (std::size_t i = 0; i < n; ++i)
      if (i != target_idx) others.push_back(i);
    for (std::size_t mask = 0; mask < (1ull << others.size()); ++mask) {
      std::map<std::string, std::string> evidence;
      for (std::size_t j = 0; j < others.size(); ++j) {
        if (!((mask >> j) & 1ull)) continue;
        const auto& node = net.nodes[others[j]];
        if (rng.next_unit() < 0.18)
          evidence[node.name] = "never-observed";  // exercises the unseen path
        else
          evidence[node.name] = node.states[rng.next_index(node.states.size())];
      }
      auto got = attrfuse::infer_posterior(net, target, evidence);
      auto want = oracles::brute_posterior(net, target, evidence);
      for (std::size_t s = 0; s < got.size(); ++s)
        max_err = std::max(max_err, std::abs(got[s] - want[s]));
      ++cases;
    }
  }
  double secs = seconds_since(t0);
  std::ostringstream d;
  d << "200 random networks, " << cases << " evidence sets, max |error| "
    << std::scientific << std::setprecision(2) << max_err << std::fixed
    << std::setprecision(1) << ", " << secs << "s (budget 30s)";
  return {max_err <= 1e-9 && secs < 30.0, d.str()};
}

// --- check 2: spanning tree attains the exhaustive maximum ----------------

Outcome check_spanning_tree_optimum() {
  Rng rng(7);
  long long trees_checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    int n = 2 + static_cast<int>(rng.next_index(5));  // 2..6 nodes
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back(std::string(1, char('a' + i)));
    attrfuse::WeightedGraph graph(names);
    for (std::size_t a = 0; a < names.size(); ++a)
      for (std::size_t b = a + 1; b < names.size(); ++b)
        graph.set_weight(a, b,
                         static_cast<double>(rng.next_index(1025)) / 1024.0);
    double total = attrfuse::total_weight(attrfuse::max_spanning_tree(graph));
    double best = -1.0;
    for (const auto& tree : oracles::all_spanning_trees(n)) {
      double w = 0.0;
      for (auto [u, v] : tree)
        w += graph.weight(static_cast<std::size_t>(u),
                          static_cast<std::size_t>(v));
      best = std::max(best, w);
      ++trees_checked;
    }
    if (total != best) {
      std::ostringstream d;
      d << "trial " << trial << ": tree total " << total
        << " != exhaustive max " << best;
      return {false, d.str()};
    }
  }
  std::ostringstream d;
  d << "100 graphs, " << trees_checked
    << " candidate trees enumerated, every total matched exactly";
  return {true, d.str()};
}

// --- check 3: tree weight is invariant under the choice of root -----------

Outcome check_rooting_invariance() {
  Rng rng(11);
  double worst_spread = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    int n = 2 + static_cast<int>(rng.next_index(7));  // 2..8 nodes
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("n" + std::to_string(i));
    attrfuse::WeightedGraph graph(names);
    std::vector<attrfuse::GraphEdge> edges;
    for (int i = 1; i < n; ++i) {
      attrfuse::GraphEdge e;
      e.a = i;
      e.b = static_cast<int>(rng.next_index(static_cast<std::size_t>(i)));
      e.weight = static_cast<double>(rng.next_index(1025)) / 1024.0;
      graph.set_weight(static_cast<std::size_t>(e.a),
                       static_cast<std::size_t>(e.b), e.weight);
      edges.push_back(e);
    }
    double lo = 0.0, hi = 0.0;
    for (int r = 0; r < n; ++r) {
      attrfuse::DirectedTree rooted = attrfuse::orient_tree(
          names, edges, names[static_cast<std::size_t>(r)],
          attrfuse::OrientMode::kRootedAtTarget);
      double tw = attrfuse::total_weight(rooted, graph);
      if (r == 0) lo = hi = tw;
      lo = std::min(lo, tw);
      hi = std::max(hi, tw);
    }
    worst_spread = std::max(worst_spread, hi - lo);
    if (hi - lo > 1e-12) {
      std::ostringstream d;
      d << "trial " << trial << ": totals spread " << (hi - lo)
        << " across rootings";
      return {false, d.str()};
    }
  }
  std::ostringstream d;
  d << "50 trees, all rootings tried, worst total-weight spread "
    << worst_spread;
  return {true, d.str()};
}

// --- check 4: structure recovery from sampled data ------------------------

Outcome check_structure_recovery() {
  auto t0 = Clock::now();
  int hits = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    attrfuse::SyntheticConfig config;
    config.node_count = 8;
    config.states_per_node = 3;
    config.sample_count = 50000;
    config.seed = seed;
    attrfuse::SyntheticData data = attrfuse::generate_synthetic(config);

    attrfuse::TrainOptions options;
    options.eta = 7;
    options.ratios = {1.0, 0.0, 0.0};  // learn from every labeled record
    options.seed = seed;
    attrfuse::ModelBundle bundle =
        attrfuse::train_model(data.catalog, data.spec, data.labels, options);
    hits += skeleton(bundle.net) == skeleton(data.truth) ? 1 : 0;
  }
  double secs = seconds_since(t0);
  std::ostringstream d;
  d << hits << "/100 runs recovered the generating skeleton (need 95), "
    << std::fixed << std::setprecision(1) << secs << "s (budget 120s)";
  return {hits >= 95 && secs < 120.0, d.str()};
}

// --- check 5: string similarity reference values --------------------------

Outcome check_string_similarity() {
  using attrfuse::jaro_winkler;
  double martha = jaro_winkler("martha", "marhta");
  double dixon = jaro_winkler("dixon", "dicksonx");
  bool ok = std::abs(martha - 0.9611111111111111) <= 1e-4 &&
            std::abs(dixon - 0.8133333333333332) <= 1e-4;
  ok = ok && jaro_winkler("identical", "identical") == 1.0 &&
       jaro_winkler("", "") == 1.0 && jaro_winkler("abc", "xyz") == 0.0 &&
       jaro_winkler("abc", "") == 0.0;

  Rng rng(13);
  int asymmetries = 0;
  for (int i = 0; i < 10000; ++i) {
    auto draw = [&rng]() {
      std::string s;
      std::size_t len = rng.next_index(13);
      for (std::size_t k = 0; k < len; ++k)
        s.push_back(static_cast<char>('a' + rng.next_index(5)));
      return s;
    };
    std::string a = draw(), b = draw();
    double ab = jaro_winkler(a, b);
    double ba = jaro_winkler(b, a);
    if (ab != ba || ab < 0.0 || ab > 1.0) ++asymmetries;
  }
  ok = ok && asymmetries == 0;
  std::ostringstream d;
  d << std::setprecision(10) << "martha/marhta " << martha
    << ", dixon/dicksonx " << dixon << ", " << asymmetries
    << " symmetry violations in 10000 random pairs";
  return {ok, d.str()};
}

// --- check 6: confidence bounds and reference values ----------------------

Outcome check_confidence_reference() {
  using attrfuse::confidence;
  Rng rng(17);
  bool ok = true;
  for (int i = 0; i < 2000 && ok; ++i) {
    std::size_t m = 2 + rng.next_index(5);
    auto dist = random_dist(rng, m);
    for (std::size_t t = 0; t < m; ++t) {
      double c = confidence(dist, static_cast<int>(t));
      // Interior distributions are never fully confident anywhere.
      if (c < 0.0 || c >= 1.0) ok = false;
    }
  }
  for (std::size_t m = 2; m <= 5 && ok; ++m)
    for (std::size_t t = 0; t < m && ok; ++t) {
      std::vector<double> onehot(m, 0.0);
      onehot[t] = 1.0;
      if (confidence(onehot, static_cast<int>(t)) != 1.0) ok = false;
      if (confidence(onehot, static_cast<int>((t + 1) % m)) != 0.0) ok = false;
    }
  double even = confidence({0.5, 0.5}, 0);
  double clamped = confidence({0.05, 0.95}, 0);  // distance 1.34 from ideal
  ok = ok && std::abs(even - 0.2929) <= 1e-4 && std::abs(clamped) <= 1e-4;
  std::ostringstream d;
  d << std::setprecision(10) << "two-way even split " << even
    << ", distant state clamps to " << clamped
    << ", bounds held on 2000 random distributions";
  return {ok, d.str()};
}

// --- check 7: agreeing models keep the shared winner ----------------------

Outcome check_agreement_preserved() {
  Rng rng(23);
  int preserved = 0;
  for (int i = 0; i < 10000; ++i) {
    std::size_t m = 2 + rng.next_index(7);
    auto p = random_dist(rng, m);
    auto q = random_dist(rng, m);
    int ip = argmax(p);
    std::swap(q[static_cast<std::size_t>(ip)],
              q[static_cast<std::size_t>(argmax(q))]);
    preserved += argmax(attrfuse::combine(p, q)) == ip ? 1 : 0;
  }
  std::ostringstream d;
  d << preserved << "/10000 shared-winner pairs kept their winner";
  return {preserved == 10000, d.str()};
}

// --- check 8: the fused predictor beats either model alone ----------------

Outcome check_fusion_dominance() {
  auto t0 = Clock::now();
  int strictly_better = 0;
  double worst_margin = 1e9;
  bool within_cushion = true;
  for (int k = 0; k < 20; ++k) {
    attrfuse::SyntheticConfig config;
    config.node_count = 7;
    config.states_per_node = 4;
    config.sample_count = 4000;
    config.description_noise = 0.35;  // degrades the text model
    config.local_missing_rate = 0.35;  // degrades the network model
    config.seed = 101 + static_cast<std::uint64_t>(k);
    attrfuse::SyntheticData data = attrfuse::generate_synthetic(config);

    attrfuse::TrainOptions options;
    options.seed = config.seed;
    // Sharpened softmax: raw similarity scores are close together, so at
    // temperature 1 the text distribution is flat and its confidence can
    // never counterbalance a sharp (possibly wrong) network posterior.
    options.temperature = 0.2;
    attrfuse::ModelBundle bundle =
        attrfuse::train_model(data.catalog, data.spec, data.labels, options);
    SplitAccuracy acc = split_accuracy(bundle, data, bundle.split.test);

    double best_single = std::max(acc.model, acc.text);
    double margin = acc.ensemble - best_single;
    worst_margin = std::min(worst_margin, margin);
    if (margin < -1.0 - 1e-9) within_cushion = false;
    if (margin > 0.0) ++strictly_better;
  }
  double secs = seconds_since(t0);
  std::ostringstream d;
  d << "20 datasets: fused >= best single - 1pt "
    << (within_cushion ? "held" : "violated") << " (worst margin "
    << std::fixed << std::setprecision(2) << worst_margin
    << "pt), strictly better on " << strictly_better << "/20 (need 10), "
    << std::setprecision(1) << secs << "s (budget 300s)";
  return {within_cushion && strictly_better >= 10 && secs < 300.0, d.str()};
}

// --- check 9: text evidence covers states missing from training -----------

Outcome check_unseen_state_generalization() {
  attrfuse::SyntheticConfig config;
  config.node_count = 6;
  config.states_per_node = 12;
  config.sample_count = 3000;
  config.description_noise = 0.1;
  config.sort_by_state = true;  // records grouped by true state
  config.seed = 400;
  attrfuse::SyntheticData data = attrfuse::generate_synthetic(config);

  attrfuse::TrainOptions options;
  options.ordered_split = true;
  options.ratios = {0.2, 0.2, 0.6};
  options.temperature = 0.2;
  options.seed = config.seed;
  attrfuse::ModelBundle bundle =
      attrfuse::train_model(data.catalog, data.spec, data.labels, options);

  std::size_t seen =
      bundle.net.nodes[static_cast<std::size_t>(bundle.net.root)].states.size();
  // Precondition of the scenario: training saw at most 30% of the states.
  bool few_seen = seen * 10 <= data.spec.states.size() * 3;

  SplitAccuracy acc = split_accuracy(bundle, data, bundle.split.test);
  bool ok = few_seen && acc.ensemble >= acc.model + 10.0;
  std::ostringstream d;
  d << "training saw " << seen << "/" << data.spec.states.size()
    << " states; test accuracy fused " << std::fixed << std::setprecision(1)
    << acc.ensemble << "% vs network-only " << acc.model
    << "% (need +10pt, description noise 0.1)";
  return {ok, d.str()};
}

// --- check 10: the calibrated threshold separates accuracy ----------------

Outcome check_calibration_separates() {
  attrfuse::SyntheticConfig config;
  config.node_count = 6;
  config.states_per_node = 4;
  config.sample_count = 3000;
  config.description_noise = 0.3;
  config.local_missing_rate = 0.3;
  config.seed = 77;
  attrfuse::SyntheticData data = attrfuse::generate_synthetic(config);

  attrfuse::TrainOptions options;
  options.seed = config.seed;
  attrfuse::ModelBundle bundle =
      attrfuse::train_model(data.catalog, data.spec, data.labels, options);

  auto validation =
      attrfuse::subset_catalog(data.catalog, bundle.split.validation);
  auto val_outcomes = attrfuse::predict_catalog(bundle, validation, 0.0, 0);
  auto val_truth = attrfuse::truth_states(val_outcomes, data.labels, data.spec);
  attrfuse::CalibrationReport report = attrfuse::calibrate_tau(
      attrfuse::outcome_cops(val_outcomes),
      attrfuse::outcome_correct(val_outcomes, val_truth), 2.0, 0.25, 0.05);

  bool monotone = true;
  for (std::size_t i = 1; i < report.rows.size(); ++i)
    if (report.rows[i].np_pct < report.rows[i - 1].np_pct - 1e-12)
      monotone = false;

  auto test = attrfuse::subset_catalog(data.catalog, bundle.split.test);
  auto outcomes = attrfuse::predict_catalog(bundle, test, 0.0, 0);
  auto truth = attrfuse::truth_states(outcomes, data.labels, data.spec);
  long long hi_n = 0, hi_correct = 0, lo_n = 0, lo_correct = 0;
  for (std::size_t i = 0; i < outcomes.size(); ++i) {
    bool correct = outcomes[i].predicted == truth[i];
    if (outcomes[i].cop > report.selected_tau) {
      ++hi_n;
      hi_correct += correct;
    } else {
      ++lo_n;
      lo_correct += correct;
    }
  }
  double hi_acc = hi_n ? 100.0 * static_cast<double>(hi_correct) /
                             static_cast<double>(hi_n)
                       : 0.0;
  double lo_acc = lo_n ? 100.0 * static_cast<double>(lo_correct) /
                             static_cast<double>(lo_n)
                       : 0.0;
  bool ok = monotone && hi_n > 0 && lo_n > 0 && hi_acc > lo_acc;
  std::ostringstream d;
  d << "threshold " << report.selected_tau << ": accuracy above "
    << std::fixed << std::setprecision(1) << hi_acc << "% (" << hi_n
    << " records) vs at-or-below " << lo_acc << "% (" << lo_n
    << "); queue share " << (monotone ? "monotone" : "NOT monotone")
    << " in the threshold";
  return {ok, d.str()};
}

// --- check 11: end-to-end runs are byte-identical -------------------------

int run_cli(const std::string& args) {
  std::string cmd =
      std::string("\"") + ATTRFUSE_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  return std::system(cmd.c_str());
}

Outcome check_end_to_end_determinism() {
  namespace fs = std::filesystem;
  fs::path root = testutil::scratch_dir("acceptance_determinism");
  auto run_once = [&](const std::string& tag) -> bool {
    fs::path dir = root / tag;
    fs::create_directories(dir);
    std::string data = (dir / "data").string();
    if (run_cli("generate --out \"" + data +
                "\" --nodes 6 --states 4 --samples 600 --noise 0.25 "
                "--local-missing 0.2 --seed 9") != 0)
      return false;
    std::string model = (dir / "model.json").string();
    if (run_cli("train --catalog \"" + data + "/catalog.csv\" --specs \"" +
                data + "/specs.csv\" --labels \"" + data +
                "/labels.csv\" --target category --eta 4 --seed 3 --out \"" +
                model + "\"") != 0)
      return false;
    std::string calibrated = (dir / "calibrated.json").string();
    if (run_cli("calibrate --model \"" + model + "\" --catalog \"" + data +
                "/catalog.csv\" --labels \"" + data +
                "/labels.csv\" --out-report \"" + (dir / "grid.csv").string() +
                "\" --out-model \"" + calibrated + "\"") != 0)
      return false;
    if (run_cli("predict --model \"" + calibrated + "\" --catalog \"" + data +
                "/catalog.csv\" --out \"" + (dir / "predictions.csv").string() +
                "\" --abstained \"" + (dir / "queue.csv").string() + "\"") != 0)
      return false;
    if (run_cli("evaluate --model \"" + calibrated + "\" --catalog \"" + data +
                "/catalog.csv\" --labels \"" + data +
                "/labels.csv\" --split test --out \"" +
                (dir / "metrics.csv").string() + "\"") != 0)
      return false;
    return true;
  };
  if (!run_once("a") || !run_once("b"))
    return {false, "a pipeline stage exited nonzero"};

  const char* files[] = {"data/catalog.csv", "model.json", "calibrated.json",
                         "grid.csv",         "predictions.csv", "queue.csv",
                         "metrics.csv"};
  int identical = 0;
  std::string first_diff;
  for (const char* f : files) {
    if (testutil::read_file(root / "a" / f) ==
        testutil::read_file(root / "b" / f))
      ++identical;
    else if (first_diff.empty())
      first_diff = f;
  }
  std::ostringstream d;
  d << identical << "/" << std::size(files)
    << " artifacts byte-identical across two full runs";
  if (!first_diff.empty()) d << " (first difference: " << first_diff << ")";
  return {identical == static_cast<int>(std::size(files)), d.str()};
}

}  // namespace

int main() {
  struct Entry {
    const char* name;
    Outcome (*fn)();
  };
  const Entry checks[] = {
      {"exact inference matches full enumeration", check_inference_enumeration},
      {"spanning tree attains the exhaustive maximum",
       check_spanning_tree_optimum},
      {"tree weight invariant under choice of root", check_rooting_invariance},
      {"structure recovery from sampled data", check_structure_recovery},
      {"string similarity reference values", check_string_similarity},
      {"confidence bounds and reference values", check_confidence_reference},
      {"agreeing models keep the shared winner", check_agreement_preserved},
      {"fused predictor beats either model alone", check_fusion_dominance},
      {"text evidence covers states missing from training",
       check_unseen_state_generalization},
      {"calibrated threshold separates accuracy", check_calibration_separates},
      {"end-to-end runs are byte-identical", check_end_to_end_determinism},
  };

  int failures = 0;
  for (const Entry& entry : checks) {
    Outcome result;
    try {
      result = entry.fn();
    } catch (const std::exception& e) {
      result = {false, std::string("exception: ") + e.what()};
    }
    std::printf("[%s] %s — %s\n", result.ok ? "PASS" : "FAIL", entry.name,
                result.detail.c_str());
    std::fflush(stdout);
    if (!result.ok) ++failures;
  }
  std::size_t total = std::size(checks);
  if (failures == 0)
    std::printf("all %zu acceptance checks passed\n", total);
  else
    std::printf("%d of %zu acceptance checks FAILED\n", failures, total);
  return failures == 0 ? 0 : 1;
}
