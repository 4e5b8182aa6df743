#include <benchmark/benchmark.h>

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "attrfuse/pipeline.hpp"
#include "attrfuse/stats.hpp"
#include "attrfuse/synthetic.hpp"
#include "attrfuse/text_similarity.hpp"
#include "attrfuse/tree_bayes.hpp"
#include "attrfuse/util.hpp"

namespace {

const attrfuse::SyntheticData& dataset() {
  static const attrfuse::SyntheticData data = [] {
    attrfuse::SyntheticConfig config;
    config.node_count = 10;
    config.states_per_node = 4;
    config.sample_count = 2000;
    config.seed = 5;
    return attrfuse::generate_synthetic(config);
  }();
  return data;
}

const attrfuse::ModelBundle& bundle() {
  static const attrfuse::ModelBundle model = [] {
    attrfuse::TrainOptions options;
    options.eta = 9;
    return attrfuse::train_model(dataset().catalog, dataset().spec,
                                 dataset().labels, options);
  }();
  return model;
}

std::map<std::string, std::string> half_evidence() {
  const attrfuse::SyntheticData& data = dataset();
  const attrfuse::ProductRecord& rec = data.catalog.records.front();
  std::map<std::string, std::string> evidence;
  for (std::size_t i = 0; i < data.catalog.schema.size(); i += 2)
    if (rec.locals[i]) evidence[data.catalog.schema[i]] = *rec.locals[i];
  return evidence;
}

void BM_TreeInference(benchmark::State& state) {
  const attrfuse::TreeBayesNet& net = bundle().net;
  const std::string target = dataset().spec.name;
  const auto evidence = half_evidence();
  for (auto _ : state) {
    auto posterior = attrfuse::infer_posterior(net, target, evidence);
    benchmark::DoNotOptimize(posterior);
  }
}
BENCHMARK(BM_TreeInference);

void BM_RecordPrediction(benchmark::State& state) {
  const attrfuse::ModelBundle& model = bundle();
  const attrfuse::Catalog& catalog = dataset().catalog;
  const attrfuse::ProductRecord& rec = catalog.records.front();
  for (auto _ : state) {
    auto outcome = attrfuse::predict_record(model, catalog, rec, 0.5);
    benchmark::DoNotOptimize(outcome);
  }
}
BENCHMARK(BM_RecordPrediction);

void BM_JaroWinkler(benchmark::State& state) {
  const std::string a = "sparkling water bottle";
  const std::string b = "sparklng watter bottel";
  for (auto _ : state) {
    double sim = attrfuse::jaro_winkler(a, b);
    benchmark::DoNotOptimize(sim);
  }
}
BENCHMARK(BM_JaroWinkler);

void BM_NgramProfile(benchmark::State& state) {
  const std::vector<std::string> descriptions = {
      "fresh sparkling water 500ml value pack",
      "Sparkling Water - family size",
      "water, sparkling, 6x500ml"};
  for (auto _ : state) {
    auto index = attrfuse::extract_ngrams(descriptions, 3);
    benchmark::DoNotOptimize(index);
  }
}
BENCHMARK(BM_NgramProfile);

void BM_SpanningTree(benchmark::State& state) {
  int n = static_cast<int>(state.range(0));
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back("v" + std::to_string(i));
  attrfuse::WeightedGraph graph(names);
  attrfuse::Rng rng(3);
  for (std::size_t a = 0; a < names.size(); ++a)
    for (std::size_t b = a + 1; b < names.size(); ++b)
      graph.set_weight(a, b, rng.next_unit());
  for (auto _ : state) {
    auto tree = attrfuse::max_spanning_tree(graph);
    benchmark::DoNotOptimize(tree);
  }
}
BENCHMARK(BM_SpanningTree)->Arg(8)->Arg(16)->Arg(32);

void BM_MutualInformation(benchmark::State& state) {
  attrfuse::Rng rng(9);
  std::vector<std::optional<std::string>> a, b;
  for (int i = 0; i < 2000; ++i) {
    std::size_t v = rng.next_index(5);
    a.emplace_back("a" + std::to_string(v));
    b.emplace_back("b" + std::to_string(rng.next_unit() < 0.7
                                            ? v
                                            : rng.next_index(5)));
  }
  for (auto _ : state) {
    double mi = attrfuse::column_mi(a, b);
    benchmark::DoNotOptimize(mi);
  }
}
BENCHMARK(BM_MutualInformation);

}  // namespace

BENCHMARK_MAIN();
