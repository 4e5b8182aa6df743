#include "attrfuse/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "attrfuse/stats.hpp"
#include "attrfuse/text_similarity.hpp"

namespace attrfuse {

namespace {

// Free parameters of a learned network: m-1 for the root prior, and one
// full row per parent state for every child.
long long param_count(const TreeBayesNet& net) {
  long long k = 0;
  for (const TbnNode& node : net.nodes) {
    long long m = static_cast<long long>(node.states.size());
    if (node.parent < 0) {
      k += m - 1;
    } else {
      long long mp = static_cast<long long>(
          net.nodes[static_cast<std::size_t>(node.parent)].states.size());
      k += mp * (m - 1);
    }
  }
  return k;
}

std::map<std::string, std::string> training_evidence(
    const Catalog& catalog, const ProductRecord& record,
    const std::vector<std::string>& nodes, const LabelSet& labels) {
  std::map<std::string, std::string> evidence;
  for (const std::string& name : nodes) {
    if (name == labels.attribute) {
      auto it = labels.labels.find(record.id);
      if (it != labels.labels.end()) evidence[name] = it->second;
      continue;
    }
    auto value = catalog.local_value(record, name);
    if (value) evidence[name] = *value;
  }
  return evidence;
}

}  // namespace

ModelBundle train_model(const Catalog& catalog, const GlobalAttributeSpec& spec,
                        const LabelSet& labels, const TrainOptions& options) {
  spec.validate();
  if (labels.attribute != spec.name)
    throw std::invalid_argument("label set is for attribute '" +
                                labels.attribute + "', expected '" + spec.name +
                                "'");
  validate_labels(labels, spec);

  DatasetSplit split = split_dataset(catalog, labels, options.ratios,
                                     options.seed, options.ordered_split);

  int eta = options.eta;
  if (options.clamp_eta && eta > static_cast<int>(catalog.schema.size()))
    eta = static_cast<int>(catalog.schema.size());
  std::vector<std::string> selected =
      select_relevant(catalog, split.train, labels, eta);

  // Pairwise MI graph over the target plus the selected characteristics.
  std::vector<std::string> graph_nodes;
  graph_nodes.push_back(spec.name);
  for (const std::string& name : selected) graph_nodes.push_back(name);
  WeightedGraph graph(graph_nodes);

  std::vector<std::vector<std::optional<std::string>>> columns;
  columns.push_back(label_column(labels, split.train));
  for (const std::string& name : selected)
    columns.push_back(local_column(catalog, split.train, name));
  for (std::size_t a = 0; a < graph_nodes.size(); ++a)
    for (std::size_t b = a + 1; b < graph_nodes.size(); ++b)
      graph.set_weight(a, b, column_mi(columns[a], columns[b]));

  std::vector<GraphEdge> edges = max_spanning_tree(graph);

  TreeScorer scorer;
  if (options.orient == OrientMode::kExhaustive) {
    // Penalized training likelihood: log2 P(data) - (k/2) log2 N.
    double log2_n = std::log2(static_cast<double>(split.train.size()));
    scorer = [&](const DirectedTree& candidate) {
      TreeBayesNet net =
          learn_cpts(candidate, catalog, split.train, labels, options.alpha);
      double ll = 0.0;
      for (const std::string& id : split.train) {
        const ProductRecord* rec = catalog.find(id);
        ll += log_likelihood_bits(
            net, training_evidence(catalog, *rec, candidate.nodes, labels));
      }
      return ll - 0.5 * static_cast<double>(param_count(net)) * log2_n;
    };
  }
  DirectedTree structure =
      orient_tree(graph.nodes(), edges, spec.name, options.orient, scorer);

  ModelBundle bundle;
  bundle.spec = spec;
  bundle.eta = eta;
  bundle.selected = std::move(selected);
  bundle.net = learn_cpts(structure, catalog, split.train, labels, options.alpha);
  bundle.ngram_max = options.ngram_max;
  bundle.temperature = options.temperature;
  bundle.tau = options.tau;
  bundle.lambda_pi = options.lambda_pi;
  bundle.lambda_np = options.lambda_np;
  bundle.split = std::move(split);
  return bundle;
}

std::vector<double> sbm_spec_distribution(const ModelBundle& bundle,
                                          const Catalog& catalog,
                                          const ProductRecord& record) {
  std::map<std::string, std::string> evidence;
  for (const std::string& name : bundle.selected) {
    auto value = catalog.local_value(record, name);
    if (value) evidence[name] = *value;
  }
  std::vector<double> post =
      infer_posterior(bundle.net, bundle.spec.name, evidence);

  // Spread onto the full spec state list; states never seen in training
  // keep probability 0.
  const TbnNode& target =
      bundle.net.nodes[static_cast<std::size_t>(
          bundle.net.node_index(bundle.spec.name))];
  std::vector<double> result(bundle.spec.states.size(), 0.0);
  for (std::size_t i = 0; i < target.states.size(); ++i) {
    int idx = bundle.spec.state_index(target.states[i]);
    if (idx < 0)
      throw std::runtime_error("trained state '" + target.states[i] +
                               "' is not in the target state list");
    result[static_cast<std::size_t>(idx)] = post[i];
  }
  return result;
}

std::vector<double> uts_spec_distribution(const ModelBundle& bundle,
                                          const ProductRecord& record) {
  return uts_distribution(record.descriptions, bundle.spec, bundle.ngram_max,
                          bundle.temperature);
}

PredictionOutcome predict_record(const ModelBundle& bundle,
                                 const Catalog& catalog,
                                 const ProductRecord& record, double tau) {
  PredictionOutcome outcome =
      make_prediction(sbm_spec_distribution(bundle, catalog, record),
                      uts_spec_distribution(bundle, record), tau);
  outcome.id = record.id;
  return outcome;
}

std::vector<PredictionOutcome> predict_catalog(const ModelBundle& bundle,
                                               const Catalog& catalog,
                                               double tau, int threads) {
  for (const std::string& name : bundle.selected)
    if (catalog.schema_index(name) < 0)
      throw std::runtime_error("catalog lacks characteristic '" + name + "'");

  std::size_t n = catalog.records.size();
  std::vector<PredictionOutcome> outcomes(n);
  if (threads <= 0) {
    unsigned hc = std::thread::hardware_concurrency();
    threads = static_cast<int>(hc ? hc : 4);
  }
  std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), n);

  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i)
      outcomes[i] = predict_record(bundle, catalog, catalog.records[i], tau);
    return outcomes;
  }

  std::atomic<std::size_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  auto work = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        outcomes[i] = predict_record(bundle, catalog, catalog.records[i], tau);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
  return outcomes;
}

std::vector<int> truth_states(const std::vector<PredictionOutcome>& outcomes,
                              const LabelSet& labels,
                              const GlobalAttributeSpec& spec) {
  std::vector<int> truth;
  truth.reserve(outcomes.size());
  for (const PredictionOutcome& outcome : outcomes) {
    auto it = labels.labels.find(outcome.id);
    truth.push_back(it == labels.labels.end() ? -1
                                              : spec.state_index(it->second));
  }
  return truth;
}

namespace {

void render_subtree(const std::vector<std::string>& names,
                    const std::vector<std::vector<int>>& children, int node,
                    std::string& out) {
  out += names[static_cast<std::size_t>(node)];
  if (children[static_cast<std::size_t>(node)].empty()) return;
  out.push_back('(');
  bool first = true;
  for (int child : children[static_cast<std::size_t>(node)]) {
    if (!first) out.push_back(',');
    first = false;
    render_subtree(names, children, child, out);
  }
  out.push_back(')');
}

std::string render_tree(const std::vector<std::string>& names,
                        const std::vector<int>& parent, int root) {
  std::vector<std::vector<int>> children(names.size());
  for (std::size_t i = 0; i < parent.size(); ++i)
    if (parent[i] >= 0)
      children[static_cast<std::size_t>(parent[i])].push_back(
          static_cast<int>(i));
  for (auto& list : children)
    std::sort(list.begin(), list.end(), [&](int a, int b) {
      return names[static_cast<std::size_t>(a)] <
             names[static_cast<std::size_t>(b)];
    });
  std::string out;
  render_subtree(names, children, root, out);
  return out;
}

}  // namespace

std::string tree_to_string(const TreeBayesNet& net) {
  std::vector<std::string> names;
  std::vector<int> parent;
  for (const TbnNode& node : net.nodes) {
    names.push_back(node.name);
    parent.push_back(node.parent);
  }
  return render_tree(names, parent, net.root);
}

std::string tree_to_string(const DirectedTree& tree) {
  return render_tree(tree.nodes, tree.parent, tree.root);
}

Catalog subset_catalog(const Catalog& catalog,
                       const std::vector<std::string>& ids) {
  Catalog subset;
  subset.schema = catalog.schema;
  for (const std::string& id : ids) {
    const ProductRecord* rec = catalog.find(id);
    if (!rec) throw std::runtime_error("unknown record id '" + id + "'");
    subset.records.push_back(*rec);
  }
  subset.rebuild_index();
  return subset;
}

}  // namespace attrfuse
