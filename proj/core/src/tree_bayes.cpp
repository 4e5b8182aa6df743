#include "attrfuse/tree_bayes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <stdexcept>

namespace attrfuse {

WeightedGraph::WeightedGraph(std::vector<std::string> node_names)
    : nodes_(std::move(node_names)) {
  std::set<std::string> uniq(nodes_.begin(), nodes_.end());
  if (uniq.size() != nodes_.size())
    throw std::invalid_argument("duplicate node names in graph");
  w_.assign(nodes_.size() * nodes_.size(), 0.0);
}

int WeightedGraph::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i] == name) return static_cast<int>(i);
  return -1;
}

double WeightedGraph::weight(std::size_t a, std::size_t b) const {
  return w_[a * nodes_.size() + b];
}

void WeightedGraph::set_weight(std::size_t a, std::size_t b, double w) {
  if (a == b) throw std::invalid_argument("self-edges are not allowed");
  w_[a * nodes_.size() + b] = w;
  w_[b * nodes_.size() + a] = w;
}

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : id_(n) {
    std::iota(id_.begin(), id_.end(), 0);
  }
  std::size_t root(std::size_t i) {
    while (i != id_[i]) {
      id_[i] = id_[id_[i]];
      i = id_[i];
    }
    return i;
  }
  bool unite(std::size_t a, std::size_t b) {
    std::size_t ra = root(a), rb = root(b);
    if (ra == rb) return false;
    id_[ra] = rb;
    return true;
  }

 private:
  std::vector<std::size_t> id_;
};

}  // namespace

std::vector<GraphEdge> max_spanning_tree(const WeightedGraph& graph) {
  const std::size_t n = graph.size();
  if (n < 1) throw std::invalid_argument("graph has no nodes");
  if (n == 1) return {};

  struct Candidate {
    GraphEdge edge;
    const std::string* lo;
    const std::string* hi;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const std::string &ni = graph.nodes()[i], &nj = graph.nodes()[j];
      bool i_first = ni < nj;
      Candidate c;
      c.edge = {static_cast<int>(i_first ? i : j),
                static_cast<int>(i_first ? j : i), graph.weight(i, j)};
      c.lo = i_first ? &ni : &nj;
      c.hi = i_first ? &nj : &ni;
      candidates.push_back(c);
    }
  // Descending weight, then lexicographic endpoint pair: fully deterministic.
  std::sort(candidates.begin(), candidates.end(),
            [](const Candidate& x, const Candidate& y) {
              if (x.edge.weight != y.edge.weight)
                return x.edge.weight > y.edge.weight;
              if (*x.lo != *y.lo) return *x.lo < *y.lo;
              return *x.hi < *y.hi;
            });

  UnionFind uf(n);
  std::vector<GraphEdge> tree;
  tree.reserve(n - 1);
  for (const auto& c : candidates) {
    if (uf.unite(static_cast<std::size_t>(c.edge.a),
                 static_cast<std::size_t>(c.edge.b))) {
      tree.push_back(c.edge);
      if (tree.size() == n - 1) break;
    }
  }
  return tree;
}

double total_weight(const std::vector<GraphEdge>& edges) {
  double tw = 0.0;
  for (const auto& e : edges) tw += e.weight;
  return tw;
}

double total_weight(const DirectedTree& tree, const WeightedGraph& weights) {
  double tw = 0.0;
  for (std::size_t i = 0; i < tree.nodes.size(); ++i) {
    if (tree.parent[i] < 0) continue;
    int a = weights.index_of(tree.nodes[i]);
    int b = weights.index_of(tree.nodes[static_cast<std::size_t>(tree.parent[i])]);
    if (a < 0 || b < 0)
      throw std::invalid_argument("tree node missing from weight graph");
    tw += weights.weight(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
  }
  return tw;
}

namespace {

std::vector<std::vector<int>> adjacency(std::size_t n,
                                        const std::vector<GraphEdge>& edges) {
  std::vector<std::vector<int>> adj(n);
  for (const auto& e : edges) {
    adj[static_cast<std::size_t>(e.a)].push_back(e.b);
    adj[static_cast<std::size_t>(e.b)].push_back(e.a);
  }
  return adj;
}

DirectedTree root_at(const std::vector<std::string>& nodes,
                     const std::vector<std::vector<int>>& adj, int root) {
  DirectedTree tree;
  tree.nodes = nodes;
  tree.parent.assign(nodes.size(), -2);  // -2 = unvisited
  tree.root = root;
  std::vector<int> queue{root};
  tree.parent[static_cast<std::size_t>(root)] = -1;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    int v = queue[head];
    for (int u : adj[static_cast<std::size_t>(v)]) {
      if (tree.parent[static_cast<std::size_t>(u)] != -2) continue;
      tree.parent[static_cast<std::size_t>(u)] = v;
      queue.push_back(u);
    }
  }
  if (queue.size() != nodes.size())
    throw std::invalid_argument("edge list is not a connected tree");
  return tree;
}

}  // namespace

DirectedTree orient_tree(const std::vector<std::string>& nodes,
                         const std::vector<GraphEdge>& edges,
                         const std::string& target, OrientMode mode,
                         const TreeScorer& scorer) {
  if (nodes.empty()) throw std::invalid_argument("no nodes to orient");
  if (edges.size() != nodes.size() - 1)
    throw std::invalid_argument("edge count does not match a spanning tree");
  int target_idx = -1;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i] == target) target_idx = static_cast<int>(i);
  if (target_idx < 0)
    throw std::invalid_argument("target '" + target + "' is not a tree node");

  auto adj = adjacency(nodes.size(), edges);
  DirectedTree at_target = root_at(nodes, adj, target_idx);
  if (mode == OrientMode::kRootedAtTarget) return at_target;

  if (nodes.size() > 20)
    throw std::invalid_argument(
        "exhaustive orientation is guarded at 20 nodes, got " +
        std::to_string(nodes.size()));
  if (!scorer)
    throw std::invalid_argument("exhaustive orientation requires a scorer");

  // Orientations whose parent map stays a single-rooted tree are exactly the
  // rootings. The target rooting is scored first so that ties keep it.
  std::vector<int> order{target_idx};
  std::vector<std::pair<std::string, int>> rest;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (static_cast<int>(i) != target_idx)
      rest.emplace_back(nodes[i], static_cast<int>(i));
  std::sort(rest.begin(), rest.end());
  for (const auto& [name, idx] : rest) order.push_back(idx);

  DirectedTree best = at_target;
  double best_score = scorer(at_target);
  for (std::size_t k = 1; k < order.size(); ++k) {
    DirectedTree candidate = root_at(nodes, adj, order[k]);
    double s = scorer(candidate);
    if (s > best_score) {
      best_score = s;
      best = candidate;
    }
  }
  return best;
}

int TbnNode::state_index(const std::string& value) const {
  // Linear scan: state lists are small and not required to be sorted.
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i] == value) return static_cast<int>(i);
  return static_cast<int>(states.size());  // reserved unseen index
}

int TreeBayesNet::node_index(const std::string& name) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i].name == name) return static_cast<int>(i);
  return -1;
}

void TreeBayesNet::validate() const {
  if (nodes.empty()) throw std::runtime_error("network has no nodes");
  if (alpha < 0) throw std::runtime_error("negative smoothing constant");
  int roots = 0;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const TbnNode& node = nodes[i];
    if (node.states.empty())
      throw std::runtime_error("node '" + node.name + "' has no states");
    if (node.parent < 0) {
      ++roots;
      if (static_cast<int>(i) != root)
        throw std::runtime_error("root marker does not match parent map");
      if (node.cpt.size() != node.states.size())
        throw std::runtime_error("root prior size mismatch at '" + node.name +
                                 "'");
    } else {
      const TbnNode& pa = nodes[static_cast<std::size_t>(node.parent)];
      if (node.cpt.size() != pa.states.size() * node.states.size())
        throw std::runtime_error("CPT shape mismatch at '" + node.name + "'");
    }
  }
  if (roots != 1) throw std::runtime_error("network must have exactly one root");

  // Acyclic and connected: every node must reach the root.
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    int v = static_cast<int>(i);
    std::size_t steps = 0;
    while (v >= 0 && steps <= nodes.size()) {
      v = nodes[static_cast<std::size_t>(v)].parent;
      ++steps;
    }
    if (steps > nodes.size())
      throw std::runtime_error("parent map contains a cycle");
  }

  for (const TbnNode& node : nodes) {
    const std::size_t m = node.states.size();
    const std::size_t rows = node.cpt.size() / m;
    for (std::size_t r = 0; r < rows; ++r) {
      double sum = 0.0;
      for (std::size_t c = 0; c < m; ++c) {
        double v = node.cpt[r * m + c];
        if (v < 0.0)
          throw std::runtime_error("negative CPT entry at '" + node.name + "'");
        sum += v;
      }
      if (std::abs(sum - 1.0) > 1e-9)
        throw std::runtime_error("CPT row " + std::to_string(r) + " of '" +
                                 node.name + "' does not sum to 1");
    }
  }
}

TreeBayesNet learn_cpts(const DirectedTree& structure, const Catalog& catalog,
                        const std::vector<std::string>& train_ids,
                        const LabelSet& labels, double alpha) {
  if (alpha < 0) throw std::invalid_argument("smoothing alpha must be >= 0");
  if (train_ids.empty())
    throw std::invalid_argument("no training records for CPT learning");

  const std::size_t n = structure.nodes.size();
  // Per-node accessor: the target reads the label, anything else a local.
  std::vector<int> schema_idx(n, -1);
  std::vector<bool> is_target(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    if (structure.nodes[i] == labels.attribute) {
      is_target[i] = true;
    } else {
      schema_idx[i] = catalog.schema_index(structure.nodes[i]);
      if (schema_idx[i] < 0)
        throw std::invalid_argument("structure node '" + structure.nodes[i] +
                                    "' is neither a catalog characteristic nor "
                                    "the target");
    }
  }

  auto value_of = [&](const ProductRecord& rec,
                      std::size_t node) -> std::optional<std::string> {
    if (is_target[node]) {
      auto it = labels.labels.find(rec.id);
      if (it == labels.labels.end()) return std::nullopt;
      return it->second;
    }
    return rec.locals[static_cast<std::size_t>(schema_idx[node])];
  };

  std::vector<const ProductRecord*> recs;
  recs.reserve(train_ids.size());
  for (const auto& id : train_ids) {
    const ProductRecord* rec = catalog.find(id);
    if (!rec) throw std::runtime_error("training id '" + id + "' not in catalog");
    recs.push_back(rec);
  }

  TreeBayesNet net;
  net.alpha = alpha;
  net.root = structure.root;
  net.nodes.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    TbnNode& node = net.nodes[i];
    node.name = structure.nodes[i];
    node.parent = structure.parent[i];
    std::set<std::string> seen;
    for (const ProductRecord* rec : recs) {
      auto v = value_of(*rec, i);
      if (v) seen.insert(*v);
    }
    if (seen.empty())
      throw std::runtime_error("node '" + node.name +
                               "' has no observed training values");
    node.states.assign(seen.begin(), seen.end());  // set iterates sorted
  }

  for (std::size_t i = 0; i < n; ++i) {
    TbnNode& node = net.nodes[i];
    const std::size_t m = node.states.size();
    auto child_index = [&](const std::string& v) {
      return static_cast<std::size_t>(
          std::lower_bound(node.states.begin(), node.states.end(), v) -
          node.states.begin());
    };
    if (node.parent < 0) {
      std::vector<long long> counts(m, 0);
      long long total = 0;
      for (const ProductRecord* rec : recs) {
        auto v = value_of(*rec, i);
        if (!v) continue;
        ++counts[child_index(*v)];
        ++total;
      }
      node.cpt.resize(m);
      for (std::size_t t = 0; t < m; ++t)
        node.cpt[t] = (static_cast<double>(counts[t]) + alpha) /
                      (static_cast<double>(total) + alpha * static_cast<double>(m));
    } else {
      TbnNode& pa = net.nodes[static_cast<std::size_t>(node.parent)];
      const std::size_t mp = pa.states.size();
      auto parent_index = [&](const std::string& v) {
        return static_cast<std::size_t>(
            std::lower_bound(pa.states.begin(), pa.states.end(), v) -
            pa.states.begin());
      };
      std::vector<long long> counts(mp * m, 0);
      for (const ProductRecord* rec : recs) {
        auto cv = value_of(*rec, i);
        auto pv = value_of(*rec, static_cast<std::size_t>(node.parent));
        if (!cv || !pv) continue;  // available-case: need both sides
        ++counts[parent_index(*pv) * m + child_index(*cv)];
      }
      node.cpt.resize(mp * m);
      for (std::size_t r = 0; r < mp; ++r) {
        long long row_total = 0;
        for (std::size_t c = 0; c < m; ++c) row_total += counts[r * m + c];
        if (row_total == 0 && alpha == 0.0) {
          for (std::size_t c = 0; c < m; ++c)
            node.cpt[r * m + c] = 1.0 / static_cast<double>(m);
        } else {
          for (std::size_t c = 0; c < m; ++c)
            node.cpt[r * m + c] =
                (static_cast<double>(counts[r * m + c]) + alpha) /
                (static_cast<double>(row_total) +
                 alpha * static_cast<double>(m));
        }
      }
    }
  }
  net.validate();
  return net;
}

namespace {

// Observation per node: -1 = unobserved (or mapped to the unseen state,
// which carries no likelihood), otherwise a state index.
struct InferenceContext {
  const TreeBayesNet* net;
  std::vector<std::vector<int>> adj;  // undirected tree adjacency
  std::vector<int> obs;
};

// Message from `from` toward `to`: a vector over the states of `to`.
std::vector<double> message(const InferenceContext& ctx, int from, int to) {
  const TbnNode& f = ctx.net->nodes[static_cast<std::size_t>(from)];
  const TbnNode& t = ctx.net->nodes[static_cast<std::size_t>(to)];
  const std::size_t mf = f.states.size();
  const std::size_t mt = t.states.size();

  // Collect everything local to `from` first.
  std::vector<double> local(mf, 1.0);
  if (f.parent < 0) {
    for (std::size_t x = 0; x < mf; ++x) local[x] = f.cpt[x];
  }
  for (int nb : ctx.adj[static_cast<std::size_t>(from)]) {
    if (nb == to) continue;
    std::vector<double> incoming = message(ctx, nb, from);
    for (std::size_t x = 0; x < mf; ++x) local[x] *= incoming[x];
  }
  int fixed = ctx.obs[static_cast<std::size_t>(from)];

  std::vector<double> out(mt, 0.0);
  if (f.parent == to) {
    // Factor is P(from | to), CPT of `from`: row = to state, col = from state.
    for (std::size_t y = 0; y < mt; ++y) {
      double sum = 0.0;
      for (std::size_t x = 0; x < mf; ++x) {
        if (fixed >= 0 && static_cast<std::size_t>(fixed) != x) continue;
        sum += f.cpt[y * mf + x] * local[x];
      }
      out[y] = sum;
    }
  } else {
    // `to` hangs below `from` in the directed net: factor is P(to | from).
    for (std::size_t y = 0; y < mt; ++y) {
      double sum = 0.0;
      for (std::size_t x = 0; x < mf; ++x) {
        if (fixed >= 0 && static_cast<std::size_t>(fixed) != x) continue;
        sum += t.cpt[x * mt + y] * local[x];
      }
      out[y] = sum;
    }
  }
  return out;
}

// Unnormalized P(query = t, evidence) for every state t of the query node.
std::vector<double> joint_at(const InferenceContext& ctx, int query) {
  const TbnNode& q = ctx.net->nodes[static_cast<std::size_t>(query)];
  const std::size_t m = q.states.size();
  std::vector<double> joint(m, 1.0);
  if (q.parent < 0)
    for (std::size_t x = 0; x < m; ++x) joint[x] = q.cpt[x];
  for (int nb : ctx.adj[static_cast<std::size_t>(query)]) {
    std::vector<double> incoming = message(ctx, nb, query);
    for (std::size_t x = 0; x < m; ++x) joint[x] *= incoming[x];
  }
  int fixed = ctx.obs[static_cast<std::size_t>(query)];
  if (fixed >= 0)
    for (std::size_t x = 0; x < m; ++x)
      if (static_cast<std::size_t>(fixed) != x) joint[x] = 0.0;
  return joint;
}

InferenceContext build_context(const TreeBayesNet& net,
                               const std::map<std::string, std::string>& evidence) {
  InferenceContext ctx;
  ctx.net = &net;
  ctx.adj.resize(net.nodes.size());
  for (std::size_t i = 0; i < net.nodes.size(); ++i) {
    int pa = net.nodes[i].parent;
    if (pa < 0) continue;
    ctx.adj[i].push_back(pa);
    ctx.adj[static_cast<std::size_t>(pa)].push_back(static_cast<int>(i));
  }
  ctx.obs.assign(net.nodes.size(), -1);
  for (const auto& [name, value] : evidence) {
    int idx = net.node_index(name);
    if (idx < 0)
      throw std::invalid_argument("evidence on unknown node '" + name + "'");
    const TbnNode& node = net.nodes[static_cast<std::size_t>(idx)];
    int s = node.state_index(value);
    // The reserved unseen state has no likelihood column; the node stays
    // marginalized, matching a value the model has no parameters for.
    if (s < static_cast<int>(node.states.size()))
      ctx.obs[static_cast<std::size_t>(idx)] = s;
  }
  return ctx;
}

}  // namespace

std::vector<double> infer_posterior(
    const TreeBayesNet& net, const std::string& target,
    const std::map<std::string, std::string>& evidence) {
  net.validate();
  int query = net.node_index(target);
  if (query < 0)
    throw std::invalid_argument("target '" + target + "' is not a network node");
  if (evidence.count(target))
    throw std::invalid_argument("target must not appear in the evidence");

  InferenceContext ctx = build_context(net, evidence);
  std::vector<double> joint = joint_at(ctx, query);
  double sum = 0.0;
  for (double v : joint) sum += v;
  if (sum <= 0.0) {
    // Only reachable with alpha = 0 and an evidence combination of
    // probability zero; fall back to uniform.
    return std::vector<double>(joint.size(), 1.0 / static_cast<double>(joint.size()));
  }
  for (double& v : joint) v /= sum;
  return joint;
}

double log_likelihood_bits(const TreeBayesNet& net,
                           const std::map<std::string, std::string>& evidence) {
  net.validate();
  InferenceContext ctx = build_context(net, evidence);
  std::vector<double> joint = joint_at(ctx, net.root);
  double sum = 0.0;
  for (double v : joint) sum += v;
  if (sum <= 0.0) return -std::numeric_limits<double>::infinity();
  return std::log2(sum);
}

}  // namespace attrfuse
