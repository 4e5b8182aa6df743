#ifndef ATTRFUSE_TREE_BAYES_HPP
#define ATTRFUSE_TREE_BAYES_HPP

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "attrfuse/catalog.hpp"

namespace attrfuse {

// Complete graph with symmetric edge weights (mutual information in bits).
class WeightedGraph {
 public:
  explicit WeightedGraph(std::vector<std::string> node_names);

  const std::vector<std::string>& nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  int index_of(const std::string& name) const;  // -1 when absent

  double weight(std::size_t a, std::size_t b) const;
  void set_weight(std::size_t a, std::size_t b, double w);

 private:
  std::vector<std::string> nodes_;
  std::vector<double> w_;
};

struct GraphEdge {
  int a = 0;
  int b = 0;
  double weight = 0.0;
};

// Kruskal on descending weight; ties by lexicographic (min-name, max-name)
// endpoint pair. Throws on an empty graph; a single node yields no edges.
std::vector<GraphEdge> max_spanning_tree(const WeightedGraph& graph);

struct DirectedTree {
  std::vector<std::string> nodes;
  std::vector<int> parent;  // -1 for the root
  int root = -1;
};

enum class OrientMode { kRootedAtTarget, kExhaustive };

using TreeScorer = std::function<double(const DirectedTree&)>;

// Sum of W(child, parent) over all non-root nodes. Symmetric weights make
// this invariant under re-rooting.
double total_weight(const DirectedTree& tree, const WeightedGraph& weights);
double total_weight(const std::vector<GraphEdge>& edges);

// kRootedAtTarget directs every edge away from the target. kExhaustive
// enumerates every orientation that remains a single-rooted tree (one per
// choice of root), applies the scorer, and keeps the best; ties fall back
// to the target rooting. The exhaustive walk is guarded at 20 nodes.
DirectedTree orient_tree(const std::vector<std::string>& nodes,
                         const std::vector<GraphEdge>& edges,
                         const std::string& target, OrientMode mode,
                         const TreeScorer& scorer = {});

// One node of a learned tree network. `states` holds the values seen in
// training, sorted; the reserved unseen state is the implicit extra index
// `states.size()` used only on the evidence side.
struct TbnNode {
  std::string name;
  int parent = -1;
  std::vector<std::string> states;
  // Root: length |states| prior. Otherwise |parent states| x |states|,
  // row-major by parent state. Rows sum to 1.
  std::vector<double> cpt;

  int state_index(const std::string& value) const;  // |states| when unseen
};

struct TreeBayesNet {
  std::vector<TbnNode> nodes;
  int root = -1;
  double alpha = 1.0;

  int node_index(const std::string& name) const;  // -1 when absent
  // Checks the tree shape and CPT row normalization (1e-9).
  void validate() const;
};

// Laplace-smoothed CPTs: cell = (count + alpha) / (row total + alpha * m)
// with m the node's seen-state count. A row with zero total becomes
// uniform. Pairs with a missing child or parent value are skipped.
TreeBayesNet learn_cpts(const DirectedTree& structure, const Catalog& catalog,
                        const std::vector<std::string>& train_ids,
                        const LabelSet& labels, double alpha);

// Exact P(target | evidence) by tree message passing. Evidence values never
// seen in training map to the reserved unseen state, which carries no
// likelihood and leaves that node marginalized.
std::vector<double> infer_posterior(
    const TreeBayesNet& net, const std::string& target,
    const std::map<std::string, std::string>& evidence);

// log2 P(evidence) under the network, for orientation scoring.
double log_likelihood_bits(const TreeBayesNet& net,
                           const std::map<std::string, std::string>& evidence);

}  // namespace attrfuse

#endif
