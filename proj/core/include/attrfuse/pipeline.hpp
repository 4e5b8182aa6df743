#ifndef ATTRFUSE_PIPELINE_HPP
#define ATTRFUSE_PIPELINE_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "attrfuse/catalog.hpp"
#include "attrfuse/ensemble.hpp"
#include "attrfuse/model_bundle.hpp"
#include "attrfuse/tree_bayes.hpp"

namespace attrfuse {

struct TrainOptions {
  int eta = 5;
  double alpha = 1.0;
  int ngram_max = 3;
  double temperature = 1.0;
  double tau = 0.0;
  double lambda_pi = 2.0;
  double lambda_np = 0.25;
  std::array<double, 3> ratios{0.6, 0.2, 0.2};
  std::uint64_t seed = 42;
  bool ordered_split = false;
  OrientMode orient = OrientMode::kRootedAtTarget;
  bool clamp_eta = true;  // cap eta at the catalog's characteristic count
};

// Relevance selection -> pairwise MI graph -> maximum spanning tree ->
// orientation -> CPTs. Digests are left empty; callers that loaded the
// inputs from files fill them in.
ModelBundle train_model(const Catalog& catalog, const GlobalAttributeSpec& spec,
                        const LabelSet& labels, const TrainOptions& options);

// SBM posterior mapped onto the full spec state list. States absent from
// training receive probability 0.
std::vector<double> sbm_spec_distribution(const ModelBundle& bundle,
                                          const Catalog& catalog,
                                          const ProductRecord& record);

std::vector<double> uts_spec_distribution(const ModelBundle& bundle,
                                          const ProductRecord& record);

PredictionOutcome predict_record(const ModelBundle& bundle,
                                 const Catalog& catalog,
                                 const ProductRecord& record, double tau);

// Fans out across records on a bounded pool; results are in catalog order
// and independent of the thread count. Throws if the catalog lacks any
// characteristic the bundle selected.
std::vector<PredictionOutcome> predict_catalog(const ModelBundle& bundle,
                                               const Catalog& catalog,
                                               double tau, int threads = 0);

// Truth state indices (into spec.states) for the given outcome list;
// records without a label get -1.
std::vector<int> truth_states(const std::vector<PredictionOutcome>& outcomes,
                              const LabelSet& labels,
                              const GlobalAttributeSpec& spec);

// One-line parenthesized rendering, children sorted by name:
// root(child1(grand),child2)
std::string tree_to_string(const TreeBayesNet& net);
std::string tree_to_string(const DirectedTree& tree);

// Restrict a catalog to the given ids (order of `ids` preserved).
Catalog subset_catalog(const Catalog& catalog, const std::vector<std::string>& ids);

}  // namespace attrfuse

#endif
