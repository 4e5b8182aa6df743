#ifndef ATTRFUSE_SYNTHETIC_HPP
#define ATTRFUSE_SYNTHETIC_HPP

#include <cstdint>

#include "attrfuse/catalog.hpp"
#include "attrfuse/tree_bayes.hpp"

namespace attrfuse {

// Synthetic benchmark generator. Samples records exactly from a random
// directed tree network whose root is the target attribute; descriptions
// embed the record's true state label unless the per-record noise draw
// suppresses it.
struct SyntheticConfig {
  int node_count = 6;        // target + (node_count - 1) local characteristics
  int states_per_node = 4;
  int sample_count = 1000;
  double description_noise = 0.0;   // P(record's descriptions omit its label)
  double local_missing_rate = 0.0;  // P(a local value is masked missing)
  std::uint64_t seed = 1;
  bool sort_by_state = false;  // emit records grouped by true state (ordered-
                               // split scenarios where training sees few states)
};

struct SyntheticData {
  Catalog catalog;
  GlobalAttributeSpec spec;
  LabelSet labels;
  TreeBayesNet truth;  // exact generating network (alpha = 0)
};

SyntheticData generate_synthetic(const SyntheticConfig& config);

}  // namespace attrfuse

#endif
