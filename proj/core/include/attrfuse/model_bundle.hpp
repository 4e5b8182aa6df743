#ifndef ATTRFUSE_MODEL_BUNDLE_HPP
#define ATTRFUSE_MODEL_BUNDLE_HPP

#include <string>

#include "attrfuse/catalog.hpp"
#include "attrfuse/tree_bayes.hpp"

namespace attrfuse {

// Everything needed to reproduce predictions for one global attribute:
// the selected characteristics, the learned network, the text-model
// parameters, the abstention threshold, and the training provenance
// (input digests plus the exact split manifest).
struct ModelBundle {
  int format_version = 1;

  GlobalAttributeSpec spec;  // target name + full state list
  int eta = 5;
  std::vector<std::string> selected;  // MI descending

  TreeBayesNet net;

  int ngram_max = 3;
  double temperature = 1.0;

  double tau = 0.0;
  double lambda_pi = 2.0;
  double lambda_np = 0.25;

  std::string catalog_digest;
  std::string labels_digest;
  std::string specs_digest;
  DatasetSplit split;
};

// JSON document with sorted keys and shortest-round-trip doubles, so
// save -> load -> save is byte-identical.
void save_bundle(const std::string& path, const ModelBundle& bundle);
ModelBundle load_bundle(const std::string& path);

// Bare network persistence (ground-truth exports and tests).
void save_network(const std::string& path, const TreeBayesNet& net);
TreeBayesNet load_network(const std::string& path);

}  // namespace attrfuse

#endif
