#ifndef ATTRFUSE_TEXT_SIMILARITY_HPP
#define ATTRFUSE_TEXT_SIMILARITY_HPP

#include <map>
#include <string>
#include <vector>

#include "attrfuse/catalog.hpp"

namespace attrfuse {

// Lowercases and splits on maximal runs of non-alphanumeric characters.
// Bytes >= 0x80 are kept verbatim so UTF-8 words survive intact.
std::vector<std::string> tokenize(const std::string& text);

// Word n-grams pooled over a record's descriptions. The frequency of an
// n-gram is the fraction of descriptions containing it, so it lies in
// (0, 1]. description_count is kept even when no tokens survive.
struct NgramIndex {
  int description_count = 0;
  std::map<std::string, double> frequency;  // space-joined n-gram -> f
};

NgramIndex extract_ngrams(const std::vector<std::string>& descriptions,
                          int n_max);

// Jaro similarity with the Winkler common-prefix boost (scale 0.1, prefix
// cap 4). Symmetric, in [0, 1]; two empty strings compare equal.
double jaro_winkler(const std::string& a, const std::string& b);

struct StateMatch {
  int state = -1;
  std::string ngram;    // best-matching n-gram, empty when the index is empty
  double similarity = 0.0;  // raw Jaro-Winkler of the best n-gram
  double score = 0.0;       // similarity * frequency of that n-gram
};

// Best n-gram per state label (labels are normalized with tokenize before
// matching). Ties on similarity prefer higher frequency, then the
// lexicographically smaller n-gram. An empty index scores every state 0.
std::vector<StateMatch> score_states(const NgramIndex& index,
                                     const GlobalAttributeSpec& spec);

// Softmax with temperature; order-preserving, sums to 1.
std::vector<double> softmax_scale(const std::vector<double>& scores,
                                  double temperature);

// The full description pipeline: n-grams -> state scores -> softmax.
std::vector<double> uts_distribution(const std::vector<std::string>& descriptions,
                                     const GlobalAttributeSpec& spec, int n_max,
                                     double temperature);

}  // namespace attrfuse

#endif
