#ifndef ATTRFUSE_STATS_HPP
#define ATTRFUSE_STATS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "attrfuse/catalog.hpp"

namespace attrfuse {

// Empirical joint counts of two categorical variables. Labels are sorted
// lexicographically so tables built from the same data are identical.
struct ContingencyTable {
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<long long> counts;  // row-major
  long long total = 0;

  long long at(std::size_t r, std::size_t c) const {
    return counts[r * col_labels.size() + c];
  }
};

// Pairwise deletion: a pair with either side missing is excluded, so
// table.total + excluded = pairs.size().
ContingencyTable build_contingency(
    const std::vector<std::pair<std::optional<std::string>,
                                std::optional<std::string>>>& pairs);

// Plug-in Shannon entropy in bits; 0*log2(0) = 0. Throws when no count is
// positive.
double entropy_bits(const std::vector<long long>& counts);

// Plug-in mutual information in bits, clamped below at 0.
double mutual_information_bits(const ContingencyTable& table);

// Column extraction helpers used to assemble variable pairs.
std::vector<std::optional<std::string>> local_column(
    const Catalog& catalog, const std::vector<std::string>& ids,
    const std::string& characteristic);
std::vector<std::optional<std::string>> label_column(
    const LabelSet& labels, const std::vector<std::string>& ids);

// MI between two extracted columns (they must be id-aligned).
double column_mi(const std::vector<std::optional<std::string>>& a,
                 const std::vector<std::optional<std::string>>& b);

// The eta local characteristics most informative about the target labels,
// MI descending, ties by ascending name. Computed on the given (training)
// ids only.
std::vector<std::string> select_relevant(const Catalog& catalog,
                                         const std::vector<std::string>& train_ids,
                                         const LabelSet& labels, int eta);

}  // namespace attrfuse

#endif
