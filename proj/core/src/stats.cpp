#include "attrfuse/stats.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace attrfuse {

ContingencyTable build_contingency(
    const std::vector<std::pair<std::optional<std::string>,
                                std::optional<std::string>>>& pairs) {
  std::map<std::string, std::size_t> rows, cols;
  for (const auto& [a, b] : pairs) {
    if (!a || !b) continue;  // pairwise deletion
    rows.emplace(*a, 0);
    cols.emplace(*b, 0);
  }
  ContingencyTable table;
  table.row_labels.reserve(rows.size());
  for (auto& [label, idx] : rows) {
    idx = table.row_labels.size();
    table.row_labels.push_back(label);
  }
  table.col_labels.reserve(cols.size());
  for (auto& [label, idx] : cols) {
    idx = table.col_labels.size();
    table.col_labels.push_back(label);
  }
  table.counts.assign(table.row_labels.size() * table.col_labels.size(), 0);
  for (const auto& [a, b] : pairs) {
    if (!a || !b) continue;
    ++table.counts[rows[*a] * table.col_labels.size() + cols[*b]];
    ++table.total;
  }
  return table;
}

double entropy_bits(const std::vector<long long>& counts) {
  long long total = 0;
  for (long long c : counts) {
    if (c < 0) throw std::invalid_argument("negative count in entropy");
    total += c;
  }
  if (total == 0)
    throw std::invalid_argument("entropy needs at least one positive count");
  double h = 0.0;
  for (long long c : counts) {
    if (c == 0) continue;
    double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log2(p);
  }
  return h < 0.0 ? 0.0 : h;
}

double mutual_information_bits(const ContingencyTable& table) {
  if (table.total < 1)
    throw std::invalid_argument("mutual information needs a non-empty table");
  const std::size_t nr = table.row_labels.size();
  const std::size_t nc = table.col_labels.size();
  std::vector<long long> row_sum(nr, 0), col_sum(nc, 0);
  for (std::size_t r = 0; r < nr; ++r)
    for (std::size_t c = 0; c < nc; ++c) {
      row_sum[r] += table.at(r, c);
      col_sum[c] += table.at(r, c);
    }
  const double n = static_cast<double>(table.total);
  double mi = 0.0;
  for (std::size_t r = 0; r < nr; ++r)
    for (std::size_t c = 0; c < nc; ++c) {
      long long cell = table.at(r, c);
      if (cell == 0) continue;
      double pxy = static_cast<double>(cell) / n;
      double px = static_cast<double>(row_sum[r]) / n;
      double py = static_cast<double>(col_sum[c]) / n;
      mi += pxy * std::log2(pxy / (px * py));
    }
  return mi < 0.0 ? 0.0 : mi;  // floating-point dust only
}

std::vector<std::optional<std::string>> local_column(
    const Catalog& catalog, const std::vector<std::string>& ids,
    const std::string& characteristic) {
  int idx = catalog.schema_index(characteristic);
  if (idx < 0)
    throw std::invalid_argument("unknown characteristic '" + characteristic +
                                "'");
  std::vector<std::optional<std::string>> col;
  col.reserve(ids.size());
  for (const auto& id : ids) {
    const ProductRecord* rec = catalog.find(id);
    if (!rec) throw std::runtime_error("id '" + id + "' not in catalog");
    col.push_back(rec->locals[static_cast<std::size_t>(idx)]);
  }
  return col;
}

std::vector<std::optional<std::string>> label_column(
    const LabelSet& labels, const std::vector<std::string>& ids) {
  std::vector<std::optional<std::string>> col;
  col.reserve(ids.size());
  for (const auto& id : ids) {
    auto it = labels.labels.find(id);
    if (it == labels.labels.end())
      col.push_back(std::nullopt);
    else
      col.push_back(it->second);
  }
  return col;
}

double column_mi(const std::vector<std::optional<std::string>>& a,
                 const std::vector<std::optional<std::string>>& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("column length mismatch in MI");
  std::vector<std::pair<std::optional<std::string>, std::optional<std::string>>>
      pairs;
  pairs.reserve(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) pairs.emplace_back(a[i], b[i]);
  ContingencyTable table = build_contingency(pairs);
  if (table.total == 0) return 0.0;  // nothing jointly observed
  return mutual_information_bits(table);
}

std::vector<std::string> select_relevant(const Catalog& catalog,
                                         const std::vector<std::string>& train_ids,
                                         const LabelSet& labels, int eta) {
  if (eta <= 0) throw std::invalid_argument("eta must be positive");
  if (static_cast<std::size_t>(eta) > catalog.schema.size())
    throw std::invalid_argument(
        "eta exceeds the number of local characteristics (" +
        std::to_string(catalog.schema.size()) + ")");

  auto target = label_column(labels, train_ids);
  std::vector<std::pair<double, std::string>> ranked;
  ranked.reserve(catalog.schema.size());
  for (const auto& name : catalog.schema) {
    double mi = column_mi(local_column(catalog, train_ids, name), target);
    ranked.emplace_back(mi, name);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& x, const auto& y) {
    if (x.first != y.first) return x.first > y.first;
    return x.second < y.second;
  });
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(eta));
  for (int i = 0; i < eta; ++i) out.push_back(ranked[static_cast<std::size_t>(i)].second);
  return out;
}

}  // namespace attrfuse
