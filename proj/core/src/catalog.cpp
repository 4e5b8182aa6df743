#include "attrfuse/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include "attrfuse/csv.hpp"
#include "attrfuse/util.hpp"

namespace attrfuse {

void Catalog::rebuild_index() {
  index_.clear();
  index_.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) index_[records[i].id] = i;
}

const ProductRecord* Catalog::find(const std::string& id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &records[it->second];
}

int Catalog::schema_index(const std::string& name) const {
  for (std::size_t i = 0; i < schema.size(); ++i)
    if (schema[i] == name) return static_cast<int>(i);
  return -1;
}

std::optional<std::string> Catalog::local_value(const ProductRecord& rec,
                                                const std::string& name) const {
  int idx = schema_index(name);
  if (idx < 0) return std::nullopt;
  return rec.locals[static_cast<std::size_t>(idx)];
}

int GlobalAttributeSpec::state_index(const std::string& label) const {
  for (std::size_t i = 0; i < states.size(); ++i)
    if (states[i] == label) return static_cast<int>(i);
  return -1;
}

void GlobalAttributeSpec::validate() const {
  if (name.empty()) throw std::invalid_argument("global attribute name is empty");
  if (states.size() < 2)
    throw std::invalid_argument("global attribute '" + name +
                                "' needs at least 2 states");
  std::set<std::string> seen;
  for (const auto& s : states) {
    if (s.empty())
      throw std::invalid_argument("global attribute '" + name +
                                  "' has an empty state label");
    if (!seen.insert(s).second)
      throw std::invalid_argument("global attribute '" + name +
                                  "' has duplicate state '" + s + "'");
  }
}

namespace {

void check_catalog_header(const std::vector<std::string>& header,
                          const std::vector<std::string>& schema,
                          const std::string& path) {
  std::vector<std::string> expected;
  expected.reserve(schema.size() + 2);
  expected.push_back("id");
  expected.insert(expected.end(), schema.begin(), schema.end());
  expected.push_back("description");
  if (header != expected)
    throw std::runtime_error(path + ": header does not match schema plus id and "
                             "description columns");
}

}  // namespace

Catalog load_local_catalog(const std::string& path,
                           const std::vector<std::string>& schema) {
  CsvTable table = read_csv_file(path);
  check_catalog_header(table.header, schema, path);

  Catalog catalog;
  catalog.schema = schema;
  const std::size_t ncols = schema.size() + 2;
  const std::size_t desc_col = ncols - 1;

  std::unordered_map<std::string, std::size_t> pos;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != ncols)
      throw std::runtime_error(path + ":" +
                               std::to_string(table.line_numbers[r]) +
                               ": expected " + std::to_string(ncols) +
                               " fields, got " + std::to_string(row.size()));
    const std::string& id = row[0];
    if (id.empty())
      throw std::runtime_error(path + ":" +
                               std::to_string(table.line_numbers[r]) +
                               ": empty id");

    auto it = pos.find(id);
    if (it == pos.end()) {
      ProductRecord rec;
      rec.id = id;
      rec.locals.resize(schema.size());
      for (std::size_t c = 0; c < schema.size(); ++c)
        if (!row[c + 1].empty()) rec.locals[c] = row[c + 1];
      if (!row[desc_col].empty()) rec.descriptions.push_back(row[desc_col]);
      pos[id] = catalog.records.size();
      catalog.records.push_back(std::move(rec));
    } else {
      // Merge: descriptions accumulate; locals must agree, with a missing
      // cell fillable by a later value.
      ProductRecord& rec = catalog.records[it->second];
      for (std::size_t c = 0; c < schema.size(); ++c) {
        if (row[c + 1].empty()) continue;
        if (!rec.locals[c]) {
          rec.locals[c] = row[c + 1];
        } else if (*rec.locals[c] != row[c + 1]) {
          throw std::runtime_error(path + ":" +
                                   std::to_string(table.line_numbers[r]) +
                                   ": conflicting values for characteristic '" +
                                   schema[c] + "' of id '" + id + "': '" +
                                   *rec.locals[c] + "' vs '" + row[c + 1] + "'");
        }
      }
      if (!row[desc_col].empty()) rec.descriptions.push_back(row[desc_col]);
    }
  }
  catalog.rebuild_index();
  return catalog;
}

Catalog load_local_catalog(const std::string& path) {
  CsvTable table = read_csv_file(path);
  if (table.header.size() < 2 || table.header.front() != "id" ||
      table.header.back() != "description")
    throw std::runtime_error(path +
                             ": header must be id, <characteristics...>, "
                             "description");
  std::vector<std::string> schema(table.header.begin() + 1,
                                  table.header.end() - 1);
  return load_local_catalog(path, schema);
}

void write_local_catalog(const std::string& path, const Catalog& catalog) {
  std::vector<std::string> header;
  header.push_back("id");
  header.insert(header.end(), catalog.schema.begin(), catalog.schema.end());
  header.push_back("description");

  std::vector<std::vector<std::string>> rows;
  for (const auto& rec : catalog.records) {
    std::vector<std::string> base;
    base.reserve(header.size());
    base.push_back(rec.id);
    for (const auto& v : rec.locals) base.push_back(v ? *v : std::string());
    if (rec.descriptions.empty()) {
      auto row = base;
      row.push_back("");
      rows.push_back(std::move(row));
    } else {
      for (const auto& d : rec.descriptions) {
        auto row = base;
        row.push_back(d);
        rows.push_back(std::move(row));
      }
    }
  }
  write_csv_file(path, header, rows);
}

std::vector<GlobalAttributeSpec> load_global_specs(const std::string& path) {
  CsvTable table = read_csv_file(path);
  if (table.header != std::vector<std::string>{"attribute", "state"})
    throw std::runtime_error(path + ": header must be attribute,state");
  std::vector<GlobalAttributeSpec> specs;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != 2)
      throw std::runtime_error(path + ":" +
                               std::to_string(table.line_numbers[r]) +
                               ": expected 2 fields");
    auto it = std::find_if(specs.begin(), specs.end(),
                           [&](const auto& s) { return s.name == row[0]; });
    if (it == specs.end()) {
      specs.push_back({row[0], {row[1]}});
    } else {
      it->states.push_back(row[1]);
    }
  }
  for (const auto& s : specs) s.validate();
  return specs;
}

void write_global_specs(const std::string& path,
                        const std::vector<GlobalAttributeSpec>& specs) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& s : specs)
    for (const auto& st : s.states) rows.push_back({s.name, st});
  write_csv_file(path, {"attribute", "state"}, rows);
}

LabelSet load_label_set(const std::string& path, const std::string& attribute) {
  CsvTable table = read_csv_file(path);
  if (table.header.empty() || table.header[0] != "id")
    throw std::runtime_error(path + ": first column must be id");
  int col = -1;
  for (std::size_t c = 1; c < table.header.size(); ++c)
    if (table.header[c] == attribute) col = static_cast<int>(c);
  if (col < 0)
    throw std::runtime_error(path + ": no column for attribute '" + attribute +
                             "'");

  LabelSet labels;
  labels.attribute = attribute;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (row.size() != table.header.size())
      throw std::runtime_error(path + ":" +
                               std::to_string(table.line_numbers[r]) +
                               ": field count does not match header");
    const std::string& id = row[0];
    const std::string& value = row[static_cast<std::size_t>(col)];
    if (value.empty()) continue;  // unlabeled
    auto it = labels.labels.find(id);
    if (it != labels.labels.end()) {
      if (it->second != value)
        throw std::runtime_error(path + ":" +
                                 std::to_string(table.line_numbers[r]) +
                                 ": conflicting labels for id '" + id + "'");
      continue;
    }
    labels.labels[id] = value;
  }
  return labels;
}

void write_label_set(const std::string& path, const LabelSet& labels,
                     const std::vector<std::string>& id_order) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& id : id_order) {
    auto it = labels.labels.find(id);
    if (it != labels.labels.end()) rows.push_back({id, it->second});
  }
  write_csv_file(path, {"id", labels.attribute}, rows);
}

void validate_labels(const LabelSet& labels, const GlobalAttributeSpec& spec) {
  for (const auto& [id, value] : labels.labels) {
    if (spec.state_index(value) < 0)
      throw std::runtime_error("label '" + value + "' of id '" + id +
                               "' is not a state of attribute '" + spec.name +
                               "'");
  }
}

DatasetSplit split_dataset(const Catalog& catalog, const LabelSet& labels,
                           std::array<double, 3> ratios, std::uint64_t seed,
                           bool ordered) {
  double sum = ratios[0] + ratios[1] + ratios[2];
  if (std::abs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("split ratios must sum to 1");
  for (double r : ratios)
    if (r < 0.0) throw std::invalid_argument("split ratios must be non-negative");

  std::vector<std::string> ids;
  for (const auto& rec : catalog.records)
    if (labels.labels.count(rec.id)) ids.push_back(rec.id);
  if (ids.size() < 3)
    throw std::runtime_error("need at least 3 labeled records to split, have " +
                             std::to_string(ids.size()));

  if (!ordered) {
    Rng rng(seed);
    rng.shuffle(ids);
  }

  const std::size_t n = ids.size();
  // Floor per split; the remainder goes to train.
  std::size_t n_train = static_cast<std::size_t>(
      std::floor(ratios[0] * static_cast<double>(n) + 1e-9));
  std::size_t n_val = static_cast<std::size_t>(
      std::floor(ratios[1] * static_cast<double>(n) + 1e-9));
  std::size_t n_test = static_cast<std::size_t>(
      std::floor(ratios[2] * static_cast<double>(n) + 1e-9));
  n_train += n - (n_train + n_val + n_test);

  DatasetSplit split;
  split.ratios = ratios;
  split.seed = seed;
  split.ordered = ordered;
  split.train.assign(ids.begin(), ids.begin() + n_train);
  split.validation.assign(ids.begin() + n_train, ids.begin() + n_train + n_val);
  split.test.assign(ids.begin() + n_train + n_val, ids.end());
  return split;
}

}  // namespace attrfuse
