#ifndef ATTRFUSE_CATALOG_HPP
#define ATTRFUSE_CATALOG_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace attrfuse {

// One product of the local database: categorical characteristic values
// (aligned with Catalog::schema) plus free-text retailer descriptions.
// A characteristic is missing when the optional is empty; the literal
// string "NA" is an ordinary value.
struct ProductRecord {
  std::string id;
  std::vector<std::optional<std::string>> locals;
  std::vector<std::string> descriptions;
};

class Catalog {
 public:
  std::vector<std::string> schema;     // local characteristic names
  std::vector<ProductRecord> records;  // file order (first appearance)

  void rebuild_index();
  const ProductRecord* find(const std::string& id) const;
  int schema_index(const std::string& name) const;  // -1 when absent
  std::optional<std::string> local_value(const ProductRecord& rec,
                                         const std::string& name) const;

 private:
  std::unordered_map<std::string, std::size_t> index_;
};

// A target attribute of the global database: its name and the ordered list
// of admissible state labels.
struct GlobalAttributeSpec {
  std::string name;
  std::vector<std::string> states;

  int state_index(const std::string& label) const;  // exact match, -1 absent
  void validate() const;
};

// record id -> state label, for one global attribute.
struct LabelSet {
  std::string attribute;
  std::unordered_map<std::string, std::string> labels;
};

struct DatasetSplit {
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;
  std::array<double, 3> ratios{};
  std::uint64_t seed = 0;
  bool ordered = false;
};

// Catalog file: columns `id, <schema...>, description`, one row per
// (record, description) pair. Rows sharing an id merge their descriptions;
// disagreeing non-missing local values for one id are an error.
Catalog load_local_catalog(const std::string& path,
                           const std::vector<std::string>& schema);
// Schema taken from the header (everything between id and description).
Catalog load_local_catalog(const std::string& path);
void write_local_catalog(const std::string& path, const Catalog& catalog);

// Spec file: columns `attribute, state`; states listed in order.
std::vector<GlobalAttributeSpec> load_global_specs(const std::string& path);
void write_global_specs(const std::string& path,
                        const std::vector<GlobalAttributeSpec>& specs);

// Label file: columns `id, <attribute>[, <attribute>...]`; the named
// column is read. Empty cells mean unlabeled.
LabelSet load_label_set(const std::string& path, const std::string& attribute);
void write_label_set(const std::string& path, const LabelSet& labels,
                     const std::vector<std::string>& id_order);

// Throws naming the first label not present in the spec's state list.
void validate_labels(const LabelSet& labels, const GlobalAttributeSpec& spec);

// Splits the labeled ids (records present in both catalog and labels, in
// catalog order). ordered=true keeps file order; otherwise a seeded uniform
// shuffle. Sizes are floored per split, remainder goes to train.
DatasetSplit split_dataset(const Catalog& catalog, const LabelSet& labels,
                           std::array<double, 3> ratios, std::uint64_t seed,
                           bool ordered);

}  // namespace attrfuse

#endif
