#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "attrfuse/catalog.hpp"
#include "attrfuse/csv.hpp"
#include "test_util.hpp"

using namespace attrfuse;

static const auto kDir = testutil::scratch_dir("csv_catalog");

TEST_CASE("csv line parsing") {
  CHECK(parse_csv_line("a,b,c") == std::vector<std::string>{"a", "b", "c"});
  CHECK(parse_csv_line("") == std::vector<std::string>{""});
  CHECK(parse_csv_line(",") == std::vector<std::string>{"", ""});
  CHECK(parse_csv_line("\"a,b\",c") == std::vector<std::string>{"a,b", "c"});
  CHECK(parse_csv_line("\"he said \"\"hi\"\"\"") ==
        std::vector<std::string>{"he said \"hi\""});
  CHECK_THROWS_AS(parse_csv_line("\"unterminated"), std::runtime_error);
}

TEST_CASE("csv escaping round-trips through the parser") {
  for (const std::string& field :
       {std::string("plain"), std::string("with,comma"),
        std::string("with \"quotes\""), std::string(" leading"),
        std::string("trailing "), std::string("")}) {
    CHECK(parse_csv_line(csv_escape(field)) ==
          std::vector<std::string>{field});
  }
}

TEST_CASE("csv file write/read round trip") {
  auto path = (kDir / "roundtrip.csv").string();
  std::vector<std::string> header{"x", "y"};
  std::vector<std::vector<std::string>> rows{{"1", "a,b"}, {"2", "q\"q"}};
  write_csv_file(path, header, rows);
  CsvTable table = read_csv_file(path);
  CHECK(table.header == header);
  CHECK(table.rows == rows);
  CHECK(table.line_numbers == std::vector<std::size_t>{2, 3});
}

TEST_CASE("catalog load merges rows sharing an id") {
  auto path = testutil::write_file(kDir / "cat.csv",
                                   "id,color,size,description\n"
                                   "p1,red,big,first text\n"
                                   "p1,red,,second text\n"
                                   "p2,,small,\n");
  Catalog cat = load_local_catalog(path);
  CHECK(cat.schema == std::vector<std::string>{"color", "size"});
  REQUIRE(cat.records.size() == 2);
  const ProductRecord* p1 = cat.find("p1");
  REQUIRE(p1 != nullptr);
  CHECK(*p1->locals[0] == "red");
  CHECK(*p1->locals[1] == "big");
  CHECK(p1->descriptions ==
        std::vector<std::string>{"first text", "second text"});
  const ProductRecord* p2 = cat.find("p2");
  REQUIRE(p2 != nullptr);
  CHECK(!p2->locals[0].has_value());
  CHECK(*p2->locals[1] == "small");
  CHECK(p2->descriptions.empty());
}

TEST_CASE("a later row can fill a missing local but not change one") {
  auto path = testutil::write_file(kDir / "fill.csv",
                                   "id,color,description\n"
                                   "p1,,text a\n"
                                   "p1,blue,text b\n");
  Catalog cat = load_local_catalog(path);
  CHECK(*cat.find("p1")->locals[0] == "blue");

  auto bad = testutil::write_file(kDir / "conflict.csv",
                                  "id,color,description\n"
                                  "p1,blue,text a\n"
                                  "p1,green,text b\n");
  CHECK_THROWS_WITH_AS(load_local_catalog(bad),
                       doctest::Contains("characteristic 'color'"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(load_local_catalog(bad), doctest::Contains("p1"),
                       std::runtime_error);
}

TEST_CASE("malformed catalog rows are reported with their line number") {
  auto path = testutil::write_file(kDir / "short.csv",
                                   "id,color,description\n"
                                   "p1,red,ok\n"
                                   "p2,too-few\n");
  CHECK_THROWS_WITH_AS(load_local_catalog(path), doctest::Contains(":3:"),
                       std::runtime_error);

  auto empty_id = testutil::write_file(kDir / "noid.csv",
                                       "id,color,description\n"
                                       ",red,text\n");
  CHECK_THROWS_WITH_AS(load_local_catalog(empty_id),
                       doctest::Contains("empty id"), std::runtime_error);

  auto bad_header = testutil::write_file(kDir / "hdr.csv", "a,b\nc,d\n");
  CHECK_THROWS_AS(load_local_catalog(bad_header), std::runtime_error);
}

TEST_CASE("catalog write/load round trip") {
  Catalog cat;
  cat.schema = {"color", "size"};
  ProductRecord a;
  a.id = "p1";
  a.locals = {std::string("red"), std::nullopt};
  a.descriptions = {"one, with comma", "two"};
  ProductRecord b;
  b.id = "p2";
  b.locals = {std::nullopt, std::string("small")};
  cat.records = {a, b};
  cat.rebuild_index();

  auto path = (kDir / "rt.csv").string();
  write_local_catalog(path, cat);
  Catalog back = load_local_catalog(path);
  CHECK(back.schema == cat.schema);
  REQUIRE(back.records.size() == 2);
  CHECK(back.records[0].id == "p1");
  CHECK(back.records[0].locals == a.locals);
  CHECK(back.records[0].descriptions == a.descriptions);
  CHECK(back.records[1].locals == b.locals);
  CHECK(back.records[1].descriptions.empty());
}

TEST_CASE("spec file keeps state order and validates") {
  auto path = testutil::write_file(kDir / "specs.csv",
                                   "attribute,state\n"
                                   "category,water\n"
                                   "category,juice\n"
                                   "brand,acme\n"
                                   "brand,zenith\n");
  auto specs = load_global_specs(path);
  REQUIRE(specs.size() == 2);
  CHECK(specs[0].name == "category");
  CHECK(specs[0].states == std::vector<std::string>{"water", "juice"});
  CHECK(specs[1].name == "brand");

  auto out = (kDir / "specs_out.csv").string();
  write_global_specs(out, specs);
  CHECK(load_global_specs(out).size() == 2);

  auto dup = testutil::write_file(kDir / "dup.csv",
                                  "attribute,state\n"
                                  "category,water\n"
                                  "category,water\n");
  CHECK_THROWS_WITH_AS(load_global_specs(dup),
                       doctest::Contains("duplicate state"),
                       std::invalid_argument);

  auto single = testutil::write_file(kDir / "single.csv",
                                     "attribute,state\ncategory,water\n");
  CHECK_THROWS_AS(load_global_specs(single), std::invalid_argument);
}

TEST_CASE("label files may carry several attribute columns") {
  auto path = testutil::write_file(kDir / "labels.csv",
                                   "id,category,brand\n"
                                   "p1,water,acme\n"
                                   "p2,,zenith\n"
                                   "p3,juice,\n");
  LabelSet cat_labels = load_label_set(path, "category");
  CHECK(cat_labels.labels.size() == 2);
  CHECK(cat_labels.labels.at("p1") == "water");
  CHECK(cat_labels.labels.count("p2") == 0);

  LabelSet brand_labels = load_label_set(path, "brand");
  CHECK(brand_labels.labels.size() == 2);
  CHECK(brand_labels.labels.at("p2") == "zenith");

  CHECK_THROWS_WITH_AS(load_label_set(path, "nope"),
                       doctest::Contains("no column for attribute 'nope'"),
                       std::runtime_error);

  auto conflict = testutil::write_file(kDir / "labels_conflict.csv",
                                       "id,category\n"
                                       "p1,water\n"
                                       "p1,juice\n");
  CHECK_THROWS_WITH_AS(load_label_set(conflict, "category"),
                       doctest::Contains("conflicting labels"),
                       std::runtime_error);
}

TEST_CASE("label validation names the offending label") {
  GlobalAttributeSpec spec{"category", {"water", "juice"}};
  LabelSet labels;
  labels.attribute = "category";
  labels.labels = {{"p1", "water"}, {"p2", "soda"}};
  CHECK_THROWS_WITH_AS(validate_labels(labels, spec),
                       doctest::Contains("label 'soda'"), std::runtime_error);
  labels.labels.erase("p2");
  CHECK_NOTHROW(validate_labels(labels, spec));
}

namespace {

Catalog tiny_catalog(int n) {
  Catalog cat;
  cat.schema = {"c"};
  for (int i = 0; i < n; ++i) {
    ProductRecord rec;
    rec.id = "p" + std::to_string(i);
    rec.locals = {std::string("x")};
    cat.records.push_back(rec);
  }
  cat.rebuild_index();
  return cat;
}

LabelSet all_labeled(const Catalog& cat) {
  LabelSet labels;
  labels.attribute = "category";
  for (const auto& rec : cat.records) labels.labels[rec.id] = "water";
  return labels;
}

}  // namespace

TEST_CASE("split sizes follow the floor-then-train-remainder rule") {
  Catalog cat = tiny_catalog(10);
  LabelSet labels = all_labeled(cat);
  DatasetSplit split = split_dataset(cat, labels, {0.6, 0.2, 0.2}, 1, false);
  CHECK(split.train.size() == 6);
  CHECK(split.validation.size() == 2);
  CHECK(split.test.size() == 2);

  // 7 records at a third each: floors 2/2/2, remainder 1 -> train.
  Catalog seven = tiny_catalog(7);
  DatasetSplit s7 = split_dataset(seven, all_labeled(seven),
                                  {1.0 / 3, 1.0 / 3, 1.0 / 3}, 1, false);
  CHECK(s7.train.size() == 3);
  CHECK(s7.validation.size() == 2);
  CHECK(s7.test.size() == 2);
}

TEST_CASE("split is a partition of the labeled ids") {
  Catalog cat = tiny_catalog(23);
  LabelSet labels = all_labeled(cat);
  labels.labels.erase("p5");  // unlabeled records stay out of the split
  DatasetSplit split = split_dataset(cat, labels, {0.5, 0.25, 0.25}, 9, false);

  std::set<std::string> seen;
  for (const auto* part : {&split.train, &split.validation, &split.test})
    for (const auto& id : *part) CHECK(seen.insert(id).second);
  CHECK(seen.size() == 22);
  CHECK(seen.count("p5") == 0);
}

TEST_CASE("ordered split keeps catalog order; shuffled split is seeded") {
  Catalog cat = tiny_catalog(10);
  LabelSet labels = all_labeled(cat);

  DatasetSplit ordered = split_dataset(cat, labels, {0.6, 0.2, 0.2}, 5, true);
  CHECK(ordered.train ==
        std::vector<std::string>{"p0", "p1", "p2", "p3", "p4", "p5"});
  CHECK(ordered.validation == std::vector<std::string>{"p6", "p7"});
  CHECK(ordered.test == std::vector<std::string>{"p8", "p9"});

  DatasetSplit a = split_dataset(cat, labels, {0.6, 0.2, 0.2}, 5, false);
  DatasetSplit b = split_dataset(cat, labels, {0.6, 0.2, 0.2}, 5, false);
  CHECK(a.train == b.train);
  CHECK(a.validation == b.validation);
  CHECK(a.test == b.test);
  CHECK(a.train != ordered.train);  // seed 5 happens to move something
}

TEST_CASE("split argument validation") {
  Catalog cat = tiny_catalog(10);
  LabelSet labels = all_labeled(cat);
  CHECK_THROWS_AS(split_dataset(cat, labels, {0.5, 0.2, 0.2}, 1, false),
                  std::invalid_argument);
  CHECK_THROWS_AS(split_dataset(cat, labels, {1.2, -0.1, -0.1}, 1, false),
                  std::invalid_argument);

  Catalog two = tiny_catalog(2);
  CHECK_THROWS_WITH_AS(
      split_dataset(two, all_labeled(two), {0.6, 0.2, 0.2}, 1, false),
      doctest::Contains("at least 3"), std::runtime_error);
}
