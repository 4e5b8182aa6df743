#include "attrfuse/model_bundle.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace attrfuse {

namespace {

using nlohmann::json;

json net_to_json(const TreeBayesNet& net) {
  json nodes = json::array();
  for (const TbnNode& node : net.nodes) {
    nodes.push_back({{"name", node.name},
                     {"parent", node.parent},
                     {"states", node.states},
                     {"cpt", node.cpt}});
  }
  return json{{"alpha", net.alpha}, {"root", net.root}, {"nodes", nodes}};
}

TreeBayesNet net_from_json(const json& j) {
  TreeBayesNet net;
  net.alpha = j.at("alpha").get<double>();
  net.root = j.at("root").get<int>();
  for (const json& nj : j.at("nodes")) {
    TbnNode node;
    node.name = nj.at("name").get<std::string>();
    node.parent = nj.at("parent").get<int>();
    node.states = nj.at("states").get<std::vector<std::string>>();
    node.cpt = nj.at("cpt").get<std::vector<double>>();
    net.nodes.push_back(std::move(node));
  }
  net.validate();
  return net;
}

void dump_to_file(const std::string& path, const json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

json parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open: " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace

void save_bundle(const std::string& path, const ModelBundle& bundle) {
  json j{
      {"format_version", bundle.format_version},
      {"target", {{"name", bundle.spec.name}, {"states", bundle.spec.states}}},
      {"selection",
       {{"eta", bundle.eta}, {"characteristics", bundle.selected}}},
      {"network", net_to_json(bundle.net)},
      {"text",
       {{"ngram_max", bundle.ngram_max}, {"temperature", bundle.temperature}}},
      {"decision",
       {{"tau", bundle.tau},
        {"lambda_pi", bundle.lambda_pi},
        {"lambda_np", bundle.lambda_np}}},
      {"provenance",
       {{"catalog_digest", bundle.catalog_digest},
        {"labels_digest", bundle.labels_digest},
        {"specs_digest", bundle.specs_digest},
        {"split",
         {{"train", bundle.split.train},
          {"validation", bundle.split.validation},
          {"test", bundle.split.test},
          {"ratios", bundle.split.ratios},
          {"seed", bundle.split.seed},
          {"ordered", bundle.split.ordered}}}}},
  };
  dump_to_file(path, j);
}

ModelBundle load_bundle(const std::string& path) {
  json j = parse_file(path);
  ModelBundle bundle;
  try {
    bundle.format_version = j.at("format_version").get<int>();
    if (bundle.format_version != 1)
      throw std::runtime_error("unsupported format_version " +
                               std::to_string(bundle.format_version));
    bundle.spec.name = j.at("target").at("name").get<std::string>();
    bundle.spec.states =
        j.at("target").at("states").get<std::vector<std::string>>();
    bundle.spec.validate();
    bundle.eta = j.at("selection").at("eta").get<int>();
    bundle.selected =
        j.at("selection").at("characteristics").get<std::vector<std::string>>();
    bundle.net = net_from_json(j.at("network"));
    bundle.ngram_max = j.at("text").at("ngram_max").get<int>();
    bundle.temperature = j.at("text").at("temperature").get<double>();
    bundle.tau = j.at("decision").at("tau").get<double>();
    bundle.lambda_pi = j.at("decision").at("lambda_pi").get<double>();
    bundle.lambda_np = j.at("decision").at("lambda_np").get<double>();
    const json& prov = j.at("provenance");
    bundle.catalog_digest = prov.at("catalog_digest").get<std::string>();
    bundle.labels_digest = prov.at("labels_digest").get<std::string>();
    bundle.specs_digest = prov.at("specs_digest").get<std::string>();
    const json& split = prov.at("split");
    bundle.split.train = split.at("train").get<std::vector<std::string>>();
    bundle.split.validation =
        split.at("validation").get<std::vector<std::string>>();
    bundle.split.test = split.at("test").get<std::vector<std::string>>();
    auto ratios = split.at("ratios").get<std::vector<double>>();
    if (ratios.size() != 3)
      throw std::runtime_error("split ratios must have three entries");
    for (std::size_t i = 0; i < 3; ++i) bundle.split.ratios[i] = ratios[i];
    bundle.split.seed = split.at("seed").get<std::uint64_t>();
    bundle.split.ordered = split.at("ordered").get<bool>();
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
  return bundle;
}

void save_network(const std::string& path, const TreeBayesNet& net) {
  dump_to_file(path, net_to_json(net));
}

TreeBayesNet load_network(const std::string& path) {
  try {
    return net_from_json(parse_file(path));
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

}  // namespace attrfuse
