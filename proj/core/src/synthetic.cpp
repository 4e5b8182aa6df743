#include "attrfuse/synthetic.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>

#include "attrfuse/util.hpp"

namespace attrfuse {

namespace {

// Distinct word stock for target-state labels; chosen to have low pairwise
// string similarity so the text model has a fair signal to find.
const char* kLabelWords[] = {
    "amber",  "basil",  "cedar",   "delta",  "ember",  "fjord", "garnet",
    "hazel",  "indigo", "juniper", "kelp",   "lotus",  "maple", "nectar",
    "onyx",   "pearl",  "quartz",  "raven",  "sable",  "topaz", "umber",
    "violet", "walnut", "xenon",   "yarrow", "zephyr"};
constexpr int kLabelWordCount = 26;

// Filler vocabulary for descriptions; disjoint from the label words.
const char* kFillerWords[] = {"pack",   "bottle", "glass", "fresh", "classic",
                              "value",  "twin",   "jumbo", "mini",  "extra",
                              "lite",   "family", "plus",  "gold",  "super",
                              "choice", "daily",  "crisp", "pure",  "slim"};
constexpr int kFillerWordCount = 20;

std::string state_label(int index) {
  if (index < kLabelWordCount) return kLabelWords[index];
  // Past the single words, distinct two-word combinations.
  int rest = index - kLabelWordCount;
  int first = rest / (kLabelWordCount - 1);
  int second = rest % (kLabelWordCount - 1);
  if (second >= first) ++second;  // skip the repeated-word diagonal
  if (first >= kLabelWordCount)
    throw std::invalid_argument("too many target states for the label stock");
  return std::string(kLabelWords[first]) + " " + kLabelWords[second];
}

int draw_categorical(Rng& rng, const double* probs, int m) {
  double u = rng.next_unit();
  double acc = 0.0;
  for (int t = 0; t < m; ++t) {
    acc += probs[t];
    if (u < acc) return t;
  }
  return m - 1;  // guard against accumulated rounding
}

std::string filler_token(Rng& rng) {
  if (rng.next_index(4) == 0) {
    // Occasional size-style token.
    static const char* units[] = {"ml", "g", "pk", "oz"};
    return std::to_string(100 + rng.next_index(900)) +
           units[rng.next_index(4)];
  }
  return kFillerWords[rng.next_index(kFillerWordCount)];
}

}  // namespace

SyntheticData generate_synthetic(const SyntheticConfig& config) {
  if (config.node_count < 2)
    throw std::invalid_argument("node_count must be >= 2");
  if (config.states_per_node < 2)
    throw std::invalid_argument("states_per_node must be >= 2");
  if (config.sample_count < 1)
    throw std::invalid_argument("sample_count must be >= 1");
  if (config.description_noise < 0.0 || config.description_noise > 1.0)
    throw std::invalid_argument("description_noise must lie in [0, 1]");
  if (config.local_missing_rate < 0.0 || config.local_missing_rate > 1.0)
    throw std::invalid_argument("local_missing_rate must lie in [0, 1]");

  Rng rng(config.seed);
  const int n = config.node_count;
  const int m = config.states_per_node;

  SyntheticData data;
  data.spec.name = "category";
  for (int t = 0; t < m; ++t) data.spec.states.push_back(state_label(t));
  data.spec.validate();

  // Node 0 is the target; every other node attaches to a random earlier
  // node, so index order is already topological.
  TreeBayesNet& truth = data.truth;
  truth.alpha = 0.0;
  truth.root = 0;
  truth.nodes.resize(static_cast<std::size_t>(n));
  truth.nodes[0].name = data.spec.name;
  truth.nodes[0].parent = -1;
  truth.nodes[0].states = data.spec.states;
  for (int i = 1; i < n; ++i) {
    truth.nodes[static_cast<std::size_t>(i)].name =
        "local_" + std::to_string(i);
    truth.nodes[static_cast<std::size_t>(i)].parent =
        static_cast<int>(rng.next_index(static_cast<std::size_t>(i)));
    for (int t = 0; t < m; ++t)
      truth.nodes[static_cast<std::size_t>(i)].states.push_back(
          "v" + std::to_string(t));
  }

  // Root prior: mildly uneven, every state well represented.
  {
    std::vector<double> w(static_cast<std::size_t>(m));
    double sum = 0.0;
    for (double& v : w) {
      v = 0.5 + rng.next_unit();
      sum += v;
    }
    truth.nodes[0].cpt.resize(static_cast<std::size_t>(m));
    for (int t = 0; t < m; ++t)
      truth.nodes[0].cpt[static_cast<std::size_t>(t)] =
          w[static_cast<std::size_t>(t)] / sum;
  }
  // Child rows concentrate on a permuted image of the parent state, which
  // keeps every true edge strongly informative.
  for (int i = 1; i < n; ++i) {
    TbnNode& node = truth.nodes[static_cast<std::size_t>(i)];
    std::vector<int> perm(static_cast<std::size_t>(m));
    for (int t = 0; t < m; ++t) perm[static_cast<std::size_t>(t)] = t;
    rng.shuffle(perm);
    node.cpt.resize(static_cast<std::size_t>(m) * static_cast<std::size_t>(m));
    for (int s = 0; s < m; ++s) {
      std::vector<double> w(static_cast<std::size_t>(m));
      double sum = 0.0;
      for (int t = 0; t < m; ++t) {
        bool favored = (t == perm[static_cast<std::size_t>(s)]);
        w[static_cast<std::size_t>(t)] = favored
                                             ? 2.5 + 1.5 * rng.next_unit()
                                             : 0.25 + 0.75 * rng.next_unit();
        sum += w[static_cast<std::size_t>(t)];
      }
      for (int t = 0; t < m; ++t)
        node.cpt[static_cast<std::size_t>(s) * static_cast<std::size_t>(m) +
                 static_cast<std::size_t>(t)] =
            w[static_cast<std::size_t>(t)] / sum;
    }
  }
  truth.validate();

  data.catalog.schema.clear();
  for (int i = 1; i < n; ++i)
    data.catalog.schema.push_back(truth.nodes[static_cast<std::size_t>(i)].name);
  data.labels.attribute = data.spec.name;

  std::vector<int> record_state(static_cast<std::size_t>(config.sample_count));
  std::vector<int> node_state(static_cast<std::size_t>(n));
  for (int rec_idx = 0; rec_idx < config.sample_count; ++rec_idx) {
    // Ancestral sampling along the index order.
    node_state[0] = draw_categorical(rng, truth.nodes[0].cpt.data(), m);
    for (int i = 1; i < n; ++i) {
      const TbnNode& node = truth.nodes[static_cast<std::size_t>(i)];
      int ps = node_state[static_cast<std::size_t>(node.parent)];
      node_state[static_cast<std::size_t>(i)] = draw_categorical(
          rng, node.cpt.data() + static_cast<std::size_t>(ps) * static_cast<std::size_t>(m), m);
    }

    char idbuf[16];
    std::snprintf(idbuf, sizeof idbuf, "r%06d", rec_idx);
    ProductRecord rec;
    rec.id = idbuf;
    rec.locals.resize(static_cast<std::size_t>(n - 1));
    for (int i = 1; i < n; ++i) {
      if (config.local_missing_rate > 0.0 &&
          rng.next_unit() < config.local_missing_rate)
        continue;  // masked missing
      rec.locals[static_cast<std::size_t>(i - 1)] =
          truth.nodes[static_cast<std::size_t>(i)]
              .states[static_cast<std::size_t>(
                  node_state[static_cast<std::size_t>(i)])];
    }

    const std::string& label = data.spec.states[static_cast<std::size_t>(node_state[0])];
    bool embed = rng.next_unit() >= config.description_noise;
    std::size_t desc_count = 1 + rng.next_index(3);
    for (std::size_t d = 0; d < desc_count; ++d) {
      std::string text;
      std::size_t lead = rng.next_index(3);
      for (std::size_t k = 0; k < lead; ++k) {
        if (!text.empty()) text.push_back(' ');
        text += filler_token(rng);
      }
      if (embed) {
        if (!text.empty()) text.push_back(' ');
        text += label;
      }
      std::size_t tail = 1 + rng.next_index(3);
      for (std::size_t k = 0; k < tail; ++k) {
        if (!text.empty()) text.push_back(' ');
        text += filler_token(rng);
      }
      rec.descriptions.push_back(std::move(text));
    }

    record_state[static_cast<std::size_t>(rec_idx)] = node_state[0];
    data.labels.labels[rec.id] = label;
    data.catalog.records.push_back(std::move(rec));
  }

  if (config.sort_by_state) {
    // Group records by true state, stable within each group. Simulates
    // catalogs whose leading rows cover only a few target states.
    std::vector<std::size_t> order(data.catalog.records.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) {
                       return record_state[a] < record_state[b];
                     });
    std::vector<ProductRecord> sorted;
    sorted.reserve(order.size());
    for (std::size_t i : order)
      sorted.push_back(std::move(data.catalog.records[i]));
    data.catalog.records = std::move(sorted);
  }

  data.catalog.rebuild_index();
  return data;
}

}  // namespace attrfuse
