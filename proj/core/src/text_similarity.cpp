#include "attrfuse/text_similarity.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace attrfuse {

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (unsigned char c : text) {
    bool keep = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') ||
                (c >= 'A' && c <= 'Z') || c >= 0x80;  // keep UTF-8 bytes whole
    if (keep) {
      cur.push_back(c >= 'A' && c <= 'Z' ? static_cast<char>(c - 'A' + 'a')
                                         : static_cast<char>(c));
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

NgramIndex extract_ngrams(const std::vector<std::string>& descriptions,
                          int n_max) {
  if (n_max < 1) throw std::invalid_argument("n_max must be >= 1");
  NgramIndex index;
  index.description_count = static_cast<int>(descriptions.size());
  if (descriptions.empty()) return index;

  std::map<std::string, int> doc_count;
  for (const auto& d : descriptions) {
    std::vector<std::string> tokens = tokenize(d);
    std::set<std::string> in_this;  // an n-gram counts once per description
    for (std::size_t start = 0; start < tokens.size(); ++start) {
      std::string gram;
      for (std::size_t len = 1;
           len <= static_cast<std::size_t>(n_max) && start + len <= tokens.size();
           ++len) {
        if (len > 1) gram.push_back(' ');
        gram += tokens[start + len - 1];
        in_this.insert(gram);
      }
    }
    for (const auto& g : in_this) ++doc_count[g];
  }
  const double r = static_cast<double>(descriptions.size());
  for (const auto& [g, c] : doc_count)
    index.frequency[g] = static_cast<double>(c) / r;
  return index;
}

double jaro_winkler(const std::string& a, const std::string& b) {
  const std::size_t la = a.size(), lb = b.size();
  if (la == 0 && lb == 0) return 1.0;
  if (la == 0 || lb == 0) return 0.0;

  const std::size_t longest = std::max(la, lb);
  const std::size_t window = longest / 2 >= 1 ? longest / 2 - 1 : 0;

  std::vector<bool> a_matched(la, false), b_matched(lb, false);
  std::size_t matches = 0;
  for (std::size_t i = 0; i < la; ++i) {
    std::size_t lo = i > window ? i - window : 0;
    std::size_t hi = std::min(lb, i + window + 1);
    for (std::size_t j = lo; j < hi; ++j) {
      if (b_matched[j] || a[i] != b[j]) continue;
      a_matched[i] = true;
      b_matched[j] = true;
      ++matches;
      break;
    }
  }
  if (matches == 0) return 0.0;

  // Transpositions: matched characters out of order, counted in halves.
  std::size_t half_transposed = 0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < la; ++i) {
    if (!a_matched[i]) continue;
    while (!b_matched[j]) ++j;
    if (a[i] != b[j]) ++half_transposed;
    ++j;
  }
  const double m = static_cast<double>(matches);
  const double t = static_cast<double>(half_transposed / 2);
  double jaro = (m / static_cast<double>(la) + m / static_cast<double>(lb) +
                 (m - t) / m) /
                3.0;

  std::size_t prefix = 0;
  while (prefix < std::min({la, lb, std::size_t{4}}) && a[prefix] == b[prefix])
    ++prefix;
  return jaro + static_cast<double>(prefix) * 0.1 * (1.0 - jaro);
}

std::vector<StateMatch> score_states(const NgramIndex& index,
                                     const GlobalAttributeSpec& spec) {
  if (spec.states.empty())
    throw std::invalid_argument("attribute spec has no states");
  std::vector<StateMatch> matches;
  matches.reserve(spec.states.size());
  for (std::size_t t = 0; t < spec.states.size(); ++t) {
    std::vector<std::string> label_tokens = tokenize(spec.states[t]);
    std::string label;
    for (std::size_t i = 0; i < label_tokens.size(); ++i) {
      if (i) label.push_back(' ');
      label += label_tokens[i];
    }
    StateMatch best;
    best.state = static_cast<int>(t);
    double best_s = -1.0, best_f = 0.0;
    const std::string* best_gram = nullptr;
    // The map iterates n-grams in ascending order, so on full (s, f) ties
    // the lexicographically smallest n-gram is kept.
    for (const auto& [gram, f] : index.frequency) {
      double s = jaro_winkler(label, gram);
      if (s > best_s || (s == best_s && f > best_f)) {
        best_s = s;
        best_f = f;
        best_gram = &gram;
      }
    }
    if (best_gram) {
      best.similarity = best_s;
      best.ngram = *best_gram;
      best.score = best_s * best_f;
    }
    matches.push_back(std::move(best));
  }
  return matches;
}

std::vector<double> softmax_scale(const std::vector<double>& scores,
                                  double temperature) {
  if (temperature <= 0.0)
    throw std::invalid_argument("softmax temperature must be positive");
  if (scores.empty()) return {};
  double top = *std::max_element(scores.begin(), scores.end());
  std::vector<double> out(scores.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp((scores[i] - top) / temperature);
    sum += out[i];
  }
  for (double& v : out) v /= sum;
  return out;
}

std::vector<double> uts_distribution(const std::vector<std::string>& descriptions,
                                     const GlobalAttributeSpec& spec, int n_max,
                                     double temperature) {
  NgramIndex index = extract_ngrams(descriptions, n_max);
  std::vector<StateMatch> matches = score_states(index, spec);
  std::vector<double> scores(matches.size());
  for (const auto& m : matches) scores[static_cast<std::size_t>(m.state)] = m.score;
  return softmax_scale(scores, temperature);
}

}  // namespace attrfuse
