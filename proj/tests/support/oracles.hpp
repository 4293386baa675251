// Independent reference computations used by unit and acceptance tests.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "agrisk/preprocess.hpp"
#include "agrisk/qa.hpp"
#include "agrisk/topics.hpp"

namespace oracle {

inline std::filesystem::path data_dir() { return AGRISK_SOURCE_DATA_DIR; }
inline std::filesystem::path test_data_dir() { return AGRISK_TEST_DATA_DIR; }

inline agrisk::TextPipeline text_pipeline() {
  return agrisk::TextPipeline::load(data_dir() / "stopwords_en.txt", data_dir() / "lemmas_en.tsv");
}

struct VocabEntry {
  std::string term;
  std::size_t df = 0;
  std::size_t total = 0;
};

/// Counts every term by scanning every document, then filters and ranks.
/// Result is ordered by rank (id order).
inline std::vector<VocabEntry> vocabulary(const std::vector<std::vector<std::string>>& docs, std::size_t min_df,
                                          double max_df_ratio, std::size_t max_terms) {
  std::set<std::string> all;
  for (const auto& d : docs) all.insert(d.begin(), d.end());
  std::vector<VocabEntry> kept;
  for (const auto& term : all) {
    VocabEntry e{term, 0, 0};
    for (const auto& d : docs) {
      const auto c = static_cast<std::size_t>(std::count(d.begin(), d.end(), term));
      e.total += c;
      if (c > 0) ++e.df;
    }
    const double ratio = static_cast<double>(e.df) / static_cast<double>(docs.size());
    if (e.df >= min_df && ratio <= max_df_ratio) kept.push_back(e);
  }
  std::sort(kept.begin(), kept.end(), [](const VocabEntry& a, const VocabEntry& b) {
    if (a.total != b.total) return a.total > b.total;
    return a.term < b.term;
  });
  if (kept.size() > max_terms) kept.resize(max_terms);
  return kept;
}

struct Span {
  std::size_t start = 0;
  std::size_t end = 0;
  double score = 0.0;
};

/// Scores every span from scratch and keeps the first strict maximum in
/// (start, length) order.
inline Span qa_brute_force(const std::string& context, const std::string& question,
                           const agrisk::TextPipeline& pipeline, std::size_t max_len = 30,
                           double penalty = 0.05) {
  std::set<std::string> q;
  const auto& wh = agrisk::interrogatives();
  for (const auto& t : pipeline.terms(question)) {
    if (std::find(wh.begin(), wh.end(), t) == wh.end()) q.insert(t);
  }
  const auto sentences = agrisk::segment_sentences(context);
  std::vector<std::set<std::string>> sentence_terms;
  for (const auto& s : sentences) {
    const auto terms = pipeline.terms(s);
    sentence_terms.emplace_back(terms.begin(), terms.end());
  }
  const double n = static_cast<double>(std::max<std::size_t>(sentences.size(), 1));
  auto idf = [&](const std::string& t) {
    double sf = 0.0;
    for (const auto& st : sentence_terms) sf += st.count(t) ? 1.0 : 0.0;
    return std::log((1.0 + n) / (1.0 + sf)) + 1.0;
  };

  const auto tokens = agrisk::tokenize_with_offsets(context);
  std::vector<std::string> terms;
  for (const auto& t : tokens) terms.push_back(pipeline.term_for(t.text));

  Span best;
  bool have = false;
  for (std::size_t s = 0; s < tokens.size(); ++s) {
    for (std::size_t len = 1; len <= max_len && s + len <= tokens.size(); ++len) {
      std::vector<std::string> counted;
      double sum = 0.0;
      for (std::size_t i = s; i < s + len; ++i) {
        if (terms[i].empty() || !q.count(terms[i])) continue;
        if (std::find(counted.begin(), counted.end(), terms[i]) != counted.end()) continue;
        counted.push_back(terms[i]);
        sum += idf(terms[i]);
      }
      const double score = sum - penalty * static_cast<double>(len);
      if (!have || score > best.score) {
        best = {s, s + len, score};
        have = true;
      }
    }
  }
  return best;
}

struct QAPair {
  std::string context;
  std::string question;
};

/// Contexts are runs of toy-corpus sentences capped at `max_tokens`;
/// questions mix context words, outside words and an interrogative.
inline std::vector<QAPair> random_qa_pairs(std::uint64_t seed, std::size_t n, std::size_t max_tokens = 200) {
  const auto corpus = agrisk::load_corpus(data_dir() / "toy_corpus.csv", agrisk::CorpusFormat::Csv);
  std::vector<std::string> sentences;
  for (const auto& d : corpus) {
    for (auto& s : agrisk::segment_sentences(d.content)) sentences.push_back(std::move(s));
  }
  const std::vector<std::string> outside{"locust", "subsidy", "tractor", "banana", "insurance", "the", "of"};
  const std::vector<std::string> wh{"What", "Who", "Where", "How", "Which"};
  std::mt19937_64 rng(seed);
  auto pick = [&](std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); };

  std::vector<QAPair> out;
  while (out.size() < n) {
    const std::size_t want = 1 + pick(12);
    std::string context;
    std::size_t tokens = 0;
    for (std::size_t i = 0, s = pick(sentences.size()); i < want; ++i, s = (s + 1) % sentences.size()) {
      const auto count = agrisk::tokenize(sentences[s]).size();
      if (tokens + count > max_tokens) break;
      context += (context.empty() ? "" : " ") + sentences[s];
      tokens += count;
    }
    if (tokens == 0) continue;
    const auto words = agrisk::tokenize(context);
    std::string question = wh[pick(wh.size())];
    const std::size_t q_len = 1 + pick(5);
    for (std::size_t i = 0; i < q_len; ++i) {
      question += " " + (pick(4) == 0 ? outside[pick(outside.size())] : words[pick(words.size())]);
    }
    out.push_back({context, question + "?"});
  }
  return out;
}

/// Planted-topic corpus: each topic owns a block of exclusive terms plus a
/// share of a common pool.
struct SyntheticCorpus {
  std::vector<std::vector<std::string>> docs;
  std::vector<std::vector<double>> phi;  // K x V over `terms`
  std::vector<std::string> terms;
};

inline SyntheticCorpus planted_topics(std::uint64_t seed, int k = 3, int n_docs = 200, int exclusive = 45,
                                      int shared = 5, int min_len = 60, int max_len = 100,
                                      double doc_alpha = 0.1) {
  std::mt19937_64 rng(seed);
  SyntheticCorpus out;
  const int v = k * exclusive + shared;
  for (int i = 0; i < v; ++i) out.terms.push_back("w" + std::to_string(1000 + i));
  std::gamma_distribution<double> word_gamma(1.0, 1.0);
  for (int t = 0; t < k; ++t) {
    std::vector<double> row(static_cast<std::size_t>(v), 0.0);
    for (int i = 0; i < exclusive; ++i) row[static_cast<std::size_t>(t * exclusive + i)] = word_gamma(rng);
    for (int i = 0; i < shared; ++i) row[static_cast<std::size_t>(k * exclusive + i)] = word_gamma(rng);
    double total = 0.0;
    for (const auto x : row) total += x;
    for (auto& x : row) x /= total;
    out.phi.push_back(std::move(row));
  }
  std::gamma_distribution<double> doc_gamma(doc_alpha, 1.0);
  std::uniform_int_distribution<int> length(min_len, max_len);
  for (int d = 0; d < n_docs; ++d) {
    std::vector<double> theta(static_cast<std::size_t>(k));
    double total = 0.0;
    for (auto& x : theta) total += (x = doc_gamma(rng) + 1e-12);
    for (auto& x : theta) x /= total;
    std::discrete_distribution<int> pick_topic(theta.begin(), theta.end());
    std::vector<std::string> words;
    const int n = length(rng);
    for (int i = 0; i < n; ++i) {
      const auto& row = out.phi[static_cast<std::size_t>(pick_topic(rng))];
      std::discrete_distribution<int> pick_word(row.begin(), row.end());
      words.push_back(out.terms[static_cast<std::size_t>(pick_word(rng))]);
    }
    out.docs.push_back(std::move(words));
  }
  return out;
}

inline double cosine(const std::vector<double>& a, const std::vector<double>& b) {
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ab += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  return ab / std::sqrt(aa * bb);
}

/// Greedy one-to-one matching of generators to fitted topics by cosine;
/// returns the matched cosine per generator.
inline std::vector<double> greedy_match(const std::vector<std::vector<double>>& truth,
                                        const std::vector<std::vector<double>>& fitted) {
  std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    for (std::size_t j = 0; j < fitted.size(); ++j) pairs.emplace_back(cosine(truth[i], fitted[j]), i, j);
  }
  std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return std::get<0>(a) > std::get<0>(b); });
  std::vector<double> best(truth.size(), -1.0);
  std::vector<bool> used_t(truth.size()), used_f(fitted.size());
  for (const auto& [c, i, j] : pairs) {
    if (used_t[i] || used_f[j]) continue;
    used_t[i] = used_f[j] = true;
    best[i] = c;
  }
  return best;
}

/// UMass coherence by direct document counting over token lists.
inline double umass(const std::vector<std::vector<std::string>>& docs, const std::vector<std::string>& top,
                    double epsilon = 1e-12) {
  double score = 0.0;
  for (std::size_t m = 1; m < top.size(); ++m) {
    for (std::size_t l = 0; l < m; ++l) {
      int dl = 0, dml = 0;
      for (const auto& d : docs) {
        const bool has_l = std::find(d.begin(), d.end(), top[l]) != d.end();
        const bool has_m = std::find(d.begin(), d.end(), top[m]) != d.end();
        dl += has_l;
        dml += has_l && has_m;
      }
      if (dl == 0) continue;
      score += std::log((dml + epsilon) / dl);
    }
  }
  return score;
}

}  // namespace oracle
