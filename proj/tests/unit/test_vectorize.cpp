#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "agrisk/error.hpp"
#include "agrisk/vectorize.hpp"
#include "oracles.hpp"

using namespace agrisk;
using Docs = std::vector<std::vector<std::string>>;

namespace {

VocabularyOptions options(std::size_t min_df, double ratio, std::size_t max_terms) {
  VocabularyOptions o;
  o.min_df = min_df;
  o.max_df_ratio = ratio;
  o.max_terms = max_terms;
  return o;
}

Docs toy_token_lists() {
  const auto corpus = load_corpus(oracle::data_dir() / "toy_corpus.csv", CorpusFormat::Csv);
  const auto p = oracle::text_pipeline();
  Docs docs;
  for (const auto& d : corpus) docs.push_back(preprocess_document(d, p).tokens);
  return docs;
}

double weight_of(const SparseRow& row, TermId id) {
  for (const auto& e : row) {
    if (e.term == id) return e.weight;
  }
  return 0.0;
}

}  // namespace

TEST_CASE("vocabulary matches brute force on the toy corpus") {
  const auto docs = toy_token_lists();
  for (const auto& [min_df, ratio, max_terms] :
       std::vector<std::tuple<std::size_t, double, std::size_t>>{{2, 0.9, 50}, {1, 1.0, 10000}, {3, 0.5, 20}}) {
    const auto vocab = build_vocabulary(docs, options(min_df, ratio, max_terms));
    const auto expected = oracle::vocabulary(docs, min_df, ratio, max_terms);
    REQUIRE(vocab.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
      CHECK(vocab.term(i) == expected[i].term);
      CHECK(vocab.df(i) == expected[i].df);
    }
  }
}

TEST_CASE("unfiltered vocabulary holds every distinct token") {
  const Docs docs{{"a1", "b1"}, {"b1", "c1", "c1"}};
  const auto vocab = build_vocabulary(docs, options(1, 1.0, VocabularyOptions::kUnlimited));
  CHECK(vocab.terms() == std::vector<std::string>{"b1", "c1", "a1"});
}

TEST_CASE("a term in every document is dropped at ratio 0.9") {
  const Docs docs{{"all", "x1"}, {"all", "x1"}, {"all", "y1"}};
  const auto vocab = build_vocabulary(docs, options(1, 0.9, 100));
  CHECK_FALSE(vocab.contains("all"));
  CHECK(vocab.contains("x1"));
}

TEST_CASE("vocabulary errors") {
  CHECK_THROWS_AS(build_vocabulary(Docs{}, options(1, 1.0, 10)), ArgumentError);
  CHECK_THROWS_AS(build_vocabulary(Docs{{"a1"}, {"b1"}}, options(5, 1.0, 10)), EmptyVocabularyError);
}

TEST_CASE("document frequency ranking switch") {
  const Docs docs{{"x1", "x1", "x1", "x1"}, {"y1"}, {"y1"}};
  auto o = options(1, 1.0, 1);
  CHECK(build_vocabulary(docs, o).terms() == std::vector<std::string>{"x1"});
  o.ranking = FrequencyRanking::DocumentFrequency;
  CHECK(build_vocabulary(docs, o).terms() == std::vector<std::string>{"y1"});
}

TEST_CASE("vocabulary is invariant under document permutation") {
  auto docs = toy_token_lists();
  const auto base = build_vocabulary(docs, options(2, 0.9, 50));
  std::mt19937_64 rng(11);
  for (int i = 0; i < 5; ++i) {
    std::shuffle(docs.begin(), docs.end(), rng);
    CHECK(build_vocabulary(docs, options(2, 0.9, 50)) == base);
  }
}

TEST_CASE("to_bow") {
  const Docs docs{{"flood", "pest"}, {"pest"}};
  const auto vocab = build_vocabulary(docs, options(1, 1.0, 10));
  const std::vector<std::string> tokens{"flood", "flood", "pest"};
  const auto row = to_bow(tokens, vocab);
  REQUIRE(row.size() == 2);
  const auto flood = *vocab.id("flood");
  const auto pest = *vocab.id("pest");
  CHECK(row == SparseRow{{std::min(flood, pest), flood < pest ? 2.0 : 1.0, flood < pest ? 2u : 1u},
                         {std::max(flood, pest), flood < pest ? 1.0 : 2.0, flood < pest ? 1u : 2u}});
  CHECK(to_bow(std::vector<std::string>{"zzz", "qqq"}, vocab).empty());
}

TEST_CASE("bow row sums equal in-vocabulary token counts") {
  const auto docs = toy_token_lists();
  const auto vocab = build_vocabulary(docs, options(2, 0.9, 50));
  const auto m = build_count_matrix(docs, vocab);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    double sum = 0.0;
    for (const auto& e : m.rows[d]) {
      CHECK(e.weight == std::floor(e.weight));
      CHECK(e.weight > 0.0);
      sum += e.weight;
    }
    const auto in_vocab = std::count_if(docs[d].begin(), docs[d].end(), [&](const auto& t) { return vocab.contains(t); });
    CHECK(sum == static_cast<double>(in_vocab));
  }
}

TEST_CASE("tfidf three-document golden") {
  const Docs docs{{"flood", "flood", "pest"}, {"pest", "rain"}, {"pest", "drought"}};
  const auto vocab = build_vocabulary(docs, options(1, 1.0, 10));
  CHECK(vocab.terms() == std::vector<std::string>{"pest", "flood", "drought", "rain"});
  const auto t = tfidf_transform(build_count_matrix(docs, vocab));
  CHECK(t.kind == WeightKind::Tfidf);
  auto w = [&](std::size_t d, const char* term) { return weight_of(t.rows[d], *vocab.id(term)); };
  CHECK(w(0, "flood") == doctest::Approx(0.959056).epsilon(1e-6));
  CHECK(w(0, "pest") == doctest::Approx(0.283217).epsilon(1e-6));
  CHECK(w(1, "pest") == doctest::Approx(0.508542).epsilon(1e-6));
  CHECK(w(1, "rain") == doctest::Approx(0.861037).epsilon(1e-6));
  CHECK(w(2, "drought") == doctest::Approx(0.861037).epsilon(1e-6));
  CHECK(w(2, "pest") == doctest::Approx(0.508542).epsilon(1e-6));
}

TEST_CASE("tfidf properties") {
  SUBCASE("single document is the normalized count row") {
    const Docs docs{{"aa", "aa", "bb"}};
    const auto vocab = build_vocabulary(docs, options(1, 1.0, 10));
    const auto t = tfidf_transform(build_count_matrix(docs, vocab));
    CHECK(weight_of(t.rows[0], *vocab.id("aa")) == doctest::Approx(2.0 / std::sqrt(5.0)));
    CHECK(weight_of(t.rows[0], *vocab.id("bb")) == doctest::Approx(1.0 / std::sqrt(5.0)));
  }

  SUBCASE("unit norm and preserved sparsity on the toy corpus") {
    const auto docs = toy_token_lists();
    const auto vocab = build_vocabulary(docs, options(2, 0.9, 50));
    const auto counts = build_count_matrix(docs, vocab);
    const auto t = tfidf_transform(counts);
    for (std::size_t d = 0; d < counts.rows.size(); ++d) {
      REQUIRE(t.rows[d].size() == counts.rows[d].size());
      double norm = 0.0;
      for (std::size_t i = 0; i < t.rows[d].size(); ++i) {
        CHECK(t.rows[d][i].term == counts.rows[d][i].term);
        CHECK(t.rows[d][i].count == counts.rows[d][i].count);
        norm += t.rows[d][i].weight * t.rows[d][i].weight;
      }
      if (!t.rows[d].empty()) CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-9));
    }
  }

  SUBCASE("common terms weigh less than rare ones") {
    const Docs docs{{"common", "rare"}, {"common", "other"}, {"common", "other"}};
    const auto vocab = build_vocabulary(docs, options(1, 1.0, 10));
    const auto t = tfidf_transform(build_count_matrix(docs, vocab));
    CHECK(weight_of(t.rows[0], *vocab.id("common")) < weight_of(t.rows[0], *vocab.id("rare")));
  }
}

TEST_CASE("top_terms_by_tfidf") {
  const auto docs = toy_token_lists();
  const auto vocab = build_vocabulary(docs, options(2, 0.9, 50));
  const auto t = tfidf_transform(build_count_matrix(docs, vocab));

  std::map<std::string, double> sums;
  for (const auto& row : t.rows) {
    for (const auto& e : row) sums[vocab.term(e.term)] += e.weight;
  }
  std::vector<std::pair<std::string, double>> expected(sums.begin(), sums.end());
  std::stable_sort(expected.begin(), expected.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

  const auto top = top_terms_by_tfidf(t, vocab, 10);
  REQUIRE(top.size() == 10);
  for (std::size_t i = 0; i < top.size(); ++i) {
    CHECK(top[i].first == expected[i].first);
    CHECK(top[i].second == doctest::Approx(expected[i].second).epsilon(1e-12));
  }
  CHECK(top_terms_by_tfidf(t, vocab, static_cast<int>(vocab.size())).size() == vocab.size());
  CHECK_THROWS_AS(top_terms_by_tfidf(t, vocab, 0), ArgumentError);
}

TEST_CASE("vocabulary and triplet files round-trip") {
  const auto docs = toy_token_lists();
  const auto vocab = build_vocabulary(docs, options(2, 0.9, 50));
  std::ostringstream out;
  write_vocabulary(vocab, out);
  std::istringstream in(out.str());
  CHECK(read_vocabulary(in) == vocab);
}
