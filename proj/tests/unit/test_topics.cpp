#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <sstream>

#include "agrisk/error.hpp"
#include "agrisk/topics.hpp"
#include "oracles.hpp"

using namespace agrisk;
using Docs = std::vector<std::vector<std::string>>;

namespace {

TopicCounts hand_tables() {
  TopicCounts c;
  c.doc_topic = DenseMatrix(1, 3);
  c.doc_topic(0, 0) = 2;
  c.doc_topic(0, 1) = 1;
  c.topic_term = DenseMatrix(3, 2);
  c.topic_term(0, 0) = 1;
  c.topic_term(0, 1) = 1;
  c.topic_term(1, 1) = 1;
  c.topic_total = {2, 1, 0};
  return c;
}

struct Toy {
  Docs docs;
  Vocabulary vocab;
  DocTermMatrix counts;
  DocTermMatrix tfidf;
};

const Toy& toy() {
  static const Toy t = [] {
    Toy out;
    const auto corpus = load_corpus(oracle::data_dir() / "toy_corpus.csv", CorpusFormat::Csv);
    const auto p = oracle::text_pipeline();
    std::vector<ProcessedDocument> processed;
    for (const auto& d : corpus) processed.push_back(preprocess_document(d, p));
    for (const auto& d : processed) out.docs.push_back(d.tokens);
    VocabularyOptions o;
    o.min_df = 2;
    o.max_terms = 200;
    out.vocab = build_vocabulary(processed, o);
    out.counts = build_count_matrix(processed, out.vocab);
    out.tfidf = tfidf_transform(out.counts);
    return out;
  }();
  return t;
}

LdaOptions quick(int k, std::uint64_t seed) {
  LdaOptions o;
  o.num_topics = k;
  o.iterations = 120;
  o.burn_in = 40;
  o.sample_lag = 5;
  o.seed = seed;
  return o;
}

void check_stochastic(const TopicModel& m) {
  for (const auto* mat : {&m.phi, &m.theta}) {
    for (std::size_t r = 0; r < mat->rows(); ++r) {
      const auto row = mat->row(r);
      CHECK(std::accumulate(row.begin(), row.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(std::all_of(row.begin(), row.end(), [](double x) { return x > 0.0; }));
    }
  }
}

}  // namespace

TEST_CASE("conditional_distribution") {
  SUBCASE("single topic") {
    TopicCounts c;
    c.doc_topic = DenseMatrix(1, 1, 3);
    c.topic_term = DenseMatrix(1, 4, 1);
    c.topic_total = {4};
    CHECK(conditional_distribution(0, 2, c, 0.5, 0.01) == std::vector<double>{1.0});
  }
  SUBCASE("zero counts give a uniform vector") {
    TopicCounts c;
    c.doc_topic = DenseMatrix(1, 4);
    c.topic_term = DenseMatrix(4, 3);
    c.topic_total = {0, 0, 0, 0};
    for (const auto p : conditional_distribution(0, 1, c, 0.5, 0.01)) CHECK(p == doctest::Approx(0.25).epsilon(1e-15));
  }
  SUBCASE("hand-filled three-topic tables") {
    // (2.5*1.1/2.2, 1.5*0.1/1.2, 0.5*0.1/0.2) = (1.25, 0.125, 0.25)
    const auto p = conditional_distribution(0, 0, hand_tables(), 0.5, 0.1);
    REQUIRE(p.size() == 3);
    CHECK(std::abs(p[0] - 10.0 / 13.0) < 1e-12);
    CHECK(std::abs(p[1] - 1.0 / 13.0) < 1e-12);
    CHECK(std::abs(p[2] - 2.0 / 13.0) < 1e-12);
  }
  SUBCASE("boost raises the seeded topic") {
    // topic 1 with boost 0.5 on word 0: 1.5*0.6/1.7
    PriorBoost boost(3);
    boost.set(1, 0, 0.5);
    const auto p = conditional_distribution(0, 0, hand_tables(), 0.5, 0.1, &boost);
    const double w1 = 1.5 * 0.6 / 1.7;
    const double z = 1.25 + w1 + 0.25;
    CHECK(std::abs(p[1] - w1 / z) < 1e-12);
    CHECK(p[1] > 1.0 / 13.0);
  }
}

TEST_CASE("fit_lda produces stochastic matrices") {
  const auto& t = toy();
  for (const auto* m : {&t.counts, &t.tfidf}) {
    const auto model = fit_lda(*m, quick(6, 3));
    CHECK(model.phi.rows() == 6);
    CHECK(model.phi.cols() == t.vocab.size());
    CHECK(model.theta.rows() == t.docs.size());
    CHECK(model.alpha == doctest::Approx(50.0 / 6.0));
    CHECK(model.variant == (m->kind == WeightKind::Tfidf ? ModelVariant::Tfidf : ModelVariant::Plain));
    check_stochastic(model);
  }
}

TEST_CASE("fit_lda is deterministic for a seed") {
  const auto& t = toy();
  const auto a = fit_lda(t.tfidf, quick(6, 9));
  const auto b = fit_lda(t.tfidf, quick(6, 9));
  CHECK(a.phi == b.phi);
  CHECK(a.theta == b.theta);
  const auto c = fit_lda(t.tfidf, quick(6, 10));
  CHECK_FALSE(a.phi == c.phi);
}

TEST_CASE("sweeps conserve counts") {
  const auto& t = toy();
  for (const auto* m : {&t.counts, &t.tfidf}) {
    std::vector<double> doc_total;
    for (const auto& row : m->rows) {
      double n = 0;
      for (const auto& e : row) n += e.count;
      doc_total.push_back(n);
    }
    auto o = quick(4, 5);
    o.iterations = 20;
    o.burn_in = 5;
    int sweeps = 0;
    o.observer = [&](int, const TopicCounts& c) {
      ++sweeps;
      for (std::size_t d = 0; d < c.doc_topic.rows(); ++d) {
        const auto row = c.doc_topic.row(d);
        CHECK(std::accumulate(row.begin(), row.end(), 0.0) == doctest::Approx(doc_total[d]).epsilon(1e-9));
      }
      for (std::size_t k = 0; k < c.topic_term.rows(); ++k) {
        const auto row = c.topic_term.row(k);
        CHECK(std::accumulate(row.begin(), row.end(), 0.0) == doctest::Approx(c.topic_total[k]).epsilon(1e-9));
      }
    };
    fit_lda(*m, o);
    CHECK(sweeps == 20);
  }
}

TEST_CASE("single topic model") {
  const auto& t = toy();
  auto o = quick(1, 1);
  o.beta = 0.01;
  const auto model = fit_lda(t.counts, o);
  for (std::size_t d = 0; d < model.theta.rows(); ++d) CHECK(model.theta(d, 0) == doctest::Approx(1.0).epsilon(1e-12));

  std::vector<double> freq(t.vocab.size(), 0.0);
  double total = 0.0;
  for (const auto& row : t.counts.rows) {
    for (const auto& e : row) {
      freq[e.term] += e.weight;
      total += e.weight;
    }
  }
  const double v = static_cast<double>(t.vocab.size());
  for (std::size_t w = 0; w < freq.size(); ++w) {
    CHECK(model.phi(0, w) == doctest::Approx((freq[w] + 0.01) / (total + v * 0.01)).epsilon(1e-12));
  }
}

TEST_CASE("fit_lda argument errors") {
  DocTermMatrix empty;
  CHECK_THROWS(fit_lda(empty, quick(2, 1)));
  DocTermMatrix tiny;
  tiny.rows = {{{0, 1.0, 1}}};
  tiny.doc_ids = {"d"};
  tiny.vocab_size = 1;
  CHECK_THROWS_AS(fit_lda(tiny, quick(3, 1)), ArgumentError);
  CHECK_THROWS_AS(fit_lda(toy().counts, quick(0, 1)), ArgumentError);
}

TEST_CASE("guided fit degenerates to plain with no boost and uniform init") {
  const auto& t = toy();
  SeedSet seeds;
  seeds.topics.resize(6);
  seeds.topics[0].push_back({t.vocab.term(0), 0, SeedSource::RiskLexicon});
  GuidedOptions g;
  g.boost = 0.0;
  g.seed_confidence = 1.0 / 6.0;
  const auto guided = fit_guided_lda(t.counts, seeds, quick(6, 4), g);
  const auto plain = fit_lda(t.counts, quick(6, 4));
  CHECK(guided.phi == plain.phi);
  CHECK(guided.theta == plain.theta);
  CHECK(guided.variant == ModelVariant::Guided);
}

TEST_CASE("guided fit pulls seeded terms into their topics") {
  const auto synth = oracle::planted_topics(17, 2, 120);
  VocabularyOptions vo;
  vo.min_df = 1;
  vo.max_df_ratio = 1.0;
  vo.max_terms = VocabularyOptions::kUnlimited;
  const auto vocab = build_vocabulary(synth.docs, vo);
  const auto counts = build_count_matrix(synth.docs, vocab);

  SeedSet seeds;
  seeds.topics.resize(2);
  // Seed topic 0 with generator 1's strongest terms and vice versa.
  std::vector<std::vector<std::string>> seeded(2);
  for (int gen = 0; gen < 2; ++gen) {
    std::vector<std::size_t> order(synth.terms.size());
    std::iota(order.begin(), order.end(), 0);
    const auto& row = synth.phi[static_cast<std::size_t>(gen)];
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return row[a] > row[b]; });
    const int topic = 1 - gen;
    for (int i = 0; i < 3; ++i) {
      const auto& term = synth.terms[order[static_cast<std::size_t>(i)]];
      seeds.topics[static_cast<std::size_t>(topic)].push_back({term, *vocab.id(term), SeedSource::RiskLexicon});
      seeded[static_cast<std::size_t>(topic)].push_back(term);
    }
  }
  auto o = quick(2, 21);
  o.iterations = 200;
  const auto model = fit_guided_lda(counts, seeds, o, {});
  check_stochastic(model);
  for (std::size_t k = 0; k < 2; ++k) {
    std::set<std::string> top;
    for (const auto& [term, p] : top_words(model, vocab, static_cast<int>(k), 10)) top.insert(term);
    for (const auto& term : seeded[k]) CHECK_MESSAGE(top.count(term), term);
  }
  CHECK(model.beta_boost.at(0, seeds.topics[0][0].id) == 0.5);

  SeedSet bad;
  bad.topics.resize(3);
  bad.topics[2].push_back({vocab.term(0), 0, SeedSource::RiskLexicon});
  CHECK_THROWS_AS(fit_guided_lda(counts, bad, o, {}), ArgumentError);
}

TEST_CASE("top_words") {
  const auto& t = toy();
  const auto model = fit_lda(t.tfidf, quick(6, 2));
  const auto all = top_words(model, t.vocab, 0, static_cast<int>(t.vocab.size()));
  std::vector<std::string> terms;
  for (const auto& [term, p] : all) terms.push_back(term);
  std::sort(terms.begin(), terms.end());
  auto expected = t.vocab.terms();
  std::sort(expected.begin(), expected.end());
  CHECK(terms == expected);
  for (std::size_t i = 1; i < all.size(); ++i) {
    CHECK((all[i - 1].second > all[i].second ||
           (all[i - 1].second == all[i].second && all[i - 1].first < all[i].first)));
  }
  CHECK_THROWS_AS(top_words(model, t.vocab, 6, 10), ArgumentError);
  CHECK_THROWS_AS(top_words(model, t.vocab, -1, 10), ArgumentError);
}

TEST_CASE("dominant_topic") {
  const std::vector<double> doc0{0.023, 0.879, 0.023, 0.023, 0.023, 0.024};
  CHECK(dominant_topic(doc0) == std::pair<int, double>{1, 0.879});
  const std::vector<double> doc4{0.523, 0.019, 0.020, 0.019, 0.019, 0.396};
  CHECK(dominant_topic(doc4) == std::pair<int, double>{0, 0.523});
  const std::vector<double> uniform(4, 0.25);
  CHECK(dominant_topic(uniform) == std::pair<int, double>{0, 0.25});
}

TEST_CASE("umass coherence") {
  SUBCASE("matches direct counting on a fitted toy model") {
    const auto& t = toy();
    const auto model = fit_lda(t.tfidf, quick(6, 8));
    const auto scores = umass_coherence(model, t.vocab, t.counts, 10);
    REQUIRE(scores.size() == 6);
    for (int k = 0; k < 6; ++k) {
      std::vector<std::string> top;
      for (const auto& [term, p] : top_words(model, t.vocab, k, 10)) top.push_back(term);
      CHECK(scores[static_cast<std::size_t>(k)] == doctest::Approx(oracle::umass(t.docs, top)).epsilon(1e-12));
    }
  }
  SUBCASE("co-occurring and disjoint top words") {
    const Docs docs{{"aa", "bb", "cc"}, {"aa", "bb", "cc"}, {"dd"}, {"ee"}};
    VocabularyOptions vo;
    vo.min_df = 1;
    vo.max_df_ratio = 1.0;
    const auto vocab = build_vocabulary(docs, vo);
    const auto counts = build_count_matrix(docs, vocab);
    TopicModel m;
    m.num_topics = 2;
    m.phi = DenseMatrix(2, vocab.size(), 0.01);
    m.phi(0, *vocab.id("aa")) = 0.5;
    m.phi(0, *vocab.id("bb")) = 0.4;
    m.phi(0, *vocab.id("cc")) = 0.3;
    m.phi(1, *vocab.id("dd")) = 0.5;
    m.phi(1, *vocab.id("ee")) = 0.4;
    m.phi(1, *vocab.id("aa")) = 0.3;
    const auto s = umass_coherence(m, vocab, counts, 3);
    CHECK(std::abs(s[0]) < 1e-9);
    CHECK(s[1] < -20.0);
  }
}

TEST_CASE("build_seed_set") {
  const auto& t = toy();
  const auto lexicon = RiskLexicon::load(oracle::data_dir() / "risk_lexicon.json");
  const std::vector<std::string> headline{"drought", "seed", "notaword"};

  CHECK_THROWS_AS(build_seed_set(headline, lexicon, 6, {}, t.vocab), ArgumentError);

  SUBCASE("category hint maps in-vocabulary terms") {
    const TopicHints hints{{"production", 0}};
    const auto seeds = build_seed_set({}, lexicon, 6, hints, t.vocab);
    REQUIRE(seeds.topics.size() == 6);
    std::set<std::string> expected;
    for (const auto& [name, terms] : lexicon.categories) {
      if (name != "production") continue;
      for (const auto& term : terms) {
        if (t.vocab.contains(term)) expected.insert(term);
      }
    }
    std::set<std::string> got;
    for (const auto& s : seeds.topics[0]) {
      got.insert(s.term);
      CHECK(t.vocab.id(s.term) == s.id);
      CHECK(s.source == SeedSource::RiskLexicon);
    }
    CHECK(got == expected);
    for (std::size_t k = 1; k < 6; ++k) CHECK(seeds.topics[k].empty());
    CHECK_FALSE(seeds.warnings.empty());
  }

  SUBCASE("headline terms use the headline slot and drop unknown words") {
    const TopicHints hints{{"headline", 5}};
    const auto seeds = build_seed_set(headline, lexicon, 6, hints, t.vocab);
    CHECK(std::any_of(seeds.topics[5].begin(), seeds.topics[5].end(),
                      [](const SeedTerm& s) { return s.term == "seed" && s.source == SeedSource::HeadlineTfidf; }));
    CHECK(std::any_of(seeds.warnings.begin(), seeds.warnings.end(),
                      [](const std::string& w) { return w.find("notaword") != std::string::npos; }));
  }

  SUBCASE("hint out of range") {
    CHECK_THROWS_AS(build_seed_set(headline, lexicon, 6, {{"production", 6}}, t.vocab), ArgumentError);
  }
}

TEST_CASE("model json round-trip") {
  const auto& t = toy();
  auto model = fit_lda(t.tfidf, quick(6, 12));
  model.labels = {"Weather conditions"};
  std::ostringstream out;
  write_model_json(model, out);
  std::istringstream in(out.str());
  const auto back = read_model_json(in);
  CHECK(back.num_topics == 6);
  CHECK(back.variant == ModelVariant::Tfidf);
  CHECK(back.label(0) == "Weather conditions");
  CHECK(back.doc_ids == model.doc_ids);
  for (std::size_t d = 0; d < model.theta.rows(); ++d) {
    for (std::size_t k = 0; k < 6; ++k) CHECK(back.theta(d, k) == doctest::Approx(model.theta(d, k)).epsilon(1e-8));
  }
  std::ostringstream again;
  write_model_json(back, again);
  CHECK(again.str() == out.str());
}
