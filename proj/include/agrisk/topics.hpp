#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "agrisk/vectorize.hpp"

namespace agrisk {

/// Row-major dense matrix of doubles.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  const std::vector<double>& data() const noexcept { return data_; }

  DenseMatrix& operator+=(const DenseMatrix& other);

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class ModelVariant { Plain, Tfidf, Guided };

std::string_view to_string(ModelVariant variant);
ModelVariant parse_model_variant(std::string_view name);

/// Sparse K x V additive prior on the topic-term Dirichlet.
class PriorBoost {
 public:
  PriorBoost() = default;
  explicit PriorBoost(std::size_t num_topics) : rows_(num_topics), totals_(num_topics, 0.0) {}

  void set(std::size_t topic, TermId term, double value);
  double at(std::size_t topic, TermId term) const;
  /// Sum of the boosts of one topic.
  double total(std::size_t topic) const { return topic < totals_.size() ? totals_[topic] : 0.0; }
  std::size_t num_topics() const noexcept { return rows_.size(); }
  const std::map<TermId, double>& row(std::size_t topic) const { return rows_.at(topic); }
  bool empty() const;

  bool operator==(const PriorBoost&) const = default;

 private:
  std::vector<std::map<TermId, double>> rows_;
  std::vector<double> totals_;
};

struct TopicModel {
  DenseMatrix phi;    // K x V topic-term distribution
  DenseMatrix theta;  // D x K document-topic distribution
  int num_topics = 0;
  double alpha = 0.0;
  double beta = 0.0;
  PriorBoost beta_boost;
  ModelVariant variant = ModelVariant::Plain;
  WeightKind weighting = WeightKind::Counts;
  std::uint64_t rng_seed = 0;
  int iterations = 0;
  int burn_in = 0;
  int sample_lag = 0;
  /// Analyst-provided topic names; may be shorter than num_topics.
  std::vector<std::string> labels;
  std::vector<std::string> doc_ids;
  std::string vocabulary_hash;

  std::string label(int topic) const;
};

/// Sufficient statistics of the collapsed sampler.
struct TopicCounts {
  DenseMatrix doc_topic;   // D x K
  DenseMatrix topic_term;  // K x V
  std::vector<double> topic_total;
};

using SweepObserver = std::function<void(int sweep, const TopicCounts& counts)>;

struct LdaOptions {
  int num_topics = 6;
  /// Symmetric document-topic prior; defaults to 50 / K.
  std::optional<double> alpha;
  double beta = 0.01;
  int iterations = 1000;
  int burn_in = 200;
  /// Post-burn-in sweeps between averaged samples.
  int sample_lag = 10;
  std::uint64_t seed = 1;
  /// Called after every sweep; used by tests to check count conservation.
  SweepObserver observer;

  double resolved_alpha() const { return alpha.value_or(50.0 / num_topics); }
};

struct GuidedOptions {
  double boost = 0.5;
  /// Probability that a seed-term token starts in its seeded topic.
  double seed_confidence = 0.9;
  bool biased_init = true;
  bool prior_boost = true;
};

enum class SeedSource { HeadlineTfidf, RiskLexicon };

std::string_view to_string(SeedSource source);

struct SeedTerm {
  std::string term;
  TermId id = 0;
  SeedSource source = SeedSource::RiskLexicon;

  bool operator==(const SeedTerm&) const = default;
};

struct SeedSet {
  /// Seed terms per topic index, sorted by term.
  std::vector<std::vector<SeedTerm>> topics;
  /// Dropped seeds and unmapped headline terms.
  std::vector<std::string> warnings;

  std::size_t size() const;
  bool empty() const { return size() == 0; }
};

/// Named term lists transcribed from agricultural risk taxonomies.
struct RiskLexicon {
  std::vector<std::pair<std::string, std::vector<std::string>>> categories;

  static RiskLexicon load(const std::filesystem::path& path);
  static RiskLexicon parse(std::string_view json_text);
};

/// Category name or literal term -> topic index. The key "headline" is the
/// fallback slot for headline terms outside every hinted category.
using TopicHints = std::map<std::string, int, std::less<>>;

TopicHints load_topic_hints(const std::filesystem::path& path);
TopicHints parse_topic_hints(std::string_view json_text);

/// Normalized collapsed-Gibbs conditional for one token of `word` in `doc`.
/// `counts` must exclude the token being resampled.
std::vector<double> conditional_distribution(std::size_t doc, TermId word, const TopicCounts& counts,
                                             double alpha, double beta,
                                             const PriorBoost* boost = nullptr);

/// Collapsed Gibbs LDA. Count matrices give unit token weights; tf-idf
/// matrices give real weights rescaled so each document totals its token count.
TopicModel fit_lda(const DocTermMatrix& matrix, const LdaOptions& options = {});

TopicModel fit_guided_lda(const DocTermMatrix& matrix, const SeedSet& seeds,
                          const LdaOptions& options = {}, const GuidedOptions& guided = {});

/// n highest-phi terms of `topic`, ties lexicographic.
std::vector<std::pair<std::string, double>> top_words(const TopicModel& model, const Vocabulary& vocab,
                                                      int topic, int n = 10);
std::vector<TermId> top_word_ids(const TopicModel& model, const Vocabulary& vocab, int topic, int n);

/// Argmax with lowest-index tie-break.
std::pair<int, double> dominant_topic(std::span<const double> theta_row);

/// UMass coherence per topic: sum over ordered top-word pairs of
/// log((D(w_m, w_l) + epsilon) / D(w_l)).
std::vector<double> umass_coherence(const TopicModel& model, const Vocabulary& vocab,
                                    const DocTermMatrix& matrix, int n = 10, double epsilon = 1e-12);

/// Unions headline terms and lexicon terms into topic slots via `hints`.
/// Out-of-vocabulary seeds become warnings; an empty result throws.
SeedSet build_seed_set(std::span<const std::string> headline_terms, const RiskLexicon& lexicon,
                       int num_topics, const TopicHints& hints, const Vocabulary& vocab);

void write_model_json(const TopicModel& model, std::ostream& out);
TopicModel read_model_json(std::istream& in);
void write_seed_set_json(const SeedSet& seeds, std::ostream& out);

}  // namespace agrisk
