#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "agrisk/preprocess.hpp"

namespace agrisk {

using TermId = std::uint32_t;

/// How the max_terms cut ranks surviving terms.
enum class FrequencyRanking { TotalFrequency, DocumentFrequency };

struct VocabularyOptions {
  std::size_t min_df = 15;
  double max_df_ratio = 0.90;
  std::size_t max_terms = 3000;
  FrequencyRanking ranking = FrequencyRanking::TotalFrequency;

  static constexpr std::size_t kUnlimited = std::numeric_limits<std::size_t>::max();
};

/// Dense term index. Id 0 is the highest-ranked term.
class Vocabulary {
 public:
  Vocabulary() = default;
  Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> df);

  std::size_t size() const noexcept { return terms_.size(); }
  bool empty() const noexcept { return terms_.empty(); }
  const std::string& term(TermId id) const { return terms_.at(id); }
  std::size_t df(TermId id) const { return df_.at(id); }
  std::optional<TermId> id(std::string_view term) const;
  bool contains(std::string_view term) const { return id(term).has_value(); }
  const std::vector<std::string>& terms() const noexcept { return terms_; }

  bool operator==(const Vocabulary& other) const {
    return terms_ == other.terms_ && df_ == other.df_;
  }

 private:
  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::unordered_map<std::string, TermId> index_;
};

/// Applies the df filters, then keeps the top max_terms by the chosen
/// ranking (ties lexicographic). Throws EmptyVocabularyError if nothing
/// survives and ArgumentError on an empty corpus.
Vocabulary build_vocabulary(std::span<const std::vector<std::string>> documents,
                            const VocabularyOptions& options = {});
Vocabulary build_vocabulary(std::span<const ProcessedDocument> documents,
                            const VocabularyOptions& options = {});

enum class WeightKind { Counts, Tfidf };

std::string_view to_string(WeightKind kind);

struct TermWeight {
  TermId term = 0;
  double weight = 0.0;
  /// Raw occurrence count; equals `weight` for count rows.
  std::uint32_t count = 0;

  bool operator==(const TermWeight&) const = default;
};

using SparseRow = std::vector<TermWeight>;

struct DocTermMatrix {
  std::vector<SparseRow> rows;
  std::vector<std::string> doc_ids;
  WeightKind kind = WeightKind::Counts;
  std::size_t vocab_size = 0;

  std::size_t n_docs() const noexcept { return rows.size(); }
};

/// (id, count) for in-vocabulary tokens, ids ascending.
SparseRow to_bow(std::span<const std::string> tokens, const Vocabulary& vocab);

DocTermMatrix build_count_matrix(std::span<const ProcessedDocument> documents, const Vocabulary& vocab);
DocTermMatrix build_count_matrix(std::span<const std::vector<std::string>> documents,
                                 const Vocabulary& vocab,
                                 std::vector<std::string> doc_ids = {});

/// Smoothed idf ln((1+D)/(1+df)) + 1 times raw tf, then L2 row normalization.
DocTermMatrix tfidf_transform(const DocTermMatrix& counts);

/// Terms ranked by summed weight across rows; ties lexicographic.
std::vector<std::pair<std::string, double>> top_terms_by_tfidf(const DocTermMatrix& matrix,
                                                               const Vocabulary& vocab, int n);

/// "doc_id \t term \t weight" lines.
void write_triplets(const DocTermMatrix& matrix, const Vocabulary& vocab, std::ostream& out);
/// "id \t term \t df" lines.
void write_vocabulary(const Vocabulary& vocab, std::ostream& out);
Vocabulary read_vocabulary(std::istream& in);

}  // namespace agrisk
