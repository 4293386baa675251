#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "agrisk/corpus.hpp"

namespace agrisk {

/// Rule constants of the valence engine.
struct SentimentRules {
  double booster_increment = 0.293;
  double negation_scalar = -0.74;
  double caps_increment = 0.733;
  double exclamation_increment = 0.292;
  int exclamation_cap = 4;
  /// Booster damping by distance 1, 2, 3 from the scored word.
  std::array<double, 3> booster_damping = {1.0, 0.95, 0.9};
  double but_before = 0.5;
  double but_after = 1.5;
  double normalization_alpha = 15.0;
};

class ValenceLexicon {
 public:
  ValenceLexicon() = default;
  ValenceLexicon(std::unordered_map<std::string, double> valences,
                 std::unordered_map<std::string, double> boosters,
                 std::unordered_set<std::string> negations, SentimentRules rules = {});

  /// "token \t valence [\t ...]" lexicon plus the JSON rule file
  /// ({"constants": {...}, "boosters": {...}, "negations": [...]}).
  static ValenceLexicon load(const std::filesystem::path& lexicon_tsv,
                             const std::filesystem::path& rules_json);
  static ValenceLexicon parse(std::string_view lexicon_tsv, std::string_view rules_json);

  std::optional<double> valence(std::string_view lower) const;
  std::optional<double> booster(std::string_view lower) const;
  bool is_negation(std::string_view lower) const;
  const SentimentRules& rules() const noexcept { return rules_; }
  std::size_t size() const noexcept { return valences_.size(); }

 private:
  std::unordered_map<std::string, double> valences_;
  std::unordered_map<std::string, double> boosters_;
  std::unordered_set<std::string> negations_;
  SentimentRules rules_;
};

struct SentimentScores {
  double pos = 0.0;
  double neg = 0.0;
  double neu = 1.0;
  double compound = 0.0;

  bool operator==(const SentimentScores&) const = default;
};

/// s / sqrt(s^2 + alpha), clipped to [-1, 1].
double normalize_compound(double s, double alpha = 15.0);

/// Whitespace words with surrounding ASCII punctuation stripped, unless
/// stripping would leave two or fewer characters.
std::vector<std::string> sentiment_words(std::string_view text);

/// Per-word adjusted valences before the exclamation rule.
std::vector<double> word_valences(std::string_view sentence, const ValenceLexicon& lexicon);

SentimentScores score_sentence(std::string_view sentence, const ValenceLexicon& lexicon);

enum class DocumentAggregation { Mean, LengthWeighted, MaxMagnitude };

std::string_view to_string(DocumentAggregation aggregation);
DocumentAggregation parse_document_aggregation(std::string_view name);

/// Segments `text` into sentences and combines their scores.
/// Throws ArgumentError when the text has no sentence.
SentimentScores score_text(std::string_view text, const ValenceLexicon& lexicon,
                           DocumentAggregation aggregation = DocumentAggregation::Mean);

SentimentScores score_document(const Document& doc, const ValenceLexicon& lexicon,
                               DocumentAggregation aggregation = DocumentAggregation::Mean);

}  // namespace agrisk
