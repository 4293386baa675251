#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agrisk/corpus.hpp"
#include "agrisk/preprocess.hpp"
#include "agrisk/scoring.hpp"
#include "agrisk/topics.hpp"
#include "agrisk/vectorize.hpp"

namespace agrisk {

struct QAQuery {
  std::string context;
  std::string question;
};

/// Answer span as token offsets [start, end) into the context under
/// tokenize_with_offsets; `text` is the raw context substring they cover.
struct QAAnswer {
  std::string text;
  std::size_t start = 0;
  std::size_t end = 0;
  double score = 0.0;
  bool low_confidence = false;

  bool operator==(const QAAnswer&) const = default;
};

struct QAOptions {
  std::size_t max_span_len = 30;
  double length_penalty = 0.05;
};

/// Question words dropped before span scoring.
const std::vector<std::string>& interrogatives();

/// Exhaustive lexical span scorer: sum of local idf over distinct question
/// terms in the span minus a per-token penalty. Ties go to the earliest,
/// then shortest span.
QAAnswer answer_baseline(const QAQuery& query, const TextPipeline& pipeline, const QAOptions& options = {});

/// POSTs {"context", "question"} as JSON to `endpoint` (http://host[:port][/path])
/// and validates the returned span against the local tokenization.
QAAnswer answer_remote(const std::string& endpoint, const QAQuery& query, double timeout_seconds = 10.0);

inline constexpr std::string_view kDefaultQuestionTemplate = "What is said about {words}?";

/// Fills {words} with "a, b and c" and {w1}, {w2}, ... with single words.
std::string formulate_question(std::span<const std::string> words,
                               std::string_view question_template = kDefaultQuestionTemplate);

struct EvaluationRequest {
  int topic = 0;
  /// Highest-theta document of the topic's cluster when unset.
  std::optional<std::string> doc_id;
  /// Analyst-supplied question replacing the formulated one.
  std::optional<std::string> question;
  std::string question_template = std::string(kDefaultQuestionTemplate);
  int question_words = 3;
  std::optional<std::string> remote_endpoint;
  double timeout_seconds = 10.0;
  QAOptions qa;
};

struct EvaluationRecord {
  int topic = 0;
  std::string label;
  std::string doc_id;
  double theta = 0.0;
  std::string question;
  QAAnswer answer;
  double ss = 0.0;
  UncertaintyClass cls = UncertaintyClass::NeedsContext;
  /// "baseline", "remote", or "baseline (remote unavailable: ...)".
  std::string scorer;
  std::string analyst_note;
};

EvaluationRecord evaluate_uncertainty(const EvaluationRequest& request, const TopicModel& model,
                                      const Vocabulary& vocab, const Corpus& corpus,
                                      std::span<const TopicScore> report, const TextPipeline& pipeline);

void write_evaluation_json(const EvaluationRecord& record, std::ostream& out);

}  // namespace agrisk
