#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "agrisk/corpus.hpp"
#include "agrisk/preprocess.hpp"
#include "agrisk/qa.hpp"
#include "agrisk/scoring.hpp"
#include "agrisk/sentiment.hpp"
#include "agrisk/topics.hpp"
#include "agrisk/vectorize.hpp"

namespace agrisk {

enum class Stage { Ingest, Preprocess, Vectorize, Fit, Sentiment, Scoring };

std::string_view to_string(Stage stage);
Stage parse_stage(std::string_view name);
const std::array<Stage, 6>& all_stages();

/// Process exit codes of the command-line tool.
namespace exit_code {
inline constexpr int kOk = 0;
inline constexpr int kUsage = 2;
inline constexpr int kConfig = 3;
inline constexpr int kLock = 4;
inline constexpr int kIngest = 10;
inline constexpr int kPreprocess = 11;
inline constexpr int kVectorize = 12;
inline constexpr int kFit = 13;
inline constexpr int kSentiment = 14;
inline constexpr int kScoring = 15;
inline constexpr int kQa = 16;
inline constexpr int kServe = 17;
inline constexpr int kExport = 18;
}  // namespace exit_code

int exit_code_for(Stage stage);

/// File names of the run directory.
namespace artifact {
inline constexpr std::string_view kCorpus = "corpus.jsonl";
inline constexpr std::string_view kProcessed = "processed.jsonl";
inline constexpr std::string_view kVocabulary = "vocabulary.tsv";
inline constexpr std::string_view kBow = "bow.tsv";
inline constexpr std::string_view kTfidf = "tfidf.tsv";
inline constexpr std::string_view kSeeds = "seeds.json";
inline constexpr std::string_view kModel = "model.json";
inline constexpr std::string_view kDocScores = "doc_scores.jsonl";
inline constexpr std::string_view kReportJson = "report.json";
inline constexpr std::string_view kReportCsv = "report.csv";
inline constexpr std::string_view kConfig = "config.json";
inline constexpr std::string_view kManifest = "manifest.json";
inline constexpr std::string_view kTimings = "timings.json";
inline constexpr std::string_view kLock = ".agrisk.lock";
}  // namespace artifact

/// Lexicon and resource files; relative paths resolve against data_dir.
struct ResourcePaths {
  std::filesystem::path stopwords = "stopwords_en.txt";
  std::filesystem::path lemmas = "lemmas_en.tsv";
  std::filesystem::path valence = "vader_lexicon.txt";
  std::filesystem::path sentiment_rules = "vader_rules.json";
  std::filesystem::path risk_lexicon = "risk_lexicon.json";
  std::filesystem::path topic_hints = "topic_hints.json";
};

struct PipelineConfig {
  std::filesystem::path corpus;
  /// Inferred from the corpus extension when unset.
  std::optional<CorpusFormat> corpus_format;
  std::optional<Date> date_from;
  std::optional<Date> date_to;
  std::filesystem::path data_dir;
  ResourcePaths resources;
  std::filesystem::path output_dir = "run";

  VocabularyOptions vocabulary;
  ModelVariant variant = ModelVariant::Tfidf;
  LdaOptions lda;
  GuidedOptions guided;
  /// Number of top title tf-idf terms used as guided seeds.
  int headline_terms = 10;
  std::vector<std::string> labels;

  DocumentAggregation aggregation = DocumentAggregation::Mean;
  TopicWeighting weighting = TopicWeighting::Theta;
  ClassThresholds thresholds;

  QAOptions qa;
  std::string question_template = std::string(kDefaultQuestionTemplate);
  int question_words = 3;
  std::optional<std::string> qa_endpoint;
  double qa_timeout = 10.0;

  /// Built-in defaults with data_dir from $AGRISK_DATA_DIR or the install default.
  static PipelineConfig defaults();

  std::filesystem::path resource(const std::filesystem::path& p) const;
};

std::filesystem::path default_data_dir();

/// Overlays a JSON config onto `base`. Relative paths in the document
/// resolve against `base_dir`. Throws ConfigError.
PipelineConfig merge_config_json(std::string_view json_text, const std::filesystem::path& base_dir,
                                 PipelineConfig base);
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = PipelineConfig::defaults());
void validate_config(const PipelineConfig& config);
std::string config_to_json(const PipelineConfig& config, bool include_output_dir = true);

struct ArtifactRecord {
  std::string path;
  std::string sha256;

  bool operator==(const ArtifactRecord&) const = default;
};

/// Stage -> artifact content hashes, in canonical stage order.
class Manifest {
 public:
  void set_config(ArtifactRecord record) { config_ = std::move(record); }
  const std::optional<ArtifactRecord>& config() const noexcept { return config_; }
  void set(Stage stage, std::vector<ArtifactRecord> records);
  const std::vector<ArtifactRecord>* find(Stage stage) const;
  std::vector<std::pair<Stage, std::vector<ArtifactRecord>>> entries() const;

  std::string to_json() const;
  static Manifest parse(std::string_view json_text);
  static Manifest load(const std::filesystem::path& run_dir);
  void save(const std::filesystem::path& run_dir) const;

  /// Stages without entries, and recorded files that are absent or changed.
  std::vector<std::string> problems(const std::filesystem::path& run_dir) const;

  bool operator==(const Manifest&) const = default;

 private:
  std::optional<ArtifactRecord> config_;
  std::array<std::optional<std::vector<ArtifactRecord>>, 6> stages_;
};

/// Exclusive lock on a run directory, released on destruction.
class RunLock {
 public:
  explicit RunLock(const std::filesystem::path& run_dir);
  ~RunLock();
  RunLock(const RunLock&) = delete;
  RunLock& operator=(const RunLock&) = delete;

 private:
  std::filesystem::path path_;
};

struct DocumentScore {
  std::string doc_id;
  SentimentScores scores;
  std::size_t n_sentences = 0;

  bool operator==(const DocumentScore&) const = default;
};

void write_processed(std::span<const ProcessedDocument> docs, std::ostream& out);
std::vector<ProcessedDocument> read_processed(std::istream& in);
void write_doc_scores(std::span<const DocumentScore> scores, std::ostream& out);
std::vector<DocumentScore> read_doc_scores(std::istream& in);
/// Reads "doc_id \t term \t weight" lines into a matrix with rows in `doc_ids` order.
DocTermMatrix read_triplets(std::istream& in, const Vocabulary& vocab, const std::vector<std::string>& doc_ids,
                            WeightKind kind);

/// Title terms ranked by tf-idf over the content vocabulary.
std::vector<std::string> headline_terms(std::span<const ProcessedDocument> docs, const Vocabulary& vocab, int n);

struct RunArtifacts {
  Corpus corpus;
  std::vector<ProcessedDocument> processed;
  Vocabulary vocab;
  DocTermMatrix bow;
  DocTermMatrix tfidf;
  std::optional<SeedSet> seeds;
  TopicModel model;
  std::vector<DocumentScore> doc_scores;
  std::vector<TopicScore> report;
  Manifest manifest;
};

/// Runs `stages` in order under the directory lock. Each stage reads its
/// inputs from the run directory. Failures throw StageError after removing
/// that stage's partial outputs.
void run_stages(std::span<const Stage> stages, const PipelineConfig& config);

/// All six stages, then the persisted artifacts read back.
RunArtifacts run_pipeline(const PipelineConfig& config);

/// Immutable view of a completed run directory.
struct RunSnapshot {
  std::filesystem::path dir;
  PipelineConfig config;
  Corpus corpus;
  Vocabulary vocab;
  TopicModel model;
  std::vector<DocumentScore> doc_scores;
  std::vector<TopicScore> report;
  Manifest manifest;
  std::string manifest_json;
  TextPipeline text;
  ValenceLexicon lexicon;

  /// Throws ArgumentError listing every missing or inconsistent artifact.
  static RunSnapshot load(const std::filesystem::path& run_dir);
};

/// Copies the manifest's artifacts to `dest`, verifying hashes.
void export_run(const std::filesystem::path& run_dir, const std::filesystem::path& dest);

}  // namespace agrisk
