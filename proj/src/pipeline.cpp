#include "agrisk/pipeline.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <iterator>
#include <map>
#include <sstream>

#include <json.hpp>

#include "agrisk/error.hpp"
#include "agrisk/hash.hpp"

#ifndef AGRISK_DEFAULT_DATA_DIR
#define AGRISK_DEFAULT_DATA_DIR "data"
#endif

namespace agrisk {
namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

constexpr std::array<Stage, 6> kStages = {Stage::Ingest,    Stage::Preprocess, Stage::Vectorize,
                                          Stage::Fit,       Stage::Sentiment,  Stage::Scoring};

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot read '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArgumentError("cannot write '" + path.string() + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw ArgumentError("write to '" + path.string() + "' failed");
}

std::string read_artifact(const fs::path& dir, std::string_view name, Stage producer) {
  const auto path = dir / name;
  if (!fs::exists(path)) {
    throw ArgumentError("missing artifact '" + std::string(name) + "' (run the " +
                        std::string(to_string(producer)) + " stage first)");
  }
  return read_text(path);
}

fs::path resolve(const fs::path& base, const fs::path& p) {
  if (p.empty() || p.is_absolute()) return p;
  return (base / p).lexically_normal();
}

std::string path_string(const fs::path& p) { return p.generic_string(); }

// Typed field access that reports the offending key.
template <typename T>
T field(const nlohmann::json& obj, const std::string& key, const std::string& scope) {
  try {
    return obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config key '" + scope + key + "': " + e.what());
  }
}

void check_keys(const nlohmann::json& obj, std::initializer_list<std::string_view> allowed, const std::string& scope) {
  if (!obj.is_object()) throw ConfigError("config section '" + scope + "' must be an object");
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ConfigError("unknown config key '" + scope + key + "'");
    }
  }
}

template <typename T>
void overlay(const nlohmann::json& obj, const char* key, T& target, const std::string& scope) {
  if (obj.contains(key)) target = field<T>(obj, key, scope);
}

std::optional<Date> parse_date_field(const nlohmann::json& obj, const char* key) {
  if (!obj.contains(key) || obj[key].is_null()) return std::nullopt;
  const auto text = field<std::string>(obj, key, "");
  const auto date = Date::parse(text);
  if (!date) throw ConfigError("config key '" + std::string(key) + "': invalid date '" + text + "'");
  return date;
}

struct Output {
  std::string name;
  std::string content;
};

std::vector<ProcessedDocument> load_processed(const fs::path& dir) {
  std::istringstream in(read_artifact(dir, artifact::kProcessed, Stage::Preprocess));
  return read_processed(in);
}

Vocabulary load_vocabulary(const fs::path& dir) {
  std::istringstream in(read_artifact(dir, artifact::kVocabulary, Stage::Vectorize));
  return read_vocabulary(in);
}

Corpus load_corpus_artifact(const fs::path& dir) {
  std::istringstream in(read_artifact(dir, artifact::kCorpus, Stage::Ingest));
  return read_jsonl_corpus(in, std::string(artifact::kCorpus));
}

TopicModel load_model(const fs::path& dir) {
  std::istringstream in(read_artifact(dir, artifact::kModel, Stage::Fit));
  return read_model_json(in);
}

std::vector<DocumentScore> load_doc_scores(const fs::path& dir) {
  std::istringstream in(read_artifact(dir, artifact::kDocScores, Stage::Sentiment));
  return read_doc_scores(in);
}

std::vector<TopicScore> load_report(const fs::path& dir) {
  std::istringstream in(read_artifact(dir, artifact::kReportJson, Stage::Scoring));
  return read_report_json(in);
}

std::vector<std::string> doc_ids_of(const std::vector<ProcessedDocument>& docs) {
  std::vector<std::string> ids;
  ids.reserve(docs.size());
  for (const auto& d : docs) ids.push_back(d.doc_id);
  return ids;
}

struct Matrices {
  DocTermMatrix bow;
  DocTermMatrix tfidf;
};

Matrices load_matrices(const fs::path& dir, const Vocabulary& vocab, const std::vector<std::string>& ids) {
  Matrices m;
  {
    std::istringstream in(read_artifact(dir, artifact::kBow, Stage::Vectorize));
    m.bow = read_triplets(in, vocab, ids, WeightKind::Counts);
  }
  {
    std::istringstream in(read_artifact(dir, artifact::kTfidf, Stage::Vectorize));
    m.tfidf = read_triplets(in, vocab, ids, WeightKind::Tfidf);
  }
  for (std::size_t d = 0; d < ids.size(); ++d) {
    auto& weighted = m.tfidf.rows[d];
    const auto& counts = m.bow.rows[d];
    if (weighted.size() != counts.size()) {
      throw ArgumentError("bow and tfidf artifacts disagree for document '" + ids[d] + "'");
    }
    for (std::size_t i = 0; i < weighted.size(); ++i) {
      if (weighted[i].term != counts[i].term) {
        throw ArgumentError("bow and tfidf artifacts disagree for document '" + ids[d] + "'");
      }
      weighted[i].count = counts[i].count;
    }
  }
  return m;
}

std::vector<Output> produce_ingest(const PipelineConfig& config) {
  const auto format = config.corpus_format.value_or(corpus_format_for(config.corpus));
  auto corpus = load_corpus(config.corpus, format);
  if (config.date_from || config.date_to) {
    corpus = filter_by_date(corpus, config.date_from.value_or(Date{0, 1, 1}),
                            config.date_to.value_or(Date{9999, 12, 31}));
  }
  if (corpus.empty()) throw ArgumentError("corpus has no documents in the configured date range");
  std::ostringstream out;
  write_jsonl_corpus(corpus, out);
  return {{std::string(artifact::kCorpus), out.str()}};
}

std::vector<Output> produce_preprocess(const PipelineConfig& config, const fs::path& dir) {
  const auto corpus = load_corpus_artifact(dir);
  const auto text = TextPipeline::load(config.resource(config.resources.stopwords),
                                       config.resource(config.resources.lemmas));
  std::vector<ProcessedDocument> docs;
  docs.reserve(corpus.size());
  for (const auto& doc : corpus) docs.push_back(preprocess_document(doc, text));
  std::ostringstream out;
  write_processed(docs, out);
  return {{std::string(artifact::kProcessed), out.str()}};
}

std::vector<Output> produce_vectorize(const PipelineConfig& config, const fs::path& dir) {
  const auto docs = load_processed(dir);
  const auto vocab = build_vocabulary(docs, config.vocabulary);
  const auto bow = build_count_matrix(docs, vocab);
  const auto tfidf = tfidf_transform(bow);
  std::ostringstream v, b, t;
  write_vocabulary(vocab, v);
  write_triplets(bow, vocab, b);
  write_triplets(tfidf, vocab, t);
  return {{std::string(artifact::kVocabulary), v.str()},
          {std::string(artifact::kBow), b.str()},
          {std::string(artifact::kTfidf), t.str()}};
}

std::vector<Output> produce_fit(const PipelineConfig& config, const fs::path& dir) {
  const auto docs = load_processed(dir);
  const auto vocab_text = read_artifact(dir, artifact::kVocabulary, Stage::Vectorize);
  std::istringstream vocab_in(vocab_text);
  const auto vocab = read_vocabulary(vocab_in);
  const auto matrices = load_matrices(dir, vocab, doc_ids_of(docs));

  std::vector<Output> outputs;
  TopicModel model;
  switch (config.variant) {
    case ModelVariant::Plain:
      model = fit_lda(matrices.bow, config.lda);
      break;
    case ModelVariant::Tfidf:
      model = fit_lda(matrices.tfidf, config.lda);
      break;
    case ModelVariant::Guided: {
      const auto headline = headline_terms(docs, vocab, config.headline_terms);
      const auto lexicon = RiskLexicon::load(config.resource(config.resources.risk_lexicon));
      const auto hints = load_topic_hints(config.resource(config.resources.topic_hints));
      const auto seeds = build_seed_set(headline, lexicon, config.lda.num_topics, hints, vocab);
      std::ostringstream s;
      write_seed_set_json(seeds, s);
      outputs.push_back({std::string(artifact::kSeeds), s.str()});
      model = fit_guided_lda(matrices.bow, seeds, config.lda, config.guided);
      break;
    }
  }
  model.labels = config.labels;
  model.vocabulary_hash = sha256_hex(vocab_text);
  std::ostringstream m;
  write_model_json(model, m);
  outputs.insert(outputs.begin(), {std::string(artifact::kModel), m.str()});
  return outputs;
}

std::vector<Output> produce_sentiment(const PipelineConfig& config, const fs::path& dir) {
  const auto corpus = load_corpus_artifact(dir);
  const auto lexicon = ValenceLexicon::load(config.resource(config.resources.valence),
                                            config.resource(config.resources.sentiment_rules));
  std::vector<DocumentScore> scores;
  scores.reserve(corpus.size());
  for (const auto& doc : corpus) {
    scores.push_back({doc.id, score_document(doc, lexicon, config.aggregation),
                      segment_sentences(doc.content).size()});
  }
  std::ostringstream out;
  write_doc_scores(scores, out);
  return {{std::string(artifact::kDocScores), out.str()}};
}

std::vector<Output> produce_scoring(const PipelineConfig& config, const fs::path& dir) {
  const auto model = load_model(dir);
  const auto scores = load_doc_scores(dir);
  std::map<std::string, double, std::less<>> by_id;
  for (const auto& s : scores) by_id.emplace(s.doc_id, s.scores.compound);
  std::vector<double> compounds;
  compounds.reserve(model.doc_ids.size());
  for (const auto& id : model.doc_ids) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw ArgumentError("document '" + id + "' has no sentiment score");
    compounds.push_back(it->second);
  }
  const auto report = score_report(model, compounds, config.weighting, config.thresholds);
  std::ostringstream j, c;
  write_report_json(report, j);
  write_report_csv(report, c);
  return {{std::string(artifact::kReportJson), j.str()}, {std::string(artifact::kReportCsv), c.str()}};
}

std::vector<Output> produce(Stage stage, const PipelineConfig& config, const fs::path& dir) {
  switch (stage) {
    case Stage::Ingest:
      return produce_ingest(config);
    case Stage::Preprocess:
      return produce_preprocess(config, dir);
    case Stage::Vectorize:
      return produce_vectorize(config, dir);
    case Stage::Fit:
      return produce_fit(config, dir);
    case Stage::Sentiment:
      return produce_sentiment(config, dir);
    case Stage::Scoring:
      return produce_scoring(config, dir);
  }
  return {};
}

// Writes every output to a temporary name, then renames; a failure
// removes whatever was written.
std::vector<ArtifactRecord> commit(const fs::path& dir, const std::vector<Output>& outputs) {
  std::vector<fs::path> temps;
  try {
    for (const auto& o : outputs) {
      temps.push_back(dir / (o.name + ".tmp"));
      write_text(temps.back(), o.content);
    }
    for (std::size_t i = 0; i < outputs.size(); ++i) fs::rename(temps[i], dir / outputs[i].name);
  } catch (...) {
    std::error_code ec;
    for (const auto& t : temps) fs::remove(t, ec);
    throw;
  }
  std::vector<ArtifactRecord> records;
  for (const auto& o : outputs) records.push_back({o.name, sha256_hex(o.content)});
  return records;
}

void record_timing(const fs::path& dir, Stage stage, double seconds) {
  const auto path = dir / artifact::kTimings;
  ojson timings = ojson::object();
  if (fs::exists(path)) {
    try {
      timings = ojson::parse(read_text(path));
    } catch (const nlohmann::json::exception&) {
      timings = ojson::object();
    }
  }
  timings[std::string(to_string(stage))] = seconds;
  write_text(path, timings.dump(2) + "\n");
}

}  // namespace

std::string_view to_string(Stage stage) {
  switch (stage) {
    case Stage::Ingest:
      return "ingest";
    case Stage::Preprocess:
      return "preprocess";
    case Stage::Vectorize:
      return "vectorize";
    case Stage::Fit:
      return "fit";
    case Stage::Sentiment:
      return "sentiment";
    case Stage::Scoring:
      return "scoring";
  }
  return "ingest";
}

Stage parse_stage(std::string_view name) {
  for (const auto s : kStages) {
    if (to_string(s) == name) return s;
  }
  throw ArgumentError("unknown stage '" + std::string(name) + "'");
}

const std::array<Stage, 6>& all_stages() { return kStages; }

int exit_code_for(Stage stage) { return exit_code::kIngest + static_cast<int>(stage); }

fs::path default_data_dir() {
  if (const char* env = std::getenv("AGRISK_DATA_DIR"); env && *env) return env;
  return AGRISK_DEFAULT_DATA_DIR;
}

PipelineConfig PipelineConfig::defaults() {
  PipelineConfig config;
  config.data_dir = default_data_dir();
  return config;
}

fs::path PipelineConfig::resource(const fs::path& p) const { return resolve(data_dir, p); }

PipelineConfig merge_config_json(std::string_view json_text, const fs::path& base_dir, PipelineConfig base) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config JSON: ") + e.what());
  }
  check_keys(j,
             {"corpus", "corpus_format", "date_from", "date_to", "data_dir", "resources", "output_dir",
              "vocabulary", "model", "guided", "labels", "sentiment", "scoring", "qa", "rng_seed"},
             "");
  auto& c = base;
  if (j.contains("corpus")) c.corpus = resolve(base_dir, field<std::string>(j, "corpus", ""));
  if (j.contains("corpus_format")) {
    if (j["corpus_format"].is_null()) {
      c.corpus_format.reset();
    } else {
      try {
        c.corpus_format = parse_corpus_format(field<std::string>(j, "corpus_format", ""));
      } catch (const ArgumentError& e) {
        throw ConfigError(e.what());
      }
    }
  }
  if (j.contains("date_from")) c.date_from = parse_date_field(j, "date_from");
  if (j.contains("date_to")) c.date_to = parse_date_field(j, "date_to");
  if (j.contains("data_dir")) c.data_dir = resolve(base_dir, field<std::string>(j, "data_dir", ""));
  if (j.contains("output_dir")) c.output_dir = resolve(base_dir, field<std::string>(j, "output_dir", ""));
  if (j.contains("rng_seed")) c.lda.seed = field<std::uint64_t>(j, "rng_seed", "");
  if (j.contains("labels")) c.labels = field<std::vector<std::string>>(j, "labels", "");

  if (j.contains("resources")) {
    const auto& r = j["resources"];
    check_keys(r, {"stopwords", "lemmas", "valence", "sentiment_rules", "risk_lexicon", "topic_hints"}, "resources.");
    auto set = [&](const char* key, fs::path& target) {
      if (r.contains(key)) target = field<std::string>(r, key, "resources.");
    };
    set("stopwords", c.resources.stopwords);
    set("lemmas", c.resources.lemmas);
    set("valence", c.resources.valence);
    set("sentiment_rules", c.resources.sentiment_rules);
    set("risk_lexicon", c.resources.risk_lexicon);
    set("topic_hints", c.resources.topic_hints);
  }
  if (j.contains("vocabulary")) {
    const auto& v = j["vocabulary"];
    const std::string scope = "vocabulary.";
    check_keys(v, {"min_df", "max_df_ratio", "max_terms", "ranking"}, scope);
    overlay(v, "min_df", c.vocabulary.min_df, scope);
    overlay(v, "max_df_ratio", c.vocabulary.max_df_ratio, scope);
    if (v.contains("max_terms")) {
      c.vocabulary.max_terms =
          v["max_terms"].is_null() ? VocabularyOptions::kUnlimited : field<std::size_t>(v, "max_terms", scope);
    }
    if (v.contains("ranking")) {
      const auto r = field<std::string>(v, "ranking", scope);
      if (r == "total") {
        c.vocabulary.ranking = FrequencyRanking::TotalFrequency;
      } else if (r == "df") {
        c.vocabulary.ranking = FrequencyRanking::DocumentFrequency;
      } else {
        throw ConfigError("config key 'vocabulary.ranking': expected total or df, got '" + r + "'");
      }
    }
  }
  if (j.contains("model")) {
    const auto& m = j["model"];
    const std::string scope = "model.";
    check_keys(m, {"variant", "topics", "alpha", "beta", "iterations", "burn_in", "sample_lag"}, scope);
    if (m.contains("variant")) {
      try {
        c.variant = parse_model_variant(field<std::string>(m, "variant", scope));
      } catch (const ArgumentError& e) {
        throw ConfigError(e.what());
      }
    }
    overlay(m, "topics", c.lda.num_topics, scope);
    if (m.contains("alpha")) {
      c.lda.alpha = m["alpha"].is_null() ? std::nullopt : std::optional<double>(field<double>(m, "alpha", scope));
    }
    overlay(m, "beta", c.lda.beta, scope);
    overlay(m, "iterations", c.lda.iterations, scope);
    overlay(m, "burn_in", c.lda.burn_in, scope);
    overlay(m, "sample_lag", c.lda.sample_lag, scope);
  }
  if (j.contains("guided")) {
    const auto& g = j["guided"];
    const std::string scope = "guided.";
    check_keys(g, {"boost", "seed_confidence", "biased_init", "prior_boost", "headline_terms"}, scope);
    overlay(g, "boost", c.guided.boost, scope);
    overlay(g, "seed_confidence", c.guided.seed_confidence, scope);
    overlay(g, "biased_init", c.guided.biased_init, scope);
    overlay(g, "prior_boost", c.guided.prior_boost, scope);
    overlay(g, "headline_terms", c.headline_terms, scope);
  }
  if (j.contains("sentiment")) {
    const auto& s = j["sentiment"];
    check_keys(s, {"aggregation"}, "sentiment.");
    if (s.contains("aggregation")) {
      try {
        c.aggregation = parse_document_aggregation(field<std::string>(s, "aggregation", "sentiment."));
      } catch (const ArgumentError& e) {
        throw ConfigError(e.what());
      }
    }
  }
  if (j.contains("scoring")) {
    const auto& s = j["scoring"];
    const std::string scope = "scoring.";
    check_keys(s, {"weighting", "positive_threshold", "negative_threshold"}, scope);
    if (s.contains("weighting")) {
      try {
        c.weighting = parse_topic_weighting(field<std::string>(s, "weighting", scope));
      } catch (const ArgumentError& e) {
        throw ConfigError(e.what());
      }
    }
    overlay(s, "positive_threshold", c.thresholds.positive, scope);
    overlay(s, "negative_threshold", c.thresholds.negative, scope);
  }
  if (j.contains("qa")) {
    const auto& q = j["qa"];
    const std::string scope = "qa.";
    check_keys(q, {"max_span_len", "length_penalty", "question_template", "question_words", "endpoint", "timeout"},
               scope);
    overlay(q, "max_span_len", c.qa.max_span_len, scope);
    overlay(q, "length_penalty", c.qa.length_penalty, scope);
    overlay(q, "question_template", c.question_template, scope);
    overlay(q, "question_words", c.question_words, scope);
    if (q.contains("endpoint")) {
      c.qa_endpoint =
          q["endpoint"].is_null() ? std::nullopt : std::optional<std::string>(field<std::string>(q, "endpoint", scope));
    }
    overlay(q, "timeout", c.qa_timeout, scope);
  }
  return c;
}

PipelineConfig load_config(const fs::path& path, PipelineConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return merge_config_json(text, fs::absolute(path).parent_path(), std::move(base));
}

void validate_config(const PipelineConfig& c) {
  if (c.corpus.empty()) throw ConfigError("no corpus path configured");
  if (c.output_dir.empty()) throw ConfigError("no output directory configured");
  if (c.date_from && c.date_to && *c.date_to < *c.date_from) throw ConfigError("date_from is after date_to");
  if (c.vocabulary.max_df_ratio <= 0.0 || c.vocabulary.max_df_ratio > 1.0) {
    throw ConfigError("vocabulary.max_df_ratio must lie in (0, 1]");
  }
  if (c.vocabulary.max_terms == 0) throw ConfigError("vocabulary.max_terms must be positive");
  if (c.lda.num_topics < 1) throw ConfigError("model.topics must be at least 1");
  if (c.lda.iterations < 1) throw ConfigError("model.iterations must be at least 1");
  if (c.lda.burn_in < 0) throw ConfigError("model.burn_in must be non-negative");
  if (c.lda.sample_lag < 1) throw ConfigError("model.sample_lag must be at least 1");
  if (!(c.lda.beta > 0.0)) throw ConfigError("model.beta must be positive");
  if (c.lda.alpha && !(*c.lda.alpha > 0.0)) throw ConfigError("model.alpha must be positive");
  if (c.guided.boost < 0.0) throw ConfigError("guided.boost must be non-negative");
  if (c.guided.seed_confidence < 0.0 || c.guided.seed_confidence > 1.0) {
    throw ConfigError("guided.seed_confidence must lie in [0, 1]");
  }
  if (c.headline_terms < 0) throw ConfigError("guided.headline_terms must be non-negative");
  if (c.thresholds.negative > c.thresholds.positive) {
    throw ConfigError("scoring.negative_threshold exceeds scoring.positive_threshold");
  }
  if (c.qa.max_span_len == 0) throw ConfigError("qa.max_span_len must be positive");
  if (c.question_words < 1) throw ConfigError("qa.question_words must be at least 1");
  if (!(c.qa_timeout > 0.0)) throw ConfigError("qa.timeout must be positive");
}

std::string config_to_json(const PipelineConfig& c, bool include_output_dir) {
  ojson j;
  j["corpus"] = path_string(c.corpus);
  j["corpus_format"] = c.corpus_format ? ojson(std::string(to_string(*c.corpus_format))) : ojson(nullptr);
  j["date_from"] = c.date_from ? ojson(c.date_from->to_string()) : ojson(nullptr);
  j["date_to"] = c.date_to ? ojson(c.date_to->to_string()) : ojson(nullptr);
  j["data_dir"] = path_string(c.data_dir);
  j["resources"] = {{"stopwords", path_string(c.resources.stopwords)},
                    {"lemmas", path_string(c.resources.lemmas)},
                    {"valence", path_string(c.resources.valence)},
                    {"sentiment_rules", path_string(c.resources.sentiment_rules)},
                    {"risk_lexicon", path_string(c.resources.risk_lexicon)},
                    {"topic_hints", path_string(c.resources.topic_hints)}};
  if (include_output_dir) j["output_dir"] = path_string(c.output_dir);
  j["rng_seed"] = c.lda.seed;
  j["vocabulary"] = {
      {"min_df", c.vocabulary.min_df},
      {"max_df_ratio", c.vocabulary.max_df_ratio},
      {"max_terms", c.vocabulary.max_terms == VocabularyOptions::kUnlimited ? ojson(nullptr)
                                                                             : ojson(c.vocabulary.max_terms)},
      {"ranking", c.vocabulary.ranking == FrequencyRanking::TotalFrequency ? "total" : "df"}};
  j["model"] = {{"variant", std::string(to_string(c.variant))},
                {"topics", c.lda.num_topics},
                {"alpha", c.lda.alpha ? ojson(*c.lda.alpha) : ojson(nullptr)},
                {"beta", c.lda.beta},
                {"iterations", c.lda.iterations},
                {"burn_in", c.lda.burn_in},
                {"sample_lag", c.lda.sample_lag}};
  j["guided"] = {{"boost", c.guided.boost},
                 {"seed_confidence", c.guided.seed_confidence},
                 {"biased_init", c.guided.biased_init},
                 {"prior_boost", c.guided.prior_boost},
                 {"headline_terms", c.headline_terms}};
  j["labels"] = c.labels;
  j["sentiment"] = {{"aggregation", std::string(to_string(c.aggregation))}};
  j["scoring"] = {{"weighting", std::string(to_string(c.weighting))},
                  {"positive_threshold", c.thresholds.positive},
                  {"negative_threshold", c.thresholds.negative}};
  j["qa"] = {{"max_span_len", c.qa.max_span_len},
             {"length_penalty", c.qa.length_penalty},
             {"question_template", c.question_template},
             {"question_words", c.question_words},
             {"endpoint", c.qa_endpoint ? ojson(*c.qa_endpoint) : ojson(nullptr)},
             {"timeout", c.qa_timeout}};
  return j.dump(2) + "\n";
}

void Manifest::set(Stage stage, std::vector<ArtifactRecord> records) {
  stages_[static_cast<std::size_t>(stage)] = std::move(records);
}

const std::vector<ArtifactRecord>* Manifest::find(Stage stage) const {
  const auto& entry = stages_[static_cast<std::size_t>(stage)];
  return entry ? &*entry : nullptr;
}

std::vector<std::pair<Stage, std::vector<ArtifactRecord>>> Manifest::entries() const {
  std::vector<std::pair<Stage, std::vector<ArtifactRecord>>> out;
  for (const auto s : kStages) {
    if (const auto* r = find(s)) out.emplace_back(s, *r);
  }
  return out;
}

std::string Manifest::to_json() const {
  auto record = [](const ArtifactRecord& r) { return ojson{{"path", r.path}, {"sha256", r.sha256}}; };
  ojson j;
  j["format"] = "agrisk-manifest/1";
  j["config"] = config_ ? record(*config_) : ojson(nullptr);
  ojson stages = ojson::object();
  for (const auto& [stage, records] : entries()) {
    ojson list = ojson::array();
    for (const auto& r : records) list.push_back(record(r));
    stages[std::string(to_string(stage))] = {{"artifacts", std::move(list)}};
  }
  j["stages"] = std::move(stages);
  return j.dump(2) + "\n";
}

Manifest Manifest::parse(std::string_view json_text) {
  Manifest m;
  try {
    const auto j = nlohmann::json::parse(json_text);
    auto record = [](const nlohmann::json& r) {
      return ArtifactRecord{r.at("path").get<std::string>(), r.at("sha256").get<std::string>()};
    };
    if (j.contains("config") && !j["config"].is_null()) m.config_ = record(j["config"]);
    for (const auto& [name, entry] : j.at("stages").items()) {
      std::vector<ArtifactRecord> records;
      for (const auto& r : entry.at("artifacts")) records.push_back(record(r));
      m.set(parse_stage(name), std::move(records));
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("manifest", std::string("invalid manifest: ") + e.what());
  }
  return m;
}

Manifest Manifest::load(const fs::path& run_dir) {
  const auto path = run_dir / artifact::kManifest;
  if (!fs::exists(path)) throw ArgumentError("run directory '" + run_dir.string() + "' has no manifest.json");
  return parse(read_text(path));
}

void Manifest::save(const fs::path& run_dir) const {
  const auto tmp = run_dir / (std::string(artifact::kManifest) + ".tmp");
  write_text(tmp, to_json());
  fs::rename(tmp, run_dir / artifact::kManifest);
}

std::vector<std::string> Manifest::problems(const fs::path& run_dir) const {
  std::vector<std::string> out;
  auto check = [&](const ArtifactRecord& r) {
    const auto path = run_dir / r.path;
    if (!fs::exists(path)) {
      out.push_back("missing artifact " + r.path);
    } else if (sha256_file(path) != r.sha256) {
      out.push_back("artifact " + r.path + " does not match its manifest hash");
    }
  };
  if (!config_) {
    out.push_back("manifest has no config entry");
  } else {
    check(*config_);
  }
  for (const auto s : kStages) {
    const auto* records = find(s);
    if (!records) {
      out.push_back("stage " + std::string(to_string(s)) + " has not run");
      continue;
    }
    for (const auto& r : *records) check(r);
  }
  return out;
}

RunLock::RunLock(const fs::path& run_dir) : path_(run_dir / artifact::kLock) {
  const int fd = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
  if (fd < 0) {
    if (errno == EEXIST) {
      throw LockError("run directory '" + run_dir.string() + "' is locked by another run (" + path_.string() +
                      " exists)");
    }
    throw LockError("cannot create lock '" + path_.string() + "': " + std::strerror(errno));
  }
  const auto pid = std::to_string(::getpid()) + "\n";
  [[maybe_unused]] const auto written = ::write(fd, pid.data(), pid.size());
  ::close(fd);
}

RunLock::~RunLock() {
  std::error_code ec;
  fs::remove(path_, ec);
}

void write_processed(std::span<const ProcessedDocument> docs, std::ostream& out) {
  for (const auto& d : docs) {
    ojson j;
    j["doc_id"] = d.doc_id;
    j["tokens"] = d.tokens;
    j["sentences"] = d.sentences;
    j["title_tokens"] = d.title_tokens;
    out << j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
  }
}

std::vector<ProcessedDocument> read_processed(std::istream& in) {
  std::vector<ProcessedDocument> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      docs.push_back({j.at("doc_id").get<std::string>(), j.at("tokens").get<std::vector<std::string>>(),
                      j.at("sentences").get<std::vector<std::string>>(),
                      j.at("title_tokens").get<std::vector<std::string>>()});
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(line_no, std::string("processed document: ") + e.what());
    }
  }
  return docs;
}

void write_doc_scores(std::span<const DocumentScore> scores, std::ostream& out) {
  for (const auto& s : scores) {
    ojson j;
    j["doc_id"] = s.doc_id;
    j["pos"] = s.scores.pos;
    j["neg"] = s.scores.neg;
    j["neu"] = s.scores.neu;
    j["compound"] = s.scores.compound;
    j["n_sentences"] = s.n_sentences;
    out << j.dump() << '\n';
  }
}

std::vector<DocumentScore> read_doc_scores(std::istream& in) {
  std::vector<DocumentScore> scores;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      DocumentScore s;
      s.doc_id = j.at("doc_id").get<std::string>();
      s.scores = {j.at("pos").get<double>(), j.at("neg").get<double>(), j.at("neu").get<double>(),
                  j.at("compound").get<double>()};
      s.n_sentences = j.value("n_sentences", std::size_t{0});
      scores.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw ValidationError(line_no, std::string("document score: ") + e.what());
    }
  }
  return scores;
}

DocTermMatrix read_triplets(std::istream& in, const Vocabulary& vocab, const std::vector<std::string>& doc_ids,
                            WeightKind kind) {
  std::map<std::string, std::size_t, std::less<>> row_of;
  for (std::size_t i = 0; i < doc_ids.size(); ++i) row_of.emplace(doc_ids[i], i);

  DocTermMatrix m;
  m.kind = kind;
  m.vocab_size = vocab.size();
  m.doc_ids = doc_ids;
  m.rows.resize(doc_ids.size());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) throw ValidationError(line_no, "expected 'doc_id\\tterm\\tweight'");
    const auto doc = std::string_view(line).substr(0, t1);
    const auto term = std::string_view(line).substr(t1 + 1, t2 - t1 - 1);
    const auto value = line.substr(t2 + 1);
    const auto row = row_of.find(doc);
    if (row == row_of.end()) throw ValidationError(line_no, "unknown document '" + std::string(doc) + "'");
    const auto id = vocab.id(term);
    if (!id) throw ValidationError(line_no, "term '" + std::string(term) + "' is not in the vocabulary");
    TermWeight w;
    w.term = *id;
    try {
      if (kind == WeightKind::Counts) {
        w.count = static_cast<std::uint32_t>(std::stoul(value));
        w.weight = static_cast<double>(w.count);
      } else {
        w.weight = std::stod(value);
      }
    } catch (const std::exception&) {
      throw ValidationError(line_no, "weight '" + value + "' is not a number");
    }
    m.rows[row->second].push_back(w);
  }
  for (auto& row : m.rows) {
    std::sort(row.begin(), row.end(), [](const TermWeight& a, const TermWeight& b) { return a.term < b.term; });
  }
  return m;
}

std::vector<std::string> headline_terms(std::span<const ProcessedDocument> docs, const Vocabulary& vocab, int n) {
  if (n <= 0 || docs.empty()) return {};
  std::vector<std::vector<std::string>> titles;
  std::vector<std::string> ids;
  for (const auto& d : docs) {
    titles.push_back(d.title_tokens);
    ids.push_back(d.doc_id);
  }
  const auto counts = build_count_matrix(titles, vocab, ids);
  const bool any = std::any_of(counts.rows.begin(), counts.rows.end(), [](const SparseRow& r) { return !r.empty(); });
  if (!any) return {};
  std::vector<std::string> out;
  for (auto& [term, weight] : top_terms_by_tfidf(tfidf_transform(counts), vocab, n)) {
    if (weight > 0.0) out.push_back(term);
  }
  return out;
}

void run_stages(std::span<const Stage> stages, const PipelineConfig& config) {
  validate_config(config);
  const auto dir = config.output_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory '" + dir.string() + "': " + ec.message());

  RunLock lock(dir);
  Manifest manifest;
  if (fs::exists(dir / artifact::kManifest)) {
    try {
      manifest = Manifest::load(dir);
    } catch (const Error&) {
      manifest = Manifest{};
    }
  }
  const auto config_json = config_to_json(config, false);
  write_text(dir / artifact::kConfig, config_json);
  manifest.set_config({std::string(artifact::kConfig), sha256_hex(config_json)});
  manifest.save(dir);

  for (const auto stage : stages) {
    const auto started = std::chrono::steady_clock::now();
    std::vector<ArtifactRecord> records;
    try {
      const auto outputs = produce(stage, config, dir);
      records = commit(dir, outputs);
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(std::string(to_string(stage)), exit_code_for(stage), e.what());
    }
    if (stage == Stage::Fit && config.variant != ModelVariant::Guided) fs::remove(dir / artifact::kSeeds, ec);
    manifest.set(stage, std::move(records));
    manifest.save(dir);
    const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - started;
    record_timing(dir, stage, elapsed.count());
  }
}

RunArtifacts run_pipeline(const PipelineConfig& config) {
  run_stages(kStages, config);
  const auto& dir = config.output_dir;
  RunArtifacts run;
  run.corpus = load_corpus_artifact(dir);
  run.processed = load_processed(dir);
  run.vocab = load_vocabulary(dir);
  auto matrices = load_matrices(dir, run.vocab, doc_ids_of(run.processed));
  run.bow = std::move(matrices.bow);
  run.tfidf = std::move(matrices.tfidf);
  if (config.variant == ModelVariant::Guided) {
    const auto lexicon = RiskLexicon::load(config.resource(config.resources.risk_lexicon));
    const auto hints = load_topic_hints(config.resource(config.resources.topic_hints));
    run.seeds = build_seed_set(headline_terms(run.processed, run.vocab, config.headline_terms), lexicon,
                               config.lda.num_topics, hints, run.vocab);
  }
  run.model = load_model(dir);
  run.doc_scores = load_doc_scores(dir);
  run.report = load_report(dir);
  run.manifest = Manifest::load(dir);
  return run;
}

RunSnapshot RunSnapshot::load(const fs::path& run_dir) {
  const auto manifest = Manifest::load(run_dir);
  const auto problems = manifest.problems(run_dir);
  if (!problems.empty()) {
    std::string message = "incomplete run directory '" + run_dir.string() + "':";
    for (const auto& p : problems) message += "\n  - " + p;
    throw ArgumentError(message);
  }
  RunSnapshot snap;
  snap.dir = run_dir;
  snap.config = merge_config_json(read_text(run_dir / artifact::kConfig), fs::absolute(run_dir),
                                  PipelineConfig::defaults());
  snap.config.output_dir = run_dir;
  snap.corpus = load_corpus_artifact(run_dir);
  snap.vocab = load_vocabulary(run_dir);
  snap.model = load_model(run_dir);
  snap.doc_scores = load_doc_scores(run_dir);
  snap.report = load_report(run_dir);
  snap.manifest = manifest;
  snap.manifest_json = read_text(run_dir / artifact::kManifest);
  snap.text = TextPipeline::load(snap.config.resource(snap.config.resources.stopwords),
                                 snap.config.resource(snap.config.resources.lemmas));
  snap.lexicon = ValenceLexicon::load(snap.config.resource(snap.config.resources.valence),
                                      snap.config.resource(snap.config.resources.sentiment_rules));
  return snap;
}

void export_run(const fs::path& run_dir, const fs::path& dest) {
  const auto manifest = Manifest::load(run_dir);
  const auto problems = manifest.problems(run_dir);
  if (!problems.empty()) throw ArgumentError("cannot export '" + run_dir.string() + "': " + problems.front());
  if (fs::exists(dest) && fs::equivalent(dest, run_dir)) throw ArgumentError("export destination is the run directory");
  fs::create_directories(dest);

  std::vector<ArtifactRecord> records;
  if (manifest.config()) records.push_back(*manifest.config());
  for (const auto& [stage, list] : manifest.entries()) records.insert(records.end(), list.begin(), list.end());
  for (const auto& r : records) {
    fs::copy_file(run_dir / r.path, dest / r.path, fs::copy_options::overwrite_existing);
    if (sha256_file(dest / r.path) != r.sha256) throw ArgumentError("copied artifact " + r.path + " is corrupt");
  }
  fs::copy_file(run_dir / artifact::kManifest, dest / artifact::kManifest, fs::copy_options::overwrite_existing);
}

}  // namespace agrisk
