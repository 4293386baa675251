#include "agrisk/topics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <random>
#include <set>
#include <unordered_map>

#include <json.hpp>

#include "agrisk/error.hpp"

namespace agrisk {
namespace {

using ojson = nlohmann::ordered_json;

class Uniform01 {
 public:
  explicit Uniform01(std::uint64_t seed) : engine_(seed) {}
  double operator()() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

struct TokenSlot {
  std::uint32_t doc;
  TermId term;
  double weight;
  std::size_t topic;
};

std::vector<TokenSlot> expand_tokens(const DocTermMatrix& matrix) {
  std::vector<TokenSlot> tokens;
  for (std::size_t d = 0; d < matrix.rows.size(); ++d) {
    const auto& row = matrix.rows[d];
    double row_weight = 0.0;
    std::uint64_t row_count = 0;
    for (const auto& entry : row) {
      if (entry.term >= matrix.vocab_size) throw ArgumentError("term id outside vocabulary");
      row_weight += entry.weight;
      row_count += entry.count;
    }
    if (row_count == 0) continue;
    const bool weighted = matrix.kind == WeightKind::Tfidf;
    if (weighted && !(row_weight > 0.0)) {
      throw ArgumentError("document " + std::to_string(d) + " has tokens but zero total weight");
    }
    const double scale = weighted ? static_cast<double>(row_count) / row_weight : 1.0;
    for (const auto& entry : row) {
      const double w = weighted ? entry.weight / entry.count * scale : 1.0;
      for (std::uint32_t i = 0; i < entry.count; ++i) {
        tokens.push_back({static_cast<std::uint32_t>(d), entry.term, w, 0});
      }
    }
  }
  return tokens;
}

std::size_t pick(std::span<const double> cumulative, double u) {
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  const auto k = static_cast<std::size_t>(it - cumulative.begin());
  return std::min(k, cumulative.size() - 1);
}

struct SamplerSetup {
  std::size_t num_topics;
  double alpha;
  double beta;
  /// Dense K x V boost; empty when no prior boost applies.
  std::vector<double> boost;
  std::vector<double> boost_total;
  /// Per-term initialization distribution; empty means uniform.
  std::unordered_map<TermId, std::vector<double>> init;
};

void validate(const DocTermMatrix& matrix, const LdaOptions& options) {
  if (matrix.rows.empty() || matrix.vocab_size == 0) throw ArgumentError("empty document-term matrix");
  if (options.num_topics < 1) throw ArgumentError("number of topics must be at least 1");
  if (options.iterations < 1) throw ArgumentError("iterations must be at least 1");
  if (options.burn_in < 0) throw ArgumentError("burn_in must be non-negative");
  if (options.sample_lag < 1) throw ArgumentError("sample_lag must be at least 1");
  if (!(options.beta > 0.0)) throw ArgumentError("beta must be positive");
  if (!(options.resolved_alpha() > 0.0)) throw ArgumentError("alpha must be positive");
}

TopicModel run_sampler(const DocTermMatrix& matrix, const LdaOptions& options, const SamplerSetup& setup) {
  auto tokens = expand_tokens(matrix);
  const std::size_t K = setup.num_topics;
  const std::size_t V = matrix.vocab_size;
  const std::size_t D = matrix.rows.size();
  if (tokens.empty()) throw ArgumentError("document-term matrix has no tokens");
  if (K > tokens.size()) {
    throw ArgumentError("number of topics (" + std::to_string(K) + ") exceeds total tokens (" +
                        std::to_string(tokens.size()) + ")");
  }

  const double alpha = setup.alpha;
  const double beta = setup.beta;
  const double v_beta = static_cast<double>(V) * beta;
  std::vector<double> boost = setup.boost.empty() ? std::vector<double>(K * V, 0.0) : setup.boost;
  std::vector<double> boost_total = setup.boost_total.empty() ? std::vector<double>(K, 0.0) : setup.boost_total;

  Uniform01 uniform(options.seed);
  std::vector<double> cumulative(K);

  for (auto& tok : tokens) {
    const auto it = setup.init.find(tok.term);
    if (it == setup.init.end()) {
      tok.topic = std::min(static_cast<std::size_t>(uniform() * static_cast<double>(K)), K - 1);
    } else {
      double total = 0.0;
      for (std::size_t k = 0; k < K; ++k) cumulative[k] = total += it->second[k];
      tok.topic = pick(cumulative, uniform() * total);
    }
  }

  TopicCounts counts{DenseMatrix(D, K), DenseMatrix(K, V), std::vector<double>(K, 0.0)};
  for (const auto& tok : tokens) {
    counts.doc_topic(tok.doc, tok.topic) += tok.weight;
    counts.topic_term(tok.topic, tok.term) += tok.weight;
    counts.topic_total[tok.topic] += tok.weight;
  }

  DenseMatrix doc_topic_sum(D, K);
  DenseMatrix topic_term_sum(K, V);
  int samples = 0;

  for (int sweep = 1; sweep <= options.iterations; ++sweep) {
    for (auto& tok : tokens) {
      const std::size_t old = tok.topic;
      counts.doc_topic(tok.doc, old) -= tok.weight;
      counts.topic_term(old, tok.term) -= tok.weight;
      counts.topic_total[old] -= tok.weight;

      double total = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        const double b = boost[k * V + tok.term];
        total += (counts.doc_topic(tok.doc, k) + alpha) * (counts.topic_term(k, tok.term) + beta + b) /
                 (counts.topic_total[k] + v_beta + boost_total[k]);
        cumulative[k] = total;
      }
      const std::size_t k_new = pick(cumulative, uniform() * total);
      tok.topic = k_new;
      counts.doc_topic(tok.doc, k_new) += tok.weight;
      counts.topic_term(k_new, tok.term) += tok.weight;
      counts.topic_total[k_new] += tok.weight;
    }
    if (options.observer) options.observer(sweep, counts);
    if (sweep > options.burn_in && (sweep - options.burn_in) % options.sample_lag == 0) {
      doc_topic_sum += counts.doc_topic;
      topic_term_sum += counts.topic_term;
      ++samples;
    }
  }

  const double scale = samples > 0 ? 1.0 / samples : 1.0;
  const DenseMatrix& dt = samples > 0 ? doc_topic_sum : counts.doc_topic;
  const DenseMatrix& tt = samples > 0 ? topic_term_sum : counts.topic_term;

  TopicModel model;
  model.num_topics = static_cast<int>(K);
  model.alpha = alpha;
  model.beta = beta;
  model.weighting = matrix.kind;
  model.rng_seed = options.seed;
  model.iterations = options.iterations;
  model.burn_in = options.burn_in;
  model.sample_lag = options.sample_lag;
  model.doc_ids = matrix.doc_ids;

  model.theta = DenseMatrix(D, K);
  for (std::size_t d = 0; d < D; ++d) {
    double sum = 0.0;
    for (std::size_t k = 0; k < K; ++k) sum += model.theta(d, k) = dt(d, k) * scale + alpha;
    for (std::size_t k = 0; k < K; ++k) model.theta(d, k) /= sum;
  }
  model.phi = DenseMatrix(K, V);
  for (std::size_t k = 0; k < K; ++k) {
    double sum = 0.0;
    for (std::size_t w = 0; w < V; ++w) sum += model.phi(k, w) = tt(k, w) * scale + beta + boost[k * V + w];
    for (std::size_t w = 0; w < V; ++w) model.phi(k, w) /= sum;
  }
  return model;
}

std::string format_sig9(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.9g", value);
  return buffer;
}

ojson matrix_to_json(const DenseMatrix& m) {
  ojson rows = ojson::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    ojson row = ojson::array();
    for (const double v : m.row(r)) row.push_back(std::stod(format_sig9(v)));
    rows.push_back(std::move(row));
  }
  return rows;
}

DenseMatrix matrix_from_json(const nlohmann::json& j, const char* name) {
  if (!j.is_array()) throw SchemaError(name, std::string(name) + " must be an array of rows");
  const std::size_t rows = j.size();
  const std::size_t cols = rows ? j[0].size() : 0;
  DenseMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) {
      throw SchemaError(name, std::string(name) + " row " + std::to_string(r) + " has the wrong length");
    }
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = j[r][c].get<double>();
  }
  return m;
}

void check_topic(const TopicModel& model, int topic) {
  if (topic < 0 || topic >= model.num_topics) {
    throw ArgumentError("topic index " + std::to_string(topic) + " outside [0, " +
                        std::to_string(model.num_topics) + ")");
  }
}

}  // namespace

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) throw ArgumentError("matrix shapes differ");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

std::string_view to_string(ModelVariant variant) {
  switch (variant) {
    case ModelVariant::Plain:
      return "plain";
    case ModelVariant::Tfidf:
      return "tfidf";
    case ModelVariant::Guided:
      return "guided";
  }
  return "plain";
}

ModelVariant parse_model_variant(std::string_view name) {
  if (name == "plain") return ModelVariant::Plain;
  if (name == "tfidf") return ModelVariant::Tfidf;
  if (name == "guided") return ModelVariant::Guided;
  throw ArgumentError("unknown model variant '" + std::string(name) + "' (expected plain, tfidf or guided)");
}

std::string_view to_string(SeedSource source) {
  return source == SeedSource::HeadlineTfidf ? "headline-tfidf" : "risk-lexicon";
}

void PriorBoost::set(std::size_t topic, TermId term, double value) {
  if (topic >= rows_.size()) throw ArgumentError("boost topic index out of range");
  auto& row = rows_[topic];
  const auto it = row.find(term);
  if (it != row.end()) totals_[topic] -= it->second;
  if (value == 0.0) {
    if (it != row.end()) row.erase(it);
  } else {
    row[term] = value;
    totals_[topic] += value;
  }
}

double PriorBoost::at(std::size_t topic, TermId term) const {
  if (topic >= rows_.size()) return 0.0;
  const auto it = rows_[topic].find(term);
  return it == rows_[topic].end() ? 0.0 : it->second;
}

bool PriorBoost::empty() const {
  return std::all_of(rows_.begin(), rows_.end(), [](const auto& r) { return r.empty(); });
}

std::string TopicModel::label(int topic) const {
  if (topic >= 0 && static_cast<std::size_t>(topic) < labels.size() && !labels[topic].empty()) {
    return labels[topic];
  }
  return "Topic " + std::to_string(topic);
}

std::size_t SeedSet::size() const {
  std::size_t n = 0;
  for (const auto& t : topics) n += t.size();
  return n;
}

RiskLexicon RiskLexicon::parse(std::string_view json_text) {
  const auto j = ojson::parse(json_text);
  const auto& cats = j.contains("categories") ? j["categories"] : j;
  if (!cats.is_object()) throw SchemaError("categories", "risk lexicon must map category names to term lists");
  RiskLexicon lexicon;
  for (const auto& [name, terms] : cats.items()) {
    if (!terms.is_array()) throw SchemaError(name, "category '" + name + "' must be a list of terms");
    std::vector<std::string> list;
    for (const auto& t : terms) list.push_back(t.get<std::string>());
    lexicon.categories.emplace_back(name, std::move(list));
  }
  if (lexicon.categories.empty()) throw SchemaError("categories", "risk lexicon is empty");
  return lexicon;
}

RiskLexicon RiskLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open risk lexicon '" + path.string() + "'");
  return parse(std::string{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()});
}

TopicHints parse_topic_hints(std::string_view json_text) {
  const auto j = nlohmann::json::parse(json_text);
  if (!j.is_object()) throw SchemaError("hints", "topic hints must be a JSON object");
  TopicHints hints;
  for (const auto& [key, value] : j.items()) {
    if (!value.is_number_integer()) throw SchemaError(key, "topic hint '" + key + "' must be an integer");
    hints.emplace(key, value.get<int>());
  }
  return hints;
}

TopicHints load_topic_hints(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open topic hints '" + path.string() + "'");
  return parse_topic_hints(std::string{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()});
}

std::vector<double> conditional_distribution(std::size_t doc, TermId word, const TopicCounts& counts,
                                             double alpha, double beta, const PriorBoost* boost) {
  const std::size_t K = counts.topic_total.size();
  const std::size_t V = counts.topic_term.cols();
  if (K == 0) throw ArgumentError("counts have no topics");
  if (doc >= counts.doc_topic.rows() || word >= V) throw ArgumentError("doc or word index out of range");
  const double v_beta = static_cast<double>(V) * beta;
  std::vector<double> p(K);
  double total = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    const double b = boost ? boost->at(k, word) : 0.0;
    const double b_total = boost ? boost->total(k) : 0.0;
    p[k] = (counts.doc_topic(doc, k) + alpha) * (counts.topic_term(k, word) + beta + b) /
           (counts.topic_total[k] + v_beta + b_total);
    total += p[k];
  }
  for (auto& v : p) v /= total;
  return p;
}

TopicModel fit_lda(const DocTermMatrix& matrix, const LdaOptions& options) {
  validate(matrix, options);
  SamplerSetup setup{static_cast<std::size_t>(options.num_topics), options.resolved_alpha(), options.beta, {}, {}, {}};
  auto model = run_sampler(matrix, options, setup);
  model.variant = matrix.kind == WeightKind::Tfidf ? ModelVariant::Tfidf : ModelVariant::Plain;
  return model;
}

TopicModel fit_guided_lda(const DocTermMatrix& matrix, const SeedSet& seeds, const LdaOptions& options,
                          const GuidedOptions& guided) {
  validate(matrix, options);
  const auto K = static_cast<std::size_t>(options.num_topics);
  const std::size_t V = matrix.vocab_size;
  if (seeds.empty()) throw ArgumentError("guided fit requires a non-empty seed set");
  if (guided.boost < 0.0) throw ArgumentError("boost must be non-negative");
  if (guided.seed_confidence < 0.0 || guided.seed_confidence > 1.0) {
    throw ArgumentError("seed_confidence must lie in [0, 1]");
  }
  for (std::size_t k = 0; k < seeds.topics.size(); ++k) {
    if (seeds.topics[k].empty()) continue;
    if (k >= K) {
      throw ArgumentError("seed topic index " + std::to_string(k) + " >= K=" + std::to_string(K));
    }
    for (const auto& s : seeds.topics[k]) {
      if (s.id >= V) throw ArgumentError("seed term '" + s.term + "' outside vocabulary");
    }
  }

  SamplerSetup setup{K, options.resolved_alpha(), options.beta, {}, {}, {}};
  PriorBoost prior(K);
  if (guided.prior_boost && guided.boost > 0.0) {
    setup.boost.assign(K * V, 0.0);
    setup.boost_total.assign(K, 0.0);
    for (std::size_t k = 0; k < seeds.topics.size(); ++k) {
      for (const auto& s : seeds.topics[k]) {
        setup.boost[k * V + s.id] = guided.boost;
        prior.set(k, s.id, guided.boost);
      }
    }
    for (std::size_t k = 0; k < K; ++k) setup.boost_total[k] = prior.total(k);
  }

  if (guided.biased_init) {
    // A term seeded into several topics shares the confident mass among them.
    std::map<TermId, std::vector<std::size_t>> seeded;
    for (std::size_t k = 0; k < seeds.topics.size(); ++k) {
      for (const auto& s : seeds.topics[k]) seeded[s.id].push_back(k);
    }
    const double uniform = 1.0 / static_cast<double>(K);
    for (const auto& [term, topics] : seeded) {
      std::vector<double> q(K, 0.0);
      const double m = static_cast<double>(topics.size());
      const double rest = K > topics.size() ? (1.0 - guided.seed_confidence) / (K - m) : 0.0;
      for (auto& v : q) v = rest;
      for (const auto k : topics) q[k] = K > topics.size() ? guided.seed_confidence / m : 1.0 / m;
      const bool is_uniform =
          std::all_of(q.begin(), q.end(), [&](double v) { return std::abs(v - uniform) <= 1e-12; });
      if (!is_uniform) setup.init.emplace(term, std::move(q));
    }
  }

  auto model = run_sampler(matrix, options, setup);
  model.variant = ModelVariant::Guided;
  model.beta_boost = std::move(prior);
  return model;
}

std::vector<TermId> top_word_ids(const TopicModel& model, const Vocabulary& vocab, int topic, int n) {
  check_topic(model, topic);
  if (n <= 0) throw ArgumentError("top_words: n must be positive");
  if (model.phi.cols() != vocab.size()) throw ArgumentError("model and vocabulary sizes differ");
  const auto row = model.phi.row(static_cast<std::size_t>(topic));
  std::vector<TermId> order(vocab.size());
  for (TermId i = 0; i < order.size(); ++i) order[i] = i;
  const auto count = std::min<std::size_t>(order.size(), static_cast<std::size_t>(n));
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count), order.end(),
                    [&](TermId a, TermId b) {
                      if (row[a] != row[b]) return row[a] > row[b];
                      return vocab.term(a) < vocab.term(b);
                    });
  order.resize(count);
  return order;
}

std::vector<std::pair<std::string, double>> top_words(const TopicModel& model, const Vocabulary& vocab,
                                                      int topic, int n) {
  std::vector<std::pair<std::string, double>> out;
  for (const auto id : top_word_ids(model, vocab, topic, n)) {
    out.emplace_back(vocab.term(id), model.phi(static_cast<std::size_t>(topic), id));
  }
  return out;
}

std::pair<int, double> dominant_topic(std::span<const double> theta_row) {
  if (theta_row.empty()) throw ArgumentError("dominant_topic: empty row");
  std::size_t best = 0;
  for (std::size_t k = 1; k < theta_row.size(); ++k) {
    if (theta_row[k] > theta_row[best]) best = k;
  }
  return {static_cast<int>(best), theta_row[best]};
}

std::vector<double> umass_coherence(const TopicModel& model, const Vocabulary& vocab,
                                    const DocTermMatrix& matrix, int n, double epsilon) {
  std::vector<std::vector<TermId>> docs;
  docs.reserve(matrix.rows.size());
  for (const auto& row : matrix.rows) {
    std::vector<TermId> ids;
    for (const auto& e : row) {
      if (e.count > 0 || e.weight > 0.0) ids.push_back(e.term);
    }
    std::sort(ids.begin(), ids.end());
    docs.push_back(std::move(ids));
  }
  auto has = [](const std::vector<TermId>& ids, TermId t) {
    return std::binary_search(ids.begin(), ids.end(), t);
  };

  std::vector<double> scores;
  for (int k = 0; k < model.num_topics; ++k) {
    const auto top = top_word_ids(model, vocab, k, n);
    double score = 0.0;
    for (std::size_t m = 1; m < top.size(); ++m) {
      for (std::size_t l = 0; l < m; ++l) {
        double d_l = 0.0;
        double d_ml = 0.0;
        for (const auto& ids : docs) {
          if (!has(ids, top[l])) continue;
          d_l += 1.0;
          if (has(ids, top[m])) d_ml += 1.0;
        }
        if (d_l == 0.0) continue;
        score += std::log((d_ml + epsilon) / d_l);
      }
    }
    scores.push_back(score);
  }
  return scores;
}

SeedSet build_seed_set(std::span<const std::string> headline_terms, const RiskLexicon& lexicon,
                       int num_topics, const TopicHints& hints, const Vocabulary& vocab) {
  if (num_topics < 1) throw ArgumentError("number of topics must be at least 1");
  for (const auto& [key, topic] : hints) {
    if (topic < 0 || topic >= num_topics) {
      throw ArgumentError("topic hint '" + key + "' -> " + std::to_string(topic) + " outside [0, " +
                          std::to_string(num_topics) + ")");
    }
  }

  SeedSet seeds;
  seeds.topics.resize(static_cast<std::size_t>(num_topics));
  std::set<std::pair<int, std::string>> added;

  auto add = [&](int topic, const std::string& term, SeedSource source) {
    const auto id = vocab.id(term);
    if (!id) {
      seeds.warnings.push_back("dropped seed '" + term + "' (" + std::string(to_string(source)) +
                               "): not in vocabulary");
      return;
    }
    if (added.emplace(topic, term).second) {
      seeds.topics[static_cast<std::size_t>(topic)].push_back({term, *id, source});
    }
  };

  auto category_topic = [&](const std::string& term) -> std::optional<int> {
    for (const auto& [name, terms] : lexicon.categories) {
      const auto hint = hints.find(name);
      if (hint == hints.end()) continue;
      if (std::find(terms.begin(), terms.end(), term) != terms.end()) return hint->second;
    }
    return std::nullopt;
  };

  for (const auto& term : headline_terms) {
    std::optional<int> topic;
    if (const auto it = hints.find(term); it != hints.end()) {
      topic = it->second;
    } else if (const auto cat = category_topic(term)) {
      topic = cat;
    } else if (const auto fallback = hints.find("headline"); fallback != hints.end()) {
      topic = fallback->second;
    }
    if (!topic) {
      seeds.warnings.push_back("dropped headline term '" + term + "': no topic hint");
      continue;
    }
    add(*topic, term, SeedSource::HeadlineTfidf);
  }
  for (const auto& [name, terms] : lexicon.categories) {
    const auto hint = hints.find(name);
    if (hint == hints.end()) continue;
    for (const auto& term : terms) add(hint->second, term, SeedSource::RiskLexicon);
  }

  if (seeds.empty()) throw ArgumentError("seed set is empty: no hinted term is in the vocabulary");
  for (auto& topic : seeds.topics) {
    std::sort(topic.begin(), topic.end(), [](const SeedTerm& a, const SeedTerm& b) { return a.term < b.term; });
  }
  return seeds;
}

void write_model_json(const TopicModel& model, std::ostream& out) {
  ojson j;
  j["variant"] = std::string(to_string(model.variant));
  j["weighting"] = std::string(to_string(model.weighting));
  j["num_topics"] = model.num_topics;
  j["alpha"] = model.alpha;
  j["beta"] = model.beta;
  j["rng_seed"] = model.rng_seed;
  j["iterations"] = model.iterations;
  j["burn_in"] = model.burn_in;
  j["sample_lag"] = model.sample_lag;
  j["vocabulary_hash"] = model.vocabulary_hash;
  j["labels"] = model.labels;
  j["doc_ids"] = model.doc_ids;
  ojson boost = ojson::array();
  for (std::size_t k = 0; k < model.beta_boost.num_topics(); ++k) {
    for (const auto& [term, value] : model.beta_boost.row(k)) boost.push_back({k, term, value});
  }
  j["beta_boost"] = std::move(boost);
  j["phi"] = matrix_to_json(model.phi);
  j["theta"] = matrix_to_json(model.theta);
  out << j.dump() << '\n';
}

TopicModel read_model_json(std::istream& in) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("", std::string("malformed model JSON: ") + e.what());
  }
  TopicModel model;
  try {
    model.variant = parse_model_variant(j.at("variant").get<std::string>());
    model.weighting = j.at("weighting").get<std::string>() == "tfidf" ? WeightKind::Tfidf : WeightKind::Counts;
    model.num_topics = j.at("num_topics").get<int>();
    model.alpha = j.at("alpha").get<double>();
    model.beta = j.at("beta").get<double>();
    model.rng_seed = j.at("rng_seed").get<std::uint64_t>();
    model.iterations = j.at("iterations").get<int>();
    model.burn_in = j.at("burn_in").get<int>();
    model.sample_lag = j.value("sample_lag", 10);
    model.vocabulary_hash = j.value("vocabulary_hash", "");
    model.labels = j.value("labels", std::vector<std::string>{});
    model.doc_ids = j.value("doc_ids", std::vector<std::string>{});
    model.phi = matrix_from_json(j.at("phi"), "phi");
    model.theta = matrix_from_json(j.at("theta"), "theta");
    model.beta_boost = PriorBoost(static_cast<std::size_t>(model.num_topics));
    for (const auto& e : j.value("beta_boost", nlohmann::json::array())) {
      model.beta_boost.set(e.at(0).get<std::size_t>(), e.at(1).get<TermId>(), e.at(2).get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("", std::string("invalid model JSON: ") + e.what());
  }
  if (model.phi.rows() != static_cast<std::size_t>(model.num_topics) ||
      model.theta.cols() != static_cast<std::size_t>(model.num_topics)) {
    throw SchemaError("phi", "matrix shapes disagree with num_topics");
  }
  return model;
}

void write_seed_set_json(const SeedSet& seeds, std::ostream& out) {
  ojson topics = ojson::array();
  for (std::size_t k = 0; k < seeds.topics.size(); ++k) {
    ojson terms = ojson::array();
    for (const auto& s : seeds.topics[k]) {
      terms.push_back({{"term", s.term}, {"id", s.id}, {"source", std::string(to_string(s.source))}});
    }
    topics.push_back({{"topic", k}, {"terms", std::move(terms)}});
  }
  ojson j;
  j["topics"] = std::move(topics);
  j["warnings"] = seeds.warnings;
  out << j.dump(2) << '\n';
}

}  // namespace agrisk
