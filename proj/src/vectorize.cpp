#include "agrisk/vectorize.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "agrisk/error.hpp"

namespace agrisk {
namespace {

struct TermStats {
  std::size_t df = 0;
  std::size_t total = 0;
};

std::string format_weight(double w) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", w);
  return buffer;
}

}  // namespace

Vocabulary::Vocabulary(std::vector<std::string> terms, std::vector<std::size_t> df)
    : terms_(std::move(terms)), df_(std::move(df)) {
  if (df_.size() != terms_.size()) throw ArgumentError("vocabulary terms and df differ in length");
  index_.reserve(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (!index_.emplace(terms_[i], static_cast<TermId>(i)).second) {
      throw ArgumentError("duplicate vocabulary term '" + terms_[i] + "'");
    }
  }
}

std::optional<TermId> Vocabulary::id(std::string_view term) const {
  const auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Vocabulary build_vocabulary(std::span<const std::vector<std::string>> documents,
                            const VocabularyOptions& options) {
  if (documents.empty()) throw ArgumentError("cannot build a vocabulary from an empty corpus");

  // Ordered map keeps the first pass independent of document order.
  std::map<std::string, TermStats, std::less<>> stats;
  for (const auto& tokens : documents) {
    std::vector<std::string_view> seen(tokens.begin(), tokens.end());
    std::sort(seen.begin(), seen.end());
    for (std::size_t i = 0; i < seen.size(); ++i) {
      auto it = stats.find(seen[i]);
      if (it == stats.end()) it = stats.emplace(std::string(seen[i]), TermStats{}).first;
      ++it->second.total;
      if (i == 0 || seen[i] != seen[i - 1]) ++it->second.df;
    }
  }

  const double n_docs = static_cast<double>(documents.size());
  struct Candidate {
    const std::string* term;
    TermStats stats;
  };
  std::vector<Candidate> kept;
  for (const auto& [term, s] : stats) {
    if (s.df < options.min_df) continue;
    if (static_cast<double>(s.df) / n_docs > options.max_df_ratio) continue;
    kept.push_back({&term, s});
  }
  if (kept.empty()) {
    throw EmptyVocabularyError("no term satisfies min_df=" + std::to_string(options.min_df) +
                               " and max_df_ratio=" + format_weight(options.max_df_ratio) +
                               " over " + std::to_string(documents.size()) + " documents");
  }

  const bool by_total = options.ranking == FrequencyRanking::TotalFrequency;
  std::sort(kept.begin(), kept.end(), [by_total](const Candidate& a, const Candidate& b) {
    const auto ka = by_total ? a.stats.total : a.stats.df;
    const auto kb = by_total ? b.stats.total : b.stats.df;
    if (ka != kb) return ka > kb;
    return *a.term < *b.term;
  });
  if (kept.size() > options.max_terms) kept.resize(options.max_terms);

  std::vector<std::string> terms;
  std::vector<std::size_t> df;
  terms.reserve(kept.size());
  df.reserve(kept.size());
  for (const auto& c : kept) {
    terms.push_back(*c.term);
    df.push_back(c.stats.df);
  }
  return Vocabulary(std::move(terms), std::move(df));
}

Vocabulary build_vocabulary(std::span<const ProcessedDocument> documents,
                            const VocabularyOptions& options) {
  std::vector<std::vector<std::string>> tokens;
  tokens.reserve(documents.size());
  for (const auto& doc : documents) tokens.push_back(doc.tokens);
  return build_vocabulary(tokens, options);
}

std::string_view to_string(WeightKind kind) { return kind == WeightKind::Counts ? "counts" : "tfidf"; }

SparseRow to_bow(std::span<const std::string> tokens, const Vocabulary& vocab) {
  std::map<TermId, std::uint32_t> counts;
  for (const auto& token : tokens) {
    if (const auto id = vocab.id(token)) ++counts[*id];
  }
  SparseRow row;
  row.reserve(counts.size());
  for (const auto& [id, count] : counts) row.push_back({id, static_cast<double>(count), count});
  return row;
}

DocTermMatrix build_count_matrix(std::span<const std::vector<std::string>> documents,
                                 const Vocabulary& vocab, std::vector<std::string> doc_ids) {
  DocTermMatrix matrix;
  matrix.kind = WeightKind::Counts;
  matrix.vocab_size = vocab.size();
  matrix.rows.reserve(documents.size());
  for (const auto& tokens : documents) matrix.rows.push_back(to_bow(tokens, vocab));
  if (doc_ids.empty()) {
    for (std::size_t i = 0; i < documents.size(); ++i) doc_ids.push_back(std::to_string(i));
  }
  if (doc_ids.size() != documents.size()) throw ArgumentError("doc_ids length mismatch");
  matrix.doc_ids = std::move(doc_ids);
  return matrix;
}

DocTermMatrix build_count_matrix(std::span<const ProcessedDocument> documents,
                                 const Vocabulary& vocab) {
  std::vector<std::vector<std::string>> tokens;
  std::vector<std::string> ids;
  for (const auto& doc : documents) {
    tokens.push_back(doc.tokens);
    ids.push_back(doc.doc_id);
  }
  return build_count_matrix(tokens, vocab, std::move(ids));
}

DocTermMatrix tfidf_transform(const DocTermMatrix& counts) {
  if (counts.kind != WeightKind::Counts) throw ArgumentError("tfidf_transform expects a count matrix");

  std::vector<std::size_t> df(counts.vocab_size, 0);
  for (const auto& row : counts.rows) {
    for (const auto& entry : row) {
      if (entry.term >= counts.vocab_size) throw ArgumentError("term id outside vocabulary");
      ++df[entry.term];
    }
  }
  const double n_docs = static_cast<double>(counts.n_docs());
  std::vector<double> idf(counts.vocab_size);
  for (std::size_t t = 0; t < idf.size(); ++t) {
    idf[t] = std::log((1.0 + n_docs) / (1.0 + static_cast<double>(df[t]))) + 1.0;
  }

  DocTermMatrix out = counts;
  out.kind = WeightKind::Tfidf;
  for (auto& row : out.rows) {
    double norm_sq = 0.0;
    for (auto& entry : row) {
      entry.weight = static_cast<double>(entry.count) * idf[entry.term];
      norm_sq += entry.weight * entry.weight;
    }
    if (norm_sq > 0.0) {
      const double norm = std::sqrt(norm_sq);
      for (auto& entry : row) entry.weight /= norm;
    }
  }
  return out;
}

std::vector<std::pair<std::string, double>> top_terms_by_tfidf(const DocTermMatrix& matrix,
                                                               const Vocabulary& vocab, int n) {
  if (n <= 0) throw ArgumentError("top_terms_by_tfidf: n must be positive");
  if (matrix.kind != WeightKind::Tfidf) throw ArgumentError("top_terms_by_tfidf expects a tfidf matrix");
  if (matrix.vocab_size != vocab.size()) throw ArgumentError("matrix and vocabulary sizes differ");

  std::vector<double> totals(vocab.size(), 0.0);
  for (const auto& row : matrix.rows) {
    for (const auto& entry : row) totals[entry.term] += entry.weight;
  }
  std::vector<TermId> order(vocab.size());
  for (TermId i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](TermId a, TermId b) {
    if (totals[a] != totals[b]) return totals[a] > totals[b];
    return vocab.term(a) < vocab.term(b);
  });
  order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(n)));

  std::vector<std::pair<std::string, double>> out;
  out.reserve(order.size());
  for (const auto id : order) out.emplace_back(vocab.term(id), totals[id]);
  return out;
}

void write_triplets(const DocTermMatrix& matrix, const Vocabulary& vocab, std::ostream& out) {
  for (std::size_t d = 0; d < matrix.rows.size(); ++d) {
    const auto& doc_id = d < matrix.doc_ids.size() ? matrix.doc_ids[d] : std::to_string(d);
    for (const auto& entry : matrix.rows[d]) {
      out << doc_id << '\t' << vocab.term(entry.term) << '\t';
      if (matrix.kind == WeightKind::Counts) {
        out << entry.count;
      } else {
        out << format_weight(entry.weight);
      }
      out << '\n';
    }
  }
}

void write_vocabulary(const Vocabulary& vocab, std::ostream& out) {
  for (TermId i = 0; i < vocab.size(); ++i) {
    out << i << '\t' << vocab.term(i) << '\t' << vocab.df(i) << '\n';
  }
}

Vocabulary read_vocabulary(std::istream& in) {
  std::vector<std::string> terms;
  std::vector<std::size_t> df;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string id_text, term, df_text;
    if (!std::getline(fields, id_text, '\t') || !std::getline(fields, term, '\t') ||
        !std::getline(fields, df_text)) {
      throw ValidationError(line_no, "vocabulary line must be 'id\\tterm\\tdf'");
    }
    if (std::stoul(id_text) != terms.size()) {
      throw ValidationError(line_no, "vocabulary ids must be dense and ascending");
    }
    terms.push_back(term);
    df.push_back(std::stoul(df_text));
  }
  return Vocabulary(std::move(terms), std::move(df));
}

}  // namespace agrisk
