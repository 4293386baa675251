#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "agrisk/corpus.hpp"

namespace agrisk {

/// Lowercases every cased letter; other code points pass through unchanged.
std::string normalize_case(std::string_view text);

/// Token with its byte range in the source text.
struct TokenSpan {
  std::string text;
  std::size_t begin = 0;
  std::size_t end = 0;
};

/// Splits on whitespace and punctuation. Hyphens and apostrophes between
/// word characters stay inside the token ("drought-resistant", "don't").
std::vector<TokenSpan> tokenize_with_offsets(std::string_view text);
std::vector<std::string> tokenize(std::string_view text);

/// Abbreviations that never end a sentence ("Dr.", "U.S.", "e.g.", ...).
const std::vector<std::string>& default_abbreviations();

/// Splits after '.', '!' or '?' when whitespace and a capital letter follow.
/// Sentences are whitespace-trimmed substrings of `text`, in order.
std::vector<std::string> segment_sentences(std::string_view text);
std::vector<std::string> segment_sentences(std::string_view text,
                                           const std::unordered_set<std::string>& abbreviations);

class Stoplist {
 public:
  Stoplist() = default;
  explicit Stoplist(std::unordered_set<std::string> words) : words_(std::move(words)) {}

  /// One word per line; blank lines and '#' comments are skipped.
  static Stoplist load(const std::filesystem::path& path);

  bool contains(std::string_view word) const { return words_.contains(std::string(word)); }
  std::size_t size() const noexcept { return words_.size(); }

 private:
  std::unordered_set<std::string> words_;
};

/// Inflected form -> lemma lookup, backed by a TSV file.
class LemmaTable {
 public:
  LemmaTable() = default;
  explicit LemmaTable(std::unordered_map<std::string, std::string> entries);

  static LemmaTable load(const std::filesystem::path& path);

  const std::string* find(std::string_view word) const;
  /// True if `word` is the lemma of at least one entry.
  bool is_lemma(std::string_view word) const { return lemmas_.contains(std::string(word)); }
  std::size_t size() const noexcept { return entries_.size(); }
  const std::unordered_map<std::string, std::string>& entries() const noexcept { return entries_; }

 private:
  std::unordered_map<std::string, std::string> entries_;
  std::unordered_set<std::string> lemmas_;
};

/// Table lookup, then the suffix fallback (-ies, -es, -s, -ing, -ed).
/// `token` must already be lowercase.
std::string lemmatize(std::string_view token, const LemmaTable& table);

/// Drops stopwords, tokens without a letter, and single-character tokens.
std::vector<std::string> remove_noise(std::span<const std::string> tokens, const Stoplist& stoplist);

struct ProcessedDocument {
  std::string doc_id;
  std::vector<std::string> tokens;
  std::vector<std::string> sentences;
  std::vector<std::string> title_tokens;

  bool operator==(const ProcessedDocument&) const = default;
};

/// Stoplist and lemma table bundled as the text normalization pipeline.
class TextPipeline {
 public:
  TextPipeline() = default;
  TextPipeline(Stoplist stoplist, LemmaTable lemmas)
      : stoplist_(std::move(stoplist)), lemmas_(std::move(lemmas)) {}

  static TextPipeline load(const std::filesystem::path& stopwords,
                           const std::filesystem::path& lemmas);

  /// normalize_case -> tokenize -> remove_noise -> lemmatize -> remove_noise.
  std::vector<std::string> terms(std::string_view text) const;
  /// Term for a single raw token, or empty if the token is noise.
  std::string term_for(std::string_view raw_token) const;

  const Stoplist& stoplist() const noexcept { return stoplist_; }
  const LemmaTable& lemmas() const noexcept { return lemmas_; }

 private:
  Stoplist stoplist_;
  LemmaTable lemmas_;
};

ProcessedDocument preprocess_document(const Document& doc, const TextPipeline& pipeline);

}  // namespace agrisk
