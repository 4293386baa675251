#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace agrisk {

/// Calendar date. Only complete `YYYY-MM-DD` values are accepted.
struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  static std::optional<Date> parse(std::string_view text);
  std::string to_string() const;

  auto operator<=>(const Date&) const = default;
};

struct Document {
  std::string id;
  std::string title;
  std::string content;
  Date published;
  std::string source;

  bool operator==(const Document&) const = default;
};

struct SourceDescriptor {
  std::string path;
  std::string format;
  std::size_t documents = 0;

  bool operator==(const SourceDescriptor&) const = default;
};

enum class CorpusFormat { Csv, Jsonl };

std::string_view to_string(CorpusFormat format);
CorpusFormat parse_corpus_format(std::string_view name);
/// Picks the format from a `.csv` / `.jsonl` extension.
CorpusFormat corpus_format_for(const std::filesystem::path& path);

/// Ordered, id-unique collection of documents. Immutable after construction.
class Corpus {
 public:
  Corpus() = default;
  /// Validates every document; throws DuplicateIdError or ValidationError.
  explicit Corpus(std::vector<Document> documents, std::vector<SourceDescriptor> provenance = {});

  const std::vector<Document>& documents() const noexcept { return documents_; }
  const std::vector<SourceDescriptor>& provenance() const noexcept { return provenance_; }
  std::size_t size() const noexcept { return documents_.size(); }
  bool empty() const noexcept { return documents_.empty(); }
  const Document& operator[](std::size_t i) const { return documents_[i]; }

  const Document* find(std::string_view id) const;
  std::optional<std::size_t> index_of(std::string_view id) const;

  auto begin() const noexcept { return documents_.begin(); }
  auto end() const noexcept { return documents_.end(); }

 private:
  std::vector<Document> documents_;
  std::vector<SourceDescriptor> provenance_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// RFC 4180 record reader. Accepts CRLF or LF line endings and strips a
/// leading UTF-8 byte order mark.
std::vector<std::vector<std::string>> parse_csv(std::istream& in);
void write_csv_field(std::ostream& out, std::string_view field);

Corpus read_csv_corpus(std::istream& in, const std::string& source_name = "<stream>");
Corpus read_jsonl_corpus(std::istream& in, const std::string& source_name = "<stream>");
Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format);

/// Canonical form: one JSON object per line, keys in declaration order.
void write_jsonl_corpus(const Corpus& corpus, std::ostream& out);
void write_csv_corpus(const Corpus& corpus, std::ostream& out);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path,
                 CorpusFormat format = CorpusFormat::Jsonl);

/// Documents with from <= published <= to, in original order.
Corpus filter_by_date(const Corpus& corpus, Date from, Date to);

}  // namespace agrisk
