#include "agrisk/corpus.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <istream>
#include <iterator>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "agrisk/error.hpp"

namespace agrisk {
namespace {

constexpr std::array<std::string_view, 5> kRequiredFields = {"id", "title", "content", "published",
                                                             "source"};

bool is_leap(int year) { return (year % 4 == 0 && year % 100 != 0) || year % 400 == 0; }

int days_in_month(int year, int month) {
  static constexpr std::array<int, 12> kDays = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return month == 2 && is_leap(year) ? 29 : kDays[month - 1];
}

bool is_blank(std::string_view text) {
  return std::all_of(text.begin(), text.end(), [](unsigned char c) { return std::isspace(c); });
}

Document make_document(std::size_t row, std::string id, std::string title, std::string content,
                       std::string_view published, std::string source) {
  auto date = Date::parse(published);
  if (!date) {
    throw ValidationError(row, "invalid published date '" + std::string(published) +
                                   "' (expected YYYY-MM-DD)");
  }
  return Document{std::move(id), std::move(title), std::move(content), *date, std::move(source)};
}

Corpus build_corpus(std::vector<Document> documents, SourceDescriptor source) {
  source.documents = documents.size();
  return Corpus(std::move(documents), {std::move(source)});
}

}  // namespace

std::optional<Date> Date::parse(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto number = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
    int value = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
      if (text[i] < '0' || text[i] > '9') return std::nullopt;
      value = value * 10 + (text[i] - '0');
    }
    return value;
  };
  const auto year = number(0, 4);
  const auto month = number(5, 2);
  const auto day = number(8, 2);
  if (!year || !month || !day) return std::nullopt;
  if (*month < 1 || *month > 12) return std::nullopt;
  if (*day < 1 || *day > days_in_month(*year, *month)) return std::nullopt;
  return Date{*year, *month, *day};
}

std::string Date::to_string() const {
  char buffer[16];
  std::snprintf(buffer, sizeof buffer, "%04d-%02d-%02d", year, month, day);
  return buffer;
}

std::string_view to_string(CorpusFormat format) {
  return format == CorpusFormat::Csv ? "csv" : "jsonl";
}

CorpusFormat parse_corpus_format(std::string_view name) {
  if (name == "csv") return CorpusFormat::Csv;
  if (name == "jsonl") return CorpusFormat::Jsonl;
  throw ArgumentError("unknown corpus format '" + std::string(name) + "' (expected csv or jsonl)");
}

CorpusFormat corpus_format_for(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext == ".csv") return CorpusFormat::Csv;
  if (ext == ".jsonl" || ext == ".ndjson") return CorpusFormat::Jsonl;
  throw ArgumentError("cannot infer corpus format from '" + path.string() + "'");
}

Corpus::Corpus(std::vector<Document> documents, std::vector<SourceDescriptor> provenance)
    : documents_(std::move(documents)), provenance_(std::move(provenance)) {
  index_.reserve(documents_.size());
  for (std::size_t i = 0; i < documents_.size(); ++i) {
    const auto& doc = documents_[i];
    if (doc.id.empty()) throw ValidationError(i + 1, "empty id");
    if (is_blank(doc.content)) throw ValidationError(i + 1, "empty content");
    if (!index_.emplace(doc.id, i).second) throw DuplicateIdError(doc.id);
  }
}

const Document* Corpus::find(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &documents_[it->second];
}

std::optional<std::size_t> Corpus::index_of(std::string_view id) const {
  const auto it = index_.find(std::string(id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
  std::string data{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  std::size_t pos = 0;
  if (data.compare(0, 3, "\xEF\xBB\xBF") == 0) pos = 3;

  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };

  while (pos < data.size()) {
    const char c = data[pos];
    if (in_quotes) {
      if (c == '"') {
        if (pos + 1 < data.size() && data[pos + 1] == '"') {
          field.push_back('"');
          pos += 2;
          continue;
        }
        in_quotes = false;
      } else {
        field.push_back(c);
      }
      ++pos;
      continue;
    }
    switch (c) {
      case '"':
        if (!field_started && field.empty()) {
          in_quotes = true;
          field_started = true;
        } else {
          field.push_back(c);
        }
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (pos + 1 < data.size() && data[pos + 1] == '\n') ++pos;
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        field.push_back(c);
        field_started = true;
    }
    ++pos;
  }
  if (in_quotes) throw SchemaError("", "unterminated quoted field at end of CSV input");
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

void write_csv_field(std::ostream& out, std::string_view field) {
  const bool needs_quotes = field.find_first_of(",\"\r\n") != std::string_view::npos;
  if (!needs_quotes) {
    out << field;
    return;
  }
  out << '"';
  for (char c : field) {
    if (c == '"') out << '"';
    out << c;
  }
  out << '"';
}

Corpus read_csv_corpus(std::istream& in, const std::string& source_name) {
  auto records = parse_csv(in);
  if (records.empty()) throw SchemaError("", "CSV input has no header row");

  const auto& header = records.front();
  std::array<std::size_t, kRequiredFields.size()> column{};
  for (std::size_t f = 0; f < kRequiredFields.size(); ++f) {
    const auto it = std::find(header.begin(), header.end(), kRequiredFields[f]);
    if (it == header.end()) {
      throw SchemaError(std::string(kRequiredFields[f]),
                        "missing required column '" + std::string(kRequiredFields[f]) + "'");
    }
    column[f] = static_cast<std::size_t>(it - header.begin());
  }

  std::vector<Document> documents;
  documents.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    auto& rec = records[r];
    // A trailing blank line shows up as a single empty field.
    if (rec.size() == 1 && rec[0].empty()) continue;
    if (rec.size() < header.size()) {
      throw ValidationError(r, "expected " + std::to_string(header.size()) + " fields, found " +
                                   std::to_string(rec.size()));
    }
    auto doc = make_document(r, std::move(rec[column[0]]), std::move(rec[column[1]]),
                             std::move(rec[column[2]]), rec[column[3]], std::move(rec[column[4]]));
    if (doc.id.empty()) throw ValidationError(r, "empty id");
    if (is_blank(doc.content)) throw ValidationError(r, "empty content");
    documents.push_back(std::move(doc));
  }
  return build_corpus(std::move(documents), {source_name, "csv", 0});
}

Corpus read_jsonl_corpus(std::istream& in, const std::string& source_name) {
  std::vector<Document> documents;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;
    nlohmann::json obj;
    try {
      obj = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError(line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!obj.is_object()) throw ValidationError(line_no, "expected a JSON object");
    for (auto key : kRequiredFields) {
      const auto it = obj.find(std::string(key));
      if (it == obj.end()) {
        throw SchemaError(std::string(key), "line " + std::to_string(line_no) +
                                                ": missing required key '" + std::string(key) + "'");
      }
      if (!it->is_string()) {
        throw ValidationError(line_no, "key '" + std::string(key) + "' must be a string");
      }
    }
    auto doc = make_document(line_no, obj["id"].get<std::string>(), obj["title"].get<std::string>(),
                             obj["content"].get<std::string>(),
                             obj["published"].get_ref<const std::string&>(),
                             obj["source"].get<std::string>());
    if (doc.id.empty()) throw ValidationError(line_no, "empty id");
    if (is_blank(doc.content)) throw ValidationError(line_no, "empty content");
    documents.push_back(std::move(doc));
  }
  return build_corpus(std::move(documents), {source_name, "jsonl", 0});
}

Corpus load_corpus(const std::filesystem::path& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open corpus file '" + path.string() + "'");
  return format == CorpusFormat::Csv ? read_csv_corpus(in, path.string())
                                     : read_jsonl_corpus(in, path.string());
}

void write_jsonl_corpus(const Corpus& corpus, std::ostream& out) {
  for (const auto& doc : corpus) {
    nlohmann::ordered_json obj;
    obj["id"] = doc.id;
    obj["title"] = doc.title;
    obj["content"] = doc.content;
    obj["published"] = doc.published.to_string();
    obj["source"] = doc.source;
    out << obj.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace) << '\n';
  }
}

void write_csv_corpus(const Corpus& corpus, std::ostream& out) {
  out << "id,title,content,published,source\r\n";
  for (const auto& doc : corpus) {
    write_csv_field(out, doc.id);
    out << ',';
    write_csv_field(out, doc.title);
    out << ',';
    write_csv_field(out, doc.content);
    out << ',' << doc.published.to_string() << ',';
    write_csv_field(out, doc.source);
    out << "\r\n";
  }
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path, CorpusFormat format) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArgumentError("cannot write corpus file '" + path.string() + "'");
  if (format == CorpusFormat::Csv) {
    write_csv_corpus(corpus, out);
  } else {
    write_jsonl_corpus(corpus, out);
  }
}

Corpus filter_by_date(const Corpus& corpus, Date from, Date to) {
  if (to < from) {
    throw ArgumentError("date range is inverted: " + from.to_string() + " > " + to.to_string());
  }
  std::vector<Document> kept;
  std::copy_if(corpus.begin(), corpus.end(), std::back_inserter(kept),
               [&](const Document& d) { return from <= d.published && d.published <= to; });
  return Corpus(std::move(kept), corpus.provenance());
}

}  // namespace agrisk
