#include "agrisk/preprocess.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "agrisk/error.hpp"
#include "utf8.hpp"

namespace agrisk {
namespace {

bool is_word_char(char32_t cp) { return !utf8::is_space(cp) && !utf8::is_punct(cp); }

bool is_joiner(char32_t cp) {
  return cp == '-' || cp == '\'' || cp == 0x2019 || cp == 0x2010 || cp == 0x2011;
}

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

// Closing quote/bracket after a terminator: returns its byte length, or 0.
std::size_t closing_mark(std::string_view text, std::size_t pos) {
  if (pos >= text.size()) return 0;
  const auto d = utf8::decode(text, pos);
  switch (d.code_point) {
    case '"':
    case '\'':
    case ')':
    case ']':
    case 0x2019:
    case 0x201D:
      return d.length;
    default:
      return 0;
  }
}

std::size_t opening_mark(std::string_view text, std::size_t pos) {
  if (pos >= text.size()) return 0;
  const auto d = utf8::decode(text, pos);
  switch (d.code_point) {
    case '"':
    case '\'':
    case '(':
    case '[':
    case 0x2018:
    case 0x201C:
      return d.length;
    default:
      return 0;
  }
}

std::string_view trim(std::string_view text) {
  std::size_t begin = 0;
  while (begin < text.size()) {
    const auto d = utf8::decode(text, begin);
    if (!utf8::is_space(d.code_point)) break;
    begin += d.length;
  }
  std::size_t end = text.size();
  while (end > begin) {
    // Step back to the start of the previous code point.
    std::size_t prev = end - 1;
    while (prev > begin && (static_cast<unsigned char>(text[prev]) & 0xC0) == 0x80) --prev;
    if (!utf8::is_space(utf8::decode(text, prev).code_point)) break;
    end = prev;
  }
  return text.substr(begin, end - begin);
}

// The whitespace-delimited word that ends at `dot` (inclusive), without
// leading opening marks.
std::string_view word_ending_at(std::string_view text, std::size_t dot) {
  std::size_t begin = dot;
  while (begin > 0 && !std::isspace(static_cast<unsigned char>(text[begin - 1]))) --begin;
  while (begin < dot && std::string_view("(\"'[").find(text[begin]) != std::string_view::npos) {
    ++begin;
  }
  return text.substr(begin, dot - begin + 1);
}

bool is_guarded(std::string_view word, const std::unordered_set<std::string>& abbreviations) {
  if (abbreviations.contains(std::string(word))) return true;
  if (abbreviations.contains(normalize_case(word))) return true;
  // Single capital initial, e.g. "J. Smith".
  return word.size() == 2 && word[0] >= 'A' && word[0] <= 'Z';
}

bool has_letter(std::string_view token) {
  for (std::size_t pos = 0; pos < token.size();) {
    const auto d = utf8::decode(token, pos);
    if (utf8::is_ascii_alpha(d.code_point)) return true;
    if (d.code_point >= 0xC0 && !utf8::is_punct(d.code_point) && !utf8::is_space(d.code_point)) {
      return true;
    }
    pos += d.length;
  }
  return false;
}

bool is_noise(std::string_view token, const Stoplist& stoplist) {
  return stoplist.contains(token) || !has_letter(token) || utf8::length(token) < 2;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

std::string suffix_fallback(std::string_view word, const LemmaTable& table) {
  const std::size_t n = word.size();
  if (ends_with(word, "ies") && n - 3 >= 2) {
    return std::string(word.substr(0, n - 3)) + "y";
  }
  if (ends_with(word, "es") && n - 2 >= 3) {
    const auto without_s = word.substr(0, n - 1);
    if (table.is_lemma(without_s)) return std::string(without_s);
    return std::string(word.substr(0, n - 2));
  }
  if (ends_with(word, "s") && !ends_with(word, "ss") && !ends_with(word, "us") &&
      !ends_with(word, "is") && n - 1 >= 3) {
    return std::string(word.substr(0, n - 1));
  }
  for (std::string_view suffix : {std::string_view("ing"), std::string_view("ed")}) {
    if (!ends_with(word, suffix)) continue;
    if (suffix == "ed" && ends_with(word, "eed")) continue;
    const std::string stem(word.substr(0, n - suffix.size()));
    if (stem.size() < 3) continue;
    if (table.is_lemma(stem + "e")) return stem + "e";
    if (stem.size() >= 4 && stem[stem.size() - 1] == stem[stem.size() - 2] &&
        table.is_lemma(std::string_view(stem).substr(0, stem.size() - 1))) {
      return stem.substr(0, stem.size() - 1);
    }
    return stem;
  }
  return std::string(word);
}

const std::unordered_set<std::string>& abbreviation_set() {
  static const std::unordered_set<std::string> set(default_abbreviations().begin(),
                                                   default_abbreviations().end());
  return set;
}

}  // namespace

std::string normalize_case(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t pos = 0; pos < text.size();) {
    const auto d = utf8::decode(text, pos);
    if (d.code_point == 0xFFFD && d.length == 1) {
      out.push_back(text[pos]);  // keep invalid bytes untouched
    } else {
      utf8::lower_into(out, d.code_point);
    }
    pos += d.length;
  }
  return out;
}

std::vector<TokenSpan> tokenize_with_offsets(std::string_view text) {
  std::vector<TokenSpan> tokens;
  TokenSpan current;
  bool open = false;

  auto flush = [&] {
    if (open) tokens.push_back(std::move(current));
    current = TokenSpan{};
    open = false;
  };

  for (std::size_t pos = 0; pos < text.size();) {
    const auto d = utf8::decode(text, pos);
    const auto next = pos + d.length;
    if (is_joiner(d.code_point)) {
      const bool joins = open && next < text.size() && is_word_char(utf8::decode(text, next).code_point);
      if (joins) {
        current.text.append(text.substr(pos, d.length));
        current.end = next;
      } else {
        flush();
      }
    } else if (is_word_char(d.code_point)) {
      if (!open) {
        current.begin = pos;
        open = true;
      }
      current.text.append(text.substr(pos, d.length));
      current.end = next;
    } else {
      flush();
    }
    pos = next;
  }
  flush();
  return tokens;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  for (auto& token : tokenize_with_offsets(text)) out.push_back(std::move(token.text));
  return out;
}

const std::vector<std::string>& default_abbreviations() {
  static const std::vector<std::string> list = {
      "Dr.",   "Mr.",  "Mrs.", "Ms.",  "Prof.", "St.",   "Jr.",  "Sr.",   "Mt.",  "Gen.",
      "Gov.",  "Sen.", "Rep.", "Col.", "Capt.", "Lt.",   "Sgt.", "vs.",   "e.g.", "i.e.",
      "U.S.",  "U.K.", "U.N.", "E.U.", "No.",   "Fig.",  "Inc.", "Ltd.",  "Co.",  "Corp.",
      "Dept.", "Univ.", "approx.", "Jan.", "Feb.", "Mar.", "Apr.", "Aug.", "Sep.", "Sept.",
      "Oct.",  "Nov.", "Dec.", "cf.",  "al.",   "Mme.",  "Mssrs.", "Hon.", "Pres.", "Ave."};
  return list;
}

std::vector<std::string> segment_sentences(std::string_view text) {
  return segment_sentences(text, abbreviation_set());
}

std::vector<std::string> segment_sentences(std::string_view text,
                                           const std::unordered_set<std::string>& abbreviations) {
  std::vector<std::string> sentences;
  auto emit = [&](std::size_t begin, std::size_t end) {
    const auto piece = trim(text.substr(begin, end - begin));
    if (!piece.empty()) sentences.emplace_back(piece);
  };

  std::size_t start = 0;
  std::size_t pos = 0;
  const std::size_t n = text.size();
  while (pos < n) {
    if (!is_terminator(text[pos])) {
      ++pos;
      continue;
    }
    std::size_t j = pos;
    while (j < n && is_terminator(text[j])) ++j;
    const bool single_dot = text[pos] == '.' && j == pos + 1;
    while (const auto len = closing_mark(text, j)) j += len;

    std::size_t k = j;
    while (k < n) {
      const auto d = utf8::decode(text, k);
      if (!utf8::is_space(d.code_point)) break;
      k += d.length;
    }
    if (k == j || k >= n) {
      pos = j;
      continue;
    }
    std::size_t m = k + opening_mark(text, k);
    const bool capital = m < n && utf8::is_upper(utf8::decode(text, m).code_point);
    if (!capital || (single_dot && is_guarded(word_ending_at(text, pos), abbreviations))) {
      pos = j;
      continue;
    }
    emit(start, j);
    start = k;
    pos = k;
  }
  if (start < n) emit(start, n);
  return sentences;
}

Stoplist Stoplist::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open stopword list '" + path.string() + "'");
  std::unordered_set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    const auto word = trim(line);
    if (word.empty() || word.front() == '#') continue;
    words.emplace(normalize_case(word));
  }
  return Stoplist(std::move(words));
}

LemmaTable::LemmaTable(std::unordered_map<std::string, std::string> entries)
    : entries_(std::move(entries)) {
  for (const auto& [inflected, lemma] : entries_) lemmas_.insert(lemma);
}

LemmaTable LemmaTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open lemma table '" + path.string() + "'");
  std::unordered_map<std::string, std::string> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ValidationError(line_no, "lemma table line lacks a tab separator");
    }
    entries.emplace(line.substr(0, tab), line.substr(tab + 1));
  }
  return LemmaTable(std::move(entries));
}

const std::string* LemmaTable::find(std::string_view word) const {
  const auto it = entries_.find(std::string(word));
  return it == entries_.end() ? nullptr : &it->second;
}

std::string lemmatize(std::string_view token, const LemmaTable& table) {
  if (const auto* lemma = table.find(token)) return *lemma;
  return suffix_fallback(token, table);
}

std::vector<std::string> remove_noise(std::span<const std::string> tokens, const Stoplist& stoplist) {
  std::vector<std::string> kept;
  kept.reserve(tokens.size());
  for (const auto& token : tokens) {
    if (!is_noise(token, stoplist)) kept.push_back(token);
  }
  return kept;
}

TextPipeline TextPipeline::load(const std::filesystem::path& stopwords,
                                const std::filesystem::path& lemmas) {
  return TextPipeline(Stoplist::load(stopwords), LemmaTable::load(lemmas));
}

std::vector<std::string> TextPipeline::terms(std::string_view text) const {
  const auto tokens = remove_noise(tokenize(normalize_case(text)), stoplist_);
  std::vector<std::string> lemmas;
  lemmas.reserve(tokens.size());
  for (const auto& token : tokens) lemmas.push_back(lemmatize(token, lemmas_));
  return remove_noise(lemmas, stoplist_);
}

std::string TextPipeline::term_for(std::string_view raw_token) const {
  const auto lowered = normalize_case(raw_token);
  if (is_noise(lowered, stoplist_)) return {};
  auto lemma = lemmatize(lowered, lemmas_);
  if (is_noise(lemma, stoplist_)) return {};
  return lemma;
}

ProcessedDocument preprocess_document(const Document& doc, const TextPipeline& pipeline) {
  return ProcessedDocument{doc.id, pipeline.terms(doc.content), segment_sentences(doc.content),
                           pipeline.terms(doc.title)};
}

}  // namespace agrisk
