#include "agrisk/sentiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "agrisk/error.hpp"
#include "agrisk/preprocess.hpp"
#include "utf8.hpp"

namespace agrisk {
namespace {

bool is_ascii_punct(char c) {
  return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
         (c >= 0x7B && c <= 0x7E);
}

std::string lower(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t pos = 0; pos < text.size();) {
    const auto [cp, len] = utf8::decode(text, pos);
    utf8::lower_into(out, cp);
    pos += len;
  }
  return out;
}

// At least one cased letter and no lowercase letters.
bool is_all_caps(std::string_view word) {
  bool cased = false;
  for (std::size_t pos = 0; pos < word.size();) {
    const auto [cp, len] = utf8::decode(word, pos);
    if (utf8::is_lower_letter(cp)) return false;
    if (utf8::is_upper(cp)) cased = true;
    pos += len;
  }
  return cased;
}

bool caps_differential(const std::vector<std::string>& words) {
  const auto caps = static_cast<std::size_t>(std::count_if(words.begin(), words.end(), is_all_caps));
  return caps > 0 && caps < words.size();
}

std::string read_file(const std::filesystem::path& path, const char* what) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError(std::string("cannot open ") + what + " '" + path.string() + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

SentimentScores from_valences(const std::vector<double>& valences, std::string_view text,
                              const SentimentRules& rules) {
  SentimentScores out;
  if (valences.empty()) return out;

  const auto bangs = std::min<std::ptrdiff_t>(std::count(text.begin(), text.end(), '!'), rules.exclamation_cap);
  const double emphasis = static_cast<double>(bangs) * rules.exclamation_increment;

  double sum = 0.0;
  for (const double v : valences) sum += v;
  if (sum > 0.0) {
    sum += emphasis;
  } else if (sum < 0.0) {
    sum -= emphasis;
  }
  out.compound = normalize_compound(sum, rules.normalization_alpha);

  double pos_sum = 0.0;
  double neg_sum = 0.0;
  double neutral = 0.0;
  for (const double v : valences) {
    if (v > 0.0) pos_sum += v + 1.0;
    if (v < 0.0) neg_sum += v - 1.0;
    if (v == 0.0) neutral += 1.0;
  }
  if (pos_sum > std::fabs(neg_sum)) {
    pos_sum += emphasis;
  } else if (pos_sum < std::fabs(neg_sum)) {
    neg_sum -= emphasis;
  }
  const double total = pos_sum + std::fabs(neg_sum) + neutral;
  out.pos = std::fabs(pos_sum / total);
  out.neg = std::fabs(neg_sum / total);
  out.neu = std::fabs(neutral / total);
  return out;
}

}  // namespace

ValenceLexicon::ValenceLexicon(std::unordered_map<std::string, double> valences,
                               std::unordered_map<std::string, double> boosters,
                               std::unordered_set<std::string> negations, SentimentRules rules)
    : valences_(std::move(valences)),
      boosters_(std::move(boosters)),
      negations_(std::move(negations)),
      rules_(rules) {
  if (valences_.empty()) throw ArgumentError("valence lexicon is empty");
}

ValenceLexicon ValenceLexicon::parse(std::string_view lexicon_tsv, std::string_view rules_json) {
  std::unordered_map<std::string, double> valences;
  std::istringstream in{std::string(lexicon_tsv)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) throw ValidationError(line_no, "lexicon line must be 'token\\tvalence'");
    const auto end = line.find('\t', tab + 1);
    const std::string token = line.substr(0, tab);
    double value = 0.0;
    try {
      value = std::stod(line.substr(tab + 1, end == std::string::npos ? std::string::npos : end - tab - 1));
    } catch (const std::exception&) {
      throw ValidationError(line_no, "valence is not a number");
    }
    // Lookups are lowercase, so mixed-case emoticons can never match.
    if (lower(token) != token) continue;
    valences[token] = value;
  }

  nlohmann::json j;
  try {
    j = nlohmann::json::parse(rules_json);
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("rules", std::string("malformed sentiment rules: ") + e.what());
  }
  SentimentRules rules;
  const auto c = j.value("constants", nlohmann::json::object());
  rules.booster_increment = c.value("booster_increment", rules.booster_increment);
  rules.negation_scalar = c.value("negation_scalar", rules.negation_scalar);
  rules.caps_increment = c.value("caps_increment", rules.caps_increment);
  rules.exclamation_increment = c.value("exclamation_increment", rules.exclamation_increment);
  rules.exclamation_cap = c.value("exclamation_cap", rules.exclamation_cap);
  if (c.contains("booster_damping")) {
    const auto& d = c["booster_damping"];
    if (!d.is_array() || d.size() != 3) throw SchemaError("booster_damping", "booster_damping needs 3 values");
    for (std::size_t i = 0; i < 3; ++i) rules.booster_damping[i] = d[i].get<double>();
  }
  rules.but_before = c.value("but_before", rules.but_before);
  rules.but_after = c.value("but_after", rules.but_after);
  rules.normalization_alpha = c.value("normalization_alpha", rules.normalization_alpha);

  std::unordered_map<std::string, double> boosters;
  const auto booster_table = j.value("boosters", nlohmann::json::object());
  for (const auto& [word, value] : booster_table.items()) {
    boosters[lower(word)] = value.get<double>();
  }
  std::unordered_set<std::string> negations;
  const auto negation_list = j.value("negations", nlohmann::json::array());
  for (const auto& word : negation_list) {
    negations.insert(lower(word.get<std::string>()));
  }
  return ValenceLexicon(std::move(valences), std::move(boosters), std::move(negations), rules);
}

ValenceLexicon ValenceLexicon::load(const std::filesystem::path& lexicon_tsv,
                                    const std::filesystem::path& rules_json) {
  return parse(read_file(lexicon_tsv, "valence lexicon"), read_file(rules_json, "sentiment rules"));
}

std::optional<double> ValenceLexicon::valence(std::string_view lower) const {
  const auto it = valences_.find(std::string(lower));
  if (it == valences_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> ValenceLexicon::booster(std::string_view lower) const {
  const auto it = boosters_.find(std::string(lower));
  if (it == boosters_.end()) return std::nullopt;
  return it->second;
}

bool ValenceLexicon::is_negation(std::string_view lower) const {
  return negations_.contains(std::string(lower)) || lower.find("n't") != std::string_view::npos;
}

double normalize_compound(double s, double alpha) {
  const double v = s / std::sqrt(s * s + alpha);
  return std::clamp(v, -1.0, 1.0);
}

std::vector<std::string> sentiment_words(std::string_view text) {
  std::vector<std::string> words;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t start = pos;
    while (start < text.size()) {
      const auto d = utf8::decode(text, start);
      if (!utf8::is_space(d.code_point)) break;
      start += d.length;
    }
    if (start >= text.size()) break;
    std::size_t end = start;
    while (end < text.size()) {
      const auto d = utf8::decode(text, end);
      if (utf8::is_space(d.code_point)) break;
      end += d.length;
    }
    std::string_view word = text.substr(start, end - start);
    std::size_t a = 0;
    std::size_t b = word.size();
    while (a < b && is_ascii_punct(word[a])) ++a;
    while (b > a && is_ascii_punct(word[b - 1])) --b;
    const auto stripped = word.substr(a, b - a);
    words.emplace_back(utf8::length(stripped) <= 2 ? word : stripped);
    pos = end;
  }
  return words;
}

std::vector<double> word_valences(std::string_view sentence, const ValenceLexicon& lexicon) {
  const auto& rules = lexicon.rules();
  const auto words = sentiment_words(sentence);
  std::vector<std::string> lowered;
  lowered.reserve(words.size());
  for (const auto& w : words) lowered.push_back(lower(w));
  const bool cap_diff = caps_differential(words);

  std::vector<double> valences;
  valences.reserve(words.size());
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto& item = lowered[i];
    const auto base = lexicon.valence(item);
    if (lexicon.booster(item) || !base) {
      valences.push_back(0.0);
      continue;
    }
    double valence = *base;
    if (item == "no" && i + 1 < words.size() && lexicon.valence(lowered[i + 1])) valence = 0.0;
    if ((i > 0 && lowered[i - 1] == "no") || (i > 1 && lowered[i - 2] == "no") ||
        (i > 2 && lowered[i - 3] == "no" && (lowered[i - 1] == "or" || lowered[i - 1] == "nor"))) {
      valence = *base * rules.negation_scalar;
    }
    if (cap_diff && is_all_caps(words[i])) valence += valence > 0.0 ? rules.caps_increment : -rules.caps_increment;

    for (std::size_t dist = 1; dist <= 3; ++dist) {
      if (i < dist) break;
      const auto& prev = lowered[i - dist];
      if (lexicon.valence(prev)) continue;
      if (const auto boost = lexicon.booster(prev)) {
        double scalar = valence < 0.0 ? -*boost : *boost;
        if (cap_diff && is_all_caps(words[i - dist])) {
          scalar += valence > 0.0 ? rules.caps_increment : -rules.caps_increment;
        }
        valence += scalar * rules.booster_damping[dist - 1];
      }
      if (lexicon.is_negation(prev)) valence *= rules.negation_scalar;
    }
    valences.push_back(valence);
  }

  const auto but = std::find(lowered.begin(), lowered.end(), "but");
  if (but != lowered.end()) {
    const auto bi = static_cast<std::size_t>(but - lowered.begin());
    for (std::size_t i = 0; i < valences.size(); ++i) {
      if (i < bi) valences[i] *= rules.but_before;
      if (i > bi) valences[i] *= rules.but_after;
    }
  }
  return valences;
}

SentimentScores score_sentence(std::string_view sentence, const ValenceLexicon& lexicon) {
  return from_valences(word_valences(sentence, lexicon), sentence, lexicon.rules());
}

std::string_view to_string(DocumentAggregation aggregation) {
  switch (aggregation) {
    case DocumentAggregation::Mean:
      return "mean";
    case DocumentAggregation::LengthWeighted:
      return "length-weighted";
    case DocumentAggregation::MaxMagnitude:
      return "max-magnitude";
  }
  return "mean";
}

DocumentAggregation parse_document_aggregation(std::string_view name) {
  if (name == "mean") return DocumentAggregation::Mean;
  if (name == "length-weighted") return DocumentAggregation::LengthWeighted;
  if (name == "max-magnitude") return DocumentAggregation::MaxMagnitude;
  throw ArgumentError("unknown sentiment aggregation '" + std::string(name) +
                      "' (expected mean, length-weighted or max-magnitude)");
}

SentimentScores score_text(std::string_view text, const ValenceLexicon& lexicon,
                           DocumentAggregation aggregation) {
  const auto sentences = segment_sentences(text);
  if (sentences.empty()) throw ArgumentError("cannot score text without sentences");

  std::vector<SentimentScores> scores;
  scores.reserve(sentences.size());
  for (const auto& s : sentences) scores.push_back(score_sentence(s, lexicon));

  if (aggregation == DocumentAggregation::MaxMagnitude) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < scores.size(); ++i) {
      if (std::fabs(scores[i].compound) > std::fabs(scores[best].compound)) best = i;
    }
    return scores[best];
  }

  std::vector<double> weights(scores.size(), 1.0);
  if (aggregation == DocumentAggregation::LengthWeighted) {
    for (std::size_t i = 0; i < sentences.size(); ++i) {
      weights[i] = static_cast<double>(std::max<std::size_t>(1, sentiment_words(sentences[i]).size()));
    }
  }
  double total_weight = 0.0;
  SentimentScores out{0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out.pos += weights[i] * scores[i].pos;
    out.neg += weights[i] * scores[i].neg;
    out.neu += weights[i] * scores[i].neu;
    out.compound += weights[i] * scores[i].compound;
    total_weight += weights[i];
  }
  out.compound /= total_weight;
  const double mass = out.pos + out.neg + out.neu;
  out.pos /= mass;
  out.neg /= mass;
  out.neu /= mass;
  return out;
}

SentimentScores score_document(const Document& doc, const ValenceLexicon& lexicon,
                               DocumentAggregation aggregation) {
  try {
    return score_text(doc.content, lexicon, aggregation);
  } catch (const ArgumentError&) {
    throw ArgumentError("document '" + doc.id + "' has empty content");
  }
}

}  // namespace agrisk
