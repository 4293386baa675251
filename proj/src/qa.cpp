#include "agrisk/qa.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include <httplib.h>
#include <json.hpp>

#include "agrisk/error.hpp"
#include "utf8.hpp"

namespace agrisk {
namespace {

std::string collapse_whitespace(std::string_view text) {
  std::string out;
  bool pending = false;
  for (std::size_t pos = 0; pos < text.size();) {
    const auto [cp, len] = utf8::decode(text, pos);
    if (utf8::is_space(cp)) {
      pending = !out.empty();
    } else {
      if (pending) out.push_back(' ');
      pending = false;
      out.append(text.substr(pos, len));
    }
    pos += len;
  }
  return out;
}

struct Endpoint {
  std::string base;
  std::string path;
};

Endpoint parse_endpoint(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ArgumentError("QA endpoint must be an http:// URL: '" + url + "'");
  const auto scheme = url.substr(0, scheme_end);
  if (scheme != "http") throw TransportError("unsupported QA endpoint scheme '" + scheme + "'");
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string span_text(std::string_view context, const std::vector<TokenSpan>& tokens, std::size_t start,
                      std::size_t end) {
  return std::string(context.substr(tokens[start].begin, tokens[end - 1].end - tokens[start].begin));
}

}  // namespace

const std::vector<std::string>& interrogatives() {
  static const std::vector<std::string> words = {"what", "who",  "whom", "whose", "which",
                                                 "when", "where", "why", "how"};
  return words;
}

QAAnswer answer_baseline(const QAQuery& query, const TextPipeline& pipeline, const QAOptions& options) {
  const auto tokens = tokenize_with_offsets(query.context);
  if (tokens.empty()) throw ArgumentError("QA context has no tokens");
  if (query.question.find_first_not_of(" \t\r\n") == std::string::npos) {
    throw ArgumentError("QA question is empty");
  }
  if (options.max_span_len == 0) throw ArgumentError("max_span_len must be positive");

  std::unordered_set<std::string> question_terms;
  for (auto& t : pipeline.terms(query.question)) {
    const auto& q = interrogatives();
    if (std::find(q.begin(), q.end(), t) == q.end()) question_terms.insert(std::move(t));
  }

  const auto sentences = segment_sentences(query.context);
  const double n_sentences = static_cast<double>(std::max<std::size_t>(sentences.size(), 1));
  std::unordered_map<std::string, double> sentence_freq;
  for (const auto& s : sentences) {
    auto terms = pipeline.terms(s);
    std::sort(terms.begin(), terms.end());
    terms.erase(std::unique(terms.begin(), terms.end()), terms.end());
    for (const auto& t : terms) {
      if (question_terms.contains(t)) sentence_freq[t] += 1.0;
    }
  }
  auto idf = [&](const std::string& term) {
    const auto it = sentence_freq.find(term);
    const double sf = it == sentence_freq.end() ? 0.0 : it->second;
    return std::log((1.0 + n_sentences) / (1.0 + sf)) + 1.0;
  };

  // -1 marks tokens that are not question terms.
  std::vector<int> term_index(tokens.size(), -1);
  std::vector<double> term_idf;
  std::unordered_map<std::string, int> ids;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    auto term = pipeline.term_for(tokens[i].text);
    if (term.empty() || !question_terms.contains(term)) continue;
    const auto [it, inserted] = ids.emplace(term, static_cast<int>(term_idf.size()));
    if (inserted) term_idf.push_back(idf(term));
    term_index[i] = it->second;
  }

  QAAnswer best;
  bool have = false;
  std::vector<char> seen(term_idf.size(), 0);
  for (std::size_t start = 0; start < tokens.size(); ++start) {
    std::fill(seen.begin(), seen.end(), 0);
    double sum = 0.0;
    const std::size_t limit = std::min(tokens.size(), start + options.max_span_len);
    for (std::size_t end = start + 1; end <= limit; ++end) {
      const int t = term_index[end - 1];
      if (t >= 0 && !seen[static_cast<std::size_t>(t)]) {
        seen[static_cast<std::size_t>(t)] = 1;
        sum += term_idf[static_cast<std::size_t>(t)];
      }
      const double score = sum - options.length_penalty * static_cast<double>(end - start);
      if (!have || score > best.score) {
        best.start = start;
        best.end = end;
        best.score = score;
        have = true;
      }
    }
  }
  best.text = span_text(query.context, tokens, best.start, best.end);
  best.low_confidence = best.score <= 0.0;
  return best;
}

QAAnswer answer_remote(const std::string& endpoint, const QAQuery& query, double timeout_seconds) {
  const auto tokens = tokenize_with_offsets(query.context);
  if (tokens.empty()) throw ArgumentError("QA context has no tokens");
  const auto target = parse_endpoint(endpoint);

  httplib::Client client(target.base);
  const auto secs = static_cast<time_t>(timeout_seconds);
  const auto usecs = static_cast<time_t>((timeout_seconds - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  const nlohmann::json body = {{"context", query.context}, {"question", query.question}};
  const auto response = client.Post(target.path, body.dump(), "application/json");
  if (!response) {
    throw TransportError("QA request to " + endpoint + " failed: " + httplib::to_string(response.error()));
  }
  if (response->status != 200) {
    throw TransportError("QA service at " + endpoint + " returned HTTP " + std::to_string(response->status));
  }

  QAAnswer answer;
  std::string remote_text;
  try {
    const auto j = nlohmann::json::parse(response->body);
    remote_text = j.at("answer").get<std::string>();
    const auto start = j.at("start").get<long long>();
    const auto end = j.at("end").get<long long>();
    answer.score = j.at("score").get<double>();
    if (start < 0 || end <= start || static_cast<std::size_t>(end) > tokens.size()) {
      throw IntegrityError(static_cast<long long>(start), static_cast<long long>(end),
                           "span outside the context's " + std::to_string(tokens.size()) + " tokens");
    }
    answer.start = static_cast<std::size_t>(start);
    answer.end = static_cast<std::size_t>(end);
  } catch (const nlohmann::json::exception& e) {
    throw TransportError("malformed QA response from " + endpoint + ": " + e.what());
  }
  answer.text = span_text(query.context, tokens, answer.start, answer.end);
  if (collapse_whitespace(remote_text) != collapse_whitespace(answer.text)) {
    throw IntegrityError(static_cast<long long>(answer.start), static_cast<long long>(answer.end),
                         "answer text '" + remote_text + "' is not the context span '" + answer.text + "'");
  }
  answer.low_confidence = answer.score <= 0.0;
  return answer;
}

std::string formulate_question(std::span<const std::string> words, std::string_view question_template) {
  if (words.empty()) throw ArgumentError("formulate_question needs at least one word");
  std::string joined;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) joined += i + 1 == words.size() ? " and " : ", ";
    joined += words[i];
  }

  std::string out;
  std::size_t pos = 0;
  while (pos < question_template.size()) {
    const auto open = question_template.find('{', pos);
    if (open == std::string_view::npos) break;
    const auto close = question_template.find('}', open);
    if (close == std::string_view::npos) break;
    out.append(question_template.substr(pos, open - pos));
    const auto slot = question_template.substr(open + 1, close - open - 1);
    if (slot == "words") {
      out += joined;
    } else if (slot.size() > 1 && slot[0] == 'w' &&
               std::all_of(slot.begin() + 1, slot.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      const auto n = std::stoul(std::string(slot.substr(1)));
      if (n == 0 || n > words.size()) {
        throw ArgumentError("question template slot {" + std::string(slot) + "} has no word (" +
                            std::to_string(words.size()) + " supplied)");
      }
      out += words[n - 1];
    } else {
      out.append(question_template.substr(open, close - open + 1));
    }
    pos = close + 1;
  }
  out.append(question_template.substr(pos));
  return out;
}

EvaluationRecord evaluate_uncertainty(const EvaluationRequest& request, const TopicModel& model,
                                      const Vocabulary& vocab, const Corpus& corpus,
                                      std::span<const TopicScore> report, const TextPipeline& pipeline) {
  const int k = request.topic;
  if (k < 0 || k >= model.num_topics) {
    throw ArgumentError("topic index " + std::to_string(k) + " outside [0, " + std::to_string(model.num_topics) + ")");
  }
  const auto clusters = cluster_by_dominant_topic(model.theta);
  const auto& cluster = clusters[static_cast<std::size_t>(k)];
  if (cluster.empty()) throw ArgumentError("topic " + std::to_string(k) + " has no documents");

  std::size_t chosen = cluster.front();
  if (request.doc_id) {
    const auto it = std::find(model.doc_ids.begin(), model.doc_ids.end(), *request.doc_id);
    if (it == model.doc_ids.end()) throw ArgumentError("unknown document '" + *request.doc_id + "'");
    chosen = static_cast<std::size_t>(it - model.doc_ids.begin());
    if (std::find(cluster.begin(), cluster.end(), chosen) == cluster.end()) {
      throw ArgumentError("document '" + *request.doc_id + "' is not in topic " + std::to_string(k) + "'s cluster");
    }
  } else {
    for (const auto d : cluster) {
      if (model.theta(d, static_cast<std::size_t>(k)) > model.theta(chosen, static_cast<std::size_t>(k))) chosen = d;
    }
  }
  if (chosen >= model.doc_ids.size()) throw ArgumentError("model has no document ids");
  const auto* doc = corpus.find(model.doc_ids[chosen]);
  if (!doc) throw ArgumentError("document '" + model.doc_ids[chosen] + "' missing from corpus");

  EvaluationRecord record;
  record.topic = k;
  record.label = model.label(k);
  record.doc_id = doc->id;
  record.theta = model.theta(chosen, static_cast<std::size_t>(k));
  if (request.question) {
    record.question = *request.question;
  } else {
    std::vector<std::string> words;
    for (auto& [term, p] : top_words(model, vocab, k, request.question_words)) words.push_back(term);
    record.question = formulate_question(words, request.question_template);
  }
  for (const auto& row : report) {
    if (row.topic == k) {
      record.ss = row.ss;
      record.cls = row.cls;
    }
  }

  const QAQuery query{doc->content, record.question};
  if (request.remote_endpoint) {
    try {
      record.answer = answer_remote(*request.remote_endpoint, query, request.timeout_seconds);
      record.scorer = "remote";
      return record;
    } catch (const TransportError& e) {
      record.scorer = std::string("baseline (remote unavailable: ") + e.what() + ")";
    }
  } else {
    record.scorer = "baseline";
  }
  record.answer = answer_baseline(query, pipeline, request.qa);
  return record;
}

void write_evaluation_json(const EvaluationRecord& record, std::ostream& out) {
  nlohmann::ordered_json j;
  j["topic"] = record.topic;
  j["label"] = record.label;
  j["doc_id"] = record.doc_id;
  j["theta"] = record.theta;
  j["question"] = record.question;
  j["answer"] = {{"text", record.answer.text},
                 {"start", record.answer.start},
                 {"end", record.answer.end},
                 {"score", record.answer.score},
                 {"low_confidence", record.answer.low_confidence}};
  j["SS"] = record.ss;
  j["class"] = std::string(to_string(record.cls));
  j["scorer"] = record.scorer;
  j["analyst_note"] = record.analyst_note;
  out << j.dump(2) << '\n';
}

}  // namespace agrisk
