#include "agrisk/service.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "agrisk/error.hpp"

namespace agrisk {
namespace {

using ojson = nlohmann::ordered_json;

constexpr const char* kJson = "application/json";

void send_error(httplib::Response& res, int status, std::string_view code, std::string_view stage,
                std::string_view message) {
  res.status = status;
  const ojson body = {{"code", code}, {"stage", stage}, {"message", message}};
  res.set_content(body.dump(), kJson);
}

ojson scores_json(const SentimentScores& s) {
  return {{"pos", s.pos}, {"neg", s.neg}, {"neu", s.neu}, {"compound", s.compound}};
}

ojson answer_json(const QAAnswer& a) {
  return {{"text", a.text},
          {"start", a.start},
          {"end", a.end},
          {"score", a.score},
          {"low_confidence", a.low_confidence}};
}

}  // namespace

struct Service::Impl {
  RunSnapshot snap;
  httplib::Server server;
  std::thread thread;

  std::string topics_body;
  std::string scores_body;
  std::vector<std::string> topic_docs_body;
  std::map<std::string, std::size_t, std::less<>> doc_row;
  std::map<std::string, double, std::less<>> compound_of;

  explicit Impl(RunSnapshot s) : snap(std::move(s)) {
    const auto& model = snap.model;
    for (std::size_t d = 0; d < model.doc_ids.size(); ++d) doc_row.emplace(model.doc_ids[d], d);
    for (const auto& ds : snap.doc_scores) compound_of.emplace(ds.doc_id, ds.scores.compound);

    ojson topics = ojson::array();
    for (int k = 0; k < model.num_topics; ++k) {
      ojson words = ojson::array();
      for (const auto& [term, phi] : top_words(model, snap.vocab, k, 10)) {
        words.push_back({{"term", term}, {"phi", phi}});
      }
      ojson entry = {{"topic", k}, {"label", model.label(k)}, {"top_words", std::move(words)}};
      const auto row = std::find_if(snap.report.begin(), snap.report.end(),
                                    [k](const TopicScore& t) { return t.topic == k; });
      if (row != snap.report.end()) {
        entry["SS"] = row->ss;
        entry["class"] = std::string(to_string(row->cls));
        entry["n_docs"] = row->n_docs;
      }
      topics.push_back(std::move(entry));
    }
    topics_body = topics.dump();

    std::ostringstream report;
    write_report_json(snap.report, report);
    scores_body = report.str();

    const auto clusters = cluster_by_dominant_topic(model.theta);
    for (int k = 0; k < model.num_topics; ++k) {
      auto members = clusters[static_cast<std::size_t>(k)];
      std::stable_sort(members.begin(), members.end(), [&](std::size_t a, std::size_t b) {
        return model.theta(a, static_cast<std::size_t>(k)) > model.theta(b, static_cast<std::size_t>(k));
      });
      ojson docs = ojson::array();
      for (const auto d : members) {
        const auto& id = model.doc_ids[d];
        const auto* doc = snap.corpus.find(id);
        const auto cs = compound_of.find(id);
        docs.push_back({{"doc_id", id},
                        {"title", doc ? doc->title : ""},
                        {"theta", model.theta(d, static_cast<std::size_t>(k))},
                        {"compound", cs == compound_of.end() ? ojson(nullptr) : ojson(cs->second)}});
      }
      topic_docs_body.push_back(docs.dump());
    }
    routes();
  }

  void routes() {
    server.Get("/topics", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(topics_body, kJson);
    });
    server.Get(R"(/topics/(-?\d+)/documents)", [this](const httplib::Request& req, httplib::Response& res) {
      const auto k = std::stoll(req.matches[1].str());
      if (k < 0 || k >= static_cast<long long>(topic_docs_body.size())) {
        send_error(res, 404, "not_found", "serve", "no topic " + req.matches[1].str());
        return;
      }
      res.set_content(topic_docs_body[static_cast<std::size_t>(k)], kJson);
    });
    server.Get(R"(/documents/([^/]+))", [this](const httplib::Request& req, httplib::Response& res) {
      document(req.matches[1].str(), res);
    });
    server.Get("/scores", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(scores_body, kJson);
    });
    server.Get("/manifest", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(snap.manifest_json, kJson);
    });
    server.Post("/qa", [this](const httplib::Request& req, httplib::Response& res) { qa(req.body, res); });
    server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
      if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
      send_error(res, res.status, res.status == 404 ? "not_found" : "http_error", "serve",
                 "no route for " + req.method + " " + req.path);
      return httplib::Server::HandlerResponse::Handled;
    });
    server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
      std::string message = "internal error";
      try {
        std::rethrow_exception(ep);
      } catch (const std::exception& e) {
        message = e.what();
      } catch (...) {
      }
      send_error(res, 500, "internal", "serve", message);
    });
  }

  void document(const std::string& id, httplib::Response& res) const {
    const auto* doc = snap.corpus.find(id);
    if (!doc) {
      send_error(res, 404, "not_found", "serve", "no document '" + id + "'");
      return;
    }
    ojson sentences = ojson::array();
    for (const auto& s : segment_sentences(doc->content)) {
      sentences.push_back({{"text", s}, {"sentiment", scores_json(score_sentence(s, snap.lexicon))}});
    }
    ojson body = {{"id", doc->id},
                  {"title", doc->title},
                  {"content", doc->content},
                  {"published", doc->published.to_string()},
                  {"source", doc->source},
                  {"sentences", std::move(sentences)}};
    const auto score = std::find_if(snap.doc_scores.begin(), snap.doc_scores.end(),
                                    [&](const DocumentScore& s) { return s.doc_id == id; });
    body["sentiment"] = score == snap.doc_scores.end() ? ojson(nullptr) : scores_json(score->scores);
    if (const auto row = doc_row.find(id); row != doc_row.end()) {
      const auto theta = snap.model.theta.row(row->second);
      body["theta"] = std::vector<double>(theta.begin(), theta.end());
      body["dominant_topic"] = dominant_topic(theta).first;
    }
    res.set_content(body.dump(), kJson);
  }

  void qa(const std::string& body, httplib::Response& res) const {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      send_error(res, 400, "bad_request", "qa", std::string("malformed JSON: ") + e.what());
      return;
    }
    if (!j.is_object() || !j.contains("doc_id") || !j["doc_id"].is_string() || !j.contains("question") ||
        !j["question"].is_string()) {
      send_error(res, 400, "bad_request", "qa", "body must contain string fields doc_id and question");
      return;
    }
    const auto id = j["doc_id"].get<std::string>();
    const auto question = j["question"].get<std::string>();
    const auto scorer = j.value("scorer", std::string("baseline"));
    const auto* doc = snap.corpus.find(id);
    if (!doc) {
      send_error(res, 404, "not_found", "qa", "no document '" + id + "'");
      return;
    }
    const QAQuery query{doc->content, question};
    ojson provenance = {{"scorer", scorer}};
    QAAnswer answer;
    try {
      if (scorer == "baseline") {
        answer = answer_baseline(query, snap.text, snap.config.qa);
      } else if (scorer == "remote") {
        if (!snap.config.qa_endpoint) {
          send_error(res, 400, "bad_request", "qa", "no remote QA endpoint configured for this run");
          return;
        }
        provenance["endpoint"] = *snap.config.qa_endpoint;
        answer = answer_remote(*snap.config.qa_endpoint, query, snap.config.qa_timeout);
      } else {
        send_error(res, 400, "bad_request", "qa", "scorer must be baseline or remote");
        return;
      }
    } catch (const TransportError& e) {
      send_error(res, 502, "transport", "qa", e.what());
      return;
    } catch (const IntegrityError& e) {
      send_error(res, 502, "integrity", "qa", e.what());
      return;
    } catch (const ArgumentError& e) {
      send_error(res, 400, "bad_request", "qa", e.what());
      return;
    }
    const ojson out = {{"doc_id", id}, {"question", question}, {"answer", answer_json(answer)},
                       {"provenance", std::move(provenance)}};
    res.set_content(out.dump(), kJson);
  }
};

Service::Service(RunSnapshot snapshot) : impl_(std::make_unique<Impl>(std::move(snapshot))) {}

Service::~Service() { stop(); }

int Service::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = impl_->server.bind_to_any_port(host);
  } else if (!impl_->server.bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0) throw Error("cannot bind " + host + ":" + std::to_string(port));
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return bound;
}

void Service::listen(const std::string& host, int port) {
  if (!impl_->server.listen(host, port)) throw Error("cannot listen on " + host + ":" + std::to_string(port));
}

void Service::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

const RunSnapshot& Service::snapshot() const { return impl_->snap; }

}  // namespace agrisk
