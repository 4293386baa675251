#include <doctest.h>

#include <chrono>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "agrisk/error.hpp"
#include "agrisk/qa.hpp"
#include "oracles.hpp"

using namespace agrisk;

namespace {

const TextPipeline& pipeline() {
  static const TextPipeline p = oracle::text_pipeline();
  return p;
}

/// Local HTTP stub answering POST /qa with a fixed handler.
class StubServer {
 public:
  explicit StubServer(httplib::Server::Handler handler) {
    server_.Post("/qa", std::move(handler));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/qa"; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

nlohmann::json reply(const std::string& answer, int start, int end, double score = 0.9) {
  return {{"answer", answer}, {"start", start}, {"end", end}, {"score", score}};
}

}  // namespace

TEST_CASE("baseline picks the verbatim run of question terms") {
  const QAQuery q{"Heavy rains hit the coast. Maize prices rose sharply in March. Farmers waited.",
                  "What happened to maize prices?"};
  const auto a = answer_baseline(q, pipeline());
  CHECK(a.text == "Maize prices");
  CHECK(a.start == 5);
  CHECK(a.end == 7);
  CHECK_FALSE(a.low_confidence);
}

TEST_CASE("baseline with no shared terms returns the first token") {
  const QAQuery q{"Heavy rains hit the coast.", "Who won the election?"};
  const auto a = answer_baseline(q, pipeline());
  CHECK(a.start == 0);
  CHECK(a.end == 1);
  CHECK(a.text == "Heavy");
  CHECK(a.score <= 0.0);
  CHECK(a.low_confidence);
}

TEST_CASE("baseline errors") {
  CHECK_THROWS_AS(answer_baseline({"", "What?"}, pipeline()), ArgumentError);
  CHECK_THROWS_AS(answer_baseline({"...", "What?"}, pipeline()), ArgumentError);
  CHECK_THROWS_AS(answer_baseline({"Rain fell.", "  "}, pipeline()), ArgumentError);
}

TEST_CASE("baseline equals exhaustive search") {
  for (const auto& pair : oracle::random_qa_pairs(2024, 60)) {
    const auto a = answer_baseline({pair.context, pair.question}, pipeline());
    const auto b = oracle::qa_brute_force(pair.context, pair.question, pipeline());
    INFO(pair.question);
    CHECK(a.start == b.start);
    CHECK(a.end == b.end);
    CHECK(a.score == b.score);

    const auto tokens = tokenize_with_offsets(pair.context);
    REQUIRE(a.end <= tokens.size());
    CHECK(a.start < a.end);
    CHECK(a.text == pair.context.substr(tokens[a.start].begin, tokens[a.end - 1].end - tokens[a.start].begin));
  }
}

TEST_CASE("formulate_question") {
  const std::vector<std::string> words{"seed", "disease", "city"};
  CHECK(formulate_question(words) == "What is said about seed, disease and city?");
  CHECK(formulate_question(words, "What is said about {w1}, {w2} and {w3}?") ==
        "What is said about seed, disease and city?");
  CHECK(formulate_question(std::vector<std::string>{"drought"}) == "What is said about drought?");
  CHECK(formulate_question(words, "Tell me: {w3} / {w1}") == "Tell me: city / seed");
  CHECK_THROWS_AS(formulate_question(words, "{w4}"), ArgumentError);
  CHECK_THROWS_AS(formulate_question(std::vector<std::string>{}), ArgumentError);

  const auto q = formulate_question(words);
  for (const auto& w : words) {
    const auto first = q.find(w);
    CHECK(first != std::string::npos);
    CHECK(q.find(w, first + 1) == std::string::npos);
  }
}

TEST_CASE("remote client") {
  const std::string context = "Rains returned early. Farmers planted maize.";

  SUBCASE("valid span") {
    StubServer stub([](const httplib::Request& req, httplib::Response& res) {
      const auto body = nlohmann::json::parse(req.body);
      CHECK(body.at("question") == "When did rains return?");
      res.set_content(reply("Rains returned early", 0, 3).dump(), "application/json");
    });
    const auto a = answer_remote(stub.url(), {context, "When did rains return?"});
    CHECK(a.text == "Rains returned early");
    CHECK(a.start == 0);
    CHECK(a.end == 3);
    CHECK(a.score == 0.9);
  }

  SUBCASE("text that is not the span") {
    StubServer stub([](const httplib::Request&, httplib::Response& res) {
      res.set_content(reply("Rains maize", 0, 3).dump(), "application/json");
    });
    CHECK_THROWS_AS(answer_remote(stub.url(), {context, "Q?"}), IntegrityError);
  }

  SUBCASE("offsets outside the context") {
    StubServer stub([](const httplib::Request&, httplib::Response& res) {
      res.set_content(reply("maize", 5, 9).dump(), "application/json");
    });
    CHECK_THROWS_AS(answer_remote(stub.url(), {context, "Q?"}), IntegrityError);
  }

  SUBCASE("timeout") {
    StubServer stub([](const httplib::Request&, httplib::Response& res) {
      std::this_thread::sleep_for(std::chrono::milliseconds(600));
      res.set_content(reply("maize", 5, 6).dump(), "application/json");
    });
    CHECK_THROWS_AS(answer_remote(stub.url(), {context, "Q?"}, 0.2), TransportError);
  }

  SUBCASE("server error and refused connection") {
    StubServer stub([](const httplib::Request&, httplib::Response& res) { res.status = 500; });
    CHECK_THROWS_AS(answer_remote(stub.url(), {context, "Q?"}), TransportError);
    CHECK_THROWS_AS(answer_remote("http://127.0.0.1:1/qa", {context, "Q?"}, 0.5), TransportError);
  }
}

TEST_CASE("evaluate_uncertainty") {
  const std::vector<std::string> docs{"Maize prices rose sharply. Traders were happy.",
                                      "Drought hit the north. Cattle died."};
  Corpus corpus({{"a", "", docs[0], {}, "s"}, {"b", "", docs[1], {}, "s"}});
  const std::vector<std::vector<std::string>> tokens{pipeline().terms(docs[0]), pipeline().terms(docs[1])};
  VocabularyOptions vo;
  vo.min_df = 1;
  vo.max_df_ratio = 1.0;
  const auto vocab = build_vocabulary(tokens, vo);

  TopicModel model;
  model.num_topics = 2;
  model.doc_ids = {"a", "b"};
  model.theta = DenseMatrix(2, 2);
  model.theta(0, 0) = 0.9;
  model.theta(0, 1) = 0.1;
  model.theta(1, 0) = 0.3;
  model.theta(1, 1) = 0.7;
  model.phi = DenseMatrix(2, vocab.size(), 0.01);
  model.phi(0, *vocab.id("maize")) = 0.5;
  model.phi(0, *vocab.id("price")) = 0.4;
  const std::vector<TopicScore> report{{0, "Topic 0", 0.39, 1, UncertaintyClass::Opportunity, false},
                                       {1, "Topic 1", -0.4, 1, UncertaintyClass::Risk, false}};

  EvaluationRequest req;
  req.topic = 0;
  req.question_words = 2;
  const auto rec = evaluate_uncertainty(req, model, vocab, corpus, report, pipeline());
  CHECK(rec.doc_id == "a");
  CHECK(rec.question == "What is said about maize and price?");
  CHECK(rec.answer.text == "Maize prices");
  CHECK(rec.ss == 0.39);
  CHECK(rec.cls == UncertaintyClass::Opportunity);
  CHECK(rec.scorer == "baseline");

  SUBCASE("document outside the cluster") {
    req.doc_id = "b";
    CHECK_THROWS_AS(evaluate_uncertainty(req, model, vocab, corpus, report, pipeline()), ArgumentError);
  }

  SUBCASE("unreachable remote falls back with provenance") {
    req.remote_endpoint = "http://127.0.0.1:1/qa";
    req.timeout_seconds = 0.5;
    const auto fallback = evaluate_uncertainty(req, model, vocab, corpus, report, pipeline());
    CHECK(fallback.answer.text == "Maize prices");
    CHECK(fallback.scorer.rfind("baseline (remote unavailable", 0) == 0);
  }

  SUBCASE("integrity failures are not masked") {
    StubServer stub([](const httplib::Request&, httplib::Response& res) {
      res.set_content(reply("nonsense", 0, 1).dump(), "application/json");
    });
    req.remote_endpoint = stub.url();
    CHECK_THROWS_AS(evaluate_uncertainty(req, model, vocab, corpus, report, pipeline()), IntegrityError);
  }
}
