#include <doctest.h>

#include <algorithm>

#include <httplib.h>
#include <json.hpp>

#include "agrisk/error.hpp"
#include "agrisk/service.hpp"
#include "oracles.hpp"
#include "tempdir.hpp"

using namespace agrisk;
using nlohmann::json;
using testing_support::slurp;
using testing_support::TempDir;

namespace {

struct Fixture {
  TempDir dir;
  std::unique_ptr<Service> service;
  std::unique_ptr<httplib::Client> client;

  Fixture() {
    auto base = PipelineConfig::defaults();
    base.data_dir = oracle::data_dir();
    auto config = load_config(oracle::data_dir() / "toy_config.json", base);
    config.output_dir = dir.path();
    run_pipeline(config);
    service = std::make_unique<Service>(RunSnapshot::load(dir.path()));
    const int port = service->start();
    client = std::make_unique<httplib::Client>("127.0.0.1", port);
  }

  json get(const std::string& path, int expect = 200) {
    const auto res = client->Get(path);
    REQUIRE(res);
    CHECK(res->status == expect);
    CHECK(res->get_header_value("Content-Type") == "application/json");
    return json::parse(res->body);
  }

  json post(const std::string& path, const std::string& body, int expect = 200) {
    const auto res = client->Post(path, body, "application/json");
    REQUIRE(res);
    CHECK(res->status == expect);
    return json::parse(res->body);
  }
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

}  // namespace

TEST_CASE("GET /topics") {
  auto& f = fixture();
  const auto topics = f.get("/topics");
  REQUIRE(topics.size() == 6);
  const auto& report = f.service->snapshot().report;
  for (std::size_t k = 0; k < 6; ++k) {
    CHECK(topics[k]["topic"] == k);
    CHECK(topics[k]["top_words"].size() == 10);
    CHECK(topics[k]["SS"].get<double>() == report[k].ss);
    CHECK(topics[k]["class"] == std::string(to_string(report[k].cls)));
    CHECK(topics[k]["n_docs"] == report[k].n_docs);
  }
  CHECK(f.get("/topics") == topics);
}

TEST_CASE("GET /topics/{k}/documents matches the clustering") {
  auto& f = fixture();
  const auto& snap = f.service->snapshot();
  const auto clusters = cluster_by_dominant_topic(snap.model.theta);
  for (std::size_t k = 0; k < 6; ++k) {
    auto expected = clusters[k];
    std::stable_sort(expected.begin(), expected.end(),
                     [&](auto a, auto b) { return snap.model.theta(a, k) > snap.model.theta(b, k); });
    const auto docs = f.get("/topics/" + std::to_string(k) + "/documents");
    REQUIRE(docs.size() == expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
      CHECK(docs[i]["doc_id"] == snap.model.doc_ids[expected[i]]);
      CHECK(docs[i]["theta"].get<double>() == snap.model.theta(expected[i], k));
      CHECK(docs[i]["compound"].is_number());
    }
  }
  const auto missing = f.get("/topics/6/documents", 404);
  CHECK(missing["code"] == "not_found");
  CHECK(missing.contains("stage"));
  CHECK(missing.contains("message"));
}

TEST_CASE("GET /documents/{id}") {
  auto& f = fixture();
  const auto doc = f.get("/documents/doc05");
  CHECK(doc["id"] == "doc05");
  CHECK(doc["sentences"].size() == 4);
  CHECK(doc["sentences"][0]["text"] == "The fall armyworm pest has devastated maize crops across southern Africa.");
  CHECK(doc["sentences"][0]["sentiment"].contains("compound"));
  CHECK(doc["theta"].size() == 6);
  CHECK(doc["dominant_topic"].is_number_integer());
  CHECK(f.get("/documents/nope", 404)["code"] == "not_found");
}

TEST_CASE("GET /scores and /manifest") {
  auto& f = fixture();
  const auto scores = f.get("/scores");
  CHECK(scores == json::parse(slurp(f.dir / "report.json")));
  CHECK(f.get("/manifest") == json::parse(slurp(f.dir / "manifest.json")));
  CHECK(f.get("/nothing/here", 404)["code"] == "not_found");
}

TEST_CASE("POST /qa") {
  auto& f = fixture();
  const auto manifest_before = slurp(f.dir / "manifest.json");

  const auto answer = f.post("/qa", R"({"doc_id": "doc05", "question": "Which maize crops?"})");
  CHECK(answer["answer"]["text"] == "maize crops");
  CHECK(answer["provenance"]["scorer"] == "baseline");

  CHECK(f.post("/qa", "not json", 400)["code"] == "bad_request");
  CHECK(f.post("/qa", R"({"doc_id": "doc05"})", 400)["code"] == "bad_request");
  CHECK(f.post("/qa", R"({"doc_id": "zzz", "question": "What?"})", 404)["code"] == "not_found");
  CHECK(f.post("/qa", R"({"doc_id": "doc05", "question": "What?", "scorer": "oracle"})", 400)["code"] ==
        "bad_request");
  CHECK(f.post("/qa", R"({"doc_id": "doc05", "question": "What?", "scorer": "remote"})", 400)["code"] ==
        "bad_request");
  CHECK(slurp(f.dir / "manifest.json") == manifest_before);
}

TEST_CASE("incomplete run directory is refused") {
  TempDir empty;
  CHECK_THROWS_AS(RunSnapshot::load(empty.path()), ArgumentError);
}
