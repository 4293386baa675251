#include <doctest.h>

#include <sstream>

#include "agrisk/corpus.hpp"
#include "agrisk/error.hpp"
#include "oracles.hpp"

using namespace agrisk;

namespace {

Corpus from_csv(const std::string& text) {
  std::istringstream in(text);
  return read_csv_corpus(in);
}

const char* kHeader = "id,title,content,published,source\n";

}  // namespace

TEST_CASE("empty csv with header yields empty corpus") {
  CHECK(from_csv(kHeader).empty());
}

TEST_CASE("row with empty content cites its row number") {
  const std::string text = std::string(kHeader) +
                           "a,T,Some text.,2016-01-01,s\n"
                           "b,T,,2016-01-02,s\n"
                           "c,T,More text.,2016-01-03,s\n";
  try {
    from_csv(text);
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.row() == 2);
  }
}

TEST_CASE("missing column names the column") {
  try {
    from_csv("id,title,content,published\na,T,x,2016-01-01\n");
    FAIL("expected a schema error");
  } catch (const SchemaError& e) {
    CHECK(e.field() == "source");
  }
}

TEST_CASE("duplicate id names the id") {
  const std::string text = std::string(kHeader) + "a,T,x,2016-01-01,s\na,T,y,2016-01-02,s\n";
  try {
    from_csv(text);
    FAIL("expected a duplicate error");
  } catch (const DuplicateIdError& e) {
    CHECK(e.id() == "a");
  }
}

TEST_CASE("dates without a day are rejected") {
  CHECK_FALSE(Date::parse("2016-01").has_value());
  CHECK_FALSE(Date::parse("2016-02-30").has_value());
  CHECK(Date::parse("2016-02-29").has_value());
  CHECK_THROWS_AS(from_csv(std::string(kHeader) + "a,T,x,2016-01,s\n"), ValidationError);
}

TEST_CASE("quoted csv fields round-trip") {
  const std::string text = std::string(kHeader) +
                           "a,\"Title, with comma\",\"He said \"\"hi\"\"\nnext line\",2016-01-01,s\r\n";
  const auto corpus = from_csv(text);
  REQUIRE(corpus.size() == 1);
  CHECK(corpus[0].title == "Title, with comma");
  CHECK(corpus[0].content == "He said \"hi\"\nnext line");

  std::ostringstream out;
  write_csv_corpus(corpus, out);
  CHECK(from_csv(out.str()).documents() == corpus.documents());
}

TEST_CASE("bundled toy corpus") {
  const auto corpus = load_corpus(oracle::data_dir() / "toy_corpus.csv", CorpusFormat::Csv);
  REQUIRE(corpus.size() == 30);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const std::string id = (i < 10 ? "doc0" : "doc") + std::to_string(i);
    CHECK(corpus[i].id == id);
    CHECK(corpus.find(id) == &corpus[i]);
  }

  SUBCASE("jsonl round-trip is the identity") {
    std::ostringstream first;
    write_jsonl_corpus(corpus, first);
    std::istringstream in(first.str());
    const auto back = read_jsonl_corpus(in);
    CHECK(back.documents() == corpus.documents());
    std::ostringstream second;
    write_jsonl_corpus(back, second);
    CHECK(first.str() == second.str());
  }

  SUBCASE("date filtering") {
    CHECK(filter_by_date(corpus, *Date::parse("2015-01-01"), *Date::parse("2019-12-31")).size() == 27);

    Date lo = corpus[0].published, hi = corpus[0].published;
    for (const auto& d : corpus) {
      lo = std::min(lo, d.published);
      hi = std::max(hi, d.published);
    }
    CHECK(filter_by_date(corpus, lo, hi).documents() == corpus.documents());
    CHECK(filter_by_date(corpus, *Date::parse("2014-11-01"), *Date::parse("2015-01-31")).empty());
    CHECK_THROWS_AS(filter_by_date(corpus, hi, lo), ArgumentError);
  }

  SUBCASE("filtering preserves order") {
    const auto kept = filter_by_date(corpus, *Date::parse("2016-01-01"), *Date::parse("2018-12-31"));
    std::size_t prev = 0;
    for (const auto& d : kept) {
      const auto i = *corpus.index_of(d.id);
      CHECK(i >= prev);
      prev = i;
    }
  }
}
