// Readers for the tab-separated golden files under tests/data.
#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "oracles.hpp"

namespace golden {

struct SentimentRow {
  std::string text;
  double pos = 0, neg = 0, neu = 0, compound = 0;
};

/// Rows of a "label \t pos \t neg \t neu \t compound" file, header skipped.
inline std::vector<SentimentRow> sentiment(const std::string& file) {
  std::ifstream in(oracle::test_data_dir() / file);
  if (!in) throw std::runtime_error("missing golden file " + file);
  std::vector<SentimentRow> rows;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream fields(line);
    SentimentRow r;
    std::string cell;
    std::getline(fields, r.text, '\t');
    std::getline(fields, cell, '\t');
    r.pos = std::stod(cell);
    std::getline(fields, cell, '\t');
    r.neg = std::stod(cell);
    std::getline(fields, cell, '\t');
    r.neu = std::stod(cell);
    std::getline(fields, cell, '\t');
    r.compound = std::stod(cell);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace golden
