#include "agrisk/scoring.hpp"

#include <algorithm>
#include <cstdio>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "agrisk/error.hpp"

namespace agrisk {
namespace {

std::string format_score(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.9g", v);
  return buffer;
}

}  // namespace

std::string_view to_string(UncertaintyClass cls) {
  switch (cls) {
    case UncertaintyClass::Opportunity:
      return "opportunity";
    case UncertaintyClass::Risk:
      return "risk";
    case UncertaintyClass::NeedsContext:
      return "needs-context";
  }
  return "needs-context";
}

UncertaintyClass parse_uncertainty_class(std::string_view name) {
  if (name == "opportunity") return UncertaintyClass::Opportunity;
  if (name == "risk") return UncertaintyClass::Risk;
  if (name == "needs-context") return UncertaintyClass::NeedsContext;
  throw ArgumentError("unknown uncertainty class '" + std::string(name) + "'");
}

std::string_view to_string(TopicWeighting weighting) {
  return weighting == TopicWeighting::Theta ? "theta" : "unweighted";
}

TopicWeighting parse_topic_weighting(std::string_view name) {
  if (name == "theta") return TopicWeighting::Theta;
  if (name == "unweighted") return TopicWeighting::Unweighted;
  throw ArgumentError("unknown topic weighting '" + std::string(name) + "' (expected theta or unweighted)");
}

std::vector<std::vector<std::size_t>> cluster_by_dominant_topic(const DenseMatrix& theta) {
  std::vector<std::vector<std::size_t>> clusters(theta.cols());
  if (theta.cols() == 0) return clusters;
  for (std::size_t d = 0; d < theta.rows(); ++d) {
    clusters[static_cast<std::size_t>(dominant_topic(theta.row(d)).first)].push_back(d);
  }
  return clusters;
}

double topic_sentiment_score(std::span<const std::size_t> cluster, std::span<const double> compounds,
                             const DenseMatrix& theta, int topic, TopicWeighting weighting) {
  if (cluster.empty()) return 0.0;
  if (topic < 0 || static_cast<std::size_t>(topic) >= theta.cols()) {
    throw ArgumentError("topic index " + std::to_string(topic) + " out of range");
  }
  double num = 0.0;
  double den = 0.0;
  double lo = 1.0;
  double hi = -1.0;
  for (const auto d : cluster) {
    if (d >= compounds.size() || d >= theta.rows()) {
      throw ArgumentError("document index " + std::to_string(d) + " has no compound score");
    }
    const double w = weighting == TopicWeighting::Theta ? theta(d, static_cast<std::size_t>(topic)) : 1.0;
    num += w * compounds[d];
    den += w;
    lo = std::min(lo, compounds[d]);
    hi = std::max(hi, compounds[d]);
  }
  if (!(den > 0.0)) throw ArgumentError("cluster weights sum to zero");
  return std::clamp(num / den, lo, hi);
}

UncertaintyClass classify_uncertainty(double ss, const ClassThresholds& thresholds) {
  if (ss >= thresholds.positive) return UncertaintyClass::Opportunity;
  if (ss <= thresholds.negative) return UncertaintyClass::Risk;
  return UncertaintyClass::NeedsContext;
}

std::vector<TopicScore> score_report(const TopicModel& model, std::span<const double> compounds,
                                     TopicWeighting weighting, const ClassThresholds& thresholds) {
  if (compounds.size() != model.theta.rows()) {
    throw ArgumentError("compound count (" + std::to_string(compounds.size()) +
                        ") differs from model documents (" + std::to_string(model.theta.rows()) + ")");
  }
  const auto clusters = cluster_by_dominant_topic(model.theta);
  std::vector<TopicScore> report;
  for (int k = 0; k < model.num_topics; ++k) {
    const auto& cluster = clusters[static_cast<std::size_t>(k)];
    TopicScore row;
    row.topic = k;
    row.label = model.label(k);
    row.n_docs = cluster.size();
    row.empty_cluster = cluster.empty();
    row.ss = topic_sentiment_score(cluster, compounds, model.theta, k, weighting);
    row.cls = classify_uncertainty(row.ss, thresholds);
    report.push_back(std::move(row));
  }
  return report;
}

void write_report_csv(std::span<const TopicScore> report, std::ostream& out) {
  out << "topic,label,SS,n_docs,class,empty_cluster\n";
  for (const auto& row : report) {
    out << row.topic << ',';
    write_csv_field(out, row.label);
    out << ',' << format_score(row.ss) << ',' << row.n_docs << ',' << to_string(row.cls) << ','
        << (row.empty_cluster ? "true" : "false") << '\n';
  }
}

void write_report_json(std::span<const TopicScore> report, std::ostream& out) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : report) {
    nlohmann::ordered_json j;
    j["topic"] = row.topic;
    j["label"] = row.label;
    j["SS"] = std::stod(format_score(row.ss));
    j["n_docs"] = row.n_docs;
    j["class"] = std::string(to_string(row.cls));
    j["empty_cluster"] = row.empty_cluster;
    rows.push_back(std::move(j));
  }
  out << rows.dump(2) << '\n';
}

std::vector<TopicScore> read_report_json(std::istream& in) {
  std::vector<TopicScore> report;
  try {
    const auto rows = nlohmann::json::parse(in);
    for (const auto& j : rows) {
      TopicScore row;
      row.topic = j.at("topic").get<int>();
      row.label = j.at("label").get<std::string>();
      row.ss = j.at("SS").get<double>();
      row.n_docs = j.at("n_docs").get<std::size_t>();
      row.cls = parse_uncertainty_class(j.at("class").get<std::string>());
      row.empty_cluster = j.value("empty_cluster", row.n_docs == 0);
      report.push_back(std::move(row));
    }
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError("report", std::string("invalid report JSON: ") + e.what());
  }
  return report;
}

}  // namespace agrisk
