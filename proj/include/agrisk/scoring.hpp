#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agrisk/topics.hpp"

namespace agrisk {

enum class UncertaintyClass { Opportunity, Risk, NeedsContext };

std::string_view to_string(UncertaintyClass cls);
UncertaintyClass parse_uncertainty_class(std::string_view name);

struct ClassThresholds {
  double positive = 0.05;
  double negative = -0.05;
};

enum class TopicWeighting { Theta, Unweighted };

std::string_view to_string(TopicWeighting weighting);
TopicWeighting parse_topic_weighting(std::string_view name);

struct TopicScore {
  int topic = 0;
  std::string label;
  double ss = 0.0;
  std::size_t n_docs = 0;
  UncertaintyClass cls = UncertaintyClass::NeedsContext;
  /// Set when the cluster is empty and `ss` carries no evidence.
  bool empty_cluster = false;

  bool operator==(const TopicScore&) const = default;
};

/// Partitions document indices by dominant topic. Always returns
/// theta.cols() clusters; some may be empty.
std::vector<std::vector<std::size_t>> cluster_by_dominant_topic(const DenseMatrix& theta);

/// Weighted mean of cluster compounds with weights theta[d][topic]
/// (or 1 when unweighted), clamped to the cluster's compound range.
/// An empty cluster scores 0.
double topic_sentiment_score(std::span<const std::size_t> cluster, std::span<const double> compounds,
                             const DenseMatrix& theta, int topic,
                             TopicWeighting weighting = TopicWeighting::Theta);

UncertaintyClass classify_uncertainty(double ss, const ClassThresholds& thresholds = {});

/// One TopicScore per topic, ordered by topic index.
std::vector<TopicScore> score_report(const TopicModel& model, std::span<const double> compounds,
                                     TopicWeighting weighting = TopicWeighting::Theta,
                                     const ClassThresholds& thresholds = {});

void write_report_csv(std::span<const TopicScore> report, std::ostream& out);
void write_report_json(std::span<const TopicScore> report, std::ostream& out);
std::vector<TopicScore> read_report_json(std::istream& in);

}  // namespace agrisk
