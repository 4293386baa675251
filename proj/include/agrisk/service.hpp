#pragma once

#include <memory>
#include <string>

#include "agrisk/pipeline.hpp"

namespace agrisk {

/// Read-only HTTP API over a loaded run directory.
///
///   GET  /topics                  labels, top words, SS, class, n_docs
///   GET  /topics/{k}/documents    cluster members by descending theta
///   GET  /documents/{id}          document, sentences and their sentiment
///   GET  /scores                  topic report
///   POST /qa                      {doc_id, question, scorer} -> answer
///   GET  /manifest                run manifest
///
/// Errors are {"code", "stage", "message"} with a 4xx/5xx status.
class Service {
 public:
  explicit Service(RunSnapshot snapshot);
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Binds `host:port` (0 picks a free port), serves on a background
  /// thread and returns the bound port.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  /// Serves on the calling thread until stop().
  void listen(const std::string& host, int port);
  void stop();

  const RunSnapshot& snapshot() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace agrisk
