// agrisk command-line tool.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "agrisk/error.hpp"
#include "agrisk/pipeline.hpp"
#include "agrisk/qa.hpp"
#include "agrisk/service.hpp"

namespace fs = std::filesystem;
using namespace agrisk;

namespace {

struct GlobalOptions {
  std::optional<std::string> config;
  std::optional<std::string> out;
  std::optional<std::string> data_dir;
  std::optional<std::string> corpus;
};

struct FitOptions {
  std::optional<std::string> variant;
  std::optional<int> topics;
  std::optional<std::uint64_t> seed;
  std::optional<int> iterations;
};

struct IngestOptions {
  std::optional<std::string> format;
  std::optional<std::string> from;
  std::optional<std::string> to;
};

struct QaOptions {
  int topic = 0;
  std::optional<std::string> doc;
  std::optional<std::string> remote;
  std::optional<std::string> question;
};

int fail(int code, const std::string& message) {
  std::cerr << "agrisk: error: " << message << '\n';
  return code;
}

PipelineConfig resolve_config(const GlobalOptions& g, const FitOptions& fit, const IngestOptions& ingest) {
  auto config = PipelineConfig::defaults();
  if (g.data_dir) config.data_dir = fs::absolute(*g.data_dir);
  if (g.config) config = load_config(*g.config, config);
  if (g.data_dir) config.data_dir = fs::absolute(*g.data_dir);
  if (g.corpus) config.corpus = fs::absolute(*g.corpus);
  if (g.out) config.output_dir = fs::absolute(*g.out);
  config.output_dir = fs::absolute(config.output_dir);

  if (ingest.format) {
    try {
      config.corpus_format = parse_corpus_format(*ingest.format);
    } catch (const ArgumentError& e) {
      throw ConfigError(e.what());
    }
  }
  auto date = [](const std::string& text) {
    const auto d = Date::parse(text);
    if (!d) throw ConfigError("invalid date '" + text + "' (expected YYYY-MM-DD)");
    return *d;
  };
  if (ingest.from) config.date_from = date(*ingest.from);
  if (ingest.to) config.date_to = date(*ingest.to);

  if (fit.variant) {
    try {
      config.variant = parse_model_variant(*fit.variant);
    } catch (const ArgumentError& e) {
      throw ConfigError(e.what());
    }
  }
  if (fit.topics) config.lda.num_topics = *fit.topics;
  if (fit.seed) config.lda.seed = *fit.seed;
  if (fit.iterations) config.lda.iterations = *fit.iterations;
  return config;
}

void print_report(const std::vector<TopicScore>& report) {
  std::printf("%-5s  %-28s  %10s  %6s  %s\n", "topic", "label", "SS", "n_docs", "class");
  for (const auto& row : report) {
    std::printf("%-5d  %-28s  %10.6f  %6zu  %s%s\n", row.topic, row.label.c_str(), row.ss, row.n_docs,
                std::string(to_string(row.cls)).c_str(), row.empty_cluster ? " (empty cluster)" : "");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uncertainty extraction and scoring over news corpora"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  app.add_option("--config", g.config, "JSON config file");
  app.add_option("--out", g.out, "Run directory for artifacts");
  app.add_option("--data-dir", g.data_dir, "Directory holding lexicons and resources");
  app.add_option("--corpus", g.corpus, "Corpus file (csv or jsonl)");

  FitOptions fit;
  IngestOptions ingest;
  QaOptions qa;
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string dest;
  std::string report_format = "table";

  auto* run = app.add_subcommand("run", "Run every stage");
  auto* ingest_cmd = app.add_subcommand("ingest", "Load and validate the corpus");
  auto* preprocess_cmd = app.add_subcommand("preprocess", "Tokenize, lemmatize and segment documents");
  auto* fit_cmd = app.add_subcommand("fit", "Build the vocabulary and fit the topic model");
  auto* score_cmd = app.add_subcommand("score", "Score document sentiment and topic uncertainty");
  auto* report_cmd = app.add_subcommand("report", "Print the topic uncertainty report");
  auto* qa_cmd = app.add_subcommand("qa", "Evaluate a topic with extractive question answering");
  auto* serve_cmd = app.add_subcommand("serve", "Serve a completed run over HTTP");
  auto* export_cmd = app.add_subcommand("export", "Copy a run's artifacts and manifest");

  for (auto* cmd : {run, ingest_cmd}) {
    cmd->add_option("--format", ingest.format, "Corpus format: csv or jsonl");
    cmd->add_option("--from", ingest.from, "Earliest publication date (YYYY-MM-DD)");
    cmd->add_option("--to", ingest.to, "Latest publication date (YYYY-MM-DD)");
  }
  for (auto* cmd : {run, fit_cmd}) {
    cmd->add_option("--variant", fit.variant, "plain, tfidf or guided");
    cmd->add_option("--topics", fit.topics, "Number of topics");
    cmd->add_option("--seed", fit.seed, "Sampler seed");
    cmd->add_option("--iterations", fit.iterations, "Gibbs sweeps");
  }
  report_cmd->add_option("--format", report_format, "table, csv or json")
      ->check(CLI::IsMember({"table", "csv", "json"}));
  qa_cmd->add_option("--topic", qa.topic, "Topic index")->required();
  qa_cmd->add_option("--doc", qa.doc, "Document id (default: highest-theta document of the topic)");
  qa_cmd->add_option("--remote", qa.remote, "Remote QA endpoint URL");
  qa_cmd->add_option("--question", qa.question, "Question overriding the formulated one");
  serve_cmd->add_option("--port", port, "Port to listen on");
  serve_cmd->add_option("--host", host, "Address to bind");
  export_cmd->add_option("--dest", dest, "Destination directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_code::kUsage;
  }

  PipelineConfig config;
  try {
    config = resolve_config(g, fit, ingest);
    std::cerr << "# resolved config\n" << config_to_json(config);
  } catch (const ConfigError& e) {
    return fail(exit_code::kConfig, e.what());
  } catch (const Error& e) {
    return fail(exit_code::kConfig, e.what());
  }
  const auto& dir = config.output_dir;

  auto stages = [&](std::vector<Stage> list) -> int {
    try {
      run_stages(list, config);
    } catch (const ConfigError& e) {
      return fail(exit_code::kConfig, e.what());
    } catch (const LockError& e) {
      return fail(exit_code::kLock, e.what());
    } catch (const StageError& e) {
      return fail(e.exit_code(), e.what());
    }
    std::cerr << "artifacts written to " << dir.string() << '\n';
    return exit_code::kOk;
  };

  if (run->parsed()) {
    const auto& all = all_stages();
    return stages({all.begin(), all.end()});
  }
  if (ingest_cmd->parsed()) return stages({Stage::Ingest});
  if (preprocess_cmd->parsed()) return stages({Stage::Preprocess});
  if (fit_cmd->parsed()) return stages({Stage::Vectorize, Stage::Fit});
  if (score_cmd->parsed()) return stages({Stage::Sentiment, Stage::Scoring});

  if (report_cmd->parsed()) {
    try {
      const auto path = dir / artifact::kReportJson;
      std::ifstream in(path);
      if (!in) throw ArgumentError("missing " + path.string() + " (run 'score' first)");
      const auto report = read_report_json(in);
      if (report_format == "json") {
        write_report_json(report, std::cout);
      } else if (report_format == "csv") {
        write_report_csv(report, std::cout);
      } else {
        print_report(report);
      }
    } catch (const Error& e) {
      return fail(exit_code::kScoring, std::string("report: ") + e.what());
    }
    return exit_code::kOk;
  }

  if (qa_cmd->parsed()) {
    try {
      const auto snap = RunSnapshot::load(dir);
      EvaluationRequest request;
      request.topic = qa.topic;
      request.doc_id = qa.doc;
      request.question = qa.question;
      request.question_template = snap.config.question_template;
      request.question_words = snap.config.question_words;
      request.remote_endpoint = qa.remote ? qa.remote : snap.config.qa_endpoint;
      request.timeout_seconds = snap.config.qa_timeout;
      request.qa = snap.config.qa;
      const auto record = evaluate_uncertainty(request, snap.model, snap.vocab, snap.corpus, snap.report, snap.text);
      write_evaluation_json(record, std::cout);
    } catch (const Error& e) {
      return fail(exit_code::kQa, std::string("qa: ") + e.what());
    }
    return exit_code::kOk;
  }

  if (serve_cmd->parsed()) {
    try {
      Service service(RunSnapshot::load(dir));
      std::cerr << "serving " << dir.string() << " on http://" << host << ':' << port << '\n';
      service.listen(host, port);
    } catch (const Error& e) {
      return fail(exit_code::kServe, std::string("serve: ") + e.what());
    }
    return exit_code::kOk;
  }

  if (export_cmd->parsed()) {
    try {
      export_run(dir, fs::absolute(dest));
    } catch (const std::exception& e) {
      return fail(exit_code::kExport, std::string("export: ") + e.what());
    }
    std::cerr << "exported " << dir.string() << " to " << dest << '\n';
    return exit_code::kOk;
  }
  return exit_code::kUsage;
}
