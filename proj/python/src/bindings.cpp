// Python bindings for the agrisk core.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "agrisk/error.hpp"
#include "agrisk/pipeline.hpp"
#include "agrisk/qa.hpp"
#include "agrisk/scoring.hpp"
#include "agrisk/sentiment.hpp"
#include "agrisk/topics.hpp"
#include "agrisk/vectorize.hpp"

namespace py = pybind11;
using namespace agrisk;

namespace {

py::array_t<double> to_numpy(const DenseMatrix& m) {
  py::array_t<double> out({m.rows(), m.cols()});
  auto view = out.mutable_unchecked<2>();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) view(r, c) = m(r, c);
  }
  return out;
}

py::dict scores_dict(const SentimentScores& s) {
  py::dict d;
  d["pos"] = s.pos;
  d["neg"] = s.neg;
  d["neu"] = s.neu;
  d["compound"] = s.compound;
  return d;
}

py::dict topic_score_dict(const TopicScore& t) {
  py::dict d;
  d["topic"] = t.topic;
  d["label"] = t.label;
  d["SS"] = t.ss;
  d["n_docs"] = t.n_docs;
  d["class"] = std::string(to_string(t.cls));
  d["empty_cluster"] = t.empty_cluster;
  return d;
}

VocabularyOptions vocab_options(std::size_t min_df, double max_df_ratio, std::optional<std::size_t> max_terms,
                                const std::string& ranking) {
  VocabularyOptions o;
  o.min_df = min_df;
  o.max_df_ratio = max_df_ratio;
  o.max_terms = max_terms.value_or(VocabularyOptions::kUnlimited);
  if (ranking == "total") {
    o.ranking = FrequencyRanking::TotalFrequency;
  } else if (ranking == "df") {
    o.ranking = FrequencyRanking::DocumentFrequency;
  } else {
    throw ArgumentError("ranking must be 'total' or 'df'");
  }
  return o;
}

ValenceLexicon default_lexicon() {
  const auto dir = default_data_dir();
  return ValenceLexicon::load(dir / "vader_lexicon.txt", dir / "vader_rules.json");
}

TextPipeline default_pipeline() {
  const auto dir = default_data_dir();
  return TextPipeline::load(dir / "stopwords_en.txt", dir / "lemmas_en.tsv");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Topic uncertainty extraction and sentiment scoring";

  py::register_exception<Error>(m, "AgriskError");

  m.def("tokenize", &tokenize, py::arg("text"));
  m.def(
      "segment_sentences", [](const std::string& text) { return segment_sentences(text); }, py::arg("text"));

  py::class_<TextPipeline>(m, "TextPipeline")
      .def_static("load", &TextPipeline::load, py::arg("stopwords"), py::arg("lemmas"))
      .def_static("default", &default_pipeline)
      .def("terms", &TextPipeline::terms, py::arg("text"));

  py::class_<Vocabulary>(m, "Vocabulary")
      .def("__len__", &Vocabulary::size)
      .def("__contains__", [](const Vocabulary& v, const std::string& t) { return v.contains(t); })
      .def_property_readonly("terms", &Vocabulary::terms)
      .def("df", &Vocabulary::df)
      .def("id", &Vocabulary::id);

  m.def(
      "build_vocabulary",
      [](const std::vector<std::vector<std::string>>& docs, std::size_t min_df, double max_df_ratio,
         std::optional<std::size_t> max_terms, const std::string& ranking) {
        return build_vocabulary(docs, vocab_options(min_df, max_df_ratio, max_terms, ranking));
      },
      py::arg("documents"), py::arg("min_df") = 15, py::arg("max_df_ratio") = 0.9, py::arg("max_terms") = 3000,
      py::arg("ranking") = "total");

  py::class_<DocTermMatrix>(m, "DocTermMatrix")
      .def_property_readonly("n_docs", &DocTermMatrix::n_docs)
      .def_readonly("vocab_size", &DocTermMatrix::vocab_size)
      .def_readonly("doc_ids", &DocTermMatrix::doc_ids)
      .def_property_readonly("kind", [](const DocTermMatrix& x) { return std::string(to_string(x.kind)); })
      .def("row", [](const DocTermMatrix& x, std::size_t d) {
        std::vector<std::pair<TermId, double>> out;
        for (const auto& tw : x.rows.at(d)) out.emplace_back(tw.term, tw.weight);
        return out;
      });

  m.def(
      "build_count_matrix",
      [](const std::vector<std::vector<std::string>>& docs, const Vocabulary& vocab) {
        return build_count_matrix(docs, vocab);
      },
      py::arg("documents"), py::arg("vocabulary"));
  m.def("tfidf_transform", &tfidf_transform, py::arg("counts"));

  py::class_<TopicModel>(m, "TopicModel")
      .def_readonly("num_topics", &TopicModel::num_topics)
      .def_readonly("alpha", &TopicModel::alpha)
      .def_readonly("beta", &TopicModel::beta)
      .def_readonly("doc_ids", &TopicModel::doc_ids)
      .def_property_readonly("variant", [](const TopicModel& t) { return std::string(to_string(t.variant)); })
      .def_property_readonly("phi", [](const TopicModel& t) { return to_numpy(t.phi); })
      .def_property_readonly("theta", [](const TopicModel& t) { return to_numpy(t.theta); })
      .def("label", &TopicModel::label);

  m.def(
      "fit_lda",
      [](const DocTermMatrix& matrix, int num_topics, std::optional<double> alpha, double beta, int iterations,
         int burn_in, int sample_lag, std::uint64_t seed) {
        LdaOptions o;
        o.num_topics = num_topics;
        o.alpha = alpha;
        o.beta = beta;
        o.iterations = iterations;
        o.burn_in = burn_in;
        o.sample_lag = sample_lag;
        o.seed = seed;
        py::gil_scoped_release release;
        return fit_lda(matrix, o);
      },
      py::arg("matrix"), py::arg("num_topics") = 6, py::arg("alpha") = py::none(), py::arg("beta") = 0.01,
      py::arg("iterations") = 1000, py::arg("burn_in") = 200, py::arg("sample_lag") = 10, py::arg("seed") = 1);

  m.def("top_words", &top_words, py::arg("model"), py::arg("vocabulary"), py::arg("topic"), py::arg("n") = 10);

  py::class_<ValenceLexicon>(m, "ValenceLexicon")
      .def_static("load", &ValenceLexicon::load, py::arg("lexicon"), py::arg("rules"))
      .def_static("default", &default_lexicon);

  m.def(
      "score_sentence",
      [](const std::string& s, const ValenceLexicon& lex) { return scores_dict(score_sentence(s, lex)); },
      py::arg("sentence"), py::arg("lexicon"));
  m.def(
      "score_text",
      [](const std::string& s, const ValenceLexicon& lex, const std::string& aggregation) {
        return scores_dict(score_text(s, lex, parse_document_aggregation(aggregation)));
      },
      py::arg("text"), py::arg("lexicon"), py::arg("aggregation") = "mean");

  m.def(
      "topic_sentiment_score",
      [](const std::vector<double>& compounds, const std::vector<double>& weights) {
        if (compounds.size() != weights.size()) throw ArgumentError("compounds and weights differ in length");
        DenseMatrix theta(compounds.size(), 1);
        std::vector<std::size_t> cluster(compounds.size());
        for (std::size_t i = 0; i < compounds.size(); ++i) {
          theta(i, 0) = weights[i];
          cluster[i] = i;
        }
        return topic_sentiment_score(cluster, compounds, theta, 0, TopicWeighting::Theta);
      },
      py::arg("compounds"), py::arg("weights"));
  m.def(
      "classify_uncertainty",
      [](double ss, double positive, double negative) {
        return std::string(to_string(classify_uncertainty(ss, {positive, negative})));
      },
      py::arg("ss"), py::arg("positive") = 0.05, py::arg("negative") = -0.05);

  m.def(
      "answer_baseline",
      [](const std::string& context, const std::string& question, const TextPipeline& pipeline,
         int max_span_len, double length_penalty) {
        const auto a = answer_baseline({context, question}, pipeline, {max_span_len, length_penalty});
        py::dict d;
        d["text"] = a.text;
        d["start"] = a.start;
        d["end"] = a.end;
        d["score"] = a.score;
        d["low_confidence"] = a.low_confidence;
        return d;
      },
      py::arg("context"), py::arg("question"), py::arg("pipeline"), py::arg("max_span_len") = 30,
      py::arg("length_penalty") = 0.05);

  m.def(
      "run_pipeline",
      [](const std::filesystem::path& config_path, const std::filesystem::path& output_dir) {
        auto config = load_config(config_path);
        config.output_dir = output_dir;
        RunArtifacts run;
        {
          py::gil_scoped_release release;
          run = run_pipeline(config);
        }
        py::list report;
        for (const auto& row : run.report) report.append(topic_score_dict(row));
        return report;
      },
      py::arg("config"), py::arg("output_dir"));

  m.def("default_data_dir", &default_data_dir);
}
