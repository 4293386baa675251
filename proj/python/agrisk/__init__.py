"""Topic uncertainty extraction and sentiment scoring for news corpora."""

import os as _os

_bundled = _os.path.join(_os.path.dirname(__file__), "data")
if "AGRISK_DATA_DIR" not in _os.environ and _os.path.isdir(_bundled):
    _os.environ["AGRISK_DATA_DIR"] = _bundled

from ._core import (
    AgriskError,
    DocTermMatrix,
    TextPipeline,
    TopicModel,
    ValenceLexicon,
    Vocabulary,
    answer_baseline,
    build_count_matrix,
    build_vocabulary,
    classify_uncertainty,
    default_data_dir,
    fit_lda,
    run_pipeline,
    score_sentence,
    score_text,
    segment_sentences,
    tfidf_transform,
    tokenize,
    top_words,
    topic_sentiment_score,
)

__all__ = [
    "AgriskError",
    "DocTermMatrix",
    "TextPipeline",
    "TopicModel",
    "ValenceLexicon",
    "Vocabulary",
    "answer_baseline",
    "build_count_matrix",
    "build_vocabulary",
    "classify_uncertainty",
    "default_data_dir",
    "fit_lda",
    "run_pipeline",
    "score_sentence",
    "score_text",
    "segment_sentences",
    "tfidf_transform",
    "tokenize",
    "top_words",
    "topic_sentiment_score",
]
