"""Joint document/label embeddings for genre and popularity prediction,
plus word-vector training and the word-analogy benchmark."""

from .analogy import (
    AnalogyReport,
    AnalogySet,
    analogy_eval,
    analogy_eval_vectors,
    format_analogy_report,
    load_analogies,
)
from .classify import (
    LinearModel,
    Prediction,
    knn_classify,
    label_vector_classify,
    linear_classify,
    train_linear,
    write_predictions_jsonl,
)
from .corpus import (
    Corpus,
    DatasetVersion,
    DedupReport,
    Document,
    binarize_popularity,
    dedup,
    ingest,
    jaccard,
    sample_to_size,
    shingle_set,
    split,
    tokenize,
    undersample,
    write_jsonl,
)
from .embed import (
    EmbeddingModel,
    Hyperparams,
    infer_doc_vector,
    train_doc2vec,
    train_word2vec,
)
from .evaluate import (
    AsymmetryReport,
    ConfusionMatrix,
    EvalReport,
    asymmetry_report,
    confusion,
    f1_scores,
    format_confusion,
    format_report,
)
from .model_io import export_text, load_model, read_text_vectors, save_model
from .pipelines import (
    PipelineResult,
    PopularityResult,
    run_genre_pipeline,
    run_popularity_pipeline,
)
from .synthetic import gen_synthetic, type_overlap
from .vocab import (
    NegativeTable,
    Vocabulary,
    build_negative_table,
    build_vocab,
    subsample_keep_prob,
)

__version__ = "0.1.0"

__all__ = [
    "AnalogyReport", "AnalogySet", "analogy_eval", "analogy_eval_vectors",
    "format_analogy_report", "load_analogies",
    "LinearModel", "Prediction", "knn_classify", "label_vector_classify",
    "linear_classify", "train_linear", "write_predictions_jsonl",
    "Corpus", "DatasetVersion", "DedupReport", "Document",
    "binarize_popularity", "dedup", "ingest", "jaccard", "sample_to_size",
    "shingle_set", "split", "tokenize", "undersample", "write_jsonl",
    "EmbeddingModel", "Hyperparams", "infer_doc_vector", "train_doc2vec",
    "train_word2vec",
    "AsymmetryReport", "ConfusionMatrix", "EvalReport", "asymmetry_report",
    "confusion", "f1_scores", "format_confusion", "format_report",
    "export_text", "load_model", "read_text_vectors", "save_model",
    "PipelineResult", "PopularityResult", "run_genre_pipeline",
    "run_popularity_pipeline",
    "gen_synthetic", "type_overlap",
    "NegativeTable", "Vocabulary", "build_negative_table", "build_vocab",
    "subsample_keep_prob",
]
