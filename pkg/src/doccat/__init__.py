"""Supervised document categorization toolkit for Bengali text.

Pipeline: corpus loading -> preprocessing -> feature engineering (TF-IDF or
chi-square selection) -> classifier training (NB, SGD, SVM) -> evaluation.
"""

from .corpus import (
    CategoryCounts,
    LabeledCorpus,
    LabeledDocument,
    load_dir,
    load_jsonl,
    save_jsonl,
    split_stats,
)
from .errors import DoccatError
from .evaluation import (
    BenchmarkResult,
    ConfusionMatrix,
    EvaluationReport,
    benchmark,
    confusion_matrix,
    evaluate,
    metrics_from_matrix,
)
from .features import (
    SparseVector,
    Vocabulary,
    build_vocabulary,
    chi_score_document,
    count_vector,
    idf,
    select_chi_features,
    tfidf_vector,
    vectorize_corpus,
)
from .models import (
    LinearModel,
    NBModel,
    TrainedModel,
    TrainHyperparams,
    load_model,
    predict_linear,
    predict_nb,
    save_model,
    train,
    train_nb,
    train_sgd,
    train_svm,
)
from .textprep import (
    PreprocessConfig,
    TokenizedDocument,
    default_config,
    preprocess_corpus,
    preprocess_document,
)

__version__ = "0.1.0"

__all__ = [
    "BenchmarkResult",
    "CategoryCounts",
    "ConfusionMatrix",
    "DoccatError",
    "EvaluationReport",
    "LabeledCorpus",
    "LabeledDocument",
    "LinearModel",
    "NBModel",
    "PreprocessConfig",
    "SparseVector",
    "TokenizedDocument",
    "TrainHyperparams",
    "TrainedModel",
    "Vocabulary",
    "benchmark",
    "build_vocabulary",
    "chi_score_document",
    "confusion_matrix",
    "count_vector",
    "default_config",
    "evaluate",
    "idf",
    "load_dir",
    "load_jsonl",
    "load_model",
    "metrics_from_matrix",
    "predict_linear",
    "predict_nb",
    "preprocess_corpus",
    "preprocess_document",
    "save_jsonl",
    "save_model",
    "select_chi_features",
    "split_stats",
    "tfidf_vector",
    "train",
    "train_nb",
    "train_sgd",
    "train_svm",
    "vectorize_corpus",
    "__version__",
]
