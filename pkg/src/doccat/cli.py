"""Command-line interface: preprocess, train, predict, evaluate, benchmark.

Exit codes: 0 success, 1 data or runtime error, 2 usage error. Successful
runs print machine-parseable ``key=value`` lines (plus the comparison table
for ``benchmark``); diagnostics go to stderr. Hyperparameter precedence is
command-line flags, then an optional ``--config`` key=value file, then the
built-in defaults. All randomness flows from ``--seed``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import evaluation, models
from .corpus import LabeledCorpus, LabeledDocument, load_dir, load_jsonl
from .errors import DoccatError, MalformedLineError
from .fileio import atomic_write_text
from .models import TrainHyperparams
from .textprep import (
    PreprocessConfig,
    default_config,
    load_stopwords,
    load_suffix_table,
    preprocess_corpus,
    preprocess_document,
    tokenized_to_json,
)

HYPER_DEFAULTS = {
    "nb_alpha": 0.01,
    "sgd_alpha": 0.0001,
    "sgd_epochs": 50,
    "svm_c": 1.0,
    "chi_top_percent": 30.0,
    "chi_g_top_k": None,
    "seed": 42,
}

_HYPER_PARSERS = {
    "nb_alpha": float,
    "sgd_alpha": float,
    "sgd_epochs": int,
    "svm_c": float,
    "chi_top_percent": float,
    "chi_g_top_k": int,
    "seed": int,
}


@dataclass(frozen=True)
class CliConfig:
    """Fully resolved invocation: what will actually run."""

    subcommand: str
    hyper: TrainHyperparams
    selector: str | None = None
    classifier: str | None = None
    verbosity: int = 0


def _positive_float(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {text}")
    return value


def _percent(text: str) -> float:
    value = float(text)
    if not 0.0 < value <= 100.0:
        raise argparse.ArgumentTypeError(f"must be in (0, 100], got {text}")
    return value


def _hyper_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group("hyperparameters")
    group.add_argument("--nb-alpha", type=_positive_float, default=None,
                       help="NB smoothing (default 0.01)")
    group.add_argument("--sgd-alpha", type=_positive_float, default=None,
                       help="SGD L2 regularization strength (default 0.0001)")
    group.add_argument("--sgd-epochs", type=_positive_int, default=None,
                       help="SGD passes over the data (default 50)")
    group.add_argument("--svm-c", type=_positive_float, default=None,
                       help="SVM soft-margin penalty (default 1.0)")
    group.add_argument("--chi-top-percent", type=_percent, default=None,
                       help="share of each document's chi-ranked terms to keep (default 30)")
    group.add_argument("--chi-g-top-k", type=_positive_int, default=None,
                       help="restrict chi co-occurrence partners to the k most "
                            "frequent terms per document (default: all)")
    group.add_argument("--seed", type=int, default=None,
                       help="random seed for all shuffling (default 42)")
    group.add_argument("--config", default=None, metavar="FILE",
                       help="key=value file supplying hyperparameter defaults")
    return parent


def _preprocess_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    group = parent.add_argument_group("preprocessing")
    group.add_argument("--stopwords", default=None, metavar="FILE",
                       help="stopword file (default: shipped Bengali list)")
    group.add_argument("--suffixes", default=None, metavar="FILE",
                       help="suffix table file (default: shipped Bengali table)")
    group.add_argument("--no-stemming", action="store_true", help="disable stemming")
    group.add_argument("--no-stopwords", action="store_true", help="disable stopword removal")
    return parent


def _common_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("-v", "--verbose", action="count", default=0,
                        help="increase diagnostic output on stderr")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="doccat",
        description="Supervised document categorization for Bengali text.",
    )
    common = _common_flags()
    hyper = _hyper_flags()
    prep = _preprocess_flags()
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("preprocess", parents=[common, prep],
                       help="tokenize a corpus and write tokenized JSONL")
    p.add_argument("--corpus", required=True, help="JSONL file or directory-per-category root")
    p.add_argument("--out", required=True, help="output tokenized JSONL path")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("train", parents=[common, hyper, prep],
                       help="train one (features, classifier) pipeline")
    p.add_argument("--corpus", required=True, help="labeled training corpus")
    p.add_argument("--features", required=True, choices=("tfidf", "chi2"),
                   help="feature engineering pipeline")
    p.add_argument("--model", required=True, choices=("nb", "sgd", "svm"),
                   help="classifier to train")
    p.add_argument("--out", required=True, help="output model JSON path")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("predict", parents=[common, prep],
                       help="label raw documents with a trained model")
    p.add_argument("--model", required=True, help="model JSON file")
    p.add_argument("--input", required=True,
                   help="raw UTF-8 text file (one document) or JSONL with a 'text' field")
    p.add_argument("--out", default=None, help="output TSV path (default: stdout)")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("evaluate", parents=[common, prep],
                       help="score a trained model on a labeled corpus")
    p.add_argument("--model", required=True, help="model JSON file")
    p.add_argument("--corpus", required=True, help="labeled test corpus")
    p.add_argument("--report", default=None, help="write the full report JSON here")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("benchmark", parents=[common, hyper, prep],
                       help="train and evaluate all six method combinations")
    p.add_argument("--train", required=True, dest="train_corpus", help="training corpus")
    p.add_argument("--test", required=True, dest="test_corpus", help="test corpus")
    p.add_argument("--out-dir", default="benchmark_out",
                   help="directory for models, reports, and comparison.tsv")
    p.add_argument("--threads", type=_positive_int, default=os.cpu_count() or 1,
                   help="upper bound on concurrent pipelines")
    p.add_argument("--repro", action="store_true",
                   help="zero wall-clock fields in output files so runs with the "
                        "same seed are byte-identical")
    p.set_defaults(func=cmd_benchmark)
    return parser


def parse_config_file(path: str | Path) -> dict[str, str]:
    """Read a key=value hyperparameter file ('#' comments allowed)."""
    values: dict[str, str] = {}
    for line_no, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        entry = line.split("#", 1)[0].strip()
        if not entry:
            continue
        if "=" not in entry:
            raise ValueError(f"{path}:{line_no}: expected key=value")
        key, value = entry.split("=", 1)
        key = key.strip().replace("-", "_")
        if key not in HYPER_DEFAULTS:
            raise ValueError(f"{path}:{line_no}: unknown key {key!r}")
        values[key] = value.strip()
    return values


def resolve_hyper(args: argparse.Namespace) -> TrainHyperparams:
    """Apply the flags > config file > defaults precedence."""
    file_values = parse_config_file(args.config) if getattr(args, "config", None) else {}
    resolved = {}
    for name, default in HYPER_DEFAULTS.items():
        flag_value = getattr(args, name, None)
        if flag_value is not None:
            resolved[name] = flag_value
        elif name in file_values:
            resolved[name] = _HYPER_PARSERS[name](file_values[name])
        else:
            resolved[name] = default
    return TrainHyperparams(**resolved)


def resolve_cli_config(args: argparse.Namespace) -> CliConfig:
    return CliConfig(
        subcommand=args.subcommand,
        hyper=resolve_hyper(args),
        selector=getattr(args, "features", None),
        classifier=getattr(args, "model", None),
        verbosity=getattr(args, "verbose", 0),
    )


def build_preprocess_config(args: argparse.Namespace) -> PreprocessConfig:
    base = default_config()
    stopwords = load_stopwords(args.stopwords) if args.stopwords else base.stopword_list
    suffixes = load_suffix_table(args.suffixes) if args.suffixes else base.suffix_table
    return PreprocessConfig(
        stopword_list=stopwords,
        suffix_table=suffixes,
        strip_symbols=base.strip_symbols,
        enable_stemming=not args.no_stemming,
        enable_stopwords=not args.no_stopwords,
        lowercase_latin=base.lowercase_latin,
    )


def _load_corpus(path: str) -> LabeledCorpus:
    target = Path(path)
    if target.is_dir():
        return load_dir(target)
    return load_jsonl(target)


def _diag(args: argparse.Namespace, message: str) -> None:
    if getattr(args, "verbose", 0):
        print(message, file=sys.stderr)


def cmd_preprocess(args: argparse.Namespace) -> int:
    corpus = _load_corpus(args.corpus)
    _diag(args, f"loaded {len(corpus)} documents, {len(corpus.labels)} labels")
    config = build_preprocess_config(args)
    docs = preprocess_corpus(corpus, config)
    atomic_write_text(args.out, "\n".join(tokenized_to_json(doc) for doc in docs) + "\n")
    print(f"documents={len(docs)} tokens={sum(d.token_count for d in docs)} out={args.out}")
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    cli_config = resolve_cli_config(args)
    config = build_preprocess_config(args)
    corpus = _load_corpus(args.corpus)
    _diag(args, f"loaded {len(corpus)} documents, {len(corpus.labels)} labels")
    _diag(args, f"resolved hyperparameters: {cli_config.hyper}")
    trained = models.train(corpus, args.features, args.model, cli_config.hyper, config)
    models.save_model(trained, args.out)
    print(
        f"features={len(trained.vocabulary)} train_sec={trained.train_seconds:.4f} "
        f"model={args.out}"
    )
    return 0


def _load_predict_documents(path: str) -> list[LabeledDocument]:
    """Prediction input: unlabeled JSONL ('text' required) or one raw text file."""
    target = Path(path)
    if target.suffix == ".jsonl":
        docs = []
        for line_no, line in enumerate(
            target.read_text(encoding="utf-8").split("\n"), start=1
        ):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedLineError(str(target), line_no, f"invalid JSON: {exc.msg}") from exc
            if not isinstance(obj, dict) or not isinstance(obj.get("text"), str):
                raise MalformedLineError(str(target), line_no, "missing string field 'text'")
            doc_id = obj.get("id") or f"{target.name}:{line_no}"
            docs.append(LabeledDocument(id=doc_id, text=obj["text"], label=obj.get("label") or "-"))
        if not docs:
            raise MalformedLineError(str(target), 0, "no documents to predict")
        return docs
    return [LabeledDocument(id=target.name, text=target.read_text(encoding="utf-8"), label="-")]


def cmd_predict(args: argparse.Namespace) -> int:
    trained = models.load_model(args.model)
    config = build_preprocess_config(args)
    if config.digest() != trained.preprocess_config_digest:
        raise DoccatError(
            "preprocessing config does not match the model "
            "(was it trained with different stopwords or suffixes?)"
        )
    lines = []
    for doc in _load_predict_documents(args.input):
        label, score, _ = models.predict_tokenized(trained, preprocess_document(doc, config))
        lines.append(f"{doc.id}\t{label}\t{score:.6f}")
    output = "\n".join(lines) + "\n"
    if args.out:
        atomic_write_text(args.out, output)
        print(f"documents={len(lines)} out={args.out}")
    else:
        sys.stdout.write(output)
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    trained = models.load_model(args.model)
    config = build_preprocess_config(args)
    corpus = _load_corpus(args.corpus)
    report = evaluation.evaluate(trained, corpus, config)
    if args.report:
        evaluation.write_report(report, args.report)
    print(
        f"macro_precision={report.macro_precision:.4f} "
        f"macro_recall={report.macro_recall:.4f} "
        f"macro_f1={report.macro_f1:.4f} "
        f"accuracy={report.accuracy:.4f}"
    )
    return 0


def cmd_benchmark(args: argparse.Namespace) -> int:
    cli_config = resolve_cli_config(args)
    config = build_preprocess_config(args)
    train_corpus = _load_corpus(args.train_corpus)
    test_corpus = _load_corpus(args.test_corpus)
    _diag(args, f"train: {len(train_corpus)} documents, test: {len(test_corpus)} documents")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    result = evaluation.benchmark(
        train_corpus,
        test_corpus,
        cli_config.hyper,
        config,
        out_dir=out_dir,
        keep_going=True,
        repro=args.repro,
        threads=args.threads,
    )
    print(evaluation.format_report_table(result.reports))
    print(f"out_dir={out_dir}")
    for name, error in result.failures:
        print(f"error: {name} failed: {error}", file=sys.stderr)
    return 1 if result.failures else 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DoccatError, OSError, UnicodeDecodeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
