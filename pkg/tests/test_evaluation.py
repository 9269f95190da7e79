import numpy as np
import pytest

from doccat.corpus import LabeledCorpus, LabeledDocument
from doccat.errors import (
    LengthMismatchError,
    PreprocessMismatchError,
    SingleClassError,
    UnknownLabelError,
)
from doccat.evaluation import (
    METHOD_ORDER,
    ConfusionMatrix,
    benchmark,
    confusion_matrix,
    evaluate,
    metrics_from_matrix,
    report_from_dict,
    report_to_dict,
    write_comparison_tsv,
)
from doccat.models import TrainHyperparams, train
from doccat.textprep import PreprocessConfig

from helpers import metrics_oracle

import doccat.evaluation as evaluation_module


class TestConfusionMatrix:
    def test_direct_count(self):
        cm = confusion_matrix(["A", "A", "B"], ["A", "B", "B"], ["A", "B"])
        assert cm.counts == ((1, 1), (0, 1))
        assert cm.total == 3

    def test_perfect_predictions_are_diagonal(self):
        cm = confusion_matrix(["A", "B", "B"], ["A", "B", "B"], ["A", "B"])
        assert cm.counts == ((1, 0), (0, 2))

    def test_unknown_predicted_label(self):
        with pytest.raises(UnknownLabelError):
            confusion_matrix(["A"], ["C"], ["A", "B"])

    def test_unknown_true_label(self):
        with pytest.raises(UnknownLabelError):
            confusion_matrix(["C"], ["A"], ["A", "B"])

    def test_length_mismatch(self):
        with pytest.raises(LengthMismatchError):
            confusion_matrix(["A", "B"], ["A"], ["A", "B"])

    def test_empty_rejected(self):
        with pytest.raises(LengthMismatchError):
            confusion_matrix([], [], ["A"])


class TestMetricsFromMatrix:
    def test_hand_computed_two_by_two(self):
        report = metrics_from_matrix(ConfusionMatrix(("A", "B"), ((1, 1), (0, 1))))
        assert report.per_class["A"].precision == 1.0
        assert report.per_class["A"].recall == 0.5
        assert report.per_class["B"].precision == 0.5
        assert report.per_class["B"].recall == 1.0
        assert report.per_class["A"].f1 == pytest.approx(2 / 3, abs=0.0)
        assert report.per_class["B"].f1 == pytest.approx(2 / 3, abs=0.0)
        assert report.macro_f1 == pytest.approx(2 / 3, abs=0.0)
        assert report.accuracy == pytest.approx(2 / 3, abs=0.0)

    def test_diagonal_matrix_is_perfect(self):
        report = metrics_from_matrix(ConfusionMatrix(("A", "B"), ((3, 0), (0, 2))))
        assert report.macro_precision == report.macro_recall == report.macro_f1 == 1.0
        assert report.accuracy == 1.0

    def test_absent_class_contributes_zeros(self):
        # C never true and never predicted: P = R = F1 = 0 enters the mean
        cm = ConfusionMatrix(("A", "B", "C"), ((2, 0, 0), (0, 2, 0), (0, 0, 0)))
        report = metrics_from_matrix(cm)
        assert report.per_class["C"] .f1 == 0.0
        assert report.macro_f1 == pytest.approx(2 / 3, abs=1e-12)
        assert report.accuracy == 1.0

    def test_macro_is_mean_of_per_class(self):
        rng = np.random.default_rng(17)
        for _ in range(50):
            k = int(rng.integers(2, 6))
            counts = tuple(
                tuple(int(c) for c in rng.integers(0, 9, size=k)) for _ in range(k)
            )
            if sum(map(sum, counts)) == 0:
                continue
            report = metrics_from_matrix(ConfusionMatrix(tuple("abcdef"[:k]), counts))
            values = list(report.per_class.values())
            assert report.macro_precision == pytest.approx(
                sum(m.precision for m in values) / k, abs=1e-12
            )
            assert report.macro_f1 == pytest.approx(sum(m.f1 for m in values) / k, abs=1e-12)

    def test_matches_independent_oracle(self):
        rng = np.random.default_rng(18)
        for _ in range(100):
            k = int(rng.integers(2, 7))
            counts = [[int(c) for c in rng.integers(0, 9, size=k)] for _ in range(k)]
            if sum(map(sum, counts)) == 0:
                continue
            report = metrics_from_matrix(
                ConfusionMatrix(tuple(f"c{i}" for i in range(k)), tuple(map(tuple, counts)))
            )
            expected = metrics_oracle(counts)
            assert report.macro_precision == pytest.approx(expected["macro_precision"], abs=1e-12)
            assert report.macro_recall == pytest.approx(expected["macro_recall"], abs=1e-12)
            assert report.macro_f1 == pytest.approx(expected["macro_f1"], abs=1e-12)
            assert report.accuracy == pytest.approx(expected["accuracy"], abs=1e-12)

    def test_order_invariance(self):
        rng = np.random.default_rng(19)
        y_true = [("A", "B", "C")[int(rng.integers(0, 3))] for _ in range(60)]
        y_pred = [("A", "B", "C")[int(rng.integers(0, 3))] for _ in range(60)]
        base = metrics_from_matrix(confusion_matrix(y_true, y_pred, ("A", "B", "C")))
        perm = rng.permutation(60)
        shuffled = metrics_from_matrix(
            confusion_matrix(
                [y_true[i] for i in perm], [y_pred[i] for i in perm], ("A", "B", "C")
            )
        )
        assert base.macro_f1 == shuffled.macro_f1
        assert base.accuracy == shuffled.accuracy
        assert base.confusion == shuffled.confusion

    def test_accuracy_equals_trace_over_total(self):
        rng = np.random.default_rng(20)
        for _ in range(50):
            k = int(rng.integers(2, 5))
            counts = rng.integers(0, 10, size=(k, k))
            if counts.sum() == 0:
                continue
            cm = ConfusionMatrix(
                tuple(f"c{i}" for i in range(k)), tuple(tuple(int(x) for x in r) for r in counts)
            )
            assert metrics_from_matrix(cm).accuracy == counts.trace() / counts.sum()


class TestEvaluate:
    def test_separable_train_equals_test_is_perfect(self, synth_train, default_cfg):
        trained = train(synth_train, "tfidf", "nb", TrainHyperparams(), default_cfg)
        report = evaluate(trained, synth_train, default_cfg)
        assert report.accuracy == 1.0
        assert report.macro_f1 == 1.0
        assert report.method_name == "TFIDF+NB"
        assert report.predict_seconds > 0

    def test_unseen_label_rejected(self, synth_train, default_cfg):
        trained = train(synth_train, "tfidf", "nb", TrainHyperparams(), default_cfg)
        stranger = LabeledCorpus((
            LabeledDocument("s", "কনক খনখ", "thirteenth"),
        ))
        with pytest.raises(UnknownLabelError):
            evaluate(trained, stranger, default_cfg)

    def test_empty_token_document_still_counted(self, synth_train, default_cfg):
        trained = train(synth_train, "tfidf", "nb", TrainHyperparams(), default_cfg)
        label = synth_train.labels[0]
        degenerate = LabeledCorpus((
            LabeledDocument("empty", "১২৩ ৪৫৬", label),
        ))
        report = evaluate(trained, degenerate, default_cfg)
        assert report.confusion.total == 1

    def test_config_mismatch_rejected(self, synth_train, default_cfg):
        trained = train(synth_train, "tfidf", "nb", TrainHyperparams(), default_cfg)
        other = PreprocessConfig(
            stopword_list=default_cfg.stopword_list,
            suffix_table=default_cfg.suffix_table,
            strip_symbols=default_cfg.strip_symbols,
            enable_stemming=False,
        )
        with pytest.raises(PreprocessMismatchError):
            evaluate(trained, synth_train, other)


class TestBenchmark:
    def test_six_reports_in_table_order(self, tiny_corpus, default_cfg, tmp_path):
        result = benchmark(
            tiny_corpus, tiny_corpus, TrainHyperparams(), default_cfg, out_dir=tmp_path
        )
        assert [r.method_name for r in result.reports] == list(METHOD_ORDER)
        assert not result.failures
        tsv = (tmp_path / "comparison.tsv").read_text(encoding="utf-8").splitlines()
        assert tsv[0] == "method\ttrain_sec\tprecision\trecall\tf1\taccuracy"
        assert len(tsv) == 7
        for name in METHOD_ORDER:
            stem = name.replace("+", "_").replace("-", "_")
            assert (tmp_path / f"model_{stem}.json").exists()
            assert (tmp_path / f"report_{stem}.json").exists()

    def test_train_equals_test_is_perfect_for_all_six(self, tiny_corpus, default_cfg):
        result = benchmark(tiny_corpus, tiny_corpus, TrainHyperparams(), default_cfg)
        for report in result.reports:
            assert report.macro_f1 == 1.0

    def test_threaded_run_matches_serial(self, tiny_corpus, default_cfg):
        serial = benchmark(tiny_corpus, tiny_corpus, TrainHyperparams(), default_cfg, repro=True)
        threaded = benchmark(
            tiny_corpus, tiny_corpus, TrainHyperparams(), default_cfg, repro=True, threads=4
        )
        assert [report_to_dict(r) for r in serial.reports] == [
            report_to_dict(r) for r in threaded.reports
        ]

    def test_shared_label_precondition(self, tiny_corpus, default_cfg):
        other = LabeledCorpus((
            LabeledDocument("x", "কনক", "somethingelse"),
            LabeledDocument("y", "খনখ", "another"),
        ))
        with pytest.raises(SingleClassError):
            benchmark(tiny_corpus, other, TrainHyperparams(), default_cfg)

    def test_partial_failure_keeps_going(self, tiny_corpus, default_cfg, monkeypatch):
        real = evaluation_module.train_from_tokens

        def sabotaged(docs, selector, classifier, *args, **kwargs):
            if (selector, classifier) == ("chi2", "svm"):
                raise SingleClassError("injected failure")
            return real(docs, selector, classifier, *args, **kwargs)

        monkeypatch.setattr(evaluation_module, "train_from_tokens", sabotaged)
        result = benchmark(
            tiny_corpus, tiny_corpus, TrainHyperparams(), default_cfg, keep_going=True
        )
        assert len(result.reports) == 5
        assert [name for name, _ in result.failures] == ["CHI-SQUARE+SVM"]

    def test_failure_propagates_without_keep_going(self, tiny_corpus, default_cfg, monkeypatch):
        def explode(*args, **kwargs):
            raise SingleClassError("injected failure")

        monkeypatch.setattr(evaluation_module, "train_from_tokens", explode)
        with pytest.raises(SingleClassError):
            benchmark(tiny_corpus, tiny_corpus, TrainHyperparams(), default_cfg)


class TestReportSerialization:
    def test_round_trip(self):
        report = metrics_from_matrix(ConfusionMatrix(("A", "B"), ((1, 1), (0, 1))))
        report.method_name = "TFIDF+NB"
        report.train_seconds = 1.25
        report.predict_seconds = 0.5
        restored = report_from_dict(report_to_dict(report))
        assert restored == report

    def test_comparison_tsv_format(self, tmp_path):
        report = metrics_from_matrix(ConfusionMatrix(("A", "B"), ((2, 0), (0, 2))))
        report.method_name = "TFIDF+SVM"
        report.train_seconds = 0.086
        path = tmp_path / "comparison.tsv"
        write_comparison_tsv([report], path)
        lines = path.read_text(encoding="utf-8").splitlines()
        assert lines[1] == "TFIDF+SVM\t0.0860\t1.000000\t1.000000\t1.000000\t1.000000"
