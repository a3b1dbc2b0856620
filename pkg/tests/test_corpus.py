"""Tests for bookmark labeling and dataset construction."""

import io
from unittest.mock import patch

import numpy as np
import pytest

from src.docstruct.features.featurizer import DocumentFeaturizer
from src.docstruct.models.dataset import LabeledDataset
from src.docstruct.models.document import BookmarkEntry
from src.docstruct.services.corpus_service import TASK_ALPHABETS, CorpusService
from src.docstruct.utils.error_handler import ContractError, SchemaError, UsageError
from src.docstruct.utils.text_utils import header_similarity

from .conftest import make_document


def _dataset(counts, seed=0):
    """Dataset with ``counts[c]`` records of class ``c``; X holds the record index."""
    y = np.concatenate([np.full(n, c) for c, n in enumerate(counts)]).astype(np.int64)
    X = np.arange(len(y), dtype=float).reshape(-1, 1)
    return LabeledDataset(X=X, y=y, class_alphabet=tuple(range(len(counts))))


class TestMapBookmarksToLabels:
    """Test cases for bookmark-to-line labeling."""

    def test_matching_line_gets_entry_depth(self):
        """Test that a TOC entry labels its line and nothing else."""
        doc = make_document(
            ["Title", "1 Introduction", "Text about introductions"],
            toc=[BookmarkEntry("Introduction", 1, 0)],
        )
        mapping = CorpusService.map_bookmarks_to_labels(doc)
        assert mapping.document.labels == [0, 1, 0]
        assert mapping.unmatched == ()
        assert mapping.matches[0].score == 1.0

    def test_empty_toc_labels_everything_regular(self):
        """Test that an empty TOC yields all-zero labels."""
        doc = make_document(["a", "b"], toc=[])
        assert CorpusService.map_bookmarks_to_labels(doc).document.labels == [0, 0]

    def test_depth_three_entry(self):
        """Test that a depth-3 entry labels its line 3."""
        doc = make_document(
            ["2.1.1 Details", "body"], toc=[BookmarkEntry("2.1.1 Details", 3, 0)]
        )
        assert CorpusService.map_bookmarks_to_labels(doc).document.labels == [3, 0]

    def test_each_line_and_entry_used_once(self):
        """Test that duplicate titles pair up in document and TOC order."""
        doc = make_document(
            ["Results", "x", "Results"],
            toc=[BookmarkEntry("Results", 1, 0), BookmarkEntry("Results", 2, 1)],
        )
        assert CorpusService.map_bookmarks_to_labels(doc).document.labels == [1, 0, 2]

    def test_unmatched_entries_are_reported(self):
        """Test that entries below the threshold are returned and logged."""
        doc = make_document(
            ["1 Introduction", "body"],
            toc=[BookmarkEntry("Introduction", 1, 0), BookmarkEntry("Completely Different", 1, 1)],
        )
        with patch("src.docstruct.services.corpus_service.logger") as mock_logger:
            mapping = CorpusService.map_bookmarks_to_labels(doc)
        assert [e.title for e in mapping.unmatched] == ["Completely Different"]
        mock_logger.warning.assert_called_once()
        assert mapping.to_dict()["unmatched"][0]["title"] == "Completely Different"

    def test_small_corruption_still_matches(self):
        """Test that a one-character edit stays above the default threshold."""
        doc = make_document(
            ["3 Experimental Evaluation", "body"],
            toc=[BookmarkEntry("3 Experimental Evaluatiox", 1, 0)],
        )
        assert CorpusService.map_bookmarks_to_labels(doc).document.labels == [1, 0]

    def test_missing_toc_is_a_contract_error(self):
        """Test that a document without bookmarks cannot be labeled."""
        with pytest.raises(ContractError):
            CorpusService.map_bookmarks_to_labels(make_document(["a"]))

    def test_threshold_range(self):
        """Test that the threshold must lie in (0, 1]."""
        doc = make_document(["a"], toc=[])
        with pytest.raises(ContractError):
            CorpusService.map_bookmarks_to_labels(doc, similarity_threshold=0.0)


class TestStratifiedFolds:
    """Test cases for stratified fold assignment."""

    def test_exact_divisibility(self):
        """Test 100 balanced records over 5 folds."""
        ds = CorpusService.make_stratified_folds(_dataset([50, 50]), 5, seed=1)
        for fold in range(5):
            members = ds.y[ds.fold_assignments == fold]
            assert np.count_nonzero(members == 0) == 10
            assert np.count_nonzero(members == 1) == 10

    def test_uneven_class_spreads_by_one(self):
        """Test that 7 positives over 5 folds give counts 2, 2, 1, 1, 1."""
        ds = CorpusService.make_stratified_folds(_dataset([10, 7]), 5, seed=3)
        positives = [int(np.count_nonzero(ds.y[ds.fold_assignments == f] == 1)) for f in range(5)]
        assert positives == [2, 2, 1, 1, 1]

    def test_same_seed_same_folds(self):
        """Test fold determinism."""
        first = CorpusService.make_stratified_folds(_dataset([20, 20]), 4, seed=9)
        second = CorpusService.make_stratified_folds(_dataset([20, 20]), 4, seed=9)
        np.testing.assert_array_equal(first.fold_assignments, second.fold_assignments)

    def test_fold_split_partitions_records(self):
        """Test that train and test of a fold partition the dataset."""
        ds = CorpusService.make_stratified_folds(_dataset([10, 10]), 5, seed=0)
        train, test = ds.fold_split(2)
        assert len(train) + len(test) == len(ds)
        assert set(train.X[:, 0]).isdisjoint(test.X[:, 0])

    def test_class_smaller_than_k(self):
        """Test that a class with fewer than k members is rejected."""
        with pytest.raises(ContractError):
            CorpusService.make_stratified_folds(_dataset([10, 3]), 5, seed=0)

    def test_k_below_two(self):
        """Test that one fold is not a cross-validation."""
        with pytest.raises(ContractError):
            CorpusService.make_stratified_folds(_dataset([10, 10]), 1, seed=0)


class TestBalanceClasses:
    """Test cases for minority downsampling."""

    def test_downsample_to_minority(self):
        """Test {1000, 100, 100} becoming {100, 100, 100}."""
        balanced = CorpusService.balance_classes(_dataset([1000, 100, 100]), seed=0)
        assert balanced.class_counts() == {0: 100, 1: 100, 2: 100}

    def test_balanced_input_is_a_fixed_point(self):
        """Test that an already balanced dataset keeps every record."""
        ds = _dataset([5, 5])
        balanced = CorpusService.balance_classes(ds, seed=0)
        np.testing.assert_array_equal(np.sort(balanced.X[:, 0]), ds.X[:, 0])

    def test_seed_changes_subset_not_sizes(self):
        """Test that another seed samples other records of the same sizes."""
        a = CorpusService.balance_classes(_dataset([1000, 100]), seed=1)
        b = CorpusService.balance_classes(_dataset([1000, 100]), seed=2)
        assert a.class_counts() == b.class_counts()
        assert not np.array_equal(a.X, b.X)

    def test_empty_class_is_ignored(self):
        """Test that a class without records does not shrink the others to zero."""
        ds = LabeledDataset(
            X=np.zeros((6, 1)), y=np.array([0, 0, 0, 1, 1, 1]), class_alphabet=(0, 1, 2)
        )
        assert CorpusService.balance_classes(ds, seed=0).class_counts() == {0: 3, 1: 3, 2: 0}


class TestDatasets:
    """Test cases for task labels and featurized datasets."""

    def test_task_labels(self):
        """Test the three tasks over one labeled document with a deep header."""
        doc = make_document(["h", "b", "sub", "deep"], [1, 0, 2, 5])
        assert CorpusService.task_labels(doc, "line") == [(0, 1), (1, 0), (2, 1), (3, 1)]
        assert CorpusService.task_labels(doc, "level") == [(0, 1), (2, 2), (3, 3)]
        assert CorpusService.task_labels(doc, "four_class") == [(0, 1), (1, 0), (2, 2), (3, 3)]

    def test_unlabeled_document(self):
        """Test that datasets need labels on every line."""
        with pytest.raises(ContractError):
            CorpusService.task_labels(make_document(["a", "b"], [1, None]), "line")

    def test_build_line_dataset(self, synthetic_documents):
        """Test featurizing the synthetic corpus for every task and mode."""
        featurizer = DocumentFeaturizer.fit(synthetic_documents, max_features=200)
        n_lines = sum(len(d.lines) for d in synthetic_documents)
        n_headers = sum(1 for d in synthetic_documents for label in d.labels if label)

        line_ds = CorpusService.build_line_dataset(synthetic_documents, featurizer, "line", "combined")
        assert len(line_ds) == n_lines
        assert line_ds.n_features == featurizer.dimension("combined")
        assert line_ds.class_alphabet == TASK_ALPHABETS["line"]
        assert line_ds.record_ids[0] == f"{synthetic_documents[0].doc_id}:0"

        level_ds = CorpusService.build_line_dataset(synthetic_documents, featurizer, "level", "layout")
        assert len(level_ds) == n_headers
        assert level_ds.n_features == 16
        assert set(level_ds.y) <= {1, 2, 3}

    def test_threads_do_not_change_the_dataset(self, synthetic_documents):
        """Test that the work pool preserves record order."""
        featurizer = DocumentFeaturizer.fit(synthetic_documents, max_features=100)
        inline = CorpusService.build_line_dataset(synthetic_documents, featurizer, "four_class", "text")
        pooled = CorpusService.build_line_dataset(
            synthetic_documents, featurizer, "four_class", "text", threads=4
        )
        np.testing.assert_array_equal(inline.X, pooled.X)
        assert inline.record_ids == pooled.record_ids


class TestBookmarkJson:
    """Test cases for the bookmark JSON format."""

    def test_dump_and_load(self):
        """Test that dumped entries load back equal."""
        entries = [BookmarkEntry("1 Intro", 1, 0), BookmarkEntry("1.1 Scope", 2, 1)]
        text = CorpusService.dump_bookmarks(entries)
        assert CorpusService.load_bookmarks(io.StringIO(text)) == entries

    def test_invalid_depth(self):
        """Test that depth 0 is rejected."""
        with pytest.raises(SchemaError):
            CorpusService.load_bookmarks(io.StringIO('[{"title": "x", "depth": 0, "order": 0}]'))

    def test_not_an_array(self):
        """Test that the top level must be an array."""
        with pytest.raises(SchemaError):
            CorpusService.load_bookmarks(io.StringIO('{"title": "x"}'))

    def test_missing_file(self, tmp_path):
        """Test that a missing bookmark file is a usage error."""
        with pytest.raises(UsageError):
            CorpusService.load_bookmarks(tmp_path / "absent.json")


class TestHeaderSimilarity:
    """Test cases for the bookmark-to-line similarity score."""

    def test_edit_distance_ratio(self):
        """Test 1 - distance / max length on normalized keys."""
        assert header_similarity("related work", "related work") == 1.0
        assert header_similarity("methods", "method") == pytest.approx(6 / 7)
        assert header_similarity("introduction", "introductoin") == pytest.approx(1 - 2 / 12)

    def test_empty_keys(self):
        """Test that an empty key never matches."""
        assert header_similarity("", "") == 0.0
        assert header_similarity("results", "") == 0.0

    def test_score_cutoff(self):
        """Test that scores under the cutoff drop to zero."""
        assert header_similarity("introduction", "introductoin", score_cutoff=0.85) == 0.0
        assert header_similarity("methods", "method", score_cutoff=0.85) == pytest.approx(6 / 7)
