"""Tests for section boundary detection, TOC output and the structure pipeline."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.docstruct.classifiers import train
from src.docstruct.features.featurizer import DocumentFeaturizer
from src.docstruct.models.section import TocTree
from src.docstruct.services.corpus_service import CorpusService
from src.docstruct.services.structure_service import StructurePipeline, StructureService, TocEntry
from src.docstruct.utils.error_handler import ContractError

from .conftest import make_document


def _doc(n):
    return make_document([f"line {i}" for i in range(n)])


@pytest.fixture(scope="module")
def trained_models(synthetic_documents):
    """Featurizer plus line, level and four-class models on the synthetic corpus."""
    featurizer = DocumentFeaturizer.fit(synthetic_documents, max_features=100)
    models = {
        task: train("nb", CorpusService.build_line_dataset(synthetic_documents, featurizer, task, "combined"))
        for task in ("line", "level", "four_class")
    }
    return featurizer, models


class TestDetectSectionBoundaries:
    """Test cases for the stack-based tree builder."""

    def test_levels_one_two_two_one(self):
        """Test two roots, the first with two children."""
        tree = StructureService.detect_section_boundaries(_doc(8), [(0, 1), (2, 2), (4, 2), (6, 1)])
        assert [root.header_line_id for root in tree.roots] == [0, 6]
        assert [child.header_line_id for child in tree.roots[0].children] == [2, 4]
        assert tree.roots[0].body_line_ids == [1]
        assert tree.roots[0].children[1].body_line_ids == [5]
        assert tree.roots[1].body_line_ids == [7]

    def test_skipped_level_is_adopted(self):
        """Test that a level-3 header after a level-1 header becomes its child."""
        tree = StructureService.detect_section_boundaries(_doc(3), [(0, 1), (1, 3)])
        assert len(tree.roots) == 1
        child = tree.roots[0].children[0]
        assert child.header_line_id == 1
        assert child.level == 3
        assert child.body_line_ids == [2]

    def test_leading_deeper_header_becomes_root(self):
        """Test that a document opening at level 2 still has a root."""
        tree = StructureService.detect_section_boundaries(_doc(3), [(1, 2)])
        assert tree.preamble_line_ids == [0]
        assert tree.roots[0].level == 2
        assert tree.flatten() == [0, 1, 2]

    def test_no_headers(self):
        """Test that every line ends up in the preamble."""
        tree = StructureService.detect_section_boundaries(_doc(4), [])
        assert tree.roots == []
        assert tree.preamble_line_ids == [0, 1, 2, 3]

    def test_levels_are_clamped(self):
        """Test that levels above three and below one are clamped."""
        tree = StructureService.detect_section_boundaries(_doc(2), [(0, 0), (1, 7)])
        assert tree.roots[0].level == 1
        assert tree.roots[0].children[0].level == 3

    def test_header_after_deeper_section_closes_it(self):
        """Test that a level-2 header closes an open level-3 section."""
        tree = StructureService.detect_section_boundaries(_doc(4), [(0, 1), (1, 3), (2, 2), (3, 1)])
        first = tree.roots[0]
        assert [c.header_line_id for c in first.children] == [1, 2]
        assert [r.header_line_id for r in tree.roots] == [0, 3]

    @pytest.mark.parametrize("headers", [[(5, 1)], [(-1, 1)], [(0, 1), (0, 2)]])
    def test_invalid_headers(self, headers):
        """Test out-of-range and duplicate header lines."""
        with pytest.raises(ContractError):
            StructureService.detect_section_boundaries(_doc(2), headers)

    def test_line_count(self):
        """Test that every line is counted once."""
        tree = StructureService.detect_section_boundaries(_doc(8), [(1, 1), (3, 2)])
        assert tree.line_count() == 8


class TestTocOutput:
    """Test cases for TOC listings."""

    def test_build_toc(self, small_document):
        """Test the pre-order (title, level, page) listing."""
        tree = StructurePipeline("oracle").run(small_document).tree
        assert StructureService.build_toc(tree) == [
            TocEntry("1 Introduction", 1, 1),
            TocEntry("2 Approach", 1, 1),
            TocEntry("2.1 Features", 2, 1),
        ]

    def test_toc_to_text(self, small_document):
        """Test indentation and the page column."""
        tree = StructurePipeline("oracle").run(small_document).tree
        assert StructureService.toc_to_text(tree) == (
            "1 Introduction .... 1\n2 Approach .... 1\n  2.1 Features .... 1\n"
        )

    def test_empty_toc_text(self):
        """Test the text of a tree without sections."""
        tree = StructureService.detect_section_boundaries(_doc(2), [])
        assert StructureService.toc_to_text(tree) == ""


class TestLineConservation:
    """Test cases for the line conservation check."""

    def test_intact_tree_passes(self, small_document):
        """Test that a built tree conserves every line."""
        tree = StructurePipeline("oracle").run(small_document).tree
        StructureService.check_line_conservation(tree, small_document)

    def test_lost_line_is_detected(self, small_document):
        """Test that removing a body line fails the check."""
        tree = StructurePipeline("oracle").run(small_document).tree
        tree.roots[0].body_line_ids.pop()
        with pytest.raises(ContractError):
            StructureService.check_line_conservation(tree, small_document)

    def test_structure_json(self, small_document):
        """Test that the structure JSON rebuilds the same outline."""
        tree = StructurePipeline("oracle").run(small_document).tree
        tree.roots[0].summary = "A summary."
        rebuilt = TocTree.from_dict(tree.to_dict())
        assert rebuilt.to_dict() == tree.to_dict()
        assert rebuilt.roots[0].summary == "A summary."


class TestStructurePipeline:
    """Test cases for the per-document structure pipeline."""

    def test_oracle_mode(self, small_document):
        """Test that oracle mode follows the labels."""
        pipeline = StructurePipeline("oracle")
        result = pipeline.run(small_document)
        assert result.line_labels == [0, 1, 0, 1, 0, 1, 0]
        assert result.header_levels == [(1, 1), (3, 1), (5, 2)]
        assert pipeline.predicted_four_class(small_document) == small_document.labels

    def test_oracle_needs_labels(self):
        """Test that unlabeled documents cannot use the oracle."""
        with pytest.raises(ContractError):
            StructurePipeline("oracle").run(make_document(["a", "b"]))

    def test_pipeline_mode(self, trained_models, synthetic_documents):
        """Test the two-stage pipeline on a training document."""
        featurizer, models = trained_models
        pipeline = StructurePipeline(
            "pipeline", featurizer, line_model=models["line"], level_model=models["level"]
        )
        doc = synthetic_documents[0]
        result = pipeline.run(doc)
        assert len(result.line_labels) == len(doc.lines)
        assert result.tree.flatten() == list(range(len(doc.lines)))
        assert all(level in (1, 2, 3) for _, level in result.header_levels)
        assert result.line_scores.shape == (len(doc.lines), 2)

    def test_four_class_mode(self, trained_models, synthetic_documents):
        """Test the single four-class model."""
        featurizer, models = trained_models
        pipeline = StructurePipeline("four_class", featurizer, four_class_model=models["four_class"])
        doc = synthetic_documents[1]
        labels = pipeline.predicted_four_class(doc)
        assert len(labels) == len(doc.lines)
        assert set(labels) <= {0, 1, 2, 3}

    def test_missing_models(self, trained_models):
        """Test that each mode checks its models."""
        featurizer, models = trained_models
        with pytest.raises(ContractError):
            StructurePipeline("pipeline", featurizer, line_model=models["line"])
        with pytest.raises(ContractError):
            StructurePipeline("four_class", featurizer)
        with pytest.raises(ContractError):
            StructurePipeline("oracular")

    def test_wrong_alphabet(self, trained_models, synthetic_documents):
        """Test that a level model cannot stand in for the line model."""
        featurizer, models = trained_models
        with pytest.raises(ContractError):
            StructureService.classify_lines(synthetic_documents[0], models["level"], featurizer)
        with pytest.raises(ContractError):
            StructurePipeline("four_class", featurizer, four_class_model=models["line"])


@st.composite
def _header_layouts(draw):
    n = draw(st.integers(min_value=1, max_value=30))
    ids = draw(st.lists(st.integers(min_value=0, max_value=n - 1), unique=True, max_size=n))
    levels = draw(st.lists(st.integers(min_value=1, max_value=3), min_size=len(ids), max_size=len(ids)))
    return n, sorted(zip(ids, levels))


class TestBoundaryProperties:
    """Property checks over arbitrary header layouts."""

    @settings(max_examples=60, deadline=None)
    @given(_header_layouts())
    def test_every_line_kept_in_order(self, layout):
        """Test that flattening any built tree gives back every line once, in order."""
        n, headers = layout
        doc = _doc(n)
        tree = StructureService.detect_section_boundaries(doc, headers)
        StructureService.check_line_conservation(tree, doc)
        assert [s.header_line_id for s in tree.iter_sections()] == [i for i, _ in headers]

    @settings(max_examples=60, deadline=None)
    @given(_header_layouts())
    def test_children_are_deeper(self, layout):
        """Test that every child section is deeper than its parent."""
        n, headers = layout
        tree = StructureService.detect_section_boundaries(_doc(n), headers)
        for section in tree.iter_sections():
            assert all(child.level > section.level for child in section.children)
