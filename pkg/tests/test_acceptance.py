"""Desk-scale acceptance runs over synthetic corpora and exhaustive references."""

import itertools

import numpy as np
import pytest

from src.docstruct.classifiers.decision_tree import best_split
from src.docstruct.classifiers.metrics import cross_validate, evaluate
from src.docstruct.cli import main
from src.docstruct.classifiers.model import train
from src.docstruct.config import PipelineConfig
from src.docstruct.features.featurizer import DocumentFeaturizer
from src.docstruct.services.corpus_service import CorpusService
from src.docstruct.services.pipeline_service import PipelineService
from src.docstruct.services.semantic_service import SemanticClassifier, SemanticService
from src.docstruct.services.structure_service import StructureService
from src.docstruct.services.summary_service import SentenceGraph, textrank_scores
from src.docstruct.services.topic_service import TopicService
from src.docstruct.synth import CorpusSpec, generate_corpus

from .test_classifiers import _brute_force_split

pytestmark = pytest.mark.slow

FRUIT = ["apple", "banana", "cherry", "grape", "mango", "peach"]
ENGINE = ["engine", "piston", "valve", "turbine", "gasket", "crank"]


@pytest.fixture(scope="module")
def line_corpus():
    return [g.document for g in generate_corpus(CorpusSpec(n_docs=30, seed=1))]


@pytest.fixture(scope="module")
def featurizer(line_corpus):
    return DocumentFeaturizer.fit(line_corpus, max_features=300)


def _power_iteration(weights, d=0.85, iterations=5000):
    """Dense weighted PageRank; isolated nodes spread their mass uniformly."""
    n = len(weights)
    out = weights.sum(axis=1)
    transition = np.where(out[:, None] > 0, weights / np.where(out > 0, out, 1)[:, None], 1.0 / n)
    scores = np.full(n, 1.0 / n)
    for _ in range(iterations):
        scores = (1 - d) / n + d * transition.T @ scores
    return scores


class TestOracleEquivalence:
    """Exhaustive and closed-form references."""

    def test_root_split_matches_brute_force(self):
        """Test the root split on 25 random datasets of up to 200 points."""
        rng = np.random.default_rng(2024)
        for _ in range(25):
            n = int(rng.integers(10, 201))
            X = rng.integers(0, 8, size=(n, int(rng.integers(1, 6)))).astype(float)
            y = rng.integers(0, 3, size=n)
            expected = _brute_force_split(X, y, 3, 1)
            split = best_split(X, y, 3, 1)
            if expected is None:
                assert split is None
            else:
                assert (split.feature, split.threshold) == expected[:2]
                assert split.score == pytest.approx(expected[2])

    def test_textrank_matches_power_iteration(self):
        """Test 50 random sentence graphs of at most 12 nodes."""
        rng = np.random.default_rng(7)
        for _ in range(50):
            n = int(rng.integers(1, 13))
            upper = np.triu(rng.random((n, n)) * (rng.random((n, n)) < 0.6), 1)
            weights = upper + upper.T
            graph = SentenceGraph([f"s{i}" for i in range(n)], weights)
            scores = textrank_scores(graph, tol=1e-12, max_iter=5000)
            np.testing.assert_allclose(scores, _power_iteration(weights), atol=1e-6)


class TestPipelineRecovery:
    """Planted structure comes back exactly from ground-truth labels."""

    def test_oracle_toc_is_exact(self):
        """Test 50 zero-noise documents."""
        corpus = generate_corpus(CorpusSpec(n_docs=50, seed=11))
        trees = PipelineService.oracle_trees([g.document for g in corpus])
        for generated, tree in zip(corpus, trees):
            toc = StructureService.build_toc(tree)
            assert [(e.title, e.level) for e in toc] == [(s.title, s.level) for s in generated.sections]
            StructureService.check_line_conservation(tree, generated.document)


class TestLineClassification:
    """Cross-validated line classifiers in layout and combined vector modes."""

    @pytest.mark.parametrize("kind", ["nb", "dt", "svm"])
    def test_combined_mode(self, line_corpus, featurizer, kind):
        """Test macro-F1 >= 0.90 in combined mode and no loss against layout-only vectors."""
        hyperparams = PipelineConfig().classifier_hyperparams(kind)
        scores = {}
        for mode in ("layout", "text", "combined"):
            ds = CorpusService.build_line_dataset(line_corpus, featurizer, "line", mode)
            result = cross_validate(kind, ds, k=5, seed=0, hyperparams=hyperparams)
            scores[mode] = result.pooled.macro_f1
        assert scores["combined"] >= 0.90
        assert scores["combined"] >= scores["layout"]


class TestSectionLevels:
    """Header level classification and the two structure modes."""

    def test_level_macro_f1(self, line_corpus, featurizer):
        """Test three-class header levels in combined mode."""
        ds = CorpusService.build_line_dataset(line_corpus, featurizer, "level", "combined")
        result = cross_validate("nb", ds, k=5, seed=0)
        assert result.pooled.macro_f1 >= 0.84

    def test_pipeline_versus_four_class(self, line_corpus):
        """Test the line-then-level pipeline against the single four-class model."""
        config = PipelineConfig(threads=1, classifier="nb", seed=0)
        bundle = PipelineService.train_models(line_corpus[:20], config, "four_class")
        bundle.update(PipelineService.train_models(line_corpus[:20], config, "line", featurizer=bundle.featurizer))
        bundle.update(PipelineService.train_models(line_corpus[:20], config, "level", featurizer=bundle.featurizer))
        reports = PipelineService.compare_structure_modes(line_corpus[20:], bundle)
        assert reports["pipeline"].macro_f1 >= reports["four_class"].macro_f1


class TestTopics:
    """Topic model properties on a disjoint-vocabulary corpus."""

    @pytest.fixture(scope="class")
    def sections(self):
        rng = np.random.default_rng(5)
        sections = []
        for _ in range(50):
            sections.append([str(w) for w in rng.choice(FRUIT, size=20)])
            sections.append([str(w) for w in rng.choice(ENGINE, size=20)])
        return sections

    def test_purity_and_half_split(self, sections):
        """Test topic purity and half-split agreement chunk by chunk."""
        dictionary = TopicService.build_dictionary(sections, min_sections=1, max_fraction=1.0)
        model = TopicService.train_lda(sections, dictionary, K=2, alpha=0.1, iterations=500, seed=3)

        fruit = [dictionary.ids[w] for w in FRUIT]
        engine = [dictionary.ids[w] for w in ENGINE]
        wt = model.word_topic
        dominant = sum(max(wt[fruit, k].sum(), wt[engine, k].sum()) for k in range(2))
        assert dominant / wt.sum() >= 0.9

        report = TopicService.half_split_similarity_eval(model, sections, chunks=10, iterations=30)
        assert sum(c.intra > c.inter for c in report.chunks) >= 9


class TestSemantics:
    """Section classification and ordering on synthetic sections."""

    def test_alias_map_covers_every_class(self, arxiv_ontology):
        """Test that every class has at least one alias."""
        assert set(arxiv_ontology.aliases.values()) == set(arxiv_ontology.classes)

    def test_semantic_macro_f1(self, arxiv_ontology):
        """Test the 20-class classifier on held-out synthetic documents."""
        corpus = generate_corpus(CorpusSpec(n_docs=160, seed=21))
        trees = PipelineService.oracle_trees([g.document for g in corpus])
        train_examples = SemanticService.training_examples(trees[:100], arxiv_ontology)
        test_examples = SemanticService.training_examples(trees[100:], arxiv_ontology)
        classifier = SemanticClassifier.fit(train_examples, arxiv_ontology, kind="nb")
        assert classifier.evaluate(test_examples).macro_f1 >= 0.73

    def test_sequence_model(self, arxiv_ontology):
        """Test exhaustive agreement and canonical order against shuffles."""
        corpus = generate_corpus(CorpusSpec(n_docs=50, seed=31))
        sequences = [g.top_level_classes for g in corpus]
        model = SemanticService.fit_sequence_model(sequences, arxiv_ontology)
        rng = np.random.default_rng(0)
        classes = list(arxiv_ontology.classes)

        for _ in range(20):
            labels = [classes[i] for i in rng.integers(len(classes), size=int(rng.integers(1, 7)))]
            best = max(model.score(list(p)) for p in itertools.permutations(labels))
            assert model.score(model.canonical_order(labels)) == pytest.approx(best)

        wins = trials = 0
        candidates = [s for s in sequences if len(set(s)) >= 2]
        while trials < 200:
            sequence = candidates[int(rng.integers(len(candidates)))]
            shuffled = [sequence[i] for i in rng.permutation(len(sequence))]
            if shuffled == sequence:
                continue
            trials += 1
            wins += model.score(sequence) > model.score(shuffled)
        assert wins >= 190


class TestDeterminism:
    """Two identical runs write identical files."""

    @staticmethod
    def _files(root):
        return sorted(p.relative_to(root) for p in root.rglob("*") if p.is_file())

    def test_pipeline_command_is_byte_identical(self, tmp_path):
        """Test two runs of the pipeline command with the same config and seed."""
        corpus, models = tmp_path / "corpus", tmp_path / "models"
        common = ["--seed", "4", "--threads", "1"]
        assert main(["gen", "--n-docs", "8", "--out-dir", str(corpus), *common]) == 0
        assert main(["train", str(corpus), "--model-dir", str(models), "--classifier", "nb", *common]) == 0

        for name in ("a", "b"):
            code = main(
                ["pipeline", str(corpus), "--model-dir", str(models), "--out-dir", str(tmp_path / name), *common]
            )
            assert code == 0

        first, second = self._files(tmp_path / "a"), self._files(tmp_path / "b")
        assert first and first == second
        for rel in first:
            assert (tmp_path / "a" / rel).read_bytes() == (tmp_path / "b" / rel).read_bytes()

    def test_thread_count_does_not_change_outputs(self, line_corpus, tmp_path):
        """Test in-process pipeline runs on one and two threads."""
        config = PipelineConfig(threads=1, classifier="nb", seed=4)
        bundle = PipelineService.train_models(line_corpus[:10], config, "all")
        docs = line_corpus[10:14]
        PipelineService.run_pipeline(docs, bundle, config, out_dir=tmp_path / "a")
        PipelineService.run_pipeline(
            docs, bundle, PipelineConfig(threads=2, classifier="nb", seed=4), out_dir=tmp_path / "b"
        )
        first, second = self._files(tmp_path / "a"), self._files(tmp_path / "b")
        assert first == second
        for rel in first:
            assert (tmp_path / "a" / rel).read_bytes() == (tmp_path / "b" / rel).read_bytes()


class TestEvaluateHeldOut:
    """A model trained on one corpus scores well on a fresh one."""

    def test_line_model_generalizes(self, line_corpus, featurizer):
        """Test a nb line model on documents from another seed."""
        model = train("nb", CorpusService.build_line_dataset(line_corpus, featurizer, "line", "combined"))
        fresh = [g.document for g in generate_corpus(CorpusSpec(n_docs=5, seed=99))]
        report = evaluate(model, CorpusService.build_line_dataset(fresh, featurizer, "line", "combined"))
        assert report.macro_f1 >= 0.90
