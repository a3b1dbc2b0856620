"""Tests for section tokenization, the topic dictionary and collapsed Gibbs LDA."""

from unittest.mock import patch

import numpy as np
import pytest

from src.docstruct.services.structure_service import StructurePipeline
from src.docstruct.services.topic_service import TopicService
from src.docstruct.utils.error_handler import ContractError, UsageError

FRUIT = ["apple", "banana", "cherry", "grape"]
ENGINE = ["engine", "piston", "valve", "turbine"]


def _two_topic_corpus(n_per_group=10, length=20, seed=0):
    """Sections drawn from two disjoint vocabularies, interleaved."""
    rng = np.random.default_rng(seed)
    sections = []
    for _ in range(n_per_group):
        sections.append([str(w) for w in rng.choice(FRUIT, size=length)])
        sections.append([str(w) for w in rng.choice(ENGINE, size=length)])
    return sections


@pytest.fixture(scope="module")
def corpus():
    return _two_topic_corpus()


@pytest.fixture(scope="module")
def dictionary(corpus):
    return TopicService.build_dictionary(corpus, min_sections=1, max_fraction=1.0)


@pytest.fixture(scope="module")
def model(corpus, dictionary):
    return TopicService.train_lda(corpus, dictionary, K=2, alpha=0.1, iterations=50, seed=1)


class TestTokenizeSection:
    """Test cases for section tokenization."""

    def test_words(self):
        """Test stopword, digit and single-letter removal."""
        assert TopicService.tokenize_section("The 3 cats, x and dogs!") == ["cats", "dogs"]

    def test_bigrams_and_phrases(self):
        """Test the two longer n-gram modes."""
        assert TopicService.tokenize_section("cats dogs", ngram="bigram") == ["cats dogs"]
        assert TopicService.tokenize_section("cats dogs", ngram="phrase") == ["cats", "dogs", "cats dogs"]

    def test_unknown_mode(self):
        """Test that unknown n-gram modes are rejected."""
        with pytest.raises(ContractError):
            TopicService.tokenize_section("cats", ngram="trigram")


class TestBuildDictionary:
    """Test cases for section-frequency filtering."""

    def test_min_and_max_filters(self):
        """Test that too rare and too common terms are dropped."""
        sections = [["alpha", "beta"], ["alpha", "gamma"], ["alpha"], ["beta"]]
        dictionary = TopicService.build_dictionary(sections, min_sections=2, max_fraction=0.5)
        assert dictionary.terms == ("beta",)
        assert dictionary.section_frequency == (2,)

    def test_cap_keeps_most_frequent(self):
        """Test the size cap with lexicographic ids afterwards."""
        sections = [["delta", "alpha", "beta"], ["delta", "beta"], ["delta"]]
        dictionary = TopicService.build_dictionary(sections, min_sections=1, max_fraction=1.0, cap=2)
        assert dictionary.terms == ("beta", "delta")
        assert dictionary.ids["delta"] == 1

    def test_empty_dictionary_is_logged(self):
        """Test the warning for a dictionary filtered down to nothing."""
        with patch("src.docstruct.services.topic_service.logger") as mock_logger:
            dictionary = TopicService.build_dictionary([["alpha"]], min_sections=20)
        assert len(dictionary) == 0
        mock_logger.warning.assert_called_once()

    def test_invalid_fraction(self):
        """Test the max_fraction range."""
        with pytest.raises(ContractError):
            TopicService.build_dictionary([["alpha"]], max_fraction=0.0)


class TestTrainLda:
    """Test cases for collapsed Gibbs training."""

    def test_disjoint_vocabularies_separate(self, model):
        """Test that each topic's top terms come from one vocabulary."""
        groups = {frozenset(FRUIT), frozenset(ENGINE)}
        found = {frozenset(term for term, _ in terms) for terms in TopicService.top_terms(model, 4)}
        assert found == groups

    def test_counts_are_conserved_every_sweep(self, corpus, dictionary):
        """Test token totals and non-negative counts after each sweep."""
        lengths = np.array([len(dictionary.encode(s)) for s in corpus])
        states = []

        def check(state):
            assert state.word_topic.min() >= 0
            assert state.word_topic.sum() == lengths.sum()
            np.testing.assert_array_equal(state.doc_topic.sum(axis=1), lengths)
            states.append(state.iteration)

        TopicService.train_lda(corpus, dictionary, K=3, iterations=4, seed=2, on_sweep=check)
        assert states == [0, 1, 2, 3]

    def test_same_seed_same_model(self, corpus, dictionary):
        """Test sampler determinism."""
        a = TopicService.train_lda(corpus, dictionary, K=2, iterations=5, seed=7)
        b = TopicService.train_lda(corpus, dictionary, K=2, iterations=5, seed=7)
        np.testing.assert_array_equal(a.word_topic, b.word_topic)
        assert a.log_likelihood == b.log_likelihood

    def test_single_topic(self, corpus, dictionary):
        """Test that K = 1 puts every token in the one topic."""
        m = TopicService.train_lda(corpus, dictionary, K=1, iterations=2)
        assert m.alpha == 50.0
        np.testing.assert_array_equal(m.doc_topic[:, 0], [len(s) for s in corpus])
        np.testing.assert_allclose(TopicService.infer_topics(m, FRUIT), [1.0])

    def test_distributions_are_normalized(self, model):
        """Test that smoothed distributions sum to one."""
        np.testing.assert_allclose(model.topic_word_distribution.sum(axis=1), 1.0)
        np.testing.assert_allclose(model.doc_topic_distribution().sum(axis=1), 1.0)
        assert len(model.log_likelihood) == 50

    def test_invalid_arguments(self, corpus, dictionary):
        """Test K below one and a corpus with no dictionary tokens."""
        with pytest.raises(ContractError):
            TopicService.train_lda(corpus, dictionary, K=0)
        with pytest.raises(ContractError):
            TopicService.train_lda([["zzz"]], dictionary, K=2, iterations=1)


class TestInference:
    """Test cases for fold-in inference and concepts."""

    def test_unknown_tokens_give_uniform(self, model):
        """Test the uniform distribution for out-of-dictionary sections."""
        np.testing.assert_allclose(TopicService.infer_topics(model, ["zzz", "qqq"]), [0.5, 0.5])

    def test_inferred_topic_matches_vocabulary(self, model):
        """Test that fruit and engine sections land on different topics."""
        fruit = TopicService.infer_topics(model, FRUIT * 3, iterations=20)
        engine = TopicService.infer_topics(model, ENGINE * 3, iterations=20)
        assert int(np.argmax(fruit)) != int(np.argmax(engine))
        assert fruit.sum() == pytest.approx(1.0)

    def test_semantic_concepts(self, model):
        """Test concepts drawn from the section's dominant topic."""
        concepts = TopicService.semantic_concepts(model, FRUIT * 3, n_terms=2, iterations=20)
        assert len(concepts) == 2
        assert set(concepts) <= set(FRUIT)

    def test_no_concepts(self, model):
        """Test zero terms and out-of-dictionary sections."""
        assert TopicService.semantic_concepts(model, FRUIT, n_terms=0) == []
        assert TopicService.semantic_concepts(model, ["zzz"]) == []
        assert TopicService.top_terms(model, 0) == [[], []]

    def test_annotate_tree(self, model, small_document):
        """Test that every section receives a concept list."""
        tree = StructurePipeline("oracle").run(small_document).tree
        TopicService.annotate_tree(tree, model, iterations=5)
        assert all(section.concepts is not None for section in tree.iter_sections())


class TestEvaluation:
    """Test cases for half-split similarity and perplexity."""

    def test_half_split(self, model, corpus):
        """Test that halves of one section agree more than halves of two."""
        report = TopicService.half_split_similarity_eval(model, corpus, chunks=2, iterations=20)
        assert len(report.chunks) == 2
        assert sum(c.sections for c in report.chunks) == len(corpus)
        assert report.mean_intra > report.mean_inter

    def test_short_sections_are_skipped(self, model, corpus):
        """Test that sections under two dictionary tokens are counted as skipped."""
        report = TopicService.half_split_similarity_eval(
            model, [*corpus, ["apple"], ["zzz"]], chunks=2, iterations=5
        )
        assert report.skipped == 2

    def test_too_many_chunks(self, model, corpus):
        """Test that every chunk must get a section."""
        with pytest.raises(ContractError):
            TopicService.half_split_similarity_eval(model, corpus[:3], chunks=5)

    def test_log_perplexity(self, model, corpus):
        """Test a finite negative held-out log-likelihood."""
        value = TopicService.log_perplexity(model, corpus[:4], iterations=10)
        assert np.isfinite(value)
        assert value < 0

    def test_uniform_mixture_likelihood(self, model):
        """Test per-token log-likelihood against direct computation."""
        phi = model.topic_word_distribution
        word = model.dictionary.ids["apple"]
        expected = np.log(0.5 * phi[0, word] + 0.5 * phi[1, word])
        value = TopicService.log_likelihood_per_token(model, [["apple"]], [np.array([0.5, 0.5])])
        assert value == pytest.approx(expected)


class TestTopicModelFile:
    """Test cases for the topic model container."""

    def test_save_and_load(self, model, tmp_path):
        """Test that counts and hyperparameters survive the model file."""
        path = tmp_path / "topics.model"
        TopicService.save_model(model, path)
        reloaded = TopicService.load_model(path)
        np.testing.assert_array_equal(reloaded.word_topic, model.word_topic)
        assert reloaded.dictionary.terms == model.dictionary.terms
        assert (reloaded.K, reloaded.alpha, reloaded.beta) == (model.K, model.alpha, model.beta)

    def test_missing_file(self, tmp_path):
        """Test the missing-model error."""
        with pytest.raises(UsageError):
            TopicService.load_model(tmp_path / "absent.model")
