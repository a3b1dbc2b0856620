"""
Line features: layout features, header vocabulary and TF-IDF n-grams.
"""

from .featurizer import DocumentFeaturizer
from .layout import (
    HeuristicTagger,
    LineContext,
    PosTagger,
    document_contexts,
    extract_layout_features,
    numbering_depth,
)
from .ngrams import NgramVectorizer, fit_ngram_vectorizer, vectorize_text
from .vector import LAYOUT_FEATURES, N_LAYOUT, VECTOR_MODES, FeatureVector, combine
from .vocabulary import HeaderVocabulary, build_header_vocabulary, top_header_words

__all__ = [
    "DocumentFeaturizer",
    "FeatureVector",
    "HeaderVocabulary",
    "HeuristicTagger",
    "LAYOUT_FEATURES",
    "LineContext",
    "N_LAYOUT",
    "NgramVectorizer",
    "PosTagger",
    "VECTOR_MODES",
    "build_header_vocabulary",
    "combine",
    "document_contexts",
    "extract_layout_features",
    "fit_ngram_vectorizer",
    "numbering_depth",
    "top_header_words",
    "vectorize_text",
]
