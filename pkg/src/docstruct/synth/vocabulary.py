"""
Word tables for synthetic documents.

Section classes get distinctive body vocabulary (related work is citation
heavy, approaches and proofs carry equations); domains give every document
a topical vocabulary for topic models to pick up.
"""

# Typical order of top-level sections in an article.
CANONICAL_ORDER = (
    "Abstract",
    "Introduction",
    "Background",
    "RelatedWork",
    "Preliminary",
    "Methodology",
    "Approach",
    "ProofOfTheorem",
    "Implementation",
    "Datasets",
    "Experiments",
    "Evaluation",
    "Results",
    "Discussion",
    "Contribution",
    "Conclusion",
    "FutureWork",
    "Acknowledgments",
    "References",
    "Appendix",
)

CLASS_WORDS: dict[str, tuple[str, ...]] = {
    "Abstract": ("herein", "briefly", "novel", "report", "highlight", "concise", "outline", "overview", "summarize", "introduce"),
    "Introduction": ("motivation", "problem", "challenge", "importance", "goal", "address", "motivated", "question", "emerging", "increasingly"),
    "Background": ("background", "context", "history", "traditionally", "foundation", "concept", "origin", "classical", "theory", "widely"),
    "RelatedWork": ("prior", "previous", "earlier", "literature", "existing", "studied", "proposed", "surveyed", "reported", "compared"),
    "Preliminary": ("notation", "definition", "denote", "assume", "preliminaries", "recall", "standard", "let", "basic", "terminology"),
    "Methodology": ("method", "procedure", "step", "pipeline", "framework", "stage", "workflow", "systematic", "methodology", "protocol"),
    "Approach": ("approach", "formulation", "objective", "optimize", "function", "variable", "constraint", "minimize", "solve", "parameterize"),
    "ProofOfTheorem": ("proof", "lemma", "hence", "therefore", "suppose", "contradiction", "implies", "induction", "holds", "qed"),
    "Implementation": ("implemented", "code", "library", "python", "gpu", "software", "module", "deployment", "source", "repository"),
    "Datasets": ("dataset", "corpus", "samples", "collected", "annotated", "split", "records", "instances", "labeled", "curated"),
    "Experiments": ("experiment", "setup", "trials", "baseline", "configuration", "runs", "hyperparameters", "benchmark", "repeated", "seeds"),
    "Evaluation": ("evaluate", "metric", "precision", "recall", "criteria", "assessment", "validation", "quantitative", "judged", "scored"),
    "Results": ("table", "achieved", "accuracy", "outperforms", "improvement", "percent", "obtained", "gains", "measured", "higher"),
    "Discussion": ("interpret", "implication", "limitation", "suggests", "perhaps", "tradeoff", "insight", "surprisingly", "arguably", "caveat"),
    "Contribution": ("contribution", "novelty", "first", "key", "main", "advance", "original", "offer", "unique", "principal"),
    "Conclusion": ("conclude", "summary", "demonstrated", "overall", "findings", "concluding", "presented", "closing", "final", "shown"),
    "FutureWork": ("future", "plan", "extend", "explore", "investigate", "intend", "direction", "upcoming", "promising", "later"),
    "Acknowledgments": ("thank", "grateful", "funding", "grant", "support", "foundation", "reviewers", "anonymous", "helpful", "acknowledge"),
    "References": ("proceedings", "journal", "press", "vol", "pp", "conference", "publisher", "editors", "transactions", "preprint"),
    "Appendix": ("supplementary", "appendix", "additional", "details", "derivation", "listing", "extra", "omitted", "material", "auxiliary"),
}

GENERIC_WORDS = ("section", "result", "work", "case", "analysis", "part", "form", "value", "point", "set")

CITATION_CLASSES = frozenset({"RelatedWork", "Background", "References"})
EQUATION_CLASSES = frozenset({"Approach", "ProofOfTheorem", "Methodology", "Preliminary"})

DOMAIN_WORDS: dict[str, tuple[str, ...]] = {
    "astrophysics": ("stars", "emission", "gas", "galaxy", "luminosity", "redshift", "stellar", "spectra", "halo", "accretion", "nebula", "photometry"),
    "particle_physics": ("quark", "momentum", "scattering", "hadron", "boson", "collider", "gluon", "neutrino", "detector", "lepton", "decay", "jet"),
    "computer_science": ("algorithm", "network", "graph", "compiler", "memory", "latency", "cache", "protocol", "runtime", "parallel", "kernel", "query"),
    "biology": ("protein", "gene", "cell", "enzyme", "tissue", "mutation", "receptor", "membrane", "sequencing", "expression", "species", "pathway"),
    "mathematics": ("manifold", "polynomial", "operator", "bounded", "convex", "integral", "eigenvalue", "topology", "algebra", "measure", "group", "ring"),
}

SUBSECTION_NOUNS = (
    "Profiles",
    "Estimates",
    "Setup",
    "Estimation",
    "Properties",
    "Measurements",
    "Design",
    "Parameters",
    "Variants",
    "Settings",
    "Regimes",
    "Dynamics",
)

FILLER_WORDS = ("the", "of", "and", "in", "we", "this", "a", "to", "is", "for", "with", "on", "our", "that")

EQUATIONS = (
    "x = 2y + 1",
    "f(x) = ax + b",
    "E = mc^2",
    "p(z|w) = n/N",
    "L = sum(y log p)",
    "a_i <= b_i",
)

__all__ = [
    "CANONICAL_ORDER",
    "CLASS_WORDS",
    "GENERIC_WORDS",
    "CITATION_CLASSES",
    "EQUATION_CLASSES",
    "DOMAIN_WORDS",
    "SUBSECTION_NOUNS",
    "FILLER_WORDS",
    "EQUATIONS",
]
