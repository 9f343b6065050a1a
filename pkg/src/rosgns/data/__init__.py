"""Bundled toy corpus (about 10^5 tokens) and a matching similarity set.

Both are generated by ``scripts/make_toy_corpus.py`` from a seeded grammar.
"""

from importlib import resources


def toy_corpus_path():
    return resources.files(__name__) / "toy_corpus.txt"


def toy_similarity_path():
    return resources.files(__name__) / "toy_similarity.tsv"
