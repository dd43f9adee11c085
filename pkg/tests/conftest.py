from __future__ import annotations

import os

import pytest

from tutorkit.acts import load_taxonomy_file
from tutorkit.corpus import load_corpus

DATA_DIR = os.path.join(os.path.dirname(__file__), "data")
FIXTURE_CORPUS = os.path.join(DATA_DIR, "fixture_corpus.txt")
EXPERT_FILE = os.path.join(DATA_DIR, "expert_minority.jsonl")


@pytest.fixture(scope="session")
def taxonomy():
    return load_taxonomy_file()


@pytest.fixture(scope="session")
def fixture_corpus(taxonomy):
    return load_corpus(FIXTURE_CORPUS, taxonomy)


@pytest.fixture(scope="session")
def fixture_text():
    with open(FIXTURE_CORPUS, encoding="utf-8") as fh:
        return fh.read()
