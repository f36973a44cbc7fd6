"""Shared fixtures and builders for the test suite."""

from __future__ import annotations

import random

import pytest

from fuseval.trec_io import Qrels, Run, canonical_sort


def make_run(tag, lists):
    """Build a canonical Run from topic -> [(doc, score), ...]."""
    return Run(run_tag=tag, lists={t: canonical_sort(list(v)) for t, v in lists.items()})


def make_qrels(judgments):
    return Qrels(judgments={t: dict(v) for t, v in judgments.items()})


def random_run(rng: random.Random, tag, topics, max_docs=20, doc_pool=None, score_digits=4):
    """Random canonical run with scores of limited precision (round-trip safe)."""
    lists = {}
    pool = doc_pool or [f"d{i:03d}" for i in range(50)]
    for topic in topics:
        n = rng.randint(1, max_docs)
        docs = rng.sample(pool, min(n, len(pool)))
        entries = [(d, round(rng.uniform(0, 10), score_digits)) for d in docs]
        lists[topic] = entries
    return make_run(tag, lists)


def random_qrels(rng: random.Random, topics, doc_pool=None, judged_fraction=0.6, max_grade=2):
    pool = doc_pool or [f"d{i:03d}" for i in range(50)]
    judgments = {}
    for topic in topics:
        judged = {}
        for doc in pool:
            if rng.random() < judged_fraction:
                judged[doc] = rng.randint(0, max_grade)
        judgments[topic] = judged
    return make_qrels(judgments)


@pytest.fixture
def rng():
    return random.Random(20260823)


@pytest.fixture
def store(tmp_path):
    from fuseval.store import Store

    return Store(tmp_path / "store")
