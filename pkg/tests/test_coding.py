import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qxcomp.coding import (
    Codebook,
    build_prefix_code,
    cross_entropy,
    expected_length,
    shannon_entropy,
    shannon_lengths,
)
from qxcomp.exceptions import DecodeError, DimensionMismatch, KraftViolated, ZeroProbabilityLetter

from conftest import random_distribution


def _prefix_free(words):
    return not any(a != b and b.startswith(a) for a in words for b in words)


def test_shannon_lengths_examples():
    cb = shannon_lengths([0.5, 0.25, 0.25], "integer")
    assert cb.lengths == (1, 2, 2) and cb.kraft_sum() == 1.0
    assert shannon_lengths([0.5, 0.5], "real").lengths == (1.0, 1.0)
    assert shannon_lengths([0.9, 0.1], "integer").lengths == (1, 4)


def test_shannon_lengths_dyadic_snapping():
    # log2(1/q) lands a hair above an integer in floating point for these
    for k in range(1, 30):
        q = 2.0**-k
        assert shannon_lengths([q, 1 - q], "integer").lengths[0] == k


def test_shannon_lengths_real_mode_invariant(rng):
    q = random_distribution(rng, 6, floor=1e-3)
    cb = shannon_lengths(q, "real")
    assert cb.codewords is None
    assert np.allclose(cb.lengths, np.log2(1 / q), rtol=0, atol=0)


def test_shannon_lengths_zero_letter():
    with pytest.raises(ZeroProbabilityLetter):
        shannon_lengths([1.0, 0.0], "integer")


def test_build_prefix_code_examples():
    assert build_prefix_code([1, 2, 2]) == ["0", "10", "11"]
    assert build_prefix_code([2, 2, 2, 2]) == ["00", "01", "10", "11"]
    with pytest.raises(KraftViolated):
        build_prefix_code([1, 1, 1])


def test_build_prefix_code_tie_break_by_index():
    assert build_prefix_code([2, 1, 3, 3]) == ["10", "0", "110", "111"]


def test_entropy_examples():
    assert shannon_entropy([0.25] * 4) == 2.0
    assert shannon_entropy([1.0, 0.0]) == 0.0
    assert shannon_entropy([0.75, 0.25]) == pytest.approx(0.8113, abs=1e-4)


def test_cross_entropy_examples():
    assert cross_entropy([0.75, 0.25], [0.5, 0.5]) == 1.0
    assert cross_entropy([0.75, 0.25], [0.75, 0.25]) == pytest.approx(shannon_entropy([0.75, 0.25]), abs=1e-15)
    assert cross_entropy([1.0, 0.0], [0.0, 1.0]) == math.inf
    with pytest.raises(DimensionMismatch):
        cross_entropy([1.0], [0.5, 0.5])


def test_expected_length_examples(rng):
    q = random_distribution(rng, 5, floor=1e-3)
    p = random_distribution(rng, 5)
    assert expected_length(p, shannon_lengths(q, "real")) == pytest.approx(cross_entropy(p, q), abs=1e-10)
    assert expected_length([0.75, 0.25], shannon_lengths([0.9, 0.1], "integer")) == pytest.approx(1.75)
    dy = [0.5, 0.25, 0.125, 0.125]
    assert expected_length(dy, shannon_lengths(dy, "integer")) == shannon_entropy(dy)


def test_gibbs_inequality():
    rng = np.random.default_rng(101)
    for _ in range(1000):
        D = int(rng.integers(2, 17))
        p, q = random_distribution(rng, D), random_distribution(rng, D)
        gap = cross_entropy(p, q) - shannon_entropy(p)
        assert gap >= -1e-10
        if np.max(np.abs(p - q)) >= 1e-9:
            assert gap > 1e-10
    p = random_distribution(rng, 7)
    assert abs(cross_entropy(p, p) - shannon_entropy(p)) < 1e-10


def test_integer_length_sandwich():
    rng = np.random.default_rng(202)
    for _ in range(1000):
        D = int(rng.integers(2, 17))
        p, q = random_distribution(rng, D), random_distribution(rng, D, floor=1e-6)
        H = cross_entropy(p, q)
        L = expected_length(p, shannon_lengths(q, "integer"))
        assert H - 1e-12 <= L < H + 1


def test_kraft_prefix_and_roundtrip():
    rng = np.random.default_rng(303)
    for _ in range(1000):
        D = int(rng.integers(2, 17))
        q = random_distribution(rng, D, floor=1e-6)
        cb = shannon_lengths(q, "integer")
        assert cb.kraft_sum() <= 1 + 1e-12
        assert _prefix_free(cb.codewords)
        letters = rng.integers(0, D, size=int(rng.integers(0, 50))).tolist()
        assert cb.decode(cb.encode(letters)) == letters


def test_decode_errors():
    cb = shannon_lengths([0.5, 0.25, 0.25], "integer")
    with pytest.raises(DecodeError):
        cb.decode("01")


@given(st.lists(st.integers(1, 12), min_size=1, max_size=20))
def test_prefix_code_property(lengths):
    if sum(2.0**-l for l in lengths) > 1:
        with pytest.raises(KraftViolated):
            build_prefix_code(lengths)
        return
    words = build_prefix_code(lengths)
    assert [len(w) for w in words] == lengths
    assert _prefix_free(words)


def test_codebook_json_roundtrip():
    cb = shannon_lengths([0.9, 0.05, 0.05], "integer")
    obj = json.loads(cb.to_json())
    assert obj == {"mode": "integer", "lengths": [1, 5, 5], "codewords": ["0", "10000", "10001"]}
    assert Codebook.from_dict(obj) == cb
    real = shannon_lengths([0.5, 0.5], "real")
    assert Codebook.from_dict(json.loads(real.to_json())) == real
