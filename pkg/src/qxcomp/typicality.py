"""Strong and weak typicality of i.i.d. sequences.

Every predicate here depends on a sequence only through its type (letter
counts), so the exact masses are summed over type classes with multinomial
weights and Monte Carlo draws sample the counts directly.
"""

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .coding import shannon_entropy
from .exceptions import EmptySequence, InputError
from .rng import check_seed, count_hits
from .validation import check_distribution, check_exact_size, check_sequence, get_exact_cap

KINDS = ("strong", "weak")
MEMBERSHIP_SLACK = 1e-12


@dataclass(frozen=True)
class TypeProfile:
    counts: tuple
    N: int

    @property
    def freqs(self):
        return tuple(Fraction(k, self.N) for k in self.counts)

    def as_array(self):
        return np.asarray(self.counts, dtype=float) / self.N


@dataclass(frozen=True)
class MassEstimate:
    estimate: float
    std_error: float
    trials: int
    seed: int = None
    engine: str = "exact"

    @classmethod
    def from_hits(cls, hits, trials, seed):
        est = hits / trials
        return cls(est, math.sqrt(est * (1.0 - est) / trials), trials, seed, "mc")


def check_kind(kind):
    if kind not in KINDS:
        raise InputError(f"kind must be one of {KINDS}, got {kind!r}")
    return kind


def _check_eps(eps):
    if not eps > 0:
        raise InputError(f"eps must be positive, got {eps}")
    return float(eps)


def empirical_type(seq, D):
    seq = check_sequence(seq, D)
    if seq.size == 0:
        raise EmptySequence("empirical type of an empty sequence")
    return TypeProfile(tuple(int(c) for c in np.bincount(seq, minlength=D)), int(seq.size))


def strong_mask(counts, p, eps):
    """Row-wise strong typicality of a ``(M, D)`` array of letter counts."""
    counts = np.atleast_2d(counts)
    N = counts.sum(axis=1, keepdims=True)
    dev = np.abs(counts / N - p)
    return np.all(dev <= eps * p + MEMBERSHIP_SLACK, axis=1)


def weak_mask(counts, p, eps, entropy=None):
    counts = np.atleast_2d(counts)
    if entropy is None:
        entropy = shannon_entropy(p)
    N = counts.sum(axis=1)
    possible = ~np.any((counts > 0) & (p == 0), axis=1)
    with np.errstate(divide="ignore"):
        neglog = np.where(p > 0, -np.log2(np.where(p > 0, p, 1.0)), 0.0)
    rate = (counts @ neglog) / N
    return possible & (np.abs(rate - entropy) <= eps + MEMBERSHIP_SLACK)


def _mask(kind, counts, p, eps):
    if check_kind(kind) == "strong":
        return strong_mask(counts, p, eps)
    return weak_mask(counts, p, eps)


def is_strong_typical(seq, p, eps):
    p = check_distribution(p)
    prof = empirical_type(seq, p.size)
    return bool(strong_mask(np.asarray(prof.counts), p, _check_eps(eps))[0])


def is_weak_typical(seq, p, eps):
    p = check_distribution(p)
    prof = empirical_type(seq, p.size)
    return bool(weak_mask(np.asarray(prof.counts), p, _check_eps(eps))[0])


def sequence_log_prob(seq, p):
    """``log2 P(seq)``; ``-math.inf`` when a letter of zero probability occurs."""
    p = check_distribution(p)
    seq = check_sequence(seq, p.size)
    probs = p[seq]
    if np.any(probs == 0):
        return -math.inf
    return float(np.sum(np.log2(probs)))


def all_sequences(N, D):
    """All ``D**N`` sequences as an ``(D**N, N)`` array, lexicographic order."""
    codes = np.arange(D**N, dtype=np.int64)
    out = np.empty((D**N, N), dtype=np.uint8 if D <= 256 else np.int64)
    for col in range(N - 1, -1, -1):
        codes, out[:, col] = np.divmod(codes, D)
    return out


def sequence_counts(seqs, D):
    return np.stack([(seqs == i).sum(axis=1) for i in range(D)], axis=1)


def enumerate_typical(N, p, eps, kind="strong", exact_cap=None):
    """Typical sequences of length ``N`` in lexicographic order, as rows."""
    p = check_distribution(p)
    eps = _check_eps(eps)
    check_exact_size(p.size, N, exact_cap)
    seqs = all_sequences(N, p.size)
    return seqs[_mask(kind, sequence_counts(seqs, p.size), p, eps)]


def compositions(N, D):
    """All count vectors of length ``D`` summing to ``N``, shape ``(M, D)``."""
    rows = []
    for bars in itertools.combinations(range(N + D - 1), D - 1):
        edges = (-1,) + bars + (N + D - 1,)
        rows.append([edges[j + 1] - edges[j] - 1 for j in range(D)])
    return np.asarray(rows, dtype=np.int64).reshape(-1, D)


def type_class_log2_probs(counts, p):
    """``log2`` of the total probability of each type class in ``counts``."""
    N = int(counts[0].sum())
    lg = np.vectorize(math.lgamma)
    log_multi = (math.lgamma(N + 1) - lg(counts + 1).sum(axis=1)) / math.log(2)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(counts > 0, counts * np.log2(np.where(p > 0, p, 1.0)), 0.0)
    impossible = np.any((counts > 0) & (p == 0), axis=1)
    out = log_multi + terms.sum(axis=1)
    out[impossible] = -np.inf
    return out


def class_mass(counts, mask, p):
    """Total probability of the type classes selected by ``mask``."""
    if not np.any(mask):
        return 0.0
    lp = type_class_log2_probs(counts[mask], p)
    return float(min(math.fsum(np.exp2(lp)), 1.0))


def typical_mass_exact(N, p, eps, kind="strong", exact_cap=None):
    p = check_distribution(p)
    eps = _check_eps(eps)
    check_exact_size(p.size, N, exact_cap)
    counts = compositions(N, p.size)
    return MassEstimate(class_mass(counts, _mask(kind, counts, p, eps), p), 0.0, 0)


def typical_mass_mc(N, p, eps, kind="strong", trials=100_000, seed=0, n_jobs=1):
    p = check_distribution(p)
    eps = _check_eps(eps)
    check_kind(kind)
    seed = check_seed(seed)
    if N < 1:
        raise InputError("N must be >= 1")
    hits = count_hits(lambda c: _mask(kind, c, p, eps), N, p, trials, seed, n_jobs)
    return MassEstimate.from_hits(hits, trials, seed)


def typical_mass(N, p, eps, kind="strong", trials=100_000, seed=0, exact_cap=None, n_jobs=1):
    """Exact mass when ``D**N`` is within the exact cap, Monte Carlo otherwise."""
    p = check_distribution(p)
    if p.size**N <= get_exact_cap(exact_cap):
        return typical_mass_exact(N, p, eps, kind, exact_cap)
    return typical_mass_mc(N, p, eps, kind, trials, seed, n_jobs)
