"""Variable-length coding against a believed distribution.

Letters are coded with Shannon lengths ``log2(1/q_i)`` (real mode) or
``ceil(log2(1/q_i))`` (integer mode, with canonical prefix codewords).
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import DecodeError, DimensionMismatch, InputError, KraftViolated, ZeroProbabilityLetter
from .validation import check_distribution

MODES = ("real", "integer")
DYADIC_TOL = 1e-9
KRAFT_TOL = 1e-12


def check_mode(mode):
    if mode not in MODES:
        raise InputError(f"mode must be one of {MODES}, got {mode!r}")
    return mode


def ceil_log2_inv(q):
    """``ceil(log2(1/q))`` that snaps values within 1e-9 of an integer first."""
    x = math.log2(1.0 / q)
    r = round(x)
    if abs(x - r) <= DYADIC_TOL:
        return int(r)
    return math.ceil(x)


@dataclass(frozen=True)
class Codebook:
    lengths: tuple
    mode: str
    codewords: tuple = None

    @property
    def D(self):
        return len(self.lengths)

    def kraft_sum(self):
        return math.fsum(2.0 ** -l for l in self.lengths)

    def to_dict(self):
        return {
            "mode": self.mode,
            "lengths": list(self.lengths),
            "codewords": list(self.codewords) if self.codewords is not None else None,
        }

    @classmethod
    def from_dict(cls, obj):
        mode = check_mode(obj["mode"])
        lengths = tuple(int(l) if mode == "integer" else float(l) for l in obj["lengths"])
        cw = obj.get("codewords")
        cb = cls(lengths, mode, tuple(cw) if cw is not None else None)
        if mode == "integer" and cb.codewords is None:
            cb = cls(lengths, mode, tuple(build_prefix_code(lengths)))
        return cb

    def to_json(self):
        return json.dumps(self.to_dict())

    def encode(self, letters):
        if self.codewords is None:
            raise InputError("only integer-mode codebooks carry codewords")
        return "".join(self.codewords[i] for i in letters)

    def decode(self, bits):
        """Greedy prefix decoding of an ASCII '0'/'1' string."""
        if self.codewords is None:
            raise InputError("only integer-mode codebooks carry codewords")
        table = {cw: i for i, cw in enumerate(self.codewords)}
        longest = max(self.lengths)
        out, start = [], 0
        for end in range(1, len(bits) + 1):
            word = bits[start:end]
            if word in table:
                out.append(table[word])
                start = end
            elif end - start >= longest:
                raise DecodeError(f"no codeword matches bits at offset {start}")
        if start != len(bits):
            raise DecodeError("trailing bits do not form a complete codeword")
        return out


def build_prefix_code(lengths):
    """Canonical prefix code for the given positive integer lengths.

    Letters are ordered by ``(length, index)`` and receive consecutive
    binary numbers, shifted left whenever the length grows.
    """
    lengths = [int(l) for l in lengths]
    if not lengths or any(l < 1 for l in lengths):
        raise InputError("codeword lengths must be positive integers")
    kraft = math.fsum(2.0 ** -l for l in lengths)
    if kraft > 1.0 + KRAFT_TOL:
        raise KraftViolated(f"Kraft sum {kraft:.6g} exceeds 1")
    codes = [None] * len(lengths)
    code, prev = 0, None
    for i in sorted(range(len(lengths)), key=lambda i: (lengths[i], i)):
        l = lengths[i]
        if prev is not None:
            code = (code + 1) << (l - prev)
        prev = l
        codes[i] = format(code, f"0{l}b")
    return codes


def shannon_lengths(q, mode="real"):
    q = check_distribution(q, name="q")
    check_mode(mode)
    if np.any(q <= 0):
        raise ZeroProbabilityLetter(f"letter {int(np.argmin(q))} has zero believed probability")
    if mode == "real":
        return Codebook(tuple(float(-np.log2(x)) for x in q), "real")
    lengths = tuple(ceil_log2_inv(float(x)) for x in q)
    # a letter with q = 1 still needs one bit to be transmitted as a codeword
    lengths = tuple(max(l, 1) for l in lengths)
    return Codebook(lengths, "integer", tuple(build_prefix_code(lengths)))


def shannon_entropy(p):
    """Shannon entropy in bits, with ``0 log 0 = 0``."""
    p = check_distribution(p)
    nz = p[p > 0]
    return float(max(-np.sum(nz * np.log2(nz)), 0.0))


def cross_entropy(p, q):
    """``sum_i p_i log2(1/q_i)``; ``math.inf`` when ``p`` leaks onto a zero of ``q``."""
    p = check_distribution(p)
    q = check_distribution(q, name="q")
    if p.shape != q.shape:
        raise DimensionMismatch(f"p has {p.size} letters, q has {q.size}")
    support = p > 0
    if np.any(q[support] == 0):
        return math.inf
    return float(-np.sum(p[support] * np.log2(q[support])))


def expected_length(p, cb):
    p = check_distribution(p)
    if p.size != cb.D:
        raise DimensionMismatch(f"p has {p.size} letters, codebook has {cb.D}")
    return float(np.dot(p, np.asarray(cb.lengths, dtype=float)))
