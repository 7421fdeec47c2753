"""Acceptance suite: one PASS/FAIL line per criterion.

Lines are collected in ``RESULTS`` and echoed in the terminal summary by
``conftest.pytest_terminal_summary``; run with ``-s`` to see them inline too.
"""

import itertools
import math
import time

import numpy as np
import pytest

from qxcomp.cli import main
from qxcomp.coding import cross_entropy, expected_length, shannon_lengths
from qxcomp.linalg import fidelity, kron_power
from qxcomp.protocol import (
    LengthConditionSpec,
    basis_change,
    compress_exact,
    length_observable,
    mean_codeword_length,
    pi_mass_exact,
    pi_mass_mc,
    prepare,
    quantum_cross_entropy,
    von_neumann_entropy,
)
from qxcomp.typicality import enumerate_typical, shannon_entropy

from conftest import RESULTS, SCENARIO_RHO0, SCENARIO_S_CROSS, SCENARIO_SIGMA0, random_density, random_distribution


def report(k, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {k:2d}: {detail}"
    RESULTS.append(line)
    print(line)
    assert ok, line


def _scenario():
    return prepare(SCENARIO_RHO0, SCENARIO_SIGMA0)


def test_c01_optimal_rate_recovery():
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    worst = 0.0
    for k in range(100):
        rho = random_density(rng, (2, 4, 8)[k % 3])
        worst = max(worst, abs(quantum_cross_entropy(rho, rho) - von_neumann_entropy(rho)))
    dt = time.perf_counter() - t0
    report(1, worst < 1e-10 and dt < 5, f"max |S(rho,rho) - S(rho)| = {worst:.2e} (< 1e-10), {dt:.2f}s (< 5s)")


def test_c02_klein_inequality():
    rng = np.random.default_rng(2)
    t0 = time.perf_counter()
    worst = math.inf
    for k in range(1000):
        D = 2 + k % 7
        rho, sigma = random_density(rng, D), random_density(rng, D)
        worst = min(worst, quantum_cross_entropy(rho, sigma) - von_neumann_entropy(rho))
    dt = time.perf_counter() - t0
    report(2, worst >= -1e-10 and dt < 30, f"min S(rho,sigma) - S(rho) = {worst:.2e} (>= -1e-10), {dt:.2f}s (< 30s)")


def test_c03_two_path_identity():
    rng = np.random.default_rng(3)
    worst = 0.0
    for k in range(1000):
        D = 2 + k % 7
        rho, sigma = random_density(rng, D), random_density(rng, D)
        # matrix path via LAPACK: -tr(rho log2 sigma)
        lam, vec = np.linalg.eigh(sigma)
        log_sigma = (vec * np.log2(lam)) @ vec.conj().T
        matrix_path = -np.trace(rho @ log_sigma).real
        st = prepare(rho, sigma)
        worst = max(worst, abs(matrix_path + float(np.sum(st.r * np.log2(st.q)))))
    report(3, worst < 1e-9, f"max |matrix path - classical path| = {worst:.2e} (< 1e-9)")


def _diag_mass(res, rho, N):
    # independent path: rotate, build the N-fold product with np.kron, sum kept diagonal entries
    u = res.unitary
    rot = u @ rho @ u.conj().T
    big = np.ones((1, 1))
    for _ in range(N):
        big = np.kron(big, rot)
    return float(np.sum(np.diag(big).real[res.kept]))


def test_c04_fidelity_identity():
    rng = np.random.default_rng(4)
    pairs = [(SCENARIO_RHO0, SCENARIO_SIGMA0)] + [(random_density(rng, 2), random_density(rng, 2)) for _ in range(5)]
    t0 = time.perf_counter()
    worst, cases = 0.0, 0
    for rho, sigma in pairs:
        for N in (2, 3):
            for eps in (0.6, 10.0):
                try:
                    res = compress_exact(rho, sigma, N, eps)
                except Exception:
                    if eps == 10.0:
                        raise
                    continue
                f = fidelity(kron_power(rho, N), res.decompress())
                worst = max(worst, abs(f - _diag_mass(res, rho, N)))
                cases += 1
    dt = time.perf_counter() - t0
    report(4, worst < 1e-8 and dt < 10,
           f"{cases} cases, max |F - tr(Pi rho^N)| = {worst:.2e} (< 1e-8), {dt:.2f}s (< 10s)")


def test_c05_unit_probability():
    st = _scenario()
    t0 = time.perf_counter()
    ests = [pi_mass_mc(LengthConditionSpec(N, st.S_cross, 0.1), st.r, st.q, trials=100_000, seed=5)
            for N in (50, 200, 1000)]
    dt = time.perf_counter() - t0
    mono = all(b.estimate >= a.estimate - 3 * max(a.std_error, b.std_error) for a, b in zip(ests, ests[1:]))
    vals = ", ".join(f"{e.estimate:.4f}+-{e.std_error:.4f}" for e in ests)
    ok = abs(st.S_cross - SCENARIO_S_CROSS) < 1e-12 and mono and ests[-1].estimate >= 0.95 and dt < 60
    report(5, ok, f"pi_mass at N=50,200,1000: {vals}; monotone={mono}, last >= 0.95, {dt:.2f}s (< 60s)")


def test_c06_exact_mc_agreement():
    rng = np.random.default_rng(6)
    worst = 0.0
    for k in range(20):
        st = prepare(random_density(rng, 2), random_density(rng, 2))
        spec = LengthConditionSpec(12, st.S_cross, float(rng.uniform(0.05, 0.8)))
        exact = pi_mass_exact(spec, st.r, st.q).estimate
        mc = pi_mass_mc(spec, st.r, st.q, trials=100_000, seed=600 + k)
        if mc.std_error == 0:
            z = 0.0 if abs(mc.estimate - exact) < 1e-12 else math.inf
        else:
            z = abs(mc.estimate - exact) / mc.std_error
        worst = max(worst, z)
    report(6, worst <= 4, f"20 parameter sets, max |mc - exact| / std_error = {worst:.2f} (<= 4)")


def test_c07_integer_sandwich():
    rng = np.random.default_rng(7)
    bad = 0
    for k in range(1000):
        D = 2 + k % 15
        p, q = random_distribution(rng, D), random_distribution(rng, D, floor=1e-6)
        H, L = cross_entropy(p, q), expected_length(p, shannon_lengths(q, "integer"))
        bad += not (H - 1e-12 <= L < H + 1)
        Dq = 2 + k % 7
        rho, sigma = random_density(rng, Dq), random_density(rng, Dq)
        st = prepare(rho, sigma)
        Lq = mean_codeword_length(basis_change(rho, sigma), length_observable(st.q, "integer"))
        bad += not (st.S_cross - 1e-12 <= Lq < st.S_cross + 1)
    report(7, bad == 0, f"{bad} violations of H <= <l> < H+1 over 1000 classical and 1000 quantum pairs")


def test_c08_kraft_prefix_roundtrip():
    rng = np.random.default_rng(8)
    bad = 0
    for _ in range(1000):
        D = int(rng.integers(2, 17))
        cb = shannon_lengths(random_distribution(rng, D, floor=1e-6), "integer")
        words = cb.codewords
        prefix_free = not any(a != b and b.startswith(a) for a in words for b in words)
        msg = rng.integers(0, D, size=int(rng.integers(1, 60))).tolist()
        bad += not (cb.kraft_sum() <= 1 + 1e-12 and prefix_free and cb.decode(cb.encode(msg)) == msg)
    report(8, bad == 0, f"{bad} failures of Kraft / prefix-free / round-trip on 1000 codebooks")


def test_c09_sub_rate_failure():
    st = _scenario()
    eps = 0.1
    m = pi_mass_mc(LengthConditionSpec(1000, st.S_cross - 5 * eps, eps), st.r, st.q, trials=100_000, seed=9)
    report(9, m.estimate <= 0.05, f"pi_mass with centre S_cross - 5 eps at N=1000: {m.estimate:.3g} (<= 0.05)")


def test_c10_corrected_containments():
    rng = np.random.default_rng(10)
    checked, bad = 0, 0
    for D in (2, 3):
        pairs = [prepare(random_density(rng, D), random_density(rng, D)) for _ in range(2)]
        for N in range(1, 13):
            for st in pairs:
                H = shannon_entropy(st.r)
                ell_r = -np.log2(st.r)
                ell_q = -np.log2(st.q)
                for eps in (0.1, 0.3):
                    seqs = enumerate_typical(N, st.r, eps, "strong")
                    if len(seqs) == 0:
                        continue
                    # sequence-level sums, not type-level
                    weak_gap = np.abs(ell_r[seqs].sum(axis=1) / N - H)
                    len_gap = np.abs(ell_q[seqs].sum(axis=1) / N - st.S_cross)
                    bad += int(np.sum(weak_gap > eps * H + 1e-12))
                    bad += int(np.sum(len_gap > eps * st.S_cross + 1e-12))
                    checked += len(seqs)
    report(10, bad == 0 and checked > 0,
           f"{checked} strong-typical sequences (N <= 12, D <= 3), {bad} outside eps*H or eps*S_cross")


def test_c11_reproducibility(scenario_files, tmp_path):
    base = ["simulate", "--rho0", scenario_files[0], "--sigma0", scenario_files[1],
            "--n-list", "3,12,50,200,1000", "--eps", "0.1", "--trials", "100000", "--seed", "11"]
    outs = []
    for tag, extra in (("a", []), ("b", []), ("c", ["--jobs", "4"])):
        path = tmp_path / f"{tag}.csv"
        assert main(base + extra + ["--out", str(path)]) == 0
        outs.append(path.read_bytes() + (tmp_path / f"{tag}.dat").read_bytes())
    same_runs, same_jobs = outs[0] == outs[1], outs[0] == outs[2]
    report(11, same_runs and same_jobs,
           f"byte-identical across runs={same_runs}, serial vs 4 jobs={same_jobs} ({len(outs[0])} bytes)")
