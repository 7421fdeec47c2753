"""Compression of an i.i.d. quantum source coded for a believed state.

The encoder believes the source is ``sigma0 = sum_i q_i |a_i><a_i|`` while
the true source is ``rho0``. Rotating ``|a_i>`` onto the computational
basis, giving letter ``i`` the length ``log2(1/q_i)`` and projecting
``rho^{(x)N}`` onto product states whose total length lies within
``N * eps`` of ``N * S(rho0, sigma0)`` yields a faithful code at the
quantum cross entropy rate.

Because the projector is diagonal in the product basis, its mass
``tr(Pi rho^{(x)N})`` is the classical probability that a sequence drawn
from the induced distribution ``r_i = <a_i|rho0|a_i>`` meets the length
condition. Only :func:`compress_exact` builds matrices on the N-copy space.
"""

import json
import math
from dataclasses import asdict, dataclass, field
from functools import cached_property

import numpy as np

from .coding import ceil_log2_inv, check_mode
from .exceptions import DimensionMismatch, EmptyProjector, InputError, NotDensityMatrix, SupportMismatch
from .io import format_value
from .linalg import SUPPORT_TOL, SpectralDecomposition, eig_hermitian, fidelity, kron_power, matrix_fn
from .rng import check_seed, count_hits
from .typicality import MEMBERSHIP_SLACK, MassEstimate, all_sequences, class_mass, compositions, sequence_counts
from .validation import check_density_matrix, check_exact_size, get_exact_cap

LEAK_TOL = 1e-10
INDUCED_TOL = 1e-9
FIDELITY_MAX_DIM = 1024


@dataclass(frozen=True, eq=False)
class QuantumSource:
    """A density matrix with an optional label.

    Eigenvalues within 1e-10 below zero are accepted and clamped to zero in
    :attr:`spectrum`; eigenvalues below 1e-12 are treated as outside the
    support.
    """

    rho: np.ndarray
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "rho", check_density_matrix(self.rho, name=self.label or "rho"))

    @property
    def D(self):
        return self.rho.shape[0]

    @cached_property
    def spectrum(self):
        s = eig_hermitian(self.rho)
        lam = np.where(s.eigenvalues < SUPPORT_TOL, 0.0, s.eigenvalues)
        return SpectralDecomposition(lam, s.eigenvectors)


def as_source(x, label=""):
    if isinstance(x, QuantumSource):
        return x
    return QuantumSource(np.asarray(x), label)


def _basis(b):
    if isinstance(b, SpectralDecomposition):
        return b
    return as_source(b).spectrum


def _check_pair(rho0, sigma0):
    if rho0.D != sigma0.D:
        raise DimensionMismatch(f"rho0 is {rho0.D}-dimensional, sigma0 is {sigma0.D}-dimensional")


def von_neumann_entropy(src):
    lam = as_source(src).spectrum.eigenvalues
    lam = lam[lam > SUPPORT_TOL]
    return float(max(-np.sum(lam * np.log2(lam)), 0.0))


def quantum_cross_entropy(rho0, sigma0):
    """``-tr(rho0 log2 sigma0)`` in bits, ``math.inf`` if ``rho0`` leaks off the support."""
    rho0, sigma0 = as_source(rho0, "rho0"), as_source(sigma0, "sigma0")
    _check_pair(rho0, sigma0)
    s = sigma0.spectrum
    proj = matrix_fn(s, lambda x: 1.0, support_only=True)
    leak = 1.0 - np.trace(rho0.rho @ proj).real
    if leak > LEAK_TOL:
        return math.inf
    log_sigma = matrix_fn(s, math.log2, support_only=True)
    return float(-np.trace(rho0.rho @ log_sigma).real)


@dataclass(frozen=True)
class InducedDistribution:
    r: np.ndarray


def induced_distribution(rho0, sigma_basis):
    """Diagonal of ``rho0`` in the believed eigenbasis, ``r_i = <a_i|rho0|a_i>``."""
    rho0 = as_source(rho0, "rho0")
    a = _basis(sigma_basis).eigenvectors
    if a.shape[0] != rho0.D:
        raise DimensionMismatch(f"basis is {a.shape[0]}-dimensional, rho0 is {rho0.D}-dimensional")
    diag = np.einsum("ji,jk,ki->i", a.conj(), rho0.rho, a)
    if np.max(np.abs(diag.imag)) > 1e-10:
        raise NotDensityMatrix("diagonal of rho0 in the believed basis is not real")
    r = np.clip(diag.real, 0.0, 1.0)
    if abs(r.sum() - 1.0) > INDUCED_TOL:
        raise NotDensityMatrix(f"induced distribution sums to {r.sum():.12g}")
    return InducedDistribution(r)


def basis_unitary(sigma_basis):
    """``U = sum_i |i><a_i|``, mapping the believed eigenbasis to the computational one."""
    return _basis(sigma_basis).eigenvectors.conj().T


def basis_change(rho0, sigma_basis):
    rho0 = as_source(rho0, "rho0")
    u = basis_unitary(sigma_basis)
    if u.shape[0] != rho0.D:
        raise DimensionMismatch(f"basis is {u.shape[0]}-dimensional, rho0 is {rho0.D}-dimensional")
    out = u @ rho0.rho @ u.conj().T
    return 0.5 * (out + out.conj().T)


@dataclass(frozen=True)
class LengthObservable:
    """Diagonal length operator ``L = sum_i l_i |i><i|`` (``inf`` off the support)."""

    diag_lengths: np.ndarray
    mode: str = "real"


def length_observable(q, mode="real"):
    check_mode(mode)
    q = np.asarray(q, dtype=float)
    out = np.full(q.shape, math.inf)
    for i, qi in enumerate(q):
        if qi >= SUPPORT_TOL:
            out[i] = -math.log2(qi) if mode == "real" else ceil_log2_inv(qi)
    return LengthObservable(out, mode)


def mean_codeword_length(rho, L):
    """``tr(rho L) = sum_i rho_ii l_i``; letters with no weight contribute nothing."""
    rho = np.asarray(rho)
    diag = np.diagonal(rho).real
    lengths = np.asarray(L.diag_lengths, dtype=float)
    if diag.shape != lengths.shape:
        raise DimensionMismatch(f"state has {diag.size} levels, observable has {lengths.size}")
    live = diag > LEAK_TOL
    if np.any(np.isinf(lengths[live])):
        return math.inf
    return float(np.dot(diag[live], lengths[live]))


@dataclass(frozen=True)
class LengthConditionSpec:
    """Window ``|(1/N) sum_n l_{i_n} - center| <= eps`` on the per-copy length."""

    N: int
    center: float
    eps: float
    mode: str = "real"

    def __post_init__(self):
        if self.N < 1:
            raise InputError(f"N must be >= 1, got {self.N}")
        if not self.eps > 0:
            raise InputError(f"eps must be positive, got {self.eps}")
        check_mode(self.mode)

    def lengths(self, q):
        return length_observable(q, self.mode).diag_lengths

    def mask(self, counts, lengths):
        """Row-wise length condition for a ``(M, D)`` array of letter counts."""
        counts = np.atleast_2d(counts)
        finite = np.isfinite(lengths)
        reachable = ~np.any(counts[:, ~finite] > 0, axis=1)
        mean = counts[:, finite] @ lengths[finite] / counts.sum(axis=1)
        return reachable & (np.abs(mean - self.center) <= self.eps + MEMBERSHIP_SLACK)

    def satisfied(self, seq, q):
        counts = np.bincount(np.asarray(seq), minlength=len(q))
        return bool(self.mask(counts, self.lengths(q))[0])


def check_support(r, q):
    """Raise SupportMismatch if ``r`` puts weight on letters outside ``q``'s support."""
    r, q = np.asarray(r, dtype=float), np.asarray(q, dtype=float)
    if r.shape != q.shape:
        raise DimensionMismatch(f"r has {r.size} letters, q has {q.size}")
    leak = r[q < SUPPORT_TOL].sum()
    if leak >= LEAK_TOL:
        raise SupportMismatch(f"true state puts weight {leak:.3e} outside the believed support")


def _r_vector(r):
    return np.asarray(r.r if isinstance(r, InducedDistribution) else r, dtype=float)


def pi_mass_exact(spec, r, q, exact_cap=None):
    """``tr(Pi rho^{(x)N})`` summed exactly over type classes of the induced distribution."""
    r, q = _r_vector(r), np.asarray(q, dtype=float)
    check_support(r, q)
    check_exact_size(r.size, spec.N, exact_cap)
    counts = compositions(spec.N, r.size)
    return MassEstimate(class_mass(counts, spec.mask(counts, spec.lengths(q)), r), 0.0, 0)


def pi_mass_mc(spec, r, q, trials=100_000, seed=0, n_jobs=1):
    """Monte Carlo estimate of ``tr(Pi rho^{(x)N})`` from sequences drawn from ``r``."""
    r, q = _r_vector(r), np.asarray(q, dtype=float)
    check_support(r, q)
    seed = check_seed(seed)
    lengths = spec.lengths(q)
    hits = count_hits(lambda c: spec.mask(c, lengths), spec.N, r, trials, seed, n_jobs)
    return MassEstimate.from_hits(hits, trials, seed)


@dataclass(frozen=True, eq=False)
class Setup:
    """Everything the encoder derives from ``(rho0, sigma0)`` before seeing copies."""

    rho0: QuantumSource
    sigma0: QuantumSource
    q: np.ndarray
    r: np.ndarray
    unitary: np.ndarray
    S_cross: float


def prepare(rho0, sigma0):
    rho0, sigma0 = as_source(rho0, "rho0"), as_source(sigma0, "sigma0")
    _check_pair(rho0, sigma0)
    s = sigma0.spectrum
    return Setup(
        rho0,
        sigma0,
        s.eigenvalues,
        induced_distribution(rho0, s).r,
        basis_unitary(s),
        quantum_cross_entropy(rho0, sigma0),
    )


def length_condition(rho0, sigma0, N, eps, mode="real"):
    """Window centred on ``S(rho0, sigma0)`` (real mode) or on ``sum_i r_i l_i`` (integer mode)."""
    st = prepare(rho0, sigma0)
    check_support(st.r, st.q)
    if mode == "real":
        center = st.S_cross
    else:
        center = mean_codeword_length(np.diag(st.r), length_observable(st.q, "integer"))
    return LengthConditionSpec(int(N), float(center), float(eps), mode)


def kept_sequences(spec, q, D, exact_cap=None):
    """Flat indices (lexicographic) of product basis states inside the window."""
    check_exact_size(D, spec.N, exact_cap)
    seqs = all_sequences(spec.N, D)
    return np.flatnonzero(spec.mask(sequence_counts(seqs, D), spec.lengths(q)))


def subspace_qubits(count):
    return max(int(count) - 1, 0).bit_length()


def projector_isometry(kept, D, N):
    """Isometry from the kept subspace onto ``ceil(log2(len(kept)))`` qubits."""
    v = np.zeros((2 ** subspace_qubits(len(kept)), D**N), dtype=np.complex128)
    v[np.arange(len(kept)), kept] = 1.0
    return v


@dataclass(frozen=True, eq=False)
class CompressionResult:
    gamma: np.ndarray
    isometry: np.ndarray
    unitary: np.ndarray
    kept: np.ndarray
    spec: LengthConditionSpec
    projected_mass: float

    @property
    def n_qubits(self):
        return subspace_qubits(self.kept.size)

    def decompress(self, gamma=None):
        """Map a compressed state back onto the original N-copy space."""
        g = self.gamma if gamma is None else np.asarray(gamma)
        v = self.isometry
        u_n = kron_power(self.unitary, self.spec.N)
        return u_n.conj().T @ (v.conj().T @ g @ v) @ u_n


def compress_exact(rho0, sigma0, N, eps, mode="real", exact_cap=None):
    """Run the protocol on the full N-copy density matrix.

    Returns the compressed state together with the isometry onto the kept
    subspace and the single-copy basis change, so that
    :meth:`CompressionResult.decompress` reconstructs the state on the
    original space. ``projected_mass`` is read off the diagonal of the
    rotated N-copy matrix.
    """
    st = prepare(rho0, sigma0)
    spec = length_condition(st.rho0, st.sigma0, N, eps, mode)
    D = st.rho0.D
    kept = kept_sequences(spec, st.q, D, exact_cap)
    if kept.size == 0:
        raise EmptyProjector(f"no product state satisfies the length window at N={N}, eps={eps}")
    rho = st.unitary @ st.rho0.rho @ st.unitary.conj().T
    rho_n = kron_power(rho, N)
    mass = float(np.sum(np.diagonal(rho_n)[kept].real))
    if mass <= 0.0:
        raise EmptyProjector("the kept subspace carries no weight of the true state")
    v = projector_isometry(kept, D, N)
    gamma = v @ rho_n @ v.conj().T / mass
    gamma = 0.5 * (gamma + gamma.conj().T)
    return CompressionResult(gamma, v, st.unitary, kept, spec, mass)


def compression_fidelity(result, rho0):
    """Uhlmann fidelity between ``rho0^{(x)N}`` and the decompressed state."""
    rho0 = as_source(rho0, "rho0")
    return fidelity(kron_power(rho0.rho, result.spec.N), result.decompress())


def log2_ceil(D):
    return (int(D) - 1).bit_length()


@dataclass(frozen=True)
class ProtocolReport:
    S_rho: float
    S_sigma: float
    S_cross: float
    log_D_ceil: int
    N: int
    eps: float
    mode: str
    center: float
    pi_mass: MassEstimate
    qubits_used: int
    qubits_naive: int
    fallback_recommended: bool
    fidelity: float = None
    subspace_qubits: int = None
    status: str = "ok"
    extra: dict = field(default_factory=dict)

    CSV_FIELDS = (
        "N", "eps", "mode", "status", "engine", "S_rho", "S_sigma", "S_cross",
        "log_D_ceil", "center", "pi_mass", "std_error", "trials", "seed",
        "fidelity", "subspace_qubits", "qubits_used", "qubits_naive",
        "fallback_recommended",
    )

    def flat(self):
        d = {k: v for k, v in asdict(self).items() if k not in ("pi_mass", "extra")}
        d.update(
            engine=self.pi_mass.engine,
            pi_mass=self.pi_mass.estimate,
            std_error=self.pi_mass.std_error,
            trials=self.pi_mass.trials,
            seed=self.pi_mass.seed,
        )
        d.update(self.extra)
        return d

    def csv_row(self):
        flat = self.flat()
        return [format_value(flat[k]) for k in self.CSV_FIELDS]

    def to_json(self):
        flat = {k: format_value(v) if isinstance(v, float) and math.isinf(v) else v
                for k, v in self.flat().items()}
        return json.dumps(flat, sort_keys=True)


def protocol_report(rho0, sigma0, N, eps, mode="real", trials=100_000, seed=0,
                    exact_cap=None, n_jobs=1, fidelity_max_dim=FIDELITY_MAX_DIM,
                    on_empty="raise"):
    """Rates, projected mass and (small N) fidelity for one protocol run.

    The projected mass is exact when ``D**N`` is within the exact cap and
    estimated by Monte Carlo otherwise. Fidelity is computed only when the
    exact mass is used and ``D**N <= fidelity_max_dim``. With
    ``on_empty="status"`` an empty projector yields a report whose status
    is ``"empty_projector"`` instead of raising.
    """
    check_mode(mode)
    if on_empty not in ("raise", "status"):
        raise InputError(f"on_empty must be 'raise' or 'status', got {on_empty!r}")
    st = prepare(rho0, sigma0)
    if math.isinf(st.S_cross):
        raise SupportMismatch("rho0 has weight outside the support of sigma0; S(rho0, sigma0) = inf")
    spec = length_condition(st.rho0, st.sigma0, N, eps, mode)
    D = st.rho0.D
    exact = D**N <= get_exact_cap(exact_cap)
    if exact:
        mass = pi_mass_exact(spec, st.r, st.q, exact_cap)
    else:
        mass = pi_mass_mc(spec, st.r, st.q, trials, seed, n_jobs)

    fid, n_sub, status = None, None, "ok"
    if exact and D**N <= fidelity_max_dim:
        try:
            res = compress_exact(st.rho0, st.sigma0, N, eps, mode, exact_cap)
        except EmptyProjector:
            if on_empty == "raise":
                raise
            status = "empty_projector"
        else:
            fid = compression_fidelity(res, st.rho0)
            n_sub = res.n_qubits
    elif exact and mass.estimate == 0.0:
        if on_empty == "raise":
            raise EmptyProjector(f"no product state satisfies the length window at N={N}, eps={eps}")
        status = "empty_projector"

    ldc = log2_ceil(D)
    rate = spec.center + spec.eps
    return ProtocolReport(
        S_rho=von_neumann_entropy(st.rho0),
        S_sigma=von_neumann_entropy(st.sigma0),
        S_cross=st.S_cross,
        log_D_ceil=ldc,
        N=int(N),
        eps=float(eps),
        mode=mode,
        center=spec.center,
        pi_mass=mass,
        qubits_used=math.ceil(N * rate - 1e-9),
        qubits_naive=int(N) * ldc,
        fallback_recommended=bool(rate >= ldc),
        fidelity=fid,
        subspace_qubits=n_sub,
        status=status,
    )
