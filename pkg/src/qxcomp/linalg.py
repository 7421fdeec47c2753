"""Dense complex linear algebra: Hermitian eigensolver, matrix functions,
Kronecker products and Uhlmann fidelity.

Matrices are plain ``numpy`` complex arrays. The eigensolver is a cyclic
Jacobi iteration working directly on the complex Hermitian matrix; for
multi-copy operators larger than ``JACOBI_MAX_DIM`` the LAPACK driver is
used instead, with identical post-processing.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from .exceptions import (
    DimensionMismatch,
    DomainError,
    InputError,
    NoConvergence,
    NumericalError,
    SizeOverflow,
)
from .validation import HERMITIAN_TOL, check_density_matrix, check_hermitian, check_matrix

MAX_SWEEPS = 100
OFF_TOL = 1e-12
SUPPORT_TOL = 1e-12
JACOBI_MAX_DIM = 64
KRON_MAX_ENTRIES = 2**20
FIDELITY_TOL = 1e-6


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigenvalues (ascending) and eigenvectors (as columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self):
        return self.eigenvalues.shape[0]

    def reconstruct(self):
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _off_norm(a):
    return float(np.linalg.norm(a - np.diag(np.diag(a))))


def _jacobi(a, max_sweeps=MAX_SWEEPS):
    a = a.copy()
    n = a.shape[0]
    v = np.eye(n, dtype=np.complex128)
    tol = OFF_TOL * max(1.0, np.linalg.norm(a))
    for _ in range(max_sweeps):
        if _off_norm(a) < tol:
            return a.diagonal().real.copy(), v
        for p in range(n - 1):
            for q in range(p + 1, n):
                g = a[p, q]
                mag = abs(g)
                if mag < 1e-300:
                    continue
                phase = g / mag
                app, aqq = a[p, p].real, a[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # W = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                w = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                a[:, idx] = a[:, idx] @ w
                a[idx, :] = w.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ w
    if _off_norm(a) < tol:
        return a.diagonal().real.copy(), v
    raise NoConvergence(f"Jacobi iteration did not converge in {max_sweeps} sweeps")


def _canonicalize(lam, vecs):
    # first component with |.| > 1e-12 made positive real; sort by (value, that index)
    lead = np.argmax(np.abs(vecs) > SUPPORT_TOL, axis=0)
    ph = vecs[lead, np.arange(vecs.shape[1])]
    vecs = vecs * (np.abs(ph) / ph)
    order = np.lexsort((lead, lam))
    return lam[order], vecs[:, order]


def eig_hermitian(m, method="auto", max_sweeps=MAX_SWEEPS):
    """Eigendecomposition of a Hermitian matrix.

    Parameters
    ----------
    m : array_like
        Square matrix, Hermitian within 1e-10.
    method : {"auto", "jacobi", "lapack"}
        ``"auto"`` uses Jacobi up to dimension 64 and LAPACK above.
    max_sweeps : int
        Sweep budget for the Jacobi iteration.

    Returns
    -------
    SpectralDecomposition
        Eigenvalues ascending; each eigenvector's first non-negligible
        component is real and positive.
    """
    a = check_hermitian(m)
    a = 0.5 * (a + a.conj().T)
    if method == "auto":
        method = "jacobi" if a.shape[0] <= JACOBI_MAX_DIM else "lapack"
    if method == "jacobi":
        lam, vecs = _jacobi(a, max_sweeps)
    elif method == "lapack":
        lam, vecs = np.linalg.eigh(a)
    else:
        raise InputError(f"unknown eigensolver method {method!r}")
    lam, vecs = _canonicalize(lam, vecs)
    lam.flags.writeable = False
    vecs.flags.writeable = False
    return SpectralDecomposition(lam, vecs)


def matrix_fn(s, f, support_only=False):
    """Apply a scalar function through a spectral decomposition.

    Returns ``sum_i f(lam_i) |v_i><v_i|``. With ``support_only`` set,
    eigenvalues with ``|lam| < 1e-12`` are dropped instead of evaluated.
    """
    lam = s.eigenvalues
    keep = np.abs(lam) >= SUPPORT_TOL if support_only else np.ones(lam.shape, bool)
    vals = np.zeros(lam.shape, dtype=np.complex128)
    with np.errstate(all="ignore"):
        for i in np.flatnonzero(keep):
            try:
                vals[i] = f(lam[i])
            except (ValueError, ZeroDivisionError) as exc:
                raise DomainError(f"function undefined at eigenvalue {lam[i]:.3e}") from exc
    if not np.all(np.isfinite(vals)):
        bad = lam[~np.isfinite(vals)][0]
        raise DomainError(f"function undefined at eigenvalue {bad:.3e}")
    v = s.eigenvectors[:, keep]
    return (v * vals[keep]) @ v.conj().T


def kron(a, b, max_entries=KRON_MAX_ENTRIES):
    a = check_matrix(a, square=False, name="a")
    b = check_matrix(b, square=False, name="b")
    rows, cols = a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]
    if rows * cols > max_entries:
        raise SizeOverflow(f"Kronecker product of size {rows}x{cols} exceeds {max_entries} entries")
    return np.kron(a, b)


def kron_power(a, n, max_entries=KRON_MAX_ENTRIES):
    """``a`` tensored with itself ``n`` times (``n >= 1``)."""
    if n < 1:
        raise InputError("tensor power needs n >= 1")
    out = check_matrix(a, square=False)
    for _ in range(n - 1):
        out = kron(out, a, max_entries)
    return out


def dagger(a):
    return check_matrix(a, square=False).conj().T


def mat_mul(a, b):
    a = check_matrix(a, square=False, name="a")
    b = check_matrix(b, square=False, name="b")
    if a.shape[1] != b.shape[0]:
        raise DimensionMismatch(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def add(a, b):
    a = check_matrix(a, square=False, name="a")
    b = check_matrix(b, square=False, name="b")
    if a.shape != b.shape:
        raise DimensionMismatch(f"cannot add {a.shape} and {b.shape}")
    return a + b


def scale(a, c):
    return complex(c) * check_matrix(a, square=False)


def trace(a):
    return complex(np.trace(check_matrix(a)))


def real_trace(a, tol=HERMITIAN_TOL):
    """Trace of ``a`` as a float; raises if the imaginary part exceeds ``tol``."""
    t = trace(a)
    if abs(t.imag) > tol:
        raise DomainError(f"trace has imaginary part {t.imag:.3e}")
    return t.real


def _psd_sqrt_matrix(m):
    # eigenvalues at the round-off floor are zeroed: their square roots would be ~1e-8 noise
    s = eig_hermitian(m)
    lam = s.eigenvalues.copy()
    lam[lam <= m.shape[0] * np.finfo(float).eps * max(lam[-1], 0.0)] = 0.0
    return (s.eigenvectors * np.sqrt(lam)) @ s.eigenvectors.conj().T


def fidelity(rho, gamma):
    """Uhlmann fidelity ``(tr sqrt(sqrt(rho) gamma sqrt(rho)))**2``."""
    rho = check_density_matrix(rho, name="rho")
    gamma = check_density_matrix(gamma, name="gamma")
    if rho.shape != gamma.shape:
        raise DimensionMismatch(f"states have shapes {rho.shape} and {gamma.shape}")
    # nuclear norm of sqrt(rho) sqrt(gamma): avoids squaring tiny eigenvalues
    sqrt_rho, sqrt_gamma = _psd_sqrt_matrix(rho), _psd_sqrt_matrix(gamma)
    f = float(np.sum(np.linalg.svd(sqrt_rho @ sqrt_gamma, compute_uv=False)) ** 2)
    if f < -FIDELITY_TOL or f > 1.0 + FIDELITY_TOL:
        raise NumericalError(f"fidelity {f:.12g} outside [0, 1]")
    return min(max(f, 0.0), 1.0)


def to_json_dict(m):
    m = check_matrix(m, square=False)
    return {"dim": int(m.shape[0]), "re": m.real.tolist(), "im": m.imag.tolist()}


def from_json_dict(obj):
    """Parse ``{"dim": n, "re": [[...]], "im": [[...]]}``; ``im`` may be omitted."""
    try:
        re = np.asarray(obj["re"], dtype=float)
        im = np.asarray(obj.get("im", np.zeros_like(re)), dtype=float)
        dim = int(obj.get("dim", re.shape[0]))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed matrix literal: {exc}") from exc
    if re.shape != im.shape or re.ndim != 2:
        raise InputError("matrix literal 're' and 'im' must be equal-shape 2-D arrays")
    if re.shape[0] != dim:
        raise InputError(f"matrix literal declares dim {dim} but has {re.shape[0]} rows")
    return check_matrix(re + 1j * im, square=False)


def load_matrix(path):
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}: invalid JSON ({exc})") from exc
    return from_json_dict(obj)


def save_matrix(m, path):
    with open(path, "w") as fh:
        json.dump(to_json_dict(m), fh)
        fh.write("\n")
