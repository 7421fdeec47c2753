"""Input validation helpers.

These mirror the ``check_*`` helpers of scikit-learn: each takes a raw
array-like, validates it and returns a normalised ``numpy`` array.
"""

import os

import numpy as np

from .exceptions import (
    DimensionMismatch,
    ExactCapExceeded,
    InputError,
    InvalidDistribution,
    NotDensityMatrix,
    NotHermitian,
)

HERMITIAN_TOL = 1e-10
PSD_SLACK = 1e-10
TRACE_TOL = 1e-9
DISTRIBUTION_TOL = 1e-12

DEFAULT_EXACT_CAP = 2**22
EXACT_CAP_ENV = "QXCOMP_EXACT_CAP"


def get_exact_cap(cap=None):
    """Resolve the exact-enumeration cap.

    An explicit ``cap`` wins, then the ``QXCOMP_EXACT_CAP`` environment
    variable, then the built-in default of ``2**22``.
    """
    if cap is None:
        env = os.environ.get(EXACT_CAP_ENV)
        cap = int(env) if env else DEFAULT_EXACT_CAP
    cap = int(cap)
    if cap < 1:
        raise InputError(f"exact cap must be positive, got {cap}")
    return cap


def check_exact_size(D, N, cap=None):
    """Raise ExactCapExceeded unless ``D**N`` is within the exact cap."""
    cap = get_exact_cap(cap)
    if D**N > cap:
        raise ExactCapExceeded(f"D^N = {D}^{N} exceeds the exact cap {cap}")
    return cap


def check_matrix(a, square=True, name="matrix"):
    """Return ``a`` as a finite complex128 2-D array."""
    arr = np.asarray(a, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InputError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if square and arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"{name} must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{name} has non-finite entries")
    return arr


def check_hermitian(a, tol=HERMITIAN_TOL, name="matrix"):
    arr = check_matrix(a, name=name)
    asym = np.max(np.abs(arr - arr.conj().T))
    if asym > tol:
        raise NotHermitian(f"{name} is not Hermitian: max |m - m^H| = {asym:.3e} > {tol:g}")
    return arr


def check_density_matrix(rho, name="rho"):
    """Validate a density matrix and return it as a Hermitian complex array.

    Hermiticity is checked within 1e-10, eigenvalues must be >= -1e-10 and
    the trace must equal 1 within 1e-9. The returned array is symmetrised,
    but eigenvalue clamping is left to the spectral routines.
    """
    try:
        arr = check_hermitian(rho, name=name)
    except NotHermitian as exc:
        raise NotDensityMatrix(str(exc)) from exc
    except InputError as exc:
        raise NotDensityMatrix(str(exc)) from exc
    arr = 0.5 * (arr + arr.conj().T)
    tr = np.trace(arr)
    if abs(tr - 1.0) > TRACE_TOL:
        raise NotDensityMatrix(f"{name} has trace {tr.real:.12g}, expected 1")
    lam_min = np.linalg.eigvalsh(arr)[0]
    if lam_min < -PSD_SLACK:
        raise NotDensityMatrix(
            f"{name} is not positive semidefinite: smallest eigenvalue {lam_min:.3e}"
        )
    return arr


def check_distribution(p, tol=DISTRIBUTION_TOL, name="p"):
    """Return ``p`` as a float array after checking it is a probability vector."""
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1 or arr.size < 1:
        raise InvalidDistribution(f"{name} must be a non-empty 1-D array")
    if not np.all(np.isfinite(arr)):
        raise InvalidDistribution(f"{name} has non-finite entries")
    if np.any(arr < 0):
        raise InvalidDistribution(f"{name} has negative entries")
    if abs(arr.sum() - 1.0) > tol:
        raise InvalidDistribution(f"{name} sums to {arr.sum():.15g}, expected 1")
    return arr


def check_sequence(seq, D):
    arr = np.asarray(seq, dtype=np.int64)
    if arr.ndim != 1:
        raise InputError("sequence must be 1-D")
    if arr.size and (arr.min() < 0 or arr.max() >= D):
        raise InputError(f"sequence letters must lie in [0, {D})")
    return arr


def check_same_dim(a, b, what="operands"):
    if a.shape != b.shape:
        raise DimensionMismatch(f"{what} have shapes {a.shape} and {b.shape}")
