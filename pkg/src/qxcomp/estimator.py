"""scikit-learn style front end for the mismatched-source compressor."""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .exceptions import EmptyProjector, InputError
from .linalg import fidelity, kron_power
from .protocol import (
    LengthConditionSpec,
    as_source,
    basis_unitary,
    kept_sequences,
    length_condition,
    projector_isometry,
    subspace_qubits,
    von_neumann_entropy,
)


class MismatchedSourceCompressor(TransformerMixin, BaseEstimator):
    """Compress ``N`` copies of a quantum source with a code built for a believed state.

    Parameters
    ----------
    n_copies : int, default=3
        Number of source copies compressed together.
    eps : float, default=0.1
        Half-width of the per-copy length window.
    mode : {"real", "integer"}, default="real"
        Real Shannon lengths ``log2(1/q)`` or their integer ceilings.
    center : float or None, default=None
        Centre of the length window. ``None`` uses ``S(rho0, sigma0)`` when
        the true state is passed to :meth:`fit` and ``S(sigma0)`` otherwise.
    exact_cap : int or None, default=None
        Largest ``D**n_copies`` for which the kept subspace is enumerated.

    Attributes
    ----------
    believed_eigenvalues_ : ndarray of shape (D,)
    unitary_ : ndarray of shape (D, D)
        Basis change taking the believed eigenbasis to the computational one.
    length_spec_ : LengthConditionSpec
    kept_ : ndarray
        Lexicographic indices of the product basis states kept by the projector.
    isometry_ : ndarray of shape (2**n_qubits_, D**n_copies)
    n_qubits_ : int
    """

    def __init__(self, n_copies=3, eps=0.1, mode="real", center=None, exact_cap=None):
        self.n_copies = n_copies
        self.eps = eps
        self.mode = mode
        self.center = center
        self.exact_cap = exact_cap

    def fit(self, X, y=None):
        """Build the code from the believed state ``X``.

        ``y``, if given, is the true single-copy state; it is only used to
        centre the length window at the cross entropy.
        """
        sigma0 = as_source(X, "sigma0")
        if y is not None:
            spec = length_condition(as_source(y, "rho0"), sigma0, self.n_copies, self.eps, self.mode)
            center = spec.center
        else:
            center = von_neumann_entropy(sigma0) if self.mode == "real" else None
        if self.center is not None:
            center = float(self.center)
        if center is None:
            raise InputError("integer mode without a true state needs an explicit center")
        s = sigma0.spectrum
        self.believed_eigenvalues_ = s.eigenvalues
        self.unitary_ = basis_unitary(s)
        self.length_spec_ = LengthConditionSpec(int(self.n_copies), center, float(self.eps), self.mode)
        self.kept_ = kept_sequences(self.length_spec_, s.eigenvalues, sigma0.D, self.exact_cap)
        if self.kept_.size == 0:
            raise EmptyProjector(
                f"no product state satisfies the length window at N={self.n_copies}, eps={self.eps}"
            )
        self.n_qubits_ = subspace_qubits(self.kept_.size)
        self.isometry_ = projector_isometry(self.kept_, sigma0.D, self.n_copies)
        self.n_features_in_ = sigma0.D
        return self

    def _rotated_copies(self, X):
        rho0 = as_source(X, "rho0")
        if rho0.D != self.n_features_in_:
            raise InputError(f"expected a {self.n_features_in_}-dimensional state, got {rho0.D}")
        rho = self.unitary_ @ rho0.rho @ self.unitary_.conj().T
        return kron_power(rho, self.n_copies)

    def projected_mass(self, X):
        """``tr(Pi rho^{(x)N})`` for the true single-copy state ``X``."""
        check_is_fitted(self)
        rho_n = self._rotated_copies(X)
        return float(np.sum(np.diagonal(rho_n)[self.kept_].real))

    def transform(self, X):
        """Compressed state on ``n_qubits_`` qubits for ``n_copies`` copies of ``X``."""
        check_is_fitted(self)
        rho_n = self._rotated_copies(X)
        v = self.isometry_
        mass = float(np.sum(np.diagonal(rho_n)[self.kept_].real))
        if mass <= 0.0:
            raise EmptyProjector("the kept subspace carries no weight of this state")
        gamma = v @ rho_n @ v.conj().T / mass
        return 0.5 * (gamma + gamma.conj().T)

    def inverse_transform(self, X):
        check_is_fitted(self)
        v = self.isometry_
        u_n = kron_power(self.unitary_, self.n_copies)
        return u_n.conj().T @ (v.conj().T @ np.asarray(X) @ v) @ u_n

    def score(self, X, y=None):
        """Fidelity between ``X^{(x)N}`` and its compressed-then-decompressed copy."""
        rho0 = as_source(X, "rho0")
        restored = self.inverse_transform(self.transform(rho0))
        return fidelity(kron_power(rho0.rho, self.n_copies), restored)
