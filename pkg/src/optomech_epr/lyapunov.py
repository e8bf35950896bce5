"""Dense solvers for the (shifted) Lyapunov equation ``A X + X A^T + mu X + Q = 0``.

The transpose is the plain transpose: the unknown is a non-symmetrized
moment matrix ``<z z^T>``, not a Hermitian covariance.
"""

from __future__ import annotations

import numpy as np
import scipy.linalg

from .exceptions import ResonantOperatorError

#: relative threshold on min |lambda_i + lambda_j + mu|
SINGULAR_RTOL = 1e-12
#: largest dimension handled by the Kronecker route
MAX_KRON_DIM = 64
METHODS = ("schur", "kron")


def lyapunov_gap(A, mu=0.0) -> float:
    """``min |lambda_i + lambda_j + mu|`` over eigenvalue pairs of ``A``."""
    ev = np.linalg.eigvals(np.asarray(A, dtype=complex))
    return float(np.min(np.abs(ev[:, None] + ev[None, :] + mu)))


class LyapunovOperator:
    """Factorized operator ``X -> A X + X A^T + mu X``.

    Factorizing once lets several right-hand sides share the work.

    Parameters
    ----------
    A : (d, d) array_like
    mu : complex
        Scalar shift.
    method : {"schur", "kron"}
        ``"schur"`` reduces ``A`` to complex Schur form and back-substitutes
        with LAPACK ``trsyl`` (Bartels-Stewart); ``"kron"`` LU-factors the
        ``d^2 x d^2`` vectorized operator and is limited to ``MAX_KRON_DIM``.
    """

    def __init__(self, A, mu=0.0, method="schur"):
        A = np.asarray(A, dtype=complex)
        d = A.shape[0]
        if A.shape != (d, d):
            raise ValueError(f"A must be square, got {A.shape}")
        if method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}, got {method!r}")
        if method == "kron" and d > MAX_KRON_DIM:
            raise ValueError(f"dimension {d} exceeds the dense Kronecker limit {MAX_KRON_DIM}")
        self.A, self.mu, self.d, self.method = A, complex(mu), d, method
        scale = max(np.linalg.norm(A, 2), 1.0)
        gap = lyapunov_gap(A, mu)
        if gap < SINGULAR_RTOL * scale:
            raise ResonantOperatorError(
                f"resonant Lyapunov operator: min|l_i + l_j + mu| = {gap:.3e} (mu={mu})")
        if method == "kron":
            eye = np.eye(d)
            # row-major vec: vec(A X) = (A kron I) x, vec(X A^T) = (I kron A) x
            K = np.kron(A, eye) + np.kron(eye, A) + self.mu * np.eye(d * d)
            self._lu = scipy.linalg.lu_factor(K, check_finite=False)
        else:
            T, U = scipy.linalg.schur(A, output="complex")
            # split the shift evenly so both triangular factors carry mu / 2
            self._T = T + 0.5 * self.mu * np.eye(d)
            self._U = U

    def apply(self, X):
        return self.A @ X + X @ self.A.T + self.mu * X

    def solve(self, Q):
        """Return ``X`` with ``A X + X A^T + mu X = -Q``."""
        Q = np.asarray(Q, dtype=complex)
        if self.method == "kron":
            x = scipy.linalg.lu_solve(self._lu, -Q.reshape(-1), check_finite=False)
            return x.reshape(self.d, self.d)
        # A = U T U^H and A^T = conj(U) T^T U^T, so X = U Y U^T with
        # T Y + Y T^T = -U^H Q conj(U); trsyl takes T^T as conj(T)^H
        U = self._U
        C = -(U.conj().T @ Q @ U.conj())
        Y, scale, info = scipy.linalg.lapack.ztrsyl(self._T, self._T.conj(), C,
                                                     trana="N", tranb="C")
        if info < 0:
            raise ValueError(f"trsyl argument {-info} invalid")
        return U @ (Y / scale) @ U.T


def solve_lyapunov(A, Q, mu=0.0, method="schur"):
    """Solve ``A X + X A^T + mu X + Q = 0``."""
    return LyapunovOperator(A, mu, method).solve(Q)


def lyapunov_residual(A, X, Q, mu=0.0) -> float:
    """Relative residual ``||A X + X A^T + mu X + Q|| / ||Q||`` (Frobenius)."""
    A, X, Q = (np.asarray(m, dtype=complex) for m in (A, X, Q))
    R = A @ X + X @ A.T + mu * X + Q
    return float(np.linalg.norm(R) / max(np.linalg.norm(Q), np.finfo(float).tiny))


def propagate_expm(A, t=1.0):
    """Matrix exponential ``exp(A t)`` (scaling and squaring with Pade)."""
    if t < 0:
        raise ValueError("t must be >= 0")
    return scipy.linalg.expm(np.asarray(A) * t)
