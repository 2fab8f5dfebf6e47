"""Finite-dimensional operator arithmetic on dense complex matrices.

Matrices are plain square numpy arrays of complex dtype.  All norms are
operator norms (largest singular value) and all spectral operations go
through Hermitian eigendecomposition, so anything fed to the functional
calculus must be Hermitian up to the active tolerance.

Tolerances are relative: a ``TolerancePolicy`` carries an equality
tolerance and a positivity tolerance, and every comparison is scaled by
``max(1, largest operator norm among the inputs)``.  That keeps verdicts
meaningful both for tiny and for badly scaled matrices.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.linalg


class MatrixError(ValueError):
    """Base class for matrix validation failures."""


class NotHermitianError(MatrixError):
    """Raised when a spectral operation receives a non-Hermitian matrix."""


class NegativeSpectrumError(MatrixError):
    """Raised when a fractional power meets genuinely negative eigenvalues."""


@dataclass(frozen=True)
class TolerancePolicy:
    """Relative tolerances used by every approximate comparison.

    ``tol_eq`` bounds equality defects (norm distances), ``tol_psd`` bounds
    how far below zero an eigenvalue may dip while still counting as
    nonnegative.  Both must lie in (0, 1e-2].
    """

    tol_eq: float = 1e-9
    tol_psd: float = 1e-9

    def __post_init__(self) -> None:
        for name in ("tol_eq", "tol_psd"):
            value = getattr(self, name)
            if not (0.0 < value <= 1e-2):
                raise ValueError(f"{name} must lie in (0, 1e-2], got {value!r}")

    def scale(self, *mats: np.ndarray) -> float:
        """Scale factor for relative comparisons: max(1, largest op norm)."""
        largest = 1.0
        for m in mats:
            largest = max(largest, op_norm(m))
        return largest


DEFAULT_POLICY = TolerancePolicy()


def as_matrix(a) -> np.ndarray:
    """Validate and convert to a square complex matrix.

    Accepts anything ``np.asarray`` does.  Rejects non-square shapes and
    non-finite entries.  The result may share memory with the input.
    """
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise MatrixError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise MatrixError("matrix has non-finite entries")
    return m


def op_norm(a) -> float:
    """Operator norm: the largest singular value."""
    m = as_matrix(a)
    if m.shape[0] == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def adjoint(a) -> np.ndarray:
    return np.conj(np.asarray(a)).T


def real_part(a) -> np.ndarray:
    """Hermitian part (a + a*) / 2."""
    m = as_matrix(a)
    return (m + adjoint(m)) / 2


def _require_hermitian(m: np.ndarray, policy: TolerancePolicy) -> np.ndarray:
    defect = op_norm(m - adjoint(m))
    if defect > policy.tol_eq * policy.scale(m):
        raise NotHermitianError(
            f"matrix is not Hermitian: ||a - a*|| = {defect:.3e}")
    # Symmetrize so eigh sees an exactly Hermitian matrix.
    return (m + adjoint(m)) / 2


def hermitian_calculus(f, a, policy: TolerancePolicy | None = None) -> np.ndarray:
    """Apply a scalar function to a Hermitian matrix through its spectrum.

    ``f`` maps a real eigenvalue array to a real or complex array of the
    same shape.  The input must be Hermitian within ``tol_eq``; it is
    symmetrized before the eigendecomposition.
    """
    policy = policy or DEFAULT_POLICY
    h = _require_hermitian(as_matrix(a), policy)
    w, v = np.linalg.eigh(h)
    fw = np.asarray(f(w))
    return (v * fw) @ adjoint(v)


def matrix_exp(a) -> np.ndarray:
    """Matrix exponential of an arbitrary square matrix."""
    return scipy.linalg.expm(as_matrix(a))


def eigenvalues(a, policy: TolerancePolicy | None = None) -> np.ndarray:
    """Sorted real eigenvalues of a Hermitian matrix."""
    policy = policy or DEFAULT_POLICY
    h = _require_hermitian(as_matrix(a), policy)
    return np.linalg.eigvalsh(h)


def min_eigenvalue(a, policy: TolerancePolicy | None = None) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    return float(eigenvalues(a, policy)[0])


def max_eigenvalue(a, policy: TolerancePolicy | None = None) -> float:
    """Largest eigenvalue of a Hermitian matrix."""
    return float(eigenvalues(a, policy)[-1])


def fractional_power(a, exponent, policy: TolerancePolicy | None = None) -> np.ndarray:
    """Matrix power with a rational or real exponent.

    Integer exponents use repeated multiplication and work for any square
    matrix.  Non-integer exponents require a Hermitian matrix whose
    spectrum is nonnegative within ``tol_psd``; eigenvalues in the
    tolerance band below zero are clamped to zero before the power is
    taken.  Exponent 0 gives the identity.
    """
    policy = policy or DEFAULT_POLICY
    m = as_matrix(a)
    t = Fraction(exponent).limit_denominator(10**12) if not isinstance(
        exponent, Fraction) else exponent
    if t.denominator == 1:
        n = int(t)
        if n < 0:
            raise ValueError("negative powers are not supported")
        return np.linalg.matrix_power(m, n)
    h = _require_hermitian(m, policy)
    w, v = np.linalg.eigh(h)
    floor = -policy.tol_psd * policy.scale(h)
    if w[0] < floor:
        raise NegativeSpectrumError(
            f"fractional power of a matrix with eigenvalue {w[0]:.3e} "
            f"below the positivity tolerance {floor:.3e}")
    w = np.clip(w, 0.0, None)
    return (v * w ** float(t)) @ adjoint(v)


def direct_sum(mats) -> np.ndarray:
    """Block-diagonal direct sum of a nonempty sequence of matrices."""
    blocks = [as_matrix(m) for m in mats]
    if not blocks:
        raise ValueError("direct_sum needs at least one matrix")
    return scipy.linalg.block_diag(*blocks).astype(complex)


def compress(a, rank: int) -> np.ndarray:
    """Two-sided compression p a p by the rank-``rank`` coordinate projection.

    The output keeps the ambient dimension; rows and columns past ``rank``
    are zeroed.  ``rank`` may run from 0 (zero matrix) to dim (identity
    compression).
    """
    m = as_matrix(a)
    d = m.shape[0]
    if not 0 <= rank <= d:
        raise ValueError(f"rank {rank} out of range for dimension {d}")
    out = np.zeros_like(m)
    out[:rank, :rank] = m[:rank, :rank]
    return out


def block2(x, y, z) -> np.ndarray:
    """Assemble the 2x2 operator block [[y, x*], [x, z]].

    All three inputs must share one dimension d; the result is 2d x 2d.
    The block is Hermitian exactly when y and z are.
    """
    xm, ym, zm = as_matrix(x), as_matrix(y), as_matrix(z)
    if not (xm.shape == ym.shape == zm.shape):
        raise MatrixError(
            f"block2 needs equal shapes, got {xm.shape}, {ym.shape}, {zm.shape}")
    return np.block([[ym, adjoint(xm)], [xm, zm]])
