"""Numerical kernel: Gauss quadrature rules, Legendre and spherical Bessel
evaluation, and dense symmetric (generalized) eigensolvers.

Everything here is a pure function of its inputs; results are plain
immutable-by-convention dataclasses, safe to use from parallel workers.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import roots_jacobi, spherical_jn

from .errors import ConditioningError, DataError, ParameterError, UnsupportedError

SPHERICAL_BESSEL_MAX_ORDER = 50


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights of a Gauss rule on the open interval ``domain``.

    An n-point rule integrates polynomials of degree <= 2n-1 exactly
    against its weight function.
    """

    nodes: np.ndarray
    weights: np.ndarray
    domain: tuple[float, float] = (-1.0, 1.0)
    weight_kind: str = "legendre"  # "legendre" or "jacobi(alpha,beta)"

    @property
    def n(self) -> int:
        return len(self.nodes)

    def integrate(self, values: np.ndarray) -> float:
        """Weighted sum of function values sampled at the nodes."""
        return float(np.dot(self.weights, values))


def gauss_rule(kind: str, n: int, alpha: float = 0.0, beta: float = 0.0) -> QuadratureRule:
    """Gauss-Legendre or Gauss-Jacobi rule with ``n`` points on (-1, 1).

    ``kind`` is "legendre" or "jacobi"; the Jacobi weight is
    (1-x)^alpha (1+x)^beta and requires alpha, beta > -1.
    """
    if n < 1:
        raise ParameterError(f"quadrature rule needs n >= 1 points, got {n}")
    if kind == "legendre":
        x, w = leggauss(n)
        label = "legendre"
    elif kind == "jacobi":
        if alpha <= -1.0 or beta <= -1.0:
            raise ParameterError(
                f"jacobi weight needs alpha, beta > -1, got ({alpha}, {beta})"
            )
        x, w = roots_jacobi(n, alpha, beta)
        label = f"jacobi({alpha},{beta})"
    else:
        raise ParameterError(f"unknown quadrature kind {kind!r}")
    return QuadratureRule(np.asarray(x, float), np.asarray(w, float), (-1.0, 1.0), label)


def shifted_rule(rule: QuadratureRule, a: float, b: float) -> QuadratureRule:
    """Affine image of a rule on (-1, 1) onto the interval (a, b)."""
    if not b > a:
        raise ParameterError(f"need b > a, got ({a}, {b})")
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    return QuadratureRule(mid + half * rule.nodes, half * rule.weights, (a, b), rule.weight_kind)


def legendre_eval(n: int, x):
    """Value and derivative of the Legendre polynomial P_n at x.

    Three-term recurrence for the values together with the derivative
    recurrence P'_{k+1} = P'_{k-1} + (2k+1) P_k, which stays finite at
    the endpoints (P'_n(1) = n(n+1)/2).
    """
    if n < 0:
        raise ParameterError(f"degree must be >= 0, got {n}")
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    d_prev = np.zeros_like(x)
    if n == 0:
        return p_prev, d_prev
    p_cur = x.copy()
    d_cur = np.ones_like(x)
    for k in range(1, n):
        p_next = ((2 * k + 1) * x * p_cur - k * p_prev) / (k + 1)
        d_next = d_prev + (2 * k + 1) * p_cur
        p_prev, p_cur = p_cur, p_next
        d_prev, d_cur = d_cur, d_next
    return p_cur, d_cur


def legendre_table(n_max: int, x: np.ndarray, orthonormal: bool = False):
    """Values and derivatives of P_0..P_{n_max} at the points x.

    Returns two arrays of shape (n_max+1, len(x)).  With
    ``orthonormal=True`` rows are scaled by sqrt(n + 1/2) so that the
    polynomials are orthonormal on (-1, 1).
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    vals = np.empty((n_max + 1, x.size))
    ders = np.empty((n_max + 1, x.size))
    vals[0] = 1.0
    ders[0] = 0.0
    if n_max >= 1:
        vals[1] = x
        ders[1] = 1.0
    for k in range(1, n_max):
        vals[k + 1] = ((2 * k + 1) * x * vals[k] - k * vals[k - 1]) / (k + 1)
        ders[k + 1] = ders[k - 1] + (2 * k + 1) * vals[k]
    if orthonormal:
        scale = np.sqrt(np.arange(n_max + 1) + 0.5)
        vals *= scale[:, None]
        ders *= scale[:, None]
    return vals, ders


def spherical_bessel(ell: int, x):
    """Spherical Bessel function of the first kind j_ell(x), x >= 0.

    Orders above SPHERICAL_BESSEL_MAX_ORDER are refused: the series
    oracle that certifies this routine is only run up to there.
    """
    if ell < 0 or ell > SPHERICAL_BESSEL_MAX_ORDER:
        raise UnsupportedError(
            f"spherical Bessel order {ell} outside supported range "
            f"[0, {SPHERICAL_BESSEL_MAX_ORDER}]"
        )
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ParameterError("spherical_bessel requires x >= 0")
    return spherical_jn(ell, x)


@dataclass(frozen=True)
class SymmetricSpectrum:
    """Full spectrum of a symmetric (possibly generalized) eigenproblem.

    Eigenvalues ascend; eigenvector k is the column ``eigenvectors[:, k]``,
    orthonormal (B-orthonormal in the generalized case).  ``residual_norm``
    is max_k ||A v_k - lambda_k B v_k||_2.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residual_norm: float = field(default=0.0)


def _check_square_finite(a: np.ndarray, name: str) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DataError(f"{name} must be a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DataError(f"{name} contains non-finite entries")
    return a


def sym_eig(a: np.ndarray) -> SymmetricSpectrum:
    """Ascending eigendecomposition of a symmetric matrix.

    The input is symmetrized by averaging before the solve (LAPACK
    Householder tridiagonalization + implicit-shift QR via ``eigh``).
    """
    a = _check_square_finite(a, "A")
    a_sym = 0.5 * (a + a.T)
    vals, vecs = np.linalg.eigh(a_sym)
    resid = np.abs(a_sym @ vecs - vecs * vals[None, :])
    residual_norm = float(np.max(np.linalg.norm(resid, axis=0))) if a.size else 0.0
    return SymmetricSpectrum(vals, vecs, residual_norm)


def _smallest_cholesky_pivot(b: np.ndarray) -> float:
    """Run a plain Cholesky loop and report the first non-positive pivot
    (or the smallest pivot seen if the loop completes)."""
    b = b.copy()
    n = b.shape[0]
    smallest = np.inf
    for k in range(n):
        pivot = b[k, k]
        if pivot <= 0.0 or not np.isfinite(pivot):
            return float(pivot)
        smallest = min(smallest, pivot)
        root = np.sqrt(pivot)
        b[k:, k] /= root
        b[k + 1:, k + 1:] -= np.outer(b[k + 1:, k], b[k + 1:, k])
    return float(smallest)


def generalized_sym_eig(a: np.ndarray, b: np.ndarray) -> SymmetricSpectrum:
    """Eigenpairs of A v = lambda B v with B symmetric positive definite.

    Reduced to standard form through the Cholesky factor of B; the
    returned eigenvectors are B-orthonormal.
    """
    a = _check_square_finite(a, "A")
    b = _check_square_finite(b, "B")
    if a.shape != b.shape:
        raise DataError(f"shape mismatch: A is {a.shape}, B is {b.shape}")
    a_sym = 0.5 * (a + a.T)
    b_sym = 0.5 * (b + b.T)
    try:
        chol = np.linalg.cholesky(b_sym)
    except np.linalg.LinAlgError:
        pivot = _smallest_cholesky_pivot(b_sym)
        raise ConditioningError(
            f"B is not positive definite (smallest Cholesky pivot {pivot:.6e})"
        ) from None
    # C = L^-1 A L^-T, then map eigenvectors back with L^-T.
    tmp = np.linalg.solve(chol, a_sym)
    c = np.linalg.solve(chol, tmp.T).T
    vals, y = np.linalg.eigh(0.5 * (c + c.T))
    vecs = np.linalg.solve(chol.T, y)
    resid = a_sym @ vecs - (b_sym @ vecs) * vals[None, :]
    residual_norm = float(np.max(np.linalg.norm(resid, axis=0))) if a.size else 0.0
    return SymmetricSpectrum(vals, vecs, residual_norm)
