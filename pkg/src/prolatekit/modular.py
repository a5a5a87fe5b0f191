"""Finite-dimensional Tomita-Takesaki laboratory: standard subspaces of a
complexified R^{2n}, their modular operator and conjugation, the cutting
projection (closed formula against a direct linear-solve oracle), the
entropy operator and entropy of a vector, and the field/momentum duality
model with its diagonal/off-diagonal block structure.

Real-matrix conventions.  A complex space of dimension n is R^{2n} with
the Euclidean inner product g and a real matrix J_c with J_c^2 = -1
playing multiplication by i; for the canonical layout (x; y) <-> x + iy,
J_c = [[0, -I], [I, 0]].  The imaginary part of the complex scalar
product is the symplectic form Im(Phi, Psi) = g(J_c Phi, Psi), and the
adjoint of an anti-linear operator's real representative is the plain
transpose.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.linalg import expm

from .errors import (
    ConditioningError,
    DegenerateSpectrumError,
    ParameterError,
    ValidationError,
)

RANK_TOL = 1e-10  # singular values below RANK_TOL * sigma_max count as zero
DELTA_ONE_GUARD = 1e-10  # reject modular spectrum within this of 1
FLOW_TIMES = (0.3, 1.0, math.sqrt(2.0))


@dataclass(frozen=True)
class ComplexSpace:
    """R^{2n} with multiplication by i given as a real matrix."""

    n: int
    J_c: np.ndarray

    def __post_init__(self):
        j = np.asarray(self.J_c, float)
        if j.shape != (2 * self.n, 2 * self.n):
            raise ParameterError(f"J_c must be {2*self.n}x{2*self.n}, got {j.shape}")
        if np.max(np.abs(j @ j + np.eye(2 * self.n))) > 1e-13:
            raise ValidationError("J_c^2 differs from -1 beyond 1e-13")
        if np.max(np.abs(j + j.T)) > 1e-13:
            raise ValidationError("J_c is not antisymmetric w.r.t. the metric")


def canonical_space(n: int) -> ComplexSpace:
    if n < 1:
        raise ParameterError(f"complex dimension must be >= 1, got {n}")
    zero = np.zeros((n, n))
    eye = np.eye(n)
    return ComplexSpace(n, np.block([[zero, -eye], [eye, zero]]))


@dataclass(frozen=True)
class StandardSubspace:
    """A standard subspace with its derived modular data.

    ``basis`` spans H; ``condition_number`` is that of [basis | i basis]
    (standardness witness).  Modular pieces are filled by
    ``tomita_data`` / ``cutting_projection_formula`` / ``entropy_operator``.
    """

    space: ComplexSpace
    basis: np.ndarray
    condition_number: float
    factorial: bool
    attempts: int = 1
    Delta: np.ndarray | None = None
    J: np.ndarray | None = None
    logDelta: np.ndarray | None = None
    cutting: np.ndarray | None = None
    entropy_op: np.ndarray | None = None
    modular_residuals: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.space.n


def _orthonormal_range(matrix: np.ndarray) -> np.ndarray:
    q, _ = np.linalg.qr(matrix)
    return q


def symplectic_complement_basis(space: ComplexSpace, basis: np.ndarray) -> np.ndarray:
    """Basis of H' = (iH)^perp, the symplectic complement of span(basis)."""
    _, _, vt = np.linalg.svd((space.J_c @ basis).T)
    return vt[basis.shape[1]:].T


def _standardness(space: ComplexSpace, basis: np.ndarray):
    b = np.hstack([basis, space.J_c @ basis])
    sv = np.linalg.svd(b, compute_uv=False)
    ok = sv[-1] > RANK_TOL * sv[0]
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else float("inf")
    return ok, cond


def _factoriality(space: ComplexSpace, basis: np.ndarray) -> bool:
    prime = symplectic_complement_basis(space, basis)
    stacked = np.hstack([basis, prime])
    sv = np.linalg.svd(stacked, compute_uv=False)
    return bool(sv[-1] > RANK_TOL * sv[0])


def _delta_spectrum_near_one(H: "StandardSubspace") -> float:
    vals = np.linalg.eigvalsh(0.5 * (H.Delta + H.Delta.T))
    return float(np.min(np.abs(vals - 1.0)))


def make_standard_subspace(
    space: ComplexSpace,
    basis: np.ndarray | None = None,
    seed: int | None = None,
    require_factorial: bool = True,
    max_attempts: int = 200,
    max_condition: float = 200.0,
) -> StandardSubspace:
    """Validate a user basis, or sample a random Gaussian one.

    A user basis must span a standard subspace; factoriality is recorded
    (non-factorial subspaces like R^n in C^n are legitimate, but the
    cutting projection then refuses the degenerate directions).

    The seeded path rejection-resamples until the subspace is standard
    and, with ``require_factorial``, factorial and clear of the
    Delta-spectrum-at-1 guard (the cutting formula's pole); the number of
    attempts is recorded.  Factorial standard subspaces exist only for
    even complex dimension: the symplectic form restricted to the
    n-real-dimensional H is antisymmetric, so its kernel H and H' share
    is nonzero whenever n is odd.  For odd n sample with
    ``require_factorial=False`` and work on ``factorial_component``.
    """
    n = space.n
    if basis is not None:
        basis = np.asarray(basis, float)
        if basis.shape != (2 * n, n):
            raise ValidationError(f"basis must be {2*n}x{n}, got {basis.shape}")
        ok, cond = _standardness(space, basis)
        if not ok:
            raise ValidationError(
                f"basis does not span a standard subspace: [basis | i basis] is "
                f"rank deficient (condition number {cond:.3e})"
            )
        return StandardSubspace(space, basis, cond, _factoriality(space, basis))
    if seed is None:
        raise ParameterError("provide either a basis or a seed")
    if require_factorial and n % 2 == 1:
        raise ParameterError(
            f"no factorial standard subspace exists in odd complex dimension n={n} "
            "(parity of the restricted symplectic form); sample with "
            "require_factorial=False and reduce to the factorial component"
        )
    rng = np.random.default_rng(seed)
    for attempt in range(1, max_attempts + 1):
        candidate = rng.standard_normal((2 * n, n))
        ok, cond = _standardness(space, candidate)
        # the modular identities degrade like powers of this condition
        # number; nearly-degenerate samples are resampled, not repaired
        if not ok or cond > max_condition:
            continue
        factorial = _factoriality(space, candidate)
        if require_factorial and not factorial:
            continue
        H = StandardSubspace(space, candidate, cond, factorial, attempts=attempt)
        if require_factorial:
            H = tomita_data(H)
            if _delta_spectrum_near_one(H) <= DELTA_ONE_GUARD:
                continue
        return H
    raise ConditioningError(f"no admissible subspace in {max_attempts} samples (seed={seed})")


def factorial_component(H: StandardSubspace):
    """Restriction of H to the spectral complement of the modular
    eigenvalue 1, in adapted coordinates.

    Returns ``(H_reduced, embedding)`` with ``embedding`` the orthonormal
    2n x 2m matrix mapping reduced coordinates back into the ambient
    space.  On the eigenvalue-1 subspace the modular Hamiltonian
    vanishes, so entropy data of H is the embedded entropy data of the
    reduced subspace; for factorial H this is H itself with the identity
    embedding.
    """
    if H.Delta is None:
        H = tomita_data(H)
    vals, vecs = np.linalg.eigh(H.Delta)
    keep = np.abs(vals - 1.0) > DELTA_ONE_GUARD
    if np.all(keep):
        return H, np.eye(2 * H.n)
    u = _orthonormal_range(vecs[:, keep])
    if u.shape[1] % 2 == 1:
        raise ConditioningError("modular eigenvalue-1 subspace is not complex-invariant")
    m = u.shape[1] // 2
    j_reduced = u.T @ H.space.J_c @ u
    coords = u.T @ H.basis
    w, sv, _ = np.linalg.svd(coords)
    if sv[m - 1] <= RANK_TOL * sv[0] or (sv[m:] > RANK_TOL * sv[0]).any():
        raise ConditioningError("factorial component of H has unexpected dimension")
    reduced = make_standard_subspace(ComplexSpace(m, j_reduced), basis=w[:, :m])
    return tomita_data(reduced), u


def tomita_data(H: StandardSubspace) -> StandardSubspace:
    """Fill Delta, J, log Delta from the polar decomposition S = J Delta^{1/2}.

    S is the real-linear involution fixing H and negating iH, built as
    B diag(I, -I) B^{-1} with B = [basis | i basis].  The polar factors
    come from the SVD of S (J = U V^T, Delta^{1/2} = V Sigma V^T), which
    avoids squaring the condition number the way forming S^T S would.
    """
    n = H.n
    b = np.hstack([H.basis, H.space.J_c @ H.basis])
    sv = np.linalg.svd(b, compute_uv=False)
    if sv[-1] == 0 or sv[0] / sv[-1] > 1e12:
        raise ConditioningError(
            f"[basis | i basis] too ill-conditioned for modular data "
            f"(condition number {sv[0] / max(sv[-1], 1e-300):.3e})"
        )
    signs = np.concatenate([np.ones(n), -np.ones(n)])
    s_op = np.linalg.solve(b.T, (b * signs).T).T  # B diag(signs) B^{-1}
    u, sigma, vt = np.linalg.svd(s_op)
    if np.min(sigma) <= 0:
        raise ConditioningError(f"Tomita operator singular (min sigma {np.min(sigma):.3e})")
    j_mod = u @ vt
    vecs = vt.T
    delta = (vecs * sigma**2) @ vecs.T
    delta = 0.5 * (delta + delta.T)
    log_delta = (vecs * (2.0 * np.log(sigma))) @ vecs.T
    inv_delta = (vecs * sigma**-2) @ vecs.T

    eye = np.eye(2 * n)
    flow = 0.0
    basis_q = _orthonormal_range(H.basis)
    for t in FLOW_TIMES:
        rotated = expm(H.space.J_c @ (t * log_delta)) @ H.basis
        flow = max(flow, float(np.max(np.abs(rotated - basis_q @ (basis_q.T @ rotated)))))
    jdj_dev = np.max(np.abs(j_mod @ delta @ j_mod - inv_delta))
    residuals = {
        "j_squared": float(np.max(np.abs(j_mod @ j_mod - eye))),
        # relative: the entries of Delta^{-1} grow with the conditioning
        "jdj_vs_inverse": float(jdj_dev / max(1.0, np.max(np.abs(inv_delta)))),
        "delta_complex_linear": float(np.max(np.abs(delta @ H.space.J_c - H.space.J_c @ delta))),
        "s_fixes_basis": float(np.max(np.abs(s_op @ H.basis - H.basis))),
        "flow_invariance": flow,
    }
    return replace(H, Delta=delta, J=j_mod, logDelta=log_delta, modular_residuals=residuals)


def cutting_projection_formula(H: StandardSubspace) -> StandardSubspace:
    """P_H = (1 - Delta)^{-1} + J Delta^{1/2} (1 - Delta)^{-1}.

    Requires the modular spectrum to stay clear of 1 (the non-factorial
    direction); projects H + H' onto H along H'.
    """
    if H.Delta is None:
        H = tomita_data(H)
    gap = _delta_spectrum_near_one(H)
    if gap <= DELTA_ONE_GUARD:
        raise DegenerateSpectrumError(
            f"modular spectrum within {gap:.3e} of 1; cutting formula is singular "
            "(non-factorial direction detected)"
        )
    eye = np.eye(2 * H.n)
    vals, vecs = np.linalg.eigh(H.Delta)
    sqrt_delta = (vecs * np.sqrt(vals)) @ vecs.T
    resolvent = np.linalg.solve(eye - H.Delta, eye)
    cutting = resolvent + H.J @ sqrt_delta @ resolvent
    return replace(H, cutting=cutting)


def cutting_projection_direct(H: StandardSubspace) -> np.ndarray:
    """Oracle for the cutting projection: decompose against the
    concatenated bases of H and H' by a linear solve."""
    prime = symplectic_complement_basis(H.space, H.basis)
    stacked = np.hstack([H.basis, prime])
    padded = np.hstack([H.basis, np.zeros_like(prime)])
    return padded @ np.linalg.solve(stacked, np.eye(2 * H.n))


def entropy_operator(H: StandardSubspace) -> StandardSubspace:
    """E_H = i P_H i log Delta_H as a real matrix.

    Vanishes when the modular Hamiltonian does (e.g. H = R^n in C^n).
    For standard but non-factorial H the operator is computed on the
    factorial component and embedded back, the modular Hamiltonian being
    zero on the degenerate directions.
    """
    if H.logDelta is None:
        H = tomita_data(H)
    if np.max(np.abs(H.logDelta)) < 1e-12:
        return replace(H, entropy_op=np.zeros((2 * H.n, 2 * H.n)))
    if not H.factorial:
        reduced, embed = factorial_component(H)
        reduced = entropy_operator(reduced)
        return replace(H, entropy_op=embed @ reduced.entropy_op @ embed.T)
    if H.cutting is None:
        H = cutting_projection_formula(H)
    j_c = H.space.J_c
    return replace(H, entropy_op=j_c @ H.cutting @ j_c @ H.logDelta)


def vector_entropy(H: StandardSubspace, phi: np.ndarray) -> float:
    """Entropy of a vector: g(Phi, E_H Phi) through the symmetrized part."""
    if H.entropy_op is None:
        raise ParameterError("entropy operator not built; call entropy_operator first")
    e_sym = 0.5 * (H.entropy_op + H.entropy_op.T)
    return float(phi @ (e_sym @ phi))


def vector_entropy_alt(H: StandardSubspace, phi: np.ndarray) -> float:
    """Alternative evaluation Im(Phi, P A Phi) with A = -i log Delta."""
    if H.cutting is None or H.logDelta is None:
        raise ParameterError("modular and cutting data required")
    a_op = -H.space.J_c @ H.logDelta
    return float((H.space.J_c @ phi) @ (H.cutting @ (a_op @ phi)))


def build_subspace(space: ComplexSpace, seed: int, require_factorial: bool = True) -> StandardSubspace:
    """Sampled subspace with all derived data filled."""
    H = make_standard_subspace(space, seed=seed, require_factorial=require_factorial)
    if H.Delta is None:
        H = tomita_data(H)
    if H.factorial:
        H = cutting_projection_formula(H)
    return entropy_operator(H)


def modular_suite_record(n: int, seed: int, n_vectors: int = 1000) -> dict:
    """One seeded instance of the modular identity suite.

    Samples a standard subspace (factorial for even n; for odd n, where
    no factorial standard subspace exists, the checks that need
    factoriality run on the factorial component), then reports every
    residual: the modular identities on the sampled subspace, the
    cutting formula against the direct-solve oracle, and entropy
    positivity with the two evaluations compared.
    """
    space = canonical_space(n)
    even = n % 2 == 0
    H = make_standard_subspace(space, seed=seed, require_factorial=even)
    if H.Delta is None:
        H = tomita_data(H)
    reduced, embed = factorial_component(H)
    if reduced.cutting is None:
        reduced = cutting_projection_formula(reduced)
    reduced = entropy_operator(reduced)
    H = replace(H, entropy_op=embed @ reduced.entropy_op @ embed.T)
    direct = cutting_projection_direct(reduced)
    # relative: ||P|| ~ 1/gap(Delta, 1) is intrinsic, both routes inherit it
    p_scale = max(1.0, float(np.max(np.abs(direct))))
    cutting_agreement = float(np.max(np.abs(reduced.cutting - direct))) / p_scale
    # the product P^2 carries the squared scale
    idempotent = float(np.max(np.abs(reduced.cutting @ reduced.cutting - reduced.cutting))) / p_scale**2
    rng = np.random.default_rng((seed, n, 1))
    phis = rng.standard_normal((n_vectors, 2 * n))
    e_sym = 0.5 * (H.entropy_op + H.entropy_op.T)
    s_vals = np.einsum("ij,ij->i", phis @ e_sym, phis)
    s_min = float(np.min(s_vals / np.einsum("ij,ij->i", phis, phis)))
    reduced_phis = phis @ embed
    e_red = 0.5 * (reduced.entropy_op + reduced.entropy_op.T)
    s_red = np.einsum("ij,ij->i", reduced_phis @ e_red, reduced_phis)
    a_op = -reduced.space.J_c @ reduced.logDelta
    s_alt = np.einsum(
        "ij,ij->i", reduced_phis @ reduced.space.J_c.T, reduced_phis @ (reduced.cutting @ a_op).T
    )
    alt_diff = float(np.max(np.abs(s_red - s_alt)))
    entropy_sym = float(np.max(np.abs(H.entropy_op - H.entropy_op.T)))
    return {
        "n": n,
        "seed": seed,
        "attempts": H.attempts,
        "condition_number": H.condition_number,
        "factorial": H.factorial,
        "component_dim": reduced.n,
        **H.modular_residuals,
        "cutting_agreement": cutting_agreement,
        "cutting_idempotent": idempotent,
        "entropy_min": float(s_min),
        "entropy_eval_agreement": float(alt_diff),
        "entropy_op_symmetry": entropy_sym,
    }


def duality_suite_record(mu: np.ndarray, seed: int, n_vectors: int = 20) -> dict:
    """One seeded instance of the duality block-structure suite."""
    model = build_duality_model(mu, seed=seed)
    report = block_structure_certificate(model, n_vectors=n_vectors, seed=seed)
    return {
        "n": model.n,
        "seed": seed,
        "attempts": model.attempts,
        "factorial": model.factorial,
        "logdelta_offdiag_mass": report.logdelta_offdiag_mass,
        "conjugation_offdiag_mass": report.conjugation_offdiag_mass,
        "a_diag_mass": report.a_diag_mass,
        "adjoint_residual": report.adjoint_residual,
        "mu_relation_residual": report.mu_relation_residual,
        "entropy_cross_residual": report.entropy_cross_residual,
    }


# ---------------------------------------------------------------------------
# Field/momentum duality model.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DualityModel:
    """K = K_+ (+) K_- inside H_+ (+) H_- with complex structure
    [[0, mu^{-1}], [-mu, 0]].

    ``doubled`` lives in the metric-orthonormalized coordinates
    T = diag(mu^{1/2}, mu^{-1/2}); block structure statements transform
    back to the duality coordinates through T (block-diagonal, so
    diagonal/off-diagonal mass statements are coordinate-independent).
    """

    n: int
    mu: np.ndarray
    k_plus: np.ndarray
    k_minus: np.ndarray
    doubled: StandardSubspace
    mu_sqrt: np.ndarray
    mu_inv_sqrt: np.ndarray
    attempts: int = 1

    @property
    def factorial(self) -> bool:
        return self.doubled.factorial

    @property
    def transform(self) -> np.ndarray:
        zero = np.zeros((self.n, self.n))
        return np.block([[self.mu_sqrt, zero], [zero, self.mu_inv_sqrt]])

    def complex_structure(self) -> np.ndarray:
        zero = np.zeros((self.n, self.n))
        mu_inv = self.mu_inv_sqrt @ self.mu_inv_sqrt
        return np.block([[zero, mu_inv], [-self.mu, zero]])


def _mu_roots(mu: np.ndarray):
    mu = np.asarray(mu, float)
    if np.max(np.abs(mu - mu.T)) > 1e-12 * max(1.0, np.max(np.abs(mu))):
        raise ParameterError("mu must be symmetric")
    vals, vecs = np.linalg.eigh(0.5 * (mu + mu.T))
    if np.min(vals) <= 0:
        raise ParameterError(f"mu must be positive definite (min eig {np.min(vals):.3e})")
    sqrt = (vecs * np.sqrt(vals)) @ vecs.T
    inv_sqrt = (vecs * (1.0 / np.sqrt(vals))) @ vecs.T
    return 0.5 * (mu + mu.T), sqrt, inv_sqrt


def wave_duality_mu(n: int, p_max: float = 4.0) -> np.ndarray:
    """Diagonal |p| duality weights on an n-point frequency grid (the
    discretized wave-packet model; the grid avoids p = 0)."""
    if n < 1 or p_max <= 0:
        raise ParameterError("need n >= 1 and p_max > 0")
    p = (np.arange(n) + 0.5) * (p_max / n)
    return np.diag(p)


def build_duality_model(
    mu: np.ndarray,
    k_plus: np.ndarray | None = None,
    k_minus: np.ndarray | None = None,
    seed: int | None = None,
    dims: tuple[int, int] | None = None,
    max_attempts: int = 200,
) -> DualityModel:
    """Assemble the doubled standard subspace of a duality model.

    Explicit subspace bases must satisfy dim K_+ + dim K_- = n and span a
    standard K (non-factorial K is accepted and flagged, which restricts
    the block certificate to the mass checks).  The seeded path samples
    Gaussian bases and resamples until standard and factorial.
    """
    mu, mu_sqrt, mu_inv_sqrt = _mu_roots(mu)
    n = mu.shape[0]
    zero = np.zeros((n, n))
    eye = np.eye(n)
    space = ComplexSpace(n, np.block([[zero, eye], [-eye, zero]]))

    def doubled_basis(bp, bm):
        top = np.vstack([bp, np.zeros((n, bp.shape[1]))])
        bottom = np.vstack([np.zeros((n, bm.shape[1])), bm])
        dual = np.hstack([top, bottom])
        transform = np.block([[mu_sqrt, zero], [zero, mu_inv_sqrt]])
        return transform @ dual

    if k_plus is not None or k_minus is not None:
        if k_plus is None or k_minus is None:
            raise ParameterError("provide both K_+ and K_- or neither")
        k_plus = np.atleast_2d(np.asarray(k_plus, float))
        k_minus = np.atleast_2d(np.asarray(k_minus, float))
        if k_plus.shape[0] != n or k_minus.shape[0] != n:
            raise ParameterError(f"subspace bases must have {n} rows")
        if k_plus.shape[1] + k_minus.shape[1] != n:
            raise ParameterError(
                f"dim K_+ + dim K_- must equal n={n}, got "
                f"{k_plus.shape[1]} + {k_minus.shape[1]}"
            )
        doubled = make_standard_subspace(space, doubled_basis(k_plus, k_minus))
        doubled = tomita_data(doubled)
        return DualityModel(n, mu, k_plus, k_minus, doubled, mu_sqrt, mu_inv_sqrt)
    if seed is None:
        raise ParameterError("provide explicit subspaces or a seed")
    if dims is None:
        dims = ((n + 1) // 2, n // 2)
    if dims[0] + dims[1] != n or min(dims) < 0:
        raise ParameterError(f"dims must sum to n={n}, got {dims}")
    # dim K_+ != dim K_- forces K_+ to meet the annihilator of K_-, so
    # odd n cannot be factorial; the certificate then runs its
    # mass/relation sections only.
    want_factorial = dims[0] == dims[1]
    rng = np.random.default_rng(seed)
    for attempt in range(1, max_attempts + 1):
        bp = rng.standard_normal((n, dims[0]))
        bm = rng.standard_normal((n, dims[1]))
        candidate = doubled_basis(bp, bm)
        ok, cond = _standardness(space, candidate)
        if not ok or cond > 200.0:
            continue
        if want_factorial and not _factoriality(space, candidate):
            continue
        doubled = make_standard_subspace(space, candidate)
        doubled = tomita_data(doubled)
        if want_factorial and _delta_spectrum_near_one(doubled) <= DELTA_ONE_GUARD:
            continue
        return DualityModel(n, mu, bp, bm, doubled, mu_sqrt, mu_inv_sqrt, attempts=attempt)
    raise ConditioningError(f"no admissible duality model in {max_attempts} samples (seed={seed})")


def _block_masses(matrix: np.ndarray, n: int):
    diag = math.hypot(np.linalg.norm(matrix[:n, :n]), np.linalg.norm(matrix[n:, n:]))
    off = math.hypot(np.linalg.norm(matrix[:n, n:]), np.linalg.norm(matrix[n:, :n]))
    total = max(math.hypot(diag, off), 1e-300)
    return diag / total, off / total


def oblique_projection(onto: np.ndarray, annihilate: np.ndarray) -> np.ndarray:
    """Projection of R^n onto span(onto) along the Euclidean complement
    of span(annihilate) (the duality annihilator)."""
    n = onto.shape[0]
    _, _, vt = np.linalg.svd(annihilate.T)
    complement = vt[annihilate.shape[1]:].T
    stacked = np.hstack([onto, complement])
    if stacked.shape[1] != n:
        raise ParameterError("oblique projection needs complementary dimensions")
    padded = np.hstack([onto, np.zeros_like(complement)])
    return padded @ np.linalg.solve(stacked, np.eye(n))


@dataclass(frozen=True)
class BlockReport:
    """Block-structure certificate of a duality model (duality coords)."""

    n: int
    factorial: bool
    logdelta_offdiag_mass: float
    conjugation_offdiag_mass: float
    a_diag_mass: float
    m_block: np.ndarray
    l_block: np.ndarray
    adjoint_residual: float | None = None  # ||M^T + L|| / ||L||
    mu_relation_residual: float | None = None  # ||mu M mu + L|| / ||L||
    entropy_cross_residual: float | None = None

    def mass_checks_ok(self, tol: float = 1e-9) -> bool:
        return (
            self.logdelta_offdiag_mass < tol
            and self.conjugation_offdiag_mass < tol
            and self.a_diag_mass < tol
        )


def block_structure_certificate(
    model: DualityModel, n_vectors: int = 20, seed: int = 0
) -> BlockReport:
    """Check that log Delta_K and J_K are diagonal and A_K = -i log Delta_K
    off-diagonal in the H_+ (+) H_- split, extract the blocks M and L, and
    verify M^T = -L = mu M mu plus the entropy formula
    S(f (+) g) = -pi <f, P_- L f> + pi <g, P_+ M g> against the generic
    entropy operator.  Non-factorial models get the mass checks only.
    """
    doubled = model.doubled
    if doubled.logDelta is None:
        doubled = tomita_data(doubled)
    n = model.n
    t_mat = model.transform
    t_inv = np.block(
        [
            [model.mu_inv_sqrt, np.zeros((n, n))],
            [np.zeros((n, n)), model.mu_sqrt],
        ]
    )
    log_delta_dual = t_inv @ doubled.logDelta @ t_mat
    j_dual = t_inv @ doubled.J @ t_mat
    a_dual = -model.complex_structure() @ log_delta_dual
    _, log_off = _block_masses(log_delta_dual, n)
    _, j_off = _block_masses(j_dual, n)
    a_diag, _ = _block_masses(a_dual, n)
    m_block = a_dual[:n, n:] / math.pi
    l_block = a_dual[n:, :n] / math.pi
    # M*: H_+ -> H_- is the adjoint against the (.,.)_+/- metrics, i.e.
    # the g-transpose mu M^T mu of the real representative.
    scale = max(np.linalg.norm(l_block), 1e-300)
    adjoint_residual = float(
        np.linalg.norm(model.mu @ m_block.T @ model.mu + l_block) / scale
    )
    mu_relation = float(np.linalg.norm(model.mu @ m_block @ model.mu + l_block) / scale)
    report = BlockReport(
        n=n,
        factorial=doubled.factorial,
        logdelta_offdiag_mass=log_off,
        conjugation_offdiag_mass=j_off,
        a_diag_mass=a_diag,
        m_block=m_block,
        l_block=l_block,
        adjoint_residual=adjoint_residual,
        mu_relation_residual=mu_relation,
    )
    if not doubled.factorial:
        # the oblique projections P_+/P_- need K_+ + K_-^o to be a direct
        # sum, which fails on non-factorial models; skip the entropy section
        return report
    doubled = entropy_operator(doubled)
    p_minus = oblique_projection(model.k_minus, model.k_plus)
    p_plus = oblique_projection(model.k_plus, model.k_minus)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_vectors):
        f = rng.standard_normal(n)
        g = rng.standard_normal(n)
        phi_dual = np.concatenate([f, g])
        s_generic = vector_entropy(doubled, t_mat @ phi_dual)
        s_formula = math.pi * (-f @ (p_minus @ (l_block @ f)) + g @ (p_plus @ (m_block @ g)))
        worst = max(worst, abs(s_generic - s_formula) / max(abs(s_generic), 1.0))
    return replace(
        report,
        adjoint_residual=adjoint_residual,
        mu_relation_residual=mu_relation,
        entropy_cross_residual=worst,
    )
