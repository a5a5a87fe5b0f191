"""Dimension d >= 1 on the unit ball via spherical-harmonic sector
reduction: radial Galerkin forms for the Legendre operator L, the prolate
operator W(c), the parabolic multiplier M = (1-r^2) and r^2; sector
Hankel (truncated Fourier) kernels for odd d; and the higher-dimensional
commutation and Hermiticity certificates.

Radial basis of a sector (d, ell):  phi_n(r) = kappa_n r^ell P_n^{(0,b)}(2r^2-1)
with b = ell + (d-2)/2 and kappa_n chosen so the basis is orthonormal in
L^2((0,1), r^{d-1} dr).  All form integrands become polynomials against
the Jacobi weight (1+s)^{(d-2)/2} in s = 2r^2 - 1, so assembly by
Gauss-Jacobi quadrature is exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import eval_jacobi

from .errors import ParameterError, UnsupportedError
from .numerics import gauss_rule, generalized_sym_eig, shifted_rule
from .prolate1d import LAMBDA_RESOLVABLE_FLOOR, TRUSTED_TAIL_MASS, KernelOperator

MAX_DIMENSION = 7
MAX_DEGREE = 50


@dataclass(frozen=True)
class SpectralSector:
    """Reduction unit for all d > 1 computations: space dimension d,
    angular degree ell, bandwidth c.  For d = 1, ell in {0, 1} encodes
    even/odd parity."""

    d: int
    ell: int
    c: float

    def __post_init__(self):
        if self.d < 1 or self.d > MAX_DIMENSION:
            raise ParameterError(f"dimension must be in [1, {MAX_DIMENSION}], got {self.d}")
        if self.ell < 0 or self.ell > MAX_DEGREE:
            raise ParameterError(f"angular degree must be in [0, {MAX_DEGREE}], got {self.ell}")
        if self.d == 1 and self.ell not in (0, 1):
            raise ParameterError(f"for d=1 the degree encodes parity, need ell in {{0,1}}, got {self.ell}")
        if not self.c > 0:
            raise ParameterError(f"bandwidth must be positive, got c={self.c}")

    @property
    def jacobi_beta(self) -> float:
        return self.ell + (self.d - 2) / 2.0

    @property
    def centrifugal(self) -> float:
        return float(self.ell * (self.ell + self.d - 2))

    @property
    def scaling_dimension(self) -> float:
        return (self.d - 1) / 2.0


class SectorBasis:
    """Evaluation of the orthonormal radial basis of one sector."""

    def __init__(self, sector: SpectralSector):
        self.sector = sector
        self.beta = sector.jacobi_beta

    def _norms(self, n_max: int) -> np.ndarray:
        n = np.arange(n_max + 1)
        return np.sqrt(2.0 * (2.0 * n + self.beta + 1.0))

    def tables(self, n_max: int, r: np.ndarray, order: int = 1):
        """Values (and derivatives up to ``order``) of phi_0..phi_{n_max}
        at the radii r; each returned array has shape (n_max+1, len(r))."""
        if n_max < 0:
            raise ParameterError("need n_max >= 0")
        r = np.atleast_1d(np.asarray(r, dtype=float))
        s = 2.0 * r**2 - 1.0
        ell, beta = self.sector.ell, self.beta
        kappa = self._norms(n_max)[:, None]
        ns = np.arange(n_max + 1)[:, None]
        q = eval_jacobi(ns, 0.0, beta, s[None, :])
        r_ell = r[None, :] ** ell
        out = [kappa * r_ell * q]
        dq = np.zeros_like(q)
        if order >= 1:
            if n_max >= 1:
                dq[1:] = 0.5 * (ns[1:] + beta + 1.0) * eval_jacobi(ns[1:] - 1, 1.0, beta + 1.0, s[None, :])
            term = 4.0 * r[None, :] ** (ell + 1) * dq
            if ell > 0:
                term = term + ell * r[None, :] ** (ell - 1) * q
            out.append(kappa * term)
        if order >= 2:
            ddq = np.zeros_like(q)
            if n_max >= 2:
                ddq[2:] = 0.25 * (ns[2:] + beta + 1.0) * (ns[2:] + beta + 2.0) * eval_jacobi(
                    ns[2:] - 2, 2.0, beta + 2.0, s[None, :]
                )
            term = (8.0 * ell + 4.0) * r[None, :] ** ell * dq
            term = term + 16.0 * r[None, :] ** (ell + 2) * ddq
            if ell > 1:
                term = term + ell * (ell - 1) * r[None, :] ** (ell - 2) * q
            out.append(kappa * term)
        return tuple(out)


def radial_basis(sector: SpectralSector, n: int):
    """Handle (value, derivative) for the n-th radial basis function."""
    if n < 0:
        raise ParameterError("basis index must be >= 0")
    basis = SectorBasis(sector)

    def value(r):
        return basis.tables(n, r, order=0)[0][n]

    def derivative(r):
        return basis.tables(n, r, order=1)[1][n]

    return value, derivative


@dataclass(frozen=True)
class RadialForms:
    """Galerkin matrices of one sector on the orthonormal radial basis.

    ``L_form`` is the positive form of -L (gradient + centrifugal term),
    ``W_form = L_form + c^2 R2_form`` the positive form of -W(c); the
    identity W_form = L_form + c^2 (mass - M_form) holds to machine zero
    because r^2 = 1 - (1 - r^2).
    """

    sector: SpectralSector
    N: int
    mass: np.ndarray
    L_form: np.ndarray
    M_form: np.ndarray
    R2_form: np.ndarray
    W_form: np.ndarray
    r_nodes: np.ndarray
    measure_weights: np.ndarray  # weights for integrals against r^{d-1} dr on (0,1)


def assemble_radial_forms(sector: SpectralSector, N: int) -> RadialForms:
    """Assemble mass, L, M, r^2 and W(c) forms, exactly, by Gauss-Jacobi
    quadrature in s = 2r^2 - 1 (weight exponent (d-2)/2)."""
    if N < 4:
        raise ParameterError(f"basis size must be at least 4, got N={N}")
    if N > 200:
        raise ParameterError("basis sizes beyond 200 overflow the Jacobi scalings")
    gamma = (sector.d - 2) / 2.0
    n_pts = N + sector.ell + 2
    rule = gauss_rule("jacobi", n_pts, 0.0, gamma)
    s = rule.nodes
    r = np.sqrt(0.5 * (1.0 + s))
    # int_0^1 f r^{d-1} dr = (2^-gamma / 4) * int f(r(s)) (1+s)^gamma ds
    base_w = rule.weights * (2.0 ** (-gamma) / 4.0)
    vals, ders = SectorBasis(sector).tables(N - 1, r, order=1)
    one_minus_r2 = 0.5 * (1.0 - s)
    r2 = 0.5 * (1.0 + s)

    def gram(table_a, weights, table_b=None):
        lhs = table_a * np.sqrt(weights)
        if table_b is None:
            return lhs @ lhs.T
        return lhs @ (table_b * np.sqrt(weights)).T

    mass = gram(vals, base_w)
    m_form = gram(vals, base_w * one_minus_r2)
    r2_form = gram(vals, base_w * r2)
    l_form = gram(ders, base_w * one_minus_r2)
    if sector.ell > 0:
        l_form = l_form + gram(vals / r[None, :], base_w * one_minus_r2 * sector.centrifugal)
    w_form = l_form + sector.c**2 * r2_form
    return RadialForms(
        sector=sector,
        N=N,
        mass=mass,
        L_form=l_form,
        M_form=m_form,
        R2_form=r2_form,
        W_form=w_form,
        r_nodes=r,
        measure_weights=base_w,
    )


# ---------------------------------------------------------------------------
# Sector kernels of the bandwidth-c truncated Fourier transform (odd d).
# ---------------------------------------------------------------------------


def _sector_kernel(sector: SpectralSector, p: np.ndarray, r: np.ndarray, order: int = 0):
    """Real radial kernel H(p, r) of the sector truncated Fourier
    transform (the unitary phase (-i)^ell is dropped; it cancels in
    H* H), with p-derivatives up to ``order``.

    d=1: sqrt(2c/pi) cos(c p r) on the even sector, sin on the odd one.
    d=3: c^{3/2} sqrt(2/pi) j_ell(c p r) against the measure r^2 dr.
    """
    c = sector.c
    z = c * np.multiply.outer(p, r)
    rr = np.broadcast_to(r[None, :], z.shape)
    if sector.d == 1:
        amp = math.sqrt(2.0 * c / math.pi)
        if sector.ell == 0:
            k, dk, ddk = amp * np.cos(z), -amp * np.sin(z), -amp * np.cos(z)
        else:
            k, dk, ddk = amp * np.sin(z), amp * np.cos(z), -amp * np.sin(z)
    elif sector.d == 3:
        from scipy.special import spherical_jn

        if sector.ell > MAX_DEGREE:
            raise UnsupportedError(f"sector degree {sector.ell} beyond {MAX_DEGREE}")
        amp = c**1.5 * math.sqrt(2.0 / math.pi)
        k = amp * spherical_jn(sector.ell, z)
        dk = ddk = None
        if order >= 1:
            dk = amp * spherical_jn(sector.ell, z, derivative=True)
        if order >= 2:
            # from the spherical Bessel equation (z strictly positive here)
            ddk = -2.0 * dk / z - (1.0 - sector.ell * (sector.ell + 1) / z**2) * k
    else:
        raise UnsupportedError(
            f"sector Fourier kernels are implemented for d in {{1, 3}}; got d={sector.d} "
            "(even d needs integer-order Bessel J, deferred)"
        )
    out = [k]
    if order >= 1:
        out.append(c * rr * dk)
    if order >= 2:
        out.append(c**2 * rr**2 * ddk)
    return tuple(out)


def sector_radial_rule(d: int, n_quad: int):
    """Gauss-Legendre rule on (0,1) plus the r^{d-1} measure weights."""
    rule = shifted_rule(gauss_rule("legendre", n_quad), 0.0, 1.0)
    return rule, rule.weights * rule.nodes ** (d - 1)


def sector_hankel_nystrom(sector: SpectralSector, n_quad: int) -> KernelOperator:
    """Symmetrized Nystrom matrix of the sector Fourier kernel on
    L^2((0,1), r^{d-1} dr); its square is the sector angle operator."""
    if n_quad < 8:
        raise ParameterError(f"need at least 8 quadrature points, got {n_quad}")
    if sector.d not in (1, 3):
        raise UnsupportedError(
            f"sector Fourier kernels are implemented for d in {{1, 3}}; got d={sector.d} "
            "(even d needs integer-order Bessel J, deferred)"
        )
    rule, measure = sector_radial_rule(sector.d, n_quad)
    (kernel,) = _sector_kernel(sector, rule.nodes, rule.nodes, order=0)
    half = np.sqrt(measure)
    matrix = half[:, None] * kernel * half[None, :]
    return KernelOperator("sector_hankel", sector.c, rule, matrix, sector=sector)


@dataclass(frozen=True)
class CommutationReportND:
    """Alignment of the -W (or -L) sector eigenvectors with the sector
    angle operator H^2; ordering of the matched concentrations is
    observational (reported over the float64-resolvable prefix)."""

    sector: SpectralSector
    N: int
    n_quad: int
    operator: str
    ks: np.ndarray
    alphas: np.ndarray
    lambdas: np.ndarray
    residuals: np.ndarray
    resolvable: np.ndarray
    ordering_observed: bool

    @property
    def max_residual(self) -> float:
        return float(np.max(self.residuals)) if self.residuals.size else 0.0


def sector_eigenpairs(forms: RadialForms, operator: str = "W"):
    """Trusted generalized eigenpairs of (W_form, mass) or (L_form, mass)."""
    matrix = forms.W_form if operator == "W" else forms.L_form
    spec = generalized_sym_eig(matrix, forms.mass)
    tail = spec.eigenvectors[3 * forms.N // 4:, :]
    tail_mass = np.sum(tail**2, axis=0) / np.sum(spec.eigenvectors**2, axis=0)
    return spec, tail_mass < TRUSTED_TAIL_MASS


def nd_commutation_certificate(
    forms: RadialForms, hankel: KernelOperator, k_max: int = 12, operator: str = "W"
) -> CommutationReportND:
    """Certify that the sector angle operator H^2 is diagonal on the
    trusted -W eigenvectors (the lucky accident, sector by sector)."""
    if hankel.kind != "sector_hankel":
        raise ParameterError(f"need a sector_hankel operator, got {hankel.kind}")
    if hankel.sector != forms.sector:
        raise ParameterError(
            f"sector mismatch: forms {forms.sector}, kernel {hankel.sector}"
        )
    if operator not in ("W", "L"):
        raise ParameterError(f"operator must be 'W' or 'L', got {operator!r}")
    spec, trusted = sector_eigenpairs(forms, operator)
    keep = [k for k in range(forms.N) if trusted[k]][:k_max]
    if not keep:
        raise ParameterError("no trusted eigenpairs at this basis size")
    rule = hankel.rule
    measure = rule.weights * rule.nodes ** (forms.sector.d - 1)
    vals, _ = SectorBasis(forms.sector).tables(forms.N - 1, rule.nodes, order=1)
    t = hankel.matrix @ hankel.matrix
    residuals, lams = [], []
    for k in keep:
        u = np.sqrt(measure) * (spec.eigenvectors[:, k] @ vals)
        u /= np.linalg.norm(u)
        tu = t @ u
        lam = float(u @ tu)
        lams.append(lam)
        residuals.append(float(np.linalg.norm(tu - lam * u)))
    lams = np.array(lams)
    resolvable = lams > LAMBDA_RESOLVABLE_FLOOR
    head = lams[resolvable]
    ordering = bool(np.all(np.diff(head) < 0)) if head.size > 1 else True
    return CommutationReportND(
        sector=forms.sector,
        N=forms.N,
        n_quad=rule.n,
        operator=operator,
        ks=np.array(keep, dtype=int),
        alphas=spec.eigenvalues[np.array(keep, dtype=int)],
        lambdas=lams,
        residuals=np.array(residuals),
        resolvable=resolvable,
        ordering_observed=ordering,
    )


@dataclass(frozen=True)
class HermiticityWitness:
    """Max asymmetry of the mixed quadratic form of W (or L) between
    ball-supported basis functions and their band-limited images."""

    sector: SpectralSector
    N: int
    n_quad: int
    operator: str
    pairs: str
    max_asymmetry: float
    scale: float

    @property
    def relative_asymmetry(self) -> float:
        return self.max_asymmetry / self.scale if self.scale else 0.0


def _apply_radial_operator(sector: SpectralSector, include_r2: bool, r, f, df, ddf):
    """(1-r^2)[f'' + (d-1) f'/r - ell(ell+d-2) f/r^2] - 2 r f' (- c^2 r^2 f)."""
    one_minus = 1.0 - r**2
    out = one_minus * ddf - 2.0 * r * df
    if sector.d > 1:
        out = out + one_minus * (sector.d - 1) * df / r
    if sector.centrifugal:
        out = out - one_minus * sector.centrifugal * f / r**2
    if include_r2:
        out = out - sector.c**2 * r**2 * f
    return out


def hermiticity_witness(
    sector: SpectralSector,
    N: int,
    n_quad: int,
    operator: str = "W",
    pairs: str = "mixed",
) -> HermiticityWitness:
    """Assemble the mixed matrix (phi_m, Op psi_n) over the ball, with
    psi_n the band-limited sector transforms of phi_n, and report the
    largest deviation from symmetry.

    In the continuum the matrix is exactly symmetric for Op = W: the
    kernel satisfies W_p H(p,r) = W_r H(p,r), which combines the
    Hermiticity of W on its natural domain with the commutation with the
    truncated Fourier transform.  With ``pairs='ball'`` both factors are
    ball-supported basis functions and symmetry only encodes Hermiticity,
    which holds for L as well.
    """
    if operator not in ("W", "L"):
        raise ParameterError(f"operator must be 'W' or 'L', got {operator!r}")
    if pairs not in ("mixed", "ball"):
        raise ParameterError(f"pairs must be 'mixed' or 'ball', got {pairs!r}")
    rule, measure = sector_radial_rule(sector.d, n_quad)
    r = rule.nodes
    include_r2 = operator == "W"
    basis = SectorBasis(sector)
    vals, ders, seconds = basis.tables(N - 1, r, order=2)
    if pairs == "ball":
        op_vals = np.stack(
            [_apply_radial_operator(sector, include_r2, r, vals[n], ders[n], seconds[n]) for n in range(N)]
        )
        mixed = (vals * measure) @ op_vals.T
    else:
        kernel, dkernel, ddkernel = _sector_kernel(sector, r, r, order=2)
        weighted = measure[None, :] * vals  # (N, nq) of omega_j phi_n(r_j)
        psi = kernel @ weighted.T  # (nq, N)
        dpsi = dkernel @ weighted.T
        ddpsi = ddkernel @ weighted.T
        op_psi = _apply_radial_operator(
            sector, include_r2, r[:, None], psi, dpsi, ddpsi
        )
        mixed = (vals * measure) @ op_psi
    asym = float(np.max(np.abs(mixed - mixed.T)))
    scale = float(np.max(np.abs(mixed)))
    return HermiticityWitness(
        sector=sector,
        N=N,
        n_quad=n_quad,
        operator=operator,
        pairs=pairs,
        max_asymmetry=asym,
        scale=scale,
    )
