"""Entropy functionals on explicit functions over the unit ball (and
balls of general radius): Born, parabolic, Legendre and prolate
entropies, the balance identity between them, wave-packet entropy with
its lower bound, the entropy-operator blocks on Cauchy-data pairs, and
the general-radius relation.

All entropies carry the dimensionless pi normalization:

    born      = pi * int_B f^2
    parabolic = pi * int_B (1 - r^2) f^2
    legendre  = pi * int_B (1 - r^2) |grad f|^2
    prolate   = pi * int_B [(1 - r^2) |grad f|^2 + r^2 f^2]

and satisfy prolate + parabolic = legendre + born for every f.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError, ToleranceFailure, UnsupportedError
from .numerics import gauss_rule, generalized_sym_eig, legendre_table, shifted_rule
from .sectors import MAX_DIMENSION, SectorBasis, SpectralSector, assemble_radial_forms

BALANCE_TOL = 1e-10


def ball_volume(d: int) -> float:
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)


def sphere_area(d: int) -> float:
    """Surface measure of the unit sphere S^{d-1}."""
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


@dataclass(frozen=True)
class BallFunction:
    """A function on the unit ball, as either a closed form or a
    coefficient vector.

    kinds:
      chi_B                constant 1 on the ball
      gaussian             exp(-a r^2)                        (params: a)
      gaussian_poly        p(x) exp(-a x^2), p radial for d>1 (params: a, poly)
      legendre_mode        orthonormal Legendre P~_n, d=1     (params: n)
      legendre_coeffs      orthonormal-Legendre coefficient vector, d=1
      sector_coefficients  radial coefficients on a sector basis, any d

    Closed forms in d > 1 are radial and carry the full angular volume;
    sector coefficients multiply a unit-normalized spherical harmonic.
    """

    d: int
    kind: str
    sector: SpectralSector | None = None
    coefficients: np.ndarray | None = None
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.d < 1 or self.d > MAX_DIMENSION:
            raise ParameterError(f"dimension must be in [1, {MAX_DIMENSION}], got {self.d}")
        if self.kind in ("gaussian", "gaussian_poly") and not self.params.get("a", 0) > 0:
            raise ParameterError("gaussian forms need a decay rate a > 0")
        if self.kind in ("legendre_mode", "legendre_coeffs", "gaussian_poly") and self.d != 1:
            if self.kind != "gaussian_poly":
                raise ParameterError(f"{self.kind} is a d=1 representation")
        if self.kind == "sector_coefficients":
            if self.sector is None or self.coefficients is None:
                raise ParameterError("sector_coefficients needs a sector and coefficients")
            if self.sector.d != self.d:
                raise ParameterError("sector dimension disagrees with function dimension")
        if self.kind == "legendre_coeffs" and self.coefficients is None:
            raise ParameterError("legendre_coeffs needs coefficients")

    def describe(self) -> str:
        if self.kind == "gaussian":
            return f"gaussian(a={self.params['a']})"
        if self.kind == "gaussian_poly":
            return f"gaussian_poly(a={self.params['a']}, deg={len(self.params['poly']) - 1})"
        if self.kind == "legendre_mode":
            return f"legendre_mode({self.params['n']})"
        if self.kind == "sector_coefficients":
            s = self.sector
            return f"sector_coefficients(d={s.d}, l={s.ell}, N={len(self.coefficients)})"
        if self.kind == "legendre_coeffs":
            return f"legendre_coeffs(N={len(self.coefficients)})"
        return self.kind


def chi_ball(d: int) -> BallFunction:
    return BallFunction(d, "chi_B")


def gaussian(d: int, a: float) -> BallFunction:
    return BallFunction(d, "gaussian", params={"a": a})


def gaussian_poly(d: int, poly, a: float) -> BallFunction:
    return BallFunction(d, "gaussian_poly", params={"a": a, "poly": np.asarray(poly, float)})


def legendre_mode(n: int) -> BallFunction:
    if n < 0:
        raise ParameterError("mode index must be >= 0")
    return BallFunction(1, "legendre_mode", params={"n": int(n)})


def legendre_coefficient_function(coeffs) -> BallFunction:
    return BallFunction(1, "legendre_coeffs", coefficients=np.asarray(coeffs, float))


def sector_function(sector: SpectralSector, coeffs) -> BallFunction:
    return BallFunction(sector.d, "sector_coefficients", sector=sector,
                        coefficients=np.asarray(coeffs, float))


def zero_function(d: int) -> BallFunction:
    return BallFunction(d, "sector_coefficients",
                        sector=SpectralSector(d, 0, 1.0),
                        coefficients=np.zeros(4))


def _closed_form_values(f: BallFunction, x: np.ndarray):
    """Values and first derivatives of a closed form on the given grid
    (abscissae on (-1,1) for d=1, radii on (0,1) otherwise)."""
    if f.kind == "chi_B":
        return np.ones_like(x), np.zeros_like(x)
    if f.kind == "gaussian":
        a = f.params["a"]
        vals = np.exp(-a * x**2)
        return vals, -2.0 * a * x * vals
    if f.kind == "gaussian_poly":
        a, poly = f.params["a"], f.params["poly"]
        p = np.polynomial.Polynomial(poly)
        gauss_vals = np.exp(-a * x**2)
        vals = p(x) * gauss_vals
        ders = (p.deriv()(x) - 2.0 * a * x * p(x)) * gauss_vals
        return vals, ders
    if f.kind == "legendre_mode":
        n = f.params["n"]
        vals, ders = legendre_table(n, x, orthonormal=True)
        return vals[n], ders[n]
    if f.kind == "legendre_coeffs":
        coeffs = f.coefficients
        vals, ders = legendre_table(len(coeffs) - 1, x, orthonormal=True)
        return coeffs @ vals, coeffs @ ders
    raise UnsupportedError(f"cannot evaluate {f.kind} pointwise")


def _quadrature_grid(d: int, n_quad: int, radius: float = 1.0):
    """Grid and weights turning sums into int_{B_radius} ... dx for
    functions of one variable (interval for d=1, radial otherwise)."""
    if d == 1:
        rule = shifted_rule(gauss_rule("legendre", n_quad), -radius, radius)
        return rule.nodes, rule.weights
    rule = shifted_rule(gauss_rule("legendre", n_quad), 0.0, radius)
    return rule.nodes, rule.weights * rule.nodes ** (d - 1) * sphere_area(d)


@dataclass(frozen=True)
class EntropyReport:
    """The four entropies of a function, with the balance residual
    |prolate + parabolic - legendre - born| and its tolerance scale."""

    d: int
    description: str
    born: float
    parabolic: float
    legendre: float
    prolate: float
    balance_residual: float

    @property
    def balance_scale(self) -> float:
        return BALANCE_TOL * (self.born + self.legendre + 1.0)

    @property
    def balance_ok(self) -> bool:
        return self.balance_residual < self.balance_scale

    @property
    def norm_squared(self) -> float:
        return self.born / math.pi

    def normalized(self) -> dict:
        denom = self.norm_squared
        if denom == 0.0:
            return {k: 0.0 for k in ("born", "parabolic", "legendre", "prolate")}
        return {
            "born": self.born / denom,
            "parabolic": self.parabolic / denom,
            "legendre": self.legendre / denom,
            "prolate": self.prolate / denom,
        }

    def check(self) -> "EntropyReport":
        if not self.balance_ok:
            raise ToleranceFailure(
                f"balance identity residual {self.balance_residual:.3e} exceeds "
                f"{self.balance_scale:.3e} for {self.description}",
                checks=["balance_identity"],
            )
        return self


def _entropies_from_samples(vals, ders, x, w, d: int, description: str) -> EntropyReport:
    one_minus = 1.0 - x**2
    born = math.pi * float(w @ vals**2)
    parabolic = math.pi * float(w @ (one_minus * vals**2))
    legendre = math.pi * float(w @ (one_minus * ders**2))
    prolate = math.pi * float(w @ (one_minus * ders**2 + x**2 * vals**2))
    residual = abs(prolate + parabolic - legendre - born)
    return EntropyReport(d, description, born, parabolic, legendre, prolate, residual)


def entropy_report(f: BallFunction, n_quad: int = 200) -> EntropyReport:
    """The four entropies of f on the unit ball plus the balance residual.

    Coefficient representations are evaluated through the exact sector
    Galerkin forms; closed forms by quadrature of the four integrands
    (computed independently, so the residual is an honest consistency
    number, not zero by construction).
    """
    if f.kind == "sector_coefficients":
        v = np.asarray(f.coefficients, float)
        n_basis = max(len(v), 4)
        padded = np.zeros(n_basis)
        padded[: len(v)] = v
        sector = SpectralSector(f.sector.d, f.sector.ell, 1.0)
        forms = assemble_radial_forms(sector, n_basis)
        born = math.pi * float(padded @ forms.mass @ padded)
        parabolic = math.pi * float(padded @ forms.M_form @ padded)
        legendre = math.pi * float(padded @ forms.L_form @ padded)
        prolate = math.pi * float(padded @ (forms.L_form + forms.R2_form) @ padded)
        residual = abs(prolate + parabolic - legendre - born)
        return EntropyReport(f.d, f.describe(), born, parabolic, legendre, prolate, residual)
    x, w = _quadrature_grid(f.d, n_quad)
    vals, ders = _closed_form_values(f, x)
    return _entropies_from_samples(vals, ders, x, w, f.d, f.describe())


@dataclass(frozen=True)
class CauchyData:
    """Wave-packet Cauchy data (field f, momentum g) in dimension d."""

    f: BallFunction
    g: BallFunction
    d: int

    def __post_init__(self):
        if self.f.d != self.d or self.g.d != self.d:
            raise ParameterError("Cauchy data dimensions disagree")

    @property
    def scaling_dimension(self) -> float:
        return (self.d - 1) / 2.0


def _project_zero_mean(g: BallFunction, n_quad: int):
    """d=1 infrared handling: remove the mean of the momentum datum over
    the interval; returns (values-or-coefficients context, changed)."""
    if g.kind == "sector_coefficients":
        v = np.array(g.coefficients, float)
        if g.sector.ell == 0 and len(v) and abs(v[0]) > 1e-12 * max(np.linalg.norm(v), 1.0):
            # head basis function of the (d=1, even) sector is the constant
            v2 = v.copy()
            v2[0] = 0.0
            return sector_function(g.sector, v2), True
        return g, False
    x, w = _quadrature_grid(1, n_quad)
    vals, _ = _closed_form_values(g, x)
    mean = float(w @ vals) / 2.0
    return g, abs(mean) > 1e-12 * max(float(np.max(np.abs(vals))), 1.0)


@dataclass(frozen=True)
class WaveEntropyReport:
    """Entropy of a wave packet in the ball, with its decomposition
    S = legendre(f) + parabolic(g) + 2 pi D ||f||^2 and the equivalent
    prolate-form expression as a cross-check."""

    d: int
    description: str
    entropy: float
    legendre_term: float
    parabolic_term: float
    lower_order_term: float
    cross_form: float
    cross_residual: float
    lower_bound: float
    lower_bound_slack: float
    momentum_projected: bool


def wave_entropy(cd: CauchyData, n_quad: int = 200) -> WaveEntropyReport:
    """S_Phi = -pi (f, L f)_B + pi (g, M g)_B + 2 pi D ||f||_B^2.

    In d=1 the momentum datum is projected onto zero mean first (the
    formula only holds on that subspace); the flag records whether the
    projection changed g.  The cross-check evaluates the prolate form
    pi(-(f,Wf) + (f,Mf) + (g,Mg) + (d-2) ||f||^2), which must agree.
    """
    g = cd.g
    projected = False
    if cd.d == 1:
        g, projected = _project_zero_mean(g, n_quad)
        if projected and g.kind != "sector_coefficients":
            raise UnsupportedError(
                "d=1 momentum data must have zero mean; supply a zero-mean closed "
                "form or sector coefficients (which are projected automatically)"
            )
    rep_f = entropy_report(cd.f, n_quad)
    rep_g = entropy_report(g, n_quad)
    d_coef = cd.d - 1.0  # 2 pi D ||f||^2 = (d-1) * born(f)
    entropy = rep_f.legendre + rep_g.parabolic + d_coef * rep_f.born
    cross = rep_f.prolate + rep_f.parabolic + rep_g.parabolic + (cd.d - 2.0) * rep_f.born
    lower = d_coef * rep_f.born
    return WaveEntropyReport(
        d=cd.d,
        description=f"w({cd.f.describe()}, {cd.g.describe()})",
        entropy=entropy,
        legendre_term=rep_f.legendre,
        parabolic_term=rep_g.parabolic,
        lower_order_term=lower,
        cross_form=cross,
        cross_residual=abs(entropy - cross),
        lower_bound=lower,
        lower_bound_slack=entropy - lower,
        momentum_projected=projected,
    )


@dataclass(frozen=True)
class EntropyBlocks:
    """Sector forms of the two diagonal blocks of the entropy operator on
    L^2 (+) L^2: pi(-L + 2D) on the field side, pi M on the momentum side."""

    sector: SpectralSector
    N: int
    field_block: np.ndarray
    momentum_block: np.ndarray
    field_eigenvalues: np.ndarray
    momentum_eigenvalues: np.ndarray

    @property
    def min_field_eigenvalue(self) -> float:
        return float(self.field_eigenvalues[0])

    @property
    def min_momentum_eigenvalue(self) -> float:
        return float(self.momentum_eigenvalues[0])


def entropy_operator_blocks(sector: SpectralSector, N: int) -> EntropyBlocks:
    """Quadratic forms of the wave entropy operator blocks on one sector;
    both are positive semidefinite, the field block because the lowest
    -L eigenvalue is 0 (constant mode) shifted up by 2D."""
    forms = assemble_radial_forms(sector, N)
    two_d = 2.0 * sector.scaling_dimension
    field = math.pi * (forms.L_form + two_d * forms.mass)
    momentum = math.pi * forms.M_form
    field_eigs = generalized_sym_eig(field, forms.mass).eigenvalues
    momentum_eigs = generalized_sym_eig(momentum, forms.mass).eigenvalues
    return EntropyBlocks(sector, N, field, momentum, field_eigs, momentum_eigs)


@dataclass(frozen=True)
class GeneralRadiusReport:
    """Residual of the general-radius entropy relation on B_lambda.

    With W = grad (lambda^2 - r^2) grad - band^2 r^2, L the gradient part
    and M_lambda = (lambda^2 - r^2):

        -pi (f, W f) + band^2 pi (f, M_lambda f)
            = -pi (f, L f) + lambda^2 band^2 pi ||f||^2.

    At lambda = band = 1 this is the unit-ball balance identity.
    """

    d: int
    description: str
    radius: float
    band_radius: float
    prolate: float
    parabolic_scaled: float
    legendre: float
    born_scaled: float
    residual: float

    @property
    def scale(self) -> float:
        return max(abs(self.prolate + self.parabolic_scaled), abs(self.legendre + self.born_scaled), 1.0)

    @property
    def ok(self) -> bool:
        return self.residual < BALANCE_TOL * self.scale


def general_radius_report(
    f: BallFunction, radius: float, band_radius: float, n_quad: int = 200
) -> GeneralRadiusReport:
    """Certify the entropy relation on the ball of radius ``radius`` with
    Fourier localization radius ``band_radius`` (closed forms only; the
    chi_B tag is read as the constant function on B_radius, the zero mode
    of the general-radius Legendre operator)."""
    if radius <= 0 or band_radius <= 0:
        raise ParameterError(f"radii must be positive, got ({radius}, {band_radius})")
    if f.kind in ("sector_coefficients", "legendre_coeffs", "legendre_mode"):
        raise UnsupportedError(
            f"{f.kind} lives on the unit ball; general-radius reports need closed forms"
        )
    x, w = _quadrature_grid(f.d, n_quad, radius)
    vals, ders = _closed_form_values(f, x)
    lam2_minus = radius**2 - x**2
    bw2 = band_radius**2
    prolate = math.pi * float(w @ (lam2_minus * ders**2 + bw2 * x**2 * vals**2))
    parabolic_scaled = bw2 * math.pi * float(w @ (lam2_minus * vals**2))
    legendre = math.pi * float(w @ (lam2_minus * ders**2))
    born_scaled = radius**2 * bw2 * math.pi * float(w @ vals**2)
    residual = abs(prolate + parabolic_scaled - legendre - born_scaled)
    return GeneralRadiusReport(
        d=f.d,
        description=f.describe(),
        radius=radius,
        band_radius=band_radius,
        prolate=prolate,
        parabolic_scaled=parabolic_scaled,
        legendre=legendre,
        born_scaled=born_scaled,
        residual=residual,
    )


def entropy_corpus(seed: int = 0, n_random: int = 120) -> list[BallFunction]:
    """Test corpus for the balance identity: closed forms in every
    dimension, d=1 modes, and random sector coefficient vectors."""
    rng = np.random.default_rng(seed)
    corpus: list[BallFunction] = []
    for d in range(1, MAX_DIMENSION + 1):
        corpus.append(chi_ball(d))
        for a in (0.5, 1.0, 2.0):
            corpus.append(gaussian(d, a))
    for n in range(8):
        corpus.append(legendre_mode(n))
    for poly in ([0.0, 1.0], [1.0, 0.0, -1.0], [0.0, 0.0, 0.0, 2.0]):
        corpus.append(gaussian_poly(1, poly, 1.0))
    dims = [1 + int(rng.integers(0, MAX_DIMENSION)) for _ in range(n_random)]
    for d in dims:
        ell = int(rng.integers(0, 2 if d == 1 else 4))
        n_basis = int(rng.integers(4, 10))
        sector = SpectralSector(d, ell, 1.0)
        corpus.append(sector_function(sector, rng.standard_normal(n_basis)))
    return corpus
