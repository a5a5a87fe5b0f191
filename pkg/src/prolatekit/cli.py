"""Batch front end.

Subcommands: pswf, spectrum, commutator, entropy, wave, modular, duality,
sweep.  Every run resolves its configuration (flags over an optional
key=value config file over defaults), executes one module pipeline, and
writes a single report document (JSON canonical, CSV as a flat
projection).  With --plot, matplotlib figures are rendered next to the
delimited output.

Exit codes: 0 success, 2 validation/parameter error, 3 numerical
tolerance failure (a certificate exceeded its stated tolerance), 4
declared-unsupported parameter combination.
"""
from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import entropy as ent
from . import modular as mod
from . import prolate1d as p1
from . import sectors as sec
from .errors import (
    ConditioningError,
    DataError,
    DegenerateSpectrumError,
    ParameterError,
    ProlateKitError,
    ToleranceFailure,
    UnsupportedError,
    ValidationError,
)
from .serialize import build_document, jsonable, render_csv, render_json, write_text

WORKERS_ENV = "PROLATEKIT_WORKERS"

LIMITS = {"d": 7, "l": 50, "basis": 2000, "quad": 4000}

# stated certificate tolerances, pinned
TOL_ALIGNMENT_1D = 1e-8
TOL_ALIGNMENT_3D = 1e-6
TOL_WAVE_CROSS = 1e-10
TOL_MODULAR = 1e-9
TOL_DUALITY_MASS = 1e-9
TOL_DUALITY_RELATION = 1e-8

DEFAULTS = {
    "d": 1,
    "l": 0,
    "c": 1.0,
    "basis": 64,
    "quad": 200,
    "k": 10,
    "grid": 0,
    "seed": 0,
    "seeds": 20,
    "n": 4,
    "vectors": 1000,
    "fn": "chi_B",
    "g_fn": "zero",
    "corpus": 0,
    "radius": 1.0,
    "band_radius": 1.0,
    "mu": "random-spd",
    "normalized": False,
}


def _positive_int(text):
    value = int(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prolatekit",
        description="Finite-matrix certificates for prolate operators, truncated "
        "Fourier transforms, and modular entropy operators.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def shared(p):
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--output", default="-", help="output path, or - for stdout")
        p.add_argument("--config", default=None, help="optional key=value config file")
        p.add_argument("--plot", action="store_true", help="render figures beside the output")
        p.add_argument("--plot-dir", default=None, help="directory for figures")
        p.add_argument("--d", type=int, default=argparse.SUPPRESS, help="space dimension")
        p.add_argument("--l", type=int, default=argparse.SUPPRESS, help="angular degree / parity")
        p.add_argument("--c", type=float, default=argparse.SUPPRESS, help="bandwidth")
        p.add_argument("--basis", type=int, default=argparse.SUPPRESS, help="basis size N")
        p.add_argument("--quad", type=int, default=argparse.SUPPRESS, help="quadrature points")
        p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
        return p

    shared(sub.add_parser("pswf", help="prolate eigenvalues and eigenfunctions (d=1)")).add_argument(
        "--k", type=_positive_int, default=argparse.SUPPRESS, help="number of eigenpairs"
    )
    sub_p = sub.choices["pswf"]
    sub_p.add_argument("--grid", type=int, default=argparse.SUPPRESS, help="sample eigenfunctions on this many points")

    shared(sub.add_parser("spectrum", help="sector spectra of -W and -L"))
    sub.choices["spectrum"].add_argument("--k", type=_positive_int, default=argparse.SUPPRESS)

    shared(sub.add_parser("commutator", help="lucky-accident certificate"))
    sub.choices["commutator"].add_argument("--k", type=_positive_int, default=argparse.SUPPRESS)

    pe = shared(sub.add_parser("entropy", help="entropy report for a function"))
    pe.add_argument("--fn", default=argparse.SUPPRESS, help="chi_B | gaussian:a | gaussian_poly:c0,c1,..:a | legendre_mode:n | random")
    pe.add_argument("--corpus", type=int, default=argparse.SUPPRESS, help="also run this many random corpus functions")
    pe.add_argument("--radius", type=float, default=argparse.SUPPRESS, help="space radius (general-radius relation)")
    pe.add_argument("--band-radius", dest="band_radius", type=float, default=argparse.SUPPRESS)
    pe.add_argument("--normalized", action="store_true", default=argparse.SUPPRESS,
                    help="add per-unit-norm columns")

    pw = shared(sub.add_parser("wave", help="wave-packet entropy from Cauchy data"))
    pw.add_argument("--f", dest="fn", default=argparse.SUPPRESS, help="field datum")
    pw.add_argument("--g", dest="g_fn", default=argparse.SUPPRESS, help="momentum datum")

    pm = shared(sub.add_parser("modular", help="seeded standard-subspace suite"))
    pm.add_argument("--n", type=_positive_int, default=argparse.SUPPRESS, help="complex dimension")
    pm.add_argument("--seeds", type=_positive_int, default=argparse.SUPPRESS, help="number of seeded instances")
    pm.add_argument("--vectors", type=_positive_int, default=argparse.SUPPRESS, help="entropy sample vectors")

    pd = shared(sub.add_parser("duality", help="field/momentum duality block suite"))
    pd.add_argument("--n", type=_positive_int, default=argparse.SUPPRESS)
    pd.add_argument("--seeds", type=_positive_int, default=argparse.SUPPRESS)
    pd.add_argument("--mu", default=argparse.SUPPRESS, help="identity | wave | random-spd")

    ps = shared(sub.add_parser("sweep", help="grid sweep of another command"))
    ps.add_argument("--command", dest="base_command", required=True,
                    choices=("pswf", "spectrum", "commutator", "entropy", "wave"))
    ps.add_argument("--range", dest="ranges", action="append", default=[],
                    help="axis=v1,v2,... or axis=a..b (at most two)")
    ps.add_argument("--k", type=_positive_int, default=argparse.SUPPRESS)
    ps.add_argument("--fn", default=argparse.SUPPRESS)
    ps.add_argument("--g", dest="g_fn", default=argparse.SUPPRESS)
    return parser


def _read_config_file(path: str) -> dict:
    values = {}
    try:
        fh = open(path, "r", encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"cannot read config file {path}: {exc}") from exc
    with fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValidationError(f"config line without '=': {raw.strip()!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            values[key.replace("-", "_")] = value
    return values


def _coerce(key: str, value):
    if isinstance(value, str) and key in DEFAULTS and not isinstance(DEFAULTS[key], (str, bool)):
        caster = type(DEFAULTS[key])
        try:
            return caster(value)
        except ValueError as exc:
            raise ValidationError(f"config value for {key} is not a {caster.__name__}: {value!r}") from exc
    if isinstance(value, str) and key in DEFAULTS and isinstance(DEFAULTS[key], bool):
        return value.strip().lower() in ("1", "true", "yes")
    return value


def resolve_config(args: argparse.Namespace) -> dict:
    """Precedence: CLI flags > config file > defaults."""
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        for key, value in _read_config_file(args.config).items():
            cfg[key] = _coerce(key, value)
    skip = {"command", "config", "format", "output", "plot", "plot_dir", "ranges", "base_command"}
    for key, value in vars(args).items():
        if key not in skip:
            cfg[key] = value
    cfg["command"] = args.command
    if args.command == "sweep":
        cfg["base_command"] = args.base_command
        cfg["ranges"] = list(args.ranges)
    _validate_limits(cfg)
    return cfg


def _validate_limits(cfg: dict):
    for key, cap in LIMITS.items():
        if key in cfg and cfg[key] is not None and cfg[key] > cap:
            raise ParameterError(f"{key}={cfg[key]} exceeds the supported limit {cap}")
    for key in ("basis", "quad"):
        if cfg.get(key, 1) < 1:
            raise ParameterError(f"{key} must be positive")


def parse_function(spec: str, d: int, ell: int, seed: int) -> ent.BallFunction:
    name, _, rest = spec.partition(":")
    if name == "chi_B":
        return ent.chi_ball(d)
    if name == "zero":
        return ent.zero_function(d)
    if name == "gaussian":
        return ent.gaussian(d, float(rest or 1.0))
    if name == "gaussian_poly":
        coeffs, _, a = rest.rpartition(":")
        if not coeffs:
            raise ParameterError("gaussian_poly needs gaussian_poly:c0,c1,..:a")
        return ent.gaussian_poly(d, [float(c) for c in coeffs.split(",")], float(a))
    if name == "legendre_mode":
        return ent.legendre_mode(int(rest or 0))
    if name == "random":
        rng = np.random.default_rng((seed, d, ell))
        sector = sec.SpectralSector(d, ell, 1.0)
        return ent.sector_function(sector, rng.standard_normal(int(rest or 8)))
    raise ParameterError(f"unknown function tag {spec!r}")


# ---------------------------------------------------------------------------
# Command handlers: cfg -> (records, rows, failures)
# ---------------------------------------------------------------------------


def _run_pswf(cfg):
    pm = p1.assemble_prolate_matrix(cfg["c"], cfg["basis"])
    eig = p1.prolate_eigenpairs(pm, min(cfg["k"], cfg["basis"]))
    lams = p1.concentration_lambdas(pm, eig)
    rows = [
        {
            "k": k,
            "parity": int(eig.parities[k]),
            "alpha": float(eig.eigenvalues[k]),
            "lam": float(lams[k]),
            "trusted": bool(eig.trusted[k]),
            "tail_mass": float(eig.tail_mass[k]),
        }
        for k in range(len(eig.eigenvalues))
    ]
    record = {
        "c": pm.c,
        "N": pm.N,
        "eigenpairs": rows,
        "truncation_warning": eig.truncation_warning,
    }
    if cfg.get("grid"):
        grid = np.linspace(-1.0, 1.0, cfg["grid"])
        samples = p1.eigenfunction_samples(eig, grid)
        record["grid"] = grid
        record["values"] = samples.T
    return [record], rows, []


def _spectrum_rows(forms, k_max):
    spec_w, _ = sec.sector_eigenpairs(forms, "W")
    spec_l, _ = sec.sector_eigenpairs(forms, "L")
    k_max = min(k_max, forms.N)
    rows = [
        {"k": k, "alpha_w": float(spec_w.eigenvalues[k]), "alpha_l": float(spec_l.eigenvalues[k])}
        for k in range(k_max)
    ]
    identity_dev = float(
        np.max(np.abs(forms.W_form - forms.L_form - forms.sector.c**2 * (forms.mass - forms.M_form)))
    )
    record = {
        "d": forms.sector.d,
        "l": forms.sector.ell,
        "c": forms.sector.c,
        "N": forms.N,
        "w_eigenvalues": [r["alpha_w"] for r in rows],
        "l_eigenvalues": [r["alpha_l"] for r in rows],
        "min_w_eigenvalue": float(spec_w.eigenvalues[0]),
        "min_l_eigenvalue": float(spec_l.eigenvalues[0]),
        "form_identity_deviation": identity_dev,
        "mass_identity_deviation": float(np.max(np.abs(forms.mass - np.eye(forms.N)))),
    }
    return record, rows


def _run_spectrum(cfg):
    sector = sec.SpectralSector(cfg["d"], cfg["l"], cfg["c"])
    forms = sec.assemble_radial_forms(sector, cfg["basis"])
    record, rows = _spectrum_rows(forms, cfg["k"])
    failures = []
    norm = float(np.linalg.norm(forms.W_form, 2))
    if record["min_w_eigenvalue"] < -1e-10 * norm or record["min_l_eigenvalue"] < -1e-10 * norm:
        failures.append("sector_positivity")
    return [record], rows, failures


def _run_commutator(cfg):
    d, c = cfg["d"], cfg["c"]
    failures = []
    if d == 1:
        pm = p1.assemble_prolate_matrix(c, cfg["basis"])
        op = p1.angle_operator_nystrom(c, cfg["quad"])
        rep = p1.commutation_certificate(pm, op, k_max=cfg["k"])
        rows = [
            {
                "k": int(rep.ks[i]),
                "parity": int(rep.parities[i]),
                "alpha": float(rep.alphas[i]),
                "lam": float(rep.lambdas[i]),
                "lam_rayleigh": float(rep.lambdas_rayleigh[i]),
                "residual": float(rep.residuals[i]),
            }
            for i in range(len(rep.ks))
        ]
        record = {
            "d": 1,
            "c": c,
            "N": rep.N,
            "n_quad": rep.n_quad,
            "alignment_residuals": [r["residual"] for r in rows],
            "lambda": [r["lam"] for r in rows],
            "ordering_ok": bool(rep.ordering_ok_even and rep.ordering_ok_odd),
            "ordering_ok_even": rep.ordering_ok_even,
            "ordering_ok_odd": rep.ordering_ok_odd,
            "merged_ordering_observed": rep.merged_ordering_observed,
            "lambda_agreement": rep.lambda_agreement,
        }
        if rep.max_residual > TOL_ALIGNMENT_1D:
            failures.append("alignment_residual")
        if not (rep.ordering_ok_even and rep.ordering_ok_odd):
            failures.append("ordering")
    elif d == 3:
        sector = sec.SpectralSector(d, cfg["l"], c)
        forms = sec.assemble_radial_forms(sector, cfg["basis"])
        hankel = sec.sector_hankel_nystrom(sector, cfg["quad"])
        rep = sec.nd_commutation_certificate(forms, hankel, k_max=cfg["k"])
        rows = [
            {
                "k": int(rep.ks[i]),
                "alpha": float(rep.alphas[i]),
                "lam": float(rep.lambdas[i]),
                "residual": float(rep.residuals[i]),
                "resolvable": bool(rep.resolvable[i]),
            }
            for i in range(len(rep.ks))
        ]
        record = {
            "d": d,
            "l": cfg["l"],
            "c": c,
            "N": rep.N,
            "n_quad": rep.n_quad,
            "alignment_residuals": [r["residual"] for r in rows],
            "lambda": [r["lam"] for r in rows],
            "ordering_ok": rep.ordering_observed,
            "resolvable_count": int(np.sum(rep.resolvable)),
        }
        if rep.max_residual > TOL_ALIGNMENT_3D:
            failures.append("alignment_residual")
    else:
        raise UnsupportedError(
            f"Fourier-side certificates require d in {{1, 3}} (got d={d}): sector "
            "kernels for other dimensions need integer-order Bessel J and are deferred"
        )
    return [record], rows, failures


def _entropy_row(report, normalized: bool):
    row = {
        "function": report.description,
        "d": report.d,
        "born": report.born,
        "parabolic": report.parabolic,
        "legendre": report.legendre,
        "prolate": report.prolate,
        "balance_residual": report.balance_residual,
    }
    if normalized:
        row.update({f"{k}_normalized": v for k, v in report.normalized().items()})
    return row


def _run_entropy(cfg):
    failures = []
    functions = [parse_function(cfg["fn"], cfg["d"], cfg["l"], cfg["seed"])]
    if cfg.get("corpus"):
        functions.extend(ent.entropy_corpus(cfg["seed"], cfg["corpus"]))
    general = cfg.get("radius", 1.0) != 1.0 or cfg.get("band_radius", 1.0) != 1.0
    rows, records = [], []
    for f in functions:
        if general:
            rep = ent.general_radius_report(f, cfg["radius"], cfg["band_radius"], cfg["quad"])
            row = {
                "function": rep.description,
                "d": rep.d,
                "radius": rep.radius,
                "band_radius": rep.band_radius,
                "prolate": rep.prolate,
                "parabolic_scaled": rep.parabolic_scaled,
                "legendre": rep.legendre,
                "born_scaled": rep.born_scaled,
                "residual": rep.residual,
            }
            if not rep.ok:
                failures.append(f"general_radius_identity[{rep.description}]")
            rows.append(row)
            records.append(row)
        else:
            rep = ent.entropy_report(f, cfg["quad"])
            if not rep.balance_ok:
                failures.append(f"balance_identity[{rep.description}]")
            row = _entropy_row(rep, cfg.get("normalized", False))
            rows.append(row)
            records.append(row)
    return records, rows, failures


def _run_wave(cfg):
    f = parse_function(cfg["fn"], cfg["d"], cfg["l"], cfg["seed"])
    g = parse_function(cfg["g_fn"], cfg["d"], cfg["l"], cfg["seed"] + 1)
    rep = ent.wave_entropy(ent.CauchyData(f, g, cfg["d"]), cfg["quad"])
    failures = []
    if rep.cross_residual > TOL_WAVE_CROSS * max(abs(rep.entropy), 1.0):
        failures.append("wave_cross_form")
    if rep.lower_bound_slack < -1e-9:
        failures.append("wave_lower_bound")
    record = {
        "d": rep.d,
        "description": rep.description,
        "entropy": rep.entropy,
        "legendre_term": rep.legendre_term,
        "parabolic_term": rep.parabolic_term,
        "lower_order_term": rep.lower_order_term,
        "cross_form": rep.cross_form,
        "cross_residual": rep.cross_residual,
        "lower_bound": rep.lower_bound,
        "lower_bound_slack": rep.lower_bound_slack,
        "momentum_projected": rep.momentum_projected,
    }
    return [record], [record], failures


def _run_modular(cfg):
    failures = []
    rows = []
    for seed in range(cfg["seeds"]):
        rec = mod.modular_suite_record(cfg["n"], seed, cfg["vectors"])
        rows.append(rec)
        for key in ("j_squared", "jdj_vs_inverse", "flow_invariance", "cutting_agreement"):
            if rec[key] > TOL_MODULAR:
                failures.append(f"{key}[seed={seed}]")
        if rec["entropy_min"] < -1e-9:
            failures.append(f"entropy_positivity[seed={seed}]")
    summary = {
        "n": cfg["n"],
        "seeds": cfg["seeds"],
        "vectors": cfg["vectors"],
        "max_identity_residual": max(
            max(r["j_squared"], r["jdj_vs_inverse"], r["flow_invariance"]) for r in rows
        ),
        "max_cutting_agreement": max(r["cutting_agreement"] for r in rows),
        "min_entropy": min(r["entropy_min"] for r in rows),
        "instances": rows,
    }
    return [summary], rows, failures


def _duality_mu(cfg) -> np.ndarray:
    n = cfg["n"]
    kind = cfg["mu"]
    if kind == "identity":
        return np.eye(n)
    if kind == "wave":
        return mod.wave_duality_mu(n)
    if kind == "random-spd":
        rng = np.random.default_rng((cfg["seed"], n, 2))
        a = rng.standard_normal((n, n))
        return a @ a.T + n * np.eye(n)
    raise ParameterError(f"unknown mu kind {kind!r}")


def _run_duality(cfg):
    failures = []
    rows = []
    mu = _duality_mu(cfg)
    for seed in range(cfg["seeds"]):
        rec = mod.duality_suite_record(mu, seed)
        rows.append(rec)
        for key in ("logdelta_offdiag_mass", "conjugation_offdiag_mass", "a_diag_mass"):
            if rec[key] > TOL_DUALITY_MASS:
                failures.append(f"{key}[seed={seed}]")
        for key in ("adjoint_residual", "mu_relation_residual", "entropy_cross_residual"):
            if rec[key] is not None and rec[key] > TOL_DUALITY_RELATION:
                failures.append(f"{key}[seed={seed}]")
    summary = {
        "n": cfg["n"],
        "mu": cfg["mu"],
        "seeds": cfg["seeds"],
        "instances": rows,
    }
    return [summary], rows, failures


def _parse_range(text: str):
    if "=" not in text:
        raise ParameterError(f"range must be axis=values, got {text!r}")
    axis, _, body = text.partition("=")
    axis = axis.strip()
    if axis not in ("c", "l", "d", "basis", "quad", "seed", "k"):
        raise ParameterError(f"unsupported sweep axis {axis!r}")
    body = body.strip()
    if not body:
        return axis, []
    if ".." in body:
        lo, hi = body.split("..", 1)
        return axis, list(range(int(lo), int(hi) + 1))
    caster = float if axis == "c" else int
    return axis, [caster(part) for part in body.split(",")]


def _run_sweep(cfg):
    handler = HANDLERS[cfg["base_command"]]
    axes = [_parse_range(r) for r in cfg.get("ranges", [])]
    if len(axes) > 2:
        raise ParameterError(f"at most two ranged axes, got {len(axes)}")
    points = [{}]
    for axis, values in axes:
        points = [dict(p, **{axis: v}) for p in points for v in values]
    if not axes or any(not values for _, values in axes):
        points = []
    if len(points) > 10_000:
        raise ParameterError(f"sweep grid has {len(points)} points (limit 10000)")

    def run_point(point):
        local = dict(cfg)
        local.update(point)
        _validate_limits(local)
        records, rows, fails = handler(local)
        for row in rows:
            row.update(point)
        for rec in records:
            rec["point"] = dict(point)
        return records, rows, [f"{name}@{point}" for name in fails]

    workers = int(os.environ.get(WORKERS_ENV, os.cpu_count() or 1))
    if points:
        with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
            results = list(pool.map(run_point, points))
    else:
        results = []
    records, rows, failures = [], [], []
    for recs, rws, fails in results:
        records.extend(recs)
        rows.extend(rws)
        failures.extend(fails)
    return records, rows, failures


HANDLERS = {
    "pswf": _run_pswf,
    "spectrum": _run_spectrum,
    "commutator": _run_commutator,
    "entropy": _run_entropy,
    "wave": _run_wave,
    "modular": _run_modular,
    "duality": _run_duality,
    "sweep": _run_sweep,
}


def _figure_destination(cfg_output: str, plot_dir: str | None):
    if plot_dir:
        outdir = plot_dir
    elif cfg_output not in (None, "-"):
        outdir = os.path.dirname(os.path.abspath(cfg_output))
    else:
        outdir = os.getcwd()
    if cfg_output not in (None, "-"):
        stem = os.path.splitext(os.path.basename(cfg_output))[0]
    else:
        stem = "prolatekit"
    return outdir, stem


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args)
        records, rows, failures = HANDLERS[args.command](cfg)
    except (ParameterError, ValidationError, DataError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except UnsupportedError as exc:
        print(f"unsupported: {exc}", file=sys.stderr)
        return 4
    except (ToleranceFailure, ConditioningError, DegenerateSpectrumError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    doc = build_document(args.command, cfg, records)
    if failures:
        doc["tolerance_failures"] = sorted(failures)
    text = render_json(doc) if args.format == "json" else render_csv(jsonable(rows))
    write_text(text, args.output)
    if args.plot:
        from .plots import render_figures

        outdir, stem = _figure_destination(args.output, args.plot_dir)
        written = render_figures(doc, jsonable(rows), outdir, stem)
        for path in written:
            print(f"figure: {path}", file=sys.stderr)
    if failures:
        print(
            "tolerance failure in: " + ", ".join(sorted(failures)),
            file=sys.stderr,
        )
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
