"""Command-line front end: ``zzi <subcommand> [options]``.

Every run writes one primary table (CSV, or JSON with ``--format json``) and,
when ``--out`` is given, a JSON provenance sidecar next to it.  Without
``--out`` the table goes to stdout.

Exit codes: 0 success, 1 usage, 2 domain error, 3 numeric non-convergence,
4 consistency failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .core.angles import AngleSequence, theta_from_x
from .errors import ConsistencyError, DomainError, IsingError, NumericError

SCHEMA = 1
EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_NUMERIC, EXIT_CONSISTENCY = 0, 1, 2, 3, 4
SUBCOMMANDS = ("magnetization", "homogeneous", "critical-chain", "exact-critical", "wetting",
               "ids", "sembedding", "oracle", "crosscheck")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: error: {message}")

    def exit(self, status=0, message=None):
        if message:
            sys.stderr.write(message)
        raise SystemExit(status)


# ----------------------------------------------------------------- config

@dataclass(frozen=True)
class RunConfig:
    """Parsed invocation in canonical form.

    ``params`` holds the subcommand-specific options with defaults filled in;
    ``angles`` is the canonical form of the angle source (or None).
    """

    subcommand: str
    angles: dict | None = None
    params: dict = field(default_factory=dict)
    tol: float | None = None
    truncation: int | None = None
    fmt: str = "csv"
    out: str | None = None

    def canonical(self) -> dict:
        return {
            "subcommand": self.subcommand,
            "angles": self.angles,
            "params": {k: self.params[k] for k in sorted(self.params)},
            "tol": self.tol,
            "truncation": self.truncation,
            "format": self.fmt,
            "out": self.out,
        }

    @classmethod
    def from_canonical(cls, data: dict) -> "RunConfig":
        return cls(data["subcommand"], data["angles"], dict(data["params"]), data["tol"],
                   data["truncation"], data["format"], data["out"])

    def dumps(self) -> str:
        return json.dumps(self.canonical(), sort_keys=True)


def _floats(text: str) -> list[float]:
    parts = [p for p in text.replace(",", " ").split() if p]
    try:
        return [float(p) for p in parts]
    except ValueError as exc:
        raise UsageError(f"cannot parse numbers from {text!r}") from exc


def _read_angle_file(path: str) -> list[float]:
    vals = []
    for line in Path(path).read_text().splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            vals.extend(_floats(line))
    if not vals:
        raise UsageError(f"no angles in {path}")
    return vals


def _conv(values, use_x: bool):
    vals = [float(v) for v in values]
    return [float(theta_from_x(v)) for v in vals] if use_x else vals


def _angle_source(args) -> AngleSequence | None:
    """Build the angle sequence from whichever source flag was given."""
    ux = getattr(args, "x", False)
    if getattr(args, "theta_const", None) is not None:
        return AngleSequence.homogeneous(_conv([args.theta_const], ux)[0])
    if getattr(args, "thetas", None) is not None:
        tail = None if args.tail is None else _conv([args.tail], ux)[0]
        return AngleSequence.explicit(_conv(_floats(args.thetas), ux), tail)
    if getattr(args, "theta_file", None) is not None:
        tail = None if args.tail is None else _conv([args.tail], ux)[0]
        return AngleSequence.explicit(_conv(_read_angle_file(args.theta_file), ux), tail)
    if getattr(args, "block", None) is not None and args.command in ("magnetization", "oracle"):
        return AngleSequence.periodic(_conv(_floats(args.block), ux))
    return None


def _add_angle_source(p, required=True):
    g = p.add_mutually_exclusive_group(required=required)
    g.add_argument("--theta-const", type=float, help="homogeneous angle")
    g.add_argument("--thetas", help="explicit comma-separated theta_1, theta_2, ...")
    g.add_argument("--theta-file", help="file with one or more angles per line")
    g.add_argument("--block", help="periodic block theta_1..theta_2n")
    p.add_argument("--tail", type=float, help="homogeneous continuation of an explicit list")
    p.add_argument("--x", action="store_true",
                   help="read every angle as an edge weight x = tan(theta/2)")


def _add_common(p):
    p.add_argument("--out", help="output path stem (writes <out>.csv and <out>.json)")
    p.add_argument("--format", choices=("csv", "json"), default="csv", dest="fmt")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="zzi", description="Layered zig-zag Ising magnetization toolkit.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("magnetization", help="M_m of a layered half-plane")
    _add_angle_source(p)
    p.add_argument("--m-max", type=int, default=4)
    p.add_argument("--m-min", type=int, default=1)
    p.add_argument("--method", choices=("sqrt", "hankel", "polar", "all"), default="sqrt")
    p.add_argument("--tol", type=float, default=1e-8)
    p.add_argument("--N", type=int, help="fixed truncation (disables adaptive doubling)")
    _add_common(p)

    p = sub.add_parser("homogeneous", help="OPUC products and closed forms below criticality")
    p.add_argument("--theta-h", type=float, required=True)
    p.add_argument("--theta-v", type=float, required=True)
    p.add_argument("--m-max", type=int, default=200)
    p.add_argument("--x", action="store_true")
    _add_common(p)

    p = sub.add_parser("critical-chain", help="critical D_n, L_n chains on the real line")
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--n-max", type=int, default=30)
    p.add_argument("--x", action="store_true")
    _add_common(p)

    p = sub.add_parser("exact-critical", help="closed-form critical diagonal correlations")
    p.add_argument("--n-max", type=int, default=10)
    _add_common(p)

    p = sub.add_parser("wetting", help="boundary-field magnetization")
    p.add_argument("--q", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--theta", type=float)
    p.add_argument("--theta1", type=float)
    p.add_argument("--m-max", type=int, default=4)
    p.add_argument("--no-check", action="store_true", help="skip the layered-engine certification")
    p.add_argument("--tol", type=float, default=1e-5)
    _add_common(p)

    p = sub.add_parser("ids", help="integrated density of states of a critical periodic block")
    p.add_argument("--block", required=True)
    p.add_argument("--periods", type=int, default=512)
    p.add_argument("--lam-max", type=float, default=0.05)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--x", action="store_true")
    _add_common(p)

    p = sub.add_parser("sembedding", help="periodic s-embedding of a critical block")
    p.add_argument("--block", required=True)
    p.add_argument("--columns", type=int)
    p.add_argument("--svg", action="store_true", help="also write <out>.svg")
    p.add_argument("--x", action="store_true")
    _add_common(p)

    p = sub.add_parser("oracle", help="finite-strip transfer-matrix convergence table")
    _add_angle_source(p)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--H", default="6,8,10,12", help="comma-separated strip heights")
    p.add_argument("--W", type=int, default=20)
    _add_common(p)

    p = sub.add_parser("crosscheck", help="cross-engine agreement suites")
    p.add_argument("--suite", choices=("methods", "wetting", "exact", "oracle"), required=True)
    p.add_argument("--q", type=float, default=0.5)
    p.add_argument("--r", type=float, default=0.3)
    p.add_argument("--theta", type=float, default=math.pi / 6)
    p.add_argument("--m-max", type=int, default=4)
    p.add_argument("--tol", type=float, default=1e-5)
    _add_common(p)
    return ap


_SKIP = {"command", "out", "fmt", "tol", "N", "theta_const", "thetas", "theta_file", "tail"}


def config_from_args(args) -> RunConfig:
    angles = _angle_source(args)
    params = {k: v for k, v in sorted(vars(args).items()) if k not in _SKIP and v is not None}
    if args.command in ("magnetization", "oracle"):
        params.pop("block", None)
        params.pop("x", None)
    return RunConfig(args.command, None if angles is None else angles.canonical(), params,
                     getattr(args, "tol", None), getattr(args, "N", None), args.fmt, args.out)


# ------------------------------------------------------------- outputs

@dataclass
class Table:
    columns: list
    rows: list
    diagnostics: dict = field(default_factory=dict)
    status: int = EXIT_OK
    svg: str | None = None


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return "" if v is None else str(v)


def to_csv(table: Table) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for row in table.rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, dict):
        return {str(k): _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else repr(v)
    return v


def provenance(cfg: RunConfig, table: Table) -> dict:
    return {
        "schema": SCHEMA,
        "package": "zigzag_ising",
        "version": __version__,
        "config": cfg.canonical(),
        "diagnostics": _jsonable(table.diagnostics),
        "status": table.status,
    }


def write_outputs(cfg: RunConfig, table: Table, stdout=None) -> None:
    stdout = sys.stdout if stdout is None else stdout
    prov = provenance(cfg, table)
    if cfg.fmt == "json":
        doc = dict(prov, columns=table.columns, rows=_jsonable(table.rows))
        text = json.dumps(doc, sort_keys=True, indent=1) + "\n"
        if cfg.out is None:
            stdout.write(text)
        else:
            Path(cfg.out + ".json").write_text(text)
    else:
        text = to_csv(table)
        if cfg.out is None:
            stdout.write(text)
        else:
            Path(cfg.out + ".csv").write_text(text)
            Path(cfg.out + ".json").write_text(json.dumps(prov, sort_keys=True, indent=1) + "\n")
    if table.svg is not None and cfg.out is not None:
        Path(cfg.out + ".svg").write_text(table.svg)


# ----------------------------------------------------------- commands

def _cmd_magnetization(args, angles) -> Table:
    from .layered import magnetization, magnetization_at

    if args.m_min < 1 or args.m_max < args.m_min:
        raise DomainError("need 1 <= m-min <= m-max")
    methods = ("sqrt", "hankel", "polar") if args.method == "all" else (args.method,)
    rows, spread = [], {}
    for m in range(args.m_min, args.m_max + 1):
        vals = {}
        for meth in methods:
            if args.N is not None:
                vals[meth] = (magnetization_at(angles, m, args.N, meth), args.N, None)
            else:
                rep = magnetization(angles, m, meth, tol=args.tol)
                vals[meth] = (rep.value, rep.N, rep.error)
        v = [vals[k][0] for k in methods]
        spread[m] = max(v) - min(v)
        for meth in methods:
            rows.append([m, vals[meth][0], meth, vals[meth][1], vals[meth][2]])
    return Table(["m", "M", "method", "N", "error"], rows,
                 {"method_spread": spread, "max_method_spread": max(spread.values())})


def _cmd_homogeneous(args) -> Table:
    from . import homogeneous as H

    th, tv = (_conv([args.theta_h, args.theta_v], args.x))
    prod = H.subcritical_product(th, tv, args.m_max)
    szego = H.szego_partial_products(th, tv, args.m_max)
    cw = H.CircleWeight(th, tv)
    target = cw.C ** -2 * H.szego_G(th, tv) ** 2
    rows = [[m, prod.values[m], szego[m]] for m in range(args.m_max + 1)]
    koy = H.koy_magnetization(th, tv)
    diag = {
        "koy_magnetization": koy,
        "koy_fourth_power": koy**4,
        "product_limit": prod.limit,
        "product_error": abs(prod.limit - koy**4),
        "szego_target": target,
        "szego_error": abs(szego[-1] - target),
        "G": H.szego_G(th, tv),
        "G_trig": H.szego_G_trig(th, tv),
        "G_series": H.szego_G_series(th, tv),
        "energy_density": H.energy_density(th, tv),
    }
    return Table(["m", "D2_minus_Dstar2", "szego_partial"], rows, diag)


def _cmd_critical_chain(args) -> Table:
    from . import critical as C

    theta = _conv([args.theta], args.x)[0]
    ch = C.critical_correlations(theta, args.n_max)
    qc = C.quadratic_chain(theta, args.n_max)
    rows = [[n, ch.D[n], ch.L[n], qc.D[n]] for n in range(args.n_max + 1)]
    agree = float(np.max(np.abs(ch.D - qc.D) / ch.D))
    diag = {"chain_agreement": agree, "c_sigma": C.c_sigma()}
    if args.n_max >= 10:
        diag["mccoy_wu_ratio"] = C.mccoy_wu_check(theta, args.n_max, ch)
    return Table(["n", "D", "L", "D_quadratic"], rows, diag)


def _cmd_exact(args) -> Table:
    from . import exact as E

    if args.n_max < 1:
        raise DomainError("n-max must be >= 1")
    rows = [[n, E.wu_diagonal(n), E.zigzag_magnetization_exact(n), str(E.wu_rational(n)) if n <= 12 else None]
            for n in range(1, args.n_max + 1)]
    return Table(["n", "D", "M", "D_rational_factor"], rows,
                 {"note": "D_rational_factor is the rational R_n with D_n = (2/pi)^n R_n"})


def _wetting_model(args):
    from .wetting import WettingModel

    if args.q is not None and args.r is not None:
        return WettingModel.from_qr(args.q, args.r)
    if getattr(args, "theta", None) is not None and getattr(args, "theta1", None) is not None:
        return WettingModel(args.theta, args.theta1)
    raise UsageError("wetting needs either --q and --r or --theta and --theta1")


def _cmd_wetting(args) -> Table:
    from .wetting import wetting_coefficients, wetting_magnetization

    model = _wetting_model(args)
    rows = []
    for m in range(1, args.m_max + 1):
        res = wetting_magnetization(model, m, check=not args.no_check, tol=args.tol)
        rows.append([m, res.value, res.variant, res.reference, res.mismatch])
    bank = wetting_coefficients(model, 2 * args.m_max)
    diag = {"model": model.canonical(), "bound_state": model.bound_state,
            "gamma_max_abs": float(np.max(np.abs(bank.gamma))), "beta_imag": bank.beta_imag}
    return Table(["m", "M", "variant", "reference", "variant_mismatch"], rows, diag)


def _cmd_ids(args) -> Table:
    from .layered import cj_constant, ids_empirical

    block = _conv(_floats(args.block), args.x)
    res = ids_empirical(block, args.periods, lam_max=args.lam_max, points=args.points)
    cj = cj_constant(block)
    rows = [[g, v] for g, v in zip(res.grid, res.ids)]
    return Table(["lambda", "ids"], rows,
                 {"slope": res.slope, "cj": cj, "relative_error": abs(res.slope / cj - 1),
                  "fit_max": res.fit_max, "size": res.size})


def _cmd_sembedding(args) -> Table:
    from .sembedding import embed, period_width_forms, width_vs_cj

    block = _conv(_floats(args.block), args.x)
    emb = embed(block, args.columns)
    forms = period_width_forms(block)
    B, nC = width_vs_cj(block)
    rows = [list(p) for p in emb.points()]
    diag = {"B_coordinate": forms.coordinate, "B_half_sum": forms.half_sum,
            "B_geometric": forms.geometric, "n_CJ": nC, "B_minus_nCJ": B - nC,
            "quad_residual": emb.quad_residuals(), "interleaved": emb.interleaved()}
    return Table(["k", "kind", "x", "phi"], rows, diag, svg=emb.to_svg() if args.svg else None)


def _cmd_oracle(args, angles) -> Table:
    from .layered import magnetization
    from .oracle import convergence_table, is_monotone

    Hs = [int(h) for h in _floats(args.H)]
    thetas = angles.take(args.W)[1:]
    ref = magnetization(angles, args.m).value
    tab = convergence_table(thetas, args.m, Hs, args.W, ref)
    rows = [[r.H, r.W, r.value, r.error] for r in tab]
    return Table(["H", "W", "value", "error"], rows,
                 {"reference": ref, "monotone": is_monotone(tab)})


def _cmd_crosscheck(args) -> Table:
    tol = args.tol
    rows, worst = [], 0.0
    if args.suite == "wetting":
        from .wetting import wetting_magnetization

        model = _wetting_model(args)
        for m in range(1, args.m_max + 1):
            res = wetting_magnetization(model, m, check=True, tol=tol)
            d = abs(res.value - res.reference)
            worst = max(worst, d)
            rows.append([m, res.value, res.reference, d, d <= tol])
        cols = ["m", "determinant", "layered", "abs_diff", "pass"]
    elif args.suite == "methods":
        from .layered import magnetization

        ang = AngleSequence.homogeneous(args.theta)
        for m in range(1, args.m_max + 1):
            v = [magnetization(ang, m, meth).value for meth in ("sqrt", "hankel", "polar")]
            d = max(v) - min(v)
            worst = max(worst, d)
            rows.append([m, *v, d, d <= tol])
        cols = ["m", "sqrt", "hankel", "polar", "spread", "pass"]
    elif args.suite == "exact":
        from .exact import zigzag_magnetization_exact
        from .layered import magnetization

        ang = AngleSequence.homogeneous(math.pi / 4)
        for m in range(1, args.m_max + 1):
            a, b = magnetization(ang, m).value, zigzag_magnetization_exact(m)
            worst = max(worst, abs(a - b))
            rows.append([m, a, b, abs(a - b), abs(a - b) <= tol])
        cols = ["m", "layered", "closed_form", "abs_diff", "pass"]
    else:
        from .layered import magnetization
        from .oracle import StripSpec, transfer_matrix_magnetization

        ang = AngleSequence.homogeneous(args.theta)
        for m in range(1, args.m_max + 1):
            a = magnetization(ang, m).value
            b = transfer_matrix_magnetization(StripSpec.homogeneous(args.theta, 2 * m + 18, 12), 2 * m)
            worst = max(worst, abs(a - b))
            rows.append([m, a, b, abs(a - b), abs(a - b) <= tol])
        cols = ["m", "layered", "strip", "abs_diff", "pass"]
    status = EXIT_OK if worst <= tol else EXIT_CONSISTENCY
    return Table(cols, rows, {"suite": args.suite, "worst": worst, "tol": tol}, status)


def _apply_threads():
    raw = os.environ.get("ZZI_THREADS")
    if raw is None or raw == "":
        return
    try:
        n = int(raw)
    except ValueError as exc:
        raise UsageError(f"ZZI_THREADS must be an integer, got {raw!r}") from exc
    if n < 1:
        raise UsageError("ZZI_THREADS must be >= 1")
    import numba

    numba.set_num_threads(min(n, numba.config.NUMBA_NUM_THREADS))


def dispatch(args) -> Table:
    angles = _angle_source(args)
    cmd = args.command
    if cmd == "magnetization":
        return _cmd_magnetization(args, angles)
    if cmd == "homogeneous":
        return _cmd_homogeneous(args)
    if cmd == "critical-chain":
        return _cmd_critical_chain(args)
    if cmd == "exact-critical":
        return _cmd_exact(args)
    if cmd == "wetting":
        return _cmd_wetting(args)
    if cmd == "ids":
        return _cmd_ids(args)
    if cmd == "sembedding":
        return _cmd_sembedding(args)
    if cmd == "oracle":
        return _cmd_oracle(args, angles)
    return _cmd_crosscheck(args)


def run(argv=None, stdout=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        _apply_threads()
        cfg = config_from_args(args)
        table = dispatch(args)
        write_outputs(cfg, table, stdout)
        return table.status
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except ConsistencyError as exc:
        print(f"consistency error: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DomainError, IsingError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)


def main(argv=None) -> int:
    return run(argv)


if __name__ == "__main__":
    raise SystemExit(main())
