"""Command-line driver.

Exit status: 0 success, 1 invalid configuration, 2 internal failure.
Output is assembled completely before anything is written.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
import warnings
from fractions import Fraction

from . import kernel
from .abelian import (
    Character,
    GroupRingElement,
    in_A_hatG,
    make_group,
    orbit_table,
    stickelberger_pairing,
    stickelberger_theta,
)
from .counting import FiberPartition, assemble_N, kappa_all, kappa_full, kappa_omit
from .dirichlet import (
    check_comp1_bound,
    equidistribution_verdict,
    pole_data,
    predict,
    tauberian_predict,
)
from .errors import ConfigError, TameCountError
from .fideals import LambdaAlgebra, enumerate_F, ideal_class, parse_weight, weight_disc

CSV_COLUMNS = ("class_label", "X", "count", "predicted", "ratio")
DEFAULT_SCHEDULE = (10**3, 10**4, 10**5, 10**6, 10**7)
CONFIG_KEYS = {
    "group", "weight", "modulus", "X", "schedule", "fibers", "kpsi", "kf",
    "format", "pmax", "threads", "allow_modulus", "variant",
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


# parsing helpers ---------------------------------------------------------------


def parse_int(text) -> int:
    text = str(text).strip().replace("_", "")
    try:
        return int(text)
    except ValueError:
        pass
    try:
        val = Fraction(text) if "e" not in text.lower() else Fraction(float(text))
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"not an integer: {text!r}") from None
    if val.denominator != 1:
        raise ConfigError(f"not an integer: {text!r}")
    return int(val)


def parse_group(text: str) -> list[int]:
    parts = [p for p in str(text).replace("x", ",").replace("*", ",").replace(" ", ",").split(",") if p]
    if not parts:
        raise ConfigError("empty group")
    return [parse_int(p) for p in parts]


def parse_schedule(text: str) -> list[int]:
    return [parse_int(p) for p in str(text).replace(" ", ",").split(",") if p]


def read_config(path: str) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for n, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key = value")
        key, val = (x.strip() for x in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{n}: unknown key {key!r}")
        out[key] = val
    return out


def read_fibers(path: str, labels, k_psi: int, k_f: int) -> FiberPartition:
    """One fiber per line: ``name: label label ...``."""
    fibers = {}
    try:
        with open(path) as fh:
            for n, line in enumerate(fh, 1):
                line = line.split("#", 1)[0].strip()
                if not line:
                    continue
                if ":" not in line:
                    raise ConfigError(f"{path}:{n}: expected 'name: class labels'")
                name, rest = line.split(":", 1)
                fibers[name.strip()] = tuple(rest.split())
    except OSError as exc:
        raise ConfigError(f"cannot read fibers {path}: {exc}") from None
    return FiberPartition(fibers, k_psi, k_f)


def parse_group_ring(text: str, rank: int) -> GroupRingElement:
    """Entries ``e1,e2,...=coef`` separated by spaces or semicolons."""
    coeffs = {}
    for item in text.replace(";", " ").split():
        if "=" not in item:
            raise ConfigError(f"bad group ring term {item!r}; use exponents=coefficient")
        key, val = item.split("=", 1)
        vec = tuple(parse_int(x) for x in key.split(","))
        if len(vec) != rank:
            raise ConfigError(f"{key!r} needs {rank} exponents")
        coeffs[vec] = coeffs.get(vec, 0) + parse_int(val)
    return GroupRingElement(coeffs)


# settings -------------------------------------------------------------------


class Settings:
    def __init__(self, args: argparse.Namespace):
        cfg = read_config(args.config) if getattr(args, "config", None) else {}

        def pick(name, default=None):
            val = getattr(args, name, None)
            if val is not None:
                return val
            return cfg.get(name, default)

        group = pick("group")
        if group is None:
            raise ConfigError("--group is required")
        self.factors = parse_group(group)
        try:
            self.group = make_group(self.factors)
        except TameCountError as exc:
            raise ConfigError(str(exc)) from None
        self.weight = pick("weight", "disc")
        mod = pick("modulus")
        self.modulus = parse_int(mod) if mod is not None else None
        X = pick("X")
        self.X = parse_int(X) if X is not None else None
        sched = pick("schedule")
        self.schedule = parse_schedule(sched) if sched is not None else None
        self.fibers = pick("fibers")
        self.kpsi = parse_int(pick("kpsi", 1))
        self.kf = parse_int(pick("kf", 1))
        self.format = str(pick("format", "csv")).lower()
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.format!r}")
        self.pmax = parse_int(pick("pmax", 10**5))
        threads = pick("threads")
        self.threads = parse_int(threads) if threads is not None else kernel.default_threads()
        allow = pick("allow_modulus", False)
        self.allow_modulus = allow is True or str(allow).lower() in ("1", "true", "yes")
        self.variant = str(pick("variant", "all"))

    def algebra(self) -> LambdaAlgebra:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            try:
                lam = LambdaAlgebra(self.group, self.weight, self.modulus)
            except TameCountError as exc:
                raise ConfigError(str(exc)) from None
        if not lam.modulus_ok:
            msg = (
                f"modulus {lam.modulus} is not divisible by |G| = {self.group.order} "
                f"and exp(G)^2 = {self.group.exponent ** 2}"
            )
            if not self.allow_modulus:
                raise ConfigError(msg + " (pass --allow-modulus to override)")
            print(f"warning: {msg}", file=sys.stderr)
        return lam

    def echo(self, lam: LambdaAlgebra | None = None) -> dict:
        out = {
            "group": list(self.group.invariant_factors),
            "weight": self.weight if isinstance(self.weight, str) else list(self.weight),
        }
        if lam is not None:
            out["weight_values"] = lam.weight.as_list()
            out["modulus"] = lam.modulus
            out["class_group_order"] = lam.rcg.order
            out["class_blind"] = lam.class_blind
        return out


# report formatting ---------------------------------------------------------------


def _fmt(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x) if math.isfinite(x) else str(x)
    return str(x)


def render(rows: list[dict], meta: dict, fmt: str, summary: bool = False) -> str:
    """JSON carries everything; CSV carries the rows, preceded by ``# key =
    value`` lines for scalar metadata when ``summary`` is set."""
    if fmt == "json":
        return json.dumps({"meta": meta, "rows": rows}, indent=2, default=_json_default) + "\n"
    buf = io.StringIO()
    if summary:
        for k, v in meta.items():
            if not isinstance(v, (dict, list)):
                buf.write(f"# {k} = {_fmt(v)}\n")
    columns = list(rows[0].keys()) if rows else list(CSV_COLUMNS)
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in columns])
    return buf.getvalue()


def _json_default(x):
    if hasattr(x, "item"):
        return x.item()
    raise TypeError(type(x).__name__)


def _count_rows(labels, counts, X, predicted):
    rows = []
    for k, (lab, c) in enumerate(zip(labels, counts)):
        pred = predicted[k] if predicted is not None else None
        ratio = float(c / pred) if pred else None
        rows.append({"class_label": lab, "X": X, "count": int(c), "predicted": pred, "ratio": ratio})
    return rows


def _predictions(lam, pred, X, fiber_map=None):
    if pred is None or X < 2:
        return None
    per_class = [tauberian_predict(pred, X, k) for k in range(lam.rcg.order)]
    if fiber_map is None:
        return per_class
    return fiber_map(per_class)


# subcommands -------------------------------------------------------------------


def cmd_orbits(st: Settings) -> tuple[list[dict], dict]:
    orbits = orbit_table(st.group)
    try:
        W = parse_weight(orbits, st.weight)
    except TameCountError as exc:
        raise ConfigError(str(exc)) from None
    Wd = weight_disc(orbits)
    rows = []
    from .cyclo import ComponentField

    for t in orbits.reps:
        trivial = not any(t)
        fld = ComponentField(orbits.order(t))
        rows.append(
            {
                "rep": ",".join(map(str, t)),
                "order": orbits.order(t),
                "field": "-" if trivial else fld.name,
                "degree": orbits.degree(t),
                "orbit": " ".join(",".join(map(str, g)) for g in orbits.orbits[t]),
                "W_disc": Wd(t),
                "W": W(t),
            }
        )
    return rows, {"config": st.echo(), "alpha": W.alpha, "nontrivial": len(orbits.nontrivial)}


def cmd_enumerate(st: Settings):
    lam = st.algebra()
    if st.X is None:
        raise ConfigError("--X is required")
    rows = []
    for a, idx in enumerate_F(st.X, lam):
        rows.append({"weighted_index": idx, "class_label": lam.rcg.label(ideal_class(a, lam)), "ideal": str(a)})
    rows.sort(key=lambda r: (r["weighted_index"], r["class_label"], r["ideal"]))
    return rows, {"config": st.echo(lam), "X": st.X, "count": len(rows)}


def _tally(st: Settings, lam, X):
    variant = st.variant
    if variant == "all":
        return kappa_all(lam, X, threads=st.threads)
    if variant == "full":
        return kappa_full(lam, X, threads=st.threads)
    if variant.startswith("omit:"):
        t = tuple(parse_int(x) for x in variant[5:].split(","))
        try:
            return kappa_omit(lam, t, X, threads=st.threads)
        except TameCountError as exc:
            raise ConfigError(str(exc)) from None
    raise ConfigError(f"unknown variant {variant!r} (all, full, omit:e1,e2,...)")


def _maybe_predict(st, lam):
    try:
        return predict(lam, st.pmax)
    except TameCountError:
        return None


def _rows_for(st, lam, tally, pred):
    X = tally.X
    per_class = _predictions(lam, pred, X)
    if not st.fibers:
        return _count_rows(tally.labels, tally.counts, X, per_class if st.variant == "all" else None), None
    fib = read_fibers(st.fibers, tally.labels, st.kpsi, st.kf)
    try:
        assembled = assemble_N(tally, fib, constant_weight=lam.weight.is_constant)
    except TameCountError as exc:
        raise ConfigError(str(exc)) from None
    rows = []
    index = {lab: k for k, lab in enumerate(tally.labels)}
    for name, members in fib.fibers.items():
        pred = None
        if per_class is not None and st.variant == "all":
            pred = fib.k_psi * sum(per_class[index[m]] for m in members)
        n = assembled.per_fiber[name]
        rows.append({"class_label": name, "X": X, "count": n, "predicted": pred, "ratio": float(n / pred) if pred else None})
    return rows, assembled.constant_shape


def cmd_count(st: Settings):
    lam = st.algebra()
    if st.X is None:
        raise ConfigError("--X is required")
    t0 = time.perf_counter()
    tally = _tally(st, lam, st.X)
    pred = _maybe_predict(st, lam)
    rows, shape = _rows_for(st, lam, tally, pred)
    meta = {
        "config": st.echo(lam),
        "variant": st.variant,
        "total": tally.total,
        "backend": kernel.BACKEND,
        "threads": st.threads,
        "seconds": round(time.perf_counter() - t0, 3),
    }
    if pred is not None:
        meta["predicted_tolerance"] = pred.tau_error
    if shape is not None:
        meta["constant_weight_shape"] = shape
    return rows, meta


def cmd_verify(st: Settings):
    lam = st.algebra()
    schedule = st.schedule or ([st.X] if st.X else list(DEFAULT_SCHEDULE))
    pred = _maybe_predict(st, lam)
    rows = []
    for X in schedule:
        tally = _tally(st, lam, X)
        r, _ = _rows_for(st, lam, tally, pred)
        rows += r
        total_pred = tauberian_predict(pred, X) if pred is not None and X >= 2 else None
        rows.append(
            {
                "class_label": "*total*",
                "X": X,
                "count": tally.total,
                "predicted": total_pred,
                "ratio": tally.total / total_pred if total_pred else None,
            }
        )
    meta = {"config": st.echo(lam), "schedule": schedule}
    if pred is not None:
        meta.update(beta=pred.beta, delta=pred.delta, tau_total=pred.tau_total, predicted_tolerance=pred.tau_error)
    return rows, meta


def cmd_predict(st: Settings):
    lam = st.algebra()
    try:
        pred = predict(lam, st.pmax)
    except TameCountError as exc:
        raise ConfigError(str(exc)) from None
    pdat = pole_data(lam)
    rows = [
        {"class_label": lab, "beta": pred.beta, "delta": pred.delta, "tau": float(t), "tau_tolerance": pred.tau_error}
        for lab, t in zip(pred.labels, pred.tau)
    ]
    meta = {
        "config": st.echo(lam),
        "beta": pred.beta,
        "delta": pred.delta,
        "tau_total": pred.tau_total,
        "tau_tolerance": pred.tau_error,
        "pole_orders_trivial": {n: pdat.trivial(n) for n in pdat.orders},
        "P_max": st.pmax,
    }
    if st.X:
        meta["predicted_count"] = tauberian_predict(pred, st.X)
    return rows, meta


def cmd_verdict(st: Settings, threshold: float | None, premise_pmax: int):
    lam = st.algebra()
    v = equidistribution_verdict(lam, threshold, st.pmax, premise_pmax)
    rows = [
        {
            "character": ",".join(map(str, w.chi)),
            "abs_b": w.magnitude,
            "threshold": w.threshold,
            "margin": w.margin,
            "witness": w in v.witnesses,
        }
        for w in v.checked
    ]
    meta = {
        "config": st.echo(lam),
        "independent": v.independent,
        "witnesses": len(v.witnesses),
        "premise_min_abs_D": v.premise_min_abs_D,
        "premise_pmax": v.premise_pmax,
        "P_max": st.pmax,
    }
    return rows, meta


def cmd_stickelberger(st: Settings, alpha: str | None, pair: list[str] | None):
    G = st.group
    rows = []
    meta = {"config": st.echo()}
    if pair:
        chi = tuple(parse_int(x) for x in pair[0].split(","))
        g = tuple(parse_int(x) for x in pair[1].split(","))
        if len(chi) != G.rank or len(g) != G.rank:
            raise ConfigError(f"pairing needs {G.rank} exponents per argument")
        meta["pairing"] = str(stickelberger_pairing(Character(G, chi), g))
    if alpha:
        a = parse_group_ring(alpha, G.rank)
        theta = stickelberger_theta(G, a)
        for g in G.elements():
            rows.append({"element": ",".join(map(str, g)), "theta": str(theta[g])})
        meta["theta_integral"] = theta.is_integral()
        meta["in_A_hatG"] = in_A_hatG(G, a)
    if not pair and not alpha:
        raise ConfigError("give --alpha and/or --pair")
    return rows, meta


def cmd_check_bounds(st: Settings, s_values: list[float]):
    lam = st.algebra()
    from .primes import primes_upto

    chars = lam.rcg.characters()
    rows = []
    for s in s_values:
        worst, fails, n = 0.0, 0, 0
        for p in primes_upto(min(st.pmax, 10**4)).tolist():
            if lam.modulus % p == 0:
                continue
            for chi in chars:
                b = check_comp1_bound(lam, p, s, chi)
                n += 1
                fails += not b.holds
                worst = max(worst, b.lhs / b.rhs if b.rhs else math.inf)
        rows.append({"s": s, "checks": n, "failures": fails, "max_lhs_over_rhs": worst})
    return rows, {"config": st.echo(lam), "all_hold": all(r["failures"] == 0 for r in rows)}


# entry point ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--group", help="cyclic factor orders, e.g. 2,2")
    common.add_argument("--weight", help="disc, ram, or one value per nontrivial orbit")
    common.add_argument("--modulus", help="M (default lcm(|G|, exp(G)^2))")
    common.add_argument("--X", help="bound on the weighted index")
    common.add_argument("--schedule", help="comma-separated bounds")
    common.add_argument("--config", help="key = value settings file")
    common.add_argument("--format", choices=["csv", "json"])
    common.add_argument("--threads", help="worker threads (env TAMECOUNT_THREADS)")
    common.add_argument("--pmax", help="Euler product truncation")
    common.add_argument("--fibers", help="fiber partition file")
    common.add_argument("--kpsi", help="|Ker(psi)|")
    common.add_argument("--kf", help="|Ker(f_M)|")
    common.add_argument("--variant", help="all, full, or omit:e1,e2,...")
    common.add_argument("--allow-modulus", action="store_const", const=True, dest="allow_modulus")
    common.add_argument("--output", "-o", help="write the report here instead of stdout")

    p = _Parser(prog="tamecount", description="Counting tame abelian extension data of Q by ray class.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("orbits", parents=[common], help="orbit table of G")
    sub.add_parser("enumerate", parents=[common], help="list F up to X")
    sub.add_parser("count", parents=[common], help="class counts at X")
    sub.add_parser("predict", parents=[common], help="pole data and leading coefficients")
    sub.add_parser("verify", parents=[common], help="counts against predictions over a schedule")
    v = sub.add_parser("verdict", parents=[common], help="equidistribution verdict")
    v.add_argument("--threshold", type=float)
    v.add_argument("--premise-pmax", type=int, default=10**4)
    s = sub.add_parser("stickelberger", parents=[common], help="pairing, Theta and A_G queries")
    s.add_argument("--alpha", help="terms e1,e2=coef separated by spaces")
    s.add_argument("--pair", nargs=2, metavar=("CHI", "G"))
    c = sub.add_parser("check-bounds", parents=[common], help="local D versus L comparison bound")
    c.add_argument("--s", default="0.6,0.8,1.0,1.5,2.0")
    return p


def run_command(argv: list[str] | None = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
        st = Settings(args)
        if args.command == "orbits":
            rows, meta = cmd_orbits(st)
        elif args.command == "enumerate":
            rows, meta = cmd_enumerate(st)
        elif args.command == "count":
            rows, meta = cmd_count(st)
        elif args.command == "predict":
            rows, meta = cmd_predict(st)
        elif args.command == "verify":
            rows, meta = cmd_verify(st)
        elif args.command == "verdict":
            rows, meta = cmd_verdict(st, args.threshold, args.premise_pmax)
        elif args.command == "stickelberger":
            rows, meta = cmd_stickelberger(st, args.alpha, args.pair)
        else:
            rows, meta = cmd_check_bounds(st, [float(x) for x in args.s.split(",")])
        summary = args.command in ("orbits", "predict", "verdict", "stickelberger", "check-bounds")
        text = render(rows, meta, st.format, summary)
        if args.output:
            with open(args.output, "w") as fh:
                fh.write(text)
        else:
            stdout.write(text)
        return 0
    except (ConfigError, TameCountError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run_command())
