"""Command-line front end.

Exit codes: 0 success, 1 a check failed, 2 invalid configuration,
3 the analytic hypotheses fail for the chosen function and epsilon.
"""

from __future__ import annotations

import argparse
import ast
import csv
import io
import math
import os
import re
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Any

from . import catalog as cat
from . import lemmas
from .asymptotics import c_upper_bound, k_asymptote
from .catalog import FunctionSpec, Kind
from .errors import (
    AsymprodError,
    ClosureViolationError,
    HypothesisViolationError,
    NoValidEpsilonError,
)
from .limits import Schedule, estimate_C, fit_convergence_rate, select_limit
from .products import ProductParams, eval_D, eval_E, eval_K

EVAL_COLUMNS = ("n", "m", "log_D", "D", "log_K", "K", "E")
SUITES = ("lower_bound", "monotone", "logconcavity", "upper_bound", "all")
TERM_WINDOW = 10
E_WINDOW = 50


class ConfigError(AsymprodError):
    pass


# ---------------------------------------------------------------------------
# number and function-expression parsing

_NAMES = {"pi": math.pi, "e": math.e, "tau": math.tau}
_CALLS = {"sqrt": math.sqrt, "log": math.log, "exp": math.exp}
_BINOPS = {ast.Add: lambda x, y: x + y, ast.Sub: lambda x, y: x - y,
           ast.Mult: lambda x, y: x * y, ast.Div: lambda x, y: x / y,
           ast.Pow: lambda x, y: x**y}


def parse_real(text: str) -> float:
    """Evaluate a small arithmetic expression such as ``pi/2`` or ``1/sqrt(2)``."""

    def walk(node):
        if isinstance(node, ast.Expression):
            return walk(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            return float(node.value)
        if isinstance(node, ast.Name) and node.id in _NAMES:
            return _NAMES[node.id]
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = walk(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            return _BINOPS[type(node.op)](walk(node.left), walk(node.right))
        if (isinstance(node, ast.Call) and isinstance(node.func, ast.Name)
                and node.func.id in _CALLS and len(node.args) == 1 and not node.keywords):
            return _CALLS[node.func.id](walk(node.args[0]))
        raise ConfigError(f"unsupported expression {text!r}")

    try:
        value = walk(ast.parse(str(text).strip(), mode="eval"))
    except (SyntaxError, ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"cannot parse number {text!r}: {exc}") from None
    if not math.isfinite(value):
        raise ConfigError(f"{text!r} is not finite")
    return value


_TOKEN = re.compile(r"\s*([A-Za-z_][A-Za-z0-9_]*|[(),])")
_BINARY = {"add": cat.combine_add, "mul": cat.combine_mul, "scale": cat.scale_module}


def parse_function(expr: str) -> FunctionSpec:
    """Resolve a catalog name or ``add(f,g)``, ``mul(f,g)``, ``scale(C,S)``, ``deriv(S)``."""
    tokens, pos = [], 0
    expr = expr.strip()
    while pos < len(expr):
        m = _TOKEN.match(expr, pos)
        if not m:
            raise ConfigError(f"bad function expression {expr!r}")
        tokens.append(m.group(1))
        pos = m.end()

    def take(expected=None):
        if not tokens:
            raise ConfigError(f"unexpected end of {expr!r}")
        tok = tokens.pop(0)
        if expected and tok != expected:
            raise ConfigError(f"expected {expected!r} in {expr!r}, got {tok!r}")
        return tok

    def parse():
        name = take()
        if tokens and tokens[0] == "(":
            take("(")
            if name == "deriv":
                arg = parse()
                take(")")
                return cat.derivative_of_S(arg)
            if name not in _BINARY:
                raise ConfigError(f"unknown combinator {name!r}")
            left = parse()
            take(",")
            right = parse()
            take(")")
            return _BINARY[name](left, right)
        try:
            return cat.get(name)
        except KeyError:
            raise ConfigError(f"unknown function {name!r}") from None

    spec = parse()
    if tokens:
        raise ConfigError(f"trailing input in {expr!r}")
    return spec


# ---------------------------------------------------------------------------
# configuration


@dataclass
class ExperimentConfig:
    function: str = "sin"
    a: float = 5.0
    b: float = 3.0
    c: float = 4.0
    d: float = 1.0
    eps: float | None = None
    n0: int = 1000
    ratio: float = 2.0
    count: int = 11
    out: str | None = None
    format: str = "csv"
    suite: str = "all"
    compat_override: bool = False
    threads: int = 1
    series: str | None = None

    def schedule(self) -> Schedule:
        return Schedule.geometric(self.n0, self.ratio, self.count)


_REALS = {"a", "b", "c", "d", "eps", "ratio"}
_INTS = {"n0", "count", "threads"}
_BOOLS = {"compat_override"}


def _coerce(key: str, value: Any) -> Any:
    if value is None:
        return None
    if key in _REALS:
        if isinstance(value, str) and value.strip().lower() in ("", "auto"):
            return None
        return parse_real(value) if isinstance(value, str) else float(value)
    if key in _INTS:
        try:
            return int(value)
        except ValueError:
            raise ConfigError(f"{key} must be an integer, got {value!r}") from None
    if key in _BOOLS:
        if isinstance(value, bool):
            return value
        text = str(value).strip().lower()
        if text in ("1", "true", "yes", "on"):
            return True
        if text in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{key} must be a boolean, got {value!r}")
    return str(value)


def read_config_file(path: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    values = {}
    known = {f.name for f in fields(ExperimentConfig)}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in known:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = value
    return values


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    merged: dict[str, Any] = {}
    env_threads = os.environ.get("ASYMPROD_THREADS")
    if env_threads:
        merged["threads"] = env_threads
    if getattr(args, "config", None):
        merged.update(read_config_file(args.config))
    for f in fields(ExperimentConfig):
        flag = getattr(args, f.name, None)
        if flag is not None and flag is not False:
            merged[f.name] = flag
    cfg = ExperimentConfig(**{k: _coerce(k, v) for k, v in merged.items()})
    if cfg.format not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {cfg.format!r}")
    if cfg.suite not in SUITES:
        raise ConfigError(f"suite must be one of {', '.join(SUITES)}")
    if cfg.count < 1 or cfg.n0 < 1 or not cfg.ratio > 1:
        raise ConfigError("schedule needs n0 >= 1, count >= 1 and ratio > 1")
    cfg.threads = max(1, cfg.threads)
    return cfg


# ---------------------------------------------------------------------------
# output helpers


def _fmt(x: float) -> str:
    return "%.17g" % x


def _json_text(obj: Any, indent: int = 0) -> str:
    pad, inner = "  " * indent, "  " * (indent + 1)
    if obj is None or (isinstance(obj, float) and not math.isfinite(obj)):
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return _fmt(obj)
    if isinstance(obj, str):
        return '"' + obj.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{_json_text(str(k))}: {_json_text(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [inner + _json_text(v, indent + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if hasattr(obj, "item"):
        return _json_text(obj.item(), indent)
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dump_json(obj: Any) -> str:
    return _json_text(obj) + "\n"


def dump_csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _emit(text: str, path: str | None, stdout) -> None:
    if path:
        Path(path).write_text(text)
    else:
        stdout.write(text)


def _table(cfg: ExperimentConfig, header, rows) -> str:
    if cfg.format == "json":
        return dump_json([dict(zip(header, r)) for r in rows])
    return dump_csv(header, rows)


# ---------------------------------------------------------------------------
# shared setup


@dataclass
class Problem:
    """A configuration resolved to concrete objects, with the scale folded in."""

    cfg: ExperimentConfig
    h: FunctionSpec
    eps: float
    h_unit: FunctionSpec  # h(d x)
    eps_unit: float  # eps / d
    H: FunctionSpec  # C-function driving E_n at scale 1

    @property
    def s_like(self) -> bool:
        return self.h.kind in (Kind.S, Kind.IDENTITY)

    def params(self, n: int) -> ProductParams:
        c = self.cfg
        return ProductParams(c.a, c.b, c.c, c.d, self.eps, n, c.compat_override)

    def unit_params(self, n: int) -> ProductParams:
        c = self.cfg
        return ProductParams(c.a, c.b, c.c, 1, self.eps_unit, n, c.compat_override)


def resolve(cfg: ExperimentConfig) -> Problem:
    h = parse_function(cfg.function)
    for name in ("a", "b", "c", "d"):
        value = getattr(cfg, name)
        if value is None or not value > 0:
            raise ConfigError(f"{name} must be positive")
    H_scaled = cat.to_C(h) if h.kind in (Kind.S, Kind.IDENTITY) else h
    eps = cfg.eps if cfg.eps is not None else cat.find_epsilon(H_scaled, cfg.c * cfg.d)
    h_unit = cat.rescale(h, cfg.d)
    H = cat.to_C(h_unit) if h_unit.kind in (Kind.S, Kind.IDENTITY) else h_unit
    problem = Problem(cfg, h, float(eps), h_unit, float(eps) / cfg.d, H)
    for n in cfg.schedule():
        problem.params(n)
    problem.unit_params(cfg.n0)
    return problem


# ---------------------------------------------------------------------------
# subcommands


def cmd_eval(cfg: ExperimentConfig, stdout=sys.stdout) -> int:
    prob = resolve(cfg)
    rows = []
    for n in cfg.schedule():
        p = prob.params(n)
        D, K = eval_D(p, prob.h), eval_K(p)
        if prob.s_like:
            E = eval_E(prob.unit_params(n), prob.H).value
        else:
            E = math.exp(D.log_value - K.log_value)
        rows.append((n, D.m, D.log_value, D.value, K.log_value, K.value, E))
    _emit(_table(cfg, EVAL_COLUMNS, rows), cfg.out, stdout)
    return 0


def cmd_asymptote(cfg: ExperimentConfig, stdout=sys.stdout) -> int:
    if cfg.eps is None:
        eps = resolve(cfg).eps_unit
    else:
        eps = cfg.eps / cfg.d
    asy = k_asymptote(cfg.a, cfg.b, cfg.c, eps)
    bound = c_upper_bound(cfg.a, cfg.b, cfg.c, eps) if cfg.a > cfg.b else None
    header = ("exponent", "constant", "upper_bound", "eps")
    row = (asy.exponent, asy.constant, bound if bound is not None else "", eps)
    if cfg.format == "json":
        text = dump_json(dict(zip(header, (asy.exponent, asy.constant, bound, eps))))
    else:
        text = dump_csv(header, [row])
    _emit(text, cfg.out, stdout)
    return 0


def _estimate(prob: Problem):
    cfg = prob.cfg
    return estimate_C(cfg.a, cfg.b, cfg.c, prob.eps_unit, prob.h_unit, cfg.schedule(),
                      threads=cfg.threads, compat_override=cfg.compat_override)


def cmd_estimate(cfg: ExperimentConfig, stdout=sys.stdout) -> int:
    prob = resolve(cfg)
    est = _estimate(prob)
    payload = {"function": prob.h.name, "eps": prob.eps, "eps_unit": prob.eps_unit, **est.to_dict()}
    if prob.s_like and cfg.a > cfg.b:
        payload["c_upper_bound"] = c_upper_bound(cfg.a, cfg.b, cfg.c, prob.eps_unit)
    stdout.write(dump_json(payload))
    if cfg.out:
        Path(cfg.out).write_text(dump_csv(("n", "E"), est.series))
    return 0


def run_checks(prob: Problem) -> list[lemmas.CheckReport]:
    cfg = prob.cfg
    selected = SUITES[:-1] if cfg.suite == "all" else (cfg.suite,)
    a, b, c = cfg.a, cfg.b, cfg.c
    H, eps = prob.H, prob.eps_unit
    template = prob.unit_params(cfg.n0)
    reports = []
    if "logconcavity" in selected:
        reports.append(lemmas.check_logconcavity(H, eps))
    if "lower_bound" in selected:
        witness = lemmas.compute_bound_witness(H, a - b, b, eps, c)
        for n in cfg.schedule():
            reports.append(lemmas.check_lower_bound(template.with_n(n), H, witness))
    if "monotone" in selected:
        reports.append(lemmas.check_term_monotonicity(
            template, H, range(cfg.n0, cfg.n0 + TERM_WINDOW + 1)))
        reports.append(lemmas.check_E_monotone(
            lemmas.consecutive_E(template, H, cfg.n0, cfg.n0 + E_WINDOW)))
    if "upper_bound" in selected and (cfg.suite == "upper_bound" or a > b):
        h = prob.h_unit if prob.s_like else cat.scale_module(prob.h_unit, cat.get("identity"))
        est = estimate_C(a, b, c, eps, h, cfg.schedule(), threads=cfg.threads,
                         compat_override=cfg.compat_override)
        reports.append(lemmas.check_upper_bound(est, a, b, c, eps))
    return reports


def cmd_check(cfg: ExperimentConfig, stdout=sys.stdout) -> int:
    prob = resolve(cfg)
    reports = run_checks(prob)
    passed = all(r.passed for r in reports)
    payload = {"function": prob.h.name, "eps_unit": prob.eps_unit, "suite": cfg.suite,
               "passed": passed, "reports": [r.to_dict() for r in reports]}
    _emit(dump_json(payload), cfg.out, stdout)
    return 0 if passed else 1


def read_series(path: str) -> list[tuple[int, float]]:
    """Two-column CSV ``n,E`` with a header row."""
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise ConfigError(f"cannot read series {path}: {exc}") from None
    try:
        return [(int(r[0]), float(r[1])) for r in rows[1:] if r]
    except (ValueError, IndexError):
        raise ConfigError(f"{path}: expected rows of n,E") from None


def cmd_convergence(cfg: ExperimentConfig, stdout=sys.stdout) -> int:
    if cfg.series:
        series = read_series(cfg.series)
        est = select_limit(series)
        name = f"series:{Path(cfg.series).name}"
    else:
        prob = resolve(cfg)
        est = _estimate(prob)
        series = list(est.series)
        name = prob.h.name
    report = fit_convergence_rate(series, est.e_infinity)
    stdout.write(dump_json({"function": name, **report.to_dict()}))
    if cfg.out:
        header = ("n", "E", "abs_diff", "fit_inv_log", "fit_inv_n", "fit_power")
        fits = [report.fits[m].fitted for m in report.fits]
        rows = [(n, v, abs(v - est.e_infinity), *(f[i] for f in fits))
                for i, (n, v) in enumerate(series)]
        Path(cfg.out).write_text(dump_csv(header, rows))
    return 0


def cmd_catalog(cfg: ExperimentConfig, stdout=sys.stdout) -> int:
    header = ("name", "kind", "classified", "closed_form_epsilon", "alpha", "lambda", "k",
              "domain_radius", "listed_only")
    rows = []
    for f in cat.entries(include_listed_only=True):
        verdict = cat.classify(f, probe_radius=min(0.1, f.domain_radius)).verdict.value
        t = f.taylor
        rows.append((
            f.name, f.kind.value, verdict,
            f.closed_form_epsilon if f.closed_form_epsilon is not None else "",
            t.alpha if t else "", t.lam if t else "", t.k if t else "",
            f.domain_radius, "yes" if f.listed_only else "no",
        ))
    _emit(_table(cfg, header, rows), cfg.out, stdout)
    return 0


COMMANDS = {
    "eval": cmd_eval,
    "asymptote": cmd_asymptote,
    "estimate": cmd_estimate,
    "check": cmd_check,
    "convergence": cmd_convergence,
    "catalog": cmd_catalog,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="asymprod", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file; flags override it")
    common.add_argument("--function", help="catalog name or add/mul/scale/deriv expression")
    for name in ("a", "b", "c", "d"):
        common.add_argument(f"--{name}")
    common.add_argument("--eps", help="omit (or 'auto') to choose it automatically")
    common.add_argument("--n0")
    common.add_argument("--ratio")
    common.add_argument("--count")
    common.add_argument("--out")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--suite", choices=SUITES)
    common.add_argument("--compat-override", dest="compat_override", action="store_true",
                        default=None)
    common.add_argument("--threads", help="worker threads (fallback: ASYMPROD_THREADS)")
    common.add_argument("--series", help="CSV of n,E to analyse instead of computing (convergence)")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def main(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = build_config(args)
        return COMMANDS[args.command](cfg, stdout=stdout)
    except (HypothesisViolationError, NoValidEpsilonError, ClosureViolationError) as exc:
        stderr.write(f"asymprod: hypothesis violation: {exc}\n")
        return 3
    except AsymprodError as exc:
        stderr.write(f"asymprod: invalid configuration: {exc}\n")
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
