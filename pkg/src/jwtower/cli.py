"""Command-line driver: build towers, run verification suites, render reports.

Verbs::

    jwtower build   [--config F] [--max-level N] [--out F]
    jwtower verify  [--config F] [--suite S ...] [--seed N] [--tol T] [--samples N] [--out F]
    jwtower entropy [--config F] [--max-level N] [--out F]
    jwtower report  PATH [--select records|margins|entropy|dims|failures] [--format table|json]

Exit codes: 0 pass, 1 verification failure, 2 usage or config error, 3 resource cap.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import entropy as ent
from . import suites as su
from .mmalg import AlgebraError, DimensionCapError
from .tower import InclusionSpec, Tower, build as build_tower

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_CAP = 0, 1, 2, 3
SIG_DIGITS = 10
SELECTORS = ("records", "margins", "entropy", "dims", "failures")


class ConfigError(ValueError):
    """Invalid configuration; ``key`` names the offending config key when known."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


# ---------------------------------------------------------------------------
# Configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ModelConfig:
    kind: str = "tensor"
    k: int = 1
    d: int = 2
    a_blocks: tuple[int, ...] = ()
    b_generators: tuple = ()
    max_level: int | None = None
    name: str | None = None

    def spec(self) -> InclusionSpec:
        gens = tuple(np.asarray(g, dtype=complex) for g in self.b_generators)
        return InclusionSpec(self.kind, self.k, self.d, tuple(self.a_blocks), gens)

    @property
    def label(self) -> str:
        return self.name or self.spec().label


@dataclass(frozen=True)
class RunConfig:
    models: tuple[ModelConfig, ...] = (ModelConfig(),)
    max_level: int = 6
    tol: float = 1e-9
    seed: int = 0
    suites: tuple[str, ...] = su.SUITES
    samples: int = 100
    inequality_samples: int = 1000
    cap: int = 65536
    exhaustive: bool = False

    def level_for(self, model: ModelConfig) -> int:
        return self.max_level if model.max_level is None else model.max_level

    def validate(self) -> "RunConfig":
        if not self.models:
            raise ConfigError("at least one model is required")
        if self.max_level < 1 or any(m.max_level is not None and m.max_level < 1 for m in self.models):
            raise ConfigError("max_level must be >= 1", key="max_level")
        if not self.tol > 0:
            raise ConfigError("tol must be > 0", key="tol")
        if not self.suites:
            raise ConfigError("suites must be non-empty", key="suites")
        unknown = [s for s in self.suites if s not in su.SUITES]
        if unknown:
            raise ConfigError(f"unknown suites {unknown}; choose from {list(su.SUITES)}", key="suites")
        if self.samples < 1 or self.inequality_samples < 1:
            raise ConfigError("samples and inequality_samples must be >= 1", key="samples")
        if self.cap < 1:
            raise ConfigError("cap must be >= 1", key="cap")
        for m in self.models:
            try:
                m.spec()
            except ValueError as exc:
                raise ConfigError(f"model {m.name or m.kind}: {exc}", key="b_generators" if m.kind == "explicit" else "kind") from None
        return self


_RUN_KEYS = {"max_level", "tol", "seed", "suites", "samples", "inequality_samples", "cap", "exhaustive"}
_MODEL_KEYS = {"kind", "k", "d", "a_blocks", "b_generators", "max_level", "name"}


def matrix_to_pairs(m) -> list:
    """Complex matrix as nested ``[re, im]`` pairs."""
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def pairs_to_matrix(rows) -> np.ndarray:
    try:
        arr = np.asarray(rows, dtype=float)
    except (TypeError, ValueError):
        raise ConfigError("matrix entries must be [re, im] pairs") from None
    if arr.ndim != 3 or arr.shape[2] != 2 or arr.shape[0] != arr.shape[1]:
        raise ConfigError(f"matrix must be square with [re, im] entries, got shape {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def serialize_model(m: ModelConfig) -> dict:
    out: dict = {"kind": m.kind}
    if m.kind == "tensor":
        out.update(k=m.k, d=m.d)
    else:
        out.update(a_blocks=list(m.a_blocks), b_generators=[matrix_to_pairs(g) for g in m.b_generators])
    if m.max_level is not None:
        out["max_level"] = m.max_level
    if m.name is not None:
        out["name"] = m.name
    return out


def parse_model(doc: dict) -> ModelConfig:
    if not isinstance(doc, dict):
        raise ConfigError("model must be an object")
    extra = set(doc) - _MODEL_KEYS
    if extra:
        raise ConfigError(f"unknown model keys {sorted(extra)}", key=sorted(extra)[0])
    kind = doc.get("kind", "tensor")
    for key in ("k", "d"):
        v = _int(doc, key, 1)
        if v < 1:
            raise ConfigError(f"{key} must be >= 1, got {v}", key=key)
    gens = tuple(pairs_to_matrix(g) for g in doc.get("b_generators", ()))
    return ModelConfig(kind=kind, k=_int(doc, "k", 1), d=_int(doc, "d", 2),
                       a_blocks=tuple(int(n) for n in doc.get("a_blocks", ())), b_generators=gens,
                       max_level=_int(doc, "max_level", None), name=doc.get("name"))


def _int(doc: dict, key: str, default):
    v = doc.get(key, default)
    if v is None:
        return None
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(f"{key} must be an integer, got {v!r}", key=key)
    return v


def serialize_config(cfg: RunConfig) -> dict:
    out = {k: v for k, v in asdict(cfg).items() if k != "models"}
    out["suites"] = list(cfg.suites)
    out["models"] = [serialize_model(m) for m in cfg.models]
    return out


def config_from_dict(doc: dict) -> RunConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    if "models" in doc:
        models = tuple(parse_model(m) for m in doc["models"])
        rest = {k: v for k, v in doc.items() if k != "models"}
    elif "model" in doc:
        models = (parse_model(doc["model"]),)
        rest = {k: v for k, v in doc.items() if k != "model"}
    else:
        model_part = {k: v for k, v in doc.items() if k in _MODEL_KEYS - {"max_level"}}
        models = (parse_model(model_part),)
        rest = {k: v for k, v in doc.items() if k not in model_part}
    extra = set(rest) - _RUN_KEYS
    if extra:
        raise ConfigError(f"unknown config keys {sorted(extra)}", key=sorted(extra)[0])
    kw = dict(rest)
    if "suites" in kw:
        if isinstance(kw["suites"], str) or not isinstance(kw["suites"], list):
            raise ConfigError("suites must be a list of names", key="suites")
        kw["suites"] = tuple(kw["suites"])
    for key in ("max_level", "seed", "samples", "inequality_samples", "cap"):
        if key in kw:
            _int(kw, key, None)
    if "tol" in kw:
        if isinstance(kw["tol"], bool) or not isinstance(kw["tol"], (int, float)):
            raise ConfigError(f"tol must be a number, got {kw['tol']!r}", key="tol")
        kw["tol"] = float(kw["tol"])
    return RunConfig(models=models, **kw).validate()


def _line_of(text: str, key: str | None) -> int | None:
    """Line where a config key first appears."""
    if key is None:
        return None
    for i, line in enumerate(text.splitlines(), 1):
        if f'"{key}"' in line:
            return i
    return None


def parse_config(path: str | Path) -> RunConfig:
    """Read and validate a JSON config, filling defaults."""
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"{p}: {exc.strerror}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{p}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    try:
        return config_from_dict(doc)
    except ConfigError as exc:
        line = _line_of(text, exc.key)
        raise ConfigError(f"{p}:{line}: {exc}" if line else f"{p}: {exc}") from None


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

def clean(obj):
    """JSON-safe, deterministic values: floats at fixed precision, inf and nan as strings."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return clean(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        x = float(f"{x:.{SIG_DIGITS}g}")
        return 0.0 if x == 0 else x
    if isinstance(obj, complex):
        return [clean(obj.real), clean(obj.imag)]
    return obj


def dumps(doc: dict) -> str:
    return json.dumps(clean(doc), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def tower_summary(T: Tower) -> dict:
    top = T.max_level
    levels = [{"n": n, "block_dims": T.algebra(n).block_dims, "trace_weights": T.algebra(n).trace_weights}
              for n in range(-1, top + 1)]
    rc = []
    for n in range(0, top + 1):
        rc.append({"n": n, "B'∩A_n": T.relative_commutant(-1, n).block_dims,
                   "A'∩A_n": T.relative_commutant(0, n).block_dims if n > 0 else [1] * len(T.algebra(0).blocks)})
    chain = []
    for m in range(0, min(top, 4)):
        Q, R = ent.chain_step(T, m)
        chain.append({"from": m, "to": m + 1, "matrix": ent.inclusion_matrix(Q, R).matrix})
    d = ent.depth_detect(T, 2, T.tol)
    return {
        "model": T.spec.label,
        "index": T.index,
        "tau": T.tau,
        "delta": T.delta,
        "max_level": top,
        "levels": levels,
        "relative_commutants": rc,
        "base_inclusion_matrix": T.inclusion_matrix,
        "commutant_inclusion_matrices": chain,
        "depth": {"finite": d.finite, "depth": d.depth, "ranks": d.ranks},
        "outside_hypotheses": not T.simple,
    }


def entropy_summary(T: Tower) -> dict:
    N = max(1, min(3, T.max_level // 2))
    g = ent.entropy_growth(T, N)
    log_index = math.log(T.index)
    out = {
        "n": g.n,
        "entropy": g.entropy,
        "slope": g.slope,
        "log_index": log_index,
        "slope_agreement": abs(g.slope - log_index),
    }
    try:
        se = ent.shift_entropy(T, T.tol)
    except (ValueError, AlgebraError) as exc:
        out["shift_entropy_error"] = str(exc)
        return out
    out.update(shift_entropy=se.value, beta=se.beta, k0=se.k0,
               implied_relative_entropy=se.implied_relative_entropy)
    return out


def _build(model: ModelConfig, cfg: RunConfig) -> Tower:
    # cfg.tol is the verification threshold; construction keeps the numerical default
    return build_tower(model.spec(), cfg.level_for(model), cap=cfg.cap)


def _error_entry(model: ModelConfig, exc: Exception, kind: str) -> dict:
    return {"model": model.label, "kind": kind, "message": str(exc)}


def run(cfg: RunConfig, verb: str = "verify") -> tuple[dict, int]:
    """Execute ``build``, ``verify`` or ``entropy``; return the report and exit code."""
    report: dict = {"verb": verb, "config": serialize_config(cfg), "models": [], "errors": []}
    code = EXIT_PASS
    for model in cfg.models:
        entry: dict = {"model": model.label}
        try:
            T = _build(model, cfg)
            entry["tower"] = tower_summary(T)
            if verb in ("verify", "entropy"):
                names = cfg.suites if verb == "verify" else ("entropy",)
                ctx = su.Context(T, tol=cfg.tol, samples=cfg.samples, inequality_samples=cfg.inequality_samples,
                                 seed=cfg.seed, exhaustive=cfg.exhaustive)
                entry["suites"] = {name: [r.as_dict() for r in su.run_suite(ctx, name)] for name in names}
                entry["entropy"] = entropy_summary(T)
                recs = [r for rs in entry["suites"].values() for r in rs]
                entry["counts"] = {s: sum(r["status"] == s for r in recs) for s in ("pass", "fail", "skipped")}
                entry["pass"] = entry["counts"]["fail"] == 0
                if not entry["pass"]:
                    code = max(code, EXIT_FAIL)
        except DimensionCapError as exc:
            report["errors"].append(_error_entry(model, exc, "resource-cap"))
            entry["pass"] = False
            code = EXIT_CAP
        except (AlgebraError, ValueError, IndexError) as exc:
            report["errors"].append(_error_entry(model, exc, "model"))
            entry["pass"] = False
            code = max(code, EXIT_USAGE) if code != EXIT_CAP else code
        report["models"].append(entry)
    report["pass"] = code == EXIT_PASS
    return report, code


# ---------------------------------------------------------------------------
# Tables
# ---------------------------------------------------------------------------

def select_rows(report: dict, selector: str) -> tuple[list[str], list[list]]:
    """Header and rows for a report view."""
    if selector not in SELECTORS:
        raise ConfigError(f"unknown selector {selector!r}; choose from {list(SELECTORS)}")
    models = report.get("models", [])
    if selector in ("records", "margins", "failures"):
        head = ["model", "suite", "check", "params", "kind", "value", "threshold", "status"]
        rows = []
        for m in models:
            for recs in m.get("suites", {}).values():
                for r in recs:
                    if selector == "margins" and r["kind"] != "margin":
                        continue
                    if selector == "failures" and r["status"] != "fail":
                        continue
                    rows.append([m["model"], r["suite"], r["check"], _params(r["params"]), r["kind"],
                                 r["value"], r["threshold"], r["status"]])
        if selector == "margins":
            rows.sort(key=lambda row: _num(row[5]))
        return head, rows
    if selector == "entropy":
        head = ["model", "n", "H", "slope", "log_index"]
        rows = []
        for m in models:
            e = m.get("entropy")
            if not e:
                continue
            for n, h in zip(e["n"], e["entropy"]):
                rows.append([m["model"], n, h, e["slope"], e["log_index"]])
        return head, rows
    head = ["model", "n", "A_n", "B'∩A_n", "A'∩A_n"]
    rows = []
    for m in models:
        t = m.get("tower")
        if not t:
            continue
        rcs = {r["n"]: r for r in t["relative_commutants"]}
        for lv in t["levels"]:
            r = rcs.get(lv["n"], {})
            rows.append([m["model"], lv["n"], lv["block_dims"], r.get("B'∩A_n", ""), r.get("A'∩A_n", "")])
    return head, rows


def _num(v) -> float:
    if isinstance(v, (int, float)):
        return float(v)
    if v == "inf":
        return math.inf
    if v == "-inf":
        return -math.inf
    return math.inf  # skipped records sort last


def _params(p: dict) -> str:
    return ",".join(f"{k}={v}" for k, v in sorted(p.items()))


def _cell(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v)


def emit_table(report: dict, selector: str, fmt: str = "table") -> str:
    head, rows = select_rows(report, selector)
    if fmt == "json":
        return dumps({"select": selector, "columns": head, "rows": rows})
    if fmt != "table":
        raise ConfigError(f"unknown format {fmt!r}")
    cells = [head] + [[_cell(v) for v in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(head))]
    lines = ["  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip() for r in cells]
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="jwtower", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="verb", required=True)
    for verb in ("build", "verify", "entropy"):
        p = sub.add_parser(verb)
        p.add_argument("--config", help="JSON run config")
        p.add_argument("--max-level", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--suite", action="append", help="suite to run (repeatable)")
        p.add_argument("--tol", type=float)
        p.add_argument("--samples", type=int)
        p.add_argument("--out", help="write the report here instead of stdout")
    p = sub.add_parser("report")
    p.add_argument("path")
    p.add_argument("--select", default="records", choices=SELECTORS)
    p.add_argument("--format", default="table", choices=("table", "json"))
    p.add_argument("--out")
    return ap


def _apply_flags(cfg: RunConfig, args) -> RunConfig:
    updates = {}
    if args.max_level is not None:
        updates["max_level"] = args.max_level
        cfg = replace(cfg, models=tuple(replace(m, max_level=None) for m in cfg.models))
    for key in ("seed", "tol", "samples"):
        if getattr(args, key) is not None:
            updates[key] = getattr(args, key)
    if args.suite:
        updates["suites"] = tuple(args.suite)
    return replace(cfg, **updates).validate()


def _write(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def main(argv: list[str] | None = None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    try:
        if args.verb == "report":
            try:
                report = json.loads(Path(args.path).read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"{args.path}: {exc}") from None
            _write(emit_table(report, args.select, args.format), args.out)
            return EXIT_PASS
        cfg = parse_config(args.config) if args.config else RunConfig()
        cfg = _apply_flags(cfg, args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report, code = run(cfg, args.verb)
    _write(dumps(report), args.out)
    for err in report["errors"]:
        print(f"error: {err['model']}: {err['kind']}: {err['message']}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
