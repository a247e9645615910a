"""Command-line interface: ``deltabound solve|figure|compare|reduce``.

Configuration is a TOML document; ``--param section.key=value`` overrides any
field (flags win over the file).  Data outputs are CSV files with a single
header line, each with a JSON sidecar holding metadata and the SHA-256 of the
effective configuration.  Exit codes: 0 success, 2 configuration error,
3 solver error, 4 comparison outside tolerance.
"""

from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import DeltaBoundError, InvalidParameterError
from .logderiv import LogDerivativeEvaluator, Method
from .oracle import default_grid, eigen_below, richardson
from .quantize import QuantizationProblem, find_roots, graphical_data
from .units import DimensionlessModel, PhysicalParameters, ProfileKind, reduce, restore_energy

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_TOLERANCE = 4

#: (label, u0, gamma) of the six panels of the published graphical solution.
FIGURE_CASES = [
    ("a", -1.0, 5.0),
    ("b", -1.0, 10.0),
    ("c", 0.0, 5.0),
    ("d", 0.0, 10.0),
    ("e", 1.0, 5.0),
    ("f", 1.0, 10.0),
]

_SCHEMA: dict[str, dict[str, type | tuple[type, ...]]] = {
    "": {"mode": str, "kind": str},
    "model": {"u0": (int, float), "gamma": (int, float), "a": (int, float), "b": (int, float)},
    "physical": {"m": (int, float), "hbar": (int, float), "U0": (int, float), "UL": (int, float),
                 "A": (int, float), "B": (int, float), "beta": (int, float)},
    "solver": {"method": str, "delta_max": (int, float), "margin": (int, float),
               "root_tol": (int, float)},
    "oracle": {"h": (int, float), "q_left": (int, float), "q_right": (int, float),
               "tolerance": (int, float)},
    "output": {"dir": str, "samples": int},
    "figure": {"cases": list},
}

_DEFAULTS: dict[str, Any] = {
    "mode": "dimensionless",
    "kind": "linear",
    "solver": {"method": "auto", "margin": 1e-9, "root_tol": 1e-12},
    "oracle": {"h": 1e-3, "tolerance": 1e-4},
    "output": {"dir": "out", "samples": 1000},
}


class ConfigError(Exception):
    """Configuration could not be parsed or validated."""


# ------------------------------------------------------------- formatting


def format_float(x: float) -> str:
    """15 significant digits; scientific (lowercase) when |x| < 1e-3 or |x| >= 1e6."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0:
        return "0"
    if abs(x) < 1e-3 or abs(x) >= 1e6:
        return f"{x:.14e}"
    return f"{x:.15g}"


def _csv_text(header: list[str], rows: list[list[Any]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_float(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _json_text(obj: Any) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n"


def _write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


# ---------------------------------------------------------------- config


def _parse_value(raw: str) -> Any:
    try:
        return tomllib.loads(f"v = {raw}")["v"]
    except tomllib.TOMLDecodeError:
        return raw


def _merge(base: dict, extra: dict) -> dict:
    out = copy.deepcopy(base)
    for key, value in extra.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _validate_keys(doc: dict) -> None:
    for key, value in doc.items():
        if isinstance(value, dict):
            if key not in _SCHEMA or key == "":
                raise ConfigError(f"unknown section [{key}]")
            for sub, v in value.items():
                _check_field(key, sub, v)
        else:
            _check_field("", key, value)


def _check_field(section: str, key: str, value: Any) -> None:
    name = f"{section}.{key}" if section else key
    allowed = _SCHEMA.get(section, {})
    if key not in allowed:
        raise ConfigError(f"unknown field '{name}'")
    types = allowed[key]
    if isinstance(value, bool) or not isinstance(value, types):
        raise ConfigError(f"field '{name}' has invalid value {value!r}")


@dataclass
class JobConfig:
    mode: str
    kind: ProfileKind
    model: dict[str, float]
    physical: dict[str, float]
    solver: dict[str, Any]
    oracle: dict[str, float]
    output: dict[str, Any]
    figure: dict[str, Any] = field(default_factory=dict)
    raw: dict[str, Any] = field(default_factory=dict, repr=False)

    @property
    def sha256(self) -> str:
        canon = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode("utf-8")).hexdigest()

    def physical_parameters(self) -> PhysicalParameters:
        p = self.physical
        missing = [k for k in ("m", "hbar", "U0", "UL", "A", "B") if k not in p]
        if self.kind is ProfileKind.EXPONENTIAL and "beta" not in p:
            missing.append("beta")
        if missing:
            raise ConfigError("missing field(s) " + ", ".join(f"'physical.{k}'" for k in missing))
        try:
            return PhysicalParameters(kind=self.kind, m=p["m"], hbar=p["hbar"], U0=p["U0"], UL=p["UL"],
                                      A=p["A"], B=p["B"], beta=p.get("beta"))
        except InvalidParameterError as exc:
            raise ConfigError(str(exc)) from exc

    def dimensionless_model(self) -> DimensionlessModel:
        try:
            return self._dimensionless_model()
        except InvalidParameterError as exc:
            raise ConfigError(str(exc)) from exc

    def _dimensionless_model(self) -> DimensionlessModel:
        if self.mode == "physical":
            return reduce(self.physical_parameters())
        m = self.model
        missing = [k for k in ("u0", "gamma") if k not in m]
        if self.kind is ProfileKind.EXPONENTIAL and "b" not in m:
            missing.append("b")
        if missing:
            raise ConfigError("missing field(s) " + ", ".join(f"'model.{k}'" for k in missing))
        return DimensionlessModel(kind=self.kind, u0=m["u0"], gamma=m["gamma"], a=m.get("a", 0.0),
                                  b=m.get("b") if self.kind is ProfileKind.EXPONENTIAL else None)

    def problem(self, model: DimensionlessModel) -> QuantizationProblem:
        s = self.solver
        method = None if s["method"] == "auto" else s["method"]
        try:
            evaluator = LogDerivativeEvaluator.for_model(model, method)
            return QuantizationProblem(model, evaluator, delta_max=s.get("delta_max"),
                                       margin=s["margin"], root_tol=s["root_tol"])
        except InvalidParameterError as exc:
            raise ConfigError(str(exc)) from exc


def load_config(path: str | None, params: list[str] | None = None, out: str | None = None) -> JobConfig:
    """Read, merge (defaults < file < flags) and validate a job configuration."""
    doc: dict[str, Any] = {}
    if path is not None:
        try:
            with open(path, "rb") as fh:
                doc = tomllib.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
    for item in params or []:
        if "=" not in item:
            raise ConfigError(f"--param expects key=value, got {item!r}")
        key, raw = item.split("=", 1)
        parts = key.strip().split(".")
        if len(parts) > 2 or not all(parts):
            raise ConfigError(f"--param key must be 'field' or 'section.field', got {key!r}")
        value = _parse_value(raw.strip())
        if len(parts) == 1:
            doc[parts[0]] = value
        else:
            doc.setdefault(parts[0], {})
            if not isinstance(doc[parts[0]], dict):
                raise ConfigError(f"'{parts[0]}' is not a section")
            doc[parts[0]][parts[1]] = value
    if out is not None:
        doc.setdefault("output", {})["dir"] = out
    _validate_keys(doc)
    merged = _merge(_DEFAULTS, doc)

    mode = merged["mode"]
    if mode not in ("physical", "dimensionless"):
        raise ConfigError(f"field 'mode' must be 'physical' or 'dimensionless', got {mode!r}")
    try:
        kind = ProfileKind.parse(merged["kind"])
    except DeltaBoundError as exc:
        raise ConfigError(f"field 'kind': {exc}") from exc
    for section, key in [("solver", "margin"), ("solver", "root_tol"), ("oracle", "h"), ("oracle", "tolerance")]:
        if not merged[section][key] > 0:
            raise ConfigError(f"field '{section}.{key}' must be > 0")
    if merged["output"]["samples"] < 2:
        raise ConfigError("field 'output.samples' must be >= 2")
    method = merged["solver"]["method"]
    if method != "auto" and method not in {m.value for m in Method}:
        raise ConfigError(f"field 'solver.method' has invalid value {method!r}")
    cases = merged.get("figure", {}).get("cases")
    if cases is not None:
        ok = all(isinstance(c, list) and len(c) == 2 and all(isinstance(v, (int, float)) and not isinstance(v, bool)
                                                           for v in c) for c in cases)
        if not ok or not cases:
            raise ConfigError("field 'figure.cases' must be a non-empty list of [u0, gamma] pairs")
    raw = {k: v for k, v in merged.items() if k != "output"}
    raw["output"] = {k: v for k, v in merged["output"].items() if k != "dir"}
    return JobConfig(mode=mode, kind=kind, model=merged.get("model", {}),
                     physical=merged.get("physical", {}), solver=merged["solver"],
                     oracle=merged["oracle"], output=merged["output"],
                     figure=merged.get("figure", {}), raw=raw)


# -------------------------------------------------------------- commands


def _model_section(model: DimensionlessModel) -> dict[str, Any]:
    return {"kind": model.kind.value, "u0": model.u0, "gamma": model.gamma, "a": model.a,
            "b": model.b}


def _physical_section(cfg: JobConfig, model: DimensionlessModel) -> dict[str, Any] | None:
    if cfg.mode != "physical":
        return None
    p = cfg.physical_parameters()
    return {"L": model.length, "energy_unit": restore_energy(model, p, 1.0),
            "parameters": {k: v for k, v in cfg.physical.items()}}


def cmd_reduce(cfg: JobConfig) -> int:
    model = cfg.dimensionless_model()
    report = {"config_sha256": cfg.sha256, "dimensionless": _model_section(model),
              "physical": _physical_section(cfg, model)}
    text = _json_text(report)
    sys.stdout.write(text)
    _write(Path(cfg.output["dir"]) / "reduce.json", text)
    return EXIT_OK


def cmd_solve(cfg: JobConfig) -> int:
    model = cfg.dimensionless_model()
    problem = cfg.problem(model)
    states = find_roots(problem)
    header = ["j", "delta", "epsilon", "alpha", "residual"]
    rows = [[s.index, s.delta, s.epsilon, s.alpha, s.residual] for s in states]
    if cfg.mode == "physical":
        p = cfg.physical_parameters()
        header.append("E_physical")
        for row, s in zip(rows, states):
            row.append(restore_energy(model, p, s.epsilon))
    out = Path(cfg.output["dir"])
    _write(out / "spectrum.csv", _csv_text(header, rows))
    meta = {
        "config_sha256": cfg.sha256,
        "mode": cfg.mode,
        "dimensionless": {
            **_model_section(model),
            "method": problem.evaluator.method.value,
            "condition": "R(delta) = 2*u0 + sqrt(delta + gamma)",
            "window": [problem.delta_min, problem.delta_max],
            "roots": [s.delta for s in states],
        },
        "physical": _physical_section(cfg, model),
    }
    _write(out / "spectrum.json", _json_text(meta))
    print(f"{len(states)} bound state(s): u0={format_float(model.u0)} gamma={format_float(model.gamma)} "
          f"a={format_float(model.a)}" + (f" b={format_float(model.b)}" if model.b is not None else ""))
    for row in rows:
        print("  " + "  ".join(f"{h}={format_float(v) if isinstance(v, float) else v}" for h, v in zip(header, row)))
    return EXIT_OK


def cmd_figure(cfg: JobConfig) -> int:
    base = cfg.dimensionless_model()
    if cfg.figure.get("cases"):
        cases = [(f"case_{i + 1}", float(u0), float(g)) for i, (u0, g) in enumerate(cfg.figure["cases"])]
    else:
        cases = FIGURE_CASES
    out = Path(cfg.output["dir"])
    n = int(cfg.output["samples"])
    for label, u0, gamma in cases:
        model = DimensionlessModel(base.kind, u0, gamma, base.a, base.b)
        data = graphical_data(cfg.problem(model), n)
        rows = [[float(d), float(l), float(r), int(g)] for d, l, r, g in
                zip(data.delta, data.lhs, data.rhs, data.pole_gap)]
        _write(out / f"figure_{label}.csv", _csv_text(["delta", "lhs", "rhs", "is_pole_gap"], rows))
        meta = {"config_sha256": cfg.sha256, "label": label, "u0": u0, "gamma": gamma,
                "kind": model.kind.value, "b": model.b, "samples": n,
                "poles": data.poles,
                "intersections": [{"delta": d, "value": v} for d, v in data.intersections]}
        _write(out / f"figure_{label}.json", _json_text(meta))
        print(f"case {label}: u0={format_float(u0)} gamma={format_float(gamma)} "
              f"intersections={len(data.intersections)}")
    return EXIT_OK


def cmd_compare(cfg: JobConfig) -> int:
    model = cfg.dimensionless_model()
    states = find_roots(cfg.problem(model))
    o = cfg.oracle
    grid = default_grid(model, h=o["h"], q_left=o.get("q_left"), q_right=o.get("q_right"))
    spectrum = eigen_below(model, grid)
    rich = richardson(model, grid)
    tol = o["tolerance"]
    n = max(len(states), spectrum.count)
    rows = []
    worst = worst_rich = 0.0
    for j in range(n):
        eq = states[j].epsilon if j < len(states) else math.nan
        eo = float(spectrum.eigenvalues[j]) if j < spectrum.count else math.nan
        er = float(rich.extrapolated[j]) if j < len(rich.extrapolated) else math.nan
        d, dr = abs(eq - eo), abs(eq - er)
        ok = d < tol
        worst = max(worst, d) if not math.isnan(d) else math.inf
        worst_rich = max(worst_rich, dr) if not math.isnan(dr) else math.inf
        rows.append([j + 1, eq, eo, d, er, dr, "pass" if ok else "fail"])
    passed = len(states) == spectrum.count and worst < tol
    out = Path(cfg.output["dir"])
    _write(out / "compare.csv", _csv_text(
        ["j", "epsilon_quantize", "epsilon_oracle", "abs_diff", "epsilon_richardson",
         "richardson_diff", "status"], rows))
    meta = {"config_sha256": cfg.sha256, "dimensionless": _model_section(model),
            "grid": {"q_left": grid.q_left, "q_right": grid.q_right, "n": grid.n, "h": grid.h},
            "tolerance": tol, "count_quantize": len(states), "count_oracle": spectrum.count,
            "max_abs_diff": worst if math.isfinite(worst) else None,
            "max_richardson_diff": worst_rich if math.isfinite(worst_rich) else None,
            "passed": passed}
    _write(out / "compare.json", _json_text(meta))
    print(f"quantize: {len(states)} state(s), oracle: {spectrum.count} state(s) on "
          f"[{format_float(grid.q_left)}, {format_float(grid.q_right)}] h={format_float(grid.h)}")
    print(f"max |delta eps| = {format_float(worst)} (tolerance {format_float(tol)}), "
          f"after Richardson {format_float(worst_rich)}: {'PASS' if passed else 'FAIL'}")
    return EXIT_OK if passed else EXIT_TOLERANCE


_COMMANDS = {"solve": cmd_solve, "figure": cmd_figure, "compare": cmd_compare, "reduce": cmd_reduce}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="deltabound", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", help="TOML configuration file")
    parser.add_argument("--out", help="output directory (overrides output.dir)")
    parser.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                        help="override a config field, e.g. model.u0=1 (repeatable)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, args.param, args.out)
        return _COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DeltaBoundError, ArithmeticError, RuntimeError, ValueError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
