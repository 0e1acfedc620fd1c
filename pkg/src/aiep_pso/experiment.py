"""Declarative experiment runs.

An experiment file is INI text with the sections ``[problem]``,
``[embedding]``, ``[pso]`` and ``[run]``; see ``experiments/`` and the README
for the schema.  Every artifact written here starts with ``#`` comment lines
holding the fully resolved experiment as JSON.
"""

from __future__ import annotations

import configparser
import dataclasses
import hashlib
import json
import os
import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import aiep, embedding, femodel, linalg, pso
from .errors import ConfigError, ValidationError
from .linalg import SystemPair

PROBLEM_KINDS = ("toy", "fe", "custom")


@dataclass(frozen=True)
class ExperimentSpec:
    problem: str = "toy"
    fe_elements: int = 5
    mass_ratio: float = femodel.B737_MASS_RATIO
    mass_file: str | None = None
    stiffness_file: str | None = None
    targets: tuple = aiep.TOY_TARGETS
    compare: str = "eigenvalue"
    penalty: float = aiep.DEFAULT_PENALTY
    mass_scale: float = 1.0
    stiffness_scale: float = 1.0
    embedding_d: int | None = None
    box_halfwidth: float = embedding.DEFAULT_BOX_HALFWIDTH
    embedding_scale: str = "std"
    pso: pso.PsoConfig = field(default_factory=lambda: pso.PsoConfig(particles=500, per_dimension_r=True))
    seeds: tuple = tuple(range(10))
    output_dir: str = "runs/experiment"
    threads: int = 1

    @property
    def n(self) -> int:
        return len(self.targets)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["targets"] = list(self.targets)
        d["seeds"] = list(self.seeds)
        d.pop("threads")
        return d


def derive_seed(master: int, label: str) -> int:
    """Stable 63-bit seed for a named consumer of a run's master seed."""
    digest = hashlib.sha256(f"{int(master)}:{label}".encode()).digest()
    return int.from_bytes(digest[:8], "big") >> 1


def header_lines(payload: dict, title: str) -> str:
    body = json.dumps(payload, sort_keys=True, default=str)
    return f"# {title}\n# spec: {body}\n"


# ---------------------------------------------------------------- parsing

_PROBLEM_KEYS = {"kind", "fe_elements", "mass_ratio", "mass_file", "stiffness_file", "targets",
                 "n", "compare", "penalty", "mass_scale", "stiffness_scale"}
_EMBEDDING_KEYS = {"d", "box_halfwidth", "scale"}
_PSO_KEYS = {"omega", "c1", "c2", "alpha", "particles", "max_iters", "init_span", "vmax",
             "per_dimension_r"}
_RUN_KEYS = {"seeds", "output_dir", "threads"}
_SECTIONS = {"problem": _PROBLEM_KEYS, "embedding": _EMBEDDING_KEYS, "pso": _PSO_KEYS, "run": _RUN_KEYS}


def _locate(text: str, section: str, key: str | None):
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        m = re.match(r"\[(.+)\]$", line)
        if m:
            current = m.group(1).strip()
            if key is None and current == section:
                return lineno
            continue
        if current == section and key is not None and re.match(rf"{re.escape(key)}\s*[=:]", line):
            return lineno
    return None


def _number_list(value, cast, what):
    value = value.strip()
    m = re.fullmatch(r"range\(\s*(-?\d+)\s*,\s*(-?\d+)\s*\)", value)
    if m:
        return tuple(range(int(m.group(1)), int(m.group(2))))
    parts = [p for p in re.split(r"[,\s]+", value) if p]
    if not parts:
        raise ValueError(f"empty {what} list")
    return tuple(cast(p) for p in parts)


def _bool(value):
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {value!r}")


def _optional_int(value):
    v = value.strip().lower()
    return None if v in ("", "none", "full") else int(v)


def parse_spec(text: str, base_dir: Path | str = ".") -> ExperimentSpec:
    """Parse experiment-file text into a validated :class:`ExperimentSpec`."""
    cp = configparser.ConfigParser(interpolation=None)
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed experiment file: {exc}", line=getattr(exc, "lineno", None)) from exc

    for section in cp.sections():
        if section not in _SECTIONS:
            raise ConfigError(f"unknown section [{section}]", field=section, line=_locate(text, section, None))
        for key in cp[section]:
            if key not in _SECTIONS[section]:
                raise ConfigError("unknown key", field=f"{section}.{key}", line=_locate(text, section, key))

    kwargs, pso_kwargs = {}, {}

    def get(section, key, conv, dest, target=kwargs):
        if cp.has_option(section, key):
            raw = cp.get(section, key)
            try:
                target[dest] = conv(raw)
            except (ValueError, TypeError) as exc:
                raise ConfigError(f"bad value {raw!r}: {exc}", field=f"{section}.{key}",
                                  line=_locate(text, section, key)) from exc

    get("problem", "kind", str.strip, "problem")
    get("problem", "fe_elements", int, "fe_elements")
    get("problem", "mass_ratio", float, "mass_ratio")
    get("problem", "mass_file", str.strip, "mass_file")
    get("problem", "stiffness_file", str.strip, "stiffness_file")
    get("problem", "targets", lambda v: _number_list(v, float, "target"), "targets")
    get("problem", "compare", str.strip, "compare")
    get("problem", "penalty", float, "penalty")
    get("problem", "mass_scale", float, "mass_scale")
    get("problem", "stiffness_scale", float, "stiffness_scale")
    get("embedding", "d", _optional_int, "embedding_d")
    get("embedding", "box_halfwidth", float, "box_halfwidth")
    get("embedding", "scale", str.strip, "embedding_scale")
    for key, conv in (("omega", float), ("c1", float), ("c2", float), ("alpha", float),
                      ("particles", int), ("max_iters", int), ("init_span", float),
                      ("vmax", lambda v: None if v.strip().lower() in ("", "none") else float(v)),
                      ("per_dimension_r", _bool)):
        get("pso", key, conv, key, pso_kwargs)
    get("run", "seeds", lambda v: _number_list(v, int, "seed"), "seeds")
    get("run", "output_dir", str.strip, "output_dir")
    get("run", "threads", int, "threads")

    for key in ("mass_file", "stiffness_file"):
        if kwargs.get(key):
            kwargs[key] = str((Path(base_dir) / kwargs[key]).resolve())

    n = None
    if cp.has_option("problem", "n"):
        try:
            n = int(cp.get("problem", "n"))
        except ValueError as exc:
            raise ConfigError(str(exc), field="problem.n", line=_locate(text, "problem", "n")) from exc

    try:
        defaults = ExperimentSpec()
        pso_cfg = dataclasses.replace(defaults.pso, **pso_kwargs)
    except ValidationError as exc:
        raise ConfigError(str(exc), field="pso") from exc
    spec = dataclasses.replace(defaults, pso=pso_cfg, **kwargs)
    validate(spec, n=n, text=text)
    return spec


def load_spec(path) -> ExperimentSpec:
    path = Path(path)
    return parse_spec(path.read_text(), base_dir=path.parent)


def validate(spec: ExperimentSpec, n: int | None = None, text: str = "") -> None:
    def fail(msg, section, key):
        raise ConfigError(msg, field=f"{section}.{key}", line=_locate(text, section, key) if text else None)

    if spec.problem not in PROBLEM_KINDS:
        fail(f"kind must be one of {PROBLEM_KINDS}", "problem", "kind")
    if spec.problem == "custom" and not (spec.mass_file and spec.stiffness_file):
        fail("custom problems need mass_file and stiffness_file", "problem", "kind")
    if spec.fe_elements < 1:
        fail("fe_elements must be >= 1", "problem", "fe_elements")
    if n is not None and n != len(spec.targets):
        fail(f"n = {n} but {len(spec.targets)} targets given", "problem", "n")
    if list(spec.targets) != sorted(spec.targets):
        fail("targets must be ascending", "problem", "targets")
    if spec.compare not in ("eigenvalue", "frequency"):
        fail("compare must be 'eigenvalue' or 'frequency'", "problem", "compare")
    if spec.embedding_scale not in ("std", "variance"):
        fail("scale must be 'std' or 'variance'", "embedding", "scale")
    if not spec.box_halfwidth > 0:
        fail("box_halfwidth must be positive", "embedding", "box_halfwidth")
    if not spec.seeds:
        fail("at least one seed is required", "run", "seeds")
    if spec.threads < 1:
        fail("threads must be >= 1", "run", "threads")
    if spec.problem != "custom":
        order = 10 if spec.problem == "toy" else 2 * (spec.fe_elements + 1) - 1
        if len(spec.targets) > order:
            fail(f"{len(spec.targets)} targets exceed the system order {order}", "problem", "targets")
        D = aiep.free_parameter_count(order)
        if spec.embedding_d is not None and not 1 <= spec.embedding_d <= D:
            fail(f"d must lie in [1, {D}]", "embedding", "d")


# ---------------------------------------------------------------- running

def build_problem(spec: ExperimentSpec) -> aiep.AiepProblem:
    scale = 1.0
    if spec.problem == "toy":
        base = aiep.toy_system()
    elif spec.problem == "fe":
        cfg = femodel.WingConfig(spec.fe_elements, R=spec.mass_ratio)
        base = femodel.assemble(cfg, femodel.SYMMETRIC).system
        scale = cfg.frequency_scale
    else:
        base = SystemPair(linalg.read_matrix(spec.mass_file), linalg.read_matrix(spec.stiffness_file))
    problem = aiep.AiepProblem(base, spec.targets, penalty=spec.penalty, compare=spec.compare,
                               freq_scale=scale, mass_scale=spec.mass_scale,
                               stiffness_scale=spec.stiffness_scale)
    if spec.embedding_d is not None and spec.embedding_d > problem.dimension:
        raise ConfigError(f"d must lie in [1, {problem.dimension}]", field="embedding.d")
    return problem


def run_seed(spec: ExperimentSpec, problem: aiep.AiepProblem, seed: int) -> pso.PsoResult:
    cfg = dataclasses.replace(spec.pso, seed=derive_seed(seed, "pso"))
    if spec.embedding_d is None:
        f = aiep.direct_objective(problem, spec.box_halfwidth, vectorized=True)
        dim = problem.dimension
    else:
        emb = embedding.make_embedding(problem.dimension, spec.embedding_d, spec.box_halfwidth,
                                       seed=derive_seed(seed, "embedding"), scale=spec.embedding_scale)
        f = aiep.embedded_objective(problem, emb, vectorized=True)
        dim = spec.embedding_d
    return pso.minimize(f, dim, cfg, vectorized=True, threads=spec.threads)


@dataclass
class RunSummary:
    spec: ExperimentSpec
    finals: dict
    aggregate: np.ndarray  # columns: iteration, mean, median, min
    output_dir: Path

    @property
    def median_final(self) -> float:
        return float(np.median(list(self.finals.values())))


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def run_experiment(spec: ExperimentSpec, output_dir=None, log=None) -> RunSummary:
    """Run every seed, write per-seed traces and the cross-seed aggregate."""
    out = Path(output_dir or spec.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    header = header_lines(spec.to_dict(), "aiep-pso run")
    problem = build_problem(spec)
    traces, finals = [], {}
    for seed in spec.seeds:
        result = run_seed(spec, problem, seed)
        result.trace.to_csv(out / f"seed_{seed}.csv", header=header + f"# seed: {seed}\n")
        traces.append(result.trace.global_best_val)
        finals[int(seed)] = float(result.best_val)
        if log:
            log(f"seed {seed}: final objective {result.best_val:.6g}")
    T = np.vstack(traces)
    agg = np.column_stack([np.arange(T.shape[1]), T.mean(0), np.median(T, 0), T.min(0)])
    lines = [header.rstrip("\n"), "iteration,mean,median,min"]
    lines += [f"{int(r[0])},{float(r[1])!r},{float(r[2])!r},{float(r[3])!r}" for r in agg]
    _atomic_write(out / "aggregate.csv", "\n".join(lines) + "\n")
    summary = {"spec": spec.to_dict(), "final_objective": {str(k): v for k, v in finals.items()},
               "median_final": float(np.median(list(finals.values())))}
    _atomic_write(out / "summary.json", json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return RunSummary(spec, finals, agg, out)


# ---------------------------------------------------------------- presets

def toy_spec(d: int | None, **overrides) -> ExperimentSpec:
    return dataclasses.replace(ExperimentSpec(problem="toy", embedding_d=d), **overrides)


def fe_spec(elements: int, d: int | None, particles: int = 500, **overrides) -> ExperimentSpec:
    base = ExperimentSpec(
        problem="fe", fe_elements=elements, targets=(2.0, 7.0, 22.0), compare="frequency",
        mass_scale=FE_MASS_SCALE, embedding_d=d,
        pso=pso.PsoConfig(particles=particles, init_span=FE_INIT_SPAN, per_dimension_r=True),
    )
    return dataclasses.replace(base, **overrides)


FE_MASS_SCALE = 1e-12
FE_INIT_SPAN = 0.1
