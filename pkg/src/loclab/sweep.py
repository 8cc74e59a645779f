"""Parameter sweeps, localization-function curves and their file formats."""

from __future__ import annotations

import configparser
import csv
import io
import json
import math
import os
import tempfile
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, manybody
from .analytics import classify, ipr_bound, locfunc_localized_estimate, ssh_locfunc_limit
from .correlations import lt_structure_identity, structure_factor
from .freefermion import free_correlations
from .indicators import INDICATORS, evaluate, lt_resta
from .models import (GOLDEN_BETA, Boundary, LatticeSpec, ManyBodyHamiltonianSpec, build_aa_manybody,
                     build_aa_single, build_ssh, parse_beta)

MODELS = ("ssh", "aa_free", "aa_interacting")
CSV_HEADER = ("model", "N", "M", "delta", "V", "indicator", "raw", "normalized", "status")
CURVE_HEADER = ("p_index", "p_angle", "C_p", "bound", "estimate", "limit")
MAX_INTERACTING_SITES = 18


class ConfigError(ValueError):
    pass


def parse_grid(text) -> tuple[float, ...]:
    """``"a:b:step"`` (inclusive of b), ``"x,y,z"`` or a single number."""
    if isinstance(text, (int, float)):
        return (float(text),)
    text = str(text).strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"range must be start:stop:step, got {text!r}")
        start, stop, step = map(float, parts)
        if step <= 0 or stop < start:
            raise ConfigError(f"bad range {text!r}")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return tuple(round(start + i * step, 12) for i in range(count))
    values = tuple(float(x) for x in text.split(",") if x.strip())
    if not values:
        raise ConfigError("empty grid")
    return values


def _fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


@dataclass(frozen=True)
class SweepConfig:
    model: str
    lattice: LatticeSpec
    delta: tuple[float, ...] = (0.0,)
    v: tuple[float, ...] = (0.0,)
    J: float = 1.0
    beta: float = GOLDEN_BETA
    phase: float = 0.0
    indicators: tuple[str, ...] = INDICATORS
    out: str | None = None
    fmt: str = "csv"
    jobs: int | None = None
    full_sf: bool = False
    wrap_interaction: bool = True
    solver: str = "auto"

    def __post_init__(self):
        if self.model not in MODELS:
            raise ConfigError(f"model must be one of {MODELS}, got {self.model!r}")
        if not self.indicators:
            raise ConfigError("at least one indicator is required")
        bad = set(self.indicators) - set(INDICATORS)
        if bad:
            raise ConfigError(f"unknown indicators {sorted(bad)}")
        if not self.delta or not self.v:
            raise ConfigError("parameter grid is empty")
        if self.model == "aa_interacting" and self.lattice.n_sites > MAX_INTERACTING_SITES:
            raise ConfigError(f"interacting model limited to N <= {MAX_INTERACTING_SITES}")
        if self.model == "ssh" and self.lattice.n_sites % 2:
            raise ConfigError("SSH model needs even N")
        if self.fmt not in ("csv", "json"):
            raise ConfigError(f"format must be csv or json, got {self.fmt!r}")

    def points(self) -> list[tuple[float, float]]:
        vs = self.v if self.model == "aa_interacting" else (0.0,)
        return [(d, v) for v in vs for d in self.delta]


def load_config(path=None, overrides: dict | None = None) -> SweepConfig:
    """Read an INI recipe and apply non-None ``overrides`` (CLI flags win)."""
    cp = configparser.ConfigParser()
    if path is not None:
        if not cp.read(path):
            raise ConfigError(f"cannot read config {path}")

    def get(section, key, default=None):
        return cp.get(section, key, fallback=default) if cp.has_section(section) else default

    raw = {
        "model": get("model", "name", "ssh"),
        "J": get("model", "J", "1.0"),
        "beta": get("model", "beta_rational", None) or get("model", "beta", None),
        "phase": get("model", "phase", "0.0"),
        "wrap_interaction": get("model", "wrap_interaction", "true"),
        "n": get("lattice", "n", None),
        "filling": get("lattice", "filling", None),
        "boundary": get("lattice", "boundary", "periodic"),
        "delta": get("grid", "delta", "0.0"),
        "v": get("grid", "v", "0.0"),
        "indicators": get("indicators", "use", ",".join(INDICATORS)),
        "out": get("output", "path", None),
        "format": get("output", "format", "csv"),
        "full_sf": get("output", "full_sf", "false"),
        "jobs": get("solver", "jobs", None),
        "solver": get("solver", "method", "auto"),
    }
    for k, val in (overrides or {}).items():
        if val is not None:
            raw[k] = val

    if raw["n"] is None:
        raise ConfigError("lattice size N is required (--n or [lattice] n)")
    try:
        n = int(raw["n"])
        filling = None if raw["filling"] in (None, "") else int(raw["filling"])
        lattice = LatticeSpec(n, Boundary(str(raw["boundary"])), filling)
        beta = GOLDEN_BETA if raw["beta"] in (None, "") else parse_beta(raw["beta"])
        indicators = raw["indicators"]
        if isinstance(indicators, str):
            indicators = tuple(s.strip() for s in indicators.split(",") if s.strip())
        return SweepConfig(
            model=str(raw["model"]),
            lattice=lattice,
            delta=parse_grid(raw["delta"]),
            v=parse_grid(raw["v"]),
            J=float(raw["J"]),
            beta=beta,
            phase=float(raw["phase"]),
            indicators=tuple(indicators),
            out=raw["out"],
            fmt=str(raw["format"]),
            jobs=None if raw["jobs"] in (None, "") else int(raw["jobs"]),
            full_sf=_truthy(raw["full_sf"]),
            wrap_interaction=_truthy(raw["wrap_interaction"]),
            solver=str(raw["solver"]),
        )
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc


def _truthy(x) -> bool:
    if isinstance(x, bool):
        return x
    return str(x).strip().lower() in ("1", "true", "yes", "on")


@dataclass
class PointState:
    """Everything computed at one grid point."""

    corr: object
    orbitals: object = None
    mb_state: object = None


def solve_point(cfg: SweepConfig, delta: float, v: float = 0.0, previous=None) -> PointState:
    lat = cfg.lattice
    if cfg.model == "ssh":
        orb, corr = free_correlations(build_ssh(lat.n_sites, delta, lat.boundary, lat.filling))
        return PointState(corr, orb)
    if cfg.model == "aa_free":
        h = build_aa_single(lat.n_sites, cfg.J, delta, cfg.beta, cfg.phase, lat.boundary, lat.filling)
        orb, corr = free_correlations(h)
        return PointState(corr, orb)
    spec = ManyBodyHamiltonianSpec(lat, cfg.J, delta, cfg.beta, cfg.phase, v, cfg.wrap_interaction)
    basis = manybody.build_basis(lat.n_sites, lat.filling)
    h = manybody.assemble(build_aa_manybody(spec), basis)
    state = manybody.ground_state(h, basis, method=cfg.solver, previous=previous)
    return PointState(manybody.density_density_mb(state), None, state)


def _evaluate_chain(cfg: SweepConfig, chain: list[tuple[float, float]]):
    """Evaluate grid points in order, carrying the many-body state for continuity."""
    out = []
    previous = None
    for delta, v in chain:
        t0 = time.perf_counter()
        diag = {"delta": delta, "V": v}
        try:
            pt = solve_point(cfg, delta, v, previous)
            previous = pt.mb_state
            report = evaluate(pt.corr, cfg.indicators, cfg.lattice.boundary)
            values = {k: (iv.raw, iv.normalized) for k, iv in report.values.items()}
            if pt.mb_state is not None:
                diag["solver"] = {k: val for k, val in pt.mb_state.metadata.items() if k != "history"}
                diag["energy"] = pt.mb_state.energy
            if cfg.full_sf:
                sf = structure_factor(pt.corr, full=True)
                diag["identity_residual"] = abs(lt_structure_identity(sf) - lt_resta(pt.corr))
            status = "ok"
        except Exception as exc:  # noqa: BLE001 - recorded per point, sweep continues
            previous = None
            values = {k: (math.nan, math.nan) for k in cfg.indicators}
            diag["error"] = f"{type(exc).__name__}: {exc}"
            status = "failed"
        diag["seconds"] = time.perf_counter() - t0
        out.append((delta, v, values, status, diag))
    return out


@dataclass
class SweepResult:
    rows: list[dict]
    metadata: dict = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return any(r["status"] != "ok" for r in self.rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            w.writerow([_fmt(r[k]) for k in CSV_HEADER])
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps({"metadata": self.metadata, "rows": self.rows}, indent=2, default=_json_default)


def _json_default(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, np.bool_):
        return bool(x)
    if isinstance(x, Path):
        return str(x)
    raise TypeError(f"not serializable: {type(x).__name__}")


def run_sweep(cfg: SweepConfig, jobs: int | None = None) -> SweepResult:
    """Evaluate every grid point; rows come out sorted by (delta, V, indicator)."""
    jobs = jobs if jobs is not None else (cfg.jobs or os.cpu_count() or 1)
    points = cfg.points()
    if cfg.model == "aa_interacting":
        # sequential in delta per V so degenerate ground states are followed continuously
        chains = [[p for p in points if p[1] == v] for v in dict.fromkeys(p[1] for p in points)]
    else:
        chains = [[p] for p in points]

    t0 = time.perf_counter()
    if jobs > 1 and len(chains) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(chains))) as ex:
            results = list(ex.map(_evaluate_chain, [cfg] * len(chains), chains))
    else:
        results = [_evaluate_chain(cfg, ch) for ch in chains]
    evaluated = [item for chunk in results for item in chunk]

    rows, diagnostics = [], []
    lat = cfg.lattice
    for delta, v, values, status, diag in sorted(evaluated, key=lambda t: (t[0], t[1])):
        diagnostics.append(diag)
        for name in sorted(values):
            raw, norm = values[name]
            rows.append({"model": cfg.model, "N": lat.n_sites, "M": lat.filling, "delta": float(delta),
                         "V": float(v), "indicator": name, "raw": float(raw), "normalized": float(norm),
                         "status": status})
    cfg_dict = {k: getattr(cfg, k) for k in cfg.__dataclass_fields__}
    cfg_dict["lattice"] = {"n_sites": lat.n_sites, "filling": lat.filling, "boundary": lat.boundary.value}
    meta = {"tool": "loclab", "version": __version__, "config": cfg_dict, "jobs": jobs,
            "seconds": time.perf_counter() - t0, "points": diagnostics}
    return SweepResult(rows, meta)


def atomic_write(path, text: str) -> None:
    """Write via a temporary file in the same directory and rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def locfunc_curve(cfg: SweepConfig, delta: float, v: float = 0.0) -> list[dict]:
    """Per-momentum C_p with the IPR bound, localized estimate and (SSH) thermodynamic limit."""
    pt = solve_point(cfg, delta, v)
    sf = structure_factor(pt.corr)
    n = cfg.lattice.n_sites
    angles = sf.angles
    bound = est = None
    if pt.orbitals is not None:
        bound = ipr_bound(pt.orbitals)
        est = locfunc_localized_estimate(pt.orbitals).estimate
    limit = None
    if cfg.model == "ssh" and cfg.lattice.periodic and cfg.lattice.filling == n // 2:
        folded = np.minimum(angles, 2.0 * np.pi - angles)
        limit = ssh_locfunc_limit(folded, delta)
    rows = []
    for p in range(n):
        rows.append({
            "p_index": p,
            "p_angle": float(angles[p]),
            "C_p": float(sf.diagonal[p]),
            "bound": None if bound is None else float(bound),
            "estimate": None if est is None else float(est[p]),
            "limit": None if limit is None else float(limit[p]),
        })
    return rows


def curve_to_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CURVE_HEADER)
    for r in rows:
        w.writerow(["" if r[k] is None else _fmt(r[k]) for k in CURVE_HEADER])
    return buf.getvalue()


def classify_point(cfg: SweepConfig, delta: float, v: float = 0.0) -> dict:
    pt = solve_point(cfg, delta, v)
    verdict = classify(structure_factor(pt.corr), pt.orbitals)
    lat = cfg.lattice
    return {"model": cfg.model, "N": lat.n_sites, "M": lat.filling, "delta": delta, "V": v,
            "label": verdict.label, "evidence": verdict.evidence}
