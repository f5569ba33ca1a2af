"""Named scenarios, JSON configs, the batch runner and audit reporting.

A scenario couples a model, an initial state and integrator settings, and
on running produces one CSV ledger per subsystem plus a human-readable
report, with optional SVG and PNG panels. All model builders work in the
frame whose z axis is the field direction, so the ``field`` vector must
point along +z (its modulus sets the energy unit eps).

Config schema (flat JSON object; unknown keys are rejected):

    name           str, required
    model          "thermal_bath" | "dephasing" | "two_atom" | "exchange_unitary"
    gamma0         float > 0 (thermal_bath, two_atom; default 1.0)
    T_env          float >= 0 (thermal_bath, required)
    gamma_phi      float > 0 (dephasing, required)
    g              float in [0, 1] (two_atom, required)
    J              float != 0 (exchange_unitary, required)
    bloch          [x, y, z] initial Bloch vector (2-dim models, required)
    bloch_a/_b     initial Bloch vectors of a product state (4-dim models)
    rho4           explicit 4x4 density entries, each [re, im] (alternative
                   to bloch_a/bloch_b)
    field          [x, y, z], default [0, 0, 1]; must point along +z
    dt             float > 0, default 1e-3
    t_max          float > 0, default 10.0
    sample_stride  int >= 1, default 1
    out_dir        str, default "out"
    plots          bool, default true (matplotlib PNG panels)
"""

from __future__ import annotations

import dataclasses
import json
import math
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .csvio import write_csv
from .dynamics import (
    IntegrationError,
    IntegratorConfig,
    LindbladModel,
    dephasing_model,
    exchange_unitary_model,
    integrate,
    thermal_bath_model,
    two_atom_model,
)
from .states import BlochState, EffectiveField, PhysicalityError, bloch_to_density, require_density
from .svgchart import write_svg
from .thermo import EnvironmentSpec, LedgerAudit, ThermoLedger, annotate_trajectory

MODEL_NAMES = ("thermal_bath", "dephasing", "two_atom", "exchange_unitary")

_COMMON_KEYS = {"name", "model", "field", "dt", "t_max", "sample_stride",
                "out_dir", "plots"}
_MODEL_KEYS = {
    "thermal_bath": {"required": {"T_env"}, "optional": {"gamma0"},
                     "state": ("bloch",)},
    "dephasing": {"required": {"gamma_phi"}, "optional": set(),
                  "state": ("bloch",)},
    "two_atom": {"required": {"g"}, "optional": {"gamma0"},
                 "state": ("bloch_a", "bloch_b", "rho4")},
    "exchange_unitary": {"required": {"J"}, "optional": set(),
                         "state": ("bloch_a", "bloch_b", "rho4")},
}
SWEEPABLE_PARAMS = ("gamma0", "T_env", "gamma_phi", "g", "J", "dt", "t_max")


class ConfigError(ValueError):
    """A scenario configuration is malformed or unphysical."""


@dataclass(frozen=True)
class Panel:
    """One chart: named series drawn against a common x quantity."""

    name: str
    x_quantity: str
    series: tuple[str, ...]


DEFAULT_PANELS = (
    Panel("heat_work", "t", ("Q1", "W1", "Q2", "W2")),
    Panel("temperature", "t", ("T1", "T2")),
)


@dataclass(frozen=True)
class ScenarioConfig:
    name: str
    model: str
    gamma0: float = 1.0
    t_env: float | None = None
    gamma_phi: float | None = None
    g: float | None = None
    j_coupling: float | None = None
    bloch: tuple[float, float, float] | None = None
    bloch_a: tuple[float, float, float] | None = None
    bloch_b: tuple[float, float, float] | None = None
    rho4: tuple | None = None
    field: tuple[float, float, float] = (0.0, 0.0, 1.0)
    dt: float = 1e-3
    t_max: float = 10.0
    sample_stride: int = 1
    out_dir: str = "out"
    plots: bool = True
    panels: tuple[Panel, ...] = DEFAULT_PANELS
    description: str = ""

    @property
    def dim(self) -> int:
        return 2 if self.model in ("thermal_bath", "dephasing") else 4

    @property
    def eps(self) -> float:
        return float(np.linalg.norm(self.field))

    def to_dict(self) -> dict:
        """Flat JSON-schema dict (panels and description are not config keys)."""
        d: dict = {"name": self.name, "model": self.model,
                   "field": list(self.field), "dt": self.dt, "t_max": self.t_max,
                   "sample_stride": self.sample_stride, "out_dir": self.out_dir,
                   "plots": self.plots}
        if self.model in ("thermal_bath", "two_atom"):
            d["gamma0"] = self.gamma0
        if self.t_env is not None:
            d["T_env"] = self.t_env
        if self.gamma_phi is not None:
            d["gamma_phi"] = self.gamma_phi
        if self.g is not None:
            d["g"] = self.g
        if self.j_coupling is not None:
            d["J"] = self.j_coupling
        if self.bloch is not None:
            d["bloch"] = list(self.bloch)
        if self.bloch_a is not None:
            d["bloch_a"] = list(self.bloch_a)
        if self.bloch_b is not None:
            d["bloch_b"] = list(self.bloch_b)
        if self.rho4 is not None:
            d["rho4"] = [[list(entry) for entry in row] for row in self.rho4]
        return d


def _vector3(value, key: str) -> tuple[float, float, float]:
    try:
        x, y, z = (float(c) for c in value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: expected three numbers, got {value!r}") from None
    return (x, y, z)


def _bloch_vector(value, key: str) -> tuple[float, float, float]:
    vec = _vector3(value, key)
    m = math.sqrt(sum(c * c for c in vec))
    if m > 1.0 + 1e-9:
        raise ConfigError(f"{key}: Bloch vector {list(vec)} has modulus "
                          f"{m:.6f} > 1, not a physical state")
    return vec


def _positive(value, key: str) -> float:
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: expected a number, got {value!r}") from None
    if x <= 0.0:
        raise ConfigError(f"{key}: must be positive, got {x!r}")
    return x


def _rho4_entries(value) -> tuple:
    try:
        rows = []
        for row in value:
            cells = []
            for entry in row:
                if isinstance(entry, (int, float)):
                    cells.append((float(entry), 0.0))
                else:
                    re_, im_ = entry
                    cells.append((float(re_), float(im_)))
            rows.append(tuple(cells))
        rows = tuple(rows)
    except (TypeError, ValueError):
        raise ConfigError("rho4: expected a 4x4 nested list of numbers or "
                          "[re, im] pairs") from None
    if len(rows) != 4 or any(len(r) != 4 for r in rows):
        raise ConfigError("rho4: expected exactly 4 rows of 4 entries")
    m = np.array([[complex(re_, im_) for re_, im_ in row] for row in rows])
    try:
        require_density(m, what="rho4")
    except (ValueError, PhysicalityError) as exc:
        raise ConfigError(f"rho4: {exc}") from None
    return rows


def config_from_dict(raw: Mapping, origin: str = "config") -> ScenarioConfig:
    """Validate a flat config mapping and apply defaults."""
    if not isinstance(raw, Mapping):
        raise ConfigError(f"{origin}: expected a JSON object")
    raw = dict(raw)

    model = raw.get("model")
    if model is None:
        raise ConfigError(f"{origin}: missing required field 'model'")
    if model not in MODEL_NAMES:
        raise ConfigError(f"{origin}: unknown model {model!r}; expected one of "
                          f"{', '.join(MODEL_NAMES)}")
    keys = _MODEL_KEYS[model]
    allowed = _COMMON_KEYS | keys["required"] | keys["optional"] | set(keys["state"])
    unknown = sorted(set(raw) - allowed)
    if unknown:
        raise ConfigError(f"{origin}: unknown config key(s) for model "
                          f"{model!r}: {', '.join(unknown)}")
    missing = sorted(k for k in keys["required"] if k not in raw)
    if missing:
        raise ConfigError(f"{origin}: missing required field(s) for model "
                          f"{model!r}: {', '.join(missing)}")
    if "name" not in raw:
        raise ConfigError(f"{origin}: missing required field 'name'")

    kw: dict = {"name": str(raw["name"]), "model": model}

    if "gamma0" in raw:
        kw["gamma0"] = _positive(raw["gamma0"], "gamma0")
    if "T_env" in raw:
        t_env = float(raw["T_env"])
        if t_env < 0.0:
            raise ConfigError(f"T_env: must be >= 0, got {t_env!r}")
        kw["t_env"] = t_env
    if "gamma_phi" in raw:
        kw["gamma_phi"] = _positive(raw["gamma_phi"], "gamma_phi")
    if "g" in raw:
        g = float(raw["g"])
        if not 0.0 <= g <= 1.0:
            raise ConfigError(f"g: exchange ratio must lie in [0, 1], got {g!r}")
        kw["g"] = g
    if "J" in raw:
        j = float(raw["J"])
        if j == 0.0:
            raise ConfigError("J: exchange coupling must be nonzero")
        kw["j_coupling"] = j

    dim = 2 if model in ("thermal_bath", "dephasing") else 4
    if dim == 2:
        if "bloch" not in raw:
            raise ConfigError(f"{origin}: missing required field 'bloch'")
        kw["bloch"] = _bloch_vector(raw["bloch"], "bloch")
    else:
        has_pair = "bloch_a" in raw or "bloch_b" in raw
        if "rho4" in raw:
            if has_pair:
                raise ConfigError(f"{origin}: give either rho4 or bloch_a/bloch_b, not both")
            kw["rho4"] = _rho4_entries(raw["rho4"])
        else:
            if "bloch_a" not in raw or "bloch_b" not in raw:
                raise ConfigError(f"{origin}: two-qubit models need bloch_a and "
                                  "bloch_b (or an explicit rho4)")
            kw["bloch_a"] = _bloch_vector(raw["bloch_a"], "bloch_a")
            kw["bloch_b"] = _bloch_vector(raw["bloch_b"], "bloch_b")

    if "field" in raw:
        fx, fy, fz = _vector3(raw["field"], "field")
        if fx != 0.0 or fy != 0.0 or fz <= 0.0:
            raise ConfigError(f"field: must point along +z (the model frame), "
                              f"got {[fx, fy, fz]}")
        kw["field"] = (fx, fy, fz)
    if "dt" in raw:
        kw["dt"] = _positive(raw["dt"], "dt")
    if "t_max" in raw:
        kw["t_max"] = _positive(raw["t_max"], "t_max")
    if "sample_stride" in raw:
        stride = int(raw["sample_stride"])
        if stride < 1:
            raise ConfigError(f"sample_stride: must be >= 1, got {stride!r}")
        kw["sample_stride"] = stride
    if "out_dir" in raw:
        kw["out_dir"] = str(raw["out_dir"])
    if "plots" in raw:
        kw["plots"] = bool(raw["plots"])

    return ScenarioConfig(**kw)


def parse_config(source: str | Path) -> ScenarioConfig:
    """Parse a scenario config from a JSON file path or inline JSON text."""
    text = str(source)
    if text.lstrip().startswith("{"):
        origin = "inline config"
    else:
        path = Path(source)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        text = path.read_text(encoding="utf-8")
        origin = str(path)
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{origin}: invalid JSON ({exc})") from None
    return config_from_dict(raw, origin)


_BUILTIN_RAW: dict[str, dict] = {
    "fig2": {
        "name": "fig2", "model": "thermal_bath", "gamma0": 1.0, "T_env": 10.0,
        "bloch": [0.2, 0.5, 0.4], "t_max": 8.0,
    },
    "fig3": {
        "name": "fig3", "model": "thermal_bath", "gamma0": 1.0, "T_env": 10.0,
        "bloch": [0.2, 0.5, 0.4], "t_max": 8.0,
    },
    "fig4": {
        "name": "fig4", "model": "two_atom", "gamma0": 1.0, "g": 0.8,
        "bloch_a": [0.0, 0.5, 0.8], "bloch_b": [0.0, 0.0, 1.0], "t_max": 12.0,
    },
    "fig5": {
        "name": "fig5", "model": "two_atom", "gamma0": 1.0, "g": 0.8,
        "bloch_a": [0.0, 0.5, 0.8], "bloch_b": [0.0, 0.0, 1.0], "t_max": 12.0,
    },
    "dephasing-demo": {
        "name": "dephasing-demo", "model": "dephasing", "gamma_phi": 1.0,
        "bloch": [0.5, 0.0, 0.5], "t_max": 6.0,
    },
    "schmidt-demo": {
        "name": "schmidt-demo", "model": "exchange_unitary", "J": 1.0,
        "bloch_a": [0.6, 0.0, 0.8], "bloch_b": [0.0, 0.0, 1.0], "t_max": 6.0,
    },
}

_BUILTIN_PANELS: dict[str, tuple[Panel, ...]] = {
    "fig2": DEFAULT_PANELS,
    "fig3": (Panel("bloch_xz", "bx", ("bz",)), Panel("bloch_yz", "by", ("bz",))),
    "fig4": (Panel("bloch_yz", "by", ("bz",)),),
    "fig5": DEFAULT_PANELS,
    "dephasing-demo": DEFAULT_PANELS + (Panel("coherence", "t", ("coherence", "S")),),
    "schmidt-demo": (Panel("entropy", "t", ("S",)),) + DEFAULT_PANELS[:1],
}

_BUILTIN_DESCRIPTIONS = {
    "fig2": "single atom in a thermal field at k_B T_env/eps = 10: heat/work and temperatures",
    "fig3": "same run as fig2, Bloch-path projections onto the xz and yz planes",
    "fig4": "two atoms in a common zero-T environment (g = 0.8): Bloch paths per atom",
    "fig5": "same run as fig4: heat/work and temperature panels per atom",
    "dephasing-demo": "pure dephasing of (0.5, 0, 0.5): dissipation-free in paradigm 1",
    "schmidt-demo": "excitation exchange from a pure product state: equal subsystem entropies",
    # horizons are artifact choices picked so every curve visibly saturates
}

BUILTIN_NAMES = tuple(_BUILTIN_RAW)


def builtin_config(name: str) -> ScenarioConfig:
    if name not in _BUILTIN_RAW:
        raise ConfigError(f"unknown built-in scenario {name!r}; available: "
                          f"{', '.join(BUILTIN_NAMES)}")
    cfg = config_from_dict(_BUILTIN_RAW[name], origin=f"builtin:{name}")
    return dataclasses.replace(cfg, panels=_BUILTIN_PANELS[name],
                               description=_BUILTIN_DESCRIPTIONS[name])


def resolve_scenario(ref: str) -> ScenarioConfig:
    """Resolve a scenario reference: a built-in name or a config file path."""
    if ref in _BUILTIN_RAW:
        return builtin_config(ref)
    if Path(ref).exists() or ref.lstrip().startswith("{"):
        return parse_config(ref)
    raise ConfigError(f"{ref!r} is neither a built-in scenario nor a config file; "
                      f"built-ins: {', '.join(BUILTIN_NAMES)}")


def build_model(cfg: ScenarioConfig) -> LindbladModel:
    eps = cfg.eps
    if cfg.model == "thermal_bath":
        return thermal_bath_model(cfg.gamma0, cfg.t_env, eps, label=cfg.name)
    if cfg.model == "dephasing":
        return dephasing_model(cfg.gamma_phi, eps, label=cfg.name)
    if cfg.model == "two_atom":
        return two_atom_model(cfg.gamma0, cfg.g, eps, label=cfg.name)
    if cfg.model == "exchange_unitary":
        return exchange_unitary_model(cfg.j_coupling, label=cfg.name)
    raise ConfigError(f"unknown model {cfg.model!r}")


def initial_density(cfg: ScenarioConfig) -> np.ndarray:
    if cfg.dim == 2:
        return bloch_to_density(BlochState.from_vec(cfg.bloch))
    if cfg.rho4 is not None:
        return np.array([[complex(re_, im_) for re_, im_ in row] for row in cfg.rho4])
    rho_a = bloch_to_density(BlochState.from_vec(cfg.bloch_a))
    rho_b = bloch_to_density(BlochState.from_vec(cfg.bloch_b))
    return np.kron(rho_a, rho_b)


def environment_spec(cfg: ScenarioConfig) -> EnvironmentSpec | None:
    if cfg.model == "thermal_bath":
        return EnvironmentSpec(cfg.t_env)
    if cfg.model == "two_atom":
        return EnvironmentSpec(0.0)
    return None


@dataclass
class SubsystemSummary:
    label: str
    delta_e: float
    q1: float
    w1: float
    q2: float
    w2: float
    t1_final: float
    t2_final: float


@dataclass
class RunReport:
    scenario: str
    summaries: list[SubsystemSummary]
    audits: list[tuple[str, LedgerAudit]]
    wall_time: float
    out_paths: list[Path]
    notes: list[str]
    error: str | None = None

    @property
    def passed(self) -> bool:
        return self.error is None and all(a.ok for _, a in self.audits)


def _summarize(label: str, ledger: ThermoLedger) -> SubsystemSummary:
    s = ledger.series
    return SubsystemSummary(
        label=label,
        delta_e=float(s["E"][-1] - s["E"][0]),
        q1=ledger.total("Q1"), w1=ledger.total("W1"),
        q2=ledger.total("Q2"), w2=ledger.total("W2"),
        t1_final=float(s["T1"][-1]), t2_final=float(s["T2"][-1]),
    )


def render_report(report: RunReport) -> str:
    lines = [f"scenario: {report.scenario}",
             f"wall time: {report.wall_time:.3f} s"]
    if report.error is not None:
        lines.append(f"RUN FAILED: {report.error}")
    for s in report.summaries:
        lines.append(f"[{s.label}] dE = {s.delta_e:+.6f}  "
                     f"Q1 = {s.q1:+.6f}  W1 = {s.w1:+.6f}  "
                     f"Q2 = {s.q2:+.6f}  W2 = {s.w2:+.6f}  "
                     f"T1(end) = {s.t1_final:.6g}  T2(end) = {s.t2_final:.6g}")
    for label, a in report.audits:
        detail = "" if a.skipped else (f"  value = {a.value:.3e}  tol = {a.tolerance:.1e}"
                                       f"  worst t = {a.worst_time:.4g}")
        note = f"  ({a.note})" if a.note else ""
        lines.append(f"[{label}] {a.name}: {a.verdict()}{detail}{note}")
    for note in report.notes:
        lines.append(f"note: {note}")
    return "\n".join(lines) + "\n"


def run_scenario(cfg: ScenarioConfig, no_svg: bool = False,
                 no_png: bool = False) -> RunReport:
    """Integrate, annotate per subsystem and write CSV/report/figure files.

    Identical configs produce byte-identical CSV and SVG output. Integrator
    failures are recorded in the report (and report file) instead of
    propagating, leaving ``report.error`` set.
    """
    t_start = time.perf_counter()
    outdir = Path(cfg.out_dir) / cfg.name
    outdir.mkdir(parents=True, exist_ok=True)
    paths: list[Path] = []
    notes: list[str] = []

    model = build_model(cfg)
    rho0 = initial_density(cfg)
    icfg = IntegratorConfig(t_max=cfg.t_max, dt=cfg.dt,
                            sample_stride=cfg.sample_stride)
    try:
        traj = integrate(model, rho0, icfg)
    except IntegrationError as exc:
        report = RunReport(cfg.name, [], [], time.perf_counter() - t_start,
                           paths, notes, error=str(exc))
        rpath = outdir / "report.txt"
        rpath.write_text(render_report(report), encoding="utf-8")
        report.out_paths.append(rpath)
        return report

    v = EffectiveField.from_vec(cfg.field)
    env = environment_spec(cfg)
    if cfg.dim == 2:
        ledgers = [("atom", annotate_trajectory(traj, v, env=env, label="atom"))]
    else:
        ledgers = [("atomA", annotate_trajectory(traj, v, env=env, subsystem="A")),
                   ("atomB", annotate_trajectory(traj, v, env=env, subsystem="B"))]

    audits: list[tuple[str, LedgerAudit]] = []
    summaries: list[SubsystemSummary] = []
    for label, ledger in ledgers:
        paths.append(write_csv(ledger, outdir / f"{label}.csv"))
        summaries.append(_summarize(label, ledger))
        audits.extend((label, a) for a in ledger.audits)
        if ledger.flagged_samples:
            notes.append(f"{label}: {ledger.flagged_samples} sample(s) flagged "
                         "(pure or zero-modulus Bloch state)")

    multi = len(ledgers) > 1
    for panel in cfg.panels:
        for label, ledger in ledgers:
            stem = f"{panel.name}__{label}" if multi else panel.name
            title = f"{cfg.name}: {panel.name}" + (f" ({label})" if multi else "")
            if not no_svg:
                svg_path = outdir / f"{stem}.svg"
                panel_notes = write_svg(ledger, panel.series, svg_path,
                                        x_quantity=panel.x_quantity, title=title)
                notes.extend(f"{stem}: {n}" for n in panel_notes)
                if svg_path.exists():
                    paths.append(svg_path)
            if cfg.plots and not no_png:
                from .plots import write_png  # deferred: matplotlib import is slow
                png_path = outdir / f"{stem}.png"
                panel_notes = write_png(ledger, panel.series, png_path,
                                        x_quantity=panel.x_quantity, title=title)
                notes.extend(f"{stem}: {n}" for n in panel_notes)
                if png_path.exists():
                    paths.append(png_path)

    report = RunReport(cfg.name, summaries, audits,
                       time.perf_counter() - t_start, paths, notes)
    rpath = outdir / "report.txt"
    rpath.write_text(render_report(report), encoding="utf-8")
    report.out_paths.append(rpath)
    return report


def audit_report(reports: Sequence[RunReport]) -> tuple[str, int]:
    """Tabulate audit verdicts per scenario; exit status 1 if anything failed."""
    audit_names = ("first_law_p1", "first_law_p2", "clausius_p2", "positivity")
    width = max(28, max((len(r.scenario) for r in reports), default=0) + 2)
    header = f"{'scenario':<{width}}" + "".join(f"{n:<15}" for n in audit_names) + "result"
    lines = [header, "-" * len(header)]
    any_failed = False
    for rep in reports:
        if rep.error is not None:
            lines.append(f"{rep.scenario:<{width}}" + f"RUN FAILED: {rep.error}")
            any_failed = True
            continue
        cells = []
        for name in audit_names:
            matching = [a for _, a in rep.audits if a.name == name]
            if not matching:
                cells.append("-")
            elif any(not a.ok for a in matching):
                cells.append("FAIL")
            elif all(a.skipped for a in matching):
                cells.append("skip")
            else:
                cells.append("PASS")
        ok = rep.passed
        any_failed = any_failed or not ok
        lines.append(f"{rep.scenario:<{width}}" + "".join(f"{c:<15}" for c in cells)
                     + ("PASS" if ok else "FAIL"))
    return "\n".join(lines) + "\n", (1 if any_failed else 0)
