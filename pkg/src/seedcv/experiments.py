"""Scenario runner: key-rate sweeps, estimation studies and concealment tables.

Every runner returns a header tuple and a list of row tuples, already
formatted as strings, so CSV output is byte-for-byte deterministic. Rates are
written with 6 significant digits, parameters with full ``repr`` precision.
"""

from __future__ import annotations

import configparser
import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .channel import simulate_mdi_session
from .core import AttackConfig, DetectorModel, MdiParams, OneWayParams, UnphysicalStateError
from .estimation import (compute_moments, concealment_gain, estimate_channel,
                         estimate_standard_errors, pir_excess_noise)
from .keyrate import (mdi_link_args, mdi_estimated_keyrate, mdi_practical_keyrate,
                      oneway_estimated_keyrate, oneway_practical_keyrate)

MIN_MC_SAMPLES = 100


class ConfigError(ValueError):
    """Invalid scenario configuration."""


@dataclass(frozen=True)
class ScenarioConfig:
    protocol: str = "oneway"
    topology: str = "symmetric"
    V_A0: float = 4.0
    V_A: float = 40.0
    V_B: float = 40.0
    eta: float = 0.5
    nu_el: float = 0.01
    beta: float = 0.95
    loss_db_per_km: float = 0.2
    L_AC_km: float = 5.0
    L_BC_km: float = 5.0
    eps: tuple[float, ...] = (0.01, 0.05)
    g: tuple[float, ...] = (1.0,)
    u: float = 0.0
    grid: tuple[float, float, float] = (0.0, 80.0, 0.5)
    n: tuple[int, ...] = ()
    seed: int = 0
    workers: int = 1
    references: dict = field(default_factory=dict)
    out: str | None = None

    def __post_init__(self):
        if self.protocol not in ("oneway", "mdi"):
            raise ConfigError(f"protocol must be 'oneway' or 'mdi', got {self.protocol!r}")
        if self.topology not in ("symmetric", "asymmetric"):
            raise ConfigError(f"topology must be 'symmetric' or 'asymmetric', got {self.topology!r}")
        if not self.eps or not self.g:
            raise ConfigError("eps and g lists must be non-empty")
        if any(e < 0 for e in self.eps):
            raise ConfigError("excess noise values must be >= 0")
        if any(g < 1 for g in self.g):
            raise ConfigError("seeding gains must be >= 1")
        if not 0 <= self.u <= 1:
            raise ConfigError("u must lie in [0, 1]")
        start, stop, step = self.grid
        if start < 0 or step <= 0 or stop < start:
            raise ConfigError(f"bad distance grid {start}:{stop}:{step}")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")

    def distances(self) -> list[float]:
        start, stop, step = self.grid
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [round(start + i * step, 12) for i in range(count)]

    def detector(self) -> DetectorModel:
        try:
            return DetectorModel(self.eta, self.nu_el)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc


FIGURES = {
    3: ScenarioConfig(protocol="oneway", V_A0=4.0, eta=0.5, nu_el=0.01, beta=0.95,
                      eps=(0.01, 0.05), g=(1.0, 1.5, 2.0, 3.0), grid=(0.0, 80.0, 0.5)),
    5: ScenarioConfig(protocol="mdi", topology="symmetric", V_A=40.0, V_B=40.0, eta=0.6,
                      nu_el=0.0, beta=0.95, eps=(0.01, 0.05), g=(1.02,), grid=(0.0, 30.0, 0.1)),
    6: ScenarioConfig(protocol="mdi", topology="asymmetric", V_A=40.0, V_B=40.0, eta=0.6,
                      nu_el=0.0, beta=0.95, eps=(0.01, 0.05), g=(1.02,), grid=(0.0, 100.0, 0.5)),
}

KEYRATE_HEADER = ("distance_km", "g", "epsilon", "K_estimated", "K_practical", "gap",
                  "feasible_estimated", "feasible_practical", "estimate_physical")


def fmt_rate(x: float) -> str:
    return "nan" if math.isnan(x) else f"{x:.6g}"


def fmt_param(x) -> str:
    return repr(float(x))


def keyrate_point(cfg: ScenarioConfig, L: float, g: float, eps: float) -> tuple[float, float]:
    """Estimated and practical key rate at one grid point.

    The estimated rate is ``nan`` when the naive estimates describe an
    unphysical state, e.g. a transmittance estimate above one with too
    little noise. The practical rate is always defined.
    """
    try:
        if cfg.protocol == "oneway":
            p = OneWayParams(V_A0=cfg.V_A0, L_km=L, loss_db_per_km=cfg.loss_db_per_km, eps=eps,
                             det=cfg.detector(), beta=cfg.beta)
            estimated, practical = oneway_estimated_keyrate, oneway_practical_keyrate
        else:
            mk = MdiParams.symmetric if cfg.topology == "symmetric" else MdiParams.extreme_asymmetric
            p = mk(L, V_A=cfg.V_A, V_B=cfg.V_B, loss_db_per_km=cfg.loss_db_per_km, eps_AC=eps,
                   eps_BC=eps, charlie_det=cfg.detector(), beta=cfg.beta)
            estimated = lambda p, g: mdi_estimated_keyrate(*mdi_link_args(p), g)  # noqa: E731
            practical = lambda p, g: mdi_practical_keyrate(*mdi_link_args(p), g)  # noqa: E731
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    Kp = practical(p, g).K
    try:
        Ke = estimated(p, g).K
    except UnphysicalStateError:
        Ke = math.nan
    return Ke, Kp


def run_keyrate_sweep(cfg: ScenarioConfig):
    points = [(L, g, e) for e in cfg.eps for g in cfg.g for L in cfg.distances()]

    def work(pt):
        return keyrate_point(cfg, *pt)

    if cfg.workers > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(work, points))
    else:
        results = [work(pt) for pt in points]

    rows = []
    for (L, g, e), (Ke, Kp) in zip(points, results):
        physical = not math.isnan(Ke)
        rows.append((fmt_param(L), fmt_param(g), fmt_param(e), fmt_rate(Ke), fmt_rate(Kp),
                     fmt_rate(Ke - Kp), str(int(physical and Ke > 0)), str(int(Kp > 0)),
                     str(int(physical))))
    return KEYRATE_HEADER, rows


def run_figure(figure_id: int, **overrides):
    """Key-rate data behind one of the reference figures (3, 5 or 6)."""
    if figure_id not in FIGURES:
        raise ConfigError(f"unknown figure {figure_id!r}; choose from {sorted(FIGURES)}")
    overrides = {k: v for k, v in overrides.items() if v is not None}
    try:
        cfg = replace(FIGURES[figure_id], **overrides)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
    return run_keyrate_sweep(cfg)


ESTIMATION_HEADER = ("g", "u", "n", "parameter", "truth", "estimate", "predicted", "std_error",
                     "z_score")


def run_estimation_study(cfg: ScenarioConfig):
    """Simulate, estimate and compare with the analytic bias for every (g, n).

    ``predicted`` is what an unaware receiver should see: ``g*T`` and
    ``(eps + 2u)/g`` on the Alice link, ``eps/g`` on the Bob link.
    """
    if not cfg.n:
        raise ConfigError("estimation study needs an [mc] n value")
    if min(cfg.n) < MIN_MC_SAMPLES:
        raise ConfigError(f"n must be >= {MIN_MC_SAMPLES}")
    eps = cfg.eps[0]
    try:
        params = MdiParams(V_A=cfg.V_A, V_B=cfg.V_B, L_AC_km=cfg.L_AC_km, L_BC_km=cfg.L_BC_km,
                           loss_db_per_km=cfg.loss_db_per_km, eps_AC=eps, eps_BC=eps,
                           charlie_det=cfg.detector(), beta=cfg.beta)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    det = params.charlie_det
    rows = []
    for gi, g in enumerate(cfg.g):
        attack = AttackConfig.symmetric(g, cfg.u)
        truth = (params.T_AC, params.T_BC, eps, eps)
        predicted = (g * params.T_AC, g * params.T_BC, pir_excess_noise(eps, cfg.u, g), eps / g)
        for ni, n in enumerate(cfg.n):
            seed = int(np.random.SeedSequence([cfg.seed, gi, ni]).generate_state(1)[0])
            batch = simulate_mdi_session(params, attack, n, seed, workers=cfg.workers)
            est = estimate_channel(compute_moments(batch), det).as_tuple()
            se = estimate_standard_errors(batch, det).as_tuple()
            for name, t, e, pr, s in zip(("T_AC", "T_BC", "eps_AC", "eps_BC"), truth, est,
                                         predicted, se):
                rows.append((fmt_param(g), fmt_param(cfg.u), str(n), name, fmt_param(t),
                             fmt_param(e), fmt_param(pr), fmt_param(s), f"{(e - pr) / s:.6g}"))
    return ESTIMATION_HEADER, rows


def run_concealment_table(eps_t: float, u_grid):
    if not eps_t > 0:
        raise ConfigError(f"technical excess noise must be positive, got {eps_t}")
    rows = [(fmt_param(u), fmt_param(concealment_gain(eps_t, u, eps_t))) for u in u_grid]
    return ("u", "g_min"), rows


def to_csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


# --- config files ------------------------------------------------------------

_FLOAT_KEYS = ("V_A0", "V_A", "V_B", "eta", "nu_el", "beta", "loss_db_per_km", "L_AC_km",
               "L_BC_km", "u")


def parse_list(text: str, kind=float) -> tuple:
    try:
        return tuple(kind(v) for v in text.replace(";", ",").split(",") if v.strip())
    except ValueError as exc:
        raise ConfigError(f"bad list {text!r}") from exc


def parse_grid(text: str) -> tuple[float, float, float]:
    parts = text.split(":")
    if len(parts) != 3:
        raise ConfigError(f"grid must be START:STOP:STEP, got {text!r}")
    try:
        return tuple(float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"bad grid {text!r}") from exc


def load_config(path) -> dict:
    """Read an INI scenario file into keyword overrides for :class:`ScenarioConfig`.

    Sections: ``[scenario]`` (protocol, topology), ``[params]``, ``[attack]``
    (g list, u), ``[sweep]`` (grid), ``[mc]`` (n list, seed),
    ``[monitor]`` (``reference.<source_id>``) and ``[output]`` (path).
    """
    cp = configparser.ConfigParser()
    cp.optionxform = str
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_file(fh)
    except (OSError, configparser.Error) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    out: dict = {}
    known = {"scenario", "params", "attack", "sweep", "mc", "monitor", "output"}
    unknown = set(cp.sections()) - known
    if unknown:
        raise ConfigError(f"unknown config sections {sorted(unknown)}")
    try:
        if cp.has_section("scenario"):
            s = cp["scenario"]
            for key in ("protocol", "topology"):
                if key in s:
                    out[key] = s[key].strip()
        if cp.has_section("params"):
            for key, val in cp["params"].items():
                if key == "eps":
                    out["eps"] = parse_list(val)
                elif key in _FLOAT_KEYS:
                    out[key] = float(val)
                else:
                    raise ConfigError(f"unknown parameter {key!r}")
        if cp.has_section("attack"):
            a = cp["attack"]
            if "g" in a:
                out["g"] = parse_list(a["g"])
            if "u" in a:
                out["u"] = float(a["u"])
        if cp.has_section("sweep") and "grid" in cp["sweep"]:
            out["grid"] = parse_grid(cp["sweep"]["grid"])
        if cp.has_section("mc"):
            m = cp["mc"]
            if "n" in m:
                out["n"] = parse_list(m["n"], int)
            if "seed" in m:
                out["seed"] = int(m["seed"])
            if "workers" in m:
                out["workers"] = int(m["workers"])
        if cp.has_section("monitor"):
            refs = {}
            for key, val in cp["monitor"].items():
                if not key.startswith("reference."):
                    raise ConfigError(f"unknown monitor key {key!r}")
                refs[key.split(".", 1)[1]] = float(val)
            out["references"] = refs
        if cp.has_section("output") and "path" in cp["output"]:
            out["out"] = cp["output"]["path"]
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    return out
