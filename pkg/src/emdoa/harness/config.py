"""Experiment configuration files (YAML) and their validation.

Example::

    name: fig01
    model: deterministic          # how snapshots are generated
    algorithms: [det-gem, det-sage]
    scenario:
      n_sensors: 10
      theta_deg: [40, 80]
      powers: [6, 8]
      sigma: reference            # or a list, or a single uniform value
      snapshots: 500
      alpha: [0.5, 0.5]
      fixed_waveforms: false      # one F shared by all trials
    algorithm_config: {beta: 0.5, gamma: 0.9, zeta: 0.5, tol_deg: 0.001, max_iter: 2000}
    init: {theta_deg: [45, 85], f0: 1.0, p0: 1.0, sigma0: 1.0}
    trials: 1
    seed: 1
    wanted_radius_deg: 5.0
    sweep: {axis: none, values: []}

Errors carry the line number of the offending key.
"""

from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
import yaml

from ..array_model import REFERENCE_SIGMA
from ..common import AlgorithmConfig

__all__ = ["bundled_config", "ConfigError", "Scenario", "InitialPoint", "ExperimentConfig", "load_config", "parse_config", "ALGORITHMS"]

ALGORITHMS = ("det-gem", "det-sage", "stoch-sage-A", "stoch-sage-B")
MODELS = ("deterministic", "stochastic")
SWEEP_AXES = ("none", "snapshots", "power")


class ConfigError(ValueError):
    """Invalid experiment configuration; ``errors`` lists ``(line, message)`` pairs."""

    def __init__(self, errors, source="<config>"):
        self.errors = list(errors)
        self.source = source
        super().__init__("\n".join(f"{source}:{line}: {msg}" for line, msg in self.errors))


@dataclass(frozen=True)
class Scenario:
    n_sensors: int
    theta_deg: tuple
    powers: tuple
    sigma: tuple
    snapshots: int
    alpha: tuple | None = None
    fixed_waveforms: bool = False

    @property
    def n_sources(self):
        return len(self.theta_deg)

    @property
    def theta(self):
        return np.radians(np.array(self.theta_deg, dtype=float))

    def at(self, axis, value):
        """Scenario with the sweep variable set to ``value``."""
        if axis == "snapshots":
            return replace(self, snapshots=int(value))
        if axis == "power":
            return replace(self, powers=(float(value),) * self.n_sources)
        return self


@dataclass(frozen=True)
class InitialPoint:
    theta_deg: tuple
    f0: float = 1.0
    p0: float = 1.0
    sigma0: float = 1.0

    @property
    def theta(self):
        return np.radians(np.array(self.theta_deg, dtype=float))


@dataclass(frozen=True)
class ExperimentConfig:
    name: str
    model: str
    algorithms: tuple
    scenario: Scenario
    init: InitialPoint
    algorithm_config: AlgorithmConfig = field(default_factory=AlgorithmConfig)
    trials: int = 1
    seed: int = 0
    wanted_radius_deg: float = 5.0
    sweep_axis: str = "none"
    sweep_values: tuple = ()

    def sweep_points(self):
        if self.sweep_axis == "none":
            return [None]
        return sorted(self.sweep_values)


class _Checker:
    """Collects errors while walking a composed YAML node tree."""

    def __init__(self):
        self.errors = []

    def fail(self, node, msg):
        line = node.start_mark.line + 1 if node is not None else 0
        self.errors.append((line, msg))


def _mapping(node):
    return {k.value: (k, v) for k, v in node.value} if isinstance(node, yaml.MappingNode) else None


def _number_list(chk, node, key, positive=False, integer=False):
    if not isinstance(node, yaml.SequenceNode) or not node.value:
        chk.fail(node, f"{key} must be a non-empty list of numbers")
        return None
    out = []
    for item in node.value:
        val = _scalar(chk, item, key, float)
        if val is None:
            return None
        if positive and val <= 0:
            chk.fail(item, f"{key} entries must be positive")
            return None
        if integer and int(val) != val:
            chk.fail(item, f"{key} entries must be integers")
            return None
        out.append(int(val) if integer else val)
    return tuple(out)


def _scalar(chk, node, key, kind):
    if not isinstance(node, yaml.ScalarNode):
        chk.fail(node, f"{key} must be a scalar")
        return None
    raw = yaml.safe_load(node.value) if node.tag != "tag:yaml.org,2002:str" else node.value
    if kind is str:
        return str(raw)
    if kind is bool:
        if isinstance(raw, bool):
            return raw
        chk.fail(node, f"{key} must be true or false")
        return None
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        chk.fail(node, f"{key} must be a number")
        return None
    if kind is int:
        if int(raw) != raw:
            chk.fail(node, f"{key} must be an integer")
            return None
        return int(raw)
    return float(raw)


def _known_keys(chk, mapping, allowed, where):
    for key, (knode, _) in mapping.items():
        if key not in allowed:
            chk.fail(knode, f"unknown key '{key}' in {where}")


def _get(chk, mapping, key, parent, required=True):
    if key in mapping:
        return mapping[key][1]
    if required:
        chk.fail(parent, f"missing required key '{key}'")
    return None


def parse_config(text, source="<config>"):
    """Parse and validate YAML text into an :class:`ExperimentConfig`."""
    try:
        root = yaml.compose(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ConfigError([(mark.line + 1 if mark else 0, f"YAML syntax error: {exc}")], source) from None
    chk = _Checker()
    top = _mapping(root)
    if top is None:
        raise ConfigError([(1, "configuration must be a mapping")], source)
    _known_keys(chk, top, {"name", "model", "algorithms", "scenario", "algorithm_config", "init",
                           "trials", "seed", "wanted_radius_deg", "sweep"}, "top level")

    name_node = _get(chk, top, "name", root, required=False)
    name = _scalar(chk, name_node, "name", str) if name_node is not None else Path(source).stem

    model = None
    node = _get(chk, top, "model", root)
    if node is not None:
        model = _scalar(chk, node, "model", str)
        if model not in MODELS:
            chk.fail(node, f"model must be one of {MODELS}")

    algorithms = ()
    node = _get(chk, top, "algorithms", root)
    if node is not None:
        if not isinstance(node, yaml.SequenceNode) or not node.value:
            chk.fail(node, "algorithms must be a non-empty list")
        else:
            for item in node.value:
                if not isinstance(item, yaml.ScalarNode) or item.value not in ALGORITHMS:
                    chk.fail(item, f"unknown algorithm {getattr(item, 'value', item)!r}; choose from {ALGORITHMS}")
            algorithms = tuple(item.value for item in node.value if isinstance(item, yaml.ScalarNode))

    scenario = None
    node = _get(chk, top, "scenario", root)
    sc = _mapping(node) if node is not None else None
    if node is not None and sc is None:
        chk.fail(node, "scenario must be a mapping")
    if sc is not None:
        _known_keys(chk, sc, {"n_sensors", "theta_deg", "powers", "sigma", "snapshots", "alpha", "fixed_waveforms"},
                    "scenario")
        n = _scalar(chk, _get(chk, sc, "n_sensors", node), "n_sensors", int) if "n_sensors" in sc else None
        if "n_sensors" not in sc:
            chk.fail(node, "missing required key 'n_sensors'")
        elif n is not None and n < 2:
            chk.fail(sc["n_sensors"][1], "n_sensors must be >= 2")
        theta = None
        tnode = _get(chk, sc, "theta_deg", node)
        if tnode is not None:
            theta = _number_list(chk, tnode, "theta_deg")
            if theta is not None and not all(0 < x < 180 for x in theta):
                chk.fail(tnode, "theta_deg entries must lie strictly inside (0, 180)")
        powers = None
        pnode = _get(chk, sc, "powers", node)
        if pnode is not None:
            powers = _number_list(chk, pnode, "powers")
            if powers is not None and any(x < 0 for x in powers):
                chk.fail(pnode, "powers must be nonnegative")
            if powers is not None and theta is not None and len(powers) != len(theta):
                chk.fail(pnode, "powers must have one entry per source")
        sigma = None
        snode = _get(chk, sc, "sigma", node)
        if snode is not None:
            if isinstance(snode, yaml.ScalarNode) and snode.value == "reference":
                sigma = tuple(REFERENCE_SIGMA)
            elif isinstance(snode, yaml.ScalarNode):
                val = _scalar(chk, snode, "sigma", float)
                if val is not None and n is not None:
                    sigma = (val,) * n
            else:
                sigma = _number_list(chk, snode, "sigma", positive=True)
            if sigma is not None and n is not None and len(sigma) != n:
                chk.fail(snode, f"sigma has {len(sigma)} entries but n_sensors is {n}")
                sigma = None
            if sigma is not None and any(x <= 0 for x in sigma):
                chk.fail(snode, "sigma entries must be positive")
        t = _scalar(chk, _get(chk, sc, "snapshots", node), "snapshots", int) if "snapshots" in sc else None
        if "snapshots" not in sc:
            chk.fail(node, "missing required key 'snapshots'")
        elif t is not None and t < 1:
            chk.fail(sc["snapshots"][1], "snapshots must be >= 1")
        alpha = None
        if "alpha" in sc:
            anode = sc["alpha"][1]
            alpha = _number_list(chk, anode, "alpha", positive=True)
            if alpha is not None and not np.isclose(sum(alpha), 1.0):
                chk.fail(anode, "alpha must sum to 1")
            if alpha is not None and theta is not None and len(alpha) != len(theta):
                chk.fail(anode, "alpha must have one entry per source")
        fixed = False
        if "fixed_waveforms" in sc:
            fixed = _scalar(chk, sc["fixed_waveforms"][1], "fixed_waveforms", bool)
        if None not in (n, theta, powers, sigma, t):
            scenario = Scenario(n, theta, powers, sigma, t, alpha, bool(fixed))

    init = None
    node = _get(chk, top, "init", root)
    im = _mapping(node) if node is not None else None
    if node is not None and im is None:
        chk.fail(node, "init must be a mapping")
    if im is not None:
        _known_keys(chk, im, {"theta_deg", "f0", "p0", "sigma0"}, "init")
        tnode = _get(chk, im, "theta_deg", node)
        theta0 = _number_list(chk, tnode, "init.theta_deg") if tnode is not None else None
        if theta0 is not None and not all(0 < x < 180 for x in theta0):
            chk.fail(tnode, "init.theta_deg entries must lie strictly inside (0, 180)")
            theta0 = None
        if theta0 is not None and scenario is not None and len(theta0) != scenario.n_sources:
            chk.fail(tnode, "init.theta_deg must have one entry per source")
            theta0 = None
        extras = {}
        for key in ("f0", "p0", "sigma0"):
            if key in im:
                val = _scalar(chk, im[key][1], f"init.{key}", float)
                if val is not None:
                    if key == "sigma0" and val <= 0:
                        chk.fail(im[key][1], "init.sigma0 must be positive")
                    elif key == "p0" and val < 0:
                        chk.fail(im[key][1], "init.p0 must be nonnegative")
                    else:
                        extras[key] = val
        if theta0 is not None:
            init = InitialPoint(theta0, **extras)

    algo_cfg = AlgorithmConfig()
    node = top.get("algorithm_config", (None, None))[1]
    if node is not None:
        ac = _mapping(node)
        if ac is None:
            chk.fail(node, "algorithm_config must be a mapping")
        else:
            _known_keys(chk, ac, {"beta", "gamma", "zeta", "tol_deg", "max_iter"}, "algorithm_config")
            kw = {}
            for key, (_, vnode) in ac.items():
                if key in ("beta", "gamma", "zeta", "tol_deg"):
                    val = _scalar(chk, vnode, key, float)
                elif key == "max_iter":
                    val = _scalar(chk, vnode, key, int)
                else:
                    continue
                if val is not None:
                    kw[key] = val
            try:
                algo_cfg = AlgorithmConfig(**kw)
            except ValueError as exc:
                chk.fail(node, str(exc))

    def _top_scalar(key, kind, default, check, message):
        if key not in top:
            return default
        vnode = top[key][1]
        val = _scalar(chk, vnode, key, kind)
        if val is not None and not check(val):
            chk.fail(vnode, message)
            return default
        return default if val is None else val

    trials = _top_scalar("trials", int, 1, lambda x: x >= 1, "trials must be >= 1")
    seed = _top_scalar("seed", int, 0, lambda x: x >= 0, "seed must be a nonnegative integer")
    radius = _top_scalar("wanted_radius_deg", float, 5.0, lambda x: x > 0, "wanted_radius_deg must be positive")

    axis, values = "none", ()
    node = top.get("sweep", (None, None))[1]
    if node is not None:
        sw = _mapping(node)
        if sw is None:
            chk.fail(node, "sweep must be a mapping")
        else:
            _known_keys(chk, sw, {"axis", "values"}, "sweep")
            if "axis" in sw:
                axis = _scalar(chk, sw["axis"][1], "sweep.axis", str)
                if axis not in SWEEP_AXES:
                    chk.fail(sw["axis"][1], f"sweep.axis must be one of {SWEEP_AXES}")
                    axis = "none"
            if axis != "none":
                vnode = _get(chk, sw, "values", node)
                if vnode is not None:
                    values = _number_list(chk, vnode, "sweep.values", positive=True,
                                          integer=axis == "snapshots") or ()

    if chk.errors:
        raise ConfigError(chk.errors, source)
    return ExperimentConfig(
        name=name,
        model=model,
        algorithms=algorithms,
        scenario=scenario,
        init=init,
        algorithm_config=algo_cfg,
        trials=trials,
        seed=seed,
        wanted_radius_deg=radius,
        sweep_axis=axis,
        sweep_values=tuple(values),
    )


def load_config(path):
    """Read and validate a YAML experiment file."""
    path = Path(path)
    return parse_config(path.read_text(encoding="utf-8"), source=str(path))


def bundled_config(name):
    """Path of a configuration shipped with the package, e.g. ``bundled_config("fig02")``."""
    path = Path(__file__).with_name("configs") / f"{name}.yaml"
    if not path.is_file():
        raise FileNotFoundError(f"no bundled configuration named {name!r}")
    return path
