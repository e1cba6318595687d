"""Strict INI-style configuration for the command line tool.

Every run is described by a config file with a [run] section (model, seed,
horizon, sample_period, runs, out) plus one model section named after the
model. Unknown sections or keys are rejected by name, and every value is
parsed eagerly so a bad config fails before any work starts. Overrides from
the command line (`--set key=value` or `--set section.key=value`) are applied
to the parsed text before validation, so they obey the same strictness.

The sha256 digest of the effective (post-override) config, together with the
seed and tool version, pins a run for byte-identical reproduction.
"""

from __future__ import annotations

import configparser
import hashlib
import math
from dataclasses import dataclass, field

from .cable import CableParams, ReducedCableParams
from .capacity import SignalingBounds
from .electron import CellParams, feeding_profile
from .errors import ConfigError
from .profiles import PiecewiseConstant
from .quorum import InterferenceParams, QuorumParams

MODELS = ("cell", "cable", "reduced", "capacity", "quorum")

_REQUIRED = object()

RUN_KEYS = {
    "model": ("str", _REQUIRED),
    "seed": ("int", 0),
    "horizon": ("float", None),
    "sample_period": ("float", None),
    "runs": ("int", 1),
    "out": ("str", None),
}

CELL_KEYS = {
    "rho": ("float", 0.01),
    "zeta": ("float", 0.01),
    "beta": ("float", 0.01),
    "m_ch_cap": ("int", 20),
    "n_atp_cap": ("int", 20),
    "donor_peak": ("float", 30.0),
    "donor_on": ("float", 80.0),
    "donor_off": ("float", 1300.0),
    "donor_steps": ("int", 10),
    "sigma_a": ("float", 1.0),
    "conversion": ("float", 1.0),
}

CABLE_KEYS = {
    "n_cells": ("int", _REQUIRED),
    "rho": ("float", 0.01),
    "zeta": ("float", 0.01),
    "beta": ("float", 0.01),
    "m_ch_cap": ("int", 20),
    "n_atp_cap": ("int", 20),
    "zeta_a": ("float", 0.01),
    "zeta_u": ("float", 0.01),
    "q_cap": ("int", 20),
    "sigma_d": ("float", 1.0),
    "sigma_d_times": ("float_list", None),
    "sigma_d_values": ("float_list", None),
    "sigma_a": ("float", 1.0),
    "sigma_a_times": ("float_list", None),
    "sigma_a_values": ("float_list", None),
}

REDUCED_KEYS = {
    "e_max": ("int", _REQUIRED),
    "alpha_min": ("float", _REQUIRED),
    "lambda_bar": ("float_list", _REQUIRED),
    "init": ("int", 0),
}

CAPACITY_KEYS = {
    "e_max": ("int", _REQUIRED),
    "lambda_min": ("float", 0.1),
    "lambda_max": ("float", 1.0),
    "alpha_min": ("float", None),
    "alpha_min_list": ("float_list", None),
    "n_actions": ("int", 201),
    "tolerance": ("float", 1e-10),
}

QUORUM_KEYS = {
    "rho_max": ("float", 1.0),
    "N_max": ("int_or_inf", 1000),
    "phi_cell": ("float", 1.0),
    "mode": ("str", _REQUIRED),
    "phi_ex": ("float", 1.1),
    "V_tot": ("float", 0.1),
    "beta": ("float", 18.0),
    "xi_D": ("float", 0.01),
    "xi_L1": ("float", 0.0),
    "xi_L2": ("float", 0.0),
    "eta_A_th": ("float", 21.4),
    "eps_0_1": ("float", 80.0),
    "eps_0_2": ("float", 80.0),
    "eps_0_3": ("float", 80.0),
    "eps_C_1": ("float", 3.0),
    "eps_C_2": ("float", 3.0),
    "eps_C_3": ("float", 3.0),
    "delta_R": ("float", 12.0),
    "delta_C": ("float", 1.4),
    "delta_S": ("float", 1.0),
    "upsilon_C": ("float", 60.0),
    "gamma": ("float", _REQUIRED),
    "quanta": ("int", 1),
}

INTERFERENCE_KEYS = {
    "mechanism": ("str", _REQUIRED),
    "mu_I": ("float", 0.0),
    "xi_ID": ("float", 0.0),
    "xi_IL1": ("float", 0.0),
    "xi_IL2": ("float", 0.0),
    "gamma_IR": ("float", 0.0),
    "gamma_IS": ("float", 0.0),
    "delta_IA": ("float", 0.0),
}

_SECTION_KEYS = {
    "run": RUN_KEYS,
    "cell": CELL_KEYS,
    "cable": CABLE_KEYS,
    "reduced": REDUCED_KEYS,
    "capacity": CAPACITY_KEYS,
    "quorum": QUORUM_KEYS,
    "interference": INTERFERENCE_KEYS,
}

# model time units and fallback grids: (horizon, sample_period)
MODEL_DEFAULT_GRID = {
    "cell": (1500.0, 10.0),
    "cable": (1000.0, 10.0),
    "reduced": (1000.0, 1.0),
    "capacity": (None, None),
    "quorum": (12.0, 1.0 / 6.0),
}


@dataclass
class RunConfig:
    """Fully parsed and validated run description."""

    model: str
    seed: int
    horizon: float | None
    sample_period: float | None
    runs: int
    out: str | None
    payload: dict
    digest: str
    raw: dict = field(default_factory=dict)


def _convert(section: str, key: str, kind: str, raw: str):
    raw = raw.strip()
    try:
        if kind == "float":
            v = float(raw)
            if math.isnan(v):
                raise ValueError("nan")
            return v
        if kind == "int":
            return int(raw)
        if kind == "str":
            return raw
        if kind == "float_list":
            parts = [p for p in raw.replace(",", " ").split() if p]
            if not parts:
                raise ValueError("empty list")
            return [float(p) for p in parts]
        if kind == "int_or_inf":
            if raw.lower() in ("inf", "none", "unbounded"):
                return None
            return int(raw)
    except ValueError as exc:
        raise ConfigError(
            f"[{section}] {key}: cannot parse {raw!r} as {kind}") from exc
    raise AssertionError(f"unknown kind {kind}")


def _parse_section(parser, section: str, spec: dict, errors: list) -> dict:
    present = dict(parser.items(section)) if parser.has_section(section) else {}
    for key in present:
        if key not in spec:
            errors.append(f"[{section}] unknown key {key!r}")
    values = {}
    for key, (kind, default) in spec.items():
        if key in present:
            try:
                values[key] = _convert(section, key, kind, present[key])
            except ConfigError as exc:
                errors.append(str(exc))
        elif default is _REQUIRED:
            errors.append(f"[{section}] missing required key {key!r}")
        else:
            values[key] = default
    return values


def _profile_or_scalar(v: dict, base: str, errors: list):
    times = v.get(f"{base}_times")
    values = v.get(f"{base}_values")
    if (times is None) != (values is None):
        errors.append(f"[cable] {base}_times and {base}_values must be "
                      "given together")
        return v[base]
    if times is None:
        return v[base]
    try:
        return PiecewiseConstant(times, values)
    except ValueError as exc:
        errors.append(f"[cable] {base} staircase: {exc}")
        return v[base]


def _build_cell(v: dict, errors: list) -> dict:
    try:
        params = CellParams(rho=v["rho"], zeta=v["zeta"], beta=v["beta"],
                            m_ch_cap=v["m_ch_cap"], n_atp_cap=v["n_atp_cap"])
        profile = feeding_profile(peak=v["donor_peak"], t_on=v["donor_on"],
                                  t_off=v["donor_off"], steps=v["donor_steps"],
                                  sigma_a=v["sigma_a"])
    except ValueError as exc:
        errors.append(f"[cell] {exc}")
        return {}
    return {"params": params, "profile": profile,
            "conversion": v["conversion"]}


def _build_cable(v: dict, errors: list) -> dict:
    sigma_d = _profile_or_scalar(v, "sigma_d", errors)
    sigma_a = _profile_or_scalar(v, "sigma_a", errors)
    try:
        cell = CellParams(rho=v["rho"], zeta=v["zeta"], beta=v["beta"],
                          m_ch_cap=v["m_ch_cap"], n_atp_cap=v["n_atp_cap"])
        params = CableParams(n_cells=v["n_cells"], cell=cell,
                             sigma_d=sigma_d, sigma_a=sigma_a,
                             zeta_a=v["zeta_a"], zeta_u=v["zeta_u"],
                             q_cap=v["q_cap"])
    except ValueError as exc:
        errors.append(f"[cable] {exc}")
        return {}
    return {"params": params}


def _build_reduced(v: dict, errors: list) -> dict:
    try:
        params = ReducedCableParams.from_clogging(v["e_max"], v["alpha_min"])
    except ValueError as exc:
        errors.append(f"[reduced] {exc}")
        return {}
    lam = v["lambda_bar"]
    if len(lam) == 1:
        policy = lam[0]
    elif len(lam) == v["e_max"] + 1:
        policy = lam
    else:
        errors.append(f"[reduced] lambda_bar needs 1 or e_max+1 "
                      f"({v['e_max'] + 1}) values, got {len(lam)}")
        return {}
    if v["init"] < 0 or v["init"] > v["e_max"]:
        errors.append(f"[reduced] init must lie in [0, e_max]")
        return {}
    return {"params": params, "policy": policy, "init": v["init"]}


def _build_capacity(v: dict, errors: list) -> dict:
    try:
        bounds = SignalingBounds(v["lambda_min"], v["lambda_max"])
    except ValueError as exc:
        errors.append(f"[capacity] {exc}")
        return {}
    if v["e_max"] < 1:
        errors.append("[capacity] e_max must be >= 1")
        return {}
    for key in ("alpha_min",):
        if v[key] is not None and not 0.0 <= v[key] <= 1.0:
            errors.append(f"[capacity] {key} must lie in [0, 1]")
    if v["alpha_min_list"] is not None:
        bad = [a for a in v["alpha_min_list"] if not 0.0 <= a <= 1.0]
        if bad:
            errors.append(f"[capacity] alpha_min_list values outside [0, 1]: {bad}")
    return {"bounds": bounds, "e_max": v["e_max"],
            "alpha_min": v["alpha_min"], "alpha_min_list": v["alpha_min_list"],
            "n_actions": v["n_actions"], "tolerance": v["tolerance"]}


def _build_quorum(v: dict, inter: dict | None, errors: list) -> dict:
    try:
        params = QuorumParams(
            rho_max=v["rho_max"], n_max=v["N_max"], phi_cell_fl=v["phi_cell"],
            mode=v["mode"], phi_ex_fl=v["phi_ex"], v_tot_nl=v["V_tot"],
            beta=v["beta"], xi_d=v["xi_D"], xi_l1=v["xi_L1"], xi_l2=v["xi_L2"],
            eta_a_th_nm=v["eta_A_th"],
            eps0=(v["eps_0_1"], v["eps_0_2"], v["eps_0_3"]),
            eps_c=(v["eps_C_1"], v["eps_C_2"], v["eps_C_3"]),
            delta_r=v["delta_R"], delta_c=v["delta_C"], delta_s=v["delta_S"],
            upsilon_c=v["upsilon_C"], gamma=v["gamma"], quanta=v["quanta"])
    except ValueError as exc:
        errors.append(f"[quorum] {exc}")
        return {}
    interference = None
    if inter is not None:
        try:
            interference = InterferenceParams(
                mechanism=inter["mechanism"], mu_i=inter["mu_I"],
                xi_id=inter["xi_ID"], xi_il1=inter["xi_IL1"],
                xi_il2=inter["xi_IL2"], gamma_ir=inter["gamma_IR"],
                gamma_is=inter["gamma_IS"], delta_ia=inter["delta_IA"])
        except ValueError as exc:
            errors.append(f"[interference] {exc}")
            return {}
    return {"params": params, "interference": interference}


def _read_parser(path: str) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(interpolation=None,
                                       inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        with open(path, "r", encoding="utf-8") as f:
            parser.read_file(f, source=path)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"config parse error: {exc}") from exc
    return parser


def _resolve_model(parser, overrides: list[tuple[str, str]]) -> str:
    model = None
    if parser.has_option("run", "model"):
        model = parser.get("run", "model").strip()
    for key, value in overrides:
        if key in ("model", "run.model"):
            model = value.strip()
    if model is None:
        raise ConfigError("[run] missing required key 'model'")
    if model not in MODELS:
        raise ConfigError(f"[run] model must be one of {MODELS}, got {model!r}")
    return model


def _split_overrides(pairs) -> list[tuple[str, str]]:
    out = []
    for item in pairs or ():
        if "=" not in item:
            raise ConfigError(f"--set needs key=value, got {item!r}")
        key, value = item.split("=", 1)
        key = key.strip()
        if not key:
            raise ConfigError(f"--set needs key=value, got {item!r}")
        out.append((key, value.strip()))
    return out


def _apply_overrides(parser, model: str, overrides: list[tuple[str, str]]):
    model_spec = _SECTION_KEYS[model]
    for key, value in overrides:
        if "." in key:
            section, bare = key.split(".", 1)
        elif key in RUN_KEYS:
            section, bare = "run", key
        elif key in model_spec:
            section, bare = model, key
        elif model == "quorum" and key in INTERFERENCE_KEYS:
            section, bare = "interference", key
        else:
            raise ConfigError(f"--set {key}: no such key for model {model!r} "
                              f"(use section.key to address other sections)")
        if section not in _SECTION_KEYS:
            raise ConfigError(f"--set {key}: unknown section {section!r}")
        if not parser.has_section(section):
            parser.add_section(section)
        parser.set(section, bare, value)


def _digest(parser) -> str:
    # run.out names where results land without affecting them, so it stays
    # outside the digest; everything else that can change a result is in.
    lines = []
    for section in sorted(parser.sections()):
        lines.append(f"[{section}]")
        for key in sorted(parser.options(section)):
            if section == "run" and key == "out":
                continue
            lines.append(f"{key} = {parser.get(section, key)}")
    blob = "\n".join(lines).encode("utf-8")
    return hashlib.sha256(blob).hexdigest()


def _collect(path: str, set_pairs=None, expected_model: str | None = None):
    overrides = _split_overrides(set_pairs)
    parser = _read_parser(path)
    model = _resolve_model(parser, overrides)
    _apply_overrides(parser, model, overrides)

    errors: list[str] = []
    allowed = {"run", model} | ({"interference"} if model == "quorum" else set())
    for section in parser.sections():
        if section not in allowed:
            errors.append(f"unknown section [{section}] for model {model!r}")

    run = _parse_section(parser, "run", RUN_KEYS, errors)
    values = _parse_section(parser, model, _SECTION_KEYS[model], errors)
    inter = None
    if model == "quorum" and parser.has_section("interference"):
        inter = _parse_section(parser, "interference", INTERFERENCE_KEYS, errors)

    if expected_model is not None and model != expected_model:
        errors.append(f"config declares model={model!r} but the subcommand "
                      f"runs {expected_model!r}")

    payload: dict = {}
    if not errors:
        if model == "cell":
            payload = _build_cell(values, errors)
        elif model == "cable":
            payload = _build_cable(values, errors)
        elif model == "reduced":
            payload = _build_reduced(values, errors)
        elif model == "capacity":
            payload = _build_capacity(values, errors)
        else:
            payload = _build_quorum(values, inter, errors)

    if run.get("runs") is not None and not errors and run["runs"] < 1:
        errors.append("[run] runs must be >= 1")
    if run.get("horizon") is not None and not errors and run["horizon"] <= 0:
        errors.append("[run] horizon must be positive")
    if run.get("sample_period") is not None and not errors \
            and run["sample_period"] <= 0:
        errors.append("[run] sample_period must be positive")

    cfg = None
    if not errors:
        horizon, period = run["horizon"], run["sample_period"]
        d_h, d_p = MODEL_DEFAULT_GRID[model]
        cfg = RunConfig(model=model, seed=run["seed"],
                        horizon=horizon if horizon is not None else d_h,
                        sample_period=period if period is not None else d_p,
                        runs=run["runs"], out=run["out"], payload=payload,
                        digest=_digest(parser), raw=values)
    return cfg, errors


def load_config(path: str, set_pairs=None,
                expected_model: str | None = None) -> RunConfig:
    """Parse, override, validate, and build a run configuration.

    Raises ConfigError naming the first offending section/key.
    """
    cfg, errors = _collect(path, set_pairs, expected_model)
    if errors:
        raise ConfigError("; ".join(errors))
    return cfg


def validate_config(path: str, set_pairs=None) -> list[str]:
    """All statically checkable violations in the config, empty when clean."""
    try:
        _, errors = _collect(path, set_pairs)
    except ConfigError as exc:
        return [str(exc)]
    return errors
