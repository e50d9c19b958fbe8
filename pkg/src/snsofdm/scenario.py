"""Scenario files: a YAML document validated against a fixed schema.

All dBm quantities are converted to linear mW here and nowhere else.
"""

from __future__ import annotations

import copy
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np
import yaml

from snsofdm.channel import Target, TargetSet
from snsofdm.config import SPEED_OF_LIGHT, ConfigError, RadarConfig, dbm_to_mw
from snsofdm.detect import CfarParams
from snsofdm.waveform import Constellation

OUTPUT_KINDS = ("profile_csv", "report", "iq_capture", "sweep_l", "sweep_doppler")

_NUM = {"type": "number"}
_POS = {"type": "number", "exclusiveMinimum": 0}
_POS_INT = {"type": "integer", "minimum": 1}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["radar", "noise_dbm"],
    "properties": {
        "name": {"type": "string"},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "constellation": {"enum": [c.value for c in Constellation]},
        "channel_model": {"enum": ["freq", "time"]},
        "noise_dbm": _NUM,
        "trials": _POS_INT,
        "snap_to_bin": {"type": "boolean"},
        "radar": {
            "type": "object",
            "additionalProperties": False,
            "required": ["num_subcarriers", "bandwidth_hz"],
            "properties": {
                "num_subcarriers": _POS_INT,
                "num_symbols": _POS_INT,
                "bandwidth_hz": _POS,
                "cp_duration_s": _POS,
                "carrier_freq_hz": _POS,
                "sub_sampling_ratio": _POS_INT,
            },
        },
        "targets": {
            "type": "array",
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["range_m", "power_dbm"],
                "properties": {
                    "range_m": {"type": "number", "minimum": 0},
                    "power_dbm": _NUM,
                    "velocity_mps": _NUM,
                    "normalized_doppler": _NUM,
                    "phase_deg": _NUM,
                },
                "not": {"required": ["velocity_mps", "normalized_doppler"]},
            },
        },
        "smnc": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "enabled": {"type": "boolean"},
                "epsilon_db": _POS,
                "max_iters": _POS_INT,
            },
        },
        "cfar": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "train_cells": _POS_INT,
                "guard_cells": {"type": "integer", "minimum": 0},
                "pfa": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
            },
        },
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "l_values": {"type": "array", "items": _POS_INT, "minItems": 1},
                "normalized_doppler": {"type": "array", "items": _NUM, "minItems": 1},
            },
        },
        "outputs": {"type": "array", "items": {"enum": list(OUTPUT_KINDS)}, "uniqueItems": True},
    },
}

DEFAULTS = {
    "name": "",
    "seed": 0,
    "constellation": "QPSK",
    "channel_model": "freq",
    "trials": 1,
    "snap_to_bin": False,
    "radar": {
        "num_symbols": 1,
        "cp_duration_s": None,  # a quarter of the useful symbol
        "carrier_freq_hz": 77e9,
        "sub_sampling_ratio": 1,
    },
    "targets": [],
    "smnc": {"enabled": True, "epsilon_db": 0.5, "max_iters": 10},
    "cfar": {"train_cells": 16, "guard_cells": 4, "pfa": 1e-4},
    "sweep": {
        "l_values": [1, 2, 4, 8, 16, 32],
        "normalized_doppler": [0.0, 0.05, 0.1, 0.15, 0.2],
    },
    "outputs": ["profile_csv", "report"],
}

TARGET_DEFAULTS = {"phase_deg": 0.0}


class _Loader(yaml.SafeLoader):
    """SafeLoader that also reads ``1e9``-style floats (no exponent sign) as numbers."""


_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(r"""^[-+]?(?:[0-9][0-9_]*\.[0-9_]*|\.[0-9_]+|[0-9][0-9_]*)[eE][-+]?[0-9]+$"""),
    list("-+0123456789."),
)


class ScenarioError(ValueError):
    """Invalid scenario; ``problems`` lists (field path, line, message) triples."""

    def __init__(self, problems, source=None):
        self.problems = list(problems)
        self.source = source
        lines = []
        for path, line, msg in self.problems:
            where = f"{source}:{line}: " if source and line else ""
            lines.append(f"{where}{path or '<root>'}: {msg}")
        super().__init__("; ".join(lines))


@dataclass(frozen=True, eq=False)
class Scenario:
    """Resolved scenario. ``document`` is the canonical, defaults-filled form."""

    document: dict
    radar: RadarConfig
    targets: TargetSet
    cfar: CfarParams
    warnings: tuple = field(default=())

    @property
    def name(self) -> str:
        return self.document["name"]

    @property
    def noise_dbm(self) -> float:
        return self.document["noise_dbm"]

    @property
    def channel_model(self) -> str:
        return self.document["channel_model"]

    @property
    def constellation(self) -> str:
        return self.document["constellation"]

    @property
    def smnc(self) -> dict:
        return self.document["smnc"]

    @property
    def sweep(self) -> dict:
        return self.document["sweep"]

    @property
    def trials(self) -> int:
        return self.document["trials"]

    @property
    def outputs(self) -> list:
        return self.document["outputs"]

    def __eq__(self, other):
        return isinstance(other, Scenario) and self.document == other.document

    def with_overrides(self, **overrides) -> "Scenario":
        """New scenario with dotted-path overrides, e.g. ``{"radar.sub_sampling_ratio": 4}``."""
        doc = copy.deepcopy(self.document)
        for key, value in overrides.items():
            if value is None:
                continue
            node = doc
            *parents, leaf = key.split(".")
            for p in parents:
                node = node[p]
            node[leaf] = value
        return from_dict(doc)


def _merge_defaults(doc: dict) -> dict:
    out = copy.deepcopy(DEFAULTS)
    for key, value in doc.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key].update(value)
        else:
            out[key] = copy.deepcopy(value)
    out["targets"] = [{**TARGET_DEFAULTS, **t} for t in out["targets"]]
    radar = out["radar"]
    if radar["cp_duration_s"] is None:
        radar["cp_duration_s"] = radar["num_subcarriers"] / radar["bandwidth_hz"] / 4
    for key in ("bandwidth_hz", "cp_duration_s", "carrier_freq_hz"):
        radar[key] = float(radar[key])
    out["noise_dbm"] = float(out["noise_dbm"])
    return out


def _path(parts) -> str:
    return ".".join(str(p) for p in parts)


def _line_of(root_node, parts):
    """1-based source line of a YAML node addressed by a path, if known."""
    node = root_node
    for part in parts:
        if isinstance(node, yaml.MappingNode):
            match = [v for k, v in node.value if k.value == part]
            if not match:
                break
            node = match[0]
        elif isinstance(node, yaml.SequenceNode) and isinstance(part, int) and part < len(node.value):
            node = node.value[part]
        else:
            break
    return node.start_mark.line + 1 if node is not None else None


def _build(doc: dict, root_node=None, source=None) -> Scenario:
    def fail(parts, msg):
        line = _line_of(root_node, parts) if root_node is not None else None
        raise ScenarioError([(_path(parts), line, msg)], source)

    radar = doc["radar"]
    try:
        config = RadarConfig(
            num_subcarriers=radar["num_subcarriers"],
            num_symbols=radar["num_symbols"],
            bandwidth=radar["bandwidth_hz"],
            cp_duration=radar["cp_duration_s"],
            carrier_freq=radar["carrier_freq_hz"],
            sub_sampling_ratio=radar["sub_sampling_ratio"],
            noise_power=float(dbm_to_mw(doc["noise_dbm"])),
            rng_seed=doc["seed"],
        )
    except ConfigError as exc:
        msg = str(exc)
        key = "sub_sampling_ratio" if msg.startswith("L must") else "cp_duration_s" if "cp" in msg else None
        fail(["radar", key] if key else ["radar"], msg)

    warnings = []
    targets = []
    for i, entry in enumerate(doc["targets"]):
        range_m = entry["range_m"]
        if doc["snap_to_bin"]:
            delay = round(range_m / config.range_resolution) / config.bandwidth
        else:
            delay = 2.0 * range_m / SPEED_OF_LIGHT
        if delay >= 1.0 / config.subcarrier_spacing:
            fail(["targets", i, "range_m"], f"range {range_m} m exceeds the unambiguous range {config.max_range:.3f} m")
        if delay > config.cp_duration:
            warnings.append(f"targets.{i}: delay exceeds the cyclic prefix; inter-symbol interference present")
        if "normalized_doppler" in entry:
            doppler = 2 * np.pi * config.subcarrier_spacing * entry["normalized_doppler"]
        else:
            v = entry.get("velocity_mps", 0.0)
            doppler = 4 * np.pi * config.carrier_freq * v / SPEED_OF_LIGHT
        amplitude = np.sqrt(dbm_to_mw(entry["power_dbm"])) * np.exp(1j * np.deg2rad(entry["phase_deg"]))
        targets.append(Target(delay, float(doppler), complex(amplitude)))

    cfar = doc["cfar"]
    cfar_params = CfarParams(cfar["train_cells"], cfar["guard_cells"], cfar["pfa"])
    if config.num_subcarriers < cfar_params.window:
        fail(["cfar"], f"CFAR window ({cfar_params.window} cells) longer than the range profile")
    return Scenario(doc, config, TargetSet(targets), cfar_params, tuple(warnings))


def _validate(raw, root_node=None, source=None) -> dict:
    if not isinstance(raw, dict):
        raise ScenarioError([("", 1, "scenario must be a mapping")], source)
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(map(str, e.absolute_path)))
    if errors:
        problems = []
        for err in errors:
            parts = list(err.absolute_path)
            line = _line_of(root_node, parts) if root_node is not None else None
            problems.append((_path(parts), line, err.message))
        raise ScenarioError(problems, source)
    return _merge_defaults(raw)


def from_dict(raw: dict) -> Scenario:
    return _build(_validate(raw))


def loads(text: str, source=None) -> Scenario:
    try:
        root_node = yaml.compose(text, Loader=_Loader)
        raw = yaml.load(text, Loader=_Loader)
    except yaml.MarkedYAMLError as exc:
        mark = exc.problem_mark
        line = mark.line + 1 if mark is not None else None
        raise ScenarioError([("", line, f"parse error: {exc.problem}")], source) from None
    doc = _validate(raw, root_node, source)
    return _build(doc, root_node, source)


def load_scenario(path) -> Scenario:
    path = Path(path)
    return loads(path.read_text(), source=str(path))


def dumps(scenario: Scenario) -> str:
    return yaml.safe_dump(scenario.document, sort_keys=True, default_flow_style=None)


def save_scenario(scenario: Scenario, path) -> None:
    Path(path).write_text(dumps(scenario))


def bundled(name: str) -> Path:
    """Path of a scenario shipped with the package (``two_targets``, ``ratio_sweep``, ``doppler_sweep``)."""
    stem = name[:-4] if name.endswith(".scn") else name
    with resources.as_file(resources.files("snsofdm.scenarios") / f"{stem}.scn") as p:
        return Path(p)


def bundled_names() -> list[str]:
    return sorted(p.name for p in resources.files("snsofdm.scenarios").iterdir() if p.name.endswith(".scn"))
