# settings.py - JSON sweep configuration and its expansion into experiment points

import itertools
import json
import os
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from experiment_types import (DEFAULT_ANGLE_QUARTERS, DEFAULT_RESAMPLES, DEFAULT_SHOTS,
                              DEFAULT_VQED_RESAMPLES, DEFAULT_VQED_SHOTS, REGIMES,
                              CircuitKind, CircuitSpec, ConfigError, ExperimentSpec, Mitigation,
                              Readout, ReadoutKind, SpecError, parse_encoding, parse_mitigation)
from experiment import spec_labels, validate_spec
from noise import ErrorModel, error_model


@dataclass
class SettingItem:
    name: str
    value_type: str  # "int", "float", "bool", "str", "list", "any"
    value: Any
    min_val: Optional[float] = None
    max_val: Optional[float] = None

    def check(self, value: Any) -> Any:
        """Validate a candidate value and return it normalised"""
        expected = {"int": int, "float": (int, float), "bool": bool, "str": str, "list": list}
        if self.value_type in expected:
            if isinstance(value, bool) and self.value_type in ("int", "float"):
                raise ConfigError(f"{self.name}: expected {self.value_type}, got {value!r}")
            if not isinstance(value, expected[self.value_type]):
                raise ConfigError(f"{self.name}: expected {self.value_type}, got {value!r}")
        if self.min_val is not None and isinstance(value, (int, float)) and value < self.min_val:
            raise ConfigError(f"{self.name}: {value} is below the minimum {self.min_val}")
        if self.max_val is not None and isinstance(value, (int, float)) and value > self.max_val:
            raise ConfigError(f"{self.name}: {value} is above the maximum {self.max_val}")
        return float(value) if self.value_type == "float" else value


@dataclass
class SweepPoint:
    spec: ExperimentSpec
    model: ErrorModel
    shots: int
    seed: int
    resamples: int

    def labels(self) -> Dict[str, object]:
        """Identifying CSV columns"""
        return {**spec_labels(self.spec), "model": self.model.name, "p": f"{self.model.p:g}",
                "seed": self.seed}


class Settings:
    def __init__(self, config_file: Optional[str] = None):
        self.items: List[SettingItem] = [
            SettingItem("encodings", "list", ["DK"]),
            SettingItem("lattice_sizes", "list", [4]),
            SettingItem("circuit", "any", {"kind": "full-trotter", "steps": [2]}),
            SettingItem("readout", "any", "occupation"),
            SettingItem("mitigations", "list", ["none"]),
            SettingItem("occupations", "any", None),
            SettingItem("error_models", "list", [{"model": "SD"}]),
            SettingItem("p_values", "any", [0.001]),
            SettingItem("shots", "int", DEFAULT_SHOTS, 1),
            SettingItem("vqed_shots", "int", DEFAULT_VQED_SHOTS, 1),
            SettingItem("seed", "int", 0, 0),
            SettingItem("out", "str", "results"),
            SettingItem("clifford_angle", "int", DEFAULT_ANGLE_QUARTERS, 0, 7),
            SettingItem("vqed_layers", "int", 1, 1),
            SettingItem("vqed_flagged", "bool", False),
            SettingItem("sm_repeat", "bool", False),
            SettingItem("bootstrap_resamples", "int", DEFAULT_RESAMPLES, 1),
            SettingItem("vqed_resamples", "int", DEFAULT_VQED_RESAMPLES, 1),
        ]
        self.config_file = config_file
        if config_file is not None:
            self.load_settings()

    def load_settings(self) -> None:
        """Load settings from the JSON file over the defaults"""
        if not os.path.exists(self.config_file):
            raise ConfigError(f"config file not found: {self.config_file}")
        try:
            with open(self.config_file, "r") as f:
                data = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigError(f"{self.config_file} is not valid JSON: {e}") from None
        if not isinstance(data, dict):
            raise ConfigError(f"{self.config_file} must hold a JSON object")
        for name, value in data.items():
            self.set_value(name, value)

    def save_settings(self, path: Optional[str] = None) -> None:
        """Write the resolved settings as JSON"""
        data = {item.name: item.value for item in self.items}
        with open(path or self.config_file, "w") as f:
            json.dump(data, f, indent=2)
            f.write("\n")

    def _item(self, name: str) -> SettingItem:
        for item in self.items:
            if item.name == name:
                return item
        raise ConfigError(f"unknown setting '{name}'")

    def get_value(self, name: str) -> Any:
        """Get value of a setting by name"""
        return self._item(name).value

    def set_value(self, name: str, value: Any) -> None:
        item = self._item(name)
        item.value = item.check(value)

    def as_dict(self) -> Dict[str, Any]:
        return {item.name: item.value for item in self.items}

    # Sweep expansion

    def circuits(self) -> List[CircuitSpec]:
        block = self.get_value("circuit")
        if not isinstance(block, dict) or "kind" not in block:
            raise ConfigError("circuit: expected an object with a 'kind'")
        kind = block["kind"]
        if kind == "full-trotter":
            steps = _as_list(block.get("steps", [2]), "circuit.steps")
            for s in steps:
                if not isinstance(s, int) or isinstance(s, bool) or s < 0 or s % 2:
                    raise ConfigError(f"circuit.steps: {s!r} is not an even non-negative integer "
                                      f"(forward and mirrored steps together)")
            return [CircuitSpec(CircuitKind.FULL_TROTTER, steps=s) for s in steps]
        if kind == "random-logical":
            fractions = _as_list(block.get("fractions", [1.0]), "circuit.fractions")
            seed = block.get("seed", self.get_value("seed"))
            for f in fractions:
                if not isinstance(f, (int, float)) or not 0 <= f <= 2:
                    raise ConfigError(f"circuit.fractions: {f!r} must lie in [0, 2]")
            return [CircuitSpec(CircuitKind.RANDOM_LOGICAL, fraction=float(f), seed=int(seed))
                    for f in fractions]
        raise ConfigError(f"circuit.kind: unknown kind '{kind}'")

    def readouts(self) -> List[Readout]:
        value = self.get_value("readout")
        entries = value if isinstance(value, list) else [value]
        readouts = []
        for entry in entries:
            if entry == "occupation":
                readouts.append(Readout())
            elif entry == "hopping-all":
                readouts.extend(Readout(ReadoutKind.HOPPING, color, pair)
                                for color in range(4) for pair in ("xx", "yy"))
            elif isinstance(entry, dict) and "hopping" in entry:
                block = entry["hopping"]
                color, pair = block.get("color", 0), block.get("pair", "xx")
                if color not in range(4) or pair not in ("xx", "yy"):
                    raise ConfigError(f"readout: bad hopping block {block}")
                readouts.append(Readout(ReadoutKind.HOPPING, color, pair))
            else:
                raise ConfigError(f"readout: unknown readout {entry!r}")
        return readouts

    def error_models(self) -> List[ErrorModel]:
        p_values = self.get_value("p_values")
        if p_values == "regimes":
            p_values = sorted(REGIMES.values())
        p_values = _as_list(p_values, "p_values")
        for p in p_values:
            if not isinstance(p, (int, float)) or not 0 <= p <= 1:
                raise ConfigError(f"p_values: {p!r} is not a probability")
        models = []
        for block in self.get_value("error_models"):
            if not isinstance(block, dict) or "model" not in block:
                raise ConfigError(f"error_models: expected objects with a 'model', got {block!r}")
            if block["model"].lower() == "custom":
                rates = {k: v for k, v in block.items() if k != "model"}
                models.append(error_model("custom", **rates))
            else:
                models.extend(error_model(block["model"], float(p)) for p in p_values)
        return models

    def occupations_for(self, size: int) -> Optional[Tuple[int, ...]]:
        value = self.get_value("occupations")
        if value is None or value == "empty":
            return None
        if value == "alternating":
            return tuple((x + y) % 2 for y in range(size) for x in range(size))
        if isinstance(value, list):
            if len(value) != size * size:
                raise ConfigError(f"occupations: {len(value)} entries do not fit L={size}")
            return tuple(int(bool(v)) for v in value)
        raise ConfigError(f"occupations: unknown pattern {value!r}")

    def sweep_points(self) -> Tuple[List[SweepPoint], List[str]]:
        """Every valid point of the sweep matrix plus messages for skipped combinations"""
        encodings = [parse_encoding(e) for e in self.get_value("encodings")]
        mitigations = [parse_mitigation(m) for m in self.get_value("mitigations")]
        sizes = self.get_value("lattice_sizes")
        for size in sizes:
            if not isinstance(size, int) or size < 2 or size % 2:
                raise ConfigError(f"lattice_sizes: L={size!r} is not allowed, lattices need even L >= 2")
        models = self.error_models()
        base_seed = self.get_value("seed")
        points, skipped = [], []
        specs = []
        for encoding, size, circuit, readout, mitigation in itertools.product(
                encodings, sizes, self.circuits(), self.readouts(), mitigations):
            occupations = self.occupations_for(size) if readout.kind == ReadoutKind.OCCUPATION else None
            spec = ExperimentSpec(encoding, size, circuit, readout, mitigation, occupations,
                                  self.get_value("clifford_angle"), self.get_value("vqed_layers"),
                                  self.get_value("vqed_flagged"), self.get_value("sm_repeat"))
            try:
                validate_spec(spec)
            except SpecError as e:
                skipped.append(f"{spec.name()}: {e}")
                continue
            specs.append(spec)
        for spec, model in itertools.product(specs, models):
            vqed = spec.mitigation == Mitigation.VQED
            seed = point_seed(base_seed, len(points))
            points.append(SweepPoint(spec, model,
                                     self.get_value("vqed_shots" if vqed else "shots"), seed,
                                     self.get_value("vqed_resamples" if vqed else "bootstrap_resamples")))
        return points, skipped


def _as_list(value: Any, name: str) -> list:
    if isinstance(value, list):
        return value
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return [value]
    raise ConfigError(f"{name}: expected a list, got {value!r}")


def point_seed(master: int, index: int) -> int:
    """Independent sampling seed for the index-th sweep point"""
    return int(np.random.SeedSequence([master, index]).generate_state(1)[0])


def with_overrides(settings: Settings, seed: Optional[int] = None, shots: Optional[int] = None,
                   out: Optional[str] = None) -> Settings:
    """Apply command-line overrides"""
    if seed is not None:
        settings.set_value("seed", seed)
    if shots is not None:
        settings.set_value("shots", shots)
        settings.set_value("vqed_shots", shots)
    if out is not None:
        settings.set_value("out", out)
    return settings
