"""Scenario configuration: network, service, and channel parameters.

All rates are bits/s, powers are watts, distances are meters. dB-valued
fields carry a ``_db`` suffix.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

# Defaults describe a single downlink sector: 6 resource blocks shared by
# 4 terminals split across 2 service plans with per-service satisfaction
# quotas (2, 1) and per-terminal throughput targets.


@dataclass
class ScenarioConfig:
    num_rbs: int = 6
    num_ues: int = 4
    num_services: int = 2
    ues_per_service: tuple[int, ...] = (2, 2)
    min_satisfied_per_service: tuple[int, ...] = (2, 1)
    qos_targets: tuple[float, ...] = (150e3, 150e3, 300e3, 300e3)
    power_per_rb: float = 0.35
    cell_radius: float = 334.0
    min_distance: float = 10.0
    shadowing_stddev_db: float = 8.0
    pathloss_offset_db: float = 35.3
    pathloss_slope_db: float = 37.6
    noise_spectral_density: float = 3.16e-20
    subcarriers_per_rb: int = 12
    subcarrier_spacing: float = 15e3
    rng_seed: int = 0

    def __post_init__(self):
        self.ues_per_service = tuple(int(x) for x in self.ues_per_service)
        self.min_satisfied_per_service = tuple(int(x) for x in self.min_satisfied_per_service)
        self.qos_targets = tuple(float(x) for x in self.qos_targets)
        self.validate()

    def validate(self):
        if self.num_rbs < 1:
            raise ConfigurationError(f"num_rbs must be >= 1, got {self.num_rbs}")
        if self.num_ues < 1:
            raise ConfigurationError(f"num_ues must be >= 1, got {self.num_ues}")
        if len(self.ues_per_service) != self.num_services:
            raise ConfigurationError(
                f"ues_per_service has {len(self.ues_per_service)} entries "
                f"for {self.num_services} services")
        if sum(self.ues_per_service) != self.num_ues:
            raise ConfigurationError(
                f"ues_per_service {self.ues_per_service} does not sum to num_ues={self.num_ues}")
        if len(self.min_satisfied_per_service) != self.num_services:
            raise ConfigurationError("min_satisfied_per_service length mismatch")
        for eta, count in zip(self.min_satisfied_per_service, self.ues_per_service):
            if not 0 <= eta <= count:
                raise ConfigurationError(
                    f"satisfaction quota {eta} outside [0, {count}]")
        if len(self.qos_targets) != self.num_ues:
            raise ConfigurationError("qos_targets must have one entry per UE")
        if any(x <= 0 for x in self.qos_targets):
            raise ConfigurationError("qos_targets must be positive")
        if self.power_per_rb <= 0:
            raise ConfigurationError("power_per_rb must be positive")
        if not 0 < self.min_distance < self.cell_radius:
            raise ConfigurationError("need 0 < min_distance < cell_radius")
        if self.noise_spectral_density <= 0 or self.subcarriers_per_rb < 1 \
                or self.subcarrier_spacing <= 0:
            raise ConfigurationError("invalid noise/bandwidth parameters")
        if self.shadowing_stddev_db < 0:
            raise ConfigurationError("shadowing_stddev_db must be >= 0")

    @property
    def rb_bandwidth(self) -> float:
        """Bandwidth of one resource block in Hz."""
        return self.subcarriers_per_rb * self.subcarrier_spacing

    @property
    def noise_power(self) -> float:
        """Receiver noise power in the bandwidth of one RB, in watts."""
        return self.noise_spectral_density * self.rb_bandwidth

    @property
    def service_of(self) -> np.ndarray:
        """Length-J int array mapping each UE index to its service index."""
        return np.repeat(np.arange(self.num_services), self.ues_per_service)

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def to_file(self, path):
        lines = ["# scenario configuration (edit freely; '#' starts a comment)"]
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                text = ", ".join(repr(v) for v in value)
            else:
                text = repr(value)
            lines.append(f"{f.name} = {text}")
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")

    @classmethod
    def from_file(cls, path) -> "ScenarioConfig":
        """Parse a ``key = value`` file; unknown keys are rejected."""
        fields = {f.name: f for f in dataclasses.fields(cls)}
        kwargs = {}
        with open(path) as fh:
            for lineno, raw in enumerate(fh, 1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    raise ConfigurationError(f"{path}:{lineno}: expected 'key = value'")
                key, _, text = line.partition("=")
                key = key.strip()
                if key not in fields:
                    raise ConfigurationError(f"{path}:{lineno}: unknown key {key!r}")
                kwargs[key] = _parse_value(fields[key].type, text.strip())
        return cls(**kwargs)


def _parse_value(type_name: str, text: str):
    if type_name == "int":
        return int(text)
    if type_name == "float":
        return float(text)
    # remaining fields are tuples of numbers
    parts = [p for p in (s.strip() for s in text.split(",")) if p]
    if "float" in type_name:
        return tuple(float(p) for p in parts)
    return tuple(int(p) for p in parts)
