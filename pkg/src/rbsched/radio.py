"""Link model and problem-instance generation.

One instance is a single scheduling interval: a J x N matrix of linear
SNRs, the matching achievable-rate matrix after link adaptation, the
per-UE throughput targets, and the per-service satisfaction quotas.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ScenarioConfig
from .errors import ConfigurationError, InvalidParameterError


def compute_snr(power: float, alpha: float, h_mag: float, noise_power: float) -> float:
    """Linear SNR of one (UE, RB) link: power * alpha * |h|^2 / noise_power.

    ``alpha`` is the linear large-scale gain (path loss plus shadowing),
    ``h_mag`` the magnitude of the small-scale channel coefficient.
    """
    for name, value in (("power", power), ("alpha", alpha),
                        ("h_mag", h_mag), ("noise_power", noise_power)):
        if not np.isfinite(value):
            raise InvalidParameterError(f"{name} must be finite, got {value}")
        if value < 0:
            raise InvalidParameterError(f"{name} must be >= 0, got {value}")
    if noise_power == 0:
        raise InvalidParameterError("noise_power must be > 0")
    return power * alpha * h_mag * h_mag / noise_power


class McsTable:
    """Discrete monotone SNR-to-rate map (one MCS level per row).

    ``thresholds`` are linear SNRs in strictly increasing order and
    ``rates`` the corresponding bits/s over one RB. The first row is the
    no-transmission level: its rate must be 0, so any SNR below the first
    positive threshold maps to rate 0.
    """

    def __init__(self, thresholds, rates):
        self.thresholds = np.asarray(thresholds, dtype=float)
        self.rates = np.asarray(rates, dtype=float)
        if self.thresholds.size == 0:
            raise ConfigurationError("MCS table must not be empty")
        if self.thresholds.shape != self.rates.shape or self.thresholds.ndim != 1:
            raise ConfigurationError("thresholds and rates must be equal-length vectors")
        if not np.all(np.isfinite(self.thresholds)) or not np.all(np.isfinite(self.rates)):
            raise ConfigurationError("MCS table entries must be finite")
        if np.any(self.thresholds < 0) or np.any(self.rates < 0):
            raise ConfigurationError("MCS table entries must be >= 0")
        if np.any(np.diff(self.thresholds) <= 0):
            raise ConfigurationError("MCS thresholds must be strictly increasing")
        if np.any(np.diff(self.rates) < 0):
            raise ConfigurationError("MCS rates must be nondecreasing")
        if self.rates[0] != 0.0:
            raise ConfigurationError("first MCS level must carry rate 0")

    def __len__(self):
        return self.thresholds.size

    @classmethod
    def default(cls, rb_bandwidth: float, num_levels: int = 15,
                min_snr_db: float = -6.5, max_snr_db: float = 19.5) -> "McsTable":
        """Truncated-Shannon table: ``num_levels`` thresholds evenly spaced
        in dB, each mapped to floor(bandwidth * log2(1 + threshold)).

        Rates are integer-valued by construction, which keeps assignment
        objectives exactly comparable across solvers.
        """
        thr_db = np.linspace(min_snr_db, max_snr_db, num_levels)
        thr = 10.0 ** (thr_db / 10.0)
        rates = np.floor(rb_bandwidth * np.log2(1.0 + thr))
        return cls(np.concatenate(([0.0], thr)), np.concatenate(([0.0], rates)))

    def to_file(self, path):
        with open(path, "w") as fh:
            fh.write("# snr_threshold_linear,rate_bps\n")
            for t, r in zip(self.thresholds, self.rates):
                fh.write(f"{float(t)!r},{float(r)!r}\n")

    @classmethod
    def from_file(cls, path) -> "McsTable":
        thresholds, rates = [], []
        with open(path) as fh:
            for raw in fh:
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                t, r = line.split(",")
                thresholds.append(float(t))
                rates.append(float(r))
        return cls(thresholds, rates)


def link_adaptation(snr, table: McsTable):
    """Rate of the highest MCS level whose threshold is <= snr.

    Accepts a scalar or an array; monotone nondecreasing in snr. SNRs
    below the first positive threshold yield 0.
    """
    snr = np.asarray(snr, dtype=float)
    if np.any(np.isnan(snr)) or np.any(snr < 0):
        raise InvalidParameterError("snr must be >= 0")
    idx = np.searchsorted(table.thresholds, snr, side="right") - 1
    out = np.where(idx >= 0, table.rates[np.maximum(idx, 0)], 0.0)
    return float(out) if out.ndim == 0 else out


@dataclass
class Instance:
    """One problem realization (channel state plus QoS constraints)."""

    snr: np.ndarray                 # (J, N) linear SNR per (UE, RB)
    rate: np.ndarray                # (J, N) achievable bits/s per (UE, RB)
    qos: np.ndarray                 # (J,) per-UE throughput target, bits/s
    service_of: np.ndarray          # (J,) service index of each UE
    min_satisfied: np.ndarray       # (L,) per-service satisfaction quota
    instance_id: int = 0

    def __post_init__(self):
        self.snr = np.asarray(self.snr, dtype=float)
        self.rate = np.asarray(self.rate, dtype=float)
        self.qos = np.asarray(self.qos, dtype=float)
        self.service_of = np.asarray(self.service_of, dtype=int)
        self.min_satisfied = np.asarray(self.min_satisfied, dtype=int)
        if self.snr.ndim != 2 or self.snr.shape != self.rate.shape:
            raise InvalidParameterError("snr and rate must be equal-shape (J, N) matrices")
        if self.qos.shape != (self.num_ues,) or self.service_of.shape != (self.num_ues,):
            raise InvalidParameterError("qos/service_of must have one entry per UE")
        if np.any(self.snr < 0) or np.any(self.rate < 0):
            raise InvalidParameterError("snr and rate must be >= 0")

    @property
    def num_ues(self) -> int:
        return self.snr.shape[0]

    @property
    def num_rbs(self) -> int:
        return self.snr.shape[1]

    @property
    def num_services(self) -> int:
        return self.min_satisfied.size


def generate_instance(config: ScenarioConfig, rng: np.random.Generator,
                      instance_id: int = 0, mcs: McsTable | None = None) -> Instance:
    """Draw one instance: positions, large-scale gains, fading, rates.

    Deterministic given (config, rng state). Draw order is fixed:
    distances (J), shadowing (J), fading magnitudes (J x N).

    UE distances are uniform in area over the annulus
    [min_distance, cell_radius]. Large-scale gain combines the
    log-distance path loss ``offset + slope*log10(d)`` dB with log-normal
    shadowing. Fading magnitudes are Rayleigh with E[|h|^2] = 1.
    """
    if mcs is None:
        mcs = McsTable.default(config.rb_bandwidth)
    j, n = config.num_ues, config.num_rbs

    r0sq = config.min_distance ** 2
    rsq = config.cell_radius ** 2
    dist = np.sqrt(rng.uniform(r0sq, rsq, size=j))
    pathloss_db = config.pathloss_offset_db + config.pathloss_slope_db * np.log10(dist)
    shadowing_db = rng.normal(0.0, config.shadowing_stddev_db, size=j) \
        if config.shadowing_stddev_db > 0 else np.zeros(j)
    alpha = 10.0 ** (-(pathloss_db + shadowing_db) / 10.0)

    # scale 1/sqrt(2) makes E[|h|^2] = 2*scale^2 = 1
    h_mag = rng.rayleigh(scale=1.0 / np.sqrt(2.0), size=(j, n))

    snr = config.power_per_rb * alpha[:, None] * h_mag ** 2 / config.noise_power
    rate = link_adaptation(snr, mcs)
    return Instance(snr=snr, rate=rate, qos=np.array(config.qos_targets),
                    service_of=config.service_of,
                    min_satisfied=np.array(config.min_satisfied_per_service),
                    instance_id=instance_id)


def save_instance(instance: Instance, path):
    """Write an instance as tagged CSV rows; matrices are row = UE, column = RB.

    Floats use shortest round-trip repr, so load(save(x)) is bit-exact.
    """
    lines = [
        f"instance_id,{instance.instance_id}",
        "service," + ",".join(str(int(s)) for s in instance.service_of),
        "min_satisfied," + ",".join(str(int(m)) for m in instance.min_satisfied),
        "qos," + ",".join(repr(float(q)) for q in instance.qos),
    ]
    for j in range(instance.num_ues):
        lines.append(f"snr,{j}," + ",".join(repr(float(v)) for v in instance.snr[j]))
    for j in range(instance.num_ues):
        lines.append(f"rate,{j}," + ",".join(repr(float(v)) for v in instance.rate[j]))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def load_instance(path) -> Instance:
    instance_id = 0
    service = min_satisfied = qos = None
    snr_rows, rate_rows = {}, {}
    with open(path) as fh:
        for raw in fh:
            line = raw.strip()
            if not line:
                continue
            tag, _, rest = line.partition(",")
            parts = rest.split(",")
            if tag == "instance_id":
                instance_id = int(parts[0])
            elif tag == "service":
                service = [int(p) for p in parts]
            elif tag == "min_satisfied":
                min_satisfied = [int(p) for p in parts]
            elif tag == "qos":
                qos = [float(p) for p in parts]
            elif tag in ("snr", "rate"):
                target = snr_rows if tag == "snr" else rate_rows
                target[int(parts[0])] = [float(p) for p in parts[1:]]
            else:
                raise InvalidParameterError(f"unknown instance row tag {tag!r}")
    if service is None or min_satisfied is None or qos is None or not snr_rows:
        raise InvalidParameterError(f"incomplete instance file {path}")
    snr = np.array([snr_rows[j] for j in sorted(snr_rows)])
    rate = np.array([rate_rows[j] for j in sorted(rate_rows)])
    return Instance(snr=snr, rate=rate, qos=np.array(qos),
                    service_of=np.array(service),
                    min_satisfied=np.array(min_satisfied),
                    instance_id=instance_id)
