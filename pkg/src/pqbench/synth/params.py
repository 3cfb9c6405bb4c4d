"""Circuit configuration and per-record randomized parameters."""
from dataclasses import dataclass, fields
from typing import Optional, Tuple

from .._rng import SplitMix64, derive_seed
from .taxonomy import EventClass, fault_topology

SAMPLE_RATE = 4000.0
DURATION = 0.25
N_SAMPLES = 1000
CHANNELS = ("Va", "Vb", "Vc", "Ia", "Ib", "Ic")

# Uniform sampling bounds, drawn in this order from the record's stream.
PARAM_RANGES = {
    "event_time": (0.04, 0.10),
    "phase_fault_resistance": (0.001, 50.0),
    "ground_resistance": (0.001, 50.0),
    "fault_location_fraction": (0.05, 0.95),
    "breaker_delay": (0.05, 0.10),
    "load_resistance": (500.0, 2000.0),
    "load_inductance": (0.5, 3.0),
    "load_capacitance": (0.5e-6, 5e-6),
}
PERTURBATION_RANGE = (0.98, 1.02)

# Stream tag separating synthesis draws from any other consumer of the seed.
_SYNTH_STREAM = 0x5EED_0001


class ConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class CircuitConfig:
    voltage_ll: float = 380e3
    frequency: float = 50.0
    source_resistance: float = 1.0
    source_inductance: float = 0.030
    line_resistance: float = 3.0
    line_inductance: float = 0.100
    sample_rate: float = SAMPLE_RATE
    duration: float = DURATION

    def __post_init__(self):
        if self.sample_rate != SAMPLE_RATE or self.duration != DURATION:
            raise ConfigurationError("sample rate and duration are fixed at 4 kHz / 0.25 s")
        for name in ("voltage_ll", "frequency", "source_resistance", "source_inductance",
                     "line_resistance", "line_inductance"):
            if not getattr(self, name) > 0:
                raise ConfigurationError(f"{name} must be strictly positive")

    @property
    def n_samples(self) -> int:
        return int(round(self.sample_rate * self.duration))

    @property
    def dt(self) -> float:
        return 1.0 / self.sample_rate

    @property
    def peak_phase_voltage(self) -> float:
        return self.voltage_ll * (2.0 / 3.0) ** 0.5


@dataclass(frozen=True)
class SynthParams:
    """Generation parameters of one record.

    Fault-only fields are None for switching events, and ``ground_resistance``
    is None for ungrounded faults.
    """

    event_time: float
    phase_fault_resistance: Optional[float]
    ground_resistance: Optional[float]
    fault_location_fraction: Optional[float]
    breaker_delay: Optional[float]
    load_resistance: float
    load_inductance: float
    load_capacitance: float
    load_perturbation: Tuple[float, float, float]
    record_index: int
    master_seed: int

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["load_perturbation"] = list(self.load_perturbation)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "SynthParams":
        d = dict(d)
        d["load_perturbation"] = tuple(float(x) for x in d["load_perturbation"])
        return cls(**d)

    def validate(self, cls, duration: float = DURATION) -> None:
        """Raise ValueError unless the parameters are in range and match ``cls``."""
        cls = EventClass(cls)
        fault_fields = ("phase_fault_resistance", "fault_location_fraction", "breaker_delay")
        if cls.is_fault:
            missing = [n for n in fault_fields if getattr(self, n) is None]
            if missing:
                raise ValueError(f"{cls.name} requires fault parameters {missing}")
            grounded = fault_topology(cls).grounded
            if grounded and self.ground_resistance is None:
                raise ValueError(f"{cls.name} requires ground_resistance")
            if not grounded and self.ground_resistance is not None:
                raise ValueError(f"{cls.name} is ungrounded but ground_resistance is set")
            if self.event_time + self.breaker_delay >= duration:
                raise ValueError("event_time + breaker_delay must fall inside the record")
        else:
            present = [n for n in fault_fields + ("ground_resistance",) if getattr(self, n) is not None]
            if present:
                raise ValueError(f"{cls.name} is a switching event but has fault parameters {present}")
        for name, (lo, hi) in PARAM_RANGES.items():
            value = getattr(self, name)
            if value is not None and not lo <= value <= hi:
                raise ValueError(f"{name}={value!r} outside [{lo}, {hi}]")
        lo, hi = PERTURBATION_RANGE
        if len(self.load_perturbation) != 3 or not all(lo <= f <= hi for f in self.load_perturbation):
            raise ValueError(f"load_perturbation {self.load_perturbation!r} outside [{lo}, {hi}]")
        if self.record_index < 0:
            raise ValueError("record_index must be non-negative")


def sample_params(cls, master_seed: int, index: int) -> SynthParams:
    """Draw the parameters of record ``index`` of class ``cls``.

    Every field is drawn in a fixed order from a SplitMix64 stream seeded only
    by (master_seed, class code, index); fields irrelevant to the class are
    drawn anyway and then dropped, so the stream layout never depends on class.
    """
    cls = EventClass(cls)
    if index < 0:
        raise ValueError("index must be >= 0")
    rng = SplitMix64(derive_seed(_SYNTH_STREAM, master_seed, int(cls), index))
    drawn = {name: rng.uniform(lo, hi) for name, (lo, hi) in PARAM_RANGES.items()}
    pert = tuple(rng.uniform(*PERTURBATION_RANGE) for _ in range(3))
    if cls.is_switching:
        for name in ("phase_fault_resistance", "ground_resistance",
                     "fault_location_fraction", "breaker_delay"):
            drawn[name] = None
    elif not fault_topology(cls).grounded:
        drawn["ground_resistance"] = None
    return SynthParams(load_perturbation=pert, record_index=index,
                       master_seed=master_seed, **drawn)
