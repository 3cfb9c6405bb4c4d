from dataclasses import dataclass
from enum import IntEnum


class EventClass(IntEnum):
    AG = 0
    BG = 1
    CG = 2
    ABG = 3
    ACG = 4
    BCG = 5
    ABCG = 6
    AB = 7
    AC = 8
    BC = 9
    ABC = 10
    LINE_ENERGIZE = 11
    LINE_DEENERGIZE = 12

    @property
    def is_fault(self) -> bool:
        return self.value <= 10

    @property
    def is_switching(self) -> bool:
        return not self.is_fault


CLASS_NAMES = tuple(c.name for c in EventClass)
N_CLASSES = len(CLASS_NAMES)

PHASES = ("A", "B", "C")


@dataclass(frozen=True)
class FaultSpec:
    phases: frozenset
    grounded: bool

    @property
    def phase_indices(self) -> tuple:
        return tuple(i for i, p in enumerate(PHASES) if p in self.phases)


def fault_topology(cls) -> FaultSpec:
    """Phase set and ground flag encoded in the class name (AG -> {A}, grounded)."""
    cls = EventClass(cls)
    if cls.is_switching:
        return FaultSpec(frozenset(), False)
    name = cls.name
    grounded = name.endswith("G")
    letters = name[:-1] if grounded else name
    return FaultSpec(frozenset(letters), grounded)
