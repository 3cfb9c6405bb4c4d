"""Two-bus transmission circuit driven through fault and switching timelines.

Per phase p::

    EMF_p --[Rs+x*Rl, Ls+x*Ll]--(F_p)--[(1-x)*Rl, (1-x)*Ll]--(L_p)--[R_load, L_load]--(M)
                 breaker pole          fault node               load bus
                                                                 |
                                                                 C to ground

The wye load star point M goes to ground through a high neutral resistance,
so a balanced fault draws almost no ground current while a floating star
point cannot pin the healthy phases during a bolted line-to-ground fault.

Faulted phases join F_p to a common node N through the phase fault
resistance; N goes to ground through the ground resistance for grounded
classes and floats otherwise. Voltages and currents are recorded at the
sending-end relay point: the bus between the source impedance and the line,
and the breaker current.
"""
from dataclasses import dataclass

import numpy as np

from .circuit import (BACKWARD_EULER, CAP, RES, RL, TRAPEZOIDAL, BranchState,
                      Network, make_network, phasor_solution,
                      phasor_state, step)
from .params import CircuitConfig, SynthParams, sample_params
from .taxonomy import EventClass, fault_topology

# node indices
F_NODES = (0, 1, 2)
LOAD_NODES = (3, 4, 5)
FAULT_COMMON = 6
LOAD_NEUTRAL = 7
N_NODES = 8

# branch indices
SRC = np.arange(0, 3)
SEG = np.arange(3, 6)
LOAD = np.arange(6, 9)
SHUNT = np.arange(9, 12)
FAULT = np.arange(12, 15)
GROUND = 15
NEUTRAL = 16
N_BRANCHES = 17

# load star point to ground, ohms
NEUTRAL_RESISTANCE = 300.0

PHASE_ANGLES = np.array([0.0, -2.0 * np.pi / 3.0, 2.0 * np.pi / 3.0])

_NOMINAL_LOCATION = 0.5


@dataclass(frozen=True)
class WaveformRecord:
    id: int
    label: EventClass
    params: SynthParams
    samples: np.ndarray  # (6, 1000): Va, Vb, Vc, Ia, Ib, Ic


def build_network(config: CircuitConfig, params: SynthParams, cls) -> Network:
    """All branches of the circuit; the caller sets which are active."""
    x = params.fault_location_fraction
    if x is None:
        x = _NOMINAL_LOCATION
    rf = params.phase_fault_resistance or 1.0
    rg = params.ground_resistance or 1.0
    branches = []
    for p in range(3):
        branches.append((-1, F_NODES[p], RL, (config.source_resistance + x * config.line_resistance,
                                              config.source_inductance + x * config.line_inductance)))
    for p in range(3):
        branches.append((F_NODES[p], LOAD_NODES[p], RL, ((1 - x) * config.line_resistance,
                                                         (1 - x) * config.line_inductance)))
    for p in range(3):
        f = params.load_perturbation[p]
        branches.append((LOAD_NODES[p], LOAD_NEUTRAL, RL, (params.load_resistance * f,
                                                     params.load_inductance * f)))
    for p in range(3):
        branches.append((LOAD_NODES[p], -1, CAP, params.load_capacitance))
    for p in range(3):
        branches.append((F_NODES[p], FAULT_COMMON, RES, rf))
    branches.append((FAULT_COMMON, -1, RES, rg))
    branches.append((LOAD_NEUTRAL, -1, RES, NEUTRAL_RESISTANCE))
    return make_network(N_NODES, branches)


def active_mask(cls, poles_closed, fault_on: bool) -> np.ndarray:
    active = np.ones(N_BRANCHES, dtype=bool)
    active[SRC] = poles_closed
    active[FAULT] = False
    active[GROUND] = False
    if fault_on:
        spec = fault_topology(cls)
        for p in spec.phase_indices:
            active[FAULT[p]] = True
        active[GROUND] = spec.grounded
    return active


def emf_phasors(config: CircuitConfig) -> np.ndarray:
    E = np.zeros(N_BRANCHES, dtype=complex)
    E[SRC] = config.peak_phase_voltage * np.exp(1j * PHASE_ANGLES)
    return E


def init_steady_state(config: CircuitConfig, params: SynthParams, net: Network) -> BranchState:
    """Branch currents and voltages at t=0 of the pre-event sinusoidal steady state.

    ``net`` carries the pre-event topology (healthy, or breaker open before
    energization). Raises TopologyError for a singular network.
    """
    omega = 2.0 * np.pi * config.frequency
    return phasor_state(net, omega, emf_phasors(config), t=0.0)


def _first_index_at(t: float, fs: float) -> int:
    return int(np.ceil(t * fs - 1e-9))


def simulate(config: CircuitConfig, cls, params: SynthParams, record_id: int = 0) -> WaveformRecord:
    """Run the event timeline and return the 6 x 1000 relay-point record."""
    cls = EventClass(cls)
    params.validate(cls, config.duration)
    fs, dt, n = config.sample_rate, config.dt, config.n_samples
    omega = 2.0 * np.pi * config.frequency
    Ls, Rs = config.source_inductance, config.source_resistance

    base = build_network(config, params, cls)
    n_event = _first_index_at(params.event_time, fs)
    if cls.is_fault:
        n_trip = _first_index_at(params.event_time + params.breaker_delay, fs)
    elif cls == EventClass.LINE_DEENERGIZE:
        n_trip = n_event
    else:
        n_trip = n + 1

    poles = np.ones(3, dtype=bool)
    if cls == EventClass.LINE_ENERGIZE:
        poles[:] = False
    fault_on = False
    net = base.with_active(active_mask(cls, poles, fault_on))
    state = init_steady_state(config, params, net)

    t = np.arange(n) * dt
    e = config.peak_phase_voltage * np.cos(omega * t[:, None] + PHASE_ANGLES[None, :])
    i_src = state.i[SRC].copy()
    v_ls = _source_inductor_voltage0(config, net, poles)

    out = np.empty((6, n))
    out[3:, 0] = i_src
    out[:3, 0] = e[0] - Rs * i_src - v_ls

    cache = {}
    emf = np.zeros(N_BRANCHES)
    restart = False
    for k in range(1, n):
        if k == n_event:
            if cls.is_fault:
                fault_on = True
            elif cls == EventClass.LINE_ENERGIZE:
                poles[:] = True
            restart = True
        if restart:
            net = base.with_active(active_mask(cls, poles, fault_on))
        emf[SRC] = e[k]
        _, state = step(net, state, dt, emf, BACKWARD_EULER if restart else TRAPEZOIDAL, cache)
        i_new = state.i[SRC]
        if restart:
            v_ls = (Ls / dt) * (i_new - i_src)
        else:
            v_ls = (2.0 * Ls / dt) * (i_new - i_src) - v_ls
        v_ls[~poles] = 0.0
        out[3:, k] = i_new
        out[:3, k] = e[k] - Rs * i_new - v_ls
        restart = False
        if k >= n_trip and poles.any():
            crossed = poles & (i_new * i_src <= 0.0)
            if crossed.any():
                poles = poles & ~crossed
                restart = True
        i_src = i_new.copy()
    return WaveformRecord(record_id, cls, params, out)


def _source_inductor_voltage0(config: CircuitConfig, net: Network, poles) -> np.ndarray:
    omega = 2.0 * np.pi * config.frequency
    _, _, Ib = phasor_solution(net, omega, emf_phasors(config))
    v = (1j * omega * config.source_inductance * Ib[SRC]).real
    return np.where(poles, v, 0.0)


def generate(config: CircuitConfig, cls, master_seed: int, index: int, record_id: int = 0) -> WaveformRecord:
    """Pure function of (config, class, seed, index)."""
    return simulate(config, cls, sample_params(cls, master_seed, index), record_id)
