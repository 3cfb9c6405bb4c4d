"""Lumped linear circuit solved with trapezoidal companion models.

Each branch joins two nodes (index -1 is ground). Current is positive from
``node_from`` to ``node_to``; the branch voltage includes an optional series
EMF, ``v_branch = v_from - v_to + emf``. Inductive branches are series R-L.

Companion forms, for step ``dt``::

    R-L  trapezoidal  i_n = G v_n + G (v_{n-1} + (2L/dt - R) i_{n-1}),  G = 1/(R + 2L/dt)
    C    trapezoidal  i_n = G v_n - (G v_{n-1} + i_{n-1}),              G = 2C/dt

The first step after a switching event uses backward Euler instead, which
needs no voltage history and so does not ring on the discontinuity.
"""
from dataclasses import dataclass, replace

import numpy as np

RL, RES, CAP = 0, 1, 2

TRAPEZOIDAL = "trapezoidal"
BACKWARD_EULER = "backward_euler"


class TopologyError(ValueError):
    """Nodal matrix is singular for the active topology."""


@dataclass(frozen=True)
class Network:
    n_nodes: int
    node_from: np.ndarray
    node_to: np.ndarray
    kind: np.ndarray
    R: np.ndarray
    L: np.ndarray
    C: np.ndarray
    active: np.ndarray

    @property
    def n_branches(self) -> int:
        return len(self.kind)

    def incidence(self) -> np.ndarray:
        M = np.zeros((self.n_nodes, self.n_branches))
        for k, (a, b) in enumerate(zip(self.node_from, self.node_to)):
            if a >= 0:
                M[a, k] += 1.0
            if b >= 0:
                M[b, k] -= 1.0
        return M

    def with_active(self, active) -> "Network":
        return replace(self, active=np.asarray(active, dtype=bool))


def make_network(n_nodes, branches) -> Network:
    """Build a Network from ``(from, to, kind, value)`` tuples.

    ``value`` is ``(R, L)`` for RL branches, ``R`` for resistors, ``C`` for
    capacitors. All branches start active.
    """
    n = len(branches)
    frm = np.empty(n, dtype=np.int64)
    to = np.empty(n, dtype=np.int64)
    kind = np.empty(n, dtype=np.int64)
    R, L, C = np.zeros(n), np.zeros(n), np.zeros(n)
    for k, (a, b, kd, value) in enumerate(branches):
        frm[k], to[k], kind[k] = a, b, kd
        if kd == RL:
            R[k], L[k] = value
            if not (R[k] >= 0 and L[k] > 0):
                raise TopologyError(f"branch {k}: R-L needs R >= 0 and L > 0")
        elif kd == RES:
            R[k] = value
            if not R[k] > 0:
                raise TopologyError(f"branch {k}: resistance must be positive")
        elif kd == CAP:
            C[k] = value
            if not C[k] > 0:
                raise TopologyError(f"branch {k}: capacitance must be positive")
        else:
            raise TopologyError(f"branch {k}: unknown kind {kd}")
    return Network(n_nodes, frm, to, kind, R, L, C, np.ones(n, dtype=bool))


@dataclass
class BranchState:
    i: np.ndarray
    v: np.ndarray

    @classmethod
    def zeros(cls, n_branches: int) -> "BranchState":
        return cls(np.zeros(n_branches), np.zeros(n_branches))

    def copy(self) -> "BranchState":
        return BranchState(self.i.copy(), self.v.copy())


def companion_conductance(net: Network, dt: float, method: str = TRAPEZOIDAL) -> np.ndarray:
    G = np.zeros(net.n_branches)
    rl = net.kind == RL
    res = net.kind == RES
    cap = net.kind == CAP
    if method == TRAPEZOIDAL:
        G[rl] = 1.0 / (net.R[rl] + 2.0 * net.L[rl] / dt)
        G[cap] = 2.0 * net.C[cap] / dt
    elif method == BACKWARD_EULER:
        G[rl] = 1.0 / (net.R[rl] + net.L[rl] / dt)
        G[cap] = net.C[cap] / dt
    else:
        raise ValueError(f"unknown integration method {method!r}")
    G[res] = 1.0 / net.R[res]
    G[~net.active] = 0.0
    return G


def history_coefficients(net: Network, G: np.ndarray, dt: float, method: str = TRAPEZOIDAL):
    """Coefficients ``(a, b)`` with history current ``h = a * v_prev + b * i_prev``."""
    rl = net.kind == RL
    cap = net.kind == CAP
    a = np.zeros(net.n_branches)
    b = np.zeros(net.n_branches)
    if method == TRAPEZOIDAL:
        a[rl] = G[rl]
        b[rl] = G[rl] * (2.0 * net.L[rl] / dt - net.R[rl])
        a[cap] = -G[cap]
        b[cap] = -1.0
    else:
        b[rl] = G[rl] * net.L[rl] / dt
        a[cap] = -G[cap]
    a[~net.active] = 0.0
    b[~net.active] = 0.0
    return a, b


def history_current(net: Network, state: BranchState, G: np.ndarray, dt: float,
                    method: str = TRAPEZOIDAL) -> np.ndarray:
    a, b = history_coefficients(net, G, dt, method)
    return a * state.v + b * state.i


def _pin_floating(Y: np.ndarray) -> np.ndarray:
    # Nodes with no active branch are pinned to 0 V.
    diag = np.diag(Y)
    idle = np.flatnonzero(diag == 0)
    Y[idle, idle] = 1.0
    return Y


def nodal_inverse(net: Network, G: np.ndarray, M: np.ndarray = None) -> np.ndarray:
    if M is None:
        M = net.incidence()
    Y = _pin_floating((M * G) @ M.T)
    try:
        inv = np.linalg.inv(Y)
    except np.linalg.LinAlgError as exc:
        raise TopologyError("singular nodal conductance matrix") from exc
    if not np.all(np.isfinite(inv)) or np.linalg.cond(Y) > 1e14:
        raise TopologyError("singular nodal conductance matrix")
    return inv


def step(net: Network, state: BranchState, dt: float, emf=None,
         method: str = TRAPEZOIDAL, cache: dict = None):
    """Advance one step; return ``(node_voltages, new_state)``.

    ``emf`` holds the series source voltage of each branch at the new time
    point. ``cache`` may be a dict reused across calls to keep the factorized
    nodal matrix of each (topology, method) pair.
    """
    if emf is None:
        emf = np.zeros(net.n_branches)
    if cache is None:
        cache = {}
    key = (net.active.tobytes(), method)
    entry = cache.get(key)
    if entry is None:
        M = cache.get("M")
        if M is None:
            M = cache["M"] = net.incidence()
        G = companion_conductance(net, dt, method)
        a, b = history_coefficients(net, G, dt, method)
        P = -nodal_inverse(net, G, M) @ M
        entry = cache[key] = (G, a, b, P, M.T.copy(), ~net.active)
    G, a, b, P, Mt, idle = entry
    h = a * state.v + b * state.i
    v = P @ (G * emf + h)
    vb = Mt @ v + emf
    i = G * vb + h
    vb[idle] = 0.0
    return v, BranchState(i, vb)


def phasor_solution(net: Network, omega: float, emf_phasors=None):
    """Sinusoidal steady state: complex node voltages, branch voltages, branch currents."""
    n = net.n_branches
    E = np.zeros(n, dtype=complex) if emf_phasors is None else np.asarray(emf_phasors, dtype=complex)
    y = np.zeros(n, dtype=complex)
    rl = net.kind == RL
    y[rl] = 1.0 / (net.R[rl] + 1j * omega * net.L[rl])
    y[net.kind == RES] = 1.0 / net.R[net.kind == RES]
    y[net.kind == CAP] = 1j * omega * net.C[net.kind == CAP]
    y[~net.active] = 0.0
    M = net.incidence()
    Y = _pin_floating((M * y) @ M.T)
    try:
        V = np.linalg.solve(Y, -(M @ (y * E)))
    except np.linalg.LinAlgError as exc:
        raise TopologyError("singular phasor admittance matrix") from exc
    Vb = M.T @ V + E
    Vb[~net.active] = 0.0
    return V, Vb, y * Vb


def phasor_state(net: Network, omega: float, emf_phasors=None, t: float = 0.0):
    """Instantaneous branch state at time ``t`` of the sinusoidal steady state."""
    _, Vb, Ib = phasor_solution(net, omega, emf_phasors)
    rot = np.exp(1j * omega * t)
    return BranchState((Ib * rot).real.copy(), (Vb * rot).real.copy())
