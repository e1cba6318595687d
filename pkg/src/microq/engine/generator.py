"""Dense CTMC generators: enumeration from networks, stationary laws.

A Generator holds the full rate matrix over an explicitly enumerated state
space. Dense linear algebra is the point here; anything too big for that
belongs in the stochastic simulator instead.
"""

from __future__ import annotations

import itertools

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from ..errors import (ModelDefinitionError, ReducibleChainError,
                      StateSpaceTooLargeError)

ENUMERATION_CAP = 200_000


class Generator:
    """Square rate matrix Q with labeled states.

    Off-diagonals are non-negative; each diagonal equals minus its row's
    off-diagonal sum (checked to 1e-12). states is an (n, k) int array of
    core-state labels, names the matching component names (both optional
    for abstract chains).
    """

    def __init__(self, q, states=None, names=None):
        q = np.asarray(q, dtype=float)
        if q.ndim != 2 or q.shape[0] != q.shape[1]:
            raise ModelDefinitionError("generator must be square")
        off = q.copy()
        np.fill_diagonal(off, 0.0)
        if np.any(off < 0):
            raise ModelDefinitionError("generator off-diagonals must be >= 0")
        rowsum = q.sum(axis=1)
        if np.max(np.abs(rowsum)) > 1e-12 * max(1.0, np.max(np.abs(q))):
            raise ModelDefinitionError("generator rows must sum to zero")
        self.q = q
        self.states = None if states is None else np.asarray(states, dtype=np.int64)
        self.names = None if names is None else tuple(names)

    @property
    def n_states(self):
        return self.q.shape[0]

    def state_index(self, state) -> int:
        if self.states is None:
            raise ValueError("generator has no state labels")
        hits = np.nonzero((self.states == np.asarray(state, dtype=np.int64)).all(axis=1))[0]
        if hits.size != 1:
            raise KeyError(f"state {tuple(state)} not in enumeration")
        return int(hits[0])

    def component_values(self, name) -> np.ndarray:
        return self.states[:, self.names.index(name)]


def network_to_generator(network, t: float = 0.0, bounds=None,
                         cap: int = ENUMERATION_CAP) -> Generator:
    """Enumerate a network's bounded core state box into a dense Generator.

    Counters are frozen at zero and dropped from the enumeration (rates must
    not read them; channels that only move counters project to no-ops and
    are skipped). Propensities are evaluated at time t, so for staircase
    networks this is the generator of one constant segment. bounds may
    override a component's enumerated maximum, e.g. to pin a structurally
    empty pool and keep the box irreducible. A channel with positive
    propensity whose delta leaves the box is a model-definition error.
    """
    schema = network.schema
    bounds = bounds or {}
    core = schema.core_indices()
    dims = []
    for i in core:
        comp = schema.components[i]
        m = bounds.get(comp.name, comp.capacity)
        if m is None:
            raise ModelDefinitionError(
                f"component {comp.name} is unbounded; give it a capacity or a bound")
        dims.append(int(m) + 1)
    n = int(np.prod(dims))
    if n > cap:
        raise StateSpaceTooLargeError(
            f"{n} states exceeds the enumeration cap {cap}")

    core_names = [schema.names[i] for i in core]
    # Projected deltas: (core positions, changes); None for counter-only moves.
    moves = []
    for ch, pairs in network._compiled:
        if pairs is None:
            raise ModelDefinitionError(
                f"channel {ch.name}: stochastic effects cannot be enumerated")
        proj = [(core.index(idx), dv) for idx, dv in pairs if idx in core]
        moves.append((ch, proj))

    full = [0] * len(schema)
    q = np.zeros((n, n))
    states = np.empty((n, len(core)), dtype=np.int64)
    for row, combo in enumerate(itertools.product(*(range(d) for d in dims))):
        states[row] = combo
        for pos, i in enumerate(core):
            full[i] = combo[pos]
        for ch, proj in moves:
            p = ch.propensity(full, t)
            if not (p >= 0.0) or p == float("inf"):
                raise ModelDefinitionError(
                    f"channel {ch.name}: propensity {p!r} at state {tuple(full)}")
            if p == 0.0 or not proj:
                continue
            col = 0
            ok = True
            for pos, d in enumerate(dims):
                v = combo[pos]
                for ppos, dv in proj:
                    if ppos == pos:
                        v += dv
                if v < 0 or v >= d:
                    ok = False
                    break
                col = col * d + v
            if not ok:
                raise ModelDefinitionError(
                    f"channel {ch.name} has rate {p} at {tuple(combo)} but its "
                    f"effect leaves the state box")
            q[row, col] += p
    np.fill_diagonal(q, q.diagonal() - q.sum(axis=1))
    return Generator(q, states=states, names=core_names)


def stationary_distribution(gen: Generator, residual_tol: float = 1e-10) -> np.ndarray:
    """Unique stationary law of an irreducible generator by direct solve.

    Solves pi Q = 0 with sum(pi) = 1 (one balance equation replaced by the
    normalization row) and verifies the residual ||pi Q||_inf <= tol.
    Reducible chains raise, naming the strongly connected blocks.
    """
    q = gen.q
    n = q.shape[0]
    if n == 1:
        return np.ones(1)
    adj = csr_matrix((np.abs(q) > 0).astype(np.int8))
    n_comp, labels = connected_components(adj, directed=True, connection="strong")
    if n_comp > 1:
        blocks = []
        for c in range(n_comp):
            idx = np.nonzero(labels == c)[0]
            if gen.states is not None:
                desc = [tuple(gen.states[i]) for i in idx[:4]]
            else:
                desc = list(idx[:4])
            blocks.append((len(idx), desc))
        msg = "; ".join(f"block of {sz} states, e.g. {ex}" for sz, ex in blocks[:3])
        raise ReducibleChainError(
            f"chain is reducible ({n_comp} strongly connected blocks): {msg}",
            blocks=blocks)
    m = q.T.copy()
    m[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        pi = np.linalg.solve(m, b)
    except np.linalg.LinAlgError as exc:
        raise ReducibleChainError(f"stationary solve failed: {exc}") from exc
    pi = np.clip(pi, 0.0, None)
    pi /= pi.sum()
    residual = float(np.linalg.norm(pi @ q))
    if residual > residual_tol:
        raise ReducibleChainError(
            f"stationary residual {residual:.3e} exceeds {residual_tol:.0e}")
    return pi
