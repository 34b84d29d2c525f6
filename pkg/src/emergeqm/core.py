"""Ontological state space and the exact one-step classical evolution law.

Fast variables live on a discrete torus and advance one site per step. Slow
states hop between one another whenever the two fast variables attached to a
switch term sit on that term's firing location. Each step is a signed
permutation of the basis ``(fast configuration, slow index)``; the amplitude
picked up by a basis state is always a fourth root of unity.

Slow indices, switch pairs and fast-variable indices are 1-based, as in model
files. Fast positions are 0-based (``0 <= x_k < L_k``).
"""

from __future__ import annotations

import itertools
import math
import os
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .errors import (
    CapacityError,
    CoprimeError,
    DuplicateLocationError,
    ModelError,
    RangeError,
    SimultaneousFiringWarning,
)

GENERATORS = ("sigma1", "sigma2", "sigma3", "unit")

PAULI = {
    "sigma1": np.array([[0, 1], [1, 0]], dtype=complex),
    "sigma2": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "sigma3": np.array([[1, 0], [0, -1]], dtype=complex),
    "unit": np.eye(2, dtype=complex),
}

# phase exponent k stands for 1j**k
PHASES = (1, 1j, -1, -1j)

DEFAULT_DENSE_BUDGET = 4096


def dense_budget() -> int:
    """Largest model dimension for which dense matrices are built."""
    return int(os.environ.get("EMERGEQM_DENSE_BUDGET", DEFAULT_DENSE_BUDGET))


def phase_exponent(value) -> int:
    for k, p in enumerate(PHASES):
        if value == p:
            return k
    raise ValueError(f"{value!r} is not a fourth root of unity")


@dataclass(frozen=True)
class TorusLattice:
    periods: tuple[int, ...]
    strict_coprime: bool = True

    def __post_init__(self):
        periods = tuple(int(p) for p in self.periods)
        object.__setattr__(self, "periods", periods)
        if not periods:
            raise RangeError("lattice needs at least one period", field="periods")
        for p in periods:
            if p < 1:
                raise RangeError(f"period {p} is not positive", field="periods")
        if self.strict_coprime:
            for (a, la), (b, lb) in itertools.combinations(enumerate(periods, 1), 2):
                if math.gcd(la, lb) != 1:
                    raise CoprimeError(
                        f"periods L_{a}={la} and L_{b}={lb} share the factor "
                        f"{math.gcd(la, lb)} (disable strict_coprime to allow this)",
                        field="periods",
                    )

    @property
    def n_fast(self) -> int:
        return len(self.periods)

    @property
    def size(self) -> int:
        return math.prod(self.periods)

    def flat_index(self, positions) -> int:
        return int(np.ravel_multi_index(tuple(positions), self.periods))

    def config(self, flat: int) -> FastConfig:
        return FastConfig(tuple(int(v) for v in np.unravel_index(flat, self.periods)))

    def all_positions(self) -> np.ndarray:
        """Every configuration as rows of an ``(size, n_fast)`` array, row-major."""
        grids = np.indices(self.periods).reshape(self.n_fast, -1)
        return np.ascontiguousarray(grids.T, dtype=np.int64)


@dataclass(frozen=True)
class FastConfig:
    positions: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "positions", tuple(int(v) for v in self.positions))

    def check(self, lattice: TorusLattice) -> None:
        if len(self.positions) != lattice.n_fast:
            raise RangeError(
                f"configuration has {len(self.positions)} coordinates, "
                f"lattice has {lattice.n_fast}"
            )
        for k, (x, L) in enumerate(zip(self.positions, lattice.periods), 1):
            if not 0 <= x < L:
                raise RangeError(f"x_{k}={x} outside 0..{L - 1}")


@dataclass(frozen=True)
class SwitchTerm:
    """One switch interaction on the slow pair ``(i, j)``.

    ``location`` gives the firing positions of the two fast variables listed
    in ``fast``; by default these are the fast variables with the same
    indices as the slow pair.
    """

    pair: tuple[int, int]
    generator: str
    location: tuple[int, int]
    sign: int = 1
    fast: tuple[int, int] | None = None

    def __post_init__(self):
        pair = tuple(int(v) for v in self.pair)
        location = tuple(int(v) for v in self.location)
        fast = pair if self.fast is None else tuple(int(v) for v in self.fast)
        object.__setattr__(self, "pair", pair)
        object.__setattr__(self, "location", location)
        object.__setattr__(self, "fast", fast)
        object.__setattr__(self, "sign", int(self.sign))
        if len(pair) != 2 or not 1 <= pair[0] < pair[1]:
            raise RangeError(f"pair {pair} must satisfy 1 <= i < j", field="pair")
        if len(location) != 2:
            raise RangeError("location needs two coordinates", field="location")
        if len(fast) != 2 or fast[0] == fast[1] or min(fast) < 1:
            raise RangeError(f"fast {fast} must name two distinct fast variables", field="fast")
        if self.generator not in GENERATORS:
            raise ModelError(
                f"unknown generator {self.generator!r}; expected one of {', '.join(GENERATORS)}",
                field="generator",
            )
        if self.sign not in (1, -1):
            raise RangeError(f"sign must be +1 or -1, got {self.sign}", field="sign")


@dataclass(frozen=True)
class ModelSpec:
    n_slow: int
    lattice: TorusLattice
    switches: tuple[SwitchTerm, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "switches", tuple(self.switches))
        if self.n_slow < 1:
            raise RangeError("n_slow must be positive", field="n_slow")
        seen = {}
        for k, term in enumerate(self.switches, 1):
            if term.pair[1] > self.n_slow:
                raise RangeError(
                    f"switch {k}: pair {term.pair} exceeds n_slow={self.n_slow}", field="pair"
                )
            if max(term.fast) > self.lattice.n_fast:
                raise RangeError(
                    f"switch {k}: fast variables {term.fast} exceed the "
                    f"{self.lattice.n_fast} fast variables of the lattice "
                    "(set 'fast' explicitly when n_slow differs from the lattice size)",
                    field="fast",
                )
            for f, x in zip(term.fast, term.location):
                L = self.lattice.periods[f - 1]
                if not 0 <= x < L:
                    raise RangeError(
                        f"switch {k}: location {x} outside 0..{L - 1} of fast variable {f}",
                        field="location",
                    )
            key = (term.pair, term.location)
            if key in seen:
                raise DuplicateLocationError(
                    f"switches {seen[key]} and {k} share pair {term.pair} and location "
                    f"{term.location}; every term needs its own firing point",
                    field="location",
                )
            seen[key] = k

    @property
    def fast_size(self) -> int:
        return self.lattice.size

    @property
    def dim(self) -> int:
        return self.n_slow * self.lattice.size

    def basis_index(self, state: OntBasisState) -> int:
        return (state.slow - 1) * self.fast_size + self.lattice.flat_index(state.fast.positions)

    def basis_state(self, index: int, phase=1) -> OntBasisState:
        slow0, flat = divmod(int(index), self.fast_size)
        return OntBasisState(self.lattice.config(flat), slow0 + 1, phase)

    def coupling(self, term: SwitchTerm) -> float:
        """Averaged strength ``(pi/2) / (L_a L_b)`` of one switch term."""
        a, b = term.fast
        return 0.5 * math.pi / (self.lattice.periods[a - 1] * self.lattice.periods[b - 1])


@dataclass(frozen=True)
class OntBasisState:
    fast: FastConfig
    slow: int
    phase: complex = 1

    def __post_init__(self):
        if not isinstance(self.fast, FastConfig):
            object.__setattr__(self, "fast", FastConfig(tuple(self.fast)))
        object.__setattr__(self, "phase", PHASES[phase_exponent(self.phase)])

    def check(self, model: ModelSpec) -> None:
        self.fast.check(model.lattice)
        if not 1 <= self.slow <= model.n_slow:
            raise RangeError(f"slow index {self.slow} outside 1..{model.n_slow}")

    def vector(self, model: ModelSpec) -> np.ndarray:
        v = np.zeros(model.dim, dtype=complex)
        v[model.basis_index(self)] = self.phase
        return v


def shift_step(config: FastConfig, lattice: TorusLattice) -> FastConfig:
    config.check(lattice)
    return FastConfig(tuple((x + 1) % L for x, L in zip(config.positions, lattice.periods)))


def coincidence_fires(term: SwitchTerm, config: FastConfig) -> bool:
    a, b = term.fast
    return config.positions[a - 1] == term.location[0] and config.positions[b - 1] == term.location[1]


def switch_action(generator: str, sign: int = 1) -> np.ndarray:
    """The 2x2 matrix ``sign * (-i) * G`` a firing switch applies to its slow pair."""
    if generator not in GENERATORS:
        raise ModelError(f"unknown generator {generator!r}")
    return sign * -1j * PAULI[generator]


def _transitions():
    # (generator, sign, side) -> (target side, phase exponent)
    table = {}
    for gen in GENERATORS:
        for sign in (1, -1):
            m = switch_action(gen, sign)
            for side in (0, 1):
                col = m[:, side]
                target = int(np.flatnonzero(col)[0])
                table[gen, sign, side] = (target, phase_exponent(complex(col[target])))
    return table


_TRANSITIONS = _transitions()


def classical_step(state: OntBasisState, model: ModelSpec, fired: list | None = None) -> OntBasisState:
    """One deterministic step: fire matching switches in list order, then shift.

    If ``fired`` is a list, ``(term, slow_before, slow_after)`` is appended for
    every term that acts (1-based term index).
    """
    state.check(model)
    slow = state.slow
    k = phase_exponent(state.phase)
    applied = []
    for n, term in enumerate(model.switches):
        if slow not in term.pair or not coincidence_fires(term, state.fast):
            continue
        side = term.pair.index(slow)
        target, dk = _TRANSITIONS[term.generator, term.sign, side]
        if fired is not None:
            fired.append((n + 1, slow, term.pair[target]))
        slow = term.pair[target]
        k = (k + dk) % 4
        applied.append(n)
    if len(applied) > 1:
        warnings.warn(
            f"switch terms {[n + 1 for n in applied]} acted in one step; "
            "the result depends on their declared order",
            SimultaneousFiringWarning,
            stacklevel=2,
        )
    return OntBasisState(shift_step(state.fast, model.lattice), slow, PHASES[k])


def inverse_step(state: OntBasisState, model: ModelSpec) -> OntBasisState:
    """Undo :func:`classical_step`: shift back, then unwind the switches in reverse order."""
    state.check(model)
    fast = FastConfig(tuple((x - 1) % L for x, L in zip(state.fast.positions, model.lattice.periods)))
    slow = state.slow
    k = phase_exponent(state.phase)
    for term in reversed(model.switches):
        if slow not in term.pair or not coincidence_fires(term, fast):
            continue
        # find the source side that maps onto the current side
        for side in (0, 1):
            target, dk = _TRANSITIONS[term.generator, term.sign, side]
            if term.pair[target] == slow:
                slow = term.pair[side]
                k = (k - dk) % 4
                break
    return OntBasisState(fast, slow, PHASES[k])


def advance(model: ModelSpec, x: np.ndarray, slow: np.ndarray, phase: np.ndarray, log=None):
    """Vectorized :func:`classical_step` over many trajectories at once.

    ``x`` has shape ``(n, n_fast)``; ``slow`` holds 0-based slow indices and
    ``phase`` exponents mod 4. Inputs are not modified. If ``log`` is a list,
    one ``(term_index, rows, slow_before, slow_after)`` tuple is appended per
    term that acted on at least one trajectory.
    """
    slow = slow.copy()
    phase = phase.copy()
    count = None
    for n, term in enumerate(model.switches):
        a, b = term.fast[0] - 1, term.fast[1] - 1
        hit = (x[:, a] == term.location[0]) & (x[:, b] == term.location[1])
        if not hit.any():
            continue
        i, j = term.pair[0] - 1, term.pair[1] - 1
        on_i = hit & (slow == i)
        on_j = hit & (slow == j)
        rows = np.flatnonzero(on_i | on_j)
        if rows.size == 0:
            continue
        before = slow[rows].copy()
        for side, mask in ((0, on_i), (1, on_j)):
            target, dk = _TRANSITIONS[term.generator, term.sign, side]
            slow[mask] = (i, j)[target]
            phase[mask] = (phase[mask] + dk) % 4
        if count is None:
            count = np.zeros(len(slow), dtype=np.int64)
        count[rows] += 1
        if log is not None:
            log.append((n, rows, before, slow[rows].copy()))
    if count is not None and count.max() > 1:
        warnings.warn(
            f"{int((count > 1).sum())} trajectories saw several switches act in one step; "
            "the result depends on their declared order",
            SimultaneousFiringWarning,
            stacklevel=2,
        )
    periods = np.asarray(model.lattice.periods, dtype=np.int64)
    return (x + 1) % periods, slow, phase


@dataclass(frozen=True)
class SignedPermutation:
    """Column ``c`` of the operator has the single entry ``1j**phase[c]`` in row ``target[c]``."""

    target: np.ndarray
    phase: np.ndarray
    values: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", np.array(PHASES, dtype=complex)[self.phase % 4])

    @property
    def dim(self) -> int:
        return len(self.target)

    def apply(self, v: np.ndarray, times: int = 1) -> np.ndarray:
        """Apply the operator ``times`` times to a vector or to the columns of a matrix."""
        out = np.asarray(v, dtype=complex)
        scale = self.values if out.ndim == 1 else self.values[:, None]
        for _ in range(times):
            nxt = np.empty_like(out)
            nxt[self.target] = scale * out
            out = nxt
        return out

    def inverse(self) -> SignedPermutation:
        target = np.empty_like(self.target)
        target[self.target] = np.arange(self.dim)
        phase = np.empty_like(self.phase)
        phase[self.target] = (-self.phase) % 4
        return SignedPermutation(target, phase)

    def to_dense(self) -> np.ndarray:
        u = np.zeros((self.dim, self.dim), dtype=complex)
        u[self.target, np.arange(self.dim)] = self.values
        return u

    def to_sparse(self) -> sp.csr_matrix:
        cols = np.arange(self.dim)
        return sp.csr_matrix((self.values, (self.target, cols)), shape=(self.dim, self.dim))


def step_permutation(model: ModelSpec) -> SignedPermutation:
    """The one-step evolution operator in signed-permutation form, for any model size."""
    F = model.fast_size
    x = np.tile(model.lattice.all_positions(), (model.n_slow, 1))
    slow = np.repeat(np.arange(model.n_slow, dtype=np.int64), F)
    phase = np.zeros(model.dim, dtype=np.int64)
    with warnings.catch_warnings():
        # every possible simultaneous firing shows up when all basis states are stepped
        warnings.simplefilter("ignore", SimultaneousFiringWarning)
        x1, slow1, phase1 = advance(model, x, slow, phase)
    flat = np.ravel_multi_index(tuple(x1.T), model.lattice.periods)
    return SignedPermutation(slow1 * F + flat, phase1)


def build_step_unitary(model: ModelSpec, budget: int | None = None) -> np.ndarray:
    """Dense ``D x D`` one-step unitary.

    Raises
    ------
    CapacityError
        If the model dimension exceeds ``budget`` (default :func:`dense_budget`).
    """
    budget = dense_budget() if budget is None else budget
    if model.dim > budget:
        raise CapacityError(
            f"model dimension {model.dim} exceeds the dense budget {budget}; "
            "use step_permutation / the trajectory path instead"
        )
    return step_permutation(model).to_dense()


def recurrence_times(model: ModelSpec):
    """Return ``(lcm of all periods, {(a, b): lcm(L_a, L_b)})`` over fast-variable pairs."""
    periods = model.lattice.periods
    pairs = {
        (a, b): math.lcm(periods[a - 1], periods[b - 1])
        for a, b in itertools.combinations(range(1, len(periods) + 1), 2)
    }
    return math.lcm(*periods), pairs
