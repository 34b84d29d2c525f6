"""Compile a Hermitian target into switch terms whose averaged Hamiltonian matches it.

Every coupling a switch program can realize on the pair ``(i, j)`` is an
integer multiple of the grid step ``pi / (2 L_i L_j)``. Off-diagonal entries
are rounded independently (ties to even): ``sigma1`` terms carry the real part
and ``sigma2`` terms minus the imaginary part.

Diagonal entries need more care. Each ``sigma3`` or ``unit`` term moves two
diagonal entries by one grid step each, so with a single grid step the
reachable diagonals form a checkerboard lattice and some targets sit a full
step away from it. The chain ``(1,2), (2,3), ..., (N-1,N)`` fixes entries
``1..N-1`` to within half a step of their pair's grid; each link hands the
next entry a remainder chosen to sit on the next grid when possible, so
targets built from chain terms come back exactly. For ``N >= 3`` a number
of ``unit`` terms on the closing pair ``(1, N)`` is searched so that the last
entry lands within half a step as well.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import GENERATORS, ModelSpec, SwitchTerm, TorusLattice
from .errors import CapacityError, InfeasibleDiagonalError, ModelError


@dataclass(frozen=True)
class SwitchProgram:
    # (i, j, generator) -> signed multiplicity R, 1-based pairs, zero entries omitted
    multiplicities: dict
    model: ModelSpec
    realized: np.ndarray


def grid_step(lattice: TorusLattice, i: int, j: int) -> float:
    """Coupling quantum ``pi / (2 L_i L_j)`` of the 1-based pair ``(i, j)``."""
    return 0.5 * math.pi / (lattice.periods[i - 1] * lattice.periods[j - 1])


def _as_target(target, tol=1e-12):
    h = np.asarray(target, dtype=complex)
    if h.ndim != 2 or h.shape[0] != h.shape[1]:
        raise ValueError(f"target must be square, got shape {h.shape}")
    err = np.abs(h - h.conj().T).max() if h.size else 0.0
    if err > tol:
        raise ValueError(f"target is not Hermitian (max |H - H^dagger| = {err:.3g})")
    return h


def _inner_w(v, rem_next, g, g_next, span):
    """Contribution ``w`` (same parity as ``v``) of an inner link to the next entry.

    The next link can only absorb multiples of ``g_next``, so ``w`` is chosen
    to leave the next entry as close to that grid as possible; this recovers
    on-grid targets exactly. How close depends on ``w`` only modulo ``span``
    (twice the period shared by the two steps), and members of one class
    differ by even shifts of the next link, so the smallest ``|w|`` is kept.
    """
    best = None
    for w in range(v % 2 - span, span + 1, 2):
        x = (rem_next - w * g) / g_next
        # class members agree up to rounding noise, so compare at 1e-9 resolution
        dist = round(float(abs(x - np.rint(x))), 9)
        key = (dist, abs(w), w < 0)
        if best is None or key < best[0]:
            best = (key, w)
    return best[1]


def _chain(d, steps, spans, q, g_close):
    """Round the diagonal along the chain given ``q`` closing unit terms.

    Returns (per-pair (unit, sigma3) counts, residual of realized - target).
    """
    n = len(d)
    rem = d.astype(float).copy()
    if q:
        rem[0] -= q * g_close
        rem[n - 1] -= q * g_close
    counts = []
    for k in range(n - 1):
        g = steps[k]
        v = int(np.rint(rem[k] / g))
        # w must share the parity of v: unit and sigma3 counts are (v +- w) / 2.
        # The last link has no successor and rounds to the nearest.
        if k < n - 2:
            w = _inner_w(v, rem[k + 1], g, steps[k + 1], spans[k])
        else:
            w = v + 2 * int(np.rint((rem[k + 1] / g - v) / 2))
        counts.append(((v + w) // 2, (v - w) // 2))
        rem[k] -= v * g
        rem[k + 1] -= w * g
    return counts, -rem


def _diagonal_bounds(steps):
    half = [g / 2 for g in steps]
    return np.array(half + [half[-1]])


def _solve_diagonal(d, lattice):
    """Return ``(chain counts, closing unit count q, within half-step bound)``."""
    n = len(d)
    steps = [grid_step(lattice, k, k + 1) for k in range(1, n)]
    # g_k / g_{k+1} = L_{k+2} / L_k, so the next-grid offset repeats in w with period L_k
    spans = [2 * L for L in lattice.periods]
    bounds = _diagonal_bounds(steps)
    if n < 3:
        counts, res = _chain(d, steps, spans, 0, 0.0)
        return counts, 0, bool((np.abs(res) <= bounds + 1e-12).all())
    g_close = grid_step(lattice, 1, n)
    reach = 2 * lattice.periods[0]
    order = [0] + [s * q for q in range(1, reach + 1) for s in (1, -1)]
    # exact hits win (keeps on-grid targets idempotent), then the earliest q
    # meeting the half-step bound, then the smallest bound ratio
    first_ok = best = None
    for q in order:
        counts, res = _chain(d, steps, spans, q, g_close)
        if np.abs(res).max() <= 1e-12:
            return counts, q, True
        score = float((np.abs(res) / bounds).max())
        if first_ok is None and score <= 1 + 1e-9:
            first_ok = (counts, q)
        if best is None or score < best[0] - 1e-12:
            best = (score, counts, q)
    if first_ok is not None:
        return (*first_ok, True)
    return (*best[1:], False)


def _locations_for(lattice, i, j):
    Li, Lj = lattice.periods[i - 1], lattice.periods[j - 1]
    for xi in range(Li):
        for xj in range(Lj):
            yield (xi, xj)


def synthesize(target, lattice: TorusLattice, locations=None, strict=True) -> SwitchProgram:
    """Build a switch program realizing ``target`` up to the coupling grid.

    ``locations`` may map a 1-based pair ``(i, j)`` to an explicit list of
    firing locations used in place of the row-major enumeration. With
    ``strict=False`` a diagonal that cannot be brought within half a grid
    step is realized as closely as the search allows instead of raising.

    Raises
    ------
    CapacityError
        If a pair needs more terms than it has distinct locations.
    InfeasibleDiagonalError
        If ``strict`` and some diagonal entry stays more than half a step off.
    """
    h = _as_target(target)
    n = len(h)
    if n != lattice.n_fast:
        raise ModelError(f"target has N={n} but the lattice has {lattice.n_fast} fast variables")
    mult = {}

    def add(i, j, gen, r):
        if r:
            mult[i, j, gen] = mult.get((i, j, gen), 0) + int(r)

    for i in range(1, n + 1):
        for j in range(i + 1, n + 1):
            g = grid_step(lattice, i, j)
            add(i, j, "sigma1", np.rint(h[i - 1, j - 1].real / g))
            add(i, j, "sigma2", np.rint(-h[i - 1, j - 1].imag / g))
    if n >= 2:
        counts, q, feasible = _solve_diagonal(h.diagonal().real, lattice)
        for k, (units, s3) in enumerate(counts, 1):
            add(k, k + 1, "unit", units)
            add(k, k + 1, "sigma3", s3)
        if q:
            add(1, n, "unit", q)
    elif abs(h[0, 0]) > 0:
        raise ModelError(
            f"a single slow state has no pair to carry the diagonal entry {h[0, 0].real:.6g}"
        )
    mult = {k: v for k, v in mult.items() if v}
    if n >= 2 and strict and not feasible:
        res = realized_matrix(mult, lattice, n).diagonal().real - h.diagonal().real
        raise InfeasibleDiagonalError(
            f"diagonal residual {np.abs(res).max():.6g} exceeds half a grid step "
            f"(residuals {np.array2string(res, precision=6)}); a two-state diagonal "
            "is reachable only on a checkerboard lattice",
            res,
        )
    model = ModelSpec(n, lattice, tuple(_place(mult, lattice, locations)))
    return SwitchProgram(mult, model, realized_matrix(mult, lattice, n))


def _place(mult, lattice, overrides):
    order = {g: k for k, g in enumerate(GENERATORS)}
    pairs = sorted({(i, j) for i, j, _ in mult})
    for i, j in pairs:
        needed = sum(abs(r) for (a, b, _), r in mult.items() if (a, b) == (i, j))
        if overrides is not None and (i, j) in overrides:
            slots = [tuple(loc) for loc in overrides[i, j]]
            if len(set(slots)) != len(slots):
                raise ModelError(f"override locations for pair {(i, j)} repeat a point")
        else:
            slots = list(_locations_for(lattice, i, j))
        if needed > len(slots):
            raise CapacityError(
                f"pair {(i, j)} needs {needed} distinct locations but only {len(slots)} are available"
            )
        it = iter(slots)
        gens = sorted((g for a, b, g in mult if (a, b) == (i, j)), key=order.__getitem__)
        for g in gens:
            r = mult[i, j, g]
            for _ in range(abs(r)):
                yield SwitchTerm((i, j), g, next(it), 1 if r > 0 else -1)


def realized_matrix(mult, lattice: TorusLattice, n: int) -> np.ndarray:
    """Hamiltonian of a multiplicity table, from the grid formula alone."""
    h = np.zeros((n, n), dtype=complex)
    for (i, j, gen), r in mult.items():
        c = r * grid_step(lattice, i, j)
        a, b = i - 1, j - 1
        if gen == "sigma1":
            h[a, b] += c
            h[b, a] += c
        elif gen == "sigma2":
            h[a, b] += -1j * c
            h[b, a] += 1j * c
        elif gen == "sigma3":
            h[a, a] += c
            h[b, b] -= c
        else:
            h[a, a] += c
            h[b, b] += c
    return h


@dataclass(frozen=True)
class QuantizationReport:
    residual: np.ndarray  # realized - target
    bounds: np.ndarray  # per-entry half-step bound applying to both real and imaginary parts
    max_component_residual: float
    max_ratio: float  # largest component residual divided by its bound

    @property
    def within_bounds(self) -> bool:
        return bool(np.all(np.abs(self.residual.real) <= self.bounds + 1e-12)
                    and np.all(np.abs(self.residual.imag) <= self.bounds + 1e-12))


def component_bounds(lattice: TorusLattice, n: int) -> np.ndarray:
    """Half-step bounds: ``pi / (4 L_i L_j)`` off the diagonal, the finalizing chain pair on it."""
    b = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            if i != j:
                b[i, j] = grid_step(lattice, min(i, j) + 1, max(i, j) + 1) / 2
    if n >= 2:
        steps = [grid_step(lattice, k, k + 1) for k in range(1, n)]
        b[np.diag_indices(n)] = _diagonal_bounds(steps)
    return b


def quantization_error(target, program: SwitchProgram) -> QuantizationReport:
    h = _as_target(target)
    if h.shape != program.realized.shape:
        raise ValueError("target and program dimensions differ")
    res = program.realized - h
    bounds = component_bounds(program.model.lattice, len(h))
    comp = np.maximum(np.abs(res.real), np.abs(res.imag))
    safe = np.where(bounds > 0, bounds, np.inf)
    return QuantizationReport(res, bounds, float(comp.max()), float((comp / safe).max()))
