"""Real-doubled amplitudes: the c-bit picture of complex wave functions.

A complex amplitude ``alpha + i beta`` becomes the pair ``(alpha, beta)`` on
the two c-bit states Re and Im, and multiplication by ``i`` becomes the real
rotation ``[[0, -1], [1, 0]]`` exchanging them. There is one c-bit for the
whole state, so a D-dimensional complex vector doubles to 2D real entries
ordered ``(Re_0, Im_0, Re_1, Im_1, ...)``.

For a single qubit the four ontological states are, in order,
``|Re,+>, |Im,+>, |Re,->, |Im,->``.

The c-bit is shared by all amplitudes and is only a conserved label for
states of zero total energy; nothing here checks that condition.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .core import GENERATORS, PAULI, switch_action

C_ROTATION = np.array([[0.0, -1.0], [1.0, 0.0]])
# complex conjugation: sign flip of every Im component
CONJUGATION = np.diag([1, -1, 1, -1])


def to_real_doubled(v) -> np.ndarray:
    """Complex vector of length D -> real array of shape (D, 2) holding (alpha, beta)."""
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-d amplitude vector, got shape {v.shape}")
    return np.stack([v.real, v.imag], axis=1)


def from_real_doubled(pairs) -> np.ndarray:
    pairs = np.asarray(pairs, dtype=float)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise ValueError(f"expected shape (D, 2), got {pairs.shape}")
    return pairs[:, 0] + 1j * pairs[:, 1]


def realify(m) -> np.ndarray:
    """Real 2D x 2D form of a complex D x D operator, c-bit as the fastest index."""
    m = np.asarray(m, dtype=complex)
    return np.kron(m.real, np.eye(2)) + np.kron(m.imag, C_ROTATION)


def conjugation(dim: int) -> np.ndarray:
    """Im-sign flip on a real-doubled space of complex dimension ``dim``."""
    return np.kron(np.eye(dim), np.diag([1.0, -1.0]))


def real_switch_generator(generator: str) -> np.ndarray:
    """4x4 real matrix of a fired switch ``-i sigma_a`` (``-i`` for ``unit``)."""
    return np.rint(realify(switch_action(generator, 1))).astype(int)


def pulse_identities_check(matrices=None, tol=1e-12):
    """Check ``exp(i pi s / 2) = i s`` and ``exp(i pi s) = -1`` for each matrix ``s``.

    Both hold exactly when every eigenvalue of ``s`` is +1 or -1. ``matrices``
    defaults to the three Pauli matrices. Returns one dict per matrix with the
    two errors (max-abs norm) and a ``passed`` flag.
    """
    if matrices is None:
        matrices = {name: PAULI[name] for name in ("sigma1", "sigma2", "sigma3")}
    report = []
    for name, s in matrices.items():
        s = np.asarray(s, dtype=complex)
        eye = np.eye(len(s))
        half = np.abs(expm(0.5j * np.pi * s) - 1j * s).max()
        full = np.abs(expm(1j * np.pi * s) + eye).max()
        report.append(
            {"generator": name, "half_pulse_error": half, "full_pulse_error": full,
             "passed": bool(half <= tol and full <= tol)}
        )
    return report


@dataclass(frozen=True, order=True)
class OntologicalOp:
    """A permutation of the four ontological states, optionally followed by conjugation.

    ``perm[c]`` is the image of state ``c``. Composition acts on the two
    labels independently, so the 24 permutations and the conjugation bit form
    a group of order 48.
    """

    perm: tuple[int, ...]
    conj: bool = False

    @property
    def matrix(self) -> np.ndarray:
        n = len(self.perm)
        p = np.zeros((n, n), dtype=int)
        p[list(self.perm), range(n)] = 1
        return CONJUGATION @ p if self.conj else p

    def compose(self, other: OntologicalOp) -> OntologicalOp:
        """``self`` after ``other``."""
        return OntologicalOp(tuple(self.perm[c] for c in other.perm), self.conj != other.conj)


IDENTITY_OP = OntologicalOp((0, 1, 2, 3))


def _op_generators():
    gens = []
    for a in range(3):
        perm = list(range(4))
        perm[a], perm[a + 1] = perm[a + 1], perm[a]
        gens.append(OntologicalOp(tuple(perm)))
    gens.append(OntologicalOp((0, 1, 2, 3), True))
    return gens


def enumerate_ontological_group() -> frozenset:
    """Breadth-first closure of adjacent transpositions and the conjugation bit."""
    gens = _op_generators()
    seen = {IDENTITY_OP}
    queue = deque([IDENTITY_OP])
    while queue:
        g = queue.popleft()
        for h in gens:
            k = h.compose(g)
            if k not in seen:
                seen.add(k)
                queue.append(k)
    return frozenset(seen)


def signed_closure() -> set:
    """Closure of all 4x4 permutation matrices and conjugation under matrix products.

    Conjugating the Im-sign flip by permutations yields every even sign
    pattern, so this closure is larger than the 48 labelled operations. Returned
    as a set of integer-matrix byte keys; see :func:`matrix_key`.
    """
    gens = [OntologicalOp(p).matrix for p in itertools.permutations(range(4))]
    gens.append(CONJUGATION)
    eye = np.eye(4, dtype=int)
    seen = {matrix_key(eye)}
    queue = deque([eye])
    while queue:
        g = queue.popleft()
        for h in gens:
            k = h @ g
            key = matrix_key(k)
            if key not in seen:
                seen.add(key)
                queue.append(k)
    return seen


def matrix_key(m) -> bytes:
    return np.asarray(m, dtype=np.int8).tobytes()


def ontological_content(m) -> OntologicalOp:
    """Strip the physically irrelevant signs from a signed permutation matrix.

    The result keeps the permutation of ontological states and sets the
    conjugation bit when Re and Im carry opposite signs within each spinor
    component. Sign patterns that treat the two spinor components differently
    in this respect are outside the signed closure and rejected.
    """
    m = np.rint(np.asarray(m, dtype=float)).astype(int)
    if m.shape != (4, 4) or not np.array_equal(np.abs(m).sum(axis=0), np.ones(4)) \
            or not np.array_equal(np.abs(m).sum(axis=1), np.ones(4)):
        raise ValueError("not a 4x4 signed permutation matrix")
    perm = tuple(int(np.flatnonzero(m[:, c])[0]) for c in range(4))
    signs = np.array([m[perm[c], c] for c in range(4)])
    row_sign = np.empty(4, dtype=int)
    row_sign[list(perm)] = signs
    up, down = row_sign[0] * row_sign[1], row_sign[2] * row_sign[3]
    if up != down:
        raise ValueError(f"sign pattern {row_sign.tolist()} is not an even pattern")
    return OntologicalOp(perm, bool(up == -1))


def switch_generators_real() -> dict:
    return {g: real_switch_generator(g) for g in GENERATORS}
