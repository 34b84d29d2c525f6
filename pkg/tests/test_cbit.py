import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.linalg import expm

from emergeqm.cbit import (
    CONJUGATION,
    IDENTITY_OP,
    OntologicalOp,
    conjugation,
    enumerate_ontological_group,
    from_real_doubled,
    matrix_key,
    ontological_content,
    pulse_identities_check,
    real_switch_generator,
    realify,
    signed_closure,
    switch_generators_real,
    to_real_doubled,
)
from emergeqm.core import PAULI

J_C = np.array([[0, 1], [-1, 0]])  # c-bit factor shown next to the Pauli switches
I2 = np.eye(2, dtype=int)
S1 = np.array([[0, 1], [1, 0]])
S3 = np.array([[1, 0], [0, -1]])

complex_vectors = st.lists(
    st.complex_numbers(max_magnitude=1e3, allow_nan=False, allow_infinity=False),
    min_size=1, max_size=6,
).map(np.array)


def complex_matrices(n):
    return st.lists(
        st.complex_numbers(max_magnitude=10, allow_nan=False, allow_infinity=False),
        min_size=n * n, max_size=n * n,
    ).map(lambda v: np.array(v).reshape(n, n))


@given(complex_vectors)
def test_real_doubling_round_trip(v):
    np.testing.assert_array_equal(from_real_doubled(to_real_doubled(v)), v)


@given(complex_matrices(3), complex_vectors.filter(lambda v: len(v) == 3))
def test_realify_is_faithful_on_vectors(m, v):
    lhs = realify(m) @ to_real_doubled(v).ravel()
    np.testing.assert_allclose(lhs, to_real_doubled(m @ v).ravel(), rtol=1e-12, atol=1e-9)


@given(complex_matrices(2), complex_matrices(2))
def test_realify_is_a_homomorphism(a, b):
    np.testing.assert_allclose(realify(a @ b), realify(a) @ realify(b), rtol=1e-12, atol=1e-9)


@given(complex_matrices(2))
def test_conjugation_conjugates(m):
    k = conjugation(2)
    np.testing.assert_allclose(k @ realify(m) @ k, realify(m.conj()), atol=1e-12)


def test_i_is_the_c_bit_rotation():
    # multiplication by i exchanges Re and Im: [[0, -1], [1, 0]] on the c-bit
    np.testing.assert_array_equal(realify(1j * np.eye(2)), np.kron(I2, [[0, -1], [1, 0]]))


@pytest.mark.parametrize("gen, expected", [
    ("sigma1", np.kron(S1, J_C)),
    ("sigma3", np.kron(S3, J_C)),
    # -i sigma2 is real, so it leaves the c-bit alone and rotates the spinor
    ("sigma2", np.kron([[0, -1], [1, 0]], I2)),
    ("unit", np.kron(I2, -J_C.T)),
])
def test_real_switch_matrices(gen, expected):
    np.testing.assert_array_equal(real_switch_generator(gen), expected)


@pytest.mark.parametrize("gen", ["sigma1", "sigma2", "sigma3", "unit"])
def test_switches_are_antisymmetric(gen):
    r = real_switch_generator(gen)
    np.testing.assert_array_equal(r.T, -r)
    np.testing.assert_array_equal(r @ r, -np.eye(4))


@pytest.mark.parametrize("gen, image_of_re_up", [
    ("sigma1", 3),  # spinor and c-bit both flip
    ("sigma2", 2),  # spinor only
    ("sigma3", 1),  # c-bit only
    ("unit", 1),
])
def test_which_labels_each_switch_changes(gen, image_of_re_up):
    assert ontological_content(real_switch_generator(gen)).perm[0] == image_of_re_up


@pytest.mark.parametrize("a, b, c", [
    ("sigma1", "sigma2", "sigma3"),
    ("sigma2", "sigma3", "sigma1"),
    ("sigma3", "sigma1", "sigma2"),
])
def test_product_of_two_switches_acts_like_the_third(a, b, c):
    prod = real_switch_generator(a) @ real_switch_generator(b)
    assert ontological_content(prod).perm == ontological_content(real_switch_generator(c)).perm


@pytest.mark.parametrize("gen", ["sigma1", "sigma3", "unit"])
def test_conjugation_reverses_real_symmetric_switches(gen):
    r = real_switch_generator(gen)
    np.testing.assert_array_equal(CONJUGATION @ r @ CONJUGATION, r.T)


def test_conjugation_commutes_with_sigma2_switch():
    r = real_switch_generator("sigma2")
    np.testing.assert_array_equal(CONJUGATION @ r @ CONJUGATION, r)


# ------------------------------------------------------------------ the group

def test_group_order_is_48():
    group = enumerate_ontological_group()
    assert len(group) == 2 * 24
    assert {g.perm for g in group} == set(itertools.permutations(range(4)))


def test_group_is_closed_with_inverses():
    group = enumerate_ontological_group()
    for g in group:
        assert any(g.compose(h) == IDENTITY_OP for h in group)
    for g, h in itertools.product(sorted(group)[:12], sorted(group)):
        assert g.compose(h) in group


def test_composition_matches_permutation_matrices():
    for g, h in itertools.product(sorted(enumerate_ontological_group())[::7], repeat=2):
        p = OntologicalOp(g.perm).matrix @ OntologicalOp(h.perm).matrix
        np.testing.assert_array_equal(p, OntologicalOp(g.compose(h).perm).matrix)


def test_literal_matrix_closure_also_picks_up_even_sign_patterns():
    closure = signed_closure()
    assert len(closure) == 192
    labelled = {matrix_key(g.matrix) for g in enumerate_ontological_group()}
    assert labelled <= closure


def test_every_switch_has_ontological_content_in_the_group():
    group = enumerate_ontological_group()
    for r in switch_generators_real().values():
        assert ontological_content(r) in group
        assert matrix_key(r) in signed_closure()


def test_overall_sign_is_not_ontological():
    r = real_switch_generator("sigma1")
    assert ontological_content(-r) == ontological_content(r)


def test_odd_sign_pattern_rejected():
    with pytest.raises(ValueError):
        ontological_content(np.diag([1, -1, 1, 1]))
    with pytest.raises(ValueError):
        ontological_content(np.ones((4, 4)))


# ------------------------------------------------------------------ pulses

def test_pulse_identities_for_pauli_matrices():
    report = pulse_identities_check()
    assert [r["generator"] for r in report] == ["sigma1", "sigma2", "sigma3"]
    for r in report:
        assert r["passed"]
        assert r["half_pulse_error"] <= 1e-12 and r["full_pulse_error"] <= 1e-12


@given(st.floats(0, 2 * np.pi), st.floats(0, np.pi))
def test_pulse_identities_for_any_unit_axis(phi, theta):
    n = (np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta))
    s = sum(c * PAULI[f"sigma{k}"] for k, c in enumerate(n, 1))
    assert pulse_identities_check({"axis": s})[0]["passed"]


def test_pulse_identities_fail_off_spectrum():
    assert not pulse_identities_check({"half": 0.5 * PAULI["sigma1"]})[0]["passed"]


def test_full_pulse_of_each_switch_is_minus_one():
    for r in switch_generators_real().values():
        np.testing.assert_allclose(expm(np.pi / 2 * r) @ expm(np.pi / 2 * r), -np.eye(4), atol=1e-12)
