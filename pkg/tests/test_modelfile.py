import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import MODELS, random_models
from emergeqm.core import ModelSpec, SwitchTerm, TorusLattice
from emergeqm.ensemble import ExperimentSpec
from emergeqm.errors import (
    CoprimeError,
    DuplicateLocationError,
    ModelError,
    ParseError,
    RangeError,
)
from emergeqm.modelfile import (
    load_model,
    parse_matrix_text,
    parse_model,
    parse_model_text,
    write_matrix,
    write_model,
)

MINIMAL = """\
# one sigma1 switch
[model]
n_slow = 2
periods = 5, 7
strict_coprime = true

[switch]
pair = 1 2
generator = sigma1
location = 0 0
sign = +1
"""


def test_minimal_file():
    model = parse_model_text(MINIMAL).model
    assert model.dim == 70
    assert model.switches == (SwitchTerm((1, 2), "sigma1", (0, 0)),)


def test_defaults_and_unicode_minus():
    text = "[model]\nn_slow=2\nperiods=5 7\n[switch]\npair=1 2\ngenerator=sigma3\nlocation=1 1\nsign=−1\n"
    model = parse_model_text(text).model
    assert model.lattice.strict_coprime
    assert model.switches[0].sign == -1


@pytest.mark.parametrize("text, error, line, field", [
    (MINIMAL.replace("5, 7", "4, 6"), CoprimeError, 4, "periods"),
    (MINIMAL + "\n[switch]\npair = 1 2\ngenerator = sigma3\nlocation = 0 0\n",
     DuplicateLocationError, 16, "location"),
    (MINIMAL.replace("location = 0 0", "location = 0 9"), RangeError, 10, "location"),
    (MINIMAL.replace("pair = 1 2", "pair = 1 3"), RangeError, 8, "pair"),
    (MINIMAL.replace("sign = +1", "sign = 2"), RangeError, 11, "sign"),
    (MINIMAL.replace("n_slow = 2", "n_slow = two"), ParseError, 3, "n_slow"),
    (MINIMAL.replace("sign = +1", "sign = 1.0"), ParseError, 11, "sign"),
    (MINIMAL.replace("generator = sigma1", "generator = sigma9"), ModelError, 9, "generator"),
    (MINIMAL + "colour = blue\n", ParseError, 12, "colour"),
    (MINIMAL.replace("[switch]", "[swtich]"), ParseError, 7, None),
    (MINIMAL + "pair = 1 2\n", ParseError, 12, "pair"),
])
def test_diagnostics_name_line_and_field(text, error, line, field):
    with pytest.raises(error) as info:
        parse_model_text(text)
    assert info.value.line == line
    assert info.value.field == field
    assert f"line {line}" in str(info.value)


def test_strict_coprime_can_be_disabled():
    model = parse_model_text(MINIMAL.replace("5, 7", "4, 6").replace("true", "false")).model
    assert model.lattice.periods == (4, 6)


@pytest.mark.parametrize("text", [
    "",
    "n_slow = 2\n",
    "[model]\nn_slow = 2\n",
    "[model]\nn_slow = 2\nperiods = 5 7\n[model]\nn_slow = 2\nperiods = 5 7\n",
    "[model]\nn_slow = 2\nperiods = 5 7\n[switch]\npair = 1 2\n",
    "[model]\nn_slow = 2\nperiods = 5 7\nno equals sign\n",
])
def test_structural_errors(text):
    with pytest.raises(ParseError):
        parse_model_text(text)


def test_experiment_block_round_trip():
    mf = load_model(MODELS / "two_slit.model")
    assert mf.experiment == ExperimentSpec(1, (2, 3), (4, 5, 6, 7, 8), 150, 600)
    again = parse_model_text(write_model(mf.model, mf.experiment))
    assert again == mf


def test_experiment_out_of_range():
    text = MINIMAL + "[experiment]\nsource = 1\nslits = 2 3\nscreen = 4\nt_slit = 1\nt_screen = 2\n"
    with pytest.raises(RangeError):
        parse_model_text(text)


@given(random_models())
def test_write_then_parse_reproduces_model(model):
    assert parse_model_text(write_model(model)).model == model


def test_fast_field_round_trip():
    model = ModelSpec(4, TorusLattice((5, 7)), [SwitchTerm((3, 4), "sigma2", (1, 2), -1, fast=(2, 1))])
    text = write_model(model)
    assert "fast = 2 1" in text
    assert parse_model_text(text).model == model


@pytest.mark.parametrize("path", sorted(MODELS.glob("*.model")), ids=lambda p: p.stem)
def test_shipped_models_are_canonical(path):
    mf = load_model(path)
    assert write_model(mf.model, mf.experiment) == path.read_text()
    assert parse_model(path) == mf.model


# ------------------------------------------------------------------ matrices

@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_matrix_round_trip(n, seed):
    rng = np.random.default_rng(seed)
    m = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    np.testing.assert_array_equal(parse_matrix_text(write_matrix(m)), m)


def test_matrix_format():
    m = parse_matrix_text("2\n0,0 1,0.5\n1,-0.5 0,0\n")
    np.testing.assert_array_equal(m, [[0, 1 + 0.5j], [1 - 0.5j, 0]])


@pytest.mark.parametrize("text", [
    "",
    "0\n",
    "2\n0,0 1,0\n",
    "2\n0,0 1,0\n1,0\n",
    "2\n0,0 1\n1,0 0,0\n",
    "2\n0,0 a,0\n1,0 0,0\n",
])
def test_bad_matrix_files(text):
    with pytest.raises(ParseError):
        parse_matrix_text(text)
