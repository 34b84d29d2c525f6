"""Plain-text model and matrix files.

Model file::

    # comments start with '#'
    [model]
    n_slow = 2
    periods = 5, 7
    strict_coprime = true

    [switch]
    pair = 1 2
    generator = sigma1
    location = 0 0
    sign = +1
    fast = 1 2          # optional; defaults to the slow pair

    [experiment]        # optional
    source = 1
    slits = 2 3
    screen = 4 5 6 7 8
    t_slit = 300
    t_screen = 1147

Matrix file: the dimension N on the first line, then N rows of N ``re,im``
tokens separated by whitespace.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import ModelSpec, SwitchTerm, TorusLattice
from .ensemble import ExperimentSpec
from .errors import ModelError, ParseError

MODEL_KEYS = {"n_slow", "periods", "strict_coprime"}
SWITCH_KEYS = {"pair", "generator", "location", "sign", "fast"}
EXPERIMENT_KEYS = {"source", "slits", "screen", "t_slit", "t_screen"}
SECTIONS = {"model": MODEL_KEYS, "switch": SWITCH_KEYS, "experiment": EXPERIMENT_KEYS}


@dataclass(frozen=True)
class ModelFile:
    model: ModelSpec
    experiment: ExperimentSpec | None = None


def _int(token, line, key):
    token = token.strip().replace("−", "-")
    try:
        return int(token)
    except ValueError:
        raise ParseError(f"expected an integer, got {token!r}", line=line, field=key) from None


def _ints(value, line, key):
    tokens = value.replace(",", " ").split()
    if not tokens:
        raise ParseError("expected integers", line=line, field=key)
    return tuple(_int(t, line, key) for t in tokens)


def _bool(value, line, key):
    v = value.strip().lower()
    if v in ("true", "yes", "1", "on"):
        return True
    if v in ("false", "no", "0", "off"):
        return False
    raise ParseError(f"expected true or false, got {value!r}", line=line, field=key)


def _relabel(err: ModelError, line):
    return type(err)(err.detail, line=line, field=err.field)


def _sections(text):
    """Yield (section name, header line, {key: (value, line)})."""
    current = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip().lower()
            if name not in SECTIONS:
                raise ParseError(f"unknown section [{name}]", line=lineno)
            if current is not None:
                yield current
            current = (name, lineno, {})
            continue
        if current is None:
            raise ParseError("key outside of any section", line=lineno)
        if "=" not in line:
            raise ParseError(f"expected 'key = value', got {line!r}", line=lineno)
        key, value = (s.strip() for s in line.split("=", 1))
        name, _, entries = current
        if key not in SECTIONS[name]:
            raise ParseError(f"unknown key in [{name}]", line=lineno, field=key)
        if key in entries:
            raise ParseError(f"repeated key in [{name}]", line=lineno, field=key)
        entries[key] = (value, lineno)
    if current is not None:
        yield current


def _require(entries, keys, section, line):
    for k in keys:
        if k not in entries:
            raise ParseError(f"[{section}] is missing '{k}'", line=line, field=k)


def parse_model_text(text: str) -> ModelFile:
    model_block = None
    switch_blocks = []
    experiment_block = None
    for name, line, entries in _sections(text):
        if name == "model":
            if model_block is not None:
                raise ParseError("repeated [model] section", line=line)
            model_block = (line, entries)
        elif name == "switch":
            switch_blocks.append((line, entries))
        else:
            if experiment_block is not None:
                raise ParseError("repeated [experiment] section", line=line)
            experiment_block = (line, entries)
    if model_block is None:
        raise ParseError("missing [model] section")

    line, e = model_block
    _require(e, ("n_slow", "periods"), "model", line)
    n_slow = _int(e["n_slow"][0], e["n_slow"][1], "n_slow")
    strict = _bool(*e["strict_coprime"], "strict_coprime") if "strict_coprime" in e else True
    try:
        lattice = TorusLattice(_ints(e["periods"][0], e["periods"][1], "periods"), strict)
        model = ModelSpec(n_slow, lattice)
    except ModelError as err:
        raise _relabel(err, e["periods"][1] if "periods" in (err.field or "") else line) from None

    switches = []
    for line, e in switch_blocks:
        _require(e, ("pair", "generator", "location"), "switch", line)
        kwargs = {
            "pair": _ints(*e["pair"], "pair"),
            "generator": e["generator"][0].strip(),
            "location": _ints(*e["location"], "location"),
        }
        if "sign" in e:
            kwargs["sign"] = _int(*e["sign"], "sign")
        if "fast" in e:
            kwargs["fast"] = _ints(*e["fast"], "fast")
        try:
            term = SwitchTerm(**kwargs)
            model = ModelSpec(n_slow, lattice, (*switches, term))
        except ModelError as err:
            at = e[err.field][1] if err.field in e else line
            raise _relabel(err, at) from None
        switches.append(term)

    experiment = None
    if experiment_block is not None:
        line, e = experiment_block
        _require(e, sorted(EXPERIMENT_KEYS), "experiment", line)
        try:
            experiment = ExperimentSpec(
                _int(*e["source"], "source"),
                _ints(*e["slits"], "slits"),
                _ints(*e["screen"], "screen"),
                _int(*e["t_slit"], "t_slit"),
                _int(*e["t_screen"], "t_screen"),
            )
            experiment.check(model)
        except ModelError as err:
            raise _relabel(err, line) from None
    return ModelFile(model, experiment)


def load_model(path) -> ModelFile:
    return parse_model_text(Path(path).read_text())


def parse_model(path) -> ModelSpec:
    return load_model(path).model


def _join(values):
    return " ".join(str(v) for v in values)


def write_model(model: ModelSpec, experiment: ExperimentSpec | None = None) -> str:
    lines = [
        "[model]",
        f"n_slow = {model.n_slow}",
        f"periods = {', '.join(str(p) for p in model.lattice.periods)}",
        f"strict_coprime = {'true' if model.lattice.strict_coprime else 'false'}",
    ]
    for term in model.switches:
        lines += [
            "",
            "[switch]",
            f"pair = {_join(term.pair)}",
            f"generator = {term.generator}",
            f"location = {_join(term.location)}",
            f"sign = {term.sign:+d}",
        ]
        if term.fast != term.pair:
            lines.append(f"fast = {_join(term.fast)}")
    if experiment is not None:
        lines += [
            "",
            "[experiment]",
            f"source = {experiment.source}",
            f"slits = {_join(experiment.slits)}",
            f"screen = {_join(experiment.screen)}",
            f"t_slit = {experiment.t_slit}",
            f"t_screen = {experiment.t_screen}",
        ]
    return "\n".join(lines) + "\n"


def parse_matrix_text(text: str) -> np.ndarray:
    rows = []
    lines = [
        (n, ln.split("#", 1)[0].strip()) for n, ln in enumerate(text.splitlines(), 1)
    ]
    lines = [(n, ln) for n, ln in lines if ln]
    if not lines:
        raise ParseError("empty matrix file")
    n = _int(lines[0][1], lines[0][0], "N")
    if n < 1:
        raise ParseError("N must be positive", line=lines[0][0], field="N")
    body = lines[1:]
    if len(body) != n:
        raise ParseError(f"expected {n} rows, found {len(body)}")
    for lineno, ln in body:
        tokens = ln.split()
        if len(tokens) != n:
            raise ParseError(f"expected {n} entries, found {len(tokens)}", line=lineno)
        row = []
        for tok in tokens:
            parts = tok.replace("−", "-").split(",")
            if len(parts) != 2:
                raise ParseError(f"entry {tok!r} is not 're,im'", line=lineno)
            try:
                row.append(complex(float(parts[0]), float(parts[1])))
            except ValueError:
                raise ParseError(f"entry {tok!r} is not numeric", line=lineno) from None
        rows.append(row)
    return np.array(rows, dtype=complex)


def read_matrix(path) -> np.ndarray:
    return parse_matrix_text(Path(path).read_text())


def write_matrix(m) -> str:
    m = np.asarray(m, dtype=complex)
    lines = [str(len(m))]
    for row in m:
        lines.append(" ".join(f"{float(z.real)!r},{float(z.imag)!r}" for z in row))
    return "\n".join(lines) + "\n"
