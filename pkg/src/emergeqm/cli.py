"""Command-line front end.

Every subcommand writes CSV with a header row to ``--out`` (stdout by default).
Floats are written with ``repr`` so identical inputs give byte-identical files.

Exit codes:

    0   success
    2   bad command-line usage or unreadable file
    10  model or matrix file does not parse
    11  value out of range
    12  two switches share a (pair, location)
    13  periods not pairwise coprime in strict mode
    20  dense or exhaustive budget exceeded
    30  a numerical check failed its tolerance

Sampled ensembles draw initial fast configurations from numpy's Philox
counter-based generator (Philox-4x64-10) keyed by ``--seed``.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import warnings
from contextlib import contextmanager

import numpy as np

from .cbit import enumerate_ontological_group, pulse_identities_check
from .core import (
    SimultaneousFiringWarning,
    TorusLattice,
    build_step_unitary,
    classical_step,
    dense_budget,
    inverse_step,
    step_permutation,
)
from .emergent import (
    deviation_curve,
    effective_hamiltonian,
    effective_propagator,
    ladder_report,
    projected_propagators,
    quasi_energy_spectrum,
    signed_permutation_spectrum,
)
from .ensemble import (
    SLIT_CLASSES,
    ExperimentSpec,
    initial_configs,
    run_batch,
    run_interference,
)
from .errors import EmergeError, ModelError, RangeError, ToleranceError
from .modelfile import load_model, read_matrix, write_model
from .synth import quantization_error, synthesize

TOL = 1e-12


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


@contextmanager
def _output(path):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _write_csv(path, header, rows):
    with _output(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def _model(args):
    return load_model(args.model)


# ---------------------------------------------------------------- validate

def _validate_rows(model):
    """(check, value, tolerance, passed) rows for every module invariant."""
    rows = []

    def add(name, value, tol, ok=None):
        rows.append((name, float(value), tol, bool(value <= tol if ok is None else ok)))

    perm = step_permutation(model)
    counts = np.bincount(perm.target, minlength=perm.dim)
    add("step_is_permutation", float(np.abs(counts - 1).max()), 0.0)
    if model.dim <= dense_budget():
        u = build_step_unitary(model)
        add("step_unitarity", np.abs(u.conj().T @ u - np.eye(model.dim)).max(), TOL)

    # sample basis states evenly so large models stay fast
    idx = np.unique(np.linspace(0, model.dim - 1, min(model.dim, 4096)).astype(int))
    mismatch = reverse = 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SimultaneousFiringWarning)
        for i in idx:
            s = model.basis_state(int(i))
            nxt = classical_step(s, model)
            j = model.basis_index(nxt)
            if j != perm.target[i] or nxt.phase != perm.values[i]:
                mismatch += 1
            if inverse_step(nxt, model) != s:
                reverse += 1
    add("classical_matches_operator", mismatch, 0)
    add("step_reversible", reverse, 0)

    h = effective_hamiltonian(model).matrix
    add("effective_hermitian", np.abs(h - h.conj().T).max(), TOL)

    add("cbit_group_order", abs(len(enumerate_ontological_group()) - 48), 0)
    for r in pulse_identities_check(tol=TOL):
        add(f"pulse_half_{r['generator']}", r["half_pulse_error"], TOL)
        add(f"pulse_full_{r['generator']}", r["full_pulse_error"], TOL)
    return rows


def cmd_validate(args):
    rows = _validate_rows(_model(args).model)
    _write_csv(args.out, ("check", "value", "tolerance", "passed"), rows)
    failed = [r[0] for r in rows if not r[3]]
    if failed:
        raise ToleranceError("failed checks: " + ", ".join(failed))


# ---------------------------------------------------------------- spectrum

def cmd_spectrum(args):
    model = _model(args).model
    method = args.method
    if method == "auto":
        method = "dense" if model.dim <= dense_budget() else "cycles"
    if method == "dense":
        spec = quasi_energy_spectrum(build_step_unitary(model))
    else:
        spec = signed_permutation_spectrum(step_permutation(model))
    rep = ladder_report(spec)
    print(
        f"# {len(spec.levels)} distinct levels, regular={rep.regular}, "
        f"residual={rep.residual:.3e}",
        file=sys.stderr,
    )
    _write_csv(args.out, ("index", "quasi_energy"), enumerate(spec.phases))


# ---------------------------------------------------------------- effective

def cmd_effective(args):
    h = effective_hamiltonian(_model(args).model).matrix
    n = len(h)
    rows = ((i + 1, j + 1, h[i, j].real, h[i, j].imag) for i in range(n) for j in range(n))
    _write_csv(args.out, ("row", "col", "re", "im"), rows)


# ---------------------------------------------------------------- synth

def cmd_synth(args):
    target = read_matrix(args.target)
    if args.model is not None:
        lattice = _model(args).model.lattice
    else:
        lattice = TorusLattice(args.periods, strict_coprime=not args.no_strict)
    program = synthesize(target, lattice, strict=not args.best_effort)
    report = quantization_error(target, program)
    print(
        f"# max component residual {report.max_component_residual:.3e}, "
        f"worst residual/bound {report.max_ratio:.4f}",
        file=sys.stderr,
    )
    with _output(args.out) as fh:
        fh.write(write_model(program.model))


# ---------------------------------------------------------------- evolve

def _source(args, model):
    s = args.source
    if not 1 <= s <= model.n_slow:
        raise RangeError(f"source {s} outside 1..{model.n_slow}", field="source")
    return s


def cmd_evolve(args):
    model = _model(args).model
    s0 = _source(args, model)
    T = args.horizon
    x0 = initial_configs(model, "exhaustive")
    run = run_batch(model, x0, s0, T, probes=range(T + 1))
    proj = projected_propagators(model, T)
    h = effective_hamiltonian(model).matrix
    F = len(x0)
    rows = []
    for t in range(T + 1):
        counts = np.bincount(run.probes[t], minlength=model.n_slow)
        quantum = np.abs(proj[t][:, s0 - 1]) ** 2
        eff = np.abs(effective_propagator(h, t)[:, s0 - 1]) ** 2
        for s in range(model.n_slow):
            rows.append((t, s + 1, counts[s] / F, quantum[s], eff[s]))
    _write_csv(args.out, ("t", "slow", "classical", "projected", "effective"), rows)


# ---------------------------------------------------------------- deviation

def cmd_deviation(args):
    curve = deviation_curve(_model(args).model, args.horizon)
    print(f"# max deviation {curve.max:.6g}", file=sys.stderr)
    rows = zip(curve.times, curve.deviations, curve.leakage)
    _write_csv(args.out, ("t", "deviation", "leakage"), rows)


# ---------------------------------------------------------------- ensembles

def _write_log(path, run):
    """One JSON object per firing event."""
    with open(path, "w") as fh:
        for step, n, rows, before, after in run.log or ():
            for r, b, a in zip(rows, before, after):
                fh.write(json.dumps({
                    "trajectory": int(r), "step": int(step), "term": int(n) + 1,
                    "slow_before": int(b) + 1, "slow_after": int(a) + 1,
                }) + "\n")


def cmd_ensemble(args):
    model = _model(args).model
    s0 = _source(args, model)
    x0 = initial_configs(model, args.mode, args.samples, args.seed)
    run = run_batch(model, x0, s0, args.horizon, log=args.log is not None)
    counts = np.bincount(run.final_slow, minlength=model.n_slow)
    n = len(x0)
    rows = [(s + 1, counts[s], counts[s] / n) for s in range(model.n_slow)]
    _write_csv(args.out, ("slow", "count", "frequency"), rows)
    if args.log is not None:
        _write_log(args.log, run)


def _experiment(args, mf):
    if mf.experiment is None:
        raise ModelError("model file has no [experiment] section", field="experiment")
    e = mf.experiment
    if args.horizon is not None:
        e = ExperimentSpec(e.source, e.slits, e.screen, e.t_slit, args.horizon)
        e.check(mf.model)
    return e


def interference_rows(result, n_slow):
    """(section, class, key, value) rows describing an interference run."""
    rows = []
    labels = range(1, n_slow + 1)
    for s in labels:
        rows.append(("histogram", "all", s, result.full.counts.get(s, 0)))
    for c in SLIT_CLASSES:
        for s in labels:
            rows.append(("histogram", c, s, result.conditioned[c].counts.get(s, 0)))
    for c in SLIT_CLASSES:
        d = result.initial[c]
        rows.append(("class_size", c, "trajectories", d.size))
        for name, test in (("cell_chi2", d.cell_test), ("orbit_chi2", d.orbit_test)):
            if test is None:
                continue
            rows += [
                (name, c, "statistic", test.statistic),
                (name, c, "dof", test.dof),
                (name, c, "pvalue", test.pvalue),
                (name, c, "critical99", test.critical99),
                (name, c, "rejected", test.rejected),
            ]
    rows.append(("visibility", "all", "screen", result.visibility()))
    return rows


def cmd_interfere(args):
    mf = _model(args)
    spec = _experiment(args, mf)
    result = run_interference(
        mf.model, spec, args.mode, args.samples, args.seed, log=args.log is not None
    )
    _write_csv(args.out, ("section", "class", "key", "value"),
               interference_rows(result, mf.model.n_slow))
    if args.log is not None:
        _write_log(args.log, result.run)


# ---------------------------------------------------------------- parser

def _nonneg(text):
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _periods(text):
    try:
        return tuple(int(p) for p in text.replace(",", " ").split())
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated integers") from None


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="emergeqm", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    def cmd(name, func, help, model=True):
        sp = sub.add_parser(name, help=help)
        if model:
            sp.add_argument("--model", required=True, help="model definition file")
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.set_defaults(func=func)
        return sp

    cmd("validate", cmd_validate, "run every invariant check on a model")
    sp = cmd("spectrum", cmd_spectrum, "quasi-energies of the one-step operator")
    sp.add_argument("--method", choices=("auto", "dense", "cycles"), default="auto")
    cmd("effective", cmd_effective, "first-order effective Hamiltonian")

    sp = cmd("synth", cmd_synth, "compile a Hermitian target into switch terms", model=False)
    sp.add_argument("--target", required=True, help="matrix file")
    sp.add_argument("--model", help="take the lattice from this model file")
    sp.add_argument("--periods", type=_periods, help="lattice periods, e.g. '5,7,11'")
    sp.add_argument("--no-strict", action="store_true", help="allow non-coprime periods")
    sp.add_argument("--best-effort", action="store_true",
                    help="accept diagonals more than half a grid step off instead of failing")

    for name, func, help in (
        ("evolve", cmd_evolve, "slow-state probabilities versus time"),
        ("deviation", cmd_deviation, "distance between projected and effective propagators"),
    ):
        sp = cmd(name, func, help)
        sp.add_argument("--horizon", type=_nonneg, required=True)
        if name == "evolve":
            sp.add_argument("--source", type=int, default=1)

    for name, func, help in (
        ("ensemble", cmd_ensemble, "final slow-state histogram over initial configurations"),
        ("interfere", cmd_interfere, "two-slit post-selection experiment"),
    ):
        sp = cmd(name, func, help)
        if name == "ensemble":
            sp.add_argument("--horizon", type=_nonneg, required=True)
            sp.add_argument("--source", type=int, default=1)
        else:
            sp.add_argument("--horizon", type=_nonneg, help="override t_screen")
        sp.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
        sp.add_argument("--samples", type=int)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--log", help="write firing events as JSON lines")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "mode", None) == "sampled" and not args.samples:
        parser.error("--mode sampled needs --samples")
    if args.command == "synth" and (args.model is None) == (args.periods is None):
        parser.error("synth needs exactly one of --periods and --model")
    try:
        args.func(args)
    except EmergeError as err:
        print(f"error: {err}", file=sys.stderr)
        return err.exit_code
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
