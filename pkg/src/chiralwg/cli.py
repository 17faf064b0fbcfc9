"""Command-line interface.

    chiralwg <command> --config <file> [--out <file>] [--param key=value ...]

Configs are JSON; ``--config fixture:<name>`` loads a bundled example.
Exit codes: 0 success, 1 a physics check failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import copy
import csv
import hashlib
import io
import json
import math
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from importlib import resources

import jsonschema
import numpy as np

from . import __version__
from .analysis import (
    NoDrivenDarkState,
    bright_partner,
    check_dfi,
    driven_dark_state,
    find_dark_states,
    singlet,
    triplet,
)
from .coefficients import assemble_model, compute_coefficients
from .dynamics import DegenerateSteadyState, InvariantViolated, StepSizeUnderflow, evolve, steady_state
from .hilbert import basis_label, ket, projector
from .setups import ORDERS
from .slh import DriveSpec, compose_layout
from .tables import check_coefficient_rows, check_dark_state_grid, check_rate_rows
from .topology import (
    Atom,
    ConnectionPoint,
    DuplicateAtomError,
    EmptyAtomError,
    Layout,
    LayoutError,
    NonFinitePhaseError,
    PhaseCountMismatchError,
    validate,
)

EXIT_OK = 0
EXIT_PHYSICS = 1
EXIT_INPUT = 2

COMMANDS = ("coeffs", "compose", "evolve", "steady", "dark", "dfi", "sweep", "verify-tables")
FLOAT_FORMAT = "%.17g"
ORACLE_TOL = 1e-10

_number = {"type": "number"}
_rate = {"type": "number", "minimum": 0}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["atoms", "points", "phases"],
    "properties": {
        "atoms": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["name"],
                "properties": {
                    "name": {"type": "string", "minLength": 1},
                    "frequency": _number,
                    "detuning": _number,
                },
            },
        },
        "points": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "additionalProperties": False,
                "required": ["atom", "rank", "gamma_right", "gamma_left"],
                "properties": {
                    "atom": {"type": "string"},
                    "rank": {"type": "integer"},
                    "gamma_right": _rate,
                    "gamma_left": _rate,
                },
            },
        },
        "phases": {"type": "array", "items": _number},
        "drive": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "beta_re": _number,
                "beta_im": _number,
                "from": {"enum": ["left"]},
            },
        },
        "solver": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "rel_tol": {"type": "number", "exclusiveMinimum": 0},
                "abs_tol": {"type": "number", "exclusiveMinimum": 0},
                "t_final": {"type": "number", "exclusiveMinimum": 0},
                "samples": {"type": "integer", "minimum": 2},
            },
        },
        "initial": {"type": "string", "pattern": "^[eg]+$"},
    },
}


class ConfigError(Exception):
    pass


class ParseError(ConfigError):
    def __init__(self, msg, line, column):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {msg}")


class SchemaError(ConfigError):
    def __init__(self, key, msg):
        self.key = key
        super().__init__(f"{key}: {msg}")


@dataclass
class LayoutConfig:
    layout: object
    drive: DriveSpec | None
    solver: dict
    initial: str | None
    raw: dict = field(repr=False, default_factory=dict)

    @property
    def n_atoms(self):
        return self.layout.n_atoms


def _fixture_text(name):
    try:
        return resources.files("chiralwg").joinpath("data", f"{name}.json").read_text()
    except FileNotFoundError:
        raise ConfigError(f"no bundled fixture named {name!r}") from None


def read_config_text(path):
    if path.startswith("fixture:"):
        return _fixture_text(path.split(":", 1)[1])
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None


def load_json(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None


def _offending_key(err):
    if err.validator in ("required", "additionalProperties"):
        names = re.findall(r"'([^']+)'", err.message)
        if names:
            return names[0]
    for part in reversed(list(err.absolute_path)):
        if isinstance(part, str):
            return part
    return "<root>"


def _layout_error_key(exc):
    if isinstance(exc, (PhaseCountMismatchError, NonFinitePhaseError)):
        return "phases"
    if isinstance(exc, (DuplicateAtomError, EmptyAtomError)):
        return "atoms"
    return "points"


def validate_config(raw):
    """Schema-check a decoded config and build the layout it describes."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        err = jsonschema.exceptions.best_match(errors)
        raise SchemaError(_offending_key(err), err.message)
    n_points = len(raw["points"])
    if len(raw["phases"]) != n_points - 1:
        raise SchemaError("phases", f"expected {n_points - 1} phases for {n_points} points, got {len(raw['phases'])}")
    atoms = [Atom(a["name"], float(a.get("frequency", 0.0)), float(a.get("detuning", 0.0))) for a in raw["atoms"]]
    points = [ConnectionPoint(p["atom"], int(p["rank"]), float(p["gamma_right"]), float(p["gamma_left"])) for p in raw["points"]]
    try:
        layout = validate(Layout(atoms, points, raw["phases"]))
    except LayoutError as exc:
        raise SchemaError(_layout_error_key(exc), str(exc)) from None
    drive = None
    if "drive" in raw:
        d = raw["drive"]
        drive = DriveSpec(complex(d.get("beta_re", 0.0), d.get("beta_im", 0.0)))
    initial = raw.get("initial")
    if initial is not None and len(initial) != layout.n_atoms:
        raise SchemaError("initial", f"needs one letter per atom ({layout.n_atoms})")
    return LayoutConfig(layout, drive, dict(raw.get("solver", {})), initial, raw)


def parse_config(path, overrides=()):
    """Read, override and validate a config file."""
    raw = load_json(read_config_text(path))
    for key, value in overrides:
        set_path(raw, key, value)
    return validate_config(raw)


def parse_value(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def set_path(raw, key, value):
    """Assign `value` at a dotted path such as ``points.1.gamma_right``."""
    parts = key.split(".")
    node = raw
    try:
        for part in parts[:-1]:
            if isinstance(node, list):
                node = node[int(part)]
            else:
                node = node.setdefault(part, {})
        last = parts[-1]
        if isinstance(node, list):
            node[int(last)] = value
        else:
            node[last] = value
    except (ValueError, IndexError, TypeError, AttributeError):
        raise SchemaError(key, "parameter path does not exist in the config") from None


def split_param(text):
    if "=" not in text:
        raise ConfigError(f"--param expects key=value, got {text!r}")
    key, value = text.split("=", 1)
    return key.strip(), value.strip()


# output


@dataclass
class ResultTable:
    columns: list
    rows: list = field(default_factory=list)
    notes: list = field(default_factory=list)

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError("row length does not match the header")
        self.rows.append(values)


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return FLOAT_FORMAT % float(v)
    if v is None:
        return ""
    return str(v)


def render(table: ResultTable, provenance):
    buf = io.StringIO()
    for line in provenance + table.notes:
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_cell(v) for v in row])
    return buf.getvalue()


def _split_complex(name):
    return [f"{name}_re", f"{name}_im"]


def _cplx(z):
    z = complex(z)
    return z.real, z.imag


# commands


def cmd_coeffs(cfg, args):
    c = compute_coefficients(cfg.layout)
    t = ResultTable(["quantity", "atom_j", "atom_k"] + _split_complex("value"))
    for j, name in enumerate(c.names):
        t.add("delta_omega", name, "", float(c.delta_omega[j]), 0.0)
        t.add("omega_prime", name, "", float(c.omega_prime[j]), 0.0)
        t.add("gamma", name, "", float(c.gamma[j]), 0.0)
        t.add("amp_right", name, "", *_cplx(c.amp_right[j]))
        t.add("amp_left", name, "", *_cplx(c.amp_left[j]))
    for j in range(c.n_atoms):
        for k in range(j + 1, c.n_atoms):
            t.add("g", c.names[j], c.names[k], *_cplx(c.g[j, k]))
            t.add("gamma_coll", c.names[j], c.names[k], *_cplx(c.gamma_coll[j, k]))
    return t, EXIT_OK


def oracle_deviation(layout, drive=None):
    """Relative deviation between the SLH network and the closed-form model.

    Hamiltonians are compared without their trace, which only shifts the
    energy zero.
    """
    slh = compose_layout(layout, drive)
    me = assemble_model(compute_coefficients(layout), drive)
    d = me.dim
    eye = np.eye(d)

    def traceless(h):
        return h - np.trace(h) / d * eye

    def rel(a, b):
        return float(np.linalg.norm(a - b) / max(np.linalg.norm(a), np.linalg.norm(b), 1e-300))

    return {
        "H": rel(traceless(slh.H), traceless(me.H)),
        "L_R": rel(slh.L[0], me.collapse_ops[0]),
        "L_L": rel(slh.L[1], me.collapse_ops[1]),
    }


def cmd_compose(cfg, args):
    dev = oracle_deviation(cfg.layout, cfg.drive)
    t = ResultTable(["operator", "relative_deviation", "passed"])
    ok = True
    for name, value in dev.items():
        passed = value <= ORACLE_TOL
        ok &= passed
        t.add(name, value, passed)
    return t, EXIT_OK if ok else EXIT_PHYSICS


def _model(cfg):
    coeffs = compute_coefficients(cfg.layout)
    return coeffs, assemble_model(coeffs, cfg.drive)


def _try_driven(coeffs, cfg):
    if cfg.drive is None or coeffs.n_atoms != 2:
        return None
    try:
        return driven_dark_state(coeffs, cfg.drive)
    except NoDrivenDarkState:
        return None


def cmd_evolve(cfg, args):
    coeffs, me = _model(cfg)
    n = cfg.n_atoms
    solver = cfg.solver
    t_final = float(solver.get("t_final", 10.0))
    samples = int(solver.get("samples", 101))
    label = cfg.initial or ("e" + "g" * (n - 1))
    rho0 = projector(ket(label))
    extra = {}
    if n == 2:
        extra["P_S"] = projector(singlet())
        extra["P_T"] = projector(triplet())
        rep = _try_driven(coeffs, cfg)
        if rep is not None:
            extra["P_D"] = projector(rep.state)
            extra["P_B"] = projector(bright_partner(rep.kind))
    traj = evolve(
        me,
        rho0,
        t_final,
        rel_tol=float(solver.get("rel_tol", 1e-8)),
        abs_tol=float(solver.get("abs_tol", 1e-10)),
        sample_times=np.linspace(0.0, t_final, samples),
        observables=extra,
    )
    names = [f"P_{basis_label(i, n)}" for i in range(2**n)] + list(extra)
    t = ResultTable(["t"] + names)
    t.notes.append(f"initial={label} error_estimate={FLOAT_FORMAT % traj.error_estimate} steps={traj.n_steps}")
    for i, time in enumerate(traj.times):
        t.add(float(time), *(float(traj.observables[k][i]) for k in names))
    return t, EXIT_OK


def cmd_steady(cfg, args):
    coeffs, me = _model(cfg)
    try:
        rho = steady_state(me)
    except DegenerateSteadyState as exc:
        t = ResultTable(["kernel_dimension"])
        t.notes.append("steady state is not unique")
        t.add(len(exc.basis))
        return t, EXIT_PHYSICS
    t = ResultTable(["row", "col"] + _split_complex("rho"))
    rep = _try_driven(coeffs, cfg)
    if rep is not None:
        fid = float(np.real(np.vdot(rep.state, rho @ rep.state)))
        t.notes.append(f"dark_state={rep.kind} fidelity={FLOAT_FORMAT % fid}")
    n = cfg.n_atoms
    for i in range(me.dim):
        for j in range(me.dim):
            t.add(basis_label(i, n), basis_label(j, n), *_cplx(rho[i, j]))
    return t, EXIT_OK


def cmd_dark(cfg, args):
    coeffs, me = _model(cfg)
    reports = find_dark_states(me)
    n = cfg.n_atoms
    amp_cols = []
    for i in range(me.dim):
        amp_cols += _split_complex(f"amp_{basis_label(i, n)}")
    t = ResultTable(
        ["index", "kind", "eigenvalue"]
        + _split_complex("alpha")
        + ["gamma_d", "gamma_s", "gamma_t"]
        + _split_complex("xi")
        + ["kernel_dimension", "decoupled"]
        + amp_cols
    )
    for idx, r in enumerate(reports):
        alpha = _cplx(r.alpha) if r.alpha is not None else (None, None)
        xi = _cplx(r.xi) if r.xi is not None else (None, None)
        amps = []
        for a in r.state:
            amps += _cplx(a)
        t.add(idx, r.kind, r.eigenvalue, *alpha, r.gamma_d, r.gamma_s, r.gamma_t, *xi, r.kernel_dimension, r.decoupled, *amps)
    return t, EXIT_OK


def cmd_dfi(cfg, args):
    rep = check_dfi(compute_coefficients(cfg.layout))
    t = ResultTable(["atom_j", "atom_k"] + _split_complex("g") + ["is_dfi", "max_individual_decay", "max_collective_decay", "tol"])
    for (a, b), g in rep.residual_g.items():
        t.add(a, b, *_cplx(g), rep.is_dfi, rep.max_individual_decay, rep.max_collective_decay, rep.tol)
    if not rep.residual_g:
        t.add("", "", 0.0, 0.0, rep.is_dfi, rep.max_individual_decay, rep.max_collective_decay, rep.tol)
    return t, EXIT_OK


def sweep_axes(params):
    """Split --param values into fixed overrides and at most two swept axes."""
    fixed, axes = [], []
    for key, value in params:
        parts = value.split(":")
        if len(parts) == 3:
            try:
                start, stop, num = float(parts[0]), float(parts[1]), int(parts[2])
            except ValueError:
                raise SchemaError(key, f"range must be start:stop:num, got {value!r}") from None
            if num < 1:
                raise SchemaError(key, "range needs at least one point")
            axes.append((key, np.linspace(start, stop, num)))
        else:
            fixed.append((key, parse_value(value)))
    if not axes:
        raise ConfigError("sweep needs at least one --param key=start:stop:num")
    if len(axes) > 2:
        raise ConfigError("sweep supports at most two swept parameters")
    return fixed, axes


def _sweep_point(raw, assignment):
    raw = copy.deepcopy(raw)
    for key, value in assignment:
        set_path(raw, key, float(value))
    cfg = validate_config(raw)
    coeffs = compute_coefficients(cfg.layout)
    me = assemble_model(coeffs, cfg.drive)
    dfi = check_dfi(coeffs)
    reports = find_dark_states(me)
    n_dark = sum(r.nontrivial for r in reports)
    gamma_d = math.nan
    rep = _try_driven(coeffs, cfg)
    if rep is not None:
        gamma_d = rep.gamma_d
    max_g = max((abs(g) for g in dfi.residual_g.values()), default=0.0)
    return (
        float(np.min(coeffs.gamma)),
        float(np.max(coeffs.gamma)),
        max_g,
        dfi.max_collective_decay,
        dfi.is_dfi,
        n_dark,
        gamma_d,
    )


def worker_count():
    env = os.environ.get("CHIRALWG_THREADS")
    if env:
        try:
            n = int(env)
        except ValueError:
            raise ConfigError(f"CHIRALWG_THREADS must be an integer, got {env!r}") from None
        return max(1, n)
    return os.cpu_count() or 1


def cmd_sweep(cfg, args):
    _, axes = args.sweep_axes
    keys = [k for k, _ in axes]
    grids = [v for _, v in axes]
    if len(grids) == 1:
        points = [((keys[0], x),) for x in grids[0]]
    else:
        points = [((keys[0], x), (keys[1], y)) for x in grids[0] for y in grids[1]]
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        results = list(pool.map(lambda p: _sweep_point(cfg.raw, p), points))
    t = ResultTable(keys + ["gamma_min", "gamma_max", "max_abs_g", "max_abs_gamma_coll", "is_dfi", "n_dark", "gamma_d"])
    for p, res in zip(points, results):
        t.add(*(float(v) for _, v in p), *res)
    return t, EXIT_OK


def _topology_of(layout):
    if layout.n_atoms != 2:
        return None
    order = "".join("a" if p.owner == layout.atoms[0].name else "b" for p in layout.points)
    for name, o in ORDERS.items():
        if o == order:
            return name
    return None


def cmd_verify_tables(cfg, args):
    layout = cfg.layout
    topology = _topology_of(layout)
    if topology is None:
        raise SchemaError("points", "verify-tables needs two atoms in a small, separate, nested or braided order")
    gr = [p.gamma_right for p in layout.points]
    gl = [p.gamma_left for p in layout.points]
    rows = check_coefficient_rows(topology, layout.phases, gr, gl)
    grid_row, checked, skipped = check_dark_state_grid(topology, gr[0], gl[0])
    rows.append(grid_row)
    delta = layout.atoms[0].detuning or 0.5
    phi2 = layout.phases[1] if topology != "small" and abs(1 + math.cos(layout.phases[1])) > 1e-6 else math.pi / 3
    rows += check_rate_rows(gr[0], gl[0], delta, 1.0, phi2=phi2)
    t = ResultTable(["table", "row", "deviation", "passed"])
    t.notes.append(f"topology={topology} grid_checked={checked} grid_skipped_decoupled={skipped}")
    for r in rows:
        t.add(r.table, r.row, r.deviation, r.passed)
    return t, EXIT_OK if all(r.passed for r in rows) else EXIT_PHYSICS


HANDLERS = {
    "coeffs": cmd_coeffs,
    "compose": cmd_compose,
    "evolve": cmd_evolve,
    "steady": cmd_steady,
    "dark": cmd_dark,
    "dfi": cmd_dfi,
    "sweep": cmd_sweep,
    "verify-tables": cmd_verify_tables,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="chiralwg", description="Giant atoms in chiral waveguides")
    ap.add_argument("--version", action="version", version=f"chiralwg {__version__}")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="JSON layout config, or fixture:<name>")
    ap.add_argument("--out", help="output CSV (default: stdout)")
    ap.add_argument("--param", action="append", default=[], metavar="KEY=VALUE", help="override a config value by dotted path")
    return ap


def config_hash(text):
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def run_command(cmd, config_path, output_path=None, params=()):
    """Run one command; returns the exit code."""
    try:
        text = read_config_text(config_path)
        pairs = [split_param(p) for p in params]
        args = argparse.Namespace(sweep_axes=None)
        if cmd == "sweep":
            fixed, axes = sweep_axes(pairs)
            args.sweep_axes = (fixed, axes)
            overrides = fixed + [(k, float(v[0])) for k, v in axes]
        else:
            overrides = [(k, parse_value(v)) for k, v in pairs]
        raw = load_json(text)
        for key, value in overrides:
            set_path(raw, key, value)
        cfg = validate_config(raw)
        if cmd == "sweep":
            cfg.raw = load_json(text)
            for key, value in fixed:
                set_path(cfg.raw, key, value)
        table, code = HANDLERS[cmd](cfg, args)
    except ConfigError as exc:
        print(f"chiralwg: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (InvariantViolated, StepSizeUnderflow) as exc:
        print(f"chiralwg: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PHYSICS

    provenance = [f"chiralwg {__version__} {cmd}", f"config_sha256 {config_hash(text)}"]
    provenance += [f"param {p}" for p in params]
    out = render(table, provenance)
    if output_path:
        with open(output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    return code


def main(argv=None):
    args = build_parser().parse_args(argv)
    return run_command(args.command, args.config, args.out, args.param)


if __name__ == "__main__":
    sys.exit(main())
