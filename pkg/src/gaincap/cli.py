"""Command-line front end.

Problem files are UTF-8 JSON describing one plant, band, and loop::

    {
      "n": 2, "m": 2, "p": 1,
      "A": [[0.9, 0.0], [0.6, 0.3]],
      "B": [[-1.5, 2.0], [1.0, -3.0]],
      "C": [[1.0, 1.0]],
      "K": [[0.32, 0.16], [0.24, 0.12]],
      "tau0": [0.3, 0.5],
      "epsilon": 1.4142135623730951,
      "options": {"max_iter": 200, "stop_tol": 1e-9, "horizon": 8}
    }

Either the gain ``K`` or the closed-loop matrix ``A_tilde`` must be present;
when both are given, ``A + B K`` must match ``A_tilde`` to 1e-9 entrywise.
``B`` and ``m`` may be omitted when no gain is given.  ``options`` and each
of its entries are optional (defaults: max_iter 200, stop_tol 1e-9, horizon
4n).

Commands: ``determine``, ``check-gain``, ``analyze``, ``region``,
``simulate``.  Exit codes: 0 success (admissible for check-gain), 1 usage or
input error, 2 iteration limit reached, 3 inadmissible gain.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from .capacity import (
    DETERMINED,
    CapacitySet,
    DeterminationError,
    Gain,
    SensitivityReport,
    SystemSpec,
    analyze,
    check_gain,
    closed_loop,
    determine,
    region_sample,
    simulate,
)
from .linalg import EigenConvergenceError

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_LIMIT = 2
EXIT_INADMISSIBLE = 3

CROSS_CHECK_TOL = 1e-9


class InputError(ValueError):
    """Malformed problem file or command arguments."""


@dataclass(frozen=True)
class Options:
    max_iter: int
    stop_tol: float
    horizon: int


@dataclass(frozen=True)
class Problem:
    """A parsed problem file: plant, optional gain, optional closed loop."""

    system: SystemSpec
    gain: Gain | None
    a_tilde: np.ndarray | None
    options: Options


def _fmt(value: float) -> str:
    return "%.17g" % float(value)


def _require(data: dict, key: str):
    if key not in data:
        raise InputError(f"problem file is missing required field '{key}'")
    return data[key]


def _as_int(value, key: str) -> int:
    if not isinstance(value, int) or isinstance(value, bool):
        raise InputError(f"field '{key}' must be an integer")
    return value


def _matrix(data, key: str, rows: int, cols: int) -> np.ndarray:
    try:
        m = np.array(data, dtype=float)
    except (TypeError, ValueError) as err:
        raise InputError(f"field '{key}' is not a numeric matrix: {err}") from None
    if m.ndim != 2 or m.shape != (rows, cols):
        raise InputError(
            f"field '{key}' must be a {rows}x{cols} matrix of row arrays"
        )
    if not np.all(np.isfinite(m)):
        raise InputError(f"field '{key}' contains non-finite entries")
    return m


KNOWN_FIELDS = {"n", "m", "p", "A", "B", "C", "K", "A_tilde", "tau0", "epsilon", "options"}
KNOWN_OPTIONS = {"max_iter", "stop_tol", "horizon"}


def parse_problem(data: dict) -> Problem:
    """Validate a decoded problem-file dictionary."""
    if not isinstance(data, dict):
        raise InputError("problem file must contain a JSON object")
    unknown = set(data) - KNOWN_FIELDS
    if unknown:
        raise InputError(f"unknown field(s): {', '.join(sorted(unknown))}")

    n = _as_int(_require(data, "n"), "n")
    p = _as_int(_require(data, "p"), "p")
    if n < 1 or p < 1:
        raise InputError("fields 'n' and 'p' must be positive")

    a = _matrix(_require(data, "A"), "A", n, n)
    c = _matrix(_require(data, "C"), "C", p, n)

    b = None
    m = None
    if data.get("B") is not None:
        if "m" not in data:
            raise InputError("field 'm' is required when 'B' is present")
        m = _as_int(data["m"], "m")
        if m < 1:
            raise InputError("field 'm' must be positive")
        b = _matrix(data["B"], "B", n, m)
    elif data.get("m") is not None:
        raise InputError("field 'm' is given but 'B' is missing")

    tau0 = np.array(_require(data, "tau0"), dtype=float)
    if tau0.ndim != 1 or tau0.shape[0] != n:
        raise InputError(f"field 'tau0' must be a flat array of length {n}")

    epsilon = _require(data, "epsilon")
    if not isinstance(epsilon, (int, float)) or isinstance(epsilon, bool):
        raise InputError("field 'epsilon' must be a number")
    if not math.isfinite(float(epsilon)) or float(epsilon) <= 0:
        raise InputError("field 'epsilon' must be strictly positive")

    gain = None
    if data.get("K") is not None:
        if b is None:
            raise InputError("field 'K' requires 'B' and 'm'")
        gain = Gain(_matrix(data["K"], "K", m, n))

    a_tilde = None
    if data.get("A_tilde") is not None:
        a_tilde = _matrix(data["A_tilde"], "A_tilde", n, n)

    if gain is None and a_tilde is None:
        raise InputError("one of 'K' or 'A_tilde' is required")

    try:
        system = SystemSpec(a, b, c, tau0, float(epsilon))
    except ValueError as err:
        raise InputError(str(err)) from None

    if gain is not None and a_tilde is not None:
        gap = float(np.max(np.abs(closed_loop(system, gain) - a_tilde)))
        if gap > CROSS_CHECK_TOL:
            raise InputError(
                "fields 'K' and 'A_tilde' disagree: max |A + B K - A_tilde| "
                f"= {gap:.3e} exceeds {CROSS_CHECK_TOL:g}"
            )

    raw_opts = data.get("options", {})
    if not isinstance(raw_opts, dict):
        raise InputError("field 'options' must be an object")
    unknown = set(raw_opts) - KNOWN_OPTIONS
    if unknown:
        raise InputError(f"unknown option(s): {', '.join(sorted(unknown))}")
    max_iter = raw_opts.get("max_iter", 200)
    stop_tol = raw_opts.get("stop_tol", 1e-9)
    horizon = raw_opts.get("horizon", 4 * n)
    max_iter = _as_int(max_iter, "options.max_iter")
    horizon = _as_int(horizon, "options.horizon")
    if max_iter < 1:
        raise InputError("option 'max_iter' must be at least 1")
    if not isinstance(stop_tol, (int, float)) or float(stop_tol) < 0:
        raise InputError("option 'stop_tol' must be a nonnegative number")
    if horizon < n:
        raise InputError(f"option 'horizon' must be at least n = {n}")

    return Problem(
        system=system,
        gain=gain,
        a_tilde=a_tilde,
        options=Options(max_iter=max_iter, stop_tol=float(stop_tol), horizon=horizon),
    )


def load_problem(path: str) -> Problem:
    """Read and validate a problem file."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as err:
        raise InputError(f"cannot read problem file: {err}") from None
    except json.JSONDecodeError as err:
        raise InputError(f"problem file is not valid JSON: {err}") from None
    return parse_problem(data)


def problem_to_dict(problem: Problem) -> dict:
    """Serialize a problem back to the file schema (parse round-trips)."""
    sys_ = problem.system
    out: dict = {"n": sys_.n}
    if sys_.b is not None:
        out["m"] = sys_.b.shape[1]
    out["p"] = sys_.p
    out["A"] = sys_.a.tolist()
    if sys_.b is not None:
        out["B"] = sys_.b.tolist()
    out["C"] = sys_.c.tolist()
    if problem.gain is not None:
        out["K"] = problem.gain.k.tolist()
    if problem.a_tilde is not None:
        out["A_tilde"] = problem.a_tilde.tolist()
    out["tau0"] = sys_.tau0.tolist()
    out["epsilon"] = sys_.epsilon
    opts = problem.options
    out["options"] = {
        "max_iter": opts.max_iter,
        "stop_tol": opts.stop_tol,
        "horizon": opts.horizon,
    }
    return out


def _run_determine(problem: Problem, max_iter: int, stop_tol: float) -> CapacitySet:
    if problem.gain is not None:
        return determine(
            problem.system, problem.gain, max_iter=max_iter, stop_tol=stop_tol
        )
    return determine(
        problem.system, a_tilde=problem.a_tilde, max_iter=max_iter, stop_tol=stop_tol
    )


def _values_json(values: tuple[float, ...]) -> list:
    return [None if math.isinf(v) else v for v in values]


def _values_text(values: tuple[float, ...]) -> str:
    return " ".join("unbounded" if math.isinf(v) else _fmt(v) for v in values)


def _capacity_json(cap: CapacitySet) -> dict:
    return {
        "status": cap.status,
        "k0": cap.k0,
        "epsilon": cap.epsilon,
        "constraint_rows": cap.constraint_rows.tolist(),
        "iterations": [
            {"step": rec.step, "values": _values_json(rec.values), "stopped": rec.stopped}
            for rec in cap.history
        ],
    }


def cmd_determine(args) -> int:
    problem = load_problem(args.file)
    opts = problem.options
    max_iter = opts.max_iter if args.max_iter is None else args.max_iter
    stop_tol = opts.stop_tol if args.stop_tol is None else args.stop_tol
    cap = _run_determine(problem, max_iter, stop_tol)
    if args.json:
        print(json.dumps(_capacity_json(cap), indent=2))
    else:
        print(f"status: {cap.status}")
        print(f"k0: {'-' if cap.k0 is None else cap.k0}")
        print(f"epsilon: {_fmt(cap.epsilon)}")
        print("constraint rows:")
        for row in cap.constraint_rows:
            print("  " + " ".join(_fmt(v) for v in row))
        print("iteration maxima:")
        for rec in cap.history:
            print(f"  k={rec.step}: {_values_text(rec.values)}")
    return EXIT_OK if cap.status == DETERMINED else EXIT_LIMIT


def _report_json(report: SensitivityReport) -> dict:
    viol = report.alpha_violation
    return {
        "admissible": report.admissible,
        "certified": report.capacity.status == DETERMINED,
        "alpha_tolerable": report.alpha_tolerable,
        "alpha_violation": None
        if viol is None
        else {"step": viol.step, "constraint": viol.constraint, "magnitude": viol.magnitude},
        "beta_violations": [
            {
                "index": bv.index,
                "first_violation_step": bv.first_violation_step,
                "magnitude": bv.magnitude,
            }
            for bv in report.beta_violations
        ],
        "capacity": {
            "status": report.capacity.status,
            "k0": report.capacity.k0,
            "epsilon": report.capacity.epsilon,
        },
    }


def cmd_check_gain(args) -> int:
    problem = load_problem(args.file)
    opts = problem.options
    max_iter = opts.max_iter if args.max_iter is None else args.max_iter
    stop_tol = opts.stop_tol if args.stop_tol is None else args.stop_tol
    if problem.gain is not None:
        report = check_gain(
            problem.system, problem.gain, max_iter=max_iter, stop_tol=stop_tol
        )
    else:
        report = check_gain(
            problem.system, a_tilde=problem.a_tilde, max_iter=max_iter, stop_tol=stop_tol
        )
    cap = report.capacity
    if args.json:
        print(json.dumps(_report_json(report), indent=2))
    else:
        print(f"admissible: {'yes' if report.admissible else 'no'}")
        if report.alpha_tolerable:
            print("nominal start (alpha direction): inside the band")
        else:
            v = report.alpha_violation
            print(
                "nominal start (alpha direction): leaves the band at step "
                f"{v.step}, constraint {v.constraint}, magnitude {_fmt(v.magnitude)}"
            )
        if report.beta_violations:
            for bv in report.beta_violations:
                print(
                    f"offset direction e{bv.index}: leaves the band at step "
                    f"{bv.first_violation_step}, magnitude {_fmt(bv.magnitude)}"
                )
        else:
            print("offset directions: all inside the band")
        if cap.status == DETERMINED:
            print(f"capacity set: determined, k0 = {cap.k0}")
        else:
            print(
                f"capacity set: iteration limit after {len(cap.history)} steps; "
                "verdict uses the outer truncation"
            )
    has_violation = (not report.alpha_tolerable) or report.beta_violations
    if has_violation:
        return EXIT_INADMISSIBLE
    if cap.status != DETERMINED:
        return EXIT_LIMIT
    return EXIT_OK


def cmd_analyze(args) -> int:
    problem = load_problem(args.file)
    if problem.gain is not None:
        rep = analyze(problem.system, problem.gain, horizon=problem.options.horizon)
    else:
        rep = analyze(
            problem.system, a_tilde=problem.a_tilde, horizon=problem.options.horizon
        )
    if args.json:
        print(
            json.dumps(
                {
                    "controllable": rep.controllable,
                    "observable": rep.observable,
                    "spectral_radius": rep.spectral_radius,
                    "inf_norm": rep.inf_norm,
                    "norm_guarantee": rep.norm_guarantee,
                    "structural_guarantee": rep.structural_guarantee,
                    "decay_index": rep.decay_index,
                },
                indent=2,
            )
        )
    else:
        if rep.controllable is None:
            print("controllable: not evaluated (no input map in file)")
        else:
            print(f"controllable: {'yes' if rep.controllable else 'no'}")
        print(f"observable: {'yes' if rep.observable else 'no'}")
        print(f"spectral radius: {_fmt(rep.spectral_radius)}")
        print(f"induced max-norm: {_fmt(rep.inf_norm)}")
        print(f"norm guarantee (contraction): {'yes' if rep.norm_guarantee else 'no'}")
        print(
            "structural guarantee (controllable + observable + stable): "
            f"{'yes' if rep.structural_guarantee else 'no'}"
        )
        if rep.decay_index is None:
            print("output-row decay index: none within horizon")
        else:
            print(f"output-row decay index: {rep.decay_index}")
    return EXIT_OK


def _svg(raster: np.ndarray, xs: np.ndarray, ys: np.ndarray, tau0: np.ndarray) -> str:
    """Self-contained SVG: member cells filled, key vectors marked."""
    size = 640.0
    margin = 40.0
    x_lo, x_hi = float(xs[0]), float(xs[-1])
    y_lo, y_hi = float(ys[0]), float(ys[-1])

    def to_px(x: float, y: float) -> tuple[float, float]:
        px = margin + (x - x_lo) / (x_hi - x_lo) * size
        py = margin + (y_hi - y) / (y_hi - y_lo) * size
        return px, py

    grid = len(xs)
    cell_w = size / (grid - 1)
    cell_h = size / (grid - 1)
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size + 2 * margin:.0f}" '
        f'height="{size + 2 * margin:.0f}" '
        f'viewBox="0 0 {size + 2 * margin:.0f} {size + 2 * margin:.0f}">',
        f'<rect x="0" y="0" width="{size + 2 * margin:.0f}" '
        f'height="{size + 2 * margin:.0f}" fill="white"/>',
        f'<rect x="{margin}" y="{margin}" width="{size}" height="{size}" '
        'fill="none" stroke="#888"/>',
    ]
    for iy in range(grid):
        for ix in range(grid):
            if raster[iy, ix]:
                px, py = to_px(float(xs[ix]), float(ys[iy]))
                parts.append(
                    f'<rect x="{px - cell_w / 2:.2f}" y="{py - cell_h / 2:.2f}" '
                    f'width="{cell_w:.2f}" height="{cell_h:.2f}" fill="#7fbf7f"/>'
                )
    markers = [("tau0", float(tau0[0]), float(tau0[1])), ("e1", 1.0, 0.0), ("e2", 0.0, 1.0)]
    for label, mx, my in markers:
        if x_lo <= mx <= x_hi and y_lo <= my <= y_hi:
            px, py = to_px(mx, my)
            parts.append(f'<circle cx="{px:.2f}" cy="{py:.2f}" r="4" fill="#222"/>')
            parts.append(
                f'<text x="{px + 6:.2f}" y="{py - 6:.2f}" font-size="14" '
                f'font-family="sans-serif" fill="#222">{label}</text>'
            )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_region(args) -> int:
    problem = load_problem(args.file)
    if problem.system.n != 2:
        raise InputError(
            f"region rendering requires a two-state system, file has n = {problem.system.n}"
        )
    if args.grid < 2:
        raise InputError("--grid must be at least 2")
    if not (args.xmin < args.xmax) or not (args.ymin < args.ymax):
        raise InputError("ranges must satisfy xmin < xmax and ymin < ymax")
    opts = problem.options
    max_iter = opts.max_iter if args.max_iter is None else args.max_iter
    stop_tol = opts.stop_tol if args.stop_tol is None else args.stop_tol
    cap = _run_determine(problem, max_iter, stop_tol)
    raster = region_sample(cap, (args.xmin, args.xmax), (args.ymin, args.ymax), args.grid)
    xs = np.linspace(args.xmin, args.xmax, args.grid)
    ys = np.linspace(args.ymin, args.ymax, args.grid)
    if args.json:
        print(
            json.dumps(
                {
                    "status": cap.status,
                    "xs": xs.tolist(),
                    "ys": ys.tolist(),
                    "raster": raster.astype(int).tolist(),
                },
                indent=2,
            )
        )
    else:
        lines = ["x,y,inside"]
        for iy, y in enumerate(ys):
            for ix, x in enumerate(xs):
                lines.append(f"{_fmt(x)},{_fmt(y)},{int(raster[iy, ix])}")
        print("\n".join(lines))
    if args.svg:
        with open(args.svg, "w", encoding="utf-8") as fh:
            fh.write(_svg(raster, xs, ys, problem.system.tau0))
    return EXIT_OK if cap.status == DETERMINED else EXIT_LIMIT


def cmd_simulate(args) -> int:
    problem = load_problem(args.file)
    try:
        beta = [float(part) for part in args.beta.split(",")] if args.beta else []
    except ValueError:
        raise InputError(f"--beta must be comma-separated numbers, got '{args.beta}'")
    n = problem.system.n
    if len(beta) != n:
        raise InputError(f"--beta must have {n} components, got {len(beta)}")
    if args.steps < 0:
        raise InputError("--steps must be nonnegative")
    if problem.gain is not None:
        traj = simulate(
            problem.system,
            problem.gain,
            alpha=args.alpha,
            beta=beta,
            steps=args.steps,
        )
    else:
        traj = simulate(
            problem.system,
            a_tilde=problem.a_tilde,
            alpha=args.alpha,
            beta=beta,
            steps=args.steps,
        )
    p = problem.system.p
    if args.json:
        print(
            json.dumps(
                {
                    "states": traj.states.tolist(),
                    "inputs": None if traj.inputs is None else traj.inputs.tolist(),
                    "outputs": traj.outputs.tolist(),
                },
                indent=2,
            )
        )
        return EXIT_OK
    header = ["step"] + [f"x{i + 1}" for i in range(n)]
    if traj.inputs is not None:
        header += [f"u{i + 1}" for i in range(traj.inputs.shape[1])]
    header += [f"y{i + 1}" for i in range(p)]
    lines = [",".join(header)]
    for i in range(traj.states.shape[0]):
        row = [str(i)] + [_fmt(v) for v in traj.states[i]]
        if traj.inputs is not None:
            row += [_fmt(v) for v in traj.inputs[i]]
        row += [_fmt(v) for v in traj.outputs[i]]
        lines.append(",".join(row))
    print("\n".join(lines))
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad usage; the exit-code contract wants 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_INPUT)


def _add_common(sub):
    sub.add_argument("file", help="problem file (JSON)")
    sub.add_argument("--json", action="store_true", help="emit JSON instead of text")
    sub.add_argument(
        "--max-iter", type=int, default=None, help="override the file's iteration cap"
    )
    sub.add_argument(
        "--stop-tol", type=float, default=None, help="override the file's stop tolerance"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="gaincap",
        description="Capacity sets of state-feedback gains under output bands.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    det = commands.add_parser("determine", help="run the fixpoint search")
    _add_common(det)
    det.set_defaults(func=cmd_determine)

    chk = commands.add_parser("check-gain", help="decide gain admissibility")
    _add_common(chk)
    chk.set_defaults(func=cmd_check_gain)

    ana = commands.add_parser("analyze", help="structural precondition report")
    _add_common(ana)
    ana.set_defaults(func=cmd_analyze)

    reg = commands.add_parser("region", help="rasterize a planar capacity set")
    _add_common(reg)
    reg.add_argument("--xmin", type=float, required=True)
    reg.add_argument("--xmax", type=float, required=True)
    reg.add_argument("--ymin", type=float, required=True)
    reg.add_argument("--ymax", type=float, required=True)
    reg.add_argument("--grid", type=int, required=True, help="lattice points per axis")
    reg.add_argument("--svg", default=None, help="also write an SVG to this path")
    reg.set_defaults(func=cmd_region)

    sim = commands.add_parser("simulate", help="propagate a disturbed start")
    _add_common(sim)
    sim.add_argument("--alpha", type=float, required=True, help="nominal-state scale")
    sim.add_argument("--beta", required=True, help="comma-separated offset components")
    sim.add_argument("--steps", type=int, required=True, help="number of steps")
    sim.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as err:
        print(f"gaincap: error: {err}", file=sys.stderr)
        return EXIT_INPUT
    except DeterminationError as err:
        print(
            f"gaincap: LP failure at step {err.step}, constraint {err.constraint}: {err}",
            file=sys.stderr,
        )
        return EXIT_INPUT
    except EigenConvergenceError as err:
        print(f"gaincap: eigenvalue computation failed: {err}", file=sys.stderr)
        return EXIT_INPUT


def console_main() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    console_main()
