"""Capacity sets of state-feedback gains under output bands.

A plant ``x_{i+1} = A x_i + B u_i``, ``y_i = C x_i`` is closed with
``u_i = K x_i``, giving ``x_{i+1} = (A + B K) x_i``.  The initial state is a
scaled nominal vector plus an offset, ``x_0 = alpha * tau0 + beta``.  The
*capacity set* of the gain collects every initial state whose entire output
history stays inside the band ``|y_i|_inf <= epsilon``:

    Theta = { x : |C (A+BK)^i x|_inf <= epsilon  for all i >= 0 }.

Truncating the history at step k gives a shrinking family of polyhedra
``Theta_k``; as soon as ``Theta_{k+1} = Theta_k`` the family has converged
and ``Theta`` equals the finite polyhedron ``Theta_k``.  :func:`determine`
detects that fixpoint by linear programming: the band at step k+1 is already
implied exactly when each signed output row at step k+1 has maximum at most
epsilon over ``Theta_k``.  The smallest such k is the determination index.

Because trajectories are linear in (alpha, beta), the gain tolerates *every*
disturbance pair at once exactly when tau0 and each canonical basis vector
lie in Theta; :func:`check_gain` reduces admissibility to those n+1
membership tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    as_matrix,
    as_vector,
    controllability_matrix,
    induced_inf_norm,
    mat_mul,
    observability_matrix,
    rank,
    spectral_radius,
)
from .lp import INFEASIBLE, OPTIMAL, UNBOUNDED, LpProblem, SimplexBudgetError, solve

__all__ = [
    "DETERMINED",
    "ITERATION_LIMIT",
    "SystemSpec",
    "Gain",
    "IterationRecord",
    "CapacitySet",
    "Violation",
    "MembershipResult",
    "BetaViolation",
    "SensitivityReport",
    "AnalysisReport",
    "Trajectory",
    "DeterminationError",
    "closed_loop",
    "sensitivity_rows",
    "determine",
    "stop_test",
    "membership",
    "check_gain",
    "analyze",
    "simulate",
    "region_sample",
]

DETERMINED = "determined"
ITERATION_LIMIT = "iteration_limit"

MEMBERSHIP_TOL = 1e-12


class DeterminationError(RuntimeError):
    """The LP solver failed inside the determination loop.

    Carries the step ``k`` and the 1-based signed constraint index ``s``
    that was being maximized when the solver gave up.
    """

    def __init__(self, message: str, step: int, constraint: int):
        super().__init__(message)
        self.step = step
        self.constraint = constraint


@dataclass(frozen=True)
class SystemSpec:
    """Plant data: dynamics ``a``, input map ``b``, output map ``c``, the
    nominal initial state ``tau0``, and the output band half-width
    ``epsilon``.  ``b`` may be None when only the closed loop is known."""

    a: np.ndarray
    b: np.ndarray | None
    c: np.ndarray
    tau0: np.ndarray
    epsilon: float

    def __post_init__(self):
        a = as_matrix(self.a, "a")
        if a.shape[0] != a.shape[1]:
            raise ValueError(f"a must be square, got {a.shape[0]}x{a.shape[1]}")
        n = a.shape[0]
        b = None
        if self.b is not None:
            b = as_matrix(self.b, "b")
            if b.shape[0] != n:
                raise ValueError(f"b has {b.shape[0]} rows, expected {n}")
        c = as_matrix(self.c, "c")
        if c.shape[1] != n:
            raise ValueError(f"c has {c.shape[1]} columns, expected {n}")
        tau0 = as_vector(self.tau0, "tau0")
        if tau0.shape[0] != n:
            raise ValueError(f"tau0 has length {tau0.shape[0]}, expected {n}")
        eps = float(self.epsilon)
        if not np.isfinite(eps) or eps <= 0:
            raise ValueError("epsilon must be a positive finite real")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "tau0", tau0)
        object.__setattr__(self, "epsilon", eps)

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def m(self) -> int | None:
        return None if self.b is None else self.b.shape[1]

    @property
    def p(self) -> int:
        return self.c.shape[0]


@dataclass(frozen=True)
class Gain:
    """State-feedback matrix for ``u_i = k x_i``."""

    k: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "k", as_matrix(self.k, "k"))


@dataclass(frozen=True)
class IterationRecord:
    """One pass of the determination loop.

    ``values[s-1]`` is the LP maximum of signed output row s at step
    ``step + 1`` over the step-``step`` truncation; unbounded programs are
    recorded as ``inf``.
    """

    step: int
    values: tuple[float, ...]
    stopped: bool


@dataclass(frozen=True)
class CapacitySet:
    """Finite description of the capacity set (or of its best truncation).

    ``constraint_rows`` stacks the output rows ``C @ a_tilde**i`` for
    i = 0..k0 (0..max_iter-1 when the loop hit its limit); membership means
    every row satisfies ``|row . x| <= epsilon``.  ``status`` is
    ``"determined"`` or ``"iteration_limit"``; ``k0`` is None in the latter
    case and the rows describe a superset of the true capacity set.
    """

    a_tilde: np.ndarray
    constraint_rows: np.ndarray
    epsilon: float
    output_dim: int
    k0: int | None
    status: str
    history: tuple[IterationRecord, ...] = field(repr=False)

    @property
    def steps_kept(self) -> int:
        """Number of time steps represented in ``constraint_rows``."""
        return self.constraint_rows.shape[0] // self.output_dim


@dataclass(frozen=True)
class Violation:
    """First broken band constraint: time index, 1-based signed constraint
    number (2j-1 for +row j, 2j for -row j), and the attained magnitude."""

    step: int
    constraint: int
    magnitude: float


@dataclass(frozen=True)
class MembershipResult:
    member: bool
    certified: bool
    violation: Violation | None


@dataclass(frozen=True)
class BetaViolation:
    """Offset direction e_j that escapes the band."""

    index: int
    first_violation_step: int
    magnitude: float


@dataclass(frozen=True)
class SensitivityReport:
    """Outcome of the gain admissibility test.

    ``alpha_tolerable`` reports tau0's membership, ``beta_violations`` lists
    every basis direction that breaks the band, and ``admissible`` is their
    conjunction.  ``capacity`` keeps the set the verdict was computed on.
    """

    alpha_tolerable: bool
    alpha_violation: Violation | None
    beta_violations: tuple[BetaViolation, ...]
    admissible: bool
    capacity: CapacitySet


@dataclass(frozen=True)
class AnalysisReport:
    """Structural preconditions that guarantee the determination loop stops.

    ``controllable`` is None when no input map was supplied.  The norm
    guarantee (contraction in the max norm) and the structural guarantee
    (controllable + observable + spectral radius below one) are each
    sufficient on their own.  ``decay_index`` is the first step from which
    every later output-row block within the horizon has induced max-norm at
    most epsilon; it is only reported for spectrally stable loops.
    """

    controllable: bool | None
    observable: bool
    spectral_radius: float
    inf_norm: float
    norm_guarantee: bool
    structural_guarantee: bool
    decay_index: int | None


@dataclass(frozen=True)
class Trajectory:
    """Closed-loop run: states (steps+1) x n, inputs (steps+1) x m when a
    gain is known, outputs (steps+1) x p."""

    states: np.ndarray
    inputs: np.ndarray | None
    outputs: np.ndarray


def closed_loop(sys: SystemSpec, gain: Gain) -> np.ndarray:
    """Closed-loop dynamics ``a + b @ k``."""
    if sys.b is None:
        raise ValueError("system has no input map b; supply a_tilde directly")
    k = gain.k
    if k.shape != (sys.b.shape[1], sys.n):
        raise ValueError(
            f"gain is {k.shape[0]}x{k.shape[1]}, expected {sys.b.shape[1]}x{sys.n}"
        )
    return sys.a + mat_mul(sys.b, k)


def _resolve_a_tilde(sys: SystemSpec, gain: Gain | None, a_tilde) -> np.ndarray:
    if (gain is None) == (a_tilde is None):
        raise ValueError("provide exactly one of gain and a_tilde")
    if gain is not None:
        return closed_loop(sys, gain)
    at = as_matrix(a_tilde, "a_tilde")
    if at.shape != (sys.n, sys.n):
        raise ValueError(f"a_tilde must be {sys.n}x{sys.n}, got {at.shape[0]}x{at.shape[1]}")
    return at


def sensitivity_rows(sys: SystemSpec, a_tilde, horizon: int) -> np.ndarray:
    """Stack the output rows ``c @ a_tilde**i`` for i = 0..horizon.

    Row block i dotted with tau0 gives the per-step sensitivity of the
    output to the initial-state scale; dotted with e_j it gives the
    sensitivity to the j-th offset component.  Blocks are built by row
    propagation (block_{i+1} = block_i @ a_tilde), never by matrix powers.
    """
    at = as_matrix(a_tilde, "a_tilde")
    if int(horizon) < 0:
        raise ValueError("horizon must be nonnegative")
    blocks = [sys.c]
    for _ in range(int(horizon)):
        blocks.append(blocks[-1] @ at)
    out = np.vstack(blocks)
    out.setflags(write=False)
    return out


def _signed_maxima(
    constraint_stack: np.ndarray, objective_block: np.ndarray, epsilon: float, step: int
) -> list[float]:
    """LP maxima of every signed row of ``objective_block`` over the band
    polyhedron of ``constraint_stack``; unbounded programs yield inf."""
    g = np.vstack([constraint_stack, -constraint_stack])
    h = np.full(g.shape[0], epsilon)
    values = []
    for j in range(objective_block.shape[0]):
        for sign in (1.0, -1.0):
            s = 2 * j + 1 if sign > 0 else 2 * j + 2
            try:
                outcome = solve(LpProblem(sign * objective_block[j], g, h))
            except SimplexBudgetError as err:
                raise DeterminationError(
                    f"LP solver gave up at step {step}, signed constraint {s}: {err}",
                    step=step,
                    constraint=s,
                ) from err
            if outcome.status == UNBOUNDED:
                values.append(float("inf"))
            elif outcome.status == OPTIMAL:
                values.append(float(outcome.value))
            else:
                # the origin satisfies every band constraint, so an
                # infeasible report can only be a solver defect
                raise DeterminationError(
                    f"band polyhedron reported {INFEASIBLE} at step {step}, "
                    f"signed constraint {s}",
                    step=step,
                    constraint=s,
                )
    return values


def determine(
    sys: SystemSpec,
    gain: Gain | None = None,
    *,
    a_tilde=None,
    max_iter: int = 200,
    stop_tol: float = 1e-9,
) -> CapacitySet:
    """Run the fixpoint search for the capacity set.

    At each step k the band constraints through step k are held fixed and
    each signed output row at step k+1 is maximized.  When every maximum is
    at most ``epsilon + stop_tol`` the truncation has converged: k is the
    determination index and the stacked rows describe the capacity set
    exactly.  An unbounded subproblem or a larger maximum advances k.  After
    ``max_iter`` steps the search stops with status ``"iteration_limit"``
    and the accumulated rows describe an outer truncation only.
    """
    at = _resolve_a_tilde(sys, gain, a_tilde)
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    if stop_tol < 0:
        raise ValueError("stop_tol must be nonnegative")
    eps = sys.epsilon
    blocks = [sys.c]
    history: list[IterationRecord] = []
    for k in range(int(max_iter)):
        objective = blocks[-1] @ at
        stack = np.vstack(blocks)
        values = _signed_maxima(stack, objective, eps, k)
        stopped = all(v <= eps + stop_tol for v in values)
        history.append(IterationRecord(k, tuple(values), stopped))
        if stopped:
            stack.setflags(write=False)
            return CapacitySet(
                a_tilde=at,
                constraint_rows=stack,
                epsilon=eps,
                output_dim=sys.p,
                k0=k,
                status=DETERMINED,
                history=tuple(history),
            )
        blocks.append(objective)
    stack = np.vstack(blocks[:-1])
    stack.setflags(write=False)
    return CapacitySet(
        a_tilde=at,
        constraint_rows=stack,
        epsilon=eps,
        output_dim=sys.p,
        k0=None,
        status=ITERATION_LIMIT,
        history=tuple(history),
    )


def stop_test(
    cap: CapacitySet, objective_step: int, *, stop_tol: float = 1e-9
) -> tuple[bool, tuple[float, ...]]:
    """Re-run the convergence test of a capacity set at a chosen step.

    Maximizes each signed output row at ``objective_step`` over the set's
    stored constraints and reports whether all maxima stay within
    ``epsilon + stop_tol``.  For a determined set this must pass at every
    step beyond k0 — the fixpoint, once reached, persists.
    """
    if objective_step < 0:
        raise ValueError("objective_step must be nonnegative")
    block = cap.constraint_rows[: cap.output_dim]
    for _ in range(int(objective_step)):
        block = block @ cap.a_tilde
    values = _signed_maxima(cap.constraint_rows, block, cap.epsilon, objective_step)
    stopped = all(v <= cap.epsilon + stop_tol for v in values)
    return stopped, tuple(values)


def membership(cap: CapacitySet, x) -> MembershipResult:
    """Test whether a state lies in the capacity set.

    Reports the earliest violated band constraint when outside.  For an
    iteration-limited set the rows only bound the true set from outside, so
    a pass is marked uncertified — but any violation is conclusive.
    """
    x = as_vector(x, "x")
    if x.shape[0] != cap.constraint_rows.shape[1]:
        raise ValueError(
            f"x has length {x.shape[0]}, expected {cap.constraint_rows.shape[1]}"
        )
    certified = cap.status == DETERMINED
    products = cap.constraint_rows @ x
    limit = cap.epsilon + MEMBERSHIP_TOL
    p = cap.output_dim
    for idx, value in enumerate(products):
        if abs(value) > limit:
            step, j = divmod(idx, p)
            s = 2 * j + 1 if value > 0 else 2 * j + 2
            return MembershipResult(
                member=False,
                certified=certified,
                violation=Violation(step=step, constraint=s, magnitude=float(abs(value))),
            )
    return MembershipResult(member=True, certified=certified, violation=None)


def check_gain(
    sys: SystemSpec,
    gain: Gain | None = None,
    *,
    a_tilde=None,
    max_iter: int = 200,
    stop_tol: float = 1e-9,
) -> SensitivityReport:
    """Decide whether the gain keeps every disturbed start inside the band.

    By linearity the output history of ``x_0 = alpha tau0 + beta`` is the
    alpha-scaled history of tau0 plus the beta-weighted histories of the
    basis vectors, so the gain tolerates all disturbances exactly when tau0
    and each e_j belong to the capacity set.
    """
    cap = determine(sys, gain, a_tilde=a_tilde, max_iter=max_iter, stop_tol=stop_tol)
    alpha_res = membership(cap, sys.tau0)
    beta_violations = []
    n = sys.n
    for j in range(n):
        res = membership(cap, np.eye(n)[j])
        if not res.member:
            beta_violations.append(
                BetaViolation(
                    index=j + 1,
                    first_violation_step=res.violation.step,
                    magnitude=res.violation.magnitude,
                )
            )
    return SensitivityReport(
        alpha_tolerable=alpha_res.member,
        alpha_violation=alpha_res.violation,
        beta_violations=tuple(beta_violations),
        admissible=alpha_res.member and not beta_violations,
        capacity=cap,
    )


def analyze(
    sys: SystemSpec,
    gain: Gain | None = None,
    *,
    a_tilde=None,
    horizon: int | None = None,
) -> AnalysisReport:
    """Check the structural conditions under which determination is assured.

    Either a max-norm contraction (induced norm of the closed loop below
    one) or the combination controllable + observable + spectral radius
    below one guarantees the fixpoint search stops.  When the loop is
    spectrally stable the output rows decay; ``decay_index`` is the first
    step from which every block through the horizon already fits the band.
    """
    at = _resolve_a_tilde(sys, gain, a_tilde)
    if horizon is None:
        horizon = 4 * sys.n
    if horizon < sys.n:
        raise ValueError(f"horizon must be at least n = {sys.n}")
    controllable = None
    if sys.b is not None:
        controllable = rank(controllability_matrix(sys.a, sys.b)) == sys.n
    observable = rank(observability_matrix(at, sys.c)) == sys.n
    radius = spectral_radius(at)
    norm = induced_inf_norm(at)
    decay_index = None
    if radius < 1.0:
        norms = []
        block = sys.c
        for _ in range(int(horizon) + 1):
            norms.append(induced_inf_norm(block))
            block = block @ at
        idx = None
        for i in range(len(norms) - 1, -1, -1):
            if norms[i] > sys.epsilon:
                break
            idx = i
        decay_index = idx
    return AnalysisReport(
        controllable=controllable,
        observable=observable,
        spectral_radius=radius,
        inf_norm=norm,
        norm_guarantee=norm < 1.0,
        structural_guarantee=bool(controllable) and observable and radius < 1.0,
        decay_index=decay_index,
    )


def simulate(
    sys: SystemSpec,
    gain: Gain | None = None,
    *,
    a_tilde=None,
    alpha: float,
    beta,
    steps: int,
) -> Trajectory:
    """Propagate ``x_0 = alpha tau0 + beta`` through the closed loop.

    When a gain is supplied the realized inputs ``u_i = k x_i`` are
    recorded; with only the closed-loop matrix the inputs are None.  Both
    may be given together (a_tilde drives the dynamics, the gain reports
    inputs).
    """
    if gain is None and a_tilde is None:
        raise ValueError("provide gain or a_tilde")
    if a_tilde is None:
        at = closed_loop(sys, gain)
    else:
        at = as_matrix(a_tilde, "a_tilde")
        if at.shape != (sys.n, sys.n):
            raise ValueError(
                f"a_tilde must be {sys.n}x{sys.n}, got {at.shape[0]}x{at.shape[1]}"
            )
    beta = as_vector(beta, "beta")
    if beta.shape[0] != sys.n:
        raise ValueError(f"beta has length {beta.shape[0]}, expected {sys.n}")
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    alpha = float(alpha)
    states = np.empty((int(steps) + 1, sys.n))
    states[0] = alpha * sys.tau0 + beta
    for i in range(int(steps)):
        states[i + 1] = at @ states[i]
    outputs = states @ sys.c.T
    inputs = None
    if gain is not None:
        if gain.k.shape[1] != sys.n:
            raise ValueError(f"gain has {gain.k.shape[1]} columns, expected {sys.n}")
        inputs = states @ gain.k.T
        inputs.setflags(write=False)
    states.setflags(write=False)
    outputs.setflags(write=False)
    return Trajectory(states=states, inputs=inputs, outputs=outputs)


def region_sample(cap: CapacitySet, x_range, y_range, grid: int) -> np.ndarray:
    """Rasterize a planar capacity set over a rectangle.

    Returns a boolean array indexed [row, column] = [y index, x index] with
    both axes sampled on ``grid`` evenly spaced points, ranges inclusive.
    """
    if cap.constraint_rows.shape[1] != 2:
        raise ValueError(
            "region sampling requires a two-state system, got "
            f"{cap.constraint_rows.shape[1]} states"
        )
    if int(grid) < 2:
        raise ValueError("grid must be at least 2")
    x_lo, x_hi = (float(x_range[0]), float(x_range[1]))
    y_lo, y_hi = (float(y_range[0]), float(y_range[1]))
    if not (x_lo < x_hi and y_lo < y_hi):
        raise ValueError("ranges must be nonempty intervals")
    xs = np.linspace(x_lo, x_hi, int(grid))
    ys = np.linspace(y_lo, y_hi, int(grid))
    pts = np.stack(np.meshgrid(xs, ys), axis=-1)  # (grid, grid, 2), [iy, ix]
    values = np.abs(pts @ cap.constraint_rows.T)
    raster = np.all(values <= cap.epsilon + MEMBERSHIP_TOL, axis=-1)
    raster.setflags(write=False)
    return raster
