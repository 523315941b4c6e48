"""Meshes aligned to potential breakpoints and piecewise-constant coefficients."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import exprparse
from .errors import EvaluationError, InvalidParameter, NonFiniteValue

_SNAP_TOL = 1e-12


@dataclass(frozen=True)
class Mesh:
    """Partition -1 = x_0 < x_1 < ... < x_N = 1 of the problem interval."""

    points: tuple[float, ...]

    def __post_init__(self):
        pts = self.points
        if len(pts) < 2 or pts[0] != -1.0 or pts[-1] != 1.0:
            raise InvalidParameter("mesh must run from -1 to 1")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise InvalidParameter("mesh points must be strictly increasing")

    @property
    def n_intervals(self) -> int:
        return len(self.points) - 1

    @property
    def widths(self) -> np.ndarray:
        pts = np.asarray(self.points)
        return pts[1:] - pts[:-1]

    @property
    def h(self) -> float:
        return float(np.max(self.widths))

    def interval_of(self, x: float) -> int:
        """Index i (0-based) of the interval [x_{i}, x_{i+1}) containing x."""
        idx = int(np.searchsorted(self.points, x, side="right")) - 1
        return min(max(idx, 0), self.n_intervals - 1)


def build_mesh(N: int, breakpoints=()) -> Mesh:
    """Uniform mesh of N intervals refined so every breakpoint is a mesh point.

    A breakpoint within 1e-12 of an existing point replaces that point
    bit-exactly; otherwise it is inserted and the interval count grows.
    """
    if N < 1:
        raise InvalidParameter("N must be >= 1")
    pts = [-1.0 + 2.0 * i / N for i in range(N + 1)]
    pts[0] = -1.0
    pts[-1] = 1.0
    for bp in breakpoints:
        bp = float(bp)
        if not -1.0 < bp < 1.0:
            raise InvalidParameter(f"breakpoint {bp!r} lies outside (-1, 1)")
        nearest = min(range(len(pts)), key=lambda i: abs(pts[i] - bp))
        if abs(pts[nearest] - bp) <= _SNAP_TOL:
            if 0 < nearest < len(pts) - 1:
                pts[nearest] = bp
        else:
            pts.append(bp)
            pts.sort()
    return Mesh(tuple(pts))


@dataclass(frozen=True)
class Potential:
    """A potential q(x) defined by an expression, with declared singular or
    discontinuity abscissae that must become mesh points."""

    expr: exprparse.Expr
    breakpoints: tuple[float, ...] = ()
    analytic_pieces: bool = True
    text: str = field(default="", compare=False)

    @classmethod
    def from_text(cls, text: str, breakpoints=()) -> "Potential":
        return cls(exprparse.parse(text), tuple(float(b) for b in breakpoints), text=text)

    def __call__(self, x: float) -> float:
        return exprparse.evaluate(self.expr, x)


@dataclass(frozen=True)
class PiecewiseConstantCoeff:
    """Piecewise-constant coefficient qbar, one value per mesh interval."""

    mesh: Mesh
    values: tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != self.mesh.n_intervals:
            raise InvalidParameter("one coefficient value per interval required")
        if not all(np.isfinite(self.values)):
            raise InvalidParameter("coefficient values must be finite")

    def __call__(self, x: float) -> float:
        return self.values[self.mesh.interval_of(x)]

    @property
    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))

    @property
    def min_value(self) -> float:
        return float(np.min(self.values))

    @property
    def mean_value(self) -> float:
        return float(np.mean(self.values))


def approximate_coefficient(q, mesh: Mesh, rule: str = "midpoint") -> PiecewiseConstantCoeff:
    """Piecewise-constant approximation of q on the mesh.

    midpoint:         qbar_i = q((x_{i-1} + x_i)/2)
    endpoint_average: qbar_i = (q(x_{i-1}) + q(x_i))/2
    """
    pts = mesh.points
    values = []
    try:
        if rule == "midpoint":
            for a, b in zip(pts, pts[1:]):
                values.append(q(0.5 * (a + b)))
        elif rule == "endpoint_average":
            for a, b in zip(pts, pts[1:]):
                values.append(0.5 * (q(a) + q(b)))
        else:
            raise InvalidParameter(f"unknown rule {rule!r}")
    except NonFiniteValue as exc:
        raise EvaluationError(
            f"potential is not finite at x = {exc.x!r}; declare the point as a breakpoint"
        ) from exc
    return PiecewiseConstantCoeff(mesh, tuple(float(v) for v in values))


@dataclass(frozen=True)
class DeviationEstimate:
    """Sampled sup-norm estimate of q - qbar; `reliable` is False when
    non-finite samples had to be dropped (unbounded potential)."""

    value: float
    reliable: bool
    excluded: int

    def __float__(self) -> float:
        return self.value


def sup_deviation(q, qbar: PiecewiseConstantCoeff, samples_per_interval: int = 64) -> DeviationEstimate:
    """Estimate of sup |q - qbar| by dense equispaced sampling per interval.

    Interval ends are included one-sidedly; samples where q is non-finite are
    excluded and flag the estimate unreliable.
    """
    if samples_per_interval < 16:
        raise InvalidParameter("samples_per_interval must be >= 16")
    worst = 0.0
    excluded = 0
    pts = qbar.mesh.points
    for i, (a, b) in enumerate(zip(pts, pts[1:])):
        qi = qbar.values[i]
        for x in np.linspace(a, b, samples_per_interval):
            try:
                val = q(float(x))
            except NonFiniteValue:
                excluded += 1
                continue
            worst = max(worst, abs(val - qi))
    return DeviationEstimate(worst, excluded == 0, excluded)
