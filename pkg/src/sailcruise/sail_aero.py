"""Sail force decomposition and forward-force distribution maps.

Angles inside the force formula are radians.  Map grids, lookups and
set-points are degrees.

Frame convention: heading angles are measured clockwise from the upwind
direction (0 = straight into the wind).  The sail angular coordinate phi is
measured in the same wind-fixed frame, and the force sensor frame turns
with the sail: its x axis lies along the sail chord.
"""

from __future__ import annotations

import csv
import enum
import functools
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .angles import wrap_rad

_GRID_RTOL = 1e-9


class TackSide(enum.Enum):
    RIGHT = "right"
    LEFT = "left"


class MapFormatError(ValueError):
    """Raised when a force-map CSV cannot be parsed."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True)
class SensorForce:
    """Force read by the sail-mounted sensor, in the sail frame (N)."""

    fx: float
    fy: float

    def __post_init__(self):
        if not (math.isfinite(self.fx) and math.isfinite(self.fy)):
            raise ValueError("sensor force components must be finite")

    @property
    def magnitude(self) -> float:
        return math.hypot(self.fx, self.fy)


def compute_tau(theta: float, phi: float, f: SensorForce) -> float:
    """Angle between the sail force and the heading, wrapped to (-pi, pi].

    The ``atan2(fx, fy)`` argument order is intentional.
    """
    return wrap_rad(2.5 * math.pi - theta - phi - math.atan2(f.fx, f.fy))


def forward_force(theta: float, phi: float, f: SensorForce) -> float:
    """Component of the sail force along the heading (N); negative pushes back."""
    return f.magnitude * math.cos(compute_tau(theta, phi, f))


def _uniform_step(grid: np.ndarray) -> float | None:
    """Return the grid step if strictly ascending and uniform, else None."""
    if grid.size < 2:
        return 1.0 if grid.size == 1 else None
    d = np.diff(grid)
    step = float(d[0])
    if step <= 0 or not np.allclose(d, step, rtol=_GRID_RTOL, atol=1e-12):
        return None
    return step


@dataclass(frozen=True, eq=False)
class SailForceMap:
    """Tabulated forward force over (heading angle theta, sail coordinate phi).

    ``values[i, j]`` is the forward force at ``theta_grid[i]``, ``phi_grid[j]``.
    """

    tack_side: TackSide
    theta_grid: np.ndarray
    phi_grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        theta = np.array(self.theta_grid, dtype=float)
        phi = np.array(self.phi_grid, dtype=float)
        values = np.array(self.values, dtype=float)
        if theta.ndim != 1 or phi.ndim != 1 or theta.size == 0 or phi.size == 0:
            raise ValueError("grids must be non-empty 1-D sequences")
        theta_step, phi_step = _uniform_step(theta), _uniform_step(phi)
        if theta_step is None:
            raise ValueError("theta_grid must be strictly ascending and uniform")
        if phi_step is None:
            raise ValueError("phi_grid must be strictly ascending and uniform")
        if phi[0] < 0 or phi[-1] >= 360:
            raise ValueError("phi_grid must lie in [0, 360)")
        if values.shape != (theta.size, phi.size):
            raise ValueError(
                f"values shape {values.shape} does not match grids "
                f"({theta.size}, {phi.size})"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("map values must be finite")
        for arr in (theta, phi, values):
            arr.setflags(write=False)
        object.__setattr__(self, "theta_grid", theta)
        object.__setattr__(self, "phi_grid", phi)
        object.__setattr__(self, "values", values)
        # lookups run every simulation step, so grid facts are computed once
        n = phi.size
        wraps = n > 1 and math.isclose(phi[0] + n * phi_step - 360.0, 0.0, abs_tol=1e-9)
        object.__setattr__(self, "_steps", (theta_step, phi_step, wraps))

    @property
    def theta_step(self) -> float:
        return self._steps[0]

    @property
    def phi_step(self) -> float:
        return self._steps[1]

    @property
    def phi_wraps(self) -> bool:
        """True when the phi grid covers the full circle."""
        return self._steps[2]

    def covers(self, theta: float) -> bool:
        return self._theta_in_grid(theta) is not None

    def _theta_in_grid(self, theta: float) -> float | None:
        lo, hi = self.theta_grid[0], self.theta_grid[-1]
        tol = 1e-9 * max(1.0, abs(hi))
        base = theta % 360.0
        for cand in (theta, base, base + 360.0, base - 360.0):
            if lo - tol <= cand <= hi + tol:
                return min(max(cand, lo), hi)
        return None

    def _row_weights(self, theta: float) -> tuple[int, int, float]:
        t = self._theta_in_grid(theta)
        if t is None:
            raise ValueError(
                f"theta {theta} outside map range "
                f"[{self.theta_grid[0]}, {self.theta_grid[-1]}]"
            )
        if self.theta_grid.size == 1:
            return 0, 0, 0.0
        pos = (t - self.theta_grid[0]) / self.theta_step
        i0 = min(int(math.floor(pos)), self.theta_grid.size - 2)
        return i0, i0 + 1, pos - i0

    def row(self, theta: float) -> np.ndarray:
        """Forward force over the whole phi grid at ``theta`` (linear in theta)."""
        i0, i1, w = self._row_weights(theta)
        if w == 0.0:
            return self.values[i0]
        return (1.0 - w) * self.values[i0] + w * self.values[i1]

    def value(self, theta: float, phi: float) -> float:
        """Bilinear lookup of the forward force at (theta, phi) in degrees."""
        r = self.row(theta)
        n = self.phi_grid.size
        if n == 1:
            return float(r[0])
        step = self.phi_step
        if self.phi_wraps:
            pos = ((phi - self.phi_grid[0]) % 360.0) / step
            j0 = int(math.floor(pos)) % n
            j1 = (j0 + 1) % n
        else:
            pos = (phi - self.phi_grid[0]) / step
            if pos < -1e-9 or pos > n - 1 + 1e-9:
                raise ValueError(f"phi {phi} outside map range")
            pos = min(max(pos, 0.0), n - 1.0)
            j0 = min(int(math.floor(pos)), n - 2)
            j1 = j0 + 1
        w = pos - math.floor(pos) if self.phi_wraps else pos - j0
        return float((1.0 - w) * r[j0] + w * r[j1])


def optimal_sail_angle(fmap: SailForceMap, theta: float) -> tuple[float, float]:
    """Sail coordinate (deg) giving the largest forward force at ``theta``.

    Rows are interpolated linearly in theta; the argmax is taken over the
    phi grid columns, ties going to the smallest phi.
    """
    r = fmap.row(theta)
    j = int(np.argmax(r))
    return float(fmap.phi_grid[j]), float(r[j])


def flat_plate_force(phi: float, wind_speed: float, sail_coeff: float) -> SensorForce:
    """Sensor reading for a flat-plate sail at coordinate ``phi`` (rad).

    The normal force has magnitude ``sail_coeff * wind_speed**2 * sin(alpha)**2``
    and points along the wind's component normal to the chord.
    """
    # wind blows toward -upwind; the sail-frame y axis is (sin phi, cos phi)
    wx, wy = -wind_speed, 0.0
    wn = wx * math.sin(phi) + wy * math.cos(phi)
    return SensorForce(0.0, sail_coeff * wn * abs(wn))


def _check_step(step: float, span: float, name: str) -> int:
    if not step > 0:
        raise ValueError(f"{name} must be positive")
    n = span / step
    if abs(n - round(n)) > 1e-9:
        raise ValueError(f"{name} {step} does not divide {span}")
    return int(round(n))


def build_analytic_map(
    tack_side: TackSide,
    wind_speed: float,
    theta_step: float = 1.0,
    phi_step: float = 1.0,
    sail_coeff: float = 0.5,
) -> SailForceMap:
    """Synthesize a forward-force map from a flat-plate sail model.

    The right-tack map covers headings 0..180 deg clockwise of the wind, the
    left-tack map 180..360 deg.  The left map is the exact mirror of the
    right one: ``left(-theta, -phi) == right(theta, phi)``.
    """
    if not wind_speed > 0:
        raise ValueError("wind_speed must be positive")
    nt = _check_step(theta_step, 180.0, "theta_step")
    nphi = _check_step(phi_step, 360.0, "phi_step")
    return _analytic_map(tack_side, float(wind_speed), nt, nphi, float(sail_coeff))


@functools.lru_cache(maxsize=16)
def _analytic_map(tack_side, wind_speed, nt, nphi, sail_coeff) -> SailForceMap:
    if tack_side is TackSide.LEFT:
        right = _analytic_map(TackSide.RIGHT, wind_speed, nt, nphi, sail_coeff)
        # theta -> 360 - theta reverses the rows, phi -> -phi maps column j to (n - j) % n
        cols = [(-j) % nphi for j in range(nphi)]
        return SailForceMap(TackSide.LEFT, 360.0 - right.theta_grid[::-1], right.phi_grid,
                            right.values[::-1][:, cols])
    theta_step = 180.0 / nt
    phi_step = 360.0 / nphi
    thetas = np.array([i * theta_step for i in range(nt + 1)])
    phis = np.array([j * phi_step for j in range(nphi)])
    forces = [flat_plate_force(math.radians(p), wind_speed, sail_coeff) for p in phis]
    values = np.empty((thetas.size, phis.size))
    for i, t in enumerate(thetas):
        tr = math.radians(t)
        for j, p in enumerate(phis):
            values[i, j] = forward_force(tr, math.radians(p), forces[j])
    return SailForceMap(TackSide.RIGHT, thetas, phis, values)


@dataclass(frozen=True)
class SailPlan:
    """The pair of tack-side maps consulted by the trim logic and the plant."""

    right: SailForceMap
    left: SailForceMap

    def for_heading(self, rel_heading: float) -> tuple[SailForceMap, float]:
        """Pick the map for a heading relative to upwind in (-180, 180].

        Returns the map and the heading expressed in that map's theta range.
        """
        if rel_heading >= 0:
            return self.right, rel_heading
        return self.left, rel_heading + 360.0

    def trim(self, rel_heading: float) -> tuple[float, float]:
        fmap, theta = self.for_heading(rel_heading)
        return optimal_sail_angle(fmap, theta)

    def force(self, rel_heading: float, phi: float) -> float:
        fmap, theta = self.for_heading(rel_heading)
        return fmap.value(theta, phi)


def analytic_plan(wind_speed, theta_step=1.0, phi_step=1.0, sail_coeff=0.5) -> SailPlan:
    return SailPlan(
        build_analytic_map(TackSide.RIGHT, wind_speed, theta_step, phi_step, sail_coeff),
        build_analytic_map(TackSide.LEFT, wind_speed, theta_step, phi_step, sail_coeff),
    )


def _fmt(v: float) -> str:
    return repr(float(v))


def save_map_csv(fmap: SailForceMap, path) -> None:
    """Write ``fmap`` as CSV: a ``theta_deg,<phi...>`` header, then one row per theta."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["theta_deg"] + [_fmt(p) for p in fmap.phi_grid])
        for t, row in zip(fmap.theta_grid, fmap.values):
            w.writerow([_fmt(t)] + [_fmt(v) for v in row])


def _parse_float(text: str, line: int, what: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise MapFormatError(line, f"bad {what} {text!r}") from None
    if not math.isfinite(v):
        raise MapFormatError(line, f"non-finite {what} {text!r}")
    return v


def load_map_csv(path, tack_side: TackSide | None = None) -> SailForceMap:
    """Read a force map written by :func:`save_map_csv` (or by hand).

    When ``tack_side`` is omitted it is inferred from the theta range:
    grids inside [0, 180] are right-tack, anything else left-tack.
    """
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise MapFormatError(1, "empty file")
    header = rows[0]
    if not header or header[0].strip() != "theta_deg" or len(header) < 2:
        raise MapFormatError(1, "header must start with 'theta_deg' followed by phi values")
    phis = [_parse_float(c, 1, "phi") for c in header[1:]]
    if _uniform_step(np.array(phis)) is None:
        raise MapFormatError(1, "phi grid is not strictly ascending and uniform")
    thetas: list[float] = []
    values: list[list[float]] = []
    for k, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != len(header):
            raise MapFormatError(k, f"expected {len(header)} fields, got {len(row)}")
        thetas.append(_parse_float(row[0], k, "theta"))
        values.append([_parse_float(c, k, "value") for c in row[1:]])
        if len(thetas) >= 2:
            step = thetas[1] - thetas[0]
            d = thetas[-1] - thetas[-2]
            if step <= 0 or not math.isclose(d, step, rel_tol=_GRID_RTOL, abs_tol=1e-12):
                raise MapFormatError(k, "theta grid is not strictly ascending and uniform")
    if not thetas:
        raise MapFormatError(2, "no data rows")
    if tack_side is None:
        tack_side = TackSide.RIGHT if thetas[0] >= 0 and thetas[-1] <= 180 else TackSide.LEFT
    try:
        return SailForceMap(tack_side, np.array(thetas), np.array(phis), np.array(values))
    except ValueError as exc:
        raise MapFormatError(1, str(exc)) from None
