"""Rayleigh-Lamb dispersion for isotropic plates.

Solves the fundamental symmetric/antisymmetric mode branches by bracketed
bisection in phase speed, with continuation along the frequency-half-thickness
(fd) axis. Group speeds follow from finite differences of omega(k) along the
traced branch.

fd is measured in Hz*m throughout (1 Hz*m = 1 kHz*mm).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import BranchLost, EmptyRange

# Dense-scan defaults for the first grid point (phase-speed search window,
# relative to the bulk speeds of the material).
SCAN_POINTS = 2000
SCAN_LO_FACTOR = 0.05     # times c_shear
SCAN_HI_FACTOR = 4.995    # times c_pressure (0.999 * 5)
CONTINUATION_WINDOW = 0.10
BISECTION_RTOL = 1e-10


class Mode(Enum):
    """Lamb mode families; value is (family, order)."""

    S0 = ("S", 0)
    A0 = ("A", 0)
    S1 = ("S", 1)
    A1 = ("A", 1)

    @property
    def symmetric(self) -> bool:
        return self.value[0] == "S"

    @property
    def order(self) -> int:
        return self.value[1]


@dataclass(frozen=True)
class PlateMaterial:
    """Isotropic plate: elastic constants plus half thickness d = h/2."""

    youngs_modulus: float   # Pa
    poisson_ratio: float
    density: float          # kg/m^3
    half_thickness: float   # m

    def __post_init__(self):
        if self.youngs_modulus <= 0:
            raise ValueError("youngs_modulus must be > 0")
        if self.density <= 0:
            raise ValueError("density must be > 0")
        if self.half_thickness <= 0:
            raise ValueError("half_thickness must be > 0")
        if not 0 < self.poisson_ratio < 0.5:
            raise ValueError("poisson_ratio must lie in (0, 0.5)")

    @property
    def lame_lambda(self) -> float:
        e, nu = self.youngs_modulus, self.poisson_ratio
        return e * nu / ((1 + nu) * (1 - 2 * nu))

    @property
    def shear_modulus(self) -> float:
        return self.youngs_modulus / (2 * (1 + self.poisson_ratio))


def bulk_speeds(mat: PlateMaterial) -> tuple[float, float]:
    """Pressure and shear bulk wave speeds (m/s)."""
    c_pressure = math.sqrt((mat.lame_lambda + 2 * mat.shear_modulus) / mat.density)
    c_shear = math.sqrt(mat.shear_modulus / mat.density)
    return c_pressure, c_shear


def axial_plate_speed(mat: PlateMaterial) -> float:
    """Low-fd asymptote of the S0 phase speed (axial plate wave)."""
    return math.sqrt(mat.youngs_modulus / (mat.density * (1 - mat.poisson_ratio**2)))


def flexural_plate_speed(mat: PlateMaterial, fd: float) -> float:
    """Low-fd asymptote of the A0 phase speed (Kirchhoff-Love flexural wave)."""
    h = 2 * mat.half_thickness
    bending = mat.youngs_modulus * h**3 / (12 * (1 - mat.poisson_ratio**2))
    omega = 2 * math.pi * fd / mat.half_thickness
    return math.sqrt(omega) * (bending / (mat.density * h)) ** 0.25


def rayleigh_lamb_residual(mat: PlateMaterial, mode: Mode, k: float, omega: float) -> float:
    """Pole-free product form of the Rayleigh-Lamb characteristic equation.

    Evaluates, with eta_p^2 = omega^2/c_p^2 - k^2 and eta_s^2 likewise,

        symmetric:      (k^2-eta_s^2)^2 cos(eta_p d) sin(eta_s d)
                        + 4 k^2 eta_p eta_s sin(eta_p d) cos(eta_s d)
        antisymmetric:  (k^2-eta_s^2)^2 sin(eta_p d) cos(eta_s d)
                        + 4 k^2 eta_p eta_s cos(eta_p d) sin(eta_s d)

    Where eta^2 < 0, the substitution eta = i*eta~ together with
    cos(ix) = cosh(x), sin(ix) = i sinh(x) keeps the value real, so sign
    changes remain valid bisection brackets.
    """
    if k <= 0 or omega <= 0:
        raise ValueError("k and omega must be positive")
    c_pressure, c_shear = bulk_speeds(mat)
    d = mat.half_thickness
    ep2 = (omega / c_pressure) ** 2 - k * k
    es2 = (omega / c_shear) ** 2 - k * k
    k2 = k * k
    sym = mode.symmetric

    if ep2 >= 0.0:
        # both eta real (es2 >= ep2 always, since c_shear < c_pressure)
        ep = math.sqrt(ep2)
        es = math.sqrt(es2)
        t1 = (k2 - es2) ** 2
        if sym:
            return t1 * math.cos(ep * d) * math.sin(es * d) + 4 * k2 * ep * es * math.sin(ep * d) * math.cos(es * d)
        return t1 * math.sin(ep * d) * math.cos(es * d) + 4 * k2 * ep * es * math.cos(ep * d) * math.sin(es * d)

    if es2 >= 0.0:
        # eta_p imaginary, eta_s real; common factor i dropped for antisymmetric
        p = math.sqrt(-ep2) * d
        es = math.sqrt(es2)
        epi = math.sqrt(-ep2)
        t1 = (k2 - es2) ** 2
        if sym:
            return t1 * math.cosh(p) * math.sin(es * d) - 4 * k2 * epi * es * math.sinh(p) * math.cos(es * d)
        return t1 * math.sinh(p) * math.cos(es * d) + 4 * k2 * epi * es * math.cosh(p) * math.sin(es * d)

    # both imaginary; common factor i dropped
    epi = math.sqrt(-ep2)
    esi = math.sqrt(-es2)
    p = epi * d
    s = esi * d
    t1 = (k2 + esi * esi) ** 2
    if sym:
        return t1 * math.cosh(p) * math.sinh(s) - 4 * k2 * epi * esi * math.sinh(p) * math.cosh(s)
    return t1 * math.sinh(p) * math.cosh(s) - 4 * k2 * epi * esi * math.cosh(p) * math.sinh(s)


@dataclass
class DispersionCurve:
    """One traced Lamb branch: fd (Hz*m), k (rad/m), phase and group speeds (m/s)."""

    mode: Mode
    fd: np.ndarray
    k: np.ndarray
    c_phase: np.ndarray
    c_group: np.ndarray
    material: PlateMaterial = field(repr=False, default=None)

    def __len__(self) -> int:
        return len(self.fd)

    @property
    def omega(self) -> np.ndarray:
        """Angular frequencies (rad/s) for the material's half thickness."""
        return self.k * self.c_phase

    def frequencies(self) -> np.ndarray:
        """Plain frequencies (Hz) for the material's half thickness."""
        return self.fd / self.material.half_thickness

    def wavenumber_at(self, omega: np.ndarray) -> np.ndarray:
        """Linear interpolation of k(omega) along the branch (NaN outside)."""
        om = self.omega
        return np.interp(omega, om, self.k, left=np.nan, right=np.nan)

    def group_speed_at_frequency(self, f_hz: float) -> float:
        """Linear interpolation of the group speed at a plain frequency (Hz)."""
        return float(np.interp(f_hz * self.material.half_thickness, self.fd, self.c_group))

    def covers(self, omega_lo: float, omega_hi: float) -> bool:
        om = self.omega
        return om[0] <= omega_lo and omega_hi <= om[-1]


def _bisect(g, lo: float, hi: float, rtol: float = BISECTION_RTOL) -> float:
    flo = g(lo)
    if flo == 0.0:
        return lo
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        fm = g(mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0:
            hi = mid
        else:
            lo = mid
            flo = fm
        if hi - lo < rtol * mid:
            break
    return 0.5 * (lo + hi)


def _sign_change_brackets(g, grid: np.ndarray) -> list[tuple[float, float]]:
    vals = [g(c) for c in grid]
    out = []
    for i in range(len(grid) - 1):
        if vals[i] * vals[i + 1] < 0 or vals[i] == 0.0:
            out.append((float(grid[i]), float(grid[i + 1])))
    return out


def _solve_near(g, c_guess: float, window: float) -> float | None:
    """Root nearest to c_guess inside c_guess*(1 +/- window), or None."""
    grid = np.linspace(c_guess * (1 - window), c_guess * (1 + window), 33)
    brackets = _sign_change_brackets(g, grid)
    if not brackets:
        return None
    lo, hi = min(brackets, key=lambda b: abs(0.5 * (b[0] + b[1]) - c_guess))
    return _bisect(g, lo, hi)


def _solve_first_point(mat: PlateMaterial, mode: Mode, fd: float, g) -> float:
    """Root at the first grid point, bracketed from the low-fd asymptote."""
    c_asym = axial_plate_speed(mat) if mode.symmetric else flexural_plate_speed(mat, fd)
    c = _solve_near(g, c_asym, 0.2)
    if c is not None:
        return c
    # fall back to a dense scan, picking the bracket nearest the asymptote
    c_pressure, c_shear = bulk_speeds(mat)
    grid = np.linspace(SCAN_LO_FACTOR * c_shear, SCAN_HI_FACTOR * c_pressure, SCAN_POINTS)
    brackets = _sign_change_brackets(g, grid)
    if not brackets:
        raise BranchLost(f"no {mode.name} root found at fd={fd} Hz*m")
    lo, hi = min(brackets, key=lambda b: abs(0.5 * (b[0] + b[1]) - c_asym))
    return _bisect(g, lo, hi)


def _residual_for_fd(mat: PlateMaterial, mode: Mode, fd: float):
    omega = 2 * math.pi * fd / mat.half_thickness

    def g(c: float) -> float:
        return rayleigh_lamb_residual(mat, mode, omega / c, omega)

    return g, omega


def _finite_difference_group(omega: np.ndarray, k: np.ndarray) -> np.ndarray:
    """Central-difference d(omega)/dk, one-sided at the endpoints."""
    return np.gradient(omega, k)


def trace_mode(mat: PlateMaterial, mode: Mode, fd_grid) -> DispersionCurve:
    """Trace one fundamental branch over an increasing fd grid (Hz*m).

    The first point is bracketed from the mode's low-fd asymptote; subsequent
    points continue the branch with a +/-10% bracket around a linear
    extrapolation of the two previous roots, which keeps the search on the
    branch across steep regions (A0 grows like sqrt(fd) at low fd).
    """
    fd_grid = np.asarray(fd_grid, dtype=float)
    if fd_grid.ndim != 1 or len(fd_grid) == 0:
        raise EmptyRange("fd_grid must be a nonempty 1-D sequence")
    if np.any(np.diff(fd_grid) <= 0):
        raise ValueError("fd_grid must be strictly increasing")
    if mode.order != 0:
        return _trace_first_order(mat, mode, fd_grid)

    roots: list[float] = []
    for i, fd in enumerate(fd_grid):
        g, _ = _residual_for_fd(mat, mode, fd)
        if i == 0:
            c = _solve_first_point(mat, mode, fd, g)
        else:
            if i == 1:
                if mode.symmetric:
                    guess = roots[0]
                else:
                    guess = roots[0] * math.sqrt(fd_grid[1] / fd_grid[0])
                window = 2 * CONTINUATION_WINDOW
            else:
                step = (roots[-1] - roots[-2]) * (fd - fd_grid[i - 1]) / (fd_grid[i - 1] - fd_grid[i - 2])
                guess = roots[-1] + step
                window = CONTINUATION_WINDOW
            c = _solve_near(g, guess, window)
            if c is None:
                raise BranchLost(
                    f"{mode.name} branch lost at fd={fd} Hz*m (grid too coarse near cutoffs)"
                )
        roots.append(c)

    c_phase = np.array(roots)
    omega = 2 * math.pi * fd_grid / mat.half_thickness
    k = omega / c_phase
    c_group = _finite_difference_group(omega, k)
    return DispersionCurve(mode=mode, fd=fd_grid, k=k, c_phase=c_phase, c_group=c_group, material=mat)


def _trace_first_order(mat: PlateMaterial, mode: Mode, fd_grid: np.ndarray) -> DispersionCurve:
    """Trace an order-1 branch above its cutoff.

    The cutoff is detected by the root count (within the dense-scan window)
    rising above the fundamental's single root; the branch is then continued
    from the new, faster root.
    """
    c_pressure, c_shear = bulk_speeds(mat)
    scan = np.linspace(SCAN_LO_FACTOR * c_shear, SCAN_HI_FACTOR * c_pressure, SCAN_POINTS)

    fds: list[float] = []
    roots: list[float] = []
    for fd in fd_grid:
        g, _ = _residual_for_fd(mat, mode, fd)
        if not roots:
            brackets = _sign_change_brackets(g, scan)
            if len(brackets) < 2:
                continue  # below cutoff
            # fundamental occupies the slowest bracket; take the next one up
            brackets.sort(key=lambda b: b[0])
            c = _bisect(g, *brackets[1])
        else:
            if len(roots) == 1:
                guess = roots[-1]
                window = 2 * CONTINUATION_WINDOW
            else:
                guess = 2 * roots[-1] - roots[-2]
                window = CONTINUATION_WINDOW
            c = _solve_near(g, guess, window)
            if c is None:
                raise BranchLost(f"{mode.name} branch lost at fd={fd} Hz*m")
        fds.append(float(fd))
        roots.append(c)

    if not roots:
        raise BranchLost(f"{mode.name} cutoff not reached within the fd grid")
    fd_arr = np.array(fds)
    c_phase = np.array(roots)
    omega = 2 * math.pi * fd_arr / mat.half_thickness
    k = omega / c_phase
    c_group = _finite_difference_group(omega, k)
    return DispersionCurve(mode=mode, fd=fd_arr, k=k, c_phase=c_phase, c_group=c_group, material=mat)


def fastest_group_speed(curve: DispersionCurve, fd_range: tuple[float, float]) -> tuple[float, float]:
    """Maximum group speed over an fd range and the fd where it occurs.

    Ties break to the earliest fd.
    """
    lo, hi = fd_range
    mask = (curve.fd >= lo) & (curve.fd <= hi)
    if not np.any(mask):
        raise EmptyRange(f"curve does not cover fd range [{lo}, {hi}] Hz*m")
    cg = curve.c_group[mask]
    fd = curve.fd[mask]
    i = int(np.argmax(cg))
    return float(cg[i]), float(fd[i])


def curve_table(curves: list[DispersionCurve]) -> list[tuple[float, float, float, float, str]]:
    """Rows (fd_Hz_m, k_rad_per_m, c_phase_m_s, c_group_m_s, mode) for CSV export."""
    rows = []
    for curve in curves:
        for fd, k, cp, cg in zip(curve.fd, curve.k, curve.c_phase, curve.c_group):
            rows.append((float(fd), float(k), float(cp), float(cg), curve.mode.name))
    return rows
