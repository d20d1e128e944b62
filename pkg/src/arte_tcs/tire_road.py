"""Tire-road friction curves.

Friction coefficient as a function of longitudinal slip, using the
four-parameter magic formula

    mu(lambda) = D * sin(C * atan(B*lambda - E*(B*lambda - atan(B*lambda))))

with one (B, C, D, E) set per road surface.  D is the peak friction
level, B*C*D the stiffness at zero slip.  The module also provides
sampled-lookup tables and a config-file override path so curve sets can
be swapped without code changes.
"""

import configparser
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError


class RoadType(enum.Enum):
    ASPHALT = "asphalt"
    STONE = "stone"
    GRAVEL = "gravel"
    SNOW = "snow"

    @classmethod
    def from_name(cls, name):
        try:
            return cls(name.strip().lower())
        except ValueError:
            raise ConfigError("unknown road type: %r" % (name,)) from None


@dataclass(frozen=True)
class MuLambdaCurve:
    b: float
    c: float
    d: float
    e: float

    def validate(self):
        # B > 0: slope sign convention; C in (1, 3): single-peak shape
        # family; D in (0, 1.5]: physical friction range.
        if not (self.b > 0.0):
            raise ConfigError("curve stiffness B must be positive, got %g" % self.b)
        if not (1.0 < self.c < 3.0):
            raise ConfigError("curve shape C must lie in (1, 3), got %g" % self.c)
        if not (0.0 < self.d <= 1.5):
            raise ConfigError("curve peak D must lie in (0, 1.5], got %g" % self.d)
        if not np.isfinite(self.e):
            raise ConfigError("curve curvature E must be finite")
        return self

    def mu(self, lam):
        lam = np.clip(np.asarray(lam, dtype=float), -1.0, 1.0)
        bl = self.b * lam
        inner = bl - self.e * (bl - np.arctan(bl))
        return self.d * np.sin(self.c * np.arctan(inner))

    def mu_scalar(self, lam):
        # math-module twin of mu() for tight integration loops
        if lam > 1.0:
            lam = 1.0
        elif lam < -1.0:
            lam = -1.0
        bl = self.b * lam
        inner = bl - self.e * (bl - math.atan(bl))
        return self.d * math.sin(self.c * math.atan(inner))


DEFAULT_CURVES = {
    RoadType.ASPHALT: MuLambdaCurve(b=10.0, c=1.9, d=1.00, e=0.97),
    RoadType.STONE: MuLambdaCurve(b=12.0, c=2.3, d=0.82, e=1.00),
    RoadType.GRAVEL: MuLambdaCurve(b=4.0, c=2.0, d=0.60, e=1.00),
    RoadType.SNOW: MuLambdaCurve(b=45.0, c=2.0, d=0.28, e=1.00),
}


def resolve_curve(road_or_curve, curves=None):
    """Accept a RoadType (looked up in `curves`/defaults) or a curve itself."""
    if isinstance(road_or_curve, MuLambdaCurve):
        return road_or_curve
    table = DEFAULT_CURVES if curves is None else curves
    return table[road_or_curve]


@dataclass(frozen=True)
class MuLambdaTable:
    """Curve sampled on a uniform slip grid over [0, 1]."""

    lambda_grid: np.ndarray
    mu_values: np.ndarray
    lambda_opt: float
    mu_peak: float

    def lookup(self, lam):
        return np.interp(lam, self.lambda_grid, self.mu_values)


def build_table(road_or_curve, n=256, curves=None):
    if n < 64:
        raise ConfigError("lookup table needs at least 64 samples, got %d" % n)
    curve = resolve_curve(road_or_curve, curves).validate()
    grid = np.linspace(0.0, 1.0, n)
    vals = curve.mu(grid)
    i = int(np.argmax(vals))
    return MuLambdaTable(lambda_grid=grid, mu_values=vals,
                         lambda_opt=float(grid[i]), mu_peak=float(vals[i]))


def optimal_lambda(road_or_curve, n=4096, curves=None):
    """Peak-friction slip ratio, found on a dense grid then refined.

    One parabolic refinement step around the grid argmax; the curves
    here are smooth and unimodal on [0, 1] so this lands within ~1e-6
    of the true peak.
    """
    curve = resolve_curve(road_or_curve, curves)
    grid = np.linspace(0.0, 1.0, n)
    vals = curve.mu(grid)
    i = int(np.argmax(vals))
    if i == 0 or i == n - 1:
        return float(grid[i])
    # parabola through the three bracketing samples
    x0, x1, x2 = grid[i - 1], grid[i], grid[i + 1]
    y0, y1, y2 = vals[i - 1], vals[i], vals[i + 1]
    denom = (y0 - 2.0 * y1 + y2)
    if denom == 0.0:
        return float(x1)
    return float(x1 + 0.5 * (x1 - x0) * (y0 - y2) / denom)


def peak_friction(road_or_curve, n=4096, curves=None):
    """(lambda_opt, mu_peak) pair for a road or curve."""
    curve = resolve_curve(road_or_curve, curves)
    lam = optimal_lambda(curve, n=n)
    return lam, float(curve.mu(lam))


def load_curve_overrides(path, base=None):
    """Read per-road curve parameters from an INI file.

    Sections are road names; keys are b, c, d, e (all required).
    Returns a full road->curve dict: overridden roads replaced, the
    rest taken from `base` (defaults if None).
    """
    cp = configparser.ConfigParser()
    read = cp.read(path)
    if not read:
        raise ConfigError("cannot read curve file: %s" % (path,))
    out = dict(DEFAULT_CURVES if base is None else base)
    for section in cp.sections():
        road = RoadType.from_name(section)
        vals = {}
        for key in ("b", "c", "d", "e"):
            if not cp.has_option(section, key):
                raise ConfigError(
                    "curve file %s: [%s] missing key %r" % (path, section, key)
                )
            try:
                vals[key] = cp.getfloat(section, key)
            except ValueError:
                raise ConfigError(
                    "curve file %s: [%s] key %r is not a number" % (path, section, key)
                ) from None
        out[road] = MuLambdaCurve(**vals).validate()
    return out
