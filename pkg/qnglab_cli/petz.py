"""
Petz functions: the f_alpha family and the named presets.

    f_alpha(t) = (1 - alpha) (1 - t**(1/alpha)) / (1 - t**((1 - alpha)/alpha))

Every function here satisfies f(1) = 1 and f(t) = t f(1/t). All evaluators
are vectorized over t.
"""
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from qnglab_cli.errors import InvalidParameter

ALPHA_CAP = 1e6
SERIES_RADIUS = 1e-6
ORDER_TOL = 1e-12
DEFAULT_GRID_SIZE = 512
DEFAULT_GRID_RANGE = (1e-3, 1e3)


class PetzKind(Enum):
    ALPHA = "alpha"
    SLD = "sld"
    RRLD = "rrld"
    KUBO_MORI = "kubo_mori"
    LARGE_ALPHA = "large_alpha"


@dataclass(frozen=True)
class PetzFunction:
    kind: PetzKind
    alpha: Optional[float] = None

    def __post_init__(self):
        if self.kind is PetzKind.ALPHA:
            if self.alpha is None or not np.isfinite(self.alpha):
                raise InvalidParameter(f"alpha must be a finite real number, got {self.alpha!r}.")
            if self.alpha == 0:
                raise InvalidParameter("alpha = 0 is singular for the Petz family.")
        elif self.alpha is not None:
            raise InvalidParameter(f"Preset {self.kind.value} does not take an alpha.")

    @classmethod
    def from_alpha(cls, alpha):
        return cls(PetzKind.ALPHA, float(alpha))

    @classmethod
    def sld(cls):
        return cls(PetzKind.SLD)

    @classmethod
    def rrld(cls):
        return cls(PetzKind.RRLD)

    @classmethod
    def kubo_mori(cls):
        return cls(PetzKind.KUBO_MORI)

    @classmethod
    def large_alpha(cls):
        return cls(PetzKind.LARGE_ALPHA)

    @classmethod
    def parse(cls, token):
        """Accepts a number (an alpha) or a preset name such as 'sld'."""
        if isinstance(token, PetzFunction):
            return token
        if isinstance(token, (int, float)) and not isinstance(token, bool):
            return cls.from_alpha(token)
        text = str(token).strip().lower()
        for kind in PetzKind:
            if kind is not PetzKind.ALPHA and text == kind.value:
                return cls(kind)
        try:
            alpha = float(text)
        except ValueError:
            raise InvalidParameter(f"'{token}' is neither a number nor a Petz preset name.")
        return cls.from_alpha(alpha)

    @property
    def label(self):
        if self.kind is PetzKind.ALPHA:
            return repr(float(self.alpha))
        return self.kind.value

    @property
    def is_monotone(self):
        if self.kind is PetzKind.ALPHA:
            return is_in_monotone_window(self.alpha)
        return True

    def __call__(self, t):
        return petz_eval(self, t)


def _check_t(t):
    arr = np.asarray(t, dtype=float)
    if not np.all(np.isfinite(arr)) or np.any(arr <= 0):
        raise InvalidParameter("Petz functions are defined for finite t > 0 only.")
    return arr


def _sld(t):
    return 0.5 * (1.0 + t)


def _rrld(t):
    return 2.0 * t / (1.0 + t)


def _kubo_mori(t):
    u = np.log(t)
    near = np.abs(t - 1.0) < SERIES_RADIUS
    with np.errstate(divide='ignore', invalid='ignore'):
        direct = (t - 1.0) / u
    # log f = u/2 + u^2/24 + O(u^4)
    series = np.exp(0.5 * u + u * u / 24.0)
    return np.where(near, series, direct)


def _large_alpha(t):
    # limit of f_alpha for alpha -> +-inf: t ln t / (t - 1)
    return t / _kubo_mori(t)


def _alpha_family(alpha, t):
    if abs(alpha) >= ALPHA_CAP:
        return _large_alpha(t)
    if alpha == 1.0:
        return _kubo_mori(t)

    u = np.log(t)
    c = 1.0 - alpha
    beta = 1.0 / alpha
    a = beta * u
    b = (c / alpha) * u

    with np.errstate(over='ignore', divide='ignore', invalid='ignore'):
        direct = c * np.expm1(a) / np.expm1(b)
        # expm1(a)/expm1(b) = e^(a-b) expm1(-a)/expm1(-b) and a - b = u
        flipped = t * c * np.expm1(-a) / np.expm1(-b)
    values = np.where((a > 0) & (b > 0), flipped, direct)

    # log f = u/2 + (2 beta - 1) u^2 / 24 + O(u^4)
    near = (np.abs(t - 1.0) < SERIES_RADIUS) & (np.abs(u) * max(1.0, abs(beta)) < 1e-3)
    series = np.exp(0.5 * u + (2.0 * beta - 1.0) * u * u / 24.0)
    values = np.where(near, series, values)
    return np.where(t == 1.0, 1.0, values)


def petz_eval(f, t):
    """
    Evaluates the Petz function f at t > 0 (scalar or array).

    Returns a float for scalar input and an ndarray otherwise.
    """
    arr = _check_t(t)
    if f.kind is PetzKind.ALPHA:
        values = _alpha_family(f.alpha, arr)
    elif f.kind is PetzKind.SLD:
        values = _sld(arr)
    elif f.kind is PetzKind.RRLD:
        values = _rrld(arr)
    elif f.kind is PetzKind.KUBO_MORI:
        values = _kubo_mori(arr)
    else:
        values = _large_alpha(arr)
    if np.ndim(t) == 0:
        return float(values)
    return np.asarray(values, dtype=float)


def petz_beta(beta, t):
    """f_{1/beta}(t); beta = 0 is the large-alpha limit."""
    if beta == 0:
        return petz_eval(PetzFunction.large_alpha(), t)
    return petz_eval(PetzFunction.from_alpha(1.0 / beta), t)


def log_grid(size=DEFAULT_GRID_SIZE, lo=DEFAULT_GRID_RANGE[0], hi=DEFAULT_GRID_RANGE[1]):
    if size < 1 or lo <= 0 or hi < lo:
        raise InvalidParameter(f"Invalid grid specification ({size}, {lo}, {hi}).")
    return np.logspace(np.log10(lo), np.log10(hi), size)


def order_violation(f, g, grid=None):
    """Largest f(t) - g(t) over the grid, scaled by max(1, |g(t)|)."""
    grid = log_grid() if grid is None else np.asarray(grid, dtype=float)
    if grid.size == 0:
        raise InvalidParameter("Order predicate needs a non-empty grid.")
    fv = petz_eval(f, grid)
    gv = petz_eval(g, grid)
    return float(np.max((fv - gv) / np.maximum(1.0, np.abs(gv))))


def petz_pointwise_leq(f, g, grid=None):
    """Numerical witness of f <= g on the grid (not a proof for all t)."""
    return order_violation(f, g, grid) <= ORDER_TOL


def is_in_monotone_window(alpha):
    """f_alpha is operator monotone iff alpha <= -1 or alpha >= 1/2."""
    if alpha == 0:
        raise InvalidParameter("alpha = 0 is singular for the Petz family.")
    return alpha <= -1.0 or alpha >= 0.5


def classify_alpha(f):
    f = PetzFunction.parse(f)
    return "monotone" if f.is_monotone else "non-monotone"
