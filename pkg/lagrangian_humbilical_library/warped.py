'''
The warped product model I ×_ω S^{n-1} with metric

    g = ds² + ω²(s)·{du2² + cos²u2·du3² + ... + cos²u2···cos²u_{n-1}·dun²}

its closed-form Levi-Civita connection, the warping equation f² + f' + μ̄² = 0
with f = ω'/ω, and the curvature identities of its leaves.

Chart index 0 is s; index a >= 1 is the sphere coordinate u_{a+1}.
'''

__version__ = "0.0.1"
__status__ = "Development"

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from lagrangian_humbilical_library.immersion import (
    DEFAULT_STEP, Chart, ImmersionMap, local_geometry)
from lagrangian_humbilical_library.quat_core import inner, quat_norm

# Init the logger.
log = logging.getLogger(__name__)

# Margin kept from zeros of ω and from u = ±π/2.
SINGULARITY_MARGIN = 0.1

SPHERE_BOUND = 1.0

# Tolerance on g_ss = 1 and g_su = 0 for a chart to count as adapted.
ADAPTED_TOLERANCE = 1e-6


####################################################
# Warping functions

@dataclass(frozen=True)
class WarpingFunction:
    '''
    ω(s) with its first two derivatives.

    ### Parameters:

        **kind**: str

        **params**: dict

        **value**, **first**, **second**: callable
            ω, ω' and ω'' over arrays of s; first/second fall back to central
            differences when missing.

        **interval**: (float, float)
            Working interval on which ω > 0.
    '''
    kind: str
    params: dict
    value: Callable
    interval: tuple = (-1.0, 1.0)
    first: Callable = None
    second: Callable = None
    step: float = DEFAULT_STEP

    def __call__(self, s):
        s = np.asarray(s, dtype=np.float64)
        return np.asarray(self.value(s), dtype=np.float64) * np.ones_like(s)

    def derivative(self, s):
        s = np.asarray(s, dtype=np.float64)
        if self.first is not None:
            return np.asarray(self.first(s), dtype=np.float64) * np.ones_like(s)
        return (self(s + self.step) - self(s - self.step)) / (2.0 * self.step)

    def second_derivative(self, s):
        s = np.asarray(s, dtype=np.float64)
        if self.second is not None:
            return np.asarray(self.second(s), dtype=np.float64) * np.ones_like(s)
        h = 10.0 * self.step
        return (self(s + h) - 2.0 * self(s) + self(s - h)) / h ** 2

    def log_derivative(self, s):
        '''
        f = ω'/ω.
        '''
        return self.derivative(s) / self._positive(s)

    def _positive(self, s):
        omega = self(s)
        if np.any(omega <= 0.0):
            raise ValueError(f'Warping function {self.kind} vanishes or is negative on the grid')
        return omega

    @classmethod
    def cosine(cls, mu_bar, amplitude=1.0):
        '''
        ω(s) = amplitude·cos(μ̄s) on |s| < π/(2μ̄) - margin.
        '''
        if mu_bar < 0:
            raise ValueError(f'μ̄ must be non-negative, got {mu_bar}')
        if mu_bar == 0:
            return cls.constant(amplitude)
        half = np.pi / (2.0 * mu_bar) - SINGULARITY_MARGIN
        return cls(kind="cosine", params={"mu_bar": float(mu_bar), "amplitude": float(amplitude)},
                   value=lambda s: amplitude * np.cos(mu_bar * s),
                   first=lambda s: -amplitude * mu_bar * np.sin(mu_bar * s),
                   second=lambda s: -amplitude * mu_bar ** 2 * np.cos(mu_bar * s),
                   interval=(-half, half))

    @classmethod
    def exponential(cls, rate=1.0):
        return cls(kind="exponential", params={"rate": float(rate)},
                   value=lambda s: np.exp(rate * s),
                   first=lambda s: rate * np.exp(rate * s),
                   second=lambda s: rate ** 2 * np.exp(rate * s))

    @classmethod
    def hyperbolic_cosine(cls, rate=1.0):
        return cls(kind="hyperbolic_cosine", params={"rate": float(rate)},
                   value=lambda s: np.cosh(rate * s),
                   first=lambda s: rate * np.sinh(rate * s),
                   second=lambda s: rate ** 2 * np.cosh(rate * s))

    @classmethod
    def constant(cls, value=1.0):
        if value <= 0:
            raise ValueError(f'Constant warping must be positive, got {value}')
        return cls(kind="constant", params={"value": float(value)},
                   value=lambda s: value + 0.0 * s, first=lambda s: 0.0 * s, second=lambda s: 0.0 * s)

    @classmethod
    def custom(cls, fn, interval=(-1.0, 1.0), step=DEFAULT_STEP):
        return cls(kind="custom", params={}, value=fn, interval=tuple(interval), step=step)


def warping_from_curve(F):
    '''
    ω = |F| for a quaternion curve, with

        ω' = <F,F'>/|F|,  ω'' = (|F'|² + <F,F''>)/|F| - <F,F'>²/|F|³
    '''
    def value(s):
        return quat_norm(F(np.atleast_1d(s))).reshape(np.shape(s))

    def first(s):
        s1 = np.atleast_1d(s)
        P, V = F(s1), F.derivative(s1)
        return (np.sum(P * V, axis=-1) / quat_norm(P)).reshape(np.shape(s))

    def second(s):
        s1 = np.atleast_1d(s)
        P, V, A = F(s1), F.derivative(s1), F.second_derivative(s1)
        r = quat_norm(P)
        pv = np.sum(P * V, axis=-1)
        return ((np.sum(V * V, axis=-1) + np.sum(P * A, axis=-1)) / r - pv ** 2 / r ** 3).reshape(np.shape(s))

    return WarpingFunction(kind=f'norm_of_{F.kind}', params=dict(F.params), value=value,
                           first=first, second=second, interval=F.interval)


####################################################
# Warped model

@dataclass(frozen=True)
class WarpedModel:
    omega: WarpingFunction
    mu_bar: float
    n: int
    chart: Chart = field(default=None)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f'Warped product needs n >= 2, got {self.n}')
        if self.mu_bar < 0:
            raise ValueError(f'μ̄ must be non-negative, got {self.mu_bar}')
        if self.chart is None:
            bounds = (self.omega.interval,) + ((-SPHERE_BOUND, SPHERE_BOUND),) * (self.n - 1)
            labels = ('s',) + tuple(f'u{k}' for k in range(2, self.n + 1))
            object.__setattr__(self, 'chart', Chart(bounds, labels))

    @property
    def dim(self):
        return self.n


def _sphere_factors(point):
    '''
    P_j = cos²u2···cos²u_{j-1} for j = 2..n (P_2 = 1), indexed like the chart.
    '''
    u = np.asarray(point, dtype=np.float64)[1:]
    cos2 = np.cos(u) ** 2
    if np.any(cos2 < 1e-12):
        raise ValueError(f'Spherical coordinates {u.tolist()} hit the coordinate singularity')
    return np.concatenate([[1.0], np.cumprod(cos2)[:-1]])


def warped_metric(model, point):
    '''
    diag(1, ω²P_2, ..., ω²P_n) at a chart point.
    '''
    point = np.asarray(point, dtype=np.float64)
    omega = float(model.omega._positive(point[0]))
    return np.diag(np.concatenate([[1.0], omega ** 2 * _sphere_factors(point)]))


def warped_christoffel_closed(model, point):
    '''
    Γ[c][a][b] = Γ^c_ab of the warped metric:

        ∇_∂s ∂s = 0,  ∇_∂s ∂u_j = (ω'/ω)∂u_j,
        ∇_∂u_i ∂u_j = -tan u_i·∂u_j                                  (i < j)
        ∇_∂u_j ∂u_j = -ωω'P_j·∂s + Σ_{i<j} (sin 2u_i/2)·cos²u_{i+1}···cos²u_{j-1}·∂u_i
    '''
    point = np.asarray(point, dtype=np.float64)
    m = model.n
    s = point[0]
    u = point[1:]
    omega = float(model.omega._positive(s))
    d_omega = float(model.omega.derivative(s))
    factors = _sphere_factors(point)
    cos2 = np.cos(u) ** 2

    gamma = np.zeros((m, m, m))
    for j in range(1, m):
        gamma[0, j, j] = -omega * d_omega * factors[j - 1]
        gamma[j, 0, j] = gamma[j, j, 0] = d_omega / omega
        for i in range(1, j):
            gamma[j, i, j] = gamma[j, j, i] = -np.tan(u[i - 1])
            gamma[i, j, j] = 0.5 * np.sin(2.0 * u[i - 1]) * np.prod(cos2[i:j - 1])
    return gamma


def warped_sectional_curvature_closed(model, point, a, b):
    '''
    -ω''/ω for a plane (∂s, ∂u) and (1 - ω'²)/ω² for a plane of two sphere coordinates.
    '''
    if a == b:
        raise ValueError('Sectional curvature needs two distinct coordinates')
    s = np.asarray(point, dtype=np.float64)[0]
    omega = float(model.omega._positive(s))
    if a == 0 or b == 0:
        return float(-model.omega.second_derivative(s) / omega)
    return float((1.0 - float(model.omega.derivative(s)) ** 2) / omega ** 2)


####################################################
# Scalar identities

def warping_ode_check(omega, mu_bar, s_grid):
    '''
    |f² + f' + μ̄²| per grid point, f = ω'/ω and f' = ω''/ω - f².
    '''
    s = np.asarray(s_grid, dtype=np.float64)
    value = omega._positive(s)
    f = omega.derivative(s) / value
    df = omega.second_derivative(s) / value - f ** 2
    return np.abs(f ** 2 + df + mu_bar ** 2)


def leaf_curvature_check(omega, mu_bar, s_grid):
    '''
    Residuals of 1/ω² - f² = -ω''/ω and of -ω''/ω = μ̄², per grid point.

    ### Returns:

        **(first, second)**: numpy.ndarray, numpy.ndarray
    '''
    s = np.asarray(s_grid, dtype=np.float64)
    value = omega._positive(s)
    f = omega.derivative(s) / value
    radial = -omega.second_derivative(s) / value
    return np.abs(1.0 / value ** 2 - f ** 2 - radial), np.abs(radial - mu_bar ** 2)


def leaf_intrinsic_curvature_check(omega, mu_bar, s_grid):
    '''
    |1/ω² - (μ̄² + f²)|: a leaf is a round sphere of radius ω, of curvature 1/ω².
    '''
    s = np.asarray(s_grid, dtype=np.float64)
    value = omega._positive(s)
    f = omega.derivative(s) / value
    return np.abs(1.0 / value ** 2 - mu_bar ** 2 - f ** 2)


def _f_values(f, s):
    if callable(f):
        return np.asarray(f(s), dtype=np.float64) * np.ones_like(s)
    return np.full_like(s, float(f))


def spherical_distribution_check(target, f, points):
    '''
    max over points and sphere coordinate pairs (X, Y) of |<∇_X Y, e1> + f·<X, Y>|.

    ### Parameters:

        **target**: ImmersionMap | WarpedModel
            An immersion must use an adapted chart: first coordinate s with
            unit-speed s-lines orthogonal to the remaining coordinate lines.

        **f**: callable | float
            f(s).

        **points**: array_like (k, m)

    ### Returns:

        **residual**: float
    '''
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    f_values = _f_values(f, points[:, 0])
    residual = 0.0
    if isinstance(target, WarpedModel):
        for point, fv in zip(points, f_values):
            gamma = warped_christoffel_closed(target, point)
            g = warped_metric(target, point)
            residual = max(residual, float(np.max(np.abs(gamma[0, 1:, 1:] + fv * g[1:, 1:]))))
        return residual

    if not isinstance(target, ImmersionMap):
        raise TypeError(f'Cannot check the spherical distribution of {type(target).__name__}')
    for (j, metric), fv in zip(local_geometry(target, points), f_values):
        g = metric.g
        scale = max(1.0, float(np.max(np.abs(g))))
        if abs(g[0, 0] - 1.0) > ADAPTED_TOLERANCE or np.max(np.abs(g[0, 1:])) > ADAPTED_TOLERANCE * scale:
            raise ValueError(f'Chart of {target.name} is not adapted at {j.point.tolist()}: g = {g.tolist()}')
        e1 = j.d1[0]
        connection = inner(j.d2[1:, 1:], e1)
        residual = max(residual, float(np.max(np.abs(connection + fv * g[1:, 1:]))))
    return residual
