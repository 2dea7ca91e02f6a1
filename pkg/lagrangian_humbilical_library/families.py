'''
Quaternion curves, real base immersions and the quaternion extensors built from
them, plus the tests that are specific to extensors:

    (F⊗G)(s, p) = F(s)·G(p)

where F is a unit-speed curve in H and G an immersion into E^m, every real
component of G(p) multiplying the quaternion F(s).
'''

__version__ = "0.0.1"
__status__ = "Development"

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from lagrangian_humbilical_library.quat_core import (
    ONE, STRUCTURES, hamilton, quat_norm)
from lagrangian_humbilical_library.immersion import (
    DEFAULT_STEP, NESTED_STEP, Chart, ImmersionMap, gram_schmidt_frame, jets,
    local_geometry, second_fundamental_form)
from lagrangian_humbilical_library.lagrangian import (
    adapted_frame, extract_profile, totally_real_residual)

# Init the logger.
log = logging.getLogger(__name__)

DEFAULT_GRID_POINTS = 17

# Spherical chart coordinates stay this far inside ±π/2.
SPHERE_BOUND = 1.0


####################################################
# Quaternion curves

@dataclass(frozen=True)
class QuatCurve:
    '''
    A curve s -> H with optional closed-form derivatives.

    ### Parameters:

        **kind**: str
            pseudo_sphere, circle, line, twisted or custom.

        **params**: dict

        **position**: callable
            Maps an array of s values (k,) to quaternions (k, 4).

        **interval**: (float, float)

        **velocity**, **acceleration**: callable, optional
            Closed-form F' and F''; central differences otherwise.

        **unit_speed**: bool
            Whether |F'| = 1 is claimed.
    '''
    kind: str
    params: dict
    position: Callable
    interval: tuple
    velocity: Callable = None
    acceleration: Callable = None
    unit_speed: bool = True
    step: float = DEFAULT_STEP

    def __call__(self, s):
        return np.asarray(self.position(np.atleast_1d(np.asarray(s, dtype=np.float64))), dtype=np.float64)

    def derivative(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=np.float64))
        if self.velocity is not None:
            return np.asarray(self.velocity(s), dtype=np.float64)
        return (self(s + self.step) - self(s - self.step)) / (2.0 * self.step)

    def second_derivative(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=np.float64))
        if self.acceleration is not None:
            return np.asarray(self.acceleration(s), dtype=np.float64)
        h = 10.0 * self.step
        return (self(s + h) - 2.0 * self(s) + self(s - h)) / h ** 2

    def samples(self, count=DEFAULT_GRID_POINTS):
        return Chart((self.interval,), ('s',)).grid(count)[:, 0]

    def speed_residual(self, s):
        return float(np.max(np.abs(quat_norm(self.derivative(s)) - 1.0)))

    def coefficients(self, s):
        return curve_coefficients(self, s)


def _unit_quaternion(c):
    c = np.asarray(c, dtype=np.float64).reshape(4)
    size = np.sqrt(c @ c)
    if size == 0.0:
        raise ValueError('Direction quaternion must be nonzero')
    return c / size


def pseudo_sphere_curve(b):
    '''
    F(s) = (e^{2bsi} + 1)/(2bi), with F' = e^{2bsi} and F'' = 2bi·e^{2bsi} in closed form.
    |F(s)| = cos(bs)/b on the working interval |s| < π/(4b).
    '''
    if not b > 0:
        raise ValueError(f'Pseudo-sphere parameter b must be positive, got {b}')
    b = float(b)

    def position(s):
        zeros = np.zeros_like(s)
        return np.stack([np.sin(2 * b * s), -(np.cos(2 * b * s) + 1.0), zeros, zeros], axis=-1) / (2 * b)

    def velocity(s):
        zeros = np.zeros_like(s)
        return np.stack([np.cos(2 * b * s), np.sin(2 * b * s), zeros, zeros], axis=-1)

    def acceleration(s):
        zeros = np.zeros_like(s)
        return 2 * b * np.stack([-np.sin(2 * b * s), np.cos(2 * b * s), zeros, zeros], axis=-1)

    bound = np.pi / (4 * b)
    return QuatCurve(kind="pseudo_sphere", params={"b": b}, position=position,
                     interval=(-bound, bound), velocity=velocity, acceleration=acceleration)


def circle_curve(plane="i", interval=(-1.0, 1.0)):
    '''
    Unit circle F(s) = cos s + u·sin s in the quaternion plane spanned by 1 and u.
    '''
    units = {"i": 1, "j": 2, "k": 3}
    if plane not in units:
        raise ValueError(f'Circle plane must be one of {sorted(units)}, got {plane!r}')
    slot = units[plane]

    def position(s):
        values = np.zeros(s.shape + (4,))
        values[..., 0] = np.cos(s)
        values[..., slot] = np.sin(s)
        return values

    def velocity(s):
        values = np.zeros(s.shape + (4,))
        values[..., 0] = -np.sin(s)
        values[..., slot] = np.cos(s)
        return values

    return QuatCurve(kind="circle", params={"plane": plane}, position=position, interval=tuple(interval),
                     velocity=velocity, acceleration=lambda s: -position(s))


def line_curve(a=0.5, c=ONE, interval=(0.0, 1.0)):
    '''
    F(s) = (s + a)·c for a unit quaternion c.
    '''
    c = _unit_quaternion(c)
    lo, hi = interval
    if lo + a <= 0.0 <= hi + a:
        raise ValueError(f'Line curve passes through 0 on {interval} with a = {a}')
    return QuatCurve(kind="line", params={"a": float(a), "c": c.tolist()},
                     position=lambda s: (s + a)[..., None] * c,
                     interval=tuple(interval),
                     velocity=lambda s: np.broadcast_to(c, s.shape + (4,)).copy(),
                     acceleration=lambda s: np.zeros(s.shape + (4,)))


def twisted_curve(tau=0.5, offset=(2.0, 0.0, 0.0, 0.0), interval=(-1.0, 1.0)):
    '''
    Non-planar unit-speed curve with F'(s) = e^{is}·e^{jτs}, integrated in closed
    form and shifted by offset so F stays away from 0.
    '''
    if abs(abs(tau) - 1.0) < 1e-6:
        raise ValueError('Twist rate τ = ±1 is not supported')
    tau = float(tau)
    p, q = 1.0 - tau, 1.0 + tau
    offset = np.asarray(offset, dtype=np.float64)

    def velocity(s):
        return np.stack([np.cos(s) * np.cos(tau * s), np.sin(s) * np.cos(tau * s),
                         np.cos(s) * np.sin(tau * s), np.sin(s) * np.sin(tau * s)], axis=-1)

    def position(s):
        return offset + 0.5 * np.stack([
            np.sin(p * s) / p + np.sin(q * s) / q,
            -np.cos(q * s) / q - np.cos(p * s) / p,
            -np.cos(q * s) / q + np.cos(p * s) / p,
            np.sin(p * s) / p - np.sin(q * s) / q,
        ], axis=-1)

    def acceleration(s):
        v = velocity(s)
        return hamilton(STRUCTURES[0].unit, v) + tau * hamilton(v, STRUCTURES[1].unit)

    return QuatCurve(kind="twisted", params={"tau": tau, "offset": offset.tolist()}, position=position,
                     interval=tuple(interval), velocity=velocity, acceleration=acceleration)


def custom_curve(a, b, c, d, interval, unit_speed=True, step=DEFAULT_STEP):
    '''
    Curve from four real coefficient functions F = a + b·i + c·j + d·k; derivatives
    by central differences.
    '''
    def position(s):
        return np.stack([np.broadcast_to(np.asarray(fn(s), dtype=np.float64), s.shape)
                         for fn in (a, b, c, d)], axis=-1)

    return QuatCurve(kind="custom", params={}, position=position, interval=tuple(interval),
                     unit_speed=unit_speed, step=step)


def curve_coefficients(F, s):
    '''
    λ_φ = <F'', φF'> and μ_φ = <(F/|F|)', φ(F/|F|)> for φ = I, J, K, where
    (F/|F|)' = F'/|F| - F<F,F'>/|F|³.

    ### Returns:

        **coefficients**: numpy.ndarray (6,) for scalar s, (k, 6) otherwise
            (λ_I, λ_J, λ_K, μ_I, μ_J, μ_K)
    '''
    scalar = np.ndim(s) == 0
    s = np.atleast_1d(np.asarray(s, dtype=np.float64))
    P, V, A = F(s), F.derivative(s), F.second_derivative(s)
    r = quat_norm(P)
    if np.min(r) <= 1e-8:
        raise ValueError(f'Curve {F.kind} passes through 0, μ is undefined there')
    U = P / r[:, None]
    dU = V / r[:, None] - P * (np.sum(P * V, axis=-1) / r ** 3)[:, None]
    lambdas = [np.sum(A * hamilton(phi.unit, V), axis=-1) for phi in STRUCTURES]
    mus = [np.sum(dU * hamilton(phi.unit, U), axis=-1) for phi in STRUCTURES]
    result = np.stack(lambdas + mus, axis=-1)
    return result[0] if scalar else result


####################################################
# Real base immersions

@dataclass(frozen=True)
class BaseImmersion:
    '''
    A real immersion G of a chart into E^m, values (k, m).
    '''
    rule: Callable
    chart: Chart
    ambient_dim: int
    kind: str
    params: dict = field(default_factory=dict)

    def __call__(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        return np.asarray(self.rule(points), dtype=np.float64)

    def as_immersion(self):
        '''
        G as an immersion into H^m with zero i, j, k parts.
        '''
        def rule(points):
            values = np.zeros((points.shape[0], self.ambient_dim, 4))
            values[..., 0] = self(points)
            return values
        return ImmersionMap(rule=rule, chart=self.chart, n=self.ambient_dim, name=self.kind)


def sphere_immersion(n, radius=1.0, bound=SPHERE_BOUND):
    '''
    Round sphere S^{n-1}(radius) ⊂ E^n in spherical coordinates (u2, ..., un), with
    metric radius²(du2² + cos²u2·du3² + ... + cos²u2···cos²u_{n-1}·dun²).
    '''
    if n < 2:
        raise ValueError(f'Sphere immersion needs n >= 2, got {n}')
    if not 0.0 < bound < np.pi / 2 - 0.1 + 1e-12:
        raise ValueError(f'Spherical chart bound {bound} reaches the coordinate singularity')

    def rule(points):
        coords = [np.ones(points.shape[0])]
        for k in reversed(range(points.shape[1])):
            u = points[:, k]
            coords = [c * np.cos(u) for c in coords] + [np.sin(u)]
        return radius * np.stack(coords, axis=-1)

    chart = Chart(((-bound, bound),) * (n - 1), tuple(f'u{k}' for k in range(2, n + 1)))
    return BaseImmersion(rule=rule, chart=chart, ambient_dim=n, kind="sphere",
                         params={"n": n, "radius": float(radius)})


def unit_sphere_immersion(n):
    return sphere_immersion(n, 1.0)


def line_immersion(point, direction, interval=(-1.0, 1.0)):
    '''
    G(t) = point + t·direction in E^m.
    '''
    point = np.asarray(point, dtype=np.float64)
    direction = np.asarray(direction, dtype=np.float64)
    if point.shape != direction.shape:
        raise ValueError('Line point and direction need the same dimension')
    return BaseImmersion(rule=lambda t: point + t[:, :1] * direction, chart=Chart((tuple(interval),), ('t',)),
                         ambient_dim=len(point), kind="line",
                         params={"point": point.tolist(), "direction": direction.tolist()})


####################################################
# Extensors

@dataclass(frozen=True)
class Extensor(ImmersionMap):
    curve: QuatCurve = None
    base: BaseImmersion = None


def build_extensor(F, G):
    '''
    The quaternion extensor F⊗G on the chart I × chart(G).

    ### Parameters:

        **F**: QuatCurve

        **G**: BaseImmersion

    ### Returns:

        **extensor**: Extensor into H^m
    '''
    chart = Chart((F.interval,), ('s',)).product(G.chart)

    def rule(points):
        return F(points[:, 0])[:, None, :] * G(points[:, 1:])[:, :, None]

    return Extensor(rule=rule, chart=chart, n=G.ambient_dim, name=f'{F.kind}x{G.kind}', curve=F, base=G)


def _extensor_grid(F, G, count):
    s = F.samples(count)
    base = G.chart.grid(count)
    return np.concatenate([np.repeat(s, len(base))[:, None], np.tile(base, (len(s), 1))], axis=1)


@dataclass(frozen=True)
class ProfileMatch:
    discrepancy: float
    numeric: np.ndarray
    closed_form: np.ndarray


def extensor_profile_match(F, n, s_grid=None, base_point=None):
    '''
    Compares the profile extracted from the numerical second fundamental form of
    F⊗ι (adapted frame, e1 = ∂s) with curve_coefficients(F, s).

    ### Returns:

        **match**: ProfileMatch
    '''
    extensor = build_extensor(F, unit_sphere_immersion(n))
    s_grid = F.samples(5) if s_grid is None else np.atleast_1d(np.asarray(s_grid, dtype=np.float64))
    if base_point is None:
        base_point = extensor.base.chart.center
    points = np.concatenate([s_grid[:, None], np.tile(base_point, (len(s_grid), 1))], axis=1)
    numeric = []
    for j, metric in local_geometry(extensor, points):
        frame = adapted_frame(j, metric)
        profile = extract_profile(second_fundamental_form(j, metric).in_frame(frame), frame)
        numeric.append(np.concatenate([profile.lambdas, profile.mus]))
    numeric = np.array(numeric)
    closed_form = curve_coefficients(F, s_grid)
    discrepancy = float(np.max(np.abs(numeric - closed_form)))
    log.debug(f'Profile match for {F.kind} at n={n}: {discrepancy:.3e}')
    return ProfileMatch(discrepancy=discrepancy, numeric=numeric, closed_form=closed_form)


@dataclass(frozen=True)
class TotallyRealVerdict:
    sphericity_residual: float
    real_part_residual: float
    ode_residuals: np.ndarray
    direct_residual: float
    spherical: bool
    verdict: bool


def totally_real_test(F, G, count=5, tol=1e-8):
    '''
    Both branches of the totally real criterion for F⊗G: G spherical (|G| constant),
    or Re(φF·conj(F')) = 0 for every φ, equivalently the three ODE residuals

        ab' - a'b + cd' - c'd,  ac' - a'c + b'd - bd',  ad' - a'd + bc' - b'c

    of F = a + bi + cj + dk. direct_residual is the largest totally_real_residual of
    the extensor's jets over the same grid.

    ### Returns:

        **verdict**: TotallyRealVerdict
    '''
    s = F.samples(count)
    base_points = G.chart.grid(count)
    radii = np.linalg.norm(G(base_points), axis=-1)
    sphericity = float(np.max(radii) - np.min(radii))

    P, V = F(s), F.derivative(s)
    real_part = max(float(np.max(np.abs(np.sum(hamilton(phi.unit, P) * V, axis=-1)))) for phi in STRUCTURES)
    a, b, c, d = P.T
    da, db, dc, dd = V.T
    ode = np.array([
        np.max(np.abs(a * db - da * b + c * dd - dc * d)),
        np.max(np.abs(a * dc - da * c + db * d - b * dd)),
        np.max(np.abs(a * dd - da * d + b * dc - db * c)),
    ])

    extensor = build_extensor(F, G)
    direct = max(totally_real_residual(j) for j in jets(extensor, _extensor_grid(F, G, count)))
    spherical = sphericity <= tol
    verdict = spherical or real_part <= tol
    log.debug(f'Totally real test {F.kind}x{G.kind}: sphericity {sphericity:.3e}, real part {real_part:.3e}')
    return TotallyRealVerdict(sphericity_residual=sphericity, real_part_residual=real_part,
                              ode_residuals=ode, direct_residual=direct, spherical=spherical, verdict=verdict)


@dataclass(frozen=True)
class IsometricVerdict:
    f_residual: float
    g_residual: float
    f_isometric: bool
    g_isometric: bool


def isometric_tests(F, G, count=5, tol=1e-6):
    '''
    F-isometric: g_ss = |∂s(F⊗G)|² = 1 everywhere. G-isometric: the p-block of the
    extensor metric equals the metric of G. Both are read from jets.
    '''
    extensor = build_extensor(F, G)
    points = _extensor_grid(F, G, count)
    extensor_jets = jets(extensor, points)
    base_jets = jets(G.as_immersion(), points[:, 1:])
    f_residual = g_residual = 0.0
    for j, base_jet in zip(extensor_jets, base_jets):
        g = np.einsum('anq,bnq->ab', j.d1, j.d1)
        g_base = np.einsum('anq,bnq->ab', base_jet.d1, base_jet.d1)
        f_residual = max(f_residual, abs(g[0, 0] - 1.0))
        g_residual = max(g_residual, float(np.max(np.abs(g[1:, 1:] - g_base))))
    return IsometricVerdict(f_residual=float(f_residual), g_residual=float(g_residual),
                            f_isometric=f_residual <= tol, g_isometric=g_residual <= tol)


@dataclass(frozen=True)
class GeodesicVerdict:
    max_h: float
    verdict: bool
    curvature_position: float = None
    curvature_shape: float = None


def _base_normals(base_jet):
    '''
    Orthonormal basis of the normal space of a real base immersion and its second
    fundamental form, from a jet of G.as_immersion().
    '''
    tangents = base_jet.d1[..., 0]
    _, singular, vt = np.linalg.svd(tangents)
    rank = int(np.sum(singular > 1e-10 * singular[0]))
    normals = vt[rank:]
    second = base_jet.d2[..., 0]
    return normals, np.einsum('abm,km->kab', second, normals)


def totally_geodesic_test(extensor, points, tol=1e-6):
    '''
    max |h(e_a, e_b)| over the grid in orthonormal frames; totally geodesic iff it is
    within tol. For extensors the curve/base products <F'',F''><ξ,G> and
    <F'',F><ξ,h_G> are sampled over the normals ξ of G as diagnostics.

    ### Returns:

        **verdict**: GeodesicVerdict
    '''
    points = np.atleast_2d(points)
    max_h = 0.0
    for j, metric in local_geometry(extensor, points):
        sff = second_fundamental_form(j, metric).in_frame(gram_schmidt_frame(j, metric))
        max_h = max(max_h, float(np.sqrt(np.max(np.sum(sff.h * sff.h, axis=(-2, -1))))))

    position = shape = None
    curve = getattr(extensor, 'curve', None)
    base = getattr(extensor, 'base', None)
    if curve is not None and base is not None:
        position = shape = 0.0
        s = points[:, 0]
        P, A = curve(s), curve.second_derivative(s)
        base_jets = jets(base.as_immersion(), points[:, 1:])
        for k, base_jet in enumerate(base_jets):
            normals, h_base = _base_normals(base_jet)
            if len(normals) == 0:
                continue
            G = base(points[k:k + 1, 1:])[0]
            position = max(position, float(np.max(np.abs((A[k] @ A[k]) * (normals @ G)))))
            shape = max(shape, float(np.max(np.abs((A[k] @ P[k]) * h_base))))
    log.debug(f'Totally geodesic test on {extensor.name}: max |h| = {max_h:.3e}')
    return GeodesicVerdict(max_h=max_h, verdict=max_h <= tol, curvature_position=position,
                           curvature_shape=shape)
