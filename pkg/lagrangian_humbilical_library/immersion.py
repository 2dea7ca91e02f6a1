'''
Parametric immersions into H^n and their numerically differentiated geometry.

An ImmersionMap evaluates a whole batch of chart points in one call, returning
an array of HVectors. Jets (position, first and second partials) come from
central finite differences over a single stencil evaluation; the induced metric,
Christoffel symbols, second fundamental form, mean curvature, shape operator and
curvature follow from the jets.

Stencil steps:
    DEFAULT_STEP    jets (first and second partials of the immersion)
    NESTED_STEP     derivatives of jet-derived fields (metric, h)
    CURVATURE_STEP  derivatives of Christoffel fields (intrinsic Riemann tensor)
'''

__version__ = "0.0.1"
__status__ = "Development"

import logging
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from lagrangian_humbilical_library.quat_core import (
    STRUCTURES, DimensionMismatchError, apply_structure, inner)

# Init the logger.
log = logging.getLogger(__name__)

DEFAULT_STEP = 1e-4
NESTED_STEP = 1e-3
CURVATURE_STEP = 1e-2

# Fraction of each coordinate interval kept clear at both ends by Chart.grid().
GRID_INSET = 0.05

# Relative singular value below which d1 is rank deficient.
RANK_TOLERANCE = 1e-10

# Smallest sine between the two vectors orthonormal_plane() keeps as given.
PLANE_FLOOR = 1e-2


class ChartBoundsError(ValueError):
    '''
    Raised when a point, or a finite difference stencil around it, leaves the chart.
    '''


class NonImmersionError(ValueError):
    '''
    Raised when the first partials are rank deficient (the map is not an immersion here).
    '''


class NotNormalError(ValueError):
    '''
    Raised when a vector expected to be normal has a tangential component.
    '''


####################################################
# Domain types

@dataclass(frozen=True)
class Chart:
    '''
    Coordinate box of an m-dimensional submanifold.

    ### Parameters:

        **bounds**: sequence of (low, high)
            Closed interval per coordinate, high > low.

        **labels**: sequence of str
            Coordinate names, defaults to x1..xm.
    '''
    bounds: tuple
    labels: tuple = ()

    def __post_init__(self):
        bounds = tuple((float(lo), float(hi)) for lo, hi in self.bounds)
        if not bounds:
            raise ValueError('A chart needs at least one coordinate')
        for lo, hi in bounds:
            if not hi > lo:
                raise ValueError(f'Degenerate chart interval [{lo}, {hi}]')
        labels = tuple(self.labels) or tuple(f'x{a + 1}' for a in range(len(bounds)))
        if len(labels) != len(bounds):
            raise ValueError(f'{len(labels)} labels given for {len(bounds)} coordinates')
        object.__setattr__(self, 'bounds', bounds)
        object.__setattr__(self, 'labels', labels)

    @property
    def dim(self):
        return len(self.bounds)

    @property
    def lower(self):
        return np.array([lo for lo, _ in self.bounds])

    @property
    def upper(self):
        return np.array([hi for _, hi in self.bounds])

    @property
    def center(self):
        return 0.5 * (self.lower + self.upper)

    def contains(self, points):
        points = np.atleast_2d(points)
        return bool(np.all(points >= self.lower) and np.all(points <= self.upper))

    def grid(self, count):
        '''
        Returns count points per coordinate over the chart interior as a
        (count**m, m) array in row-major order. A GRID_INSET fraction of every
        interval is kept clear on both sides so nested stencils stay inside.
        '''
        if count < 1:
            raise ValueError(f'Grid needs at least one point per coordinate, got {count}')
        axes = []
        for lo, hi in self.bounds:
            inset = GRID_INSET * (hi - lo)
            if count == 1:
                axes.append(np.array([0.5 * (lo + hi)]))
            else:
                axes.append(np.linspace(lo + inset, hi - inset, count))
        mesh = np.meshgrid(*axes, indexing='ij')
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def product(self, other):
        return Chart(self.bounds + other.bounds, self.labels + other.labels)


@dataclass(frozen=True)
class ImmersionMap:
    '''
    A deterministic, stateless evaluation rule from chart points to HVectors.

    ### Parameters:

        **rule**: callable
            Maps a (k, m) array of chart points to a (k, n, 4) array.

        **chart**: Chart

        **n**: int
            Ambient quaternion dimension.

        **name**: str
    '''
    rule: Callable
    chart: Chart
    n: int
    name: str = "custom"

    @property
    def dim(self):
        return self.chart.dim

    def __call__(self, points):
        points = np.atleast_2d(np.asarray(points, dtype=np.float64))
        values = np.asarray(self.rule(points), dtype=np.float64)
        expected = (points.shape[0], self.n, 4)
        if values.shape != expected:
            raise DimensionMismatchError(
                f'Immersion {self.name} returned shape {values.shape}, expected {expected}')
        return values


@dataclass(frozen=True)
class ImmersionJet:
    point: np.ndarray
    position: np.ndarray
    d1: np.ndarray
    d2: np.ndarray

    @property
    def dim(self):
        return self.d1.shape[0]


@dataclass(frozen=True)
class MetricData:
    g: np.ndarray
    ginv: np.ndarray
    christoffel: np.ndarray = None


@dataclass(frozen=True)
class SffTensor:
    '''
    Second fundamental form h[a][b] as an (m, m, n, 4) array of normal vectors,
    either in the coordinate basis or in an orthonormal Frame.
    '''
    h: np.ndarray
    basis: str = "coordinate"
    tangential_leak: float = 0.0

    @property
    def dim(self):
        return self.h.shape[0]

    def in_frame(self, frame):
        if self.basis == "frame":
            return self
        C = frame.coefficients
        h = np.einsum('ia,jb,abnq->ijnq', C, C, self.h)
        return SffTensor(h=h, basis="frame", tangential_leak=self.tangential_leak)

    def evaluate(self, X, Y):
        '''
        h(X, Y) for component vectors X, Y in this tensor's basis.
        '''
        return np.einsum('a,b,abnq->nq', np.asarray(X, dtype=np.float64),
                         np.asarray(Y, dtype=np.float64), self.h)


@dataclass(frozen=True)
class Frame:
    '''
    Orthonormal tangent frame. vectors[i] = Σ_a coefficients[i, a]·d1[a].
    '''
    vectors: np.ndarray
    coefficients: np.ndarray = field(repr=False)

    def __len__(self):
        return self.vectors.shape[0]

    def __getitem__(self, i):
        return self.vectors[i]

    def tangential_part(self, v):
        return np.einsum('i,inq->nq', inner(self.vectors, v), self.vectors)


####################################################
# Jets

def _stencil(m, step):
    '''
    Offsets: centre, ±e_a for every a, then (+,+), (+,-), (-,+), (-,-) for every a < b.
    '''
    offsets = [np.zeros(m)]
    for a in range(m):
        e = np.zeros(m)
        e[a] = 1.0
        offsets.extend([e, -e])
    for a in range(m):
        for b in range(a + 1, m):
            for sa, sb in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
                e = np.zeros(m)
                e[a], e[b] = sa, sb
                offsets.append(e)
    return np.array(offsets) * step


def _differentiate(values, m, step):
    center = values[..., 0, :, :]
    plus = values[..., 1:1 + 2 * m:2, :, :]
    minus = values[..., 2:2 + 2 * m:2, :, :]
    d1 = (plus - minus) / (2.0 * step)
    d2 = np.empty(values.shape[:-3] + (m, m) + values.shape[-2:])
    diagonal = (plus - 2.0 * center[..., None, :, :] + minus) / step ** 2
    for a in range(m):
        d2[..., a, a, :, :] = diagonal[..., a, :, :]
    k = 1 + 2 * m
    for a in range(m):
        for b in range(a + 1, m):
            pp, pm, mp, mm = (values[..., k + i, :, :] for i in range(4))
            mixed = (pp - pm - mp + mm) / (4.0 * step ** 2)
            d2[..., a, b, :, :] = mixed
            d2[..., b, a, :, :] = mixed
            k += 4
    d2 = 0.5 * (d2 + np.swapaxes(d2, -4, -3))
    return center, d1, d2


def _check_in_chart(chart, points):
    if not chart.contains(points):
        worst = np.atleast_2d(points)
        raise ChartBoundsError(
            f'Stencil leaves chart {chart.bounds}: coordinates range '
            f'{worst.min(axis=0).tolist()} .. {worst.max(axis=0).tolist()}')


def _jet_batch(immersion, points, step):
    '''
    Evaluates every stencil of every base point in one call to the immersion.
    Returns (position, d1, d2) with leading axis over the points.
    '''
    if step <= 0:
        raise ValueError(f'Finite difference step must be positive, got {step}')
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    m = immersion.dim
    if points.shape[1] != m:
        raise DimensionMismatchError(f'Chart points need {m} coordinates, got {points.shape[1]}')
    offsets = _stencil(m, step)
    samples = (points[:, None, :] + offsets[None, :, :]).reshape(-1, m)
    _check_in_chart(immersion.chart, samples)
    values = immersion(samples).reshape(points.shape[0], offsets.shape[0], immersion.n, 4)
    return _differentiate(values, m, step)


def _check_rank(point, d1):
    m = d1.shape[0]
    singular = np.linalg.svd(d1.reshape(m, -1), compute_uv=False)
    if singular[0] == 0.0 or singular[-1] < RANK_TOLERANCE * singular[0]:
        raise NonImmersionError(
            f'First partials at {np.asarray(point).tolist()} have rank < {m} '
            f'(singular values {singular.tolist()})')


def jets(immersion, points, step=DEFAULT_STEP):
    '''
    Central difference jets at several chart points (single batched evaluation).
    '''
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    position, d1, d2 = _jet_batch(immersion, points, step)
    result = []
    for k, point in enumerate(points):
        _check_rank(point, d1[k])
        result.append(ImmersionJet(point=point.copy(), position=position[k], d1=d1[k], d2=d2[k]))
    return result


def jet(immersion, point, step=DEFAULT_STEP):
    '''
    Position, first and second partials of the immersion at one chart point.

    d1[a] uses (L(p+h·e_a) - L(p-h·e_a))/(2h), d2[a][a] the 3-point stencil and
    d2[a][b] (a != b) the 4-point mixed stencil; d2 is symmetrized.

    ### Parameters:

        **immersion**: ImmersionMap

        **point**: array_like (m,)

        **step**: float
            Stencil step h > 0.

    ### Returns:

        **jet**: ImmersionJet
    '''
    return jets(immersion, [point], step)[0]


####################################################
# Metric and connection

def _metric_arrays(d1):
    return np.einsum('...anq,...bnq->...ab', d1, d1)


def _invert(g):
    eigenvalues = np.linalg.eigvalsh(g)
    if eigenvalues[-1] <= 0.0 or eigenvalues[0] <= 1e-12 * eigenvalues[-1]:
        raise NonImmersionError(f'Metric is singular (eigenvalues {eigenvalues.tolist()})')
    return np.linalg.inv(g)


def _levi_civita(ginv, dg):
    '''
    Γ^c_ab = ½ g^{cd}(∂_a g_db + ∂_b g_da - ∂_d g_ab) with dg[..., c, a, b] = ∂_c g_ab.
    '''
    lower = 0.5 * (np.einsum('...adb->...dab', dg) + np.einsum('...bda->...dab', dg) - dg)
    gamma = np.einsum('...cd,...dab->...cab', ginv, lower)
    return 0.5 * (gamma + np.swapaxes(gamma, -1, -2))


def induced_metric(j):
    '''
    Induced metric g[a][b] = <d1[a], d1[b]> and its inverse.
    '''
    g = _metric_arrays(j.d1)
    return MetricData(g=g, ginv=_invert(g))


def local_geometry(immersion, points, metric_step=NESTED_STEP, jet_step=DEFAULT_STEP):
    '''
    Jets and Christoffel symbols at many chart points. The metric derivatives come
    from central differences of the induced metric at p ± metric_step·e_c; every
    jet needed for every point is evaluated in a single batched call.

    ### Returns:

        **geometry**: list<(ImmersionJet, MetricData)>
    '''
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    m = immersion.dim
    shifts = np.zeros((1 + 2 * m, m))
    for a in range(m):
        shifts[1 + 2 * a, a] = metric_step
        shifts[2 + 2 * a, a] = -metric_step
    bases = (points[:, None, :] + shifts[None, :, :]).reshape(-1, m)
    position, d1, d2 = _jet_batch(immersion, bases, jet_step)
    count = points.shape[0]
    position = position.reshape((count, 1 + 2 * m) + position.shape[1:])
    d1 = d1.reshape((count, 1 + 2 * m) + d1.shape[1:])
    d2 = d2.reshape((count, 1 + 2 * m) + d2.shape[1:])
    g = _metric_arrays(d1)
    dg = (g[:, 1::2] - g[:, 2::2]) / (2.0 * metric_step)

    geometry = []
    for k, point in enumerate(points):
        _check_rank(point, d1[k, 0])
        ginv = _invert(g[k, 0])
        metric = MetricData(g=g[k, 0], ginv=ginv, christoffel=_levi_civita(ginv, dg[k]))
        j = ImmersionJet(point=point.copy(), position=position[k, 0], d1=d1[k, 0], d2=d2[k, 0])
        geometry.append((j, metric))
    return geometry


def christoffel(immersion, point, step=NESTED_STEP, jet_step=DEFAULT_STEP):
    '''
    Induced metric with Christoffel symbols christoffel[c][a][b] = Γ^c_ab at one point.
    '''
    return local_geometry(immersion, [point], step, jet_step)[0][1]


def metric_christoffel(metric_field, point, step=DEFAULT_STEP):
    '''
    Levi-Civita Christoffels of an arbitrary metric field.

    ### Parameters:

        **metric_field**: callable
            Maps a chart point (m,) to the metric matrix (m, m).

        **point**: array_like (m,)

        **step**: float
            Central difference step for ∂g.
    '''
    point = np.asarray(point, dtype=np.float64)
    g = np.asarray(metric_field(point), dtype=np.float64)
    m = g.shape[0]
    dg = np.empty((m, m, m))
    for c in range(m):
        e = np.zeros(m)
        e[c] = step
        dg[c] = (np.asarray(metric_field(point + e)) - np.asarray(metric_field(point - e))) / (2.0 * step)
    ginv = _invert(g)
    return MetricData(g=g, ginv=ginv, christoffel=_levi_civita(ginv, dg))


def metric_field_of(immersion, jet_step=DEFAULT_STEP):
    '''
    The induced metric of an immersion as a point -> matrix callable.
    '''
    def metric_field(point):
        position, d1, _ = _jet_batch(immersion, [point], jet_step)
        return _metric_arrays(d1[0])
    return metric_field


def metric_compatibility_residual(immersion, point, metric_step=NESTED_STEP, jet_step=DEFAULT_STEP):
    '''
    max |∂_c g_ab - Γ^d_ca g_db - Γ^d_cb g_ad| where ∂g is taken from the jet's
    second partials (<d2[c][a], d1[b]> + <d1[a], d2[c][b]>) independently of the
    finite differenced metric the Christoffels were built from.
    '''
    j, metric = local_geometry(immersion, [point], metric_step, jet_step)[0]
    dg = (np.einsum('canq,bnq->cab', j.d2, j.d1) + np.einsum('anq,cbnq->cab', j.d1, j.d2))
    gamma = metric.christoffel
    contraction = (np.einsum('dca,db->cab', gamma, metric.g) + np.einsum('dcb,ad->cab', gamma, metric.g))
    return float(np.max(np.abs(dg - contraction)))


####################################################
# Extrinsic geometry

def second_fundamental_form(j, metric):
    '''
    h[a][b] = d2[a][b] - Σ_c Γ^c_ab·d1[c], followed by projecting out any residual
    tangential part (its largest size is kept as tangential_leak).

    ### Parameters:

        **j**: ImmersionJet

        **metric**: MetricData
            Must carry christoffel.

    ### Returns:

        **sff**: SffTensor in the coordinate basis
    '''
    if metric.christoffel is None:
        raise ValueError('second_fundamental_form needs MetricData with christoffel symbols')
    raw = j.d2 - np.einsum('cab,cnq->abnq', metric.christoffel, j.d1)
    overlap = np.einsum('abnq,dnq->abd', raw, j.d1)
    coefficients = np.einsum('cd,abd->abc', metric.ginv, overlap)
    leak = np.einsum('abc,cnq->abnq', coefficients, j.d1)
    h = raw - leak
    h = 0.5 * (h + np.swapaxes(h, 0, 1))
    leak_size = float(np.sqrt(np.max(np.sum(leak * leak, axis=(-2, -1)))))
    log.debug(f'Second fundamental form at {j.point.tolist()}: tangential leak {leak_size:.3e}')
    return SffTensor(h=h, basis="coordinate", tangential_leak=leak_size)


def gram_schmidt_frame(j, metric=None, first=None):
    '''
    Orthonormal tangent frame by Gram-Schmidt on d1 in coordinate order.

    When a unit tangent first is supplied it becomes e_1, and the coordinate
    vector most dependent on it is dropped before orthonormalizing the rest.

    ### Parameters:

        **j**: ImmersionJet

        **metric**: MetricData, optional

        **first**: numpy.ndarray (n, 4), optional
            Distinguished unit tangent.

    ### Returns:

        **frame**: Frame
    '''
    g = metric.g if metric is not None else _metric_arrays(j.d1)
    m = j.dim
    accepted = []
    candidates = list(range(m))
    if first is not None:
        overlap = inner(j.d1, first)
        c = np.linalg.solve(g, overlap)
        remainder = first - np.einsum('a,anq->nq', c, j.d1)
        if np.sqrt(inner(remainder, remainder)) > 1e-6 * max(1.0, np.sqrt(inner(first, first))):
            raise NotNormalError('Supplied e1 is not tangent to the immersion')
        c = c / np.sqrt(c @ g @ c)
        accepted.append(c)
        # Drop the coordinate direction with the smallest remainder after removing e1.
        remainders = [np.sqrt(max(g[a, a] - (g[a] @ c) ** 2, 0.0) / g[a, a]) for a in range(m)]
        candidates.remove(int(np.argmin(remainders)))

    for a in candidates:
        v = np.zeros(m)
        v[a] = 1.0
        for u in accepted:
            v = v - (u @ g @ v) * u
        length = np.sqrt(max(v @ g @ v, 0.0))
        if length < RANK_TOLERANCE * np.sqrt(g[a, a]):
            raise NonImmersionError(f'Gram-Schmidt breakdown at coordinate {a} of {j.point.tolist()}')
        accepted.append(v / length)

    coefficients = np.array(accepted)
    vectors = np.einsum('ia,anq->inq', coefficients, j.d1)
    return Frame(vectors=vectors, coefficients=coefficients)


def mean_curvature(sff, metric=None):
    '''
    H = (1/m) Σ g^{ab} h[a][b] (or the plain trace in an orthonormal frame).
    '''
    m = sff.dim
    if sff.basis == "frame":
        trace = np.einsum('iinq->nq', sff.h)
    else:
        if metric is None:
            raise ValueError('A coordinate basis second fundamental form needs the metric')
        trace = np.einsum('ab,abnq->nq', metric.ginv, sff.h)
    return trace / m


def shape_operator(sff, metric, frame, zeta, tol=1e-6):
    '''
    A_ζ in the frame: A[i][j] = <h(e_i, e_j), ζ>.

    ### Parameters:

        **sff**: SffTensor (coordinate or frame basis)

        **metric**: MetricData (unused for frame basis tensors)

        **frame**: Frame

        **zeta**: numpy.ndarray (n, 4)
            Normal vector.

    ### Returns:

        **A**: numpy.ndarray (m, m), symmetric
    '''
    tangential = inner(frame.vectors, zeta)
    scale = max(1.0, np.sqrt(inner(zeta, zeta)))
    if np.max(np.abs(tangential)) > tol * scale:
        raise NotNormalError(f'ζ has tangential components {np.asarray(tangential).tolist()}')
    hf = sff.in_frame(frame)
    A = np.asarray(inner(hf.h, zeta))
    return 0.5 * (A + A.T)


def sectional_curvature(sff, X, Y, metric=None):
    '''
    Sectional curvature of span{X, Y} from the Gauss equation of a flat ambient:
    K = [<h(X,X),h(Y,Y)> - |h(X,Y)|²] / [|X|²|Y|² - <X,Y>²].

    X and Y are component vectors in the tensor's basis; a coordinate basis tensor
    needs the metric for the denominator.
    '''
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    if sff.basis == "frame":
        g = np.eye(sff.dim)
    elif metric is None:
        raise ValueError('A coordinate basis second fundamental form needs the metric')
    else:
        g = metric.g
    hXX, hYY, hXY = sff.evaluate(X, X), sff.evaluate(Y, Y), sff.evaluate(X, Y)
    xx, yy, xy = X @ g @ X, Y @ g @ Y, X @ g @ Y
    area = xx * yy - xy ** 2
    if area <= 1e-14 * xx * yy or xx * yy == 0.0:
        raise ValueError('Sectional curvature of a degenerate plane')
    return float((inner(hXX, hYY) - inner(hXY, hXY)) / area)


def orthonormal_plane(g, X, Y):
    '''
    g-orthonormal basis (X', Y') of span{X, Y} by Gram-Schmidt. When Y is within
    PLANE_FLOOR of X's direction it is replaced by the coordinate axis least
    aligned with X, so the plane handed to a curvature formula has unit area.

    ### Parameters:

        **g**: numpy.ndarray (m, m)

        **X**, **Y**: array_like (m,)
            Component vectors; X must be non-zero.

    ### Returns:

        **(X', Y')**: numpy.ndarray (m,), numpy.ndarray (m,)
    '''
    g = np.asarray(g, dtype=np.float64)
    X = np.asarray(X, dtype=np.float64)
    length = np.sqrt(X @ g @ X)
    if not length > 0.0:
        raise ValueError('Plane needs a non-zero first vector')
    X = X / length

    def _complement(v):
        v = v - (X @ g @ v) * X
        return v, np.sqrt(max(v @ g @ v, 0.0))

    Y = np.asarray(Y, dtype=np.float64)
    scale = np.sqrt(max(Y @ g @ Y, 0.0))
    rest, size = _complement(Y)
    if not size > PLANE_FLOOR * scale:
        axes = np.eye(len(X))
        alignment = [abs(X @ g @ e) / np.sqrt(e @ g @ e) for e in axes]
        rest, size = _complement(axes[int(np.argmin(alignment))])
    return X, rest / size


def codazzi_residual(immersion, point, step=NESTED_STEP, jet_step=DEFAULT_STEP, metric_step=NESTED_STEP):
    '''
    max over (a, b, c) of |(∇h)(∂_a, ∂_b, ∂_c) - (∇h)(∂_b, ∂_a, ∂_c)|, where

        (∇h)(∂_a, ∂_b, ∂_c) = (∂_a h[b][c])^⊥ - h(∇_a ∂_b, ∂_c) - h(∂_b, ∇_a ∂_c)

    and ∂_a h comes from central differences of the h field at p ± step·e_a.
    Vanishes for every immersion into the flat H^n, up to the nested FD noise.
    '''
    point = np.asarray(point, dtype=np.float64)
    m = immersion.dim
    shifts = np.zeros((1 + 2 * m, m))
    for a in range(m):
        shifts[1 + 2 * a, a] = step
        shifts[2 + 2 * a, a] = -step
    geometry = local_geometry(immersion, point[None, :] + shifts, metric_step, jet_step)
    fields = np.array([second_fundamental_form(j, metric).h for j, metric in geometry])
    j0, metric0 = geometry[0]
    h0 = fields[0]
    gamma = metric0.christoffel

    dh = (fields[1::2] - fields[2::2]) / (2.0 * step)
    overlap = np.einsum('abcnq,dnq->abcd', dh, j0.d1)
    coefficients = np.einsum('ed,abcd->abce', metric0.ginv, overlap)
    dh_normal = dh - np.einsum('abce,enq->abcnq', coefficients, j0.d1)
    nabla_h = (dh_normal
               - np.einsum('eab,ecnq->abcnq', gamma, h0)
               - np.einsum('eac,benq->abcnq', gamma, h0))
    asymmetry = nabla_h - np.swapaxes(nabla_h, 0, 1)
    residual = float(np.sqrt(np.max(np.sum(asymmetry * asymmetry, axis=(-2, -1)))))
    log.debug(f'Codazzi residual at {point.tolist()}: {residual:.3e}')
    return residual


def spaceform_curvature(c, X, Y, Z):
    '''
    Curvature tensor R(X, Y)Z of the quaternion space form of constant
    quaternion sectional curvature 4c:

        c{ g(Y,Z)X - g(X,Z)Y + Σ_φ [g(φY,Z)φX - g(φX,Z)φY + 2g(X,φY)φZ] }
    '''
    X, Y, Z = (np.asarray(v, dtype=np.float64) for v in (X, Y, Z))
    if not (X.shape == Y.shape == Z.shape):
        raise DimensionMismatchError(f'Shapes {X.shape}, {Y.shape}, {Z.shape} differ')
    result = inner(Y, Z) * X - inner(X, Z) * Y
    for phi in STRUCTURES:
        pX, pY, pZ = apply_structure(phi, X), apply_structure(phi, Y), apply_structure(phi, Z)
        result = result + inner(pY, Z) * pX - inner(pX, Z) * pY + 2.0 * inner(X, pY) * pZ
    return c * result


####################################################
# Intrinsic curvature (verification only)

def riemann_tensor(metric_field, point, step=CURVATURE_STEP, christoffel_step=NESTED_STEP):
    '''
    R[d, a, b, c] = R^d_abc, the components of R(∂_a, ∂_b)∂_c, from central
    differences of the Christoffel field:

        R^d_abc = ∂_a Γ^d_bc - ∂_b Γ^d_ac + Γ^d_ae Γ^e_bc - Γ^d_be Γ^e_ac

    ### Returns:

        **(R, metric)**: numpy.ndarray (m, m, m, m), MetricData at the point
    '''
    point = np.asarray(point, dtype=np.float64)
    center = metric_christoffel(metric_field, point, christoffel_step)
    m = center.g.shape[0]
    dgamma = np.empty((m, m, m, m))
    for a in range(m):
        e = np.zeros(m)
        e[a] = step
        plus = metric_christoffel(metric_field, point + e, christoffel_step).christoffel
        minus = metric_christoffel(metric_field, point - e, christoffel_step).christoffel
        dgamma[a] = (plus - minus) / (2.0 * step)
    G = center.christoffel
    R = (np.einsum('adbc->dabc', dgamma) - np.einsum('bdac->dabc', dgamma)
         + np.einsum('dae,ebc->dabc', G, G) - np.einsum('dbe,eac->dabc', G, G))
    return R, center


def intrinsic_sectional_curvature(metric_field, point, X, Y, step=CURVATURE_STEP,
                                  christoffel_step=NESTED_STEP):
    '''
    <R(X,Y)Y, X> / (|X|²|Y|² - <X,Y>²) for coordinate component vectors X, Y.
    '''
    R, metric = riemann_tensor(metric_field, point, step, christoffel_step)
    return sectional_from_riemann(R, metric.g, X, Y)


def sectional_from_riemann(R, g, X, Y):
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    numerator = np.einsum('dabc,a,b,c,de,e->', R, X, Y, Y, g, X)
    area = (X @ g @ X) * (Y @ g @ Y) - (X @ g @ Y) ** 2
    if area <= 0.0:
        raise ValueError('Sectional curvature of a degenerate plane')
    return float(numerator / area)
