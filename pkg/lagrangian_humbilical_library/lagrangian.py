'''
Lagrangian and H-umbilical tests on top of the numerical immersion geometry.

An H-umbilical profile is read off the second fundamental form in an orthonormal
frame e_1..e_n whose first vector is the distinguished direction:

    h(e1, e1) = λ1·Ie1 + λ2·Je1 + λ3·Ke1
    h(e1, ej) = μ1·Iej + μ2·Jej + μ3·Kej          j >= 2
    h(ej, ej) = μ1·Ie1 + μ2·Je1 + μ3·Ke1          j >= 2
    h(ej, ek) = 0                                  j != k >= 2

with γ_i = (λ_i + (n-1)μ_i)/n, so that H = Σ γ_i φ_i e1.
'''

__version__ = "0.0.1"
__status__ = "Development"

import logging
from dataclasses import dataclass, field

import numpy as np

from lagrangian_humbilical_library.quat_core import (
    STRUCTURES, DimensionMismatchError, apply_structure, inner, norm)
from lagrangian_humbilical_library.immersion import (
    CURVATURE_STEP, DEFAULT_STEP, Frame, gram_schmidt_frame, local_geometry,
    mean_curvature, second_fundamental_form, shape_operator)

# Init the logger.
log = logging.getLogger(__name__)

# |H| below this is a minimal point.
MINIMAL_TOLERANCE = 1e-6

# Tangential parts of -φH shorter than this fraction of |H| are treated as zero.
ZERO_FRACTION = 1e-5

ANGLE_TOLERANCE = 1e-4

# A structure slot with max(|λ_i|, |μ_i|) at or below this carries no curvature.
ACTIVE_TOLERANCE = 1e-6

GAMMA_TOLERANCE = 1e-8


class MinimalPointError(ValueError):
    '''
    Raised when the mean curvature vanishes, so no distinguished direction exists.
    '''


class NotHUmbilicalError(ValueError):
    '''
    Raised when the tangential parts of -IH, -JH, -KH are not parallel.
    '''


class ReconstructionNotApplicable(ValueError):
    '''
    Raised when an active structure slot has γ_i ≈ 0, where α_i, β_i are undefined.
    '''


####################################################
# Domain types

@dataclass(frozen=True)
class HUmbilicalProfile:
    lambdas: np.ndarray
    mus: np.ndarray
    gammas: np.ndarray
    e1: np.ndarray
    n: int
    pattern_residual: float

    @classmethod
    def from_scalars(cls, lambdas, mus, n, e1=None, pattern_residual=0.0):
        '''
        Builds a profile from (λ1, λ2, λ3) and (μ1, μ2, μ3), computing γ.
        '''
        lambdas = np.asarray(lambdas, dtype=np.float64)
        mus = np.asarray(mus, dtype=np.float64)
        gammas = (lambdas + (n - 1) * mus) / n
        e1 = np.zeros((n, 4)) if e1 is None else np.asarray(e1, dtype=np.float64)
        return cls(lambdas=lambdas, mus=mus, gammas=gammas, e1=e1, n=n,
                   pattern_residual=float(pattern_residual))

    def gamma_consistency(self):
        return float(np.max(np.abs(self.gammas - (self.lambdas + (self.n - 1) * self.mus) / self.n)))

    def active_slots(self, tol=ACTIVE_TOLERANCE):
        return [i for i in range(3) if max(abs(self.lambdas[i]), abs(self.mus[i])) > tol]

    def alphas(self):
        '''
        α_i = (λ_i - 3μ_i)/γ_i³ per structure slot; NaN where γ_i vanishes.
        '''
        with np.errstate(divide='ignore', invalid='ignore'):
            return np.where(np.abs(self.gammas) > GAMMA_TOLERANCE,
                            (self.lambdas - 3.0 * self.mus) / self.gammas ** 3, np.nan)

    def betas(self):
        with np.errstate(divide='ignore', invalid='ignore'):
            return np.where(np.abs(self.gammas) > GAMMA_TOLERANCE, self.mus / self.gammas, np.nan)

    def shape_eigenvalues(self):
        '''
        The two eigenvalues of A_H: (Σ λ_i γ_i, Σ μ_i γ_i).
        '''
        return float(self.lambdas @ self.gammas), float(self.mus @ self.gammas)

    def mu_bar(self):
        return float(np.sqrt(self.mus @ self.mus))

    def is_valid(self, tol=1e-5):
        return self.pattern_residual <= tol

    def scalars(self):
        return {
            "lambda": [float(v) for v in self.lambdas],
            "mu": [float(v) for v in self.mus],
            "gamma": [float(v) for v in self.gammas],
        }


@dataclass(frozen=True)
class EigenReport:
    eigenvalues: np.ndarray
    multiplicities: tuple
    expected: tuple
    residual: float
    minimal: bool = False


@dataclass(frozen=True)
class CodazziScalars:
    '''
    Codazzi scalar system along e1 at one point of an extensor.

    mu_transport holds the three residuals e1(μ_i) - (λ_i - 2μ_i)f - (λ×μ)_i. The
    other residual fields are the largest residuals of the transverse equations:
    e_j(λ) and e_j(μ) against the connection, the off-diagonal connection terms
    and μ_i ω_1^j(e_j). f_slot (the single J-slot quotient) and f_bar (the
    μ-weighted quotient) are alternative connection estimates, None where their
    denominator vanishes.
    '''
    s: float
    f: float
    f_connection: float
    lambdas: np.ndarray
    mus: np.ndarray
    e1_mu: np.ndarray
    mu_transport: np.ndarray
    lambda_transverse: float
    off_diagonal: float
    mu_transverse: float
    mu_connection: float
    f_slot: float = None
    f_bar: float = None

    def max_residual(self):
        return float(max(np.max(np.abs(self.mu_transport)), self.lambda_transverse, self.off_diagonal,
                         self.mu_transverse, self.mu_connection, abs(self.f - self.f_connection)))


@dataclass(frozen=True)
class PointAnalysis:
    '''
    Everything extracted at one chart point: frame, h in the frame, H and the profile.
    '''
    point: np.ndarray
    frame: Frame
    sff: object
    H: np.ndarray
    profile: HUmbilicalProfile
    metric: object = field(repr=False, default=None)
    minimal: bool = False


####################################################
# Lagrangian condition

def totally_real_residual(j):
    '''
    max over φ in {I, J, K} and a, b of |<φ d1[a], d1[b]>|.
    '''
    residual = 0.0
    for phi in STRUCTURES:
        rotated = apply_structure(phi, j.d1)
        pairing = inner(rotated[:, None, :, :], j.d1[None, :, :, :])
        residual = max(residual, float(np.max(np.abs(pairing))))
    return residual


def is_lagrangian(j, tol=1e-6):
    '''
    Lagrangian test of an n-dimensional immersion into H^n.

    ### Parameters:

        **j**: ImmersionJet

        **tol**: float

    ### Returns:

        **(verdict, residual)**: (bool, float)
    '''
    m = j.dim
    n = j.d1.shape[1]
    if m != n:
        raise DimensionMismatchError(f'A {m}-dimensional immersion into H^{n} cannot be Lagrangian')
    residual = totally_real_residual(j)
    return residual <= tol, residual


####################################################
# H-umbilical profile

def distinguished_direction(H, frame, angle_tol=ANGLE_TOLERANCE, zero_fraction=ZERO_FRACTION):
    '''
    Common direction of the tangential parts of -IH, -JH and -KH.

    ### Parameters:

        **H**: numpy.ndarray (n, 4)
            Mean curvature vector.

        **frame**: Frame

    ### Returns:

        **e1**: numpy.ndarray (n, 4), unit tangent oriented so the dominant γ_i is positive
    '''
    size_H = norm(H)
    if size_H <= MINIMAL_TOLERANCE:
        raise MinimalPointError(f'Mean curvature |H| = {size_H:.3e}, minimal point')
    parts = [frame.tangential_part(-apply_structure(phi, H)) for phi in STRUCTURES]
    sizes = [norm(p) for p in parts]
    floor = zero_fraction * size_H
    active = [(p, size) for p, size in zip(parts, sizes) if size > floor]
    if not active:
        raise NotHUmbilicalError('H has no component along I(TM), J(TM) or K(TM)')
    lead, lead_size = max(active, key=lambda item: item[1])
    direction = lead / lead_size
    for p, size in active:
        perpendicular = p - inner(p, direction) * direction
        if norm(perpendicular) > max(angle_tol * size, floor):
            raise NotHUmbilicalError(
                f'Tangential parts of -φH are not parallel (sizes {sizes}, '
                f'perpendicular {norm(perpendicular):.3e})')
    return direction


def extract_profile(sff, frame):
    '''
    Reads λ_i, μ_i off h expressed in a frame whose first vector is e1.

    μ_i is averaged over j = 2..n. pattern_residual is the largest deviation of any
    frame entry h(e_a, e_b) from the H-umbilical pattern rebuilt from the averaged
    scalars, so unequal h(ej, ej), nonzero h(ej, ek) and components outside
    span{φ_i e_a} all count against it.

    ### Parameters:

        **sff**: SffTensor (frame basis)

        **frame**: Frame

    ### Returns:

        **profile**: HUmbilicalProfile
    '''
    h = sff.in_frame(frame).h
    m = h.shape[0]
    if m < 2:
        raise ValueError('An H-umbilical profile needs intrinsic dimension >= 2')
    e1 = frame[0]
    rotated = [apply_structure(phi, frame.vectors) for phi in STRUCTURES]
    lambdas = np.array([inner(h[0, 0], r[0]) for r in rotated])
    mus = np.array([np.mean([inner(h[j, j], r[0]) for j in range(1, m)]) for r in rotated])

    expected = np.zeros_like(h)
    for i, r in enumerate(rotated):
        expected[0, 0] += lambdas[i] * r[0]
        for j in range(1, m):
            expected[0, j] += mus[i] * r[j]
            expected[j, 0] += mus[i] * r[j]
            expected[j, j] += mus[i] * r[0]
    deviation = h - expected
    residual = float(np.sqrt(np.max(np.sum(deviation * deviation, axis=(-2, -1)))))
    return HUmbilicalProfile.from_scalars(lambdas, mus, m, e1=e1, pattern_residual=residual)


def reconstruct_h(profile, H, X, Y):
    '''
    Evaluates h(X, Y) from the profile through α_i = (λ_i - 3μ_i)/γ_i³, β_i = μ_i/γ_i
    and H_i = γ_i φ_i e1:

        Σ_i α_i<φ_iX,H><φ_iY,H>H_i + β_i(<X,Y>H_i + <φ_iY,H>φ_iX + <φ_iX,H>φ_iY)

    Structure slots with λ_i = μ_i = 0 contribute nothing and are skipped.

    ### Raises:

        **ReconstructionNotApplicable**: an active slot has γ_i ≈ 0
    '''
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    result = np.zeros_like(X)
    for i, phi in enumerate(STRUCTURES):
        lam, mu, gam = profile.lambdas[i], profile.mus[i], profile.gammas[i]
        if max(abs(lam), abs(mu)) <= ACTIVE_TOLERANCE:
            continue
        if abs(gam) <= GAMMA_TOLERANCE:
            raise ReconstructionNotApplicable(
                f'γ of the {phi.name} slot is {gam:.3e} while λ = {lam:.6g}, μ = {mu:.6g}')
        alpha = (lam - 3.0 * mu) / gam ** 3
        beta = mu / gam
        H_i = gam * apply_structure(phi, profile.e1)
        phi_X, phi_Y = apply_structure(phi, X), apply_structure(phi, Y)
        result = (result
                  + alpha * inner(phi_X, H) * inner(phi_Y, H) * H_i
                  + beta * (inner(X, Y) * H_i + inner(phi_Y, H) * phi_X + inner(phi_X, H) * phi_Y))
    return result


def reconstruction_residual(profile, sff, frame, H):
    '''
    max over frame pairs of |reconstruct_h(e_a, e_b) - h(e_a, e_b)|.
    '''
    h = sff.in_frame(frame).h
    m = h.shape[0]
    worst = 0.0
    for a in range(m):
        for b in range(a, m):
            worst = max(worst, norm(reconstruct_h(profile, H, frame[a], frame[b]) - h[a, b]))
    return worst


def eigencheck_AH(sff, frame, H, profile, tol=1e-5):
    '''
    Eigen-structure of the shape operator A_H.

    Eigenvalues are sorted and split at the largest gap; the size-one group is
    matched against Σλ_iγ_i and the other against Σμ_iγ_i. When both expected
    values coincide a single cluster is accepted.

    ### Returns:

        **report**: EigenReport
    '''
    expected = profile.shape_eigenvalues()
    if norm(H) <= MINIMAL_TOLERANCE:
        eigenvalues = np.linalg.eigvalsh(shape_operator(sff, None, frame, H))
        return EigenReport(eigenvalues=eigenvalues, multiplicities=(len(eigenvalues),),
                           expected=expected, residual=float(np.max(np.abs(eigenvalues))),
                           minimal=True)

    eigenvalues = np.sort(np.linalg.eigvalsh(shape_operator(sff, None, frame, H)))
    m = len(eigenvalues)
    lam, mu = expected
    scale = 1.0 + float(np.max(np.abs(eigenvalues)))

    if eigenvalues[-1] - eigenvalues[0] <= tol * scale:
        residual = max(float(np.max(np.abs(eigenvalues - mu))), abs(lam - mu))
        return EigenReport(eigenvalues=eigenvalues, multiplicities=(m,), expected=expected, residual=residual)

    split = int(np.argmax(np.diff(eigenvalues))) + 1
    low, high = eigenvalues[:split], eigenvalues[split:]
    spread = max(low[-1] - low[0], high[-1] - high[0])
    candidates = []
    if len(low) == 1:
        candidates.append(max(abs(low[0] - lam), float(np.max(np.abs(high - mu)))))
    if len(high) == 1:
        candidates.append(max(abs(high[0] - lam), float(np.max(np.abs(low - mu)))))
    if not candidates:
        # Multiplicities other than (1, m-1): the pattern does not hold.
        residual = float(eigenvalues[-1] - eigenvalues[0])
    else:
        residual = max(min(candidates), float(spread))
    log.debug(f'A_H eigenvalues {eigenvalues.tolist()} expected {expected}')
    return EigenReport(eigenvalues=eigenvalues, multiplicities=(len(low), len(high)),
                       expected=expected, residual=float(residual))


def cubic_symmetry_check(sff, frame):
    '''
    max over φ_i and frame triples of |<h(e_a,e_b), φ_i e_c> - <h(e_c,e_b), φ_i e_a>|.
    '''
    h = sff.in_frame(frame).h
    residual = 0.0
    for phi in STRUCTURES:
        rotated = apply_structure(phi, frame.vectors)
        cubic = np.einsum('abnq,cnq->abc', h, rotated)
        residual = max(residual, float(np.max(np.abs(cubic - np.transpose(cubic, (2, 1, 0))))))
    return residual


def curvature_branch(profile, tol=ACTIVE_TOLERANCE):
    '''
    Constructive branch of the classification: "minimal" (H = 0), "flat" (μ = 0),
    "constant_curvature" (Σ μ_i(λ_i - 2μ_i) = 0, the pseudo-sphere case) or
    "non_constant_curvature" (an extensor of the unit hypersphere).
    '''
    if np.max(np.abs(profile.gammas)) <= tol:
        return "minimal"
    if np.max(np.abs(profile.mus)) <= tol:
        return "flat"
    if abs(profile.mus @ (profile.lambdas - 2.0 * profile.mus)) <= tol * (1.0 + profile.mus @ profile.mus):
        return "constant_curvature"
    return "non_constant_curvature"


####################################################
# Frames and per-point analysis

def adapted_frame(j, metric=None):
    '''
    Orthonormal frame with e1 = d1[0]/|d1[0]|, the s-direction of an extensor chart.
    '''
    first = j.d1[0] / norm(j.d1[0])
    return gram_schmidt_frame(j, metric, first=first)


def analyse_point(j, metric, use_distinguished=True, sff=None):
    '''
    Second fundamental form, H and H-umbilical profile at one jet.

    With use_distinguished the frame starts from the distinguished direction; at a
    minimal point, or without it, the adapted s-frame is used instead.

    ### Parameters:

        **j**: ImmersionJet

        **metric**: MetricData with christoffel

        **sff**: SffTensor already computed from j, optional

    ### Returns:

        **analysis**: PointAnalysis
    '''
    if sff is None:
        sff = second_fundamental_form(j, metric)
    H = mean_curvature(sff, metric)
    minimal = norm(H) <= MINIMAL_TOLERANCE
    frame = adapted_frame(j, metric)
    if use_distinguished and not minimal:
        e1 = distinguished_direction(H, frame)
        frame = gram_schmidt_frame(j, metric, first=e1)
    sff_frame = sff.in_frame(frame)
    profile = extract_profile(sff_frame, frame)
    return PointAnalysis(point=j.point, frame=frame, sff=sff_frame, H=H, profile=profile,
                         metric=metric, minimal=minimal)


####################################################
# Codazzi scalar system

def _unit_field_derivative(j, a):
    '''
    ∂_a of the unit vector field d1[0]/|d1[0]|.
    '''
    r = norm(j.d1[0])
    return j.d2[a, 0] / r - j.d1[0] * inner(j.d2[a, 0], j.d1[0]) / r ** 3


def _cross(lambdas, mus):
    return np.array([
        lambdas[1] * mus[2] - lambdas[2] * mus[1],
        lambdas[2] * mus[0] - lambdas[0] * mus[2],
        lambdas[0] * mus[1] - lambdas[1] * mus[0],
    ])


def codazzi_scalar_check(extensor, s_grid, base_point=None, step=CURVATURE_STEP, jet_step=DEFAULT_STEP):
    '''
    Evaluates the Codazzi scalar system of an extensor of the unit hypersphere along
    its s-lines. λ_i and μ_i are extracted numerically in the adapted frame
    (e1 = ∂s), their derivatives along e1 and e_j come from central differences of
    the extracted profile, and f comes from <∇_X Y, e1> = -f<X,Y> on the
    coordinate fields ∂u_j.

    ### Parameters:

        **extensor**: Extensor
            Must carry curve and a spherical base.

        **s_grid**: sequence of float

        **base_point**: array_like (n-1,), optional
            Point on the sphere chart, its centre by default.

    ### Returns:

        **scalars**: list<CodazziScalars>
    '''
    base = getattr(extensor, 'base', None)
    if getattr(extensor, 'curve', None) is None or base is None or base.kind != "sphere":
        raise ValueError('codazzi_scalar_check needs an extensor of the unit hypersphere')
    m = extensor.dim
    if base_point is None:
        base_point = base.chart.center
    base_point = np.asarray(base_point, dtype=np.float64)

    results = []
    for s in np.atleast_1d(np.asarray(s_grid, dtype=np.float64)):
        point = np.concatenate([[s], base_point])
        shifts = np.zeros((1 + 2 * m, m))
        for a in range(m):
            shifts[1 + 2 * a, a] = step
            shifts[2 + 2 * a, a] = -step
        geometry = local_geometry(extensor, point[None, :] + shifts, step, jet_step)
        profiles = []
        for j, metric in geometry:
            frame = adapted_frame(j, metric)
            profiles.append(extract_profile(second_fundamental_form(j, metric).in_frame(frame), frame))
        j0, metric0 = geometry[0]
        frame0 = adapted_frame(j0, metric0)
        lambdas, mus = profiles[0].lambdas, profiles[0].mus

        grad_lambda = np.array([(profiles[1 + 2 * a].lambdas - profiles[2 + 2 * a].lambdas) / (2 * step)
                                for a in range(m)])
        grad_mu = np.array([(profiles[1 + 2 * a].mus - profiles[2 + 2 * a].mus) / (2 * step)
                            for a in range(m)])
        C = frame0.coefficients
        frame_lambda = C @ grad_lambda
        frame_mu = C @ grad_mu

        # Connection forms ω_1^k(e_j) = <∇_{e_j} e1, e_k>.
        de1 = np.array([_unit_field_derivative(j0, a) for a in range(m)])
        along = np.einsum('ja,anq->jnq', C, de1)
        omega = np.array([[inner(along[jj], frame0[k]) for k in range(m)] for jj in range(m)])

        f_value = float(np.mean([-inner(j0.d2[a, a], frame0[0]) / metric0.g[a, a] for a in range(1, m)]))
        f_connection = float(np.mean([omega[jj, jj] for jj in range(1, m)]))
        e1_mu = frame_mu[0]
        mu_transport = e1_mu - (lambdas - 2.0 * mus) * f_value - _cross(lambdas, mus)

        lambda_transverse = mu_transverse = off_diagonal = mu_connection = 0.0
        for jj in range(1, m):
            lambda_transverse = max(lambda_transverse, float(np.max(np.abs(
                frame_lambda[jj] - (lambdas - 2.0 * mus) * omega[0, jj]))))
            mu_transverse = max(mu_transverse, float(np.max(np.abs(frame_mu[jj] - 3.0 * mus * omega[0, jj]))))
            mu_connection = max(mu_connection, float(np.max(np.abs(mus * omega[0, jj]))))
            for k in range(1, m):
                if k != jj:
                    off_diagonal = max(off_diagonal, float(np.max(np.abs((lambdas - 2.0 * mus) * omega[jj, k]))))

        denominator = lambdas[1] - 2.0 * mus[1]
        f_slot = None
        if abs(denominator) > ACTIVE_TOLERANCE:
            f_slot = float((e1_mu[1] - lambdas[2] * mus[0] + lambdas[0] * mus[2]) / denominator)
        weighted = mus @ (lambdas - 2.0 * mus)
        f_bar = float(mus @ e1_mu / weighted) if abs(weighted) > ACTIVE_TOLERANCE else None

        log.debug(f'Codazzi scalars at s={s:.6g}: f={f_value:.6g}, mu_transport={mu_transport.tolist()}')
        results.append(CodazziScalars(
            s=float(s), f=f_value, f_connection=f_connection, lambdas=lambdas, mus=mus, e1_mu=e1_mu,
            mu_transport=mu_transport, lambda_transverse=lambda_transverse, off_diagonal=off_diagonal,
            mu_transverse=mu_transverse, mu_connection=mu_connection, f_slot=f_slot, f_bar=f_bar))
    return results
