'''
Named families, check suites and the verification report.

run_suite() builds a family, sweeps its chart grid once (every per-point quantity
is computed in the same pass), runs the nested finite difference checks on a
deterministic strided subgrid and aggregates everything into a
VerificationReport of named residuals against tolerances.
'''

__version__ = "0.0.1"
__status__ = "Development"

import timeit
import logging
from dataclasses import dataclass, field

import numpy as np

from lagrangian_humbilical_library.quat_core import DimensionMismatchError
from lagrangian_humbilical_library.immersion import (
    CURVATURE_STEP, DEFAULT_STEP, NESTED_STEP, codazzi_residual, gram_schmidt_frame, local_geometry,
    mean_curvature, metric_compatibility_residual, metric_field_of,
    orthonormal_plane, riemann_tensor, second_fundamental_form,
    sectional_curvature, sectional_from_riemann)
from lagrangian_humbilical_library.lagrangian import (
    HUmbilicalProfile, NotHUmbilicalError, ReconstructionNotApplicable,
    analyse_point, codazzi_scalar_check, cubic_symmetry_check, curvature_branch,
    eigencheck_AH, reconstruction_residual, totally_real_residual)
from lagrangian_humbilical_library.families import (
    DEFAULT_GRID_POINTS, build_extensor, circle_curve, curve_coefficients,
    extensor_profile_match, isometric_tests, line_curve, line_immersion,
    pseudo_sphere_curve, totally_geodesic_test, totally_real_test,
    twisted_curve, unit_sphere_immersion)
from lagrangian_humbilical_library.warped import (
    WarpedModel, leaf_curvature_check, leaf_intrinsic_curvature_check,
    spherical_distribution_check, warped_christoffel_closed, warped_metric,
    warping_from_curve, warping_ode_check)
from lagrangian_humbilical_library.grid_sweeper import sweep

# Init the logger.
log = logging.getLogger(__name__)

SUITES = ("lagrangian", "humbilical", "totally_real", "totally_geodesic", "warped", "gauss_codazzi")

DEFAULT_TOLERANCES = {
    "lagrangian.totally_real": 1e-6,
    "lagrangian.cubic_symmetry": 1e-5,
    "humbilical.pattern": 1e-5,
    "humbilical.gamma": 1e-10,
    "humbilical.reconstruction": 1e-5,
    "humbilical.eigen_clusters": 1e-5,
    "humbilical.profile_match": 1e-4,
    "humbilical.codazzi_scalars": 1e-4,
    "humbilical.sectional_curvature": 1e-3,
    "totally_real.verdict": 1e-8,
    "totally_real.direct": 1e-6,
    "totally_real.f_isometric": 1e-6,
    "totally_geodesic.max_h": 1e-6,
    "warped.metric_form": 1e-6,
    "warped.christoffel": 1e-5,
    "warped.spherical_distribution": 1e-4,
    "warped.leaf_identities": 1e-6,
    "warped.warping_ode": 1e-8,
    "warped.leaf_curvature": 1e-6,
    "gauss_codazzi.codazzi": 1e-3,
    "gauss_codazzi.gauss": 1e-3,
    "gauss_codazzi.metric_compatibility": 1e-5,
}

FAMILY_DEFAULTS = {
    "pseudo_sphere": {"b": 0.5, "n": 3},
    "circle_extensor": {"n": 3, "plane": "i"},
    "line_extensor": {"n": 3, "a": 0.5},
    "twisted_extensor": {"n": 3, "tau": 0.5},
    "planar_cone": {"b": 0.5},
}

# Points of the strided subgrid used by the nested checks.
NESTED_SAMPLES = 25

PLANES_PER_POINT = 4

PLANAR_CONE_DIRECTION = (0.6, 0.8)


####################################################
# Families

@dataclass(frozen=True)
class Family:
    kind: str
    params: dict
    extensor: object
    geodesic: bool

    @property
    def spherical_base(self):
        return self.extensor.base.kind == "sphere"

    def descriptor(self):
        return {"kind": self.kind, "params": {key: self.params[key] for key in sorted(self.params)}}


def _coerce(kind, key, value):
    default = FAMILY_DEFAULTS[kind][key]
    try:
        return type(default)(value)
    except (TypeError, ValueError):
        raise ValueError(f'Parameter {key}={value!r} of family {kind} must be {type(default).__name__}')


def build_family(kind, params=None):
    '''
    Builds a named family.

    ### Parameters:

        **kind**: str
            One of FAMILY_DEFAULTS.

        **params**: dict
            Overrides of the family defaults; string values are converted.

    ### Returns:

        **family**: Family
    '''
    if kind not in FAMILY_DEFAULTS:
        raise ValueError(f'Unknown family {kind!r}, expected one of {sorted(FAMILY_DEFAULTS)}')
    params = dict(params or {})
    unknown = sorted(set(params) - set(FAMILY_DEFAULTS[kind]))
    if unknown:
        raise ValueError(f'Unknown parameter(s) {unknown} for family {kind}')
    values = dict(FAMILY_DEFAULTS[kind])
    values.update({key: _coerce(kind, key, value) for key, value in params.items()})

    if kind == "pseudo_sphere":
        extensor = build_extensor(pseudo_sphere_curve(values["b"]), unit_sphere_immersion(values["n"]))
    elif kind == "circle_extensor":
        extensor = build_extensor(circle_curve(values["plane"]), unit_sphere_immersion(values["n"]))
    elif kind == "line_extensor":
        extensor = build_extensor(line_curve(a=values["a"]), unit_sphere_immersion(values["n"]))
    elif kind == "twisted_extensor":
        extensor = build_extensor(twisted_curve(values["tau"]), unit_sphere_immersion(values["n"]))
    else:
        base = line_immersion((0.0, 0.0), PLANAR_CONE_DIRECTION, interval=(0.5, 1.5))
        extensor = build_extensor(pseudo_sphere_curve(values["b"]), base)

    geodesic = kind in ("line_extensor", "planar_cone")
    return Family(kind=kind, params=values, extensor=extensor, geodesic=geodesic)


def applicable_suites(family):
    '''
    Suites that "all" runs for a family, in SUITES order.
    '''
    wanted = {"gauss_codazzi"}
    if family.spherical_base:
        wanted.update({"lagrangian", "totally_real", "warped"})
    wanted.add("totally_geodesic" if family.geodesic else "humbilical")
    return [suite for suite in SUITES if suite in wanted]


####################################################
# Report model

@dataclass(frozen=True)
class CheckResult:
    name: str
    max_residual: float
    tolerance: float

    @property
    def passed(self):
        return bool(np.isfinite(self.max_residual) and self.max_residual <= self.tolerance)

    def as_dict(self):
        return {"name": self.name, "max_residual": float(self.max_residual),
                "tolerance": float(self.tolerance), "pass": self.passed}


@dataclass
class VerificationReport:
    family: dict
    grid: dict
    seed: int
    checks: list = field(default_factory=list)
    profiles: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)
    wall_ms: float = None

    @property
    def passed(self):
        return all(check.passed for check in self.checks)

    def failed_checks(self):
        return [check.name for check in self.checks if not check.passed]

    def as_dict(self):
        document = {
            "family": self.family,
            "grid": self.grid,
            "seed": self.seed,
            "checks": [check.as_dict() for check in self.checks],
            "profiles": self.profiles,
            "diagnostics": self.diagnostics,
        }
        if self.wall_ms is not None:
            document["wall_ms"] = self.wall_ms
        return document


@dataclass(frozen=True)
class PointRecord:
    '''
    Per grid point quantities shared by the suites.
    '''
    point: np.ndarray
    metric: object
    totally_real: float
    cubic_symmetry: float
    max_h: float
    tangential_leak: float
    mean_curvature: float
    profile: HUmbilicalProfile = None
    sff: object = None
    branch: str = None
    pattern: float = np.inf
    gamma: float = np.inf
    reconstruction: float = None
    eigen: object = None
    sectional: float = np.nan
    error: str = None


PROFILE_COLUMNS = ("lambda_I", "lambda_J", "lambda_K", "mu_I", "mu_J", "mu_K",
                   "gamma_I", "gamma_J", "gamma_K", "mean_curvature", "sectional_curvature")


####################################################
# Suite runner

class SuiteRunner:
    '''
    Runs check suites for one family over one grid.
    '''

    def __init__(self, family, grid=DEFAULT_GRID_POINTS, step=DEFAULT_STEP, tolerances=None,
                 seed=0, workers=None):
        if grid < 1:
            raise ValueError(f'Grid needs at least one point per coordinate, got {grid}')
        if not step > 0:
            raise ValueError(f'Finite difference step must be positive, got {step}')
        self.family = family
        self.extensor = family.extensor
        self.grid = int(grid)
        self.step = float(step)
        self.seed = int(seed)
        self.workers = workers
        self.tolerances = dict(DEFAULT_TOLERANCES)
        for name, value in (tolerances or {}).items():
            if name not in DEFAULT_TOLERANCES:
                raise ValueError(f'Unknown check {name!r} in tolerance override')
            self.tolerances[name] = float(value)

        self.points = self.extensor.chart.grid(self.grid)
        stride = max(1, len(self.points) // NESTED_SAMPLES)
        self.subgrid_index = np.arange(0, len(self.points), stride)[:NESTED_SAMPLES]
        self.subgrid = self.points[self.subgrid_index]

        # Test planes are drawn once, in a fixed order, whatever suites run.
        rng = np.random.default_rng(self.seed)
        m = self.extensor.dim
        self.frame_planes = rng.standard_normal((len(self.subgrid), PLANES_PER_POINT, 2, m))
        self.coordinate_planes = rng.standard_normal((len(self.subgrid), PLANES_PER_POINT, 2, m))

        self.checks = []
        self.diagnostics = {}
        self._records = None

        curve = self.extensor.curve
        centre = np.mean(curve.interval)
        coefficients = curve_coefficients(curve, centre)
        self.branch = curvature_branch(HUmbilicalProfile.from_scalars(
            coefficients[:3], coefficients[3:], m))

    ####################################################
    # Helpers

    def _check(self, name, residual):
        check = CheckResult(name=name, max_residual=float(residual), tolerance=self.tolerances[name])
        log.info(f'{name}: residual {check.max_residual:.3e} (tolerance {check.tolerance:.0e}) '
                 f'{"pass" if check.passed else "FAIL"}')
        self.checks.append(check)

    def _diagnose(self, suite, key, value):
        self.diagnostics.setdefault(suite, {})[key] = value

    @property
    def records(self):
        if self._records is None:
            self._records = sweep(self.points, self._evaluate_batch, workers=self.workers)
        return self._records

    def _evaluate_batch(self, batch):
        return [self._record(j, metric) for j, metric in local_geometry(self.extensor, batch, jet_step=self.step)]

    def _record(self, j, metric):
        sff = second_fundamental_form(j, metric)
        frame = gram_schmidt_frame(j, metric)
        framed = sff.in_frame(frame)
        H = mean_curvature(sff, metric)
        common = dict(
            point=j.point, metric=metric,
            totally_real=totally_real_residual(j),
            cubic_symmetry=cubic_symmetry_check(framed, frame),
            max_h=float(np.sqrt(np.max(np.sum(framed.h * framed.h, axis=(-2, -1))))),
            tangential_leak=sff.tangential_leak,
            mean_curvature=float(np.sqrt(np.sum(H * H))),
        )
        try:
            analysis = analyse_point(j, metric, sff=sff)
        except NotHUmbilicalError as e:
            return PointRecord(error=str(e), **common)

        profile = analysis.profile
        try:
            reconstruction = reconstruction_residual(profile, analysis.sff, analysis.frame, H)
        except ReconstructionNotApplicable:
            reconstruction = None
        m = j.dim
        e_1, e_2 = np.eye(m)[0], np.eye(m)[1]
        return PointRecord(
            profile=profile, sff=analysis.sff, branch=curvature_branch(profile),
            pattern=profile.pattern_residual, gamma=profile.gamma_consistency(),
            reconstruction=reconstruction,
            eigen=eigencheck_AH(analysis.sff, analysis.frame, H, profile, self.tolerances["humbilical.eigen_clusters"]),
            sectional=sectional_curvature(analysis.sff, e_1, e_2), **common)

    ####################################################
    # Suites

    def run(self, suites):
        for suite in suites:
            log.info(f'Running suite {suite} on {self.family.kind}')
            getattr(self, f'suite_{suite}')()

    def suite_lagrangian(self):
        if self.extensor.dim != self.extensor.n:
            raise DimensionMismatchError(
                f'{self.family.kind} is {self.extensor.dim}-dimensional in H^{self.extensor.n}, not Lagrangian')
        self._check("lagrangian.totally_real", max(r.totally_real for r in self.records))
        self._check("lagrangian.cubic_symmetry", max(r.cubic_symmetry for r in self.records))

    def suite_humbilical(self):
        records = self.records
        failures = [r for r in records if r.error]
        if failures:
            self._diagnose("humbilical", "not_h_umbilical_points", len(failures))
        self._check("humbilical.pattern", max(r.pattern for r in records))
        self._check("humbilical.gamma", max(r.gamma for r in records))

        reconstructions = [r.reconstruction for r in records if r.reconstruction is not None]
        skipped = sum(1 for r in records if r.error is None and r.reconstruction is None)
        if skipped:
            self._diagnose("humbilical", "reconstruction_not_applicable", skipped)
        if reconstructions:
            self._check("humbilical.reconstruction", max(reconstructions))

        eigen = [r.eigen for r in records if r.eigen is not None]
        minimal = sum(1 for report in eigen if report.minimal)
        if minimal:
            self._diagnose("humbilical", "minimal_points", minimal)
        regular = [report for report in eigen if not report.minimal]
        if regular:
            self._check("humbilical.eigen_clusters", max(report.residual for report in regular))
            self._diagnose("humbilical", "eigen_multiplicities",
                           [list(m) for m in sorted({tuple(report.multiplicities) for report in regular})])

        if self.family.spherical_base:
            curve = self.extensor.curve
            s_axis = curve.samples(min(self.grid, NESTED_SAMPLES))
            match = extensor_profile_match(curve, self.extensor.n, s_axis)
            self._check("humbilical.profile_match", match.discrepancy)
            scalars = codazzi_scalar_check(self.extensor, s_axis, jet_step=self.step)
            self._check("humbilical.codazzi_scalars", max(item.max_residual() for item in scalars))
            estimates = [item.f_slot for item in scalars if item.f_slot is not None]
            self._diagnose("humbilical", "f_slot_points", len(estimates))
            bar = [abs(item.f_bar - item.f) for item in scalars if item.f_bar is not None]
            if bar:
                self._diagnose("humbilical", "f_bar_max_deviation", max(bar))
        else:
            self._diagnose("humbilical", "extensor_checks", "skipped, base is not the unit hypersphere")

        self._diagnose("humbilical", "branch", self.branch)
        if self.branch == "constant_curvature":
            worst = 0.0
            for k, index in enumerate(self.subgrid_index):
                record = records[index]
                if record.sff is None:
                    continue
                target = record.profile.mu_bar() ** 2
                identity = np.eye(record.sff.dim)
                for X, Y in self.frame_planes[k]:
                    X, Y = orthonormal_plane(identity, X, Y)
                    worst = max(worst, abs(sectional_curvature(record.sff, X, Y) - target))
            self._check("humbilical.sectional_curvature", worst)

    def suite_totally_real(self):
        curve, base = self.extensor.curve, self.extensor.base
        count = min(self.grid, 9)
        verdict = totally_real_test(curve, base, count)
        residual = 0.0 if verdict.verdict else min(verdict.sphericity_residual, verdict.real_part_residual)
        self._check("totally_real.verdict", residual)
        self._check("totally_real.direct", verdict.direct_residual)
        isometric = isometric_tests(curve, base, count)
        self._check("totally_real.f_isometric", isometric.f_residual)
        self._diagnose("totally_real", "spherical", verdict.spherical)
        self._diagnose("totally_real", "sphericity_residual", verdict.sphericity_residual)
        self._diagnose("totally_real", "real_part_residual", verdict.real_part_residual)
        self._diagnose("totally_real", "ode_residuals", [float(v) for v in verdict.ode_residuals])
        self._diagnose("totally_real", "g_isometric", isometric.g_isometric)
        self._diagnose("totally_real", "g_residual", isometric.g_residual)

    def suite_totally_geodesic(self):
        self._check("totally_geodesic.max_h", max(r.max_h for r in self.records))
        verdict = totally_geodesic_test(self.extensor, self.subgrid)
        self._diagnose("totally_geodesic", "curvature_position", verdict.curvature_position)
        self._diagnose("totally_geodesic", "curvature_shape", verdict.curvature_shape)

    def suite_warped(self):
        if not self.family.spherical_base:
            raise ValueError(f'Suite warped needs an extensor of the unit hypersphere, not {self.family.kind}')
        curve = self.extensor.curve
        omega = warping_from_curve(curve)
        s_axis = curve.samples(self.grid)
        mu_bar = np.linalg.norm(curve_coefficients(curve, s_axis)[:, 3:], axis=1)
        model = WarpedModel(omega=omega, mu_bar=float(np.mean(mu_bar)), n=self.extensor.n)

        records = self.records
        self._check("warped.metric_form",
                    max(float(np.max(np.abs(r.metric.g - warped_metric(model, r.point)))) for r in records))
        self._check("warped.christoffel",
                    max(float(np.max(np.abs(r.metric.christoffel - warped_christoffel_closed(model, r.point))))
                        for r in records))
        self._check("warped.spherical_distribution",
                    spherical_distribution_check(self.extensor, omega.log_derivative, self.subgrid))
        self._check("warped.leaf_identities", float(np.max(leaf_intrinsic_curvature_check(omega, mu_bar, s_axis))))

        ode = float(np.max(warping_ode_check(omega, mu_bar, s_axis)))
        leaf = float(max(np.max(residual) for residual in leaf_curvature_check(omega, mu_bar, s_axis)))
        if self.branch == "non_constant_curvature":
            self._diagnose("warped", "warping_ode_residual", ode)
            self._diagnose("warped", "leaf_curvature_residual", leaf)
        else:
            self._check("warped.warping_ode", ode)
            self._check("warped.leaf_curvature", leaf)

    def suite_gauss_codazzi(self):
        m = self.extensor.dim
        rows = np.concatenate([self.subgrid, self.coordinate_planes.reshape(len(self.subgrid), -1)], axis=1)

        def evaluate(batch):
            values = []
            for row in batch:
                point, planes = row[:m], row[m:].reshape(PLANES_PER_POINT, 2, m)
                j, metric = local_geometry(self.extensor, [point], jet_step=self.step)[0]
                sff = second_fundamental_form(j, metric)
                R, intrinsic = riemann_tensor(metric_field_of(self.extensor, self.step), point)
                gauss = 0.0
                for X, Y in planes:
                    X, Y = orthonormal_plane(metric.g, X, Y)
                    gauss = max(gauss, abs(sectional_curvature(sff, X, Y, metric)
                                           - sectional_from_riemann(R, intrinsic.g, X, Y)))
                # Relative to max |g|, the scale of the ∂g truncation error.
                scale = max(1.0, float(np.max(np.abs(metric.g))))
                compatibility = metric_compatibility_residual(self.extensor, point, jet_step=self.step) / scale
                values.append((codazzi_residual(self.extensor, point, jet_step=self.step), gauss, compatibility))
            return values

        values = sweep(rows, evaluate, workers=self.workers, batch_size=1)
        self._check("gauss_codazzi.codazzi", max(v[0] for v in values))
        self._check("gauss_codazzi.gauss", max(v[1] for v in values))
        self._check("gauss_codazzi.metric_compatibility", max(v[2] for v in values))

    ####################################################
    # Profiles

    def profiles(self):
        labels = list(self.extensor.chart.labels)
        samples = []
        for index, record in enumerate(self.records):
            if record.profile is None:
                continue
            profile = record.profile
            samples.append([index] + [float(v) for v in record.point]
                           + [float(v) for v in np.concatenate([profile.lambdas, profile.mus, profile.gammas])]
                           + [record.mean_curvature, float(record.sectional), record.branch])
        summary = {}
        if samples:
            table = np.array([row[1 + len(labels):1 + len(labels) + 9] for row in samples], dtype=np.float64)
            for name, block in (("lambda", table[:, 0:3]), ("mu", table[:, 3:6]), ("gamma", table[:, 6:9])):
                summary[name] = {"min": [float(v) for v in block.min(axis=0)],
                                 "max": [float(v) for v in block.max(axis=0)]}
            summary["branches"] = sorted({row[-1] for row in samples})
        return {
            "columns": ["index"] + labels + list(PROFILE_COLUMNS) + ["branch"],
            "samples": samples,
            "summary": summary,
        }


def run_suite(family, params=None, suite="all", grid=DEFAULT_GRID_POINTS, step=DEFAULT_STEP,
              tolerances=None, seed=0, workers=None, timing=False):
    '''
    Runs one suite (or every applicable suite with "all") for a named family.

    ### Parameters:

        **family**: str | Family

        **params**: dict
            Family parameter overrides.

        **suite**: str
            One of SUITES or "all".

        **grid**: int
            Points per chart coordinate.

        **step**: float
            Jet finite difference step.

        **tolerances**: dict
            Per-check overrides of DEFAULT_TOLERANCES.

        **seed**: int
            Seed of the test plane generator, echoed in the report.

        **timing**: bool
            Record wall_ms in the report.

    ### Returns:

        **report**: VerificationReport
    '''
    start_time = timeit.default_timer()
    if not isinstance(family, Family):
        family = build_family(family, params)
    if suite == "all":
        suites = applicable_suites(family)
    elif suite in SUITES:
        suites = [suite]
    else:
        raise ValueError(f'Unknown suite {suite!r}, expected one of {list(SUITES) + ["all"]}')

    runner = SuiteRunner(family, grid=grid, step=step, tolerances=tolerances, seed=seed, workers=workers)
    log.info(f'Verifying {family.kind} {family.params} with suites {suites} on a {grid}-point grid')
    runner.run(suites)

    chart = family.extensor.chart
    report = VerificationReport(
        family=family.descriptor(),
        grid={"points_per_axis": runner.grid, "dimension": chart.dim, "labels": list(chart.labels),
              "points": len(runner.points), "nested_points": len(runner.subgrid), "step": runner.step,
              "nested_step": NESTED_STEP, "curvature_step": CURVATURE_STEP},
        seed=runner.seed,
        checks=runner.checks,
        profiles=runner.profiles(),
        diagnostics=runner.diagnostics,
    )
    if timing:
        report.wall_ms = (timeit.default_timer() - start_time) * 1000.0
    log.info(f'Verification of {family.kind} {"passed" if report.passed else "failed"}: '
             f'{len(report.checks) - len(report.failed_checks())}/{len(report.checks)} checks')
    return report
