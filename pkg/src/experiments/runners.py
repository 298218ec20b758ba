"""
One runner per experiment kind. A runner turns a validated config into an
ExperimentReport: named tables of CSV rows, a summary and the number of
inequality violations found.
"""

from dataclasses import dataclass, field
import logging
import math
from typing import Callable

from django.conf import settings
import numpy as np

from common.exceptions import DomainError
from common.fitting import fit_linear
from grid.domain import GridFunction
from harnack.calibration import (
    calibrate_harnack,
    held_out_suite,
    held_out_violations,
    training_suite,
    with_constants,
)
from harnack.cover import build_chain_cover
from harnack.lemmas import abp_check
from harnack.measurement import HarnackMeasurement, measure_harnack
from harnack.regions import RegionShapeEnum, harnack_regions
from landis.decay import landis_experiment, measure_decay
from landis.oracle import calibrate_landis_c0, ode_rates
from landis.positive_solution import ExteriorProblem, build_positive_solution
from operators.assembly import assemble
from operators.constants import exponents
from operators.forms import EllipticProblem
from smp.criteria import check_decay_criterion, classify_vazquez_integral
from smp.dead_core import dead_core_profile
from smp.experiment import RadiusPolicy, vazquez_experiment
from solver.linear import solve_linear
from solver.refinement import solve_refined
from solver.semilinear import solve_semilinear

from .config import ExperimentConfig
from .constants import (
    CSV_COLUMNS,
    LANDIS_DECAY_COLUMNS,
    VAZQUEZ_COLUMNS,
    ExperimentKindEnum,
)


logger = logging.getLogger(__name__)

DEFAULT_R0 = (1 / 3, 1 / 6)


@dataclass(frozen=True)
class Table:
    # empty for the main table
    name: str
    columns: list
    rows: list


@dataclass(frozen=True)
class ExperimentReport:
    kind: ExperimentKindEnum
    name: str
    tables: list
    violations: int = 0
    summary: dict = field(default_factory=dict)

    @property
    def main(self) -> Table:
        return self.tables[0]


def _zero(u):
    return np.zeros_like(u)


def _linear_solve(problem: EllipticProblem) -> GridFunction:
    return solve_linear(assemble(problem))


def _pucci_solve(problem: EllipticProblem) -> GridFunction:
    return solve_semilinear(problem, _zero).field


def solve(problem: EllipticProblem, refine: int = 0) -> GridFunction:
    """Lu = g with the problem's data, extrapolated over `refine` halvings of h."""
    step = _pucci_solve if problem.form.is_pucci else _linear_solve
    if refine:
        return solve_refined(problem, refine, solve=step)
    return step(problem)


def _violated(m: HarnackMeasurement, kind: ExperimentKindEnum) -> bool:
    return {
        ExperimentKindEnum.HARNACK: m.harnack_violated,
        ExperimentKindEnum.WEAK_HARNACK: m.weak_harnack_violated,
        ExperimentKindEnum.LOCAL_MAX: m.local_max_violated,
    }[kind]


def _harnack_row(m: HarnackMeasurement, kind: ExperimentKindEnum) -> dict:
    if kind == ExperimentKindEnum.HARNACK:
        values = [m.R, m.A, m.sup, m.inf, m.ratio, m.log_ratio, m.bound]
    elif kind == ExperimentKindEnum.WEAK_HARNACK:
        values = [m.R, m.A, m.epsilon, m.inf, m.epsilon_integral, m.bound]
    else:
        values = [m.R, m.A, m.epsilon, m.sup, m.epsilon_integral_ul, m.forcing, m.local_max_bound]
    return dict(zip(CSV_COLUMNS[kind], values + [_violated(m, kind)]))


def run_harnack(config: ExperimentConfig) -> ExperimentReport:
    kind = config.kind
    shape = RegionShapeEnum[config.region.name]
    sweep = config.sweep
    rng = config.generator()

    measurements = []
    for R in config.radii:
        region, outer = harnack_regions(shape, R, config.dimension)
        domain = outer.domain(config.spacing, config.domain.get('angular_count'))
        problem = config.problem(domain, rng)
        u = solve(problem, config.refine)
        measurements.append(
            measure_harnack(
                problem,
                region,
                u,
                epsilon=sweep.get('epsilon'),
                c0=sweep.get('c0'),
                local_max_c=sweep.get('local_max_c'),
            )
        )

    rows = [_harnack_row(m, kind) for m in measurements]
    violations = sum(_violated(m, kind) for m in measurements)
    summary = {'radii': len(measurements), 'c0': measurements[0].c0}
    summary['beta_q'], summary['gamma_p'] = exponents(
        problem.coefficients.q, problem.coefficients.p, config.dimension
    )

    finite = [m for m in measurements if math.isfinite(m.log_ratio)]
    if len(finite) >= 2:
        summary['harnack_rate'] = fit_linear([m.R for m in finite], [m.log_ratio for m in finite]).slope
    if finite:
        # smallest C₀ the sweep is compatible with
        summary['empirical_c0'] = max(m.log_ratio / (m.A * m.R) for m in finite)
    if kind == ExperimentKindEnum.HARNACK:
        summary['composition_holds'] = all(m.composition_holds for m in measurements)
    summary['violations'] = violations

    return ExperimentReport(kind, config.name, [Table('', CSV_COLUMNS[kind], rows)], violations, summary)


def run_abp(config: ExperimentConfig) -> ExperimentReport:
    domain = config.explicit_domain()
    problem = config.problem(domain, config.generator())
    w = solve(problem, config.refine)
    report = abp_check(problem, w)

    constant = config.sweep.get('abp_constant')
    bound = '' if constant is None else constant * report.forcing
    violated = constant is not None and report.sup > bound * (1 + settings.LAB_VIOLATION_TOLERANCE)
    row = dict(
        zip(
            CSV_COLUMNS[ExperimentKindEnum.ABP],
            [report.sup, report.forcing, report.ratio, report.subsolution, bound, violated],
        )
    )
    summary = {'ratio': report.ratio, 'subsolution': report.subsolution, 'violations': int(violated)}
    return ExperimentReport(
        config.kind,
        config.name,
        [Table('', CSV_COLUMNS[config.kind], [row])],
        int(violated),
        summary,
    )


def run_chain(config: ExperimentConfig) -> ExperimentReport:
    shape = RegionShapeEnum[config.region.name]
    n = config.dimension
    rows, failures, escaping, overlap_ratios = [], 0, 0, []
    for R in config.radii:
        region, outer = harnack_regions(shape, R, n)
        for r0 in config.sweep.get('r0') or DEFAULT_R0:
            cover = build_chain_cover(region, r0)
            chain = cover.chain_between(*cover.extreme_pair())
            covers = cover.covers(region.domain(r0 / 2, config.domain.get('angular_count')))
            overlap_ratios.append(cover.link_overlap_ratio(chain))
            inside = cover.doubled_balls_inside(outer)
            escaping += not inside
            failures += not (covers and inside)
            rows.append(
                dict(
                    zip(
                        CSV_COLUMNS[ExperimentKindEnum.CHAIN],
                        [
                            n,
                            R,
                            r0,
                            cover.size,
                            len(chain),
                            cover.cardinality_constant,
                            cover.chain_constant(len(chain)),
                            covers,
                        ],
                    )
                )
            )

    cardinality = [row['m_r0_over_R_n'] for row in rows]
    chain_constants = [row['d_r0_over_R'] for row in rows]
    summary = {
        'max_m_r0_over_R_n': max(cardinality),
        'spread_m_r0_over_R_n': max(cardinality) / min(cardinality),
        'max_d_r0_over_R': max(chain_constants),
        'spread_d_r0_over_R': max(chain_constants) / min(chain_constants),
        'doubled_balls_inside': not escaping,
        'min_link_overlap_ratio': min(overlap_ratios),
        'violations': failures,
    }
    return ExperimentReport(
        config.kind, config.name, [Table('', CSV_COLUMNS[config.kind], rows)], failures, summary
    )


def run_smp(config: ExperimentConfig) -> ExperimentReport:
    f = config.nonlinearity_function()
    sweep = config.sweep
    criterion = check_decay_criterion(f, sweep['k'], sweep.get('deltas'))
    rows = [
        dict(zip(CSV_COLUMNS[ExperimentKindEnum.SMP], [r['delta'], r['m_delta'], r['log_trace']]))
        for r in criterion.rows()
    ]
    tables = [Table('', CSV_COLUMNS[config.kind], rows)]
    summary = {
        'nonlinearity': str(f),
        'decay_criterion': criterion.status.value,
        'trace_slope': criterion.slope,
        'growth_exponent': criterion.exponent,
        'vazquez_integral': classify_vazquez_integral(f).value,
    }

    violations = 0
    if 'shape' in config.domain:
        problem = config.problem(config.explicit_domain(), config.generator())
        report = vazquez_experiment(
            problem,
            f,
            sweep.get('deltas'),
            RadiusPolicy(k=sweep['k']),
            epsilon=sweep.get('epsilon'),
        )
        tables.append(
            Table(
                'vazquez',
                VAZQUEZ_COLUMNS,
                [
                    dict(zip(VAZQUEZ_COLUMNS, [r['delta'], r['m_delta'], r['integral'], r['log_bound']]))
                    for r in report.rows
                ],
            )
        )
        violations = int(not report.bounded)
        summary.update(
            {
                'x0': ' '.join(f'{x!r}' for x in report.x0),
                'radius': report.radius,
                'vanishing': report.verdict.value,
                'bounded': report.bounded,
            }
        )
    summary['violations'] = violations
    return ExperimentReport(config.kind, config.name, tables, violations, summary)


def run_dead_core(config: ExperimentConfig) -> ExperimentReport:
    f = config.nonlinearity_function()
    profile = dead_core_profile(f, config.nonlinearity['u0'], config.spacing)
    x = profile.field.domain.points[:, 0]
    rows = [{'x': float(a), 'u': float(b)} for a, b in zip(x, profile.field.values)]
    summary = {
        'nonlinearity': str(f),
        'u0': profile.u0,
        'half_width': profile.half_width,
        'ode_residual': profile.residual,
        'violations': 0,
    }
    return ExperimentReport(config.kind, config.name, [Table('', CSV_COLUMNS[config.kind], rows)], 0, summary)


def run_landis(config: ExperimentConfig) -> ExperimentReport:
    domain_spec = config.domain
    sweep = config.sweep
    coefficients = config.coefficient_set()
    inner = None if domain_spec['full_space'] else domain_spec['exterior_radius']
    exterior = ExteriorProblem(
        config.form(),
        coefficients,
        inner_radius=inner,
        spacing=config.spacing,
        angular_count=domain_spec.get('angular_count'),
    )
    radii = config.radii
    truncations = sweep.get('truncations') or [2 * radii[-1]]
    if radii[-1] > truncations[-1]:
        raise DomainError('the R-grid leaves the largest truncation')

    solution = build_positive_solution(exterior, truncations, x0=domain_spec.get('x0'))
    decay = measure_decay(solution.psi, radii, coefficients, c0=sweep.get('c0'), inner=inner or 0.0)
    rows = [
        dict(
            zip(
                CSV_COLUMNS[ExperimentKindEnum.LANDIS],
                [r['R'], r['inf'], r['shell_sup'], r['lower_bound']],
            )
        )
        for r in decay.rows()
    ]
    tables = [Table('', CSV_COLUMNS[config.kind], rows)]
    violations = int(not decay.within_bound)
    summary = {
        'psi_positive': solution.positive,
        'cauchy_decreasing': solution.cauchy_decreasing,
        'psi_decay_rate': decay.rate,
        'c1': decay.predicted,
        'inf_bounded': decay.inf_bounded,
    }

    if 'boundary' in domain_spec:
        problem = exterior.truncated(truncations[-1])
        problem = problem.with_boundary(config.boundary_data(problem.domain, config.generator()))
        u = solve(problem)
        report = landis_experiment(
            problem, u, radii, psi=solution.psi, deltas=sweep.get('deltas'), c0=sweep.get('c0')
        )
        tables.append(
            Table(
                'decay',
                LANDIS_DECAY_COLUMNS,
                [
                    dict(zip(LANDIS_DECAY_COLUMNS, [r['R'], r['shell_sup'], r['log_product']]))
                    for r in report.rows()
                ],
            )
        )
        violations += int(report.violated)
        summary.update(
            {
                'verdict': report.verdict.value,
                'u_decay_rate': '' if report.rate is None else report.rate,
                'residual': report.residual,
                'comparisons': len(report.comparisons),
                'comparison_violations': report.comparison_violations,
            }
        )
    summary['violations'] = violations
    return ExperimentReport(config.kind, config.name, tables, violations, summary)


def run_oracle(config: ExperimentConfig) -> ExperimentReport:
    sweep = config.sweep
    calibration = calibrate_landis_c0(
        [tuple(pair) for pair in sweep['pairs']],
        sweep['length'],
        config.spacing,
        config.refine,
    )
    tolerance = settings.LAB_VIOLATION_TOLERANCE
    rows, violations = [], 0
    for b, c, rate, A in calibration.samples:
        D, D_minus = ode_rates(b, c)
        # the decaying branch never outruns the zero-order share of A
        violations += rate > math.sqrt(c) * (1 + tolerance) + tolerance
        rows.append(dict(zip(CSV_COLUMNS[ExperimentKindEnum.ORACLE], [b, c, D, D_minus, rate, A])))

    summary = {
        'pairs': calibration.training_size,
        'landis_c0': calibration.c0,
        'violations': violations,
    }
    return ExperimentReport(
        config.kind, config.name, [Table('', CSV_COLUMNS[config.kind], rows)], violations, summary
    )


def _calibration_grids(config: ExperimentConfig) -> list[tuple]:
    """(G_R, grid of G′_R, boundary data) per radius, shared by every problem of both suites."""
    shape = RegionShapeEnum[config.region.name]
    rng = config.generator()
    grids = []
    for R in config.radii:
        region, outer = harnack_regions(shape, R, config.dimension)
        domain = outer.domain(config.spacing, config.domain.get('angular_count'))
        grids.append((region, domain, config.boundary_data(domain, rng)))
    return grids


def _measure_suite(config: ExperimentConfig, suite: list, grids: list) -> list[HarnackMeasurement]:
    measurements = []
    for coefficients in suite:
        for region, domain, boundary in grids:
            problem = EllipticProblem(domain, config.form(), coefficients, boundary=boundary)
            u = solve(problem, config.refine)
            measurements.append(
                measure_harnack(problem, region, u, epsilon=config.sweep.get('epsilon'))
            )
    return measurements


def run_calibration(config: ExperimentConfig) -> ExperimentReport:
    """
    Fits C₀ and C_ε on bounded coefficients, then checks every inequality on
    coefficients with singularities at the origin under the fitted constants.
    """
    n = config.dimension
    grids = _calibration_grids(config)
    training = _measure_suite(config, training_suite(n), grids)
    held_out = _measure_suite(config, held_out_suite(n), grids)
    constants = calibrate_harnack(training)
    violating = held_out_violations(held_out, constants)

    count = len(config.radii)
    rows = []
    for suite, measurements in (('training', training), ('held_out', held_out)):
        for index, m in enumerate(measurements):
            m = with_constants(m, constants)
            values = [suite, index // count, m.R, m.A, m.sup, m.inf, m.ratio]
            values += [m.epsilon_integral_ul, m.violated]
            rows.append(dict(zip(CSV_COLUMNS[ExperimentKindEnum.CALIBRATION], values)))

    summary = {
        'c0': constants.c0,
        'local_max_c': constants.local_max_c,
        'training_size': constants.training_size,
        'held_out_size': len(held_out),
        'violations': len(violating),
    }
    return ExperimentReport(
        config.kind, config.name, [Table('', CSV_COLUMNS[config.kind], rows)], len(violating), summary
    )


RUNNERS: dict[ExperimentKindEnum, Callable[[ExperimentConfig], ExperimentReport]] = {
    ExperimentKindEnum.HARNACK: run_harnack,
    ExperimentKindEnum.WEAK_HARNACK: run_harnack,
    ExperimentKindEnum.LOCAL_MAX: run_harnack,
    ExperimentKindEnum.ABP: run_abp,
    ExperimentKindEnum.CHAIN: run_chain,
    ExperimentKindEnum.SMP: run_smp,
    ExperimentKindEnum.DEAD_CORE: run_dead_core,
    ExperimentKindEnum.LANDIS: run_landis,
    ExperimentKindEnum.ORACLE: run_oracle,
    ExperimentKindEnum.CALIBRATION: run_calibration,
}


def run(config: ExperimentConfig) -> ExperimentReport:
    logger.info(f'running {config.kind.value} experiment {config.name} (seed {config.seed})')
    report = RUNNERS[config.kind](config)
    logger.info(
        f'finished {config.kind.value} experiment {config.name}: '
        f'{sum(len(t.rows) for t in report.tables)} rows, {report.violations} violations'
    )
    return report
