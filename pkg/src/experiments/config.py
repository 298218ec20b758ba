"""
Experiment configs: YAML files with one level of sections, each validated by
its serializer before anything is solved. A file holds a single config
(a mapping) or a suite (a list of mappings).
"""

import copy
from dataclasses import dataclass, field
import logging
import math
from pathlib import Path
from typing import Optional, Union

import numpy as np
import yaml

from common.exceptions import ConfigurationError, DomainError
from common.random import SplitMix64
from grid.domain import GridDomain, GridFunction
from operators.coefficients import CoefficientSet
from operators.forms import EllipticProblem, OperatorForm, OperatorFormEnum
from smp.nonlinearity import Nonlinearity, from_callable, linear, log_power, power

from .constants import (
    HARNACK_KINDS,
    RADIUS_KINDS,
    RANDOM_BOUNDARY,
    RANDOM_BOUNDARY_RANGE,
    ExperimentKindEnum,
    FamilyChoiceEnum,
    RegionChoiceEnum,
    ShapeChoiceEnum,
)
from .expressions import compile_field, compile_matrix, compile_nonlinearity, compile_vector
from .serializers import OPTIONAL_SECTIONS, SECTION_SERIALIZERS


logger = logging.getLogger(__name__)


def load_configs(path: Union[str, Path]) -> list[dict]:
    try:
        with open(path, encoding='utf-8') as stream:
            document = yaml.safe_load(stream)
    except OSError as error:
        raise ConfigurationError(f'cannot read config {path}: {error}')
    except yaml.YAMLError as error:
        raise ConfigurationError(f'config {path} is not valid YAML: {error}')

    if isinstance(document, dict):
        return [document]
    if isinstance(document, list) and document and all(isinstance(d, dict) for d in document):
        return document
    raise ConfigurationError(f'config {path} must be a mapping or a non-empty list of mappings')


def apply_overrides(
    raw: dict,
    seed: Optional[int] = None,
    spacing: Optional[float] = None,
    refine: Optional[int] = None,
    output: Optional[str] = None,
) -> dict:
    """Command-line flags take precedence over the file."""
    raw = copy.deepcopy(raw)
    if seed is not None:
        raw.setdefault('experiment', {})['seed'] = seed
    if output is not None:
        raw.setdefault('experiment', {})['output'] = output
    if spacing is not None:
        raw.setdefault('grid', {})['spacing'] = spacing
    if refine is not None:
        raw.setdefault('grid', {})['refine'] = refine
    return raw


@dataclass(frozen=True)
class ExperimentConfig:
    kind: ExperimentKindEnum
    name: str
    seed: int
    output: Optional[str]
    operator: dict
    domain: dict
    coefficients: dict
    grid: dict
    sweep: dict
    nonlinearity: Optional[dict] = None
    # the validated sections as plain data, stored with the run
    raw: dict = field(default_factory=dict)

    @property
    def dimension(self) -> int:
        return self.coefficients['dimension']

    @property
    def spacing(self) -> float:
        return self.grid['spacing']

    @property
    def refine(self) -> int:
        return self.grid['refine']

    @property
    def radii(self) -> list:
        return self.sweep['radii']

    @property
    def region(self) -> RegionChoiceEnum:
        return RegionChoiceEnum(self.domain['region'])

    @property
    def random_boundary(self) -> bool:
        return self.domain.get('boundary') == RANDOM_BOUNDARY

    def form(self) -> OperatorForm:
        kind = OperatorFormEnum[self.operator['form'].upper()]
        return OperatorForm(kind, self.operator.get('p_e'))

    def coefficient_set(self) -> CoefficientSet:
        spec = self.coefficients
        return CoefficientSet(
            dimension=spec['dimension'],
            A=compile_matrix(spec['A']),
            b=compile_vector(spec['b']),
            b1=compile_vector(spec['b1']),
            b2=compile_vector(spec['b2']),
            c=compile_field(spec['c']),
            ellipticity=tuple(self.operator['ellipticity']),
            q=spec['q'],
            p=spec['p'],
            singularities=tuple(tuple(point) for point in spec['singularities']),
        )

    def generator(self) -> SplitMix64:
        return SplitMix64(self.seed)

    def explicit_domain(self) -> GridDomain:
        shape = ShapeChoiceEnum(self.domain['shape'])
        spacing = self.spacing
        if shape == ShapeChoiceEnum.INTERVAL:
            return GridDomain.interval(self.domain['a'], self.domain['b'], spacing)
        if shape == ShapeChoiceEnum.BOX:
            return GridDomain.box(self.domain['lower'], self.domain['upper'], spacing)
        if shape == ShapeChoiceEnum.DISK:
            return GridDomain.disk(self.domain['radius'], spacing, self.domain.get('angular_count'))
        return GridDomain.annulus(
            self.domain['inner_radius'],
            self.domain['outer_radius'],
            spacing,
            self.domain.get('angular_count'),
        )

    def boundary_data(self, domain: GridDomain, rng: Optional[SplitMix64] = None):
        """
        The compiled boundary expression, or seeded uniform draws on the
        boundary nodes of this grid.
        """
        spec = self.domain.get('boundary', 0.0)
        if spec != RANDOM_BOUNDARY:
            return compile_field(spec)

        rng = rng or self.generator()
        low, high = RANDOM_BOUNDARY_RANGE
        values = np.zeros(domain.size)
        boundary = domain.boundary
        values[boundary] = rng.uniform(low, high, size=int(boundary.sum()))
        return GridFunction(values, domain)

    def problem(self, domain: GridDomain, rng: Optional[SplitMix64] = None) -> EllipticProblem:
        return EllipticProblem(
            domain,
            self.form(),
            self.coefficient_set(),
            g=compile_field(self.coefficients['g']),
            h=compile_vector(self.coefficients['h']),
            boundary=self.boundary_data(domain, rng),
        )

    def nonlinearity_function(self) -> Nonlinearity:
        spec = self.nonlinearity
        family = FamilyChoiceEnum(spec['family'])
        if family == FamilyChoiceEnum.LOG_POWER:
            return log_power(spec['a'])
        if family == FamilyChoiceEnum.POWER:
            return power(spec['theta'], spec['coefficient'])
        if family == FamilyChoiceEnum.LINEAR:
            return linear(spec['coefficient'])
        return from_callable(compile_nonlinearity(spec['expression']), spec['expression'])


def _validate_sections(raw: dict) -> tuple[dict, dict]:
    errors = {}
    unknown = sorted(set(raw) - set(SECTION_SERIALIZERS))
    for key in unknown:
        errors[key] = ['unknown section']

    sections = {}
    for name, serializer_class in SECTION_SERIALIZERS.items():
        if name not in raw:
            if name not in OPTIONAL_SECTIONS:
                errors[name] = ['section is required']
                continue
            if name == 'nonlinearity':
                sections[name] = None
                continue
        serializer = serializer_class(data=raw.get(name) or {})
        if serializer.is_valid():
            sections[name] = dict(serializer.validated_data)
        else:
            errors[name] = serializer.errors
    return sections, errors


def _cross_check(sections: dict) -> dict:
    errors = {}
    kind = ExperimentKindEnum(sections['experiment']['kind'])
    domain = sections['domain']
    sweep = sections['sweep']
    n = sections['coefficients']['dimension']
    shape = domain.get('shape')

    if kind in RADIUS_KINDS and not sweep['radii']:
        errors['sweep.radii'] = f'the {kind.value} experiment needs a non-empty R-grid'
    if kind in (ExperimentKindEnum.SMP, ExperimentKindEnum.DEAD_CORE):
        if sections['nonlinearity'] is None:
            errors['nonlinearity'] = f'the {kind.value} experiment needs a nonlinearity'
        elif kind == ExperimentKindEnum.DEAD_CORE and 'u0' not in sections['nonlinearity']:
            errors['nonlinearity.u0'] = 'the dead-core height u0 is required'
    if kind == ExperimentKindEnum.ORACLE and not sweep['pairs']:
        errors['sweep.pairs'] = 'the oracle experiment needs (b, c) pairs'
    if kind == ExperimentKindEnum.ABP and shape is None:
        errors['domain.shape'] = 'the ABP experiment needs an explicit domain shape'
    if kind == ExperimentKindEnum.CALIBRATION and 'boundary' not in domain:
        errors['domain.boundary'] = 'calibration needs positive boundary data'

    if shape is not None:
        shape_dimension = 1 if shape == ShapeChoiceEnum.INTERVAL.value else 2
        if shape_dimension != n:
            errors['domain.shape'] = f'a {shape} is {shape_dimension}D, coefficients are {n}D'
    if domain['region'] == RegionChoiceEnum.SHELL.value and n != 2:
        errors['domain.region'] = 'shell regions are two-dimensional'
    if 'x0' in domain and len(domain['x0']) != n:
        errors['domain.x0'] = f'x0 needs {n} coordinates'

    refine = sections['grid']['refine']
    if refine and domain.get('boundary') == RANDOM_BOUNDARY:
        errors['grid.refine'] = 'random boundary data lives on one grid and cannot be refined'
    if refine and kind in HARNACK_KINDS and n == 2 and domain['region'] == RegionChoiceEnum.BALL.value:
        errors['grid.refine'] = 'disk grids do not nest; use a shell region or refine 0'
    if refine and shape == ShapeChoiceEnum.DISK.value:
        errors['grid.refine'] = 'disk grids do not nest'
    return errors


def _plain(value):
    """Validated sections as JSON-safe data; infinite exponents become 'inf'."""
    if isinstance(value, dict):
        return {key: _plain(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(item) for item in value]
    if isinstance(value, float) and math.isinf(value):
        return 'inf' if value > 0 else '-inf'
    return value


def _check_operator(config: ExperimentConfig) -> dict:
    """Builds the operator once so parameter errors surface before any solve."""
    try:
        form = config.form()
        coefficients = config.coefficient_set()
        p0 = form.p0(config.dimension)
    except DomainError as error:
        return {'operator': str(error)}
    if not coefficients.p > p0:
        return {'coefficients.p': f'p = {coefficients.p} must exceed p0 = {p0}'}
    if config.nonlinearity is not None:
        try:
            config.nonlinearity_function()
        except DomainError as error:
            return {'nonlinearity': str(error)}
    return {}


def parse_config(raw: dict, kind: Optional[str] = None) -> ExperimentConfig:
    if not isinstance(raw, dict):
        raise ConfigurationError('config must be a mapping')

    sections, errors = _validate_sections(raw)
    if errors:
        raise ConfigurationError(f'invalid config: {errors}', errors)

    errors = _cross_check(sections)
    experiment = sections['experiment']
    if kind is not None and experiment['kind'] != kind:
        errors['experiment.kind'] = f'config is a {experiment["kind"]} experiment, not {kind}'
    if errors:
        raise ConfigurationError(f'invalid config: {errors}', errors)

    config = ExperimentConfig(
        kind=ExperimentKindEnum(experiment['kind']),
        name=experiment['name'],
        seed=experiment['seed'],
        output=experiment.get('output'),
        operator=sections['operator'],
        domain=sections['domain'],
        coefficients=sections['coefficients'],
        grid=sections['grid'],
        sweep=sections['sweep'],
        nonlinearity=sections['nonlinearity'],
        raw=_plain({k: v for k, v in sections.items() if v is not None}),
    )
    errors = _check_operator(config)
    if errors:
        raise ConfigurationError(f'invalid config: {errors}', errors)

    logger.debug(f'validated {config.kind.value} config {config.name}')
    return config
