import math

from django.conf import settings
from rest_framework import serializers

from common.exceptions import ConfigurationError

from .constants import (
    RANDOM_BOUNDARY,
    ExperimentKindEnum,
    FamilyChoiceEnum,
    FormChoiceEnum,
    RegionChoiceEnum,
    ShapeChoiceEnum,
)
from .expressions import compile_field, compile_matrix, compile_nonlinearity, compile_vector


MAX_SEED = 2**64 - 1


def _choices(enum) -> list:
    return [member.value for member in enum]


class StrictSerializer(serializers.Serializer):
    """Rejects keys the section does not declare."""

    def to_internal_value(self, data):
        if not isinstance(data, dict):
            raise serializers.ValidationError('section must be a mapping')
        unknown = sorted(set(data) - set(self.fields))
        if unknown:
            raise serializers.ValidationError({key: 'unknown key' for key in unknown})
        return super().to_internal_value(data)


class ExponentField(serializers.Field):
    """A positive integrability exponent, `inf` allowed."""

    default_error_messages = {'invalid': 'expected a positive number or "inf"'}

    def to_internal_value(self, data):
        try:
            value = float(data)
        except (TypeError, ValueError):
            self.fail('invalid')
        if math.isnan(value) or not value > 0:
            self.fail('invalid')
        return value

    def to_representation(self, value):
        return 'inf' if math.isinf(value) else value


class ExpressionField(serializers.JSONField):
    """
    A number, an expression string, or (nested) lists of them; compiled once
    during validation so syntax errors surface before any solve.
    """

    def __init__(self, *args, compiler=compile_field, **kwargs):
        self.compiler = compiler
        super().__init__(*args, **kwargs)

    def to_internal_value(self, data):
        data = super().to_internal_value(data)
        if isinstance(data, bool) or data is None:
            raise serializers.ValidationError('expected a number, an expression or a list')
        try:
            self.compiler(data)
        except ConfigurationError as error:
            raise serializers.ValidationError(str(error))
        return data


class ExperimentSectionSerializer(StrictSerializer):
    kind = serializers.ChoiceField(choices=_choices(ExperimentKindEnum))
    name = serializers.RegexField(r'^[A-Za-z0-9_\-]+$', max_length=100, required=False)
    seed = serializers.IntegerField(min_value=0, max_value=MAX_SEED, default=0)
    output = serializers.CharField(required=False, allow_blank=False)

    def validate(self, attrs):
        attrs.setdefault('name', attrs['kind'])
        return attrs


class OperatorSerializer(StrictSerializer):
    form = serializers.ChoiceField(
        choices=_choices(FormChoiceEnum), default=FormChoiceEnum.NONDIVERGENCE.value
    )
    ellipticity = serializers.ListField(
        child=serializers.FloatField(min_value=0.0),
        min_length=2,
        max_length=2,
        default=[1.0, 1.0],
    )
    p_e = serializers.FloatField(required=False, allow_null=True, default=None)

    def validate_ellipticity(self, value):
        lam, Lam = value
        if not 0 < lam <= Lam:
            raise serializers.ValidationError('ellipticity bounds must satisfy 0 < λ ≤ Λ')
        return value


class DomainSerializer(StrictSerializer):
    # G_R for the Harnack and chain kinds
    region = serializers.ChoiceField(
        choices=_choices(RegionChoiceEnum), default=RegionChoiceEnum.BALL.value
    )
    # explicit grid for the abp and smp kinds
    shape = serializers.ChoiceField(choices=_choices(ShapeChoiceEnum), required=False)
    a = serializers.FloatField(required=False)
    b = serializers.FloatField(required=False)
    lower = serializers.ListField(
        child=serializers.FloatField(), min_length=2, max_length=2, required=False
    )
    upper = serializers.ListField(
        child=serializers.FloatField(), min_length=2, max_length=2, required=False
    )
    radius = serializers.FloatField(min_value=0.0, required=False)
    inner_radius = serializers.FloatField(min_value=0.0, required=False)
    outer_radius = serializers.FloatField(min_value=0.0, required=False)
    angular_count = serializers.IntegerField(min_value=4, required=False)
    # Landis runs: Ω = ℝⁿ∖B_exterior_radius, or ℝⁿ itself
    exterior_radius = serializers.FloatField(min_value=0.0, default=2.0)
    full_space = serializers.BooleanField(default=False)
    x0 = serializers.ListField(child=serializers.FloatField(), min_length=1, max_length=2, required=False)
    boundary = serializers.JSONField(required=False)

    def validate_boundary(self, value):
        if value == RANDOM_BOUNDARY:
            return value
        try:
            compile_field(value)
        except ConfigurationError as error:
            raise serializers.ValidationError(str(error))
        return value

    def validate(self, attrs):
        shape = attrs.get('shape')
        required = {
            ShapeChoiceEnum.INTERVAL.value: ('a', 'b'),
            ShapeChoiceEnum.BOX.value: ('lower', 'upper'),
            ShapeChoiceEnum.DISK.value: ('radius',),
            ShapeChoiceEnum.ANNULUS.value: ('inner_radius', 'outer_radius'),
        }.get(shape, ())
        missing = [key for key in required if key not in attrs]
        if missing:
            raise serializers.ValidationError({key: f'required for a {shape}' for key in missing})

        if shape == ShapeChoiceEnum.INTERVAL.value and not attrs['a'] < attrs['b']:
            raise serializers.ValidationError({'b': 'interval needs a < b'})
        if shape == ShapeChoiceEnum.BOX.value and not all(
            lo < hi for lo, hi in zip(attrs['lower'], attrs['upper'])
        ):
            raise serializers.ValidationError({'upper': 'box needs lower < upper on both axes'})
        if shape == ShapeChoiceEnum.ANNULUS.value and not (
            0 < attrs['inner_radius'] < attrs['outer_radius']
        ):
            raise serializers.ValidationError({'outer_radius': 'annulus needs 0 < inner < outer'})
        return attrs


class CoefficientsSerializer(StrictSerializer):
    dimension = serializers.ChoiceField(choices=[1, 2], default=1)
    A = ExpressionField(compiler=compile_matrix, default=1.0)
    b = ExpressionField(compiler=compile_vector, default=0.0)
    b1 = ExpressionField(compiler=compile_vector, default=0.0)
    b2 = ExpressionField(compiler=compile_vector, default=0.0)
    c = ExpressionField(default=0.0)
    g = ExpressionField(default=0.0)
    h = ExpressionField(compiler=compile_vector, default=0.0)
    q = ExponentField(default=math.inf)
    p = ExponentField(default=math.inf)
    singularities = serializers.ListField(
        child=serializers.ListField(child=serializers.FloatField(), min_length=1, max_length=2),
        default=list,
    )

    def validate(self, attrs):
        n = attrs['dimension']
        if not attrs['q'] > n:
            raise serializers.ValidationError({'q': f'q must exceed n = {n}'})
        if not attrs['p'] > n / 2:
            raise serializers.ValidationError({'p': f'p must exceed n/2 = {n / 2}'})
        if any(len(point) != n for point in attrs['singularities']):
            raise serializers.ValidationError({'singularities': f'points need {n} coordinates'})
        return attrs


class GridSerializer(StrictSerializer):
    spacing = serializers.FloatField(min_value=1e-6, max_value=1.0, required=False)
    refine = serializers.IntegerField(min_value=0, max_value=4, default=0)

    def validate(self, attrs):
        attrs.setdefault('spacing', settings.LAB_DEFAULT_SPACING)
        return attrs


class SweepSerializer(StrictSerializer):
    radii = serializers.ListField(child=serializers.FloatField(min_value=0.0), default=list)
    deltas = serializers.ListField(
        child=serializers.FloatField(min_value=0.0), min_length=3, required=False
    )
    epsilon = serializers.FloatField(min_value=0.0, required=False)
    r0 = serializers.ListField(
        child=serializers.FloatField(min_value=0.0, max_value=0.5), required=False
    )
    k = serializers.FloatField(min_value=0.0, default=1.0)
    pairs = serializers.ListField(
        child=serializers.ListField(
            child=serializers.FloatField(min_value=0.0), min_length=2, max_length=2
        ),
        default=list,
    )
    truncations = serializers.ListField(child=serializers.FloatField(min_value=0.0), required=False)
    length = serializers.FloatField(min_value=0.0, default=10.0)
    # calibrated constants; settings defaults when omitted
    c0 = serializers.FloatField(min_value=0.0, required=False)
    local_max_c = serializers.FloatField(min_value=0.0, required=False)
    abp_constant = serializers.FloatField(min_value=0.0, required=False)

    def validate_radii(self, value):
        if any(b <= a for a, b in zip(value, value[1:])) or any(r <= 0 for r in value):
            raise serializers.ValidationError('radii must be positive and increasing')
        return value

    def validate_deltas(self, value):
        if any(b >= a for a, b in zip(value, value[1:])) or any(d <= 0 for d in value):
            raise serializers.ValidationError('δ values must be positive and decreasing')
        return value

    def validate_epsilon(self, value):
        if not value > 0:
            raise serializers.ValidationError('ε must be positive')
        return value


class NonlinearitySerializer(StrictSerializer):
    family = serializers.ChoiceField(choices=_choices(FamilyChoiceEnum))
    a = serializers.FloatField(min_value=0.0, required=False)
    theta = serializers.FloatField(min_value=0.0, required=False)
    coefficient = serializers.FloatField(min_value=0.0, default=1.0)
    expression = serializers.CharField(required=False)
    # dead-core height u(T) = u0
    u0 = serializers.FloatField(min_value=0.0, required=False)

    def validate(self, attrs):
        family = attrs['family']
        needed = {
            FamilyChoiceEnum.LOG_POWER.value: 'a',
            FamilyChoiceEnum.POWER.value: 'theta',
            FamilyChoiceEnum.EXPRESSION.value: 'expression',
        }.get(family)
        if needed and needed not in attrs:
            raise serializers.ValidationError({needed: f'required for the {family} family'})
        if family == FamilyChoiceEnum.EXPRESSION.value:
            try:
                compile_nonlinearity(attrs['expression'])
            except ConfigurationError as error:
                raise serializers.ValidationError({'expression': str(error)})
        return attrs


SECTION_SERIALIZERS = {
    'experiment': ExperimentSectionSerializer,
    'operator': OperatorSerializer,
    'domain': DomainSerializer,
    'coefficients': CoefficientsSerializer,
    'grid': GridSerializer,
    'sweep': SweepSerializer,
    'nonlinearity': NonlinearitySerializer,
}

# sections that may be left out entirely
OPTIONAL_SECTIONS = ('operator', 'domain', 'coefficients', 'grid', 'sweep', 'nonlinearity')
