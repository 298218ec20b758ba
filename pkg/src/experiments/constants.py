from enum import Enum


class ExperimentKindEnum(Enum):
    HARNACK = 'harnack'
    WEAK_HARNACK = 'weak_harnack'
    LOCAL_MAX = 'local_max'
    ABP = 'abp'
    CHAIN = 'chain'
    SMP = 'smp'
    DEAD_CORE = 'dead_core'
    LANDIS = 'landis'
    ORACLE = 'oracle'
    CALIBRATION = 'calibration'


HARNACK_KINDS = (
    ExperimentKindEnum.HARNACK,
    ExperimentKindEnum.WEAK_HARNACK,
    ExperimentKindEnum.LOCAL_MAX,
)

# kinds that sweep over R and need a non-empty R-grid
RADIUS_KINDS = HARNACK_KINDS + (
    ExperimentKindEnum.CHAIN,
    ExperimentKindEnum.LANDIS,
    ExperimentKindEnum.CALIBRATION,
)


class FormChoiceEnum(Enum):
    DIVERGENCE = 'divergence'
    NONDIVERGENCE = 'nondivergence'
    PUCCI_PLUS = 'pucci_plus'
    PUCCI_MINUS = 'pucci_minus'


class ShapeChoiceEnum(Enum):
    INTERVAL = 'interval'
    BOX = 'box'
    DISK = 'disk'
    ANNULUS = 'annulus'


class RegionChoiceEnum(Enum):
    BALL = 'ball'
    SHELL = 'shell'


class FamilyChoiceEnum(Enum):
    LOG_POWER = 'log_power'
    POWER = 'power'
    LINEAR = 'linear'
    EXPRESSION = 'expression'


# the domain's boundary data is drawn from the seeded generator
RANDOM_BOUNDARY = 'random'
RANDOM_BOUNDARY_RANGE = (0.5, 1.5)

# exit codes of the `lab` command
EXIT_SUCCESS = 0
EXIT_ERROR = 1
EXIT_VIOLATION = 2

# CSV columns per experiment kind, main table first
CSV_COLUMNS = {
    ExperimentKindEnum.HARNACK: [
        'R',
        'A',
        'sup_u',
        'inf_u',
        'ratio',
        'log_ratio',
        'bound_exp_c0AR_inf_plus_g',
        'violated',
    ],
    ExperimentKindEnum.WEAK_HARNACK: [
        'R',
        'A',
        'epsilon',
        'inf_u',
        'epsilon_integral',
        'bound_exp_c0AR_inf_plus_g',
        'violated',
    ],
    ExperimentKindEnum.LOCAL_MAX: [
        'R',
        'A',
        'epsilon',
        'sup_u',
        'epsilon_integral_ul',
        'forcing',
        'bound_C_A_n_over_eps',
        'violated',
    ],
    ExperimentKindEnum.ABP: ['sup_w', 'forcing_Lp', 'ratio', 'subsolution', 'bound', 'violated'],
    ExperimentKindEnum.CHAIN: [
        'n',
        'R',
        'r0',
        'balls_m',
        'chain_d',
        'm_r0_over_R_n',
        'd_r0_over_R',
        'covers',
    ],
    ExperimentKindEnum.SMP: ['delta', 'M_delta', 'log_trace_k_ln_delta_plus_sqrt_M'],
    ExperimentKindEnum.DEAD_CORE: ['x', 'u'],
    ExperimentKindEnum.LANDIS: [
        'R',
        'inf_psi_G_R',
        'shell_sup_psi',
        'lower_bound_exp_minus_C1R',
    ],
    ExperimentKindEnum.ORACLE: ['b', 'c', 'D', 'D_minus', 'measured_decay_rate', 'A'],
    ExperimentKindEnum.CALIBRATION: [
        'suite',
        'problem',
        'R',
        'A',
        'sup_u',
        'inf_u',
        'ratio',
        'epsilon_integral_ul',
        'violated',
    ],
}

# secondary tables written next to the main one
SUMMARY_COLUMNS = ['quantity', 'value']
VAZQUEZ_COLUMNS = ['delta', 'M_delta', 'integral', 'log_bound']
LANDIS_DECAY_COLUMNS = ['R', 'shell_sup_u', 'log_exp_C1R_sup_u']
