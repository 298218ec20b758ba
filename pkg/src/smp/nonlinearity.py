from dataclasses import dataclass, replace
from enum import Enum
import math
from typing import Callable, Optional

import numpy as np
from scipy import integrate

from common.exceptions import DomainError


class NonlinearityKindEnum(Enum):
    LOG_POWER = 'Log power'
    POWER = 'Power'
    LINEAR = 'Linear'
    EXPRESSION = 'Expression'


@dataclass(frozen=True, eq=False)
class Nonlinearity:
    """
    A nonlinearity f with f(0) = 0, extended by 0 for s < 0. `function` is a
    vectorized callable evaluated on positive arguments only.
    """

    kind: NonlinearityKindEnum
    function: Callable[[np.ndarray], np.ndarray]
    parameter: Optional[float] = None
    coefficient: float = 1.0
    label: str = ''

    def __call__(self, s):
        s = np.asarray(s, dtype=float)
        values = np.zeros_like(s)
        positive = s > 0
        if np.any(positive):
            values[positive] = self.coefficient * np.asarray(
                self.function(s[positive]), dtype=float
            )
        return float(values) if values.ndim == 0 else values

    def primitive(self, s: float) -> float:
        """F(s) = ∫₀^s f."""
        if s <= 0:
            return 0.0
        if self.kind == NonlinearityKindEnum.POWER:
            return self.coefficient * s ** (self.parameter + 1) / (self.parameter + 1)
        if self.kind == NonlinearityKindEnum.LINEAR:
            return self.coefficient * s**2 / 2

        value, _error = integrate.quad(
            lambda t: float(self(t)), 0.0, s, epsabs=0.0, epsrel=1e-10, limit=200
        )
        return value

    def scaled(self, factor: float) -> 'Nonlinearity':
        return replace(self, coefficient=self.coefficient * factor)

    def __str__(self):
        return self.label or self.kind.value


def log_power(a: float) -> Nonlinearity:
    """f(s) = s|ln s|^a."""
    return Nonlinearity(
        NonlinearityKindEnum.LOG_POWER,
        lambda s: s * np.abs(np.log(s)) ** a,
        parameter=a,
        label=f's|ln s|^{a:g}',
    )


def power(theta: float, coefficient: float = 1.0) -> Nonlinearity:
    """f(s) = coefficient·s^θ; θ < 1 admits dead cores."""
    if not theta > 0:
        raise DomainError('power nonlinearities need θ > 0')
    return Nonlinearity(
        NonlinearityKindEnum.POWER,
        lambda s: s**theta,
        parameter=theta,
        coefficient=coefficient,
        label=f'{coefficient:g}s^{theta:g}',
    )


def linear(coefficient: float = 1.0) -> Nonlinearity:
    return Nonlinearity(
        NonlinearityKindEnum.LINEAR, lambda s: s, coefficient=coefficient, label=f'{coefficient:g}s'
    )


def from_callable(function: Callable[[np.ndarray], np.ndarray], label: str = '') -> Nonlinearity:
    with np.errstate(all='ignore'):
        value = float(np.asarray(function(np.array([0.0])), dtype=float).ravel()[0])
    # expressions such as s·ln s are only defined at 0 as a limit
    if math.isfinite(value) and not math.isclose(value, 0.0, abs_tol=1e-14):
        raise DomainError(f'f(0) = {value} must vanish')
    return Nonlinearity(NonlinearityKindEnum.EXPRESSION, function, label=label)
