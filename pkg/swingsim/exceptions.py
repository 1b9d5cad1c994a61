#   Licensed under the Apache License, Version 2.0 (the "License"); you may
#   not use this file except in compliance with the License. You may obtain
#   a copy of the License at
#
#        http://www.apache.org/licenses/LICENSE-2.0
#
#   Unless required by applicable law or agreed to in writing, software
#   distributed under the License is distributed on an "AS IS" BASIS, WITHOUT
#   WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied. See the
#   License for the specific language governing permissions and limitations
#   under the License.

"""
Exceptions raised by swingsim.

Every exception derives from :class:`SwingSimError` and from the builtin
exception describing the same kind of failure, so that callers can catch
either.
"""

import typing
from typing import Optional, Sequence


__all__ = ['SwingSimError', 'InvalidParameters', 'ShapeMismatch',
           'InvalidConfig', 'ConfigError', 'SingularState', 'NoEquilibrium',
           'ConditionViolated', 'AcceptanceViolation']


class SwingSimError(Exception):
    """Base class for all swingsim errors."""


class InvalidParameters(SwingSimError, ValueError):
    """A physical parameter is outside its admissible range."""


class ShapeMismatch(SwingSimError, ValueError):
    """A state does not carry the components a model or set requires."""


class InvalidConfig(SwingSimError, ValueError):
    """An integration or scenario setting is invalid."""


class ConfigError(InvalidConfig):
    """An error in a scenario file, located by field and/or line."""

    def __init__(self, message: str, *,
                 field: Optional[str] = None,
                 line: Optional[int] = None,
                 column: Optional[int] = None):
        self.field = field
        self.line = line
        self.column = column
        location = []
        if line is not None:
            location.append(f'line {line}')
            if column is not None:
                location.append(f'column {column}')
        if field is not None:
            location.append(f'field "{field}"')
        if location:
            message = f'{", ".join(location)}: {message}'
        super().__init__(message)


class SingularState(SwingSimError, ArithmeticError):
    """The rotor speed is at or below the singularity guard."""

    def __init__(self, omega: typing.Any):
        self.omega = omega
        super().__init__(f'rotor speed {omega!r} rad/s is not above the '
                         f'singularity guard')


class NoEquilibrium(SwingSimError, ArithmeticError):
    """The system has no (admissible) equilibrium for these parameters."""


class ConditionViolated(SwingSimError, ArithmeticError):
    """A standing assumption of a stability estimate does not hold."""

    def __init__(self, condition: str, message: str):
        self.condition = condition
        super().__init__(f'{message} (requires {condition})')


class AcceptanceViolation(SwingSimError):
    """Cells inside a region-of-attraction estimate failed to converge."""

    def __init__(self, cells: Sequence[typing.Any]):
        self.cells = list(cells)
        super().__init__(f'{len(self.cells)} cell(s) inside the region of '
                         f'attraction estimate did not converge')
