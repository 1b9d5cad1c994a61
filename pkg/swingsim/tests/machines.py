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

"""The machine used throughout the tests: M = 0.2, A = 0.04, 60 Hz."""

import math

import typing

from swingsim import models


OMEGA_STAR = 2.0 * math.pi * 60.0
M = 0.2
A = 0.04
GAMMA = 2.0


def machine(**kwargs: typing.Any) -> models.GeneratorParams:
    return models.GeneratorParams.per_unit(M, A, OMEGA_STAR, **kwargs)


def load(P_e: float, P_m: float = 1.0,
         **kwargs: typing.Any) -> models.GeneratorParams:
    return machine(P_m=P_m, P_e=P_e, **kwargs)


def smib(P_m: float = 1.0) -> models.GeneratorParams:
    return machine(P_m=P_m, gamma=GAMMA)
