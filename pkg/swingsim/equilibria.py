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
Closed-form equilibria of the improved swing equation.

With a constant load the equilibria of J w dw/dt + D_d w (w - w*) = P_m - P_e
are the roots of the quadratic D_d w (w - w*) = u + P_m - P_e. Connected to
an infinite bus the equilibrium is (arcsin(P_m/gamma), w*).
"""

import collections
import dataclasses
import logging
import math

from typing import Optional

from swingsim import exceptions
from swingsim import models


__all__ = ['EquilibriumPair', 'SmibEquilibrium', 'compute_discriminant',
           'equilibria_load', 'equilibrium_smib', 'reduce_losses',
           'load_slope']


LOG = logging.getLogger(__name__)

# Bound on P_m/gamma for the infinite-bus region of attraction estimate
SMIB_LOAD_LIMIT = 2.0 / math.pi


@dataclasses.dataclass(frozen=True)
class EquilibriumPair:
    """
    The two equilibria of the improved load model.

    ``omega_s`` is the stable root and ``omega_u`` the unstable one; both are
    None when the discriminant is not positive.
    """
    delta_disc: float
    omega_s: Optional[float]
    omega_u: Optional[float]

    @property
    def exists(self) -> bool:
        return self.omega_s is not None


SmibEquilibrium = collections.namedtuple('SmibEquilibrium', [
        'delta_bar',
        'omega',
        'roa_eligible',
    ])


def compute_discriminant(p: models.GeneratorParams,
                         u_bar: float = 0.0) -> float:
    """Return w*^2 + 4 (u_bar + P_m - P_e) / D_d."""
    return p.omega_star ** 2 + 4.0 * (u_bar + p.P_m - p.P_e) / p.D_d


def equilibria_load(p: models.GeneratorParams,
                    u_bar: float = 0.0) -> EquilibriumPair:
    """
    Return the equilibria of the (controlled) improved load model.

    A double root (zero discriminant) is reported as non-existent.
    """
    disc = compute_discriminant(p, u_bar)
    if not disc > 0:
        LOG.debug('No equilibrium: discriminant %r is not positive', disc)
        return EquilibriumPair(disc, None, None)
    omega_s = (p.omega_star + math.sqrt(disc)) / 2.0
    # Product of the roots; avoids cancellation in (w* - sqrt(disc)) / 2
    product = -(u_bar + p.P_m - p.P_e) / p.D_d
    return EquilibriumPair(disc, omega_s, product / omega_s)


def load_slope(p: models.GeneratorParams, omega: float) -> float:
    """
    Return df/dw of the improved load model in terms of its equilibria.

    This is (D_d/J) (w_s w_u / w^2 - 1): negative at the stable root and
    positive at the unstable one.
    """
    models.guard_speed(omega)
    pair = equilibria_load(p)
    if not pair.exists:
        raise exceptions.NoEquilibrium('discriminant is not positive')
    assert pair.omega_s is not None and pair.omega_u is not None
    return (p.D_d / p.J) * (pair.omega_s * pair.omega_u / omega ** 2 - 1.0)


def equilibrium_smib(p: models.GeneratorParams) -> SmibEquilibrium:
    """
    Return the equilibrium (arcsin(P_m/gamma), w*) of the SMIB models.

    ``roa_eligible`` is True when 0 < P_m/gamma < 2/pi, i.e. when the
    region of attraction estimate of the improved model applies.
    """
    ratio = p.P_m / p.require_gamma()
    if abs(ratio) > 1.0:
        raise exceptions.NoEquilibrium(
            f'P_m/gamma = {ratio!r} exceeds the transfer limit')
    delta_bar = math.asin(ratio)
    return SmibEquilibrium(delta_bar, p.omega_star,
                           0.0 < delta_bar and ratio < SMIB_LOAD_LIMIT)


def reduce_losses(p: models.GeneratorParams) -> models.GeneratorParams:
    """
    Fold the viscous loss coefficient into the damping and nominal speed.

    J w dw/dt + D_m w^2 + D_d w (w - w*) = P_m - P_e is the improved load
    model with damping D = D_m + D_d and nominal speed D_d w* / D.
    """
    if p.D_m == 0:
        return p
    damping = p.D_m + p.D_d
    return p.replace(D_d=damping,
                     omega_star=p.D_d * p.omega_star / damping,
                     D_m=0.0)
