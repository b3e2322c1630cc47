"""Characteristic-aligned discretization of the spacetime slab [0, T] x T^1.

The spatial domain is the circle [0, 2*pi) (x in radians).  The grid is
square in the characteristic sense: dt = dx, so unit-speed characteristics
x = x0 +- t pass exactly through cell diagonals and transport along them is
an integer circular shift.  The requested horizon T is rounded to the
nearest multiple of dt; the effective horizon ``t_eff`` (|t_eff - T| <=
dt/2) is what every analysis actually uses and reports.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Resolution:
    """Grid geometry for a horizon: n space bins over [0, 2*pi), dt = dx."""

    n: int
    horizon: float

    def __post_init__(self) -> None:
        if self.n < 2:
            raise ValueError(f"need at least 2 space bins, got n={self.n}")
        if not self.horizon > 0.0:
            raise ValueError(f"horizon must be positive, got {self.horizon}")
        if round(self.horizon / self.dx) < 1:
            raise ValueError(
                f"horizon {self.horizon} is below half a grid step at n={self.n}"
            )

    @property
    def dx(self) -> float:
        return TWO_PI / self.n

    @property
    def dt(self) -> float:
        # unit-slope characteristics cross one cell per step
        return self.dx

    @property
    def nt(self) -> int:
        return int(round(self.horizon / self.dt))

    @property
    def t_eff(self) -> float:
        return self.nt * self.dt

    def x_centers(self):
        import numpy as np

        return (np.arange(self.n) + 0.5) * self.dx

    def t_nodes(self):
        import numpy as np

        return np.arange(self.nt + 1) * self.dt
