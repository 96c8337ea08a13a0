"""Validated parameter bundle shared by the integral, constant and quotient code."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

from .errors import DomainError


@dataclass(frozen=True)
class Params:
    """Order ``mu``, power ``q``, tilt ``gamma`` and the optional split
    parameter ``theta`` and weight defect ``eta``.

    ``gamma = 0`` is accepted here; routines that need a genuine tilt check
    for it themselves.
    """

    mu: float
    q: float
    gamma: float
    theta: Optional[float] = None
    eta: Optional[float] = None

    def __post_init__(self):
        for name in ("mu", "q", "gamma"):
            if not math.isfinite(getattr(self, name)):
                raise DomainError(f"{name} must be finite")
        if self.mu <= -1:
            raise DomainError(f"requires mu > -1 (mu={self.mu})")
        if self.q <= -1:
            raise DomainError(f"requires q > -1 (q={self.q})")
        if not 0 <= self.gamma < 1:
            raise DomainError(f"requires 0 <= gamma < 1 (gamma={self.gamma})")
        if self.eta is not None and not 0 <= self.eta < 1 - self.gamma:
            raise DomainError(
                f"requires 0 <= eta < 1 - gamma (eta={self.eta}, gamma={self.gamma})"
            )
        if self.theta is not None:
            floor = self.gamma + (self.eta or 0.0)
            if not floor < self.theta < 1:
                what = "gamma + eta" if self.eta else "gamma"
                raise DomainError(
                    f"requires {what} < theta < 1 (theta={self.theta}, {what}={floor})"
                )

    def with_theta(self, theta=None):
        """Copy with ``theta`` set; ``None`` picks the midpoint of the
        admissible interval, ``(1 + gamma + eta) / 2``."""
        if theta is None:
            theta = default_theta(self.gamma, self.eta or 0.0)
        return replace(self, theta=theta)


def default_theta(gamma, eta=0.0):
    """Canonical split parameter ``(1 + gamma) / 2`` (shifted by ``eta``)."""
    return 0.5 * (1.0 + gamma + eta)
