"""Interaction-angle streams theta_1, theta_2, ... in (0, pi/2).

An edge weight x = exp(-2 beta J) is encoded by the angle theta = 2 arctan(x);
both grow with temperature. theta_0 is fixed to 0 by convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import DomainError, SizeError

HALF_PI = 0.5 * math.pi


def theta_from_x(x):
    """Angle for the edge weight ``x = tan(theta/2)``."""
    return 2.0 * np.arctan(x)


def x_from_theta(theta):
    return np.tan(0.5 * np.asarray(theta, dtype=float))


def coupling_from_theta(theta):
    """Reduced coupling beta*J for an angle: ``-0.5 * log(tan(theta/2))``."""
    return -0.5 * np.log(x_from_theta(theta))


def theta_from_coupling(beta_j):
    return theta_from_x(np.exp(-2.0 * np.asarray(beta_j, dtype=float)))


def check_angle(theta: float, index: int | str = "?") -> float:
    theta = float(theta)
    if not (0.0 < theta < HALF_PI) or not math.isfinite(theta):
        raise DomainError(
            f"theta_{index} = {theta!r} is outside the open interval (0, pi/2)"
        )
    return theta


@dataclass(frozen=True)
class AngleSequence:
    """A generator of theta_k for k >= 1.

    Use the constructors :meth:`explicit`, :meth:`periodic`,
    :meth:`homogeneous` and :meth:`homogeneous_with_first` rather than the
    raw initializer.  An explicit list may carry a homogeneous ``tail`` that
    continues it indefinitely; without a tail, indices past the end raise
    :class:`SizeError`.
    """

    kind: str
    values: tuple[float, ...]
    tail: float | None = None

    def __post_init__(self):
        if self.kind not in ("explicit", "periodic", "homogeneous", "homogeneous-with-first"):
            raise DomainError(f"unknown angle-sequence kind {self.kind!r}")
        for i, t in enumerate(self.values, start=1):
            check_angle(t, i)
        if self.tail is not None:
            check_angle(self.tail, "tail")
        if self.kind == "periodic" and len(self.values) == 0:
            raise DomainError("periodic block must be non-empty")

    # constructors -------------------------------------------------------

    @classmethod
    def explicit(cls, thetas: Sequence[float], tail: float | None = None) -> "AngleSequence":
        return cls("explicit", tuple(float(t) for t in thetas), tail)

    @classmethod
    def periodic(cls, block: Sequence[float]) -> "AngleSequence":
        return cls("periodic", tuple(float(t) for t in block))

    @classmethod
    def homogeneous(cls, theta: float) -> "AngleSequence":
        return cls("homogeneous", (), float(theta))

    @classmethod
    def homogeneous_with_first(cls, theta1: float, theta: float) -> "AngleSequence":
        return cls("homogeneous-with-first", (float(theta1),), float(theta))

    @classmethod
    def from_x(cls, xs: Sequence[float], tail_x: float | None = None) -> "AngleSequence":
        thetas = [float(theta_from_x(x)) for x in xs]
        tail = None if tail_x is None else float(theta_from_x(tail_x))
        return cls.explicit(thetas, tail)

    # access ---------------------------------------------------------------

    @property
    def available(self) -> int | None:
        """Number of defined angles, or ``None`` if the stream is infinite."""
        if self.kind == "explicit" and self.tail is None:
            return len(self.values)
        return None

    def theta(self, k: int) -> float:
        if k == 0:
            return 0.0
        if k < 0:
            raise DomainError(f"angle index must be >= 0, got {k}")
        if self.kind == "periodic":
            return self.values[(k - 1) % len(self.values)]
        if k <= len(self.values):
            return self.values[k - 1]
        if self.tail is None:
            raise SizeError(
                f"explicit angle list has {len(self.values)} entries; theta_{k} requested"
            )
        return self.tail

    __call__ = theta

    def take(self, n: int) -> np.ndarray:
        """Array ``[theta_0, theta_1, ..., theta_n]`` (theta_0 = 0 included)."""
        if self.kind == "periodic":
            block = np.asarray(self.values)
            return np.concatenate(([0.0], np.resize(block, n)))
        out = np.empty(n + 1)
        out[0] = 0.0
        for k in range(1, n + 1):
            out[k] = self.theta(k)
        return out

    def canonical(self) -> dict:
        return {"kind": self.kind, "values": list(self.values), "tail": self.tail}

    @classmethod
    def from_canonical(cls, data: dict) -> "AngleSequence":
        return cls(data["kind"], tuple(float(v) for v in data["values"]), data["tail"])
