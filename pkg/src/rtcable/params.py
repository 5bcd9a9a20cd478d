"""Cable parameters shared by the skein, cabling and structure layers."""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd

from rtcable.cyclotomic import RootSystem
from rtcable.errors import PreconditionError


@dataclass(frozen=True)
class CableParams:
    """Slope p/q of the cabling torus knot together with the level r.

    Only gcd(p, q) = 1 and q >= 1 are enforced here; coprimality of r and q
    and the bound r > q + 6 gate individual operations instead.
    """

    p: int
    q: int
    sys: RootSystem

    def __post_init__(self) -> None:
        if self.q < 1:
            raise PreconditionError(f"q must be positive, got {self.q}")
        if gcd(self.p, self.q) != 1:
            raise PreconditionError(f"p and q must be coprime, got p={self.p}, q={self.q}")

    @classmethod
    def of(cls, p: int, q: int, r: int) -> CableParams:
        try:
            sys = RootSystem(r)
        except ValueError as exc:
            raise PreconditionError(str(exc)) from None
        return cls(int(p), int(q), sys)

    @property
    def r(self) -> int:
        return self.sys.r

    @property
    def m(self) -> int:
        return self.sys.m

    @property
    def level_gcd(self) -> int:
        return gcd(self.r, self.q)

    @property
    def large_level(self) -> bool:
        """True when r > q + 6, the regime where the sparsity pattern of R_m is fully determined."""
        return self.r > self.q + 6

    def __str__(self) -> str:
        return f"(p={self.p}, q={self.q}, r={self.r})"
