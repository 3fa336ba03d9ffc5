"""Finite distributions on the non-negative integers and their distances."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

NORMALIZATION_TOL = 1e-9
POISSON_TAIL = 1e-12


class NormalizationError(ValueError):
    pass


@dataclass(frozen=True)
class DistributionTable:
    support: dict[int, float | Fraction]
    kind: str  # "exact", "empirical" or "poisson"
    total: int | None = None

    @classmethod
    def from_counts(cls, counts: Mapping[int, int], kind: str = "empirical") -> "DistributionTable":
        total = sum(counts.values())
        if total <= 0:
            raise ValueError("counts must have a positive total")
        support = {k: Fraction(v, total) for k, v in sorted(counts.items()) if v}
        return cls(support, kind, total)

    def mass(self, k: int) -> float | Fraction:
        return self.support.get(k, 0)

    def mean(self) -> float | Fraction:
        return sum(k * p for k, p in self.support.items())

    def variance(self) -> float | Fraction:
        mu = self.mean()
        return sum((k - mu) ** 2 * p for k, p in self.support.items())

    def is_normalized(self) -> bool:
        if any(p < 0 for p in self.support.values()):
            return False
        return abs(math.fsum(float(p) for p in self.support.values()) - 1.0) <= NORMALIZATION_TOL

    def to_dict(self) -> dict:
        exact = all(isinstance(p, Fraction) for p in self.support.values())
        out = {
            "kind": self.kind,
            "support": {str(k): (str(p) if exact else repr(float(p))) for k, p in self.support.items()},
        }
        if self.total is not None:
            out["total"] = str(self.total)
        return out


def poisson_table(lam: float, tail: float = POISSON_TAIL) -> DistributionTable:
    """Poisson masses until the remaining tail mass is below ``tail``."""
    if lam < 0:
        raise ValueError("lambda must be non-negative")
    lam = float(lam)
    if lam == 0:
        return DistributionTable({0: 1.0}, "poisson")
    support = {}
    p = math.exp(-lam)
    k, cum = 0, 0.0
    while True:
        support[k] = p
        cum += p
        if 1.0 - cum < tail and k > lam:
            return DistributionTable(support, "poisson")
        k += 1
        p *= lam / k


def tv_distance(a: DistributionTable, b: DistributionTable) -> float:
    for t in (a, b):
        if not t.is_normalized():
            raise NormalizationError(f"{t.kind} table is not normalized")
    keys = set(a.support) | set(b.support)
    if all(isinstance(p, Fraction) for t in (a, b) for p in t.support.values()):
        return float(sum(abs(a.mass(k) - b.mass(k)) for k in keys) / 2)
    return min(1.0, math.fsum(abs(float(a.mass(k)) - float(b.mass(k))) for k in keys) / 2)
