"""Finitely generated abelian groups in invariant-factor normal form.

A group is recorded as a free rank plus an ordered list of torsion
coefficients t_1 | t_2 | ... with every t_i >= 2.  This is the canonical
form delivered by the Smith normal form of a presentation matrix, so two
groups are isomorphic exactly when their records are equal.  Over the
rationals the torsion list is always empty and the free rank is a vector
space dimension.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, prod


def _factorint(n: int) -> dict[int, int]:
    # trial division; torsion orders here are tiny (products of weight gcds)
    result: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            result[d] = result.get(d, 0) + 1
            n //= d
        d += 1
    if n > 1:
        result[n] = result.get(n, 0) + 1
    return result


def invariant_factors(orders) -> tuple[int, ...]:
    """Normalize a multiset of cyclic orders (each >= 1) to invariant factors.

    Returns the ascending divisibility chain t_1 | ... | t_k with t_i >= 2.
    """
    exponents: dict[int, list[int]] = {}
    for n in orders:
        n = abs(n)
        if n <= 1:
            continue
        for p, e in _factorint(n).items():
            exponents.setdefault(p, []).append(e)
    if not exponents:
        return ()
    for lst in exponents.values():
        lst.sort(reverse=True)
    width = max(len(lst) for lst in exponents.values())
    factors = []
    for i in range(width):
        factors.append(prod(p ** lst[i] for p, lst in exponents.items() if i < len(lst)))
    factors.reverse()
    return tuple(factors)


@dataclass(frozen=True)
class FgAbelianGroup:
    free_rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("free rank must be nonnegative")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"torsion list {self.torsion} violates divisibility")
        if any(t < 2 for t in self.torsion):
            raise ValueError("torsion coefficients must be >= 2")

    @classmethod
    def trivial(cls) -> "FgAbelianGroup":
        return cls(0, ())

    @classmethod
    def free(cls, rank: int) -> "FgAbelianGroup":
        return cls(rank, ())

    @classmethod
    def from_cyclic_orders(cls, free_rank: int, orders) -> "FgAbelianGroup":
        """Build from arbitrary cyclic summands Z/n (n=0 not allowed here)."""
        return cls(free_rank, invariant_factors(orders))

    @classmethod
    def from_diagonal(cls, diagonal, ambient_rank: int) -> "FgAbelianGroup":
        """Cokernel of a diagonal relation matrix acting on Z^ambient_rank.

        ``diagonal`` lists the nonzero invariant factors of the relations;
        unit entries contribute nothing and are dropped.
        """
        nonzero = [abs(d) for d in diagonal if d]
        torsion = tuple(d for d in nonzero if d > 1)
        return cls(ambient_rank - len(nonzero), torsion)

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.torsion

    def direct_sum(self, other: "FgAbelianGroup") -> "FgAbelianGroup":
        return FgAbelianGroup.from_cyclic_orders(
            self.free_rank + other.free_rank, self.torsion + other.torsion
        )

    def tensor(self, other: "FgAbelianGroup") -> "FgAbelianGroup":
        """Tensor product over Z: bilinear over sums, Z/s (x) Z/t = Z/gcd(s,t)."""
        orders = []
        orders.extend(t for t in other.torsion for _ in range(self.free_rank))
        orders.extend(s for s in self.torsion for _ in range(other.free_rank))
        orders.extend(gcd(s, t) for s in self.torsion for t in other.torsion)
        return FgAbelianGroup.from_cyclic_orders(self.free_rank * other.free_rank, orders)

    def tor(self, other: "FgAbelianGroup") -> "FgAbelianGroup":
        """Torsion product over Z: free summands die, Tor(Z/s, Z/t) = Z/gcd(s,t)."""
        orders = [gcd(s, t) for s in self.torsion for t in other.torsion]
        return FgAbelianGroup.from_cyclic_orders(0, orders)

    def to_json(self) -> dict:
        return {"free_rank": self.free_rank, "torsion": list(self.torsion)}

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{t}" for t in self.torsion)
        return " + ".join(parts) if parts else "0"
