"""Link-allocation search space over router pairs.

An allocation selects which of the p = n(n-1)/2 possible router pairs get a
direct bidirectional link. Allocations are immutable bit vectors; bit k
corresponds to the k-th pair in the canonical lexicographic ordering of
(i, j) with i < j. The bit vector is the variable every search algorithm
operates on.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

# Resampling bound for random_allocation(require_connected=True). The
# connected fraction at density 1/2 is high for n >= 4, so hitting this
# bound indicates a pathological configuration rather than bad luck.
MAX_CONNECTED_ATTEMPTS = 10_000


class InvalidPairError(ValueError):
    """Raised for (i, j) that do not name a valid unordered router pair."""


class SamplingError(RuntimeError):
    """Raised when connected resampling exhausts its attempt bound."""


class AllocationFormatError(ValueError):
    """Raised for unparseable allocation strings."""


def num_links(n: int) -> int:
    """Number of possible links p = n(n-1)/2 for n routers."""
    if n < 2:
        raise ValueError(f"need at least 2 routers, got {n}")
    return n * (n - 1) // 2


def combination_count(n: int) -> int:
    """Exact size of the allocation space, 2**num_links(n)."""
    return 1 << num_links(n)


def link_index(i: int, j: int, n: int) -> int:
    """Canonical index of the pair {i, j}, lexicographic by (i, j) with i < j."""
    if not (0 <= i < j < n):
        raise InvalidPairError(f"invalid pair ({i}, {j}) for n={n}")
    return i * n - i * (i + 1) // 2 + (j - i - 1)


def link_pair(k: int, n: int) -> tuple[int, int]:
    """Inverse of link_index: the (i, j) pair at canonical index k."""
    p = num_links(n)
    if not (0 <= k < p):
        raise IndexError(f"link index {k} out of range for n={n} (p={p})")
    i = 0
    row = n - 1  # pairs starting at router i
    while k >= row:
        k -= row
        i += 1
        row -= 1
    return i, i + 1 + k


def all_pairs(n: int) -> list[tuple[int, int]]:
    """All unordered pairs in canonical order; index in this list == link_index."""
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


@dataclass(frozen=True)
class LinkAllocation:
    """Immutable bit vector over the p possible links of an n-router network.

    The bits are packed into a Python int; bit k of `mask` is link k. Being
    a frozen value type, allocations hash cheaply and can be shared freely
    between concurrent workers.
    """

    n_routers: int
    mask: int

    def __post_init__(self) -> None:
        if self.n_routers < 2:
            raise ValueError(f"need at least 2 routers, got {self.n_routers}")
        p = num_links(self.n_routers)
        if not (0 <= self.mask < (1 << p)):
            raise ValueError(f"mask out of range for p={p} bits")

    @property
    def p(self) -> int:
        """Number of bit positions, n(n-1)/2."""
        return num_links(self.n_routers)

    @property
    def link_count(self) -> int:
        return self.mask.bit_count()

    def has_bit(self, k: int) -> bool:
        if not (0 <= k < self.p):
            raise IndexError(f"link index {k} out of range (p={self.p})")
        return bool((self.mask >> k) & 1)

    def has_link(self, i: int, j: int) -> bool:
        if i > j:
            i, j = j, i
        return self.has_bit(link_index(i, j, self.n_routers))

    def links(self) -> list[tuple[int, int]]:
        """Present links as (i, j) pairs in canonical order."""
        pairs = all_pairs(self.n_routers)
        m = self.mask
        out = []
        k = 0
        while m:
            if m & 1:
                out.append(pairs[k])
            m >>= 1
            k += 1
        return out

    def degrees(self) -> list[int]:
        """Per-router link degree (local port not included)."""
        deg = [0] * self.n_routers
        for i, j in self.links():
            deg[i] += 1
            deg[j] += 1
        return deg

    def to_bit_string(self) -> str:
        """Canonical serialization: '0'/'1' characters, character k = bit k."""
        return "".join("1" if (self.mask >> k) & 1 else "0" for k in range(self.p))

    @classmethod
    def from_bit_string(cls, s: str) -> "LinkAllocation":
        if not s or set(s) - {"0", "1"}:
            raise AllocationFormatError("allocation string must be non-empty and contain only 0/1")
        n = _routers_for_length(len(s))
        mask = 0
        for k, ch in enumerate(s):
            if ch == "1":
                mask |= 1 << k
        return cls(n, mask)

    def to_hex_string(self) -> str:
        """Compact form `n=<n>;bits=<hex>`: bit k is bit (k mod 4) of hex digit
        floor(k/4), most significant digit first."""
        ndigits = (self.p + 3) // 4
        digits = []
        for d in range(ndigits):
            v = 0
            for m in range(4):
                k = 4 * d + m
                if k < self.p and (self.mask >> k) & 1:
                    v |= 1 << m
            digits.append(f"{v:x}")
        return f"n={self.n_routers};bits={''.join(digits)}"

    @classmethod
    def from_hex_string(cls, s: str) -> "LinkAllocation":
        try:
            n_part, bits_part = s.split(";")
            n = int(n_part.removeprefix("n="))
            hexdigits = bits_part.removeprefix("bits=")
            if n_part[:2] != "n=" or bits_part[:5] != "bits=":
                raise ValueError
        except ValueError:
            raise AllocationFormatError(f"malformed hex allocation {s!r}") from None
        p = num_links(n)
        if len(hexdigits) != (p + 3) // 4:
            raise AllocationFormatError(
                f"hex allocation has {len(hexdigits)} digits, expected {(p + 3) // 4} for n={n}"
            )
        mask = 0
        for d, ch in enumerate(hexdigits):
            try:
                v = int(ch, 16)
            except ValueError:
                raise AllocationFormatError(f"bad hex digit {ch!r}") from None
            for m in range(4):
                k = 4 * d + m
                if v & (1 << m):
                    if k >= p:
                        raise AllocationFormatError("hex allocation has bits beyond p")
                    mask |= 1 << k
        return cls(n, mask)


def _routers_for_length(p: int) -> int:
    """Recover n from p = n(n-1)/2, or fail if p is not triangular."""
    n = (1 + math.isqrt(1 + 8 * p)) // 2
    if num_links(max(n, 2)) != p:
        raise AllocationFormatError(f"length {p} is not n(n-1)/2 for any integer n")
    return n


def parse_allocation(s: str, n: int | None = None) -> LinkAllocation:
    """Parse either serialized form; check against an expected router count."""
    s = s.strip()
    alloc = LinkAllocation.from_hex_string(s) if s.startswith("n=") else LinkAllocation.from_bit_string(s)
    if n is not None and alloc.n_routers != n:
        raise AllocationFormatError(f"allocation is for n={alloc.n_routers}, expected n={n}")
    return alloc


def is_connected(a: LinkAllocation) -> bool:
    """True iff the present links form one component spanning all routers."""
    n = a.n_routers
    if a.link_count < n - 1:
        return False
    adj: list[list[int]] = [[] for _ in range(n)]
    for i, j in a.links():
        adj[i].append(j)
        adj[j].append(i)
    seen = bytearray(n)
    seen[0] = 1
    stack = [0]
    count = 1
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if not seen[v]:
                seen[v] = 1
                count += 1
                stack.append(v)
    return count == n


def mesh_allocation(rows: int, cols: int) -> LinkAllocation:
    """2-D mesh on a rows x cols grid, routers numbered row-major."""
    if rows < 2 or cols < 2:
        raise ValueError(f"mesh needs rows, cols >= 2, got {rows}x{cols}")
    n = rows * cols
    mask = 0
    for r in range(rows):
        for c in range(cols):
            rid = r * cols + c
            if c + 1 < cols:
                mask |= 1 << link_index(rid, rid + 1, n)
            if r + 1 < rows:
                mask |= 1 << link_index(rid, rid + cols, n)
    return LinkAllocation(n, mask)


def fully_connected_allocation(n: int) -> LinkAllocation:
    """All p bits set: every router pair directly linked."""
    return LinkAllocation(n, (1 << num_links(n)) - 1)


def random_allocation(n: int, rng: random.Random, require_connected: bool = False) -> LinkAllocation:
    """Each bit independently 1 with probability 1/2 from the caller's rng.

    With require_connected, resamples until connected (bounded attempts).
    """
    p = num_links(n)
    for _ in range(MAX_CONNECTED_ATTEMPTS if require_connected else 1):
        a = LinkAllocation(n, rng.getrandbits(p))
        if not require_connected or is_connected(a):
            return a
    raise SamplingError(
        f"no connected allocation found for n={n} in {MAX_CONNECTED_ATTEMPTS} attempts"
    )


def flip_link(a: LinkAllocation, k: int) -> LinkAllocation:
    """Copy of the allocation with bit k inverted."""
    if not (0 <= k < a.p):
        raise IndexError(f"link index {k} out of range (p={a.p})")
    return LinkAllocation(a.n_routers, a.mask ^ (1 << k))
