"""Data model for linear caching/delivery schemes.

A scheme stores one placement matrix per user (rows are cached linear
combinations of the N*L global subfile symbols) and, for every demand
vector, one encoding matrix per sender mapping that sender's cache rows
to transmitted rows.  Demands are 1-based file ids with 0 marking a
non-requesting (sender) user.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .errors import ConfigurationError
from .field import FieldMatrix, FieldSpec

Demand = tuple[int, ...]


class ModelKind(str, Enum):
    TWO_RR_ONE_S = "2rr1s"
    TRADITIONAL_D2D = "traditional"
    K_USER_S_SENDERS = "kuser"
    REQUEST_RANDOM = "request_random"


def model_params_ok(model: ModelKind, N: int, K: int, s: Optional[int]) -> None:
    if N < 1:
        raise ConfigurationError("N must be positive")
    if model is ModelKind.TWO_RR_ONE_S:
        if K != 3 or (s not in (None, 1)):
            raise ConfigurationError("two-requester/one-sender model requires K=3, s=1")
    elif model is ModelKind.TRADITIONAL_D2D:
        if s not in (None, 0):
            raise ConfigurationError("traditional model has no designated senders")
    elif model is ModelKind.K_USER_S_SENDERS:
        if s is None or not 1 <= s <= K - 2:
            raise ConfigurationError(f"kuser model requires 1 <= s <= K-2, got s={s}")
    elif model is ModelKind.REQUEST_RANDOM:
        if K != 3:
            raise ConfigurationError("request-random model requires K=3")


def demand_zero_pattern_ok(model: ModelKind, K: int, s: Optional[int], d: Demand) -> bool:
    zeros = sum(1 for v in d if v == 0)
    if model is ModelKind.TWO_RR_ONE_S:
        return zeros == 1
    if model is ModelKind.TRADITIONAL_D2D:
        return zeros == 0
    if model is ModelKind.K_USER_S_SENDERS:
        return zeros == s
    return True  # request-random: 0..K zeros


def requesters_of(d: Demand) -> tuple[int, ...]:
    """1-based indices of users with a file request."""
    return tuple(k + 1 for k, v in enumerate(d) if v != 0)


def senders_of(model: ModelKind, d: Demand) -> tuple[int, ...]:
    """1-based indices of users expected to transmit for demand d."""
    if model is ModelKind.TRADITIONAL_D2D:
        return tuple(range(1, len(d) + 1))
    zeros = tuple(k + 1 for k, v in enumerate(d) if v == 0)
    if model is ModelKind.REQUEST_RANDOM and not zeros:
        return tuple(range(1, len(d) + 1))
    return zeros


def enumerate_demands(model: ModelKind, N: int, K: int, s: Optional[int] = None) -> list[Demand]:
    """Deterministic lexicographic demand list for a model."""
    model_params_ok(model, N, K, s)
    files = range(1, N + 1)
    if model is ModelKind.TRADITIONAL_D2D:
        return sorted(itertools.product(files, repeat=K))
    if model is ModelKind.REQUEST_RANDOM:
        return sorted(itertools.product(range(N + 1), repeat=K))
    zero_count = 1 if model is ModelKind.TWO_RR_ONE_S else s
    out = []
    for zero_positions in itertools.combinations(range(K), zero_count):
        for choice in itertools.product(files, repeat=K - zero_count):
            d = [0] * K
            it = iter(choice)
            for i in range(K):
                if i not in zero_positions:
                    d[i] = next(it)
            out.append(tuple(d))
    return sorted(out)


@dataclass(frozen=True)
class SenderSignal:
    """One sender's contribution for one demand.

    ``matrix`` holds encoding rows over the sender's cache rows.  A row
    may optionally be tagged with the requesters it was written for
    (``serves``).  ``raw_rows`` holds symbol-space rows that could not be
    expressed over the cache; they are counted and transmitted but mark
    the scheme as violating the cache-encodability constraint.
    """

    matrix: FieldMatrix
    serves: Optional[tuple[Optional[tuple[int, ...]], ...]] = None
    raw_rows: Optional[FieldMatrix] = None

    def __post_init__(self):
        if self.serves is not None and len(self.serves) != self.matrix.nrows:
            raise ConfigurationError("serves tags must align with encoding rows")

    @property
    def row_count(self) -> int:
        extra = self.raw_rows.nrows if self.raw_rows is not None else 0
        return self.matrix.nrows + extra

    @property
    def clean(self) -> bool:
        return self.raw_rows is None or self.raw_rows.nrows == 0


DeliveryRule = Mapping[Demand, Mapping[int, SenderSignal]]


def symbol_col(N: int, L: int, n: int, l: int) -> int:
    """Flattened symbol index of subfile l of file n (both 1-based)."""
    if not (1 <= n <= N and 1 <= l <= L):
        raise ConfigurationError(f"symbol ({n},{l}) outside [{N}]x[{L}]")
    return (n - 1) * L + (l - 1)


def unit_row(N: int, L: int, n: int, l: int) -> tuple[int, ...]:
    row = [0] * (N * L)
    row[symbol_col(N, L, n, l)] = 1
    return tuple(row)


def xor_rows(*rows: Sequence[int]) -> tuple[int, ...]:
    out = [0] * len(rows[0])
    for r in rows:
        for i, v in enumerate(r):
            out[i] ^= v
    return tuple(out)


@dataclass(frozen=True)
class LinearScheme:
    """A complete linear caching-and-delivery design."""

    model: ModelKind
    N: int
    K: int
    s: Optional[int]
    L: int
    field: FieldSpec
    placement: tuple[FieldMatrix, ...]
    delivery: dict[Demand, dict[int, SenderSignal]]

    def __post_init__(self):
        model_params_ok(self.model, self.N, self.K, self.s)
        if len(self.placement) != self.K:
            raise ConfigurationError("need one placement matrix per user")
        cols = self.symbol_count
        for k, P in enumerate(self.placement, start=1):
            if P.ncols != cols:
                raise ConfigurationError(f"user {k} placement has {P.ncols} columns, expected {cols}")
            if P.spec != self.field:
                raise ConfigurationError(f"user {k} placement uses a different field")
        for d, per_sender in self.delivery.items():
            if len(d) != self.K or not demand_zero_pattern_ok(self.model, self.K, self.s, d):
                raise ConfigurationError(f"demand {d} has an invalid zero pattern")
            if any(not 0 <= v <= self.N for v in d):
                raise ConfigurationError(f"demand {d} requests a file outside 1..{self.N}")
            expected = set(senders_of(self.model, d))
            if set(per_sender) != expected:
                raise ConfigurationError(
                    f"demand {d}: senders {sorted(per_sender)} != expected {sorted(expected)}"
                )
            for k, sig in per_sender.items():
                if sig.matrix.ncols != self.placement[k - 1].nrows:
                    raise ConfigurationError(
                        f"demand {d} sender {k}: encoding width {sig.matrix.ncols} "
                        f"!= cache rows {self.placement[k - 1].nrows}"
                    )
                if sig.raw_rows is not None and sig.raw_rows.ncols != cols:
                    raise ConfigurationError(f"demand {d} sender {k}: raw row width mismatch")

    @property
    def symbol_count(self) -> int:
        return self.N * self.L

    def placement_rows(self, k: int) -> int:
        return self.placement[k - 1].nrows

    def placement_matrix(self, k: int) -> FieldMatrix:
        return self.placement[k - 1]

    def memory(self, k: int) -> Fraction:
        return Fraction(self.placement_rows(k), self.L)

    def delivery_row_counts(self, d: Demand) -> dict[int, int]:
        return {k: sig.row_count for k, sig in self.delivery[d].items()}

    def transmitted_rows(self, d: Demand) -> dict[int, FieldMatrix]:
        """Symbol-space rows each sender puts on the air for demand d."""
        out = {}
        for k, sig in self.delivery[d].items():
            rows = sig.matrix.matmul(self.placement[k - 1])
            if sig.raw_rows is not None:
                rows = rows.stack(sig.raw_rows)
            out[k] = rows
        return out

    def delivery_demands(self) -> Iterable[Demand]:
        return self.delivery.keys()

    @property
    def encoding_clean(self) -> bool:
        return all(sig.clean for per in self.delivery.values() for sig in per.values())


def _as_perm(perm: Sequence[int], n: int, what: str) -> tuple[int, ...]:
    p = tuple(perm)
    if sorted(p) != list(range(1, n + 1)):
        raise ConfigurationError(f"{what} must be a permutation of 1..{n}")
    return p


def apply_demand_perm(d: Demand, user_perm: Sequence[int], file_perm: Sequence[int]) -> Demand:
    """Demand induced by relabeling users and files (0 stays 0)."""
    K = len(d)
    out = [0] * K
    for i in range(K):
        v = d[i]
        out[user_perm[i] - 1] = 0 if v == 0 else file_perm[v - 1]
    return tuple(out)


def permute_scheme(scheme: LinearScheme, user_perm: Sequence[int], file_perm: Sequence[int]) -> LinearScheme:
    """Relabel users and files; the design is otherwise unchanged."""
    up = _as_perm(user_perm, scheme.K, "user_perm")
    fp = _as_perm(file_perm, scheme.N, "file_perm")
    N, L = scheme.N, scheme.L
    col_map = [0] * (N * L)
    for n in range(1, N + 1):
        for l in range(1, L + 1):
            col_map[symbol_col(N, L, n, l)] = symbol_col(N, L, fp[n - 1], l)
    new_placement: list[Optional[FieldMatrix]] = [None] * scheme.K
    for k in range(1, scheme.K + 1):
        new_placement[up[k - 1] - 1] = scheme.placement[k - 1].map_columns(col_map, N * L)
    new_delivery: dict[Demand, dict[int, SenderSignal]] = {}
    for d, per_sender in scheme.delivery.items():
        nd = apply_demand_perm(d, up, fp)
        new_per = {}
        for k, sig in per_sender.items():
            serves = None
            if sig.serves is not None:
                serves = tuple(
                    None if tags is None else tuple(sorted(up[u - 1] for u in tags))
                    for tags in sig.serves
                )
            raw = sig.raw_rows.map_columns(col_map, N * L) if sig.raw_rows is not None else None
            new_per[up[k - 1]] = SenderSignal(sig.matrix, serves, raw)
        new_delivery[nd] = new_per
    return LinearScheme(
        scheme.model, N, scheme.K, scheme.s, L, scheme.field,
        tuple(new_placement), new_delivery,
    )
