"""Scheme transformations between delivery models.

- rotate_2rr1s: turn a two-requester/one-sender scheme into a scheme for
  the traditional model by halving every subfile and letting each user
  run the base rule for the demand in which it is the sender.
- adapt_request_random: reuse a two-requester base when 0..3 users
  request, with a fake requester and signal pruning when only one user
  requests.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Mapping, Optional, Sequence, Union

from .errors import ConfigurationError
from .field import FieldMatrix, RowSpan, solve_in_rowspace
from .model import (
    Demand,
    LinearScheme,
    ModelKind,
    SenderSignal,
    enumerate_demands,
    requesters_of,
    symbol_col,
)
from .verify import verify, _file_decodable

Probability = Union[Fraction, float]


# ---------------------------------------------------------------------------
# Rotation to the traditional three-user model
# ---------------------------------------------------------------------------

def _part_maps(N: int, L: int) -> tuple[list[int], list[int]]:
    """Column maps from (n, l) onto part-a / part-b slots of a 2L split."""
    amap = [0] * (N * L)
    bmap = [0] * (N * L)
    for n in range(1, N + 1):
        for l in range(1, L + 1):
            src = symbol_col(N, L, n, l)
            amap[src] = symbol_col(N, 2 * L, n, 2 * l - 1)
            bmap[src] = symbol_col(N, 2 * L, n, 2 * l)
    return amap, bmap


def _interleaved_coeffs(coeffs: Sequence[int], part: int) -> tuple[int, ...]:
    """Encoding row over [r1^a, r1^b, r2^a, r2^b, ...] from base coefficients."""
    out = [0] * (2 * len(coeffs))
    for j, c in enumerate(coeffs):
        out[2 * j + part] = c
    return tuple(out)


def _require_clean_base(base: LinearScheme) -> None:
    if base.model is not ModelKind.TWO_RR_ONE_S:
        raise ConfigurationError("rotation expects a two-requester/one-sender base")
    report = verify(base)
    if not report.passed:
        raise ConfigurationError("rotation rejects a base that does not verify cleanly")


def rotate_2rr1s(base: LinearScheme, *, _skip_base_check: bool = False) -> LinearScheme:
    """Traditional-model scheme at double subpacketization and 3/2 the rate.

    Every cache row is kept on both halves of each subfile.  For demand
    (d1, d2, d3): user 1 replays its base rule on part a, user 3 on part
    b, and user 2 serves user 1 on part a of file d1 and user 3 on part
    b of the rest.  Rows tagged for a single requester follow that
    requester's part, which keeps repeated requests decodable.  Mixed
    rows that cannot be recomposed from the sender's cache are kept as
    raw transmissions and flag the report instead of silently vanishing.
    """
    if not _skip_base_check:
        _require_clean_base(base)
    N, L, spec = base.N, base.L, base.field
    L2 = 2 * L
    amap, bmap = _part_maps(N, L)
    cols2 = N * L2

    placement = []
    for k in range(1, 4):
        P = base.placement_matrix(k)
        rows = []
        for r in P.rows:
            rows.append(FieldMatrix(spec, 1, N * L, (r,)).map_columns(amap, cols2).rows[0])
            rows.append(FieldMatrix(spec, 1, N * L, (r,)).map_columns(bmap, cols2).rows[0])
        placement.append(FieldMatrix(spec, len(rows), cols2, tuple(rows)))
    placement = tuple(placement)

    delivery = {}
    for d in enumerate_demands(ModelKind.TRADITIONAL_D2D, N, 3, 0):
        delivery[d] = {
            1: _rotated_signal(base, placement[0], d, sender=1, amap=amap, bmap=bmap),
            2: _rotated_signal(base, placement[1], d, sender=2, amap=amap, bmap=bmap),
            3: _rotated_signal(base, placement[2], d, sender=3, amap=amap, bmap=bmap),
        }
    return LinearScheme(ModelKind.TRADITIONAL_D2D, N, 3, 0, L2, spec, placement, delivery)


def _rotated_signal(base: LinearScheme, new_P: FieldMatrix, d: Demand, sender: int,
                    amap: list[int], bmap: list[int]) -> SenderSignal:
    d1, d2, d3 = d
    base_demand = {1: (0, d2, d3), 2: (d1, 0, d3), 3: (d1, d2, 0)}[sender]
    sig = base.delivery[base_demand][sender]
    base_P = base.placement_matrix(sender)
    spec = base.field
    cols2 = new_P.ncols

    coeff_rows: list[tuple[int, ...]] = []
    serves_out: list[Optional[tuple[int, ...]]] = []
    raw_rows: list[tuple[int, ...]] = []

    for i in range(sig.matrix.nrows):
        coeffs = sig.matrix.rows[i]
        tags = sig.serves[i] if sig.serves is not None else None
        if sender == 1:
            part = 0
        elif sender == 3:
            part = 1
        elif tags == (1,):
            part = 0
        elif tags == (3,):
            part = 1
        else:
            part = None
        if part is not None:
            coeff_rows.append(_interleaved_coeffs(coeffs, part))
            serves_out.append(tags)
            continue
        # user 2 splits by file: requested-by-user-1 entries ride part a
        symbol = FieldMatrix(spec, 1, base_P.nrows, (coeffs,)).matmul(base_P).rows[0]
        mixed = [0] * cols2
        for j, v in enumerate(symbol):
            if v:
                n = j // base.L + 1
                target = amap[j] if n == d1 else bmap[j]
                mixed[target] = spec.add(mixed[target], v)
        solved = solve_in_rowspace(mixed, new_P)
        if solved is None:
            raw_rows.append(tuple(mixed))
        else:
            coeff_rows.append(solved)
            serves_out.append(tags)

    matrix = (FieldMatrix.from_rows(spec, coeff_rows, ncols=new_P.nrows)
              if coeff_rows else FieldMatrix.empty(spec, new_P.nrows))
    raw = (FieldMatrix.from_rows(spec, raw_rows, ncols=cols2) if raw_rows else None)
    tags_tuple = tuple(serves_out) if any(t is not None for t in serves_out) else None
    return SenderSignal(matrix, tags_tuple, raw)


# ---------------------------------------------------------------------------
# Signal pruning for fake requesters
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PrunedSignal:
    demand: Demand
    real_requesters: tuple[int, ...]
    kept: tuple[tuple[int, int], ...]      # (sender, row index) in scan order
    dropped: tuple[tuple[int, int], ...]
    symbol_rows: tuple[tuple[int, ...], ...]  # kept rows, symbol space

    @property
    def row_count(self) -> int:
        return len(self.kept)

    def kept_rows_of(self, sender: int) -> tuple[int, ...]:
        return tuple(i for k, i in self.kept if k == sender)


def prune_signal(scheme: LinearScheme, demand: Demand,
                 real_requesters: Sequence[int]) -> PrunedSignal:
    """Greedily drop delivery rows that no real requester needs.

    Rows are scanned in construction order; a row is dropped when every
    real requester still decodes from the remaining rows.  The un-pruned
    signal must already decode all real requesters.
    """
    real = tuple(sorted(set(real_requesters)))
    reqs = requesters_of(demand)
    for r in real:
        if r not in reqs:
            raise ConfigurationError(f"user {r} does not request under demand {demand}")
    signals = scheme.transmitted_rows(demand)
    order: list[tuple[int, int]] = []
    rows: dict[tuple[int, int], tuple[int, ...]] = {}
    for k in sorted(signals):
        for i, row in enumerate(signals[k].rows):
            order.append((k, i))
            rows[(k, i)] = row

    spans = {}
    for r in real:
        span = RowSpan(scheme.field, scheme.symbol_count)
        span.add_matrix(scheme.placement_matrix(r))
        spans[r] = span

    def decodes(keys) -> bool:
        for r in real:
            span = spans[r].copy()
            for key in keys:
                span.add(rows[key])
            if not _file_decodable(span, scheme.N, scheme.L, demand[r - 1], scheme.field):
                return False
        return True

    kept = list(order)
    if not decodes(kept):
        raise ConfigurationError("un-pruned signal fails to serve a real requester")
    dropped = []
    for key in order:
        trial = [k for k in kept if k != key]
        if decodes(trial):
            kept = trial
            dropped.append(key)
    return PrunedSignal(
        demand=demand,
        real_requesters=real,
        kept=tuple(kept),
        dropped=tuple(dropped),
        symbol_rows=tuple(rows[k] for k in kept),
    )


# ---------------------------------------------------------------------------
# Request-random adaptation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FakeAssignment:
    """How a single-requester demand borrows the two-requester rule."""

    demand: Demand
    fake_demand: Demand
    fakes: Mapping[int, int]   # fake user -> copied file
    sender: int


@dataclass(frozen=True)
class RandomRequestProfile:
    """Per-request-count worst-case rates and their binomial average."""

    p: Probability
    rates: Mapping[int, Fraction]

    def __post_init__(self):
        if not 0 <= self.p <= 1:
            raise ConfigurationError("request probability must lie in [0, 1]")

    @property
    def average(self) -> Probability:
        return average_rate(self.p, self.rates)


def average_rate(p: Probability, rates: Mapping[int, Fraction]) -> Probability:
    """Binomial-weighted mean of the per-request-count worst-case rates."""
    if not 0 <= p <= 1:
        raise ConfigurationError("request probability must lie in [0, 1]")
    if any(x not in rates for x in range(4)):
        raise ConfigurationError("rates must cover request counts 0..3")
    exact = isinstance(p, Fraction) or isinstance(p, int)
    p = Fraction(p) if exact else float(p)
    total = Fraction(0) if exact else 0.0
    for x in range(4):
        weight = comb(3, x) * p ** x * (1 - p) ** (3 - x)
        total += weight * (rates[x] if exact else float(rates[x]))
    return total


@dataclass(frozen=True)
class RequestRandomAdaptation:
    base: LinearScheme
    scheme: LinearScheme
    per_r_worst: Mapping[int, Fraction]
    fake_assignments: Mapping[Demand, FakeAssignment]

    def profile(self, p: Probability) -> RandomRequestProfile:
        return RandomRequestProfile(p, dict(self.per_r_worst))


def adapt_request_random(base: LinearScheme) -> RequestRandomAdaptation:
    """Serve 0..3 random requesters with a two-requester base design.

    r=2 demands replay the base rule; r=3 demands use the rotated rule;
    an r=1 demand promotes the lowest-index idle user to designated
    sender, treats the other idle user as a fake requester for the real
    file, and prunes rows only the fake needed; r=0 sends nothing.
    """
    _require_clean_base(base)
    rotated = rotate_2rr1s(base, _skip_base_check=True)
    N, L, spec = base.N, base.L, base.field
    L2 = 2 * L
    placement = rotated.placement
    base_report = verify(base, check_decodability=False)

    delivery: dict[Demand, dict[int, SenderSignal]] = {}
    fake_assignments: dict[Demand, FakeAssignment] = {}
    worst = {0: Fraction(0), 1: Fraction(0), 2: Fraction(0), 3: Fraction(0)}

    for d in enumerate_demands(ModelKind.REQUEST_RANDOM, N, 3):
        zeros = tuple(k + 1 for k, v in enumerate(d) if v == 0)
        r = 3 - len(zeros)
        if r == 0:
            delivery[d] = {
                k: SenderSignal(FieldMatrix.empty(spec, placement[k - 1].nrows))
                for k in (1, 2, 3)
            }
        elif r == 1:
            real = requesters_of(d)[0]
            sender, fake = zeros[0], zeros[1]
            fd = list(d)
            fd[fake - 1] = d[real - 1]
            fd[sender - 1] = 0
            fake_demand = tuple(fd)
            pruned = prune_signal(base, fake_demand, (real,))
            kept = pruned.kept_rows_of(sender)
            sig = base.delivery[fake_demand][sender]
            coeff_rows = []
            for i in kept:
                coeff_rows.append(_interleaved_coeffs(sig.matrix.rows[i], 0))
                coeff_rows.append(_interleaved_coeffs(sig.matrix.rows[i], 1))
            mat = (FieldMatrix.from_rows(spec, coeff_rows, ncols=placement[sender - 1].nrows)
                   if coeff_rows else FieldMatrix.empty(spec, placement[sender - 1].nrows))
            delivery[d] = {
                sender: SenderSignal(mat),
                fake: SenderSignal(FieldMatrix.empty(spec, placement[fake - 1].nrows)),
            }
            fake_assignments[d] = FakeAssignment(d, fake_demand, {fake: d[real - 1]}, sender)
            worst[1] = max(worst[1], Fraction(pruned.row_count, L))
        elif r == 2:
            sender = zeros[0]
            sig = base.delivery[d][sender]
            coeff_rows = []
            serves = []
            for i in range(sig.matrix.nrows):
                for part in (0, 1):
                    coeff_rows.append(_interleaved_coeffs(sig.matrix.rows[i], part))
                    serves.append(sig.serves[i] if sig.serves is not None else None)
            mat = (FieldMatrix.from_rows(spec, coeff_rows, ncols=placement[sender - 1].nrows)
                   if coeff_rows else FieldMatrix.empty(spec, placement[sender - 1].nrows))
            tags = tuple(serves) if any(t is not None for t in serves) else None
            delivery[d] = {sender: SenderSignal(mat, tags)}
            worst[2] = max(worst[2], base_report.rate_of(d))
        else:
            delivery[d] = dict(rotated.delivery[d])
            rate = Fraction(sum(s.row_count for s in rotated.delivery[d].values()), L2)
            worst[3] = max(worst[3], rate)

    scheme = LinearScheme(ModelKind.REQUEST_RANDOM, N, 3, None, L2, spec, placement, delivery)
    return RequestRandomAdaptation(base, scheme, worst, fake_assignments)
