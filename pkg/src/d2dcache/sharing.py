"""Space-sharing composition: memory sharing and full symmetrization.

Both transformations lay copies of base schemes on disjoint subfile-slot
blocks of every file.  Memory sharing materializes the composite scheme;
symmetrization over all joint user/file permutations returns a lazily
materialized scheme whose rate accounting is computed exactly from orbit
sums, since the explicit matrices grow with N!.K!.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Sequence

from .errors import ConfigurationError, ResourceBudgetError
from .field import FieldMatrix
from .model import (
    Demand,
    LinearScheme,
    SenderSignal,
    apply_demand_perm,
    enumerate_demands,
    permute_scheme,
    senders_of,
    symbol_col,
)

DEFAULT_SYMMETRIZE_BUDGET = 10 ** 6


def _block_col_map(N: int, L_part: int, L_total: int, offset: int) -> list[int]:
    """Map part-local symbol (n, l) onto slot offset+l of the composite."""
    out = [0] * (N * L_part)
    for n in range(1, N + 1):
        for l in range(1, L_part + 1):
            out[symbol_col(N, L_part, n, l)] = symbol_col(N, L_total, n, offset + l)
    return out


def concatenate_blocks(parts: Sequence[tuple[LinearScheme, int]]) -> LinearScheme:
    """Run each scheme on its own block of subfile slots, `count` times over."""
    instances: list[LinearScheme] = []
    for scheme, count in parts:
        if count < 0:
            raise ConfigurationError("block count must be nonnegative")
        instances.extend([scheme] * count)
    if not instances:
        raise ConfigurationError("nothing to concatenate")
    first = instances[0]
    for sch in instances[1:]:
        if (sch.model, sch.N, sch.K, sch.s, sch.field) != (
            first.model, first.N, first.K, first.s, first.field,
        ):
            raise ConfigurationError("block schemes must share model, N, K, s and field")
    N, K = first.N, first.K
    L_total = sum(sch.L for sch in instances)
    offsets = []
    acc = 0
    for sch in instances:
        offsets.append(acc)
        acc += sch.L

    col_maps = [_block_col_map(N, sch.L, L_total, off) for sch, off in zip(instances, offsets)]

    placement = []
    for k in range(1, K + 1):
        stacked = FieldMatrix.empty(first.field, N * L_total)
        for sch, cmap in zip(instances, col_maps):
            stacked = stacked.stack(sch.placement_matrix(k).map_columns(cmap, N * L_total))
        placement.append(stacked)

    demands = enumerate_demands(first.model, N, K, first.s)
    delivery: dict[Demand, dict[int, SenderSignal]] = {}
    for d in demands:
        per_sender: dict[int, SenderSignal] = {}
        for k in senders_of(first.model, d):
            blocks = [sch.delivery[d][k] for sch in instances]
            widths = [sch.placement_rows(k) for sch in instances]
            total_w = sum(widths)
            rows: list[tuple[int, ...]] = []
            serves: list = []
            raw = FieldMatrix.empty(first.field, N * L_total)
            any_serves = False
            col_off = 0
            for sig, w, cmap in zip(blocks, widths, col_maps):
                for i, row in enumerate(sig.matrix.rows):
                    padded = (0,) * col_off + row + (0,) * (total_w - col_off - w)
                    rows.append(padded)
                    if sig.serves is not None:
                        serves.append(sig.serves[i])
                        any_serves = True
                    else:
                        serves.append(None)
                if sig.raw_rows is not None:
                    raw = raw.stack(sig.raw_rows.map_columns(cmap, N * L_total))
                col_off += w
            per_sender[k] = SenderSignal(
                FieldMatrix(first.field, len(rows), total_w, tuple(rows)),
                tuple(serves) if any_serves else None,
                raw if raw.nrows else None,
            )
        delivery[d] = per_sender

    return LinearScheme(first.model, N, K, first.s, L_total, first.field,
                        tuple(placement), delivery)


def memory_share(a: LinearScheme, b: LinearScheme, alpha: Fraction) -> LinearScheme:
    """Run scheme a on the first alpha of every file and b on the rest.

    With alpha = p/q in lowest terms the composite splits each file into
    q*L_a*L_b slots; memory and every per-demand rate interpolate exactly.
    """
    alpha = Fraction(alpha)
    if not 0 <= alpha <= 1:
        raise ConfigurationError("alpha must lie in [0, 1]")
    if (a.model, a.N, a.K, a.s, a.field) != (b.model, b.N, b.K, b.s, b.field):
        raise ConfigurationError("memory sharing requires matching model, N, K, s and field")
    p, q = alpha.numerator, alpha.denominator
    parts = []
    if p:
        parts.append((a, p * b.L))
    if q - p:
        parts.append((b, (q - p) * a.L))
    return concatenate_blocks(parts)


def _invert(perm: tuple[int, ...]) -> tuple[int, ...]:
    inv = [0] * len(perm)
    for i, v in enumerate(perm, start=1):
        inv[v - 1] = i
    return tuple(inv)


def _canonical_file_pattern(d: Demand) -> Demand:
    """Renumber files by first appearance; zeros are preserved."""
    relabel: dict[int, int] = {}
    out = []
    for v in d:
        if v == 0:
            out.append(0)
        else:
            if v not in relabel:
                relabel[v] = len(relabel) + 1
            out.append(relabel[v])
    return tuple(out)


class SymmetrizedScheme:
    """Space-sharing of every jointly permuted copy of a base scheme.

    Presents the same accessor surface as LinearScheme.  Row counts and
    memory come from exact orbit sums over the full permutation group;
    matrices materialize on demand (practical only at small N).
    """

    def __init__(self, base: LinearScheme, budget: int = DEFAULT_SYMMETRIZE_BUDGET):
        group_order = math.factorial(base.N) * math.factorial(base.K)
        L_total = group_order * base.L
        if L_total > budget:
            raise ResourceBudgetError(
                f"symmetrization needs {L_total} subfile slots per file, over the budget of {budget}"
            )
        self.base = base
        self.model = base.model
        self.N = base.N
        self.K = base.K
        self.s = base.s
        self.L = L_total
        self.field = base.field
        self.group = [
            (up, fp)
            for up in itertools.permutations(range(1, base.K + 1))
            for fp in itertools.permutations(range(1, base.N + 1))
        ]
        self._demands = enumerate_demands(base.model, base.N, base.K, base.s)
        self._base_sender_rows = {
            d: {k: sig.row_count for k, sig in base.delivery[d].items()}
            for d in base.delivery
        }
        self._user_perms = list(itertools.permutations(range(1, base.K + 1)))
        self._orbit_cache: dict[tuple[Demand, int], int] = {}
        self._base_signal_cache: dict[Demand, dict[int, FieldMatrix]] = {}

    # -- accounting ---------------------------------------------------------

    @property
    def symbol_count(self) -> int:
        return self.N * self.L

    @property
    def encoding_clean(self) -> bool:
        return self.base.encoding_clean

    def delivery_demands(self):
        return self._demands

    def placement_rows(self, k: int) -> int:
        total = sum(self.base.placement_rows(j) for j in range(1, self.K + 1))
        return math.factorial(self.N) * math.factorial(self.K - 1) * total

    def _relabel_sum(self, pattern: Demand, sender: int) -> int:
        """Sum of base sender-row counts over all file relabelings of pattern."""
        key = (pattern, sender)
        cached = self._orbit_cache.get(key)
        if cached is not None:
            return cached
        distinct = []
        for v in pattern:
            if v != 0 and v not in distinct:
                distinct.append(v)
        r = len(distinct)
        mult = math.factorial(self.N - r)
        total = 0
        for image in itertools.permutations(range(1, self.N + 1), r):
            relabel = dict(zip(distinct, image))
            mapped = tuple(0 if v == 0 else relabel[v] for v in pattern)
            total += self._base_sender_rows[mapped][sender]
        total *= mult
        self._orbit_cache[key] = total
        return total

    def delivery_row_counts(self, d: Demand) -> dict[int, int]:
        identity_fp = tuple(range(1, self.N + 1))
        counts = {k: 0 for k in senders_of(self.model, d)}
        for v in self._user_perms:
            moved = apply_demand_perm(d, v, identity_fp)
            pattern = _canonical_file_pattern(moved)
            for j in counts:
                counts[j] += self._relabel_sum(pattern, v[j - 1])
        return counts

    # -- materialization ------------------------------------------------------

    def _base_signals(self, d: Demand) -> dict[int, FieldMatrix]:
        sig = self._base_signal_cache.get(d)
        if sig is None:
            sig = self.base.transmitted_rows(d)
            self._base_signal_cache[d] = sig
        return sig

    def placement_matrix(self, k: int) -> FieldMatrix:
        N, base_L, total = self.N, self.base.L, self.N * self.L
        stacked = FieldMatrix.empty(self.field, total)
        for idx, (up, fp) in enumerate(self.group):
            inv_up = _invert(up)
            cmap = self._copy_col_map(fp, idx * base_L)
            stacked = stacked.stack(
                self.base.placement_matrix(inv_up[k - 1]).map_columns(cmap, total)
            )
        return stacked

    def _copy_col_map(self, fp: tuple[int, ...], offset: int) -> list[int]:
        N, base_L = self.N, self.base.L
        out = [0] * (N * base_L)
        for n in range(1, N + 1):
            for l in range(1, base_L + 1):
                out[symbol_col(N, base_L, n, l)] = symbol_col(N, self.L, fp[n - 1], offset + l)
        return out

    def transmitted_rows(self, d: Demand) -> dict[int, FieldMatrix]:
        total = self.N * self.L
        out = {k: FieldMatrix.empty(self.field, total) for k in senders_of(self.model, d)}
        for idx, (up, fp) in enumerate(self.group):
            inv_up, inv_fp = _invert(up), _invert(fp)
            db = apply_demand_perm(d, inv_up, inv_fp)
            signals = self._base_signals(db)
            cmap = self._copy_col_map(fp, idx * self.base.L)
            for j in out:
                out[j] = out[j].stack(signals[inv_up[j - 1]].map_columns(cmap, total))
        return out

    def to_explicit(self) -> LinearScheme:
        """Materialize the block-diagonal composite (small N only)."""
        copies = [(permute_scheme(self.base, up, fp), 1) for up, fp in self.group]
        return concatenate_blocks(copies)


def symmetrize(scheme: LinearScheme, budget: int = DEFAULT_SYMMETRIZE_BUDGET) -> SymmetrizedScheme:
    """All-permutation space sharing; never increases the worst-case rate."""
    return SymmetrizedScheme(scheme, budget=budget)
