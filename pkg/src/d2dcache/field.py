"""Arithmetic and linear algebra over GF(2) and its binary extensions.

Elements of GF(2^m) are integers in [0, 2^m) interpreted as polynomials
over GF(2); multiplication reduces modulo a fixed irreducible polynomial
so that serialized matrices are portable across implementations.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field as dc_field
from typing import Iterable, Optional, Sequence

from .errors import ConfigurationError, FieldDomainError

# Moduli pinned for reproducibility; every other degree uses the
# lexicographically smallest irreducible polynomial.
_PREFERRED_MODULI = {8: 0x11B}

_EXHAUSTIVE_CHECK_LIMIT = 16


def poly_degree(p: int) -> int:
    return p.bit_length() - 1


def poly_mod(a: int, modulus: int) -> int:
    """Remainder of polynomial division over GF(2)."""
    dm = poly_degree(modulus)
    while poly_degree(a) >= dm:
        a ^= modulus << (poly_degree(a) - dm)
    return a


def poly_mul(a: int, b: int) -> int:
    """Carry-less polynomial product over GF(2)."""
    out = 0
    while b:
        if b & 1:
            out ^= a
        a <<= 1
        b >>= 1
    return out


def poly_mulmod(a: int, b: int, modulus: int) -> int:
    return poly_mod(poly_mul(a, b), modulus)


def is_irreducible(poly: int) -> bool:
    """Exhaustive trial division; intended for degrees up to 16."""
    deg = poly_degree(poly)
    if deg <= 0:
        return False
    if deg == 1:
        return True
    if not poly & 1:  # divisible by x
        return False
    for d in range(2, 2 ** (deg // 2 + 1)):
        if poly_degree(d) > deg // 2:
            break
        if poly_mod(poly, d) == 0:
            return False
    return True


@functools.lru_cache(maxsize=None)
def default_modulus(m: int) -> int:
    """Fixed irreducible polynomial of degree m (0x11B for m=8)."""
    if m in _PREFERRED_MODULI:
        return _PREFERRED_MODULI[m]
    for candidate in range(1 << m, 1 << (m + 1)):
        if is_irreducible(candidate):
            return candidate
    raise ConfigurationError(f"no irreducible polynomial of degree {m}")


@functools.lru_cache(maxsize=None)
def _tables(m: int, modulus: int) -> tuple[tuple[int, ...], tuple[int, ...], int]:
    """(exp, log, generator) tables for the multiplicative group."""
    order = (1 << m) - 1
    generator = None
    for g in range(2, 1 << m):
        x, seen = 1, 0
        for _ in range(order):
            x = poly_mulmod(x, g, modulus)
            seen += 1
            if x == 1:
                break
        if seen == order:
            generator = g
            break
    if generator is None:  # m == 1: trivial group
        generator = 1
    exp = [0] * (2 * order if order else 1)
    log = [0] * (1 << m)
    x = 1
    for i in range(order):
        exp[i] = x
        log[x] = i
        x = poly_mulmod(x, generator, modulus)
    for i in range(order, 2 * order):
        exp[i] = exp[i - order]
    return tuple(exp), tuple(log), generator


@dataclass(frozen=True)
class FieldSpec:
    """GF(2^m) with a pinned modulus; m=1 is plain GF(2)."""

    m: int = 1
    modulus: int = dc_field(default=0)

    def __post_init__(self):
        if self.m < 1:
            raise ConfigurationError("extension degree m must be >= 1")
        if self.modulus == 0:
            object.__setattr__(self, "modulus", default_modulus(self.m))
        if poly_degree(self.modulus) != self.m:
            raise ConfigurationError(
                f"modulus degree {poly_degree(self.modulus)} != m={self.m}"
            )
        if self.m <= _EXHAUSTIVE_CHECK_LIMIT and not is_irreducible(self.modulus):
            raise ConfigurationError(f"modulus {self.modulus:#x} is reducible")

    @property
    def size(self) -> int:
        return 1 << self.m

    def check_element(self, a: int) -> int:
        if not 0 <= a < self.size:
            raise FieldDomainError(f"{a} is not an element of GF(2^{self.m})")
        return a

    def add(self, a: int, b: int) -> int:
        return a ^ b

    sub = add

    def mul(self, a: int, b: int) -> int:
        if self.m == 1:
            return a & b
        if a == 0 or b == 0:
            return 0
        exp, log, _ = _tables(self.m, self.modulus)
        return exp[log[a] + log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise FieldDomainError("0 has no multiplicative inverse")
        if self.m == 1:
            return 1
        exp, log, _ = _tables(self.m, self.modulus)
        return exp[(self.size - 1) - log[a]]

    def pow(self, a: int, e: int) -> int:
        out = 1
        for _ in range(e):
            out = self.mul(out, a)
        return out

    def generator(self) -> int:
        return _tables(self.m, self.modulus)[2]


GF2 = FieldSpec(1)


@dataclass(frozen=True)
class FieldMatrix:
    """Immutable row-major matrix over a FieldSpec."""

    spec: FieldSpec
    nrows: int
    ncols: int
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.rows) != self.nrows:
            raise ConfigurationError("row count mismatch")
        limit = self.spec.size
        for r in self.rows:
            if len(r) != self.ncols:
                raise ConfigurationError("column count mismatch")
            for v in r:
                if not 0 <= v < limit:
                    raise ConfigurationError(f"entry {v} outside GF(2^{self.spec.m})")

    @classmethod
    def from_rows(cls, spec: FieldSpec, rows: Iterable[Sequence[int]], ncols: Optional[int] = None) -> "FieldMatrix":
        tup = tuple(tuple(int(v) for v in r) for r in rows)
        if ncols is None:
            if not tup:
                raise ConfigurationError("cannot infer column count of an empty matrix")
            ncols = len(tup[0])
        return cls(spec, len(tup), ncols, tup)

    @classmethod
    def empty(cls, spec: FieldSpec, ncols: int) -> "FieldMatrix":
        return cls(spec, 0, ncols, ())

    @classmethod
    def identity(cls, spec: FieldSpec, n: int) -> "FieldMatrix":
        return cls(spec, n, n, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    def row(self, i: int) -> tuple[int, ...]:
        return self.rows[i]

    def stack(self, other: "FieldMatrix") -> "FieldMatrix":
        if other.ncols != self.ncols or other.spec != self.spec:
            raise ConfigurationError("cannot stack matrices of mismatched shape/field")
        return FieldMatrix(self.spec, self.nrows + other.nrows, self.ncols, self.rows + other.rows)

    def matmul(self, other: "FieldMatrix") -> "FieldMatrix":
        if self.ncols != other.nrows or self.spec != other.spec:
            raise ConfigurationError("dimension mismatch in matrix product")
        spec = self.spec
        if spec.m == 1:
            packed = [_pack(r) for r in other.rows]
            out = []
            for row in self.rows:
                acc = 0
                for c, v in enumerate(row):
                    if v:
                        acc ^= packed[c]
                out.append(_unpack(acc, other.ncols))
            return FieldMatrix(spec, self.nrows, other.ncols, tuple(out))
        out = []
        for row in self.rows:
            acc = [0] * other.ncols
            for c, v in enumerate(row):
                if v:
                    orow = other.rows[c]
                    for j, w in enumerate(orow):
                        if w:
                            acc[j] ^= spec.mul(v, w)
            out.append(tuple(acc))
        return FieldMatrix(spec, self.nrows, other.ncols, tuple(out))

    def transpose(self) -> "FieldMatrix":
        return FieldMatrix(
            self.spec, self.ncols, self.nrows,
            tuple(tuple(self.rows[i][j] for i in range(self.nrows)) for j in range(self.ncols)),
        )

    def map_columns(self, col_map: Sequence[int], new_ncols: int) -> "FieldMatrix":
        """Scatter each column j to position col_map[j] in a wider matrix."""
        out = []
        for row in self.rows:
            nr = [0] * new_ncols
            for j, v in enumerate(row):
                if v:
                    nr[col_map[j]] = self.spec.add(nr[col_map[j]], v)
            out.append(tuple(nr))
        return FieldMatrix(self.spec, self.nrows, new_ncols, tuple(out))

    def row_set(self) -> frozenset:
        return frozenset(self.rows)


def _pack(row: Sequence[int]) -> int:
    mask = 0
    for i, v in enumerate(row):
        if v:
            mask |= 1 << i
    return mask


def _unpack(mask: int, ncols: int) -> tuple[int, ...]:
    return tuple((mask >> i) & 1 for i in range(ncols))


class RowSpan:
    """Incremental row-space tracker (echelon pivots) over a field.

    GF(2) rows are kept as packed integers so reduce/insert are a few
    big-int XORs; larger fields fall back to tuple rows.
    """

    def __init__(self, spec: FieldSpec, ncols: int):
        self.spec = spec
        self.ncols = ncols
        self.pivots: dict[int, object] = {}  # leading column -> normalized row

    def copy(self) -> "RowSpan":
        dup = RowSpan.__new__(RowSpan)
        dup.spec = self.spec
        dup.ncols = self.ncols
        dup.pivots = dict(self.pivots)
        return dup

    @property
    def rank(self) -> int:
        return len(self.pivots)

    # -- GF(2) packed path -------------------------------------------------

    def _reduce_packed(self, mask: int) -> int:
        pivots = self.pivots
        while mask:
            lead = (mask & -mask).bit_length() - 1
            piv = pivots.get(lead)
            if piv is None:
                return mask
            mask ^= piv
        return 0

    # -- generic path --------------------------------------------------------

    def _reduce_tuple(self, row: list[int]) -> list[int]:
        spec = self.spec
        for c in range(self.ncols):
            v = row[c]
            if not v:
                continue
            piv = self.pivots.get(c)
            if piv is None:
                return row
            for j in range(c, self.ncols):
                if piv[j]:
                    row[j] = spec.add(row[j], spec.mul(v, piv[j]))
        return row

    def add(self, row) -> bool:
        """Insert a row; returns True when it enlarged the span."""
        if self.spec.m == 1:
            mask = row if isinstance(row, int) else _pack(row)
            residual = self._reduce_packed(mask)
            if residual == 0:
                return False
            lead = (residual & -residual).bit_length() - 1
            self.pivots[lead] = residual
            return True
        work = list(row)
        residual = self._reduce_tuple(work)
        for c in range(self.ncols):
            if residual[c]:
                inv = self.spec.inv(residual[c])
                self.pivots[c] = tuple(self.spec.mul(inv, v) for v in residual)
                return True
        return False

    def contains(self, row) -> bool:
        if self.spec.m == 1:
            mask = row if isinstance(row, int) else _pack(row)
            return self._reduce_packed(mask) == 0
        return not any(self._reduce_tuple(list(row)))

    def add_matrix(self, matrix: FieldMatrix) -> None:
        for r in matrix.rows:
            self.add(r)


def mat_rank(matrix: FieldMatrix) -> int:
    """Rank by Gaussian elimination over the matrix's field."""
    span = RowSpan(matrix.spec, matrix.ncols)
    span.add_matrix(matrix)
    return span.rank


NOT_REPRESENTABLE = None


def solve_in_rowspace(target: Sequence[int], basis: FieldMatrix) -> Optional[tuple[int, ...]]:
    """Coefficients c with c @ basis == target, or None when outside the span.

    The system basis^T c = target^T is brought to reduced echelon form;
    free variables are fixed at zero, making the answer deterministic.
    """
    spec = basis.spec
    n = basis.nrows
    if len(target) != basis.ncols:
        raise ConfigurationError("target length must match basis column count")
    # Augmented rows: one per symbol column, unknowns are basis-row weights.
    aug = [[basis.rows[j][c] for j in range(n)] + [spec.check_element(int(target[c]))]
           for c in range(basis.ncols)]
    pivot_of_unknown: dict[int, int] = {}
    pivot_row = 0
    for col in range(n):
        sel = None
        for r in range(pivot_row, len(aug)):
            if aug[r][col]:
                sel = r
                break
        if sel is None:
            continue
        aug[pivot_row], aug[sel] = aug[sel], aug[pivot_row]
        inv = spec.inv(aug[pivot_row][col])
        if inv != 1:
            aug[pivot_row] = [spec.mul(inv, v) for v in aug[pivot_row]]
        prow = aug[pivot_row]
        for r in range(len(aug)):
            if r != pivot_row and aug[r][col]:
                f = aug[r][col]
                aug[r] = [spec.add(v, spec.mul(f, p)) for v, p in zip(aug[r], prow)]
        pivot_of_unknown[col] = pivot_row
        pivot_row += 1
    for r in range(pivot_row, len(aug)):
        if aug[r][n]:
            return NOT_REPRESENTABLE
    coeffs = [0] * n
    for col, r in pivot_of_unknown.items():
        coeffs[col] = aug[r][n]
    return tuple(coeffs)


def min_extension_degree(n_out: int) -> int:
    """Smallest m whose extended evaluation-point set covers n_out rows."""
    m = 1
    while (1 << m) + 1 < n_out:
        m += 1
    return m


def mds_generator(n_out: int, k_in: int, spec: FieldSpec) -> FieldMatrix:
    """Deterministic (n_out, k_in) MDS generator matrix.

    Rows evaluate (1, x, ..., x^(k_in-1)) at the points 0, 1, g, g^2, ...
    (g the field generator), plus a final point-at-infinity row
    (0, ..., 0, 1) when one extra row is needed.  Every k_in x k_in
    submatrix is invertible.
    """
    if k_in < 1 or n_out < k_in:
        raise ConfigurationError(f"need 1 <= k_in <= n_out, got ({n_out}, {k_in})")
    capacity = spec.size + 1
    if n_out > capacity:
        raise ConfigurationError(
            f"GF(2^{spec.m}) supports at most {capacity} MDS rows; "
            f"n_out={n_out} needs m >= {min_extension_degree(n_out)}"
        )
    points = [0]
    x = 1
    g = spec.generator()
    while len(points) < min(n_out, spec.size):
        points.append(x)
        x = spec.mul(x, g)
    rows = [tuple(spec.pow(p, e) for e in range(k_in)) for p in points]
    if n_out == capacity:
        rows.append(tuple(0 if e < k_in - 1 else 1 for e in range(k_in)))
    return FieldMatrix(spec, n_out, k_in, tuple(rows))
