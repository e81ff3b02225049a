"""Exact integer linear algebra: Smith normal form, kernels, cokernels.

Everything here works on plain Python ints, so there is no overflow and no
magnitude limit.  Matrices may have zero rows or zero columns.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence


class DimensionError(ValueError):
    pass


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise DimensionError("negative dimension")
        if len(self.entries) != self.rows * self.cols:
            raise DimensionError(
                f"{len(self.entries)} entries for a {self.rows}x{self.cols} matrix")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: int | None = None) -> IntMatrix:
        rows = [list(r) for r in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for r in rows:
            if len(r) != cols:
                raise DimensionError("ragged rows")
        return cls(len(rows), cols, tuple(int(x) for r in rows for x in r))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> IntMatrix:
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def identity(cls, n: int) -> IntMatrix:
        return cls(n, n, tuple(int(i == j) for i in range(n) for j in range(n)))

    @classmethod
    def diag(cls, values: Sequence[int], rows: int | None = None,
             cols: int | None = None) -> IntMatrix:
        rows = len(values) if rows is None else rows
        cols = len(values) if cols is None else cols
        data = [[0] * cols for _ in range(rows)]
        for i, v in enumerate(values):
            data[i][i] = v
        return cls.from_rows(data, cols)

    @classmethod
    def column(cls, values: Sequence[int]) -> IntMatrix:
        return cls(len(values), 1, tuple(int(v) for v in values))

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        if not (0 <= i < self.rows and 0 <= j < self.cols):
            raise IndexError(ij)
        return self.entries[i * self.cols + j]

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def to_rows(self) -> list[list[int]]:
        c = self.cols
        return [list(self.entries[i * c:(i + 1) * c]) for i in range(self.rows)]

    def row(self, i: int) -> list[int]:
        return list(self.entries[i * self.cols:(i + 1) * self.cols])

    def col(self, j: int) -> list[int]:
        return [self.entries[i * self.cols + j] for i in range(self.rows)]

    def transpose(self) -> IntMatrix:
        return IntMatrix.from_rows([self.col(j) for j in range(self.cols)], self.rows)

    def __matmul__(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.rows:
            raise DimensionError(f"cannot multiply {self.shape} by {other.shape}")
        a = self.to_rows()
        bt = [other.col(j) for j in range(other.cols)]
        return IntMatrix.from_rows(
            [[sum(x * y for x, y in zip(r, c)) for c in bt] for r in a], other.cols)

    def apply(self, x: Sequence[int]) -> list[int]:
        if len(x) != self.cols:
            raise DimensionError(f"vector of length {len(x)} for {self.shape} matrix")
        return [sum(a * b for a, b in zip(self.row(i), x)) for i in range(self.rows)]

    def __add__(self, other: IntMatrix) -> IntMatrix:
        if self.shape != other.shape:
            raise DimensionError("shape mismatch")
        return IntMatrix(self.rows, self.cols,
                         tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __sub__(self, other: IntMatrix) -> IntMatrix:
        if self.shape != other.shape:
            raise DimensionError("shape mismatch")
        return IntMatrix(self.rows, self.cols,
                         tuple(a - b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> IntMatrix:
        return IntMatrix(self.rows, self.cols, tuple(-a for a in self.entries))

    def submatrix(self, rows: Iterable[int], cols: Iterable[int]) -> IntMatrix:
        rows, cols = list(rows), list(cols)
        return IntMatrix.from_rows([[self[i, j] for j in cols] for i in rows], len(cols))

    def hstack(self, other: IntMatrix) -> IntMatrix:
        if self.rows != other.rows:
            raise DimensionError("row count mismatch")
        return IntMatrix.from_rows(
            [self.row(i) + other.row(i) for i in range(self.rows)], self.cols + other.cols)

    def vstack(self, other: IntMatrix) -> IntMatrix:
        if self.cols != other.cols:
            raise DimensionError("column count mismatch")
        return IntMatrix(self.rows + other.rows, self.cols, self.entries + other.entries)

    def is_zero(self) -> bool:
        return not any(self.entries)

    def det(self) -> int:
        """Determinant by fraction-free (Bareiss) elimination."""
        if self.rows != self.cols:
            raise DimensionError("determinant of a non-square matrix")
        n = self.rows
        if n == 0:
            return 1
        a = self.to_rows()
        sign, prev = 1, 1
        for k in range(n - 1):
            if a[k][k] == 0:
                for i in range(k + 1, n):
                    if a[i][k] != 0:
                        a[k], a[i] = a[i], a[k]
                        sign = -sign
                        break
                else:
                    return 0
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            prev = a[k][k]
        return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class SmithDecomposition:
    u: IntMatrix
    d: IntMatrix
    v: IntMatrix

    @property
    def diagonal(self) -> list[int]:
        return [self.d[i, i] for i in range(min(self.d.rows, self.d.cols))]

    @property
    def rank(self) -> int:
        return sum(1 for x in self.diagonal if x != 0)


def _min_abs_pivot(m, t, rows, cols, only_line=False):
    best = None
    if only_line:
        cells = [(i, t) for i in range(t, rows)] + [(t, j) for j in range(t + 1, cols)]
    else:
        cells = ((i, j) for i in range(t, rows) for j in range(t, cols))
    for i, j in cells:
        x = m[i][j]
        if x and (best is None or abs(x) < best[0]):
            best = (abs(x), i, j)
    return best


def smith_normal_form(a: IntMatrix, order: str = "rows") -> SmithDecomposition:
    """Return unimodular ``u``, ``v`` and diagonal ``d`` with ``u @ a @ v == d``.

    The pivot at each stage is a nonzero entry of least absolute value.
    ``order`` selects whether a pivot's column is cleared before its row
    ("rows") or the other way round ("cols"); the resulting ``d`` is the
    same, the witnesses generally differ.  Diagonal entries are made
    nonnegative by negating columns of ``v``, never rows of ``u``.
    """
    if order not in ("rows", "cols"):
        raise ValueError(f"unknown elimination order {order!r}")
    rows, cols = a.rows, a.cols
    m = a.to_rows()
    u = IntMatrix.identity(rows).to_rows()
    v = IntMatrix.identity(cols).to_rows()

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in m:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, q):
        # row[dst] += q * row[src]
        m[dst] = [x + q * y for x, y in zip(m[dst], m[src])]
        u[dst] = [x + q * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, q):
        for r in m:
            r[dst] += q * r[src]
        for r in v:
            r[dst] += q * r[src]

    def clear_col(t):
        done = True
        for i in range(t + 1, rows):
            if m[i][t]:
                add_row(i, t, -(m[i][t] // m[t][t]))
                if m[i][t]:
                    done = False
        return done

    def clear_row(t):
        done = True
        for j in range(t + 1, cols):
            if m[t][j]:
                add_col(j, t, -(m[t][j] // m[t][t]))
                if m[t][j]:
                    done = False
        return done

    first, second = (clear_col, clear_row) if order == "rows" else (clear_row, clear_col)

    t = 0
    while t < min(rows, cols):
        piv = _min_abs_pivot(m, t, rows, cols)
        if piv is None:
            break
        _, i, j = piv
        if i != t:
            swap_rows(i, t)
        if j != t:
            swap_cols(j, t)
        while True:
            ok1 = first(t)
            ok2 = second(t)
            if ok1 and ok2 and not any(m[i][t] for i in range(t + 1, rows)) \
                    and not any(m[t][j] for j in range(t + 1, cols)):
                # pivot line is clean; enforce divisibility of the remainder
                p = m[t][t]
                bad = next(((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols)
                            if m[i][j] % p), None)
                if bad is None:
                    break
                add_row(t, bad[0], 1)
                continue
            piv = _min_abs_pivot(m, t, rows, cols, only_line=True)
            _, i, j = piv
            if i != t:
                swap_rows(i, t)
            if j != t:
                swap_cols(j, t)
        if m[t][t] < 0:
            for r in m:
                r[t] = -r[t]
            for r in v:
                r[t] = -r[t]
        t += 1

    return SmithDecomposition(IntMatrix.from_rows(u, rows), IntMatrix.from_rows(m, cols),
                              IntMatrix.from_rows(v, cols))


_GROUP_TERM = re.compile(r"^Z(?:\^(\d+)|/(-?\d+))?$")


@dataclass(frozen=True)
class AbelianGroup:
    """Z^free_rank + Z/d1 + ... with d1 | d2 | ... and every d >= 2."""

    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(d) for d in self.torsion))
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        for d in self.torsion:
            if d < 2:
                raise ValueError(f"torsion factor {d} is not >= 2")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError(f"torsion factors {self.torsion} break the divisibility chain")

    @classmethod
    def from_cyclic(cls, orders: Iterable[int]) -> AbelianGroup:
        """Canonical form of a direct sum of cyclic groups; order 0 means Z."""
        orders = [abs(int(o)) for o in orders]
        return cokernel_group(IntMatrix.diag(orders))

    @classmethod
    def parse(cls, text: str) -> AbelianGroup:
        return cls.from_cyclic(parse_cyclic_orders(text))

    @property
    def ngens(self) -> int:
        return self.free_rank + len(self.torsion)

    @property
    def order(self) -> int | None:
        """Cardinality, or None when the group is infinite."""
        if self.free_rank:
            return None
        out = 1
        for d in self.torsion:
            out *= d
        return out

    def is_trivial(self) -> bool:
        return self.ngens == 0

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"

    def element(self, free_coords: Sequence[int] = (), torsion_coords: Sequence[int] = ()) -> GroupElement:
        return GroupElement(self, tuple(free_coords),
                            tuple(c % d for c, d in zip(torsion_coords, self.torsion)))

    def element_from_vector(self, coords: Sequence[int]) -> GroupElement:
        coords = list(coords)
        if len(coords) != self.ngens:
            raise DimensionError(f"{len(coords)} coordinates for group {self}")
        return self.element(coords[:self.free_rank], coords[self.free_rank:])

    def zero(self) -> GroupElement:
        return self.element((0,) * self.free_rank, (0,) * len(self.torsion))

    def relation_matrix(self) -> IntMatrix:
        """Square diagonal matrix whose cokernel is this group (zeros for Z)."""
        return IntMatrix.diag([0] * self.free_rank + list(self.torsion))


def parse_cyclic_orders(text: str) -> list[int]:
    """Parse "Z^2+Z/4+Z/2" into cyclic orders [0, 0, 4, 2] (0 stands for Z).

    The summands are kept in the order written; "0" is the trivial group.
    """
    text = text.replace(" ", "").replace("⊕", "+")
    if text in ("", "0"):
        return []
    orders = []
    for term in text.split("+"):
        if term == "0":
            continue
        hit = _GROUP_TERM.match(term)
        if not hit:
            raise ValueError(f"cannot parse group term {term!r}")
        power, mod = hit.groups()
        if mod is not None:
            d = abs(int(mod))
            if d != 1:
                orders.append(d)
        else:
            orders.extend([0] * (int(power) if power else 1))
    return orders


@dataclass(frozen=True)
class GroupElement:
    group: AbelianGroup
    free_coords: tuple[int, ...]
    torsion_coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.free_coords) != self.group.free_rank:
            raise DimensionError("free coordinate count does not match the group")
        if len(self.torsion_coords) != len(self.group.torsion):
            raise DimensionError("torsion coordinate count does not match the group")
        for c, d in zip(self.torsion_coords, self.group.torsion):
            if not 0 <= c < d:
                raise ValueError(f"torsion coordinate {c} not reduced mod {d}")

    @property
    def vector(self) -> list[int]:
        return list(self.free_coords) + list(self.torsion_coords)

    def is_zero(self) -> bool:
        return not any(self.free_coords) and not any(self.torsion_coords)

    def __add__(self, other: GroupElement) -> GroupElement:
        if other.group != self.group:
            raise ValueError("elements of different groups")
        return self.group.element(
            [a + b for a, b in zip(self.free_coords, other.free_coords)],
            [a + b for a, b in zip(self.torsion_coords, other.torsion_coords)])

    def __neg__(self) -> GroupElement:
        return self.group.element([-a for a in self.free_coords],
                                  [-a for a in self.torsion_coords])

    def __mul__(self, k: int) -> GroupElement:
        return self.group.element([k * a for a in self.free_coords],
                                  [k * a for a in self.torsion_coords])

    __rmul__ = __mul__


def _group_of(snf: SmithDecomposition, rows: int) -> AbelianGroup:
    diag = snf.diagonal
    r = snf.rank
    return AbelianGroup(rows - r, tuple(d for d in diag[:r] if d != 1))


def cokernel_group(a: IntMatrix, order: str = "rows") -> AbelianGroup:
    """Z^rows / image(a) in invariant-factor form."""
    return _group_of(smith_normal_form(a, order), a.rows)


def kernel_basis(a: IntMatrix, order: str = "rows") -> IntMatrix:
    """Matrix whose columns form a Z-basis of {x : a x = 0} (possibly no columns)."""
    snf = smith_normal_form(a, order)
    r = snf.rank
    return snf.v.submatrix(range(a.cols), range(r, a.cols))


def _coordinates(snf: SmithDecomposition, rows: int, x: Sequence[int]) -> tuple[list[int], list[int]]:
    y = snf.u.apply(x)
    diag = snf.diagonal
    r = snf.rank
    torsion = [y[i] % diag[i] for i in range(r) if diag[i] != 1]
    free = y[r:rows]
    return free, torsion


def coset_class(a: IntMatrix, x: Sequence[int]) -> GroupElement:
    """Class of ``x`` in coker(a), in the coordinates fixed by the Smith form of ``a``."""
    if len(x) != a.rows:
        raise DimensionError(f"vector of length {len(x)} for a matrix with {a.rows} rows")
    snf = smith_normal_form(a)
    free, torsion = _coordinates(snf, a.rows, x)
    return GroupElement(_group_of(snf, a.rows), tuple(free), tuple(torsion))


def cokernel_projection(a: IntMatrix) -> tuple[AbelianGroup, IntMatrix]:
    """The group coker(a) and the integer matrix of Z^rows -> coker(a) coordinates.

    Rows of the returned matrix are ordered as a GroupElement vector (free
    coordinates first); torsion rows still need reducing mod their factor.
    """
    snf = smith_normal_form(a)
    r = snf.rank
    diag = snf.diagonal
    keep = list(range(r, a.rows)) + [i for i in range(r) if diag[i] != 1]
    proj = snf.u.submatrix(keep, range(a.rows))
    return _group_of(snf, a.rows), proj


def solve_in_image(a: IntMatrix, x: Sequence[int]) -> list[int] | None:
    """Some integer ``y`` with ``a y == x``, or None if ``x`` is not in the image."""
    if len(x) != a.rows:
        raise DimensionError(f"vector of length {len(x)} for a matrix with {a.rows} rows")
    snf = smith_normal_form(a)
    y = snf.u.apply(x)
    diag = snf.diagonal
    r = snf.rank
    z = [0] * a.cols
    for i in range(r):
        if y[i] % diag[i]:
            return None
        z[i] = y[i] // diag[i]
    if any(y[r:]):
        return None
    sol = snf.v.apply(z)
    if a.apply(sol) != list(x):
        raise ArithmeticError("Smith witness failed to reproduce the right-hand side")
    return sol
