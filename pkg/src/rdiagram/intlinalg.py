"""Exact linear algebra over the integers: matrices, normal forms, lattices.

This module is the computational substrate for the whole package.  All
arithmetic uses Python's arbitrary-precision integers; there is no floating
point anywhere and no dependency outside the standard library.

Conventions the rest of the package relies on:

* ``IntMatrix`` is immutable and dense, with explicit ``rows``/``cols`` so
  that degenerate shapes (``0 x n``, ``n x 0``) survive round trips.
* ``hnf`` computes a *column* Hermite normal form ``H = M @ U`` with ``U``
  unimodular.  Pivots are positive, pivot rows increase strictly from left
  to right, entries to the left of a pivot (in the pivot's own row) are
  reduced into ``[0, pivot)``, and zero columns are pushed to the right.
  This form is unique per column span, which is what makes ``Lattice``
  values directly comparable with ``==``.
* ``snf`` computes ``(U, D, V)`` with ``D = U @ M @ V`` diagonal and
  nonnegative, each diagonal entry dividing the next.

Sublattices of ``Z^n`` are represented by ``Lattice``: ambient rank plus
the canonical HNF basis with zero columns dropped.  Membership tests and
coordinate solves use back-substitution on the triangular basis, which is
much cheaper than re-running a normal form.
"""

from __future__ import annotations

from typing import Iterable, Sequence

__all__ = [
    "IntMatrix",
    "Lattice",
    "hnf",
    "snf",
    "det",
    "is_unimodular",
    "kernel_basis",
    "column_span",
    "lattice_intersection",
    "preimage_lattice",
    "solve_in_span",
]


class IntMatrix:
    """A dense immutable integer matrix.

    Entries are stored as a tuple of row tuples.  ``rows`` and ``cols`` are
    explicit fields rather than being derived from ``entries`` so that
    matrices with zero rows or zero columns keep their shape.
    """

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: tuple[tuple[int, ...], ...]):
        if rows < 0 or cols < 0:
            raise ValueError("matrix dimensions must be nonnegative")
        if len(entries) != rows:
            raise ValueError(f"expected {rows} rows, got {len(entries)}")
        for r in entries:
            if len(r) != cols:
                raise ValueError(f"ragged row: expected {cols} entries, got {len(r)}")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", entries)

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("IntMatrix is immutable")

    # --- constructors -------------------------------------------------

    @staticmethod
    def from_rows(rows: Iterable[Sequence[int]], cols: int | None = None) -> "IntMatrix":
        """Build a matrix from an iterable of rows.

        ``cols`` is required when there are no rows (otherwise the column
        count cannot be inferred).
        """
        data = tuple(tuple(int(x) for x in row) for row in rows)
        if data:
            width = len(data[0])
            if cols is not None and cols != width:
                raise ValueError("explicit column count disagrees with row length")
            cols = width
        elif cols is None:
            cols = 0
        return IntMatrix(len(data), cols, data)

    @staticmethod
    def from_cols(cols: Iterable[Sequence[int]], rows: int | None = None) -> "IntMatrix":
        data = [tuple(int(x) for x in col) for col in cols]
        if data:
            height = len(data[0])
            if rows is not None and rows != height:
                raise ValueError("explicit row count disagrees with column length")
            rows = height
        elif rows is None:
            rows = 0
        entries = tuple(tuple(col[i] for col in data) for i in range(rows))
        return IntMatrix(rows, len(data), entries)

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix(n, n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @staticmethod
    def zeros(rows: int, cols: int) -> "IntMatrix":
        return IntMatrix(rows, cols, tuple((0,) * cols for _ in range(rows)))

    # --- access -------------------------------------------------------

    def row(self, i: int) -> tuple[int, ...]:
        return self.entries[i]

    def column(self, j: int) -> tuple[int, ...]:
        if not 0 <= j < self.cols:
            raise IndexError("column index out of range")
        return tuple(r[j] for r in self.entries)

    def columns(self) -> list[tuple[int, ...]]:
        return [self.column(j) for j in range(self.cols)]

    def is_zero(self) -> bool:
        return all(not x for row in self.entries for x in row)

    # --- arithmetic ---------------------------------------------------

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch: {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        bcols = [other.column(j) for j in range(other.cols)]
        entries = tuple(
            tuple(sum(a * b for a, b in zip(row, col)) for col in bcols)
            for row in self.entries
        )
        return IntMatrix(self.rows, other.cols, entries)

    def mul_vec(self, v: Sequence[int]) -> tuple[int, ...]:
        if len(v) != self.cols:
            raise ValueError("vector length does not match column count")
        return tuple(sum(a * b for a, b in zip(row, v)) for row in self.entries)

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch in addition")
        return IntMatrix(
            self.rows,
            self.cols,
            tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.entries, other.entries)),
        )

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + other.scale(-1)

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(tuple(k * x for x in r) for r in self.entries))

    def __neg__(self) -> "IntMatrix":
        return self.scale(-1)

    def transpose(self) -> "IntMatrix":
        return IntMatrix(self.cols, self.rows, tuple(self.column(j) for j in range(self.cols)))

    def hstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.rows != other.rows:
            raise ValueError("row count mismatch in hstack")
        return IntMatrix(
            self.rows,
            self.cols + other.cols,
            tuple(r + s for r, s in zip(self.entries, other.entries)),
        )

    def vstack(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.cols:
            raise ValueError("column count mismatch in vstack")
        return IntMatrix(self.rows + other.rows, self.cols, self.entries + other.entries)

    # --- misc ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, IntMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.entries == other.entries
        )

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.entries))

    def __repr__(self) -> str:
        return f"IntMatrix({self.rows}x{self.cols}, {list(map(list, self.entries))})"


def _ext_gcd(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``g = gcd(a, b) >= 0`` and ``a*x + b*y = g``."""
    old_r, r = a, b
    old_s, s = 1, 0
    old_t, t = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
        old_t, t = t, old_t - q * t
    if old_r < 0:
        old_r, old_s, old_t = -old_r, -old_s, -old_t
    return old_r, old_s, old_t


def hnf(M: IntMatrix) -> tuple[IntMatrix, IntMatrix]:
    """Canonical column Hermite normal form.

    Returns ``(H, U)`` with ``H = M @ U``, ``U`` unimodular, and ``H`` in the
    canonical form described in the module docstring.  The column span of
    ``H`` equals the column span of ``M``.
    """
    m, n = M.rows, M.cols
    cols = [list(M.column(j)) for j in range(n)]
    u = [[int(i == j) for i in range(n)] for j in range(n)]  # columns of U
    j = 0
    for i in range(m):
        if j == n:
            break
        # Fold all nonzero entries of row i (among the unfinished columns)
        # into column j via unimodular column operations.
        for k in range(j + 1, n):
            b = cols[k][i]
            if b == 0:
                continue
            a = cols[j][i]
            if a == 0:
                cols[j], cols[k] = cols[k], cols[j]
                u[j], u[k] = u[k], u[j]
                continue
            cj, ck = cols[j], cols[k]
            uj, uk = u[j], u[k]
            if b % a == 0:
                q = b // a
                for r in range(i, m):
                    ck[r] -= q * cj[r]
                for r in range(n):
                    uk[r] -= q * uj[r]
            else:
                g, x, y = _ext_gcd(a, b)
                af, bf = a // g, b // g
                for r in range(i, m):
                    s, t = cj[r], ck[r]
                    cj[r] = x * s + y * t
                    ck[r] = af * t - bf * s
                for r in range(n):
                    s, t = uj[r], uk[r]
                    uj[r] = x * s + y * t
                    uk[r] = af * t - bf * s
        a = cols[j][i]
        if a == 0:
            continue
        if a < 0:
            cols[j] = [-x for x in cols[j]]
            u[j] = [-x for x in u[j]]
            a = -a
        # Reduce the entries of earlier columns in this pivot row into [0, a).
        cj, uj = cols[j], u[j]
        for k in range(j):
            q = cols[k][i] // a
            if q:
                ck, uk = cols[k], u[k]
                for r in range(i, m):
                    ck[r] -= q * cj[r]
                for r in range(n):
                    uk[r] -= q * uj[r]
        j += 1
    H = IntMatrix.from_cols(cols, rows=m) if n else IntMatrix.zeros(m, 0)
    U = IntMatrix.from_cols(u, rows=n) if n else IntMatrix.zeros(0, 0)
    return H, U


def snf(M: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Smith normal form: ``(U, D, V)`` with ``D = U @ M @ V``.

    ``U`` (``rows x rows``) and ``V`` (``cols x cols``) are unimodular; the
    diagonal of ``D`` is nonnegative and forms a divisibility chain
    ``d_1 | d_2 | ...`` (trailing zeros allowed).
    """
    m, n = M.rows, M.cols
    a = [list(row) for row in M.entries]
    u = [[int(i == j) for j in range(m)] for i in range(m)]
    v = [[int(i == j) for j in range(n)] for i in range(n)]

    def row_sub(i: int, k: int, q: int) -> None:
        ai, ak = a[i], a[k]
        for c in range(n):
            ai[c] -= q * ak[c]
        ui, uk = u[i], u[k]
        for c in range(m):
            ui[c] -= q * uk[c]

    def row_combine(t: int, i: int, x: int, y: int, xf: int, yf: int) -> None:
        for mat, width in ((a, n), (u, m)):
            rt, ri = mat[t], mat[i]
            for c in range(width):
                s, w = rt[c], ri[c]
                rt[c] = x * s + y * w
                ri[c] = xf * s + yf * w

    def col_sub(j: int, k: int, q: int) -> None:
        for row in a:
            row[j] -= q * row[k]
        for row in v:
            row[j] -= q * row[k]

    def col_combine(t: int, j: int, x: int, y: int, xf: int, yf: int) -> None:
        for mat in (a, v):
            for row in mat:
                s, w = row[t], row[j]
                row[t] = x * s + y * w
                row[j] = xf * s + yf * w

    t = 0
    limit = min(m, n)
    while t < limit:
        # Pick the entry of smallest absolute value as pivot (limits growth).
        best = None
        pi = pj = -1
        for i in range(t, m):
            ai = a[i]
            for jj in range(t, n):
                val = ai[jj]
                if val and (best is None or -best < val < best):
                    best = abs(val)
                    pi, pj = i, jj
        if best is None:
            break
        if pi != t:
            a[t], a[pi] = a[pi], a[t]
            u[t], u[pi] = u[pi], u[t]
        if pj != t:
            for row in a:
                row[t], row[pj] = row[pj], row[t]
            for row in v:
                row[t], row[pj] = row[pj], row[t]
        while True:
            for i in range(t + 1, m):
                b = a[i][t]
                if not b:
                    continue
                piv = a[t][t]
                if b % piv == 0:
                    row_sub(i, t, b // piv)
                else:
                    g, x, y = _ext_gcd(piv, b)
                    row_combine(t, i, x, y, -(b // g), piv // g)
            refilled = False
            for jj in range(t + 1, n):
                b = a[t][jj]
                if not b:
                    continue
                piv = a[t][t]
                if b % piv == 0:
                    col_sub(jj, t, b // piv)
                else:
                    g, x, y = _ext_gcd(piv, b)
                    col_combine(t, jj, x, y, -(b // g), piv // g)
                    refilled = True
            if not refilled and all(a[i][t] == 0 for i in range(t + 1, m)):
                piv = a[t][t]
                offender = -1
                for i in range(t + 1, m):
                    ai = a[i]
                    for jj in range(t + 1, n):
                        if ai[jj] % piv:
                            offender = i
                            break
                    if offender >= 0:
                        break
                if offender < 0:
                    break
                # Fold the offending row into row t so the pivot can shrink
                # to a common divisor on the next elimination pass.
                row_sub(t, offender, -1)
        if a[t][t] < 0:
            for c in range(n):
                a[t][c] = -a[t][c]
            for c in range(m):
                u[t][c] = -u[t][c]
        t += 1
    return (
        IntMatrix.from_rows(u, cols=m),
        IntMatrix.from_rows(a, cols=n),
        IntMatrix.from_rows(v, cols=n),
    )


def det(M: IntMatrix) -> int:
    """Determinant by fraction-free (Bareiss) elimination."""
    if M.rows != M.cols:
        raise ValueError("determinant requires a square matrix")
    n = M.rows
    if n == 0:
        return 1
    a = [list(row) for row in M.entries]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def is_unimodular(M: IntMatrix) -> bool:
    return M.rows == M.cols and det(M) in (1, -1)


class Lattice:
    """A sublattice of ``Z^ambient`` with a canonical HNF basis.

    ``basis`` is a tuple of columns (each a tuple of ints), jointly in the
    canonical column Hermite form with zero columns removed.  Because the
    form is unique, ``==`` on lattices is subgroup equality.  Use
    :meth:`from_generators` unless the basis is already canonical.
    """

    __slots__ = ("ambient", "basis", "_pivots")

    def __init__(self, ambient: int, basis: tuple[tuple[int, ...], ...]):
        pivots = []
        for col in basis:
            if len(col) != ambient:
                raise ValueError("basis vector has wrong length")
            for i, x in enumerate(col):
                if x:
                    pivots.append(i)
                    break
            else:
                raise ValueError("zero column in lattice basis")
        object.__setattr__(self, "ambient", ambient)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "_pivots", tuple(pivots))

    def __setattr__(self, name, value):  # pragma: no cover - defensive
        raise AttributeError("Lattice is immutable")

    @staticmethod
    def from_generators(ambient: int, gens: Iterable[Sequence[int]]) -> "Lattice":
        vecs = [tuple(int(x) for x in g) for g in gens]
        for vec in vecs:
            if len(vec) != ambient:
                raise ValueError("generator has wrong length")
        if not vecs:
            return Lattice(ambient, ())
        H, _ = hnf(IntMatrix.from_cols(vecs, rows=ambient))
        cols = [H.column(j) for j in range(H.cols)]
        return Lattice(ambient, tuple(c for c in cols if any(c)))

    @staticmethod
    def zero(ambient: int) -> "Lattice":
        return Lattice(ambient, ())

    @staticmethod
    def full(ambient: int) -> "Lattice":
        return Lattice.scaled_full(ambient, 1)

    @staticmethod
    def scaled_full(ambient: int, k: int) -> "Lattice":
        """The lattice ``k * Z^ambient`` (zero lattice when ``k == 0``)."""
        k = abs(k)
        if k == 0:
            return Lattice(ambient, ())
        return Lattice(
            ambient,
            tuple(tuple(k * int(i == j) for i in range(ambient)) for j in range(ambient)),
        )

    @property
    def rank(self) -> int:
        return len(self.basis)

    def basis_matrix(self) -> IntMatrix:
        return IntMatrix.from_cols(self.basis, rows=self.ambient)

    def solve(self, v: Sequence[int]) -> tuple[int, ...] | None:
        """Coordinates of ``v`` in the basis, or ``None`` if ``v`` is outside.

        Back-substitution on the triangular basis; no normal form is run.
        """
        if len(v) != self.ambient:
            raise ValueError("vector has wrong length")
        w = [int(x) for x in v]
        coords = []
        for col, r in zip(self.basis, self._pivots):
            q, rem = divmod(w[r], col[r])
            if rem:
                return None
            coords.append(q)
            if q:
                for i in range(r, self.ambient):
                    w[i] -= q * col[i]
        if any(w):
            return None
        return tuple(coords)

    def contains(self, v: Sequence[int]) -> bool:
        return self.solve(v) is not None

    def contains_lattice(self, other: "Lattice") -> bool:
        if self.ambient != other.ambient:
            raise ValueError("ambient rank mismatch")
        return all(self.contains(col) for col in other.basis)

    def sum(self, other: "Lattice") -> "Lattice":
        if self.ambient != other.ambient:
            raise ValueError("ambient rank mismatch")
        return Lattice.from_generators(self.ambient, self.basis + other.basis)

    def direct_sum(self, other: "Lattice") -> "Lattice":
        """Block sum inside ``Z^(a+b)``: first block self, second block other."""
        a, b = self.ambient, other.ambient
        gens = [col + (0,) * b for col in self.basis]
        gens += [(0,) * a + col for col in other.basis]
        return Lattice.from_generators(a + b, gens)

    def scaled(self, k: int) -> "Lattice":
        k = abs(k)
        if k == 0:
            return Lattice(self.ambient, ())
        if k == 1:
            return self
        return Lattice(self.ambient, tuple(tuple(k * x for x in col) for col in self.basis))

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Lattice)
            and self.ambient == other.ambient
            and self.basis == other.basis
        )

    def __hash__(self) -> int:
        return hash((self.ambient, self.basis))

    def __repr__(self) -> str:
        return f"Lattice(ambient={self.ambient}, basis={list(map(list, self.basis))})"


def kernel_basis(M: IntMatrix) -> Lattice:
    """The kernel ``{x : Mx = 0}`` as a (saturated) sublattice of ``Z^cols``.

    Computed from the column HNF of ``M`` stacked over an identity block:
    columns whose top part vanishes record, in the bottom part, integer
    combinations of the original columns that cancel.
    """
    m, n = M.rows, M.cols
    stacked = M.vstack(IntMatrix.identity(n))
    H, _ = hnf(stacked)
    gens = []
    for j in range(H.cols):
        col = H.column(j)
        if any(col[:m]):
            continue
        gens.append(col[m:])
    return Lattice.from_generators(n, gens)


def column_span(M: IntMatrix) -> Lattice:
    return Lattice.from_generators(M.rows, [M.column(j) for j in range(M.cols)])


def lattice_intersection(A: Lattice, B: Lattice) -> Lattice:
    if A.ambient != B.ambient:
        raise ValueError("ambient rank mismatch")
    if not A.basis or not B.basis:
        return Lattice.zero(A.ambient)
    combined = A.basis_matrix().hstack(B.basis_matrix().scale(-1))
    ker = kernel_basis(combined)
    ra = A.rank
    amat = A.basis_matrix()
    gens = [amat.mul_vec(col[:ra]) for col in ker.basis]
    return Lattice.from_generators(A.ambient, gens)


def preimage_lattice(M: IntMatrix, L: Lattice) -> Lattice:
    """The lattice ``{x in Z^cols : Mx in L}``."""
    if L.ambient != M.rows:
        raise ValueError("lattice ambient rank must match matrix row count")
    n = M.cols
    if not L.basis:
        return kernel_basis(M)
    combined = M.hstack(L.basis_matrix().scale(-1))
    ker = kernel_basis(combined)
    gens = [col[:n] for col in ker.basis]
    return Lattice.from_generators(n, gens)


def solve_in_span(M: IntMatrix, b: Sequence[int]) -> tuple[int, ...] | None:
    """Some integer solution ``x`` of ``Mx = b``, or ``None`` if there is none."""
    if len(b) != M.rows:
        raise ValueError("right-hand side has wrong length")
    H, U = hnf(M)
    w = [int(x) for x in b]
    m, n = M.rows, M.cols
    c = [0] * n
    for j in range(n):
        col = H.column(j)
        r = next((i for i, x in enumerate(col) if x), None)
        if r is None:
            break  # zero columns trail; nothing more can be matched
        q, rem = divmod(w[r], col[r])
        if rem:
            return None
        c[j] = q
        if q:
            for i in range(r, m):
                w[i] -= q * col[i]
    if any(w):
        return None
    return U.mul_vec(c)
