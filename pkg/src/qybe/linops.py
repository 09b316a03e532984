"""Sparse exact linear algebra over the rational-function field.

A :class:`LinearOperator` is a sparse matrix of :class:`~qybe.scalars.FieldElement`
entries with optional strand-signature labels on its domain and codomain.
All operations are exact; there is no floating point anywhere.  Operators are
immutable once built, so they can be shared freely.

Composition follows function order: ``compose(f, g)`` (or ``f @ g``) applies
``g`` first.  Kronecker products are big-endian: the leftmost tensor factor is
the most significant part of the basis index.
"""

from __future__ import annotations

import json
from typing import Iterable, Mapping

from .scalars import FieldElement, ONE, ZERO, parse_scalar

__all__ = [
    "LinearOperator",
    "ShapeError",
    "InvarianceError",
    "compose",
    "kron",
    "strand_place",
    "image_restrict",
    "restrict_map",
    "tensor_transposition",
]


class ShapeError(ValueError):
    """Dimension or label mismatch between operators."""


class InvarianceError(ValueError):
    """An operator failed to preserve the image it was restricted to."""


def _as_scalar(x) -> FieldElement:
    if isinstance(x, FieldElement):
        return x
    if isinstance(x, int):
        return FieldElement(x)
    raise TypeError(f"expected a scalar, got {type(x).__name__}")


class LinearOperator:
    """Sparse exact matrix with strand-signature labels."""

    __slots__ = ("rows", "cols", "entries", "domain", "codomain")

    def __init__(
        self,
        rows: int,
        cols: int,
        entries: Mapping[tuple[int, int], FieldElement] | None = None,
        domain: str = "",
        codomain: str = "",
    ):
        self.rows = rows
        self.cols = cols
        clean: dict[tuple[int, int], FieldElement] = {}
        if entries:
            for (i, j), val in entries.items():
                if not (0 <= i < rows and 0 <= j < cols):
                    raise ShapeError(f"entry ({i}, {j}) outside {rows}x{cols}")
                val = _as_scalar(val)
                if not val.is_zero():
                    clean[(i, j)] = val
        self.entries = clean
        self.domain = domain
        self.codomain = codomain

    # -- constructors --------------------------------------------------------

    @classmethod
    def identity(cls, n: int, label: str = "") -> "LinearOperator":
        return cls(n, n, {(i, i): ONE for i in range(n)}, domain=label, codomain=label)

    @classmethod
    def zero(cls, rows: int, cols: int) -> "LinearOperator":
        return cls(rows, cols, {})

    @classmethod
    def from_rows(cls, dense: Iterable[Iterable]) -> "LinearOperator":
        dense = [list(r) for r in dense]
        rows = len(dense)
        cols = len(dense[0]) if dense else 0
        entries = {}
        for i, row in enumerate(dense):
            if len(row) != cols:
                raise ShapeError("ragged rows")
            for j, val in enumerate(row):
                val = _as_scalar(val)
                if not val.is_zero():
                    entries[(i, j)] = val
        return cls(rows, cols, entries)

    @classmethod
    def column(cls, values: Iterable) -> "LinearOperator":
        vals = [_as_scalar(v) for v in values]
        return cls(len(vals), 1, {(i, 0): v for i, v in enumerate(vals) if not v.is_zero()})

    @classmethod
    def row(cls, values: Iterable) -> "LinearOperator":
        vals = [_as_scalar(v) for v in values]
        return cls(1, len(vals), {(0, j): v for j, v in enumerate(vals) if not v.is_zero()})

    def with_labels(self, domain: str = "", codomain: str = "") -> "LinearOperator":
        out = LinearOperator.__new__(LinearOperator)
        out.rows, out.cols, out.entries = self.rows, self.cols, self.entries
        out.domain, out.codomain = domain, codomain
        return out

    @classmethod
    def _raw(cls, rows, cols, entries, domain="", codomain="") -> "LinearOperator":
        out = cls.__new__(cls)
        out.rows, out.cols, out.entries = rows, cols, entries
        out.domain, out.codomain = domain, codomain
        return out

    # -- basic structure -----------------------------------------------------

    def __getitem__(self, ij: tuple[int, int]) -> FieldElement:
        return self.entries.get(ij, ZERO)

    def is_zero(self) -> bool:
        return not self.entries

    def is_identity(self) -> bool:
        return (
            self.rows == self.cols
            and len(self.entries) == self.rows
            and all(self.entries.get((i, i), ZERO).is_one() for i in range(self.rows))
        )

    def __eq__(self, other):
        if not isinstance(other, LinearOperator):
            return NotImplemented
        return self.rows == other.rows and self.cols == other.cols and self.entries == other.entries

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(sorted(self.entries))))

    def __repr__(self):
        return f"LinearOperator({self.rows}x{self.cols}, {len(self.entries)} entries)"

    def dense(self) -> list[list[FieldElement]]:
        out = [[ZERO] * self.cols for _ in range(self.rows)]
        for (i, j), val in self.entries.items():
            out[i][j] = val
        return out

    def transpose(self) -> "LinearOperator":
        return LinearOperator._raw(
            self.cols,
            self.rows,
            {(j, i): v for (i, j), v in self.entries.items()},
            domain=self.codomain,
            codomain=self.domain,
        )

    def column_values(self, j: int) -> list[FieldElement]:
        return [self.entries.get((i, j), ZERO) for i in range(self.rows)]

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, LinearOperator):
            return NotImplemented
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ShapeError(f"cannot add {self.rows}x{self.cols} and {other.rows}x{other.cols}")
        entries = dict(self.entries)
        for key, val in other.entries.items():
            s = entries.get(key)
            s = val if s is None else s + val
            if s.is_zero():
                entries.pop(key, None)
            else:
                entries[key] = s
        return LinearOperator._raw(self.rows, self.cols, entries, self.domain, self.codomain)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return LinearOperator._raw(
            self.rows, self.cols, {k: -v for k, v in self.entries.items()}, self.domain, self.codomain
        )

    def scale(self, c) -> "LinearOperator":
        c = _as_scalar(c)
        if c.is_zero():
            return LinearOperator._raw(self.rows, self.cols, {}, self.domain, self.codomain)
        return LinearOperator._raw(
            self.rows, self.cols, {k: v * c for k, v in self.entries.items()}, self.domain, self.codomain
        )

    def __mul__(self, c):
        if isinstance(c, (int, FieldElement)):
            return self.scale(c)
        return NotImplemented

    __rmul__ = __mul__

    def __matmul__(self, other):
        return compose(self, other)

    def substitute(self, var: str, value) -> "LinearOperator":
        entries = {}
        for key, val in self.entries.items():
            s = val.substitute(var, value)
            if not s.is_zero():
                entries[key] = s
        return LinearOperator._raw(self.rows, self.cols, entries, self.domain, self.codomain)

    def at_q_one(self) -> "LinearOperator":
        return self.substitute("v", 1)

    def kron(self, other: "LinearOperator") -> "LinearOperator":
        return kron(self, other)

    # -- serialization -------------------------------------------------------

    def to_json_dict(self) -> dict:
        label = self.codomain
        if self.domain and self.domain != self.codomain:
            label = f"{self.codomain}<-{self.domain}" if self.codomain else self.domain
        items = sorted(self.entries.items())
        return {
            "rows": self.rows,
            "cols": self.cols,
            "basis": label,
            "entries": [[i, j, str(v)] for (i, j), v in items],
        }

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_json_dict(), indent=indent)

    @classmethod
    def from_json_dict(cls, data: dict) -> "LinearOperator":
        entries = {}
        for i, j, s in data["entries"]:
            entries[(int(i), int(j))] = parse_scalar(s)
        label = data.get("basis", "")
        dom, cod = "", ""
        if "<-" in label:
            cod, dom = label.split("<-", 1)
        else:
            dom = cod = label
        return cls(int(data["rows"]), int(data["cols"]), entries, domain=dom, codomain=cod)


# ---------------------------------------------------------------------------
# Core operations
# ---------------------------------------------------------------------------


def compose(f: LinearOperator, g: LinearOperator) -> LinearOperator:
    """Exact matrix product f∘g (g acts first)."""
    if f.cols != g.rows:
        raise ShapeError(f"compose: inner dimensions {f.cols} != {g.rows}")
    if f.domain and g.codomain and f.domain != g.codomain:
        raise ShapeError(f"compose: inner labels {f.domain!r} != {g.codomain!r}")
    g_rows: dict[int, list[tuple[int, FieldElement]]] = {}
    for (j, k), val in g.entries.items():
        g_rows.setdefault(j, []).append((k, val))
    acc: dict[tuple[int, int], FieldElement] = {}
    for (i, j), fv in f.entries.items():
        row = g_rows.get(j)
        if row is None:
            continue
        for k, gv in row:
            key = (i, k)
            prod = fv * gv
            cur = acc.get(key)
            acc[key] = prod if cur is None else cur + prod
    entries = {k: v for k, v in acc.items() if not v.is_zero()}
    return LinearOperator._raw(f.rows, g.cols, entries, domain=g.domain, codomain=f.codomain)


def compose_all(*ops: LinearOperator) -> LinearOperator:
    """Compose a chain of operators; the rightmost acts first."""
    out = ops[0]
    for op in ops[1:]:
        out = compose(out, op)
    return out


def kron(f: LinearOperator, g: LinearOperator) -> LinearOperator:
    """Kronecker product with the left factor most significant."""
    entries = {}
    gr, gc = g.rows, g.cols
    for (i1, j1), v1 in f.entries.items():
        for (i2, j2), v2 in g.entries.items():
            entries[(i1 * gr + i2, j1 * gc + j2)] = v1 * v2
    dom = f.domain + "⊗" + g.domain if f.domain and g.domain else ""
    cod = f.codomain + "⊗" + g.codomain if f.codomain and g.codomain else ""
    return LinearOperator._raw(f.rows * g.rows, f.cols * g.cols, entries, dom, cod)


def kron_all(*ops: LinearOperator) -> LinearOperator:
    out = ops[0]
    for op in ops[1:]:
        out = kron(out, op)
    return out


def _strand_count(dim: int, strand_dim: int, what: str) -> int:
    n = 0
    d = 1
    while d < dim:
        d *= strand_dim
        n += 1
    if d != dim:
        raise ShapeError(f"{what} dimension {dim} is not a power of {strand_dim}")
    return n


def strand_place(
    local: LinearOperator, start: int, total: int, strand_dim: int = 2
) -> LinearOperator:
    """Place a local operator on adjacent strands, identity elsewhere.

    ``local`` maps k_in strands to k_out strands (dimensions must be powers
    of ``strand_dim``); ``start`` is 1-based; ``total`` counts domain strands.
    """
    k_in = _strand_count(local.cols, strand_dim, "domain")
    k_out = _strand_count(local.rows, strand_dim, "codomain")
    if start < 1 or start + k_in > total + 1:
        raise ShapeError(f"placement at {start} of {k_in} strands exceeds {total}")
    left = strand_dim ** (start - 1)
    right = strand_dim ** (total - (start - 1) - k_in)
    out = local
    if left > 1:
        out = kron(LinearOperator.identity(left), out)
    if right > 1:
        out = kron(out, LinearOperator.identity(right))
    return out


def tensor_transposition(dim_a: int, dim_b: int) -> LinearOperator:
    """The swap map A⊗B -> B⊗A on basis indices."""
    entries = {}
    for i in range(dim_a):
        for j in range(dim_b):
            entries[(j * dim_a + i, i * dim_b + j)] = ONE
    return LinearOperator._raw(dim_a * dim_b, dim_a * dim_b, entries)


# ---------------------------------------------------------------------------
# Exact elimination: rank, solving, nullspace, column bases
# ---------------------------------------------------------------------------


def _complexity(x: FieldElement) -> int:
    return len(x.num) + len(x.den)


def _rref(rows: list[dict[int, FieldElement]], ncols: int) -> tuple[list[dict], list[int]]:
    """Reduced row echelon form of sparse rows; returns (rows, pivot cols).

    Deterministic: pivots scan columns left to right and pick the sparsest
    candidate row (ties by current order).  The result is the unique RREF.
    """
    work = [dict(r) for r in rows if r]
    done: list[dict] = []
    pivots: list[int] = []
    for col in range(ncols):
        best = None
        best_key = None
        for idx, r in enumerate(work):
            val = r.get(col)
            if val is not None:
                key = (len(r), _complexity(val), idx)
                if best_key is None or key < best_key:
                    best, best_key = idx, key
        if best is None:
            continue
        pivot = work.pop(best)
        pv = pivot[col]
        if not pv.is_one():
            pivot = {c: v / pv for c, v in pivot.items()}
        for group in (work, done):
            for idx, r in enumerate(group):
                val = r.get(col)
                if val is None:
                    continue
                new = dict(r)
                del new[col]
                for c, v in pivot.items():
                    if c == col:
                        continue
                    s = new.get(c)
                    s = -val * v if s is None else s - val * v
                    if s.is_zero():
                        new.pop(c, None)
                    else:
                        new[c] = s
                group[idx] = new
        done.append(pivot)
        pivots.append(col)
        work = [r for r in work if r]
    return done, pivots


def _op_rows(op: LinearOperator) -> list[dict[int, FieldElement]]:
    rows: list[dict[int, FieldElement]] = [dict() for _ in range(op.rows)]
    for (i, j), v in op.entries.items():
        rows[i][j] = v
    return rows


def rank(op: LinearOperator) -> int:
    """Exact rank via sparse elimination."""
    _, pivots = _rref(_op_rows(op), op.cols)
    return len(pivots)


def nullspace(op: LinearOperator) -> list[LinearOperator]:
    """Deterministic basis of the right nullspace, as column vectors."""
    rows, pivots = _rref(_op_rows(op), op.cols)
    pivot_set = set(pivots)
    free = [c for c in range(op.cols) if c not in pivot_set]
    basis = []
    for fc in free:
        vec = {(fc, 0): ONE}
        for r, pc in zip(rows, pivots):
            val = r.get(fc)
            if val is not None:
                vec[(pc, 0)] = -val
        basis.append(LinearOperator._raw(op.cols, 1, vec))
    return basis


def solve_right(a: LinearOperator, b: LinearOperator) -> LinearOperator:
    """Solve a @ x = b exactly; raises InvarianceError if inconsistent.

    When the solution is not unique, free variables are set to zero.
    """
    if a.rows != b.rows:
        raise ShapeError(f"solve: {a.rows} rows vs {b.rows} rows")
    ncols = a.cols + b.cols
    rows: list[dict[int, FieldElement]] = [dict() for _ in range(a.rows)]
    for (i, j), v in a.entries.items():
        rows[i][j] = v
    for (i, j), v in b.entries.items():
        rows[i][a.cols + j] = v
    reduced, pivots = _rref(rows, ncols)
    x: dict[tuple[int, int], FieldElement] = {}
    for r, pc in zip(reduced, pivots):
        if pc >= a.cols:
            raise InvarianceError("inconsistent linear system")
        for c, v in r.items():
            if c >= a.cols:
                x[(pc, c - a.cols)] = v
            elif c != pc:
                # Free variable with a nonzero coefficient: solution exists
                # with that variable set to zero, so nothing to add.
                pass
    return LinearOperator._raw(a.cols, b.cols, x)


def inverse(op: LinearOperator) -> LinearOperator:
    """Exact two-sided inverse of a square operator."""
    if op.rows != op.cols:
        raise ShapeError("inverse of a non-square operator")
    inv = solve_right(op, LinearOperator.identity(op.rows))
    if not compose(op, inv).is_identity():
        raise InvarianceError("operator is singular")
    return inv.with_labels(domain=op.codomain, codomain=op.domain)


def column_space_basis(op: LinearOperator) -> LinearOperator:
    """Canonical exact basis of the column space, as a rows x rank matrix.

    Columns are the unique reduced column echelon basis (the RREF of the
    transpose, transposed back), so the output is bit-exact reproducible.
    """
    rows, _ = _rref(_op_rows(op.transpose()), op.rows)
    entries = {}
    for k, r in enumerate(rows):
        for i, v in r.items():
            entries[(i, k)] = v
    return LinearOperator._raw(op.rows, len(rows), entries)


def image_restrict(op: LinearOperator, idem: LinearOperator) -> LinearOperator:
    """Express op on the image of an idempotent, in its canonical basis."""
    if idem.rows != idem.cols:
        raise ShapeError("idempotent must be square")
    if not compose(idem, idem) == idem:
        raise InvarianceError("projector is not idempotent")
    if op.rows != idem.rows or op.cols != idem.rows:
        raise ShapeError("operator shape does not match the idempotent")
    basis = column_space_basis(idem)
    return restrict_map(op, basis, basis)


def restrict_map(
    op: LinearOperator, dom_basis: LinearOperator, cod_basis: LinearOperator
) -> LinearOperator:
    """Matrix of op between given exact column bases.

    Raises InvarianceError if op does not map the domain basis span into
    the codomain basis span.
    """
    if op.cols != dom_basis.rows or op.rows != cod_basis.rows:
        raise ShapeError("basis shapes do not match the operator")
    return solve_right(cod_basis, compose(op, dom_basis))
