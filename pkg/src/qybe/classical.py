"""Swap-plus-bracket families of Yang-Baxter solutions for a bare algebra.

Given any bilinear product on a finite-dimensional space g, extend to
g~ = g ⊕ C and form the one-parameter family

    R(lam): (x+a)⊗(y+b) -> (y+b)⊗(x+a) + lam·[x,y]⊗1

(the primed variant puts the bracket in the second slot).  Whether the
family solves the Yang-Baxter equation, and whether the two variants are
mutually inverse, is exactly controlled by the Jacobi identity and
antisymmetry of the product; this module builds the operators with lam
symbolic, the defect tensors, and the residual checks for both directions
of those equivalences.  A module action version lives alongside.

Everything is exact over Q(lam, mu); no Lie axioms are assumed on inputs.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass

from .linops import (
    LinearOperator,
    ShapeError,
    compose,
    compose_all,
    kron,
    strand_place,
    tensor_transposition,
)
from .report import VerificationEntry, entry, residual_summary
from .scalars import LAM, ONE, ZERO, FieldElement, parse_scalar

__all__ = [
    "AlgebraPresentation",
    "ExtendedSpace",
    "ModuleAction",
    "DefectReport",
    "classical_R",
    "classical_RV",
    "defects",
    "verify_classical",
    "sl2_data",
    "random_algebra",
    "algebra_to_json_dict",
    "algebra_from_json_dict",
    "load_algebra",
    "CLASSICAL_CHECKS",
]


def _scalar(x) -> FieldElement:
    if isinstance(x, FieldElement):
        return x
    if isinstance(x, int):
        return FieldElement(x)
    raise TypeError(f"structure constants must be exact scalars, got {type(x).__name__}")


@dataclass(frozen=True)
class AlgebraPresentation:
    """A bilinear product by structure constants [x_i, x_j] = sum_k c[i][j][k] x_k."""

    dim: int
    structure: tuple

    def __init__(self, dim: int, structure):
        table = []
        for i in range(dim):
            row = []
            for j in range(dim):
                row.append(tuple(_scalar(structure[i][j][k]) for k in range(dim)))
            table.append(tuple(row))
        object.__setattr__(self, "dim", dim)
        object.__setattr__(self, "structure", tuple(table))

    def bracket(self, u: list[FieldElement], w: list[FieldElement]) -> list[FieldElement]:
        out = [ZERO] * self.dim
        for i, ui in enumerate(u):
            if ui.is_zero():
                continue
            for j, wj in enumerate(w):
                if wj.is_zero():
                    continue
                coeff = ui * wj
                for k, c in enumerate(self.structure[i][j]):
                    if not c.is_zero():
                        out[k] = out[k] + coeff * c
        return out

    def basis_bracket(self, i: int, j: int) -> tuple[FieldElement, ...]:
        return self.structure[i][j]


@dataclass(frozen=True)
class ExtendedSpace:
    """g ⊕ C with basis (algebra basis..., unit) in that order."""

    base: AlgebraPresentation

    @property
    def dim(self) -> int:
        return self.base.dim + 1

    @property
    def unit_index(self) -> int:
        return self.base.dim


@dataclass(frozen=True)
class ModuleAction:
    """A candidate action A(x_i, v_p) = sum_q a[i][p][q] v_q (no axioms assumed)."""

    dim_g: int
    dim_v: int
    action: tuple

    def __init__(self, dim_g: int, dim_v: int, action):
        table = []
        for i in range(dim_g):
            row = []
            for p in range(dim_v):
                row.append(tuple(_scalar(action[i][p][q]) for q in range(dim_v)))
            table.append(tuple(row))
        object.__setattr__(self, "dim_g", dim_g)
        object.__setattr__(self, "dim_v", dim_v)
        object.__setattr__(self, "action", tuple(table))

    def act(self, i: int, vec: list[FieldElement]) -> list[FieldElement]:
        out = [ZERO] * self.dim_v
        for p, vp in enumerate(vec):
            if vp.is_zero():
                continue
            for q, a in enumerate(self.action[i][p]):
                if not a.is_zero():
                    out[q] = out[q] + vp * a
        return out


# ---------------------------------------------------------------------------
# Family constructors (lam symbolic)
# ---------------------------------------------------------------------------


def classical_R(ext: ExtendedSpace, primed: bool = False) -> LinearOperator:
    """The swap-plus-bracket family on g~⊗g~ with lam symbolic.

    Unprimed puts lam·[x,y] in the first output slot (unit in the second);
    primed puts it in the second.
    """
    alg = ext.base
    d = ext.dim
    u = ext.unit_index
    entries: dict[tuple[int, int], FieldElement] = {}

    def put(i, j, col, val):
        key = (i * d + j, col)
        entries[key] = entries.get(key, ZERO) + val

    for i in range(d):
        for j in range(d):
            col = i * d + j
            put(j, i, col, ONE)
            if i < u and j < u:
                for k, c in enumerate(alg.basis_bracket(i, j)):
                    if not c.is_zero():
                        if primed:
                            put(u, k, col, LAM * c)
                        else:
                            put(k, u, col, LAM * c)
    return LinearOperator(d * d, d * d, entries)


def classical_RV(ext: ExtendedSpace, act: ModuleAction) -> LinearOperator:
    """The module family g~⊗V -> V⊗g~ with lam symbolic."""
    alg = ext.base
    if act.dim_g != alg.dim:
        raise ShapeError(f"action is over a dim-{act.dim_g} algebra, not {alg.dim}")
    d = ext.dim
    u = ext.unit_index
    m = act.dim_v
    entries: dict[tuple[int, int], FieldElement] = {}

    def put(p, i, col, val):
        key = (p * d + i, col)
        entries[key] = entries.get(key, ZERO) + val

    for i in range(d):
        for p in range(m):
            col = i * m + p
            put(p, i, col, ONE)
            if i < u:
                for q, a in enumerate(act.action[i][p]):
                    if not a.is_zero():
                        put(q, u, col, LAM * a)
    return LinearOperator(m * d, d * m, entries)


# ---------------------------------------------------------------------------
# Defect tensors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DefectReport:
    antisymmetry: tuple
    jacobi: tuple
    action: tuple | None

    @property
    def antisymmetry_is_zero(self) -> bool:
        return _tensor_is_zero(self.antisymmetry)

    @property
    def jacobi_is_zero(self) -> bool:
        return _tensor_is_zero(self.jacobi)

    @property
    def action_is_zero(self) -> bool | None:
        return None if self.action is None else _tensor_is_zero(self.action)


def _tensor_is_zero(t) -> bool:
    if isinstance(t, FieldElement):
        return t.is_zero()
    return all(_tensor_is_zero(x) for x in t)


def defects(alg: AlgebraPresentation, act: ModuleAction | None = None) -> DefectReport:
    """Antisymmetry, cyclic Jacobi, and (optionally) action defect tensors.

    antisymmetry[i][j] = [x_i,x_j] + [x_j,x_i]
    jacobi[i][j][k]    = [[x_i,x_j],x_k] + [[x_j,x_k],x_i] + [[x_k,x_i],x_j]
    action[i][j]       = A([x_i,x_j],·) - A(x_i,A(x_j,·)) + A(x_j,A(x_i,·))
    """
    d = alg.dim
    basis = [[ONE if t == s else ZERO for t in range(d)] for s in range(d)]

    anti = tuple(
        tuple(
            tuple(a + b for a, b in zip(alg.basis_bracket(i, j), alg.basis_bracket(j, i)))
            for j in range(d)
        )
        for i in range(d)
    )

    def br(u, w):
        return alg.bracket(u, w)

    jac = []
    for i in range(d):
        row = []
        for j in range(d):
            cell = []
            for k in range(d):
                t1 = br(br(basis[i], basis[j]), basis[k])
                t2 = br(br(basis[j], basis[k]), basis[i])
                t3 = br(br(basis[k], basis[i]), basis[j])
                cell.append(tuple(a + b + c for a, b, c in zip(t1, t2, t3)))
            row.append(tuple(cell))
        jac.append(tuple(row))

    act_def = None
    if act is not None:
        if act.dim_g != d:
            raise ShapeError("action dimension mismatch")
        m = act.dim_v
        vecs = [[ONE if t == s else ZERO for t in range(m)] for s in range(m)]
        rows = []
        for i in range(d):
            row = []
            for j in range(d):
                cell = []
                bij = alg.basis_bracket(i, j)
                for p in range(m):
                    total = [ZERO] * m
                    for k, c in enumerate(bij):
                        if not c.is_zero():
                            for q, a in enumerate(act.action[k][p]):
                                total[q] = total[q] + c * a
                    t2 = act.act(i, act.act(j, vecs[p]))
                    t3 = act.act(j, act.act(i, vecs[p]))
                    cell.append(tuple(t - a + b for t, a, b in zip(total, t2, t3)))
                row.append(tuple(cell))
            rows.append(tuple(row))
        act_def = tuple(rows)

    return DefectReport(tuple(anti), tuple(jac), act_def)


# ---------------------------------------------------------------------------
# Lemma-level residual checks
# ---------------------------------------------------------------------------

CLASSICAL_CHECKS = ("1.1.1a", "1.1.1b", "1.1.1c", "1.1.2", "1.2.1", "1.2.2")


def _ybe_residual(r: LinearOperator, d: int) -> LinearOperator:
    r12 = strand_place(r, 1, 3, strand_dim=d)
    r23 = strand_place(r, 2, 3, strand_dim=d)
    return compose_all(r12, r23, r12) - compose_all(r23, r12, r23)


def verify_classical(
    check: str,
    alg: AlgebraPresentation,
    act: ModuleAction | None = None,
    act2: ModuleAction | None = None,
) -> VerificationEntry:
    """Compute both sides of the named identity with lam symbolic.

    Failures are results, not errors; iff-direction callers combine the
    residual flag with the matching defect flag.
    """
    t0 = time.time()
    ext = ExtendedSpace(alg)
    d = ext.dim
    if check == "1.1.1a":
        r = classical_R(ext)
        rp = classical_R(ext, primed=True)
        ident = LinearOperator.identity(d * d)
        res = compose(r, rp) - ident
        res2 = compose(rp, r) - ident
        ok = res.is_zero() and res2.is_zero()
        return entry(check, "swap-plus-bracket family times primed equals identity",
                     ok, residual_summary(res if not res.is_zero() else res2), time.time() - t0)
    if check in ("1.1.1b", "1.1.1c"):
        r = classical_R(ext, primed=(check == "1.1.1c"))
        res = _ybe_residual(r, d)
        return entry(check, "Yang-Baxter identity with lam symbolic",
                     res.is_zero(), residual_summary(res), time.time() - t0)
    if check == "1.1.2":
        r = classical_R(ext)
        sig = tensor_transposition(d, d)
        r21 = compose_all(sig, r, sig)
        rm = r.substitute("lam", -LAM)
        r21m = r21.substitute("lam", -LAM)
        ident = LinearOperator.identity(d * d)
        res = compose(r, r21m) - ident
        res2 = compose(r21, rm) - ident
        ok = res.is_zero() and res2.is_zero()
        return entry(check, "family at lam inverts its flip at -lam (any product)",
                     ok, residual_summary(res if not res.is_zero() else res2), time.time() - t0)
    if check == "1.2.1":
        if act is None:
            raise ShapeError("check 1.2.1 needs a module action")
        r = classical_R(ext)
        rv = classical_RV(ext, act)
        m = act.dim_v
        lhs = compose_all(
            kron(rv, LinearOperator.identity(d)),
            kron(LinearOperator.identity(d), rv),
            kron(r, LinearOperator.identity(m)),
        )
        rhs = compose_all(
            kron(LinearOperator.identity(m), r),
            kron(rv, LinearOperator.identity(d)),
            kron(LinearOperator.identity(d), rv),
        )
        res = lhs - rhs
        return entry(check, "mixed Yang-Baxter identity for a module candidate",
                     res.is_zero(), residual_summary(res), time.time() - t0)
    if check == "1.2.2":
        if act is None or act2 is None:
            raise ShapeError("check 1.2.2 needs two module actions")
        rv = classical_RV(ext, act)
        rw = classical_RV(ext, act2)
        mv, mw = act.dim_v, act2.dim_v
        swap_vw = tensor_transposition(mv, mw)
        lhs = compose_all(
            kron(swap_vw, LinearOperator.identity(d)),
            kron(LinearOperator.identity(mv), rw),
            kron(rv, LinearOperator.identity(mw)),
        )
        rhs = compose_all(
            kron(LinearOperator.identity(mw), rv),
            kron(rw, LinearOperator.identity(mv)),
            kron(LinearOperator.identity(d), swap_vw),
        )
        res = lhs - rhs
        return entry(check, "two-module exchange identity",
                     res.is_zero(), residual_summary(res), time.time() - t0)
    raise ValueError(f"unknown classical check {check!r}")


# ---------------------------------------------------------------------------
# Concrete data: sl2, its irreducibles, random corpus
# ---------------------------------------------------------------------------


def sl2_data(n: int) -> tuple[AlgebraPresentation, ModuleAction]:
    """sl2 in the basis (e, f, h) and its (n+1)-dimensional weight module.

    Brackets: [h,e] = 2e, [h,f] = -2f, [e,f] = h.  Module: h·w_k = (n-2k)w_k,
    e·w_k = (n-k+1)·w_(k-1), f·w_k = (k+1)·w_(k+1).
    """
    if n < 0:
        raise ShapeError("module index must be nonnegative")
    z = [[[0] * 3 for _ in range(3)] for _ in range(3)]
    E, F, H = 0, 1, 2
    z[E][F][H] = 1
    z[F][E][H] = -1
    z[H][E][E] = 2
    z[E][H][E] = -2
    z[H][F][F] = -2
    z[F][H][F] = 2
    alg = AlgebraPresentation(3, z)
    m = n + 1
    a = [[[0] * m for _ in range(m)] for _ in range(3)]
    for k in range(m):
        if k > 0:
            a[E][k][k - 1] = n - k + 1
        if k < n:
            a[F][k][k + 1] = k + 1
        a[H][k][k] = n - 2 * k
    return alg, ModuleAction(3, m, a)


def random_algebra(rng, dim: int, antisymmetric: bool) -> AlgebraPresentation:
    """Random small-integer structure constants in [-2, 2]."""
    z = [[[0] * dim for _ in range(dim)] for _ in range(dim)]
    for i in range(dim):
        for j in range(dim):
            if antisymmetric and j <= i:
                continue
            for k in range(dim):
                z[i][j][k] = rng.randint(-2, 2)
    if antisymmetric:
        for i in range(dim):
            for j in range(i + 1, dim):
                for k in range(dim):
                    z[j][i][k] = -z[i][j][k]
    return AlgebraPresentation(dim, z)


# ---------------------------------------------------------------------------
# Corpus JSON
# ---------------------------------------------------------------------------


def algebra_to_json_dict(alg: AlgebraPresentation, act: ModuleAction | None = None, name: str = "") -> dict:
    structure = []
    for i in range(alg.dim):
        row = []
        for j in range(alg.dim):
            row.append(
                [[k, str(c)] for k, c in enumerate(alg.structure[i][j]) if not c.is_zero()]
            )
        structure.append(row)
    out = {"name": name, "dim": alg.dim, "structure": structure, "action": None}
    if act is not None:
        entries = []
        for i in range(act.dim_g):
            row = []
            for p in range(act.dim_v):
                row.append([[q, str(c)] for q, c in enumerate(act.action[i][p]) if not c.is_zero()])
            entries.append(row)
        out["action"] = {"dim_v": act.dim_v, "entries": entries}
    return out


def algebra_from_json_dict(data: dict) -> tuple[AlgebraPresentation, ModuleAction | None]:
    try:
        dim = int(data["dim"])
        structure = data["structure"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed algebra record: {exc}") from exc
    if len(structure) != dim:
        raise ValueError(f"structure has {len(structure)} rows, expected {dim}")
    z = [[[ZERO] * dim for _ in range(dim)] for _ in range(dim)]
    for i, row in enumerate(structure):
        if len(row) != dim:
            raise ValueError(f"structure[{i}] has {len(row)} cells, expected {dim}")
        for j, cell in enumerate(row):
            for pos, item in enumerate(cell):
                k, coeff = item
                k = int(k)
                if not 0 <= k < dim:
                    raise ValueError(f"structure[{i}][{j}][{pos}]: index {k} out of range 0..{dim - 1}")
                z[i][j][k] = parse_scalar(coeff)
    alg = AlgebraPresentation(dim, z)
    act = None
    if data.get("action"):
        adata = data["action"]
        dim_v = int(adata["dim_v"])
        entries = adata["entries"]
        if len(entries) != dim:
            raise ValueError(f"action has {len(entries)} generator rows, expected {dim}")
        a = [[[ZERO] * dim_v for _ in range(dim_v)] for _ in range(dim)]
        for i, row in enumerate(entries):
            if len(row) != dim_v:
                raise ValueError(f"action[{i}] has {len(row)} cells, expected {dim_v}")
            for p, cell in enumerate(row):
                for pos, item in enumerate(cell):
                    q, coeff = item
                    q = int(q)
                    if not 0 <= q < dim_v:
                        raise ValueError(f"action[{i}][{p}][{pos}]: index {q} out of range 0..{dim_v - 1}")
                    a[i][p][q] = parse_scalar(coeff)
        act = ModuleAction(dim, dim_v, a)
    return alg, act


def load_algebra(path) -> tuple[AlgebraPresentation, ModuleAction | None]:
    with open(path) as fh:
        data = json.load(fh)
    return algebra_from_json_dict(data)
