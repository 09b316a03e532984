"""Quantum sl(2) acting on tensor powers of the two-dimensional module.

The generator matrices on V1 are the standard ones (K = diag(q, q^-1),
E raising, F lowering).  The coproduct placement is not hard-coded: both
standard conventions are screened at build time against equivariance of the
explicit cap and cup intertwiners, and the one that passes is used.  If
neither passes the build aborts loudly, since every later construction
depends on this anchor.

Higher modules are realized concretely: the (n+1)-dimensional module is the
image of the n-strand projector inside V1^⊗n, with a canonical exact column
basis.  Braidings between them are evaluated cabled crossing diagrams
restricted to those images.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .diagrams import (
    DiagramSum,
    cable_word,
    cap_diagram,
    cup_diagram,
    evaluate,
    jones_wenzl,
    skein_resolve,
)
from .linops import (
    InvarianceError,
    LinearOperator,
    ShapeError,
    column_space_basis,
    compose,
    compose_all,
    inverse,
    kron,
    nullspace,
    rank,
    restrict_map,
    strand_place,
)
from .scalars import FieldElement, ONE, q_power, qint, v_power

__all__ = [
    "UqAction",
    "QModule",
    "ConventionError",
    "basic_intertwiners",
    "uq_action",
    "equivariance_defect",
    "is_intertwiner",
    "qmodule",
    "cabled_braiding",
    "quantum_bracket",
    "intertwiner_space",
    "hom_dimension_certified",
    "module_hom_basis",
    "isotypic_multiplicities",
    "operator_registry",
]


class ConventionError(RuntimeError):
    """Neither standard coproduct makes the cap/cup maps equivariant."""


@dataclass(frozen=True)
class Intertwiners:
    eps1: LinearOperator
    delta1: LinearOperator
    rhat11: LinearOperator
    rhat11_inv: LinearOperator


@dataclass(frozen=True)
class UqAction:
    """Generator matrices acting on V1^⊗n."""

    n: int
    E: LinearOperator
    F: LinearOperator
    K: LinearOperator
    Kinv: LinearOperator

    def generators(self) -> dict[str, LinearOperator]:
        return {"E": self.E, "F": self.F, "K": self.K}


@lru_cache(maxsize=None)
def basic_intertwiners() -> Intertwiners:
    """The explicit cap, cup and crossing operators on V1⊗V1.

    Basis order (v^1⊗v^1, v^1⊗v^-1, v^-1⊗v^1, v^-1⊗v^-1).  The crossing is
    q^(1/2)·cup∘cap + q^(-1/2)·id and its inverse is the mirrored resolution,
    verified exactly.
    """
    eps = evaluate(DiagramSum.from_diagram(cap_diagram()))
    delta = evaluate(DiagramSum.from_diagram(cup_diagram()))
    de = compose(delta, eps)
    rhat = de.scale(v_power(1)) + LinearOperator.identity(4).scale(v_power(-1))
    rinv = de.scale(v_power(-1)) + LinearOperator.identity(4).scale(v_power(1))
    assert compose(rhat, rinv).is_identity()
    return Intertwiners(eps, delta, rhat, rinv)


def _seed_generators() -> dict[str, LinearOperator]:
    q = q_power(1)
    E = LinearOperator(2, 2, {(0, 1): ONE})
    F = LinearOperator(2, 2, {(1, 0): ONE})
    K = LinearOperator(2, 2, {(0, 0): q, (1, 1): q_power(-1)})
    Kinv = LinearOperator(2, 2, {(0, 0): q_power(-1), (1, 1): q})
    return {"E": E, "F": F, "K": K, "Kinv": Kinv}


def _build_action(n: int, convention: str) -> UqAction:
    g = _seed_generators()
    I2 = LinearOperator.identity(2)
    if n == 0:
        one = LinearOperator.identity(1)
        zero = LinearOperator.zero(1, 1)
        return UqAction(0, zero, zero, one, one)

    def placed(op: LinearOperator, i: int, left: LinearOperator, right: LinearOperator):
        out = op
        for _ in range(i - 1):
            out = kron(left, out)
        for _ in range(n - i):
            out = kron(out, right)
        return out

    if convention == "down":
        # ΔE = E⊗1 + K^-1⊗E, ΔF = F⊗K + 1⊗F
        E = placed(g["E"], 1, g["Kinv"], I2)
        F = placed(g["F"], 1, I2, g["K"])
        for i in range(2, n + 1):
            E = E + placed(g["E"], i, g["Kinv"], I2)
            F = F + placed(g["F"], i, I2, g["K"])
    else:
        # ΔE = E⊗K + 1⊗E, ΔF = F⊗1 + K^-1⊗F
        E = placed(g["E"], 1, I2, g["K"])
        F = placed(g["F"], 1, g["Kinv"], I2)
        for i in range(2, n + 1):
            E = E + placed(g["E"], i, I2, g["K"])
            F = F + placed(g["F"], i, g["Kinv"], I2)
    K = g["K"]
    Kinv = g["Kinv"]
    for _ in range(n - 1):
        K = kron(K, g["K"])
        Kinv = kron(Kinv, g["Kinv"])
    return UqAction(n, E, F, K, Kinv)


@lru_cache(maxsize=None)
def _convention() -> str:
    """Pick the coproduct convention under which cap and cup intertwine."""
    iw = basic_intertwiners()
    for convention in ("down", "up"):
        act2 = _build_action(2, convention)
        act0 = _build_action(0, convention)
        ok = True
        for name in ("E", "F", "K"):
            g2 = getattr(act2, name)
            g0 = getattr(act0, name)
            if not (compose(iw.eps1, g2) - compose(g0, iw.eps1)).is_zero():
                ok = False
                break
            if not (compose(g2, iw.delta1) - compose(iw.delta1, g0)).is_zero():
                ok = False
                break
        if ok:
            return convention
    raise ConventionError("no standard coproduct makes the cap and cup equivariant")


@lru_cache(maxsize=None)
def uq_action(n: int) -> UqAction:
    """Generator matrices on V1^⊗n under the screened convention.

    The defining algebra relations are checked once per n at build time.
    """
    if n < 0:
        raise ShapeError("strand count must be nonnegative")
    act = _build_action(n, _convention())
    q2 = q_power(2)
    assert compose(act.K, act.Kinv).is_identity()
    assert compose(act.K, act.E) == compose(act.E, act.K).scale(q2)
    assert compose(act.K, act.F) == compose(act.F, act.K).scale(q_power(-2))
    lhs = compose(act.E, act.F) - compose(act.F, act.E)
    rhs = (act.K - act.Kinv).scale(1 / (q_power(1) - q_power(-1)))
    assert lhs == rhs
    return act


def equivariance_defect(
    op: LinearOperator, n_in: int, n_out: int
) -> dict[str, LinearOperator]:
    """Exact commutation residuals op∘g - g∘op for each generator.

    All residuals vanish exactly iff op is a module map V1^⊗n_in -> V1^⊗n_out.
    """
    if op.cols != 2**n_in or op.rows != 2**n_out:
        raise ShapeError(f"operator is {op.rows}x{op.cols}, expected {2**n_out}x{2**n_in}")
    a_in = uq_action(n_in)
    a_out = uq_action(n_out)
    return {
        name: compose(op, getattr(a_in, name)) - compose(getattr(a_out, name), op)
        for name in ("E", "F", "K")
    }


def is_intertwiner(op: LinearOperator, n_in: int, n_out: int) -> bool:
    return all(r.is_zero() for r in equivariance_defect(op, n_in, n_out).values())


@dataclass(frozen=True)
class QModule:
    """The (n+1)-dimensional module as the image of the n-strand projector."""

    n: int
    projector: LinearOperator
    basis: LinearOperator  # 2^n x (n+1) exact column basis of the image
    E: LinearOperator
    F: LinearOperator
    K: LinearOperator

    @property
    def dim(self) -> int:
        return self.n + 1

    def generators(self) -> dict[str, LinearOperator]:
        return {"E": self.E, "F": self.F, "K": self.K}


@lru_cache(maxsize=None)
def qmodule(n: int) -> QModule:
    proj = evaluate(jones_wenzl(n))
    basis = column_space_basis(proj)
    if basis.cols != n + 1:
        raise InvarianceError(f"projector image has rank {basis.cols}, expected {n + 1}")
    act = uq_action(n)
    gens = {}
    for name in ("E", "F", "K"):
        g = getattr(act, name)
        gens[name] = restrict_map(g, basis, basis)
    return QModule(n, proj, basis, gens["E"], gens["F"], gens["K"])


@lru_cache(maxsize=None)
def cabled_braiding(m: int, n: int) -> LinearOperator:
    """The braiding V_m⊗V_n -> V_n⊗V_m from the m·n-crossing cable.

    Defined up to an overall scalar (no framing normalization); every use
    downstream is degree one in the braiding, so the scalar drops out.
    """
    if m > 4 or n > 4:
        raise ShapeError("cabled braidings are built for strand counts <= 4")
    word = cable_word(m, n)
    op = evaluate(skein_resolve(word))
    pm = qmodule(m)
    pn = qmodule(n)
    dom_proj = kron(pm.projector, pn.projector)
    cod_proj = kron(pn.projector, pm.projector)
    sandwich = compose_all(cod_proj, op, dom_proj)
    return restrict_map(sandwich, kron(pm.basis, pn.basis), kron(pn.basis, pm.basis))


# ---------------------------------------------------------------------------
# Equivariant Hom spaces
# ---------------------------------------------------------------------------


def _hom_constraint_rows(dom: dict[str, LinearOperator], cod: dict[str, LinearOperator]):
    """Rows of the equivariance system T∘g_dom = g_cod∘T, unknowns T flattened."""
    dd = next(iter(dom.values())).rows
    cd = next(iter(cod.values())).rows
    rows: dict[tuple[int, int], FieldElement] = {}
    r = 0
    for name in sorted(dom):
        gd = dom[name]
        gc = cod[name]
        # equation (i, j): sum_k T[i,k] gd[k,j] - sum_k gc[i,k] T[k,j] = 0
        for i in range(cd):
            for j in range(dd):
                row = r + i * dd + j
                for (k, jj), val in gd.entries.items():
                    if jj == j:
                        key = (row, i * dd + k)
                        rows[key] = rows.get(key, FieldElement(0)) + val
                for (ii, k), val in gc.entries.items():
                    if ii == i:
                        key = (row, k * dd + j)
                        rows[key] = rows.get(key, FieldElement(0)) - val
        r += cd * dd
    mat = LinearOperator(r, cd * dd, {k: v for k, v in rows.items() if not v.is_zero()})
    return mat, dd, cd


def intertwiner_space(
    dom: dict[str, LinearOperator], cod: dict[str, LinearOperator]
) -> list[LinearOperator]:
    """Exact basis of the space of module maps, by symbolic nullspace."""
    mat, dd, cd = _hom_constraint_rows(dom, cod)
    out = []
    for vec in nullspace(mat):
        entries = {}
        for (idx, _), val in vec.entries.items():
            entries[(idx // dd, idx % dd)] = val
        out.append(LinearOperator(cd, dd, entries))
    return out


def hom_dimension_certified(
    dom: dict[str, LinearOperator],
    cod: dict[str, LinearOperator],
    candidates: list[LinearOperator],
    sample: FieldElement | int = None,
) -> int:
    """Certified dimension of the intertwiner space.

    Upper bound: nullity of the equivariance system specialized at a random
    rational point of v (rank can only drop under specialization, so the
    specialized nullity bounds the generic one from above).  Lower bound:
    the exact rank of the given exhibited intertwiners, each verified to
    satisfy the system symbolically.  The two must meet.
    """
    if sample is None:
        sample = FieldElement(5, 3)
    mat, dd, cd = _hom_constraint_rows(dom, cod)
    upper = mat.cols - rank(mat.substitute("v", sample))
    flat = {}
    for k, cand in enumerate(candidates):
        if cand.rows != cd or cand.cols != dd:
            raise ShapeError("candidate of wrong shape")
        vec = LinearOperator(mat.cols, 1, {(i * dd + j, 0): val for (i, j), val in cand.entries.items()})
        if not compose(mat, vec).is_zero():
            raise InvarianceError("candidate is not an intertwiner")
        for (i, j), val in cand.entries.items():
            flat[(k, i * dd + j)] = val
    lower = rank(LinearOperator(len(candidates), mat.cols, flat))
    if lower != upper:
        raise InvarianceError(
            f"hom dimension not certified: {lower} exhibited < {upper} allowed"
        )
    return upper


@lru_cache(maxsize=None)
def module_hom_basis(n: int) -> list[LinearOperator]:
    """Certified basis of module maps (V1⊗V1)⊗V_n -> V_n⊗(V1⊗V1).

    Candidates are evaluated (n+2)-strand planar diagrams sandwiched with the
    n-strand projector on the module slot; the span is rank-filtered to an
    exact basis and certified against the equivariance system.
    """
    from .diagrams import enumerate_tl

    pn = qmodule(n)
    I4 = LinearOperator.identity(4)
    dom_basis = kron(I4, pn.basis)
    cod_basis = kron(pn.basis, I4)
    dom_proj = kron(I4, pn.projector)
    cod_proj = kron(pn.projector, I4)
    seen: list[LinearOperator] = []
    flat_rows: dict[tuple[int, int], FieldElement] = {}
    dd = dom_basis.cols
    for diag in enumerate_tl(n + 2, n + 2):
        op = evaluate(DiagramSum.from_diagram(diag))
        sandwich = compose_all(cod_proj, op, dom_proj)
        restricted = restrict_map(sandwich, dom_basis, cod_basis)
        if restricted.is_zero():
            continue
        k = len(seen)
        probe = dict(flat_rows)
        for (i, j), val in restricted.entries.items():
            probe[(k, i * dd + j)] = val
        if rank(LinearOperator(k + 1, dd * dd, probe)) > k:
            seen.append(restricted)
            flat_rows = probe
    dom_gens = _tensor_module_gens(n, module_first=False)
    cod_gens = _tensor_module_gens(n, module_first=True)
    dim = hom_dimension_certified(dom_gens, cod_gens, seen)
    assert dim == len(seen)
    return seen


@lru_cache(maxsize=None)
def _tensor_module_gens(n: int, module_first: bool) -> dict[str, LinearOperator]:
    """Generator actions on V_n⊗(V1⊗V1) or (V1⊗V1)⊗V_n, restricted."""
    pn = qmodule(n)
    I4 = LinearOperator.identity(4)
    act = uq_action(n + 2)
    if module_first:
        basis = kron(pn.basis, I4)
    else:
        basis = kron(I4, pn.basis)
    return {
        name: restrict_map(getattr(act, name), basis, basis) for name in ("E", "F", "K")
    }


@lru_cache(maxsize=None)
def quantum_bracket() -> LinearOperator:
    """The canonical product on the deformed adjoint module, V_2⊗V_2 -> V_2.

    Built as p∘(1⊗cap⊗1) between projector images; uniqueness up to scale is
    certified by solving the equivariance system on the restricted spaces.
    """
    iw = basic_intertwiners()
    p2 = qmodule(2)
    mid = strand_place(iw.eps1, 2, 4)
    raw = compose_all(p2.projector, mid, kron(p2.projector, p2.projector))
    op = restrict_map(raw, kron(p2.basis, p2.basis), p2.basis)
    if op.is_zero():
        raise InvarianceError("bracket evaluated to zero")
    dom = {
        name: restrict_map(
            getattr(uq_action(4), name), kron(p2.basis, p2.basis), kron(p2.basis, p2.basis)
        )
        for name in ("E", "F", "K")
    }
    cod = p2.generators()
    space = intertwiner_space(dom, cod)
    if len(space) != 1:
        raise InvarianceError(f"bracket space has dimension {len(space)}, expected 1")
    return op


def isotypic_multiplicities(n: int) -> dict[int, int]:
    """Multiplicity of each V_k inside V1^⊗n, by the equivariant solver."""
    out = {}
    amb = uq_action(n)
    amb_gens = {name: getattr(amb, name) for name in ("E", "F", "K")}
    for k in range(n % 2, n + 1, 2):
        mod = qmodule(k)
        sols = intertwiner_space(mod.generators(), amb_gens)
        if sols:
            out[k] = len(sols)
    return out


# ---------------------------------------------------------------------------
# Named-operator registry for dumps
# ---------------------------------------------------------------------------


def operator_registry() -> dict[str, callable]:
    """Named constructors for every dump-able operator."""
    iw = basic_intertwiners

    reg: dict[str, callable] = {
        "eps1": lambda: basic_intertwiners().eps1,
        "delta1": lambda: basic_intertwiners().delta1,
        "rhat11": lambda: basic_intertwiners().rhat11,
        "rhat11_inv": lambda: basic_intertwiners().rhat11_inv,
        "bracket_q": quantum_bracket,
    }
    for n in range(1, 5):
        reg[f"p{n}"] = (lambda k: lambda: evaluate(jones_wenzl(k)))(n)
    for m in range(1, 4):
        for n in range(1, 4):
            reg[f"cable_{m}_{n}"] = (lambda a, b: lambda: cabled_braiding(a, b))(m, n)
    return reg
