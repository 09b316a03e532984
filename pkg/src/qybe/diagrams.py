"""Planar diagram calculus: matchings, crossings, skein resolution, projectors.

A :class:`PlanarDiagram` is a crossingless perfect matching between m points
on a top line and n points on a bottom line.  Points are numbered 1..m on
top (left to right) and m+1..m+n on the bottom (left to right); the diagram
is the intertwiner's picture read downward, so the top line is the domain.

A :class:`DiagramSum` is a formal linear combination of planar diagrams over
the scalar field, together with the regime's loop value: every closed circle
produced while stacking is removed and multiplies the coefficient by the
loop value (-q - q^-1 in the quantum regime, -2 in the classical one).

Crossings live in :class:`Tangle`, a top-to-bottom word of elementary slices
(cap, cup, positive or negative crossing); :func:`skein_resolve` expands the
crossings into cup-cap and identity terms, producing a crossing-free
DiagramSum.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .linops import LinearOperator, ShapeError, nullspace, solve_right
from .scalars import ONE, ZERO, FieldElement, q_power, qint, v_power

__all__ = [
    "PlanarDiagram",
    "DiagramSum",
    "Tangle",
    "enumerate_tl",
    "diagram_compose",
    "skein_resolve",
    "jones_wenzl",
    "evaluate",
    "identity_diagram",
    "e_diagram",
    "cap_diagram",
    "cup_diagram",
    "braid_word",
    "cable_word",
]

QUANTUM = "quantum"
CLASSICAL = "classical"


def loop_value(regime: str) -> FieldElement:
    if regime == QUANTUM:
        return -qint(2)
    if regime == CLASSICAL:
        return FieldElement(-2)
    raise ValueError(f"unknown regime {regime!r}")


# ---------------------------------------------------------------------------
# Planar diagrams
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PlanarDiagram:
    """A crossingless (m, n) matching in canonical pair encoding."""

    m: int
    n: int
    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if (self.m + self.n) % 2:
            raise ShapeError(f"odd total boundary {self.m}+{self.n}")
        pairs = tuple(sorted(tuple(sorted(p)) for p in self.pairs))
        object.__setattr__(self, "pairs", pairs)
        points = [x for p in pairs for x in p]
        if sorted(points) != list(range(1, self.m + self.n + 1)):
            raise ShapeError(f"not a perfect matching of {self.m}+{self.n} points: {pairs}")
        if not self._is_planar():
            raise ShapeError(f"matching is not planar: {pairs}")

    def _circular_position(self, p: int) -> int:
        # boundary walk: across the top, then back across the bottom
        if p <= self.m:
            return p - 1
        return self.m + (self.m + self.n - p)

    def _is_planar(self) -> bool:
        total = self.m + self.n
        match = {}
        for a, b in self.pairs:
            match[self._circular_position(a)] = self._circular_position(b)
            match[self._circular_position(b)] = self._circular_position(a)
        stack: list[int] = []
        for pos in range(total):
            if stack and stack[-1] == match[pos]:
                stack.pop()
            elif match[pos] > pos:
                stack.append(pos)
            else:
                return False
        return not stack

    def partner(self, p: int) -> int:
        for a, b in self.pairs:
            if a == p:
                return b
            if b == p:
                return a
        raise KeyError(p)

    def through_count(self) -> int:
        return sum(1 for a, b in self.pairs if a <= self.m < b)

    def to_json_dict(self) -> dict:
        return {"top": self.m, "bottom": self.n, "pairs": [list(p) for p in self.pairs], "crossings": []}

    @classmethod
    def from_json_dict(cls, data: dict) -> "PlanarDiagram":
        return cls(int(data["top"]), int(data["bottom"]), tuple((int(a), int(b)) for a, b in data["pairs"]))


def identity_diagram(n: int) -> PlanarDiagram:
    return PlanarDiagram(n, n, tuple((i, n + i) for i in range(1, n + 1)))


def cap_diagram() -> PlanarDiagram:
    """Two top points joined: the evaluation V1⊗V1 -> scalars."""
    return PlanarDiagram(2, 0, ((1, 2),))


def cup_diagram() -> PlanarDiagram:
    """Two bottom points joined: the coevaluation scalars -> V1⊗V1."""
    return PlanarDiagram(0, 2, ((1, 2),))


def e_diagram(i: int, n: int) -> PlanarDiagram:
    """The cup-cap generator on strands i, i+1 of n."""
    if not 1 <= i < n:
        raise ShapeError(f"generator index {i} out of range for {n} strands")
    pairs = [(i, i + 1), (n + i, n + i + 1)]
    for j in range(1, n + 1):
        if j != i and j != i + 1:
            pairs.append((j, n + j))
    return PlanarDiagram(n, n, tuple(pairs))


def _enumerate_circular(points: tuple[int, ...]) -> list[tuple[tuple[int, int], ...]]:
    """All non-crossing perfect matchings of points given in circular order."""
    if not points:
        return [()]
    out = []
    first, rest = points[0], points[1:]
    for k in range(0, len(rest), 2):
        inner, outer = rest[:k], rest[k + 1 :]
        for mi in _enumerate_circular(inner):
            for mo in _enumerate_circular(outer):
                out.append(((first, rest[k]),) + mi + mo)
    return out


@lru_cache(maxsize=None)
def enumerate_tl(m: int, n: int) -> tuple[PlanarDiagram, ...]:
    """All planar (m, n) diagrams, ordered by canonical pair encoding."""
    if (m + n) % 2:
        raise ShapeError(f"odd total boundary {m}+{n}")
    circ = tuple(range(1, m + 1)) + tuple(range(m + n, m, -1))
    diags = [PlanarDiagram(m, n, pairs) for pairs in _enumerate_circular(circ)]
    return tuple(sorted(diags, key=lambda d: d.pairs))


def _stack_pairs(
    top: PlanarDiagram, bottom: PlanarDiagram
) -> tuple[tuple[tuple[int, int], ...], int]:
    """Glue top's bottom row to bottom's top row; return (pairs, loops).

    Interface point i (1..k) identifies top's point m+i with bottom's
    point i.  Paths are traced from each outer boundary point; interface
    points not on any such path lie on closed loops.
    """
    k = top.n
    m, n = top.m, bottom.n
    t_inv: dict[int, int] = {}
    for a, b in top.pairs:
        t_inv[a], t_inv[b] = b, a
    b_inv: dict[int, int] = {}
    for a, b in bottom.pairs:
        b_inv[a], b_inv[b] = b, a

    visited_mid: set[int] = set()  # interface indices 1..k
    pairs = []
    resolved: set[tuple[str, int]] = set()
    starts = [("t", p) for p in range(1, m + 1)] + [("b", p) for p in range(k + 1, k + n + 1)]

    def out_label(side: str, p: int) -> int:
        return p if side == "t" else m + (p - k)

    for start in starts:
        if start in resolved:
            continue
        side, p = start
        while True:
            p = (t_inv if side == "t" else b_inv)[p]
            if (side == "t" and p <= m) or (side == "b" and p > k):
                resolved.add((side, p))
                pairs.append((out_label(*start), out_label(side, p)))
                break
            if side == "t":
                i = p - m
                visited_mid.add(i)
                side, p = "b", i
            else:
                i = p
                visited_mid.add(i)
                side, p = "t", m + i
    loops = 0
    for i in range(1, k + 1):
        if i in visited_mid:
            continue
        loops += 1
        j = i
        while True:
            visited_mid.add(j)
            j2 = t_inv[m + j] - m  # arc through the top diagram
            visited_mid.add(j2)
            j = b_inv[j2]  # arc through the bottom diagram
            if j == i:
                break
    return tuple(pairs), loops


# ---------------------------------------------------------------------------
# Diagram sums
# ---------------------------------------------------------------------------


class DiagramSum:
    """A formal scalar combination of planar (m, n) diagrams."""

    __slots__ = ("m", "n", "terms", "regime")

    def __init__(self, m: int, n: int, terms=None, regime: str = QUANTUM):
        self.m = m
        self.n = n
        self.regime = regime
        clean: dict[PlanarDiagram, FieldElement] = {}
        if terms:
            for diag, coeff in terms.items():
                if (diag.m, diag.n) != (m, n):
                    raise ShapeError(f"diagram of type ({diag.m},{diag.n}) in a ({m},{n}) sum")
                if not isinstance(coeff, FieldElement):
                    coeff = FieldElement(coeff)
                if not coeff.is_zero():
                    clean[diag] = clean.get(diag, ZERO) + coeff
        self.terms = {d: c for d, c in clean.items() if not c.is_zero()}

    @property
    def loop_value(self) -> FieldElement:
        return loop_value(self.regime)

    @classmethod
    def from_diagram(cls, diag: PlanarDiagram, regime: str = QUANTUM, coeff=ONE) -> "DiagramSum":
        return cls(diag.m, diag.n, {diag: coeff}, regime)

    @classmethod
    def identity(cls, n: int, regime: str = QUANTUM) -> "DiagramSum":
        return cls.from_diagram(identity_diagram(n), regime)

    @classmethod
    def e(cls, i: int, n: int, regime: str = QUANTUM) -> "DiagramSum":
        return cls.from_diagram(e_diagram(i, n), regime)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, DiagramSum):
            return NotImplemented
        return (self.m, self.n, self.regime) == (other.m, other.n, other.regime) and self.terms == other.terms

    def __add__(self, other: "DiagramSum") -> "DiagramSum":
        if (self.m, self.n, self.regime) != (other.m, other.n, other.regime):
            raise ShapeError("cannot add diagram sums of different type or regime")
        terms = dict(self.terms)
        for d, c in other.terms.items():
            terms[d] = terms.get(d, ZERO) + c
        return DiagramSum(self.m, self.n, terms, self.regime)

    def __sub__(self, other: "DiagramSum") -> "DiagramSum":
        return self + other.scale(FieldElement(-1))

    def scale(self, c) -> "DiagramSum":
        if not isinstance(c, FieldElement):
            c = FieldElement(c)
        return DiagramSum(self.m, self.n, {d: v * c for d, v in self.terms.items()}, self.regime)

    def then(self, lower: "DiagramSum") -> "DiagramSum":
        """Stack self above lower, removing closed loops."""
        return diagram_compose(self, lower)

    def tensor(self, right: "DiagramSum") -> "DiagramSum":
        if self.regime != right.regime:
            raise ShapeError("regime mismatch in tensor")
        out: dict[PlanarDiagram, FieldElement] = {}
        for d1, c1 in self.terms.items():
            for d2, c2 in right.terms.items():
                def shift(p: int) -> int:
                    # interleave: left's points keep rows, right's shift within rows
                    if p <= d2.m:
                        return p + d1.m
                    return p + d1.m + d1.n
                pairs = list(d1.pairs)
                pairs = [
                    (a if a <= d1.m else a + d2.m, b if b <= d1.m else b + d2.m)
                    for a, b in pairs
                ]
                pairs += [(shift(a), shift(b)) for a, b in d2.pairs]
                d = PlanarDiagram(d1.m + d2.m, d1.n + d2.n, tuple(pairs))
                out[d] = out.get(d, ZERO) + c1 * c2
        return DiagramSum(self.m + right.m, self.n + right.n, out, self.regime)

    def to_json_dict(self) -> dict:
        return {
            "top": self.m,
            "bottom": self.n,
            "regime": self.regime,
            "terms": [
                {"pairs": [list(p) for p in d.pairs], "coeff": str(c)}
                for d, c in sorted(self.terms.items(), key=lambda t: t[0].pairs)
            ],
        }

    def __repr__(self):
        return f"DiagramSum(({self.m},{self.n}), {len(self.terms)} terms, {self.regime})"


def diagram_compose(d1: DiagramSum, d2: DiagramSum) -> DiagramSum:
    """Stack d1 above d2 (d1's bottom glued to d2's top).

    Reading diagrams downward, d1 is applied first; under :func:`evaluate`
    this is ``evaluate(d2) ∘ evaluate(d1)`` in function order.
    """
    if d1.n != d2.m:
        raise ShapeError(f"stack: bottom arity {d1.n} != top arity {d2.m}")
    if d1.regime != d2.regime:
        raise ShapeError("regime mismatch in composition")
    loop = d1.loop_value
    out: dict[PlanarDiagram, FieldElement] = {}
    for top, c1 in d1.terms.items():
        for bot, c2 in d2.terms.items():
            pairs, loops = _stack_pairs(top, bot)
            diag = PlanarDiagram(d1.m, d2.n, pairs)
            coeff = c1 * c2 * loop**loops if loops else c1 * c2
            out[diag] = out.get(diag, ZERO) + coeff
    return DiagramSum(d1.m, d2.n, out, d1.regime)


# ---------------------------------------------------------------------------
# Tangles: slice words with crossings
# ---------------------------------------------------------------------------

_SLICE_KINDS = ("cap", "cup", "x+", "x-")


@dataclass(frozen=True)
class Tangle:
    """A crossing-decorated diagram as a top-to-bottom word of slices.

    Each slice acts at strand position ``pos`` (1-based): ``cap`` joins two
    adjacent strands upward, ``cup`` inserts two new strands, ``x+``/``x-``
    cross two adjacent strands (positive resolves with coefficient q^(1/2)
    on the cup-cap term).
    """

    top: int
    slices: tuple[tuple[str, int], ...]

    def __post_init__(self):
        width = self.top
        for kind, pos in self.slices:
            if kind not in _SLICE_KINDS:
                raise ShapeError(f"unknown slice kind {kind!r}")
            limit = width + 1 if kind == "cup" else width - 1
            if not 1 <= pos <= limit:
                raise ShapeError(f"slice {kind} at {pos} out of range for width {width}")
            width += 2 if kind == "cup" else (-2 if kind == "cap" else 0)

    @property
    def bottom(self) -> int:
        width = self.top
        for kind, _ in self.slices:
            width += 2 if kind == "cup" else (-2 if kind == "cap" else 0)
        return width

    def crossing_count(self) -> int:
        return sum(1 for kind, _ in self.slices if kind in ("x+", "x-"))

    def mirror(self) -> "Tangle":
        """Reverse the word top-to-bottom and flip every crossing."""
        flipped = []
        for kind, pos in reversed(self.slices):
            if kind == "cap":
                flipped.append(("cup", pos))
            elif kind == "cup":
                flipped.append(("cap", pos))
            elif kind == "x+":
                flipped.append(("x-", pos))
            else:
                flipped.append(("x+", pos))
        return Tangle(self.bottom, tuple(flipped))

    def underlying_matching(self) -> tuple[tuple[tuple[int, int], ...], int]:
        """Boundary matching ignoring over/under data; returns (pairs, loops).

        Crossings act as plain strand swaps.  The matching is generally not
        planar.
        """
        parent: dict[int, int] = {}

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        def union(x: int, y: int) -> bool:
            rx, ry = find(x), find(y)
            if rx == ry:
                return False
            parent[rx] = ry
            return True

        wires = list(range(1, self.top + 1))
        for p in wires:
            parent[p] = p
        fresh = self.top + self.bottom
        loops = 0
        for kind, pos in self.slices:
            if kind == "cap":
                if not union(wires[pos - 1], wires[pos]):
                    loops += 1
                del wires[pos - 1 : pos + 1]
            elif kind == "cup":
                fresh += 2
                parent[fresh - 1] = fresh - 1
                parent[fresh] = fresh
                union(fresh - 1, fresh)
                wires[pos - 1 : pos - 1] = [fresh - 1, fresh]
            else:
                wires[pos - 1], wires[pos] = wires[pos], wires[pos - 1]
        for idx, w in enumerate(wires):
            p = self.top + idx + 1
            parent[p] = p
            union(p, w)
        groups: dict[int, list[int]] = {}
        for p in list(range(1, self.top + 1)) + list(
            range(self.top + 1, self.top + self.bottom + 1)
        ):
            groups.setdefault(find(p), []).append(p)
        pairs = tuple(sorted(tuple(sorted(g)) for g in groups.values() if len(g) == 2))
        return pairs, loops

    def to_json_dict(self) -> dict:
        pairs, _ = self.underlying_matching()
        return {
            "top": self.top,
            "bottom": self.bottom,
            "pairs": [list(p) for p in pairs],
            "crossings": [[kind, pos] for kind, pos in self.slices],
        }


def braid_word(width: int, crossings: list[tuple[int, str]]) -> Tangle:
    """A pure braid tangle: crossings [(position, '+'/'-'), ...] top to bottom."""
    return Tangle(width, tuple(("x+" if s == "+" else "x-", p) for p, s in crossings))


def cable_word(m: int, n: int, positive: bool = True) -> Tangle:
    """The m-strand block crossing over the n-strand block (m·n crossings)."""
    slices = []
    sign = "x+" if positive else "x-"
    # move each left strand (rightmost first) across the right block
    for i in range(m, 0, -1):
        for j in range(n):
            slices.append((sign, i + j))
    return Tangle(m + n, tuple(slices))


def _slice_sum(kind: str, pos: int, width: int, regime: str) -> DiagramSum:
    if kind == "cap":
        pairs = [(pos, pos + 1)]
        out = width - 2
        t = 0
        for j in range(1, width + 1):
            if j in (pos, pos + 1):
                continue
            t += 1
            pairs.append((j, width + t))
        return DiagramSum.from_diagram(PlanarDiagram(width, out, tuple(pairs)), regime)
    if kind == "cup":
        out = width + 2
        pairs = [(width + pos, width + pos + 1)]
        for j in range(1, width + 1):
            target = j if j < pos else j + 2
            pairs.append((j, width + target))
        return DiagramSum.from_diagram(PlanarDiagram(width, out, tuple(pairs)), regime)
    if kind in ("x+", "x-"):
        e = DiagramSum.e(pos, width, regime)
        ident = DiagramSum.identity(width, regime)
        if kind == "x+":
            return e.scale(v_power(1)) + ident.scale(v_power(-1))
        return e.scale(v_power(-1)) + ident.scale(v_power(1))
    raise ShapeError(f"unknown slice kind {kind!r}")


def skein_resolve(tangle: Tangle, regime: str = QUANTUM) -> DiagramSum:
    """Expand every crossing of the tangle; the result is crossing-free.

    A positive crossing becomes q^(1/2)·(cup-cap) + q^(-1/2)·(identity); a
    negative crossing is the exact inverse resolution.
    """
    acc = DiagramSum.identity(tangle.top, regime)
    width = tangle.top
    for kind, pos in tangle.slices:
        acc = diagram_compose(acc, _slice_sum(kind, pos, width, regime))
        width += 2 if kind == "cup" else (-2 if kind == "cap" else 0)
    return acc


# ---------------------------------------------------------------------------
# Jones-Wenzl projectors
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def jones_wenzl(n: int, regime: str = QUANTUM) -> DiagramSum:
    """The projector in the n-strand diagram algebra, from its axioms.

    Solved as the unique combination with unit coefficient on the identity
    diagram that is killed by every cup-cap generator on both sides; no
    recursion formula is assumed.
    """
    basis = enumerate_tl(n, n)
    index = {d: k for k, d in enumerate(basis)}
    ident = identity_diagram(n)
    entries: dict[tuple[int, int], FieldElement] = {}
    row = 0
    for i in range(1, n):
        for side in ("left", "right"):
            gen = DiagramSum.e(i, n, regime)
            for k, d in enumerate(basis):
                ds = DiagramSum.from_diagram(d, regime)
                prod = diagram_compose(gen, ds) if side == "left" else diagram_compose(ds, gen)
                for dd, c in prod.terms.items():
                    entries[(row + index[dd], k)] = entries.get((row + index[dd], k), ZERO) + c
            row += len(basis)
    # normalization: identity coefficient is 1
    entries[(row, index[ident])] = ONE
    nrows = row + 1
    mat = LinearOperator(nrows, len(basis), entries)
    rhs = LinearOperator(nrows, 1, {(row, 0): ONE})
    if nullspace(mat):
        raise ShapeError("projector axioms have no unique solution")
    coeffs = solve_right(mat, rhs)
    terms = {d: coeffs[(k, 0)] for k, d in enumerate(basis) if not coeffs[(k, 0)].is_zero()}
    return DiagramSum(n, n, terms, regime)


# ---------------------------------------------------------------------------
# Evaluation to linear operators
# ---------------------------------------------------------------------------


def _arc_weights(regime: str) -> tuple[dict, dict]:
    if regime == QUANTUM:
        cap = {(0, 1): -q_power(1), (1, 0): ONE}
        cup = {(0, 1): ONE, (1, 0): -q_power(-1)}
    else:
        cap = {(0, 1): FieldElement(-1), (1, 0): ONE}
        cup = {(0, 1): ONE, (1, 0): FieldElement(-1)}
    return cap, cup


@lru_cache(maxsize=None)
def evaluate_diagram(diag: PlanarDiagram, regime: str = QUANTUM) -> LinearOperator:
    """State-sum evaluation: caps pair inputs, cups emit weighted pairs."""
    cap_w, cup_w = _arc_weights(regime)
    m, n = diag.m, diag.n
    caps = [(a, b) for a, b in diag.pairs if b <= m]
    cups = [(a - m, b - m) for a, b in diag.pairs if a > m]
    throughs = [(a, b - m) for a, b in diag.pairs if a <= m < b]
    entries: dict[tuple[int, int], FieldElement] = {}
    for col in range(2**m):
        spins = [(col >> (m - 1 - i)) & 1 for i in range(m)]
        coeff = ONE
        dead = False
        for a, b in caps:
            w = cap_w.get((spins[a - 1], spins[b - 1]))
            if w is None:
                dead = True
                break
            coeff = coeff * w
        if dead:
            continue
        out = [0] * n
        for a, b in throughs:
            out[b - 1] = spins[a - 1]
        choices = [(coeff, out)]
        for a, b in cups:
            nxt = []
            for c, o in choices:
                for (sa, sb), w in cup_w.items():
                    o2 = list(o)
                    o2[a - 1], o2[b - 1] = sa, sb
                    nxt.append((c * w, o2))
            choices = nxt
        for c, o in choices:
            row = 0
            for s in o:
                row = (row << 1) | s
            key = (row, col)
            cur = entries.get(key)
            entries[key] = c if cur is None else cur + c
    entries = {k: v for k, v in entries.items() if not v.is_zero()}
    return LinearOperator._raw(2**n, 2**m, entries)


def evaluate(dsum: DiagramSum) -> LinearOperator:
    """Evaluate a crossing-free diagram sum to a sparse exact operator.

    The result maps V1^⊗m (top line) to V1^⊗n (bottom line), so stacking
    top-to-bottom corresponds to composing evaluations in reverse:
    ``evaluate(diagram_compose(d1, d2)) == evaluate(d2) @ evaluate(d1)``.
    """
    out = LinearOperator.zero(2**dsum.n, 2**dsum.m)
    for diag, coeff in dsum.terms.items():
        out = out + evaluate_diagram(diag, dsum.regime).scale(coeff)
    return out
