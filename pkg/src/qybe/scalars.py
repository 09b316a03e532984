"""Exact arithmetic in the rational-function field Q(v, lam, mu).

Every scalar in this package is a :class:`FieldElement`: a quotient of two
integer-coefficient polynomials in the indeterminates ``v``, ``lam``, ``mu``,
kept in a canonical reduced form.  ``v`` plays the role of a square root of
the deformation parameter (q = v^2), so Laurent expressions in q and q^(1/2)
are ordinary fractions here; ``lam`` and ``mu`` are the spectral parameters.

Polynomials are dicts mapping a packed exponent key to a nonzero int
coefficient.  The key packs (e_v, e_lam, e_mu) into a single int with v in
the most significant field, so plain integer comparison of keys is exactly
lexicographic order on (v, lam, mu) with degrees descending.  Negative
exponents are never stored; Laurent behavior lives in the denominator.
"""

from __future__ import annotations

from math import gcd as _int_gcd

__all__ = [
    "FieldElement",
    "PoleError",
    "ZERO",
    "ONE",
    "V",
    "LAM",
    "MU",
    "qint",
    "q_power",
    "v_power",
    "parse_scalar",
]

VAR_NAMES = ("v", "lam", "mu")

_SHIFT = (48, 24, 0)
_FIELD_MASK = (1 << 24) - 1
_MAX_EXP = _FIELD_MASK


class PoleError(ArithmeticError):
    """A substitution hit a genuine pole (denominator vanished)."""


# ---------------------------------------------------------------------------
# Polynomial layer: dict[packed exponent key -> nonzero int coefficient].
# The empty dict is the zero polynomial.
# ---------------------------------------------------------------------------


def _pack(ev: int, el: int, em: int) -> int:
    return (ev << 48) | (el << 24) | em


def _unpack(key: int) -> tuple[int, int, int]:
    return (key >> 48, (key >> 24) & _FIELD_MASK, key & _FIELD_MASK)


def _padd(a: dict, b: dict) -> dict:
    if not a:
        return dict(b)
    if not b:
        return dict(a)
    out = dict(a)
    for k, c in b.items():
        s = out.get(k, 0) + c
        if s:
            out[k] = s
        else:
            del out[k]
    return out


def _pneg(a: dict) -> dict:
    return {k: -c for k, c in a.items()}


def _psub(a: dict, b: dict) -> dict:
    out = dict(a)
    for k, c in b.items():
        s = out.get(k, 0) - c
        if s:
            out[k] = s
        else:
            del out[k]
    return out


def _pscale(a: dict, c: int) -> dict:
    if c == 0:
        return {}
    if c == 1:
        return a
    return {k: c * ck for k, ck in a.items()}


def _pmul(a: dict, b: dict) -> dict:
    if not a or not b:
        return {}
    if len(a) > len(b):
        a, b = b, a
    if len(a) == 1:
        ((ka, ca),) = a.items()
        if ka == 0:
            return _pscale(b, ca) if ca != 1 else dict(b)
        return {kb + ka: cb * ca for kb, cb in b.items()}
    out: dict = {}
    for ka, ca in a.items():
        for kb, cb in b.items():
            k = ka + kb
            s = out.get(k, 0) + ca * cb
            if s:
                out[k] = s
            else:
                del out[k]
    return out


def _pcontent(a: dict) -> int:
    g = 0
    for c in a.values():
        g = _int_gcd(g, c)
        if g == 1:
            return 1
    return g


def _pdivide_int(a: dict, n: int) -> dict:
    if n == 1:
        return a
    return {k: c // n for k, c in a.items()}


def _plead(a: dict) -> int:
    return max(a)


def _pdeg(a: dict, var: int) -> int:
    if not a:
        return -1
    sh = _SHIFT[var]
    return max((k >> sh) & _FIELD_MASK for k in a)


def _pvars(a: dict) -> tuple[bool, bool, bool]:
    sv = sl = sm = False
    for k in a:
        if k >> 48:
            sv = True
        if (k >> 24) & _FIELD_MASK:
            sl = True
        if k & _FIELD_MASK:
            sm = True
        if sv and sl and sm:
            break
    return sv, sl, sm


def _ptry_div(a: dict, b: dict) -> dict | None:
    """Exact division a / b over Z[v, lam, mu]; None if not exact."""
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    if not a:
        return {}
    if len(b) == 1:
        ((kb, cb),) = b.items()
        ebv, ebl, ebm = _unpack(kb)
        out = {}
        for k, c in a.items():
            ev, el, em = _unpack(k)
            if ev < ebv or el < ebl or em < ebm or c % cb:
                return None
            out[_pack(ev - ebv, el - ebl, em - ebm)] = c // cb
        return out
    kb = max(b)
    cb = b[kb]
    ebv, ebl, ebm = _unpack(kb)
    rem = dict(a)
    quo: dict = {}
    while rem:
        kr = max(rem)
        cr = rem[kr]
        ev, el, em = _unpack(kr)
        if ev < ebv or el < ebl or em < ebm or cr % cb:
            return None
        qk = _pack(ev - ebv, el - ebl, em - ebm)
        qc = cr // cb
        quo[qk] = qc
        for k, c in b.items():
            kk = k + qk
            s = rem.get(kk, 0) - qc * c
            if s:
                rem[kk] = s
            else:
                del rem[kk]
    return quo


def _pcoeffs_in(a: dict, var: int) -> dict[int, dict]:
    """Split a into {exponent of var: coefficient poly without var}."""
    sh = _SHIFT[var]
    strip = ~(_FIELD_MASK << sh)
    out: dict[int, dict] = {}
    for k, c in a.items():
        e = (k >> sh) & _FIELD_MASK
        out.setdefault(e, {})[k & strip] = c
    return out


def _pattach(coeff: dict, var: int, e: int) -> dict:
    sh = _SHIFT[var]
    add = e << sh
    return {k + add: c for k, c in coeff.items()}


def _prem(f: dict, g: dict, var: int) -> dict:
    """Pseudo-remainder of f by g with respect to var."""
    df = _pdeg(f, var)
    dg = _pdeg(g, var)
    gc = _pcoeffs_in(g, var)
    lc_g = gc[dg]
    r = f
    while r and (dr := _pdeg(r, var)) >= dg:
        rc = _pcoeffs_in(r, var)
        lc_r = rc[dr]
        r = _psub(_pmul(r, lc_g), _pmul(_pattach(lc_r, var, dr - dg), g))
    return r


def _psign_norm(a: dict) -> dict:
    """Flip signs so the lex-leading coefficient is positive."""
    if a and a[max(a)] < 0:
        return _pneg(a)
    return a


def _pprimitive(a: dict, var: int) -> tuple[dict, dict]:
    """Return (content, primitive part) of a as a polynomial in var."""
    coeffs = list(_pcoeffs_in(a, var).values())
    cont = coeffs[0]
    for c in coeffs[1:]:
        if cont == {0: 1}:
            break
        cont = _pgcd(cont, c)
    pp = _ptry_div(a, cont)
    return cont, pp


def _pgcd(a: dict, b: dict) -> dict:
    """GCD over Z[v, lam, mu] by content/primitive-part recursion.

    The result has a positive lex-leading coefficient and includes the
    integer content gcd.
    """
    if not a:
        return _psign_norm(dict(b))
    if not b:
        return _psign_norm(dict(a))
    ca = _pcontent(a)
    cb = _pcontent(b)
    c = _int_gcd(ca, cb)
    if len(a) == 1 or len(b) == 1:
        ev = el = em = _MAX_EXP
        for k in a:
            x, y, z = _unpack(k)
            ev = min(ev, x)
            el = min(el, y)
            em = min(em, z)
        for k in b:
            x, y, z = _unpack(k)
            ev = min(ev, x)
            el = min(el, y)
            em = min(em, z)
        return {_pack(ev, el, em): c}
    if a == b:
        return _psign_norm(dict(a))
    # Trial division: a multiple/divisor pair is the common case when
    # reducing fractions built from structured denominators.
    if len(a) >= len(b):
        q = _ptry_div(a, b)
        if q is not None:
            return _psign_norm(dict(b))
    if len(b) > len(a):
        q = _ptry_div(b, a)
        if q is not None:
            return _psign_norm(dict(a))

    va = _pvars(a)
    vb = _pvars(b)
    var = -1
    best = -1
    for i in range(3):
        if va[i] or vb[i]:
            d = _pdeg(a, i) + _pdeg(b, i)
            if best < 0 or d < best:
                best = d
                var = i
    if var < 0:
        return {0: c}

    a = _pdivide_int(a, ca)
    b = _pdivide_int(b, cb)
    cont_a, f = _pprimitive(a, var)
    cont_b, g = _pprimitive(b, var)
    cont = _pgcd(cont_a, cont_b)
    if _pdeg(f, var) < _pdeg(g, var):
        f, g = g, f
    while True:
        r = _prem(f, g, var)
        if not r:
            break
        if _pdeg(r, var) == 0:
            g = {0: 1}
            break
        f, g = g, _pprimitive(r, var)[1]
    out = _pscale(_pmul(cont, _psign_norm(g)), c)
    return _psign_norm(out)


def _psubstitute(a: dict, var: int, value: "FieldElement") -> "FieldElement":
    """Evaluate polynomial a at var := value by Horner's rule."""
    coeffs = sorted(_pcoeffs_in(a, var).items())
    acc = ZERO
    prev = None
    for e, coeff in reversed(coeffs):
        if prev is not None:
            acc = acc * value ** (prev - e)
        acc = acc + FieldElement._make(coeff, _P_ONE)
        prev = e
    if prev:
        acc = acc * value**prev
    return acc


_P_ONE = {0: 1}


# ---------------------------------------------------------------------------
# Field elements
# ---------------------------------------------------------------------------


class FieldElement:
    """A canonical fraction of integer polynomials in (v, lam, mu).

    Canonical form: numerator and denominator share no polynomial factor
    (integer content included), and the denominator's lex-leading
    coefficient is positive.  Equality of canonical forms is plain dict
    equality, so ``==`` and ``hash`` are exact and cheap.

    Instances are immutable and may be shared freely between workers.
    """

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: int = 0, den: int = 1):
        if den == 0:
            raise ZeroDivisionError("field element with zero denominator")
        if num == 0:
            self.num, self.den = {}, _P_ONE
            self._hash = None
            return
        if den < 0:
            num, den = -num, -den
        g = _int_gcd(num, den)
        self.num = {0: num // g}
        self.den = {0: den // g} if den != g else _P_ONE
        self._hash = None

    @classmethod
    def _make(cls, num: dict, den: dict) -> "FieldElement":
        self = object.__new__(cls)
        if not den:
            raise ZeroDivisionError("field element with zero denominator")
        if not num:
            self.num, self.den = {}, _P_ONE
            self._hash = None
            return self
        if den != _P_ONE and num != _P_ONE:
            g = _pgcd(num, den)
            if g != _P_ONE:
                num = _ptry_div(num, g)
                den = _ptry_div(den, g)
        if den[max(den)] < 0:
            num = _pneg(num)
            den = _pneg(den)
        self.num, self.den = num, den
        self._hash = None
        return self

    @classmethod
    def _raw(cls, num: dict, den: dict) -> "FieldElement":
        """Trusted constructor: inputs already canonical."""
        self = object.__new__(cls)
        self.num, self.den = num, den
        self._hash = None
        return self

    @classmethod
    def monomial(cls, var: str, exp: int = 1) -> "FieldElement":
        i = VAR_NAMES.index(var)
        if exp >= 0:
            return cls._raw({_pack(*(exp if j == i else 0 for j in range(3))): 1}, _P_ONE)
        return cls._raw(_P_ONE, {_pack(*(-exp if j == i else 0 for j in range(3))): 1})

    # -- predicates ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.num

    def is_one(self) -> bool:
        return self.num == _P_ONE and self.den == _P_ONE

    def is_rational(self) -> bool:
        num_const = not self.num or (len(self.num) == 1 and 0 in self.num)
        den_const = len(self.den) == 1 and 0 in self.den
        return num_const and den_const

    def uses_var(self, var: str) -> bool:
        i = VAR_NAMES.index(var)
        return _pvars(self.num)[i] or _pvars(self.den)[i]

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.num:
            return other
        if not other.num:
            return self
        na, da, nb, db = self.num, self.den, other.num, other.den
        if da == db:
            return FieldElement._make(_padd(na, nb), da)
        g1 = _pgcd(da, db)
        if g1 == _P_ONE:
            num = _padd(_pmul(na, db), _pmul(nb, da))
            if not num:
                return ZERO
            return FieldElement._raw(num, _pmul(da, db))
        da2 = _ptry_div(da, g1)
        db2 = _ptry_div(db, g1)
        t = _padd(_pmul(na, db2), _pmul(nb, da2))
        if not t:
            return ZERO
        g2 = _pgcd(t, g1)
        if g2 == _P_ONE:
            return FieldElement._raw(t, _pmul(da, db2))
        num = _ptry_div(t, g2)
        den = _pmul(_ptry_div(da, g2), db2)
        if den[max(den)] < 0:
            num, den = _pneg(num), _pneg(den)
        return FieldElement._raw(num, den)

    __radd__ = __add__

    def __neg__(self):
        if not self.num:
            return self
        return FieldElement._raw(_pneg(self.num), self.den)

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not self.num or not other.num:
            return ZERO
        if self.is_one():
            return other
        if other.is_one():
            return self
        na, da, nb, db = self.num, self.den, other.num, other.den
        g1 = _pgcd(na, db)
        g2 = _pgcd(nb, da)
        if g1 != _P_ONE:
            na = _ptry_div(na, g1)
            db = _ptry_div(db, g1)
        if g2 != _P_ONE:
            nb = _ptry_div(nb, g2)
            da = _ptry_div(da, g2)
        num = _pmul(na, nb)
        den = _pmul(da, db)
        if den[max(den)] < 0:
            num, den = _pneg(num), _pneg(den)
        return FieldElement._raw(num, den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if not other.num:
            raise ZeroDivisionError("division by zero field element")
        nd, dd = other.den, other.num
        if dd[max(dd)] < 0:
            nd, dd = _pneg(nd), _pneg(dd)
        return self * FieldElement._raw(nd, dd)

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n == 0:
            return ONE
        base = self
        if n < 0:
            if not self.num:
                raise ZeroDivisionError("negative power of zero")
            base = FieldElement._make(self.den, self.num)
            n = -n
        acc = ONE
        while n:
            if n & 1:
                acc = acc * base
            base = base * base if n > 1 else base
            n >>= 1
        return acc

    # -- structure ----------------------------------------------------------

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((tuple(sorted(self.num.items())), tuple(sorted(self.den.items()))))
            self._hash = h
        return h

    def __bool__(self):
        return bool(self.num)

    def substitute(self, var: str, value) -> "FieldElement":
        """Exact substitution var := value, then canonicalize.

        Canonical form already cancels removable factors, so a vanishing
        denominator here is a genuine pole and raises :class:`PoleError`.
        """
        value = _coerce(value)
        if value is NotImplemented:
            raise TypeError("substitute needs a FieldElement or int value")
        i = VAR_NAMES.index(var)
        if not (_pvars(self.num)[i] or _pvars(self.den)[i]):
            return self
        num = _psubstitute(self.num, i, value)
        den = _psubstitute(self.den, i, value)
        if den.is_zero():
            raise PoleError(f"pole at {var} = {value}")
        return num / den

    def as_fraction(self) -> tuple[int, int]:
        """Return (p, q) if the element is a rational constant."""
        if self.num and (len(self.num) > 1 or max(self.num) != 0):
            raise ValueError(f"not a rational constant: {self}")
        if len(self.den) > 1 or max(self.den) != 0:
            raise ValueError(f"not a rational constant: {self}")
        return (self.num.get(0, 0), self.den[0])

    # -- printing -----------------------------------------------------------

    def __str__(self):
        if not self.num:
            return "0"
        ns = _poly_str(self.num)
        if self.den == _P_ONE:
            return ns
        return f"({ns})/({_poly_str(self.den)})"

    def __repr__(self):
        return f"FieldElement({self})"


def _coerce(x):
    if isinstance(x, FieldElement):
        return x
    if isinstance(x, int):
        if x == 0:
            return ZERO
        if x == 1:
            return ONE
        return FieldElement(x)
    return NotImplemented


def _poly_str(p: dict) -> str:
    parts = []
    for k in sorted(p, reverse=True):
        c = p[k]
        ev, el, em = _unpack(k)
        factors = []
        for name, e in zip(VAR_NAMES, (ev, el, em)):
            if e == 1:
                factors.append(name)
            elif e > 1:
                factors.append(f"{name}^{e}")
        if not factors:
            term = str(abs(c))
        elif abs(c) == 1:
            term = "*".join(factors)
        else:
            term = "*".join([str(abs(c))] + factors)
        if not parts:
            parts.append(("-" if c < 0 else "") + term)
        else:
            parts.append(("-" if c < 0 else "+") + term)
    return "".join(parts)


ZERO = FieldElement._raw({}, _P_ONE)
ONE = FieldElement._raw({0: 1}, _P_ONE)
V = FieldElement.monomial("v")
LAM = FieldElement.monomial("lam")
MU = FieldElement.monomial("mu")


def v_power(k: int) -> FieldElement:
    """v^k as a field element, for any integer k."""
    return FieldElement.monomial("v", 1) ** k if k >= 0 else FieldElement.monomial("v", k)


def q_power(k: int) -> FieldElement:
    """q^k with q = v^2, for any integer k (half-integers use v_power)."""
    return v_power(2 * k)


def qint(n: int) -> FieldElement:
    """The balanced quantum integer (q^n - q^-n)/(q - q^-1) with q = v^2.

    A Laurent polynomial in q: q^(n-1) + q^(n-3) + ... + q^(1-n).
    """
    if n < 1:
        raise ValueError(f"quantum integer needs n >= 1, got {n}")
    num = {_pack(4 * k, 0, 0): 1 for k in range(n)}
    den = {_pack(2 * (n - 1), 0, 0): 1}
    return FieldElement._make(num, den)


# ---------------------------------------------------------------------------
# Parsing of canonical (and general arithmetic) scalar strings
# ---------------------------------------------------------------------------


class _Parser:
    """Recursive-descent parser for +, -, *, /, ^, parentheses, ints, vars."""

    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg: str):
        raise ValueError(f"bad scalar {self.text!r} at position {self.pos}: {msg}")

    def peek(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def expr(self) -> FieldElement:
        c = self.peek()
        if c == "-":
            self.pos += 1
            acc = -self.term()
        else:
            acc = self.term()
        while (c := self.peek()) and c in "+-":
            self.pos += 1
            t = self.term()
            acc = acc + t if c == "+" else acc - t
        return acc

    def term(self) -> FieldElement:
        acc = self.factor()
        while (c := self.peek()) and c in "*/":
            self.pos += 1
            f = self.factor()
            if c == "*":
                acc = acc * f
            else:
                if f.is_zero():
                    self.error("division by zero")
                acc = acc / f
        return acc

    def factor(self) -> FieldElement:
        base = self.atom()
        if self.peek() == "^":
            self.pos += 1
            neg = False
            if self.peek() == "-":
                neg = True
                self.pos += 1
            e = self.integer()
            base = base ** (-e if neg else e)
        return base

    def atom(self) -> FieldElement:
        c = self.peek()
        if c == "(":
            self.pos += 1
            inner = self.expr()
            if self.peek() != ")":
                self.error("expected ')'")
            self.pos += 1
            return inner
        if c.isdigit():
            return FieldElement(self.integer())
        if c.isalpha():
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isalpha():
                self.pos += 1
            name = self.text[start : self.pos]
            if name not in VAR_NAMES:
                self.error(f"unknown variable {name!r}")
            return FieldElement.monomial(name)
        self.error("expected a term")

    def integer(self) -> int:
        c = self.peek()
        if not c.isdigit():
            self.error("expected an integer")
        start = self.pos
        while self.pos < len(self.text) and self.text[self.pos].isdigit():
            self.pos += 1
        return int(self.text[start : self.pos])


def parse_scalar(text: str) -> FieldElement:
    """Parse a scalar string, accepting the canonical output format."""
    p = _Parser(text)
    out = p.expr()
    if p.peek():
        p.error("trailing input")
    return out
