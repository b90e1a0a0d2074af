"""Sparse multivariate polynomials truncated at a fixed total degree ("jets").

Jets are the carrier for every chart and normal-form computation in this
package.  Coefficients are duck-typed: exact work uses ``int``/``Fraction``
(or :class:`QQi` for Gaussian rationals), floating work uses ``float`` /
``complex``.  A coefficient only needs ``+``, ``*``, unary ``-``, equality
and truthiness (zero tests as falsy).

Design notes
------------
* Canonical sparse form: zero coefficients are never stored, so two jets are
  equal iff their coefficient maps are equal.
* Truncation degree is fixed per jet; products silently discard terms above
  it, which is the semantics of jet arithmetic (not data loss).
* Jets are immutable values and safe to share between workers.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import ConstantTermError, ShapeMismatchError

__all__ = [
    "QQi",
    "Jet",
    "JetVector",
    "jet_add",
    "jet_mul",
    "jet_compose",
    "jet_derivative",
    "jet_eval",
    "jet_sqrt",
    "normalized_coefficient",
    "jet_variables",
]


class QQi:
    """Gaussian rational a + b*i with exact Fraction parts.

    Used to expand the unitary-coordinate substitution exactly; the final
    polynomials must come out with identically zero imaginary parts and
    that cancellation is asserted, so floats are not acceptable there.
    """

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, *a):  # pragma: no cover - immutability guard
        raise AttributeError("QQi is immutable")

    def __add__(self, other):
        other = _as_qqi(other)
        if other is NotImplemented:
            return NotImplemented
        return QQi(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_qqi(other)
        if other is NotImplemented:
            return NotImplemented
        return QQi(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _as_qqi(other)
        if other is NotImplemented:
            return NotImplemented
        return QQi(other.re - self.re, other.im - self.im)

    def __mul__(self, other):
        other = _as_qqi(other)
        if other is NotImplemented:
            return NotImplemented
        return QQi(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __neg__(self):
        return QQi(-self.re, -self.im)

    def conjugate(self):
        return QQi(self.re, -self.im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        other = _as_qqi(other)
        if other is NotImplemented:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"QQi({self.re!r}, {self.im!r})"


def _as_qqi(value):
    if isinstance(value, QQi):
        return value
    if isinstance(value, (int, Fraction)):
        return QQi(value)
    return NotImplemented


def _coeff_to_complex(c) -> complex:
    return complex(c)


class Jet:
    """A polynomial in ``num_vars`` variables truncated at total degree ``trunc_degree``.

    ``coeffs`` maps exponent tuples to nonzero coefficients.  The constructor
    validates the degree invariant and canonicalizes (drops zeros); arithmetic
    goes through internal constructors that already maintain both.
    """

    __slots__ = ("num_vars", "trunc_degree", "_coeffs")

    def __init__(self, num_vars: int, trunc_degree: int, coeffs: Mapping[tuple, object] | None = None):
        if num_vars < 1:
            raise ShapeMismatchError(f"num_vars must be positive, got {num_vars}")
        if trunc_degree < 1:
            raise ShapeMismatchError(f"trunc_degree must be positive, got {trunc_degree}")
        clean: dict[tuple, object] = {}
        for exps, c in (coeffs or {}).items():
            exps = tuple(exps)
            if len(exps) != num_vars or any(e < 0 for e in exps):
                raise ShapeMismatchError(f"bad multi-index {exps} for {num_vars} variables")
            if sum(exps) > trunc_degree:
                raise ShapeMismatchError(
                    f"multi-index {exps} exceeds truncation degree {trunc_degree}"
                )
            if c:
                clean[exps] = c
        object.__setattr__(self, "num_vars", num_vars)
        object.__setattr__(self, "trunc_degree", trunc_degree)
        object.__setattr__(self, "_coeffs", clean)

    def __setattr__(self, *a):  # pragma: no cover - immutability guard
        raise AttributeError("Jet is immutable")

    # -- internal fast constructor (dict already canonical & within degree) --
    @classmethod
    def _raw(cls, num_vars, trunc_degree, coeffs):
        self = object.__new__(cls)
        object.__setattr__(self, "num_vars", num_vars)
        object.__setattr__(self, "trunc_degree", trunc_degree)
        object.__setattr__(self, "_coeffs", coeffs)
        return self

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, num_vars: int, trunc_degree: int) -> "Jet":
        return cls._raw(num_vars, trunc_degree, {})

    @classmethod
    def constant(cls, num_vars: int, trunc_degree: int, value) -> "Jet":
        if not value:
            return cls.zero(num_vars, trunc_degree)
        return cls._raw(num_vars, trunc_degree, {(0,) * num_vars: value})

    @classmethod
    def variable(cls, index: int, num_vars: int, trunc_degree: int, coeff=1) -> "Jet":
        if not 0 <= index < num_vars:
            raise ShapeMismatchError(f"variable index {index} out of range for {num_vars} variables")
        exps = tuple(1 if i == index else 0 for i in range(num_vars))
        return cls._raw(num_vars, trunc_degree, {exps: coeff})

    # -- basic accessors ----------------------------------------------------
    @property
    def coeffs(self) -> Mapping[tuple, object]:
        return dict(self._coeffs)

    def coefficient(self, exps: Sequence[int]):
        """Stored coefficient of the given exponent tuple (0 when absent)."""
        return self._coeffs.get(tuple(exps), 0)

    def constant_term(self):
        return self._coeffs.get((0,) * self.num_vars, 0)

    def degree(self) -> int:
        """Total degree of the stored support (-1 for the zero jet)."""
        return max((sum(e) for e in self._coeffs), default=-1)

    def is_zero(self) -> bool:
        return not self._coeffs

    def sorted_terms(self):
        """Terms in graded-lex order: ascending total degree, then lex on exponents."""
        return sorted(self._coeffs.items(), key=lambda kv: (sum(kv[0]), kv[0]))

    def homogeneous_part(self, degree: int) -> "Jet":
        part = {e: c for e, c in self._coeffs.items() if sum(e) == degree}
        return Jet._raw(self.num_vars, self.trunc_degree, part)

    def truncated(self, trunc_degree: int) -> "Jet":
        """Copy truncated at a (possibly lower or higher) total degree."""
        kept = {e: c for e, c in self._coeffs.items() if sum(e) <= trunc_degree}
        return Jet._raw(self.num_vars, trunc_degree, kept)

    def map_coefficients(self, fn) -> "Jet":
        out = {}
        for e, c in self._coeffs.items():
            v = fn(c)
            if v:
                out[e] = v
        return Jet._raw(self.num_vars, self.trunc_degree, out)

    # -- ring operations ----------------------------------------------------
    def _check_shape(self, other: "Jet"):
        if self.num_vars != other.num_vars or self.trunc_degree != other.trunc_degree:
            raise ShapeMismatchError(
                f"shape mismatch: ({self.num_vars},{self.trunc_degree}) vs "
                f"({other.num_vars},{other.trunc_degree})"
            )

    def __add__(self, other):
        if not isinstance(other, Jet):
            return self + Jet.constant(self.num_vars, self.trunc_degree, other)
        self._check_shape(other)
        out = dict(self._coeffs)
        for e, c in other._coeffs.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Jet._raw(self.num_vars, self.trunc_degree, out)

    __radd__ = __add__

    def __neg__(self):
        return Jet._raw(self.num_vars, self.trunc_degree, {e: -c for e, c in self._coeffs.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet) else Jet.constant(self.num_vars, self.trunc_degree, -other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Jet):
            if not other:
                return Jet.zero(self.num_vars, self.trunc_degree)
            return Jet._raw(
                self.num_vars, self.trunc_degree, {e: c * other for e, c in self._coeffs.items()}
            )
        self._check_shape(other)
        td = self.trunc_degree
        out: dict[tuple, object] = {}
        a_items = [(e, sum(e), c) for e, c in self._coeffs.items()]
        b_items = [(e, sum(e), c) for e, c in other._coeffs.items()]
        for ea, da, ca in a_items:
            room = td - da
            for eb, db, cb in b_items:
                if db > room:
                    continue
                key = tuple(x + y for x, y in zip(ea, eb))
                s = out.get(key, 0) + ca * cb
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
        return Jet._raw(self.num_vars, self.trunc_degree, out)

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        if isinstance(scalar, Jet):
            raise TypeError("jet division is only defined by scalars")
        inv = 1 / scalar if not isinstance(scalar, int) else Fraction(1, scalar)
        return self * inv

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative jet powers are not defined")
        result = Jet.constant(self.num_vars, self.trunc_degree, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, Jet):
            return NotImplemented
        return (
            self.num_vars == other.num_vars
            and self.trunc_degree == other.trunc_degree
            and self._coeffs == other._coeffs
        )

    def __hash__(self):
        return hash((self.num_vars, self.trunc_degree, frozenset(self._coeffs.items())))

    def __repr__(self):
        n = len(self._coeffs)
        return f"Jet(num_vars={self.num_vars}, trunc_degree={self.trunc_degree}, terms={n})"

    # -- calculus -----------------------------------------------------------
    def derivative(self, var: int) -> "Jet":
        """Formal partial derivative with respect to variable ``var``."""
        if not 0 <= var < self.num_vars:
            raise ShapeMismatchError(f"variable index {var} out of range")
        out = {}
        for e, c in self._coeffs.items():
            k = e[var]
            if k:
                ne = e[:var] + (k - 1,) + e[var + 1 :]
                v = c * k
                if v:
                    out[ne] = out.get(ne, 0) + v
        return Jet._raw(self.num_vars, self.trunc_degree, {e: c for e, c in out.items() if c})

    def eval(self, point: Sequence[object]):
        """Evaluate at a point, with a variable-by-variable Horner recursion."""
        if len(point) != self.num_vars:
            raise ShapeMismatchError(
                f"point has {len(point)} coordinates, jet has {self.num_vars} variables"
            )
        if not self._coeffs:
            return 0
        return _horner(self._coeffs, tuple(point), 0, self.num_vars)

    # -- composition --------------------------------------------------------
    def compose(self, inner: Sequence["Jet"], allow_constant: bool = False) -> "Jet":
        """Truncated composition ``self(inner_1, ..., inner_n)``.

        Parameters
        ----------
        inner : sequence of Jet
            One component per variable of ``self``; all components must share
            a common shape, which becomes the shape of the result.
        allow_constant : bool
            Composition is only filtration-safe when the inner constant terms
            vanish.  Recentering substitutions (inner constants nonzero) must
            opt in explicitly.
        """
        inner = list(inner)
        if len(inner) != self.num_vars:
            raise ShapeMismatchError(
                f"outer jet has {self.num_vars} variables but {len(inner)} inner jets given"
            )
        for j in inner:
            inner[0]._check_shape(j)
        if not allow_constant:
            for i, j in enumerate(inner):
                if j.constant_term():
                    raise ConstantTermError(
                        f"inner component {i} has a nonzero constant term; "
                        "pass allow_constant=True to recenter"
                    )
        nv, td = inner[0].num_vars, inner[0].trunc_degree
        powers: list[dict[int, Jet]] = [dict() for _ in range(self.num_vars)]

        def power(v: int, k: int) -> Jet:
            cache = powers[v]
            got = cache.get(k)
            if got is None:
                got = inner[v] if k == 1 else power(v, k - 1) * inner[v]
                cache[k] = got
            return got

        acc = Jet.zero(nv, td)
        for exps, c in self._coeffs.items():
            if not allow_constant and sum(exps) > td:
                continue  # zero-constant inner: each factor raises degree
            term: Jet | None = None
            for v, e in enumerate(exps):
                if e:
                    p = power(v, e)
                    term = p if term is None else term * p
            acc = acc + (c if term is None else term * c)
        return acc

    def substitute_variable(self, var: int, replacement: "Jet", var_map: Mapping[int, int]) -> "Jet":
        """Replace one variable by a zero-constant jet, renumbering the rest.

        ``replacement`` lives in the target variable space; ``var_map`` sends
        every other source index to its target index.  This is composition
        with a vector that is the identity except in one slot, but costs only
        an exponent shift per term instead of a full power-cache composition.
        """
        if not 0 <= var < self.num_vars:
            raise ShapeMismatchError(f"variable index {var} out of range")
        if replacement.constant_term():
            raise ConstantTermError("substitute_variable needs a zero-constant replacement")
        nv_t, td = replacement.num_vars, replacement.trunc_degree
        for i in range(self.num_vars):
            if i != var and i not in var_map:
                raise ShapeMismatchError(f"var_map misses source variable {i}")
        powers: dict[int, Jet] = {1: replacement}

        def power(k: int) -> "Jet":
            got = powers.get(k)
            if got is None:
                got = power(k - 1) * replacement
                powers[k] = got
            return got

        out: dict[tuple, object] = {}
        for e, c in self._coeffs.items():
            k = e[var]
            rest_deg = sum(e) - k
            if rest_deg + k > td:
                continue  # replacement has zero constant: each power adds >= k to the degree
            te = [0] * nv_t
            for i, ei in enumerate(e):
                if i != var and ei:
                    te[var_map[i]] += ei
            if k == 0:
                key = tuple(te)
                s = out.get(key, 0) + c
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
                continue
            for pe, pc in power(k)._coeffs.items():
                if sum(pe) + rest_deg > td:
                    continue
                key = tuple(a + b for a, b in zip(pe, te))
                s = out.get(key, 0) + c * pc
                if s:
                    out[key] = s
                else:
                    out.pop(key, None)
        return Jet._raw(nv_t, td, out)

    # -- serialization ------------------------------------------------------
    def to_json(self) -> dict:
        """JSON form {num_vars, trunc_degree, terms:[{exps, re, im}]} in graded-lex order."""
        terms = []
        for e, c in self.sorted_terms():
            z = _coeff_to_complex(c)
            terms.append({"exps": list(e), "re": z.real, "im": z.imag})
        return {"num_vars": self.num_vars, "trunc_degree": self.trunc_degree, "terms": terms}

    @classmethod
    def from_json(cls, data: Mapping) -> "Jet":
        coeffs = {}
        for t in data["terms"]:
            c = complex(t["re"], t["im"])
            if c.imag == 0.0:
                c = c.real
            coeffs[tuple(t["exps"])] = c
        return cls(data["num_vars"], data["trunc_degree"], coeffs)


def _horner(coeffs: Mapping[tuple, object], point: tuple, var: int, num_vars: int):
    if var == num_vars:
        # only the empty exponent tail remains
        return next(iter(coeffs.values()))
    groups: dict[int, dict] = {}
    for e, c in coeffs.items():
        groups.setdefault(e[var], {})[e] = c
    x = point[var]
    acc = None
    prev = None
    for k in sorted(groups, reverse=True):
        sub = _horner(groups[k], point, var + 1, num_vars)
        if acc is None:
            acc = sub
        else:
            for _ in range(prev - k):
                acc = acc * x
            acc = acc + sub
        prev = k
    for _ in range(prev):
        acc = acc * x
    return acc


class JetVector:
    """A tuple of jets sharing num_vars and trunc_degree (a polynomial map)."""

    __slots__ = ("components",)

    def __init__(self, components: Iterable[Jet]):
        comps = tuple(components)
        if not comps:
            raise ShapeMismatchError("JetVector needs at least one component")
        for c in comps:
            comps[0]._check_shape(c)
        object.__setattr__(self, "components", comps)

    def __setattr__(self, *a):  # pragma: no cover - immutability guard
        raise AttributeError("JetVector is immutable")

    @property
    def num_vars(self) -> int:
        return self.components[0].num_vars

    @property
    def trunc_degree(self) -> int:
        return self.components[0].trunc_degree

    def __len__(self):
        return len(self.components)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __eq__(self, other):
        if not isinstance(other, JetVector):
            return NotImplemented
        return self.components == other.components

    def eval(self, point):
        return [c.eval(point) for c in self.components]

    def compose(self, inner: Sequence[Jet], allow_constant: bool = False) -> "JetVector":
        inner = list(inner)
        return JetVector([c.compose(inner, allow_constant=allow_constant) for c in self.components])

    def map_coefficients(self, fn) -> "JetVector":
        return JetVector([c.map_coefficients(fn) for c in self.components])

    def __repr__(self):
        return f"JetVector({len(self.components)} components, num_vars={self.num_vars}, trunc_degree={self.trunc_degree})"


# -- functional aliases (operation-per-function surface) --------------------

def jet_add(a: Jet, b: Jet) -> Jet:
    return a + b


def jet_mul(a: Jet, b: Jet) -> Jet:
    return a * b


def jet_compose(outer: Jet, inner: JetVector | Sequence[Jet], allow_constant: bool = False) -> Jet:
    return outer.compose(list(inner), allow_constant=allow_constant)


def jet_derivative(a: Jet, var: int) -> Jet:
    return a.derivative(var)


def jet_eval(a: Jet, point: Sequence[object]):
    return a.eval(point)


def jet_variables(num_vars: int, trunc_degree: int, coeff_one=1) -> tuple[Jet, ...]:
    """The coordinate jets (x_0, ..., x_{n-1}) of a given shape."""
    return tuple(Jet.variable(i, num_vars, trunc_degree, coeff_one) for i in range(num_vars))


def jet_sqrt(a: Jet) -> Jet:
    """Jet of sqrt(a) via the binomial series around the constant term.

    The constant term must be strictly positive (real); the result has float
    (or complex, if ``a`` does) coefficients.  Used for the explicit chart
    eliminations, whose radicand positivity is a precondition.
    """
    c = a.constant_term()
    if isinstance(c, (complex, QQi)):
        raise ValueError("jet_sqrt is defined for real-coefficient jets only")
    c_f = float(c)
    if c_f <= 0.0:
        raise ValueError(f"jet_sqrt needs a positive constant term, got {c_f}")
    w = (a - c) * (1.0 / c_f)  # zero constant term
    root = math.sqrt(c_f)
    # sqrt(c(1+w)) = sqrt(c) * sum binom(1/2, k) w^k
    acc = Jet.constant(a.num_vars, a.trunc_degree, 1.0)
    coeff = 1.0
    w_pow = Jet.constant(a.num_vars, a.trunc_degree, 1.0)
    half = 0.5
    for k in range(1, a.trunc_degree + 1):
        coeff *= (half - (k - 1)) / k
        w_pow = w_pow * w
        if w_pow.is_zero():
            break
        acc = acc + w_pow * coeff
    return acc * root


def normalized_coefficient(a: Jet, upper: Sequence[int], lower: Sequence[int]):
    """Ordered-monomial coefficient of ``xi_{a_1}...xi_{a_n} eta_{b_1}...eta_{b_m}``.

    The jet's variables are interpreted as (xi_1..xi_d, eta_1..eta_d), indices
    in ``upper``/``lower`` are 1-based.  The stored coefficient of the
    corresponding unordered monomial is divided by the multiplicity factor
    n! m! / (prod of multiplicity factorials), so that ordered-monomial
    normal-form formulas apply verbatim.
    """
    if a.num_vars % 2 != 0:
        raise ShapeMismatchError("normalized_coefficient needs an (xi, eta) jet with 2d variables")
    d = a.num_vars // 2
    exps = [0] * a.num_vars
    for i in upper:
        if not 1 <= i <= d:
            raise ShapeMismatchError(f"xi index {i} out of range 1..{d}")
        exps[i - 1] += 1
    for i in lower:
        if not 1 <= i <= d:
            raise ShapeMismatchError(f"eta index {i} out of range 1..{d}")
        exps[d + i - 1] += 1
    if sum(exps) > a.trunc_degree:
        raise ShapeMismatchError("requested monomial exceeds the truncation degree")
    stored = a.coefficient(exps)
    if not stored:
        return 0
    factor = math.factorial(len(upper)) * math.factorial(len(lower))
    for mult_source in (exps[:d], exps[d:]):
        for m in mult_source:
            factor //= math.factorial(m)
    if factor == 1:
        return stored
    if isinstance(stored, (int, Fraction)):
        return stored * Fraction(1, factor)
    if isinstance(stored, QQi):
        return stored * QQi(Fraction(1, factor))
    return stored / factor
