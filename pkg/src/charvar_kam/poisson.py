"""The SU(2) Poisson structure in trace coordinates.

Generator brackets, the antisymmetric bivector, and the induced symplectic
form on generic level sets of kappa.  Everything here is an exact polynomial
statement, so all computations run over rational coefficients; no floating
point enters this module.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

from .errors import ShapeMismatchError
from .jets import Jet, jet_variables
from .varieties import Su2Point

__all__ = ["bivector", "bracket", "leaf_symplectic_form"]


@lru_cache(maxsize=None)
def bivector(trunc_degree: int = 2) -> tuple[tuple[Jet, ...], ...]:
    """The 3x3 antisymmetric Poisson bivector in (x, y, z).

    Row/column order (x, y, z); entry [i][j] is the bracket {v_i, v_j}:
    {x, y} = xy/2 - z, {x, z} = y - xz/2, {y, z} = yz/2 - x.
    """
    x, y, z = jet_variables(3, trunc_degree, coeff_one=Fraction(1))
    half = Fraction(1, 2)
    xy = x * y * half - z
    xz = y - x * z * half
    yz = y * z * half - x
    zero = Jet.zero(3, trunc_degree)
    return (
        (zero, xy, xz),
        (-xy, zero, yz),
        (-xz, -yz, zero),
    )


def bracket(f: Jet, g: Jet) -> Jet:
    """Poisson bracket {f, g} = sum_ij a_ij (df/dv_i)(dg/dv_j) of two polynomials in (x, y, z)."""
    if f.num_vars != 3 or g.num_vars != 3:
        raise ShapeMismatchError("the SU(2) bracket is defined for polynomials in (x, y, z)")
    # bracket raises degree by at most deg(a_ij) - 2 = 0 per factor pair, but
    # keep full headroom: deg {f,g} <= deg f + deg g
    deg = f.degree() + g.degree()
    deg = max(deg, 1)
    fw = f.truncated(deg)
    gw = g.truncated(deg)
    a = bivector(deg)
    acc = Jet.zero(3, deg)
    for i in range(3):
        dfi = fw.derivative(i)
        if dfi.is_zero():
            continue
        for j in range(3):
            if i == j:
                continue
            dgj = gw.derivative(j)
            if dgj.is_zero():
                continue
            acc = acc + a[i][j].truncated(deg) * dfi * dgj
    return acc


def leaf_symplectic_form(p: Su2Point) -> object:
    """Coefficient 2/(2x - yz) of dy ^ dz for the symplectic form on a generic leaf."""
    x, y, z = p.coords() if isinstance(p, Su2Point) else p
    denom = 2 * x - y * z
    if denom == 0:
        raise ZeroDivisionError("2x - yz = 0: leaf coordinates (y, z) are singular here")
    if isinstance(denom, int):
        return Fraction(2, denom)
    return 2 / denom
