"""Local smooth charts at cat-map fixed points, and the map's degree-3 jets there.

SU(3): the 6-dimensional level set sits in 8 unitary coordinates, so two are
eliminated at the fixed point: t explicitly from P/2 = ell (a quadratic in t,
minus-branch square root picked by the center), then z implicitly from
H = (P/2)^2 - Q = 0 via fixed-slope Newton on jets.  The surviving chart
variables are (x, X, y, Y, Z, T), displacements from the fixed point; the cat
map's components are recentered and pushed through both eliminations, then
projected by forgetting the eliminated slots.

SU(2): the level set kappa = ell is a surface in (x, y, z); x is eliminated
from the quadratic kappa = ell (branch from the center) and (y, z) survive.

Everything stays in exact rationals until the square roots; chart jets have
float coefficients.  All eliminations and substitutions are degree-truncated
at the chart's truncation degree (default 3).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DegenerateChartError, SingularChartError
from .jets import Jet, JetVector, jet_sqrt, jet_variables
from .mcg import cat_map_su3_poly, fixed_family_su2, fixed_family_su3, level_of_s
from .varieties import Su3Point, kappa_su2, p_poly, q_poly

__all__ = [
    "ChartSpec",
    "ChartJet",
    "Su2ChartJet",
    "chart_spec",
    "solve_t",
    "solve_z_implicit",
    "chart_map_jet",
    "chart_linear_matrix",
    "su2_chart_map_jet",
    "CHART_VARS",
    "SEVEN_VARS",
]

#: Variables of the 7-dimensional space after the t-elimination.
SEVEN_VARS = ("x", "X", "y", "Y", "z", "Z", "T")

#: Chart variables after both eliminations.
CHART_VARS = ("x", "X", "y", "Y", "Z", "T")

# source index -> target index when a variable is dropped
_MAP_8_TO_7 = {0: 0, 1: 1, 2: 2, 3: 3, 4: 4, 5: 5, 7: 6}  # drop t (index 6)
_MAP_7_TO_6 = {0: 0, 1: 1, 2: 2, 3: 3, 5: 4, 6: 5}  # drop z (index 4)
_Z7 = 4  # index of z in the 7-variable space
_T8 = 6  # index of t in the 8-variable space


def _as_fraction(s) -> Fraction:
    return s if isinstance(s, Fraction) else Fraction(s)


@dataclass(frozen=True)
class ChartSpec:
    """Chart data at the s-parameterized SU(3) fixed point.

    Elimination order is fixed as (t, z); other orders are singular at these
    fixed points or unsupported (reproducibility of the jets depends on it).
    """

    s: Fraction
    center: Su3Point
    level: Fraction
    sqrt_branch: int
    trunc_degree: int = 3
    eliminated: tuple = ("t", "z")
    chart_vars: tuple = CHART_VARS


def chart_spec(s, trunc_degree: int = 3) -> ChartSpec:
    """Validate smoothness of the t-elimination at the fixed point of parameter s."""
    s = _as_fraction(s)
    fp = fixed_family_su3(s)
    c = fp.su3_point
    # P/2 = ell is quadratic in t with root t = (xy + XY) + branch * sqrt(R);
    # at the center R0 = (t0 - x0 y0)^2, so smoothness needs t0 != x0 y0
    gap = c.t - c.x * c.y
    if gap == 0:
        raise SingularChartError(f"s = {s}: radicand vanishes at the center, chart is singular")
    branch = 1 if gap > 0 else -1
    return ChartSpec(
        s=s,
        center=c,
        level=Fraction(level_of_s(s)),
        sqrt_branch=branch,
        trunc_degree=trunc_degree,
    )


def _center7(spec: ChartSpec) -> tuple:
    c = spec.center
    return (c.x, c.X, c.y, c.Y, c.z, c.Z, c.T)


def _translate(poly: Jet, centers, trunc_degree: int) -> Jet:
    """Recenter an exact polynomial: poly(center + w) as a truncated jet in w.

    The polynomial keeps its full degree going in (high-order terms feed the
    low-order jet coefficients through the shift); only the result truncates.
    """
    n = poly.num_vars
    w = jet_variables(n, trunc_degree, coeff_one=Fraction(1))
    inner = [w[i] + centers[i] for i in range(n)]
    return poly.compose(inner, allow_constant=True)


@lru_cache(maxsize=32)
def _p_no_t_7() -> Jet:
    """P with t set to zero, as a polynomial in the 7 remaining variables."""
    coeffs = {}
    for e, c in p_poly().coeffs.items():
        if e[_T8] == 0:
            coeffs[e[:_T8] + e[_T8 + 1 :]] = c
    return Jet(7, p_poly().trunc_degree, coeffs)


def solve_t(spec: ChartSpec) -> Jet:
    """Degree-3 jet of t over (x, X, y, Y, z, Z, T) displacements from the center.

    P is quadratic in t: P = t^2 - 2(xy + XY) t + C with C = P|_{t=0}, so
    P/2 = ell solves to t = (xy + XY) + branch * sqrt(R) with
    R = (xy + XY)^2 + 2*ell - C.  The branch makes the constant term equal
    the center's t-coordinate; at the center R = (t0 - x0 y0)^2 exactly.
    """
    td = spec.trunc_degree
    centers = _center7(spec)
    x0, _, y0, _, _, _, _ = centers
    w = jet_variables(7, td, coeff_one=Fraction(1))
    a_jet = (w[0] + x0) * (w[2] + y0) + w[1] * w[3]  # xy + XY, centered
    c_jet = _translate(_p_no_t_7(), centers, td)
    radicand = a_jet * a_jet + 2 * spec.level - c_jet
    r0 = radicand.constant_term()
    if r0 <= 0:
        raise SingularChartError(f"s = {spec.s}: radicand {r0} <= 0 at the center")
    gap = spec.center.t - x0 * y0
    assert gap * gap == r0, "center must satisfy P/2 = ell exactly"
    root = jet_sqrt(radicand.map_coefficients(float))
    return a_jet.map_coefficients(float) + root * float(spec.sqrt_branch)


def _substituted_pq(spec: ChartSpec, t_jet: Jet) -> tuple[Jet, Jet]:
    """P and Q recentered at the fixed point with the t-jet substituted (7 variables)."""
    td = spec.trunc_degree
    c = spec.center
    centers8 = (c.x, c.X, c.y, c.Y, c.z, c.Z, c.t, c.T)
    t_disp = t_jet - t_jet.constant_term()
    p_c = _translate(p_poly(), centers8, td).map_coefficients(float)
    q_c = _translate(q_poly(), centers8, td).map_coefficients(float)
    p7 = p_c.substitute_variable(_T8, t_disp, _MAP_8_TO_7)
    q7 = q_c.substitute_variable(_T8, t_disp, _MAP_8_TO_7)
    return p7, q7


def _h_tilde(spec: ChartSpec, t_jet: Jet) -> Jet:
    """H = (P/2)^2 - Q after recentering and the t-substitution (7 variables).

    The recentered P carries constant P(center) = 2*ell, so no level shift is
    needed here; the constant of the result is ell^2 - Q(center) = 0.
    """
    p7, q7 = _substituted_pq(spec, t_jet)
    half_p = p7 * 0.5
    return half_p * half_p - q7


def solve_z_implicit(spec: ChartSpec, t_jet: Jet) -> Jet:
    """Degree-3 jet of z over (x, X, y, Y, Z, T), from H = 0 by implicit differentiation.

    Fixed-slope Newton on jets gains one degree of accuracy per sweep, so
    trunc_degree + 1 sweeps determine the jet completely.  The implicit
    function theorem hypothesis dH/dz != 0 is checked numerically.
    """
    td = spec.trunc_degree
    h = _h_tilde(spec, t_jet)
    e_z = tuple(1 if i == _Z7 else 0 for i in range(7))
    slope = float(h.coefficient(e_z))
    if abs(slope) < 1e-8:
        raise DegenerateChartError(
            f"s = {spec.s}: dH/dz = {slope:.3e} at the center, implicit chart degenerates"
        )
    zeta = Jet.zero(6, td)
    for _ in range(td + 1):
        residual = h.substitute_variable(_Z7, zeta, _MAP_7_TO_6)
        zeta = zeta - residual * (1.0 / slope)
        zeta = zeta - zeta.constant_term()
    return zeta + float(spec.center.z)


@dataclass(frozen=True)
class ChartJet:
    """Jets of the eliminated variables and of the cat map in chart coordinates."""

    spec: ChartSpec
    t_jet: Jet
    z_jet: Jet
    map_jet: JetVector

    def residual_h(self) -> float:
        """Largest coefficient of H after substituting both eliminations."""
        h = _h_tilde(self.spec, self.t_jet)
        zeta = self.z_jet - self.z_jet.constant_term()
        r = h.substitute_variable(_Z7, zeta, _MAP_7_TO_6)
        return max((abs(c) for c in r.coeffs.values()), default=0.0)

    def residual_level(self) -> float:
        """Largest coefficient of P/2 - ell after the t-substitution."""
        p7, _ = _substituted_pq(self.spec, self.t_jet)
        diff = p7 * 0.5 - float(self.spec.level)
        return max((abs(v) for v in diff.coeffs.values()), default=0.0)


_KEEP_COMPONENTS = (0, 1, 2, 3, 5, 7)  # x', X', y', Y', Z', T'


def _chart_map_jet_cached(spec: ChartSpec) -> ChartJet:
    td = spec.trunc_degree
    t_jet = solve_t(spec)
    z_jet = solve_z_implicit(spec, t_jet)
    zeta = z_jet - z_jet.constant_term()
    t6 = t_jet.substitute_variable(_Z7, zeta, _MAP_7_TO_6)
    t6 = t6 - t6.constant_term()
    c = spec.center
    centers8 = (c.x, c.X, c.y, c.Y, c.z, c.Z, c.t, c.T)
    t7 = t_jet - t_jet.constant_term()
    out = []
    for i in _KEEP_COMPONENTS:
        poly9 = cat_map_su3_poly(td).components[i]
        # the first eight components never involve U: drop that variable
        coeffs = {}
        for e, v in poly9.coeffs.items():
            assert e[8] == 0
            coeffs[e[:8]] = v
        poly8 = Jet(8, td, coeffs)
        centered = _translate(poly8, centers8, td) - centers8[i]
        # substitute t (8 -> 7 variables), then z (7 -> 6): elimination order
        g7 = centered.map_coefficients(float).substitute_variable(_T8, t7, _MAP_8_TO_7)
        g6 = g7.substitute_variable(_Z7, zeta, _MAP_7_TO_6)
        const = g6.constant_term()
        assert abs(complex(const)) < 1e-10, f"chart map constant term {const} should vanish"
        out.append(g6 - const)
    return ChartJet(spec=spec, t_jet=t_jet, z_jet=z_jet, map_jet=JetVector(out))


@lru_cache(maxsize=64)
def _chart_cache(s: Fraction, trunc_degree: int) -> ChartJet:
    return _chart_map_jet_cached(chart_spec(s, trunc_degree))


def chart_map_jet(spec_or_s, trunc_degree: int = 3) -> ChartJet:
    """Degree-3 jet of the cat map in the 6 chart variables at the fixed point."""
    if isinstance(spec_or_s, ChartSpec):
        return _chart_cache(spec_or_s.s, spec_or_s.trunc_degree)
    return _chart_cache(_as_fraction(spec_or_s), trunc_degree)


def chart_linear_matrix(chart: ChartJet) -> np.ndarray:
    """Linearization of the chart map at the fixed point (6x6 real)."""
    n = chart.map_jet.num_vars
    m = np.zeros((n, n))
    for i, comp in enumerate(chart.map_jet):
        for j in range(n):
            e = tuple(1 if k == j else 0 for k in range(n))
            m[i, j] = float(comp.coefficient(e))
    return m


# --------------------------------------------------------------------------
# SU(2): 2D chart on the level surface kappa = ell
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Su2ChartJet:
    """x-elimination jet and the cat-map jet in (y, z) displacements."""

    s: Fraction
    center: tuple
    level: Fraction
    x_jet: Jet
    map_jet: JetVector


def su2_chart_map_jet(s, trunc_degree: int = 3) -> Su2ChartJet:
    """Chart of the SU(2) cat map on kappa = ell at the fixed point of parameter s.

    kappa = ell is quadratic in x: x^2 - yz x + (y^2 + z^2 - 2 - ell) = 0, so
    x = (yz + branch*sqrt(disc))/2 with disc = (yz)^2 - 4(y^2 + z^2 - 2 - ell);
    at the center disc = (2 x0 - y0 z0)^2, which must be positive (it vanishes
    only at the blown-up origin s = 0).
    """
    s = _as_fraction(s)
    p0 = fixed_family_su2(s)
    x0, y0, z0 = p0.coords()
    level = kappa_su2(p0)
    gap = 2 * x0 - y0 * z0
    if gap == 0:
        raise SingularChartError(
            f"s = {s}: 2x - yz = 0 at the fixed point (origin blow-up), chart is singular"
        )
    branch = 1 if gap > 0 else -1
    w = jet_variables(2, trunc_degree, coeff_one=Fraction(1))
    yv = w[0] + y0
    zv = w[1] + z0
    disc = yv * zv * yv * zv - 4 * (yv * yv + zv * zv - 2 - level)
    assert disc.constant_term() == gap * gap
    x_jet = (yv * zv).map_coefficients(float) + jet_sqrt(disc.map_coefficients(float)) * float(
        branch
    )
    x_jet = x_jet * 0.5
    yf = yv.map_coefficients(float)
    zf = zv.map_coefficients(float)
    out_y = zf * yf - x_jet - float(y0)
    out_z = zf * (zf * yf - x_jet) - yf - float(z0)
    comps = []
    for comp in (out_y, out_z):
        const = comp.constant_term()
        assert abs(float(const)) < 1e-10
        comps.append(comp - const)
    return Su2ChartJet(
        s=s,
        center=(float(x0), float(y0), float(z0)),
        level=Fraction(level),
        x_jet=x_jet,
        map_jet=JetVector(comps),
    )
