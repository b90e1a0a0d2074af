"""Per-parameter KAM pipelines: one fixed point in, one verdict row out.

Each function takes a single s value and returns a JSON-ready dict; scan
errors (singular charts, resonances, unrealizable parameters) are caught and
recorded in the row so a sweep never aborts on one bad parameter.
"""

from __future__ import annotations

from fractions import Fraction

import numpy as np

from .birkhoff import (
    KamReport,
    TWIST_DET_TOL,
    alpha2_closed_form,
    birkhoff_coefficients,
    brjuno_partial_sum,
    diagonalized_jets,
    nonplanarity_check,
    nonresonance_check,
    twist_determinant,
)
from .charts import chart_linear_matrix, chart_map_jet, su2_chart_map_jet
from .errors import (
    DegenerateChartError,
    NonDiagonalizableError,
    PoleError,
    ResonanceError,
    ShapeMismatchError,
    SingularChartError,
    SpectrumStructureError,
    UnrealizableError,
)
from .mcg import fixed_family_su2, fixed_family_su3
from .spectral import build_C0, classify_spectrum
from .varieties import kappa_su2

__all__ = ["su2_brown_point", "su3_main_point", "su3_kam_report", "SCAN_ERRORS"]

#: Everything a scan survives by recording instead of raising.
SCAN_ERRORS = (
    SingularChartError,
    DegenerateChartError,
    ResonanceError,
    UnrealizableError,
    PoleError,
    SpectrumStructureError,
    NonDiagonalizableError,
    ShapeMismatchError,
)


def _c(z) -> dict:
    z = complex(z)
    return {"re": z.real, "im": z.imag}


def su2_brown_point(s) -> dict:
    """Fixed point, level, multiplier, and first Birkhoff coefficient on the SU(2) side."""
    s = s if isinstance(s, Fraction) else Fraction(s)
    row: dict = {"s": float(s)}
    try:
        p0 = fixed_family_su2(s)
    except SCAN_ERRORS as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row
    kappa = kappa_su2(p0)
    row["fixed_point"] = [float(v) for v in p0.coords()]
    row["ell"] = float(kappa)
    if s == 0:
        # the origin is the blown-up point: the level chart is singular there
        row["degenerate"] = True
        row["notes"] = "kappa = -2 origin; sphere-of-directions blow-up point"
        return row
    row["degenerate"] = False
    try:
        chart = su2_chart_map_jet(s)
        L = chart_linear_matrix(chart)
        report = classify_spectrum(L)
        row["spec_class"] = report.classification[0]
        lam = report.eigenvalues[report.pairing[0][0]]
        row["multiplier"] = _c(lam)
        if report.classification[0] != "elliptic":
            return row
        row["omega"] = report.omega[0]
        flags = nonresonance_check([lam], order=4)
        row["resonance_flags"] = [list(f) for f in flags]
        basis = build_C0(L, report)
        nf = diagonalized_jets(chart.map_jet, basis)
        p, q = nf.p_jets[0], nf.q_jets[0]
        alpha2 = alpha2_closed_form(
            (p.coefficient((2, 0)), p.coefficient((1, 1)), p.coefficient((0, 2))),
            (q.coefficient((2, 0)), q.coefficient((1, 1)), q.coefficient((0, 2))),
            p.coefficient((2, 1)),
            nf.lam[0],
        )
        gamma1 = alpha2 / (1j * nf.lam[0])
        row["alpha2"] = _c(alpha2)
        row["gamma1"] = _c(gamma1)
        row["twist_ok"] = bool(abs(alpha2) > TWIST_DET_TOL)
        row["brjuno_partial"] = brjuno_partial_sum(report.omega[0]).partial_sum
    except SCAN_ERRORS as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def su3_kam_report(s, trunc_degree: int = 3) -> KamReport:
    """Twist/non-planarity verdicts for the SU(3) fixed point at parameter s."""
    chart = chart_map_jet(s, trunc_degree)
    L = chart_linear_matrix(chart)
    report = classify_spectrum(L)
    if not report.is_elliptic():
        raise ResonanceError(f"spectrum at s = {s} is not elliptic: {report.classification}")
    basis = build_C0(L, report)
    nf = diagonalized_jets(chart.map_jet, basis)
    bc = birkhoff_coefficients(nf)
    det = twist_determinant(bc.alpha)
    omega = report.elliptic_frequencies()
    flags = nonresonance_check([nf.lam[j] for j in range(nf.d)], order=4)
    return KamReport(
        alpha_det=det,
        twist_ok=bool(abs(det) > TWIST_DET_TOL),
        nonplanarity_ok=bool(nonplanarity_check(omega, bc.b)),
        resonance_flags=flags,
        brjuno_partial=max(brjuno_partial_sum(w).partial_sum for w in omega),
    )


def su3_main_point(s, trunc_degree: int = 3, dump_jets: bool = False) -> dict:
    """Full per-s row of the SU(3) pipeline: chart, spectrum, alpha matrix, verdicts."""
    s = s if isinstance(s, Fraction) else Fraction(s)
    row: dict = {"s": float(s)}
    try:
        fp = fixed_family_su3(s)
    except SCAN_ERRORS as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row
    row["fixed_point"] = [float(v) for v in fp.su3_point.coords9()]
    row["ell"] = float(fp.level.zeta)
    row["on_variety"] = bool(fp.level.in_deltoid(tol=1e-9))
    if not row["on_variety"]:
        row["notes"] = "fixed-line formula leaves the character variety at this s (formal chart only)"
    try:
        chart = chart_map_jet(s, trunc_degree)
        row["residual_h"] = chart.residual_h()
        row["residual_level"] = chart.residual_level()
        L = chart_linear_matrix(chart)
        report = classify_spectrum(L)
        row["spec_class"] = list(report.classification)
        row["eigenvalues"] = [_c(v) for v in report.eigenvalues]
        if dump_jets:
            row["jets"] = {
                "t_jet": chart.t_jet.to_json(),
                "z_jet": chart.z_jet.to_json(),
                "map_jet": [c.to_json() for c in chart.map_jet],
            }
        if not report.is_elliptic():
            row["notes"] = "spectrum not elliptic; no KAM verdict claimed"
            return row
        row["omega"] = list(report.elliptic_frequencies())
        basis = build_C0(L, report)
        nf = diagonalized_jets(chart.map_jet, basis)
        bc = birkhoff_coefficients(nf)
        row["alpha"] = [[_c(bc.alpha[j, k]) for k in range(3)] for j in range(3)]
        row["max_im_b"] = float(np.max(np.abs(bc.b.imag)))
        det = twist_determinant(bc.alpha)
        flags = nonresonance_check([nf.lam[j] for j in range(3)], order=4)
        row["alpha_det"] = _c(det)
        row["twist_ok"] = bool(abs(det) > TWIST_DET_TOL)
        row["nonplanar_ok"] = bool(nonplanarity_check(row["omega"], bc.b))
        row["resonance_flags"] = [list(f) for f in flags]
        row["brjuno_partial"] = max(brjuno_partial_sum(w).partial_sum for w in row["omega"])
        row["verdict"] = bool(row["twist_ok"] and row["nonplanar_ok"] and not flags)
    except SCAN_ERRORS as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row
