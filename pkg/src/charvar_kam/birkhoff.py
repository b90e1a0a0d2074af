"""Birkhoff normal-form coefficients and KAM hypothesis checks.

Inputs are degree-3 jets of a diagonalized map: xi_j -> p_j = lambda_j xi_j +
O2, eta_j -> q_j = mu_j eta_j + O2, with mu = conj(lambda) on the unit
circle.  The quadratic corrections phi_2, psi_2 solve the homological
equations monomial by monomial; the first Birkhoff coefficients alpha_jk are
then read off as the xi_j xi_k eta_k coefficients of p_j composed with the
corrected identity, which is their defining property.  The d = 1 closed form
must agree with this machinery to 1e-10, and does (this cross-check is the
strongest test of both).

Also here: the twist determinant, the frequency-map non-planarity test, the
non-resonance report, and the Brjuno partial-sum diagnostic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import ResonanceError, ShapeMismatchError
from .jets import Jet, JetVector, jet_variables
from .spectral import DiagonalizingBasis

__all__ = [
    "NormalFormInput",
    "BirkhoffCoefficients",
    "KamReport",
    "BrjunoResult",
    "diagonalized_jets",
    "nonresonance_check",
    "phi2_psi2",
    "alpha_matrix",
    "birkhoff_coefficients",
    "alpha2_closed_form",
    "twist_determinant",
    "nonplanarity_check",
    "brjuno_partial_sum",
    "RESONANCE_DENOM_TOL",
]

#: Homological denominators smaller than this are treated as resonant.
RESONANCE_DENOM_TOL = 1e-10


@dataclass(frozen=True)
class NormalFormInput:
    """Degree-3 jets of a diagonalized map in variables (xi_1..xi_d, eta_1..eta_d)."""

    d: int
    p_jets: JetVector
    q_jets: JetVector
    lam: tuple
    mu: tuple

    def __post_init__(self):
        n = 2 * self.d
        if len(self.p_jets) != self.d or len(self.q_jets) != self.d:
            raise ShapeMismatchError("need d components for p and for q")
        if self.p_jets.num_vars != n or self.q_jets.num_vars != n:
            raise ShapeMismatchError(f"jets must live in {n} variables")
        if len(self.lam) != self.d or len(self.mu) != self.d:
            raise ShapeMismatchError("need d eigenvalues lambda and mu")

    def validate_linear_part(self, tol: float = 1e-9):
        n = 2 * self.d
        for j in range(self.d):
            for block, jets, diag in (("xi", self.p_jets, self.lam), ("eta", self.q_jets, self.mu)):
                jet = jets[j]
                own = j if block == "xi" else self.d + j
                for i in range(n):
                    e = tuple(1 if k == i else 0 for k in range(n))
                    want = diag[j] if i == own else 0.0
                    got = complex(jet.coefficient(e))
                    if abs(got - want) > tol:
                        raise ShapeMismatchError(
                            f"linear part of {block}_{j + 1} is off by {abs(got - want):.2e} at variable {i}"
                        )


def diagonalized_jets(map_jet: JetVector, basis: DiagonalizingBasis, tol: float = 1e-9) -> NormalFormInput:
    """Conjugate a real 2d-component map jet by C0 into normal-form variables.

    ``map_jet`` has 2d components in 2d real variables, zero constant terms.
    The basis columns are interleaved; jets downstream use block variable
    order (xi_1..xi_d, eta_1..eta_d), so the permutation happens here.
    """
    n = len(map_jet)
    if map_jet.num_vars != n or n % 2:
        raise ShapeMismatchError("map jet must be square with an even number of variables")
    d = n // 2
    C0, inv = basis.C0, basis.inverse
    # block index -> interleaved index
    perm = [2 * j for j in range(d)] + [2 * j + 1 for j in range(d)]
    td = map_jet.trunc_degree
    zeta = jet_variables(n, td, coeff_one=1.0 + 0.0j)
    inner = []
    for i in range(n):
        row = Jet.zero(n, td)
        for k in range(n):
            c = complex(C0[i, perm[k]])
            if c != 0:
                row = row + zeta[k] * c
        inner.append(row)
    composed = [comp.compose(inner) for comp in map_jet]
    out = []
    for r in range(n):
        acc = Jet.zero(n, td)
        for i in range(n):
            c = complex(inv[perm[r], i])
            if c != 0:
                acc = acc + composed[i] * c
        out.append(acc)
    lam = tuple(complex(basis.normalization["eigenvalues"][j]) for j in range(d))
    mu = tuple(l.conjugate() for l in lam)
    nf = NormalFormInput(
        d=d,
        p_jets=JetVector(out[:d]),
        q_jets=JetVector(out[d:]),
        lam=lam,
        mu=mu,
    )
    nf.validate_linear_part(tol)
    return nf


def _eig_product(lam, mu, exps) -> complex:
    """prod lambda_i^{a_i} * prod mu_i^{b_i} for a degree multi-index."""
    d = len(lam)
    out = 1.0 + 0.0j
    for i, e in enumerate(exps[:d]):
        if e:
            out *= lam[i] ** e
    for i, e in enumerate(exps[d:]):
        if e:
            out *= mu[i] ** e
    return out


def nonresonance_check(lam: Sequence[complex], order: int = 4, tol: float = 1e-8) -> list:
    """Report resonances among unit eigenvalues.

    Returns tuples ("lambda_lambda" | "lambda_mu" | "mu_mu", j, m, n) for
    |lambda_j - lambda_m lambda_n| < tol (and the mu variants), plus
    ("root_of_unity", j, k) when lambda_j^k = 1 for k <= order.  Indices are
    1-based.  Report-only: an empty list means no violations.
    """
    lam = [complex(l) for l in lam]
    for l in lam:
        if abs(abs(l) - 1.0) > 1e-8:
            raise ValueError(f"nonresonance_check expects unit-modulus eigenvalues, got |{l}|")
    mu = [l.conjugate() for l in lam]
    d = len(lam)
    out = []
    for j in range(d):
        for m in range(d):
            for n in range(d):
                if abs(lam[m] * lam[n] - lam[j]) < tol:
                    out.append(("lambda_lambda", j + 1, m + 1, n + 1))
                if abs(lam[m] * mu[n] - lam[j]) < tol:
                    out.append(("lambda_mu", j + 1, m + 1, n + 1))
                if abs(mu[m] * mu[n] - lam[j]) < tol:
                    out.append(("mu_mu", j + 1, m + 1, n + 1))
    for j in range(d):
        for k in range(1, order + 1):
            if abs(lam[j] ** k - 1.0) < tol:
                out.append(("root_of_unity", j + 1, k))
    return out


def _solve_homological(jet: Jet, lam, mu, own: complex, degree: int) -> Jet:
    """phi with phi(lam xi, mu eta) - own * phi = [jet]_degree, coefficientwise."""
    n = jet.num_vars
    out = {}
    for e, c in jet.coeffs.items():
        if sum(e) != degree:
            continue
        denom = _eig_product(lam, mu, e) - own
        if abs(denom) < RESONANCE_DENOM_TOL:
            raise ResonanceError(
                f"homological denominator {abs(denom):.2e} at monomial {e} is resonant"
            )
        out[e] = complex(c) / denom
    return Jet(n, jet.trunc_degree, out)


def phi2_psi2(nf: NormalFormInput) -> tuple[JetVector, JetVector]:
    """Quadratic corrections of the normalizing change of coordinates.

    phi_{j,2} solves phi(lam xi, mu eta) - lambda_j phi = [p_j]_2 and psi_{j,2}
    the mu_j analogue; each monomial divides by its own eigenvalue-product
    denominator, so near-resonant denominators (< 1e-10) raise.
    """
    phis = [_solve_homological(p.homogeneous_part(2), nf.lam, nf.mu, nf.lam[j], 2) for j, p in enumerate(nf.p_jets)]
    psis = [_solve_homological(q.homogeneous_part(2), nf.lam, nf.mu, nf.mu[j], 2) for j, q in enumerate(nf.q_jets)]
    return JetVector(phis), JetVector(psis)


def _corrected_identity(nf: NormalFormInput, phi2: JetVector, psi2: JetVector) -> list[Jet]:
    n = 2 * nf.d
    zeta = jet_variables(n, nf.p_jets.trunc_degree, coeff_one=1.0 + 0.0j)
    return [zeta[i] + phi2[i] for i in range(nf.d)] + [zeta[nf.d + i] + psi2[i] for i in range(nf.d)]


def alpha_matrix(nf: NormalFormInput, phi2: JetVector | None = None, psi2: JetVector | None = None) -> np.ndarray:
    """First Birkhoff coefficient matrix (alpha_jk).

    alpha_jk is the coefficient of xi_j xi_k eta_k in p_j composed with the
    quadratically corrected identity (id + phi_2, id + psi_2), truncated at
    degree 3: at that structurally resonant monomial the unknown cubic
    correction drops out of the functional equation and alpha_jk is what
    remains.
    """
    if phi2 is None or psi2 is None:
        phi2, psi2 = phi2_psi2(nf)
    d = nf.d
    n = 2 * d
    corrected = _corrected_identity(nf, phi2, psi2)
    alpha = np.zeros((d, d), dtype=complex)
    for j in range(d):
        comp = nf.p_jets[j].compose(corrected)
        for k in range(d):
            e = [0] * n
            e[j] += 1
            e[k] += 1
            e[d + k] += 1
            alpha[j, k] = complex(comp.coefficient(tuple(e)))
    return alpha


@dataclass(frozen=True)
class BirkhoffCoefficients:
    """phi_2/psi_2 corrections, the alpha matrix, b = alpha/(i lambda), and gamma_1 (d = 1)."""

    phi2: JetVector
    psi2: JetVector
    alpha: np.ndarray
    b: np.ndarray
    gamma1: complex | None = None


def birkhoff_coefficients(nf: NormalFormInput) -> BirkhoffCoefficients:
    phi2, psi2 = phi2_psi2(nf)
    alpha = alpha_matrix(nf, phi2, psi2)
    b = np.array(
        [[alpha[j, k] / (1j * nf.lam[j]) for k in range(nf.d)] for j in range(nf.d)],
        dtype=complex,
    )
    gamma1 = complex(b[0, 0]) if nf.d == 1 else None
    return BirkhoffCoefficients(phi2=phi2, psi2=psi2, alpha=alpha, b=b, gamma1=gamma1)


def alpha2_closed_form(p2: Sequence[complex], q2: Sequence[complex], p31: complex, lam: complex, tol: float = 1e-8) -> complex:
    """Closed-form first Birkhoff coefficient of a 2D elliptic map.

    p2 = (p20, p21, p22) and q2 = (q20, q21) [a third entry is accepted and
    ignored] are the quadratic coefficients of p and q in (xi, eta); p31 the
    xi^2 eta coefficient of p; mu = 1/lam.  Denominators require lambda != 1
    and lambda^3 != 1: the eta^2 -> xi^2 correction solves
    b20 (lambda^2 - mu) = q20, and lambda^2 - mu = (lambda^3 - 1)/lambda.
    """
    lam = complex(lam)
    if abs(lam - 1.0) < tol or abs(lam**3 - 1.0) < tol:
        raise ResonanceError(f"lambda = {lam} is (near) a root of unity of order 1 or 3")
    mu = 1.0 / lam
    p20, p21, p22 = (complex(c) for c in p2)
    q20, q21 = complex(q2[0]), complex(q2[1])
    return (
        2.0 * p20 * p21 / (lam * (mu - 1.0))
        + p21 * (lam * q21 + mu * p20) / (lam * mu * (lam - 1.0))
        + 2.0 * p22 * q20 / (lam * lam - mu)
        + complex(p31)
    )


def twist_determinant(alpha) -> complex:
    """Determinant of the alpha matrix (the torsion detector)."""
    return complex(np.linalg.det(np.asarray(alpha, dtype=complex)))


def nonplanarity_check(omega: Sequence[float], b, domain_radius: float = 1e-3, tol: float = 1e-9) -> bool:
    """True iff the frequency map r -> omega + b r has non-planar image.

    Tests affine independence of the d+1 image points {omega + r b e_i} for
    r in {0, domain_radius * e_1, ...} via the (d+1)x(d+1) determinant on
    rows (1, point); the determinant is normalized by domain_radius^d so the
    verdict does not depend on the probing radius.  b may carry small
    imaginary parts from the eigenvector normalization; the frequency map is
    real, so the real part is used.
    """
    omega = np.asarray(omega, dtype=float)
    d = len(omega)
    b = np.asarray(b, dtype=complex).real
    rows = [np.concatenate(([1.0], omega))]
    for i in range(d):
        rows.append(np.concatenate(([1.0], omega + domain_radius * b[:, i])))
    det = np.linalg.det(np.array(rows))
    return bool(abs(det) / domain_radius**d > tol)


@dataclass(frozen=True)
class KamReport:
    """Verdicts for one fixed point: twist, non-planarity, resonances, Brjuno diagnostic."""

    alpha_det: complex
    twist_ok: bool
    nonplanarity_ok: bool
    resonance_flags: list
    brjuno_partial: float

    def to_json(self) -> dict:
        return {
            "alpha_det": {"re": self.alpha_det.real, "im": self.alpha_det.imag},
            "twist_ok": self.twist_ok,
            "nonplanarity_ok": self.nonplanarity_ok,
            "resonance_flags": [list(f) for f in self.resonance_flags],
            "brjuno_partial": self.brjuno_partial,
        }


#: |det alpha| above this asserts the twist condition.
TWIST_DET_TOL = 1e-6


@dataclass(frozen=True)
class BrjunoResult:
    """Partial Brjuno sum of a rotation number, with the quotients used."""

    partial_sum: float
    terms_used: int
    rational: bool
    quotients: tuple


def brjuno_partial_sum(theta, K: int = 20, huge_quotient: float = 1e12) -> BrjunoResult:
    """Partial sum sum_{k=1..K} log(q_{k+1}) / q_k of the Brjuno series.

    q_k are the continued-fraction convergent denominators of theta.  The
    expansion stops once denominators exceed 2^53 (beyond double precision
    the quotients of a float input are noise).  A terminating expansion or a
    partial quotient above ``huge_quotient`` flags the input as rational and
    the sum so far is returned.  Fraction input is accepted for exact use.
    """
    x = Fraction(theta)
    x -= math.floor(x)
    qs = [1]
    q_prev = 0
    quotients = []
    rational = False
    while len(qs) < K + 2:
        if x == 0:
            rational = True
            break
        a = math.floor(1 / x)
        if a > huge_quotient:
            rational = True
            break
        quotients.append(a)
        q_new = a * qs[-1] + q_prev
        q_prev = qs[-1]
        qs.append(q_new)
        if q_new > 2**53:
            break
        x = 1 / x - a
    total = 0.0
    terms = 0
    for k in range(1, min(K, len(qs) - 2) + 1):
        total += math.log(qs[k + 1]) / qs[k]
        terms += 1
    return BrjunoResult(
        partial_sum=total, terms_used=terms, rational=rational, quotients=tuple(quotients)
    )
