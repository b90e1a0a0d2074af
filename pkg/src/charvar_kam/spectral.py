"""Eigenanalysis of linearized actions: classification and diagonalizing bases.

Matrices here are tiny (n <= 8), so the eigensolver is numpy's; this module
adds the residual guarantees, conjugate-pair bookkeeping, elliptic/hyperbolic
tags, and the deterministic normalization of the diagonalizing basis C0 that
the normal-form computation depends on.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
import numpy as np

from .errors import NonDiagonalizableError, ResonanceError, SpectrumStructureError

__all__ = [
    "SpectrumReport",
    "DiagonalizingBasis",
    "eigen_small",
    "classify_spectrum",
    "build_C0",
    "UNIT_CIRCLE_TOL",
]

#: |abs(lambda) - 1| below this counts as "on the unit circle".
UNIT_CIRCLE_TOL = 1e-8

#: lambda in {+1, -1} within this counts as parabolic.
_PARABOLIC_TOL = 1e-8


def eigen_small(m, residual_tol: float = 1e-9):
    """Eigendecomposition of a small (n <= 8) complex matrix.

    Returns (eigenvalues, eigenvectors) with eigenvectors as columns, and
    enforces the residual bound ||m v - lambda v|| <= residual_tol * ||m||
    for every pair; failing that, the matrix is declared defective.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"need a square matrix, got shape {m.shape}")
    if m.shape[0] > 8:
        raise ValueError("eigen_small is for matrices of size <= 8")
    vals, vecs = np.linalg.eig(m)
    scale = np.linalg.norm(m)
    if scale == 0.0:
        return vals, vecs
    # a Jordan block yields (near-)parallel eigenvectors with tiny residuals,
    # so defectiveness must be caught through the basis conditioning
    if np.linalg.cond(vecs) > 1e12:
        raise NonDiagonalizableError(
            f"eigenvector basis condition number {np.linalg.cond(vecs):.3e}: matrix is defective"
        )
    for k in range(m.shape[0]):
        v = vecs[:, k]
        res = np.linalg.norm(m @ v - vals[k] * v)
        if res > residual_tol * scale:
            raise NonDiagonalizableError(
                f"eigenpair {k} residual {res:.3e} exceeds {residual_tol:.1e} * ||m||"
            )
    return vals, vecs


@dataclass(frozen=True)
class SpectrumReport:
    """Eigenvalues of a real matrix organized into conjugate/reciprocal pairs.

    pairing holds index pairs (j, jbar) into eigenvalues with
    lambda_jbar ~ conj(lambda_j); classification tags each pair elliptic,
    hyperbolic, parabolic or resonant; omega holds arg(lambda)/2pi in
    (0, 1/2) for each elliptic pair (NaN placeholder otherwise).
    """

    eigenvalues: tuple
    pairing: tuple
    classification: tuple
    omega: tuple

    def is_elliptic(self) -> bool:
        return bool(self.classification) and all(t == "elliptic" for t in self.classification)

    def elliptic_frequencies(self) -> tuple:
        return tuple(w for w, t in zip(self.omega, self.classification) if t == "elliptic")

    def to_json(self) -> dict:
        return {
            "eigs": [{"re": v.real, "im": v.imag} for v in self.eigenvalues],
            "pairs": [list(p) for p in self.pairing],
            "tags": list(self.classification),
            "omega": [w for w in self.omega],
        }


def classify_spectrum(m, pair_tol: float = 1e-9) -> SpectrumReport:
    """Pair and tag the spectrum of a real square matrix (n <= 8, n even).

    Complex eigenvalues pair with their conjugates; real ones pair with their
    reciprocals (the matrices classified here have reciprocal spectra at
    fixed points of measure-preserving actions).  Elliptic means on the unit
    circle but not at +/-1; real off-circle pairs are hyperbolic; +/-1 is
    parabolic; a repeated elliptic eigenvalue is tagged resonant.
    """
    m = np.asarray(m)
    if np.iscomplexobj(m) and np.max(np.abs(m.imag)) > 0:
        raise SpectrumStructureError("classify_spectrum expects a real matrix")
    vals, _ = eigen_small(np.asarray(m, dtype=float))
    n = len(vals)
    used = [False] * n
    pairing = []
    tags = []
    omegas = []
    order = sorted(range(n), key=lambda k: (-abs(vals[k].imag), -vals[k].real))
    for j in order:
        if used[j]:
            continue
        lam = vals[j]
        if abs(lam.imag) > pair_tol:
            # conjugate partner
            best, best_err = None, math.inf
            for k in range(n):
                if used[k] or k == j:
                    continue
                err = abs(vals[k] - lam.conjugate())
                if err < best_err:
                    best, best_err = k, err
            if best is None or best_err > 1e-6 * max(1.0, abs(lam)):
                raise SpectrumStructureError(
                    f"eigenvalue {lam} has no conjugate partner (best residual {best_err:.3e})"
                )
            jj = j if lam.imag > 0 else best
            kk = best if lam.imag > 0 else j
            used[j] = used[best] = True
            lam_pos = vals[jj]
            pairing.append((jj, kk))
            if abs(abs(lam_pos) - 1.0) < UNIT_CIRCLE_TOL:
                tags.append("elliptic")
                omegas.append(cmath.phase(lam_pos) / (2 * math.pi))
            else:
                # complex off-circle quadruple partner handling is out of scope
                tags.append("hyperbolic")
                omegas.append(math.nan)
        else:
            lam_r = lam.real
            if abs(lam_r - 1.0) < _PARABOLIC_TOL or abs(lam_r + 1.0) < _PARABOLIC_TOL:
                # find the matching parabolic partner
                best = None
                for k in range(n):
                    if not used[k] and k != j and abs(vals[k] - lam) < 1e-6:
                        best = k
                        break
                if best is None:
                    raise SpectrumStructureError(f"unpaired parabolic eigenvalue {lam_r}")
                used[j] = used[best] = True
                pairing.append((j, best))
                tags.append("parabolic")
                omegas.append(math.nan)
                continue
            # reciprocal partner
            best, best_err = None, math.inf
            for k in range(n):
                if used[k] or k == j:
                    continue
                if abs(vals[k].imag) > pair_tol:
                    continue
                err = abs(vals[k].real - 1.0 / lam_r)
                if err < best_err:
                    best, best_err = k, err
            if best is None or best_err > 1e-6 * max(1.0, abs(1.0 / lam_r)):
                raise SpectrumStructureError(f"real eigenvalue {lam_r} has no reciprocal partner")
            used[j] = used[best] = True
            big = j if abs(vals[j]) >= abs(vals[best]) else best
            small = best if big == j else j
            pairing.append((big, small))
            tags.append("hyperbolic")
            omegas.append(math.nan)
    # repeated elliptic eigenvalues are resonant for the normal form
    ell = [vals[p[0]] for p, t in zip(pairing, tags) if t == "elliptic"]
    for a in range(len(ell)):
        for b in range(a + 1, len(ell)):
            if abs(ell[a] - ell[b]) < UNIT_CIRCLE_TOL:
                tags = ["resonant" if t == "elliptic" else t for t in tags]
    return SpectrumReport(
        eigenvalues=tuple(vals),
        pairing=tuple(pairing),
        classification=tuple(tags),
        omega=tuple(omegas),
    )


@dataclass(frozen=True)
class DiagonalizingBasis:
    """C0 with conjugate-pair columns and its inverse.

    Column order is interleaved (xi_1, eta_1, xi_2, eta_2, ...): column 2j is
    the unit-norm eigenvector of the j-th elliptic eigenvalue (Im > 0) with
    its first above-threshold entry rotated to be real positive, and column
    2j+1 is the elementwise conjugate.  The convention is recorded in
    ``normalization`` so alternative scalings can be compared.
    """

    C0: np.ndarray
    inverse: np.ndarray
    normalization: dict = field(default_factory=dict)

    @property
    def d(self) -> int:
        return self.C0.shape[0] // 2


def build_C0(m, report: SpectrumReport | None = None, tol: float = 1e-9) -> DiagonalizingBasis:
    """Diagonalizing basis for a real matrix with fully elliptic spectrum.

    Requires every pair elliptic and the elliptic eigenvalues pairwise
    distinct (repeats within 1e-8 are resonant and rejected).  Verifies the
    off-diagonal residual of C0^-1 m C0 against ``tol``.
    """
    m = np.asarray(m, dtype=float)
    if report is None:
        report = classify_spectrum(m)
    if not report.is_elliptic():
        raise ResonanceError(
            f"build_C0 needs an all-elliptic spectrum, got tags {report.classification}"
        )
    lams = [report.eigenvalues[p[0]] for p in report.pairing]
    for a in range(len(lams)):
        for b in range(a + 1, len(lams)):
            if abs(lams[a] - lams[b]) < 1e-8:
                raise ResonanceError(f"repeated elliptic eigenvalue near {lams[a]}")
    vals, vecs = eigen_small(m)
    n = m.shape[0]
    cols = []
    lam_order = []
    for lam in lams:
        k = int(np.argmin(np.abs(vals - lam)))
        v = vecs[:, k].astype(complex)
        v = v / np.linalg.norm(v)
        # deterministic phase: first entry above threshold made real positive
        lead = next(i for i in range(n) if abs(v[i]) > 1e-9)
        v = v * (abs(v[lead]) / v[lead])
        cols.append(v)
        cols.append(np.conj(v))
        lam_order.append(vals[k])
    C0 = np.column_stack(cols)
    inv = np.linalg.inv(C0)
    diag = inv @ m @ C0
    off = diag - np.diag(np.diag(diag))
    scale = max(1.0, float(np.linalg.norm(m)))
    res = float(np.max(np.abs(off)))
    if res > tol * scale:
        raise NonDiagonalizableError(f"off-diagonal residual {res:.3e} exceeds tolerance")
    return DiagonalizingBasis(
        C0=C0,
        inverse=inv,
        normalization={
            "columns": "interleaved (xi_1, eta_1, ...)",
            "scaling": "unit Euclidean norm",
            "phase": "first entry with |.| > 1e-9 rotated real positive",
            "eigenvalues": [complex(l) for l in lam_order],
        },
    )
