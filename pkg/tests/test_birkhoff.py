import cmath
import math
import random
from fractions import Fraction

import numpy as np
import pytest

from oracles import functional_equation_residual

from charvar_kam.errors import ResonanceError
from charvar_kam.jets import Jet, JetVector, jet_variables
from charvar_kam.birkhoff import (
    NormalFormInput,
    alpha2_closed_form,
    alpha_matrix,
    birkhoff_coefficients,
    brjuno_partial_sum,
    nonplanarity_check,
    nonresonance_check,
    phi2_psi2,
    twist_determinant,
)


def random_unit(rng, avoid_orders=6, margin=0.05):
    """A unit-modulus eigenvalue away from low-order roots of unity."""
    while True:
        theta = rng.uniform(0.02, 0.48)
        lam = cmath.exp(2j * math.pi * theta)
        if all(abs(lam**k - 1) > margin for k in range(1, avoid_orders + 1)):
            return lam


def random_nf(rng, d, cubic=True):
    """Random synthetic diagonalized map with unit eigenvalues, mu = conj(lam)."""
    n = 2 * d
    lam = tuple(random_unit(rng) for _ in range(d))
    mu = tuple(l.conjugate() for l in lam)
    zeta = jet_variables(n, 3, coeff_one=1.0 + 0.0j)

    def rand_tail():
        coeffs = {}
        for _ in range(12):
            e = [0] * n
            deg = rng.choice([2, 3] if cubic else [2])
            for _ in range(deg):
                e[rng.randrange(n)] += 1
            coeffs[tuple(e)] = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
        return Jet(n, 3, coeffs)

    ps = [zeta[j] * lam[j] + rand_tail() for j in range(d)]
    qs = [zeta[d + j] * mu[j] + rand_tail() for j in range(d)]
    return NormalFormInput(d=d, p_jets=JetVector(ps), q_jets=JetVector(qs), lam=lam, mu=mu)


# ------------------------------------------------------------------ nonresonance


def test_nonresonance_root_of_unity_flag():
    flags = nonresonance_check([1j], order=4)
    assert ("root_of_unity", 1, 4) in flags
    assert not [f for f in flags if f[0] == "root_of_unity" and f[2] < 4]


def test_nonresonance_constructed_violation():
    lam = [cmath.exp(2j * math.pi * 0.1), cmath.exp(2j * math.pi * 0.2)]
    flags = nonresonance_check(lam, order=4)
    assert ("lambda_lambda", 2, 1, 1) in flags


def test_nonresonance_clean_spectrum():
    lam = [cmath.exp(2j * math.pi * w) for w in (0.11, 0.23, 0.41)]
    assert nonresonance_check(lam, order=4) == []


def test_nonresonance_requires_unit_modulus():
    with pytest.raises(ValueError):
        nonresonance_check([2.0 + 0j])


# ------------------------------------------------------------------ phi2/psi2


def test_phi2_single_coefficient():
    # p_{j,2}^{m,n|0} = 1 with generic lambda -> phi coefficient 1/(lam_m lam_n - lam_j)
    lam = (cmath.exp(0.3j), cmath.exp(0.9j))
    mu = tuple(l.conjugate() for l in lam)
    zeta = jet_variables(4, 3, coeff_one=1.0 + 0.0j)
    p1 = zeta[0] * lam[0] + zeta[0] * zeta[1]  # xi_1 xi_2 term
    p2 = zeta[1] * lam[1]
    q1 = zeta[2] * mu[0]
    q2 = zeta[3] * mu[1]
    nf = NormalFormInput(2, JetVector([p1, p2]), JetVector([q1, q2]), lam, mu)
    phi2, psi2 = phi2_psi2(nf)
    got = phi2[0].coefficient((1, 1, 0, 0))
    assert abs(got - 1.0 / (lam[0] * lam[1] - lam[0])) < 1e-14
    assert psi2[0].is_zero() and psi2[1].is_zero()


def test_phi2_zero_for_linear_input():
    rng = random.Random(1)
    nf = random_nf(rng, 2)
    lin = NormalFormInput(
        2,
        JetVector([Jet.variable(j, 4, 3, nf.lam[j]) for j in range(2)]),
        JetVector([Jet.variable(2 + j, 4, 3, nf.mu[j]) for j in range(2)]),
        nf.lam,
        nf.mu,
    )
    phi2, psi2 = phi2_psi2(lin)
    assert all(p.is_zero() for p in phi2) and all(p.is_zero() for p in psi2)


def test_phi2_functional_equation_degree_two():
    """phi_j(lam xi, mu eta) - lam_j phi_j reproduces the quadratic part of p_j."""
    rng = random.Random(2)
    for _ in range(5):
        nf = random_nf(rng, 2)
        phi2, _ = phi2_psi2(nf)
        n = 4
        scaled = [Jet.variable(i, n, 3, nf.lam[i] if i < 2 else nf.mu[i - 2]) for i in range(n)]
        for j in range(2):
            lhs = phi2[j].compose(scaled) - phi2[j] * nf.lam[j]
            rhs = nf.p_jets[j].homogeneous_part(2)
            diff = lhs - rhs
            assert max((abs(c) for c in diff.coeffs.values()), default=0.0) < 1e-12


def test_phi2_resonance_error():
    lam = (cmath.exp(2j * math.pi / 3),)  # lam^3 = 1: eta^2 monomial resonates
    mu = (lam[0].conjugate(),)
    zeta = jet_variables(2, 3, coeff_one=1.0 + 0.0j)
    p = zeta[0] * lam[0] + zeta[1] * zeta[1]
    q = zeta[1] * mu[0]
    nf = NormalFormInput(1, JetVector([p]), JetVector([q]), lam, mu)
    with pytest.raises(ResonanceError):
        phi2_psi2(nf)


# ------------------------------------------------------------------ alpha


def test_alpha_zero_for_linear_map():
    lam = (cmath.exp(0.4j), cmath.exp(1.1j), cmath.exp(2.0j))
    mu = tuple(l.conjugate() for l in lam)
    n = 6
    ps = [Jet.variable(j, n, 3, lam[j]) for j in range(3)]
    qs = [Jet.variable(3 + j, n, 3, mu[j]) for j in range(3)]
    nf = NormalFormInput(3, JetVector(ps), JetVector(qs), lam, mu)
    assert np.allclose(alpha_matrix(nf), 0.0)


def test_alpha_d1_matches_closed_form_on_50_random_maps():
    rng = random.Random(3)
    for _ in range(50):
        nf = random_nf(rng, 1)
        a_mech = alpha_matrix(nf)[0, 0]
        p = nf.p_jets[0]
        q = nf.q_jets[0]
        p2 = (p.coefficient((2, 0)), p.coefficient((1, 1)), p.coefficient((0, 2)))
        q2 = (q.coefficient((2, 0)), q.coefficient((1, 1)), q.coefficient((0, 2)))
        p31 = p.coefficient((2, 1))
        a_closed = alpha2_closed_form(p2, q2, p31, nf.lam[0])
        assert abs(a_mech - a_closed) < 1e-10


def test_alpha2_closed_form_trivial_cases():
    lam = cmath.exp(0.7j)
    assert alpha2_closed_form((0, 0, 0), (0, 0, 0), 3.5, lam) == 3.5
    # lam = i is order 4 but the denominators (orders 1, 3) are fine
    val = alpha2_closed_form((1, 1, 0), (0, 0, 0), 0, 1j)
    zeta = jet_variables(2, 3, coeff_one=1.0 + 0.0j)
    p = zeta[0] * 1j + zeta[0] ** 2 + zeta[0] * zeta[1]
    q = zeta[1] * (-1j)
    nf = NormalFormInput(1, JetVector([p]), JetVector([q]), (1j,), (-1j,))
    assert abs(val - alpha_matrix(nf)[0, 0]) < 1e-12


def test_alpha2_closed_form_resonance_guard():
    with pytest.raises(ResonanceError):
        alpha2_closed_form((1, 1, 1), (1, 1, 1), 0, cmath.exp(2j * math.pi / 3))
    with pytest.raises(ResonanceError):
        alpha2_closed_form((1, 1, 1), (1, 1, 1), 0, 1.0 + 0j)


def test_functional_equation_residual_vanishes():
    rng = random.Random(5)
    for d in (1, 2, 3):
        nf = random_nf(rng, d)
        assert functional_equation_residual(nf) < 1e-9


def test_alpha_covariance_under_pair_rescaling():
    """alpha_jk -> alpha_jk * c_k^2 under positive rescaling of the k-th pair."""
    rng = random.Random(7)
    nf = random_nf(rng, 2)
    c = [rng.uniform(0.5, 2.0) for _ in range(2)]
    n = 4
    zeta = jet_variables(n, 3, coeff_one=1.0 + 0.0j)
    scale_in = [zeta[i] * c[i % 2] for i in range(n)]

    def rescale(jets, inv_scale):
        return JetVector(
            [jets[j].compose(scale_in) * (1.0 / inv_scale[j]) for j in range(2)]
        )

    nf2 = NormalFormInput(
        2,
        rescale(nf.p_jets, c),
        rescale(nf.q_jets, c),
        nf.lam,
        nf.mu,
    )
    a1 = alpha_matrix(nf)
    a2 = alpha_matrix(nf2)
    for j in range(2):
        for k in range(2):
            assert abs(a2[j, k] - a1[j, k] * c[k] ** 2) < 1e-9
    # verdict invariance
    assert (abs(twist_determinant(a1)) > 1e-6) == (abs(twist_determinant(a2)) > 1e-6)


def test_birkhoff_coefficients_relations():
    rng = random.Random(9)
    nf = random_nf(rng, 2)
    bc = birkhoff_coefficients(nf)
    for j in range(2):
        for k in range(2):
            assert abs(bc.alpha[j, k] - 1j * nf.lam[j] * bc.b[j, k]) < 1e-12
    nf1 = random_nf(rng, 1)
    bc1 = birkhoff_coefficients(nf1)
    assert bc1.gamma1 is not None
    assert abs(bc1.gamma1 - bc1.alpha[0, 0] / (1j * nf1.lam[0])) < 1e-12
    # gamma1 != 0 iff alpha2 != 0
    assert (abs(bc1.gamma1) > 1e-12) == (abs(bc1.alpha[0, 0]) > 1e-12)


def test_alpha2_continuity_in_lambda():
    rng = random.Random(11)
    p2 = (0.3 + 0.1j, -0.2 + 0.4j, 0.15 - 0.05j)
    q2 = (0.1 - 0.3j, 0.25 + 0.2j, 0.0)
    prev = None
    for k in range(20):
        theta = 0.14 + 1e-4 * k
        val = alpha2_closed_form(p2, q2, 0.5, cmath.exp(2j * math.pi * theta))
        if prev is not None:
            assert abs(val - prev) < 1e-2
        prev = val


# ------------------------------------------------------------------ twist & planarity


def test_twist_determinant_values():
    assert twist_determinant(np.eye(3)) == pytest.approx(1.0)
    rank_def = np.array([[1.0, 2.0], [2.0, 4.0]])
    assert abs(twist_determinant(rank_def)) < 1e-12


def test_nonplanarity_basic():
    omega = [0.1, 0.2, 0.3]
    assert nonplanarity_check(omega, np.eye(3))
    assert not nonplanarity_check(omega, np.zeros((3, 3)))
    singular = np.array([[1.0, 1.0, 0.0], [1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    assert not nonplanarity_check(omega, singular)


def test_nonplanarity_radius_independent():
    rng = np.random.default_rng(3)
    b = rng.normal(size=(3, 3))
    omega = rng.normal(size=3)
    assert nonplanarity_check(omega, b, domain_radius=1e-2) == nonplanarity_check(
        omega, b, domain_radius=1e-5
    )


# ------------------------------------------------------------------ Brjuno


def fibonacci_partial_sum(K):
    # for the golden ratio the convergent denominators are exactly the
    # Fibonacci numbers q_0 = q_1 = 1, q_2 = 2, ...
    q = [1, 1]
    while len(q) < K + 2:
        q.append(q[-1] + q[-2])
    return sum(math.log(q[k + 1]) / q[k] for k in range(1, K + 1))


def test_brjuno_golden_ratio_matches_fibonacci_oracle():
    theta = (math.sqrt(5) - 1) / 2
    for K in (5, 10, 20):
        res = brjuno_partial_sum(theta, K)
        assert not res.rational
        assert res.terms_used == K
        assert abs(res.partial_sum - fibonacci_partial_sum(K)) < 1e-12


def test_brjuno_rational_flag():
    res = brjuno_partial_sum(1 / 3, 20)
    assert res.rational
    exact = brjuno_partial_sum(Fraction(1, 3), 20)
    assert exact.rational


def test_brjuno_bounded_quotients_monotone():
    # theta = [0; 1, 2, 1, 2, ...] solves t^2 + 2t - 2 = 0, i.e. t = sqrt(3) - 1
    theta = math.sqrt(3) - 1
    sums = [brjuno_partial_sum(theta, K).partial_sum for K in range(2, 15)]
    assert all(b >= a for a, b in zip(sums, sums[1:]))
    assert sums[-1] < 3.0
    qs = brjuno_partial_sum(theta, 10).quotients
    assert list(qs[:6]) == [1, 2, 1, 2, 1, 2]
