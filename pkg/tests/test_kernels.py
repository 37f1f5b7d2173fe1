import numpy as np
import pytest

from qschur.blaschke import ZeroSet, blaschke_factor, build_product, product_inverse
from qschur.errors import DivergenceError, DomainError
from qschur.kernels import (
    DoubleSeriesKernel,
    SchurFunction,
    base_kernel,
    estimate_dim_HB,
    estimate_neg_squares,
    gram,
    kernel_identity_check,
    moebius_identity_check,
    sample_gram_vectors,
    schur_kernel_eval,
)
from qschur.qlinalg import SignatureMatrix, herm_eigen_neg
from qschur.quat import I, ONE, Quaternion, sample_ball_point

def brute_series(p, q, terms=400):
    acc = Quaternion()
    pn = Quaternion.from_real(1.0)
    qn = Quaternion.from_real(1.0)
    for _ in range(terms):
        acc = acc + pn * qn.conj()
        pn = pn * p
        qn = qn * q
    return acc


def test_base_kernel_examples(rng):
    assert base_kernel("ball", Quaternion(0.3, 0.1, 0, 0), Quaternion()).isclose(ONE)
    p, q = 0.4, -0.3
    assert base_kernel("ball", Quaternion.from_real(p), Quaternion.from_real(q)).isclose(
        Quaternion.from_real(1.0 / (1.0 - p * q))
    )
    x = 0.7
    assert base_kernel(
        "halfspace", Quaternion.from_real(x), Quaternion.from_real(x)
    ).isclose(Quaternion.from_real(1.0 / (2 * x)))


def test_base_kernel_matches_series(rng):
    for _ in range(30):
        p = sample_ball_point(rng, 0.8)
        q = sample_ball_point(rng, 0.8)
        closed = base_kernel("ball", p, q)
        series = brute_series(p, q)
        tail = (p.norm() * q.norm()) ** 400 / (1 - p.norm() * q.norm())
        assert (closed - series).norm() <= 1e-11 + tail


def test_base_kernel_divergence():
    with pytest.raises(DivergenceError):
        base_kernel("ball", Quaternion.from_real(1.2), Quaternion.from_real(0.9))


def test_schur_kernel_zero_function(rng):
    zero = SchurFunction.constant(Quaternion())
    for _ in range(10):
        p = sample_ball_point(rng, 0.8)
        q = sample_ball_point(rng, 0.8)
        val = schur_kernel_eval(zero, p, q, tol=1e-12).as_quaternion()
        assert val.isclose(base_kernel("ball", p, q), 1e-10)


def test_schur_kernel_unitary_constant_vanishes(rng):
    s = SchurFunction.constant(I)  # |i| = 1, so 1 - S S^* = 0
    p = sample_ball_point(rng, 0.7)
    q = sample_ball_point(rng, 0.7)
    assert schur_kernel_eval(s, p, q).norm() < 1e-14


def test_schur_kernel_diag_positive(rng):
    s = SchurFunction.from_rational(blaschke_factor("ball", "point", Quaternion(0, 0.5, 0, 0)))
    for _ in range(20):
        w = sample_ball_point(rng, 0.85)
        val = schur_kernel_eval(s, w, w).as_quaternion()
        assert val.re >= -1e-10
        assert val.imag_modulus() < 1e-9


def test_truncation_consistency(rng):
    s = SchurFunction.from_rational(blaschke_factor("ball", "point", Quaternion(0.1, 0.4, 0, 0)))
    for _ in range(10):
        p = sample_ball_point(rng, 0.8)
        q = sample_ball_point(rng, 0.8)
        v1 = schur_kernel_eval(s, p, q, tol=1e-8)
        v2 = schur_kernel_eval(s, p, q, tol=1e-9)
        assert (v1 - v2).norm() < 1e-8


def test_gram_hermitian_and_positive(rng):
    a = Quaternion(0, 0.5, 0, 0)
    s = SchurFunction.from_rational(blaschke_factor("ball", "point", a))
    pts = np.array([sample_ball_point(rng, 0.8).as_array() for _ in range(12)])
    vecs = sample_gram_vectors(rng, 12, 1)
    raw = gram(s, pts, vecs, hermitize=False)
    assert raw.herm_residual() < 1e-10 * max(1.0, raw.norm())
    g = gram(s, pts, vecs, tol=1e-12)
    eigs, neg = herm_eigen_neg(g)
    assert neg == 0
    assert np.min(eigs) > -1e-10
    g3 = gram(s, pts[:3], vecs[:3], tol=1e-12)
    eigs3, _ = herm_eigen_neg(g3)
    assert np.min(eigs3) > -1e-10

    zero = SchurFunction.constant(Quaternion())
    w = sample_ball_point(rng, 0.5)
    g1 = gram(zero, [w], sample_gram_vectors(rng, 1, 1))
    assert g1.entry(0, 0).re > 0.0


def test_neg_squares_schur_zero(rng):
    s = SchurFunction.from_rational(blaschke_factor("ball", "point", Quaternion(0, 0.5, 0, 0)))
    rep = estimate_neg_squares(s, trials=25, batch=25, seed=3)
    assert rep.kappa_hat == 0


def test_neg_squares_inverse_factor():
    b = build_product(ZeroSet("ball", points=[(Quaternion(0, 0.5, 0, 0), 1)]))
    s = SchurFunction.from_rational(product_inverse(b).rational)
    rep = estimate_neg_squares(s, trials=25, batch=25, seed=3)
    assert rep.kappa_hat == 1


def test_neg_squares_degree_two():
    b = build_product(
        ZeroSet("ball", points=[(Quaternion(0, 0.5, 0, 0), 1),
                                (Quaternion(0.3, 0, 0.5, 0), 1)])
    )
    s0 = SchurFunction.from_product(
        build_product(ZeroSet("ball", points=[(Quaternion(0, 0, 0.3, 0), 1)]))
    )
    s = SchurFunction.star_quotient(product_inverse(b).rational, s0)
    rep = estimate_neg_squares(s, trials=40, batch=35, seed=3)
    assert rep.kappa_hat == 2


def test_neg_squares_monotone_in_trials():
    b = build_product(ZeroSet("ball", points=[(Quaternion(0, 0.5, 0, 0), 1)]))
    s = SchurFunction.from_rational(product_inverse(b).rational)
    values = [
        estimate_neg_squares(s, trials=t, batch=20, seed=12).kappa_hat
        for t in (1, 5, 15)
    ]
    assert values == sorted(values)


def test_neg_squares_requires_ball():
    s = SchurFunction.constant(Quaternion.from_real(0.5), domain="halfspace")
    with pytest.raises(DomainError):
        estimate_neg_squares(s, trials=1)


def test_neg_squares_report_json():
    s = SchurFunction.constant(Quaternion.from_real(0.5))
    rep = estimate_neg_squares(s, trials=2, batch=5, seed=1)
    doc = rep.to_json()
    assert doc["kappa_hat"] == 0 and doc["trials"] == 2
    assert len(doc["witness"]["points"]) == 5
    assert len(doc["witness"]["eigenvalues"]) == 5


def test_dim_hb_examples():
    b1 = build_product(ZeroSet("ball", points=[(Quaternion(0, 0.5, 0, 0), 1)]))
    assert estimate_dim_HB(b1).dim == 1
    bs = build_product(ZeroSet("ball", spheres=[(Quaternion(0.2, 0.4, 0, 0), 1)]))
    assert estimate_dim_HB(bs).dim == 2
    b3 = build_product(ZeroSet("ball", points=[(Quaternion(0.2, 0.5, 0, 0), 3)]))
    assert estimate_dim_HB(b3).dim == 3


def test_dim_hb_rejects_inverse_factors():
    b = build_product(ZeroSet("ball", points=[(Quaternion(0, 0.5, 0, 0), 1)]))
    with pytest.raises(DomainError):
        estimate_dim_HB(product_inverse(b))


def test_dim_hb_warning_on_few_points(rng):
    b = build_product(ZeroSet("ball", points=[(Quaternion(0.2, 0.5, 0, 0), 3)]))
    pts = np.array([sample_ball_point(rng, 0.7).as_array() for _ in range(4)])
    rep = estimate_dim_HB(b, points=pts)
    assert rep.warning is not None


def test_kernel_identity_trivial_cases():
    from qschur.blaschke import FactoredProduct

    s0 = SchurFunction.constant(Quaternion.from_real(0.7))
    empty = FactoredProduct.identity("ball")
    rep = kernel_identity_check(s0, empty, s0, trunc=24)
    assert rep.status == "ok"
    assert rep.max_coeff_dev < 1e-14
    assert rep.hermitian_residual < 1e-10


def test_kernel_identity_inverse_factor_case():
    b = build_product(ZeroSet("ball", points=[(Quaternion(0, 0.5, 0, 0), 1)]))
    s0 = SchurFunction.constant(Quaternion.from_real(1.0))
    s = SchurFunction.star_quotient(product_inverse(b).rational, s0)
    rep = kernel_identity_check(s, b, s0, trunc=40)
    assert rep.status == "ok"
    assert rep.min_gram_eig >= -1e-8
    assert rep.hermitian_residual < 1e-10


def test_kernel_identity_nontrivial_case():
    b = build_product(
        ZeroSet("ball", points=[(Quaternion(0, 0.5, 0, 0), 1),
                                (Quaternion(0.3, 0, 0.5, 0), 1)])
    )
    s0 = SchurFunction.from_product(
        build_product(ZeroSet("ball", points=[(Quaternion(0, 0, 0.3, 0), 1)]))
    )
    s = SchurFunction.star_quotient(product_inverse(b).rational, s0)
    rep = kernel_identity_check(s, b, s0, trunc=48)
    assert rep.status == "ok"
    assert rep.max_coeff_dev < 1e-9
    assert rep.min_gram_eig >= -1e-8
    small = kernel_identity_check(s, b, s0, trunc=6)
    assert small.status == "inconclusive"


def test_double_series_kernel_hermitian():
    s = SchurFunction.from_rational(blaschke_factor("ball", "point", Quaternion(0, 0.5, 0, 0)))
    one = SignatureMatrix.identity(1)
    k = DoubleSeriesKernel.from_schur_taylor(s.taylor(12), one.matrix, one.matrix, 12)
    assert k.hermitian_residual() < 1e-12


def test_moebius_identity(rng):
    s = SchurFunction.from_rational(blaschke_factor("ball", "point", Quaternion(0.1, 0.4, 0, 0)))
    p = sample_ball_point(rng, 0.6)
    q = sample_ball_point(rng, 0.6)
    assert moebius_identity_check(s, 0.0, p, q) < 1e-12

    zero = SchurFunction.constant(Quaternion())
    for _ in range(5):
        p = sample_ball_point(rng, 0.6)
        q = sample_ball_point(rng, 0.6)
        assert moebius_identity_check(zero, 0.3, p, q) < 1e-10

    for _ in range(20):
        p = sample_ball_point(rng, 0.55)
        q = sample_ball_point(rng, 0.55)
        assert moebius_identity_check(s, 0.3, p, q) < 1e-9


def test_schur_kernel_divergence():
    s = SchurFunction.constant(Quaternion.from_real(0.5))
    with pytest.raises(DivergenceError):
        schur_kernel_eval(s, Quaternion.from_real(1.1), Quaternion.from_real(0.95))


def test_blaschke_taylor_head():
    # B_a(0) = |a| shows up as the zeroth Taylor coefficient
    rat = blaschke_factor("ball", "point", Quaternion(0, 0.5, 0, 0))
    head = rat.taylor(3).coeff(0).as_quaternion()
    assert head.isclose(Quaternion.from_real(0.5), 1e-14)


def test_witness_reproduces_kappa_hat():
    b = build_product(ZeroSet("ball", points=[(Quaternion(0, 0.5, 0, 0), 1)]))
    s = SchurFunction.from_rational(product_inverse(b).rational)
    rep = estimate_neg_squares(s, trials=10, batch=20, seed=2)
    pts = np.array(rep.witness_points)
    vecs = np.array(rep.witness_vectors)
    g = gram(s, pts, vecs)
    _, neg = herm_eigen_neg(g, rep.cutoff)
    assert neg == rep.kappa_hat


def test_moebius_index_invariance():
    # Lemma-style invariance: kappa-hat of S o b matches kappa-hat of S
    b = build_product(ZeroSet("ball", points=[(Quaternion(0, 0.5, 0, 0), 1)]))
    s = SchurFunction.from_rational(product_inverse(b).rational)
    x0 = 0.3
    composed = SchurFunction.compose_real_mobius(s, x0, 1.0, 1.0, x0)
    k1 = estimate_neg_squares(s, trials=25, batch=25, seed=6).kappa_hat
    k2 = estimate_neg_squares(composed, trials=25, batch=25, seed=6).kappa_hat
    assert k1 == k2 == 1


def test_source_agreement_detects_mismatch(rng):
    rat = blaschke_factor("ball", "point", Quaternion(0, 0.5, 0, 0))
    good = SchurFunction.from_rational(rat)
    pts = np.array([sample_ball_point(rng, 0.6).as_array() for _ in range(5)])
    assert good.source_agreement(pts) == 0.0
    other = blaschke_factor("ball", "point", Quaternion(0, 0.4, 0, 0))
    tampered = SchurFunction(
        "ball", 1, 1, eval_many_fn=rat.eval_many,
        extra_eval_fns=(other.eval_many,),
    )
    assert tampered.source_agreement(pts) > 1e-3
