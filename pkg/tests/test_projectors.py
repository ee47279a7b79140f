import random
from fractions import Fraction

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import elements, random_constant_projector, signatures
from thetaplane import (
    AlgebraSignature,
    AlgMatrix,
    DiagonalizationError,
    Element,
    ExactScalar,
    GaussianRational,
    JetContext,
    NotAProjectorError,
    ScalarMatrix,
    ThetaMatrix,
    assert_scalar_projector_poly,
    diagonalize_scalar_projector,
    evaluate_matrix,
    gram_decomposition,
    is_projector,
    make_test_projector,
    mat_adjoint,
    mat_mul,
    parse_report,
    scalar_part,
    solve_polynomial_projectors,
    top_gram_check,
    trivialize,
)
from thetaplane.projectors import monomials_up_to

S1 = AlgebraSignature(1)
S2 = AlgebraSignature(2)
HALF = Fraction(1, 2)


def averaging(sig):
    return AlgMatrix.from_scalars(sig, [[HALF, HALF], [HALF, HALF]])


class TestScalarPart:
    def test_constant(self):
        P = AlgMatrix.diag(S2, [1, 0])
        assert scalar_part(P) == ScalarMatrix.from_rows([[1, 0], [0, 0]], 2)

    def test_ignores_positive_degree(self):
        P = AlgMatrix.diag(S2, [1, 0])
        Q = P + AlgMatrix(S2, [[Element.zero(S2), Element.z(S2, 1)], [Element.zero(S2)] * 2])
        assert scalar_part(Q) == scalar_part(P)

    @given(st.data())
    @settings(max_examples=25)
    def test_multiplicative(self, data):
        sig = data.draw(signatures(2))
        cells = [data.draw(elements(sig, 3, 2)) for _ in range(8)]
        A = AlgMatrix(sig, [cells[0:2], cells[2:4]])
        B = AlgMatrix(sig, [cells[4:6], cells[6:8]])
        assert scalar_part(mat_mul(A, B)) == scalar_part(A) @ scalar_part(B)


class TestDiagonalize:
    def test_standard(self):
        Q, r = diagonalize_scalar_projector(ScalarMatrix.from_rows([[1, 0], [0, 0]], 2))
        assert r == 1 and Q == ScalarMatrix.from_rows([[1, 0], [0, 1]], 2)

    def test_zero(self):
        Q, r = diagonalize_scalar_projector(ScalarMatrix.from_rows([[0, 0], [0, 0]], 2))
        assert r == 0 and Q == ScalarMatrix.from_rows([[1, 0], [0, 1]], 2)

    def test_averaging_numeric_against_eigh(self):
        A = ScalarMatrix.from_rows([[0.5, 0.5], [0.5, 0.5]], exact=False)
        Q, r = diagonalize_scalar_projector(A)
        assert r == 1
        Qn = Q.to_numpy()
        # first row of Q is the unit eigenvector (1,1)/sqrt2 up to a phase
        w, vecs = np.linalg.eigh(A.to_numpy())
        top = vecs[:, np.argmax(w)]
        assert abs(abs(np.vdot(top, Qn[0].conj())) - 1) < 1e-12
        assert np.allclose(Qn @ A.to_numpy() @ Qn.conj().T, np.diag([1, 0]), atol=1e-12)
        assert np.allclose(Qn @ Qn.conj().T, np.eye(2), atol=1e-12)

    def test_averaging_exact(self):
        A = scalar_part(averaging(S2))
        Q, r = diagonalize_scalar_projector(A)
        assert r == 1
        assert Q @ A @ Q.adjoint() == ScalarMatrix.from_rows([[1, 0], [0, 0]], 2)
        assert Q @ Q.adjoint() == ScalarMatrix.from_rows([[1, 0], [0, 1]], 2)

    def test_phase_twisted_averaging(self):
        L = ExactScalar.phase(2, {(2, 1): 1})
        A = ScalarMatrix.from_rows([[HALF, L * HALF], [L.conj() * HALF, HALF]], 2)
        Q, r = diagonalize_scalar_projector(A)
        assert r == 1
        assert Q @ A @ Q.adjoint() == ScalarMatrix.from_rows([[1, 0], [0, 0]], 2)

    def test_norm_outside_gaussian_rationals(self):
        # range spanned by (1,1,1), whose squared norm 3 is no sum of two rational squares
        third = Fraction(1, 3)
        with pytest.raises(DiagonalizationError):
            diagonalize_scalar_projector(ScalarMatrix.from_rows([[third] * 3] * 3, 2))

    def test_not_a_projector(self):
        with pytest.raises(NotAProjectorError):
            diagonalize_scalar_projector(ScalarMatrix.from_rows([[2, 0], [0, 0]], 2))
        with pytest.raises(NotAProjectorError):
            diagonalize_scalar_projector(ScalarMatrix.from_rows([[0.5, 0.5j], [0.5j, 0.5]], exact=False))


class TestGram:
    def test_single_generator(self):
        P = AlgMatrix(S1, [[Element.z(S1, 1)]])
        assert top_gram_check(P, 0, (1,)) == 1

    def test_scalar(self):
        assert top_gram_check(AlgMatrix.identity(S1, 1), 0, (1,)) == 0

    def test_projector_top_degree_vanishes(self):
        P = averaging(S2)
        assert top_gram_check(P, 0, (0, 0)) == HALF
        assert top_gram_check(P, 1, (1, 0)) == 0

    def test_diagonal_matches_pqm(self):
        P = AlgMatrix(S2, [[Element.z(S2, 1) * Element.zb(S2, 2) + Element.z(S2, 2) * Element.zb(S2, 1)]])
        diagonal, cross = gram_decomposition(P, 0, (1, 1))
        L = ExactScalar.phase(2, {(2, 1): 1})
        assert diagonal == L * 2

    @given(st.data())
    @settings(max_examples=40)
    def test_two_computations_agree_on_hermitian(self, data):
        sig = data.draw(signatures(2))
        cells = [data.draw(elements(sig, 4, 3)) for _ in range(4)]
        B = AlgMatrix(sig, [cells[:2], cells[2:]])
        H = B + mat_adjoint(B)
        M = tuple(data.draw(st.integers(0, 2)) for _ in range(sig.n))
        t = data.draw(st.integers(0, 2)) if sig.odd else 0
        top_gram_check(H, data.draw(st.integers(0, 1)), M, t)

    def test_projector_rows_balance(self):
        P, _ = make_test_projector(1, 2, 2, 1, 3)
        # degree-0 part of (pll): P_kk's constant equals the Gram value at M=0
        for k in range(2):
            assert top_gram_check(P, k, (0, 0)) == P[k, k].coefficient(((0, 0), (0, 0)))


class TestRigidity:
    @pytest.mark.parametrize("n,m", [(1, 2), (1, 3), (2, 4), (2, 5)])
    @pytest.mark.parametrize("N", [1, 2])
    @pytest.mark.parametrize("D", [1, 2])
    def test_only_scalars_survive(self, n, m, N, D):
        rep = solve_polynomial_projectors(AlgebraSignature(n, m), N, D)
        assert rep.only_scalar
        killed = {i for step in rep.steps for i in step[2]}
        assert killed == set(monomials_up_to(AlgebraSignature(n, m), D)) - {rep.surviving[0]}

    def test_sympy_brute_force_smallest_case(self):
        # N = 1, n = 1, degree <= 1: P = a + b z + c zb with a, b, c complex
        ar, ai, br, bi, cr, ci = sympy.symbols("ar ai br bi cr ci", real=True)
        z, w = sympy.symbols("z w")  # n = 1 is commutative
        a, b, c = ar + sympy.I * ai, br + sympy.I * bi, cr + sympy.I * ci
        P = a + b * z + c * w
        Pstar = sympy.conjugate(a) + sympy.conjugate(b) * w + sympy.conjugate(c) * z
        eqs = sympy.Poly(sympy.expand(P * P - P), z, w).coeffs() + sympy.Poly(sympy.expand(Pstar - P), z, w).coeffs()
        eqs = [e for eq in eqs for e in (sympy.re(eq), sympy.im(eq)) if e != 0]
        sols = sympy.solve(eqs, [ar, ai, br, bi, cr, ci], dict=True)
        for s in sols:
            assert s.get(br, 0) == 0 and s.get(bi, 0) == 0 and s.get(cr, 0) == 0 and s.get(ci, 0) == 0
        assert {s[ar] for s in sols} == {0, 1}

    def test_constant_projectors_pass(self):
        assert assert_scalar_projector_poly(AlgMatrix.diag(S2, [1, 0])) == []
        assert assert_scalar_projector_poly(averaging(S2)) == []

    def test_non_idempotent_refused(self):
        z1 = Element.z(S2, 1)
        with pytest.raises(NotAProjectorError):
            assert_scalar_projector_poly(AlgMatrix.diag(S2, [z1 * Element.zb(S2, 1), 0]))


@pytest.mark.parametrize("seed", range(20))
def test_fuzz_constant_projectors(seed):
    rng = random.Random(seed)
    sig = AlgebraSignature(rng.randint(1, 3))
    P = random_constant_projector(rng, sig, rng.randint(1, 3))
    assert is_projector(P)
    assert assert_scalar_projector_poly(P) == []


class TestTrivialize:
    @pytest.mark.parametrize("r", [0, 1, 2])
    def test_constant_standard(self, r):
        P = AlgMatrix.standard_projector(S2, 2, r)
        res = trivialize(P, JetContext(3))
        assert res.rank == r and res.U == AlgMatrix.identity(S2, 2)
        assert res.residual_P == 0 and res.residual_U == 0

    def test_one_by_one(self):
        res = trivialize(AlgMatrix.identity(S2, 1), JetContext(2))
        assert res.rank == 1 and res.U == AlgMatrix.identity(S2, 1)

    @pytest.mark.parametrize("seed", range(6))
    def test_generated(self, seed):
        P, V = make_test_projector(seed, 2, 2, 1, 3)
        res = trivialize(P, JetContext(3))
        assert res.rank == 1
        assert res.residual_P == 0 and res.residual_U == 0
        ctx = JetContext(3)
        E = AlgMatrix.standard_projector(S2, 2, 1)
        assert mat_mul(mat_mul(res.U, P, ctx), mat_adjoint(res.U), ctx) == E

    def test_averaging(self):
        res = trivialize(averaging(S2), JetContext(2))
        assert res.rank == 1 and res.residual_P == 0

    @pytest.mark.parametrize("m", [3, 5])
    def test_odd_m(self, m):
        P, _ = make_test_projector(11, (m - 1) // 2, 2, 1, 3, m)
        res = trivialize(P, JetContext(3))
        assert res.rank == 1 and res.residual_P == 0 and res.residual_U == 0

    def test_conjugation_invariance(self):
        P, _ = make_test_projector(5, 2, 2, 1, 3)
        c, s = GaussianRational(3) / 5, GaussianRational(0, 4) / 5
        W = AlgMatrix.from_scalars(S2, [[c, s], [s, c]])
        ctx = JetContext(3)
        WP = mat_mul(mat_mul(W, P, ctx), mat_adjoint(W), ctx)
        res = trivialize(WP, ctx)
        assert res.rank == 1 and res.residual_P == 0 and res.residual_U == 0

    def test_numeric_mode(self):
        th = ThetaMatrix(2, {(2, 1): 0.4})
        P, _ = make_test_projector(2, 2, 2, 1, 3)
        Pn = evaluate_matrix(P, th)
        res = trivialize(Pn, JetContext(3, 1e-9))
        assert res.rank == 1 and res.residual_P < 1e-9 and res.residual_U < 1e-9

    def test_rejects_non_projector(self):
        with pytest.raises(NotAProjectorError):
            trivialize(AlgMatrix.diag(S2, [Element.z(S2, 1), 0]), JetContext(3))

    def test_report_round_trip(self):
        res = trivialize(make_test_projector(0, 2, 2, 1, 3)[0], JetContext(3))
        line = res.report()
        assert line == "rank=1 degree=3 residual_P=0 residual_U=0"
        assert parse_report(line) == {"rank": 1, "degree": 3, "residual_P": 0, "residual_U": 0}
        assert parse_report("rank=2 degree=4 residual_P=1.5e-12 residual_U=0.0")["residual_P"] == 1.5e-12


class TestGenerator:
    def test_rank_zero_is_zero(self):
        P, _ = make_test_projector(3, 2, 2, 0, 3)
        assert P.is_zero()

    def test_full_rank_is_identity(self):
        P, _ = make_test_projector(3, 2, 2, 2, 3)
        assert P == AlgMatrix.identity(S2, 2)

    @pytest.mark.parametrize("seed", range(5))
    def test_projector_with_rank(self, seed):
        P, _ = make_test_projector(seed, 2, 3, 2, 3)
        assert is_projector(P, JetContext(3))
        A = scalar_part(P)
        assert sum((A[k, k] for k in range(3)), ExactScalar(2)) == 2

    def test_deterministic(self):
        a, _ = make_test_projector(9, 2, 2, 1, 2)
        b, _ = make_test_projector(9, 2, 2, 1, 2)
        assert a == b

    def test_skew_generator_has_degree_one(self):
        _, V = make_test_projector(4, 2, 2, 1, 1)
        A = V - AlgMatrix.identity(S2, 2)
        assert A.degree() == 1 and mat_adjoint(A) == -A
