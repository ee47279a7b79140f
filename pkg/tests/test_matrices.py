import cmath
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import elements, random_element, signatures
from thetaplane import (
    AlgebraSignature,
    AlgMatrix,
    DomainError,
    Element,
    GaussianRational,
    JetContext,
    ParseError,
    ThetaMatrix,
    direct_sum,
    format_matrix,
    is_projector,
    is_unitary_mod,
    make_test_projector,
    mat_adjoint,
    mat_mul,
    mul_rewrite,
    parse_matrix,
    projector_violation,
    star,
)

S2 = AlgebraSignature(2)
z1, z2 = Element.z(S2, 1), Element.z(S2, 2)
zb1, zb2 = Element.zb(S2, 1), Element.zb(S2, 2)
O = Element.zero(S2)


def matrices(sig, N, max_terms=2, max_deg=2):
    return st.lists(elements(sig, max_terms, max_deg), min_size=N * N, max_size=N * N).map(
        lambda cells: AlgMatrix(sig, [cells[k * N : (k + 1) * N] for k in range(N)])
    )


def test_identity_is_unit():
    A = AlgMatrix(S2, [[z1, zb2], [O, z1 * z2]])
    assert mat_mul(AlgMatrix.identity(S2, 2), A) == A


def test_diagonal_product():
    A = AlgMatrix.diag(S2, [z1, 0])
    B = AlgMatrix.diag(S2, [zb1, 0])
    assert mat_mul(A, B) == AlgMatrix.diag(S2, [z1 * zb1, 0])


def test_square_against_rewrite_oracle():
    A = AlgMatrix(S2, [[z1, z2], [zb1, zb2]])
    got = mat_mul(A, A)
    for k in range(2):
        for l in range(2):
            want = sum((mul_rewrite(A[k, j], A[j, l]) for j in range(2)), O)
            assert got[k, l] == want


def test_adjoint_examples():
    I = AlgMatrix.identity(S2, 2)
    assert mat_adjoint(I) == I
    A = AlgMatrix(S2, [[O, z1], [O, O]])
    assert mat_adjoint(A) == AlgMatrix(S2, [[O, O], [zb1, O]])
    assert mat_adjoint(mat_adjoint(A)) == A


def test_is_projector_examples():
    assert is_projector(AlgMatrix.diag(S2, [1, 0]))
    assert not is_projector(AlgMatrix.diag(S2, [z1, 0]))


def test_violation_reports_top_coefficient():
    which, k, l, idx, c = projector_violation(AlgMatrix.diag(S2, [z1, 0]))
    assert (which, k, l) == ("P^2-P", 0, 0)
    assert idx.p == (2, 0) and c == 1


def test_unitaries():
    assert is_unitary_mod(AlgMatrix.identity(S2, 3))
    # (3 + 4i)/5 style rotation with Gaussian-rational entries
    c, s = GaussianRational(3) / 5, GaussianRational(0, 4) / 5
    R = AlgMatrix.from_scalars(S2, [[c, s], [s, c]])
    assert is_unitary_mod(R)


def test_truncated_exponential_is_unitary():
    _, V = make_test_projector(2, 2, 2, 1, 3)
    assert is_unitary_mod(V, JetContext(3))
    assert not is_unitary_mod(V, JetContext(None))


def test_direct_sum():
    one = AlgMatrix.identity(S2, 1)
    assert direct_sum(one, one) == AlgMatrix.identity(S2, 2)
    P = AlgMatrix.diag(S2, [1, 0])
    Z = AlgMatrix.zeros(S2, 1)
    assert is_projector(direct_sum(P, Z))
    assert not is_projector(direct_sum(AlgMatrix.diag(S2, [z1, 0]), Z))


def test_pll_identity_on_projector():
    P, _ = make_test_projector(4, 2, 3, 1, 3)
    ctx = JetContext(3)
    for k in range(3):
        s = sum((mat_mul(AlgMatrix(S2, [[P[k, l]]]), AlgMatrix(S2, [[star(P[k, l])]]), ctx)[0, 0] for l in range(3)), O)
        assert s == P[k, k]


@given(st.data())
@settings(max_examples=25)
def test_associative_and_anti_multiplicative(data):
    sig = data.draw(signatures(2))
    A, B, C = (data.draw(matrices(sig, 2)) for _ in range(3))
    assert mat_mul(mat_mul(A, B), C) == mat_mul(A, mat_mul(B, C))
    assert mat_adjoint(mat_mul(A, B)) == mat_mul(mat_adjoint(B), mat_adjoint(A))


@given(st.data(), st.integers(0, 3))
@settings(max_examples=25)
def test_truncation_compatible(data, D):
    sig = data.draw(signatures(2))
    A, B = data.draw(matrices(sig, 2)), data.draw(matrices(sig, 2))
    ctx = JetContext(D)
    assert mat_mul(A, B, ctx) == mat_mul(A.truncate(D), B.truncate(D), ctx)
    assert mat_mul(A, B, ctx) == mat_mul(A, B).truncate(D)


class TestFileFormat:
    TEXT = "# demo\nmatrix N=2 m=4 mode=exact\n[1,1] 1\n[2,1] zb2*z1   # swapped\n"

    def test_parse_and_canonical_format(self):
        A = parse_matrix(self.TEXT)
        assert A[0, 1].is_zero()
        assert format_matrix(A) == "matrix N=2 m=4 mode=exact\n[1,1] 1\n[2,1] L[2,1]^-1 * z1*zb2\n"
        assert parse_matrix(format_matrix(A)) == A

    @pytest.mark.parametrize(
        "text",
        [
            "",
            "matrix N=2 m=4\n",
            "matrix N=2 m=4 mode=exact\n[1,1] 1\n[1,1] 0\n",
            "matrix N=2 m=4 mode=exact\n[3,1] 1\n",
            "matrix N=2 m=4 mode=exact\n[1,1] z3\n",
            "matrix N=2 m=4 mode=exact\n1,1 z1\n",
            "matrix N=1 m=4 mode=numeric\n[1,1] 1\n",
        ],
    )
    def test_rejects(self, text):
        with pytest.raises(ParseError):
            parse_matrix(text)

    def test_error_line_number(self):
        with pytest.raises(ParseError) as info:
            parse_matrix("matrix N=2 m=4 mode=exact\n[1,1] 1\n[2,2] z1 +\n")
        assert info.value.line == 3

    def test_numeric_with_theta(self):
        th = ThetaMatrix(2, {(2, 1): 0.3})
        A = parse_matrix("matrix N=1 m=4 mode=numeric\n[1,1] 0.5*zb2*z1\n", th)
        assert abs(A[0, 0].coefficient(((1, 0), (0, 1))) - 0.5 * cmath.exp(-0.3j)) < 1e-12

    @pytest.mark.parametrize("seed", range(10))
    def test_random_round_trip(self, seed):
        rng = random.Random(seed)
        n = rng.randint(1, 3)
        sig = AlgebraSignature(n, 2 * n + rng.randint(0, 1))
        N = rng.randint(1, 3)
        A = AlgMatrix(sig, [[random_element(rng, sig, 3, 3) if rng.random() < 0.7 else Element.zero(sig) for _ in range(N)] for _ in range(N)])
        assert parse_matrix(format_matrix(A)) == A


def test_shape_checks():
    with pytest.raises(DomainError):
        AlgMatrix(S2, [[z1, z2]])
    with pytest.raises(DomainError):
        mat_mul(AlgMatrix.identity(S2, 2), AlgMatrix.identity(S2, 3))
    with pytest.raises(DomainError):
        JetContext(-1)
