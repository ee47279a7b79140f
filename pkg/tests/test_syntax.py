import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from strategies import elements, signatures
from thetaplane import AlgebraSignature, Element, MultiIndex, ParseError, ThetaMatrix, format_element, parse_element, star
from thetaplane.syntax import format_definitions, format_index, format_monomial, parse_definitions

S2 = AlgebraSignature(2)


def test_monomial():
    e = parse_element("z1^2*zb2", S2)
    assert e.support() == [MultiIndex((2, 0), (0, 1))]


def test_star_call():
    z1, z2 = Element.z(S2, 1), Element.z(S2, 2)
    assert parse_element("star(z1*z2)", S2) == star(z1 * z2)


def test_zero():
    assert format_element(Element.zero(S2)) == "0"


def test_normal_order_printing():
    assert format_element(parse_element("zb2*z1", S2)) == "L[2,1]^-1 * z1*zb2"


def test_graded_lex_order():
    assert format_element(parse_element("z1^2 + 1 + zb1", S2)) == "1 + zb1 + z1^2"


def test_coefficient_forms():
    assert format_element(parse_element("-3/2*z1 + (1+2*i)*z2 + i*zb1", S2)) == "i * zb1 + (1 + 2*i) * z2 - 3/2 * z1"


def test_leading_minus_and_negative_phase_power():
    assert parse_element("-L[2,1]^-2*z1", S2) == -(parse_element("L[1,2]^2", S2) * Element.z(S2, 1))


def test_decimal_in_exact_mode_is_exact():
    assert parse_element("0.25", S2) == parse_element("1/4", S2)


def test_whitespace_insignificant():
    assert parse_element(" z1 *  zb2 ^ 2 ", S2) == parse_element("z1*zb2^2", S2)


@pytest.mark.parametrize(
    "text",
    ["z9", "z1 z2", "x", "z1^-1", "L[3,1]", "(z1", "z1 +", "star z1", "q", "1/0", "z1 $ z2"],
)
def test_rejects(text):
    with pytest.raises(ParseError):
        parse_element(text, S2)


def test_error_carries_position():
    with pytest.raises(ParseError) as info:
        parse_element("z1 + z7", S2)
    assert info.value.pos == 5


def test_phase_rejected_in_numeric_mode():
    sig = AlgebraSignature(2, 4, "numeric", ThetaMatrix(2))
    with pytest.raises(ParseError):
        parse_element("L[2,1]", sig)


def test_x_allowed_for_odd_m():
    sig = AlgebraSignature(1, 3)
    assert parse_element("x*z1", sig) == parse_element("z1*x", sig)


def test_format_helpers():
    idx = MultiIndex((2, 0), (0, 1), 1)
    assert format_monomial(idx) == "z1^2*zb2*x"
    assert format_index(idx) == "(2,0;0,1;1)"
    assert format_index(MultiIndex((2, 0), (0, 0))) == "(2,0;0,0)"


def test_definitions_round_trip():
    text = "# header\na = zb2*z1\nb=star(z1)  # comment\n"
    defs = parse_definitions(text, S2)
    assert format_definitions(defs) == "a = L[2,1]^-1 * z1*zb2\nb = zb1\n"
    assert parse_definitions(format_definitions(defs), S2) == defs


@pytest.mark.parametrize("text", ["a = z1\na = z2\n", "= z1\n", "a z1\n", "a = z9\n"])
def test_definitions_reject(text):
    with pytest.raises(ParseError):
        parse_definitions(text, S2)


@given(st.data())
@settings(max_examples=150)
def test_round_trip_exact(data):
    sig = data.draw(signatures(3))
    a = data.draw(elements(sig, 5, 4))
    text = format_element(a)
    assert parse_element(text, sig) == a
    assert format_element(parse_element(text, sig)) == text


@given(st.data())
@settings(max_examples=60)
def test_round_trip_numeric(data):
    sig0 = data.draw(signatures(3))
    sig = AlgebraSignature(sig0.n, sig0.m, "numeric", ThetaMatrix(sig0.n))
    a = data.draw(elements(sig, 5, 4))
    assert parse_element(format_element(a), sig).equals(a, 0.0)
