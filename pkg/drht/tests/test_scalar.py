"""Tests for scalar parsing, formatting and the tolerance-aware float."""

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from drht.scalar import (
    ApproxFloat,
    ScalarParseError,
    common_denominator,
    format_scalar,
    parse_scalar,
    rationalize,
)


class TestParseScalar:
    """Literal forms accepted at the file and CLI boundary."""

    @pytest.mark.parametrize(
        "literal, expected",
        [
            ("2", Fraction(2)),
            ("3/4", Fraction(3, 4)),
            ("-1/2", Fraction(-1, 2)),
            ("6/4", Fraction(3, 2)),
            ("0.5", Fraction(1, 2)),
            ("-1.25", Fraction(-5, 4)),
            (".5", Fraction(1, 2)),
            (" 7 ", Fraction(7)),
            (3, Fraction(3)),
        ],
    )
    def test_valid_literals(self, literal, expected):
        assert parse_scalar(literal) == expected

    @pytest.mark.parametrize("literal", ["1/0", "abc", "1.", "", "1/2/3", "1e3"])
    def test_malformed_literals_raise(self, literal):
        with pytest.raises(ScalarParseError):
            parse_scalar(literal)

    def test_floats_and_bools_rejected(self):
        with pytest.raises(ScalarParseError):
            parse_scalar(0.5)
        with pytest.raises(ScalarParseError):
            parse_scalar(True)

    def test_parse_error_is_value_error(self):
        assert issubclass(ScalarParseError, ValueError)

    @given(st.fractions())
    def test_formatted_value_parses_back(self, value):
        assert parse_scalar(format_scalar(value)) == value


class TestFormatting:
    def test_integer_has_no_denominator(self):
        assert format_scalar(Fraction(4, 2)) == "2"

    def test_fraction_in_lowest_terms(self):
        assert format_scalar(Fraction(6, 4)) == "3/2"

    def test_common_denominator(self):
        assert common_denominator([Fraction(1, 2), Fraction(1, 3), 4]) == 6
        assert common_denominator([]) == 1

    def test_rationalize_uses_fixed_denominator(self):
        assert rationalize(2 ** 0.5) == Fraction(1414214, 10**6)


class TestApproxFloat:
    """Tolerance equality only belongs to the sampled float backend."""

    def test_equal_within_tolerance(self):
        assert ApproxFloat(1.0) == 1.0 + 1e-10
        assert ApproxFloat(1.0) != 1.0 + 1e-6

    def test_ordering_respects_tolerance(self):
        assert ApproxFloat(1.0) < 1.1
        assert not ApproxFloat(1.0) < 1.0 + 1e-10
        assert ApproxFloat(2.0) > 1.0

    def test_arithmetic_keeps_tolerance(self):
        total = ApproxFloat(1.0, eps=1e-3) + 0.5
        assert total.eps == 1e-3
        assert total == 1.5

    def test_not_hashable(self):
        with pytest.raises(TypeError):
            hash(ApproxFloat(1.0))

    def test_tolerance_must_be_positive(self):
        with pytest.raises(ValueError):
            ApproxFloat(1.0, eps=0)
