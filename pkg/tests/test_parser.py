import unittest

import numpy as np

from cosymcr.errors import ArityError, ExpressionSyntaxError, UnknownIdentifierError
from cosymcr.expr.evaluation import evaluate, evaluate_batch
from cosymcr.expr.expression import to_source
from cosymcr.expr.parser import parse_expression, tokenize
from cosymcr.fields.chart import ChartDecl


class TestExpressionParser(unittest.TestCase):
    """Unit tests for parsing coordinate expressions"""

    @classmethod
    def setUpClass(cls):
        """Charts used throughout: n = 1 with named coordinates, and default n = 2."""
        cls.chart = ChartDecl(1, names=("t", "x", "y"), parameters=("mu",))
        cls.chart2 = ChartDecl(2)
        cls.point = [0.3, -0.4, 0.7]

    def assertValue(self, source, expected, params=None, chart=None, point=None):
        """Helper comparing the parsed expression's value with a Python-computed one."""
        e = parse_expression(source, chart or self.chart)
        value = evaluate(e, point or self.point, params or {"mu": 1.5})
        self.assertTrue(abs(value - expected) < 1e-12, f"\n🔴 Expected: {expected}\n🟢 Got: {value} for {source!r}")

    def test_precedence(self):
        """* binds tighter than +, ^ tighter than unary minus"""
        self.assertValue("1 + 2*3", 7)
        self.assertValue("-x^2", -(0.4 ** 2))
        self.assertValue("(1 + 2)*3", 9)

    def test_left_associativity(self):
        self.assertValue("8 - 3 - 2", 3)
        self.assertValue("8/4/2", 1)

    def test_coordinates_parameters_and_functions(self):
        t, x, y = self.point
        self.assertValue("mu*x + exp(t)", 1.5 * x + np.exp(t))
        self.assertValue("cosh(t)^2 - sinh(t)^2", 1)
        self.assertValue("sin(x)*cos(y)", np.sin(x) * np.cos(y))

    def test_negative_and_parenthesised_exponents(self):
        self.assertValue("x^-2", 0.4 ** -2)
        self.assertValue("x^(-1)", -2.5)

    def test_numbers(self):
        self.assertValue("1.5e-1", 0.15)
        self.assertValue(".5", 0.5)
        self.assertValue("3.", 3)

    def test_complex_aliases(self):
        t, x, y = self.point
        z = complex(x, y)
        self.assertValue("z", z)
        self.assertValue("zb", z.conjugate())
        self.assertValue("z*zbar", abs(z) ** 2)
        self.assertValue("conj(z) + i", z.conjugate() + 1j)

    def test_indexed_aliases_for_n_two(self):
        point = [0.0, 0.1, 0.2, 0.3, 0.4]
        self.assertValue("z2 - zb1", complex(0.2, 0.4) - complex(0.1, -0.3), chart=self.chart2, point=point)

    def test_coordinate_names_take_priority(self):
        chart = ChartDecl(1, names=("t", "z", "w"))
        e = parse_expression("z", chart)
        self.assertEqual(evaluate(e, [0.0, 0.25, 0.5]), 0.25)

    def test_unknown_identifier(self):
        with self.assertRaises(UnknownIdentifierError) as context:
            parse_expression("x + q", self.chart)
        self.assertEqual(context.exception.position, 4)

    def test_unknown_function(self):
        with self.assertRaises(UnknownIdentifierError):
            parse_expression("tan(x)", self.chart)

    def test_arity(self):
        with self.assertRaises(ArityError):
            parse_expression("sin(x, y)", self.chart)
        with self.assertRaises(ArityError):
            parse_expression("exp()", self.chart)

    def test_syntax_errors_report_line_and_column(self):
        with self.assertRaises(ExpressionSyntaxError) as context:
            parse_expression("x +\n  * y", self.chart)
        error = context.exception
        self.assertEqual((error.line, error.column), (2, 3))
        self.assertIn("line 2, column 3", str(error))

    def test_malformed_inputs(self):
        for source in ("", "(x", "x)", "x $ y", "x^1.5", "x^y", "sin"):
            with self.subTest(source=source):
                with self.assertRaises(ExpressionSyntaxError):
                    parse_expression(source, self.chart)

    def test_tokenizer_positions(self):
        tokens = tokenize("mu * x")
        self.assertEqual([token.position for token in tokens], [0, 3, 5, 6])
        self.assertEqual(tokens[-1].kind, "end")

    def test_print_then_parse_preserves_values(self):
        points = np.array([[0.1, 0.2, 0.3], [-0.5, 0.6, -0.7]])
        for source in ("-(x*y) + 2*t^3", "mu*sinh(t)/(2*x + 3)", "exp(-t)*zb - conj(z)^2", "x^(-2) - -y"):
            with self.subTest(source=source):
                first = parse_expression(source, self.chart)
                second = parse_expression(to_source(first), self.chart)
                np.testing.assert_allclose(
                    evaluate_batch(first, points, {"mu": 0.3}), evaluate_batch(second, points, {"mu": 0.3}), rtol=1e-14
                )


if __name__ == "__main__":
    unittest.main()
