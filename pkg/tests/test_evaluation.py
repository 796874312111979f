from fractions import Fraction as F
from itertools import product

import pytest

from metrika.errors import NotPrenexUnsupportedError, UnboundVariableError
from metrika.evaluation import (
    check_condition,
    evaluate,
    evaluate_prefix_bounds,
)
from metrika.logic import metric_signature, parse_condition, parse_formula
from metrika.structures import extend_with_distances, from_distance_matrix

SIG = metric_signature()

TRIANGLE = "sup x. sup y. sup z. (d(x,z) -. (d(x,y) +. d(y,z)))"


class TestEvaluate:
    def test_triangle_sentence_zero(self, tri_space):
        f = parse_formula(TRIANGLE, SIG)
        assert evaluate(f, tri_space) == 0

    def test_inf_self_pair(self, tri_space):
        f = parse_formula("inf x. inf y. d(x,y)", SIG)
        assert evaluate(f, tri_space) == 0

    def test_sup_inf_neg(self, tri_space):
        # per x, inf_y (1 - d(x,y)) = 1 - max_y d(x,y): (1/2, 0, 0)
        f = parse_formula("sup x. inf y. not(d(x,y))", SIG)
        assert evaluate(f, tri_space) == F(1, 2)

    def test_unbound_variable(self, tri_space):
        f = parse_formula("d(x,y)", SIG)
        with pytest.raises(UnboundVariableError):
            evaluate(f, tri_space, {"x": 0})

    def test_assignment(self, tri_space):
        f = parse_formula("d(x,y)", SIG)
        assert evaluate(f, tri_space, {"x": 1, "y": 2}) == 1


class TestPrefixBounds:
    def test_qf_degenerate(self, tri_space):
        f = parse_formula("d(x,y) -. 1/4", SIG)
        iv = evaluate_prefix_bounds(f, tri_space, {"x": 0, "y": 1})
        v = evaluate(f, tri_space, {"x": 0, "y": 1})
        assert iv.lo == iv.hi == v

    def test_inf_witnessed_at_zero(self, tri_space):
        f = parse_formula("inf x. d(x,y)", SIG)
        iv = evaluate_prefix_bounds(f, tri_space, {"y": 0})
        assert (iv.lo, iv.hi) == (0, 0)

    def test_sup_bounded_by_observation(self, tri_space):
        f = parse_formula("sup x. d(x,y)", SIG)
        iv = evaluate_prefix_bounds(f, tri_space, {"y": 0})
        assert (iv.lo, iv.hi) == (F(1, 2), 1)

    def test_not_prenex_rejected(self, tri_space):
        f = parse_formula("min(inf x. d(x,y), sup z. d(z,y))", SIG)
        with pytest.raises(NotPrenexUnsupportedError):
            evaluate_prefix_bounds(f, tri_space, {"y": 0})

    def test_soundness_on_grid_extensions(self, two_point_half):
        formulas = [
            parse_formula(t, SIG)
            for t in (
                "inf x. d(x,y)",
                "sup x. d(x,y)",
                "sup x. inf y. absdiff(d(x,y), 1/2)",
                "inf x. inf y. (1/2 -. d(x,y))",
                "sup x. not(d(x,p))",
            )
        ]
        base = two_point_half
        grid = [F(k, 4) for k in range(5)]
        extensions = []
        for s in product(grid, repeat=base.n):
            try:
                extensions.append(extend_with_distances(base, list(s)))
            except Exception:
                continue
        assert extensions
        for f in formulas:
            free = f.free_variables()
            asg = {v: 0 for v in free}
            iv = evaluate_prefix_bounds(f, base, asg)
            for ext in extensions:
                assert evaluate(f, ext, asg) in iv
                # intervals nest as the prefix grows
                iv_ext = evaluate_prefix_bounds(f, ext, asg)
                assert iv.contains_interval(iv_ext)


class TestCheckCondition:
    def test_reflexive_sup(self, tri_space):
        c = parse_condition("sup x. d(x,x) <= 0", SIG)
        assert check_condition(c, tri_space).status == "holds"

    def test_derived_two_point(self, two_point_half):
        c = parse_condition("inf x. inf y. (1/2 -. d(x,y)) = 0", SIG)
        assert check_condition(c, two_point_half, mode="finite").status == "holds"

    def test_prefix_unknown_straddle(self, two_point_half):
        c = parse_condition("sup x. d(x,x) < 3/4", SIG)
        # sup upper bound defaults to 1 in prefix mode: straddles 3/4
        res = check_condition(c, two_point_half, mode="prefix")
        assert res.status == "unknown"
        assert (res.interval.lo, res.interval.hi) == (0, 1)

    def test_prefix_holds_when_interval_clears(self, two_point_half):
        c = parse_condition("inf x. inf y. d(x,y) <= 1/4", SIG)
        res = check_condition(c, two_point_half, mode="prefix")
        assert res.status == "holds"

    def test_prefix_fails_when_floor_exceeds(self, two_point_half):
        c = parse_condition("sup x. sup y. d(x,y) < 1/4", SIG)
        res = check_condition(c, two_point_half, mode="prefix")
        assert res.status == "fails"

    def test_closed_conditions_survive_quotient(self):
        m = from_distance_matrix(
            [[0, 0, F(1, 2)], [0, 0, F(1, 2)], [F(1, 2), F(1, 2), 0]]
        )
        from metrika.structures import metric_quotient

        q = metric_quotient(m)
        for text in (
            "sup x. sup y. d(x,y) <= 1/2",
            "inf x. inf y. (1/2 -. d(x,y)) <= 0",
        ):
            c = parse_condition(text, SIG)
            assert check_condition(c, m).status == "holds"
            assert check_condition(c, q).status == "holds"


def test_exactness_denominators(tri_space):
    # connective outputs stay rational with controlled denominators
    f = parse_formula("sup x. inf y. max(1/3 * (d(x,y)), absdiff(d(x,y), 1/5))", SIG)
    v = evaluate(f, tri_space)
    assert isinstance(v, F)
    assert 30 % v.denominator == 0
