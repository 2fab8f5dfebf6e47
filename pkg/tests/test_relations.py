import numpy as np
import pytest

from matrel.matcalc import TolerancePolicy
from matrel.ncpoly import ParseError, Variable, parse_poly
from matrel.relations import (
    Assignment,
    BlockPositive,
    Contraction,
    ExpRealNormBound,
    NormBound,
    OperatorOrder,
    PolyPositive,
    Positive,
    Range01,
    RealPartBound,
    SelfAdjoint,
    Unitary,
    check_all,
    describe,
    essential_dim,
    format_assignment,
    format_relations,
    parse_assignment,
    parse_relations,
    product_rep,
    residual,
)

POLICY = TolerancePolicy(tol_eq=1e-9, tol_psd=1e-9)

IDEM = "var x;\nrel x^2 - x = 0;\n"

TORUS = (
    "var u unitary;\n"
    "var v unitary;\n"
    "rel norm(u v - v u) <= 1.5;\n"
)


def _single(name, mat):
    return Assignment({name: mat})


def test_parse_injects_kind_relations_in_order():
    variables, rels = parse_relations(TORUS)
    assert list(variables) == ["u", "v"]
    assert rels[0] == Unitary("u")
    assert rels[1] == Unitary("v")
    assert isinstance(rels[2], NormBound)
    assert rels[2].bound == 1.5 and not rels[2].strict


def test_relation_file_round_trip():
    for text in (IDEM, TORUS,
                 "var x positive;\nvar y hermitian;\nrel x <= y;\n",
                 "var a;\nrel blockpos(a, a* a, a a*);\n",
                 "var a;\nrel re(a) <= 2.0;\nrel normexp_re(a) <= 1.0;\n",
                 "var a;\nrel norm(a) < 1.0;\n"):
        variables, rels = parse_relations(text)
        printed = format_relations(variables, rels)
        assert printed == text
        v2, r2 = parse_relations(printed)
        assert v2 == variables and r2 == rels


@pytest.mark.parametrize(
    "text",
    [
        "rel x = 0;",                        # no declarations
        "var x;\nrel x = 0;\nvar y;",        # declaration after relations
        "var x;\nvar x;",                    # duplicate
        "var rel;",                          # reserved word
        "var x funky;",                      # unknown kind
        "var x;\nrel x = 0",                 # missing semicolon
        "var x;\nrel norm(x) < 0.0;",        # strict bound must be positive
        "var x;\nrel normexp_re(x) <= 0.5;"  # bound below the identity norm
        ,
        "var x;\nrel re(x) <= 0.0;",
        "var x;\nrel x >= y;",               # order needs poly <= poly
        "var x;\nrel norm(x) = 0;",
    ],
)
def test_rejected_relation_files(text):
    with pytest.raises(ParseError):
        parse_relations(text)


def test_formatter_refuses_kindless_side_relations():
    x = Variable("x", "general")
    with pytest.raises(ValueError):
        format_relations({"x": x}, [SelfAdjoint("x")])


def test_residual_poly_zero_hand_value():
    _, rels = parse_relations(IDEM)
    v = residual(rels[0], _single("x", [[0.5]]), POLICY)
    # норм of p(x) is 0.25, slack is 1e-9 at scale 1
    assert not v.satisfied
    assert abs(v.residual - (0.25 - 1e-9)) < 1e-15
    assert v.margin == -v.residual


def test_residual_norm_bound_and_strictness():
    x = Variable("x", "general")
    p = parse_poly("x", {"x": x})
    loose = NormBound(p, 0.25)
    strict = NormBound(p, 0.25, strict=True)
    at_bound = _single("x", [[0.25]])
    below = _single("x", [[0.125]])
    assert residual(loose, at_bound, POLICY).satisfied
    v = residual(strict, at_bound, POLICY)
    assert not v.satisfied and v.margin == 0.0 and v.residual == 0.0
    assert residual(strict, below, POLICY).satisfied
    with pytest.raises(ValueError):
        NormBound(p, 0.0, strict=True)
    with pytest.raises(ValueError):
        NormBound(p, -1.0)


def test_residual_operator_order():
    x = Variable("x", "hermitian")
    y = Variable("y", "hermitian")
    vs = {"x": x, "y": y}
    rel = OperatorOrder(parse_poly("x", vs), parse_poly("y", vs))
    a = Assignment({"x": np.diag([0.0, 1.0]), "y": np.diag([1.0, 1.0])})
    assert residual(rel, a, POLICY).satisfied
    b = Assignment({"x": np.diag([1.0, 1.0]), "y": np.diag([0.0, 1.0])})
    v = residual(rel, b, POLICY)
    assert not v.satisfied and abs(v.residual - (1.0 - 1e-9)) < 1e-12


def test_residual_side_conditions():
    herm = residual(SelfAdjoint("x"), _single("x", [[0, 1], [0, 0]]), POLICY)
    assert not herm.satisfied and abs(herm.residual - 1.0) < 1e-8
    pos = residual(Positive("x"), _single("x", np.diag([1.0, -1.0])), POLICY)
    assert not pos.satisfied and abs(pos.residual - 1.0) < 1e-8
    assert residual(Positive("x"), _single("x", np.diag([1.0, 0.0])), POLICY).satisfied
    assert residual(Range01("x"), _single("x", np.diag([0.5, 1.0])), POLICY).satisfied
    hi = residual(Range01("x"), _single("x", np.diag([1.5])), POLICY)
    assert not hi.satisfied and abs(hi.residual - 0.5) < 1e-8
    two = residual(Contraction("x"), _single("x", 2 * np.eye(2)), POLICY)
    assert not two.satisfied and abs(two.residual - 1.0) < 1e-8


def test_residual_unitary():
    w = np.exp(2j * np.pi / 3)
    clock = np.diag([1.0, w, w * w])
    assert residual(Unitary("u"), _single("u", clock), POLICY).satisfied
    v = residual(Unitary("u"), _single("u", 2 * np.eye(2)), POLICY)
    assert not v.satisfied and abs(v.residual - 3.0) < 1e-7


def test_residual_block_positive():
    a = Variable("a", "general")
    pa = parse_poly("a", {"a": a})
    const_like = BlockPositive(pa, parse_poly("a* a", {"a": a}),
                               parse_poly("a a*", {"a": a}))
    m = np.array([[0.0, 1.0], [0.0, 0.0]])
    assert residual(const_like, _single("a", m), POLICY).satisfied
    bad = BlockPositive(pa, parse_poly("0", {"a": a}), parse_poly("0", {"a": a}))
    v = residual(bad, _single("a", np.eye(2)), POLICY)
    assert not v.satisfied and abs(v.residual - 1.0) < 1e-8


def test_residual_real_part_and_exp_bounds():
    m = np.array([[2.0, 5.0], [0.0, 2.0]])
    ok = residual(RealPartBound("a", 6.0), _single("a", m), POLICY)
    assert ok.satisfied
    v = residual(RealPartBound("a", 1.0), _single("a", m), POLICY)
    assert not v.satisfied and abs(v.margin - (1.0 - 4.5 + 1e-9 * 5.385164807134504)) < 1e-9
    assert residual(ExpRealNormBound("a", 1.0), _single("a", np.zeros((2, 2))), POLICY).satisfied
    big = residual(ExpRealNormBound("a", 2.0), _single("a", np.diag([2.0])), POLICY)
    assert not big.satisfied and abs(big.residual - (np.exp(2.0) - 2.0)) < 1e-6


def test_non_hermitian_value_fails_positivity_with_detail():
    x = Variable("x", "general")
    rel = PolyPositive(parse_poly("x", {"x": x}))
    v = residual(rel, _single("x", [[0.0, 1.0], [0.0, 0.0]]), POLICY)
    assert not v.satisfied
    assert "self-adjoint" in v.detail


def test_scale_grows_with_assignment():
    # The same 1e-4 idempotency defect passes once a large bystander
    # variable raises the tolerance scale, and fails at scale one.
    _, rels = parse_relations("var x;\nvar y;\nrel x^2 - x = 0;\n")
    near_proj = np.diag([1.0, 1e-4])
    big = Assignment({"x": near_proj, "y": 1e6 * np.eye(2)})
    assert big.scale() == 1e6
    assert residual(rels[0], big, POLICY).satisfied
    small = Assignment({"x": near_proj, "y": np.eye(2)})
    assert small.scale() == 1.0
    assert not residual(rels[0], small, POLICY).satisfied


def test_check_all_aggregates():
    variables, rels = parse_relations(TORUS)
    w = np.exp(2j * np.pi / 4)
    u = np.diag([w ** k for k in range(4)])
    v = np.eye(4, k=1).astype(complex)
    v[3, 0] = 1.0
    verdict = check_all(rels, Assignment({"u": u, "v": v}), POLICY)
    assert verdict.satisfied
    assert len(verdict.parts) == 3
    assert verdict.margin == min(p.margin for p in verdict.parts)
    assert "3 of 3" in verdict.detail
    verdict2 = check_all(rels, Assignment({"u": u, "v": np.eye(4) * 2}), POLICY)
    assert not verdict2.satisfied
    assert verdict2.residual == max(p.residual for p in verdict2.parts)


def test_residual_is_clipped_margin():
    rng = np.random.default_rng(31)
    _, rels = parse_relations(IDEM + "rel x >= 0;\nrel norm(x) <= 1.0;\n")
    for _ in range(25):
        m = rng.standard_normal((3, 3))
        a = _single("x", (m + m.T) / 2)
        for rel in rels:
            v = residual(rel, a, POLICY)
            assert v.residual == max(0.0, -v.margin)
            assert v.satisfied == (v.margin >= 0.0)


def test_product_rep_dims_add():
    a = Assignment({"x": np.eye(2)})
    b = Assignment({"x": np.zeros((3, 3))})
    prod = product_rep([a, b])
    assert prod.dim == 5
    assert np.allclose(prod["x"], np.diag([1.0, 1.0, 0.0, 0.0, 0.0]))
    with pytest.raises(ValueError):
        product_rep([a, Assignment({"y": np.eye(2)})])
    with pytest.raises(ValueError):
        product_rep([])


def test_essential_dim():
    assert essential_dim(Assignment({"x": np.diag([1.0, 0.0])})) == 1
    assert essential_dim(Assignment({"x": np.zeros((4, 4))})) == 0
    assert essential_dim(Assignment({"x": np.diag([1.0, 1.0, 0.0]),
                                     "y": np.diag([0.0, 2.0, 0.0])})) == 2
    rng = np.random.default_rng(5)
    g = rng.standard_normal((6, 6))
    assert essential_dim(Assignment({"x": g})) == 6


def test_assignment_validation():
    with pytest.raises(ValueError):
        Assignment({})
    with pytest.raises(ValueError):
        Assignment({"x": np.eye(2), "y": np.eye(3)})
    a = Assignment({"x": np.eye(2) * 0.5})
    assert a.scale() == 1.0 and a.max_norm() == 0.5
    assert "x" in a and list(a) == ["x"]


def test_assignment_file_round_trip():
    rng = np.random.default_rng(17)
    mats = {
        "u": rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)),
        "v": rng.standard_normal((3, 3)),
    }
    a = Assignment(mats)
    text = format_assignment(a)
    back = parse_assignment(text)
    for name in mats:
        assert np.array_equal(back[name], a[name])
    assert format_assignment(back) == text


@pytest.mark.parametrize(
    "text",
    [
        "dim 2 vars 1\nx\n1+0i 0+0i\n",              # missing row
        "dim 2 vars 2\nx\n1+0i 0+0i\n0+0i 1+0i\n",   # missing variable
        "dim 1 vars 1\nx\nfoo\n",                    # bad entry
        "vars 1 dim 1\nx\n1+0i\n",                   # header order
        "dim 1 vars 1\nx\n1+0i 2+0i\n",              # too many entries
    ],
)
def test_assignment_file_errors(text):
    with pytest.raises(ParseError):
        parse_assignment(text)


def test_describe_short_forms():
    variables, rels = parse_relations(TORUS)
    texts = [describe(r) for r in rels]
    assert texts[0] == "u unitary"
    assert "norm(u v - v u) <= 1.5" in texts[2]
    _, idem = parse_relations(IDEM)
    assert describe(idem[0]) == "x^2 - x = 0"
