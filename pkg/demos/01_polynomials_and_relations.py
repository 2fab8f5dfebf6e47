"""Tour of the polynomial DSL and the relation checker.

Run as ``python3 demos/01_polynomials_and_relations.py``.
"""

import numpy as np

from matrel import (
    Assignment,
    TolerancePolicy,
    Variable,
    check_all,
    describe,
    evaluate,
    format_poly,
    parse_poly,
    parse_relations,
    residual,
)


def main() -> None:
    x = Variable("x", "hermitian")
    y = Variable("y", "general")
    vs = {"x": x, "y": y}

    print("== canonical forms ==")
    for text in ("-x + x^2", "x* x", "y*y - y y*", "(1.5-2.0i) x y - 2i y"):
        p = parse_poly(text, vs)
        print(f"  {text!r:30} -> {format_poly(p)}")

    print()
    print("== evaluation ==")
    p = parse_poly("x^2 - x", vs)
    half = np.array([[0.5]])
    print(f"  x^2 - x at [[0.5]] = {evaluate(p, {'x': half})[0, 0].real}")
    root = parse_poly("x^(1/2)", {"x": Variable("x", "positive")})
    print(f"  sqrt of diag(4, 9)  = {np.diag(evaluate(root, {'x': np.diag([4.0, 9.0])})).real}")

    print()
    print("== residuals with a quantified margin ==")
    text = "var x;\nrel x^2 - x = 0;\nrel norm(x) <= 1.0;\n"
    _, rels = parse_relations(text)
    policy = TolerancePolicy(tol_eq=1e-9, tol_psd=1e-9)
    for value in (0.0, 0.5, 1.0):
        a = Assignment({"x": np.array([[value]])})
        verdict = check_all(rels, a, policy)
        state = "satisfied" if verdict.satisfied else "unsatisfied"
        print(f"  x = [[{value}]]: {state}, margin {verdict.margin:+.3e}, "
              f"residual {verdict.residual:.3e}")

    print()
    print("== per-relation breakdown at x = [[0.5]] ==")
    a = Assignment({"x": np.array([[0.5]])})
    for rel in rels:
        v = residual(rel, a, policy)
        print(f"  {describe(rel):24} margin {v.margin:+.3e}")


if __name__ == "__main__":
    main()
