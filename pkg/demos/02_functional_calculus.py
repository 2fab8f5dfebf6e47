"""Functional calculus on Hermitian matrices, and where monotonicity breaks.

Run as ``python3 demos/02_functional_calculus.py``.
"""

import numpy as np

from matrel import (
    fractional_power,
    hermitian_calculus,
    matrix_exp,
    min_eigenvalue,
    op_norm,
    real_part,
)


def main() -> None:
    print("== spectral calculus ==")
    h = np.array([[3.0, 1.0], [1.0, 0.0]])
    print(f"  eigenvalue bounds of [[3,1],[1,0]]: min {min_eigenvalue(h):+.6f} "
          f"(closed form {(3 - np.sqrt(13)) / 2:+.6f})")
    root = fractional_power(np.diag([4.0, 9.0]), 0.5)
    print(f"  diag(4,9)^(1/2) = diag{tuple(float(t) for t in np.diag(root).real)}")
    cube = hermitian_calculus(lambda t: t ** 3, h)
    print(f"  calculus cube vs matmul cube agree to "
          f"{op_norm(cube - h @ h @ h):.1e}")

    print()
    print("== the exponential norm bound ==")
    rng = np.random.default_rng(5)
    worst = -np.inf
    for _ in range(200):
        a = rng.standard_normal((5, 5)) + 1j * rng.standard_normal((5, 5))
        lhs = op_norm(matrix_exp(a))
        rhs = op_norm(matrix_exp(real_part(a)))
        worst = max(worst, lhs - rhs)
    print(f"  max over 200 draws of ||exp(a)|| - ||exp(Re a)||: {worst:+.3e}")
    print("  (never positive: the real part controls the exponential's size)")

    print()
    print("== taking square roots preserves order, squaring does not ==")
    x = np.array([[1.0, 1.0], [1.0, 1.0]])
    y = np.array([[2.0, 1.0], [1.0, 1.0]])
    print(f"  y - x is positive: min eig {min_eigenvalue(y - x):+.3f}")
    rx = fractional_power(x, 0.5)
    ry = fractional_power(y, 0.5)
    print(f"  y^(1/2) - x^(1/2):  min eig {min_eigenvalue(ry - rx):+.6f}")
    print(f"  y^2 - x^2:          min eig {min_eigenvalue(y @ y - x @ x):+.6f} "
          f"(= (3 - sqrt 13)/2)")


if __name__ == "__main__":
    main()
