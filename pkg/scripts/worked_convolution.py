"""Compute e_1 * e_1 in B'∩A_5 and compare it with tau^(-1/2) e_4 e_1 e_3."""
import argparse

from jwtower.fourier import convolve_pos
from jwtower.mmalg import dagger, p_norm, rel_residual
from jwtower.tower import InclusionSpec, build


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=1)
    ap.add_argument("--d", type=int, default=2)
    args = ap.parse_args()
    T = build(InclusionSpec("tensor", k=args.k, d=args.d), 6)
    e1 = T.e(1, 5)
    c = convolve_pos(T, 5, e1, e1)
    target = T.tau ** -0.5 * T.e(4, 5) @ T.e(1, 5) @ T.e(3, 5)
    print(f"index {T.index:g}")
    print(f"relative residual against tau^(-1/2) e4 e1 e3: {rel_residual(c, target):.3e}")
    print(f"|(e1*e1)* - e1*e1|_2 = {p_norm(dagger(c) - c, T.algebra(5), 2):.6f}")
    print(f"|e1*e1|_2 = {p_norm(c, T.algebra(5), 2):.6f}, tr(e1*e1) = {T.algebra(5).trace(c).real:.6f}")


if __name__ == "__main__":
    main()
