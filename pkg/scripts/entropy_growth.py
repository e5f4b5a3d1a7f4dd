"""Print H_tr(A'∩A_2n), the fitted slope and the shift entropy for tensor inclusions M_k ⊗ 1 ⊂ M_k ⊗ M_d."""
import argparse
import math

from jwtower.entropy import entropy_growth, shift_entropy
from jwtower.mmalg import AlgebraError
from jwtower.tower import InclusionSpec, build


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=1)
    ap.add_argument("--d", type=int, nargs="+", default=[2])
    ap.add_argument("--N", type=int, default=3, help="largest n; needs level 2N")
    args = ap.parse_args()
    for d in args.d:
        T = build(InclusionSpec("tensor", k=args.k, d=d), max(2 * args.N, 4))
        g = entropy_growth(T, args.N)
        print(f"M_{args.k} in M_{args.k * d}: index {T.index:g}, log index {math.log(T.index):.10f}")
        for n, h in zip(g.n, g.entropy):
            print(f"  n={n}  H={h:.10f}")
        print(f"  slope {g.slope:.10f}")
        try:
            se = shift_entropy(T)
        except AlgebraError as exc:
            print(f"  H(Γ) unavailable: {exc}")
            continue
        print(f"  H(Γ) {se.value:.10f}  β {se.beta:.10f}  k0 {se.k0}")


if __name__ == "__main__":
    main()
