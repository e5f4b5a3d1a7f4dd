"""Worst observed ratio |x * y|_r / (|x|_p |y|_q) against the Young constant, per side and exponent triple."""
import argparse

import numpy as np

from jwtower.harmonic import mixed_samples, witnesses_minus, witnesses_plus, young_margin
from jwtower.tower import InclusionSpec, build

TRIPLES = ((1.0, 1.0, 1.0), (2.0, 2.0, np.inf), (2.0, 1.0, 2.0), (np.inf, 1.0, np.inf))


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--k", type=int, default=1)
    ap.add_argument("--d", type=int, default=2)
    ap.add_argument("--samples", type=int, default=300)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    T = build(InclusionSpec("tensor", k=args.k, d=args.d), 4)
    pools = {"+": (T.relative_commutant(-1, 1), witnesses_plus(T, 1)),
             "-": (T.relative_commutant(0, 2), witnesses_minus(T, 1))}
    for side, (alg, wits) in pools.items():
        rng = np.random.default_rng(args.seed)
        elems = [x for _, x in wits] + list(mixed_samples(alg, rng, args.samples))
        for p, q, r in TRIPLES:
            best, const = 0.0, None
            for x in elems:
                for y in elems[: len(wits) + 20]:
                    m = young_margin(T, side, x, y, p, q, r)
                    best, const = max(best, m.extra["ratio"]), m.extra["constant"]
            print(f"side {side} (p,q,r)=({p:g},{q:g},{r:g}): max ratio {best:.6f}, constant {const:.6f}, "
                  f"attained fraction {best / const:.4f}")


if __name__ == "__main__":
    main()
