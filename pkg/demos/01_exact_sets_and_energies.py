"""Tour of the exact-set layer: pair sets, representation functions, energies.

Everything here is exact rational arithmetic; the printed counts are true
combinatorial quantities, not floating-point estimates.
"""

from fractions import Fraction

from sumsetlab import (
    FamilySpec,
    energy,
    gen_family,
    is_convex,
    make_set,
    pair_set,
    pair_set_size,
    rep_fn,
    transform,
)


def main():
    A = make_set([3, 1, 2, 2])
    print(f"make_set([3,1,2,2])          -> {A}")
    print(f"rationals collapse exactly    -> {make_set([Fraction(1, 2), Fraction(2, 4)])}")

    print("\n-- pair sets of A = {1,2,3} --")
    for op in ("sum", "diff", "prod", "ratio"):
        print(f"  A {op:5s} A = {pair_set(A, A, op)}")

    print("\n-- representation function of differences --")
    d = rep_fn(A, A, "diff")
    for x, c in sorted(d.counts.items()):
        print(f"  delta({x:2}) = {c}")
    print(f"  total mass = {sum(d.counts.values())} = |A|^2")

    print("\n-- moment energies --")
    for k in (1, Fraction(3, 2), Fraction(12, 7), 2, Fraction(12, 5), 3):
        ev = energy(d, k)
        shown = ev.exact if ev.exact is not None else f"{ev.approx:.6f}"
        print(f"  E_{str(k):5s} = {shown}")

    print("\n-- Cauchy-Schwarz: (|A||B|)^2 <= |A-B| * E(A,B), exactly --")
    B = gen_family(FamilySpec.random_subset(400, 12, seed=1))
    e2 = energy(rep_fn(A, B, "diff"), 2).exact
    lhs = (len(A) * len(B)) ** 2
    rhs = pair_set_size(A, B, "diff") * e2
    print(f"  B = {B}")
    print(f"  {lhs} <= {rhs}  ({lhs <= rhs})")

    print("\n-- dilation invariance --")
    T = transform(A, Fraction(5, 3), -7)
    print(f"  (5/3)A - 7 = {T}")
    print(f"  E_3 before  = {energy(rep_fn(A, A, 'diff'), 3).exact}")
    print(f"  E_3 after   = {energy(rep_fn(T, T, 'diff'), 3).exact}")

    print("\n-- convexity --")
    squares = gen_family(FamilySpec.convex_power(2, 6))
    print(f"  {squares} convex: {is_convex(squares)}")
    print(f"  {A} convex: {is_convex(A)} (equal gaps)")


if __name__ == "__main__":
    main()
