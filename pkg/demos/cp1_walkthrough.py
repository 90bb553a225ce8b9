"""Walk through the pencil spanned by the unit circle and the line pair xy = 0.

Every member x^2 + y^2 - z^2 + t*xy passes through the four points
(+-1, 0), (0, +-1). We print the pencil data, then compute the cross ratio of
the members t = 1, 2, 3, -1 with every construction the package offers.

Run from the repository root:  python demos/cp1_walkthrough.py
"""
from conicpencil import (
    INF,
    AuxConfig,
    Conic,
    ProjLine,
    ProjPoint,
    compare_all,
    conjugate_line_conic,
    conjugate_point,
    desargues_involution,
    pencil_from_conics,
)
from conicpencil.xratio import lines_from_params


def fmt(z):
    return "inf" if z is INF else f"{z.real:.12f}  (imaginary part {abs(z.imag):.0e})"


F = pencil_from_conics(Conic([1, 0, 1, 0, 0, -1]), Conic([0, 1, 0, 0, 0, 0]))
print("base points:   ", *F.base)
print("degenerate (lam:mu) and their double points:")
for p, R in zip(F.degenerate_params, F.doubles):
    print(f"    ({p.first.real:+g} : {p.second.real:+g})  ->  {R}")

# The line at infinity meets each member in two points; the pencil swaps them.
z0 = ProjLine([0, 0, 1])
P = ProjPoint([1, 2, 0])
print(f"\nDesargues involution on z = 0:  {P} <-> {desargues_involution(F, z0, P)}")

# The polars of a point with respect to all members are concurrent.
P = ProjPoint([1, 2, 3])
print(f"conjugate of {P}: {conjugate_point(F, P)}")
print(f"conic conjugate to x - 2z = 0: {conjugate_line_conic(F, ProjLine([1, 0, -2]))}")

# Four members and every construction of their cross ratio.
config = AuxConfig(
    point=[1, 2, 3],
    line=[1, 0, -2],
    secant_line=[1, 0, -1],
    aux2=Conic([1, 0, 1, -1, -1, 0]),  # through (1, 0) and (0, 1) only
    aux3=Conic([1, 0, 2, 0, -1, -1]),  # misses (0, -1) only
    labeling=[[1, 0, 1], [-1, 0, 1], [0, 1, 1], [0, -1, 1]],
    lines=lines_from_params([-1, 8, -5], [0, 3, -2], [0, 1, 3, -1]),  # four lines through [1:2:3]
)
report = compare_all(F, [1, 2, 3, -1], config)
print("\ncross ratio of the members t = 1, 2, 3, -1")
for name, result in report.methods.items():
    shown = fmt(result.value) if result.value is not None else "skipped: " + result.skipped
    print(f"    {name:16s} {shown}")
print(f"all computed values agree within 1e-6: {report.agree(1e-6)}")
