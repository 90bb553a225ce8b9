"""A pencil of circles and the cyclic points.

Two circles meet in two real points and in the cyclic points [1:i:0] and
[1:-i:0], which every circle passes through. A third circle therefore
shares two base points with the pencil, and the concurrent-lines
construction yields the cross ratio of four circles of the pencil directly.

Run from the repository root:  python demos/circle_pencil.py
"""
import numpy as np

from conicpencil import Conic, ProjPoint, pencil_from_conics
from conicpencil.xratio import xr_abstract, xr_aux_conic_two_base

c1 = Conic([1, 0, 1, 0, 0, -1])  # x^2 + y^2 = 1
c2 = Conic([1, 0, 1, -2, 0, 0])  # (x - 1)^2 + y^2 = 1
F = pencil_from_conics(c1, c2)

print("base points of the pencil:")
for B in F.base:
    real = np.allclose(B.coords.imag, 0, atol=1e-12)
    print(f"    {B}{'' if real else '   (complex)'}")
for name, I in (("I", ProjPoint([1, 1j, 0])), ("J", ProjPoint([1, -1j, 0]))):
    d = min(B.distance(I) for B in F.base)
    print(f"cyclic point {name} is a base point (distance {d:.1e})")

members = [1, 2, -3, 0.5]
third = Conic([1, 0, 1, 0, -3, -1])  # x^2 + y^2 - 3y - 1 = 0, a circle not in the pencil
value, X = xr_aux_conic_two_base(F, members, third)
print(f"\nmembers c1 + t c2, t = {members}")
print(f"    parameter cross ratio     {xr_abstract(F, members):.12f}")
print(f"    via a third circle        {value:.12f}")
print(f"    the lines M_i N_i meet at {X}")
