"""Write SVG figures of the example scenes to demos/out/.

Run from the repository root:  python demos/render_figures.py
"""
from pathlib import Path

from conicpencil import Conic, pencil_from_conics
from conicpencil.render import render_pencil, render_scene
from conicpencil.scene import load_scene

here = Path(__file__).resolve().parent
out = here / "out"
out.mkdir(exist_ok=True)

for name, window in (("cp1", (-3, -3, 3, 3)), ("cp2", (-2, -2, 4, 4)), ("circles", (-2.5, -2.5, 3.5, 3.5))):
    scene = load_scene((here / "scenes" / f"{name}.json").read_text())
    path = out / f"{name}.svg"
    path.write_text(render_scene(scene, window=window, width=600))
    print("wrote", path.relative_to(here.parent))

# More members of the circle/xy pencil: ellipses (|t| < 2), line pairs (t = +-2), hyperbolas.
F = pencil_from_conics(Conic([1, 0, 1, 0, 0, -1]), Conic([0, 1, 0, 0, 0, 0]))
path = out / "cp1_family.svg"
path.write_text(render_pencil(F, [0, 0.8, 1.6, 2, 3, 6, -1, -2, -4], window=(-3, -3, 3, 3), width=600))
print("wrote", path.relative_to(here.parent))
