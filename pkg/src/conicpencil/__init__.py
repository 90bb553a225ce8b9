"""conicpencil: pencils of conics in the complex projective plane.

A small numerical kernel (points, lines, conics, pencils) together with
several independent geometric constructions of the cross ratio of four
members of a pencil, a comparison report that checks them against each
other, and a ``pencil`` command line tool for JSON reports, fuzzing and
SVG figures.

Quick start::

    >>> from conicpencil import Conic, pencil_from_conics, compare_all
    >>> F = pencil_from_conics(Conic([1, 0, 1, 0, 0, -1]), Conic([0, 1, 0, 0, 0, 0]))
    >>> report = compare_all(F, [1, 2, 3, -1])
    >>> round(report.consensus.real, 12)
    3.0
"""
from . import errors
from .conics import *  # noqa: F401,F403
from .conics import __all__ as _conics_all
from .errors import *  # noqa: F401,F403
from .numeric import *  # noqa: F401,F403
from .numeric import __all__ as _numeric_all
from .pencil import *  # noqa: F401,F403
from .pencil import __all__ as _pencil_all
from .projective import INFINITY_LINE
from .projective import *  # noqa: F401,F403
from .projective import __all__ as _projective_all
from .xratio import *  # noqa: F401,F403
from .xratio import __all__ as _xratio_all

__version__ = "0.1.0"

__all__ = [
    *_numeric_all,
    *_projective_all,
    "INFINITY_LINE",
    *_conics_all,
    *_pencil_all,
    *_xratio_all,
    *[name for name in dir(errors) if not name.startswith("_") and name[0].isupper()],
]
