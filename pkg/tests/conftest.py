import functools

import pytest

from mxrgeom import catalog
from mxrgeom.fundamental import ParameterGrid

ACCEPTANCE = {}


def record(number, name, passed, detail=""):
    """Store one acceptance-criterion outcome for the terminal summary."""
    ACCEPTANCE[number] = (name, bool(passed), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        name, ok, detail = ACCEPTANCE[k]
        tr.write_line(f"criterion {k:2d} {'PASS' if ok else 'FAIL'}  {name}  {detail}")


@functools.lru_cache(maxsize=None)
def surface(text, h=1e-2):
    """(spec, grid, chart) for a catalog surface on its default grid."""
    spec = catalog.CatalogSpec.parse(text)
    a = catalog.default_halfwidth(spec)
    grid = ParameterGrid.square(a, catalog.DEFAULT_HALFWIDTH, h)
    return spec, grid, catalog.chart(spec, a)


@pytest.fixture(params=catalog.MAIN_SIX)
def main_surface(request):
    return surface(request.param)
