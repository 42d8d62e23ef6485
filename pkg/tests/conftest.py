import os
import sys
from functools import lru_cache

from hypothesis import HealthCheck, settings

from zdaction.config import load_document, load_presentation
from zdaction.fields import NumberField, Presentation, RationalFunctionField

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("ci", max_examples=200, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

MIXING = ("x2", "x3", "x2x3", "fibonacci", "ledrappier")
STOCK = MIXING + ("nonmix",)


@lru_cache(maxsize=None)
def stock(name: str) -> Presentation:
    return load_presentation(load_document(name)[0])


def make(min_poly, images, name="adhoc", attested=True):
    """Number-field presentation from integer coefficients (low to high)."""
    K = NumberField(min_poly)
    gens = tuple(K.element(g) if isinstance(g, (list, tuple)) else K.from_int(g) for g in images)
    return Presentation(name=name, d=len(gens), field=K, generators=gens, maximality_attested=attested)


def make_ff(q, images, name="adhoc-ff"):
    """Function-field presentation; images are (num, den) coefficient tuples, high to low."""
    K = RationalFunctionField(q)
    gens = tuple(K.element(*g) for g in images)
    return Presentation(name=name, d=len(gens), field=K, generators=gens, maximality_attested=True)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        status, title, note = results[n]
        terminalreporter.write_line(f"criterion {n:2d} {status}  {title}  ({note})")
