import math
from pathlib import Path

import pytest
from hypothesis import settings

ROOT = Path(__file__).resolve().parents[1]
DATA = ROOT / "data"
SOURCE_TEXT = ROOT / "paper.md"

settings.register_profile("default", deadline=None, derandomize=True)
settings.load_profile("default")


@pytest.fixture
def data_dir() -> Path:
    return DATA


def bisect(fn, lo: float, hi: float, tol: float = 1e-15) -> float:
    """Plain bisection; fn(lo) and fn(hi) must differ in sign."""
    flo = fn(lo)
    assert flo * fn(hi) < 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = fn(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def reentrant_root() -> float:
    """Smallest positive solution of sin(3 pi x / 2) = x."""
    return bisect(lambda x: math.sin(1.5 * math.pi * x) - x, 0.3, 0.7)
