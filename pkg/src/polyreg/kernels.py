"""Backend selection for the characteristic-function kernels.

The compiled extension is used when it imports; setting
``POLYREG_PURE_PYTHON=1`` forces the pure-Python fallback.
"""
import os

from . import _core_py

if os.environ.get("POLYREG_PURE_PYTHON", "") not in ("", "0"):
    impl = _core_py
    BACKEND = "python"
else:
    try:
        from . import _core as impl  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:
        impl = _core_py
        BACKEND = "python"

factors = impl.factors
value = impl.value
value_and_derivative = impl.value_and_derivative
segment_phase = impl.segment_phase
newton = impl.newton
residual = impl.residual

__all__ = ["BACKEND", "impl", "factors", "value", "value_and_derivative",
           "segment_phase", "newton", "residual"]
