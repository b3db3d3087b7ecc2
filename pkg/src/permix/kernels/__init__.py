"""Hot-kernel backend selection.

The compiled Cython extension (permix._speedups) is preferred when it is
built; otherwise the numpy fallback is used.  Set PERMIX_BACKEND=fallback
or PERMIX_BACKEND=compiled to force a choice (the latter raises if the
extension is missing).  Both backends implement the same functions with
identical integer outputs; see permix.kernels.fallback for the contract.
"""

import os

from permix.kernels import fallback

_requested = os.environ.get("PERMIX_BACKEND", "").strip().lower()
if _requested not in ("", "compiled", "fallback"):
    raise ValueError(f"PERMIX_BACKEND must be 'compiled' or 'fallback', got {_requested!r}")

_impl = None
if _requested != "fallback":
    try:
        from permix import _speedups as _impl
    except ImportError:
        if _requested == "compiled":
            raise ImportError(
                "PERMIX_BACKEND=compiled but permix._speedups is not built; "
                "run: python setup.py build_ext --inplace"
            ) from None

if _impl is None:
    _impl = fallback
    BACKEND = "fallback"
else:
    BACKEND = "compiled"

fy_steps = _impl.fy_steps
parity_batch = _impl.parity_batch
count_triple = _impl.count_triple
triple_witness = _impl.triple_witness
product_counts = _impl.product_counts
build_mult_table = _impl.build_mult_table
convolve_table = _impl.convolve_table
ryser_permanent = _impl.ryser_permanent
