"""permix: exact and Monte Carlo product-mixing statistics on S_n and A_n."""

__version__ = "0.1.0"

from permix.kernels import BACKEND as kernel_backend  # noqa: F401
