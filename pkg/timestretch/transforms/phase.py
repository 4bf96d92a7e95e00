import numpy as np


def princarg(x):
    """Principal argument: the representative of ``x`` in ``(-pi, pi]``."""
    wrapped = np.pi - np.mod(np.pi - np.asarray(x, dtype=np.float64), 2 * np.pi)
    return float(wrapped) if wrapped.ndim == 0 else wrapped
