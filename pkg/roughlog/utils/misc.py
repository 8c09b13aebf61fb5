import numpy as np

__all__ = ['as_cell_vector', 'positive_part', 'sup_norm', 'geometric_schedule']


def as_cell_vector(values, n, name="vector"):
    """
    Convert scalars or array-likes to a float vector with one entry per interior cell.

    Parameters
    ----------
    values : `float` or array-like
        A scalar is broadcast to every cell.
    n : `int`
        The number of interior cells.
    name : `str`
        Used in error messages.

    Returns
    -------
    `numpy.ndarray`
    """
    arr = np.asarray(values, dtype=float)
    if arr.ndim == 0:
        return np.full(n, float(arr))
    arr = arr.ravel()
    if arr.shape != (n,):
        raise ValueError(f"{name} must have one entry per interior cell ({n}), got shape {arr.shape}.")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite.")
    return arr.copy()


def positive_part(u):
    """
    Return u⁺ = max(u, 0) componentwise.
    """
    return np.maximum(np.asarray(u, dtype=float), 0.0)


def sup_norm(u):
    return float(np.max(np.abs(u))) if np.size(u) else 0.0


def geometric_schedule(start, ratio, count):
    """
    ``count`` values ``start * ratio**k``, k = 0, 1, ...
    """
    return [start * ratio ** k for k in range(count)]
