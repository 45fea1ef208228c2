"""Definition of schottky utils."""

import os
from typing import Any, Hashable, Optional

import numpy as np

THREADS_ENV_VAR = "SCHOTTKY_THREADS"


def freeze(obj: Any) -> Hashable:
    """Freeze an object by making it immutable and thus hashable.

    Arrays are frozen to their dtype, shape and raw bytes so that two arrays
    compare equal as keys exactly when they are bitwise identical.

    Args:
        obj: Any python object, including numpy arrays.

    Returns:
        The object in a hashable form.
    """
    if isinstance(obj, np.ndarray):
        arr = np.ascontiguousarray(obj)
        return (arr.dtype.str, arr.shape, arr.tobytes())
    elif isinstance(obj, dict):
        return tuple(sorted((k, freeze(v)) for k, v in obj.items()))
    elif isinstance(obj, (list, tuple)):
        return tuple(freeze(i) for i in obj)
    elif isinstance(obj, set):
        return frozenset(obj)
    else:
        return obj


def round_half_toward_zero(x: Any) -> np.ndarray:
    """Round to the nearest integer, sending exact halves toward zero.

    Args:
        x: A real scalar or array.

    Returns:
        An int64 array of the same shape.

    Usage:
        >>> round_half_toward_zero([0.5, -0.5, 1.5, 0.51])
        array([0, 0, 1, 1])
    """
    a = np.asarray(x, dtype=float)

    return (np.sign(a) * np.ceil(np.abs(a) - 0.5)).astype(np.int64)


def thread_count(default: Optional[int] = None) -> int:
    """Return the worker thread count.

    Read from the SCHOTTKY_THREADS environment variable, falling back to the
    number of cores available to the process.

    Args:
        default: Count to use when the environment variable is unset.

    Returns:
        A positive integer.

    Raises:
        ValueError: The environment variable is not a positive integer.
    """
    raw = os.environ.get(THREADS_ENV_VAR)

    if raw is None or not raw.strip():
        if default is not None:
            return max(1, int(default))

        try:
            return max(1, len(os.sched_getaffinity(0)))
        except AttributeError:  # pragma: no cover
            return max(1, os.cpu_count() or 1)

    try:
        count = int(raw)
    except ValueError:
        raise ValueError(f"{THREADS_ENV_VAR} must be a positive integer.")

    if count < 1:
        raise ValueError(f"{THREADS_ENV_VAR} must be a positive integer.")

    return count


def as_complex_vector(z: Any, g: int, name: str = "z") -> np.ndarray:
    """Convert input to a finite complex vector of length g.

    Args:
        z: Array-like input.
        g: Expected length.
        name: Name used in error messages.

    Returns:
        A new complex128 array.

    Raises:
        ValueError: Wrong length or non-finite entries.
    """
    v = np.array(z, dtype=complex).reshape(-1)

    if v.shape != (g,):
        raise ValueError(f"{name} must be a vector of length {g}.")

    if not np.all(np.isfinite(v)):
        raise ValueError(f"{name} must contain only finite values.")

    return v
