"""Difference-quotient and time-average operators on snapshot sequences.

A sequence is an array z of shape (N, ...) whose leading axis is time with
spacing dt.  Each operator returns the stack of values over its valid index
range, so lengths shrink by one or two:

    forward_diff    (z[j+1] - z[j]) / dt                 j = 1..N-1   -> N-1
    backward_diff   (z[j] - z[j-1]) / dt                 j = 2..N     -> N-1
    second_diff     (z[j+1] - 2 z[j] + z[j-1]) / dt^2    j = 2..N-1   -> N-2
    backward_avg    (z[j] + z[j-1]) / 2                  j = 2..N     -> N-1
    centered_avg    (z[j+1] + 2 z[j] + z[j-1]) / 4       j = 2..N-1   -> N-2
    centered_diff   (z[j+1] - z[j-1]) / (2 dt)           j = 2..N-1   -> N-2

(indices above are 1-based as in the time grid convention t_j = (j-1) dt).
"""

import numpy as np


def forward_diff(z: np.ndarray, dt: float) -> np.ndarray:
    return (z[1:] - z[:-1]) / dt


def backward_diff(z: np.ndarray, dt: float) -> np.ndarray:
    return (z[1:] - z[:-1]) / dt


def second_diff(z: np.ndarray, dt: float) -> np.ndarray:
    return (z[2:] - 2.0 * z[1:-1] + z[:-2]) / (dt * dt)


def backward_avg(z: np.ndarray) -> np.ndarray:
    return 0.5 * (z[1:] + z[:-1])


def centered_avg(z: np.ndarray) -> np.ndarray:
    return 0.25 * (z[2:] + 2.0 * z[1:-1] + z[:-2])


def centered_diff(z: np.ndarray, dt: float) -> np.ndarray:
    return (z[2:] - z[:-2]) / (2.0 * dt)


def rebuild_forward_diffs(dz1: np.ndarray, ddqs: np.ndarray, dt: float) -> np.ndarray:
    """Recover all forward differences from the first one plus the second
    difference quotients:

        dz^n = dz^1 + dt * sum_{i=2..n} ddz^i,   n = 1..N-1.

    dz1 is the first forward difference, ddqs the stack of N-2 second
    difference quotients.  Returns an array of shape (N-1, ...).
    """
    partial = dt * np.cumsum(ddqs, axis=0)
    return np.concatenate((dz1[None], dz1[None] + partial), axis=0)


def rebuild_sequence(z1: np.ndarray, dz1: np.ndarray, ddqs: np.ndarray, dt: float) -> np.ndarray:
    """Recover the whole sequence from z^1, its first forward difference and
    the second difference quotients:

        z^n = z^1 + (n-1) dt dz^1 + dt^2 sum_{i=2..n-1} (n-i) ddz^i.

    Returns the full (N, ...) stack.
    """
    n_total = ddqs.shape[0] + 2
    out = np.empty((n_total,) + z1.shape)
    out[0] = z1
    out[1] = z1 + dt * dz1
    for n in range(3, n_total + 1):
        i = np.arange(2, n)  # second-difference indices entering z^n
        weights = (n - i).astype(float)
        acc = np.tensordot(weights, ddqs[: n - 2], axes=(0, 0))
        out[n - 1] = z1 + (n - 1) * dt * dz1 + dt * dt * acc
    return out
