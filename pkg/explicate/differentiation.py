"""Derivatives on uniform periodic grids and in time."""

import numpy as np

from .exceptions import InsufficientSnapshotsError

_IMAGINARY_POWERS = (1.0, 1j, -1.0, -1j)


def wavenumbers(size: int, spacing: float) -> np.ndarray:
    """Angular wavenumbers in FFT order."""
    return 2 * np.pi * np.fft.fftfreq(size, d=spacing)


def spectral_derivative(values, spacing: float, order: int = 1, axis: int = -1) -> np.ndarray:
    """
    Differentiate periodic samples by multiplying their transform with (ik)^order.

    The Nyquist mode is dropped for odd orders so real input stays real.
    """
    values = np.asarray(values)
    size = values.shape[axis]
    k = wavenumbers(size, spacing)
    multiplier = _IMAGINARY_POWERS[order % 4] * k**order
    if order % 2 and size % 2 == 0:
        multiplier[size // 2] = 0

    shape = [1] * values.ndim
    shape[axis] = size
    derivative = np.fft.ifft(np.fft.fft(values, axis=axis) * multiplier.reshape(shape), axis=axis)
    return derivative.real if np.isrealobj(values) else derivative


def central_difference(values, spacing: float, order: int = 1, axis: int = -1) -> np.ndarray:
    """Fourth-order periodic central differences for first and second derivatives."""
    values = np.asarray(values)
    forward_1, backward_1 = np.roll(values, -1, axis), np.roll(values, 1, axis)
    forward_2, backward_2 = np.roll(values, -2, axis), np.roll(values, 2, axis)

    if order == 1:
        return (8 * (forward_1 - backward_1) - (forward_2 - backward_2)) / (12 * spacing)
    if order == 2:
        return (-forward_2 + 16 * forward_1 - 30 * values + 16 * backward_1 - backward_2) / (12 * spacing**2)
    raise ValueError(f"central differences are implemented for orders 1 and 2, not {order}")


def wrapped_difference(a, b) -> np.ndarray:
    """a - b for phases, folded into [-pi, pi)."""
    return np.mod(np.asarray(a) - np.asarray(b) + np.pi, 2 * np.pi) - np.pi


def wrapped_phase_derivative(phase, spacing: float, axis: int = -1) -> np.ndarray:
    """Fourth-order first derivative of a phase that may carry 2 pi jumps."""
    phase = np.asarray(phase)
    near = wrapped_difference(np.roll(phase, -1, axis), np.roll(phase, 1, axis))
    far = wrapped_difference(np.roll(phase, -2, axis), np.roll(phase, 2, axis))
    return (8 * near - far) / (12 * spacing)


def time_derivative(samples, step: float, order: int = 2, wrap: bool = False) -> tuple[np.ndarray, np.ndarray]:
    """
    Central time differences along the first axis of ``samples``.

    Args:
        samples: array of shape (T, ...) sampled every ``step``.
        step (float): sampling interval.
        order (int): 2 or 4.
        wrap (bool): treat the samples as phases and difference them modulo 2 pi.

    Returns:
        tuple[np.ndarray, np.ndarray]: indices of the interior samples and the derivative there.

    Raises:
        InsufficientSnapshotsError: when there are fewer samples than the stencil needs.
    """
    samples = np.asarray(samples)
    count = samples.shape[0]
    difference = wrapped_difference if wrap else np.subtract

    if order == 2:
        if count < 3:
            raise InsufficientSnapshotsError(f"second-order differences need 3 snapshots, got {count}")
        derivative = difference(samples[2:], samples[:-2]) / (2 * step)
        return np.arange(1, count - 1), derivative

    if order == 4:
        if count < 5:
            raise InsufficientSnapshotsError(f"fourth-order differences need 5 snapshots, got {count}")
        near = difference(samples[3:-1], samples[1:-3])
        far = difference(samples[4:], samples[:-4])
        return np.arange(2, count - 2), (8 * near - far) / (12 * step)

    raise ValueError(f"time differences are implemented for orders 2 and 4, not {order}")
