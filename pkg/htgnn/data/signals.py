"""Signal utilities: noise at a given SNR, low-rate upsampling and the low-frequency preprocessing pipeline."""

import math

from htgnn.data.errors import SeriesTooShortError, ZeroPowerSignalError

import numpy as np

import pandas as pd


def add_noise(series: np.ndarray, snr_db: float, rng: np.random.Generator) -> np.ndarray:
    """Add white Gaussian noise with power ``P_signal / 10^(snr_db / 10)`` to every row of a series.

    :param series: a 1D series or a (rows, time) array, power is measured per row
    :param snr_db: the signal to noise ratio in dB, ``math.inf`` returns an unchanged copy
    :param rng: the random generator drawing the noise
    :returns: the noisy series
    :raises: ZeroPowerSignalError, ValueError
    """
    series = np.asarray(series, dtype=np.float64)
    if snr_db == math.inf:
        return series.copy()
    if not math.isfinite(snr_db):
        raise ValueError(f"SNR must be finite or +inf, got {snr_db}")
    power = np.mean(series**2, axis=-1, keepdims=True)
    if np.any(power <= 0.0):
        raise ZeroPowerSignalError("Cannot add noise at a given SNR to a signal without power")
    scale = np.sqrt(power / 10.0 ** (snr_db / 10.0))
    return series + rng.standard_normal(series.shape) * scale


def upsample(values: np.ndarray, factor: int, length: int) -> np.ndarray:
    """Linearly interpolate rows sampled every ``factor`` steps onto ``length`` unit steps."""
    values = np.atleast_2d(values)
    coarse = np.arange(values.shape[-1]) * factor
    fine = np.arange(length)
    return np.stack([np.interp(fine, coarse, row) for row in values])


def moving_average(series: np.ndarray, window: int) -> np.ndarray:
    """Return the centered moving average of every row, NaN where the window is incomplete."""
    frame = pd.DataFrame(np.atleast_2d(series).T)
    smoothed = frame.rolling(window, center=True, min_periods=window).mean().to_numpy().T
    return smoothed if np.ndim(series) > 1 else smoothed[0]


def preprocess_low_freq(series: np.ndarray, ma_window: int, rate_horizon: int) -> np.ndarray:
    """Smooth a low-frequency series and turn it into its rate of change.

    ``rate[t] = (ma[t] - ma[t - h]) / h`` on the centered moving average ``ma``. The result keeps the time axis of
    the input, samples without a complete filter history are NaN (see :func:`valid_span`).

    :param series: a 1D series or a (rows, time) array
    :param ma_window: the moving average window, in samples
    :param rate_horizon: the rate of change horizon h, in samples
    :returns: the rate series, aligned with the input
    :raises: SeriesTooShortError
    """
    length = np.shape(series)[-1]
    if length <= ma_window + rate_horizon:
        raise SeriesTooShortError(
            f"Series of {length} samples is too short for a {ma_window} sample average and {rate_horizon} sample rate"
        )
    smoothed = moving_average(series, ma_window)
    rate = np.full_like(smoothed, np.nan)
    rate[..., rate_horizon:] = (smoothed[..., rate_horizon:] - smoothed[..., :-rate_horizon]) / rate_horizon
    return rate


def valid_span(values: np.ndarray) -> slice:
    """Return the time slice over which every row of a preprocessed series is finite."""
    finite = np.flatnonzero(np.all(np.isfinite(np.atleast_2d(values)), axis=0))
    if finite.size == 0:
        return slice(0, 0)
    return slice(int(finite[0]), int(finite[-1]) + 1)


def magnitude_spectrum(values: np.ndarray) -> np.ndarray:
    """Return the one-sided magnitude spectrum of every row, mean removed, bins in cycles per sample ``k / n``."""
    values = np.atleast_2d(np.asarray(values, dtype=np.float64))
    return np.abs(np.fft.rfft(values - values.mean(axis=-1, keepdims=True), axis=-1))


def dominant_frequency(values: np.ndarray) -> np.ndarray:
    """Return the spectrum bin index of the largest magnitude of every row."""
    return np.argmax(magnitude_spectrum(values), axis=-1)


def spectral_centroid(values: np.ndarray) -> np.ndarray:
    """Return the magnitude weighted mean frequency of every row, in cycles per sample."""
    spectrum = magnitude_spectrum(values)
    frequencies = np.fft.rfftfreq(np.shape(values)[-1])
    return (spectrum * frequencies).sum(axis=-1) / spectrum.sum(axis=-1)
