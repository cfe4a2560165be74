import numpy as np

from rsocc.camera import exposure_means
from rsocc.config import Config
from rsocc.modulation import Waveform

#: Channel with no impairments: flat envelope, no noise, drift, jitter or LED lag, and a capture that starts with
#: the first packet.
IDEAL = {
    "envelope_coeffs": "1",
    "noise_sigma": "0",
    "drift_ppm": "0",
    "jitter_sigma": "0",
    "led_tau": "0",
    "random_phase": "off",
}


def get_config(**values):
    return Config(values={**IDEAL, **{key: str(value) for key, value in values.items()}})


def random_payload(seed, n=70):
    rng = np.random.default_rng(seed)
    return rng.integers(0, 2, n), rng.integers(0, 2, n)


def stripes(widths, levels):
    """A column of piecewise-constant stripes, ``widths[i]`` rows at ``levels[i]``."""
    return np.repeat(np.asarray(levels, dtype=float), widths)


def exposed_column(symbols, width=7):
    """Rows that each integrate exactly one symbol period, ``width`` rows per symbol, from a symbol edge."""
    a, b = np.divmod(np.asarray(symbols), 2)
    halves = np.column_stack([a + b, a]).ravel() / 1.5
    starts = np.arange((len(symbols) - 1) * width + 1) / width
    return np.round(exposure_means(Waveform(halves.astype(float), 0.5), starts, 1.0), 9)
