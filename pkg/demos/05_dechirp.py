"""De-chirping an FMCW return turns its delay into a beat tone.

A chirp delayed by tau, mixed with the conjugate transmitted chirp, is a
tone at angular frequency -mu * tau. The script recovers tau from the FFT
peak of the beat signal.

    python demos/05_dechirp.py
"""

import numpy as np

from rmusic import FmcwParams, dechirp, fmcw_chirp

params = FmcwParams(init_freq_rad_s=2 * np.pi * 1e3, bandwidth_rad_s=2 * np.pi * 150e6, symbol_period_s=50e-6)
fs = 20e6
tau = 0.8e-6  # 120 m round trip

t = np.arange(int(params.symbol_period_s * fs)) / fs
t = t[t >= tau]
beat = dechirp(fmcw_chirp(params, t - tau), params, t)

spec = np.abs(np.fft.fft(beat, 1 << 16))
freqs = np.fft.fftfreq(spec.size, 1 / fs) * 2 * np.pi
w = freqs[np.argmax(spec)]
print(f"chirp rate {params.chirp_rate:.3e} rad/s^2")
print(f"beat frequency {w / 2 / np.pi / 1e6:.4f} MHz -> tau = {-w / params.chirp_rate * 1e6:.4f} us (true {tau * 1e6} us)")
