"""Transform convention and grid helpers.

The forward transform of a time function f is

    F(omega) = int f(t) e^{+i omega t} dt,

so that synthesis (the inverse transform) reads

    f(t) = (1/2 pi) int F(omega) e^{-i omega t} domega.

On a uniform grid of n samples with time step dt the forward transform is
``dt * n * ifft(f)`` and synthesis is ``fft(F) / (n * dt)``; both use the
standard FFT frequency layout (``fftfreq`` ordering).  This convention is
used everywhere in the package.
"""

import numpy as np


def omega_grid(n, d_omega):
    """Two-sided angular-frequency grid in FFT order.

    Parameters
    ----------
    n : int
        Number of samples (even).
    d_omega : float
        Frequency step (rad/s).  Frequencies cover [-omega_max, omega_max)
        with omega_max = n * d_omega / 2.
    """
    return np.fft.fftfreq(n, d=1.0 / (n * d_omega))


def time_step(n, d_omega):
    """Time step conjugate to the frequency grid: dt = 2 pi / (n * d_omega)."""
    return 2.0 * np.pi / (n * d_omega)


def time_grid(n, d_omega):
    """Causal time samples t_k = k * dt conjugate to ``omega_grid``."""
    return np.arange(n) * time_step(n, d_omega)


def forward_transform(f, dt):
    """Discrete forward transform dt * n * ifft(f) (kernel e^{+i omega t})."""
    f = np.asarray(f)
    return dt * f.shape[-1] * np.fft.ifft(f, axis=-1)


def inverse_synthesis(F, dt, real=True):
    """Synthesize the time signal from spectrum samples on the fft grid.

    Implements f(t) = (1/2 pi) int F e^{-i omega t} domega as
    ``fft(F) / (n dt)``.  With ``real=True`` (the default) the real part is
    returned, appropriate for Hermitian spectra.
    """
    F = np.asarray(F)
    out = np.fft.fft(F, axis=-1) / (F.shape[-1] * dt)
    return np.real(out) if real else out


def raised_cosine_taper(omega, omega_max, fraction=0.1):
    """Smooth high-frequency window, flat below (1-fraction)*omega_max.

    The top ``fraction`` of the band rolls off with a raised cosine; the
    taper renders delta-like arrivals at finite bandwidth without Gibbs
    ringing and is applied to elastic references and viscous spectra alike
    so comparisons stay band-consistent.
    """
    aw = np.abs(omega)
    edge = (1.0 - fraction) * omega_max
    win = np.ones_like(aw)
    m = aw > edge
    win[m] = 0.5 * (1.0 + np.cos(np.pi * (aw[m] - edge) / (fraction * omega_max)))
    return win
