"""Material models and the power-law attenuation operator.

The attenuation operator M acts as a Fourier multiplier M-hat(omega).
With the e^{+i omega t} forward convention of :mod:`viscogreen.fourier`
its closed forms are, writing s = -i*omega evaluated on the principal
branch (Hermitian in omega):

* even y:        M-hat = -(-1)^{y/2} * s^{y-1}        (Voigt y=2: -i*omega)
* odd y = n:     M-hat = (2/pi) (-1)^{(n+1)/2} s^{n-1} (psi(n) - ln s)
* non-integer y: M-hat = -sec(y pi / 2) * s^{y-1}

The non-integer form is the distributional (finite-part) transform of the
kernel -(2/pi) Gamma(y) sin(y pi / 2) H(t) / |t|^y; the odd case is the
finite part left by the pole of Gamma at the even/odd lattice (psi is the
digamma function).  M-hat(0) = 0 in every case.

The dispersion relation is K_m(omega) = omega * sqrt(1 - nu_m
M-hat(omega) / c_m^2) with the branch fixed so the factor e^{i K_m r/c_m}
decays: Im K_m >= 0 for all omega (the imaginary part is even).
"""

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.signal import hilbert
from scipy.special import digamma

from .fourier import omega_grid, time_grid, time_step

__all__ = [
    "PowerLawMedium",
    "FrequencyGrid",
    "attenuation_multiplier",
    "dispersion",
    "kramers_kronig_residual",
]


@dataclass(frozen=True)
class FrequencyGrid:
    """Two-sided symmetric frequency grid for inverse transforms."""

    n: int
    d_omega: float

    def __post_init__(self):
        if self.n <= 0 or self.n % 2 != 0:
            raise ValueError("n must be a positive even integer")
        if not self.d_omega > 0:
            raise ValueError("d_omega must be positive")

    @property
    def omega_max(self):
        return 0.5 * self.n * self.d_omega

    @property
    def omega(self):
        """Frequencies in FFT order covering [-omega_max, omega_max)."""
        return omega_grid(self.n, self.d_omega)

    @property
    def dt(self):
        return time_step(self.n, self.d_omega)

    @property
    def t(self):
        return time_grid(self.n, self.d_omega)

    @classmethod
    def from_band(cls, n, omega_max):
        """Grid with ``n`` samples spanning [-omega_max, omega_max)."""
        return cls(n=n, d_omega=2.0 * omega_max / n)


@dataclass(frozen=True)
class PowerLawMedium:
    """Homogeneous visco-elastic material with power-law attenuation.

    Parameters
    ----------
    rho : float
        Mass density (kg/m^3).
    c_p, c_s : float
        Compressional and shear speeds (m/s), c_p > c_s > 0.
    nu_p, nu_s : float
        Compressional and shear viscosity parameters (m^2/s^(y-1)
        semantics per model), both >= 0.
    y : float
        Power-law exponent, y > 0.  y = 2 is the Voigt model.
    """

    rho: float
    c_p: float
    c_s: float
    nu_p: float = 0.0
    nu_s: float = 0.0
    y: float = 2.0

    def __post_init__(self):
        if not self.rho > 0:
            raise ValueError("rho must be positive")
        if not (self.c_p > self.c_s > 0):
            raise ValueError("speeds must satisfy c_p > c_s > 0")
        if self.nu_p < 0 or self.nu_s < 0:
            raise ValueError("viscosities must be nonnegative")
        if not self.y > 0:
            raise ValueError("power-law exponent y must be positive")

    def speed(self, mode):
        return {"p": self.c_p, "s": self.c_s}[mode]

    def viscosity(self, mode):
        return {"p": self.nu_p, "s": self.nu_s}[mode]

    def is_perturbative(self, omega_max):
        """True when nu_m |M-hat(omega_max)| / c_m^2 < 1 for both modes.

        This is the smallness assumption behind the asymptotics; the
        solver still runs outside it but asymptotic claims only hold
        inside.
        """
        m = abs(attenuation_multiplier(self.y, np.atleast_1d(omega_max))[0])
        return (self.nu_p * m / self.c_p ** 2 < 1.0) and (self.nu_s * m / self.c_s ** 2 < 1.0)


def _principal_power(omega, p):
    """(-i omega)^p on the principal branch, Hermitian in omega, 0 -> 1."""
    w = np.where(omega == 0.0, 1.0, omega)
    return np.exp(p * (np.log(np.abs(w)) + 1j * np.angle(-1j * w)))


def attenuation_multiplier(y, omega):
    """Fourier multiplier M-hat(omega) of the power-law loss operator M.

    Parameters
    ----------
    y : float
        Power-law exponent (> 0).
    omega : array_like
        Real angular frequencies.

    Returns
    -------
    ndarray of complex
        M-hat sampled at ``omega``; exactly -i*omega for y = 2, and 0 at
        omega = 0 for every y.
    """
    if not y > 0:
        raise ValueError("y must be positive")
    omega = np.asarray(omega, dtype=float)
    if not np.all(np.isfinite(omega)):
        raise ValueError("omega must be finite")
    if float(y).is_integer() and int(y) % 2 == 0:
        n = int(y)
        out = -((-1.0) ** (n // 2)) * _principal_power(omega, n - 1)
    elif float(y).is_integer():
        n = int(y)
        s = _principal_power(omega, 1)  # -i omega
        logs = np.log(np.abs(np.where(omega == 0, 1.0, omega))) + 1j * np.angle(
            -1j * np.where(omega == 0, 1.0, omega)
        )
        out = (2.0 / np.pi) * ((-1.0) ** ((n + 1) // 2)) * _principal_power(omega, n - 1) * (
            digamma(n) - logs
        )
    else:
        out = -1.0 / np.cos(y * np.pi / 2.0) * _principal_power(omega, y - 1.0)
    return np.where(omega == 0.0, 0.0 + 0.0j, out)


def dispersion(medium, mode, omega, warn_non_perturbative=False):
    """Complex dispersion K_m(omega) = omega sqrt(1 - nu_m M-hat / c_m^2).

    The principal square root is taken with an explicit sign fix-up so
    that Im K_m >= 0 for every omega (attenuation decays on both
    frequency signs; the imaginary part is even).  The Hermitian relation
    K(-omega) = -conj(K(omega)) then holds automatically and guarantees
    real signals after synthesis.
    """
    omega = np.asarray(omega, dtype=float)
    c = medium.speed(mode)
    nu = medium.viscosity(mode)
    radicand = 1.0 - (nu / c ** 2) * attenuation_multiplier(medium.y, omega)
    if warn_non_perturbative and np.any(np.abs(radicand - 1.0) >= 1.0):
        warnings.warn("dispersion evaluated outside the perturbative regime", RuntimeWarning)
    K = omega * np.sqrt(radicand)
    return np.where(K.imag < 0.0, -K, K)


def kramers_kronig_residual(medium, mode, grid):
    """Causality self-consistency residual of the implemented dispersion.

    The ideal part omega of K_m is subtracted and the remainder is
    normalized by the causal phase factor:

        q(omega) = (K_m - omega) * (-i omega)^{2-y} / omega^2,

    whose real and imaginary parts must be a Hilbert-transform pair when
    the dispersion is causal (Kramers-Kronig).  The residual is

        min over both transform orientations of
        max |Re q -/+ H[Im q]| / max |q|

    on the interior half of the band, which removes edge truncation
    effects.  Zero viscosity returns exactly 0.

    Parameters
    ----------
    medium : PowerLawMedium
    mode : {'p', 's'}
    grid : FrequencyGrid
        Band for the check; should extend well past the frequencies of
        interest (the residual decreases as the band widens).

    Returns
    -------
    float
        Nonnegative residual; small values certify causal consistency.
    """
    if medium.viscosity(mode) == 0.0:
        return 0.0
    n = grid.n
    if n < 64:
        raise ValueError("band too narrow for a meaningful Kramers-Kronig check")
    w = np.linspace(-grid.omega_max, grid.omega_max, n, endpoint=False)
    wz = np.where(w == 0.0, 1.0, w)
    K = dispersion(medium, mode, w)
    q = (K - w) * _principal_power(w, 2.0 - medium.y) / wz ** 2
    i0 = int(np.argmin(np.abs(w)))
    q[i0] = 0.5 * (q[i0 - 1] + q[i0 + 1])
    interior = slice(n // 4, 3 * n // 4)
    scale = np.max(np.abs(q[interior]))
    if scale == 0.0:
        return 0.0
    h_im = np.imag(hilbert(q.imag))
    r_minus = np.max(np.abs(q.real - h_im)[interior]) / scale
    r_plus = np.max(np.abs(q.real + h_im)[interior]) / scale
    return float(min(r_minus, r_plus))
