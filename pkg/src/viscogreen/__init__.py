"""Viscoelastic Green's functions for power-law attenuating media.

The package is organized around the pipeline

    medium -> green -> deatten -> imaging

``medium`` defines material models, the power-law attenuation multiplier
M-hat and the dispersion relation K_m with a Kramers-Kronig consistency
check.  ``green`` assembles the frequency-domain Green's tensor and
synthesizes time-domain waveforms.  ``deatten`` implements the attenuation
operator L, its stationary-phase approximations and the inverse map that
recovers ideal (inviscid) waveforms from viscous measurements.  ``imaging``
localizes point sources from corrected array recordings with Kirchhoff,
time-reversal and back-propagation functionals.  ``harness``/``cli`` drive
figure reproduction and end-to-end experiments from INI configs.
"""

from .medium import PowerLawMedium, FrequencyGrid, attenuation_multiplier, dispersion, kramers_kronig_residual
from .green import (
    SourceReceiverGeometry,
    GreenTensorSeries,
    amplitude_factor,
    radial_moment,
    phase_factor,
    green_frequency_tensor,
    green_time_tensor,
    green_quasi_incompressible,
)
from .deatten import (
    apply_L_exact,
    apply_L_tilde,
    apply_L_tilde_star,
    compose_correction,
    invert_attenuation,
)
from .imaging import (
    SensorArrayRecording,
    ImageGrid,
    correct_recordings,
    kirchhoff_image,
    time_reversal_image,
    backpropagation_image,
)
from .estimators import AttenuationCorrector, SourceLocalizer

__version__ = "0.1.0"

__all__ = [
    "PowerLawMedium",
    "FrequencyGrid",
    "attenuation_multiplier",
    "dispersion",
    "kramers_kronig_residual",
    "SourceReceiverGeometry",
    "GreenTensorSeries",
    "amplitude_factor",
    "radial_moment",
    "phase_factor",
    "green_frequency_tensor",
    "green_time_tensor",
    "green_quasi_incompressible",
    "apply_L_exact",
    "apply_L_tilde",
    "apply_L_tilde_star",
    "compose_correction",
    "invert_attenuation",
    "SensorArrayRecording",
    "ImageGrid",
    "correct_recordings",
    "kirchhoff_image",
    "time_reversal_image",
    "backpropagation_image",
    "AttenuationCorrector",
    "SourceLocalizer",
]
