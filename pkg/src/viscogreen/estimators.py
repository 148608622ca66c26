"""Estimator-style wrappers over the functional correction/imaging core.

:class:`AttenuationCorrector` is a scikit-learn transformer (rows are
recorded traces, columns are time samples) and :class:`SourceLocalizer`
is a predictor mapping a stack of array traces to a source position.
Both expose ``get_params`` / ``set_params`` so they compose with
pipelines and grid search; the numerical work stays in
:mod:`viscogreen.deatten` and :mod:`viscogreen.imaging`.
"""

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin

from .deatten import apply_L_tilde_star, invert_attenuation
from .imaging import (
    ImageGrid,
    SensorArrayRecording,
    backpropagation_image,
    correct_recordings,
    kirchhoff_image,
    time_reversal_image,
)

__all__ = ["AttenuationCorrector", "SourceLocalizer"]


class AttenuationCorrector(TransformerMixin, BaseEstimator):
    """De-attenuate recorded traces back to their ideal-medium estimates.

    Parameters
    ----------
    nu_s : float
        Shear viscosity of the recording medium.
    c_s : float
        Shear speed of the recording medium.
    t : ndarray or None
        Shared uniform time grid of the traces; must be set before
        ``fit``.
    method : {'first_order', 'ode'}
        Inversion method passed to :func:`invert_attenuation`.
    n_quad : int
        Quadrature points for the adjoint smoothing operator.

    Attributes
    ----------
    eps_ : float
        Fitted viscosity scale nu_s / c_s^2.
    n_features_in_ : int
        Number of time samples seen during fit.
    """

    def __init__(self, nu_s=0.0, c_s=1.0, t=None, method="first_order", n_quad=120):
        self.nu_s = nu_s
        self.c_s = c_s
        self.t = t
        self.method = method
        self.n_quad = n_quad

    def fit(self, X, y=None):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if self.t is None:
            raise ValueError("set the time grid t before fitting")
        t = np.asarray(self.t, dtype=float)
        if X.shape[1] != len(t):
            raise ValueError("traces must be sampled on the configured time grid")
        if self.nu_s < 0 or not self.c_s > 0:
            raise ValueError("need nu_s >= 0 and c_s > 0")
        self.eps_ = self.nu_s / self.c_s ** 2
        self.n_features_in_ = X.shape[1]
        return self

    def transform(self, X):
        if not hasattr(self, "eps_"):
            raise RuntimeError("fit the corrector before transforming")
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n_features_in_:
            raise ValueError("trace length differs from the fitted time grid")
        if self.eps_ == 0.0:
            return X.copy()
        t = np.asarray(self.t, dtype=float)
        out = np.empty_like(X)
        for i, trace in enumerate(X):
            smoothed = apply_L_tilde_star(trace, t, self.eps_, n_quad=self.n_quad)
            out[i] = invert_attenuation(smoothed, t, self.eps_, method=self.method)
        return out


class SourceLocalizer(BaseEstimator):
    """Locate a point source from array traces by grid imaging.

    Parameters
    ----------
    medium : PowerLawMedium
        Propagation medium of the recordings.
    receivers : ndarray, shape (m, 3)
        Receiver positions.
    t : ndarray
        Shared uniform time grid of the traces.
    functional : {'kirchhoff', 'time_reversal', 'backpropagation'}
        Imaging functional used for the score map.
    correct : bool
        Apply the de-attenuation correction before imaging.
    method : {'first_order', 'ode'}
        Inversion method when ``correct`` is on.
    voxel, half_extent : float
        Search-grid pitch and half width (planar z = 0 grid centered at
        the origin).
    band : tuple or None
        Optional (lo, hi) analysis band for the spectral functionals.

    Attributes
    ----------
    image_ : ImageGrid
        Score map of the last fitted recording.
    location_ : ndarray, shape (3,)
        Argmax voxel center of ``image_``.
    """

    _FUNCTIONALS = ("kirchhoff", "time_reversal", "backpropagation")

    def __init__(
        self,
        medium=None,
        receivers=None,
        t=None,
        functional="kirchhoff",
        correct=True,
        method="first_order",
        voxel=5e-4,
        half_extent=0.02,
        band=None,
    ):
        self.medium = medium
        self.receivers = receivers
        self.t = t
        self.functional = functional
        self.correct = correct
        self.method = method
        self.voxel = voxel
        self.half_extent = half_extent
        self.band = band

    def _image(self, X):
        if self.functional not in self._FUNCTIONALS:
            raise ValueError("functional must be one of %s" % (self._FUNCTIONALS,))
        if self.medium is None or self.receivers is None or self.t is None:
            raise ValueError("medium, receivers, and t must all be configured")
        recording = SensorArrayRecording(
            np.asarray(self.receivers, dtype=float),
            np.atleast_2d(np.asarray(X, dtype=float)),
            np.asarray(self.t, dtype=float),
            self.medium,
        )
        if self.correct:
            recording = correct_recordings(recording, method=self.method)
        axis = np.arange(-self.half_extent, self.half_extent + 0.5 * self.voxel, self.voxel)
        grid = ImageGrid(axis, axis, np.array([0.0]))
        if self.functional == "kirchhoff":
            return kirchhoff_image(recording, grid)
        if self.functional == "time_reversal":
            return time_reversal_image(recording, grid, band=self.band)
        return backpropagation_image(recording, grid, band=self.band)

    def fit(self, X, y=None):
        self.image_ = self._image(X)
        self.location_ = self.image_.argmax_position()
        return self

    def predict(self, X=None):
        """Source estimate for ``X`` (or for the fitted recording)."""
        if X is None:
            if not hasattr(self, "location_"):
                raise RuntimeError("fit the localizer or pass recordings")
            return self.location_
        return self._image(X).argmax_position()

    def score(self, X, y):
        """Negative localization error (meters) against the true source."""
        return -float(np.linalg.norm(self.predict(X) - np.asarray(y, dtype=float)))
