"""
Camera-side fog synthesis: transmission maps and Koschmieder blending

.. math::

    I(x) = J(x) t(x) + A (1 - t(x)), \\quad t(x) = e^{-\\beta d(x)},

where :math:`J` is the clear image, :math:`A` the atmospheric light,
:math:`d` the metric depth and :math:`\\beta` the attenuation coefficient.
The fog is homogeneous: a single :math:`\\beta` per frame.
"""

import logging

import numpy

from fogsim.core import (
    RgbImage, AlignmentError, InvalidParameterError, mor_to_fog_params, warn_if_not_fog)
from fogsim.airlight import AirlightConfig, estimate_airlight


logger = logging.getLogger(__name__)


class TransmissionMap:
    """
    Per-pixel fraction of the scene radiance that survives the fog, values in ``(0, 1]``.

    .. py:attribute:: data

        A read-only ``float64`` array of shape ``(height, width)``.
    """

    def __init__(self, data):
        data = numpy.array(data, numpy.float64)
        if data.ndim != 2:
            raise AlignmentError(
                "A transmission map must have the shape (height, width), got " + str(data.shape))
        data.flags.writeable = False
        self.data = data

    @property
    def height(self):
        return self.data.shape[0]

    @property
    def width(self):
        return self.data.shape[1]

    @property
    def shape(self):
        return self.data.shape


def compute_transmission(depth, beta_cam):
    """
    Returns the :py:class:`TransmissionMap` ``exp(-beta_cam * d)`` for a depth map.

    :param depth: a :py:class:`~fogsim.core.DepthMap`.
    :param beta_cam: attenuation coefficient, 1/m.
    """
    if not beta_cam >= 0:
        raise InvalidParameterError(
            "Attenuation coefficient must be non-negative, got " + repr(beta_cam))
    return TransmissionMap(numpy.exp(-float(beta_cam) * depth.data))


def apply_fog(image, transmission, airlight):
    """
    Blends the clear ``image`` with the ``airlight`` weighted by the ``transmission``.

    :param image: a :py:class:`~fogsim.core.RgbImage`.
    :param transmission: a :py:class:`TransmissionMap` of the same dimensions.
    :param airlight: a :py:class:`~fogsim.core.AtmosphericLight`.
    :returns: the foggy :py:class:`~fogsim.core.RgbImage`.
    """
    if transmission.shape != image.shape:
        raise AlignmentError(
            "Transmission map {ts} does not match the image {ims}".format(
                ts=transmission.shape, ims=image.shape))

    t = transmission.data[:, :, None]
    result = image.data * t + airlight.as_array() * (1 - t)

    # The convex combination already lies in [0, 1]; the clamp only absorbs rounding.
    return RgbImage(numpy.clip(result, 0, 1))


def simulate_camera_fog(image, depth, mor, airlight_override=None, airlight_cfg=None):
    """
    Produces a foggy image for the visibility ``mor``.

    :param image: a :py:class:`~fogsim.core.RgbImage`.
    :param depth: a :py:class:`~fogsim.core.DepthMap` aligned with ``image``
        (see :py:func:`~fogsim.core.validate_pair`).
    :param mor: visibility, meters.
    :param airlight_override: if given, this :py:class:`~fogsim.core.AtmosphericLight`
        is used instead of the estimate.
    :param airlight_cfg: :py:class:`~fogsim.airlight.AirlightConfig` for the estimate.
    :returns: a tuple ``(foggy_image, airlight)`` with the airlight actually used.
    """
    params = mor_to_fog_params(mor)
    warn_if_not_fog(params.mor)

    if airlight_override is not None:
        airlight = airlight_override
    else:
        if airlight_cfg is None:
            airlight_cfg = AirlightConfig()
        airlight = estimate_airlight(image, depth, airlight_cfg)

    transmission = compute_transmission(depth, params.beta_cam)
    return apply_fog(image, transmission, airlight), airlight


def quantize(image):
    """
    Converts an :py:class:`~fogsim.core.RgbImage` to 8-bit values,
    rounding halves to even.
    """
    return numpy.rint(image.data * 255).astype(numpy.uint8)
