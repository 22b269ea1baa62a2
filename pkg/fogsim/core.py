"""
Shared domain types, unit conventions and validation.

Units used throughout the package: distances in meters, attenuation coefficients
in inverse meters, channel values and LiDAR intensities normalized to ``[0, 1]``.
Images are row-major ``(height, width, 3)`` arrays in normalized sRGB;
fog is blended directly in this space.
"""

import dataclasses
import logging
import math

import cv2
import numpy


logger = logging.getLogger(__name__)


# Fog is defined as a visibility below 1 km.
FOG_MOR_LIMIT = 1000.

# Transmission at the visibility distance is exp(-3) ~ 0.05
MOR_FACTOR = 3.

BACKSCATTER_FACTOR = 0.046
DEFAULT_BETA0 = 1e-6 / math.pi
DEFAULT_TAU_H = 20e-9

# Aspect ratios of an image and its depth map may differ by this relative amount.
ASPECT_TOLERANCE = 0.01


class FogSimError(Exception):
    """
    Base class for all errors raised by the package.
    """
    pass


class InvalidParameterError(FogSimError, ValueError):
    """
    Raised when a scalar parameter (visibility, attenuation coefficient, channel value etc)
    is out of its valid range.
    """
    pass


class AlignmentError(FogSimError, ValueError):
    """
    Raised when two arrays that must be pixel-aligned have incompatible dimensions.
    """
    pass


class DepthDataError(FogSimError, ValueError):
    """
    Raised when a depth map contains a NaN, infinite or non-positive value.

    .. py:attribute:: pixel

        ``(row, col)`` of the first offending pixel in row-major order.
    """

    def __init__(self, message, pixel):
        FogSimError.__init__(self, message)
        self.pixel = pixel


class InputError(FogSimError, ValueError):
    """
    Raised on malformed inputs: duplicate identifiers, empty corpora,
    unreadable or malformed files.
    """
    pass


class ConfigError(FogSimError, ValueError):
    """
    Raised when a configuration file has unknown keys or invalid values.
    """
    pass


def _frozen(arr):
    arr.flags.writeable = False
    return arr


class RgbImage:
    """
    An immutable RGB image with channel values in ``[0, 1]``.

    :param data: an array-like of shape ``(height, width, 3)``.

    .. py:attribute:: data

        A read-only ``float64`` array of shape ``(height, width, 3)``.
    """

    def __init__(self, data):
        data = numpy.array(data, numpy.float64)
        if data.ndim != 3 or data.shape[2] != 3:
            raise InputError(
                "An image must have the shape (height, width, 3), got " + str(data.shape))
        if data.size > 0 and not (numpy.all(data >= 0) and numpy.all(data <= 1)):
            raise InvalidParameterError("Image channel values must lie in [0, 1]")
        self.data = _frozen(data)

    @property
    def height(self):
        return self.data.shape[0]

    @property
    def width(self):
        return self.data.shape[1]

    @property
    def shape(self):
        return (self.height, self.width)

    def __eq__(self, other):
        return isinstance(other, RgbImage) and numpy.array_equal(self.data, other.data)

    def __repr__(self):
        return "RgbImage({w}x{h})".format(w=self.width, h=self.height)


class DepthMap:
    """
    An immutable map of metric depths (meters).
    Values are not validated on construction, see :py:func:`validate_pair`.
    Large values (thousands of meters for the sky) are legal.

    :param data: an array-like of shape ``(height, width)``.
    """

    def __init__(self, data):
        data = numpy.array(data, numpy.float64)
        if data.ndim != 2:
            raise InputError(
                "A depth map must have the shape (height, width), got " + str(data.shape))
        self.data = _frozen(data)

    @property
    def height(self):
        return self.data.shape[0]

    @property
    def width(self):
        return self.data.shape[1]

    @property
    def shape(self):
        return (self.height, self.width)

    def check_values(self):
        """
        Raises :py:class:`DepthDataError` pointing at the first pixel
        that is NaN, infinite or non-positive.
        """
        bad = ~(numpy.isfinite(self.data) & (self.data > 0))
        if bad.any():
            row, col = numpy.unravel_index(numpy.argmax(bad), bad.shape)
            row, col = int(row), int(col)
            raise DepthDataError(
                "Invalid depth {val} at pixel (row={row}, col={col})".format(
                    val=self.data[row, col], row=row, col=col),
                (row, col))

    def __eq__(self, other):
        return isinstance(other, DepthMap) and numpy.array_equal(self.data, other.data)

    def __repr__(self):
        return "DepthMap({w}x{h})".format(w=self.width, h=self.height)


class PointCloud:
    """
    An immutable LiDAR point cloud; the sensor is at the origin.

    :param points: an array-like of shape ``(N, 4)`` with rows ``(x, y, z, intensity)``,
        coordinates in meters, intensities in ``[0, 1]``.
    """

    def __init__(self, points):
        points = numpy.array(points, numpy.float64)
        if points.size == 0:
            points = points.reshape(0, 4)
        if points.ndim != 2 or points.shape[1] != 4:
            raise InputError(
                "A point cloud must have the shape (N, 4), got " + str(points.shape))
        if not numpy.all(numpy.isfinite(points)):
            raise InputError("Point cloud contains non-finite values")
        intensity = points[:, 3]
        if not (numpy.all(intensity >= 0) and numpy.all(intensity <= 1)):
            raise InvalidParameterError("Point intensities must lie in [0, 1]")
        self.points = _frozen(points)

    def __len__(self):
        return self.points.shape[0]

    @property
    def xyz(self):
        return self.points[:, :3]

    @property
    def intensity(self):
        return self.points[:, 3]

    @property
    def ranges(self):
        """Distances from the sensor, meters."""
        return numpy.sqrt((self.xyz ** 2).sum(axis=1))

    def __eq__(self, other):
        return isinstance(other, PointCloud) and numpy.array_equal(self.points, other.points)

    def __repr__(self):
        return "PointCloud({n} points)".format(n=len(self))


@dataclasses.dataclass(frozen=True)
class FogParams:
    """
    Fog coefficients derived from a single visibility value.

    .. py:attribute:: mor

        Meteorological optical range (visibility), meters.

    .. py:attribute:: beta_cam

        Camera attenuation coefficient, 1/m.

    .. py:attribute:: alpha

        LiDAR extinction coefficient, 1/m.

    .. py:attribute:: beta_lidar

        LiDAR backscattering coefficient, 1/(m sr).

    .. py:attribute:: beta0

        Differential reflectivity of a hard target, 1/sr.

    .. py:attribute:: tau_h

        Half-power pulse width, seconds.
    """
    mor: float
    beta_cam: float
    alpha: float
    beta_lidar: float
    beta0: float = DEFAULT_BETA0
    tau_h: float = DEFAULT_TAU_H

    @property
    def is_fog(self):
        """``True`` if the visibility is within the meteorological definition of fog."""
        return self.mor <= FOG_MOR_LIMIT


def check_mor(mor):
    """
    Raises :py:class:`InvalidParameterError` if ``mor`` is not a positive finite number.
    """
    try:
        value = float(mor)
    except (TypeError, ValueError):
        raise InvalidParameterError("Visibility must be a number, got " + repr(mor))
    if not (math.isfinite(value) and value > 0):
        raise InvalidParameterError("Visibility must be positive and finite, got " + repr(mor))
    return value


def mor_to_fog_params(mor, beta0=DEFAULT_BETA0, tau_h=DEFAULT_TAU_H):
    """
    Derives camera and LiDAR fog coefficients from the visibility ``mor`` (meters).
    ``beta0`` and ``tau_h`` are sensor constants independent of the visibility.
    """
    mor = check_mor(mor)
    if not (beta0 > 0 and tau_h > 0):
        raise InvalidParameterError("beta0 and tau_h must be positive")
    return FogParams(
        mor=mor,
        beta_cam=MOR_FACTOR / mor,
        alpha=MOR_FACTOR / mor,
        beta_lidar=BACKSCATTER_FACTOR / mor,
        beta0=float(beta0),
        tau_h=float(tau_h))


def warn_if_not_fog(mor):
    if mor > FOG_MOR_LIMIT:
        logger.warning(
            "Visibility %g m is above the %g m fog limit; the result is haze, not fog",
            mor, FOG_MOR_LIMIT)


BT709_WEIGHTS = numpy.array([0.2126, 0.7152, 0.0722])


def bt709_luminance(r, g, b):
    """
    Returns the ITU-R BT.709 relative luminance ``0.2126 R + 0.7152 G + 0.0722 B``
    of normalized channel values.
    """
    for val in (r, g, b):
        if not 0 <= val <= 1:
            raise InvalidParameterError(
                "Channel values must lie in [0, 1], got " + repr((r, g, b)))
    return 0.2126 * r + 0.7152 * g + 0.0722 * b


def bt709_luminance_array(rgb):
    """
    Vectorized :py:func:`bt709_luminance` for an array with channels in the last axis.
    """
    return numpy.asarray(rgb, numpy.float64) @ BT709_WEIGHTS


@dataclasses.dataclass(frozen=True)
class AtmosphericLight:
    """
    The ambient light scattered by fog particles.

    .. py:attribute:: fallback

        ``True`` if the estimate could not use depth-filtered candidates
        and fell back to the whole image. Not part of the equality.
    """
    r: float
    g: float
    b: float
    fallback: bool = dataclasses.field(default=False, compare=False)

    def __post_init__(self):
        for val in (self.r, self.g, self.b):
            if not 0 <= val <= 1:
                raise InvalidParameterError(
                    "Airlight channels must lie in [0, 1], got " + repr((self.r, self.g, self.b)))

    @classmethod
    def gray(cls, value, fallback=False):
        """Creates a colour-neutral light with all channels equal to ``value``."""
        value = float(value)
        return cls(value, value, value, fallback=fallback)

    @property
    def luminance(self):
        # BT.709 weights sum to one, so a gray light has its channel value as luminance
        if self.is_neutral:
            return self.r
        return bt709_luminance(self.r, self.g, self.b)

    @property
    def is_neutral(self):
        return self.r == self.g == self.b

    def as_array(self):
        return numpy.array([self.r, self.g, self.b], numpy.float64)

    def as_list(self):
        return [self.r, self.g, self.b]


def _resample_nearest(data, height, width):
    return cv2.resize(
        numpy.ascontiguousarray(data, numpy.float64), (width, height),
        interpolation=cv2.INTER_NEAREST)


def validate_pair(image, depth):
    """
    Checks an image and its depth map and brings the depth to the image resolution.

    The depth map is resampled with the nearest neighbour rule
    (no depths are invented across occlusion boundaries) when the dimensions differ.
    Applying the function to its own output returns the same pair.

    :returns: a tuple ``(image, depth)`` with equal dimensions.
    :raises AlignmentError: if the aspect ratios differ by more than 1%.
    :raises DepthDataError: if the depth contains NaN, infinite or non-positive values.
    """
    if image.width == 0 or image.height == 0 or depth.width == 0 or depth.height == 0:
        raise AlignmentError("Empty image or depth map")

    if depth.shape != image.shape:
        image_aspect = image.width / image.height
        depth_aspect = depth.width / depth.height
        if abs(image_aspect - depth_aspect) > ASPECT_TOLERANCE * image_aspect:
            raise AlignmentError(
                "Aspect ratio of the depth map {dw}x{dh} does not match "
                "the image {iw}x{ih}".format(
                    dw=depth.width, dh=depth.height, iw=image.width, ih=image.height))
        depth.check_values()
        depth = DepthMap(_resample_nearest(depth.data, image.height, image.width))
    else:
        depth.check_values()

    return image, depth
