"""
LiDAR-side fog synthesis.

Every return of a clear-weather point cloud is replaced by the stronger of two echoes:
the attenuated hard target, and the soft echo backscattered by the fog droplets
along the beam.
The soft echo of a point at range :math:`R` with intensity :math:`i`, observed at range :math:`r`, is

.. math::

    i_{soft}(r) = i \\frac{\\beta}{\\beta_0} R^2 \\frac{2}{c} \\int\\limits_{\\max(r - c \\tau_H, r_{min})}^{r}
        \\sin^2 \\left( \\frac{\\pi (r - \\rho)}{c \\tau_H} \\right)
        \\frac{e^{-2 \\alpha \\rho}}{\\rho^2} d\\rho,

where :math:`\\alpha` is the extinction coefficient, :math:`\\beta` the backscattering coefficient,
:math:`\\beta_0` the differential reflectivity of a hard target and :math:`\\tau_H` the half-power
pulse width.
The integral does not depend on the point, so it is tabulated once per frame
(see :py:class:`BackscatterTable`) and then looked up for each point.
"""

import dataclasses
import logging
import math

import numpy

from fogsim.core import (
    PointCloud, InvalidParameterError, mor_to_fog_params, warn_if_not_fog)


logger = logging.getLogger(__name__)


SPEED_OF_LIGHT = 2.99792458e8


@dataclasses.dataclass(frozen=True)
class LidarSimConfig:
    """
    Discretization and sensor parameters of the LiDAR simulation.

    :param r_min: the blind zone of the sensor, meters; points closer than that
        pass through unmodified.
    :param range_step: integration and tabulation step, meters.
    :param noise_floor: points with the resulting intensity below this value are dropped
        (``0`` disables dropping).
    :param rng_seed: reserved; the model is deterministic.
    """
    r_min: float = 1.5
    range_step: float = 0.1
    noise_floor: float = 0.
    rng_seed: int = 0

    def __post_init__(self):
        if not self.r_min > 0:
            raise InvalidParameterError("r_min must be positive, got " + repr(self.r_min))
        if not self.range_step > 0:
            raise InvalidParameterError(
                "range_step must be positive, got " + repr(self.range_step))
        if not self.noise_floor >= 0:
            raise InvalidParameterError(
                "noise_floor must be non-negative, got " + repr(self.noise_floor))
        if not isinstance(self.rng_seed, int) or not 0 <= self.rng_seed < 2 ** 64:
            raise InvalidParameterError(
                "rng_seed must be a 64-bit unsigned integer, got " + repr(self.rng_seed))


@dataclasses.dataclass(frozen=True, eq=False)
class SoftResponseProfile:
    """
    The soft (fog) echo of a single point sampled over the ranges in front of it.

    .. py:attribute:: ranges

        Ascending sample ranges from ``r_min`` to at most the point range, meters.

    .. py:attribute:: responses

        Soft echo intensity at each of ``ranges``.

    .. py:attribute:: peak_range

        The range of the strongest soft echo (``None`` for an empty profile).

    .. py:attribute:: peak_value

        The strongest soft echo intensity (``0`` for an empty profile).
    """
    ranges: numpy.ndarray
    responses: numpy.ndarray
    peak_range: float
    peak_value: float

    @classmethod
    def empty(cls):
        return cls(numpy.empty(0), numpy.empty(0), None, 0.)

    @property
    def is_empty(self):
        return self.ranges.size == 0


@dataclasses.dataclass(frozen=True)
class LidarFogStats:
    """
    Per-cloud statistics of :py:func:`simulate_lidar_fog`.
    ``attenuated + relocated + dropped + blind`` equals the input point count.
    """
    n_input: int
    attenuated: int
    relocated: int
    dropped: int
    blind: int
    mean_intensity_before: float
    mean_intensity_after: float

    def to_dict(self):
        return dataclasses.asdict(self)


def attenuate_hard(intensity, range_, alpha):
    """
    Returns the two-way attenuated intensity ``intensity * exp(-2 * alpha * range_)``
    of a hard target.
    Accepts scalars or arrays of equal shapes (or broadcastable).

    :param intensity: clear-weather intensity, ``[0, 1]``.
    :param range_: distance to the target, meters, positive.
    :param alpha: extinction coefficient, 1/m, non-negative.
    """
    intensity = numpy.asarray(intensity, numpy.float64)
    range_ = numpy.asarray(range_, numpy.float64)
    if not (numpy.all(intensity >= 0) and numpy.all(intensity <= 1)):
        raise InvalidParameterError("Intensities must lie in [0, 1]")
    if not numpy.all(range_ > 0):
        raise InvalidParameterError("Ranges must be positive")
    if not alpha >= 0:
        raise InvalidParameterError("Extinction coefficient must be non-negative, got " + repr(alpha))

    result = intensity * numpy.exp(-2 * float(alpha) * range_)
    return float(result) if result.ndim == 0 else result


class BackscatterTable:
    """
    The range-integrated pulse and extinction kernel of a frame,
    tabulated at ``cfg.range_step`` starting from ``cfg.r_min``.
    This is the preparation stage of :py:func:`simulate_lidar_fog`;
    the per-point soft echo is then a scaled table lookup.

    :param params: :py:class:`~fogsim.core.FogParams` of the frame.
    :param cfg: a :py:class:`LidarSimConfig`.
    :param max_range: the farthest tabulated range.
        The kernel is decreasing beyond ``r_min + c * tau_h``,
        so by default the table ends one step after that, which is enough for peak lookups.

    .. py:attribute:: ranges

        The grid ``r_min + k * range_step``.

    .. py:attribute:: kernel

        The integral of the soft echo formula (without the ``i * beta / beta0 * R^2`` factor)
        at each of ``ranges``.
    """

    def __init__(self, params, cfg, max_range=None):
        self.params = params
        self.cfg = cfg

        pulse_length = SPEED_OF_LIGHT * params.tau_h
        step = cfg.range_step
        if max_range is None:
            max_range = cfg.r_min + pulse_length + step

        # a max_range lying on the grid stays inside the table
        size = int(math.floor((max_range - cfg.r_min) / step + 1e-9)) + 1
        ranges = numpy.minimum(cfg.r_min + step * numpy.arange(size), max(max_range, cfg.r_min))

        # The sin^2 weights of the pulse footprint; it spans the whole pulse length.
        support = int(math.floor(pulse_length / step))
        weights = numpy.sin(numpy.pi * step * numpy.arange(support + 1) / pulse_length) ** 2

        decay = numpy.exp(-2 * params.alpha * ranges) / ranges ** 2

        kernel = step * numpy.convolve(decay, weights)[:size]

        # Trapezoid end corrections. The upper end has a zero weight.
        # The lower end is either the blind zone boundary (a grid point),
        # or the tail of the pulse, a fraction of a step away from the last grid point.
        head = min(support + 1, size)
        kernel[:head] -= 0.5 * step * weights[:head] * decay[0]
        if size > support + 1:
            fraction = pulse_length - support * step
            kernel[support + 1:] += 0.5 * (fraction - step) * weights[support] * decay[1:size - support]

        kernel *= 2 / SPEED_OF_LIGHT

        self.max_range = max_range
        self.ranges = ranges
        self.kernel = kernel
        self.scale = params.beta_lidar / params.beta0

        self._running_max = numpy.maximum.accumulate(kernel)
        indices = numpy.arange(size)
        new_max = numpy.empty(size, numpy.bool_)
        new_max[0] = True
        new_max[1:] = kernel[1:] > self._running_max[:-1]
        self._running_argmax = numpy.maximum.accumulate(numpy.where(new_max, indices, 0))

        logger.debug(
            "Backscatter table: %d samples up to %.3f m, pulse support %d samples",
            size, ranges[-1], support + 1)

    def __len__(self):
        return self.ranges.size

    def _indices(self, ranges):
        indices = numpy.floor((ranges - self.cfg.r_min) / self.cfg.range_step)
        return numpy.clip(indices, 0, len(self) - 1).astype(numpy.int64)

    def peaks(self, intensities, ranges):
        """
        Returns a tuple ``(peak_values, peak_ranges)`` of the strongest soft echoes
        for arrays of point intensities and ranges (all beyond ``r_min``).
        """
        intensities = numpy.asarray(intensities, numpy.float64)
        ranges = numpy.asarray(ranges, numpy.float64)
        indices = self._indices(ranges)
        values = intensities * self.scale * ranges ** 2 * self._running_max[indices]
        peak_ranges = numpy.minimum(self.ranges[self._running_argmax[indices]], ranges)
        return values, peak_ranges

    def profile(self, intensity, range_):
        """
        Returns the :py:class:`SoftResponseProfile` of a single point.
        The table must extend to ``range_``.
        """
        if range_ <= self.cfg.r_min:
            return SoftResponseProfile.empty()

        if range_ > self.max_range:
            raise InvalidParameterError(
                "The table ends at {end} m, which does not cover {r} m".format(
                    end=self.max_range, r=range_))

        count = int(self._indices(numpy.float64(range_))) + 1
        ranges = self.ranges[:count]

        responses = intensity * self.scale * range_ ** 2 * self.kernel[:count]
        peak = int(numpy.argmax(responses))
        return SoftResponseProfile(
            ranges=ranges, responses=responses,
            peak_range=float(ranges[peak]), peak_value=float(responses[peak]))


def soft_response(intensity, range_, params, cfg):
    """
    Computes the :py:class:`SoftResponseProfile` of a point with the given
    clear-weather ``intensity`` at ``range_`` meters.
    Points inside the blind zone get an empty profile.

    :param params: :py:class:`~fogsim.core.FogParams`.
    :param cfg: :py:class:`LidarSimConfig`.
    """
    if not 0 <= intensity <= 1:
        raise InvalidParameterError("Intensity must lie in [0, 1], got " + repr(intensity))
    if not range_ > 0:
        raise InvalidParameterError("Range must be positive, got " + repr(range_))

    if range_ <= cfg.r_min:
        return SoftResponseProfile.empty()

    table = BackscatterTable(params, cfg, max_range=range_)
    return table.profile(float(intensity), float(range_))


def simulate_lidar_fog(cloud, mor, cfg=None, params=None):
    """
    Produces a foggy point cloud for the visibility ``mor``.

    Every point beyond the blind zone keeps the stronger of its attenuated hard echo
    and its strongest soft echo.
    In the latter case the point is moved along its ray to the range of the soft echo.
    Resulting intensities saturate at 1.
    Points below ``cfg.noise_floor`` are dropped; the order of the rest is preserved.

    :param cloud: a :py:class:`~fogsim.core.PointCloud`.
    :param mor: visibility, meters.
    :param cfg: a :py:class:`LidarSimConfig` (default if ``None``).
    :param params: :py:class:`~fogsim.core.FogParams` to use instead of the defaults
        derived from ``mor`` (for custom sensor constants).
    :returns: a tuple ``(foggy_cloud, stats)``, where ``stats`` is a :py:class:`LidarFogStats`.
    """
    if cfg is None:
        cfg = LidarSimConfig()
    if params is None:
        params = mor_to_fog_params(mor)
    warn_if_not_fog(params.mor)

    xyz = cloud.xyz
    intensity = cloud.intensity
    ranges = cloud.ranges

    blind = ranges <= cfg.r_min
    active = ~blind

    new_xyz = xyz.copy()
    new_intensity = intensity.copy()
    relocated = numpy.zeros(len(cloud), numpy.bool_)

    if active.any():
        table = BackscatterTable(params, cfg)
        active_ranges = ranges[active]
        active_intensity = intensity[active]

        hard = active_intensity * numpy.exp(-2 * params.alpha * active_ranges)
        peak_values, peak_ranges = table.peaks(active_intensity, active_ranges)

        moved = peak_values > hard
        relocated[active] = moved

        new_intensity[active] = numpy.minimum(numpy.where(moved, peak_values, hard), 1.)
        factor = peak_ranges[moved] / active_ranges[moved]
        new_xyz[relocated] = xyz[relocated] * factor[:, None]

    dropped = active & (new_intensity < cfg.noise_floor)
    kept = ~dropped

    result = PointCloud(numpy.concatenate([new_xyz, new_intensity[:, None]], axis=1)[kept])

    stats = LidarFogStats(
        n_input=len(cloud),
        attenuated=int((active & ~relocated & kept).sum()),
        relocated=int((relocated & kept).sum()),
        dropped=int(dropped.sum()),
        blind=int(blind.sum()),
        mean_intensity_before=float(intensity.mean()) if len(cloud) > 0 else 0.,
        mean_intensity_after=float(result.intensity.mean()) if len(result) > 0 else 0.)

    logger.debug(
        "LiDAR fog at %g m: %d relocated, %d attenuated, %d dropped, %d blind",
        params.mor, stats.relocated, stats.attenuated, stats.dropped, stats.blind)

    return result, stats
