"""
Colour-neutral atmospheric light estimation.

The estimate proceeds in three steps:

1. a raw light is picked with a dark channel prior restricted to distant pixels
   (depth above a threshold, which isolates the sky);
2. its BT.709 luminance is clipped to the range observed in real daytime fog;
3. the clipped luminance is assigned to all three channels.

The last step removes the blue cast of a clear sky, since fog droplets scatter
all visible wavelengths nearly equally.
"""

import collections
import dataclasses
import logging

import numpy
from scipy import ndimage

from fogsim.core import (
    AtmosphericLight, AlignmentError, InputError, InvalidParameterError, bt709_luminance)


logger = logging.getLogger(__name__)


LUMINANCE_LOW = 0.6374
LUMINANCE_HIGH = 0.8555


@dataclasses.dataclass(frozen=True)
class AirlightConfig:
    """
    Parameters of the airlight estimate.

    :param depth_threshold: only pixels farther than this (meters) are candidates.
    :param dark_channel_patch: side of the square minimum filter window, odd, pixels.
    :param candidate_fraction: the fraction of candidates with the highest
        dark channel values among which the brightest pixel is picked.
    :param lum_low: lower bound of the luminance clip.
    :param lum_high: upper bound of the luminance clip.
    :param neutralize: if ``False``, :py:func:`estimate_airlight` returns
        the raw estimate without clipping and channel equalization.
    """
    depth_threshold: float = 1000.
    dark_channel_patch: int = 15
    candidate_fraction: float = 0.001
    lum_low: float = LUMINANCE_LOW
    lum_high: float = LUMINANCE_HIGH
    neutralize: bool = True

    def __post_init__(self):
        if not 0 < self.lum_low <= self.lum_high <= 1:
            raise InvalidParameterError(
                "Luminance bounds must satisfy 0 < low <= high <= 1, got "
                + repr((self.lum_low, self.lum_high)))
        if (not isinstance(self.dark_channel_patch, int) or self.dark_channel_patch < 1
                or self.dark_channel_patch % 2 == 0):
            raise InvalidParameterError(
                "Dark channel patch must be a positive odd integer, got "
                + repr(self.dark_channel_patch))
        if not 0 < self.candidate_fraction <= 1:
            raise InvalidParameterError(
                "Candidate fraction must lie in (0, 1], got " + repr(self.candidate_fraction))
        if not self.depth_threshold >= 0:
            raise InvalidParameterError(
                "Depth threshold must be non-negative, got " + repr(self.depth_threshold))


RawAirlight = collections.namedtuple('RawAirlight', ['r', 'g', 'b', 'fallback'])


def dark_channel(image, patch):
    """
    Returns the dark channel of an :py:class:`~fogsim.core.RgbImage`:
    the minimum over the channels, minimum-filtered over a ``patch`` x ``patch`` window.
    Image borders are extended by replication.
    """
    return ndimage.minimum_filter(image.data.min(axis=2), size=patch, mode='nearest')


def estimate_airlight_raw(image, depth, cfg):
    """
    Picks a raw atmospheric light with the depth-filtered dark channel prior.

    Candidates are the pixels farther than ``cfg.depth_threshold``.
    The top ``cfg.candidate_fraction`` of them by dark channel value are selected,
    and the colour of the brightest one (largest channel sum) is returned.
    Ties are broken by the row-major order.
    If there are no candidates, the whole image is used and the ``fallback`` flag is set.

    :param depth: a :py:class:`~fogsim.core.DepthMap` aligned with ``image``,
        or ``None`` to use every pixel as a candidate (the unfiltered prior).
    :returns: a :py:class:`RawAirlight` tuple.
    """
    dark = dark_channel(image, cfg.dark_channel_patch).ravel()

    if depth is None:
        candidates = numpy.arange(dark.size)
    else:
        if image.shape != depth.shape:
            raise AlignmentError(
                "Image {ims} and depth {ds} are not aligned".format(
                    ims=image.shape, ds=depth.shape))
        candidates = numpy.flatnonzero(depth.data.ravel() > cfg.depth_threshold)

    fallback = candidates.size == 0
    if fallback:
        logger.warning(
            "No pixels beyond %g m; estimating the airlight over the whole image",
            cfg.depth_threshold)
        candidates = numpy.arange(dark.size)

    selected = max(1, int(cfg.candidate_fraction * candidates.size))
    values = dark[candidates]
    if selected < values.size:
        # Only the selected values need ordering; among equal values
        # the ones earlier in the row-major order win.
        kth = numpy.partition(values, values.size - selected)[values.size - selected]
        above = numpy.flatnonzero(values > kth)
        ties = numpy.flatnonzero(values == kth)[:selected - above.size]
        chosen = numpy.concatenate([above, ties])
    else:
        chosen = numpy.arange(values.size)
    top = numpy.sort(candidates[chosen])

    pixels = image.data.reshape(-1, 3)[top]
    r, g, b = pixels[numpy.argmax(pixels.sum(axis=1))]
    return RawAirlight(float(r), float(g), float(b), fallback)


def clip_luminance(luminance, cfg):
    """
    Clips the luminance to ``[cfg.lum_low, cfg.lum_high]``.
    """
    return min(max(luminance, cfg.lum_low), cfg.lum_high)


def estimate_airlight(image, depth, cfg):
    """
    Estimates a colour-neutral :py:class:`~fogsim.core.AtmosphericLight`:
    the luminance of :py:func:`estimate_airlight_raw` is clipped with
    :py:func:`clip_luminance` and assigned to all three channels.
    """
    raw = estimate_airlight_raw(image, depth, cfg)

    if not cfg.neutralize:
        return AtmosphericLight(raw.r, raw.g, raw.b, fallback=raw.fallback)

    luminance = bt709_luminance(raw.r, raw.g, raw.b)
    return AtmosphericLight.gray(clip_luminance(luminance, cfg), fallback=raw.fallback)


def _estimate_item(args):
    item, cfg, loader = args
    if loader is not None:
        item = loader(item)
        if item is None:
            return None
    image, depth = item
    raw = estimate_airlight_raw(image, depth, cfg)
    return (raw.r, raw.g, raw.b)


def corpus_airlight_stats(items, cfg, workers=1, loader=None):
    """
    Aggregates raw airlight estimates over a corpus of images.

    :param items: an iterable of ``(image, depth)`` pairs; ``depth`` may be ``None``,
        in which case the estimate is not depth-filtered.
        If ``loader`` is given, the items are passed to it instead.
    :param cfg: an :py:class:`AirlightConfig`.
    :param workers: the number of worker processes for the per-image estimates;
        the reduction is performed in the corpus order.
    :param loader: a picklable function called (in the worker) with an item,
        returning an ``(image, depth)`` pair, or ``None`` to leave the item out.
        Only the estimated colours are sent back from the workers.
    :returns: a :py:class:`~fogsim.airlight_stats.CorpusReport`.
    """
    # imported here because airlight_stats depends on this module
    from fogsim.airlight_stats import build_report

    tasks = ((item, cfg, loader) for item in items)
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=workers) as executor:
            estimates = list(executor.map(_estimate_item, tasks, chunksize=4))
    else:
        estimates = [_estimate_item(task) for task in tasks]

    estimates = [est for est in estimates if est is not None]
    if len(estimates) == 0:
        raise InputError("The corpus is empty")

    return build_report(estimates)
