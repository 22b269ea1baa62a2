"""
Slow but straightforward reference implementations used as test oracles.
"""

import math

import numpy

from fogsim.lidar import SPEED_OF_LIGHT


def apply_fog_ref(image, depth, beta, airlight):
    """
    Per-pixel Koschmieder blending of ``(H, W, 3)`` and ``(H, W)`` arrays.
    """
    height, width, _ = image.shape
    result = numpy.empty_like(image)
    for i in range(height):
        for j in range(width):
            t = math.exp(-beta * depth[i, j])
            for c in range(3):
                val = image[i, j, c] * t + airlight[c] * (1 - t)
                result[i, j, c] = min(max(val, 0.), 1.)
    return result


def dark_channel_ref(image, patch):
    height, width, _ = image.shape
    half = patch // 2
    result = numpy.empty((height, width))
    for i in range(height):
        for j in range(width):
            window = image[max(0, i - half):i + half + 1, max(0, j - half):j + half + 1]
            result[i, j] = window.min()
    return result


def airlight_raw_ref(image, depth, threshold, patch, fraction):
    """
    Returns ``((r, g, b), fallback)`` of the depth-filtered dark channel prior.
    """
    dark = dark_channel_ref(image, patch)
    height, width = dark.shape
    pixels = [(i, j) for i in range(height) for j in range(width)]

    if depth is None:
        candidates = pixels
    else:
        candidates = [p for p in pixels if depth[p] > threshold]

    fallback = len(candidates) == 0
    if fallback:
        candidates = pixels

    selected = max(1, int(fraction * len(candidates)))
    ranked = sorted(candidates, key=lambda p: (-dark[p], p))
    top = sorted(ranked[:selected])

    best = top[0]
    for p in top[1:]:
        if image[p].sum() > image[best].sum():
            best = p
    return tuple(float(val) for val in image[best]), fallback


def _kernel_ref(r, alpha, r_min, pulse_length, step):
    lower = max(r - pulse_length, r_min)
    if r <= lower:
        return 0.
    num = int(math.ceil((r - lower) / step)) + 1
    rho = numpy.linspace(lower, r, num)
    h = (r - lower) / (num - 1)
    f = numpy.sin(numpy.pi * (r - rho) / pulse_length) ** 2 * numpy.exp(-2 * alpha * rho) / rho ** 2
    return 2 / SPEED_OF_LIGHT * h * (f.sum() - 0.5 * (f[0] + f[-1]))


def soft_peak_ref(intensity, range_, params, r_min, step=0.001, r_step=0.01, coarse_step=0.25):
    """
    Returns ``(peak_value, peak_range)`` of the soft echo of a point,
    integrating with a fine step.
    The whole ``[r_min, range_]`` interval is scanned with ``coarse_step``,
    then the neighbourhood of the best coarse sample with ``r_step``.
    """
    pulse_length = SPEED_OF_LIGHT * params.tau_h
    scale = intensity * params.beta_lidar / params.beta0 * range_ ** 2

    def scan(low, high, spacing):
        ranges = numpy.arange(low, high + spacing / 2, spacing)
        ranges = ranges[ranges <= range_]
        values = numpy.array([
            scale * _kernel_ref(r, params.alpha, r_min, pulse_length, step) for r in ranges])
        return ranges, values

    ranges, values = scan(r_min, range_, coarse_step)
    centre = ranges[int(numpy.argmax(values))]

    ranges, values = scan(
        max(r_min, centre - coarse_step), min(range_, centre + coarse_step), r_step)
    peak = int(numpy.argmax(values))
    return float(values[peak]), float(ranges[peak])
