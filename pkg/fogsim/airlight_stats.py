"""
Corpus-level statistics of atmospheric light estimates:
average channels, their luminance, and a channel neutrality check.
"""

import dataclasses
import math

import numpy

import fogsim.helpers as helpers
from fogsim.core import InputError, bt709_luminance, bt709_luminance_array

TEMPLATE = helpers.template_for(__file__)

REPORT_KEYS = ('n_images', 'mean_r', 'mean_g', 'mean_b', 'mean_luminance', 'channel_spread')
REPORT_DECIMALS = 6

# Mean channels closer than this are considered spectrally neutral.
NEUTRALITY_TOLERANCE = 0.02


@dataclasses.dataclass(frozen=True)
class CorpusReport:
    """
    Aggregated airlight statistics.

    .. py:attribute:: channel_spread

        The largest pairwise difference between the mean channels.

    .. py:attribute:: derived_clip_bounds

        Informational ``(low, high)`` luminance bounds taken from quantiles
        of the per-image luminances.
    """
    n_images: int
    mean_r: float
    mean_g: float
    mean_b: float
    mean_luminance: float
    channel_spread: float
    derived_clip_bounds: tuple

    @property
    def is_neutral(self):
        return self.channel_spread < NEUTRALITY_TOLERANCE

    def to_dict(self):
        """
        Returns the machine-readable form of the report
        (stable key names, values rounded to 6 decimals).
        """
        result = dict(n_images=self.n_images)
        for key in REPORT_KEYS[1:]:
            result[key] = round(getattr(self, key), REPORT_DECIMALS)
        result['derived_clip_bounds'] = [
            round(bound, REPORT_DECIMALS) for bound in self.derived_clip_bounds]
        result['neutral'] = self.is_neutral
        return result


def build_report(estimates, quantile=0.):
    """
    Builds a :py:class:`CorpusReport` from per-image ``(r, g, b)`` estimates.

    :param estimates: a non-empty sequence of channel triples.
    :param quantile: the quantile of per-image luminances used for the lower
        derived clip bound (``1 - quantile`` for the upper one).
    """
    estimates = numpy.array(list(estimates), numpy.float64)
    if estimates.size == 0:
        raise InputError("Cannot build a report from an empty list of estimates")
    if estimates.ndim != 2 or estimates.shape[1] != 3:
        raise InputError("Estimates must be (r, g, b) triples")

    # fsum is correctly rounded, so the means do not depend on the order of estimates
    count = estimates.shape[0]
    mean_r, mean_g, mean_b = (math.fsum(estimates[:, i]) / count for i in range(3))
    spread = max(mean_r, mean_g, mean_b) - min(mean_r, mean_g, mean_b)

    luminances = bt709_luminance_array(estimates)
    bounds = (
        float(numpy.quantile(luminances, quantile)),
        float(numpy.quantile(luminances, 1 - quantile)))

    return CorpusReport(
        n_images=count,
        mean_r=mean_r, mean_g=mean_g, mean_b=mean_b,
        mean_luminance=bt709_luminance(mean_r, mean_g, mean_b),
        channel_spread=spread,
        derived_clip_bounds=bounds)


def render_report(report, title="Atmospheric light statistics"):
    """
    Returns a human-readable text rendering of a :py:class:`CorpusReport`.
    """
    return TEMPLATE.get_def('report').render(
        report=report, title=title, decimals=REPORT_DECIMALS,
        tolerance=NEUTRALITY_TOLERANCE).strip() + "\n"
