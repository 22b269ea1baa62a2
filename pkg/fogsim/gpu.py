"""
Koschmieder blending on OpenCL/CUDA devices with ``reikna``.
This path is optional; :py:func:`fogsim.optics.apply_fog` is the reference.
Requires ``fogsim[gpu]`` or ``fogsim[cuda]``.
"""

import numpy

from reikna.cluda import Snippet
from reikna.core import Computation, Parameter, Annotation, Type
from reikna.algorithms import PureParallel

import fogsim.helpers as helpers
from fogsim.core import RgbImage, AlignmentError, InvalidParameterError


TEMPLATE = helpers.template_for(__file__)


class KoschmiederBlend(Computation):
    """
    Bases: ``reikna.core.Computation``

    Computes the transmission ``t = exp(-beta * depth)`` and the blend
    ``image * t + airlight * (1 - t)`` clamped to ``[0, 1]`` in a single kernel.

    :param shape: ``(height, width)`` of the image.
    :param dtype: a real ``numpy`` data type.

    .. py:function:: compiled_signature(output:o, image:i, depth:i, airlight:i, beta:s)

        :param output: the foggy image, ``(height, width, 3)``.
        :param image: the clear image, ``(height, width, 3)``.
        :param depth: the depth map, ``(height, width)``.
        :param airlight: the ``(3,)`` array of the atmospheric light channels.
        :param beta: the attenuation coefficient.
    """

    def __init__(self, shape, dtype=numpy.float64):
        height, width = shape
        image_type = Type(dtype, shape=(height, width, 3))
        depth_type = Type(dtype, shape=(height, width))
        airlight_type = Type(dtype, shape=3)

        def parameters():
            return [
                Parameter('output', Annotation(image_type, 'o')),
                Parameter('image', Annotation(image_type, 'i')),
                Parameter('depth', Annotation(depth_type, 'i')),
                Parameter('airlight', Annotation(airlight_type, 'i')),
                Parameter('beta', Annotation(dtype))]

        Computation.__init__(self, parameters())

        self._blend = PureParallel(
            parameters(), Snippet(TEMPLATE.get_def('blend')), guiding_array=(height, width))

    def _build_plan(self, plan_factory, _device_params, output, image, depth, airlight, beta):
        plan = plan_factory()
        plan.computation_call(self._blend, output, image, depth, airlight, beta)
        return plan


def apply_fog_on_device(thr, image, depth, beta_cam, airlight):
    """
    Fogs an image on the device of a ``reikna`` thread ``thr``.
    The arguments are the same as those of :py:func:`~fogsim.optics.compute_transmission`
    and :py:func:`~fogsim.optics.apply_fog`.

    :returns: the foggy :py:class:`~fogsim.core.RgbImage`.
    """
    if image.shape != depth.shape:
        raise AlignmentError(
            "Image {ims} and depth {ds} are not aligned".format(ims=image.shape, ds=depth.shape))
    if not beta_cam >= 0:
        raise InvalidParameterError(
            "Attenuation coefficient must be non-negative, got " + repr(beta_cam))

    dtype = numpy.float64
    if not thr.device_params.supports_dtype(dtype):
        raise InvalidParameterError("The device does not support double precision")

    blend = KoschmiederBlend(image.shape, dtype=dtype).compile(thr)

    image_dev = thr.to_device(numpy.ascontiguousarray(image.data))
    depth_dev = thr.to_device(numpy.ascontiguousarray(depth.data))
    airlight_dev = thr.to_device(airlight.as_array())
    output_dev = thr.empty_like(image_dev)

    blend(output_dev, image_dev, depth_dev, airlight_dev, dtype(beta_cam))
    return RgbImage(output_dev.get())
