"""
Side-by-side before/after previews of fogged frames.
Previews are written outside the dataset layout and do not affect the outputs.
"""

import logging
import pathlib

import numpy

from fogsim.optics import quantize
from fogsim.pipeline.formats import IMAGES_DIR, read_image, encode_image, atomic_write


logger = logging.getLogger(__name__)


PREVIEWS_DIR = 'previews'


def preview_path(out_root, scene_id, frame_id):
    return pathlib.Path(out_root) / PREVIEWS_DIR / scene_id / (frame_id + '.png')


def composite(clear, foggy):
    """
    Returns an 8-bit RGB array with the clear and the foggy
    :py:class:`~fogsim.core.RgbImage` placed side by side.
    """
    if clear.shape != foggy.shape:
        raise ValueError(
            "Cannot compose a {cs} image with a {fs} one".format(cs=clear.shape, fs=foggy.shape))
    return numpy.concatenate([quantize(clear), quantize(foggy)], axis=1)


def emit_preview(clear_path, foggy_path, path):
    """
    Writes the composite of the images at ``clear_path`` and ``foggy_path`` to ``path``.
    If any of the images is missing or they have different dimensions,
    logs a warning and writes nothing.

    :returns: ``path`` if the preview was written, ``None`` otherwise.
    """
    for image_path in (clear_path, foggy_path):
        if image_path is None or not pathlib.Path(image_path).is_file():
            logger.warning("Cannot create the preview %s: %s is missing", path, image_path)
            return None

    clear = read_image(clear_path)
    foggy = read_image(foggy_path)
    if clear.shape != foggy.shape:
        logger.warning(
            "Cannot create the preview %s: image dimensions differ (%s and %s)",
            path, clear.shape, foggy.shape)
        return None

    atomic_write(path, encode_image(composite(clear, foggy)))
    return path


def emit_frame_preview(in_root, out_root, scene_id, frame_id):
    """
    Writes the preview of a fogged frame of a dataset
    to ``<out_root>/previews/<scene_id>/<frame_id>.png``.
    """
    name = frame_id + '.png'
    return emit_preview(
        pathlib.Path(in_root) / scene_id / IMAGES_DIR / name,
        pathlib.Path(out_root) / scene_id / IMAGES_DIR / name,
        preview_path(out_root, scene_id, frame_id))
