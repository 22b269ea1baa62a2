"""
Dataset layout and file formats.

An input dataset is a directory of scenes::

    <root>/<scene_id>/images/<frame_id>.png     8- or 16-bit RGB
    <root>/<scene_id>/depth/<frame_id>.png      16-bit grayscale, millimeters, 0 is invalid
    <root>/<scene_id>/depth/<frame_id>.f32      raw little-endian float32 meters, row-major,
    <root>/<scene_id>/depth/<frame_id>.hdr      ... with a sidecar line "W H"
    <root>/<scene_id>/lidar/<frame_id>.bin      optional, float32 (x, y, z, intensity) quadruples
    <root>/<scene_id>/labels/<frame_id>.txt     optional, copied verbatim

Outputs mirror this layout (images, lidar, labels) under the output root.
"""

import dataclasses
import logging
import os
import pathlib

import cv2
import numpy

from fogsim.core import RgbImage, DepthMap, PointCloud, InputError


logger = logging.getLogger(__name__)


IMAGES_DIR = 'images'
DEPTH_DIR = 'depth'
LIDAR_DIR = 'lidar'
LABELS_DIR = 'labels'

DEPTH_SCALE = 1000. # millimeters per meter in depth PNGs

CLOUD_DTYPE = numpy.dtype('<f4')


@dataclasses.dataclass(frozen=True)
class FrameInputs:
    """
    Paths of the input files of a single frame.
    ``depth``, ``cloud`` and ``labels`` are ``None`` when the file is absent.
    """
    scene_id: str
    frame_id: str
    image: pathlib.Path
    depth: pathlib.Path = None
    cloud: pathlib.Path = None
    labels: pathlib.Path = None


@dataclasses.dataclass(frozen=True)
class FrameOutputs:
    """
    Paths of the output files of a single frame (``None`` for absent modalities).
    """
    image: pathlib.Path
    cloud: pathlib.Path = None
    labels: pathlib.Path = None


def _existing(path):
    return path if path.is_file() else None


def discover_dataset(root):
    """
    Lists the frames of a dataset.

    :param root: the dataset root directory.
    :returns: a dictionary ``{scene_id: [FrameInputs, ...]}`` sorted by scene and frame ids.
        Scenes without an ``images`` directory are skipped.
    :raises InputError: if ``root`` is not a readable directory.
    """
    root = pathlib.Path(root)
    if not root.is_dir():
        raise InputError("Dataset root {root} is not a directory".format(root=root))

    try:
        candidates = sorted(entry for entry in root.iterdir() if entry.is_dir())
    except OSError as e:
        raise InputError("Cannot read the dataset root {root}: {err}".format(root=root, err=e))

    scenes = {}
    for scene_dir in candidates:
        if scene_dir.name.startswith('.'):
            continue
        images_dir = scene_dir / IMAGES_DIR
        if not images_dir.is_dir():
            logger.info("Skipping %s: no %s directory", scene_dir, IMAGES_DIR)
            continue

        frames = []
        for image_path in sorted(images_dir.glob('*.png')):
            frame_id = image_path.stem
            depth = (
                _existing(scene_dir / DEPTH_DIR / (frame_id + '.png'))
                or _existing(scene_dir / DEPTH_DIR / (frame_id + '.f32')))
            frames.append(FrameInputs(
                scene_id=scene_dir.name, frame_id=frame_id, image=image_path,
                depth=depth,
                cloud=_existing(scene_dir / LIDAR_DIR / (frame_id + '.bin')),
                labels=_existing(scene_dir / LABELS_DIR / (frame_id + '.txt'))))

        scenes[scene_dir.name] = frames

    return scenes


def output_paths(frame, out_root):
    """
    Returns :py:class:`FrameOutputs` of a frame under ``out_root``.
    """
    scene_dir = pathlib.Path(out_root) / frame.scene_id
    return FrameOutputs(
        image=scene_dir / IMAGES_DIR / (frame.frame_id + '.png'),
        cloud=None if frame.cloud is None else scene_dir / LIDAR_DIR / (frame.frame_id + '.bin'),
        labels=(
            None if frame.labels is None
            else scene_dir / LABELS_DIR / (frame.frame_id + '.txt')))


def read_image(path):
    """
    Reads an 8- or 16-bit PNG (grayscale, RGB or RGBA) into an :py:class:`~fogsim.core.RgbImage`.
    """
    data = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if data is None:
        raise InputError("Cannot read the image " + str(path))

    if data.dtype == numpy.uint8:
        scale = 255.
    elif data.dtype == numpy.uint16:
        scale = 65535.
    else:
        raise InputError("Unsupported image type {dtype} in {path}".format(dtype=data.dtype, path=path))

    if data.ndim == 2:
        data = numpy.repeat(data[:, :, None], 3, axis=2)
    elif data.shape[2] == 4:
        data = cv2.cvtColor(data, cv2.COLOR_BGRA2RGB)
    else:
        data = cv2.cvtColor(data, cv2.COLOR_BGR2RGB)

    return RgbImage(data / scale)


def encode_image(data):
    """
    Encodes an 8-bit ``(height, width, 3)`` RGB array as PNG bytes.
    """
    success, buf = cv2.imencode('.png', cv2.cvtColor(data, cv2.COLOR_RGB2BGR))
    if not success:
        raise InputError("PNG encoding failed")
    return buf.tobytes()


def decode_image(data):
    """
    Decodes PNG bytes written by :py:func:`encode_image` into an 8-bit RGB array.
    """
    arr = cv2.imdecode(numpy.frombuffer(data, numpy.uint8), cv2.IMREAD_COLOR)
    if arr is None:
        raise InputError("Cannot decode the PNG data")
    return cv2.cvtColor(arr, cv2.COLOR_BGR2RGB)


def _read_header(path):
    try:
        fields = path.read_text().split()
        width, height = int(fields[0]), int(fields[1])
    except (OSError, IndexError, ValueError):
        raise InputError("Cannot read the dimensions \"W H\" from " + str(path))
    if width <= 0 or height <= 0:
        raise InputError("Invalid dimensions in " + str(path))
    return width, height


def read_depth(path):
    """
    Reads a :py:class:`~fogsim.core.DepthMap` in meters
    from a 16-bit millimeter PNG or a raw ``.f32`` file with a ``.hdr`` sidecar.
    Invalid (zero) PNG pixels become zero depths and fail the validation later.
    """
    path = pathlib.Path(path)

    if path.suffix == '.f32':
        width, height = _read_header(path.with_suffix('.hdr'))
        data = numpy.fromfile(str(path), dtype='<f4')
        if data.size != width * height:
            raise InputError(
                "{path} holds {size} values, expected {w}x{h}".format(
                    path=path, size=data.size, w=width, h=height))
        return DepthMap(data.reshape(height, width))

    data = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if data is None:
        raise InputError("Cannot read the depth map " + str(path))
    if data.dtype != numpy.uint16 or data.ndim != 2:
        raise InputError("Depth map {path} must be a 16-bit grayscale PNG".format(path=path))
    return DepthMap(data / DEPTH_SCALE)


def encode_depth(depth):
    """
    Encodes a :py:class:`~fogsim.core.DepthMap` as a 16-bit millimeter PNG.
    """
    mm = numpy.clip(numpy.rint(depth.data * DEPTH_SCALE), 0, 65535).astype(numpy.uint16)
    success, buf = cv2.imencode('.png', mm)
    if not success:
        raise InputError("PNG encoding failed")
    return buf.tobytes()


def read_cloud(path):
    """
    Reads a :py:class:`~fogsim.core.PointCloud` from a KITTI-style ``.bin`` file.
    """
    try:
        data = numpy.fromfile(str(path), dtype=CLOUD_DTYPE)
    except OSError as e:
        raise InputError("Cannot read the point cloud {path}: {err}".format(path=path, err=e))
    if data.size % 4 != 0:
        raise InputError("{path} does not hold (x, y, z, intensity) quadruples".format(path=path))
    return PointCloud(data.reshape(-1, 4))


def encode_cloud(cloud):
    """
    Encodes a :py:class:`~fogsim.core.PointCloud` in the ``.bin`` format.
    """
    return cloud.points.astype(CLOUD_DTYPE).tobytes()


def _temp_path(path):
    return path.with_name('.' + path.name + '.tmp')


def atomic_write(path, data):
    """
    Writes ``data`` bytes to ``path`` through a temporary file in the same directory.
    """
    write_all({path: data})


def write_all(files):
    """
    Writes a group of files ``{path: bytes}``.
    Nothing is renamed into place before every file has been written completely,
    so an interrupted write leaves either the whole group or only temporary files.
    """
    temps = []
    try:
        for path, data in files.items():
            path = pathlib.Path(path)
            path.parent.mkdir(parents=True, exist_ok=True)
            temp = _temp_path(path)
            temps.append((temp, path))
            temp.write_bytes(data)
    except BaseException:
        for temp, _ in temps:
            if temp.exists():
                temp.unlink()
        raise

    for temp, path in temps:
        os.replace(str(temp), str(path))
