import pathlib

import numpy

from fogsim.core import RgbImage, DepthMap, PointCloud
from fogsim.pipeline.formats import encode_image, encode_depth, encode_cloud


# Default tolerances for numpy.isclose().
DOUBLE_RTOL = 1e-11
DOUBLE_ATOL = 1e-11


def get_test_image(shape, rng, low=0., high=1.):
    height, width = shape
    return RgbImage(rng.uniform(low, high, size=(height, width, 3)))


def get_test_depth(shape, rng, low=1., high=500.):
    return DepthMap(rng.uniform(low, high, size=shape))


def get_test_cloud(size, rng, min_range=3., max_range=120., low=0., high=1.):
    """
    Returns a :py:class:`~fogsim.core.PointCloud` with points in random directions,
    ranges uniform in ``[min_range, max_range]``.
    """
    directions = rng.normal(size=(size, 3))
    directions /= numpy.sqrt((directions ** 2).sum(axis=1))[:, None]
    ranges = rng.uniform(min_range, max_range, size=size)
    intensity = rng.uniform(low, high, size=size)
    return PointCloud(numpy.concatenate([directions * ranges[:, None], intensity[:, None]], axis=1))


def diff_is_negligible(m, m_ref, atol=None, rtol=None, verbose=True):

    m = numpy.asarray(m)
    m_ref = numpy.asarray(m_ref)
    assert m.shape == m_ref.shape

    if numpy.issubdtype(m.dtype, numpy.integer):
        close = (m == m_ref)
    else:
        if atol is None:
            atol = DOUBLE_ATOL
        if rtol is None:
            rtol = DOUBLE_RTOL
        close = numpy.isclose(m, m_ref, atol=atol, rtol=rtol)

    if close.all():
        return True

    if verbose:
        far_idxs = numpy.vstack(numpy.where(~close)).T
        print(
            ("diff_is_negligible() with atol={atol} and rtol={rtol} " +
            "found {diffs} differences, first ones are:").format(
            atol=atol, rtol=rtol, diffs=str(far_idxs.shape[0])))
        for idx, _ in zip(far_idxs, range(10)):
            idx = tuple(idx)
            print(idx, m[idx], m_ref[idx])

    return False


def make_toy_dataset(root, rng, scenes=('s1', 's2', 's3'), frames=('000', '001'), shape=(24, 32)):
    """
    Creates a small dataset: every frame has an image, a 16-bit depth PNG,
    a point cloud and an annotation file; the last scene stores depths as ``.f32``
    with a distant sky in the upper half.

    :returns: the dataset root as a ``pathlib.Path``.
    """
    root = pathlib.Path(root)
    height, width = shape

    for scene_idx, scene_id in enumerate(scenes):
        scene = root / scene_id
        for sub in ('images', 'depth', 'lidar', 'labels'):
            (scene / sub).mkdir(parents=True, exist_ok=True)

        for frame_id in frames:
            image = (rng.uniform(0, 1, size=(height, width, 3)) * 255).astype(numpy.uint8)
            (scene / 'images' / (frame_id + '.png')).write_bytes(encode_image(image))

            depth = rng.uniform(2, 60, size=shape)
            if scene_idx == len(scenes) - 1:
                depth[:height // 2] = 5000.
                depth.astype('<f4').tofile(str(scene / 'depth' / (frame_id + '.f32')))
                (scene / 'depth' / (frame_id + '.hdr')).write_text(
                    "{w} {h}\n".format(w=width, h=height))
            else:
                (scene / 'depth' / (frame_id + '.png')).write_bytes(encode_depth(DepthMap(depth)))

            cloud = get_test_cloud(200, rng, min_range=0.5, max_range=80.)
            (scene / 'lidar' / (frame_id + '.bin')).write_bytes(encode_cloud(cloud))

            (scene / 'labels' / (frame_id + '.txt')).write_text(
                "Car 0.00 0 -1.57 {x} 100.0 200.0 180.0\n".format(x=scene_idx))

    return root


def tree_contents(root, exclude=()):
    """
    Returns ``{relative_path: bytes}`` for all files under ``root``.
    """
    root = pathlib.Path(root)
    return {
        path.relative_to(root).as_posix(): path.read_bytes()
        for path in sorted(root.rglob('*'))
        if path.is_file() and path.relative_to(root).as_posix() not in exclude}
