"""
The ``fogsim`` command-line tool.

.. code-block:: text

    fogsim run --input <root> --output <out> [--mode fixed|mixed] [--mor 150]
               [--levels 50,100,150,200,300] [--seed 0] [--workers N]
               [--config FILE] [--scenes FILE] [--airlight L] [--progress]
    fogsim stats --input <dir> [--json FILE] [--workers N] [--config FILE]
    fogsim preview --input <root> --output <out> --scene <id> --frame <id>

``fogsim run`` exits with 0 if no frames failed, 1 if some did,
and 2 on errors that stop the whole run.
The log level is taken from the ``FOGSIM_LOG`` environment variable
(``WARNING`` by default); ``-v`` raises it to ``INFO``.
"""

import argparse
import json
import logging
import os
import pathlib
import sys

from fogsim.core import FogSimError, AtmosphericLight, validate_pair
from fogsim.config import FogSimConfig, load_config
from fogsim.airlight import corpus_airlight_stats
from fogsim.airlight_stats import render_report
from fogsim.helpers import parse_float_list
from fogsim.version import full_version
from fogsim.pipeline.density import DensityPolicy, DEFAULT_FIXED_MOR, DEFAULT_MIXED_LEVELS
from fogsim.pipeline.formats import discover_dataset, read_image, read_depth, atomic_write
from fogsim.pipeline.batch import run_batch
from fogsim.pipeline.preview import emit_frame_preview


logger = logging.getLogger(__name__)


LOG_ENV_VAR = 'FOGSIM_LOG'
LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"

EXIT_OK = 0
EXIT_FAILED_FRAMES = 1
EXIT_ERROR = 2


def configure_logging(verbose=False):
    """
    Sets up the ``fogsim`` logger according to ``FOGSIM_LOG`` and the verbosity flag.
    """
    name = os.environ.get(LOG_ENV_VAR, 'WARNING').strip().upper()
    level = logging.getLevelName(name)
    if not isinstance(level, int):
        level = logging.WARNING
    if verbose:
        level = min(level, logging.INFO)

    package_logger = logging.getLogger('fogsim')
    package_logger.setLevel(level)
    if not package_logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter(LOG_FORMAT))
        package_logger.addHandler(handler)


def _config(args):
    return FogSimConfig() if args.config is None else load_config(args.config)


def _read_scene_list(path):
    with open(path) as f:
        return [line.strip() for line in f if line.strip() != '']


def cmd_run(args):
    config = _config(args)
    policy = DensityPolicy(
        mode=args.mode, fixed_mor=args.mor,
        mixed_levels=parse_float_list(args.levels), seed=args.seed)
    scenes = None if args.scenes is None else _read_scene_list(args.scenes)
    airlight = None if args.airlight is None else AtmosphericLight.gray(args.airlight)

    summary = run_batch(
        args.input, args.output, policy, config=config, workers=args.workers,
        scenes=scenes, airlight=airlight, progress=args.progress)

    print(summary.render(), end='')
    return EXIT_FAILED_FRAMES if summary.n_failed > 0 else EXIT_OK


def load_stats_item(item):
    """
    Reads an ``(image_path, depth_path)`` item of :py:func:`stats_items`
    into an ``(image, depth)`` pair; ``depth`` is ``None`` if there is no depth path.
    Returns ``None`` (with a warning) if the files cannot be read.
    """
    image_path, depth_path = item
    try:
        image = read_image(image_path)
        if depth_path is None:
            return image, None
        return validate_pair(image, read_depth(depth_path))
    except (FogSimError, OSError) as e:
        logger.warning("Skipping %s: %s", image_path, e)
        return None


def stats_items(root):
    """
    Returns a list of ``(image_path, depth_path)`` items from a dataset root,
    or of ``(image_path, None)`` from a flat directory of PNG images.
    Frames of a dataset without a depth map are estimated without the depth filter.
    """
    root = pathlib.Path(root)
    dataset = discover_dataset(root)
    frames = [frame for scene_id in sorted(dataset) for frame in dataset[scene_id]]

    if len(frames) == 0:
        return [(path, None) for path in sorted(root.glob('*.png'))]

    for frame in frames:
        if frame.depth is None:
            logger.info(
                "%s/%s has no depth map, using the whole image", frame.scene_id, frame.frame_id)
    return [(frame.image, frame.depth) for frame in frames]


def cmd_stats(args):
    config = _config(args)
    report = corpus_airlight_stats(
        stats_items(args.input), config.airlight, workers=args.workers, loader=load_stats_item)
    print(render_report(report), end='')
    if args.json is not None:
        atomic_write(
            pathlib.Path(args.json),
            (json.dumps(report.to_dict(), sort_keys=True, indent=2) + "\n").encode('utf-8'))
    return EXIT_OK


def cmd_preview(args):
    path = emit_frame_preview(args.input, args.output, args.scene, args.frame)
    if path is None:
        return EXIT_FAILED_FRAMES
    print(path)
    return EXIT_OK


def build_arg_parser():
    parser = argparse.ArgumentParser(
        prog='fogsim',
        description="Physics-based fog simulation for camera images and LiDAR point clouds")
    parser.add_argument('--version', action='version', version='%(prog)s ' + full_version)
    parser.add_argument(
        '-v', '--verbose', action='store_true', help="log progress messages")

    subparsers = parser.add_subparsers(dest='command', required=True)

    run = subparsers.add_parser('run', help="fog a dataset")
    run.add_argument('--input', required=True, help="dataset root")
    run.add_argument('--output', required=True, help="output root")
    run.add_argument('--mode', choices=['fixed', 'mixed'], default='fixed')
    run.add_argument(
        '--mor', type=float, default=DEFAULT_FIXED_MOR,
        help="visibility in the fixed mode, meters (default: %(default)g)")
    run.add_argument(
        '--levels', default=",".join("{l:g}".format(l=l) for l in DEFAULT_MIXED_LEVELS),
        help="comma-separated visibilities in the mixed mode (default: %(default)s)")
    run.add_argument('--seed', type=int, default=0, help="seed of the mixed assignment")
    run.add_argument('--workers', type=int, default=1, help="number of worker processes")
    run.add_argument('--config', help="YAML file overriding simulation parameters")
    run.add_argument('--scenes', help="file with the scene ids to process, one per line")
    run.add_argument(
        '--airlight', type=float,
        help="use a neutral atmospheric light of this luminance instead of the estimate")
    run.add_argument('--progress', action='store_true', help="show a progress bar")
    run.set_defaults(func=cmd_run)

    stats = subparsers.add_parser('stats', help="atmospheric light statistics of a corpus")
    stats.add_argument('--input', required=True, help="dataset root or a directory of PNG images")
    stats.add_argument('--json', help="also write the report as JSON to this file")
    stats.add_argument('--workers', type=int, default=1, help="number of worker processes")
    stats.add_argument('--config', help="YAML file overriding the estimation parameters")
    stats.set_defaults(func=cmd_stats)

    preview = subparsers.add_parser('preview', help="before/after composite of a fogged frame")
    preview.add_argument('--input', required=True, help="dataset root")
    preview.add_argument('--output', required=True, help="output root of a run")
    preview.add_argument('--scene', required=True)
    preview.add_argument('--frame', required=True)
    preview.set_defaults(func=cmd_preview)

    return parser


def main(argv=None):
    args = build_arg_parser().parse_args(argv)
    configure_logging(args.verbose)

    try:
        return args.func(args)
    except (FogSimError, OSError, ValueError) as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_ERROR


if __name__ == '__main__':
    sys.exit(main())
