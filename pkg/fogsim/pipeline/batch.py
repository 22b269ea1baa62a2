"""
Batch generation of a foggy dataset.
"""

import collections
import concurrent.futures
import dataclasses
import logging
import time

from tqdm import tqdm

import fogsim.helpers as helpers
from fogsim.core import FogSimError, InputError, InvalidParameterError, validate_pair
from fogsim.optics import simulate_camera_fog, quantize
from fogsim.lidar import simulate_lidar_fog
from fogsim.config import FogSimConfig, config_to_dict
from fogsim.version import full_version as tool_version
from fogsim.pipeline.density import assign_densities, policy_hash
from fogsim.pipeline.formats import (
    discover_dataset, output_paths, read_image, read_depth, read_cloud,
    encode_image, encode_cloud, write_all)
from fogsim.pipeline.manifest import FrameRecord, SceneManifest, ManifestStore


logger = logging.getLogger(__name__)

TEMPLATE = helpers.template_for(__file__)


@dataclasses.dataclass(frozen=True)
class FrameTask:
    """
    Everything a worker needs to process one frame.

    :param frame: :py:class:`~fogsim.pipeline.formats.FrameInputs`.
    :param mor: the visibility assigned to the scene of the frame, meters.
    :param config: :py:class:`~fogsim.config.FogSimConfig`.
    :param in_root: the input dataset root.
    :param out_root: the output root.
    :param airlight: an :py:class:`~fogsim.core.AtmosphericLight` replacing the estimate,
        or ``None``.
    """
    frame: object
    mor: float
    config: FogSimConfig
    in_root: str
    out_root: str
    airlight: object = None


def _relative_paths(paths, root):
    return {
        name: None if path is None else helpers.relative_path(path, root)
        for name, path in paths.items()}


def process_frame(task):
    """
    Fogs a single frame and writes its outputs:
    the foggy image, the foggy point cloud (if the frame has one),
    and a byte-identical copy of the annotations (if any).
    All outputs are computed before anything is written, so a failing frame
    leaves no files behind.

    Errors are not raised but recorded in the returned
    :py:class:`~fogsim.pipeline.manifest.FrameRecord` with the status ``'failed'``.
    """
    frame = task.frame
    outputs = output_paths(frame, task.out_root)
    inputs = _relative_paths(
        dict(image=frame.image, depth=frame.depth, cloud=frame.cloud, labels=frame.labels),
        task.in_root)
    modalities = ['camera'] if frame.cloud is None else ['camera', 'lidar']

    try:
        image = read_image(frame.image)
        if frame.depth is None:
            raise InputError("No depth map for the frame")
        image, depth = validate_pair(image, read_depth(frame.depth))

        foggy_image, airlight = simulate_camera_fog(
            image, depth, task.mor,
            airlight_override=task.airlight, airlight_cfg=task.config.airlight)
        files = {outputs.image: encode_image(quantize(foggy_image))}

        lidar_stats = None
        if frame.cloud is not None:
            foggy_cloud, stats = simulate_lidar_fog(
                read_cloud(frame.cloud), task.mor,
                cfg=task.config.lidar, params=task.config.fog_params(task.mor))
            files[outputs.cloud] = encode_cloud(foggy_cloud)
            lidar_stats = stats.to_dict()

        if frame.labels is not None:
            files[outputs.labels] = frame.labels.read_bytes()

        write_all(files)

    except (FogSimError, OSError, ValueError) as e:
        logger.error(
            "Frame %s/%s failed: %s: %s", frame.scene_id, frame.frame_id, type(e).__name__, e)
        return FrameRecord(
            frame_id=frame.frame_id, status='failed', inputs=inputs, outputs={},
            modalities=modalities, error="{name}: {err}".format(name=type(e).__name__, err=e))

    return FrameRecord(
        frame_id=frame.frame_id, status='done', inputs=inputs,
        outputs=_relative_paths(
            dict(image=outputs.image, cloud=outputs.cloud, labels=outputs.labels),
            task.out_root),
        modalities=modalities,
        airlight=airlight.as_list(),
        airlight_fallback_warning=airlight.fallback,
        lidar_stats=lidar_stats)


@dataclasses.dataclass(frozen=True)
class BatchSummary:
    """
    The outcome of :py:func:`run_batch`.

    .. py:attribute:: failures

        A list of ``(scene_id, frame_id, error)`` for every failed frame of this run.

    .. py:attribute:: scenes_per_level

        Number of scenes per assigned visibility among the processed scenes.
    """
    n_scenes: int
    n_skipped: int
    n_frames: int
    n_failed: int
    wall_time: float
    scenes_per_level: dict
    failures: list

    @property
    def throughput(self):
        """Frames per second."""
        return self.n_frames / self.wall_time if self.wall_time > 0 else 0.

    def render(self):
        return TEMPLATE.get_def('summary').render(summary=self).strip() + "\n"


def _execute(tasks, workers):
    """
    Yields ``(task, record)`` pairs in the order of completion.
    """
    if workers == 1:
        for task in tasks:
            yield task, process_frame(task)
        return

    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as executor:
        futures = {executor.submit(process_frame, task): task for task in tasks}
        for future in concurrent.futures.as_completed(futures):
            yield futures[future], future.result()


def run_batch(
        in_root, out_root, policy, config=None, workers=1, scenes=None,
        airlight=None, progress=False):
    """
    Fogs a whole dataset (see :py:mod:`fogsim.pipeline.formats` for the layout).

    Visibilities are assigned to all scenes of the dataset with
    :py:func:`~fogsim.pipeline.density.assign_densities`.
    Scenes recorded as done in the manifest of ``out_root`` are skipped.
    Every finished scene is appended to the manifest journal by this process only,
    and the manifest is compacted at the end.
    The outputs and the manifest do not depend on ``workers``.

    :param policy: :py:class:`~fogsim.pipeline.density.DensityPolicy`.
    :param config: :py:class:`~fogsim.config.FogSimConfig` (default if ``None``).
    :param workers: the number of worker processes; ``1`` processes frames in this process.
    :param scenes: an optional iterable of scene ids to process.
    :param airlight: an optional :py:class:`~fogsim.core.AtmosphericLight`
        replacing the estimate in every frame.
    :param progress: show a progress bar.
    :returns: a :py:class:`BatchSummary`.
    :raises InputError: if the dataset root is unreadable or empty,
        ``scenes`` names unknown scenes, or ``out_root`` holds the results of another policy.
    """
    if config is None:
        config = FogSimConfig()
    if workers < 1:
        raise InvalidParameterError("The number of workers must be positive, got " + repr(workers))

    start = time.perf_counter()

    dataset = discover_dataset(in_root)
    if len(dataset) == 0:
        raise InputError("No scenes found in " + str(in_root))

    # Assigned over the whole dataset, so that subsets get the same visibilities.
    assignment = assign_densities(dataset.keys(), policy)

    if scenes is None:
        selected = sorted(dataset)
    else:
        selected = sorted(set(scenes))
        unknown = [scene_id for scene_id in selected if scene_id not in dataset]
        if len(unknown) > 0:
            raise InputError("Unknown scenes: " + ", ".join(unknown))

    digest = policy_hash(policy)
    store = ManifestStore(
        out_root, digest,
        header=dict(tool_version=tool_version, policy=policy.to_dict(), config=config_to_dict(config)))
    previous = store.load()

    todo = []
    for scene_id in selected:
        if scene_id in previous and previous[scene_id].status == 'done':
            logger.info("Skipping scene %s: already done", scene_id)
        else:
            todo.append(scene_id)

    tasks = [
        FrameTask(
            frame=frame, mor=assignment[scene_id], config=config,
            in_root=str(in_root), out_root=str(out_root), airlight=airlight)
        for scene_id in todo for frame in dataset[scene_id]]

    remaining = {scene_id: len(dataset[scene_id]) for scene_id in todo}
    records = collections.defaultdict(list)

    def finish_scene(scene_id):
        store.append(SceneManifest.from_frames(
            scene_id, assignment[scene_id], records.pop(scene_id, []), tool_version, digest))

    for scene_id in todo:
        if remaining[scene_id] == 0:
            finish_scene(scene_id)

    failures = []
    with tqdm(total=len(tasks), unit='frame', disable=not progress) as pbar:
        for task, record in _execute(tasks, workers):
            scene_id = task.frame.scene_id
            records[scene_id].append(record)
            if record.status != 'done':
                failures.append((scene_id, record.frame_id, record.error))
            remaining[scene_id] -= 1
            if remaining[scene_id] == 0:
                finish_scene(scene_id)
            pbar.update(1)

    store.compact()

    summary = BatchSummary(
        n_scenes=len(todo),
        n_skipped=len(selected) - len(todo),
        n_frames=len(tasks),
        n_failed=len(failures),
        wall_time=time.perf_counter() - start,
        scenes_per_level=dict(collections.Counter(assignment[scene_id] for scene_id in todo)),
        failures=sorted(failures))

    logger.info(
        "Processed %d frames of %d scenes (%d failed, %d scenes skipped) in %.1f s",
        summary.n_frames, summary.n_scenes, summary.n_failed, summary.n_skipped,
        summary.wall_time)

    return summary
