"""
Persistent record of a batch run.

Finished scenes are appended to ``manifest.journal`` (one JSON document per line)
as soon as they are done, so an interrupted run can be resumed.
At the end of a run the journal is compacted into ``manifest.json``,
which lists the scenes sorted by id and contains no timestamps,
so identical runs produce identical manifests.
"""

import dataclasses
import json
import logging
import os
import pathlib

from fogsim.core import InputError
from fogsim.pipeline.formats import atomic_write


logger = logging.getLogger(__name__)


MANIFEST_NAME = 'manifest.json'
JOURNAL_NAME = 'manifest.journal'

STATUSES = ('pending', 'done', 'failed')


@dataclasses.dataclass(frozen=True)
class FrameRecord:
    """
    The outcome of processing a single frame.
    Paths are POSIX paths relative to the input and output roots respectively.
    """
    frame_id: str
    status: str
    inputs: dict
    outputs: dict
    modalities: list
    airlight: list = None
    airlight_fallback_warning: bool = False
    lidar_stats: dict = None
    error: str = None

    def to_dict(self):
        return dataclasses.asdict(self)

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


@dataclasses.dataclass(frozen=True)
class SceneManifest:
    """
    The record of a scene: its visibility and the outcome of every frame.

    .. py:attribute:: status

        ``'done'`` if every frame succeeded, ``'failed'`` if any failed,
        ``'pending'`` if the scene has not been processed.
    """
    scene_id: str
    assigned_mor: float
    frames: list
    status: str
    tool_version: str
    policy_hash: str

    def __post_init__(self):
        if self.status not in STATUSES:
            raise InputError("Unknown scene status " + repr(self.status))

    @classmethod
    def from_frames(cls, scene_id, assigned_mor, frames, tool_version, policy_hash):
        frames = sorted(frames, key=lambda frame: frame.frame_id)
        status = 'done' if all(frame.status == 'done' for frame in frames) else 'failed'
        return cls(
            scene_id=scene_id, assigned_mor=assigned_mor, frames=frames, status=status,
            tool_version=tool_version, policy_hash=policy_hash)

    @property
    def failed_frames(self):
        return [frame for frame in self.frames if frame.status != 'done']

    def to_dict(self):
        return dict(
            scene_id=self.scene_id,
            assigned_mor=self.assigned_mor,
            status=self.status,
            tool_version=self.tool_version,
            policy_hash=self.policy_hash,
            frames=[frame.to_dict() for frame in self.frames])

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        data['frames'] = [FrameRecord.from_dict(frame) for frame in data['frames']]
        return cls(**data)


def _dumps(data, **kwds):
    return json.dumps(data, sort_keys=True, **kwds)


class ManifestStore:
    """
    Reads and writes the manifest of an output directory.
    Only the process that owns the store writes to it.

    :param out_root: the output directory.
    :param policy_hash: digest of the :py:class:`~fogsim.pipeline.density.DensityPolicy`
        of the current run.
    :param header: additional JSON-compatible run description
        (policy, configuration, version) stored at the top of ``manifest.json``.
    """

    def __init__(self, out_root, policy_hash, header=None):
        self.out_root = pathlib.Path(out_root)
        self.policy_hash = policy_hash
        self.header = {} if header is None else dict(header)
        self.manifest_path = self.out_root / MANIFEST_NAME
        self.journal_path = self.out_root / JOURNAL_NAME
        self._scenes = {}

    def _check_hash(self, scene):
        if scene.policy_hash != self.policy_hash:
            raise InputError(
                "{out} was produced with a different density policy ({old}, now {new}); "
                "use another output directory".format(
                    out=self.out_root, old=scene.policy_hash, new=self.policy_hash))

    def load(self):
        """
        Loads the scenes recorded by previous runs (the compacted manifest and the journal).

        :returns: a dictionary ``{scene_id: SceneManifest}``.
        :raises InputError: if the records were produced under a different policy.
        """
        scenes = {}

        if self.manifest_path.exists():
            try:
                data = json.loads(self.manifest_path.read_text(encoding='utf-8'))
                records = [SceneManifest.from_dict(scene) for scene in data['scenes']]
            except (ValueError, KeyError, TypeError) as e:
                raise InputError(
                    "Cannot parse {path}: {err}".format(path=self.manifest_path, err=e))
            for scene in records:
                scenes[scene.scene_id] = scene

        if self.journal_path.exists():
            lines = self.journal_path.read_text(encoding='utf-8').splitlines()
            for lineno, line in enumerate(lines, 1):
                if line.strip() == '':
                    continue
                try:
                    scene = SceneManifest.from_dict(json.loads(line))
                except (ValueError, KeyError, TypeError):
                    # An interrupted append leaves a truncated last line.
                    logger.warning(
                        "Ignoring a malformed record at %s:%d", self.journal_path, lineno)
                    continue
                scenes[scene.scene_id] = scene

        for scene in scenes.values():
            self._check_hash(scene)

        self._scenes = scenes
        return dict(scenes)

    def append(self, scene):
        """
        Records a finished scene in the journal.
        """
        self._check_hash(scene)
        self.out_root.mkdir(parents=True, exist_ok=True)
        with open(str(self.journal_path), 'a', encoding='utf-8') as f:
            f.write(_dumps(scene.to_dict()) + "\n")
            f.flush()
            os.fsync(f.fileno())
        self._scenes[scene.scene_id] = scene

    def scenes(self):
        return [self._scenes[scene_id] for scene_id in sorted(self._scenes)]

    def to_dict(self):
        result = dict(self.header)
        result['policy_hash'] = self.policy_hash
        result['scenes'] = [scene.to_dict() for scene in self.scenes()]
        return result

    def compact(self):
        """
        Writes all known scenes to ``manifest.json`` and removes the journal.
        """
        atomic_write(self.manifest_path, (_dumps(self.to_dict(), indent=2) + "\n").encode('utf-8'))
        if self.journal_path.exists():
            self.journal_path.unlink()
