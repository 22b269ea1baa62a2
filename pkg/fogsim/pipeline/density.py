"""
Scene-level assignment of fog visibilities.
"""

import dataclasses
import hashlib
import json
import math

import numpy

from fogsim.core import InputError, InvalidParameterError


MODES = ('fixed', 'mixed')

DEFAULT_FIXED_MOR = 150.
DEFAULT_MIXED_LEVELS = (50., 100., 150., 200., 300.)


@dataclasses.dataclass(frozen=True)
class DensityPolicy:
    """
    Defines which visibility each scene gets.

    :param mode: ``'fixed'`` (every scene gets ``fixed_mor``) or ``'mixed'``
        (scenes are split evenly between ``mixed_levels``).
    :param fixed_mor: visibility for the fixed mode, meters.
    :param mixed_levels: strictly increasing visibilities for the mixed mode, meters.
    :param seed: 64-bit seed of the scene permutation in the mixed mode.
    """
    mode: str = 'fixed'
    fixed_mor: float = DEFAULT_FIXED_MOR
    mixed_levels: tuple = DEFAULT_MIXED_LEVELS
    seed: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise InvalidParameterError(
                "Density mode must be one of {modes}, got {mode!r}".format(
                    modes=", ".join(MODES), mode=self.mode))

        if not (math.isfinite(self.fixed_mor) and self.fixed_mor > 0):
            raise InvalidParameterError(
                "Fixed visibility must be positive, got " + repr(self.fixed_mor))
        object.__setattr__(self, 'fixed_mor', float(self.fixed_mor))

        levels = tuple(float(level) for level in self.mixed_levels)
        if len(levels) == 0:
            raise InvalidParameterError("At least one visibility level is required")
        if not all(math.isfinite(level) and level > 0 for level in levels):
            raise InvalidParameterError(
                "Visibility levels must be positive, got " + repr(levels))
        if any(l1 >= l2 for l1, l2 in zip(levels[:-1], levels[1:])):
            raise InvalidParameterError(
                "Visibility levels must be strictly increasing, got " + repr(levels))
        object.__setattr__(self, 'mixed_levels', levels)

        if isinstance(self.seed, bool) or not isinstance(self.seed, int) \
                or not 0 <= self.seed < 2 ** 64:
            raise InvalidParameterError(
                "Seed must be a 64-bit unsigned integer, got " + repr(self.seed))

    @property
    def levels(self):
        """The visibilities this policy can assign."""
        return (self.fixed_mor,) if self.mode == 'fixed' else self.mixed_levels

    def to_dict(self):
        return dict(
            mode=self.mode, fixed_mor=self.fixed_mor,
            mixed_levels=list(self.mixed_levels), seed=self.seed)

    @classmethod
    def from_dict(cls, data):
        return cls(
            mode=data['mode'], fixed_mor=data['fixed_mor'],
            mixed_levels=tuple(data['mixed_levels']), seed=data['seed'])


def policy_hash(policy):
    """
    Returns a short hex digest identifying the policy.
    Outputs produced under policies with different digests cannot be mixed in one dataset.
    """
    canonical = json.dumps(policy.to_dict(), sort_keys=True, separators=(',', ':'))
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()[:16]


def scene_permutation(count, seed):
    """
    Returns a permutation of ``range(count)`` defined by ``seed``.
    Uses the counter-based Philox generator, so the result does not depend on the platform.
    """
    rng = numpy.random.Generator(numpy.random.Philox(seed))
    return rng.permutation(count)


def assign_densities(scene_ids, policy):
    """
    Assigns a visibility to every scene.

    In the mixed mode the sorted scene ids are shuffled by :py:func:`scene_permutation`,
    and the levels are dealt round-robin over the shuffled list,
    so the numbers of scenes per level differ by at most one.
    The result only depends on the set of scene ids and the policy.

    :param scene_ids: a non-empty iterable of unique scene identifiers.
    :param policy: a :py:class:`DensityPolicy`.
    :returns: a dictionary ``{scene_id: mor}``.
    """
    scene_ids = list(scene_ids)
    if len(scene_ids) == 0:
        raise InputError("No scenes to assign visibilities to")

    sorted_ids = sorted(scene_ids)
    duplicates = sorted(set(
        id1 for id1, id2 in zip(sorted_ids[:-1], sorted_ids[1:]) if id1 == id2))
    if len(duplicates) > 0:
        raise InputError("Duplicate scene ids: " + ", ".join(map(str, duplicates)))

    if policy.mode == 'fixed':
        return {scene_id: policy.fixed_mor for scene_id in sorted_ids}

    levels = policy.mixed_levels
    order = scene_permutation(len(sorted_ids), policy.seed)
    assigned = {
        sorted_ids[index]: levels[position % len(levels)]
        for position, index in enumerate(order)}
    return {scene_id: assigned[scene_id] for scene_id in sorted_ids}
