"""
Structured-text configuration overriding the defaults of
:py:class:`~fogsim.airlight.AirlightConfig`, :py:class:`~fogsim.lidar.LidarSimConfig`
and the LiDAR sensor constants.

A configuration file is a YAML mapping with optional sections:

.. code-block:: yaml

    airlight:
        depth_threshold: 1000
        dark_channel_patch: 15
        candidate_fraction: 0.001
        lum_low: 0.6374
        lum_high: 0.8555
        neutralize: true
    lidar:
        r_min: 1.5
        range_step: 0.1
        noise_floor: 0
        rng_seed: 0
    sensor:
        beta0: 3.183098861837907e-07
        tau_h: 2.0e-08

Omitted keys keep their defaults.
"""

import dataclasses

import yaml

from fogsim.core import (
    ConfigError, InvalidParameterError, DEFAULT_BETA0, DEFAULT_TAU_H, mor_to_fog_params)
from fogsim.airlight import AirlightConfig
from fogsim.lidar import LidarSimConfig


@dataclasses.dataclass(frozen=True)
class SensorConfig:
    """
    LiDAR sensor constants that do not depend on the visibility.

    :param beta0: differential reflectivity of a hard target, 1/sr.
    :param tau_h: half-power pulse width, seconds.
    """
    beta0: float = DEFAULT_BETA0
    tau_h: float = DEFAULT_TAU_H

    def __post_init__(self):
        if not (self.beta0 > 0 and self.tau_h > 0):
            raise InvalidParameterError("beta0 and tau_h must be positive")


@dataclasses.dataclass(frozen=True)
class FogSimConfig:
    """
    The complete set of simulation parameters except the visibility.
    """
    airlight: AirlightConfig = dataclasses.field(default_factory=AirlightConfig)
    lidar: LidarSimConfig = dataclasses.field(default_factory=LidarSimConfig)
    sensor: SensorConfig = dataclasses.field(default_factory=SensorConfig)

    def fog_params(self, mor):
        """
        Returns :py:class:`~fogsim.core.FogParams` for the visibility ``mor``
        with the configured sensor constants.
        """
        return mor_to_fog_params(mor, beta0=self.sensor.beta0, tau_h=self.sensor.tau_h)


_SECTIONS = dict(airlight=AirlightConfig, lidar=LidarSimConfig, sensor=SensorConfig)

# YAML has no separate integer type for these, so values like ``15.0`` are accepted.
_INTEGER_FIELDS = {('airlight', 'dark_channel_patch'), ('lidar', 'rng_seed')}


def _build_section(name, values):
    cls = _SECTIONS[name]
    if values is None:
        values = {}
    if not isinstance(values, dict):
        raise ConfigError("Section '{name}' must be a mapping".format(name=name))

    known = set(field.name for field in dataclasses.fields(cls))
    unknown = sorted(set(values) - known)
    if len(unknown) > 0:
        raise ConfigError(
            "Unknown keys in section '{name}': {keys}".format(name=name, keys=", ".join(unknown)))

    kwds = {}
    for key, value in values.items():
        if (name, key) in _INTEGER_FIELDS and isinstance(value, float) and value.is_integer():
            value = int(value)
        kwds[key] = value

    try:
        return cls(**kwds)
    except (InvalidParameterError, TypeError) as e:
        raise ConfigError("Invalid values in section '{name}': {err}".format(name=name, err=e))


def config_from_dict(data):
    """
    Builds a :py:class:`FogSimConfig` from a nested mapping of sections.
    """
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("A configuration must be a mapping of sections")

    unknown = sorted(set(data) - set(_SECTIONS))
    if len(unknown) > 0:
        raise ConfigError("Unknown configuration sections: " + ", ".join(unknown))

    return FogSimConfig(**{name: _build_section(name, values) for name, values in data.items()})


def load_config(path):
    """
    Reads a :py:class:`FogSimConfig` from a YAML file.

    :raises ConfigError: if the file cannot be parsed, or has unknown sections, keys,
        or invalid values.
    """
    try:
        with open(path) as f:
            data = yaml.safe_load(f)
    except OSError as e:
        raise ConfigError("Cannot read the configuration file {path}: {err}".format(path=path, err=e))
    except yaml.YAMLError as e:
        raise ConfigError("Cannot parse the configuration file {path}: {err}".format(path=path, err=e))
    return config_from_dict(data)


def config_to_dict(config):
    """
    Returns the JSON-compatible nested representation of a :py:class:`FogSimConfig`.
    """
    return dataclasses.asdict(config)
