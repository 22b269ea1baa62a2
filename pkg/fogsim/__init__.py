"""
Physics-based fog simulation for clear-weather camera images and LiDAR point clouds.
A single visibility value (meteorological optical range) drives both sensors,
so the foggy outputs of a frame stay consistent with each other.


Domain types and units
^^^^^^^^^^^^^^^^^^^^^^

.. automodule:: fogsim.core
    :members:


Camera fog
^^^^^^^^^^

.. automodule:: fogsim.optics
    :members:


Atmospheric light
^^^^^^^^^^^^^^^^^

.. automodule:: fogsim.airlight
    :members:

.. automodule:: fogsim.airlight_stats
    :members:


LiDAR fog
^^^^^^^^^

.. automodule:: fogsim.lidar
    :members:


Configuration
^^^^^^^^^^^^^

.. automodule:: fogsim.config
    :members:
"""

from fogsim.core import (
    FogSimError, InvalidParameterError, AlignmentError, DepthDataError, InputError, ConfigError,
    RgbImage, DepthMap, PointCloud, FogParams, AtmosphericLight,
    mor_to_fog_params, bt709_luminance, validate_pair)
from fogsim.optics import TransmissionMap, compute_transmission, apply_fog, simulate_camera_fog
from fogsim.airlight import AirlightConfig, estimate_airlight, estimate_airlight_raw, corpus_airlight_stats
from fogsim.airlight_stats import CorpusReport, build_report, render_report
from fogsim.lidar import (
    LidarSimConfig, SoftResponseProfile, attenuate_hard, soft_response, simulate_lidar_fog)
from fogsim.config import FogSimConfig, load_config
