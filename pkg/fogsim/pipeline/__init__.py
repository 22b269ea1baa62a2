"""
Batch generation of foggy datasets.


Visibility assignment
^^^^^^^^^^^^^^^^^^^^^

.. automodule:: fogsim.pipeline.density
    :members:


Dataset layout and formats
^^^^^^^^^^^^^^^^^^^^^^^^^^

.. automodule:: fogsim.pipeline.formats
    :members:


Manifest
^^^^^^^^

.. automodule:: fogsim.pipeline.manifest
    :members:


Batch processing
^^^^^^^^^^^^^^^^

.. automodule:: fogsim.pipeline.batch
    :members:


Previews
^^^^^^^^

.. automodule:: fogsim.pipeline.preview
    :members:
"""

from fogsim.pipeline.density import DensityPolicy, assign_densities, policy_hash
from fogsim.pipeline.manifest import FrameRecord, SceneManifest, ManifestStore
from fogsim.pipeline.batch import FrameTask, BatchSummary, process_frame, run_batch
from fogsim.pipeline.preview import emit_preview, emit_frame_preview
