"""Joint transmit beamforming and receive filtering for MIMO ISAC.

The package designs a transmit covariance shared by radar sensing and
multi-user communication, together with a receive filter that maximizes
the sensing SCNR under per-antenna power, waveform-similarity, and
per-user SINR constraints. Clutter suppression is hardened against
angular mismatch with a covariance matrix taper.

Main entry points:

- :func:`isacbeam.driver.design_transceiver` runs the full alternating
  design and returns the finalized beamformers, filter, and traces.
- :class:`isacbeam.estimator.TransceiverDesigner` wraps the same
  pipeline in a scikit-learn style estimator.
- :mod:`isacbeam.experiments` provides seeded study runners; the
  ``isacbeam`` console script exposes them on the command line.
"""

from isacbeam.driver import DesignSolution, design_transceiver
from isacbeam.estimator import TransceiverDesigner
from isacbeam.scenario import BeamformerSet, ConfigError, ScenarioConfig, draw_channels
from isacbeam.transmit import (
    NumericalError,
    QoSInfeasibleError,
    TightnessViolationError,
    TransmitDesign,
)

__version__ = "0.1.0"

__all__ = [
    "BeamformerSet",
    "ConfigError",
    "DesignSolution",
    "NumericalError",
    "QoSInfeasibleError",
    "ScenarioConfig",
    "TightnessViolationError",
    "TransceiverDesigner",
    "TransmitDesign",
    "design_transceiver",
    "draw_channels",
    "__version__",
]
