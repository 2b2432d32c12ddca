"""Simulation of pilot-contamination attacks on secure MIMO links and of
the key-confirmation countermeasure that detects them.

The package is organized as a numpy library plus a small CLI:

* :mod:`pilotguard.numerics`   complex-matrix kernel and seeded sampling
* :mod:`pilotguard.channel`    joint channel law, estimation, capacities
* :mod:`pilotguard.adversary`  pilot-injection strategies
* :mod:`pilotguard.keyconf`    key extraction and the handshake
* :mod:`pilotguard.detector`   trace check and pairing decision
* :mod:`pilotguard.secrecy`    beamforming and secrecy-outage Monte Carlo
* :mod:`pilotguard.experiments` reproducible sweeps with CSV output
"""

__version__ = "0.1.0"

from .errors import (  # noqa: F401
    AlphaInfeasibleError,
    ConfigError,
    InsufficientEntropyError,
    NotPSDError,
    ParameterError,
    PilotGuardError,
    SingularError,
)
from .rng import RngStream, trial_stream  # noqa: F401
