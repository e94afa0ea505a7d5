"""Link-level simulator for tunnel-diode backscatter tags.

The package models the whole chain at desk scale: the diode's IV curve and
bias budget, the free-running oscillator with drift, the injection-locked
reflection amplifier and its switchover against a plain RF switch, a
log-distance obstacle channel with thermal noise, the tag's harvesting and
digitization state machines, edge-side ASK/FSK demodulation, and a scenario
harness with named presets and CSV metrics.
"""

from . import channel, device, gesture, harness, kernels, receiver, tag
from .waveforms import ComplexBaseband, PowerEnvelope

__version__ = "0.1.0"

__all__ = [
    "ComplexBaseband",
    "PowerEnvelope",
    "channel",
    "device",
    "gesture",
    "harness",
    "kernels",
    "receiver",
    "tag",
    "__version__",
]
