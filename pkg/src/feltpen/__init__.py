"""feltpen: friction-writing feedback toolkit.

Analyzes friction-induced pen oscillations, synthesizes
actuator-equalized tactile patterns, extracts seamless sound loops,
simulates pen-tip friction dynamics, and serves pressure/speed-coupled
playback gain to a browser drawing demo.
"""

from .signal_io import SampledSignal, load_signal, normalize, save_signal

__all__ = ["SampledSignal", "load_signal", "save_signal", "normalize"]

__version__ = "0.1.0"
