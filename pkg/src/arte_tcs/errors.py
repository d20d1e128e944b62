"""Shared exception types.

Kept in one place so the CLI can map them onto exit codes without
importing every module.
"""


class ConfigError(ValueError):
    """Bad parameter value, malformed config file, or invalid override."""


class SimulationDiverged(RuntimeError):
    """A state variable went non-finite during integration."""

    def __init__(self, message, t=None, step=None):
        super().__init__(message)
        self.t = t
        self.step = step


class AudioFormatError(ValueError):
    """WAV container exists but cannot be used (encoding, channels, rate)."""


class UnsupportedSampleRateError(AudioFormatError):
    pass


class ChannelLayoutError(AudioFormatError):
    pass


class DegenerateSignalError(ValueError):
    """Signal has no usable content (all zeros / too short) for analysis."""


class InsufficientAudioError(ValueError):
    """Clip too short for the requested number of frames."""


class ModelFormatError(ValueError):
    """Persisted classifier file is malformed or inconsistent."""


class PoleOnAxisError(RuntimeError):
    """Frequency-response evaluation landed on a pole."""


class TrainingDiverged(RuntimeError):
    """Classifier training produced a non-finite loss."""

    def __init__(self, message, epoch=None):
        super().__init__(message)
        self.epoch = epoch
