"""Exception hierarchy. Every failure the package raises derives from NxgptError
so callers (and the CLI) can separate usage problems from runtime problems."""


class NxgptError(Exception):
    """Base class for all package errors."""


class ConfigError(NxgptError):
    """Invalid or unparseable configuration (unknown keys are errors)."""


class DegenerateInputError(NxgptError):
    """Input that makes the requested quantity undefined (e.g. all-zero totals)."""


class CorruptCheckpointError(NxgptError):
    """Blob bytes inconsistent with the manifest (bad magic, truncation, shape)."""


class CheckpointVersionError(NxgptError):
    """Manifest format_version not understood by this build."""


class ShapeMismatchError(NxgptError):
    """Tensor names/shapes do not match the target configuration."""


class WrongModalityError(NxgptError):
    """A modality was passed where it is not allowed (e.g. text to encode())."""


class InvalidInputError(NxgptError):
    """Payload or argument violates declared invariants (non-finite, wrong dims)."""


class TokenizationError(NxgptError):
    """Character outside the supported set, or id outside the plain-text range."""


class InvalidParameterError(NxgptError):
    """Parameter outside its valid domain (e.g. temperature <= 0)."""


class NumericError(NxgptError):
    """NaN/Inf appeared in activations."""


class SequenceTooLongError(NxgptError):
    """Input sequence exceeds the model's maximum token length."""


class SignalCountMismatchError(NxgptError):
    """Number of signal hidden states differs from the configured count."""


class UntrainedBackboneError(NxgptError):
    """Sampling requested from a diffusion backbone that was never pretrained."""


class MissingDecoderError(NxgptError):
    """An activated modality has no usable decoder; message names the modality."""


class MissingPrerequisiteError(NxgptError):
    """A training stage was started without its prerequisite checkpoint."""


class DatasetParseError(NxgptError):
    """Malformed dataset record; message carries the offending line number."""


class DanglingRefError(NxgptError):
    """Dataset manifest references a blob that does not exist."""


class UnknownTemplateError(NxgptError):
    """Instruction-wrapping template id out of range."""
