"""Error taxonomy shared by engines, matrix encoding, schemes and the service.

Every error carries a short machine-readable ``category`` so the HTTP layer
and foreign-language clients can map failures without parsing messages.
"""


class FheError(Exception):
    """Base class for all library errors."""

    category = "error"


class CapacityError(FheError):
    """Vector or chunk does not fit in the available ciphertext slots."""

    category = "capacity"


class LevelMismatchError(FheError):
    """Binary operation on ciphertexts at different levels."""

    category = "level"


class ScaleMismatchError(FheError):
    """Addition of ciphertexts whose scales differ beyond tolerance."""

    category = "scale"


class ComponentSizeError(FheError):
    """Operation requires a relinearized (2-component) ciphertext."""

    category = "components"


class DepthExhaustedError(FheError):
    """No rescale levels remain."""

    category = "depth"


class EngineMismatchError(FheError):
    """Handle was produced by a different engine instance."""

    category = "engine"


class RotationKeyError(FheError):
    """No rotation key provisioned for the requested step."""

    category = "rotation-key"


class PrecisionError(FheError):
    """Encoded coefficients overflow the modulus chain."""

    category = "precision"


class ShapeError(FheError):
    """Matrix dimensions do not conform."""

    category = "shape"


class LayoutMismatchError(FheError):
    """Scheme applied to operands with an incompatible sparsity layout."""

    category = "layout"


class DimensionError(FheError):
    """Empty or otherwise invalid matrix dimensions."""

    category = "dimension"


class BoundsError(FheError):
    """Element index outside the matrix."""

    category = "bounds"


class CorruptionError(FheError):
    """Metadata and ciphertext chunks are inconsistent."""

    category = "corruption"


class ParameterError(FheError):
    """Invalid scheme parameters."""

    category = "parameter"
