"""Local embedding endpoint serving mean instruction-token vectors."""

from .app import create_app
from .encoder import HashProjectionEncoder, ModelLoadFailure, load_encoder

__all__ = ["HashProjectionEncoder", "ModelLoadFailure", "create_app", "load_encoder"]

__version__ = "0.1.0"
