"""HTTP bridge exposing a language model's generate/score/embed operations."""

from .app import create_app
from .engine import HashedEmbedder, NgramEngine

__all__ = ["create_app", "NgramEngine", "HashedEmbedder"]
__version__ = "0.1.0"
