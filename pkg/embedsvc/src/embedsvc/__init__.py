"""embedsvc: inference-only embedding/similarity sidecar."""

__version__ = "0.1.0"

from .config import ModelSpec, ServiceConfig
from .service import create_app
from .store import export_store

__all__ = ["ModelSpec", "ServiceConfig", "create_app", "export_store", "__version__"]
