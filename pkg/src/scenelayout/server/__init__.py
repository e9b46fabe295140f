from .app import create_app
from .workspace import SceneWorkspace

__all__ = ["create_app", "SceneWorkspace"]
