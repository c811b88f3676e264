"""Session layer: interprets intents into engine actions and serves the API."""

from .catalog import Catalog, load_catalog
from .config import ServiceConfig
from .sessions import Action, PendingSelection, Session, TurnOutcome

__all__ = [
    "Action",
    "Catalog",
    "PendingSelection",
    "ServiceConfig",
    "Session",
    "TurnOutcome",
    "load_catalog",
]
