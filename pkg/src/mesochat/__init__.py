"""mesochat: conversational procedural modeling of mesoscale biological scenes."""

__version__ = "0.1.0"
