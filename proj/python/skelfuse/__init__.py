"""Skeleton and object encodings for action recognition."""

from ._core import *  # noqa: F401,F403
from ._core import (
    Error,
    LookupError,
    ParseError,
    ValidationError,
    __doc__,
)

__version__ = "0.1.0"
