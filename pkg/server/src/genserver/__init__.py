"""Reference generation service implementing the toolkit wire protocol."""

from .config import DEFAULT_LANG_TOKENS, ConfigError, ServerConfig
from .modes import BadRequest, EchoMode, LookupMode, ModelMode
from .service import GenerationServer

__version__ = "0.1.0"
