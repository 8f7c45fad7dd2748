from .base import BaseExtractor
from .config_extractor import CONFIG_KEYS, ConfigExtractor

__all__ = ["BaseExtractor", "ConfigExtractor", "CONFIG_KEYS"]
