from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union
import logging

import json5

from .base import BaseExtractor
from ..utils.exceptions import ConfigurationError

logger = logging.getLogger(__name__)

# key -> accepted Python types
CONFIG_KEYS: Dict[str, tuple] = {
    "panel": (str,),
    "partition": (str,),
    "out": (str,),
    "bootstraps": (int,),
    "block_length": (int, str),
    "alpha": (int, float),
    "seed": (int,),
    "runs": (int,),
    "which": (str,),
    "methods": (str, list),
    "workers": (int,),
    "include_unassigned_in_x": (bool,),
    "skip_self_loops": (bool,),
    "x_stream": (str,),
    "ridge": (int, float),
    "T": (int,),
    "coefficient": (int, float),
    "burn_in": (int,),
    "within_set_var": (bool,),
    "log_level": (str,),
    "log_file": (str,),
}


class ConfigExtractor(BaseExtractor):
    """Loads a json5 run configuration whose keys mirror the CLI flags."""

    def __init__(self, config_file: Optional[Union[str, Path]] = None):
        super().__init__()
        self.config_file = config_file
        if config_file:
            self.values = self.load(config_file)

    def load_from_file(self, config_file: Union[str, Path]) -> Dict[str, Any]:
        path = Path(config_file)
        if not path.exists():
            raise ConfigurationError("config file not found", details={"path": str(path)})

        with open(path, "r", encoding="utf-8") as file:
            content = file.read()

        try:
            values = json5.loads(content)
        except ValueError as e:
            raise ConfigurationError("config file is not valid json5", details={"path": str(path)}, cause=e)

        if not isinstance(values, dict):
            raise ConfigurationError("config file must hold an object", details={"path": str(path)})
        return self.validate(values, str(path))

    def load(self, config_file: Union[str, Path]) -> Dict[str, Any]:
        self.config_file = config_file
        self.values = self.load_from_file(config_file)
        logger.info("Loaded config %s (%d keys)", config_file, len(self.values))
        return self.values

    @staticmethod
    def validate(values: Mapping[str, Any], source: str = "<config>") -> Dict[str, Any]:
        unknown = sorted(key for key in values if key not in CONFIG_KEYS)
        if unknown:
            raise ConfigurationError(
                "unknown config keys",
                details={"path": source, "keys": ", ".join(unknown)},
            )
        for key, value in values.items():
            types = CONFIG_KEYS[key]
            # bool is an int subclass; only accept it where bool is declared
            wrong = (isinstance(value, bool) and bool not in types) or not isinstance(value, types)
            if wrong:
                raise ConfigurationError(
                    f"config key {key} has the wrong type",
                    details={"path": source, "key": key, "value": value},
                )
        if "methods" in values and isinstance(values["methods"], list):
            values = dict(values)
            values["methods"] = ",".join(str(m) for m in values["methods"])
        return dict(values)

    def extract(self) -> Dict[str, Any]:
        return self.values
