from typing import Any, Dict


class BaseExtractor:
    def __init__(self):
        self.values: Dict[str, Any] = {}

    def extract(self) -> Dict[str, Any]:
        raise NotImplementedError("Subclasses should implement this method.")

    def load(self, source) -> Dict[str, Any]:
        raise NotImplementedError("Subclasses should implement this method.")
