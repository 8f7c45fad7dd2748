from pathlib import Path
from typing import Union


class BaseRenderer:
    def __init__(self):
        self.style = {}

    def render(self, data) -> str:
        raise NotImplementedError("Render method must be implemented by subclasses.")

    def set_style(self, style):
        self.style = style

    def write(self, text: str, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.write_text(text, encoding="utf-8", newline="\n")
        return path
