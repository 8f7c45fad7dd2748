from .base import BaseRenderer
from .dot_renderer import DotRenderer, to_dot
from .json_renderer import JSONRenderer
from .markdown_renderer import MarkdownRenderer

__all__ = ["BaseRenderer", "DotRenderer", "JSONRenderer", "MarkdownRenderer", "to_dot"]
