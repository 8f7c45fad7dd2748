"""Demonstration data shipped with the package.

``hela_like_panel.csv`` is a synthetic 48 x 15 panel drawn from a stable VAR(1)
in which set I drives set II and set IV drives sets II and III; the series
carry cell-cycle gene names but the values are not expression measurements.
"""

from importlib import resources
from pathlib import Path

from ..utils.exceptions import IngestionError

BUNDLED = ("hela_like_panel.csv", "hela_partition.txt")


def bundled_path(name: str) -> Path:
    if name not in BUNDLED:
        raise IngestionError("no such bundled file", details={"name": name, "available": ", ".join(BUNDLED)})
    return Path(str(resources.files(__name__).joinpath(name)))
