"""Access to the bundled golden plant documents.

`ref_loop12x12.json` is the classic single-loop reference build (one
12-tube x 12-fiber loop, two boxes, a cross-linked desk pair); `legi.json`
is the three-loop 12x6 campus plant with its full-duplex demand in
`legi_demand.json`.  `deadzone_cut.json` cuts the reference loop between
its two taps, which severs nothing.
"""

from importlib.resources import files
from pathlib import Path

GOLDEN_NAMES = (
    "ref_loop12x12.json",
    "legi.json",
    "legi_demand.json",
    "deadzone_cut.json",
)


def golden_path(name: str) -> Path:
    if name not in GOLDEN_NAMES:
        raise KeyError(f"unknown golden document {name!r}; have {GOLDEN_NAMES}")
    return Path(str(files("fttoplan") / "data" / name))
