"""
Report rendering: a commented header, a fixed-width table and newline-delimited JSON.

Only the header carries the timestamp; the body depends on the configuration alone.
"""

import json
import logging
import math
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Any, Dict, List, Optional

from dateutil import tz

from .config import RunConfig
from .models import Verdict
from .version import __version__

logger = logging.getLogger(__name__)


def utc_timestamp() -> str:
    return datetime.now(tz=tz.tzutc()).isoformat(timespec="seconds")


def format_value(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, Enum):
        return str(value.value)
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:.12g}"
    return str(value)


def _jsonable(value: Any) -> Any:
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


@dataclass
class Report:
    """Rows and summary of one command run, with the verdict that sets the exit code."""

    command: str
    config: RunConfig
    columns: List[str]
    rows: List[Dict[str, Any]] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)
    verdict: Verdict = Verdict.TRUE

    def header_lines(self, timestamp: Optional[str] = None) -> List[str]:
        tolerances = self.config.tolerances
        resolved = json.dumps(self.config.model_dump(mode="json"), sort_keys=True)
        return [
            f"# csch-hilbert {__version__} {self.command}",
            f"# generated {timestamp or utc_timestamp()}",
            f"# tolerances quad={tolerances.quad:g} sum={tolerances.sum:g} "
            f"guard={tolerances.guard:g}",
            f"# config {resolved}",
        ]

    def body_lines(self) -> List[str]:
        cells = [[format_value(row.get(column)) for column in self.columns] for row in self.rows]
        widths = [
            max([len(column)] + [len(line[i]) for line in cells])
            for i, column in enumerate(self.columns)
        ]
        lines = ["  ".join(c.rjust(w) for c, w in zip(self.columns, widths))]
        lines.extend("  ".join(c.rjust(w) for c, w in zip(line, widths)) for line in cells)
        for key in sorted(self.summary):
            lines.append(f"{key}: {format_value(self.summary[key])}")
        lines.append(f"verdict: {self.verdict.value}")
        return lines

    def render(self, timestamp: Optional[str] = None) -> str:
        return "\n".join(self.header_lines(timestamp) + self.body_lines()) + "\n"

    def records(self) -> List[str]:
        """One JSON object per row, then the summary."""
        lines = [
            json.dumps({"command": self.command, **_jsonable(row)}, sort_keys=True)
            for row in self.rows
        ]
        summary = {"command": self.command, "summary": _jsonable(self.summary)}
        summary["verdict"] = self.verdict.value
        lines.append(json.dumps(summary, sort_keys=True))
        return lines

    def write_records(self, path: Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w") as f:
            f.write("\n".join(self.records()) + "\n")
        logger.info(f"Wrote {len(self.rows)} records to {path}")
