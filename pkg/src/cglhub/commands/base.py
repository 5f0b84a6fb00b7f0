# -*- coding: utf-8 -*-
from dataclasses import dataclass, field
from typing import Any, Callable, Optional
from pathlib import Path
import logging

from cglhub.config import RunConfig

logger = logging.getLogger(__name__)


@dataclass
class CommandResult:
    """Unified result returned by every command, consumed by the CLI and the pipeline engine."""
    success: bool
    message: str
    data: Any = None
    errors: list[str] = field(default_factory=list)
    output_files: list[Path] = field(default_factory=list)


class BaseCommand:
    """
    All commands inherit from this.
    - The CLI calls .run() directly and inspects the CommandResult
    - The pipeline engine chains .run() calls and passes ``data`` along
    Every command owns one output directory.
    """

    def __init__(self, config: RunConfig, out_dir: str | Path | None = None,
                 progress_callback: Optional[Callable[[str, int], None]] = None):
        # progress_callback(message, percent)
        self.config = config
        self.out_dir = Path(out_dir if out_dir is not None else config.out_dir).expanduser()
        self.progress_callback = progress_callback or self._default_progress

    def _default_progress(self, message: str, percent: int):
        """CLI fallback: just log."""
        logger.info(f"[{percent:3d}%] {message}")

    def progress(self, message: str, percent: int):
        self.progress_callback(message, percent)

    def _prepare(self) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        return self.out_dir

    @staticmethod
    def _failure(exc: BaseException, **data) -> CommandResult:
        return CommandResult(success=False, message=str(exc), errors=[str(exc)],
                             data={"error_type": type(exc).__name__, **data})

    def run(self) -> CommandResult:
        raise NotImplementedError


def resolve_out(out: str | Path | None, default_name: str) -> tuple[Path | None, str]:
    """``--out`` may name a directory or, when it ends in .json, the report file itself."""
    if out is None:
        return None, default_name
    p = Path(out)
    if p.suffix == ".json":
        return p.parent, p.name
    return p, default_name
