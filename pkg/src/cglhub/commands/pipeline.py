# -*- coding: utf-8 -*-
from cglhub.core.exceptions import StageError
from .base import BaseCommand, CommandResult


class PipelineCommand(BaseCommand):
    """Wraps CGLEngine.run() for the CLI."""

    def run(self) -> CommandResult:
        from cglhub.core.engine import CGLEngine

        try:
            engine = CGLEngine(self.config, self.out_dir, self.progress_callback)
            summary = engine.run()
            return CommandResult(
                success=True,
                message=f"{len(summary['stages'])} stage(s) complete; manifest at {summary['manifest']}",
                data=summary,
                output_files=[*engine.outputs],
            )
        except StageError as e:
            return CommandResult(success=False, message=str(e), errors=[str(e)],
                                 data={"stage": e.stage, "error_type": e.error_type,
                                       "message": e.message})
        except Exception as e:
            return self._failure(e)
