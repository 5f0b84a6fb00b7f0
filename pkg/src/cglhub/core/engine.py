# -*- coding: utf-8 -*-
from pathlib import Path

from cglhub.commands.base import BaseCommand, CommandResult
from cglhub.commands.dynamics import SampleCommand, SimulateCommand
from cglhub.commands.lattice import CertifyShellCommand
from cglhub.commands.mane import InertialFormCommand, ManeCheckCommand
from cglhub.commands.variational import VerifyEstimateCommand
from cglhub.config import RunConfig
from cglhub.utils import write_error, write_run_manifest
from .exceptions import StageError

STAGES = ("certify-shell", "simulate", "sample", "verify-estimate", "mane-check", "inertial-form")


class CGLEngine:
    """Pipeline engine that chains every stage of a run into one output directory.

    Stages execute in order: certify-shell → simulate → sample →
    verify-estimate → mane-check → inertial-form. Objects produced by one
    stage (trajectory, sample) are handed to the next without reloading.
    A failed stage writes ``error.json`` and raises StageError; a finished
    run writes ``manifest.json`` listing the sha256 of every output.

    With ``T == 0`` only the initial snapshot and the manifest are written.
    The projector stages need omega != 0 and are skipped otherwise.

    Example::

        from cglhub.config import RunConfig
        from cglhub.core.engine import CGLEngine

        engine = CGLEngine(RunConfig(grid=8, T=2.0, count=20, pair_count=2), out_dir="run")
        summary = engine.run()
    """

    def __init__(self, config: RunConfig, out_dir: str | Path | None = None, progress_callback=None):
        self.config = config.check()
        self.out_dir = Path(out_dir if out_dir is not None else config.out_dir).expanduser().resolve()
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.progress_callback = progress_callback
        self.outputs: list[Path] = []
        self.completed: list[str] = []

    def _log(self, msg: str) -> None:
        print(f"[CGLEngine] {msg}")

    def _stage(self, name: str, command: BaseCommand) -> CommandResult:
        self._log(f"Stage {STAGES.index(name) + 1}: {name}")
        result = command.run()
        self.outputs.extend(result.output_files)
        if not result.success:
            error_type = (result.data or {}).get("error_type", "RuntimeError")
            payload = write_error(self.out_dir, name, error_type, result.message)
            raise StageError(name, payload["error_type"], payload["message"])
        self.completed.append(name)
        self._log(f"  {result.message}")
        return result

    def _args(self) -> dict:
        return {"out_dir": self.out_dir, "progress_callback": self.progress_callback}

    def run(self, skip_projector: bool = False) -> dict:
        """Run the full pipeline sequentially.

        Args:
            skip_projector: Skip mane-check and inertial-form even when omega != 0.

        Returns:
            ``{"stages": [...], "outputs": [...], "manifest": path}``.

        Raises:
            StageError: the first stage that failed, after ``error.json`` is written.
        """
        cfg = self.config
        if cfg.T == 0:
            self._stage("simulate", SimulateCommand(cfg, **self._args()))
            return self._finish()

        self._stage("certify-shell", CertifyShellCommand(cfg, **self._args()))
        traj = self._stage("simulate", SimulateCommand(cfg, **self._args())).data["trajectory"]
        sample = self._stage("sample", SampleCommand(cfg, **self._args())).data["sample"]
        self._stage("verify-estimate", VerifyEstimateCommand(
            cfg, sample=sample, trajectory=None if sample.pair_trajectories else traj, **self._args()))

        if skip_projector:
            self._log("Projector stages skipped.")
        elif cfg.omega == 0:
            self._log("omega = 0: projector stages skipped.")
        else:
            self._stage("mane-check", ManeCheckCommand(cfg, sample=sample, **self._args()))
            self._stage("inertial-form", InertialFormCommand(cfg, sample=sample, **self._args()))
        return self._finish()

    def _finish(self) -> dict:
        manifest = write_run_manifest(self.out_dir, self.config, self.outputs, self.completed)
        self._log(f"Pipeline complete. Outputs in {self.out_dir}")
        return {"stages": list(self.completed), "outputs": [str(p) for p in self.outputs],
                "manifest": str(manifest)}
