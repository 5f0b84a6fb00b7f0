# -*- coding: utf-8 -*-
from pathlib import Path

import numpy as np

from cglhub.core.exceptions import BlowUpError
from cglhub.dynamics import CGLParams, dissipativity_monitor, sample_attractor, simulate
from cglhub.spectral.grid import random_field
from cglhub.spectral.io import write_field
from cglhub.utils import REPORT_FILES, write_json
from .base import BaseCommand, CommandResult

TRAJECTORY_FILE = "trajectory.cglf"
SNAPSHOT_FILE = "snapshot.cglf"
SAMPLE_FILE = "sample.cglf"
MONITOR_FILE = "monitor.csv"
BLOWUP_FILE = "blowup_state.cglf"


def _sidecar(path: Path) -> Path:
    return Path(str(path) + ".json")


class SimulateCommand(BaseCommand):
    """
    Integrate one random initial condition over [0, T].

    T == 0 writes the initial snapshot only. Otherwise the trajectory, the
    dissipativity report and its monitor CSV are written; a blow-up dumps the
    last finite state before the command fails.
    """

    def run(self) -> CommandResult:
        cfg = self.config
        try:
            out = self._prepare()
            params = CGLParams.from_config(cfg)
            rng = np.random.default_rng(cfg.seed)
            psi0 = random_field(params.grid, rng, cfg.amplitude)

            if cfg.T == 0:
                path = write_field(out / SNAPSHOT_FILE, psi0)
                return CommandResult(success=True, message="T = 0: initial snapshot written",
                                     data={"state": psi0}, output_files=[path])

            self.progress(f"Integrating M={cfg.grid} to T={cfg.T} with {cfg.integrator}...", 0)
            try:
                traj = simulate(params, psi0, cfg.T, seed=cfg.seed)
            except BlowUpError as e:
                files = [write_field(out / BLOWUP_FILE, e.state)] if e.state is not None else []
                result = self._failure(e, time=e.time)
                result.output_files = files
                return result

            traj_path = traj.save(out / TRAJECTORY_FILE)
            report = dissipativity_monitor(traj)
            csv_path = report.write_csv(out / MONITOR_FILE)
            json_path = write_json(out / REPORT_FILES["dissipativity"], report, kind="dissipativity")
            self.progress(f"{len(traj)} snapshots, H2 max {float(report.h2.max()):.4g}", 100)
            return CommandResult(
                success=True,
                message=f"Simulated to T={cfg.T}" + (" (envelope violated)" if report.violated else ""),
                data={"trajectory": traj, "dissipativity": report},
                output_files=[traj_path, _sidecar(traj_path), csv_path, json_path],
            )
        except Exception as e:
            return self._failure(e)


class SampleCommand(BaseCommand):
    """Sample the attractor (points plus trajectory pairs) and write sample.cglf with its pair files."""

    def run(self) -> CommandResult:
        cfg = self.config
        try:
            out = self._prepare()
            params = CGLParams.from_config(cfg)
            self.progress(f"Sampling {cfg.count} point(s) from {cfg.seeds} seed(s), "
                          f"{cfg.pair_count} pair(s)...", 0)
            sample = sample_attractor(
                params, burn_in=cfg.burn_in, count=cfg.count, spacing=cfg.spacing, seeds=cfg.seeds,
                pair_count=cfg.pair_count, pair_window=cfg.pair_window, pair_eps=cfg.pair_eps,
                pair_save_every=cfg.window_dt, amplitude=cfg.amplitude, seed=cfg.seed,
                workers=cfg.threads,
            )
            path = sample.save(out / SAMPLE_FILE)
            files = [path, _sidecar(path)]
            for j in range(len(sample.pair_trajectories)):
                for side in ("a", "b"):
                    pj = path.with_name(f"{path.stem}_pair_{j:03d}_{side}.cglf")
                    files += [pj, _sidecar(pj)]
            self.progress(f"{len(sample)} point(s) sampled", 100)
            return CommandResult(
                success=True,
                message=f"Sampled {len(sample)} point(s) and {len(sample.pair_trajectories)} pair(s)",
                data={"sample": sample},
                output_files=files,
            )
        except BlowUpError as e:
            return self._failure(e, time=e.time)
        except Exception as e:
            return self._failure(e)
