# -*- coding: utf-8 -*-
from pathlib import Path

from cglhub.lattice import certify_range, load_phi_hat
from cglhub.utils import REPORT_FILES, write_json
from .base import BaseCommand, CommandResult


class CertifyShellCommand(BaseCommand):
    """Wraps lattice.certify_range() over the configured shell_range and writes shells.json."""

    def __init__(self, config, out_dir=None, phi_path: str | Path | None = None,
                 report_name: str | None = None, progress_callback=None):
        super().__init__(config, out_dir, progress_callback)
        self.phi_path = phi_path
        self.report_name = report_name or REPORT_FILES["shells"]

    def run(self) -> CommandResult:
        cfg = self.config
        try:
            out = self._prepare()
            n_min, n_max = cfg.shell_bounds
            phi = load_phi_hat(self.phi_path) if self.phi_path else None
            self.progress(f"Searching rho-separated shells for N in [{n_min}, {n_max}]...", 0)
            certs = certify_range(cfg.L, cfg.rho, n_min, n_max, phi_hat=phi, workers=cfg.threads)
            passing = [c.N for c in certs]
            payload = {
                "L": cfg.L,
                "rho": cfg.rho,
                "n_min": n_min,
                "n_max": n_max,
                "passing_N": passing,
                "certificates": [c.to_dict() for c in certs],
                "selected_N": cfg.N if cfg.N in passing else None,
                "phi_source": str(self.phi_path) if self.phi_path else None,
            }
            path = write_json(out / self.report_name, payload, kind="shells")
            self.progress(f"{len(passing)} separated shell(s) found", 100)
            return CommandResult(
                success=True,
                message=f"{len(passing)} separated shell(s) in [{n_min}, {n_max}]",
                data=payload,
                output_files=[path],
            )
        except Exception as e:
            return self._failure(e)
