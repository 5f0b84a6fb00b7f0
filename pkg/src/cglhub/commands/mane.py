# -*- coding: utf-8 -*-
from cglhub.dynamics import AttractorSample
from cglhub.mane import build_inertial_form, distortion_stats, track_error
from cglhub.utils import REPORT_FILES, write_json
from .base import BaseCommand, CommandResult


def _as_sample(obj) -> AttractorSample:
    return obj if isinstance(obj, AttractorSample) else AttractorSample.load(obj, with_pairs=False)


def _monotone(ratios: list[float]) -> bool:
    return all(b >= a for a, b in zip(ratios, ratios[1:]))


class ManeCheckCommand(BaseCommand):
    """Distortion of P_N on the attractor sample for every requested N; writes distortion.json."""

    def __init__(self, config, out_dir=None, *, sample, N_values: list[int] | None = None,
                 report_name: str | None = None, progress_callback=None):
        super().__init__(config, out_dir, progress_callback)
        self.sample = sample
        self.N_values = sorted(set(N_values or config.mane_N_values))
        self.report_name = report_name or REPORT_FILES["distortion"]

    def run(self) -> CommandResult:
        cfg = self.config
        try:
            out = self._prepare()
            sample = _as_sample(self.sample)
            sample.params.require_dispersion()
            stats = []
            for i, N in enumerate(self.N_values):
                self.progress(f"Distortion of P_{N} over {len(sample)} point(s)...",
                              int(100 * i / len(self.N_values)))
                stats.append(distortion_stats(sample, N, threshold=cfg.injectivity_threshold,
                                              max_pairs=cfg.max_pairs, seed=cfg.seed, workers=cfg.threads))
            payload = {"stats": stats, "monotone_in_N": _monotone([s.min_ratio for s in stats])}
            path = write_json(out / self.report_name, payload, kind="distortion")
            flags = ", ".join(f"N={s.N}: {'injective' if s.injective_flag else 'NOT injective'}" for s in stats)
            self.progress("Distortion report written", 100)
            return CommandResult(success=True, message=flags, data=payload, output_files=[path])
        except Exception as e:
            return self._failure(e)


class InertialFormCommand(BaseCommand):
    """Build the sampled inertial form at N and track it against the full equation; writes inertial_form.json."""

    def __init__(self, config, out_dir=None, *, sample, N: int | None = None, track_T: float | None = None,
                 report_name: str | None = None, progress_callback=None):
        super().__init__(config, out_dir, progress_callback)
        self.sample = sample
        self.N = config.N if N is None else int(N)
        self.track_T = config.track_T if track_T is None else float(track_T)
        self.report_name = report_name or REPORT_FILES["inertial_form"]

    def run(self) -> CommandResult:
        cfg = self.config
        try:
            out = self._prepare()
            sample = _as_sample(self.sample)
            params = sample.params.require_dispersion()
            self.progress(f"Indexing {len(sample)} point(s) by their P_{self.N} coordinates...", 0)
            form = build_inertial_form(sample, self.N, neighbors=cfg.neighbors,
                                       threshold=cfg.injectivity_threshold, max_pairs=cfg.max_pairs,
                                       seed=cfg.seed)
            payload = {
                "N": self.N,
                "dimension": form.dimension,
                "sample_size": len(sample),
                "injective": form.injective,
                "neighbors": form.neighbors,
                "one_step_error": None,
                "track": None,
            }
            if form.injective:
                self.progress(f"Tracking the reduced model to T={self.track_T:g}...", 30)
                track = track_error(form, params, self.track_T)
                payload["track"] = track
                payload["one_step_error"] = float(track.errors[1]) if len(track.errors) > 1 else 0.0
                message = f"dimension {form.dimension}, max tracking error {track.max_error:.3e} over T={self.track_T:g}"
            else:
                message = f"dimension {form.dimension}: sampled P_{self.N} not injective, tracking skipped"
            path = write_json(out / self.report_name, payload, kind="inertial_form")
            self.progress("Inertial form report written", 100)
            return CommandResult(success=True, message=message, data={**payload, "form": form},
                                 output_files=[path])
        except Exception as e:
            return self._failure(e)
