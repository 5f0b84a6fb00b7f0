# -*- coding: utf-8 -*-
"""
Command-line front end for cglhub.

Every handler resolves a RunConfig (defaults < --config file < --KEY VALUE
flags < global flags), then delegates all work to the command layer
(cglhub.commands). The pipeline engine chains the same command classes.

Stage subcommands
-----------------
cglhub simulate        --omega 1 --beta 0.5 --delta 1 --grid 16 --dt 0.01 --T 10 --seed 0 --out run/
cglhub sample          --count 200 --seeds 4 --pair_count 20 --out run/
cglhub certify-shell   --L 2 --rho 1.5 --range 3:60 [--phi phi.txt] --out shells.json
cglhub verify-estimate --traj a.cglf --traj2 b.cglf --N 5 --L 2 --window 10 --out report.json
cglhub verify-estimate --sample run/sample.cglf --N 5 --out run/
cglhub mane-check      --sample run/sample.cglf --N 5 --out stats.json
cglhub inertial-form   --sample run/sample.cglf --N 5 --track 5

Pipeline
--------
cglhub pipeline --config run.toml --out run/

Any RunConfig field can be given as --KEY VALUE; see '<command> --list-options'.
The log level is read from the CGL_LOG environment variable.
"""

import argparse
import dataclasses
import json
import sys
import typing
from pathlib import Path

from cglhub._version import __version__

# Fields handled by global flags or never set from the command line
_GLOBAL_FIELDS = {"name", "seed", "threads", "out_dir"}


# ---------------------------------------------------------------------------
# Dynamic config introspection helpers
# ---------------------------------------------------------------------------


def _unwrap_optional(annotation):
    """Extract the non-None type from 'X | None' or 'Optional[X]'."""
    import types as _types
    origin = typing.get_origin(annotation)
    if origin is typing.Union or isinstance(annotation, getattr(_types, "UnionType", type(None))):
        args = [a for a in typing.get_args(annotation) if a is not type(None)]
        return args[0] if args else str
    return annotation


def _str_to_bool(v: str) -> bool:
    """Convert a string like 'true'/'false'/'1'/'0' to bool."""
    if v.lower() in ("true", "1", "yes"):
        return True
    if v.lower() in ("false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError(f"Expected true/false, got '{v}'")


def _field_argparse_kwargs(annotation, default) -> dict:
    """Return kwargs for ArgumentParser.add_argument() inferred from a type annotation."""
    base = _unwrap_optional(annotation)
    if base is bool:
        return {"type": _str_to_bool, "default": default, "metavar": "BOOL"}
    if base in (int, float, str, Path):
        return {"type": str if base is Path else base, "default": default, "metavar": base.__name__.upper()}
    return {"type": str, "default": default, "metavar": "VALUE"}


def _build_config_parser(config_cls, skip_fields: set | None = None) -> argparse.ArgumentParser:
    """Build an ArgumentParser populated with flags from a config dataclass."""
    skip_fields = _GLOBAL_FIELDS if skip_fields is None else skip_fields
    p = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    hints = typing.get_type_hints(config_cls)

    _UNSET = object.__new__(object)  # sentinel: field not provided by user

    for field in dataclasses.fields(config_cls):
        if field.name in skip_fields:
            continue
        kwargs = _field_argparse_kwargs(hints.get(field.name, str), None)
        kwargs["default"] = _UNSET
        kwargs["help"] = argparse.SUPPRESS
        p.add_argument("--" + field.name, dest=field.name, **kwargs)

    p._unset_sentinel = _UNSET  # type: ignore[attr-defined]
    return p


def _print_config_options(config, display_label: str | None = None, skip_fields: set | None = None):
    """Pretty-print all config fields for --list-options, with the values in effect."""
    skip_fields = {"name"} if skip_fields is None else skip_fields
    hints = typing.get_type_hints(type(config))
    label = display_label or type(config).__name__
    print(f"\nConfig fields for {label}:\n")
    print(f"  {'FLAG':<28}  {'TYPE':<8}  CURRENT VALUE")
    print(f"  {'-'*28}  {'-'*8}  {'-'*20}")
    for field in dataclasses.fields(config):
        if field.name in skip_fields:
            continue
        ann = hints.get(field.name, "?")
        tname = getattr(ann, "__name__", str(ann))
        print(f"  {'--' + field.name:<28}  {tname:<8}  {getattr(config, field.name)!r}")
    print()


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _common_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    g = p.add_argument_group("run")
    g.add_argument("--config", metavar="PATH", default=None,
                   help="Flat TOML run file; --KEY VALUE flags override its values")
    g.add_argument("--out", metavar="PATH", default=None,
                   help="Output directory (report commands also accept a .json file path)")
    g.add_argument("--seed", metavar="U64", type=int, default=None, help="Random seed (default: 0)")
    g.add_argument("--threads", metavar="INT", type=int, default=None,
                   help="Worker threads for FFTs and parallel loops (default: detected CPU count)")
    g.add_argument("--list-options", action="store_true",
                   help="Print every RunConfig field with the value in effect and exit")
    return p


def create_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cglhub",
        description="Pseudospectral complex Ginzburg-Landau toolkit: simulation, backward estimates "
                    "and finite-dimensional reduction checks",
        epilog="Use 'cglhub <command> --help' for details on each command.",
        allow_abbrev=False,
    )
    parser.add_argument("-v", "--version", action="version", version=f"cglhub {__version__}")
    common = _common_parser()
    sub = parser.add_subparsers(dest="command", required=False, metavar="COMMAND")

    def add(name: str, help_: str, description: str) -> argparse.ArgumentParser:
        return sub.add_parser(name, help=help_, description=description, parents=[common],
                              formatter_class=argparse.RawDescriptionHelpFormatter, allow_abbrev=False)

    # ------------------------------------------------------------------ #
    # simulate / sample
    # ------------------------------------------------------------------ #
    add("simulate", "Integrate one random initial condition over [0, T]",
        "Integrate the equation from a seeded random field.\n"
        "Writes trajectory.cglf, monitor.csv and dissipativity.json (T = 0: snapshot.cglf only).\n"
        "Equation and solver settings are passed as --KEY VALUE flags (see --list-options).")

    add("sample", "Sample the attractor and trajectory pairs",
        "Run burn-in from several seeds, collect post-transient snapshots and\n"
        "nearby trajectory pairs. Writes sample.cglf and its pair files.")

    # ------------------------------------------------------------------ #
    # certify-shell
    # ------------------------------------------------------------------ #
    p_cert = add("certify-shell", "Find rho-separated shells and certify the coupling bound",
                 "Search N in --range for shells N-L <= |k|^2 <= N+L whose points are\n"
                 "rho-separated and write a certificate per passing N to shells.json.")
    p_cert.add_argument("--range", metavar="A:B", dest="shell_range", default=None,
                        help="Search range for N (default: shell_range of the config)")
    p_cert.add_argument("--phi", metavar="PATH", default=None,
                        help="Fourier coefficients of phi as columns 'k1 k2 k3 re im'")

    # ------------------------------------------------------------------ #
    # verify-estimate
    # ------------------------------------------------------------------ #
    p_ver = add("verify-estimate", "Measure backward Lipschitz constants and solve the weighted BVP",
                "Measure C and the backward rate on trajectory pairs, then solve the weighted\n"
                "variational boundary value problem along the first trajectory.\n"
                "Give --traj and --traj2 for one pair, --traj alone for the BVP only,\n"
                "or --sample to use every pair segment of a sample. Writes estimate.json.")
    g_in = p_ver.add_argument_group("input")
    g_in.add_argument("--traj", metavar="PATH", default=None, help="First trajectory file")
    g_in.add_argument("--traj2", metavar="PATH", default=None, help="Second trajectory file")
    g_in.add_argument("--sample", metavar="PATH", default=None, help="Attractor sample with pair segments")

    # ------------------------------------------------------------------ #
    # mane-check / inertial-form
    # ------------------------------------------------------------------ #
    p_mane = add("mane-check", "Distortion of P_N on an attractor sample",
                 "Compute the distortion ratios of the low-mode projector on every sample pair,\n"
                 "for --N or for each entry of mane_N. Writes distortion.json.")
    p_mane.add_argument("--sample", metavar="PATH", required=True, help="Attractor sample file")

    p_if = add("inertial-form", "Build the sampled inertial form and track it",
               "Build the reduced model on the low modes from an attractor sample and compare\n"
               "it with the full equation over --track time units. Writes inertial_form.json.")
    p_if.add_argument("--sample", metavar="PATH", required=True, help="Attractor sample file")
    p_if.add_argument("--track", metavar="T", type=float, default=None, dest="track_T",
                      help="Tracking horizon (default: track_T of the config)")

    # ------------------------------------------------------------------ #
    # pipeline
    # ------------------------------------------------------------------ #
    add("pipeline", "Run every stage into one output directory",
        "certify-shell -> simulate -> sample -> verify-estimate -> mane-check -> inertial-form.\n"
        "Writes all reports plus manifest.json; a failed stage writes error.json and exits 1.")
    return parser


# ---------------------------------------------------------------------------
# Config resolution
# ---------------------------------------------------------------------------

def _fail(result, label: str):
    """Print error and exit if a CommandResult indicates failure."""
    if not result.success:
        print(f"[ERROR] {label}: {result.errors[0] if result.errors else result.message}",
              file=sys.stderr)
        sys.exit(1)


def _resolve_config(args, extra_args: list[str], report_name: str | None = None):
    """Merge defaults, --config, --KEY VALUE flags and global flags into one checked RunConfig.

    Returns (config, report_name); exits 1 with one diagnostic on any problem.
    """
    from cglhub.commands import resolve_out
    from cglhub.config import RunConfig, parse_config
    from cglhub.core.exceptions import ConfigError

    cfg_parser = _build_config_parser(RunConfig)
    known, unknown = cfg_parser.parse_known_args(extra_args)
    if unknown:
        print(f"[ERROR] config: unrecognized arguments {unknown}", file=sys.stderr)
        sys.exit(1)
    overrides = {k: v for k, v in vars(known).items() if v is not cfg_parser._unset_sentinel}
    for key in ("seed", "threads", "shell_range", "track_T"):
        if getattr(args, key, None) is not None:
            overrides[key] = getattr(args, key)
    out_dir, report_name = resolve_out(args.out, report_name)
    if out_dir is not None:
        overrides["out_dir"] = str(out_dir)

    try:
        if args.config:
            cfg = parse_config(args.config, **overrides)
        else:
            cfg = dataclasses.replace(RunConfig(), **overrides).check()
    except (ConfigError, FileNotFoundError) as e:
        print(f"[ERROR] config: {e}", file=sys.stderr)
        sys.exit(1)
    return cfg, report_name


def _report(result):
    print(result.message)
    for p in result.output_files:
        print(f"  {p}")


# ---------------------------------------------------------------------------
# Command handlers  (each one: build command → run → check result)
# ---------------------------------------------------------------------------

def cmd_simulate(args, cfg, report_name):
    from cglhub.commands import SimulateCommand
    result = SimulateCommand(cfg).run()
    if not result.success and result.output_files:
        print(f"[simulate] last finite state written to {result.output_files[0]}", file=sys.stderr)
    _fail(result, "simulate")
    _report(result)


def cmd_sample(args, cfg, report_name):
    from cglhub.commands import SampleCommand
    result = SampleCommand(cfg).run()
    _fail(result, "sample")
    _report(result)


def cmd_certify_shell(args, cfg, report_name):
    from cglhub.commands import CertifyShellCommand
    result = CertifyShellCommand(cfg, phi_path=args.phi, report_name=report_name).run()
    _fail(result, "certify-shell")
    _report(result)


def cmd_verify_estimate(args, cfg, report_name):
    from cglhub.commands import VerifyEstimateCommand
    if args.traj2 and not args.traj:
        print("[ERROR] verify-estimate: --traj2 needs --traj", file=sys.stderr)
        sys.exit(1)
    if not (args.traj or args.sample):
        print("[ERROR] verify-estimate: give --traj [--traj2] or --sample", file=sys.stderr)
        sys.exit(1)
    pairs = [(args.traj, args.traj2)] if args.traj and args.traj2 else None
    result = VerifyEstimateCommand(cfg, pairs=pairs, sample=args.sample, trajectory=args.traj,
                                   report_name=report_name).run()
    _fail(result, "verify-estimate")
    _report(result)


def cmd_mane_check(args, cfg, report_name):
    from cglhub.commands import ManeCheckCommand
    result = ManeCheckCommand(cfg, sample=args.sample, report_name=report_name).run()
    _fail(result, "mane-check")
    _report(result)


def cmd_inertial_form(args, cfg, report_name):
    from cglhub.commands import InertialFormCommand
    result = InertialFormCommand(cfg, sample=args.sample, report_name=report_name).run()
    _fail(result, "inertial-form")
    _report(result)


def cmd_pipeline(args, cfg, report_name):
    from cglhub.commands import PipelineCommand
    result = PipelineCommand(cfg).run()
    if not result.success and isinstance(result.data, dict) and "stage" in result.data:
        print(json.dumps(result.data, sort_keys=True), file=sys.stderr)
    _fail(result, "pipeline")
    _report(result)


_HANDLERS = {
    "simulate": cmd_simulate,
    "sample": cmd_sample,
    "certify-shell": cmd_certify_shell,
    "verify-estimate": cmd_verify_estimate,
    "mane-check": cmd_mane_check,
    "inertial-form": cmd_inertial_form,
    "pipeline": cmd_pipeline,
}

# default report file per command, so --out may name the JSON file itself
_REPORT_KINDS = {
    "certify-shell": "shells",
    "verify-estimate": "estimate",
    "mane-check": "distortion",
    "inertial-form": "inertial_form",
}


def main():
    parser = create_parser()
    args, extra_args = parser.parse_known_args()

    if not args.command:
        parser.print_help()
        sys.exit(0)
    handler = _HANDLERS.get(args.command)
    if handler is None:
        parser.print_help()
        sys.exit(1)

    from cglhub.core.logging import setup_logging
    from cglhub.utils import REPORT_FILES
    import scipy.fft

    setup_logging()
    kind = _REPORT_KINDS.get(args.command)
    cfg, report_name = _resolve_config(args, extra_args, REPORT_FILES[kind] if kind else None)
    if args.list_options:
        _print_config_options(cfg, display_label=f"cglhub {args.command}")
        sys.exit(0)
    with scipy.fft.set_workers(cfg.threads):
        handler(args, cfg, report_name)


if __name__ == "__main__":
    main()
