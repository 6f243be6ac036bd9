"""Command-line front end: single-point rates, sweeps and optimization.

Subcommands:
    rate      evaluate one operating point, JSON on stdout
    sweep     sweep one variable over a grid, CSV to --out
    optimize  maximize the secret fraction, JSON report

Exit codes: 0 success, 1 I/O failure, 2 invalid physics or configuration,
3 unreachable optimization constraint. Sweep rows are evaluated
independently (optionally in parallel with --jobs) but always written in
sweep order, so identical configs produce byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .cloner import LinkParams
from .config import (
    LinkBuild,
    SweepSpec,
    fiber_from_config,
    link_from_config,
    load_config,
    optimize_from_config,
    parse_trust,
    protocol_from_config,
    sweep_from_config,
)
from .errors import ConfigError, ConstraintError, DomainError, UsageError
from .keyrate import ProtocolParams, RateResult, evaluate
from .optimize import optimize_vmod, optimize_vmod_trec_snr_locked

CSV_COLUMNS = [
    "variable_name",
    "value",
    "trust",
    "detection",
    "v_mod",
    "t_ch",
    "xi_ch",
    "t_rec",
    "xi_rec",
    "xi_pr",
    "snr",
    "i_ab",
    "chi_eb",
    "secret_fraction",
    "key_rate",
]


def _fmt(x: float | None) -> str:
    # 12 significant digits: below every test tolerance, stable across platforms
    return "" if x is None else f"{x:.12g}"


def _jsonable(obj):
    if isinstance(obj, float):
        return float(_fmt(obj))
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def _emit_json(payload: dict, out_path: str | None) -> None:
    text = json.dumps(_jsonable(payload), indent=2)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _result_dict(res: RateResult) -> dict:
    return {
        "snr": res.snr,
        "i_ab": res.i_ab,
        "chi_eb": res.chi_eb,
        "secret_fraction": res.secret_fraction,
        "key_rate": res.key_rate,
        "nu": list(res.eigs),
    }


def _params_dict(p: LinkParams, distance_km: float | None) -> dict:
    out = {
        "v_mod": p.v_mod,
        "xi_pr": p.xi_pr,
        "t_ch": p.t_ch,
        "xi_ch": p.xi_ch,
        "t_rec": p.t_rec,
        "xi_rec": p.xi_rec,
        "detection": p.detection.value,
        "trust": p.trust.value,
    }
    if distance_km is not None:
        out["distance_km"] = distance_km
    return out


def cmd_rate(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    build = link_from_config(cfg, trust_override=args.trust, detection_override=args.detection)
    proto = protocol_from_config(cfg)
    params = build.params()
    result = evaluate(params, proto)
    _emit_json(
        {"params": _params_dict(params, build.distance_km), **_result_dict(result)},
        args.out,
    )
    return 0


@dataclass(frozen=True)
class _SweepTask:
    variable: str
    value: float
    params: LinkParams
    proto: ProtocolParams
    optimize: bool


def _run_task(task: _SweepTask) -> list[str]:
    if task.optimize:
        opt = optimize_vmod(task.params, task.proto)
        params = replace(task.params, v_mod=opt.v_mod)
        result = opt.result
    else:
        params = task.params
        result = evaluate(params, task.proto)
    return [
        task.variable,
        _fmt(task.value),
        params.trust.value,
        params.detection.value,
        _fmt(params.v_mod),
        _fmt(params.t_ch),
        _fmt(params.xi_ch),
        _fmt(params.t_rec),
        _fmt(params.xi_rec),
        _fmt(params.xi_pr),
        _fmt(result.snr),
        _fmt(result.i_ab),
        _fmt(result.chi_eb),
        _fmt(result.secret_fraction),
        _fmt(result.key_rate),
    ]


def _sweep_tasks(build: LinkBuild, proto: ProtocolParams, spec: SweepSpec, cfg) -> list[_SweepTask]:
    if spec.scale == "log":
        grid = np.geomspace(spec.start, spec.stop, spec.points)
    else:
        grid = np.linspace(spec.start, spec.stop, spec.points)
    fiber = fiber_from_config(cfg)

    needs_vmod = not (spec.optimize_vmod or spec.variable == "v_mod")
    base_vmod = build.v_mod
    if needs_vmod and base_vmod is None:
        raise ConfigError("missing required key: link.v_mod")

    tasks = []
    for value in grid.tolist():
        for trust in spec.trust_cases:
            params = build.params(v_mod=base_vmod if base_vmod is not None else 1.0)
            params = replace(params, trust=trust)
            if spec.variable == "distance_km":
                params = replace(params, t_ch=fiber.t_ch(value))
            elif spec.variable == "v_mod":
                params = replace(params, v_mod=value)
            else:
                params = replace(params, **{spec.variable: value})
            tasks.append(
                _SweepTask(
                    variable=spec.variable,
                    value=value,
                    params=params,
                    proto=proto,
                    optimize=spec.optimize_vmod,
                )
            )
    return tasks


def cmd_sweep(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    build = link_from_config(cfg, trust_override=args.trust, detection_override=args.detection)
    proto = protocol_from_config(cfg)
    spec = sweep_from_config(cfg)
    if args.trust:
        spec = replace(spec, trust_cases=(parse_trust(args.trust),))
    tasks = _sweep_tasks(build, proto, spec, cfg)

    jobs = max(1, args.jobs)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * jobs))))
    else:
        rows = [_run_task(t) for t in tasks]

    with open(args.out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        writer.writerows(rows)
    return 0


def cmd_optimize(args: argparse.Namespace) -> int:
    cfg = load_config(args.config)
    build = link_from_config(cfg, trust_override=args.trust, detection_override=args.detection)
    proto = protocol_from_config(cfg)
    opts = optimize_from_config(cfg)

    if args.mode == "vmod":
        params = build.params(v_mod=build.v_mod if build.v_mod is not None else 1.0)
        opt = optimize_vmod(params, proto, bounds=(opts.vmod_lo, opts.vmod_hi))
        payload = {
            "mode": "vmod",
            "v_mod": opt.v_mod,
            "t_rec": params.t_rec,
            "boundary": opt.boundary,
            "snr_residual": None,
            "rate": _result_dict(opt.result),
        }
    else:
        if opts.snr_target is None:
            raise ConfigError("missing required key: optimize.snr_target")
        params = build.params(v_mod=build.v_mod if build.v_mod is not None else 1.0)
        opt = optimize_vmod_trec_snr_locked(
            params,
            proto,
            opts.snr_target,
            t_rec_floor=opts.t_rec_floor,
            vmod_max=opts.vmod_hi,
        )
        payload = {
            "mode": "vmod_trec_snr",
            "v_mod": opt.v_mod,
            "t_rec": opt.t_rec,
            "boundary": opt.boundary,
            "snr_residual": opt.snr_residual,
            "rate": _result_dict(opt.result),
        }
    _emit_json(payload, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cvrate",
        description="Asymptotic secure-key rates for Gaussian-modulated coherent-state CV-QKD.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", required=True, help="path to an INI config file")
        p.add_argument("--trust", help="override the trust case from the config")
        p.add_argument("--detection", help="override the detection kind (hom|het)")

    p_rate = sub.add_parser("rate", help="evaluate a single operating point (JSON)")
    common(p_rate)
    p_rate.add_argument("--out", help="write JSON here instead of stdout")
    p_rate.set_defaults(func=cmd_rate)

    p_sweep = sub.add_parser("sweep", help="sweep one variable over a grid (CSV)")
    common(p_sweep)
    p_sweep.add_argument("--out", required=True, help="CSV output path")
    p_sweep.add_argument("--jobs", type=int, default=1, help="parallel worker processes")
    p_sweep.set_defaults(func=cmd_sweep)

    p_opt = sub.add_parser("optimize", help="maximize the secret fraction (JSON report)")
    common(p_opt)
    p_opt.add_argument(
        "--mode",
        choices=("vmod", "vmod_trec_snr"),
        default="vmod",
        help="search v_mod alone, or v_mod and t_rec under an SNR lock",
    )
    p_opt.add_argument("--out", help="write the JSON report here instead of stdout")
    p_opt.set_defaults(func=cmd_optimize)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, UsageError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2
    except ConstraintError as exc:
        print(f"constraint error: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 1


def run() -> None:  # console-script entry point
    sys.exit(main())


if __name__ == "__main__":
    run()
