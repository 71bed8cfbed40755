"""Command-line front end.

Subcommands ingest JSON scenario files, run the bound evaluators or the
Monte Carlo simulator, and write JSON/CSV/SVG artifacts.  Every run emits a
manifest (resolved options, root seed, output digests); re-dispatching a
manifest reproduces the outputs byte-identically.

Exit codes: 0 success, 2 input/schema error, 3 resource-cap rejection,
4 internal invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time

import numpy as np

from . import __version__
from . import bounds, gaussian_twrc, sim
from .infotheory import (
    ConditionalPmf,
    DistortionMeasure,
    InvalidDistributionError,
    JointPmf,
    Pmf,
)

SEED_ENV_VAR = "HYBRIDLAB_SEED"


class ScenarioError(ValueError):
    """Raised for malformed scenario/spec files or option combinations."""


# ---------------------------------------------------------------------------
# Scenario ingestion
# ---------------------------------------------------------------------------

_KINDS = ("p2p", "mac", "twrc_discrete", "twrc_gaussian", "diamond")


def load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ScenarioError(f"cannot read {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise ScenarioError(f"{path}: top level must be an object")
    return doc


def load_scenario(path: str, expect_kind: str | tuple[str, ...]) -> dict:
    doc = load_json(path)
    kind = doc.get("kind")
    if kind not in _KINDS:
        raise ScenarioError(f"{path}: unknown kind {kind!r}")
    kinds = (expect_kind,) if isinstance(expect_kind, str) else expect_kind
    if kind not in kinds:
        raise ScenarioError(f"{path}: kind {kind!r}, expected one of {kinds}")
    return doc


def _field(doc: dict, name: str):
    if name not in doc:
        raise ScenarioError(f"missing field {name!r}")
    return doc[name]


def _pmf(doc, name) -> Pmf:
    try:
        return Pmf(_field(doc, name))
    except InvalidDistributionError as exc:
        raise ScenarioError(f"field {name!r}: {exc}") from exc


def _kernel(doc, name) -> ConditionalPmf:
    try:
        return ConditionalPmf(_field(doc, name))
    except InvalidDistributionError as exc:
        raise ScenarioError(f"field {name!r}: {exc}") from exc


def build_p2p_scenario(doc: dict) -> sim.P2pScenario:
    return sim.P2pScenario(
        source=_pmf(doc, "source"),
        channel=_kernel(doc, "channel"),
        distortion=DistortionMeasure(_field(doc, "distortion")),
    )


def build_mac_scenario(doc: dict) -> sim.MacScenario:
    try:
        sources = JointPmf(_field(doc, "sources"))
    except InvalidDistributionError as exc:
        raise ScenarioError(f"field 'sources': {exc}") from exc
    return sim.MacScenario(
        sources=sources,
        mac=_kernel(doc, "mac"),
        d1=DistortionMeasure(_field(doc, "d1")),
        d2=DistortionMeasure(_field(doc, "d2")),
    )


def build_p2p_spec(doc: dict) -> bounds.HybridCodeSpec:
    try:
        return bounds.HybridCodeSpec(
            aux_size=int(_field(doc, "aux_size")),
            aux_kernel=_kernel(doc, "aux_kernel"),
            enc_map=np.asarray(_field(doc, "enc_map"), dtype=int),
            dec_map=np.asarray(_field(doc, "dec_map"), dtype=int),
            rate=float(_field(doc, "rate")),
        )
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc


def build_mac_spec(doc: dict) -> bounds.MacHybridSpec:
    try:
        return bounds.MacHybridSpec(
            q_pmf=_pmf(doc, "q_pmf"),
            aux1=np.asarray(_field(doc, "aux1"), dtype=float),
            aux2=np.asarray(_field(doc, "aux2"), dtype=float),
            enc1=np.asarray(_field(doc, "enc1"), dtype=int),
            enc2=np.asarray(_field(doc, "enc2"), dtype=int),
            dec1=np.asarray(_field(doc, "dec1"), dtype=int),
            dec2=np.asarray(_field(doc, "dec2"), dtype=int),
            R1=float(doc.get("R1", 0.0)),
            R2=float(doc.get("R2", 0.0)),
        )
    except ValueError as exc:
        raise ScenarioError(str(exc)) from exc


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------

def _report_to_dict(r: bounds.BoundReport) -> dict:
    return {
        "constraints": [
            {"name": c.name, "lhs": c.lhs, "rhs": c.rhs} for c in r.constraints
        ],
        "satisfied": r.satisfied,
        "binding_constraint": r.binding_constraint,
        "distortions": list(r.distortions),
        "value": r.value,
        "info": {k: _jsonable(v) for k, v in r.info.items()},
    }


def _jsonable(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.ndarray):
        return v.tolist()
    if isinstance(v, tuple):
        return list(v)
    return v


def write_json(path: str, obj) -> None:
    with open(path, "w") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        h.update(fh.read())
    return h.hexdigest()


def write_manifest(subcommand: str, options: dict, outputs: list[str],
                   seed: int | None, started: float) -> str:
    path = options["out"] + ".manifest.json"
    write_json(path, {
        "subcommand": subcommand,
        "options": options,
        "tool_version": __version__,
        "root_seed": seed,
        "wall_clock_s": round(time.time() - started, 3),
        "outputs": {p: _sha256(p) for p in outputs},
    })
    return path


# ---------------------------------------------------------------------------
# Subcommand implementations (resolved-option dicts in, files out)
# ---------------------------------------------------------------------------

def cmd_bounds_twrc(opts: dict) -> int:
    started = time.time()
    doc = load_scenario(opts["scenario"], "twrc_gaussian")
    power = float(doc.get("P", 10.0))
    ple = float(doc.get("path_loss_exp", 3.0))
    outputs = []
    result: dict = {"schemes": {}}
    schemes = ("cutset", "af", "nnc", "hc_special", "hc_general")
    if opts.get("sweep"):
        r_grid = doc.get("r_grid")
        rows = gaussian_twrc.fig8_sweep(power, r_grid=r_grid, path_loss_exp=ple)
        csv_path = opts["out"] + ".csv"
        with open(csv_path, "w") as fh:
            fh.write(gaussian_twrc.sweep_to_csv(rows))
        outputs.append(csv_path)
        result["sweep_rows"] = len(rows)
    r = opts.get("r")
    if r is not None:
        if not 0.0 < r < 1.0:
            raise ScenarioError(f"distance r={r} must lie strictly in (0, 1)")
        ch = gaussian_twrc.params_from_distance(r, power, ple)
        for scheme in schemes:
            best = gaussian_twrc.optimize_scheme(ch, scheme)
            result["schemes"][scheme] = {
                "R1": best.point.R1, "R2": best.point.R2,
                "sum_rate": best.point.sum_rate,
                "alpha": best.params.alpha if best.params else None,
                "beta": best.params.beta if best.params else None,
                "sigma2": best.params.sigma2 if best.params else None,
                "label": best.point.scheme,
            }
    elif not opts.get("sweep"):
        if all(k in doc for k in ("S13", "S23", "S31", "S32")):
            ch = gaussian_twrc.GaussianTwrcParams(
                S13=doc["S13"], S23=doc["S23"], S31=doc["S31"], S32=doc["S32"])
            for scheme in schemes:
                best = gaussian_twrc.optimize_scheme(ch, scheme)
                result["schemes"][scheme] = {
                    "R1": best.point.R1, "R2": best.point.R2,
                    "sum_rate": best.point.sum_rate,
                    "label": best.point.scheme,
                }
        else:
            raise ScenarioError("need --sweep, --r, or explicit SNRs S13..S32")
    json_path = opts["out"] + ".json"
    write_json(json_path, result)
    outputs.append(json_path)
    write_manifest("bounds-twrc", opts, outputs, None, started)
    return 0


def cmd_bounds_diamond(opts: dict) -> int:
    started = time.time()
    doc = load_scenario(opts["scenario"], "diamond")
    for name in ("y2_map", "y3_map", "y4_map"):
        if name not in doc:
            raise ScenarioError(
                f"diamond grid bounds need deterministic stage maps; missing {name!r}")
    res = bounds.det_diamond_bounds(
        doc["y2_map"], doc["y3_map"], doc["y4_map"],
        int(_field(doc, "x2_size")), int(_field(doc, "x3_size")),
        px1_res=int(opts.get("grid_res", 6)),
        relay_res=int(opts.get("grid_res", 6)),
    )
    json_path = opts["out"] + ".json"
    write_json(json_path, {
        "hybrid": res.hybrid,
        "adt": res.adt,
        "cutset": res.cutset,
        "hybrid_binding": res.hybrid_binding,
        "argmax": res.argmax,
    })
    write_manifest("bounds-diamond", opts, [json_path], None, started)
    return 0


def cmd_region_mac(opts: dict) -> int:
    started = time.time()
    doc = load_scenario(opts["scenario"], "mac")
    scenario = build_mac_scenario(doc)
    spec_doc = load_json(opts["spec"])
    substitution = opts.get("substitution")
    result: dict = {}
    if substitution == "lossless":
        px1, px2 = _pmf(spec_doc, "px1"), _pmf(spec_doc, "px2")
        x1 = px1.alphabet_size
        x2 = px2.alphabet_size
        mspec = bounds.lossless_mac_spec(
            scenario.sources, px1, px2, x1, x2, scenario.mac.output_size)
        reduced = bounds.lossless_reduced_values(scenario.sources, scenario.mac, px1, px2)
        result["reduced_constraints"] = [list(pair) for pair in reduced]
    elif substitution == "distributed":
        px1, px2 = _pmf(spec_doc, "px1"), _pmf(spec_doc, "px2")
        k1, k2 = _kernel(spec_doc, "k1"), _kernel(spec_doc, "k2")
        mspec = bounds.distributed_mac_spec(k1, k2, px1, px2)
        reduced = bounds.distributed_reduced_values(scenario.sources, k1, k2, px1, px2)
        result["reduced_constraints"] = [list(pair) for pair in reduced]
    else:
        mspec = build_mac_spec(spec_doc)
    report = bounds.mac_region_check(
        scenario.sources, scenario.mac, scenario.d1, scenario.d2, mspec,
        margin=opts.get("margin", bounds.DEFAULT_MARGIN))
    result["report"] = _report_to_dict(report)
    json_path = opts["out"] + ".json"
    write_json(json_path, result)
    write_manifest("region-mac", opts, [json_path], None, started)
    return 0


def cmd_check_thm1(opts: dict) -> int:
    started = time.time()
    doc = load_scenario(opts["scenario"], "p2p")
    scenario = build_p2p_scenario(doc)
    result: dict = {}
    if opts.get("optimize"):
        report, spec = bounds.p2p_optimize(
            scenario.source, scenario.channel, scenario.distortion,
            target_D=float(opts["target_d"]),
            aux_cap=int(opts.get("aux_cap", 4)),
            grid_res=int(opts.get("grid_res", 12)),
            margin=opts.get("margin", bounds.DEFAULT_MARGIN))
        result["report"] = _report_to_dict(report)
        if spec is not None:
            result["spec"] = {
                "aux_size": spec.aux_size,
                "aux_kernel": spec.aux_kernel.rows.tolist(),
                "enc_map": spec.enc_map.tolist(),
                "dec_map": spec.dec_map.tolist(),
                "rate": spec.rate,
            }
    else:
        if not opts.get("spec"):
            raise ScenarioError("need --spec FILE or --optimize")
        spec = build_p2p_spec(load_json(opts["spec"]))
        report = bounds.check_p2p(
            scenario.source, scenario.channel, scenario.distortion, spec,
            margin=opts.get("margin", bounds.DEFAULT_MARGIN))
        result["report"] = _report_to_dict(report)
    json_path = opts["out"] + ".json"
    write_json(json_path, result)
    write_manifest("check-thm1", opts, [json_path], None, started)
    return 0


def cmd_check_thm3(opts: dict) -> int:
    started = time.time()
    doc = load_scenario(opts["scenario"], "twrc_discrete")
    uplink = _kernel(doc, "uplink")
    downlink = _kernel(doc, "downlink")
    y1_size = int(_field(doc, "y1_size"))
    y2_size = int(_field(doc, "y2_size"))
    spec_doc = load_json(opts["spec"])
    spec = bounds.TwrcSpec(
        px1=_pmf(spec_doc, "px1"),
        px2=_pmf(spec_doc, "px2"),
        relay_kernel=_kernel(spec_doc, "relay_kernel"),
        relay_map=np.asarray(_field(spec_doc, "relay_map"), dtype=int),
    )
    report = bounds.twrc_region_check(
        uplink, downlink, y1_size, y2_size, spec,
        margin=opts.get("margin", bounds.DEFAULT_MARGIN),
        r2_penalty_on_x2=bool(opts.get("alt_penalty", False)))
    json_path = opts["out"] + ".json"
    write_json(json_path, {"report": _report_to_dict(report)})
    write_manifest("check-thm3", opts, [json_path], None, started)
    return 0


def cmd_simulate(opts: dict) -> int:
    started = time.time()
    seed = opts["seed"]
    result: dict = {}
    if opts.get("lemma1"):
        doc = load_json(opts["scenario"])
        joint_us = JointPmf(_field(doc, "joint_us"))
        check = sim.lemma1_check(
            n=int(opts["n"]), rate=float(_field(doc, "rate")),
            joint_us=joint_us,
            eps_prime=float(doc.get("eps_prime", opts["eps_prime"])),
            outer_trials=int(opts["trials"]), seed=seed,
            min_count=int(opts.get("min_count", 50)))
        check["cells"] = {repr(k): v for k, v in check["cells"].items()}
        result["independence_check"] = check
    else:
        doc = load_scenario(opts["scenario"], ("p2p", "mac"))
        spec_doc = load_json(opts["spec"])
        n_values = opts.get("n_sweep") or [int(opts["n"])]
        rows = []
        for n in n_values:
            config = sim.TrialConfig(
                n=int(n), trials=int(opts["trials"]),
                epsilon=float(opts["eps"]),
                epsilon_prime=float(opts["eps_prime"]), seed=seed)
            if doc["kind"] == "p2p":
                report = sim.run_p2p(build_p2p_scenario(doc),
                                     build_p2p_spec(spec_doc), config)
            else:
                report = sim.run_mac(build_mac_scenario(doc),
                                     build_mac_spec(spec_doc), config)
            rows.append(report)
        result["aggregates"] = rows
    json_path = opts["out"] + ".json"
    write_json(json_path, result)
    write_manifest("simulate", opts, [json_path], seed, started)
    return 0


# ---------------------------------------------------------------------------
# SVG plotting
# ---------------------------------------------------------------------------

_PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b")


def render_svg(header: list[str], rows: list[list[float]]) -> str:
    """Deterministic line plot: x = first column, one series per other column."""
    width, height = 720, 440
    x0, x1p, y0, y1p = 60.0, 540.0, 400.0, 20.0
    xs = [r[0] for r in rows]
    ys = [v for r in rows for v in r[1:]]
    xmin, xmax = min(xs), max(xs)
    ymin, ymax = min(ys), max(ys)
    if xmax - xmin < 1e-300:
        xmin, xmax = xmin - 1.0, xmax + 1.0
    if ymax - ymin < 1e-300:
        ymin, ymax = ymin - 1.0, ymax + 1.0

    def sx(x):
        return x0 + (x - xmin) / (xmax - xmin) * (x1p - x0)

    def sy(y):
        return y0 + (y - ymin) / (ymax - ymin) * (y1p - y0)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<line x1="{x0:.2f}" y1="{y0:.2f}" x2="{x1p:.2f}" y2="{y0:.2f}" stroke="black"/>',
        f'<line x1="{x0:.2f}" y1="{y0:.2f}" x2="{x0:.2f}" y2="{y1p:.2f}" stroke="black"/>',
        f'<text x="{x0:.2f}" y="{y0 + 24:.2f}" font-size="12">{xmin:.4g}</text>',
        f'<text x="{x1p - 20:.2f}" y="{y0 + 24:.2f}" font-size="12">{xmax:.4g}</text>',
        f'<text x="{x0 - 50:.2f}" y="{y0:.2f}" font-size="12">{ymin:.4g}</text>',
        f'<text x="{x0 - 50:.2f}" y="{y1p + 8:.2f}" font-size="12">{ymax:.4g}</text>',
        f'<text x="{(x0 + x1p) / 2 - 10:.2f}" y="{y0 + 36:.2f}" font-size="12">{header[0]}</text>',
    ]
    for si, name in enumerate(header[1:]):
        color = _PALETTE[si % len(_PALETTE)]
        pts = [(sx(r[0]), sy(r[1 + si])) for r in rows]
        if len(pts) > 1:
            coords = " ".join(f"{px:.2f},{py:.2f}" for px, py in pts)
            parts.append(
                f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        else:
            px, py = pts[0]
            parts.append(f'<circle cx="{px:.2f}" cy="{py:.2f}" r="3" fill="{color}"/>')
        ly = 30 + 18 * si
        parts.append(
            f'<line x1="560" y1="{ly}" x2="590" y2="{ly}" stroke="{color}" stroke-width="1.5"/>')
        parts.append(f'<text x="596" y="{ly + 4}" font-size="12">{name}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def cmd_plot(opts: dict) -> int:
    started = time.time()
    try:
        with open(opts["csv"]) as fh:
            reader = list(csv.reader(fh))
    except OSError as exc:
        raise ScenarioError(f"cannot read {opts['csv']}: {exc}") from exc
    if len(reader) < 2:
        raise ScenarioError("CSV needs a header and at least one data row")
    header = reader[0]
    if len(header) < 2:
        raise ScenarioError("CSV needs an x column and at least one series")
    try:
        rows = [[float(v) for v in row] for row in reader[1:] if row]
    except ValueError as exc:
        raise ScenarioError(f"non-numeric CSV cell: {exc}") from exc
    if any(len(r) != len(header) for r in rows):
        raise ScenarioError("ragged CSV rows")
    svg = render_svg(header, rows)
    with open(opts["out"] + ".svg", "w") as fh:
        fh.write(svg)
    write_manifest("plot", opts, [opts["out"] + ".svg"], None, started)
    return 0


# ---------------------------------------------------------------------------
# Argument parsing and dispatch
# ---------------------------------------------------------------------------

_DISPATCH = {
    "bounds-twrc": cmd_bounds_twrc,
    "bounds-diamond": cmd_bounds_diamond,
    "region-mac": cmd_region_mac,
    "check-thm1": cmd_check_thm1,
    "check-thm3": cmd_check_thm3,
    "simulate": cmd_simulate,
    "plot": cmd_plot,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hybridlab",
        description="Hybrid analog/digital joint source-channel coding workbench")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p, default_out):
        p.add_argument("--out", default=default_out,
                       help="output path prefix (files get .json/.csv/.svg suffixes)")
        p.add_argument("--jobs", type=int, default=1,
                       help="worker bound; results are independent of this value")

    p = sub.add_parser("bounds-twrc", help="Gaussian two-way-relay bounds")
    p.add_argument("scenario")
    p.add_argument("--sweep", action="store_true", help="distance sweep CSV")
    p.add_argument("--r", type=float, default=None, help="single relay distance in (0,1)")
    common(p, "twrc_bounds")

    p = sub.add_parser("bounds-diamond", help="deterministic diamond-network bounds")
    p.add_argument("scenario")
    p.add_argument("--grid-res", type=int, default=6)
    common(p, "diamond_bounds")

    p = sub.add_parser("region-mac", help="two-sender region check")
    p.add_argument("scenario")
    p.add_argument("--spec", required=True)
    p.add_argument("--substitution", choices=("lossless", "distributed"), default=None)
    p.add_argument("--margin", type=float, default=bounds.DEFAULT_MARGIN)
    common(p, "mac_region")

    p = sub.add_parser("check-thm1", help="single-sender condition check / optimizer")
    p.add_argument("scenario")
    p.add_argument("--spec", default=None)
    p.add_argument("--optimize", action="store_true")
    p.add_argument("--target-d", type=float, default=None)
    p.add_argument("--aux-cap", type=int, default=4)
    p.add_argument("--grid-res", type=int, default=12)
    p.add_argument("--margin", type=float, default=bounds.DEFAULT_MARGIN)
    common(p, "p2p_check")

    p = sub.add_parser("check-thm3", help="discrete two-way-relay region corner")
    p.add_argument("scenario")
    p.add_argument("--spec", required=True)
    p.add_argument("--alt-penalty", action="store_true",
                   help="exploration: condition the second R2 penalty on X2")
    p.add_argument("--margin", type=float, default=bounds.DEFAULT_MARGIN)
    common(p, "twrc_check")

    p = sub.add_parser("simulate", help="Monte Carlo hybrid-coding trials")
    p.add_argument("scenario")
    p.add_argument("--spec", default=None)
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--eps", type=float, default=0.3)
    p.add_argument("--eps-prime", type=float, default=0.2)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-sweep", default=None,
                   help="comma-separated block lengths, one aggregate row each")
    p.add_argument("--lemma1", action="store_true",
                   help="codebook-independence check instead of coding trials")
    p.add_argument("--min-count", type=int, default=50)
    common(p, "simulation")

    p = sub.add_parser("plot", help="CSV to SVG line plot")
    p.add_argument("csv")
    common(p, "plot")
    return parser


def _resolve_options(args: argparse.Namespace) -> dict:
    opts = {k: v for k, v in vars(args).items() if k != "subcommand"}
    if args.subcommand == "simulate":
        env = os.environ.get(SEED_ENV_VAR)
        if env is not None:
            opts["seed"] = int(env)
        if opts.get("n_sweep"):
            opts["n_sweep"] = [int(v) for v in str(opts["n_sweep"]).split(",")]
        if not opts.get("lemma1") and not opts.get("spec"):
            raise ScenarioError("simulate needs --spec unless --lemma1 is given")
        if opts.get("optimize") is None:
            opts.pop("optimize", None)
    if args.subcommand == "check-thm1" and args.optimize and args.target_d is None:
        raise ScenarioError("--optimize requires --target-d")
    return opts


def dispatch(subcommand: str, options: dict) -> int:
    return _DISPATCH[subcommand](dict(options))


def replay_manifest(path: str) -> dict:
    """Re-run the recorded subcommand and return fresh output digests."""
    manifest = load_json(path)
    dispatch(manifest["subcommand"], manifest["options"])
    return {p: _sha256(p) for p in manifest["outputs"]}


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        opts = _resolve_options(args)
        return dispatch(args.subcommand, opts)
    except (ScenarioError, InvalidDistributionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except sim.MemoryCapError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
