"""``carrier-lab <command> --config <file> [--seed N] [--out DIR] [--threads N]``.

Exit status: 0 when every check passes, 2 when a check fails and 1 on an
operational error (bad config, unreadable input, solver failure).
"""
from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from . import experiments, io, packing, render
from ._kernels import set_threads
from .errors import CarrierLabError, ConfigParse

log = logging.getLogger("carrier_lab")

OK, OPERATIONAL, FAILED = 0, 1, 2


def _out_dir(args, cfg, default_name):
    if args.out:
        return Path(args.out)
    if cfg.output.get("dir"):
        return Path(cfg.output["dir"])
    stem = Path(cfg.source).stem if cfg.source else default_name
    return Path("out") / stem


def _cmd_generate(args, cfg):
    out = _out_dir(args, cfg, "generate")
    out.mkdir(parents=True, exist_ok=True)
    gen = cfg.graph.get("generator")
    if gen in ("hyperbolic", "wheel"):
        t = experiments.triangulation_from_spec(cfg.graph)
        io.save_graph(t, out / "graph.json")
    else:
        io.save_graph(experiments.graph_from_spec(cfg.graph), out / "graph.json")
    log.info("wrote %s", out / "graph.json")
    return OK


def _cmd_pack(args, cfg):
    pack_cfg = experiments.ExperimentConfig("pack", cfg.graph, cfg.params, cfg.seed, cfg.output, cfg.source)
    audit = experiments.run(pack_cfg, _out_dir(args, cfg, "pack"))
    print(audit.summary(), end="")
    return OK if audit.passed else FAILED


def _cmd_validate(args, cfg):
    val_cfg = experiments.ExperimentConfig("validate", cfg.graph, cfg.params, cfg.seed, cfg.output, cfg.source)
    audit = experiments.run(val_cfg, _out_dir(args, cfg, "validate"))
    print(audit.summary(), end="")
    return OK if audit.passed else FAILED


def _cmd_measure(args, cfg):
    audit = experiments.run(cfg, _out_dir(args, cfg, cfg.kind))
    print(audit.summary(), end="")
    return OK if audit.passed else FAILED


def _cmd_render(args, cfg):
    out = _out_dir(args, cfg, "render")
    out.mkdir(parents=True, exist_ok=True)
    opts = cfg.params.get("render", {})
    spec = render.RenderSpec(circles=opts.get("circles", True), edges=opts.get("edges", True),
                             faces=opts.get("faces", False), size=int(opts.get("size", 800)))
    gen = cfg.graph.get("generator")
    if gen in ("hyperbolic", "wheel"):
        t = experiments.triangulation_from_spec(cfg.graph)
        p = packing.pack_maximal(t)
        svg = render.render(packing.to_embedded_graph(p, t), p, spec)
    else:
        g = experiments.graph_from_spec(cfg.graph)
        if opts.get("heatmap") == "isolation":
            spec.heatmap = g.isolation_radii
        svg = render.render(g, None, spec)
    (out / "drawing.svg").write_text(svg, encoding="utf-8")
    log.info("wrote %s", out / "drawing.svg")
    return OK


def _configs(path: Path) -> list[Path]:
    if path.is_dir():
        found = sorted(path.glob("*.toml"))
        if not found:
            raise ConfigParse(f"no *.toml configs in {path}")
        return found
    return [path]


def _cmd_all(args, _cfg):
    worst = OK
    for path in _configs(Path(args.config)):
        cfg = experiments.load_config(path)
        if args.seed is not None:
            cfg.seed = args.seed
        sub = argparse.Namespace(**vars(args))
        if args.out:
            sub.out = str(Path(args.out) / path.stem)
        code = _cmd_measure(sub, cfg)
        worst = max(worst, code)
    return worst


COMMANDS = {"generate": _cmd_generate, "pack": _cmd_pack, "validate": _cmd_validate,
            "measure": _cmd_measure, "render": _cmd_render, "all": _cmd_all}


def parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="carrier-lab", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=sorted(COMMANDS))
    p.add_argument("--config", required=True, help="TOML config (a directory for 'all')")
    p.add_argument("--seed", type=int, default=None, help="override the config seed")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--threads", type=int, default=None,
                   help="worker threads for compiled kernels (default: $CARRIER_LAB_THREADS)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    threads = args.threads if args.threads is not None else os.environ.get("CARRIER_LAB_THREADS")
    try:
        if threads is not None:
            set_threads(int(threads))
        cfg = None
        if args.command != "all":
            cfg = experiments.load_config(args.config)
            if args.seed is not None:
                cfg.seed = args.seed
        return COMMANDS[args.command](args, cfg)
    except (CarrierLabError, OSError, ValueError) as exc:
        print(f"carrier-lab: error: {exc}", file=sys.stderr)
        return OPERATIONAL


if __name__ == "__main__":
    sys.exit(main())
