"""Experiment configs and the sweeps behind each experiment kind.

A config is a TOML file::

    kind = "exit-arc"
    seed = 1
    [graph]
    generator = "hyperbolic"   # hyperbolic | wheel | lattice | square | tri3 | delaunay | file
    deg = 7
    depth = 6
    [params]
    samples = 10000
    [output]
    dir = "out/exit-arc"

Every kind returns an :class:`Audit`: named checks with the measured value
and the threshold it was held to, plus free-form data and CSV rows.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from . import generators, goodness, io, metric, packing, potential, walk
from .errors import BallEscapesCarrier, CarrierLabError, ConfigParse, DomainViolation

try:
    import tomllib
except ImportError:  # Python < 3.11
    import tomli as tomllib


@dataclass
class ExperimentConfig:
    kind: str
    graph: dict = field(default_factory=dict)
    params: dict = field(default_factory=dict)
    seed: int = 0
    output: dict = field(default_factory=dict)
    source: str | None = None

    def param(self, key, default):
        return self.params.get(key, default)

    def grid(self, key, default):
        """A nonempty list parameter."""
        val = self.params.get(key, default)
        if not isinstance(val, (list, tuple)) or len(val) == 0:
            raise ConfigParse(f"parameter {key!r} must be a nonempty list")
        return list(val)


def parse_config(text: str, source: str | None = None) -> ExperimentConfig:
    try:
        d = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigParse(f"{source or 'config'}: {exc}") from exc
    kind = d.get("kind")
    if kind not in KINDS:
        raise ConfigParse(f"unknown experiment kind {kind!r}; expected one of {sorted(KINDS)}")
    for key in ("graph", "params", "output"):
        if not isinstance(d.get(key, {}), dict):
            raise ConfigParse(f"[{key}] must be a table")
    seed = d.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigParse("seed must be an integer")
    cfg = ExperimentConfig(kind, d.get("graph", {}), d.get("params", {}), seed, d.get("output", {}), source)
    KINDS[kind].validate(cfg)
    return cfg


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigParse(f"cannot read {path}: {exc}") from exc
    cfg = parse_config(text, str(path))
    gfile = cfg.graph.get("file")
    if gfile and not Path(gfile).is_absolute():
        cfg.graph = dict(cfg.graph, file=str(path.parent / gfile))
    return cfg


# -- graph sources -------------------------------------------------------------

@lru_cache(maxsize=16)
def packed_hyperbolic(deg: int, depth: int):
    t = generators.generate_hyperbolic(deg, depth)
    p = packing.pack_maximal(t)
    return t, p, packing.to_embedded_graph(p, t)


@lru_cache(maxsize=16)
def packed_wheel(k: int):
    t = generators.wheel(k)
    p = packing.pack_maximal(t)
    return t, p, packing.to_embedded_graph(p, t)


def _spec_key(spec: dict) -> tuple:
    return tuple(sorted((k, tuple(v) if isinstance(v, list) else v) for k, v in spec.items()))


@lru_cache(maxsize=32)
def _graph_cached(key):
    spec = dict(key)
    gen = spec.get("generator")
    if gen == "hyperbolic":
        return packed_hyperbolic(int(spec.get("deg", 7)), int(spec["depth"]))[2]
    if gen == "wheel":
        return packed_wheel(int(spec["k"]))[2]
    if gen == "lattice":
        return generators.triangular_lattice(int(spec["radius"]), float(spec.get("spacing", 1.0)))
    if gen == "square":
        return generators.square_grid(int(spec["k"]))
    if gen == "tri3":
        return generators.tri3()
    if gen == "delaunay":
        return generators.generate_delaunay(int(spec["n"]), int(spec.get("seed", 0)))
    if gen == "file":
        doc = io.load_graph(spec["file"])
        if doc.positions is None:
            t = doc.to_triangulation()
            p = packing.pack_maximal(t)
            return packing.to_embedded_graph(p, t, weights=[w for _, _, w in doc.edges])
        return doc.to_graph()
    raise ConfigParse(f"unknown graph generator {gen!r}")


def graph_from_spec(spec: dict):
    if not spec:
        raise ConfigParse("missing [graph] table")
    return _graph_cached(_spec_key(spec))


def triangulation_from_spec(spec: dict):
    gen = spec.get("generator")
    if gen == "hyperbolic":
        return generators.generate_hyperbolic(int(spec.get("deg", 7)), int(spec["depth"]))
    if gen == "wheel":
        return generators.wheel(int(spec["k"]))
    if gen == "file":
        return io.load_graph(spec["file"]).to_triangulation()
    raise ConfigParse(f"generator {gen!r} does not give a combinatorial triangulation")


# -- audits ------------------------------------------------------------------------

@dataclass
class Audit:
    kind: str
    checks: dict = field(default_factory=dict)
    data: dict = field(default_factory=dict)
    csv_header: list | None = None
    csv_rows: list = field(default_factory=list)
    artifacts: dict = field(default_factory=dict)  # file name -> text
    runtime: float = 0.0

    def check(self, name: str, passed: bool, value=None, threshold=None, note: str | None = None):
        self.checks[name] = {"passed": bool(passed), "value": io.plain(value), "threshold": threshold}
        if note:
            self.checks[name]["note"] = note
        return bool(passed)

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks.values())

    def to_dict(self) -> dict:
        return {"kind": self.kind, "passed": self.passed, "checks": self.checks, "data": self.data,
                "runtime_s": self.runtime}

    def summary(self) -> str:
        lines = [f"{self.kind}: {'PASS' if self.passed else 'FAIL'} ({self.runtime:.1f} s)"]
        for name, c in self.checks.items():
            mark = "PASS" if c["passed"] else "FAIL"
            extra = "" if c["value"] is None else f" value={c['value']!r}"
            extra += "" if c["threshold"] is None else f" threshold={c['threshold']!r}"
            lines.append(f"  [{mark}] {name}{extra}")
        return "\n".join(lines) + "\n"


class Kind:
    """An experiment kind: parameter validation plus the sweep itself."""

    required: tuple = ()

    def __init__(self, fn, required=(), needs_graph=True):
        self.fn = fn
        self.required = required
        self.needs_graph = needs_graph

    def validate(self, cfg: ExperimentConfig):
        if self.needs_graph and not cfg.graph:
            raise ConfigParse(f"kind {cfg.kind!r} needs a [graph] table")
        for key in self.required:
            cfg.grid(key, None)

    def __call__(self, cfg):
        return self.fn(cfg)


KINDS: dict[str, Kind] = {}


def kind(name, required=(), needs_graph=True):
    def deco(fn):
        KINDS[name] = Kind(fn, required, needs_graph)
        return fn
    return deco


def run(cfg: ExperimentConfig, out_dir=None, seed: int | None = None) -> Audit:
    """Run one experiment, write its artifacts, and return the audit."""
    if seed is not None:
        cfg.seed = int(seed)
    t0 = time.perf_counter()
    audit = KINDS[cfg.kind](cfg)
    audit.runtime = time.perf_counter() - t0
    out = out_dir or cfg.output.get("dir")
    if out:
        out = Path(out)
        out.mkdir(parents=True, exist_ok=True)
        io.save_report(audit.to_dict(), out / "report.json")
        (out / "summary.txt").write_text(audit.summary(), encoding="utf-8")
        if audit.csv_header:
            io.write_csv(out / "sweep.csv", audit.csv_header, audit.csv_rows)
        for name, text in audit.artifacts.items():
            (out / name).write_text(text, encoding="utf-8")
    return audit


def _rng(seed: int):
    return np.random.Generator(np.random.Philox(seed))


def _walk_cfg(cfg: ExperimentConfig, samples=None) -> walk.WalkConfig:
    return walk.WalkConfig(seed=cfg.seed, samples=int(samples or cfg.param("samples", 10_000)),
                           max_steps=int(cfg.param("max_steps", 10_000_000)),
                           weight_source=cfg.param("weight_source", "graph"))


def admissible_centers(g, r: float, count: int, factor: float = 1.0) -> list[int]:
    """Up to ``count`` vertices with ``r_u <= r`` and ``B(u, factor r)`` in the carrier, spread in angle."""
    iso = g.isolation_radii
    ok = [u for u in np.argsort(np.hypot(*g.pos.T), kind="stable")
          if iso[u] <= r and g.carrier_contains_disc(g.pos[u], factor * r)]
    if len(ok) <= count:
        return [int(u) for u in ok]
    ang = np.mod(np.arctan2(g.pos[ok, 1], g.pos[ok, 0]), 2 * np.pi)
    order = np.argsort(ang, kind="stable")
    pick = order[np.linspace(0, len(ok) - 1, count).round().astype(int)]
    return sorted(int(ok[k]) for k in pick)


# -- kinds: graphs and packings -------------------------------------------------------

@kind("validate")
def _validate(cfg):
    g = graph_from_spec(cfg.graph)
    a = Audit("validate")
    D, eta = cfg.param("D", None), cfg.param("eta", None)
    rep = goodness.validate_tightest(g) if D is None or eta is None else goodness.validate(g, float(D), float(eta))
    a.data = rep.to_dict()
    a.check("goodness", rep.passed, value=len(rep.violations), threshold=0)
    a.check("no_acute_angles", rep.min_adjacent_angle >= rep.noacute_bound,
            value=rep.min_adjacent_angle, threshold=rep.noacute_bound)
    return a


@kind("pack")
def _pack(cfg):
    t = triangulation_from_spec(cfg.graph)
    tol = float(cfg.param("tol", 1e-9))
    p = packing.pack_maximal(t, tol=tol)
    a = Audit("pack")
    a.data = {"n": t.n, "iterations": p.iterations, "angle_residual": p.angle_residual,
              "tangency_residual": p.tangency_residual, "layout_residual": p.layout_residual}
    a.check("angle_residual", p.angle_residual <= tol, p.angle_residual, tol)
    a.check("tangency_residual", p.tangency_residual <= float(cfg.param("tangency_tol", 1e-8)),
            p.tangency_residual, float(cfg.param("tangency_tol", 1e-8)))
    a.artifacts["packing.json"] = io.dumps_packing(p)
    a.artifacts["graph.json"] = io.dumps_graph(t.with_positions(p.center))
    return a


@kind("pack-audit", needs_graph=False)
def _pack_audit(cfg):
    """Closed-form K4 radii and residuals of the degree-7 balls."""
    a = Audit("pack-audit")
    t0 = time.perf_counter()
    p = packing.pack_maximal(generators.wheel(3))
    exact_b, exact_c = 2 * math.sqrt(3) - 3, 7 - 4 * math.sqrt(3)
    err = float(max(abs(p.radius[0] - exact_c), np.abs(p.radius[1:] - exact_b).max()))
    a.check("k4_closed_form", err <= 1e-8, err, 1e-8)
    rows = []
    for depth in cfg.grid("depths", [1, 2, 3, 4, 5]):
        s = time.perf_counter()
        t = generators.generate_hyperbolic(int(cfg.param("deg", 7)), int(depth))
        q = packing.pack_maximal(t, tol=float(cfg.param("tol", 1e-9)))
        rows.append((int(depth), t.n, q.angle_residual, q.tangency_residual, time.perf_counter() - s))
        a.check(f"depth{depth}_angle", q.angle_residual <= 1e-9, q.angle_residual, 1e-9)
        a.check(f"depth{depth}_tangency", q.tangency_residual <= 1e-8, q.tangency_residual, 1e-8)
    total = time.perf_counter() - t0
    a.check("runtime", total < 60, total, 60)
    a.csv_header = ["depth", "n", "angle_residual", "tangency_residual", "seconds"]
    a.csv_rows = rows
    a.data = {"k4_radii": p.radius.tolist(), "k4_exact": [exact_c, exact_b]}
    return a


@kind("ring-goodness", needs_graph=False)
def _ring_goodness(cfg):
    """Goodness of a packed ball and agreement of (D, eta) with a smaller ball."""
    from .graph import graph_distances

    deg = int(cfg.param("deg", 7))
    small, large = int(cfg.param("small", 3)), int(cfg.param("large", 4))
    a = Audit("ring-goodness")
    g_large = packed_hyperbolic(deg, large)[2]
    g_small = packed_hyperbolic(deg, small)[2]
    rep = goodness.validate_tightest(g_large)
    a.check("large_ball_good", rep.passed and rep.eta_allowed > 0 and math.isfinite(rep.D_required),
            value={"D": rep.D_required, "eta": rep.eta_allowed}, threshold="eta > 0, D finite")
    hops = int(cfg.param("shared_hops", small - 1))
    params = []
    for g in (g_small, g_large):
        region = np.flatnonzero(graph_distances(g, [0]) <= hops)
        params.append(goodness.tightest_parameters(g, region))
    (d1, e1), (d2, e2) = params
    rel = max(abs(d1 - d2) / d1, abs(e1 - e2) / e1)
    a.check("shared_region_agreement", rel <= 0.10, rel, 0.10)
    t, p, _ = packed_hyperbolic(deg, large)
    a.data = {"large": rep.to_dict(), "shared_hops": hops, "small_params": params[0], "large_params": params[1],
              "ring": vars(packing.ring_constant(p, t))}
    return a


def corpus(cfg) -> list[tuple[str, object]]:
    out = [("tri3", generators.tri3()), ("square5", generators.square_grid(5)),
           ("lattice4", generators.triangular_lattice(4))]
    for seed in cfg.grid("delaunay_seeds", [1, 2, 3]):
        out.append((f"delaunay{seed}", generators.generate_delaunay(int(cfg.param("delaunay_n", 200)), int(seed))))
    for depth in cfg.grid("hyperbolic_depths", [2, 3, 4, 5]):
        out.append((f"hex7-{depth}", packed_hyperbolic(7, int(depth))[2]))
    for k in cfg.grid("wheels", [3, 5, 7, 9]):
        out.append((f"wheel{k}", packed_wheel(int(k))[2]))
    return out


@kind("noacute-corpus", needs_graph=False)
def _noacute(cfg):
    a = Audit("noacute-corpus")
    a.csv_header = ["graph", "min_adjacent_angle", "bound", "D", "eta"]
    for name, g in corpus(cfg):
        D, eta = goodness.tightest_parameters(g)
        ang = goodness.min_adjacent_angle(g)
        bound = math.sin(eta / 2) / D
        a.csv_rows.append((name, ang, bound, D, eta))
        a.check(name, ang >= bound, ang, bound)
    return a


# -- kinds: metric --------------------------------------------------------------------

@kind("bilipschitz")
def _bilipschitz(cfg):
    g = graph_from_spec(cfg.graph)
    a = Audit("bilipschitz")
    counts = cfg.grid("samples", [10_000, 20_000])
    vals = [metric.bilipschitz_constant(g, int(s), cfg.seed) for s in counts]
    a.data = {"samples": counts, "C1": vals}
    a.check("finite", all(math.isfinite(v) for v in vals), vals)
    drift = abs(vals[-1] - vals[0]) / vals[0]
    a.check("stable", drift <= 0.10, drift, 0.10)
    return a


def _cable_centers(g, count: int, seed: int, max_radius: float | None = None):
    """Half vertices, half edge midpoints, drawn without replacement."""
    rng = _rng(seed)
    pos_r = np.hypot(*g.pos.T)
    verts = np.flatnonzero(pos_r <= max_radius) if max_radius is not None else np.arange(g.n)
    mids = 0.5 * (g.pos[g.edges[:, 0]] + g.pos[g.edges[:, 1]])
    edges = np.flatnonzero(np.hypot(*mids.T) <= max_radius) if max_radius is not None else np.arange(g.m)
    k = count // 2
    vs = rng.choice(verts, size=min(k, len(verts)), replace=False)
    es = rng.choice(edges, size=min(count - len(vs), len(edges)), replace=False)
    return [metric.at_vertex(g, int(v)) for v in sorted(vs)] + [metric.CablePoint(int(e), 0.5) for e in sorted(es)]


@kind("doubling", required=("radii",))
def _doubling(cfg):
    g = graph_from_spec(cfg.graph)
    a = Audit("doubling")
    radii = sorted(float(r) for r in cfg.grid("radii", None))
    centers = _cable_centers(g, int(cfg.param("centers", 40)), cfg.seed, cfg.param("center_max_radius", None))
    a.csv_header = ["center_edge", "center_t", "r", "quantity", "value"]
    by_r = {r: [] for r in radii}
    window = []
    for x in centers:
        rx = metric.extended_isolation(g, x)
        for r in radii:
            try:
                q = metric.doubling_ratio(g, x, r)
            except BallEscapesCarrier:
                continue
            by_r[r].append(q)
            m2 = metric.ball_d0(g, x, 2 * r).measure
            window.append(m2 / (r * max(r, rx)))
            a.csv_rows.append((x.edge, x.t, r, "doubling_ratio", q))
            a.csv_rows.append((x.edge, x.t, r, "measure_over_r_rx", window[-1]))
    n = sum(len(v) for v in by_r.values())
    a.check("pairs", n >= int(cfg.param("min_pairs", 200)), n, int(cfg.param("min_pairs", 200)))
    half = len(radii) // 2
    lo = max((q for r in radii[:half] for q in by_r[r]), default=math.nan)
    hi = max((q for r in radii[half:] for q in by_r[r]), default=math.nan)
    a.check("finite", math.isfinite(lo) and math.isfinite(hi), [lo, hi])
    spread = max(lo, hi) / min(lo, hi)
    a.check("halves_agree", spread < 2, spread, 2)
    a.data = {"max_ratio_small_r": lo, "max_ratio_large_r": hi,
              "measure_window": [min(window), max(window)] if window else None,
              "per_radius_max": {str(r): (max(v) if v else None) for r, v in by_r.items()}}
    return a


@kind("poincare", required=("radii",))
def _poincare(cfg):
    g = graph_from_spec(cfg.graph)
    a = Audit("poincare")
    L = float(cfg.param("edge_length", 1.0))
    from .graph import build

    seg = build([(0.0, 0.0), (L, 0.0)], [(0, 1, 1.0)])
    r1 = L / 2
    k1 = metric.poincare_constant(seg, metric.CablePoint(0, 0.5), r1, blowup=1.0, h=L / 64, check=False)
    err = abs(k1 * r1 ** 2 - L ** 2 / math.pi ** 2) / (L ** 2 / math.pi ** 2)
    a.check("single_edge", err <= 0.01, err, 0.01)
    blowup = float(cfg.param("blowup", 4.0))
    radii = [float(r) for r in cfg.grid("radii", None)]
    centers = _cable_centers(g, int(cfg.param("centers", 30)), cfg.seed, cfg.param("center_max_radius", None))
    kappas = []
    a.csv_header = ["center_edge", "center_t", "r", "quantity", "value"]
    for x in centers:
        for r in radii:
            try:
                k = metric.poincare_constant(g, x, r, blowup=blowup)
            except BallEscapesCarrier:
                continue
            kappas.append((r, k))
            a.csv_rows.append((x.edge, x.t, r, "kappa", k))
    a.check("balls", len(kappas) >= int(cfg.param("min_balls", 50)), len(kappas), int(cfg.param("min_balls", 50)))
    scales = sorted({r for r, _ in kappas})
    a.check("scales", len(scales) >= 3, len(scales), 3)
    per = {r: max(k for s, k in kappas if s == r) for r in scales}
    ks = [k for _, k in kappas]
    spread = max(ks) / min(ks) if ks else math.inf
    a.check("uniform", spread <= 2, spread, 2, note="largest over smallest kappa across all balls")
    a.data = {"per_scale_max": {str(r): v for r, v in per.items()}, "kappa_min": min(ks), "kappa_max": max(ks)}
    return a


@kind("cone-volume", required=("radii",))
def _cone_volume(cfg):
    g = graph_from_spec(cfg.graph)
    a = Audit("cone-volume")
    D, eta = goodness.tightest_parameters(g)
    width = math.pi - eta
    rot = int(cfg.param("rotations", 8))
    c = float(cfg.param("clearance", 0.125))
    vals, low = [], []
    a.csv_header = ["center", "r", "interval_lo", "quantity", "value"]
    for u in cfg.grid("centers", [0]):
        ru = g.isolation_radii[u]
        for r in cfg.grid("radii", None):
            if not g.carrier_contains_disc(g.pos[u], r):
                continue
            for k in range(rot):
                lo = 2 * math.pi * k / rot
                m = metric.cone(g, int(u), r, (lo, width)).measure
                m2 = metric.cone(g, int(u), r, (lo, width), r_min=c * r).measure
                vals.append(m / (r * max(r, ru)))
                low.append(m2 / r ** 2)
                a.csv_rows.append((u, r, lo, "measure_over_r_rmax", vals[-1]))
                a.csv_rows.append((u, r, lo, "clipped_over_r2", low[-1]))
    a.check("window_finite", len(vals) > 0 and min(vals) > 0, [min(vals), max(vals)] if vals else None)
    a.check("clipped_positive", len(low) > 0 and min(low) > 0, min(low) if low else None)
    return a


@kind("inner-curve")
def _inner_curve(cfg):
    g = graph_from_spec(cfg.graph)
    a = Audit("inner-curve")
    pairs = cfg.param("pairs", [[0.0, math.pi], [0.0, 0.3], [1.0, 1.2]])
    rows = []
    for x1, x2 in pairs:
        rep = metric.inner_uniform_curve(g, float(x1), float(x2))
        rows.append((x1, x2, rep.L, rep.C_len, rep.C_euc, rep.c_depth))
        a.check(f"curve_{x1:g}_{x2:g}", math.isfinite(rep.C_len) and rep.c_depth > 0,
                {"C_len": rep.C_len, "C_euc": rep.C_euc, "c_depth": rep.c_depth})
    a.csv_header = ["xi1", "xi2", "L", "C_len", "C_euc", "c_depth"]
    a.csv_rows = rows
    return a


# -- kinds: walks ------------------------------------------------------------------------

@kind("exit-arc", required=("radii",))
def _exit_arc(cfg):
    g = graph_from_spec(cfg.graph)
    a = Audit("exit-arc")
    wc = _walk_cfg(cfg)
    D, eta = goodness.tightest_parameters(g)
    width = math.pi - eta
    rot = int(cfg.param("rotations", 12))
    per_scale = int(cfg.param("centers_per_scale", 4))
    rows = []
    for r in cfg.grid("radii", None):
        centers = admissible_centers(g, float(r), per_scale)
        rows += walk.exit_arc_sweep(g, centers, [float(r)], width, rot, wc)
    a.csv_header = ["u", "r", "interval_lo", "interval_hi", "estimate", "ci", "n", "truncated"]
    a.csv_rows = rows
    a.check("triples", len(rows) >= int(cfg.param("min_triples", 100)), len(rows), int(cfg.param("min_triples", 100)))
    worst = min(rows, key=lambda x: x[4] - x[5])
    a.check("all_positive", all(x[4] - x[5] > 0 for x in rows), worst[4] - worst[5], 0.0,
            note="smallest estimate minus its CI half-width")
    mins = {}
    for x in rows:
        mins[x[1]] = min(mins.get(x[1], 1.0), x[4])
    a.data = {"width": width, "eta": eta, "min_by_radius": {str(k): v for k, v in mins.items()},
              "min_estimate": min(x[4] for x in rows)}
    ctrl = cfg.params.get("control")
    if ctrl:
        lat = generators.triangular_lattice(int(ctrl.get("radius", 12)))
        st = walk.run_to_exit(lat, 0, float(ctrl.get("r", 8)), _walk_cfg(cfg, ctrl.get("samples")))
        offset = float(ctrl.get("offset", 0.1))
        z = []
        for k in range(6):
            p, _ = walk.proportion(walk.in_arc(st.exit_angles, (offset + k * math.pi / 3, math.pi / 3)))
            z.append(abs(p - 1 / 6) / math.sqrt((1 / 6) * (5 / 6) / st.n))
        a.check("control_sectors", max(z) <= 3, max(z), 3, note="largest |p - 1/6| in standard errors")
    return a


@kind("exit-time")
def _exit_time(cfg):
    a = Audit("exit-time")
    wc = _walk_cfg(cfg)
    ratios = []
    trunc = total = 0
    a.csv_header = ["graph", "u", "r", "estimate", "ci", "ratio", "n", "truncated"]
    ctrl = cfg.params.get("control", {"radius": 40, "radii": [8, 16, 32]})
    lat = generators.triangular_lattice(int(ctrl.get("radius", 40)))
    for r in ctrl.get("radii", [8, 16, 32]):
        e = walk.exit_time_functional(lat, 0, float(r), wc)
        ratios.append(("lattice", e.value / r ** 2))
        trunc, total = trunc + e.truncated, total + e.n + e.truncated
        a.csv_rows.append(("lattice", 0, r, e.value, e.ci, e.value / r ** 2, e.n, e.truncated))
    if cfg.graph:
        g = graph_from_spec(cfg.graph)
        for r in cfg.grid("radii", [0.125, 0.25, 0.5]):
            for u in admissible_centers(g, float(r), int(cfg.param("centers_per_scale", 4)),
                                        float(cfg.param("carrier_factor", 1.0))):
                e = walk.exit_time_functional(g, u, float(r), wc)
                ratios.append(("packed", e.value / r ** 2))
                trunc, total = trunc + e.truncated, total + e.n + e.truncated
                a.csv_rows.append(("packed", u, r, e.value, e.ci, e.value / r ** 2, e.n, e.truncated))
    vals = [v for _, v in ratios]
    width = max(vals) / min(vals)
    a.check("window", width <= 4, width, 4, note="max/min of E sum r^2 / r^2 over all graphs and scales")
    for name in ("lattice", "packed"):
        sub = [v for k, v in ratios if k == name]
        if sub:
            a.data[f"{name}_window"] = [min(sub), max(sub)]
    frac = trunc / total
    a.check("truncation", frac < 1e-3, frac, 1e-3)
    return a


@kind("cone-hit", required=("radii",))
def _cone_hit(cfg):
    g = graph_from_spec(cfg.graph)
    a = Audit("cone-hit")
    wc = _walk_cfg(cfg)
    D, eta = goodness.tightest_parameters(g)
    width = math.pi - eta
    rot = int(cfg.param("rotations", 6))
    c = float(cfg.param("clearance", 0.125))
    rows = []
    for r in cfg.grid("radii", None):
        for u in admissible_centers(g, float(r), int(cfg.param("centers_per_scale", 3)), 2.0):
            for k in range(rot):
                lo = 2 * math.pi * k / rot
                e = walk.cone_hitting_probability(g, u, float(r), (lo, width), wc, clearance=c)
                rows.append((u, r, lo, lo + width, e.value, e.ci, e.n, e.truncated))
    a.csv_header = ["u", "r", "interval_lo", "interval_hi", "estimate", "ci", "n", "truncated"]
    a.csv_rows = rows
    a.check("nonempty", len(rows) > 0, len(rows))
    if rows:
        a.check("all_positive", min(x[4] for x in rows) > 0, min(x[4] for x in rows), 0.0)
    return a


@kind("atom-probe", required=("radii",))
def _atom_probe(cfg):
    g = graph_from_spec(cfg.graph)
    a = Audit("atom-probe")
    wc = _walk_cfg(cfg)
    radii = [float(r) for r in cfg.grid("radii", None)]
    xi = float(cfg.param("xi", 0.0))
    starts = cfg.grid("starts", [0])
    Cs = []
    a.csv_header = ["u", "r", "estimate", "ci", "n", "truncated"]
    for u in starts:
        res = walk.atom_probe(g, int(u), xi, radii, wc, stop_radius=float(cfg.param("stop_radius", 0.005)))
        Cs.append(res.C)
        for r, p, c in zip(res.radii, res.probabilities, res.ci):
            a.csv_rows.append((u, r, p, c, res.n, res.truncated))
        a.check(f"nonincreasing_u{u}", res.nonincreasing, res.probabilities)
        a.check(f"single_C_u{u}", math.isfinite(res.C) and all(p <= res.C / abs(math.log(r)) + 1e-15
                                                               for p, r in zip(res.probabilities, radii)),
                res.C)
    a.data = {"C": Cs}
    if len(Cs) > 1:
        a.data["C_spread"] = max(Cs) / min(Cs)
    return a


@kind("harmonic-measure")
def _harmonic_measure(cfg):
    """Dirichlet solve against Monte Carlo for an arc indicator, over an epsilon ladder."""
    g = graph_from_spec(cfg.graph)
    a = Audit("harmonic-measure")
    wc = _walk_cfg(cfg, cfg.param("samples", 100_000))
    lo, width = cfg.param("arc", [0.0, math.pi / 2])
    f = potential.arc_indicator(float(lo), float(width))
    probes = [potential.root_vertex(g)]
    for x, y in cfg.param("probe_points", []):
        v = int(np.argmin(np.hypot(g.pos[:, 0] - x, g.pos[:, 1] - y)))
        if v not in probes:
            probes.append(v)
    eps = [float(e) for e in cfg.grid("epsilons", [0.01, 0.005])]
    stop = float(cfg.param("stop_radius", min(eps) / 2))
    checks = []
    a.csv_header = ["epsilon", "probe", "solve", "monte_carlo", "ci"]
    for e in eps:
        hc = potential.harmonic_extension_check(potential.exhaust(g, e), f, wc, probes, stop_radius=stop)
        checks.append(hc)
        for row in zip(hc.probes, hc.solve, hc.monte_carlo, hc.ci):
            a.csv_rows.append((e,) + row)
        a.check(f"within_2ci_eps{e:g}", hc.within, hc.discrepancy, 2 * max(hc.ci))
    for prev, nxt in zip(checks, checks[1:]):
        noise = 2 * max(nxt.ci)
        a.check(f"no_growth_eps{nxt.epsilon:g}", nxt.discrepancy <= max(prev.discrepancy, noise),
                nxt.discrepancy, max(prev.discrepancy, noise),
                note="discrepancy at the finer epsilon against the coarser one (or the MC noise level)")
    a.data = {"discrepancy": [c.discrepancy for c in checks]}
    return a


# -- kinds: potential theory -------------------------------------------------------------

def random_network(seed: int, n_max: int = 200):
    """A Delaunay graph with random conductances and its interior vertices."""
    rng = _rng(seed)
    n = int(rng.integers(20, n_max + 1))
    g0 = generators.generate_delaunay(n, seed)
    w = rng.uniform(0.5, 2.0, size=g0.m)
    from .graph import build

    g = build(g0.pos, [(int(u), int(v), float(x)) for (u, v), x in zip(g0.edges, w)])
    live = np.setdiff1d(np.arange(g.n), g.boundary_vertices)
    return g, live


def _dense_green(g, live):
    """``(I - P)^-1`` on the live block by dense inversion."""
    A = np.zeros((g.n, g.n))
    A[g.edges[:, 0], g.edges[:, 1]] = g.weights
    A[g.edges[:, 1], g.edges[:, 0]] = g.weights
    P = A / A.sum(axis=1, keepdims=True)
    Pl = P[np.ix_(live, live)]
    return np.linalg.inv(np.eye(len(live)) - Pl), A


def _dense_resistance(A, a: int, z: int) -> float:
    L = np.diag(A.sum(axis=1)) - A
    Lp = np.linalg.pinv(L)
    e = np.zeros(len(A))
    e[a], e[z] = 1.0, -1.0
    return float(e @ Lp @ e)


@kind("potential-oracle", needs_graph=False)
def _potential_oracle(cfg):
    a = Audit("potential-oracle")
    count = int(cfg.param("graphs", 20))
    wc = _walk_cfg(cfg, cfg.param("samples", 20_000))
    worst = {"green": 0.0, "martin": 0.0, "resistance": 0.0, "reversibility": 0.0, "mc_sigma": 0.0}
    a.csv_header = ["graph", "n", "green_rel", "martin_rel", "resistance_rel", "reversibility_rel", "mc_sigma"]
    for k in range(count):
        seed = cfg.seed * 1000 + k
        g, live = random_network(seed)
        rng = _rng(seed + 1)
        sysm = potential.AbsorbingSystem(g, live)
        Gd, A = _dense_green(g, live)
        idx = {int(v): i for i, v in enumerate(live)}
        ys = rng.choice(live, size=min(5, len(live)), replace=False)
        g_rel = m_rel = rev = 0.0
        x0 = int(live[0])
        cols = {}
        for y in ys:
            col = sysm.expand(sysm.green_live(int(y)))[live]
            cols[int(y)] = col
            ref = Gd[:, idx[int(y)]]
            g_rel = max(g_rel, float(np.abs(col - ref).max() / np.abs(ref).max()))
            mk = col / col[idx[x0]]
            mref = ref / ref[idx[x0]]
            m_rel = max(m_rel, float(np.abs(mk - mref).max() / np.abs(mref).max()))
        w = g.vertex_weight
        for y1 in ys:
            for y2 in ys:
                lhs = w[y1] * cols[int(y2)][idx[int(y1)]]
                rhs = w[y2] * cols[int(y1)][idx[int(y2)]]
                rev = max(rev, float(abs(lhs - rhs) / max(abs(lhs), abs(rhs))))
        r_rel = 0.0
        for _ in range(3):
            s, t = rng.choice(g.n, size=2, replace=False)
            val = potential.effective_resistance(g, [int(s)], [int(t)]).value
            ref = _dense_resistance(A, int(s), int(t))
            r_rel = max(r_rel, abs(val - ref) / ref)
        # Monte Carlo: probability of exiting through the upper half of the outer cycle
        start = int(live[np.argmin(np.hypot(*g.pos[live].T))])
        stop = np.ones(g.n, dtype=bool)
        stop[live] = False
        dist = sysm.exit_distribution(start)
        target = np.zeros(g.n, dtype=bool)
        target[g.boundary_vertices] = g.pos[g.boundary_vertices, 1] > 0
        p = float(dist[target].sum())
        final, _, _, _, trunc = walk.run_batch(g, start, stop, walk.WalkConfig(seed=seed, samples=wc.samples))
        freq = float(target[final[~trunc]].mean())
        sigma = abs(freq - p) / math.sqrt(max(p * (1 - p), 1e-300) / int((~trunc).sum()))
        for key, val in (("green", g_rel), ("martin", m_rel), ("resistance", r_rel), ("reversibility", rev),
                         ("mc_sigma", sigma)):
            worst[key] = max(worst[key], val)
        a.csv_rows.append((k, g.n, g_rel, m_rel, r_rel, rev, sigma))
    a.check("green", worst["green"] <= 1e-8, worst["green"], 1e-8)
    a.check("martin", worst["martin"] <= 1e-8, worst["martin"], 1e-8)
    a.check("resistance", worst["resistance"] <= 1e-8, worst["resistance"], 1e-8)
    a.check("reversibility", worst["reversibility"] <= 1e-10, worst["reversibility"], 1e-10)
    a.check("monte_carlo", worst["mc_sigma"] <= 4, worst["mc_sigma"], 4)
    return a


@kind("resistance", required=("epsilons",))
def _resistance(cfg):
    g = graph_from_spec(cfg.graph)
    a = Audit("resistance")
    xis = [float(x) for x in cfg.grid("xis", list(np.arange(8) * math.pi / 4))]
    a.csv_header = ["xi", "r", "epsilon", "quantity", "value"]
    for e in cfg.grid("epsilons", None):
        ex = potential.exhaust(g, float(e))
        bad = 0
        for xi in xis:
            for r in cfg.grid("annulus_radii", [0.06, 0.12, 0.24]):
                if float(e) > r / 10:
                    continue
                R, low = potential.resistance_annulus_bound(ex, xi, float(r))
                bad += R < low
                a.csv_rows.append((xi, r, e, "R_measured", R))
                a.csv_rows.append((xi, r, e, "R_variational_lower", low))
        a.check(f"variational_eps{e:g}", bad == 0, bad, 0)
        r0 = float(cfg.param("r", 0.06))
        slopes, series_ok, mono = [], True, True
        for xi in xis:
            lg = potential.resistance_log_growth(ex, xi, r0, cfg.grid("ratios", [4, 8, 16]))
            slopes.append(lg.slope)
            series_ok &= all(lo <= v * (1 + 1e-12) for lo, v in zip(lg.series_lower, lg.values))
            mono &= lg.nondecreasing
            for k, v in zip(lg.ratios, lg.values):
                a.csv_rows.append((xi, r0 * k, e, "R_log_growth", v))
        a.check(f"positive_slope_eps{e:g}", min(slopes) > 0, min(slopes), 0.0)
        a.check(f"series_bound_eps{e:g}", series_ok)
        a.check(f"monotone_eps{e:g}", mono)
        a.data[f"slopes_eps{e:g}"] = slopes
    return a


@kind("martin")
def _martin(cfg):
    g = graph_from_spec(cfg.graph)
    a = Audit("martin")
    exs = [potential.exhaust(g, float(e)) for e in cfg.grid("epsilons", [0.2, 0.1, 0.05, 0.025, 0.0125])]
    x0 = int(cfg.param("x0", potential.root_vertex(g)))
    rep = potential.martin_convergence(exs, x0, float(cfg.param("xi", 0.3)), cfg.param("xi_far", None))
    a.data = rep.to_dict()
    a.check("cauchy_tail", rep.cauchy, rep.successive[-3:])
    fac = float(cfg.param("separation_factor", 10.0))
    a.check("separation", rep.separation_factor >= fac, rep.separation_factor, fac)
    return a


def _harnack_max(ex, centers, radii, A):
    vals, skipped = [], 0
    for c in centers:
        for r in radii:
            try:
                vals.append((int(c), float(r), *potential.green_harnack_max(ex, int(c), float(r), A)))
            except DomainViolation:
                skipped += 1
    return vals, skipped


@kind("harnack", required=("radii", "epsilons"))
def _harnack(cfg):
    g = graph_from_spec(cfg.graph)
    a = Audit("harnack")
    A = float(cfg.param("A", 2.0))
    centers = cfg.grid("centers", [0, 1, 3, 5])
    radii = [float(r) for r in cfg.grid("radii", None)]
    eps = [float(e) for e in cfg.grid("epsilons", None)]
    a.csv_header = ["epsilon", "center", "r", "ratio", "pole"]
    maxima = {}
    for label, e, rs in (("base", eps[0], radii), ("eps_half", eps[1], radii),
                         ("r_half", eps[0], [r / 2 for r in radii])):
        vals, skipped = _harnack_max(potential.exhaust(g, e), centers, rs, A)
        for row in vals:
            a.csv_rows.append((e,) + row)
        maxima[label] = max(v[2] for v in vals)
        a.data[f"{label}_skipped"] = skipped
    a.data["maxima"] = maxima
    for label in ("eps_half", "r_half"):
        f = max(maxima[label], maxima["base"]) / min(maxima[label], maxima["base"])
        a.check(f"stable_{label}", f <= 2, f, 2)
    return a


@kind("bhp", required=("radii", "epsilons"))
def _bhp(cfg):
    g = graph_from_spec(cfg.graph)
    a = Audit("bhp")
    xis = [float(x) for x in cfg.grid("xis", list(np.arange(8) * math.pi / 4))]
    radii = [float(r) for r in cfg.grid("radii", None)]
    eps = [float(e) for e in cfg.grid("epsilons", None)]
    A0 = float(cfg.param("A0", 4.0))
    a.csv_header = ["xi", "r", "epsilon", "quantity", "value"]
    maxima = {}
    for label, e, rs in (("base", eps[0], radii), ("eps_half", eps[1], radii),
                         ("r_half", eps[0], [r / 2 for r in radii])):
        ex = potential.exhaust(g, e)
        best = 0.0
        for xi in xis:
            for r in rs:
                q = potential.boundary_harnack_ratio(ex, xi, r, A0=A0)
                best = max(best, q)
                a.csv_rows.append((xi, r, e, "double_ratio", q))
        maxima[label] = best
    a.data["maxima"] = maxima
    for label in ("eps_half", "r_half"):
        f = max(maxima[label], maxima["base"]) / min(maxima[label], maxima["base"])
        a.check(f"stable_{label}", f <= 2, f, 2)
    return a


def run_path(path, out_dir=None, seed=None) -> Audit:
    return run(load_config(path), out_dir, seed)


__all__ = ["ExperimentConfig", "Audit", "KINDS", "parse_config", "load_config", "run", "run_path",
           "graph_from_spec", "CarrierLabError"]
