"""Command-line front end: ``ratcorr <command> [--config FILE] [overrides]``.

Every run writes its artifacts plus ``config.json`` (the resolved
configuration) and ``manifest.json`` (config echo, versions, wall time) into
the output directory.  Exit status: 0 success, 2 configuration error,
3 cap exceeded, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import platform
import sys
import time
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .correspondence import (
    WORD_CAP,
    branch_count_bound,
    chain_degrees,
    chain_from_config,
    chain_to_config,
    critical_union,
    enumerate_words,
    iterate_chain,
    regular_branch_count,
)
from .dimension import (
    DEFAULT_SCALES,
    circle_sample,
    estimate_M,
    lambda_table,
    lower_bound,
    pullback_julia_sample,
    recoordinate,
    repelling_sample,
)
from .errors import CapExceeded, ConfigError, RatCorrError
from .io import (
    dumps_json,
    fmt,
    point_cells,
    point_json,
    read_measure_csv,
    word_label,
    write_csv,
    write_json,
    write_measure_csv,
)
from .measures import (
    ATOM_CAP,
    AtomicMeasure,
    ShrinkProbeParams,
    angular_histogram,
    binned,
    binned_tv,
    branch_shrink_probe,
    pullback_exact,
    pullback_sample,
    repelling_measure,
    word_fixed_points,
)
from .rational import DEGREE_CAP
from .sphere import P1Point, h_to_complex, random_point

COMMANDS = (
    "degrees",
    "compose",
    "pullback",
    "repelling",
    "compare",
    "shrink-probe",
    "branch-bound",
    "dimension",
    "bound",
    "render",
)

EXIT_OK, EXIT_CONFIG, EXIT_CAP, EXIT_NUMERIC = 0, 2, 3, 4


def _default_caps():
    return {"atoms": ATOM_CAP, "degree": DEGREE_CAP, "words": WORD_CAP}


@dataclass
class RunConfig:
    generators: list
    command: str
    n: int = 1
    seed: int | None = None
    mode: str = "exact"
    count: int = 10_000
    workers: int = 1
    w0: object = None
    caps: dict = field(default_factory=_default_caps)
    out: str = "out"
    grid: int = 8
    l: int = 2
    center: list = None
    radius: float = 0.01
    samples: int = 200
    epsilon: float = 0.1
    k_max: int = 10
    ks: list = None
    scales: list = None
    source: str = "pullback"
    sample_count: int = 1000
    window: list = field(default_factory=lambda: [-1.5, 1.5, -1.5, 1.5])
    size: int = 256
    input: str = None
    inputs: list = None

    def __post_init__(self):
        self.validate()

    @classmethod
    def from_dict(cls, d):
        if not isinstance(d, dict):
            raise ConfigError("config", "must be a JSON object")
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(d) - names)
        if unknown:
            raise ConfigError(unknown[0], "unknown field")
        for key in ("generators", "command"):
            if key not in d:
                raise ConfigError(key, "required")
        d = dict(d)
        caps = _default_caps()
        caps.update(d.get("caps") or {})
        d["caps"] = caps
        return cls(**d)

    @classmethod
    def from_json(cls, text):
        try:
            d = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError("config", f"invalid JSON: {e}") from None
        return cls.from_dict(d)

    def to_dict(self):
        return dataclasses.asdict(self)

    def to_json(self):
        return dumps_json(self.to_dict())

    def validate(self):
        def need_int(name, lo):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, int) or v < lo:
                raise ConfigError(name, f"must be an integer >= {lo}")

        if self.command not in COMMANDS:
            raise ConfigError("command", f"must be one of {', '.join(COMMANDS)}")
        if not isinstance(self.generators, list) or not self.generators:
            raise ConfigError("generators", "must be a nonempty list")
        for i, g in enumerate(self.generators):
            if not isinstance(g, dict) or "num" not in g:
                raise ConfigError(f"generators[{i}]", "needs a 'num' coefficient list")
            for key in ("num", "den"):
                if key in g and not _is_coeff_list(g[key]):
                    raise ConfigError(f"generators[{i}].{key}", "must be a list of [re, im] pairs")
            m = g.get("mult", 1)
            if isinstance(m, bool) or not isinstance(m, int) or m < 1:
                raise ConfigError(f"generators[{i}].mult", "must be a positive integer")
        need_int("n", 0)
        for name in ("count", "workers", "grid", "l", "samples", "k_max", "sample_count", "size"):
            need_int(name, 1)
        if self.grid < 2:
            raise ConfigError("grid", "must be >= 2")
        if self.seed is not None and (isinstance(self.seed, bool) or not isinstance(self.seed, int) or self.seed < 0):
            raise ConfigError("seed", "must be a nonnegative integer")
        if self.mode not in ("exact", "sample"):
            raise ConfigError("mode", "must be 'exact' or 'sample'")
        if not isinstance(self.caps, dict):
            raise ConfigError("caps", "must be an object")
        for k, v in self.caps.items():
            if k not in ("atoms", "degree", "words"):
                raise ConfigError(f"caps.{k}", "unknown cap")
            if isinstance(v, bool) or not isinstance(v, int) or v <= 0:
                raise ConfigError(f"caps.{k}", "must be a positive integer")
        if self.w0 is not None and not (self.w0 == "inf" or _is_pair(self.w0)):
            raise ConfigError("w0", "must be [re, im] or \"inf\"")
        if self.center is not None and not _is_pair(self.center):
            raise ConfigError("center", "must be [re, im]")
        if not (isinstance(self.radius, (int, float)) and 0 < self.radius < 1):
            raise ConfigError("radius", "must lie in (0, 1)")
        if not (isinstance(self.epsilon, (int, float)) and 0 < self.epsilon < 1):
            raise ConfigError("epsilon", "must lie in (0, 1)")
        if self.scales is not None:
            if not isinstance(self.scales, list) or len(self.scales) < 4 or not all(
                isinstance(e, (int, float)) and 0 < e < 0.5 for e in self.scales
            ):
                raise ConfigError("scales", "need at least 4 scales, each in (0, 0.5)")
        if self.ks is not None and not (
            isinstance(self.ks, list) and self.ks and all(isinstance(k, int) and k >= 1 for k in self.ks)
        ):
            raise ConfigError("ks", "must be a list of positive integers")
        if self.source not in ("pullback", "repelling", "circle"):
            raise ConfigError("source", "must be 'pullback', 'repelling' or 'circle'")
        if not (isinstance(self.window, list) and len(self.window) == 4 and all(isinstance(v, (int, float)) for v in self.window)):
            raise ConfigError("window", "must be [xmin, xmax, ymin, ymax]")
        if self.window[0] >= self.window[1] or self.window[2] >= self.window[3]:
            raise ConfigError("window", "min must be below max")
        if self.inputs is not None and not (isinstance(self.inputs, list) and len(self.inputs) == 2):
            raise ConfigError("inputs", "must name exactly two measure CSV files")
        if not isinstance(self.out, str) or not self.out:
            raise ConfigError("out", "must be a nonempty path")
        if self.seed is None and self._needs_seed():
            raise ConfigError("seed", f"required for '{self.command}'")

    def _needs_seed(self):
        if self.command == "shrink-probe":
            return True
        if self.command == "pullback" and self.mode == "sample":
            return True
        if self.command in ("pullback", "compare") and self.w0 is None and not self.inputs:
            return True
        if self.command == "render" and self.input is None:
            return self.mode == "sample" or self.w0 is None
        return False


def _is_pair(v):
    return isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in v)


def _is_coeff_list(v):
    return isinstance(v, list) and len(v) > 0 and all(_is_pair(p) for p in v)


def _point(v):
    if v == "inf":
        return P1Point.infinity()
    return P1Point.from_complex(complex(v[0], v[1]))


# -- command implementations --------------------------------------------------

def _base_point(cfg):
    return _point(cfg.w0) if cfg.w0 is not None else random_point(cfg.seed)


def _summary(m, grid):
    return {"mass": m.mass, "atom_count": len(m), "bins": {"grid": grid, "mass": [float(x) for x in binned(m, grid)]}}


def _pullback(cfg, chain):
    w0 = _base_point(cfg)
    if cfg.mode == "exact":
        return pullback_exact(chain, w0, cfg.n, atom_cap=cfg.caps["atoms"])
    return pullback_sample(chain, w0, cfg.n, cfg.count, cfg.seed, workers=cfg.workers)


def cmd_degrees(cfg, chain, out):
    d1, d0, key = chain_degrees(chain)
    write_json(os.path.join(out, "degrees.json"), {"d1": d1, "d0": d0, "key_condition": key})
    return ["degrees.json"]


def cmd_compose(cfg, chain, out):
    n = max(cfg.n, 1)
    it = iterate_chain(chain, n, degree_cap=cfg.caps["degree"])
    comps = chain_to_config(it)
    for comp, g in zip(comps, it.maps):
        comp["degree"] = g.degree
    d1, d0, key = chain_degrees(it)
    write_json(os.path.join(out, "compose.json"), {"n": n, "d1": d1, "d0": d0, "key_condition": key, "generators": comps})
    words = enumerate_words(chain, n, cfg.caps["words"])
    write_csv(os.path.join(out, "words.csv"), ["indices", "weight"], [(word_label(w.indices), w.weight) for w in words])
    return ["compose.json", "words.csv"]


def cmd_pullback(cfg, chain, out):
    m = _pullback(cfg, chain)
    write_measure_csv(os.path.join(out, "measure.csv"), m)
    write_json(os.path.join(out, "summary.json"), _summary(m, cfg.grid))
    return ["measure.csv", "summary.json"]


def cmd_repelling(cfg, chain, out):
    n = max(cfg.n, 1)
    if max(chain.degrees) < 2:
        raise ValueError("some generator must have degree >= 2")
    recs = word_fixed_points(chain, n, cfg.caps["words"], cfg.caps["degree"])
    fp_rows, rep_rows = [], []
    for r in recs:
        (re, im, _), = point_cells(r.point.h[None, :])
        label = word_label(r.word.indices)
        fp_rows.append((re, im, label, r.multiplicity, fmt(r.multiplier), r.weight, int(r.repelling)))
        if r.repelling:
            rep_rows.append((re, im, label, fmt(r.multiplier), r.weight))
    write_csv(os.path.join(out, "fixed_points.csv"), ["re", "im", "word_indices", "multiplicity", "multiplier", "weight", "repelling"], fp_rows)
    write_csv(os.path.join(out, "repelling.csv"), ["re", "im", "word_indices", "multiplier", "weight"], rep_rows)
    mu, _ = repelling_measure(chain, n, cfg.caps["words"], cfg.caps["degree"])
    write_measure_csv(os.path.join(out, "measure.csv"), mu)
    summary = _summary(mu, cfg.grid)
    summary["fixed_point_weight"] = sum(r.weight for r in recs)
    summary["bezout_count"] = chain.d1 ** n + chain.d0 ** n
    summary["lower_bound_only"] = not all(r.exact for r in recs)
    write_json(os.path.join(out, "summary.json"), summary)
    return ["fixed_points.csv", "repelling.csv", "measure.csv", "summary.json"]


def cmd_compare(cfg, chain, out):
    if cfg.inputs:
        a = AtomicMeasure(*read_measure_csv(cfg.inputs[0]))
        b = AtomicMeasure(*read_measure_csv(cfg.inputs[1]))
        labels = list(cfg.inputs)
    else:
        n = max(cfg.n, 1)
        a, _ = repelling_measure(chain, n, cfg.caps["words"], cfg.caps["degree"])
        b = _pullback(cfg, chain)
        labels = [f"repelling n={n}", f"pullback {cfg.mode} n={cfg.n}"]
    ha, hb = angular_histogram(a), angular_histogram(b)
    result = {
        "a": labels[0],
        "b": labels[1],
        "grid": cfg.grid,
        "tv": binned_tv(a, b, cfg.grid),
        "mass_a": a.mass,
        "mass_b": b.mass,
        "angular_max_dev_a": float(np.abs(ha * len(ha) - 1).max()),
        "angular_max_dev_b": float(np.abs(hb * len(hb) - 1).max()),
    }
    write_json(os.path.join(out, "compare.json"), result)
    return ["compare.json"]


def cmd_shrink_probe(cfg, chain, out):
    center = _point(cfg.center) if cfg.center is not None else random_point(cfg.seed)
    p = ShrinkProbeParams(center, cfg.radius, cfg.n, cfg.samples, cfg.seed, cfg.epsilon)
    r = branch_shrink_probe(chain, p)
    write_json(
        os.path.join(out, "shrink.json"),
        {
            "center": point_json(center.h),
            "radius": cfg.radius,
            "depth": cfg.n,
            "median_diam": r.median_diam,
            "quantile_diam": r.quantile_diam,
            "epsilon": cfg.epsilon,
            "per_level": r.per_level,
            "per_level_quantile": r.per_level_quantile,
            "ratios": r.ratios(),
            "discarded": r.discarded,
            "reference_rate": math.sqrt(chain.d0 / chain.d1),
        },
    )
    rows = [(k, fmt(a), fmt(b)) for k, (a, b) in enumerate(zip(r.per_level, r.per_level_quantile))]
    write_csv(os.path.join(out, "shrink.csv"), ["level", "median_diam", "quantile_diam"], rows)
    return ["shrink.json", "shrink.csv"]


def cmd_branch_bound(cfg, chain, out):
    n = max(cfg.n, 1)
    rep = branch_count_bound(chain, n, cfg.l)
    cl = critical_union(chain, cfg.l, cfg.caps["words"])
    result = dataclasses.asdict(rep)
    result["critical_union"] = [point_json(h) for h in cl.h]
    if cfg.center is not None:
        center = _point(cfg.center)
        result["center"] = point_json(center.h)
        result["radius"] = cfg.radius
        result["regular_branches"] = regular_branch_count(chain, n, center, cfg.radius, cfg.caps["words"])
    write_json(os.path.join(out, "branch_bound.json"), result)
    return ["branch_bound.json"]


def _julia_sample(cfg, chain):
    if cfg.source == "circle":
        return circle_sample(cfg.sample_count)
    if cfg.source == "repelling":
        return repelling_sample(chain, max(cfg.n, 1))
    w0 = _point(cfg.w0) if cfg.w0 is not None else None
    return pullback_julia_sample(chain, cfg.n, w0, atom_cap=cfg.caps["atoms"])


def _write_lambda(out, table):
    write_csv(os.path.join(out, "lambda.csv"), ["k", "R_k", "lambda_k"], [(k, fmt(r), fmt(l)) for k, r, l in table])


def cmd_dimension(cfg, chain, out):
    s = _julia_sample(cfg, chain)
    rep = lower_bound(chain, s, cfg.k_max, tuple(cfg.scales) if cfg.scales else DEFAULT_SCALES)
    doc = rep.to_json()
    doc["sample"] = {"source": s.source, "size": len(s)}
    write_json(os.path.join(out, "dimension.json"), doc)
    _write_lambda(out, rep.lambda_table)
    write_csv(os.path.join(out, "sample.csv"), ["re", "im", "at_infinity"], point_cells(s.h))
    return ["dimension.json", "lambda.csv", "sample.csv"]


def cmd_bound(cfg, chain, out):
    s = _julia_sample(cfg, chain)
    chain2, s2, moved, _ = recoordinate(chain, s)
    M = estimate_M(chain2, s2)
    ks = cfg.ks or list(range(1, cfg.k_max + 1))
    table = lambda_table(chain2, M, ks)
    max_deg = max(chain.degrees)
    write_json(
        os.path.join(out, "bound.json"),
        {
            "M": M,
            "max_deg": max_deg,
            "bound_sample_M": math.log(max_deg) / math.log(M),
            "recoordinated": moved,
            "lambda_table": [{"k": k, "R_k": r, "lambda_k": l} for k, r, l in table],
        },
    )
    _write_lambda(out, table)
    return ["bound.json", "lambda.csv"]


def render_density(h, window, size):
    """8-bit image (rows top to bottom) of log-scaled atom counts per pixel."""
    xmin, xmax, ymin, ymax = window
    z = h_to_complex(h)
    z = z[np.isfinite(z)]
    col = np.floor((z.real - xmin) / (xmax - xmin) * size).astype(np.int64)
    row = np.floor((ymax - z.imag) / (ymax - ymin) * size).astype(np.int64)
    keep = (col >= 0) & (col < size) & (row >= 0) & (row < size)
    counts = np.zeros((size, size), dtype=np.int64)
    np.add.at(counts, (row[keep], col[keep]), 1)
    img = np.zeros((size, size), dtype=np.uint8)
    top = counts.max()
    if top > 0:
        scaled = np.log1p(counts) / math.log1p(top) * 255.0
        img = np.where(counts > 0, np.maximum(1, np.rint(scaled)), 0).astype(np.uint8)
    return img


def write_pgm(path, img):
    h, w = img.shape
    with open(path, "wb") as f:
        f.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        f.write(np.ascontiguousarray(img, dtype=np.uint8).tobytes())


def cmd_render(cfg, chain, out):
    if cfg.input is not None:
        h, _ = read_measure_csv(cfg.input)
    else:
        h = _pullback(cfg, chain).h
    write_pgm(os.path.join(out, "density.pgm"), render_density(h, cfg.window, cfg.size))
    return ["density.pgm"]


HANDLERS = {
    "degrees": cmd_degrees,
    "compose": cmd_compose,
    "pullback": cmd_pullback,
    "repelling": cmd_repelling,
    "compare": cmd_compare,
    "shrink-probe": cmd_shrink_probe,
    "branch-bound": cmd_branch_bound,
    "dimension": cmd_dimension,
    "bound": cmd_bound,
    "render": cmd_render,
}


def _versions():
    import scipy

    return {"python": platform.python_version(), "numpy": np.__version__, "scipy": scipy.__version__, "ratcorr": __version__}


def run(cfg):
    """Execute one configured command; returns the list of files written."""
    try:
        chain = chain_from_config(cfg.generators)
    except (ValueError, TypeError) as e:
        raise ConfigError("generators", str(e)) from None
    os.makedirs(cfg.out, exist_ok=True)
    t0 = time.perf_counter()
    files = HANDLERS[cfg.command](cfg, chain, cfg.out)
    with open(os.path.join(cfg.out, "config.json"), "w", encoding="utf-8", newline="\n") as f:
        f.write(cfg.to_json())
    manifest = {
        "command": cfg.command,
        "config": cfg.to_dict(),
        "outputs": sorted(files + ["config.json"]),
        "versions": _versions(),
        "wall_time_s": time.perf_counter() - t0,
    }
    write_json(os.path.join(cfg.out, "manifest.json"), manifest)
    return files + ["config.json", "manifest.json"]


# -- argument parsing ---------------------------------------------------------

def _pair_arg(text):
    if text == "inf":
        return "inf"
    try:
        z = complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        re_, im_ = text.split(",")
        z = complex(float(re_), float(im_))
    return [z.real, z.imag]


def build_parser():
    p = argparse.ArgumentParser(prog="ratcorr", description="Rational semigroups through their holomorphic correspondences.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--config", help="JSON file with generators and parameters")
    p.add_argument("--powers", help="shortcut chain of power maps, e.g. 2,3")
    p.add_argument("--n", type=int, help="word length / depth")
    p.add_argument("--seed", type=int)
    p.add_argument("--mode", choices=("exact", "sample"))
    p.add_argument("--count", type=int, help="Monte-Carlo orbit count")
    p.add_argument("--workers", type=int)
    p.add_argument("--w0", type=_pair_arg, help="base point as re,im or a+bj or inf")
    p.add_argument("--out")
    p.add_argument("--grid", type=int)
    p.add_argument("--l", type=int)
    p.add_argument("--center", type=_pair_arg)
    p.add_argument("--radius", type=float)
    p.add_argument("--samples", type=int)
    p.add_argument("--epsilon", type=float)
    p.add_argument("--k-max", dest="k_max", type=int)
    p.add_argument("--source", choices=("pullback", "repelling", "circle"))
    p.add_argument("--sample-count", dest="sample_count", type=int)
    p.add_argument("--size", type=int)
    p.add_argument("--input")
    p.add_argument("--atom-cap", type=int)
    p.add_argument("--word-cap", type=int)
    p.add_argument("--degree-cap", type=int)
    return p


def _power_generators(text):
    gens = []
    for d in text.split(","):
        d = int(d)
        gens.append({"num": [[0.0, 0.0]] * d + [[1.0, 0.0]], "den": [[1.0, 0.0]], "mult": 1})
    return gens


def config_from_args(argv):
    args = build_parser().parse_args(argv)
    d = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as f:
                d = json.load(f)
        except OSError as e:
            raise ConfigError("config", str(e)) from None
        except json.JSONDecodeError as e:
            raise ConfigError("config", f"invalid JSON: {e}") from None
        if not isinstance(d, dict):
            raise ConfigError("config", "must be a JSON object")
    if args.powers:
        try:
            d["generators"] = _power_generators(args.powers)
        except ValueError:
            raise ConfigError("powers", "must be comma-separated integers") from None
    d["command"] = args.command
    for key in ("n", "seed", "mode", "count", "workers", "w0", "out", "grid", "l", "center", "radius",
                "samples", "epsilon", "k_max", "source", "sample_count", "size", "input"):
        v = getattr(args, key)
        if v is not None:
            d[key] = v
    caps = dict(d.get("caps") or {})
    for key, name in (("atom_cap", "atoms"), ("word_cap", "words"), ("degree_cap", "degree")):
        v = getattr(args, key)
        if v is not None:
            caps[name] = v
    if caps:
        d["caps"] = caps
    return RunConfig.from_dict(d)


def main(argv=None):
    try:
        cfg = config_from_args(sys.argv[1:] if argv is None else argv)
        run(cfg)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except CapExceeded as e:
        print(f"cap exceeded: {e}", file=sys.stderr)
        return EXIT_CAP
    except RatCorrError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, FloatingPointError) as e:
        print(f"invalid input: {e}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
