"""Config-driven experiment runner.

Every acceptance-style experiment is reproducible from a JSON config:

    equi-szego <dim|diag|decay|profile|toeplitz|example>
               --config cfg.json [--format csv|json] [--out PATH]
               [--threads N] [--seed S]

Exit codes: 0 success, 2 config error, 3 assumption violation.  CSV bodies
are byte-identical across reruns of the same config and seed; '#'-prefixed
header lines carry the config hash, the seed and a tag naming the quantity.
"""

import argparse
import hashlib
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import asymptotics, hardy, kernel, oracle, toeplitz
from .actions import WeightSystem, locus_center, locus_distance, locus_sample
from .asymptotics import diagonal_leading, fit_exponent, locus_data
from .errors import AssumptionViolation, ConfigError, EquiSzegoError
from .geometry import SpherePoint, TangentVectorX, frame_at, hlc_point, to_complex
from .presets import PRESETS
from .toeplitz import QuadratureSpec, RadialPolynomial, parse_f_spec, section_values


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass
class ExperimentConfig:
    n: int
    W_G: list
    W_T: list
    nu_G: list
    nu_T: list
    k_values: list
    points: list = field(default_factory=lambda: [{"name": "locus-center"}])
    f: dict | None = None
    mc_samples: int = 10**6
    seed: int = 0
    out: str | None = None
    t_max: float = 1.5
    t_steps: int = 6
    locus_nodes: int = 64
    raw: dict = field(default_factory=dict)

    def weight_system(self) -> WeightSystem:
        return WeightSystem(
            n=self.n, W_G=np.array(self.W_G, dtype=int).reshape(-1, self.n + 1),
            W_T=np.array(self.W_T, dtype=int).reshape(-1, self.n + 1),
        )

    def resolve_point(self, spec) -> SpherePoint:
        if isinstance(spec, dict) and spec.get("name") == "locus-center":
            return locus_center(self.weight_system(), self.nu_T)
        if isinstance(spec, dict) and "coords" in spec:
            z = np.array([complex(a, bb) for a, bb in spec["coords"]])
            return SpherePoint(z / np.linalg.norm(z))
        if isinstance(spec, dict) and "moduli" in spec:
            return SpherePoint.from_moduli(spec["moduli"], spec.get("phases"))
        raise ConfigError(f"unrecognized point spec: {spec!r}")

    def config_hash(self) -> str:
        return hashlib.sha256(
            json.dumps(self.raw, sort_keys=True).encode()
        ).hexdigest()[:16]


def _require(d: dict, key: str, path: str):
    if key not in d:
        raise ConfigError(f"missing required key '{path}{key}'")
    return d[key]


def _k_values(d: dict) -> list:
    if "k_list" in d:
        ks = [int(k) for k in d["k_list"]]
        if not ks:
            raise ConfigError("'k_list' must be nonempty")
        return ks
    if "k_min" in d or "k_max" in d:
        lo = int(_require(d, "k_min", ""))
        hi = int(_require(d, "k_max", ""))
        if "k_congruence" in d:
            r, m = (int(v) for v in d["k_congruence"])
            return [k for k in range(lo, hi + 1) if k % m == r % m]
        step = int(d.get("k_step", 1))
        return list(range(lo, hi + 1, step))
    raise ConfigError("config needs 'k_list' or 'k_min'/'k_max'")


def config_from_dict(d: dict) -> ExperimentConfig:
    if not isinstance(d, dict):
        raise ConfigError("config root must be a JSON object")
    try:
        n = int(_require(d, "n", ""))
        cfg = ExperimentConfig(
            n=n,
            W_G=d.get("W_G", []),
            W_T=_require(d, "W_T", ""),
            nu_G=[int(v) for v in d.get("nu_G", [])],
            nu_T=[int(v) for v in _require(d, "nu_T", "")],
            k_values=_k_values(d),
            points=d.get("points", [{"name": "locus-center"}]),
            f=d.get("f"),
            mc_samples=int(d.get("mc_samples", 10**6)),
            seed=int(d.get("seed", 0)),
            out=d.get("out"),
            t_max=float(d.get("t_max", 1.5)),
            t_steps=int(d.get("t_steps", 6)),
            locus_nodes=int(d.get("locus_nodes", 64)),
            raw=d,
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"malformed config value: {exc}") from exc
    cfg.weight_system()  # validates shapes and the positivity assumption
    return cfg


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path) as fh:
            d = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"invalid JSON at {path}:{exc.lineno}:{exc.colno}: {exc.msg}"
        ) from exc
    return config_from_dict(d)


# ---------------------------------------------------------------------------
# runners; each returns (meta, columns, rows)
# ---------------------------------------------------------------------------

def _dim_row(args):
    raw, k = args
    cfg = config_from_dict(raw)
    ws = cfg.weight_system()
    return k, hardy.dim_isotype(ws, cfg.nu_G, cfg.nu_T, k)


def run_dim_table(cfg: ExperimentConfig, threads: int = 1):
    ws = cfg.weight_system()
    k_max = max(cfg.k_values)
    bound = oracle.required_scan_bound(ws, cfg.nu_T, k_max)
    oracle_dims = oracle.brute_dim_range(ws, cfg.nu_G, cfg.nu_T, k_max, bound)
    dims = dict(_pmap(_dim_row, [(cfg.raw, k) for k in cfg.k_values], threads))
    quad = locus_sample(ws, cfg.nu_T, cfg.locus_nodes, cfg.seed)
    C = asymptotics.dim_prediction(ws, cfg.nu_G, cfg.nu_T, quad)
    expo = ws.n - ws.d_P + 1
    nu_norm = float(np.linalg.norm(np.asarray(cfg.nu_T, dtype=float)))
    rows = []
    running = 0.0
    for i, k in enumerate(sorted(cfg.k_values)):
        scale = (nu_norm * k / np.pi) ** expo
        running += dims[k] / scale
        rows.append([
            k, dims[k], int(oracle_dims[k]), C * scale, running / (i + 1),
        ])
    meta = {
        "quantity": "isotype-dimension-table",
        "dim_constant": C,
        "k_exponent": expo,
    }
    return meta, ["k", "dim", "oracle_dim", "prediction", "cesaro_mean"], rows


def _diag_row(args):
    raw, k = args
    cfg = config_from_dict(raw)
    ws = cfg.weight_system()
    x = cfg.resolve_point(cfg.points[0])
    b = hardy.build_basis(ws, cfg.nu_G, cfg.nu_T, k)
    return k, kernel.szego_diag(b, x)


def run_diag_scan(cfg: ExperimentConfig, threads: int = 1):
    ws = cfg.weight_system()
    x = cfg.resolve_point(cfg.points[0])
    f = frame_at(x)
    ld = locus_data(ws, f, cfg.nu_T)
    values = dict(_pmap(_diag_row, [(cfg.raw, k) for k in cfg.k_values], threads))
    rows = []
    fit_pts = []
    for k in sorted(cfg.k_values):
        term, pred = diagonal_leading(ws, f, cfg.nu_G, cfg.nu_T, k, ld=ld)
        diag = values[k]
        pred_abs = abs(pred)
        ratio = diag / pred_abs if pred_abs > 0 else float("nan")
        if diag > 0:
            fit_pts.append((k, diag))
        slope = float("nan")
        if len(fit_pts) >= 4:
            slope, _, _ = fit_exponent(fit_pts)
        rows.append([k, diag, pred_abs, ratio, slope])
    meta = {
        "quantity": "diagonal-growth-scan",
        "k_exponent_predicted": asymptotics.diag_k_exponent(ws.n, ws.d_P),
    }
    return meta, ["k", "diag_value", "leading_prediction", "ratio", "fitted_exponent"], rows


def _decay_row(args):
    raw, k = args
    cfg = config_from_dict(raw)
    ws = cfg.weight_system()
    x = cfg.resolve_point(cfg.points[0])
    b = hardy.build_basis(ws, cfg.nu_G, cfg.nu_T, k)
    return k, kernel.log_szego_diag(b, x)


def run_decay_scan(cfg: ExperimentConfig, threads: int = 1):
    ws = cfg.weight_system()
    x = cfg.resolve_point(cfg.points[0])
    dist = locus_distance(ws, x, cfg.nu_T)
    values = dict(_pmap(_decay_row, [(cfg.raw, k) for k in cfg.k_values], threads))
    rows = []
    pts = []
    for k in sorted(cfg.k_values):
        logdiag = values[k]
        rate = float("nan")
        if np.isfinite(logdiag):
            pts.append((k, logdiag))
        if len(pts) >= 4:
            ks = np.array([p[0] for p in pts], dtype=float)
            ys = np.array([p[1] for p in pts])
            A = np.vstack([ks, np.ones_like(ks)]).T
            rate = float(np.linalg.lstsq(A, ys, rcond=None)[0][0])
        rows.append([k, dist, logdiag, rate])
    meta = {"quantity": "off-locus-decay-scan", "dist_to_locus": dist}
    return meta, ["k", "dist_to_locus", "log_diag", "fitted_decay_rate"], rows


def run_profile_scan(cfg: ExperimentConfig, threads: int = 1):
    ws = cfg.weight_system()
    x = cfg.resolve_point(cfg.points[0])
    f = frame_at(x)
    ld = locus_data(ws, f, cfg.nu_T)
    if ld.Q_N.shape[1] == 0:
        raise AssumptionViolation("no transversal direction at this point")
    direction = ld.Q_N[:, 0]
    ts = np.linspace(0.0, cfg.t_max, cfg.t_steps)
    rows = []
    for k in sorted(cfg.k_values):
        b = hardy.build_basis(ws, cfg.nu_G, cfg.nu_T, k)
        base = kernel.szego_diag(b, x)
        for t in ts:
            u = TangentVectorX(0.0, to_complex(t * direction))
            val = abs(kernel.szego_rescaled(b, f, u, u, k))
            ratio = val / base if base > 0 else float("nan")
            pred = float(np.exp(asymptotics.h_exponent_at(ld, u, u).real))
            rows.append([k, t, ratio, pred])
    meta = {"quantity": "transversal-gaussian-profile", "lambda": ld.lam}
    return meta, ["k", "t", "kernel_ratio", "exp_H_prediction"], rows


def run_toeplitz(cfg: ExperimentConfig, threads: int = 1):
    ws = cfg.weight_system()
    fobs = parse_f_spec(cfg.f, cfg.n)
    x = cfg.resolve_point(cfg.points[0])
    fr = frame_at(x)
    ld = locus_data(ws, fr, cfg.nu_T)
    quad_nodes = locus_sample(ws, cfg.nu_T, cfg.locus_nodes, cfg.seed)
    pred, pred_err = toeplitz.trace_prediction(ws, fobs, cfg.nu_G, cfg.nu_T, quad_nodes)
    if ld.Q_N.shape[1] == 0:
        raise AssumptionViolation("no transversal direction at this point")
    direction = ld.Q_N[:, 0]
    ts = np.linspace(0.0, cfg.t_max, cfg.t_steps)
    rows = []
    for k in sorted(cfg.k_values):
        b = hardy.build_basis(ws, cfg.nu_G, cfg.nu_T, k)
        M, _ = toeplitz.toeplitz_matrix(b, fobs)
        tr = toeplitz.toeplitz_trace(M) if b.dim else 0.0
        if b.dim == 0:
            rows.append([k, tr, 0, pred, float("nan"), float("nan"), float("nan")])
            continue
        diag_vals = np.diag(M).real
        V0 = section_values(b, x.z[None, :])[0]
        base = float(np.sum(diag_vals * np.abs(V0) ** 2))
        sk = np.sqrt(float(k))
        for t in ts:
            u = to_complex(t * direction)
            y = hlc_point(fr, 0.0, u / sk)
            Vy = section_values(b, y.z[None, :])[0]
            val = float(np.sum(diag_vals * np.abs(Vy) ** 2))
            ratio = val / base if base > 0 else float("nan")
            gauss = float(np.exp(-2.0 * ld.lam * t * t))
            rows.append([k, tr, b.dim, pred, t, ratio, gauss])
    meta = {
        "quantity": "toeplitz-trace-and-profile",
        "trace_prediction": pred,
        "trace_prediction_stderr": pred_err,
    }
    cols = ["k", "trace", "dim", "trace_prediction", "t", "near_diag_ratio", "near_diag_prediction"]
    return meta, cols, rows


def run_example(name: str, threads: int = 1):
    """End-to-end report for one of the two worked examples."""
    if name not in PRESETS:
        raise ConfigError(f"unknown example {name!r}; choose from {sorted(PRESETS)}")
    ws = PRESETS[name]()
    rows = []
    if name == "p1":
        nu_G, nu_T = [1], [1]
        x = locus_center(ws, nu_T)
        bs = [25, 50, 100, 200, 400]
        for b in bs:
            k = 3 * b + 1
            basis = hardy.build_basis(ws, nu_G, nu_T, k)
            diag = kernel.szego_diag(basis, x)
            lim = oracle.stirling_p1_limit(b)
            coeff = np.exp(hardy.log_coefficient(basis.entries[0][0], ws.n) + np.log(np.pi))
            st = oracle.stirling_p1(b, 1)
            rows.append(["diag", f"b={b}", diag, lim, diag / lim])
            rows.append(["stirling", f"b={b}", coeff, st, coeff / st])
        # off-locus decay at moduli 0.6 / 0.4
        y = SpherePoint.from_moduli([0.6, 0.4])
        pts = []
        for b in range(100, 401):
            k = 3 * b + 1
            basis = hardy.build_basis(ws, nu_G, nu_T, k)
            pts.append((b, kernel.log_szego_diag(basis, y)))
        bsarr = np.array([p[0] for p in pts], dtype=float)
        ys = np.array([p[1] for p in pts])
        A = np.vstack([bsarr, np.ones_like(bsarr)]).T
        slope = float(np.linalg.lstsq(A, ys, rcond=None)[0][0])
        rows.append(["decay", "slope vs b at r0=0.6", slope, -np.log(25 / 24),
                     slope / (-np.log(25 / 24))])
    else:
        nu_G, nu_T = [1, 1], [1]
        x = locus_center(ws, nu_T)
        for c in [25, 50, 100, 200]:
            k = 6 * c + 4
            basis = hardy.build_basis(ws, nu_G, nu_T, k)
            diag = kernel.szego_diag(basis, x)
            lim = oracle.stirling_p2_limit(c, 1, 1)
            lim_free = oracle.stirling_p2_limit_nu_free(c)
            rows.append(["diag", f"c={c}", diag, lim, diag / lim])
            rows.append(["diag-character-free", f"c={c}", diag, lim_free, diag / lim_free])
    meta = {"quantity": f"worked-example-report-{name}"}
    return meta, ["section", "label", "value", "reference", "ratio"], rows


RUNNERS = {
    "dim": run_dim_table,
    "diag": run_diag_scan,
    "decay": run_decay_scan,
    "profile": run_profile_scan,
    "toeplitz": run_toeplitz,
}


# ---------------------------------------------------------------------------
# output and plumbing
# ---------------------------------------------------------------------------

def _pmap(fn, items, threads: int):
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * threads))))


def _fmt(v) -> str:
    if isinstance(v, float):
        if np.isnan(v):
            return "nan"
        return format(v, ".12g")
    return str(v)


def write_csv(fh, meta: dict, columns, rows):
    for key in sorted(meta):
        fh.write(f"# {key}: {_fmt(meta[key])}\n")
    fh.write(",".join(columns) + "\n")
    for row in rows:
        fh.write(",".join(_fmt(v) for v in row) + "\n")


def write_json(fh, meta: dict, columns, rows):
    payload = {
        "meta": {k: meta[k] for k in sorted(meta)},
        "columns": list(columns),
        "rows": [[v if not isinstance(v, np.generic) else v.item() for v in row]
                 for row in rows],
    }
    json.dump(payload, fh, indent=1, sort_keys=True, default=_fmt)
    fh.write("\n")


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="equi-szego",
        description="equivariant projector kernel experiments",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in RUNNERS:
        p = sub.add_parser(name)
        p.add_argument("--config", required=True)
        _common_flags(p)
    pex = sub.add_parser("example")
    pex.add_argument("name", nargs="?", default=None)
    pex.add_argument("--name", dest="name_opt", default=None)
    _common_flags(pex)

    args = parser.parse_args(argv)
    try:
        if args.command == "example":
            name = args.name_opt or args.name
            if not name:
                raise ConfigError("example requires a name (p1 or p2)")
            meta, columns, rows = run_example(name, threads=args.threads)
            cfg_hash = hashlib.sha256(name.encode()).hexdigest()[:16]
            seed = args.seed if args.seed is not None else 0
            out_path = args.out
        else:
            cfg = load_config(args.config)
            if args.seed is not None:
                cfg.seed = args.seed
                cfg.raw = dict(cfg.raw, seed=args.seed)
            meta, columns, rows = RUNNERS[args.command](cfg, threads=args.threads)
            cfg_hash = cfg.config_hash()
            seed = cfg.seed
            out_path = args.out or cfg.out
        meta = dict(meta, config_hash=cfg_hash, seed=seed)
        if out_path:
            with open(out_path, "w") as fh:
                _write(fh, args.format, meta, columns, rows)
        else:
            _write(sys.stdout, args.format, meta, columns, rows)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (AssumptionViolation, EquiSzegoError) as exc:
        print(f"assumption violation: {exc}", file=sys.stderr)
        return 3


def _common_flags(p):
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--seed", type=int, default=None)


def _write(fh, fmt, meta, columns, rows):
    if fmt == "json":
        write_json(fh, meta, columns, rows)
    else:
        write_csv(fh, meta, columns, rows)


if __name__ == "__main__":
    sys.exit(main())
