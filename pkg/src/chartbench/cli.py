"""chartbench command line.

Subcommands: gen, embed, scan, spectra, pairs, rank, plot-scan, plot-pairs,
reproduce. Exit codes: 0 success, 2 configuration error, 3 numerical
failure, 4 disconnected neighbor graph.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import __version__
from . import csvio, diagnostics, dmap, isomap, readout, svgplot, synth, umaplite
from .csvio import SchemaError, parse_float
from .embedding import Embedding
from .isomap import DisconnectedGraphError
from .linalg import AffineFit, pairwise_sq_dists

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_DISCONNECTED = 4


@dataclass(frozen=True)
class RunConfig:
    """Every knob of a reproduce run; serialized verbatim into manifest.json."""

    n: int = 2000
    w: float = 60.0
    h: float = 10.0
    a: float = 1.0
    b: float = 0.5
    seed: int = 7
    beta: str = "median:50"
    alpha: float = 1.0
    kmax: int = 1025
    isomap_k: int = 10
    umap_k: int = 15
    umap_epochs: int = 200
    umap_seed: int = 7
    dims: str = "1,2,3,4,5,6,7,8,16,32,64,128,256,512,1024"
    recon_dims: str = "2,4,8,1024"
    tau: float = 1e-3
    beta_grid: str = "1e-6:1e4:25"
    rank_n: int = 1000
    base_mode: int = 0
    partners: str = "1:10"
    threads: int = 1
    plots: bool = True
    out_dir: str = "chartbench_out"

    def dims_list(self) -> list[int]:
        return _parse_dims(self.dims)

    def recon_dims_list(self) -> list[int]:
        return _parse_dims(self.recon_dims)


def _parse_dims(text: str) -> list[int]:
    dims = sorted({int(tok) for tok in str(text).split(",") if tok.strip()})
    if not dims or dims[0] < 1:
        raise ValueError(f"bad dims list {text!r}")
    return dims


def _parse_partners(text: str) -> list[int]:
    text = str(text)
    if ":" in text:
        lo, _, hi = text.partition(":")
        lo_i, hi_i = int(lo), int(hi)
        if hi_i < lo_i:
            raise ValueError(f"bad partner range {text!r}")
        return list(range(lo_i, hi_i + 1))
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _parse_beta_grid(text: str) -> np.ndarray:
    try:
        lo, hi, count = str(text).split(":")
        grid = np.logspace(np.log10(float(lo)), np.log10(float(hi)), int(count))
    except Exception as exc:
        raise ValueError(f"bad beta grid {text!r} (expected lo:hi:count)") from exc
    if len(grid) < 3:
        raise ValueError("beta grid needs at least 3 points")
    return grid


def load_config_file(path: str | Path) -> dict[str, Any]:
    """Read a config file: JSON if the suffix is .json, else flat key=value
    lines ('#' starts a comment; keys match RunConfig field names)."""
    path = Path(path)
    if not path.exists():
        raise ValueError(f"config file not found: {path}")
    if path.suffix == ".json":
        payload = csvio.read_manifest(path)
        payload.pop("schema", None)
        payload.pop("versions", None)
        return payload
    out: dict[str, Any] = {}
    for ln, raw in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{ln}: expected key=value, got {raw!r}")
        key, _, val = line.partition("=")
        out[key.strip()] = val.strip()
    return out


def config_from_sources(file_values: dict[str, Any], overrides: dict[str, Any]) -> RunConfig:
    """Build a RunConfig from file values overridden by CLI flags."""
    valid = {f.name: f.type for f in fields(RunConfig)}
    merged: dict[str, Any] = {}
    for src in (file_values, overrides):
        for key, val in src.items():
            if val is None:
                continue
            if key not in valid:
                raise ValueError(f"unknown config key {key!r}")
            merged[key] = val
    cfg = RunConfig()
    casts = {f.name: type(getattr(cfg, f.name)) for f in fields(RunConfig)}
    kwargs = {}
    for key, val in merged.items():
        want = casts[key]
        if want is bool and isinstance(val, str):
            kwargs[key] = val.lower() in ("1", "true", "yes", "on")
        else:
            kwargs[key] = want(val)
    return replace(cfg, **kwargs)


# ---------------------------------------------------------------- dataset io

DATASET_COLUMNS = ("s", "h", "x", "y", "z")


def write_dataset(path: Path, ds: synth.Dataset) -> None:
    rows = np.column_stack([ds.chart.Q, ds.X])
    csvio.write_csv(path, "dataset", DATASET_COLUMNS, rows)
    csvio.write_manifest(path.with_suffix(".json"), {
        "schema": csvio.schema_tag("dataset-manifest"),
        "n": ds.chart.Q.shape[0],
        "w": ds.chart.W,
        "h": ds.chart.H,
        "a": ds.spiral.a,
        "b": ds.spiral.b,
        "seed": ds.chart.seed,
    })


def read_dataset(path: Path) -> synth.Dataset:
    _, rows = csvio.read_csv(path, "dataset", DATASET_COLUMNS)
    data = np.array([[parse_float(c) for c in row] for row in rows])
    manifest_path = path.with_suffix(".json")
    if manifest_path.exists():
        man = csvio.read_manifest(manifest_path)
        w, h = float(man["w"]), float(man["h"])
        a, b = float(man["a"]), float(man["b"])
        seed = int(man["seed"])
    else:  # fall back to bounds inferred from the data
        w, h = float(data[:, 0].max()), float(data[:, 1].max())
        a, b = 1.0, 0.5
        seed = 0
    chart = synth.SheetChart(Q=data[:, :2], W=w, H=h, seed=seed)
    return synth.Dataset(X=data[:, 2:], chart=chart, spiral=synth.SpiralParams(a=a, b=b))


def write_basis(path: Path, basis: dmap.DiffusionBasis) -> None:
    k = basis.n_modes
    header = [f"mode_{i}" for i in range(k)]
    csvio.write_csv(path, "basis", header, np.vstack([basis.lambdas, basis.psi]))
    csvio.write_manifest(path.with_suffix(".json"), {
        "schema": csvio.schema_tag("basis-manifest"),
        "k": k,
        "n": basis.psi.shape[0],
        "alpha": basis.config.alpha,
        "beta": basis.config.beta,
        "beta_rule": str(basis.config.beta_rule),
    })


@dataclass(frozen=True)
class BasisView:
    """lambdas + psi loaded from a basis CSV; enough for spectra and pairs."""

    lambdas: np.ndarray
    psi: np.ndarray

    @property
    def n_modes(self) -> int:
        return int(self.lambdas.shape[0])


def read_basis(path: Path) -> BasisView:
    _, rows = csvio.read_csv(path, "basis")
    data = np.array([[parse_float(c) for c in row] for row in rows])
    if data.shape[0] < 2:
        raise SchemaError(f"{path}: basis file needs an eigenvalue row plus data rows")
    return BasisView(lambdas=data[0], psi=data[1:])


def write_fit(path: Path, out: readout.ReadoutFit, method: str, d: int) -> None:
    csvio.write_manifest(path, {
        "schema": csvio.schema_tag("fit"),
        "method": method,
        "d": d,
        "ridge": out.fit.ridge,
        "L": out.fit.L.tolist(),
        "b": out.fit.b.tolist(),
        "frob_sq": out.frob_sq,
        "mse": out.mse,
        "rel_frob": out.rel_frob,
    })


def read_fit(path: Path) -> readout.ReadoutFit:
    man = csvio.read_manifest(path)
    if man.get("schema") != csvio.schema_tag("fit"):
        raise SchemaError(f"{path}: not a chartbench fit file")
    fit = AffineFit(L=np.array(man["L"], dtype=float), b=np.array(man["b"], dtype=float),
                    ridge=float(man["ridge"]))
    return readout.ReadoutFit(fit=fit, frob_sq=float(man["frob_sq"]), mse=float(man["mse"]),
                              rel_frob=float(man["rel_frob"]))


SCAN_COLUMNS = ("method", "d", "frob_sq", "mse", "rel_frob", "wall_ms", "status")


def write_scan(path: Path, table: readout.ScanTable) -> None:
    rows = [(r.method, r.d, r.frob_sq, r.mse, r.rel_frob, r.wall_ms, r.status) for r in table.rows]
    csvio.write_csv(path, "scan", SCAN_COLUMNS, rows)


def read_scan(path: Path) -> readout.ScanTable:
    _, rows = csvio.read_csv(path, "scan", SCAN_COLUMNS)
    out = [
        readout.ScanRow(r[0], int(r[1]), parse_float(r[2]), parse_float(r[3]),
                        parse_float(r[4]), parse_float(r[5]), r[6])
        for r in rows
    ]
    return readout.ScanTable(rows=tuple(out))


# ------------------------------------------------------------------ commands


def cmd_gen(args) -> int:
    seed = 7 if args.seed is None else args.seed
    chart = synth.sample_sheet(args.n, args.w, args.h, seed)
    ds = synth.roll(chart, synth.SpiralParams(a=args.a, b=args.b))
    write_dataset(Path(args.out), ds)
    print(f"wrote {args.out} ({args.n} points)")
    return EXIT_OK


def cmd_embed(args) -> int:
    ds = read_dataset(Path(args.infile))
    out = Path(args.out)
    if args.method == "dmap":
        cfg = dmap.KernelConfig(beta_rule=dmap.BetaRule.parse(args.beta), alpha=args.alpha)
        basis = dmap.fit_diffusion(ds.X, cfg, k=args.kmax)
        write_basis(out, basis)
        print(f"wrote {out} (k={args.kmax}, beta={basis.config.beta:.6g})")
        return EXIT_OK
    if args.method == "isomap":
        emb = isomap.classical_mds(isomap.geodesics(isomap.knn_graph(ds.X, args.k)), args.d)
    else:
        fuzzy = umaplite.build_fuzzy_graph(ds.X, args.k)
        seed = 7 if args.seed is None else args.seed
        emb = umaplite.optimize_layout(fuzzy, args.d, epochs=args.epochs, seed=seed)
    header = [f"c{i}" for i in range(emb.d)]
    csvio.write_csv(out, "embedding", header, emb.U)
    csvio.write_manifest(out.with_suffix(".json"), {
        "schema": csvio.schema_tag("embedding-manifest"),
        "method": emb.method, "d": emb.d,
        "meta": {k: (v if isinstance(v, (int, float, str, bool)) else str(v))
                 for k, v in emb.meta.items()},
    })
    print(f"wrote {out} ({emb.method}, d={emb.d})")
    return EXIT_OK


def cmd_scan(args) -> int:
    ds = read_dataset(Path(args.infile))
    params = readout.ScanParams(
        beta_rule=args.beta, alpha=args.alpha, isomap_k=args.isomap_k,
        umap_k=args.umap_k, umap_epochs=args.epochs, umap_seed=args.umap_seed,
        ridge=args.ridge, threads=1 if args.threads is None else args.threads,
    )
    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    table = readout.run_scan(ds, _parse_dims(args.dims), methods, params)
    write_scan(Path(args.out), table)
    n_fail = sum(not r.ok for r in table.rows)
    print(f"wrote {args.out} ({len(table.rows)} rows, {n_fail} failed)")
    return EXIT_OK


def cmd_spectra(args) -> int:
    basis = read_basis(Path(args.basis))
    if args.fit and Path(args.fit).exists() and not args.data:
        fit = read_fit(Path(args.fit))
    elif args.data:
        ds = read_dataset(Path(args.data))
        d = args.d if args.d is not None else basis.n_modes - 1
        emb_U = basis.psi[:, 1 : d + 1]
        fit = readout.fit_oracle(Embedding(U=emb_U, method="dmap", d=d), ds.chart.Q, args.ridge)
        if args.fit:
            write_fit(Path(args.fit), fit, "dmap", d)
    else:
        raise ValueError("spectra needs --fit (existing fit.json) or --data (dataset to fit)")
    spectrum = diagnostics.readout_spectrum(fit, basis)
    rows = zip(spectrum.mode, spectrum.one_minus_lambda,
               spectrum.coeff_mag_s, spectrum.coeff_mag_h)
    csvio.write_csv(Path(args.out), "spectra",
                    ("mode", "one_minus_lambda", "coeff_mag_s", "coeff_mag_h"), rows)
    print(f"wrote {args.out} ({len(spectrum.mode)} modes)")
    return EXIT_OK


def cmd_pairs(args) -> int:
    basis = read_basis(Path(args.basis))
    ds = read_dataset(Path(args.data))
    partners = _parse_partners(args.partners)
    report = diagnostics.pair_charts(basis, args.base, partners, ds.chart.Q)
    out = Path(args.out)
    csvio.write_csv(out, "pairs", ("base", "partner", "novelty", "pair_rel_frob"),
                    [(report.base_mode, int(p), n, r)
                     for p, n, r in zip(report.partners, report.novelty, report.pair_rel_frob)])
    points_path = Path(args.points_out) if args.points_out else out.with_name(out.stem + "_points.csv")
    pts_rows = []
    for col, p in enumerate(report.partners):
        for i in range(report.base_coords.shape[0]):
            pts_rows.append((int(p), report.base_coords[i], report.partner_coords[i, col]))
    csvio.write_csv(points_path, "pairs-points", ("partner", "base_value", "partner_value"), pts_rows)
    if args.svg_out:
        svgplot.save_svg(Path(args.svg_out), _pairs_svg(report, color_by=ds.chart.Q[:, 0]))
    best = report.best_partner()
    print(f"wrote {out} and {points_path}; best partner {best} "
          f"(rel_frob {report.pair_rel_frob[list(report.partners).index(best)]:.4f})")
    return EXIT_OK


def _pairs_svg(report: diagnostics.PairChartReport, color_by=None) -> str:
    panels = [
        svgplot.ScatterPanel(
            title=f"mode {report.base_mode} vs {int(p)} "
                  f"(nov {report.novelty[i]:.2f}, rel {report.pair_rel_frob[i]:.3f})",
            x=report.base_coords,
            y=report.partner_coords[:, i],
            color_by=color_by,
        )
        for i, p in enumerate(report.partners)
    ]
    return svgplot.scatter_grid(panels, "mode-pair charts", n_cols=5)


def cmd_rank(args) -> int:
    ds = read_dataset(Path(args.infile))
    X = ds.X[: args.rank_n] if args.rank_n else ds.X
    report = diagnostics.rank_scan(pairwise_sq_dists(X), _parse_beta_grid(args.beta_grid), args.tau)
    out = Path(args.out)
    csvio.write_csv(out, "rank", ("beta", "threshold_rank", "stable_rank", "entropy_rank"),
                    [(r.beta, r.threshold_rank, r.stable_rank, r.entropy_rank) for r in report.rows])
    csvio.write_manifest(out.with_suffix(".json"), {
        "schema": csvio.schema_tag("rank-manifest"),
        "n": int(X.shape[0]),
        "tau": args.tau,
        "weyl_slope": report.weyl_slope,
        "weyl_window": list(report.weyl_window) if report.weyl_window else None,
        "fit_r2": report.fit_r2,
    })
    slope = "absent" if report.weyl_slope is None else f"{report.weyl_slope:.3f}"
    print(f"wrote {out} (weyl slope {slope})")
    return EXIT_OK


def cmd_plot_scan(args) -> int:
    table = read_scan(Path(args.infile))
    ok = [r for r in table.rows if r.ok]
    if not ok:
        raise ValueError(f"{args.infile}: no successful rows to plot")
    series = []
    for method in readout.METHOD_ORDER:
        rows = sorted((r for r in ok if r.method == method), key=lambda r: r.d)
        if rows:
            series.append(svgplot.LineSeries(
                label=method, x=[r.d for r in rows], y=[r.frob_sq for r in rows]))
    dims = sorted({r.d for r in ok})
    svg = svgplot.loglog_plot(series, "chart readout error vs latent dimension",
                              "d", "squared Frobenius error", x_ticks=dims)
    svgplot.save_svg(Path(args.out), svg)
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_plot_pairs(args) -> int:
    _, rows = csvio.read_csv(Path(args.infile), "pairs-points",
                             ("partner", "base_value", "partner_value"))
    by_partner: dict[int, list[tuple[float, float]]] = {}
    for r in rows:
        by_partner.setdefault(int(r[0]), []).append((parse_float(r[1]), parse_float(r[2])))
    if not by_partner:
        raise ValueError(f"{args.infile}: no scatter points")
    panels = [
        svgplot.ScatterPanel(title=f"partner {p}", x=[q[0] for q in pts], y=[q[1] for q in pts])
        for p, pts in sorted(by_partner.items())
    ]
    svgplot.save_svg(Path(args.out), svgplot.scatter_grid(panels, "mode-pair charts", n_cols=5))
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    file_values = load_config_file(args.config) if args.config else {}
    overrides = {
        key: getattr(args, key)
        for key in ("n", "seed", "out_dir", "threads", "beta", "alpha")
        if getattr(args, key, None) is not None
    }
    if getattr(args, "no_plots", False):
        overrides["plots"] = False
    cfg = config_from_sources(file_values, overrides)
    out_dir = Path(cfg.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    t_start = time.perf_counter()

    import numba
    import scipy

    manifest: dict[str, Any] = {
        "schema": csvio.schema_tag("run-manifest"),
        "versions": {
            "chartbench": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "numba": numba.__version__,
            "python": sys.version.split()[0],
        },
        **asdict(cfg),
    }
    csvio.write_manifest(out_dir / "manifest.json", manifest)

    stage_failures: list[str] = []

    def stage(name, fn):
        t0 = time.perf_counter()
        try:
            result = fn()
        except Exception as exc:  # noqa: BLE001 - completed stages are preserved
            stage_failures.append(f"{name}: {type(exc).__name__}: {exc}")
            print(f"[chartbench] stage {name} FAILED: {exc}", file=sys.stderr)
            return None
        print(f"[chartbench] {name} done in {time.perf_counter() - t0:.1f}s")
        return result

    # 1. dataset
    def make_dataset():
        chart = synth.sample_sheet(cfg.n, cfg.w, cfg.h, cfg.seed)
        ds = synth.roll(chart, synth.SpiralParams(a=cfg.a, b=cfg.b))
        write_dataset(out_dir / "dataset.csv", ds)
        return ds

    ds = stage("dataset", make_dataset)
    if ds is None:
        return EXIT_NUMERIC

    # 2. diffusion basis (reused by scan analogues, spectra, pairs)
    def make_basis():
        kcfg = dmap.KernelConfig(beta_rule=dmap.BetaRule.parse(cfg.beta), alpha=cfg.alpha)
        basis = dmap.fit_diffusion(ds.X, kcfg, k=cfg.kmax)
        write_basis(out_dir / "basis.csv", basis)
        return basis

    basis = stage("diffusion basis", make_basis)

    # 3. scan
    def make_scan():
        params = readout.ScanParams(
            beta_rule=cfg.beta, alpha=cfg.alpha, isomap_k=cfg.isomap_k,
            umap_k=cfg.umap_k, umap_epochs=cfg.umap_epochs, umap_seed=cfg.umap_seed,
            threads=cfg.threads,
        )
        table = readout.run_scan(ds, cfg.dims_list(), readout.METHOD_ORDER, params)
        write_scan(out_dir / "scan.csv", table)
        return table

    table = stage("scan", make_scan)
    if table is not None and cfg.plots:
        stage("scan plot", lambda: cmd_plot_scan(argparse.Namespace(
            infile=str(out_dir / "scan.csv"), out=str(out_dir / "error.svg"))))

    # 4. reconstruction grids (truth leftmost, then the requested dims)
    if cfg.plots:
        def make_recon():
            recon_dims = cfg.recon_dims_list()
            panels = [svgplot.ScatterPanel(title="truth", x=ds.chart.Q[:, 0],
                                           y=ds.chart.Q[:, 1], color_by=ds.chart.Q[:, 0])]
            params = readout.ScanParams(
                beta_rule=cfg.beta, alpha=cfg.alpha, isomap_k=cfg.isomap_k,
                umap_k=cfg.umap_k, umap_epochs=cfg.umap_epochs, umap_seed=cfg.umap_seed)
            geo = isomap.geodesics(isomap.knn_graph(ds.X, cfg.isomap_k))
            fuzzy = umaplite.build_fuzzy_graph(ds.X, cfg.umap_k)
            for method in readout.METHOD_ORDER:
                for d in recon_dims:
                    if method == "dmap":
                        emb = dmap.truncate(basis, d)
                    elif method == "isomap":
                        emb = isomap.classical_mds(geo, d)
                    else:
                        emb = umaplite.optimize_layout(fuzzy, d, epochs=cfg.umap_epochs,
                                                       seed=cfg.umap_seed)
                    fit = readout.fit_oracle(emb, ds.chart.Q)
                    qhat = readout.predict(fit.fit, emb.U)
                    panels.append(svgplot.ScatterPanel(
                        title=f"{method} d={d} (rel {fit.rel_frob:.3f})",
                        x=qhat[:, 0], y=qhat[:, 1], color_by=ds.chart.Q[:, 0]))
            svg = svgplot.scatter_grid(panels, "affine chart reconstructions",
                                       n_cols=len(recon_dims) + 1)
            svgplot.save_svg(out_dir / "reconstructions.svg", svg)

        if basis is not None:
            stage("reconstruction grid", make_recon)

    # 5. readout spectra from the full-basis fit
    def make_spectra():
        d = basis.n_modes - 1
        emb = dmap.truncate(basis, d)
        fit = readout.fit_oracle(emb, ds.chart.Q)
        write_fit(out_dir / "fit_dmap_full.json", fit, "dmap", d)
        spectrum = diagnostics.readout_spectrum(fit, basis)
        csvio.write_csv(out_dir / "spectra.csv", "spectra",
                        ("mode", "one_minus_lambda", "coeff_mag_s", "coeff_mag_h"),
                        zip(spectrum.mode, spectrum.one_minus_lambda,
                            spectrum.coeff_mag_s, spectrum.coeff_mag_h))

    if basis is not None:
        stage("readout spectra", make_spectra)

    # 6. mode-pair charts
    def make_pairs():
        partners = _parse_partners(cfg.partners)
        report = diagnostics.pair_charts(basis, cfg.base_mode, partners, ds.chart.Q)
        csvio.write_csv(out_dir / "pairs.csv", "pairs",
                        ("base", "partner", "novelty", "pair_rel_frob"),
                        [(report.base_mode, int(p), nv, rl) for p, nv, rl in
                         zip(report.partners, report.novelty, report.pair_rel_frob)])
        pts = []
        for col, p in enumerate(report.partners):
            for i in range(report.base_coords.shape[0]):
                pts.append((int(p), report.base_coords[i], report.partner_coords[i, col]))
        csvio.write_csv(out_dir / "pairs_points.csv", "pairs-points",
                        ("partner", "base_value", "partner_value"), pts)
        if cfg.plots:
            svgplot.save_svg(out_dir / "pairs.svg", _pairs_svg(report, color_by=ds.chart.Q[:, 0]))

    if basis is not None:
        stage("mode pairs", make_pairs)

    # 7. rank sweep (on a deterministic prefix of the cloud)
    def make_rank():
        X = ds.X[: cfg.rank_n] if cfg.rank_n else ds.X
        report = diagnostics.rank_scan(pairwise_sq_dists(X), _parse_beta_grid(cfg.beta_grid), cfg.tau)
        csvio.write_csv(out_dir / "rank.csv", "rank",
                        ("beta", "threshold_rank", "stable_rank", "entropy_rank"),
                        [(r.beta, r.threshold_rank, r.stable_rank, r.entropy_rank)
                         for r in report.rows])
        csvio.write_manifest(out_dir / "rank.json", {
            "schema": csvio.schema_tag("rank-manifest"),
            "n": int(X.shape[0]), "tau": cfg.tau,
            "weyl_slope": report.weyl_slope,
            "weyl_window": list(report.weyl_window) if report.weyl_window else None,
            "fit_r2": report.fit_r2,
        })

    stage("rank sweep", make_rank)

    elapsed = time.perf_counter() - t_start
    if stage_failures:
        print(f"[chartbench] reproduce finished with failures in {elapsed:.0f}s:", file=sys.stderr)
        for line in stage_failures:
            print(f"  - {line}", file=sys.stderr)
        return EXIT_NUMERIC
    print(f"[chartbench] reproduce complete in {elapsed:.0f}s -> {out_dir}")
    return EXIT_OK


# ------------------------------------------------------------------- parsing


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="chartbench", description=__doc__)
    parser.add_argument("--version", action="version", version=f"chartbench {__version__}")
    # global flags; subcommands re-declare the ones they use with SUPPRESS so
    # either position works and a subcommand-level value wins
    parser.add_argument("--threads", type=int, default=None)
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out-dir", dest="out_dir", default=None)
    parser.add_argument("--config", default=None)
    sub = parser.add_subparsers(dest="command", required=True)
    SUP = argparse.SUPPRESS

    p = sub.add_parser("gen", help="generate the Swiss-roll dataset")
    p.add_argument("--n", type=int, default=2000)
    p.add_argument("--w", type=float, default=60.0)
    p.add_argument("--h", type=float, default=10.0)
    p.add_argument("--a", type=float, default=1.0)
    p.add_argument("--b", type=float, default=0.5)
    p.add_argument("--seed", type=int, default=SUP)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_gen)

    p = sub.add_parser("embed", help="compute one embedding / diffusion basis")
    p.add_argument("--method", choices=("dmap", "isomap", "umap"), required=True)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--kmax", type=int, default=1025, help="dmap: modes to keep")
    p.add_argument("--beta", default="median:50", help="dmap: explicit value or median:<c>")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--k", type=int, default=10, help="isomap/umap: neighbor count")
    p.add_argument("--d", type=int, default=2, help="isomap/umap: target dimension")
    p.add_argument("--epochs", type=int, default=200, help="umap: optimization epochs")
    p.add_argument("--seed", type=int, default=SUP, help="umap: layout seed")
    p.set_defaults(fn=cmd_embed)

    p = sub.add_parser("scan", help="dimension scan over methods")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--dims", default="1,2,3,4,5,6,7,8,16,32,64,128,256,512,1024")
    p.add_argument("--methods", default="dmap,isomap,umap")
    p.add_argument("--beta", default="median:50")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--isomap-k", type=int, default=10)
    p.add_argument("--umap-k", type=int, default=15)
    p.add_argument("--epochs", type=int, default=200)
    p.add_argument("--umap-seed", type=int, default=7)
    p.add_argument("--ridge", type=float, default=None)
    p.add_argument("--threads", type=int, default=SUP)
    p.set_defaults(fn=cmd_scan)

    p = sub.add_parser("spectra", help="readout coefficient spectrum")
    p.add_argument("--basis", required=True)
    p.add_argument("--fit", help="fit.json to read (or write when --data is given)")
    p.add_argument("--data", help="dataset CSV; compute the oracle fit inline")
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--ridge", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_spectra)

    p = sub.add_parser("pairs", help="mode-pair charts and novelty scores")
    p.add_argument("--basis", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--base", type=int, default=0)
    p.add_argument("--partners", default="1:10")
    p.add_argument("--out", required=True)
    p.add_argument("--points-out", default=None)
    p.add_argument("--svg-out", default=None)
    p.set_defaults(fn=cmd_pairs)

    p = sub.add_parser("rank", help="effective-rank sweep over kernel scales")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--beta-grid", default="1e-6:1e4:25")
    p.add_argument("--tau", type=float, default=1e-3)
    p.add_argument("--rank-n", type=int, default=0, help="use only the first n rows (0 = all)")
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_rank)

    p = sub.add_parser("plot-scan", help="render scan.csv as a log-log SVG")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_plot_scan)

    p = sub.add_parser("plot-pairs", help="render pairs_points.csv as scatter grid")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(fn=cmd_plot_pairs)

    p = sub.add_parser("reproduce", help="run the full benchmark pipeline")
    p.add_argument("--config", default=SUP, help="key=value file or a manifest.json")
    p.add_argument("--out-dir", dest="out_dir", default=SUP)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--seed", type=int, default=SUP)
    p.add_argument("--threads", type=int, default=SUP)
    p.add_argument("--beta", default=None)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--no-plots", action="store_true")
    p.set_defaults(fn=cmd_reproduce)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except DisconnectedGraphError as exc:
        print(f"chartbench: disconnected graph ({exc.components} components)", file=sys.stderr)
        return EXIT_DISCONNECTED
    except (SchemaError, ValueError, FileNotFoundError) as exc:
        print(f"chartbench: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (np.linalg.LinAlgError, FloatingPointError, ArithmeticError) as exc:
        print(f"chartbench: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
