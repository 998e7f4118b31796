"""Main orchestrator for SCLV Lab runs."""

import logging
import time
from pathlib import Path
from typing import Any, Callable, Optional, Union

import numpy as np

from .config import CutConfig, MetricConfig, RunConfig, Settings, get_settings
from .exceptions import ConfigError, UnsupportedModeError
from .families import (
    ConformalData,
    GRWData,
    build_conformal_metric,
    build_grw_metric,
    euclidean,
    grw_from_params,
    grw_ricci_conditions,
    grw_sectional_conditions,
    lorentzian_space_form,
    minkowski,
    riemannian_space_form,
)
from .formatters import ReportFormatter
from .geometry import CoordinateMetric, ModelConstants
from .models import (
    ComparisonVerdict,
    ExpansionReport,
    SignatureMode,
    TheoremKind,
    VerdictStatus,
)
from .verifiers import (
    check_bishop,
    check_bishop_gromov,
    check_flat_corollary,
    check_guenther,
    fit_detA_expansion,
    fit_jacobi_expansion,
    local_comparison,
    ratio_sum_counterexample,
    riemannian_ball_comparison,
    search_ratio_violation,
    two_level_family,
)
from .volumes import (
    ConstantCut,
    CutFunction,
    SCLVSpec,
    TableCut,
    TwoLevelCut,
    mc_volume_oracle,
    ratio_curve,
    solve_directions,
    summarize_volume,
)

logger = logging.getLogger(__name__)

COMMANDS = ("volume", "verify", "ratio", "expand", "counterexample", "search", "oracle")


def build_metric(config: MetricConfig) -> tuple[CoordinateMetric, np.ndarray, Optional[GRWData]]:
    """Instantiate a builtin metric family.

    Returns:
        Tuple (metric, base point, GRW data when the family is GRW).
    """
    grw: Optional[GRWData] = None
    if config.family == "grw":
        assert config.f is not None and config.m is not None
        grw = grw_from_params(
            config.f.form, tuple(config.f.coeffs), config.m, config.k_F, config.interval
        )
        metric = build_grw_metric(grw)
        p = grw.base_point()
    elif config.family == "conformal":
        conf = ConformalData(config.a, config.n, config.base)
        metric = build_conformal_metric(conf)
        p = conf.base_point
    else:
        n = config.n
        builders: dict[str, Callable[[], CoordinateMetric]] = {
            "minkowski": lambda: minkowski(n),
            "euclidean": lambda: euclidean(n),
            "space_form": lambda: riemannian_space_form(config.c, n),
            "lorentzian_space_form": lambda: lorentzian_space_form(config.c, n),
        }
        metric = builders[config.family]()
        p = np.zeros(n)

    if config.base_point is not None:
        if len(config.base_point) != metric.dim:
            raise ConfigError(
                f"base_point has {len(config.base_point)} coordinates, metric has {metric.dim}",
                field="metric.base_point",
            )
        p = np.asarray(config.base_point, dtype=float)
    logger.info(f"Built metric {metric.name} at base point {p.tolist()}")
    return metric, p, grw


def build_cut(config: CutConfig) -> CutFunction:
    if config.form == "table":
        return TableCut(tuple(config.values))
    if config.form == "two_level":
        return TwoLevelCut(config.low, config.high, config.width)
    return ConstantCut(config.value)


def build_spec(config: RunConfig) -> SCLVSpec:
    """SCLV/SCV description from the ``sclv`` section."""
    s = config.sclv
    return SCLVSpec(
        ModelConstants(s.c, s.dim, s.mode),
        build_cut(s.cut),
        chi_max=s.chi_max,
        scale_bound=s.scale_bound,
        rapidity_panels=s.rapidity_panels,
        azimuth_nodes=s.azimuth_nodes,
        polar_nodes=s.polar_nodes,
    )


class LabOrchestrator:
    """Runs one lab command on a validated configuration and writes its reports."""

    def __init__(
        self,
        config: RunConfig,
        settings: Optional[Settings] = None,
        threads: Optional[int] = None,
    ) -> None:
        """Initialize the orchestrator.

        Args:
            config: Validated run configuration.
            settings: Process settings. Loads from env if not provided.
            threads: Override the worker thread count from the settings.
        """
        self.config = config
        self.settings = settings or get_settings()
        self.threads = threads or self.settings.threads
        self.tol = config.tolerances.integrator or self.settings.default_tol
        self.config_hash = config.config_hash
        self.formatter = ReportFormatter()

        self.metric, self.p, self.grw = build_metric(config.metric)
        self.spec = build_spec(config)

    @property
    def theorem_c(self) -> float:
        c = self.config.theorem.c
        return self.spec.consts.c if c is None else c

    def run_volume(self) -> dict[str, Any]:
        runs = solve_directions(self.spec, self.metric, self.p, 1.0, self.tol, self.threads)
        report = summarize_volume(self.spec, runs)
        report.config_hash = self.config_hash
        dumps = {}
        for k in self.config.output.dump_directions:
            if not 0 <= k < len(runs) or runs[k].solution is None:
                logger.warning(f"No solved direction with index {k} to dump")
                continue
            solution = runs[k].solution
            assert solution is not None
            dumps[f"direction_{k}"] = solution
        logger.info(f"vol(U)={report.vol_U:.12g}, vol(U0)={report.vol_U0:.12g}")
        return {"report": report, "dumps": dumps}

    def _grw_conditions(self, theorem: TheoremKind) -> Optional[Any]:
        if self.grw is None:
            return None
        if theorem is TheoremKind.GUENTHER:
            return grw_sectional_conditions(self.grw, self.theorem_c)
        return grw_ricci_conditions(self.grw, self.theorem_c)

    def run_verify(self) -> dict[str, Any]:
        th = self.config.theorem
        tols = self.config.tolerances
        spec, metric, p = self.spec, self.metric, self.p
        verdict: ComparisonVerdict
        if th.name is TheoremKind.GUENTHER:
            verdict = check_guenther(
                spec, metric, p, th.c, self.tol, tols.audit, tols.slack, self.threads
            )
        elif th.name is TheoremKind.BISHOP:
            verdict = check_bishop(
                spec, metric, p, th.c, self.tol, tols.audit, tols.slack, self.threads
            )
        elif th.name is TheoremKind.FLAT_COROLLARY:
            verdict = check_flat_corollary(
                [spec], metric, p, self.tol, tols.audit, tols.slack, self.threads
            )[0]
        else:
            assert th.condition is not None
            verdict = check_bishop_gromov(
                spec,
                metric,
                p,
                th.c,
                th.r_grid,
                th.condition,
                self.tol,
                tols.audit,
                tols.monotone_slack,
                self.threads,
            )
        verdict.config_hash = self.config_hash
        return {"report": verdict, "grw_conditions": self._grw_conditions(th.name)}

    def run_ratio(self) -> dict[str, Any]:
        r_grid = self.config.theorem.r_grid
        curve = ratio_curve(self.spec, self.metric, self.p, r_grid, self.tol, self.threads)
        curve.config_hash = self.config_hash
        return {"report": curve}

    def run_expand(self) -> dict[str, Any]:
        cfg = self.config.expand
        runs = solve_directions(self.spec, self.metric, self.p, 1.0, self.tol, self.threads)
        basis, _ = self.metric.orthonormal_basis(self.p)
        ricci = self.metric.ricci(self.p)
        report = ExpansionReport(config_hash=self.config_hash)
        for run in runs:
            if run.solution is None:
                continue
            report.fits.append(fit_detA_expansion(run.solution, cfg.window))
            v = basis @ run.direction
            report.ricci_metric.append(float(v @ ricci @ v))
        first = next((run.solution for run in runs if run.solution is not None), None)
        if first is not None:
            report.jacobi = [fit_jacobi_expansion(first, i, cfg.window) for i in range(first.size)]

        if cfg.compare_with is not None:
            other, p2, _ = build_metric(cfg.compare_with)
            if cfg.ball_radii:
                if self.spec.mode is not SignatureMode.RIEMANNIAN:
                    raise UnsupportedModeError("ball comparison needs sclv.mode = riemannian")
                report.ball_comparison = riemannian_ball_comparison(
                    self.metric,
                    other,
                    self.p,
                    p2,
                    cfg.ball_radii,
                    self.tol,
                    self.spec.polar_nodes,
                    self.spec.azimuth_nodes,
                    self.threads,
                )
            else:
                report.local_comparison = local_comparison(
                    self.metric,
                    other,
                    self.p,
                    p2,
                    self.spec,
                    t_window=cfg.t_window,
                    tol=self.tol,
                    threads=self.threads,
                )
        logger.info(f"Expansion fits on {len(report.fits)} directions")
        return {"report": report}

    def run_counterexample(self) -> dict[str, Any]:
        return {"report": ratio_sum_counterexample()}

    def run_search(self) -> dict[str, Any]:
        search = self.config.search
        if search is None:
            raise ConfigError("search command needs a 'search' section", field="search")
        family = two_level_family(
            self.metric,
            self.p,
            search.c_values,
            search.cut_pairs,
            search.chi_max,
            self.spec,
            label=self.config.metric.family,
            width=search.width,
        )
        report = search_ratio_violation(
            family,
            self.config.theorem.r_grid,
            search.budget,
            self.tol,
            self.config.tolerances.audit,
            search.threshold,
            self.threads,
        )
        report.config_hash = self.config_hash
        return {"report": report}

    def run_oracle(self, seed: Optional[int] = None) -> dict[str, Any]:
        cfg = self.config.oracle
        seed = cfg.seed if seed is None else seed
        result = mc_volume_oracle(
            self.spec, self.metric, self.p, cfg.samples, seed, cfg.scale, self.tol
        )
        result.config_hash = self.config_hash
        runs = solve_directions(self.spec, self.metric, self.p, cfg.scale, self.tol, self.threads)
        quadrature = summarize_volume(self.spec, runs, cfg.scale)
        covered = result.covers(quadrature.vol_U)
        if not covered:
            logger.warning(
                f"Quadrature volume {quadrature.vol_U:.10g} outside the oracle interval "
                f"[{result.ci_low:.10g}, {result.ci_high:.10g}]"
            )
        return {"report": result, "quadrature": quadrature, "covered": covered}

    def run(self, command: str, seed: Optional[int] = None) -> dict[str, Any]:
        """Run one command.

        Args:
            command: One of ``COMMANDS``.
            seed: Override the oracle seed.

        Returns:
            Dict with 'report', command-specific extras and 'stats'.
        """
        if command not in COMMANDS:
            raise ConfigError(f"unknown command '{command}'")
        logger.info(f"Starting {command} on {self.metric.name} (config {self.config_hash[:12]})")
        start_time = time.perf_counter()

        if command == "oracle":
            result = self.run_oracle(seed)
        else:
            result = getattr(self, f"run_{command}")()

        elapsed = time.perf_counter() - start_time
        result["command"] = command
        result["stats"] = {"elapsed_seconds": elapsed, "threads": self.threads, "tol": self.tol}
        logger.info(f"{command} complete in {elapsed:.1f}s")
        return result

    def write_outputs(
        self,
        result: dict[str, Any],
        out_dir: Optional[Union[str, Path]] = None,
        fmt: Optional[str] = None,
    ) -> list[Path]:
        """Write JSON and CSV files for a command result.

        Returns:
            Paths of the written files.
        """
        out = Path(out_dir or self.config.output.out_dir)
        fmt = fmt or self.config.output.format
        out.mkdir(parents=True, exist_ok=True)
        command = result["command"]
        report = result["report"]
        written: list[Path] = []

        def emit(name: str, text: str) -> None:
            path = out / name
            with open(path, "w", encoding="utf-8", newline="\n") as f:
                f.write(text)
            written.append(path)

        if fmt in ("json", "both"):
            payload: dict[str, Any] = {"report": report}
            for key in ("grw_conditions", "quadrature", "covered"):
                if result.get(key) is not None:
                    payload[key] = result[key]
            emit(f"{command}.json", self.formatter.to_json(payload))

        if fmt in ("csv", "both"):
            f = self.formatter
            if command == "volume":
                emit("volume_directions.csv", f.per_direction_csv(report))
                for name, solution in result.get("dumps", {}).items():
                    emit(f"{name}.csv", f.direction_dump_csv(solution))
            elif command == "ratio":
                emit("ratio.csv", f.ratio_csv(report))
            elif command == "verify" and report.ratio_curve is not None:
                emit("ratio.csv", f.ratio_csv(report.ratio_curve))
            elif command == "expand":
                emit("expand.csv", f.expansion_csv(report))
            elif command == "search":
                emit("search.csv", f.search_csv(report))

        for path in written:
            logger.info(f"Wrote {path}")
        return written


def verdict_status(result: dict[str, Any]) -> Optional[VerdictStatus]:
    """Status of a verify result, if the command produced a verdict."""
    report = result.get("report")
    if isinstance(report, ComparisonVerdict):
        return report.status
    return None
