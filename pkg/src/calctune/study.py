"""End-to-end tuning study: sample networks, compute norms, tune, summarise.

Every stage has an in-memory function and a file form, and the full run is
just the stages chained through their file forms' contents, so a report
rebuilt from persisted files matches the one from a fresh run exactly.
"""
import logging
import math
import os
from dataclasses import dataclass, field

import numpy as np

from . import io
from .calculi import CALCULI, evaluate
from .core import additivity_factor
from .errors import CalctuneError
from .mce import DEFAULT_GRID, mce_update, probe_grid
from .sampler import DEFAULT_COUNT, SamplerConfig, sample_tables
from .stats import network_rmse, ols_fit, pearson, rm_anova_f
from .tuner import ProblemSet, TunerConfig, tune

log = logging.getLogger(__name__)

FILES = {
    "networks": "networks.csv",
    "norms": "norms.csv",
    "tuned": "tuned_params.json",
    "rmse": "per_network_rmse.csv",
    "report_md": "report.md",
    "report_json": "report.json",
}


class StageError(CalctuneError):
    """A pipeline stage failed; the message names the stage and the item."""

    def __init__(self, stage, message):
        super().__init__("[%s] %s" % (stage, message))
        self.stage = stage


@dataclass(frozen=True)
class StudyConfig:
    seed: int = 0
    networks: int = DEFAULT_COUNT
    grid: tuple = DEFAULT_GRID
    methods: tuple = CALCULI
    restarts: int = 4
    mycin_clamp: bool = False
    networks_path: str = None
    out_dir: str = None

    def tuner_config(self):
        return TunerConfig(restarts=self.restarts, seed=self.seed, mycin_clamp=self.mycin_clamp)


@dataclass(frozen=True)
class NetworkNorms:
    problems: ProblemSet
    iterations: np.ndarray
    residuals: np.ndarray


@dataclass(frozen=True)
class NetworkResult:
    network_id: str
    additivity: float
    rmse: dict
    params: dict = field(repr=False)


@dataclass(frozen=True)
class StudyReport:
    methods: tuple
    average: dict
    high: dict
    low: dict
    pooled: dict
    correlations: np.ndarray
    regressions: dict
    anova: object
    independence_exceptions: int
    metadata: dict
    results: tuple = field(repr=False, default=())

    def to_json(self):
        corr = {a: {b: float(self.correlations[i, j]) for j, b in enumerate(self.methods)}
                for i, a in enumerate(self.methods)}
        an = self.anova
        anova = None
        if an is not None:
            anova = {
                "f": an.f if math.isfinite(an.f) else None,
                "df1": an.df1, "df2": an.df2, "p_value": an.p_value,
                "ss_conditions": an.ss_conditions, "ss_subjects": an.ss_subjects,
                "ss_error": an.ss_error, "sentinel": an.sentinel,
            }
        return {
            "metadata": self.metadata,
            "table1": {m: {"average": self.average[m], "high": self.high[m],
                           "low": self.low[m], "pooled": self.pooled[m]}
                       for m in self.methods},
            "table2": corr,
            "regressions": {m: {"slope": s, "intercept": b}
                            for m, (s, b) in self.regressions.items()},
            "anova": anova,
            "independence_exceptions": self.independence_exceptions,
        }

    def to_markdown(self):
        lines = ["# Tuned inference calculi: accuracy against the cross-entropy norm", ""]
        md = self.metadata
        lines.append("Networks: %d, probes per network: %d, seed: %s, restarts: %d, "
                     "MYCIN clamp: %s" % (md["networks"], md["problems_per_network"],
                                          md["seed"], md["restarts"], md["mycin_clamp"]))
        lines += ["", "## Root mean squared errors", "",
                  "| Inference method | Average RMSE | High RMSE | Low RMSE | Pooled RMSE |",
                  "|---|---|---|---|---|"]
        for m in self.methods:
            lines.append("| %s | %.5f | %.5f | %.5f | %.5f |" % (
                m, self.average[m], self.high[m], self.low[m], self.pooled[m]))
        lines += ["", "## Pearson correlations between per-network RMSEs", "",
                  "| | " + " | ".join(self.methods) + " |",
                  "|---" * (len(self.methods) + 1) + "|"]
        for i, a in enumerate(self.methods):
            cells = ["--" if j == i else ("%.4f" % self.correlations[i, j] if j > i else "")
                     for j in range(len(self.methods))]
            lines.append("| %s | %s |" % (a, " | ".join(cells)))
        if self.regressions:
            lines += ["", "## RMSE regressed on additivity factor", ""]
            for m, (s, b) in self.regressions.items():
                lines.append("- %s RMSE = %.4f * additivity + %.5f" % (m, s, b))
        if self.anova is not None:
            an = self.anova
            f_text = {"not_significant": "undefined (no variance)",
                      "infinite": "inf (zero error term)"}.get(an.sentinel, "%.2f" % an.f)
            lines += ["", "## Repeated-measures ANOVA across methods", "",
                      "F(%d,%d) = %s, p = %.3g" % (an.df1, an.df2, f_text, an.p_value)]
        lines += ["", "Networks where a calculus beat independence by more than 1e-9: %d"
                  % self.independence_exceptions, ""]
        return "\n".join(lines)


# ---------------------------------------------------------------------------
# stages
# ---------------------------------------------------------------------------


def generate_networks(seed, count):
    tables = sample_tables(SamplerConfig(seed=seed, count=count))
    return [str(i) for i in range(count)], tables


def solve_norms(ids, tables, grid=DEFAULT_GRID):
    """Cross-entropy posteriors for every network at every grid probe."""
    probes = probe_grid(grid)
    norms = {}
    for nid, table in zip(ids, tables):
        sols = []
        for probe in probes:
            try:
                sols.append(mce_update(table, probe))
            except CalctuneError as exc:
                raise StageError("solve", "network %s, probe (%r, %r): %s"
                                 % (nid, probe.p1, probe.p2, exc)) from exc
        norms[nid] = NetworkNorms(
            problems=ProblemSet.from_probes(probes, [s.posterior_c for s in sols]),
            iterations=np.array([s.iterations for s in sols]),
            residuals=np.array([s.residual for s in sols]),
        )
    return norms


def norm_rows(ids, norms):
    for nid in ids:
        n = norms[nid]
        ps = n.problems
        for k in range(len(ps)):
            yield nid, ps.p1[k], ps.p2[k], ps.targets[k], n.iterations[k], n.residuals[k]


def norms_from_rows(grouped):
    return {
        nid: NetworkNorms(
            problems=ProblemSet(np.array([r[0] for r in rows]), np.array([r[1] for r in rows]),
                                np.array([r[2] for r in rows])),
            iterations=np.array([r[3] for r in rows]),
            residuals=np.array([r[4] for r in rows]),
        )
        for nid, rows in grouped.items()
    }


def tune_networks(ids, tables, norms, methods=CALCULI, config=TunerConfig()):
    """Tune each requested calculus on each network; ``{id: {calculus: TuneResult}}``."""
    out = {}
    for index, (nid, table) in enumerate(zip(ids, tables)):
        if nid not in norms:
            raise StageError("tune", "network %s has no norms" % nid)
        out[nid] = {}
        for calc in methods:
            try:
                out[nid][calc] = tune(calc, norms[nid].problems, table, config, key=index)
            except CalctuneError as exc:
                raise StageError("tune", "network %s, %s: %s" % (nid, calc, exc)) from exc
        log.info("tuned network %s (%d/%d)", nid, index + 1, len(ids))
    return out


def tuned_document(ids, tuned, config, grid, methods):
    return {
        "config": {
            "seed": int(config.seed), "restarts": int(config.restarts),
            "mycin_clamp": bool(config.mycin_clamp),
            "grid": [float(g) for g in grid], "methods": list(methods),
        },
        "networks": [
            {
                "network_id": nid,
                "calculi": {c: tuned[nid][c].params.to_json() for c in methods},
                "diagnostics": {
                    c: {"mse": tuned[nid][c].mse, "init_mse": tuned[nid][c].init_mse,
                        "starts_agreeing": tuned[nid][c].starts_agreeing}
                    for c in methods},
            }
            for nid in ids
        ],
    }


def evaluate_networks(ids, tables, norms, params, methods, mycin_clamp=False):
    """Per-network RMSE of the given parameters against the norms."""
    results = []
    for nid, table in zip(ids, tables):
        ps = norms[nid].problems
        try:
            add = additivity_factor(table)
        except CalctuneError as exc:
            raise StageError("report", "network %s: %s" % (nid, exc)) from exc
        rmse = {}
        for calc in methods:
            pred = evaluate(params[nid][calc], ps.p1, ps.p2, mycin_clamp=mycin_clamp)
            rmse[calc] = network_rmse(pred - ps.targets)
        results.append(NetworkResult(nid, add, rmse, dict(params[nid])))
    return results


def summarize(results, methods, metadata):
    methods = tuple(methods)
    mat = np.array([[r.rmse[m] for m in methods] for r in results])
    add = np.array([r.additivity for r in results])
    n = len(results)

    average = {m: float(mat[:, j].mean()) for j, m in enumerate(methods)}
    high = {m: float(mat[:, j].max()) for j, m in enumerate(methods)}
    low = {m: float(mat[:, j].min()) for j, m in enumerate(methods)}
    pooled = {m: math.sqrt(float(np.mean(mat[:, j] ** 2))) for j, m in enumerate(methods)}

    k = len(methods)
    corr = np.eye(k)
    regressions = {}
    anova = None
    if n >= 3:
        for i in range(k):
            for j in range(i + 1, k):
                try:
                    corr[i, j] = corr[j, i] = pearson(mat[:, i], mat[:, j])
                except CalctuneError:
                    corr[i, j] = corr[j, i] = math.nan
        for j, m in enumerate(methods):
            if m == "independence":
                continue
            try:
                regressions[m] = ols_fit(add, mat[:, j])
            except CalctuneError:
                pass
    if n >= 2 and k >= 2:
        anova = rm_anova_f(mat)

    exceptions = 0
    if "independence" in methods:
        ji = methods.index("independence")
        others = [j for j, m in enumerate(methods) if m != "independence"]
        exceptions = int(np.sum(np.any(mat[:, others] < mat[:, [ji]] - 1e-9, axis=1)))

    return StudyReport(
        methods=methods, average=average, high=high, low=low, pooled=pooled,
        correlations=corr, regressions=regressions, anova=anova,
        independence_exceptions=exceptions, metadata=metadata, results=tuple(results),
    )


def report_metadata(tuned_config, n_networks, problems_per_network):
    return {
        "seed": tuned_config["seed"],
        "networks": int(n_networks),
        "problems_per_network": int(problems_per_network),
        "grid": list(tuned_config["grid"]),
        "methods": list(tuned_config["methods"]),
        "restarts": tuned_config["restarts"],
        "mycin_clamp": tuned_config["mycin_clamp"],
    }


def build_report(ids, tables, norms, tuned_doc):
    """Per-network results and the aggregate report from stage outputs."""
    cfg, params = io.tuned_from_doc(tuned_doc)
    methods = tuple(cfg["methods"])
    results = evaluate_networks(ids, tables, norms, params, methods, cfg["mycin_clamp"])
    per_net = len(norms[ids[0]].problems) if ids else 0
    return summarize(results, methods, report_metadata(cfg, len(ids), per_net))


def write_report(out_dir, report):
    rows = [(r.network_id, r.additivity, r.rmse) for r in report.results]
    io.write_rmse_table(os.path.join(out_dir, FILES["rmse"]), rows, report.methods)
    io.write_json(os.path.join(out_dir, FILES["report_json"]), report.to_json())
    with open(os.path.join(out_dir, FILES["report_md"]), "w") as fh:
        fh.write(report.to_markdown())


def report_from_files(out_dir, networks=None, norms=None, tuned=None):
    """Rebuild and rewrite the report from persisted stage files."""
    ids, tables = io.read_networks(networks or os.path.join(out_dir, FILES["networks"]))
    grouped = io.read_norms(norms or os.path.join(out_dir, FILES["norms"]))
    doc = io.read_json(tuned or os.path.join(out_dir, FILES["tuned"]))
    report = build_report(ids, tables, norms_from_rows(grouped), doc)
    write_report(out_dir, report)
    return report


def run_study(config=StudyConfig()):
    """Run every stage; persist intermediates when ``config.out_dir`` is set."""
    if config.networks_path:
        try:
            ids, tables = io.read_networks(config.networks_path)
        except CalctuneError as exc:
            raise StageError("generate", str(exc)) from exc
    else:
        ids, tables = generate_networks(config.seed, config.networks)
    norms = solve_norms(ids, tables, config.grid)
    tuned = tune_networks(ids, tables, norms, config.methods, config.tuner_config())
    doc = tuned_document(ids, tuned, config.tuner_config(), config.grid, config.methods)
    report = build_report(ids, tables, norms, doc)

    if config.out_dir:
        os.makedirs(config.out_dir, exist_ok=True)
        io.write_networks(os.path.join(config.out_dir, FILES["networks"]), ids, tables)
        io.write_norms(os.path.join(config.out_dir, FILES["norms"]), norm_rows(ids, norms))
        io.write_json(os.path.join(config.out_dir, FILES["tuned"]), doc)
        write_report(config.out_dir, report)
    return report
