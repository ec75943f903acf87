"""Ingestion of delimited files, batch analysis and report rendering."""

import csv
import json
import logging
import math
import os
import re
from dataclasses import asdict, dataclass, field, replace

from . import __version__
from .bayesian import McmcConfig, PriorSpec, estimate_bayesian, write_chain_dump
from .frequentist import decide_direction_frequentist, estimate_frequentist
from .transform import MIN_OBSERVATIONS, PairedSample, to_pseudo_observations

log = logging.getLogger(__name__)

METHODS = ("frequentist", "bayesian", "both")
FORMATS = ("text", "json")
SCHEMA = "cdd-report/1"


class IngestError(ValueError):
    """Input file cannot be turned into a paired sample."""


@dataclass
class IngestResult:
    sample: PairedSample
    n_dropped: int


def _detect_delimiter(header_line):
    has_tab = "\t" in header_line
    has_comma = "," in header_line
    if has_tab and has_comma:
        raise IngestError("ambiguous delimiter: header holds both tabs and commas")
    if has_tab:
        return "\t"
    if has_comma:
        return ","
    raise IngestError("no comma or tab delimiter found in header")


def read_table(path):
    """Return ``(header, rows)`` of a comma- or tab-delimited file."""
    try:
        with open(path, newline="") as fh:
            first = fh.readline()
            delim = _detect_delimiter(first)
            fh.seek(0)
            rows = [r for r in csv.reader(fh, delimiter=delim) if r]
    except FileNotFoundError as exc:
        raise IngestError(f"input file not found: {path}") from exc
    if not rows:
        raise IngestError(f"{path} is empty")
    return [h.strip() for h in rows[0]], rows[1:]


def _column_index(header, selector):
    if isinstance(selector, int):
        if not 0 <= selector < len(header):
            raise IngestError(f"column index {selector} out of range")
        return selector
    sel = str(selector).strip()
    if sel in header:
        return header.index(sel)
    if sel.lstrip("-").isdigit():
        return _column_index(header, int(sel))
    raise IngestError(f"column {sel!r} not in header {header}")


def _to_float(text):
    try:
        value = float(text)
    except (TypeError, ValueError):
        return None
    return value if math.isfinite(value) else None


def ingest(path, selectors, table=None):
    """Parse two numeric columns of a delimited file into a PairedSample.

    Rows with a missing or non-numeric entry in either selected column are
    dropped and counted.
    """
    if len(selectors) != 2:
        raise IngestError(f"need exactly two column selectors, got {len(selectors)}")
    header, rows = table if table is not None else read_table(path)
    i, j = (_column_index(header, s) for s in selectors)
    x1, x2 = [], []
    dropped = 0
    for row in rows:
        a = _to_float(row[i]) if i < len(row) else None
        b = _to_float(row[j]) if j < len(row) else None
        if a is None or b is None:
            dropped += 1
            continue
        x1.append(a)
        x2.append(b)
    if len(x1) < MIN_OBSERVATIONS:
        raise IngestError(f"only {len(x1)} usable rows for ({header[i]}, {header[j]}); "
                          f"need {MIN_OBSERVATIONS}")
    return IngestResult(PairedSample(x1, x2, (header[i], header[j])), dropped)


@dataclass
class AnalysisConfig:
    input_path: str
    pairs: list
    method: str = "both"
    prior: PriorSpec = field(default_factory=PriorSpec)
    mcmc: McmcConfig = field(default_factory=McmcConfig)
    n_boot: int = 1000
    level: float = 0.95
    seed: int = 0
    output_format: str = "text"
    chain_dump_dir: str | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"method must be one of {METHODS}")
        if self.output_format not in FORMATS:
            raise ValueError(f"output format must be one of {FORMATS}")
        if not 0.0 < self.level < 1.0:
            raise ValueError("level must lie in (0, 1)")
        if not self.pairs:
            raise ValueError("at least one column pair is required")
        self.pairs = [tuple(p) for p in self.pairs]


@dataclass
class PairRecord:
    labels: list
    n: int = 0
    n_dropped: int = 0
    frequentist: dict | None = None
    bayesian: dict | None = None
    error: str | None = None


@dataclass
class CddReport:
    records: list
    method: str
    seed: int
    version: str = __version__
    schema: str = SCHEMA

    @property
    def ok(self):
        return all(r.error is None for r in self.records)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        data = dict(data)
        data["records"] = [PairRecord(**r) for r in data["records"]]
        return cls(**data)


def _frequentist_block(sample, cfg):
    fit = estimate_frequentist(sample, n_boot=cfg.n_boot, level=cfg.level, seed=cfg.seed)
    return {
        "beta0_uv": fit.coef_uv.beta0,
        "beta1_uv": fit.coef_uv.beta1,
        "beta0_vu": fit.coef_vu.beta0,
        "beta1_vu": fit.coef_vu.beta1,
        "rho2_uv": fit.rho2_uv,
        "rho2_vu": fit.rho2_vu,
        "delta_rho2": fit.delta_rho2,
        "ci_lower": fit.ci_lower,
        "ci_upper": fit.ci_upper,
        "level": fit.level,
        "n_boot": fit.n_boot,
        "boot_failures": fit.boot_failures,
        "decision": decide_direction_frequentist(fit).value,
    }


def _safe_name(label):
    return re.sub(r"[^A-Za-z0-9._-]+", "_", label) or "col"


def _bayesian_block(sample, cfg):
    ps = to_pseudo_observations(sample)
    mcmc = replace(cfg.mcmc, seed=cfg.seed)
    draws, fit = estimate_bayesian(ps, cfg.prior, mcmc, level=cfg.level)
    if cfg.chain_dump_dir:
        os.makedirs(cfg.chain_dump_dir, exist_ok=True)
        name = "__".join(_safe_name(s) for s in sample.labels) + ".csv"
        write_chain_dump(draws, os.path.join(cfg.chain_dump_dir, name))
    pct_uv = 100.0 * fit.prob_u_to_v
    return {
        "mean_rho2_uv": fit.mean_rho2_uv,
        "mean_rho2_vu": fit.mean_rho2_vu,
        "mean_delta": fit.mean_delta,
        "cred_uv": list(fit.cred_uv[:2]),
        "cred_vu": list(fit.cred_vu[:2]),
        "cred_delta": list(fit.cred_delta[:2]),
        "level": fit.cred_uv[2],
        "prob_u_to_v": fit.prob_u_to_v,
        "pct_u_to_v": pct_uv,
        "pct_v_to_u": 100.0 - pct_uv,
        "decision": fit.decision.value,
        "kappa_mode": cfg.prior.kappa_mode,
        "n_iter": mcmc.n_iter,
        "burn_in": mcmc.burn_in,
        "thin": mcmc.thin,
        "diagnostics": fit.diagnostics,
    }


def analyze_pair(sample, cfg, n_dropped=0):
    """Run the configured estimator(s) on one sample."""
    rec = PairRecord(labels=list(sample.labels), n=sample.n, n_dropped=n_dropped)
    if cfg.method in ("frequentist", "both"):
        rec.frequentist = _frequentist_block(sample, cfg)
    if cfg.method in ("bayesian", "both"):
        rec.bayesian = _bayesian_block(sample, cfg)
    return rec


def run_analysis(cfg):
    """Analyse every configured column pair; failures are isolated per pair."""
    records = []
    try:
        table = read_table(cfg.input_path)
    except IngestError as exc:
        table = exc
    for pair in cfg.pairs:
        try:
            if isinstance(table, Exception):
                raise table
            got = ingest(cfg.input_path, pair, table=table)
            records.append(analyze_pair(got.sample, cfg, got.n_dropped))
        except Exception as exc:  # one bad pair must not abort a batch
            log.error("pair %s failed: %s", pair, exc)
            records.append(PairRecord(labels=[str(p) for p in pair], error=f"{type(exc).__name__}: {exc}"))
    return CddReport(records=records, method=cfg.method, seed=cfg.seed)


def render_json(report):
    return json.dumps(report.to_dict(), indent=2) + "\n"


def parse_json(text):
    return CddReport.from_dict(json.loads(text))


def _num(x):
    return f"{x:.7f}"


def _flag(value, other):
    return f"*{_num(value)}" if value > other else f" {_num(value)}"


def render_text(report):
    """Plain-text frequentist, Bayesian and decision-summary tables.

    The stronger direction is prefixed with ``*``. Values are rounded to
    seven decimals.
    """
    lines = [f"Copula directional dependence report (cdd {report.version}, seed {report.seed})", ""]
    recs = [r for r in report.records if r.error is None]
    freq = [r for r in recs if r.frequentist]
    bayes = [r for r in recs if r.bayesian]

    if freq:
        lines.append("Frequentist CDD")
        lines.append(f"{'Gene U':<12}{'Gene V':<12}{'rho2 U->V':>12}{'rho2 V->U':>12}"
                     f"{'delta':>12}{'LB':>12}{'UB':>12}  decision")
        for r in freq:
            f = r.frequentist
            lines.append(f"{r.labels[0]:<12}{r.labels[1]:<12}{_flag(f['rho2_uv'], f['rho2_vu']):>12}"
                         f"{_flag(f['rho2_vu'], f['rho2_uv']):>12}{_num(f['delta_rho2']):>12}"
                         f"{_num(f['ci_lower']):>12}{_num(f['ci_upper']):>12}  {f['decision']}")
        lines.append("")

    if bayes:
        lines.append("Bayesian CDD (posterior mean, equal-tailed credible interval)")
        lines.append(f"{'Gene U':<12}{'Gene V':<12}{'rho2 U->V':>26}{'rho2 V->U':>26}{'delta':>26}")
        for r in bayes:
            b = r.bayesian
            lines.append(f"{r.labels[0]:<12}{r.labels[1]:<12}"
                         f"{_flag(b['mean_rho2_uv'], b['mean_rho2_vu']):>26}"
                         f"{_flag(b['mean_rho2_vu'], b['mean_rho2_uv']):>26}{_num(b['mean_delta']):>26}")
            ci = lambda c: f"({_num(c[0])},{_num(c[1])})"
            lines.append(f"{'':<24}{ci(b['cred_uv']):>26}{ci(b['cred_vu']):>26}{ci(b['cred_delta']):>26}")
        lines.append("")
        lines.append("Posterior samples suggesting each direction")
        lines.append(f"{'Gene U':<12}{'Gene V':<12}{'U->V':>10}{'V->U':>10}  decision")
        for r in bayes:
            b = r.bayesian
            lines.append(f"{r.labels[0]:<12}{r.labels[1]:<12}{b['pct_u_to_v']:>9.1f}%"
                         f"{b['pct_v_to_u']:>9.1f}%  {b['decision']}")
        lines.append("")

    if freq and bayes:
        lines.append("Decision summary")
        lines.append(f"{'Pair':<26}{'Frequentist':>14}{'Bayesian':>14}")
        for r in recs:
            if r.frequentist and r.bayesian:
                lines.append(f"{r.labels[0] + ' / ' + r.labels[1]:<26}"
                             f"{r.frequentist['decision']:>14}{r.bayesian['decision']:>14}")
        lines.append("")

    for r in report.records:
        if r.error is not None:
            lines.append(f"FAILED {' / '.join(r.labels)}: {r.error}")
    return "\n".join(lines).rstrip() + "\n"


def render(report, fmt="text"):
    if fmt == "json":
        return render_json(report)
    return render_text(report)
