"""
Batch report from a delimited file
==================================

Write a small expression-like table, analyse several column pairs in one
go and print the text tables and part of the JSON report.
"""

import json
import tempfile
from pathlib import Path

import numpy as np

from cdd.bayesian import McmcConfig
from cdd.report import AnalysisConfig, render_json, render_text, run_analysis

rng = np.random.default_rng(7)
n = 300
a = rng.gamma(2.0, 1.0, n)
b = np.log1p(a) + rng.normal(0, 0.3, n)
c = rng.normal(size=n)

path = Path(tempfile.mkdtemp()) / "expression.tsv"
rows = ["cell\tGeneA\tGeneB\tGeneC"] + [f"c{i}\t{x:.6f}\t{y:.6f}\t{z:.6f}" for i, (x, y, z) in enumerate(zip(a, b, c))]
rows[5] = "c4\t\t0.3\t1.0"  # a missing value, dropped at ingestion
path.write_text("\n".join(rows) + "\n")

cfg = AnalysisConfig(
    input_path=str(path),
    pairs=[("GeneA", "GeneB"), ("GeneA", "GeneC"), ("GeneB", "GeneD")],  # the last column does not exist
    n_boot=300,
    mcmc=McmcConfig(n_iter=6000, burn_in=2000),
    seed=1,
)
report = run_analysis(cfg)
print(render_text(report))
print("all pairs ok:", report.ok)

first = json.loads(render_json(report))["records"][0]
print(json.dumps({k: first["bayesian"][k] for k in ("pct_u_to_v", "pct_v_to_u", "decision")}, indent=2))
