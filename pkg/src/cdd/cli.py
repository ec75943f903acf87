"""Command line interface: ``cdd analyze | simulate | validate``."""

import argparse
import logging
import sys

import numpy as np

from .bayesian import McmcConfig, PriorSpec
from .betareg import Direction
from .oracle import FGM, AsymmetricBeta, GaussianCopula, Independence, generate_directed, sample
from .report import FORMATS, METHODS, AnalysisConfig, render, run_analysis
from .validation import run_oracle_checks

# config-file key -> (type, default)
ANALYZE_KEYS = {
    "method": (str, "both"),
    "n_iter": (int, 10000),
    "burn_in": (int, 2000),
    "thin": (int, 1),
    "n_boot": (int, 1000),
    "level": (float, 0.95),
    "seed": (int, 0),
    "kappa_mode": (str, "gamma"),
    "sigma0": (float, 10.0),
    "sigma1": (float, 10.0),
    "gamma_a": (float, 1.0),
    "gamma_b": (float, 1.0),
    "format": (str, "text"),
    "output": (str, None),
    "chain_dump": (str, None),
    "pair": (str, None),
}


def read_config(path):
    """Parse ``key = value`` lines; ``#`` starts a comment. Repeated
    ``pair`` keys accumulate."""
    out = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.replace("-", "_")
            if key not in ANALYZE_KEYS:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            if key == "pair":
                out.setdefault("pair", []).append(value)
            else:
                out[key] = ANALYZE_KEYS[key][0](value)
    return out


def _parse_pair(text):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 2 or not all(parts):
        raise argparse.ArgumentTypeError(f"pair must look like 'colA,colB', got {text!r}")
    return tuple(parts)


def build_parser():
    parser = argparse.ArgumentParser(prog="cdd", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="estimate directional dependence for column pairs")
    a.add_argument("input", help="comma- or tab-delimited file with a header row")
    a.add_argument("--pair", action="append", type=_parse_pair, metavar="COL_U,COL_V",
                   help="column names or 0-based indices; repeat for several pairs")
    a.add_argument("--config", help="key = value file; command line flags take precedence")
    a.add_argument("--method", choices=METHODS)
    a.add_argument("--n-iter", type=int)
    a.add_argument("--burn-in", type=int)
    a.add_argument("--thin", type=int)
    a.add_argument("--n-boot", type=int)
    a.add_argument("--level", type=float)
    a.add_argument("--seed", type=int)
    a.add_argument("--kappa-mode", choices=("link", "gamma"))
    a.add_argument("--sigma0", type=float)
    a.add_argument("--sigma1", type=float)
    a.add_argument("--gamma-a", type=float)
    a.add_argument("--gamma-b", type=float)
    a.add_argument("--format", choices=FORMATS)
    a.add_argument("-o", "--output", help="write the report here instead of stdout")
    a.add_argument("--chain-dump", metavar="DIR", help="write retained MCMC draws per pair")

    s = sub.add_parser("simulate", help="write synthetic pairs from a copula or directed generator")
    s.add_argument("family", choices=("independence", "fgm", "gaussian", "asymmetric"))
    s.add_argument("-n", type=int, default=1000)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--theta", type=float, default=0.9, help="FGM parameter")
    s.add_argument("--rho", type=float, default=0.5, help="Gaussian copula correlation")
    s.add_argument("--beta0", type=float, default=-1.5)
    s.add_argument("--beta1", type=float, default=3.0)
    s.add_argument("--kappa", type=float, default=8.0)
    s.add_argument("--direction", choices=[d.value for d in Direction], default="U_to_V")
    s.add_argument("--labels", type=_parse_pair, default=None)
    s.add_argument("-o", "--output", required=True)

    v = sub.add_parser("validate", help="run the oracle-equivalence checks")
    v.add_argument("--quick", action="store_true", help="skip the MLE grid search")
    return parser


def _analysis_config(args, parser):
    conf = read_config(args.config) if args.config else {}
    opts = {}
    for key, (_, default) in ANALYZE_KEYS.items():
        flag = getattr(args, key, None)
        opts[key] = flag if flag is not None else conf.get(key, default)
    pairs = args.pair or [_parse_pair(p) for p in conf.get("pair", [])]
    if not pairs:
        parser.error("analyze needs at least one --pair COL_U,COL_V")
    try:
        return AnalysisConfig(
            input_path=args.input,
            pairs=pairs,
            method=opts["method"],
            prior=PriorSpec(opts["sigma0"], opts["sigma1"], opts["kappa_mode"],
                            opts["gamma_a"], opts["gamma_b"]),
            mcmc=McmcConfig(n_iter=opts["n_iter"], burn_in=opts["burn_in"], thin=opts["thin"]),
            n_boot=opts["n_boot"],
            level=opts["level"],
            seed=opts["seed"],
            output_format=opts["format"],
            chain_dump_dir=opts["chain_dump"],
        ), opts["output"]
    except ValueError as exc:
        parser.error(str(exc))


def _simulate(args):
    if args.family == "asymmetric":
        spec = AsymmetricBeta(args.beta0, args.beta1, args.kappa, Direction(args.direction))
        ps = generate_directed(spec, args.n, args.seed)
        x1, x2, labels = ps.x1, ps.x2, ps.labels
    else:
        spec = {"independence": lambda: Independence(),
                "fgm": lambda: FGM(args.theta),
                "gaussian": lambda: GaussianCopula(args.rho)}[args.family]()
        ps = sample(spec, args.n, args.seed)
        x1, x2, labels = ps.u, ps.v, ("U", "V")
    labels = args.labels or labels
    np.savetxt(args.output, np.column_stack([x1, x2]), delimiter=",",
               header=",".join(labels), comments="", fmt="%.17g")
    print(f"wrote {args.n} rows of {spec} to {args.output}")
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")

    if args.command == "simulate":
        return _simulate(args)

    if args.command == "validate":
        checks = run_oracle_checks(quick=args.quick)
        for c in checks:
            print(c.line())
        return 0 if all(c.passed for c in checks) else 1

    cfg, output = _analysis_config(args, parser)
    report = run_analysis(cfg)
    text = render(report, cfg.output_format)
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
