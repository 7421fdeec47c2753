"""Command-line runner.

Verbs: ``entropy``, ``rates``, ``typical-mass``, ``simulate``, ``sweep``.
Experiment verbs read a JSON config (``--config``); flags override it.
Exit codes: 0 success, 2 input/config error, 3 numerical failure.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from .exceptions import InputError, NumericalError
from .io import (
    MASS_FIELDS,
    ExperimentConfig,
    load_distribution,
    write_csv,
    write_sidecar,
)
from .linalg import load_matrix
from .protocol import (
    ProtocolReport,
    QuantumSource,
    log2_ceil,
    protocol_report,
    quantum_cross_entropy,
    von_neumann_entropy,
)
from .rng import derive_seed
from .typicality import typical_mass

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


def _load_source(path, label):
    if not path:
        raise InputError(f"no path given for {label}")
    try:
        m = load_matrix(path)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    return QuantumSource(m, label)


def _fmt_rate(x):
    return "inf" if x == float("inf") else f"{x:.6f}"


def cmd_entropy(args, out):
    src = _load_source(args.source, "source")
    out.write(f"S = {_fmt_rate(von_neumann_entropy(src))}\n")
    eig = " ".join(f"{x:.6f}" for x in src.spectrum.eigenvalues)
    out.write(f"eigenvalues = {eig}\n")


def cmd_rates(args, out):
    rho0 = _load_source(args.rho0, "rho0")
    sigma0 = _load_source(args.sigma0, "sigma0")
    s_cross = quantum_cross_entropy(rho0, sigma0)
    ldc = log2_ceil(rho0.D)
    out.write(f"S_rho = {_fmt_rate(von_neumann_entropy(rho0))}\n")
    out.write(f"S_sigma = {_fmt_rate(von_neumann_entropy(sigma0))}\n")
    out.write(f"S_cross = {_fmt_rate(s_cross)}\n")
    out.write(f"log_D_ceil = {ldc}\n")
    out.write(f"fallback_recommended = {'true' if s_cross >= ldc else 'false'}\n")


def _config(args):
    cfg = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig()
    cfg = cfg.override(
        rho0_path=args.rho0,
        sigma0_path=args.sigma0,
        dist_path=getattr(args, "dist", None),
        N_list=args.n_list,
        eps=args.eps,
        eps_list=getattr(args, "eps_list", None),
        kinds=getattr(args, "kind", None),
        mode=args.mode,
        trials=args.trials,
        seed=args.seed,
        exact_cap=args.exact_cap,
        output_path=args.out,
        jobs=args.jobs,
    )
    return cfg.validated()


def _map_cells(fn, cells, jobs):
    if jobs == 1:
        return [fn(c) for c in cells]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, cells))


def _emit(cfg, header, rows, out, sidecar=False):
    path = cfg.output_path
    if path and path.endswith(".json"):
        with open(path, "w") as fh:
            json.dump([{k: row[k] for k in header} for row in rows], fh, indent=1, default=str)
            fh.write("\n")
    elif path:
        with open(path, "w", newline="") as fh:
            write_csv(fh, header, rows)
    else:
        write_csv(out, header, rows)
    if sidecar and path:
        write_sidecar(os.path.splitext(path)[0] + ".dat", rows)


def cmd_typical_mass(args, out):
    cfg = _config(args)
    if not cfg.dist_path:
        raise InputError("typical-mass needs a distribution (dist_path / --dist)")
    p = load_distribution(cfg.dist_path)
    cells = [(n, e, k) for n in cfg.N_list for e in cfg.eps_list for k in cfg.kinds]

    def run(item):
        idx, (n, e, k) = item
        m = typical_mass(n, p, e, k, cfg.trials, derive_seed(cfg.seed, idx), cfg.exact_cap)
        return dict(N=n, eps=e, kind=k, engine=m.engine, estimate=m.estimate,
                    std_error=m.std_error, trials=m.trials, seed=m.seed)

    rows = _map_cells(run, list(enumerate(cells)), cfg.jobs)
    _emit(cfg, MASS_FIELDS, rows, out)


def _protocol_rows(cfg):
    rho0 = _load_source(cfg.rho0_path, "rho0")
    sigma0 = _load_source(cfg.sigma0_path, "sigma0")
    cells = [(n, e) for n in cfg.N_list for e in cfg.eps_list]

    def run(item):
        idx, (n, e) = item
        rep = protocol_report(rho0, sigma0, n, e, cfg.mode, cfg.trials,
                              derive_seed(cfg.seed, idx), cfg.exact_cap, on_empty="status")
        return rep.flat()

    return _map_cells(run, list(enumerate(cells)), cfg.jobs)


def cmd_simulate(args, out):
    cfg = _config(args)
    cfg = cfg.override(eps_list=[cfg.eps])
    _emit(cfg, ProtocolReport.CSV_FIELDS, _protocol_rows(cfg), out, sidecar=True)


def cmd_sweep(args, out):
    cfg = _config(args)
    _emit(cfg, ProtocolReport.CSV_FIELDS, _protocol_rows(cfg), out, sidecar=True)


def _int_list(text):
    return [int(x) for x in text.split(",") if x.strip()]


def _float_list(text):
    return [float(x) for x in text.split(",") if x.strip()]


def build_parser():
    parser = argparse.ArgumentParser(prog="qxcomp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("entropy", help="von Neumann entropy of a density matrix file")
    p.add_argument("source")
    p.set_defaults(func=cmd_entropy)

    p = sub.add_parser("rates", help="entropies, cross entropy and fallback flag")
    p.add_argument("rho0")
    p.add_argument("sigma0")
    p.set_defaults(func=cmd_rates)

    def experiment(name, func, text):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config")
        p.add_argument("--rho0")
        p.add_argument("--sigma0")
        p.add_argument("--n-list", type=_int_list, help="comma-separated N values")
        p.add_argument("--eps", type=float)
        p.add_argument("--mode", choices=("real", "integer"))
        p.add_argument("--trials", type=int)
        p.add_argument("--seed", type=int)
        p.add_argument("--exact-cap", type=int)
        p.add_argument("--out")
        p.add_argument("--jobs", type=int)
        p.set_defaults(func=func)
        return p

    p = experiment("typical-mass", cmd_typical_mass, "typical-set mass per N")
    p.add_argument("--dist")
    p.add_argument("--eps-list", type=_float_list)
    p.add_argument("--kind", type=lambda s: s.split(","), help="strong, weak or both")
    experiment("simulate", cmd_simulate, "protocol report per N")
    p = experiment("sweep", cmd_sweep, "protocol reports over N x eps")
    p.add_argument("--eps-list", type=_float_list)
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        args.func(args, out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
