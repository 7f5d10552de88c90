"""Command-line front end.

Subcommands: ``sample`` (emit a spectrum file), ``converge`` (run one error
sweep), ``fde`` (sweep alias with a time flag), ``integral`` (cylinder
integrals), ``fit`` (fit decay rates from a records CSV).

Every subcommand accepts ``--config FILE`` pointing at a flat key-value text
file whose keys mirror the long flag names (``law algebraic`` or
``law = algebraic``); explicit flags override file values.
"""

from __future__ import annotations

import argparse
import math
import sys

from .harness import (
    ExperimentConfig,
    FitUndefinedError,
    emit_csv,
    emit_fits_csv,
    fit_rate,
    group_records,
    read_records_csv,
    run_experiment,
)
from .integrals import (
    CylinderIntegralSpec,
    GaussHermite,
    MonteCarlo,
    integrate_cylinder,
    sweep_orders,
)
from .sampling import SpectrumLaw, sample_spectrum, save_spectrum, stream
from .spectral import BasisKind

INTEGRAL_COLUMNS = ("model", "method", "m", "estimate", "stderr")


def _int_list(text: str) -> tuple:
    try:
        return tuple(int(part) for part in text.split(",") if part.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _add_law_flags(parser):
    parser.add_argument("--law", choices=("algebraic", "exponential"), default="algebraic")
    parser.add_argument("--param", type=float, default=2.0, help="alpha or beta of the decay law")
    parser.add_argument("--n-modes", type=int, default=1000, help="highest retained mode of sampled spectra")
    parser.add_argument("--seed", type=int, default=0)


def _add_sweep_flags(parser):
    _add_law_flags(parser)
    parser.add_argument("--m", type=_int_list, default=(8, 16, 32, 64, 128), help="comma-separated basis-size parameters (m+1 functions each)")
    parser.add_argument("--samples", type=int, default=200, help="test functions per sweep")
    parser.add_argument("--eta-samples", type=int, default=200, help="directions for the derivative sweep")
    parser.add_argument("--t", type=float, default=math.pi, help="evolution time (fde only)")
    parser.add_argument("--model", default="sinsq")
    parser.add_argument("--basis", choices=("cardinal", "fourier"), default="cardinal")
    parser.add_argument("--quad", type=int, default=4096, help="quadrature points")
    parser.add_argument("--out", required=True, help="records CSV path")


def _read_config(path) -> list[str]:
    """Turn a flat key-value file into an equivalent flag list."""
    flags = []
    with open(path, "r", encoding="ascii") as fh:
        for raw in fh:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" in line:
                key, value = (part.strip() for part in line.split("=", 1))
            else:
                key, _, value = line.partition(" ")
                value = value.strip()
            if key == "config":
                continue
            flags.extend([f"--{key}", value])
    return flags


def _sweep_config(args, experiment: str) -> ExperimentConfig:
    law = SpectrumLaw(kind=args.law, param=args.param, n_modes=args.n_modes, seed=args.seed)
    return ExperimentConfig(
        experiment=experiment,
        law=law,
        m_values=args.m,
        n_theta_samples=args.samples,
        n_eta_samples=args.eta_samples,
        t=args.t,
        model=args.model,
        basis_kind=BasisKind(args.basis),
        quad_points=args.quad,
        seed=args.seed,
    )


def _cmd_sample(args) -> int:
    law = SpectrumLaw(kind=args.law, param=args.param, n_modes=args.n_modes, seed=args.seed)
    spectrum = sample_spectrum(law, stream(args.seed, 0, args.index))
    save_spectrum(spectrum, law, args.out)
    print(f"wrote spectrum ({law.kind}, param={law.param}, N={law.n_modes}) to {args.out}")
    return 0


def _cmd_converge(args, experiment=None) -> int:
    config = _sweep_config(args, experiment or args.experiment)
    records = run_experiment(config)
    emit_csv(records, args.out)
    for record in records:
        print(f"{config.experiment} {config.law.kind} param={config.law.param} "
              f"m={record.m} error={record.error:.6e}")
    print(f"wrote {len(records)} records to {args.out}")
    return 0


def _cmd_fde(args) -> int:
    return _cmd_converge(args, experiment="fde")


def _cmd_integral(args) -> int:
    lines = [",".join(INTEGRAL_COLUMNS)]
    for d in args.m:
        if args.method == "gauss-hermite":
            method = GaussHermite(orders=sweep_orders(d, args.gh_order, args.gh_tail_order))
        else:
            method = MonteCarlo(n_samples=args.mc_samples, seed=args.seed)
        spec = CylinderIntegralSpec(
            model=args.model, n_coords=d, method=method, quad_points=args.quad
        )
        result = integrate_cylinder(spec)
        lines.append(
            f"{args.model},{args.method},{d},{result.estimate!r},{result.stderr!r}"
        )
        print(f"integral model={args.model} m={d} estimate={result.estimate:.12f} "
              f"stderr={result.stderr:.3e}")
    if args.out:
        with open(args.out, "w", encoding="ascii", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
        print(f"wrote {len(args.m)} rows to {args.out}")
    return 0


def _cmd_fit(args) -> int:
    records = read_records_csv(args.records)
    fits = []
    for key, group in sorted(group_records(records).items()):
        try:
            fits.append(fit_rate(group, args.fit_model))
        except FitUndefinedError as exc:
            print(f"skipping {key}: {exc}")
    for fit in fits:
        print(f"{fit.experiment} {fit.law} param={fit.param}: "
              f"slope={fit.slope:.4f} r2={fit.r_squared:.4f} "
              f"(m {fit.m_lo}..{fit.m_hi})")
    emit_fits_csv(fits, args.out, append=args.append)
    print(f"wrote {len(fits)} fits to {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cylfun", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_sample = sub.add_parser("sample", help="emit one random spectrum as a text file")
    _add_law_flags(p_sample)
    p_sample.add_argument("--index", type=int, default=0, help="sub-stream index within the ensemble")
    p_sample.add_argument("--out", required=True)
    p_sample.add_argument("--config")
    p_sample.set_defaults(func=_cmd_sample)

    p_converge = sub.add_parser("converge", help="run one convergence sweep")
    p_converge.add_argument(
        "--experiment",
        choices=("functional", "frechet", "derivative-field", "fde"),
        default="functional",
    )
    _add_sweep_flags(p_converge)
    p_converge.add_argument("--config")
    p_converge.set_defaults(func=_cmd_converge)

    p_fde = sub.add_parser("fde", help="convergence sweep of the evolved functional")
    _add_sweep_flags(p_fde)
    p_fde.add_argument("--config")
    p_fde.set_defaults(func=_cmd_fde)

    p_integral = sub.add_parser("integral", help="Gaussian cylinder integrals")
    p_integral.add_argument("--model", default="cauchy-sin")
    p_integral.add_argument("--m", type=_int_list, default=(1, 3, 5), help="cylinder dimensions")
    p_integral.add_argument("--method", choices=("gauss-hermite", "monte-carlo"), default="gauss-hermite")
    p_integral.add_argument("--gh-order", type=int, default=64)
    p_integral.add_argument("--gh-tail-order", type=int, default=8)
    p_integral.add_argument("--mc-samples", type=int, default=100_000)
    p_integral.add_argument("--seed", type=int, default=0)
    p_integral.add_argument("--quad", type=int, default=256)
    p_integral.add_argument("--out")
    p_integral.add_argument("--config")
    p_integral.set_defaults(func=_cmd_integral)

    p_fit = sub.add_parser("fit", help="fit decay rates from a records CSV")
    p_fit.add_argument("--records", required=True)
    p_fit.add_argument("--fit-model", choices=("algebraic", "exponential"), required=True)
    p_fit.add_argument("--out", required=True)
    p_fit.add_argument("--append", action="store_true", help="append to an existing fits CSV")
    p_fit.add_argument("--config")
    p_fit.set_defaults(func=_cmd_fit)

    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        injected = _read_config(args.config)
        args = parser.parse_args([argv[0]] + injected + argv[1:])
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
