"""Command-line entry point.

Exit status: 0 success, 1 usage error or malformed input, 2 computation
failure, 3 a checked inequality was violated.
"""

from __future__ import annotations

import argparse
import io
import json
import sys

from . import lp
from .channel import NoiseKind, NoiseModel, build_channel_matrix, write_channel_csv
from .estimate import DELTA_MODES, InsufficientSamples, estimate_point_mass
from .experiments import (
    FIT_MODES,
    PREDICTORS,
    RESPONSES,
    SweepGrid,
    fit_sweep,
    rows_to_csv,
    scaling_sweep,
)
from .extremal import (
    SandwichViolation,
    certificate_records,
    construction_records,
    eta_exact,
    records_to_json,
)
from .recover import EnumerationOverflow, recover_distribution
from .samples import (
    BatchSampler,
    PopulationSampler,
    SampleFileError,
    SamplesExhausted,
    read_distribution,
    read_sample_file,
    write_sample_file,
)

EXIT_OK, EXIT_USAGE, EXIT_COMPUTE, EXIT_VERIFY = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _model_flags(p, required=True):
    p.add_argument("--model", choices=[k.value for k in NoiseKind], help="noise model")
    p.add_argument("--nu", type=float, help="noise parameter in (0, 1]")
    if required:
        _require(p, "model", "nu")


def _common(p):
    p.add_argument("--config", help="JSON file of flag defaults (command line wins)")
    p.add_argument("--out", help="output path (default: standard output)")
    p.add_argument("--seed", type=int, default=0, help="random seed (default 0)")


def _require(p, *names):
    p._popre_required = getattr(p, "_popre_required", []) + list(names)


def build_parser():
    parser = _Parser(prog="popre", description="Population recovery from noisy samples.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("channel", help="write the channel matrix A as CSV")
    _model_flags(p)
    p.add_argument("--n", type=int, help="string length")
    _common(p)
    _require(p, "n")

    p = sub.add_parser("sample", help="draw noisy samples from a distribution file")
    _model_flags(p)
    p.add_argument("--dist", help='distribution JSON {"n":..,"entries":[{"x":..,"p":..}]}')
    p.add_argument("--count", type=int, help="number of samples")
    _common(p)
    _require(p, "dist", "count")

    p = sub.add_parser("estimate", help="estimate D(u) from a sample file")
    p.add_argument("--samples", help="sample file")
    p.add_argument("--target", help="target bit string u")
    p.add_argument("--eps", type=float, help="estimator parameter (accuracy 2*eps)")
    p.add_argument("--delta-mode", choices=DELTA_MODES, default="oracle")
    p.add_argument("--delta", type=float, help="l1 budget for manual delta mode")
    p.add_argument("--boost", action="store_true", help="median of independent sub-batches")
    _common(p)
    _require(p, "samples", "target", "eps")

    p = sub.add_parser("recover", help="recover the heavy strings of a population")
    _model_flags(p, required=False)
    p.add_argument("--samples", help="sample file (the stream must be long enough)")
    p.add_argument("--dist", help="simulate samples from this distribution instead")
    p.add_argument("--eps", type=float, help="threshold in (0, 1/2)")
    p.add_argument("--delta-mode", choices=DELTA_MODES, default="oracle")
    p.add_argument("--delta", type=float, help="l1 budget for manual delta mode")
    _common(p)
    _require(p, "eps")

    p = sub.add_parser("eta", help="exact eta(eps, nu) with its certificate")
    _model_flags(p)
    p.add_argument("--n", type=int, help="string length")
    p.add_argument("--eps", type=float, help="eps in (0, 1/2)")
    _common(p)
    _require(p, "n", "eps")

    p = sub.add_parser("verify", help="check the extremal inequalities")
    _model_flags(p)
    p.add_argument("--n", type=int, help="string length")
    p.add_argument("--eps", type=float, help="eps in (0, 1/2)")
    p.add_argument("--a", type=float, default=0.05, help="three-circle parameter")
    p.add_argument("--M", type=int, help="also check the repeated-root construction of degree M")
    p.add_argument("--L", type=float, default=0.05, help="ratio target for the construction")
    _common(p)
    _require(p, "n", "eps")

    p = sub.add_parser("sweep", help="eta over a grid, as CSV, with an optional fit")
    p.add_argument("--model", choices=[k.value for k in NoiseKind])
    p.add_argument("--nu", type=float, nargs="+")
    p.add_argument("--n", type=int, nargs="+")
    p.add_argument("--eps", type=float, nargs="+")
    p.add_argument("--jobs", type=int, default=1, help="parallel grid cells")
    p.add_argument("--fit-out", help="write a FitResult JSON here")
    p.add_argument("--fit-predictor", choices=PREDICTORS, default="n")
    p.add_argument("--fit-response", choices=RESPONSES, default="log_inv_eta")
    p.add_argument("--fit-mode", choices=FIT_MODES, default="power")
    _common(p)
    _require(p, "model", "nu", "n", "eps")
    return parser, sub


def _load_config(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}:{exc.lineno}: invalid JSON: {exc.msg}") from None
    if not isinstance(data, dict):
        raise UsageError(f"{path}: config must be a JSON object")
    return {k.replace("-", "_"): v for k, v in data.items()}


def _config_tokens(cfg, sp):
    """Config entries as flag tokens, so argparse types and choices apply."""
    actions = {a.dest: a for a in sp._actions if a.option_strings}
    unknown = sorted(k for k in cfg if k not in actions or k == "config")
    if unknown:
        sp.error(f"unknown config key(s): {', '.join(unknown)}")
    tokens = []
    for key, value in cfg.items():
        action = actions[key]
        flag = action.option_strings[-1]
        if isinstance(action, argparse._StoreTrueAction):
            if value:
                tokens.append(flag)
        elif isinstance(value, list):
            tokens += [flag] + [str(v) for v in value]
        else:
            tokens += [flag, str(value)]
    return tokens


def _parse(argv):
    parser, sub = build_parser()
    args = parser.parse_args(argv)
    sp = sub.choices[args.command]
    if args.config:
        tokens = _config_tokens(_load_config(args.config), sp)
        k = argv.index(args.command) + 1
        # config first: later command-line flags override it
        args = parser.parse_args(argv[:k] + tokens + argv[k:])
    missing = [n for n in sp._popre_required if getattr(args, n, None) is None]
    if missing:
        sp.error("missing required flag(s): " + ", ".join("--" + m.replace("_", "-") for m in missing))
    return sp, args


def _model(args):
    try:
        return NoiseModel(NoiseKind(args.model), args.nu)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _emit(args, text):
    if not text.endswith("\n"):
        text += "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _open(path, what):
    try:
        return open(path)
    except OSError as exc:
        raise UsageError(f"cannot read {what} {path}: {exc.strerror}") from None


def _read_samples(path):
    with _open(path, "sample file") as fh:
        try:
            return read_sample_file(fh)
        except SampleFileError as exc:
            raise UsageError(f"{path}: {exc}") from None


def _read_dist(path):
    with _open(path, "distribution") as fh:
        try:
            return read_distribution(fh)
        except SampleFileError as exc:
            raise UsageError(f"{path}: {exc}") from None


def cmd_channel(args):
    buf = io.StringIO()
    write_channel_csv(build_channel_matrix(_model(args), args.n), buf)
    _emit(args, buf.getvalue())
    return EXIT_OK


def cmd_sample(args):
    if args.count < 1:
        raise UsageError("--count must be positive")
    model = _model(args)
    n, xs, ps = _read_dist(args.dist)
    batch = PopulationSampler(xs, ps, model, seed=args.seed)(args.count)
    if args.out:
        with open(args.out, "w") as fh:
            write_sample_file(batch, fh)
    else:
        write_sample_file(batch, sys.stdout)
    return EXIT_OK


def cmd_estimate(args):
    batch = _read_samples(args.samples)
    if len(args.target) != batch.n or set(args.target) - set("01"):
        raise UsageError(f"--target must be a bit string of length {batch.n}")
    rep = estimate_point_mass(batch, args.target, args.eps, delta_mode=args.delta_mode,
                              delta=args.delta, boost=args.boost)
    _emit(args, rep.to_json())
    return EXIT_OK


def cmd_recover(args):
    if bool(args.samples) == bool(args.dist):
        raise UsageError("recover needs exactly one of --samples or --dist")
    if args.samples:
        batch = _read_samples(args.samples)
        sampler, model, n = BatchSampler(batch), batch.model, batch.n
    else:
        if args.model is None or args.nu is None:
            raise UsageError("--dist needs --model and --nu")
        model = _model(args)
        n, xs, ps = _read_dist(args.dist)
        sampler = PopulationSampler(xs, ps, model, seed=args.seed)
    res = recover_distribution(sampler, model, n, args.eps, delta_mode=args.delta_mode,
                               delta=args.delta)
    _emit(args, res.to_json())
    return EXIT_OK


def cmd_eta(args):
    rep = eta_exact(_model(args), args.n, args.eps)
    _emit(args, rep.to_json())
    return EXIT_OK


def cmd_verify(args):
    records = certificate_records(_model(args), args.n, args.eps, a=args.a)
    if args.M is not None:
        records.extend(construction_records(args.M, args.L))
    _emit(args, records_to_json(records))
    bad = [r.name for r in records if r.violated]
    if bad:
        print(f"popre verify: violated: {', '.join(bad)}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_sweep(args):
    try:
        grid = SweepGrid(args.model, tuple(args.n), tuple(args.eps), tuple(args.nu), args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rows = scaling_sweep(grid, jobs=args.jobs)
    _emit(args, rows_to_csv(rows))
    if args.fit_out:
        try:
            fit = fit_sweep(rows, args.fit_predictor, args.fit_response, args.fit_mode)
        except ValueError as exc:
            print(f"popre sweep: fit failed: {exc}", file=sys.stderr)
            return EXIT_COMPUTE
        with open(args.fit_out, "w") as fh:
            fh.write(fit.to_json() + "\n")
    return EXIT_OK


COMMANDS = {
    "channel": cmd_channel, "sample": cmd_sample, "estimate": cmd_estimate,
    "recover": cmd_recover, "eta": cmd_eta, "verify": cmd_verify, "sweep": cmd_sweep,
}


def main(argv=None):
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        sp, args = _parse(argv)
    except UsageError as exc:
        print(f"popre: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        sp.print_usage(sys.stderr)
        print(f"popre {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SandwichViolation as exc:
        print(f"popre {args.command}: verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except (lp.LpError, EnumerationOverflow, SamplesExhausted, InsufficientSamples,
            ArithmeticError) as exc:
        print(f"popre {args.command}: computation failed: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    except ValueError as exc:
        sp.print_usage(sys.stderr)
        print(f"popre {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


run_cli = main


if __name__ == "__main__":
    sys.exit(main())
