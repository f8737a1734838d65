"""Command-line front end.

Every subcommand prints one CSV (default) or JSON document to stdout, or
writes it atomically to ``--out``. Angles are radians throughout.

Exit status: 0 on success, 2 on usage errors, 1 on domain errors such as a
degenerate setting or missing statistics.
"""
import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import experiment, hvm, noise
from .circuit import ExperimentSetting, conditional_system_distribution, joint_distribution
from .errors import DegenerateConditioningError, QDChoiceError

SWEEP_COLUMNS = (
    "alpha", "phi", "epsilon", "p00", "p01", "p10", "p11",
    "p_s0_given_a0", "p_s0_given_a1", "visibility_analytic",
)


def _float_list(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return repr(float(value))  # shortest exact round-trip
    return str(value)


def _csv_document(header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (float, np.floating)):
        return None if not math.isfinite(obj) else float(obj)
    return obj


def _json_document(obj):
    return json.dumps(_json_safe(obj), indent=2) + "\n"


def _table(args, header, rows):
    if args.format == "json":
        return _json_document([dict(zip(header, row)) for row in rows])
    return _csv_document(header, rows)


def _emit(document, out):
    if out is None:
        sys.stdout.write(document)
        sys.stdout.flush()
        return
    target = os.path.abspath(out)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(target), prefix=".qdchoice-")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(document)
        os.replace(tmp, target)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _alphas(args):
    if args.alphas is not None:
        return args.alphas
    if args.alpha is not None:
        return [args.alpha]
    raise QDChoiceError("one of --alpha or --alphas is required")


def _phis(args):
    if getattr(args, "phis", None) is not None:
        return args.phis
    if args.phi_start is not None or args.phi_end is not None:
        if args.phi_start is None or args.phi_end is None:
            raise QDChoiceError("--phi-start and --phi-end go together")
        if args.phi_steps < 1:
            raise QDChoiceError("--phi-steps must be >= 1")
        return np.linspace(args.phi_start, args.phi_end, args.phi_steps).tolist()
    if args.phi is not None:
        return [args.phi]
    raise QDChoiceError("a phase is required (--phi or --phi-start/--phi-end)")


# -- subcommands -------------------------------------------------------------

def cmd_joint(args):
    rows = []
    for alpha in _alphas(args):
        for phi in _phis(args):
            s = ExperimentSetting(alpha, phi, args.epsilon)
            rows.append([alpha, phi, args.epsilon, *noise.noisy_joint_distribution(s).p])
    return _table(args, ["alpha", "phi", "epsilon", "p00", "p01", "p10", "p11"], rows)


def cmd_sweep(args):
    rows = []
    for eps in args.epsilons or [args.epsilon]:
        for alpha in _alphas(args):
            for phi in _phis(args):
                s = ExperimentSetting(alpha, phi, eps)
                j = noise.noisy_joint_distribution(s)
                cond = []
                for a_outcome in (0, 1):
                    try:
                        cond.append(conditional_system_distribution(j, a_outcome)[0])
                    except DegenerateConditioningError:
                        cond.append(float("nan"))
                try:
                    vis = experiment.analytic_visibility(alpha, eps)
                except DegenerateConditioningError:
                    vis = float("nan")
                rows.append([alpha, phi, eps, *j.p, *cond, vis])
    return _table(args, SWEEP_COLUMNS, rows)


def cmd_hv_check(args):
    settings = [ExperimentSetting(a, p, args.epsilon) for a in _alphas(args) for p in _phis(args)]
    verdict = hvm.feasibility_scan(settings, args.grid, args.refine, args.tol)
    if args.format == "csv":
        w = verdict.witness.as_dict() if verdict.witness else dict.fromkeys(hvm.PARAM_NAMES, "")
        return _csv_document(
            ["feasible", "min_max_residual", *hvm.PARAM_NAMES, "grid_density", "tol"],
            [[verdict.feasible, verdict.min_max_residual, *w.values(), verdict.grid_density, verdict.tol]],
        )
    return _json_document(verdict.as_dict())


def cmd_hv_branches(args):
    s = ExperimentSetting(args.alpha, args.phi, args.epsilon)
    branches = hvm.enumerate_branches(s)
    if args.format == "csv":
        return _csv_document(
            ["name", "labels", "realizable", "constraints"],
            [[b.name, "|".join(sorted(l.value for l in b.labels)), b.realizable,
              "; ".join(b.constraints)] for b in branches],
        )
    q = hvm.derived_quantities(s)
    return _json_document({
        "setting": {"alpha": s.alpha, "phi": s.phi, "epsilon": s.epsilon},
        "p0": q.p0, "p1": q.p1, "beta": q.beta,
        "branches": [b.as_dict() for b in branches],
        "all_rejected": all(b.labels for b in branches),
    })


def cmd_separability(args):
    rows = []
    for alpha in _alphas(args):
        for phi in _phis(args):
            th = noise.separability_threshold(alpha, phi)
            rows.append([alpha, phi, th.epsilon, th.never_entangled])
    return _table(args, ["alpha", "phi", "threshold", "never_entangled"], rows)


def cmd_chsh(args):
    rows = []
    for alpha in _alphas(args):
        for phi in _phis(args):
            s = ExperimentSetting(alpha, phi, args.epsilon)
            rows.append([alpha, phi, args.epsilon, noise.chsh_max(s), noise.ppt_min_eigenvalue(s)])
    return _table(args, ["alpha", "phi", "epsilon", "chsh", "ppt_min_eigenvalue"], rows)


def cmd_sample(args):
    rows = []
    points = [(a, p) for a in _alphas(args) for p in _phis(args)]
    for i, (alpha, phi) in enumerate(points):
        s = ExperimentSetting(alpha, phi, args.epsilon)
        # a single point uses the given seed; a grid derives one seed per point
        seed = args.seed if len(points) == 1 else experiment.point_seed(args.seed, i)
        rec = experiment.sample_shots(noise.noisy_joint_distribution(s), args.shots, seed, s)
        rows.append([alpha, phi, args.epsilon, args.shots, seed, *rec.counts])
    return _table(args, ["alpha", "phi", "epsilon", "shots", "seed", "n00", "n01", "n10", "n11"], rows)


def cmd_visibility(args):
    if args.phi_start is None and args.phi_end is None and args.phi is None:
        phis = np.linspace(0.0, math.pi, max(args.phi_steps, 5)).tolist()
    else:
        phis = _phis(args)
    rows = []
    for alpha in _alphas(args):
        est = experiment.estimate_visibility(alpha, args.epsilon, phis, args.shots, args.seed)
        rows.append([alpha, args.epsilon, est.value, est.std_error,
                     experiment.analytic_visibility(alpha, args.epsilon)])
    return _table(args, ["alpha", "epsilon", "visibility", "std_error", "visibility_analytic"], rows)


# -- parser ------------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--out", default=None, help="write to this file instead of stdout")

    def alpha_args(p, multi=True):
        p.add_argument("--alpha", type=float)
        if multi:
            p.add_argument("--alphas", type=_float_list)

    def phi_args(p, lists=False):
        p.add_argument("--phi", type=float)
        p.add_argument("--phi-start", type=float)
        p.add_argument("--phi-end", type=float)
        p.add_argument("--phi-steps", type=int, default=5)
        if lists:
            p.add_argument("--phis", type=_float_list)

    parser = argparse.ArgumentParser(
        prog="qdchoice",
        description="Delayed-choice interferometer under white noise.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("joint", parents=[common], help="noisy joint distribution P(S, A)")
    alpha_args(p)
    phi_args(p, lists=True)
    p.add_argument("--epsilon", type=float, default=1.0)
    p.set_defaults(func=cmd_joint, default_format="csv")

    p = sub.add_parser("sweep", parents=[common], help="plot-ready table over alpha/phi/epsilon")
    alpha_args(p)
    phi_args(p, lists=True)
    p.add_argument("--epsilon", type=float, default=1.0)
    p.add_argument("--epsilons", type=_float_list)
    p.set_defaults(func=cmd_sweep, default_format="csv")

    p = sub.add_parser("hv-check", parents=[common], help="cross-setting hidden-variable search")
    alpha_args(p)
    phi_args(p, lists=True)
    p.add_argument("--epsilon", type=float, required=True)
    p.add_argument("--grid", type=int, default=21)
    p.add_argument("--refine", type=int, default=30)
    p.add_argument("--tol", type=float, default=hvm.RESIDUAL_TOL)
    p.set_defaults(func=cmd_hv_check, default_format="json")

    p = sub.add_parser("hv-branches", parents=[common], help="labelled exact solution branches")
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--phi", type=float, required=True)
    p.add_argument("--epsilon", type=float, default=1.0)
    p.set_defaults(func=cmd_hv_branches, default_format="json")

    p = sub.add_parser("separability", parents=[common], help="PPT threshold in epsilon")
    alpha_args(p)
    phi_args(p, lists=True)
    p.set_defaults(func=cmd_separability, default_format="csv")

    p = sub.add_parser("chsh", parents=[common], help="maximal CHSH value")
    alpha_args(p)
    phi_args(p, lists=True)
    p.add_argument("--epsilon", type=float, default=1.0)
    p.set_defaults(func=cmd_chsh, default_format="csv")

    p = sub.add_parser("sample", parents=[common], help="seeded shot counts")
    alpha_args(p)
    phi_args(p, lists=True)
    p.add_argument("--epsilon", type=float, default=1.0)
    p.add_argument("--shots", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_sample, default_format="csv")

    p = sub.add_parser("visibility", parents=[common], help="estimated vs analytic visibility")
    alpha_args(p)
    phi_args(p)
    p.add_argument("--epsilon", type=float, default=1.0)
    p.add_argument("--shots", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_visibility, default_format="csv")
    return parser


def run(argv=None):
    """Parse ``argv``, run one subcommand, return the exit status."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.format is None:
        args.format = args.default_format
    try:
        document = args.func(args)
    except QDChoiceError as exc:
        print(f"qdchoice {args.command}: {exc}", file=sys.stderr)
        return 1
    _emit(document, args.out)
    return 0


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
