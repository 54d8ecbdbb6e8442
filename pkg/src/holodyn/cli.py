"""Command-line front end: ``holodyn <subcommand> ...``.

Maps and fields are given as two expressions (``--map EX EY``) in ``x``,
``y`` with ``i`` and ``tau`` as literals, or as JSON files written by a
previous run.  Exit status: 0 success, 2 usage or parse error, 3 domain
error, 4 mismatch against the expected-results file.
"""

import argparse
import functools
import json
import math
import os
import sys
from importlib import resources

from .errors import DomainError, HolodynError, ParseError, TruncationError
from .groups import centralizer_form_check, derived_series_jet, sj_sequence
from .holonomy import (CONVENTIONS, dicritical_check, holonomy_table, structural_form,
                       xy_invariance_check)
from .lie import (Diffeo2, VField2, bracket, commutator_diffeo, contact_order, exp_field,
                  from_json, log_diffeo)
from .randoms import make_rng, random_tangent_diffeo
from .scalar import Scalar

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_DIFF = 0, 2, 3, 4
THREADS_ENV = "HOLODYN_THREADS"
DEFAULT_SEED = 20240611


class UsageError(Exception):
    pass


def _dump(obj):
    return json.dumps(obj, indent=2, sort_keys=True, default=_json_default) + "\n"


def _json_default(obj):
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, Scalar):
        return str(obj)
    if hasattr(obj, "item"):
        return obj.item()
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _emit(args, text):
    if getattr(args, "out", None):
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _order(value):
    return None if value == math.inf else int(value)


def _load_objects(args, attr, kind):
    """Objects from ``--<attr> EX EY`` pairs and ``--<attr>-json FILE`` entries."""
    out = []
    for ex, ey in getattr(args, attr) or []:
        out.append(kind.parse(ex, ey, args.trunc))
    for path in getattr(args, attr + "_json") or []:
        with open(path) as fh:
            obj = from_json(fh.read())
        if not isinstance(obj, kind):
            raise UsageError(f"{path}: expected a {kind.__name__} payload")
        if obj.trunc != args.trunc:
            obj = obj.truncate(args.trunc) if obj.trunc > args.trunc else obj.lift(args.trunc)
        out.append(obj)
    return out


def _exactly(objs, n, what):
    if len(objs) != n:
        raise UsageError(f"expected {n} {what}, got {len(objs)}")
    return objs


# -- subcommands ---------------------------------------------------------------------

def cmd_exp(args):
    (X,) = _exactly(_load_objects(args, "field", VField2), 1, "field")
    t = Scalar(args.time) if args.time else Scalar(1)
    return _dump(exp_field(X, t).to_payload())


def cmd_log(args):
    (F,) = _exactly(_load_objects(args, "map", Diffeo2), 1, "map")
    return _dump(log_diffeo(F).to_payload())


def cmd_bracket(args):
    X, Y = _exactly(_load_objects(args, "field", VField2), 2, "fields")
    Z = bracket(X, Y)
    return _dump({"bracket": Z.to_payload(), "order": _order(Z.order())})


def cmd_commutator(args):
    F, G = _exactly(_load_objects(args, "map", Diffeo2), 2, "maps")
    C = commutator_diffeo(F, G)
    return _dump({"commutator": C.to_payload(), "contact_order": _order(contact_order(C)),
                  "inputs": [_order(contact_order(F)), _order(contact_order(G))]})


def _generators(args):
    gens = _load_objects(args, "map", Diffeo2)
    if args.random:
        rng = make_rng(args.seed)
        for k in range(args.random):
            gens.append(random_tangent_diffeo(rng, args.trunc, contact=2 + k % 2))
    if not gens:
        with resources.files("holodyn.data").joinpath("sj_generators.json").open() as fh:
            gens = [from_json(json.dumps(p)).truncate(args.trunc) for p in json.load(fh)["generators"]]
    return gens


def cmd_sj(args):
    cascade = sj_sequence(_generators(args), args.levels, args.report_trunc, args.cap)
    return cascade.to_json() + "\n"


def cmd_derived(args):
    return _dump(derived_series_jet(_generators(args), args.depth))


def cmd_centralizer(args):
    (F,) = _exactly(_load_objects(args, "map", Diffeo2), 1, "map")
    fields = _load_objects(args, "field", VField2)
    if not 1 <= len(fields) <= 2:
        raise UsageError("give X, and optionally Y, with --field")
    report = centralizer_form_check(F, *fields)
    return _dump(report)


def cmd_holonomy(args):
    res = holonomy_table(args.A, args.B, args.trunc, args.convention)
    F = res.holonomy
    out = {
        "convention": args.convention,
        "holonomy": F.to_payload(),
        "a": {f"{i},{j}": str(c) for i, j, _, c in F.fx.terms()},
        "b": {f"{i},{j}": str(c) for i, j, _, c in F.fy.terms()},
        "xy_invariance": xy_invariance_check(F),
        "dicritical": dicritical_check(F),
    }
    if args.form:
        p, q = args.form
        form = structural_form(F, p, q)
        form["f"] = [str(c) for c in form["f"]]
        form["f0"] = None if form["f0"] is None else str(form["f0"])
        out["structural_form"] = form
    return _dump(out)


def _map_spec(text):
    from .orbits import map_from_text
    try:
        return map_from_text(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_orbits(args):
    from .orbits import classify_ball
    m = _map_spec(args.map_spec)
    res = classify_ball(m, args.rho, args.grid, args.budget)
    if args.csv:
        with open(args.csv, "w") as fh:
            fh.write(res.to_csv())
    summary = res.summary()
    summary["map"] = m.describe()
    return _dump(summary)


def cmd_circles(args):
    from .orbits import invariant_circle_scan
    f = [complex(c.replace("tau", repr(2j * math.pi))) for c in args.f]
    found = invariant_circle_scan(f, args.rmin, args.rmax, args.rays, iterations=args.iterations)
    return _dump({"f": f, "circles": found})


def cmd_estimate(args):
    from .orbits import (GeneralPoly, cascade_estimate_check, commutator_estimate_check,
                         random_tangent_pair)
    if args.delta is None:
        args.delta = 1 / 24 if args.cascade else 0.05
    if args.cascade:
        gens = [GeneralPoly.from_diffeo(F) for F in _generators(args)]
        return _dump(cascade_estimate_check(gens, args.levels, args.delta, seed=args.seed))
    reports = []
    for k in range(args.pairs):
        F1, F2 = random_tangent_pair(args.seed + k, args.r, args.delta)
        tau = args.tau if args.tau else 2 * args.delta
        reports.append(commutator_estimate_check(F1, F2, args.r, args.delta, tau,
                                                 args.samples, seed=args.seed + k))
    return _dump({"pairs": reports, "ok": all(r["precondition_ok"] and r["inequality_ok"]
                                              for r in reports)})


def cmd_examples(args):
    from .examples_run import run_examples
    which = [w.strip() for w in args.which.split(",")] if args.which else None
    report = run_examples(which)
    text = _dump(report)
    if args.update:
        path = args.expected or _default_expected()
        merged = _read_expected(args.expected) if os.path.exists(path) else {}
        merged.update(json.loads(text))
        with open(path, "w") as fh:
            fh.write(_dump(merged))
        return text
    expected = _read_expected(args.expected)
    diffs = []
    for key, got in report.items():
        want = expected.get(key)
        if want != json.loads(json.dumps(got, default=_json_default)):
            diffs.append(key)
    if diffs:
        sys.stdout.write(text)
        raise _DiffFailure(f"examples differ from expected results: {', '.join(diffs)}")
    return text


class _DiffFailure(Exception):
    pass


def _default_expected():
    return str(resources.files("holodyn.data").joinpath("expected_examples.json"))


def _read_expected(path):
    if path:
        with open(path) as fh:
            return json.load(fh)
    with resources.files("holodyn.data").joinpath("expected_examples.json").open() as fh:
        return json.load(fh)


# -- parser ------------------------------------------------------------------------------

def _trunc(text):
    n = int(text)
    if not 1 <= n <= 16:
        raise argparse.ArgumentTypeError("truncation must satisfy 1 <= N <= 16")
    return n


def _objects(p, field=False, maps=False):
    if field:
        p.add_argument("--field", nargs=2, action="append", metavar=("EX", "EY"),
                       help="vector field EX d/dx + EY d/dy")
        p.add_argument("--field-json", action="append", metavar="FILE")
    if maps:
        p.add_argument("--map", nargs=2, action="append", metavar=("EX", "EY"),
                       help="map (x, y) -> (EX, EY)")
        p.add_argument("--map-json", action="append", metavar="FILE")


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-N", "--trunc", type=_trunc, default=8, help="jet truncation degree (1..16)")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("-o", "--out", help="write the result here instead of stdout")
    parser = argparse.ArgumentParser(prog="holodyn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    add = functools.partial(sub.add_parser, parents=[common])

    p = add("exp", help="time-t map of a field")
    _objects(p, field=True)
    p.add_argument("--time", help="exact time (default 1)")
    p.set_defaults(func=cmd_exp)

    p = add("log", help="infinitesimal generator of a tangent-to-identity map")
    _objects(p, maps=True)
    p.set_defaults(func=cmd_log)

    p = add("bracket", help="Lie bracket of two fields")
    _objects(p, field=True)
    p.set_defaults(func=cmd_bracket)

    p = add("commutator", help="group commutator F G F^-1 G^-1")
    _objects(p, maps=True)
    p.set_defaults(func=cmd_commutator)

    for name, func, help_ in (("sj", cmd_sj, "commutator cascade S(j)"),
                              ("derived", cmd_derived, "derived series")):
        p = add(name, help=help_)
        _objects(p, maps=True)
        p.add_argument("--random", type=int, default=0, help="add this many seeded random generators")
        if name == "sj":
            p.add_argument("--levels", type=int, default=4)
            p.add_argument("--report-trunc", type=int)
            p.add_argument("--cap", type=int, default=256)
        else:
            p.add_argument("--depth", type=int, default=2)
        p.set_defaults(func=func)

    p = add("centralizer", help="membership in the centralizer form")
    _objects(p, field=True, maps=True)
    p.set_defaults(func=cmd_centralizer)

    p = add("holonomy", help="holonomy of the z-axis for A d/dx + B d/dy + C d/dz")
    p.add_argument("--A", required=True)
    p.add_argument("--B", required=True)
    p.add_argument("--convention", choices=sorted(CONVENTIONS), default="minus_z")
    p.add_argument("--form", type=int, nargs=2, metavar=("P", "Q"),
                   help="check the structural form with u = x^P y^Q")
    p.set_defaults(func=cmd_holonomy)

    p = add("orbits", help="P/F/I classification on a ball")
    p.add_argument("map_spec", help="saddle, F:c0,c1,... or H:c0,c1,...")
    p.add_argument("--rho", type=float, default=0.5)
    p.add_argument("--grid", type=int, default=64)
    p.add_argument("--budget", type=int, default=100_000)
    p.add_argument("--csv", help="per-orbit CSV output")
    p.set_defaults(func=cmd_orbits)

    p = add("circles", help="invariant circles |1 + C f(C)| = 1")
    p.add_argument("f", nargs="+", help="coefficients of f (complex literals, tau allowed)")
    p.add_argument("--rmin", type=float, default=1e-6)
    p.add_argument("--rmax", type=float, default=2.0)
    p.add_argument("--rays", type=int, default=16)
    p.add_argument("--iterations", type=int, default=10_000)
    p.set_defaults(func=cmd_circles)

    p = add("estimate", help="sampled commutator displacement estimates")
    _objects(p, maps=True)
    p.add_argument("--random", type=int, default=0)
    p.add_argument("--pairs", type=int, default=10)
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--delta", type=float, help="default 0.05, or 1/24 with --cascade")
    p.add_argument("--tau", type=float)
    p.add_argument("--cascade", action="store_true", help="cascade mode on the given generators")
    p.add_argument("--levels", type=int, default=5)
    p.set_defaults(func=cmd_estimate)

    p = add("examples", help="re-run the worked examples and diff against expected results")
    p.add_argument("--which", help="comma-separated subset of circles,saddle_node,xy_form,x2y_form,radial")
    p.add_argument("--expected", help="expected-results JSON (default: the packaged file)")
    p.add_argument("--update", action="store_true", help="rewrite the expected-results file")
    p.set_defaults(func=cmd_examples)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    threads = os.environ.get(THREADS_ENV)
    if threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, threads)
    try:
        _emit(args, args.func(args))
    except ParseError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, TruncationError) as exc:
        code = getattr(exc, "code", "cli.usage")
        print(f"error [{code}]: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except HolodynError as exc:
        print(f"error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"error [cli.usage]: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except _DiffFailure as exc:
        print(f"error [cli.examples_diff]: {exc}", file=sys.stderr)
        return EXIT_DIFF
    except OSError as exc:
        print(f"error [cli.io]: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
