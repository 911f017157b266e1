"""Command-line entry point: analyze, compose, solve-iso, fixtures."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import fixtures as fx
from . import groups as mg
from . import io as bio
from . import report as rp
from .body import BodyGrid, Numeric, build_material_groupoid
from .composite import ConsistencyError, analyze_composite, intersect_material_groupoids
from .constitutive import MOONEY_RIVLIN_FORM
from .double import UnsupportedDescriptor
from .solver import SolverOptions, make_samples, solve_transplant, symbolize_body

EXIT_OK, EXIT_PARSE, EXIT_UNSUPPORTED, EXIT_CONSISTENCY = 0, 2, 3, 4
DEFAULT_SEED = 20240917


class InputError(ValueError):
    pass


def resolve(spec: str) -> tuple[BodyGrid, dict]:
    """A body from a file path or a bundled fixture name, with provenance."""
    path = Path(spec)
    if path.is_file():
        return bio.load(path), {"path": str(path), "sha256": bio.digest(path)}
    if spec in fx.BODIES:
        fp = fx.fixture_path(spec)
        info = {"fixture": spec}
        if fp is not None:
            info["sha256"] = bio.digest(fp)
        return fx.body(spec), info
    raise InputError(f"no such file or bundled fixture: {spec}")


def _solver_opts(args) -> SolverOptions:
    return SolverOptions(tol=args.solver_tol, seed=args.seed)


def _symbolic(body: BodyGrid, args) -> tuple[BodyGrid, dict | None]:
    if body.is_symbolic:
        return body, None
    k = getattr(args, "samples", None)
    samples = None if k is None else make_samples(body.dim, k)
    sym = symbolize_body(body, _solver_opts(args), samples)
    return sym.body, sym.to_dict()


def _settings(args, **extra) -> dict:
    out = {"tol": args.tol, "eig_tol": args.eig_tol, "orientation": args.orientation,
           "seed": args.seed, "solver_tol": args.solver_tol}
    out.update(extra)
    return out


def cmd_analyze(args) -> dict:
    body, info = resolve(args.body)
    body, sym = _symbolic(body, args)
    g = build_material_groupoid(body, args.orientation)
    result = rp.body_summary(g)
    if sym is not None:
        result["symbolization"] = sym
    return rp.envelope("analyze", {"body": info}, _settings(args), result)


def cmd_compose(args) -> dict:
    body_a, info_a = resolve(args.body_a)
    body_b, info_b = resolve(args.body_b)
    body_a, sym_a = _symbolic(body_a, args)
    body_b, sym_b = _symbolic(body_b, args)
    ga = build_material_groupoid(body_a, args.orientation)
    gb = build_material_groupoid(body_b, args.orientation)
    rep = analyze_composite(ga, gb, args.tol, args.eig_tol)
    result = rep.to_dict()
    if sym_a is not None or sym_b is not None:
        result["stress_free_configuration"] = "unknown"
        result["symbolization"] = {"a": sym_a, "b": sym_b}
    if args.svg:
        from .svg import plate_diagram
        inter = intersect_material_groupoids(ga, gb, args.tol, args.eig_tol)
        Path(args.svg).write_text(plate_diagram(ga, gb, inter))
    return rp.envelope("compose", {"a": info_a, "b": info_b}, _settings(args), result)


def cmd_solve_iso(args) -> dict:
    body, info = resolve(args.body)
    pa, pb = body.points[args.point_a], body.points[args.point_b]
    if not isinstance(pa.data, Numeric) or not isinstance(pb.data, Numeric):
        raise InputError("solve-iso needs numeric points")
    opts = _solver_opts(args)
    samples = make_samples(body.dim, args.samples, rng=np.random.default_rng(args.seed))
    sol = solve_transplant(pa.data.model, pb.data.model, samples, opts)
    result = sol.to_dict()
    result["verdict"] = "isomorphic" if sol.converged else "not isomorphic at tol"
    result["models"] = {"a": pa.data.model.to_dict(), "b": pb.data.model.to_dict()}
    settings = _settings(args, samples=samples.count, held_out=len(samples.held_out),
                         starts=opts.starts + 1, perturbation=opts.perturbation,
                         det_min=opts.det_min, mooney_rivlin=MOONEY_RIVLIN_FORM,
                         convention="energy(a, F P) = energy(b, F)")
    return rp.envelope("solve-iso", {"body": info, "point_a": args.point_a,
                                     "point_b": args.point_b}, settings, result)


def cmd_fixtures(args) -> dict:
    rows = {name: fx.BODIES[name]().metadata.get("description", "") for name in fx.BODIES}
    figs = {f.name: {"title": f.title, "a": f.a, "b": f.b} for f in fx.FIGURES}
    if args.write:
        out = Path(args.write)
        out.mkdir(parents=True, exist_ok=True)
        for name, build in fx.BODIES.items():
            bio.save(build(), out / f"{name}.json")
    return rp.envelope("fixtures", {}, {}, {"bodies": rows, "figures": figs})


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="matg", description="Material groupoids of discretised bodies")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=float, default=1e-9, help="payload tolerance")
    common.add_argument("--eig-tol", type=float, default=mg.EIG_TOL, help="eigenvalue clustering tolerance")
    common.add_argument("--orientation", choices=("SO", "O"), default="SO")
    common.add_argument("--output", choices=("json", "text"), default="json")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--solver-tol", type=float, default=1e-8, help="held-out residual threshold")
    sub = p.add_subparsers(dest="command", required=True)
    a = sub.add_parser("analyze", parents=[common], help="uniformity and homogeneity of one body")
    a.add_argument("body")
    a.set_defaults(func=cmd_analyze)
    c = sub.add_parser("compose", parents=[common], help="binary composite of two bodies")
    c.add_argument("body_a")
    c.add_argument("body_b")
    c.add_argument("--svg", help="write a three-panel plate diagram")
    c.set_defaults(func=cmd_compose)
    s = sub.add_parser("solve-iso", parents=[common], help="numeric isomorphism between two points")
    s.add_argument("body")
    s.add_argument("--point-a", type=int, default=0)
    s.add_argument("--point-b", type=int, default=1)
    s.add_argument("--samples", type=int, default=None)
    s.set_defaults(func=cmd_solve_iso)
    f = sub.add_parser("fixtures", parents=[common], help="list bundled fixtures")
    f.add_argument("--write", help="directory to write the fixture files into")
    f.set_defaults(func=cmd_fixtures)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rep = args.func(args)
    except bio.BodyParseError as e:
        print(f"matg: parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (InputError, OSError) as e:
        print(f"matg: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (mg.UnsupportedPair, UnsupportedDescriptor) as e:
        print(f"matg: unsupported descriptor: {e}", file=sys.stderr)
        return EXIT_UNSUPPORTED
    except ConsistencyError as e:
        print(f"matg: internal consistency failure: {e}", file=sys.stderr)
        return EXIT_CONSISTENCY
    sys.stdout.write(rp.to_json(rep) if args.output == "json" else rp.to_text(rep))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
