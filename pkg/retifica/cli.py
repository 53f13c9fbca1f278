import argparse
import os
import re
import sys
from typing import Dict, List, Optional, Sequence

from mpmath import nstr

from retifica.core.grammar import parse_multipoly
from retifica.cremona import apply_to_surface, cremona_from_monoid, verify_cremona
from retifica.errors import NotGenericallyFinite, SearchExhausted, VerificationError
from retifica.interfaces.models import RunConfig
from retifica.lemmas import (
    beta_of,
    check_cubic_remainder,
    check_dimension_inequality,
    check_quadratic_inequality,
    cubic_residual,
    quadratic_roots,
    threshold_h,
    xi_constant,
)
from retifica.logger import logger, set_verbosity
from retifica.monoids import (
    dim_formula_Md,
    dim_formula_Mdpq,
    find_double_vertex_monoid,
    make_monoid,
    monoid_basis,
)
from retifica.procedures import demo_orbit, rectify
from retifica.surfaces import build_lambda_M, image_degree
from retifica.util.descriptors import (
    SCHEMA_VERSION,
    dump_json,
    map_from_dict,
    map_to_dict,
    monoid_to_dict,
    orbit_to_dict,
    read_json,
    surface_from_dict,
    surface_to_dict,
    trace_to_dict,
)

__all__ = ["main", "build_parser", "parse_grid"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_EXHAUSTED = 3
EXIT_VERIFICATION = 4

_RANGE = re.compile(r"^([ab])=(\d+)(?:\.\.(\d+))?$")


def parse_grid(text: str) -> Dict[str, List[int]]:
    """Parse ``a=2..6,b=1..6`` into inclusive integer ranges."""
    grid: Dict[str, List[int]] = {}
    for item in text.split(","):
        match = _RANGE.match(item.strip())
        if not match:
            raise ValueError(f"Malformed grid item {item!r}, expected e.g. a=2..6")
        name, lo, hi = match.group(1), int(match.group(2)), match.group(3)
        hi = int(hi) if hi is not None else lo
        if hi < lo:
            raise ValueError(f"Empty range in {item!r}")
        grid[name] = list(range(lo, hi + 1))
    for name in ("a", "b"):
        if name not in grid:
            raise ValueError(f"Grid must give a range for {name}")
    return grid


def _emit(data, config: RunConfig):
    text = dump_json(data)
    if config.output:
        with open(config.output, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_monoid_dim(args, config: RunConfig) -> int:
    vertexes = sorted({int(v[1]) for v in args.vertexes})
    enumerated = monoid_basis(args.d, vertexes).dim
    formula = dim_formula_Mdpq(args.d) if len(vertexes) == 2 else dim_formula_Md(args.d)
    _emit({"d": args.d, "vertexes": args.vertexes, "enumerated": enumerated, "formula": formula,
           "match": enumerated == formula}, config)
    return EXIT_OK


def cmd_find_monoid(args, config: RunConfig) -> int:
    surface = surface_from_dict(read_json(args.surface), config.seed)
    out = {"schema": SCHEMA_VERSION, "kind": "find-monoid", "d": None, "monoid": None}
    if surface.ambient_dim == 3:
        lam = build_lambda_M(surface, args.beta or 1, config.seed, height=config.height, retries=config.retries)
        out["lambda"] = surface_to_dict(lam.result)
        surface = lam.result
    elif surface.ambient_dim != 4:
        raise ValueError(f"Expected a surface in P3 or P4, got P{surface.ambient_dim}")
    degrees = [args.d] if args.d else range(2, config.d_max + 1)
    for d in degrees:
        monoid = find_double_vertex_monoid(surface, d, config.seed, config.draws, config.height)
        if monoid is not None:
            out["d"] = d
            out["monoid"] = monoid_to_dict(monoid)
            break
    _emit(out, config)
    return EXIT_OK if out["monoid"] else EXIT_EXHAUSTED


def cmd_cremona(args, config: RunConfig) -> int:
    if args.action == "build":
        monoid = make_monoid(parse_multipoly(args.monoid, 5), (0, 4))
        _emit(map_to_dict(cremona_from_monoid(monoid, config.trials, config.seed)), config)
        return EXIT_OK
    omega = map_from_dict(read_json(args.map))
    if args.action == "verify":
        ok = verify_cremona(omega, config.trials, config.seed)
        _emit({"verified": ok, "trials": config.trials, "degrees": list(omega.degrees)}, config)
        return EXIT_OK if ok else EXIT_VERIFICATION
    surface = surface_from_dict(read_json(args.surface), config.seed)
    if args.invert:
        omega = omega.inverted()
    image = apply_to_surface(omega, surface, config.seed, config.height)
    out = surface_to_dict(image)
    out["image_degree"] = _degree_or_none(image, config)
    _emit(out, config)
    return EXIT_OK


def _degree_or_none(surface, config: RunConfig) -> Optional[int]:
    try:
        return image_degree(surface, config.seed, config.height)
    except (NotGenericallyFinite, SearchExhausted) as e:
        logger.warning(f"Surface degree unavailable: {e}")
        return None


def cmd_rectify(args, config: RunConfig) -> int:
    surface = surface_from_dict(read_json(args.surface), config.seed)
    trace = rectify(surface, config)
    degrees = [_degree_or_none(trace.initial, config)]
    for n, step in enumerate(trace.steps, 1):
        degrees.append(_degree_or_none(step.result, config))
        for p in step.projections:
            logger.info(
                f"step {n}.{p.index}: beta={p.beta}, d={p.d}, map degrees {p.cremona.degrees}, "
                f"surface degree {degrees[-1]}, {p.seconds:.2f}s"
            )
    _emit(trace_to_dict(trace, config.timings, degrees), config)
    return EXIT_OK


def _constants(precision: int) -> Dict[str, str]:
    xi = xi_constant(precision)
    a1, a2 = quadratic_roots(precision)
    residual = cubic_residual(xi, precision)
    return {
        "xi": nstr(xi, precision),
        "a1": nstr(a1, precision),
        "a2": nstr(a2, precision),
        "cubic_residual": nstr(residual, 5),
    }


def _lemma_row(a: int, b: int, h_max: int, precision: int) -> Dict[str, object]:
    quadratic_ok = True
    cubic_ok = True
    for h in range(1, min(h_max, 100) + 1):
        beta, eps = beta_of(a * h, a, precision)
        quadratic_ok &= check_quadratic_inequality(a, b, beta, a * h).verdict
        if eps > 0:
            cubic_ok &= bool(check_cubic_remainder(h, eps, a, precision).verdict)
    threshold = threshold_h(a, b, h_max, precision) if a >= 2 else None
    row = {"a": a, "b": b, "threshold_h": threshold, "quadratic": quadratic_ok, "cubic_remainder": cubic_ok}
    if threshold is not None:
        d = a * threshold
        beta, _ = beta_of(d, a, precision)
        row["dimension"] = check_dimension_inequality(a, b, beta, d).as_dict()
    return row


def cmd_verify_lemmas(args, config: RunConfig) -> int:
    if args.constants:
        _emit(_constants(config.precision), config)
        return EXIT_OK
    grid = parse_grid(args.grid)
    rows = [_lemma_row(a, b, args.h_max, config.precision) for a in grid["a"] for b in grid["b"]]
    failed = [r for r in rows if not (r["quadratic"] and r["cubic_remainder"])]
    failed += [r for r in rows if r["a"] >= 2 and r["threshold_h"] is None]
    if args.json:
        _emit({"schema": SCHEMA_VERSION, "kind": "lemmas", "h_max": args.h_max, "rows": rows}, config)
    else:
        for r in rows:
            print(
                f"a={r['a']} b={r['b']} h*={r['threshold_h']} "
                f"quadratic={'ok' if r['quadratic'] else 'FAIL'} "
                f"cubic={'ok' if r['cubic_remainder'] else 'FAIL'}"
            )
    return EXIT_VERIFICATION if failed else EXIT_OK


def cmd_demo_orbit(args, config: RunConfig) -> int:
    scroll = surface_from_dict(read_json(args.scroll), config.seed)
    result = demo_orbit(scroll, args.d1, args.d2, config)
    _emit(orbit_to_dict(result, config.timings), config)
    return EXIT_OK


def _common_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    defaults = RunConfig()
    common.add_argument("--seed", type=int, default=defaults.seed, help="Master seed (RECT_SEED overrides)")
    common.add_argument("--height", type=int, default=defaults.height, help="Height of random rationals")
    common.add_argument("--beta-max", type=int, default=defaults.beta_max)
    common.add_argument("--d-max", type=int, default=defaults.d_max)
    common.add_argument("--precision", type=int, default=defaults.precision, help="Decimal digits")
    common.add_argument("--trials", type=int, default=defaults.trials, help="Identity-test points")
    common.add_argument("--four-projection", action="store_true")
    common.add_argument("--output", default=None, help="Write JSON here instead of stdout")
    common.add_argument("--timings", action="store_true", help="Include wall-clock times in the output")
    common.add_argument("--verbose", action="store_true")
    common.add_argument("--quiet", action="store_true")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_options()
    parser = argparse.ArgumentParser(prog="retifica", description="Cremona rectification of ruled surfaces")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("monoid-dim", parents=[common], help="Dimension of a monoid system")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--vertexes", nargs="+", choices=["p0", "p4"], default=["p0"])
    p.set_defaults(func=cmd_monoid_dim)

    p = sub.add_parser("find-monoid", parents=[common], help="Double-vertex monoid through a surface")
    p.add_argument("--surface", required=True)
    p.add_argument("--d", type=int, default=None)
    p.add_argument("--beta", type=int, default=None, help="Fiber count when the surface is in P3")
    p.set_defaults(func=cmd_find_monoid)

    p = sub.add_parser("cremona", help="Build, verify or apply a monoid Cremona map")
    actions = p.add_subparsers(dest="action", required=True)
    q = actions.add_parser("build", parents=[common])
    q.add_argument("--monoid", required=True, help="Form in x0..x4 with vertexes p0 and p4")
    q = actions.add_parser("verify", parents=[common])
    q.add_argument("--map", required=True)
    q = actions.add_parser("apply", parents=[common])
    q.add_argument("--map", required=True)
    q.add_argument("--surface", required=True)
    q.add_argument("--invert", action="store_true")
    p.set_defaults(func=cmd_cremona)

    p = sub.add_parser("rectify", parents=[common], help="Rectify a ruled surface to a scroll")
    p.add_argument("--surface", required=True)
    p.set_defaults(func=cmd_rectify)

    p = sub.add_parser("verify-lemmas", parents=[common], help="Check the dimension-count inequalities")
    p.add_argument("--grid", default="a=2..6,b=1..6")
    p.add_argument("--h-max", type=int, default=200)
    p.add_argument("--json", action="store_true")
    p.add_argument("--constants", action="store_true")
    p.set_defaults(func=cmd_verify_lemmas)

    p = sub.add_parser("demo-orbit", parents=[common], help="Move a scroll and rectify it back")
    p.add_argument("--scroll", required=True)
    p.add_argument("--d1", type=int, default=2)
    p.add_argument("--d2", type=int, default=None)
    p.set_defaults(func=cmd_demo_orbit)
    return parser


def _config(args) -> RunConfig:
    seed = args.seed
    if "RECT_SEED" in os.environ:
        seed = int(os.environ["RECT_SEED"])
    return RunConfig(
        seed=seed,
        height=args.height,
        beta_max=args.beta_max,
        d_max=args.d_max,
        precision=args.precision,
        trials=args.trials,
        four_projection=args.four_projection,
        output=args.output,
        timings=args.timings,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    set_verbosity(args.verbose, args.quiet)
    try:
        return args.func(args, _config(args))
    except SearchExhausted as e:
        logger.error(f"Search exhausted: {e}")
        for line in e.log:
            logger.debug(line)
        return EXIT_EXHAUSTED
    except VerificationError as e:
        logger.error(f"Verification failed: {e}")
        return EXIT_VERIFICATION
    except (ValueError, FileNotFoundError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
