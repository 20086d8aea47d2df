"""Command-line front end: JSON in, JSON report out, three-valued exit codes.

Exit codes: 0 pass or success, 1 fail or refuted, 2 unresolved up to a bound,
3 usage or input error.  Every JSON argument accepts either a file path or an
inline JSON document.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Sequence

from . import matrices, measure, spectrum, universal
from .cantor import Clopen, canonicalize
from .coeff import IntVector, ModInt, RatLex, System, parse_system
from .errors import (
    FiberJointFailed,
    HomspecError,
    IncompatibleInput,
    NoPartition,
    NonUnique,
    NoRepresentation,
    NotASpectrum,
    NotCyclic,
    NoWitnessUpToBound,
)

EXIT_PASS, EXIT_FAIL, EXIT_UNRESOLVED, EXIT_USAGE = 0, 1, 2, 3

# Exceptions that mean "the requested object does not exist" rather than bad input.
_REFUTATIONS = (
    NotASpectrum,
    NoPartition,
    NonUnique,
    NotCyclic,
    IncompatibleInput,
    FiberJointFailed,
    NoRepresentation,
)


class UsageError(Exception):
    """Malformed command line or input document."""


# ---------------------------------------------------------------------------
# Input helpers
# ---------------------------------------------------------------------------


def _load_json(arg: str | None, what: str) -> Any:
    if arg is None:
        raise UsageError(f"--{what} is required")
    text = arg.strip()
    if not text.startswith(("{", "[")):
        try:
            text = Path(arg).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {what}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} is not valid JSON: {exc}") from exc


def _preset(name: str, e: str | None, mod: int | None) -> spectrum.Spectrum:
    if name == "good-q":
        s = RatLex(1)
        return spectrum.Good(s, s(e or 1))
    if name == "full-q":
        s = RatLex(1)
        return spectrum.Full(s, s(e or 1))
    if name == "full-z":
        s = IntVector(1)
        return spectrum.Full(s, s(int(e or 1)))
    if name == "full-zmod":
        if mod is None:
            raise UsageError("full-zmod needs --mod")
        s = ModInt(mod)
        return spectrum.Full(s, s(int(e or 1)))
    raise UsageError(f"unknown preset {name!r}")


def _spectrum(args) -> spectrum.Spectrum:
    if getattr(args, "ctor", None):
        return _preset(args.ctor, getattr(args, "e", None), getattr(args, "mod", None))
    return spectrum.build(_load_json(args.spectrum, "spectrum"))


def _measure(arg: str | None) -> measure.FiniteMeasure:
    return measure.FiniteMeasure.from_json(_load_json(arg, "measure"))


def _clopen(text: str) -> Clopen:
    """Comma-separated cylinder words; ``1`` alone is the whole space."""
    words = [w for w in text.split(",") if w != ""]
    return canonicalize(words)


def _clopen_list(data: Sequence[Sequence[str]]) -> list[Clopen]:
    return [canonicalize(words) for words in data]


def _context(args) -> measure.SynthContext:
    spec = _spectrum(args)
    mu = _measure(args.measure)
    if mu.system != spec.system:
        raise UsageError("measure and spectrum use different systems")
    return measure.SynthContext(spec, mu, measure.SynthLog(mu))


def _coords(text: str) -> list[str]:
    return [t.strip() for t in text.split(",") if t.strip()]


# ---------------------------------------------------------------------------
# Subcommands; each returns (exit code, report)
# ---------------------------------------------------------------------------

Report = tuple[int, Any]

_VERDICT_CODES = {"pass": EXIT_PASS, "fail": EXIT_FAIL, "unresolved": EXIT_UNRESOLVED}


def cmd_check_spectrum(args) -> Report:
    spec = _spectrum(args)
    which = _coords(args.axioms) if args.axioms else spectrum.AXIOMS
    report = spectrum.check_axioms(spec, which, bound=args.bound)
    return _VERDICT_CODES[report.overall], {
        "spectrum": spec.to_json(),
        "overall": report.overall,
        "results": report.to_json(),
    }


def cmd_check_pospec(args) -> Report:
    p = spectrum.build_pospec(_load_json(args.pospec, "pospec"))
    probes = None
    if args.probe:
        probes = [p.system.wrap(p.system.load(_coords(x))) for x in args.probe]
    report = spectrum.check_pospec(
        p, bound=args.bound, supersolid=args.supersolid, probes=probes, chain_bound=args.chain_bound
    )
    return _VERDICT_CODES[report.overall], {"overall": report.overall, "results": report.to_json()}


def cmd_enumerate_h2(args) -> Report:
    system = parse_system(_load_json(args.system, "system"))
    found = spectrum.enumerate_h2_small(system)
    return EXIT_PASS, {"count": len(found), "spectra": [h.to_json() for h in found]}


def cmd_synth(args) -> Report:
    spec = _spectrum(args)
    mu, log = measure.synthesize(
        spec, args.depth, realize_pairs=args.pairs, realize_4ep=args.fourep, realize_triples=args.triples
    )
    report = {"measure": mu.to_json(), "log": log.to_json(), "compatible": measure.is_compatible(mu, spec)}
    if args.measure_out:
        Path(args.measure_out).write_text(json.dumps(mu.to_json(), sort_keys=True, indent=2) + "\n")
    return EXIT_PASS, report


def cmd_iso_extend(args) -> Report:
    ctx = _context(args)
    data = _load_json(args.phi, "phi")
    phi = measure.PartialIso(tuple(_clopen_list(data["source"])), tuple(_clopen_list(data["target"])))
    out = measure.extend_partial_iso(ctx, phi, _clopen(args.clopen), side=args.side)
    ok = out.preserves_values(ctx.measure)
    return (EXIT_PASS if ok else EXIT_FAIL), {
        "phi": out.to_json(),
        "measure": ctx.measure.to_json(),
        "log": ctx.log.to_json() if ctx.log else None,
        "preserves_values": ok,
    }


def cmd_equi(args) -> Report:
    ctx = _context(args)
    found = measure.equi_partition(ctx, _clopen(args.clopen), args.n)
    if found is None:
        return EXIT_FAIL, {"partition": None}
    return EXIT_PASS, {
        "partition": [p.to_json() for p in found.parts],
        "common": found.common.to_json(),
        "realizable": [x.to_json() for x in found.realizable],
        "non_unique": found.non_unique,
        "measure": ctx.measure.to_json(),
    }


def cmd_mun(args) -> Report:
    ctx = _context(args)
    nu = measure.mu_N(ctx, args.n)
    return EXIT_PASS, {"mu_n": nu.to_json(), "measure": ctx.measure.to_json()}


def cmd_filling(args) -> Report:
    ctx = _context(args)
    group = parse_system(_load_json(args.group, "group"))
    report = measure.filling_check(ctx, group, args.depth, values=args.values)
    return _VERDICT_CODES.get(report.verdict, EXIT_UNRESOLVED), report.to_json()


def cmd_gamma(args) -> Report:
    mu = _measure(args.measure)
    data = _load_json(args.phi, "phi")
    phi = measure.PartialIso.make(mu, _clopen_list(data["source"]), _clopen_list(data["target"]))
    return EXIT_PASS, {"gamma": matrices.gamma_of(phi, mu).to_json()}


def _matrix(arg: str | None, what: str) -> matrices.CompatMatrix:
    return matrices.CompatMatrix.from_json(_load_json(arg, what))


def cmd_compat(args) -> Report:
    spec = _spectrum(args)
    ok = matrices.is_compatible_matrix(_matrix(args.matrix, "matrix"), spec)
    return (EXIT_PASS if ok else EXIT_FAIL), {"verdict": ok}


def cmd_decompose(args) -> Report:
    spec = _spectrum(args)
    a = _matrix(args.matrix, "matrix")
    c, f = matrices.cyclic_decompose(a, spec)
    ok = matrices.verify_morphism(f)
    return (EXIT_PASS if ok else EXIT_FAIL), {
        "cyclic": c.to_json(),
        "morphism": f.to_json(),
        "polycycle": matrices.polycycle_convert(c).to_json(),
        "verified": ok,
    }


def _default_search_pair(e: int) -> tuple[matrices.CompatMatrix, matrices.CompatMatrix, spectrum.Spectrum]:
    """The antidiagonal and diagonal pair with entries ``e/2``.

    Even totals live in ``Full(Z, e)``; odd totals need halves, so they use ``Full(Q, e)``.
    """
    s: System = IntVector(1) if e % 2 == 0 else RatLex(1)
    half = s(e).scale(Fraction(1, 2))
    a = matrices.CompatMatrix.from_rows(s, [[None, half], [half, None]])
    b = matrices.CompatMatrix.from_rows(s, [[half, None], [None, half]])
    return a, b, spectrum.Full(s, s(e))


def _joint_report(result) -> Report:
    if isinstance(result, matrices.ExhaustedBound):
        return EXIT_UNRESOLVED, result.to_json()
    target, left, right = result
    ok = matrices.verify_morphism(left) and matrices.verify_morphism(right)
    out = result.to_json()
    out["verified"] = ok
    return (EXIT_PASS if ok else EXIT_FAIL), out


def cmd_joint(args) -> Report:
    if args.recipe == "goodlike":
        system = parse_system(_load_json(args.system, "system"))
        omega = system.wrap(system.load(_coords(args.omega)))
        gamma = matrices.Polycycle.from_json(system, _load_json(args.left, "left"))
        delta = matrices.Polycycle.from_json(system, _load_json(args.right, "right"))
        return _joint_report(matrices.joint_polycycle_goodlike(gamma, delta, omega))
    if args.left is None and args.right is None and args.recipe == "search":
        a, b, spec = _default_search_pair(int(args.e or 2))
    else:
        spec = _spectrum(args)
        a, b = _matrix(args.left, "left"), _matrix(args.right, "right")
    if args.recipe == "ring":
        return _joint_report(matrices.joint_target_ring(a, b, spec))
    if args.recipe == "qvector":
        return _joint_report(matrices.joint_target_qvector(a, b, spec))
    return _joint_report(matrices.bounded_joint_search(a, b, spec, args.max_dim))


def cmd_amalgamate(args) -> Report:
    system = parse_system(_load_json(args.system, "system"))
    omega = system.wrap(system.load(_coords(args.omega)))
    base = matrices.Polycycle.from_json(system, _load_json(args.base, "base"))
    gamma = matrices.Polycycle.from_json(system, _load_json(args.left, "left"))
    delta = matrices.Polycycle.from_json(system, _load_json(args.right, "right"))
    u = matrices.PolycycleMorphism(base, gamma, tuple(_load_json(args.u, "u")))
    v = matrices.PolycycleMorphism(base, delta, tuple(_load_json(args.v, "v")))
    if not matrices.polycycle_compatible(base, spectrum.Good(system, omega)):
        raise IncompatibleInput("the base polycycle does not add up to omega")
    return _joint_report(matrices.JointTarget(*matrices.amalgamate_polycycles(base, gamma, delta, u, v)))


def cmd_rokhlin(args) -> Report:
    system = parse_system(_load_json(args.system, "system")) if args.system else None
    e: Any = _coords(args.e) if args.e is not None else []
    if args.kind == "zd":
        e = [int(x) for x in e]
    elif system is not None:
        e = system.wrap(system.load(e if len(e) != 1 else e[0]))
    verdict = matrices.rokhlin_criterion(args.kind, e, system)
    return (EXIT_PASS if verdict else EXIT_FAIL), {"verdict": verdict}


def cmd_weights(args) -> Report:
    vectors = _load_json(args.input, "input")
    w = universal.injective_weights(vectors)
    images = [str(w.apply(v)) for v in vectors]
    return EXIT_PASS, {**w.to_json(), "images": images}


def cmd_represent(args) -> Report:
    nu, m = _measure(args.nu), _measure(args.m)
    rep = universal.represent_measure(nu, m, mode=args.mode)
    return EXIT_PASS, rep.to_json()


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def _add_spectrum_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--spectrum", help="spectrum constructor tree (file or inline JSON)")
    p.add_argument("--ctor", choices=["good-q", "full-q", "full-z", "full-zmod"], help="built-in spectrum")
    p.add_argument("--e", help="total value for --ctor presets")
    p.add_argument("--mod", type=int, help="modulus for full-zmod")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="homspec", description=__doc__.splitlines()[0])
    parser.add_argument("--format", choices=["json", "text"], default="json")
    parser.add_argument("--out", help="also write the report to this file")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, func: Callable[[Any], Report], help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, help=help_text)
        p.set_defaults(func=func)
        return p

    p = add("check-spectrum", cmd_check_spectrum, "check the spectrum axioms up to a bound")
    _add_spectrum_flags(p)
    p.add_argument("--bound", type=int, default=100)
    p.add_argument("--axioms", help="comma-separated subset, e.g. Sp0,Sp4a")

    p = add("check-pospec", cmd_check_pospec, "check a linear pospec")
    p.add_argument("--pospec", required=True)
    p.add_argument("--bound", type=int, default=100)
    p.add_argument("--supersolid", action="store_true")
    p.add_argument("--probe", action="append", help="comma-separated coordinates of a probe value")
    p.add_argument("--chain-bound", type=int)

    p = add("enumerate-h2", cmd_enumerate_h2, "list the binary spectra of a small finite group")
    p.add_argument("--system", required=True)

    p = add("synth", cmd_synth, "synthesize a compatible finite measure")
    _add_spectrum_flags(p)
    p.add_argument("--depth", type=int, default=3)
    p.add_argument("--pairs", type=int, default=0)
    p.add_argument("--fourep", type=int, default=0)
    p.add_argument("--triples", type=int, default=0)
    p.add_argument("-o", dest="measure_out", help="write the measure alone to this file")

    for name, func, help_text in (
        ("iso-extend", cmd_iso_extend, "extend a partial isomorphism by one clopen"),
        ("equi", cmd_equi, "find an equi-measured partition"),
        ("mun", cmd_mun, "compute the measure mu_N"),
        ("filling", cmd_filling, "check the group-filling property on probes"),
    ):
        p = add(name, func, help_text)
        _add_spectrum_flags(p)
        p.add_argument("--measure", required=True)
        if name == "iso-extend":
            p.add_argument("--phi", required=True)
            p.add_argument("--clopen", required=True, help="comma-separated cylinder words")
            p.add_argument("--side", choices=["source", "target"], default="source")
        elif name == "equi":
            p.add_argument("--clopen", default="")
            p.add_argument("-n", type=int, required=True)
        elif name == "mun":
            p.add_argument("-n", type=int, required=True)
        else:
            p.add_argument("--group", required=True, help="system descriptor of the filling group")
            p.add_argument("--depth", type=int, default=3)
            p.add_argument("--values", type=int, default=12)

    p = add("gamma", cmd_gamma, "matrix of a partial isomorphism")
    p.add_argument("--measure", required=True)
    p.add_argument("--phi", required=True)

    p = add("compat", cmd_compat, "check compatibility of a matrix")
    _add_spectrum_flags(p)
    p.add_argument("--matrix", required=True)

    p = add("decompose", cmd_decompose, "map a compatible matrix into a cyclic one")
    _add_spectrum_flags(p)
    p.add_argument("--matrix", required=True)

    p = add("joint", cmd_joint, "find a joint target for two matrices or polycycles")
    _add_spectrum_flags(p)
    p.add_argument("--recipe", choices=["ring", "qvector", "goodlike", "search"], required=True)
    p.add_argument("--left")
    p.add_argument("--right")
    p.add_argument("--system", help="system descriptor for goodlike polycycles")
    p.add_argument("--omega", default="1")
    p.add_argument("--max-dim", type=int, default=4)

    p = add("amalgamate", cmd_amalgamate, "amalgamate two good-like polycycles over a base")
    p.add_argument("--system", required=True)
    p.add_argument("--omega", default="1")
    p.add_argument("--base", required=True)
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.add_argument("--u", required=True, help="position map of the base into the left polycycle")
    p.add_argument("--v", required=True, help="position map of the base into the right polycycle")

    p = add("rokhlin", cmd_rokhlin, "closed-form Rokhlin criteria")
    p.add_argument("--kind", choices=["zd", "filling"], required=True)
    p.add_argument("--e", help="comma-separated coordinates of the total value")
    p.add_argument("--system")

    _add_universal(sub)
    group = sub.add_parser("universal", help="weights and representations (same as the top-level commands)")
    _add_universal(group.add_subparsers(dest="universal_command", required=True))
    return parser


def _add_universal(sub) -> None:
    p = sub.add_parser("weights", help="injective weights for rational vectors")
    p.set_defaults(func=cmd_weights)
    p.add_argument("-i", "--input", required=True)

    p = sub.add_parser("represent", help="write one measure as a function of another")
    p.set_defaults(func=cmd_represent)
    p.add_argument("--nu", required=True)
    p.add_argument("--m", required=True)
    p.add_argument("--mode", choices=["qlinear", "group"], default="qlinear")


def _render_text(report: Any, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(report, dict):
        lines = []
        for k in sorted(report):
            v = report[k]
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.append(_render_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {json.dumps(v)}")
        return "\n".join(lines)
    if isinstance(report, list):
        return "\n".join(
            f"{pad}-\n{_render_text(x, indent + 1)}" if isinstance(x, (dict, list)) else f"{pad}- {json.dumps(x)}"
            for x in report
        )
    return f"{pad}{json.dumps(report)}"


def render(report: Any, fmt: str) -> str:
    if fmt == "text":
        return _render_text(report)
    return json.dumps(report, sort_keys=True, indent=2)


def run(argv: Sequence[str] | None = None, stdout=None) -> int:
    """Execute one command; the report goes to ``stdout`` and the exit code is returned."""
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PASS if exc.code == 0 else EXIT_USAGE
    try:
        code, report = args.func(args)
    except UsageError as exc:
        print(json.dumps({"error": "usage", "detail": str(exc)}), file=stdout)
        return EXIT_USAGE
    except _REFUTATIONS as exc:
        code, report = EXIT_FAIL, {"error": type(exc).__name__, "detail": str(exc)}
    except NoWitnessUpToBound as exc:
        code, report = EXIT_UNRESOLVED, {"error": type(exc).__name__, "detail": str(exc)}
    except (HomspecError, KeyError, TypeError, ValueError) as exc:
        print(json.dumps({"error": type(exc).__name__, "detail": str(exc)}), file=stdout)
        return EXIT_USAGE
    text = render(report, args.format)
    print(text, file=stdout)
    if args.out:
        Path(args.out).write_text(text + "\n")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
