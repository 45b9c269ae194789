"""Command-line front end.

Every subcommand writes one JSON report (or a CSV projection of it).
Exit status: 0 when every check passes, 1 when an identity is falsified,
2 on usage, input or resource errors.  Reports contain no timing data, so
identical configurations give byte-identical output; wall time goes to
stderr.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io as _io
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .complex import (
    Chain,
    FreshVectorUnavailable,
    GeneralPositionUnavailable,
    LinearEngineUnavailable,
    NotACycle,
    apply_d,
    bound,
    count_iu,
    enumerate_iu,
    homology,
)
from .forms import HyperbolicSpace, InvalidSequence
from .io import (
    FormatError,
    chain_to_dict,
    params_to_dict,
    read_chain,
    read_matrix,
    read_params,
    read_sequence,
    read_targets,
)
from .ring import EnumerationCapExceeded, NotAUnit, Ring
from .stabilizer import (
    NotInStabilizer,
    ParameterError,
    PatternViolation,
    bijection_audit,
    build_stabilizer_element,
    central_extension_check,
    iter_params,
    local_action,
    orbit_stabilizer_audit,
    read_stabilizer_params,
)


class UsageError(Exception):
    pass


def _claim(name: str, value, method: str) -> dict:
    return {"name": name, "value": value, "method": method}


# -- subcommands: each returns (results, claims, passed) ---------------------------

def cmd_ring_info(args, ring, space):
    units = ring.units()
    results = {
        "modulus": ring.modulus,
        "residue_field": ring.p,
        "is_field": ring.is_field,
        "unit_count": len(units),
        "half": ring.half(),
    }
    return results, [_claim("unit_count", len(units), "enumeration")], True


def cmd_enumerate(args, ring, space):
    k = args.len
    count = count_iu(space, k, cap=args.cap)
    results = {"length": k, "count": count}
    if not args.count_only:
        if count > args.cap:
            raise EnumerationCapExceeded(count, args.cap)
        results["sequences"] = [[list(v) for v in s] for s in
                                enumerate_iu(space, k, cap=args.cap, order_seed=args.order_seed)]
    return results, [_claim(f"|IU_{k}|", count, "enumeration")], True


def cmd_homology(args, ring, space):
    groups = homology(space, args.max_degree, cap=args.cap)
    results = {"groups": [g.to_dict() for g in groups]}
    claims = []
    for g in groups:
        claim = _claim(f"H_{g.degree}", str(g), "SNF")
        if g.degree >= 1:
            claim["provenance"] = "empirical, finite residue field"
        claims.append(claim)
    return results, claims, True


def cmd_witt_complete(args, ring, space):
    from .witt import hyperbolic_complete

    space, seq = read_sequence(_need(args.seq, "--seq"))
    hb = hyperbolic_complete(space, seq)
    ok = hb.verify()
    return ({"basis": [list(v) for v in hb.vectors], "matrix": hb.matrix.tolist()},
            [_claim("gram_equals_psi", ok, "identity")], ok)


def cmd_general_position(args, ring, space):
    from .witt import find_general_position

    space, targets = read_targets(_need(args.targets, "--targets"))
    cert = find_general_position(space, targets, args.seed, trials=args.trials)
    ok = cert.verify()
    return cert.to_dict(), [_claim("certificate_valid", ok, "search")], ok


def cmd_bound_cycle(args, ring, space):
    space, z = read_chain(_need(args.chain, "--chain"))
    z.validate(space)
    tau, engine = bound(z, space, seed=args.seed)
    ok = apply_d(tau) == z
    return ({"engine": engine, "tau": chain_to_dict(space, tau)},
            [_claim("d_tau_equals_z", ok, "identity" if engine == "general_position" else "SNF")], ok)


def cmd_stabilizer(args, ring, space):
    if args.build:
        params = read_params(args.build)
        A = build_stabilizer_element(params)
        return {"matrix": A.tolist()}, [_claim("in_O", True, "identity")], True
    if args.read:
        ring, A = read_matrix(args.read)
        params = read_stabilizer_params(ring, A, _need(args.k, "--k"))
        return params_to_dict(params), [_claim("pattern", True, "identity")], True
    if args.audit:
        rep = bijection_audit(space, _need(args.k, "--k"), workers=args.workers, cap=args.cap)
        return rep, [_claim("bijection", rep["passed"], "enumeration")], rep["passed"]
    raise UsageError("stabilizer needs one of --build, --read, --audit")


def cmd_local_action(args, ring, space):
    k = _need(args.k, "--k")
    if args.matrix:
        ring, A = read_matrix(args.matrix)
        out = local_action(ring, args.a, A, k)
        return {"conjugate": out.tolist()}, [_claim("closed_form", True, "identity")], True
    count = 0
    for params in iter_params(space, k, _orthogonal_list(space.ring, space.n - k, args), cap=args.cap):
        local_action(ring, args.a, build_stabilizer_element(params), k)
        count += 1
    return ({"a": ring.reduce(args.a), "k": k, "elements": count},
            [_claim("closed_form", True, "enumeration")], True)


def _orthogonal_list(ring, m, args):
    from .groups import elements_fixing

    return elements_fixing(ring, m, 0, workers=args.workers, cap=args.cap)


def cmd_central_extension(args, ring, space):
    rep = central_extension_check(space, _need(args.k, "--k"), args.mode, samples=args.samples, seed=args.seed)
    return rep.to_dict(), [_claim("central_extension", rep.passed, "identity")], rep.passed


def cmd_orbit_audit(args, ring, space):
    rep = orbit_stabilizer_audit(space, _need(args.p, "--p"), workers=args.workers, cap=args.cap)
    return rep, [_claim("orbit_stabilizer", rep["product"], "enumeration")], rep["passed"]


def cmd_sm_search(args, ring, space):
    from .spectral import augmentation, sm_element, sm_search

    seq = sm_search(ring, args.m)
    if seq is None:
        return {"m": args.m, "sequence": None}, [_claim("S(m)", None, "search")], True
    elem = sm_element(seq)
    aug = augmentation(elem)
    results = {"m": args.m, "sequence": list(seq.units),
               "s_m": {str(u): c for u, c in sorted(elem.items())}, "augmentation": aug}
    return results, [_claim("S(m)", list(seq.units), "search"), _claim("augmentation", aug, "identity")], aug == 1


def cmd_action_check(args, ring, space):
    from .spectral import kappa_check_global, kappa_check_scaling, kappa_check_stabilizer

    if args.prop == "global":
        rep = kappa_check_global(ring, args.a, space.n, args.samples, args.seed, workers=args.workers)
    elif args.prop == "scaling":
        rep = kappa_check_scaling(ring, args.a, space.n, args.samples, args.seed, workers=args.workers)
    else:
        rep = kappa_check_stabilizer(ring, args.a, _need(args.k, "--k"), space.n, args.samples, args.seed,
                                     workers=args.workers)
    return rep.to_dict(), [_claim(args.prop, rep.passed, "identity")], rep.passed


def cmd_d1_table(args, ring, space):
    from .spectral import d1_coinvariants

    table, certs = [], []
    for p in range(1, space.n + 1):
        value, witnesses = d1_coinvariants(ring, space.n, p)
        table.append(value)
        certs.append({"p": p, "faces": [{"face": i, "witness": g.tolist()} for i, g in witnesses]})
    ok = table == [p % 2 for p in range(1, space.n + 1)]
    return {"table": table, "certificates": certs}, [_claim("d1", table, "identity")], ok


def cmd_tau_check(args, ring, space):
    from .sampling import random_chain
    from .spectral import tau, tau_commutes, tau_matrices_check

    small = HyperbolicSpace(ring, space.n - 2)
    empty = Chain(0, {(): 1})
    results = {
        "tau_empty": chain_to_dict(space, tau(empty, space)),
        "d_tau_empty_zero": not apply_d(tau(empty, space)),
        "commutes_degree0": tau_commutes(empty, space),
    }
    if small.n >= 1:
        results["commutes_generators_degree1"] = all(
            tau_commutes(Chain.generator(s), space) for s in enumerate_iu(small, 1, cap=args.cap))
        rng = np.random.default_rng(args.seed)
        results["commutes_sampled_degree1"] = all(
            tau_commutes(random_chain(small, 1, 4, rng), space) for _ in range(args.samples))
    mats = tau_matrices_check(ring, space.n, args.samples, args.seed, workers=args.workers)
    results["matrices"] = mats.to_dict()
    ok = all(v for k, v in results.items() if isinstance(v, bool)) and mats.passed
    return results, [_claim("tau_chain_map", ok, "identity")], ok


def cmd_d1_permutation(args, ring, space):
    from .spectral import d1_permutation_check

    rep = d1_permutation_check(ring, space.n, _need(args.p, "--p"), _need(args.i, "--i"),
                               args.samples, args.seed, workers=args.workers)
    return rep.to_dict(), [_claim("d1_permutation", rep.passed, "identity")], rep.passed


COMMANDS = {
    "ring-info": cmd_ring_info,
    "enumerate": cmd_enumerate,
    "homology": cmd_homology,
    "witt-complete": cmd_witt_complete,
    "general-position": cmd_general_position,
    "bound-cycle": cmd_bound_cycle,
    "stabilizer": cmd_stabilizer,
    "local-action": cmd_local_action,
    "central-extension-check": cmd_central_extension,
    "orbit-audit": cmd_orbit_audit,
    "sm-search": cmd_sm_search,
    "action-check": cmd_action_check,
    "d1-table": cmd_d1_table,
    "tau-check": cmd_tau_check,
    "d1-permutation-check": cmd_d1_permutation,
}


def _need(value, flag):
    if value is None:
        raise UsageError(f"{flag} is required")
    return value


def _positive(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ring", nargs=2, type=int, metavar=("P", "K"), default=[3, 1])
    common.add_argument("--n", type=int, default=2)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cap", type=_positive, default=10**8)
    common.add_argument("--workers", type=_positive, default=1)
    common.add_argument("--out")
    common.add_argument("--format", choices=["json", "csv"], default="json")

    parser = argparse.ArgumentParser(prog="isostab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"isostab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    p = {name: sub.add_parser(name, parents=[common]) for name in COMMANDS}

    p["enumerate"].add_argument("--len", type=int, required=True)
    p["enumerate"].add_argument("--count-only", action="store_true")
    p["enumerate"].add_argument("--order-seed", type=int)
    p["homology"].add_argument("--max-degree", type=int, default=1)
    p["witt-complete"].add_argument("--seq")
    p["general-position"].add_argument("--targets")
    p["general-position"].add_argument("--trials", type=_positive, default=10_000)
    p["bound-cycle"].add_argument("--chain")
    p["stabilizer"].add_argument("--build")
    p["stabilizer"].add_argument("--read")
    p["stabilizer"].add_argument("--audit", action="store_true")
    p["stabilizer"].add_argument("--k", type=int)
    p["local-action"].add_argument("--a", type=int, required=True)
    p["local-action"].add_argument("--k", type=int)
    p["local-action"].add_argument("--matrix")
    p["central-extension-check"].add_argument("--k", type=int)
    p["central-extension-check"].add_argument("--mode", choices=["exhaustive", "sampled"], default="exhaustive")
    p["central-extension-check"].add_argument("--samples", type=_positive, default=10_000)
    p["orbit-audit"].add_argument("--p", type=int)
    p["sm-search"].add_argument("--m", type=_positive, required=True)
    p["action-check"].add_argument("--prop", choices=["global", "scaling", "stabilizer"], required=True)
    p["action-check"].add_argument("--a", type=int, default=2)
    p["action-check"].add_argument("--k", type=int)
    p["action-check"].add_argument("--samples", type=_positive, default=1000)
    p["tau-check"].add_argument("--samples", type=_positive, default=50)
    p["d1-permutation-check"].add_argument("--p", type=int)
    p["d1-permutation-check"].add_argument("--i", type=int)
    p["d1-permutation-check"].add_argument("--samples", type=_positive, default=100)
    return parser


def _config(args) -> dict:
    skip = {"out", "format", "workers"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _csv(report: dict) -> str:
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["name", "value", "method"])
    for c in report["claims"]:
        w.writerow([c["name"], json.dumps(c["value"]), c["method"]])
    w.writerow(["passed", json.dumps(report["passed"]), ""])
    return buf.getvalue()


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    start = time.perf_counter()
    try:
        ring = Ring(*args.ring)
        if args.n < 0:
            raise UsageError("--n must be >= 0")
        space = HyperbolicSpace(ring, args.n)
        results, claims, passed = COMMANDS[args.command](args, ring, space)
    except (UsageError, FormatError, EnumerationCapExceeded, InvalidSequence, NotAUnit,
            ParameterError, NotInStabilizer, PatternViolation, NotACycle, GeneralPositionUnavailable,
            FreshVectorUnavailable, LinearEngineUnavailable, ValueError, RuntimeError) as exc:
        # SearchExhausted is a RuntimeError: a resource limit, not a falsification
        print(f"isostab {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except AssertionError as exc:
        print(f"isostab {args.command}: identity falsified: {exc}", file=sys.stderr)
        return 1
    config = _config(args)
    blob = json.dumps(config, sort_keys=True).encode()
    report = {
        "tool_version": __version__,
        "subcommand": args.command,
        "config": config,
        "config_hash": hashlib.sha256(blob).hexdigest(),
        "results": results,
        "claims": claims,
        "passed": bool(passed),
    }
    text = json.dumps(report, indent=2, sort_keys=True, default=_default) + "\n"
    if args.format == "csv":
        text = _csv(json.loads(text))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    print(f"wall time {time.perf_counter() - start:.3f} s", file=sys.stderr)
    return 0 if passed else 1


def _default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
