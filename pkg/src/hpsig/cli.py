"""``hpsig`` command line.

Every command prints one JSON report with the keys ``command``, ``inputs``
(sha256 per file), ``mode``, ``seed``, ``results``, ``residuals``,
``wall_time`` and ``error``.  Exit status: 0 success, 1 domain error, 2 I/O
or usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import io
from .errors import HpsigError, UnknownCommand

COMMANDS = (
    "validate", "signature", "multisig", "family", "product",
    "subdivide", "double", "bordism", "controlled-check",
)

# products with more top cells than this need --stretch
STRETCH_CELLS = 20000


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=("auto", "exact", "cyclotomic", "float"), default="auto")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--cover", help="cocycle file")
    common.add_argument("--group", help="group file")
    common.add_argument("--output", help="write the resulting complex (JSON) here")

    p = argparse.ArgumentParser(prog="hpsig", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("validate", "signature", "multisig", "subdivide", "double", "bordism"):
        s = sub.add_parser(name, parents=[common])
        s.add_argument("complex")
        if name in ("signature", "validate"):
            s.add_argument("--reverse", action="store_true", help="reverse the orientation")
            s.add_argument("--irrep", help="single irrep label (with --cover)")
    s = sub.add_parser("family", parents=[common])
    s.add_argument("complex")
    s.add_argument("--samples-per-circle", type=int, default=64)
    s.add_argument("--csv", help="write the per-sample table here")
    s = sub.add_parser("product", parents=[common])
    s.add_argument("first")
    s.add_argument("second")
    s.add_argument("--stretch", action="store_true", help="allow very large products")
    s = sub.add_parser("controlled-check", parents=[common])
    s.add_argument("--trials", type=int, default=1000)
    s.add_argument("complexes", nargs="*", help="complexes whose operators to certify")
    return p


# --- helpers ------------------------------------------------------------------------


class _Run:
    def __init__(self, args):
        self.args = args
        self.inputs: dict = {}
        self.residuals: dict = {}

    def load(self, kind: str, path):
        p = Path(path)
        self.inputs[str(path)] = io.sha256(p)
        obj = io.read_json(p)
        if kind == "complex":
            return io.complex_from_json(obj)
        if kind == "group":
            return io.group_from_json(obj)
        return io.cocycle_from_json(obj)

    def cover(self, K):
        from .covers import build_cover

        a = self.args
        if not a.cover:
            return None
        if not a.group:
            raise UsageError("--cover needs --group")
        return build_cover(K, self.load("group", a.group), self.load("cocycle", a.cover))

    @property
    def build_mode(self) -> str:
        return "float" if self.args.mode == "float" else "auto"

    @property
    def sig_mode(self) -> str:
        return {"exact": "exact", "float": "float"}.get(self.args.mode, "auto")


def _cycle(K, reverse: bool = False):
    from .errors import NotClosedOriented
    from .simplicial import certify_manifold, orientation_reverse

    cert = certify_manifold(K)
    if cert.fundamental_cycle is None:
        raise NotClosedOriented(f"{K.name or 'complex'} is not a closed oriented pseudomanifold: {cert.summary()}")
    C = cert.fundamental_cycle
    return (orientation_reverse(C) if reverse else C), cert


def _axiom_residuals(rep: dict) -> dict:
    out = {
        "b_squared": rep["chain_complex"]["residual"],
        "i": rep["i"]["residual"],
        "ii_raw": rep["ii"]["residual_raw"],
        "ii_symmetrized": rep["ii"]["residual_symmetrized"],
    }
    if "iii" in rep:
        sig = [v.get("sigma_min") for v in rep["iii"]["degrees"].values() if v.get("sigma_min") is not None]
        out["iii_sigma_min"] = min(sig) if sig else None
    return out


# --- commands -----------------------------------------------------------------------


def cmd_validate(run: _Run) -> dict:
    from .poincare import build_hp, validate_hp

    a = run.args
    K = run.load("complex", a.complex)
    C, cert = _cycle(K, a.reverse)
    cover = run.cover(K)
    if cover is None:
        rep = validate_hp(build_hp(K, C, mode=run.build_mode))
        run.residuals.update(_axiom_residuals(rep))
        return {"certificate": cert.summary(), "axioms": _jsonable(rep), "pass": rep["pass"]}
    irreps = [a.irrep] if a.irrep else [r.label for r in cover.group.irreps]
    per = {}
    for label in irreps:
        rep = validate_hp(build_hp(K, C, cover, label, run.build_mode))
        per[label] = _jsonable(rep)
        run.residuals[label] = _axiom_residuals(rep)
    return {"certificate": cert.summary(), "axioms": per, "pass": all(v["pass"] for v in per.values())}


def cmd_signature(run: _Run) -> dict:
    from .poincare import build_hp, validate_hp
    from .signature import cup_oracle_signature, multisignature, signature_details, trace_value

    a = run.args
    K = run.load("complex", a.complex)
    C, _ = _cycle(K, a.reverse)
    cover = run.cover(K)
    if cover is not None:
        ms = multisignature(cover, C, run.build_mode)
        return {
            "multisignature": ms.entries,
            "dims": ms.dims,
            "trace": str(trace_value(ms)),
            "total_signature": ms.total_signature,
            "consistent": ms.consistent,
            "axioms": "pass" if all(ms.axioms.values()) else "fail",
        }
    hp = build_hp(K, C, mode=run.build_mode)
    rep = validate_hp(hp)
    run.residuals.update(_axiom_residuals(rep))
    det = signature_details(hp, run.sig_mode)
    out = {
        "signature": int(det["signature"]),
        "axioms": "pass" if rep["pass"] else "fail",
        "method": det["method"],
        "odd_dimension": det["odd_dimension"],
    }
    if K.dim % 4 == 0 and det.get("rank", 0) and K.n(K.dim // 2) <= 2000:
        out["cup_oracle"] = cup_oracle_signature(K, C)
    return out


def cmd_multisig(run: _Run) -> dict:
    from .signature import multisignature

    a = run.args
    if not a.cover:
        raise UsageError("multisig needs --cover and --group")
    K = run.load("complex", a.complex)
    C, _ = _cycle(K)
    ms = multisignature(run.cover(K), C, run.build_mode)
    out = ms.as_dict()
    out["axioms"] = {k: ("pass" if v else "fail") for k, v in ms.axioms.items()}
    return out


def cmd_family(run: _Run) -> dict:
    from .coeff import CharacterFamily, build_lattice_cover, evaluate_family, family_csv

    a = run.args
    if not a.cover:
        raise UsageError("family needs --cover (integer-vector cocycle)")
    K = run.load("complex", a.complex)
    C, _ = _cycle(K)
    cover = build_lattice_cover(K, run.load("cocycle", a.cover))
    samples = evaluate_family(cover, CharacterFamily(cover.rank, a.samples_per_circle), C)
    text = family_csv(samples)
    if a.csv:
        Path(a.csv).write_text(text, encoding="utf-8")
    patterns: dict = {}
    for s in samples:
        key = json.dumps({"ranks": s.ranks, "signature": s.signature})
        patterns[key] = patterns.get(key, 0) + 1
    run.residuals["b_squared_max"] = max(s.bb_residual for s in samples)
    zero = next(s for s in samples if not any(s.theta))
    return {
        "rank": cover.rank,
        "samples": len(samples),
        "at_zero": {"ranks": zero.ranks, "signature": zero.signature},
        "patterns": [dict(json.loads(k), count=v) for k, v in sorted(patterns.items())],
        "signatures": sorted({s.signature for s in samples}),
        "csv": a.csv,
    }


def cmd_product(run: _Run) -> dict:
    from .signature import verify_product_signature
    from .simplicial import binomial_product_count

    a = run.args
    K = run.load("complex", a.first)
    L = run.load("complex", a.second)
    cells = binomial_product_count(K, L)
    if cells > STRETCH_CELLS and not a.stretch:
        raise UsageError(f"product has {cells} top cells; pass --stretch to run it")
    mode = "float" if a.mode == "float" or cells > STRETCH_CELLS else a.mode
    CK, _ = _cycle(K)
    CL, _ = _cycle(L)
    return verify_product_signature(K, L, CK, CL, {"exact": "exact", "float": "float"}.get(mode, "auto"))


def cmd_subdivide(run: _Run) -> dict:
    from .chain import complex_of, verify_chain_map
    from .poincare import build_hp
    from .signature import signature_complex
    from .simplicial import barycentric_subdivision, certify_manifold, subdivide_cycle

    a = run.args
    K = run.load("complex", a.complex)
    sub = barycentric_subdivision(K)
    report = verify_chain_map(sub.chain_maps, complex_of(K), complex_of(sub.complex))
    run.residuals["chain_map"] = report.deviations
    out = {
        "f_vector": list(sub.complex.f_vector),
        "euler_characteristic": sub.complex.euler_characteristic,
        "chain_map_ok": report.ok,
    }
    C = certify_manifold(K).fundamental_cycle
    if C is not None:
        sC = subdivide_cycle(sub, C)
        out["subdivided_cycle_is_cycle"] = sC.is_cycle()
        out["signature"] = signature_complex(build_hp(K, C, mode=run.build_mode), run.sig_mode)
        out["signature_subdivided"] = signature_complex(build_hp(sub.complex, sC, mode=run.build_mode))
    if a.output:
        io.write_json(a.output, io.complex_to_json(sub.complex))
    return out


def cmd_double(run: _Run) -> dict:
    from .simplicial import certify_manifold, double_along_boundary

    a = run.args
    K = run.load("complex", a.complex)
    D, cycle = double_along_boundary(K, return_cycle=True)
    cert = certify_manifold(D)
    if a.output:
        io.write_json(a.output, io.complex_to_json(D))
    return {
        "f_vector": list(D.f_vector),
        "euler_characteristic": D.euler_characteristic,
        "certificate": cert.summary(),
        "cycle_is_cycle": None if cycle is None else cycle.is_cycle(),
    }


def cmd_bordism(run: _Run) -> dict:
    from .signature import bordism_check

    K = run.load("complex", run.args.complex)
    return bordism_check(K, run.cover(K), run.build_mode)


def cmd_controlled(run: _Run) -> dict:
    from .controlled import certify_controlled, property_suite
    from .simplicial import certify_manifold

    a = run.args
    out = property_suite(a.seed, a.trials)
    certs = {}
    for path in a.complexes:
        K = run.load("complex", path)
        certs[path] = certify_controlled(K, certify_manifold(K).fundamental_cycle)
    out["certified"] = certs
    out["pass"] = out["pass"] and all(c["pass"] for c in certs.values())
    return out


HANDLERS = {
    "validate": cmd_validate,
    "signature": cmd_signature,
    "multisig": cmd_multisig,
    "family": cmd_family,
    "product": cmd_product,
    "subdivide": cmd_subdivide,
    "double": cmd_double,
    "bordism": cmd_bordism,
    "controlled-check": cmd_controlled,
}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "item"):
        return x.item()
    return x


def _report(command, run, results, error, started) -> dict:
    args = run.args if run else None
    return {
        "command": command,
        "inputs": run.inputs if run else {},
        "mode": getattr(args, "mode", None),
        "seed": getattr(args, "seed", None),
        "results": _jsonable(results),
        "residuals": _jsonable(run.residuals) if run else {},
        "wall_time": round(time.perf_counter() - started, 6),
        "error": error,
    }


def run(argv=None, stdout=None) -> int:
    """Run one command; the JSON report goes to ``stdout``. Returns the exit code."""
    stdout = stdout or sys.stdout
    argv = list(sys.argv[1:] if argv is None else argv)
    started = time.perf_counter()
    command = next((x for x in argv if not x.startswith("-")), None)
    if command is not None and command not in COMMANDS:
        err = UnknownCommand(f"unknown command {command!r}; expected one of {', '.join(COMMANDS)}")
        print(json.dumps(_report(command, None, None, _error(err), started)), file=stdout)
        return 2
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    r = _Run(args)
    try:
        results = HANDLERS[args.command](r)
    except HpsigError as exc:
        print(json.dumps(_report(args.command, r, None, _error(exc), started)), file=stdout)
        return 1
    except (OSError, json.JSONDecodeError, UsageError) as exc:
        print(json.dumps(_report(args.command, r, None, _error(exc), started)), file=stdout)
        return 2
    print(json.dumps(_report(args.command, r, results, None, started)), file=stdout)
    return 0


def _error(exc: Exception) -> dict:
    return {"type": type(exc).__name__, "message": str(exc)}


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
