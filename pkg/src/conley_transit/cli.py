"""Command-line surface: deterministic JSON verdicts with replay digests.

Exit codes: 0 verified/constructed, 1 verified-false, 2 error.  Verdict
bodies are byte-stable across runs; wall-clock timings live in their own
field and stay out of the digest.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from .braid import (BraidMorphism, HomologyBraid, build_homology_braid,
                    induced_braid_morphism, verify_braid_axioms)
from .budget import resolve_budget
from .connection import enumerate_connection_matrices, is_connection_matrix, validate
from .directional import SignAssignment, directional_matrix, nonzero_entry_report, relabel_in_out
from .errors import IncompatibleBlock, SchemaError, TransitError
from .fastslow import SuspensionData, assemble_fastslow, extract_singular, fastslow_residual
from .graded import GradedMap
from .matrices import Matrix
from .posets import find_stack
from .problem import ProblemFile, canonical_json, digest, parse, poset_from_json
from .transition import (check_cover, construct_stackable, construct_trivial,
                         construct_unique_k, gen_prop_report, make_certificate)

COMMANDS = ("validate", "homology", "braid-check", "cm-enumerate", "tm-verify",
            "tm-construct", "fastslow", "directional", "report")


def _interval_key(I) -> str:
    return ",".join(str(p) for p in I)


def _block_map_json(m) -> dict:
    return m.to_json()


def resolve_morphism(pf: ProblemFile, spec, src: HomologyBraid, tgt: HomologyBraid,
                     pointer: str) -> BraidMorphism:
    """Morphism specs: "identity", {"kind": "induced", "matrix": name},
    or {"kind": "explicit", "degree": r, "components": {...}}."""
    if spec == "identity" or spec is None:
        if src.braid != tgt.braid:
            raise SchemaError(pointer, "identity morphism needs equal source and target braids")
        return BraidMorphism.identity(src.braid)
    if not isinstance(spec, dict):
        raise SchemaError(pointer, "morphism spec must be \"identity\" or an object")
    kind = spec.get("kind")
    if kind == "induced":
        name = spec.get("matrix")
        if not isinstance(name, str):
            raise SchemaError(f"{pointer}/matrix", "expected a matrix name")
        return induced_braid_morphism(pf.matrix(name), src, tgt)
    if kind == "explicit":
        degree = spec.get("degree", 0)
        comps_obj = spec.get("components", {})
        if not isinstance(degree, int) or not isinstance(comps_obj, dict):
            raise SchemaError(pointer, "explicit morphism needs integer degree and components")
        comps = {}
        for key, per_degree in comps_obj.items():
            I = tuple(int(x) for x in key.split(",")) if key else ()
            blocks = {}
            for dkey, rows in per_degree.items():
                blocks[int(dkey)] = Matrix.from_rows(pf.field, rows)
            comps[I] = GradedMap.build(pf.field, src.space(I), tgt.space(I), degree, blocks)
        return BraidMorphism.build(src.braid, tgt.braid, degree, comps)
    raise SchemaError(pointer, f"unknown morphism kind {kind!r}")


def _morphism_json(m: BraidMorphism) -> dict:
    return {"degree": m.degree,
            "components": {_interval_key(I): {str(k): mat.to_json() for k, mat in gm.blocks}
                           for I, gm in m.components if I}}


def _suspension(pf: ProblemFile, spec, pointer: str) -> SuspensionData:
    if spec is None or spec == {"kind": "identity_shift"} or spec == "identity_shift":
        raise SchemaError(pointer, "suspension spec needs a space collection")
    if not isinstance(spec, dict):
        raise SchemaError(pointer, "suspension spec must be an object")
    style = spec.get("style", "sigma")
    if spec.get("kind") == "identity_shift":
        spaces = pf.space_collection(spec.get("spaces", ""))
        return SuspensionData.identity_shift(pf.field, spaces, style)
    if spec.get("kind") == "blocks":
        spaces = pf.space_collection(spec.get("spaces", ""))
        maps = []
        for p, per_degree in enumerate(spec.get("maps", [])):
            blocks = {int(k): Matrix.from_rows(pf.field, rows)
                      for k, rows in per_degree.items()}
            maps.append(GradedMap.build(pf.field, spaces[p], spaces[p].shift(1), -1, blocks))
        if len(maps) != pf.poset.n:
            raise SchemaError(pointer, "need one suspension map per element")
        return SuspensionData(tuple(maps), style)
    raise SchemaError(pointer, f"unknown suspension kind {spec.get('kind')!r}")


# -- subcommand implementations ----------------------------------------------


def run_validate(pf: ProblemFile, opts) -> dict:
    m = pf.matrix(pf.task.get("matrix", "delta"))
    triangular = m.is_upper_triangular(strict=True)
    square_zero = m.compose(m).is_zero() if m.degree == 1 else False
    ok = validate(m)
    return {"ok": ok,
            "verdict": {"valid": ok, "strictly_upper_triangular": triangular,
                        "degree": m.degree, "square_zero": square_zero},
            "witnesses": {}}


def run_homology(pf: ProblemFile, opts) -> dict:
    m = pf.matrix(pf.task.get("matrix", "delta"))
    hb = build_homology_braid(m)
    dims = {_interval_key(I): hb.space(I).to_json()
            for I in pf.poset.intervals() if I}
    return {"ok": True, "verdict": {"homology": dims}, "witnesses": {}}


def run_braid_check(pf: ProblemFile, opts) -> dict:
    m = pf.matrix(pf.task.get("matrix", "delta"))
    if not validate(m):
        return {"ok": False,
                "verdict": {"braid_axioms": {"ok": False,
                                             "reason": "not a valid boundary map"}},
                "witnesses": {}}
    hb = build_homology_braid(m, check=False)
    report = verify_braid_axioms(hb.braid)
    return {"ok": report.ok, "verdict": {"braid_axioms": report.to_json()},
            "witnesses": {}}


def run_cm_enumerate(pf: ProblemFile, opts) -> dict:
    spaces = pf.space_collection(pf.task.get("spaces", "C"))
    ref = pf.matrix(pf.task.get("reference", "delta"))
    target = build_homology_braid(ref).braid
    budget = resolve_budget(opts.budget)
    found = enumerate_connection_matrices(spaces, target, pf.poset, pf.field, budget)
    return {"ok": True,
            "verdict": {"count": len(found)},
            "witnesses": {"connection_matrices": [_block_map_json(d) for d in found]}}


def _braid_pair(pf: ProblemFile):
    hb = build_homology_braid(pf.matrix(pf.task.get("delta", "delta")))
    hb_p = build_homology_braid(pf.matrix(pf.task.get("delta_prime", "delta_prime")))
    return hb, hb_p


def run_tm_verify(pf: ProblemFile, opts) -> dict:
    hb, hb_p = _braid_pair(pf)
    T = pf.matrix(pf.task.get("t", "T"))
    theta = resolve_morphism(pf, pf.task.get("theta"), hb, hb_p, "/task/theta")
    phi = resolve_morphism(pf, pf.task.get("phi"), hb, hb, "/task/phi")
    phi_prime = resolve_morphism(pf, pf.task.get("phi_prime"), hb_p, hb_p, "/task/phi_prime")
    cert = make_certificate(T, hb, hb_p, theta, phi, phi_prime)
    verdict = {"chain": cert.check("chain"), "cover": cert.check("cover")}
    if cert.check("cover") and T.degree == 0:
        report = gen_prop_report(cert)
        verdict["gen_prop"] = report.to_json()
    return {"ok": cert.check("cover"), "verdict": verdict, "witnesses": {}}


def run_tm_construct(pf: ProblemFile, opts) -> dict:
    mode = opts.mode or pf.task.get("mode")
    hb, hb_p = _braid_pair(pf)
    theta = resolve_morphism(pf, pf.task.get("theta"), hb, hb_p, "/task/theta")
    phi = resolve_morphism(pf, pf.task.get("phi"), hb, hb, "/task/phi")
    phi_prime = resolve_morphism(pf, pf.task.get("phi_prime"), hb_p, hb_p, "/task/phi_prime")
    if mode == "trivial":
        cert = construct_trivial(hb, hb_p, theta, phi, phi_prime)
    elif mode == "stackable":
        stack = find_stack(pf.poset)
        if stack is None:
            return {"ok": False, "verdict": {"constructed": False,
                                             "reason": "order is not stackable"},
                    "witnesses": {}}
        cert = construct_stackable(hb, hb_p, theta, stack, phi, phi_prime,
                                   budget=resolve_budget(opts.budget))
        if cert is None:
            return {"ok": False, "verdict": {"constructed": False,
                                             "reason": "constraint system inconsistent"},
                    "witnesses": {}}
    elif mode == "degree-k":
        cert = construct_unique_k(hb, hb_p, theta, phi, phi_prime,
                                  budget=resolve_budget(opts.budget))
    else:
        raise SchemaError("/task/mode", f"unknown construction mode {mode!r}")
    checks = {name: val for name, val in cert.checks}
    return {"ok": all(checks.values()),
            "verdict": {"constructed": True, "checks": checks},
            "witnesses": {"T": _block_map_json(cert.T)}}


def run_fastslow(pf: ProblemFile, opts) -> dict:
    mode = opts.mode or pf.task.get("mode")
    delta_minus = pf.matrix(pf.task.get("delta_minus", "delta_minus"))
    plus_order = pf.task.get("order_plus")
    if plus_order is not None:
        plus_poset = poset_from_json(plus_order, "/task/order_plus")
    else:
        plus_poset = pf.poset
    delta_plus_raw = pf.matrix(pf.task.get("delta_plus", "delta_plus"))
    delta_plus = _rebase_matrix(delta_plus_raw, plus_poset)
    sigma = _suspension(pf, pf.task.get("sigma"), "/task/sigma")
    t_corner = _corner(pf, sigma, delta_minus)
    try:
        assembly = assemble_fastslow(delta_minus, delta_plus, sigma, t_corner)
    except IncompatibleBlock as exc:
        residual = exc.residual.to_json() if exc.residual is not None else None
        return {"ok": False,
                "verdict": {"assembled": False, "residual": residual},
                "witnesses": {}}
    if mode == "assemble":
        return {"ok": True,
                "verdict": {"assembled": True,
                            "doubled_poset": {"n": assembly.doubled.n,
                                              "labels": list(assembly.doubled.labels)}},
                "witnesses": {"delta_eps": _block_map_json(assembly.delta_eps)}}
    if mode == "extract":
        t_s, cert = extract_singular(assembly)
        return {"ok": cert.compatibility and cert.sides_agree,
                "verdict": {"certificate": cert.to_json()},
                "witnesses": {"t_singular": _block_map_json(t_s)}}
    raise SchemaError("/task/mode", f"unknown fastslow mode {mode!r}")


def _rebase_matrix(m, poset):
    from .graded import BlockGradedMap
    if poset.lt == m.poset.lt and poset.n == m.poset.n:
        return m
    return BlockGradedMap.build(m.field, poset, m.source, m.target, m.degree,
                                dict(m.entries))


def _corner(pf: ProblemFile, sigma: SuspensionData, delta_minus):
    """The corner block arrives against the suspended plus spaces."""
    from .graded import BlockGradedMap
    name = pf.task.get("t_corner", "t_corner")
    raw = pf.matrix(name)
    sus = sigma.suspended_spaces()
    if raw.source == sus:
        return raw
    return BlockGradedMap.build(raw.field, raw.poset, sus, raw.target, raw.degree,
                                dict(raw.entries))


def run_directional(pf: ProblemFile, opts) -> dict:
    T = pf.matrix(pf.task.get("t", "T"))
    signs_text = opts.signs or pf.task.get("signs")
    if not signs_text:
        raise SchemaError("/task/signs", "sign assignment required (--signs or task.signs)")
    signs = SignAssignment.parse(signs_text) if isinstance(signs_text, str) \
        else SignAssignment(tuple(signs_text))
    D, word = directional_matrix(T, signs)
    labeling = relabel_in_out(D, signs)
    return {"ok": True,
            "verdict": {"covered_word": word.to_json(),
                        "labeling": labeling.to_json(),
                        "nonzero_entries": nonzero_entry_report(D)},
            "witnesses": {"D": _block_map_json(D)}}


RUNNERS = {
    "validate": run_validate,
    "homology": run_homology,
    "braid-check": run_braid_check,
    "cm-enumerate": run_cm_enumerate,
    "tm-verify": run_tm_verify,
    "tm-construct": run_tm_construct,
    "fastslow": run_fastslow,
    "directional": run_directional,
}


def run(command: str, pf: ProblemFile, opts) -> tuple[dict, int]:
    """Execute a command, returning the certificate body and exit code."""
    task_cmd = pf.task.get("command")
    if task_cmd is not None and task_cmd != command:
        raise SchemaError("/task/command", f"problem file is for {task_cmd!r}, not {command!r}")
    t0 = time.monotonic()
    result = RUNNERS[command](pf, opts)
    elapsed = time.monotonic() - t0
    body = {
        "schema_version": 1,
        "command": command,
        "inputs_digest": digest(pf.to_json()),
        "verdict": result["verdict"],
        "witnesses": result["witnesses"],
    }
    body["digest"] = digest(body)
    body["timings"] = {"seconds": round(elapsed, 6)}
    return body, 0 if result["ok"] else 1


def run_report(args, opts) -> tuple[dict, int]:
    """Replay a stored certificate against its problem file."""
    with open(opts.certificate, "r", encoding="utf-8") as fh:
        stored = json.load(fh)
    pf = _load_problem(args, opts)
    command = stored.get("command")
    if command not in RUNNERS:
        raise SchemaError("/command", f"certificate names unknown command {command!r}")
    fresh, _ = run(command, pf, opts)
    reproduced = (fresh["digest"] == stored.get("digest")
                  and fresh["inputs_digest"] == stored.get("inputs_digest"))
    body = {
        "schema_version": 1,
        "command": "report",
        "inputs_digest": fresh["inputs_digest"],
        "verdict": {"reproduced": reproduced,
                    "stored_digest": stored.get("digest"),
                    "fresh_digest": fresh["digest"]},
        "witnesses": {},
    }
    body["digest"] = digest(body)
    body["timings"] = fresh["timings"]
    return body, 0 if reproduced else 1


def _load_problem(path: str, opts) -> ProblemFile:
    with open(path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    if opts.field:
        if isinstance(obj, dict):
            obj["field"] = opts.field
    return parse(obj)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="conley-transit",
        description="Exact transition-matrix calculus: verify and construct "
                    "connection and transition matrices.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("problem", help="problem JSON file")
    parser.add_argument("--field", default=None, help="override the coefficient field (q, f2, f<p>)")
    parser.add_argument("--budget", type=int, default=None, help="search budget (candidates)")
    parser.add_argument("--out", default=None, help="also write the certificate to this file")
    parser.add_argument("--mode", default=None, help="construction mode for tm-construct/fastslow")
    parser.add_argument("--signs", default=None, help="sign assignment for directional, e.g. +,-,+")
    parser.add_argument("--certificate", default=None, help="stored certificate for report")
    parser.add_argument("--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    opts = build_parser().parse_args(argv)
    try:
        if opts.command == "report":
            if not opts.certificate:
                raise SchemaError("/", "report needs --certificate")
            body, code = run_report(opts.problem, opts)
        else:
            pf = _load_problem(opts.problem, opts)
            body, code = run(opts.command, pf, opts)
    except TransitError as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        print(canonical_json(err))
        return 2
    except FileNotFoundError as exc:
        print(canonical_json({"error": "FileNotFound", "message": str(exc)}))
        return 2
    text = json.dumps(body, sort_keys=True, indent=2)
    print(text)
    if opts.out:
        with open(opts.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    if opts.verbose:
        print(f"exit={code}", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
