"""Command-line front end: JSON documents in, JSON reports out.

Exit codes: 0 for ``ok``, 2 for a computed negative verdict (``refuted``),
1 for errors.  Reports are written with sorted keys so identical inputs give
byte-identical output.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from . import chain as ch
from . import cyclic as cy
from . import dgset as dg
from . import modules as mod
from . import site as st
from . import subdivision as sd
from .csg import CrossedFamily

EXIT = {"ok": 0, "refuted": 2, "error": 1}


class CLIError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CLIError(message)


# ---------------------------------------------------------------------------
# documents


def _read(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise CLIError(f"{path}: invalid JSON ({exc})") from None


def detect_kind(doc) -> str:
    if not isinstance(doc, dict):
        raise dg.StructuralError("document must be a JSON object")
    if "a" in doc and "b" in doc:
        return "coupled-map"
    if "structure" in doc:
        return "coupled"
    if "components" in doc:
        return "presheaf-map"
    if "sections" in doc:
        return "presheaf"
    if "maps" in doc and "source" in doc:
        return "dgmap"
    if "objects" in doc:
        return "site"
    if "generators" in doc:
        return "gset"
    if "levels" in doc:
        return "dgset"
    raise dg.StructuralError("unrecognised document type")


def _unwrap(doc):
    # a report from an object-producing command stands for the object it carries
    if isinstance(doc, dict) and "command" in doc and "status" in doc:
        obj = doc.get("payload", {}).get("object") if isinstance(doc.get("payload"), dict) else None
        if obj is None:
            raise dg.StructuralError("report does not carry an object")
        return obj
    return doc


def parse_input(doc):
    """Typed value for a JSON document (or a report carrying one) together with its kind."""
    doc = _unwrap(doc)
    kind = detect_kind(doc)
    parser = {
        "dgset": dg.from_json, "gset": sd.GSimplicialSet.from_json, "dgmap": dg.map_from_json,
        "site": st.FiniteSite.from_json, "presheaf": st.presheaf_from_json,
        "presheaf-map": st.presheaf_map_from_json, "coupled": st.coupled_from_json,
        "coupled-map": st.coupled_map_from_json,
    }[kind]
    return kind, parser(doc)


def _load(path: str, *kinds):
    kind, value = parse_input(_read(path))
    if kinds and kind not in kinds:
        raise CLIError(f"{path}: expected a {' or '.join(kinds)} document, got {kind}")
    return value


def _validate(kind: str, value) -> list[str]:
    if kind == "dgset":
        return dg.validate(value).violations
    if kind == "gset":
        return dg.validate(value.space).violations + sd.validate_action(value).violations
    if kind == "dgmap":
        return dg.validate_map(value).violations
    if kind == "site":
        return []
    if kind == "presheaf":
        return st.validate_dg_presheaf(value).violations
    if kind == "presheaf-map":
        return st.validate_presheaf_map(value).violations
    if kind == "coupled":
        return st.validate_coupled(value).violations
    return (st.validate_coupled(value.source).violations + st.validate_coupled(value.target).violations
            + st.validate_coupled_map(value).violations)


def _matrix(M) -> list:
    return [[int(v) for v in row] for row in M.tolist()]


def module_to_json(M: mod.DeltaGModule) -> dict:
    return {"family": M.family.to_json(), "truncation": M.truncation, "ring": M.ring,
            "ranks": list(M.ranks), "coefficients": M.coefficients,
            "faces": [[_matrix(F) for F in lv] for lv in M.faces],
            "degeneracies": [[_matrix(S) for S in lv] for lv in M.degeneracies],
            "actions": [{g: _matrix(A) for g, A in lv.items()} for lv in M.actions]}


def _family(args) -> CrossedFamily:
    return CrossedFamily(args.family, args.param)


def _homology_payload(H) -> dict:
    return {"groups": H.to_json(), "labels": H.labels()}


# ---------------------------------------------------------------------------
# subcommands; each returns (status, payload, trusted)


def cmd_validate(args):
    kind, value = parse_input(_read(args.input))
    viol = _validate(kind, value)
    payload = {"kind": kind, "violations": viol}
    if kind in ("dgset", "gset"):
        payload["f_vector"] = f_vector(value if kind == "dgset" else value.space)
    return ("ok" if not viol else "refuted"), payload, True


def f_vector(X: dg.DGSet) -> list[int]:
    """Nondegenerate simplices per level."""
    return [len(b) for b in ch.simplex_basis(X)]


def _object_payload(X: dg.DGSet) -> dict:
    return {"object": dg.to_json(X), "f_vector": f_vector(X), "level_counts": X.counts()}


def cmd_standard(args):
    return "ok", _object_payload(dg.standard(_family(args), args.n, args.truncate, args.boundary)), True


def cmd_free(args):
    X = _load(args.input, "dgset")
    return "ok", _object_payload(dg.free(_family(args), X)), True


def cmd_sphere(args):
    return "ok", _object_payload(dg.sphere(_family(args), args.n, args.truncate, args.model)), True


def cmd_subdivide(args):
    X = _load(args.input, "dgset")
    try:
        G = sd.induced_action(X, args.kind, args.r)
    except dg.ConstructionError:
        G = None
    if G is not None:
        S = G.space
        obj = G.to_json()
    else:
        S = {"edgewise": lambda: sd.edgewise(X, args.r), "segal": lambda: sd.segal(X),
             "dihedral": lambda: sd.dihedral_sbd(X, args.r)}[args.kind]()
        obj = dg.to_json(S)
    return "ok", {"object": obj, "f_vector": f_vector(S), "level_counts": S.counts(),
                  "group_order": G.order if G else 1}, True


def cmd_fixed_points(args):
    G = _load(args.input, "gset")
    words = [w.strip() for w in args.subgroup.split(",") if w.strip()]
    return "ok", _object_payload(sd.fixed_points(G, words)), True


def cmd_so2_fix(args):
    X = _load(args.input, "dgset")
    return "ok", {"vertices": sd.so2_fix(X)}, True


def cmd_homology(args):
    X = _load(args.input, "dgset")
    C = ch.chains(X, reduced=args.reduced, ring=args.mod)
    H = ch.homology(C, args.max_dim)
    payload = _homology_payload(H)
    if args.max_dim > C.top:
        payload["note"] = f"degrees above {C.top} are not computed at truncation {X.truncation}"
    return "ok", payload, all(H.trusted)


def cmd_em_object(args):
    A = st.parse_group(args.A)
    M = mod.em_object(_family(args), A, args.n, args.truncate, args.model)
    H = mod.module_homology(M)
    return "ok", {"module": module_to_json(M), "homotopy": H.to_json()}, all(H.trusted)


def cmd_cyclic_homology(args):
    X = _load(args.input, "dgset")
    M = mod.free_abelian(X, ring=args.mod)
    HC, HH = cy.cyclic_homology(M, args.max_degree)
    return "ok", {"HC": _homology_payload(HC), "HH": _homology_payload(HH)}, all(HC.trusted + HH.trusted)


def cmd_dold_kan(args):
    X = _load(args.input, "dgset")
    M = mod.free_abelian(X, ring=args.mod)
    if X.family.kind == "cyclic":
        C = cy.cyclic_dold_kan(M)
        payload = {"type": "duchain", "ranks": C.ranks,
                   "boundaries": {str(n): _matrix(m) for n, m in C.boundaries.items()},
                   "deltas": {str(n): _matrix(m) for n, m in C.deltas.items()},
                   "duchain_violations": cy.validate_duchain(C).violations,
                   "roundtrip": cy.cdk_roundtrip(M)}
    else:
        C = mod.dold_kan(M)
        bd = {str(n): _matrix(m) for n, m in C.boundaries.items()}
        payload = {"type": "chain", "ranks": C.ranks, "boundaries": bd,
                   "roundtrip": mod.dk_roundtrip_module(M)}
    payload["ring"] = args.mod
    return ("ok" if payload["roundtrip"] else "refuted"), payload, True


def cmd_site_cohomology(args):
    S = _load(args.input, "site")
    H = st.site_cohomology(S, st.parse_group(args.coefficients), args.max_degree)
    return "ok", _homology_payload(H), all(H.trusted)


def cmd_local_we(args):
    f = _load(args.input, "presheaf-map")
    viol = st.validate_presheaf_map(f).violations
    if viol:
        raise CLIError("invalid presheaf map: " + "; ".join(viol[:3]))
    v = st.local_we_refuter(f, args.r_max, linear=args.linear)
    return ("refuted" if v.refuted else "ok"), v.to_json(), False


def cmd_coupled_classify(args):
    m = _load(args.input, "coupled-map")
    viol = st.validate_coupled_map(m).violations
    if viol:
        raise CLIError("invalid coupled map: " + "; ".join(viol[:3]))
    v = st.coupled_classify(m, args.r_max)
    return ("ok" if v.verdict == "weak-equivalence-candidate" else "refuted"), v.to_json(), False


def cmd_equivariant_cohomology(args):
    S = _load(args.site, "site") if args.site else None
    H = st.equivariant_cohomology_point(_family(args), args.A, args.max_degree, args.model, S)
    return "ok", _homology_payload(H), all(H.trusted)


# ---------------------------------------------------------------------------
# argument parsing


def _add_family(p, default="trivial"):
    p.add_argument("--family", default=default)
    p.add_argument("--param", type=int, default=1)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="xsimp", allow_abbrev=False, description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"xsimp {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name, fn, takes_input=True, **kw):
        p = sub.add_parser(name, allow_abbrev=False, **kw)
        if takes_input:
            p.add_argument("input", help="JSON document path, or - for standard input")
        p.add_argument("-o", "--output", help="write the report here instead of standard output")
        p.set_defaults(fn=fn)
        return p

    command("validate", cmd_validate, help="check a document against its invariants")
    p = command("standard", cmd_standard, takes_input=False, help="representable object")
    _add_family(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--truncate", type=int, required=True)
    p.add_argument("--boundary", action="store_true")
    p = command("free", cmd_free, help="free object on a simplicial set")
    _add_family(p, "cyclic")
    p = command("sphere", cmd_sphere, takes_input=False)
    _add_family(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--truncate", type=int, required=True)
    p.add_argument("--model", choices=("smash", "minimal"), default="smash")
    p = command("subdivide", cmd_subdivide)
    p.add_argument("--kind", choices=("edgewise", "segal", "dihedral"), required=True)
    p.add_argument("--r", type=int, default=1)
    p = command("fixed-points", cmd_fixed_points)
    p.add_argument("--subgroup", required=True, help="comma-separated group words, e.g. 't' or 't^2,w'")
    command("so2-fix", cmd_so2_fix)
    p = command("homology", cmd_homology)
    p.add_argument("--max-dim", type=int, required=True)
    p.add_argument("--reduced", action="store_true")
    p.add_argument("--mod", type=int, default=0)
    p = command("em-object", cmd_em_object, takes_input=False)
    _add_family(p)
    p.add_argument("--A", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--truncate", type=int, required=True)
    p.add_argument("--model", choices=("smash", "minimal"), default="smash")
    p = command("cyclic-homology", cmd_cyclic_homology)
    p.add_argument("--max-degree", type=int, required=True)
    p.add_argument("--mod", type=int, default=0)
    p = command("dold-kan", cmd_dold_kan)
    p.add_argument("--mod", type=int, default=0)
    p = command("site-cohomology", cmd_site_cohomology)
    p.add_argument("--coefficients", default="Z")
    p.add_argument("--max-degree", type=int, required=True)
    p = command("local-we", cmd_local_we)
    p.add_argument("--r-max", type=int, default=1)
    p.add_argument("--linear", action="store_true")
    p = command("coupled-classify", cmd_coupled_classify)
    p.add_argument("--r-max", type=int, default=1)
    p = command("equivariant-cohomology", cmd_equivariant_cohomology, takes_input=False)
    _add_family(p, "cyclic")
    p.add_argument("--A", required=True)
    p.add_argument("--max-degree", type=int, required=True)
    p.add_argument("--model", default="weak")
    p.add_argument("--site")
    return parser


def _echo(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("fn", "output")}


def dispatch(args) -> dict:
    try:
        status, payload, trusted = args.fn(args)
    except (CLIError, dg.StructuralError, dg.ConstructionError, st.SiteError, cy.CyclicError,
            ch.ComplexError, mod.UnsupportedError, ValueError, KeyError, OSError) as exc:
        status, payload, trusted = "error", {"error": type(exc).__name__, "message": str(exc)}, False
    return {"command": _echo(args), "status": status, "payload": payload,
            "version": __version__, "trusted": trusted}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except CLIError as exc:
        report = {"command": None, "status": "error", "version": __version__, "trusted": False,
                  "payload": {"error": "UsageError", "message": str(exc)}}
        print(json.dumps(report, sort_keys=True, indent=2))
        return EXIT["error"]
    report = dispatch(args)
    text = json.dumps(report, sort_keys=True, indent=2)
    if args.output:
        try:
            with open(args.output, "w") as fh:
                fh.write(text + "\n")
        except OSError as exc:
            print(json.dumps({"status": "error", "payload": {"error": "OSError", "message": str(exc)},
                              "version": __version__}, sort_keys=True))
            return EXIT["error"]
    else:
        print(text)
    return EXIT[report["status"]]


if __name__ == "__main__":
    sys.exit(main())
