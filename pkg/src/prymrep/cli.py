"""Command-line front end: reproducible cover/prym/orbit/certificate runs
with content-hashed manifests and a JSON cover cache.

Exit codes: 0 success, 1 invalid input, 2 cap exceeded, 3 verification
failure.  Artifacts are JSON files in --out; a manifest.json records the
run parameters and the content hashes of all inputs and outputs, and
re-running a manifest's command line reproduces byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys

from .util import content_hash, matrix_to_lists, vector_to_list
from .presentation import (SurfaceType, build_surface_group,
                           PresentationError)
from .covers import (FiniteGroupTable, QuotientMarking, CoverData,
                     level_marking, epi_closure_marking, is_characteristic,
                     CapExceeded)
from .generators import (standard_generators, load_library,
                         validate_mcg_relations, tokens_text)
from .prym import build_bundle, boundary_subspace, TOOL_VERSION
from .analysis import (orbit_search, marking_stabilizer, verify_certificate,
                       point_pushing_pipeline, candidate_vectors,
                       CANDIDATE_STRATEGY, CertificateError)
from . import intmat


def _write(path: str, data) -> str:
    if isinstance(data, (dict, list)):
        text = json.dumps(data, indent=2) + "\n"
    else:
        text = str(data)
    with open(path, "w", encoding="utf-8") as f:
        f.write(text)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _load_group(spec: str) -> FiniteGroupTable:
    if os.path.exists(spec):
        with open(spec, encoding="utf-8") as f:
            return FiniteGroupTable.parse(f.read())
    try:
        return FiniteGroupTable.builtin(spec)
    except ValueError:
        raise PresentationError(
            f"quotient {spec!r}: no such file and not a builtin group "
            "(builtins: q8, s3, d4, v4, zN, trivial)")


def _marking_from_args(args, pres) -> tuple:
    """Returns (marking, source description dict)."""
    if args.level is not None:
        return (level_marking(pres, args.level),
                {"kind": "level", "level": args.level})
    if args.quotient is None:
        raise PresentationError("need --level L or --quotient GROUP")
    group = _load_group(args.quotient)
    if args.epi_closure:
        mk = epi_closure_marking(pres, group, cap=args.cap)
        return (mk, {"kind": "epi-closure", "group": group.name,
                     "classes": mk.class_count})
    if not args.marking:
        raise PresentationError('need --marking "a->i,b->j" with --quotient')
    mk = QuotientMarking.parse_images(pres, group, args.marking)
    return (mk, {"kind": "quotient", "group": group.name,
                 "images": args.marking})


def _library(args, pres):
    if args.library:
        with open(args.library, encoding="utf-8") as f:
            lib = load_library(f.read(), library_id=args.library)
        if lib.presentation != pres:
            raise PresentationError("library surface mismatch")
        return lib
    return standard_generators(pres.surface)


def _cover_cached(args, marking) -> CoverData:
    key = marking.content_key()
    cache_dir = args.cache_dir
    path = os.path.join(cache_dir, f"cover-{key}.json")
    if not args.no_cache and os.path.exists(path):
        with open(path, encoding="utf-8") as f:
            rec = json.load(f)
        if rec.get("key") == key:
            return _cover_from_record(rec, marking)
    cover = CoverData(marking)
    if not args.no_cache:
        os.makedirs(cache_dir, exist_ok=True)
        _write(path, _cover_record(cover, key))
    return cover


def _cover_record(cover: CoverData, key: str) -> dict:
    return {
        "format": "cover-cache",
        "key": key,
        "table": cover.table,
        "table_inv": cover.table_inv,
        "transversal": [list(w) for w in cover.transversal],
        "tree_edge": [list(e) if e else None for e in cover.tree_edge],
        "schreier_edges": [list(e) for e in cover.schreier_edges],
        "h1_rank": cover.h1_rank,
        "h1_projection": (None if cover.h1_projection is None
                          else matrix_to_lists(cover.h1_projection)),
        "relator_lattice": matrix_to_lists(cover.relator_lattice),
    }


def _cover_from_record(rec: dict, marking) -> CoverData:
    cover = CoverData.__new__(CoverData)
    cover.marking = marking
    cover.presentation = marking.presentation
    cover.size = len(rec["table"])
    cover.table = [list(map(int, r)) for r in rec["table"]]
    cover.table_inv = [list(map(int, r)) for r in rec["table_inv"]]
    cover.transversal = [tuple(w) for w in rec["transversal"]]
    cover.tree_edge = [tuple(e) if e else None for e in rec["tree_edge"]]
    cover.schreier_edges = [tuple(e) for e in rec["schreier_edges"]]
    cover.edge_index = {e: i for i, e in enumerate(cover.schreier_edges)}
    cover.n_schreier = len(cover.schreier_edges)
    cover.schreier_names = [f"s{c}_{cover.presentation.names[j - 1]}"
                            for c, j in cover.schreier_edges]
    cover.h1_rank = int(rec["h1_rank"])
    cover.h1_projection = (None if rec["h1_projection"] is None
                           else intmat.arr(rec["h1_projection"]))
    cover.relator_lattice = (intmat.arr(rec["relator_lattice"])
                             if rec["relator_lattice"] else
                             intmat.zeros(cover.n_schreier, 0))
    cover.torsion = []
    cover._peripheral_cycles = None
    return cover


def _manifest(args, subcommand, marking_source, library_id, inputs, outputs):
    return {
        "format": "run-manifest",
        "tool_version": TOOL_VERSION,
        "subcommand": subcommand,
        "surface": args.surface,
        "marking_source": marking_source,
        "library_id": library_id,
        "caps": {"cap": args.cap, "aut_cap": args.aut_cap},
        "seed": args.seed,
        "threads": args.threads,
        "inputs": inputs,
        "outputs": outputs,
    }


def _input_hashes(args) -> dict:
    hashes = {}
    for key in ("quotient", "library", "bundle", "cert", "config"):
        path = getattr(args, key, None)
        if path and os.path.exists(path):
            with open(path, "rb") as f:
                hashes[key] = hashlib.sha256(f.read()).hexdigest()
    return hashes


# ---------------------------------------------------------------------------
# subcommands

def cmd_present(args) -> int:
    pres = build_surface_group(SurfaceType.parse(args.surface))
    s = pres.surface
    lines = [f"surface: genus {s.g}, boundary {s.n}, punctures {s.p} "
             f"(chi = {s.chi})",
             f"pi_1: {'free' if pres.is_free else 'one relator'} of rank "
             f"{pres.rank} on {', '.join(pres.names)}"]
    if pres.relator is not None:
        lines.append(f"relator: {pres.format(pres.relator)}")
    for i, z in enumerate(pres.peripheral):
        lines.append(f"peripheral z{i + 1} ({pres.peripheral_kind(i)}): "
                     f"{pres.format(z)}")
    print("\n".join(lines))
    return 0


def cmd_cover(args) -> int:
    pres = build_surface_group(SurfaceType.parse(args.surface))
    marking, source = _marking_from_args(args, pres)
    cover = _cover_cached(args, marking)
    summary = cover.summary()
    boundary = boundary_subspace(cover)
    summary["boundary_rank"] = int(boundary.rank)
    summary["dim_v"] = int(boundary.dim_v)
    summary["marking_hash"] = marking.content_key()
    summary["characteristic_flag"] = marking.characteristic
    if args.check_characteristic:
        summary["characteristic_checked"] = is_characteristic(marking).characteristic
    os.makedirs(args.out, exist_ok=True)
    out_path = os.path.join(args.out, "cover.json")
    h = _write(out_path, summary)
    man = _manifest(args, "cover", source, "", _input_hashes(args),
                    {"cover.json": h})
    _write(os.path.join(args.out, "manifest.json"), man)
    print(f"index {summary['index']}, r_K = {summary['h1_rank']}, "
          f"b = {summary['boundary_count']}, dim V_K = {summary['dim_v']}")
    if args.report:
        _report(args, "cover", summary)
    return 0


def cmd_prym(args) -> int:
    pres = build_surface_group(SurfaceType.parse(args.surface))
    marking, source = _marking_from_args(args, pres)
    lib = _library(args, pres)
    cover = _cover_cached(args, marking)
    bundle = build_bundle(cover, lib.generators, library_id=lib.library_id)
    os.makedirs(args.out, exist_ok=True)
    out_path = os.path.join(args.out, "bundle.json")
    h = _write(out_path, bundle)
    man = _manifest(args, "prym", source, lib.library_id,
                    _input_hashes(args), {"bundle.json": h})
    _write(os.path.join(args.out, "manifest.json"), man)
    print(f"prym bundle: dim V_K = {bundle['basis_meta']['dim_v']}, "
          f"{len(bundle['generators'])} generators -> {out_path}")
    return 0


def cmd_orbit(args) -> int:
    with open(args.bundle, encoding="utf-8") as f:
        bundle = json.load(f)
    names = (args.generators.split(",") if args.generators
             else [g["name"] for g in bundle["generators"]])
    gens = {g["name"]: g for g in bundle["generators"]}
    mats = [intmat.arr(gens[n]["vk_matrix"]) for n in names]
    dim = bundle["basis_meta"]["dim_v"]
    results = []
    if args.vector:
        vecs = [[int(t) for t in args.vector.split(",")]]
        strategy = "explicit-vector"
    elif args.candidates:
        vecs = candidate_vectors(mats, dim)
        strategy = CANDIDATE_STRATEGY
    else:
        raise PresentationError("need --vector v1,v2,... or --candidates")
    found = None
    for v in vecs:
        r = orbit_search(mats, v, cap=args.cap)
        results.append({"vector": list(r.witness), "status": r.status,
                        "orbit_size": r.orbit_size})
        if r.finite:
            found = r
            if args.candidates:
                break
    out = {
        "format": "orbit-result",
        "tool_version": TOOL_VERSION,
        "bundle_hash": content_hash(bundle),
        "generators": names,
        "cap": args.cap,
        "strategy": strategy,
        "results": results,
    }
    os.makedirs(args.out, exist_ok=True)
    h = _write(os.path.join(args.out, "orbit.json"), out)
    man = _manifest(args, "orbit", {"kind": "bundle"}, bundle.get("library_id", ""),
                    _input_hashes(args), {"orbit.json": h})
    _write(os.path.join(args.out, "manifest.json"), man)
    for r in results:
        print(f"v = {r['vector']}: {r['status']}"
              + (f" (orbit size {r['orbit_size']})" if r['orbit_size'] else ""))
    if found is None and any(r["status"] == "cap-exceeded" for r in results):
        return 2
    return 0


def cmd_stabilizer(args) -> int:
    pres = build_surface_group(SurfaceType.parse(args.surface))
    marking, source = _marking_from_args(args, pres)
    lib = _library(args, pres)
    stab = marking_stabilizer(marking, lib, cap=args.cap, aut_cap=args.aut_cap)
    out = {
        "format": "stabilizer-result",
        "tool_version": TOOL_VERSION,
        "surface": args.surface,
        "marking_hash": marking.content_key(),
        "library_id": lib.library_id,
        "orbit_size": stab.index,
        "stabilizer_index": stab.index,
        "schreier_generators": stab.generator_names(),
    }
    os.makedirs(args.out, exist_ok=True)
    h = _write(os.path.join(args.out, "stabilizer.json"), out)
    man = _manifest(args, "stabilizer", source, lib.library_id,
                    _input_hashes(args), {"stabilizer.json": h})
    _write(os.path.join(args.out, "manifest.json"), man)
    print(f"marking orbit size {stab.index}; "
          f"{len(stab.schreier_generators)} stabilizer generators")
    return 0


def cmd_certify(args) -> int:
    pres = build_surface_group(SurfaceType.parse(args.surface))
    marking, source = _marking_from_args(args, pres)
    lib = _library(args, pres)
    res = point_pushing_pipeline(marking, lib, cap=args.cap,
                                 aut_cap=args.aut_cap)
    os.makedirs(args.out, exist_ok=True)
    outputs = {}
    outputs["bundle.json"] = _write(os.path.join(args.out, "bundle.json"),
                                    res.bundle)
    chain = {
        "format": "certify-chain",
        "tool_version": TOOL_VERSION,
        "surface": args.surface,
        "certificate_surface": res.cert_surface,
        "stabilizer_orbit_size": res.stabilizer.index,
        "stabilizer_generators": res.stabilizer.generator_names(),
        "candidate_strategy": res.strategy,
        "candidates_tried": res.candidates_tried,
        "v0": list(res.v0) if res.v0 else None,
        "orbit_size": (res.orbit_result.orbit_size
                       if res.orbit_result else None),
        "g_words": [tokens_text(w) for w in res.g_words],
    }
    outputs["chain.json"] = _write(os.path.join(args.out, "chain.json"), chain)
    if res.certificate is None:
        man = _manifest(args, "certify", source, lib.library_id,
                        _input_hashes(args), outputs)
        _write(os.path.join(args.out, "manifest.json"), man)
        print("no finite orbit found at the given caps; no certificate")
        return 2
    outputs["certificate.json"] = _write(
        os.path.join(args.out, "certificate.json"), res.certificate)
    man = _manifest(args, "certify", source, lib.library_id,
                    _input_hashes(args), outputs)
    _write(os.path.join(args.out, "manifest.json"), man)
    rep = verify_certificate(res.bundle, res.certificate)
    print(f"finite orbit of size {res.orbit_result.orbit_size} at "
          f"v0 = {list(res.v0)}; certificate with {len(res.g_words)} "
          f"G-generators: {'verified' if rep.ok else 'VERIFY FAILED'}")
    if args.report:
        _report(args, "certify", chain)
    return 0 if rep.ok else 3


def cmd_verify(args) -> int:
    with open(args.bundle, encoding="utf-8") as f:
        bundle = json.load(f)
    with open(args.cert, encoding="utf-8") as f:
        cert = json.load(f)
    rep = verify_certificate(bundle, cert)
    print(rep)
    return 0 if rep.ok else 3


def cmd_selftest(args) -> int:
    import random
    rng = random.Random(args.seed)
    failures = []

    def check(name, fn):
        try:
            fn()
            print(f"pass {name}")
        except Exception as e:  # noqa: BLE001 - report and continue
            failures.append(name)
            print(f"FAIL {name}: {e}")

    def libraries():
        for t in [(1, 0, 1), (1, 1, 0), (2, 1, 0), (2, 0, 1), (1, 1, 1)]:
            rep = validate_mcg_relations(standard_generators(SurfaceType(*t)))
            assert rep.ok, f"{t}: {rep}"
    check("generator-libraries", libraries)

    def rh_suite():
        from .covers import FiniteGroupTable as FGT
        pool = [FGT.cyclic(2), FGT.cyclic(3), FGT.quaternion8(),
                FGT.symmetric3(), FGT.dihedral4()]
        types = [(1, 0, 1), (1, 1, 0), (1, 1, 1), (2, 1, 0), (2, 0, 1)]
        for _ in range(12):
            s = SurfaceType(*types[rng.randrange(len(types))])
            pres = build_surface_group(s)
            Q = pool[rng.randrange(len(pool))]
            mk = QuotientMarking(pres, Q, [rng.randrange(Q.order)
                                           for _ in range(pres.rank)])
            cov = CoverData(mk)
            assert cov.h1_rank == cov.size * (pres.rank - 1) + 1
            chi, gp, b = cov.riemann_hurwitz()
            assert gp >= 0 and cov.h1_rank == 2 * gp + b - 1
            bd = boundary_subspace(cov)
            assert bd.dim_v == 2 * gp
            total = sum(c.vector for c in cov.peripheral_cycles())
            assert all(x == 0 for x in total)
    check("nielsen-schreier-riemann-hurwitz", rh_suite)

    def prym_small():
        pres = build_surface_group(SurfaceType(1, 0, 1))
        from .prym import intersection_form, prym_matrix
        mk = level_marking(pres, 2)
        cov = CoverData(mk)
        bd = boundary_subspace(cov)
        J = intersection_form(cov, bd)
        lib = standard_generators(SurfaceType(1, 0, 1))
        for g in lib.generators:
            pm = prym_matrix(cov, g.table, bd)
            assert intmat.mat_eq(pm.matrix.T @ J.matrix @ pm.matrix, J.matrix)
    check("prym-symplectic", prym_small)

    def lemma_coinv():
        from .analysis import coinvariants_dimension
        for _ in range(20):
            n = rng.randint(1, 6)
            mats = []
            for _ in range(rng.randint(1, 3)):
                M = intmat.eye(n)
                for _ in range(rng.randint(1, 6)):
                    i, j = rng.randrange(n), rng.randrange(n)
                    if i != j:
                        M[i, :] = M[i, :] + rng.choice([-1, 1]) * M[j, :]
                mats.append(M)
            coinvariants_dimension(mats)
    check("coinvariants-duality", lemma_coinv)

    def cert_roundtrip():
        pres = build_surface_group(SurfaceType(1, 0, 1))
        Q8 = FiniteGroupTable.quaternion8()
        mk = QuotientMarking(pres, Q8,
                             [Q8.index_of("i"), Q8.index_of("j")])
        lib = standard_generators(SurfaceType(1, 0, 1))
        res = point_pushing_pipeline(mk, lib, cap=10 ** 5)
        assert res.certificate is not None
        assert verify_certificate(res.bundle, res.certificate).ok
        tampered = json.loads(json.dumps(res.certificate))
        tampered["v0"][0] += 1
        assert not verify_certificate(res.bundle, tampered).ok
    check("certificate-roundtrip", cert_roundtrip)

    print(f"selftest: {'PASS' if not failures else 'FAIL ' + str(failures)}")
    return 0 if not failures else 3


def _report(args, kind, payload):
    lines = [f"# prymrep {kind} report", ""]
    for k, v in payload.items():
        lines.append(f"- **{k}**: {v}")
    lines.append("")
    _write(os.path.join(args.out, "report.md"), "\n".join(lines))


# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="prymrep",
        description="higher Prym representations: covers, forms, orbits, "
                    "point-pushing certificates")
    ap.add_argument("--config", help="key=value config file (CLI overrides)")
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p, surface=True):
        if surface:
            p.add_argument("--surface", default="1,0,1",
                           help="g,n,p of the base surface")
        p.add_argument("--level", type=int, help="level-L marking")
        p.add_argument("--quotient",
                       help="group table file or builtin (q8, s3, d4, v4, zN)")
        p.add_argument("--marking", help='generator images, e.g. "a->i,b->j"')
        p.add_argument("--epi-closure", action="store_true",
                       help="intersect kernels of all epis onto --quotient")
        p.add_argument("--library", help="generator library file")
        p.add_argument("--cap", type=int, default=10 ** 6)
        p.add_argument("--aut-cap", type=int, default=16)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--out", default=".", help="artifact directory")
        p.add_argument("--cache-dir", default=".prymrep-cache")
        p.add_argument("--no-cache", action="store_true")
        p.add_argument("--report", choices=["md"], help="emit report.md")

    p = sub.add_parser("present", help="print the presentation")
    p.add_argument("--surface", default="1,0,1")
    p.set_defaults(fn=cmd_present)

    p = sub.add_parser("cover", help="build and cache the cover")
    common(p)
    p.add_argument("--check-characteristic", action="store_true")
    p.set_defaults(fn=cmd_cover)

    p = sub.add_parser("prym", help="emit the Prym bundle JSON")
    common(p)
    p.set_defaults(fn=cmd_prym)

    p = sub.add_parser("orbit", help="orbit search on a bundle")
    common(p, surface=False)
    p.add_argument("--surface", default="")
    p.add_argument("--bundle", required=True)
    p.add_argument("--vector", help="comma-separated integer vector")
    p.add_argument("--candidates", action="store_true",
                   help="enumerate candidate vectors automatically")
    p.add_argument("--generators", help="comma-separated generator names")
    p.set_defaults(fn=cmd_orbit)

    p = sub.add_parser("stabilizer", help="marking stabilizer in the library")
    common(p)
    p.set_defaults(fn=cmd_stabilizer)

    p = sub.add_parser("certify",
                       help="stabilizer -> orbit search -> certificate")
    common(p)
    p.set_defaults(fn=cmd_certify)

    p = sub.add_parser("verify", help="check a certificate against a bundle")
    common(p, surface=False)
    p.add_argument("--surface", default="")
    p.add_argument("--bundle", required=True)
    p.add_argument("--cert", required=True)
    p.set_defaults(fn=cmd_verify)

    p = sub.add_parser("selftest", help="run the invariant suites")
    common(p)
    p.set_defaults(fn=cmd_selftest)
    return ap


def _apply_config(ap: argparse.ArgumentParser, argv):
    if "--config" not in argv:
        return argv
    idx = argv.index("--config")
    path = argv[idx + 1]
    cfg = {}
    with open(path, encoding="utf-8") as f:
        for line in f:
            line = line.split("#")[0].strip()
            if not line:
                continue
            k, v = line.split("=", 1)
            k = k.strip().replace("-", "_")
            v = v.strip()
            if v.isdigit() or (v.startswith("-") and v[1:].isdigit()):
                v = int(v)
            elif v in ("true", "false"):
                v = v == "true"
            cfg[k] = v
    for action in ap._subparsers._group_actions[0].choices.values():  # noqa: SLF001
        known = {a.dest for a in action._actions}  # noqa: SLF001
        action.set_defaults(**{k: v for k, v in cfg.items() if k in known})
    return argv


def run(argv) -> int:
    ap = _build_parser()
    try:
        argv = _apply_config(ap, list(argv))
        args = ap.parse_args(argv)
        if getattr(args, "threads", 1) < 1:
            raise PresentationError("--threads must be >= 1")
        return args.fn(args)
    except CapExceeded as e:
        print(f"cap exceeded: {e}", file=sys.stderr)
        return 2
    except (PresentationError, CertificateError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
