"""Command line front end.

    corelab validate|structure|equiv|dilate|report FILES [--tol X] [--seed N]
            [--depth N] [--m v1,..,vk] [--color c] [--check] [--dump] [--json]

Exit codes: 0 success (all ``expect`` claims hold), 1 parse/shape error,
2 analysis failure (a claim does not hold, or the input is unsuitable).
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from .dilation import build_dilation, dilation_coisometry_check, verify_dilation, wandering_dimension
from .graphs import enumerate_simple_cycles, has_strong_double_cycle
from .io import ParseError, RepSpec, load
from .kgraphs import validate_theta
from .numerics import Subspace, Tolerance, orthonormal_range, projection_distance
from .reps import (GraphRep, KGraphRep, coisometry_residual, doubly_commuting_residual,
                   is_completely_contractive, is_fully_coisometric, is_isometric, product_rep,
                   regular_dilation_condition, satisfies_popescu)
from .report import Report, frame_rows
from .structure import (CyclicityError, StructureError, block_decomposition, commutant,
                        generate_algebra, is_minimal_cyclic_coinvariant, minimal_coinvariant_family,
                        minimal_cyclic_coinvariant, phi_fixed_points, rep_algebra, span_distance,
                        unitary_equivalence, wm_equals_vhat)

__all__ = ["main", "cmd_validate", "cmd_structure", "cmd_equiv", "cmd_dilate", "cmd_report",
           "CommandError", "UNIQUENESS_SEEDS"]

UNIQUENESS_SEEDS = 20
SPAN_TOL = 1e-8   # projection distance for claimed spans


class CommandError(Exception):
    def __init__(self, code: int, msg: str):
        super().__init__(msg)
        self.code = code


def _load(path, tol: Tolerance) -> RepSpec:
    try:
        return load(path, tol)
    except ParseError as exc:
        raise CommandError(1, f"{path}: {exc}") from None


def _fmt_subset(v) -> str:
    return "{" + ",".join(str(c + 1) for c in sorted(v)) + "}"


def _claim(rep: Report, expect: dict, key: str, got, close: float | None = None) -> None:
    if key not in expect:
        return
    want = expect[key]
    if close is not None:
        ok = abs(float(got) - float(want)) <= close
    else:
        ok = want == got
    rep.expect(key, want, got, ok)


def _claim_span(rep: Report, expect: dict, key: str, s: Subspace, tol: Tolerance) -> None:
    if key not in expect:
        return
    from .io import _vectors
    try:
        want = orthonormal_range(_vectors(expect[key], s.ambient_dim, f"$.expect.{key}"), tol, scale=1.0)
    except ParseError as exc:
        raise CommandError(1, str(exc)) from None
    dist = projection_distance(want, s) if want.ambient_dim == s.ambient_dim else float("inf")
    rep.expect(f"{key} (projection distance)", 0.0, dist, dist < SPAN_TOL)


# ---------------------------------------------------------------------------
# validate

def _validate_into(report: Report, spec: RepSpec, tol: Tolerance, prefix: str = "") -> None:
    ex = spec.expect
    if spec.kind == "algebra":
        alg = generate_algebra(spec.obj, spec.dim, tol)
        s = report.section(prefix + "algebra")
        s.add("dim", spec.dim).add("generators", len(spec.obj))
        s.add("algebra_dimension", alg.dimension).add("star_closed", alg.is_star_closed(tol))
        return
    rep = spec.rep
    s = report.section(prefix + "predicates")
    table: dict = {}
    if isinstance(rep, GraphRep):
        table["covariance"] = True
        cycles = enumerate_simple_cycles(rep.graph)
        g = report.section(prefix + "graph")
        g.add("vertices", rep.graph.vertex_count).add("edges", rep.graph.edge_count)
        g.add("simple_cycles", len(cycles)).add("strong_double_cycle", has_strong_double_cycle(rep.graph))
    else:
        ok, msg = validate_theta(rep.kgraph)
        table["theta_valid"] = ok
        r, _ = rep.commutation_residual()
        table["commutation"] = True
        s.add("commutation_residual", r)
        if not ok:
            report.warnings.append(f"theta: {msg}")
    table["completely_contractive"] = is_completely_contractive(rep, tol)
    table["isometric"] = is_isometric(rep, tol)
    table["fully_coisometric"] = is_fully_coisometric(rep, tol)
    s.add("coisometry_residual", coisometry_residual(rep))
    if isinstance(rep, KGraphRep):
        table["doubly_commuting"] = doubly_commuting_residual(rep) <= 10 * tol.eq_tol
        s.add("doubly_commuting_residual", doubly_commuting_residual(rep))
        verdict, grid = satisfies_popescu(rep, tol=tol)
        table["popescu"] = verdict
        s.add("popescu_grid", {f"{k:g}": v for k, v in grid.items()})
        reg = regular_dilation_condition(rep, tol)
        table["regular_dilation_condition"] = all(v for v, _ in reg.values())
        s.add("regular_dilation_min_eig",
              {_fmt_subset(v): lam for v, (_, lam) in sorted(reg.items(), key=lambda t: (len(t[0]), sorted(t[0])))})
    for key, value in table.items():
        s.add(key, value)
        _claim(report, ex, key, value)


def cmd_validate(path, tol: Tolerance, seed: int = 0) -> Report:
    spec = _load(path, tol)
    report = Report("validate", [(str(path), spec.digest)], tol, seed)
    _validate_into(report, spec, tol)
    return report


# ---------------------------------------------------------------------------
# structure

def _distinct(spaces: list[Subspace], tol: Tolerance) -> list[Subspace]:
    out: list[Subspace] = []
    for s in spaces:
        if not any(s.ambient_dim == t.ambient_dim and projection_distance(s, t) < 1e-6 for t in out):
            out.append(s)
    return sorted(out, key=lambda s: (s.dim, [tuple(np.round(np.abs(c), 8)) for c in s.frame.T]))


def _structure_into(report: Report, spec: RepSpec, tol: Tolerance, seed: int,
                    m: Sequence[int] | None = None, color: int | None = None, prefix: str = "") -> None:
    ex = spec.expect
    key_prefix = f"color{color}_" if color is not None else ""
    if color is not None:
        ex = {k[len(key_prefix):]: v for k, v in spec.expect.items() if k.startswith(key_prefix)}
    target = None
    if spec.kind == "algebra":
        if color is not None:
            raise CommandError(2, "--color needs a k-graph representation")
        alg = generate_algebra(spec.obj, spec.dim, tol)
    else:
        target = spec.rep
        if color is not None:
            if not isinstance(target, KGraphRep) or not 1 <= color <= target.kgraph.k:
                raise CommandError(2, f"--color {color} needs a k-graph rep with at least {color} colors")
            e_c = tuple(1 if i == color - 1 else 0 for i in range(target.kgraph.k))
            target = product_rep(target, e_c)
        alg = rep_algebra(target, tol)

    s = report.section(prefix + "vhat")
    if color is not None:
        s.add("restricted_to_color", color)
    s.add("algebra_dimension", alg.dimension)
    family = minimal_coinvariant_family(alg, tol, seed)
    s.add("family_dims", [w.dim for w in family])
    try:
        vhat = minimal_cyclic_coinvariant(alg, tol, seed)
    except CyclicityError as exc:
        vhat = orthonormal_range(np.hstack([w.frame for w in family]), tol, scale=1.0)
        report.warnings.append(f"cyclicity: {exc}; residual dim(alg[V̂]) deficit reported, "
                               f"using the family sum")
    except StructureError as exc:
        raise CommandError(2, f"structure: {exc}") from None
    s.add("dim", vhat.dim)
    s.add("frame", frame_rows(vhat.frame))
    s.add("coinvariance_residual", max((vhat.residual(b.conj().T @ vhat.frame) for b in alg.basis),
                                       default=0.0))
    s.add("cyclic_span_dim", alg.apply(vhat.frame).dim)
    minimal = is_minimal_cyclic_coinvariant(alg, vhat, tol, seed)
    s.add("is_minimal", minimal)
    _claim(report, ex, "vhat_dim", vhat.dim)
    _claim_span(report, ex, "vhat_span", vhat, tol)

    if spec.candidates and color is None:
        c = report.section(prefix + "candidates")
        verdicts = []
        for i, cand in enumerate(spec.candidates):
            sub = orthonormal_range(cand, tol, scale=1.0)
            v = is_minimal_cyclic_coinvariant(alg, sub, tol, seed)
            verdicts.append(v)
            c.add(f"candidate_{i + 1}", {"dim": sub.dim, "is_minimal": v})
        _claim(report, ex, "candidates_minimal", verdicts)

    fc = target is not None and is_fully_coisometric(target, tol)
    u = report.section(prefix + "uniqueness")
    if fc:
        u.add("status", "unique (fully coisometric representation)")
    else:
        found = []
        for k in range(UNIQUENESS_SEEDS):
            fam = minimal_coinvariant_family(alg, tol, seed + k, seeding="random")
            found.append(orthonormal_range(np.hstack([w.frame for w in fam]), tol, scale=1.0))
        distinct = _distinct(found, tol)
        u.add("random_seeds", UNIQUENESS_SEEDS).add("distinct_subspaces", len(distinct))
        for i, d in enumerate(distinct):
            u.add(f"subspace_{i + 1}", frame_rows(d.frame))
        if len(distinct) > 1:
            note = (f"note: V̂ is not unique for this algebra; {len(distinct)} distinct minimal cyclic "
                    f"coinvariant subspaces found over {UNIQUENESS_SEEDS} random seeds")
        else:
            note = "note: uniqueness is not guaranteed (representation is not fully coisometric)"
        u.add("note", note)
        _claim(report, ex, "non_unique", len(distinct) > 1)

    if target is not None:
        small = target.compress(vhat.frame)
        calg = rep_algebra(small, tol)
        b = report.section(prefix + "blocks")
        b.add("compressed_star_closed", calg.is_star_closed(tol))
        if calg.is_star_closed(tol):
            try:
                dec = block_decomposition(calg, tol, seed)
                b.add("blocks", [[d, mm] for d, mm in dec.summary()])
                b.add("reconstruction_distance", dec.reconstruction_distance)
                _claim(report, ex, "blocks", [[d, mm] for d, mm in dec.summary()])
            except StructureError as exc:
                report.warnings.append(f"block decomposition: {exc}")
        else:
            report.warnings.append("block decomposition skipped: compression to V̂ is not *-closed")
        comm = commutant(calg, tol)
        fixed = phi_fixed_points(small, tol)
        p = report.section(prefix + "phi")
        p.add("commutant_dim", comm.dimension).add("fixed_point_dim", len(fixed))
        p.add("span_distance", span_distance(fixed, comm.basis, tol) if fixed or comm.basis else 0.0)
        _claim(report, ex, "commutant_dim", comm.dimension)
        _claim(report, ex, "fixed_point_dim", len(fixed))

    if m is not None:
        if not isinstance(spec.obj, KGraphRep) or color is not None:
            raise CommandError(2, "--m needs a k-graph representation (without --color)")
        try:
            w = wm_equals_vhat(spec.rep, m, tol, seed)
        except (StructureError, ValueError) as exc:
            raise CommandError(2, f"--m: {exc}") from None
        tag = ",".join(str(x) for x in w.m)
        r = report.section(prefix + f"wm[{tag}]")
        r.add("dim_vhat", w.dim_vhat).add("dim_wm", w.dim_wm).add("mode", w.mode)
        r.add("holds", w.holds).add("equal", w.equal).add("contained", w.contained)
        r.add("distance", w.distance).add("containment_residual", w.containment_residual)
        r.add("wm_frame", frame_rows(w.wm.frame))
        _claim(report, ex, f"wm_{tag}_equal", w.equal)
        _claim(report, ex, f"wm_{tag}_dim", w.dim_wm)


def cmd_structure(path, tol: Tolerance, seed: int = 0, m: Sequence[int] | None = None,
                  color: int | None = None) -> Report:
    spec = _load(path, tol)
    report = Report("structure", [(str(path), spec.digest)], tol, seed)
    _structure_into(report, spec, tol, seed, m, color)
    return report


# ---------------------------------------------------------------------------
# equiv

def cmd_equiv(path_a, path_b, tol: Tolerance, seed: int = 0) -> Report:
    a, b = _load(path_a, tol), _load(path_b, tol)
    report = Report("equiv", [(str(path_a), a.digest), (str(path_b), b.digest)], tol, seed)
    if a.kind != b.kind or a.kind == "algebra":
        raise CommandError(2, f"cannot compare kinds {a.kind!r} and {b.kind!r}")
    try:
        res = unitary_equivalence(a.rep, b.rep, tol, seed)
    except (StructureError, ValueError) as exc:
        raise CommandError(2, f"structural mismatch: {exc}") from None
    s = report.section("equivalence")
    s.add("verdict", res.verdict)
    if res.unitary is not None:
        s.add("residual", res.residual)
        s.add("unitary", [list(row) for row in np.asarray(res.unitary)])
    _claim(report, a.expect, "equivalent", bool(res))
    return report


# ---------------------------------------------------------------------------
# dilate

def _dump(dil) -> list:
    """Per-edge nonzero blocks between levels (V is level -1)."""
    out = []
    levels = range(-1, dil.depth)
    for e, s in enumerate(dil.S):
        for src in levels:
            for dst in levels:
                blk = s[dil.level_slice(dst), dil.level_slice(src)]
                if blk.size and np.max(np.abs(blk)) > 0:
                    out.append({"edge": e + 1, "from_level": src, "to_level": dst,
                                "block": [list(r) for r in blk]})
    return out


def _dilate_into(report: Report, spec: RepSpec, tol: Tolerance, seed: int, depth: int,
                 check: bool, color: int | None, dump: bool = False, prefix: str = "") -> None:
    if spec.kind == "algebra":
        raise CommandError(2, "dilate needs a representation")
    rep = spec.rep
    if isinstance(rep, KGraphRep):
        if color is None and rep.kgraph.k == 1:
            color = 1
        if color is None or not 1 <= color <= rep.kgraph.k:
            raise CommandError(2, "dilate needs a graph rep, or --color c for a k-graph rep")
        rep = product_rep(rep, tuple(1 if i == color - 1 else 0 for i in range(spec.rep.kgraph.k)))
    if depth < 1:
        raise CommandError(2, "--depth must be at least 1")
    if not is_completely_contractive(rep, tol):
        raise CommandError(2, "representation is not completely contractive")
    dil = build_dilation(rep, depth, tol)
    s = report.section(prefix + "dilation")
    if color is not None:
        s.add("color", color)
    s.add("depth", depth).add("dim_V", rep.dim).add("total_dim", dil.total_dim)
    s.add("level_dims", dil.level_dims())
    s.add("alpha", dil.alpha).add("alpha_by_vertex", [w.dim for w in dil.wandering_by_vertex])
    s.add("trivial", dil.alpha == 0)
    wd = wandering_dimension(rep, tol, seed)
    w = report.section(prefix + "wandering")
    w.add("alpha", wd.alpha).add("alpha_vhat", wd.alpha_vhat)
    w.add("blocks_d_m_alpha", [list(b) for b in wd.blocks]).add("block_sum", wd.block_sum)
    _claim(report, spec.expect, "alpha", dil.alpha)
    if check:
        v = verify_dilation(dil.S, dil.rho, rep, boundary=dil.boundary_projection(), tol=tol)
        c = report.section(prefix + "check")
        for key, val in v.residuals.items():
            c.add(key, {"ok": v.verdicts[key], "residual": val})
        co = dilation_coisometry_check(dil, tol)
        c.add("coisometry_by_level", list(co.level_residuals))
        c.add("coisometry_matches_base", co.consistent)
        ok = all(val for key, val in v.verdicts.items() if key != "fully_coisometric") and co.consistent
        c.add("ok", ok)
        _claim(report, spec.expect, "dilation_ok", ok)
    if dump:
        report.section(prefix + "dump").add("blocks", _dump(dil))


def cmd_dilate(path, tol: Tolerance, seed: int = 0, depth: int = 4, check: bool = False,
               color: int | None = None, dump: bool = False) -> Report:
    spec = _load(path, tol)
    report = Report("dilate", [(str(path), spec.digest)], tol, seed)
    _dilate_into(report, spec, tol, seed, depth, check, color, dump)
    return report


# ---------------------------------------------------------------------------
# report

def cmd_report(paths: Sequence, tol: Tolerance, seed: int = 0, depth: int = 4,
               m: Sequence[int] | None = None) -> Report:
    specs = [(p, _load(p, tol)) for p in paths]
    report = Report("report", [(str(p), s.digest) for p, s in specs], tol, seed)
    for p, spec in specs:
        tag = spec.name or Path(p).stem
        _validate_into(report, spec, tol, f"{tag}/")
        mm = m if isinstance(spec.obj, KGraphRep) else None
        _structure_into(report, spec, tol, seed, mm, None, f"{tag}/")
        if isinstance(spec.obj, GraphRep) and is_completely_contractive(spec.obj, tol):
            _dilate_into(report, spec, tol, seed, depth, True, None, False, f"{tag}/")
    return report


# ---------------------------------------------------------------------------

def _parse_m(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"--m expects comma separated integers, got {text!r}") from None


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="corelab", description=__doc__.split("\n\n")[0])
    p.add_argument("command", choices=["validate", "structure", "equiv", "dilate", "report"])
    p.add_argument("files", nargs="+")
    p.add_argument("--tol", type=float, default=None, help="equality tolerance (overrides CORELAB_TOL)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--depth", type=int, default=4)
    p.add_argument("--m", type=_parse_m, default=None, help="degree vector for W_m, e.g. 1,0")
    p.add_argument("--color", type=int, default=None, help="restrict to one color row (1-based)")
    p.add_argument("--check", action="store_true", help="verify the dilation axioms")
    p.add_argument("--dump", action="store_true", help="include the dilation block maps")
    p.add_argument("--json", action="store_true", help="emit JSON instead of text")
    return p


def run(argv: Sequence[str] | None = None) -> tuple[int, str, str]:
    """Run a command; returns (exit code, stdout text, stderr text)."""
    args = _parser().parse_args(argv)
    try:
        tol = Tolerance.from_env(args.tol)
    except ValueError as exc:
        return 1, "", f"error: {exc}\n"
    nfiles = {"equiv": 2}.get(args.command)
    if nfiles is not None and len(args.files) != nfiles:
        return 1, "", f"error: {args.command} takes exactly {nfiles} files\n"
    if args.command not in ("equiv", "report") and len(args.files) != 1:
        return 1, "", f"error: {args.command} takes exactly one file\n"
    try:
        f = args.files
        if args.command == "validate":
            rep = cmd_validate(f[0], tol, args.seed)
        elif args.command == "structure":
            rep = cmd_structure(f[0], tol, args.seed, args.m, args.color)
        elif args.command == "equiv":
            rep = cmd_equiv(f[0], f[1], tol, args.seed)
        elif args.command == "dilate":
            rep = cmd_dilate(f[0], tol, args.seed, args.depth, args.check, args.color, args.dump)
        else:
            rep = cmd_report(f, tol, args.seed, args.depth, args.m)
    except CommandError as exc:
        return exc.code, "", f"error: {exc}\n"
    text = rep.to_json() if args.json else rep.to_text()
    return (0 if rep.expectations_met else 2), text, ""


def main(argv: Sequence[str] | None = None) -> int:
    code, out, err = run(argv)
    sys.stdout.write(out)
    sys.stderr.write(err)
    return code


if __name__ == "__main__":
    sys.exit(main())
