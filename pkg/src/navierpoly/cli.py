"""Command-line front end: ``navierpoly <subcommand> ...``.

Exact outputs carry rationals as fraction strings; floats appear only in the
IVP subcommands.  Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from fractions import Fraction
from typing import List, Optional, Sequence


from .decomp import (BasisVerificationError, NotASolutionError, all_families, basis_K1, basis_K2_pm,
                     basis_K3, build_K2, decompose, is_k2_member, k2_count, oracle_divergence_free, oracle_K2,
                     oracle_nullspace)
from .diffops import LameParameters, d_operator, lame_apply, laplacian, navier_apply
from .exactalg import Polynomial, VectorPolynomial, format_fraction, parse_fraction
from .flag import lame_basis, uniform_basis
from .harmonics import dim_harmonic, harmonic_basis, harmonic_indices
from .ivp import BoxDomain, FourierMode, LameIVP, NavierIVP, TruncationPolicy, residual_check

FAMILY_CHOICES = ("scalar-harmonic", "k1", "k2", "k2plus", "k2minus", "k3", "all", "uniform", "lame")


class UsageError(Exception):
    """Bad flags or inputs; reported with exit code 2."""


def _emit(doc, out: Optional[str]) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path} is not valid JSON: {exc}") from exc


def _fraction(text) -> Fraction:
    if isinstance(text, float):
        return Fraction(text).limit_denominator(10 ** 12)
    try:
        return parse_fraction(str(text))
    except (ValueError, ZeroDivisionError) as exc:
        raise UsageError(f"not an exact rational: {text!r}") from exc


def _params_from(iota1, iota2, b, default_b: Optional[str] = "1") -> LameParameters:
    """Lame constants from ``--iota1/--iota2`` or ``--b``; ValueError carries the admissibility rule."""
    if (iota1 is None) != (iota2 is None):
        raise UsageError("--iota1 and --iota2 must be given together")
    if iota1 is not None and b is not None:
        raise UsageError("give either --iota1/--iota2 or --b, not both")
    try:
        if iota1 is not None:
            return LameParameters(_fraction(iota1), _fraction(iota2))
        if b is None:
            if default_b is None:
                raise UsageError("Lame constants required: --iota1/--iota2 or --b")
            b = default_b
        return LameParameters.from_b(_fraction(b))
    except ValueError as exc:
        raise UsageError(f"invalid Lame constants: {exc}") from exc


def _add_params(p: argparse.ArgumentParser) -> None:
    p.add_argument("--iota1", help="Lame constant iota1 (fraction string)")
    p.add_argument("--iota2", help="Lame constant iota2 (fraction string)")
    p.add_argument("--b", help="normalised constant b = (iota1+iota2)/iota1 (fraction string)")


# -- dims ------------------------------------------------------------------------

def cmd_dims(args) -> int:
    if args.n < 2 or args.kmax < 0:
        raise UsageError("dims needs --n >= 2 and --kmax >= 0")
    params = _params_from(args.iota1, args.iota2, args.b)
    rows, ok = [], True
    for k in range(args.kmax + 1):
        dh = dim_harmonic(args.n, k)
        row = {"k": k, "dim_H": dh, "dim_solutions": args.n * dh,
               "K1": dim_harmonic(args.n, k + 1),
               "K2": k2_count(args.n, k) if args.n >= 3 else None,
               "K3": dim_harmonic(args.n, k - 1)}
        if args.oracle:
            row["oracle_dim"] = len(oracle_nullspace(args.n, k, params))
            ok &= row["oracle_dim"] == row["dim_solutions"]
        rows.append(row)
    _emit({"n": args.n, "params": params.as_dict(), "rows": rows, "verified": ok}, args.out)
    return 0 if ok else 1


# -- basis -----------------------------------------------------------------------

def _check_vector(family: str, value, params: LameParameters, degree: int) -> List[str]:
    if family == "scalar-harmonic":
        return [] if laplacian(value).is_zero() else ["harmonic"]
    if family == "lame":
        return [] if lame_apply(value, params).is_zero() else ["lame"]
    failed = [] if navier_apply(value, params).is_zero() else ["navier"]
    if family in ("K2plus", "K2minus"):
        eig = (degree + 1) * (1 if family == "K2plus" else -1)
        if not (d_operator(value) - value.scale(eig)).is_zero():
            failed.append("eigenvalue")
    return failed


def _vector_doc(bv, emit_latex: bool) -> dict:
    doc = bv.to_json()
    if emit_latex:
        doc["latex"] = bv.value.latex()
    return doc


def cmd_basis(args) -> int:
    n, k, family = args.n, args.k, args.family
    if n < 2 or k < 0:
        raise UsageError("basis needs --n >= 2 and --k >= 0")
    params = _params_from(args.iota1, args.iota2, args.b)
    manifest = {"n": n, "k": k, "family": family, "params": params.as_dict()}
    try:
        if family == "scalar-harmonic":
            polys = harmonic_basis(n, k)
            vectors = []
            for (eps, ls), p in zip(harmonic_indices(n, k), polys):
                doc = {"family": "scalar-harmonic", "params": {"eps": eps, "l": list(ls)},
                       "degree": k, "value": p.to_json()}
                if args.emit_latex:
                    doc["latex"] = p.latex()
                vectors.append((doc, _check_vector(family, p, params, k)))
        else:
            if family in ("k2", "k2plus", "k2minus") and (n < 3 or k < 1):
                raise UsageError("K2 needs --n >= 3 and --k >= 1")
            if family in ("k2plus", "k2minus") and n != 4:
                raise UsageError("the K2 eigen-split is defined for --n 4 only")
            if family in ("k1", "k2", "k3", "all") and n < 3:
                raise UsageError("the three-family decomposition needs --n >= 3")
            if family == "k1":
                bvs = basis_K1(n, k)
            elif family == "k3":
                bvs = basis_K3(n, k, params.b)
            elif family == "k2":
                build = build_K2(n, k, args.k2_source)
                bvs = build.vectors
                manifest["k2_source"] = build.source
                if build.discrepancies:
                    manifest["k2_discrepancies"] = [
                        {"params": {key: list(v) if isinstance(v, tuple) else v
                                    for key, v in d["params"].items()},
                         "failed": d["failed"]} for d in build.discrepancies]
            elif family == "k2plus":
                bvs = basis_K2_pm(k, "+")
            elif family == "k2minus":
                bvs = basis_K2_pm(k, "-")
            elif family == "all":
                fams = all_families(n, k, params.b)
                bvs = fams["K1"] + fams["K2"] + fams["K3"]
            elif family == "uniform":
                bvs = uniform_basis(n, k, params.b)
            else:
                bvs = lame_basis(n, k, params.b)
            vectors = [(_vector_doc(bv, args.emit_latex),
                        _check_vector(bv.family, bv.value, params, k)) for bv in bvs]
    except BasisVerificationError as exc:
        _emit({"manifest": dict(manifest, verified=False), "error": str(exc)}, args.out)
        return 1
    failures = []
    for i, (doc, failed) in enumerate(vectors):
        doc["verified"] = not failed
        if failed:
            failures.append({"index": i, "failed": failed})
    manifest.update(count=len(vectors), verified=not failures)
    doc = {"manifest": manifest, "vectors": [d for d, _ in vectors]}
    if failures:
        doc["failures"] = failures
    _emit(doc, args.out)
    return 0 if not failures else 1


# -- verify ----------------------------------------------------------------------

def _value_from(doc):
    value = doc["value"] if "value" in doc else doc
    if "components" in value:
        return VectorPolynomial.from_json(value)
    return Polynomial.from_json(value)


def _vectors_in(doc) -> list:
    if isinstance(doc, dict) and "vectors" in doc:
        return doc["vectors"]
    if isinstance(doc, list):
        return doc
    return [doc]


def _family_residuals(family: str, value, entry) -> dict:
    """Membership checks beyond the PDE itself (linear fields solve every second-order system)."""
    out = {}
    if not isinstance(value, VectorPolynomial) or value.time:
        return out
    if family in ("K2", "K2plus", "K2minus"):
        failed = is_k2_member(value)
        if failed:
            out["K2_membership"] = failed
    if family in ("K2plus", "K2minus"):
        degree = value.degree() or 0
        eig = (degree + 1) * (1 if family == "K2plus" else -1)
        res = d_operator(value) - value.scale(eig)
        if not res.is_zero():
            out["eigen_residual"] = res.to_json()
    return out


def cmd_verify(args) -> int:
    doc = _load_json(args.infile)
    manifest = doc.get("manifest", {}) if isinstance(doc, dict) else {}
    if args.iota1 is None and args.b is None and "params" in manifest:
        mp = manifest["params"]
        params = _params_from(mp["iota1"], mp["iota2"], None)
    else:
        params = _params_from(args.iota1, args.iota2, args.b)
    results, ok = [], True
    for i, entry in enumerate(_vectors_in(doc)):
        try:
            value = _value_from(entry)
        except (KeyError, TypeError, ValueError) as exc:
            raise UsageError(f"entry {i} is not a polynomial document: {exc}") from exc
        family = entry.get("family", manifest.get("family", "")) if isinstance(entry, dict) else ""
        if isinstance(value, Polynomial):
            residual = laplacian(value)
        elif value.time or family == "lame":
            residual = lame_apply(value, params)
        else:
            residual = navier_apply(value, params)
        rec = {"index": i}
        if not residual.is_zero():
            rec["residual"] = residual.to_json()
        extra = _family_residuals(family, value, entry)
        if extra:
            rec["family_checks"] = extra
        good = "residual" not in rec and not extra
        ok &= good
        rec["ok"] = good
        results.append(rec)
    _emit({"ok": ok, "params": params.as_dict(), "checked": len(results), "results": results}, args.out)
    return 0 if ok else 1


# -- oracle ----------------------------------------------------------------------

def cmd_oracle(args) -> int:
    if args.n < 2 or args.k < 0:
        raise UsageError("oracle needs --n >= 2 and --k >= 0")
    params = _params_from(args.iota1, args.iota2, args.b)
    if args.which == "navier":
        vecs = oracle_nullspace(args.n, args.k, params)
    elif args.which == "k2":
        vecs = oracle_K2(args.n, args.k)
    else:
        vecs = oracle_divergence_free(args.n, args.k)
    _emit({"manifest": {"n": args.n, "k": args.k, "family": f"oracle-{args.which}",
                        "params": params.as_dict(), "count": len(vecs), "verified": True},
           "vectors": [{"family": f"oracle-{args.which}", "params": {"index": i}, "degree": args.k,
                        "value": v.to_json()} for i, v in enumerate(vecs)]}, args.out)
    return 0


# -- decompose -------------------------------------------------------------------

def cmd_decompose(args) -> int:
    doc = _load_json(args.infile)
    params = _params_from(args.iota1, args.iota2, args.b)
    entries = _vectors_in(doc)
    if args.index >= len(entries):
        raise UsageError(f"--index {args.index} out of range ({len(entries)} entries)")
    try:
        v = _value_from(entries[args.index])
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"input is not a vector polynomial document: {exc}") from exc
    if not isinstance(v, VectorPolynomial) or v.time:
        raise UsageError("decompose expects a spatial vector polynomial")
    k = v.degree()
    if k is None:
        raise UsageError("cannot decompose the zero vector")
    try:
        dec = decompose(v, v.size, k, params.b)
    except NotASolutionError as exc:
        _emit({"ok": False, "error": str(exc), "residual": exc.residual.to_json()}, args.out)
        return 1
    except BasisVerificationError as exc:
        _emit({"ok": False, "error": str(exc)}, args.out)
        return 1
    coords = [{"family": bv.family, "params": bv.to_json()["params"], "coefficient": format_fraction(c)}
              for bv, c in dec.nonzero()]
    _emit({"ok": True, "n": v.size, "k": k, "params": params.as_dict(), "coordinates": coords,
           "summands": {name: s.to_json() for name, s in sorted(dec.summands.items())}}, args.out)
    return 0


# -- IVP -------------------------------------------------------------------------

def _modes(cfg, *names) -> List[FourierMode]:
    for name in names:
        if name in cfg:
            try:
                return [FourierMode.from_json(m) for m in cfg[name]]
            except (KeyError, TypeError, ValueError) as exc:
                raise UsageError(f"bad Fourier mode in {name}: {exc}") from exc
    return []


def _solve(args, kind: str) -> int:
    cfg = _load_json(args.config)
    pts = _load_json(args.points)
    if isinstance(pts, dict):
        pts = pts.get("points", [])
    try:
        params = _params_from(cfg.get("iota1"), cfg.get("iota2"), cfg.get("b"), default_b=None)
        domain = BoxDomain(cfg["halfwidths"])
        policy = TruncationPolicy(args.max_m, args.tail_tol)
    except KeyError as exc:
        raise UsageError(f"config is missing {exc}") from exc
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    try:
        if kind == "navier":
            solver = NavierIVP(_modes(cfg, "g0_modes"), _modes(cfg, "g1_modes"), params, domain, policy)
        else:
            solver = LameIVP(_modes(cfg, "h0_modes", "g0_modes"), _modes(cfg, "h1_modes", "g1_modes"),
                             params, domain, policy)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if "n" in cfg and int(cfg["n"]) != solver.n:
        raise UsageError(f"config n={cfg['n']} disagrees with {len(domain.halfwidths)} half-widths")
    width = solver.n if kind == "navier" else solver.n + 1
    out_points, all_conv, worst = [], True, 0.0
    for p in pts:
        if len(p) != width:
            raise UsageError(f"each point needs {width} coordinates")
        res = solver.evaluate(p)
        rec = {"point": [float(x) for x in p], "value": res.value.tolist(),
               "converged": bool(res.converged), "used_m": int(res.used_m)}
        if args.residual or args.residual_csv:
            rec["residual"] = residual_check(solver, params, [p], h=args.h, kind=kind)
            worst = max(worst, rec["residual"])
        all_conv &= res.converged
        out_points.append(rec)
    doc = {"kind": kind, "n": solver.n, "params": params.as_dict(),
           "policy": {"max_m": policy.max_m, "tail_tol": policy.tail_tol},
           "converged": bool(all_conv), "points": out_points}
    if args.residual or args.residual_csv:
        doc["max_residual"] = worst
    if args.residual_csv:
        with open(args.residual_csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh)
            w.writerow([f"p{i}" for i in range(width)] + ["residual"])
            for rec in out_points:
                w.writerow([repr(x) for x in rec["point"]] + [repr(rec["residual"])])
    _emit(doc, args.out)
    return 0


# -- parser ----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="navierpoly",
                                     description="Exact polynomial solutions of the Navier and Lame equations.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("dims", help="dimension table of the solution spaces")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kmax", type=int, required=True)
    p.add_argument("--oracle", action="store_true", help="also compute the exact nullspace dimension")
    _add_params(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_dims)

    p = sub.add_parser("basis", help="generate and verify a basis")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True, help="degree (total degree in (t, x) for lame)")
    p.add_argument("--family", choices=FAMILY_CHOICES, required=True)
    p.add_argument("--k2-source", choices=("formula", "closed-form", "oracle"), default="formula")
    p.add_argument("--emit-latex", action="store_true")
    _add_params(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_basis)

    p = sub.add_parser("verify", help="check vectors in a JSON file exactly")
    p.add_argument("--in", dest="infile", required=True)
    _add_params(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="exact nullspace basis")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--which", choices=("navier", "k2", "divfree"), default="navier")
    _add_params(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("decompose", help="split a solution into its K1, K2, K3 parts")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--index", type=int, default=0, help="entry to use when the file holds several vectors")
    _add_params(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_decompose)

    for name, kind in (("solve-navier", "navier"), ("solve-lame", "lame")):
        p = sub.add_parser(name, help=f"evaluate the {kind} initial value problem")
        p.add_argument("--config", required=True)
        p.add_argument("--points", required=True)
        p.add_argument("--max-m", type=int, default=40)
        p.add_argument("--tail-tol", type=float, default=1e-12)
        p.add_argument("--residual", action="store_true", help="add a finite-difference residual per point")
        p.add_argument("--residual-csv", help="write point residuals as CSV")
        p.add_argument("--h", type=float, default=2e-3, help="finite-difference step")
        p.add_argument("--out")
        p.set_defaults(func=lambda a, kind=kind: _solve(a, kind))
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"navierpoly {args.command}: error: {exc}\n")
        return 2


def run(argv: Optional[Sequence[str]] = None) -> int:
    return main(argv)


if __name__ == "__main__":
    sys.exit(main())
