"""Command-line front end.

Each verb reads JSON files (``-`` for standard input), calls one core
operation and prints canonical JSON.  Exit codes: 0 success, 2 validation
error, 3 size limit, 4 parse error.
"""
from __future__ import annotations

import argparse
import os
import sys
from typing import Callable

from . import finite_field as ff
from . import forms_roots as fr
from . import quiver_core as qc
from . import representations as rp
from . import serialize as sz
from . import species_tensor as st
from .errors import ParseError, SizeLimitExceeded, ValidationError
from .hall_algebra import HallAlgebra, bialgebra_checks, serre_element, simple_monomials

EXIT_VALIDATION, EXIT_SIZE, EXIT_PARSE = 2, 3, 4


def _read(path: str):
    if path == "-":
        return sz.loads(sys.stdin.read())
    try:
        with open(path, encoding="utf-8") as fh:
            return sz.loads(fh.read())
    except OSError as exc:
        raise ParseError(f"cannot read {path}: {exc.strerror}") from None


def _cap(args) -> int:
    if getattr(args, "cap", None) is not None:
        return args.cap
    env = os.environ.get("WORKBENCH_CAP")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ParseError(f"WORKBENCH_CAP={env!r} is not an integer") from None
    return qc.DEFAULT_CAP


def _ints(text: str) -> tuple:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise ParseError(f"expected comma-separated integers, got {text!r}") from None


def _quiver(args):
    return sz.quiver_from_json(_read(args.quiver))


def _species(args, attr: str = "species"):
    return sz.species_from_json(_read(getattr(args, attr)), getattr(args, "q", None))


def _valued(obj):
    return sz.abs_quiver(obj) if not isinstance(obj, qc.RelValuedQuiver) else obj


# ---------------------------------------------------------------------------
# verbs

def cmd_validate(args):
    obj = _quiver(args)
    if isinstance(obj, qc.AbsValuedQuiver):
        return qc.validate_abs(obj).to_json()
    if isinstance(obj, qc.RelValuedQuiver):
        return qc.validate_relative(obj).to_json()
    return qc.validate_quiver(obj).to_json()


def cmd_fold(args):
    q = sz.plain_quiver(_quiver(args))
    s = sz.automorphism_from_json(_read(args.auto))
    return sz.quiver_to_json(qc.fold(q, s))


def cmd_unfold(args):
    q, s = qc.unfold(sz.abs_quiver(_quiver(args)))
    return {"quiver": sz.quiver_to_json(q), "automorphism": sz.automorphism_to_json(s)}


def cmd_crush(args):
    obj = _quiver(args)
    if isinstance(obj, qc.AbsValuedQuiver):
        return sz.quiver_to_json(qc.crush_abs(obj))
    if isinstance(obj, qc.RelValuedQuiver):
        return sz.quiver_to_json(qc.crush_rel(obj))
    return sz.quiver_to_json(qc.crush_quiver(obj))


def cmd_functor_f(args):
    return sz.quiver_to_json(qc.functor_F(sz.abs_quiver(_quiver(args))))


def cmd_lift(args):
    return sz.quiver_to_json(qc.lift_relative(sz.rel_quiver(_quiver(args))))


def cmd_morphisms(args):
    src = sz.quiver_from_json(_read(args.source))
    dst = sz.quiver_from_json(_read(args.target))
    if isinstance(src, qc.Quiver):
        src = sz.abs_quiver(src) if not isinstance(dst, qc.RelValuedQuiver) else sz.rel_quiver(src)
    if isinstance(dst, qc.Quiver):
        dst = sz.abs_quiver(dst) if not isinstance(src, qc.RelValuedQuiver) else sz.rel_quiver(dst)
    return {"count": qc.enumerate_valued_morphisms(src, dst, _cap(args))}


def cmd_paths(args):
    q = sz.plain_quiver(_quiver(args))
    out = {"path_counts": [len(v) for _, v in sorted(qc.paths_up_to(q, args.length).items())]}
    if args.auto:
        out["orbit_counts"] = qc.sigma_orbit_count(q, sz.automorphism_from_json(_read(args.auto)), args.length)
    return out


def cmd_cartan(args):
    return fr.cartan_matrix(_valued(_quiver(args))).to_json()


def cmd_forms(args):
    g = _valued(_quiver(args))
    x, y = _ints(args.x), _ints(args.y if args.y is not None else args.x)
    return {"euler": fr.euler_form(g, x, y), "symmetric": fr.symmetric_form(g, x, y),
            "tits_x": fr.tits_form(g, x)}


def cmd_roots(args):
    g = _valued(_quiver(args))
    real = fr.real_roots_up_to(g, args.max_coord, _cap(args))
    out = {"real": [list(r) for r in real], "positive_real": [list(r) for r in fr.positive(real)]}
    if args.imaginary:
        imag = fr.imaginary_roots_up_to(g, args.max_coord, _cap(args))
        out["imaginary"] = [list(r) for r in imag]
        out["positive_imaginary"] = [list(r) for r in fr.positive(imag)]
    return out


def cmd_classify(args):
    return {"type": fr.classify_type(_valued(_quiver(args)))}


def cmd_stable(args):
    return {"basis": [list(v) for v in fr.stable_lattice(_valued(_quiver(args)))]}


def cmd_field(args):
    F = ff.gf_make(args.p, args.n)
    out = {"field": F.to_json()}
    if args.embed_into:
        E = ff.embed(F, ff.gf_make(args.p, args.embed_into))
        out["embedding"] = {"target": E.target.to_json(), "image": ff.arith(E.target).to_coeffs(E.image)}
    return out


def cmd_tensor_decompose(args):
    return ff.tensor_decompose(args.a, args.b).to_json()


def cmd_species_validate(args):
    return st.validate_species(_species(args)).to_json()


def cmd_tensor_dims(args):
    return {"dims": st.tensor_graded_dim(_species(args), args.length)}


def cmd_crush_species(args):
    return sz.species_to_json(st.crush_species(_species(args)))


def cmd_iso_check(args):
    s1, s2 = _species(args), _species(args, "other")
    if args.tensor_ring:
        res = st.tensor_ring_iso_check(s1, s2, _cap(args))
    else:
        res = st.species_iso_check(s1, s2, args.field_automorphisms, _cap(args))
    return res.to_json()


def cmd_frobenius_verify(args):
    q = sz.plain_quiver(_quiver(args))
    s = sz.automorphism_from_json(_read(args.auto))
    rep = st.verify_frobenius_iso(q, s, args.q, args.length)
    out = rep.to_json()
    out["species"] = sz.species_to_json(st.species_from_folding(q, s, args.q))
    out["orbit_counts"] = qc.sigma_orbit_count(q, s, args.length)
    return out


def cmd_unfold_closure(args):
    s = _species(args)
    q = st.scalar_extension_quiver(s, args.N)
    out = {"quiver": sz.quiver_to_json(q), "vertex_count": len(q.vertices), "arrow_count": len(q.arrows)}
    if args.explicit:
        N = args.N or st.SpeciesFields(s).lcm_degree
        counts = st.scalar_extension_explicit(s, N)
        out["explicit_agrees"] = counts == st.arrow_multiplicities(q)
    return out


def cmd_reps_enumerate(args):
    s = _species(args)
    labels = rp.enumerate_reps(s, _ints(args.dim), _cap(args))
    return {"classes": [_label_json(s, lab) for lab in labels]}


def cmd_indecomposables(args):
    s = _species(args)
    labels = rp.enumerate_indecomposables(s, _ints(args.dim), _cap(args))
    return {"indecomposables": [_label_json(s, lab) for lab in labels]}


def _label_json(s, lab):
    out = lab.to_json()
    out["representation"] = rp.label_representation(s, lab).to_json()
    return out


def cmd_hall_number(args):
    s = _species(args)
    A, B, C = (sz.representation_from_json(_read(p), s) for p in (args.a, args.b, args.c))
    return {"hall_number": rp.hall_number(A, B, C, _cap(args))}


def _hall_input(alg, text: str):
    """A Hall element file, or a word of simples like ``1,2,1``."""
    if os.path.exists(text) or text == "-":
        return sz.hall_element_from_json(_read(text), alg)
    return alg.monomial([w for w in text.split(",") if w])


def cmd_hall_product(args):
    alg = HallAlgebra(_species(args), _cap(args))
    return alg.product(_hall_input(alg, args.left), _hall_input(alg, args.right)).to_json()


def cmd_hall_delta(args):
    alg = HallAlgebra(_species(args), _cap(args))
    return alg.delta(_hall_input(alg, args.element)).to_json()


def cmd_hall_form(args):
    alg = HallAlgebra(_species(args), _cap(args))
    return alg.form(_hall_input(alg, args.left), _hall_input(alg, args.right)).to_json()


def cmd_serre_check(args):
    alg = HallAlgebra(_species(args), _cap(args))
    residue = serre_element(alg, args.i, args.j)
    return {"holds": residue.is_zero(), "residue": residue.to_json()}


def cmd_bialgebra_check(args):
    alg = HallAlgebra(_species(args), _cap(args))
    words = simple_monomials(alg.vertices, args.degree)[1:]
    return bialgebra_checks(alg, words, args.degree).to_json()


# ---------------------------------------------------------------------------
# text rendering

def _text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        lines = []
        for k in sorted(obj):
            v = obj[k]
            if isinstance(v, (dict, list)) and v and not all(isinstance(x, (int, str)) for x in (v if isinstance(v, list) else [None])):
                lines.append(f"{pad}{k}:")
                lines.append(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {sz.dumps(v) if isinstance(v, (dict, list)) else v}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(f"{pad}- {sz.dumps(x)}" for x in obj)
    return f"{pad}{obj}"


# ---------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="valquiver", description="Valued quivers, species and Hall algebras over finite fields.")
    parser.add_argument("--format", choices=["json", "text"], default="json")
    sub = parser.add_subparsers(dest="verb", required=True)

    def verb(name: str, fn: Callable, *opts: str, **kw):
        p = sub.add_parser(name, help=kw.pop("help", None))
        p.add_argument("--format", choices=["json", "text"], default=argparse.SUPPRESS)
        for o in opts:
            if o == "quiver":
                p.add_argument("--quiver", required=True, help="quiver JSON file, - for stdin")
            elif o == "auto":
                p.add_argument("--auto", required=True, help="automorphism JSON file")
            elif o == "species":
                p.add_argument("--species", required=True, help="species JSON, or a valued quiver with --q")
                p.add_argument("--q", type=int, help="field size for the untwisted species of a valued quiver")
            elif o == "cap":
                p.add_argument("--cap", type=int, help="enumeration cap (default WORKBENCH_CAP or 10^6)")
        p.set_defaults(fn=fn)
        return p

    verb("validate", cmd_validate, "quiver", help="check a quiver of any flavor")
    verb("fold", cmd_fold, "quiver", "auto", help="fold a quiver with automorphism")
    verb("unfold", cmd_unfold, "quiver", help="quiver with automorphism folding to a valued quiver")
    verb("crush", cmd_crush, "quiver", help="merge parallel arrows")
    verb("functor-f", cmd_functor_f, "quiver", help="absolute to relative valuation")
    verb("lift", cmd_lift, "quiver", help="relative to absolute valuation with coprime vertex values")
    p = verb("morphisms", cmd_morphisms, "cap", help="count valued-quiver morphisms")
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p = verb("paths", cmd_paths, "quiver", help="path counts, and orbit counts with --auto")
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--auto")
    verb("cartan", cmd_cartan, "quiver", help="generalized Cartan matrix")
    p = verb("forms", cmd_forms, "quiver", help="Euler, symmetric and Tits forms")
    p.add_argument("--x", required=True, help="comma-separated vector")
    p.add_argument("--y", help="comma-separated vector (defaults to x)")
    p = verb("roots", cmd_roots, "quiver", "cap", help="roots with bounded coordinates")
    p.add_argument("--max-coord", type=int, required=True)
    p.add_argument("--imaginary", action="store_true", help="also enumerate imaginary roots")
    verb("classify", cmd_classify, "quiver", help="Finite, Affine or Indefinite")
    verb("stable", cmd_stable, "quiver", help="integer basis of stable elements")
    p = verb("field", cmd_field, help="finite field description and embeddings")
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--embed-into", type=int)
    p = verb("tensor-decompose", cmd_tensor_decompose, help="split GF(q^a) (x) GF(q^b)")
    p.add_argument("--a", type=int, required=True)
    p.add_argument("--b", type=int, required=True)
    verb("species-validate", cmd_species_validate, "species")
    p = verb("tensor-dims", cmd_tensor_dims, "species", help="graded dimensions of the tensor algebra")
    p.add_argument("--length", type=int, required=True)
    verb("crush-species", cmd_crush_species, "species")
    p = verb("iso-check", cmd_iso_check, "species", "cap", help="species or tensor-ring isomorphism")
    p.add_argument("--other", required=True)
    p.add_argument("--tensor-ring", action="store_true")
    p.add_argument("--field-automorphisms", action="store_true")
    p = verb("frobenius-verify", cmd_frobenius_verify, "quiver", "auto", help="fixed points versus folded species")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--length", type=int, required=True)
    p = verb("unfold-closure", cmd_unfold_closure, "species", help="quiver of the scalar extension to the closure")
    p.add_argument("--N", type=int)
    p.add_argument("--explicit", action="store_true", help="cross-check by linear algebra over GF(q^N)")
    for name, fn in (("reps-enumerate", cmd_reps_enumerate), ("indecomposables", cmd_indecomposables)):
        p = verb(name, fn, "species", "cap")
        p.add_argument("--dim", required=True, help="comma-separated dimension vector")
    p = verb("hall-number", cmd_hall_number, "species", "cap")
    for o in ("a", "b", "c"):
        p.add_argument(f"--{o}", required=True, help="representation JSON file")
    for name, fn in (("hall-product", cmd_hall_product), ("hall-form", cmd_hall_form)):
        p = verb(name, fn, "species", "cap")
        p.add_argument("--left", required=True, help="Hall element JSON file or word like 1,2")
        p.add_argument("--right", required=True)
    p = verb("hall-delta", cmd_hall_delta, "species", "cap")
    p.add_argument("--element", required=True)
    p = verb("serre-check", cmd_serre_check, "species", "cap")
    p.add_argument("--i", required=True)
    p.add_argument("--j", required=True)
    p = verb("bialgebra-check", cmd_bialgebra_check, "species", "cap")
    p.add_argument("--degree", type=int, required=True, help="largest total degree of sampled monomials")
    return parser


def run(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PARSE if exc.code else 0
    try:
        result = args.fn(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=err)
        return EXIT_PARSE
    except SizeLimitExceeded as exc:
        print(f"size limit: {exc}", file=err)
        return EXIT_SIZE
    except (ValidationError, ff.FieldError) as exc:
        print(f"invalid input: {exc}", file=err)
        return EXIT_VALIDATION
    if args.format == "text":
        print(_text(result), file=out)
    else:
        print(sz.dumps(result), file=out)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
