"""Command-line interface: ``geofield <command> MODEL [options]``.

Model files are TOML::

    formalism = "KSymHam"          # KSymHam KCosymHam KSymLag KCosymLag MsHamSection MsLag
    k = 2
    n = 1
    generator = "(p1_1^2 + p2_1^2)/2"

    [components]                   # optional free k-vector components
    X1_p2_1 = "0"

    [sections.harmonic]            # optional candidate sections
    q1 = "t1^2 - t2^2"
    p1_1 = "2*t1"
    p2_1 = "-2*t2"

    [grid]                         # optional solver grid
    ranges = [1.0, 1.0]
    steps = [0.01, 0.01]
    x0 = { q1 = 0.0, p1_1 = 0.0, p2_1 = 0.0 }

Exit status: 0 on Pass, 1 on Fail, 2 on usage or model errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from . import __version__
from .bridges import (
    NotAutonomous,
    autonomize,
    deautonomize,
    theorem_suite,
)
from .canonical import canonical_kcosymplectic, canonical_ksymplectic, canonical_multisymplectic
from .forms import d, multimomentum_frame
from .hamiltonian import (
    FieldTheory,
    SymbolicSection,
    Variant,
    commutators,
    free_count,
    hdw_equations,
    kvector_equations,
    solve_kvector,
    verify_section,
)
from .lagrangian import (
    energy,
    euler_lagrange_equations,
    lagrangian_forms,
    lagrangian_kvector_equations,
    legendre,
    legendre_inverse,
    regularity,
    solve_lagrangian_kvector,
    sopde_forced,
    verify_euler_lagrange,
)
from .multisym import (
    extended_restricted_legendre,
    hamilton_cartan_forms,
    ms_hamiltonian_kvector_equations,
    ms_lagrangian_kvector_equations,
    ms_section_residual,
    poincare_cartan_forms,
)
from .solver import GridSpec, IntegrationError, integrate
from .symexpr import ParseError, ZERO, default_seed, diff, normalize, parse, subs, to_str

__all__ = ["ModelError", "ModelFile", "load", "main", "run"]

VELOCITY_CONVENTION = "v{A}_{i} is the derivative of q{i} along t{A}; p{A}_{i} is its conjugate momentum (copy index first)"

FORMALISMS = {
    "k-symplectic": {True: Variant.KSymHam, False: Variant.KSymLag},
    "k-cosymplectic": {True: Variant.KCosymHam, False: Variant.KCosymLag},
    "multisymplectic": {True: Variant.MsHamSection, False: Variant.MsLag},
}


class ModelError(ValueError):
    pass


class UsageError(ValueError):
    pass


@dataclass
class ModelFile:
    theory: FieldTheory
    components: Dict[str, object] = field(default_factory=dict)
    sections: Dict[str, SymbolicSection] = field(default_factory=dict)
    grid: Optional[GridSpec] = None
    x0: Dict[str, float] = field(default_factory=dict)
    path: str = ""

    def describe(self) -> dict:
        return {
            "formalism": self.theory.variant.value,
            "k": self.theory.k,
            "n": self.theory.n,
            "generator": to_str(self.theory.generator),
        }


def _expr(text, where: str):
    if not isinstance(text, (str, int, float)) or isinstance(text, bool):
        raise ModelError(f"{where}: expected an expression string")
    try:
        return parse(str(text))
    except ParseError as exc:
        raise ModelError(f"{where}: {exc}") from None


def _positive_int(data: dict, key: str) -> int:
    if key not in data:
        raise ModelError(f"missing required key '{key}'")
    v = data[key]
    if not isinstance(v, int) or isinstance(v, bool) or v < 1:
        raise ModelError(f"'{key}' must be a positive integer")
    return v


def load(path) -> ModelFile:
    """Read and validate a model file."""
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ModelError(f"cannot read {path}: {exc.strerror}") from None
    try:
        data = tomllib.loads(raw.decode("utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ModelError(f"{path.name}: invalid TOML: {exc}") from None
    except UnicodeDecodeError:
        raise ModelError(f"{path.name}: not UTF-8 text") from None
    return model_from_dict(data, str(path))


def model_from_dict(data: dict, path: str = "") -> ModelFile:
    if "formalism" not in data:
        raise ModelError("missing required key 'formalism'")
    try:
        variant = Variant(data["formalism"])
    except ValueError:
        raise ModelError(f"unknown formalism {data['formalism']!r}; expected one of {[v.value for v in Variant]}") from None
    k = _positive_int(data, "k")
    n = _positive_int(data, "n")
    if "generator" not in data:
        raise ModelError("missing required key 'generator'")
    gen = _expr(data["generator"], "generator")
    probe = FieldTheory(variant, k, n, 0)
    frame = probe.frame
    extra = sorted(gen.free - frame.coordset)
    if extra:
        side = "Hamiltonian" if variant.hamiltonian else "Lagrangian"
        raise ModelError(f"{extra[0]} not in {side} frame ({frame.bundle}: {', '.join(frame.coords)})")
    theory = FieldTheory(variant, k, n, gen)
    components = {}
    for name, text in data.get("components", {}).items():
        e = _expr(text, f"components.{name}")
        bad = sorted(e.free - frame.coordset)
        if bad:
            raise ModelError(f"components.{name}: {bad[0]} not in {frame.bundle} frame")
        components[name] = e
    sections = {}
    for name, comps in data.get("sections", {}).items():
        if not isinstance(comps, dict):
            raise ModelError(f"sections.{name} must be a table")
        parsed = {c: _expr(t, f"sections.{name}.{c}") for c, t in comps.items()}
        try:
            sections[name] = SymbolicSection(k, parsed)
        except ValueError as exc:
            raise ModelError(f"sections.{name}: {exc}") from None
    grid, x0 = None, {}
    if "grid" in data:
        g = data["grid"]
        try:
            grid = GridSpec(tuple(g["ranges"]), tuple(g["steps"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelError(f"grid: {exc}") from None
        if grid.k != k:
            raise ModelError(f"grid: expected {k} axes, got {grid.k}")
        x0 = {c: float(v) for c, v in g.get("x0", {}).items()}
    return ModelFile(theory, components, sections, grid, x0, path)


# ---------------------------------------------------------------------------
# Commands


def _emit(args, payload: dict, text: str):
    out = json.dumps(payload, indent=2, ensure_ascii=False) + "\n" if args.json else text.rstrip("\n") + "\n"
    if getattr(args, "output", None):
        Path(args.output).write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)


def _autonomy(sys_: FieldTheory) -> bool:
    if not sys_.variant.time_dependent:
        return True
    return all(normalize(diff(sys_.generator, f"t{A}")) == ZERO for A in range(1, sys_.k + 1))


def cmd_info(model: ModelFile, args) -> int:
    t = model.theory
    frame = t.frame
    payload = {"model": model.describe(), "frame": frame.describe(), "autonomous": _autonomy(t), "velocity_convention": VELOCITY_CONVENTION}
    lines = [
        f"formalism   : {t.variant.value}",
        f"k, n        : {t.k}, {t.n}",
        f"generator   : {to_str(t.generator)}",
        f"bundle      : {frame.bundle}",
        f"coordinates : {' '.join(frame.coords)}",
        f"autonomous  : {'yes' if payload['autonomous'] else 'no'}",
    ]
    if t.variant.hamiltonian:
        kv = t if t.variant is not Variant.MsHamSection else t.with_variant(Variant.KCosymHam)
        eqs = kvector_equations(kv)
        fiber = [u for u in eqs.unknowns if "_p" in u]
        payload["regularity"] = None
        payload["free_momentum_components"] = free_count(eqs, fiber)
        lines.append(f"free momentum components of k-vector solutions: {payload['free_momentum_components']}")
    else:
        rep = regularity(t)
        payload["regularity"] = rep.to_json()
        payload["free_momentum_components"] = None
        lines.append(f"regular     : {'yes' if rep.regular else 'no'} (det W = {to_str(rep.determinant) if rep.determinant is not None else 'n/a'}, {rep.method})")
    lines.append(f"convention  : {VELOCITY_CONVENTION}")
    _emit(args, payload, "\n".join(lines))
    return 0


def _form_entries(prefix: str, forms) -> List[dict]:
    return [{"name": f"{prefix}^{A}", "form": f.render()} for A, f in enumerate(forms, 1)]


def cmd_canon(model: ModelFile, args) -> int:
    t = model.theory
    k, n = t.k, t.n
    structures: List[dict] = []
    checks: Dict[str, bool] = {}
    v = t.variant
    if v is Variant.KSymHam:
        st = canonical_ksymplectic(k, n)
        structures += _form_entries("theta", st.theta) + _form_entries("omega", st.omega)
        checks = st.check()
    elif v is Variant.KCosymHam:
        st = canonical_kcosymplectic(k, n)
        structures += _form_entries("eta", st.eta) + _form_entries("Theta", st.theta) + _form_entries("Omega", st.omega)
        checks = st.check()
    elif v is Variant.MsHamSection:
        ms = canonical_multisymplectic(k, n)
        hc = hamilton_cartan_forms(t)
        structures += [{"name": "Theta", "form": ms.Theta.render()}, {"name": "Omega", "form": ms.Omega.render()}]
        structures += [{"name": "Theta_h", "form": hc.Theta.render()}, {"name": "Omega_h", "form": hc.Omega.render()}]
        checks = {**ms.check(), **{f"h_{key}": val for key, val in hc.check().items()}}
    elif v in (Variant.KSymLag, Variant.KCosymLag):
        lf = lagrangian_forms(t)
        name = ("theta_L", "omega_L") if v is Variant.KSymLag else ("Theta_L", "Omega_L")
        if v is Variant.KCosymLag:
            structures += [{"name": f"eta^{A}", "form": f"dt{A}"} for A in range(1, k + 1)]
        structures += _form_entries(name[0], lf.theta) + _form_entries(name[1], lf.omega)
        checks = {
            "exact": all(w == -d(th) for w, th in zip(lf.omega, lf.theta)),
            "closed": all(d(w).is_zero() for w in lf.omega),
        }
    else:
        pc = poincare_cartan_forms(t)
        structures += [{"name": "Theta_LL", "form": pc.Theta.render()}, {"name": "Omega_LL", "form": pc.Omega.render()}]
        checks = pc.check()
    payload = {"model": model.describe(), "structures": structures, "checks": checks}
    width = max(len(s["name"]) for s in structures)
    lines = [f"{s['name'].ljust(width)} = {s['form']}" for s in structures]
    lines += [f"# {key}: {'ok' if val else 'FAILED'}" for key, val in checks.items()]
    _emit(args, payload, "\n".join(lines))
    return 0 if all(checks.values()) else 1


def _hamiltonian_kvector(t: FieldTheory, overrides):
    kv = t if t.variant is not Variant.MsHamSection else t.with_variant(Variant.KCosymHam)
    return solve_kvector(kv, overrides=overrides or None)


def cmd_equations(model: ModelFile, args) -> int:
    t = model.theory
    v = t.variant
    systems = []
    extra: Dict[str, object] = {}
    text_extra: List[str] = []
    if v.hamiltonian:
        systems.append(hdw_equations(t))
        systems.append(ms_hamiltonian_kvector_equations(t) if v is Variant.MsHamSection else kvector_equations(t))
        X = _hamiltonian_kvector(t, model.components)
        extra["kvector_solution"] = {"gauge": "DiagonalSplit", "fields": [X[A].render() for A in range(t.k)]}
        extra["commutators"] = {key: br.render() for key, br in commutators(X).items()}
        text_extra += ["# k-vector field solution (DiagonalSplit)", X.render()]
        text_extra += [f"# {key} = {br.render()}" for key, br in commutators(X).items()]
    else:
        systems.append(euler_lagrange_equations(t))
        kv = ms_lagrangian_kvector_equations(t) if v is Variant.MsLag else lagrangian_kvector_equations(t)
        systems.append(kv)
        sop = sopde_forced(t.with_variant(Variant.KCosymLag) if v is Variant.MsLag else t, kv)
        extra["sopde"] = sop.to_json()
        text_extra.append(f"# second-order condition forced: {'yes' if sop.forced else 'no'}" + (f" (free: {', '.join(sop.unforced)})" if sop.unforced else ""))
    payload = {"model": model.describe(), "systems": [s.to_json() for s in systems], **extra}
    text = "\n\n".join(s.render() for s in systems) + "\n\n" + "\n".join(text_extra)
    _emit(args, payload, text)
    return 0


def cmd_legendre(model: ModelFile, args) -> int:
    t = model.theory
    if t.variant.hamiltonian:
        raise UsageError("legendre needs a Lagrangian model")
    FL = legendre(t) if t.variant is not Variant.MsLag else legendre(t.with_variant(Variant.KCosymLag))
    rep = regularity(t)
    E = energy(t)
    payload = {
        "model": model.describe(),
        "legendre": {c: to_str(e) for c, e in FL.as_dict().items()},
        "energy": to_str(E),
        "regularity": rep.to_json(),
        "extended": None,
        "hamiltonian": None,
    }
    lines = ["# Legendre map", FL.render(), f"# energy E_L = {to_str(E)}", f"# regular: {'yes' if rep.regular else 'no'}"]
    if t.variant is not Variant.KSymLag:
        ext = extended_restricted_legendre(t).extended
        payload["extended"] = {"p": to_str(ext["p"])}
        lines.append(f"# extended Legendre map: p = {to_str(ext['p'])}")
    inv = legendre_inverse(t)
    if inv is not None:
        H = normalize(subs(E, inv.as_dict()))
        payload["hamiltonian"] = to_str(H)
        lines.append(f"# Hamiltonian E_L o FL^-1 = {to_str(H)}")
    _emit(args, payload, "\n".join(lines))
    return 0


def _target_variant(t: FieldTheory, to: str) -> Variant:
    if to in FORMALISMS:
        return FORMALISMS[to][t.variant.hamiltonian]
    try:
        return Variant(to)
    except ValueError:
        raise UsageError(f"unknown target {to!r}; use k-symplectic, k-cosymplectic, multisymplectic or a variant name") from None


def convert(t: FieldTheory, target: Variant) -> FieldTheory:
    """Transport the generating function to another formalism."""
    src = t.variant
    if src.hamiltonian != target.hamiltonian:
        if src.hamiltonian:
            raise UsageError("conversion from a Hamiltonian to a Lagrangian model is not supported")
        inv = legendre_inverse(t if src is not Variant.MsLag else t.with_variant(Variant.KCosymLag))
        if inv is None:
            raise UsageError("Legendre map is not invertible in closed form for this Lagrangian")
        H = normalize(subs(energy(t), inv.as_dict()))
        ham = {Variant.KSymLag: Variant.KSymHam, Variant.KCosymLag: Variant.KCosymHam, Variant.MsLag: Variant.MsHamSection}[src]
        return convert(FieldTheory(ham, t.k, t.n, H), target)
    if src.time_dependent == target.time_dependent:
        return t.with_variant(target)
    if target.time_dependent:
        return autonomize(t).with_variant(target)
    base = t if src in (Variant.KCosymHam, Variant.KCosymLag) else t.with_variant(Variant.KCosymHam if src.hamiltonian else Variant.KCosymLag)
    return deautonomize(base)


def cmd_convert(model: ModelFile, args) -> int:
    import tomli_w

    t = model.theory
    target = _target_variant(t, args.to)
    try:
        new = convert(t, target)
    except NotAutonomous as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    doc = {"formalism": new.variant.value, "k": new.k, "n": new.n, "generator": to_str(new.generator)}
    if new.variant.hamiltonian == t.variant.hamiltonian and model.components:
        doc["components"] = {name: to_str(e) for name, e in model.components.items()}
    header = [f"# converted from {t.variant.value}", f"# frame: {new.frame.bundle} ({', '.join(new.frame.coords)})"]
    if new.variant is Variant.MsHamSection:
        M = multimomentum_frame(new.k, new.n)
        header.append(f"# Hamiltonian section into {M.bundle} ({', '.join(M.coords)}): p = {to_str(normalize(-new.generator))}")
    text = "\n".join(header) + "\n" + tomli_w.dumps(doc)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _parse_floats(text: str, what: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise UsageError(f"--{what} expects comma-separated numbers") from None


def _parse_x0(text: str) -> Dict[str, float]:
    out = {}
    for part in text.split(","):
        if "=" not in part:
            raise UsageError("--x0 expects name=value pairs separated by commas")
        name, val = part.split("=", 1)
        try:
            out[name.strip()] = float(val)
        except ValueError:
            raise UsageError(f"--x0: bad value for {name.strip()}") from None
    return out


def cmd_solve(model: ModelFile, args) -> int:
    t = model.theory
    ranges = _parse_floats(args.ranges, "ranges") if args.ranges else (list(model.grid.ranges) if model.grid else None)
    steps = _parse_floats(args.steps, "steps") if args.steps else (list(model.grid.steps) if model.grid else None)
    if ranges is None or steps is None:
        raise UsageError("no grid: give [grid] in the model or --ranges and --steps")
    if len(steps) == 1 and len(ranges) > 1:
        steps = steps * len(ranges)
    try:
        grid = GridSpec(tuple(ranges), tuple(steps))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    x0 = dict(model.x0)
    if args.x0:
        x0.update(_parse_x0(args.x0))
    if t.variant.hamiltonian:
        X = _hamiltonian_kvector(t, model.components)
    else:
        base = t if t.variant is not Variant.MsLag else t.with_variant(Variant.KCosymLag)
        if not regularity(base).regular:
            sys.stderr.write("error: singular Lagrangian; no second-order k-vector field to integrate\n")
            return 1
        X = solve_lagrangian_kvector(base)
    try:
        sol = integrate(X, x0, grid)
    except IntegrationError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    csv = sol.to_csv()
    if args.output:
        Path(args.output).write_text(csv, encoding="utf-8")
    else:
        sys.stdout.write(csv)
    report = {
        "model": model.describe(),
        "grid": {"ranges": list(grid.ranges), "steps": list(grid.steps), "counts": list(grid.counts)},
        "coordinates": sol.coords,
        "commutator_residual": sol.commutator_residual,
        "integral_section": sol.integral_section,
        "notes": sol.notes,
    }
    if args.report:
        Path(args.report).write_text(json.dumps(report, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
    for note in sol.notes:
        sys.stderr.write(f"warning: {note}\n")
    return 0 if sol.integral_section else 1


def _verify_section(t: FieldTheory, s: SymbolicSection):
    v = t.variant
    if v.hamiltonian:
        if v is Variant.MsHamSection:
            return ms_section_residual(t, s)
        return verify_section(t, s)
    qs = {c: e for c, e in s.components.items() if c.startswith("q")}
    return verify_euler_lagrange(t, SymbolicSection(s.k, qs))


def cmd_verify(model: ModelFile, args) -> int:
    t = model.theory
    sections = []
    ok = True
    for name in sorted(model.sections):
        try:
            rep = _verify_section(t, model.sections[name])
        except ValueError as exc:
            sections.append({"section": name, "equation": "", "verdict": "Fail", "error": str(exc), "note": "", "residuals": []})
            ok = False
            continue
        entry = {"section": name, **rep.to_json()}
        sections.append(entry)
        ok &= rep.passed
    theorems = None
    if args.theorems:
        theorems = theorem_suite(t)
        ok &= theorems["verdict"] == "Pass"
    if not sections and theorems is None:
        raise UsageError("nothing to verify: the model has no [sections] and --theorems was not given")
    payload = {"model": model.describe(), "seed": default_seed(), "sections": sections, "theorems": theorems, "verdict": "Pass" if ok else "Fail"}
    out = json.dumps(payload, indent=2, ensure_ascii=False) + "\n"
    if args.output:
        Path(args.output).write_text(out, encoding="utf-8")
    else:
        sys.stdout.write(out)
    return 0 if ok else 1


COMMANDS = {
    "info": cmd_info,
    "canon": cmd_canon,
    "equations": cmd_equations,
    "legendre": cmd_legendre,
    "convert": cmd_convert,
    "solve": cmd_solve,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="geofield", description="k-symplectic, k-cosymplectic and multisymplectic field theory toolkit")
    p.add_argument("--version", action="version", version=f"geofield {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, help_, json_flag=True):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("model", help="model file (TOML)")
        sp.add_argument("-o", "--output", help="write the result to this file instead of stdout")
        if json_flag:
            sp.add_argument("--json", action="store_true", help="emit a JSON report instead of text")
        return sp

    add("info", "frame, autonomy and regularity of a model")
    add("canon", "canonical and generator-dependent forms")
    add("equations", "field equations and k-vector field equations")
    add("legendre", "Legendre map, energy and regularity of a Lagrangian model")
    sp = add("convert", "rewrite the model in another formalism", json_flag=False)
    sp.add_argument("--to", required=True, help="k-symplectic, k-cosymplectic, multisymplectic, or a variant name")
    sp = add("solve", "integrate the k-vector field on a grid (CSV)", json_flag=False)
    sp.add_argument("--ranges", help="comma-separated axis lengths T1,...,Tk")
    sp.add_argument("--steps", help="comma-separated steps h1,...,hk")
    sp.add_argument("--x0", help="initial values, e.g. q1=0,p1_1=1")
    sp.add_argument("--report", help="write a JSON summary to this file")
    sp = add("verify", "check candidate sections and, with --theorems, the equivalence theorems", json_flag=False)
    sp.add_argument("--theorems", action="store_true", help="run the equivalence-certificate suite")
    return p


def run(argv: List[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        model = load(args.model)
        return COMMANDS[args.command](model, args)
    except (ModelError, UsageError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


def main(argv: Optional[List[str]] = None) -> int:
    return run(sys.argv[1:] if argv is None else list(argv))


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
