"""Batch front end: load problem files, dispatch checks, emit reports.

Exit codes: 0 all checks passed, 1 a check failed (a witness is
reported), 2 invalid input, 3 a numeric check was inconclusive.

Reports are printed as human-readable text; ``--json`` emits a
machine-readable report that is byte-identical for identical input and
seed (timing is deliberately left out of the JSON for that reason).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

import jsonschema

from . import algebroid as alg
from . import cartan as ct
from . import catalog as cat
from . import identities as ids
from . import imform as imf
from . import symexpr as sx
from . import tanlift as tl
from .algebroid import CaseResult, LieAlgebroid
from .cartan import Chart, KForm

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_INVALID = 2
EXIT_INCONCLUSIVE = 3

SEED_ENV_VAR = "LINFORM_SEED"

_SCHEMA_DIR = Path(__file__).parent / "schemas"


class InputError(Exception):
    """Any problem with the input file; maps to exit status 2."""


@dataclass
class Options:
    mode: str = "symbolic"
    samples: int = sx.DEFAULT_SAMPLES
    tolerance: float = sx.DEFAULT_TOL
    seed: int = sx.DEFAULT_SEED
    box: tuple[float, float] = sx.DEFAULT_BOX

    def equality_kwargs(self) -> dict:
        return {"points": self.samples, "tol": self.tolerance,
                "seed": self.seed, "box": self.box}


def _default_seed() -> int:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return sx.DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise InputError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}")


def resolve_options(doc: dict, args) -> Options:
    """Precedence: command-line flags, then file options, then the seed
    environment variable, then built-in defaults."""
    opts = Options(seed=_default_seed())
    file_opts = doc.get("options", {})
    for key in ("mode", "samples", "tolerance", "seed"):
        if key in file_opts:
            setattr(opts, key, file_opts[key])
    if "box" in file_opts:
        opts.box = tuple(file_opts["box"])
    for flag, attr in (("mode", "mode"), ("samples", "samples"),
                       ("tol", "tolerance"), ("seed", "seed")):
        val = getattr(args, flag, None)
        if val is not None:
            setattr(opts, attr, val)
    if getattr(args, "box", None) is not None:
        opts.box = tuple(args.box)
    return opts


# --- loading --------------------------------------------------------------

def load_problem(path: str) -> dict:
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}")
    except tomllib.TOMLDecodeError as exc:
        raise InputError(f"{path}: TOML parse error: {exc}")
    kind = doc.get("kind")
    schema_path = _SCHEMA_DIR / f"{kind}.json"
    if not isinstance(kind, str) or not schema_path.exists():
        raise InputError(f"{path}: unknown problem kind {kind!r}")
    schema = json.loads(schema_path.read_text())
    try:
        jsonschema.validate(doc, schema)
    except jsonschema.ValidationError as exc:
        raise InputError(f"{path}: schema violation: {exc.message}")
    return doc


def _parse_expr(src, where: str) -> sx.Expr:
    try:
        return sx.parse(str(src))
    except sx.ExprSyntaxError as exc:
        raise InputError(f"{where}: {exc}")


def _parse_matrix(rows, where: str):
    return tuple(tuple(_parse_expr(c, f"{where}[{i + 1}][{j + 1}]")
                       for j, c in enumerate(row))
                 for i, row in enumerate(rows))


def _chart_from(doc: dict, n: int, where: str) -> Chart:
    variables = doc.get("variables")
    if variables is None:
        variables = [f"x{i + 1}" for i in range(n)]
    if len(variables) != n:
        raise InputError(f"{where}: {n} variables expected, "
                         f"got {len(variables)}")
    try:
        return Chart(tuple(variables))
    except ValueError as exc:
        raise InputError(f"{where}: {exc}")


def _form_from_records(c: Chart, degree: int, records, where: str) -> KForm:
    try:
        return ct.form_from_records(c, degree, records)
    except sx.ExprSyntaxError as exc:
        raise InputError(f"{where}: {exc}")
    except (ValueError, KeyError) as exc:
        raise InputError(f"{where}: {exc}")


def load_algebroid(doc: dict, where: str = "algebroid") -> LieAlgebroid:
    n, r = doc["n"], doc["r"]
    base = _chart_from(doc, n, where)
    rho = _parse_matrix(doc["rho"], f"{where}.rho")
    structure = tuple(_parse_matrix(plane, f"{where}.C[{a + 1}]")
                      for a, plane in enumerate(doc["C"]))
    try:
        return LieAlgebroid(base, r, rho, structure)
    except ValueError as exc:
        raise InputError(f"{where}: {exc}")


def load_im_data(doc: dict) -> imf.IM2FormData:
    if "algebroid" in doc:
        A = load_algebroid(doc["algebroid"])
    else:
        name = doc["algebroid_ref"]
        match = [e for e in cat.builtin_algebroids() if e.name == name]
        if not match:
            raise InputError(f"unknown algebroid reference {name!r}")
        A = match[0].algebroid
    im = doc["im"]
    sigma = _parse_matrix(im["sigma"], "im.sigma")
    phi = _form_from_records(A.base, 3, im.get("phi", []), "im.phi")
    try:
        return imf.IM2FormData(A, sigma, phi)
    except ValueError as exc:
        raise InputError(str(exc))


def load_dirac(doc: dict) -> cat.DiracFrame:
    d = doc["dirac"]
    n = len(d["variables"])
    base = _chart_from(d, n, "dirac")
    fields = tuple(ct.VField(base, row)
                   for row in _parse_matrix(d["fields"], "dirac.fields"))
    forms = tuple(KForm(base, 1, {(j,): c for j, c in enumerate(row)})
                  for row in _parse_matrix(d["forms"], "dirac.forms"))
    phi = _form_from_records(base, 3, d.get("phi", []), "dirac.phi")
    try:
        return cat.DiracFrame(base, fields, forms, phi)
    except ValueError as exc:
        raise InputError(str(exc))


def load_pair_groupoid(doc: dict) -> cat.PairGroupoidModel:
    g = doc["groupoid"]
    base = _chart_from(g, len(g["variables"]), "groupoid")
    if "beta" in g:
        beta = _form_from_records(base, 2, g["beta"], "groupoid.beta")
        sign = 1 if g.get("combine", "difference") == "sum" else -1
        return cat.telescope_groupoid(beta, sign)
    model = cat.pair_groupoid(base, lambda total, p1, p2:
                              ct.zero_form(total, 2))
    omega = _form_from_records(model.total, 2, g["omega"], "groupoid.omega")
    return cat.PairGroupoidModel(base, model.right, model.total, omega)


# --- report assembly ------------------------------------------------------

def _json_safe(value):
    if isinstance(value, dict):
        return {str(k): _json_safe(v) for k, v in sorted(value.items(),
                                                         key=lambda kv: str(kv[0]))}
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, sx.Expr):
        return sx.to_string(value)
    if isinstance(value, Fraction):
        return str(value)
    if isinstance(value, float):
        return value
    return value


@dataclass
class Report:
    command: str
    source: str
    options: Optional[Options]
    checks: list[CaseResult]
    extras: dict

    @property
    def definite_failure(self) -> bool:
        return any(not c.passed and not c.inconclusive for c in self.checks)

    @property
    def inconclusive(self) -> bool:
        return any(c.inconclusive for c in self.checks)

    @property
    def exit_status(self) -> int:
        if self.definite_failure:
            return EXIT_FAIL
        if self.inconclusive:
            return EXIT_INCONCLUSIVE
        return EXIT_PASS

    def to_json(self) -> dict:
        doc = {
            "command": self.command,
            "input": self.source,
            "checks": [{
                "name": c.name,
                "passed": c.passed,
                "inconclusive": c.inconclusive,
                "witness": _json_safe(c.witness),
            } for c in self.checks],
            "passed": self.exit_status == EXIT_PASS,
            "exit_status": self.exit_status,
        }
        if self.options is not None:
            doc["options"] = {"mode": self.options.mode,
                              "samples": self.options.samples,
                              "tolerance": self.options.tolerance,
                              "seed": self.options.seed,
                              "box": list(self.options.box)}
        doc.update(_json_safe(self.extras))
        return doc

    def render_text(self, elapsed: float) -> str:
        lines = [f"linform {self.command}: {self.source}"]
        for key, value in self.extras.items():
            if isinstance(value, (str, bool, int, float)):
                lines.append(f"  {key}: {value}")
        for c in self.checks:
            status = "PASS" if c.passed else (
                "INCONCLUSIVE" if c.inconclusive else "FAIL")
            line = f"  {status:12s} {c.name}"
            if c.witness:
                line += f"  witness: {_render_witness(c.witness)}"
            lines.append(line)
        n_pass = sum(1 for c in self.checks if c.passed)
        verdict = {EXIT_PASS: "PASS", EXIT_FAIL: "FAIL",
                   EXIT_INCONCLUSIVE: "INCONCLUSIVE"}[self.exit_status]
        lines.append(f"result: {verdict} ({n_pass}/{len(self.checks)} checks,"
                     f" {elapsed:.2f}s)")
        return "\n".join(lines)


def _render_witness(witness: dict) -> str:
    parts = []
    for key, value in witness.items():
        if isinstance(value, dict):
            inner = ", ".join(f"{k}={v:.4g}" if isinstance(v, float)
                              else f"{k}={v}" for k, v in value.items())
            parts.append(f"{key}({inner})")
        else:
            parts.append(f"{key}={value}")
    return "; ".join(parts)


def _finish(report: Report, args, started: float) -> int:
    elapsed = time.time() - started
    payload = json.dumps(report.to_json(), indent=2, sort_keys=True) + "\n"
    if getattr(args, "json", None) == "-":
        sys.stdout.write(payload)
        return report.exit_status
    print(report.render_text(elapsed))
    if getattr(args, "json", None):
        Path(args.json).write_text(payload)
        print(f"json report written to {args.json}")
    return report.exit_status


# --- subcommand handlers ----------------------------------------------------

def cmd_check_algebroid(args) -> int:
    started = time.time()
    doc = load_problem(args.file)
    if doc["kind"] != "algebroid":
        raise InputError(f"{args.file}: expected kind 'algebroid'")
    opts = resolve_options(doc, args)
    A = load_algebroid(doc["algebroid"])
    rep = alg.check_axioms(A, opts.mode, **opts.equality_kwargs())
    checks = list(rep.cases)
    if args.prolongations:
        tp = alg.tangent_prolongation(A)
        cp = alg.cotangent_prolongation(A)
        for tag, prol in (("tangent", tp), ("cotangent", cp)):
            sub = alg.check_prolongation_axioms(prol, opts.mode,
                                                **opts.equality_kwargs())
            checks.extend(CaseResult(f"{tag}_{c.name}", c.passed, c.witness,
                                     c.inconclusive) for c in sub.cases)
    return _finish(Report("check-algebroid", args.file, opts, checks, {}),
                   args, started)


def _im_checks(report: imf.MorphismReport) -> list[CaseResult]:
    return list(report.cases)


def cmd_check_im(args) -> int:
    started = time.time()
    doc = load_problem(args.file)
    if doc["kind"] != "im":
        raise InputError(f"{args.file}: expected kind 'im'")
    opts = resolve_options(doc, args)
    data = load_im_data(doc)
    rep = imf.check_im(data, opts.mode, **opts.equality_kwargs())
    return _finish(Report("check-im", args.file, opts, list(rep.cases), {}),
                   args, started)


def cmd_check_morphism(args) -> int:
    started = time.time()
    doc = load_problem(args.file)
    if doc["kind"] != "im":
        raise InputError(f"{args.file}: expected kind 'im'")
    opts = resolve_options(doc, args)
    data = load_im_data(doc)
    rep = imf.check_morphism(data, opts.mode, **opts.equality_kwargs())
    extras = {"im_verdict": rep.im_verdict,
              "morphism_verdict": rep.morphism_verdict,
              "equivalence_holds": rep.im_verdict == rep.morphism_verdict}
    return _finish(Report("check-morphism", args.file, opts,
                          _im_checks(rep), extras), args, started)


def cmd_build_lambda(args) -> int:
    started = time.time()
    doc = load_problem(args.file)
    if doc["kind"] != "im":
        raise InputError(f"{args.file}: expected kind 'im'")
    opts = resolve_options(doc, args)
    data = load_im_data(doc)
    analysis = imf.build_lambda_analysis(data, opts.mode,
                                         **opts.equality_kwargs())
    shape = CaseResult("linear_shape", analysis.linear,
                       {"issues": analysis.issues} if not analysis.linear
                       else None)
    covers = _covering_check(data, analysis, opts)
    sharp_ok = _sharp_agreement(data, opts)
    extras = {
        "lambda": ct.form_to_string(analysis.form),
        "lambda_records": ct.form_to_records(analysis.form),
        "closed": analysis.closed,
    }
    return _finish(Report("build-lambda", args.file, opts,
                          [shape, covers, sharp_ok], extras), args, started)


def _covering_check(data, analysis, opts) -> CaseResult:
    A = data.algebroid
    if not analysis.linear:
        return CaseResult("covers_minus_transpose", False,
                          {"reason": "form is not linear"})
    witness = None
    for j in range(A.dim):
        for d_ in range(A.rank):
            eq = sx.expr_equal(analysis.lam[j][d_],
                               sx.neg(data.sigma[d_][j]), opts.mode,
                               **opts.equality_kwargs())
            if not eq.equal:
                witness = {"entry": (j + 1, d_ + 1), "point": eq.witness}
                break
        if witness:
            break
    return CaseResult("covers_minus_transpose", witness is None, witness)


def _sharp_agreement(data, opts) -> CaseResult:
    direct = imf.lambda_sharp(data)
    contracted = imf.lambda_sharp_from_form(data)
    witness = None
    for name, a, b in zip(direct.target.variables, direct.components,
                          contracted.components):
        eq = sx.expr_equal(a, b, opts.mode, **opts.equality_kwargs())
        if not eq.equal:
            witness = {"component": name, "point": eq.witness}
            break
    return CaseResult("sharp_map_agreement", witness is None, witness)


def cmd_analyze_linear(args) -> int:
    started = time.time()
    doc = load_problem(args.file)
    if doc["kind"] != "linear-form":
        raise InputError(f"{args.file}: expected kind 'linear-form'")
    opts = resolve_options(doc, args)
    bundle_doc = doc["bundle"]
    base = _chart_from(bundle_doc, len(bundle_doc["variables"]), "bundle")
    bundle = alg.bundle_chart(base, "u", bundle_doc["rank"])
    form = _form_from_records(bundle.total, 2, doc["form"], "form")
    analysis = imf.analyze_linear(form, bundle, opts.mode,
                                  **opts.equality_kwargs())
    checks = [CaseResult("prop_linear_closed_iff_reconstruction",
                         analysis.prop42_consistent, None)]
    extras = {
        "linear": analysis.linear,
        "issues": list(analysis.issues),
        "closed": analysis.closed,
        "reconstruction_matches": analysis.reconstruction_matches,
    }
    if analysis.lam is not None:
        extras["covering_matrix"] = [[sx.to_string(sx.simplify(c))
                                      for c in row] for row in analysis.lam]
        extras["covering_zero_on_fibres"] = analysis.covering_is_zero()
    return _finish(Report("analyze-linear", args.file, opts, checks, extras),
                   args, started)


def _chart_from_arg(arg: str) -> Chart:
    names = [v.strip() for v in arg.split(",") if v.strip()]
    if not names:
        raise InputError("--chart needs a comma-separated variable list")
    try:
        return Chart(tuple(names))
    except ValueError as exc:
        raise InputError(str(exc))


def _form_from_arg(args) -> KForm:
    base = _chart_from_arg(args.chart)
    try:
        return ct.parse_form(args.form, base)
    except sx.ExprSyntaxError as exc:
        raise InputError(f"--form: {exc}")


def _print_form_result(command: str, args, result: KForm,
                       chart_vars, started: float) -> int:
    extras = {"result": ct.form_to_string(result),
              "chart": list(chart_vars),
              "records": ct.form_to_records(result)}
    if args.json == "-":
        return _finish(Report(command, args.form, None, [], extras),
                       args, started)
    print(ct.form_to_string(result))
    if args.json:
        payload = Report(command, args.form, None, [], extras).to_json()
        Path(args.json).write_text(json.dumps(payload, indent=2,
                                              sort_keys=True) + "\n")
    return EXIT_PASS


def cmd_lift(args) -> int:
    started = time.time()
    form = _form_from_arg(args)
    tc = tl.tangent_chart(form.chart)
    lifted = tl.tangent_lift(tc, form).simplified()
    return _print_form_result("lift", args, lifted, tc.total.variables,
                              started)


def cmd_tau(args) -> int:
    started = time.time()
    form = _form_from_arg(args)
    if form.degree < 1:
        raise InputError("tau needs a form of degree at least 1")
    tc = tl.tangent_chart(form.chart)
    result = tl.tau(tc, form).simplified()
    return _print_form_result("tau", args, result, tc.total.variables,
                              started)


def cmd_check_dirac(args) -> int:
    started = time.time()
    doc = load_problem(args.file)
    if doc["kind"] != "dirac":
        raise InputError(f"{args.file}: expected kind 'dirac'")
    opts = resolve_options(doc, args)
    if "tolerance" not in doc.get("options", {}) and args.tol is None:
        opts.tolerance = 1e-8  # involutivity default
    frame = load_dirac(doc)
    rep = cat.dirac_to_im(frame, samples=opts.samples, tol=opts.tolerance,
                          seed=opts.seed, box=opts.box)
    extras = {"accepted": rep.accepted,
              "max_involutivity_residual": rep.max_involutivity_residual,
              "max_im2_residual": rep.max_im2_residual}
    return _finish(Report("check-dirac", args.file, opts, list(rep.cases),
                          extras), args, started)


def _pair_groupoid_report(model, opts) -> tuple[list[CaseResult], dict]:
    rep = cat.pair_groupoid_check(model, opts.mode, **opts.equality_kwargs())
    extras = {
        "sigma": [[sx.to_string(c) for c in row] for row in rep.sigma],
        "phi": ct.form_to_string(rep.phi),
        "induced_form": ct.form_to_string(rep.lf_form),
    }
    return list(rep.cases), extras


def cmd_check_pair_groupoid(args) -> int:
    started = time.time()
    doc = load_problem(args.file)
    if doc["kind"] != "pair-groupoid":
        raise InputError(f"{args.file}: expected kind 'pair-groupoid'")
    opts = resolve_options(doc, args)
    model = load_pair_groupoid(doc)
    checks, extras = _pair_groupoid_report(model, opts)
    return _finish(Report("check-pair-groupoid", args.file, opts, checks,
                          extras), args, started)


def cmd_verify_identities(args) -> int:
    started = time.time()
    source = args.file or "builtin"
    doc = {}
    if args.file:
        doc = load_problem(args.file)
        if doc["kind"] != "identity-suite":
            raise InputError(f"{args.file}: expected kind 'identity-suite'")
    opts = resolve_options(doc, args)
    suite = doc.get("suite", {})
    count = args.count or suite.get("count", 50)
    dims = tuple(args.dims or suite.get("dims", (2, 3)))
    checks = []
    for res in ids.exterior_suite(count=max(count, 1), dims=dims,
                                  seed=opts.seed):
        checks.append(CaseResult(res.name, res.passed,
                                 {"detail": res.detail} if res.detail else None))
    for res in ids.lift_suite(count=max(count, 1), dims=dims, seed=opts.seed):
        checks.append(CaseResult(res.name, res.passed,
                                 {"detail": res.detail} if res.detail else None))
    return _finish(Report("verify-identities", source, opts, checks,
                          {"count": count, "dims": list(dims)}), args, started)


def cmd_demo(args) -> int:
    started = time.time()
    try:
        entry = cat.find_entry(args.name)
    except KeyError as exc:
        raise InputError(str(exc))
    opts = resolve_options({}, args)
    checks: list[CaseResult] = []
    extras: dict = {"entry": entry.name, "description": entry.description}

    if isinstance(entry, cat.IMEntry):
        axioms = alg.check_axioms(entry.data.algebroid, opts.mode,
                                  **opts.equality_kwargs())
        checks.extend(CaseResult(f"axiom_{c.name}", c.passed, c.witness,
                                 c.inconclusive) for c in axioms.cases)
        rep = imf.check_morphism(entry.data, opts.mode,
                                 **opts.equality_kwargs())
        checks.extend(rep.cases)
        extras["equivalence_holds"] = rep.im_verdict == rep.morphism_verdict
        expected = {"IM1": entry.expect_im1, "IM2": entry.expect_im2,
                    "anchor_core": entry.expect_im1,
                    "anchor_linear": entry.expect_im2,
                    "bracket_core_core": True,
                    "bracket_core_linear": entry.expect_im2,
                    "bracket_linear_linear": entry.expect_ll_pass}
        extras["expected_signature_matched"] = all(
            c.passed == expected[c.name] for c in rep.cases)
    elif isinstance(entry, cat.AlgebroidEntry):
        rep = alg.check_axioms(entry.algebroid, opts.mode,
                               **opts.equality_kwargs())
        checks.extend(rep.cases)
        extras["expected_signature_matched"] = \
            rep.passed == entry.expect_axioms
    elif isinstance(entry, cat.DiracEntry):
        rep = cat.dirac_to_im(entry.frame, samples=opts.samples,
                              tol=max(opts.tolerance, 1e-8), seed=opts.seed,
                              box=opts.box)
        checks.extend(rep.cases)
        extras["expected_signature_matched"] = \
            rep.accepted == entry.expect_accepted
    elif isinstance(entry, cat.PairGroupoidEntry):
        sub, more = _pair_groupoid_report(entry.model, opts)
        checks.extend(sub)
        extras.update(more)
        extras["expected_signature_matched"] = \
            sub[0].passed == entry.expect_multiplicative
    if args.export:
        _export_entry(entry, args.export)
        print(f"input file written to {args.export}")
    return _finish(Report("demo", args.name, opts, checks, extras),
                   args, started)


# --- exporting catalog entries as input files -------------------------------

def _toml_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (int, float)):
        return repr(value)
    if isinstance(value, str):
        return json.dumps(value)
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_toml_value(v) for v in value) + "]"
    raise TypeError(f"cannot serialize {type(value).__name__} to TOML")


def emit_toml(doc: dict) -> str:
    """Minimal TOML writer for the problem-file structure."""
    lines = []

    def walk(table: dict, prefix: str):
        scalars = {k: v for k, v in table.items()
                   if not isinstance(v, dict)
                   and not (isinstance(v, list) and v
                            and isinstance(v[0], dict))}
        if prefix and scalars:
            lines.append(f"[{prefix}]")
        for k, v in scalars.items():
            lines.append(f"{k} = {_toml_value(v)}")
        if scalars:
            lines.append("")
        for k, v in table.items():
            if isinstance(v, dict):
                walk(v, f"{prefix}.{k}" if prefix else k)
            elif isinstance(v, list) and v and isinstance(v[0], dict):
                name = f"{prefix}.{k}" if prefix else k
                for item in v:
                    lines.append(f"[[{name}]]")
                    for ik, iv in item.items():
                        lines.append(f"{ik} = {_toml_value(iv)}")
                    lines.append("")

    walk(doc, "")
    return "\n".join(lines).rstrip() + "\n"


def _algebroid_doc(A: LieAlgebroid) -> dict:
    return {
        "n": A.dim,
        "r": A.rank,
        "variables": list(A.base.variables),
        "rho": [[sx.to_string(c) for c in row] for row in A.anchor],
        "C": [[[sx.to_string(c) for c in row] for row in plane]
              for plane in A.structure],
    }


def _export_entry(entry, path: str):
    if isinstance(entry, cat.IMEntry):
        doc = {"kind": "im",
               "algebroid": _algebroid_doc(entry.data.algebroid),
               "im": {"sigma": [[sx.to_string(c) for c in row]
                                for row in entry.data.sigma],
                      "phi": ct.form_to_records(entry.data.phi)}}
    elif isinstance(entry, cat.AlgebroidEntry):
        doc = {"kind": "algebroid",
               "algebroid": _algebroid_doc(entry.algebroid)}
    elif isinstance(entry, cat.DiracEntry):
        frame = entry.frame
        n = frame.base.dim
        doc = {"kind": "dirac",
               "dirac": {
                   "variables": list(frame.base.variables),
                   "fields": [[sx.to_string(c) for c in f.components]
                              for f in frame.fields],
                   "forms": [[sx.to_string(a.coeffs.get((j,), sx.ZERO))
                              for j in range(n)] for a in frame.forms],
                   "phi": ct.form_to_records(frame.phi)}}
    elif isinstance(entry, cat.PairGroupoidEntry):
        doc = {"kind": "pair-groupoid",
               "groupoid": {
                   "variables": list(entry.model.base.variables),
                   "omega": ct.form_to_records(entry.model.omega)}}
    else:  # pragma: no cover
        raise InputError(f"cannot export entry {entry!r}")
    Path(path).write_text(emit_toml(doc))


# --- argument parsing -------------------------------------------------------

def _add_common(p: argparse.ArgumentParser, with_file: bool = True):
    if with_file:
        p.add_argument("file", help="problem file (TOML)")
    p.add_argument("--mode", choices=["symbolic", "numeric"], default=None)
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--box", type=float, nargs=2, default=None,
                   metavar=("LO", "HI"))
    p.add_argument("--json", metavar="PATH",
                   help="write a JSON report ('-' for stdout only)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="linform",
        description="Verification engine for linear 2-forms on Lie "
                    "algebroids: axiom checks, IM conditions, morphism "
                    "tests, lifts, and the built-in example catalog.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-algebroid", help="structure-function axioms")
    _add_common(p)
    p.add_argument("--prolongations", action="store_true",
                   help="also check the induced tangent/cotangent "
                        "generator relations")
    p.set_defaults(handler=cmd_check_algebroid)

    p = sub.add_parser("check-im", help="the two IM conditions")
    _add_common(p)
    p.set_defaults(handler=cmd_check_im)

    p = sub.add_parser("check-morphism",
                       help="casewise algebroid-morphism test")
    _add_common(p)
    p.set_defaults(handler=cmd_check_morphism)

    p = sub.add_parser("build-lambda", help="construct the linear 2-form")
    _add_common(p)
    p.set_defaults(handler=cmd_build_lambda)

    p = sub.add_parser("analyze-linear", help="classify a 2-form on a "
                                              "bundle chart")
    _add_common(p)
    p.set_defaults(handler=cmd_analyze_linear)

    p = sub.add_parser("lift", help="tangent lift of a form")
    _add_common(p, with_file=False)
    p.add_argument("--form", required=True)
    p.add_argument("--chart", required=True,
                   help="comma-separated base variables")
    p.set_defaults(handler=cmd_lift)

    p = sub.add_parser("tau", help="degree-lowering lift of a form")
    _add_common(p, with_file=False)
    p.add_argument("--form", required=True)
    p.add_argument("--chart", required=True)
    p.set_defaults(handler=cmd_tau)

    p = sub.add_parser("check-dirac", help="twisted Dirac frame check")
    _add_common(p)
    p.set_defaults(handler=cmd_check_dirac)

    p = sub.add_parser("check-pair-groupoid",
                       help="multiplicativity and the induced linear form")
    _add_common(p)
    p.set_defaults(handler=cmd_check_pair_groupoid)

    p = sub.add_parser("demo", help="run a catalog entry end to end")
    _add_common(p, with_file=False)
    p.add_argument("name", nargs="?", default=None)
    p.add_argument("--list", action="store_true", help="list entry names")
    p.add_argument("--export", metavar="PATH",
                   help="write the entry as an input file")
    p.set_defaults(handler=cmd_demo)

    p = sub.add_parser("verify-identities",
                       help="randomized calculus/lift identity suites")
    _add_common(p, with_file=False)
    p.add_argument("file", nargs="?", default=None,
                   help="optional identity-suite problem file")
    p.add_argument("--count", type=int, default=None,
                   help="samples per identity")
    p.add_argument("--dims", type=int, nargs="+", default=None)
    p.set_defaults(handler=cmd_verify_identities)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "demo" and args.list:
        for name in cat.catalog_names():
            print(name)
        return EXIT_PASS
    if args.command == "demo" and not args.name:
        print("demo: a catalog entry name is required (see --list)",
              file=sys.stderr)
        return EXIT_INVALID
    try:
        return args.handler(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
