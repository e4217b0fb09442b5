"""Command-line interface: one subcommand per operation, reproducible reports.

Report files never contain timestamps, so identical parameters give byte
identical outputs; each written output is accompanied by a manifest that
records the parameters, tool version, input digests, and the timestamp.
Exact rationals are serialized as "num/den" strings and reals as decimal
strings, for cross-language reproducibility.

Exit codes: 0 success, 1 domain error, 2 usage error.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path

from . import __version__, cf, constants, constructors, groups, spectra
from .radix import read_digit_file, write_digit_file

_REAL_FORMAT = ".17g"


def _jsonify(obj):
    """Render reports deterministically: rationals as num/den, reals as decimal strings."""
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, float):
        return format(obj, _REAL_FORMAT)
    if isinstance(obj, dict):
        return {k: _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    return obj


def _dump(payload: dict) -> str:
    return json.dumps(_jsonify(payload), indent=2, sort_keys=True) + "\n"


def _sha256(path: str) -> str:
    h = hashlib.sha256()
    h.update(Path(path).read_bytes())
    return "sha256:" + h.hexdigest()


def _write_outputs(args, text: str | None, outputs: list[str], params: dict, inputs: list[str]) -> None:
    out = getattr(args, "out", None)
    if text is not None and out:
        Path(out).write_text(text, encoding="utf-8")
        outputs = [out] + outputs
    elif text is not None:
        sys.stdout.write(text)
    if outputs:
        manifest = {
            "subcommand": args.command,
            "params": params,
            "version": __version__,
            "inputs": {path: _sha256(path) for path in inputs},
            "outputs": outputs,
            "generated_at": datetime.now(timezone.utc).isoformat(),
        }
        manifest_path = getattr(args, "manifest", None) or outputs[0] + ".manifest.json"
        Path(manifest_path).write_text(
            json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )


def _params(args, names: list[str]) -> dict:
    return {name: getattr(args, name) for name in names}


def _cmd_constants(args) -> int:
    req = constants.ConstantRequest(args.name, args.digits, args.method)
    stream = constants.const_digits(req)
    if args.out:
        write_digit_file(args.out, stream, args.digits, label=args.name)
        _write_outputs(args, None, [args.out], _params(args, ["name", "digits", "method"]), [])
    else:
        sys.stdout.write(f"{constants.integer_part(args.name)}.{stream.prefix_string(args.digits)}\n")
    return 0


def _cmd_construct(args) -> int:
    if args.family == "stoneham":
        spec = constructors.StonehamSpec(b=args.b, c=args.c, s=args.s)
        stream = constructors.stoneham_digits(spec, args.digits)
        params = _params(args, ["family", "b", "c", "s", "digits"])
    else:
        spec = constructors.ConcatSpec(family=args.family, base=args.base)
        stream = constructors.concat_digits(spec, args.digits)
        params = _params(args, ["family", "base", "digits"])
    if args.out:
        write_digit_file(args.out, stream, args.digits)
        _write_outputs(args, None, [args.out], params, [])
    else:
        sys.stdout.write(stream.prefix_string(args.digits) + "\n")
    return 0


def _cmd_cf(args) -> int:
    if args.const != "pi":
        raise ValueError(f"unsupported constant {args.const!r}; only pi is wired in")
    convs = cf.pi_convergents(args.depth)
    payload = {
        "const": args.const,
        "depth": args.depth,
        "convergents": [
            {"k": c.k, "a": str(c.a), "p": str(c.p), "q": str(c.q)} for c in convs
        ],
    }
    _write_outputs(args, _dump(payload), [], _params(args, ["const", "depth"]), [])
    return 0


def _cmd_audit(args) -> int:
    convs = cf.pi_convergents(args.k)
    conv = convs[args.k]
    cfg = cf.AuditConfig(mu=args.mu, n_max=args.nmax, implied_constant_report=args.scaled)
    if args.lemma == "caseI":
        audit = cf.audit_lemma_caseI(conv, cfg)
    elif args.lemma == "caseII":
        audit = cf.audit_lemma_caseII(conv, cfg)
    else:
        audit = cf.audit_lemma_prime_variant(conv, cfg, window_factor=args.window_factor)
    payload = cf.audit_to_jsonable(audit, include_scaled=cfg.implied_constant_report)
    _write_outputs(
        args, _dump(payload), [],
        _params(args, ["lemma", "k", "mu", "nmax", "window_factor"]), [],
    )
    return 0


def _cmd_order(args) -> int:
    sys.stdout.write(f"{groups.mult_order(args.g, args.m)}\n")
    return 0


def _cmd_coset(args) -> int:
    convs = cf.pi_convergents(args.k)
    report = groups.coset_structure(convs[args.k], element_cap=args.cap)
    payload = {
        "k": args.k,
        "p": str(report.p),
        "q": str(report.q),
        "hypothesis_ok": report.hypothesis_ok,
        "order": report.base.order if report.base else None,
        "totient": report.base.totient if report.base else None,
        "g_size": report.g_size,
        "h_size": report.h_size,
        "h_equals_subgroup": report.h_equals_subgroup,
        "g_equals_coset": report.g_equals_coset,
        "g_elements": list(report.g_elements) if report.g_elements else None,
        "h_elements": list(report.h_elements) if report.h_elements else None,
    }
    _write_outputs(args, _dump(payload), [], _params(args, ["k", "cap"]), [])
    return 0


def _cmd_artin(args) -> int:
    outputs = []
    if args.csv:
        lines = ["q,ord,is_artin"]
        for q, order, is_artin in groups.artin_rows(args.limit):
            lines.append(f"{q},{order},{str(is_artin).lower()}")
        Path(args.csv).write_text("\n".join(lines) + "\n", encoding="utf-8")
        outputs.append(args.csv)
    scan = groups.artin_scan(args.limit, threads=args.threads)
    payload = {
        "limit": scan.limit,
        "count_primes": scan.count_primes,
        "count_artin": scan.count_artin,
        "density": scan.density,
    }
    _write_outputs(args, _dump(payload), outputs, _params(args, ["limit", "threads"]), [])
    return 0


def _cmd_weyl(args) -> int:
    values = []
    for line in Path(args.points).read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line:
            values.append(float(line))
    pts = spectra.PointSet(points=tuple(values), eps=args.eps, label=Path(args.points).name)
    m_list = [int(tok) for tok in args.m.split(",") if tok]
    report = spectra.weyl_sum(pts, m_list)
    payload = {
        "points": args.points,
        "n_points": report.n_points,
        "rows": [
            {"m": row.m, "magnitude": row.magnitude, "error_bound": row.error_bound}
            for row in report.rows
        ],
    }
    _write_outputs(args, _dump(payload), [], _params(args, ["points", "m", "eps"]), [args.points])
    return 0


def _cmd_normality(args) -> int:
    stream = read_digit_file(args.infile)
    blocks = {}
    for k in range(1, args.kmax + 1):
        stats = spectra.block_frequency(stream, args.N, k)
        blocks[str(k)] = {
            "windows": stats.windows,
            "max_abs_dev": stats.max_abs_dev,
            "chi_square": stats.chi_square,
            "dof": stats.dof,
            "counts": stats.counts,
        }
    payload = {"input": args.infile, "label": stream.label, "base": stream.base,
               "n_digits": args.N, "blocks": blocks}
    _write_outputs(args, _dump(payload), [], _params(args, ["infile", "N", "kmax"]), [args.infile])
    return 0


def _cmd_expsum(args) -> int:
    report = groups.subgroup(args.g, args.p, element_cap=args.cap)
    result = spectra.subgroup_expsum(report, c=args.c, method=args.method)
    payload = {
        "p": result.modulus,
        "g": result.generator,
        "order": result.subgroup_order,
        "c": result.c,
        "max_magnitude": result.max_magnitude,
        "argmax": result.argmax,
        "bound": result.bound,
        "ratio": result.ratio,
        "method": result.method,
    }
    _write_outputs(args, _dump(payload), [], _params(args, ["p", "g", "c", "cap", "method"]), [])
    return 0


def _cmd_report(args) -> int:
    inputs = []
    if args.infile:
        stream = read_digit_file(args.infile)
        inputs.append(args.infile)
    elif args.const:
        stream = constants.const_digits(constants.ConstantRequest(args.const, args.N + 30))
    else:
        raise ValueError("either --in or --const is required")
    payload = spectra.wall_criterion_report(stream, args.N, args.kmax, args.mmax)
    _write_outputs(
        args, _dump(payload), [],
        _params(args, ["infile", "const", "N", "kmax", "mmax"]), inputs,
    )
    return 0


def _add_out(sub) -> None:
    sub.add_argument("--out", help="write the result to this file (a manifest lands beside it)")
    sub.add_argument("--manifest", help="override the manifest path")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pilab",
        description="Digit expansions, continued-fraction interval audits, and equidistribution statistics.",
    )
    parser.add_argument("--version", action="version", version=f"pilab {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("constants", help="certified digits of pi, ln 10, or ln pi",
                        description="Dual-method certified decimal digits; both engines must agree on every released digit.")
    p.add_argument("--name", required=True, choices=["pi", "ln10", "ln_pi"])
    p.add_argument("--digits", required=True, type=int)
    p.add_argument("--method", default="primary", choices=["primary", "cross-check"])
    _add_out(p)
    p.set_defaults(func=_cmd_constants)

    p = subs.add_parser("construct", help="digit streams of the concatenation/power-series families",
                        description="Concatenations of integers, primes, or squares, and the coprime power series family.")
    p.add_argument("--family", required=True, choices=["integers", "primes", "squares", "stoneham"])
    p.add_argument("--base", type=int, default=10, help="output base for integers/squares")
    p.add_argument("--b", type=int, default=10, help="stoneham base b")
    p.add_argument("--c", type=int, default=3, help="stoneham parameter c, coprime to b")
    p.add_argument("--s", type=int, default=0, help="stoneham shift s >= 0")
    p.add_argument("--digits", required=True, type=int)
    _add_out(p)
    p.set_defaults(func=_cmd_construct)

    p = subs.add_parser("cf", help="continued-fraction convergents",
                        description="Certified partial quotients and convergents p_k/q_k of pi.")
    p.add_argument("--const", default="pi")
    p.add_argument("--depth", required=True, type=int)
    _add_out(p)
    p.set_defaults(func=_cmd_cf)

    p = subs.add_parser("audit", help="interval audits of {pi 10^n} against convergent residues",
                        description="Two-sided interval checks of {pi 10^n} built from residue decompositions "
                                    "modulo q_k (or a nearby prime); rows record pass/fail and margins, never raise.")
    p.add_argument("--lemma", required=True, choices=["caseI", "caseII", "prime"])
    p.add_argument("--k", required=True, type=int, help="convergent index")
    p.add_argument("--mu", type=float, default=2.0, help="irrationality-measure parameter >= 2")
    p.add_argument("--nmax", type=int, default=12)
    p.add_argument("--window-factor", dest="window_factor", type=float, default=1.0,
                   help="prime search window half-width as a multiple of q/ln q")
    p.add_argument("--scaled", action=argparse.BooleanOptionalAction, default=True,
                   help="include q^2-scaled residual columns in prime reports")
    _add_out(p)
    p.set_defaults(func=_cmd_audit)

    p = subs.add_parser("order", help="multiplicative order of g modulo m")
    p.add_argument("--g", required=True, type=int)
    p.add_argument("--m", required=True, type=int)
    p.set_defaults(func=_cmd_order)

    p = subs.add_parser("coset", help="subgroup/coset structure of powers of 10 modulo q_k",
                        description="Builds {p 10^n mod q} and {(p q + 1) 10^n mod q} literally and compares them "
                                    "with <10> and its coset.")
    p.add_argument("--k", required=True, type=int)
    p.add_argument("--cap", type=int, default=groups.DEFAULT_ELEMENT_CAP)
    _add_out(p)
    p.set_defaults(func=_cmd_coset)

    p = subs.add_parser("artin", help="scan primes for 10 as a primitive root",
                        description="Counts primes q <= limit (excluding 2 and 5) with ord_q(10) = q - 1 and "
                                    "reports the empirical density.")
    p.add_argument("--limit", required=True, type=int)
    p.add_argument("--csv", help="write per-prime rows q,ord,is_artin to this file")
    p.add_argument("--threads", type=int, default=1)
    _add_out(p)
    p.set_defaults(func=_cmd_artin)

    p = subs.add_parser("weyl", help="normalized Weyl sum magnitudes of a point file",
                        description="Point file: one decimal in [0,1) per line.")
    p.add_argument("--points", required=True)
    p.add_argument("--m", required=True, help="comma-separated nonzero frequencies")
    p.add_argument("--eps", type=float, default=1e-15, help="certified per-point error bound")
    _add_out(p)
    p.set_defaults(func=_cmd_weyl)

    p = subs.add_parser("normality", help="block-frequency statistics of a digit file")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--N", required=True, type=int)
    p.add_argument("--kmax", required=True, type=int)
    _add_out(p)
    p.set_defaults(func=_cmd_normality)

    p = subs.add_parser("expsum", help="exponential sums over the subgroup <g> mod p",
                        description="Exhaustive max over a of |sum_{x in <g>} e(2 pi i a x / p)| with the "
                                    "exp(-(log p)^c) #H envelope and their ratio.")
    p.add_argument("--p", required=True, type=int)
    p.add_argument("--g", type=int, default=10)
    p.add_argument("--c", type=float, default=0.5)
    p.add_argument("--cap", type=int, default=groups.DEFAULT_ELEMENT_CAP)
    p.add_argument("--method", default="fft", choices=["fft", "naive"])
    _add_out(p)
    p.set_defaults(func=_cmd_expsum)

    p = subs.add_parser("report", help="combined equidistribution/normality report for a digit stream",
                        description="Builds the shift point set {x b^n mod 1}, runs Weyl magnitudes and star "
                                    "discrepancy, and tabulates block frequencies: both sides of the "
                                    "shift-equidistribution criterion for base-b normality.")
    p.add_argument("--in", dest="infile")
    p.add_argument("--const", choices=["pi", "ln10", "ln_pi"])
    p.add_argument("--N", required=True, type=int)
    p.add_argument("--kmax", type=int, default=3)
    p.add_argument("--mmax", type=int, default=5)
    _add_out(p)
    p.set_defaults(func=_cmd_report)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except (ValueError, ArithmeticError, RuntimeError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
