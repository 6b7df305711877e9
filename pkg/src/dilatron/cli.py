"""``dilatron`` command line interface.

Every subcommand prints one JSON report on stdout and exits with 0 when the
numerical checks pass, 2 when they fail and 3 on invalid input or usage.
Set ``DILATRON_TOLERANCE_SCALE`` to multiply every tolerance; reports record
the effective values.
"""

import argparse
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np

from . import io
from .cpmap import automorphism_compression_check, depolarizing_map, index, is_cp, transpose_map
from .dilation import (
    NDilation,
    check_n_minimality,
    egervary_dilation,
    ergodic_demo,
    graded_indices,
    halmos_dilation,
    verify_dilation,
)
from .errors import DilatronError, InputError
from .linalg import EPS_DC, EPS_DIL, EPS_PSD, RANK_TOL, operator_norm
from .multi import ContractionTuple, brehmer_check, doubly_commuting_dilation, verify_regular
from .polynomial import MultiPoly, holbrook_polynomial, sup_norm_torus
from .spectral import EPS_JD, scalar_cubature, vn_certificate, vn_check

EXIT_PASS = 0
EXIT_FAIL = 2
EXIT_INPUT = 3

COMMANDS = (
    "dilate",
    "dilate-tuple",
    "verify",
    "verify-regular",
    "brehmer",
    "cubature",
    "vn-check",
    "cp-index",
    "ergodic-demo",
    "demo",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


@dataclass
class RunReport:
    command: str
    passed: bool
    residuals: Dict[str, float] = field(default_factory=dict)
    outputs: List[str] = field(default_factory=list)
    seed: int = 42
    tolerances: Dict[str, float] = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = dict(self.details)
        out.update(
            command=self.command,
            residuals={k: float(v) for k, v in self.residuals.items()},
            outputs=list(self.outputs),
            seed=self.seed,
            tolerances=dict(self.tolerances),
        )
        out["pass"] = bool(self.passed)
        return out


def tolerances() -> Dict[str, float]:
    raw = os.environ.get("DILATRON_TOLERANCE_SCALE", "1")
    try:
        scale = float(raw)
    except ValueError:
        raise InputError(f"DILATRON_TOLERANCE_SCALE: not a number ({raw!r})") from None
    if not np.isfinite(scale) or scale <= 0:
        raise InputError("DILATRON_TOLERANCE_SCALE: must be a positive finite number")
    return {
        "scale": scale,
        "eps_dil": EPS_DIL * scale,
        "eps_dc": EPS_DC * scale,
        "eps_psd": EPS_PSD * scale,
        "eps_jd": EPS_JD * scale,
        "rank_tol": RANK_TOL * scale,
    }


def _load_matrix_or_tuple(path) -> ContractionTuple:
    obj = io.load_json(path)
    if isinstance(obj, dict) and "ops" in obj:
        return io.tuple_from_json(obj)
    mat = io.cmatrix_from_json(obj)
    try:
        return ContractionTuple((mat,))
    except DilatronError as exc:
        raise InputError(f"<root>: {exc}") from exc


def _write(path, payload, report: RunReport):
    Path(path).write_text(io.dumps(payload))
    report.outputs.append(str(path))


def _dilation_report(command, dil, tup, order, tol, args) -> RunReport:
    rep = verify_dilation(dil, tup, order, tol["eps_dil"])
    report = RunReport(
        command,
        rep.passed,
        residuals={
            "max_residual": rep.max_residual,
            "unitarity": rep.unitarity_residual,
            "commutation": rep.commutation_residual,
        },
        seed=args.seed,
        tolerances=tol,
        details={"dimension": dil.dim, "h_dim": dil.h_dim, "order": dil.order, "construction": dil.construction},
    )
    if getattr(args, "out", None):
        _write(args.out, io.dilation_to_json(dil), report)
    else:
        report.details["dilation"] = io.dilation_to_json(dil)
    if getattr(args, "cert_out", None):
        cert = vn_certificate(dil, tup, seed=args.seed, tol=tol["eps_dil"])
        _write(args.cert_out, io.certificate_to_json(cert), report)
    return report


def cmd_dilate(args, tol) -> RunReport:
    tup = _load_matrix_or_tuple(args.inp)
    if len(tup) != 1:
        raise InputError("ops: 'dilate' takes a single matrix; use 'dilate-tuple' for tuples")
    t = tup.ops[0]
    if args.method == "halmos":
        dil = halmos_dilation(t, eps_psd=tol["eps_psd"])
    else:
        dil = egervary_dilation(t, args.order, eps_psd=tol["eps_psd"])
    report = _dilation_report("dilate", dil, tup, dil.order, tol, args)
    minimal, span = check_n_minimality(dil, rank_tol=tol["rank_tol"])
    report.details.update(method=args.method, n_minimal=minimal, span_dimension=span)
    return report


def cmd_dilate_tuple(args, tol) -> RunReport:
    tup = _load_matrix_or_tuple(args.inp)
    dil = doubly_commuting_dilation(tup, args.order, eps_dc=tol["eps_dc"])
    report = _dilation_report("dilate-tuple", dil, tup, args.order, tol, args)
    reg = verify_regular(dil, tup, args.order, tol["eps_dil"])
    report.residuals["regular_max_residual"] = reg.max_residual
    report.passed = report.passed and reg.passed
    return report


def _verify(args, tol, regular: bool) -> RunReport:
    dil = io.dilation_from_json(io.load_json(args.dilation))
    tup = _load_matrix_or_tuple(args.tuple)
    fn = verify_regular if regular else verify_dilation
    try:
        rep = fn(dil, tup, args.order, tol["eps_dil"])
    except DilatronError as exc:
        raise InputError(str(exc)) from exc
    return RunReport(
        "verify-regular" if regular else "verify",
        rep.passed,
        residuals={
            "max_residual": rep.max_residual,
            "unitarity": rep.unitarity_residual,
            "commutation": rep.commutation_residual,
        },
        seed=args.seed,
        tolerances=tol,
        details={"report": rep.to_dict()},
    )


def cmd_brehmer(args, tol) -> RunReport:
    tup = _load_matrix_or_tuple(args.inp)
    rep = brehmer_check(tup, tol=tol["eps_psd"])
    return RunReport(
        "brehmer",
        rep.passed,
        residuals={"min_eigenvalue": min(rep.min_eigenvalues.values())},
        seed=args.seed,
        tolerances=tol,
        details={"min_eigenvalues": rep.to_dict()["min_eigenvalues"], "commute_residual": tup.commute_residual},
    )


def cmd_cubature(args, tol) -> RunReport:
    point = io.point_from_json(io.load_json(args.point))
    rule = scalar_cubature(point, args.order, seed=args.seed)
    worst = 0.0
    for e in graded_indices(len(point), args.order):
        mono = MultiPoly.monomial(e)
        worst = max(worst, abs(mono(*point) - rule.apply(mono)))
    report = RunReport(
        "cubature",
        worst <= 1e-9 * tol["scale"] and abs(rule.weights.sum() - 1) <= 1e-12 * tol["scale"],
        residuals={"exactness": worst, "weight_sum": abs(float(rule.weights.sum()) - 1.0)},
        seed=args.seed,
        tolerances=tol,
        details={"size": rule.size},
    )
    if args.out:
        _write(args.out, io.rule_to_json(rule), report)
    else:
        report.details["rule"] = io.rule_to_json(rule)
    return report


def cmd_vn_check(args, tol) -> RunReport:
    tup = _load_matrix_or_tuple(args.tuple)
    p = io.poly_from_json(io.load_json(args.poly))
    cert = io.certificate_from_json(io.load_json(args.cert)) if args.cert else None
    if p.num_vars != len(tup):
        raise InputError(f"vars: polynomial has {p.num_vars} variables, tuple has {len(tup)} operators")
    if cert is not None and cert.points.shape[1] != len(tup):
        raise InputError("points: certificate dimension does not match the tuple")
    rep = vn_check(tup, p, cert, grid_per_dim=args.grid)
    residuals = {"sup_margin": rep.sup_bound - rep.lhs}
    if rep.cert_bound is not None:
        residuals["cert_margin"] = rep.cert_bound - rep.lhs
    return RunReport("vn-check", rep.passed, residuals=residuals, seed=args.seed, tolerances=tol,
                     details=rep.to_dict())


def cmd_cp_index(args, tol) -> RunReport:
    phi = io.cpmap_from_json(io.load_json(args.inp))
    cp, lam = is_cp(phi, tol["eps_psd"])
    d = index(phi, tol["rank_tol"], tol["eps_psd"]) if cp else None
    return RunReport(
        "cp-index",
        cp,
        residuals={"choi_min_eig": lam},
        seed=args.seed,
        tolerances=tol,
        details={"cp": cp, "index": d, "choi_min_eig": lam, "contractivity": phi.contractivity()},
    )


def _ergodic(order, seed, tol) -> RunReport:
    rep = ergodic_demo(order)
    agree = abs(rep.matrix_residual_modulus - rep.residual_modulus)
    comp = abs(rep.compression_modulus - 1.0 / (order + 1))
    return RunReport(
        "ergodic-demo",
        agree <= 1e-8 * tol["scale"] and comp <= tol["eps_dil"] and rep.eigen_residual <= tol["eps_dil"],
        residuals={"matrix_vs_scalar": agree, "compression_vs_cesaro": comp, "eigenvector": rep.eigen_residual},
        seed=seed,
        tolerances=tol,
        details=dict(rep.to_dict(), relative_gap=abs(rep.residual_modulus - rep.limit_target) / rep.limit_target),
    )


def cmd_ergodic(args, tol) -> RunReport:
    return _ergodic(args.order, args.seed, tol)


def _entry(name, passed, **details):
    return {"name": name, "pass": bool(passed), **details}


def cmd_demo(args, tol) -> RunReport:
    rng = np.random.default_rng(args.seed)
    entries = []

    t = np.array([[0.5]])
    hal = halmos_dilation(t)
    eg = egervary_dilation(t, 1)
    h1 = verify_dilation(hal, t, 1)
    h2 = verify_dilation(hal, t, 2)
    e3 = verify_dilation(egervary_dilation(t, 3), t, 3)
    entries.append(_entry(
        "halmos_vs_egervary_t05",
        h1.passed and not h2.passed and e3.passed,
        halmos_order2_residual=h2.max_residual,
        egervary_order3_residual=e3.max_residual,
        halmos_minus_egervary_order1=operator_norm(hal.unitary - eg.unitary),
    ))

    u1 = np.array([[0, 1], [1, 0]], dtype=complex)
    u2 = np.array([[0, -1], [1, 0]], dtype=complex)
    zero = np.zeros((1, 1))
    ok = []
    spectra = []
    for u in (u1, u2):
        d = NDilation((u,), h_dim=1, order=1)
        ok.append(verify_dilation(d, zero, 1).passed and check_n_minimality(d)[0])
        spectra.append(sorted(np.round(np.linalg.eigvals(u), 12).tolist(), key=lambda z: (z.real, z.imag)))
    entries.append(_entry(
        "two_nonisomorphic_1_dilations_of_0",
        all(ok) and spectra[0] != spectra[1],
        spectra=[[[z.real, z.imag] for z in s] for s in spectra],
    ))

    point = 0.9 * (rng.random(2) * np.exp(2j * np.pi * rng.random(2)))
    rule = scalar_cubature(point, 2, seed=args.seed)
    exact = max(abs(MultiPoly.monomial(e)(*point) - rule.apply(MultiPoly.monomial(e)))
                for e in graded_indices(2, 2))
    entries.append(_entry("pair_cubature", exact <= 1e-9 and rule.size == 9,
                          point=[[z.real, z.imag] for z in point], exactness=exact, size=rule.size))

    s = np.array([[0, 1], [0, 0]], dtype=complex)
    br = brehmer_check([s, s])
    entries.append(_entry("brehmer_failure_S_S", (not br.passed) and abs(br.min_eigenvalues[(0, 1)] + 1) <= 1e-12,
                          min_eigenvalue=br.min_eigenvalues[(0, 1)]))

    hol = holbrook_polynomial()
    sup = sup_norm_torus(hol, 64)
    entries.append(_entry("holbrook_sup_norm", abs(sup - 5.0) <= 1e-9, sup_norm=sup, grid_per_dim=64,
                          value_at_ones=[hol(1, 1, 1).real, hol(1, 1, 1).imag]))

    idx_aut = index(automorphism_compression_check(_haar_unitary(rng, 4), 2))
    idx_dep = index(depolarizing_map(2))
    tr_cp, tr_min = is_cp(transpose_map(2))
    entries.append(_entry("cp_index_samples", idx_aut == 1 and idx_dep == 4 and not tr_cp,
                          automorphism_compression_index=idx_aut, depolarizing_index=idx_dep,
                          transpose_choi_min_eig=tr_min))

    erg = _ergodic(500, args.seed, tol)
    entries.append(_entry("ergodic_N500", erg.passed and erg.details["relative_gap"] <= 0.01,
                          residual_modulus=erg.details["residual_modulus"],
                          compression_modulus=erg.details["compression_modulus"]))

    return RunReport("demo", all(e["pass"] for e in entries), seed=args.seed, tolerances=tol,
                     details={"entries": entries})


def _haar_unitary(rng, n):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def build_parser() -> argparse.ArgumentParser:
    # the subcommand copy must not clobber a value given before the subcommand
    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for every randomized choice")

    parser = _Parser(prog="dilatron", description=__doc__.splitlines()[0])
    parser.add_argument("--seed", type=int, default=42, help="seed for every randomized choice")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("dilate", parents=[common], help="dilate a single contraction")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--order", type=int, default=1)
    p.add_argument("--method", choices=("halmos", "egervary"), default="egervary")
    p.add_argument("--out")
    p.add_argument("--cert-out")
    p.set_defaults(func=cmd_dilate)

    p = sub.add_parser("dilate-tuple", parents=[common], help="dilate a doubly commuting tuple")
    p.add_argument("--in", dest="inp", required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--out")
    p.add_argument("--cert-out")
    p.set_defaults(func=cmd_dilate_tuple)

    for name, regular in (("verify", False), ("verify-regular", True)):
        p = sub.add_parser(name, parents=[common], help="check a dilation against a tuple")
        p.add_argument("--dilation", required=True)
        p.add_argument("--tuple", required=True)
        p.add_argument("--order", type=int, required=True)
        p.set_defaults(func=lambda a, t, r=regular: _verify(a, t, r))

    p = sub.add_parser("brehmer", parents=[common], help="Brehmer positivity conditions")
    p.add_argument("--in", dest="inp", required=True)
    p.set_defaults(func=cmd_brehmer)

    p = sub.add_parser("cubature", parents=[common], help="torus cubature rule for a point of the polydisc")
    p.add_argument("--point", required=True)
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_cubature)

    p = sub.add_parser("vn-check", parents=[common], help="von Neumann inequality check")
    p.add_argument("--tuple", required=True)
    p.add_argument("--poly", required=True)
    p.add_argument("--cert")
    p.add_argument("--grid", type=int)
    p.set_defaults(func=cmd_vn_check)

    p = sub.add_parser("cp-index", parents=[common], help="complete positivity and index of a map")
    p.add_argument("--in", dest="inp", required=True)
    p.set_defaults(func=cmd_cp_index)

    p = sub.add_parser("ergodic-demo", parents=[common], help="Cesaro means of a cyclic-shift dilation")
    p.add_argument("--order", type=int, required=True)
    p.set_defaults(func=cmd_ergodic)

    p = sub.add_parser("demo", parents=[common], help="run the bundled tour")
    p.set_defaults(func=cmd_demo)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command is None:
            raise UsageError(parser.format_usage() + "dilatron: error: a subcommand is required")
        if getattr(args, "order", 1) < 1:
            raise UsageError("--order must be a positive integer")
        tol = tolerances()
        report = args.func(args, tol)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INPUT
    except (DilatronError, ValueError) as exc:
        print(f"dilatron: error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    sys.stdout.write(io.dumps(report.to_dict()))
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
