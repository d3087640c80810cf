"""Command-line front end: aligned tables, spectrum listings, identity
checks, and an append-only JSON-lines catalog of runs.

Exit codes: 0 success, 2 usage or input parse error, 3 window or
genericity failure, 4 violated identity/bound or catalog mismatch,
5 catalog I/O failure.  Timing measurements go to standard error so
standard output stays byte-deterministic for a fixed seed.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from . import __version__
from .closedform import (
    BinaryFormFactorization,
    binary_invariant_table,
    binary_pole_spectrum,
    binary_stage2_rows,
)
from .decomp import (
    AssumptionFailure,
    IdentityViolation,
    InvariantTable,
    NotStabilizedError,
    build_invariant_table,
    check_nodal_vanishing,
    verify_corollaries,
)
from .koszul import KoszulWindow
from .poly import HomogeneousPoly, parse_poly, serialize_poly
from .polespec import (
    BoundViolation,
    LiftFailure,
    PoleSpectrum,
    WellDefinednessViolation,
    check_exponent_bounds,
    pole_spectrum,
    stage_snapshot,
    torsion_profile,
)


def _timed(label: str, t0: float) -> None:
    print(f"[time] {label}: {time.perf_counter() - t0:.3f}s", file=sys.stderr)


def _parse_vars(text: str) -> list[str]:
    names = [v.strip() for v in text.split(",")]
    if any(not v for v in names):
        raise ValueError(f"bad variable list: {text!r}")
    return names


def parse_binary_form(text: str) -> BinaryFormFactorization:
    """Parse 'x:2,y:2,x+y:1' into a factored binary form in x and y."""
    pairs = []
    for chunk in text.split(","):
        lin_text, sep, mult_text = chunk.rpartition(":")
        if not sep:
            raise ValueError(f"factor {chunk!r} needs the form linear:multiplicity")
        lin = parse_poly(lin_text.strip(), ["x", "y"])
        pairs.append((lin, int(mult_text)))
    return BinaryFormFactorization.from_factors(pairs)


# -- rendering -----------------------------------------------------------------


def render_rows(rows: list[tuple[str, list[int]]], k_hi: int) -> str:
    """Aligned table, one labeled row per sequence, zero entries blank."""
    label_w = max(len("k"), max(len(label) for label, _ in rows))
    cells = []
    for _, vals in rows:
        cells.append(
            ["" if k >= len(vals) or vals[k] == 0 else str(vals[k]) for k in range(k_hi + 1)]
        )
    widths = [
        max(len(str(k)), max(row[k] and len(row[k]) or 1 for row in cells))
        for k in range(k_hi + 1)
    ]
    lines = [
        "k".ljust(label_w)
        + " |"
        + "".join(f" {str(k).rjust(widths[k])}" for k in range(k_hi + 1))
    ]
    for (label, _), row in zip(rows, cells):
        lines.append(
            (
                label.ljust(label_w)
                + " |"
                + "".join(f" {row[k].rjust(widths[k])}" for k in range(k_hi + 1))
            ).rstrip()
        )
    return "\n".join(lines)


def _table_rows(tab: InvariantTable) -> list[tuple[str, list[int]]]:
    return [
        ("gamma", tab.gamma),
        ("mu'", tab.mu_torsion),
        ("mu''", tab.mu_free),
        ("mu", tab.mu),
        ("nu", tab.nu),
    ]


def _spectrum_lines(sp: PoleSpectrum, d: int) -> list[str]:
    out = ["Sp_P:"]
    for x, m in sp.support:
        out.append(f"{int(x * d)} {x} {m:+d}")
    return out


def _print_spectrum_block(
    out: list[str],
    tab: InvariantTable,
    mu2: list[int],
    nu2: list[int],
    sp: PoleSpectrum,
    profile_entries: dict[tuple[int, int], int],
    degenerate: bool,
) -> None:
    k_hi = tab.k_max - tab.d
    rows = _table_rows(tab) + [("mu(2)", mu2[: k_hi + 1]), ("nu(2)", nu2[: k_hi + 1])]
    out.append(f"tau: {tab.tau}  type: {tab.type_flag}")
    out.append(render_rows(rows, k_hi))
    out.append(f"stabilization stage: {sp.stabilization_stage}")
    out.append(f"truncated: {'yes' if sp.truncated else 'no'}")
    out.append(f"E2: {'degenerate' if degenerate else 'non-degenerate'}")
    if profile_entries:
        out.append("torsion profile:")
        for (r, k), v in sorted(profile_entries.items()):
            out.append(f"stage {r} degree {k}: {v}")
    else:
        out.append("torsion profile: none")
    out.extend(_spectrum_lines(sp, tab.d))


# -- records and catalog -------------------------------------------------------


def _frac_str(x: Fraction) -> str:
    return str(x)


def run_record(
    command: str,
    input_text: str | None,
    variables: list[str] | None,
    binary_form: str | None,
    tab: InvariantTable,
    identities_ok: bool,
    defect_nonnegative: bool,
    sp: PoleSpectrum | None = None,
    profile=None,
    mu2: list[int] | None = None,
    nu2: list[int] | None = None,
) -> dict:
    return {
        "engine_version": __version__,
        "command": command,
        "input": input_text,
        "variables": variables,
        "binary_form": binary_form,
        "n": tab.n,
        "d": tab.d,
        "seed": tab.seed,
        "k_max": tab.k_max,
        "tau": tab.tau,
        "type": tab.type_flag,
        "gamma": tab.gamma,
        "mu": tab.mu,
        "mu_torsion": tab.mu_torsion,
        "mu_free": tab.mu_free,
        "nu": tab.nu,
        "mu_stage2": mu2,
        "nu_stage2": nu2,
        "pole_spectrum": None
        if sp is None
        else {
            "support": [[_frac_str(x), m] for x, m in sp.support],
            "truncated": sp.truncated,
            "stabilization_stage": sp.stabilization_stage,
        },
        "torsion_profile": None
        if profile is None
        else {
            "entries": [[r, k, v] for (r, k), v in sorted(profile.entries.items())],
            "degenerate": profile.degenerate,
            "truncated": profile.truncated,
        },
        "verdicts": {
            "assumptions": True,
            "identities": identities_ok,
            "type": tab.type_flag,
            "e2_degenerate": None if profile is None else profile.degenerate,
            "defect_sides_nonnegative": defect_nonnegative,
        },
    }


def catalog_append(record: dict, path: str) -> None:
    """Append one record as a single JSON line; keys sorted so identical
    runs produce identical bytes."""
    line = json.dumps(record, sort_keys=True, separators=(",", ":"))
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(line + "\n")


def catalog_read(path: str) -> list[dict]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


# -- commands ------------------------------------------------------------------


def _invariants_record(args) -> tuple[dict, InvariantTable]:
    variables = _parse_vars(args.vars)
    f = parse_poly(args.poly, variables)
    t0 = time.perf_counter()
    tab = build_invariant_table(f, k_max=args.kmax, seed=args.seed)
    _timed("table", t0)
    report = verify_corollaries(tab)
    record = run_record(
        "invariants",
        args.poly,
        variables,
        None,
        tab,
        report.ok,
        report.defect_sides_nonnegative,
    )
    return record, tab


def cmd_invariants(args) -> int:
    record, tab = _invariants_record(args)
    if args.json:
        print(json.dumps(record, sort_keys=True))
    else:
        out = [
            f"f: {args.poly}",
            f"n: {tab.n}  d: {tab.d}  k_max: {tab.k_max}",
            f"seed: {tab.seed}",
            f"tau: {tab.tau}  type: {tab.type_flag}",
            render_rows(_table_rows(tab), min(tab.k_max, tab.n * tab.d + 1)),
            f"defect sides nonnegative: {'yes' if record['verdicts']['defect_sides_nonnegative'] else 'no'}",
        ]
        print("\n".join(out))
    if args.catalog:
        catalog_append(record, args.catalog)
    return 0


def _spectrum_engine_record(args) -> tuple[dict, list[str]]:
    variables = _parse_vars(args.vars)
    f = parse_poly(args.poly, variables)
    t0 = time.perf_counter()
    tab = build_invariant_table(f, k_max=args.kmax, seed=args.seed)
    _timed("table", t0)
    t0 = time.perf_counter()
    win = KoszulWindow(f, tab.k_max)
    sp = pole_spectrum(win)
    profile = torsion_profile(win)
    mu2, nu2 = stage_snapshot(win, 2)
    _timed("tower", t0)
    report = verify_corollaries(tab)
    record = run_record(
        "spectrum",
        args.poly,
        variables,
        None,
        tab,
        report.ok,
        report.defect_sides_nonnegative,
        sp,
        profile,
        mu2[: tab.k_max - tab.d + 1],
        nu2[: tab.k_max - tab.d + 1],
    )
    out = [f"f: {args.poly}", f"n: {tab.n}  d: {tab.d}  k_max: {tab.k_max}", f"seed: {tab.seed}"]
    _print_spectrum_block(out, tab, mu2, nu2, sp, profile.entries, profile.degenerate)
    return record, out


def _spectrum_closed_record(args) -> tuple[dict, list[str]]:
    fac = parse_binary_form(args.binary_form)
    k_max = args.kmax if args.kmax is not None else 3 * fac.d
    tab = binary_invariant_table(fac, k_max)
    parts = binary_pole_spectrum(fac)
    mu2, nu2 = binary_stage2_rows(fac, k_max - fac.d)
    report = verify_corollaries(tab)
    record = run_record(
        "spectrum",
        None,
        None,
        args.binary_form,
        tab,
        report.ok,
        report.defect_sides_nonnegative,
        parts.spectrum,
        None,
        mu2,
        nu2,
    )
    # closed-form binary towers always settle at stage two with no torsion
    record["torsion_profile"] = {"entries": [], "degenerate": True, "truncated": False}
    record["verdicts"]["e2_degenerate"] = True
    out = [
        f"binary form: {args.binary_form}",
        f"n: {tab.n}  d: {tab.d}  k_max: {tab.k_max}",
        "seed: -",
    ]
    _print_spectrum_block(out, tab, mu2, nu2, parts.spectrum, {}, True)
    return record, out


def cmd_spectrum(args) -> int:
    if args.binary_form:
        record, out = _spectrum_closed_record(args)
    else:
        if not args.poly:
            raise ValueError("need a polynomial or --binary-form")
        record, out = _spectrum_engine_record(args)
    if args.json:
        print(json.dumps(record, sort_keys=True))
    else:
        print("\n".join(out))
    if args.catalog:
        catalog_append(record, args.catalog)
    return 0


def _check_one(
    poly_text: str,
    variables: list[str],
    kmax: int | None,
    seed: int,
    nodal: bool,
    alpha_min: str | None,
    exponents: list[str] | None,
    binary_form: str | None,
) -> list[str]:
    """Identity suite on one input; returns human-readable PASS lines.
    Violations raise."""
    f = parse_poly(poly_text, variables)
    tab = build_invariant_table(f, k_max=kmax, seed=seed)
    report = verify_corollaries(tab)
    lines = [f"identities: ok (defect sides {'nonnegative' if report.defect_sides_nonnegative else 'mixed sign'})"]
    if nodal:
        check_nodal_vanishing(tab)
        lines.append("nodal vanishing: ok")
    if binary_form is not None:
        fac = parse_binary_form(binary_form)
        oracle = binary_invariant_table(fac, tab.k_max)
        mism = [
            name
            for name, a, b in [
                ("gamma", oracle.gamma, tab.gamma),
                ("mu", oracle.mu, tab.mu),
                ("mu'", oracle.mu_torsion, tab.mu_torsion),
                ("mu''", oracle.mu_free, tab.mu_free),
                ("nu", oracle.nu, tab.nu),
            ]
            if a != b
        ]
        win = KoszulWindow(f, tab.k_max)
        sp = pole_spectrum(win)
        if binary_pole_spectrum(fac).spectrum != sp:
            mism.append("Sp_P")
        if mism:
            raise IdentityViolation([("closed-form-oracle", row, "engine", "closed") for row in mism])
        lines.append("closed-form oracle: ok")
    if alpha_min is not None:
        win = KoszulWindow(f, tab.k_max)
        sp = pole_spectrum(win)
        _, nu2 = stage_snapshot(win, 2)
        bounds = check_exponent_bounds(
            tab,
            Fraction(alpha_min),
            local_exponents=exponents,
            nu2=nu2[: tab.k_max - tab.d + 1],
            spectrum=sp,
        )
        lines.extend(f"bound: {c} ok" for c in bounds.checks)
    return lines


def _verify_catalog(path: str) -> int:
    records = catalog_read(path)
    mismatches = 0
    skipped = 0
    for i, rec in enumerate(records):
        if rec.get("engine_version") != __version__:
            skipped += 1
            continue
        ns = argparse.Namespace(
            poly=rec.get("input"),
            vars=",".join(rec["variables"]) if rec.get("variables") else None,
            kmax=rec.get("k_max"),
            seed=rec.get("seed"),
            json=True,
            catalog=None,
            binary_form=rec.get("binary_form"),
        )
        if rec.get("command") == "invariants":
            fresh, _ = _invariants_record(ns)
        elif rec.get("binary_form"):
            fresh, _ = _spectrum_closed_record(ns)
        else:
            fresh, _ = _spectrum_engine_record(ns)
        bad = [k for k in fresh if k in rec and rec[k] != fresh[k]]
        if bad:
            mismatches += 1
            print(f"record {i}: mismatch in {', '.join(sorted(bad))}")
    print(
        f"catalog: {len(records)} records, {len(records) - skipped - mismatches} verified, "
        f"{skipped} skipped (other version), {mismatches} mismatches"
    )
    return 4 if mismatches else 0


def cmd_check(args) -> int:
    if args.catalog and not (args.poly or args.corpus):
        return _verify_catalog(args.catalog)
    failures = 0
    if args.corpus:
        with open(args.corpus, "r", encoding="utf-8") as fh:
            entries = [json.loads(line) for line in fh if line.strip()]
        for entry in entries:
            label = entry.get("input", "?")
            raw_vars = entry.get("vars", args.vars)
            variables = _parse_vars(raw_vars) if isinstance(raw_vars, str) else list(raw_vars)
            try:
                lines = _check_one(
                    entry["input"],
                    variables,
                    entry.get("k_max"),
                    entry.get("seed", args.seed),
                    entry.get("nodal", False),
                    entry.get("alpha_min"),
                    entry.get("exponents"),
                    entry.get("binary_form"),
                )
                print(f"PASS {label}: " + "; ".join(lines))
            except (IdentityViolation, BoundViolation) as exc:
                failures += 1
                print(f"FAIL {label}: {exc}")
        return 4 if failures else 0
    if not args.poly:
        raise ValueError("need a polynomial, --corpus, or --catalog")
    exponents = None
    alpha_min = args.alpha_min
    if args.exponents:
        with open(args.exponents, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        exponents = data.get("local_exponents")
        if alpha_min is None:
            alpha_min = data.get("alpha_min")
    lines = _check_one(
        args.poly,
        _parse_vars(args.vars),
        args.kmax,
        args.seed,
        args.nodal,
        alpha_min,
        exponents,
        args.binary_form,
    )
    print("\n".join(lines))
    return 0


# -- entry point ---------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="koszulspec",
        description="Graded invariants and pole spectra of homogeneous hypersurfaces",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, poly_required=True):
        p.add_argument("poly", nargs=None if poly_required else "?", help="homogeneous polynomial")
        p.add_argument("-v", "--vars", default="x,y,z", help="ordered comma-separated variables")
        p.add_argument("--kmax", type=int, default=None, help="degree window top")
        p.add_argument("--seed", type=int, default=0, help="seed for the generic splitting form")
        p.add_argument("--json", action="store_true", help="emit a JSON run record")
        p.add_argument("--catalog", default=None, help="append (or verify) a JSON-lines catalog")

    p_inv = sub.add_parser("invariants", help="graded dimension table")
    common(p_inv)
    p_inv.set_defaults(func=cmd_invariants)

    p_sp = sub.add_parser("spectrum", help="pole spectrum with stage diagnostics")
    common(p_sp, poly_required=False)
    p_sp.add_argument("--binary-form", default=None, help="closed-form path, e.g. 'x:2,y:2'")
    p_sp.set_defaults(func=cmd_spectrum)

    p_chk = sub.add_parser("check", help="identity suite / oracle comparison / catalog verify")
    common(p_chk, poly_required=False)
    p_chk.add_argument("--binary-form", default=None, help="closed-form oracle to compare against")
    p_chk.add_argument("--nodal", action="store_true", help="assert the nodal vanishing range")
    p_chk.add_argument("--alpha-min", default=None, help="smallest local spectral exponent, e.g. 3/4")
    p_chk.add_argument("--exponents", default=None, help="JSON file with local exponent data")
    p_chk.add_argument("--corpus", default=None, help="JSON-lines corpus to check")
    p_chk.set_defaults(func=cmd_check)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NotStabilizedError, AssumptionFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (IdentityViolation, BoundViolation, WellDefinednessViolation, LiftFailure) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 5


if __name__ == "__main__":
    sys.exit(main())
