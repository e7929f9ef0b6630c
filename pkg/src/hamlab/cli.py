"""``hamlab`` command line: figure data, tables and the verification suite."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Sequence

from . import ham, problems, taylor, verification

CLAMP = 10.0
COMMANDS = ("reproduce-fig1", "reproduce-fig2", "nu-table", "radius-table", "oham-sweep", "verify")
DEFAULT_OUT = {
    "reproduce-fig1": "fig1.csv",
    "reproduce-fig2": "fig2.csv",
    "nu-table": "nu_table.json",
    "radius-table": "radius_table.csv",
    "oham-sweep": "oham_sweep.csv",
    "verify": "verify.json",
}


def fmt(x: float) -> str:
    return f"{x:.12g}"


def write_atomic(path: str | Path, text: str) -> Path:
    """Write ``text`` to a temp file next to ``path`` and rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise
    return path


def _csv(header: Sequence[str], rows: Sequence[Sequence[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _clamp(x: float) -> float:
    return max(-CLAMP, min(CLAMP, x))


def fig1_csv(order: int = 30, taylor_order: int = 100) -> str:
    """Exact sech, the exp-basis HAM sum (h=-1) and two Taylor sums on [-1, 8]."""
    sol = ham.solve_problem_a(-1, order, exact=False).solution
    t0_0 = taylor.sech_expansion(0.0, taylor_order).to_float()
    t0_2 = taylor.sech_expansion(2.0, taylor_order)
    ham_col = f"ham_expbasis_M{order}"
    c0 = f"taylor_t0_0_N{taylor_order}"
    c2 = f"taylor_t0_2_N{taylor_order}"
    header = ["t", "exact_sech", ham_col, c0, c2, c0 + "_raw", c2 + "_raw"]
    rows = []
    for t in problems.grid(-1.0, 8.0, 0.02):
        # t < 0 uses the mirrored exp(+n t) branch of the same coefficients
        h_val = sol.evaluate(abs(t))
        a, b = t0_0(t), t0_2(t)
        rows.append([fmt(v) for v in (t, problems.sech_exact(t), h_val, _clamp(a), _clamp(b), a, b)])
    return _csv(header, rows)


def fig2_csv() -> str:
    rows = []
    for t in problems.grid(-2.0, 6.0, 0.02):
        res = fmt(problems.l2_operator_on_kernel(t)) if t > 0 else ""
        rows.append([fmt(t), fmt(problems.problem_b_exact(t)), res])
    return _csv(["t", "exact_piecewise", "l2_kernel_residual"], rows)


def _frac(c) -> str:
    c = Fraction(c)
    return f"{c.numerator}/{c.denominator}"


def nu_table(order: int = 12) -> dict:
    if order > 16:
        raise ValueError("nu-table runs in exact mode and supports M <= 16")
    sol = ham.solve_problem_a(-1, order, exact=True)
    nu = sol.nu()
    rows = []
    for n in range(1, 2 * order + 2):
        target = verification.nu_target(n)
        rows.append(
            {
                "n": n,
                "nu": _frac(nu[n]),
                "nu_float": float(nu[n]),
                "target": target,
                "gap": float(abs(nu[n] - target)),
            }
        )
    return {"h": -1, "M": order, "rows": rows}


def _print_nu_table(table: dict, out=None):
    out = out or sys.stdout
    print(f"nu_n(h=-1), M={table['M']}", file=out)
    print(f"{'n':>4} {'nu_n':>16} {'target':>7} {'gap':>12}", file=out)
    for r in table["rows"]:
        print(f"{r['n']:>4} {r['nu_float']:>16.10f} {r['target']:>7} {r['gap']:>12.4e}", file=out)


def oham_outputs(order: int, h_grid: Sequence[float]) -> tuple[str, dict]:
    res = problems.optimal_h(problems.PROBLEM_A, order, h_grid)
    rows = [[fmt(h), str(order), fmt(v)] for h, v in sorted(res.sweep.items())]
    sweep_csv = _csv(["h", "M", "l2_norm"], rows)
    payload = {
        "h_star": res.h_star,
        "report": res.report.to_json(),
        "sweep": [{"h": h, "l2_norm": v} for h, v in sorted(res.sweep.items())],
        "failed": [{"h": h, "error": e} for h, e in sorted(res.failed.items())],
    }
    return sweep_csv + "\n" + res.report.to_csv(), payload


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hamlab", description=__doc__)
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--out", help="output path (default depends on the command)")
    p.add_argument("--order", type=int, help="HAM order M")
    p.add_argument("--taylor-order", type=int, help="Taylor order N")
    p.add_argument("--h-min", type=float, default=-2.0)
    p.add_argument("--h-max", type=float, default=-0.1)
    p.add_argument("--h-step", type=float, default=0.05)
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING)
    out = Path(args.out or DEFAULT_OUT[args.command])
    if args.order is not None and not 0 <= args.order <= 200:
        raise SystemExit("--order must lie in [0, 200]")
    if args.taylor_order is not None and not 2 <= args.taylor_order <= 400:
        raise SystemExit("--taylor-order must lie in [2, 400]")

    cmd = args.command
    if cmd == "reproduce-fig1":
        write_atomic(out, fig1_csv(args.order if args.order is not None else 30, args.taylor_order or 100))
    elif cmd == "reproduce-fig2":
        write_atomic(out, fig2_csv())
    elif cmd == "nu-table":
        table = nu_table(args.order if args.order is not None else 12)
        _print_nu_table(table)
        write_atomic(out, json.dumps(table, indent=2) + "\n")
    elif cmd == "radius-table":
        rows = taylor.radius_table(n=args.taylor_order or 120)
        text = taylor.radius_rows_to_csv(rows)
        sys.stdout.write(text)
        write_atomic(out, text)
    elif cmd == "oham-sweep":
        if args.h_step <= 0 or args.h_min > args.h_max:
            raise SystemExit("need --h-step > 0 and --h-min <= --h-max")
        h_grid = [h for h in problems.grid(args.h_min, args.h_max, args.h_step) if h != 0]
        text, payload = oham_outputs(args.order if args.order is not None else 5, h_grid)
        write_atomic(out, text)
        write_atomic(out.with_suffix(".json"), json.dumps(payload, indent=2) + "\n")
        print(f"h* = {payload['h_star']:g}  L2 = {payload['report']['l2_norm']:.6e}")
    elif cmd == "verify":
        results = verification.run_all()
        report = {name: [c.to_json() for c in checks] for name, checks in results.items()}
        ok = all(c.passed for checks in results.values() for c in checks)
        report_doc = {"passed": ok, "suites": report}
        write_atomic(out, json.dumps(report_doc, indent=2) + "\n")
        for name, checks in results.items():
            for c in checks:
                flag = "PASS" if c.passed else "FAIL"
                print(f"[{flag}] {name}: {c.name} = {c.measured:.6g} ({c.relation} {c.bound:g})")
        return 0 if ok else 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
