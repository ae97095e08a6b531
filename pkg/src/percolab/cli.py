"""Command-line front door: reproducible experiments with manifests.

Exit codes: 0 when every check passes, 1 on a scientific failure (a failed
certificate or verdict), 2 on usage or resource-cap problems.  Every command
writes its outputs plus a ``manifest.json`` recording the command, resolved
parameters, master seed, code version, timestamps, and SHA-256 digests of
the outputs.  Output files themselves contain no timestamps, so rerunning
with the same parameters reproduces them byte for byte.
"""

import argparse
import csv
import hashlib
import json
import math
import os
import sys
from datetime import datetime, timezone

from . import __version__
from .coupling import couple_sequential, domination_margin, pair_to_json
from .errors import CapExceeded
from .estimators import (
    decay_fit,
    meanfield_verdict,
    psi_curve,
    tail_bound_verdict,
)
from .exact import (
    certificate_to_json,
    conditional_measure,
    exact_magnetization,
    exact_psi,
    fkg_sweep,
    magnetization_bound,
    magnetization_table,
    make_conditional_oracle,
    max_conditional_pivotal,
    product_measure,
    psi_table,
    strassen_dominates,
    verify_certificate,
)
from .exploration import CLUSTER_FIRST
from .lattices import LatticeSpec, build_ball

LATTICES = {
    "z1": LatticeSpec.hypercubic(1),
    "z2": LatticeSpec.hypercubic(2),
    "z3": LatticeSpec.hypercubic(3),
    "tri": LatticeSpec.triangular(),
    "tree3": LatticeSpec.regular_tree(3),
}

DEFAULT_P_GRID = "0.2,0.5,0.8"
DEFAULT_H_GRID = "0.1,0.5,1.0"


def _float_list(text):
    text = text.strip()
    if not text:
        return []
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _write_json(path, payload):
    with open(path, "w", newline="") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _fmt(v):
    if isinstance(v, float):
        return format(v, ".12g")
    return v


def _digest(path):
    sha = hashlib.sha256()
    with open(path, "rb") as fh:
        sha.update(fh.read())
    return sha.hexdigest()


class _Manifest:
    def __init__(self, command, args):
        self.command = command
        self.args = args
        self.started = datetime.now(timezone.utc).isoformat()
        self.outputs = {}

    def record(self, path):
        self.outputs[os.path.basename(path)] = _digest(path)

    def write(self, out_dir):
        payload = {
            "command": self.command,
            "args": self.args,
            "seed": self.args.get("seed"),
            "version": __version__,
            "started": self.started,
            "finished": datetime.now(timezone.utc).isoformat(),
            "outputs": self.outputs,
        }
        _write_json(os.path.join(out_dir, "manifest.json"), payload)


def _resolved_args(ns, keys):
    return {k: getattr(ns, k) for k in keys}


def _prepare(ns, keys):
    os.makedirs(ns.out, exist_ok=True)
    return _Manifest(ns.command, _resolved_args(ns, keys))


def cmd_verify_domination(ns):
    """Exact certification suite on one small ball over a (p, h) grid."""
    spec = LATTICES[ns.lattice]
    ball = build_ball(spec, ns.radius)
    manifest = _prepare(ns, ["lattice", "radius", "p", "h", "seed", "q_override"])
    points = []
    failures = []
    for p in _float_list(ns.p):
        for h in _float_list(ns.h):
            eps = max_conditional_pivotal(ball, CLUSTER_FIRST, p, h)
            m_hat = magnetization_bound(ball, p, h)
            cond = conditional_measure(ball, p, h)
            oracle = make_conditional_oracle(ball, CLUSTER_FIRST, p, h)
            margin = domination_margin(ball, CLUSTER_FIRST, oracle, cond)
            q = ns.q_override if ns.q_override is not None else p * (1.0 - eps)
            cert = strassen_dominates(product_measure(ball, q), cond)
            cert_ok = cert.dominates and verify_certificate(cert, product_measure(ball, q), cond)
            fkg_rows = fkg_sweep(ball, CLUSTER_FIRST, p, h)
            fkg_ok = all(r["lhs"] <= r["rhs"] + 1e-12 for r in fkg_rows)
            margin_ok = margin >= p * (1.0 - eps) - 1e-12
            eps_ok = eps <= m_hat + 1e-12
            point = {
                "p": p, "h": h, "q": q,
                "max_conditional_pivotal": eps,
                "magnetization_bound": m_hat,
                "conditional_open_min": margin,
                "dominates": bool(cert.dominates),
                "certificate": certificate_to_json(cert),
                "fkg_steps": len(fkg_rows),
                "checks": {"certificate": cert_ok, "fkg": fkg_ok,
                           "margin": margin_ok, "pivotal_vs_bound": eps_ok},
            }
            points.append(point)
            if not (cert_ok and fkg_ok and margin_ok and eps_ok):
                failures.append({"p": p, "h": h, "point": point})
    report = {
        "ball": {"lattice": ns.lattice, "radius": ns.radius,
                 "n_vertices": ball.n_vertices, "n_edges": ball.n_edges},
        "q_override": ns.q_override,
        "points": points,
        "failures": failures,
        "ok": not failures,
    }
    path = os.path.join(ns.out, "domination_report.json")
    _write_json(path, report)
    manifest.record(path)
    manifest.write(ns.out)
    return 0 if not failures else 1


def cmd_verify_tail_bound(ns):
    """Tail inequality check: exact on a small ball, or Monte Carlo."""
    spec = LATTICES[ns.lattice]
    manifest = _prepare(ns, ["lattice", "radius", "mode", "p", "h", "n_max",
                             "samples", "cap", "seed", "threads"])
    rows = []
    failed = False
    if ns.mode == "exact":
        ball = build_ball(spec, ns.radius)
        p_grid = _float_list(ns.p)
        h_grid = _float_list(ns.h)
        for p in p_grid:
            for h in h_grid:
                m = exact_magnetization(ball, p, h)
                q = p * (1.0 - m)
                for n in range(ball.n_vertices + 1):
                    lhs = exact_psi(ball, q, n)
                    rhs = exact_psi(ball, p, n) * math.exp(-h * n) / (1.0 - m)
                    slack = rhs - lhs
                    ok = lhs <= rhs + 1e-12
                    failed = failed or not ok
                    rows.append([p, h, n, lhs, rhs, slack, "PASS" if ok else "FAIL"])
        header = ["p", "h", "n", "lhs", "rhs", "slack", "verdict"]
        psi_path = os.path.join(ns.out, "psi_exact.csv")
        _write_csv(psi_path, ["p", "n", "psi"],
                   [[p, n, value] for p in p_grid
                    for n, value in psi_table(ball, p)])
        mag_path = os.path.join(ns.out, "magnetization_exact.csv")
        _write_csv(mag_path, ["p", "h", "m"],
                   magnetization_table(ball, p_grid, h_grid))
        manifest.record(psi_path)
        manifest.record(mag_path)
    else:
        p = _float_list(ns.p)[0]
        h = _float_list(ns.h)[0]
        n_list = list(range(10, ns.n_max + 1, 10))
        report = tail_bound_verdict(spec, p, h, n_list, ns.samples, ns.seed,
                                    cap=ns.cap, threads=ns.threads)
        for r in report.rows:
            rows.append([p, h, r["n"], r["lhs"], r["lhs_hi"], r["psi_p"],
                         r["rhs"], r["verdict"]])
        failed = report.failed
        header = ["p", "h", "n", "lhs", "lhs_hi", "psi_p", "rhs", "verdict"]
    path = os.path.join(ns.out, "tail_bound.csv")
    _write_csv(path, header, rows)
    manifest.record(path)
    manifest.write(ns.out)
    return 1 if failed else 0


def cmd_decay(ns):
    """Tail curve plus exponential-decay fit."""
    spec = LATTICES[ns.lattice]
    manifest = _prepare(ns, ["lattice", "p", "n_max", "samples", "seed",
                             "threads"])
    p = _float_list(ns.p)[0]
    n_list = list(range(20, ns.n_max + 1, 10))
    curve = psi_curve(spec, p, n_list, ns.samples, ns.seed, threads=ns.threads)
    rows = [[n, curve[n].point, curve[n].lo, curve[n].hi, curve[n].samples]
            for n in n_list]
    csv_path = os.path.join(ns.out, "decay_curve.csv")
    _write_csv(csv_path, ["n", "psi", "lo", "hi", "samples"], rows)
    fit = decay_fit([(n, curve[n]) for n in n_list])
    fit_path = os.path.join(ns.out, "decay_fit.json")
    _write_json(fit_path, {
        "p": p, "rate": fit.rate, "prefactor": fit.prefactor,
        "r_squared": fit.r_squared, "rate_se": fit.rate_se,
        "rate_lo": fit.rate_lo, "rate_hi": fit.rate_hi,
        "points_used": fit.points_used,
    })
    manifest.record(csv_path)
    manifest.record(fit_path)
    manifest.write(ns.out)
    return 0


def cmd_meanfield(ns):
    """Reduced-parameter check against the square lattice threshold."""
    spec = LATTICES[ns.lattice]
    manifest = _prepare(ns, ["lattice", "p", "h", "cap", "samples", "seed",
                             "threads"])
    h = _float_list(ns.h)[0]
    rows = meanfield_verdict(spec, _float_list(ns.p), h, ns.cap, ns.samples,
                             ns.seed, threads=ns.threads)
    table = [[r["p"], r["m_lo"], r["m_hi"], r["q_upper"], r["q_lower"],
              r["truncated_fraction"], r["verdict"]] for r in rows]
    path = os.path.join(ns.out, "meanfield.csv")
    _write_csv(path, ["p", "m_lo", "m_hi", "q_upper", "q_lower",
                      "truncated_fraction", "verdict"], table)
    manifest.record(path)
    manifest.write(ns.out)
    return 1 if any(r["verdict"] == "FAIL" for r in rows) else 0


def cmd_couple_demo(ns):
    """One audited coupled run with the exact conditional oracle."""
    spec = LATTICES[ns.lattice]
    ball = build_ball(spec, ns.radius)
    manifest = _prepare(ns, ["lattice", "radius", "p", "h", "seed",
                             "q_override"])
    p = _float_list(ns.p)[0]
    h = _float_list(ns.h)[0]
    m = exact_magnetization(ball, p, h)
    q = ns.q_override if ns.q_override is not None else p * (1.0 - m)
    oracle = make_conditional_oracle(ball, CLUSTER_FIRST, p, h)
    pair = couple_sequential(ball, CLUSTER_FIRST, q, oracle, ns.seed)
    payload = pair_to_json(pair)
    payload.update({"p": p, "h": h, "q": q, "magnetization": m})
    path = os.path.join(ns.out, "couple_demo.json")
    _write_json(path, payload)
    manifest.record(path)
    manifest.write(ns.out)
    return 0


def _add_common(sub):
    sub.add_argument("--lattice", choices=sorted(LATTICES), default="z1")
    sub.add_argument("--seed", type=int, default=0,
                     help="64-bit master seed for all randomness")
    sub.add_argument("--out", default="percolab-out",
                     help="output directory for CSV/JSON artifacts")
    sub.add_argument("--threads", type=int, default=1,
                     help="worker pool size; results do not depend on it")
    sub.add_argument("--config", default=None,
                     help="JSON file of flag values (a manifest works too)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="percolab",
        description="Percolation laboratory: exact certificates and Monte Carlo checks")
    subs = parser.add_subparsers(dest="command", required=True)

    s = subs.add_parser("verify-domination",
                        help="exact domination certificates on a small ball")
    _add_common(s)
    s.add_argument("--radius", type=int, default=2)
    s.add_argument("--p", default=DEFAULT_P_GRID)
    s.add_argument("--h", default=DEFAULT_H_GRID)
    s.add_argument("--q-override", dest="q_override", type=float, default=None,
                   help="test hook: replace q = p(1-eps*) in the certificate")
    s.set_defaults(func=cmd_verify_domination)

    s = subs.add_parser("verify-tail-bound",
                        help="tail inequality, exact or Monte Carlo")
    _add_common(s)
    s.add_argument("--mode", choices=["exact", "mc"], default="exact")
    s.add_argument("--radius", type=int, default=2)
    s.add_argument("--p", default=DEFAULT_P_GRID)
    s.add_argument("--h", default=DEFAULT_H_GRID)
    s.add_argument("--n-max", dest="n_max", type=int, default=100)
    s.add_argument("--samples", type=int, default=10_000)
    s.add_argument("--cap", type=int, default=100_000)
    s.set_defaults(func=cmd_verify_tail_bound)

    s = subs.add_parser("decay", help="tail curve and exponential fit")
    _add_common(s)
    s.add_argument("--p", default="0.4")
    s.add_argument("--n-max", dest="n_max", type=int, default=120)
    s.add_argument("--samples", type=int, default=100_000)
    s.set_defaults(func=cmd_decay)

    s = subs.add_parser("meanfield",
                        help="reduced parameter vs the square-lattice threshold")
    _add_common(s)
    s.add_argument("--p", default="0.55,0.6,0.7,0.8,0.9,1.0")
    s.add_argument("--h", default="0.05")
    s.add_argument("--cap", type=int, default=100_000)
    s.add_argument("--samples", type=int, default=2_000)
    s.set_defaults(func=cmd_meanfield)

    s = subs.add_parser("couple-demo", help="audit one coupled run")
    _add_common(s)
    s.add_argument("--radius", type=int, default=1)
    s.add_argument("--p", default="0.5")
    s.add_argument("--h", default="0.5")
    s.add_argument("--q-override", dest="q_override", type=float, default=None)
    s.set_defaults(func=cmd_couple_demo)

    return parser


def _apply_config(parser, ns, argv):
    """Fill unset flags from a JSON config (manifests carry one under 'args')."""
    if not ns.config:
        return ns
    with open(ns.config) as fh:
        data = json.load(fh)
    if "args" in data and isinstance(data["args"], dict):
        data = data["args"]
    explicit = {tok.split("=")[0].lstrip("-").replace("-", "_")
                for tok in argv if tok.startswith("--")}
    for key, value in data.items():
        attr = key.replace("-", "_")
        if hasattr(ns, attr) and attr not in explicit and attr != "config":
            setattr(ns, attr, value)
    return ns


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    ns = parser.parse_args(argv)
    ns = _apply_config(parser, ns, argv)
    try:
        return ns.func(ns)
    except CapExceeded as exc:
        print(f"resource cap exceeded: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
