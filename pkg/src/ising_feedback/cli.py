"""Command line entry point: ``ising-feedback <command> [flags]``."""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from . import analytic, coding, value_iteration
from .channel import ForcedNoise, NoiseSource

RESIDUAL_TOL = 1e-6
ARGMAX_TOL = 1e-4
KKT_TOL = 1e-5


def _write(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", newline="\n") as fh:
            fh.write(text)


def _table(header: list[str], rows, fmt: str) -> str:
    if fmt == "json":
        return json.dumps([dict(zip(header, r)) for r in rows], indent=1) + "\n"
    lines = [",".join(header)]
    for r in rows:
        lines.append(",".join(v if isinstance(v, str) else f"{v:.17g}" for v in r))
    return "\n".join(lines) + "\n"


def _bits(text: str) -> list[int]:
    if not text or any(c not in "01" for c in text):
        raise argparse.ArgumentTypeError(f"expected a bit string, got {text!r}")
    return [int(c) for c in text]


def cmd_capacity(args) -> int:
    p = analytic.solve_root()
    print(json.dumps({"a": p.a, "rho_star": p.rho_star}))
    return 0


def cmd_value_iterate(args) -> int:
    rep = value_iteration.run(args.iters, args.grid_size, args.action_grid)
    if args.format == "json":
        rows = zip(rep.J.grid, rep.J.values, rep.h.values,
                   rep.policy_delta.values, rep.policy_gamma.values)
        _write(_table(["z", "J", "h", "delta_star", "gamma_star"], rows, "json"), args.output)
    else:
        _write(rep.to_csv(), args.output)
    print(f"k={rep.k} rho in [{rep.rho_lo:.9f}, {rep.rho_hi:.9f}]", file=sys.stderr)
    return 0


def verification_report(grid_size: int, action_grid: int, kkt_samples: int = 100) -> dict:
    p = analytic.solve_root()
    check = analytic.bellman_residual(p, grid_size, action_grid)
    outer = [analytic.kkt_check(z, p) for z in np.linspace(p.p2, 1.0, kkt_samples)]
    inner = [
        analytic.kkt_check(z, p)
        for z in np.linspace(p.p1, p.p2, kkt_samples + 2)[1:-1]
    ]
    report = {
        "a": p.a,
        "rho_star": p.rho_star,
        "p1": p.p1,
        "p2": p.p2,
        "sup_residual": check.sup_residual,
        "kkt_max_abs_ddelta_outer": max(abs(d) for d, _, _ in outer),
        "min_dgamma": min(g for _, g, _ in outer + inner),
        "min_ddelta_inner": min(d for d, _, _ in inner),
        "argmax_mismatch_max": check.argmax_mismatch,
    }
    report["passed"] = bool(
        report["sup_residual"] <= RESIDUAL_TOL
        and report["argmax_mismatch_max"] <= ARGMAX_TOL
        and report["kkt_max_abs_ddelta_outer"] <= KKT_TOL
        and report["min_dgamma"] > 0
        and report["min_ddelta_inner"] > 0
    )
    return report


def cmd_verify_bellman(args) -> int:
    report = verification_report(args.grid_size, args.action_grid)
    _write(json.dumps(report, indent=1) + "\n", args.output)
    return 0 if report["passed"] else 1


def cmd_policy(args) -> int:
    p = analytic.solve_root()
    zs = np.linspace(0.0, 1.0, args.grid_size)
    d, g = analytic.policy_star_arrays(zs, p)
    rows = zip(zs, d, g, analytic.h_star(zs, p))
    _write(_table(["z", "delta_star", "gamma_star", "h_star"], rows, args.format), args.output)
    return 0


def cmd_histogram(args) -> int:
    if args.policy == "star":
        p = analytic.solve_root()
        policy = lambda z: analytic.policy_star(z, p)  # noqa: E731
    else:
        rep = value_iteration.run(args.iters, args.grid_size, args.action_grid)
        policy = value_iteration.grid_policy(rep.policy_delta, rep.policy_gamma)
    hist = value_iteration.simulate_states(policy, args.steps, args.seed, args.z0)
    rows = zip(hist.points, hist.frequencies)
    _write(_table(["z", "frequency"], rows, args.format), args.output)
    return 0


def cmd_simulate_coding(args) -> int:
    noise = ForcedNoise(args.forced_noise) if args.forced_noise else NoiseSource(args.seed)
    q = args.q if args.q is not None else 1.0 - analytic.solve_root().a
    message = None
    if args.data is not None:
        data = args.data
    elif args.message is not None:
        message = args.message
        data = coding.data_encode(message, q).bits
    else:
        rng = np.random.default_rng(np.random.SeedSequence(args.seed).spawn(1)[0])
        data = coding.markov_stream(args.n, q, rng)
    tr = coding.channel_encode(data, args.s0, noise)
    decoded = coding.decode_stream(tr.y, args.s0)
    summary = {
        "data_bits": len(data),
        "channel_uses": len(tr),
        "once_sent": tr.once_sent,
        "twice_sent": tr.twice_sent,
        "bits_per_use": len(data) / len(tr),
        "decoded_ok": decoded == list(data),
    }
    if message is not None:
        summary["message_bits"] = len(message)
        summary["rate"] = len(message) / len(tr)
        summary["message_ok"] = (
            coding.data_decode(coding.DataStream(decoded, 0), len(message), q) == message
        )
    elif args.data is None:
        summary["q"] = q
        summary["empirical_rate"] = float(coding._hb(np.float64(q))) * len(data) / len(tr)
        summary["predicted_rate"] = coding.predicted_rate(q)
    _write(tr.to_csv(), args.output)
    if args.decode_trace:
        _write(coding.decode_trace_csv(coding.decode_trace(tr.y, args.s0)), args.decode_trace)
    out = sys.stderr if args.output in (None, "-") else sys.stdout
    print(json.dumps(summary), file=out)
    return 0 if summary["decoded_ok"] else 1


def cmd_rate_curve(args) -> int:
    qs = np.linspace(0.0, 1.0, args.points)
    rows = zip(qs, coding.predicted_rate(qs))
    _write(_table(["q", "rate"], rows, args.format), args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="ising-feedback",
        description="Feedback capacity and zero-error coding for the Ising channel.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, grid=1000, fmt=True):
        p.add_argument("--grid-size", type=int, default=grid)
        p.add_argument("--action-grid", type=int, default=64,
                       help="mesh points per action coordinate before refinement")
        p.add_argument("--output", "-o", default=None)
        if fmt:
            p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = sub.add_parser("capacity", help="print a and the capacity as JSON")
    p.set_defaults(func=cmd_capacity)

    p = sub.add_parser("value-iterate", help="run value iteration from J_0 = 0")
    common(p)
    p.add_argument("--iters", type=int, default=20)
    p.set_defaults(func=cmd_value_iterate)

    p = sub.add_parser("verify-bellman", help="check the Bellman equation and KKT conditions")
    common(p, grid=1001, fmt=False)
    p.set_defaults(func=cmd_verify_bellman)

    p = sub.add_parser("policy", help="tabulate the optimal policy and h*")
    common(p, grid=1001)
    p.set_defaults(func=cmd_policy)

    p = sub.add_parser("histogram", help="belief-state visit frequencies")
    common(p)
    p.add_argument("--iters", type=int, default=20)
    p.add_argument("--steps", type=int, default=250_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--z0", type=float, default=0.0)
    p.add_argument("--policy", choices=["star", "iterated"], default="star")
    p.set_defaults(func=cmd_histogram)

    p = sub.add_parser("simulate-coding", help="run the feedback encoder and decoder")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--data", type=_bits, help="data stream sent as is")
    src.add_argument("--message", type=_bits, help="message passed through the data encoder")
    p.add_argument("--n", type=int, default=1000, help="length of a random Markov data stream")
    p.add_argument("--q", type=float, default=None, help="alternation probability (default 1 - a)")
    p.add_argument("--s0", type=int, choices=[0, 1], default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--forced-noise", type=str, default=None,
                   help="coin flips to replay, used as the outputs of alternating sends")
    p.add_argument("--decode-trace", default=None, help="write the decoder trace CSV here")
    p.add_argument("--output", "-o", default=None)
    p.set_defaults(func=cmd_simulate_coding)

    p = sub.add_parser("rate-curve", help="tabulate 2 H(q) / (4 - q)")
    p.add_argument("--points", type=int, default=101)
    p.add_argument("--output", "-o", default=None)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_rate_curve)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
