"""Command-line entry point: ``quagent {report,sweep,wigner,verify,info}``.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

from . import gadgets, scenarios, verification

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

TABLE_GADGETS = ("von_neumann", "swap", "dephased_swap")


class UsageError(Exception):
    pass


@dataclass
class CliConfig:
    command: str
    dim: int = 2
    t_min: float = 0.0
    t_max: float = scenarios.PERIOD
    steps: int = 600
    variant: str = scenarios.WignerVariant.FRIEND_SWAPS.value
    gadget: str = "swap"
    out_path: str | None = None
    format: str | None = None
    seed: int = 42

    def check(self) -> None:
        if self.dim < 2:
            raise UsageError(f"--dim must be at least 2, got {self.dim}")
        if self.steps < 2:
            raise UsageError(f"--steps must be at least 2, got {self.steps}")
        if not self.t_min < self.t_max:
            raise UsageError(f"--t-min ({self.t_min}) must be below --t-max ({self.t_max})")


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _report_table(reports) -> str:
    head = f"{'gadget':<16}{'measurement':>12}{'uncertainty':>14}{'back_action':>14}{'repeatable':>12}"
    rows = [head]
    for r in reports:
        rep = "-" if r.repeatable is None else ("yes" if r.repeatable else "no")
        rows.append(
            f"{r.name:<16}{('yes' if r.is_measurement else 'no'):>12}"
            f"{r.uncertainty_bits:>14.9f}{r.back_action_bits:>14.9f}{rep:>12}"
        )
    return "\n".join(rows) + "\n"


def _reports_json(reports, dim: int) -> str:
    payload = {"dim": dim, "reports": {r.name: r.to_dict() for r in reports}}
    return json.dumps(payload, indent=2) + "\n"


def cmd_report(cfg: CliConfig) -> int:
    reports = [gadgets.report(gadgets.build(name, cfg.dim)) for name in TABLE_GADGETS]
    text = _reports_json(reports, cfg.dim) if cfg.format == "json" else _report_table(reports)
    _emit(text, cfg.out_path)
    return EXIT_OK


def cmd_info(cfg: CliConfig) -> int:
    try:
        g = gadgets.build(cfg.gadget, cfg.dim)
    except KeyError as exc:
        raise UsageError(str(exc.args[0])) from None
    r = gadgets.report(g)
    text = _reports_json([r], cfg.dim) if cfg.format == "json" else _report_table([r])
    _emit(text, cfg.out_path)
    return EXIT_OK


def cmd_sweep(cfg: CliConfig) -> int:
    if cfg.dim != 2:
        raise UsageError("sweep supports --dim 2 only")
    records = scenarios.simul_sweep(cfg.t_min, cfg.t_max, cfg.steps, cfg.dim)
    if cfg.format == "json":
        text = json.dumps([r.__dict__ for r in records], indent=1) + "\n"
    else:
        text = scenarios.sweep_to_csv(records)
    _emit(text, cfg.out_path)
    best = min(records, key=lambda r: r.uncertainty_bits)
    msg = f"minimum uncertainty {best.uncertainty_bits:.12g} bits at t={best.t:.12g}\n"
    # keep stdout clean when it carries the data
    (sys.stderr if cfg.out_path is None else sys.stdout).write(msg)
    return EXIT_OK


def cmd_wigner(cfg: CliConfig) -> int:
    try:
        variant = scenarios.WignerVariant(cfg.variant)
    except ValueError:
        names = ", ".join(v.value for v in scenarios.WignerVariant)
        raise UsageError(f"unknown variant {cfg.variant!r}; choose from {names}") from None
    state = scenarios.wigner_run(variant)
    if cfg.format == "json":
        text = state.to_json() + "\n"
    else:
        lines = [f"# {variant.value}: amplitudes over |S O_f O_W>"]
        for idx, amp in enumerate(state.vec):
            if abs(amp) > 1e-15:
                lines.append(f"|{idx:03b}>  {amp.real:+.12f}{amp.imag:+.12f}j")
        text = "\n".join(lines) + "\n"
    _emit(text, cfg.out_path)
    return EXIT_OK


def cmd_verify(cfg: CliConfig) -> int:
    results = verification.run_all(cfg.seed)
    lines = [r.line() for r in results]
    ok = all(r.passed for r in results)
    lines.append("verify: " + ("all suites passed" if ok else "FAILURES"))
    _emit("\n".join(lines) + "\n", cfg.out_path)
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {
    "report": cmd_report,
    "sweep": cmd_sweep,
    "wigner": cmd_wigner,
    "verify": cmd_verify,
    "info": cmd_info,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--dim", type=int, default=2, help="system dimension")
    common.add_argument("--out", dest="out_path", default=None, help="output file")
    common.add_argument("--format", choices=("text", "csv", "json"), default=None)
    common.add_argument("--seed", type=int, default=42)

    parser = argparse.ArgumentParser(
        prog="quagent", description="Measurement gadgets with quantum observers."
    )
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("report", parents=[common], help="uncertainty/back-action table")
    sw = sub.add_parser("sweep", parents=[common], help="two-observer swap time sweep")
    sw.add_argument("--t-min", type=float, default=0.0)
    sw.add_argument("--t-max", type=float, default=scenarios.PERIOD)
    sw.add_argument("--steps", type=int, default=600)
    wg = sub.add_parser("wigner", parents=[common], help="Wigner's friend final state")
    wg.add_argument("--variant", default=scenarios.WignerVariant.FRIEND_SWAPS.value)
    sub.add_parser("verify", parents=[common], help="run the randomized consistency suites")
    inf = sub.add_parser("info", parents=[common], help="report for one gadget")
    inf.add_argument("--gadget", default="swap", help=", ".join(gadgets.BUILDERS))
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    ns = parser.parse_args(argv)
    cfg = CliConfig(**{k: v for k, v in vars(ns).items() if k in CliConfig.__dataclass_fields__})
    try:
        cfg.check()
        return COMMANDS[cfg.command](cfg)
    except UsageError as exc:
        parser.error(str(exc))  # exits with status 2
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
