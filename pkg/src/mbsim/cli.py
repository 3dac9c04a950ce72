"""Command-line entry point: ``mbsim <experiment> --config <file>``.

Exit codes: 0 on success, 2 for an invalid config, 3 when the requested
register exceeds the simulator capacity.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .experiments import EXPERIMENTS, ConfigError, RunRecord, load_config, run
from .simcore import CapacityError, ValidationError

log = logging.getLogger("mbsim")

EXIT_OK, EXIT_CONFIG, EXIT_CAPACITY = 0, 2, 3


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="mbsim", description="Run a seeded tri-junction braiding experiment.")
    ap.add_argument("experiment", choices=EXPERIMENTS)
    ap.add_argument("--config", required=True, help="JSON config file")
    ap.add_argument("--out", help="output directory (default: config 'output' or ./mbsim_out/<experiment>)")
    ap.add_argument("--seed", type=int, help="override the config seed")
    ap.add_argument("--plots", action="store_true", help="also write SVG plots")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = load_config(args.config, seed=args.seed)
        if cfg.experiment != args.experiment:
            raise ConfigError(f"config is for {cfg.experiment!r}, not {args.experiment!r}")
        rec = run(cfg)
    except CapacityError as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (ConfigError, ValidationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = args.out or cfg.output or os.path.join("mbsim_out", cfg.experiment)
    rec.write(out)
    if args.plots:
        for name in write_plots(rec, out):
            log.info("wrote %s", name)
    log.info("%s: %d rows in %.1f s -> %s", rec.experiment, len(rec.rows), rec.wall_time, out)
    return EXIT_OK


def write_plots(rec: RunRecord, out: str) -> list[str]:
    """Static SVG views of the CSV columns; returns the written file names."""
    import matplotlib

    matplotlib.use("svg")
    import matplotlib.pyplot as plt

    rows = rec.rows
    written = []

    def save(fig, name):
        path = os.path.join(out, name)
        fig.savefig(path)
        plt.close(fig)
        written.append(path)

    def series(key, value, group, where=lambda r: True):
        out_ = {}
        for r in rows:
            if where(r):
                out_.setdefault(r[group], ([], []))
                out_[r[group]][0].append(r[key])
                out_[r[group]][1].append(r[value])
        return out_

    fig, ax = plt.subplots(figsize=(5, 3.5))
    if rec.experiment == "braid":
        for flv, (x, y) in series("delay_ns", "bias", "flavor", lambda r: r["sign"] == "+").items():
            ax.plot(x, y, "o-", label=flv)
        ax.axhline(0, color="gray", lw=0.5)
        ax.set(xlabel="delay (ns)", ylabel="bias")
    elif rec.experiment == "errorsweep":
        for flv, (x, y) in series("eps_cnot", "bias", "flavor").items():
            ax.plot(x, y, "o-", label=f"{flv} bias")
        for flv, (x, y) in series("eps_cnot", "subspace", "flavor").items():
            ax.plot(x, y, "--", label=f"{flv} P+ + P-")
        ax.axvspan(6.9e-3, 9.4e-3, color="gray", alpha=0.2)
        ax.set(xlabel="two-qubit error rate", ylabel="value")
    elif rec.experiment == "protect":
        for tau, (x, y) in series("dalpha0", "p_minus", "tau").items():
            ax.plot(x, y, label=f"tau={tau}")
        ax.set(xlabel="arm-0 coupling shift", ylabel="P-")
    elif rec.experiment == "qpt":
        for flv, (x, y) in series("theta", "error", "flavor").items():
            ax.plot(x, y, "o-", label=flv)
        ax.set(xlabel="theta", ylabel="process infidelity")
    elif rec.experiment == "move":
        labels = [f"{r['flavor']}/{r['noise']}" for r in rows]
        ax.bar(range(len(rows)), [r["p_plus"] for r in rows], label="P+")
        ax.bar(range(len(rows)), [r["p_minus"] for r in rows], bottom=[r["p_plus"] for r in rows], label="P-")
        ax.set_xticks(range(len(rows)), labels, rotation=30, fontsize=7)
        ax.set(ylabel="normalized probability")
    elif rec.experiment == "track":
        for (flv, step, sign), ps in _group_track(rows).items():
            ax.plot(range(8), ps, "o-", label=f"{flv} step {step} {sign}")
        ax.set_xticks(range(8), [format(b, "03b") for b in range(8)])
        ax.set(ylabel="probability")
    else:
        ax.bar([r["schedule"] for r in rows], [r["duration_ns"] for r in rows])
        ax.set(ylabel="duration (ns)")
    if ax.get_legend_handles_labels()[0]:
        ax.legend(fontsize=7)
    fig.tight_layout()
    save(fig, f"{rec.experiment}.svg")
    return written


def _group_track(rows):
    out = {}
    for r in rows:
        out.setdefault((r["flavor"], r["step"], r["sign"]), []).append(r["probability"])
    return out


if __name__ == "__main__":
    sys.exit(main())
