"""Command-line interface.

Exit codes: 0 success, 1 internal error, 2 input error, 3 property failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass

from . import discrete, gaussian
from .model import (
    ChannelError,
    DiscreteChannel,
    GaussianChannel,
    RawGaussianChannel,
    channel_from_json,
    channel_to_json,
    distribution_from_json,
    set_log_base,
)

log = logging.getLogger("ifccr")

EXIT_OK, EXIT_INTERNAL, EXIT_INPUT, EXIT_PROPERTY = 0, 1, 2, 3


@dataclass(frozen=True)
class RunConfig:
    command: str
    channel: str | None = None
    dist: str | None = None
    out: str | None = None
    seed: int = 0
    samples: int = 1000
    beta_density: int = 2048
    directions: int = 181
    tol: float = 1e-9
    base: str = "2"
    user: int = 1
    h12: tuple = (0.0, 10.0, 200)
    h21: tuple = (0.0, 10.0, 200)
    fixture: str | None = None
    jobs: int = 1

    def __post_init__(self):
        if not self.tol > 0:
            raise ChannelError("BAD_FIELD", "--tol must be > 0", field="tol")
        if self.beta_density < 2:
            raise ChannelError("BAD_FIELD", "--beta-density must be >= 2", field="beta-density")
        if self.directions < 3:
            raise ChannelError("BAD_FIELD", "--directions must be >= 3", field="directions")
        if self.jobs < 1:
            raise ChannelError("BAD_FIELD", "--jobs must be >= 1", field="jobs")
        if self.samples < 1:
            raise ChannelError("BAD_FIELD", "--samples must be >= 1", field="samples")


def parse_range(text: str) -> tuple:
    try:
        lo, hi, n = text.split(":")
        return (float(lo), float(hi), int(n))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected A:B:N, got {text!r}") from exc


def _read_json(path: str, what: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise ChannelError("BAD_FILE", f"cannot read {what} file {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise ChannelError("BAD_FILE", f"{what} file {path} is not valid JSON: {exc}") from exc


def _gaussian(path: str | None) -> GaussianChannel:
    if path is None:
        raise ChannelError("MISSING_FIELD", "--channel is required", field="channel")
    ch = channel_from_json(_read_json(path, "channel"))
    if isinstance(ch, RawGaussianChannel):
        ch = gaussian.standard_form(ch)
    if not isinstance(ch, GaussianChannel):
        raise ChannelError("BAD_FIELD", 'expected a Gaussian channel ("kind": "gaussian")', field="kind")
    return ch


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def cmd_gaussian_check(cfg: RunConfig) -> int:
    ch = _gaussian(cfg.channel)
    labels = {f"user{u}": gaussian.classify(ch, u, cfg.tol) for u in (1, 2)}
    report = {
        "channel": channel_to_json(ch),
        "tol": cfg.tol,
        **{k: v.regime.value for k, v in labels.items()},
        "margins": {
            k: {"strong": v.strong_margin, "veryStrong": v.very_strong_margin} for k, v in labels.items()
        },
        "boundaryFlags": {
            k: {"strong": v.strong_boundary, "veryStrong": v.very_strong_boundary}
            for k, v in labels.items()
        },
    }
    _emit(_dump(report), cfg.out)
    return EXIT_OK


def cmd_gaussian_map(cfg: RunConfig) -> int:
    base = _gaussian(cfg.channel) if cfg.channel else gaussian.UNIT_MAP_CHANNEL
    spec = gaussian.RegimeMapSpec(base=base, h12=cfg.h12, h21=cfg.h21, user=cfg.user)
    m = gaussian.regime_map(spec, tol=cfg.tol, jobs=cfg.jobs)
    _emit(m.to_csv(), cfg.out)
    return EXIT_OK


def cmd_gaussian_region(cfg: RunConfig) -> int:
    ch = _gaussian(cfg.channel)
    fr = gaussian.th4_frontier(ch, gaussian.BetaGrid(n_t=cfg.beta_density))
    _emit(fr.to_csv(), cfg.out)
    return EXIT_OK


def cmd_discrete_verify(cfg: RunConfig) -> int:
    if cfg.fixture:
        ch = discrete.degraded_fixture(cfg.fixture)
        source = {"fixture": cfg.fixture}
    elif cfg.channel:
        ch = channel_from_json(_read_json(cfg.channel, "channel"))
        if not isinstance(ch, DiscreteChannel):
            raise ChannelError("BAD_FIELD", 'expected "kind": "discrete"', field="kind")
        source = {"channel": cfg.channel}
    else:
        raise ChannelError("MISSING_FIELD", "need --fixture or --channel", field="channel")
    extra = ()
    if cfg.dist:
        extra = (distribution_from_json(_read_json(cfg.dist, "distribution")),)
    rep = discrete.verify_channel(ch, cfg.samples, cfg.seed, cfg.tol, cfg.directions, extra)
    out = {"source": source, **rep.to_json()}
    if extra:
        d = extra[0]
        out["distribution"] = {
            "outer": discrete.th2_region_at(ch, d).__dict__,
            "inner": discrete.inner_region_at(ch, d).__dict__,
            "remark3": discrete.remark3_margin(ch, d).__dict__,
        }
    _emit(_dump(out), cfg.out)
    return EXIT_OK if rep.ok else EXIT_PROPERTY


COMMANDS = {
    "gaussian-check": cmd_gaussian_check,
    "gaussian-map": cmd_gaussian_map,
    "gaussian-region": cmd_gaussian_region,
    "discrete-verify": cmd_discrete_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--channel", help="channel JSON file")
    common.add_argument("--dist", help="product input distribution JSON file")
    common.add_argument("--out", help="output file (default stdout)")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--samples", type=int, default=1000)
    common.add_argument("--beta-density", type=int, default=2048)
    common.add_argument("--directions", type=int, default=181)
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--base", choices=("2", "e"), default="2")
    common.add_argument("--user", type=int, choices=(1, 2), default=1)
    common.add_argument("--h12", type=parse_range, default=(0.0, 10.0, 200), metavar="A:B:N")
    common.add_argument("--h21", type=parse_range, default=(0.0, 10.0, 200), metavar="A:B:N")
    common.add_argument("--fixture", choices=discrete.FIXTURES)
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="ifccr", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("gaussian-check", parents=[common], help="classify a Gaussian channel for both users")
    sub.add_parser("gaussian-map", parents=[common], help="regime map over (h12, h21) as CSV")
    sub.add_parser("gaussian-region", parents=[common], help="outer-bound frontier as CSV")
    sub.add_parser("discrete-verify", parents=[common], help="sampled checks on a discrete channel")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        cfg = RunConfig(
            command=args.command, channel=args.channel, dist=args.dist, out=args.out,
            seed=args.seed, samples=args.samples, beta_density=args.beta_density,
            directions=args.directions, tol=args.tol, base=args.base, user=args.user,
            h12=args.h12, h21=args.h21, fixture=args.fixture, jobs=args.jobs,
        )
        set_log_base(cfg.base)
        return COMMANDS[cfg.command](cfg)
    except ChannelError as exc:
        print(f"ifccr: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except BrokenPipeError:
        # reader went away (e.g. piped into head); silence the flush at exit
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK
    except Exception:  # noqa: BLE001
        log.exception("internal error")
        return EXIT_INTERNAL
    finally:
        set_log_base(2)


if __name__ == "__main__":
    sys.exit(main())
