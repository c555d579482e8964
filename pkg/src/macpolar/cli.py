"""Command-line entry point: ``macpolar {region,polarize,check,oracle} FILE``.

Every command prints a human-readable report, a JSON block, or both
(``--format``). ``FILE`` may name one of the bundled channels (``bac.json``,
``and.json``, ...) instead of a path.

Exit codes: 0 when the region (or subset) is preserved or the command simply
succeeded, 2 when it is not preserved, 1 on errors, and 3 from ``oracle`` when
the brute-force measurement contradicts the criterion.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Sequence

from . import channelfile
from .channel import Mac, TwoUserView, as_mask, proper_subsets, region, subset_label, two_user_reduction
from .compat import CompatReport, applicable_shortcuts, check_compatibility
from .oracle import describe_probe, oracle_verdict
from .polarize import DEFAULT_MAX_DEPTH, DepthError, SynthesisOptions, parse_signs, synthesize
from .tolerances import Tolerances, resolve

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_PRESERVED = 2
EXIT_CONTRADICTION = 3


class Report:
    def __init__(self, command: str):
        self.lines: list[str] = []
        self.data: dict[str, Any] = {"command": command}

    def say(self, line: str = "") -> None:
        self.lines.append(line)

    def emit(self, fmt: str, out=None) -> None:
        out = out or sys.stdout
        if fmt in ("text", "both"):
            print("\n".join(self.lines), file=out)
        if fmt == "both":
            print("--- json ---", file=out)
        if fmt in ("json", "both"):
            print(json.dumps(self.data, indent=2, default=str), file=out)


def _describe(mac: Mac) -> str:
    groups = " , ".join(str(g) for g in mac.input_groups)
    name = f"{mac.name}: " if mac.name else ""
    return f"{name}{mac.m} users on {groups}; {mac.output_size} outputs"


def _region_block(rep: Report, mac: Mac) -> dict[str, float]:
    reg = region(mac)
    values = {}
    for mask, value in reg.items():
        label = subset_label(mask, mac.m)
        values[label] = value
        rep.say(f"  I_{label} = {value:.6f} bits")
    rep.say(f"  dominant-face sum rate = {reg.sum_capacity:.6f} bits")
    return values


def cmd_region(args, tol: Tolerances) -> tuple[Report, int]:
    mac = channelfile.load(args.file)
    rep = Report("region")
    rep.say(_describe(mac))
    rep.data["channel"] = mac.name
    rep.data["mutual_information"] = _region_block(rep, mac)
    rep.data["sum_capacity"] = region(mac).sum_capacity
    return rep, EXIT_OK


def cmd_polarize(args, tol: Tolerances) -> tuple[Report, int]:
    mac = channelfile.load(args.file)
    signs = parse_signs(args.seq)
    # --no-merge reports the raw alphabet, zero-probability outputs included
    opts = SynthesisOptions(merge_outputs=not args.no_merge, merge_tolerance=tol.eps_zero,
                            prune_zero_outputs=not args.no_merge)
    w = synthesize(mac, signs, opts, max_depth=args.max_depth)
    label = "".join(signs) or "(none)"
    rep = Report("polarize")
    rep.say(_describe(mac))
    rep.say(f"W^{label}: {w.output_size} outputs" + ("" if opts.merge_outputs else " (unmerged)"))
    rep.data.update(channel=mac.name, sequence=label, output_size=w.output_size, merged=opts.merge_outputs)
    rep.data["mutual_information"] = _region_block(rep, w)
    if args.save:
        channelfile.save(w, args.save)
        rep.say(f"saved to {args.save}")
        rep.data["saved"] = args.save
    return rep, EXIT_OK


def _report_subset(rep: Report, mac: Mac, mask: int, result: CompatReport, shortcuts: dict) -> dict:
    label = subset_label(mask, mac.m)
    verdict = "preserved" if result.compatible else "not preserved"
    rep.say(f"S={label}: {verdict}")
    if result.witness is not None:
        rep.say("  witness F(xhat, y) = exp(2 pi j t):")
        for x, y, t in result.witness.phase_table():
            value = result.witness(x, y)
            rep.say(f"    xhat={x} y={y}  t={t:.6f}  F={value.real:+.6f}{value.imag:+.6f}j")
    else:
        rep.say(f"  {result.failure.stage}: {result.failure.message}")
    for d in result.diagnostics:
        rep.say(f"  note: {d}")
    if "prime_field_a" in shortcuts:
        a = shortcuts["prime_field_a"]
        rep.say("  prime-field shortcut: " + ("no a with I(X+aY;Y|Z)=0" if a is None else f"a={a}"))
    if "coprime_compatible" in shortcuts:
        rep.say(f"  co-prime shortcut: I(X;Y|Z)=0 is {shortcuts['coprime_compatible']}")
    entry = result.to_dict()
    entry["subset"] = label
    entry["mask"] = mask
    if shortcuts:
        entry["shortcuts"] = shortcuts
    return entry


def cmd_check(args, tol: Tolerances) -> tuple[Report, int]:
    mac = channelfile.load(args.file)
    masks = [as_mask(args.subset, mac.m)] if args.subset is not None else proper_subsets(mac.m)
    full = (1 << mac.m) - 1
    rep = Report("check")
    rep.say(_describe(mac))
    entries = []
    preserved = True
    for mask in masks:
        if mask in (0, full):
            raise ValueError(f"subset mask must be a nonempty proper subset, got {mask:#x}")
        view = TwoUserView(two_user_reduction(mac, mask), tol)
        result = check_compatibility(view, tol, cross_validate_depth=args.cross_validate)
        preserved &= result.compatible
        entries.append(_report_subset(rep, mac, mask, result, applicable_shortcuts(view, tol)))
    scope = "region" if args.subset is None else f"S={subset_label(masks[0], mac.m)}"
    rep.say(f"{scope}: {'preserved' if preserved else 'not preserved'}")
    rep.data.update(channel=mac.name, preserved=preserved, subsets=entries)
    return rep, EXIT_OK if preserved else EXIT_NOT_PRESERVED


def cmd_oracle(args, tol: Tolerances) -> tuple[Report, int]:
    mac = channelfile.load(args.file)
    mask = as_mask(args.subset, mac.m)
    verdict = oracle_verdict(mac, mask, args.depth, tol, SynthesisOptions(merge_tolerance=tol.eps_zero))
    rep = Report("oracle")
    rep.say(_describe(mac))
    rep.say(f"{'depth':>5}  {'average I_S':>12}  {'reference':>10}  {'deficit':>10}")
    for p in verdict.probes:
        rep.say(f"{p.depth:>5}  {p.average:>12.6f}  {p.reference:>10.6f}  {p.deficit:>10.3e}")
    rep.data.update(
        channel=mac.name,
        subset=subset_label(mask, mac.m),
        preserved=verdict.preserved,
        first_loss_depth=verdict.first_loss_depth,
        probes=[{"depth": p.depth, "average": p.average, "reference": p.reference, "deficit": p.deficit,
                 "values": {"".join(s) or "()": v for s, v in p.values.items()}} for p in verdict.probes],
    )
    code = EXIT_OK if verdict.preserved else EXIT_NOT_PRESERVED
    rep.say(f"observed: {'no loss' if verdict.preserved else f'loss at depth {verdict.first_loss_depth}'}"
            f" up to depth {args.depth}")
    full = (1 << mac.m) - 1
    if mask != full:
        criterion = check_compatibility(TwoUserView(two_user_reduction(mac, mask), tol), tol).compatible
        rep.data["criterion_compatible"] = criterion
        if criterion and not verdict.preserved:
            worst = max(verdict.probes, key=lambda p: abs(p.deficit))
            rep.say("!!! CONTRADICTION: the criterion says preserved but a loss was measured")
            rep.say("!!! " + describe_probe(worst, mac.m))
            rep.data["contradiction"] = True
            code = EXIT_CONTRADICTION
        elif not criterion and verdict.preserved:
            rep.say(f"note: the criterion predicts a loss that does not show up by depth {args.depth};"
                    " it may appear deeper")
    return rep, code


def _subset_arg(text: str) -> int:
    return int(text, 0)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="macpolar", description=__doc__.splitlines()[0])
    parser.add_argument("--format", choices=("text", "json", "both"), default="both")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("region", help="symmetric capacity region I_S for every user subset")
    p.add_argument("file")
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("polarize", help="synthesize W^s and report its region")
    p.add_argument("file")
    p.add_argument("--seq", default="", help="sign sequence such as '-+-'")
    p.add_argument("--no-merge", action="store_true", help="keep the raw synthesized output alphabet")
    p.add_argument("--max-depth", type=int, default=DEFAULT_MAX_DEPTH)
    p.add_argument("--save", metavar="PATH", help="write the synthesized channel to a channel file")
    p.set_defaults(func=cmd_polarize)

    p = sub.add_parser("check", help="decide whether polarization preserves the region")
    p.add_argument("file")
    p.add_argument("--subset", type=_subset_arg, help="user subset bitmask, e.g. 1 or 0b101")
    p.add_argument("--cross-validate", type=int, default=0, metavar="N",
                   help="also compare witness with fingerprints of W^-, W^-+, ... up to N signs")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("oracle", help="measure preservation by brute-force synthesis")
    p.add_argument("file")
    p.add_argument("--subset", type=_subset_arg, default=1)
    p.add_argument("--depth", type=int, default=2)
    p.set_defaults(func=cmd_oracle)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        tol = resolve(None)
        rep, code = args.func(args, tol)
    except (channelfile.ChannelFileError, DepthError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    rep.emit(args.format)
    return code


if __name__ == "__main__":
    sys.exit(main())
