"""Command-line entry point: ``polymergas {z,radii,verify,mayer,pressure}``.

Exit status: 0 when every check passes, 1 when a check fails, 2 on usage,
parse or cap errors.
"""

from __future__ import annotations

import argparse
import math
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .criteria import fp_radii, optimize_mu_uniform, radii_report
from .errors import EnumerationCapError, PolymerGasError
from .formats import (parse_activities, parse_lambda, parse_mu, parse_rational,
                      parse_subset_gas, parse_system)
from .mayer import MAYER_VOLUME_CAP, mayer_partial_sums
from .model import PolymerSystem, SubsetGasSpec, build_subset_gas, iter_bits, make_family
from .partition import BRUTE_CAP, SUBSET_CAP, z_brute, z_recursive
from .verify import VerificationReport, verify_alternating_sign, verify_pressure_bound, \
    verify_proof_chain, verify_proposition, verify_theorem_bound

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    system: Optional[str]
    family: Optional[str]
    subsetgas: Optional[str]
    activities: Optional[str]
    mu: Optional[str]
    lam: Optional[str]
    cap: Optional[int]
    order: Optional[int]
    f: Fraction
    out: Optional[str]
    seed: int
    verbose: bool
    mu_hi: Fraction
    mu_steps: int


def fmt(value) -> str:
    """Exact rational, then 12 significant decimal digits."""
    return f"{value} ({float(value):.12g})"


def _read(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def parse_subsetgas_arg(arg: str) -> SubsetGasSpec:
    """``space:4,maxsize:2,edges:path`` shorthand, or a subset-gas spec file."""
    if ":" not in arg:
        return parse_subset_gas(_read(arg))
    fields = {}
    for item in arg.split(","):
        key, _, value = item.partition(":")
        fields[key.strip()] = value.strip()
    unknown = set(fields) - {"space", "maxsize", "edges"}
    if unknown or "space" not in fields:
        raise UsageError(f"bad --subsetgas {arg!r}; expected space:N[,maxsize:K][,edges:path|cycle]")
    try:
        n = int(fields["space"])
        k = int(fields.get("maxsize", n))
    except ValueError:
        raise UsageError(f"bad --subsetgas {arg!r}") from None
    space = tuple(str(i) for i in range(n))
    kind = fields.get("edges")
    if kind is None or kind == "none":
        edges = None
    elif kind in ("path", "cycle"):
        edges = {(str(i), str(i + 1)) for i in range(n - 1)}
        if kind == "cycle" and n > 2:
            edges.add((str(n - 1), "0"))
        edges = frozenset(edges)
    else:
        raise UsageError(f"unknown edge pattern {kind!r}")
    return SubsetGasSpec(space, k, edges)


def load_system(cfg: RunConfig) -> tuple[PolymerSystem, str]:
    given = [a for a in (cfg.system, cfg.family, cfg.subsetgas) if a]
    if len(given) != 1:
        raise UsageError("give exactly one of --system, --family, --subsetgas")
    if cfg.system:
        system = parse_system(_read(cfg.system))
        return system, f"file {Path(cfg.system).name}"
    if cfg.family:
        kind, _, n = cfg.family.partition(":")
        try:
            size = int(n)
        except ValueError:
            raise UsageError(f"bad --family {cfg.family!r}; expected kind:n") from None
        return make_family(kind, size), f"family {cfg.family}"
    spec = parse_subsetgas_arg(cfg.subsetgas)
    return build_subset_gas(spec), f"subset gas {cfg.subsetgas} (size cap {spec.max_polymer_size})"


def _vector(arg, n, default, parser):
    if arg is None:
        return (default,) * n
    if arg.startswith("uniform:"):
        return (parse_rational(arg.split(":", 1)[1]),) * n
    return parser(_read(arg), n)


def load_lambda(cfg: RunConfig, system: PolymerSystem) -> frozenset:
    if cfg.lam is None:
        return frozenset(range(system.n))
    ids = set()
    for tok in parse_lambda(_read(cfg.lam)):
        try:
            x = int(tok)
        except ValueError:
            raise UsageError(f"lambda entry {tok!r} is not a polymer id") from None
        system.check_id(x)
        ids.add(x)
    return frozenset(ids)


def _set(ids) -> str:
    return "{" + ",".join(str(x) for x in sorted(ids)) + "}"


def header(cfg: RunConfig, what: str) -> list:
    return [f"# polymergas {cfg.command}", f"# seed {cfg.seed}", f"# system: {what}",
            f"# caps: enumeration {cfg.cap or 'default'}, order {cfg.order or 'default'}"]


def cmd_z(cfg: RunConfig):
    system, what = load_system(cfg)
    lam = load_lambda(cfg, system)
    w = _vector(cfg.activities, system.n, Fraction(1), parse_activities)
    cap = cfg.cap or BRUTE_CAP
    out = header(cfg, what) + [f"lambda: {_set(lam)}"]
    brute = z_brute(system, lam, w, cap=cap)
    rec = z_recursive(system, lam, w)
    rng = random.Random(cfg.seed)
    shuffled = z_recursive(system, lam, w,
                           pivot=lambda mask: rng.choice(list(iter_bits(mask))))
    agree = brute == rec == shuffled
    out += [f"Z_brute = {brute}", f"Z_recursive = {rec}",
            f"Z_recursive[random pivot] = {shuffled}",
            f"Z = {brute}", f"decimal = {float(brute):.12g}",
            f"methods agree: {'yes' if agree else 'NO'}"]
    return out, EXIT_OK if agree else EXIT_FAIL


def cmd_radii(cfg: RunConfig):
    system, what = load_system(cfg)
    out = header(cfg, what)
    if cfg.mu is None:
        optima = {}
        for crit in ("fp", "dobrushin"):
            opt = optima[crit] = optimize_mu_uniform(system, 0.0, float(cfg.mu_hi),
                                                     cfg.mu_steps, criterion=crit)
            note = "  [monotone at grid boundary]" if opt.at_boundary else ""
            out.append(f"optimum {crit}: mu = {fmt(opt.mu_exact)}, radius = {fmt(opt.radius_exact)}{note}")
        mu = (optima["fp"].mu_exact,) * system.n
        out.append("mu: uniform FP optimum")
    else:
        mu = _vector(cfg.mu, system.n, None, parse_mu)
    report = radii_report(system, mu, cap=cfg.cap or BRUTE_CAP)
    out.append("polymer label mu fp_radius dobrushin_radius")
    for e in report.entries:
        out.append(f"{e.polymer} {e.label} {e.mu} FP {fmt(e.fp)} D {fmt(e.dobrushin)}")
    out.append(f"min FP = {fmt(report.min_fp)}")
    out.append(f"min D = {fmt(report.min_dobrushin)}")
    if report.cap is not None:
        out.append(f"truncation: polymer size cap {report.cap}")
    out.append(f"domination FP >= D: {'pass' if report.dominated else 'FAIL'}")
    return out, EXIT_OK if report.dominated else EXIT_FAIL


def cmd_verify(cfg: RunConfig):
    system, what = load_system(cfg)
    lam = load_lambda(cfg, system)
    if len(lam) > (cfg.cap or SUBSET_CAP):
        raise EnumerationCapError(f"|Lambda| = {len(lam)} exceeds exhaustive cap")
    mu = _vector(cfg.mu, system.n, Fraction(1), parse_mu)
    p = tuple(cfg.f * r for r in fp_radii(system, mu))
    inst = f"n={system.n}"
    report = VerificationReport()
    report.extend(verify_proposition(system, lam, p, mu, instance=inst, cap=cfg.cap or SUBSET_CAP))
    report.extend(verify_theorem_bound(system, lam, mu, cfg.f, instance=inst))
    for x in sorted(lam):
        report.extend(verify_proof_chain(system, lam, x, p, mu, instance=inst))
    report.extend(verify_alternating_sign(system, min(cfg.order or 4, 5), instance=inst))
    out = header(cfg, what) + [f"lambda: {_set(lam)}", f"f = {cfg.f}"]
    out += report.render(cfg.verbose).splitlines()
    return out, EXIT_OK if report.ok else EXIT_FAIL


def cmd_mayer(cfg: RunConfig):
    system, what = load_system(cfg)
    lam = load_lambda(cfg, system)
    w = _vector(cfg.activities, system.n, Fraction(1), parse_activities)
    order = cfg.order or 6
    out = header(cfg, what) + [f"lambda: {_set(lam)}"]
    z = z_recursive(system, lam, w)
    target = math.log(z) if z > 0 else None
    out.append(f"Z = {fmt(z)}")
    out.append(f"target log Z = {target:.12g}" if target is not None else "target log Z = undefined (Z <= 0)")
    out.append("order partial_sum gap")
    if lam:
        sums = mayer_partial_sums(system, lam, w, order, order_cap=order,
                                  volume_cap=cfg.cap or MAYER_VOLUME_CAP)
    else:
        sums = [Fraction(0)] * order
    for n, s in enumerate(sums, 1):
        gap = f"{abs(float(s) - target):.6e}" if target is not None else "n/a"
        out.append(f"{n} {float(s):.12g} {gap}")
    return out, EXIT_OK


def cmd_pressure(cfg: RunConfig):
    if not cfg.subsetgas:
        raise UsageError("pressure needs --subsetgas")
    spec = parse_subsetgas_arg(cfg.subsetgas)
    gas = build_subset_gas(spec)
    mu = _vector(cfg.mu, gas.n, Fraction(1, 10), parse_mu)
    if cfg.activities is None:
        w = tuple(cfg.f * r for r in fp_radii(gas, mu))
    else:
        w = _vector(cfg.activities, gas.n, None, parse_activities)
    sites = None
    if cfg.lam is not None:
        sites = sorted(parse_lambda(_read(cfg.lam)))
    report = verify_pressure_bound(spec, sites, w, mu, instance=f"sites={len(sites or spec.space)}")
    out = header(cfg, f"subset gas {cfg.subsetgas} ({gas.n} polymers, size cap {spec.max_polymer_size})")
    out.append(f"sites: {_set(sites or spec.space)}")
    out += report.render(True).splitlines()
    return out, EXIT_OK if report.ok else EXIT_FAIL


COMMANDS = {"z": cmd_z, "radii": cmd_radii, "verify": cmd_verify,
            "mayer": cmd_mayer, "pressure": cmd_pressure}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polymergas",
                                     description="Exact polymer-gas computations and checks.")
    parser.add_argument("command", choices=sorted(COMMANDS))
    parser.add_argument("--system", help="system file")
    parser.add_argument("--family", help="kind:n with kind in path, cycle, complete, edgeless")
    parser.add_argument("--subsetgas", help="space:N,maxsize:K[,edges:path|cycle] or spec file")
    parser.add_argument("--activities", help="activities file or uniform:R")
    parser.add_argument("--mu", help="mu file or uniform:R")
    parser.add_argument("--lambda", dest="lam", help="file with 'lambda i j ...' lines")
    parser.add_argument("--cap", type=int,
                        help="enumeration cap (defaults: z 24, verify 16, mayer volume 8)")
    parser.add_argument("--order", type=int, help="Mayer order / alternating-sign tuple length")
    parser.add_argument("--f", default="1", help="fraction of the FP radius used as p")
    parser.add_argument("--out", help="write the report here instead of stdout")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--verbose", action="store_true", help="print every CHECK line")
    parser.add_argument("--mu-hi", default="10", help="upper end of the uniform mu grid")
    parser.add_argument("--mu-steps", type=int, default=201)
    return parser


def make_config(argv=None) -> RunConfig:
    args = build_parser().parse_args(argv)
    try:
        f = parse_rational(args.f)
        mu_hi = parse_rational(args.mu_hi)
    except PolymerGasError as exc:
        raise UsageError(str(exc)) from None
    if (args.cap is not None and args.cap < 1) or (args.order is not None and args.order < 1) or args.mu_steps < 2:
        raise UsageError("caps, order and grid steps must be positive")
    if not 0 <= f <= 1:
        raise UsageError("--f must lie in [0, 1]")
    return RunConfig(args.command, args.system, args.family, args.subsetgas, args.activities,
                     args.mu, args.lam, args.cap, args.order, f, args.out, args.seed,
                     args.verbose, mu_hi, args.mu_steps)


def main(argv=None) -> int:
    try:
        cfg = make_config(argv)
        lines, status = COMMANDS[cfg.command](cfg)
    except (UsageError, PolymerGasError) as exc:
        print(f"polymergas: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = "\n".join(lines) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
