"""Exact machine checks of the convergence argument on enumerable instances.

Each ``verify_*`` function returns a :class:`VerificationReport` listing one
:class:`Check` per inequality instance. Rational inequalities are compared by
cross-multiplication after positivity of the denominators is established, so
a pass/fail never depends on rounding. Only checks involving logarithms carry
a float tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product
from typing import Iterable, Optional, Sequence

from .criteria import fp_radius
from .errors import EnumerationCapError, PolymerGasError
from .mayer import ursell
from .model import PolymerSystem, SubsetGasSpec, build_subset_gas, iter_bits, polymers_within
from .partition import SUBSET_CAP, as_activities, negate, z_mask, z_table

PASS, FAIL, SKIP = "pass", "fail", "skip"
LOG_TOL = 1e-12
DEFAULT_FRACTIONS = (Fraction(1, 2), Fraction(9, 10), Fraction(99, 100), Fraction(1))


def render(value) -> str:
    if isinstance(value, bool):
        return str(value).lower()
    if isinstance(value, float):
        return f"{value:.12g}"
    if isinstance(value, (frozenset, set, tuple, list)):
        return "{" + ",".join(str(v) for v in sorted(value)) + "}"
    return str(value)


@dataclass(frozen=True)
class Check:
    name: str
    instance: str
    status: str
    witness: tuple = ()
    tolerance: Optional[float] = None
    reason: str = ""

    def line(self) -> str:
        parts = ["CHECK", self.name, self.instance, self.status]
        parts += [f"{k}={render(v)}" for k, v in self.witness]
        if self.tolerance is not None:
            parts.append(f"tol={self.tolerance:g}")
        if self.reason:
            parts.append("reason=" + self.reason.replace(" ", "_"))
        return " ".join(parts)


@dataclass
class VerificationReport:
    checks: list = field(default_factory=list)

    def add(self, name, instance, ok, witness=(), tolerance=None, reason=""):
        self.checks.append(Check(name, instance, PASS if ok else FAIL, tuple(witness),
                                 tolerance, reason))

    def skip(self, name, instance, reason, witness=()):
        self.checks.append(Check(name, instance, SKIP, tuple(witness), None, reason))

    def extend(self, other: "VerificationReport") -> "VerificationReport":
        self.checks.extend(other.checks)
        return self

    def counts(self, name: Optional[str] = None) -> dict:
        out = {PASS: 0, FAIL: 0, SKIP: 0}
        for c in self.checks:
            if name is None or c.name == name:
                out[c.status] += 1
        return out

    @property
    def ok(self) -> bool:
        return not any(c.status == FAIL for c in self.checks)

    def failures(self) -> list:
        return [c for c in self.checks if c.status == FAIL]

    def summary_lines(self) -> list:
        names = list(dict.fromkeys(c.name for c in self.checks))
        lines = []
        for name in names:
            c = self.counts(name)
            total = sum(c.values())
            lines.append(f"{name}: {c[PASS]}/{total} pass, {c[FAIL]} fail, {c[SKIP]} skip")
        c = self.counts()
        lines.append(f"total: {c[PASS]} pass, {c[FAIL]} fail, {c[SKIP]} skip")
        return lines

    def render(self, verbose: bool = False) -> str:
        """Summary, then either every check line or only failures and skips."""
        out = self.summary_lines()
        for c in self.checks:
            if verbose or c.status != PASS:
                out.append(c.line())
        return "\n".join(out) + "\n"


def _ids(mask):
    return tuple(iter_bits(mask))


def _hypothesis_violations(system, lam_mask, p, mu):
    bad = []
    for x in iter_bits(lam_mask):
        r = fp_radius(system, x, mu)
        if p[x] > r:
            bad.append((x, p[x], r))
    return bad


def _check_inputs(system, p, mu):
    p = as_activities(system, p)
    mu = as_activities(system, mu)
    if any(v < 0 for v in p) or any(v < 0 for v in mu):
        raise PolymerGasError("p and mu must be nonnegative")
    return p, mu


def verify_proposition(system: PolymerSystem, lam, p: Sequence, mu: Sequence,
                       instance: str = "-", cap: int = SUBSET_CAP) -> VerificationReport:
    """For every ``S`` in ``lam`` and ``x`` in ``S`` check
    ``Q_S(p) / Q_{S-x}(p) >= Z_{L-S}(mu) / Z_{L-S+x}(mu)`` exactly."""
    p, mu = _check_inputs(system, p, mu)
    lam_mask = system.mask(lam)
    report = VerificationReport()
    if bin(lam_mask).count("1") > cap:
        raise EnumerationCapError(f"|Lambda| exceeds exhaustive cap {cap}")
    bad = _hypothesis_violations(system, lam_mask, p, mu)
    if bad:
        x, px, r = bad[0]
        report.skip("proposition", instance, "hypothesis unmet",
                    [("x", x), ("p_x", px), ("R_fp", r)])
        return report
    q = z_table(system, negate(p), _ids(lam_mask), cap)
    z = z_table(system, mu, _ids(lam_mask), cap)
    for s in q:
        for x in iter_bits(s):
            s_less = s & ~(1 << x)
            q_s, q_less = q[s], q[s_less]
            z_c, z_c_plus = z[lam_mask & ~s], z[lam_mask & ~s_less]
            ok = q_less > 0 and z_c_plus > 0 and q_s * z_c_plus >= z_c * q_less
            report.add("proposition", instance, ok,
                       [("S", _ids(s)), ("x", x), ("Q_S", q_s), ("Q_S-x", q_less),
                        ("Z_Sc", z_c), ("Z_(S-x)c", z_c_plus)])
    return report


def verify_theorem_bound(system: PolymerSystem, lam, mu: Sequence, f=Fraction(1),
                         instance: str = "-", tol: float = LOG_TOL) -> VerificationReport:
    """At ``p = f * R_fp`` check ``|Theta|_x(p) <= log(1 + mu_x)`` for each ``x`` in ``lam``.

    The bound is checked twice: exactly on the ratio ``Q_{L-x} / Q_L`` and in
    floats after the log.
    """
    mu = as_activities(system, mu)
    f = Fraction(f)
    if not 0 <= f <= 1:
        raise PolymerGasError(f"radius fraction must lie in [0, 1], got {f}")
    p = tuple(f * fp_radius(system, x, mu) for x in range(system.n))
    lam_mask = system.mask(lam)
    neg = negate(p)
    memo = {}
    q_full = z_mask(system, lam_mask, neg, memo=memo)
    report = VerificationReport()
    for x in iter_bits(lam_mask):
        q_less = z_mask(system, lam_mask & ~(1 << x), neg, memo=memo)
        bound = 1 + mu[x]
        witness = [("x", x), ("f", f), ("Q_L", q_full), ("Q_L-x", q_less), ("1+mu_x", bound)]
        if q_full <= 0 or q_less <= 0:
            report.add("theorem_ratio", instance, False, witness, reason="Q not positive")
            continue
        ratio = q_less / q_full
        report.add("theorem_ratio", instance, ratio <= bound, witness + [("ratio", ratio)])
        value = math.log(ratio)
        limit = math.log(bound)
        report.add("theorem_log", instance, value <= limit + tol,
                   [("x", x), ("f", f), ("abs_theta", value), ("log(1+mu_x)", limit),
                    ("gap", limit - value)], tolerance=tol)
    return report


def verify_proof_chain(system: PolymerSystem, lam, x: int, p: Sequence, mu: Sequence,
                       instance: str = "-", max_ordering: int = 4) -> VerificationReport:
    """Check every link of the inductive argument for one polymer ``x``.

    Links ``1``-``4`` are the base-case chain on ``lam``; the ``eq*`` links
    are the same chain with ``lam`` replaced by ``lam - S`` for every ``S``
    containing ``x``; ``chain_step`` checks each factor of the telescoped
    product over ``N(x) & S`` for every removal order when that set has at
    most ``max_ordering`` elements besides ``x``.
    """
    p, mu = _check_inputs(system, p, mu)
    lam_mask = system.mask(lam)
    system.check_id(x)
    if not lam_mask >> x & 1:
        raise PolymerGasError(f"polymer {x} is not in Lambda")
    report = VerificationReport()
    bad = _hypothesis_violations(system, lam_mask, p, mu)
    if bad:
        y, py, r = bad[0]
        report.skip("chain", instance, "hypothesis unmet", [("x", y), ("p_x", py), ("R_fp", r)])
        return report
    memo = {}

    def Z(mask):
        return z_mask(system, mask, mu, memo=memo)

    gamma = system.neighbors[x]
    bit = 1 << x
    z_gamma = Z(gamma)
    z_lam, z_less, z_out = Z(lam_mask), Z(lam_mask & ~bit), Z(lam_mask & ~gamma)
    z_union = Z(lam_mask | gamma)
    head = [("x", x)]
    report.add("chain_1", instance, z_lam == z_less + mu[x] * z_out,
               head + [("Z_L", z_lam), ("Z_L-x", z_less), ("Z_L-N", z_out)])
    report.add("chain_2", instance, mu[x] >= p[x] * z_gamma,
               head + [("mu_x", mu[x]), ("p_x", p[x]), ("Z_N", z_gamma)])
    report.add("chain_3", instance, z_gamma * z_out >= z_union,
               head + [("Z_N", z_gamma), ("Z_L-N", z_out), ("Z_LuN", z_union)])
    report.add("chain_4", instance, z_union >= z_lam,
               head + [("Z_LuN", z_union), ("Z_L", z_lam)])
    report.add("chain_end", instance, z_lam >= z_less + p[x] * z_lam,
               head + [("Z_L", z_lam), ("Z_L-x", z_less), ("p_x", p[x])])

    neg = negate(p)
    qmemo = {}

    def Q(mask):
        return z_mask(system, mask, neg, memo=qmemo)

    rest = lam_mask & ~bit
    sub = rest
    subsets = []
    while True:
        subsets.append(sub | bit)
        if sub == 0:
            break
        sub = (sub - 1) & rest
    for s in sorted(subsets):
        sc = lam_mask & ~s
        z_sc, z_sc_x, z_sc_out = Z(sc), Z(sc | bit), Z(sc & ~gamma)
        z_sc_gamma, z_sc_gs = Z(sc | gamma), Z(sc | (gamma & s))
        w = head + [("S", _ids(s))]
        report.add("eq_1", instance, z_sc_x == z_sc + mu[x] * z_sc_out,
                   w + [("Z_Sc+x", z_sc_x), ("Z_Sc", z_sc), ("Z_Sc-N", z_sc_out)])
        report.add("eq_2", instance, mu[x] * z_sc_out >= p[x] * z_gamma * z_sc_out,
                   w + [("mu_x", mu[x]), ("p_x", p[x]), ("Z_N", z_gamma)])
        report.add("eq_3", instance, z_gamma * z_sc_out >= z_sc_gamma,
                   w + [("Z_N", z_gamma), ("Z_Sc-N", z_sc_out), ("Z_ScuN", z_sc_gamma)])
        report.add("eq_4", instance, z_sc_gamma >= z_sc_gs,
                   w + [("Z_ScuN", z_sc_gamma), ("Z_Scu(N&S)", z_sc_gs)])
        others = _ids(gamma & s & ~bit)
        if len(others) > max_ordering:
            report.skip("chain_step", instance, "ordering cap", w)
            continue
        for order in permutations(others):
            a = s & ~bit
            for y in order:
                a_less = a & ~(1 << y)
                q_a, q_al = Q(a), Q(a_less)
                z_ac, z_alc = Z(lam_mask & ~a), Z(lam_mask & ~a_less)
                ok = q_al > 0 and q_a * z_alc >= z_ac * q_al
                report.add("chain_step", instance, ok,
                           w + [("order", order), ("A", _ids(a)), ("y", y), ("Q_A", q_a),
                                ("Q_A-y", q_al), ("Z_Ac", z_ac), ("Z_(A-y)c", z_alc)])
                a = a_less
    return report


def verify_alternating_sign(system: PolymerSystem, max_n: int = 4,
                            instance: str = "-") -> VerificationReport:
    """``(-1)^(n-1) * ursell(t) >= 0`` for every tuple of length ``<= max_n``."""
    if not 1 <= max_n <= 5:
        raise EnumerationCapError("alternating-sign sweep supports max_n in 1..5")
    report = VerificationReport()
    for n in range(1, max_n + 1):
        for t in product(range(system.n), repeat=n):
            phi = ursell(system, t)
            report.add("alternating_sign", instance, (-1) ** (n - 1) * phi >= 0,
                       [("t", "(" + ",".join(map(str, t)) + ")"), ("phi", phi)])
    return report


def per_site_mu(system: PolymerSystem, mu: Sequence, sites: Iterable) -> dict:
    """``{v: sum of mu_x over polymers x containing v}``."""
    if system.supports is None:
        raise PolymerGasError("per-site sums need a subset-gas system")
    mu = as_activities(system, mu)
    return {v: sum((mu[i] for i, s in enumerate(system.supports) if v in s), Fraction(0))
            for v in sites}


def verify_pressure_bound(spec: SubsetGasSpec, sites: Optional[Iterable], w: Sequence,
                          mu: Sequence, instance: str = "-",
                          tol: float = LOG_TOL) -> VerificationReport:
    """Finite-volume pressure bound ``|log Z_{P_L}(w)| <= K |L|`` for a subset gas.

    ``w`` and ``mu`` index the polymers of ``build_subset_gas(spec)``; ``sites``
    defaults to the whole space. ``K`` is the largest per-site ``mu`` sum over
    the truncated gas.
    """
    gas = build_subset_gas(spec)
    w = as_activities(gas, w)
    mu = as_activities(gas, mu)
    if any(v < 0 for v in mu):
        raise PolymerGasError("mu must be nonnegative")
    sites = tuple(spec.space) if sites is None else tuple(sites)
    unknown = [v for v in sites if v not in spec.space]
    if unknown or not sites:
        raise PolymerGasError(f"invalid site subset {sites}")
    inside = polymers_within(gas, sites)
    report = VerificationReport()
    for x in sorted(inside):
        r = fp_radius(gas, x, mu)
        if abs(w[x]) > r:
            report.skip("pressure_bound", instance, "hypothesis unmet",
                        [("x", gas.labels[x]), ("|w_x|", abs(w[x])), ("R_fp", r)])
            return report
    sums = per_site_mu(gas, mu, sites)
    k_trunc = max(sums.values())
    z = z_mask(gas, gas.mask(inside), w)
    head = [("sites", len(sites)), ("Z", z)]
    if z <= 0:
        report.add("pressure_bound", instance, False, head, reason="Z not positive")
        return report
    log_z = abs(math.log(z))
    per_site = 0.0
    for v in sites:
        for x in sorted(inside):
            if v in gas.supports[x]:
                per_site += math.log1p(float(mu[x]))
    report.add("pressure_intermediate", instance, log_z <= per_site + tol,
               head + [("|logZ|", log_z), ("sum_log(1+mu)", per_site)], tolerance=tol)
    bound = float(k_trunc) * len(sites)
    report.add("pressure_bound", instance, log_z <= bound + tol,
               head + [("|logZ|", log_z), ("K(truncated)", k_trunc), ("K|L|", bound),
                       ("pressure", log_z / len(sites))], tolerance=tol)
    return report
