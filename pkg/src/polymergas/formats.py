"""Line-oriented text formats for systems, subset-gas specs, activities, mu and Lambda.

Blank lines and ``#`` comments are ignored everywhere. Rationals are written
``num/den`` or as integers.

System::

    polymers 3
    incompat 0 1
    label 0 a

Subset gas::

    space 4
    edge 0 1
    maxsize 2

Activities / mu (``uniform`` sets every entry)::

    w 0 1/2         mu uniform 1
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional

from .errors import FormatError, PolymerGasError
from .model import PolymerSystem, SubsetGasSpec


def _lines(text):
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line.split()


def parse_rational(token: str, lineno=None) -> Fraction:
    try:
        if "." in token or "e" in token.lower():
            raise ValueError
        return Fraction(token)
    except (ValueError, ZeroDivisionError):
        raise FormatError(f"expected a rational num/den, got {token!r}", lineno) from None


def _int(token, lineno, what="integer"):
    try:
        value = int(token)
    except ValueError:
        raise FormatError(f"expected {what}, got {token!r}", lineno) from None
    if value < 0:
        raise FormatError(f"expected nonnegative {what}, got {value}", lineno)
    return value


def parse_system(text: str) -> PolymerSystem:
    n = None
    pairs, labels = [], {}
    for lineno, tok in _lines(text):
        key = tok[0]
        if key == "polymers":
            if n is not None:
                raise FormatError("duplicate 'polymers' header", lineno)
            if len(tok) != 2:
                raise FormatError("usage: polymers N", lineno)
            n = _int(tok[1], lineno, "polymer count")
            continue
        if n is None:
            raise FormatError("file must start with 'polymers N'", lineno)
        if key == "incompat":
            if len(tok) != 3:
                raise FormatError("usage: incompat i j", lineno)
            i, j = _int(tok[1], lineno, "polymer id"), _int(tok[2], lineno, "polymer id")
            if i >= n or j >= n:
                raise FormatError(f"polymer id out of range 0..{n - 1}", lineno)
            if i == j:
                raise FormatError("self-incompatibility is implicit; do not list it", lineno)
            pairs.append((i, j))
        elif key == "label":
            if len(tok) < 3:
                raise FormatError("usage: label i <string>", lineno)
            i = _int(tok[1], lineno, "polymer id")
            if i >= n:
                raise FormatError(f"polymer id out of range 0..{n - 1}", lineno)
            labels[i] = " ".join(tok[2:])
        else:
            raise FormatError(f"unknown directive {key!r}", lineno)
    if n is None:
        raise FormatError("missing 'polymers N' header")
    return PolymerSystem.from_pairs(n, pairs, [labels.get(i, str(i)) for i in range(n)])


def format_system(system: PolymerSystem) -> str:
    out = [f"polymers {system.n}"]
    out += [f"incompat {x} {y}" for x, y in system.cross_pairs()]
    out += [f"label {i} {lab}" for i, lab in enumerate(system.labels) if lab != str(i)]
    return "\n".join(out) + "\n"


def parse_subset_gas(text: str) -> SubsetGasSpec:
    size, maxsize, edges = None, None, None
    for lineno, tok in _lines(text):
        key = tok[0]
        if key == "space" and len(tok) == 2:
            size = _int(tok[1], lineno, "site count")
        elif key == "maxsize" and len(tok) == 2:
            maxsize = _int(tok[1], lineno, "size cap")
        elif key == "edge" and len(tok) == 3:
            edges = edges or set()
            edges.add((tok[1], tok[2]))
        else:
            raise FormatError(f"cannot parse {' '.join(tok)!r}", lineno)
    if size is None or maxsize is None:
        raise FormatError("subset gas needs 'space N' and 'maxsize k'")
    space = tuple(str(i) for i in range(size))
    try:
        return SubsetGasSpec(space, maxsize, None if edges is None else frozenset(edges))
    except PolymerGasError as exc:
        raise FormatError(str(exc)) from None


def _parse_vector(text: str, n: int, key: str) -> tuple:
    values: list[Optional[Fraction]] = [None] * n
    for lineno, tok in _lines(text):
        if tok[0] != key or len(tok) != 3:
            raise FormatError(f"usage: {key} <id|uniform> <rational>", lineno)
        value = parse_rational(tok[2], lineno)
        if tok[1] == "uniform":
            values = [value] * n
            continue
        i = _int(tok[1], lineno, "polymer id")
        if i >= n:
            raise FormatError(f"polymer id out of range 0..{n - 1}", lineno)
        values[i] = value
    missing = [i for i, v in enumerate(values) if v is None]
    if missing:
        raise FormatError(f"no {key} value for polymer(s) {missing}")
    return tuple(values)


def parse_activities(text: str, n: int) -> tuple:
    return _parse_vector(text, n, "w")


def parse_mu(text: str, n: int) -> tuple:
    mu = _parse_vector(text, n, "mu")
    if any(v < 0 for v in mu):
        raise FormatError("mu entries must be nonnegative")
    return mu


def parse_lambda(text: str) -> frozenset:
    """``lambda i j ...`` lines; their union is the volume (ids or site labels)."""
    out = set()
    seen = False
    for lineno, tok in _lines(text):
        if tok[0] != "lambda":
            raise FormatError("usage: lambda <id> <id> ...", lineno)
        seen = True
        out.update(tok[1:])
    if not seen:
        raise FormatError("no 'lambda' line found")
    return frozenset(out)
