"""JSON files for displays, Gram forms, families and realization witnesses.

Every file is an object with a "schema" tag such as "npg/display/1" and a
"ring" header {p, m, N, modulus}.  Witt vectors are stored as their lists of
Witt coordinates, each a list of m residue-field coefficients, so files are
readable by hand and independent of the internal representation.
"""
from __future__ import annotations

import json
from pathlib import Path

from .cayley import np_fast, verify_ch
from .deform import (DeformationFamily, ParamAssignment, RealizationWitness,
                     specialize)
from .display import (DisplayMatrix, GramForm, a_number, pairing_compatible,
                      symplectic_block_relation)
from .errors import MalformedFile, NPGError, SchemaVersionMismatch
from .fields import FieldDesc, make_field
from .newton import is_above, parse_np
from .semilinear import MatrixW, np_oracle, required_precision
from .witt import WittRing, WittVector, witt_ring

SCHEMAS = {
    "display": "npg/display/1",
    "gram": "npg/gram/1",
    "family": "npg/family/1",
    "witness": "npg/witness/1",
}


# -- headers ---------------------------------------------------------------------

def field_from_header(hdr: dict) -> FieldDesc:
    try:
        F = make_field(int(hdr["p"]), int(hdr["m"]))
        modulus = tuple(int(c) for c in hdr["modulus"])
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedFile(f"bad field header: {exc}") from exc
    if modulus != F.modulus:
        # only the canonical (least irreducible) modulus is supported
        raise MalformedFile(f"modulus {list(modulus)} is not the canonical one {list(F.modulus)}")
    return F


def ring_from_header(hdr: dict) -> WittRing:
    F = field_from_header(hdr)
    try:
        N = int(hdr["N"])
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedFile(f"bad ring header: {exc}") from exc
    if N < 1:
        raise MalformedFile(f"N must be positive, got {N}")
    return witt_ring(F, N)


# -- elements and matrices --------------------------------------------------------

def witt_from_json(R: WittRing, data) -> WittVector:
    if not isinstance(data, list) or len(data) != R.N:
        raise MalformedFile(f"Witt vector must list {R.N} coordinates")
    try:
        return R.from_coords([R.field.element(c) for c in data])
    except (TypeError, ValueError) as exc:
        raise MalformedFile(f"bad Witt coordinates {data!r}: {exc}") from exc


def matrix_from_json(R: WittRing, data) -> MatrixW:
    if not isinstance(data, list) or not data or not all(isinstance(r, list) for r in data):
        raise MalformedFile("matrix must be a nonempty list of rows")
    rows = [[witt_from_json(R, v) for v in r] for r in data]
    if len({len(r) for r in rows}) != 1:
        raise MalformedFile("ragged matrix")
    return MatrixW(R, rows)


def _check_schema(data, kind: str) -> dict:
    if not isinstance(data, dict):
        raise MalformedFile("top level must be a JSON object")
    tag = data.get("schema")
    if tag is None:
        raise MalformedFile("missing schema tag")
    want = SCHEMAS[kind]
    if tag != want:
        if isinstance(tag, str) and tag.rsplit("/", 1)[0] == want.rsplit("/", 1)[0]:
            raise SchemaVersionMismatch(f"{tag} is not the supported version {want}")
        raise MalformedFile(f"expected a {want} file, got {tag!r}")
    return data


# -- objects -----------------------------------------------------------------------

def display_to_json(disp: DisplayMatrix) -> dict:
    return {"schema": SCHEMAS["display"], "ring": disp.ring.header(),
            "d": disp.d, "c": disp.c, "entries": disp.a.to_json()}


def display_from_json(data) -> DisplayMatrix:
    data = _check_schema(data, "display")
    try:
        R = ring_from_header(data["ring"])
        d, c = int(data["d"]), int(data["c"])
        a = matrix_from_json(R, data["entries"])
        return DisplayMatrix(R, d, c, a)
    except KeyError as exc:
        raise MalformedFile(f"missing field {exc}") from exc
    except NPGError as exc:
        if isinstance(exc, (MalformedFile, SchemaVersionMismatch)):
            raise
        raise MalformedFile(f"invalid display: {exc}") from exc


def gram_to_json(gram: GramForm) -> dict:
    return {"schema": SCHEMAS["gram"], "ring": gram.ring.header(), "entries": gram.S.to_json()}


def gram_from_json(data) -> GramForm:
    data = _check_schema(data, "gram")
    try:
        R = ring_from_header(data["ring"])
        return GramForm(matrix_from_json(R, data["entries"]))
    except KeyError as exc:
        raise MalformedFile(f"missing field {exc}") from exc


def family_to_json(fam: DeformationFamily) -> dict:
    return {"schema": SCHEMAS["family"], "ring": fam.base.ring.header(),
            "base": display_to_json(fam.base), "symmetric": fam.symmetric,
            "positions": sorted([r, s] for r, s in fam.positions)}


def family_from_json(data) -> DeformationFamily:
    data = _check_schema(data, "family")
    try:
        base = display_from_json(data["base"])
        positions = frozenset((int(r), int(s)) for r, s in data["positions"])
        return DeformationFamily(base, bool(data["symmetric"]), positions)
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedFile(f"bad family: {exc}") from exc
    except NPGError as exc:
        if isinstance(exc, (MalformedFile, SchemaVersionMismatch)):
            raise
        raise MalformedFile(f"invalid family: {exc}") from exc


def assignment_to_json(asg: ParamAssignment) -> dict:
    return {"field": asg.field.header(),
            "values": [[r, s, list(v.coeffs)] for (r, s), v in asg.values]}


def assignment_from_json(data) -> ParamAssignment:
    try:
        F = field_from_header(data["field"])
        vals = {(int(r), int(s)): F.element(v) for r, s, v in data["values"]}
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedFile(f"bad assignment: {exc}") from exc
    return ParamAssignment.make(F, vals)


def witness_to_json(w: RealizationWitness) -> dict:
    return {
        "schema": SCHEMAS["witness"],
        "ring": w.display.ring.header(),
        "family": family_to_json(w.family),
        "assignment": assignment_to_json(w.assignment),
        "special_np": str(w.special_np),
        "generic_np": str(w.generic_np),
        "display": display_to_json(w.display),
        "gram": gram_to_json(w.gram) if w.gram is not None else None,
        "log": list(w.log),
    }


def witness_from_json(data) -> RealizationWitness:
    data = _check_schema(data, "witness")
    try:
        fam = family_from_json(data["family"])
        asg = assignment_from_json(data["assignment"])
        disp = display_from_json(data["display"])
        gram = gram_from_json(data["gram"]) if data.get("gram") is not None else None
        special = parse_np(data["special_np"])
        generic = parse_np(data["generic_np"])
        log = tuple(str(x) for x in data.get("log", ()))
    except KeyError as exc:
        raise MalformedFile(f"missing field {exc}") from exc
    except NPGError as exc:
        if isinstance(exc, (MalformedFile, SchemaVersionMismatch)):
            raise
        raise MalformedFile(f"invalid witness: {exc}") from exc
    return RealizationWitness(fam, asg, special, generic, disp, gram, log)


# -- text and files ------------------------------------------------------------------

_WRITERS = {
    DisplayMatrix: display_to_json,
    GramForm: gram_to_json,
    DeformationFamily: family_to_json,
    RealizationWitness: witness_to_json,
}

_READERS = {
    "display": display_from_json,
    "gram": gram_from_json,
    "family": family_from_json,
    "witness": witness_from_json,
}


def dumps(obj) -> str:
    """Canonical text: sorted keys, fixed separators, trailing newline."""
    writer = _WRITERS.get(type(obj))
    if writer is None:
        raise TypeError(f"cannot serialize {type(obj).__name__}")
    return json.dumps(writer(obj), sort_keys=True, indent=1) + "\n"


def loads(text: str, kind: str | None = None):
    """Parse a file of the given kind, or of whatever kind its tag names."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedFile(f"not valid JSON: {exc}") from exc
    if kind is None:
        tag = data.get("schema") if isinstance(data, dict) else None
        kind = next((k for k, v in SCHEMAS.items()
                     if isinstance(tag, str) and tag.rsplit("/", 1)[0] == v.rsplit("/", 1)[0]), None)
        if kind is None:
            raise MalformedFile(f"unknown schema tag {tag!r}")
    return _READERS[kind](data)


def save(obj, path) -> None:
    Path(path).write_text(dumps(obj))


def load(path, kind: str | None = None):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise MalformedFile(f"cannot read {path}: {exc}") from exc
    return loads(text, kind)


# -- offline verification -----------------------------------------------------------------

def verify_witness(w: RealizationWitness) -> tuple[bool, list[str]]:
    """Recompute everything a witness claims.  Returns (ok, report lines)."""
    report = []
    ok = True

    def check(cond: bool, msg: str):
        nonlocal ok
        report.append(("ok    " if cond else "FAIL  ") + msg)
        ok = ok and cond

    try:
        again = specialize(w.family, w.assignment)
        check(again == w.display, "family at the assignment reproduces the display")
    except NPGError as exc:
        check(False, f"specialization failed: {exc}")
    base = w.family.base
    need = required_precision(base.c, base.ring.m)
    base_w = base if base.ring.N >= need else base.with_ring(base.ring.with_precision(need))
    special = np_oracle(base_w.module())
    check(special == w.special_np, f"special polygon {special} (claimed {w.special_np})")
    disp = w.display
    need = required_precision(disp.c, disp.ring.m)
    if disp.ring.N >= need:
        generic = np_oracle(disp.module())
        check(generic == w.generic_np, f"generic polygon {generic} (claimed {w.generic_np})")
    else:
        check(False, f"display precision N = {disp.ring.N} is below {need}")
    check(is_above(w.special_np, w.generic_np), "special polygon lies above the generic one")
    check(a_number(disp) <= 1, f"a-number {a_number(disp)} <= 1")
    if disp.ring.N >= disp.c + 2:
        check(verify_ch(disp), "Cayley-Hamilton identity")
        check(np_fast(disp) == w.generic_np, "polygon of the Cayley-Hamilton polynomial")
    if w.family.symmetric or w.gram is not None:
        if w.gram is None:
            check(False, "symmetric family without a Gram form")
        else:
            check(pairing_compatible(disp, w.gram), "pairing compatible with F and V")
            check(symplectic_block_relation(disp, w.gram), "symplectic block relation")
    return ok, report


__all__ = [
    "SCHEMAS", "dumps", "loads", "save", "load", "verify_witness",
    "display_to_json", "display_from_json", "gram_to_json", "gram_from_json",
    "family_to_json", "family_from_json", "witness_to_json", "witness_from_json",
    "ring_from_header", "field_from_header",
]
