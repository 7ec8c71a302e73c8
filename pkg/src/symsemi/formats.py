"""Text, LaTeX and JSON formats: fixture lists, cubical arrays, subspace files, reports.

A fixture list is a header line followed by items; each item gives, per
parameter, the 10 upper-triangular coefficients of that parameter::

    q=8 minpoly=X^3+X+1 params=x,y count=17
    item 1
    x: 1 0 0 0 1 0 0 1 0 1
    y: 0 1 0 0 0 0 1 0 1 0

Field elements are written ``0``, ``1``, ``a`` or ``a^k`` (``a`` is the pinned
primitive element).  ``#`` starts a comment.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field as dc_field
from typing import Optional, Sequence

import numpy as np

from .gf import Field, make_field
from .geom import COORD_PAIRS, NCOORD, Subspace, span

PARAM_NAMES = ("x", "y", "z", "w")
FIXTURE_FORMAT = "symsemi-fixture"
REPORT_FORMAT = "symsemi-report"


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0, source: str = "<input>"):
        super().__init__(f"{source}:{line}:{column}: {message}")
        self.message = message
        self.line = line
        self.column = column
        self.source = source

    def to_json(self) -> dict:
        return {"error": "ParseError", "message": self.message, "source": self.source,
                "line": self.line, "column": self.column}


def _tok_col(line: str, tok_index: int) -> int:
    """1-based column of the tok_index-th whitespace token of ``line``."""
    spans = [m.start() for m in re.finditer(r"\S+", line)]
    return spans[tok_index] + 1 if tok_index < len(spans) else len(line) + 1


def _parse_elem(F: Field, tok: str, line_no: int, col: int, source: str) -> int:
    try:
        return F.parse(tok)
    except ValueError:
        raise ParseError(f"bad GF({F.q}) element {tok!r}", line_no, col, source) from None


def _parse_header(line: str, line_no: int, source: str, required: Sequence[str]) -> dict[str, str]:
    out = {}
    for m in re.finditer(r"\S+", line):
        tok = m.group()
        if "=" not in tok:
            if tok in required:
                out[tok] = ""
                continue
            raise ParseError(f"expected key=value, got {tok!r}", line_no, m.start() + 1, source)
        k, v = tok.split("=", 1)
        out[k] = v
        out["@" + k] = str(m.start() + 1)
    for k in required:
        if k not in out:
            raise ParseError(f"header is missing {k!r}", line_no, 1, source)
    return out


def _header_field(hdr: dict, line_no: int, source: str) -> Field:
    from .gf import UnsupportedOrder
    col = int(hdr.get("@q", 1))
    try:
        q = int(hdr["q"])
        return make_field(q)
    except (ValueError, UnsupportedOrder) as e:
        raise ParseError(f"bad field order: {e}", line_no, col, source) from None


def _content_lines(text: str):
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].rstrip()
        if line.strip():
            yield n, line


# ---------------------------------------------------------------- fixtures

@dataclass
class FixtureItem:
    params: tuple[str, ...]
    rows: tuple[tuple[int, ...], ...]  # one coefficient row per parameter
    line: int = 0

    @property
    def dim(self) -> int:
        return len(self.params) - 1

    def subspace(self, F: Field) -> Subspace:
        return span(F, [list(r) for r in self.rows])


@dataclass
class FixtureList:
    q: int
    params: tuple[str, ...]
    count: int
    items: list[FixtureItem] = dc_field(default_factory=list)
    minpoly: str = ""

    @property
    def field(self) -> Field:
        return make_field(self.q)

    def subspaces(self) -> list[Subspace]:
        F = self.field
        return [it.subspace(F) for it in self.items]


def fixture_from_subspaces(q: int, subspaces: Sequence[Subspace]) -> FixtureList:
    """Fixture whose items are the RREF bases of ``subspaces`` (all of one dimension)."""
    dims = {W.dim for W in subspaces}
    if len(dims) > 1:
        raise ValueError("fixture items must share one dimension")
    d = dims.pop() if dims else 0
    params = PARAM_NAMES[:d + 1]
    items = [FixtureItem(params, tuple(tuple(r) for r in W.basis)) for W in subspaces]
    return FixtureList(q, params, len(items), items, make_field(q).poly_str())


def _check_item(F: Field, it: FixtureItem, source: str) -> None:
    W = span(F, [list(r) for r in it.rows]) if any(any(r) for r in it.rows) else None
    if W is None or W.rank != len(it.rows):
        raise ParseError("parameter coefficient rows are linearly dependent", it.line, 1, source)


def parse_fixture(text: str, source: str = "<input>") -> FixtureList:
    """Parse the text grammar or its JSON equivalent (detected by a leading ``{``)."""
    if text.lstrip().startswith("{"):
        return _parse_fixture_json(text, source)
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("empty fixture", 1, 1, source)
    n0, head = lines[0]
    hdr = _parse_header(head, n0, source, ("q", "minpoly", "params", "count"))
    F = _header_field(hdr, n0, source)
    if hdr["minpoly"] != F.poly_str():
        raise ParseError(f"minpoly {hdr['minpoly']} differs from the pinned GF({F.q}) polynomial {F.poly_str()}",
                         n0, int(hdr["@minpoly"]), source)
    params = tuple(hdr["params"].split(","))
    if not params or any(p not in PARAM_NAMES for p in params) or len(set(params)) != len(params):
        raise ParseError(f"bad parameter list {hdr['params']!r}", n0, int(hdr["@params"]), source)
    try:
        count = int(hdr["count"])
    except ValueError:
        raise ParseError(f"bad count {hdr['count']!r}", n0, int(hdr["@count"]), source) from None

    items: list[FixtureItem] = []
    cur: Optional[dict] = None
    cur_line = 0

    def close():
        if cur is None:
            return
        missing = [p for p in params if p not in cur]
        if missing:
            raise ParseError(f"item is missing parameter rows {missing}", cur_line, 1, source)
        it = FixtureItem(params, tuple(cur[p] for p in params), cur_line)
        _check_item(F, it, source)
        items.append(it)

    for n, line in lines[1:]:
        toks = line.split()
        if toks[0] == "item":
            close()
            if len(toks) != 2 or not toks[1].isdigit() or int(toks[1]) != len(items) + 1:
                raise ParseError(f"expected 'item {len(items) + 1}'", n, _tok_col(line, min(1, len(toks) - 1)), source)
            cur, cur_line = {}, n
            continue
        if cur is None:
            raise ParseError("coefficient row outside an item", n, 1, source)
        if not toks[0].endswith(":") or toks[0][:-1] not in params:
            raise ParseError(f"expected one of {', '.join(p + ':' for p in params)}", n, _tok_col(line, 0), source)
        p = toks[0][:-1]
        if p in cur:
            raise ParseError(f"duplicate row for parameter {p}", n, _tok_col(line, 0), source)
        if len(toks) != NCOORD + 1:
            raise ParseError(f"expected {NCOORD} coefficients, got {len(toks) - 1}", n,
                             _tok_col(line, min(len(toks), NCOORD + 1) - 1) if len(toks) > NCOORD + 1 else len(line) + 1,
                             source)
        cur[p] = tuple(_parse_elem(F, t, n, _tok_col(line, i + 1), source) for i, t in enumerate(toks[1:]))
    close()
    if len(items) != count:
        raise ParseError(f"header claims count={count} but {len(items)} items were read", n0,
                         int(hdr["@count"]), source)
    return FixtureList(F.q, params, count, items, hdr["minpoly"])


def fixture_to_json(fl: FixtureList) -> dict:
    F = fl.field
    return {
        "format": FIXTURE_FORMAT,
        "q": fl.q,
        "minpoly": F.poly_str(),
        "params": list(fl.params),
        "count": fl.count,
        "items": [{p: " ".join(F.render(c) for c in r) for p, r in zip(it.params, it.rows)} for it in fl.items],
    }


def _parse_fixture_json(text: str, source: str) -> FixtureList:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, e.lineno, e.colno, source) from None
    return fixture_from_json(doc, source)


def fixture_from_json(doc: dict, source: str = "<input>") -> FixtureList:
    if doc.get("format") != FIXTURE_FORMAT:
        raise ParseError(f"expected format {FIXTURE_FORMAT!r}", 1, 1, source)
    try:
        F = make_field(int(doc["q"]))
        params = tuple(doc["params"])
        count = int(doc["count"])
        raw_items = doc["items"]
    except Exception as e:
        raise ParseError(f"bad fixture document: {e}", 1, 1, source) from None
    if doc.get("minpoly") != F.poly_str():
        raise ParseError(f"minpoly {doc.get('minpoly')} differs from {F.poly_str()}", 1, 1, source)
    items = []
    for k, rec in enumerate(raw_items, 1):
        rows = []
        for p in params:
            toks = str(rec.get(p, "")).split()
            if len(toks) != NCOORD:
                raise ParseError(f"item {k}: parameter {p} needs {NCOORD} coefficients", k, 1, source)
            rows.append(tuple(_parse_elem(F, t, k, i + 1, source) for i, t in enumerate(toks)))
        it = FixtureItem(params, tuple(rows), k)
        _check_item(F, it, source)
        items.append(it)
    if len(items) != count:
        raise ParseError(f"count={count} but {len(items)} items", 1, 1, source)
    return FixtureList(F.q, params, count, items, F.poly_str())


def render_fixture(fl: FixtureList) -> str:
    F = fl.field
    out = [f"q={fl.q} minpoly={F.poly_str()} params={','.join(fl.params)} count={fl.count}"]
    for k, it in enumerate(fl.items, 1):
        out.append(f"item {k}")
        for p, r in zip(it.params, it.rows):
            out.append(f"{p}: " + " ".join(F.render(c) for c in r))
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------- linear forms

def render_form(F: Field, coeffs: Sequence[int], params: Sequence[str], latex: bool = False) -> str:
    """``x + a^4 y`` style linear form; ``0`` when all coefficients vanish."""
    terms = []
    for c, p in zip(coeffs, params):
        if not c:
            continue
        if c == 1:
            terms.append(p)
        else:
            k = F.log(c)
            if latex:
                scal = r"\alpha" if k == 1 else rf"\alpha^{{{k}}}"
            else:
                scal = "a" if k == 1 else f"a^{k}"
            terms.append(f"{scal} {p}")
    return " + ".join(terms) if terms else "0"


_TERM = re.compile(r"^(?:(\\alpha|a)(?:\^\{?(\d+)\}?)?\s*)?([a-z])$")


def parse_form(F: Field, text: str, params: Sequence[str]) -> tuple[int, ...]:
    """Inverse of :func:`render_form` (accepts both the text and LaTeX spellings).

    Only characteristic-2 style ``+`` sums of monomials are accepted, which is
    all the renderer produces.
    """
    s = " ".join(text.replace("$", "").split())
    out = [0] * len(params)
    if s == "0":
        return tuple(out)
    for term in s.split("+"):
        term = term.strip()
        m = _TERM.match(term)
        if not m or m.group(3) not in params:
            raise ValueError(f"bad linear-form term {term!r}")
        if m.group(1):
            c = F.exp(int(m.group(2)) if m.group(2) else 1)
        else:
            c = 1
        i = params.index(m.group(3))
        out[i] = F.add(out[i], c)
    return tuple(out)


def item_entries(F: Field, rows: Sequence[Sequence[int]], params: Sequence[str], latex: bool = False) -> list[str]:
    """The 10 upper-triangular entries of a parameterized matrix as linear forms."""
    return [render_form(F, [r[c] for r in rows], params, latex) for c in range(NCOORD)]


def render_item_text(F: Field, rows, params) -> str:
    ent = item_entries(F, rows, params)
    width = max(len(e) for e in ent)
    lines = []
    for i in range(4):
        cells = []
        for j in range(4):
            cells.append(ent[COORD_PAIRS.index((i, j))] if j >= i else "")
        lines.append("[ " + "  ".join(c.rjust(width) for c in cells) + " ]")
    return "\n".join(lines)


def render_item_latex(F: Field, rows, params) -> str:
    ent = item_entries(F, rows, params, latex=True)
    body = []
    for i in range(4):
        cells = [ent[COORD_PAIRS.index((i, j))] if j >= i else "" for j in range(4)]
        body.append(" & ".join(cells))
    return "$\\begin{pmatrix}" + r" \\ ".join(body) + "\\end{pmatrix}$"


# ---------------------------------------------------------------- cubical arrays

def render_array(c) -> str:
    F = c.field
    toks = [F.render(int(x)) for x in c.a.reshape(-1)]
    lines = [f"q={F.q} basis={c.basis.replace(' ', '_')}"]
    for i in range(4):
        for j in range(4):
            lines.append(" ".join(toks[16 * i + 4 * j:16 * i + 4 * j + 4]))
    return "\n".join(lines) + "\n"


def parse_array(text: str, source: str = "<input>"):
    from .semifield import CubicalArray
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("empty array file", 1, 1, source)
    n0, head = lines[0]
    hdr = _parse_header(head, n0, source, ("q", "basis"))
    F = _header_field(hdr, n0, source)
    vals = []
    for n, line in lines[1:]:
        for i, t in enumerate(line.split()):
            vals.append(_parse_elem(F, t, n, _tok_col(line, i), source))
    if len(vals) != 64:
        last = lines[-1][0]
        raise ParseError(f"expected 64 field elements, got {len(vals)}", last, 1, source)
    a = np.array(vals, dtype=np.uint8).reshape(4, 4, 4)
    return CubicalArray(F, a, hdr["basis"].replace("_", " "))


# ---------------------------------------------------------------- subspace files

def render_subspace_file(W: Subspace) -> str:
    return f"q={W.q} subspace\n" + W.to_text() + "\n"


def parse_subspace_file(text: str, source: str = "<input>") -> Subspace:
    lines = list(_content_lines(text))
    if not lines:
        raise ParseError("empty subspace file", 1, 1, source)
    n0, head = lines[0]
    hdr = _parse_header(head, n0, source, ("q", "subspace"))
    F = _header_field(hdr, n0, source)
    rows = []
    for n, line in lines[1:]:
        toks = line.split()
        if len(toks) != NCOORD:
            raise ParseError(f"expected {NCOORD} coordinates, got {len(toks)}", n, 1, source)
        rows.append([_parse_elem(F, t, n, _tok_col(line, i), source) for i, t in enumerate(toks)])
    if not rows or not any(any(r) for r in rows):
        raise ParseError("subspace needs a nonzero row", n0, 1, source)
    return span(F, rows)


def sniff_kind(text: str) -> str:
    """'fixture', 'array', 'subspace', 'result' or 'unknown' from the first content line."""
    s = text.lstrip()
    if s.startswith("{"):
        if '"symsemi-classification"' in s[:400]:
            return "result"
        return "fixture"
    first = next(iter(_content_lines(text)), (0, ""))[1]
    if "basis=" in first:
        return "array"
    if "subspace" in first.split():
        return "subspace"
    if "params=" in first:
        return "fixture"
    return "unknown"


# ---------------------------------------------------------------- reports

def summary_table(results: Sequence, fmt: str = "text") -> str:
    """Counts and maximal counts per dimension, one column per q, in the layout of the published tables."""
    qs = [r.q for r in results]
    depth = max(len(r.levels) for r in results)

    def cell(r, d, maximal):
        if d >= len(r.levels):
            return "-"
        v = r.maximal_counts[d] if maximal else r.counts[d]
        return "?" if v is None else str(v)

    if fmt == "latex":
        out = []
        for title, maximal in (("orbits", False), ("maximal orbits", True)):
            out.append("% " + title)
            out.append("\\begin{tabular}{|c|" + "c" * len(qs) + "|}")
            out.append("\\hline")
            out.append(" & " + " & ".join(f"$q={q}$" for q in qs) + "\\\\")
            out.append("\\hline")
            for d in range(depth):
                out.append(f"$d={d}$ & " + " & ".join(cell(r, d, maximal) for r in results) + "\\\\")
            out.append("\\hline")
            out.append("\\end{tabular}")
        return "\n".join(out) + "\n"
    w = 6
    out = []
    for title, maximal in (("orbits", False), ("maximal orbits", True)):
        out.append(title)
        out.append("     " + "".join(f"q={q}".rjust(w) for q in qs))
        for d in range(depth):
            out.append(f"d={d}  " + "".join(cell(r, d, maximal).rjust(w) for r in results))
    return "\n".join(out) + "\n"


def report_fixtures(res) -> list[FixtureList]:
    return [fixture_from_subspaces(res.q, [n.rep for n in lv]) for lv in res.levels]


def render_report(res, fmt: str = "text") -> str:
    F = make_field(res.q)
    if fmt == "json":
        doc = {
            "format": REPORT_FORMAT,
            "q": res.q,
            "minpoly": F.poly_str(),
            "summary": res.summary_row(),
            "counts": list(res.counts),
            "maximal_counts": list(res.maximal_counts),
            "fixtures": [fixture_to_json(fl) for fl in report_fixtures(res)],
            "nodes": [[{"stabilizer_order": n.stab.claimed_order, "orbit_size": n.orbit_size,
                        "maximal": n.maximal} for n in lv] for lv in res.levels],
        }
        return json.dumps(doc, indent=1) + "\n"
    latex = fmt == "latex"
    if fmt not in ("text", "latex"):
        raise ValueError(f"unknown report format {fmt!r}")
    out = []
    if latex:
        out.append(f"% q={res.q}, alpha has minimal polynomial {F.poly_str()}")
    else:
        out.append(f"q={res.q}  minpoly={F.poly_str()}  (a = primitive element)")
        out.append(res.summary_row())
    for d, lv in enumerate(res.levels):
        params = PARAM_NAMES[:d + 1]
        head = f"dimension {d}: {len(lv)} orbit representatives (parameters {','.join(params)})"
        out.append("")
        out.append("% " + head if latex else head)
        for k, n in enumerate(lv, 1):
            tag = "" if n.maximal is None else (" maximal" if n.maximal else "")
            if latex:
                out.append(f"{k}. {render_item_latex(F, n.rep.basis, params)}%{tag}")
            else:
                out.append(f"{k}. |stab|={n.stab.claimed_order}{tag}")
                out.append(render_item_text(F, n.rep.basis, params))
    out.append("")
    out.append(summary_table([res], "latex" if latex else "text").rstrip())
    return "\n".join(out) + "\n"


def parse_report_fixtures(text: str, source: str = "<input>") -> list[FixtureList]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(e.msg, e.lineno, e.colno, source) from None
    if doc.get("format") != REPORT_FORMAT:
        raise ParseError(f"expected format {REPORT_FORMAT!r}", 1, 1, source)
    return [fixture_from_json(f, source) for f in doc["fixtures"]]
