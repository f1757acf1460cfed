"""Input descriptions, chain literals, and the bundled examples."""

from __future__ import annotations

import json
import os
from importlib import resources

from .errors import InputError
from .skeleton import (
    LiftedCell,
    SkeletonSpec,
    build_chain,
    presentation_complex,
)
from .words import (
    format_word,
    make_presentation,
    oracle_from_config,
    parse_presentation,
    parse_word,
)


def _presentation_from(value):
    if isinstance(value, str):
        return parse_presentation(value)
    if isinstance(value, dict):
        try:
            gens = value["generators"]
            rels = value.get("relators", [])
        except TypeError:
            raise InputError("presentation must be a string or an object")
        return make_presentation(gens, rels)
    raise InputError("presentation must be a string or an object")


def load_input(source, radius_override=None):
    """Build (skeleton, oracle) from a description dict or a JSON file path.

    The description holds "dim", "presentation", "oracle", and, above
    dimension 2 or for non-standard complexes, explicit "cells".  Without
    cells the two-dimensional complex of the presentation is used.
    """
    if isinstance(source, (str, os.PathLike)):
        try:
            with open(source) as fh:
                data = json.load(fh)
        except OSError as e:
            raise InputError(f"cannot read input file: {e}") from None
        except json.JSONDecodeError as e:
            raise InputError(f"input file is not valid JSON: {e}") from None
    else:
        data = source
    if not isinstance(data, dict):
        raise InputError("input description must be a JSON object")
    for key in ("dim", "presentation", "oracle"):
        if key not in data:
            raise InputError(f"input description is missing {key!r}")
    q = data["dim"]
    if not isinstance(q, int):
        raise InputError("dim must be an integer")
    p = _presentation_from(data["presentation"])
    cfg = data["oracle"]
    if not isinstance(cfg, dict):
        raise InputError("oracle config must be an object")
    if radius_override is not None and cfg.get("kind") == "bounded-bfs":
        cfg = dict(cfg, radius=radius_override)
    oracle = oracle_from_config(p, cfg)
    if "cells" in data:
        cells = []
        for entry in data["cells"]:
            try:
                dim, cid = entry["dim"], entry["id"]
            except (TypeError, KeyError):
                raise InputError(f"malformed cell entry {entry!r}") from None
            bnd = []
            for t in entry.get("boundary", []):
                try:
                    w = parse_word(t["word"], p.generators)
                    bnd.append((w, t["base"], t["coeff"]))
                except (TypeError, KeyError):
                    raise InputError(f"malformed boundary term {t!r}") from None
            cells.append((dim, cid, bnd))
        return SkeletonSpec(q, p, cells), oracle
    if q != 2:
        raise InputError("explicit cells are required above dimension 2")
    return presentation_complex(p), oracle


# ------------------------------------------------------------ chain literals

def parse_chain(text: str, s, oracle):
    """Chain from a literal like "2*(a b, f0) - (1, e_a)"."""
    text = text.strip()
    if not text:
        raise InputError("empty chain literal")
    i, n = 0, len(text)
    terms = []
    first = True
    while i < n:
        while i < n and text[i].isspace():
            i += 1
        if i >= n:
            break
        sign = 1
        if text[i] in "+-":
            sign = -1 if text[i] == "-" else 1
            i += 1
            while i < n and text[i].isspace():
                i += 1
        elif not first:
            raise InputError("chain terms must be joined with + or -")
        coeff = 1
        if i < n and text[i].isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            coeff = int(text[i:j])
            i = j
            while i < n and text[i].isspace():
                i += 1
            if i >= n or text[i] != "*":
                raise InputError("expected '*' between coefficient and cell")
            i += 1
            while i < n and text[i].isspace():
                i += 1
        if i >= n or text[i] != "(":
            raise InputError(f"expected '(' at position {i} of chain literal")
        j = text.find(")", i)
        if j < 0:
            raise InputError("unbalanced parenthesis in chain literal")
        inner = text[i + 1:j]
        if "," not in inner:
            raise InputError(f"term {inner!r} needs the form (word, cell)")
        wtext, cid = inner.rsplit(",", 1)
        cid = cid.strip()
        if cid not in s.index:
            raise InputError(f"unknown cell {cid!r} in chain literal")
        dim, idx = s.index[cid]
        word = parse_word(wtext.strip(), s.presentation.generators)
        terms.append((LiftedCell(dim, idx, word), sign * coeff))
        i = j + 1
        first = False
    dims = {c.dim for c, _ in terms}
    if len(dims) != 1:
        raise InputError("chain literal mixes cells of different dimensions")
    return build_chain(dims.pop(), terms, oracle)


def format_chain(a, s) -> str:
    """Literal form of a chain; parse_chain inverts it."""
    if not a.terms:
        return "0"
    pieces = []
    for c, coeff in a.terms:
        mag = abs(coeff)
        body = f"({format_word(c.word)}, {s.cell_id(c.dim, c.base)})"
        if mag != 1:
            body = f"{mag}*{body}"
        if not pieces:
            pieces.append(body if coeff > 0 else f"-{body}")
        else:
            pieces.append(f"{'+' if coeff > 0 else '-'} {body}")
    return " ".join(pieces)


# -------------------------------------------------------------- delta tables

def read_delta(path) -> list:
    """Whitespace- or comma-separated integers from a text file."""
    try:
        with open(path) as fh:
            raw = fh.read()
    except OSError as e:
        raise InputError(f"cannot read table file: {e}") from None
    out = []
    for tok in raw.replace(",", " ").split():
        try:
            out.append(int(tok))
        except ValueError:
            raise InputError(f"table entry {tok!r} is not an integer") from None
    if not out:
        raise InputError("table file holds no values")
    return out


# ----------------------------------------------------------- bundled inputs

def bundled_examples() -> dict:
    """Name -> description dict for the inputs shipped with the package."""
    out = {}
    root = resources.files("chainprofile.data")
    for item in sorted(root.iterdir(), key=lambda p: p.name):
        if item.name.endswith(".json"):
            out[item.name[:-5]] = json.loads(item.read_text())
    return out


def load_example(name: str, radius_override=None):
    examples = bundled_examples()
    if name not in examples:
        raise InputError(f"no bundled input named {name!r}; "
                         f"available: {', '.join(sorted(examples))}")
    return load_input(examples[name], radius_override=radius_override)
