"""Assembly text normalization.

Turns raw compiler-emitted listings into the canonical text form used for
embedding, retrieval, and prompting. The transform is pure text: comments
and register prefixes go away, punctuation is uniformly spaced, hex
constants become decimal, and instruction-address labels become symbolic
``[INST-k]`` placeholders. Applying it to its own output is a no-op.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum

from ..errors import EmptyInput, MalformedLabel, SymbolNotFound


class OptLevel(str, Enum):
    O0 = "O0"
    O1 = "O1"
    O2 = "O2"
    O3 = "O3"


@dataclass(frozen=True)
class RawAssemblyUnit:
    """One function's slice of a compiler-emitted listing."""

    origin_path: str
    compiler_id: str
    opt_level: OptLevel
    text: str

    def __post_init__(self):
        if not self.text:
            raise EmptyInput("assembly unit has empty text")


@dataclass(frozen=True)
class NormalizedAsm:
    """Normalized assembly body plus the label → placeholder record.

    ``placeholder_map`` pairs each original address label (as it appeared
    when placeholders were assigned) with its ``[INST-k]`` token, in index
    order.
    """

    func_name: str
    body: str
    placeholder_map: tuple[tuple[str, str], ...] = field(default_factory=tuple)


# Comment syntax: GAS for x86 across GCC/Clang. "#" and ";" cut to end of
# line (outside double-quoted strings); "/* ... */" blocks may span lines.
_BLOCK_COMMENT = re.compile(r"/\*.*?\*/", re.DOTALL)
_OPEN_BLOCK = re.compile(r"/\*.*$", re.DOTALL)

# A placeholder token; spacing and label passes treat it as atomic.
_PLACEHOLDER = re.compile(r"\[INST-\d+\]")

# Punctuation tokens that get single spaces on both sides.
_PUNCT = re.compile(r"\s*([,()\[\]:])\s*")

# Standalone hex integer literal; never part of an identifier ("$0x10"
# immediates do convert, "sym_0x10" does not).
_HEX_LITERAL = re.compile(r"(?<![\w.])0[xX][0-9A-Fa-f]+(?![\w$.])")

# Hex-looking label tokens. Digit-leading ones are always instruction
# addresses (symbols cannot start with a digit); letter-leading ones
# ("b:", "fa:") count as addresses only when the listing also defines a
# digit-leading address label, which distinguishes objdump-style dumps
# from symbols that merely look hexadecimal ("face:").
_HEX_TOKEN = re.compile(r"^[0-9A-Fa-f]+$")
_DIGIT_LEADING = re.compile(r"^[0-9][0-9A-Fa-f]*$")
_LABEL_DEF = re.compile(r"^\s*(\S+)\s*:")
_NAMED_LOCAL = re.compile(r"\.L[A-Za-z0-9_.]+")


def _strip_comments(text: str) -> str:
    text = _BLOCK_COMMENT.sub(" ", text)
    text = _OPEN_BLOCK.sub(" ", text)  # unterminated block runs to EOF
    out_lines = []
    for line in text.splitlines():
        cut = len(line)
        in_string = False
        for i, ch in enumerate(line):
            if ch == '"':
                in_string = not in_string
            elif ch in "#;" and not in_string:
                cut = i
                break
        out_lines.append(line[:cut])
    return "\n".join(out_lines)


def _space_punctuation(line: str) -> str:
    # Placeholders contain brackets; keep them atomic.
    parts = _PLACEHOLDER.split(line)
    tokens = _PLACEHOLDER.findall(line)
    spaced = [_PUNCT.sub(r" \1 ", p) for p in parts]
    out = spaced[0]
    for tok, part in zip(tokens, spaced[1:]):
        out += tok + part
    return out


def _hex_to_decimal(line: str) -> str:
    return _HEX_LITERAL.sub(lambda m: str(int(m.group(0), 16)), line)


def _assign_placeholders(lines: list[str]) -> tuple[list[str], tuple[tuple[str, str], ...]]:
    """Replace address labels with ``[INST-k]`` in first-occurrence order.

    Handles three token kinds: existing placeholders (renumbered, identity
    on a previously normalized body), numeric label definitions, and bare
    references to a defined numeric label (with optional GAS b/f suffix).
    Named ``.L`` labels are renumbered deterministically but kept symbolic.
    """
    hex_labels: list[str] = []
    for line in lines:
        m = _LABEL_DEF.match(line)
        if m:
            tok = m.group(1)
            if _PLACEHOLDER.fullmatch(tok):
                continue
            if tok[0].isdigit() and not _DIGIT_LEADING.match(tok):
                raise MalformedLabel(f"cannot parse address label: {tok!r}")
            if _HEX_TOKEN.match(tok):
                hex_labels.append(tok)
    if any(_DIGIT_LEADING.match(t) for t in hex_labels):
        defined = set(hex_labels)
    else:
        defined = {t for t in hex_labels if _DIGIT_LEADING.match(t)}

    order: dict[str, str] = {}

    def placeholder_for(original: str) -> str:
        if original not in order:
            order[original] = f"[INST-{len(order) + 1}]"
        return order[original]

    # Bare hex-looking tokens; "-8 (" / "8 (" displacements and "$8"
    # immediates are excluded so only address-like references rewrite.
    token_re = re.compile(
        r"\[INST-\d+\]|(?<![-\w$.\[])[0-9A-Fa-f]+(?![\w\]])(?!\s*\()"
    )
    leading_label_re = re.compile(r"^(\s*)(\[INST-\d+\]|\S+)(\s*:)")

    def sub_token(m: re.Match) -> str:
        tok = m.group(0)
        if tok.startswith("[INST-") or tok in defined:
            return placeholder_for(tok)
        return tok

    def rewrite(line: str) -> str:
        head = ""
        rest = line
        m = leading_label_re.match(line)
        if m:
            tok = m.group(2)
            if _PLACEHOLDER.fullmatch(tok) or tok in defined:
                head = m.group(1) + placeholder_for(tok) + m.group(3)
                rest = line[m.end() :]
        # directive operands (.p2align 4, .long 1234) are not addresses
        first = rest.split(None, 1)[0] if rest.split() else ""
        if first.startswith("."):
            return head + rest
        return head + token_re.sub(sub_token, rest)

    rewritten = [rewrite(line) for line in lines]

    # Renumber named local labels (.L...) in first-occurrence order.
    named: dict[str, str] = {}
    body = "\n".join(rewritten)
    for m in _NAMED_LOCAL.finditer(body):
        if m.group(0) not in named:
            named[m.group(0)] = f"\x00L{len(named) + 1}\x00"
    for old, tmp in named.items():
        body = body.replace(old, tmp)
    for old, tmp in named.items():
        body = body.replace(tmp, ".L" + tmp[2:-1])
    rewritten = body.split("\n")

    return rewritten, tuple(order.items())


def normalize_asm(raw: RawAssemblyUnit) -> NormalizedAsm:
    """Normalize one assembly function through the six fixed steps.

    Order: comment strip, "%" removal, punctuation spacing, hex-to-decimal,
    address-label placeholders, whitespace collapse. Line structure is
    preserved (whitespace collapse is horizontal; blank lines drop out) so
    instruction boundaries survive for downstream tokenization.
    """
    text = _strip_comments(raw.text)
    text = text.replace("%", "")
    lines = [_space_punctuation(ln) for ln in text.splitlines()]
    lines = [_hex_to_decimal(ln) for ln in lines]
    lines, placeholder_map = _assign_placeholders(lines)
    lines = [" ".join(ln.split()) for ln in lines]
    lines = [ln for ln in lines if ln]
    if not any(_is_instruction_line(ln) for ln in lines):
        raise EmptyInput("no instruction lines after normalization")
    return NormalizedAsm(func_name="func0", body="\n".join(lines), placeholder_map=placeholder_map)


def _is_instruction_line(line: str) -> bool:
    """True for lines carrying an instruction (not directive/label/blank)."""
    stripped = line.strip()
    if not stripped:
        return False
    tokens = stripped.split()
    # Skip leading label tokens ("foo :", "[INST-1] :", "foo:").
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok.endswith(":") and len(tok) > 1:
            i += 1
            continue
        if i + 1 < len(tokens) and tokens[i + 1] == ":":
            i += 2
            continue
        if tok == ":":
            i += 1
            continue
        break
    if i >= len(tokens):
        return False
    first = tokens[i]
    if first.startswith("."):
        return False
    if first.startswith("[INST-"):
        return False
    return bool(re.match(r"^[A-Za-z]", first))


_FUNC_LABEL = re.compile(r"^([A-Za-z_$][\w$.]*):\s*$")


def instruction_lines(listing: str) -> list[str]:
    """Raw instruction lines of a listing, for slicing-partition checks."""
    return [ln for ln in listing.splitlines() if _is_instruction_line(ln)]


def slice_functions(
    listing: str,
    symbols: list[str],
    *,
    origin_path: str = "<listing>",
    compiler_id: str = "gcc",
    opt_level: OptLevel = OptLevel.O0,
) -> tuple[list[RawAssemblyUnit], list[SymbolNotFound]]:
    """Cut a whole-file emission into per-function units.

    Each unit spans from the symbol's label line to the next non-local
    function label (or end of file). The symbol is rewritten to ``func0``
    inside its slice. Missing symbols are reported, not fatal.
    """
    if not symbols:
        raise EmptyInput("no symbols requested")
    lines = listing.splitlines()
    label_positions: dict[str, int] = {}
    boundaries: list[int] = []
    for i, line in enumerate(lines):
        m = _FUNC_LABEL.match(line.strip())
        if m and not m.group(1).startswith(".L"):
            label_positions.setdefault(m.group(1), i)
            boundaries.append(i)

    units: list[RawAssemblyUnit] = []
    missing: list[SymbolNotFound] = []
    for sym in symbols:
        if sym not in label_positions:
            missing.append(SymbolNotFound(sym))
            continue
        start = label_positions[sym]
        later = [b for b in boundaries if b > start]
        end = later[0] if later else len(lines)
        body = "\n".join(lines[start:end])
        body = re.sub(rf"\b{re.escape(sym)}\b", "func0", body)
        units.append(
            RawAssemblyUnit(
                origin_path=origin_path,
                compiler_id=compiler_id,
                opt_level=opt_level,
                text=body,
            )
        )
    return units, missing
