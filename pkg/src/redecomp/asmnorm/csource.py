"""C source canonicalization.

Reformats a single-function C source into one fixed layout so that corpus
entries, golden files, and hashes never depend on the author's whitespace.
The layout contract (documented here, frozen by golden files):

* include directives removed; other preprocessor lines kept, column 0
* comments dropped
* the single top-level function renamed to ``func0``
* 4-space indentation, one statement per line
* ``{`` stays at the end of its opening line; ``}`` gets its own line
  (a following ``;`` or ``else`` attaches to it)
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..errors import MultipleFunctions, NoFunctionFound, ParseFailure

_KEYWORDS_SPACE_PAREN = {
    "if", "else", "for", "while", "do", "switch", "return", "case", "sizeof",
}

# Multi-character operators, longest first.
_OPERATORS = [
    "<<=", ">>=", "...", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=",
    "&&", "||", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=",
]

_TOKEN_RE = re.compile(
    r"""
    (?P<comment>//[^\n]*|/\*.*?\*/)
  | (?P<string>"(?:\\.|[^"\\])*")
  | (?P<char>'(?:\\.|[^'\\])*')
  | (?P<number>(?:0[xX][0-9A-Fa-f]+|\d+\.?\d*(?:[eE][+-]?\d+)?)[uUlLfF]*)
  | (?P<ident>[A-Za-z_]\w*)
  | (?P<op>""" + "|".join(re.escape(op) for op in _OPERATORS) + r""")
  | (?P<punct>[{}()\[\];,.:?~!%^&*\-+=<>|/])
  | (?P<ws>\s+)
  | (?P<bad>.)
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass(frozen=True)
class CanonicalSource:
    """Reformatted single-function C source."""

    func_name: str
    body: str
    original_name: str


def tokenize(src: str) -> list[str]:
    """Permissive C token stream; comments dropped, preprocessor lines kept
    as single tokens prefixed with '#'."""
    tokens: list[str] = []
    # Fold line continuations so a directive is one logical line.
    src = src.replace("\\\n", " ")
    for line_or_code in _split_preprocessor(src):
        if line_or_code.startswith("#"):
            tokens.append(" ".join(line_or_code.split()))
            continue
        for m in _TOKEN_RE.finditer(line_or_code):
            kind = m.lastgroup
            if kind in ("ws", "comment"):
                continue
            if kind == "bad":
                raise ParseFailure(f"unexpected character {m.group(0)!r}")
            tokens.append(m.group(0))
    return tokens


def _split_preprocessor(src: str) -> list[str]:
    """Split source into alternating code chunks and '#' directive lines."""
    parts: list[str] = []
    code: list[str] = []
    for line in src.splitlines():
        if line.lstrip().startswith("#"):
            if code:
                parts.append("\n".join(code))
                code = []
            parts.append(line.strip())
        else:
            code.append(line)
    if code:
        parts.append("\n".join(code))
    return parts


def _find_functions(tokens: list[str]) -> list[tuple[int, str]]:
    """(body-open index, name) of each top-level function definition."""
    functions: list[tuple[int, str]] = []
    depth = 0
    for i, tok in enumerate(tokens):
        if tok.startswith("#"):
            continue
        if tok == "{":
            if depth == 0:
                j = i - 1
                while j >= 0 and tokens[j].startswith("#"):
                    j -= 1
                if j >= 0 and tokens[j] == ")":
                    name = _name_before_params(tokens, j)
                    if name is not None:
                        functions.append((i, name))
            depth += 1
        elif tok == "}":
            depth -= 1
    return functions


def _name_before_params(tokens: list[str], close_paren: int) -> str | None:
    depth = 0
    j = close_paren
    while j >= 0:
        if tokens[j] == ")":
            depth += 1
        elif tokens[j] == "(":
            depth -= 1
            if depth == 0:
                break
        j -= 1
    j -= 1
    while j >= 0 and tokens[j].startswith("#"):
        j -= 1
    if j >= 0 and re.match(r"^[A-Za-z_]\w*$", tokens[j]) and tokens[j] not in _KEYWORDS_SPACE_PAREN:
        return tokens[j]
    return None


_TIGHT_BEFORE = {";", ",", ")", "]", "++", "--"}
_TIGHT_AFTER = {"(", "[", "!", "~", "++", "--"}
_UNARY_CONTEXT = {
    "(", "[", ",", ";", "{", "}", "=", "return", "case",
    "+", "-", "*", "/", "%", "<", ">", "&", "|", "^", "?", ":",
    "<<", ">>", "<=", ">=", "==", "!=", "&&", "||",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<=", ">>=", "!", "~",
}
_UNARY_OPS = {"-", "+", "*", "&", "!", "~"}


def _join_tokens(tokens: list[str]) -> str:
    """Render one statement's tokens with canonical spacing."""
    out: list[str] = []
    prev = ""
    prev2 = ""
    for tok in tokens:
        space = True
        if not out:
            space = False
        elif tok in _TIGHT_BEFORE:
            space = False
            if tok in ("++", "--") and not (
                re.match(r"^[A-Za-z_0-9]", prev) or prev in (")", "]")
            ):
                space = True
        elif prev in ("++", "--"):
            # prefix ++/-- binds to an operand, postfix separates
            space = re.match(r"^[A-Za-z_0-9(]", tok) is None
        elif prev in ("(", "[", "!", "~"):
            space = False
        elif tok == "(":
            space = not (
                (re.match(r"^[A-Za-z_]\w*$", prev) and prev not in _KEYWORDS_SPACE_PAREN)
                or prev in (")", "]")
            )
        elif tok == "[":
            space = not (re.match(r"^[A-Za-z_0-9]", prev) or prev in (")", "]"))
        elif tok in (".", "->") or prev in (".", "->"):
            space = False
        elif prev in _UNARY_OPS and (prev2 in _UNARY_CONTEXT or prev2 == ""):
            space = False
        out.append((" " if space else "") + tok)
        prev2 = prev
        prev = tok
    return "".join(out)


def _render(tokens: list[str]) -> str:
    """Token stream to canonical text: statement-per-line, 4-space indent."""
    lines: list[str] = []
    current: list[str] = []
    depth = 0
    paren = 0

    def flush(extra_indent: int = 0):
        nonlocal current
        if current:
            lines.append("    " * (depth + extra_indent) + _join_tokens(current))
            current = []

    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if tok.startswith("#"):
            flush()
            lines.append(tok)
        elif tok == "{":
            current.append(tok)
            flush()
            depth += 1
        elif tok == "}":
            flush()
            depth -= 1
            closer = [tok]
            # "};" and "} else" attach to the brace line.
            if i + 1 < len(tokens) and tokens[i + 1] == ";":
                closer.append(";")
                i += 1
            current = closer
            if i + 1 < len(tokens) and tokens[i + 1] == "else":
                pass  # let "else" start on the brace line
            else:
                flush()
        elif tok == ";" and paren == 0:
            current.append(tok)
            flush()
        else:
            if tok == "(":
                paren += 1
            elif tok == ")":
                paren = max(0, paren - 1)
            current.append(tok)
        i += 1
    flush()
    return "\n".join(lines) + "\n"


def canonicalize_source(src: str) -> CanonicalSource:
    """Canonicalize a single-function C source.

    Removes ``#include`` lines, renames the function to ``func0`` (recording
    the original name), and reformats. Idempotent: canonicalizing the output
    reproduces it byte-for-byte.
    """
    tokens = tokenize(src)
    tokens = [t for t in tokens if not re.match(r"^#\s*include\b", t)]
    functions = _find_functions(tokens)
    if not functions:
        raise NoFunctionFound("no top-level function definition")
    if len(functions) > 1:
        names = ", ".join(name for _, name in functions)
        raise MultipleFunctions(f"expected one function, found: {names}")
    original_name = functions[0][1]
    tokens = ["func0" if t == original_name else t for t in tokens]
    body = _render(tokens)
    return CanonicalSource(func_name="func0", body=body, original_name=original_name)
