"""Reference PDF-object grammar: tokenizer, AST, instrumented parser, host files.

The parser here is the well-formedness oracle for everything else in the
package.  It accepts a strict-but-reasonable subset of the PDF object
grammar (no streams, no exponents in reals) and never raises on arbitrary
input: ``parse_object`` always returns a :class:`ParseOutcome`, with a hard
recursion-depth limit and token budget so it terminates on any byte string.

Every grammar-rule entry, token-class branch and error branch is tagged
with a statically numbered coverage point.  Coverage is collected per call
and returned in the outcome; there are no global counters, so concurrent
calls are safe and set unions are done by the caller.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

DEPTH_LIMIT = 64
TOKEN_BUDGET = 10**6

WHITESPACE = "\x00\t\n\x0c\r "
DELIMITERS = "()<>[]{}/%"

PASS_RATE_ERROR_PREFIX = "PARSE-ERROR:"


# ---------------------------------------------------------------------------
# Coverage points
# ---------------------------------------------------------------------------

_POINT_LABELS: dict[tuple[str, int], str] = {}
_UNIT_COUNTERS: dict[str, int] = {}


def _point(unit: str, label: str) -> tuple[str, int]:
    """Register a statically numbered coverage point (declaration order is the id)."""
    pid = _UNIT_COUNTERS.get(unit, 0)
    _UNIT_COUNTERS[unit] = pid + 1
    key = (unit, pid)
    _POINT_LABELS[key] = label
    return key


def point_label(point: tuple[str, int]) -> str:
    return _POINT_LABELS[point]


def all_points() -> dict[tuple[str, int], str]:
    """Full static point table: (unit, id) -> label."""
    return dict(_POINT_LABELS)


class CoverageSet:
    """A set of (unit_name, point_id) pairs hit during one parser call."""

    __slots__ = ("points",)

    def __init__(self, points: Optional[set[tuple[str, int]]] = None):
        self.points: set[tuple[str, int]] = set(points) if points else set()

    def hit(self, point: tuple[str, int]) -> None:
        self.points.add(point)

    def union(self, other: "CoverageSet") -> "CoverageSet":
        return CoverageSet(self.points | other.points)

    def __len__(self) -> int:
        return len(self.points)

    def __eq__(self, other) -> bool:
        return isinstance(other, CoverageSet) and self.points == other.points

    def __repr__(self) -> str:
        return f"CoverageSet({len(self.points)} points)"

    def sorted_points(self) -> list[tuple[str, int]]:
        return sorted(self.points)


def coverage_union(sets: list[CoverageSet]) -> CoverageSet:
    out: set[tuple[str, int]] = set()
    for s in sets:
        out |= s.points
    return CoverageSet(out)


# Lexer token-class and error branches.
LEX_WS = _point("lex", "whitespace-run")
LEX_COMMENT = _point("lex", "comment")
LEX_INT = _point("lex", "number-int")
LEX_REAL = _point("lex", "number-real")
LEX_SIGNED = _point("lex", "number-signed")
LEX_REAL_BARE_DOT_TAIL = _point("lex", "number-trailing-dot")
LEX_NAME = _point("lex", "name")
LEX_NAME_EMPTY = _point("lex", "name-empty")
LEX_NAME_HASH = _point("lex", "name-hash-escape")
LEX_STRING = _point("lex", "literal-string")
LEX_STRING_NESTED = _point("lex", "literal-string-nested-paren")
LEX_STRING_ESC_SIMPLE = _point("lex", "literal-string-escape-simple")
LEX_STRING_ESC_OCTAL = _point("lex", "literal-string-escape-octal")
LEX_STRING_ESC_EOL = _point("lex", "literal-string-escape-eol")
LEX_STRING_ESC_OTHER = _point("lex", "literal-string-escape-ignored")
LEX_HEX = _point("lex", "hex-string")
LEX_HEX_ODD = _point("lex", "hex-string-odd-digits")
LEX_HEX_WS = _point("lex", "hex-string-ws-skip")
LEX_DICT_OPEN = _point("lex", "dict-open")
LEX_DICT_CLOSE = _point("lex", "dict-close")
LEX_ARRAY_OPEN = _point("lex", "array-open")
LEX_ARRAY_CLOSE = _point("lex", "array-close")
LEX_KW_OBJ = _point("lex", "keyword-obj")
LEX_KW_ENDOBJ = _point("lex", "keyword-endobj")
LEX_KW_R = _point("lex", "keyword-R")
LEX_KW_TRUE = _point("lex", "keyword-true")
LEX_KW_FALSE = _point("lex", "keyword-false")
LEX_KW_NULL = _point("lex", "keyword-null")
LEX_ERR_UNTERM_STRING = _point("lex", "err-unterminated-string")
LEX_ERR_UNTERM_HEX = _point("lex", "err-unterminated-hex")
LEX_ERR_BAD_HEX = _point("lex", "err-bad-hex-digit")
LEX_ERR_BARE_DELIM = _point("lex", "err-bare-delimiter")
LEX_ERR_UNKNOWN_KW = _point("lex", "err-unknown-keyword")
LEX_ERR_BAD_NAME_ESC = _point("lex", "err-bad-name-escape")
LEX_ERR_NUM_MALFORMED = _point("lex", "err-number-malformed")
LEX_ERR_NUM_RANGE = _point("lex", "err-number-out-of-range")
LEX_ERR_STRAY_CHAR = _point("lex", "err-stray-char")

# Object-parser grammar-rule and error branches.
OBJ_ENTRY = _point("object", "parse-entry")
OBJ_ID_LINE = _point("object", "id-line")
OBJ_BARE_OBJ = _point("object", "bare-obj-keyword")
OBJ_VALUE_BOOL_TRUE = _point("object", "value-true")
OBJ_VALUE_BOOL_FALSE = _point("object", "value-false")
OBJ_VALUE_NULL = _point("object", "value-null")
OBJ_VALUE_INT = _point("object", "value-int")
OBJ_VALUE_REAL = _point("object", "value-real")
OBJ_VALUE_STRING = _point("object", "value-literal-string")
OBJ_VALUE_HEX = _point("object", "value-hex-string")
OBJ_VALUE_NAME = _point("object", "value-name")
OBJ_VALUE_REF = _point("object", "value-ref")
OBJ_ARRAY_ENTRY = _point("object", "array-entry")
OBJ_ARRAY_EMPTY = _point("object", "array-empty")
OBJ_ARRAY_ITEM = _point("object", "array-item")
OBJ_DICT_ENTRY = _point("object", "dict-entry")
OBJ_DICT_EMPTY = _point("object", "dict-empty")
OBJ_DICT_PAIR = _point("object", "dict-pair")
OBJ_DICT_DUP_KEY = _point("object", "dict-duplicate-key")
OBJ_NEST_DEEP = _point("object", "nesting-depth-over-8")
OBJ_PASS = _point("object", "pass")
OBJ_ERR_LEX = _point("object", "err-lex")
OBJ_ERR_MISSING_OBJ = _point("object", "err-missing-obj-keyword")
OBJ_ERR_MISSING_ENDOBJ = _point("object", "err-missing-endobj")
OBJ_ERR_BAD_DICT_KEY = _point("object", "err-bad-dict-key")
OBJ_ERR_UNBALANCED = _point("object", "err-unbalanced-delimiter")
OBJ_ERR_DEPTH = _point("object", "err-depth-exceeded")
OBJ_ERR_BUDGET = _point("object", "err-token-budget-exceeded")
OBJ_ERR_TRAILING = _point("object", "err-trailing-garbage")
OBJ_ERR_BAD_VALUE = _point("object", "err-bad-value")
OBJ_ERR_BAD_ID = _point("object", "err-bad-id-line")

# Host structural-parser branches.
HOST_ENTRY = _point("host", "parse-entry")
HOST_SINGLE_BODY = _point("host", "single-body")
HOST_PREV_CHAIN = _point("host", "prev-chain")
HOST_PREV_CHAIN_DEEP = _point("host", "prev-chain-depth-2plus")
HOST_XREF_SINGLE_SUB = _point("host", "xref-single-subsection")
HOST_XREF_MULTI_SUB = _point("host", "xref-multi-subsection")
HOST_ENTRY_IN_USE = _point("host", "xref-entry-in-use")
HOST_ENTRY_IN_USE_GEN = _point("host", "xref-entry-in-use-gen-positive")
HOST_ENTRY_FREE_HEAD = _point("host", "xref-entry-free-65535")
HOST_ENTRY_FREE = _point("host", "xref-entry-free-other")
HOST_TRAILER_INFO = _point("host", "trailer-info-present")
HOST_TRAILER_NO_INFO = _point("host", "trailer-info-absent")
HOST_TRAILER_ROOT = _point("host", "trailer-root-present")


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Boolean:
    value: bool


@dataclass(frozen=True)
class Number:
    value: Union[int, float]


@dataclass(frozen=True)
class LiteralString:
    text: str


@dataclass(frozen=True)
class HexString:
    data: bytes


@dataclass(frozen=True)
class Name:
    text: str


@dataclass(frozen=True)
class Ref:
    object_id: int
    generation: int


@dataclass(frozen=True)
class Null:
    pass


@dataclass
class Array:
    items: list["PdfValue"]

    def __eq__(self, other):
        return isinstance(other, Array) and self.items == other.items


@dataclass
class Dictionary:
    entries: dict[str, "PdfValue"]

    def __eq__(self, other):
        return isinstance(other, Dictionary) and self.entries == other.entries


PdfValue = Union[Boolean, Number, LiteralString, HexString, Name, Ref, Null, Array, Dictionary]


_NAME_REGULAR = set(
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789"
    "!\"$&'*+,-.:;=?@\\^_`|~"
)


def serialize_value(value: PdfValue) -> str:
    """Canonical text for an AST node; parsing it back yields an equal AST."""
    if isinstance(value, Boolean):
        return "true" if value.value else "false"
    if isinstance(value, Null):
        return "null"
    if isinstance(value, Number):
        return _format_number(value.value)
    if isinstance(value, LiteralString):
        return "(" + _escape_string(value.text) + ")"
    if isinstance(value, HexString):
        return "<" + value.data.hex().upper() + ">"
    if isinstance(value, Name):
        return "/" + _escape_name(value.text)
    if isinstance(value, Ref):
        return f"{value.object_id} {value.generation} R"
    if isinstance(value, Array):
        return "[" + " ".join(serialize_value(v) for v in value.items) + "]"
    if isinstance(value, Dictionary):
        parts = []
        for k, v in value.entries.items():
            parts.append("/" + _escape_name(k) + " " + serialize_value(v))
        return "<< " + " ".join(parts) + " >>"
    raise TypeError(f"not a PdfValue: {value!r}")


def _format_number(v: Union[int, float]) -> str:
    if isinstance(v, bool):  # bool is an int subclass; reject silently miscoding
        raise TypeError("Boolean is a separate node")
    if isinstance(v, int):
        return str(v)
    # Fixed-point only: the grammar has no exponent form.  format(x, "f")
    # prints the exact decimal value of the double, so reparsing is lossless.
    s = format(v, "f")
    if "." in s:
        s = s.rstrip("0")
        if s.endswith("."):
            s += "0"
    return s


def _escape_string(text: str) -> str:
    out = []
    for ch in text:
        if ch in "()\\":
            out.append("\\" + ch)
        elif 32 <= ord(ch) <= 126:
            out.append(ch)
        else:
            out.append("\\%03o" % ord(ch))
    return "".join(out)


def _escape_name(text: str) -> str:
    out = []
    for ch in text:
        if ch in _NAME_REGULAR and ch != "#" and ch != "\\":
            out.append(ch)
        else:
            out.append("#%02X" % ord(ch))
    return "".join(out)


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------

class LexicalError(Exception):
    def __init__(self, message: str, offset: int, point: tuple[str, int]):
        super().__init__(message)
        self.message = message
        self.offset = offset
        self.point = point


@dataclass(frozen=True)
class Token:
    kind: str  # number | string | hexstring | name | keyword | dict-open | dict-close | array-open | array-close
    value: object
    offset: int
    lexeme: str = ""


_KEYWORD_POINTS = {
    "obj": LEX_KW_OBJ,
    "endobj": LEX_KW_ENDOBJ,
    "R": LEX_KW_R,
    "true": LEX_KW_TRUE,
    "false": LEX_KW_FALSE,
    "null": LEX_KW_NULL,
}

_HEX_DIGITS = set("0123456789abcdefABCDEF")


def tokenize(text: str) -> list[Token]:
    """PDF lexical scan.  Raises LexicalError (with offset) on bad input."""
    cov = CoverageSet()
    return _tokenize(text, cov)


def _tokenize(text: str, cov: CoverageSet) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in WHITESPACE:
            cov.hit(LEX_WS)
            i += 1
            continue
        if ch == "%":
            cov.hit(LEX_COMMENT)
            while i < n and text[i] not in "\r\n":
                i += 1
            continue
        if ch == "/":
            tokens.append(_lex_name(text, i, cov))
            i = tokens[-1].offset + len(tokens[-1].lexeme)
            continue
        if ch == "(":
            tokens.append(_lex_string(text, i, cov))
            i = tokens[-1].offset + len(tokens[-1].lexeme)
            continue
        if ch == "<":
            if i + 1 < n and text[i + 1] == "<":
                cov.hit(LEX_DICT_OPEN)
                tokens.append(Token("dict-open", None, i, "<<"))
                i += 2
                continue
            tokens.append(_lex_hex(text, i, cov))
            i = tokens[-1].offset + len(tokens[-1].lexeme)
            continue
        if ch == ">":
            if i + 1 < n and text[i + 1] == ">":
                cov.hit(LEX_DICT_CLOSE)
                tokens.append(Token("dict-close", None, i, ">>"))
                i += 2
                continue
            cov.hit(LEX_ERR_BARE_DELIM)
            raise LexicalError("bare '>' outside hex string or '>>'", i, LEX_ERR_BARE_DELIM)
        if ch == "[":
            cov.hit(LEX_ARRAY_OPEN)
            tokens.append(Token("array-open", None, i, "["))
            i += 1
            continue
        if ch == "]":
            cov.hit(LEX_ARRAY_CLOSE)
            tokens.append(Token("array-close", None, i, "]"))
            i += 1
            continue
        if ch in "{})":
            cov.hit(LEX_ERR_BARE_DELIM)
            raise LexicalError(f"bare delimiter {ch!r}", i, LEX_ERR_BARE_DELIM)
        if ch.isdigit() or ch in "+-":
            tokens.append(_lex_number(text, i, cov))
            i = tokens[-1].offset + len(tokens[-1].lexeme)
            continue
        if ch.isalpha():
            j = i
            while j < n and text[j].isalpha():
                j += 1
            word = text[i:j]
            pt = _KEYWORD_POINTS.get(word)
            if pt is None:
                cov.hit(LEX_ERR_UNKNOWN_KW)
                raise LexicalError(f"unknown keyword {word!r}", i, LEX_ERR_UNKNOWN_KW)
            cov.hit(pt)
            tokens.append(Token("keyword", word, i, word))
            i = j
            continue
        cov.hit(LEX_ERR_STRAY_CHAR)
        raise LexicalError(f"unexpected character {ch!r}", i, LEX_ERR_STRAY_CHAR)
    return tokens


def _lex_number(text: str, start: int, cov: CoverageSet) -> Token:
    i = start
    n = len(text)
    if text[i] in "+-":
        cov.hit(LEX_SIGNED)
        i += 1
    digits_start = i
    while i < n and text[i].isdigit():
        i += 1
    if i == digits_start:
        cov.hit(LEX_ERR_NUM_MALFORMED)
        raise LexicalError("sign without digits", start, LEX_ERR_NUM_MALFORMED)
    is_real = False
    if i < n and text[i] == ".":
        is_real = True
        i += 1
        frac_start = i
        while i < n and text[i].isdigit():
            i += 1
        if i == frac_start:
            cov.hit(LEX_REAL_BARE_DOT_TAIL)
    lexeme = text[start:i]
    if is_real:
        cov.hit(LEX_REAL)
        value: Union[int, float] = float(lexeme)
        if value in (float("inf"), float("-inf")):
            cov.hit(LEX_ERR_NUM_RANGE)
            raise LexicalError(f"real out of range: {lexeme[:32]}...", start, LEX_ERR_NUM_RANGE)
    else:
        cov.hit(LEX_INT)
        value = int(lexeme)
    return Token("number", value, start, lexeme)


def _lex_name(text: str, start: int, cov: CoverageSet) -> Token:
    cov.hit(LEX_NAME)
    i = start + 1
    n = len(text)
    out = []
    while i < n:
        ch = text[i]
        if ch in WHITESPACE or ch in DELIMITERS:
            break
        if ch == "#":
            if i + 2 < n and text[i + 1] in _HEX_DIGITS and text[i + 2] in _HEX_DIGITS:
                cov.hit(LEX_NAME_HASH)
                out.append(chr(int(text[i + 1:i + 3], 16)))
                i += 3
                continue
            cov.hit(LEX_ERR_BAD_NAME_ESC)
            raise LexicalError("'#' not followed by two hex digits", i, LEX_ERR_BAD_NAME_ESC)
        out.append(ch)
        i += 1
    if i == start + 1:
        cov.hit(LEX_NAME_EMPTY)
    return Token("name", "".join(out), start, text[start:i])


def _lex_string(text: str, start: int, cov: CoverageSet) -> Token:
    cov.hit(LEX_STRING)
    i = start + 1
    n = len(text)
    depth = 1
    out = []
    while i < n:
        ch = text[i]
        if ch == "\\":
            if i + 1 >= n:
                break
            esc = text[i + 1]
            if esc == "n":
                out.append("\n")
            elif esc == "r":
                out.append("\r")
            elif esc == "t":
                out.append("\t")
            elif esc == "b":
                out.append("\b")
            elif esc == "f":
                out.append("\f")
            elif esc in "()\\":
                out.append(esc)
            elif esc in "01234567":
                cov.hit(LEX_STRING_ESC_OCTAL)
                j = i + 1
                oct_digits = ""
                while j < n and len(oct_digits) < 3 and text[j] in "01234567":
                    oct_digits += text[j]
                    j += 1
                out.append(chr(int(oct_digits, 8) & 0xFF))
                i = j
                continue
            elif esc in "\r\n":
                cov.hit(LEX_STRING_ESC_EOL)
                i += 2
                if esc == "\r" and i < n and text[i] == "\n":
                    i += 1
                continue
            else:
                cov.hit(LEX_STRING_ESC_OTHER)
                out.append(esc)
                i += 2
                continue
            cov.hit(LEX_STRING_ESC_SIMPLE)
            i += 2
            continue
        if ch == "(":
            cov.hit(LEX_STRING_NESTED)
            depth += 1
            out.append(ch)
            i += 1
            continue
        if ch == ")":
            depth -= 1
            if depth == 0:
                return Token("string", "".join(out), start, text[start:i + 1])
            out.append(ch)
            i += 1
            continue
        out.append(ch)
        i += 1
    cov.hit(LEX_ERR_UNTERM_STRING)
    raise LexicalError("unterminated literal string", start, LEX_ERR_UNTERM_STRING)


def _lex_hex(text: str, start: int, cov: CoverageSet) -> Token:
    cov.hit(LEX_HEX)
    i = start + 1
    n = len(text)
    digits = []
    while i < n:
        ch = text[i]
        if ch == ">":
            if len(digits) % 2 == 1:
                cov.hit(LEX_HEX_ODD)
                digits.append("0")
            data = bytes.fromhex("".join(digits))
            return Token("hexstring", data, start, text[start:i + 1])
        if ch in WHITESPACE:
            cov.hit(LEX_HEX_WS)
            i += 1
            continue
        if ch in _HEX_DIGITS:
            digits.append(ch)
            i += 1
            continue
        cov.hit(LEX_ERR_BAD_HEX)
        raise LexicalError(f"bad hex digit {ch!r}", i, LEX_ERR_BAD_HEX)
    cov.hit(LEX_ERR_UNTERM_HEX)
    raise LexicalError("unterminated hex string", start, LEX_ERR_UNTERM_HEX)


# ---------------------------------------------------------------------------
# Object parser
# ---------------------------------------------------------------------------

@dataclass
class ParseOutcome:
    status: str  # "pass" | "fail"
    value: Optional[PdfValue]
    coverage: CoverageSet
    error_code: Optional[str] = None
    message: Optional[str] = None
    byte_offset: Optional[int] = None
    object_id: Optional[int] = None
    generation: Optional[int] = None

    @property
    def passed(self) -> bool:
        return self.status == "pass"

    def error_line(self) -> str:
        """grep-compatible log line for failures."""
        if self.passed:
            return ""
        return f"{PASS_RATE_ERROR_PREFIX} {self.error_code} at {self.byte_offset}: {self.message}"


class _ParseFail(Exception):
    def __init__(self, code: str, message: str, offset: int, point: tuple[str, int]):
        super().__init__(message)
        self.code = code
        self.message = message
        self.offset = offset
        self.point = point


class _Cursor:
    __slots__ = ("tokens", "pos", "end_offset")

    def __init__(self, tokens: list[Token], end_offset: int):
        self.tokens = tokens
        self.pos = 0
        self.end_offset = end_offset

    def peek(self, ahead: int = 0) -> Optional[Token]:
        j = self.pos + ahead
        return self.tokens[j] if j < len(self.tokens) else None

    def next(self) -> Optional[Token]:
        t = self.peek()
        if t is not None:
            self.pos += 1
        return t

    def offset(self) -> int:
        t = self.peek()
        return t.offset if t is not None else self.end_offset


def parse_object(text: str, strict: bool = True) -> ParseOutcome:
    """Parse ``<id> <gen> obj <value> endobj`` (or bare ``obj ...`` if not strict).

    Total: returns a Fail outcome instead of raising, for any input text.
    """
    cov = CoverageSet()
    cov.hit(OBJ_ENTRY)
    try:
        tokens = _tokenize(text, cov)
    except LexicalError as e:
        cov.hit(OBJ_ERR_LEX)
        return ParseOutcome("fail", None, cov, "lex-error", e.message, e.offset)
    if len(tokens) > TOKEN_BUDGET:
        cov.hit(OBJ_ERR_BUDGET)
        return ParseOutcome("fail", None, cov, "token-budget-exceeded",
                            f"{len(tokens)} tokens", 0)
    cur = _Cursor(tokens, len(text))
    try:
        object_id, generation = _parse_id_line(cur, cov, strict)
        value = _parse_value(cur, cov, 0)
        tok = cur.next()
        if tok is None or tok.kind != "keyword" or tok.value != "endobj":
            cov.hit(OBJ_ERR_MISSING_ENDOBJ)
            off = tok.offset if tok is not None else cur.end_offset
            raise _ParseFail("missing-endobj", "expected 'endobj'", off, OBJ_ERR_MISSING_ENDOBJ)
        extra = cur.peek()
        if extra is not None:
            cov.hit(OBJ_ERR_TRAILING)
            raise _ParseFail("trailing-garbage", "content after 'endobj'",
                             extra.offset, OBJ_ERR_TRAILING)
    except _ParseFail as f:
        return ParseOutcome("fail", None, cov, f.code, f.message, f.offset)
    cov.hit(OBJ_PASS)
    return ParseOutcome("pass", value, cov, object_id=object_id, generation=generation)


def _parse_id_line(cur: _Cursor, cov: CoverageSet, strict: bool) -> tuple[Optional[int], Optional[int]]:
    tok = cur.peek()
    if tok is not None and tok.kind == "keyword" and tok.value == "obj":
        if strict:
            cov.hit(OBJ_ERR_MISSING_OBJ)
            raise _ParseFail("missing-obj-keyword", "object id line required in strict mode",
                             tok.offset, OBJ_ERR_MISSING_OBJ)
        cov.hit(OBJ_BARE_OBJ)
        cur.next()
        return None, None
    if tok is None or tok.kind != "number" or not isinstance(tok.value, int):
        cov.hit(OBJ_ERR_MISSING_OBJ)
        raise _ParseFail("missing-obj-keyword", "expected '<id> <gen> obj'",
                         cur.offset(), OBJ_ERR_MISSING_OBJ)
    gen_tok = cur.peek(1)
    obj_tok = cur.peek(2)
    if (gen_tok is None or gen_tok.kind != "number" or not isinstance(gen_tok.value, int)
            or obj_tok is None or obj_tok.kind != "keyword" or obj_tok.value != "obj"):
        cov.hit(OBJ_ERR_MISSING_OBJ)
        raise _ParseFail("missing-obj-keyword", "expected '<id> <gen> obj'",
                         cur.offset(), OBJ_ERR_MISSING_OBJ)
    if tok.value < 0 or gen_tok.value < 0:
        cov.hit(OBJ_ERR_BAD_ID)
        raise _ParseFail("bad-id-line", "object id and generation must be non-negative",
                         tok.offset, OBJ_ERR_BAD_ID)
    cov.hit(OBJ_ID_LINE)
    cur.next()
    cur.next()
    cur.next()
    return tok.value, gen_tok.value


def _parse_value(cur: _Cursor, cov: CoverageSet, depth: int) -> PdfValue:
    if depth > DEPTH_LIMIT:
        cov.hit(OBJ_ERR_DEPTH)
        raise _ParseFail("depth-exceeded", f"nesting deeper than {DEPTH_LIMIT}",
                         cur.offset(), OBJ_ERR_DEPTH)
    if depth > 8:
        cov.hit(OBJ_NEST_DEEP)
    tok = cur.next()
    if tok is None:
        cov.hit(OBJ_ERR_BAD_VALUE)
        raise _ParseFail("bad-value", "expected a value", cur.end_offset, OBJ_ERR_BAD_VALUE)
    if tok.kind == "number":
        return _parse_number_or_ref(tok, cur, cov)
    if tok.kind == "string":
        cov.hit(OBJ_VALUE_STRING)
        return LiteralString(tok.value)
    if tok.kind == "hexstring":
        cov.hit(OBJ_VALUE_HEX)
        return HexString(tok.value)
    if tok.kind == "name":
        cov.hit(OBJ_VALUE_NAME)
        return Name(tok.value)
    if tok.kind == "keyword":
        if tok.value == "true":
            cov.hit(OBJ_VALUE_BOOL_TRUE)
            return Boolean(True)
        if tok.value == "false":
            cov.hit(OBJ_VALUE_BOOL_FALSE)
            return Boolean(False)
        if tok.value == "null":
            cov.hit(OBJ_VALUE_NULL)
            return Null()
        cov.hit(OBJ_ERR_BAD_VALUE)
        raise _ParseFail("bad-value", f"keyword {tok.value!r} is not a value",
                         tok.offset, OBJ_ERR_BAD_VALUE)
    if tok.kind == "array-open":
        return _parse_array(tok, cur, cov, depth)
    if tok.kind == "dict-open":
        return _parse_dict(tok, cur, cov, depth)
    if tok.kind in ("array-close", "dict-close"):
        cov.hit(OBJ_ERR_UNBALANCED)
        raise _ParseFail("unbalanced-delimiter", f"unmatched {tok.lexeme!r}",
                         tok.offset, OBJ_ERR_UNBALANCED)
    cov.hit(OBJ_ERR_BAD_VALUE)
    raise _ParseFail("bad-value", f"unexpected token {tok.lexeme!r}", tok.offset, OBJ_ERR_BAD_VALUE)


def _parse_number_or_ref(tok: Token, cur: _Cursor, cov: CoverageSet) -> PdfValue:
    nxt = cur.peek(0)
    nxt2 = cur.peek(1)
    if (isinstance(tok.value, int) and tok.value >= 0
            and nxt is not None and nxt.kind == "number"
            and isinstance(nxt.value, int) and nxt.value >= 0
            and nxt2 is not None and nxt2.kind == "keyword" and nxt2.value == "R"):
        cov.hit(OBJ_VALUE_REF)
        cur.next()
        cur.next()
        return Ref(tok.value, nxt.value)
    if isinstance(tok.value, int):
        cov.hit(OBJ_VALUE_INT)
    else:
        cov.hit(OBJ_VALUE_REAL)
    return Number(tok.value)


def _parse_array(open_tok: Token, cur: _Cursor, cov: CoverageSet, depth: int) -> Array:
    cov.hit(OBJ_ARRAY_ENTRY)
    items: list[PdfValue] = []
    while True:
        tok = cur.peek()
        if tok is None:
            cov.hit(OBJ_ERR_UNBALANCED)
            raise _ParseFail("unbalanced-delimiter", "unclosed '['",
                             open_tok.offset, OBJ_ERR_UNBALANCED)
        if tok.kind == "array-close":
            cur.next()
            if not items:
                cov.hit(OBJ_ARRAY_EMPTY)
            return Array(items)
        if tok.kind == "keyword" and tok.value == "endobj":
            cov.hit(OBJ_ERR_UNBALANCED)
            raise _ParseFail("unbalanced-delimiter", "'endobj' inside '['",
                             tok.offset, OBJ_ERR_UNBALANCED)
        cov.hit(OBJ_ARRAY_ITEM)
        items.append(_parse_value(cur, cov, depth + 1))


def _parse_dict(open_tok: Token, cur: _Cursor, cov: CoverageSet, depth: int) -> Dictionary:
    cov.hit(OBJ_DICT_ENTRY)
    entries: dict[str, PdfValue] = {}
    while True:
        tok = cur.peek()
        if tok is None:
            cov.hit(OBJ_ERR_UNBALANCED)
            raise _ParseFail("unbalanced-delimiter", "unclosed '<<'",
                             open_tok.offset, OBJ_ERR_UNBALANCED)
        if tok.kind == "dict-close":
            cur.next()
            if not entries:
                cov.hit(OBJ_DICT_EMPTY)
            return Dictionary(entries)
        if tok.kind != "name":
            cov.hit(OBJ_ERR_BAD_DICT_KEY)
            raise _ParseFail("bad-dict-key", f"dictionary key must be a name, got {tok.lexeme!r}",
                             tok.offset, OBJ_ERR_BAD_DICT_KEY)
        cur.next()
        cov.hit(OBJ_DICT_PAIR)
        if tok.value in entries:
            cov.hit(OBJ_DICT_DUP_KEY)
        entries[tok.value] = _parse_value(cur, cov, depth + 1)


# ---------------------------------------------------------------------------
# Host structural parsing (xref / trailer / startxref)
# ---------------------------------------------------------------------------

class HostMalformedError(Exception):
    pass


@dataclass
class XrefTable:
    # subsections: list of (start_id, entries); entry = (offset_or_prev_free, generation, kind)
    subsections: list[tuple[int, list[tuple[int, int, str]]]]

    def entries_by_id(self) -> dict[int, tuple[int, int, str]]:
        out = {}
        for start, entries in self.subsections:
            for k, entry in enumerate(entries):
                out[start + k] = entry
        return out

    def serialize(self) -> str:
        lines = ["xref\n"]
        for start, entries in self.subsections:
            lines.append(f"{start} {len(entries)}\n")
            for offset, gen, kind in entries:
                lines.append(f"{offset:010d} {gen:05d} {kind}\r\n")
        return "".join(lines)

    def validate(self) -> None:
        for start, entries in self.subsections:
            if start < 0:
                raise HostMalformedError("negative subsection start")
            for k, (offset, gen, kind) in enumerate(entries):
                if kind not in ("n", "f"):
                    raise HostMalformedError(f"bad entry kind {kind!r}")
                if offset < 0 or gen < 0:
                    raise HostMalformedError("negative offset or generation")
                if start + k == 0 and (kind != "f" or gen != 65535):
                    raise HostMalformedError("entry 0 must be free with generation 65535")


@dataclass
class Trailer:
    dict: Dictionary
    startxref: int


@dataclass
class BodySection:
    xref_offset: int
    xref: XrefTable
    trailer: Trailer


@dataclass
class HostStructure:
    bodies: list[BodySection]  # in file order (oldest first)
    last_object_id: int
    coverage: CoverageSet

    @property
    def last_trailer(self) -> Trailer:
        return self.bodies[-1].trailer

    def resolve(self, object_id: int, text: str) -> tuple[int, int, str]:
        """Find the winning xref entry for an id; return (generation, offset, region text).

        The region runs from the recorded offset to the end of the first
        'endobj' keyword, clipped at the owning body's xref table.
        """
        for body in reversed(self.bodies):
            entry = body.xref.entries_by_id().get(object_id)
            if entry is None or entry[2] != "n":
                continue
            offset, gen, _ = entry
            if offset >= len(text):
                raise HostMalformedError(f"xref offset {offset} beyond end of file")
            end = body.xref_offset if body.xref_offset > offset else len(text)
            region = text[offset:end]
            stop = region.find("endobj")
            if stop != -1:
                region = region[:stop + len("endobj")]
            return gen, offset, region
        raise HostMalformedError(f"object id {object_id} has no in-use xref entry")


def parse_host(file_bytes: bytes) -> HostStructure:
    """Parse a PDF file from the end: startxref -> xref -> trailer, /Prev chain.

    Raises HostMalformedError with a diagnostic on structural problems.
    Object bodies are NOT parsed here; use resolve() + parse_object for that.
    """
    cov = CoverageSet()
    cov.hit(HOST_ENTRY)
    text = file_bytes.decode("latin-1")
    sx = text.rfind("startxref")
    if sx == -1:
        raise HostMalformedError("missing 'startxref'")
    offset = _read_int_after(text, sx + len("startxref"))
    if offset is None:
        raise HostMalformedError("no integer after 'startxref'")

    bodies_newest_first: list[BodySection] = []
    visited: set[int] = set()
    while True:
        if offset in visited:
            raise HostMalformedError(f"xref chain cycle at offset {offset}")
        visited.add(offset)
        if offset < 0 or offset >= len(text) or not text.startswith("xref", offset):
            raise HostMalformedError(f"startxref/Prev offset {offset} does not point at 'xref'")
        table, after = _parse_xref_table(text, offset, cov)
        trailer_dict = _parse_trailer_dict(text, after, cov)
        bodies_newest_first.append(BodySection(offset, table, Trailer(trailer_dict, offset)))
        prev = trailer_dict.entries.get("Prev")
        if prev is None:
            break
        if not isinstance(prev, Number) or not isinstance(prev.value, int):
            raise HostMalformedError("/Prev is not an integer")
        if len(bodies_newest_first) == 1:
            cov.hit(HOST_PREV_CHAIN)
        else:
            cov.hit(HOST_PREV_CHAIN_DEEP)
        offset = prev.value
    if len(bodies_newest_first) == 1:
        cov.hit(HOST_SINGLE_BODY)

    last_id = -1
    for body in bodies_newest_first:
        for oid, (_, _, kind) in body.xref.entries_by_id().items():
            if kind == "n":
                last_id = max(last_id, oid)
    if last_id < 0:
        raise HostMalformedError("no in-use objects in any xref table")
    return HostStructure(list(reversed(bodies_newest_first)), last_id, cov)


def _read_int_after(text: str, pos: int) -> Optional[int]:
    n = len(text)
    while pos < n and text[pos] in WHITESPACE:
        pos += 1
    start = pos
    while pos < n and text[pos].isdigit():
        pos += 1
    if pos == start:
        return None
    return int(text[start:pos])


def _parse_xref_table(text: str, offset: int, cov: CoverageSet) -> tuple[XrefTable, int]:
    pos = offset + len("xref")
    n = len(text)
    subsections: list[tuple[int, list[tuple[int, int, str]]]] = []
    while True:
        while pos < n and text[pos] in WHITESPACE:
            pos += 1
        if text.startswith("trailer", pos):
            break
        start_id = _read_int_at(text, pos)
        if start_id is None:
            raise HostMalformedError(f"expected xref subsection header at offset {pos}")
        pos = _skip_int(text, pos)
        count = _read_int_at(text, pos)
        if count is None:
            raise HostMalformedError(f"xref subsection header missing count at offset {pos}")
        pos = _skip_int(text, pos)
        entries: list[tuple[int, int, str]] = []
        for _ in range(count):
            while pos < n and text[pos] in WHITESPACE:
                pos += 1
            ent = text[pos:pos + 18]
            if (len(ent) != 18 or not ent[0:10].isdigit() or ent[10] != " "
                    or not ent[11:16].isdigit() or ent[16] != " " or ent[17] not in "nf"):
                raise HostMalformedError(f"bad xref entry at offset {pos}: {ent!r}")
            off_val = int(ent[0:10])
            gen_val = int(ent[11:16])
            kind = ent[17]
            if kind == "n":
                cov.hit(HOST_ENTRY_IN_USE)
                if gen_val > 0:
                    cov.hit(HOST_ENTRY_IN_USE_GEN)
            elif gen_val == 65535:
                cov.hit(HOST_ENTRY_FREE_HEAD)
            else:
                cov.hit(HOST_ENTRY_FREE)
            entries.append((off_val, gen_val, kind))
            pos += 18
        subsections.append((start_id, entries))
    if not subsections:
        raise HostMalformedError("xref table with no subsections")
    cov.hit(HOST_XREF_SINGLE_SUB if len(subsections) == 1 else HOST_XREF_MULTI_SUB)
    table = XrefTable(subsections)
    table.validate()
    return table, pos


def _read_int_at(text: str, pos: int) -> Optional[int]:
    start = pos
    while pos < len(text) and text[pos].isdigit():
        pos += 1
    return int(text[start:pos]) if pos > start else None


def _skip_int(text: str, pos: int) -> int:
    while pos < len(text) and text[pos].isdigit():
        pos += 1
    while pos < len(text) and text[pos] in WHITESPACE:
        pos += 1
    return pos


def _parse_trailer_dict(text: str, pos: int, cov: CoverageSet) -> Dictionary:
    t = text.find("trailer", pos)
    if t == -1:
        raise HostMalformedError("missing 'trailer' after xref table")
    end = text.find("startxref", t)
    if end == -1:
        raise HostMalformedError("missing 'startxref' after trailer")
    region = text[t + len("trailer"):end]
    try:
        tokens = _tokenize(region, cov)
    except LexicalError as e:
        raise HostMalformedError(f"trailer dictionary does not lex: {e.message}") from e
    cur = _Cursor(tokens, len(region))
    try:
        value = _parse_value(cur, cov, 0)
    except _ParseFail as f:
        raise HostMalformedError(f"trailer dictionary does not parse: {f.message}") from f
    if cur.peek() is not None or not isinstance(value, Dictionary):
        raise HostMalformedError("trailer is not a single dictionary")
    if "Size" not in value.entries:
        raise HostMalformedError("trailer has no /Size")
    if "Root" in value.entries:
        cov.hit(HOST_TRAILER_ROOT)
    cov.hit(HOST_TRAILER_INFO if "Info" in value.entries else HOST_TRAILER_NO_INFO)
    return value
