"""Text serialization of unified plans.

Two styles share one parser entry point:

* ``canonical``: a machine form with zero whitespace flexibility, built
  from the tokens ``Operation :``, ``Category->identifier``, ``: value``
  and ``--children--> { ... }``. Sibling subtrees and adjacent properties
  are separated by ``, ``. Strings are double-quoted with ``\\`` escapes
  for ``"`` and ``\\``. The tree occupies the first line; plan-wide
  properties, when present, occupy a second line. The line break is what
  separates them: a property run attached to a node by a space belongs to
  that node, a run that starts on a new line belongs to the plan. Without
  that rule the two readings collide when a childless node has no
  properties of its own (``Operation : X a: 1`` cannot say whether ``a``
  is the node's or the plan's). Canonical output re-parses to an equal
  plan, byte for byte deterministic.

* ``pretty``: a display form, one node per line as ``Category->Identifier``
  with one-space-deeper indentation per tree level. Property lines sit one
  space deeper than their node, written ``identifier: value`` with keyword
  underscores shown as spaces and strings unquoted. Plan-wide properties
  appear at column zero after the tree. Pretty output is lossy: property
  categories are not printed, so re-parsing assigns Configuration (a
  ``Category->identifier: value`` spelling is also accepted), and values
  re-parse by shape (numbers, booleans, null, else string).

``parse_unified_text`` auto-detects the style: presence of the
``--children-->`` token (or a leading ``Operation :`` / categorized
property list) selects canonical.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Literal

from .errors import PlanSyntaxError, PlanValidationError
from .plan import (
    OPERATION_CATEGORY_NAMES,
    PROPERTY_CATEGORY_NAMES,
    Operation,
    PlanNode,
    Property,
    PropertyCategory,
    PropertyValue,
    UnifiedPlan,
    canonical_keyword,
    display_keyword,
    validate,
)

Style = Literal["canonical", "pretty"]


def format_value(value: PropertyValue) -> str:
    """Canonical text form of a scalar value."""
    if value is None:
        return "null"
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, str):
        escaped = value.replace("\\", "\\\\").replace('"', '\\"')
        return f'"{escaped}"'
    if isinstance(value, int):
        return str(value)
    return repr(value)


def display_value(value: PropertyValue) -> str:
    """Pretty (unquoted) form of a scalar value, kept to one line."""
    if value is None:
        return "null"
    if value is True:
        return "true"
    if value is False:
        return "false"
    if isinstance(value, str):
        return value.replace("\n", "\\n")
    if isinstance(value, int):
        return str(value)
    return repr(value)


def parse_scalar(text: str) -> PropertyValue:
    """Interpret a bare (unquoted) value by shape."""
    if text == "true":
        return True
    if text == "false":
        return False
    if text == "null":
        return None
    if re.fullmatch(r"-?\d+", text):
        return int(text)
    if re.fullmatch(r"-?\d+\.\d+([eE][+-]?\d+)?", text) or re.fullmatch(
        r"-?\d+[eE][+-]?\d+", text
    ):
        return float(text)
    return text


def _category_text(category: object) -> str:
    if hasattr(category, "value"):
        return category.value  # type: ignore[union-attr]
    return str(category)


def _property_canonical(prop: Property) -> str:
    return (
        f"{_category_text(prop.category)}->{prop.identifier}: "
        f"{format_value(prop.value)}"
    )


def _tree_canonical(node: PlanNode) -> str:
    op = node.operation
    parts = [f"Operation : {_category_text(op.category)}->{op.identifier}"]
    if node.properties:
        parts.append(", ".join(_property_canonical(p) for p in node.properties))
    if node.children:
        inner = ", ".join(_tree_canonical(c) for c in node.children)
        parts.append("--children--> { " + inner + " }")
    return " ".join(parts)


def _pretty_lines(node: PlanNode, depth: int, out: list[str]) -> None:
    op = node.operation
    out.append(" " * depth + f"{_category_text(op.category)}->{display_keyword(op.identifier)}")
    for prop in node.properties:
        out.append(
            " " * (depth + 1)
            + f"{display_keyword(prop.identifier)}: {display_value(prop.value)}"
        )
    for child in node.children:
        _pretty_lines(child, depth + 1, out)


def serialize_text(plan: UnifiedPlan, style: Style = "canonical") -> str:
    """Render a valid plan in the requested text style.

    Raises PlanValidationError (carrying all violations) for invalid
    plans. An empty plan renders as an empty string.
    """
    violations = validate(plan)
    if violations:
        raise PlanValidationError(violations)
    if style == "canonical":
        parts = []
        if plan.root is not None:
            parts.append(_tree_canonical(plan.root))
        if plan.plan_properties:
            parts.append(", ".join(_property_canonical(p) for p in plan.plan_properties))
        # The newline is the tree / plan-properties boundary; see module
        # docstring for why a space cannot serve here.
        return "\n".join(parts)
    if style == "pretty":
        lines: list[str] = []
        if plan.root is not None:
            _pretty_lines(plan.root, 0, lines)
        for prop in plan.plan_properties:
            lines.append(f"{display_keyword(prop.identifier)}: {display_value(prop.value)}")
        return "\n".join(lines)
    raise ValueError(f"unknown style {style!r}")


# --- canonical tokenizer -------------------------------------------------

_WORD = "word"
_STRING = "string"
_NUMBER = "number"
_ARROW = "arrow"
_CHILDREN = "children"
_COLON = "colon"
_COMMA = "comma"
_LBRACE = "lbrace"
_RBRACE = "rbrace"

_WORD_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")
_NUMBER_RE = re.compile(r"-?\d+(\.\d+)?([eE][+-]?\d+)?")


@dataclass
class _Token:
    kind: str
    text: str
    value: PropertyValue
    line: int
    column: int
    # True when a line break sits between this token and the previous one.
    # The parser uses it to tell a node's property run from the plan's.
    after_newline: bool = False


class _Scanner:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.column = 1

    def _advance(self, count: int) -> None:
        chunk = self.text[self.pos : self.pos + count]
        newlines = chunk.count("\n")
        if newlines:
            self.line += newlines
            self.column = count - chunk.rfind("\n")
        else:
            self.column += count
        self.pos += count

    def _error(self, message: str) -> PlanSyntaxError:
        return PlanSyntaxError(message, self.line, self.column)

    def _scan_string(self) -> _Token:
        line, column = self.line, self.column
        self._advance(1)  # opening quote
        chars: list[str] = []
        while True:
            if self.pos >= len(self.text):
                raise self._error("unterminated string")
            ch = self.text[self.pos]
            if ch == '"':
                self._advance(1)
                break
            if ch == "\\":
                if self.pos + 1 >= len(self.text):
                    raise self._error("unterminated string escape")
                nxt = self.text[self.pos + 1]
                if nxt not in ('"', "\\"):
                    raise self._error(f"invalid string escape \\{nxt}")
                chars.append(nxt)
                self._advance(2)
                continue
            chars.append(ch)
            self._advance(1)
        return _Token(_STRING, "", "".join(chars), line, column)

    def tokens(self) -> list[_Token]:
        out: list[_Token] = []
        pending_newline = False

        def emit(token: _Token) -> None:
            nonlocal pending_newline
            token.after_newline = pending_newline
            pending_newline = False
            out.append(token)

        text = self.text
        while self.pos < len(text):
            ch = text[self.pos]
            if ch in " \t\r\n":
                if ch == "\n":
                    pending_newline = True
                self._advance(1)
                continue
            line, column = self.line, self.column
            if ch == '"':
                emit(self._scan_string())
                continue
            if text.startswith("--children-->", self.pos):
                self._advance(len("--children-->"))
                emit(_Token(_CHILDREN, "--children-->", None, line, column))
                continue
            if text.startswith("->", self.pos):
                self._advance(2)
                emit(_Token(_ARROW, "->", None, line, column))
                continue
            if ch == ":":
                self._advance(1)
                emit(_Token(_COLON, ":", None, line, column))
                continue
            if ch == ",":
                self._advance(1)
                emit(_Token(_COMMA, ",", None, line, column))
                continue
            if ch == "{":
                self._advance(1)
                emit(_Token(_LBRACE, "{", None, line, column))
                continue
            if ch == "}":
                self._advance(1)
                emit(_Token(_RBRACE, "}", None, line, column))
                continue
            match = _NUMBER_RE.match(text, self.pos)
            if match and (ch.isdigit() or ch == "-"):
                literal = match.group(0)
                end = match.end()
                if end < len(text) and (text[end].isalnum() or text[end] in "._"):
                    raise self._error(f"malformed value literal {literal + text[end]!r}")
                self._advance(len(literal))
                number: PropertyValue
                if re.fullmatch(r"-?\d+", literal):
                    number = int(literal)
                else:
                    number = float(literal)
                emit(_Token(_NUMBER, literal, number, line, column))
                continue
            match = _WORD_RE.match(text, self.pos)
            if match:
                word = match.group(0)
                self._advance(len(word))
                emit(_Token(_WORD, word, None, line, column))
                continue
            raise self._error(f"unexpected character {ch!r}")
        return out


class _CanonicalParser:
    def __init__(self, tokens: list[_Token]):
        self.tokens = tokens
        self.index = 0

    def _peek(self, offset: int = 0) -> _Token | None:
        pos = self.index + offset
        if pos < len(self.tokens):
            return self.tokens[pos]
        return None

    def _error(self, message: str, token: _Token | None = None) -> PlanSyntaxError:
        if token is None and self.tokens:
            token = self.tokens[min(self.index, len(self.tokens) - 1)]
        if token is None:
            return PlanSyntaxError(message)
        return PlanSyntaxError(message, token.line, token.column)

    def _take(self, kind: str, what: str) -> _Token:
        token = self._peek()
        if token is None:
            raise self._error(f"unexpected end of input, expected {what}")
        if token.kind != kind:
            raise self._error(f"expected {what}, found {token.text!r}", token)
        self.index += 1
        return token

    def _at_property_start(self, offset: int = 0) -> bool:
        token = self._peek(offset)
        follow = self._peek(offset + 1)
        return (
            token is not None
            and token.kind == _WORD
            and token.text in PROPERTY_CATEGORY_NAMES
            and follow is not None
            and follow.kind == _ARROW
        )

    def _at_tree_start(self, offset: int = 0) -> bool:
        token = self._peek(offset)
        follow = self._peek(offset + 1)
        return (
            token is not None
            and token.kind == _WORD
            and token.text == "Operation"
            and follow is not None
            and follow.kind == _COLON
        )

    def _parse_value(self) -> PropertyValue:
        token = self._peek()
        if token is None:
            raise self._error("unexpected end of input, expected a value")
        if token.kind in (_STRING, _NUMBER):
            self.index += 1
            return token.value
        if token.kind == _WORD and token.text in ("true", "false", "null"):
            self.index += 1
            return {"true": True, "false": False, "null": None}[token.text]
        raise self._error(f"malformed value literal {token.text!r}", token)

    def _parse_property(self) -> Property:
        cat_token = self._take(_WORD, "a property category")
        category = PROPERTY_CATEGORY_NAMES.get(cat_token.text)
        if category is None:
            raise self._error(
                f"unknown property category {cat_token.text!r}", cat_token
            )
        self._take(_ARROW, "'->'")
        ident = self._take(_WORD, "a property identifier")
        self._take(_COLON, "':'")
        value = self._parse_value()
        return Property(category, ident.text, value)

    def _parse_property_list(self) -> list[Property]:
        properties = [self._parse_property()]
        while True:
            token = self._peek()
            if token is None or token.kind != _COMMA:
                break
            if not self._at_property_start(1):
                break
            self.index += 1  # comma
            properties.append(self._parse_property())
        return properties

    def _parse_tree(self) -> PlanNode:
        self._take(_WORD, "'Operation'")
        self._take(_COLON, "':'")
        cat_token = self._take(_WORD, "an operation category")
        category = OPERATION_CATEGORY_NAMES.get(cat_token.text)
        if category is None:
            raise self._error(
                f"unknown operation category {cat_token.text!r}", cat_token
            )
        self._take(_ARROW, "'->'")
        ident = self._take(_WORD, "an operation identifier")
        node = PlanNode(Operation(category, ident.text))
        # A property run on the same line belongs to this node; one that
        # starts on a new line is the plan's and is left for parse().
        if self._at_property_start() and not self.tokens[self.index].after_newline:
            node.properties = self._parse_property_list()
        token = self._peek()
        if token is not None and token.kind == _CHILDREN:
            self.index += 1
            self._take(_LBRACE, "'{'")
            node.children.append(self._parse_tree())
            while True:
                token = self._peek()
                if token is not None and token.kind == _COMMA and self._at_tree_start(1):
                    self.index += 1
                    node.children.append(self._parse_tree())
                    continue
                break
            self._take(_RBRACE, "'}'")
        return node

    def parse(self) -> UnifiedPlan:
        plan = UnifiedPlan()
        if not self.tokens:
            return plan
        if self._at_tree_start():
            plan.root = self._parse_tree()
        if self._at_property_start():
            plan.plan_properties = self._parse_property_list()
        token = self._peek()
        if token is not None:
            raise self._error(f"unexpected trailing input {token.text!r}", token)
        return plan


# --- pretty parser -------------------------------------------------------

_PRETTY_NODE_RE = re.compile(r"^([A-Za-z][A-Za-z0-9_]*)->(.+)$")
_PRETTY_PROP_CAT_RE = re.compile(r"^(Cardinality|Cost|Configuration|Status)->(.+)$")


def _parse_pretty(text: str) -> UnifiedPlan:
    plan = UnifiedPlan()
    # Stack of (node, depth) from root to the most recently opened branch.
    stack: list[tuple[PlanNode, int]] = []
    current: PlanNode | None = None
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        if not raw_line.strip():
            continue
        depth = len(raw_line) - len(raw_line.lstrip(" "))
        body = raw_line.strip()
        if ": " in body or body.endswith(":"):
            if ": " in body:
                left, _, right = body.partition(": ")
            else:
                left, right = body[:-1], ""
            category: PropertyCategory = PropertyCategory.CONFIGURATION
            cat_match = _PRETTY_PROP_CAT_RE.match(left)
            if cat_match:
                category = PROPERTY_CATEGORY_NAMES[cat_match.group(1)]
                left = cat_match.group(2)
            prop = Property(category, canonical_keyword(left), parse_scalar(right.strip()))
            if depth == 0 or current is None:
                plan.plan_properties.append(prop)
            else:
                current.properties.append(prop)
            continue
        match = _PRETTY_NODE_RE.match(body)
        if not match:
            raise PlanSyntaxError(
                f"expected 'Category->Identifier' or 'identifier: value', found {body!r}",
                lineno,
                depth + 1,
            )
        cat_name, ident_display = match.group(1), match.group(2)
        category_op = OPERATION_CATEGORY_NAMES.get(cat_name)
        if category_op is None:
            raise PlanSyntaxError(
                f"unknown operation category {cat_name!r}", lineno, depth + 1
            )
        node = PlanNode(Operation(category_op, canonical_keyword(ident_display)))
        while stack and stack[-1][1] >= depth:
            stack.pop()
        if stack:
            stack[-1][0].children.append(node)
        elif plan.root is None:
            plan.root = node
        else:
            raise PlanSyntaxError("multiple root nodes", lineno, depth + 1)
        stack.append((node, depth))
        current = node
    return plan


def parse_unified_text(text: str) -> UnifiedPlan:
    """Parse either text style, auto-detected, into a plan.

    Raises PlanSyntaxError with line and column on malformed input.
    Empty input parses to an empty plan.
    """
    stripped = text.strip()
    if not stripped:
        return UnifiedPlan()
    canonical = (
        "--children-->" in text
        or re.match(r"^Operation\s*:", stripped) is not None
        or re.match(r"^(Cardinality|Cost|Configuration|Status)->", stripped) is not None
    )
    if canonical:
        tokens = _Scanner(text).tokens()
        return _CanonicalParser(tokens).parse()
    return _parse_pretty(text)
