"""Capture filter expressions.

In live mode the expression is handed to the capture process untouched; in
offline mode this module evaluates the common subset against synthetic
events: protocol names, host/port primitives with optional src/dst
qualifiers, parentheses, and/or/not.
"""

from __future__ import annotations

import re

from ..errors import FilterRejected

PROTOCOLS = {"icmp", "tcp", "udp", "arp"}

_TOKEN = re.compile(r"\(|\)|[A-Za-z0-9_.:-]+")


def _tokenize(expr: str) -> list[str]:
    pos = 0
    tokens = []
    for m in _TOKEN.finditer(expr):
        if expr[pos : m.start()].strip():
            raise FilterRejected(f"bad character near {expr[pos:m.start()]!r}")
        tokens.append(m.group(0))
        pos = m.end()
    if expr[pos:].strip():
        raise FilterRejected(f"bad character near {expr[pos:]!r}")
    return tokens


class _Parser:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise FilterRejected("unexpected end of expression")
        self.pos += 1
        return tok

    def parseExpr(self):
        node = self.parseTerm()
        while self.peek() == "or":
            self.take()
            node = ("or", node, self.parseTerm())
        return node

    def parseTerm(self):
        node = self.parseFactor()
        while self.peek() == "and":
            self.take()
            node = ("and", node, self.parseFactor())
        return node

    def parseFactor(self):
        tok = self.peek()
        if tok == "not":
            self.take()
            return ("not", self.parseFactor())
        if tok == "(":
            self.take()
            node = self.parseExpr()
            if self.take() != ")":
                raise FilterRejected("expected )")
            return node
        return self.parsePrimitive()

    def parsePrimitive(self):
        tok = self.take().lower()
        if tok in PROTOCOLS:
            return ("proto", tok)
        direction = None
        if tok in ("src", "dst"):
            direction = tok
            tok = self.take().lower()
        if tok == "host":
            return ("host", direction, self.take())
        if tok == "port":
            value = self.take()
            if not value.isdigit():
                raise FilterRejected(f"port needs a number, got {value!r}")
            return ("port", direction, int(value))
        raise FilterRejected(f"unknown primitive {tok!r}")


def parseFilter(expr: str):
    """Parse a filter expression; raises FilterRejected on empty or bad input."""
    if expr is None or not expr.strip():
        raise FilterRejected("empty filter expression")
    parser = _Parser(_tokenize(expr))
    tree = parser.parseExpr()
    if parser.peek() is not None:
        raise FilterRejected(f"trailing input at {parser.peek()!r}")
    return tree


def evalFilter(tree, event: dict) -> bool:
    op = tree[0]
    if op == "or":
        return evalFilter(tree[1], event) or evalFilter(tree[2], event)
    if op == "and":
        return evalFilter(tree[1], event) and evalFilter(tree[2], event)
    if op == "not":
        return not evalFilter(tree[1], event)
    if op == "proto":
        return event.get("proto") == tree[1]
    if op == "host":
        _, direction, addr = tree
        if direction == "src":
            return event.get("src") == addr
        if direction == "dst":
            return event.get("dst") == addr
        return addr in (event.get("src"), event.get("dst"))
    if op == "port":
        _, direction, num = tree
        if direction == "src":
            return event.get("sport") == num
        if direction == "dst":
            return event.get("dport") == num
        return num in (event.get("sport"), event.get("dport"))
    raise FilterRejected(f"bad filter node {op!r}")
