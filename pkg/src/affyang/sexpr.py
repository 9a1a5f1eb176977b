"""Minimal s-expression reader/writer used by the text interfaces."""

from __future__ import annotations

import re

_TOKEN = re.compile(r'\s*(?:(\()|(\))|"((?:[^"\\]|\\.)*)"|([^\s()"]+))')


class Quoted(str):
    """A string atom that must be written with quotes."""


def parse(text: str):
    pos = 0
    stack: list[list] = [[]]
    while True:
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            if text[pos:].strip():
                raise ValueError(f"unexpected input at {pos}: {text[pos:pos + 20]!r}")
            break
        pos = m.end()
        if m.group(1):
            stack.append([])
        elif m.group(2):
            if len(stack) == 1:
                raise ValueError("unbalanced ')'")
            done = stack.pop()
            stack[-1].append(done)
        elif m.group(3) is not None:
            stack[-1].append(Quoted(m.group(3).replace('\\"', '"')))
        else:
            stack[-1].append(m.group(4))
    if len(stack) != 1:
        raise ValueError("unbalanced '('")
    if len(stack[0]) != 1:
        raise ValueError("expected exactly one expression")
    return stack[0][0]


def dump(expr) -> str:
    if isinstance(expr, list):
        return "(" + " ".join(dump(x) for x in expr) + ")"
    if isinstance(expr, Quoted):
        return '"' + expr.replace('"', '\\"') + '"'
    return str(expr)
