import re
from typing import NamedTuple

from ..errors import ParseError


class Token(NamedTuple):
    kind: str  # ident | number | string | op | eof
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<line_comment>//[^\n]*)
  | (?P<block_comment>/\*.*?\*/)
  | (?P<number>0[xX][0-9a-fA-F]+|\d+(?:\.\d+)?(?:[eE]\d+)?)
  | (?P<ident>[A-Za-z_$][A-Za-z0-9_$]*)
  | (?P<string>"(?:[^"\\\n]|\\.)*"|'(?:[^'\\\n]|\\.)*')
  | (?P<op>=>|==|!=|<=|>=|&&|\|\||\+=|-=|\*=|/=|\+\+|--|\*\*|[-+*/%<>=!^~&|?:;,.(){}\[\]])
    """,
    re.VERBOSE | re.DOTALL,
)


def tokenize(source: str) -> list[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    n = len(source)
    while pos < n:
        col = pos - line_start + 1
        if source.startswith("/*", pos) and source.find("*/", pos + 2) < 0:
            raise ParseError(line, col, "end of comment", "EOF")
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            raise ParseError(line, col, "token", source[pos])
        kind = m.lastgroup
        text = m.group()
        if kind == "block_comment" or kind == "ws":
            pass
        elif kind != "line_comment":
            tokens.append(Token(kind, text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", "", line, pos - line_start + 1))
    return tokens
