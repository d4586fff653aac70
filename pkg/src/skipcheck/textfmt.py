from typing import Iterator, Tuple


class ParseError(ValueError):
    def __init__(self, lineno: int, line: str, msg: str):
        super().__init__(f"line {lineno}: {msg}: {line!r}")
        self.lineno = lineno
        self.line = line


def lines(text: str) -> Iterator[Tuple[int, str]]:
    """Yield ``(lineno, content)`` for non-blank lines, with ``#`` comments stripped."""
    for i, raw in enumerate(text.splitlines(), 1):
        content = raw.split("#", 1)[0].strip()
        if content:
            yield i, content


def parse_int(tok: str, lineno: int, line: str, *, natural: bool = False) -> int:
    try:
        v = int(tok)
    except ValueError:
        raise ParseError(lineno, line, f"expected an integer, got {tok!r}") from None
    if natural and v < 0:
        raise ParseError(lineno, line, f"expected a natural number, got {v}")
    return v
