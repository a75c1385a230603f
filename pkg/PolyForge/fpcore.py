"""
fpcore.py

Free-group words, presentations and substitution homomorphisms.

A word is a tuple of signed letters: generator i (0-based) is the letter i+1 and its inverse
is -(i+1). Words are read left to right. Conjugation is u^g = g^-1 u g and the commutator
(u,v) expands to u^-1 v^-1 u v.

Word grammar accepted by `parse_word`:

    word  := term (('*' | nothing) term)*
    term  := atom ('^' (int | atom))*        # an atom exponent means conjugation
    atom  := name | '(' word ')' | '(' word ',' word ')'

Names are matched longest-first against the alphabet, so "ab^3a^2b^4" needs no '*'.
"""

import configparser
import json
import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from .utils import InputError


class WordParseError(InputError):
    """Raised for unknown symbols, unbalanced parentheses and malformed exponents."""

    def __init__(self, message: str, text: str = "", position: Optional[int] = None):
        if position is not None:
            message = f"{message} at position {position} in {text!r}"
        super().__init__(message)
        self.text = text
        self.position = position


@dataclass(frozen=True)
class Generator:
    name: str
    index: int


_NAME_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


class Alphabet:
    """An ordered list of named generators."""

    def __init__(self, names: Iterable[str]):
        names = [str(n).strip() for n in names]
        for name in names:
            if not _NAME_RE.match(name):
                raise InputError(f"Invalid generator name: {name!r}")
        if len(set(names)) != len(names):
            raise InputError(f"Generator names must be distinct: {names}")
        self.generators: Tuple[Generator, ...] = tuple(Generator(n, i) for i, n in enumerate(names))
        self._by_name: Dict[str, Generator] = {g.name: g for g in self.generators}
        # longest first, for tokenizing juxtaposed names
        self._match_order = sorted(names, key=lambda n: (-len(n), n))

    @property
    def names(self) -> List[str]:
        return [g.name for g in self.generators]

    def __len__(self) -> int:
        return len(self.generators)

    def __iter__(self) -> Iterator[Generator]:
        return iter(self.generators)

    def __getitem__(self, key: Union[int, str]) -> Generator:
        if isinstance(key, str):
            return self._by_name[key]
        return self.generators[key]

    def __contains__(self, name: str) -> bool:
        return name in self._by_name

    def __eq__(self, other) -> bool:
        return isinstance(other, Alphabet) and self.names == other.names

    def __hash__(self) -> int:
        return hash(tuple(self.names))

    def __repr__(self) -> str:
        return f"Alphabet({self.names})"

    def match(self, text: str, pos: int) -> Optional[str]:
        """The longest generator name starting at text[pos], or None."""
        for name in self._match_order:
            if text.startswith(name, pos):
                return name
        return None


class Word:
    """An element of the free group on an alphabet, as a tuple of signed letters."""

    __slots__ = ("letters",)

    def __init__(self, letters: Iterable[int] = ()):
        self.letters: Tuple[int, ...] = tuple(letters)

    @classmethod
    def identity(cls) -> "Word":
        return cls(())

    @classmethod
    def generator(cls, index: int) -> "Word":
        return cls((index + 1,))

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __eq__(self, other) -> bool:
        return isinstance(other, Word) and self.letters == other.letters

    def __hash__(self) -> int:
        return hash(self.letters)

    def __repr__(self) -> str:
        return f"Word({list(self.letters)})"

    def __mul__(self, other: "Word") -> "Word":
        return free_reduce(self.letters + other.letters)

    def __invert__(self) -> "Word":
        return Word(-x for x in reversed(self.letters))

    def __pow__(self, n: int) -> "Word":
        if n < 0:
            return (~self) ** -n
        return free_reduce(self.letters * n)

    def is_identity(self) -> bool:
        return not self.letters

    def conjugate(self, g: "Word") -> "Word":
        """u^g = g^-1 u g."""
        return free_reduce((~g).letters + self.letters + g.letters)

    def cyclically_reduced(self) -> "Word":
        letters = free_reduce(self.letters).letters
        i, j = 0, len(letters) - 1
        while i < j and letters[i] == -letters[j]:
            i += 1
            j -= 1
        return Word(letters[i:j + 1])

    def exponent_sums(self, rank: int) -> List[int]:
        sums = [0] * rank
        for x in self.letters:
            sums[abs(x) - 1] += 1 if x > 0 else -1
        return sums

    def root(self) -> Tuple["Word", int]:
        """(u, k) with self == u^k as letter sequences and k maximal."""
        n = len(self.letters)
        for period in range(1, n + 1):
            if n % period == 0 and self.letters == self.letters[:period] * (n // period):
                return Word(self.letters[:period]), n // period
        return self, 1

    def generators_used(self) -> List[int]:
        return sorted({abs(x) - 1 for x in self.letters})


def free_reduce(w: Union[Word, Sequence[int]]) -> Word:
    """Cancel adjacent g g^-1 pairs until none remain."""
    letters = w.letters if isinstance(w, Word) else w
    stack: List[int] = []
    for x in letters:
        if stack and stack[-1] == -x:
            stack.pop()
        else:
            stack.append(x)
    return Word(stack)


def commutator(u: Word, v: Word) -> Word:
    """(u, v) = u^-1 v^-1 u v."""
    return free_reduce((~u).letters + (~v).letters + u.letters + v.letters)


ImageKey = Union[int, Generator]


def substitute(w: Word, images: Mapping[ImageKey, Word]) -> Word:
    """Image of w under the free-group endomorphism given by generator images."""
    by_index: Dict[int, Word] = {}
    for key, image in images.items():
        by_index[key.index if isinstance(key, Generator) else int(key)] = image
    out: List[int] = []
    for x in w.letters:
        i = abs(x) - 1
        if i not in by_index:
            raise InputError(f"No image given for generator {i}")
        image = by_index[i]
        out.extend(image.letters if x > 0 else (~image).letters)
    return free_reduce(out)


# ---------------------------------------------------------------------------
# Parsing and printing
# ---------------------------------------------------------------------------

class _Parser:
    def __init__(self, text: str, alphabet: Alphabet):
        self.text = text
        self.alphabet = alphabet
        self.tokens = self._tokenize()
        self.pos = 0

    def _tokenize(self) -> List[Tuple[str, str, int]]:
        tokens = []
        text = self.text
        i = 0
        while i < len(text):
            ch = text[i]
            if ch.isspace():
                i += 1
            elif ch in "()*,^+-":
                tokens.append(("sym", ch, i))
                i += 1
            elif ch.isdigit():
                j = i
                while j < len(text) and text[j].isdigit():
                    j += 1
                tokens.append(("int", text[i:j], i))
                i = j
            else:
                name = self.alphabet.match(text, i)
                if name is None:
                    raise WordParseError("Unknown symbol", text, i)
                tokens.append(("name", name, i))
                i += len(name)
        return tokens

    def _peek(self) -> Optional[Tuple[str, str, int]]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def _take(self) -> Tuple[str, str, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def parse(self) -> Word:
        w = self._word()
        tok = self._peek()
        if tok is not None:
            if tok[1] == ")":
                raise WordParseError("Unbalanced parenthesis", self.text, tok[2])
            raise WordParseError(f"Unexpected {tok[1]!r}", self.text, tok[2])
        return w

    def _word(self) -> Word:
        letters: List[int] = []
        while True:
            tok = self._peek()
            if tok is None or tok[1] in (")", ","):
                break
            if tok[1] == "*":
                if not letters:
                    raise WordParseError("Dangling '*'", self.text, tok[2])
                self._take()
                nxt = self._peek()
                if nxt is None or nxt[1] in (")", ",", "*"):
                    raise WordParseError("Dangling '*'", self.text, tok[2])
                continue
            letters.extend(self._term().letters)
        return free_reduce(letters)

    def _term(self) -> Word:
        w = self._atom()
        while self._peek() is not None and self._peek()[1] == "^":
            caret = self._take()
            tok = self._peek()
            if tok is None:
                raise WordParseError("Malformed exponent", self.text, caret[2])
            if tok[1] in ("-", "+"):
                self._take()
                num = self._peek()
                if num is None or num[0] != "int":
                    raise WordParseError("Malformed exponent", self.text, tok[2])
                self._take()
                n = int(num[1])
                w = w ** (-n if tok[1] == "-" else n)
            elif tok[0] == "int":
                self._take()
                w = w ** int(tok[1])
            elif tok[0] == "name" or tok[1] == "(":
                w = w.conjugate(self._atom())
            else:
                raise WordParseError("Malformed exponent", self.text, tok[2])
        return w

    def _atom(self) -> Word:
        tok = self._peek()
        if tok is None:
            raise WordParseError("Unexpected end of input", self.text, len(self.text))
        if tok[0] == "name":
            self._take()
            return Word.generator(self.alphabet[tok[1]].index)
        if tok[1] == "(":
            self._take()
            u = self._word()
            nxt = self._peek()
            if nxt is not None and nxt[1] == ",":
                self._take()
                v = self._word()
                nxt = self._peek()
                if nxt is None or nxt[1] != ")":
                    raise WordParseError("Unbalanced parenthesis", self.text, tok[2])
                self._take()
                return commutator(u, v)
            if nxt is None or nxt[1] != ")":
                raise WordParseError("Unbalanced parenthesis", self.text, tok[2])
            self._take()
            return u
        if tok[1] == ")":
            raise WordParseError("Unbalanced parenthesis", self.text, tok[2])
        if tok[0] == "int" and tok[1] == "1":
            # "1" is accepted as the identity
            self._take()
            return Word.identity()
        raise WordParseError(f"Unexpected {tok[1]!r}", self.text, tok[2])


def parse_word(text: str, alphabet: Alphabet) -> Word:
    """Parse `text` over `alphabet` into a freely reduced word."""
    return _Parser(text, alphabet).parse()


def format_word(w: Word, alphabet: Alphabet) -> str:
    """Print a word back in the grammar, e.g. "b^-2*a*b^-2*a". The identity prints as "1"."""
    if not w.letters:
        return "1"
    parts = []
    i = 0
    letters = w.letters
    while i < len(letters):
        j = i
        while j < len(letters) and letters[j] == letters[i]:
            j += 1
        name = alphabet[abs(letters[i]) - 1].name
        power = (j - i) * (1 if letters[i] > 0 else -1)
        parts.append(name if power == 1 else f"{name}^{power}")
        i = j
    return "*".join(parts)


# ---------------------------------------------------------------------------
# Presentations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Presentation:
    alphabet: Alphabet
    relators: Tuple[Word, ...] = field(default_factory=tuple)

    def __post_init__(self):
        rank = len(self.alphabet)
        reduced = []
        for r in self.relators:
            r = free_reduce(r)
            for x in r.letters:
                if x == 0 or abs(x) > rank:
                    raise InputError(f"Relator uses a letter outside the alphabet: {x}")
            reduced.append(r)
        object.__setattr__(self, "relators", tuple(reduced))

    @classmethod
    def from_strings(cls, generators: Sequence[str], relators: Sequence[str]) -> "Presentation":
        alphabet = Alphabet(generators)
        return cls(alphabet, tuple(parse_word(r, alphabet) for r in relators))

    @property
    def rank(self) -> int:
        return len(self.alphabet)

    def parse(self, text: str) -> Word:
        return parse_word(text, self.alphabet)

    def format(self, w: Word) -> str:
        return format_word(w, self.alphabet)

    def with_relators(self, extra: Iterable[Word]) -> "Presentation":
        return Presentation(self.alphabet, self.relators + tuple(extra))

    def describe(self) -> str:
        rels = ", ".join(self.format(r) for r in self.relators)
        return f"< {', '.join(self.alphabet.names)} | {rels} >"


def load_presentation_file(path: str) -> Tuple[Presentation, List[Word]]:
    """
    Read a user presentation. The file holds `generators`, `relators` and `subgroup` keys whose
    values are JSON lists of word strings, e.g.

        generators = ["a", "b"]
        relators = ["a^2", "b^3", "(a*b)^2"]
        subgroup = ["a"]

    A section header is optional.
    """
    try:
        with open(path) as f:
            text = f.read()
    except OSError as e:
        raise InputError(f"Cannot read presentation file {path}: {e}")
    if not re.search(r"^\s*\[", text, re.MULTILINE):
        text = "[presentation]\n" + text
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as e:
        raise InputError(f"Malformed presentation file {path}: {e}")
    section = parser[parser.sections()[0]]

    def _list(key: str, required: bool) -> List[str]:
        if key not in section:
            if required:
                raise InputError(f"Presentation file {path} has no '{key}' key")
            return []
        try:
            value = json.loads(section[key])
        except json.JSONDecodeError as e:
            raise InputError(f"Key '{key}' in {path} is not a JSON list: {e}")
        if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
            raise InputError(f"Key '{key}' in {path} must be a list of strings")
        return value

    presentation = Presentation.from_strings(_list("generators", True), _list("relators", False))
    subgroup = [presentation.parse(s) for s in _list("subgroup", False)]
    return presentation, subgroup
