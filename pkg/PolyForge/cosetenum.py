"""
cosetenum.py

Todd-Coxeter coset enumeration.

- HLT: scan every relator at every coset in order, defining cosets to fill the gaps.
- Felsch: define one table entry at a time and process the deductions it causes by scanning
  the cyclic conjugates of the relators through that entry.

Both strategies share the coincidence machinery: a union-find over coset labels and a queue of
cosets waiting to have their rows folded into their representative. The coset limit counts
cosets ever defined. Hitting it is not an error: the table comes back partial, and every
equality recorded in it is provable from the relators.

Columns are indexed by signed letters: generator i owns column 2i, its inverse column 2i+1,
so the inverse of column c is c ^ 1. Coset 0 is the subgroup itself.
"""

from array import array
from dataclasses import dataclass, field
from itertools import product
from typing import Callable, Dict, Iterator, List, Optional, Sequence, Tuple

from .config import (
    logger, DEBUG, STRATEGY, CERTIFICATE_STRATEGY, CERTIFICATE_LIMITS, LOOKAHEAD, coset_limit,
)
from .fpcore import Presentation, Word, format_word
from .utils import InputError, ResourceLimitError

UNDEFINED = -1
STRATEGIES = ("hlt", "felsch")
LOOKAHEAD_ROUNDS = 4


class PartialTableError(ResourceLimitError):
    """An operation needs a complete table but the enumeration did not close."""


class DeadCosetError(InputError):
    """A coset label that is not live in the table."""


@dataclass
class EnumConfig:
    max_cosets: int = field(default_factory=coset_limit)
    strategy: str = STRATEGY
    lookahead: bool = LOOKAHEAD
    status_callback: Optional[Callable[[str], None]] = None

    def __post_init__(self):
        if self.max_cosets < 1:
            raise InputError(f"max_cosets must be at least 1, got {self.max_cosets}")
        self.strategy = self.strategy.lower()
        if self.strategy not in STRATEGIES:
            raise InputError(f"Unknown strategy {self.strategy!r}; choose from {STRATEGIES}")


def letter_column(letter: int) -> int:
    return 2 * (abs(letter) - 1) + (1 if letter < 0 else 0)


def word_columns(w: Word) -> List[int]:
    return [letter_column(x) for x in w.letters]


class CosetTable:
    """
    The result of an enumeration. `columns[c][k]` is the image of coset k under column c, or -1.
    Tables are not modified after they are returned.
    """

    def __init__(
        self,
        presentation: Presentation,
        subgroup: Sequence[Word],
        columns: List[array],
        parent: array,
        complete: bool,
        live_count: int,
        defined: int,
        strategy: str,
    ):
        self.presentation = presentation
        self.subgroup: Tuple[Word, ...] = tuple(subgroup)
        self.columns = columns
        self.parent = parent
        self.complete = complete
        self.live_count = live_count
        self.defined = defined
        self.strategy = strategy

    @property
    def status(self) -> str:
        return "complete" if self.complete else "partial"

    @property
    def index(self) -> int:
        if not self.complete:
            raise PartialTableError("The index of a partial table is unknown")
        return self.live_count

    @property
    def size(self) -> int:
        """Number of coset labels, live or dead."""
        return len(self.parent)

    @property
    def is_standard(self) -> bool:
        return self.complete and self.size == self.live_count

    def is_live(self, c: int) -> bool:
        return 0 <= c < len(self.parent) and self.parent[c] == c

    def live_cosets(self) -> Iterator[int]:
        parent = self.parent
        return (c for c in range(len(parent)) if parent[c] == c)

    def require_complete(self, what: str = "This operation"):
        if not self.complete:
            raise PartialTableError(
                f"{what} needs a complete coset table "
                f"({self.defined} cosets defined, {self.live_count} live, table still partial)"
            )

    def act(self, c: int, letter: int) -> Optional[int]:
        d = self.columns[letter_column(letter)][c]
        return None if d == UNDEFINED else d

    def trace(self, c: int, w: Word) -> Optional[int]:
        """Follow w from coset c; None as soon as an entry is undefined."""
        if not self.is_live(c):
            raise DeadCosetError(f"Coset {c} is not live")
        columns = self.columns
        for x in w.letters:
            c = columns[2 * (abs(x) - 1) + (x < 0)][c]
            if c == UNDEFINED:
                return None
        return c

    def generator_images(self) -> List[List[int]]:
        """For each generator, the list c -> c·g (complete standardized tables only)."""
        self.require_complete("generator_images")
        if not self.is_standard:
            raise InputError("generator_images needs a standardized table")
        return [list(self.columns[2 * i]) for i in range(self.presentation.rank)]

    def to_text(self) -> str:
        """One line per live coset, 1-based: `c: c·a c·a^-1 c·b c·b^-1`."""
        lines = []
        for c in self.live_cosets():
            entries = []
            for col in self.columns:
                d = col[c]
                entries.append("-" if d == UNDEFINED else str(d + 1))
            lines.append(f"{c + 1}: " + " ".join(entries))
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        names = self.presentation.alphabet.names
        headers = []
        for n in names:
            headers.extend([n, f"{n}^-1"])
        rows = []
        for c in self.live_cosets():
            rows.append([c + 1] + [None if col[c] == UNDEFINED else col[c] + 1 for col in self.columns])
        return {
            "generators": names,
            "columns": headers,
            "subgroup": [format_word(w, self.presentation.alphabet) for w in self.subgroup],
            "status": self.status,
            "live": self.live_count,
            "defined": self.defined,
            "rows": rows,
        }


class _CosetLimit(Exception):
    pass


class _Enumerator:
    """Mutable enumeration state. One instance per run."""

    def __init__(self, presentation: Presentation, subgroup: Sequence[Word], cfg: EnumConfig):
        rank = presentation.rank
        for w in subgroup:
            for x in w.letters:
                if x == 0 or abs(x) > rank:
                    raise InputError(f"Subgroup word uses a letter outside the alphabet: {x}")
        self.presentation = presentation
        self.subgroup = list(subgroup)
        self.cfg = cfg
        self.felsch = cfg.strategy == "felsch"
        self.ncols = 2 * rank
        self.max_cosets = cfg.max_cosets
        self.table: List[array] = [array("i") for _ in range(self.ncols)]
        self.parent = array("i")
        self.n = 0
        self.live = 0
        self.deductions: List[Tuple[int, int]] = []
        self.queue: List[int] = []

        self.relators = [word_columns(r) for r in presentation.relators if len(r) > 0]
        self.subgroup_cols = [word_columns(w) for w in self.subgroup if len(w) > 0]
        # cyclic conjugates of relators and their inverses, grouped by first column
        self.conjugates: List[List[List[int]]] = [[] for _ in range(self.ncols)]
        seen = set()
        for r in presentation.relators:
            for rel in (r, ~r):
                cols = word_columns(rel)
                for k in range(len(cols)):
                    rot = tuple(cols[k:] + cols[:k])
                    if rot not in seen:
                        seen.add(rot)
                        self.conjugates[rot[0]].append(list(rot))
        self._new_coset()

    # -- bookkeeping -------------------------------------------------------

    def _new_coset(self) -> int:
        if self.n >= self.max_cosets:
            raise _CosetLimit()
        c = self.n
        self.n += 1
        for col in self.table:
            col.append(UNDEFINED)
        self.parent.append(c)
        self.live += 1
        if self.cfg.status_callback is not None and self.n % 50000 == 0:
            self.cfg.status_callback(f"{self.n} cosets defined, {self.live} live")
        return c

    def _define(self, c: int, col: int):
        d = self._new_coset()
        self.table[col][c] = d
        self.table[col ^ 1][d] = c
        if self.felsch:
            self.deductions.append((c, col))

    def _rep(self, c: int) -> int:
        parent = self.parent
        root = c
        while parent[root] != root:
            root = parent[root]
        while parent[c] != root:
            parent[c], c = root, parent[c]
        return root

    def _merge(self, k: int, l: int):
        a, b = self._rep(k), self._rep(l)
        if a == b:
            return
        if a > b:
            a, b = b, a
        self.parent[b] = a
        self.live -= 1
        self.queue.append(b)

    def _coincidence(self, k: int, l: int):
        table = self.table
        self.queue = []
        self._merge(k, l)
        i = 0
        while i < len(self.queue):
            g = self.queue[i]
            i += 1
            for col in range(self.ncols):
                d = table[col][g]
                if d == UNDEFINED:
                    continue
                inv = col ^ 1
                table[inv][d] = UNDEFINED
                mu = self._rep(g)
                nu = self._rep(d)
                if table[col][mu] != UNDEFINED:
                    self._merge(nu, table[col][mu])
                elif table[inv][nu] != UNDEFINED:
                    self._merge(mu, table[inv][nu])
                else:
                    table[col][mu] = nu
                    table[inv][nu] = mu
                    if self.felsch:
                        self.deductions.append((mu, col))
        self.queue = []

    # -- scanning ------------------------------------------------------------

    def _scan(self, alpha: int, cols: List[int], fill: bool) -> bool:
        """
        Scan `cols` from alpha. Closes a single gap by deduction, folds cosets on a mismatch,
        and with `fill` defines new cosets until the scan completes. Returns True if the
        table changed.
        """
        table = self.table
        f = alpha
        i = 0
        b = alpha
        j = len(cols) - 1
        while True:
            while i <= j:
                nxt = table[cols[i]][f]
                if nxt == UNDEFINED:
                    break
                f = nxt
                i += 1
            if i > j:
                if f != b:
                    self._coincidence(f, b)
                    return True
                return False
            while j >= i:
                nxt = table[cols[j] ^ 1][b]
                if nxt == UNDEFINED:
                    break
                b = nxt
                j -= 1
            if j < i:
                self._coincidence(f, b)
                return True
            if j == i:
                table[cols[i]][f] = b
                table[cols[i] ^ 1][b] = f
                if self.felsch:
                    self.deductions.append((f, cols[i]))
                return True
            if not fill:
                return False
            self._define(f, cols[i])

    def _process_deductions(self):
        parent = self.parent
        table = self.table
        while self.deductions:
            alpha, col = self.deductions.pop()
            if parent[alpha] != alpha:
                continue
            for cols in self.conjugates[col]:
                self._scan(alpha, cols, False)
                if parent[alpha] != alpha:
                    break
            if parent[alpha] != alpha:
                continue
            beta = table[col][alpha]
            if beta == UNDEFINED:
                continue
            for cols in self.conjugates[col ^ 1]:
                self._scan(beta, cols, False)
                if parent[beta] != beta:
                    break

    def _fill_path(self, cols: List[int]):
        """Define cosets along a word from coset 0 without scanning it as a relator."""
        c = 0
        for col in cols:
            c = self._rep(c)
            if self.table[col][c] == UNDEFINED:
                self._define(c, col)
            c = self.table[col][c]

    # -- strategies ------------------------------------------------------------

    def _hlt(self, stop: Optional[Callable[[], bool]]):
        parent = self.parent
        table = self.table
        for cols in self.subgroup_cols:
            self._scan(0, cols, True)
        alpha = 0
        while alpha < self.n:
            if parent[alpha] == alpha:
                for cols in self.relators:
                    self._scan(alpha, cols, True)
                    if parent[alpha] != alpha:
                        break
                if parent[alpha] == alpha:
                    for col in range(self.ncols):
                        if table[col][alpha] == UNDEFINED:
                            self._define(alpha, col)
            alpha += 1
            if stop is not None and alpha % 256 == 0 and stop():
                return False
        return True

    def _felsch(self, stop: Optional[Callable[[], bool]]):
        parent = self.parent
        table = self.table
        for cols in self.subgroup_cols:
            self._scan(0, cols, True)
            self._process_deductions()
        alpha = 0
        while alpha < self.n:
            if parent[alpha] == alpha:
                for col in range(self.ncols):
                    if parent[alpha] != alpha:
                        break
                    if table[col][alpha] == UNDEFINED:
                        self._define(alpha, col)
                        self._process_deductions()
            alpha += 1
            if stop is not None and alpha % 256 == 0 and stop():
                return False
        return True

    def _lookahead(self, max_rounds: int = LOOKAHEAD_ROUNDS) -> int:
        """Scan every live coset against every relator without defining; repeat until stable."""
        rounds = 0
        changed = True
        while changed and rounds < max_rounds:
            changed = False
            rounds += 1
            for cols in self.subgroup_cols:
                if self._scan(0, cols, False):
                    changed = True
            for alpha in range(self.n):
                for cols in self.relators:
                    if self.parent[alpha] != alpha:
                        break
                    if self._scan(alpha, cols, False):
                        changed = True
            if self.felsch:
                self._process_deductions()
        return rounds

    def _closed(self) -> bool:
        """True when every live row is full and every relator closes at every live coset."""
        parent = self.parent
        table = self.table
        for alpha in range(self.n):
            if parent[alpha] != alpha:
                continue
            for col in range(self.ncols):
                if table[col][alpha] == UNDEFINED:
                    return False
        changed = True
        while changed:
            changed = False
            for alpha in range(self.n):
                for cols in self.relators:
                    if parent[alpha] != alpha:
                        break
                    if self._scan(alpha, cols, False):
                        changed = True
            for cols in self.subgroup_cols:
                if self._scan(0, cols, False):
                    changed = True
            if self.felsch:
                self._process_deductions()
        return all(
            table[col][alpha] != UNDEFINED
            for alpha in range(self.n) if parent[alpha] == alpha
            for col in range(self.ncols)
        )

    def run(self, stop: Optional[Callable[[], bool]] = None, seeds: Sequence[Word] = ()) -> CosetTable:
        complete = False
        try:
            for w in seeds:
                self._fill_path(word_columns(w))
            while True:
                if self.felsch:
                    finished = self._felsch(stop)
                else:
                    finished = self._hlt(stop)
                if not finished:
                    break
                if self._closed():
                    complete = True
                    break
                if DEBUG:
                    logger.debug("Table not closed after a full pass; continuing")
        except _CosetLimit:
            if DEBUG:
                logger.debug(f"Coset limit {self.max_cosets} reached with {self.live} live cosets")
            if self.cfg.lookahead:
                self.deductions = []
                rounds = self._lookahead()
                if DEBUG:
                    logger.debug(f"Lookahead finished after {rounds} rounds, {self.live} live cosets")
        if self.cfg.status_callback is not None:
            self.cfg.status_callback(f"{self.n} cosets defined, {self.live} live")
        return CosetTable(
            presentation=self.presentation,
            subgroup=self.subgroup,
            columns=self.table,
            parent=self.parent,
            complete=complete,
            live_count=self.live,
            defined=self.n,
            strategy=self.cfg.strategy,
        )


def enumerate_cosets(
    p: Presentation,
    subgens: Sequence[Word],
    cfg: Optional[EnumConfig] = None,
) -> CosetTable:
    """
    Enumerate the cosets of <subgens> in the group presented by p.

    Returns a complete table when the enumeration closes within cfg.max_cosets defined cosets,
    otherwise a partial one holding only provable equalities.
    """
    cfg = cfg or EnumConfig()
    if DEBUG:
        logger.debug(
            f"Enumerating {len(subgens)} subgroup generators over {p.rank} generators, "
            f"{len(p.relators)} relators, strategy={cfg.strategy}, limit={cfg.max_cosets}"
        )
    table = _Enumerator(p, subgens, cfg).run()
    if DEBUG:
        logger.debug(f"Enumeration {table.status}: {table.live_count} live of {table.defined} defined")
    return table


def trace(t: CosetTable, c: int, w: Word) -> Optional[int]:
    return t.trace(c, w)


def standardize(t: CosetTable) -> CosetTable:
    """Renumber a complete table in breadth-first order over (coset, column), dropping dead cosets."""
    t.require_complete("standardize")
    ncols = len(t.columns)
    new = array("i", [UNDEFINED]) * len(t.parent)
    order = [0]
    new[0] = 0
    k = 0
    while k < len(order):
        c = order[k]
        k += 1
        for col in range(ncols):
            d = t.columns[col][c]
            if new[d] == UNDEFINED:
                new[d] = len(order)
                order.append(d)
    columns = []
    for col in range(ncols):
        old = t.columns[col]
        columns.append(array("i", (new[old[c]] for c in order)))
    n = len(order)
    return CosetTable(
        presentation=t.presentation,
        subgroup=t.subgroup,
        columns=columns,
        parent=array("i", range(n)),
        complete=True,
        live_count=n,
        defined=t.defined,
        strategy=t.strategy,
    )


def is_normal(t: CosetTable) -> bool:
    """True iff every subgroup generator fixes every coset."""
    t.require_complete("is_normal")
    for w in t.subgroup:
        for c in t.live_cosets():
            if t.trace(c, w) != c:
                return False
    return True


@dataclass
class Certificate:
    verdict: str  # "proven" or "unknown"
    word: Word
    defined: int
    live: int
    complete: bool

    @property
    def proven(self) -> bool:
        return self.verdict == "proven"


def certify_trivial_words(
    p: Presentation,
    words: Sequence[Word],
    cfg: Optional[EnumConfig] = None,
) -> Tuple[List[Certificate], CosetTable]:
    """
    Enumerate cosets of the trivial subgroup until every word traces 0 -> 0 or the limit is hit.
    A word that traces back to coset 0 equals 1 in the group; nothing is ever concluded for the
    others.
    """
    cfg = cfg or EnumConfig(max_cosets=CERTIFICATE_LIMITS[-1], strategy=CERTIFICATE_STRATEGY)
    enumerator = _Enumerator(p, [], cfg)

    def all_proven() -> bool:
        for w in words:
            c = 0
            for col in word_columns(w):
                c = enumerator.table[col][c]
                if c == UNDEFINED:
                    return False
            if c != 0:
                return False
        return True

    table = enumerator.run(stop=all_proven, seeds=words)
    certificates = []
    for w in words:
        end = table.trace(0, w)
        certificates.append(Certificate(
            verdict="proven" if end == 0 else "unknown",
            word=w,
            defined=table.defined,
            live=table.live_count,
            complete=table.complete,
        ))
    if DEBUG:
        proven = sum(c.proven for c in certificates)
        logger.debug(f"Certified {proven}/{len(words)} words with {table.defined} cosets defined")
    return certificates, table


def certify_trivial_word(p: Presentation, w: Word, cfg: Optional[EnumConfig] = None) -> Certificate:
    """Sound test that w = 1: "proven" if w traces 0 -> 0 in the (possibly partial) table."""
    certificates, _ = certify_trivial_words(p, [w], cfg)
    return certificates[0]


def search_conjugation_table(
    t: CosetTable,
    basis: Sequence[Word],
    generators: Sequence[int],
    exponents: Sequence[int] = (-1, 0, 1),
) -> Dict[Tuple[int, int], List[Tuple[int, ...]]]:
    """
    For every basis word s_i and generator g, list the exponent vectors e for which
    s_i^g * (s_1^e1 ... s_k^ek)^-1 traces 0 -> 0 in t. Each hit proves s_i^g = s_1^e1 ... s_k^ek.
    """
    found: Dict[Tuple[int, int], List[Tuple[int, ...]]] = {}
    for i, s in enumerate(basis):
        for g in generators:
            conj = s.conjugate(Word.generator(g))
            hits = []
            for e in product(exponents, repeat=len(basis)):
                rhs = Word.identity()
                for b, k in zip(basis, e):
                    rhs = rhs * (b ** k)
                if t.trace(0, conj * ~rhs) == 0:
                    hits.append(tuple(e))
            found[(i, g)] = hits
    return found
