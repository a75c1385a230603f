"""
subgrouppres.py

Reidemeister-Schreier rewriting of a finite-index subgroup, Tietze simplification of the result,
and the certificate that a subgroup is free abelian of rank 4 together with its exact coordinate map.

Schreier generator s_{c,g} = t(c)·g·t(c·g)^-1 for every non-tree edge (c, g) of the coset graph,
where t is the breadth-first transversal. It is written s<c>_<g> with c numbered from 1.
"""

import heapq
from collections import defaultdict, deque
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Dict, List, Optional, Sequence, Set, Tuple

from .config import logger, DEBUG, TIETZE_BUDGET, TIETZE_MAX_TOTAL_LENGTH
from .cosetenum import CosetTable, standardize
from .fpcore import Alphabet, Presentation, Word, free_reduce
from .intlinalg import IntMatrix, abelian_invariants
from .utils import PolyForgeError

# relators longer than this are deduplicated by exact text only
CANONICAL_LENGTH = 200
# substring reduction only runs on presentations this small
SUBSTRING_RELATORS = 400
SUBSTRING_PIECE_LENGTH = 64
# the piling normal form is only used once this few generators remain
CLOSURE_GENERATORS = 12


class CertificationError(PolyForgeError):
    """The free-abelian certificate failed. `verdict` says how."""

    _codes = {"unproven": 2, "not a basis": 1, "not in subgroup": 3}

    def __init__(self, verdict: str, message: str):
        super().__init__(f"{verdict}: {message}")
        self.verdict = verdict
        self.exit_code = self._codes.get(verdict, 1)


@dataclass
class SchreierTransversal:
    table: CosetTable
    representatives: List[Word]
    # positive edges (c, g) with c·g first reached through them
    tree: Set[Tuple[int, int]]

    def __len__(self) -> int:
        return len(self.representatives)

    def __getitem__(self, c: int) -> Word:
        return self.representatives[c]

    @property
    def max_length(self) -> int:
        return max(len(w) for w in self.representatives)


def schreier_transversal(t: CosetTable) -> SchreierTransversal:
    """Breadth-first transversal over the columns g_1, g_1^-1, g_2, ...; prefix closed."""
    t.require_complete("schreier_transversal")
    if not t.is_standard:
        t = standardize(t)
    n = t.live_count
    reps: List[Optional[Word]] = [None] * n
    reps[0] = Word.identity()
    tree: Set[Tuple[int, int]] = set()
    queue = deque([0])
    while queue:
        c = queue.popleft()
        for col, column in enumerate(t.columns):
            d = column[c]
            if reps[d] is not None:
                continue
            g = col >> 1
            if col & 1:
                reps[d] = Word(reps[c].letters + (-(g + 1),))
                tree.add((d, g))
            else:
                reps[d] = Word(reps[c].letters + (g + 1,))
                tree.add((c, g))
            queue.append(d)
    return SchreierTransversal(t, reps, tree)


@dataclass
class SubgroupPresentation:
    """
    Generators are numbered by letter 1..len(names). After simplification only `survivors`
    remain in the relators, and `abelian_images` gives every generator's image in the
    abelianization, written in the survivor basis.
    """
    names: List[str]
    relators: List[Word]
    schreier: List[Tuple[int, int]] = field(default_factory=list)
    index: int = 1
    survivors: Optional[List[int]] = None
    abelian_images: Optional[Dict[int, Tuple[int, ...]]] = None
    simplified: bool = False
    exhausted: bool = False
    moves: int = 0

    @classmethod
    def from_presentation(cls, p: Presentation) -> "SubgroupPresentation":
        return cls(names=list(p.alphabet.names), relators=list(p.relators))

    @property
    def generators(self) -> List[int]:
        if self.survivors is not None:
            return list(self.survivors)
        return list(range(1, len(self.names) + 1))

    @property
    def generator_count(self) -> int:
        return len(self.generators)

    @property
    def relator_count(self) -> int:
        return len(self.relators)

    def presentation(self) -> Presentation:
        """The presentation on the current generators, renumbered from 1."""
        gens = self.generators
        position = {g: i + 1 for i, g in enumerate(gens)}
        relators = []
        for r in self.relators:
            relators.append(Word((position[abs(x)] if x > 0 else -position[abs(x)]) for x in r.letters))
        return Presentation(Alphabet([self.names[g - 1] for g in gens]), tuple(relators))

    def commuting_pairs(self) -> Set[Tuple[int, int]]:
        pairs = set()
        for r in self.relators:
            pair = _commutator_pair(r.letters)
            if pair is not None:
                pairs.add(pair)
        return pairs

    def is_commutator_form(self) -> bool:
        return all(_commutator_pair(r.letters) is not None for r in self.relators)

    def describe(self) -> str:
        return self.presentation().describe()


def _commutator_pair(letters: Sequence[int]) -> Optional[Tuple[int, int]]:
    """(p, q) with p < q if the cyclic word is x y x^-1 y^-1 on distinct generators."""
    if len(letters) != 4:
        return None
    x, y, x2, y2 = letters
    if x2 != -x or y2 != -y or abs(x) == abs(y):
        return None
    return tuple(sorted((abs(x), abs(y))))


def _rewrite_from(
    t: CosetTable, generator_of: Dict[Tuple[int, int], int], c: int, w: Word,
) -> Tuple[Word, int]:
    """Trace w from coset c, collecting Schreier generators. Returns (rewritten word, end coset)."""
    columns = t.columns
    out: List[int] = []
    for x in w.letters:
        g = abs(x) - 1
        if x > 0:
            s = generator_of.get((c, g))
            if s is not None:
                out.append(s)
            c = columns[2 * g][c]
        else:
            c = columns[2 * g + 1][c]
            s = generator_of.get((c, g))
            if s is not None:
                out.append(-s)
    return free_reduce(out), c


def rewrite_presentation(p: Presentation, t: CosetTable) -> SubgroupPresentation:
    """Rewrite t(c)·r·t(c)^-1 for every coset c and relator r over the Schreier generators."""
    t.require_complete("rewrite_presentation")
    if not t.is_standard:
        t = standardize(t)
    transversal = schreier_transversal(t)
    names = p.alphabet.names
    schreier = []
    generator_of: Dict[Tuple[int, int], int] = {}
    for c in range(t.live_count):
        for g in range(p.rank):
            if (c, g) not in transversal.tree:
                schreier.append((c, g))
                generator_of[(c, g)] = len(schreier)
    relators = []
    for c in range(t.live_count):
        for r in p.relators:
            w, _ = _rewrite_from(t, generator_of, c, r)
            relators.append(w)
    if DEBUG:
        logger.debug(
            f"Rewrote index {t.live_count} subgroup: {len(schreier)} Schreier generators, "
            f"{len(relators)} relators"
        )
    return SubgroupPresentation(
        names=[f"s{c + 1}_{names[g]}" for c, g in schreier],
        relators=relators,
        schreier=schreier,
        index=t.live_count,
    )


class _Piling:
    """
    Normal forms in a right-angled Artin group by piling: one pile per generator, where a letter
    blocks the piles of the generators it does not commute with.
    """

    def __init__(self, generators: Sequence[int], pairs: Set[Tuple[int, int]]):
        self.generators = list(generators)
        self.blocked: Dict[int, List[int]] = {}
        for g in self.generators:
            self.blocked[g] = [
                h for h in self.generators
                if h != g and tuple(sorted((g, h))) not in pairs
            ]

    def normalise(self, letters: Sequence[int]) -> List[int]:
        piles = {g: deque() for g in self.generators}
        for x in letters:
            g, e = abs(x), (1 if x > 0 else -1)
            if piles[g] and piles[g][-1] == -e:
                piles[g].pop()
                for h in self.blocked[g]:
                    piles[h].pop()
            else:
                piles[g].append(e)
                for h in self.blocked[g]:
                    piles[h].append(0)
        # cyclic reduction
        while True:
            g = next((g for g in self.generators
                      if piles[g] and piles[g][0] and piles[g][0] == -piles[g][-1]), None)
            if g is None:
                break
            for h in [g] + self.blocked[g]:
                piles[h].pop()
                piles[h].popleft()
        out = []
        while True:
            g = next((g for g in self.generators if piles[g] and piles[g][0]), None)
            if g is None:
                break
            out.append(g * piles[g][0])
            for h in [g] + self.blocked[g]:
                piles[h].popleft()
        return out


class _Tietze:
    """
    Tietze moves on relators held as strings, one character per signed letter, so that
    substitution and substring search run on str methods.
    """

    def __init__(
        self,
        sp: SubgroupPresentation,
        budget: int,
        max_total_length: int,
        status_callback: Optional[Callable[[str], None]] = None,
    ):
        self.budget = budget
        self.max_total_length = max_total_length
        self.status_callback = status_callback
        self.alive: Set[int] = set(sp.generators)
        self.char: Dict[int, str] = {}
        self.letter: Dict[str, int] = {}
        code = 0x100
        for g in range(1, len(sp.names) + 1):
            for x in (g, -g):
                if 0xD800 <= code <= 0xDFFF:
                    code = 0xE000
                self.char[x] = chr(code)
                self.letter[chr(code)] = x
                code += 1
        self.inverse_table = {ord(self.char[x]): ord(self.char[-x]) for x in self.char}
        self.rels: Dict[int, str] = {}
        self.occ: Dict[int, Set[int]] = defaultdict(set)
        self.canon: Dict[str, int] = {}
        self.heap: List[Tuple[int, int]] = []
        self.next_id = 0
        self.total = 0
        self.moves = 0
        self.eliminated: List[Tuple[int, str]] = []
        for r in sp.relators:
            self.add("".join(self.char[x] for x in r.letters))

    # word helpers

    def inv(self, s: str) -> str:
        return s.translate(self.inverse_table)[::-1]

    def reduce(self, s: str) -> str:
        inverse_table = self.inverse_table
        stack: List[str] = []
        for ch in s:
            if stack and ord(stack[-1]) == inverse_table[ord(ch)]:
                stack.pop()
            else:
                stack.append(ch)
        i, j = 0, len(stack) - 1
        while i < j and ord(stack[i]) == inverse_table[ord(stack[j])]:
            i += 1
            j -= 1
        return "".join(stack[i:j + 1])

    def canonical(self, s: str) -> str:
        if len(s) > CANONICAL_LENGTH:
            return s
        t = self.inv(s)
        return min(min(s[i:] + s[:i], t[i:] + t[:i]) for i in range(len(s)))

    def gens_of(self, s: str) -> Set[int]:
        return {abs(self.letter[ch]) for ch in set(s)}

    # relator bookkeeping

    def add(self, s: str) -> Optional[int]:
        s = self.reduce(s)
        if not s:
            return None
        key = self.canonical(s)
        if key in self.canon:
            return None
        rid = self.next_id
        self.next_id += 1
        self.rels[rid] = s
        self.canon[key] = rid
        for g in self.gens_of(s):
            self.occ[g].add(rid)
        heapq.heappush(self.heap, (len(s), rid))
        self.total += len(s)
        return rid

    def remove(self, rid: int) -> str:
        s = self.rels.pop(rid)
        self.canon.pop(self.canonical(s), None)
        for g in self.gens_of(s):
            self.occ[g].discard(rid)
        self.total -= len(s)
        return s

    def replace(self, rid: int, s: str):
        self.remove(rid)
        self.add(s)

    def count(self, s: str, g: int) -> int:
        return s.count(self.char[g]) + s.count(self.char[-g])

    # moves

    def eliminate(self) -> bool:
        """Eliminate one generator using the shortest relator in which it occurs once."""
        stuck = []
        done = False
        while self.heap:
            length, rid = heapq.heappop(self.heap)
            s = self.rels.get(rid)
            if s is None or len(s) != length:
                continue
            best = None
            for g in sorted(self.gens_of(s)):
                if self.count(s, g) != 1:
                    continue
                uses = len(self.occ[g])
                if best is None or uses < best[1]:
                    best = (g, uses)
            if best is None:
                # stays ineligible until the relator itself changes, which gives it a new id
                continue
            g = best[0]
            growth = (length - 2) * sum(self.count(self.rels[o], g) for o in self.occ[g] if o != rid)
            if self.total + growth > self.max_total_length:
                stuck.append((length, rid))
                continue
            self._eliminate_with(g, rid)
            done = True
            break
        for item in stuck:
            heapq.heappush(self.heap, item)
        return done

    def _eliminate_with(self, g: int, rid: int):
        s = self.remove(rid)
        pos = next(i for i, ch in enumerate(s) if abs(self.letter[ch]) == g)
        rest = s[pos + 1:] + s[:pos]
        # rest·g^e = 1
        expr = self.inv(rest) if self.letter[s[pos]] > 0 else rest
        expr_inv = self.inv(expr)
        ch, ich = self.char[g], self.char[-g]
        for other in sorted(self.occ[g]):
            new = self.rels[other].replace(ch, expr).replace(ich, expr_inv)
            self.replace(other, new)
        self.alive.discard(g)
        self.occ.pop(g, None)
        self.eliminated.append((g, expr))
        self.moves += 1

    def substring_reduce(self) -> bool:
        """Shorten relators that contain more than half of a cyclic rotation of a shorter one."""
        if len(self.rels) > SUBSTRING_RELATORS:
            return False
        changed = False
        for rid in sorted(self.rels, key=lambda k: (len(self.rels[k]), k)):
            r = self.rels.get(rid)
            if r is None or len(r) > SUBSTRING_PIECE_LENGTH:
                continue
            L = len(r)
            pieces = {}
            for word in (r, self.inv(r)):
                for i in range(L):
                    rot = word[i:] + word[:i]
                    for k in range(L, L // 2, -1):
                        pieces.setdefault(rot[:k], self.inv(rot[k:]))
            ordered = sorted(pieces.items(), key=lambda kv: -len(kv[0]))
            for other in sorted(self.rels):
                if other == rid or other not in self.rels:
                    continue
                s = self.rels[other]
                if len(s) < L:
                    continue
                for u, v in ordered:
                    if len(u) > len(s):
                        continue
                    p = (s + s[:len(u) - 1]).find(u)
                    if p < 0:
                        continue
                    rotated = (s + s)[p:p + len(s)]
                    self.replace(other, v + rotated[len(u):])
                    self.moves += 1
                    changed = True
                    break
                if self.moves >= self.budget:
                    return changed
        return changed

    def commutation_closure(self) -> bool:
        """
        Normalize relators in the right-angled Artin group of the commutator relators present.
        Relators trivial there are consequences and get deleted; relators that become
        commutators add a commuting pair.
        """
        if len(self.alive) > CLOSURE_GENERATORS:
            return False
        changed = False
        while True:
            pairs: Dict[Tuple[int, int], int] = {}
            for rid, s in self.rels.items():
                pair = _commutator_pair([self.letter[ch] for ch in s])
                if pair is not None and pair not in pairs:
                    pairs[pair] = rid
            piling = _Piling(sorted(self.alive), set(pairs))
            grew = False
            for rid in sorted(self.rels):
                if rid in pairs.values():
                    continue
                s = self.rels[rid]
                normal = piling.normalise([self.letter[ch] for ch in s])
                if not normal:
                    self.remove(rid)
                    self.moves += 1
                    changed = True
                    continue
                pair = _commutator_pair(normal)
                if pair is not None and pair not in pairs:
                    self.replace(rid, "".join(self.char[x] for x in normal))
                    self.moves += 1
                    changed = grew = True
                    break
                if len(normal) < len(s):
                    self.replace(rid, "".join(self.char[x] for x in normal))
                    self.moves += 1
                    changed = True
            if not grew:
                return changed

    def run(self) -> bool:
        """Returns True when the budget ran out before a fixed point."""
        rounds = 0
        while True:
            progress = False
            while self.moves < self.budget and self.eliminate():
                progress = True
                if self.status_callback and self.moves % 500 == 0:
                    self.status_callback(
                        f"Tietze: {len(self.alive)} generators, {len(self.rels)} relators"
                    )
            if self.moves >= self.budget:
                return True
            progress |= self.substring_reduce()
            progress |= self.commutation_closure()
            rounds += 1
            if DEBUG:
                logger.debug(
                    f"Tietze round {rounds}: {len(self.alive)} generators, {len(self.rels)} relators, "
                    f"total length {self.total}, {self.moves} moves"
                )
            if self.moves >= self.budget:
                return True
            if not progress:
                return False

    def abelian_images(self) -> Dict[int, Tuple[int, ...]]:
        survivors = sorted(self.alive)
        vectors: Dict[int, List[int]] = {}
        for j, g in enumerate(survivors):
            v = [0] * len(survivors)
            v[j] = 1
            vectors[g] = v
        for g, expr in reversed(self.eliminated):
            v = [0] * len(survivors)
            for ch in expr:
                x = self.letter[ch]
                sign = 1 if x > 0 else -1
                for j, y in enumerate(vectors[abs(x)]):
                    v[j] += sign * y
            vectors[g] = v
        return {g: tuple(v) for g, v in vectors.items()}

    def relators(self) -> List[Word]:
        order = sorted(self.rels, key=lambda k: (len(self.rels[k]), self.rels[k]))
        return [Word(self.letter[ch] for ch in self.rels[k]) for k in order]


def tietze_simplify(
    sp: SubgroupPresentation,
    budget: int = TIETZE_BUDGET,
    max_total_length: int = TIETZE_MAX_TOTAL_LENGTH,
    status_callback: Optional[Callable[[str], None]] = None,
) -> SubgroupPresentation:
    """
    Eliminate generators through the shortest relators, shorten relators against each other and
    drop relators that follow from commutation relations, until nothing applies. Running out of
    budget returns the current state with `exhausted` set.
    """
    engine = _Tietze(sp, budget, max_total_length, status_callback)
    exhausted = engine.run()
    images = engine.abelian_images()
    if sp.abelian_images is not None:
        # compose with the images of an earlier simplification
        old_survivors = sp.generators
        composed = {}
        for g, old in sp.abelian_images.items():
            v = [0] * len(engine.alive)
            for coeff, h in zip(old, old_survivors):
                for j, y in enumerate(images[h]):
                    v[j] += coeff * y
            composed[g] = tuple(v)
        images = composed
    result = SubgroupPresentation(
        names=sp.names,
        relators=engine.relators(),
        schreier=sp.schreier,
        index=sp.index,
        survivors=sorted(engine.alive),
        abelian_images=images,
        simplified=True,
        exhausted=exhausted,
        moves=sp.moves + engine.moves,
    )
    if exhausted:
        logger.warning(f"Tietze budget of {budget} moves exhausted")
    if DEBUG:
        logger.debug(f"Simplified to {result.generator_count} generators, {result.relator_count} relators")
    return result


def abelian_quotient_invariants(sp: SubgroupPresentation) -> List[int]:
    """Invariants of the abelianization, GAP style: torsion divisors then one 0 per free factor."""
    if not sp.simplified:
        sp = tietze_simplify(sp)
    p = sp.presentation()
    rows = [r.exponent_sums(p.rank) for r in p.relators]
    return abelian_invariants(IntMatrix(rows) if rows else IntMatrix([]), p.rank)


@dataclass
class CoordinateMap:
    """
    Exact coordinates of subgroup elements in the basis x_1..x_4. Each Schreier generator's
    coordinates are precomputed, so a word is traced once and its vector summed.
    """
    presentation: Presentation
    table: CosetTable
    transversal: SchreierTransversal
    basis: List[Word]
    subgroup: SubgroupPresentation
    basis_matrix: IntMatrix
    # generator_coords[g][c] = coordinates of s_{c,g} (zero on tree edges)
    generator_coords: List[List[Tuple[int, ...]]]

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def determinant(self) -> int:
        return self.basis_matrix.det()

    def trace_vector(self, c: int, w: Word) -> Tuple[Tuple[int, ...], int]:
        """Sum of Schreier-generator coordinates along w from coset c, and the end coset."""
        columns = self.table.columns
        coords = self.generator_coords
        v = [0] * self.rank
        for x in w.letters:
            g = abs(x) - 1
            if x > 0:
                s = coords[g][c]
                c = columns[2 * g][c]
                for j in range(len(v)):
                    v[j] += s[j]
            else:
                c = columns[2 * g + 1][c]
                s = coords[g][c]
                for j in range(len(v)):
                    v[j] -= s[j]
        return tuple(v), c

    def coordinates(self, w: Word) -> Tuple[int, ...]:
        v, end = self.trace_vector(0, w)
        if end != 0:
            raise CertificationError(
                "not in subgroup", f"{self.presentation.format(w)} does not lie in the subgroup"
            )
        return v

    def to_dict(self) -> dict:
        simplified = self.subgroup.presentation()
        return {
            "index": self.table.live_count,
            "basis": [self.presentation.format(w) for w in self.basis],
            "basis_matrix": self.basis_matrix.to_list(),
            "determinant": self.determinant,
            "subgroup": {
                "generators": self.subgroup.generator_count,
                "relators": [simplified.format(r) for r in simplified.relators],
            },
        }


def certify_free_abelian_rank4(
    p: Presentation,
    t: CosetTable,
    basis: Sequence[Word],
    budget: int = TIETZE_BUDGET,
    status_callback: Optional[Callable[[str], None]] = None,
) -> CoordinateMap:
    """
    Certify that the subgroup of t is free abelian with basis `basis`:
    the simplified Reidemeister-Schreier presentation must be the six commutators on four
    generators, and the basis words must have a unimodular matrix in that generating set.
    """
    rank = 4
    if len(basis) != rank:
        raise CertificationError("not a basis", f"expected {rank} basis words, got {len(basis)}")
    t.require_complete("certify_free_abelian_rank4")
    if not t.is_standard:
        t = standardize(t)
    for w in basis:
        if t.trace(0, w) != 0:
            raise CertificationError("not in subgroup", f"{p.format(w)} does not lie in the subgroup")

    sp = tietze_simplify(rewrite_presentation(p, t), budget=budget, status_callback=status_callback)
    pairs = sp.commuting_pairs()
    expected = set(combinations(sp.generators, 2))
    if sp.generator_count != rank or not sp.is_commutator_form() or pairs != expected:
        logger.error(
            f"Subgroup presentation did not reach commutator form: {sp.generator_count} generators, "
            f"{sp.relator_count} relators"
        )
        raise CertificationError(
            "unproven",
            f"simplification stopped at {sp.generator_count} generators and {sp.relator_count} relators"
            + (" (budget exhausted)" if sp.exhausted else ""),
        )

    transversal = schreier_transversal(t)
    letter_of = {pair: k + 1 for k, pair in enumerate(sp.schreier)}
    images = sp.abelian_images

    def abelian(c: int, w: Word) -> List[int]:
        v = [0] * rank
        word, _ = _rewrite_from(t, letter_of, c, w)
        for x in word.letters:
            sign = 1 if x > 0 else -1
            for j, y in enumerate(images[abs(x)]):
                v[j] += sign * y
        return v

    basis_matrix = IntMatrix([abelian(0, w) for w in basis])
    det = basis_matrix.det()
    if det not in (1, -1):
        logger.error(f"Basis matrix {basis_matrix.to_list()} has determinant {det}")
        raise CertificationError("not a basis", f"basis matrix has determinant {det}")
    change = basis_matrix.inverse()

    zero = (0,) * rank
    generator_coords: List[List[Tuple[int, ...]]] = []
    for g in range(p.rank):
        column = []
        for c in range(t.live_count):
            k = letter_of.get((c, g))
            column.append(zero if k is None else change.row_times(images[k]))
        generator_coords.append(column)
    if DEBUG:
        logger.debug(f"Certified free abelian subgroup of index {t.live_count}, basis determinant {det}")
    return CoordinateMap(
        presentation=p,
        table=t,
        transversal=transversal,
        basis=list(basis),
        subgroup=sp,
        basis_matrix=basis_matrix,
        generator_coords=generator_coords,
    )


def coordinates(cm: CoordinateMap, w: Word) -> Tuple[int, ...]:
    return cm.coordinates(w)
