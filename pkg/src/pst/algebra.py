"""Finite bounded distributive lattices and Heyting algebras.

Elements are dense indices ``0..size-1``.  Order, meet, join and relative
pseudo-complement tables are precomputed at construction, so every lattice
operation downstream is a table lookup.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

from .errors import CapExceeded, PstError

ENUM_HARD_CAP = 7
REFINABLE_HARD_CAP = 15


class AlgebraError(PstError):
    """Base for lattice / algebra construction failures."""


class NotAPoset(AlgebraError):
    def __init__(self, why: str, pair: tuple[int, int]):
        super().__init__(f"not a partial order ({why} fails at {pair})")
        self.why = why
        self.pair = pair


class NoMeet(AlgebraError):
    def __init__(self, pair: tuple[int, int]):
        super().__init__(f"pair {pair} has no greatest lower bound")
        self.pair = pair


class NoJoin(AlgebraError):
    def __init__(self, pair: tuple[int, int]):
        super().__init__(f"pair {pair} has no least upper bound")
        self.pair = pair


class NotBounded(AlgebraError):
    def __init__(self, which: str):
        super().__init__(f"lattice has no {which} element")
        self.which = which


class NotDistributive(AlgebraError):
    def __init__(self, triple: tuple[int, int, int]):
        super().__init__(
            f"meet does not distribute over join at {triple}; "
            "no Heyting implication exists"
        )
        self.triple = triple


@dataclass(frozen=True)
class FiniteLattice:
    """A finite bounded lattice given by its order relation.

    ``leq[i][j]`` is True iff element i is below element j.  ``meet`` and
    ``join`` are total tables; ``top`` / ``bottom`` are element indices.
    """

    size: int
    leq: tuple[tuple[bool, ...], ...]
    meet: tuple[tuple[int, ...], ...]
    join: tuple[tuple[int, ...], ...]
    top: int
    bottom: int

    def le(self, x: int, y: int) -> bool:
        return self.leq[x][y]


@dataclass(frozen=True)
class FiniteHeytingAlgebra:
    """A finite Heyting algebra: distributive lattice plus implication.

    ``imp[x][y]`` is the relative pseudo-complement x -> y, the largest z
    with x /\\ z <= y.  ``boolean_flag`` records whether every element is
    complemented (x \\/ (x -> 0) = 1).
    """

    lattice: FiniteLattice
    imp: tuple[tuple[int, ...], ...]
    boolean_flag: bool

    @property
    def size(self) -> int:
        return self.lattice.size

    @property
    def top(self) -> int:
        return self.lattice.top

    @property
    def bottom(self) -> int:
        return self.lattice.bottom

    def le(self, x: int, y: int) -> bool:
        return self.lattice.leq[x][y]

    def meet_(self, x: int, y: int) -> int:
        return self.lattice.meet[x][y]

    def join_(self, x: int, y: int) -> int:
        return self.lattice.join[x][y]

    def imp_(self, x: int, y: int) -> int:
        return self.imp[x][y]

    def neg_(self, x: int) -> int:
        """Pseudo-complement x -> 0."""
        return self.imp[x][self.lattice.bottom]

    def meet_all(self, xs: Iterable[int]) -> int:
        out = self.lattice.top
        for x in xs:
            out = self.lattice.meet[out][x]
        return out

    def join_all(self, xs: Iterable[int]) -> int:
        out = self.lattice.bottom
        for x in xs:
            out = self.lattice.join[out][x]
        return out

    def elements(self) -> range:
        return range(self.lattice.size)


def validate_lattice(leq_rows: Sequence[Sequence[object]]) -> FiniteLattice:
    """Check a candidate order relation and derive the lattice tables.

    Accepts any square matrix of truthy/falsy entries.  Raises the first
    failed property with the offending pair.
    """
    n = len(leq_rows)
    if n < 1 or any(len(row) != n for row in leq_rows):
        raise NotAPoset("shape", (n, n))
    leq = tuple(tuple(bool(v) for v in row) for row in leq_rows)

    for i in range(n):
        if not leq[i][i]:
            raise NotAPoset("reflexivity", (i, i))
    for i in range(n):
        for j in range(n):
            if i != j and leq[i][j] and leq[j][i]:
                raise NotAPoset("antisymmetry", (i, j))
    for i in range(n):
        for j in range(n):
            if not leq[i][j]:
                continue
            for k in range(n):
                if leq[j][k] and not leq[i][k]:
                    raise NotAPoset("transitivity", (i, k))

    meet = [[0] * n for _ in range(n)]
    join = [[0] * n for _ in range(n)]
    for x in range(n):
        for y in range(n):
            lower = [w for w in range(n) if leq[w][x] and leq[w][y]]
            glb = [w for w in lower if all(leq[v][w] for v in lower)]
            if not glb:
                raise NoMeet((x, y))
            meet[x][y] = glb[0]
            upper = [w for w in range(n) if leq[x][w] and leq[y][w]]
            lub = [w for w in upper if all(leq[w][v] for v in upper)]
            if not lub:
                raise NoJoin((x, y))
            join[x][y] = lub[0]

    tops = [t for t in range(n) if all(leq[x][t] for x in range(n))]
    if not tops:
        raise NotBounded("top")
    bottoms = [b for b in range(n) if all(leq[b][x] for x in range(n))]
    if not bottoms:
        raise NotBounded("bottom")

    return FiniteLattice(
        size=n,
        leq=leq,
        meet=tuple(tuple(row) for row in meet),
        join=tuple(tuple(row) for row in join),
        top=tops[0],
        bottom=bottoms[0],
    )


def derive_heyting(lat: FiniteLattice) -> FiniteHeytingAlgebra:
    """Compute the implication table x -> y = max { z : x /\\ z <= y }.

    Fails with the offending triple when meet does not distribute over
    join; residuation is then unsatisfiable.
    """
    n = lat.size
    for x in range(n):
        for y in range(n):
            for z in range(n):
                if lat.meet[x][lat.join[y][z]] != lat.join[lat.meet[x][y]][lat.meet[x][z]]:
                    raise NotDistributive((x, y, z))

    imp = [[0] * n for _ in range(n)]
    for x in range(n):
        for y in range(n):
            candidates = [z for z in range(n) if lat.leq[lat.meet[x][z]][y]]
            best = lat.bottom
            for z in candidates:
                best = lat.join[best][z]
            # distributivity guarantees the join of candidates is a candidate
            assert lat.leq[lat.meet[x][best]][y]
            imp[x][y] = best

    # residuation must now hold for every triple
    for x in range(n):
        for y in range(n):
            for z in range(n):
                assert (lat.leq[lat.meet[x][y]][z]) == (lat.leq[x][imp[y][z]])
    flag = all(lat.join[x][imp[x][lat.bottom]] == lat.top for x in range(n))
    return FiniteHeytingAlgebra(
        lattice=lat,
        imp=tuple(tuple(row) for row in imp),
        boolean_flag=flag,
    )


def is_boolean(h: FiniteHeytingAlgebra) -> bool:
    """True iff every element has a complement: x \\/ (x -> 0) = 1."""
    lat = h.lattice
    return all(lat.join[x][h.imp[x][lat.bottom]] == lat.top for x in range(lat.size))


def heyting_from_leq(leq_rows: Sequence[Sequence[object]]) -> FiniteHeytingAlgebra:
    return derive_heyting(validate_lattice(leq_rows))


def chain(n: int) -> FiniteHeytingAlgebra:
    """The n-element chain 0 < 1 < ... < n-1 as a Heyting algebra."""
    return heyting_from_leq([[i <= j for j in range(n)] for i in range(n)])


def boolean_algebra(n_atoms: int) -> FiniteHeytingAlgebra:
    """The Boolean algebra of subsets of an n_atoms-element set."""
    size = 1 << n_atoms
    return heyting_from_leq([[(i & j) == i for j in range(size)] for i in range(size)])


# ---------------------------------------------------------------------------
# enumeration of distributive lattices up to isomorphism
# ---------------------------------------------------------------------------


def _labelled_posets(k: int) -> Iterator[tuple[int, ...]]:
    """All posets on 0..k-1 whose order refines the integer order.

    Every finite poset has a linear extension, so every isomorphism class
    appears at least once.  Rows are bitmasks: bit j of row i set iff i <= j.
    """
    if k == 0:
        yield ()
        return
    pairs = [(i, j) for i in range(k) for j in range(i + 1, k)]
    for bits in range(1 << len(pairs)):
        rows = [1 << i for i in range(k)]
        for idx, (i, j) in enumerate(pairs):
            if bits >> idx & 1:
                rows[i] |= 1 << j
        ok = True
        for i in range(k):
            acc = rows[i]
            m = rows[i]
            while m:
                j = (m & -m).bit_length() - 1
                m &= m - 1
                acc |= rows[j]
            if acc != rows[i]:
                ok = False
                break
        if ok:
            yield tuple(rows)


def _downsets(rows: tuple[int, ...], limit: int) -> list[int] | None:
    """Downward-closed subsets as bitmasks, or None if more than limit."""
    k = len(rows)
    down = [0] * k
    for i in range(k):
        for j in range(k):
            if rows[j] >> i & 1:  # j <= i
                down[i] |= 1 << j
    out = []
    for s in range(1 << k):
        closed = True
        m = s
        while m:
            i = (m & -m).bit_length() - 1
            m &= m - 1
            if down[i] & ~s:
                closed = False
                break
        if closed:
            out.append(s)
            if len(out) > limit:
                return None
    return out


def canonical_key(h: FiniteHeytingAlgebra) -> bytes:
    """Order-relation encoding minimised over isomorphisms.

    Permutations are restricted to classes preserving (|down-set|, |up-set|),
    which every isomorphism must respect.
    """
    n = h.size
    leq = h.lattice.leq
    inv = []
    for i in range(n):
        d = sum(1 for j in range(n) if leq[j][i])
        u = sum(1 for j in range(n) if leq[i][j])
        inv.append((d, u))
    order = sorted(range(n), key=lambda i: inv[i])
    classes: list[list[int]] = []
    for i in order:
        if classes and inv[classes[-1][0]] == inv[i]:
            classes[-1].append(i)
        else:
            classes.append([i])
    best: bytes | None = None
    for parts in itertools.product(*(itertools.permutations(c) for c in classes)):
        seq = [i for part in parts for i in part]  # seq[new] = old
        enc = bytes(
            1 if leq[seq[a]][seq[b]] else 0 for a in range(n) for b in range(n)
        )
        if best is None or enc < best:
            best = enc
    assert best is not None
    return best


def enumerate_heyting(max_size: int, hard_cap: int = ENUM_HARD_CAP) -> Iterator[FiniteHeytingAlgebra]:
    """All distributive lattices with at most max_size elements, up to
    isomorphism, each carrying its Heyting implication.

    Uses the down-set representation: every finite distributive lattice is
    the lattice of down-sets of a finite poset, and non-isomorphic posets
    give non-isomorphic lattices.  Deterministic order: by size, then by
    canonical key.
    """
    if max_size > hard_cap:
        raise CapExceeded(f"enumeration capped at size {hard_cap}")
    found: dict[bytes, FiniteHeytingAlgebra] = {}
    for k in range(0, max_size):
        for rows in _labelled_posets(k):
            downs = _downsets(rows, max_size)
            if downs is None:
                continue
            downs.sort(key=lambda s: (bin(s).count("1"), s))
            leq = [[(a & b) == a for b in downs] for a in downs]
            alg = derive_heyting(validate_lattice(leq))
            key = canonical_key(alg)
            if key not in found:
                found[key] = alg
    for _, alg in sorted(found.items(), key=lambda kv: (kv[1].size, kv[0])):
        yield alg


# ---------------------------------------------------------------------------
# refinability
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RefinabilityReport:
    refinable: bool
    certificates: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    failing_subset: tuple[int, ...] | None

    def __bool__(self) -> bool:
        return self.refinable


def _is_antichain(h: FiniteHeytingAlgebra, elems: Sequence[int]) -> bool:
    leq = h.lattice.leq
    for a, b in itertools.combinations(elems, 2):
        if leq[a][b] or leq[b][a]:
            return False
    return True


def check_refinable(h: FiniteHeytingAlgebra, hard_cap: int = REFINABLE_HARD_CAP) -> RefinabilityReport:
    """Search, for every subset A, an antichain B refining A with the same
    join.  A refining antichain candidate is verified, never assumed; the
    maximal elements of A are merely tried first.
    """
    n = h.size
    if n > hard_cap:
        raise CapExceeded(f"refinability check capped at {hard_cap} elements")
    leq = h.lattice.leq
    certs = []
    for smask in range(1 << n):
        subset = tuple(i for i in range(n) if smask >> i & 1)
        target = h.join_all(subset)
        allowed = [b for b in range(n) if any(leq[b][a] for a in subset)]
        maximal = tuple(
            a for a in subset if not any(b != a and leq[a][b] for b in subset)
        )
        witness: tuple[int, ...] | None = None
        candidates = itertools.chain(
            [maximal],
            (
                tuple(c)
                for r in range(len(allowed) + 1)
                for c in itertools.combinations(allowed, r)
            ),
        )
        for cand in candidates:
            if not all(any(leq[b][a] for a in subset) for b in cand):
                continue
            if not _is_antichain(h, cand):
                continue
            if h.join_all(cand) != target:
                continue
            witness = cand
            break
        if witness is None:
            return RefinabilityReport(False, tuple(certs), subset)
        certs.append((subset, witness))
    return RefinabilityReport(True, tuple(certs), None)


# ---------------------------------------------------------------------------
# text format
# ---------------------------------------------------------------------------


def _strip_comments(text: str) -> list[str]:
    out = []
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            out.append(line)
    return out


class AlgebraFormatError(AlgebraError):
    pass


def parse_algebra_text(text: str) -> tuple[str, FiniteHeytingAlgebra]:
    """Parse the line-oriented algebra format; returns (ident, algebra)."""
    lines = _strip_comments(text)
    ident, alg, rest = _parse_algebra_block(lines)
    if rest:
        raise AlgebraFormatError(f"trailing content after algebra block: {rest[0]!r}")
    return ident, alg


def _parse_algebra_block(lines: list[str]) -> tuple[str, FiniteHeytingAlgebra, list[str]]:
    if not lines or not lines[0].startswith("algebra"):
        raise AlgebraFormatError("expected 'algebra <ident>'")
    parts = lines[0].split()
    if len(parts) != 2:
        raise AlgebraFormatError("expected 'algebra <ident>'")
    ident = parts[1]
    if len(lines) < 2 or not lines[1].startswith("size"):
        raise AlgebraFormatError("expected 'size <N>'")
    try:
        n = int(lines[1].split()[1])
    except (IndexError, ValueError) as exc:
        raise AlgebraFormatError("bad size line") from exc
    if len(lines) < 3 or lines[2] != "leq":
        raise AlgebraFormatError("expected 'leq'")
    rows = lines[3 : 3 + n]
    if len(rows) != n or any(len(r.replace(" ", "")) != n for r in rows):
        raise AlgebraFormatError(f"expected {n} matrix rows of {n} characters")
    matrix = []
    for r in rows:
        r = r.replace(" ", "")
        if any(c not in "01" for c in r):
            raise AlgebraFormatError(f"matrix row {r!r} must be 0/1")
        matrix.append([c == "1" for c in r])
    if len(lines) < 4 + n or lines[3 + n] != "end":
        raise AlgebraFormatError("expected 'end' after matrix")
    alg = derive_heyting(validate_lattice(matrix))
    return ident, alg, lines[4 + n :]


def format_algebra_text(ident: str, h: FiniteHeytingAlgebra) -> str:
    rows = [
        "".join("1" if v else "0" for v in row) for row in h.lattice.leq
    ]
    return "\n".join(
        [f"algebra {ident}", f"size {h.size}", "leq", *rows, "end", ""]
    )


def load_algebra(path: str) -> tuple[str, FiniteHeytingAlgebra]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_algebra_text(fh.read())
