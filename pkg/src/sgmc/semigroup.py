"""Finite transformation semigroups with an adjoined identity (and zero).

Elements are total maps on a state set, stored as tuples of image indices.
The composition convention is fixed once and for all:

    (s * t)(w) = s(t(w))        -- the RIGHT factor acts first.

This is the unique convention consistent with reading the two-state worked
chain off its right Cayley graph (the word 31 must multiply to the constant
map onto the second state).  A fresh identity is always adjoined as element
id 0, distinct from any generated identity map.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import CapExceeded

Transformation = tuple  # tuple[int, ...]: images of 0..n-1

DEFAULT_MAX_ELEMENTS = 10**5

IDENTITY_NAME = "\U0001d7d9"  # the symbol used for the adjoined identity


def compose(s: Transformation, t: Transformation) -> Transformation:
    """(s*t)(w) = s(t(w)); right factor acts first."""
    return tuple(s[i] for i in t)


@dataclass(frozen=True)
class IdealInfo:
    members: frozenset  # element ids
    is_left_zero: bool


class FiniteSemigroup:
    """Closure of a set of labelled transformations, plus the fresh identity.

    Element ids are assigned in BFS order over words in length-lex order
    (labels taken in input order), so the numbering is deterministic.  Each
    element keeps the first word that produced it; those witness words name
    graph vertices and report keys.
    """

    def __init__(self):
        self.labels = []          # generator labels, input order
        self.gens = {}            # label -> element id
        self.transform = [None]   # element id -> Transformation (None: abstract)
        self.words = [()]         # element id -> first witness word
        self.identity_id = 0
        self.zero_id = None
        self.zero_label = None
        self.n_states = 0
        self._index = {}          # Transformation -> element id
        self._ideal = None

    # -- construction -----------------------------------------------------

    @classmethod
    def generate(cls, generators, max_elements: int = DEFAULT_MAX_ELEMENTS):
        """Close labelled transformations under composition.

        generators: iterable of (label, images) with all images on one state
        set.  Raises CapExceeded if the closure grows past max_elements.
        """
        gens = [(str(label), tuple(images)) for label, images in generators]
        if not gens:
            raise ValueError("at least one generator is required")
        n = len(gens[0][1])
        if n < 1:
            raise ValueError("state set must be nonempty")
        s = cls()
        s.n_states = n
        queue = []
        for label, images in gens:
            if len(images) != n or any(not 0 <= i < n for i in images):
                raise ValueError(f"generator {label!r} is not a map on {n} states")
            if label in s.gens:
                raise ValueError(f"duplicate generator label {label!r}")
            s.labels.append(label)
            eid = s._index.get(images)
            if eid is None:
                eid = s._add(images, (label,), max_elements)
                queue.append(eid)
            s.gens[label] = eid
        gen_images = [s.transform[s.gens[a]] for a in s.labels]
        head = 0
        while head < len(queue):
            eid = queue[head]
            head += 1
            base = s.transform[eid]
            word = s.words[eid]
            for label, gimg in zip(s.labels, gen_images):
                product = compose(base, gimg)
                if product not in s._index:
                    new_id = s._add(product, word + (label,), max_elements)
                    queue.append(new_id)
        return s

    def _add(self, images, word, max_elements):
        if len(self.transform) > max_elements:
            raise CapExceeded(
                f"semigroup exceeds {max_elements} elements; raise the cap"
            )
        eid = len(self.transform)
        self.transform.append(images)
        self.words.append(word)
        self._index[images] = eid
        return eid

    def adjoin_zero(self, label: str = "□") -> "FiniteSemigroup":
        """Return a new semigroup with an absorbing zero adjoined as a generator."""
        if label in self.gens:
            raise ValueError(f"zero label {label!r} collides with a generator")
        if self.zero_id is not None:
            raise ValueError("zero already adjoined")
        s = FiniteSemigroup()
        s.labels = self.labels + [label]
        s.transform = list(self.transform) + [None]
        s.words = list(self.words) + [(label,)]
        s.n_states = self.n_states
        s._index = dict(self._index)
        s.zero_id = len(self.transform)
        s.zero_label = label
        s.gens = dict(self.gens)
        s.gens[label] = s.zero_id
        return s

    # -- structure ---------------------------------------------------------

    def element_ids(self):
        """All ids: identity first, generated elements, then the zero if any."""
        return range(len(self.transform))

    def size(self) -> int:
        """|S|, excluding the adjoined identity."""
        return len(self.transform) - 1

    def name(self, eid: int) -> str:
        if eid == self.identity_id:
            return IDENTITY_NAME
        return "".join(self.words[eid])

    def mul(self, i: int, j: int) -> int:
        if i == self.identity_id:
            return j
        if j == self.identity_id:
            return i
        z = self.zero_id
        if z is not None and (i == z or j == z):
            return z
        return self._index[compose(self.transform[i], self.transform[j])]

    def eval_word(self, word) -> int:
        """Multiply out a word of generator labels, starting from the identity."""
        eid = self.identity_id
        for label in word:
            eid = self.mul(eid, self.gens[label])
        return eid

    def _principal_ideal(self, seed: int) -> frozenset:
        gen_ids = sorted(set(self.gens.values()))
        members = {seed}
        queue = [seed]
        while queue:
            t = queue.pop()
            for g in gen_ids:
                for product in (self.mul(g, t), self.mul(t, g)):
                    if product not in members:
                        members.add(product)
                        queue.append(product)
        return frozenset(members)

    def minimal_ideal(self) -> IdealInfo:
        """The unique minimal two-sided ideal K(S), with its left-zero flag.

        K(S) is the smallest principal ideal generated from inside any one
        principal ideal: every principal ideal contains K(S), and elements of
        K(S) generate exactly K(S).
        """
        if self._ideal is not None:
            return self._ideal
        if self.size() == 0:
            raise ValueError("semigroup has no elements besides the identity")
        if self.zero_id is not None:
            self._ideal = IdealInfo(frozenset({self.zero_id}), True)
            return self._ideal
        first = self._principal_ideal(1)
        best = first
        for t in sorted(first):
            ideal = self._principal_ideal(t)
            if len(ideal) < len(best):
                best = ideal
        members = best
        left_zero = all(
            self.mul(x, y) == x for x in members for y in members
        )
        self._ideal = IdealInfo(members, left_zero)
        return self._ideal
