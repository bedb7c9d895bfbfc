"""Regular-expression dialect for field constraints.

Supports concatenation, alternation ``|``, grouping, character classes
with ranges, ``.``, escapes, and the quantifiers ``* + ? {m,n}``.
``pattern=`` constraints are checked with anchored full-match semantics,
``exclude_pattern=`` with substring semantics.  The escapes ``\\0`` and
``\\1`` denote literal bit characters, which is how patterns over Binary
fields (char8_pattern) are written.

Two backends share one parser: checking goes through a translation to
Python's ``re`` module, while generation compiles the pattern to an NFA,
determinizes it against the field's alphabet, and samples accepted
strings by counting them per length.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from random import Random

from .errors import UnsatisfiableConstraint, WirespecError


class PatternError(WirespecError):
    pass


# --- AST ---------------------------------------------------------------------

@dataclass(frozen=True)
class Lit:
    chars: frozenset  # one transition over any of these characters


@dataclass(frozen=True)
class Dot:
    pass


@dataclass(frozen=True)
class Seq:
    parts: tuple


@dataclass(frozen=True)
class Alt:
    options: tuple


@dataclass(frozen=True)
class Star:
    inner: object


@dataclass(frozen=True)
class Empty:
    pass


_SIMPLE_ESCAPES = {"n": "\n", "r": "\r", "t": "\t", "0": "0", "1": "1"}
_QUANT_SUFFIX = {"*", "+", "?", "{"}


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg: str) -> PatternError:
        return PatternError(f"pattern error at offset {self.pos}: {msg} (in /{self.text}/)")

    def peek(self):
        return self.text[self.pos] if self.pos < len(self.text) else None

    def next(self) -> str:
        ch = self.peek()
        if ch is None:
            raise self.error("unexpected end of pattern")
        self.pos += 1
        return ch

    def parse(self):
        node = self.alternation()
        if self.pos != len(self.text):
            raise self.error(f"unexpected {self.text[self.pos]!r}")
        return node

    def alternation(self):
        options = [self.sequence()]
        while self.peek() == "|":
            self.next()
            options.append(self.sequence())
        return options[0] if len(options) == 1 else Alt(tuple(options))

    def sequence(self):
        parts = []
        while self.peek() not in (None, "|", ")"):
            parts.append(self.quantified())
        if not parts:
            return Empty()
        return parts[0] if len(parts) == 1 else Seq(tuple(parts))

    def quantified(self):
        node = self.atom()
        while self.peek() in _QUANT_SUFFIX:
            ch = self.next()
            if ch == "*":
                node = Star(node)
            elif ch == "+":
                node = Seq((node, Star(node)))
            elif ch == "?":
                node = Alt((node, Empty()))
            else:
                node = self.counted(node)
        return node

    def counted(self, node):
        # '{' already consumed: {m}, {m,}, {m,n}
        lo = self.number()
        hi = lo
        if self.peek() == ",":
            self.next()
            hi = None if self.peek() == "}" else self.number()
        if self.next() != "}":
            raise self.error("expected '}'")
        if hi is not None and hi < lo:
            raise self.error(f"bad repeat bounds {{{lo},{hi}}}")
        parts = [node] * lo
        if hi is None:
            parts.append(Star(node))
        else:
            parts.extend(Alt((node, Empty())) for _ in range(hi - lo))
        if not parts:
            return Empty()
        return parts[0] if len(parts) == 1 else Seq(tuple(parts))

    def number(self) -> int:
        digits = ""
        while self.peek() and self.peek().isdigit():
            digits += self.next()
        if not digits:
            raise self.error("expected a number")
        return int(digits)

    def atom(self):
        ch = self.next()
        if ch == "(":
            node = self.alternation()
            if self.next() != ")":
                raise self.error("expected ')'")
            return node
        if ch == ".":
            return Dot()
        if ch == "[":
            return self.char_class()
        if ch == "\\":
            return Lit(frozenset(self.escape()))
        if ch in "*+?{":
            raise self.error(f"quantifier {ch!r} with nothing to repeat")
        if ch in ")]}":
            raise self.error(f"unbalanced {ch!r}")
        return Lit(frozenset(ch))

    def escape(self) -> str:
        ch = self.next()
        return _SIMPLE_ESCAPES.get(ch, ch)

    def char_class(self):
        negated = self.peek() == "^"
        if negated:
            self.next()
        chars = set()
        while self.peek() != "]":
            ch = self.next()
            if ch == "\\":
                ch = self.escape()
            if self.peek() == "-" and self.text[self.pos + 1 : self.pos + 2] not in ("]", ""):
                self.next()
                hi = self.next()
                if hi == "\\":
                    hi = self.escape()
                if ord(hi) < ord(ch):
                    raise self.error(f"reversed range {ch!r}-{hi!r}")
                chars.update(chr(c) for c in range(ord(ch), ord(hi) + 1))
            else:
                chars.add(ch)
        self.next()  # ']'
        if not chars:
            raise self.error("empty character class")
        if negated:
            return _NegClass(frozenset(chars))
        return Lit(frozenset(chars))


@dataclass(frozen=True)
class _NegClass:
    """Any character except these; resolved against the alphabet later."""

    chars: frozenset


# --- translation to Python re -----------------------------------------------

def _py_char(ch: str, in_class: bool) -> str:
    if ch.isalnum() and ord(ch) < 128:
        return ch
    o = ord(ch)
    return f"\\x{o:02x}" if o < 256 else f"\\u{o:04x}"


def _to_python(node) -> str:
    if isinstance(node, Empty):
        return ""
    if isinstance(node, Dot):
        return "(?s:.)"
    if isinstance(node, Lit):
        if len(node.chars) == 1:
            return _py_char(next(iter(node.chars)), in_class=False)
        return "[" + "".join(_py_char(c, True) for c in sorted(node.chars)) + "]"
    if isinstance(node, _NegClass):
        return "[^" + "".join(_py_char(c, True) for c in sorted(node.chars)) + "]"
    if isinstance(node, Seq):
        return "".join(f"(?:{_to_python(p)})" for p in node.parts)
    if isinstance(node, Alt):
        return "|".join(f"(?:{_to_python(o)})" for o in node.options)
    if isinstance(node, Star):
        return f"(?:{_to_python(node.inner)})*"
    raise PatternError(f"unknown node {node!r}")


class Pattern:
    """A compiled dialect pattern, usable for both matching and sampling."""

    def __init__(self, source: str):
        self.source = source
        self.ast = _Parser(source).parse()
        self._full = re.compile(_to_python(self.ast))

    def fullmatch(self, text: str) -> bool:
        return self._full.fullmatch(text) is not None

    def search(self, text: str) -> bool:
        return self._full.search(text) is not None

    def __repr__(self) -> str:
        return f"/{self.source}/"


@lru_cache(maxsize=512)
def compile_pattern(source: str) -> Pattern:
    return Pattern(source)


# --- alphabets ---------------------------------------------------------------

ALPHABETS = {
    "ascii": "".join(chr(c) for c in range(128)),
    "latin-1": "".join(chr(c) for c in range(256)),
    "bits": "01",
}


def alphabet_for_charset(charset: str) -> str:
    try:
        return ALPHABETS[charset]
    except KeyError:
        raise PatternError(f"unknown charset {charset!r}") from None


# --- NFA / DFA construction ---------------------------------------------------

class _Nfa:
    def __init__(self):
        self.edges = []  # state -> list of (frozenset chars, target)
        self.eps = []  # state -> list of targets

    def new_state(self) -> int:
        self.edges.append([])
        self.eps.append([])
        return len(self.edges) - 1

    def add(self, src: int, chars: frozenset, dst: int):
        if chars:
            self.edges[src].append((chars, dst))

    def add_eps(self, src: int, dst: int):
        self.eps[src].append(dst)

    def closure(self, states: frozenset) -> frozenset:
        out = set(states)
        stack = list(states)
        while stack:
            for t in self.eps[stack.pop()]:
                if t not in out:
                    out.add(t)
                    stack.append(t)
        return frozenset(out)


def _build_nfa(node, nfa: _Nfa, alphabet: frozenset) -> tuple[int, int]:
    """Thompson construction; returns (entry, exit) states."""
    i, o = nfa.new_state(), nfa.new_state()
    if isinstance(node, Empty):
        nfa.add_eps(i, o)
    elif isinstance(node, Dot):
        nfa.add(i, alphabet, o)
    elif isinstance(node, Lit):
        nfa.add(i, node.chars & alphabet, o)
    elif isinstance(node, _NegClass):
        nfa.add(i, alphabet - node.chars, o)
    elif isinstance(node, Seq):
        prev = i
        for part in node.parts:
            pi, po = _build_nfa(part, nfa, alphabet)
            nfa.add_eps(prev, pi)
            prev = po
        nfa.add_eps(prev, o)
    elif isinstance(node, Alt):
        for option in node.options:
            pi, po = _build_nfa(option, nfa, alphabet)
            nfa.add_eps(i, pi)
            nfa.add_eps(po, o)
    elif isinstance(node, Star):
        pi, po = _build_nfa(node.inner, nfa, alphabet)
        nfa.add_eps(i, pi)
        nfa.add_eps(po, pi)
        nfa.add_eps(i, o)
        nfa.add_eps(po, o)
    else:
        raise PatternError(f"unknown node {node!r}")
    return i, o


def _nfa_for(pattern: Pattern | None, alphabet: frozenset, substring: bool) -> tuple[_Nfa, int, int]:
    nfa = _Nfa()
    if pattern is None:
        # universal language over the alphabet
        s = nfa.new_state()
        nfa.add(s, alphabet, s)
        return nfa, s, s
    i, o = _build_nfa(pattern.ast, nfa, alphabet)
    if substring:
        # .* pattern .* — accepts anything containing a match
        nfa.add(i, alphabet, i)
        nfa.add(o, alphabet, o)
    return nfa, i, o


class _Dfa:
    """Total DFA whose edges carry character sets (sorted tuples)."""

    def __init__(self, transitions, accepting, start):
        self.transitions = transitions  # state -> list of (chars tuple, target)
        self.accepting = accepting  # list[bool]
        self.start = start


def _determinize(nfa: _Nfa, start: int, accept: int, alphabet: str) -> _Dfa:
    # Partition the alphabet into classes with identical behavior everywhere.
    sets = sorted({chars for edges in nfa.edges for chars, _ in edges}, key=sorted)
    sig = {}
    for ch in alphabet:
        sig.setdefault(tuple(ch in s for s in sets), []).append(ch)
    classes = [tuple(chs) for chs in sig.values()]

    start_set = nfa.closure(frozenset([start]))
    index = {start_set: 0}
    worklist = [start_set]
    transitions = []
    accepting = []
    while worklist:
        cur = worklist.pop()
        while len(transitions) <= index[cur]:
            transitions.append(None)
            accepting.append(False)
        accepting[index[cur]] = accept in cur
        row = []
        for cls in classes:
            probe = cls[0]
            moved = frozenset(
                t for s in cur for chars, t in nfa.edges[s] if probe in chars
            )
            nxt = nfa.closure(moved)
            if nxt not in index:
                index[nxt] = len(index)
                worklist.append(nxt)
            row.append((cls, index[nxt]))
        transitions[index[cur]] = row
    return _Dfa(transitions, accepting, 0)


class LanguageSampler:
    """Uniform-ish sampling from (pattern ∩ no-excluded-substrings ∩ length bound).

    Counts accepted strings per length over the product DFA, then draws a
    length uniformly among feasible ones and walks the DFA weighting each
    step by the number of accepted completions.
    """

    def __init__(
        self,
        pattern: Pattern | None,
        alphabet: str,
        excludes: tuple[Pattern, ...] = (),
        max_len: int = 0,
        min_len: int = 0,
    ):
        alpha = frozenset(alphabet)
        machines = [_determinize(*_nfa_for(pattern, alpha, False), alphabet)]
        for ex in excludes:
            machines.append(_determinize(*_nfa_for(ex, alpha, True), alphabet))
        self._dfa = _product(machines, alphabet)
        self.max_len = max_len
        self.min_len = min_len
        self._counts = self._count(max_len)

    def _count(self, max_len: int):
        dfa = self._dfa
        n_states = len(dfa.transitions)
        counts = [[0] * (max_len + 1) for _ in range(n_states)]
        for s in range(n_states):
            counts[s][0] = 1 if dfa.accepting[s] else 0
        for ln in range(1, max_len + 1):
            for s in range(n_states):
                total = 0
                for chars, t in dfa.transitions[s]:
                    c = counts[t][ln - 1]
                    if c:
                        total += len(chars) * c
                counts[s][ln] = total
        return counts

    def feasible_lengths(self) -> list[int]:
        start = self._counts[self._dfa.start]
        return [ln for ln in range(self.min_len, self.max_len + 1) if start[ln] > 0]

    def is_empty(self) -> bool:
        return not self.feasible_lengths()

    def sample(self, rng: Random, length: int | None = None) -> str:
        lengths = self.feasible_lengths()
        if not lengths:
            raise UnsatisfiableConstraint(
                f"no string of length {self.min_len}..{self.max_len} satisfies the constraints"
            )
        if length is None:
            length = rng.choice(lengths)
        elif self._counts[self._dfa.start][length] == 0:
            raise UnsatisfiableConstraint(f"no accepted string of length {length}")
        out = []
        state = self._dfa.start
        for remaining in range(length, 0, -1):
            weighted = [
                (chars, t, len(chars) * self._counts[t][remaining - 1])
                for chars, t in self._dfa.transitions[state]
                if self._counts[t][remaining - 1] > 0
            ]
            total = sum(w for _, _, w in weighted)
            pick = rng.randrange(total)
            for chars, t, w in weighted:
                if pick < w:
                    out.append(chars[pick % len(chars)])
                    state = t
                    break
                pick -= w
        return "".join(out)


def _product(machines: list[_Dfa], alphabet: str) -> _Dfa:
    """Intersect machine 0 with the complements of machines 1.."""
    if len(machines) == 1:
        return machines[0]
    start = tuple(m.start for m in machines)
    index = {start: 0}
    worklist = [start]
    transitions = []
    accepting = []
    while worklist:
        cur = worklist.pop()
        while len(transitions) <= index[cur]:
            transitions.append(None)
            accepting.append(False)
        accepting[index[cur]] = machines[0].accepting[cur[0]] and not any(
            m.accepting[s] for m, s in zip(machines[1:], cur[1:])
        )
        row = {}
        for ch in alphabet:
            nxt = tuple(_step(m, s, ch) for m, s in zip(machines, cur))
            row.setdefault(nxt, []).append(ch)
        out_row = []
        for nxt, chars in row.items():
            if nxt not in index:
                index[nxt] = len(index)
                worklist.append(nxt)
            out_row.append((tuple(chars), index[nxt]))
        transitions[index[cur]] = out_row
    return _Dfa(transitions, accepting, 0)


def _step(dfa: _Dfa, state: int, ch: str) -> int:
    for chars, t in dfa.transitions[state]:
        if ch in chars:
            return t
    raise AssertionError("DFA is not total")
