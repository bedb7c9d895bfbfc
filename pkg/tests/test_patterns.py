"""The sampler's independent oracle is Python's re module: everything the
automaton path produces must fullmatch the translated pattern and avoid
the excluded substrings."""

import re
from random import Random

import pytest

from wirespec.errors import UnsatisfiableConstraint
from wirespec.patterns import (
    LanguageSampler,
    PatternError,
    alphabet_for_charset,
    compile_pattern,
)

ASCII = alphabet_for_charset("ascii")


def sample_many(sampler, n=100, seed=1):
    rng = Random(seed)
    return [sampler.sample(rng) for _ in range(n)]


def test_alternation_is_exact():
    s = LanguageSampler(compile_pattern("INBOX|NOBOX"), ASCII, max_len=20)
    assert set(sample_many(s)) == {"INBOX", "NOBOX"}


def test_alphanumeric_plus():
    pat = compile_pattern("[0-9a-zA-Z]+")
    s = LanguageSampler(pat, ASCII, max_len=20)
    for text in sample_many(s):
        assert 1 <= len(text) <= 20
        assert re.fullmatch(r"[0-9a-zA-Z]+", text)


def test_identifier_with_exclusions():
    pat = compile_pattern("[!-~]+")
    excl = compile_pattern(" |\\r\\n|\\*")
    s = LanguageSampler(pat, ASCII, excludes=(excl,), max_len=20)
    for text in sample_many(s, 200):
        assert re.fullmatch(r"[!-~]+", text)
        assert " " not in text and "*" not in text and "\r\n" not in text


def test_contradiction_is_unsatisfiable():
    s = LanguageSampler(compile_pattern("a"), "ab", excludes=(compile_pattern("a"),), max_len=5)
    assert s.is_empty()
    with pytest.raises(UnsatisfiableConstraint):
        s.sample(Random(0))


def test_bit_pattern_unique_member():
    # at length 8, zero-or-more 0s closed by a 1 has exactly one member
    s = LanguageSampler(compile_pattern("\\0*\\1"), "01", max_len=8)
    assert s.sample(Random(3), 8) == "00000001"
    assert s.feasible_lengths() == list(range(1, 9))


def test_bit_pattern_optional_allows_empty():
    s = LanguageSampler(compile_pattern("(\\0*\\1)?"), "01", max_len=24)
    assert 0 in s.feasible_lengths()
    assert s.sample(Random(0), 0) == ""
    assert s.sample(Random(0), 16) == "0" * 15 + "1"


def test_exact_length_unavailable():
    s = LanguageSampler(compile_pattern("\\0*\\1"), "01", max_len=4)
    with pytest.raises(UnsatisfiableConstraint):
        s.sample(Random(0), 0)


def test_universal_language():
    s = LanguageSampler(None, "ab", max_len=3)
    assert s.feasible_lengths() == [0, 1, 2, 3]
    assert all(set(x) <= {"a", "b"} for x in sample_many(s, 50))


@pytest.mark.parametrize(
    "source,matches,rejects",
    [
        ("INBOX|NOBOX", ["INBOX", "NOBOX"], ["INBO", "XNOBOX", ""]),
        ("[0-9a-zA-Z]+", ["a", "Z9"], ["", "a b", "-"]),
        ("[ -~]*", ["", "hello world!"], ["\n", "a\tb"]),
        ("\\0*\\1", ["1", "001"], ["", "10", "00"]),
        ("a{2,4}", ["aa", "aaaa"], ["a", "aaaaa"]),
        ("a{3}", ["aaa"], ["aa", "aaaa"]),
        ("a{2,}b", ["aab", "aaaab"], ["ab", "aa"]),
        ("(ab)+c?", ["ab", "ababc"], ["abc?" , "ba"]),
        ("[^0-9]+", ["abc", "!"], ["a1", ""]),
        (".", ["x", " "], ["", "xy"]),
    ],
)
def test_fullmatch_against_re_semantics(source, matches, rejects):
    pat = compile_pattern(source)
    for text in matches:
        assert pat.fullmatch(text), (source, text)
    for text in rejects:
        assert not pat.fullmatch(text), (source, text)


def test_search_is_substring_semantics():
    pat = compile_pattern(" |\\r\\n|\\*")
    assert pat.search("a b")
    assert pat.search("x*y")
    assert not pat.search("clean")


def test_sampler_agrees_with_re_on_dialect_corpus():
    corpus = [
        ("[!-~]+", 12),
        ("[0-9a-zA-Z]+", 8),
        ("INBOX|NOBOX", 8),
        ("[ -~]*", 10),
        ("(\\r|x)+", 6),
        ("a?b{1,3}[0-4]*", 9),
        ("\\\\Seen|\\\\Deleted", 16),
    ]
    rng = Random(9)
    for source, cap in corpus:
        pat = compile_pattern(source)
        sampler = LanguageSampler(pat, ASCII, max_len=cap)
        pyre = re.compile(pat._full.pattern)
        for _ in range(40):
            text = sampler.sample(rng)
            assert pyre.fullmatch(text), (source, text)
            assert len(text) <= cap


def test_malformed_patterns_raise():
    for bad in ["(a", "a)", "[a", "a{2", "*a", "a{4,2}", "a|*"]:
        with pytest.raises(PatternError):
            compile_pattern(bad)
