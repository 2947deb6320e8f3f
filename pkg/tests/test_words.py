import pytest

from chainrep.errors import InputError
from chainrep.words import MarkedWord, Word, all_words


def test_letter_masks(sig2):
    w = Word(sig2, (0, 1, 2, 3))
    assert w.has("P1", 1) and not w.has("P2", 1)
    assert w.has("P2", 2) and w.has("P1", 3)
    with pytest.raises(InputError):
        Word(sig2, (4,))


def test_render_parse_round_trip(sig2):
    w = Word(sig2, (0, 1, 3))
    assert Word.parse(w.render(), sig2) == w
    assert w.render() == "[., P1, P1+P2]"
    assert Word.parse("[]", sig2) == Word(sig2, ())


def test_concat(sig1):
    a = Word(sig1, (1,))
    b = Word(sig1, (0, 1))
    assert a.concat(b).letters == (1, 0, 1)


def test_marked_word_validation(sig1):
    w = Word(sig1, (0, 1, 0))
    MarkedWord(w, (0, 2))
    with pytest.raises(InputError):
        MarkedWord(w, (2, 0))  # not ascending
    with pytest.raises(InputError):
        MarkedWord(w, (1, 1))  # repeated
    with pytest.raises(InputError):
        MarkedWord(w, (3,))  # out of range


def test_marked_render(sig1):
    mw = MarkedWord(Word(sig1, (1, 0)), (1,))
    assert mw.render() == "[P1, .*]"
    assert MarkedWord.parse("[P1, .*]", sig1) == mw


def test_all_words_counts(sig1, sig2):
    assert sum(1 for _ in all_words(sig1, 3)) == 1 + 2 + 4 + 8
    assert sum(1 for _ in all_words(sig2, 2)) == 1 + 4 + 16
    lens = [len(w) for w in all_words(sig1, 2)]
    assert lens == sorted(lens)  # shortlex: lengths ascend
    assert sum(1 for _ in all_words(sig1, 2, min_len=1)) == 6
