import pytest

from gnls.bks import BksRegistry, UnknownInstanceError


@pytest.fixture(scope="module")
def reg():
    return BksRegistry.bundled()


def test_bundled_lookups(reg):
    assert reg.lookup("X-n101-k25") == 27591
    assert reg.lookup("X-n1001-k43") == 72359
    assert reg.lookup("Flanders2") == 4373244


def test_bundled_covers_benchmark_tables(reg):
    assert len(reg) >= 110
    assert "Leuven1" in reg and "Brussels2" in reg


def test_unknown_is_explicit_miss(reg):
    with pytest.raises(UnknownInstanceError):
        reg.lookup("no-such-instance")
    assert reg.get("no-such-instance") is None


def test_from_text_parses_comments_and_blanks():
    reg = BksRegistry.from_text("# header\n\nfoo\t123\nbar 456\n")
    assert reg.lookup("foo") == 123
    assert reg.lookup("bar") == 456


def test_malformed_line_rejected():
    with pytest.raises(ValueError, match="line 1"):
        BksRegistry.from_text("only-name\n")


def test_nonpositive_cost_rejected():
    with pytest.raises(ValueError):
        BksRegistry.from_text("foo\t0\n")
