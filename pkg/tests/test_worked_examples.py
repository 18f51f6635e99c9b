import worked_examples as we


def test_geldigimdeki_hierarchy():
    got, want = we.geldigimdeki()
    assert got == want


def test_geldigimdeki_projection():
    got, want = we.geldigimdeki_projected()
    assert got == want


def test_masadir_hierarchy():
    got, want = we.masadir()
    assert got == want
    assert got.stem["ROOT"] == "masa"


def test_ablative_rule_keeps_only_abl():
    got, want = we.ablative_window()
    assert got == want


def test_talkshow_guesses():
    got, want = we.talkshow()
    assert len(got) == 6
    assert set(got) == set(want)


def test_collocations():
    for toks, want, surface in we.collocations():
        assert len(toks) == 1
        assert toks[0].surface == surface
        assert toks[0].parses == (want,)


def test_all_examples_helper():
    ok, msg = we.all_worked_examples_hold()
    assert ok, msg
