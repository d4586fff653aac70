import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from skipcheck.memctl import (
    REFRESH,
    MState,
    OptMState,
    Request,
    committed_state,
    exec_request,
    execute_buffer,
    format_requests,
    good_statep,
    impl_step,
    mark_redundant,
    mrefresh,
    parse_memory,
    parse_requests,
    rank,
    read,
    ref_map,
    request_alphabet,
    spec_step,
    write,
)
from skipcheck.textfmt import ParseError


def test_exec_request():
    assert exec_request(write(1, 5), (0, 0, 0)) == (0, 5, 0)
    assert exec_request(read(2), (0, 5, 0)) == (0, 5, 0)
    assert exec_request(REFRESH, (3, 4)) == (3, 4)
    assert exec_request(write(7, 1), (0, 0)) == (0, 0)  # out of range


def test_mrefresh_identity():
    assert mrefresh(()) == ()
    assert mrefresh((7,)) == (7,)
    rng = random.Random(3)
    for _ in range(10_000):
        m = tuple(rng.randint(0, 2**32) for _ in range(rng.randint(0, 12)))
        assert mrefresh(m) == m


def flags(rbuf, **kw):
    return [f for _, f in mark_redundant(rbuf, **kw)]


def test_mark_redundant():
    assert flags((write(0, 1), write(0, 2))) == [True, False]
    assert flags((write(0, 1), write(1, 2))) == [False, False]
    assert flags((write(0, 1), read(0), write(0, 2))) == [True, False, False]
    assert flags((read(0), REFRESH)) == [False, False]


def test_mark_redundant_adjacent_only():
    assert flags((write(0, 1), read(0), write(0, 2)), adjacent_only=True) == [False, False, False]
    assert flags((write(0, 1), write(0, 2)), adjacent_only=True) == [True, False]


def test_execute_buffer():
    b = (write(0, 1), write(0, 2))
    assert execute_buffer(mark_redundant(b), (0,), honor_flags=True) == (2,)
    assert execute_buffer(mark_redundant(b), (0,), honor_flags=False) == (2,)
    assert execute_buffer((), (4, 4)) == (4, 4)


def test_execute_buffer_with_read_between():
    b = (write(0, 1), read(0), write(0, 2))
    assert execute_buffer(mark_redundant(b), (0,)) == execute_buffer(b, (0,)) == (2,)


def test_coalescing_soundness_exhaustive():
    alphabet = request_alphabet((0, 1, 2), (0, 1))
    mems = list(itertools.product((0, 1), repeat=3))
    for n in range(4):
        for b in itertools.product(alphabet, repeat=n):
            for m in mems:
                assert execute_buffer(mark_redundant(b), m) == execute_buffer(b, m)
                assert execute_buffer(mark_redundant(b, adjacent_only=True), m) == execute_buffer(b, m)


@pytest.mark.parametrize(
    "s, expected",
    [
        (MState((write(0, 9),), 0, (0,)), MState((write(0, 9),), 1, (9,))),
        (MState((read(0),), 0, (4,)), MState((read(0),), 1, (4,))),
        (MState((REFRESH,), 0, (4,)), MState((REFRESH,), 1, (4,))),
        (MState((), 3, (4,)), MState((), 4, (4,))),
    ],
)
def test_spec_step(s, expected):
    assert spec_step(s) == expected


def test_impl_step_enqueue():
    reqs = (write(0, 1), read(0))
    assert impl_step(OptMState(reqs, 0, (), (0,))) == OptMState(reqs, 1, (write(0, 1),), (0,))


def test_impl_step_full_buffer_coalesces():
    reqs = (write(0, 1), write(0, 2), write(1, 3))
    s = OptMState(reqs, 2, (write(0, 1), write(0, 2)), (0,))
    assert impl_step(s) == OptMState(reqs, 3, (write(1, 3),), (2,))


def test_impl_step_read_drains():
    reqs = (write(0, 7), read(0))
    assert impl_step(OptMState(reqs, 1, (write(0, 7),), (0,))) == OptMState(reqs, 2, (), (7,))


def test_impl_step_refresh_drains():
    reqs = (write(1, 7), REFRESH)
    assert impl_step(OptMState(reqs, 1, (write(1, 7),), (0, 0))) == OptMState(reqs, 2, (), (0, 7))


def test_refmap_rank_committed():
    reqs = (write(0, 1), write(0, 2), read(0))
    s = OptMState(reqs, 2, (write(0, 1), write(0, 2)), (0,))
    assert ref_map(s) == MState(reqs, 0, (0,))
    assert ref_map(OptMState(reqs, 1, (), (3,))) == MState(reqs, 1, (3,))
    assert rank(s, k=3) == 1
    assert rank(OptMState(reqs, 3, (write(0, 1),) * 3, (0,)), k=3) == 0
    assert committed_state(s) == OptMState(reqs, 0, (), (0,))
    assert good_statep(s)
    assert not good_statep(OptMState(reqs, 2, (write(0, 2), write(0, 1)), (0,)))


reqs_st = st.lists(
    st.one_of(
        st.builds(write, st.integers(0, 3), st.integers(0, 9)),
        st.builds(read, st.integers(0, 3)),
        st.just(REFRESH),
    ),
    max_size=8,
).map(tuple)


@st.composite
def good_states(draw):
    k = draw(st.integers(1, 4))
    reqs = draw(reqs_st)
    mem = tuple(draw(st.lists(st.integers(0, 9), min_size=1, max_size=3)))
    s = OptMState(reqs, draw(st.integers(0, len(reqs) + 1)), (), mem)
    for j in range(1, draw(st.integers(0, k)) + 1):
        nxt = impl_step(s, k)
        if len(nxt.rbuf) != j:
            break
        s = nxt
    return k, s


@settings(max_examples=400, deadline=None)
@given(good_states())
def test_closure_and_formula(ks):
    k, s = ks
    assert good_statep(s, k)
    u = impl_step(s, k)
    assert good_statep(u, k)
    assert u.pt == s.pt + 1
    assert all(r.kind == "write" for r in u.rbuf)
    if ref_map(u) == ref_map(s):
        assert rank(u, k) < rank(s, k)
    else:
        run = [ref_map(s)]
        for _ in range(k + 1):
            run.append(spec_step(run[-1]))
        assert ref_map(u) in run[1:]


def test_parse_round_trip():
    text = "write 0 5\nread 2\n\nrefresh  # periodic\n"
    reqs = parse_requests(text)
    assert reqs == (write(0, 5), read(2), REFRESH)
    assert parse_requests(format_requests(reqs)) == reqs


@pytest.mark.parametrize("bad, lineno", [("write 0\n", 1), ("read 1\nread -1\n", 2), ("refresh 3\n", 1), ("erase 1\n", 1)])
def test_parse_errors(bad, lineno):
    with pytest.raises(ParseError) as e:
        parse_requests(bad)
    assert e.value.lineno == lineno


def test_parse_memory():
    assert parse_memory("0,5,0") == (0, 5, 0)
    assert parse_memory("") == ()
    with pytest.raises(ValueError):
        parse_memory("1,x")


def test_request_validation():
    with pytest.raises(ValueError):
        Request("write", 0)
    with pytest.raises(ValueError):
        Request("read", -1)
    with pytest.raises(ValueError):
        Request("refresh", 0)
