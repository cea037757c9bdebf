import math
import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_walk
from dualmind.board import Move, generate_moves, make_move, parse_fen, start_position
from dualmind.search.mcts import (
    Evaluation,
    HeuristicEvaluator,
    MctsNode,
    MctsSearcher,
    OracleEvaluator,
    PuctParams,
    exploration_rate,
    puct_scores,
    puct_select,
    run_search,
    uniform_policy,
    visit_csv,
)
from dualmind.search.policy import (
    POLICY_SIZE,
    PolicyPlaneIndex,
    decode_move,
    encode_move,
    mask_and_normalize,
    move_index,
)

BACK_RANK = "6k1/5ppp/8/8/8/8/8/4R2K w - - 0 1"


def two_child_node(P, N, W, params=PuctParams()):
    node = MctsNode(start_position(), ())
    node.moves = [Move.from_uci("a2a3"), Move.from_uci("b2b3")][: len(P)]
    node.P, node.N, node.W = list(P), list(N), list(W)
    node.children = [None] * len(P)
    node.expanded = True
    node.visits = sum(N) + 1
    node.value_sum = 0.0
    return node


# -- selection ----------------------------------------------------------------


def test_exploration_rate_formula():
    p = PuctParams()
    assert exploration_rate(0, p) == pytest.approx(1.25 + math.log(19653 / 19652), abs=1e-15)
    assert exploration_rate(2, p) == pytest.approx(1.25 + math.log(19655 / 19652), abs=1e-15)


def test_puct_worked_example():
    params = PuctParams(c_base=19652, c_init=1.25, fpu=0.0)
    node = two_child_node((0.6, 0.4), (1, 0), (0.0, 0.0), params)
    scores = puct_scores(node, params)
    c = math.log((1 + 2 + 19652) / 19652) + 1.25
    assert [q for q, _ in scores] == [0.0, 0.0]
    assert scores[0][1] == pytest.approx(c * 0.6 * 1 / 2, abs=1e-12)
    assert scores[1][1] == pytest.approx(c * 0.4 * 1 / 1, abs=1e-12)
    assert round(scores[0][1], 3) == 0.375 and round(scores[1][1], 3) == 0.500
    assert puct_select(node, params) == 1


def test_single_child_is_selected():
    node = two_child_node((1.0,), (5,), (-2.0,))
    assert puct_select(node, PuctParams()) == 0


def test_ties_go_to_lowest_index():
    node = two_child_node((0.5, 0.5), (0, 0), (0.0, 0.0))
    assert puct_select(node, PuctParams()) == 0


def test_unexpanded_node_rejected():
    with pytest.raises(ValueError):
        puct_select(MctsNode(start_position(), ()), PuctParams())


def test_params_validated():
    with pytest.raises(ValueError):
        PuctParams(c_base=0)
    with pytest.raises(ValueError):
        PuctParams(c_init=-1)


def test_exploration_eventually_dominates():
    # child 0 keeps a high Q, yet repeated selection must reach child 1
    params = PuctParams()
    node = two_child_node((0.5, 0.5), (1, 1), (0.9, -0.9))
    for _ in range(100_000):
        i = puct_select(node, params)
        if i == 1:
            break
        node.N[0] += 1
        node.W[0] += 0.9
        node.visits += 1
    assert i == 1


# -- search invariants ----------------------------------------------------------


def walk_nodes(node):
    yield node
    for c in node.children:
        if c is not None:
            yield from walk_nodes(c)


def check_tree(root):
    for node in walk_nodes(root):
        if not node.expanded:
            continue
        assert sum(node.N) == node.visits - 1
        assert math.isclose(sum(node.P), 1.0, abs_tol=1e-9)
        for i, child in enumerate(node.children):
            if node.N[i]:
                assert -1.0 <= node.q(i) <= 1.0
                assert node.W[i] == -child.value_sum
                assert child.visits == node.N[i]


@settings(max_examples=15)
@given(st.integers(0, 10**6), st.integers(0, 40), st.integers(1, 300))
def test_tree_invariants(seed, plies, sims):
    pos = random_walk(seed, plies)
    if not generate_moves(pos):
        return
    s = MctsSearcher(evaluator=HeuristicEvaluator())
    try:
        s.search(pos, sims)
    except ValueError:
        return  # rule-drawn roots are terminal
    check_tree(s.root)
    assert s.root.visits == sims


class PlyValue:
    """Constant value per ply, to watch signs flip during backup."""

    def __call__(self, pos, ply):
        return Evaluation({0: 0.1, 1: 0.2, 2: 0.4}.get(ply, 0.8), uniform_policy(generate_moves(pos)))


def test_backup_alternates_sign():
    pos = parse_fen("4k3/8/8/8/8/8/8/R3K3 w - - 0 1")
    s = MctsSearcher(PuctParams(fpu=10.0), PlyValue())
    s.search(pos, 1)
    assert s.root.value_sum == 0.1
    s.search(pos, 2)
    root = s.root
    (i,) = [j for j, n in enumerate(root.N) if n]
    assert root.W[i] == -0.2
    assert root.children[i].value_sum == 0.2
    assert root.value_sum == pytest.approx(0.1 - 0.2)
    # a large fpu keeps unvisited siblings unattractive, so the third
    # simulation revisits the same child and goes two plies deep
    s.search(pos, 3)
    root = s.root
    (i,) = [j for j, n in enumerate(root.N) if n]
    child = root.children[i]
    (k,) = [j for j, n in enumerate(child.N) if n]
    assert child.W[k] == -0.4
    assert root.W[i] == pytest.approx(-(0.2 - 0.4))
    assert root.value_sum == pytest.approx(0.1 - 0.2 + 0.4)


def test_one_simulation_returns_argmax_prior():
    pos = parse_fen("r1bqkbnr/pppp1ppp/2n5/4p3/4P3/5N2/PPPP1PPP/RNBQKB1R w KQkq - 2 3")
    r = run_search(pos, 1)
    assert r.best_move == max(r.prior, key=lambda m: (r.prior[m], -move_index(pos, m)))
    assert sum(r.visits.values()) == 0


def test_mate_in_one_gets_visit_majority():
    pos = parse_fen(BACK_RANK)
    r = run_search(pos, 1000, evaluator=OracleEvaluator(horizon=1))
    mate = Move.from_uci("e1e8")
    assert r.best_move == mate
    assert r.visits[mate] > sum(r.visits.values()) / 2
    assert r.q[mate] == 1.0 and r.winprob(mate) == 1.0


def test_terminal_input_rejected():
    with pytest.raises(ValueError):
        run_search(parse_fen("4R1k1/5ppp/8/8/8/8/8/7K b - - 0 1"), 10)
    with pytest.raises(ValueError):
        run_search(start_position(), 0)


def test_deterministic_for_fixed_seed():
    pos = parse_fen("r1bqkbnr/pppp1ppp/2n5/4p3/4P3/5N2/PPPP1PPP/RNBQKB1R w KQkq - 2 3")
    a = run_search(pos, 300, seed=7)
    b = run_search(pos, 300, seed=7)
    assert a.visits == b.visits and a.best_move == b.best_move and a.pv == b.pv


def test_stop_flag_ends_search():
    s = MctsSearcher()
    s.stop_event.set()
    r = s.search(start_position(), 10_000, on_progress=lambda _: s.stop(), progress_every=5)
    assert r.simulations <= 10


def test_heuristic_policy_sums_to_one():
    ev = HeuristicEvaluator()(start_position())
    assert math.isclose(sum(ev.policy.values()), 1.0)
    assert set(ev.policy) == set(generate_moves(start_position()))
    assert -1 <= ev.value <= 1


def test_visit_csv():
    pos = parse_fen(BACK_RANK)
    r = run_search(pos, 200, evaluator=OracleEvaluator(horizon=1))
    lines = visit_csv(pos, r).splitlines()
    assert lines[0] == "move,visits,fraction,Q,prior"
    assert lines[1].startswith("Re8#,")
    assert len(lines) == 1 + len(generate_moves(pos))
    assert sum(int(ln.split(",")[1]) for ln in lines[1:]) == 199


def test_pawn_display_uses_inverse_logistic():
    pos = start_position()
    r = run_search(pos, 50)
    m = r.best_move
    p = (r.q[m] + 1) / 2
    assert r.pawns(m) == pytest.approx(400 * math.log10(p / (1 - p)) / 100)


# -- policy codec -------------------------------------------------------------------


@pytest.mark.parametrize(
    "fen,uci,plane,square",
    [
        ("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1", "e2e4", 1, 12),
        ("8/3P3k/8/8/8/8/8/K7 w - - 0 1", "d7d8n", 65, 51),
        ("8/3P3k/8/8/8/8/8/K7 w - - 0 1", "d7d8q", 0, 51),
        ("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR b KQkq - 0 1", "e7e5", 1, 12),
        ("rnbqkbnr/pppppppp/8/8/8/8/PPPPPPPP/RNBQKBNR w KQkq - 0 1", "g1f3", 63, 6),
    ],
)
def test_encode_examples(fen, uci, plane, square):
    pos = parse_fen(fen)
    m = Move.from_uci(uci)
    assert encode_move(pos, m) == PolicyPlaneIndex(plane, square)
    assert decode_move(pos, PolicyPlaneIndex(plane, square)) == m


@settings(max_examples=60)
@given(st.integers(0, 10**6), st.integers(0, 150))
def test_codec_is_a_bijection_on_legal_moves(seed, plies):
    pos = random_walk(seed, plies)
    moves = generate_moves(pos)
    idx = [move_index(pos, m) for m in moves]
    assert len(set(idx)) == len(idx)
    for m, i in zip(moves, idx):
        assert 0 <= i < POLICY_SIZE
        assert decode_move(pos, i) == m


def test_all_promotions_round_trip():
    for fen in ("1n2k3/P7/8/8/8/8/8/4K3 w - - 0 1", "4k3/8/8/8/8/8/p7/1N2K3 b - - 0 1"):
        pos = parse_fen(fen)
        promos = [m for m in generate_moves(pos) if m.promotion]
        assert len(promos) == 8
        assert len({move_index(pos, m) for m in promos}) == 8
        for m in promos:
            assert decode_move(pos, move_index(pos, m)) == m


def test_decode_rejects_bad_indices():
    with pytest.raises(ValueError):
        decode_move(start_position(), POLICY_SIZE)
    with pytest.raises(ValueError):
        decode_move(start_position(), PolicyPlaneIndex(0, 63))  # north from h8


def test_mask_uniform_and_single():
    pos = start_position()
    moves = generate_moves(pos)
    pol = mask_and_normalize(np.zeros(POLICY_SIZE), moves, pos)
    assert all(math.isclose(v, 1 / 20) for v in pol.values())
    only = [moves[3]]
    assert mask_and_normalize(np.zeros(POLICY_SIZE), only, pos) == {moves[3]: 1.0}
    with pytest.raises(ValueError):
        mask_and_normalize(np.zeros(POLICY_SIZE), [], pos)


@given(st.integers(0, 10**6), st.integers(0, 60))
def test_mask_leaks_nothing_to_illegal_indices(seed, plies):
    pos = random_walk(seed, plies)
    moves = generate_moves(pos)
    if not moves:
        return
    rng = random.Random(seed)
    legal_idx = {move_index(pos, m) for m in moves}
    raw = np.array([rng.uniform(-3, 3) for _ in range(POLICY_SIZE)])
    illegal = next(i for i in range(POLICY_SIZE) if i not in legal_idx)
    raw[illegal] = 1e6
    pol = mask_and_normalize(raw, moves, pos)
    assert set(pol) == set(moves)
    assert math.isclose(sum(pol.values()), 1.0)
    sparse = mask_and_normalize({illegal: 1e6}, moves, pos)
    assert all(math.isclose(v, 1 / len(moves)) for v in sparse.values())
