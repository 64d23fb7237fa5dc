import itertools

import numpy as np
import pytest

import curvseg


def test_corpus_bar_is_recovered():
    assert "bar" in curvseg.corpus_names()
    case = curvseg.corpus_case("bar")
    r = curvseg.segment(case["image"], case["seeds"])
    assert r["unlabeled_count"] == 0
    assert r["mask"].shape == case["ground_truth"].shape
    assert curvseg.dice(r["mask"], case["ground_truth"]) == 1.0
    # The bound is computed on the energy rounded to 1e-6 units.
    assert r["lower_bound"] <= r["energy"] + 1e-6 * abs(r["energy"])


def test_unknown_case():
    with pytest.raises(KeyError):
        curvseg.corpus_case("nope")


def test_segment_rejects_one_seed_class():
    img = np.zeros((4, 4))
    seeds = np.zeros((4, 4), dtype=np.uint8)
    seeds[0, 0] = 1
    with pytest.raises(curvseg.CurvsegError, match="both seed classes required"):
        curvseg.segment(img, seeds)


def test_step_edge():
    img = np.full((8, 12), 0.1)
    img[:, 6:] = 0.9
    seeds = np.zeros((8, 12), dtype=np.uint8)
    seeds[:, 11] = 1
    seeds[:, 0] = 2
    mask = curvseg.segment(img, seeds, beta=20.0)["mask"]
    expected = np.zeros((8, 12), dtype=np.uint8)
    expected[:, 6:] = 1
    np.testing.assert_array_equal(mask, expected)


def test_curvature_edges_are_sorted_pairs():
    edges = curvseg.curvature_edges(np.full((3, 3), 0.5))
    assert edges
    assert all(u < v and w != 0.0 for u, v, w in edges)
    assert [(u, v) for u, v, _ in edges] == sorted((u, v) for u, v, _ in edges)


def _energy(labels, unary, pairwise, constant):
    e = constant
    for i, c0, c1 in unary:
        e += c1 if labels[i] else c0
    for u, v, t in pairwise:
        e += t[2 * labels[u] + labels[v]]
    return e


def test_solvers_agree_with_exhaustive_search():
    rng = np.random.default_rng(4)
    for _ in range(20):
        n = 6
        unary = [(i, float(rng.integers(-9, 10)), float(rng.integers(-9, 10))) for i in range(n)]
        pairwise = [
            (u, v, tuple(float(x) for x in rng.integers(-9, 10, size=4)))
            for u, v in itertools.combinations(range(n), 2)
            if rng.random() < 0.5
        ]
        best = min(_energy(x, unary, pairwise, 1.0) for x in itertools.product((0, 1), repeat=n))
        labels, energy = curvseg.brute_force(n, unary, pairwise, 1.0)
        assert energy == best
        assert _energy(labels, unary, pairwise, 1.0) == best

        partial, bound = curvseg.solve_qpbo(n, unary, pairwise, 1.0)
        assert bound <= best + 1e-9
        if -1 not in partial:
            assert _energy(partial, unary, pairwise, 1.0) == best

        r = curvseg.solve_energy(n, unary, pairwise, 1.0)
        assert len(r["labeling"]) == n
        assert r["energy"] == pytest.approx(_energy(r["labeling"], unary, pairwise, 1.0))
        if r["unlabeled_count"] == 0:
            assert r["energy"] == pytest.approx(best)


def test_export_and_load(tmp_path):
    curvseg.export_corpus(str(tmp_path))
    img = curvseg.load_image(str(tmp_path / "bar" / "image.pgm"))
    seeds = curvseg.load_seeds(str(tmp_path / "bar" / "seeds.pgm"))
    case = curvseg.corpus_case("bar")
    np.testing.assert_allclose(img, case["image"], atol=1 / 255)
    np.testing.assert_array_equal(seeds, case["seeds"])
