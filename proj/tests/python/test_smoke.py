
import numpy as np
import pytest

import ecn_rerank as ecn


def line_points():
    return np.array([[0.0], [1.0], [3.0]], dtype=np.float32)


def test_pairwise_and_rank_lists():
    d = ecn.pairwise_sq_euclidean(line_points())
    np.testing.assert_array_equal(d, [[0, 1, 9], [1, 0, 4], [9, 4, 0]])
    np.testing.assert_array_equal(ecn.rank_lists(d), [[0, 1, 2], [1, 0, 2], [2, 1, 0]])
    np.testing.assert_array_equal(ecn.rank_lists(d, depth=2), [[0, 1], [1, 0], [2, 1]])


def test_line_points_ecn():
    base = ecn.pairwise_sq_euclidean(line_points())
    nb = ecn.expand_neighbors(base, t=1, q=1)
    np.testing.assert_array_equal(nb[0], [1, 0])
    out = ecn.ecn_distance(base, nb, np.array([0]), np.array([2]))
    assert out.shape == (1, 1)
    assert out[0, 0] == 3.5


def test_similarity_and_minmax():
    d = ecn.pairwise_sq_euclidean(line_points())
    assert ecn.rank_list_similarity(d, k=2)[0, 1] == 4.0
    np.testing.assert_array_equal(ecn.rank_dist(np.array([[5.0, 4.0], [4.0, 5.0]])), [[0, 1], [1, 0]])


@pytest.mark.parametrize("method", ["rank-dist", "ecn-orig", "ecn-rank"])
def test_rerank_matches_oracle(method):
    rng = np.random.default_rng(0)
    x = rng.standard_normal((80, 6)).astype(np.float32)
    is_query = np.zeros(80, dtype=bool)
    is_query[:15] = True
    fast = ecn.rerank(x, is_query, method=method)
    slow = ecn.oracle_ecn(x, is_query, method=method)
    assert fast.shape == (15, 65)
    np.testing.assert_allclose(fast, slow, rtol=1e-12, atol=0)
    pre = ecn.rerank(ecn.pairwise_sq_euclidean(x), is_query, method=method, precomputed=True)
    np.testing.assert_array_equal(pre, fast)


def test_none_is_the_query_gallery_slice():
    x, pid, cam, q = ecn.generate_clusters(seed=1, n_ids=10)
    d = ecn.pairwise_sq_euclidean(x)
    np.testing.assert_array_equal(ecn.rerank(x, q, method="none"), d[q][:, ~q])


def test_synthetic_improvement_single_seed():
    x, pid, cam, q = ecn.generate_clusters(seed=0)
    assert x.shape == (200, 32) and x.dtype == np.float32
    base = ecn.evaluate(ecn.rerank(x, q, method="none"), pid, cam, q)
    rer = ecn.evaluate(ecn.rerank(x, q), pid, cam, q)
    assert base["num_queries"] == 50
    assert set(base["cmc"]) == {1, 5, 10, 50}
    assert 0.0 < base["map"] < 1.0
    assert rer["map"] > base["map"]


def test_evaluate_ap_fixture():
    pid = np.array([5, 5, 6, 5, 8])
    cam = np.array([1, 2, 2, 3, 2])
    q = np.array([True, False, False, False, False])
    rep = ecn.evaluate(np.array([[0.1, 0.2, 0.3, 0.4]]), pid, cam, q, ranks=[1, 3])
    assert rep["map"] == pytest.approx(0.8333333333, abs=1e-9)
    assert rep["cmc"] == {1: 1.0, 3: 1.0}


def test_io_roundtrip(tmp_path):
    x, pid, cam, q = ecn.generate_clusters(seed=2, n_ids=5)
    ecn.write_features(x, str(tmp_path / "f.ecnf"))
    np.testing.assert_array_equal(ecn.read_features(str(tmp_path / "f.ecnf")), x)
    d = ecn.pairwise_sq_euclidean(x)
    ecn.write_distance(d, str(tmp_path / "d.ecnd"))
    np.testing.assert_array_equal(ecn.read_distance(str(tmp_path / "d.ecnd")), d.astype(np.float32))
    ecn.write_metadata(pid, cam, q, str(tmp_path / "m.csv"))
    for a, b in zip(ecn.read_metadata(str(tmp_path / "m.csv")), (pid, cam, q)):
        np.testing.assert_array_equal(a, b)


def test_errors_carry_codes(tmp_path):
    (tmp_path / "bad.ecnd").write_bytes(b"XXXX" + bytes(30))
    with pytest.raises(ecn.EcnError) as info:
        ecn.read_distance(str(tmp_path / "bad.ecnd"))
    assert info.value.code == 40
    assert info.value.code_name == "BadMagic"
    with pytest.raises(ecn.EcnError) as info:
        ecn.rerank(np.zeros((5, 2), dtype=np.float32), np.array([True, False, False, False, False]))
    assert info.value.code_name == "ParamsTooLarge"
    with pytest.raises(RuntimeError):
        ecn.oracle_ecn(np.zeros((501, 1), dtype=np.float32), np.zeros(501, dtype=bool))


def test_thread_invariance():
    x, pid, cam, q = ecn.generate_clusters(seed=3, n_ids=100)
    ecn.set_num_threads(1)
    one = ecn.rerank(x, q)
    ecn.set_num_threads(4)
    four = ecn.rerank(x, q)
    ecn.set_num_threads(0)
    assert one.tobytes() == four.tobytes()
