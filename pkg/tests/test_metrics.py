import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from synthload import metrics as m


def H(*probs):
    return m.Histogram.from_probs(probs)


def test_constant_samples_single_bin():
    for k in (1, 5, 50):
        h = m.histogram(np.full(100, 3.0), k, (0.0, 10.0))
        assert sorted(h.probs)[-1] == 1.0 and np.count_nonzero(h.probs) == 1


def test_uniform_grid_flat():
    x = (np.arange(1000) + 0.5) / 1000 * 10.0
    h = m.histogram(x, 10, (0.0, 10.0))
    assert np.allclose(h.probs, 0.1)


def test_out_of_range_clipped_into_end_bins():
    h = m.histogram([-5.0, 0.25, 99.0], 2, (0.0, 1.0))
    assert h.probs.tolist() == pytest.approx([2 / 3, 1 / 3])


def test_histogram_errors():
    with pytest.raises(m.EmptySamples):
        m.histogram([], 3, (0, 1))
    with pytest.raises(ValueError):
        m.histogram([1.0], 3, (1, 1))


def test_distance_hand_values():
    assert m.js_distance(H(1, 0), H(0, 1)) == pytest.approx(1.0, abs=1e-12)
    assert m.hellinger(H(1, 0), H(0, 1)) == pytest.approx(1.0, abs=1e-12)
    assert m.hellinger(H(0.5, 0.5), H(0.25, 0.75)) == pytest.approx(0.18459, abs=1e-5)
    assert m.js_distance(H(0.5, 0.5), H(0.25, 0.75)) == pytest.approx(0.2208958, abs=1e-6)
    assert m.js_distance(H(0.2, 0.3, 0.5), H(0.1, 0.1, 0.8)) == pytest.approx(0.2742193, abs=1e-6)
    assert m.hellinger(H(0.2, 0.3, 0.5), H(0.1, 0.1, 0.8)) == pytest.approx(0.2300392, abs=1e-6)


def test_edge_mismatch():
    a = m.Histogram.from_probs([0.5, 0.5], [0, 1, 2])
    b = m.Histogram.from_probs([0.5, 0.5], [0, 1, 3])
    with pytest.raises(m.EdgeMismatch):
        m.js_distance(a, b)
    with pytest.raises(m.EdgeMismatch):
        m.hellinger(a, b)


def random_pairs(n, seed=0):
    rng = np.random.default_rng(seed)
    for _ in range(n):
        k = int(rng.integers(1, 20))
        p = rng.dirichlet(np.full(k, 0.5))
        q = rng.dirichlet(np.full(k, 0.5))
        # sprinkle exact zeros
        p[rng.random(k) < 0.2] = 0
        q[rng.random(k) < 0.2] = 0
        if p.sum() == 0:
            p[0] = 1
        if q.sum() == 0:
            q[-1] = 1
        yield H(*p), H(*q)


def check_metric_properties(fn, pairs):
    """Identity, symmetry and [0, 1] bounds; returns the number of violations."""
    bad = 0
    for p, q in pairs:
        d, r = fn(p, q), fn(q, p)
        bad += not (0.0 <= d <= 1.0)
        bad += abs(d - r) > 1e-12
        bad += fn(p, p) > 1e-7
    return bad


@pytest.mark.parametrize("fn", [m.js_distance, m.hellinger])
def test_property_suite(fn):
    assert check_metric_properties(fn, random_pairs(2000, seed=1)) == 0


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(0, 1), min_size=1, max_size=12).filter(lambda v: sum(v) > 0))
def test_identity_hypothesis(v):
    h = H(*v)
    assert m.js_distance(h, h) < 1e-7 and m.hellinger(h, h) < 1e-7


def test_distance_matrix_identical_and_independent():
    rng = np.random.default_rng(2)
    a = rng.normal(0, 1, 500)
    names, mat = m.distance_matrix({"x": a, "y": a.copy()}, "js")
    assert names == ["x", "y"] and not mat.any()
    data = {"a": a, "b": rng.normal(0.5, 1, 400), "c": rng.gamma(2, 1, 300)}
    names, mat = m.distance_matrix(data, "hellinger", bins=20)
    assert np.allclose(np.diag(mat), 0) and np.allclose(mat, mat.T)
    lo = min(v.min() for v in data.values())
    hi = max(v.max() for v in data.values())
    ha, hc = (m.histogram(data[k], 20, (lo, hi)) for k in ("a", "c"))
    assert mat[0, 2] == pytest.approx(m.hellinger(ha, hc), abs=1e-12)


def test_matrix_csv(tmp_path):
    names, mat = m.distance_matrix({"a": [1, 2, 3], "b": [2, 3, 4]}, "js", bins=3)
    m.write_matrix_csv(tmp_path / "m.csv", names, mat)
    lines = (tmp_path / "m.csv").read_text().splitlines()
    assert lines[0] == ",a,b" and lines[1].startswith("a,0.000000,")


def test_normalize_shape():
    assert np.allclose(m.normalize_shape(np.full(24, 3.0)), 1 / 24)
    spike = np.zeros(24)
    spike[5] = 2.0
    assert m.normalize_shape(spike).tolist() == [0.0] * 5 + [1.0] + [0.0] * 18
    with pytest.raises(m.ZeroTotal):
        m.normalize_shape(np.zeros(24))


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0, 1e3), min_size=24, max_size=24).filter(lambda v: sum(v) > 1e-6))
def test_normalized_shape_sums_to_one(v):
    assert abs(m.normalize_shape(v).sum() - 1.0) < 1e-9


def test_kmeans_k_equals_n():
    x = np.random.default_rng(0).random((6, 24))
    cl = m.kmeans(x, 6, seed=1)
    assert cl.inertia == pytest.approx(0.0, abs=1e-20)
    assert sorted(cl.labels.tolist()) == list(range(6))


def test_kmeans_separated_blobs():
    rng = np.random.default_rng(4)
    a = rng.normal(0.0, 0.01, (100, 24))
    b = rng.normal(0.1, 0.01, (80, 24))  # 10 sigma apart per coordinate
    x = np.vstack([a, b])
    cl = m.kmeans(x, 2, seed=3)
    assert len(set(cl.labels[:100])) == 1 and len(set(cl.labels[100:])) == 1
    assert cl.labels[0] != cl.labels[-1]


def test_kmeans_deterministic_and_too_large():
    x = np.random.default_rng(0).random((50, 24))
    a, b = m.kmeans(x, 4, 7), m.kmeans(x, 4, 7)
    assert np.array_equal(a.labels, b.labels) and np.array_equal(a.centers, b.centers)
    with pytest.raises(m.KTooLarge):
        m.kmeans(x, 51, 0)


def test_kmeans_duplicate_points():
    x = np.vstack([np.zeros((5, 24)), np.ones((5, 24))])
    cl = m.kmeans(x, 3, 0)
    assert cl.centers.shape == (3, 24)
    assert cl.inertia == pytest.approx(0.0)


def test_assign_rules():
    centers = np.array([[0.0, 0.0], [2.0, 0.0]])
    labels, dist = m.assign([[2.0, 0.0], [1.0, 0.0], [0.1, 0.0]], centers)
    assert labels.tolist() == [1, 0, 0]
    assert dist.tolist() == pytest.approx([0.0, 1.0, 0.1])


def test_assign_matches_brute_force():
    rng = np.random.default_rng(9)
    x, c = rng.random((300, 24)), rng.random((7, 24))
    labels, dist = m.assign(x, c)
    for i in range(300):
        d = [float(np.linalg.norm(x[i] - c[j])) for j in range(7)]
        assert labels[i] == int(np.argmin(d))
        assert dist[i] == pytest.approx(min(d))


def test_coverage_cases():
    rng = np.random.default_rng(1)
    x = rng.random((200, 24))
    cl = m.kmeans(x, 5, 0)
    assert m.coverage(cl, m.assign(x, cl.centers)[0]) == 1.0
    assert m.coverage(cl, []) == 0.0
    centers = np.array([[0.0] * 24, [1.0] * 24, [5.0] * 24])
    ref = m.Clustering(3, centers, np.array([0, 1, 2]), np.zeros(3))
    near_two = np.vstack([np.full((10, 24), 0.05), np.full((10, 24), 1.02)])
    assert m.coverage(ref, m.assign(near_two, centers)[0]) == pytest.approx(2 / 3)


def test_coverage_monotone_in_added_points():
    rng = np.random.default_rng(3)
    x = rng.random((300, 24))
    cl = m.kmeans(x, 8, 0)
    labels = m.assign(rng.random((100, 24)), cl.centers)[0]
    cov = [m.coverage(cl, labels[:i]) for i in range(101)]
    assert all(b >= a for a, b in zip(cov, cov[1:]))


def test_closeness():
    rng = np.random.default_rng(0)
    d = rng.gamma(2, 1, 500)
    assert m.closeness(d, d) == 0.0
    assert 0.0 <= m.closeness(d, rng.gamma(5, 1, 500)) <= 1.0
    with pytest.raises(m.EmptySamples):
        m.closeness([], d)


def test_closeness_random_halves():
    rng = np.random.default_rng(5)
    d = rng.gamma(2, 1, 20_000)
    perm = rng.permutation(d.size)
    assert m.closeness(d[perm[:10_000]], d[perm[10_000:]]) < 0.15


def test_shape_report_csv(tmp_path):
    rng = np.random.default_rng(0)
    a = m.normalize_shapes(rng.random((200, 24)))
    b = m.normalize_shapes(rng.random((200, 24)))
    reports = m.shape_validate(a, b, [2, 3], seed=1)
    m.write_shape_report(tmp_path / "r.csv", reports)
    rows = (tmp_path / "r.csv").read_text().splitlines()
    assert rows[0].split(",") == list(m.ShapeReport.FIELDS) and len(rows) == 3
