import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import crandn
from rmusic import (
    CompositeSketch,
    CountSketch,
    DimensionError,
    DomainError,
    SketchConfig,
    apply_sketch_left,
    composite_sketch,
    count_sketch,
    gaussian_sketch,
    qr_thin,
)
from rmusic.sketching import draw_composite, range_sketch, sketch_operators

# -------------------------------------------------------------- config


def test_config_defaults_from_rank():
    cfg = SketchConfig.from_rank(9)
    assert (cfg.s, cfg.s0, cfg.s1, cfg.eta) == (9, 18, 14, 0.5)


@pytest.mark.parametrize("eta", [0.25, 0.5, 0.75])
@pytest.mark.parametrize("K", [1, 2, 3, 9, 30])
def test_config_ordering_holds_for_all_eta(K, eta):
    cfg = SketchConfig.from_rank(K, eta)
    assert K <= cfg.s < cfg.s1 < cfg.s0


def test_config_theorem_scale():
    cfg = SketchConfig.theorem_scale(3)
    assert (cfg.s1, cfg.s0) == (12, 21)
    assert 3 <= cfg.s < cfg.s1


def test_config_rejects_bad_ordering_and_eta():
    with pytest.raises(DimensionError):
        SketchConfig(s=5, s0=4, s1=6)
    with pytest.raises(DomainError):
        SketchConfig(s=1, s0=3, s1=2, eta=1.0)
    with pytest.raises(DomainError):
        SketchConfig(s=1, s0=3, s1=2, seed=-1)


def test_config_validate_against_problem():
    cfg = SketchConfig.from_rank(5)
    cfg.validate(5, 10)
    with pytest.raises(DimensionError):
        cfg.validate(5, 9)
    with pytest.raises(DimensionError):
        cfg.validate(6, 100)


# ------------------------------------------------------------ gaussian


def test_gaussian_shape():
    assert gaussian_sketch(300, 9, seed=0).shape == (300, 9)


def test_gaussian_unit_width_variance():
    S = gaussian_sketch(100_000, 1, seed=1)
    assert abs(S.var() - 1.0) < 0.02


def test_gaussian_column_norm_expectation():
    m, s = 200, 9
    norms = [np.mean(np.sum(gaussian_sketch(m, s, seed) ** 2, axis=0)) for seed in range(200)]
    assert abs(np.mean(norms) / (m / s) - 1) < 0.05


def test_gaussian_real_valued():
    S = gaussian_sketch(20, 3, seed=0)
    assert np.isrealobj(S)


def test_gaussian_size_checks():
    with pytest.raises(DimensionError):
        gaussian_sketch(5, 6, seed=0)
    with pytest.raises(DimensionError):
        gaussian_sketch(5, 0, seed=0)


def test_jl_norm_preserved_in_expectation(gen):
    x = crandn(gen, 200)
    x /= np.linalg.norm(x)
    vals = [np.linalg.norm(apply_sketch_left(gaussian_sketch(200, 8, seed), x)) ** 2 for seed in range(500)]
    assert abs(np.mean(vals) - 1) < 0.05


# --------------------------------------------------------------- count


@settings(max_examples=40, deadline=None)
@given(m=st.integers(1, 300), data=st.data(), seed=st.integers(0, 2**63 - 1))
def test_count_row_structure(m, data, seed):
    s0 = data.draw(st.integers(1, m))
    S = count_sketch(m, s0, seed).toarray()
    assert S.shape == (m, s0)
    assert np.all(np.count_nonzero(S, axis=1) == 1)
    assert set(np.unique(S[S != 0])) <= {-1.0, 1.0}


def test_count_single_entry():
    S = count_sketch(1, 1, seed=3).toarray()
    assert S.shape == (1, 1) and abs(S[0, 0]) == 1


def test_count_histogram_and_sign_balance():
    cs = count_sketch(100_000, 10, seed=7)
    hist = np.bincount(cs.indices, minlength=10)
    assert np.all(np.abs(hist / 10_000 - 1) < 0.03)
    assert abs(np.mean(cs.signs > 0) - 0.5) < 0.02


def test_count_size_checks():
    with pytest.raises(DimensionError):
        count_sketch(4, 5, seed=0)


# ----------------------------------------------------------- composite


def test_composite_dims():
    cfg = SketchConfig(s=9, s0=18, s1=14)
    assert composite_sketch(cfg, 200).shape == (200, 14)


def test_composite_equals_dense_product_of_parts():
    cfg = SketchConfig(s=9, s0=18, s1=14, seed=21)
    parts = draw_composite(cfg, 200)
    SC = np.zeros((200, 18))
    for row, (col, sign) in enumerate(zip(parts.count.indices, parts.count.signs)):
        SC[row, col] = sign
    assert np.array_equal(composite_sketch(cfg, 200), SC @ parts.gaussian)


def test_composite_rejects_wide_count_sketch():
    with pytest.raises(DimensionError):
        composite_sketch(SketchConfig(s=2, s0=12, s1=4), 10)


def test_composite_streams_are_independent():
    parts = draw_composite(SketchConfig(s=3, s0=8, s1=5, seed=1), 50)
    G = gaussian_sketch(8, 5, seed=1)
    assert not np.array_equal(parts.gaussian, G)


# --------------------------------------------------------- application


def test_apply_all_rows_to_column_zero(gen):
    A = crandn(gen, 6, 3)
    S = CountSketch(np.zeros(6, dtype=int), np.ones(6), cols=4)
    out = apply_sketch_left(S, A)
    assert np.allclose(out[0], A.sum(axis=0))
    assert np.all(out[1:] == 0)


def test_apply_gaussian_matches_dense(gen):
    A = crandn(gen, 30, 30)
    S = gaussian_sketch(30, 30, seed=5)
    assert np.allclose(apply_sketch_left(S, A), S.T @ A, rtol=0, atol=1e-12)


def test_apply_count_and_composite_match_dense(gen):
    A = crandn(gen, 40, 7)
    cs = count_sketch(40, 9, seed=2)
    assert np.allclose(apply_sketch_left(cs, A), cs.toarray().T @ A, atol=1e-12)
    comp = draw_composite(SketchConfig(s=3, s0=9, s1=5, seed=2), 40)
    assert np.allclose(apply_sketch_left(comp, A), comp.toarray().T @ A, atol=1e-12)


def test_apply_to_zero_is_zero():
    for S in (gaussian_sketch(10, 3, 0), count_sketch(10, 3, 0), draw_composite(SketchConfig(1, 4, 2), 10)):
        assert np.all(apply_sketch_left(S, np.zeros((10, 2), complex)) == 0)


def test_apply_vector_and_dimension_errors(gen):
    x = crandn(gen, 12)
    S = gaussian_sketch(12, 4, 0)
    assert apply_sketch_left(S, x).shape == (4,)
    with pytest.raises(DimensionError):
        apply_sketch_left(S, crandn(gen, 11, 2))
    with pytest.raises(DimensionError):
        apply_sketch_left(S, np.zeros((12, 2, 2)))


class _Tracked:
    """Scalar that logs every multiplication it takes part in."""

    log = Counter()

    def __init__(self, key, value):
        self.key, self.value = key, value

    def __mul__(self, other):
        _Tracked.log[self.key] += 1
        return self.value * other

    __rmul__ = __mul__


def test_count_application_touches_each_entry_once():
    m, n = 37, 5
    vals = np.arange(m * n, dtype=float).reshape(m, n)
    A = np.empty((m, n), dtype=object)
    for i in range(m):
        for j in range(n):
            A[i, j] = _Tracked((i, j), vals[i, j])
    _Tracked.log.clear()
    cs = count_sketch(m, 6, seed=4)
    out = apply_sketch_left(cs, A)
    assert len(_Tracked.log) == m * n
    assert set(_Tracked.log.values()) == {1}
    assert np.allclose(out.astype(float), cs.toarray().T @ vals)


# -------------------------------------------------------- determinism


def test_every_operator_deterministic_per_seed():
    cfg = SketchConfig.from_rank(4, seed=99)
    assert np.array_equal(gaussian_sketch(50, 4, 99), gaussian_sketch(50, 4, 99))
    a, b = count_sketch(50, 8, 99), count_sketch(50, 8, 99)
    assert np.array_equal(a.indices, b.indices) and np.array_equal(a.signs, b.signs)
    assert np.array_equal(composite_sketch(cfg, 50), composite_sketch(cfg, 50))
    assert np.array_equal(range_sketch(cfg, 50), range_sketch(cfg, 50))
    assert not np.array_equal(gaussian_sketch(50, 4, 99), gaussian_sketch(50, 4, 100))


def test_reuse_caches_operators():
    cfg = SketchConfig.from_rank(3, seed=5, reuse=True)
    S1, X1 = sketch_operators(cfg, 40)
    S2, X2 = sketch_operators(cfg, 40)
    assert S1 is S2 and X1 is X2
    fresh = SketchConfig.from_rank(3, seed=5)
    S3, _ = sketch_operators(fresh, 40)
    assert S3 is not S1 and np.array_equal(S3, S1)


def test_composite_is_factored():
    comp = draw_composite(SketchConfig.from_rank(3), 40)
    assert isinstance(comp, CompositeSketch) and comp.shape == (40, 5)


# ------------------------------------------------- embedding smoke test


def test_subspace_embedding_at_default_sizes():
    K, m = 5, 200
    ok = 0
    for seed in range(100):
        g = np.random.default_rng(seed)
        Q = qr_thin(crandn(g, m, K)).Q
        SX = draw_composite(SketchConfig.from_rank(K, seed=seed), m)
        sv = np.linalg.svd(apply_sketch_left(SX, Q), compute_uv=False)
        ok += bool(sv.min() >= 0.5 and sv.max() <= 1.5)
    assert ok >= 95, f"only {ok}/100 seeds embed within [0.5, 1.5]"
