import numpy as np
import pytest

from codescent import (
    Affine,
    Const,
    DCForm,
    DimensionMismatch,
    Max,
    Min,
    Scale,
    SizeOverflow,
    Sum,
    codiff_affine,
    codiff_max,
    codiff_min,
    codiff_scale,
    codiff_sum,
    evaluate,
    expr_eval,
    expr_from_json,
    expr_to_dc,
    expr_to_json,
    global_codiff,
    translate,
    worked_example,
)
from conftest import random_expr

ABS_X = DCForm(1, np.array([[0.0, 1.0], [0.0, -1.0]]), np.array([[0.0, 0.0]]))

SHOWCASE_HYPO = {
    (0, 3, 0), (-4, 1, 0), (0, 2, 1), (-4, 2, -1),
    (0, -1, 0), (-4, -3, 0), (0, -2, 1), (-4, -2, -1),
    (0, 1, 1), (-4, -1, 1), (0, 0, 2), (-4, 0, 0),
    (0, 1, -1), (-4, -1, -1), (0, 0, 0), (-4, 0, -2),
}
SHOWCASE_HYPER = {
    (1, 2, 0), (1, -2, 0), (1, 0, 1), (1, 0, -1),
    (0, -1, 0), (4, 1, 0), (0, 0, -1), (4, 0, 1),
}


def as_int_set(rows):
    assert np.allclose(rows, np.round(rows), atol=1e-12)
    return {tuple(int(round(c)) for c in row) for row in rows}


def g1_dc():
    """max(|x1|, |x2|) on R^2."""
    return expr_to_dc(
        Max(
            Max(Affine(0.0, (1.0, 0.0)), Affine(0.0, (-1.0, 0.0))),
            Max(Affine(0.0, (0.0, 1.0)), Affine(0.0, (0.0, -1.0))),
        )
    )


def g2_dc():
    """1 + max(2|x1 - 2|, |x2 - 2|) on R^2."""
    return expr_to_dc(
        Sum(
            Const(1.0),
            Max(
                Scale(2.0, Max(Affine(-2.0, (1.0, 0.0)), Affine(2.0, (-1.0, 0.0)))),
                Max(Affine(-2.0, (0.0, 1.0)), Affine(2.0, (0.0, -1.0))),
            ),
        )
    )


# ---------------------------------------------------------------------------
# evaluation


def test_eval_showcase_points():
    f = worked_example()
    assert evaluate(f, [2.0, 2.0]) == pytest.approx(1.0, abs=1e-12)
    assert evaluate(f, [0.0, 0.0]) == pytest.approx(0.0, abs=1e-12)


def test_eval_single_affine_piece():
    f = DCForm(1, np.array([[0.0, 1.0]]), np.array([[0.0, 0.0]]))
    assert evaluate(f, [5.0]) == pytest.approx(5.0)


def test_eval_batch_and_dimension_check():
    f = worked_example()
    X = np.array([[2.0, 2.0], [0.0, 0.0]])
    assert np.allclose(evaluate(f, X), [1.0, 0.0])
    with pytest.raises(DimensionMismatch):
        evaluate(f, [1.0, 2.0, 3.0])


# ---------------------------------------------------------------------------
# global codifferential and translation


def test_global_codiff_showcase_vertex_sets():
    gc = global_codiff(worked_example(), [2.0, 2.0])
    assert as_int_set(gc.hypo) == SHOWCASE_HYPO
    assert as_int_set(gc.hyper) == SHOWCASE_HYPER


def test_global_codiff_single_affine():
    f = codiff_affine(3.0, np.array([2.0]), "hypo")
    for x in ([0.0], [7.0], [-4.0]):
        gc = global_codiff(f, x)
        assert np.allclose(gc.hypo, [[0.0, 2.0]])
        assert np.allclose(gc.hyper, [[0.0, 0.0]])


def test_normalization_at_random_points(rng):
    f = worked_example()
    for _ in range(50):
        gc = global_codiff(f, rng.normal(size=2) * 3)
        assert abs(gc.hypo[:, 0].max()) <= 1e-9
        assert abs(gc.hyper[:, 0].min()) <= 1e-9
        assert gc.hypo[:, 0].max() <= 1e-9 and (gc.hypo[:, 0] <= 1e-9).all()
        assert (gc.hyper[:, 0] >= -1e-9).all()


def test_translate_identity_and_consistency(rng):
    f = worked_example()
    gc = global_codiff(f, [2.0, 2.0])
    same = translate(f, gc, [2.0, 2.0])
    assert np.array_equal(same.hypo, gc.hypo) and np.array_equal(same.hyper, gc.hyper)

    direct = global_codiff(f, [0.0, 0.0])
    moved = translate(f, gc, [0.0, 0.0])
    assert np.abs(moved.hypo - direct.hypo).max() <= 1e-12
    assert np.abs(moved.hyper - direct.hyper).max() <= 1e-12

    for _ in range(20):
        y = rng.normal(size=2) * 3
        moved = translate(f, gc, y)
        direct = global_codiff(f, y)
        assert np.abs(moved.hypo - direct.hypo).max() <= 1e-9
        assert np.abs(moved.hyper - direct.hyper).max() <= 1e-9


def test_translate_abs_hand_computed():
    gc = global_codiff(ABS_X, [1.0])
    assert np.allclose(gc.hypo, [[0.0, 1.0], [-2.0, -1.0]])
    moved = translate(ABS_X, gc, [-1.0])
    assert np.allclose(moved.hypo, [[-2.0, 1.0], [0.0, -1.0]])


# ---------------------------------------------------------------------------
# calculus operations


def test_codiff_affine_flavors():
    hypo = codiff_affine(0.0, np.array([1.0]), "hypo")
    assert np.allclose(hypo.plus, [[0.0, 1.0]]) and np.allclose(hypo.minus, [[0.0, 0.0]])
    hyper = codiff_affine(2.0, np.array([3.0]), "hyper")
    assert np.allclose(hyper.plus, [[2.0, 0.0]]) and np.allclose(hyper.minus, [[0.0, 3.0]])
    for flavor in ("hypo", "hyper"):
        f = codiff_affine(2.0, np.array([3.0]), flavor)
        assert evaluate(f, [1.0]) == pytest.approx(5.0)
    with pytest.raises(ValueError):
        codiff_affine(0.0, np.array([1.0]), "sideways")


def test_codiff_scale(rng):
    f = expr_to_dc(Max(Affine(0.0, (1.0,)), Affine(0.0, (-1.0,))))
    assert np.array_equal(codiff_scale(1.0, f).plus, f.plus)
    neg = codiff_scale(-1.0, f)
    zero = codiff_scale(0.0, f)
    for _ in range(100):
        x = rng.normal(size=1) * 4
        assert evaluate(neg, x) == pytest.approx(-evaluate(f, x), abs=1e-12)
        assert evaluate(zero, x) == pytest.approx(0.0, abs=1e-12)


def test_codiff_sum_identity_and_pointwise(rng):
    f = g1_dc()
    assert np.array_equal(codiff_sum([f]).plus, f.plus)
    g = g2_dc()
    h = codiff_sum([f, g])
    for _ in range(100):
        x = rng.normal(size=2) * 3
        assert evaluate(h, x) == pytest.approx(evaluate(f, x) + evaluate(g, x), abs=1e-9)


def test_codiff_sum_matches_showcase_minkowski():
    # the showcase hypodifferential is the Minkowski sum of the two branches'
    h = codiff_sum([g1_dc(), g2_dc()])
    gc = global_codiff(h, [2.0, 2.0])
    assert as_int_set(gc.hypo) == SHOWCASE_HYPO


def test_codiff_max_branch_vertex_sets():
    g1 = g1_dc()
    gc = global_codiff(g1, [2.0, 2.0])
    assert as_int_set(gc.hypo) == {(0, 1, 0), (-4, -1, 0), (0, 0, 1), (-4, 0, -1)}
    assert as_int_set(gc.hyper) == {(0, 0, 0)}


def test_codiff_min_showcase_hyper():
    f = codiff_min([g1_dc(), g2_dc()])
    gc = global_codiff(f, [2.0, 2.0])
    assert as_int_set(gc.hyper) == SHOWCASE_HYPER


def test_codiff_max_min_single_operand():
    f = g1_dc()
    assert np.array_equal(codiff_max([f]).plus, f.plus)
    assert np.array_equal(codiff_min([f]).minus, f.minus)


def test_codiff_max_min_pointwise(rng):
    f, g = g1_dc(), g2_dc()
    fmax, fmin = codiff_max([f, g]), codiff_min([f, g])
    for _ in range(100):
        x = rng.normal(size=2) * 3
        assert evaluate(fmax, x) == pytest.approx(max(evaluate(f, x), evaluate(g, x)), abs=1e-9)
        assert evaluate(fmin, x) == pytest.approx(min(evaluate(f, x), evaluate(g, x)), abs=1e-9)


def test_size_overflow(rng):
    from codescent.pa import MAX_PIECES

    assert MAX_PIECES == 10**6
    # distinct two-piece min parts multiply under max: 2**k pieces
    forms = [
        expr_to_dc(Min(Affine(0.0, (rng.normal(),)), Affine(0.0, (rng.normal(),))))
        for _ in range(16)
    ]
    with pytest.raises(SizeOverflow):
        codiff_max(forms, max_pieces=10**4)


def test_dimension_mismatch_in_calculus():
    with pytest.raises(DimensionMismatch):
        codiff_sum([ABS_X, g1_dc()])


# ---------------------------------------------------------------------------
# expression trees


def test_expr_to_dc_affine_leaf():
    f = expr_to_dc(Affine(0.0, (1.0, 0.0)))
    assert np.allclose(f.plus, [[0.0, 1.0, 0.0]])
    assert np.allclose(f.minus, [[0.0, 0.0, 0.0]])


def test_expr_to_dc_min_of_affines():
    f = expr_to_dc(Min(Affine(1.0, (1.0,)), Affine(0.0, (-1.0,))))
    assert evaluate(f, [0.0]) == pytest.approx(0.0)
    assert evaluate(f, [2.0]) == pytest.approx(-2.0)


def test_showcase_expr_matches_tree_eval(rng):
    f = worked_example()

    def direct(x):
        return min(max(abs(x[0]), abs(x[1])), 1 + max(2 * abs(x[0] - 2), abs(x[1] - 2)))

    X = rng.uniform(-5, 5, size=(1000, 2))
    vals = evaluate(f, X)
    for x, v in zip(X, vals):
        assert abs(v - direct(x)) <= 1e-9


def test_random_trees_eval_and_exactness(rng):
    done = 0
    while done < 20:
        d = int(rng.integers(1, 4))
        e = random_expr(rng, int(rng.integers(1, 5)), d)
        try:
            f = expr_to_dc(e, d=d)
        except SizeOverflow:
            continue
        done += 1
        X = rng.normal(size=(100, d)) * 2
        DX = rng.normal(size=(100, d)) * 2
        for x, dx in zip(X, DX):
            fx = evaluate(f, x)
            tol = 1e-9 * (1 + abs(fx))
            assert abs(fx - expr_eval(e, x)) <= tol
            gc = global_codiff(f, x)
            assert abs(gc.expansion(dx) - (evaluate(f, x + dx) - fx)) <= tol


def test_expr_json_roundtrip(rng):
    e = random_expr(rng, 3, 2)
    e2 = expr_from_json(expr_to_json(e))
    assert e2 == e
    x = rng.normal(size=2)
    assert expr_eval(e2, x) == expr_eval(e, x)


def test_dcform_json_roundtrip_lossless(rng):
    f = worked_example()
    g = DCForm.from_json(f.to_json())
    assert g.plus.tobytes() == f.plus.tobytes()
    assert g.minus.tobytes() == f.minus.tobytes()
    # irrational entries survive the decimal round trip exactly
    h = DCForm(2, rng.normal(size=(3, 3)) / 3.0, rng.normal(size=(2, 3)) * np.pi)
    h2 = DCForm.from_json(h.to_json())
    assert h2.plus.tobytes() == h.plus.tobytes()
    assert h2.minus.tobytes() == h.minus.tobytes()


def test_dcform_validation():
    with pytest.raises(ValueError):
        DCForm(2, np.zeros((0, 3)), np.zeros((1, 3)))
    with pytest.raises(DimensionMismatch):
        DCForm(2, np.zeros((1, 2)), np.zeros((1, 3)))
