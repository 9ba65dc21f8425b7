import json
import math

import numpy as np
import pytest

from hconv.errors import ConstantTermTooSmall, DivergentTail, RadiusExceeded
from hconv.series import (
    DEFAULT_ORDER,
    DiskPoint,
    TruncatedSeries,
    default_order,
    differentiate,
    divide,
    divide_by_z,
    evaluate,
    geometric,
    hadamard,
    integrate_zero,
    monomial,
    multiply,
    reciprocal,
    shift,
    tail_bound,
    times_z,
)


def poly(c, order=8):
    return TruncatedSeries.from_polynomial(c, order)


def test_construction_and_shape():
    s = poly([1, 2, 3], order=5)
    assert s.order == 5
    assert len(s) == 6
    np.testing.assert_array_equal(s.coeffs, [1, 2, 3, 0, 0, 0])
    with pytest.raises(ValueError):
        s.coeffs[0] = 5  # read-only


def test_rejects_non_finite():
    with pytest.raises(ValueError):
        TruncatedSeries([1.0, math.nan])


def test_rejects_orders_beyond_engine_limit():
    with pytest.raises(ValueError):
        TruncatedSeries(np.zeros(8194))


def test_default_order_env(monkeypatch):
    monkeypatch.delenv("HCONV_ORDER", raising=False)
    assert default_order() == DEFAULT_ORDER
    monkeypatch.setenv("HCONV_ORDER", "40")
    assert default_order() == 40
    assert geometric().order == 40
    monkeypatch.setenv("HCONV_ORDER", "0")
    with pytest.raises(ValueError):
        default_order()


def test_multiply_difference_of_squares():
    p = multiply(poly([1, 1]), poly([1, -1]))
    np.testing.assert_array_equal(p.coeffs, poly([1, 0, -1]).coeffs)


def test_reciprocal_of_one_minus_z_is_geometric():
    r = reciprocal(poly([1, -1]))
    np.testing.assert_array_equal(r.coeffs, np.ones(9))


def test_reciprocal_rejects_small_constant():
    with pytest.raises(ConstantTermTooSmall):
        reciprocal(poly([1e-9, 1]))
    with pytest.raises(ZeroDivisionError):
        divide(poly([1]), poly([0, 1]))


def test_divide_recovers_factor():
    a, b = poly([2, -1, 3]), poly([1, 0.5])
    q = divide(multiply(a, b), b)
    np.testing.assert_allclose(q.coeffs, a.coeffs, atol=1e-15)


def test_mixed_orders_work_at_smaller_order():
    s = poly([1, 1], order=3) + poly([1, 1], order=6)
    assert s.order == 3


def test_differentiate_and_integrate():
    s = poly([0, 1, 1, 1])
    np.testing.assert_array_equal(differentiate(s).coeffs[:3], [1, 2, 3])
    np.testing.assert_array_equal(integrate_zero(poly([1, 2, 3])).coeffs[:4], [0, 1, 1, 1])


def test_hadamard_and_geometric_identity():
    s = poly([0, 2, -1, 4])
    assert hadamard(s, geometric(8)) == s
    np.testing.assert_array_equal(hadamard(poly([1, 2, 3]), poly([4, 5, 6])).coeffs[:3], [4, 10, 18])


def test_shifts_and_monomials():
    assert times_z(poly([1, 2], order=2)).order == 3
    np.testing.assert_array_equal(shift(poly([1, 2]), 2).coeffs[:4], [0, 0, 1, 2])
    np.testing.assert_array_equal(divide_by_z(poly([0, 3, 4])).coeffs[:2], [3, 4])
    with pytest.raises(ValueError):
        divide_by_z(poly([1, 1]))
    assert monomial(3, 2.0, order=5)[3] == 2.0


def test_evaluate_matches_closed_form():
    g = geometric(256)
    z = 0.5 * np.exp(1j * np.linspace(0, 2 * np.pi, 16))
    np.testing.assert_allclose(evaluate(g, z), z / (1 - z), atol=1e-14)
    assert evaluate(g, DiskPoint(0.5)) == pytest.approx(1.0)
    assert g(0.25) == pytest.approx(1 / 3)


def test_evaluate_enforces_radius_cap():
    with pytest.raises(RadiusExceeded):
        evaluate(geometric(8), 0.96)
    with pytest.raises(RadiusExceeded):
        DiskPoint(0.99)
    evaluate(geometric(8), 0.95)


def test_tail_bound_covers_true_tail():
    g = geometric(64)
    r = 0.7
    true_tail = r ** 65 / (1 - r)
    bound = tail_bound(g, r)
    assert true_tail <= bound <= 10 * true_tail


def test_tail_bound_tolerates_zero_coefficients():
    odd = TruncatedSeries([0 if n % 2 == 0 else 1 for n in range(65)])
    assert tail_bound(odd, 0.5) > 0


def test_tail_bound_divergent():
    with pytest.raises(DivergentTail):
        tail_bound(TruncatedSeries(2.0 ** np.arange(40)), 0.9)


def test_scalar_operators():
    s = poly([1, 2])
    assert (s * 2)[1] == 4
    assert (1 - s)[0] == 0
    assert (s + 1)[0] == 2
    assert (-s)[1] == -2


def test_json_round_trip():
    s = poly([1 + 2j, -0.5, 3e-17j])
    data = json.loads(s.to_json())
    assert data["order"] == 8
    assert TruncatedSeries.from_json(s.to_json()) == s
    assert TruncatedSeries.from_dict(s.to_dict()) == s
