import time

import pytest

from zkcred.circuits.polygon import COORD_OFFSET, POLYGON, point_in_polygon, polygon_inbound, scale_coordinate
from zkcred.circuits.r1cs import ConstraintSystem

from conftest import load_data

BAVARIA = [tuple(v) for v in load_data("bavaria_like_polygon.json")["vertices"]]


def polygon_circuit(n):
    cs = ConstraintSystem(f"polygon-{n}")
    x, y = cs.input("x"), cs.input("y")
    vs = [(cs.input(f"vx[{i}]", True), cs.input(f"vy[{i}]", True)) for i in range(n)]
    cs.output("inside", polygon_inbound(cs, x, y, vs))
    return cs


def run(cs, point, vertices):
    inputs = {"x": point[0], "y": point[1]}
    for i, (vx, vy) in enumerate(vertices):
        inputs[f"vx[{i}]"], inputs[f"vy[{i}]"] = vx, vy
    w = cs.evaluate(inputs)
    return w.named()["inside"]


def float_ray_cast(x, y, vertices):
    inside = False
    j = len(vertices) - 1
    for i, (xi, yi) in enumerate(vertices):
        xj, yj = vertices[j]
        if (yi > y) != (yj > y) and x < (xj - xi) * (y - yi) / (yj - yi) + xi:
            inside = not inside
        j = i
    return inside


def scaled(poly):
    return [(scale_coordinate(a), scale_coordinate(b)) for a, b in poly]


@pytest.mark.parametrize("n", [3, 4, 50])
def test_cost_per_vertex(n):
    assert polygon_circuit(n).counts()[POLYGON] == 333 * n


def test_unit_square():
    sq = [(0, 0), (10, 0), (10, 10), (0, 10)]
    sq = [(x + COORD_OFFSET, y + COORD_OFFSET) for x, y in sq]
    cs = polygon_circuit(4)
    for (px, py), want in [((5, 5), 1), ((15, 5), 0), ((-3, 5), 0), ((5, -1), 0), ((5, 11), 0),
                           ((0, 5), 1), ((10, 5), 0), ((5, 0), 1), ((5, 10), 0)]:
        pt = (px + COORD_OFFSET, py + COORD_OFFSET)
        assert point_in_polygon(*pt, sq) == bool(want)
        assert run(cs, pt, sq) == want


def test_far_point_stays_in_range():
    sq = scaled([(0, 0), (1, 0), (1, 1), (0, 1)])
    cs = polygon_circuit(4)
    for pt in [(-179.9, 89.9), (179.9, -89.9), (0.5, -89.9), (179.9, 0.5)]:
        assert run(cs, scaled([pt])[0], sq) == 0
    assert run(cs, scaled([(0.5, 0.5)])[0], sq) == 1


def test_bavaria_like_gadget_matches_oracles(rng):
    poly = scaled(BAVARIA)
    cs = polygon_circuit(len(poly))
    inside_count = 0
    for _ in range(60):
        lon, lat = round(rng.uniform(9.0, 14.0), 7), round(rng.uniform(47.0, 51.0), 7)
        pt = scaled([(lon, lat)])[0]
        want = point_in_polygon(*pt, poly)
        assert run(cs, pt, poly) == int(want)
        assert want == float_ray_cast(lon, lat, BAVARIA)
        inside_count += want
    assert 0 < inside_count < 60


def test_vertex_and_edge_points_follow_oracle():
    poly = scaled(BAVARIA)
    cs = polygon_circuit(len(poly))
    for i in range(0, len(poly), 7):
        a, b = poly[i], poly[i - 1]
        for pt in (a, ((a[0] + b[0]) // 2, (a[1] + b[1]) // 2)):
            assert run(cs, pt, poly) == int(point_in_polygon(*pt, poly))


def test_fifty_vertex_synthesis_is_fast():
    t = time.perf_counter()
    cs = polygon_circuit(50)
    assert cs.counts()[POLYGON] == 16_650
    assert time.perf_counter() - t < 5
