"""Point-in-polygon (crossing number) predicate.

Coordinates are decimal degrees scaled by 10**7 (the float attribute
encoding), shifted by 2**31 so every value is a non-negative 32-bit
integer.  For edge (i, j) the classical test

    (yi > y) != (yj > y)  and  x < (xj - xi) * (y - yi) / (yj - yi) + xi

is evaluated without division by cross-multiplying with (yj - yi) and
picking the comparison direction from the sign of (yj - yi).  Each edge
costs 333 constraints: five 64-bit comparators (65 each) and eight
products.  The first edge's parity update folds against the constant
starting parity, and the result is materialized as a single variable at the
end instead, so the total is exactly 333 * n.  The cross products are zeroed for edges that do not straddle the
horizontal through the point, which keeps the comparator operands in range
no matter how far the point is from the polygon, as long as every edge
spans less than 2**31 units (about 214 degrees) in each direction.

Tie-break: the half-open rule of the strict comparisons above; a point on
a vertex or edge is inside or outside exactly as the native oracle says.
"""

from typing import Sequence, Tuple

from ..arith.field import signed
from ..encoding import encode_float
from . import gadgets
from .r1cs import LC, ConstraintSystem, as_lc

POLYGON = "Polygon edge"

COORD_OFFSET = 1 << 31
COMPARATOR_BITS = 64


def scale_coordinate(deg: float) -> int:
    """Decimal degrees -> offset non-negative integer."""
    return signed(encode_float(deg)) + COORD_OFFSET


def point_in_polygon(x: int, y: int, vertices: Sequence[Tuple[int, int]]) -> bool:
    """Integer crossing-number oracle on offset coordinates."""
    inside = False
    n = len(vertices)
    j = n - 1
    for i in range(n):
        xi, yi = vertices[i]
        xj, yj = vertices[j]
        if (yi > y) != (yj > y):
            lhs = (x - xi) * (yj - yi)
            rhs = (xj - xi) * (y - yi)
            if (lhs < rhs) if yj > yi else (lhs > rhs):
                inside = not inside
        j = i
    return inside


def polygon_inbound(cs: ConstraintSystem, x, y, vertices: Sequence[Tuple[object, object]]) -> LC:
    """Inside bit for point (x, y); all arguments in offset integer form."""
    if len(vertices) < 3:
        raise ValueError("a polygon needs at least three vertices")
    x, y = as_lc(x), as_lc(y)
    inside = LC()
    n = len(vertices)
    for i in range(n):
        xi, yi = map(as_lc, vertices[i])
        xj, yj = map(as_lc, vertices[i - 1])
        with cs.component(POLYGON):
            above_i = gadgets.less_than(cs, y, yi, COMPARATOR_BITS)
            above_j = gadgets.less_than(cs, y, yj, COMPARATOR_BITS)
            rising = gadgets.less_than(cs, yi, yj, COMPARATOR_BITS)
            straddle = gadgets.xor(cs, above_i, above_j)
            lhs = cs.mul(x - xi, yj - yi)
            rhs = cs.mul(xj - xi, y - yi)
            gap = cs.mul(straddle, rhs - lhs)
            lhs_lt = gadgets.less_than(cs, 0, gap, COMPARATOR_BITS)
            lhs_gt = gadgets.less_than(cs, gap, 0, COMPARATOR_BITS)
            left_of = cs.mul(rising, lhs_lt) + cs.mul(LC.const(1) - rising, lhs_gt)
            crossing = cs.mul(straddle, left_of)
            inside = gadgets.xor(cs, inside, crossing)
            if i == n - 1:
                out = cs.alloc(lambda w, lc=inside: lc.eval(w))
                cs.enforce(out, 1, inside)
    return out


def offset_lc(encoded) -> LC:
    """Field-encoded signed coordinate -> offset form (free, linear)."""
    return as_lc(encoded) + COORD_OFFSET
