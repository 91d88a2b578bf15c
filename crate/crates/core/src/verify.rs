//! Hull validation and an independent monotone-chain oracle.

use std::collections::HashSet;
use std::fmt;

use crate::geometry::{is_left_of, DirectedEdge, Point, PointSet};

/// Largest magnitude for which integer inputs are handled exactly by the hull predicates.
pub const EXACT_LIMIT: f64 = (1u64 << 25) as f64;

/// Whether every coordinate is an integer of magnitude below [`EXACT_LIMIT`].
pub fn in_exact_envelope(points: &PointSet) -> bool {
    points.iter().all(|p| {
        p.x.fract() == 0.0
            && p.y.fract() == 0.0
            && p.x.abs() < EXACT_LIMIT
            && p.y.abs() < EXACT_LIMIT
    })
}

fn integral(points: &PointSet) -> bool {
    const LIM: f64 = (1u64 << 53) as f64;
    points
        .iter()
        .all(|p| p.x.fract() == 0.0 && p.y.fract() == 0.0 && p.x.abs() <= LIM && p.y.abs() <= LIM)
}

/// Sign of the turn `a -> b -> c`, positive when counter-clockwise.
fn turn_exact(a: Point, b: Point, c: Point) -> i128 {
    let (ax, ay) = (a.x as i128, a.y as i128);
    let (bx, by) = (b.x as i128, b.y as i128);
    let (cx, cy) = (c.x as i128, c.y as i128);
    ((bx - ax) * (cy - ay) - (by - ay) * (cx - ax)).signum()
}

fn turn_float(a: Point, b: Point, c: Point) -> i128 {
    let d = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
    if d > 0.0 {
        1
    } else if d < 0.0 {
        -1
    } else {
        0
    }
}

/// Andrew's monotone chain, collinear points dropped, returned clockwise
/// from the leftmost-lowest point. Exact when all coordinates are integers
/// of magnitude at most 2^53.
pub fn monotone_chain(points: &PointSet) -> Vec<Point> {
    let turn = if integral(points) {
        turn_exact
    } else {
        turn_float
    };
    let mut pts: Vec<Point> = points.iter().collect();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup_by(|a, b| a.x == b.x && a.y == b.y);
    if pts.len() <= 2 {
        return pts;
    }
    let chain = |iter: &mut dyn Iterator<Item = Point>| {
        let mut out: Vec<Point> = Vec::new();
        for u in iter {
            // Keep only clockwise turns.
            while out.len() >= 2 && turn(out[out.len() - 2], out[out.len() - 1], u) >= 0 {
                out.pop();
            }
            out.push(u);
        }
        out
    };
    let mut upper = chain(&mut pts.iter().copied());
    let lower = chain(&mut pts.iter().rev().copied());
    upper.pop();
    upper.extend_from_slice(&lower[..lower.len() - 1]);
    upper
}

#[derive(Clone, Debug, PartialEq)]
pub enum Violation {
    /// A vertex that is not one of the input points.
    NotInInput {
        vertex: usize,
        point: Point,
    },
    Duplicate {
        vertex: usize,
        point: Point,
    },
    /// The turn at this vertex is not strictly clockwise.
    NotConvex {
        vertex: usize,
        point: Point,
    },
    /// An input point strictly left of a hull edge.
    Outside {
        index: usize,
        point: Point,
        edge: usize,
    },
    /// First position where the hull differs from the oracle.
    OracleMismatch {
        position: usize,
        expected: Option<Point>,
        found: Option<Point>,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pt = |p: &Point| format!("({}, {})", p.x, p.y);
        let opt = |p: &Option<Point>| p.as_ref().map_or("nothing".to_string(), pt);
        match self {
            Violation::NotInInput { vertex, point } => {
                write!(f, "vertex {vertex} {} is not an input point", pt(point))
            }
            Violation::Duplicate { vertex, point } => {
                write!(f, "vertex {vertex} {} repeats", pt(point))
            }
            Violation::NotConvex { vertex, point } => {
                write!(
                    f,
                    "vertex {vertex} {} is not a strict clockwise turn",
                    pt(point)
                )
            }
            Violation::Outside { index, point, edge } => {
                write!(
                    f,
                    "input point {index} {} lies outside edge {edge}",
                    pt(point)
                )
            }
            Violation::OracleMismatch {
                position,
                expected,
                found,
            } => write!(
                f,
                "position {position}: expected {}, found {}",
                opt(expected),
                opt(found)
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyReport {
    pub points: usize,
    pub vertices: usize,
    /// Whether the oracle comparison ran (exactness-envelope inputs only).
    pub oracle_checked: bool,
    pub violation: Option<Violation>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let oracle = if self.oracle_checked {
            "oracle checked"
        } else {
            "oracle skipped"
        };
        match &self.violation {
            None => write!(
                f,
                "PASS: {} vertices, {} points, {oracle}",
                self.vertices, self.points
            ),
            Some(v) => write!(f, "FAIL: {v}"),
        }
    }
}

fn structural(points: &PointSet, hull: &[Point]) -> Option<Violation> {
    let input: HashSet<(u64, u64)> = points.iter().map(|p| p.bits()).collect();
    let mut seen = HashSet::with_capacity(hull.len());
    for (vertex, &point) in hull.iter().enumerate() {
        if !input.contains(&point.bits()) {
            return Some(Violation::NotInInput { vertex, point });
        }
        if !seen.insert(point.bits()) {
            return Some(Violation::Duplicate { vertex, point });
        }
    }
    let h = hull.len();
    if h >= 3 {
        for i in 0..h {
            let (a, b, c) = (hull[(i + h - 1) % h], hull[i], hull[(i + 1) % h]);
            // c strictly right of a -> b.
            if !is_left_of(c, &DirectedEdge::new(b, a)) {
                return Some(Violation::NotConvex {
                    vertex: i,
                    point: b,
                });
            }
        }
    }
    None
}

fn outside_edge(hull: &[Point], u: Point) -> Option<usize> {
    let h = hull.len();
    (0..h).find(|&i| is_left_of(u, &DirectedEdge::new(hull[i], hull[(i + 1) % h])))
}

/// Index of the first input point outside the hull, with the edge it violates.
fn containment(points: &PointSet, hull: &[Point]) -> Option<Violation> {
    let h = hull.len();
    if h == 0 {
        return (!points.is_empty()).then(|| Violation::Outside {
            index: 0,
            point: points.get(0),
            edge: 0,
        });
    }
    if h == 1 {
        let v = hull[0];
        return points
            .iter()
            .position(|u| u != v)
            .map(|index| Violation::Outside {
                index,
                point: points.get(index),
                edge: 0,
            });
    }
    if h == 2 {
        return points.iter().enumerate().find_map(|(index, u)| {
            outside_edge(hull, u).map(|edge| Violation::Outside {
                index,
                point: u,
                edge,
            })
        });
    }
    // Wedge search around hull[0], then a direct test of the wedge's outer edge.
    // A point flagged that way is confirmed against every edge before it is reported.
    let v0 = hull[0];
    for (index, u) in points.iter().enumerate() {
        let right_of = |a: Point, b: Point| is_left_of(u, &DirectedEdge::new(b, a));
        let suspicious =
            if is_left_of(u, &DirectedEdge::new(v0, hull[1])) || right_of(v0, hull[h - 1]) {
                true
            } else {
                // Largest i in [1, h-2] with u not strictly left of v0 -> hull[i].
                let (mut lo, mut hi) = (1usize, h - 2);
                while lo < hi {
                    let mid = (lo + hi).div_ceil(2);
                    if is_left_of(u, &DirectedEdge::new(v0, hull[mid])) {
                        hi = mid - 1;
                    } else {
                        lo = mid;
                    }
                }
                is_left_of(u, &DirectedEdge::new(hull[lo], hull[lo + 1]))
            };
        if suspicious {
            if let Some(edge) = outside_edge(hull, u) {
                return Some(Violation::Outside {
                    index,
                    point: u,
                    edge,
                });
            }
        }
    }
    None
}

/// Validates `hull` against `points`: membership, distinctness, strict
/// clockwise convexity and containment, plus equality with the oracle on
/// exactness-envelope inputs.
pub fn verify_hull(points: &PointSet, hull: &[Point]) -> VerifyReport {
    let oracle_checked = in_exact_envelope(points);
    let violation = structural(points, hull)
        .or_else(|| containment(points, hull))
        .or_else(|| {
            if !oracle_checked {
                return None;
            }
            let expected = monotone_chain(points);
            (0..expected.len().max(hull.len()))
                .find(|&i| expected.get(i).map(Point::bits) != hull.get(i).map(Point::bits))
                .map(|position| Violation::OracleMismatch {
                    position,
                    expected: expected.get(position).copied(),
                    found: hull.get(position).copied(),
                })
        });
    VerifyReport {
        points: points.len(),
        vertices: hull.len(),
        oracle_checked,
        violation,
    }
}
