//! The growth exponent `γ(p, q)` on the square of reciprocal exponents, its
//! region decomposition, and the range where the upper bound is known.

use std::fmt;

use crate::error::{domain, Result};

/// Tolerance for equality tests against region boundaries; every critical
/// point is a rational function of `d`.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// `(x, y) = (1/p, 1/q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentPoint {
    pub x: f64,
    pub y: f64,
}

impl ExponentPoint {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) || !(0.0..=1.0).contains(&y) {
            return domain(format!("exponent point ({x}, {y}) must lie in the unit square"));
        }
        Ok(Self { x, y })
    }

    /// From Lebesgue exponents `p, q ∈ [1, ∞]`.
    pub fn from_pq(p: f64, q: f64) -> Result<Self> {
        if !(p >= 1.0) || !(q >= 1.0) {
            return domain(format!("Lebesgue exponents must be at least 1, got ({p}, {q})"));
        }
        Self::new(1.0 / p, 1.0 / q)
    }

    pub fn p(&self) -> f64 {
        1.0 / self.x
    }

    pub fn q(&self) -> f64 {
        1.0 / self.y
    }

    /// `(x, y)' = (1 − y, 1 − x)`.
    pub fn dual(&self) -> Self {
        Self { x: 1.0 - self.y, y: 1.0 - self.x }
    }

    fn close(&self, other: &Self) -> bool {
        (self.x - other.x).abs() <= BOUNDARY_TOL && (self.y - other.y).abs() <= BOUNDARY_TOL
    }
}

/// Named vertices of the region picture for a given `d`.
#[derive(Debug, Clone, Copy)]
pub struct CriticalPoints {
    pub p: ExponentPoint,
    pub r: ExponentPoint,
    pub s: ExponentPoint,
    pub q: ExponentPoint,
    pub u: ExponentPoint,
    pub c: ExponentPoint,
}

impl CriticalPoints {
    pub fn new(d: usize) -> Self {
        let d = d as f64;
        let pt = |x, y| ExponentPoint { x, y };
        Self {
            p: pt((d - 1.0) / (2.0 * d), (d - 1.0) / (2.0 * d)),
            r: pt((d + 1.0) / (2.0 * d), 0.0),
            s: pt((d + 1.0) / (2.0 * d), (d - 1.0).powi(2) / (2.0 * d * (d + 1.0))),
            q: pt((d * d + d - 4.0) / (2.0 * (d - 1.0) * (d + 2.0)), d / (2.0 * (d + 2.0))),
            u: pt(d / (2.0 * (d + 2.0)), d / (2.0 * (d + 2.0))),
            c: pt(0.5, 0.5),
        }
    }
}

/// Which branch of `γ` is active, or a distinguished segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Region {
    T1,
    T2,
    T3,
    T3Dual,
    /// The closed segment from `S` to `R`.
    SegSR,
    /// The closed segment from `S'` to `R'`.
    SegSRDual,
    Outside,
}

impl fmt::Display for Region {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Region::T1 => "T1",
            Region::T2 => "T2",
            Region::T3 => "T3",
            Region::T3Dual => "T3'",
            Region::SegSR => "SEG_SR",
            Region::SegSRDual => "SEG_SpRp",
            Region::Outside => "OUTSIDE",
        })
    }
}

/// What is known about the upper bound `‖H_n‖_{p,q} ≲ n^γ` at a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SharpStatus {
    Sharp,
    /// On `[S,R] ∪ [S',R']`: only restricted weak-type substitutes hold.
    SegmentWeak,
    /// Inside the two triangles `[Q,U,C] ∪ [Q',U',C]` minus `C`, where the
    /// bound is open.
    ExcludedTriangles,
    /// Outside `{y ≤ x}` or not a valid point.
    Unknown,
}

impl fmt::Display for SharpStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SharpStatus::Sharp => "SHARP",
            SharpStatus::SegmentWeak => "SEGMENT_WEAK",
            SharpStatus::ExcludedTriangles => "EXCLUDED_TRIANGLES",
            SharpStatus::Unknown => "UNKNOWN",
        })
    }
}

/// The four affine branches of `γ` in the order beam, cap, oscillation
/// set, dual oscillation set.
pub fn gamma_branches(d: usize, pt: ExponentPoint) -> [f64; 4] {
    let d = d as f64;
    let (x, y) = (pt.x, pt.y);
    [
        (d - 1.0) / 2.0 * (x - y),
        d * (x - y) - 1.0,
        (d - 1.0) / 2.0 - d * y,
        -(d + 1.0) / 2.0 + d * x,
    ]
}

/// `γ(p, q)`: the largest of the four branches.
pub fn gamma_exponent(d: usize, pt: ExponentPoint) -> f64 {
    gamma_branches(d, pt).into_iter().fold(f64::NEG_INFINITY, f64::max)
}

fn le(a: f64, b: f64) -> bool {
    a <= b + BOUNDARY_TOL
}

fn lt(a: f64, b: f64) -> bool {
    a < b - BOUNDARY_TOL
}

fn in_t1(d: f64, x: f64, y: f64) -> bool {
    le(y, x) && le((d - 1.0) / (d + 1.0) * (1.0 - x), y) && le(y, (d + 1.0) / (d - 1.0) * (1.0 - x)) && lt(x - y, 2.0 / (d + 1.0))
}

fn in_t2(d: f64, x: f64, y: f64) -> bool {
    le((d + 1.0) / (2.0 * d), x) && le(2.0 / (d + 1.0), x - y) && le(y, (d - 1.0) / (2.0 * d))
}

fn in_t3(d: f64, x: f64, y: f64) -> bool {
    le(y, x) && lt(y, (d - 1.0) / (d + 1.0) * (1.0 - x)) && lt(x, (d + 1.0) / (2.0 * d))
}

fn on_segment(a: ExponentPoint, b: ExponentPoint, pt: ExponentPoint) -> bool {
    let (ax, ay) = (b.x - a.x, b.y - a.y);
    let (px, py) = (pt.x - a.x, pt.y - a.y);
    let len2 = ax * ax + ay * ay;
    let cross = ax * py - ay * px;
    if cross.abs() > BOUNDARY_TOL * len2.sqrt().max(1.0) {
        return false;
    }
    let t = (px * ax + py * ay) / len2;
    (-BOUNDARY_TOL..=1.0 + BOUNDARY_TOL).contains(&t)
}

/// Region containing `pt`; segment tags take precedence over region tags.
pub fn classify_region(d: usize, pt: ExponentPoint) -> Result<Region> {
    if d < 2 {
        return domain(format!("dimension must be at least 2, got {d}"));
    }
    if pt.y > pt.x + BOUNDARY_TOL {
        return domain(format!("point ({}, {}) has y > x", pt.x, pt.y));
    }
    let cp = CriticalPoints::new(d);
    if on_segment(cp.s, cp.r, pt) {
        return Ok(Region::SegSR);
    }
    if on_segment(cp.s.dual(), cp.r.dual(), pt) {
        return Ok(Region::SegSRDual);
    }
    let df = d as f64;
    let (x, y) = (pt.x, pt.y);
    let dual = pt.dual();
    Ok(if in_t1(df, x, y) {
        Region::T1
    } else if in_t2(df, x, y) {
        Region::T2
    } else if in_t3(df, x, y) {
        Region::T3
    } else if in_t3(df, dual.x, dual.y) {
        Region::T3Dual
    } else {
        Region::Outside
    })
}

/// The branch of `γ` that the region decomposition selects.
pub fn piecewise_gamma(d: usize, pt: ExponentPoint) -> Result<f64> {
    let b = gamma_branches(d, pt);
    match classify_region(d, pt)? {
        Region::T1 => Ok(b[0]),
        Region::T2 | Region::SegSR | Region::SegSRDual => Ok(b[1]),
        Region::T3 => Ok(b[2]),
        Region::T3Dual => Ok(b[3]),
        Region::Outside => domain(format!("point ({}, {}) is not classified", pt.x, pt.y)),
    }
}

fn in_triangle(a: ExponentPoint, b: ExponentPoint, c: ExponentPoint, pt: ExponentPoint) -> bool {
    let cross = |p: ExponentPoint, q: ExponentPoint, r: ExponentPoint| (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
    let area = cross(a, b, c);
    if area.abs() <= BOUNDARY_TOL {
        // Degenerate hull: the longest of the three segments.
        return on_segment(a, b, pt) || on_segment(b, c, pt) || on_segment(a, c, pt);
    }
    let s = area.signum();
    [cross(a, b, pt), cross(b, c, pt), cross(c, a, pt)].iter().all(|&v| s * v >= -BOUNDARY_TOL)
}

/// Status of the sharp upper bound at `pt`.
pub fn sharp_range_status(d: usize, pt: ExponentPoint) -> SharpStatus {
    if d < 2 || !pt.x.is_finite() || !pt.y.is_finite() || pt.y > pt.x + BOUNDARY_TOL {
        return SharpStatus::Unknown;
    }
    let cp = CriticalPoints::new(d);
    if on_segment(cp.s, cp.r, pt) || on_segment(cp.s.dual(), cp.r.dual(), pt) {
        return SharpStatus::SegmentWeak;
    }
    if pt.close(&cp.c) {
        return SharpStatus::Sharp;
    }
    if in_triangle(cp.q, cp.u, cp.c, pt) || in_triangle(cp.q.dual(), cp.u.dual(), cp.c, pt) {
        return SharpStatus::ExcludedTriangles;
    }
    SharpStatus::Sharp
}

/// Triangle grid `{(i/(K−1), j/(K−1)) : 0 ≤ j ≤ i < K}` in row-major order,
/// `K(K+1)/2` points; `K < 2` is treated as `2`.
pub fn triangle_grid(k: usize) -> impl Iterator<Item = ExponentPoint> {
    let k = k.max(2);
    let h = (k - 1) as f64;
    (0..k).flat_map(move |i| (0..=i).map(move |j| ExponentPoint { x: i as f64 / h, y: j as f64 / h }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn pt(x: f64, y: f64) -> ExponentPoint {
        ExponentPoint::new(x, y).unwrap()
    }

    #[test]
    fn gamma_examples() {
        for d in 2..=4 {
            assert_eq!(gamma_exponent(d, pt(0.5, 0.5)), 0.0);
        }
        assert_eq!(gamma_exponent(3, pt(1.0, 0.0)), 2.0);
        let s = CriticalPoints::new(2).s;
        assert!((gamma_exponent(2, s) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn classification_examples() {
        assert_eq!(classify_region(2, pt(0.9, 0.05)).unwrap(), Region::T2);
        assert_eq!(classify_region(3, pt(0.5, 0.0)).unwrap(), Region::T3);
        assert_eq!(classify_region(2, CriticalPoints::new(2).s).unwrap(), Region::SegSR);
        assert_eq!(classify_region(2, pt(0.6, 0.3)).unwrap(), Region::T1);
        assert_eq!(classify_region(2, pt(0.95, 0.7)).unwrap(), Region::T3Dual);
        assert!(classify_region(2, pt(0.2, 0.4)).is_err());
    }

    #[test]
    fn status_examples() {
        assert_eq!(sharp_range_status(2, pt(0.5, 0.5)), SharpStatus::Sharp);
        assert_eq!(sharp_range_status(3, pt(0.3, 0.3)), SharpStatus::ExcludedTriangles);
        assert_eq!(sharp_range_status(3, CriticalPoints::new(3).q.dual()), SharpStatus::ExcludedTriangles);
        assert_eq!(sharp_range_status(2, pt(0.4, 0.4)), SharpStatus::ExcludedTriangles);
        assert_eq!(sharp_range_status(2, pt(0.5, 0.4)), SharpStatus::Sharp);
        assert_eq!(sharp_range_status(2, pt(0.75, 0.05)), SharpStatus::SegmentWeak);
        assert_eq!(sharp_range_status(2, pt(0.1, 0.2)), SharpStatus::Unknown);
        // Strictly inside (S, S') on the critical line x − y = 2/(d+1).
        let (s, sp) = (CriticalPoints::new(2).s, CriticalPoints::new(2).s.dual());
        let mid = pt(0.5 * (s.x + sp.x), 0.5 * (s.y + sp.y));
        assert_eq!(sharp_range_status(2, mid), SharpStatus::Sharp);
        assert!((gamma_exponent(2, mid) - (1.0 - 2.0 / 3.0)).abs() < 1e-12);
    }

    #[test]
    fn critical_points_d3() {
        let cp = CriticalPoints::new(3);
        assert!((cp.u.x - 0.3).abs() < 1e-15);
        assert!((cp.q.x - 0.4).abs() < 1e-15 && (cp.q.y - 0.3).abs() < 1e-15);
        let cp2 = CriticalPoints::new(2);
        assert!(cp2.q.close(&cp2.u));
    }

    #[test]
    fn partition_and_consistency_on_grid() {
        for d in 2..=4 {
            let mut count = 0;
            for p in triangle_grid(200) {
                count += 1;
                let r = classify_region(d, p).unwrap();
                assert_ne!(r, Region::Outside, "d={d} ({}, {})", p.x, p.y);
                let g = gamma_exponent(d, p);
                assert!(g >= -1e-15);
                let pg = piecewise_gamma(d, p).unwrap();
                assert!((pg - g).abs() < 1e-12, "d={d} {r} ({}, {}): {pg} vs {g}", p.x, p.y);
                let pd = piecewise_gamma(d, p.dual()).unwrap();
                assert!((pd - pg).abs() < 1e-12);
                let cp = CriticalPoints::new(d);
                let on_pp = (p.x - p.y).abs() < 1e-15 && p.x >= cp.p.x - 1e-12 && p.x <= 1.0 - cp.p.x + 1e-12;
                assert_eq!(g.abs() < 1e-13, on_pp, "d={d} ({}, {})", p.x, p.y);
            }
            assert_eq!(count, 200 * 201 / 2);
        }
    }

    #[test]
    fn regions_mutually_exclusive() {
        for d in 2..=4 {
            let df = d as f64;
            for p in triangle_grid(120) {
                let dual = p.dual();
                let hits = [in_t1(df, p.x, p.y), in_t2(df, p.x, p.y), in_t3(df, p.x, p.y), in_t3(df, dual.x, dual.y)];
                assert!(hits.iter().filter(|&&h| h).count() <= 1, "d={d} ({}, {}) {hits:?}", p.x, p.y);
            }
        }
    }

    proptest! {
        #[test]
        fn duality_preserves_gamma(d in 2usize..=4, a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let (x, y) = if a >= b { (a, b) } else { (b, a) };
            let p = pt(x, y);
            prop_assert!((gamma_exponent(d, p) - gamma_exponent(d, p.dual())).abs() < 1e-12);
            prop_assert_eq!(sharp_range_status(d, p), sharp_range_status(d, p.dual()));
        }
    }
}
