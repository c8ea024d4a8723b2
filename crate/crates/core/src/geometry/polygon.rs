//! Convex polygons in H- and V-representation.

use alloc::vec::Vec;
use core::f64::consts::PI;

use super::{HalfPlane, Vec2};
use crate::{Error, Result};
#[allow(unused_imports)]
use num_traits::Float;

/// Strictly convex polygon with counter-clockwise vertices.
///
/// Half-plane `i` carries the edge from vertex `i` to vertex `i + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct Polygon {
    vertices: Vec<Vec2>,
    planes: Vec<HalfPlane>,
    area: f64,
    perimeter: f64,
    diameter: f64,
    inradius: f64,
    incenter: Vec2,
}

fn shoelace(v: &[Vec2]) -> f64 {
    let n = v.len();
    0.5 * (0..n).map(|i| v[i].cross(v[(i + 1) % n])).sum::<f64>()
}

fn perimeter_of(v: &[Vec2]) -> f64 {
    let n = v.len();
    (0..n).map(|i| (v[(i + 1) % n] - v[i]).norm()).sum()
}

fn diameter_of(v: &[Vec2]) -> f64 {
    let mut d: f64 = 0.0;
    for (i, a) in v.iter().enumerate() {
        for b in &v[i + 1..] {
            d = d.max((*a - *b).norm());
        }
    }
    d
}

fn planes_of(v: &[Vec2]) -> Vec<HalfPlane> {
    let n = v.len();
    (0..n)
        .map(|i| {
            let a = v[i];
            let normal = (v[(i + 1) % n] - a).rot_cw().normalized();
            HalfPlane {
                normal,
                offset: normal.dot(a),
            }
        })
        .collect()
}

fn det3(m: [[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Largest inscribed disk by enumerating all triples of edge lines.
///
/// For every triple the equidistance system `n_k·p + r = c_k` is solved; the
/// candidate is kept if every other edge is at least `r` away. Ties go to the
/// lexicographically smallest center.
fn chebyshev_center(planes: &[HalfPlane], scale: f64) -> Option<(Vec2, f64)> {
    let tol = 1e-12 * scale;
    let m = planes.len();
    let mut best: Option<(Vec2, f64)> = None;
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let rows = [planes[i], planes[j], planes[k]];
                let mat = rows.map(|h| [h.normal.x, h.normal.y, 1.0]);
                let det = det3(mat);
                if det.abs() < 1e-14 {
                    continue;
                }
                let col = |c: usize| {
                    let mut mm = mat;
                    for (row, h) in mm.iter_mut().zip(&rows) {
                        row[c] = h.offset;
                    }
                    det3(mm) / det
                };
                let (p, r) = (Vec2::new(col(0), col(1)), col(2));
                if r <= tol || planes.iter().any(|h| h.slack(p) < r - tol) {
                    continue;
                }
                best = match best {
                    Some((bp, br)) if !(r > br + tol || ((r - br).abs() <= tol && lex_less(p, bp, tol))) => {
                        Some((bp, br))
                    }
                    _ => Some((p, r)),
                };
            }
        }
    }
    best
}

fn lex_less(a: Vec2, b: Vec2, tol: f64) -> bool {
    if (a.x - b.x).abs() > tol {
        a.x < b.x
    } else {
        a.y < b.y - tol
    }
}

/// Removes consecutive near-duplicates and collinear vertices from a ring.
fn clean_ring(mut pts: Vec<Vec2>, tol: f64) -> Vec<Vec2> {
    let mut changed = true;
    while changed && pts.len() >= 3 {
        changed = false;
        let n = pts.len();
        for i in 0..n {
            let prev = pts[(i + n - 1) % n];
            let cur = pts[i];
            let next = pts[(i + 1) % n];
            let dup = (cur - prev).norm() <= tol;
            let e1 = cur - prev;
            let e2 = next - cur;
            let flat = e1.cross(e2) <= tol * (e1.norm() + e2.norm());
            if dup || flat {
                pts.remove(i);
                changed = true;
                break;
            }
        }
    }
    pts
}

/// Clips a convex ring by `n·x <= offset`.
pub(crate) fn clip_ring(pts: &[Vec2], h: &HalfPlane) -> Vec<Vec2> {
    let n = pts.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        let sa = h.slack(a);
        let sb = h.slack(b);
        if sa >= 0.0 {
            out.push(a);
        }
        if (sa >= 0.0) != (sb >= 0.0) {
            let t = sa / (sa - sb);
            out.push(a + (b - a) * t);
        }
    }
    out
}

/// Parameter interval `{τ : p0 + τ·u satisfies every plane}`; planes are
/// shifted inward by `shift`.
pub(crate) fn clip_line(planes: &[HalfPlane], shift: f64, p0: Vec2, u: Vec2) -> Option<(f64, f64)> {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for h in planes {
        let a = h.normal.dot(u);
        let b = h.offset - shift - h.normal.dot(p0);
        if a.abs() < 1e-15 {
            if b < 0.0 {
                return None;
            }
        } else if a > 0.0 {
            hi = hi.min(b / a);
        } else {
            lo = lo.max(b / a);
        }
    }
    (lo <= hi).then_some((lo, hi))
}

/// Signed area of `disk(0, r) ∩ triangle(0, a, b)`.
fn disk_triangle_area(a: Vec2, b: Vec2, r: f64) -> f64 {
    let r2 = r * r;
    let sector = |u: Vec2, v: Vec2| 0.5 * r2 * u.cross(v).atan2(u.dot(v));
    let (na, nb) = (a.norm_sq(), b.norm_sq());
    if na <= r2 && nb <= r2 {
        return 0.5 * a.cross(b);
    }
    let d = b - a;
    let dd = d.norm_sq();
    if dd == 0.0 {
        return 0.0;
    }
    let ad = a.dot(d);
    let disc = ad * ad - dd * (na - r2);
    if disc <= 0.0 {
        return sector(a, b);
    }
    let sq = disc.sqrt();
    let t1 = (-ad - sq) / dd;
    let t2 = (-ad + sq) / dd;
    if t2 <= 0.0 || t1 >= 1.0 {
        return sector(a, b);
    }
    let p1 = a + d * t1.max(0.0);
    let p2 = a + d * t2.min(1.0);
    sector(a, p1) + 0.5 * p1.cross(p2) + sector(p2, b)
}

/// Length of the part of segment `[a, b]` inside the open disk `B_r(c)`.
pub(crate) fn segment_in_disk(a: Vec2, b: Vec2, c: Vec2, r: f64) -> Option<(f64, f64)> {
    let d = b - a;
    let w = a - c;
    let dd = d.norm_sq();
    let wd = w.dot(d);
    let disc = wd * wd - dd * (w.norm_sq() - r * r);
    if disc <= 0.0 || dd == 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let t1 = ((-wd - sq) / dd).max(0.0);
    let t2 = ((-wd + sq) / dd).min(1.0);
    (t1 < t2).then_some((t1, t2))
}

impl Polygon {
    /// Validates a CCW vertex list and computes exact metrics.
    pub fn new(vertices: Vec<Vec2>) -> Result<Self> {
        let n = vertices.len();
        if n < 3 {
            return Err(Error::Degenerate("polygon needs at least three vertices"));
        }
        if vertices.iter().any(|v| !v.x.is_finite() || !v.y.is_finite()) {
            return Err(Error::Degenerate("non-finite vertex"));
        }
        for i in 0..n {
            for j in i + 1..n {
                if vertices[i] == vertices[j] {
                    return Err(Error::Degenerate("repeated vertex"));
                }
            }
        }
        let mut turning = 0.0;
        for i in 0..n {
            let e1 = vertices[(i + 1) % n] - vertices[i];
            let e2 = vertices[(i + 2) % n] - vertices[(i + 1) % n];
            let c = e1.cross(e2);
            if c <= 0.0 {
                return Err(Error::NonConvex { index: (i + 1) % n });
            }
            turning += c.atan2(e1.dot(e2));
        }
        // all left turns but winding more than once: a star polygon
        if turning > 2.0 * PI + 1e-9 {
            return Err(Error::NonConvex { index: 0 });
        }
        let area = shoelace(&vertices);
        if area <= 0.0 {
            return Err(Error::Degenerate("zero area"));
        }
        let planes = planes_of(&vertices);
        let diameter = diameter_of(&vertices);
        let (incenter, inradius) =
            chebyshev_center(&planes, diameter).ok_or(Error::Degenerate("no inscribed disk"))?;
        Ok(Self {
            perimeter: perimeter_of(&vertices),
            vertices,
            planes,
            area,
            diameter,
            inradius,
            incenter,
        })
    }

    /// Axis-aligned rectangle `[x0, x0+a] × [y0, y0+b]`.
    pub fn rectangle(origin: Vec2, a: f64, b: f64) -> Result<Self> {
        Self::new(alloc::vec![
            origin,
            origin + Vec2::new(a, 0.0),
            origin + Vec2::new(a, b),
            origin + Vec2::new(0.0, b),
        ])
    }

    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn planes(&self) -> &[HalfPlane] {
        &self.planes
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Endpoints of edge `i`.
    pub fn edge(&self, i: usize) -> (Vec2, Vec2) {
        (self.vertices[i], self.vertices[(i + 1) % self.len()])
    }

    pub fn edge_length(&self, i: usize) -> f64 {
        let (a, b) = self.edge(i);
        (b - a).norm()
    }

    /// Unit tangent of edge `i` (direction of traversal).
    pub fn edge_tangent(&self, i: usize) -> Vec2 {
        let (a, b) = self.edge(i);
        (b - a).normalized()
    }

    pub fn area(&self) -> f64 {
        self.area
    }

    pub fn perimeter(&self) -> f64 {
        self.perimeter
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    pub fn inradius(&self) -> f64 {
        self.inradius
    }

    pub fn incenter(&self) -> Vec2 {
        self.incenter
    }

    /// `dist(p, Ω^c)`; zero outside.
    pub fn distance_to_complement(&self, p: Vec2) -> f64 {
        self.planes
            .iter()
            .map(|h| h.slack(p))
            .fold(f64::INFINITY, f64::min)
            .max(0.0)
    }

    /// Open-set membership.
    pub fn contains(&self, p: Vec2) -> bool {
        self.planes.iter().all(|h| h.slack(p) > 0.0)
    }

    /// `dist(p, Ω)`; zero inside.
    pub fn exterior_distance(&self, p: Vec2) -> f64 {
        if self.planes.iter().all(|h| h.slack(p) >= 0.0) {
            return 0.0;
        }
        (0..self.len())
            .map(|i| {
                let (a, b) = self.edge(i);
                let d = b - a;
                let t = ((p - a).dot(d) / d.norm_sq()).clamp(0.0, 1.0);
                (a + d * t - p).norm()
            })
            .fold(f64::INFINITY, f64::min)
    }

    /// Index of the nearest edge line for an interior point together with the
    /// nearest and second-nearest distances.
    pub fn nearest_edges(&self, p: Vec2) -> (usize, f64, f64) {
        let mut best = (usize::MAX, f64::INFINITY, f64::INFINITY);
        for (i, h) in self.planes.iter().enumerate() {
            let s = h.slack(p);
            if s < best.1 {
                best = (i, s, best.1);
            } else if s < best.2 {
                best.2 = s;
            }
        }
        best
    }

    /// Inner parallel body `{d_Ω > s}`; `None` once `s >= r_in`.
    pub fn erode(&self, s: f64) -> Option<Polygon> {
        if s <= 0.0 {
            return Some(self.clone());
        }
        if s >= self.inradius * (1.0 - 1e-12) {
            return None;
        }
        let mut ring = self.vertices.clone();
        for h in &self.planes {
            ring = clip_ring(&ring, &h.shifted(s));
            if ring.len() < 3 {
                return None;
            }
        }
        let ring = clean_ring(ring, 1e-13 * self.diameter);
        if ring.len() < 3 {
            return None;
        }
        let area = shoelace(&ring);
        if area <= 0.0 {
            return None;
        }
        Some(Polygon {
            perimeter: perimeter_of(&ring),
            diameter: diameter_of(&ring),
            planes: planes_of(&ring),
            vertices: ring,
            area,
            inradius: self.inradius - s,
            incenter: self.incenter,
        })
    }

    /// Exact `|Ω ∩ B_r(c)|` by summing signed disk–triangle areas over edges.
    pub fn disk_intersection_area(&self, c: Vec2, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let total: f64 = (0..self.len())
            .map(|i| {
                let (a, b) = self.edge(i);
                disk_triangle_area(a - c, b - c, r)
            })
            .sum();
        total.max(0.0)
    }

    /// `H¹(∂Ω ∩ B_r(c))`.
    pub fn boundary_length_in_disk(&self, c: Vec2, r: f64) -> f64 {
        (0..self.len())
            .filter_map(|i| {
                let (a, b) = self.edge(i);
                segment_in_disk(a, b, c, r).map(|(t1, t2)| (t2 - t1) * (b - a).norm())
            })
            .sum()
    }

    /// Image under `x ↦ λx + shift`.
    pub fn affine(&self, scale: f64, shift: Vec2) -> Result<Polygon> {
        Polygon::new(self.vertices.iter().map(|&v| v * scale + shift).collect())
    }
}

/// Convex hull (Andrew's monotone chain), strictly convex, CCW.
pub fn convex_hull(points: &[Vec2]) -> Vec<Vec2> {
    let mut pts: Vec<Vec2> = points.to_vec();
    pts.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap().then(a.y.partial_cmp(&b.y).unwrap()));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Vec2> = Vec::with_capacity(2 * pts.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: &mut dyn Iterator<Item = &Vec2> = if pass == 0 { &mut pts.iter() } else { &mut pts.iter().rev() };
        for &p in iter {
            while hull.len() >= start + 2 {
                let a = hull[hull.len() - 2];
                let b = hull[hull.len() - 1];
                if (b - a).cross(p - b) <= 0.0 {
                    hull.pop();
                } else {
                    break;
                }
            }
            hull.push(p);
        }
        hull.pop();
    }
    hull
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn unit_square() -> Polygon {
        Polygon::rectangle(Vec2::new(0.0, 0.0), 1.0, 1.0).unwrap()
    }

    #[test]
    fn square_metrics() {
        let p = unit_square();
        assert_eq!(p.area(), 1.0);
        assert_eq!(p.perimeter(), 4.0);
        assert!((p.inradius() - 0.5).abs() < 1e-15);
        assert!((p.incenter() - Vec2::new(0.5, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn rectangle_incenter_tie_breaks_lexicographically() {
        let p = Polygon::rectangle(Vec2::new(0.0, 0.0), 2.0, 1.0).unwrap();
        assert!((p.inradius() - 0.5).abs() < 1e-15);
        assert!((p.incenter() - Vec2::new(0.5, 0.5)).norm() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        let cw = vec![Vec2::new(0.0, 0.0), Vec2::new(0.0, 1.0), Vec2::new(1.0, 0.0)];
        assert!(matches!(Polygon::new(cw), Err(Error::NonConvex { .. })));
        let collinear = vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(2.0, 0.0),
            Vec2::new(1.0, 1.0),
        ];
        assert!(matches!(Polygon::new(collinear), Err(Error::NonConvex { index: 1 })));
        let rep = vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(0.0, 1.0)];
        assert!(matches!(Polygon::new(rep), Err(Error::Degenerate(_))));
        assert!(Polygon::new(vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0)]).is_err());
    }

    #[test]
    fn pentagram_is_not_convex() {
        let star: Vec<Vec2> = (0..5)
            .map(|k| {
                let a = 2.0 * PI * (2 * k) as f64 / 5.0;
                Vec2::new(a.cos(), a.sin())
            })
            .collect();
        assert!(matches!(Polygon::new(star), Err(Error::NonConvex { .. })));
    }

    #[test]
    fn disk_clipping_at_corner_edge_and_interior() {
        let p = unit_square();
        let quarter = PI * 0.0625;
        assert!((p.disk_intersection_area(Vec2::new(0.5, 0.5), 0.25) - quarter).abs() < 1e-15);
        assert!((p.disk_intersection_area(Vec2::new(0.0, 0.0), 0.25) - quarter / 4.0).abs() < 1e-15);
        assert!((p.disk_intersection_area(Vec2::new(0.5, 0.0), 0.25) - quarter / 2.0).abs() < 1e-15);
        assert!((p.disk_intersection_area(Vec2::new(0.5, 0.5), 10.0) - 1.0).abs() < 1e-13);
        assert_eq!(p.disk_intersection_area(Vec2::new(3.0, 3.0), 0.5), 0.0);
    }

    #[test]
    fn hull_drops_interior_and_collinear_points() {
        let pts = [
            Vec2::new(0.0, 0.0),
            Vec2::new(1.0, 0.0),
            Vec2::new(0.5, 0.0),
            Vec2::new(1.0, 1.0),
            Vec2::new(0.0, 1.0),
            Vec2::new(0.5, 0.5),
        ];
        let h = convex_hull(&pts);
        assert_eq!(h.len(), 4);
        assert!(Polygon::new(h).is_ok());
    }

    #[test]
    fn erosion_of_square() {
        let p = unit_square();
        let q = p.erode(0.25).unwrap();
        assert!((q.area() - 0.25).abs() < 1e-15);
        assert!((q.perimeter() - 2.0).abs() < 1e-15);
        assert!(p.erode(0.5).is_none());
        assert!(p.erode(0.7).is_none());
    }

    #[test]
    fn line_clipping() {
        let p = unit_square();
        let (lo, hi) = clip_line(p.planes(), 0.0, Vec2::new(0.0, 0.5), Vec2::new(1.0, 0.0)).unwrap();
        assert!(lo.abs() < 1e-15 && (hi - 1.0).abs() < 1e-15);
        assert!(clip_line(p.planes(), 0.0, Vec2::new(0.0, 2.0), Vec2::new(1.0, 0.0)).is_none());
    }
}
