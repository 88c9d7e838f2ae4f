//! Exact rational plane geometry for rotation-set hulls: monotone-chain
//! convex hulls, the truncated hulls of the admissible rotation vectors,
//! the extremal-slope functional, accumulation reports, and Hausdorff
//! distance between convex bodies.

use num::{One, Signed, Zero};

use crate::exact::{decimal_string, exact_sqrt, rat_int, sqrt_upper};
use crate::numeric::IrrationalParam;
use crate::{Error, Rat, Result};

/// Exact point in the plane.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct PlanarRational {
    pub x: Rat,
    pub y: Rat,
}

impl PlanarRational {
    pub fn new(x: Rat, y: Rat) -> Self {
        PlanarRational { x, y }
    }

    pub fn origin() -> Self {
        PlanarRational::new(Rat::zero(), Rat::zero())
    }

    /// Squared Euclidean distance, exact.
    pub fn dist_sq(&self, other: &PlanarRational) -> Rat {
        let dx = &self.x - &other.x;
        let dy = &self.y - &other.y;
        &dx * &dx + &dy * &dy
    }
}

/// Cross product (b - a) x (c - a); positive for a counterclockwise turn.
fn cross(a: &PlanarRational, b: &PlanarRational, c: &PlanarRational) -> Rat {
    let abx = &b.x - &a.x;
    let aby = &b.y - &a.y;
    let acx = &c.x - &a.x;
    let acy = &c.y - &a.y;
    abx * acy - aby * acx
}

/// Convex polygon with strictly convex counterclockwise vertex list.
///
/// The first vertex is the lexicographic minimum; collinear interior points
/// are removed, so "vertex" always means strict extremal point. One- and
/// two-vertex hulls are flagged degenerate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HullPolygon {
    pub vertices: Vec<PlanarRational>,
    /// Optional (m, n) generator label per vertex.
    pub generator_tags: Vec<Option<(i64, i64)>>,
    pub degenerate: bool,
}

/// Exact convex hull of a point set (monotone chain).
pub fn convex_hull(points: &[PlanarRational]) -> Result<HullPolygon> {
    let tagged: Vec<(PlanarRational, Option<(i64, i64)>)> =
        points.iter().cloned().map(|p| (p, None)).collect();
    convex_hull_tagged(&tagged)
}

/// Convex hull keeping a generator tag per surviving vertex.
pub fn convex_hull_tagged(points: &[(PlanarRational, Option<(i64, i64)>)]) -> Result<HullPolygon> {
    if points.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    let mut sorted: Vec<PlanarRational> = points.iter().map(|(p, _)| p.clone()).collect();
    sorted.sort();
    sorted.dedup();

    let lookup_tag = |v: &PlanarRational| -> Option<(i64, i64)> {
        points.iter().find(|(p, _)| p == v).and_then(|(_, t)| *t)
    };

    if sorted.len() == 1 {
        let tag = lookup_tag(&sorted[0]);
        return Ok(HullPolygon { vertices: sorted, generator_tags: vec![tag], degenerate: true });
    }

    let mut lower: Vec<PlanarRational> = Vec::new();
    for p in sorted.iter() {
        while lower.len() >= 2
            && !cross(&lower[lower.len() - 2], &lower[lower.len() - 1], p).is_positive()
        {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<PlanarRational> = Vec::new();
    for p in sorted.iter().rev() {
        while upper.len() >= 2
            && !cross(&upper[upper.len() - 2], &upper[upper.len() - 1], p).is_positive()
        {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    let mut vertices = lower;
    vertices.extend(upper);
    let degenerate = vertices.len() < 3;
    if degenerate {
        // collinear input: keep the two extreme points
        vertices = vec![sorted[0].clone(), sorted[sorted.len() - 1].clone()];
    }
    let generator_tags = vertices.iter().map(lookup_tag).collect();
    Ok(HullPolygon { vertices, generator_tags, degenerate })
}

impl HullPolygon {
    /// Boundary-inclusive membership test, exact.
    pub fn contains_point(&self, p: &PlanarRational) -> bool {
        match self.vertices.len() {
            0 => false,
            1 => &self.vertices[0] == p,
            2 => on_segment(&self.vertices[0], &self.vertices[1], p),
            n => {
                for i in 0..n {
                    let a = &self.vertices[i];
                    let b = &self.vertices[(i + 1) % n];
                    if cross(a, b, p).is_negative() {
                        return false;
                    }
                }
                true
            }
        }
    }

    /// True iff every vertex of `other` lies in `self` (containment of convex bodies).
    pub fn contains_polygon(&self, other: &HullPolygon) -> bool {
        other.vertices.iter().all(|v| self.contains_point(v))
    }

    /// Exact squared Euclidean distance from a point to the convex body.
    pub fn dist_sq_to_point(&self, p: &PlanarRational) -> Rat {
        if self.contains_point(p) {
            return Rat::zero();
        }
        match self.vertices.len() {
            1 => self.vertices[0].dist_sq(p),
            2 => segment_dist_sq(&self.vertices[0], &self.vertices[1], p),
            n => {
                let mut best: Option<Rat> = None;
                for i in 0..n {
                    let d = segment_dist_sq(&self.vertices[i], &self.vertices[(i + 1) % n], p);
                    best = Some(match best {
                        Some(b) if b <= d => b,
                        _ => d,
                    });
                }
                best.unwrap()
            }
        }
    }

    /// CSV table: one vertex per row with exact and decimal columns.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,n,x_num,x_den,y_num,y_den,x_dec,y_dec\n");
        for (v, tag) in self.vertices.iter().zip(&self.generator_tags) {
            let (m, n) = match tag {
                Some((m, n)) => (m.to_string(), n.to_string()),
                None => (String::new(), String::new()),
            };
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                m,
                n,
                v.x.numer(),
                v.x.denom(),
                v.y.numer(),
                v.y.denom(),
                decimal_string(&v.x, 12),
                decimal_string(&v.y, 12),
            ));
        }
        out
    }

    /// Schematic SVG: unit-square viewport, filled polygon, generator dots,
    /// and emphasized markers for `marked` points.
    pub fn to_svg(&self, generators: &[PlanarRational], marked: &[PlanarRational]) -> String {
        let sx = |r: &Rat| decimal_string(&(r * rat_int(1000)), 3);
        let sy = |r: &Rat| decimal_string(&((Rat::one() - r) * rat_int(1000)), 3);
        let mut svg = String::new();
        svg.push_str("<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 1000 1000\">\n");
        svg.push_str("<rect x=\"0\" y=\"0\" width=\"1000\" height=\"1000\" fill=\"white\"/>\n");
        let pts: Vec<String> =
            self.vertices.iter().map(|v| format!("{},{}", sx(&v.x), sy(&v.y))).collect();
        svg.push_str(&format!(
            "<polygon points=\"{}\" fill=\"#c8d8f0\" stroke=\"#204080\" stroke-width=\"1.5\"/>\n",
            pts.join(" ")
        ));
        for g in generators {
            svg.push_str(&format!(
                "<circle cx=\"{}\" cy=\"{}\" r=\"2.5\" fill=\"#204080\"/>\n",
                sx(&g.x),
                sy(&g.y)
            ));
        }
        for m in marked {
            svg.push_str(&format!(
                "<circle cx=\"{}\" cy=\"{}\" r=\"6\" fill=\"none\" stroke=\"#c02020\" stroke-width=\"2\"/>\n",
                sx(&m.x),
                sy(&m.y)
            ));
        }
        svg.push_str("</svg>\n");
        svg
    }
}

fn on_segment(a: &PlanarRational, b: &PlanarRational, p: &PlanarRational) -> bool {
    if !cross(a, b, p).is_zero() {
        return false;
    }
    let within = |lo: &Rat, hi: &Rat, v: &Rat| {
        let (lo, hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
        lo <= v && v <= hi
    };
    within(&a.x, &b.x, &p.x) && within(&a.y, &b.y, &p.y)
}

/// Exact squared distance from `p` to the segment `[a, b]`.
fn segment_dist_sq(a: &PlanarRational, b: &PlanarRational, p: &PlanarRational) -> Rat {
    let abx = &b.x - &a.x;
    let aby = &b.y - &a.y;
    let len_sq = &abx * &abx + &aby * &aby;
    if len_sq.is_zero() {
        return a.dist_sq(p);
    }
    let apx = &p.x - &a.x;
    let apy = &p.y - &a.y;
    let t = (&apx * &abx + &apy * &aby) / &len_sq;
    let t = if t < Rat::zero() {
        Rat::zero()
    } else if t > Rat::one() {
        Rat::one()
    } else {
        t
    };
    let qx = &a.x + &abx * &t;
    let qy = &a.y + &aby * &t;
    let dx = &p.x - qx;
    let dy = &p.y - qy;
    &dx * &dx + &dy * &dy
}

/// Generators of the truncated rotation-vector hull: all admissible
/// `rho_{m,n}` with `m, n <= n_trunc`, tagged by their index pair.
fn admissible_generators(
    param: &IrrationalParam,
    n_trunc: i64,
) -> Result<Vec<(PlanarRational, Option<(i64, i64)>)>> {
    let mut pts = Vec::new();
    for m in 1..=n_trunc {
        for n in 1..=n_trunc {
            if param.is_admissible(m, n)? {
                pts.push((param.rho_vec(m, n)?, Some((m, n))));
            }
        }
    }
    Ok(pts)
}

/// The two limit points `(0, p/q)` and `(p/q, 0)` adjoined under the closure flag.
pub fn closure_points(param: &IrrationalParam) -> [PlanarRational; 2] {
    let rho = param.value();
    [
        PlanarRational::new(Rat::zero(), rho.clone()),
        PlanarRational::new(rho, Rat::zero()),
    ]
}

/// Truncated hull of the admissible rotation vectors (the interacting-orbit set).
pub fn omega_set(param: &IrrationalParam, n_trunc: i64, closure: bool) -> Result<HullPolygon> {
    let mut pts = admissible_generators(param, n_trunc)?;
    if closure {
        for p in closure_points(param) {
            pts.push((p, None));
        }
    }
    if pts.is_empty() {
        return Err(Error::EmptyPointSet);
    }
    convex_hull_tagged(&pts)
}

/// Truncated hull with the origin adjoined; `(0,0)` is always a vertex.
pub fn lambda_set(param: &IrrationalParam, n_trunc: i64, closure: bool) -> Result<HullPolygon> {
    let mut pts = admissible_generators(param, n_trunc)?;
    pts.push((PlanarRational::origin(), None));
    if closure {
        for p in closure_points(param) {
            pts.push((p, None));
        }
    }
    convex_hull_tagged(&pts)
}

/// Slope of the line through `rho_{m,n}` and `(0, p/q)`:
/// `-1 + (alpha_m + alpha_n - rho) / (m*rho + alpha_m)`, exact in the convergent.
pub fn gamma_slope(param: &IrrationalParam, m: i64, n: i64) -> Result<Rat> {
    if !param.is_admissible(m, n)? {
        return Err(Error::NotAdmissible { m, n });
    }
    let rho = param.value();
    let am = param.alpha(m)?.value;
    let an = param.alpha(n)?.value;
    let num = &am + &an - &rho;
    let den = rat_int(m) * &rho + &am;
    Ok(num / den - Rat::one())
}

/// Classification of the truncated-hull vertices against the two
/// accumulation points, with `(0,0)` excluded.
#[derive(Debug, Clone)]
pub struct AccumulationReport {
    pub near_0rho: usize,
    pub near_rho0: usize,
    pub elsewhere: Vec<PlanarRational>,
}

/// Classify every vertex of `lambda_set(param, n_trunc)` (no closure) other
/// than the origin by distance to `(0, p/q)` and `(p/q, 0)`.
pub fn accumulation_report(
    param: &IrrationalParam,
    n_trunc: i64,
    radius: &Rat,
) -> Result<AccumulationReport> {
    if !radius.is_positive() || *radius >= param.value() / rat_int(2) {
        return Err(Error::InvalidParameter(format!(
            "radius must lie in (0, rho/2), got {radius}"
        )));
    }
    let hull = lambda_set(param, n_trunc, false)?;
    let [c_0rho, c_rho0] = closure_points(param);
    let r_sq = radius * radius;
    let origin = PlanarRational::origin();
    let mut report = AccumulationReport { near_0rho: 0, near_rho0: 0, elsewhere: Vec::new() };
    for v in &hull.vertices {
        if *v == origin {
            continue;
        }
        if v.dist_sq(&c_0rho) <= r_sq {
            report.near_0rho += 1;
        } else if v.dist_sq(&c_rho0) <= r_sq {
            report.near_rho0 += 1;
        } else {
            report.elsewhere.push(v.clone());
        }
    }
    Ok(report)
}

/// Hausdorff distance between two convex bodies, as an exact value when the
/// squared distance is a perfect square and otherwise as a certified upper
/// bound within `2^-40` of the true value.
pub fn hausdorff(a: &HullPolygon, b: &HullPolygon) -> Result<Rat> {
    if a.degenerate != b.degenerate {
        return Err(Error::MixedDegeneracy);
    }
    let mut worst_sq = Rat::zero();
    for v in &a.vertices {
        let d = b.dist_sq_to_point(v);
        if d > worst_sq {
            worst_sq = d;
        }
    }
    for v in &b.vertices {
        let d = a.dist_sq_to_point(v);
        if d > worst_sq {
            worst_sq = d;
        }
    }
    if let Some(exact) = exact_sqrt(&worst_sq) {
        return Ok(exact);
    }
    Ok(sqrt_upper(&worst_sq, 40))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::numeric::golden;

    fn pt(xn: i64, xd: i64, yn: i64, yd: i64) -> PlanarRational {
        PlanarRational::new(rat(xn, xd), rat(yn, yd))
    }

    #[test]
    fn hull_removes_interior_and_collinear_points() {
        let pts = vec![pt(0, 1, 0, 1), pt(1, 1, 0, 1), pt(0, 1, 1, 1), pt(1, 4, 1, 4)];
        let hull = convex_hull(&pts).unwrap();
        assert!(!hull.degenerate);
        assert_eq!(hull.vertices, vec![pt(0, 1, 0, 1), pt(1, 1, 0, 1), pt(0, 1, 1, 1)]);

        let single = convex_hull(&[pt(0, 1, 0, 1)]).unwrap();
        assert!(single.degenerate);
        assert_eq!(single.vertices.len(), 1);

        let collinear = vec![pt(0, 1, 0, 1), pt(1, 2, 1, 2), pt(1, 1, 1, 1)];
        let seg = convex_hull(&collinear).unwrap();
        assert!(seg.degenerate);
        assert_eq!(seg.vertices, vec![pt(0, 1, 0, 1), pt(1, 1, 1, 1)]);
    }

    #[test]
    fn hull_starts_at_lexicographic_min_and_is_ccw() {
        let pts = vec![pt(1, 1, 1, 1), pt(0, 1, 0, 1), pt(1, 1, 0, 1), pt(0, 1, 1, 1)];
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(hull.vertices[0], pt(0, 1, 0, 1));
        // counterclockwise square
        assert_eq!(
            hull.vertices,
            vec![pt(0, 1, 0, 1), pt(1, 1, 0, 1), pt(1, 1, 1, 1), pt(0, 1, 1, 1)]
        );
    }

    #[test]
    fn hull_idempotent_on_own_vertices() {
        let pts = vec![pt(0, 1, 0, 1), pt(3, 1, 1, 1), pt(2, 1, 3, 1), pt(-1, 1, 2, 1), pt(1, 1, 1, 1)];
        let hull = convex_hull(&pts).unwrap();
        let again = convex_hull(&hull.vertices).unwrap();
        assert_eq!(hull.vertices, again.vertices);
    }

    #[test]
    fn omega_n1_is_single_point() {
        let p = golden(20).unwrap();
        let hull = omega_set(&p, 1, false).unwrap();
        assert!(hull.degenerate);
        assert_eq!(hull.vertices, vec![pt(1, 3, 1, 3)]);
        assert_eq!(hull.generator_tags, vec![Some((1, 1))]);
    }

    #[test]
    fn omega_n4_hull_and_boundary() {
        let p = golden(20).unwrap();
        let hull = omega_set(&p, 4, false).unwrap();
        assert!(!hull.degenerate);
        // pentagon; rho_{1,1} = (1/3,1/3) sits mid-edge on the segment from
        // rho_{1,4} = (1/6,1/2) to rho_{4,1} = (1/2,1/6) (all three satisfy
        // x+y = 2/3), so it is on the boundary but not a strict vertex
        assert_eq!(
            hull.vertices,
            vec![pt(1, 6, 1, 2), pt(1, 5, 2, 5), pt(2, 7, 2, 7), pt(2, 5, 1, 5), pt(1, 2, 1, 6)]
        );
        assert!(hull.contains_point(&pt(1, 3, 1, 3)));
        assert!(!hull.vertices.contains(&pt(1, 3, 1, 3)));
        // swap symmetry of the generator set
        for v in &hull.vertices {
            let swapped = PlanarRational::new(v.y.clone(), v.x.clone());
            assert!(hull.vertices.contains(&swapped));
        }
    }

    #[test]
    fn lambda_contains_origin_as_vertex() {
        let p = golden(20).unwrap();
        for n in [1, 4, 10, 50] {
            let hull = lambda_set(&p, n, false).unwrap();
            assert_eq!(hull.vertices[0], PlanarRational::origin());
        }
        let seg = lambda_set(&p, 1, false).unwrap();
        assert!(seg.degenerate);
        assert_eq!(seg.vertices, vec![PlanarRational::origin(), pt(1, 3, 1, 3)]);
    }

    #[test]
    fn lambda_vertex_count_grows() {
        let p = golden(20).unwrap();
        let v50 = lambda_set(&p, 50, false).unwrap().vertices.len();
        let v200 = lambda_set(&p, 200, false).unwrap().vertices.len();
        assert!(v50 > 8, "N=50 vertex count {v50}");
        assert!(v200 > v50);
    }

    #[test]
    fn lambda_monotone_in_truncation() {
        let p = golden(20).unwrap();
        for n in 2..=12 {
            let inner = lambda_set(&p, n, false).unwrap();
            let outer = lambda_set(&p, n + 1, false).unwrap();
            assert!(outer.contains_polygon(&inner), "containment at N={n}");
        }
    }

    #[test]
    fn gamma_slope_examples() {
        let p = golden(20).unwrap();
        let rho = p.value();
        // gamma_{1,1} = 1 - 3*rho
        let g11 = gamma_slope(&p, 1, 1).unwrap();
        assert_eq!(g11, Rat::one() - rat_int(3) * &rho);
        // matches the slope through rho_{m,n} and (0, p/q), exactly
        for (m, n) in [(1i64, 1i64), (3, 3), (1, 3), (4, 9)] {
            let g = gamma_slope(&p, m, n).unwrap();
            let v = p.rho_vec(m, n).unwrap();
            let slope = (&v.y - &rho) / &v.x;
            assert_eq!(g, slope, "slope mismatch at ({m},{n})");
        }
        // gamma_{3,3}: line through (2/7,2/7) and (0,rho), roughly -1.163
        let g33 = gamma_slope(&p, 3, 3).unwrap();
        assert!((g33 + rat(1163, 1000)).abs() < rat(1, 100));
        assert!(matches!(gamma_slope(&p, 2, 5), Err(Error::NotAdmissible { .. })));
    }

    #[test]
    fn gamma_slope_denominator_monotonicity_bound() {
        let p = golden(20).unwrap();
        let rho = p.value();
        for m in 1..=20 {
            for n in 1..=20 {
                if p.is_admissible(m, n).unwrap() {
                    let g = gamma_slope(&p, m, n).unwrap();
                    let am = p.alpha(m).unwrap().value;
                    let an = p.alpha(n).unwrap().value;
                    let lower = (&am + &an - &rho) / (rat_int(m) * &rho) - Rat::one();
                    if (&am + &an - &rho).is_positive() {
                        assert!(g <= lower);
                    } else {
                        assert!(g >= lower);
                    }
                }
            }
        }
    }

    #[test]
    fn accumulation_stabilizes() {
        let p = golden(20).unwrap();
        let radius = rat(1, 20);
        let r100 = accumulation_report(&p, 100, &radius).unwrap();
        let r200 = accumulation_report(&p, 200, &radius).unwrap();
        assert_eq!(r100.elsewhere, r200.elsewhere);
        assert_eq!(r200.near_0rho, r200.near_rho0);
        assert!(!r200.elsewhere.is_empty());
        // every vertex hugging the y-axis lies in the (0,rho) ball
        let [c_0rho, _] = closure_points(&p);
        let hull = lambda_set(&p, 200, false).unwrap();
        let r_sq = &radius * &radius;
        for v in &hull.vertices {
            if v.x < rat(1, 50) && *v != PlanarRational::origin() {
                assert!(v.dist_sq(&c_0rho) <= r_sq, "vertex {:?}", v);
            }
        }
    }

    #[test]
    fn accumulation_radius_validation() {
        let p = golden(20).unwrap();
        assert!(accumulation_report(&p, 10, &rat(1, 2)).is_err());
        assert!(accumulation_report(&p, 10, &rat(0, 1)).is_err());
    }

    #[test]
    fn antidiagonal_and_max_sum_properties() {
        let p = golden(20).unwrap();
        let rho = p.value();
        // max of x+y over admissible generators is 2/3, attained at (1,1)
        let mut max_sum = Rat::zero();
        for m in 1..=20 {
            for n in 1..=20 {
                if p.is_admissible(m, n).unwrap() {
                    let v = p.rho_vec(m, n).unwrap();
                    let s = &v.x + &v.y;
                    if s > max_sum {
                        max_sum = s;
                    }
                }
            }
        }
        assert_eq!(max_sum, rat(2, 3));
        let v11 = p.rho_vec(1, 1).unwrap();
        assert_eq!(&v11.x + &v11.y, rat(2, 3));
        // generators with m+n >= 100 hug the anti-diagonal x+y = rho
        for m in 1..=120i64 {
            for n in 1..=120i64 {
                if m + n >= 100 && m + n <= 140 && p.is_admissible(m, n).unwrap() {
                    let v = p.rho_vec(m, n).unwrap();
                    assert!((&v.x + &v.y - &rho).abs() < rat(1, 25), "({m},{n})");
                }
            }
        }
    }

    #[test]
    fn hausdorff_examples() {
        let square = convex_hull(&[pt(0, 1, 0, 1), pt(1, 1, 0, 1), pt(1, 1, 1, 1), pt(0, 1, 1, 1)]).unwrap();
        assert_eq!(hausdorff(&square, &square).unwrap(), Rat::zero());

        let shifted = convex_hull(&[pt(1, 10, 0, 1), pt(11, 10, 0, 1), pt(11, 10, 1, 1), pt(1, 10, 1, 1)]).unwrap();
        assert_eq!(hausdorff(&square, &shifted).unwrap(), rat(1, 10));

        let tri = convex_hull(&[pt(0, 1, 0, 1), pt(1, 1, 0, 1), pt(0, 1, 1, 1)]).unwrap();
        let quad = convex_hull(&[pt(0, 1, 0, 1), pt(1, 1, 0, 1), pt(0, 1, 1, 1), pt(1, 1, 1, 1)]).unwrap();
        let d = hausdorff(&tri, &quad).unwrap();
        // true distance is sqrt(2)/2; certified upper bound within 2^-40
        let d_sq_over = &d * &d;
        assert!(d_sq_over >= rat(1, 2));
        assert!(&d - rat(707106781, 1_000_000_000) < rat(1, 1_000_000));

        let point_hull = convex_hull(&[pt(0, 1, 0, 1)]).unwrap();
        assert!(matches!(hausdorff(&square, &point_hull), Err(Error::MixedDegeneracy)));
    }

    #[test]
    fn csv_and_svg_are_structured() {
        let p = golden(20).unwrap();
        let hull = lambda_set(&p, 4, false).unwrap();
        let csv = hull.to_csv();
        assert!(csv.starts_with("m,n,x_num,x_den,y_num,y_den,x_dec,y_dec\n"));
        assert_eq!(csv.lines().count(), hull.vertices.len() + 1);
        let svg = hull.to_svg(&hull.vertices, &closure_points(&p));
        assert_eq!(svg.matches("<circle").count(), hull.vertices.len() + 2);
        assert!(svg.contains("<polygon"));
    }
}
