//! Dynamics on the bouquet of two circles.
//!
//! The map is the composition of two half-steps: the horizontal half-step
//! rotates the horizontal circle by the quotient map and folds the plateau
//! arc of the vertical circle into the horizontal one; the vertical
//! half-step does the same with the roles swapped. Lifts act on the grid of
//! horizontal and vertical lattice lines in the plane, with exact integer
//! displacement bookkeeping.
//!
//! The first-return arcs are certified through the fold algebra: their
//! defining chain lives in a quadratic extension of the rationals, so
//! endpoint images are verified exactly, while the arcs themselves are
//! reported as certified rational enclosures.

use num::{BigInt, One, Signed, Zero};
use serde_json::json;

use crate::circlemap::{DenjoyModel, Fold};
use crate::exact::{frac, rat, rat_int, ratio_string, snap_down, QuadVal, RatInterval};
use crate::geometry::PlanarRational;
use crate::{Error, Rat, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    H,
    V,
}

impl Axis {
    pub fn other(self) -> Axis {
        match self {
            Axis::H => Axis::V,
            Axis::V => Axis::H,
        }
    }
}

/// Point on the bouquet: an axis and a circle coordinate in `[0,1)`.
/// The common point of the two circles is stored on the horizontal axis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkeletonPoint {
    pub axis: Axis,
    pub coord: Rat,
}

impl SkeletonPoint {
    pub fn new(axis: Axis, coord: Rat) -> Self {
        let coord = frac(&coord);
        if coord.is_zero() {
            return SkeletonPoint { axis: Axis::H, coord };
        }
        SkeletonPoint { axis, coord }
    }

    pub fn origin() -> Self {
        SkeletonPoint { axis: Axis::H, coord: Rat::zero() }
    }
}

/// Lift of a skeleton point to the plane, with the lattice cell recorded.
///
/// A horizontal point sits at `(tx + coord, ty)`, a vertical one at
/// `(tx, ty + coord)`; displacement accounting is exact.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedSkeletonPoint {
    pub base: SkeletonPoint,
    pub translate: (BigInt, BigInt),
}

impl LiftedSkeletonPoint {
    pub fn from_base(base: SkeletonPoint) -> Self {
        LiftedSkeletonPoint { base, translate: (BigInt::zero(), BigInt::zero()) }
    }

    /// Absolute position in the plane.
    pub fn position(&self) -> (Rat, Rat) {
        let tx = Rat::from_integer(self.translate.0.clone());
        let ty = Rat::from_integer(self.translate.1.clone());
        match self.base.axis {
            Axis::H => (tx + &self.base.coord, ty),
            Axis::V => (tx, ty + &self.base.coord),
        }
    }

    pub fn translated(&self, dx: i64, dy: i64) -> Self {
        let mut t = self.clone();
        t.translate.0 += BigInt::from(dx);
        t.translate.1 += BigInt::from(dy);
        t
    }
}

/// Centered representative `u in [-1/2, 1/2)` of a coordinate, with the
/// lattice line it is attached to.
fn centered(coord: &Rat, line: &BigInt) -> (Rat, BigInt) {
    if *coord < rat(1, 2) {
        (coord.clone(), line.clone())
    } else {
        (coord - Rat::one(), line + BigInt::one())
    }
}

/// The odd collapse lift on a cell, `u -> sign(u) * (|u| - w) / (1 - 2w)`.
fn collapse_cell(u: &Rat, w: &Rat) -> Rat {
    let denom = Rat::one() - rat_int(2) * w;
    if u.is_negative() {
        -((-u.clone() - w) / &denom)
    } else {
        (u - w) / &denom
    }
}

/// One half-step of the lifted dynamics. `sigma` selects which transformation
/// acts; it rotates its own circle, folds the plateau arc of the other circle
/// into it, and collapses the rest of the other circle.
/// Returns the image and whether the fold branch fired.
pub fn lifted_half_step(
    model: &DenjoyModel,
    sigma: Axis,
    pt: &LiftedSkeletonPoint,
) -> (LiftedSkeletonPoint, bool) {
    let w = &model.i_halfwidth;
    let fold = model.fold();
    let psi = &model.psi;
    let (tx, ty) = (&pt.translate.0, &pt.translate.1);
    if pt.base.axis == sigma {
        // rotate along the own circle by the quotient homeomorphism
        let v = psi.apply_lift(&pt.base.coord);
        let k = v.floor().to_integer();
        let coordp = &v - Rat::from_integer(k.clone());
        let (ntx, nty) = match sigma {
            Axis::H => (tx + k, ty.clone()),
            Axis::V => (tx.clone(), ty + k),
        };
        (
            LiftedSkeletonPoint { base: SkeletonPoint::new(sigma, coordp), translate: (ntx, nty) },
            false,
        )
    } else {
        // the point lives on the other circle
        let (u, line) = match sigma {
            Axis::H => centered(&pt.base.coord, ty),
            Axis::V => centered(&pt.base.coord, tx),
        };
        if u.abs() <= *w {
            // fold the plateau arc onto [0, tau] of the sigma circle
            let v = fold.eval(&u);
            let lifted = match sigma {
                Axis::H => LiftedSkeletonPoint {
                    base: SkeletonPoint::new(Axis::H, v),
                    translate: (tx.clone(), line),
                },
                Axis::V => LiftedSkeletonPoint {
                    base: SkeletonPoint::new(Axis::V, v),
                    translate: (line, ty.clone()),
                },
            };
            (lifted, true)
        } else {
            // collapse toward the lattice line, fixing half-integers
            let up = collapse_cell(&u, w);
            let (coordp, linep) =
                if up.is_negative() { (up + Rat::one(), &line - BigInt::one()) } else { (up, line) };
            let lifted = match sigma {
                Axis::H => LiftedSkeletonPoint {
                    base: SkeletonPoint::new(Axis::V, coordp),
                    translate: (tx.clone(), linep),
                },
                Axis::V => LiftedSkeletonPoint {
                    base: SkeletonPoint::new(Axis::H, coordp),
                    translate: (linep, ty.clone()),
                },
            };
            (lifted, false)
        }
    }
}

/// Unlifted half-step on the bouquet.
pub fn f_sigma(model: &DenjoyModel, sigma: Axis, pt: &SkeletonPoint) -> SkeletonPoint {
    let (img, _) = lifted_half_step(model, sigma, &LiftedSkeletonPoint::from_base(pt.clone()));
    img.base
}

/// One full lifted step: vertical half-step after horizontal half-step.
pub fn lifted_step(model: &DenjoyModel, pt: &LiftedSkeletonPoint) -> LiftedSkeletonPoint {
    let (half, _) = lifted_half_step(model, Axis::H, pt);
    let (full, _) = lifted_half_step(model, Axis::V, &half);
    full
}

/// One full step on the bouquet.
pub fn f_apply(model: &DenjoyModel, pt: &SkeletonPoint) -> SkeletonPoint {
    lifted_step(model, &LiftedSkeletonPoint::from_base(pt.clone())).base
}

/// Exact `k`-fold iterate of the full lifted step (no snapping).
pub fn apply_full_steps(
    model: &DenjoyModel,
    pt: &LiftedSkeletonPoint,
    k: i64,
) -> LiftedSkeletonPoint {
    let mut cur = pt.clone();
    for _ in 0..k {
        cur = lifted_step(model, &cur);
    }
    cur
}

/// Transport a point through the semiconjugacy, axis preserved.
/// Every point of either plateau arc lands on the common point.
pub fn h_transport(model: &DenjoyModel, pt: &SkeletonPoint) -> Result<SkeletonPoint> {
    let v = model.semiconj_h(&pt.coord)?;
    Ok(SkeletonPoint::new(pt.axis, v))
}

/// Transported absolute position of a lifted point under the lift of the
/// semiconjugacy transport fixing the origin.
pub fn h_transport_position(model: &DenjoyModel, pt: &LiftedSkeletonPoint) -> Result<(Rat, Rat)> {
    model.semiconj_h(&pt.base.coord)?; // window check
    let hv = model.semiconj.h.apply_lift(&pt.base.coord);
    let tx = Rat::from_integer(pt.translate.0.clone());
    let ty = Rat::from_integer(pt.translate.1.clone());
    Ok(match pt.base.axis {
        Axis::H => (tx + hv, ty),
        Axis::V => (tx, ty + hv),
    })
}

/// A start point whose orbit provably never folds.
///
/// Vertical starts sit at the gap-free preimage of a half-cell angle: their
/// integer-time coordinates follow the circle map along a coset that keeps a
/// quarter grid cell away from every pre-gap. Horizontal starts pull such a
/// point back once through the quotient homeomorphism, so that the half-time
/// chain (where the fold test happens on the horizontal circle) rides the
/// certified coset.
pub fn free_start(model: &DenjoyModel, axis: Axis, near: &Rat) -> Result<SkeletonPoint> {
    let angle = model.certified_free_angle(near);
    let base = model.h_preimage(&angle)?;
    match axis {
        Axis::V => Ok(SkeletonPoint::new(Axis::V, base)),
        Axis::H => {
            let x = model.psi.invert_lift_point(&base)?;
            Ok(SkeletonPoint::new(Axis::H, frac(&x)))
        }
    }
}

/// Sup deviation of the integer-time transport from the identity, taken over
/// both axes.
///
/// On the vertical circle the plain semiconjugacy telescopes exactly at
/// integer times; on the horizontal circle the adapted transport
/// `h . psi - rho` does. The free-orbit displacement bound `2B/n` holds with
/// `B` the larger of the two sup deviations.
pub fn adapted_transport_bound(model: &DenjoyModel) -> Result<Rat> {
    let b_v = model.semiconj.sup_deviation.clone();
    let rho = model.param.value();
    let minus_rho = crate::circlemap::PiecewiseCircleMap::rotation(&(-rho));
    let h_psi = model.semiconj.h.compose(&model.psi)?;
    let h2 = minus_rho.compose(&h_psi)?;
    let mut b_h = Rat::zero();
    for bp in &h2.breakpoints {
        let d = (h2.apply_lift(bp) - bp).abs();
        if d > b_h {
            b_h = d;
        }
    }
    Ok(if b_h > b_v { b_h } else { b_v })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitKind {
    FreeH,
    FreeV,
    Interacting,
}

/// Orbit bookkeeping per the half-step diagrams: fold events split the
/// orbit into first-return segments labelled by their step pair.
#[derive(Debug, Clone)]
pub struct OrbitClassification {
    pub kind: OrbitKind,
    pub segments: Vec<(i64, i64)>,
    pub horizon_used: i64,
}

/// Classify an orbit over `horizon` full steps (window-limited).
///
/// A fold from the vertical plateau opens a segment; the next fold from the
/// horizontal plateau fixes its first index, and the following vertical fold
/// closes it. Transitions must alternate between the two plateaus.
pub fn classify_orbit(
    model: &DenjoyModel,
    pt: &SkeletonPoint,
    horizon: i64,
) -> Result<OrbitClassification> {
    if horizon >= model.gap_budget {
        return Err(Error::WindowExceeded { requested: horizon, window: model.gap_budget - 1 });
    }
    let mut cur = LiftedSkeletonPoint::from_base(pt.clone());
    // events: (full-step time, which plateau folded)
    let mut events: Vec<(i64, Axis)> = Vec::new();
    for t in 0..horizon {
        let (half, folded_v) = lifted_half_step(model, Axis::H, &cur);
        if folded_v {
            events.push((t, Axis::V));
            if let Err(e @ Error::OutsideWindow(_)) = model.semiconj_h(&half.base.coord) {
                return Err(e);
            }
        }
        let (full, folded_h) = lifted_half_step(model, Axis::V, &half);
        if folded_h {
            events.push((t, Axis::H));
            if let Err(e @ Error::OutsideWindow(_)) = model.semiconj_h(&full.base.coord) {
                return Err(e);
            }
        }
        cur = full;
    }
    for w in events.windows(2) {
        if w[0].1 == w[1].1 {
            return Err(Error::Consistency(format!(
                "plateau returns fail to alternate at steps {} and {}",
                w[0].0, w[1].0
            )));
        }
    }
    if events.is_empty() {
        let kind = match pt.axis {
            Axis::H => OrbitKind::FreeH,
            Axis::V => OrbitKind::FreeV,
        };
        return Ok(OrbitClassification { kind, segments: Vec::new(), horizon_used: horizon });
    }
    let mut segments = Vec::new();
    let mut open: Option<(i64, Option<i64>)> = None; // (t0 of V-fold, t1 of H-fold)
    for (t, which) in &events {
        match which {
            Axis::V => {
                if let Some((t0, Some(t1))) = open {
                    segments.push((t1 - t0, t - t1 - 1));
                }
                open = Some((*t, None));
            }
            Axis::H => {
                if let Some((t0, None)) = open {
                    open = Some((t0, Some(*t)));
                }
            }
        }
    }
    Ok(OrbitClassification { kind: OrbitKind::Interacting, segments, horizon_used: horizon })
}

/// Iterate the full step with dyadic snapping of the circle coordinate
/// between steps; exact arithmetic, per-step defect below `2^-grid_log2`.
/// Returns the endpoint and the number of fold events seen.
pub fn iterate_snapped(
    model: &DenjoyModel,
    pt: &LiftedSkeletonPoint,
    steps: i64,
    grid_log2: u32,
) -> (LiftedSkeletonPoint, u64) {
    let mut cur = pt.clone();
    let mut folds = 0u64;
    for _ in 0..steps {
        let (half, f1) = lifted_half_step(model, Axis::H, &cur);
        let (full, f2) = lifted_half_step(model, Axis::V, &half);
        folds += f1 as u64 + f2 as u64;
        cur = full;
        cur.base.coord = snap_down(&cur.base.coord, grid_log2);
    }
    (cur, folds)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// One branch of a first-return arc on the vertical plateau.
#[derive(Debug, Clone)]
pub struct MarkovArc {
    pub m: i64,
    pub n: i64,
    /// 1..=4, ordered left to right inside the plateau arc.
    pub branch: u8,
    /// Certified rational enclosure in centered coordinates on the vertical circle.
    pub arc: RatInterval,
    /// Exact fold-image arc inside the m-th backward arc (quadratic-extension endpoints).
    pub eta_image: (QuadVal, QuadVal),
    /// Which half of the vertical plateau the branch occupies.
    pub v_side: Side,
    /// Which half of the horizontal plateau the mid-orbit visit occupies.
    pub l_side: Side,
}

/// Backward arcs of the plateau under the circle map, normalized into `[0,1)`;
/// arc `j` must lie in the tracked gap of index `-j`.
fn backward_arcs(model: &DenjoyModel, up_to: i64) -> Result<Vec<RatInterval>> {
    let w = &model.i_halfwidth;
    let mut arcs: Vec<RatInterval> = Vec::new();
    let mut cur = RatInterval::new(-w.clone(), w.clone());
    for j in 1..=up_to {
        cur = model.phi.preimage_arc(&cur)?;
        let lo = frac(&cur.lo);
        let len = cur.length();
        if &lo + &len >= Rat::one() {
            return Err(Error::Consistency(format!("backward arc {j} wraps")));
        }
        cur = RatInterval::new(lo.clone(), &lo + &len);
        match model.gap_at(&cur.lo) {
            Some(g) if g == -j => {}
            other => {
                return Err(Error::Consistency(format!(
                    "backward arc {j} lies in gap {:?}, expected {}",
                    other, -j
                )))
            }
        }
        arcs.push(cur.clone());
    }
    Ok(arcs)
}

/// Exact point-inversion of the circle map at a quadratic-extension value.
fn invert_lift_quad(model: &DenjoyModel, y: &QuadVal) -> Result<QuadVal> {
    use crate::circlemap::Piece;
    let phi = &model.phi;
    let c = phi.pieces[0].eval(&Rat::zero());
    // shift into the fundamental value window [c, c+1)
    let enc = y.enclosure(96);
    let off_lo = (&enc.lo - &c).floor().to_integer();
    let off_hi = (&enc.hi - &c).floor().to_integer();
    if off_lo != off_hi {
        return Err(Error::Consistency("fold value too close to a piece boundary".into()));
    }
    let offset = Rat::from_integer(off_lo);
    let yy = y.add_rat(&(-offset.clone()));
    let n = phi.pieces.len();
    for i in 0..n {
        let lo = phi.pieces[i].eval(&phi.breakpoints[i]);
        let hi_x = if i + 1 < n { phi.breakpoints[i + 1].clone() } else { Rat::one() };
        let hi = phi.pieces[i].eval(&hi_x);
        use std::cmp::Ordering::*;
        if yy.cmp_rat(&lo) != Less && yy.cmp_rat(&hi) != Greater {
            if let Piece::Affine { a, b } = &phi.pieces[i] {
                if a.is_zero() {
                    continue;
                }
                let x = yy.add_rat(&-b.clone()).mul_rat(&(Rat::one() / a));
                if x.cmp_rat(&phi.breakpoints[i]) != Less && x.cmp_rat(&hi_x) != Greater {
                    return Ok(x.add_rat(&offset));
                }
            }
        }
    }
    Err(Error::NotInvertible)
}

/// Exact forward lift-iterate of the circle map at a quadratic-extension value.
fn forward_lift_quad(model: &DenjoyModel, x: &QuadVal, steps: i64) -> QuadVal {
    let mut cur = x.clone();
    for _ in 0..steps {
        cur = model.phi.apply_lift_quad(&cur);
    }
    cur
}

fn quad_to_unit(v: &QuadVal) -> QuadVal {
    let enc = v.enclosure(96);
    let lo_f = enc.lo.floor().to_integer();
    let hi_f = enc.hi.floor().to_integer();
    assert_eq!(lo_f, hi_f, "quad value too close to an integer");
    v.add_rat(&-Rat::from_integer(lo_f))
}

/// Certified enclosure of the fold preimage of a quadratic-extension value.
fn fold_preimage_quad_enclosure(fold: &Fold, y: &QuadVal, side: Side) -> RatInterval {
    let y_enc = y.enclosure(96);
    let s_lo = Rat::one() - &y_enc.hi / &fold.tau;
    let s_hi = Rat::one() - &y_enc.lo / &fold.tau;
    let (r_lo, _) = crate::exact::sqrt_enclosure(&s_lo, 80);
    let (_, r_hi) = crate::exact::sqrt_enclosure(&s_hi, 80);
    let lo = &fold.halfwidth * r_lo;
    let hi = &fold.halfwidth * r_hi;
    match side {
        Side::Right => RatInterval::new(lo, hi),
        Side::Left => RatInterval::new(-hi, -lo),
    }
}

/// All first-return branches for the index pair `(m, n)`.
///
/// Empty exactly when the pair is not admissible; otherwise four disjoint
/// branches whose endpoint chain is verified exactly through the fold
/// algebra: fold into the m-th backward arc, transport forward, fold again
/// into the n-th backward arc, and return onto the plateau endpoints.
pub fn markov_arcs(model: &DenjoyModel, m: i64, n: i64) -> Result<Vec<MarkovArc>> {
    if m < 1 || n < 1 || m >= model.gap_budget || n >= model.gap_budget {
        return Err(Error::WindowExceeded { requested: m.max(n), window: model.gap_budget - 1 });
    }
    let fold = model.fold();
    let w = &model.i_halfwidth;
    let tau = &model.tau;
    let arcs = backward_arcs(model, m.max(n))?;
    let a_m = &arcs[(m - 1) as usize];
    let a_n = &arcs[(n - 1) as usize];

    // the fold reaches a backward arc iff the arc sits inside (0, tau);
    // this must agree with admissibility of the index
    let reachable = |a: &RatInterval| a.lo.is_positive() && a.hi < *tau;
    let admissible = model.param.is_admissible(m, n)?;
    if reachable(a_m) != model.param.is_admissible(m, m)?
        || reachable(a_n) != model.param.is_admissible(n, n)?
    {
        return Err(Error::Consistency(format!(
            "fold reachability disagrees with admissibility at ({m},{n})"
        )));
    }
    if !admissible {
        return Ok(Vec::new());
    }

    // mid-orbit arcs on the horizontal plateau: exact fold preimages of A_n
    let l_arcs: Vec<(Side, QuadVal, QuadVal)> = vec![
        // fold is decreasing on the right half, so the order flips
        (Side::Right, fold.preimage_right(&a_n.hi), fold.preimage_right(&a_n.lo)),
        (Side::Left, fold.preimage_left(&a_n.lo), fold.preimage_left(&a_n.hi)),
    ];

    let mut out: Vec<MarkovArc> = Vec::new();
    for (l_side, l_lo, l_hi) in &l_arcs {
        // pull the mid arc back m steps into the m-th backward arc
        let mut b_lo = l_lo.clone();
        let mut b_hi = l_hi.clone();
        for _ in 0..m {
            b_lo = invert_lift_quad(model, &b_lo)?;
            b_hi = invert_lift_quad(model, &b_hi)?;
        }
        let b_lo = quad_to_unit(&b_lo);
        let b_hi = quad_to_unit(&b_hi);
        use std::cmp::Ordering::*;
        let (b_lo, b_hi) = match b_lo.cmp_refine(&b_hi, 512) {
            Some(Greater) => (b_hi, b_lo),
            Some(_) => (b_lo, b_hi),
            None => {
                return Err(Error::Consistency(format!(
                    "fold-arc endpoints do not separate at ({m},{n})"
                )))
            }
        };
        // verify containment in the m-th backward arc exactly
        if b_lo.cmp_rat(&a_m.lo) == Less || b_hi.cmp_rat(&a_m.hi) == Greater {
            return Err(Error::Consistency(format!(
                "fold image leaves the backward arc at ({m},{n})"
            )));
        }
        for v_side in [Side::Right, Side::Left] {
            let (lo_enc, hi_enc) = match v_side {
                Side::Right => (
                    fold_preimage_quad_enclosure(&fold, &b_hi, Side::Right),
                    fold_preimage_quad_enclosure(&fold, &b_lo, Side::Right),
                ),
                Side::Left => (
                    fold_preimage_quad_enclosure(&fold, &b_lo, Side::Left),
                    fold_preimage_quad_enclosure(&fold, &b_hi, Side::Left),
                ),
            };
            let arc = RatInterval::new(lo_enc.lo.clone(), hi_enc.hi.clone());
            if arc.lo < -w.clone() || arc.hi > *w {
                return Err(Error::Consistency("branch enclosure leaves the plateau".into()));
            }
            out.push(MarkovArc {
                m,
                n,
                branch: 0,
                arc,
                eta_image: (b_lo.clone(), b_hi.clone()),
                v_side,
                l_side: *l_side,
            });
        }
    }
    // canonical order: left to right inside the plateau
    out.sort_by(|a, b| a.arc.lo.cmp(&b.arc.lo));
    for (i, arc) in out.iter_mut().enumerate() {
        arc.branch = (i + 1) as u8;
    }
    for pair in out.windows(2) {
        if pair[0].arc.hi >= pair[1].arc.lo {
            return Err(Error::Consistency(format!("branch enclosures overlap at ({m},{n})")));
        }
    }
    for arc in &out {
        verify_markov_chain(model, arc, &arcs)?;
    }
    Ok(out)
}

/// Verify the exact endpoint chain of one branch: fold-image endpoints
/// transport forward onto the horizontal plateau, fold exactly onto an
/// endpoint of the n-th backward arc, and return exactly onto the plateau
/// boundary after n more steps.
fn verify_markov_chain(model: &DenjoyModel, arc: &MarkovArc, arcs: &[RatInterval]) -> Result<()> {
    let fold = model.fold();
    let w = &model.i_halfwidth;
    let a_n = &arcs[(arc.n - 1) as usize];
    let mut boundary_hits = Vec::new();
    for b in [&arc.eta_image.0, &arc.eta_image.1] {
        let mid = quad_to_unit(&forward_lift_quad(model, b, arc.m));
        let mid_centered = if mid.cmp_rat(&rat(1, 2)) == std::cmp::Ordering::Less {
            mid.clone()
        } else {
            mid.add_rat(&-Rat::one())
        };
        let folded = fold.eval_quad(&mid_centered);
        let folded_rat = folded
            .as_rational()
            .ok_or_else(|| Error::Consistency("fold of mid endpoint is not rational".into()))?;
        if folded_rat != a_n.lo && folded_rat != a_n.hi {
            return Err(Error::Consistency(format!(
                "mid endpoint folds to {folded_rat} instead of a backward-arc endpoint"
            )));
        }
        let mut v = folded_rat;
        for _ in 0..arc.n {
            v = model.phi.apply(&v);
        }
        let w_neg = frac(&-w.clone());
        if v != *w && v != w_neg {
            return Err(Error::Consistency(format!(
                "return endpoint {v} misses the plateau boundary"
            )));
        }
        boundary_hits.push(v == *w);
    }
    if boundary_hits[0] == boundary_hits[1] {
        return Err(Error::Consistency("branch endpoints hit the same plateau endpoint".into()));
    }
    Ok(())
}

/// Bisection over the certified enclosure of one branch for a root of `g`.
/// The map is continuous, so bracketing across the enclosure is sound; the
/// result is verified to lie inside the branch through the exact fold test.
fn branch_bisect(
    model: &DenjoyModel,
    arc: &MarkovArc,
    g: &dyn Fn(&Rat) -> Rat,
    tol: &Rat,
) -> Result<Rat> {
    let mut lo = arc.arc.lo.clone();
    let mut hi = arc.arc.hi.clone();
    let mut g_lo = g(&lo);
    let g_hi = g(&hi);
    if g_lo.abs() < *tol {
        return verified(model, arc, lo);
    }
    if g_hi.abs() < *tol {
        return verified(model, arc, hi);
    }
    if g_lo.is_positive() == g_hi.is_positive() {
        // scan for a bracket; the root may hug an endpoint of the enclosure
        let mut found = false;
        for i in 1..64 {
            let x = &lo + (&hi - &lo) * rat(i, 64);
            let gx = g(&x);
            if gx.is_positive() != g_lo.is_positive() {
                hi = x;
                found = true;
                break;
            }
            lo = x;
            g_lo = gx;
        }
        if !found {
            return Err(Error::Consistency("no sign change across the branch".into()));
        }
    }
    let lo_positive = g_lo.is_positive();
    loop {
        // dyadic midpoint keeps denominators bounded across iterations
        let mid = snap_down(&((&lo + &hi) / rat_int(2)), 320);
        if mid <= lo || mid >= hi {
            return verified(model, arc, (&lo + &hi) / rat_int(2));
        }
        let g_mid = g(&mid);
        if g_mid.abs() < *tol {
            return verified(model, arc, mid);
        }
        if g_mid.is_positive() == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// Exact branch-membership check through the fold before returning a root.
fn verified(model: &DenjoyModel, arc: &MarkovArc, x: Rat) -> Result<Rat> {
    use std::cmp::Ordering::*;
    let fold = model.fold();
    if x.abs() > fold.halfwidth {
        return Err(Error::Consistency("root left the plateau".into()));
    }
    let y = fold.eval(&x);
    if arc.eta_image.0.cmp_rat(&y) == Greater || arc.eta_image.1.cmp_rat(&y) == Less {
        return Err(Error::Consistency("root left its branch".into()));
    }
    Ok(x)
}

/// Centered coordinate of a point lying near its lattice line.
fn centered_coord(pt: &LiftedSkeletonPoint) -> Rat {
    if pt.base.coord < rat(1, 2) {
        pt.base.coord.clone()
    } else {
        &pt.base.coord - Rat::one()
    }
}

/// Approximate the periodic point in the canonical (leftmost) branch: the
/// first-return residual at the result is below `tol` on the circle coordinate.
pub fn fixed_point_in_k(model: &DenjoyModel, m: i64, n: i64, tol: &Rat) -> Result<SkeletonPoint> {
    if !tol.is_positive() {
        return Err(Error::InvalidParameter("tolerance must be positive".into()));
    }
    let arcs = markov_arcs(model, m, n)?;
    if arcs.is_empty() {
        return Err(Error::NotAdmissible { m, n });
    }
    let branch = &arcs[0];
    let period = m + n + 1;
    let g = |x: &Rat| -> Rat {
        let start = LiftedSkeletonPoint::from_base(SkeletonPoint::new(Axis::V, frac(x)));
        let end = apply_full_steps(model, &start, period);
        centered_coord(&end) - x
    };
    let x = branch_bisect(model, branch, &g, tol)?;
    Ok(SkeletonPoint::new(Axis::V, frac(&x)))
}

/// Integer displacement of the exact lifted first-return orbit from `pt`,
/// plus the largest fractional residual of the two coordinates.
pub fn first_return_displacement(
    model: &DenjoyModel,
    pt: &SkeletonPoint,
    period: i64,
) -> (BigInt, BigInt, Rat) {
    let start = LiftedSkeletonPoint::from_base(pt.clone());
    let end = apply_full_steps(model, &start, period);
    let (sx, sy) = start.position();
    let (ex, ey) = end.position();
    let dx = &ex - &sx;
    let dy = &ey - &sy;
    let ix = dx.round().to_integer();
    let iy = dy.round().to_integer();
    let rx = (&dx - Rat::from_integer(ix.clone())).abs();
    let ry = (&dy - Rat::from_integer(iy.clone())).abs();
    let residual = if rx > ry { rx } else { ry };
    (ix, iy, residual)
}

/// Certified rotation vector of the periodic orbit through the first-return
/// arcs, cross-checked two ways: the lifted orbit of the bisected periodic
/// point, and the exact transport identities through the semiconjugacy.
pub fn rotation_vector_exact(model: &DenjoyModel, m: i64, n: i64) -> Result<PlanarRational> {
    if !model.param.is_admissible(m, n)? {
        return Err(Error::NotAdmissible { m, n });
    }
    let expected = model.param.rho_vec(m, n)?;
    let period = m + n + 1;
    let ceil_m = model.param.ceil_multiple(m)?;
    let ceil_n = model.param.ceil_multiple(n)?;

    // route (a): lifted displacement of the bisected periodic point
    let tol = Rat::new(BigInt::one(), BigInt::from(10u64).pow(12));
    let fp = fixed_point_in_k(model, m, n, &tol)?;
    let (ix, iy, residual) = first_return_displacement(model, &fp, period);
    if ix != ceil_m || iy != ceil_n {
        return Err(Error::Consistency(format!(
            "orbit displacement ({ix},{iy}) disagrees with ceilings ({ceil_m},{ceil_n}) at ({m},{n})"
        )));
    }
    if residual >= Rat::new(BigInt::one(), BigInt::from(10u64).pow(9)) {
        return Err(Error::Consistency(format!("periodic residual too large at ({m},{n})")));
    }

    // route (b): the backward arcs collapse to their rotation angles, so the
    // telescoped transported displacement is exactly the ceiling pair
    let rho = model.param.value();
    let arcs = backward_arcs(model, m.max(n))?;
    for (idx, arc) in arcs.iter().enumerate() {
        let j = (idx + 1) as i64;
        let target = frac(&(rat_int(-j) * &rho));
        let h_val = model.semiconj_h(&arc.midpoint())?;
        if h_val != target {
            return Err(Error::Consistency(format!(
                "backward arc {j} transports to {h_val}, expected {target}"
            )));
        }
    }
    let m_rho = rat_int(m) * &rho;
    let n_rho = rat_int(n) * &rho;
    let dx = (-&m_rho - Rat::from_integer((-&m_rho).floor().to_integer())) + &m_rho;
    let dy = (-&n_rho - Rat::from_integer((-&n_rho).floor().to_integer())) + &n_rho;
    if dx != Rat::from_integer(ceil_m.clone()) || dy != Rat::from_integer(ceil_n.clone()) {
        return Err(Error::Consistency("transport algebra disagrees with ceilings".into()));
    }

    let den = rat_int(period);
    let result =
        PlanarRational::new(Rat::from_integer(ceil_m) / &den, Rat::from_integer(ceil_n) / &den);
    if result != expected {
        return Err(Error::Consistency(
            "rotation vector disagrees with the defining formula".into(),
        ));
    }
    Ok(result)
}

/// CSV table of first-return arcs for all pairs up to `max_index`.
pub fn markov_csv(model: &DenjoyModel, max_index: i64) -> Result<String> {
    let mut out = String::from(
        "m,n,admissible,branch,lo_num,lo_den,hi_num,hi_den,lo_dec,hi_dec,rho_x_num,rho_x_den,rho_y_num,rho_y_den\n",
    );
    for m in 1..=max_index {
        for n in 1..=max_index {
            let arcs = markov_arcs(model, m, n)?;
            if arcs.is_empty() {
                out.push_str(&format!("{m},{n},0,,,,,,,,,,,\n"));
                continue;
            }
            let v = model.param.rho_vec(m, n)?;
            for a in &arcs {
                out.push_str(&format!(
                    "{m},{n},1,{},{},{},{},{},{},{},{},{},{},{}\n",
                    a.branch,
                    a.arc.lo.numer(),
                    a.arc.lo.denom(),
                    a.arc.hi.numer(),
                    a.arc.hi.denom(),
                    crate::exact::decimal_string(&a.arc.lo, 12),
                    crate::exact::decimal_string(&a.arc.hi, 12),
                    v.x.numer(),
                    v.x.denom(),
                    v.y.numer(),
                    v.y.denom(),
                ));
            }
        }
    }
    Ok(out)
}

/// Orbit dump as JSON lines; half steps are indexed by doubled time.
pub fn orbit_jsonl(model: &DenjoyModel, start: &SkeletonPoint, steps: i64) -> String {
    let mut cur = LiftedSkeletonPoint::from_base(start.clone());
    let mut out = String::new();
    let mut push = |t2: i64, pt: &LiftedSkeletonPoint| {
        let line = json!({
            "t2": t2,
            "axis": match pt.base.axis { Axis::H => "h", Axis::V => "v" },
            "coord": ratio_string(&pt.base.coord),
            "tx": pt.translate.0.to_string(),
            "ty": pt.translate.1.to_string(),
        });
        out.push_str(&serde_json::to_string(&line).unwrap());
        out.push('\n');
    };
    push(0, &cur);
    for t in 0..steps {
        let (half, _) = lifted_half_step(model, Axis::H, &cur);
        push(2 * t + 1, &half);
        let (full, _) = lifted_half_step(model, Axis::V, &half);
        push(2 * t + 2, &full);
        cur = full;
    }
    out
}
