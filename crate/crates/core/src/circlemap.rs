//! Degree-one circle maps with exact rational pieces.
//!
//! The central construction blows up a finite window of the rotation orbit
//! of 0 into gaps, conjugates the rigid rotation by the resulting
//! piecewise-linear change of coordinates, and then flattens the central
//! gap into a plateau. This yields the plateau map `phi`, the collapse `p`,
//! the quotient homeomorphism `psi` with `phi = psi . p`, and the
//! semiconjugacy `h` collapsing every tracked gap to its rotation angle.
//!
//! Everything here is exact. Long iterations snap coordinates to a dyadic
//! grid between steps; the per-step defect is `2^-SNAP_GRID_LOG2` and the
//! rotation-number bracket accounts for it.

use std::collections::BTreeMap;

use num::{BigInt, One, Signed, Zero};
use serde_json::{json, Value};

use crate::exact::{frac, rat_int, ratio_string, snap_down, QuadVal, RatInterval};
use crate::numeric::IrrationalParam;
use crate::{Error, Rat, Result};

/// Dyadic snapping resolution for long orbit iterations.
pub const SNAP_GRID_LOG2: u32 = 128;

/// One piece of a piecewise map, in lift coordinates over `[0,1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Piece {
    Affine { a: Rat, b: Rat },
    /// `c2*x^2 + c1*x + c0`; only the fold uses this variant.
    Quadratic { c2: Rat, c1: Rat, c0: Rat },
}

impl Piece {
    pub fn eval(&self, x: &Rat) -> Rat {
        match self {
            Piece::Affine { a, b } => a * x + b,
            Piece::Quadratic { c2, c1, c0 } => c2 * x * x + c1 * x + c0,
        }
    }
}

/// Monotone degree-one circle map as ordered exact-endpoint affine pieces.
///
/// `breakpoints[0] == 0`; piece `i` covers `[breakpoints[i], breakpoints[i+1])`
/// (the last piece runs to 1). Pieces are stored in lift coordinates with
/// the normalization `lift(0) in [0,1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseCircleMap {
    pub breakpoints: Vec<Rat>,
    pub pieces: Vec<Piece>,
    /// Maximal arcs on which the lift is constant.
    pub plateaus: Vec<RatInterval>,
    /// Integer added during lift normalization.
    pub lift_offset: i64,
    pub degree: i32,
}

impl PiecewiseCircleMap {
    /// Build from affine pieces `(slope, intercept)` and validate the
    /// degree-one monotone circle-map invariants.
    pub fn from_affine_pieces(breakpoints: Vec<Rat>, coeffs: Vec<(Rat, Rat)>) -> Result<Self> {
        if breakpoints.is_empty() || breakpoints.len() != coeffs.len() {
            return Err(Error::InvalidParameter("piece/breakpoint count mismatch".into()));
        }
        if !breakpoints[0].is_zero() {
            return Err(Error::InvalidParameter("first breakpoint must be 0".into()));
        }
        for w in breakpoints.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::InvalidParameter("breakpoints must increase".into()));
            }
        }
        if *breakpoints.last().unwrap() >= Rat::one() {
            return Err(Error::InvalidParameter("breakpoints must lie in [0,1)".into()));
        }
        for (a, _) in &coeffs {
            if a.is_negative() {
                return Err(Error::InvalidParameter("negative slope".into()));
            }
        }
        // continuity inside and across the wrap
        let n = coeffs.len();
        let eval = |i: usize, x: &Rat| -> Rat { &coeffs[i].0 * x + &coeffs[i].1 };
        for i in 0..n - 1 {
            if eval(i, &breakpoints[i + 1]) != eval(i + 1, &breakpoints[i + 1]) {
                return Err(Error::InvalidParameter(format!(
                    "discontinuity at breakpoint {}",
                    breakpoints[i + 1]
                )));
            }
        }
        if eval(n - 1, &Rat::one()) != eval(0, &Rat::zero()) + Rat::one() {
            return Err(Error::InvalidParameter("wrap fails degree-one continuity".into()));
        }
        // lift normalization
        let v0 = eval(0, &Rat::zero());
        let shift = -v0.floor().to_integer();
        let lift_offset = i64::try_from(&shift).unwrap_or(0);
        let shift_rat = Rat::from_integer(shift);
        let mut pieces = Vec::with_capacity(n);
        for (a, b) in coeffs {
            pieces.push(Piece::Affine { a, b: b + &shift_rat });
        }
        // merge identical adjacent pieces
        let mut m_breaks: Vec<Rat> = Vec::new();
        let mut m_pieces: Vec<Piece> = Vec::new();
        for (bp, pc) in breakpoints.into_iter().zip(pieces.into_iter()) {
            if let Some(last) = m_pieces.last() {
                if *last == pc {
                    continue;
                }
            }
            m_breaks.push(bp);
            m_pieces.push(pc);
        }
        // plateau arcs
        let mut plateaus = Vec::new();
        let k = m_pieces.len();
        for i in 0..k {
            if let Piece::Affine { a, .. } = &m_pieces[i] {
                if a.is_zero() {
                    let lo = m_breaks[i].clone();
                    let hi = if i + 1 < k { m_breaks[i + 1].clone() } else { Rat::one() };
                    plateaus.push(RatInterval::new(lo, hi));
                }
            }
        }
        Ok(PiecewiseCircleMap {
            breakpoints: m_breaks,
            pieces: m_pieces,
            plateaus,
            lift_offset,
            degree: 1,
        })
    }

    /// Rigid rotation by `angle`.
    pub fn rotation(angle: &Rat) -> Self {
        let a = frac(angle);
        PiecewiseCircleMap::from_affine_pieces(vec![Rat::zero()], vec![(Rat::one(), a)])
            .expect("rotation is always valid")
    }

    fn piece_index(&self, x: &Rat) -> usize {
        debug_assert!(!x.is_negative() && *x < Rat::one());
        self.breakpoints.partition_point(|b| b <= x) - 1
    }

    /// Evaluate the chosen lift at any rational.
    pub fn apply_lift(&self, x_tilde: &Rat) -> Rat {
        let n = x_tilde.floor();
        let x = x_tilde - &n;
        let i = self.piece_index(&x);
        self.pieces[i].eval(&x) + n
    }

    /// Evaluate on the circle, result normalized to `[0,1)`.
    pub fn apply(&self, x: &Rat) -> Rat {
        frac(&self.apply_lift(&frac(x)))
    }

    /// Evaluate the lift at a quadratic-extension point (affine pieces only).
    pub fn apply_lift_quad(&self, x: &QuadVal) -> QuadVal {
        use std::cmp::Ordering;
        // reduce to [0,1): floor via enclosure, verified unambiguous
        let enc = x.enclosure(64);
        let fl = enc.lo.floor().to_integer();
        let fl_hi = enc.hi.floor().to_integer();
        assert_eq!(fl, fl_hi, "fold coordinate too close to an integer for enclosure floor");
        let shift = Rat::from_integer(fl);
        let xr = x.add_rat(&(-shift.clone()));
        debug_assert!(xr.sign() != Ordering::Less);
        // locate the piece by exact comparison against breakpoints
        let mut idx = 0;
        for (i, b) in self.breakpoints.iter().enumerate() {
            if xr.cmp_rat(b) != Ordering::Less {
                idx = i;
            } else {
                break;
            }
        }
        match &self.pieces[idx] {
            Piece::Affine { a, b } => xr.mul_rat(a).add_rat(b).add_rat(&shift),
            Piece::Quadratic { .. } => panic!("quadratic piece in circle map"),
        }
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.pieces.iter().all(|p| match p {
            Piece::Affine { a, .. } => a.is_positive(),
            Piece::Quadratic { .. } => false,
        })
    }

    pub fn max_slope(&self) -> Rat {
        let mut m = Rat::zero();
        for p in &self.pieces {
            if let Piece::Affine { a, .. } = p {
                if *a > m {
                    m = a.clone();
                }
            }
        }
        m
    }

    /// Unique preimage of a lift value under a strictly increasing stretch of
    /// the map. Plateau values are rejected.
    pub fn invert_lift_point(&self, y_tilde: &Rat) -> Result<Rat> {
        let c = self.pieces[0].eval(&Rat::zero());
        // shift y into the fundamental value window [c, c+1)
        let offset = (y_tilde - &c).floor();
        let y = y_tilde - &offset;
        let n = self.pieces.len();
        for i in 0..n {
            let lo = self.pieces[i].eval(&self.breakpoints[i]);
            let hi_x = if i + 1 < n { self.breakpoints[i + 1].clone() } else { Rat::one() };
            let hi = self.pieces[i].eval(&hi_x);
            if y >= lo && y <= hi {
                match &self.pieces[i] {
                    Piece::Affine { a, b } => {
                        if a.is_zero() {
                            if y == lo {
                                return Err(Error::NotInvertible);
                            }
                            continue;
                        }
                        let x = (&y - b) / a;
                        if x >= self.breakpoints[i] && x <= hi_x {
                            return Ok(x + offset);
                        }
                    }
                    Piece::Quadratic { .. } => return Err(Error::NotInvertible),
                }
            }
        }
        Err(Error::NotInvertible)
    }

    /// Exact preimage of a lifted arc; the arc must avoid plateau values.
    pub fn preimage_arc(&self, arc: &RatInterval) -> Result<RatInterval> {
        let lo = self.invert_lift_point(&arc.lo)?;
        let hi = self.invert_lift_point(&arc.hi)?;
        // keep the representative with hi - lo in (0,1)
        let hi = if hi < lo { hi + Rat::one() } else { hi };
        Ok(RatInterval::new(lo, hi))
    }

    /// Exact image of a lifted arc under the monotone map.
    pub fn image_arc(&self, arc: &RatInterval) -> RatInterval {
        RatInterval::new(self.apply_lift(&arc.lo), self.apply_lift(&arc.hi))
    }

    /// Full inverse of a strictly increasing map.
    pub fn invert(&self) -> Result<PiecewiseCircleMap> {
        if !self.is_strictly_increasing() {
            return Err(Error::NotInvertible);
        }
        let n = self.pieces.len();
        // natural inverse pieces over the value window [c, c+1) map onto
        // [0,1) increasingly; rebase the domain to [0,1): values below c keep
        // the lift continuous by taking the inverse of y+1 minus 1
        let mut entries: Vec<(Rat, Rat, Rat)> = Vec::new();
        for i in 0..n {
            let (a, b) = match &self.pieces[i] {
                Piece::Affine { a, b } => (a.clone(), b.clone()),
                _ => return Err(Error::NotInvertible),
            };
            let y_lo = self.pieces[i].eval(&self.breakpoints[i]);
            let hi_x = if i + 1 < n { self.breakpoints[i + 1].clone() } else { Rat::one() };
            let y_hi = self.pieces[i].eval(&hi_x);
            let inv_a = Rat::one() / &a;
            let inv_b = -&b / &a;
            if y_lo < Rat::one() {
                entries.push((y_lo.clone(), inv_a.clone(), inv_b.clone()));
            }
            if y_hi > Rat::one() {
                let start = if y_lo > Rat::one() { &y_lo - Rat::one() } else { Rat::zero() };
                // x = inv_a*(y+1) + inv_b - 1
                entries.push((start, inv_a.clone(), &inv_a + &inv_b - Rat::one()));
            }
        }
        entries.sort_by(|x, y| x.0.cmp(&y.0));
        entries.dedup_by(|a, b| a.0 == b.0);
        let breaks: Vec<Rat> = entries.iter().map(|e| e.0.clone()).collect();
        let coeffs: Vec<(Rat, Rat)> = entries.into_iter().map(|e| (e.1, e.2)).collect();
        PiecewiseCircleMap::from_affine_pieces(breaks, coeffs)
    }

    /// Exact composition `self . inner` of monotone affine circle maps.
    pub fn compose(&self, inner: &PiecewiseCircleMap) -> Result<PiecewiseCircleMap> {
        let mut cuts: Vec<Rat> = inner.breakpoints.clone();
        let n = inner.pieces.len();
        for i in 0..n {
            let (a, b) = match &inner.pieces[i] {
                Piece::Affine { a, b } => (a, b),
                _ => return Err(Error::InvalidParameter("compose needs affine pieces".into())),
            };
            if a.is_zero() {
                continue;
            }
            let lo_x = &inner.breakpoints[i];
            let hi_x = if i + 1 < n { inner.breakpoints[i + 1].clone() } else { Rat::one() };
            let y_lo = a * lo_x + b;
            let y_hi = a * &hi_x + b;
            let k_lo = y_lo.floor().to_integer();
            let k_hi = y_hi.floor().to_integer();
            let mut k = k_lo.clone();
            while k <= k_hi {
                for fb in &self.breakpoints {
                    let target = fb + Rat::from_integer(k.clone());
                    if target > y_lo && target < y_hi {
                        let x = (&target - b) / a;
                        cuts.push(x);
                    }
                }
                k += BigInt::one();
            }
        }
        cuts.sort();
        cuts.dedup();
        let m = cuts.len();
        let mut coeffs = Vec::with_capacity(m);
        for i in 0..m {
            let lo = &cuts[i];
            let hi = if i + 1 < m { cuts[i + 1].clone() } else { Rat::one() };
            let mid = (lo + &hi) / rat_int(2);
            let (ga, gb) = match &inner.pieces[inner.piece_index(&mid)] {
                Piece::Affine { a, b } => (a.clone(), b.clone()),
                _ => unreachable!(),
            };
            let y_mid = &ga * &mid + &gb;
            let k = y_mid.floor().to_integer();
            let k_rat = Rat::from_integer(k);
            let y_frac = &y_mid - &k_rat;
            let (fa, fb) = match &self.pieces[self.piece_index(&y_frac)] {
                Piece::Affine { a, b } => (a.clone(), b.clone()),
                _ => unreachable!(),
            };
            // f(g(x)) = fa*(g(x) - k) + fb + k
            let a = &fa * &ga;
            let b = &fa * (&gb - &k_rat) + &fb + &k_rat;
            coeffs.push((a, b));
        }
        PiecewiseCircleMap::from_affine_pieces(cuts, coeffs)
    }

    /// Serialize pieces for the reproducibility dump.
    pub fn to_json(&self) -> Value {
        let pieces: Vec<Value> = self
            .breakpoints
            .iter()
            .zip(&self.pieces)
            .map(|(bp, pc)| match pc {
                Piece::Affine { a, b } => json!({
                    "from": ratio_string(bp),
                    "slope": ratio_string(a),
                    "intercept": ratio_string(b),
                }),
                Piece::Quadratic { c2, c1, c0 } => json!({
                    "from": ratio_string(bp),
                    "c2": ratio_string(c2),
                    "c1": ratio_string(c1),
                    "c0": ratio_string(c0),
                }),
            })
            .collect();
        json!({ "degree": self.degree, "lift_offset": self.lift_offset, "pieces": pieces })
    }
}

/// The quadratic fold `u -> tau * (1 - (u/w)^2)` on `[-w, w]`.
#[derive(Debug, Clone)]
pub struct Fold {
    pub halfwidth: Rat,
    pub tau: Rat,
    piece: Piece,
}

impl Fold {
    pub fn new(halfwidth: Rat, tau: Rat) -> Self {
        let c2 = -&tau / (&halfwidth * &halfwidth);
        let piece = Piece::Quadratic { c2, c1: Rat::zero(), c0: tau.clone() };
        Fold { halfwidth, tau, piece }
    }

    /// Evaluate at `u` with `|u| <= halfwidth`.
    pub fn eval(&self, u: &Rat) -> Rat {
        debug_assert!(u.abs() <= self.halfwidth);
        self.piece.eval(u)
    }

    /// Exact evaluation at a quadratic-extension point; squaring stays in the field.
    pub fn eval_quad(&self, u: &QuadVal) -> QuadVal {
        let c2 = -&self.tau / (&self.halfwidth * &self.halfwidth);
        u.square().mul_rat(&c2).add_rat(&self.tau)
    }

    /// Right-half preimage `w*sqrt(1 - y/tau)` of a rational value, exact.
    pub fn preimage_right(&self, y: &Rat) -> QuadVal {
        let s = Rat::one() - y / &self.tau;
        assert!(!s.is_negative(), "fold preimage of value above tau");
        QuadVal::new(Rat::zero(), self.halfwidth.clone(), s)
    }

    /// Left-half preimage, the mirror image of the right one.
    pub fn preimage_left(&self, y: &Rat) -> QuadVal {
        self.preimage_right(y).mul_rat(&-Rat::one())
    }
}

/// Gap table and cumulative data behind the semiconjugacy to rigid rotation.
#[derive(Debug, Clone)]
pub struct SemiconjData {
    /// `h` as a monotone degree-one map; plateaus are exactly the gaps.
    pub h: PiecewiseCircleMap,
    /// Gaps sorted by position: (arc, target angle, orbit index); index 0 wraps zero.
    pub gaps_sorted: Vec<(RatInterval, Rat, i64)>,
    pub total_gap_mass: Rat,
    /// `B = sup |h_lift - id|`, exact (attained at a breakpoint of `h`).
    pub sup_deviation: Rat,
}

/// The finite blow-up model: plateau map, collapse, quotient, and gap data.
#[derive(Debug, Clone)]
pub struct DenjoyModel {
    pub param: IrrationalParam,
    pub gap_budget: i64,
    pub gap_mass: Rat,
    pub i_fraction: Rat,
    /// Pre-gap halfwidth in rotation coordinates.
    pub delta: Rat,
    pub phi: PiecewiseCircleMap,
    pub p_collapse: PiecewiseCircleMap,
    pub psi: PiecewiseCircleMap,
    /// Halfwidth of the plateau arc `I`.
    pub i_halfwidth: Rat,
    /// The central gap, as the wrapping arc `[-w_G, w_G]`; `I` is its `i_fraction` core.
    pub wandering_arc: RatInterval,
    pub tau: Rat,
    /// Tracked gaps by orbit index; index 0 is the wandering arc.
    pub gap_index: BTreeMap<i64, RatInterval>,
    pub cantor_measure_scale: Rat,
    pub semiconj: SemiconjData,
}

fn modular_inverse(a: i64, m: i64) -> i64 {
    let (mut t, mut new_t) = (0i64, 1i64);
    let (mut r, mut new_r) = (m, a.rem_euclid(m));
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1);
    t.rem_euclid(m)
}

/// Build the finite blow-up model.
///
/// Gaps `G_n`, `|n| <= gap_budget`, with lengths proportional to
/// `1/(n^2+4)` normalized to total mass `gap_mass`, are inserted at the
/// rotation orbit of 0. The map is the rotation conjugated by the insertion
/// homeomorphism, then flattened on `I = i_fraction * G_0` so that `I` maps
/// to the single point `tau`.
pub fn build_denjoy(
    param: &IrrationalParam,
    gap_budget: i64,
    gap_mass: &Rat,
    i_fraction: &Rat,
) -> Result<DenjoyModel> {
    let k = gap_budget;
    if k < 1 {
        return Err(Error::InvalidParameter("gap budget must be at least 1".into()));
    }
    if !gap_mass.is_positive() || *gap_mass >= Rat::one() {
        return Err(Error::InvalidParameter("gap mass must lie in (0,1)".into()));
    }
    if !i_fraction.is_positive() || *i_fraction >= Rat::one() {
        return Err(Error::InvalidParameter("plateau fraction must lie in (0,1)".into()));
    }
    if 2 * k > param.max_safe_index {
        return Err(Error::CertificationRange { index: 2 * k, max_safe: param.max_safe_index });
    }
    let rho = param.value();
    let q = i64::try_from(&param.convergent_den)
        .map_err(|_| Error::InvalidParameter("convergent denominator too large".into()))?;
    let p = i64::try_from(&param.convergent_num).unwrap();
    debug_assert_eq!(modular_inverse(p, q) as i128 * p as i128 % q as i128, 1);

    // base points of the rotation orbit; collisions mean the budget exceeds
    // what the convergent can separate
    let mut base: Vec<(Rat, i64)> = Vec::new();
    for n in -k..=k {
        base.push((frac(&(rat_int(n) * &rho)), n));
    }
    base.sort_by(|a, b| a.0.cmp(&b.0));
    for w in base.windows(2) {
        if w[0].0 == w[1].0 {
            return Err(Error::GapCollision(w[0].1, w[1].1));
        }
    }
    // minimal cyclic spacing of the base points
    let mut spacing = Rat::one() - &base.last().unwrap().0 + &base[0].0;
    for w in base.windows(2) {
        let d = &w[1].0 - &w[0].0;
        if d < spacing {
            spacing = d;
        }
    }
    // pre-gap halfwidth: inside the spacing and below a quarter grid cell,
    // so that off-grid-coset orbits never meet a pre-gap
    let delta = std::cmp::min(&spacing / rat_int(4), Rat::new(BigInt::one(), BigInt::from(4 * q)));

    // gap lengths proportional to 1/(n^2+4)
    let mut weight_sum = Rat::zero();
    for n in -k..=k {
        weight_sum += Rat::new(BigInt::one(), BigInt::from(n * n + 4));
    }
    let scale = gap_mass / weight_sum;
    let gap_len = |n: i64| -> Rat { &scale / rat_int(n * n + 4) };
    let l0 = gap_len(0);
    let w_gap = &l0 / rat_int(2);
    let complement_scale = Rat::one() - gap_mass;

    // gap positions: insert gaps at the base points, complement compressed
    // by 1-L, with G_0 centered at 0
    let mut gap_index: BTreeMap<i64, RatInterval> = BTreeMap::new();
    gap_index.insert(0, RatInterval::new(-w_gap.clone(), w_gap.clone()));
    let mut cumulative = Rat::zero();
    let mut positions: Vec<(Rat, i64)> = Vec::new();
    for (b, n) in base.iter() {
        if *n == 0 {
            continue;
        }
        let start = &w_gap + &complement_scale * b + &cumulative;
        positions.push((start.clone(), *n));
        gap_index.insert(*n, RatInterval::new(start.clone(), start + gap_len(*n)));
        cumulative += gap_len(*n);
    }

    let affine_through = |x0: &Rat, y0: &Rat, x1: &Rat, y1: &Rat| -> (Rat, Rat) {
        let a = (y1 - y0) / (x1 - x0);
        let b = y0 - &a * x0;
        (a, b)
    };

    // the insertion homeomorphism nu: pre-gap [b_n - delta, b_n + delta] -> G_n,
    // affine on complementary arcs
    let nu = {
        let mut nodes: Vec<(Rat, Rat)> = Vec::new();
        nodes.push((Rat::zero(), Rat::zero()));
        nodes.push((delta.clone(), w_gap.clone()));
        for (start, n) in &positions {
            let b_n = frac(&(rat_int(*n) * &rho));
            nodes.push((&b_n - &delta, start.clone()));
            nodes.push((&b_n + &delta, start + gap_len(*n)));
        }
        nodes.push((Rat::one() - &delta, Rat::one() - &w_gap));
        nodes.push((Rat::one(), Rat::one()));
        nodes.sort_by(|a, b| a.0.cmp(&b.0));
        let mut nu_breaks: Vec<Rat> = Vec::new();
        let mut nu_coeffs: Vec<(Rat, Rat)> = Vec::new();
        for w in nodes.windows(2) {
            let (a, b) = affine_through(&w[0].0, &w[0].1, &w[1].0, &w[1].1);
            nu_breaks.push(w[0].0.clone());
            nu_coeffs.push((a, b));
        }
        PiecewiseCircleMap::from_affine_pieces(nu_breaks, nu_coeffs)?
    };
    let nu_inv = nu.invert()?;
    let rotation = PiecewiseCircleMap::rotation(&rho);
    let phi0 = nu.compose(&rotation.compose(&nu_inv)?)?;

    // tracked gaps map onto each other exactly
    for n in -k..k {
        let img = phi0.image_arc(&gap_index[&n]);
        let target = &gap_index[&(n + 1)];
        if frac(&img.lo) != frac(&target.lo) || frac(&img.hi) != frac(&target.hi) {
            return Err(Error::Consistency(format!("gap {} does not map onto gap {}", n, n + 1)));
        }
    }

    let w_i = i_fraction * &w_gap;
    let tau = phi0.apply(&Rat::zero());

    // plateau modification on G_0 = [-w_gap, w_gap]: constant tau on I,
    // affine flanks keeping the image arc G_1
    let phi = {
        let g1 = &gap_index[&1];
        let mut breaks: Vec<Rat> = Vec::new();
        let mut coeffs: Vec<(Rat, Rat)> = Vec::new();
        breaks.push(Rat::zero());
        coeffs.push((Rat::zero(), tau.clone()));
        let (a, b) = affine_through(&w_i, &tau, &w_gap, &g1.hi);
        breaks.push(w_i.clone());
        coeffs.push((a, b));
        let n_pieces = phi0.pieces.len();
        for i in 0..n_pieces {
            let lo = phi0.breakpoints[i].clone();
            let hi = if i + 1 < n_pieces { phi0.breakpoints[i + 1].clone() } else { Rat::one() };
            if hi <= w_gap || lo >= Rat::one() - &w_gap {
                continue;
            }
            let (pa, pb) = match &phi0.pieces[i] {
                Piece::Affine { a, b } => (a.clone(), b.clone()),
                _ => unreachable!(),
            };
            let start = if lo < w_gap { w_gap.clone() } else { lo };
            breaks.push(start);
            coeffs.push((pa, pb));
        }
        let left_val = phi0.apply_lift(&(Rat::one() - &w_gap));
        if frac(&left_val) != g1.lo {
            return Err(Error::Consistency("left flank image mismatch".into()));
        }
        let (a, b) = affine_through(
            &(Rat::one() - &w_gap),
            &left_val,
            &(Rat::one() - &w_i),
            &(&tau + Rat::one()),
        );
        breaks.push(Rat::one() - &w_gap);
        coeffs.push((a, b));
        breaks.push(Rat::one() - &w_i);
        coeffs.push((Rat::zero(), &tau + Rat::one()));
        PiecewiseCircleMap::from_affine_pieces(breaks, coeffs)?
    };

    // collapse p: I -> 0, affine on the complement, fixing the antipode
    let p_collapse = {
        let breaks = vec![Rat::zero(), w_i.clone(), Rat::one() - &w_i];
        let denom = Rat::one() - rat_int(2) * &w_i;
        let a = Rat::one() / &denom;
        let b = -&w_i / &denom;
        let coeffs = vec![(Rat::zero(), Rat::zero()), (a, b), (Rat::zero(), Rat::one())];
        PiecewiseCircleMap::from_affine_pieces(breaks, coeffs)?
    };

    // quotient psi(y) = phi(w_i + y*(1 - 2 w_i)); phi's plateau absorbs the
    // collapsed arc, so this is strictly increasing and degree one
    let psi = {
        let stretch = Rat::one() - rat_int(2) * &w_i;
        let mut breaks: Vec<Rat> = vec![Rat::zero()];
        for bp in &phi.breakpoints {
            if *bp > w_i && *bp < Rat::one() - &w_i {
                breaks.push((bp - &w_i) / &stretch);
            }
        }
        breaks.sort();
        breaks.dedup();
        let m = breaks.len();
        let mut coeffs = Vec::with_capacity(m);
        for i in 0..m {
            let lo = &breaks[i];
            let hi = if i + 1 < m { breaks[i + 1].clone() } else { Rat::one() };
            let mid = (lo + &hi) / rat_int(2);
            let x_mid = &w_i + &mid * &stretch;
            let idx = phi.piece_index(&x_mid);
            let (pa, pb) = match &phi.pieces[idx] {
                Piece::Affine { a, b } => (a.clone(), b.clone()),
                _ => unreachable!(),
            };
            coeffs.push((&pa * &stretch, &pa * &w_i + &pb));
        }
        PiecewiseCircleMap::from_affine_pieces(breaks, coeffs)?
    };
    if !psi.is_strictly_increasing() {
        return Err(Error::Consistency("quotient map is not strictly increasing".into()));
    }

    // semiconjugacy h: collapse each gap G_n to the angle n*rho, invert the
    // insertion on the complement
    let semiconj = {
        let mut gaps_sorted: Vec<(RatInterval, Rat, i64)> = Vec::new();
        gaps_sorted.push((RatInterval::new(-w_gap.clone(), w_gap.clone()), Rat::zero(), 0));
        for (start, n) in &positions {
            gaps_sorted.push((
                RatInterval::new(start.clone(), start + gap_len(*n)),
                frac(&(rat_int(*n) * &rho)),
                *n,
            ));
        }
        let mut breaks: Vec<Rat> = Vec::new();
        let mut coeffs: Vec<(Rat, Rat)> = Vec::new();
        breaks.push(Rat::zero());
        coeffs.push((Rat::zero(), Rat::zero()));
        let mut prev_end = w_gap.clone();
        let mut prev_target = Rat::zero();
        for (arc, target, _) in gaps_sorted.iter().skip(1) {
            let (a, b) = affine_through(&prev_end, &prev_target, &arc.lo, target);
            breaks.push(prev_end.clone());
            coeffs.push((a, b));
            breaks.push(arc.lo.clone());
            coeffs.push((Rat::zero(), target.clone()));
            prev_end = arc.hi.clone();
            prev_target = target.clone();
        }
        let (a, b) = affine_through(&prev_end, &prev_target, &(Rat::one() - &w_gap), &Rat::one());
        breaks.push(prev_end.clone());
        coeffs.push((a, b));
        breaks.push(Rat::one() - &w_gap);
        coeffs.push((Rat::zero(), Rat::one()));
        let h = PiecewiseCircleMap::from_affine_pieces(breaks, coeffs)?;
        let mut sup_dev = Rat::zero();
        for bp in &h.breakpoints {
            let d = (h.apply_lift(bp) - bp).abs();
            if d > sup_dev {
                sup_dev = d;
            }
        }
        SemiconjData { h, gaps_sorted, total_gap_mass: gap_mass.clone(), sup_deviation: sup_dev }
    };

    Ok(DenjoyModel {
        param: param.clone(),
        gap_budget: k,
        gap_mass: gap_mass.clone(),
        i_fraction: i_fraction.clone(),
        delta,
        phi,
        p_collapse,
        psi,
        i_halfwidth: w_i,
        wandering_arc: RatInterval::new(-w_gap.clone(), w_gap),
        tau,
        gap_index,
        cantor_measure_scale: complement_scale,
        semiconj,
    })
}

impl DenjoyModel {
    /// The fold used on the skeleton, `I -> [0, tau]`.
    pub fn fold(&self) -> Fold {
        Fold::new(self.i_halfwidth.clone(), self.tau.clone())
    }

    /// Gap containing the circle point `x`, if tracked.
    pub fn gap_at(&self, x: &Rat) -> Option<i64> {
        let x = frac(x);
        let w = &self.wandering_arc.hi;
        if x <= *w || x >= Rat::one() - w {
            return Some(0);
        }
        for (arc, _, n) in &self.semiconj.gaps_sorted {
            if *n != 0 && arc.contains(&x) {
                return Some(*n);
            }
        }
        None
    }

    /// The semiconjugacy `h`: gaps collapse to their rotation angle, the
    /// complement maps by the rescaled inverse insertion.
    ///
    /// Points whose image sits within `delta` of an orbit angle outside the
    /// tracked window are rejected: the finite model does not carry the gap
    /// that the infinite construction would put there.
    pub fn semiconj_h(&self, x: &Rat) -> Result<Rat> {
        let x = frac(x);
        if let Some(n) = self.gap_at(&x) {
            return Ok(frac(&(rat_int(n) * self.param.value())));
        }
        let u = self.semiconj.h.apply(&x);
        let q = i64::try_from(&self.param.convergent_den).unwrap();
        let p = i64::try_from(&self.param.convergent_num).unwrap();
        let scaled = &u * rat_int(q);
        let i_near = scaled.round().to_integer();
        let diff = (&u - Rat::new(i_near.clone(), BigInt::from(q))).abs();
        if diff < self.delta {
            let i = i64::try_from(&i_near).unwrap().rem_euclid(q);
            let j = (i as i128 * modular_inverse(p, q) as i128).rem_euclid(q as i128) as i64;
            let j_signed = if j > q / 2 { j - q } else { j };
            if j_signed.abs() > self.gap_budget {
                return Err(Error::OutsideWindow(j_signed));
            }
        }
        Ok(u)
    }

    /// Nearest angle to `t` with half-cell grid offset: its rotation orbit
    /// stays a quarter cell away from every pre-gap, tracked or untracked,
    /// so the corresponding circle point is free forever.
    pub fn certified_free_angle(&self, t: &Rat) -> Rat {
        let q = self.param.convergent_den.clone();
        let cell = (frac(t) * Rat::from_integer(q.clone())).floor().to_integer();
        Rat::new(cell * BigInt::from(2) + BigInt::one(), q * BigInt::from(2))
    }

    /// Unique `h`-preimage of an angle that is not a tracked gap target.
    pub fn h_preimage(&self, t: &Rat) -> Result<Rat> {
        let t = frac(t);
        for (_, target, n) in &self.semiconj.gaps_sorted {
            if *target == t {
                return Err(Error::InvalidParameter(format!(
                    "angle {t} is the target of tracked gap {n}"
                )));
            }
        }
        let x = self.semiconj.h.invert_lift_point(&t)?;
        Ok(frac(&x))
    }

    /// True iff the forward images of the wandering arc stay disjoint from it
    /// for `1 <= k <= horizon` (exact interval arithmetic).
    pub fn wandering_check(&self, horizon: i64) -> Result<bool> {
        if horizon >= self.gap_budget {
            return Err(Error::WindowExceeded { requested: horizon, window: self.gap_budget - 1 });
        }
        Ok(wandering_check_arcs(&self.phi, &self.wandering_arc, horizon))
    }
}

/// Disjointness of `map^k(arc)` from `arc` for `1 <= k <= horizon`; the arc
/// is given in lift coordinates and may wrap zero.
pub fn wandering_check_arcs(map: &PiecewiseCircleMap, arc: &RatInterval, horizon: i64) -> bool {
    let mut current = arc.clone();
    for _ in 1..=horizon.max(0) {
        current = map.image_arc(&current);
        if circle_arcs_intersect(&current, arc) {
            return false;
        }
    }
    true
}

/// Exact intersection test for two arcs given as lifted intervals of length < 1.
fn circle_arcs_intersect(a: &RatInterval, b: &RatInterval) -> bool {
    let a0 = RatInterval::new(frac(&a.lo), frac(&a.lo) + a.length());
    let b0 = RatInterval::new(frac(&b.lo), frac(&b.lo) + b.length());
    for shift in [-1i64, 0, 1] {
        let s = rat_int(shift);
        let shifted = RatInterval::new(&b0.lo + &s, &b0.hi + &s);
        if a0.intersects(&shifted) {
            return true;
        }
    }
    false
}

/// Orbit-average bracket for the rotation number of a monotone degree-one map.
///
/// Iterates the lift with downward dyadic snapping between steps; the bracket
/// `[d/n - 1/n, d/n + 1/n + 2^-G]` contains the true rotation number.
pub fn rotation_number_estimate(
    map: &PiecewiseCircleMap,
    x0: &Rat,
    n_iters: u64,
) -> Result<RatInterval> {
    if n_iters < 1 {
        return Err(Error::InvalidParameter("need at least one iterate".into()));
    }
    let mut x = x0.clone();
    for _ in 0..n_iters {
        x = snap_down(&map.apply_lift(&x), SNAP_GRID_LOG2);
    }
    let n = rat_int(n_iters as i64);
    let avg = (&x - x0) / &n;
    let inv_n = Rat::one() / &n;
    let snap_term = Rat::new(BigInt::one(), BigInt::one() << SNAP_GRID_LOG2);
    Ok(RatInterval::new(&avg - &inv_n, &avg + &inv_n + snap_term))
}

/// Reproducibility dump of the whole model.
pub fn model_to_json(model: &DenjoyModel) -> Value {
    let gaps: Vec<Value> = model
        .gap_index
        .iter()
        .map(|(n, arc)| {
            json!({
                "index": n,
                "from": ratio_string(&arc.lo),
                "to": ratio_string(&arc.hi),
            })
        })
        .collect();
    json!({
        "convergent": format!("{}/{}", model.param.convergent_num, model.param.convergent_den),
        "gap_budget": model.gap_budget,
        "gap_mass": ratio_string(&model.gap_mass),
        "i_fraction": ratio_string(&model.i_fraction),
        "i_halfwidth": ratio_string(&model.i_halfwidth),
        "delta": ratio_string(&model.delta),
        "tau": ratio_string(&model.tau),
        "cantor_measure_scale": ratio_string(&model.cantor_measure_scale),
        "gaps": gaps,
        "phi": model.phi.to_json(),
        "p": model.p_collapse.to_json(),
        "psi": model.psi.to_json(),
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::numeric::golden;
    use std::sync::OnceLock;

    pub(crate) fn golden_model() -> &'static DenjoyModel {
        static MODEL: OnceLock<DenjoyModel> = OnceLock::new();
        MODEL.get_or_init(|| {
            let p = golden(20).unwrap();
            build_denjoy(&p, 40, &rat(1, 2), &rat(17, 18)).unwrap()
        })
    }

    #[test]
    fn rotation_map_basics() {
        let r = PiecewiseCircleMap::rotation(&rat(1, 4));
        assert_eq!(r.apply(&rat(7, 8)), rat(1, 8));
        for x in [rat(0, 1), rat(1, 3), rat(9, 10)] {
            assert_eq!(r.apply_lift(&(&x + Rat::one())), r.apply_lift(&x) + Rat::one());
        }
        let est = rotation_number_estimate(&r, &rat(1, 7), 100).unwrap();
        assert!(est.contains(&rat(1, 4)));
    }

    #[test]
    fn compose_and_invert_roundtrip() {
        let f = PiecewiseCircleMap::from_affine_pieces(
            vec![rat(0, 1), rat(1, 2)],
            vec![(rat(1, 2), rat(1, 4)), (rat(3, 2), rat(-1, 4))],
        )
        .unwrap();
        let f_inv = f.invert().unwrap();
        let id = f_inv.compose(&f).unwrap();
        for x in [rat(0, 1), rat(1, 5), rat(1, 2), rat(2, 3), rat(17, 19)] {
            assert_eq!(id.apply(&x), x);
            assert_eq!(f_inv.apply(&f.apply(&x)), x);
        }
        let g = PiecewiseCircleMap::rotation(&rat(2, 5));
        let fg = f.compose(&g).unwrap();
        for x in [rat(1, 9), rat(5, 7), rat(13, 17)] {
            assert_eq!(fg.apply(&x), f.apply(&g.apply(&x)));
        }
    }

    #[test]
    fn golden_model_builds_with_expected_shape() {
        let m = golden_model();
        assert_eq!(m.gap_index.len(), 81);
        assert!(m.tau > rat(1, 2) && m.tau < rat(3, 4));
        assert_eq!(m.i_halfwidth, rat(17, 18) * &m.wandering_arc.hi);
        assert_eq!(m.wandering_arc.lo, -m.wandering_arc.hi.clone());
        // tau equals psi(0), the extension value of the quotient through 0
        assert_eq!(m.psi.apply(&Rat::zero()), m.tau);
    }

    #[test]
    fn plateau_maps_to_single_point() {
        let m = golden_model();
        let w = &m.i_halfwidth;
        for x in [
            Rat::zero(),
            w.clone(),
            -w.clone(),
            w / rat_int(2),
            w * rat(9, 10),
            -(w * rat(3, 7)),
        ] {
            assert_eq!(m.phi.apply(&x), m.tau, "plateau at {x}");
        }
        assert_eq!(m.phi.plateaus.len(), 2); // the two wrapped halves of I
    }

    #[test]
    fn phi_factors_through_collapse() {
        let m = golden_model();
        for bp in &m.phi.breakpoints {
            let lhs = m.phi.apply(bp);
            let rhs = m.psi.apply(&m.p_collapse.apply(bp));
            assert_eq!(lhs, rhs, "phi != psi.p at breakpoint {bp}");
        }
        for i in 0..1000u64 {
            let x = frac(&(rat_int(i as i64) * rat(7919, 104729) + rat(1, 3)));
            assert_eq!(m.phi.apply(&x), m.psi.apply(&m.p_collapse.apply(&x)));
        }
    }

    #[test]
    fn collapse_fixes_antipode_and_flattens_plateau() {
        let m = golden_model();
        assert_eq!(m.p_collapse.apply(&rat(1, 2)), rat(1, 2));
        assert_eq!(m.p_collapse.apply(&m.i_halfwidth), Rat::zero());
        assert_eq!(m.p_collapse.apply(&(m.i_halfwidth.clone() / rat_int(3))), Rat::zero());
        assert!(m.psi.plateaus.is_empty());
        assert!(m.psi.is_strictly_increasing());
    }

    #[test]
    fn tracked_gaps_shift_by_one() {
        let m = golden_model();
        for n in -40..40i64 {
            let img = m.phi.image_arc(&m.gap_index[&n]);
            let target = &m.gap_index[&(n + 1)];
            assert_eq!(frac(&img.lo), frac(&target.lo), "gap {n} start");
            assert_eq!(frac(&img.hi), frac(&target.hi), "gap {n} end");
        }
    }

    #[test]
    fn wandering_arc_is_wandering_within_window() {
        let m = golden_model();
        assert!(m.wandering_check(30).unwrap());
        assert!(m.wandering_check(39).unwrap());
        assert!(m.wandering_check(0).unwrap());
        assert!(m.wandering_check(40).is_err());
        let img = m.phi.image_arc(&m.wandering_arc);
        assert!(!circle_arcs_intersect(&img, &m.wandering_arc));
    }

    #[test]
    fn oversized_arcs_fail_wandering() {
        // rotation with a fat fake central arc: overlap shows up at k = 5,
        // a convergent denominator (3/5 approximates the golden angle)
        let p = golden(20).unwrap();
        let r = PiecewiseCircleMap::rotation(&p.value());
        let fat = RatInterval::new(rat(-1, 20), rat(1, 20));
        assert!(!wandering_check_arcs(&r, &fat, 10));
        assert!(wandering_check_arcs(&r, &fat, 4));
    }

    #[test]
    fn model_rotation_number_brackets_convergent() {
        let m = golden_model();
        let est = rotation_number_estimate(&m.phi, &rat(1, 2), 10_000).unwrap();
        assert!(est.contains(&m.param.value()), "[{}, {}]", est.lo, est.hi);
        let est2 = rotation_number_estimate(&m.phi, &rat(1, 5), 10_000).unwrap();
        assert!(est.intersects(&est2));
    }

    #[test]
    fn semiconjugacy_basics() {
        let m = golden_model();
        assert_eq!(m.semiconj_h(&Rat::zero()).unwrap(), Rat::zero());
        let w = &m.wandering_arc.hi;
        assert_eq!(m.semiconj_h(&(w / rat_int(2))).unwrap(), Rat::zero());
        assert_eq!(m.semiconj_h(&frac(&(-w / rat_int(3)))).unwrap(), Rat::zero());
        let rho = m.param.value();
        for n in [-3i64, 1, 5, 17] {
            let arc = &m.gap_index[&n];
            let mid = arc.midpoint();
            assert_eq!(m.semiconj_h(&frac(&mid)).unwrap(), frac(&(rat_int(n) * &rho)));
        }
        assert!(m.semiconj.sup_deviation.is_positive());
        assert!(m.semiconj.sup_deviation < Rat::one());
    }

    #[test]
    fn semiconjugacy_intertwines_on_tracked_gaps() {
        let m = golden_model();
        let rho = m.param.value();
        let mut count = 0;
        for n in -40..40i64 {
            let arc = &m.gap_index[&n];
            for t in [rat(1, 3), rat(1, 2)] {
                let x = frac(&(&arc.lo + arc.length() * t));
                let lhs = m.semiconj_h(&m.phi.apply(&x)).unwrap();
                let rhs = frac(&(m.semiconj_h(&x).unwrap() + &rho));
                assert_eq!(lhs, rhs, "gap {n}");
                count += 1;
            }
        }
        assert!(count >= 100);
    }

    #[test]
    fn semiconjugacy_monotone_degree_one() {
        let m = golden_model();
        let h = &m.semiconj.h;
        let mut prev = h.apply_lift(&Rat::zero());
        for i in 1..=500 {
            let x = rat(i, 500);
            let v = h.apply_lift(&x);
            assert!(v >= prev);
            prev = v;
        }
        assert_eq!(h.apply_lift(&Rat::one()), h.apply_lift(&Rat::zero()) + Rat::one());
    }

    #[test]
    fn untracked_gap_detected() {
        let m = golden_model();
        let rho = m.param.value();
        let t = frac(&(rat_int(41) * &rho));
        let x = m.h_preimage(&t).unwrap();
        match m.semiconj_h(&x) {
            Err(Error::OutsideWindow(j)) => assert_eq!(j, 41),
            other => panic!("expected window error, got {:?}", other),
        }
        // a mid-cell angle passes
        let q = i64::try_from(&m.param.convergent_den).unwrap();
        let good = rat(2 * 100 + 1, 2 * q);
        let x2 = m.h_preimage(&good).unwrap();
        assert!(m.semiconj_h(&x2).is_ok());
    }

    #[test]
    fn fold_shape() {
        let m = golden_model();
        let fold = m.fold();
        assert_eq!(fold.eval(&Rat::zero()), m.tau);
        assert_eq!(fold.eval(&m.i_halfwidth), Rat::zero());
        assert_eq!(fold.eval(&-m.i_halfwidth.clone()), Rat::zero());
        let y = &m.tau / rat_int(3);
        let u = fold.preimage_right(&y);
        assert_eq!(fold.eval_quad(&u).as_rational(), Some(y));
    }

    #[test]
    fn build_rejects_bad_parameters() {
        let p = golden(20).unwrap();
        assert!(build_denjoy(&p, 40, &rat(3, 2), &rat(17, 18)).is_err());
        assert!(build_denjoy(&p, 0, &rat(1, 2), &rat(17, 18)).is_err());
        assert!(build_denjoy(&p, 40, &rat(1, 2), &rat(19, 18)).is_err());
        assert!(build_denjoy(&p, 6000, &rat(1, 2), &rat(17, 18)).is_err());
    }

    #[test]
    fn model_json_dump_is_deterministic() {
        let m = golden_model();
        let a = serde_json::to_string(&model_to_json(m)).unwrap();
        let b = serde_json::to_string(&model_to_json(m)).unwrap();
        assert_eq!(a, b);
        assert!(a.contains("\"gap_budget\":40"));
    }
}
