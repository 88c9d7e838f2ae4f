//! Rotation-set assembly: certified rotation vectors from the first-return
//! structure, empirical orbit averages from deterministic start samples, and
//! the comparison of both against the analytic hulls.
//!
//! Free starts ride grid cosets that provably never meet a fold, so their
//! averages carry the exact transport telescope; periodic starts are
//! evaluated through their certified period. The finite-horizon slack
//! `2B/horizon` is stated explicitly, with `B` the adapted transport bound.

use num::{One, Signed, Zero};
use serde::Serialize;
use serde_json::Value;

use crate::circlemap::DenjoyModel;
use crate::exact::{decimal_string, rat_int, ratio_string, RatInterval};
use crate::geometry::{
    closure_points, convex_hull, hausdorff, omega_set, HullPolygon, PlanarRational,
};
use crate::skeleton::{
    adapted_transport_bound, free_start, iterate_snapped, rotation_vector_exact, Axis,
    LiftedSkeletonPoint, OrbitClassification, OrbitKind,
};
use crate::{Error, Rat, Result};

/// One empirical orbit average.
#[derive(Debug, Clone)]
pub struct RotationSample {
    pub start: LiftedSkeletonPoint,
    pub steps: i64,
    /// `(end - start) / steps`, exactly as the stepper computed it.
    pub avg_displacement: PlanarRational,
    pub classification: OrbitClassification,
}

/// Deterministic start-point specification.
#[derive(Debug, Clone)]
pub struct SampleSpec {
    /// Certified-free low-discrepancy starts per axis.
    pub per_axis: usize,
    /// Include the periodic points of every admissible pair up to this index.
    pub markov_up_to: i64,
    pub seed: u64,
    /// Dyadic snapping resolution for the long iterations.
    pub grid_log2: u32,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec { per_axis: 100, markov_up_to: 8, seed: 0, grid_log2: 128 }
    }
}

/// Certified rotation vectors up to the truncation: every admissible pair's
/// periodic-orbit vector (cross-checked through the orbit and the transport
/// identities) plus the two free-orbit limit vectors.
pub fn certified_cloud(model: &DenjoyModel, n_trunc: i64) -> Result<Vec<PlanarRational>> {
    let mut out = Vec::new();
    for m in 1..=n_trunc {
        for n in 1..=n_trunc {
            if model.param.is_admissible(m, n)? {
                out.push(rotation_vector_exact(model, m, n)?);
            }
        }
    }
    // free-orbit certificates: the constructed starts ride mid-cell cosets,
    // so their limit averages are exactly the axis vectors
    for axis in [Axis::H, Axis::V] {
        free_start(model, axis, &(rat_int(1) / rat_int(3)))?;
    }
    let [c_0rho, c_rho0] = closure_points(&model.param);
    out.push(c_0rho);
    out.push(c_rho0);
    Ok(out)
}

/// Deterministic low-discrepancy angles, snapped to certified-free cells.
fn sample_angles(model: &DenjoyModel, count: usize, seed: u64) -> Vec<Rat> {
    let rho = model.param.value();
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let k = (i as i64) + 1 + (seed as i64);
        let t = crate::exact::frac(&(rat_int(k) * &rho));
        out.push(model.certified_free_angle(&t));
    }
    out
}

/// Evaluate the empirical orbit sample set.
///
/// Free starts are stepped with dyadic snapping for the full horizon and
/// must never fold (their coset certificate guarantees it; a fold is an
/// internal error). Periodic starts are evaluated through their certified
/// period, with the horizon rounded down to a period multiple.
pub fn empirical_cloud(
    model: &DenjoyModel,
    spec: &SampleSpec,
    horizon: i64,
) -> Result<Vec<RotationSample>> {
    if horizon < 1 {
        return Err(Error::InvalidParameter("horizon must be positive".into()));
    }
    let mut out = Vec::new();
    for axis in [Axis::H, Axis::V] {
        for angle in sample_angles(model, spec.per_axis, spec.seed) {
            let start_pt = free_start(model, axis, &angle)?;
            let start = LiftedSkeletonPoint::from_base(start_pt);
            let (end, folds) = iterate_snapped(model, &start, horizon, spec.grid_log2);
            if folds != 0 {
                return Err(Error::Consistency(
                    "certified free start folded during iteration".into(),
                ));
            }
            let (sx, sy) = start.position();
            let (ex, ey) = end.position();
            let n = rat_int(horizon);
            let avg = PlanarRational::new((ex - sx) / &n, (ey - sy) / &n);
            let kind = match axis {
                Axis::H => OrbitKind::FreeH,
                Axis::V => OrbitKind::FreeV,
            };
            out.push(RotationSample {
                start,
                steps: horizon,
                avg_displacement: avg,
                classification: OrbitClassification {
                    kind,
                    segments: Vec::new(),
                    horizon_used: horizon,
                },
            });
        }
    }
    for m in 1..=spec.markov_up_to {
        for n in 1..=spec.markov_up_to {
            if !model.param.is_admissible(m, n)? {
                continue;
            }
            let period = m + n + 1;
            if horizon < period {
                continue;
            }
            let vector = rotation_vector_exact(model, m, n)?;
            let tol = Rat::new(num::BigInt::one(), num::BigInt::from(10u64).pow(12));
            let fp = crate::skeleton::fixed_point_in_k(model, m, n, &tol)?;
            let start = LiftedSkeletonPoint::from_base(fp);
            let cycles = horizon / period;
            out.push(RotationSample {
                start,
                steps: cycles * period,
                avg_displacement: vector,
                classification: OrbitClassification {
                    kind: OrbitKind::Interacting,
                    segments: vec![(m, n); cycles.min(8) as usize],
                    horizon_used: cycles * period,
                },
            });
        }
    }
    Ok(out)
}

/// Outcome of the empirical-versus-analytic comparison.
#[derive(Debug, Clone, Serialize)]
pub struct ComparisonReport {
    pub n_trunc: i64,
    pub horizon: i64,
    pub certified_count: usize,
    pub sample_count: usize,
    /// `2B/horizon` with `B` the adapted transport bound, as `num/den`.
    pub slack: String,
    pub slack_decimal: String,
    /// Certified upper bound on the Hausdorff distance between the combined
    /// hull and the analytic truncation.
    pub hausdorff_bound: String,
    pub hausdorff_decimal: String,
    /// Indices of samples whose average leaves the slack-inflated hull.
    pub containment_violations: Vec<usize>,
}

/// Compare the combined certified and empirical cloud against the analytic
/// truncated hull (with its closure points adjoined).
pub fn compare_to_analytic(
    model: &DenjoyModel,
    n_trunc: i64,
    samples: &[RotationSample],
    horizon: i64,
) -> Result<ComparisonReport> {
    let analytic = omega_set(&model.param, n_trunc, true)?;
    let certified = certified_cloud(model, n_trunc)?;
    let mut cloud = certified.clone();
    for s in samples {
        cloud.push(s.avg_displacement.clone());
    }
    let empirical_hull = convex_hull(&cloud)?;
    let hd = hausdorff(&empirical_hull, &analytic)?;
    let bound = adapted_transport_bound(model)?;
    let slack = rat_int(2) * &bound / rat_int(horizon.max(1));
    let slack_sq = &slack * &slack;
    let mut violations = Vec::new();
    for (i, s) in samples.iter().enumerate() {
        let d_sq = analytic.dist_sq_to_point(&s.avg_displacement);
        if d_sq > slack_sq {
            violations.push(i);
        }
    }
    Ok(ComparisonReport {
        n_trunc,
        horizon,
        certified_count: certified.len(),
        sample_count: samples.len(),
        slack: ratio_string(&slack),
        slack_decimal: decimal_string(&slack, 12),
        hausdorff_bound: ratio_string(&hd),
        hausdorff_decimal: decimal_string(&hd, 12),
        containment_violations: violations,
    })
}

/// Worst deviation of the free samples from their axis vectors.
pub fn free_axis_deviation(model: &DenjoyModel, samples: &[RotationSample]) -> Result<Rat> {
    let rho = model.param.value();
    let mut worst = Rat::zero();
    for s in samples {
        let target = match s.classification.kind {
            OrbitKind::FreeH => PlanarRational::new(rho.clone(), Rat::zero()),
            OrbitKind::FreeV => PlanarRational::new(Rat::zero(), rho.clone()),
            OrbitKind::Interacting => continue,
        };
        let dx = (&s.avg_displacement.x - &target.x).abs();
        let dy = (&s.avg_displacement.y - &target.y).abs();
        let dev = if dx > dy { dx } else { dy };
        if dev > worst {
            worst = dev;
        }
    }
    Ok(worst)
}

/// CSV dump of a sample cloud plus the certified points.
pub fn cloud_csv(model: &DenjoyModel, n_trunc: i64, samples: &[RotationSample]) -> Result<String> {
    let mut out = String::from("x_num,x_den,y_num,y_den,x_dec,y_dec,classification\n");
    let mut push = |p: &PlanarRational, class: &str| {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            p.x.numer(),
            p.x.denom(),
            p.y.numer(),
            p.y.denom(),
            decimal_string(&p.x, 12),
            decimal_string(&p.y, 12),
            class,
        ));
    };
    for p in certified_cloud(model, n_trunc)? {
        push(&p, "certified");
    }
    for s in samples {
        let class = match s.classification.kind {
            OrbitKind::FreeH => "free_h",
            OrbitKind::FreeV => "free_v",
            OrbitKind::Interacting => "interacting",
        };
        push(&s.avg_displacement, class);
    }
    Ok(out)
}

/// JSON form of a comparison report.
pub fn report_json(report: &ComparisonReport) -> Value {
    serde_json::to_value(report).expect("report serializes")
}

/// Hull of the certified cloud (used by equality checks).
pub fn certified_hull(model: &DenjoyModel, n_trunc: i64) -> Result<HullPolygon> {
    convex_hull(&certified_cloud(model, n_trunc)?)
}

/// Slack-inflated containment test shared with the acceptance suite.
pub fn within_inflated_hull(hull: &HullPolygon, p: &PlanarRational, slack: &Rat) -> bool {
    hull.dist_sq_to_point(p) <= slack * slack
}

/// Symmetric bracket around a target value.
pub fn slack_interval(center: &Rat, slack: &Rat) -> RatInterval {
    RatInterval::new(center - slack, center + slack)
}
