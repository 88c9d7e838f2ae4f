//! Certified rational representation of the irrational rotation angle and
//! the derived exact quantities: the ceiling deficits `alpha_n`, the
//! rotation vectors `rho_{m,n}`, and pair admissibility.
//!
//! The angle is stored as a continued-fraction convergent `p/q` together
//! with an error bound tight enough to certify, index by index, that every
//! ceiling `ceil(n * angle)` computed from `p/q` equals the true value.

use num::{BigInt, One, Signed, Zero};

use crate::exact::{ceil_int, rat_int};
use crate::geometry::PlanarRational;
use crate::{Error, Rat, Result};

/// Certified convergent stand-in for an irrational angle in (0,1).
#[derive(Debug, Clone)]
pub struct IrrationalParam {
    /// Continued-fraction coefficients actually consumed (the prefix).
    pub cf_coeffs: Vec<u64>,
    pub convergent_num: BigInt,
    pub convergent_den: BigInt,
    /// Exact upper bound on |angle - p/q|.
    pub error_bound: Rat,
    /// Ceilings `ceil(m * angle)` are certified equal to `ceil(m * p/q)` for `1 <= m <= max_safe_index`.
    pub max_safe_index: i64,
}

/// Exact value of `alpha_n = ceil(n*angle) - n*angle` at a certified index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AlphaValue {
    pub value: Rat,
    pub index: i64,
}

/// Evaluate the convergent of `[0; c_1, ..., c_depth]` by the standard recurrence.
fn convergent(coeffs: &[u64], depth: usize) -> (BigInt, BigInt) {
    // h_{-1}=1, h_0=0, k_{-1}=0, k_0=1
    let mut h_prev = BigInt::one();
    let mut h = BigInt::zero();
    let mut k_prev = BigInt::zero();
    let mut k = BigInt::one();
    for &c in &coeffs[..depth] {
        let c = BigInt::from(c);
        let h_next = &c * &h + &h_prev;
        let k_next = &c * &k + &k_prev;
        h_prev = h;
        h = h_next;
        k_prev = k;
        k = k_next;
    }
    (h, k)
}

/// Build a certified parameter from a continued-fraction prefix.
///
/// `depth` coefficients are consumed; the certification scan caps
/// `max_safe_index` at `q - 1` (the ceiling at `m = q` is never certifiable).
pub fn build_param(cf_coeffs: &[u64], depth: usize) -> Result<IrrationalParam> {
    if cf_coeffs.iter().take(depth).any(|&c| c == 0) {
        return Err(Error::NonPositiveCoefficient);
    }
    if depth > cf_coeffs.len() || depth == 0 {
        return Err(Error::DepthExceedsCoefficients { needed: depth.max(1), available: cf_coeffs.len() });
    }
    let (p, q) = convergent(cf_coeffs, depth);
    let value = Rat::new(p.clone(), q.clone());
    if value <= Rat::zero() || value >= Rat::one() {
        return Err(Error::ConvergentOutOfRange { value: format!("{}/{}", p, q) });
    }
    // |angle - p_d/q_d| < 1/(q_d * q_{d+1}); with the next coefficient unknown
    // the worst case q_{d+1} = q_d + q_{d-1} still gives a valid bound.
    let (_, q_prev) = convergent(cf_coeffs, depth - 1);
    let q_next = if depth < cf_coeffs.len() {
        let (_, qn) = convergent(cf_coeffs, depth + 1);
        qn
    } else {
        &q + &q_prev
    };
    let error_bound = Rat::new(BigInt::one(), &q * &q_next);

    // Certification scan: ceil(m*angle) = ceil(m*p/q) whenever the open
    // interval of radius m*error_bound around m*p/q contains no integer.
    // With error_bound = 1/(q*q_next) this reduces to the integer test
    // min(mp mod q, q - mp mod q) * q_next > m.
    const SCAN_CAP: i64 = 1_000_000;
    let q_i64 = i64::try_from(&q).unwrap_or(i64::MAX);
    let limit = (q_i64 - 1).min(SCAN_CAP);
    let mut max_safe = 0i64;
    if let (Ok(p_u), Ok(q_u), Ok(qn_u)) =
        (u128::try_from(&p), u128::try_from(&q), u128::try_from(&q_next))
    {
        let mut residue: u128 = 0;
        for m in 1..=limit {
            residue = (residue + p_u) % q_u;
            let dist = residue.min(q_u - residue);
            if dist.checked_mul(qn_u).map(|d| d > m as u128).unwrap_or(true) {
                max_safe = m;
            } else {
                break;
            }
        }
    } else {
        let mut residue = BigInt::zero();
        for m in 1..=limit {
            residue = (&residue + &p) % &q;
            let dist = (&residue).min(&(&q - &residue)).clone();
            if dist * &q_next > BigInt::from(m) {
                max_safe = m;
            } else {
                break;
            }
        }
    }
    Ok(IrrationalParam {
        cf_coeffs: cf_coeffs[..depth].to_vec(),
        convergent_num: p,
        convergent_den: q,
        error_bound,
        max_safe_index: max_safe,
    })
}

impl IrrationalParam {
    /// The rational stand-in `p/q` for the angle.
    pub fn value(&self) -> Rat {
        Rat::new(self.convergent_num.clone(), self.convergent_den.clone())
    }

    fn check_index(&self, n: i64) -> Result<()> {
        if n < 1 || n > self.max_safe_index {
            Err(Error::CertificationRange { index: n, max_safe: self.max_safe_index })
        } else {
            Ok(())
        }
    }

    /// `alpha_n = ceil(n*angle) - n*angle`, exact at a certified index.
    pub fn alpha(&self, n: i64) -> Result<AlphaValue> {
        self.check_index(n)?;
        let scaled = rat_int(n) * self.value();
        let value = Rat::from_integer(ceil_int(&scaled)) - scaled;
        debug_assert!(value.is_positive() && value < Rat::one());
        Ok(AlphaValue { value, index: n })
    }

    /// Certified `ceil(n * angle)` as an integer.
    pub fn ceil_multiple(&self, n: i64) -> Result<BigInt> {
        self.check_index(n)?;
        Ok(ceil_int(&(rat_int(n) * self.value())))
    }

    /// The vector `rho_{m,n} = (ceil(m*angle), ceil(n*angle)) / (m+n+1)`.
    pub fn rho_vec(&self, m: i64, n: i64) -> Result<PlanarRational> {
        let cm = self.ceil_multiple(m)?;
        let cn = self.ceil_multiple(n)?;
        let den = BigInt::from(m + n + 1);
        Ok(PlanarRational::new(Rat::new(cm, den.clone()), Rat::new(cn, den)))
    }

    /// True iff `alpha_m < angle` and `alpha_n < angle`.
    ///
    /// Deciding `alpha_m < angle` against the convergent transfers to the true
    /// angle only when index `m+1` is also certified, hence the stricter range.
    pub fn is_admissible(&self, m: i64, n: i64) -> Result<bool> {
        self.check_index(m)?;
        self.check_index(n)?;
        for &i in &[m, n] {
            if i + 1 > self.max_safe_index {
                return Err(Error::CertificationRange { index: i + 1, max_safe: self.max_safe_index });
            }
        }
        let rho = self.value();
        Ok(self.alpha(m)?.value < rho && self.alpha(n)?.value < rho)
    }

    /// All indices `1..=limit` with `alpha_i < angle`.
    pub fn admissible_indices(&self, limit: i64) -> Result<Vec<i64>> {
        let mut out = Vec::new();
        for i in 1..=limit {
            if self.is_admissible(i, i)? {
                out.push(i);
            }
        }
        Ok(out)
    }
}

/// Golden-conjugate fixture: `[0; 1, 1, 1, ...]` at the given depth.
pub fn golden(depth: usize) -> Result<IrrationalParam> {
    build_param(&vec![1u64; depth], depth)
}

/// Silver fixture `sqrt(2) - 1`: `[0; 2, 2, 2, ...]` at the given depth.
pub fn silver(depth: usize) -> Result<IrrationalParam> {
    build_param(&vec![2u64; depth], depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    /// Independent 50-digit fixed-point oracle for the golden conjugate
    /// (sqrt(5)-1)/2, built from an integer square root only.
    pub(crate) fn golden_digits_oracle() -> BigInt {
        // floor(10^50 * (sqrt(5)-1)/2) = floor((sqrt(5*10^100) - 10^50)/2)
        let ten50 = BigInt::from(10u32).pow(50);
        let five = BigInt::from(5u32) * (&ten50 * &ten50);
        let root = crate::exact::isqrt(&five);
        (root - &ten50) / BigInt::from(2u32)
    }

    /// alpha_m from the digit oracle: ceil(m*rho) - m*rho at 50 digits, as a
    /// rational with denominator 10^50 (truncation makes it a lower bound
    /// within 10^-50, far below every comparison margin used here).
    fn alpha_oracle(m: i64) -> Rat {
        let ten50 = BigInt::from(10u32).pow(50);
        let scaled = golden_digits_oracle() * BigInt::from(m);
        // scaled = floor-ish of m*rho*10^50; rho irrational so never integral
        let ceil = (&scaled / &ten50) + BigInt::one();
        Rat::from_integer(ceil) - Rat::new(scaled, ten50)
    }

    #[test]
    fn golden_convergent_depth_20() {
        let p = golden(20).unwrap();
        assert_eq!(p.convergent_num, BigInt::from(6765));
        assert_eq!(p.convergent_den, BigInt::from(10946));
        // rho ~ 0.6180339887; the convergent is within 1/(q*q') ~ 5.2e-9
        let approx = rat(6180339887, 10_000_000_000);
        assert!((p.value() - approx).abs() < rat(1, 100_000_000));
        assert_eq!(p.max_safe_index, 10945);
    }

    #[test]
    fn silver_pell_convergents() {
        // Pell denominators: [0;2^11] = 5741/13860, [0;2^12] = 13860/33461.
        let p11 = silver(11).unwrap();
        assert_eq!(p11.convergent_num, BigInt::from(5741));
        assert_eq!(p11.convergent_den, BigInt::from(13860));
        let p12 = silver(12).unwrap();
        assert_eq!(p12.convergent_num, BigInt::from(13860));
        assert_eq!(p12.convergent_den, BigInt::from(33461));
    }

    #[test]
    fn unit_convergent_rejected() {
        // [0;1] = 1/1 sits on the boundary of (0,1)
        match build_param(&[1], 1) {
            Err(Error::ConvergentOutOfRange { .. }) => {}
            other => panic!("expected range error, got {:?}", other),
        }
    }

    #[test]
    fn depth_beyond_available_rejected() {
        assert!(matches!(
            build_param(&[1, 1], 5),
            Err(Error::DepthExceedsCoefficients { .. })
        ));
    }

    #[test]
    fn alpha_values_match_50_digit_oracle() {
        let p = golden(20).unwrap();
        // frozen from the digit oracle: alpha_1 ~ 0.3819660113, alpha_2 ~ 0.7639320225, alpha_3 ~ 0.1458980338
        let cases = [
            (1, rat(3819660113u64 as i64, 10_000_000_000)),
            (2, rat(7639320225u64 as i64, 10_000_000_000)),
            (3, rat(1458980338u64 as i64, 10_000_000_000)),
        ];
        for (n, expect) in cases {
            let a = p.alpha(n).unwrap().value;
            assert!((a - &expect).abs() < rat(1, 10_000_000), "alpha_{n}");
            let oracle = alpha_oracle(n);
            assert!((oracle - expect).abs() < rat(1, 1_000_000_000));
        }
    }

    #[test]
    fn alpha_beyond_certified_range_errors() {
        let p = golden(20).unwrap();
        assert!(p.alpha(10946).is_err());
        assert!(p.alpha(0).is_err());
    }

    #[test]
    fn rho_vec_examples() {
        let p = golden(20).unwrap();
        let v11 = p.rho_vec(1, 1).unwrap();
        assert_eq!(v11.x, rat(1, 3));
        assert_eq!(v11.y, rat(1, 3));
        let v13 = p.rho_vec(1, 3).unwrap();
        assert_eq!(v13.x, rat(1, 5));
        assert_eq!(v13.y, rat(2, 5));
        let v31 = p.rho_vec(3, 1).unwrap();
        assert_eq!((v31.x, v31.y), (v13.y, v13.x));
    }

    #[test]
    fn admissibility_examples_and_symmetry() {
        let p = golden(20).unwrap();
        assert!(p.is_admissible(1, 1).unwrap());
        assert!(!p.is_admissible(2, 5).unwrap());
        for m in 1..=50 {
            for n in 1..=50 {
                assert_eq!(p.is_admissible(m, n).unwrap(), p.is_admissible(n, m).unwrap());
            }
        }
    }

    #[test]
    fn golden_admissible_set_up_to_20() {
        let p = golden(20).unwrap();
        let set = p.admissible_indices(20).unwrap();
        assert_eq!(set, vec![1, 3, 4, 6, 8, 9, 11, 12, 14, 16, 17, 19]);
        // cross-check every index against the 50-digit oracle
        let rho_lo = Rat::new(golden_digits_oracle(), BigInt::from(10u32).pow(50));
        for i in 1..=20 {
            let oracle_admissible = alpha_oracle(i) < rho_lo;
            assert_eq!(set.contains(&i), oracle_admissible, "index {i}");
        }
    }

    #[test]
    fn alpha_consistent_across_depths() {
        let p20 = golden(20).unwrap();
        let p25 = golden(25).unwrap();
        for n in 1..=200 {
            assert_eq!(
                p20.alpha(n).unwrap().value + rat_int(n) * p20.value(),
                p25.alpha(n).unwrap().value + rat_int(n) * p25.value(),
                "ceil(n*rho) must agree across depths at n={n}"
            );
        }
    }

    #[test]
    fn rho_vec_expansion_identity() {
        // x-coordinate equals (m*rho + alpha_m)/(m+n+1) exactly in the convergent.
        let p = golden(20).unwrap();
        for (m, n) in [(1, 1), (3, 4), (8, 9), (12, 17)] {
            let v = p.rho_vec(m, n).unwrap();
            let lhs = v.x;
            let rhs = (rat_int(m) * p.value() + p.alpha(m).unwrap().value) / rat_int(m + n + 1);
            assert_eq!(lhs, rhs);
        }
    }
}
