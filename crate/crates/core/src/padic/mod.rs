//! Exact p-adic arithmetic at capped working precision.
//!
//! The module is organized as a tower of layers:
//!
//! * [`ff`] — finite fields and polynomial factorization over them;
//! * [`field`] — local fields as towers of unramified/Eisenstein steps over
//!   `Q_p`, with flat integral element vectors;
//! * [`poly`] — polynomials over a local field, Newton polygons, Hensel
//!   lifting;
//! * [`factor`] — certified factorization of squarefree polynomials;
//! * [`ram`] — ramification filtrations, extension enumeration, subfield
//!   tests.
//!
//! All arithmetic runs at a fixed precision chosen when the base `Q_p` is
//! built. Failures that more digits could cure surface as
//! [`Error::PrecisionCeiling`](crate::Error::PrecisionCeiling); the
//! [`with_precision`] driver owns the retry loop, starting at 32 digits and
//! doubling up to a ceiling (default `2^13`, overridable through the
//! `GALOIS_PRECISION_CEILING` environment variable).

pub mod factor;
pub mod ff;
pub mod field;
pub mod poly;
pub mod ram;

pub use factor::{factor_squarefree, roots_in};
pub use field::{Elt, LocalField, StepKind};
pub use poly::{newton_polygon, LPoly, NewtonPolygon};
pub use ram::{
    enumerate_extensions, is_subfield, ramification_filtration, RamificationData, SegmentKind,
};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::Error;

/// A single p-adic scalar in valuation/unit form, the external exchange
/// format for elements of `Q_p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PadicNumber {
    pub p: u64,
    /// `None` encodes "zero to working precision".
    pub valuation: Option<i64>,
    /// The unit part, reduced modulo `p^precision`; not divisible by `p`
    /// unless the value is zero.
    pub unit: BigInt,
    pub precision: u32,
}

impl PadicNumber {
    /// Reads a `Q_p` element out of its flat representation.
    pub fn from_elt(k: &LocalField, x: &Elt) -> Self {
        assert!(k.base().is_none(), "PadicNumber is a Q_p scalar format");
        let p = k.p();
        match k.val(x) {
            None => PadicNumber {
                p,
                valuation: None,
                unit: BigInt::zero(),
                precision: k.nprec(),
            },
            Some(v) => {
                let unit = &x[0] / BigInt::from(p).pow(v as u32);
                PadicNumber {
                    p,
                    valuation: Some(v),
                    unit: unit.mod_floor(k.pmod()),
                    precision: k.nprec(),
                }
            }
        }
    }

    /// Writes the scalar back into a field at compatible precision.
    pub fn to_elt(&self, k: &LocalField) -> Elt {
        match self.valuation {
            None => k.zero(),
            Some(v) => {
                let n = &self.unit * BigInt::from(self.p).pow(v as u32);
                k.from_bigint(&n)
            }
        }
    }
}

/// The hard precision ceiling in p-adic digits.
pub fn precision_ceiling() -> u32 {
    std::env::var("GALOIS_PRECISION_CEILING")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(1 << 13)
}

/// Starting working precision for [`with_precision`].
pub const INITIAL_PRECISION: u32 = 32;

/// Runs a computation against `Q_p`, doubling the working precision and
/// retrying whenever it reports a precision failure, up to the ceiling.
pub fn with_precision<T>(
    p: u64,
    mut op: impl FnMut(&LocalField) -> Result<T, Error>,
) -> Result<T, Error> {
    let ceiling = precision_ceiling();
    let mut nprec = INITIAL_PRECISION;
    loop {
        let k = LocalField::qp(p, nprec);
        match op(&k) {
            Err(Error::PrecisionCeiling(msg)) => {
                if nprec >= ceiling {
                    return Err(Error::PrecisionCeiling(msg));
                }
                nprec = (nprec * 2).min(ceiling);
            }
            other => return other,
        }
    }
}

/// Interprets integer coefficients as a polynomial over a local field.
pub fn lpoly_from_bigints(k: &LocalField, coeffs: &[BigInt]) -> LPoly {
    coeffs.iter().map(|c| k.from_bigint(c)).collect()
}

/// Whether a rational-coefficient polynomial is squarefree, decided exactly
/// over `Q` by `gcd(F, F')`.
pub fn is_squarefree_q(coeffs: &[BigRational]) -> bool {
    let trim = |mut a: Vec<BigRational>| {
        while a.len() > 1 && a.last().unwrap().is_zero() {
            a.pop();
        }
        a
    };
    let mut a = trim(coeffs.to_vec());
    if a.len() <= 2 {
        return a.iter().any(|c| !c.is_zero());
    }
    let mut b: Vec<BigRational> = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c * BigRational::from(BigInt::from(i)))
        .collect();
    b = trim(b);
    // Euclidean gcd over Q.
    while b.len() > 1 || !b[0].is_zero() {
        if b.len() == 1 {
            return true; // gcd is a nonzero constant
        }
        let db = b.len() - 1;
        let lead = b[db].clone();
        let mut r = a.clone();
        while r.len() > db && (r.len() > 1 || !r[0].is_zero()) {
            let dr = r.len() - 1;
            if dr < db {
                break;
            }
            let q = &r[dr] / &lead;
            for i in 0..=db {
                let t = &q * &b[i];
                r[dr - db + i] = &r[dr - db + i] - t;
            }
            r = trim(r);
            if r.len() - 1 == dr && !r[dr].is_zero() {
                break;
            }
        }
        a = b;
        b = trim(r);
    }
    a.len() == 1 && !a[0].is_zero()
}

/// Clears denominators and makes a rational polynomial monic-integral by the
/// substitution `x -> x / c`, returning the integer coefficients of the
/// rescaled polynomial (same splitting behavior, scaled roots).
pub fn monic_integral_model(coeffs: &[BigRational]) -> Result<Vec<BigInt>, Error> {
    let mut a = coeffs.to_vec();
    while a.len() > 1 && a.last().unwrap().is_zero() {
        a.pop();
    }
    let d = a.len() - 1;
    if d == 0 || a[d].is_zero() {
        return Err(Error::invalid("polynomial must have positive degree"));
    }
    let lead = a[d].clone();
    let monic: Vec<BigRational> = a.iter().map(|c| c / &lead).collect();
    // Common denominator of the monic coefficients.
    let mut den = BigInt::from(1);
    for c in &monic {
        den = den.lcm(c.denom());
    }
    // x -> x / den multiplies coefficient i by den^(d - i).
    Ok(monic
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let scaled = c * BigRational::from(den.pow((d - i) as u32));
            debug_assert!(scaled.denom().abs() == BigInt::from(1));
            scaled.numer().clone()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use poly::pdeg;

    fn bigs(cs: &[i64]) -> Vec<BigInt> {
        cs.iter().map(|&c| BigInt::from(c)).collect()
    }

    fn rats(cs: &[i64]) -> Vec<BigRational> {
        cs.iter().map(|&c| BigRational::from(BigInt::from(c))).collect()
    }

    #[test]
    fn squarefree_detection() {
        assert!(is_squarefree_q(&rats(&[-2, 0, 1])));
        assert!(is_squarefree_q(&rats(&[1, 1, 1])));
        assert!(!is_squarefree_q(&rats(&[1, 2, 1]))); // (x+1)^2
        assert!(!is_squarefree_q(&rats(&[0, 0, 1]))); // x^2
        assert!(is_squarefree_q(&rats(&[0, 1, 1]))); // x(x+1)
        assert!(is_squarefree_q(&rats(&[5, 1]))); // linear
    }

    #[test]
    fn monic_integral_models() {
        // 2x^2 - 1 -> x^2 - 2 (x -> x/2).
        let half = monic_integral_model(&rats(&[-1, 0, 2])).unwrap();
        assert_eq!(half, bigs(&[-2, 0, 1]));
        let id = monic_integral_model(&rats(&[-2, 0, 1])).unwrap();
        assert_eq!(id, bigs(&[-2, 0, 1]));
    }

    #[test]
    fn precision_doubling_keeps_factor_degrees() {
        // Degree <= 8 corpus over Q_2, Q_3, Q_5: the factor degree multiset
        // must be identical at 32 and 64 digits.
        let corpus: Vec<Vec<i64>> = vec![
            vec![-2, 0, 1],
            vec![1, 1, 1],
            vec![2, 1, 1],
            vec![-2, 0, 0, 1],
            vec![1, 1, 0, 0, 1],
            vec![-2, 0, 0, 0, 1],
            vec![1, 0, 0, 0, 1],
            vec![-2, 0, 0, 0, 0, 1],
            vec![-2, 0, 0, 0, 0, 0, 1],
            vec![-2, 0, 0, 0, 0, 0, 0, 1],
            vec![-2, 0, 0, 0, 0, 0, 0, 0, 1],
            vec![1, 1, 0, 0, 0, 0, 0, 0, 1],
        ];
        for p in [2u64, 3, 5] {
            for cs in &corpus {
                let mut degs = Vec::new();
                for nprec in [32u32, 64] {
                    let k = LocalField::qp(p, nprec);
                    let f = lpoly_from_bigints(&k, &bigs(cs));
                    let mut ds: Vec<usize> = factor_squarefree(&k, &f)
                        .unwrap()
                        .iter()
                        .map(|q| pdeg(&k, q))
                        .collect();
                    ds.sort_unstable();
                    degs.push(ds);
                }
                assert_eq!(degs[0], degs[1], "p={p} poly={cs:?}");
            }
        }
    }

    #[test]
    fn eisenstein_root_valuation_is_one() {
        for (p, cs) in [(2u64, vec![-2i64, 0, 1]), (2, vec![-2, 0, 0, 1]), (3, vec![3, 3, 1])] {
            let k = LocalField::qp(p, 48);
            let f = lpoly_from_bigints(&k, &bigs(&cs));
            let (towers, _) = ramification_filtration(&k, &f).unwrap();
            let l = towers.last().unwrap();
            for r in roots_in(&k, &f, l).unwrap() {
                assert_eq!(l.val(&r), Some(1));
            }
        }
    }

    #[test]
    fn with_precision_reports_ceiling() {
        let out: Result<(), Error> = with_precision(2, |_k| {
            Err(Error::PrecisionCeiling("always".into()))
        });
        assert!(matches!(out, Err(Error::PrecisionCeiling(_))));
        // And a successful computation just passes through.
        let ok = with_precision(2, |k| Ok(k.p())).unwrap();
        assert_eq!(ok, 2);
    }
}
