//! Resolvent polynomials.
//!
//! Given a global model with overgroup `W` on the leaf roots and a subgroup
//! `U ≤ W`, a *primitive invariant* is a polynomial `I ∈ Z[x_1, …, x_d]`
//! whose stabilizer in `W` is exactly `U`.  The associated *resolvent* is
//!
//! ```text
//!     R(t) = Π_{cU ∈ W/U} (t − (r_c · I)(T(α_1), …, T(α_d)))
//! ```
//!
//! where `α` are the labeled complex leaf roots, `T` is an integral
//! Tschirnhaus transformation, and `r_c` runs over left-coset
//! representatives.  Because the Galois group permutes the leaves inside
//! `W`, the coset values are permuted by every automorphism and `R` has
//! integer coefficients; when `R` is squarefree its `p`-adic factorization
//! mirrors the orbits of the image of the Galois group on `W/U`.
//!
//! The evaluation here is numeric: leaf roots come from
//! [`crate::gtower::complex_roots`] at a precision derived from explicit
//! coefficient bounds, every coefficient of `R` is required to round to an
//! integer within a fixed margin, and squarefreeness is certified over `Q`.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::Result;
use crate::gtower::{self, ceval, complex_roots, Complex, RootLabeling};
use crate::model::GlobalModel;
use crate::perm::{CosetAction, Perm, PermGroup};

/// Total budget of candidate monomials inspected by [`primitive_invariant`]
/// before falling back to the guaranteed invariant.
const MONOMIAL_SEARCH_CAP: usize = 50_000;

/// Number of Tschirnhaus transformations attempted by [`resolvent_for`]
/// before giving up on producing a squarefree resolvent.
const MAX_TSCHIRNHAUS_TRIES: usize = 12;

/// Internal retries (doubling the decimal precision each time) when a
/// resolvent coefficient fails to round to an integer.
const MAX_ROUNDING_RETRIES: u32 = 3;

/// Hard cap on the decimal precision a single resolvent evaluation may
/// request; larger requests indicate an unreasonably large coset index.
const RESOLVENT_DIGITS_CAP: u32 = 20_000;

/// Decimal margin within which every resolvent coefficient must sit next to
/// an integer.
const ROUNDING_MARGIN_DIGITS: u32 = 10;

/// A multivariate polynomial used as a (relative) invariant: a sum of
/// integer-coefficient monomials in `x_1, …, x_d`.
///
/// Terms are kept sorted by exponent vector with merged coefficients, so
/// structural equality is polynomial equality.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Invariant {
    terms: Vec<(i64, Vec<u32>)>,
    dimension: usize,
    total_degree: u32,
}

impl Invariant {
    /// Builds an invariant from raw `(coefficient, exponent vector)` terms
    /// in `dimension` variables.
    pub fn new(dimension: usize, terms: Vec<(i64, Vec<u32>)>) -> Result<Self> {
        if terms.iter().any(|(_, e)| e.len() != dimension) {
            return Err(Error::invalid(
                "invariant exponent vectors must all have the ambient dimension",
            ));
        }
        let terms = normalize_terms(terms);
        if terms.is_empty() {
            return Err(Error::invalid("invariant must be a nonzero polynomial"));
        }
        let total_degree = terms
            .iter()
            .map(|(_, e)| e.iter().sum::<u32>())
            .max()
            .unwrap();
        Ok(Invariant {
            terms,
            dimension,
            total_degree,
        })
    }

    /// The orbit-sum `Σ_{u ∈ U} u·x^e` of one monomial under a group.
    pub fn orbit_sum(u: &PermGroup, exps: &[u32]) -> Result<Self> {
        let mut orbit = BTreeSet::new();
        orbit.insert(exps.to_vec());
        let mut frontier = vec![exps.to_vec()];
        while let Some(e) = frontier.pop() {
            for g in u.gens() {
                let img = apply_perm_to_exps(g, &e);
                if orbit.insert(img.clone()) {
                    frontier.push(img);
                }
            }
        }
        Invariant::new(u.degree(), orbit.into_iter().map(|e| (1, e)).collect())
    }

    /// The sorted, merged term list.
    pub fn terms(&self) -> &[(i64, Vec<u32>)] {
        &self.terms
    }

    /// Number of variables.
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Maximum total degree over all terms.
    pub fn total_degree(&self) -> u32 {
        self.total_degree
    }

    /// The image `w·I`, acting on variables by `x_i ↦ x_{w(i)}`.
    pub fn apply(&self, w: &Perm) -> Invariant {
        let terms = self
            .terms
            .iter()
            .map(|(c, e)| (*c, apply_perm_to_exps(w, e)))
            .collect();
        Invariant {
            terms: normalize_terms(terms),
            dimension: self.dimension,
            total_degree: self.total_degree,
        }
    }

    /// Whether `w·I = I`.
    pub fn is_stabilized_by(&self, w: &Perm) -> bool {
        self.apply(w) == *self
    }
}

fn apply_perm_to_exps(w: &Perm, e: &[u32]) -> Vec<u32> {
    let mut out = vec![0u32; e.len()];
    for (i, &exp) in e.iter().enumerate() {
        out[w.apply(i as u16) as usize] = exp;
    }
    out
}

fn normalize_terms(mut terms: Vec<(i64, Vec<u32>)>) -> Vec<(i64, Vec<u32>)> {
    terms.sort_by(|a, b| a.1.cmp(&b.1));
    let mut out: Vec<(i64, Vec<u32>)> = Vec::with_capacity(terms.len());
    for (c, e) in terms {
        match out.last_mut() {
            Some(last) if last.1 == e => last.0 += c,
            _ => out.push((c, e)),
        }
    }
    out.retain(|(c, _)| *c != 0);
    out
}

/// Finds a polynomial whose stabilizer in `w` is exactly `u`, as an
/// orbit-sum of a single monomial under `u`.
///
/// Candidate monomials are scanned in order of increasing total degree and
/// each orbit-sum is verified against every nontrivial coset of `u` in `w`;
/// if the search budget runs out, the monomial `x_2 x_3² ⋯ x_d^{d−1}`
/// (whose orbit-sum always works) is used.
pub fn primitive_invariant(w: &PermGroup, u: &PermGroup) -> Result<Invariant> {
    let d = w.degree();
    if u.degree() != d {
        return Err(Error::invalid(
            "primitive_invariant requires groups of equal degree",
        ));
    }
    if !w.contains_group(u) {
        return Err(Error::invalid("primitive_invariant requires U ≤ W"));
    }
    if u.order() == w.order() {
        let terms = (0..d)
            .map(|i| {
                let mut e = vec![0u32; d];
                e[i] = 1;
                (1i64, e)
            })
            .collect();
        return Invariant::new(d, terms);
    }

    let ca = CosetAction::new(w, u)?;
    let outside: Vec<&Perm> = (0..ca.index())
        .map(|c| ca.rep(c))
        .filter(|r| !u.contains(r))
        .collect();
    let verify = |inv: &Invariant| outside.iter().all(|r| !inv.is_stabilized_by(r));

    let max_total = d * (d - 1) / 2;
    let mut budget = MONOMIAL_SEARCH_CAP;
    for total in 1..=max_total as u32 {
        let candidates = compositions(total, d, budget);
        budget -= candidates.len();
        for e in candidates {
            // Only test the minimal representative of each U-orbit of
            // monomials; the other members yield the same orbit-sum.
            if !is_orbit_minimum(u, &e) {
                continue;
            }
            let inv = Invariant::orbit_sum(u, &e)?;
            if verify(&inv) {
                return Ok(inv);
            }
        }
        if budget == 0 {
            break;
        }
    }

    let fallback: Vec<u32> = (0..d as u32).collect();
    let inv = Invariant::orbit_sum(u, &fallback)?;
    if verify(&inv) {
        Ok(inv)
    } else {
        Err(Error::invalid(
            "no primitive invariant exists for the given pair of groups",
        ))
    }
}

/// The first `cap` exponent vectors of length `parts` summing to `total`,
/// in lexicographic order.
fn compositions(total: u32, parts: usize, cap: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; parts];
    fn rec(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, pos: usize, left: u32, cap: usize) {
        if out.len() >= cap {
            return;
        }
        if pos + 1 == cur.len() {
            cur[pos] = left;
            out.push(cur.clone());
            return;
        }
        for v in (0..=left).rev() {
            cur[pos] = v;
            rec(out, cur, pos + 1, left - v, cap);
        }
    }
    rec(&mut out, &mut cur, 0, total, cap);
    out
}

fn is_orbit_minimum(u: &PermGroup, e: &[u32]) -> bool {
    let mut seen = BTreeSet::new();
    seen.insert(e.to_vec());
    let mut frontier = vec![e.to_vec()];
    while let Some(cur) = frontier.pop() {
        for g in u.gens() {
            let img = apply_perm_to_exps(g, &cur);
            if img.as_slice() < e {
                return false;
            }
            if seen.insert(img.clone()) {
                frontier.push(img);
            }
        }
    }
    true
}

/// A Tschirnhaus transformation: an integer polynomial applied to every
/// leaf root before the invariant is evaluated, used to escape accidental
/// collisions among resolvent roots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tschirnhaus {
    /// Position in the deterministic sequence (0 is the identity `x`).
    pub counter: u64,
    /// Ascending coefficients of `T`.
    pub coeffs: Vec<i64>,
}

/// The next transformation in the deterministic sequence; `None` yields the
/// identity `T = x`, and successive calls yield pairwise distinct
/// polynomials of slowly growing degree and coefficient size.
pub fn next_tschirnhaus(prev: Option<&Tschirnhaus>) -> Tschirnhaus {
    next_tschirnhaus_seeded(prev, 0)
}

/// As [`next_tschirnhaus`], with the run seed mixed into the generator so
/// different seeds walk different (still deterministic) sequences.  The
/// first transformation is always the identity.
pub fn next_tschirnhaus_seeded(prev: Option<&Tschirnhaus>, seed: u64) -> Tschirnhaus {
    let counter = prev.map_or(0, |t| t.counter + 1);
    tschirnhaus_at(counter, seed)
}

fn tschirnhaus_at(counter: u64, seed: u64) -> Tschirnhaus {
    if counter == 0 {
        return Tschirnhaus {
            counter,
            coeffs: vec![0, 1],
        };
    }
    let mut earlier: Vec<Vec<i64>> = Vec::with_capacity(counter as usize);
    for c in 0..counter {
        earlier.push(tschirnhaus_at(c, seed).coeffs);
    }
    let growth = (counter - 1) / 6;
    let max_degree = 2 + growth as usize;
    let bound = 2 + growth as i64;
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a5e_1c0de ^ counter ^ seed.rotate_left(17));
    loop {
        let degree = rng.gen_range(1..=max_degree);
        let mut coeffs: Vec<i64> = (0..=degree).map(|_| rng.gen_range(-bound..=bound)).collect();
        while coeffs[degree] == 0 {
            coeffs[degree] = rng.gen_range(-bound..=bound);
        }
        if !earlier.contains(&coeffs) {
            return Tschirnhaus { counter, coeffs };
        }
    }
}

/// An integral resolvent together with the data that produced it.
#[derive(Clone, Debug)]
pub struct Resolvent {
    /// Ascending integer coefficients; monic of degree `(W:U)`.
    pub coeffs: Vec<BigInt>,
    /// `(W:U)`.
    pub degree: usize,
    /// The subgroup the resolvent was built for.
    pub u: PermGroup,
    /// The invariant used.
    pub invariant: Invariant,
    /// The Tschirnhaus transformation used.
    pub tschirnhaus: Tschirnhaus,
    /// Decimal precision at which the coefficients were certified.
    pub digits: u32,
}

/// Evaluates the resolvent of `u ≤ W` for the given invariant and
/// Tschirnhaus transformation.
///
/// Fails with [`Error::NotApplicable`] when the rounded resolvent is not
/// squarefree (callers should retry with a fresh Tschirnhaus
/// transformation), and with [`Error::PrecisionCeiling`] when coefficients
/// keep missing integers even after the internal precision doubling — which
/// would indicate that the model does not actually bound the Galois action.
pub fn evaluate_resolvent(
    m: &GlobalModel,
    u: &PermGroup,
    inv: &Invariant,
    t: &Tschirnhaus,
) -> Result<Resolvent> {
    let digits = suggest_digits(m, u, inv, t)?;
    let mut attempt = 0;
    loop {
        match evaluate_at_digits(m, u, inv, t, digits << attempt) {
            Err(Error::PrecisionCeiling(_)) if attempt < MAX_ROUNDING_RETRIES => attempt += 1,
            other => return other,
        }
    }
}

/// Builds a squarefree resolvent for `u`, walking the Tschirnhaus sequence
/// until one succeeds.
pub fn resolvent_for(m: &GlobalModel, u: &PermGroup, inv: &Invariant) -> Result<Resolvent> {
    resolvent_for_seeded(m, u, inv, 0)
}

/// As [`resolvent_for`], with the run seed steering the Tschirnhaus
/// sequence.
pub fn resolvent_for_seeded(
    m: &GlobalModel,
    u: &PermGroup,
    inv: &Invariant,
    seed: u64,
) -> Result<Resolvent> {
    let mut t = next_tschirnhaus_seeded(None, seed);
    for _ in 0..MAX_TSCHIRNHAUS_TRIES {
        match evaluate_resolvent(m, u, inv, &t) {
            Err(Error::NotApplicable(_)) => t = next_tschirnhaus_seeded(Some(&t), seed),
            other => return other,
        }
    }
    Err(Error::Exhausted(format!(
        "no squarefree resolvent after {MAX_TSCHIRNHAUS_TRIES} Tschirnhaus transformations"
    )))
}

/// Chooses integer combination coefficients turning each factor's tower
/// coordinates into a single leaf value, such that all leaf values across
/// all factors are pairwise distinct.
fn leaf_combos(labs: &[RootLabeling]) -> Result<Vec<Vec<i64>>> {
    'attempt: for attempt in 0..32i64 {
        let combos: Vec<Vec<i64>> = labs
            .iter()
            .enumerate()
            .map(|(f, lab)| {
                let base = 1 + attempt + f as i64;
                let mut c = Vec::with_capacity(lab.degrees.len());
                let mut cur = 1i64;
                for _ in 0..lab.degrees.len() {
                    c.push(cur);
                    cur = cur.saturating_mul(base);
                }
                c
            })
            .collect();
        let values = combined_leaf_values(labs, &combos);
        let weight: i64 = combos
            .iter()
            .flat_map(|c| c.iter().map(|x| x.abs()))
            .sum();
        let err = labs
            .iter()
            .map(|l| &l.radius)
            .max()
            .cloned()
            .unwrap_or_else(BigInt::zero)
            * weight
            * 4;
        for i in 0..values.len() {
            for j in 0..i {
                if values[i].sub(&values[j]).abs() <= err {
                    continue 'attempt;
                }
            }
        }
        return Ok(combos);
    }
    Err(Error::cap(
        "could not separate conjugate leaf values by an integer combination",
    ))
}

/// All leaf values `Σ_j c_j · g_j`, factor ranges concatenated in model
/// order.
fn combined_leaf_values(labs: &[RootLabeling], combos: &[Vec<i64>]) -> Vec<Complex> {
    let mut out = Vec::new();
    for (lab, combo) in labs.iter().zip(combos) {
        for coords in &lab.coords {
            let mut v = Complex::zero();
            for (g, c) in coords.iter().zip(combo) {
                v = v.add(&g.mul_int(*c));
            }
            out.push(v);
        }
    }
    out
}

/// Estimates the decimal precision needed so that every coefficient of the
/// degree-`(W:U)` resolvent can be rounded reliably.
fn suggest_digits(
    m: &GlobalModel,
    u: &PermGroup,
    inv: &Invariant,
    t: &Tschirnhaus,
) -> Result<u32> {
    let index = m.w.order() / u.order();
    let labs = reference_labelings(m)?;
    let combos = leaf_combos(&labs)?;
    let values = combined_leaf_values(&labs, &combos);
    let bits = labs[0].bits;
    let alpha_bound = values
        .iter()
        .map(|v| gtower::fx_to_f64(&v.abs(), bits))
        .fold(0.0f64, f64::max)
        + 1.0;
    let t_bound = t
        .coeffs
        .iter()
        .rev()
        .fold(0.0f64, |acc, c| acc * alpha_bound + c.abs() as f64)
        .max(1.0);
    let beta_bound = inv
        .terms
        .iter()
        .map(|(c, e)| c.abs() as f64 * t_bound.powi(e.iter().sum::<u32>() as i32))
        .sum::<f64>()
        .max(1.0);
    let digits = (index as f64 * (beta_bound + 2.0).log10()).ceil() as u32 + 30;
    if digits > RESOLVENT_DIGITS_CAP {
        return Err(Error::cap(format!(
            "resolvent of index {index} would need {digits} decimal digits"
        )));
    }
    Ok(digits)
}

fn reference_labelings(m: &GlobalModel) -> Result<Vec<RootLabeling>> {
    m.factors
        .iter()
        .map(|f| complex_roots(&f.tower, 30))
        .collect()
}

/// Evaluates the resolvent at a fixed decimal precision.  Succeeds only
/// when every coefficient rounds to an integer within the ten-digit
/// margin; exposed so callers can re-certify a resolvent at higher
/// precision.
pub fn evaluate_at_digits(
    m: &GlobalModel,
    u: &PermGroup,
    inv: &Invariant,
    t: &Tschirnhaus,
    digits: u32,
) -> Result<Resolvent> {
    let d = m.degree();
    if u.degree() != d || inv.dimension() != d {
        return Err(Error::invalid(
            "resolvent evaluation requires matching degrees for W, U and I",
        ));
    }
    if !m.w.contains_group(u) {
        return Err(Error::invalid("resolvent evaluation requires U ≤ W"));
    }
    let ca = CosetAction::new(&m.w, u)?;
    let n = ca.index();

    let labs: Vec<RootLabeling> = m
        .factors
        .iter()
        .map(|f| complex_roots(&f.tower, digits))
        .collect::<Result<_>>()?;
    let bits = labs[0].bits;
    if labs.iter().any(|l| l.bits != bits) {
        return Err(Error::invalid("inconsistent fixed-point scales across factors"));
    }
    let combos = leaf_combos(&labs)?;
    let alphas = combined_leaf_values(&labs, &combos);

    // T(α_i) for every leaf, then power tables up to the invariant's
    // largest single-variable exponent.
    let t_coeffs: Vec<Complex> = t
        .coeffs
        .iter()
        .map(|c| Complex {
            re: BigInt::from(*c) << bits,
            im: BigInt::zero(),
        })
        .collect();
    let betas_in: Vec<Complex> = alphas.iter().map(|a| ceval(&t_coeffs, a, bits)).collect();
    let max_exp = inv
        .terms
        .iter()
        .flat_map(|(_, e)| e.iter().copied())
        .max()
        .unwrap_or(0) as usize;
    let one = Complex {
        re: BigInt::one() << bits,
        im: BigInt::zero(),
    };
    let pows: Vec<Vec<Complex>> = betas_in
        .iter()
        .map(|b| {
            let mut row = Vec::with_capacity(max_exp + 1);
            row.push(one.clone());
            for k in 1..=max_exp {
                let next = row[k - 1].mul(b, bits);
                row.push(next);
            }
            row
        })
        .collect();

    // β_c = (r_c · I)(T(α)) over left-coset representatives.
    let mut roots = Vec::with_capacity(n);
    for c in 0..n {
        let r = ca.rep(c);
        let mut val = Complex::zero();
        for (coef, e) in inv.terms() {
            let mut prod = one.clone();
            for (i, &exp) in e.iter().enumerate() {
                if exp > 0 {
                    prod = prod.mul(&pows[r.apply(i as u16) as usize][exp as usize], bits);
                }
            }
            val = val.add(&prod.mul_int(*coef));
        }
        roots.push(val);
    }

    // R(t) = Π (t − β_c), accumulated as fixed-point complex coefficients.
    let mut rc: Vec<Complex> = vec![one.clone()];
    for beta in &roots {
        let mut next = vec![Complex::zero(); rc.len() + 1];
        for (k, coef) in rc.iter().enumerate() {
            next[k + 1] = next[k + 1].add(coef);
            next[k] = next[k].sub(&coef.mul(beta, bits));
        }
        rc = next;
    }

    let margin = gtower::digit_target(ROUNDING_MARGIN_DIGITS, bits);
    let mut coeffs = Vec::with_capacity(rc.len());
    for c in &rc {
        let (q, err) = round_fixed(&c.re, bits);
        if err > margin || c.im.abs() > margin {
            return Err(Error::PrecisionCeiling(
                "resolvent coefficient does not round to an integer".into(),
            ));
        }
        coeffs.push(q);
    }
    debug_assert!(coeffs[n].is_one());

    if !is_squarefree_int(&coeffs) {
        return Err(Error::NotApplicable("resolvent is not squarefree".into()));
    }
    Ok(Resolvent {
        coeffs,
        degree: n,
        u: u.clone(),
        invariant: inv.clone(),
        tschirnhaus: t.clone(),
        digits,
    })
}

/// Rounds a fixed-point value to the nearest integer, returning the integer
/// and the absolute rounding error at the same scale.
fn round_fixed(x: &BigInt, bits: u32) -> (BigInt, BigInt) {
    let half = BigInt::one() << (bits - 1);
    let q: BigInt = (x + &half) >> bits;
    let err = (x - (&q << bits)).abs();
    (q, err)
}

/// Primes near `2^31` used for the modular squarefreeness fast path.
const SQUAREFREE_PRIMES: [u64; 8] = [
    2_147_483_647,
    2_147_483_629,
    2_147_483_587,
    2_147_483_579,
    2_147_483_563,
    2_147_483_549,
    2_147_483_543,
    2_147_483_497,
];

/// Whether a monic integer polynomial is squarefree over `Q`.
///
/// If `gcd(R, R′) = 1` modulo some prime not dividing the leading
/// coefficient, then `R` is squarefree; when every modular trial is
/// inconclusive the question is settled exactly over `Q`.
fn is_squarefree_int(coeffs: &[BigInt]) -> bool {
    if coeffs.len() <= 2 {
        return true;
    }
    for &p in &SQUAREFREE_PRIMES {
        let a: Vec<u64> = coeffs
            .iter()
            .map(|c| {
                let m = c % BigInt::from(p);
                let m = if m.is_negative() { m + BigInt::from(p) } else { m };
                u64::try_from(m).unwrap()
            })
            .collect();
        let da: Vec<u64> = (1..a.len())
            .map(|i| mulmod(a[i], i as u64 % p, p))
            .collect();
        if poly_gcd_degree_mod(&a, &da, p) == Some(0) {
            return true;
        }
    }
    let rat: Vec<num_rational::BigRational> = coeffs
        .iter()
        .map(|c| num_rational::BigRational::from_integer(c.clone()))
        .collect();
    crate::padic::is_squarefree_q(&rat)
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

/// Degree of `gcd(a, b)` mod `p`, or `None` when the gcd is trivial in a
/// degenerate way (both inputs vanish mod `p`).
fn poly_gcd_degree_mod(a: &[u64], b: &[u64], p: u64) -> Option<usize> {
    let trim = |v: &[u64]| {
        let mut n = v.len();
        while n > 0 && v[n - 1] % p == 0 {
            n -= 1;
        }
        v[..n].to_vec()
    };
    let mut a = trim(a);
    let mut b = trim(b);
    while !b.is_empty() {
        let lead_inv = powmod(b[b.len() - 1], p - 2, p);
        while a.len() >= b.len() {
            let shift = a.len() - b.len();
            let factor = mulmod(a[a.len() - 1], lead_inv, p);
            for i in 0..b.len() {
                let sub = mulmod(factor, b[i], p);
                a[shift + i] = (a[shift + i] + p - sub) % p;
            }
            a = trim(&a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    if a.is_empty() {
        None
    } else {
        Some(a.len() - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_model, ModelOptions};
    use crate::padic::{factor_squarefree, lpoly_from_bigints, with_precision};

    fn bigints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    fn model(p: u64, f: &[i64]) -> GlobalModel {
        build_model(p, &bigints(f), &ModelOptions::default()).unwrap()
    }

    fn padic_factor_degrees(p: u64, coeffs: &[BigInt]) -> Vec<usize> {
        let mut degs: Vec<usize> = with_precision(p, |k| {
            let f = lpoly_from_bigints(k, coeffs);
            Ok(factor_squarefree(k, &f)?
                .iter()
                .map(|g| g.len() - 1)
                .collect::<Vec<_>>())
        })
        .unwrap();
        degs.sort_unstable();
        degs
    }

    #[test]
    fn symmetric_pair_gives_linear_resolvent() {
        let m = model(2, &[-2, 0, 1]);
        let w = m.w.clone();
        let inv = primitive_invariant(&w, &w).unwrap();
        assert_eq!(inv.terms().len(), 2);
        let r = resolvent_for(&m, &w, &inv).unwrap();
        assert_eq!(r.degree, 1);
        assert_eq!(r.coeffs, bigints(&[0, 1]));
    }

    #[test]
    fn difference_invariant_on_sqrt2() {
        let m = model(2, &[-2, 0, 1]);
        let u = PermGroup::trivial(2);
        let inv = Invariant::new(2, vec![(1, vec![1, 0]), (-1, vec![0, 1])]).unwrap();
        let t = next_tschirnhaus(None);
        let r = evaluate_resolvent(&m, &u, &inv, &t).unwrap();
        assert_eq!(r.coeffs, bigints(&[-8, 0, 1]));
    }

    #[test]
    fn point_invariant_reproduces_the_polynomial() {
        let m = model(2, &[-2, 0, 1]);
        let u = PermGroup::trivial(2);
        let inv = primitive_invariant(&m.w, &u).unwrap();
        assert_eq!(inv.terms(), &[(1, vec![1, 0])]);
        let t = next_tschirnhaus(None);
        let r = evaluate_resolvent(&m, &u, &inv, &t).unwrap();
        assert_eq!(r.coeffs, bigints(&[-2, 0, 1]));
    }

    #[test]
    fn alternating_invariant_in_s3() {
        let w = PermGroup::symmetric(3);
        let a3 = PermGroup::cyclic(3);
        let inv = primitive_invariant(&w, &a3).unwrap();
        let rot = Perm::from_images(vec![1, 2, 0]).unwrap();
        let swap = Perm::from_images(vec![1, 0, 2]).unwrap();
        assert!(inv.is_stabilized_by(&rot));
        assert!(!inv.is_stabilized_by(&swap));
        // The W-orbit of the invariant has exactly (W:U) = 2 members.
        let mut orbit = BTreeSet::new();
        for g in w.elements() {
            orbit.insert(format!("{:?}", inv.apply(&g).terms()));
        }
        assert_eq!(orbit.len(), 2);
    }

    #[test]
    fn tschirnhaus_sequence_is_deterministic_and_distinct() {
        let t0 = next_tschirnhaus(None);
        assert_eq!(t0.coeffs, vec![0, 1]);
        let t1 = next_tschirnhaus(Some(&t0));
        assert!(t1.coeffs.len() <= 3);
        assert!(t1.coeffs.iter().all(|c| c.abs() <= 2));
        let mut seq = vec![t0];
        for _ in 0..8 {
            let next = next_tschirnhaus(Some(seq.last().unwrap()));
            assert_eq!(next, tschirnhaus_at(next.counter, 0));
            seq.push(next);
        }
        for i in 0..seq.len() {
            for j in 0..i {
                assert_ne!(seq[i].coeffs, seq[j].coeffs);
            }
        }
    }

    #[test]
    fn resolvent_factors_match_group_orbits_for_cubic() {
        // Gal(x³−2 / Q_2) is the full S_3: its image on W/U is transitive
        // for every U, so every resolvent must be irreducible over Q_2.
        let m = model(2, &[-2, 0, 0, 1]);
        assert_eq!(m.w.order(), 6);
        for u in [PermGroup::cyclic(3), PermGroup::trivial(3)] {
            let inv = primitive_invariant(&m.w, &u).unwrap();
            let r = resolvent_for(&m, &u, &inv).unwrap();
            let expected = (m.w.order() / u.order()) as usize;
            assert_eq!(r.degree, expected);
            assert_eq!(padic_factor_degrees(2, &r.coeffs), vec![expected]);
        }
    }

    #[test]
    fn resolvent_factors_match_group_orbits_for_split_product() {
        // F = (x²−2)(x−1)(x+1): the Galois group is generated by the swap
        // of the first two leaves, W = S_2.  For trivial U the two cosets
        // are exchanged, giving an irreducible quadratic resolvent.
        let m = model(2, &[2, -2, -1, 1]);
        assert_eq!(m.w.order(), 2);
        let u = PermGroup::trivial(m.degree());
        let inv = primitive_invariant(&m.w, &u).unwrap();
        let r = resolvent_for(&m, &u, &inv).unwrap();
        assert_eq!(r.degree, 2);
        assert_eq!(padic_factor_degrees(2, &r.coeffs), vec![2]);
    }

    #[test]
    fn coefficients_stable_under_precision_doubling() {
        let m = model(2, &[-2, 0, 0, 1]);
        let u = PermGroup::cyclic(3);
        let inv = primitive_invariant(&m.w, &u).unwrap();
        let t = next_tschirnhaus(None);
        let r = evaluate_resolvent(&m, &u, &inv, &t).unwrap();
        let r2 = evaluate_at_digits(&m, &u, &inv, &t, r.digits * 2).unwrap();
        assert_eq!(r.coeffs, r2.coeffs);
    }

    #[test]
    fn quartic_unramified_resolvents() {
        // Gal(x⁴+x+1 / Q_2) is a 4-cycle: transitive on points (index-6
        // pair stabilizer cosets split 4+2 under a 4-cycle's action).
        let m = model(2, &[1, 1, 0, 0, 1]);
        assert_eq!(m.w.order(), 24);
        let u = PermGroup::new(
            4,
            vec![
                Perm::from_images(vec![1, 0, 2, 3]).unwrap(),
                Perm::from_images(vec![0, 1, 3, 2]).unwrap(),
            ],
        )
        .unwrap();
        let inv = primitive_invariant(&m.w, &u).unwrap();
        let r = resolvent_for(&m, &u, &inv).unwrap();
        assert_eq!(r.degree, 6);
        assert_eq!(padic_factor_degrees(2, &r.coeffs), vec![2, 4]);
    }
}
