//! Global model constructors: given a monic squarefree `F ∈ Z[x]` and a
//! prime `p`, build for each irreducible p-adic factor a [`RationalTower`]
//! over `Q` together with an overgroup `W` on its leaves, such that the
//! tower completes p-adically to the factor's field and the Galois group of
//! the tower's splitting field over `Q` (hence also the local Galois group)
//! acts on the leaf labeling inside `W`.
//!
//! Constructors per tower segment:
//! * **Symmetric** — approximate the local step polynomial by rational
//!   coefficient expressions over the tower's power basis; overgroup `S_m`.
//! * **RootOfUnity** — for an unramified bottom segment, take the minimal
//!   polynomial of a Gauss period of `ζ_n`; overgroup cyclic `C_m`.
//! * **RootOfUniformizer** — for a totally tame bottom segment, take
//!   `x^m − π` with a rational uniformizer approximation; overgroup the
//!   affine maps `i ↦ a·i + b` on `Z/m`.
//!
//! The non-symmetric constructors are used only on the bottom segment (base
//! `Q`); deeper segments always fall back to Symmetric, which keeps every
//! coefficient expression rational.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;
use crate::gtower::{
    self, bits_for, certify_completion, complex_roots, digit_target, map_step, Complex,
    RationalTower,
};
use crate::padic::poly::{pdeg, ptrim};
use crate::padic::{
    factor_squarefree, lpoly_from_bigints, ramification_filtration, roots_in, with_precision,
    Elt, LPoly, LocalField, SegmentKind,
};
use crate::perm::{direct_product, fold_wreath, Perm, PermGroup};
use crate::Result;

/// Which constructor produced a segment step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModelConstructor {
    Symmetric,
    RootOfUnity,
    RootOfUniformizer,
}

/// Per-segment constructor policy.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SegmentChoice {
    /// Symmetric on every segment (the "A" family).
    Symmetric,
    /// RootOfUnity / RootOfUniformizer / Symmetric by segment kind on the
    /// bottom segment, Symmetric above (the "B" family).
    Select,
}

#[derive(Clone, Copy, Debug)]
pub struct ModelOptions {
    pub choice: SegmentChoice,
    /// Use the smallest `n` with `ord_n(p) = m` instead of `n = p^m − 1`
    /// for RootOfUnity.
    pub minimal_n: bool,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions { choice: SegmentChoice::Symmetric, minimal_n: false }
    }
}

/// One segment of a factor model.
#[derive(Clone, Debug)]
pub struct SegmentModel {
    pub kind: SegmentKind,
    pub degree: usize,
    pub constructor: ModelConstructor,
    /// The segment's overgroup factor (one wreath factor of the factor
    /// overgroup `w`).
    pub group: PermGroup,
}

/// Model of one irreducible p-adic factor of `F`.
#[derive(Clone, Debug)]
pub struct FactorModel {
    pub tower: RationalTower,
    /// Overgroup on the tower's leaves (wreath product of segment factors,
    /// compatible with the [`gtower`] leaf order).
    pub w: PermGroup,
    /// The realized completion (top of the local filtration tower).
    pub local: LocalField,
    pub segments: Vec<SegmentModel>,
}

/// A global model of `F` over `Q_p`: one certified tower per irreducible
/// factor, with `W` the direct product of factor overgroups on consecutive
/// leaf ranges.
#[derive(Clone, Debug)]
pub struct GlobalModel {
    pub p: u64,
    pub factors: Vec<FactorModel>,
    pub w: PermGroup,
}

impl GlobalModel {
    pub fn degree(&self) -> usize {
        self.w.degree()
    }
}

/// Builds a global model for monic squarefree `F` (ascending coefficients)
/// over `Q_p`, retrying with doubled p-adic precision up to the global
/// ceiling.
pub fn build_model(p: u64, f: &[BigInt], opts: &ModelOptions) -> Result<GlobalModel> {
    let d = f.len().saturating_sub(1);
    if d == 0 || !f[d].is_one() {
        return Err(Error::invalid("build_model requires a monic polynomial of degree ≥ 1"));
    }
    let k0 = 2 * (1 + vp_disc(p, f)?);
    with_precision(p, |qp| {
        let fp = lpoly_from_bigints(qp, f);
        let mut factors = Vec::new();
        for g in factor_squarefree(qp, &fp)? {
            factors.push(build_factor(qp, &g, opts, k0)?);
        }
        let w = direct_product(&factors.iter().map(|m| m.w.clone()).collect::<Vec<_>>());
        Ok(GlobalModel { p, factors, w })
    })
}

fn build_factor(
    qp: &LocalField,
    g: &LPoly,
    opts: &ModelOptions,
    k0: u32,
) -> Result<FactorModel> {
    let n = pdeg(qp, g);
    if n == 1 {
        // Any rational point completes to Q_p; use a small lift of the root
        // so distinct factors get distinct leaves.
        let root = qp.neg(&g[0]);
        let a = balanced(&root[0], &BigInt::from(qp.p()).pow(8.min(qp.nprec())));
        let step = vec![vec![BigRational::from(-a)], vec![BigRational::one()]];
        return Ok(FactorModel {
            tower: RationalTower::new(vec![step])?,
            w: PermGroup::trivial(1),
            local: qp.clone(),
            segments: Vec::new(),
        });
    }
    let (towers, data) = ramification_filtration(qp, g)?;
    let mut steps: Vec<Vec<Vec<BigRational>>> = Vec::new();
    let mut lower_degrees: Vec<usize> = Vec::new();
    let mut imgs: Vec<Elt> = Vec::new();
    let mut wfactors: Vec<PermGroup> = Vec::new();
    let mut segments = Vec::new();
    for j in 1..towers.len() {
        let lower = &towers[j - 1];
        let lj = &towers[j];
        let h: LPoly = lj.step_poly().expect("filtration step").to_vec();
        let m = pdeg(lower, &h);
        let kind = data.kinds[j - 1];
        let want = match opts.choice {
            SegmentChoice::Symmetric => ModelConstructor::Symmetric,
            SegmentChoice::Select if j == 1 => match kind {
                SegmentKind::Unramified => ModelConstructor::RootOfUnity,
                SegmentKind::Tame => ModelConstructor::RootOfUniformizer,
                SegmentKind::Wild => ModelConstructor::Symmetric,
            },
            SegmentChoice::Select => ModelConstructor::Symmetric,
        };
        let (coeffs, w, img, used) = match want {
            ModelConstructor::RootOfUnity => {
                match root_of_unity_step(qp.p(), m, opts.minimal_n)? {
                    Some((coeffs, w)) => {
                        let img = certify_step(&coeffs, &lower_degrees, lower, &imgs, lj)?
                            .ok_or_else(|| {
                                Error::invalid("RootOfUnity step failed certification")
                            })?;
                        (coeffs, w, img, ModelConstructor::RootOfUnity)
                    }
                    None => {
                        let (coeffs, img) =
                            symmetric_segment(lower, &imgs, &lower_degrees, &h, k0, lj)?;
                        (coeffs, PermGroup::symmetric(m), img, ModelConstructor::Symmetric)
                    }
                }
            }
            ModelConstructor::RootOfUniformizer => {
                let (coeffs, w, img) =
                    root_of_uniformizer_step(qp, m, &lower_degrees, lower, &imgs, lj)?;
                (coeffs, w, img, ModelConstructor::RootOfUniformizer)
            }
            ModelConstructor::Symmetric => {
                let (coeffs, img) =
                    symmetric_segment(lower, &imgs, &lower_degrees, &h, k0, lj)?;
                (coeffs, PermGroup::symmetric(m), img, ModelConstructor::Symmetric)
            }
        };
        imgs = imgs.iter().map(|x| lj.embed_from(lower, x)).collect();
        imgs.push(img);
        steps.push(coeffs);
        lower_degrees.push(m);
        segments.push(SegmentModel { kind, degree: m, constructor: used, group: w.clone() });
        wfactors.push(w);
    }
    let tower = RationalTower::new(steps)?;
    let top = towers.last().unwrap();
    if !certify_completion(&tower, top)? {
        return Err(Error::PrecisionCeiling(
            "constructed tower failed final completion certification".into(),
        ));
    }
    wfactors.reverse();
    let w = fold_wreath(&wfactors);
    Ok(FactorModel { tower, w, local: top.clone(), segments })
}

/// Maps a candidate step into the realized local tower and checks that it
/// is irreducible there with a root one level up; returns the root (the
/// image of the new global generator) on success.
fn certify_step(
    coeffs: &[Vec<BigRational>],
    lower_degrees: &[usize],
    lower: &LocalField,
    imgs: &[Elt],
    lj: &LocalField,
) -> Result<Option<Elt>> {
    let mapped = map_step(coeffs, lower_degrees, lower, imgs)?;
    let parts = factor_squarefree(lower, &mapped)?;
    if parts.len() != 1 || pdeg(lower, &parts[0]) != pdeg(lower, &mapped) {
        return Ok(None);
    }
    Ok(roots_in(lower, &mapped, lj)?.into_iter().next())
}

/// Symmetric constructor: rational approximants of the local step
/// coefficients over the tower power basis, to valuation at least `k`
/// (doubled until the step certifies).
fn symmetric_segment(
    lower: &LocalField,
    imgs: &[Elt],
    lower_degrees: &[usize],
    h: &LPoly,
    k0: u32,
    lj: &LocalField,
) -> Result<(Vec<Vec<BigRational>>, Elt)> {
    let mut h = h.clone();
    ptrim(lower, &mut h);
    let mut k = k0.max(2);
    loop {
        let digits = k.div_ceil(lower.e() as u32);
        if digits > lower.nprec() {
            return Err(Error::PrecisionCeiling(
                "symmetric model approximation exhausted the working precision".into(),
            ));
        }
        let coeffs = approximate_step(lower, imgs, lower_degrees, &h, digits)?;
        if let Some(img) = certify_step(&coeffs, lower_degrees, lower, imgs, lj)? {
            return Ok((coeffs, img));
        }
        k *= 2;
    }
}

/// Solves for integer vectors `x` with `Σ x_i b_i ≡ c (mod p^N)` over the
/// power-product basis `b_i` of the generator images, one solve per
/// coefficient of `h`, and lifts balanced representatives.
fn approximate_step(
    lower: &LocalField,
    imgs: &[Elt],
    lower_degrees: &[usize],
    h: &LPoly,
    digits: u32,
) -> Result<Vec<Vec<BigRational>>> {
    let n = lower.degree();
    let modulus = BigInt::from(lower.p()).pow(digits);
    // Basis in padic flat order: index b has exponents e_j = (b / Π d_{<j}) mod d_j.
    let mut basis = Vec::with_capacity(n);
    for b in 0..n {
        let mut acc = lower.one();
        let mut rest = b;
        for (j, &dj) in lower_degrees.iter().enumerate() {
            let e = rest % dj;
            rest /= dj;
            for _ in 0..e {
                acc = lower.mul(&acc, &imgs[j]);
            }
        }
        basis.push(acc);
    }
    let inv = invert_mod(&basis, &modulus, &BigInt::from(lower.p()))?;
    let deg = pdeg(lower, h);
    let mut out = Vec::with_capacity(deg + 1);
    for c in h.iter().take(deg) {
        let mut flat = Vec::with_capacity(n);
        for row in &inv {
            let mut acc = BigInt::zero();
            for (i, e) in row.iter().enumerate() {
                acc += e * &c[i];
            }
            flat.push(BigRational::from(balanced(&acc, &modulus)));
        }
        out.push(flat);
    }
    let mut lead = vec![BigRational::zero(); n];
    lead[0] = BigRational::one();
    out.push(lead);
    Ok(out)
}

/// Inverts the matrix whose columns are the basis elements' coordinate
/// vectors, modulo `p^N`.  Requires unit pivots (i.e. the power basis is a
/// local integral basis, which holds for Eisenstein/unramified-shaped
/// towers).
fn invert_mod(basis: &[Elt], modulus: &BigInt, p: &BigInt) -> Result<Vec<Vec<BigInt>>> {
    let n = basis.len();
    let mut a: Vec<Vec<BigInt>> = (0..n)
        .map(|r| (0..n).map(|c| (&basis[c][r]).mod_floor(modulus)).collect())
        .collect();
    let mut inv: Vec<Vec<BigInt>> = (0..n)
        .map(|r| (0..n).map(|c| if r == c { BigInt::one() } else { BigInt::zero() }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !(&a[r][col] % p).is_zero())
            .ok_or_else(|| Error::invalid("tower power basis is not a local integral basis"))?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let pinv = mod_inverse(&a[col][col], modulus)?;
        for c in 0..n {
            a[col][c] = (&a[col][c] * &pinv).mod_floor(modulus);
            inv[col][c] = (&inv[col][c] * &pinv).mod_floor(modulus);
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = a[r][col].clone();
            for c in 0..n {
                let av = (&a[r][c] - &f * &a[col][c]).mod_floor(modulus);
                a[r][c] = av;
                let iv = (&inv[r][c] - &f * &inv[col][c]).mod_floor(modulus);
                inv[r][c] = iv;
            }
        }
    }
    Ok(inv)
}

fn mod_inverse(a: &BigInt, modulus: &BigInt) -> Result<BigInt> {
    let (mut r0, mut r1) = (modulus.clone(), a.mod_floor(modulus));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while !r1.is_zero() {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        r0 = std::mem::replace(&mut r1, r2);
        let t2 = &t0 - &q * &t1;
        t0 = std::mem::replace(&mut t1, t2);
    }
    if !r0.is_one() {
        return Err(Error::invalid("non-invertible pivot"));
    }
    Ok(t0.mod_floor(modulus))
}

/// Balanced representative of `x mod m` in `(−m/2, m/2]`.
fn balanced(x: &BigInt, modulus: &BigInt) -> BigInt {
    let r = x.mod_floor(modulus);
    if &r * 2 > *modulus {
        r - modulus
    } else {
        r
    }
}

use num_integer::Integer;

/// `v_p` of the discriminant of monic `f`, via an exact integer resultant.
fn vp_disc(p: u64, f: &[BigInt]) -> Result<u32> {
    let d = f.len() - 1;
    if d == 1 {
        return Ok(0);
    }
    let df: Vec<BigInt> = f.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect();
    let res = resultant(f, &df);
    if res.is_zero() {
        return Err(Error::invalid("polynomial is not squarefree"));
    }
    let p = BigInt::from(p);
    let mut v = 0;
    let mut r = res.abs();
    while (&r % &p).is_zero() {
        r /= &p;
        v += 1;
    }
    Ok(v)
}

/// Exact resultant of two integer polynomials by fraction-free (Bareiss)
/// elimination of the Sylvester matrix.
fn resultant(f: &[BigInt], g: &[BigInt]) -> BigInt {
    let (n, m) = (f.len() - 1, g.len() - 1);
    let size = n + m;
    let mut a = vec![vec![BigInt::zero(); size]; size];
    for r in 0..m {
        for (i, c) in f.iter().enumerate() {
            a[r][r + n - i] = c.clone();
        }
    }
    for r in 0..n {
        for (i, c) in g.iter().enumerate() {
            a[m + r][r + m - i] = c.clone();
        }
    }
    let mut denom = BigInt::one();
    let mut sign = BigInt::one();
    for k in 0..size {
        if a[k][k].is_zero() {
            let Some(sw) = (k + 1..size).find(|&r| !a[r][k].is_zero()) else {
                return BigInt::zero();
            };
            a.swap(k, sw);
            sign = -sign;
        }
        for r in k + 1..size {
            for c in k + 1..size {
                let num = &a[r][c] * &a[k][k] - &a[r][k] * &a[k][c];
                a[r][c] = num / &denom;
            }
            a[r][k] = BigInt::zero();
        }
        denom = a[k][k].clone();
    }
    sign * a[size - 1][size - 1].clone()
}

// ---------------------------------------------------------------------------
// RootOfUnity
// ---------------------------------------------------------------------------

/// Cap on the cyclotomic modulus `n` for exact Gauss-period work.
const UNITY_N_CAP: u64 = 1024;

/// Builds the RootOfUnity step for an unramified bottom segment of degree
/// `m` over `Q_p`: the minimal polynomial of the Gauss period
/// `η = Σ_{h∈H} ζ_n^h` for a perfect complement `H` of `⟨p⟩` in `(Z/n)^×`,
/// with cyclic overgroup `C_m` matched to the complex leaf order.  Returns
/// `None` (fall back to Symmetric) when no perfect complement is found or
/// `n` exceeds the exact-arithmetic cap.
fn root_of_unity_step(
    p: u64,
    m: usize,
    minimal_n: bool,
) -> Result<Option<(Vec<Vec<BigRational>>, PermGroup)>> {
    if m == 1 {
        let step = vec![vec![BigRational::from(BigInt::from(-1))], vec![BigRational::one()]];
        return Ok(Some((step, PermGroup::trivial(1))));
    }
    let full = match (p as u128).checked_pow(m as u32) {
        Some(v) if v - 1 <= u64::MAX as u128 => (v - 1) as u64,
        _ => return Ok(None),
    };
    let n = if minimal_n {
        match (1..=full).filter(|d| full % d == 0).find(|&d| mult_order(p % d.max(1), d) == Some(m)) {
            Some(d) => d,
            None => return Ok(None),
        }
    } else {
        full
    };
    if n > UNITY_N_CAP || n < 2 {
        return Ok(None);
    }
    let q = p % n;
    if mult_order(q, n) != Some(m) {
        return Ok(None);
    }
    let Some(h) = perfect_complement(n, q, m) else {
        return Ok(None);
    };
    let minpoly = gauss_period_minpoly(n, q, &h, m)?;
    let step: Vec<Vec<BigRational>> =
        minpoly.iter().map(|c| vec![BigRational::from(c.clone())]).collect();
    // Label the conjugates against the complex leaf order: the Frobenius
    // sends η_{q^i·H} to η_{q^{i+1}·H}.
    let tower = RationalTower::new(vec![step.clone()])?;
    let digits = 45u32;
    let lab = complex_roots(&tower, digits)?;
    let bits = bits_for(digits);
    let zeta = nth_root_of_unity(n, bits, digits)?;
    let mut zpow = vec![Complex { re: BigInt::one() << bits, im: BigInt::zero() }];
    for j in 1..n as usize {
        zpow.push(zpow[j - 1].mul(&zeta, bits));
    }
    let mut values = Vec::with_capacity(m);
    let mut c = 1u64;
    for _ in 0..m {
        let mut eta = Complex::zero();
        for &hh in &h {
            eta = eta.add(&zpow[((c * hh) % n) as usize]);
        }
        values.push(eta);
        c = (c * q) % n;
    }
    let lam = match_leaves(&lab, &values, bits, digits)?;
    let mut images = vec![0u16; m];
    for i in 0..m {
        images[lam[i]] = lam[(i + 1) % m] as u16;
    }
    let w = PermGroup::new(m, vec![Perm::from_images(images)?])?;
    Ok(Some((step, w)))
}

/// Multiplicative order of `q` modulo `n` (None when not coprime).
fn mult_order(q: u64, n: u64) -> Option<usize> {
    if n <= 1 || gcd(q, n) != 1 {
        return None;
    }
    let mut x = q % n;
    let mut k = 1;
    while x != 1 {
        x = (x * q) % n;
        k += 1;
        if k > n as usize {
            return None;
        }
    }
    Some(k)
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Greedy search for a perfect complement `H` of `W = ⟨q⟩` in `(Z/n)^×`:
/// a subgroup with `H ∩ W = 1` and `|H|·|W| = φ(n)`.  Greedy accretion can
/// in principle miss an existing complement; the caller treats `None` as a
/// fallback signal, so incompleteness only costs model quality.
fn perfect_complement(n: u64, q: u64, m: usize) -> Option<BTreeSet<u64>> {
    let units: Vec<u64> = (1..n).filter(|&x| gcd(x, n) == 1).collect();
    let phi = units.len();
    if phi % m != 0 {
        return None;
    }
    let target = phi / m;
    let mut w = BTreeSet::new();
    let mut x = 1u64;
    loop {
        w.insert(x);
        x = (x * q) % n;
        if x == 1 {
            break;
        }
    }
    if w.len() != m {
        return None;
    }
    let mut by_order: Vec<(usize, u64)> = units
        .iter()
        .map(|&u| (mult_order(u, n).unwrap_or(usize::MAX), u))
        .collect();
    by_order.sort();
    let mut h: BTreeSet<u64> = BTreeSet::new();
    h.insert(1);
    for &(_, u) in &by_order {
        if h.len() == target {
            break;
        }
        if h.contains(&u) {
            continue;
        }
        let closed = closure(n, &h, u);
        if closed.len() <= target && closed.intersection(&w).count() == 1 {
            h = closed;
        }
    }
    if h.len() == target {
        Some(h)
    } else {
        None
    }
}

/// Subgroup generated by `h ∪ {x}` inside `(Z/n)^×`.
fn closure(n: u64, h: &BTreeSet<u64>, x: u64) -> BTreeSet<u64> {
    let mut out = h.clone();
    let mut frontier: Vec<u64> = vec![x];
    while let Some(y) = frontier.pop() {
        if !out.insert(y) {
            continue;
        }
        let mut next: Vec<u64> = Vec::new();
        for &z in out.iter() {
            next.push((y * z) % n);
        }
        frontier.extend(next);
    }
    out
}

/// Exact minimal polynomial of the Gauss period `Σ_{h∈H} ζ_n^h`, computed
/// in the group ring `Z[Z/n]` (elementary symmetric functions of the `m`
/// conjugates) with coefficients read off through Ramanujan sums.
fn gauss_period_minpoly(n: u64, q: u64, h: &BTreeSet<u64>, m: usize) -> Result<Vec<BigInt>> {
    let n_us = n as usize;
    let mut etas = Vec::with_capacity(m);
    let mut c = 1u64;
    for _ in 0..m {
        let mut v = vec![BigInt::zero(); n_us];
        for &hh in h {
            v[((c * hh) % n) as usize] += 1;
        }
        etas.push(v);
        c = (c * q) % n;
    }
    // poly[i] is the group-ring coefficient of t^i in Π (t − η_j).
    let mut poly: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); n_us]];
    poly[0][0] = BigInt::one();
    for eta in &etas {
        let mut next: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); n_us]; poly.len() + 1];
        for (i, co) in poly.iter().enumerate() {
            // t · co
            for j in 0..n_us {
                let v = co[j].clone();
                next[i + 1][j] += v;
            }
            // −η · co (convolution with exponent addition mod n)
            for (a, ca) in co.iter().enumerate() {
                if ca.is_zero() {
                    continue;
                }
                for (b, cb) in eta.iter().enumerate() {
                    if cb.is_zero() {
                        continue;
                    }
                    let idx = (a + b) % n_us;
                    next[i][idx] -= ca * cb;
                }
            }
        }
        poly = next;
    }
    poly.iter().map(|v| invariant_value(n, v)).collect()
}

/// Evaluates `Σ v_j ζ_n^j` for a vector that is constant on the orbits
/// `{j : gcd(j, n) = g}` (i.e. Galois-invariant): the orbit sums are the
/// Möbius values `μ(n/g)`.
fn invariant_value(n: u64, v: &[BigInt]) -> Result<BigInt> {
    let mut total = BigInt::zero();
    for g in (1..=n).filter(|g| n % g == 0) {
        let orbit: Vec<usize> =
            (0..n).filter(|&j| gcd(j, n) == g % n.max(1) || (j == 0 && g == n)).map(|j| j as usize).collect();
        let first = &v[orbit[0]];
        for &j in &orbit[1..] {
            if &v[j] != first {
                return Err(Error::invalid("Gauss-period symmetric function is not rational"));
            }
        }
        total += first * moebius(n / g);
    }
    Ok(total)
}

fn moebius(mut n: u64) -> i64 {
    let mut mu = 1i64;
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            n /= d;
            if n % d == 0 {
                return 0;
            }
            mu = -mu;
        }
        d += 1;
    }
    if n > 1 {
        mu = -mu;
    }
    mu
}

// ---------------------------------------------------------------------------
// RootOfUniformizer
// ---------------------------------------------------------------------------

/// Builds the RootOfUniformizer step for a totally tame bottom segment:
/// `x^m − π̃` with `π̃` a balanced rational lift of the realized local
/// uniformizer candidate (precision doubled until the step certifies), and
/// the affine overgroup `{i ↦ a·i + b}` on `Z/m` matched to the complex
/// leaf order via `ζ_m^i · π̃^{1/m}`.
fn root_of_uniformizer_step(
    qp: &LocalField,
    m: usize,
    lower_degrees: &[usize],
    lower: &LocalField,
    imgs: &[Elt],
    lj: &LocalField,
) -> Result<(Vec<Vec<BigRational>>, PermGroup, Elt)> {
    let h = lj.step_poly().expect("filtration step");
    let c0 = h[0][0].clone(); // −candidate, a plain Q_p coordinate
    let p = BigInt::from(qp.p());
    let mut digits = 4u32;
    let (coeffs, img) = loop {
        if digits > qp.nprec() {
            return Err(Error::PrecisionCeiling(
                "uniformizer approximation exhausted the working precision".into(),
            ));
        }
        let lift = balanced(&c0, &p.pow(digits));
        let mut coeffs = vec![vec![BigRational::from(lift.clone())]];
        for _ in 1..m {
            coeffs.push(vec![BigRational::zero()]);
        }
        coeffs.push(vec![BigRational::one()]);
        if let Some(img) = certify_step(&coeffs, lower_degrees, lower, imgs, lj)? {
            break (coeffs, img);
        }
        digits *= 2;
    };
    if m == 1 {
        return Ok((coeffs, PermGroup::trivial(1), img));
    }
    // Label the roots ζ_m^i·r against the complex leaf order.
    let tower = RationalTower::new(vec![coeffs.clone()])?;
    let ldig = 45u32;
    let lab = complex_roots(&tower, ldig)?;
    let bits = bits_for(ldig);
    let zeta = nth_root_of_unity(m as u64, bits, ldig)?;
    let base = lab.coords[0][0].clone();
    let mut values = Vec::with_capacity(m);
    let mut cur = base.clone();
    for _ in 0..m {
        values.push(cur.clone());
        cur = cur.mul(&zeta, bits);
    }
    let lam = match_leaves(&lab, &values, bits, ldig)?;
    let mut gens = Vec::new();
    let mut tr = vec![0u16; m];
    for i in 0..m {
        tr[lam[i]] = lam[(i + 1) % m] as u16;
    }
    gens.push(Perm::from_images(tr)?);
    for a in 2..m {
        if gcd(a as u64, m as u64) != 1 {
            continue;
        }
        let mut mu = vec![0u16; m];
        for i in 0..m {
            mu[lam[i]] = lam[(a * i) % m] as u16;
        }
        gens.push(Perm::from_images(mu)?);
    }
    let w = PermGroup::new(m, gens)?;
    Ok((coeffs, w, img))
}

// ---------------------------------------------------------------------------
// Numeric helpers
// ---------------------------------------------------------------------------

/// High-precision primitive `n`-th root of unity by Newton refinement of
/// the `f64` seed `e^{2πi/n}` on `x^n − 1`.
fn nth_root_of_unity(n: u64, bits: u32, digits: u32) -> Result<Complex> {
    let th = 2.0 * std::f64::consts::PI / n as f64;
    let mut z = Complex {
        re: gtower::fx_from_f64(th.cos(), bits),
        im: gtower::fx_from_f64(th.sin(), bits),
    };
    let one = Complex { re: BigInt::one() << bits, im: BigInt::zero() };
    let target = digit_target(digits, bits);
    for _ in 0..200 {
        let zp = cpow(&z, n - 1, bits);
        let f = zp.mul(&z, bits).sub(&one);
        let df = zp.mul_int(n as i64);
        let delta = f.div(&df, bits)?;
        z = z.sub(&delta);
        if delta.abs() * 4 < target {
            return Ok(z);
        }
    }
    Err(Error::PrecisionCeiling("root of unity refinement did not converge".into()))
}

fn cpow(z: &Complex, mut e: u64, bits: u32) -> Complex {
    let mut base = z.clone();
    let mut acc = Complex { re: BigInt::one() << bits, im: BigInt::zero() };
    while e > 0 {
        if e & 1 == 1 {
            acc = acc.mul(&base, bits);
        }
        base = base.mul(&base, bits);
        e >>= 1;
    }
    acc
}

/// Matches algebraically-ordered values to the complex leaf order of a
/// one-step tower: `lam[i]` is the leaf index whose root equals
/// `values[i]`.  Fails if the matching is not a sharp bijection.
fn match_leaves(
    lab: &crate::gtower::RootLabeling,
    values: &[Complex],
    bits: u32,
    digits: u32,
) -> Result<Vec<usize>> {
    let m = values.len();
    let tol = digit_target(digits / 3, bits);
    let mut lam = vec![usize::MAX; m];
    let mut used = vec![false; m];
    for (i, v) in values.iter().enumerate() {
        let mut best = usize::MAX;
        for leaf in 0..m {
            if v.sub(&lab.coords[leaf][0]).abs() < tol {
                if best != usize::MAX {
                    return Err(Error::PrecisionCeiling("ambiguous leaf matching".into()));
                }
                best = leaf;
            }
        }
        if best == usize::MAX || used[best] {
            return Err(Error::PrecisionCeiling("leaf matching failed".into()));
        }
        used[best] = true;
        lam[i] = best;
    }
    Ok(lam)
}
