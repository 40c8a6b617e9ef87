//! Factorization of squarefree monic polynomials over local fields.
//!
//! The driver is a Newton-polygon recursion. Distinct polygon faces, or a
//! single face whose residual polynomial has coprime parts, split the
//! polynomial by Hensel lifting. The remaining hard cases are refined by one
//! of three moves, each of which makes measurable progress:
//!
//! * residual is a power of an irreducible of degree > 1: adjoin the matching
//!   unramified extension (the residual then splits), factor upstairs, and
//!   recombine Frobenius orbits into factors below;
//! * fractional face slope: adjoin a root of `x^e - pi` so slopes become
//!   integral, factor upstairs, and recombine minimal rational subsets;
//! * residual is a power of a linear: shift the variable by the lifted root
//!   and recurse (the constant-term valuation strictly increases).
//!
//! Certificates of irreducibility are structural: degree one, an irreducible
//! residue polynomial of full degree (unramified), an irreducible residual on
//! a single face of denominator `e` with `e * deg(residual) = deg f`, or a
//! minimal recombined product (unique factorization upstairs). Precision
//! problems surface as [`Error::PrecisionCeiling`] so that callers owning
//! exact data can rebuild at higher precision.


use super::ff::FFPoly;
use super::field::{Elt, LocalField, StepKind};
use super::poly::{
    self, lift_poly, min_val, newton_polygon, pdeg, pmul, psub, ptrim,
    reduce_poly, LPoly,
};
use crate::Error;

/// Largest absolute tower degree the refinement moves may build.
const FIELD_DEGREE_CAP: usize = 512;

/// Longest run of consecutive ramified base changes that fail to split the
/// polynomial before the refinement gives up. A reducible polynomial whose
/// face residual stays primary over every radical step never splits this
/// way, and each fruitless step squares the tower; cutting the run keeps
/// such inputs failing fast (with a cap error) instead of grinding to the
/// degree cap.
const BASE_CHANGE_STALL_CAP: u32 = 4;

/// Cap on subset tests during rational recombination after a base change.
const RECOMBINE_CAP: usize = 1 << 16;

/// Valuations at or above this fraction of full precision count as zero.
fn margin(k: &LocalField) -> i64 {
    k.prec_val() / 2
}

fn near_zero(k: &LocalField, x: &Elt) -> bool {
    k.val(x).map_or(true, |v| v >= margin(k))
}

fn poly_near_equal(k: &LocalField, a: &LPoly, b: &LPoly) -> bool {
    let d = psub(k, a, b);
    min_val(k, &d).map_or(true, |v| v >= margin(k))
}

/// Factors a monic squarefree polynomial into monic irreducible factors.
///
/// Coefficients must be integral (they always are in this representation);
/// non-squarefree input eventually shows up as a precision failure rather
/// than a wrong answer.
pub fn factor_squarefree(k: &LocalField, f: &LPoly) -> Result<Vec<LPoly>, Error> {
    let mut f = f.clone();
    ptrim(k, &mut f);
    let d = pdeg(k, &f);
    if !k.is_one(&f[d]) {
        return Err(Error::invalid("factor_squarefree: polynomial must be monic"));
    }
    let factors = fac(k, &f, 0, 0)?;
    // Verify the reconstruction within the precision margin.
    let mut prod = vec![k.one()];
    let mut total = 0;
    for q in &factors {
        total += pdeg(k, q);
        prod = pmul(k, &prod, q);
    }
    if total != d || !poly_near_equal(k, &prod, &f) {
        return Err(Error::PrecisionCeiling(
            "factor verification failed; raise precision".into(),
        ));
    }
    Ok(factors)
}

/// The roots of `f` (a polynomial over `kf`) that lie in `l`, where `kf` is a
/// prefix of the tower `l` (i.e. `l` was built by extending `kf`).
pub fn roots_in(kf: &LocalField, f: &LPoly, l: &LocalField) -> Result<Vec<Elt>, Error> {
    let fl: LPoly = f.iter().map(|c| l.embed_from(kf, c)).collect();
    let fl = poly::pmonic(l, &fl)?;
    let mut roots = Vec::new();
    for q in factor_squarefree(l, &fl)? {
        if pdeg(l, &q) == 1 {
            roots.push(l.neg(&q[0]));
        }
    }
    Ok(roots)
}

fn depth_cap(k: &LocalField) -> u32 {
    (4 * k.prec_val()).max(64) as u32
}

fn fac(k: &LocalField, f: &LPoly, depth: u32, stall: u32) -> Result<Vec<LPoly>, Error> {
    if depth > depth_cap(k) {
        return Err(Error::PrecisionCeiling(
            "factorization recursion exceeded its depth budget".into(),
        ));
    }
    let n = pdeg(k, f);
    if n <= 1 {
        return Ok(if n == 0 { vec![] } else { vec![f.clone()] });
    }
    let np = newton_polygon(k, f)?;
    if np.zero_prefix >= 1 {
        // A root indistinguishable from zero. Conjugate roots share a
        // valuation, so a prefix of exactly one certifies a linear factor;
        // anything longer is ambiguous at this precision.
        if np.zero_prefix > 1 {
            return Err(Error::PrecisionCeiling(
                "multiple roots below precision; raise precision".into(),
            ));
        }
        let quot: LPoly = f[1..].to_vec();
        let mut out = vec![vec![k.zero(), k.one()]];
        out.extend(fac(k, &quot, depth + 1, 0)?);
        return Ok(out);
    }
    let faces = np.faces();
    if faces.len() > 1 {
        let last = *faces.last().unwrap();
        if last.den != 1 {
            return base_change(k, f, last.den as usize, depth, stall);
        }
        // Split the rightmost face off at slope zero.
        let v = -last.num;
        debug_assert!(v >= 0);
        let g = downsub(k, f, v)?;
        let gbar = reduce_poly(k, &g);
        let r = k.residue();
        let ell = last.len;
        debug_assert_eq!(r.pdeg(&gbar), n);
        let mut low = vec![r.zero(); n - ell];
        low.push(r.one()); // x^(n - ell)
        let high: FFPoly = gbar[n - ell..].to_vec();
        let (gg, hh) = poly::hensel_split(k, &g, &low, &high)?;
        let mut out = fac(k, &upsub(k, &gg, v), depth + 1, 0)?;
        out.extend(fac(k, &upsub(k, &hh, v), depth + 1, 0)?);
        return Ok(out);
    }
    // Single face of slope -h/e (in lowest terms).
    let face = faces[0];
    let h = -face.num;
    let e = face.den;
    debug_assert!(h >= 0 && e >= 1);
    if h == 0 {
        return factor_slope0(k, f, depth, stall);
    }
    if e == 1 {
        let g = downsub(k, f, h)?;
        let factors = factor_slope0(k, &g, depth, stall)?;
        return Ok(factors.iter().map(|q| upsub(k, q, h)).collect());
    }
    // Fractional slope: the residual lives on indices divisible by e.
    let psi = residual_poly(k, f, h, e)?;
    if k.residue().is_irreducible(&psi) {
        // Ramification e and residue degree deg(psi) account for all of n.
        return Ok(vec![f.clone()]);
    }
    base_change(k, f, e as usize, depth, stall)
}

/// Factors a monic polynomial whose polygon is a single face of slope zero
/// (all roots are units).
fn factor_slope0(k: &LocalField, f: &LPoly, depth: u32, stall: u32) -> Result<Vec<LPoly>, Error> {
    let n = pdeg(k, f);
    let r = k.residue();
    let fbar = reduce_poly(k, f);
    debug_assert_eq!(r.pdeg(&fbar), n);
    let fctrs = r.factor(&fbar);
    if fctrs.len() > 1 {
        // Coprime split: first residue factor (with multiplicity) vs. rest.
        let (phi0, m0) = &fctrs[0];
        let mut gbar = r.pone();
        for _ in 0..*m0 {
            gbar = r.pmul(&gbar, phi0);
        }
        let mut hbar = r.pone();
        for (phi, m) in &fctrs[1..] {
            for _ in 0..*m {
                hbar = r.pmul(&hbar, phi);
            }
        }
        let (g, h) = poly::hensel_split(k, f, &gbar, &hbar)?;
        let mut out = fac(k, &g, depth + 1, 0)?;
        out.extend(fac(k, &h, depth + 1, 0)?);
        return Ok(out);
    }
    let (phi, mult) = &fctrs[0];
    if *mult == 1 {
        // Irreducible residue of full degree: unramified, irreducible.
        return Ok(vec![f.clone()]);
    }
    let fphi = r.pdeg(phi);
    if fphi > 1 {
        return unram_adjoin(k, f, phi, depth, stall);
    }
    // Residue is (z - c)^n: shift by the lifted root and recurse.
    let c = k.lift(&r.neg(&phi[0]));
    let g = poly::substitute_shifted(k, f, &c);
    let factors = fac(k, &g, depth + 1, stall)?;
    let back = k.neg(&c);
    Ok(factors
        .iter()
        .map(|q| poly::substitute_shifted(k, q, &back))
        .collect())
}

/// `f(pi^v y) / pi^(n v)`: divides coefficient `i` by `pi^((n - i) v)`.
fn downsub(k: &LocalField, f: &LPoly, v: i64) -> Result<LPoly, Error> {
    if v == 0 {
        return Ok(f.clone());
    }
    let n = pdeg(k, f) as i64;
    f.iter()
        .enumerate()
        .map(|(i, c)| k.shift_down(c, (n - i as i64) * v))
        .collect()
}

/// Inverse of [`downsub`] on a monic factor: coefficient `i` gains
/// `pi^((deg - i) v)`.
fn upsub(k: &LocalField, q: &LPoly, v: i64) -> LPoly {
    if v == 0 {
        return q.clone();
    }
    let d = pdeg(k, q) as i64;
    let pi = k.uniformizer();
    q.iter()
        .enumerate()
        .map(|(i, c)| k.mul(c, &k.pow(&pi, ((d - i as i64) * v) as u64)))
        .collect()
}

/// Residual polynomial of a single face of slope `-h/e` running the full
/// width of the polygon: coefficient `j` is the residue of
/// `a_(j e) / pi^((n/e - j) h)`.
fn residual_poly(k: &LocalField, f: &LPoly, h: i64, e: i64) -> Result<FFPoly, Error> {
    let n = pdeg(k, f) as i64;
    debug_assert_eq!(n % e, 0);
    let l = n / e;
    let r = k.residue();
    let mut out = Vec::with_capacity(l as usize + 1);
    for j in 0..=l {
        let c = &f[(j * e) as usize];
        let need = (l - j) * h;
        match k.val(c) {
            Some(v) if v == need => {
                let shifted = k.shift_down(c, need)?;
                out.push(k.reduce(&shifted));
            }
            Some(v) if v > need => out.push(r.zero()),
            None => out.push(r.zero()),
            _ => {
                return Err(Error::PrecisionCeiling(
                    "residual extraction found a point below the face".into(),
                ))
            }
        }
    }
    Ok(out)
}

/// Adjoins the unramified extension matching an irreducible residue factor,
/// factors upstairs, and recombines Frobenius orbits into factors below.
fn unram_adjoin(
    k: &LocalField,
    f: &LPoly,
    phibar: &FFPoly,
    depth: u32,
    stall: u32,
) -> Result<Vec<LPoly>, Error> {
    let r = k.residue();
    let fphi = r.pdeg(phibar);
    if k.degree() * fphi > FIELD_DEGREE_CAP {
        return Err(Error::cap("local field tower degree exceeds its cap"));
    }
    let step = lift_poly(k, phibar);
    let m = k.extend(step, StepKind::Unramified)?;
    let fm: LPoly = f.iter().map(|c| m.embed(c)).collect();
    let upstairs = fac(&m, &fm, depth + 1, stall)?;
    recombine_frobenius(&m, k, &upstairs)
}

/// The image of the top generator of an unramified step under the relative
/// Frobenius over the base, by Newton iteration from the residue level.
fn frobenius_gen(m: &LocalField, base: &LocalField) -> Result<Elt, Error> {
    let r = m.residue();
    let q0 = base.residue().q();
    let gamma = m.gen();
    let target = r.pow(&m.reduce(&gamma), q0);
    let step: LPoly = m
        .step_poly()
        .expect("unramified step")
        .iter()
        .map(|c| m.embed(c))
        .collect();
    let dstep = poly::pderiv(m, &step);
    let mut z = m.lift(&target);
    let iters = 2 * (64 - (m.prec_val() as u64).leading_zeros()) as usize + 4;
    for _ in 0..iters {
        let fz = poly::peval(m, &step, &z);
        if m.is_zero(&fz) {
            break;
        }
        let dfz = poly::peval(m, &dstep, &z);
        let delta = m.div_exact(&fz, &dfz)?;
        z = m.sub(&z, &delta);
    }
    if !near_zero(m, &poly::peval(m, &step, &z)) {
        return Err(Error::PrecisionCeiling("Frobenius lift did not converge".into()));
    }
    Ok(z)
}

/// Applies the relative Frobenius coefficient-wise to a polynomial over an
/// unramified step (chunks over the base are fixed; the generator maps to
/// `sigma_gamma`).
fn frobenius_poly(m: &LocalField, base: &LocalField, sigma_gamma: &Elt, a: &LPoly) -> LPoly {
    let db = base.degree();
    let rel = m.degree() / db;
    a.iter()
        .map(|c| {
            let mut acc = m.zero();
            for j in (0..rel).rev() {
                let chunk: Elt = c[j * db..(j + 1) * db].to_vec();
                acc = m.add(&m.mul(&acc, sigma_gamma), &m.embed(&chunk));
            }
            acc
        })
        .collect()
}

/// Groups factors over an unramified extension into Frobenius orbits and
/// returns the orbit products as polynomials over the base.
fn recombine_frobenius(
    m: &LocalField,
    base: &LocalField,
    upstairs: &[LPoly],
) -> Result<Vec<LPoly>, Error> {
    let sigma_gamma = frobenius_gen(m, base)?;
    let rel = m.degree() / base.degree();
    let mut used = vec![false; upstairs.len()];
    let mut out = Vec::new();
    for i in 0..upstairs.len() {
        if used[i] {
            continue;
        }
        used[i] = true;
        let mut prod = upstairs[i].clone();
        let mut cur = frobenius_poly(m, base, &sigma_gamma, &upstairs[i]);
        for _ in 0..rel {
            if poly_near_equal(m, &cur, &upstairs[i]) {
                break;
            }
            let j = (0..upstairs.len())
                .find(|&j| !used[j] && poly_near_equal(m, &cur, &upstairs[j]))
                .ok_or_else(|| {
                    Error::PrecisionCeiling("Frobenius orbit matching failed".into())
                })?;
            used[j] = true;
            prod = pmul(m, &prod, &upstairs[j]);
            cur = frobenius_poly(m, base, &sigma_gamma, &cur);
        }
        out.push(project_poly(m, base, &prod)?);
    }
    Ok(out)
}

/// Projects a polynomial with (approximately) base-rational coefficients
/// down to the base field of the top step.
fn project_poly(l: &LocalField, base: &LocalField, a: &LPoly) -> Result<LPoly, Error> {
    let db = base.degree();
    a.iter()
        .map(|c| {
            let chunk0: Elt = c[..db].to_vec();
            let diff = l.sub(c, &l.embed(&chunk0));
            if !near_zero(l, &diff) {
                return Err(Error::PrecisionCeiling(
                    "coefficient expected to be rational over the base is not".into(),
                ));
            }
            Ok(chunk0)
        })
        .collect()
}

/// Adjoins `x^e - pi`, factors upstairs, and recombines minimal subsets whose
/// products have coefficients in the base field. Minimality plus unique
/// factorization upstairs makes each recombined product irreducible below.
fn base_change(
    k: &LocalField,
    f: &LPoly,
    e: usize,
    depth: u32,
    stall: u32,
) -> Result<Vec<LPoly>, Error> {
    if stall >= BASE_CHANGE_STALL_CAP {
        return Err(Error::cap("ramified refinement stalled without splitting"));
    }
    if k.degree() * e > FIELD_DEGREE_CAP {
        return Err(Error::cap("local field tower degree exceeds its cap"));
    }
    let mut step = vec![k.neg(&k.uniformizer())];
    step.extend(std::iter::repeat(k.zero()).take(e - 1));
    step.push(k.one());
    let l = k.extend(step, StepKind::Eisenstein)?;
    let fl: LPoly = f.iter().map(|c| l.embed(c)).collect();
    let upstairs = fac(&l, &fl, depth + 1, stall + 1)?;
    recombine_subsets(&l, k, &upstairs, e)
}

/// Minimal-subset recombination after a ramified base change.
fn recombine_subsets(
    l: &LocalField,
    base: &LocalField,
    upstairs: &[LPoly],
    e: usize,
) -> Result<Vec<LPoly>, Error> {
    let t = upstairs.len();
    // Constant-term valuations, used to prune: a base-rational product has
    // constant valuation divisible by the relative ramification e.
    let cvals: Vec<Option<i64>> = upstairs.iter().map(|q| l.val(&q[0])).collect();
    let mut used = vec![false; t];
    let mut out = Vec::new();
    let mut budget = RECOMBINE_CAP;
    for a in 0..t {
        if used[a] {
            continue;
        }
        let avail: Vec<usize> = (a + 1..t).filter(|&j| !used[j]).collect();
        let mut found = false;
        'sizes: for size in 0..=avail.len() {
            let mut combo = Combos::new(avail.len(), size);
            while let Some(pick) = combo.next() {
                if budget == 0 {
                    return Err(Error::cap("factor recombination search exceeded its cap"));
                }
                budget -= 1;
                let subset: Vec<usize> =
                    std::iter::once(a).chain(pick.iter().map(|&i| avail[i])).collect();
                let vsum: i64 = subset.iter().map(|&i| cvals[i].unwrap_or(0)).sum();
                if vsum % e as i64 != 0 {
                    continue;
                }
                let mut prod = upstairs[subset[0]].clone();
                for &i in &subset[1..] {
                    prod = pmul(l, &prod, &upstairs[i]);
                }
                if let Ok(p) = project_poly(l, base, &prod) {
                    for &i in &subset {
                        used[i] = true;
                    }
                    out.push(p);
                    found = true;
                    break 'sizes;
                }
            }
        }
        if !found {
            return Err(Error::PrecisionCeiling(
                "no rational recombination found; raise precision".into(),
            ));
        }
    }
    Ok(out)
}

/// Iterator over `size`-subsets of `0..n` (lexicographic).
struct Combos {
    n: usize,
    idx: Vec<usize>,
    fresh: bool,
}

impl Combos {
    fn new(n: usize, size: usize) -> Self {
        Combos {
            n,
            idx: (0..size).collect(),
            fresh: true,
        }
    }

    fn next(&mut self) -> Option<&[usize]> {
        if self.fresh {
            if self.idx.len() > self.n {
                return None;
            }
            self.fresh = false;
            return Some(&self.idx);
        }
        let k = self.idx.len();
        if k == 0 {
            return None;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if self.idx[i] < self.n - (k - i) {
                self.idx[i] += 1;
                for j in i + 1..k {
                    self.idx[j] = self.idx[j - 1] + 1;
                }
                return Some(&self.idx);
            }
        }
    }
}
