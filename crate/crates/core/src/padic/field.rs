//! Local fields as towers of unramified and Eisenstein steps over `Q_p`.
//!
//! A field is `Q_p` or an extension of another field by a monic step
//! polynomial that is either unramified (irreducible residue) or Eisenstein.
//! Restricting steps to these two shapes keeps the ring of integers equal to
//! the span of the obvious power basis, so every integral element is a flat
//! coefficient vector over `Z/p^N` relative to the products of generator
//! powers, and valuations computed from coefficient valuations are exact.
//!
//! All arithmetic happens modulo `p^N` for the field's working precision `N`.
//! Division (`div_exact`) is a p-adic linear solve against the multiplication
//! matrix; it loses `v_p(det)` digits off the top, which the precision policy
//! absorbs by starting generously and doubling on failure.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::ff::{FFElt, FFPoly, FF};
use crate::Error;

/// Whether a tower step is unramified or totally ramified.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StepKind {
    /// Monic with irreducible residue polynomial; extends the residue field.
    Unramified,
    /// Eisenstein; extends the value group.
    Eisenstein,
}

/// An integral element of a [`LocalField`]: flat coefficients over `Z/p^N`
/// relative to the absolute power basis, little-endian in the tower
/// generators (lowest step fastest).
pub type Elt = Vec<BigInt>;

struct Step {
    /// Monic step polynomial, coefficients as flat elements of the base.
    poly: Vec<Elt>,
    kind: StepKind,
}

struct LF {
    p: u64,
    nprec: u32,
    pmod: BigInt,
    base: Option<LocalField>,
    step: Option<Step>,
    /// Absolute degree over `Q_p`.
    degree: usize,
    /// Absolute ramification index.
    e: usize,
    /// Absolute residue degree.
    f: usize,
    residue: FF,
    /// Residue of each absolute basis monomial.
    res_basis: Vec<FFElt>,
    /// Flat lift of each `F_p`-basis monomial `t^k` of the residue field.
    res_lift: Vec<Elt>,
    /// A flat element of valuation exactly 1.
    uniformizer: Elt,
}

/// A p-adic field presented as a tower of unramified/Eisenstein steps.
///
/// Cheap to clone (shared handle). Two handles represent literally the same
/// tower only if cloned from each other; isomorphism testing is a separate,
/// more expensive operation ([`super::is_subfield`] both ways).
#[derive(Clone)]
pub struct LocalField(Arc<LF>);

impl std::fmt::Debug for LocalField {
    fn fmt(&self, fmt: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            fmt,
            "LocalField(p={}, degree={}, e={}, f={}, prec={})",
            self.p(),
            self.degree(),
            self.e(),
            self.f(),
            self.nprec()
        )
    }
}

impl LocalField {
    /// The base field `Q_p` at `nprec` p-adic digits of working precision.
    pub fn qp(p: u64, nprec: u32) -> Self {
        assert!(nprec >= 2, "unreasonably small precision");
        let pmod = BigInt::from(p).pow(nprec);
        let residue = FF::prime_field(p);
        LocalField(Arc::new(LF {
            p,
            nprec,
            pmod,
            base: None,
            step: None,
            degree: 1,
            e: 1,
            f: 1,
            residue,
            res_basis: vec![vec![1]],
            res_lift: vec![vec![BigInt::one()]],
            uniformizer: vec![BigInt::from(p)],
        }))
    }

    /// Extends this field by a monic step polynomial.
    ///
    /// For [`StepKind::Unramified`] the residue of the step must be
    /// irreducible over the residue field; for [`StepKind::Eisenstein`] the
    /// coefficients must satisfy the Eisenstein condition.
    pub fn extend(&self, poly: Vec<Elt>, kind: StepKind) -> Result<LocalField, Error> {
        let m = poly.len().checked_sub(1).filter(|&m| m >= 1).ok_or_else(|| {
            Error::invalid("extend: step polynomial must have degree >= 1")
        })?;
        if !self.is_one(&poly[m]) {
            return Err(Error::invalid("extend: step polynomial must be monic"));
        }
        for c in &poly {
            if c.len() != self.degree() {
                return Err(Error::invalid("extend: coefficient is not an element of the base"));
            }
        }
        let lf = &*self.0;
        let degree = lf.degree * m;
        let (e, f) = match kind {
            StepKind::Unramified => (lf.e, lf.f * m),
            StepKind::Eisenstein => (lf.e * m, lf.f),
        };
        // Validate the step shape.
        match kind {
            StepKind::Eisenstein => {
                for (i, c) in poly.iter().enumerate().take(m) {
                    let v = self.val(c);
                    let need = if i == 0 { Some(1) } else { None };
                    match (v, need) {
                        (Some(1), Some(1)) => {}
                        (Some(v), Some(_)) if v != 1 => {
                            return Err(Error::invalid("extend: not Eisenstein (constant term)"))
                        }
                        (None, Some(_)) => {
                            return Err(Error::invalid("extend: not Eisenstein (constant term)"))
                        }
                        (Some(v), None) if v < 1 => {
                            return Err(Error::invalid("extend: not Eisenstein (low coefficient)"))
                        }
                        _ => {}
                    }
                }
            }
            StepKind::Unramified => {
                let res: FFPoly = poly.iter().map(|c| self.reduce(c)).collect();
                if self.residue().pdeg(&res) != m || !self.residue().is_irreducible(&res) {
                    return Err(Error::invalid(
                        "extend: unramified step residue is not irreducible of full degree",
                    ));
                }
            }
        }
        // Residue data.
        let (residue, res_basis, res_lift, uniformizer);
        match kind {
            StepKind::Eisenstein => {
                residue = lf.residue.clone();
                let mut rb = Vec::with_capacity(degree);
                for j in 0..m {
                    for i in 0..lf.degree {
                        rb.push(if j == 0 {
                            lf.res_basis[i].clone()
                        } else {
                            residue.zero()
                        });
                    }
                }
                res_basis = rb;
                res_lift = lf
                    .res_lift
                    .iter()
                    .map(|l| embed_vec(l, degree))
                    .collect();
                // The new generator is the uniformizer.
                let mut u = vec![BigInt::zero(); degree];
                u[lf.degree] = BigInt::one();
                uniformizer = u;
            }
            StepKind::Unramified => {
                let fnew = lf.f * m;
                let rnew = FF::new(lf.p, fnew);
                // Embed the old residue field: a root of its modulus in rnew.
                let old = lf.residue.clone();
                let old_mod: FFPoly = old
                    .modulus()
                    .iter()
                    .map(|&c| rnew.from_u64(c))
                    .collect();
                let old_gen_img = rnew
                    .roots(&old_mod)
                    .into_iter()
                    .next()
                    .expect("residue embedding root must exist");
                let emb = |x: &FFElt| -> FFElt {
                    // x = sum x_k t^k over F_p.
                    let mut acc = rnew.zero();
                    let mut pw = rnew.one();
                    for &c in x {
                        let term = rnew.mul(&pw, &rnew.from_u64(c));
                        acc = rnew.add(&acc, &term);
                        pw = rnew.mul(&pw, &old_gen_img);
                    }
                    acc
                };
                // Image of the step generator: a root of the mapped residue.
                let res_poly: FFPoly = poly.iter().map(|c| emb(&self.reduce(c))).collect();
                let gen_img = rnew
                    .roots(&res_poly)
                    .into_iter()
                    .next()
                    .expect("unramified step residue must have a root upstairs");
                let mut rb = Vec::with_capacity(degree);
                let mut gpow = rnew.one();
                for _j in 0..m {
                    for i in 0..lf.degree {
                        rb.push(rnew.mul(&emb(&lf.res_basis[i]), &gpow));
                    }
                    gpow = rnew.mul(&gpow, &gen_img);
                }
                res_basis = rb;
                // Lift each t^k by solving an F_p-linear system against the
                // basis residues.
                let p = lf.p;
                let mut lifts = Vec::with_capacity(fnew);
                for k in 0..fnew {
                    let mut target = rnew.zero();
                    target[k] = 1;
                    let sol = solve_fp(p, &res_basis, &target).expect(
                        "basis residues must span the residue field",
                    );
                    let lift: Elt = sol.into_iter().map(BigInt::from).collect();
                    lifts.push(lift);
                }
                res_lift = lifts;
                residue = rnew;
                uniformizer = embed_vec(&lf.uniformizer, degree);
            }
        }
        Ok(LocalField(Arc::new(LF {
            p: lf.p,
            nprec: lf.nprec,
            pmod: lf.pmod.clone(),
            base: Some(self.clone()),
            step: Some(Step { poly, kind }),
            degree,
            e,
            f,
            residue,
            res_basis,
            res_lift,
            uniformizer,
        })))
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn nprec(&self) -> u32 {
        self.0.nprec
    }

    /// The coefficient modulus `p^N`.
    pub fn pmod(&self) -> &BigInt {
        &self.0.pmod
    }

    pub fn degree(&self) -> usize {
        self.0.degree
    }

    pub fn e(&self) -> usize {
        self.0.e
    }

    pub fn f(&self) -> usize {
        self.0.f
    }

    /// The base field, if this is an extension.
    pub fn base(&self) -> Option<&LocalField> {
        self.0.base.as_ref()
    }

    /// The monic step polynomial over the base, if this is an extension.
    pub fn step_poly(&self) -> Option<&[Elt]> {
        self.0.step.as_ref().map(|s| &s.poly[..])
    }

    pub fn step_kind(&self) -> Option<StepKind> {
        self.0.step.as_ref().map(|s| s.kind)
    }

    /// The residue field `F_{p^f}`.
    pub fn residue(&self) -> &FF {
        &self.0.residue
    }

    /// Valuations below this mean "indistinguishable from zero at working
    /// precision" (in uniformizer units of this field).
    pub fn prec_val(&self) -> i64 {
        self.0.e as i64 * self.0.nprec as i64
    }

    // ---- element constructors ----

    pub fn zero(&self) -> Elt {
        vec![BigInt::zero(); self.0.degree]
    }

    pub fn one(&self) -> Elt {
        self.from_bigint(&BigInt::one())
    }

    pub fn from_bigint(&self, n: &BigInt) -> Elt {
        let mut v = self.zero();
        v[0] = n.mod_floor(&self.0.pmod);
        v
    }

    pub fn from_i64(&self, n: i64) -> Elt {
        self.from_bigint(&BigInt::from(n))
    }

    /// The top tower generator (panics on `Q_p`).
    pub fn gen(&self) -> Elt {
        let base_deg = self.base().expect("gen: Q_p has no generator").degree();
        let mut v = self.zero();
        v[base_deg] = BigInt::one();
        v
    }

    /// A uniformizer (valuation exactly 1).
    pub fn uniformizer(&self) -> Elt {
        self.0.uniformizer.clone()
    }

    /// Embeds an element of the base field.
    pub fn embed(&self, x: &Elt) -> Elt {
        debug_assert_eq!(x.len(), self.base().map_or(1, |b| b.degree()));
        embed_vec(x, self.0.degree)
    }

    /// Embeds an element from any field lower in this tower.
    pub fn embed_from(&self, lower: &LocalField, x: &Elt) -> Elt {
        debug_assert_eq!(x.len(), lower.degree());
        embed_vec(x, self.0.degree)
    }

    // ---- ring operations ----

    pub fn is_zero(&self, a: &Elt) -> bool {
        a.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self, a: &Elt) -> bool {
        self.is_zero(&self.sub(a, &self.one()))
    }

    pub fn add(&self, a: &Elt, b: &Elt) -> Elt {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x + y).mod_floor(&self.0.pmod))
            .collect()
    }

    pub fn sub(&self, a: &Elt, b: &Elt) -> Elt {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).mod_floor(&self.0.pmod))
            .collect()
    }

    pub fn neg(&self, a: &Elt) -> Elt {
        a.iter().map(|x| (-x).mod_floor(&self.0.pmod)).collect()
    }

    pub fn scalar_mul(&self, a: &Elt, c: &BigInt) -> Elt {
        a.iter().map(|x| (x * c).mod_floor(&self.0.pmod)).collect()
    }

    pub fn mul(&self, a: &Elt, b: &Elt) -> Elt {
        debug_assert_eq!(a.len(), self.0.degree);
        debug_assert_eq!(b.len(), self.0.degree);
        let lf = &*self.0;
        let (base, step) = match (&lf.base, &lf.step) {
            (Some(base), Some(step)) => (base, step),
            _ => {
                return vec![(&a[0] * &b[0]).mod_floor(&lf.pmod)];
            }
        };
        let db = base.degree();
        let m = lf.degree / db;
        // Chunked schoolbook product in the top generator.
        let mut prod: Vec<Elt> = vec![base.zero(); 2 * m - 1];
        for j in 0..m {
            let aj = &a[j * db..(j + 1) * db];
            if aj.iter().all(|c| c.is_zero()) {
                continue;
            }
            let aj = aj.to_vec();
            for k in 0..m {
                let bk = &b[k * db..(k + 1) * db];
                if bk.iter().all(|c| c.is_zero()) {
                    continue;
                }
                let t = base.mul(&aj, &bk.to_vec());
                prod[j + k] = base.add(&prod[j + k], &t);
            }
        }
        // Reduce by the monic step polynomial.
        for idx in (m..2 * m - 1).rev() {
            let c = std::mem::replace(&mut prod[idx], base.zero());
            if base.is_zero(&c) {
                continue;
            }
            for k in 0..m {
                let t = base.mul(&c, &step.poly[k]);
                prod[idx - m + k] = base.sub(&prod[idx - m + k], &t);
            }
        }
        let mut out = Vec::with_capacity(lf.degree);
        for chunk in prod.into_iter().take(m) {
            out.extend(chunk);
        }
        out
    }

    pub fn pow(&self, a: &Elt, mut n: u64) -> Elt {
        let mut acc = self.one();
        let mut base = a.clone();
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            n >>= 1;
        }
        acc
    }

    // ---- valuation and residue ----

    /// Valuation in uniformizer units of this field; `None` means the element
    /// is zero at working precision.
    pub fn val(&self, a: &Elt) -> Option<i64> {
        let lf = &*self.0;
        let (base, step) = match (&lf.base, &lf.step) {
            (Some(base), Some(step)) => (base, step),
            _ => {
                if a[0].is_zero() {
                    return None;
                }
                let p = BigInt::from(lf.p);
                let mut v = 0i64;
                let mut n = a[0].clone();
                while (&n % &p).is_zero() {
                    n /= &p;
                    v += 1;
                }
                return Some(v);
            }
        };
        let db = base.degree();
        let m = lf.degree / db;
        let mut best: Option<i64> = None;
        for j in 0..m {
            let chunk = a[j * db..(j + 1) * db].to_vec();
            if let Some(vb) = base.val(&chunk) {
                let v = match step.kind {
                    StepKind::Eisenstein => vb * m as i64 + j as i64,
                    StepKind::Unramified => vb,
                };
                best = Some(best.map_or(v, |b| b.min(v)));
            }
        }
        best
    }

    /// The image of an integral element in the residue field.
    pub fn reduce(&self, a: &Elt) -> FFElt {
        let lf = &*self.0;
        let r = &lf.residue;
        let mut acc = r.zero();
        let p = BigInt::from(lf.p);
        for (c, rb) in a.iter().zip(&lf.res_basis) {
            let cm = c.mod_floor(&p);
            let cu: u64 = cm.try_into().expect("residue fits u64");
            if cu == 0 {
                continue;
            }
            let scaled = r.mul(rb, &r.from_u64(cu));
            acc = r.add(&acc, &scaled);
        }
        acc
    }

    /// A fixed integral lift of a residue element.
    pub fn lift(&self, x: &FFElt) -> Elt {
        let lf = &*self.0;
        let mut acc = self.zero();
        for (k, &c) in x.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let t = self.scalar_mul(&lf.res_lift[k], &BigInt::from(c));
            acc = self.add(&acc, &t);
        }
        acc
    }

    // ---- division ----

    /// Exact division `a / b` via a p-adic linear solve. Fails when `b` is
    /// zero at precision or the quotient is not integral.
    pub fn div_exact(&self, a: &Elt, b: &Elt) -> Result<Elt, Error> {
        let d = self.0.degree;
        if self.is_zero(b) {
            return Err(Error::PrecisionCeiling(
                "division by an element that is zero at working precision".into(),
            ));
        }
        if d == 1 {
            return div_padic(&a[0], &b[0], self.0.p, &self.0.pmod).map(|q| vec![q]);
        }
        // Columns of the multiplication-by-b matrix.
        let mut cols: Vec<Elt> = Vec::with_capacity(d);
        for i in 0..d {
            let mut e = self.zero();
            e[i] = BigInt::one();
            cols.push(self.mul(b, &e));
        }
        // Row-major matrix with the augmented column.
        let mut mat: Vec<Vec<BigInt>> = (0..d)
            .map(|r| {
                let mut row: Vec<BigInt> = (0..d).map(|c| cols[c][r].clone()).collect();
                row.push(a[r].clone());
                row
            })
            .collect();
        let p = BigInt::from(self.0.p);
        let pmod = &self.0.pmod;
        let nprec = self.0.nprec as i64;
        let mut pivot_of_col: Vec<Option<usize>> = vec![None; d];
        let mut used_row = vec![false; d];
        for col in 0..d {
            // Minimal-valuation pivot in this column among unused rows.
            let mut best: Option<(usize, i64)> = None;
            for (r, row) in mat.iter().enumerate() {
                if used_row[r] || row[col].is_zero() {
                    continue;
                }
                let v = vp(&row[col], &p);
                if best.map_or(true, |(_, bv)| v < bv) {
                    best = Some((r, v));
                }
            }
            let (r, v) = match best {
                Some(x) => x,
                None => continue,
            };
            if v >= nprec {
                continue;
            }
            // Normalize the pivot row: divide the unit part out.
            let unit = &mat[r][col] / p.pow(v as u32);
            let unit_inv = modinv(&unit, pmod)
                .ok_or_else(|| Error::PrecisionCeiling("singular division".into()))?;
            for x in mat[r].iter_mut() {
                *x = (&*x * &unit_inv).mod_floor(pmod);
            }
            // Eliminate from other rows (all of which have valuation >= v in
            // this column by pivot choice).
            let pivot_row = mat[r].clone();
            let pv = p.pow(v as u32);
            for (rr, row) in mat.iter_mut().enumerate() {
                if rr == r || row[col].is_zero() {
                    continue;
                }
                let factor = &row[col] / &pv;
                for (x, pr) in row.iter_mut().zip(&pivot_row) {
                    *x = (&*x - &factor * pr).mod_floor(pmod);
                }
            }
            used_row[r] = true;
            pivot_of_col[col] = Some(r);
        }
        // Back-substitute: each pivot column has a single p^v pivot.
        let mut out = self.zero();
        for col in 0..d {
            match pivot_of_col[col] {
                Some(r) => {
                    let v = vp(&mat[r][col], &p);
                    let pv = p.pow(v as u32);
                    let rhs = &mat[r][d];
                    if !(rhs % &pv).is_zero() {
                        return Err(Error::PrecisionCeiling(
                            "non-integral quotient in div_exact".into(),
                        ));
                    }
                    out[col] = (rhs / &pv).mod_floor(pmod);
                }
                None => {
                    // Rank-deficient at precision: acceptable only if the
                    // system is consistent with a zero coordinate.
                    out[col] = BigInt::zero();
                }
            }
        }
        // Consistency check (mod a precision margin): b * out == a up to the
        // digits lost to the determinant valuation.
        let check = self.sub(&self.mul(b, &out), a);
        if let Some(v) = self.val(&check) {
            if v < self.prec_val() / 2 {
                return Err(Error::PrecisionCeiling(
                    "div_exact verification failed; raise precision".into(),
                ));
            }
        }
        Ok(out)
    }

    /// Inverse of a unit.
    pub fn inv_unit(&self, a: &Elt) -> Result<Elt, Error> {
        if self.val(a) != Some(0) {
            return Err(Error::invalid("inv_unit: element is not a unit"));
        }
        self.div_exact(&self.one(), a)
    }

    /// Truncates an element modulo `pi^kappa`: the result is congruent to `a`
    /// and every coordinate carries only the digits below the cutoff.
    pub fn trunc_val(&self, a: &Elt, kappa: i64) -> Elt {
        if kappa >= self.prec_val() {
            return a.clone();
        }
        if kappa <= 0 {
            return self.zero();
        }
        let e = self.0.e as i64;
        let p = BigInt::from(self.0.p);
        let d = self.0.degree;
        a.iter()
            .enumerate()
            .map(|(i, c)| {
                // Valuation of the i-th basis monomial.
                let mut unit = self.zero();
                unit[i] = BigInt::one();
                let vi = self.val(&unit).expect("basis monomial is nonzero");
                let digits = (kappa - vi + e - 1).div_euclid(e).clamp(0, self.0.nprec as i64);
                c.mod_floor(&p.pow(digits as u32))
            })
            .take(d)
            .collect()
    }

    /// Divides by the `t`-th power of the uniformizer (must be exact).
    pub fn shift_down(&self, a: &Elt, t: i64) -> Result<Elt, Error> {
        if t == 0 {
            return Ok(a.clone());
        }
        assert!(t > 0);
        let mut cur = a.clone();
        // Divide by modest powers at a time to keep matrices well-conditioned.
        let u = self.uniformizer();
        let mut left = t;
        while left > 0 {
            let chunk = left.min(self.0.e as i64);
            let up = self.pow(&u, chunk as u64);
            cur = self.div_exact(&cur, &up)?;
            left -= chunk;
        }
        Ok(cur)
    }
}

/// Pads a flat vector with zeros up to `degree` (embedding of a lower field).
fn embed_vec(x: &Elt, degree: usize) -> Elt {
    let mut v = x.clone();
    v.resize(degree, BigInt::zero());
    v
}

/// `v_p` of a nonzero integer.
fn vp(n: &BigInt, p: &BigInt) -> i64 {
    debug_assert!(!n.is_zero());
    let mut v = 0;
    let mut m = n.abs();
    while (&m % p).is_zero() {
        m /= p;
        v += 1;
    }
    v
}

/// Modular inverse of a unit modulo `m`.
fn modinv(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.extended_gcd(m);
    if g.gcd.is_one() {
        Some(g.x.mod_floor(m))
    } else {
        None
    }
}

/// Exact p-adic division of scalars modulo `pmod`.
fn div_padic(a: &BigInt, b: &BigInt, p: u64, pmod: &BigInt) -> Result<BigInt, Error> {
    if b.is_zero() {
        return Err(Error::PrecisionCeiling("scalar division by zero at precision".into()));
    }
    let pb = BigInt::from(p);
    let v = vp(b, &pb);
    let pv = pb.pow(v as u32);
    if !(a % &pv).is_zero() {
        return Err(Error::PrecisionCeiling("non-integral scalar quotient".into()));
    }
    let unit = b / &pv;
    let inv = modinv(&unit, pmod)
        .ok_or_else(|| Error::PrecisionCeiling("scalar division: no inverse".into()))?;
    Ok(((a / &pv) * inv).mod_floor(pmod))
}

/// Solves `sum_i x_i cols[i] = target` over `F_p` (columns are residue-field
/// elements viewed as `F_p`-vectors). Returns one solution.
fn solve_fp(p: u64, cols: &[FFElt], target: &FFElt) -> Option<Vec<u64>> {
    let rows = target.len();
    let ncols = cols.len();
    let mut mat: Vec<Vec<u64>> = (0..rows)
        .map(|r| {
            let mut row: Vec<u64> = cols.iter().map(|c| c[r] % p).collect();
            row.push(target[r] % p);
            row
        })
        .collect();
    let inv_mod_p = |a: u64| -> u64 {
        // p is prime and small; Fermat.
        let mut acc = 1u64;
        let mut b = a % p;
        let mut e = p - 2;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        acc
    };
    let mut pivot_of_col = vec![None; ncols];
    let mut used = vec![false; rows];
    for col in 0..ncols {
        let r = match (0..rows).find(|&r| !used[r] && mat[r][col] % p != 0) {
            Some(r) => r,
            None => continue,
        };
        let piv_inv = inv_mod_p(mat[r][col]);
        for x in mat[r].iter_mut() {
            *x = *x * piv_inv % p;
        }
        let prow = mat[r].clone();
        for (rr, row) in mat.iter_mut().enumerate() {
            if rr != r && row[col] % p != 0 {
                let f = row[col];
                for (x, pc) in row.iter_mut().zip(&prow) {
                    *x = (*x + (p - f % p) * pc) % p;
                }
            }
        }
        used[r] = true;
        pivot_of_col[col] = Some(r);
    }
    // Consistency: no used-free row with nonzero augment.
    for (r, row) in mat.iter().enumerate() {
        if !used[r] && row[ncols] % p != 0 {
            return None;
        }
    }
    let mut sol = vec![0u64; ncols];
    for col in 0..ncols {
        if let Some(r) = pivot_of_col[col] {
            sol[col] = mat[r][ncols] % p;
        }
    }
    Some(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q2() -> LocalField {
        LocalField::qp(2, 32)
    }

    #[test]
    fn qp_scalar_arithmetic() {
        let k = q2();
        let a = k.from_i64(6);
        let b = k.from_i64(10);
        assert_eq!(k.val(&a), Some(1));
        assert_eq!(k.val(&b), Some(1));
        assert_eq!(k.val(&k.mul(&a, &b)), Some(2));
        assert_eq!(k.val(&k.add(&a, &b)), Some(4));
        let q = k.div_exact(&b, &a).unwrap();
        // 10/6 = 5/3 is a 2-adic unit; check by multiplying back.
        assert!(k.is_zero(&k.sub(&k.mul(&q, &a), &b)));
    }

    #[test]
    fn eisenstein_extension_valuations() {
        // Q_2(sqrt(2)): x^2 - 2.
        let k = q2();
        let poly = vec![k.from_i64(-2), k.zero(), k.one()];
        let l = k.extend(poly, StepKind::Eisenstein).unwrap();
        assert_eq!((l.degree(), l.e(), l.f()), (2, 2, 1));
        let pi = l.gen();
        assert_eq!(l.val(&pi), Some(1));
        // pi^2 = 2.
        let two = l.from_i64(2);
        assert!(l.is_zero(&l.sub(&l.mul(&pi, &pi), &two)));
        assert_eq!(l.val(&two), Some(2));
        // Division by the uniformizer.
        let d = l.shift_down(&two, 1).unwrap();
        assert!(l.is_zero(&l.sub(&d, &pi)));
        // Inverse of a unit.
        let u = l.add(&l.one(), &pi);
        let ui = l.inv_unit(&u).unwrap();
        assert!(l.is_zero(&l.sub(&l.mul(&u, &ui), &l.one())));
    }

    #[test]
    fn unramified_extension_residue() {
        // Q_2(u) with u^2 + u + 1 = 0: the unramified quadratic.
        let k = q2();
        let poly = vec![k.one(), k.one(), k.one()];
        let l = k.extend(poly, StepKind::Unramified).unwrap();
        assert_eq!((l.degree(), l.e(), l.f()), (2, 1, 2));
        assert_eq!(l.residue().q(), 4);
        let u = l.gen();
        assert_eq!(l.val(&u), Some(0));
        // reduce/lift round-trip on every residue element.
        for x in l.residue().elements() {
            assert_eq!(l.reduce(&l.lift(&x)), x);
        }
        // 2 is still a uniformizer.
        assert_eq!(l.val(&l.from_i64(2)), Some(1));
    }

    #[test]
    fn two_step_tower() {
        // Unramified quadratic, then Eisenstein quadratic: degree 4, e=f=2.
        let k = q2();
        let u = k
            .extend(vec![k.one(), k.one(), k.one()], StepKind::Unramified)
            .unwrap();
        let l = u
            .extend(vec![u.from_i64(-2), u.zero(), u.one()], StepKind::Eisenstein)
            .unwrap();
        assert_eq!((l.degree(), l.e(), l.f()), (4, 2, 2));
        let pi = l.gen();
        assert_eq!(l.val(&pi), Some(1));
        assert_eq!(l.val(&l.from_i64(2)), Some(2));
        // The residue field came through the Eisenstein step unchanged.
        assert_eq!(l.residue().q(), 4);
        // Multiplication agrees with the defining relations: (a + b*pi)^2
        // where a is the embedded unramified generator.
        let a = l.embed(&u.gen());
        let s = l.add(&a, &pi);
        let s2 = l.mul(&s, &s);
        let expect = l.add(
            &l.add(&l.mul(&a, &a), &l.from_i64(2)),
            &l.scalar_mul(&l.mul(&a, &pi), &BigInt::from(2)),
        );
        assert!(l.is_zero(&l.sub(&s2, &expect)));
        // div_exact in the tower: (pi*a') / a' = pi for a unit a'.
        let unit = l.add(&a, &l.one());
        assert_eq!(l.val(&unit), Some(0));
        let prod = l.mul(&pi, &unit);
        let q = l.div_exact(&prod, &unit).unwrap();
        assert!(l.is_zero(&l.sub(&q, &pi)));
    }
}
