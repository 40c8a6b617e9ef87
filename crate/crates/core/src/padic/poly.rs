//! Polynomials over a [`LocalField`]: basic arithmetic, Newton polygons, and
//! quadratic Hensel lifting of coprime residue factorizations.

use num_bigint::BigInt;
use num_integer::Integer;

use super::ff::FFPoly;
use super::field::{Elt, LocalField};
use crate::Error;

/// A polynomial over a local field, coefficients ascending.
pub type LPoly = Vec<Elt>;

/// Removes trailing zero coefficients (in place), keeping at least one.
pub fn ptrim(k: &LocalField, a: &mut LPoly) {
    while a.len() > 1 && k.is_zero(a.last().unwrap()) {
        a.pop();
    }
    if a.is_empty() {
        a.push(k.zero());
    }
}

/// Degree with the convention `pdeg(0) = 0`.
pub fn pdeg(k: &LocalField, a: &LPoly) -> usize {
    let mut d = a.len();
    while d > 1 && k.is_zero(&a[d - 1]) {
        d -= 1;
    }
    d - 1
}

pub fn pis_zero(k: &LocalField, a: &LPoly) -> bool {
    a.iter().all(|c| k.is_zero(c))
}

pub fn pzero(k: &LocalField) -> LPoly {
    vec![k.zero()]
}

pub fn padd(k: &LocalField, a: &LPoly, b: &LPoly) -> LPoly {
    let n = a.len().max(b.len());
    let z = k.zero();
    let mut out: LPoly = (0..n)
        .map(|i| k.add(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
        .collect();
    ptrim(k, &mut out);
    out
}

pub fn psub(k: &LocalField, a: &LPoly, b: &LPoly) -> LPoly {
    let n = a.len().max(b.len());
    let z = k.zero();
    let mut out: LPoly = (0..n)
        .map(|i| k.sub(a.get(i).unwrap_or(&z), b.get(i).unwrap_or(&z)))
        .collect();
    ptrim(k, &mut out);
    out
}

pub fn pmul(k: &LocalField, a: &LPoly, b: &LPoly) -> LPoly {
    if pis_zero(k, a) || pis_zero(k, b) {
        return pzero(k);
    }
    let da = pdeg(k, a);
    let db = pdeg(k, b);
    let mut out = vec![k.zero(); da + db + 1];
    for i in 0..=da {
        if k.is_zero(&a[i]) {
            continue;
        }
        for j in 0..=db {
            if k.is_zero(&b[j]) {
                continue;
            }
            let t = k.mul(&a[i], &b[j]);
            out[i + j] = k.add(&out[i + j], &t);
        }
    }
    out
}

/// Multiplies every coefficient by a field element.
pub fn pscale(k: &LocalField, a: &LPoly, c: &Elt) -> LPoly {
    a.iter().map(|x| k.mul(x, c)).collect()
}

pub fn pderiv(k: &LocalField, a: &LPoly) -> LPoly {
    if a.len() <= 1 {
        return pzero(k);
    }
    let mut out: LPoly = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| k.scalar_mul(c, &BigInt::from(i)))
        .collect();
    ptrim(k, &mut out);
    out
}

/// Horner evaluation.
pub fn peval(k: &LocalField, a: &LPoly, x: &Elt) -> Elt {
    let mut acc = k.zero();
    for c in a.iter().rev() {
        acc = k.add(&k.mul(&acc, x), c);
    }
    acc
}

/// Quotient and remainder by a monic divisor.
pub fn pdivrem_monic(k: &LocalField, a: &LPoly, b: &LPoly) -> (LPoly, LPoly) {
    let db = pdeg(k, b);
    debug_assert!(k.is_one(&b[db]), "pdivrem_monic: divisor must be monic");
    let mut rem = a.clone();
    ptrim(k, &mut rem);
    if pdeg(k, &rem) < db && !(db == 0) {
        return (pzero(k), rem);
    }
    if db == 0 {
        return (rem, pzero(k));
    }
    let mut quot = vec![k.zero(); pdeg(k, &rem).saturating_sub(db) + 1];
    while pdeg(k, &rem) >= db && !pis_zero(k, &rem) {
        let dr = pdeg(k, &rem);
        let c = rem[dr].clone();
        if k.is_zero(&c) {
            rem.truncate(dr);
            continue;
        }
        quot[dr - db] = c.clone();
        for i in 0..=db {
            let t = k.mul(&c, &b[i]);
            rem[dr - db + i] = k.sub(&rem[dr - db + i], &t);
        }
        ptrim(k, &mut rem);
        if pdeg(k, &rem) == dr && !k.is_zero(&rem[dr]) {
            unreachable!("leading coefficient must cancel");
        }
        if rem.len() > dr {
            rem.truncate(dr);
            ptrim(k, &mut rem);
        }
    }
    ptrim(k, &mut quot);
    (quot, rem)
}

/// Divides by the (unit) leading coefficient.
pub fn pmonic(k: &LocalField, a: &LPoly) -> Result<LPoly, Error> {
    let d = pdeg(k, a);
    if k.is_one(&a[d]) {
        let mut out = a.clone();
        ptrim(k, &mut out);
        return Ok(out);
    }
    let inv = k.inv_unit(&a[d])?;
    let mut out = pscale(k, a, &inv);
    ptrim(k, &mut out);
    out[d] = k.one();
    Ok(out)
}

/// Minimum coefficient valuation; `None` if zero at precision.
pub fn min_val(k: &LocalField, a: &LPoly) -> Option<i64> {
    a.iter().filter_map(|c| k.val(c)).min()
}

/// Residue of each coefficient.
pub fn reduce_poly(k: &LocalField, a: &LPoly) -> FFPoly {
    let r = k.residue();
    let mut out: FFPoly = a.iter().map(|c| k.reduce(c)).collect();
    let mut p = std::mem::take(&mut out);
    r.ptrim(&mut p);
    p
}

/// Coefficient-wise lift of a residue polynomial.
pub fn lift_poly(k: &LocalField, a: &FFPoly) -> LPoly {
    a.iter().map(|c| k.lift(c)).collect()
}

/// `f(c*y)` as a polynomial in `y`.
pub fn substitute_scaled(k: &LocalField, a: &LPoly, c: &Elt) -> LPoly {
    let mut pw = k.one();
    a.iter()
        .map(|coef| {
            let out = k.mul(coef, &pw);
            pw = k.mul(&pw, c);
            out
        })
        .collect()
}

/// `f(x + c)`.
pub fn substitute_shifted(k: &LocalField, a: &LPoly, c: &Elt) -> LPoly {
    // Horner in (x + c): process coefficients from the top.
    let mut out = pzero(k);
    for coef in a.iter().rev() {
        // out = out * (x + c) + coef
        let mut next = vec![k.zero(); out.len() + 1];
        for (i, oc) in out.iter().enumerate() {
            next[i + 1] = k.add(&next[i + 1], oc);
            let t = k.mul(oc, c);
            next[i] = k.add(&next[i], &t);
        }
        next[0] = k.add(&next[0], coef);
        ptrim(k, &mut next);
        out = next;
    }
    out
}

/// The lower Newton polygon of a polynomial.
///
/// `zero_prefix` counts leading coefficients indistinguishable from zero at
/// working precision (roots of valuation beyond precision, or genuine zero
/// roots). `vertices` are `(index, valuation)` pairs of the lower convex hull
/// over the nonzero coefficients, in increasing index order.
#[derive(Clone, Debug)]
pub struct NewtonPolygon {
    pub zero_prefix: usize,
    pub vertices: Vec<(usize, i64)>,
}

/// One face of a Newton polygon: the slope is `rise/run` in lowest terms
/// (negative for positive-valuation roots under the ascending-coefficient
/// convention), spanning `run * mult`... see `len`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Face {
    /// Horizontal span (number of roots on this face).
    pub len: usize,
    /// Slope numerator, with `slope = num / den` in lowest terms.
    pub num: i64,
    /// Slope denominator (positive).
    pub den: i64,
}

impl NewtonPolygon {
    pub fn faces(&self) -> Vec<Face> {
        let mut out = Vec::new();
        for w in self.vertices.windows(2) {
            let (i0, v0) = w[0];
            let (i1, v1) = w[1];
            let run = (i1 - i0) as i64;
            let rise = v1 - v0;
            let g = run.gcd(&rise).max(1);
            out.push(Face {
                len: i1 - i0,
                num: rise / g,
                den: run / g,
            });
        }
        out
    }
}

/// Computes the lower Newton polygon of `a` (leading coefficient must be
/// nonzero at precision).
pub fn newton_polygon(k: &LocalField, a: &LPoly) -> Result<NewtonPolygon, Error> {
    let d = pdeg(k, a);
    if k.val(&a[d]).is_none() {
        return Err(Error::PrecisionCeiling(
            "newton_polygon: leading coefficient vanished at precision".into(),
        ));
    }
    let pts: Vec<(usize, i64)> = (0..=d)
        .filter_map(|i| k.val(&a[i]).map(|v| (i, v)))
        .collect();
    let zero_prefix = pts[0].0;
    // Monotone-chain lower hull.
    let mut hull: Vec<(usize, i64)> = Vec::new();
    for &(x, y) in &pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            // Drop (x2,y2) if it lies on or above segment (x1,y1)-(x,y).
            let lhs = (y2 - y1) as i128 * (x - x1) as i128;
            let rhs = (y - y1) as i128 * (x2 - x1) as i128;
            if lhs >= rhs {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((x, y));
    }
    Ok(NewtonPolygon {
        zero_prefix,
        vertices: hull,
    })
}

/// Lifts a coprime residue factorization `f_bar = g_bar * h_bar` (both monic)
/// to `f = g * h` at full working precision. `f` must be monic with integral
/// coefficients and `deg f = deg g_bar + deg h_bar`.
pub fn hensel_split(
    k: &LocalField,
    f: &LPoly,
    gbar: &FFPoly,
    hbar: &FFPoly,
) -> Result<(LPoly, LPoly), Error> {
    let r = k.residue();
    let dg = r.pdeg(gbar);
    let dh = r.pdeg(hbar);
    let df = pdeg(k, f);
    if dg + dh != df || dg == 0 || dh == 0 {
        return Err(Error::invalid("hensel_split: degree mismatch"));
    }
    // Bezout data in the residue field, normalized so deg s < deg h and
    // deg t < deg g.
    let (gcd, s0, _t0) = r.pxgcd(gbar, hbar);
    if r.pdeg(&gcd) != 0 {
        return Err(Error::invalid("hensel_split: residue factors are not coprime"));
    }
    let ginv = r.inv(&gcd[0]);
    let s0 = r.pscale(&s0, &ginv);
    let (_, sbar) = r.pdivrem(&s0, hbar);
    // t = (1 - s*g) / h exactly.
    let num = r.psub(&r.pone(), &r.pmul(&sbar, gbar));
    let (tbar, rem) = r.pdivrem(&num, hbar);
    debug_assert!(r.pis_zero(&rem));
    let mut g = lift_poly(k, gbar);
    let mut h = lift_poly(k, hbar);
    let mut s = lift_poly(k, &sbar);
    let mut t = lift_poly(k, &tbar);
    g.resize(dg + 1, k.zero());
    g[dg] = k.one();
    h.resize(dh + 1, k.zero());
    h[dh] = k.one();
    let target = k.prec_val();
    // Work modulo pi^(2*kappa) per round, truncating each update; this is
    // what keeps the degree bounds of the classical Hensel step exact.
    let mut kappa: i64 = 1;
    let trunc_poly = |a: &LPoly, kap: i64| -> LPoly {
        let mut out: LPoly = a.iter().map(|c| k.trunc_val(c, kap)).collect();
        ptrim(k, &mut out);
        out
    };
    loop {
        if pis_zero(k, &psub(k, f, &pmul(k, &g, &h))) {
            return Ok((g, h));
        }
        if kappa >= target {
            return Err(Error::PrecisionCeiling(
                "hensel_split did not converge; raise precision".into(),
            ));
        }
        let kap2 = (2 * kappa).min(target);
        let e = trunc_poly(&psub(k, f, &pmul(k, &g, &h)), kap2);
        // Factor update.
        let se = pmul(k, &s, &e);
        let (q, rr) = pdivrem_monic(k, &se, &h);
        let te = pmul(k, &t, &e);
        let qg = pmul(k, &q, &g);
        let mut gn = trunc_poly(&padd(k, &g, &padd(k, &te, &qg)), kap2);
        let mut hn = trunc_poly(&padd(k, &h, &rr), kap2);
        gn.resize(dg + 1, k.zero());
        if !k.is_one(&gn[dg]) || pdeg(k, &gn) != dg {
            return Err(Error::PrecisionCeiling("hensel_split lost monicity".into()));
        }
        hn.resize(dh + 1, k.zero());
        debug_assert!(k.is_one(&hn[dh]));
        g = gn;
        h = hn;
        // Bezout update, also modulo pi^(2*kappa).
        let b = trunc_poly(
            &psub(
                k,
                &padd(k, &pmul(k, &s, &g), &pmul(k, &t, &h)),
                &vec![k.one()],
            ),
            kap2,
        );
        if !pis_zero(k, &b) {
            let sb = pmul(k, &s, &b);
            let (c, d) = pdivrem_monic(k, &sb, &h);
            s = trunc_poly(&psub(k, &s, &d), kap2);
            let tb = pmul(k, &t, &b);
            let cg = pmul(k, &c, &g);
            t = trunc_poly(&psub(k, &t, &padd(k, &tb, &cg)), kap2);
        }
        kappa = kap2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::field::StepKind;

    fn q2() -> LocalField {
        LocalField::qp(2, 48)
    }

    fn zpoly(k: &LocalField, cs: &[i64]) -> LPoly {
        cs.iter().map(|&c| k.from_i64(c)).collect()
    }

    #[test]
    fn polygon_examples() {
        let k = q2();
        // x^2 - 2: one face of slope -1/2, length 2.
        let np = newton_polygon(&k, &zpoly(&k, &[-2, 0, 1])).unwrap();
        assert_eq!(np.zero_prefix, 0);
        assert_eq!(np.faces(), vec![Face { len: 2, num: -1, den: 2 }]);
        // x^2 + x + 2: faces of slope -1 (length 1) and 0 (length 1).
        let np = newton_polygon(&k, &zpoly(&k, &[2, 1, 1])).unwrap();
        assert_eq!(
            np.faces(),
            vec![
                Face { len: 1, num: -1, den: 1 },
                Face { len: 1, num: 0, den: 1 }
            ]
        );
        // x^3 - 2: slope -1/3.
        let np = newton_polygon(&k, &zpoly(&k, &[-2, 0, 0, 1])).unwrap();
        assert_eq!(np.faces(), vec![Face { len: 3, num: -1, den: 3 }]);
    }

    #[test]
    fn divrem_and_eval() {
        let k = q2();
        let f = zpoly(&k, &[2, 1, 1]); // x^2 + x + 2
        let g = zpoly(&k, &[3, 1]); // x + 3
        let (q, r) = pdivrem_monic(&k, &f, &g);
        // f = (x+3)(x-2) + 8.
        assert_eq!(pdeg(&k, &q), 1);
        let back = padd(&k, &pmul(&k, &q, &g), &r);
        assert!(pis_zero(&k, &psub(&k, &back, &f)));
        let v = peval(&k, &f, &k.from_i64(-1));
        assert!(k.is_zero(&k.sub(&v, &k.from_i64(2))));
    }

    #[test]
    fn shift_substitution() {
        let k = q2();
        let f = zpoly(&k, &[2, 1, 1]);
        let g = substitute_shifted(&k, &f, &k.from_i64(5));
        // g(x) = f(x+5) = x^2 + 11x + 32.
        let expect = zpoly(&k, &[32, 11, 1]);
        assert!(pis_zero(&k, &psub(&k, &g, &expect)));
    }

    #[test]
    fn hensel_splits_two_faces() {
        let k = q2();
        // x^2 + x + 2 = (x - r)(x - r') with v(r) = 0, v(r') = 1.
        let f = zpoly(&k, &[2, 1, 1]);
        let r = k.residue();
        // Residue: x^2 + x = x(x + 1).
        let gbar = vec![r.one(), r.one()]; // x + 1 (unit root part)
        let hbar = vec![r.zero(), r.one()]; // x (positive-valuation part)
        let (g, h) = hensel_split(&k, &f, &gbar, &hbar).unwrap();
        let back = pmul(&k, &g, &h);
        assert!(pis_zero(&k, &psub(&k, &back, &f)));
        // Roots: g root is a unit, h root has valuation 1.
        let root_g = k.neg(&g[0]);
        assert_eq!(k.val(&root_g), Some(0));
        assert!(k.is_zero(&peval(&k, &f, &root_g)));
        let root_h = k.neg(&h[0]);
        assert_eq!(k.val(&root_h), Some(1));
        assert!(k.is_zero(&peval(&k, &f, &root_h)));
    }

    #[test]
    fn hensel_in_extension() {
        // Over Q_2(sqrt 2): x^2 - x - pi splits off a unit root mod pi.
        let k = q2();
        let l = k
            .extend(
                vec![k.from_i64(-2), k.zero(), k.one()],
                StepKind::Eisenstein,
            )
            .unwrap();
        let pi = l.gen();
        let f = vec![l.neg(&pi), l.from_i64(-1), l.one()];
        let r = l.residue();
        let gbar = vec![r.one(), r.one()]; // x - 1 = x + 1 over F_2
        let hbar = vec![r.zero(), r.one()]; // x
        let (g, h) = hensel_split(&l, &f, &gbar, &hbar).unwrap();
        assert!(pis_zero(&l, &psub(&l, &pmul(&l, &g, &h), &f)));
        // Root product is -pi, so the valuations split as 0 + 1.
        assert_eq!(l.val(&l.neg(&g[0])), Some(0));
        assert_eq!(l.val(&l.neg(&h[0])), Some(1));
    }
}
