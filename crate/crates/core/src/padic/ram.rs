//! Ramification filtrations, small-degree extension enumeration, and
//! subfield tests.
//!
//! The filtration of `L = Q_p[x]/(F)` is peeled bottom-up. The current state
//! is a realized tower bottom `M` together with `G`, the minimal polynomial
//! of the generator of `L` over `M` (an irreducible factor of `F`). A
//! candidate next segment `E = M(step)` is accepted exactly when `G` has an
//! irreducible factor of degree `deg G / [E:M]` over `E`; that factor becomes
//! the new `G`. Candidates come from:
//!
//! * unramified steps: one per divisor of `deg G`, largest first;
//! * tame steps: `x^e - u pi` over the classes of units modulo `e`-th powers;
//! * wild steps (p = 2): quadratics `x^2 - delta` over square-class
//!   representatives of `M^*`.
//!
//! A wild part that exposes no quadratic subfield (or any wild part for odd
//! p) is kept as a single segment; that yields a coarser but still valid
//! tower, which is all downstream consumers require.

use num_bigint::BigInt;

use super::factor::{factor_squarefree, roots_in};
use super::field::{Elt, LocalField, StepKind};
use super::poly::{
    self, lift_poly, newton_polygon, pdeg, pdivrem_monic, pmul, ptrim, reduce_poly, LPoly,
};
use crate::Error;

/// Kind of one segment of a ramification tower.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SegmentKind {
    Unramified,
    Tame,
    Wild,
}

/// Summary of a computed filtration.
#[derive(Clone, Debug)]
pub struct RamificationData {
    /// Vertices `(i, v)` of the ramification polygon when the input is
    /// Eisenstein (empty otherwise).
    pub polygon: Vec<(usize, i64)>,
    /// Height of the first vertex when it sits at abscissa 1.
    pub j: Option<i64>,
    /// Relative degrees of the segments, bottom-up; their product is `deg F`.
    pub degrees: Vec<usize>,
    /// Kinds of the segments, parallel to `degrees`.
    pub kinds: Vec<SegmentKind>,
}

/// Cap on square-class candidates during wild peeling.
const SQUARE_CLASS_CAP: usize = 1 << 12;

/// Cap on Eisenstein template sets in [`enumerate_extensions`].
const TEMPLATE_CAP: usize = 1 << 15;

/// Computes a ramification tower `Q_p = L_0 < L_1 < ... < L_t ~ Q_p[x]/(F)`
/// with singly ramified segments, together with summary data.
pub fn ramification_filtration(
    k: &LocalField,
    f: &LPoly,
) -> Result<(Vec<LocalField>, RamificationData), Error> {
    if k.base().is_some() {
        return Err(Error::invalid("ramification_filtration: base must be Q_p"));
    }
    let mut g = f.clone();
    ptrim(k, &mut g);
    let mut n = pdeg(k, &g);
    if n == 0 || !k.is_one(&g[n]) {
        return Err(Error::invalid("ramification_filtration: polynomial must be monic"));
    }
    let mut m = k.clone();
    let mut towers = vec![k.clone()];
    let mut degrees = Vec::new();
    let mut kinds = Vec::new();
    let p = k.p();

    // Unramified segment: the largest divisor of n over which G keeps an
    // irreducible factor of complementary degree.
    if n > 1 {
        let mut divs: Vec<usize> = (2..=n).filter(|d| n % d == 0).collect();
        divs.sort_unstable_by(|a, b| b.cmp(a));
        for d in divs {
            let r = m.residue();
            let step = lift_poly(&m, &r.irreducible_poly(d));
            let u = m.extend(step, StepKind::Unramified)?;
            if let Some(fac) = factor_of_degree(&m, &u, &g, n / d)? {
                degrees.push(d);
                kinds.push(SegmentKind::Unramified);
                g = fac;
                n /= d;
                m = u;
                towers.push(m.clone());
                break;
            }
        }
    }

    // Tame segment: the prime-to-p part of the remaining (totally ramified)
    // degree, realized as x^e - u*pi for some unit class u.
    if n > 1 {
        let mut et = n;
        while et % p as usize == 0 {
            et /= p as usize;
        }
        if et > 1 {
            let r = m.residue();
            let omega = m.lift(&multiplicative_generator(r));
            let classes = num_integer::gcd(et as u64, r.q() - 1);
            let mut found = false;
            for j in 0..classes {
                let scale = m.mul(&m.pow(&omega, j), &m.uniformizer());
                let mut step = vec![m.neg(&scale)];
                step.extend(std::iter::repeat(m.zero()).take(et - 1));
                step.push(m.one());
                let e = m.extend(step, StepKind::Eisenstein)?;
                if let Some(fac) = factor_of_degree(&m, &e, &g, n / et)? {
                    degrees.push(et);
                    kinds.push(SegmentKind::Tame);
                    g = fac;
                    n /= et;
                    m = e;
                    towers.push(m.clone());
                    found = true;
                    break;
                }
            }
            if !found {
                return Err(Error::PrecisionCeiling(
                    "no tame candidate embedded; raise precision".into(),
                ));
            }
        }
    }

    // Wild part: n is now a power of p. For p = 2, peel quadratic subfields
    // found through square classes; whatever resists stays one segment.
    while n > 1 {
        if n == p as usize {
            let (step, kind) = normalize_step(&m, &g)?;
            if kind != StepKind::Eisenstein {
                return Err(Error::invalid("wild segment normalized to unramified"));
            }
            m = m.extend(step, StepKind::Eisenstein)?;
            degrees.push(n);
            kinds.push(SegmentKind::Wild);
            towers.push(m.clone());
            break;
        }
        let mut peeled = false;
        if p == 2 {
            for delta in square_class_candidates(&m)? {
                let quad = vec![m.neg(&delta), m.zero(), m.one()];
                if factor_squarefree(&m, &quad)?.len() != 1 {
                    continue; // delta is a square
                }
                let (step, kind) = match normalize_step(&m, &quad) {
                    Ok(x) => x,
                    Err(_) => continue,
                };
                if kind != StepKind::Eisenstein {
                    continue; // unramified quadratic cannot embed here
                }
                let e = m.extend(step, StepKind::Eisenstein)?;
                if let Some(fac) = factor_of_degree(&m, &e, &g, n / 2)? {
                    degrees.push(2);
                    kinds.push(SegmentKind::Wild);
                    g = fac;
                    n /= 2;
                    m = e;
                    towers.push(m.clone());
                    peeled = true;
                    break;
                }
            }
        }
        if !peeled {
            // No proper wild subfield surfaced: keep one (coarser) segment.
            let (step, kind) = normalize_step(&m, &g)?;
            if kind != StepKind::Eisenstein {
                return Err(Error::invalid("wild segment normalized to unramified"));
            }
            m = m.extend(step, StepKind::Eisenstein)?;
            degrees.push(n);
            kinds.push(SegmentKind::Wild);
            towers.push(m.clone());
            n = 1;
        }
    }

    let (polygon, j) = ramification_polygon(k, f, &m).unwrap_or((Vec::new(), None));
    Ok((
        towers,
        RamificationData {
            polygon,
            j,
            degrees,
            kinds,
        },
    ))
}

/// Factors `g` (over `m`) over the extension `e` and returns one factor of
/// the requested degree, if any.
fn factor_of_degree(
    m: &LocalField,
    e: &LocalField,
    g: &LPoly,
    want: usize,
) -> Result<Option<LPoly>, Error> {
    let ge: LPoly = g.iter().map(|c| e.embed_from(m, c)).collect();
    let facs = factor_squarefree(e, &ge)?;
    Ok(facs.into_iter().find(|q| pdeg(e, q) == want))
}

/// A multiplicative generator of a finite field.
fn multiplicative_generator(r: &super::ff::FF) -> super::ff::FFElt {
    let q = r.q();
    let mut divisors = Vec::new();
    let mut rest = q - 1;
    let mut d = 2;
    while d * d <= rest {
        if rest % d == 0 {
            divisors.push(d);
            while rest % d == 0 {
                rest /= d;
            }
        }
        d += 1;
    }
    if rest > 1 {
        divisors.push(rest);
    }
    'outer: for x in r.elements() {
        if r.is_zero(&x) {
            continue;
        }
        for &dv in &divisors {
            if r.pow(&x, (q - 1) / dv) == r.one() {
                continue 'outer;
            }
        }
        return x;
    }
    unreachable!("finite field has a multiplicative generator")
}

/// Representatives covering the square classes of `M^*` for p = 2:
/// `pi^eps * (1 + sum c_i pi^i)` with digits up to `2 v_M(2)`.
fn square_class_candidates(m: &LocalField) -> Result<Vec<Elt>, Error> {
    let r = m.residue();
    let res_elts = r.elements();
    let depth = 2 * m.e(); // 2 * v_M(2) digit positions
    let count = res_elts
        .len()
        .checked_pow(depth as u32)
        .filter(|&c| c <= SQUARE_CLASS_CAP)
        .ok_or_else(|| Error::cap("square-class candidate set exceeds its cap"))?;
    let pi = m.uniformizer();
    let mut units = Vec::with_capacity(count);
    let mut idx = vec![0usize; depth];
    loop {
        let mut u = m.one();
        let mut pw = pi.clone();
        for &ix in &idx {
            let digit = m.mul(&m.lift(&res_elts[ix]), &pw);
            u = m.add(&u, &digit);
            pw = m.mul(&pw, &pi);
        }
        units.push(u);
        // Increment the mixed-radix counter.
        let mut pos = 0;
        loop {
            if pos == depth {
                let mut out = Vec::with_capacity(2 * units.len());
                for u in units {
                    out.push(m.mul(&u, &pi));
                    out.push(u);
                }
                return Ok(out);
            }
            idx[pos] += 1;
            if idx[pos] < res_elts.len() {
                break;
            }
            idx[pos] = 0;
            pos += 1;
        }
    }
}

/// Rewrites an irreducible polynomial `h` over `M` into a defining step for
/// the same field `M[x]/(h)`, returning either an Eisenstein polynomial or an
/// unramified one. Fails with `NotApplicable` on mixed ramification shapes
/// (which cannot be a single tower step).
pub fn normalize_step(m: &LocalField, h: &LPoly) -> Result<(LPoly, StepKind), Error> {
    let mut h = h.clone();
    ptrim(m, &mut h);
    let deg = pdeg(m, &h);
    if deg < 2 {
        return Err(Error::invalid("normalize_step: degree must be at least 2"));
    }
    let guard = 64 + m.prec_val() as usize;
    for _ in 0..guard {
        let np = newton_polygon(m, &h)?;
        if np.zero_prefix > 0 {
            return Err(Error::PrecisionCeiling(
                "normalize_step: constant term vanished at precision".into(),
            ));
        }
        let faces = np.faces();
        if faces.len() != 1 {
            return Err(Error::PrecisionCeiling(
                "normalize_step: input no longer looks irreducible".into(),
            ));
        }
        let a = -faces[0].num;
        let d = faces[0].den;
        if a == 0 {
            let r = m.residue();
            let hbar = reduce_poly(m, &h);
            let facs = r.factor(&hbar);
            if facs.len() == 1 && facs[0].1 == 1 {
                return Ok((h, StepKind::Unramified));
            }
            let (phi, _) = &facs[0];
            if r.pdeg(phi) > 1 {
                return Err(Error::NotApplicable(
                    "mixed unramified/ramified shape is not a single step".into(),
                ));
            }
            let c = m.lift(&r.neg(&phi[0]));
            h = poly::substitute_shifted(m, &h, &c);
            continue;
        }
        if d == deg as i64 {
            if a == 1 {
                return Ok((h, StepKind::Eisenstein));
            }
            // Change generator to a uniformizer: alpha^s * pi^t with
            // s*a + t*deg = 1 and s in 1..deg.
            let s = (1..deg as i64)
                .find(|s| (s * a).rem_euclid(deg as i64) == 1)
                .expect("a is invertible mod deg");
            let t = (1 - s * a) / deg as i64; // <= 0
            let gamma = power_mod(m, &h, s as usize);
            let pmin = minimal_polynomial(m, &h, &gamma)?;
            let result = upsub_poly(m, &pmin, -t);
            let rp = newton_polygon(m, &result)?;
            let rf = rp.faces();
            if rp.zero_prefix == 0 && rf.len() == 1 && rf[0].num == -1 && rf[0].den == deg as i64 {
                return Ok((result, StepKind::Eisenstein));
            }
            return Err(Error::PrecisionCeiling(
                "normalize_step: uniformizer change failed at precision".into(),
            ));
        }
        if d == 1 {
            // Integral slope: rescale the generator by pi^a and loop.
            h = downsub_poly(m, &h, a)?;
            continue;
        }
        return Err(Error::NotApplicable(
            "partial ramification shape is not a single step".into(),
        ));
    }
    Err(Error::PrecisionCeiling("normalize_step did not terminate".into()))
}

/// `x^s` reduced modulo `h`.
fn power_mod(m: &LocalField, h: &LPoly, s: usize) -> LPoly {
    let x = vec![m.zero(), m.one()];
    let mut acc = vec![m.one()];
    for _ in 0..s {
        let prod = pmul(m, &acc, &x);
        acc = pdivrem_monic(m, &prod, h).1;
    }
    acc
}

/// Minimal polynomial over `M` of an element `gamma` of `M[x]/(h)` that is
/// expected to generate the whole quotient.
fn minimal_polynomial(m: &LocalField, h: &LPoly, gamma: &LPoly) -> Result<LPoly, Error> {
    let deg = pdeg(m, h);
    // Powers gamma^0 .. gamma^deg as coefficient vectors.
    let mut powers: Vec<Vec<Elt>> = Vec::with_capacity(deg + 1);
    let mut cur = vec![m.one()];
    for _ in 0..=deg {
        let mut vec_form: Vec<Elt> = cur.clone();
        vec_form.resize(deg, m.zero());
        powers.push(vec_form);
        let prod = pmul(m, &cur, gamma);
        cur = pdivrem_monic(m, &prod, h).1;
    }
    // Solve sum_{j<deg} x_j gamma^j = -gamma^deg.
    let rhs: Vec<Elt> = powers[deg].iter().map(|c| m.neg(c)).collect();
    let cols: Vec<Vec<Elt>> = powers[..deg].to_vec();
    let sol = solve_linear(m, &cols, &rhs)?;
    let mut out = sol;
    out.push(m.one());
    ptrim(m, &mut out);
    Ok(out)
}

/// Solves the square system `sum_j x_j cols[j] = rhs` over a local field by
/// Gaussian elimination with minimal-valuation pivoting.
fn solve_linear(m: &LocalField, cols: &[Vec<Elt>], rhs: &[Elt]) -> Result<Vec<Elt>, Error> {
    let nc = cols.len();
    let nr = rhs.len();
    let mut mat: Vec<Vec<Elt>> = (0..nr)
        .map(|r| {
            let mut row: Vec<Elt> = cols.iter().map(|c| c[r].clone()).collect();
            row.push(rhs[r].clone());
            row
        })
        .collect();
    let mut pivot_of_col = vec![None; nc];
    let mut used = vec![false; nr];
    for col in 0..nc {
        let mut best: Option<(usize, i64)> = None;
        for (r, row) in mat.iter().enumerate() {
            if used[r] {
                continue;
            }
            if let Some(v) = m.val(&row[col]) {
                if best.map_or(true, |(_, bv)| v < bv) {
                    best = Some((r, v));
                }
            }
        }
        let (r, _) = best.ok_or_else(|| {
            Error::PrecisionCeiling("singular linear system at working precision".into())
        })?;
        let piv = mat[r][col].clone();
        let prow = mat[r].clone();
        for (rr, row) in mat.iter_mut().enumerate() {
            if rr == r || m.val(&row[col]).is_none() {
                continue;
            }
            let factor = m.div_exact(&row[col], &piv)?;
            for (x, pv) in row.iter_mut().zip(&prow) {
                let t = m.mul(&factor, pv);
                *x = m.sub(x, &t);
            }
        }
        used[r] = true;
        pivot_of_col[col] = Some(r);
    }
    let mut out = Vec::with_capacity(nc);
    for col in 0..nc {
        let r = pivot_of_col[col].unwrap();
        out.push(m.div_exact(&mat[r][nc], &mat[r][col])?);
    }
    Ok(out)
}

/// `h(pi^v y) / pi^(deg * v)` (all divisions exact on or above the polygon).
fn downsub_poly(m: &LocalField, h: &LPoly, v: i64) -> Result<LPoly, Error> {
    let n = pdeg(m, h) as i64;
    h.iter()
        .enumerate()
        .map(|(i, c)| m.shift_down(c, (n - i as i64) * v))
        .collect()
}

/// Inverse rescaling: coefficient `i` gains `pi^((deg - i) v)`.
fn upsub_poly(m: &LocalField, h: &LPoly, v: i64) -> LPoly {
    if v == 0 {
        return h.clone();
    }
    let d = pdeg(m, h) as i64;
    let pi = m.uniformizer();
    h.iter()
        .enumerate()
        .map(|(i, c)| m.mul(c, &m.pow(&pi, ((d - i as i64) * v) as u64)))
        .collect()
}

/// The ramification polygon of an Eisenstein `F` over `Q_p`: the Newton
/// polygon (in `v_L` units) of `F(alpha x + alpha)` for a root `alpha` in the
/// realized tower `L`, abscissas from 1.
fn ramification_polygon(
    k: &LocalField,
    f: &LPoly,
    l: &LocalField,
) -> Result<(Vec<(usize, i64)>, Option<i64>), Error> {
    let n = pdeg(k, f);
    let eisenstein = k.val(&f[0]) == Some(1)
        && (1..n).all(|i| k.val(&f[i]).map_or(true, |v| v >= 1));
    if !eisenstein || n < 2 {
        return Ok((Vec::new(), None));
    }
    let alpha = roots_in(k, f, l)?
        .into_iter()
        .next()
        .ok_or_else(|| Error::PrecisionCeiling("no root in the realized tower".into()))?;
    let fl: LPoly = f.iter().map(|c| l.embed_from(k, c)).collect();
    let shifted = poly::substitute_shifted(l, &fl, &alpha);
    let scaled = poly::substitute_scaled(l, &shifted, &alpha);
    // Lower hull of (i, v_L(c_i) - n) for i >= 1.
    let pts: Vec<(usize, i64)> = (1..=n)
        .filter_map(|i| l.val(&scaled[i]).map(|v| (i, v - n as i64)))
        .collect();
    let mut hull: Vec<(usize, i64)> = Vec::new();
    for &(x, y) in &pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            if (y2 - y1) as i128 * (x - x1) as i128 >= (y - y1) as i128 * (x2 - x1) as i128 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((x, y));
    }
    let j = hull.first().filter(|&&(x, _)| x == 1).map(|&(_, y)| y);
    Ok((hull, j))
}

/// Tests whether `e` embeds into `l` over `Q_p`, by finding roots of each
/// step polynomial of `e` in `l`, depth-first.
pub fn is_subfield(e: &LocalField, l: &LocalField) -> Result<bool, Error> {
    if l.degree() % e.degree() != 0 {
        return Ok(false);
    }
    // Peel e's steps bottom-up into a list.
    let mut steps: Vec<(LocalField, Vec<Elt>)> = Vec::new();
    let mut cur = e.clone();
    while let (Some(base), Some(sp)) = (cur.base(), cur.step_poly()) {
        steps.push((base.clone(), sp.to_vec()));
        cur = base.clone();
    }
    steps.reverse();
    // images[i] = image in l of the generator of e's i-th step.
    fn descend(
        l: &LocalField,
        steps: &[(LocalField, Vec<Elt>)],
        images: &mut Vec<Elt>,
        idx: usize,
    ) -> Result<bool, Error> {
        if idx == steps.len() {
            return Ok(true);
        }
        let (base, sp) = &steps[idx];
        // Map the step polynomial's coefficients through the images found so
        // far, then look for roots in l.
        let mapped: LPoly = sp
            .iter()
            .map(|c| map_element(l, base, images, c))
            .collect();
        for root in root_candidates(l, &mapped)? {
            images.push(root);
            if descend(l, steps, images, idx + 1)? {
                return Ok(true);
            }
            images.pop();
        }
        Ok(false)
    }
    let mut images = Vec::new();
    descend(l, &steps, &mut images, 0)
}

/// Maps an element of a tower field into `l`, sending the generator of step
/// `i` to `images[i]` (chunks over Q_p are rational constants).
fn map_element(l: &LocalField, field: &LocalField, images: &[Elt], x: &Elt) -> Elt {
    fn go(l: &LocalField, field: &LocalField, images: &[Elt], x: &[BigInt], depth: usize) -> Elt {
        match field.base() {
            None => {
                let mut v = l.zero();
                v[0] = x[0].clone();
                v
            }
            Some(base) => {
                let db = base.degree();
                let rel = field.degree() / db;
                let img = &images[depth - 1];
                let mut acc = l.zero();
                for j in (0..rel).rev() {
                    let chunk = go(l, base, images, &x[j * db..(j + 1) * db], depth - 1);
                    acc = l.add(&l.mul(&acc, img), &chunk);
                }
                acc
            }
        }
    }
    let depth = tower_depth(field);
    go(l, field, images, x, depth)
}

fn tower_depth(field: &LocalField) -> usize {
    let mut d = 0;
    let mut cur = field.clone();
    while let Some(b) = cur.base() {
        d += 1;
        cur = b.clone();
    }
    d
}

/// Roots in `l` of a polynomial already written over `l`.
fn root_candidates(l: &LocalField, f: &LPoly) -> Result<Vec<Elt>, Error> {
    let f = poly::pmonic(l, f)?;
    let mut out = Vec::new();
    for q in factor_squarefree(l, &f)? {
        if pdeg(l, &q) == 1 {
            out.push(l.neg(&q[0]));
        }
    }
    Ok(out)
}

/// All extensions of `K` with ramification `e` and residue degree `f`, up to
/// `K`-isomorphism. Capped: `e * f <= 4` and modest template sets.
pub fn enumerate_extensions(
    k: &LocalField,
    e: usize,
    f: usize,
) -> Result<Vec<LocalField>, Error> {
    if e * f > 4 {
        return Err(Error::cap("enumerate_extensions: degree cap is 4"));
    }
    if e == 0 || f == 0 {
        return Err(Error::invalid("enumerate_extensions: e, f must be positive"));
    }
    if e * f * k.degree() > 16 {
        return Err(Error::cap("enumerate_extensions: absolute degree cap"));
    }
    // The unramified part is unique.
    let u = if f == 1 {
        k.clone()
    } else {
        let step = lift_poly(k, &k.residue().irreducible_poly(f));
        k.extend(step, StepKind::Unramified)?
    };
    if e == 1 {
        return Ok(vec![u]);
    }
    let p = k.p() as usize;
    if e % p != 0 {
        // Tame: x^e - omega^j pi, one class per j < gcd(e, q-1).
        let r = u.residue();
        let omega = u.lift(&multiplicative_generator(r));
        let classes = num_integer::gcd(e as u64, r.q() - 1);
        let mut out = Vec::new();
        for j in 0..classes {
            let scale = u.mul(&u.pow(&omega, j), &u.uniformizer());
            let mut step = vec![u.neg(&scale)];
            step.extend(std::iter::repeat(u.zero()).take(e - 1));
            step.push(u.one());
            out.push(u.extend(step, StepKind::Eisenstein)?);
        }
        return Ok(out);
    }
    // Wild (or mixed) ramification: enumerate Eisenstein templates truncated
    // at the Krasner depth, then deduplicate by mutual root tests.
    let ve = {
        // v_U(e) in U-units.
        let el = u.from_i64(e as i64);
        u.val(&el).unwrap_or(0)
    };
    let depth = (2 * ve + 3) as usize;
    let r = u.residue();
    let res_elts = r.elements();
    let q = res_elts.len();
    // Each coefficient a_i (i >= 1) runs over digits at pi^1..pi^(depth-1);
    // a_0 additionally needs an exact valuation of 1.
    let per_high = q.pow((depth - 1) as u32);
    let per_low = (q - 1) * q.pow((depth - 2) as u32);
    let total = per_low
        .checked_mul(per_high.checked_pow((e - 1) as u32).unwrap_or(usize::MAX))
        .unwrap_or(usize::MAX);
    if total > TEMPLATE_CAP {
        return Err(Error::cap("enumerate_extensions: template set exceeds its cap"));
    }
    let pi = u.uniformizer();
    // Enumerate values for one coefficient: sums of digits pi^1..pi^(depth-1).
    let coeff_values = |require_val_one: bool| -> Vec<Elt> {
        let mut out = Vec::new();
        let digits = depth - 1;
        let mut idx = vec![0usize; digits];
        loop {
            // Exact valuation 1 means a nonzero digit at pi^1.
            if !require_val_one || idx[0] != 0 {
                let mut v = u.zero();
                let mut pw = pi.clone();
                for &ix in &idx {
                    let d = u.mul(&u.lift(&res_elts[ix]), &pw);
                    v = u.add(&v, &d);
                    pw = u.mul(&pw, &pi);
                }
                out.push(v);
            }
            let mut pos = 0;
            loop {
                if pos == digits {
                    return out;
                }
                idx[pos] += 1;
                if idx[pos] < res_elts.len() {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
        }
    };
    let lows = coeff_values(true);
    let highs = coeff_values(false);
    let mut fields: Vec<LocalField> = Vec::new();
    let mut choose = vec![0usize; e - 1];
    'outer: for low in &lows {
        loop {
            let mut step = vec![u.neg(low)];
            for &c in choose.iter() {
                step.push(highs[c].clone());
            }
            step.push(u.one());
            let cand = u.extend(step.clone(), StepKind::Eisenstein)?;
            // Deduplicate: same field iff the candidate step has a root there.
            let mut fresh = true;
            for known in &fields {
                let mapped: LPoly = step.iter().map(|c| known.embed_from(&u, c)).collect();
                if !root_candidates(known, &mapped)?.is_empty() {
                    fresh = false;
                    break;
                }
            }
            if fresh {
                fields.push(cand);
            }
            // Advance the mixed-radix chooser.
            let mut pos = 0;
            loop {
                if pos == e - 1 {
                    continue 'outer;
                }
                choose[pos] += 1;
                if choose[pos] < highs.len() {
                    break;
                }
                choose[pos] = 0;
                pos += 1;
            }
        }
    }
    Ok(fields)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn qp(p: u64) -> LocalField {
        LocalField::qp(p, 64)
    }

    fn zpoly(k: &LocalField, cs: &[i64]) -> LPoly {
        cs.iter().map(|&c| k.from_i64(c)).collect()
    }

    fn segs(p: u64, cs: &[i64]) -> Vec<(SegmentKind, usize)> {
        let k = qp(p);
        let (_, data) = ramification_filtration(&k, &zpoly(&k, cs)).unwrap();
        data.kinds.into_iter().zip(data.degrees).collect()
    }

    #[test]
    fn unramified_quartic() {
        assert_eq!(segs(2, &[1, 1, 0, 0, 1]), vec![(SegmentKind::Unramified, 4)]);
    }

    #[test]
    fn tame_cubic() {
        assert_eq!(segs(2, &[-2, 0, 0, 1]), vec![(SegmentKind::Tame, 3)]);
    }

    #[test]
    fn unramified_cubic_over_q7() {
        assert_eq!(segs(7, &[-2, 0, 0, 1]), vec![(SegmentKind::Unramified, 3)]);
    }

    #[test]
    fn wild_quadratic_and_quartic() {
        assert_eq!(segs(2, &[-2, 0, 1]), vec![(SegmentKind::Wild, 2)]);
        assert_eq!(
            segs(2, &[-2, 0, 0, 0, 1]),
            vec![(SegmentKind::Wild, 2), (SegmentKind::Wild, 2)]
        );
    }

    #[test]
    fn mixed_sextic() {
        // x^6 - 2: tame 3 then wild 2 (or any order multiplying to 6).
        let out = segs(2, &[-2, 0, 0, 0, 0, 0, 1]);
        let total: usize = out.iter().map(|&(_, d)| d).product();
        assert_eq!(total, 6);
        assert!(out.contains(&(SegmentKind::Tame, 3)));
        assert!(out.contains(&(SegmentKind::Wild, 2)));
    }

    #[test]
    fn filtration_tower_realizes_the_field() {
        // For x^4 - 2 the realized top field must contain a root.
        let k = qp(2);
        let f = zpoly(&k, &[-2, 0, 0, 0, 1]);
        let (towers, data) = ramification_filtration(&k, &f).unwrap();
        let l = towers.last().unwrap();
        assert_eq!(l.degree(), 4);
        assert_eq!(roots_in(&k, &f, l).unwrap().len(), 2); // +-2^(1/4)
        // Ramification polygon data is present for an Eisenstein input.
        assert!(!data.polygon.is_empty());
    }

    #[test]
    fn extension_counts() {
        let k2 = qp(2);
        let ram = enumerate_extensions(&k2, 2, 1).unwrap();
        let unram = enumerate_extensions(&k2, 1, 2).unwrap();
        assert_eq!(ram.len() + unram.len(), 7);
        let k3 = qp(3);
        let ram3 = enumerate_extensions(&k3, 2, 1).unwrap();
        let unram3 = enumerate_extensions(&k3, 1, 2).unwrap();
        assert_eq!(ram3.len() + unram3.len(), 3);
        // e = f = 1 is the field itself.
        assert_eq!(enumerate_extensions(&k2, 1, 1).unwrap().len(), 1);
        // Degree-3 extensions of Q_2: one tame, one unramified.
        assert_eq!(enumerate_extensions(&k2, 3, 1).unwrap().len(), 1);
        assert_eq!(enumerate_extensions(&k2, 1, 3).unwrap().len(), 1);
        // Degree-2 of Q_5: two tame classes plus the unramified one.
        let k5 = qp(5);
        assert_eq!(enumerate_extensions(&k5, 2, 1).unwrap().len(), 2);
        assert_eq!(enumerate_extensions(&k5, 1, 2).unwrap().len(), 1);
    }

    #[test]
    fn subfield_tests() {
        let k = qp(2);
        let sqrt2 = k
            .extend(zpoly(&k, &[-2, 0, 1]), StepKind::Eisenstein)
            .unwrap();
        let (towers, _) =
            ramification_filtration(&k, &zpoly(&k, &[-2, 0, 0, 0, 1])).unwrap();
        let fourth = towers.last().unwrap();
        assert!(is_subfield(&sqrt2, fourth).unwrap());
        assert!(is_subfield(&k, fourth).unwrap());
        let unram = k
            .extend(zpoly(&k, &[1, 1, 1]), StepKind::Unramified)
            .unwrap();
        assert!(!is_subfield(&unram, fourth).unwrap());
        assert!(!is_subfield(fourth, &sqrt2).unwrap());
    }
}
