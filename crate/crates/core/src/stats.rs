//! Statistic algorithms: conjugation-invariant functions computed both on a
//! permutation group and on a polynomial over a local field, satisfying
//! `s(R) ∼ s(Gal(R))`.
//!
//! Each statistic kind provides an equivalence `∼` on its values and, for
//! ordered kinds, a partial order `⪯` respecting subgroups: `H ≤ G` implies
//! `s(H) ⪯ s(G)`.  Ordered statistics additionally support *maximal
//! preimages*: given `P` and a value `v ⪯ s(P)`, the subgroups of `P`
//! maximal among those whose statistic is `∼ v`, up to `P`-conjugacy.
//! A generic descent works for every kind; `HasRoot` and `FactorDegrees`
//! have specialized algorithms (point stabilizers, and a direct-product /
//! wreath-product pipeline with double-coset lifting).

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::combinat::{is_refinement, linear_divisions, rectangle_divisions, IntMultiset};
use crate::error::Error;
use crate::gtower::adjoin_root;
use crate::padic::poly::pdeg;
use crate::padic::{factor_squarefree, lpoly_from_bigints, roots_in, Elt, LPoly, LocalField};
use crate::perm::{
    block_lift, direct_product, double_coset_reps, embed_direct_product, embed_wreath,
    fold_wreath, maximal_subgroups, normalizer, CosetAction, Perm, PermGroup,
};
use crate::Result;

/// Above this ambient order the double-coset lifting step of the
/// `FactorDegrees` preimage pipeline falls back to the generic descent.
const DOUBLE_COSET_CAP: u128 = 100_000;

/// Hard bound on group element enumeration inside intersections.
const INTERSECT_CAP: u128 = 1 << 20;

/// A statistic kind, possibly parameterized by inner statistics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Statistic {
    /// Whether the group has a fixed point / the polynomial has a root.
    HasRoot,
    /// Number of fixed points / roots.
    NumRoots,
    /// Degree of the permutation group / polynomial.
    Degree,
    /// Multiset of orbit sizes / irreducible factor degrees.
    FactorDegrees,
    /// Inner statistic applied to each orbit image / irreducible factor.
    Factors(Box<Statistic>),
    /// `(N_G(S) : S)` for a point stabilizer `S` / `|Aut(L/K)|`.
    NumAuts,
    /// `N_G(S)/S` as a regular permutation group / `Aut(L/K)`.
    AutGroup,
    /// A tuple of statistics evaluated side by side.
    Tup(Vec<Statistic>),
}

impl Statistic {
    /// Whether the kind supports the partial order `⪯` (and hence the
    /// `Maximal`/`Maximal2` deduction strategies).
    pub fn is_ordered(&self) -> bool {
        match self {
            Statistic::HasRoot
            | Statistic::NumRoots
            | Statistic::Degree
            | Statistic::FactorDegrees
            | Statistic::NumAuts
            | Statistic::AutGroup => true,
            Statistic::Factors(inner) => inner.is_ordered(),
            Statistic::Tup(list) => list.iter().all(Statistic::is_ordered),
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Statistic::HasRoot => write!(f, "HasRoot"),
            Statistic::NumRoots => write!(f, "NumRoots"),
            Statistic::Degree => write!(f, "Degree"),
            Statistic::FactorDegrees => write!(f, "FactorDegrees"),
            Statistic::Factors(inner) => write!(f, "Factors[{inner}]"),
            Statistic::NumAuts => write!(f, "NumAuts"),
            Statistic::AutGroup => write!(f, "AutGroup"),
            Statistic::Tup(list) => {
                write!(f, "Tup[")?;
                for (i, s) in list.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{s}")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// A statistic value.  Every kind has its own variant so that `∼` and `⪯`
/// can be decided from the values alone.
#[derive(Clone, Debug)]
pub enum StatValue {
    /// `HasRoot`.
    Bool(bool),
    /// `NumRoots`; `⪯` is reversed `≤` (subgroups gain fixed points).
    Roots(u64),
    /// `Degree`; `⪯` is equality.
    Degree(u64),
    /// `FactorDegrees`; `⪯` is multiset refinement.
    Sizes(IntMultiset),
    /// `NumAuts`; `⪯` is reversed divisibility.
    Auts(u64),
    /// `AutGroup`: a regular group compared up to symmetric conjugacy.
    Group(PermGroup),
    /// `Factors`: a multiset of inner values.
    Multi(Vec<StatValue>),
    /// `Tup`: a tuple of values.
    Tuple(Vec<StatValue>),
}

impl fmt::Display for StatValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatValue::Bool(b) => write!(f, "{b}"),
            StatValue::Roots(n) | StatValue::Degree(n) | StatValue::Auts(n) => write!(f, "{n}"),
            StatValue::Sizes(m) => {
                write!(f, "{{")?;
                for (i, x) in m.entries().iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "}}")
            }
            StatValue::Group(g) => write!(f, "group(deg {}, ord {})", g.degree(), g.order()),
            StatValue::Multi(vs) => {
                write!(f, "[")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, "]")
            }
            StatValue::Tuple(vs) => {
                write!(f, "(")?;
                for (i, v) in vs.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{v}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// Evaluates a statistic on a permutation group.
pub fn eval_group(s: &Statistic, g: &PermGroup) -> Result<StatValue> {
    match s {
        Statistic::HasRoot => Ok(StatValue::Bool(g.orbits().iter().any(|o| o.len() == 1))),
        Statistic::NumRoots => Ok(StatValue::Roots(
            g.orbits().iter().filter(|o| o.len() == 1).count() as u64,
        )),
        Statistic::Degree => Ok(StatValue::Degree(g.degree() as u64)),
        Statistic::FactorDegrees => Ok(StatValue::Sizes(orbit_sizes(g))),
        Statistic::Factors(inner) => {
            let mut vals = Vec::new();
            for orbit in g.orbits() {
                vals.push(eval_group(inner, &g.restrict_to(&orbit))?);
            }
            Ok(StatValue::Multi(vals))
        }
        Statistic::NumAuts => {
            let (n, stab) = self_normalizer_data(g)?;
            Ok(StatValue::Auts((n.order() / stab.order()) as u64))
        }
        Statistic::AutGroup => {
            let (n, stab) = self_normalizer_data(g)?;
            Ok(StatValue::Group(CosetAction::new(&n, &stab)?.image()))
        }
        Statistic::Tup(list) => {
            let vals = list
                .iter()
                .map(|s| eval_group(s, g))
                .collect::<Result<Vec<_>>>()?;
            Ok(StatValue::Tuple(vals))
        }
    }
}

fn self_normalizer_data(g: &PermGroup) -> Result<(PermGroup, PermGroup)> {
    if !g.is_transitive() {
        return Err(Error::NotApplicable(
            "NumAuts/AutGroup require a transitive group".into(),
        ));
    }
    let stab = g.point_stabilizer(0);
    let n = normalizer(g, &stab)?;
    Ok((n, stab))
}

/// Evaluates a statistic on a squarefree integer polynomial over `K`.
pub fn eval_poly(s: &Statistic, r: &[BigInt], k: &LocalField) -> Result<StatValue> {
    let f = lpoly_from_bigints(k, r);
    let factors = factor_squarefree(k, &f)?;
    eval_factors(s, k, &factors)
}

/// Evaluates a statistic given the irreducible factors of the polynomial.
fn eval_factors(s: &Statistic, k: &LocalField, factors: &[LPoly]) -> Result<StatValue> {
    match s {
        Statistic::HasRoot => Ok(StatValue::Bool(factors.iter().any(|g| pdeg(k, g) == 1))),
        Statistic::NumRoots => Ok(StatValue::Roots(
            factors.iter().filter(|g| pdeg(k, g) == 1).count() as u64,
        )),
        Statistic::Degree => Ok(StatValue::Degree(
            factors.iter().map(|g| pdeg(k, g) as u64).sum(),
        )),
        Statistic::FactorDegrees => Ok(StatValue::Sizes(IntMultiset::new(
            factors.iter().map(|g| pdeg(k, g) as u64).collect(),
        )?)),
        Statistic::Factors(inner) => {
            let mut vals = Vec::new();
            for g in factors {
                vals.push(eval_factors(inner, k, std::slice::from_ref(g))?);
            }
            Ok(StatValue::Multi(vals))
        }
        Statistic::NumAuts => {
            let g = single_irreducible(k, factors)?;
            let (l, _x) = adjoin_root(k, g)?;
            let roots = roots_in(k, g, &l)?;
            Ok(StatValue::Auts(roots.len() as u64))
        }
        Statistic::AutGroup => {
            let g = single_irreducible(k, factors)?;
            Ok(StatValue::Group(poly_aut_group(k, g)?))
        }
        Statistic::Tup(list) => {
            let vals = list
                .iter()
                .map(|s| eval_factors(s, k, factors))
                .collect::<Result<Vec<_>>>()?;
            Ok(StatValue::Tuple(vals))
        }
    }
}

fn single_irreducible<'a>(k: &LocalField, factors: &'a [LPoly]) -> Result<&'a LPoly> {
    if factors.len() != 1 {
        return Err(Error::NotApplicable(
            "NumAuts/AutGroup require an irreducible polynomial".into(),
        ));
    }
    let _ = k;
    Ok(&factors[0])
}

/// `Aut(L/K)` for `L = K[x]/(g)` as a regular permutation group on the
/// roots of `g` in `L`.
///
/// Each root `r` determines the automorphism `x ↦ r`; its action on the
/// other roots is computed by expressing every root in the `K`-power basis
/// of `x` (a p-adic linear solve) and re-evaluating at `r`.
fn poly_aut_group(k: &LocalField, g: &LPoly) -> Result<PermGroup> {
    let n = pdeg(k, g);
    if n == 1 {
        return Ok(PermGroup::trivial(1));
    }
    let (l, x) = adjoin_root(k, g)?;
    let roots = roots_in(k, g, &l)?;
    let a = roots.len();
    if a == 1 {
        return Ok(PermGroup::trivial(1));
    }

    // Columns of the change-of-basis matrix: embed(b_m) · x^t for the flat
    // basis b_m of K and 0 ≤ t < n; the same products evaluated at a root r
    // replace x when applying the automorphism x ↦ r.
    let kd = k.degree();
    let dim = l.degree();
    if dim != n * kd {
        return Err(Error::invalid("power basis dimension mismatch"));
    }
    let mut k_basis = Vec::with_capacity(kd);
    for m in 0..kd {
        let mut e = k.zero();
        e[m] = BigInt::one();
        k_basis.push(l.embed_from(k, &e));
    }
    let col_products = |y: &Elt| -> Vec<Elt> {
        let mut ypow = l.one();
        let mut cols = Vec::with_capacity(dim);
        for _ in 0..n {
            for bm in &k_basis {
                cols.push(l.mul(bm, &ypow));
            }
            ypow = l.mul(&ypow, y);
        }
        cols
    };
    let basis_cols = col_products(&x);
    let matrix: Vec<Vec<BigInt>> = (0..dim)
        .map(|row| basis_cols.iter().map(|c| c[row].clone()).collect())
        .collect();
    let rhs: Vec<Vec<BigInt>> = (0..dim)
        .map(|row| roots.iter().map(|r| r[row].clone()).collect())
        .collect();
    let sols = solve_padic(matrix, rhs, l.p(), l.pmod(), l.nprec())?;

    // π_i(j) = index of (x ↦ r_i)(r_j) among the roots.
    let threshold = l.prec_val() / 2;
    let mut perms = Vec::with_capacity(a);
    for ri in &roots {
        let cols_at_ri = col_products(ri);
        let mut images = Vec::with_capacity(a);
        for j in 0..a {
            let image = evaluate_scalar_combo(&l, &sols[j], &cols_at_ri)?;
            let mut found = None;
            for (jj, r) in roots.iter().enumerate() {
                let diff = l.sub(&image, r);
                let close = match l.val(&diff) {
                    None => true,
                    Some(v) => v >= threshold,
                };
                if close {
                    if found.is_some() {
                        return Err(Error::PrecisionCeiling(
                            "automorphism image matches several roots".into(),
                        ));
                    }
                    found = Some(jj as u16);
                }
            }
            images.push(found.ok_or_else(|| {
                Error::PrecisionCeiling("automorphism image matches no root".into())
            })?);
        }
        perms.push(Perm::from_images(images)?);
    }
    let group = PermGroup::new(a, perms)?;
    if group.order() != a as u128 {
        return Err(Error::PrecisionCeiling(
            "automorphism action is not regular at working precision".into(),
        ));
    }
    Ok(group)
}

/// A `Q_p` scalar with an explicit power-of-`p` denominator.
struct PScalar {
    num: BigInt,
    den: u32,
}

/// Σ_col scalar·col as an element of `l`, clearing denominators first.
fn evaluate_scalar_combo(l: &LocalField, scalars: &[PScalar], cols: &[Elt]) -> Result<Elt> {
    let p = BigInt::from(l.p());
    let e = scalars.iter().map(|s| s.den).max().unwrap_or(0);
    let mut acc = l.zero();
    for (s, col) in scalars.iter().zip(cols) {
        let factor = &s.num * p.pow(e - s.den);
        acc = l.add(&acc, &l.scalar_mul(col, &factor));
    }
    l.shift_down(&acc, (e as i64) * (l.e() as i64)).map_err(|_| {
        Error::PrecisionCeiling("denominator clearing failed at working precision".into())
    })
}

/// Solves `A·c = b` for several right-hand sides over `Z/p^N`, allowing
/// pivots (and solutions) with positive `p`-valuation.  Row-echelon
/// elimination picks the minimum-valuation pivot per column; back
/// substitution tracks power-of-`p` denominators explicitly.
fn solve_padic(
    mut a: Vec<Vec<BigInt>>,
    mut b: Vec<Vec<BigInt>>,
    p: u64,
    modulus: &BigInt,
    nprec: u32,
) -> Result<Vec<Vec<PScalar>>> {
    let dim = a.len();
    let nrhs = if dim == 0 { 0 } else { b[0].len() };
    let pbig = BigInt::from(p);
    let val = |x: &BigInt| -> u32 {
        if x.is_zero() {
            return nprec;
        }
        let mut v = 0;
        let mut y = x.clone();
        while v < nprec && (&y % &pbig).is_zero() {
            y /= &pbig;
            v += 1;
        }
        v
    };
    let mut pivot_vals = vec![0u32; dim];
    let mut total_loss: u32 = 0;
    for col in 0..dim {
        let (best_row, best_val) = (col..dim)
            .map(|r| (r, val(&a[r][col])))
            .min_by_key(|&(_, v)| v)
            .unwrap();
        if best_val >= nprec {
            return Err(Error::PrecisionCeiling(
                "singular power-basis matrix at working precision".into(),
            ));
        }
        a.swap(col, best_row);
        b.swap(col, best_row);
        pivot_vals[col] = best_val;
        total_loss += best_val;
        if total_loss * 2 >= nprec {
            return Err(Error::PrecisionCeiling(
                "power-basis solve loses too much precision".into(),
            ));
        }
        // Normalize the pivot row so the pivot becomes exactly p^v.
        let shift = pbig.pow(best_val);
        let unit = (&a[col][col] / &shift).mod_floor_big(modulus);
        let unit_inv = mod_inverse(&unit, modulus)?;
        for x in a[col].iter_mut().chain(b[col].iter_mut()) {
            *x = (&*x * &unit_inv) % modulus;
        }
        for row in (col + 1)..dim {
            let v = val(&a[row][col]);
            if v >= nprec {
                continue;
            }
            let factor = (&a[row][col] / &shift).mod_floor_big(modulus);
            for j in 0..dim {
                let t = (&a[row][j] - &factor * &a[col][j]) % modulus;
                a[row][j] = t;
            }
            for j in 0..nrhs {
                let t = (&b[row][j] - &factor * &b[col][j]) % modulus;
                b[row][j] = t;
            }
        }
    }
    // Back substitution with denominator tracking.
    let mut out = Vec::with_capacity(nrhs);
    for j in 0..nrhs {
        let mut c: Vec<PScalar> = (0..dim).map(|_| PScalar { num: BigInt::zero(), den: 0 }).collect();
        for i in (0..dim).rev() {
            let e = c[(i + 1)..dim].iter().map(|s| s.den).max().unwrap_or(0);
            let mut t = (&b[i][j] * pbig.pow(e)) % modulus;
            for (jj, s) in c.iter().enumerate().take(dim).skip(i + 1) {
                t = (&t - &a[i][jj] * &s.num * pbig.pow(e - s.den)) % modulus;
            }
            // Divide by p^{e + pivot_val}: peel exactly divisible powers and
            // record the rest as a denominator.
            let want = e + pivot_vals[i];
            let have = val(&t).min(want);
            t /= pbig.pow(have);
            c[i] = PScalar {
                num: t.mod_floor_big(modulus),
                den: want - have,
            };
        }
        out.push(c);
    }
    Ok(out)
}

trait ModFloor {
    fn mod_floor_big(&self, m: &BigInt) -> BigInt;
}

impl ModFloor for BigInt {
    fn mod_floor_big(&self, m: &BigInt) -> BigInt {
        let r = self % m;
        if r.is_negative() {
            r + m
        } else {
            r
        }
    }
}

fn mod_inverse(a: &BigInt, m: &BigInt) -> Result<BigInt> {
    let (mut r0, mut r1) = (m.clone(), a.mod_floor_big(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while !r1.is_zero() {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = r1;
        r1 = r2;
        t0 = t1;
        t1 = t2;
    }
    if !r0.is_one() {
        return Err(Error::invalid("modular inverse of a non-unit"));
    }
    Ok(t0.mod_floor_big(m))
}

/// Whether two values of the same statistic kind are equivalent.
pub fn equivalent(v1: &StatValue, v2: &StatValue) -> Result<bool> {
    match (v1, v2) {
        (StatValue::Bool(a), StatValue::Bool(b)) => Ok(a == b),
        (StatValue::Roots(a), StatValue::Roots(b)) => Ok(a == b),
        (StatValue::Degree(a), StatValue::Degree(b)) => Ok(a == b),
        (StatValue::Auts(a), StatValue::Auts(b)) => Ok(a == b),
        (StatValue::Sizes(a), StatValue::Sizes(b)) => Ok(a == b),
        (StatValue::Group(a), StatValue::Group(b)) => groups_equivalent(a, b),
        (StatValue::Multi(a), StatValue::Multi(b)) => multisets_equivalent(a, b),
        (StatValue::Tuple(a), StatValue::Tuple(b)) => {
            if a.len() != b.len() {
                return Err(Error::invalid("tuple statistic arity mismatch"));
            }
            for (x, y) in a.iter().zip(b) {
                if !equivalent(x, y)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        _ => Err(Error::invalid("statistic value kind mismatch")),
    }
}

fn groups_equivalent(a: &PermGroup, b: &PermGroup) -> Result<bool> {
    if a.degree() != b.degree() || a.order() != b.order() {
        return Ok(false);
    }
    let sym = PermGroup::symmetric(a.degree());
    Ok(crate::perm::is_conjugate(&sym, a, b)?.is_some())
}

/// Multiset equality of inner values under the inner equivalence; since
/// `∼` is an equivalence relation, greedy matching is exact.
fn multisets_equivalent(a: &[StatValue], b: &[StatValue]) -> Result<bool> {
    if a.len() != b.len() {
        return Ok(false);
    }
    let mut used = vec![false; b.len()];
    for x in a {
        let mut matched = false;
        for (j, y) in b.iter().enumerate() {
            if !used[j] && equivalent(x, y)? {
                used[j] = true;
                matched = true;
                break;
            }
        }
        if !matched {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The partial order `⪯`: `precedes(s(H), s(G))` must hold whenever
/// `H ≤ G`.
pub fn precedes(v1: &StatValue, v2: &StatValue) -> Result<bool> {
    match (v1, v2) {
        // A subgroup can only gain fixed points: v2 ⇒ v1.
        (StatValue::Bool(a), StatValue::Bool(b)) => Ok(!b || *a),
        // … and gains them in number.
        (StatValue::Roots(a), StatValue::Roots(b)) => Ok(b <= a),
        (StatValue::Degree(a), StatValue::Degree(b)) => Ok(a == b),
        // The subgroup's automorphism count is a multiple.
        (StatValue::Auts(a), StatValue::Auts(b)) => Ok(*b != 0 && a % b == 0),
        // Subgroup orbits refine the orbits.
        (StatValue::Sizes(a), StatValue::Sizes(b)) => Ok(is_refinement(a, b)),
        // The automorphism group grows: v2 embeds into v1.
        (StatValue::Group(a), StatValue::Group(b)) => group_embeds(b, a),
        // Orbits only split, so their count grows; the inner values of the
        // coarse orbits need not survive, so only the count is comparable.
        (StatValue::Multi(a), StatValue::Multi(b)) => Ok(a.len() >= b.len()),
        (StatValue::Tuple(a), StatValue::Tuple(b)) => {
            if a.len() != b.len() {
                return Err(Error::invalid("tuple statistic arity mismatch"));
            }
            for (x, y) in a.iter().zip(b) {
                if !precedes(x, y)? {
                    return Ok(false);
                }
            }
            Ok(true)
        }
        _ => Err(Error::invalid("statistic value kind mismatch")),
    }
}

/// Whether `small` is abstractly isomorphic to a subgroup of `big` (both
/// regular, so abstract embedding is what symmetric conjugacy sees).
fn group_embeds(small: &PermGroup, big: &PermGroup) -> Result<bool> {
    if small.order() > big.order() || big.order() % small.order() != 0 {
        return Ok(false);
    }
    if small.order() == 1 {
        return Ok(true);
    }
    for h in crate::perm::all_subgroup_classes(big)? {
        if h.order() != small.order() {
            continue;
        }
        let reg = regular_representation(&h)?;
        if groups_equivalent(&reg, small)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// The left-regular representation of a group, as a permutation group on
/// its own elements.
fn regular_representation(g: &PermGroup) -> Result<PermGroup> {
    CosetAction::new(g, &PermGroup::trivial(g.degree()))?.image_of(g)
}

/// The subgroups of `p` maximal among those whose statistic value is
/// `∼ v`, up to conjugacy.  Dispatches to the specialized algorithms for
/// `HasRoot` and `FactorDegrees` and to the generic descent otherwise.
pub fn maximal_preimages(s: &Statistic, p: &PermGroup, v: &StatValue) -> Result<Vec<PermGroup>> {
    match s {
        Statistic::HasRoot => hasroot_preimages(p, v),
        Statistic::FactorDegrees => {
            let sizes = match v {
                StatValue::Sizes(m) => m.clone(),
                _ => return Err(Error::invalid("FactorDegrees preimages need a size multiset")),
            };
            facdegs_preimages(p, &sizes)
        }
        _ => {
            let mut cache = HashMap::new();
            let out = naive_preimages(s, p, v, &mut cache)?;
            dedupe_and_filter_maximal(p, out)
        }
    }
}

/// Generic maximal-preimage descent: stop at groups whose statistic is
/// `∼ v`, recurse into maximal subgroups while `v` still precedes the
/// statistic, prune otherwise.
fn naive_preimages(
    s: &Statistic,
    p: &PermGroup,
    v: &StatValue,
    cache: &mut HashMap<(usize, Vec<u64>), Vec<PermGroup>>,
) -> Result<Vec<PermGroup>> {
    // Element keys exist only up to degree 16; larger groups are not cached.
    let key = (p.degree() <= 16).then(|| (p.degree(), p.element_key()));
    if let Some(hit) = key.as_ref().and_then(|k| cache.get(k)) {
        return Ok(hit.clone());
    }
    let result = (|| -> Result<Vec<PermGroup>> {
        let sp = match eval_group(s, p) {
            Ok(val) => val,
            Err(Error::NotApplicable(_)) => return Ok(Vec::new()),
            Err(e) => return Err(e),
        };
        if equivalent(v, &sp)? {
            return Ok(vec![p.clone()]);
        }
        if !precedes(v, &sp)? {
            return Ok(Vec::new());
        }
        let mut out = Vec::new();
        for q in maximal_subgroups(p)? {
            out.extend(naive_preimages(s, &q, v, cache)?);
        }
        dedupe_and_filter_maximal(p, out)
    })()?;
    if let Some(key) = key {
        cache.insert(key, result.clone());
    }
    Ok(result)
}

/// Specialized `HasRoot` preimages: the maximal subgroups with a fixed
/// point are the point stabilizers, one per orbit.
fn hasroot_preimages(p: &PermGroup, v: &StatValue) -> Result<Vec<PermGroup>> {
    let want = match v {
        StatValue::Bool(b) => *b,
        _ => return Err(Error::invalid("HasRoot preimages need a boolean value")),
    };
    let has = p.orbits().iter().any(|o| o.len() == 1);
    if want == has || !want {
        return Ok(vec![p.clone()]);
    }
    let stabs: Vec<PermGroup> = p
        .orbits()
        .iter()
        .map(|o| p.point_stabilizer(o[0]))
        .collect();
    dedupe_and_filter_maximal(p, stabs)
}

/// Orbit sizes as a multiset.
pub fn orbit_sizes(g: &PermGroup) -> IntMultiset {
    IntMultiset::new(g.orbits().iter().map(|o| o.len() as u64).collect())
        .expect("orbit sizes are positive")
}

/// Specialized `FactorDegrees` preimages.
fn facdegs_preimages(g: &PermGroup, v: &IntMultiset) -> Result<Vec<PermGroup>> {
    let sg = orbit_sizes(g);
    if *v == sg {
        return Ok(vec![g.clone()]);
    }
    if !is_refinement(v, &sg) {
        return Ok(Vec::new());
    }
    if g.is_transitive() {
        return facdegs_transitive(g, v);
    }
    // Intransitive case: lift maximal preimages from the enclosing direct
    // product of orbit images through double cosets.
    let (relabel, factors) = embed_direct_product(g);
    let gs = g.conjugate_by(&relabel);
    let d = direct_product(&factors);
    if d.order() > DOUBLE_COSET_CAP {
        let mut cache = HashMap::new();
        let out = naive_preimages(&Statistic::FactorDegrees, g, &StatValue::Sizes(v.clone()), &mut cache)?;
        return dedupe_and_filter_maximal(g, out);
    }
    let mut out = Vec::new();
    for h in dp_preimages(&factors, v)? {
        out.extend(lift_through_cosets(&d, &h, &gs, v)?);
    }
    let back = relabel.inverse();
    let out = out.into_iter().map(|h| h.conjugate_by(&back)).collect();
    dedupe_and_filter_maximal(g, out)
}

/// For each double-coset representative `w` of `N_D(H) \ D / G`, collects
/// `H^w ∩ G` when its orbit sizes match `v`.
fn lift_through_cosets(
    d: &PermGroup,
    h: &PermGroup,
    g: &PermGroup,
    v: &IntMultiset,
) -> Result<Vec<PermGroup>> {
    let n = normalizer(d, h)?;
    let mut out = Vec::new();
    for w in double_coset_reps(d, &n, g)? {
        let hw = h.conjugate_by(&w.inverse());
        let cand = intersect_groups(&hw, g)?;
        if orbit_sizes(&cand) == *v {
            out.push(cand);
        }
    }
    Ok(out)
}

fn intersect_groups(a: &PermGroup, b: &PermGroup) -> Result<PermGroup> {
    let (small, big) = if a.order() <= b.order() { (a, b) } else { (b, a) };
    if small.order() > INTERSECT_CAP {
        return Err(Error::cap("group intersection beyond the enumeration cap"));
    }
    let gens: Vec<Perm> = small
        .elements()
        .into_iter()
        .filter(|x| big.contains(x))
        .collect();
    PermGroup::new(a.degree(), gens)
}

/// Maximal `FactorDegrees` preimages in a direct product: split the size
/// multiset across the factors and take products of per-factor preimages.
fn dp_preimages(factors: &[PermGroup], v: &IntMultiset) -> Result<Vec<PermGroup>> {
    if factors.len() == 1 {
        if v.total() != factors[0].degree() as u64 {
            return Ok(Vec::new());
        }
        return facdegs_preimages(&factors[0], v);
    }
    let first = &factors[0];
    let mut out = Vec::new();
    for v1 in linear_divisions(first.degree() as u64, v, None) {
        let rest = multiset_minus(v, &v1)?;
        let s1 = facdegs_preimages(first, &v1)?;
        if s1.is_empty() {
            continue;
        }
        for tail in dp_preimages(&factors[1..], &rest)? {
            for h1 in &s1 {
                out.push(direct_product(&[h1.clone(), tail.clone()]));
            }
        }
    }
    Ok(out)
}

fn multiset_minus(v: &IntMultiset, part: &IntMultiset) -> Result<IntMultiset> {
    let mut entries = v.entries().to_vec();
    for &x in part.entries() {
        let pos = entries
            .iter()
            .position(|&e| e == x)
            .ok_or_else(|| Error::invalid("multiset difference of a non-subset"))?;
        entries.remove(pos);
    }
    IntMultiset::new(entries)
}

/// Maximal `FactorDegrees` preimages in a transitive group: lift from the
/// enclosing iterated wreath product through double cosets, or fall back to
/// the generic descent when the wreath product is too large.
fn facdegs_transitive(g: &PermGroup, v: &IntMultiset) -> Result<Vec<PermGroup>> {
    let (relabel, wfactors) = embed_wreath(g)?;
    let w = fold_wreath(&wfactors);
    if w.order() > DOUBLE_COSET_CAP {
        let mut cache = HashMap::new();
        let out = naive_preimages(&Statistic::FactorDegrees, g, &StatValue::Sizes(v.clone()), &mut cache)?;
        return dedupe_and_filter_maximal(g, out);
    }
    let gs = g.conjugate_by(&relabel);
    let mut out = Vec::new();
    if w.order() == gs.order() {
        for h in wreath_preimages(&wfactors, v)? {
            if orbit_sizes(&h) == *v {
                out.push(h);
            }
        }
    } else {
        for h in wreath_preimages(&wfactors, v)? {
            out.extend(lift_through_cosets(&w, &h, &gs, v)?);
        }
    }
    let back = relabel.inverse();
    let out = out.into_iter().map(|h| h.conjugate_by(&back)).collect();
    dedupe_and_filter_maximal(g, out)
}

/// Maximal `FactorDegrees` preimages in an iterated wreath product
/// `A ≀ B` (`factors` innermost-first, `B` last): for every rectangle
/// division of the `(deg B) × (deg A)` rectangle into the areas `v`, choose
/// a `B`-preimage of the column widths, an `A`-preimage per column, and
/// assemble `(Π_x A_{m(x)}) ⋊ B'`.
fn wreath_preimages(factors: &[PermGroup], v: &IntMultiset) -> Result<Vec<PermGroup>> {
    if factors.len() == 1 {
        let mut cache = HashMap::new();
        return naive_preimages(
            &Statistic::FactorDegrees,
            &factors[0],
            &StatValue::Sizes(v.clone()),
            &mut cache,
        );
    }
    let b = factors.last().unwrap();
    let a_factors = &factors[..factors.len() - 1];
    let da: usize = a_factors.iter().map(|f| f.degree()).product();
    let e = b.degree();
    let mut out: Vec<PermGroup> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for division in rectangle_divisions(e as u64, da as u64, v, None) {
        // Per-column B-width multiset and A-preimage sets.
        let widths = IntMultiset::new(division.iter().map(|(w, _)| *w).collect())?;
        let mut cache = HashMap::new();
        let s_b = naive_preimages(
            &Statistic::FactorDegrees,
            b,
            &StatValue::Sizes(widths),
            &mut cache,
        )?;
        if s_b.is_empty() {
            continue;
        }
        let mut s_a = Vec::with_capacity(division.len());
        for (_, heights) in &division {
            s_a.push(wreath_preimages(a_factors, heights)?);
        }
        if s_a.iter().any(|s| s.is_empty()) {
            continue;
        }
        for h_b in &s_b {
            let orbits = h_b.orbits();
            for assignment in orbit_column_assignments(&orbits, &division) {
                for combo in cartesian(&s_a) {
                    let h = assemble_wreath_subgroup(h_b, &orbits, &assignment, &combo, da, e)?;
                    if seen.insert(h.element_key()) {
                        out.push(h);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// All bijections orbit → column with matching sizes, as per-orbit column
/// indices; assignments differing only between identical columns are
/// deduplicated.
fn orbit_column_assignments(
    orbits: &[Vec<u16>],
    division: &[(u64, IntMultiset)],
) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut used = vec![false; division.len()];
    let mut cur = vec![0usize; orbits.len()];
    fn rec(
        orbits: &[Vec<u16>],
        division: &[(u64, IntMultiset)],
        pos: usize,
        used: &mut [bool],
        cur: &mut [usize],
        out: &mut Vec<Vec<usize>>,
    ) {
        if pos == orbits.len() {
            out.push(cur.to_vec());
            return;
        }
        let mut tried: Vec<&(u64, IntMultiset)> = Vec::new();
        for i in 0..division.len() {
            if used[i]
                || division[i].0 != orbits[pos].len() as u64
                || tried.iter().any(|d| **d == division[i])
            {
                continue;
            }
            tried.push(&division[i]);
            used[i] = true;
            cur[pos] = i;
            rec(orbits, division, pos + 1, used, cur, out);
            used[i] = false;
        }
    }
    rec(orbits, division, 0, &mut used, &mut cur, &mut out);
    out
}

fn cartesian(sets: &[Vec<PermGroup>]) -> Vec<Vec<&PermGroup>> {
    let mut out: Vec<Vec<&PermGroup>> = vec![Vec::new()];
    for set in sets {
        let mut next = Vec::with_capacity(out.len() * set.len());
        for prefix in &out {
            for item in set {
                let mut row = prefix.clone();
                row.push(item);
                next.push(row);
            }
        }
        out = next;
    }
    out
}

/// `(Π_x H_{A,m(x)}) ⋊ H_B` on `da·e` points: block lifts of the `B`-part
/// generators plus per-block copies of the assigned `A`-part generators.
fn assemble_wreath_subgroup(
    h_b: &PermGroup,
    orbits: &[Vec<u16>],
    assignment: &[usize],
    combo: &[&PermGroup],
    da: usize,
    e: usize,
) -> Result<PermGroup> {
    let degree = da * e;
    let mut gens: Vec<Perm> = h_b.gens().iter().map(|s| block_lift(s, da)).collect();
    for (orbit, &col) in orbits.iter().zip(assignment) {
        let ha = combo[col];
        for &x in orbit {
            let off = x as usize * da;
            for gen in ha.gens() {
                let mut images: Vec<u16> = (0..degree as u16).collect();
                for j in 0..da {
                    images[off + j] = (off + gen.apply(j as u16) as usize) as u16;
                }
                gens.push(Perm::from_images(images)?);
            }
        }
    }
    PermGroup::new(degree, gens)
}

/// Removes conjugate duplicates (within `ambient`) and entries contained in
/// a conjugate of another entry, leaving the maximal classes.
fn dedupe_and_filter_maximal(
    ambient: &PermGroup,
    mut candidates: Vec<PermGroup>,
) -> Result<Vec<PermGroup>> {
    candidates.sort_by(|a, b| b.order().cmp(&a.order()));
    let mut kept: Vec<PermGroup> = Vec::new();
    'next: for cand in candidates {
        for k in &kept {
            if k.order() % cand.order() == 0
                && crate::perm::conjugate_contained_in(ambient, &cand, k)?.is_some()
            {
                continue 'next;
            }
        }
        kept.push(cand);
    }
    Ok(kept)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::with_precision;
    use crate::perm::all_subgroup_classes;

    fn perm(images: &[u16]) -> Perm {
        Perm::from_images(images.to_vec()).unwrap()
    }

    fn sizes(v: &[u64]) -> StatValue {
        StatValue::Sizes(IntMultiset::new(v.to_vec()).unwrap())
    }

    fn eval_int_poly(s: &Statistic, p: u64, coeffs: &[i64]) -> StatValue {
        let big: Vec<BigInt> = coeffs.iter().map(|&c| BigInt::from(c)).collect();
        with_precision(p, |k| eval_poly(s, &big, k)).unwrap()
    }

    #[test]
    fn group_side_examples() {
        let g = PermGroup::new(5, vec![perm(&[1, 0, 3, 4, 2])]).unwrap();
        assert!(matches!(
            eval_group(&Statistic::FactorDegrees, &g).unwrap(),
            StatValue::Sizes(m) if m.entries() == [3, 2]
        ));
        assert!(matches!(
            eval_group(&Statistic::HasRoot, &PermGroup::symmetric(3)).unwrap(),
            StatValue::Bool(false)
        ));
        // Dihedral group of order 8: the stabilizer of a point has a
        // normalizer of order 4 (checked against a brute-force scan).
        let d4 = PermGroup::new(4, vec![perm(&[1, 2, 3, 0]), perm(&[0, 3, 2, 1])]).unwrap();
        let stab = d4.point_stabilizer(0);
        let brute: Vec<Perm> = d4
            .elements()
            .into_iter()
            .filter(|g| stab.gens().iter().all(|s| stab.contains(&s.relabel(g))))
            .collect();
        assert_eq!(brute.len() as u128 / stab.order(), 2);
        assert!(matches!(
            eval_group(&Statistic::NumAuts, &d4).unwrap(),
            StatValue::Auts(2)
        ));
    }

    #[test]
    fn poly_side_examples() {
        assert!(matches!(
            eval_int_poly(&Statistic::FactorDegrees, 2, &[-1, 0, 1]),
            StatValue::Sizes(m) if m.entries() == [1, 1]
        ));
        assert!(matches!(
            eval_int_poly(&Statistic::HasRoot, 2, &[-2, 0, 1]),
            StatValue::Bool(false)
        ));
        assert!(matches!(
            eval_int_poly(&Statistic::NumAuts, 2, &[-2, 0, 0, 1]),
            StatValue::Auts(1)
        ));
        assert!(matches!(
            eval_int_poly(&Statistic::NumAuts, 2, &[1, 1, 1]),
            StatValue::Auts(2)
        ));
    }

    #[test]
    fn aut_group_of_unramified_quartic_is_cyclic() {
        let v = eval_int_poly(&Statistic::AutGroup, 2, &[1, 1, 0, 0, 1]);
        let g = match v {
            StatValue::Group(g) => g,
            other => panic!("expected a group value, got {other:?}"),
        };
        assert_eq!(g.degree(), 4);
        assert_eq!(g.order(), 4);
        let c4 = regular_representation(&PermGroup::cyclic(4)).unwrap();
        assert!(groups_equivalent(&g, &c4).unwrap());
    }

    #[test]
    fn totally_ramified_cyclic_cubic_has_full_auts() {
        // x³ + x² − 2x − 1 generates the real subfield of Q(ζ_7): cyclic
        // cubic, totally ramified over Q_7.
        let v = eval_int_poly(&Statistic::AutGroup, 7, &[-1, -2, 1, 1]);
        match v {
            StatValue::Group(g) => {
                assert_eq!(g.degree(), 3);
                assert_eq!(g.order(), 3);
            }
            other => panic!("expected a group value, got {other:?}"),
        }
    }

    #[test]
    fn relation_examples() {
        assert!(precedes(&sizes(&[2, 1, 1]), &sizes(&[2, 2])).unwrap());
        assert!(!precedes(&sizes(&[3, 1]), &sizes(&[2, 2])).unwrap());
        assert!(precedes(&StatValue::Bool(true), &StatValue::Bool(true)).unwrap());
        assert!(!precedes(&StatValue::Bool(false), &StatValue::Bool(true)).unwrap());
        assert!(precedes(&StatValue::Bool(true), &StatValue::Bool(false)).unwrap());
        assert!(precedes(&StatValue::Auts(4), &StatValue::Auts(2)).unwrap());
        assert!(!precedes(&StatValue::Auts(2), &StatValue::Auts(4)).unwrap());
        let c4 = regular_representation(&PermGroup::cyclic(4)).unwrap();
        let v4 = PermGroup::new(4, vec![perm(&[1, 0, 3, 2]), perm(&[2, 3, 0, 1])]).unwrap();
        assert!(!equivalent(&StatValue::Group(c4.clone()), &StatValue::Group(v4.clone())).unwrap());
        let c2 = regular_representation(&PermGroup::cyclic(2)).unwrap();
        assert!(precedes(&StatValue::Group(c4), &StatValue::Group(c2)).unwrap());
    }

    #[test]
    fn order_soundness_on_s4() {
        let kinds = [
            Statistic::HasRoot,
            Statistic::NumRoots,
            Statistic::Degree,
            Statistic::FactorDegrees,
            Statistic::Factors(Box::new(Statistic::Degree)),
            Statistic::Tup(vec![Statistic::HasRoot, Statistic::NumRoots]),
        ];
        let classes = all_subgroup_classes(&PermGroup::symmetric(4)).unwrap();
        for g in &classes {
            for h in &classes {
                if !g.contains_group(h) {
                    continue;
                }
                for s in &kinds {
                    let vh = eval_group(s, h).unwrap();
                    let vg = eval_group(s, g).unwrap();
                    assert!(
                        precedes(&vh, &vg).unwrap(),
                        "order violated for {s} with H ≤ G of orders {} ≤ {}",
                        h.order(),
                        g.order()
                    );
                }
                if g.is_transitive() && h.is_transitive() {
                    for s in [Statistic::NumAuts, Statistic::AutGroup] {
                        let vh = eval_group(&s, h).unwrap();
                        let vg = eval_group(&s, g).unwrap();
                        assert!(precedes(&vh, &vg).unwrap(), "order violated for {s}");
                    }
                }
            }
        }
    }

    #[test]
    fn hasroot_preimages_examples() {
        let s3 = PermGroup::symmetric(3);
        let pre = maximal_preimages(&Statistic::HasRoot, &s3, &StatValue::Bool(true)).unwrap();
        assert_eq!(pre.len(), 1);
        assert_eq!(pre[0].order(), 2);
        assert!(pre[0].orbits().iter().any(|o| o.len() == 1));
        let pre = maximal_preimages(&Statistic::HasRoot, &s3, &StatValue::Bool(false)).unwrap();
        assert_eq!(pre.len(), 1);
        assert_eq!(pre[0].order(), 6);
    }

    #[test]
    fn facdegs_preimages_in_s4() {
        let s4 = PermGroup::symmetric(4);
        let pre = maximal_preimages(&Statistic::FactorDegrees, &s4, &sizes(&[2, 2])).unwrap();
        assert_eq!(pre.len(), 1);
        assert_eq!(pre[0].order(), 4);
        let expected = PermGroup::new(4, vec![perm(&[1, 0, 2, 3]), perm(&[0, 1, 3, 2])]).unwrap();
        assert!(
            crate::perm::is_conjugate(&s4, &pre[0], &expected)
                .unwrap()
                .is_some()
        );
    }

    #[test]
    fn facdegs_matches_naive_on_s4_lattice() {
        // Every subgroup of S_4 and every achievable orbit-size multiset:
        // the specialized pipeline and the generic descent agree as sets of
        // conjugacy classes.
        let s4 = PermGroup::symmetric(4);
        let classes = all_subgroup_classes(&s4).unwrap();
        let targets: Vec<IntMultiset> = [
            vec![4u64],
            vec![3, 1],
            vec![2, 2],
            vec![2, 1, 1],
            vec![1, 1, 1, 1],
        ]
        .into_iter()
        .map(|v| IntMultiset::new(v).unwrap())
        .collect();
        for p in &classes {
            for v in &targets {
                if !is_refinement(v, &orbit_sizes(p)) {
                    continue;
                }
                let fast = facdegs_preimages(p, v).unwrap();
                let mut cache = HashMap::new();
                let slow = dedupe_and_filter_maximal(
                    p,
                    naive_preimages(
                        &Statistic::FactorDegrees,
                        p,
                        &StatValue::Sizes(v.clone()),
                        &mut cache,
                    )
                    .unwrap(),
                )
                .unwrap();
                assert_eq!(
                    fast.len(),
                    slow.len(),
                    "class count mismatch for |P|={} v={:?}",
                    p.order(),
                    v.entries()
                );
                for h in &fast {
                    assert!(
                        slow.iter().any(|k| crate::perm::is_conjugate(p, h, k)
                            .unwrap()
                            .is_some()),
                        "unmatched preimage for |P|={} v={:?}",
                        p.order(),
                        v.entries()
                    );
                }
            }
        }
    }

    #[test]
    fn aut_group_lemma_on_transitive_pairs() {
        // For transitive H ≤ G the automorphism group of G embeds into that
        // of H (precedes-consistency of the AutGroup order).
        for degree in 2..=5usize {
            let classes = all_subgroup_classes(&PermGroup::symmetric(degree)).unwrap();
            for g in classes.iter().filter(|g| g.is_transitive()) {
                for h in classes.iter().filter(|h| h.is_transitive()) {
                    if !g.contains_group(h) {
                        continue;
                    }
                    let vh = eval_group(&Statistic::AutGroup, h).unwrap();
                    let vg = eval_group(&Statistic::AutGroup, g).unwrap();
                    assert!(precedes(&vh, &vg).unwrap());
                }
            }
        }
    }

    #[test]
    fn statistic_display_grammar() {
        let s = Statistic::Tup(vec![Statistic::HasRoot, Statistic::NumRoots]);
        assert_eq!(s.to_string(), "Tup[HasRoot,NumRoots]");
        assert_eq!(
            Statistic::Factors(Box::new(Statistic::Degree)).to_string(),
            "Factors[Degree]"
        );
    }
}
