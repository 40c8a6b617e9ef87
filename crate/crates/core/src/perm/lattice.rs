//! Subgroup-lattice computations: subgroup classes up to conjugacy,
//! transitive-subgroup catalogs, Sylow subgroups, maximal subgroups, and
//! descent to the subgroups of a given index.
//!
//! Small groups are handled by a bottom-up closure of the full class
//! lattice. Above [`SMALL_LATTICE_CAP`] the lattice is out of reach, so
//! maximal subgroups are assembled structurally (set stabilizers, block
//! system stabilizers, the alternating subgroup, and primitive groups from
//! the transitive catalog) and verified by a conjugate-containment filter;
//! at the degrees this library targets, the only groups too large for the
//! lattice are symmetric and alternating groups and groups with fixed
//! points reducing to them, which is exactly what the structural path
//! covers. Everything is memoized per process, keyed by the exact element
//! set.

use std::collections::{HashMap, HashSet};
use std::sync::Mutex;

use once_cell::sync::OnceCell;

use super::embed::wreath_product;
use super::group::PermGroup;
use super::ops::{
    conjugate_contained_in, is_conjugate, minimal_block_partition, normalizer, set_stabilizer,
    sorted_elements, system_stabilizer, PointPartition,
};
use super::perm::Perm;
use crate::Error;

/// Order bound above which full subgroup-lattice enumeration is refused.
pub const LATTICE_ORDER_CAP: u128 = 1 << 16;

/// Index bound for [`subgroups_of_index`].
pub const SUBGROUP_INDEX_CAP: u128 = 1 << 12;

/// Order bound below which maximal subgroups go through the full lattice.
const SMALL_LATTICE_CAP: u128 = 2048;

/// Element-enumeration bound shared with the ops module.
const ELEMENT_CAP: u128 = 1 << 17;

type GroupKey = (usize, Vec<u64>);

fn maximal_cache() -> &'static Mutex<HashMap<GroupKey, Vec<PermGroup>>> {
    static CACHE: OnceCell<Mutex<HashMap<GroupKey, Vec<PermGroup>>>> = OnceCell::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn classes_cache() -> &'static Mutex<HashMap<GroupKey, Vec<PermGroup>>> {
    static CACHE: OnceCell<Mutex<HashMap<GroupKey, Vec<PermGroup>>>> = OnceCell::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn transitive_cache() -> &'static Mutex<HashMap<usize, Vec<PermGroup>>> {
    static CACHE: OnceCell<Mutex<HashMap<usize, Vec<PermGroup>>>> = OnceCell::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn is_prime_power(mut n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            while n % p == 0 {
                n /= p;
            }
            return n == 1;
        }
        p += 1;
    }
    true
}

fn perm_pow(g: &Perm, mut e: u64) -> Perm {
    let mut result = Perm::identity(g.degree());
    let mut base = g.clone();
    while e > 0 {
        if e & 1 == 1 {
            result = base.compose(&result);
        }
        base = base.compose(&base.clone());
        e >>= 1;
    }
    result
}

fn check_lattice_input(w: &PermGroup, cap: u128) -> crate::Result<()> {
    if w.degree() > 16 {
        return Err(Error::cap(format!(
            "subgroup lattice operations support degree ≤ 16, got {}",
            w.degree()
        )));
    }
    if w.order() > cap {
        return Err(Error::cap(format!(
            "group order {} exceeds lattice cap {cap}",
            w.order()
        )));
    }
    Ok(())
}

/// A growing list of subgroup classes of a fixed ambient group, deduplicated
/// up to conjugacy in the ambient (with an exact-set fast path and a cheap
/// fingerprint filter before the conjugacy search).
struct ClassSet<'a> {
    w: &'a PermGroup,
    classes: Vec<PermGroup>,
    fingerprints: Vec<(u128, Vec<usize>, Vec<(u64, usize)>)>,
    exact: HashSet<Vec<u64>>,
}

impl<'a> ClassSet<'a> {
    fn new(w: &'a PermGroup) -> Self {
        ClassSet { w, classes: Vec::new(), fingerprints: Vec::new(), exact: HashSet::new() }
    }

    /// Inserts `h`; returns the class index and whether it was new.
    fn insert(&mut self, h: PermGroup) -> crate::Result<(usize, bool)> {
        if !self.exact.insert(h.element_key()) {
            let fp = h.fingerprint();
            for (i, c) in self.classes.iter().enumerate() {
                if self.fingerprints[i] == fp && c.equals_group(&h) {
                    return Ok((i, false));
                }
            }
        }
        let fp = h.fingerprint();
        for (i, c) in self.classes.iter().enumerate() {
            if self.fingerprints[i] == fp && is_conjugate(self.w, &h, c)?.is_some() {
                return Ok((i, false));
            }
        }
        self.classes.push(h);
        self.fingerprints.push(fp);
        Ok((self.classes.len() - 1, true))
    }
}

/// Closes a seed set of subgroups of `w` upward: repeatedly extends every
/// class by one element of prime-power order (one representative per orbit
/// of the class normalizer) and deduplicates up to `w`-conjugacy. Returns
/// every class reachable from the seeds, which is the full set of classes
/// above the seeds in the lattice.
fn extend_upward(w: &PermGroup, seeds: Vec<PermGroup>) -> crate::Result<Vec<PermGroup>> {
    let elems = sorted_elements(w)?;
    let candidates: Vec<Perm> = elems
        .into_iter()
        .filter(|g| is_prime_power(g.order()))
        .collect();
    let mut set = ClassSet::new(w);
    let mut queue: Vec<usize> = Vec::new();
    for s in seeds {
        let (i, new) = set.insert(s)?;
        if new {
            queue.push(i);
        }
    }
    let mut k = 0;
    while k < queue.len() {
        let h = set.classes[queue[k]].clone();
        k += 1;
        if h.order() == w.order() {
            continue;
        }
        let n = normalizer(w, &h)?;
        let mut visited: HashSet<u64> = HashSet::new();
        for c in &candidates {
            if !visited.insert(c.pack()) {
                continue;
            }
            // Mark the whole N-conjugacy orbit; its members generate
            // conjugate extensions.
            let mut stack = vec![c.clone()];
            while let Some(x) = stack.pop() {
                for g in n.gens() {
                    let y = x.relabel(g);
                    if visited.insert(y.pack()) {
                        stack.push(y);
                    }
                }
            }
            if h.contains(c) {
                continue;
            }
            let mut gens = h.gens().to_vec();
            gens.push(c.clone());
            let ext = PermGroup::new(w.degree(), gens)?;
            let (i, new) = set.insert(ext)?;
            if new {
                queue.push(i);
            }
        }
    }
    let mut classes = set.classes;
    classes.sort_by_key(|c| (c.order(), c.to_text()));
    Ok(classes)
}

/// All subgroups of `w` up to `w`-conjugacy, including the trivial group and
/// `w` itself. Errors with a cap if `|W|` exceeds [`LATTICE_ORDER_CAP`].
pub fn all_subgroup_classes(w: &PermGroup) -> crate::Result<Vec<PermGroup>> {
    check_lattice_input(w, LATTICE_ORDER_CAP)?;
    let key = (w.degree(), w.element_key());
    if let Some(hit) = classes_cache().lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let classes = extend_upward(w, vec![PermGroup::trivial(w.degree())])?;
    classes_cache().lock().unwrap().insert(key, classes.clone());
    Ok(classes)
}

/// The transitive subgroups of `S_degree` up to conjugacy.
///
/// Degrees up to 6 are filtered from the full lattice of the symmetric
/// group. Degrees 7 and 8 are prime-power degrees, so every transitive
/// group contains a transitive Sylow subgroup; seeding the upward closure
/// with the transitive subgroups of a Sylow subgroup of `S_degree` reaches
/// every transitive class through transitive intermediates only.
pub fn transitive_subgroup_classes(degree: usize) -> crate::Result<Vec<PermGroup>> {
    if degree == 0 {
        return Err(Error::invalid("transitive catalog requires degree ≥ 1"));
    }
    if let Some(hit) = transitive_cache().lock().unwrap().get(&degree) {
        return Ok(hit.clone());
    }
    let classes = match degree {
        1 => vec![PermGroup::trivial(1)],
        2..=6 => all_subgroup_classes(&PermGroup::symmetric(degree))?
            .into_iter()
            .filter(|h| h.is_transitive())
            .collect(),
        7 => {
            let s7 = PermGroup::symmetric(7);
            let c7 = PermGroup::cyclic(7);
            extend_upward(&s7, vec![c7])?
        }
        8 => {
            let s8 = PermGroup::symmetric(8);
            let c2 = PermGroup::symmetric(2);
            let syl = wreath_product(&wreath_product(&c2, &c2), &c2);
            let seeds: Vec<PermGroup> = all_subgroup_classes(&syl)?
                .into_iter()
                .filter(|h| h.is_transitive())
                .map(|h| {
                    let gens = h.gens().to_vec();
                    PermGroup::new(8, gens).expect("Sylow subgroup acts on 8 points")
                })
                .collect();
            extend_upward(&s8, seeds)?
        }
        _ => {
            return Err(Error::cap(format!(
                "transitive catalog supports degree ≤ 8, got {degree}"
            )))
        }
    };
    transitive_cache().lock().unwrap().insert(degree, classes.clone());
    Ok(classes)
}

/// A Sylow `p`-subgroup of `g`, found deterministically: grow a `p`-group
/// by adjoining `p`-elements of its normalizer until the full `p`-part of
/// `|G|` is reached.
pub fn sylow_subgroup(g: &PermGroup, p: u64) -> crate::Result<PermGroup> {
    if !is_prime(p) {
        return Err(Error::invalid(format!("sylow_subgroup: {p} is not prime")));
    }
    if g.order() > ELEMENT_CAP {
        return Err(Error::cap(format!(
            "group order {} exceeds element iteration cap",
            g.order()
        )));
    }
    let mut target = 1u128;
    let mut m = g.order();
    while m % p as u128 == 0 {
        m /= p as u128;
        target *= p as u128;
    }
    let mut syl = PermGroup::trivial(g.degree());
    while syl.order() < target {
        let n = if syl.order() == 1 { g.clone() } else { normalizer(g, &syl)? };
        let mut extended = false;
        for x in sorted_elements(&n)? {
            let ord = x.order();
            if ord % p != 0 {
                continue;
            }
            let mut cofactor = ord;
            while cofactor % p == 0 {
                cofactor /= p;
            }
            let h = perm_pow(&x, cofactor);
            if syl.contains(&h) {
                continue;
            }
            let mut gens = syl.gens().to_vec();
            gens.push(h);
            syl = PermGroup::new(g.degree(), gens)?;
            extended = true;
            break;
        }
        if !extended {
            return Err(Error::invalid(
                "sylow_subgroup: no extending p-element (inconsistent group)",
            ));
        }
    }
    Ok(syl)
}

/// Re-embeds a group acting on `support` back into the full point set,
/// fixing all other points.
fn embed_on_support(h: &PermGroup, support: &[u16], degree: usize) -> PermGroup {
    let gens = h
        .gens()
        .iter()
        .map(|g| {
            let mut images: Vec<u16> = (0..degree as u16).collect();
            for (i, &p) in support.iter().enumerate() {
                images[p as usize] = support[g.apply(i as u16) as usize];
            }
            Perm::from_images(images).unwrap()
        })
        .collect();
    PermGroup::new(degree, gens).unwrap()
}

/// Drops every candidate that is properly contained, up to `w`-conjugacy,
/// in another candidate or equals `w`; what survives are exactly the
/// maximal classes, provided every maximal subgroup has a conjugate among
/// the candidates.
fn maximality_filter(
    w: &PermGroup,
    candidates: Vec<PermGroup>,
) -> crate::Result<Vec<PermGroup>> {
    let mut set = ClassSet::new(w);
    for c in candidates {
        if c.order() < w.order() {
            set.insert(c)?;
        }
    }
    let classes = set.classes;
    let mut maximal = Vec::new();
    'outer: for h in &classes {
        for k in &classes {
            if k.order() > h.order()
                && k.order() % h.order() == 0
                && conjugate_contained_in(w, h, k)?.is_some()
            {
                continue 'outer;
            }
        }
        maximal.push(h.clone());
    }
    maximal.sort_by_key(|c| (std::cmp::Reverse(c.order()), c.to_text()));
    Ok(maximal)
}

/// Maximal subgroups of large groups, assembled structurally. Fixed points
/// are split off first; the remaining action must be a primitive symmetric
/// or alternating group (at the degrees within the lattice caps, these are
/// the only groups whose order can exceed [`SMALL_LATTICE_CAP`]). Their
/// maximal subgroups are intransitive (a set stabilizer), transitive
/// imprimitive (a block-system stabilizer), or primitive (the alternating
/// subgroup or a catalog group); candidates of each kind feed the
/// maximality filter.
fn structural_maximal_subgroups(w: &PermGroup) -> crate::Result<Vec<PermGroup>> {
    let moved: Vec<u16> = (0..w.degree() as u16)
        .filter(|&x| w.gens().iter().any(|g| g.apply(x) != x))
        .collect();
    if moved.len() < w.degree() {
        let stripped = w.restrict_to(&moved);
        let inner = maximal_subgroups(&stripped)?;
        return Ok(inner
            .iter()
            .map(|h| embed_on_support(h, &moved, w.degree()))
            .collect());
    }
    if !w.is_transitive() || minimal_block_partition(w)?.is_some() {
        return Err(Error::cap(format!(
            "maximal subgroups of a non-primitive group of order {} exceed the lattice cap",
            w.order()
        )));
    }
    let n = w.degree();
    let is_symmetric = w.order() == factorial(n);
    let is_alternating = !is_symmetric && 2 * w.order() == factorial(n);
    if !is_symmetric && !is_alternating {
        return Err(Error::cap(format!(
            "maximal subgroups of a primitive group of order {} exceed the lattice cap",
            w.order()
        )));
    }
    let mut candidates: Vec<PermGroup> = Vec::new();
    if is_symmetric {
        candidates.push(PermGroup::alternating(n));
    }
    // Set stabilizers: one per subset size (all k-subsets form one orbit).
    for k in 1..=n / 2 {
        let set: Vec<u16> = (0..k as u16).collect();
        candidates.push(set_stabilizer(w, &set)?);
    }
    // Block-system stabilizers: one per block size (one orbit of uniform
    // partitions per shape).
    for d in 2..n {
        if n % d != 0 {
            continue;
        }
        let blocks: Vec<Vec<u16>> = (0..n / d)
            .map(|i| ((i * d) as u16..((i + 1) * d) as u16).collect())
            .collect();
        let partition = PointPartition::new(n, blocks)?;
        candidates.push(system_stabilizer(w, &partition)?);
    }
    // Primitive subgroups from the transitive catalog. Conjugation by an
    // odd permutation preserves the alternating group, so a catalog class
    // lies in A_n exactly when its representative does; inside A_n a
    // symmetric-group class splits in two when no odd permutation
    // normalizes it, so the transposition twin is added when it is not
    // conjugate to the representative within `w`.
    for t in transitive_subgroup_classes(n)? {
        if t.order() >= w.order() || minimal_block_partition(&t)?.is_some() {
            continue;
        }
        if !w.contains_group(&t) {
            continue;
        }
        if is_alternating {
            let swap = Perm::from_cycles(n, &[vec![0, 1]])?;
            let twin = t.conjugate_by(&swap);
            if is_conjugate(w, &t, &twin)?.is_none() {
                candidates.push(twin);
            }
        }
        candidates.push(t);
    }
    maximality_filter(w, candidates)
}

/// The maximal subgroups of `w`, up to `w`-conjugacy, sorted by descending
/// order. Memoized per process.
pub fn maximal_subgroups(w: &PermGroup) -> crate::Result<Vec<PermGroup>> {
    check_lattice_input(w, ELEMENT_CAP)?;
    if w.order() == 1 {
        return Ok(Vec::new());
    }
    let key = (w.degree(), w.element_key());
    if let Some(hit) = maximal_cache().lock().unwrap().get(&key) {
        return Ok(hit.clone());
    }
    let result = if w.order() <= SMALL_LATTICE_CAP {
        maximality_filter(w, all_subgroup_classes(w)?)?
    } else {
        structural_maximal_subgroups(w)?
    };
    maximal_cache().lock().unwrap().insert(key, result.clone());
    Ok(result)
}

/// The subgroups of `w` of index exactly `n`, up to `w`-conjugacy, found by
/// descending through maximal subgroups (pruned by Lagrange). Errors if `n`
/// does not divide `|W|` or exceeds [`SUBGROUP_INDEX_CAP`].
pub fn subgroups_of_index(w: &PermGroup, n: u128) -> crate::Result<Vec<PermGroup>> {
    check_lattice_input(w, ELEMENT_CAP)?;
    if n == 0 || w.order() % n != 0 {
        return Err(Error::invalid(format!(
            "index {n} does not divide the group order {}",
            w.order()
        )));
    }
    if n > SUBGROUP_INDEX_CAP {
        return Err(Error::cap(format!(
            "index {n} exceeds subgroup index cap {SUBGROUP_INDEX_CAP}"
        )));
    }
    let target = w.order() / n;
    let mut found = ClassSet::new(w);
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut queue = vec![w.clone()];
    seen.insert(w.element_key());
    while let Some(h) = queue.pop() {
        if h.order() == target {
            found.insert(h)?;
            continue;
        }
        for m in maximal_subgroups(&h)? {
            if m.order() >= target && m.order() % target == 0 && seen.insert(m.element_key()) {
                queue.push(m);
            }
        }
    }
    let mut classes = found.classes;
    classes.sort_by_key(|c| c.to_text());
    Ok(classes)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: every subgroup of `w` as an exact element set,
    /// by closing upward one element at a time with no pruning, then
    /// grouped into conjugacy classes by scanning all of `w`.
    fn oracle_subgroup_classes(w: &PermGroup) -> Vec<PermGroup> {
        let elems = sorted_elements(w).unwrap();
        let mut seen: HashSet<Vec<u64>> = HashSet::new();
        let mut subgroups = vec![PermGroup::trivial(w.degree())];
        seen.insert(subgroups[0].element_key());
        let mut k = 0;
        while k < subgroups.len() {
            let h = subgroups[k].clone();
            k += 1;
            for g in &elems {
                if h.contains(g) {
                    continue;
                }
                let mut gens = h.gens().to_vec();
                gens.push(g.clone());
                let ext = PermGroup::new(w.degree(), gens).unwrap();
                if seen.insert(ext.element_key()) {
                    subgroups.push(ext);
                }
            }
        }
        // Group into conjugacy classes.
        let mut classes: Vec<PermGroup> = Vec::new();
        let mut classified: HashSet<Vec<u64>> = HashSet::new();
        for h in &subgroups {
            if classified.contains(&h.element_key()) {
                continue;
            }
            classes.push(h.clone());
            for s in &elems {
                classified.insert(h.conjugate_by(s).element_key());
            }
        }
        classes
    }

    fn assert_same_classes(w: &PermGroup, ours: &[PermGroup], oracle: &[PermGroup]) {
        assert_eq!(ours.len(), oracle.len());
        for h in ours {
            let hits = oracle
                .iter()
                .filter(|k| is_conjugate(w, h, k).unwrap().is_some())
                .count();
            assert_eq!(hits, 1, "class {} unmatched in oracle", h.to_text());
        }
    }

    #[test]
    fn subgroup_classes_match_oracle() {
        for w in [
            PermGroup::symmetric(4),
            PermGroup::parse_text("4: (1 2 3 4) | (1 3)").unwrap(),
            PermGroup::parse_text("6: (1 2 3 4 5 6)").unwrap(),
        ] {
            let ours = all_subgroup_classes(&w).unwrap();
            let oracle = oracle_subgroup_classes(&w);
            assert_same_classes(&w, &ours, &oracle);
        }
    }

    #[test]
    fn subgroup_classes_of_s5_match_oracle() {
        let w = PermGroup::symmetric(5);
        let ours = all_subgroup_classes(&w).unwrap();
        let oracle = oracle_subgroup_classes(&w);
        assert_same_classes(&w, &ours, &oracle);
    }

    #[test]
    fn maximal_subgroups_match_oracle() {
        for w in [PermGroup::symmetric(4), PermGroup::symmetric(5)] {
            let oracle_classes = oracle_subgroup_classes(&w);
            let mut oracle_maximal = Vec::new();
            'outer: for h in &oracle_classes {
                if h.order() == w.order() {
                    continue;
                }
                for k in &oracle_classes {
                    if k.order() < w.order()
                        && k.order() > h.order()
                        && conjugate_contained_in(&w, h, k).unwrap().is_some()
                    {
                        continue 'outer;
                    }
                }
                oracle_maximal.push(h.clone());
            }
            let ours = maximal_subgroups(&w).unwrap();
            assert_same_classes(&w, &ours, &oracle_maximal);
        }
    }

    #[test]
    fn sylow_subgroups_have_full_p_part() {
        let s4 = PermGroup::symmetric(4);
        assert_eq!(sylow_subgroup(&s4, 2).unwrap().order(), 8);
        assert_eq!(sylow_subgroup(&s4, 3).unwrap().order(), 3);
        assert_eq!(sylow_subgroup(&s4, 5).unwrap().order(), 1);
        let s6 = PermGroup::symmetric(6);
        assert_eq!(sylow_subgroup(&s6, 2).unwrap().order(), 16);
        assert_eq!(sylow_subgroup(&s6, 3).unwrap().order(), 9);
        assert!(sylow_subgroup(&s6, 4).is_err());
    }

    #[test]
    fn index_descent_matches_oracle() {
        let w = PermGroup::symmetric(4);
        let oracle = oracle_subgroup_classes(&w);
        for n in [1u128, 2, 3, 4, 6, 8, 12, 24] {
            let ours = subgroups_of_index(&w, n).unwrap();
            let expected: Vec<PermGroup> = oracle
                .iter()
                .filter(|h| h.order() == w.order() / n)
                .cloned()
                .collect();
            assert_same_classes(&w, &ours, &expected);
        }
        assert!(subgroups_of_index(&w, 5).is_err());
        assert!(subgroups_of_index(&w, 1 << 13).is_err());
    }

    #[test]
    fn transitive_catalog_small_degrees() {
        let counts: Vec<usize> = (1..=6)
            .map(|d| transitive_subgroup_classes(d).unwrap().len())
            .collect();
        assert_eq!(counts, vec![1, 1, 2, 5, 5, 16]);
        // Cross-check degrees ≤ 5 against the oracle lattice.
        for d in 2..=5 {
            let w = PermGroup::symmetric(d);
            let oracle: Vec<PermGroup> = oracle_subgroup_classes(&w)
                .into_iter()
                .filter(|h| h.is_transitive())
                .collect();
            let ours = transitive_subgroup_classes(d).unwrap();
            assert_same_classes(&w, &ours, &oracle);
        }
    }

    #[test]
    fn transitive_catalog_degree_seven() {
        let classes = transitive_subgroup_classes(7).unwrap();
        let mut orders: Vec<u128> = classes.iter().map(|c| c.order()).collect();
        orders.sort_unstable();
        assert_eq!(orders, vec![7, 14, 21, 42, 168, 2520, 5040]);
        assert!(classes.iter().all(|c| c.is_transitive()));
    }

    #[test]
    fn coset_degree_equals_index() {
        use super::super::cosets::CosetAction;
        let w = PermGroup::symmetric(5);
        for u in subgroups_of_index(&w, 6).unwrap() {
            let action = CosetAction::new(&w, &u).unwrap();
            assert_eq!(action.index(), 6);
        }
    }
}
