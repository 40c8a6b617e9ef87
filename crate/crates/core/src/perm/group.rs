//! Finitely generated permutation groups with a deterministic stabilizer
//! chain for exact order and membership.

use super::perm::Perm;
use crate::Error;
use num_bigint::BigUint;
use once_cell::sync::OnceCell;
use std::fmt;

/// A permutation group on `{0, …, degree-1}`, given by generators.
///
/// Order, membership and orbit data are computed lazily through a
/// deterministically constructed stabilizer chain (no randomization), so all
/// derived outputs are reproducible run to run.
#[derive(Clone)]
pub struct PermGroup {
    degree: usize,
    gens: Vec<Perm>,
    chain: OnceCell<StabChain>,
}

impl PermGroup {
    /// Builds a group from generators, normalizing the generator list
    /// (identity removed, duplicates removed, sorted by image array).
    pub fn new(degree: usize, gens: Vec<Perm>) -> crate::Result<Self> {
        for g in &gens {
            if g.degree() != degree {
                return Err(Error::invalid("generator degree mismatch"));
            }
        }
        let mut gens: Vec<Perm> = gens.into_iter().filter(|g| !g.is_identity()).collect();
        gens.sort();
        gens.dedup();
        Ok(PermGroup {
            degree,
            gens,
            chain: OnceCell::new(),
        })
    }

    /// The trivial group on `degree` points.
    pub fn trivial(degree: usize) -> Self {
        PermGroup::new(degree, vec![]).unwrap()
    }

    /// The full symmetric group `S_degree` in its natural action.
    pub fn symmetric(degree: usize) -> Self {
        let mut gens = Vec::new();
        if degree >= 2 {
            gens.push(Perm::from_cycles(degree, &[vec![0, 1]]).unwrap());
        }
        if degree >= 3 {
            gens.push(Perm::from_cycles(degree, &[(0..degree as u16).collect()]).unwrap());
        }
        PermGroup::new(degree, gens).unwrap()
    }

    /// The alternating group `A_degree` in its natural action.
    pub fn alternating(degree: usize) -> Self {
        let mut gens = Vec::new();
        if degree >= 3 {
            gens.push(Perm::from_cycles(degree, &[vec![0, 1, 2]]).unwrap());
        }
        if degree >= 4 {
            let long: Vec<u16> = if degree % 2 == 1 {
                (0..degree as u16).collect()
            } else {
                (1..degree as u16).collect()
            };
            gens.push(Perm::from_cycles(degree, &[long]).unwrap());
        }
        PermGroup::new(degree, gens).unwrap()
    }

    /// The cyclic group generated by the full cycle `(1 2 … degree)`.
    pub fn cyclic(degree: usize) -> Self {
        if degree <= 1 {
            return PermGroup::trivial(degree);
        }
        let c = Perm::from_cycles(degree, &[(0..degree as u16).collect()]).unwrap();
        PermGroup::new(degree, vec![c]).unwrap()
    }

    /// Number of points acted on.
    pub fn degree(&self) -> usize {
        self.degree
    }

    /// The normalized generator list.
    pub fn gens(&self) -> &[Perm] {
        &self.gens
    }

    /// The stabilizer chain (built on first use).
    pub fn chain(&self) -> &StabChain {
        self.chain
            .get_or_init(|| StabChain::build(self.degree, &self.gens, &[]))
    }

    /// Exact group order.
    pub fn order(&self) -> u128 {
        self.chain().order
    }

    /// Exact group order as an arbitrary-precision integer.
    pub fn order_big(&self) -> BigUint {
        BigUint::from(self.order())
    }

    /// Exact membership test.
    pub fn contains(&self, g: &Perm) -> bool {
        if g.degree() != self.degree {
            return false;
        }
        self.chain().sift(g).is_identity()
    }

    /// True iff every generator of `other` lies in `self`.
    pub fn contains_group(&self, other: &PermGroup) -> bool {
        other.gens.iter().all(|g| self.contains(g))
    }

    /// True iff the two groups are equal as sets of permutations.
    pub fn equals_group(&self, other: &PermGroup) -> bool {
        self.degree == other.degree
            && self.order() == other.order()
            && self.contains_group(other)
    }

    /// Enumerates all elements; intended for small groups (the caller is
    /// responsible for checking `order()` against its cap first).
    pub fn elements(&self) -> Vec<Perm> {
        let chain = self.chain();
        let mut out = vec![Perm::identity(self.degree)];
        // Multiply a full transversal at each level into the partial products.
        for level in chain.levels.iter().rev() {
            let mut next = Vec::with_capacity(out.len() * level.orbit.len());
            for &pt in &level.orbit {
                let rep = level.rep(pt);
                for tail in &out {
                    next.push(rep.compose(tail));
                }
            }
            out = next;
        }
        out
    }

    /// The pointwise stabilizer of `point`, as a group.
    pub fn point_stabilizer(&self, point: u16) -> PermGroup {
        let chain = StabChain::build(self.degree, &self.gens, &[point]);
        let mut gens = Vec::new();
        for level in chain.levels.iter().skip(1) {
            gens.extend(level.gens.iter().cloned());
        }
        PermGroup::new(self.degree, gens).unwrap()
    }

    /// Builds a chain whose base starts with the given points.
    pub fn chain_with_base(&self, base_prefix: &[u16]) -> StabChain {
        StabChain::build(self.degree, &self.gens, base_prefix)
    }

    /// The orbits of the group, each sorted, ordered by minimal element.
    pub fn orbits(&self) -> Vec<Vec<u16>> {
        let mut seen = vec![false; self.degree];
        let mut out = Vec::new();
        for start in 0..self.degree as u16 {
            if seen[start as usize] {
                continue;
            }
            let mut orbit = vec![start];
            seen[start as usize] = true;
            let mut k = 0;
            while k < orbit.len() {
                let x = orbit[k];
                for g in &self.gens {
                    let y = g.apply(x);
                    if !seen[y as usize] {
                        seen[y as usize] = true;
                        orbit.push(y);
                    }
                }
                k += 1;
            }
            orbit.sort_unstable();
            out.push(orbit);
        }
        out
    }

    /// True iff the group is transitive on all `degree` points.
    pub fn is_transitive(&self) -> bool {
        self.degree <= 1 || self.orbits().len() == 1
    }

    /// Relabels all points by `s`: returns `s G s⁻¹`.
    pub fn conjugate_by(&self, s: &Perm) -> PermGroup {
        PermGroup::new(self.degree, self.gens.iter().map(|g| g.relabel(s)).collect()).unwrap()
    }

    /// Restriction of the group to a sorted list of points it stabilizes
    /// setwise (e.g. an orbit): the constituent on those points.
    pub fn restrict_to(&self, points: &[u16]) -> PermGroup {
        let mut pos = vec![u16::MAX; self.degree];
        for (i, &p) in points.iter().enumerate() {
            pos[p as usize] = i as u16;
        }
        let gens = self
            .gens
            .iter()
            .map(|g| {
                let images: Vec<u16> = points.iter().map(|&p| pos[g.apply(p) as usize]).collect();
                Perm::from_images(images).expect("orbit restriction must be a bijection")
            })
            .collect();
        PermGroup::new(points.len(), gens).unwrap()
    }

    /// Sorted image arrays of all elements packed as u64 keys (degree ≤ 16);
    /// usable as an exact identity for caching.
    pub fn element_key(&self) -> Vec<u64> {
        assert!(self.degree <= 16, "element_key requires degree <= 16");
        let mut keys: Vec<u64> = self.elements().iter().map(|g| g.pack()).collect();
        keys.sort_unstable();
        keys
    }

    /// A cheap conjugacy-invariant fingerprint: (order, sorted orbit sizes,
    /// element-order histogram).
    pub fn fingerprint(&self) -> (u128, Vec<usize>, Vec<(u64, usize)>) {
        let mut orbit_sizes: Vec<usize> = self.orbits().iter().map(|o| o.len()).collect();
        orbit_sizes.sort_unstable();
        let mut hist = std::collections::BTreeMap::new();
        for g in self.elements() {
            *hist.entry(g.order()).or_insert(0usize) += 1;
        }
        (self.order(), orbit_sizes, hist.into_iter().collect())
    }

    /// Serializes as `degree: gen | gen | …`, e.g. `4: (1 2 3 4) | (1 3)`.
    pub fn to_text(&self) -> String {
        if self.gens.is_empty() {
            return format!("{}: ()", self.degree);
        }
        let gens: Vec<String> = self.gens.iter().map(|g| g.to_string()).collect();
        format!("{}: {}", self.degree, gens.join(" | "))
    }

    /// Parses the [`PermGroup::to_text`] format.
    pub fn parse_text(text: &str) -> crate::Result<PermGroup> {
        let (deg, rest) = text
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("missing `degree:` prefix in `{text}`")))?;
        let degree: usize = deg
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad degree `{deg}`")))?;
        let mut gens = Vec::new();
        for part in rest.split('|') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            gens.push(Perm::parse_cycles(degree, part)?);
        }
        PermGroup::new(degree, gens)
    }
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PermGroup[{}]", self.to_text())
    }
}

impl fmt::Display for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_text())
    }
}

/// A stabilizer chain: a sequence of levels, each fixing the previous base
/// points and recording the orbit and transversal of its own base point.
#[derive(Clone)]
pub struct StabChain {
    degree: usize,
    levels: Vec<Level>,
    order: u128,
}

#[derive(Clone)]
struct Level {
    base: u16,
    gens: Vec<Perm>,
    /// Orbit of `base` under this level's generators, in BFS discovery order.
    orbit: Vec<u16>,
    /// For each point in the orbit: the transversal element mapping base ↦ point.
    transversal: Vec<Option<Perm>>,
}

impl Level {
    fn new(degree: usize, base: u16) -> Self {
        let mut transversal = vec![None; degree];
        transversal[base as usize] = Some(Perm::identity(degree));
        Level {
            base,
            gens: Vec::new(),
            orbit: vec![base],
            transversal,
        }
    }

    /// Transversal representative `u` with `u(base) = pt`.
    fn rep(&self, pt: u16) -> Perm {
        self.transversal[pt as usize]
            .clone()
            .expect("point not in orbit")
    }

    /// Recomputes the orbit/transversal BFS from scratch under the given
    /// generators (deterministic: queue order, generators in list order).
    fn recompute(&mut self, degree: usize, gens: &[Perm]) {
        self.orbit = vec![self.base];
        self.transversal = vec![None; degree];
        self.transversal[self.base as usize] = Some(Perm::identity(degree));
        let mut k = 0;
        while k < self.orbit.len() {
            let x = self.orbit[k];
            for g in gens {
                let y = g.apply(x);
                if self.transversal[y as usize].is_none() {
                    let rep = g.compose(self.transversal[x as usize].as_ref().unwrap());
                    self.transversal[y as usize] = Some(rep);
                    self.orbit.push(y);
                }
            }
            k += 1;
        }
    }
}

impl StabChain {
    /// Deterministic Schreier–Sims. `base_prefix` forces the initial base
    /// points (used to read off pointwise stabilizers).
    ///
    /// Level `i` owns the strong generators that fix the first `i` base
    /// points but move `base_i`; the generating set for the stabilizer at
    /// level `i` is the union of the generators owned by levels `i` and
    /// deeper. Completion follows the classical recursion: verify every
    /// Schreier generator of a level sifts through the deeper levels, and
    /// when one escapes, adopt the residue at its escape level and
    /// re-complete from there downward.
    fn build(degree: usize, gens: &[Perm], base_prefix: &[u16]) -> StabChain {
        let mut chain = StabChain {
            degree,
            levels: base_prefix
                .iter()
                .map(|&b| Level::new(degree, b))
                .collect(),
            order: 1,
        };
        for g in gens {
            chain.place(g.clone());
        }
        let mut i = chain.levels.len();
        while i > 0 {
            i -= 1;
            chain.complete_level(i);
        }
        chain.order = chain
            .levels
            .iter()
            .map(|l| l.orbit.len() as u128)
            .product();
        chain
    }

    /// Assigns a non-identity permutation to the first level whose base it
    /// moves, appending a level (based at its smallest moved point) if it
    /// fixes the whole current base.
    fn place(&mut self, g: Perm) {
        if g.is_identity() {
            return;
        }
        for i in 0..self.levels.len() {
            if g.apply(self.levels[i].base) != self.levels[i].base {
                self.levels[i].gens.push(g);
                return;
            }
        }
        let base = (0..self.degree as u16)
            .find(|&p| g.apply(p) != p)
            .expect("non-identity moves a point");
        let mut level = Level::new(self.degree, base);
        level.gens.push(g);
        self.levels.push(level);
    }

    /// Generators of the stabilizer group at level `i`: all strong
    /// generators owned by levels `i` and deeper.
    fn gens_from(&self, i: usize) -> Vec<Perm> {
        self.levels[i..]
            .iter()
            .flat_map(|l| l.gens.iter().cloned())
            .collect()
    }

    /// Sifts `g` through levels `i..`; returns the residue and the level at
    /// which it escaped (`levels.len()` if it passed them all).
    fn sift_from(&self, i: usize, g: Perm) -> (Perm, usize) {
        let mut cur = g;
        for (j, level) in self.levels.iter().enumerate().skip(i) {
            let img = cur.apply(level.base);
            match &level.transversal[img as usize] {
                Some(rep) => cur = rep.inverse().compose(&cur),
                None => return (cur, j),
            }
        }
        (cur, self.levels.len())
    }

    /// Completes level `i`, assuming all deeper levels are complete: rebuilds
    /// its orbit and checks that every Schreier generator sifts to the
    /// identity through the deeper levels, adopting residues as new strong
    /// generators where it does not.
    fn complete_level(&mut self, i: usize) {
        let gens = self.gens_from(i);
        let degree = self.degree;
        let mut level = std::mem::replace(&mut self.levels[i], Level::new(degree, 0));
        level.recompute(degree, &gens);
        self.levels[i] = level;
        let orbit = self.levels[i].orbit.clone();
        for x in orbit {
            let rep_x = self.levels[i].rep(x);
            for g in &gens {
                let y = g.apply(x);
                let rep_y = self.levels[i].rep(y);
                let schreier = rep_y.inverse().compose(&g.compose(&rep_x));
                let (residue, j) = self.sift_from(i + 1, schreier);
                if residue.is_identity() {
                    continue;
                }
                if j == self.levels.len() {
                    let base = (0..degree as u16)
                        .find(|&p| residue.apply(p) != p)
                        .expect("non-identity moves a point");
                    self.levels.push(Level::new(degree, base));
                }
                self.levels[j].gens.push(residue);
                // Levels i+1..=j gained a member outside their previous
                // approximation; re-complete them deepest-first.
                let mut l = j + 1;
                while l > i + 1 {
                    l -= 1;
                    self.complete_level(l);
                }
            }
        }
    }

    /// Sifts `g` through the chain; returns the residue (identity iff `g`
    /// is a member).
    pub fn sift(&self, g: &Perm) -> Perm {
        let mut cur = g.clone();
        for level in &self.levels {
            let img = cur.apply(level.base);
            match &level.transversal[img as usize] {
                Some(rep) => cur = rep.inverse().compose(&cur),
                None => return cur,
            }
        }
        cur
    }

    /// Base points, in chain order.
    pub fn base(&self) -> Vec<u16> {
        self.levels.iter().map(|l| l.base).collect()
    }

    /// The canonical representative of the left coset `g·U` (where `U` is the
    /// group this chain describes): the unique element of `g·U` whose images
    /// of the base points are lexicographically minimal in base order.
    ///
    /// Two permutations get the same output iff they lie in the same left
    /// coset, which makes this the labeling function for coset actions.
    pub fn min_coset_rep(&self, g: &Perm) -> Perm {
        let mut cur = g.clone();
        for level in &self.levels {
            // Among coset elements, the image of this base point ranges over
            // cur(orbit); pick the transversal branch minimizing it.
            let best = level
                .orbit
                .iter()
                .copied()
                .min_by_key(|&x| cur.apply(x))
                .expect("orbit nonempty");
            if best != level.base {
                cur = cur.compose(&level.rep(best));
            }
        }
        cur
    }

    /// The group order determined by the chain.
    pub fn order(&self) -> u128 {
        self.order
    }
}
