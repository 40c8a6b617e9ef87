//! Subgroup choice: tranches of candidate subgroups `U ≤ W` for the
//! resolvent method.
//!
//! A *tranche* is a batch of subgroups realized together; the chooser hands
//! out useful members of the current tranche and drops a tranche wholesale
//! once nothing useful remains in it.  Three tranche modes exist:
//!
//! * `All` — a single tranche of every subgroup class of `W`.
//! * `Index` — one tranche per divisor `n` of `|W|`, containing the
//!   subgroups of index `n`, ascending.
//! * `OrbitIndex` — one tranche per pair `(n, r)` with `r | n | |W|`,
//!   containing the subgroups of index `n` whose *remaining orbit index*
//!   `(U′ : U)` is `r`, where `U′ = Stab_W(Orbits(U))`.  An optional filter
//!   keeps only `r` with small `p`-valuation (default `val_p(r) ≤ 1`).
//!
//! Orbit-index tranches are realized through *subgroup partitions*: the
//! partitions `𝒳` of the points arising as `Orbits(U)` for some `U ≤ W`.
//! These are enumerated by structure — symmetric groups by block-size
//! multisets, direct products by splitting the index over the factors,
//! wreath products by combining an outer partition with per-block inner
//! partitions — falling back to the full subgroup lattice for explicit
//! groups.

use std::collections::HashMap;

use crate::deduce::{Chooser, Deduction};
use crate::error::Error;
use crate::perm::{
    all_subgroup_classes, direct_product, fold_wreath, is_conjugate, partition_stabilizer,
    subgroups_of_index, PermGroup, PointPartition,
};
use crate::Result;

/// The structure of `W`, used to enumerate subgroup partitions without
/// touching the full subgroup lattice.
#[derive(Clone, Debug)]
pub enum GroupShape {
    /// The full symmetric group on `d` points.
    Symmetric(usize),
    /// A group with no usable structure.
    Explicit(PermGroup),
    /// A direct product of shapes on consecutive point ranges.
    Direct(Vec<GroupShape>),
    /// An iterated wreath product, innermost factor first.
    Wreath(Vec<GroupShape>),
}

impl GroupShape {
    /// The permutation group this shape describes.
    pub fn group(&self) -> PermGroup {
        match self {
            GroupShape::Symmetric(d) => PermGroup::symmetric(*d),
            GroupShape::Explicit(g) => g.clone(),
            GroupShape::Direct(shapes) => {
                direct_product(&shapes.iter().map(GroupShape::group).collect::<Vec<_>>())
            }
            GroupShape::Wreath(shapes) => {
                fold_wreath(&shapes.iter().map(GroupShape::group).collect::<Vec<_>>())
            }
        }
    }

    /// The number of points the shape acts on.
    pub fn degree(&self) -> usize {
        match self {
            GroupShape::Symmetric(d) => *d,
            GroupShape::Explicit(g) => g.degree(),
            GroupShape::Direct(shapes) => shapes.iter().map(GroupShape::degree).sum(),
            GroupShape::Wreath(shapes) => shapes.iter().map(GroupShape::degree).product(),
        }
    }
}

/// A partition of the points arising as the orbit partition of some
/// `U ≤ W`, with its index `(W : Stab_W(𝒳))` cached.
#[derive(Clone, Debug)]
pub struct SubgroupPartition {
    pub partition: PointPartition,
    pub index: u128,
}

/// All subgroup partitions for the shaped group of index exactly `m`, up
/// to conjugacy.
pub fn subgroup_partitions(shape: &GroupShape, m: u128) -> Result<Vec<SubgroupPartition>> {
    let w = shape.group();
    let raw = partitions_raw(shape, m)?;
    let mut out: Vec<SubgroupPartition> = Vec::new();
    'next: for part in raw {
        let stab = partition_stabilizer(&w, &part)?;
        let index = w.order() / stab.order();
        debug_assert_eq!(index, m, "partition index disagrees with the constructing lemma");
        for seen in &out {
            let seen_stab = partition_stabilizer(&w, &seen.partition)?;
            if seen_stab.order() == stab.order() && is_conjugate(&w, &stab, &seen_stab)?.is_some()
            {
                continue 'next;
            }
        }
        out.push(SubgroupPartition { partition: part, index });
    }
    Ok(out)
}

/// Structure-directed enumeration, possibly with conjugate duplicates.
fn partitions_raw(shape: &GroupShape, m: u128) -> Result<Vec<PointPartition>> {
    match shape {
        GroupShape::Symmetric(d) => symmetric_partitions(*d, m),
        GroupShape::Explicit(g) => explicit_partitions(g, m),
        GroupShape::Direct(shapes) => direct_partitions(shapes, m),
        GroupShape::Wreath(shapes) => wreath_partitions(shapes, m),
    }
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).product()
}

/// Partitions for `S_d`: any block-size multiset works, with index
/// `d! / Π |X|!`; one representative per multiset (consecutive blocks).
fn symmetric_partitions(d: usize, m: u128) -> Result<Vec<PointPartition>> {
    let mut out = Vec::new();
    let mut sizes: Vec<usize> = Vec::new();
    fn rec(
        d: usize,
        remaining: usize,
        max: usize,
        m: u128,
        sizes: &mut Vec<usize>,
        out: &mut Vec<PointPartition>,
    ) -> Result<()> {
        if remaining == 0 {
            let denom: u128 = sizes.iter().map(|&s| factorial(s)).product();
            if factorial(d) / denom == m {
                let mut blocks = Vec::new();
                let mut next = 0u16;
                for &s in sizes.iter() {
                    blocks.push((next..next + s as u16).collect());
                    next += s as u16;
                }
                out.push(PointPartition::new(d, blocks)?);
            }
            return Ok(());
        }
        for s in (1..=max.min(remaining)).rev() {
            sizes.push(s);
            rec(d, remaining - s, s, m, sizes, out)?;
            sizes.pop();
        }
        Ok(())
    }
    rec(d, d, d, m, &mut sizes, &mut out)?;
    Ok(out)
}

/// Partitions for an explicit group: the orbit partitions of its subgroup
/// classes.
fn explicit_partitions(g: &PermGroup, m: u128) -> Result<Vec<PointPartition>> {
    let mut out: Vec<PointPartition> = Vec::new();
    for u in all_subgroup_classes(g)? {
        let part = PointPartition::from_orbits(&u);
        let stab = partition_stabilizer(g, &part)?;
        if g.order() / stab.order() != m {
            continue;
        }
        if out.iter().any(|p| p.blocks() == part.blocks()) {
            continue;
        }
        out.push(part);
    }
    Ok(out)
}

/// Partitions for `W_1 × … × W_k`: unions of per-factor partitions whose
/// indices multiply to `m`.
fn direct_partitions(shapes: &[GroupShape], m: u128) -> Result<Vec<PointPartition>> {
    if shapes.is_empty() {
        return Ok(if m == 1 {
            vec![PointPartition::new(0, Vec::new())?]
        } else {
            Vec::new()
        });
    }
    let first = &shapes[0];
    let d1 = first.degree();
    let total_degree: usize = shapes.iter().map(GroupShape::degree).sum();
    let mut out = Vec::new();
    for m1 in divisors(gcd(m, first.group().order())) {
        if m % m1 != 0 {
            continue;
        }
        let s1 = partitions_raw(first, m1)?;
        if s1.is_empty() {
            continue;
        }
        for x2 in direct_partitions(&shapes[1..], m / m1)? {
            for x1 in &s1 {
                let mut blocks: Vec<Vec<u16>> = x1.blocks().to_vec();
                for b in x2.blocks() {
                    blocks.push(b.iter().map(|&x| x + d1 as u16).collect());
                }
                out.push(PointPartition::new(total_degree, blocks)?);
            }
        }
    }
    Ok(out)
}

/// Partitions for `A ≀ B` (`shapes` innermost-first, `B` the last factor):
/// an outer partition `𝒳` for `B` of index `m′`, and for each block
/// `X ∈ 𝒳` an inner partition `𝒴_X` for `A` of index `m_X` with
/// `m′ · Π m_X^{|X|} = m`; the blocks are `X × Y`.
fn wreath_partitions(shapes: &[GroupShape], m: u128) -> Result<Vec<PointPartition>> {
    if shapes.len() == 1 {
        return partitions_raw(&shapes[0], m);
    }
    let b = shapes.last().unwrap();
    let a = GroupShape::Wreath(shapes[..shapes.len() - 1].to_vec());
    let da = a.degree();
    let degree = da * b.degree();
    let mut out = Vec::new();
    for mp in divisors(m) {
        let mm = m / mp;
        for x in partitions_raw(b, mp)? {
            let blocks = x.blocks();
            for assignment in index_assignments(blocks, mm) {
                let mut per_block: Vec<Vec<PointPartition>> = Vec::with_capacity(blocks.len());
                for &mx in &assignment {
                    per_block.push(partitions_raw(&a, mx)?);
                }
                if per_block.iter().any(Vec::is_empty) {
                    continue;
                }
                build_products(blocks, &per_block, da, degree, &mut out)?;
            }
        }
    }
    Ok(out)
}

/// All assignments of an index `m_X` to each outer block with
/// `Π m_X^{|X|} = mm`.
fn index_assignments(blocks: &[Vec<u16>], mm: u128) -> Vec<Vec<u128>> {
    fn rec(blocks: &[Vec<u16>], mm: u128, cur: &mut Vec<u128>, out: &mut Vec<Vec<u128>>) {
        if blocks.is_empty() {
            if mm == 1 {
                out.push(cur.clone());
            }
            return;
        }
        let size = blocks[0].len() as u32;
        for mx in divisors(mm) {
            match mx.checked_pow(size) {
                Some(pw) if mm % pw == 0 => {
                    cur.push(mx);
                    rec(&blocks[1..], mm / pw, cur, out);
                    cur.pop();
                }
                _ => {}
            }
        }
    }
    let mut out = Vec::new();
    rec(blocks, mm, &mut Vec::new(), &mut out);
    out
}

/// Cartesian product of per-block inner partitions into full partitions of
/// the wreath points (outer point `x` occupies `[x·da, (x+1)·da)`).
fn build_products(
    blocks: &[Vec<u16>],
    per_block: &[Vec<PointPartition>],
    da: usize,
    degree: usize,
    out: &mut Vec<PointPartition>,
) -> Result<()> {
    fn rec(
        blocks: &[Vec<u16>],
        per_block: &[Vec<PointPartition>],
        pos: usize,
        da: usize,
        degree: usize,
        acc: &mut Vec<Vec<u16>>,
        out: &mut Vec<PointPartition>,
    ) -> Result<()> {
        if pos == blocks.len() {
            out.push(PointPartition::new(degree, acc.clone())?);
            return Ok(());
        }
        for y in &per_block[pos] {
            let before = acc.len();
            for yb in y.blocks() {
                let mut block = Vec::with_capacity(blocks[pos].len() * yb.len());
                for &x in &blocks[pos] {
                    for &yy in yb {
                        block.push(x * da as u16 + yy);
                    }
                }
                acc.push(block);
            }
            rec(blocks, per_block, pos + 1, da, degree, acc, out)?;
            acc.truncate(before);
        }
        Ok(())
    }
    rec(blocks, per_block, 0, da, degree, &mut Vec::new(), out)
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Divisors of `n`, ascending.
pub fn divisors(n: u128) -> Vec<u128> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u128;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    large.reverse();
    small.extend(large);
    small
}

fn val_p(mut r: u128, p: u64) -> u32 {
    let p = p as u128;
    let mut v = 0;
    while r % p == 0 {
        r /= p;
        v += 1;
    }
    v
}

/// How tranches are generated.
#[derive(Clone, Debug)]
pub enum TrancheMode {
    /// One tranche with every subgroup class.
    All,
    /// One tranche per index `n | |W|`, ascending.
    Index,
    /// One tranche per `(n, r)`, `r | n | |W|`, ascending `n` then `r`,
    /// keeping only `r` with `val_p(r) ≤ max_val` when a filter is set.
    OrbitIndex { p: u64, max_val: Option<u32> },
}

/// One tranche descriptor.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TrancheDescriptor {
    All,
    Index(u128),
    OrbitIndex { n: u128, r: u128 },
}

/// Lazy tranche generator for a shaped overgroup.
pub struct Tranches {
    w: PermGroup,
    shape: GroupShape,
    descriptors: Vec<TrancheDescriptor>,
    pos: usize,
    partition_cache: HashMap<u128, Vec<SubgroupPartition>>,
}

impl Tranches {
    pub fn new(shape: GroupShape, mode: &TrancheMode) -> Tranches {
        let w = shape.group();
        let descriptors = match mode {
            TrancheMode::All => vec![TrancheDescriptor::All],
            TrancheMode::Index => divisors(w.order())
                .into_iter()
                .map(TrancheDescriptor::Index)
                .collect(),
            TrancheMode::OrbitIndex { p, max_val } => {
                let mut list = Vec::new();
                for n in divisors(w.order()) {
                    for r in divisors(n) {
                        if max_val.map(|cap| val_p(r, *p) <= cap).unwrap_or(true) {
                            list.push(TrancheDescriptor::OrbitIndex { n, r });
                        }
                    }
                }
                list
            }
        };
        Tranches {
            w,
            shape,
            descriptors,
            pos: 0,
            partition_cache: HashMap::new(),
        }
    }

    /// The descriptors, in generation order.
    pub fn descriptors(&self) -> &[TrancheDescriptor] {
        &self.descriptors
    }

    /// Realizes the next tranche, or `None` when exhausted.  A realization
    /// failure from a lattice cap skips the tranche.
    pub fn next_tranche(&mut self) -> Result<Option<(TrancheDescriptor, Vec<PermGroup>)>> {
        while self.pos < self.descriptors.len() {
            let desc = self.descriptors[self.pos].clone();
            self.pos += 1;
            let groups = match &desc {
                TrancheDescriptor::All => all_subgroup_classes(&self.w)?,
                TrancheDescriptor::Index(n) => subgroups_of_index(&self.w, *n)?,
                TrancheDescriptor::OrbitIndex { n, r } => {
                    self.realize_orbit_index(*n, *r)?
                }
            };
            if !groups.is_empty() {
                return Ok(Some((desc, groups)));
            }
        }
        Ok(None)
    }

    /// Subgroups of index `n` and remaining orbit index `r`: index-`r`
    /// subgroups of the stabilizers of the subgroup partitions of index
    /// `n/r`, post-filtered by re-deriving each candidate's orbit index.
    fn realize_orbit_index(&mut self, n: u128, r: u128) -> Result<Vec<PermGroup>> {
        if n % r != 0 {
            return Ok(Vec::new());
        }
        let m = n / r;
        if !self.partition_cache.contains_key(&m) {
            let parts = subgroup_partitions(&self.shape, m)?;
            self.partition_cache.insert(m, parts);
        }
        let parts = self.partition_cache[&m].clone();
        let mut out: Vec<PermGroup> = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for sp in &parts {
            let stab = partition_stabilizer(&self.w, &sp.partition)?;
            for u in subgroups_of_index(&stab, r)? {
                let orbit_part = PointPartition::from_orbits(&u);
                let ustab = partition_stabilizer(&self.w, &orbit_part)?;
                if self.w.order() / ustab.order() != m {
                    continue;
                }
                if seen.insert(u.element_key()) {
                    out.push(u);
                }
            }
        }
        Ok(out)
    }
}

/// A [`Chooser`] over tranches: hands out useful members of the current
/// tranche and drops a tranche once nothing useful remains in it.
pub struct TrancheChooser {
    tranches: Tranches,
    current: Vec<PermGroup>,
}

impl TrancheChooser {
    pub fn new(shape: GroupShape, mode: &TrancheMode) -> TrancheChooser {
        TrancheChooser {
            tranches: Tranches::new(shape, mode),
            current: Vec::new(),
        }
    }
}

impl Chooser for TrancheChooser {
    fn next_u(&mut self, ded: &Deduction) -> Result<Option<PermGroup>> {
        loop {
            let mut found = None;
            for (i, u) in self.current.iter().enumerate() {
                if ded.useful(u)? {
                    found = Some(i);
                    break;
                }
            }
            if let Some(i) = found {
                return Ok(Some(self.current.remove(i)));
            }
            // Nothing useful left: the tranche is useless, move on.
            match self.tranches.next_tranche() {
                Ok(Some((_, groups))) => self.current = groups,
                Ok(None) => return Ok(None),
                Err(Error::CapExceeded(_)) => continue,
                Err(e) => return Err(e),
            }
        }
    }
}
