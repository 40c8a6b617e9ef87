//! Point partitions, stabilizers, block systems, normalizers, double cosets,
//! and subgroup conjugacy.

use super::group::PermGroup;
use super::perm::Perm;
use crate::Error;
use std::collections::HashMap;

/// Cap on the number of group elements we are willing to enumerate for
/// element-iteration algorithms (normalizers, double cosets, conjugacy).
pub const ELEMENT_ITER_CAP: u128 = 1 << 17;

/// Cap on the orbit size of a coloring during stabilizer computations.
const COLORING_ORBIT_CAP: usize = 1 << 20;

/// A partition of `{0, …, d-1}` into disjoint nonempty blocks.
///
/// Blocks are kept sorted internally and ordered by minimal element, so a
/// partition has a unique representation.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct PointPartition {
    blocks: Vec<Vec<u16>>,
}

impl PointPartition {
    /// Builds a partition, normalizing block order; checks disjoint cover of
    /// `{0, …, degree-1}`.
    pub fn new(degree: usize, blocks: Vec<Vec<u16>>) -> crate::Result<Self> {
        let mut seen = vec![false; degree];
        let mut blocks: Vec<Vec<u16>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        for b in &blocks {
            if b.is_empty() {
                return Err(Error::invalid("empty block in partition"));
            }
            for &x in b {
                if (x as usize) >= degree || seen[x as usize] {
                    return Err(Error::invalid("partition blocks are not disjoint over the domain"));
                }
                seen[x as usize] = true;
            }
        }
        if !seen.iter().all(|&s| s) {
            return Err(Error::invalid("partition does not cover the domain"));
        }
        blocks.sort();
        Ok(PointPartition { blocks })
    }

    /// The orbit partition of a group.
    pub fn from_orbits(g: &PermGroup) -> Self {
        PointPartition::new(g.degree(), g.orbits()).unwrap()
    }

    /// The partition into singletons.
    pub fn singletons(degree: usize) -> Self {
        PointPartition::new(degree, (0..degree as u16).map(|i| vec![i]).collect()).unwrap()
    }

    /// The blocks.
    pub fn blocks(&self) -> &[Vec<u16>] {
        &self.blocks
    }

    /// Sum of block sizes = degree of the underlying domain.
    pub fn degree(&self) -> usize {
        self.blocks.iter().map(|b| b.len()).sum()
    }

    /// Block sizes as a descending multiset.
    pub fn block_sizes(&self) -> Vec<usize> {
        let mut sizes: Vec<usize> = self.blocks.iter().map(|b| b.len()).collect();
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }

    /// The coloring vector: for each point, the index of its block.
    pub fn coloring(&self) -> Vec<u16> {
        let mut color = vec![0u16; self.degree()];
        for (i, b) in self.blocks.iter().enumerate() {
            for &x in b {
                color[x as usize] = i as u16;
            }
        }
        color
    }

    /// Image of the partition under a permutation.
    pub fn apply(&self, s: &Perm) -> PointPartition {
        PointPartition::new(
            self.degree(),
            self.blocks
                .iter()
                .map(|b| b.iter().map(|&x| s.apply(x)).collect())
                .collect(),
        )
        .unwrap()
    }
}

/// Applies `g` to a coloring: the new color of `g(i)` is the old color of `i`.
fn apply_to_coloring(g: &Perm, color: &[u16]) -> Vec<u16> {
    let mut out = vec![0u16; color.len()];
    for (i, &c) in color.iter().enumerate() {
        out[g.apply(i as u16) as usize] = c;
    }
    out
}

/// Relabels colors by first occurrence, so colorings equal up to renaming
/// the colors become identical.
fn canonicalize_coloring(color: &[u16]) -> Vec<u16> {
    let mut map: HashMap<u16, u16> = HashMap::new();
    let mut out = Vec::with_capacity(color.len());
    for &c in color {
        let next = map.len() as u16;
        out.push(*map.entry(c).or_insert(next));
    }
    out
}

/// Orbit–Schreier stabilizer of a coloring under `W`. With `up_to_renaming`
/// the colors are unordered (block systems); without it each color class is
/// preserved individually.
fn coloring_stabilizer(
    w: &PermGroup,
    color: &[u16],
    up_to_renaming: bool,
) -> crate::Result<PermGroup> {
    let canon = |c: &[u16]| {
        if up_to_renaming {
            canonicalize_coloring(c)
        } else {
            c.to_vec()
        }
    };
    let start = canon(color);
    let mut index: HashMap<Vec<u16>, usize> = HashMap::new();
    index.insert(start.clone(), 0);
    // parent[i] = (parent node, generator index) along the BFS tree.
    let mut parents: Vec<Option<(usize, usize)>> = vec![None];
    let mut nodes = vec![start];
    let mut k = 0;
    while k < nodes.len() {
        for (gi, g) in w.gens().iter().enumerate() {
            let next = canon(&apply_to_coloring(g, &nodes[k]));
            if !index.contains_key(&next) {
                index.insert(next.clone(), nodes.len());
                parents.push(Some((k, gi)));
                nodes.push(next);
                if nodes.len() > COLORING_ORBIT_CAP {
                    return Err(Error::cap("coloring orbit exceeds cap"));
                }
            }
        }
        k += 1;
    }
    // Transversal representative mapping the start coloring to node i.
    let rep = |mut i: usize, parents: &[Option<(usize, usize)>]| -> Perm {
        let mut word = Vec::new();
        while let Some((p, gi)) = parents[i] {
            word.push(gi);
            i = p;
        }
        let mut out = Perm::identity(w.degree());
        for &gi in word.iter().rev() {
            out = w.gens()[gi].compose(&out);
        }
        out
    };
    let mut stab_gens = Vec::new();
    for i in 0..nodes.len() {
        let r_i = rep(i, &parents);
        for g in w.gens() {
            let next = canon(&apply_to_coloring(g, &nodes[i]));
            let j = index[&next];
            let r_j = rep(j, &parents);
            let schreier = r_j.inverse().compose(&g.compose(&r_i));
            if !schreier.is_identity() {
                stab_gens.push(schreier);
            }
        }
    }
    PermGroup::new(w.degree(), stab_gens)
}

/// The subgroup of `W` mapping each block of `X` into itself setwise
/// (blocks are never permuted; this is the displayed-formula reading).
pub fn partition_stabilizer(w: &PermGroup, x: &PointPartition) -> crate::Result<PermGroup> {
    if x.degree() != w.degree() {
        return Err(Error::invalid("partition degree mismatch"));
    }
    coloring_stabilizer(w, &x.coloring(), false)
}

/// The setwise stabilizer of a subset of points.
pub fn set_stabilizer(w: &PermGroup, points: &[u16]) -> crate::Result<PermGroup> {
    let mut color = vec![0u16; w.degree()];
    for &p in points {
        if (p as usize) >= w.degree() {
            return Err(Error::invalid("set stabilizer point out of range"));
        }
        color[p as usize] = 1;
    }
    coloring_stabilizer(w, &color, false)
}

/// The stabilizer of a block system: elements of `W` permuting the blocks of
/// `X` among themselves.
pub fn system_stabilizer(w: &PermGroup, x: &PointPartition) -> crate::Result<PermGroup> {
    if x.degree() != w.degree() {
        return Err(Error::invalid("partition degree mismatch"));
    }
    coloring_stabilizer(w, &x.coloring(), true)
}

/// All partitions of `points` into blocks of exactly `block_size` elements.
pub fn uniform_partitions(points: &[u16], block_size: usize) -> Vec<Vec<Vec<u16>>> {
    let mut out = Vec::new();
    fn rec(remaining: &[u16], block_size: usize, acc: &mut Vec<Vec<u16>>, out: &mut Vec<Vec<Vec<u16>>>) {
        if remaining.is_empty() {
            out.push(acc.clone());
            return;
        }
        let first = remaining[0];
        let rest: Vec<u16> = remaining[1..].to_vec();
        // Choose the (block_size - 1) companions of the first remaining point.
        let mut idx: Vec<usize> = (0..block_size - 1).collect();
        if block_size - 1 > rest.len() {
            return;
        }
        loop {
            let mut block = vec![first];
            block.extend(idx.iter().map(|&i| rest[i]));
            let next: Vec<u16> = rest
                .iter()
                .enumerate()
                .filter(|(i, _)| !idx.contains(i))
                .map(|(_, &p)| p)
                .collect();
            acc.push(block);
            rec(&next, block_size, acc, out);
            acc.pop();
            // Advance the combination.
            let mut i = block_size - 1;
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                if idx[i] != i + rest.len() - (block_size - 1) {
                    idx[i] += 1;
                    for j in i + 1..block_size - 1 {
                        idx[j] = idx[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }
    if block_size == 0 || points.len() % block_size != 0 {
        return out;
    }
    if block_size == points.len() {
        return vec![vec![points.to_vec()]];
    }
    let mut acc = Vec::new();
    rec(points, block_size, &mut acc, &mut out);
    out
}

/// The finest `G`-invariant partition in which all of `seed` lies in one
/// block (Atkinson's algorithm via union–find to a fixpoint).
fn block_closure(g: &PermGroup, seed: &[u16]) -> Vec<Vec<u16>> {
    let d = g.degree();
    let mut parent: Vec<u16> = (0..d as u16).collect();
    fn find(parent: &mut Vec<u16>, x: u16) -> u16 {
        let mut r = x;
        while parent[r as usize] != r {
            r = parent[r as usize];
        }
        let mut c = x;
        while parent[c as usize] != c {
            let next = parent[c as usize];
            parent[c as usize] = r;
            c = next;
        }
        r
    }
    let mut queue: Vec<(u16, u16)> = Vec::new();
    for w in seed.windows(2) {
        queue.push((w[0], w[1]));
    }
    while let Some((a, b)) = queue.pop() {
        let ra = find(&mut parent, a);
        let rb = find(&mut parent, b);
        if ra == rb {
            continue;
        }
        parent[rb as usize] = ra;
        for gen in g.gens() {
            queue.push((gen.apply(ra), gen.apply(rb)));
        }
        // Re-glue images of whole classes lazily: the generator images of the
        // two merged roots suffice because the queue keeps propagating merges.
        for gen in g.gens() {
            queue.push((gen.apply(a), gen.apply(b)));
        }
    }
    let mut classes: HashMap<u16, Vec<u16>> = HashMap::new();
    for x in 0..d as u16 {
        classes.entry(find(&mut parent, x)).or_default().push(x);
    }
    let mut blocks: Vec<Vec<u16>> = classes.into_values().collect();
    blocks.sort();
    blocks
}

/// A nontrivial block system of `G` with the minimal number of blocks, or
/// `None` if `G` is primitive. `G` must be transitive.
pub fn minimal_block_partition(g: &PermGroup) -> crate::Result<Option<PointPartition>> {
    if !g.is_transitive() {
        return Err(Error::invalid("minimal_block_partition requires a transitive group"));
    }
    let d = g.degree();
    if d <= 2 {
        return Ok(None);
    }
    // Try block sizes descending (fewest blocks first). A block containing
    // point 0 is the block-closure of some pair {0, x}, so closures of pairs
    // enumerate all minimal blocks; their joins give coarser ones. Rather
    // than materializing the lattice we test candidate block sizes directly
    // against closures of subsets, seeded by pair closures.
    let mut systems: Vec<Vec<Vec<u16>>> = Vec::new();
    for x in 1..d as u16 {
        let blocks = block_closure(g, &[0, x]);
        if blocks.len() > 1 && blocks.len() < d {
            systems.push(blocks);
        }
    }
    // Coarsen by joining pairs of systems until closed.
    let mut k = 0;
    while k < systems.len() {
        let pivot_block = systems[k][0].clone();
        for j in 0..k {
            let mut seed = pivot_block.clone();
            seed.extend(systems[j][0].iter().copied());
            let blocks = block_closure(g, &seed);
            if blocks.len() > 1 && blocks.len() < d && !systems.contains(&blocks) {
                systems.push(blocks);
            }
        }
        k += 1;
    }
    systems.sort_by_key(|s| (s.len(), s.clone()));
    match systems.into_iter().next() {
        Some(blocks) => Ok(Some(PointPartition::new(d, blocks)?)),
        None => Ok(None),
    }
}

/// Enumerates all elements of `d` if its order is within
/// [`ELEMENT_ITER_CAP`], sorted lexicographically (canonical order).
pub fn sorted_elements(d: &PermGroup) -> crate::Result<Vec<Perm>> {
    if d.order() > ELEMENT_ITER_CAP {
        return Err(Error::cap(format!(
            "group order {} exceeds element iteration cap",
            d.order()
        )));
    }
    let mut elems = d.elements();
    elems.sort();
    Ok(elems)
}

/// The normalizer `N_D(H)` by scanning the elements of `D`.
pub fn normalizer(d: &PermGroup, h: &PermGroup) -> crate::Result<PermGroup> {
    if !d.contains_group(h) {
        return Err(Error::invalid("normalizer: H is not a subgroup of D"));
    }
    let mut n = PermGroup::new(d.degree(), h.gens().to_vec())?;
    for g in sorted_elements(d)? {
        if n.contains(&g) {
            continue;
        }
        let normalizes = h.gens().iter().all(|x| h.contains(&x.relabel(&g)));
        if normalizes {
            let mut gens = n.gens().to_vec();
            gens.push(g);
            n = PermGroup::new(d.degree(), gens)?;
        }
    }
    Ok(n)
}

/// Representatives of the double cosets `H \ D / G`, one per coset, each the
/// lexicographically minimal element of its coset.
pub fn double_coset_reps(
    d: &PermGroup,
    h: &PermGroup,
    g: &PermGroup,
) -> crate::Result<Vec<Perm>> {
    if !d.contains_group(h) || !d.contains_group(g) {
        return Err(Error::invalid("double cosets: H, G must be subgroups of D"));
    }
    let elems = sorted_elements(d)?;
    let mut index: HashMap<&[u16], usize> = HashMap::with_capacity(elems.len());
    for (i, e) in elems.iter().enumerate() {
        index.insert(e.images(), i);
    }
    // Closure generators: left multiplication by H, right by G (inverses
    // included so the BFS closes over the full coset).
    let mut left: Vec<Perm> = h.gens().to_vec();
    left.extend(h.gens().iter().map(|x| x.inverse()));
    let mut right: Vec<Perm> = g.gens().to_vec();
    right.extend(g.gens().iter().map(|x| x.inverse()));
    let mut visited = vec![false; elems.len()];
    let mut reps = Vec::new();
    for start in 0..elems.len() {
        if visited[start] {
            continue;
        }
        reps.push(elems[start].clone());
        visited[start] = true;
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            let e = &elems[i];
            for l in &left {
                let f = l.compose(e);
                let j = index[f.images()];
                if !visited[j] {
                    visited[j] = true;
                    stack.push(j);
                }
            }
            for r in &right {
                let f = e.compose(r);
                let j = index[f.images()];
                if !visited[j] {
                    visited[j] = true;
                    stack.push(j);
                }
            }
        }
    }
    Ok(reps)
}

/// Per-point conjugacy invariants used to prune the symmetric-group
/// backtracking search: for each point, a histogram of the cycle lengths
/// through it over all group elements, and for each point pair a commutative
/// hash of joint cycle data.
struct ConjInvariants {
    point: Vec<Vec<(usize, usize)>>,
    pair: Vec<Vec<u64>>,
}

fn conj_invariants(g: &PermGroup) -> ConjInvariants {
    let d = g.degree();
    let elems = g.elements();
    let mut point_hist: Vec<HashMap<usize, usize>> = vec![HashMap::new(); d];
    let mut pair = vec![vec![0u64; d]; d];
    for e in &elems {
        // Cycle length through each point.
        let mut cyclen = vec![0usize; d];
        let mut cycid = vec![usize::MAX; d];
        let mut seen = vec![false; d];
        let mut nextid = 0;
        for i in 0..d as u16 {
            if seen[i as usize] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut j = i;
            while !seen[j as usize] {
                seen[j as usize] = true;
                cyc.push(j);
                j = e.apply(j);
            }
            for &p in &cyc {
                cyclen[p as usize] = cyc.len();
                cycid[p as usize] = nextid;
            }
            nextid += 1;
        }
        for p in 0..d {
            *point_hist[p].entry(cyclen[p]).or_insert(0) += 1;
            for q in 0..d {
                let same = (cycid[p] == cycid[q]) as u64;
                let mut key = (cyclen[p] as u64) << 32 | (cyclen[q] as u64) << 1 | same;
                // Cheap commutative-over-elements mix.
                key = key.wrapping_mul(0x9E3779B97F4A7C15).rotate_left(17);
                pair[p][q] = pair[p][q].wrapping_add(key);
            }
        }
    }
    let point = point_hist
        .into_iter()
        .map(|h| {
            let mut v: Vec<(usize, usize)> = h.into_iter().collect();
            v.sort_unstable();
            v
        })
        .collect();
    ConjInvariants { point, pair }
}

/// Searches for `s` in the full symmetric group with `G^s = H` by assigning
/// point images with invariant pruning.
fn symmetric_conjugacy_search(g: &PermGroup, h: &PermGroup) -> Option<Perm> {
    let d = g.degree();
    let ig = conj_invariants(g);
    let ih = conj_invariants(h);
    let mut img: Vec<Option<u16>> = vec![None; d];
    let mut used = vec![false; d];
    fn rec(
        p: usize,
        d: usize,
        g: &PermGroup,
        h: &PermGroup,
        ig: &ConjInvariants,
        ih: &ConjInvariants,
        img: &mut Vec<Option<u16>>,
        used: &mut Vec<bool>,
    ) -> bool {
        if p == d {
            let s = Perm::from_images(img.iter().map(|x| x.unwrap()).collect()).unwrap();
            return g.gens().iter().all(|x| h.contains(&x.relabel(&s)));
        }
        for q in 0..d as u16 {
            if used[q as usize] || ig.point[p] != ih.point[q as usize] {
                continue;
            }
            let ok = (0..p).all(|r| ig.pair[p][r] == ih.pair[q as usize][img[r].unwrap() as usize]);
            if !ok {
                continue;
            }
            img[p] = Some(q);
            used[q as usize] = true;
            if rec(p + 1, d, g, h, ig, ih, img, used) {
                return true;
            }
            img[p] = None;
            used[q as usize] = false;
        }
        false
    }
    if rec(0, d, g, h, &ig, &ih, &mut img, &mut used) {
        Some(Perm::from_images(img.into_iter().map(|x| x.unwrap()).collect()).unwrap())
    } else {
        None
    }
}

/// Decides whether `G` and `H` are conjugate inside `W`, returning a witness
/// `s ∈ W` with `G^s = H` (as point relabeling: `s G s⁻¹ = H`).
pub fn is_conjugate(w: &PermGroup, g: &PermGroup, h: &PermGroup) -> crate::Result<Option<Perm>> {
    if g.degree() != h.degree() || g.degree() != w.degree() {
        return Err(Error::invalid("is_conjugate: degree mismatch"));
    }
    if g.order() != h.order() {
        return Ok(None);
    }
    if g.equals_group(h) {
        return Ok(Some(Perm::identity(w.degree())));
    }
    let mut go: Vec<usize> = g.orbits().iter().map(|o| o.len()).collect();
    let mut ho: Vec<usize> = h.orbits().iter().map(|o| o.len()).collect();
    go.sort_unstable();
    ho.sort_unstable();
    if go != ho {
        return Ok(None);
    }
    // Natural symmetric ambient: invariant-pruned backtracking.
    let factorial: u128 = (1..=w.degree() as u128).product();
    if w.order() == factorial {
        if g.order() <= ELEMENT_ITER_CAP {
            return Ok(symmetric_conjugacy_search(g, h));
        }
    }
    // Generic ambient: scan W.
    for s in sorted_elements(w)? {
        if g.gens().iter().all(|x| h.contains(&x.relabel(&s))) {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

/// Searches for `s ∈ W` with `G^s ≤ H` (containment up to conjugacy),
/// scanning the elements of `W`.
pub fn conjugate_contained_in(
    w: &PermGroup,
    g: &PermGroup,
    h: &PermGroup,
) -> crate::Result<Option<Perm>> {
    if g.order() > h.order() || h.order() % g.order() != 0 {
        return Ok(None);
    }
    for s in sorted_elements(w)? {
        if g.gens().iter().all(|x| h.contains(&x.relabel(&s))) {
            return Ok(Some(s));
        }
    }
    Ok(None)
}
