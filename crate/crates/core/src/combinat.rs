//! Combinatorial enumerators: linear divisions of an integer from a
//! multiset, rectangle divisions, binnings of indistinguishable items into
//! indistinguishable bins under validity predicates, and the multiset
//! refinement test.

use std::collections::HashSet;

use crate::Error;

/// A multiset of positive integers, stored as a descending-sorted sequence.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IntMultiset {
    entries: Vec<u64>,
}

impl IntMultiset {
    pub fn new(mut entries: Vec<u64>) -> crate::Result<Self> {
        if entries.iter().any(|&e| e == 0) {
            return Err(Error::invalid("multiset entries must be ≥ 1"));
        }
        entries.sort_unstable_by(|a, b| b.cmp(a));
        Ok(IntMultiset { entries })
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn total(&self) -> u64 {
        self.entries.iter().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// The multiset with one copy of `value` removed.
    fn remove_one(&self, value: u64) -> IntMultiset {
        let mut entries = self.entries.clone();
        let pos = entries.iter().position(|&e| e == value).expect("member");
        entries.remove(pos);
        IntMultiset { entries }
    }
}

/// A lexicographic ceiling on descending sequences: either an explicit tail
/// (exhausted entries read as 0) or an infinite constant sequence.
#[derive(Clone, Copy)]
enum Limit<'a> {
    Seq(&'a [u64]),
    Repeat(u64),
}

impl<'a> Limit<'a> {
    fn first(&self) -> u64 {
        match self {
            Limit::Seq(s) => s.first().copied().unwrap_or(0),
            Limit::Repeat(v) => *v,
        }
    }

    /// The limit for the rest of the sequence after choosing `m1 ≤ first()`:
    /// the tail if the ceiling was met exactly, else the constant `m1`.
    fn after(&self, m1: u64) -> Limit<'a> {
        if m1 == self.first() {
            match self {
                Limit::Seq(s) => Limit::Seq(&s[1.min(s.len())..]),
                Limit::Repeat(v) => Limit::Repeat(*v),
            }
        } else {
            Limit::Repeat(m1)
        }
    }
}

fn linear_divisions_rec(n: u64, pool: &IntMultiset, limit: Limit) -> Vec<IntMultiset> {
    if n == 0 {
        return vec![IntMultiset { entries: Vec::new() }];
    }
    let mut out = Vec::new();
    let mut last = None;
    for &m1 in &pool.entries {
        if last == Some(m1) {
            continue;
        }
        last = Some(m1);
        if m1 > n.min(limit.first()) {
            continue;
        }
        let rest = pool.remove_one(m1);
        for tail in linear_divisions_rec(n - m1, &rest, limit.after(m1)) {
            let mut entries = Vec::with_capacity(1 + tail.entries.len());
            entries.push(m1);
            entries.extend(tail.entries);
            out.push(IntMultiset { entries });
        }
    }
    out
}

/// All sub-multisets of `pool` summing to `n`, each lexicographically at
/// most `limit` (default `{n}`, i.e. unrestricted), as descending sequences
/// without duplicates.
pub fn linear_divisions(
    n: u64,
    pool: &IntMultiset,
    limit: Option<&IntMultiset>,
) -> Vec<IntMultiset> {
    let lim = match limit {
        Some(l) => Limit::Seq(&l.entries),
        None => Limit::Repeat(n),
    };
    linear_divisions_rec(n, pool, lim)
}

/// One column of a rectangle division: a width and the multiset of heights
/// stacked in it.
pub type RectColumn = (u64, IntMultiset);

fn rectangle_divisions_rec(
    w: u64,
    h: u64,
    areas: &IntMultiset,
    w_limit: u64,
    h_limit: Option<&IntMultiset>,
) -> Vec<Vec<RectColumn>> {
    if w == 0 {
        return if areas.is_empty() { vec![Vec::new()] } else { Vec::new() };
    }
    let mut out = Vec::new();
    let mut widths: Vec<u64> = areas
        .entries
        .iter()
        .flat_map(|&a| (1..=a).filter(move |d| a % d == 0))
        .collect();
    widths.sort_unstable_by(|a, b| b.cmp(a));
    widths.dedup();
    for w1 in widths {
        if w1 > w.min(w_limit) {
            continue;
        }
        let quotients = IntMultiset {
            entries: areas
                .entries
                .iter()
                .filter(|&&a| a % w1 == 0)
                .map(|&a| a / w1)
                .collect(),
        };
        let lim = if w1 == w_limit { h_limit } else { None };
        for heights in linear_divisions(h, &quotients, lim) {
            let mut rest = areas.clone();
            for &hj in heights.entries() {
                rest = rest.remove_one(w1 * hj);
            }
            for tail in rectangle_divisions_rec(w - w1, h, &rest, w1, Some(&heights)) {
                let mut division = Vec::with_capacity(1 + tail.len());
                division.push((w1, heights.clone()));
                division.extend(tail);
                out.push(division);
            }
        }
    }
    out
}

/// All divisions of a `w × h` rectangle into full-width columns of cells
/// with the given multiset of areas: each returned value is a descending
/// list of `(w_i, {h_{i,j}})` with `Σ w_i = w`, `Σ_j h_{i,j} = h` per
/// column, and cell areas `{w_i·h_{i,j}}` equal to `areas`.
pub fn rectangle_divisions(
    w: u64,
    h: u64,
    areas: &IntMultiset,
    limit: Option<&RectColumn>,
) -> Vec<Vec<RectColumn>> {
    let (w_limit, h_limit) = match limit {
        Some((wl, hl)) => (*wl, Some(hl)),
        None => (w, None),
    };
    rectangle_divisions_rec(w, h, areas, w_limit, h_limit)
}

/// The contents of one bin: per-item counts.
pub type BinFill = Vec<u32>;

/// A total or partial binning: for each bin type `j`, the multiset (kept
/// sorted) of the fills of its `n_j` bins.
pub type Binning = Vec<Vec<BinFill>>;

struct BinSearch<'a> {
    valid: &'a dyn Fn(&[u32], usize) -> bool,
    semi_valid: &'a dyn Fn(&[u32], usize) -> bool,
    limit: usize,
    out: Vec<Binning>,
}

impl<'a> BinSearch<'a> {
    fn check_semi(&self, fill: &[u32], j: usize) -> crate::Result<bool> {
        if (self.semi_valid)(fill, j) {
            return Ok(true);
        }
        if (self.valid)(fill, j) {
            return Err(Error::invalid(
                "binnings: semi-validity predicate rejects a valid binning",
            ));
        }
        Ok(false)
    }

    /// `last` is the (item, bin type, zeroed profile) of the previous
    /// placement. The per-profile max bookkeeping makes the placement path
    /// within one (bin type, profile) class unique, but copies of the same
    /// item placed into different classes could be interleaved in any
    /// order; requiring non-decreasing class order for the copies of each
    /// item picks one canonical interleaving, so every total binning is
    /// generated exactly once.
    fn recurse(
        &mut self,
        remaining: &mut [u32],
        bins: &mut Binning,
        last: Option<&(usize, usize, BinFill)>,
    ) -> crate::Result<()> {
        if self.out.len() >= self.limit {
            return Ok(());
        }
        for (j, fills) in bins.iter().enumerate() {
            for fill in fills {
                if !self.check_semi(fill, j)? {
                    return Ok(());
                }
            }
        }
        let Some(i) = remaining.iter().position(|&m| m != 0) else {
            if bins
                .iter()
                .enumerate()
                .all(|(j, fills)| fills.iter().all(|f| (self.valid)(f, j)))
            {
                self.out.push(bins.clone());
            }
            return Ok(());
        };
        remaining[i] -= 1;
        for j in 0..bins.len() {
            // Distinct fills with the i-th entry zeroed.
            let mut profiles: Vec<BinFill> = bins[j]
                .iter()
                .map(|f| {
                    let mut p = f.clone();
                    p[i] = 0;
                    p
                })
                .collect();
            profiles.sort_unstable();
            profiles.dedup();
            for profile in profiles {
                if let Some((li, lj, lp)) = last {
                    if *li == i && (j, &profile) < (*lj, lp) {
                        continue;
                    }
                }
                let agrees = |f: &BinFill| {
                    f.iter()
                        .zip(profile.iter())
                        .enumerate()
                        .all(|(k, (a, b))| k == i || a == b)
                };
                let top = bins[j]
                    .iter()
                    .filter(|f| agrees(f))
                    .map(|f| f[i])
                    .max()
                    .expect("profile came from this bin");
                // Exceed the current largest i-count on this profile.
                let mut b0 = profile.clone();
                b0[i] = top;
                self.replace_and_recurse(remaining, bins, j, i, &b0, top + 1, &profile)?;
                // Or raise the next one down to equal it.
                if top > 0 {
                    let mut b_minus = profile.clone();
                    b_minus[i] = top - 1;
                    if bins[j].contains(&b_minus) {
                        self.replace_and_recurse(remaining, bins, j, i, &b_minus, top, &profile)?;
                    }
                }
            }
        }
        remaining[i] += 1;
        Ok(())
    }

    /// Replaces one copy of `old` in bin type `j` by `old` with its `i`-th
    /// entry set to `new_count`, recurses, and restores the state.
    fn replace_and_recurse(
        &mut self,
        remaining: &mut [u32],
        bins: &mut Binning,
        j: usize,
        i: usize,
        old: &BinFill,
        new_count: u32,
        profile: &BinFill,
    ) -> crate::Result<()> {
        let pos = bins[j].iter().position(|f| f == old).expect("member");
        let saved = bins[j][pos].clone();
        bins[j][pos][i] = new_count;
        bins[j].sort_unstable();
        let last = (i, j, profile.clone());
        self.recurse(remaining, bins, Some(&last))?;
        let pos = bins[j]
            .iter()
            .position(|f| f[i] == new_count && {
                let mut p = f.clone();
                p[i] = saved[i];
                p == saved
            })
            .expect("replaced fill present");
        bins[j][pos] = saved;
        bins[j].sort_unstable();
        Ok(())
    }
}

/// All total valid binnings: for each bin type `j` (with `n[j]`
/// indistinguishable bins), a multiset of `n[j]` fills, each valid for `j`
/// per `valid`, together summing to `items`. `semi_valid` must hold on
/// every sub-fill of a valid fill and is used for pruning. An optional
/// partial binning resumes the search from that state; at most `limit`
/// results are returned.
pub fn binnings(
    items: &[u32],
    n: &[u32],
    valid: &dyn Fn(&[u32], usize) -> bool,
    semi_valid: &dyn Fn(&[u32], usize) -> bool,
    partial: Option<&Binning>,
    limit: Option<usize>,
) -> crate::Result<Vec<Binning>> {
    let r = items.len();
    let mut bins: Binning = match partial {
        Some(b) => {
            if b.len() != n.len() || b.iter().zip(n).any(|(f, &nj)| f.len() != nj as usize) {
                return Err(Error::invalid("binnings: partial binning shape mismatch"));
            }
            let mut sorted = b.clone();
            for fills in &mut sorted {
                if fills.iter().any(|f| f.len() != r) {
                    return Err(Error::invalid("binnings: fill length mismatch"));
                }
                fills.sort_unstable();
            }
            sorted
        }
        None => n.iter().map(|&nj| vec![vec![0; r]; nj as usize]).collect(),
    };
    let mut remaining = items.to_vec();
    for (k, rem) in remaining.iter_mut().enumerate() {
        let used: u32 = bins.iter().flatten().map(|f| f[k]).sum();
        *rem = rem
            .checked_sub(used)
            .ok_or_else(|| Error::invalid("binnings: partial binning exceeds item counts"))?;
    }
    let mut search = BinSearch {
        valid,
        semi_valid,
        limit: limit.unwrap_or(usize::MAX),
        out: Vec::new(),
    };
    search.recurse(&mut remaining, &mut bins, None)?;
    Ok(search.out)
}

/// True iff `fine` refines `coarse`: `fine` can be partitioned into groups
/// whose sums are exactly the entries of `coarse`.
pub fn is_refinement(fine: &IntMultiset, coarse: &IntMultiset) -> bool {
    if fine.total() != coarse.total() {
        return false;
    }
    // Exact-fill backtracking: place items (largest first) into parts.
    fn place(items: &[u64], space: &mut Vec<u64>) -> bool {
        let Some((&first, rest)) = items.split_first() else {
            return space.iter().all(|&s| s == 0);
        };
        let mut tried = HashSet::new();
        for k in 0..space.len() {
            if space[k] < first || !tried.insert(space[k]) {
                continue;
            }
            space[k] -= first;
            if place(rest, space) {
                space[k] += first;
                return true;
            }
            space[k] += first;
        }
        false
    }
    let mut space = coarse.entries.clone();
    place(&fine.entries, &mut space)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ms(entries: &[u64]) -> IntMultiset {
        IntMultiset::new(entries.to_vec()).unwrap()
    }

    /// Brute-force oracle: all sub-multisets by inclusion mask, deduplicated
    /// as descending sequences.
    fn oracle_linear(n: u64, pool: &IntMultiset) -> Vec<IntMultiset> {
        let k = pool.entries().len();
        let mut out = HashSet::new();
        for mask in 0u32..(1 << k) {
            let picked: Vec<u64> = (0..k)
                .filter(|b| mask >> b & 1 == 1)
                .map(|b| pool.entries()[b])
                .collect();
            if picked.iter().sum::<u64>() == n {
                out.insert(IntMultiset::new(picked).unwrap());
            }
        }
        let mut out: Vec<_> = out.into_iter().collect();
        out.sort();
        out
    }

    #[test]
    fn linear_divisions_examples() {
        let got = linear_divisions(4, &ms(&[3, 2, 2, 1, 1]), None);
        let want = vec![ms(&[3, 1]), ms(&[2, 2]), ms(&[2, 1, 1])];
        assert_eq!(
            got.iter().cloned().collect::<HashSet<_>>(),
            want.into_iter().collect::<HashSet<_>>()
        );
        assert_eq!(linear_divisions(0, &ms(&[2, 1]), None), vec![ms(&[])]);
        assert!(linear_divisions(5, &ms(&[2, 2]), None).is_empty());
    }

    #[test]
    fn linear_divisions_match_oracle() {
        let pools = [
            vec![],
            vec![1],
            vec![2, 1],
            vec![3, 2, 2, 1, 1],
            vec![4, 3, 2, 1],
            vec![2, 2, 2, 2, 1, 1],
            vec![5, 4, 3, 2, 1, 1],
        ];
        for pool in pools {
            let pool = ms(&pool);
            for n in 0..=8 {
                let mut got = linear_divisions(n, &pool, None);
                got.sort();
                let want = oracle_linear(n, &pool);
                assert_eq!(got, want, "n={n}, pool={:?}", pool);
                // No duplicates as sequences.
                let dedup: HashSet<_> = got.iter().cloned().collect();
                assert_eq!(dedup.len(), got.len());
            }
        }
    }

    fn canonical_division(mut d: Vec<RectColumn>) -> Vec<RectColumn> {
        d.sort();
        d
    }

    /// Brute-force oracle for rectangle divisions: assign each area cell to
    /// a column slot, check column constraints, canonicalize, dedupe.
    fn oracle_rectangles(w: u64, h: u64, areas: &IntMultiset) -> HashSet<Vec<RectColumn>> {
        let cells = areas.entries();
        let k = cells.len();
        let mut out = HashSet::new();
        // Column assignment: map each cell to a group 0..k.
        let mut assign = vec![0usize; k];
        loop {
            // Build groups.
            let mut groups: Vec<Vec<u64>> = vec![Vec::new(); k];
            for (c, &g) in assign.iter().enumerate() {
                groups[g].push(cells[c]);
            }
            let groups: Vec<Vec<u64>> = groups.into_iter().filter(|g| !g.is_empty()).collect();
            // Try all width choices per group.
            fn widths_rec(
                groups: &[Vec<u64>],
                h: u64,
                w_left: i64,
                acc: &mut Vec<RectColumn>,
                out: &mut HashSet<Vec<RectColumn>>,
            ) {
                let Some((g, rest)) = groups.split_first() else {
                    if w_left == 0 {
                        out.insert(canonical_division(acc.clone()));
                    }
                    return;
                };
                for wi in 1..=g.iter().copied().min().unwrap() {
                    if g.iter().any(|&a| a % wi != 0) || (wi as i64) > w_left {
                        continue;
                    }
                    let hs: Vec<u64> = g.iter().map(|&a| a / wi).collect();
                    if hs.iter().sum::<u64>() != h {
                        continue;
                    }
                    acc.push((wi, IntMultiset::new(hs).unwrap()));
                    widths_rec(rest, h, w_left - wi as i64, acc, out);
                    acc.pop();
                }
            }
            widths_rec(&groups, h, w as i64, &mut Vec::new(), &mut out);
            // Next assignment.
            let mut c = 0;
            loop {
                if c == k {
                    return out;
                }
                assign[c] += 1;
                if assign[c] < k {
                    break;
                }
                assign[c] = 0;
                c += 1;
            }
            if k == 0 {
                return out;
            }
        }
    }

    #[test]
    fn rectangle_divisions_examples() {
        // 5×4 rectangle with cell areas {8,6,3,3} admits the division
        // {(3,{2,1,1}),(2,{4})}.
        let got = rectangle_divisions(5, 4, &ms(&[8, 6, 3, 3]), None);
        let target = canonical_division(vec![(3, ms(&[2, 1, 1])), (2, ms(&[4]))]);
        assert!(got.iter().any(|d| canonical_division(d.clone()) == target));
        assert_eq!(
            rectangle_divisions(1, 1, &ms(&[1]), None),
            vec![vec![(1, ms(&[1]))]]
        );
        let got = rectangle_divisions(2, 2, &ms(&[2, 2]), None);
        let set: HashSet<_> = got.into_iter().map(canonical_division).collect();
        let want: HashSet<_> = [
            canonical_division(vec![(2, ms(&[1, 1]))]),
            canonical_division(vec![(1, ms(&[2])), (1, ms(&[2]))]),
        ]
        .into_iter()
        .collect();
        assert_eq!(set, want);
    }

    #[test]
    fn rectangle_divisions_match_oracle() {
        let cases: Vec<(u64, u64, Vec<u64>)> = vec![
            (2, 2, vec![2, 2]),
            (3, 2, vec![2, 2, 1, 1]),
            (4, 3, vec![6, 3, 2, 1]),
            (5, 4, vec![8, 6, 3, 3]),
            (2, 3, vec![3, 3]),
            (3, 3, vec![9]),
            (3, 3, vec![3, 3, 2, 1]),
            (4, 2, vec![4, 4]),
        ];
        for (w, h, areas) in cases {
            let areas = ms(&areas);
            let got: HashSet<_> = rectangle_divisions(w, h, &areas, None)
                .into_iter()
                .map(canonical_division)
                .collect();
            let want = oracle_rectangles(w, h, &areas);
            assert_eq!(got, want, "w={w} h={h} areas={:?}", areas);
            // And duplicate-free before canonicalization.
            let raw = rectangle_divisions(w, h, &areas, None);
            assert_eq!(raw.len(), got.len());
        }
    }

    /// Brute-force oracle for binnings: assign items one by one to
    /// distinguishable bin slots, then canonicalize and dedupe.
    fn oracle_binnings(
        items: &[u32],
        n: &[u32],
        valid: &dyn Fn(&[u32], usize) -> bool,
    ) -> HashSet<Binning> {
        let slots: Vec<usize> = n
            .iter()
            .enumerate()
            .flat_map(|(j, &nj)| std::iter::repeat(j).take(nj as usize))
            .collect();
        let r = items.len();
        let mut fills: Vec<BinFill> = vec![vec![0; r]; slots.len()];
        let mut out = HashSet::new();
        fn rec(
            items: &mut Vec<u32>,
            slots: &[usize],
            fills: &mut Vec<BinFill>,
            valid: &dyn Fn(&[u32], usize) -> bool,
            n_types: usize,
            out: &mut HashSet<Binning>,
        ) {
            let Some(i) = items.iter().position(|&m| m != 0) else {
                if fills
                    .iter()
                    .zip(slots)
                    .all(|(f, &j)| valid(f, j))
                {
                    let mut canon: Binning = vec![Vec::new(); n_types];
                    for (f, &j) in fills.iter().zip(slots) {
                        canon[j].push(f.clone());
                    }
                    for fs in &mut canon {
                        fs.sort_unstable();
                    }
                    out.insert(canon);
                }
                return;
            };
            items[i] -= 1;
            for s in 0..slots.len() {
                fills[s][i] += 1;
                rec(items, slots, fills, valid, n_types, out);
                fills[s][i] -= 1;
            }
            items[i] += 1;
        }
        rec(&mut items.to_vec(), &slots, &mut fills, valid, n.len(), &mut out);
        out
    }

    #[test]
    fn binnings_examples() {
        let cap1 = |f: &[u32], _j: usize| f.iter().sum::<u32>() <= 1;
        let got = binnings(&[2], &[2], &cap1, &cap1, None, None).unwrap();
        assert_eq!(got, vec![vec![vec![vec![1], vec![1]]]]);
        // All items zero: the empty binning iff total-valid.
        let any = |_: &[u32], _: usize| true;
        let got = binnings(&[0, 0], &[1], &any, &any, None, None).unwrap();
        assert_eq!(got.len(), 1);
        let none = |_: &[u32], _: usize| false;
        assert!(binnings(&[0], &[1], &none, &none, None, None)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn binnings_match_oracle() {
        let any = |_: &[u32], _: usize| true;
        let cap2 = |f: &[u32], _: usize| f.iter().sum::<u32>() <= 2;
        let semi_cap2 = cap2;
        let exactly2 = |f: &[u32], _: usize| f.iter().sum::<u32>() == 2;
        let even_first = |f: &[u32], j: usize| if j == 0 { f[0] % 2 == 0 } else { true };
        let semi_even = |_: &[u32], _: usize| true;
        type Case<'a> = (
            Vec<u32>,
            Vec<u32>,
            &'a dyn Fn(&[u32], usize) -> bool,
            &'a dyn Fn(&[u32], usize) -> bool,
        );
        let cases: Vec<Case> = vec![
            (vec![1, 1], vec![1], &any, &any),
            (vec![2, 1], vec![2], &any, &any),
            (vec![2, 2], vec![2, 1], &any, &any),
            (vec![3, 1], vec![2], &cap2, &semi_cap2),
            (vec![2, 2], vec![2], &exactly2, &cap2),
            (vec![2, 1, 1], vec![1, 2], &even_first, &semi_even),
            (vec![4], vec![3], &cap2, &semi_cap2),
        ];
        for (items, n, valid, semi) in cases {
            let got: HashSet<Binning> = binnings(&items, &n, valid, semi, None, None)
                .unwrap()
                .into_iter()
                .collect();
            let raw = binnings(&items, &n, valid, semi, None, None).unwrap();
            assert_eq!(raw.len(), got.len(), "duplicates for items={items:?} n={n:?}");
            let want = oracle_binnings(&items, &n, valid);
            assert_eq!(got, want, "items={items:?} n={n:?}");
            // Column sums equal the item vector.
            for b in &raw {
                for (k, &mk) in items.iter().enumerate() {
                    let sum: u32 = b.iter().flatten().map(|f| f[k]).sum();
                    assert_eq!(sum, mk);
                }
            }
        }
    }

    #[test]
    fn binnings_respects_limit_and_partial() {
        let any = |_: &[u32], _: usize| true;
        let all = binnings(&[2, 2], &[2, 1], &any, &any, None, None).unwrap();
        let capped = binnings(&[2, 2], &[2, 1], &any, &any, None, Some(2)).unwrap();
        assert_eq!(capped.len(), 2.min(all.len()));
        // Partial binning: everything already placed except one item.
        let partial: Binning = vec![vec![vec![1, 0], vec![1, 2]], vec![vec![0, 0]]];
        let got = binnings(&[2, 2], &[2, 1], &any, &any, Some(&partial), None).unwrap();
        assert!(!got.is_empty());
        for b in &got {
            // Extends the partial: type-0 bins still include fill (1,0).
            assert!(b[0].iter().any(|f| f == &vec![1u32, 0]));
        }
    }

    #[test]
    fn refinement_examples_and_properties() {
        assert!(is_refinement(&ms(&[2, 1, 1]), &ms(&[2, 2])));
        assert!(!is_refinement(&ms(&[3, 1]), &ms(&[2, 2])));
        assert!(is_refinement(&ms(&[1, 1, 1, 1]), &ms(&[4])));
        // Exhaustive check over partitions of totals ≤ 12: reflexivity and
        // antisymmetry up to equality.
        fn partitions(n: u64, max: u64) -> Vec<Vec<u64>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for first in (1..=n.min(max)).rev() {
                for mut tail in partitions(n - first, first) {
                    tail.insert(0, first);
                    out.push(tail);
                }
            }
            out
        }
        for n in 1..=12u64 {
            let parts: Vec<IntMultiset> =
                partitions(n, n).into_iter().map(|p| ms(&p)).collect();
            for a in &parts {
                assert!(is_refinement(a, a));
                for b in &parts {
                    if a != b {
                        assert!(
                            !(is_refinement(a, b) && is_refinement(b, a)),
                            "{a:?} {b:?}"
                        );
                    }
                }
            }
        }
    }
}
