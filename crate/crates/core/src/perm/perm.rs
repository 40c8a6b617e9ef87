//! The [`Perm`] type: a permutation of `{0, …, degree-1}`.

use crate::Error;
use std::fmt;

/// A permutation on `{0, …, degree-1}`, stored as its image array.
///
/// `images[i]` is the image of point `i`. Composition is function
/// composition: `(a * b)(i) = a(b(i))`, i.e. `b` acts first.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<u16>,
}

impl Perm {
    /// The identity permutation on `degree` points.
    pub fn identity(degree: usize) -> Self {
        Perm {
            images: (0..degree as u16).collect(),
        }
    }

    /// Builds a permutation from its (0-based) image array, checking that it
    /// is a bijection.
    pub fn from_images(images: Vec<u16>) -> crate::Result<Self> {
        let d = images.len();
        let mut seen = vec![false; d];
        for &x in &images {
            if (x as usize) >= d || seen[x as usize] {
                return Err(Error::invalid("image array is not a bijection"));
            }
            seen[x as usize] = true;
        }
        Ok(Perm { images })
    }

    /// Builds a permutation of `degree` points from 0-based disjoint cycles.
    pub fn from_cycles(degree: usize, cycles: &[Vec<u16>]) -> crate::Result<Self> {
        let mut images: Vec<u16> = (0..degree as u16).collect();
        let mut touched = vec![false; degree];
        for cyc in cycles {
            for w in 0..cyc.len() {
                let from = cyc[w] as usize;
                let to = cyc[(w + 1) % cyc.len()];
                if from >= degree || (to as usize) >= degree {
                    return Err(Error::invalid("cycle point out of range"));
                }
                if touched[from] {
                    return Err(Error::invalid("cycles are not disjoint"));
                }
                touched[from] = true;
                images[from] = to;
            }
        }
        Ok(Perm { images })
    }

    /// Number of points acted on.
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of a point.
    #[inline]
    pub fn apply(&self, point: u16) -> u16 {
        self.images[point as usize]
    }

    /// The raw image array.
    pub fn images(&self) -> &[u16] {
        &self.images
    }

    /// Function composition: `self ∘ other`, applying `other` first.
    pub fn compose(&self, other: &Perm) -> Perm {
        debug_assert_eq!(self.degree(), other.degree());
        Perm {
            images: other.images.iter().map(|&x| self.images[x as usize]).collect(),
        }
    }

    /// The inverse permutation.
    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u16; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u16;
        }
        Perm { images: inv }
    }

    /// Conjugation that relabels points by `s`: returns `s ∘ self ∘ s⁻¹`.
    ///
    /// If `self` maps `i ↦ j` then the result maps `s(i) ↦ s(j)`.
    pub fn relabel(&self, s: &Perm) -> Perm {
        let mut images = vec![0u16; self.images.len()];
        for i in 0..self.images.len() {
            images[s.images[i] as usize] = s.images[self.images[i] as usize];
        }
        Perm { images }
    }

    /// True iff this is the identity.
    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u16 == x)
    }

    /// Multiplicative order.
    pub fn order(&self) -> u64 {
        let mut ord: u64 = 1;
        let mut seen = vec![false; self.degree()];
        for i in 0..self.degree() {
            if seen[i] {
                continue;
            }
            let mut len: u64 = 0;
            let mut j = i as u16;
            while !seen[j as usize] {
                seen[j as usize] = true;
                j = self.images[j as usize];
                len += 1;
            }
            ord = num_integer::lcm(ord, len);
        }
        ord
    }

    /// Cycle type as a descending list of cycle lengths (including fixed
    /// points as 1s).
    pub fn cycle_type(&self) -> Vec<usize> {
        let mut lens: Vec<usize> = self.cycles_with_fixed().iter().map(|c| c.len()).collect();
        lens.sort_unstable_by(|a, b| b.cmp(a));
        lens
    }

    /// Disjoint cycles of length ≥ 2, each rotated to start at its minimal
    /// point, sorted by starting point.
    pub fn cycles(&self) -> Vec<Vec<u16>> {
        self.cycles_with_fixed()
            .into_iter()
            .filter(|c| c.len() >= 2)
            .collect()
    }

    fn cycles_with_fixed(&self) -> Vec<Vec<u16>> {
        let mut out = Vec::new();
        let mut seen = vec![false; self.degree()];
        for i in 0..self.degree() {
            if seen[i] {
                continue;
            }
            let mut cyc = Vec::new();
            let mut j = i as u16;
            while !seen[j as usize] {
                seen[j as usize] = true;
                cyc.push(j);
                j = self.images[j as usize];
            }
            out.push(cyc);
        }
        out
    }

    /// Packs the image array into a `u64` key; requires degree ≤ 16.
    ///
    /// Used as a compact hash key during subgroup-lattice walks.
    pub fn pack(&self) -> u64 {
        debug_assert!(self.degree() <= 16);
        let mut key: u64 = 0;
        for (i, &x) in self.images.iter().enumerate() {
            key |= (x as u64) << (4 * i);
        }
        key
    }

    /// Parses cycle notation such as `(1 2 3)(4 5)` or `()` (identity),
    /// with 1-based points.
    pub fn parse_cycles(degree: usize, text: &str) -> crate::Result<Perm> {
        let text = text.trim();
        let mut cycles: Vec<Vec<u16>> = Vec::new();
        let mut rest = text;
        if rest.is_empty() {
            return Ok(Perm::identity(degree));
        }
        while !rest.is_empty() {
            let open = rest
                .find('(')
                .ok_or_else(|| Error::Parse(format!("expected '(' in cycle text: {text}")))?;
            let close = rest[open..]
                .find(')')
                .ok_or_else(|| Error::Parse(format!("unbalanced ')' in cycle text: {text}")))?
                + open;
            let inner = &rest[open + 1..close];
            let mut cyc = Vec::new();
            for tok in inner.split([' ', ',']).filter(|t| !t.is_empty()) {
                let n: usize = tok
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad point `{tok}` in cycles")))?;
                if n == 0 || n > degree {
                    return Err(Error::Parse(format!("point {n} out of range 1..{degree}")));
                }
                cyc.push((n - 1) as u16);
            }
            if !cyc.is_empty() {
                cycles.push(cyc);
            }
            rest = rest[close + 1..].trim_start();
        }
        Perm::from_cycles(degree, &cycles)
    }
}

impl fmt::Display for Perm {
    /// Cycle notation with 1-based points; identity prints as `()`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for cyc in cycles {
            write!(f, "(")?;
            for (k, p) in cyc.iter().enumerate() {
                if k > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{}", p + 1)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm[{self}]")
    }
}
