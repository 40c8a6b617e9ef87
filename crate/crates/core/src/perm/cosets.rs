//! Coset actions: the homomorphism `q_U : W → S_{W/U}` of `W` on the left
//! cosets of a subgroup `U`.

use super::group::PermGroup;
use super::perm::Perm;
use crate::Error;
use std::collections::HashMap;

/// Largest coset-space size we are willing to materialize.
pub const COSET_INDEX_CAP: u128 = 1 << 16;

/// The action of `W` on the left cosets `W/U`, with cosets labeled by their
/// canonical (lexicographically minimal) representatives in BFS discovery
/// order from the trivial coset.
pub struct CosetAction {
    w: PermGroup,
    u: PermGroup,
    /// Canonical representative of each coset, indexed by label.
    reps: Vec<Perm>,
    /// Label lookup by canonical representative image array.
    label_of: HashMap<Vec<u16>, u32>,
    /// Images of W's generators in `S_{W/U}` (parallel to `w.gens()`).
    gen_images: Vec<Perm>,
}

impl CosetAction {
    /// Builds the coset action. Errors if `U ⊄ W` or the index exceeds
    /// [`COSET_INDEX_CAP`].
    pub fn new(w: &PermGroup, u: &PermGroup) -> crate::Result<CosetAction> {
        if u.degree() != w.degree() || !w.contains_group(u) {
            return Err(Error::invalid("coset_action: U is not a subgroup of W"));
        }
        let index = w.order() / u.order();
        if index > COSET_INDEX_CAP {
            return Err(Error::cap(format!(
                "coset index {index} exceeds cap {COSET_INDEX_CAP}"
            )));
        }
        let u_chain = u.chain();
        let mut reps: Vec<Perm> = Vec::with_capacity(index as usize);
        let mut label_of: HashMap<Vec<u16>, u32> = HashMap::new();
        let id_rep = u_chain.min_coset_rep(&Perm::identity(w.degree()));
        label_of.insert(id_rep.images().to_vec(), 0);
        reps.push(id_rep);
        let mut k = 0;
        while k < reps.len() {
            let r = reps[k].clone();
            for g in w.gens() {
                let c = u_chain.min_coset_rep(&g.compose(&r));
                if !label_of.contains_key(c.images()) {
                    label_of.insert(c.images().to_vec(), reps.len() as u32);
                    reps.push(c);
                }
            }
            k += 1;
        }
        debug_assert_eq!(reps.len() as u128, index);
        let mut action = CosetAction {
            w: w.clone(),
            u: u.clone(),
            reps,
            label_of,
            gen_images: Vec::new(),
        };
        action.gen_images = w.gens().iter().map(|g| action.apply(g)).collect();
        Ok(action)
    }

    /// Canonical representative of the coset with the given label.
    pub fn rep(&self, label: usize) -> &Perm {
        &self.reps[label]
    }

    /// The index `(W:U)`, i.e. the degree of the image action.
    pub fn index(&self) -> usize {
        self.reps.len()
    }

    /// The image `q_U(g)` of an element `g ∈ W` as a permutation of labels.
    pub fn apply(&self, g: &Perm) -> Perm {
        let u_chain = self.u.chain();
        let images: Vec<u16> = self
            .reps
            .iter()
            .map(|r| {
                let c = u_chain.min_coset_rep(&g.compose(r));
                self.label_of[c.images()] as u16
            })
            .collect();
        Perm::from_images(images).expect("coset action must permute labels")
    }

    /// Images of `W`'s generators, parallel to `W.gens()`.
    pub fn gen_images(&self) -> &[Perm] {
        &self.gen_images
    }

    /// The full image group `q_U(W)`.
    pub fn image(&self) -> PermGroup {
        PermGroup::new(self.index(), self.gen_images.clone()).unwrap()
    }

    /// The image `q_U(P)` of a subgroup `P ≤ W`.
    pub fn image_of(&self, p: &PermGroup) -> crate::Result<PermGroup> {
        if !self.w.contains_group(p) {
            return Err(Error::invalid("coset_action image: P is not a subgroup of W"));
        }
        PermGroup::new(self.index(), p.gens().iter().map(|g| self.apply(g)).collect())
    }

    /// Orbit sizes of `q_U(P)` on the coset space, descending. Cheaper than
    /// building the image group when only the orbit structure is needed.
    pub fn orbit_sizes_of(&self, p: &PermGroup) -> Vec<usize> {
        let images: Vec<Perm> = p.gens().iter().map(|g| self.apply(g)).collect();
        let n = self.index();
        let mut seen = vec![false; n];
        let mut sizes = Vec::new();
        for start in 0..n as u16 {
            if seen[start as usize] {
                continue;
            }
            let mut stack = vec![start];
            seen[start as usize] = true;
            let mut size = 0usize;
            while let Some(x) = stack.pop() {
                size += 1;
                for g in &images {
                    let y = g.apply(x);
                    if !seen[y as usize] {
                        seen[y as usize] = true;
                        stack.push(y);
                    }
                }
            }
            sizes.push(size);
        }
        sizes.sort_unstable_by(|a, b| b.cmp(a));
        sizes
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn s3_on_cosets_of_a_transposition() {
        // Oracle: brute-force cosets of ⟨(1 2)⟩ in S_3: index 3, faithful image.
        let w = PermGroup::symmetric(3);
        let u = PermGroup::parse_text("3: (1 2)").unwrap();
        let q = CosetAction::new(&w, &u).unwrap();
        assert_eq!(q.index(), 3);
        assert_eq!(q.image().order(), 6);
    }

    #[test]
    fn trivial_coset_space() {
        let w = PermGroup::symmetric(3);
        let q = CosetAction::new(&w, &w).unwrap();
        assert_eq!(q.index(), 1);
        assert_eq!(q.image().order(), 1);
    }

    #[test]
    fn cyclic_four_mod_two() {
        let w = PermGroup::parse_text("4: (1 2 3 4)").unwrap();
        let u = PermGroup::parse_text("4: (1 3)(2 4)").unwrap();
        let q = CosetAction::new(&w, &u).unwrap();
        assert_eq!(q.index(), 2);
        assert_eq!(q.image().order(), 2);
    }

    #[test]
    fn kernel_is_core() {
        // Kernel of S_4 acting on cosets of D_4 = core of D_4 = V_4... check
        // with U = ⟨(1 2)⟩ in S_4 instead: core is trivial, image order 24.
        let w = PermGroup::symmetric(4);
        let u = PermGroup::parse_text("4: (1 2)").unwrap();
        let q = CosetAction::new(&w, &u).unwrap();
        assert_eq!(q.index(), 12);
        assert_eq!(q.image().order(), 24);
    }
}
