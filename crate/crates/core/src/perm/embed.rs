//! Direct products, wreath products, and the embeddings of a group into
//! them along its orbit / block structure.

use super::group::PermGroup;
use super::ops::minimal_block_partition;
use super::perm::Perm;
use crate::Error;

/// The direct product of the factors acting on consecutive point ranges.
pub fn direct_product(factors: &[PermGroup]) -> PermGroup {
    let degree: usize = factors.iter().map(|f| f.degree()).sum();
    let mut gens = Vec::new();
    let mut offset = 0u16;
    for f in factors {
        for g in f.gens() {
            let mut images: Vec<u16> = (0..degree as u16).collect();
            for j in 0..f.degree() as u16 {
                images[(offset + j) as usize] = offset + g.apply(j);
            }
            gens.push(Perm::from_images(images).unwrap());
        }
        offset += f.degree() as u16;
    }
    PermGroup::new(degree, gens).unwrap()
}

/// The wreath product `inner ≀ outer`: `outer` permutes `outer.degree()`
/// blocks of `inner.degree()` points each, and an independent copy of
/// `inner` acts inside every block. Point `(i, j)` (block `i`, offset `j`)
/// is labeled `i·inner.degree() + j`.
pub fn wreath_product(inner: &PermGroup, outer: &PermGroup) -> PermGroup {
    let d = inner.degree();
    let e = outer.degree();
    let degree = d * e;
    let mut gens = Vec::new();
    for i in 0..e {
        for g in inner.gens() {
            let mut images: Vec<u16> = (0..degree as u16).collect();
            for j in 0..d {
                images[i * d + j] = (i * d) as u16 + g.apply(j as u16);
            }
            gens.push(Perm::from_images(images).unwrap());
        }
    }
    for b in outer.gens() {
        gens.push(block_lift(b, d));
    }
    PermGroup::new(degree, gens).unwrap()
}

/// The canonical lift of a block permutation: `(i, j) ↦ (σ(i), j)`.
pub fn block_lift(sigma: &Perm, block_size: usize) -> Perm {
    let degree = sigma.degree() * block_size;
    let mut images = vec![0u16; degree];
    for i in 0..sigma.degree() {
        for j in 0..block_size {
            images[i * block_size + j] = (sigma.apply(i as u16) as usize * block_size + j) as u16;
        }
    }
    Perm::from_images(images).unwrap()
}

/// Folds an innermost-first factor list into the iterated wreath product
/// `factors[0] ≀ factors[1] ≀ … ≀ factors[last]`.
pub fn fold_wreath(factors: &[PermGroup]) -> PermGroup {
    let mut w = factors[0].clone();
    for f in &factors[1..] {
        w = wreath_product(&w, f);
    }
    w
}

/// Embeds `G` into a direct product along its orbits: returns `s` and
/// transitive factors with `G^s ≤ G_1 × … × G_r` (factors on consecutive
/// ranges, ordered by the minimal element of each orbit).
pub fn embed_direct_product(g: &PermGroup) -> (Perm, Vec<PermGroup>) {
    let orbits = g.orbits();
    let mut images = vec![0u16; g.degree()];
    let mut offset = 0u16;
    let mut factors = Vec::new();
    for orbit in &orbits {
        for (j, &x) in orbit.iter().enumerate() {
            images[x as usize] = offset + j as u16;
        }
        factors.push(g.restrict_to(orbit));
        offset += orbit.len() as u16;
    }
    let s = Perm::from_images(images).unwrap();
    (s, factors)
}

/// Embeds transitive `G` into an iterated wreath product of primitive
/// groups: returns `s` and an innermost-first factor list with
/// `G^s ≤ fold_wreath(factors)`.
///
/// Blocks are ordered by minimal element and each non-initial block is
/// ordered by the image of the first block under a transversal element (the
/// cheap reordering heuristic: if the best inner factor is cyclic, this
/// ordering finds it). Both the inner factor and the block action are
/// decomposed recursively so every returned factor is primitive.
pub fn embed_wreath(g: &PermGroup) -> crate::Result<(Perm, Vec<PermGroup>)> {
    if !g.is_transitive() {
        return Err(Error::invalid("embed_wreath requires a transitive group"));
    }
    let partition = match minimal_block_partition(g)? {
        None => return Ok((Perm::identity(g.degree()), vec![g.clone()])),
        Some(p) => p,
    };
    let blocks = partition.blocks();
    let e = blocks.len();
    let d = blocks[0].len();
    // Transversal: for each point, an element of G mapping blocks[0][0] there.
    let base = blocks[0][0];
    let mut transversal: Vec<Option<Perm>> = vec![None; g.degree()];
    transversal[base as usize] = Some(Perm::identity(g.degree()));
    let mut queue = vec![base];
    let mut k = 0;
    while k < queue.len() {
        let x = queue[k];
        for gen in g.gens() {
            let y = gen.apply(x);
            if transversal[y as usize].is_none() {
                transversal[y as usize] =
                    Some(gen.compose(transversal[x as usize].as_ref().unwrap()));
                queue.push(y);
            }
        }
        k += 1;
    }
    // Relabel: block i gets the ordering g_i(x_{1,1}), …, g_i(x_{1,d}) where
    // g_i maps the base point onto block i's minimal point.
    let mut images = vec![u16::MAX; g.degree()];
    for (i, block) in blocks.iter().enumerate() {
        let gi = transversal[block[0] as usize]
            .as_ref()
            .expect("transitive group reaches all points");
        for (j, &x1j) in blocks[0].iter().enumerate() {
            let p = gi.apply(x1j);
            debug_assert!(block.contains(&p));
            images[p as usize] = (i * d + j) as u16;
        }
    }
    let s = Perm::from_images(images)?;
    let g_prime = g.conjugate_by(&s);
    // Quotient onto the block action and inner components.
    let q_of = |p: &Perm| -> Perm {
        let images: Vec<u16> = (0..e).map(|i| (p.apply((i * d) as u16) as usize / d) as u16).collect();
        Perm::from_images(images).expect("blocks must be permuted")
    };
    let b_group = PermGroup::new(e, g_prime.gens().iter().map(&q_of).collect())?;
    let mut a_gens = Vec::new();
    for gp in g_prime.gens() {
        let h = block_lift(&q_of(gp), d).inverse().compose(gp);
        for i in 0..e {
            let comp: Vec<u16> = (0..d)
                .map(|j| h.apply((i * d + j) as u16) - (i * d) as u16)
                .collect();
            a_gens.push(Perm::from_images(comp)?);
        }
    }
    let a_group = PermGroup::new(d, a_gens)?;
    // Recurse on both sides so all factors are primitive.
    let (sa, factors_a) = embed_wreath(&a_group)?;
    let (sb, factors_b) = embed_wreath(&b_group)?;
    // Conjugate the wreath coordinates by the refinements: (i,j) ↦ (sb(i), sa(j)).
    let mut refine = vec![0u16; g.degree()];
    for i in 0..e {
        for j in 0..d {
            refine[i * d + j] = (sb.apply(i as u16) as usize * d) as u16 + sa.apply(j as u16);
        }
    }
    let refine = Perm::from_images(refine)?;
    let total = refine.compose(&s);
    let mut factors = factors_a;
    factors.extend(factors_b);
    Ok((total, factors))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn contained(g: &PermGroup, s: &Perm, w: &PermGroup) -> bool {
        g.gens().iter().all(|x| w.contains(&x.relabel(s)))
    }

    #[test]
    fn direct_product_embedding() {
        let g = PermGroup::parse_text("5: (1 3)(2 4 5)").unwrap();
        let (s, factors) = embed_direct_product(&g);
        assert_eq!(factors.len(), 2);
        assert_eq!(factors[0].order(), 2);
        assert_eq!(factors[1].order(), 3);
        let d = direct_product(&factors);
        assert!(contained(&g, &s, &d));
    }

    #[test]
    fn direct_product_of_transitive_group_is_identity() {
        let g = PermGroup::symmetric(3);
        let (s, factors) = embed_direct_product(&g);
        assert!(s.is_identity());
        assert_eq!(factors.len(), 1);
    }

    #[test]
    fn wreath_embedding_of_c4() {
        let c4 = PermGroup::parse_text("4: (1 2 3 4)").unwrap();
        let (s, factors) = embed_wreath(&c4).unwrap();
        assert_eq!(factors.len(), 2);
        assert!(factors.iter().all(|f| f.degree() == 2 && f.order() == 2));
        let w = fold_wreath(&factors);
        assert_eq!(w.order(), 8);
        assert!(contained(&c4, &s, &w));
    }

    #[test]
    fn wreath_embedding_of_primitive_group() {
        let s5 = PermGroup::symmetric(5);
        let (s, factors) = embed_wreath(&s5).unwrap();
        assert!(s.is_identity());
        assert_eq!(factors.len(), 1);
        assert_eq!(factors[0].order(), 120);
    }

    #[test]
    fn wreath_embedding_of_dihedral() {
        let d4 = PermGroup::parse_text("4: (1 2 3 4) | (1 3)").unwrap();
        let (s, factors) = embed_wreath(&d4).unwrap();
        assert_eq!(factors.len(), 2);
        let w = fold_wreath(&factors);
        assert!(contained(&d4, &s, &w));
    }

    #[test]
    fn wreath_embedding_of_c8_gives_primitive_factors() {
        let c8 = PermGroup::parse_text("8: (1 2 3 4 5 6 7 8)").unwrap();
        let (s, factors) = embed_wreath(&c8).unwrap();
        assert!(factors.iter().all(|f| f.order() == 2));
        assert_eq!(factors.len(), 3);
        let w = fold_wreath(&factors);
        assert!(contained(&c8, &s, &w));
    }

    #[test]
    fn wreath_product_order() {
        let c2 = PermGroup::symmetric(2);
        let s3 = PermGroup::symmetric(3);
        // C_2 ≀ S_3: |C_2|^3 · |S_3| = 48.
        assert_eq!(wreath_product(&c2, &s3).order(), 48);
        // S_3 ≀ C_2: |S_3|^2 · 2 = 72.
        assert_eq!(wreath_product(&s3, &c2).order(), 72);
    }
}
