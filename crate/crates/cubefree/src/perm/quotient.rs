//! Quotient groups realized as permutation groups on coset spaces.

use std::collections::HashMap;
use std::sync::OnceLock;

use super::group::PermGroup;
use super::hom::GroupHom;
use super::permutation::Permutation;
use crate::error::{Error, Result};

/// Default cap on the number of cosets a quotient may act on.
pub const INDEX_CAP: u128 = 100_000;

/// A quotient `parent/kernel` realized as a permutation group, together
/// with the projection homomorphism and a section lifting quotient
/// elements back to parent representatives.
pub struct CosetQuotient {
    parent: PermGroup,
    kernel: PermGroup,
    group: PermGroup,
    projection: GroupHom,
    /// Parent generators aligned with `group.generators()`.
    lifts: Vec<Permutation>,
    strong_lifts: OnceLock<Vec<Permutation>>,
}

impl CosetQuotient {
    /// Quotient by the action of `parent` on the right cosets of `kernel`,
    /// which must be normal in `parent`. Cosets are identified by a
    /// canonical minimal representative, so the construction also requires
    /// the kernel to be small enough to enumerate. `cap` bounds the number
    /// of cosets (default [`INDEX_CAP`]).
    pub fn regular(
        parent: &PermGroup,
        kernel: &PermGroup,
        cap: Option<u128>,
    ) -> Result<CosetQuotient> {
        if !kernel.is_normal_in(parent) {
            return Err(Error::NotNormal);
        }
        let cap = cap.unwrap_or(INDEX_CAP);
        let index = parent.order() / kernel.order();
        if index > cap {
            return Err(Error::IndexTooLarge { index, cap });
        }
        let kernel_elements = kernel.elements()?;
        let canonical = |g: &Permutation| -> Vec<u32> {
            kernel_elements
                .iter()
                .map(|n| n.compose(g).images().to_vec())
                .min()
                .expect("kernel contains identity")
        };

        let index = index as usize;
        let mut ids: HashMap<Vec<u32>, u32> = HashMap::new();
        let mut reps: Vec<Permutation> = vec![parent.identity()];
        ids.insert(canonical(&parent.identity()), 0);
        // images[k][i] = coset hit by coset i under parent generator k
        let mut images: Vec<Vec<u32>> = vec![Vec::new(); parent.generators().len()];
        let mut i = 0usize;
        while i < reps.len() {
            for (k, g) in parent.generators().iter().enumerate() {
                let t = reps[i].compose(g);
                let key = canonical(&t);
                let id = *ids.entry(key).or_insert_with(|| {
                    reps.push(t.clone());
                    (reps.len() - 1) as u32
                });
                images[k].push(id);
            }
            i += 1;
        }
        assert_eq!(reps.len(), index, "coset count must equal the index");
        let actions: Vec<Permutation> = images
            .into_iter()
            .map(|im| Permutation::from_images(im).expect("coset action is a bijection"))
            .collect();
        Self::finish(parent.clone(), kernel.clone(), actions)
    }

    /// Quotient realized on a union of right-coset spaces of the given
    /// `covers`, each of which must contain `kernel`. The combined action
    /// must have kernel exactly `kernel`; that is verified, and the
    /// construction fails with `NotFaithful` otherwise. Useful when a few
    /// small coset spaces separate the quotient that a single regular
    /// action would need many points for.
    pub(crate) fn on_coset_spaces(
        parent: &PermGroup,
        kernel: &PermGroup,
        covers: &[PermGroup],
    ) -> Result<CosetQuotient> {
        if !kernel.is_normal_in(parent) {
            return Err(Error::NotNormal);
        }
        let index = parent.order() / kernel.order();
        let mut per_gen: Vec<Vec<u32>> = vec![Vec::new(); parent.generators().len()];
        let mut degree = 0usize;
        for u in covers {
            if !kernel.is_subgroup_of(u) || !u.is_subgroup_of(parent) {
                return Err(Error::Internal(
                    "coset-space cover must sit between kernel and parent".into(),
                ));
            }
            let block = (parent.order() / u.order()) as usize;
            if degree + block > INDEX_CAP as usize {
                return Err(Error::IndexTooLarge {
                    index: (degree + block) as u128,
                    cap: INDEX_CAP,
                });
            }
            // BFS the coset space of `u`; cosets are identified by
            // membership tests against the discovered representatives.
            let mut reps: Vec<Permutation> = vec![parent.identity()];
            let find = |reps: &mut Vec<Permutation>, t: Permutation| -> u32 {
                for (j, r) in reps.iter().enumerate() {
                    if u.contains(&t.compose(&r.inverse())) {
                        return j as u32;
                    }
                }
                reps.push(t);
                (reps.len() - 1) as u32
            };
            let mut local: Vec<Vec<u32>> = vec![Vec::new(); parent.generators().len()];
            let mut i = 0usize;
            while i < reps.len() {
                for (k, g) in parent.generators().iter().enumerate() {
                    let t = reps[i].compose(g);
                    let id = find(&mut reps, t);
                    local[k].push(id);
                }
                i += 1;
            }
            assert_eq!(reps.len(), block, "coset space size must equal |parent:cover|");
            for (k, col) in local.into_iter().enumerate() {
                per_gen[k].extend(col.into_iter().map(|x| x + degree as u32));
            }
            degree += block;
        }
        if degree == 0 {
            return Err(Error::Internal("no coset spaces given".into()));
        }
        let actions: Vec<Permutation> = per_gen
            .into_iter()
            .map(|im| Permutation::from_images(im).expect("coset action is a bijection"))
            .collect();
        // Every kernel generator must act trivially (it does, since each
        // cover contains the kernel and the kernel is normal), and nothing
        // outside the kernel may: the image order must equal the index.
        let q = Self::finish(parent.clone(), kernel.clone(), actions)?;
        if q.group.order() != index {
            return Err(Error::NotFaithful);
        }
        Ok(q)
    }

    /// Shared tail: given the action image of each parent generator, build
    /// the quotient group (generator list aligned with parent lifts), the
    /// projection, and check the quotient order against the index.
    fn finish(
        parent: PermGroup,
        kernel: PermGroup,
        actions: Vec<Permutation>,
    ) -> Result<CosetQuotient> {
        let degree = if let Some(a) = actions.first() {
            a.degree()
        } else {
            1
        };
        let index = parent.order() / kernel.order();
        let mut q_gens: Vec<Permutation> = Vec::new();
        let mut lifts: Vec<Permutation> = Vec::new();
        for (k, a) in actions.iter().enumerate() {
            if !a.is_identity() && !q_gens.contains(a) {
                q_gens.push(a.clone());
                lifts.push(parent.generators()[k].clone());
            }
        }
        let group =
            PermGroup::new_prealigned(degree, q_gens).with_known_order(index);
        if group.order() != index {
            return Err(Error::NotFaithful);
        }
        let projection = GroupHom::new(parent.clone(), group.clone(), actions)?;
        Ok(CosetQuotient {
            parent,
            kernel,
            group,
            projection,
            lifts,
            strong_lifts: OnceLock::new(),
        })
    }

    pub fn parent(&self) -> &PermGroup {
        &self.parent
    }

    pub fn kernel(&self) -> &PermGroup {
        &self.kernel
    }

    /// The quotient as a permutation group.
    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    pub fn projection(&self) -> &GroupHom {
        &self.projection
    }

    /// Image of a parent element in the quotient.
    pub fn project(&self, g: &Permutation) -> Result<Permutation> {
        self.projection.apply(g)
    }

    /// A parent representative mapping onto the quotient element `q`;
    /// `project(section(q)) == q` exactly.
    pub fn section(&self, q: &Permutation) -> Result<Permutation> {
        let word = self.group.decompose(q).ok_or(Error::NotInGroup)?;
        let strong = self.strong_lifts.get_or_init(|| {
            self.group.strong_images(&self.lifts, self.parent.degree())
        });
        Ok(self
            .group
            .evaluate_word_with(&word, strong, self.parent.degree()))
    }
}

impl std::fmt::Debug for CosetQuotient {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CosetQuotient")
            .field("parent_degree", &self.parent.degree())
            .field("kernel_order", &self.kernel.order())
            .field("quotient_order", &self.group.order())
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn p(s: &str, d: usize) -> Permutation {
        Permutation::parse(s, d).unwrap()
    }

    fn group(degree: usize, gens: &[&str]) -> PermGroup {
        PermGroup::new(degree, gens.iter().map(|s| p(s, degree)).collect()).unwrap()
    }

    #[test]
    fn quotient_order_examples() {
        let s3 = group(3, &["(1,2)", "(1,2,3)"]);
        let a3 = group(3, &["(1,2,3)"]);
        let q = CosetQuotient::regular(&s3, &a3, None).unwrap();
        assert_eq!(q.group().order(), 2);

        let c4 = group(4, &["(1,2,3,4)"]);
        let c2 = group(4, &["(1,3)(2,4)"]);
        let q = CosetQuotient::regular(&c4, &c2, None).unwrap();
        assert_eq!(q.group().order(), 2);
    }

    #[test]
    fn c12_mod_frattini_has_order_six() {
        // C12 as a 12-cycle; its Frattini subgroup is the square-of-6th
        // powers subgroup of order 2, computed here directly as <g^6>.
        let deg = 12;
        let g = p("(1,2,3,4,5,6,7,8,9,10,11,12)", deg);
        let c12 = PermGroup::new(deg, vec![g.clone()]).unwrap();
        let phi = PermGroup::new(deg, vec![g.pow(6)]).unwrap();
        assert_eq!(phi.order(), 2);
        let q = CosetQuotient::regular(&c12, &phi, None).unwrap();
        assert_eq!(q.group().order(), 6);
    }

    #[test]
    fn projection_and_section_round_trip() {
        let s3 = group(3, &["(1,2)", "(1,2,3)"]);
        let a3 = group(3, &["(1,2,3)"]);
        let q = CosetQuotient::regular(&s3, &a3, None).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let x = q.group().random_element(&mut rng);
            let lifted = q.section(&x).unwrap();
            assert!(s3.contains(&lifted));
            assert_eq!(q.project(&lifted).unwrap(), x);
        }
        // projection ∘ section ∘ projection = projection on parent elements
        for e in s3.elements().unwrap().iter() {
            let pr = q.project(e).unwrap();
            assert_eq!(q.project(&q.section(&pr).unwrap()).unwrap(), pr);
        }
    }

    #[test]
    fn kernel_maps_to_identity() {
        let c12 = group(12, &["(1,2,3,4,5,6,7,8,9,10,11,12)"]);
        let n = group(12, &["(1,5,9)(2,6,10)(3,7,11)(4,8,12)"]);
        assert_eq!(n.order(), 3);
        let q = CosetQuotient::regular(&c12, &n, None).unwrap();
        assert_eq!(q.group().order(), 4);
        for e in n.elements().unwrap().iter() {
            assert!(q.project(e).unwrap().is_identity());
        }
    }

    #[test]
    fn non_normal_kernel_rejected() {
        let s3 = group(3, &["(1,2)", "(1,2,3)"]);
        let c2 = group(3, &["(1,2)"]);
        let err = CosetQuotient::regular(&s3, &c2, None).unwrap_err();
        assert!(matches!(err, Error::NotNormal));
    }

    #[test]
    fn index_cap_enforced() {
        let c6 = group(6, &["(1,2,3,4,5,6)"]);
        let triv = PermGroup::trivial(6);
        let err = CosetQuotient::regular(&c6, &triv, Some(5)).unwrap_err();
        assert!(matches!(err, Error::IndexTooLarge { index: 6, cap: 5 }));
    }

    #[test]
    fn quotient_is_homomorphic_image() {
        let s4 = group(4, &["(1,2)", "(1,2,3,4)"]);
        let v4 = group(4, &["(1,2)(3,4)", "(1,3)(2,4)"]);
        let q = CosetQuotient::regular(&s4, &v4, None).unwrap();
        assert_eq!(q.group().order(), 6);
        let elems = s4.elements().unwrap();
        for a in elems.iter().take(12) {
            for b in elems.iter().take(12) {
                let lhs = q.project(&a.compose(b)).unwrap();
                let rhs = q.project(a).unwrap().compose(&q.project(b).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn coset_space_union_realization_matches_regular() {
        // S3 × C5 on 8 points, kernel trivial: separate with the two
        // "factor" subgroups instead of a regular action on 30 points.
        let g = group(8, &["(1,2)", "(1,2,3)", "(4,5,6,7,8)"]);
        assert_eq!(g.order(), 30);
        let c5 = group(8, &["(4,5,6,7,8)"]);
        let s3 = group(8, &["(1,2)", "(1,2,3)"]);
        let q =
            CosetQuotient::on_coset_spaces(&g, &PermGroup::trivial(8), &[c5, s3]).unwrap();
        assert_eq!(q.group().order(), 30);
        assert_eq!(q.group().degree(), 6 + 5);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let x = q.group().random_element(&mut rng);
            assert_eq!(q.project(&q.section(&x).unwrap()).unwrap(), x);
        }
    }

    #[test]
    fn coset_space_union_detects_unfaithful_cover() {
        // A cover equal to the whole group has a one-point coset space, so
        // the combined action cannot be faithful on a proper quotient.
        let c6 = group(6, &["(1,2,3,4,5,6)"]);
        let c2 = group(6, &["(1,4)(2,5)(3,6)"]);
        let err = CosetQuotient::on_coset_spaces(&c6, &PermGroup::trivial(6), &[c6.clone()])
            .unwrap_err();
        assert!(matches!(err, Error::NotFaithful));
        let err2 = CosetQuotient::on_coset_spaces(&c6, &c2, &[c6.clone()]).unwrap_err();
        assert!(matches!(err2, Error::NotFaithful));
    }
}
