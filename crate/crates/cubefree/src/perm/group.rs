//! Finite permutation groups backed by lazily built stabilizer chains.

use std::sync::{Arc, OnceLock};

use rand::Rng;

use super::chain::StabChain;
use super::permutation::Permutation;
use crate::error::{Error, Result};

/// Default cap on full element enumeration.
pub const ELEMENTS_CAP: u128 = 200_000;

struct Inner {
    degree: usize,
    gens: Vec<Permutation>,
    name: Option<String>,
    known_order: Option<u128>,
    chain: OnceLock<StabChain>,
    elements: OnceLock<Arc<Vec<Permutation>>>,
}

/// A finite permutation group on points `1..=degree` (stored 0-based),
/// given by generators. The stabilizer chain is built deterministically on
/// first use and never mutated afterwards, so values are cheap to clone and
/// safe to share read-only across threads.
#[derive(Clone)]
pub struct PermGroup {
    inner: Arc<Inner>,
}

impl PermGroup {
    /// Group generated by `gens` on `degree` points. Identity and duplicate
    /// generators are dropped; all generators must have the stated degree.
    pub fn new(degree: usize, gens: Vec<Permutation>) -> Result<PermGroup> {
        let mut kept: Vec<Permutation> = Vec::new();
        for g in gens {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch(degree, g.degree()));
            }
            if !g.is_identity() && !kept.contains(&g) {
                kept.push(g);
            }
        }
        Ok(Self::from_parts(degree, kept, None, None))
    }

    /// Like [`PermGroup::new`] but keeps `gens` exactly as given (already
    /// validated, deduplicated, identity-free). Needed when generator
    /// positions must line up with a parallel list, e.g. lifted images.
    pub(crate) fn new_prealigned(degree: usize, gens: Vec<Permutation>) -> PermGroup {
        debug_assert!(gens.iter().all(|g| g.degree() == degree && !g.is_identity()));
        Self::from_parts(degree, gens, None, None)
    }

    fn from_parts(
        degree: usize,
        gens: Vec<Permutation>,
        name: Option<String>,
        known_order: Option<u128>,
    ) -> PermGroup {
        PermGroup {
            inner: Arc::new(Inner {
                degree,
                gens,
                name,
                known_order,
                chain: OnceLock::new(),
                elements: OnceLock::new(),
            }),
        }
    }

    /// The trivial group on `degree` points.
    pub fn trivial(degree: usize) -> PermGroup {
        Self::from_parts(degree, Vec::new(), None, Some(1))
    }

    /// Same group with a display name attached.
    pub fn with_name(&self, name: &str) -> PermGroup {
        Self::from_parts(
            self.inner.degree,
            self.inner.gens.clone(),
            Some(name.to_string()),
            self.inner.known_order,
        )
    }

    /// Same group with its order declared up front; the chain build stops
    /// as soon as it accounts for this many elements. The declared value
    /// must never be less than the true order (an overestimate is harmless
    /// and is simply ignored); an underestimate would corrupt the chain.
    pub fn with_known_order(&self, order: u128) -> PermGroup {
        Self::from_parts(
            self.inner.degree,
            self.inner.gens.clone(),
            self.inner.name.clone(),
            Some(order),
        )
    }

    pub fn name(&self) -> Option<&str> {
        self.inner.name.as_deref()
    }

    pub fn degree(&self) -> usize {
        self.inner.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.inner.gens
    }

    pub fn identity(&self) -> Permutation {
        Permutation::identity(self.inner.degree)
    }

    pub fn is_trivial(&self) -> bool {
        self.inner.gens.is_empty()
    }

    pub(crate) fn chain(&self) -> &StabChain {
        self.inner.chain.get_or_init(|| {
            StabChain::build(self.inner.degree, &self.inner.gens, self.inner.known_order)
        })
    }

    pub fn order(&self) -> u128 {
        self.chain().order()
    }

    /// Base points of the stabilizer chain, 0-based.
    pub fn base(&self) -> Vec<u32> {
        self.chain().base()
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        if g.degree() != self.inner.degree {
            return false;
        }
        if g.is_identity() {
            return true;
        }
        self.chain().contains(g)
    }

    /// Write `g` as a word in the strong generators (indices into
    /// [`PermGroup::strong_generators`], applied left to right), or `None`
    /// when `g` lies outside the group. The identity yields the empty word.
    pub fn decompose(&self, g: &Permutation) -> Option<Vec<usize>> {
        if g.degree() != self.inner.degree {
            return None;
        }
        self.chain().decompose(g)
    }

    /// The strong generating set underlying word decompositions.
    pub fn strong_generators(&self) -> Vec<Permutation> {
        let chain = self.chain();
        (0..chain.strong_count())
            .map(|i| chain.strong_perm(i).clone())
            .collect()
    }

    /// Multiply out a decomposition word.
    pub fn evaluate_word(&self, word: &[usize]) -> Permutation {
        self.chain().evaluate_word(word)
    }

    /// Images of the strong generators under the homomorphism sending
    /// original generator `k` to `subst[k]`. The substitutes must share
    /// `out_degree` and must actually define a homomorphism for the result
    /// to be meaningful.
    pub(crate) fn strong_images(
        &self,
        subst: &[Permutation],
        out_degree: usize,
    ) -> Vec<Permutation> {
        assert_eq!(subst.len(), self.inner.gens.len());
        self.chain().strong_images(subst, out_degree)
    }

    /// Evaluate a decomposition word over substitute strong-generator
    /// images.
    pub(crate) fn evaluate_word_with(
        &self,
        word: &[usize],
        strong_images: &[Permutation],
        out_degree: usize,
    ) -> Permutation {
        self.chain().evaluate_word_with(word, strong_images, out_degree)
    }

    /// Every element, cached. Fails when the order exceeds
    /// [`ELEMENTS_CAP`].
    pub fn elements(&self) -> Result<Arc<Vec<Permutation>>> {
        if let Some(e) = self.inner.elements.get() {
            return Ok(e.clone());
        }
        let listed = self
            .chain()
            .elements_capped(ELEMENTS_CAP)
            .ok_or(Error::TooLarge { op: "element enumeration", order: self.order(), cap: ELEMENTS_CAP })?;
        Ok(self.inner.elements.get_or_init(|| Arc::new(listed)).clone())
    }

    /// Uniformly random element.
    pub fn random_element<R: Rng>(&self, rng: &mut R) -> Permutation {
        self.chain().random_element(rng)
    }

    /// Group generated by this group together with `extra`.
    pub fn closure_with(&self, extra: &[Permutation]) -> Result<PermGroup> {
        let mut gens = self.inner.gens.clone();
        gens.extend(extra.iter().cloned());
        PermGroup::new(self.inner.degree, gens)
    }

    pub fn is_abelian(&self) -> bool {
        let g = &self.inner.gens;
        for i in 0..g.len() {
            for j in (i + 1)..g.len() {
                if g[i].compose(&g[j]) != g[j].compose(&g[i]) {
                    return false;
                }
            }
        }
        true
    }

    /// Whether every generator of `self` lies in `other`.
    pub fn is_subgroup_of(&self, other: &PermGroup) -> bool {
        self.inner.degree == other.inner.degree
            && self.inner.gens.iter().all(|g| other.contains(g))
    }

    /// Whether the two groups are equal as sets of permutations.
    pub fn equal_group(&self, other: &PermGroup) -> bool {
        self.is_subgroup_of(other) && other.is_subgroup_of(self)
    }

    /// Whether conjugation by every generator of `self` maps `other` into
    /// itself.
    pub fn normalizes(&self, other: &PermGroup) -> bool {
        self.inner.gens.iter().all(|g| {
            other
                .inner
                .gens
                .iter()
                .all(|n| other.contains(&n.conjugated_by(g)))
        })
    }

    /// Whether `self` is a normal subgroup of `parent`.
    pub fn is_normal_in(&self, parent: &PermGroup) -> bool {
        self.is_subgroup_of(parent) && parent.normalizes(self)
    }

    /// The conjugate group `self^h = { h^-1 g h }`.
    pub fn conjugated_by(&self, h: &Permutation) -> Result<PermGroup> {
        let gens = self
            .inner
            .gens
            .iter()
            .map(|g| g.conjugated_by(h))
            .collect();
        PermGroup::new(self.inner.degree, gens)
    }
}

impl std::fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut d = f.debug_struct("PermGroup");
        d.field("degree", &self.inner.degree)
            .field("generators", &self.inner.gens);
        if let Some(n) = &self.inner.name {
            d.field("name", n);
        }
        if let Some(chain) = self.inner.chain.get() {
            d.field("order", &chain.order());
        }
        d.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str, d: usize) -> Permutation {
        Permutation::parse(s, d).unwrap()
    }

    fn group(degree: usize, gens: &[&str]) -> PermGroup {
        PermGroup::new(degree, gens.iter().map(|s| p(s, degree)).collect()).unwrap()
    }

    #[test]
    fn order_examples() {
        assert_eq!(group(5, &["(1,2,3,4,5)", "(1,2,3)"]).order(), 60);
        assert_eq!(PermGroup::new(4, vec![]).unwrap().order(), 1);
        assert_eq!(group(3, &["(1,2)", "(1,2,3)"]).order(), 6);
    }

    #[test]
    fn contains_examples() {
        let a5 = group(5, &["(1,2,3,4,5)", "(1,2,3)"]);
        assert!(a5.contains(&p("(1,2,3)", 5)));
        assert!(!a5.contains(&p("(1,2)", 5)));
        let trivial = PermGroup::trivial(3);
        assert!(trivial.contains(&Permutation::identity(3)));
        assert_eq!(
            trivial.decompose(&Permutation::identity(3)),
            Some(Vec::new())
        );
    }

    #[test]
    fn words_reevaluate_exactly() {
        let s4 = group(4, &["(1,2)", "(1,2,3,4)"]);
        assert_eq!(s4.order(), 24);
        for e in s4.elements().unwrap().iter() {
            let w = s4.decompose(e).unwrap();
            assert_eq!(&s4.evaluate_word(&w), e);
        }
    }

    #[test]
    fn contains_closed_under_products() {
        let g = group(6, &["(1,2,3)(4,5)", "(1,2)"]);
        let elems = g.elements().unwrap();
        for a in elems.iter().take(20) {
            for b in elems.iter().take(20) {
                assert!(g.contains(&a.compose(b)));
            }
        }
    }

    #[test]
    fn subgroup_and_normality() {
        let s3 = group(3, &["(1,2)", "(1,2,3)"]);
        let a3 = group(3, &["(1,2,3)"]);
        let c2 = group(3, &["(1,2)"]);
        assert!(a3.is_subgroup_of(&s3));
        assert!(a3.is_normal_in(&s3));
        assert!(c2.is_subgroup_of(&s3));
        assert!(!c2.is_normal_in(&s3));
        assert!(!s3.is_abelian());
        assert!(a3.is_abelian());
    }

    #[test]
    fn degree_mismatch_rejected() {
        let err = PermGroup::new(3, vec![p("(1,2,3,4)", 4)]).unwrap_err();
        assert!(matches!(err, Error::DegreeMismatch(3, 4)));
    }

    #[test]
    fn random_elements_lie_in_group_and_are_deterministic() {
        use rand::SeedableRng;
        let g = group(5, &["(1,2,3,4,5)", "(1,2,3)"]);
        let mut r1 = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut r2 = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let a = g.random_element(&mut r1);
            let b = g.random_element(&mut r2);
            assert_eq!(a, b);
            assert!(g.contains(&a));
        }
    }

    #[test]
    fn closure_and_conjugate() {
        let a3 = group(3, &["(1,2,3)"]);
        let s3 = a3.closure_with(&[p("(1,2)", 3)]).unwrap();
        assert_eq!(s3.order(), 6);
        let conj = a3.conjugated_by(&p("(1,2)", 3)).unwrap();
        assert!(conj.equal_group(&a3));
    }
}
