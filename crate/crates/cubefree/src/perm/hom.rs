//! Homomorphisms between permutation groups, defined on generators.

use std::sync::OnceLock;

use super::group::PermGroup;
use super::permutation::Permutation;
use crate::error::{Error, Result};

/// A homomorphism `domain → codomain`, determined by one image per domain
/// generator. Arbitrary elements are mapped by decomposing them into strong
/// generators of the domain and replaying the strong generators'
/// straight-line programs over the generator images.
///
/// Construction does not verify that the map extends to a homomorphism;
/// callers that assemble maps from unverified data should check them with a
/// constructive presentation of the domain (see the `presentations`
/// module).
#[derive(Clone)]
pub struct GroupHom {
    domain: PermGroup,
    codomain: PermGroup,
    gen_images: Vec<Permutation>,
    strong_images: std::sync::Arc<OnceLock<Vec<Permutation>>>,
    image_data: std::sync::Arc<OnceLock<(PermGroup, Vec<Permutation>)>>,
}

impl GroupHom {
    /// Map sending the k-th domain generator to `gen_images[k]`.
    pub fn new(
        domain: PermGroup,
        codomain: PermGroup,
        gen_images: Vec<Permutation>,
    ) -> Result<GroupHom> {
        if gen_images.len() != domain.generators().len() {
            return Err(Error::Internal(format!(
                "generator image count {} does not match generator count {}",
                gen_images.len(),
                domain.generators().len()
            )));
        }
        for im in &gen_images {
            if im.degree() != codomain.degree() {
                return Err(Error::DegreeMismatch(codomain.degree(), im.degree()));
            }
            if !codomain.contains(im) {
                return Err(Error::NotInGroup);
            }
        }
        Ok(GroupHom {
            domain,
            codomain,
            gen_images,
            strong_images: std::sync::Arc::new(OnceLock::new()),
            image_data: std::sync::Arc::new(OnceLock::new()),
        })
    }

    /// The identity map on `g`.
    pub fn identity(g: &PermGroup) -> GroupHom {
        GroupHom::new(g.clone(), g.clone(), g.generators().to_vec())
            .expect("generators lie in their own group")
    }

    pub fn domain(&self) -> &PermGroup {
        &self.domain
    }

    pub fn codomain(&self) -> &PermGroup {
        &self.codomain
    }

    pub fn gen_images(&self) -> &[Permutation] {
        &self.gen_images
    }

    fn strong_images(&self) -> &[Permutation] {
        self.strong_images.get_or_init(|| {
            self.domain
                .strong_images(&self.gen_images, self.codomain.degree())
        })
    }

    /// Image of `g`; fails when `g` is outside the domain.
    pub fn apply(&self, g: &Permutation) -> Result<Permutation> {
        let word = self.domain.decompose(g).ok_or(Error::NotInGroup)?;
        Ok(self
            .domain
            .evaluate_word_with(&word, self.strong_images(), self.codomain.degree()))
    }

    /// The image subgroup together with aligned preimage machinery.
    fn image_data(&self) -> &(PermGroup, Vec<Permutation>) {
        self.image_data.get_or_init(|| {
            // Keep only generator-image positions that survive PermGroup's
            // filtering (identity images and duplicates dropped), and carry
            // the matching domain generators alongside so the image group's
            // generator list and the lift list stay index-aligned.
            let mut img_gens: Vec<Permutation> = Vec::new();
            let mut lifts: Vec<Permutation> = Vec::new();
            for (k, im) in self.gen_images.iter().enumerate() {
                if !im.is_identity() && !img_gens.contains(im) {
                    img_gens.push(im.clone());
                    lifts.push(self.domain.generators()[k].clone());
                }
            }
            let image = PermGroup::new_prealigned(self.codomain.degree(), img_gens);
            (image, lifts)
        })
    }

    /// The image subgroup of the codomain.
    pub fn image(&self) -> PermGroup {
        self.image_data().0.clone()
    }

    /// Some preimage of `h`, or an error when `h` is not in the image.
    pub fn preimage(&self, h: &Permutation) -> Result<Permutation> {
        let (image, lifts) = self.image_data();
        let word = image.decompose(h).ok_or(Error::NotInGroup)?;
        let strong_lifts = image.strong_images(lifts, self.domain.degree());
        Ok(image.evaluate_word_with(&word, &strong_lifts, self.domain.degree()))
    }

    /// Composition `self` then `next` (domain of `next` must contain the
    /// image of `self`).
    pub fn then(&self, next: &GroupHom) -> Result<GroupHom> {
        let mut images = Vec::with_capacity(self.gen_images.len());
        for im in &self.gen_images {
            images.push(next.apply(im)?);
        }
        GroupHom::new(self.domain.clone(), next.codomain.clone(), images)
    }

    /// Inverse of a bijective homomorphism: requires equal orders and every
    /// codomain generator in the image. Returns the map sending each
    /// codomain generator to its preimage.
    pub fn inverse(&self) -> Result<GroupHom> {
        if self.domain.order() != self.codomain.order() {
            return Err(Error::Internal(
                "inverse requires equal domain and codomain orders".into(),
            ));
        }
        let mut images = Vec::with_capacity(self.codomain.generators().len());
        for g in self.codomain.generators() {
            images.push(self.preimage(g)?);
        }
        GroupHom::new(self.codomain.clone(), self.domain.clone(), images)
    }
}

impl std::fmt::Debug for GroupHom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GroupHom")
            .field("domain_degree", &self.domain.degree())
            .field("codomain_degree", &self.codomain.degree())
            .field("gen_images", &self.gen_images)
            .finish()
    }
}
