//! Structure theory for finite solvable permutation groups: complements to
//! abelian normal subgroups (optionally invariant under a prescribed set of
//! automorphisms), direct complements, Sylow towers with abelian factors,
//! the socle, the Frattini subgroup, and the decomposition of a
//! Frattini-free solvable group as a semidirect product of its socle with
//! a group of semisimple automorphisms.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grouptheory::{
    center, centralizer, chief_series, ensure_cubefree, factor_order, is_elementary_abelian,
    is_solvable, minimal_normal_subgroups, sylow_subgroup, OrderFactorization,
};
use crate::modp::{mod_inv, solve_linear_system, FpMatrix, GLProductElement};
use crate::perm::{CosetQuotient, GroupHom, PermGroup, Permutation};
use crate::presentations::{constructive_presentation, constructive_presentation_via};

/// A finite list of automorphisms of a fixed group, used to demand
/// invariance of computed subgroups ("act on `G` through Ω").
pub struct OmegaAction {
    autos: Vec<GroupHom>,
}

impl OmegaAction {
    /// The empty action: no invariance constraints at all.
    pub fn empty() -> OmegaAction {
        OmegaAction { autos: Vec::new() }
    }

    /// Builds an action from explicit generator images. Each image list
    /// must describe a bijective endomorphism of `g`; this is verified.
    pub fn new(g: &PermGroup, image_lists: Vec<Vec<Permutation>>) -> Result<OmegaAction> {
        let mut autos = Vec::with_capacity(image_lists.len());
        for images in image_lists {
            if !extends_to_isomorphism(g, g, &images)? {
                return Err(Error::Internal(
                    "generator images do not define an automorphism".into(),
                ));
            }
            autos.push(GroupHom::new(g.clone(), g.clone(), images)?);
        }
        Ok(OmegaAction { autos })
    }

    /// The action of the given permutations by conjugation. The conjugators
    /// must normalize `g` (they need not lie in it), so that each one
    /// induces an automorphism.
    pub fn by_conjugation(g: &PermGroup, conjugators: &[Permutation]) -> Result<OmegaAction> {
        let mut autos = Vec::with_capacity(conjugators.len());
        for t in conjugators {
            if t.degree() != g.degree() {
                return Err(Error::DegreeMismatch(g.degree(), t.degree()));
            }
            let images: Vec<Permutation> =
                g.generators().iter().map(|x| x.conjugated_by(t)).collect();
            if images.iter().any(|im| !g.contains(im)) {
                return Err(Error::NotNormal);
            }
            autos.push(GroupHom::new(g.clone(), g.clone(), images)?);
        }
        Ok(OmegaAction { autos })
    }

    /// Number of automorphisms in the action.
    pub fn len(&self) -> usize {
        self.autos.len()
    }

    /// Whether the action is empty.
    pub fn is_empty(&self) -> bool {
        self.autos.is_empty()
    }

    /// The automorphisms as homomorphisms.
    pub fn autos(&self) -> &[GroupHom] {
        &self.autos
    }

    /// Image of `x` under the `i`-th automorphism.
    pub fn apply(&self, i: usize, x: &Permutation) -> Result<Permutation> {
        let a = self
            .autos
            .get(i)
            .ok_or_else(|| Error::Internal(format!("action index {i} out of range")))?;
        a.apply(x)
    }
}

/// Whether mapping the generators of `g` to `images` inside `h` extends to
/// an isomorphism g → h. Decided without enumerating elements: the paired
/// permutations acting on the disjoint union of the two point sets generate
/// a group whose order equals |g| exactly when the assignment respects all
/// relations; surjectivity is checked via the order of the image closure.
pub(crate) fn extends_to_isomorphism(
    g: &PermGroup,
    h: &PermGroup,
    images: &[Permutation],
) -> Result<bool> {
    if images.len() != g.generators().len() {
        return Err(Error::Internal(
            "one image per generator is required".into(),
        ));
    }
    for im in images {
        if im.degree() != h.degree() {
            return Err(Error::DegreeMismatch(h.degree(), im.degree()));
        }
        if !h.contains(im) {
            return Ok(false);
        }
    }
    if g.order() != h.order() {
        return Ok(false);
    }
    let image_group = PermGroup::new(h.degree(), images.to_vec())?;
    if image_group.order() != h.order() {
        return Ok(false);
    }
    let dg = g.degree();
    let dh = h.degree();
    let mut joint = Vec::with_capacity(images.len());
    for (x, y) in g.generators().iter().zip(images) {
        let mut im: Vec<u32> = Vec::with_capacity(dg + dh);
        im.extend((0..dg as u32).map(|pt| x.image(pt)));
        im.extend((0..dh as u32).map(|pt| y.image(pt) + dg as u32));
        joint.push(Permutation::from_images(im)?);
    }
    let paired = PermGroup::new(dg + dh, joint)?;
    Ok(paired.order() == g.order())
}

/// Witness for a semidirect decomposition `G = K ⋉ M`.
///
/// `nu[k]` is the correcting element of `M` attached to the `k`-th symbol
/// of a constructive presentation of `G/M`, and `gens[k]` is the corrected
/// preimage; the complement is `k = ⟨gens⟩` with `|k|·|M| = |G|` and
/// `k ∩ M = 1`.
pub struct ComplementCertificate {
    /// Per-symbol corrections, elements of the normal subgroup.
    pub nu: Vec<Permutation>,
    /// Corrected symbol preimages, aligned with `nu`.
    pub gens: Vec<Permutation>,
    /// The complement they generate.
    pub k: PermGroup,
}

/// One primary component of a finite abelian group, with explicit
/// coordinates. Components of order p or p² are supported, which covers
/// every abelian group of cube-free exponent structure: ranks are 1
/// (cyclic of order p or p²) or 2 (elementary of order p²).
pub(crate) struct PrimaryComponent {
    pub(crate) p: u64,
    /// Coordinate modulus: p for exponent-p components, p² for cyclic ones.
    pub(crate) modulus: u64,
    pub(crate) rank: usize,
    pub(crate) basis: Vec<Permutation>,
    /// Coordinates of every element of the component.
    table: HashMap<Permutation, Vec<u64>>,
    /// Power exponent realizing the projection of the ambient abelian
    /// group onto this component.
    proj: i64,
}

impl PrimaryComponent {
    /// Coordinates of the projection of an ambient-group element.
    pub(crate) fn coords(&self, x: &Permutation) -> Result<Vec<u64>> {
        let projected = x.pow(self.proj);
        self.table
            .get(&projected)
            .cloned()
            .ok_or_else(|| Error::Internal("element projects outside its primary component".into()))
    }

    /// The component element with the given coordinates.
    pub(crate) fn element_of(&self, coords: &[u64]) -> Permutation {
        let mut acc = Permutation::identity(self.basis[0].degree());
        for (b, &e) in self.basis.iter().zip(coords) {
            acc = acc.compose(&b.pow((e % self.modulus) as i64));
        }
        acc
    }

    /// Matrix (column convention: column `c` holds the coordinates of the
    /// image of `basis[c]`) of a linear map given by its basis images.
    pub(crate) fn matrix_of_images(&self, images: &[Permutation]) -> Result<Vec<Vec<u64>>> {
        let mut mat = vec![vec![0u64; self.rank]; self.rank];
        for (c, im) in images.iter().enumerate() {
            let co = self.coords(im)?;
            for (r, row) in mat.iter_mut().enumerate() {
                row[c] = co[r];
            }
        }
        Ok(mat)
    }
}

/// Splits a nontrivial abelian group into primary components with
/// coordinate tables. Fails with `BadModulus` when some primary part has
/// order p³ or larger.
pub(crate) fn primary_components(m: &PermGroup) -> Result<Vec<PrimaryComponent>> {
    let f = OrderFactorization::of(m.order());
    let mut out = Vec::new();
    for &(p, a) in &f.factors {
        if a > 2 {
            return Err(Error::BadModulus((p as u128).pow(a.min(3)) as u64));
        }
        let pa = (p as u128).pow(a);
        let cof = m.order() / pa;
        let u = mod_inv((cof % pa) as u64, pa as u64)
            .ok_or_else(|| Error::Internal("primary cofactor is not invertible".into()))?;
        let proj = ((cof * u as u128) % m.order()) as i64;
        let proj_gens: Vec<Permutation> =
            m.generators().iter().map(|x| x.pow(proj)).collect();
        let comp = PermGroup::new(m.degree(), proj_gens)?;
        if comp.order() != pa {
            return Err(Error::Internal(
                "primary projection produced the wrong order".into(),
            ));
        }
        let elems = comp.elements()?;
        let mut table = HashMap::new();
        let (modulus, rank, basis) = if a == 1 {
            let b = elems
                .iter()
                .find(|x| !x.is_identity())
                .expect("nontrivial component")
                .clone();
            let mut acc = Permutation::identity(m.degree());
            for e in 0..p {
                table.insert(acc.clone(), vec![e]);
                acc = acc.compose(&b);
            }
            (p, 1usize, vec![b])
        } else if let Some(b) = elems.iter().find(|x| x.order() == (p * p) as u128) {
            let b = b.clone();
            let mut acc = Permutation::identity(m.degree());
            for e in 0..p * p {
                table.insert(acc.clone(), vec![e]);
                acc = acc.compose(&b);
            }
            (p * p, 1usize, vec![b])
        } else {
            let b1 = elems
                .iter()
                .find(|x| !x.is_identity())
                .expect("nontrivial component")
                .clone();
            let b1_powers: Vec<Permutation> = (0..p as i64).map(|e| b1.pow(e)).collect();
            let b2 = elems
                .iter()
                .find(|x| !b1_powers.contains(x))
                .ok_or_else(|| Error::Internal("rank-two component has no second basis element".into()))?
                .clone();
            for e1 in 0..p {
                for e2 in 0..p {
                    table.insert(b1.pow(e1 as i64).compose(&b2.pow(e2 as i64)), vec![e1, e2]);
                }
            }
            if table.len() != (p * p) as usize {
                return Err(Error::Internal("dependent basis in rank-two component".into()));
            }
            (p, 2usize, vec![b1, b2])
        };
        out.push(PrimaryComponent {
            p,
            modulus,
            rank,
            basis,
            table,
            proj,
        });
    }
    Ok(out)
}

/// Adds the letter contributions of a word over corrected generators to a
/// homogeneous row block over one primary component.
///
/// When every generator `xφ` is replaced by `xφ·ν_x` with `ν_x` in the
/// abelian normal subgroup, the value of a word `w` picks up, next to
/// `w(φ)`, one conjugated copy of some `ν` per letter: a positive letter at
/// position `i` contributes `ν` conjugated by the suffix product after `i`,
/// a negative letter the inverse of `ν` conjugated by the suffix product
/// from `i` on. The conjugation matrices are accumulated into `rows`
/// (`rank` rows, `n·rank` columns in symbol-major order).
fn accumulate_word_rows(
    pc: &PrimaryComponent,
    phis: &[Permutation],
    word: &[i32],
    rows: &mut [Vec<u64>],
) -> Result<()> {
    let r = word.len();
    if r == 0 {
        return Ok(());
    }
    let degree = phis[0].degree();
    let fs: Vec<Permutation> = word
        .iter()
        .map(|&l| {
            let j = l.unsigned_abs() as usize - 1;
            if l > 0 {
                phis[j].clone()
            } else {
                phis[j].inverse()
            }
        })
        .collect();
    let mut suf = vec![Permutation::identity(degree); r + 1];
    for i in (0..r).rev() {
        suf[i] = fs[i].compose(&suf[i + 1]);
    }
    for (i, &l) in word.iter().enumerate() {
        let j = l.unsigned_abs() as usize - 1;
        let (negate, conj) = if l > 0 {
            (false, &suf[i + 1])
        } else {
            (true, &suf[i])
        };
        let images: Vec<Permutation> =
            pc.basis.iter().map(|b| b.conjugated_by(conj)).collect();
        let t = pc.matrix_of_images(&images)?;
        for (ri, row) in rows.iter_mut().enumerate() {
            for c in 0..pc.rank {
                let col = j * pc.rank + c;
                let val = if negate {
                    (pc.modulus - t[ri][c] % pc.modulus) % pc.modulus
                } else {
                    t[ri][c] % pc.modulus
                };
                row[col] = (row[col] + val) % pc.modulus;
            }
        }
    }
    Ok(())
}

/// Finds a complement to an abelian normal subgroup `m` of `g` that is
/// invariant under every automorphism in `action`, or reports that none
/// exists.
///
/// The cohomological route: fix a constructive presentation of `g/m`,
/// write the candidate complement generators as `xφ·ν_x` with unknown
/// corrections `ν_x ∈ m`, and translate "all relators hold" plus "the
/// generated subgroup is invariant" into one linear system per primary
/// component of `m`. A solution assembles a complement; unsolvability of
/// any component proves there is no invariant complement.
pub fn omega_complement_abelian(
    g: &PermGroup,
    m: &PermGroup,
    action: &OmegaAction,
) -> Result<Option<ComplementCertificate>> {
    omega_complement_abelian_via(g, m, action, None)
}

/// As [`omega_complement_abelian`], but reusing an already constructed
/// faithful realization of `g/m`.
pub(crate) fn omega_complement_abelian_via(
    g: &PermGroup,
    m: &PermGroup,
    action: &OmegaAction,
    quot: Option<&CosetQuotient>,
) -> Result<Option<ComplementCertificate>> {
    if !m.is_subgroup_of(g) || !m.is_normal_in(g) {
        return Err(Error::NotNormal);
    }
    if !m.is_abelian() {
        return Err(Error::NotAbelian);
    }
    for a in action.autos() {
        for x in m.generators() {
            let y = a.apply(x)?;
            if !m.contains(&y) {
                return Err(Error::NotInvariant);
            }
        }
    }
    if m.is_trivial() {
        return Ok(Some(ComplementCertificate {
            nu: Vec::new(),
            gens: g.generators().to_vec(),
            k: g.clone(),
        }));
    }

    let cp = match quot {
        None => constructive_presentation(g, m)?,
        Some(q) => constructive_presentation_via(g, m, Some(q))?,
    };
    let n = cp.generator_count();
    let phis: Vec<Permutation> = cp.generators().to_vec();
    let comps = primary_components(m)?;

    let mut solutions: Vec<Vec<u64>> = Vec::with_capacity(comps.len());
    for pc in &comps {
        let cols = n * pc.rank;
        let mut a_rows: Vec<Vec<u64>> = Vec::new();
        let mut b: Vec<u64> = Vec::new();
        for w in cp.relators() {
            let mut rows = vec![vec![0u64; cols]; pc.rank];
            accumulate_word_rows(pc, &phis, w, &mut rows)?;
            let value = cp.phi_word(w)?;
            let co = pc.coords(&value)?;
            for (ri, row) in rows.into_iter().enumerate() {
                a_rows.push(row);
                b.push((pc.modulus - co[ri] % pc.modulus) % pc.modulus);
            }
        }
        for auto in action.autos() {
            for k in 0..n {
                let target = auto.apply(&phis[k])?;
                let u_word = cp.psi_word(&target)?;
                let mut rows = vec![vec![0u64; cols]; pc.rank];
                accumulate_word_rows(pc, &phis, &u_word, &mut rows)?;
                let theta_images: Vec<Permutation> = pc
                    .basis
                    .iter()
                    .map(|bb| auto.apply(bb))
                    .collect::<Result<_>>()?;
                let theta = pc.matrix_of_images(&theta_images)?;
                for (ri, row) in rows.iter_mut().enumerate() {
                    for c in 0..pc.rank {
                        let col = k * pc.rank + c;
                        row[col] =
                            (row[col] + pc.modulus - theta[ri][c] % pc.modulus) % pc.modulus;
                    }
                }
                let u_value = cp.phi_word(&u_word)?;
                let m0 = u_value.inverse().compose(&target);
                if !m.contains(&m0) {
                    return Err(Error::Internal(
                        "automorphism does not descend to the quotient presentation".into(),
                    ));
                }
                let co = pc.coords(&m0)?;
                for (ri, row) in rows.into_iter().enumerate() {
                    a_rows.push(row);
                    b.push(co[ri] % pc.modulus);
                }
            }
        }
        match solve_linear_system(&a_rows, &b, pc.modulus)? {
            None => return Ok(None),
            Some(x) => solutions.push(x),
        }
    }

    let mut nu: Vec<Permutation> = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = g.identity();
        for (pc, x) in comps.iter().zip(&solutions) {
            acc = acc.compose(&pc.element_of(&x[k * pc.rank..(k + 1) * pc.rank]));
        }
        nu.push(acc);
    }
    let gens: Vec<Permutation> = phis.iter().zip(&nu).map(|(x, v)| x.compose(v)).collect();
    let k_group = PermGroup::new(g.degree(), gens.clone())?;
    if k_group.order() != g.order() / m.order() {
        return Err(Error::Internal(
            "complement candidate has the wrong order".into(),
        ));
    }
    for a in action.autos() {
        for x in &gens {
            if !k_group.contains(&a.apply(x)?) {
                return Err(Error::Internal(
                    "complement candidate is not invariant under the action".into(),
                ));
            }
        }
    }
    Ok(Some(ComplementCertificate {
        nu,
        gens,
        k: k_group,
    }))
}

/// Finds `K ≤ G` with `G = K × V/…` relative to `U`: a subgroup `K`
/// containing `U` with `K ∩ V = U` and `K·V = G`, equivalently a direct
/// complement to `V/U` in `G/U`, or reports that none exists. `U` and `V`
/// must be normal in `G` with `U ≤ V`.
pub fn direct_complement(
    g: &PermGroup,
    u: &PermGroup,
    v: &PermGroup,
) -> Result<Option<PermGroup>> {
    direct_complement_under(g, u, v, g.generators())
}

/// As [`direct_complement`], but the complement is additionally required
/// to be invariant under conjugation by the given permutations (which must
/// normalize `G`, `U`, and `V`).
pub(crate) fn direct_complement_under(
    g: &PermGroup,
    u: &PermGroup,
    v: &PermGroup,
    conjugators: &[Permutation],
) -> Result<Option<PermGroup>> {
    if !u.is_subgroup_of(v) || !v.is_subgroup_of(g) {
        return Err(Error::IncompatibleChain(
            "direct complement needs a chain U ≤ V ≤ G".into(),
        ));
    }
    if !u.is_normal_in(g) || !v.is_normal_in(g) {
        return Err(Error::NotNormal);
    }
    for t in conjugators {
        let fixes = |s: &PermGroup| {
            s.generators()
                .iter()
                .all(|x| s.contains(&x.conjugated_by(t)))
        };
        if !fixes(g) || !fixes(v) || !fixes(u) {
            return Err(Error::NotInvariant);
        }
    }
    if !u.is_trivial() {
        let q = CosetQuotient::regular(g, u, None)?;
        let vq_gens: Vec<Permutation> = v
            .generators()
            .iter()
            .map(|x| q.project(x))
            .collect::<Result<_>>()?;
        let vq = PermGroup::new(q.group().degree(), vq_gens)?;
        let conjq: Vec<Permutation> = conjugators
            .iter()
            .map(|t| q.project(t))
            .collect::<Result<_>>()?;
        let trivial = PermGroup::trivial(q.group().degree());
        return match direct_complement_under(q.group(), &trivial, &vq, &conjq)? {
            None => Ok(None),
            Some(kq) => {
                let mut gens = u.generators().to_vec();
                for x in kq.generators() {
                    gens.push(q.section(x)?);
                }
                let k = PermGroup::new(g.degree(), gens)?;
                if k.order() != kq.order() * u.order() {
                    return Err(Error::Internal(
                        "complement preimage has the wrong order".into(),
                    ));
                }
                Ok(Some(k))
            }
        };
    }

    // U = 1. A direct complement must centralize V, so it lives in
    // C = C_G(V); it exists precisely when C·V = G and the center of V
    // (which is C ∩ V) has a complement in C invariant under conjugation
    // by the prescribed normalizers.
    let c = centralizer(g, v)?;
    let joint = c.closure_with(v.generators())?;
    if joint.order() != g.order() {
        return Ok(None);
    }
    let z = center(v);
    let action = OmegaAction::by_conjugation(&c, conjugators)?;
    match omega_complement_abelian(&c, &z, &action)? {
        None => Ok(None),
        Some(cert) => {
            if cert.k.order() * v.order() != g.order() {
                return Err(Error::Internal(
                    "direct complement has the wrong order".into(),
                ));
            }
            Ok(Some(cert.k))
        }
    }
}

/// Shape of a Sylow tower of a solvable group of cube-free order.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum TowerShape {
    /// Odd order: factor primes ascend from the left.
    #[serde(rename = "odd")]
    Odd,
    /// Even order with non-normal or cyclic Sylow 2-subgroup: the
    /// 2-factor acts from the top (leftmost position).
    #[serde(rename = "even-top-2")]
    EvenTop2,
    /// Even order with a normal elementary abelian Sylow 2-subgroup of
    /// order 4: the 2-factor sits at the bottom (rightmost position).
    #[serde(rename = "even-bottom-2")]
    EvenBottom2,
}

impl std::fmt::Display for TowerShape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            TowerShape::Odd => "odd",
            TowerShape::EvenTop2 => "even-top-2",
            TowerShape::EvenBottom2 => "even-bottom-2",
        };
        f.write_str(s)
    }
}

/// A Sylow tower with abelian factors: `L = Y_1 ⋉ (Y_2 ⋉ (… ⋉ Y_r))`,
/// where `Y_i` is a Sylow `p_i`-subgroup of `L` and every tail product
/// `Y_i·Y_{i+1}⋯Y_r` is normal in `L`.
pub struct SylowTower {
    /// Tower factors left to right: `(p_i, Y_i)`.
    pub factors: Vec<(u64, PermGroup)>,
    /// Position policy of the 2-factor.
    pub shape: TowerShape,
}

impl SylowTower {
    /// The factor primes, left to right.
    pub fn primes(&self) -> Vec<u64> {
        self.factors.iter().map(|(p, _)| *p).collect()
    }

    /// Product of the factor orders.
    pub fn order(&self) -> u128 {
        self.factors.iter().map(|(_, y)| y.order()).product()
    }
}

/// Computes a Sylow tower with abelian factors for a solvable group of
/// cube-free order.
///
/// The factor ordering is canonical: for odd order the primes ascend left
/// to right; for even order the 2-factor is leftmost, except when the
/// Sylow 2-subgroup is normal and elementary abelian of order 4, in which
/// case it is rightmost and the odd primes ascend before it.
pub fn sylow_tower(l: &PermGroup) -> Result<SylowTower> {
    if !is_solvable(l) {
        return Err(Error::NotSolvable);
    }
    ensure_cubefree(l.order())?;
    if l.is_trivial() {
        return Ok(SylowTower {
            factors: Vec::new(),
            shape: TowerShape::Odd,
        });
    }
    let f = factor_order(l);
    let shape = if l.order() % 2 != 0 {
        TowerShape::Odd
    } else {
        let p2 = sylow_subgroup(l, 2)?;
        if p2.is_normal_in(l) && p2.order() == 4 && is_elementary_abelian(&p2, 2) {
            TowerShape::EvenBottom2
        } else {
            TowerShape::EvenTop2
        }
    };

    // Rightmost factors are peeled first: descending odd primes, with the
    // 2-factor first (EvenBottom2) or last (EvenTop2).
    let mut peel: Vec<u64> = f.primes().into_iter().filter(|&p| p != 2).collect();
    peel.sort_unstable();
    peel.reverse();
    match shape {
        TowerShape::Odd => {}
        TowerShape::EvenTop2 => peel.push(2),
        TowerShape::EvenBottom2 => peel.insert(0, 2),
    }

    let mut rest = l.clone();
    let mut peeled: Vec<(u64, PermGroup)> = Vec::new();
    for &p in &peel {
        let y = sylow_subgroup(&rest, p)?;
        if !y.is_abelian() {
            return Err(Error::NoSylowTower);
        }
        if !y.is_normal_in(&rest) {
            return Err(Error::NoSylowTower);
        }
        let cert = omega_complement_abelian(&rest, &y, &OmegaAction::empty())?.ok_or_else(
            || Error::Internal("normal Sylow subgroup of coprime index has no complement".into()),
        )?;
        peeled.push((p, y));
        rest = cert.k;
    }
    if rest.order() != 1 {
        return Err(Error::Internal("tower peeling left a remainder".into()));
    }
    peeled.reverse();
    Ok(SylowTower {
        factors: peeled,
        shape,
    })
}

/// The socle of a solvable group: the product of all minimal normal
/// subgroups, assembled along a chief series by splitting off an invariant
/// direct factor at each layer that permits one.
pub fn socle(l: &PermGroup) -> Result<PermGroup> {
    if !is_solvable(l) {
        return Err(Error::NotSolvable);
    }
    if l.is_trivial() {
        return Ok(l.clone());
    }
    let cs = chief_series(l)?;
    let mut gens: Vec<Permutation> = cs.terms[1].generators().to_vec();
    let trivial = PermGroup::trivial(l.degree());
    for i in 2..cs.terms.len() {
        if let Some(s) =
            direct_complement_under(&cs.terms[i], &trivial, &cs.terms[i - 1], l.generators())?
        {
            gens.extend(s.generators().iter().cloned());
        }
    }
    PermGroup::new(l.degree(), gens)
}

/// A faithful realization of `l/n` of small degree: regular cosets when
/// the index is small, otherwise (when `l` has a Sylow tower) the joint
/// action on the coset spaces of the Hall-augmented covers `⟨Hall_{p'}, n⟩`
/// for the primes `p` of the index, whose combined degree is at most the
/// sum of the squares of those primes.
pub(crate) fn economical_quotient(l: &PermGroup, n: &PermGroup) -> Result<CosetQuotient> {
    const COMFORTABLE_REGULAR_INDEX: u128 = 2_000;
    let index = l.order() / n.order();
    if index <= COMFORTABLE_REGULAR_INDEX {
        return CosetQuotient::regular(l, n, None);
    }
    if let Ok(tower) = sylow_tower(l) {
        let idx = OrderFactorization::of(index);
        let mut covers: Vec<PermGroup> = Vec::new();
        let mut buildable = true;
        for p in idx.primes() {
            let mut gens: Vec<Permutation> = n.generators().to_vec();
            for (q, y) in &tower.factors {
                if *q != p {
                    gens.extend(y.generators().iter().cloned());
                }
            }
            match PermGroup::new(l.degree(), gens) {
                Ok(cover) => covers.push(cover),
                Err(_) => {
                    buildable = false;
                    break;
                }
            }
        }
        if buildable {
            if let Ok(q) = CosetQuotient::on_coset_spaces(l, n, &covers) {
                return Ok(q);
            }
        }
    }
    CosetQuotient::regular(l, n, None)
}

/// The Frattini subgroup of a solvable group: the intersection of all
/// maximal subgroups, computed without enumerating them. A minimal normal
/// subgroup `A` either has a complement (then it avoids the Frattini
/// subgroup and contributes nothing that the other candidates miss) or has
/// none, in which case `A ≤ Φ(L)` and `Φ(L)/A = Φ(L/A)` reduces the
/// computation to the quotient. If every minimal normal subgroup is
/// complemented the Frattini subgroup is trivial.
pub fn frattini(l: &PermGroup) -> Result<PermGroup> {
    const ORDER_CAP: u128 = 10_000_000;
    if l.order() > ORDER_CAP {
        return Err(Error::TooLarge {
            op: "frattini",
            order: l.order(),
            cap: ORDER_CAP,
        });
    }
    if !is_solvable(l) {
        return Err(Error::NotSolvable);
    }
    let phi = frattini_inner(l)?;
    if !phi.is_trivial() {
        // The quotient by the Frattini subgroup must be Frattini-free;
        // recompute there as a consistency check.
        let q = economical_quotient(l, &phi)?;
        if !frattini_inner(q.group())?.is_trivial() {
            return Err(Error::Internal(
                "quotient by the computed Frattini subgroup is not Frattini-free".into(),
            ));
        }
    }
    Ok(phi)
}

fn frattini_inner(l: &PermGroup) -> Result<PermGroup> {
    if l.is_trivial() {
        return Ok(l.clone());
    }
    for a in minimal_normal_subgroups(l)? {
        let quot = economical_quotient(l, &a)?;
        let compl = omega_complement_abelian_via(l, &a, &OmegaAction::empty(), Some(&quot))?;
        if compl.is_none() {
            let sub_phi = frattini_inner(quot.group())?;
            let mut gens = a.generators().to_vec();
            for x in sub_phi.generators() {
                gens.push(quot.section(x)?);
            }
            return PermGroup::new(l.degree(), gens);
        }
    }
    Ok(PermGroup::trivial(l.degree()))
}

/// The conjugation action of a complement on the socle, expressed as
/// matrices over the primary factors: one `GL₁(p)` entry per prime-order
/// factor and one `GL₂(p)` entry per elementary factor of order p².
pub struct ConjugationRep {
    pub(crate) comps: Vec<PrimaryComponent>,
}

impl ConjugationRep {
    /// The factor frame: `(p, dim)` per factor, dimension-1 factors first,
    /// primes ascending within each dimension.
    pub fn frame(&self) -> Vec<(u64, u8)> {
        self.comps.iter().map(|c| (c.p, c.rank as u8)).collect()
    }

    /// Number of matrix factors.
    pub fn factor_count(&self) -> usize {
        self.comps.len()
    }

    /// The matrix tuple of conjugation by `g` on the socle factors.
    /// Matrices act on coordinate rows from the right, matching the
    /// right-action convention for permutations.
    pub fn matrix_of(&self, g: &Permutation) -> Result<GLProductElement> {
        let mut mats = Vec::with_capacity(self.comps.len());
        for comp in &self.comps {
            let images: Vec<Permutation> =
                comp.basis.iter().map(|b| b.conjugated_by(g)).collect();
            let t = comp.matrix_of_images(&images)?;
            let m = match comp.rank {
                1 => FpMatrix::unit(comp.p, t[0][0]),
                2 => FpMatrix::mat2(
                    comp.p,
                    [[t[0][0], t[1][0]], [t[0][1], t[1][1]]],
                ),
                _ => unreachable!("primary components have rank 1 or 2"),
            };
            mats.push(m);
        }
        Ok(GLProductElement { comps: mats })
    }
}

/// The canonical decomposition of a Frattini-free solvable group of
/// cube-free order: `L = K ⋉ (B × C)` where `B × C` is the socle split
/// into its prime-order factors (`B`) and its elementary factors of order
/// p² (`C`), and `K` acts faithfully on the socle by conjugation.
pub struct FrattiniFreeDecomposition {
    /// A complement to the socle.
    pub k: PermGroup,
    /// Product of the prime-order socle factors.
    pub b: PermGroup,
    /// Product of the rank-two socle factors.
    pub c: PermGroup,
    /// The full socle, `b × c`.
    pub socle: PermGroup,
    /// Primes of the `b` factors, ascending.
    pub b_primes: Vec<u64>,
    /// Primes of the `c` factors, ascending.
    pub c_primes: Vec<u64>,
    /// The faithful conjugation action of `k` on the socle.
    pub rep: ConjugationRep,
}

/// Serializable summary of a Frattini-free decomposition.
#[derive(Serialize, Deserialize)]
pub struct DecompositionDocument {
    pub order: u64,
    pub socle_order: u64,
    pub complement_order: u64,
    pub b_primes: Vec<u64>,
    pub c_primes: Vec<u64>,
    /// Complement generators in cycle notation.
    pub complement_generators: Vec<String>,
    /// Per complement generator, per socle factor, the matrix entries in
    /// row-major order (one entry for dimension 1, four for dimension 2).
    pub matrices: Vec<Vec<Vec<u64>>>,
}

impl FrattiniFreeDecomposition {
    /// Summary document for serialization.
    pub fn document(&self) -> Result<DecompositionDocument> {
        let mut matrices = Vec::new();
        let mut gens = Vec::new();
        for x in self.k.generators() {
            gens.push(format!("{x}"));
            let gl = self.rep.matrix_of(x)?;
            matrices.push(
                gl.comps
                    .iter()
                    .map(|m| {
                        let d = m.dim as usize;
                        (0..d * d).map(|i| m.a[i / d * 2 + i % d]).collect()
                    })
                    .collect(),
            );
        }
        Ok(DecompositionDocument {
            order: (self.k.order() * self.socle.order()) as u64,
            socle_order: self.socle.order() as u64,
            complement_order: self.k.order() as u64,
            b_primes: self.b_primes.clone(),
            c_primes: self.c_primes.clone(),
            complement_generators: gens,
            matrices,
        })
    }

    /// JSON form of [`FrattiniFreeDecomposition::document`].
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&self.document()?)
            .map_err(|e| Error::Internal(format!("serialization failed: {e}")))
    }
}

/// Decomposes a Frattini-free solvable group of cube-free order as
/// `K ⋉ (B × C)` with `K` acting faithfully on the socle `B × C`.
pub fn frattini_free_decomposition(l: &PermGroup) -> Result<FrattiniFreeDecomposition> {
    if !is_solvable(l) {
        return Err(Error::NotSolvable);
    }
    ensure_cubefree(l.order())?;
    if !frattini(l)?.is_trivial() {
        return Err(Error::NotFrattiniFree);
    }
    let soc = socle(l)?;
    if !soc.is_abelian() {
        return Err(Error::Internal("socle of a solvable group must be abelian".into()));
    }
    let cert = omega_complement_abelian(l, &soc, &OmegaAction::empty())?.ok_or_else(|| {
        Error::Internal("socle of a Frattini-free solvable group must be complemented".into())
    })?;
    let comps = primary_components(&soc)?;
    let mut b_comps = Vec::new();
    let mut c_comps = Vec::new();
    for comp in comps {
        match comp.rank {
            1 if comp.modulus == comp.p => b_comps.push(comp),
            2 => c_comps.push(comp),
            _ => {
                return Err(Error::Internal(
                    "socle must be elementary abelian in every primary component".into(),
                ))
            }
        }
    }
    let b_primes: Vec<u64> = b_comps.iter().map(|c| c.p).collect();
    let c_primes: Vec<u64> = c_comps.iter().map(|c| c.p).collect();
    let b_gens: Vec<Permutation> = b_comps.iter().flat_map(|c| c.basis.clone()).collect();
    let c_gens: Vec<Permutation> = c_comps.iter().flat_map(|c| c.basis.clone()).collect();
    let b = PermGroup::new(l.degree(), b_gens)?;
    let c = PermGroup::new(l.degree(), c_gens)?;
    if b.order() * c.order() != soc.order() {
        return Err(Error::Internal("socle factor split lost elements".into()));
    }
    let mut all_comps = b_comps;
    all_comps.extend(c_comps);
    let rep = ConjugationRep { comps: all_comps };
    let k = cert.k;
    for x in k.elements()?.iter() {
        if !x.is_identity() && rep.matrix_of(x)?.is_identity() {
            return Err(Error::NotFaithful);
        }
    }
    Ok(FrattiniFreeDecomposition {
        k,
        b,
        c,
        socle: soc,
        b_primes,
        c_primes,
        rep,
    })
}
