//! Reference oracle and instance generator.
//!
//! This module provides three independent services used to validate the
//! structured isomorphism machinery:
//!
//! * [`brute_force_isomorphism`] — a complete backtracking isomorphism test
//!   for small groups that never consults the structural code paths;
//! * [`scramble`] / [`scramble_regular`] — seeded generators of disguised
//!   copies of a group, each carrying its hidden isomorphism;
//! * [`build_catalog`] — a constructed library of pairwise non-isomorphic
//!   cube-free groups built from explicit recipes, persistable to disk.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grouptheory::{ensure_cubefree, OrderFactorization};
use crate::iso::psl2_standard;
use crate::modp::{gcd, mod_pow, singer_cycle, FpMatrix};
use crate::perm::{group_from_json, group_to_json, CosetQuotient, GroupHom, PermGroup, Permutation};

/// Default order cap for the brute-force oracle.
pub const ORACLE_ORDER_CAP: u128 = 2000;

/// Upper bound on the number of candidate recipes generated per order.
const MAX_RECIPES_PER_ORDER: usize = 4096;

// ---------------------------------------------------------------------------
// Brute-force isomorphism
// ---------------------------------------------------------------------------

/// Complete brute-force isomorphism test with the default order cap.
///
/// Returns a verified isomorphism when one exists and `None` when the groups
/// are genuinely non-isomorphic. Errors when either group exceeds
/// [`ORACLE_ORDER_CAP`].
pub fn brute_force_isomorphism(g: &PermGroup, h: &PermGroup) -> Result<Option<GroupHom>> {
    brute_force_isomorphism_limited(g, h, ORACLE_ORDER_CAP)
}

/// [`brute_force_isomorphism`] with a caller-chosen order cap.
///
/// The search assigns images to the generators of `g`, restricting candidates
/// to elements of `h` of the same order and pruning any partial assignment
/// that fails to extend to a homomorphism on the subgroup generated so far.
/// Every isomorphism restricts to such an assignment, so an exhausted search
/// proves non-isomorphism.
pub fn brute_force_isomorphism_limited(
    g: &PermGroup,
    h: &PermGroup,
    cap: u128,
) -> Result<Option<GroupHom>> {
    let worst = g.order().max(h.order());
    if worst > cap {
        return Err(Error::TooLarge {
            op: "brute-force isomorphism",
            order: worst,
            cap,
        });
    }
    if g.order() != h.order() {
        return Ok(None);
    }
    if !order_profiles_match(g, h)? {
        return Ok(None);
    }
    let gens: Vec<Permutation> = g.generators().to_vec();
    if gens.is_empty() {
        // Both groups are trivial.
        return Ok(Some(GroupHom::new(g.clone(), h.clone(), Vec::new())?));
    }

    // Candidate images grouped by element order, in deterministic
    // enumeration order.
    let mut by_order: HashMap<u128, Vec<Permutation>> = HashMap::new();
    for e in h.elements()?.iter() {
        by_order.entry(e.order()).or_default().push(e.clone());
    }

    // Orders of the prefix subgroups ⟨g_1..g_k⟩, used to decide whether a
    // partial assignment extends to a homomorphism of the prefix.
    let mut prefix_orders = Vec::with_capacity(gens.len());
    for k in 1..=gens.len() {
        prefix_orders.push(PermGroup::new(g.degree(), gens[..k].to_vec())?.order());
    }

    let mut images: Vec<Permutation> = Vec::new();
    let found = assign_images(
        &gens,
        &prefix_orders,
        &by_order,
        g.degree(),
        h.degree(),
        h.order(),
        &mut images,
    )?;
    match found {
        Some(images) => Ok(Some(GroupHom::new(g.clone(), h.clone(), images)?)),
        None => Ok(None),
    }
}

/// Whether the multisets of element orders coincide.
fn order_profiles_match(g: &PermGroup, h: &PermGroup) -> Result<bool> {
    let mut gp: BTreeMap<u128, usize> = BTreeMap::new();
    for e in g.elements()?.iter() {
        *gp.entry(e.order()).or_default() += 1;
    }
    let mut hp: BTreeMap<u128, usize> = BTreeMap::new();
    for e in h.elements()?.iter() {
        *hp.entry(e.order()).or_default() += 1;
    }
    Ok(gp == hp)
}

/// Order of the group generated by the paired permutations acting on the
/// disjoint union of the two point sets. The assignment g_i ↦ images[i]
/// extends to a homomorphism of ⟨gens⟩ exactly when this equals |⟨gens⟩|.
fn pairing_order(
    dg: usize,
    dh: usize,
    gens: &[Permutation],
    images: &[Permutation],
) -> Result<u128> {
    let mut joint = Vec::with_capacity(gens.len());
    for (x, y) in gens.iter().zip(images) {
        let mut im: Vec<u32> = Vec::with_capacity(dg + dh);
        im.extend((0..dg as u32).map(|pt| x.image(pt)));
        im.extend((0..dh as u32).map(|pt| y.image(pt) + dg as u32));
        joint.push(Permutation::from_images(im)?);
    }
    Ok(PermGroup::new(dg + dh, joint)?.order())
}

fn assign_images(
    gens: &[Permutation],
    prefix_orders: &[u128],
    by_order: &HashMap<u128, Vec<Permutation>>,
    dg: usize,
    dh: usize,
    h_order: u128,
    images: &mut Vec<Permutation>,
) -> Result<Option<Vec<Permutation>>> {
    let k = images.len();
    if k == gens.len() {
        // The assignment extends to a homomorphism on all of g (checked at
        // the last push); it is an isomorphism exactly when the images
        // generate the whole codomain.
        let image_group = PermGroup::new(dh, images.clone())?;
        if image_group.order() == h_order {
            return Ok(Some(images.clone()));
        }
        return Ok(None);
    }
    let Some(candidates) = by_order.get(&gens[k].order()) else {
        return Ok(None);
    };
    for cand in candidates {
        images.push(cand.clone());
        if pairing_order(dg, dh, &gens[..=k], images)? == prefix_orders[k] {
            if let Some(found) =
                assign_images(gens, prefix_orders, by_order, dg, dh, h_order, images)?
            {
                return Ok(Some(found));
            }
        }
        images.pop();
    }
    Ok(None)
}

// ---------------------------------------------------------------------------
// Scrambled instances
// ---------------------------------------------------------------------------

/// A disguised copy of a group together with the isomorphism that produced
/// it, kept for post-hoc verification.
#[derive(Clone, Debug)]
pub struct ScrambledInstance {
    /// The disguised group. Its name records the seed.
    pub group: PermGroup,
    /// Isomorphism from the original group onto the disguised copy.
    pub hidden: GroupHom,
    /// The seed that produced this instance.
    pub seed: u64,
}

/// Disguise `g` behind a seeded random generating set and a random
/// relabeling of its points. Deterministic for a fixed seed.
pub fn scramble(g: &PermGroup, seed: u64) -> Result<ScrambledInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let degree = g.degree();
    let target = g.order();

    // Draw random elements until they generate the whole group; fall back to
    // appending the original generators if the draws are unlucky.
    let want = g.generators().len().max(2);
    let mut new_gens: Vec<Permutation> = Vec::new();
    for _ in 0..want {
        new_gens.push(g.random_element(&mut rng));
    }
    while PermGroup::new(degree, new_gens.clone())?.order() != target {
        if new_gens.len() > want + 32 {
            new_gens.extend(g.generators().iter().cloned());
            break;
        }
        new_gens.push(g.random_element(&mut rng));
    }

    let sigma = random_point_permutation(degree, &mut rng);
    let scrambled: Vec<Permutation> = new_gens.iter().map(|x| x.conjugated_by(&sigma)).collect();
    let name = format!("scrambled-{}-seed-{}", target, seed);
    let group = PermGroup::new(degree, scrambled)?.with_name(&name);

    // Conjugation by sigma is an isomorphism of g onto the disguised copy.
    let hidden_images: Vec<Permutation> = g
        .generators()
        .iter()
        .map(|x| x.conjugated_by(&sigma))
        .collect();
    let hidden = GroupHom::new(g.clone(), group.clone(), hidden_images)?;
    Ok(ScrambledInstance {
        group,
        hidden,
        seed,
    })
}

/// Like [`scramble`], but first re-represents `g` by its regular action on
/// its own elements, so the disguised copy lives on |g| points and shares no
/// visible structure with the original representation.
pub fn scramble_regular(g: &PermGroup, seed: u64) -> Result<ScrambledInstance> {
    let trivial = PermGroup::trivial(g.degree());
    let q = CosetQuotient::regular(g, &trivial, Some(g.order()))?;
    let inner = scramble(q.group(), seed)?;
    let hidden = q.projection().then(&inner.hidden)?;
    Ok(ScrambledInstance {
        group: inner.group,
        hidden,
        seed,
    })
}

/// Uniformly random permutation of `degree` points (Fisher–Yates).
fn random_point_permutation<R: Rng>(degree: usize, rng: &mut R) -> Permutation {
    let mut im: Vec<u32> = (0..degree as u32).collect();
    for i in (1..degree).rev() {
        let j = rng.gen_range(0..=i);
        im.swap(i, j);
    }
    Permutation::from_images(im).expect("shuffled images form a permutation")
}

// ---------------------------------------------------------------------------
// Small split metacyclic representations
// ---------------------------------------------------------------------------

/// Faithful permutation representation of C_a ⋉ C_b for squarefree coprime
/// `a` and `b`, on one p-cycle per prime of `a` and per prime of `b`.
///
/// The action is given per prime p of `b` as a multiplier exponent e_p
/// (missing primes act trivially): the acting generator conjugates the
/// order-p rotation to its e_p-th power. The joint action must be a faithful
/// action of C_a; callers with an unfaithful action must split off the
/// kernel as a direct factor first.
pub fn squarefree_representation(a: u64, b: u64, action: &[(u64, u64)]) -> Result<PermGroup> {
    if a == 0 || b == 0 {
        return Err(Error::Internal("orders must be positive".into()));
    }
    let fa = OrderFactorization::of(a as u128);
    let fb = OrderFactorization::of(b as u128);
    if fa.factors.iter().any(|&(_, e)| e > 1) {
        return Err(Error::Internal(format!("{a} is not squarefree")));
    }
    if fb.factors.iter().any(|&(_, e)| e > 1) {
        return Err(Error::Internal(format!("{b} is not squarefree")));
    }
    if gcd(a, b) != 1 {
        return Err(Error::Internal(format!("{a} and {b} are not coprime")));
    }

    // Validate the action data and compute the order of the joint action.
    let mut exponent_of: BTreeMap<u64, u64> = BTreeMap::new();
    for &(p, e) in action {
        if b % p != 0 || !fb.factors.iter().any(|&(q, _)| q == p) {
            return Err(Error::Internal(format!("{p} is not a prime divisor of {b}")));
        }
        if e == 0 || e >= p {
            return Err(Error::Internal(format!(
                "exponent {e} is not a unit modulo {p}"
            )));
        }
        if exponent_of.insert(p, e).is_some() {
            return Err(Error::Internal(format!("duplicate action entry for {p}")));
        }
    }
    let mut action_order: u64 = 1;
    for (&p, &e) in &exponent_of {
        if mod_pow(e, a, p) != 1 {
            return Err(Error::Internal(format!(
                "exponent {e} modulo {p} does not define an action of a cyclic group of order {a}"
            )));
        }
        let mut d = 1;
        let mut x = e;
        while x != 1 {
            x = (x * e) % p;
            d += 1;
        }
        action_order = crate::modp::lcm(action_order, d);
    }
    if action_order != a && a != 1 {
        return Err(Error::NotFaithful);
    }

    // Lay out one block of p points per prime, acting primes first.
    let mut degree = 0usize;
    let mut a_blocks: Vec<(usize, u64)> = Vec::new();
    for &(q, _) in &fa.factors {
        a_blocks.push((degree, q));
        degree += q as usize;
    }
    let mut b_blocks: Vec<(usize, u64)> = Vec::new();
    for &(p, _) in &fb.factors {
        b_blocks.push((degree, p));
        degree += p as usize;
    }
    if degree == 0 {
        return Ok(PermGroup::trivial(1));
    }

    // Acting generator: a q-cycle on each a-block, the multiplier on each
    // b-block.
    let mut w: Vec<u32> = (0..degree as u32).collect();
    for &(start, q) in &a_blocks {
        for i in 0..q as usize {
            w[start + i] = (start + (i + 1) % q as usize) as u32;
        }
    }
    for &(start, p) in &b_blocks {
        let e = exponent_of.get(&p).copied().unwrap_or(1);
        for i in 0..p as usize {
            w[start + i] = (start + ((i as u64 * e) % p) as usize) as u32;
        }
    }

    // Normal generator: the product of the +1 rotations on the b-blocks.
    let mut v: Vec<u32> = (0..degree as u32).collect();
    for &(start, p) in &b_blocks {
        for i in 0..p as usize {
            v[start + i] = (start + (i + 1) % p as usize) as u32;
        }
    }

    let gens = vec![Permutation::from_images(w)?, Permutation::from_images(v)?];
    let g = PermGroup::new(degree, gens)?;
    let expected = (a as u128) * (b as u128);
    if g.order() != expected {
        return Err(Error::Internal(format!(
            "split metacyclic representation has order {} instead of {}",
            g.order(),
            expected
        )));
    }
    Ok(g)
}

// ---------------------------------------------------------------------------
// Catalog recipes
// ---------------------------------------------------------------------------

/// One abelian block of a catalog recipe, together with the action of the
/// cyclic top group on it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SocleFactor {
    /// Cyclic block Z_modulus; the acting generator multiplies by `exponent`.
    Cyclic { modulus: u64, exponent: u64 },
    /// Elementary abelian block (Z_p)²; the acting generator applies
    /// `matrix` (row-major) to row vectors.
    Plane { p: u64, matrix: [u64; 4] },
}

/// A constructive description of a catalog group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Recipe {
    /// Direct product of cycles of the given lengths on disjoint points.
    Abelian { cycles: Vec<u64> },
    /// Cyclic group of order `top` acting on a product of abelian blocks.
    CyclicExtension { top: u64, factors: Vec<SocleFactor> },
    /// PSL(2, p) on p+1 points, times a solvable factor on disjoint points.
    SimpleProduct { p: u64, rest: Box<Recipe> },
}

/// Whether an order's catalog is provably complete.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum CatalogStatus {
    /// Every group of this order appears (orders all of whose groups are
    /// cyclic admit exactly one entry).
    Certified,
    /// The constructed families need not exhaust the order.
    Sample,
}

impl std::fmt::Display for CatalogStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CatalogStatus::Certified => write!(f, "certified"),
            CatalogStatus::Sample => write!(f, "sample"),
        }
    }
}

/// One catalog group: its order, position among the groups of that order,
/// the recipe that builds it, and the built permutation group.
#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub order: u64,
    pub index: usize,
    pub recipe: Recipe,
    pub status: CatalogStatus,
    pub group: PermGroup,
}

/// Build the permutation group a recipe describes. Deterministic: the same
/// recipe always yields the same generators on the same points.
pub fn realize(recipe: &Recipe) -> Result<PermGroup> {
    match recipe {
        Recipe::Abelian { cycles } => {
            if cycles.is_empty() {
                return Ok(PermGroup::trivial(1));
            }
            let degree: usize = cycles.iter().map(|&c| c as usize).sum();
            let mut gens = Vec::with_capacity(cycles.len());
            let mut start = 0usize;
            let mut expected: u128 = 1;
            for &c in cycles {
                if c == 0 {
                    return Err(Error::Internal("cycle length must be positive".into()));
                }
                let mut im: Vec<u32> = (0..degree as u32).collect();
                for i in 0..c as usize {
                    im[start + i] = (start + (i + 1) % c as usize) as u32;
                }
                gens.push(Permutation::from_images(im)?);
                start += c as usize;
                expected *= c as u128;
            }
            let g = PermGroup::new(degree, gens)?;
            if g.order() != expected {
                return Err(Error::Internal(format!(
                    "cycle product has order {} instead of {}",
                    g.order(),
                    expected
                )));
            }
            Ok(g)
        }
        Recipe::CyclicExtension { top, factors } => realize_cyclic_extension(*top, factors),
        Recipe::SimpleProduct { p, rest } => {
            let s = psl2_standard(*p)?;
            let r = realize(rest)?;
            if r.order() == 1 {
                return Ok(s);
            }
            direct_product(&s, &r)
        }
    }
}

fn realize_cyclic_extension(top: u64, factors: &[SocleFactor]) -> Result<PermGroup> {
    if top < 2 {
        return Err(Error::Internal("cyclic top must have order at least 2".into()));
    }
    let ft = OrderFactorization::of(top as u128);

    // Lay out the blocks: one cycle of length q^e per prime power of the
    // top order, then one block per socle factor.
    let mut degree = 0usize;
    let mut top_blocks: Vec<(usize, usize)> = Vec::new();
    for &(q, e) in &ft.factors {
        let len = (q as usize).pow(e);
        top_blocks.push((degree, len));
        degree += len;
    }
    let mut factor_blocks: Vec<(usize, &SocleFactor)> = Vec::new();
    for f in factors {
        let len = match f {
            SocleFactor::Cyclic { modulus, .. } => *modulus as usize,
            SocleFactor::Plane { p, .. } => (*p as usize) * (*p as usize),
        };
        factor_blocks.push((degree, f));
        degree += len;
    }

    // The acting generator: prime-power cycles on its own blocks, the
    // prescribed action on each socle block.
    let mut w: Vec<u32> = (0..degree as u32).collect();
    for &(start, len) in &top_blocks {
        for i in 0..len {
            w[start + i] = (start + (i + 1) % len) as u32;
        }
    }
    let mut expected: u128 = top as u128;
    let mut socle_gens: Vec<Permutation> = Vec::new();
    for &(start, f) in &factor_blocks {
        match f {
            SocleFactor::Cyclic { modulus, exponent } => {
                let mm = *modulus;
                let e = *exponent;
                if e == 0 || e >= mm || gcd(e, mm) != 1 {
                    return Err(Error::Internal(format!(
                        "exponent {e} is not a unit modulo {mm}"
                    )));
                }
                if mod_pow(e, top, mm) != 1 {
                    return Err(Error::Internal(format!(
                        "exponent {e} modulo {mm} has order not dividing {top}"
                    )));
                }
                for i in 0..mm as usize {
                    w[start + i] = (start + ((i as u64 * e) % mm) as usize) as u32;
                }
                let mut im: Vec<u32> = (0..degree as u32).collect();
                for i in 0..mm as usize {
                    im[start + i] = (start + (i + 1) % mm as usize) as u32;
                }
                socle_gens.push(Permutation::from_images(im)?);
                expected *= mm as u128;
            }
            SocleFactor::Plane { p, matrix } => {
                let pp = *p;
                let m = FpMatrix::mat2(
                    pp,
                    [[matrix[0], matrix[1]], [matrix[2], matrix[3]]],
                );
                if m.det() == 0 {
                    return Err(Error::Internal("plane action matrix is singular".into()));
                }
                if !m.pow(top).is_identity() {
                    return Err(Error::Internal(format!(
                        "plane action matrix has order not dividing {top}"
                    )));
                }
                let n = pp as usize;
                for x in 0..n {
                    for y in 0..n {
                        let v = m.apply_row(&[x as u64, y as u64]);
                        w[start + x + n * y] = (start + v[0] as usize + n * v[1] as usize) as u32;
                    }
                }
                for unit in 0..2usize {
                    let mut im: Vec<u32> = (0..degree as u32).collect();
                    for x in 0..n {
                        for y in 0..n {
                            let (nx, ny) = if unit == 0 {
                                ((x + 1) % n, y)
                            } else {
                                (x, (y + 1) % n)
                            };
                            im[start + x + n * y] = (start + nx + n * ny) as u32;
                        }
                    }
                    socle_gens.push(Permutation::from_images(im)?);
                }
                expected *= (pp as u128) * (pp as u128);
            }
        }
    }

    let mut gens = vec![Permutation::from_images(w)?];
    gens.extend(socle_gens);
    let g = PermGroup::new(degree, gens)?;
    if g.order() != expected {
        return Err(Error::Internal(format!(
            "cyclic extension has order {} instead of {}",
            g.order(),
            expected
        )));
    }
    Ok(g)
}

/// Direct product on the disjoint union of the two point sets.
fn direct_product(a: &PermGroup, b: &PermGroup) -> Result<PermGroup> {
    let da = a.degree();
    let db = b.degree();
    let total = da + db;
    let mut gens = Vec::with_capacity(a.generators().len() + b.generators().len());
    for x in a.generators() {
        gens.push(x.padded(total));
    }
    for y in b.generators() {
        let mut im: Vec<u32> = (0..total as u32).collect();
        for pt in 0..db as u32 {
            im[da + pt as usize] = da as u32 + y.image(pt);
        }
        gens.push(Permutation::from_images(im)?);
    }
    PermGroup::new(total, gens)
}

// ---------------------------------------------------------------------------
// Catalog construction
// ---------------------------------------------------------------------------

/// Euler totient from a factorization.
fn euler_phi(f: &OrderFactorization) -> u64 {
    let mut phi: u64 = 1;
    for &(p, e) in &f.factors {
        phi *= p.pow(e - 1) * (p - 1);
    }
    phi
}

/// Whether every group of order `n` is cyclic (n coprime to φ(n)).
pub fn is_cyclic_order(n: u64) -> bool {
    let f = OrderFactorization::of(n as u128);
    gcd(n, euler_phi(&f)) == 1
}

fn divisors(n: u64) -> Vec<u64> {
    (1..=n).filter(|d| n % d == 0).collect()
}

/// Units modulo `modulus` whose multiplicative order divides `m`, ascending.
fn units_order_dividing(modulus: u64, m: u64) -> Vec<u64> {
    (1..modulus)
        .filter(|&u| gcd(u, modulus) == 1 && mod_pow(u, m, modulus) == 1)
        .collect()
}

fn matrix_entries(m: &FpMatrix) -> [u64; 4] {
    [m.a[0], m.a[1], m.a[2], m.a[3]]
}

/// Per-prime action options for the block structure of `rest` under a cyclic
/// top group of order `m`. Each option is the list of socle factors the
/// prime contributes.
fn prime_action_options(p: u64, e: u32, m: u64) -> Result<Vec<Vec<SocleFactor>>> {
    let mut opts: Vec<Vec<SocleFactor>> = Vec::new();
    if e == 1 {
        for u in units_order_dividing(p, m) {
            opts.push(vec![SocleFactor::Cyclic {
                modulus: p,
                exponent: u,
            }]);
        }
        return Ok(opts);
    }

    // Exponent-2 part: a cyclic block of order p², or a split pair of
    // order-p blocks, or an irreducible plane action.
    let pp = p * p;
    for u in units_order_dividing(pp, m) {
        opts.push(vec![SocleFactor::Cyclic {
            modulus: pp,
            exponent: u,
        }]);
    }
    let us = units_order_dividing(p, m);
    for (i, &u1) in us.iter().enumerate() {
        for &u2 in &us[i..] {
            opts.push(vec![
                SocleFactor::Cyclic {
                    modulus: p,
                    exponent: u1,
                },
                SocleFactor::Cyclic {
                    modulus: p,
                    exponent: u2,
                },
            ]);
        }
    }
    if p == 2 {
        // GL(2, 2) is small enough to enumerate directly.
        for bits in 0..16u64 {
            let rows = [[bits & 1, (bits >> 1) & 1], [(bits >> 2) & 1, (bits >> 3) & 1]];
            let mat = FpMatrix::mat2(2, rows);
            if mat.det() == 0 || mat.is_identity() {
                continue;
            }
            let ord = mat.order()?;
            if m % ord == 0 {
                opts.push(vec![SocleFactor::Plane {
                    p: 2,
                    matrix: matrix_entries(&mat),
                }]);
            }
        }
    } else {
        // Every semisimple cyclic action that is not diagonalizable over F_p
        // is conjugate to a power of a fixed Singer generator.
        let s = singer_cycle(p)?.s;
        let full = p * p - 1;
        for j in 1..full {
            let d = full / gcd(j, full);
            if m % d != 0 {
                continue;
            }
            if (p - 1) % d == 0 {
                // Diagonalizable over F_p; covered by the split options.
                continue;
            }
            let mj = s.pow(j);
            opts.push(vec![SocleFactor::Plane {
                p,
                matrix: matrix_entries(&mj),
            }]);
        }
    }
    Ok(opts)
}

fn is_trivial_action(factors: &[SocleFactor]) -> bool {
    factors.iter().all(|f| match f {
        SocleFactor::Cyclic { exponent, .. } => *exponent == 1,
        SocleFactor::Plane { p, matrix } => {
            matrix[0] % p == 1 && matrix[1] % p == 0 && matrix[2] % p == 0 && matrix[3] % p == 1
        }
    })
}

/// All candidate recipes for groups of cube-free order `n`, in a fixed
/// deterministic order. Isomorphic duplicates are expected; the catalog
/// builder removes them with the brute-force oracle.
fn candidate_recipes(n: u64) -> Result<Vec<Recipe>> {
    if n == 1 {
        return Ok(vec![Recipe::Abelian { cycles: vec![1] }]);
    }
    let f = ensure_cubefree(n as u128)?;
    let mut out: Vec<Recipe> = Vec::new();

    // Abelian types: per prime with exponent 2, choose the cyclic block or
    // the split pair.
    let doubles: Vec<u64> = f
        .factors
        .iter()
        .filter(|&&(_, e)| e == 2)
        .map(|&(p, _)| p)
        .collect();
    for mask in 0..(1usize << doubles.len()) {
        let mut cycles: Vec<u64> = Vec::new();
        let mut di = 0usize;
        for &(p, e) in &f.factors {
            if e == 1 {
                cycles.push(p);
            } else {
                if mask & (1 << di) != 0 {
                    cycles.push(p * p);
                } else {
                    cycles.push(p);
                    cycles.push(p);
                }
                di += 1;
            }
        }
        cycles.sort_unstable_by(|x, y| y.cmp(x));
        out.push(Recipe::Abelian { cycles });
    }

    // Split extensions by a cyclic top group.
    for m in divisors(n) {
        if m < 2 || m == n {
            continue;
        }
        let rest = n / m;
        let fr = OrderFactorization::of(rest as u128);
        let mut per_prime: Vec<Vec<Vec<SocleFactor>>> = Vec::new();
        for &(p, e) in &fr.factors {
            per_prime.push(prime_action_options(p, e, m)?);
        }
        let mut combos: Vec<Vec<SocleFactor>> = vec![Vec::new()];
        for opts in &per_prime {
            let mut next = Vec::new();
            'grow: for base in &combos {
                for opt in opts {
                    let mut row = base.clone();
                    row.extend(opt.iter().cloned());
                    next.push(row);
                    if next.len() > MAX_RECIPES_PER_ORDER {
                        break 'grow;
                    }
                }
            }
            combos = next;
        }
        for factors in combos {
            if is_trivial_action(&factors) {
                // Direct products with a cyclic factor are already covered
                // by the abelian family or by other splits.
                continue;
            }
            out.push(Recipe::CyclicExtension { top: m, factors });
            if out.len() > MAX_RECIPES_PER_ORDER {
                break;
            }
        }
        if out.len() > MAX_RECIPES_PER_ORDER {
            break;
        }
    }

    // Direct products with a simple factor of cube-free order.
    for &(sp, size) in &[(5u64, 60u64), (11, 660), (13, 1092)] {
        if n % size == 0 {
            for r in candidate_recipes(n / size)? {
                if matches!(r, Recipe::SimpleProduct { .. }) {
                    continue;
                }
                out.push(Recipe::SimpleProduct {
                    p: sp,
                    rest: Box::new(r),
                });
            }
        }
    }

    out.truncate(MAX_RECIPES_PER_ORDER);
    Ok(out)
}

/// Build a catalog of pairwise non-isomorphic groups for each given
/// cube-free order. Entries of equal order are certified mutually
/// non-isomorphic by the brute-force oracle.
pub fn build_catalog(orders: &[u64]) -> Result<Vec<CatalogEntry>> {
    let mut out: Vec<CatalogEntry> = Vec::new();
    for &n in orders {
        ensure_cubefree(n as u128)?;
        let status = if is_cyclic_order(n) {
            CatalogStatus::Certified
        } else {
            CatalogStatus::Sample
        };
        let mut kept: Vec<CatalogEntry> = Vec::new();
        let mut seen: HashSet<String> = HashSet::new();
        for recipe in candidate_recipes(n)? {
            let group = realize(&recipe)?;
            if group.order() != n as u128 {
                return Err(Error::Internal(format!(
                    "recipe for order {n} produced order {}",
                    group.order()
                )));
            }
            if !seen.insert(group_to_json(&group)) {
                continue;
            }
            let mut duplicate = false;
            for e in &kept {
                if brute_force_isomorphism(&e.group, &group)?.is_some() {
                    duplicate = true;
                    break;
                }
            }
            if !duplicate {
                let index = kept.len();
                let name = format!("catalog-{n}-{index}");
                kept.push(CatalogEntry {
                    order: n,
                    index,
                    recipe,
                    status: status.clone(),
                    group: group.with_name(&name),
                });
            }
        }
        out.extend(kept);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Catalog persistence
// ---------------------------------------------------------------------------

/// One row of the persisted catalog manifest.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CatalogManifestRow {
    pub order: u64,
    pub index: usize,
    pub file: String,
    pub recipe: Recipe,
    pub status: CatalogStatus,
}

fn io_err(context: &str, e: std::io::Error) -> Error {
    Error::GroupFile(format!("{context}: {e}"))
}

/// Persist a catalog as one JSON group file per entry plus a manifest.
pub fn save_catalog(dir: &Path, entries: &[CatalogEntry]) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| io_err("create catalog directory", e))?;
    let mut rows = Vec::with_capacity(entries.len());
    for e in entries {
        let file = format!("g{:04}-{:02}.json", e.order, e.index);
        std::fs::write(dir.join(&file), group_to_json(&e.group))
            .map_err(|err| io_err("write group file", err))?;
        rows.push(CatalogManifestRow {
            order: e.order,
            index: e.index,
            file,
            recipe: e.recipe.clone(),
            status: e.status.clone(),
        });
    }
    let manifest = serde_json::to_string_pretty(&rows).expect("manifest serializes");
    std::fs::write(dir.join("manifest.json"), manifest)
        .map_err(|e| io_err("write manifest", e))?;
    Ok(())
}

/// Load a catalog persisted by [`save_catalog`].
pub fn load_catalog(dir: &Path) -> Result<Vec<CatalogEntry>> {
    let text = std::fs::read_to_string(dir.join("manifest.json"))
        .map_err(|e| io_err("read manifest", e))?;
    let rows: Vec<CatalogManifestRow> =
        serde_json::from_str(&text).map_err(|e| Error::GroupFile(e.to_string()))?;
    let mut out = Vec::with_capacity(rows.len());
    for row in rows {
        let group_text = std::fs::read_to_string(dir.join(&row.file))
            .map_err(|e| io_err("read group file", e))?;
        let group = group_from_json(&group_text)?;
        out.push(CatalogEntry {
            order: row.order,
            index: row.index,
            recipe: row.recipe,
            status: row.status,
            group,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grouptheory::is_solvable;
    use crate::structure::extends_to_isomorphism;

    fn grp(degree: usize, gens: &[&str]) -> PermGroup {
        let parsed: Vec<Permutation> = gens
            .iter()
            .map(|t| Permutation::parse(t, degree).unwrap())
            .collect();
        PermGroup::new(degree, parsed).unwrap()
    }

    fn assert_verified(hom: &GroupHom) {
        let images: Vec<Permutation> = hom
            .domain()
            .generators()
            .iter()
            .map(|x| hom.apply(x).unwrap())
            .collect();
        assert!(extends_to_isomorphism(hom.domain(), hom.codomain(), &images).unwrap());
    }

    #[test]
    fn oracle_rejects_groups_beyond_the_cap() {
        let a5 = grp(5, &["(1,2,3,4,5)", "(3,4,5)"]);
        let err = brute_force_isomorphism_limited(&a5, &a5, 50).unwrap_err();
        assert!(matches!(err, Error::TooLarge { cap: 50, order: 60, .. }));
    }

    #[test]
    fn cyclic6_and_symmetric3_are_not_isomorphic() {
        let c6 = grp(5, &["(1,2)(3,4,5)"]);
        let s3 = grp(3, &["(1,2,3)", "(1,2)"]);
        assert!(brute_force_isomorphism(&c6, &s3).unwrap().is_none());
        assert!(brute_force_isomorphism(&s3, &c6).unwrap().is_none());
    }

    #[test]
    fn cyclic6_and_c2_times_c3_are_isomorphic() {
        let c6 = grp(5, &["(1,2)(3,4,5)"]);
        let c2c3 = grp(5, &["(1,2)", "(3,4,5)"]);
        let hom = brute_force_isomorphism(&c6, &c2c3).unwrap().unwrap();
        assert_verified(&hom);
        let back = brute_force_isomorphism(&c2c3, &c6).unwrap().unwrap();
        assert_verified(&back);
    }

    #[test]
    fn trivial_groups_are_isomorphic() {
        let t1 = PermGroup::trivial(1);
        let t2 = PermGroup::trivial(4);
        assert!(brute_force_isomorphism(&t1, &t2).unwrap().is_some());
    }

    #[test]
    fn catalog_order_12_has_five_pairwise_distinct_groups() {
        let entries = build_catalog(&[12]).unwrap();
        assert_eq!(entries.len(), 5);
        for e in &entries {
            assert_eq!(e.group.order(), 12);
            assert_eq!(e.status, CatalogStatus::Sample);
        }
        for i in 0..entries.len() {
            for j in (i + 1)..entries.len() {
                assert!(
                    brute_force_isomorphism(&entries[i].group, &entries[j].group)
                        .unwrap()
                        .is_none(),
                    "entries {i} and {j} of order 12 must not be isomorphic"
                );
            }
        }
        // The expected mix: 2 abelian, 3 non-abelian.
        let abelian = entries.iter().filter(|e| e.group.is_abelian()).count();
        assert_eq!(abelian, 2);
    }

    #[test]
    fn catalog_order_75_has_three_groups() {
        let entries = build_catalog(&[75]).unwrap();
        assert_eq!(entries.len(), 3);
        let nonabelian = entries.iter().filter(|e| !e.group.is_abelian()).count();
        assert_eq!(nonabelian, 1);
    }

    #[test]
    fn catalog_order_60_contains_the_simple_group() {
        let entries = build_catalog(&[60]).unwrap();
        let simple: Vec<&CatalogEntry> =
            entries.iter().filter(|e| !is_solvable(&e.group)).collect();
        assert_eq!(simple.len(), 1);
        let a5 = grp(5, &["(1,2,3,4,5)", "(3,4,5)"]);
        assert!(brute_force_isomorphism(&simple[0].group, &a5)
            .unwrap()
            .is_some());
    }

    #[test]
    fn catalog_entries_rebuild_from_their_recipes() {
        let entries = build_catalog(&[12, 20]).unwrap();
        for e in &entries {
            ensure_cubefree(e.group.order()).unwrap();
            let rebuilt = realize(&e.recipe).unwrap();
            assert_eq!(rebuilt.degree(), e.group.degree());
            assert_eq!(rebuilt.generators(), e.group.generators());
        }
    }

    #[test]
    fn certification_marks_exactly_the_cyclic_orders() {
        let entries = build_catalog(&[15, 33, 12]).unwrap();
        let of_15: Vec<_> = entries.iter().filter(|e| e.order == 15).collect();
        assert_eq!(of_15.len(), 1);
        assert_eq!(of_15[0].status, CatalogStatus::Certified);
        let of_33: Vec<_> = entries.iter().filter(|e| e.order == 33).collect();
        assert_eq!(of_33.len(), 1);
        assert_eq!(of_33[0].status, CatalogStatus::Certified);
        assert!(entries
            .iter()
            .filter(|e| e.order == 12)
            .all(|e| e.status == CatalogStatus::Sample));
    }

    #[test]
    fn catalog_round_trips_through_disk() {
        let entries = build_catalog(&[12, 15]).unwrap();
        let dir = std::env::temp_dir().join(format!("catalog-test-{}", std::process::id()));
        save_catalog(&dir, &entries).unwrap();
        let loaded = load_catalog(&dir).unwrap();
        std::fs::remove_dir_all(&dir).unwrap();
        assert_eq!(loaded.len(), entries.len());
        for (a, b) in entries.iter().zip(&loaded) {
            assert_eq!(a.order, b.order);
            assert_eq!(a.index, b.index);
            assert_eq!(a.recipe, b.recipe);
            assert_eq!(a.status, b.status);
            assert_eq!(a.group.generators(), b.group.generators());
        }
    }

    #[test]
    fn squarefree_representation_builds_s3_on_five_points() {
        let g = squarefree_representation(2, 3, &[(3, 2)]).unwrap();
        assert_eq!(g.degree(), 5);
        assert_eq!(g.order(), 6);
        assert!(!g.is_abelian());
        let s3 = grp(3, &["(1,2,3)", "(1,2)"]);
        assert!(brute_force_isomorphism(&g, &s3).unwrap().is_some());
    }

    #[test]
    fn squarefree_representation_builds_c15_on_eight_points() {
        let g = squarefree_representation(1, 15, &[]).unwrap();
        assert_eq!(g.degree(), 8);
        assert_eq!(g.order(), 15);
        assert!(g.elements().unwrap().iter().any(|e| e.order() == 15));
    }

    #[test]
    fn squarefree_representation_builds_order21_on_ten_points() {
        let g = squarefree_representation(3, 7, &[(7, 2)]).unwrap();
        assert_eq!(g.degree(), 10);
        assert_eq!(g.order(), 21);
        assert!(!g.is_abelian());
    }

    #[test]
    fn squarefree_representation_rejects_bad_input() {
        assert!(squarefree_representation(4, 3, &[]).is_err());
        assert!(squarefree_representation(2, 9, &[]).is_err());
        assert!(squarefree_representation(2, 6, &[]).is_err());
        assert!(squarefree_representation(2, 5, &[(5, 3)]).is_err());
        // Unfaithful action: the order-4 part of the acting group is dead.
        let err = squarefree_representation(6, 5, &[(5, 4)]).unwrap_err();
        assert!(matches!(err, Error::NotFaithful));
    }

    #[test]
    fn scramble_is_deterministic_and_round_trips() {
        let a5 = grp(5, &["(1,2,3,4,5)", "(3,4,5)"]);
        let s1 = scramble(&a5, 42).unwrap();
        let s2 = scramble(&a5, 42).unwrap();
        assert_eq!(s1.group.generators(), s2.group.generators());
        assert_eq!(s1.seed, 42);
        assert_eq!(s1.group.order(), 60);
        ensure_cubefree(s1.group.order()).unwrap();
        assert!(s1.group.name().unwrap().contains("seed-42"));
        assert_verified(&s1.hidden);
        let found = brute_force_isomorphism(&a5, &s1.group).unwrap().unwrap();
        assert_verified(&found);
        let other = scramble(&a5, 43).unwrap();
        assert_ne!(s1.group.generators(), other.group.generators());
    }

    #[test]
    fn scramble_regular_moves_to_the_regular_representation() {
        let d6 = grp(6, &["(1,2,3,4,5,6)", "(2,6)(3,5)"]);
        assert_eq!(d6.order(), 12);
        let s = scramble_regular(&d6, 9).unwrap();
        assert_eq!(s.group.degree(), 12);
        assert_eq!(s.group.order(), 12);
        assert_verified(&s.hidden);
        assert!(brute_force_isomorphism(&d6, &s.group).unwrap().is_some());
    }

    #[test]
    fn scrambled_catalog_entries_round_trip_through_the_oracle() {
        // Fifty groups drawn from small cube-free orders; each is scrambled
        // and must be recovered by the oracle as isomorphic to its source.
        let orders = [6, 10, 12, 14, 15, 18, 20, 21, 22, 26, 30, 33, 34, 38, 39, 42, 44, 50];
        let entries = build_catalog(&orders).unwrap();
        assert!(entries.len() >= 50, "catalog has {} entries", entries.len());
        for (i, e) in entries.iter().take(50).enumerate() {
            let s = scramble(&e.group, 1000 + i as u64).unwrap();
            assert_eq!(s.group.order(), e.group.order());
            ensure_cubefree(s.group.order()).unwrap();
            assert_verified(&s.hidden);
            let found = brute_force_isomorphism(&e.group, &s.group).unwrap();
            assert!(found.is_some(), "entry {}-{} failed to round-trip", e.order, e.index);
        }
    }

    #[test]
    fn oracle_is_consistent_under_composition() {
        let a5 = grp(5, &["(1,2,3,4,5)", "(3,4,5)"]);
        let s1 = scramble(&a5, 11).unwrap();
        let s2 = scramble(&a5, 22).unwrap();
        let f = brute_force_isomorphism(&a5, &s1.group).unwrap().unwrap();
        let g = brute_force_isomorphism(&s1.group, &s2.group).unwrap().unwrap();
        let composed = f.then(&g).unwrap();
        assert_verified(&composed);
        assert!(brute_force_isomorphism(&a5, &s2.group).unwrap().is_some());
    }
}
