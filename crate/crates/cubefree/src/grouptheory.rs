//! Standard group-theoretic operators on permutation groups: order
//! arithmetic (factorization, cube-free test), derived series, normal
//! closures, centralizers, Sylow subgroups, minimal normal subgroups, and
//! chief series of solvable groups.

use std::collections::HashMap;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::perm::{PermGroup, Permutation};

/// A factored integer with primes in strictly increasing order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderFactorization {
    pub n: u128,
    pub factors: Vec<(u64, u32)>,
}

impl OrderFactorization {
    /// Factor `n ≥ 1` by trial division.
    pub fn of(n: u128) -> OrderFactorization {
        assert!(n >= 1, "order must be positive");
        let mut factors = Vec::new();
        let mut m = n;
        let mut d: u128 = 2;
        while d * d <= m {
            if m % d == 0 {
                let mut e = 0u32;
                while m % d == 0 {
                    m /= d;
                    e += 1;
                }
                factors.push((d as u64, e));
            }
            d += if d == 2 { 1 } else { 2 };
        }
        if m > 1 {
            factors.push((m as u64, 1));
        }
        OrderFactorization { n, factors }
    }

    /// Whether every prime appears with exponent at most 2.
    pub fn is_cubefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e <= 2)
    }

    /// Exponent of `p` in `n`.
    pub fn exponent_of(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    /// The `p`-part `p^e` of `n`.
    pub fn p_part(&self, p: u64) -> u128 {
        (p as u128).pow(self.exponent_of(p))
    }

    pub fn primes(&self) -> Vec<u64> {
        self.factors.iter().map(|&(p, _)| p).collect()
    }
}

impl fmt::Display for OrderFactorization {
    /// `"2^2·3·5"` style; bare prime when the exponent is 1; `"1"` for 1.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for &(p, e) in &self.factors {
            if !first {
                write!(f, "·")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Factorization of `n`, or the cube-free violation with its witness prime.
pub fn ensure_cubefree(n: u128) -> Result<OrderFactorization> {
    let f = OrderFactorization::of(n);
    if let Some(&(p, _)) = f.factors.iter().find(|&&(_, e)| e >= 3) {
        return Err(Error::NotCubeFree { order: n, prime: p });
    }
    Ok(f)
}

/// Factorization of the group order.
pub fn factor_order(g: &PermGroup) -> OrderFactorization {
    OrderFactorization::of(g.order())
}

pub fn is_cubefree(g: &PermGroup) -> bool {
    factor_order(g).is_cubefree()
}

/// Smallest normal subgroup of `g` containing `seeds`.
pub fn normal_closure(g: &PermGroup, seeds: &[Permutation]) -> Result<PermGroup> {
    for s in seeds {
        if !g.contains(s) {
            return Err(Error::NotInGroup);
        }
    }
    let mut n = PermGroup::new(g.degree(), seeds.to_vec())?;
    let mut queue: Vec<Permutation> = n.generators().to_vec();
    while let Some(x) = queue.pop() {
        for c in g.generators() {
            let y = x.conjugated_by(c);
            if !n.contains(&y) {
                n = n.closure_with(std::slice::from_ref(&y))?;
                queue.push(y);
            }
        }
    }
    Ok(n)
}

/// The commutator subgroup `[g, g]`.
pub fn derived_subgroup(g: &PermGroup) -> PermGroup {
    let gens = g.generators();
    let mut comms = Vec::new();
    for a in gens {
        for b in gens {
            let c = Permutation::commutator(a, b);
            if !c.is_identity() {
                comms.push(c);
            }
        }
    }
    normal_closure(g, &comms).expect("commutators lie in the group")
}

/// `g = g⁽¹⁾ ≥ g⁽²⁾ ≥ …`, stopping at the first repeated term. The last
/// entry is trivial exactly when `g` is solvable.
pub fn derived_series(g: &PermGroup) -> Vec<PermGroup> {
    let mut series = vec![g.clone()];
    loop {
        let last = series.last().unwrap();
        let next = derived_subgroup(last);
        if next.order() == last.order() {
            break;
        }
        series.push(next);
    }
    series
}

/// The stable term of the derived series (trivial iff `g` is solvable).
pub fn stable_derived(g: &PermGroup) -> PermGroup {
    derived_series(g).last().unwrap().clone()
}

pub fn is_solvable(g: &PermGroup) -> bool {
    stable_derived(g).is_trivial()
}

/// Centralizer `C_g(h) = { x ∈ g : xy = yx for all y ∈ h }`, computed by
/// backtracking over the stabilizer chain of `g` with partial-commutation
/// pruning on base-point images.
pub fn centralizer(g: &PermGroup, h: &PermGroup) -> Result<PermGroup> {
    if !h.is_subgroup_of(g) {
        return Err(Error::NotInGroup);
    }
    let hgens: Vec<Permutation> = h.generators().to_vec();
    let commutes_with_all = |x: &Permutation| hgens.iter().all(|y| x.compose(y) == y.compose(x));
    if hgens.is_empty() || g.generators().iter().all(&commutes_with_all) {
        return Ok(g.clone());
    }

    let chain = g.chain();
    let betas = chain.base();
    // point → position in the base, for the pruning test
    let mut beta_index = vec![usize::MAX; g.degree()];
    for (i, &b) in betas.iter().enumerate() {
        beta_index[b as usize] = i;
    }

    struct Search<'a> {
        chain: &'a crate::perm::StabChain,
        betas: &'a [u32],
        beta_index: &'a [usize],
        hgens: &'a [Permutation],
        found: PermGroup,
    }

    // The element enumerated along a root-to-leaf path is
    // g = (deep transversal reps) then (shallow ones); after fixing levels
    // 0..=k the images of the first k+1 base points are final, so partial
    // commutation with the generators of h can be checked on them.
    fn descend(s: &mut Search, level: usize, outer: &Permutation) {
        if level == s.chain.levels_len() {
            // The prune along the path is sound but not complete: it only
            // compares images at base points whose h-images are themselves
            // base points. The leaf decides definitively.
            let commutes = s
                .hgens
                .iter()
                .all(|y| outer.compose(y) == y.compose(outer));
            if commutes && !s.found.contains(outer) {
                s.found = s
                    .found
                    .closure_with(std::slice::from_ref(outer))
                    .expect("same degree");
            }
            return;
        }
        'points: for &x in s.chain.level_orbit(level) {
            let rep = s.chain.transversal_rep(level, x);
            let next = rep.compose(outer);
            for j in 0..=level {
                let bj = s.betas[j];
                let g_bj = next.image(bj);
                for hg in s.hgens {
                    let z = hg.image(bj);
                    let m = s.beta_index[z as usize];
                    if m != usize::MAX && m <= level && next.image(z) != hg.image(g_bj) {
                        continue 'points;
                    }
                }
            }
            descend(s, level + 1, &next);
        }
    }

    let mut search = Search {
        chain,
        betas: &betas,
        beta_index: &beta_index,
        hgens: &hgens,
        found: PermGroup::trivial(g.degree()),
    };
    let id = g.identity();
    descend(&mut search, 0, &id);
    // Everything kept commutes with the generators of h; the prune only
    // discards elements that provably fail on some base point.
    debug_assert!(search.found.generators().iter().all(commutes_with_all));
    Ok(search.found)
}

/// The center `Z(g)`.
pub fn center(g: &PermGroup) -> PermGroup {
    centralizer(g, g).expect("a group is a subgroup of itself")
}

fn is_prime_power(mut n: u128, p: u64) -> bool {
    while n % p as u128 == 0 {
        n /= p as u128;
    }
    n == 1
}

/// A Sylow `p`-subgroup of `g`: first a seeded random search for elements
/// of full `p`-power order (which settles cyclic and many rank-2 Sylow
/// subgroups immediately), then an exhaustive greedy extension by
/// normalizing `p`-elements, which always completes.
pub fn sylow_subgroup(g: &PermGroup, p: u64) -> Result<PermGroup> {
    let f = factor_order(g);
    let e = f.exponent_of(p);
    if e == 0 {
        return Err(Error::PrimeDoesNotDivide { p, order: g.order() });
    }
    let target = f.p_part(p);

    // reduce a random element to its p-part
    let p_part_of = |x: &Permutation| -> Option<Permutation> {
        let o = x.order();
        let mut pe: u128 = 1;
        let mut m = o;
        while m % p as u128 == 0 {
            m /= p as u128;
            pe *= p as u128;
        }
        if pe == 1 {
            return None;
        }
        Some(x.pow((o / pe) as i64))
    };

    let mut rng = ChaCha8Rng::seed_from_u64(0x53594c);
    let mut order_p: Vec<Permutation> = Vec::new();
    for _ in 0..300 {
        let x = g.random_element(&mut rng);
        let Some(h) = p_part_of(&x) else { continue };
        if h.order() == target {
            return PermGroup::new(g.degree(), vec![h]);
        }
        if h.order() == p as u128 && !order_p.contains(&h) && order_p.len() < 24 {
            order_p.push(h);
        }
    }
    if e == 2 {
        // look for a commuting independent pair of order-p elements
        for i in 0..order_p.len() {
            for j in (i + 1)..order_p.len() {
                let (a, b) = (&order_p[i], &order_p[j]);
                if a.compose(b) != b.compose(a) {
                    continue;
                }
                let independent = (1..p).all(|k| a.pow(k as i64) != *b);
                if independent {
                    let s = PermGroup::new(g.degree(), vec![a.clone(), b.clone()])?;
                    if s.order() == target {
                        return Ok(s);
                    }
                }
            }
        }
    }

    // Exhaustive fallback: list the p-elements, then grow a p-subgroup by
    // adjoining p-elements that normalize it. For any p-subgroup short of
    // full order such an element exists inside an overgroup Sylow.
    let elems = g.elements()?;
    let p_elements: Vec<&Permutation> = elems
        .iter()
        .filter(|x| !x.is_identity() && is_prime_power(x.order(), p))
        .collect();
    let first = p_elements
        .first()
        .ok_or_else(|| Error::Internal("no p-elements despite p | order".into()))?;
    let mut s = PermGroup::new(g.degree(), vec![(*first).clone()])?;
    while s.order() < target {
        let mut extended = false;
        for &h in &p_elements {
            if s.contains(h) {
                continue;
            }
            let normalizes = s
                .generators()
                .iter()
                .all(|sg| s.contains(&sg.conjugated_by(h)));
            if normalizes {
                s = s.closure_with(std::slice::from_ref(h))?;
                assert!(
                    is_prime_power(s.order(), p),
                    "normalizing p-element extension stayed a p-group"
                );
                extended = true;
                break;
            }
        }
        if !extended {
            return Err(Error::Internal(
                "Sylow extension stalled below full order".into(),
            ));
        }
    }
    Ok(s)
}

/// Whether `n` is elementary abelian for the prime `p`.
pub(crate) fn is_elementary_abelian(n: &PermGroup, p: u64) -> bool {
    n.is_abelian()
        && n.generators()
            .iter()
            .all(|x| x.pow(p as i64).is_identity())
}

/// All minimal normal subgroups of a nontrivial solvable group. Each is
/// elementary abelian and contained in a Sylow subgroup, so it suffices to
/// take normal closures of the prime-order elements of one Sylow subgroup
/// per prime and shrink the elementary abelian ones to minimality.
pub fn minimal_normal_subgroups(g: &PermGroup) -> Result<Vec<PermGroup>> {
    if g.is_trivial() {
        return Ok(Vec::new());
    }
    if !is_solvable(g) {
        return Err(Error::NotSolvable);
    }
    let f = factor_order(g);
    let mut out: Vec<PermGroup> = Vec::new();
    for p in f.primes() {
        let syl = sylow_subgroup(g, p)?;
        for x in syl.elements()?.iter() {
            if x.order() != p as u128 {
                continue;
            }
            let mut n = normal_closure(g, std::slice::from_ref(x))?;
            if !is_elementary_abelian(&n, p) {
                continue;
            }
            // shrink to a minimal normal subgroup inside n
            'shrink: loop {
                for y in n.elements()?.iter() {
                    if y.is_identity() {
                        continue;
                    }
                    let m = normal_closure(g, std::slice::from_ref(y))?;
                    if m.order() < n.order() {
                        n = m;
                        continue 'shrink;
                    }
                }
                break;
            }
            if !out.iter().any(|known| known.equal_group(&n)) {
                out.push(n);
            }
        }
    }
    Ok(out)
}

/// A chief series of a solvable group, stored ascending:
/// `terms[0] = 1 ◁ terms[1] ◁ … ◁ terms[r] = L`, every term normal in `L`,
/// with `factors[i] = (p, f)` describing the elementary abelian factor
/// `terms[i+1]/terms[i]` of order `p^f`.
#[derive(Clone, Debug)]
pub struct ChiefSeries {
    pub terms: Vec<PermGroup>,
    pub factors: Vec<(u64, u32)>,
}

impl ChiefSeries {
    pub fn group(&self) -> &PermGroup {
        self.terms.last().expect("series is never empty")
    }
}

/// Representatives of the cosets of `bottom` in `top`, starting with the
/// identity, discovered by deterministic BFS. `bottom` need not be normal.
pub(crate) fn coset_representatives(
    top: &PermGroup,
    bottom: &PermGroup,
    cap: usize,
) -> Result<Vec<Permutation>> {
    let mut reps: Vec<Permutation> = vec![top.identity()];
    let mut i = 0usize;
    while i < reps.len() {
        for t in top.generators() {
            let cand = reps[i].compose(t);
            let known = reps
                .iter()
                .any(|r| bottom.contains(&cand.compose(&r.inverse())));
            if !known {
                if reps.len() >= cap {
                    return Err(Error::TooLarge {
                        op: "coset enumeration",
                        order: (reps.len() + 1) as u128,
                        cap: cap as u128,
                    });
                }
                reps.push(cand);
            }
        }
        i += 1;
    }
    Ok(reps)
}

/// `⟨base ∪ x^L⟩`: the smallest subgroup containing `base` and the whole
/// `L`-conjugacy closure of `x`. Normal in `L` whenever `base` is.
fn module_closure(l: &PermGroup, base: &PermGroup, x: &Permutation) -> Result<PermGroup> {
    let mut n = base.closure_with(std::slice::from_ref(x))?;
    let mut queue = vec![x.clone()];
    while let Some(y) = queue.pop() {
        for c in l.generators() {
            let z = y.conjugated_by(c);
            if !n.contains(&z) {
                n = n.closure_with(std::slice::from_ref(&z))?;
                queue.push(z);
            }
        }
    }
    Ok(n)
}

/// Refine one elementary abelian layer `bottom ◁ top` (both normal in `l`,
/// factor an elementary abelian p-group) into chief factors of `l` by
/// spinning coset representatives and shrinking to minimal invariant
/// pieces. Appends the new terms and factor data.
fn refine_elementary_layer(
    l: &PermGroup,
    top: &PermGroup,
    bottom: &PermGroup,
    p: u64,
    terms: &mut Vec<PermGroup>,
    factors: &mut Vec<(u64, u32)>,
) -> Result<()> {
    let mut cur = bottom.clone();
    while cur.order() < top.order() {
        let reps = coset_representatives(top, &cur, 10_000)?;
        let seed = reps
            .iter()
            .find(|r| !cur.contains(r))
            .expect("cur is proper in top");
        let mut best = module_closure(l, &cur, seed)?;
        // shrink: any coset of cur inside best that spins smaller wins
        'shrink: loop {
            let inner = coset_representatives(&best, &cur, 10_000)?;
            for r in inner.iter().skip(1) {
                let cand = module_closure(l, &cur, r)?;
                if cand.order() < best.order() {
                    best = cand;
                    continue 'shrink;
                }
            }
            break;
        }
        let step = best.order() / cur.order();
        let mut f = 0u32;
        let mut m = step;
        while m % p as u128 == 0 {
            m /= p as u128;
            f += 1;
        }
        assert!(m == 1 && f >= 1, "chief factor must be a p-power");
        factors.push((p, f));
        terms.push(best.clone());
        cur = best;
    }
    Ok(())
}

/// Chief series of a solvable group: the derived series is refined,
/// section by section from the bottom, into primary pieces (descending
/// primes, so that read top-down the factor primes ascend), elementary
/// abelian layers within each primary piece, and finally minimal
/// `l`-invariant chief factors within each layer. Fully deterministic.
pub fn chief_series(l: &PermGroup) -> Result<ChiefSeries> {
    let dseries = derived_series(l);
    if !dseries.last().unwrap().is_trivial() {
        return Err(Error::NotSolvable);
    }
    let mut terms: Vec<PermGroup> = vec![PermGroup::trivial(l.degree())];
    let mut factors: Vec<(u64, u32)> = Vec::new();
    for window in dseries.windows(2).rev() {
        let (top, bottom) = (&window[0], &window[1]);
        let mut cur = terms.last().unwrap().clone();
        debug_assert_eq!(cur.order(), bottom.order());
        // ascend through the abelian section bottom → top, one prime at a
        // time; cur stays normal in l throughout
        let section = OrderFactorization::of(top.order() / bottom.order());
        for (p, _) in section.factors.iter().rev().cloned().collect::<Vec<_>>() {
            // primary step: adjoin the p-primary part of top/cur, reached
            // as the m-th powers of top's generators for m the p'-part
            let rem = top.order() / cur.order();
            let rem_f = OrderFactorization::of(rem);
            let pa = rem_f.p_part(p);
            let m = rem / pa;
            let mut gens = cur.generators().to_vec();
            for t in top.generators() {
                gens.push(t.pow(m as i64));
            }
            let primary_top = PermGroup::new(l.degree(), gens)?;
            assert_eq!(primary_top.order(), cur.order() * pa);
            // split the primary piece into elementary abelian layers by
            // repeated p-th powers (descending), then refine each layer
            let mut layers: Vec<PermGroup> = vec![primary_top.clone()];
            loop {
                let last = layers.last().unwrap();
                if last.order() == cur.order() {
                    break;
                }
                let mut lg = cur.generators().to_vec();
                for t in last.generators() {
                    lg.push(t.pow(p as i64));
                }
                let next = PermGroup::new(l.degree(), lg)?;
                assert!(next.order() < last.order());
                layers.push(next);
            }
            for w in layers.windows(2).rev() {
                let (layer_top, layer_bottom) = (&w[0], &w[1]);
                refine_elementary_layer(l, layer_top, layer_bottom, p, &mut terms, &mut factors)?;
            }
            cur = primary_top;
        }
    }
    debug_assert_eq!(terms.last().unwrap().order(), l.order());
    // use l itself as the top term so callers see the original group
    *terms.last_mut().unwrap() = l.clone();
    Ok(ChiefSeries { terms, factors })
}

/// Conjugacy classes as element lists; classes appear in first-element
/// enumeration order, elements in discovery order.
pub fn conjugacy_classes(g: &PermGroup) -> Result<Vec<Vec<Permutation>>> {
    let elems = g.elements()?;
    let index: HashMap<&Permutation, usize> =
        elems.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let mut seen = vec![false; elems.len()];
    let mut classes = Vec::new();
    for i in 0..elems.len() {
        if seen[i] {
            continue;
        }
        seen[i] = true;
        let mut class = vec![elems[i].clone()];
        let mut k = 0usize;
        while k < class.len() {
            let x = class[k].clone();
            for c in g.generators() {
                let y = x.conjugated_by(c);
                let j = index[&y];
                if !seen[j] {
                    seen[j] = true;
                    class.push(y);
                }
            }
            k += 1;
        }
        classes.push(class);
    }
    Ok(classes)
}
