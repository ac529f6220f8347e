//! Constructive presentations of permutation-group quotients.
//!
//! A constructive presentation of `G/N` carries abstract symbols
//! `x_1, …, x_n`, relator words over those symbols, a map `phi` sending
//! each symbol to a group element, and a procedure `psi` sending any
//! `g ∈ G` to a word `w` with `g⁻¹·(w phi) ∈ N`. Here `psi` is realized
//! by sifting through a ladder of subgroups
//! `G = S_0 ≥ S_1 ≥ … ≥ S_n = N`, where `S_{k-1} = ⟨g_k⟩·S_k`; the
//! result is always a collected exponent vector, so no rewriting
//! ("collection") in the abstract presentation is ever performed.

use serde::{Deserialize, Serialize};

use crate::grouptheory::{chief_series, coset_representatives, is_solvable};
use crate::perm::{CosetQuotient, PermGroup, Permutation};
use crate::structure::OmegaAction;
use crate::{Error, Result};

/// A relator word over the abstract symbols: nonzero signed 1-based
/// indices, `+k` for `x_k` and `-k` for `x_k⁻¹`, multiplied left to
/// right.
pub type Word = Vec<i32>;

/// A constructive presentation of `G/N` backed by a subgroup ladder.
#[derive(Clone)]
pub struct ConstructivePresentation {
    group: PermGroup,
    modulus: PermGroup,
    gens: Vec<Permutation>,
    relative_orders: Vec<u64>,
    /// `ladder[k] = ⟨gens[k..], modulus⟩`; `ladder[0] = group`,
    /// `ladder[n] = modulus`, and each member is normal in the previous.
    ladder: Vec<PermGroup>,
    relators: Vec<Word>,
}

/// Serializable summary of a presentation (for debugging output).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PresentationDocument {
    pub generator_count: usize,
    pub relators: Vec<Vec<i32>>,
    pub relative_orders: Vec<u64>,
}

impl ConstructivePresentation {
    /// The presented group `G`.
    pub fn group(&self) -> &PermGroup {
        &self.group
    }

    /// The modulus `N` (the presentation describes `G/N`).
    pub fn modulus(&self) -> &PermGroup {
        &self.modulus
    }

    /// Number of abstract symbols.
    pub fn generator_count(&self) -> usize {
        self.gens.len()
    }

    /// `phi` images of the symbols, in symbol order.
    pub fn generators(&self) -> &[Permutation] {
        &self.gens
    }

    /// Coset step sizes of the ladder; primes for pc presentations.
    pub fn relative_orders(&self) -> &[u64] {
        &self.relative_orders
    }

    pub fn relators(&self) -> &[Word] {
        &self.relators
    }

    /// Evaluate a word under `phi`.
    pub fn phi_word(&self, word: &[i32]) -> Result<Permutation> {
        let mut acc = self.group.identity();
        for &letter in word {
            let idx = letter.unsigned_abs() as usize;
            if idx == 0 || idx > self.gens.len() {
                return Err(Error::Internal(format!(
                    "word letter {letter} out of range for {} symbols",
                    self.gens.len()
                )));
            }
            let g = &self.gens[idx - 1];
            acc = if letter > 0 {
                acc.compose(g)
            } else {
                acc.compose(&g.inverse())
            };
        }
        Ok(acc)
    }

    /// Evaluate an exponent vector `x_1^{e_1}·…·x_n^{e_n}` under `phi`.
    pub fn phi_exponents(&self, exps: &[u64]) -> Result<Permutation> {
        if exps.len() != self.gens.len() {
            return Err(Error::Internal(
                "exponent vector length does not match symbol count".into(),
            ));
        }
        let mut acc = self.group.identity();
        for (g, &e) in self.gens.iter().zip(exps) {
            acc = acc.compose(&g.pow(e as i64));
        }
        Ok(acc)
    }

    /// `psi`: the collected exponent vector of `g`, found by sifting
    /// through the ladder. Satisfies `g⁻¹·(g psi phi) ∈ N`.
    pub fn psi(&self, g: &Permutation) -> Result<Vec<u64>> {
        if !self.group.contains(g) {
            return Err(Error::NotInGroup);
        }
        let (exps, _) = self.sift_from(0, g)?;
        Ok(exps)
    }

    /// `psi` as a flat word (positive letters only).
    pub fn psi_word(&self, g: &Permutation) -> Result<Word> {
        let exps = self.psi(g)?;
        Ok(exponents_to_word(&exps, 0))
    }

    /// Sift `g ∈ ladder[level]` through the ladder tail, returning the
    /// exponents for symbols `level+1..=n` (zeros before) and the final
    /// remainder, which lies in the modulus.
    fn sift_from(&self, level: usize, g: &Permutation) -> Result<(Vec<u64>, Permutation)> {
        let n = self.gens.len();
        let mut exps = vec![0u64; n];
        let mut h = g.clone();
        for k in level..n {
            let step = self.relative_orders[k];
            let deeper = &self.ladder[k + 1];
            let gk_inv = self.gens[k].inverse();
            let mut found = false;
            for e in 0..step {
                if deeper.contains(&h) {
                    exps[k] = e;
                    found = true;
                    break;
                }
                h = gk_inv.compose(&h);
            }
            if !found {
                return Err(Error::Internal(
                    "sifting failed: ladder cosets are not cyclic".into(),
                ));
            }
        }
        Ok((exps, h))
    }

    /// The Def-style identity: `g⁻¹·(g psi phi) ∈ N`.
    pub fn defining_identity_holds(&self, g: &Permutation) -> bool {
        match self.psi(g).and_then(|e| self.phi_exponents(&e)) {
            Ok(w) => self.modulus.contains(&g.inverse().compose(&w)),
            Err(_) => false,
        }
    }

    /// Syntactic collected-form check: every relator is either a power
    /// word `x_k^{p_k}·tail` or a conjugate word `x_j⁻¹·x_k·x_j·tail`
    /// with the tail mentioning only strictly larger symbol indices.
    pub fn is_collected(&self) -> bool {
        self.relators.iter().all(|r| {
            if r.is_empty() {
                return true;
            }
            let head = r[0];
            if head > 0 {
                // power word: p_k copies of +k, then the tail
                let k = head;
                let p = self.relative_orders[(k - 1) as usize] as usize;
                if r.len() < p || !r[..p].iter().all(|&l| l == k) {
                    return false;
                }
                r[p..].iter().all(|&l| l.unsigned_abs() > k.unsigned_abs())
            } else {
                // conjugate word: [-j, +k, +j, tail…] with j < k
                if r.len() < 3 {
                    return false;
                }
                let j = -r[0];
                if j <= 0 || r[2] != j || r[1] <= j {
                    return false;
                }
                r[3..].iter().all(|&l| l.unsigned_abs() > j.unsigned_abs())
            }
        })
    }

    /// Serializable summary.
    pub fn document(&self) -> PresentationDocument {
        PresentationDocument {
            generator_count: self.gens.len(),
            relators: self.relators.clone(),
            relative_orders: self.relative_orders.clone(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(&self.document())
            .map_err(|e| Error::Internal(format!("presentation serialization failed: {e}")))
    }

    /// Verify every relator evaluates into the modulus; construction
    /// always runs this.
    fn verify_relators(&self) -> Result<()> {
        for r in &self.relators {
            let v = self.phi_word(r)?;
            if !self.modulus.contains(&v) {
                return Err(Error::Internal(
                    "relator does not evaluate into the modulus".into(),
                ));
            }
        }
        Ok(())
    }
}

/// A constructive presentation whose relators are in collected
/// polycyclic form and whose relative orders are primes.
#[derive(Clone)]
pub struct PcPresentation {
    pres: ConstructivePresentation,
}

impl PcPresentation {
    pub fn underlying(&self) -> &ConstructivePresentation {
        &self.pres
    }

    pub fn relative_orders(&self) -> &[u64] {
        self.pres.relative_orders()
    }

    pub fn group(&self) -> &PermGroup {
        self.pres.group()
    }

    pub fn into_presentation(self) -> ConstructivePresentation {
        self.pres
    }

    fn wrap(pres: ConstructivePresentation) -> Result<PcPresentation> {
        for &p in pres.relative_orders() {
            if crate::modp::factor64(p) != vec![(p, 1)] {
                return Err(Error::Internal(format!("relative order {p} is not prime")));
            }
        }
        if !pres.is_collected() {
            return Err(Error::Internal("relators are not in collected form".into()));
        }
        let product: u128 = pres.relative_orders().iter().map(|&p| p as u128).product();
        if product != pres.group().order() / pres.modulus().order() {
            return Err(Error::Internal(
                "relative orders do not multiply to the index".into(),
            ));
        }
        Ok(PcPresentation { pres })
    }
}

/// Expand an exponent vector into a flat positive word, shifting all
/// symbol indices up by `shift`.
fn exponents_to_word(exps: &[u64], shift: usize) -> Word {
    let mut w = Vec::new();
    for (i, &e) in exps.iter().enumerate() {
        for _ in 0..e {
            w.push((shift + i + 1) as i32);
        }
    }
    w
}

/// The inverse of a word: reversed with signs flipped.
fn inverse_word(w: &[i32]) -> Word {
    w.iter().rev().map(|&l| -l).collect()
}

/// Shift every symbol index in a word up by `shift`.
fn shift_word(w: &[i32], shift: i32) -> Word {
    w.iter()
        .map(|&l| if l > 0 { l + shift } else { l - shift })
        .collect()
}

/// A constructive presentation of `G/N` built from a chief series,
/// refined to prime steps. `N` must be normal; the index must stay
/// desk-scale since a faithful quotient realization is constructed when
/// `N` is nontrivial.
pub fn constructive_presentation(g: &PermGroup, n: &PermGroup) -> Result<ConstructivePresentation> {
    if n.is_trivial() {
        return constructive_presentation_via(g, n, None);
    }
    let quot = CosetQuotient::regular(g, n, None)?;
    constructive_presentation_via(g, n, Some(&quot))
}

/// Same as [`constructive_presentation`] but with a caller-supplied
/// faithful realization of `G/N` (used to avoid large regular coset
/// actions when a cheaper action is known).
pub(crate) fn constructive_presentation_via(
    g: &PermGroup,
    n: &PermGroup,
    quot: Option<&CosetQuotient>,
) -> Result<ConstructivePresentation> {
    if !n.is_subgroup_of(g) || !n.is_normal_in(g) {
        return Err(Error::NotNormal);
    }
    // Work in a faithful image q of G/N; `section` pulls q-elements back
    // to G. With trivial N the image is G itself.
    type Lift<'a> = Box<dyn Fn(&Permutation) -> Result<Permutation> + 'a>;
    let (q_group, lift): (PermGroup, Lift<'_>) = match quot {
        None => (g.clone(), Box::new(|p: &Permutation| Ok(p.clone()))),
        Some(q) => {
            if !q.kernel().equal_group(n) || !q.parent().equal_group(g) {
                return Err(Error::Internal(
                    "supplied quotient realization does not match G/N".into(),
                ));
            }
            (q.group().clone(), Box::new(move |p| q.section(p)))
        }
    };

    let cs = chief_series(&q_group)?;
    // Walk the chief factors top-down; inside each elementary abelian
    // factor, refine to a composition series by repeatedly adjoining the
    // first new coset representative. Symbols for a factor run top-down:
    // the generator reaching the factor's top comes first.
    let mut gens: Vec<Permutation> = Vec::new();
    let mut orders: Vec<u64> = Vec::new();
    let r = cs.factors.len();
    for i in (0..r).rev() {
        let (p, f) = cs.factors[i];
        let top = &cs.terms[i + 1];
        let bottom = &cs.terms[i];
        let mut cur = bottom.clone();
        let mut steps: Vec<Permutation> = Vec::new();
        for _ in 0..f {
            let cap = (top.order() / cur.order()) as usize + 1;
            let reps = coset_representatives(top, &cur, cap)?;
            let h = reps
                .into_iter()
                .find(|r| !cur.contains(r))
                .ok_or_else(|| Error::Internal("chief factor refinement found no step".into()))?;
            let next = cur.closure_with(std::slice::from_ref(&h))?;
            if next.order() != cur.order() * p as u128 {
                return Err(Error::Internal(
                    "composition refinement step is not of prime index".into(),
                ));
            }
            steps.push(h);
            cur = next;
        }
        for h in steps.into_iter().rev() {
            gens.push(h);
            orders.push(p);
        }
    }

    // Pull the symbols back to G and build the ladder there.
    let lifted: Vec<Permutation> = gens.iter().map(|h| lift(h)).collect::<Result<_>>()?;
    let n_order = n.order();
    let mut ladder: Vec<PermGroup> = Vec::with_capacity(lifted.len() + 1);
    let mut suffix_order: u128 = n_order;
    let mut cur = n.clone();
    ladder.push(cur.clone());
    for k in (0..lifted.len()).rev() {
        suffix_order *= orders[k] as u128;
        let mut gs = cur.generators().to_vec();
        gs.push(lifted[k].clone());
        cur = PermGroup::new(g.degree(), gs)?.with_known_order(suffix_order);
        ladder.push(cur.clone());
    }
    ladder.reverse();
    if ladder[0].order() != g.order() {
        return Err(Error::Internal(
            "presentation ladder does not reach the whole group".into(),
        ));
    }

    let mut pres = ConstructivePresentation {
        group: g.clone(),
        modulus: n.clone(),
        gens: lifted,
        relative_orders: orders,
        ladder,
        relators: Vec::new(),
    };
    pres.relators = pc_relators(&pres)?;
    pres.verify_relators()?;
    Ok(pres)
}

/// Collected power and conjugation relators for a ladder-backed
/// presentation: `x_k^{p_k}·tail⁻¹` and `x_j⁻¹·x_k·x_j·tail⁻¹`.
fn pc_relators(pres: &ConstructivePresentation) -> Result<Vec<Word>> {
    let n = pres.gens.len();
    let mut relators = Vec::new();
    for k in 0..n {
        let p = pres.relative_orders[k];
        let v = pres.gens[k].pow(p as i64);
        let (exps, _) = pres.sift_from(k + 1, &v)?;
        let mut w: Word = vec![(k + 1) as i32; p as usize];
        w.extend(inverse_word(&exponents_to_word(&exps, 0)));
        relators.push(w);
    }
    for j in 0..n {
        for k in (j + 1)..n {
            let v = pres.gens[k].conjugated_by(&pres.gens[j]);
            let (exps, _) = pres.sift_from(j + 1, &v)?;
            let mut w: Word = vec![-((j + 1) as i32), (k + 1) as i32, (j + 1) as i32];
            w.extend(inverse_word(&exponents_to_word(&exps, 0)));
            relators.push(w);
        }
    }
    Ok(relators)
}

/// A polycyclic constructive presentation of a solvable group, built
/// from its chief series with composition refinement inside each factor.
pub fn pc_presentation(l: &PermGroup) -> Result<PcPresentation> {
    if !is_solvable(l) {
        return Err(Error::NotSolvable);
    }
    let pres = constructive_presentation(l, &PermGroup::trivial(l.degree()))?;
    PcPresentation::wrap(pres)
}

/// Polycyclic presentation of `G/N`; same construction as
/// [`constructive_presentation`], checked for collected form.
pub fn pc_presentation_mod(g: &PermGroup, n: &PermGroup) -> Result<PcPresentation> {
    PcPresentation::wrap(constructive_presentation(g, n)?)
}

/// Extend a presentation of `G/L_i` by one of `L_i/L_{i+1}` to a
/// presentation of `G/L_{i+1}`: symbols are concatenated (outer first),
/// outer relators receive correction tails over the inner symbols, and
/// conjugation words `x⁻¹·y·x` of inner symbols by outer symbols are
/// added with their own tails.
pub fn extend_presentation(
    outer: &ConstructivePresentation,
    inner: &ConstructivePresentation,
) -> Result<ConstructivePresentation> {
    if outer.group.degree() != inner.group.degree() {
        return Err(Error::DegreeMismatch(
            outer.group.degree(),
            inner.group.degree(),
        ));
    }
    if !outer.modulus.equal_group(&inner.group) {
        return Err(Error::IncompatibleChain(
            "outer modulus must equal the inner group".into(),
        ));
    }
    if !inner.modulus.is_normal_in(&outer.group) {
        return Err(Error::IncompatibleChain(
            "inner modulus must be normal in the outer group".into(),
        ));
    }

    let a = outer.gens.len();
    let mut gens = outer.gens.clone();
    gens.extend(inner.gens.iter().cloned());
    let mut orders = outer.relative_orders.clone();
    orders.extend_from_slice(&inner.relative_orders);
    let mut ladder = outer.ladder.clone();
    ladder.extend(inner.ladder.iter().skip(1).cloned());

    let mut combined = ConstructivePresentation {
        group: outer.group.clone(),
        modulus: inner.modulus.clone(),
        gens,
        relative_orders: orders,
        ladder,
        relators: Vec::new(),
    };

    let mut relators: Vec<Word> = Vec::new();
    // outer relators, corrected by the inner sift of their evaluation
    for w in &outer.relators {
        let v = outer.phi_word(w)?;
        let (exps, _) = inner.sift_from(0, &v)?;
        let mut r = w.clone();
        r.extend(inverse_word(&exponents_to_word(&exps, a)));
        relators.push(r);
    }
    // inner relators, shifted
    for w in &inner.relators {
        relators.push(shift_word(w, a as i32));
    }
    // conjugation of each inner symbol by each outer symbol
    for j in 0..a {
        for (x, xg) in inner.gens.iter().enumerate() {
            let v = xg.conjugated_by(&outer.gens[j]);
            let (exps, _) = inner.sift_from(0, &v)?;
            let mut r: Word = vec![
                -((j + 1) as i32),
                (a + x + 1) as i32,
                (j + 1) as i32,
            ];
            r.extend(inverse_word(&exponents_to_word(&exps, a)));
            relators.push(r);
        }
    }
    combined.relators = relators;
    combined.verify_relators()?;
    Ok(combined)
}

/// Presentation of a semidirect product `A ⋉ G` from a presentation of
/// `G`, abstract relators for `A` over the symbols `Ω`, and permutations
/// realizing the `Ω`-action by conjugation. The relator set is the union
/// of the outer relators, the inner relators, and the twist words
/// `psi((x phi)^w)·w⁻¹·x⁻¹·w`.
///
/// The realizers must normalize the inner group, induce exactly the
/// declared automorphisms, and — for the sifting procedure — generate a
/// subnormal chain `⟨r_i, …, r_t, G⟩` with cyclic steps when listed in
/// order.
pub fn semidirect_presentation(
    action: &OmegaAction,
    inner: &ConstructivePresentation,
    outer_relators: &[Word],
    realizers: &[Permutation],
) -> Result<ConstructivePresentation> {
    if !inner.modulus.is_trivial() {
        return Err(Error::IncompatibleChain(
            "inner presentation must have trivial modulus".into(),
        ));
    }
    if action.len() != realizers.len() {
        return Err(Error::Internal(
            "one realizing permutation is required per action symbol".into(),
        ));
    }
    // unify the domains
    let degree = realizers
        .iter()
        .map(|r| r.degree())
        .chain(std::iter::once(inner.group.degree()))
        .max()
        .unwrap();
    let pad_group = |g: &PermGroup| -> Result<PermGroup> {
        PermGroup::new(degree, g.generators().iter().map(|p| p.padded(degree)).collect())
    };
    let inner_group = pad_group(&inner.group)?.with_known_order(inner.group.order());
    let realizers: Vec<Permutation> = realizers.iter().map(|r| r.padded(degree)).collect();

    // each realizer must normalize G and induce the declared automorphism
    for (i, w) in realizers.iter().enumerate() {
        for (gen, padded) in inner.group.generators().iter().zip(inner_group.generators()) {
            let conj = padded.conjugated_by(w);
            if !inner_group.contains(&conj) {
                return Err(Error::Internal(
                    "realizer does not normalize the inner group".into(),
                ));
            }
            let declared = action.apply(i, gen)?.padded(degree);
            if conj != declared {
                return Err(Error::Internal(
                    "realizer conjugation differs from the declared automorphism".into(),
                ));
            }
        }
    }

    let t = realizers.len();
    // outer ladder H = U_0 ≥ U_1 ≥ … ≥ U_t = G with U_i = ⟨r_{i+1}, …, G⟩
    let mut ladder_rev: Vec<PermGroup> = vec![inner_group.clone()];
    for i in (0..t).rev() {
        let prev = ladder_rev.last().unwrap();
        let next = prev.closure_with(std::slice::from_ref(&realizers[i]))?;
        ladder_rev.push(next);
    }
    ladder_rev.reverse();
    let mut orders: Vec<u64> = Vec::with_capacity(t);
    for i in 0..t {
        let step = ladder_rev[i].order() / ladder_rev[i + 1].order();
        let step: u64 = step
            .try_into()
            .map_err(|_| Error::Internal("outer step too large".into()))?;
        if step == 0 {
            return Err(Error::Internal("outer ladder step is empty".into()));
        }
        if !ladder_rev[i + 1].is_normal_in(&ladder_rev[i]) {
            return Err(Error::IncompatibleChain(
                "outer generators must form a subnormal chain over the inner group".into(),
            ));
        }
        // cosets of the step must be covered by powers of the realizer
        for e in 1..step {
            if ladder_rev[i + 1].contains(&realizers[i].pow(e as i64)) {
                return Err(Error::IncompatibleChain(
                    "outer ladder step is not cyclic".into(),
                ));
            }
        }
        if !ladder_rev[i + 1].contains(&realizers[i].pow(step as i64)) {
            return Err(Error::IncompatibleChain(
                "outer ladder step is not cyclic".into(),
            ));
        }
        orders.push(step);
    }

    let h = ladder_rev[0].clone();
    let inner_gens_padded: Vec<Permutation> =
        inner.gens.iter().map(|p| p.padded(degree)).collect();
    let mut gens = realizers.clone();
    gens.extend(inner_gens_padded.iter().cloned());
    orders.extend_from_slice(&inner.relative_orders);
    let mut ladder = ladder_rev;
    // inner ladder members, padded
    for m in inner.ladder.iter().skip(1) {
        let padded = pad_group(m)?.with_known_order(m.order());
        ladder.push(padded);
    }

    let mut combined = ConstructivePresentation {
        group: h.clone(),
        modulus: PermGroup::trivial(degree),
        gens,
        relative_orders: orders,
        ladder,
        relators: Vec::new(),
    };

    let mut relators: Vec<Word> = Vec::new();
    // outer relators must evaluate into the inner group; append tails
    for w in outer_relators {
        let v = combined.phi_word(w)?;
        if !inner_group.contains(&v) {
            return Err(Error::Internal(
                "outer relator does not evaluate into the inner group".into(),
            ));
        }
        let (exps, _) = combined.sift_from(t, &v)?;
        let mut r = w.clone();
        r.extend(inverse_word(&exponents_to_word(&exps, 0)));
        relators.push(r);
    }
    // inner relators, shifted past the outer symbols
    for w in &inner.relators {
        relators.push(shift_word(w, t as i32));
    }
    // twist words psi((x phi)^w)·w⁻¹·x⁻¹·w
    for (i, w) in realizers.iter().enumerate() {
        for (x, xg) in inner_gens_padded.iter().enumerate() {
            let c = xg.conjugated_by(w);
            let (exps, _) = combined.sift_from(t, &c)?;
            let mut r = exponents_to_word(&exps, 0);
            r.push(-((i + 1) as i32));
            r.push(-((t + x + 1) as i32));
            r.push((i + 1) as i32);
            relators.push(r);
        }
    }
    combined.relators = relators;
    combined.verify_relators()?;
    Ok(combined)
}

/// Test helper shared by unit and integration tests: the collected
/// normal forms `x_1^{e_1}·…·x_n^{e_n}` must biject onto the cosets of
/// the modulus. Verifies that the presentation data truly describes
/// `G/N` of the right size.
#[cfg(test)]
pub(crate) fn normal_forms_biject(pres: &ConstructivePresentation) -> bool {
    use std::collections::HashSet;
    let index = pres.group().order() / pres.modulus().order();
    let mut tuples: Vec<Vec<u64>> = vec![vec![]];
    for &p in pres.relative_orders() {
        let mut next = Vec::new();
        for t in &tuples {
            for e in 0..p {
                let mut t2 = t.clone();
                t2.push(e);
                next.push(t2);
            }
        }
        tuples = next;
    }
    if tuples.len() as u128 != index {
        return false;
    }
    // distinct modulo N: since N ◁ G we can compare canonical coset tags
    // via membership of quotients v·w⁻¹ ∈ N after sorting by a stable key
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let elems: Vec<Permutation> = match pres.modulus().elements() {
        Ok(e) => e.to_vec(),
        Err(_) => return false,
    };
    for t in &tuples {
        let v = match pres.phi_exponents(t) {
            Ok(v) => v,
            Err(_) => return false,
        };
        // canonical representative of v·N: minimal image vector over the coset
        let tag = elems
            .iter()
            .map(|n| {
                let w = v.compose(n);
                (0..w.degree() as u32).map(|x| w.image(x)).collect::<Vec<u32>>()
            })
            .min()
            .unwrap();
        if !seen.insert(tag) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn group(degree: usize, gens: &[&str]) -> PermGroup {
        let parsed = gens
            .iter()
            .map(|s| Permutation::parse(s, degree).unwrap())
            .collect();
        PermGroup::new(degree, parsed).unwrap()
    }

    fn s3() -> PermGroup {
        group(3, &["(1,2)", "(1,2,3)"])
    }

    fn a3() -> PermGroup {
        group(3, &["(1,2,3)"])
    }

    #[test]
    fn cyclic_two_presentation() {
        let c2 = group(2, &["(1,2)"]);
        let pres = constructive_presentation(&c2, &PermGroup::trivial(2)).unwrap();
        assert_eq!(pres.generator_count(), 1);
        assert_eq!(pres.relative_orders(), &[2]);
        assert_eq!(pres.relators(), &[vec![1, 1]]);
        assert!(pres.phi_word(&[1, 1]).unwrap().is_identity());
        assert!(normal_forms_biject(&pres));
    }

    #[test]
    fn s3_modulo_a3_is_order_two() {
        let pres = constructive_presentation(&s3(), &a3()).unwrap();
        assert_eq!(pres.generator_count(), 1);
        assert_eq!(pres.relative_orders(), &[2]);
        // the single power relator evaluates into A3
        let v = pres.phi_word(&pres.relators()[0]).unwrap();
        assert!(a3().contains(&v));
        assert!(normal_forms_biject(&pres));
    }

    #[test]
    fn s3_full_presentation() {
        let pres = constructive_presentation(&s3(), &PermGroup::trivial(3)).unwrap();
        assert_eq!(pres.generator_count(), 2);
        assert_eq!(pres.relative_orders(), &[2, 3]);
        for r in pres.relators() {
            assert!(pres.phi_word(r).unwrap().is_identity());
        }
        assert!(normal_forms_biject(&pres));
    }

    #[test]
    fn defining_identity_on_random_elements() {
        let cases = vec![
            (s3(), PermGroup::trivial(3)),
            (s3(), a3()),
            (group(12, &["(1,2,3,4,5,6,7,8,9,10,11,12)"]), PermGroup::trivial(12)),
            (
                group(7, &["(1,2,3,4,5,6,7)", "(2,3,5)(4,7,6)"]),
                PermGroup::trivial(7),
            ),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for (g, n) in cases {
            let pres = constructive_presentation(&g, &n).unwrap();
            for _ in 0..200 {
                let x = g.random_element(&mut rng);
                assert!(pres.defining_identity_holds(&x));
            }
        }
    }

    #[test]
    fn pc_presentation_examples() {
        // C6: relative orders [2,3], top factor first
        let c6 = group(6, &["(1,2,3,4,5,6)"]);
        let pc = pc_presentation(&c6).unwrap();
        assert_eq!(pc.relative_orders(), &[2, 3]);
        assert!(pc.underlying().is_collected());
        assert!(normal_forms_biject(pc.underlying()));

        // S3: conjugation relator x2^{x1} = x2²
        let pc = pc_presentation(&s3()).unwrap();
        assert_eq!(pc.relative_orders(), &[2, 3]);
        let conj: Vec<_> = pc
            .underlying()
            .relators()
            .iter()
            .filter(|r| r[0] < 0)
            .collect();
        assert_eq!(conj.len(), 1);
        assert_eq!(conj[0].as_slice(), &[-1, 2, 1, -2, -2]);

        // elementary abelian C3²: all conjugation tails trivial
        let c3c3 = group(6, &["(1,2,3)", "(4,5,6)"]);
        let pc = pc_presentation(&c3c3).unwrap();
        assert_eq!(pc.relative_orders(), &[3, 3]);
        for r in pc.underlying().relators() {
            if r[0] < 0 {
                assert_eq!(r.as_slice(), &[-1, 2, 1, -2], "commuting, empty tail");
            }
        }

        assert!(matches!(
            pc_presentation(&group(5, &["(1,2,3,4,5)", "(1,2,3)"])),
            Err(Error::NotSolvable)
        ));
    }

    #[test]
    fn extension_recovers_s3() {
        let outer = constructive_presentation(&s3(), &a3()).unwrap();
        let inner = constructive_presentation(&a3(), &PermGroup::trivial(3)).unwrap();
        let ext = extend_presentation(&outer, &inner).unwrap();
        assert_eq!(ext.generator_count(), 2);
        assert_eq!(ext.relative_orders(), &[2, 3]);
        assert_eq!(ext.relators().len(), 3, "x1² tail, x2³, twist");
        for r in ext.relators() {
            assert!(ext.phi_word(r).unwrap().is_identity());
        }
        // the twist word has a nontrivial tail: conjugation inverts
        let twist = &ext.relators()[2];
        assert_eq!(twist.as_slice(), &[-1, 2, 1, -2, -2]);
        assert!(normal_forms_biject(&ext));
    }

    #[test]
    fn extension_detects_nonsplit_c4() {
        let c4 = group(4, &["(1,2,3,4)"]);
        let c2 = group(4, &["(1,3)(2,4)"]);
        let outer = constructive_presentation(&c4, &c2).unwrap();
        let inner = constructive_presentation(&c2, &PermGroup::trivial(4)).unwrap();
        let ext = extend_presentation(&outer, &inner).unwrap();
        assert_eq!(ext.relative_orders(), &[2, 2]);
        // the outer power relator picks up the inner generator as its tail:
        // x1² equals x2, so C4 is recognized as a non-split extension
        assert_eq!(ext.relators()[0].as_slice(), &[1, 1, -2]);
        assert!(normal_forms_biject(&ext));
    }

    #[test]
    fn extension_by_trivial_inner_is_identity() {
        let outer = constructive_presentation(&s3(), &a3()).unwrap();
        let inner = constructive_presentation(&a3(), &a3()).unwrap();
        assert_eq!(inner.generator_count(), 0);
        let ext = extend_presentation(&outer, &inner).unwrap();
        assert_eq!(ext.generator_count(), outer.generator_count());
        assert_eq!(ext.relators(), outer.relators());
    }

    #[test]
    fn extension_rejects_mismatched_chain() {
        let outer = constructive_presentation(&s3(), &a3()).unwrap();
        let inner = constructive_presentation(&s3(), &PermGroup::trivial(3)).unwrap();
        assert!(matches!(
            extend_presentation(&outer, &inner),
            Err(Error::IncompatibleChain(_))
        ));
    }

    #[test]
    fn semidirect_trivial_action_gives_c6() {
        // C2 acting trivially on C3, realized on disjoint points
        let c3 = group(5, &["(1,2,3)"]);
        let inner = constructive_presentation(&c3, &PermGroup::trivial(5)).unwrap();
        let swap = Permutation::parse("(4,5)", 5).unwrap();
        let action = OmegaAction::by_conjugation(&c3, std::slice::from_ref(&swap)).unwrap();
        let pres =
            semidirect_presentation(&action, &inner, &[vec![1, 1]], std::slice::from_ref(&swap))
                .unwrap();
        assert_eq!(pres.group().order(), 6);
        assert!(pres.group().is_abelian());
        // twist relator must have the trivial-action shape x2·w⁻¹·x2⁻¹·w… ↦ tail [2]
        assert!(normal_forms_biject(&pres));
    }

    #[test]
    fn semidirect_inversion_gives_s3() {
        let c3 = group(3, &["(1,2,3)"]);
        let inner = constructive_presentation(&c3, &PermGroup::trivial(3)).unwrap();
        let inv = Permutation::parse("(2,3)", 3).unwrap();
        let action = OmegaAction::by_conjugation(&c3, std::slice::from_ref(&inv)).unwrap();
        let pres =
            semidirect_presentation(&action, &inner, &[vec![1, 1]], std::slice::from_ref(&inv))
                .unwrap();
        assert_eq!(pres.group().order(), 6);
        assert!(!pres.group().is_abelian());
        assert!(pres.group().equal_group(&s3()));
        assert!(normal_forms_biject(&pres));
    }

    #[test]
    fn semidirect_empty_action_is_inner() {
        let c3 = group(3, &["(1,2,3)"]);
        let inner = constructive_presentation(&c3, &PermGroup::trivial(3)).unwrap();
        let action = OmegaAction::empty();
        let pres = semidirect_presentation(&action, &inner, &[], &[]).unwrap();
        assert_eq!(pres.generator_count(), inner.generator_count());
        assert_eq!(pres.group().order(), 3);
        assert_eq!(pres.relators(), inner.relators());
    }

    #[test]
    fn serialization_round_trip() {
        let pc = pc_presentation(&s3()).unwrap();
        let json = pc.underlying().to_json().unwrap();
        let doc: PresentationDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(doc.generator_count, 2);
        assert_eq!(doc.relative_orders, vec![2, 3]);
        assert_eq!(doc.relators.len(), 3);
    }
}
