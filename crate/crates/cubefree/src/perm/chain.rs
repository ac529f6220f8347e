//! Deterministic Schreier–Sims stabilizer chains.
//!
//! The chain keeps every strong generator together with a straight-line
//! program (SLP) over the *original* generators, held in one shared arena.
//! Those programs let a homomorphism defined on the original generators be
//! evaluated on arbitrary group elements: sift the element to a word in the
//! strong generators, then replay each strong generator's program over the
//! generator images.
//!
//! Base points are chosen deterministically (smallest moved point of the
//! element that forces a new level), orbits are filled by BFS in generator
//! order, and no randomization is used anywhere, so chains — and therefore
//! words, orders of iteration, and everything derived from them — are
//! reproducible.

use super::permutation::Permutation;

/// One node of the straight-line-program arena. Children always have
/// smaller indices, so evaluation in index order is well-founded.
#[derive(Clone, Copy, Debug)]
pub(crate) enum SlpNode {
    Id,
    /// Original generator by index.
    Gen(usize),
    /// Inverse of an earlier node.
    Inv(usize),
    /// Product: left node applied first, then right node.
    Prod(usize, usize),
}

struct Level {
    beta: u32,
    /// Strong-generator ids whose permutations fix all earlier base points.
    gens: Vec<usize>,
    /// point → orbit position + 1; 0 when outside the orbit.
    pos: Vec<u32>,
    /// Per orbit position: (strong gen id, parent point); root uses itself.
    tree: Vec<(usize, u32)>,
    /// Orbit in BFS discovery order; `orbit[0] == beta`.
    orbit: Vec<u32>,
    /// Arena node of the transversal representative per orbit position.
    tslp: Vec<usize>,
}

impl Level {
    fn new(beta: u32, degree: usize) -> Self {
        Level {
            beta,
            gens: Vec::new(),
            pos: vec![0; degree],
            tree: Vec::new(),
            orbit: Vec::new(),
            tslp: Vec::new(),
        }
    }
}

pub(crate) struct StabChain {
    degree: usize,
    strong: Vec<Permutation>,
    strong_slp: Vec<usize>,
    arena: Vec<SlpNode>,
    levels: Vec<Level>,
    order: u128,
}

const ID_NODE: usize = 0;

impl StabChain {
    /// Build a verified chain. When `known_order` is supplied, construction
    /// stops as soon as the product of orbit sizes reaches it: the product
    /// never exceeds the true order and equals it exactly when the chain is
    /// complete, so a declared order that is an upper bound is safe (the
    /// early exit simply never fires and the full build reports the honest
    /// order), while an underestimate would produce a wrong chain.
    pub(crate) fn build(
        degree: usize,
        gens: &[Permutation],
        known_order: Option<u128>,
    ) -> StabChain {
        let mut chain = StabChain {
            degree,
            strong: Vec::new(),
            strong_slp: Vec::new(),
            arena: vec![SlpNode::Id],
            levels: Vec::new(),
            order: 1,
        };
        for (k, g) in gens.iter().enumerate() {
            if !g.is_identity() {
                chain.arena.push(SlpNode::Gen(k));
                chain.strong.push(g.clone());
                chain.strong_slp.push(chain.arena.len() - 1);
            }
        }
        let seed_count = chain.strong.len();
        for s in 0..seed_count {
            chain.insert_strong(s);
        }
        if let Some(k) = known_order {
            if chain.current_order() == k {
                chain.order = k;
                return chain;
            }
        }

        let mut down = chain.levels.len() as isize - 1;
        'outer: while down >= 0 {
            let lvl = down as usize;
            let mut oi = 0usize;
            while oi < chain.levels[lvl].orbit.len() {
                let x = chain.levels[lvl].orbit[oi];
                let xpos = (chain.levels[lvl].pos[x as usize] - 1) as usize;
                let ux = chain.transversal_rep(lvl, x);
                let ux_node = chain.levels[lvl].tslp[xpos];
                for gi in 0..chain.levels[lvl].gens.len() {
                    let s = chain.levels[lvl].gens[gi];
                    let y = chain.strong[s].image(x);
                    let ypos = (chain.levels[lvl].pos[y as usize] - 1) as usize;
                    let uy = chain.transversal_rep(lvl, y);
                    let schreier = ux.compose(&chain.strong[s]).compose(&uy.inverse());
                    if schreier.is_identity() {
                        continue;
                    }
                    let uy_node = chain.levels[lvl].tslp[ypos];
                    let snode = {
                        let a = chain.push_node(SlpNode::Prod(ux_node, chain.strong_slp[s]));
                        let b = chain.push_node(SlpNode::Inv(uy_node));
                        chain.push_node(SlpNode::Prod(a, b))
                    };
                    if let Some((residue, rnode)) = chain.sift_tracked(lvl + 1, schreier, snode)
                    {
                        chain.strong.push(residue);
                        chain.strong_slp.push(rnode);
                        let j = chain.insert_strong(chain.strong.len() - 1);
                        if let Some(k) = known_order {
                            if chain.current_order() == k {
                                chain.order = k;
                                return chain;
                            }
                        }
                        down = j as isize;
                        continue 'outer;
                    }
                }
                oi += 1;
            }
            down -= 1;
        }
        chain.order = chain.current_order();
        chain
    }

    fn push_node(&mut self, n: SlpNode) -> usize {
        self.arena.push(n);
        self.arena.len() - 1
    }

    fn current_order(&self) -> u128 {
        self.levels
            .iter()
            .map(|l| l.orbit.len() as u128)
            .product()
    }

    /// Place a strong generator: find the first level whose base point it
    /// moves (appending a new level if it fixes all of them), register it
    /// at every level up to that one, and rebuild the affected orbits.
    /// Returns the placement level.
    fn insert_strong(&mut self, s: usize) -> usize {
        let g = self.strong[s].clone();
        debug_assert!(!g.is_identity());
        let mut j = self.levels.len();
        for (i, lvl) in self.levels.iter().enumerate() {
            if g.image(lvl.beta) != lvl.beta {
                j = i;
                break;
            }
        }
        if j == self.levels.len() {
            let beta = g.min_moved().expect("non-identity");
            self.levels.push(Level::new(beta, self.degree));
        }
        for i in 0..=j {
            self.levels[i].gens.push(s);
        }
        for i in 0..=j {
            self.rebuild_orbit(i);
        }
        j
    }

    fn rebuild_orbit(&mut self, li: usize) {
        let beta = self.levels[li].beta;
        let gens = self.levels[li].gens.clone();
        let lvl = &mut self.levels[li];
        lvl.pos.iter_mut().for_each(|x| *x = 0);
        lvl.orbit.clear();
        lvl.tree.clear();
        lvl.tslp.clear();
        lvl.orbit.push(beta);
        lvl.pos[beta as usize] = 1;
        lvl.tree.push((usize::MAX, beta));
        lvl.tslp.push(ID_NODE);
        let mut i = 0usize;
        while i < self.levels[li].orbit.len() {
            let x = self.levels[li].orbit[i];
            let xnode = self.levels[li].tslp[i];
            for &s in &gens {
                let y = self.strong[s].image(x);
                if self.levels[li].pos[y as usize] == 0 {
                    let node = self.push_node(SlpNode::Prod(xnode, self.strong_slp[s]));
                    let lvl = &mut self.levels[li];
                    lvl.orbit.push(y);
                    lvl.pos[y as usize] = lvl.orbit.len() as u32;
                    lvl.tree.push((s, x));
                    lvl.tslp.push(node);
                }
            }
            i += 1;
        }
    }

    pub(crate) fn levels_len(&self) -> usize {
        self.levels.len()
    }

    pub(crate) fn level_orbit(&self, li: usize) -> &[u32] {
        &self.levels[li].orbit
    }

    /// Transversal representative mapping the level's base point to `x`.
    pub(crate) fn transversal_rep(&self, li: usize, x: u32) -> Permutation {
        let mut path = Vec::new();
        let lvl = &self.levels[li];
        let mut cur = x;
        while cur != lvl.beta {
            let (s, parent) = lvl.tree[(lvl.pos[cur as usize] - 1) as usize];
            path.push(s);
            cur = parent;
        }
        let mut rep = Permutation::identity(self.degree);
        for &s in path.iter().rev() {
            rep = rep.compose(&self.strong[s]);
        }
        rep
    }

    /// Sift starting at `from`, tracking the SLP. Returns the non-identity
    /// residue and its program when the element does not sift to identity.
    fn sift_tracked(
        &mut self,
        from: usize,
        mut h: Permutation,
        mut hnode: usize,
    ) -> Option<(Permutation, usize)> {
        for li in from..self.levels.len() {
            if h.is_identity() {
                return None;
            }
            let beta = self.levels[li].beta;
            let x = h.image(beta);
            if self.levels[li].pos[x as usize] == 0 {
                return Some((h, hnode));
            }
            let u = self.transversal_rep(li, x);
            let unode = self.levels[li].tslp[(self.levels[li].pos[x as usize] - 1) as usize];
            h = h.compose(&u.inverse());
            let inv = self.push_node(SlpNode::Inv(unode));
            hnode = self.push_node(SlpNode::Prod(hnode, inv));
        }
        if h.is_identity() {
            None
        } else {
            Some((h, hnode))
        }
    }

    pub(crate) fn order(&self) -> u128 {
        self.order
    }

    pub(crate) fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.beta).collect()
    }

    pub(crate) fn strong_count(&self) -> usize {
        self.strong.len()
    }

    pub(crate) fn strong_perm(&self, id: usize) -> &Permutation {
        &self.strong[id]
    }

    pub(crate) fn contains(&self, g: &Permutation) -> bool {
        g.degree() == self.degree && self.decompose(g).is_some()
    }

    /// Express `g` as a product of strong generators (applied left to
    /// right), or `None` when `g` is not in the group.
    pub(crate) fn decompose(&self, g: &Permutation) -> Option<Vec<usize>> {
        if g.degree() != self.degree {
            return None;
        }
        let mut h = g.clone();
        let mut parts: Vec<Vec<usize>> = Vec::new();
        for lvl in &self.levels {
            if h.is_identity() {
                break;
            }
            let x = h.image(lvl.beta);
            if lvl.pos[x as usize] == 0 {
                return None;
            }
            // path of strong generators from the base point to x
            let mut path = Vec::new();
            let mut cur = x;
            while cur != lvl.beta {
                let (s, parent) = lvl.tree[(lvl.pos[cur as usize] - 1) as usize];
                path.push(s);
                cur = parent;
            }
            path.reverse();
            let mut u = Permutation::identity(self.degree);
            for &s in &path {
                u = u.compose(&self.strong[s]);
            }
            h = h.compose(&u.inverse());
            parts.push(path);
        }
        if h.is_identity() {
            // g = u_(k) · … · u_(1): deepest level's representative first
            let mut word = Vec::new();
            for part in parts.iter().rev() {
                word.extend_from_slice(part);
            }
            Some(word)
        } else {
            None
        }
    }

    /// Multiply out a decomposition word over the strong generators.
    pub(crate) fn evaluate_word(&self, word: &[usize]) -> Permutation {
        let mut acc = Permutation::identity(self.degree);
        for &s in word {
            acc = acc.compose(&self.strong[s]);
        }
        acc
    }

    /// Replay a decomposition word over substitute images of the strong
    /// generators.
    pub(crate) fn evaluate_word_with(
        &self,
        word: &[usize],
        strong_images: &[Permutation],
        out_degree: usize,
    ) -> Permutation {
        let mut acc = Permutation::identity(out_degree);
        for &s in word {
            acc = acc.compose(&strong_images[s]);
        }
        acc
    }

    /// Evaluate every strong generator's straight-line program over
    /// substitute images of the original generators. `subst[k]` replaces
    /// original generator `k`; all substitutes must share `out_degree`.
    pub(crate) fn strong_images(
        &self,
        subst: &[Permutation],
        out_degree: usize,
    ) -> Vec<Permutation> {
        // mark nodes reachable from the strong-generator roots
        let mut needed = vec![false; self.arena.len()];
        let mut stack: Vec<usize> = self.strong_slp.clone();
        while let Some(n) = stack.pop() {
            if needed[n] {
                continue;
            }
            needed[n] = true;
            match self.arena[n] {
                SlpNode::Id | SlpNode::Gen(_) => {}
                SlpNode::Inv(a) => stack.push(a),
                SlpNode::Prod(a, b) => {
                    stack.push(a);
                    stack.push(b);
                }
            }
        }
        let mut memo: Vec<Option<Permutation>> = vec![None; self.arena.len()];
        for n in 0..self.arena.len() {
            if !needed[n] {
                continue;
            }
            let v = match self.arena[n] {
                SlpNode::Id => Permutation::identity(out_degree),
                SlpNode::Gen(k) => subst[k].clone(),
                SlpNode::Inv(a) => memo[a].as_ref().expect("child evaluated").inverse(),
                SlpNode::Prod(a, b) => memo[a]
                    .as_ref()
                    .expect("child evaluated")
                    .compose(memo[b].as_ref().expect("child evaluated")),
            };
            memo[n] = Some(v);
        }
        self.strong_slp
            .iter()
            .map(|&r| memo[r].clone().expect("root evaluated"))
            .collect()
    }

    /// All group elements, or `None` when the order exceeds `cap`.
    pub(crate) fn elements_capped(&self, cap: u128) -> Option<Vec<Permutation>> {
        if self.order > cap {
            return None;
        }
        let mut acc = vec![Permutation::identity(self.degree)];
        for li in (0..self.levels.len()).rev() {
            let reps: Vec<Permutation> = self.levels[li]
                .orbit
                .iter()
                .map(|&x| self.transversal_rep(li, x))
                .collect();
            let mut next = Vec::with_capacity(acc.len() * reps.len());
            for e in &acc {
                for r in &reps {
                    next.push(e.compose(r));
                }
            }
            acc = next;
        }
        debug_assert_eq!(acc.len() as u128, self.order);
        Some(acc)
    }

    /// Uniformly random element: product of uniformly random transversal
    /// representatives, deepest level first.
    pub(crate) fn random_element<R: rand::Rng>(&self, rng: &mut R) -> Permutation {
        let mut acc = Permutation::identity(self.degree);
        for li in (0..self.levels.len()).rev() {
            let pick = rng.gen_range(0..self.levels[li].orbit.len());
            let x = self.levels[li].orbit[pick];
            acc = acc.compose(&self.transversal_rep(li, x));
        }
        acc
    }
}
