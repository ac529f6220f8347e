//! Single permutations: composition, cycle decomposition, cycle-notation I/O.
//!
//! Points are 0-based internally and 1-based in all text I/O. Permutations
//! act on the right: `x^g = g.image(x)`, and `compose(g, h)` is "apply `g`,
//! then `h`", so that `x^(g·h) = (x^g)^h`. Conjugation is `g^h = h⁻¹·g·h`
//! and the commutator is `[g, h] = g⁻¹·g^h`.

use std::fmt;

use crate::error::{Error, Result};
use crate::modp;

/// A permutation of `{0, …, degree−1}`, stored as its image array.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree as u32).collect(),
        }
    }

    /// Build from an image array, checking bijectivity.
    pub fn from_images(images: Vec<u32>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &y in &images {
            if y as usize >= n || seen[y as usize] {
                return Err(Error::ParsePermutation(
                    "image array is not a bijection".into(),
                ));
            }
            seen[y as usize] = true;
        }
        Ok(Permutation { images })
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    /// Image of a point under the permutation (right action `x^g`).
    #[inline]
    pub fn image(&self, x: u32) -> u32 {
        self.images[x as usize]
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &y)| i as u32 == y)
    }

    /// `self` applied first, then `other`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(
            self.degree(),
            other.degree(),
            "composing permutations of different degrees"
        );
        Permutation {
            images: self
                .images
                .iter()
                .map(|&y| other.images[y as usize])
                .collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u32; self.images.len()];
        for (i, &y) in self.images.iter().enumerate() {
            inv[y as usize] = i as u32;
        }
        Permutation { images: inv }
    }

    /// Conjugate `h⁻¹·self·h`.
    pub fn conjugated_by(&self, h: &Permutation) -> Permutation {
        assert_eq!(self.degree(), h.degree());
        let mut images = vec![0u32; self.images.len()];
        for x in 0..self.images.len() {
            images[h.images[x] as usize] = h.images[self.images[x] as usize];
        }
        Permutation { images }
    }

    /// Commutator `a⁻¹·b⁻¹·a·b`.
    pub fn commutator(a: &Permutation, b: &Permutation) -> Permutation {
        a.inverse().compose(&a.conjugated_by(b))
    }

    /// The same permutation on a larger domain, fixing the added points.
    pub fn padded(&self, degree: usize) -> Permutation {
        assert!(degree >= self.degree(), "padding cannot shrink the domain");
        let mut images: Vec<u32> = self.images.clone();
        images.extend(self.degree() as u32..degree as u32);
        Permutation { images }
    }

    pub fn pow(&self, e: i64) -> Permutation {
        let mut base = if e < 0 { self.inverse() } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = Permutation::identity(self.degree());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base);
            }
            base = base.compose(&base);
            e >>= 1;
        }
        acc
    }

    /// Order = lcm of the cycle lengths.
    pub fn order(&self) -> u128 {
        let mut ord = 1u128;
        for c in self.cycles() {
            let l = c.len() as u64;
            ord = ord / modp::gcd(ord as u64, l) as u128 * l as u128;
        }
        ord
    }

    /// Non-trivial cycles, each starting at its smallest point, sorted by
    /// that point.
    pub fn cycles(&self) -> Vec<Vec<u32>> {
        let n = self.images.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n as u32 {
            if seen[start as usize] || self.images[start as usize] == start {
                seen[start as usize] = true;
                continue;
            }
            let mut cyc = vec![start];
            seen[start as usize] = true;
            let mut x = self.images[start as usize];
            while x != start {
                seen[x as usize] = true;
                cyc.push(x);
                x = self.images[x as usize];
            }
            out.push(cyc);
        }
        out
    }

    pub fn moved_points(&self) -> Vec<u32> {
        (0..self.images.len() as u32)
            .filter(|&x| self.images[x as usize] != x)
            .collect()
    }

    pub fn min_moved(&self) -> Option<u32> {
        (0..self.images.len() as u32).find(|&x| self.images[x as usize] != x)
    }

    /// Parse cycle notation over 1-based points, e.g. `"(1,2)(3,4,5)"`;
    /// `"()"` is the identity. Points not mentioned are fixed.
    pub fn parse(text: &str, degree: usize) -> Result<Permutation> {
        let bad = |msg: &str| Error::ParsePermutation(format!("{msg} in {text:?}"));
        let mut images: Vec<u32> = (0..degree as u32).collect();
        let mut used = vec![false; degree];
        let s = text.as_bytes();
        let mut i = 0usize;
        if s.is_empty() {
            return Err(bad("empty input"));
        }
        while i < s.len() {
            if s[i] != b'(' {
                return Err(bad("expected '('"));
            }
            i += 1;
            let mut cycle: Vec<u32> = Vec::new();
            loop {
                if i < s.len() && s[i] == b')' && cycle.is_empty() {
                    i += 1;
                    break; // "()" empty cycle
                }
                let start = i;
                while i < s.len() && s[i].is_ascii_digit() {
                    i += 1;
                }
                if i == start {
                    return Err(bad("expected a point"));
                }
                let pt: u64 = text[start..i].parse().map_err(|_| bad("bad integer"))?;
                if pt == 0 {
                    return Err(bad("points are 1-based"));
                }
                if pt as usize > degree {
                    return Err(bad("point exceeds degree"));
                }
                let p0 = (pt - 1) as u32;
                if used[p0 as usize] {
                    return Err(bad("repeated point"));
                }
                used[p0 as usize] = true;
                cycle.push(p0);
                if i >= s.len() {
                    return Err(bad("unterminated cycle"));
                }
                match s[i] {
                    b',' => i += 1,
                    b')' => {
                        i += 1;
                        break;
                    }
                    _ => return Err(bad("expected ',' or ')'")),
                }
            }
            if cycle.len() == 1 {
                return Err(bad("singleton cycle"));
            }
            for w in 0..cycle.len() {
                images[cycle[w] as usize] = cycle[(w + 1) % cycle.len()];
            }
        }
        Ok(Permutation { images })
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cycles = self.cycles();
        if cycles.is_empty() {
            return write!(f, "()");
        }
        for c in cycles {
            write!(f, "(")?;
            for (i, p) in c.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", p + 1)?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl std::ops::Mul for &Permutation {
    type Output = Permutation;
    fn mul(self, rhs: &Permutation) -> Permutation {
        self.compose(rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        let g = Permutation::parse("(1,2,3)", 3).unwrap();
        assert_eq!(g.images(), &[1, 2, 0]);
        let id = Permutation::parse("()", 5).unwrap();
        assert!(id.is_identity());
        assert_eq!(id.degree(), 5);
        let g = Permutation::parse("(1,2)(3,4,5)", 5).unwrap();
        assert_eq!(g.order(), 6);
    }

    #[test]
    fn parse_errors() {
        assert!(Permutation::parse("(1,2", 3).is_err());
        assert!(Permutation::parse("(1,2)(2,3)", 3).is_err());
        assert!(Permutation::parse("(1,4)", 3).is_err());
        assert!(Permutation::parse("(0,1)", 3).is_err());
        assert!(Permutation::parse("(1)", 3).is_err());
        assert!(Permutation::parse("", 3).is_err());
        assert!(Permutation::parse("(1,2)x", 3).is_err());
    }

    #[test]
    fn print_round_trip() {
        for text in ["()", "(1,2)", "(1,2,3)(4,5)", "(2,4)(3,5,6)"] {
            let g = Permutation::parse(text, 6).unwrap();
            assert_eq!(g.to_string(), text);
        }
    }

    #[test]
    fn composition_convention() {
        // x^(g·h) = (x^g)^h
        let g = Permutation::parse("(1,2)", 3).unwrap();
        let h = Permutation::parse("(2,3)", 3).unwrap();
        let gh = g.compose(&h);
        // 1 → 2 under g, 2 → 3 under h
        assert_eq!(gh.image(0), 2);
        assert_eq!(gh.to_string(), "(1,3,2)");
    }

    #[test]
    fn conjugation_and_commutator() {
        let g = Permutation::parse("(1,2,3)", 4).unwrap();
        let h = Permutation::parse("(3,4)", 4).unwrap();
        let c = g.conjugated_by(&h);
        assert_eq!(c, h.inverse().compose(&g).compose(&h));
        assert_eq!(c.to_string(), "(1,2,4)");
        let k = Permutation::commutator(&g, &h);
        assert_eq!(
            k,
            g.inverse().compose(&h.inverse()).compose(&g).compose(&h)
        );
    }

    #[test]
    fn pow_and_order() {
        let g = Permutation::parse("(1,2,3,4,5,6)", 6).unwrap();
        assert_eq!(g.order(), 6);
        assert!(g.pow(6).is_identity());
        assert_eq!(g.pow(-1), g.inverse());
        assert_eq!(g.pow(4), g.pow(-2));
    }
}
