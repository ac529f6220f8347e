//! Linear algebra over Z/p in dimensions one and two: matrices, Singer
//! cycles, discrete logarithms and linear-system solving for the complement
//! equations.
//!
//! Matrices act on *row* vectors from the right (`v ↦ v·M`), matching the
//! right-action convention used for permutations elsewhere in the crate.
//! The modulus is a prime for all 2×2 work; 1×1 matrices (unit groups) may
//! also carry a prime-squared modulus, which is what the complement solver
//! needs when a Frattini factor sits under a cyclic Sylow subgroup of order
//! p².

use crate::error::{Error, Result};

/// Greatest common divisor.
pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Least common multiple (panics on overflow).
pub fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        0
    } else {
        a / gcd(a, b) * b
    }
}

/// `b^e mod m` by square-and-multiply.
pub fn mod_pow(b: u64, mut e: u64, m: u64) -> u64 {
    assert!(m > 0);
    let mut base = (b % m) as u128;
    let m128 = m as u128;
    let mut acc: u128 = 1 % m128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % m128;
        }
        base = base * base % m128;
        e >>= 1;
    }
    acc as u64
}

/// Inverse of `a` mod `m` via the extended Euclidean algorithm, if it exists.
pub fn mod_inv(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = ((a % m) as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    let m128 = m as i128;
    Some(((old_s % m128 + m128) % m128) as u64)
}

/// Trial-division factorization of a small integer, `(prime, exponent)`
/// pairs with primes ascending.
pub(crate) fn factor64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// A 1×1 or 2×2 matrix over Z/p, stored row-major.
///
/// `p` is the modulus: a prime, except that 1×1 matrices also support a
/// prime-squared modulus. Entries are kept reduced into `[0, p)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FpMatrix {
    pub p: u64,
    pub dim: u8,
    /// Row-major entries; a 1×1 matrix uses only `a[0]`.
    pub a: [u64; 4],
}

impl FpMatrix {
    pub fn identity(p: u64, dim: u8) -> Self {
        assert!(dim == 1 || dim == 2);
        FpMatrix {
            p,
            dim,
            a: [1 % p, 0, 0, if dim == 2 { 1 % p } else { 0 }],
        }
    }

    /// 1×1 matrix, i.e. a unit of Z/p.
    pub fn unit(p: u64, x: u64) -> Self {
        FpMatrix {
            p,
            dim: 1,
            a: [x % p, 0, 0, 0],
        }
    }

    /// 2×2 matrix from rows.
    pub fn mat2(p: u64, rows: [[u64; 2]; 2]) -> Self {
        FpMatrix {
            p,
            dim: 2,
            a: [
                rows[0][0] % p,
                rows[0][1] % p,
                rows[1][0] % p,
                rows[1][1] % p,
            ],
        }
    }

    pub fn diag(p: u64, d0: u64, d1: u64) -> Self {
        Self::mat2(p, [[d0, 0], [0, d1]])
    }

    pub fn scalar(p: u64, dim: u8, c: u64) -> Self {
        if dim == 1 {
            Self::unit(p, c)
        } else {
            Self::diag(p, c, c)
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.p, self.dim)
    }

    pub fn is_scalar(&self) -> bool {
        self.dim == 1 || (self.a[1] == 0 && self.a[2] == 0 && self.a[0] == self.a[3])
    }

    pub fn det(&self) -> u64 {
        if self.dim == 1 {
            self.a[0]
        } else {
            let p = self.p as u128;
            let ad = self.a[0] as u128 * self.a[3] as u128 % p;
            let bc = self.a[1] as u128 * self.a[2] as u128 % p;
            ((ad + p - bc) % p) as u64
        }
    }

    pub fn trace(&self) -> u64 {
        if self.dim == 1 {
            self.a[0]
        } else {
            (self.a[0] + self.a[3]) % self.p
        }
    }

    /// Coefficients `(t, d)` with characteristic polynomial `x² − t·x + d`
    /// (2×2 only); conjugation-invariant.
    pub fn charpoly(&self) -> (u64, u64) {
        assert_eq!(self.dim, 2);
        (self.trace(), self.det())
    }

    pub fn mul(&self, other: &FpMatrix) -> FpMatrix {
        assert_eq!(self.p, other.p);
        assert_eq!(self.dim, other.dim);
        let p = self.p as u128;
        if self.dim == 1 {
            return FpMatrix::unit(self.p, (self.a[0] as u128 * other.a[0] as u128 % p) as u64);
        }
        let mut c = [0u64; 4];
        for i in 0..2 {
            for j in 0..2 {
                let mut acc = 0u128;
                for k in 0..2 {
                    acc += self.a[2 * i + k] as u128 * other.a[2 * k + j] as u128;
                }
                c[2 * i + j] = (acc % p) as u64;
            }
        }
        FpMatrix {
            p: self.p,
            dim: 2,
            a: c,
        }
    }

    pub fn inverse(&self) -> Result<FpMatrix> {
        if self.dim == 1 {
            let inv = mod_inv(self.a[0], self.p).ok_or(Error::SingularMatrix)?;
            return Ok(FpMatrix::unit(self.p, inv));
        }
        let det_inv = mod_inv(self.det(), self.p).ok_or(Error::SingularMatrix)?;
        let p = self.p;
        let neg = |x: u64| (p - x % p) % p;
        let adj = FpMatrix::mat2(p, [[self.a[3], neg(self.a[1])], [neg(self.a[2]), self.a[0]]]);
        Ok(adj.mul(&FpMatrix::scalar(p, 2, det_inv)))
    }

    pub fn pow(&self, mut e: u64) -> FpMatrix {
        let mut base = self.clone();
        let mut acc = FpMatrix::identity(self.p, self.dim);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Apply to a row vector: `v ↦ v·M`.
    pub fn apply_row(&self, v: &[u64]) -> Vec<u64> {
        let p = self.p as u128;
        if self.dim == 1 {
            return vec![(v[0] as u128 * self.a[0] as u128 % p) as u64];
        }
        let x = (v[0] as u128 * self.a[0] as u128 + v[1] as u128 * self.a[2] as u128) % p;
        let y = (v[0] as u128 * self.a[1] as u128 + v[1] as u128 * self.a[3] as u128) % p;
        vec![x as u64, y as u64]
    }

    /// Multiplicative order; errors on singular matrices.
    pub fn order(&self) -> Result<u64> {
        if self.dim == 1 {
            if mod_inv(self.a[0], self.p).is_none() {
                return Err(Error::SingularMatrix);
            }
        } else if mod_inv(self.det(), self.p).is_none() {
            return Err(Error::SingularMatrix);
        }
        let cap = if self.dim == 1 {
            self.p
        } else {
            (self.p * self.p - 1) * (self.p * self.p - self.p)
        };
        let mut acc = self.clone();
        let mut k = 1u64;
        while !acc.is_identity() {
            acc = acc.mul(self);
            k += 1;
            if k > cap {
                return Err(Error::Internal(format!(
                    "matrix order exceeded group-order cap {cap}"
                )));
            }
        }
        Ok(k)
    }
}

/// Least k ≥ 1 with `m^k = 1`; errors on singular input.
pub fn matrix_order(m: &FpMatrix) -> Result<u64> {
    m.order()
}

/// Discrete logarithm by brute force: least e ≥ 0 with `base^e ≡ target`
/// (mod `modulus`), or `None` when `target` is not a power of `base`.
pub fn discrete_log(base: u64, target: u64, modulus: u64) -> Option<u64> {
    assert!(modulus > 1);
    let base = base % modulus;
    let target = target % modulus;
    let mut acc = 1u64;
    for e in 0..modulus {
        if acc == target {
            return Some(e);
        }
        acc = (acc as u128 * base as u128 % modulus as u128) as u64;
        if acc == 1 {
            // the powers of `base` have cycled without hitting `target`
            return if target == 1 { Some(0) } else { None };
        }
    }
    None
}

/// Discrete logarithm in a cyclic matrix group: least e ≥ 0 with
/// `base^e = target`, scanning up to the order of `base`.
pub fn matrix_discrete_log(base: &FpMatrix, target: &FpMatrix) -> Option<u64> {
    let ord = base.order().ok()?;
    let mut acc = FpMatrix::identity(base.p, base.dim);
    for e in 0..ord {
        if acc == *target {
            return Some(e);
        }
        acc = acc.mul(base);
    }
    None
}

/// A generator of a Singer cycle in GL₂(p): a matrix of order exactly p²−1.
#[derive(Clone, Debug)]
pub struct SingerCycle {
    pub p: u64,
    pub s: FpMatrix,
}

/// Find a Singer-cycle generator for odd p by scanning companion matrices
/// of monic quadratics x² + b·x + c in lexicographic (b, c) order and
/// testing for irreducibility and full multiplicative order p²−1.
pub fn singer_cycle(p: u64) -> Result<SingerCycle> {
    if p == 2 {
        return Err(Error::SingerCharTwo);
    }
    assert!(p > 2 && factor64(p).len() == 1 && factor64(p)[0].1 == 1, "p must be prime");
    let target = p * p - 1;
    for b in 0..p {
        'next: for c in 1..p {
            // irreducible ⟺ no root in Z/p
            for x in 0..p {
                if (x * x + b * x + c) % p == 0 {
                    continue 'next;
                }
            }
            let neg = |v: u64| (p - v % p) % p;
            let m = FpMatrix::mat2(p, [[0, 1], [neg(c), neg(b)]]);
            if m.order()? == target {
                return Ok(SingerCycle { p, s: m });
            }
        }
    }
    Err(Error::Internal(format!("no Singer generator found for p={p}")))
}

/// One component per factor of a fixed ∏GL₁(pᵢ) × ∏GL₂(pⱼ) frame;
/// multiplication is componentwise.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct GLProductElement {
    pub comps: Vec<FpMatrix>,
}

impl GLProductElement {
    pub fn identity_like(&self) -> Self {
        GLProductElement {
            comps: self
                .comps
                .iter()
                .map(|m| FpMatrix::identity(m.p, m.dim))
                .collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.comps.iter().all(|m| m.is_identity())
    }

    pub fn mul(&self, other: &GLProductElement) -> GLProductElement {
        assert_eq!(self.comps.len(), other.comps.len());
        GLProductElement {
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a.mul(b))
                .collect(),
        }
    }

    pub fn inverse(&self) -> Result<GLProductElement> {
        Ok(GLProductElement {
            comps: self
                .comps
                .iter()
                .map(|m| m.inverse())
                .collect::<Result<_>>()?,
        })
    }

    /// (prime, dim) signature of the product frame.
    pub fn signature(&self) -> Vec<(u64, u8)> {
        self.comps.iter().map(|m| (m.p, m.dim)).collect()
    }
}

/// Row-reduce `a·x = b` over Z/p (p prime). Returns a particular solution
/// together with a basis of the homogeneous solution space, or `None` when
/// the system is inconsistent.
pub(crate) fn solve_mod_prime(
    a: &[Vec<u64>],
    b: &[u64],
    p: u64,
) -> Option<(Vec<u64>, Vec<Vec<u64>>)> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let mut m: Vec<Vec<u64>> = a
        .iter()
        .map(|r| r.iter().map(|&x| x % p).collect())
        .collect();
    let mut rhs: Vec<u64> = b.iter().map(|&x| x % p).collect();

    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, col)
    let mut r = 0usize;
    for col in 0..cols {
        let Some(pr) = (r..rows).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(r, pr);
        rhs.swap(r, pr);
        let inv = mod_inv(m[r][col], p).expect("prime modulus");
        for x in m[r].iter_mut() {
            *x = (*x as u128 * inv as u128 % p as u128) as u64;
        }
        rhs[r] = (rhs[r] as u128 * inv as u128 % p as u128) as u64;
        for i in 0..rows {
            if i != r && m[i][col] != 0 {
                let f = m[i][col];
                for j in 0..cols {
                    let sub = f as u128 * m[r][j] as u128 % p as u128;
                    m[i][j] = ((m[i][j] as u128 + p as u128 - sub) % p as u128) as u64;
                }
                let sub = f as u128 * rhs[r] as u128 % p as u128;
                rhs[i] = ((rhs[i] as u128 + p as u128 - sub) % p as u128) as u64;
            }
        }
        pivots.push((r, col));
        r += 1;
        if r == rows {
            break;
        }
    }
    for i in r..rows {
        if rhs[i] != 0 {
            return None;
        }
    }
    let mut particular = vec![0u64; cols];
    for &(pr, pc) in &pivots {
        particular[pc] = rhs[pr];
    }
    let pivot_cols: Vec<usize> = pivots.iter().map(|&(_, c)| c).collect();
    let mut kernel = Vec::new();
    for f in 0..cols {
        if pivot_cols.contains(&f) {
            continue;
        }
        let mut v = vec![0u64; cols];
        v[f] = 1;
        for &(pr, pc) in &pivots {
            v[pc] = (p - m[pr][f] % p) % p;
        }
        kernel.push(v);
    }
    Some((particular, kernel))
}

/// Solve `a·x = b` over Z/p² by solving mod p and lifting.
fn solve_mod_prime_squared(a: &[Vec<u64>], b: &[u64], p: u64) -> Option<Vec<u64>> {
    let m = p * p;
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    let (u, kernel) = solve_mod_prime(a, b, p)?;
    // residual r = (A·u − b)/p mod p
    let mut residual = vec![0u64; rows];
    for i in 0..rows {
        let mut acc: u128 = 0;
        for j in 0..cols {
            acc += a[i][j] as u128 % m as u128 * u[j] as u128;
        }
        let au = (acc % m as u128) as u64;
        let diff = (au + m - b[i] % m) % m;
        debug_assert_eq!(diff % p, 0, "mod-p solution must reduce the residual");
        residual[i] = diff / p % p;
    }
    // columns for kernel coefficients: w_k = (A·v_k)/p mod p
    let mut big: Vec<Vec<u64>> = vec![vec![0u64; kernel.len() + cols]; rows];
    for (k, v) in kernel.iter().enumerate() {
        for i in 0..rows {
            let mut acc: u128 = 0;
            for j in 0..cols {
                acc += a[i][j] as u128 % m as u128 * v[j] as u128;
            }
            let av = (acc % m as u128) as u64;
            debug_assert_eq!(av % p, 0);
            big[i][k] = av / p % p;
        }
    }
    for i in 0..rows {
        for j in 0..cols {
            big[i][kernel.len() + j] = a[i][j] % p;
        }
    }
    let neg_r: Vec<u64> = residual.iter().map(|&x| (p - x) % p).collect();
    let (ty, _) = solve_mod_prime(&big, &neg_r, p)?;
    let mut x = u;
    for (k, v) in kernel.iter().enumerate() {
        for j in 0..cols {
            x[j] = (x[j] + ty[k] * v[j]) % m;
        }
    }
    for j in 0..cols {
        x[j] = (x[j] + p * ty[kernel.len() + j]) % m;
    }
    Some(x)
}

/// Solve `a·x ≡ b (mod modulus)`.
///
/// The modulus may be a prime, a prime squared, or any product of such over
/// distinct primes (CRT split); cube factors are rejected. Returns one
/// solution or `None` when the system is inconsistent.
pub fn solve_linear_system(
    a: &[Vec<u64>],
    b: &[u64],
    modulus: u64,
) -> Result<Option<Vec<u64>>> {
    let rows = a.len();
    let cols = if rows == 0 { 0 } else { a[0].len() };
    if a.iter().any(|r| r.len() != cols) || b.len() != rows {
        return Err(Error::DimensionMismatch);
    }
    if modulus == 1 {
        return Ok(Some(vec![0; cols]));
    }
    let mut component_solutions: Vec<(u64, Vec<u64>)> = Vec::new();
    for (p, e) in factor64(modulus) {
        let sol = match e {
            1 => solve_mod_prime(a, b, p).map(|(x, _)| x),
            2 => solve_mod_prime_squared(a, b, p),
            _ => return Err(Error::BadModulus(modulus)),
        };
        match sol {
            None => return Ok(None),
            Some(x) => component_solutions.push((p.pow(e), x)),
        }
    }
    // CRT-combine the per-prime-power solutions coordinatewise.
    let mut x = vec![0u64; cols];
    let mut m_acc = 1u64;
    for (pk, sol) in component_solutions {
        if m_acc == 1 {
            x = sol;
            m_acc = pk;
            continue;
        }
        let inv = mod_inv(m_acc % pk, pk).expect("coprime CRT moduli");
        for j in 0..cols {
            // x ≡ x[j] (mod m_acc), x ≡ sol[j] (mod pk)
            let diff = (sol[j] % pk + pk - x[j] % pk) % pk;
            let t = diff as u128 * inv as u128 % pk as u128;
            x[j] = (x[j] as u128 + m_acc as u128 * t) as u64;
        }
        m_acc *= pk;
    }
    Ok(Some(x))
}
