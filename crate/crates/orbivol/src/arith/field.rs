//! Finite fields F_{p^r} with table-driven multiplication.
//!
//! Elements are stored as their base-p encoding `Σ c_i p^i`, where `c_i` are the
//! coordinates in the power basis of the modulus. Zero is `Fq(0)`, one is `Fq(1)`,
//! and prime-field elements keep their usual integer value.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use super::ArithError;

/// Largest field order for which log/exp tables are built.
pub const MAX_FIELD_ORDER: u64 = 1 << 24;

/// An element of a finite field, in base-p encoding.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Fq(pub u32);

impl fmt::Debug for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Fq {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub type Field = Arc<FieldDescriptor>;

pub struct FieldDescriptor {
    p: u32,
    r: u32,
    q: u32,
    /// Monic modulus, low degree first, length r + 1.
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
}

impl fmt::Debug for FieldDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F_{}^{} mod {:?}", self.p, self.r, self.modulus)
    }
}

impl PartialEq for FieldDescriptor {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.r == other.r && self.modulus == other.modulus
    }
}

impl Eq for FieldDescriptor {}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Returns `(p, r)` with `q = p^r`, or `None` if `q` is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while q % p != 0 {
        p += 1;
    }
    let (mut m, mut r) = (q, 0);
    while m % p == 0 {
        m /= p;
        r += 1;
    }
    (m == 1).then_some((p, r))
}

pub fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Dense polynomials over F_p, low degree first, used only while building a field.

fn ptrim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn pmulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let p64 = p as u64;
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x as u64 * y as u64) % p64;
        }
    }
    let mut prod: Vec<u32> = prod.into_iter().map(|x| x as u32).collect();
    prem(&mut prod, m, p);
    prod
}

/// Reduces `a` modulo the monic polynomial `m`.
fn prem(a: &mut Vec<u32>, m: &[u32], p: u32) {
    let dm = m.len() - 1;
    ptrim(a);
    while a.len() > dm {
        let lead = *a.last().unwrap();
        let shift = a.len() - 1 - dm;
        for (i, &c) in m.iter().enumerate() {
            let sub = (lead as u64 * c as u64 % p as u64) as u32;
            a[shift + i] = (a[shift + i] + p - sub) % p;
        }
        ptrim(a);
    }
}

fn ppowmod(base: &[u32], mut e: u64, m: &[u32], p: u32) -> Vec<u32> {
    let mut result = vec![1u32];
    let mut b = base.to_vec();
    prem(&mut b, m, p);
    while e > 0 {
        if e & 1 == 1 {
            result = pmulmod(&result, &b, m, p);
        }
        b = pmulmod(&b, &b, m, p);
        e >>= 1;
    }
    result
}

fn pinv_scalar(a: u32, p: u32) -> u32 {
    let mut r = 1u64;
    let mut b = a as u64;
    let mut e = p as u64 - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % p as u64;
        }
        b = b * b % p as u64;
        e >>= 1;
    }
    r as u32
}

fn pgcd(a: &[u32], b: &[u32], p: u32) -> Vec<u32> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    ptrim(&mut a);
    ptrim(&mut b);
    while !b.is_empty() {
        let inv = pinv_scalar(*b.last().unwrap(), p);
        let monic: Vec<u32> = b
            .iter()
            .map(|&c| (c as u64 * inv as u64 % p as u64) as u32)
            .collect();
        prem(&mut a, &monic, p);
        std::mem::swap(&mut a, &mut b);
    }
    a
}

/// Rabin's irreducibility test for a monic polynomial of degree r over F_p.
fn is_irreducible(m: &[u32], p: u32) -> bool {
    let r = (m.len() - 1) as u64;
    let x = vec![0u32, 1];
    let pp = p as u64;
    // x^{p^k} mod m
    let frob_power = |k: u64| {
        let mut acc = x.clone();
        for _ in 0..k {
            acc = ppowmod(&acc, pp, m, p);
        }
        acc
    };
    let full = frob_power(r);
    let mut diff = full.clone();
    diff.resize(diff.len().max(2), 0);
    diff[1] = (diff[1] + p - 1) % p;
    ptrim(&mut diff);
    if !diff.is_empty() {
        return false;
    }
    for l in prime_factors(r) {
        let mut h = frob_power(r / l);
        h.resize(h.len().max(2), 0);
        h[1] = (h[1] + p - 1) % p;
        ptrim(&mut h);
        let g = pgcd(m, &h, p);
        if g.len() != 1 {
            return false;
        }
    }
    true
}

fn encode(coords: &[u32], p: u32) -> u32 {
    coords.iter().rev().fold(0u32, |acc, &c| acc * p + c)
}

fn decode(mut v: u32, p: u32, r: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(r as usize);
    for _ in 0..r {
        out.push(v % p);
        v /= p;
    }
    out
}

fn field_cache() -> &'static Mutex<HashMap<(u32, u32), Field>> {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), Field>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Builds F_{p^r} with the lexicographically smallest monic irreducible modulus.
///
/// Candidates `x^r + c_{r-1}x^{r-1} + ... + c_0` are ordered by the integer
/// `Σ c_i p^i`, so the constant term is the least significant digit.
pub fn make_field(p: u64, r: u32) -> Result<Field, ArithError> {
    if !is_prime(p) {
        return Err(ArithError::NotPrime(p));
    }
    if r == 0 {
        return Err(ArithError::BadDegree);
    }
    let order = (p as u128).pow(r);
    if order > MAX_FIELD_ORDER as u128 {
        return Err(ArithError::TooLarge { p, r });
    }
    let key = (p as u32, r);
    if let Some(f) = field_cache().lock().unwrap().get(&key) {
        return Ok(f.clone());
    }
    let field = Arc::new(build_field(p as u32, r));
    field_cache().lock().unwrap().insert(key, field.clone());
    Ok(field)
}

fn build_field(p: u32, r: u32) -> FieldDescriptor {
    let q = p.pow(r);
    let modulus = if r == 1 {
        vec![0, 1]
    } else {
        (0..q)
            .map(|k| {
                let mut m = decode(k, p, r);
                m.push(1);
                m
            })
            .find(|m| is_irreducible(m, p))
            .expect("irreducible polynomials exist in every degree")
    };
    let order = q as u64 - 1;
    let factors = prime_factors(order);
    let is_generator = |g: &[u32]| {
        factors
            .iter()
            .all(|&l| ppowmod(g, order / l, &modulus, p) != vec![1u32])
    };
    let gen = (1..q)
        .map(|k| decode(k, p, r))
        .find(|g| {
            let mut g = g.clone();
            ptrim(&mut g);
            is_generator(&g)
        })
        .expect("multiplicative group is cyclic");
    let mut exp = vec![0u32; q as usize - 1];
    let mut log = vec![u32::MAX; q as usize];
    let mut cur = vec![1u32];
    for (k, slot) in exp.iter_mut().enumerate() {
        let mut c = cur.clone();
        c.resize(r as usize, 0);
        let v = encode(&c, p);
        *slot = v;
        log[v as usize] = k as u32;
        let mut g = gen.clone();
        ptrim(&mut g);
        cur = pmulmod(&cur, &g, &modulus, p);
    }
    FieldDescriptor {
        p,
        r,
        q,
        modulus,
        exp,
        log,
    }
}

impl FieldDescriptor {
    pub fn p(&self) -> u64 {
        self.p as u64
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// The field order p^r.
    pub fn q(&self) -> u64 {
        self.q as u64
    }

    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn zero(&self) -> Fq {
        Fq(0)
    }

    pub fn one(&self) -> Fq {
        Fq(1)
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, n: i64) -> Fq {
        Fq(n.rem_euclid(self.p as i64) as u32)
    }

    pub fn from_coords(&self, coords: &[u32]) -> Fq {
        let mut c: Vec<u32> = coords.iter().map(|&x| x % self.p).collect();
        c.resize(self.r as usize, 0);
        Fq(encode(&c[..self.r as usize], self.p))
    }

    pub fn coords(&self, a: Fq) -> Vec<u32> {
        decode(a.0, self.p, self.r)
    }

    pub fn elements(&self) -> impl Iterator<Item = Fq> {
        (0..self.q).map(Fq)
    }

    pub fn is_valid(&self, a: Fq) -> bool {
        a.0 < self.q
    }

    pub fn add(&self, a: Fq, b: Fq) -> Fq {
        if self.r == 1 {
            return Fq((a.0 + b.0) % self.p);
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0u32;
        let mut scale = 1u32;
        while x > 0 || y > 0 {
            out += ((x % self.p + y % self.p) % self.p) * scale;
            x /= self.p;
            y /= self.p;
            scale = scale.wrapping_mul(self.p);
        }
        Fq(out)
    }

    pub fn neg(&self, a: Fq) -> Fq {
        if self.r == 1 {
            return Fq((self.p - a.0) % self.p);
        }
        let mut x = a.0;
        let mut out = 0u32;
        let mut scale = 1u32;
        while x > 0 {
            out += ((self.p - x % self.p) % self.p) * scale;
            x /= self.p;
            scale = scale.wrapping_mul(self.p);
        }
        Fq(out)
    }

    pub fn sub(&self, a: Fq, b: Fq) -> Fq {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: Fq, b: Fq) -> Fq {
        if a.0 == 0 || b.0 == 0 {
            return Fq(0);
        }
        let n = self.q as u64 - 1;
        let k = (self.log[a.0 as usize] as u64 + self.log[b.0 as usize] as u64) % n;
        Fq(self.exp[k as usize])
    }

    pub fn inv(&self, a: Fq) -> Option<Fq> {
        if a.0 == 0 {
            return None;
        }
        let n = self.q - 1;
        Some(Fq(self.exp[((n - self.log[a.0 as usize]) % n) as usize]))
    }

    pub fn div(&self, a: Fq, b: Fq) -> Option<Fq> {
        self.inv(b).map(|bi| self.mul(a, bi))
    }

    pub fn pow(&self, a: Fq, e: u64) -> Fq {
        if e == 0 {
            return Fq(1);
        }
        if a.0 == 0 {
            return Fq(0);
        }
        let n = self.q as u64 - 1;
        let k = (self.log[a.0 as usize] as u64 * (e % n)) % n;
        Fq(self.exp[k as usize])
    }

    /// Signed power; negative exponents need a nonzero base.
    pub fn powi(&self, a: Fq, e: i64) -> Option<Fq> {
        if e >= 0 {
            Some(self.pow(a, e as u64))
        } else {
            self.inv(a).map(|ai| self.pow(ai, e.unsigned_abs()))
        }
    }

    /// The absolute Frobenius x ↦ x^p.
    pub fn frob(&self, a: Fq) -> Fq {
        self.pow(a, self.p as u64)
    }

    /// Discrete logarithm relative to the internal generator.
    pub fn log(&self, a: Fq) -> Option<u64> {
        (a.0 != 0).then(|| self.log[a.0 as usize] as u64)
    }

    /// The generator used by the log tables.
    pub fn generator(&self) -> Fq {
        Fq(self.exp[1 % self.exp.len()])
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: Fq) -> Option<u64> {
        let l = self.log(a)?;
        let n = self.q as u64 - 1;
        Some(n / gcd(l, n))
    }

    /// Whether `a` lies in the subfield of order `q_sub`.
    pub fn in_subfield(&self, a: Fq, q_sub: u64) -> bool {
        self.pow(a, q_sub) == a
    }

    /// Some N-th root of `a` in this field, choosing the smallest encoding.
    pub fn nth_root(&self, a: Fq, n: u64) -> Option<Fq> {
        if a.0 == 0 {
            return Some(a);
        }
        self.elements().find(|&x| self.pow(x, n) == a)
    }
}

/// Smallest s ≥ 1 with N | q^s − 1.
pub fn splitting_degree(q: u64, n: u64) -> Result<u32, ArithError> {
    if n == 0 || gcd(n, q) != 1 {
        return Err(ArithError::NotCoprime { n, q });
    }
    let mut s = 1;
    let mut acc = q % n;
    while acc != 1 % n {
        acc = acc * (q % n) % n;
        s += 1;
    }
    Ok(s)
}

/// |μ_N(F_q((t)))| = gcd(N, q − 1).
pub fn mu_count_local(q: u64, n: u64) -> u64 {
    gcd(n, q - 1)
}

/// All N-th roots of unity as `[ξ, ξ², …, ξ^N = 1]`, where ξ is the primitive
/// N-th root with the smallest encoding.
pub fn roots_of_unity(field: &FieldDescriptor, n: u64) -> Result<Vec<Fq>, ArithError> {
    let qm1 = field.q() - 1;
    if n == 0 || qm1 % n != 0 {
        return Err(ArithError::NoRoots { n, qm1 });
    }
    let xi = primitive_root(field, n)?;
    Ok((1..=n).map(|k| field.pow(xi, k)).collect())
}

/// The primitive N-th root of unity with the smallest encoding.
pub fn primitive_root(field: &FieldDescriptor, n: u64) -> Result<Fq, ArithError> {
    let qm1 = field.q() - 1;
    if n == 0 || qm1 % n != 0 {
        return Err(ArithError::NoRoots { n, qm1 });
    }
    Ok(field
        .elements()
        .skip(1)
        .find(|&x| field.order(x) == Some(n))
        .expect("cyclic group of order q-1 has elements of every order dividing it"))
}

/// Embeds `small` into `big` by sending the generator x of `small` to the
/// smallest root of its modulus in `big`. Returns the image of every element.
pub fn embedding(small: &FieldDescriptor, big: &FieldDescriptor) -> Result<Vec<Fq>, ArithError> {
    if small.p != big.p || big.r % small.r != 0 {
        return Err(ArithError::NoEmbedding);
    }
    let m = small.modulus();
    let eval = |x: Fq| {
        m.iter().rev().fold(Fq(0), |acc, &c| {
            big.add(big.mul(acc, x), Fq(c))
        })
    };
    let root = big
        .elements()
        .find(|&x| eval(x) == Fq(0))
        .ok_or(ArithError::NoEmbedding)?;
    let powers: Vec<Fq> = (0..small.r).map(|k| big.pow(root, k as u64)).collect();
    Ok(small
        .elements()
        .map(|a| {
            small
                .coords(a)
                .iter()
                .zip(&powers)
                .fold(Fq(0), |acc, (&c, &w)| big.add(acc, big.mul(Fq(c), w)))
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_modulus_is_x() {
        let f = make_field(3, 1).unwrap();
        assert_eq!(f.modulus(), &[0, 1]);
        assert_eq!(f.q(), 3);
    }

    #[test]
    fn f25_modulus_smallest_irreducible() {
        let f = make_field(5, 2).unwrap();
        // x^2 + 2: -2 = 3 is a non-square mod 5, and no smaller candidate is irreducible
        // since x^2, x^2+1 = (x-2)(x+2) both split.
        assert_eq!(f.modulus(), &[2, 0, 1]);
        // independent check: a monic quadratic is irreducible iff it has no root
        let first = (0..25u32)
            .find(|k| {
                let (c0, c1) = (k % 5, k / 5);
                !(0..5u32).any(|x| (x * x + c1 * x + c0) % 5 == 0)
            })
            .unwrap();
        assert_eq!(first, 2);
    }

    #[test]
    fn non_prime_rejected() {
        assert_eq!(make_field(4, 1).unwrap_err(), ArithError::NotPrime(4));
    }

    #[test]
    fn field_axioms_small() {
        let f = make_field(3, 2).unwrap();
        for a in f.elements() {
            assert_eq!(f.add(a, f.neg(a)), Fq(0));
            if a.0 != 0 {
                assert_eq!(f.mul(a, f.inv(a).unwrap()), Fq(1));
            }
            for b in f.elements() {
                let lhs = f.frob(f.add(a, b));
                assert_eq!(lhs, f.add(f.frob(a), f.frob(b)));
                assert_eq!(f.frob(f.mul(a, b)), f.mul(f.frob(a), f.frob(b)));
            }
        }
    }

    #[test]
    fn frobenius_order_on_generator() {
        for (p, r) in [(2, 4), (3, 3), (5, 2), (7, 2)] {
            let f = make_field(p, r).unwrap();
            let g = f.generator();
            let mut x = g;
            for s in 1..=r {
                x = f.frob(x);
                assert_eq!(x == g, s == r);
            }
        }
    }

    #[test]
    fn splitting_degrees() {
        assert_eq!(splitting_degree(5, 4).unwrap(), 1);
        assert_eq!(splitting_degree(5, 3).unwrap(), 2);
        assert_eq!(splitting_degree(7, 1).unwrap(), 1);
        assert!(splitting_degree(5, 10).is_err());
    }

    #[test]
    fn roots_of_unity_f5() {
        let f = make_field(5, 1).unwrap();
        let mut roots: Vec<u32> = roots_of_unity(&f, 4).unwrap().iter().map(|x| x.0).collect();
        assert_eq!(roots[0], 2);
        roots.sort();
        assert_eq!(roots, vec![1, 2, 3, 4]);
        assert_eq!(roots_of_unity(&f, 1).unwrap(), vec![Fq(1)]);
        assert!(roots_of_unity(&f, 3).is_err());
    }

    #[test]
    fn mu_count() {
        assert_eq!(mu_count_local(5, 2), 2);
        assert_eq!(mu_count_local(5, 3), 1);
        assert_eq!(mu_count_local(13, 1), 1);
        let f = make_field(5, 1).unwrap();
        let sols = f.elements().filter(|&x| f.mul(x, x) == Fq(1)).count();
        assert_eq!(sols as u64, mu_count_local(5, 2));
    }

    #[test]
    fn embedding_is_a_ring_map() {
        let small = make_field(3, 2).unwrap();
        let big = make_field(3, 4).unwrap();
        let img = embedding(&small, &big).unwrap();
        for a in small.elements() {
            for b in small.elements() {
                let s = img[small.add(a, b).0 as usize];
                assert_eq!(s, big.add(img[a.0 as usize], img[b.0 as usize]));
                let m = img[small.mul(a, b).0 as usize];
                assert_eq!(m, big.mul(img[a.0 as usize], img[b.0 as usize]));
            }
        }
    }
}
