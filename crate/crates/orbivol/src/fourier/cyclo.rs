//! Exact arithmetic in the cyclotomic fields Q(ζ_m).
//!
//! An element carries its own level m and its coordinates in the power basis
//! 1, ζ_m, …, ζ_m^{φ(m)-1}. Mixed-level operands are lifted to the lcm.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::integrate::Coeff;

/// Φ_m as integer coefficients, constant term first.
fn cyclotomic(m: u64) -> Arc<Vec<i64>> {
    static CACHE: OnceLock<Mutex<HashMap<u64, Arc<Vec<i64>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(p) = cache.lock().unwrap().get(&m) {
        return p.clone();
    }
    // x^m - 1 divided by Φ_d for every proper divisor d
    let mut num = vec![0i64; m as usize + 1];
    num[0] = -1;
    num[m as usize] = 1;
    for d in (1..m).filter(|d| m % d == 0) {
        let den = cyclotomic(d);
        let mut quot = vec![0i64; num.len() - den.len() + 1];
        for k in (0..quot.len()).rev() {
            let c = num[k + den.len() - 1];
            quot[k] = c;
            for (j, &dj) in den.iter().enumerate() {
                num[k + j] -= c * dj;
            }
        }
        num = quot;
    }
    let p = Arc::new(num);
    cache.lock().unwrap().insert(m, p.clone());
    p
}

fn reduce(m: u64, mut poly: Vec<BigRational>) -> Vec<BigRational> {
    let phi = cyclotomic(m);
    let deg = phi.len() - 1;
    for k in (deg..poly.len()).rev() {
        let c = std::mem::replace(&mut poly[k], <BigRational as Zero>::zero());
        if Zero::is_zero(&c) {
            continue;
        }
        for (j, &pj) in phi.iter().enumerate().take(deg) {
            poly[k - deg + j] -= &c * BigRational::from_integer(BigInt::from(pj));
        }
    }
    poly.resize(deg, <BigRational as Zero>::zero());
    poly
}

#[derive(Clone, Debug)]
pub struct Cyclo {
    m: u64,
    c: Vec<BigRational>,
}

impl Cyclo {
    pub fn rational(r: BigRational) -> Self {
        Cyclo { m: 1, c: vec![r] }
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(n)))
    }

    /// ζ_m^k.
    pub fn root(m: u64, k: i64) -> Self {
        let e = k.rem_euclid(m as i64) as usize;
        let mut poly = vec![<BigRational as Zero>::zero(); e + 1];
        poly[e] = <BigRational as One>::one();
        Cyclo { m, c: reduce(m, poly) }
    }

    pub fn level(&self) -> u64 {
        self.m
    }

    fn lift(&self, l: u64) -> Self {
        if l == self.m {
            return self.clone();
        }
        let step = (l / self.m) as usize;
        let mut poly = vec![<BigRational as Zero>::zero(); step * self.c.len().max(1)];
        for (k, a) in self.c.iter().enumerate() {
            poly[k * step] = a.clone();
        }
        Cyclo { m: l, c: reduce(l, poly) }
    }

    fn common(&self, o: &Self) -> (Self, Self) {
        let l = self.m.lcm(&o.m);
        (self.lift(l), o.lift(l))
    }

    fn mul_matrix_column(&self, j: usize) -> Vec<BigRational> {
        let mut poly = vec![<BigRational as Zero>::zero(); j];
        poly.extend(self.c.iter().cloned());
        reduce(self.m, poly)
    }
}

impl PartialEq for Cyclo {
    fn eq(&self, o: &Self) -> bool {
        let (a, b) = self.common(o);
        a.c == b.c
    }
}

impl Coeff for Cyclo {
    fn zero() -> Self {
        Cyclo::integer(0)
    }

    fn one() -> Self {
        Cyclo::integer(1)
    }

    fn from_rational(r: &BigRational) -> Self {
        Cyclo::rational(r.clone())
    }

    fn is_zero(&self) -> bool {
        self.c.iter().all(|x| Zero::is_zero(x))
    }

    fn add(&self, o: &Self) -> Self {
        let (a, b) = self.common(o);
        Cyclo { m: a.m, c: a.c.iter().zip(&b.c).map(|(x, y)| x + y).collect() }
    }

    fn mul(&self, o: &Self) -> Self {
        let (a, b) = self.common(o);
        let mut poly = vec![<BigRational as Zero>::zero(); a.c.len() + b.c.len()];
        for (i, x) in a.c.iter().enumerate() {
            if Zero::is_zero(x) {
                continue;
            }
            for (j, y) in b.c.iter().enumerate() {
                poly[i + j] += x * y;
            }
        }
        Cyclo { m: a.m, c: reduce(a.m, poly) }
    }

    fn neg(&self) -> Self {
        Cyclo { m: self.m, c: self.c.iter().map(|x| -x).collect() }
    }

    /// Solves a·x = 1 through the matrix of multiplication by a.
    fn inv(&self) -> Option<Self> {
        if Coeff::is_zero(self) {
            return None;
        }
        let d = self.c.len();
        let cols: Vec<Vec<BigRational>> = (0..d).map(|j| self.mul_matrix_column(j)).collect();
        let mut m: Vec<Vec<BigRational>> = (0..d)
            .map(|i| {
                let mut row: Vec<BigRational> = cols.iter().map(|c| c[i].clone()).collect();
                row.push(if i == 0 { <BigRational as One>::one() } else { <BigRational as Zero>::zero() });
                row
            })
            .collect();
        for col in 0..d {
            let piv = (col..d).find(|&r| !Zero::is_zero(&m[r][col]))?;
            m.swap(col, piv);
            let inv = m[col][col].recip();
            for x in m[col].iter_mut() {
                *x *= &inv;
            }
            for r in 0..d {
                if r != col && !Zero::is_zero(&m[r][col]) {
                    let f = m[r][col].clone();
                    for k in col..=d {
                        let v = &f * &m[col][k];
                        m[r][k] -= v;
                    }
                }
            }
        }
        Some(Cyclo { m: self.m, c: m.into_iter().map(|r| r[d].clone()).collect() })
    }

    fn as_rational(&self) -> Option<BigRational> {
        self.c[1..].iter().all(|x| Zero::is_zero(x)).then(|| self.c[0].clone())
    }

    fn render(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for Cyclo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        for (k, a) in self.c.iter().enumerate() {
            if Zero::is_zero(a) {
                continue;
            }
            let sign = if a.is_negative() { "-" } else { "+" };
            let abs = a.abs();
            let body = match (k, abs.is_one()) {
                (0, _) => abs.to_string(),
                (1, true) => format!("ζ{}", self.m),
                (_, true) => format!("ζ{}^{}", self.m, k),
                (1, false) => format!("{}*ζ{}", abs, self.m),
                (_, false) => format!("{}*ζ{}^{}", abs, self.m, k),
            };
            parts.push((sign, body));
        }
        if parts.is_empty() {
            return write!(f, "0");
        }
        for (i, (sign, body)) in parts.iter().enumerate() {
            match (i, *sign) {
                (0, "-") => write!(f, "-{}", body)?,
                (0, _) => write!(f, "{}", body)?,
                (_, s) => write!(f, " {} {}", s, body)?,
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(*cyclotomic(1), vec![-1, 1]);
        assert_eq!(*cyclotomic(4), vec![1, 0, 1]);
        assert_eq!(*cyclotomic(6), vec![1, -1, 1]);
        assert_eq!(*cyclotomic(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn roots_of_unity() {
        let z = Cyclo::root(6, 1);
        let mut acc = Cyclo::one();
        for _ in 0..6 {
            acc = acc.mul(&z);
        }
        assert_eq!(acc, Cyclo::one());
        // ζ_6^3 = -1 and ζ_6^2 = ζ_3
        assert_eq!(Cyclo::root(6, 3), Cyclo::integer(-1));
        assert_eq!(Cyclo::root(6, 2), Cyclo::root(3, 1));
        // 1 + ζ_3 + ζ_3^2 = 0
        let s = Cyclo::one().add(&Cyclo::root(3, 1)).add(&Cyclo::root(3, 2));
        assert!(Coeff::is_zero(&s));
    }

    #[test]
    fn inverses() {
        let x = Cyclo::integer(2).add(&Cyclo::root(5, 1));
        let y = x.inv().unwrap();
        assert_eq!(x.mul(&y), Cyclo::one());
        assert_eq!(Cyclo::root(4, 1).inv().unwrap(), Cyclo::root(4, 3));
        assert!(Cyclo::integer(0).inv().is_none());
    }
}
