//! Exact finite sums Σ a_e b^{-e} with rational exponents.
//!
//! With a numeric base p the integer part of every exponent is folded into the
//! coefficient, so exponents live in [0, 1) and the representation is canonical
//! (the powers p^{-k/D}, 0 ≤ k < D, are linearly independent over Q). With a
//! formal base the symbol is kept as is and equality is formal.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

/// Coefficient ring for [`PowerSum`]: a field containing Q.
pub trait Coeff: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(r: &BigRational) -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;
    /// The value if it is rational.
    fn as_rational(&self) -> Option<BigRational>;
    fn render(&self) -> String;
}

impl Coeff for BigRational {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_rational(r: &BigRational) -> Self {
        r.clone()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn inv(&self) -> Option<Self> {
        (!Zero::is_zero(self)).then(|| self.recip())
    }
    fn as_rational(&self) -> Option<BigRational> {
        Some(self.clone())
    }
    fn render(&self) -> String {
        self.to_string()
    }
}

/// Σ terms[e] · base^{-e}.
#[derive(Clone, PartialEq, Debug)]
pub struct PowerSum<C> {
    base: Option<u64>,
    terms: BTreeMap<Ratio<i64>, C>,
}

pub type VolumeValue = PowerSum<BigRational>;

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn big_pow(p: u64, k: u32) -> BigInt {
    num_traits::pow(BigInt::from(p), k as usize)
}

impl<C: Coeff> PowerSum<C> {
    pub fn zero(base: Option<u64>) -> Self {
        PowerSum { base, terms: BTreeMap::new() }
    }

    pub fn constant(base: Option<u64>, c: C) -> Self {
        Self::term(base, c, Ratio::from_integer(0))
    }

    pub fn one(base: Option<u64>) -> Self {
        Self::constant(base, C::one())
    }

    /// c · base^{-e}.
    pub fn term(base: Option<u64>, c: C, e: Ratio<i64>) -> Self {
        let mut s = Self::zero(base);
        s.push(c, e);
        s
    }

    pub fn base(&self) -> Option<u64> {
        self.base
    }

    /// Nonzero terms, exponent ascending.
    pub fn terms(&self) -> impl Iterator<Item = (&Ratio<i64>, &C)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn push(&mut self, c: C, e: Ratio<i64>) {
        if c.is_zero() {
            return;
        }
        let (key, c) = match self.base {
            Some(p) => {
                let k = e.floor().to_integer();
                let frac = e - Ratio::from_integer(k);
                let scale = if k >= 0 {
                    BigRational::new(BigInt::one(), big_pow(p, k as u32))
                } else {
                    BigRational::from_integer(big_pow(p, (-k) as u32))
                };
                (frac, c.mul(&C::from_rational(&scale)))
            }
            None => (e, c),
        };
        let slot = self.terms.entry(key).or_insert_with(C::zero);
        *slot = slot.add(&c);
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    fn check(&self, o: &Self) {
        assert_eq!(self.base, o.base, "power sums over different bases");
    }

    pub fn add(&self, o: &Self) -> Self {
        self.check(o);
        let mut s = self.clone();
        for (e, c) in &o.terms {
            s.push(c.clone(), *e);
        }
        s
    }

    pub fn neg(&self) -> Self {
        PowerSum {
            base: self.base,
            terms: self.terms.iter().map(|(e, c)| (*e, c.neg())).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn scale(&self, k: &C) -> Self {
        let mut s = Self::zero(self.base);
        for (e, c) in &self.terms {
            s.push(c.mul(k), *e);
        }
        s
    }

    pub fn mul(&self, o: &Self) -> Self {
        self.check(o);
        let mut s = Self::zero(self.base);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &o.terms {
                s.push(ca.mul(cb), ea + eb);
            }
        }
        s
    }

    /// Multiplies by base^{-e}.
    pub fn shift(&self, e: Ratio<i64>) -> Self {
        let mut s = Self::zero(self.base);
        for (k, c) in &self.terms {
            s.push(c.clone(), k + e);
        }
        s
    }

    /// Common denominator of the exponents.
    pub fn exponent_denominator(&self) -> i64 {
        self.terms.keys().fold(1, |d, e| d.lcm(e.denom()))
    }

    /// Multiplicative inverse. With a numeric base this solves a linear system
    /// in Q(p^{1/D}); with a formal base only monomials are invertible.
    pub fn inverse(&self) -> Option<Self> {
        if self.terms.is_empty() {
            return None;
        }
        let Some(p) = self.base else {
            if self.terms.len() != 1 {
                return None;
            }
            let (e, c) = self.terms.iter().next().unwrap();
            return Some(Self::term(None, c.inv()?, -*e));
        };
        let d = self.exponent_denominator();
        let du = d as usize;
        let pinv = C::from_rational(&BigRational::new(BigInt::one(), BigInt::from(p)));
        // column j holds x · z^j in the basis z^0..z^{D-1}, z = p^{-1/D}
        let mut m = vec![vec![C::zero(); du + 1]; du];
        for j in 0..du {
            for (e, c) in &self.terms {
                let k = (e * d).to_integer() as usize + j;
                let (row, val) = if k >= du { (k - du, c.mul(&pinv)) } else { (k, c.clone()) };
                m[row][j] = m[row][j].add(&val);
            }
        }
        m[0][du] = C::one();
        // Gaussian elimination on the augmented system
        for col in 0..du {
            let piv = (col..du).find(|&r| !m[r][col].is_zero())?;
            m.swap(col, piv);
            let inv = m[col][col].inv()?;
            for x in m[col].iter_mut() {
                *x = x.mul(&inv);
            }
            for r in 0..du {
                if r != col && !m[r][col].is_zero() {
                    let f = m[r][col].clone();
                    for k in col..=du {
                        let v = f.mul(&m[col][k]);
                        m[r][k] = m[r][k].add(&v.neg());
                    }
                }
            }
        }
        let mut s = Self::zero(self.base);
        for (j, row) in m.iter().enumerate() {
            s.push(row[du].clone(), Ratio::new(j as i64, d));
        }
        Some(s)
    }

    pub fn div(&self, o: &Self) -> Option<Self> {
        Some(self.mul(&o.inverse()?))
    }

    fn render_with(&self, symbol: &str) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut out = String::new();
        for (i, (e, c)) in self.terms.iter().enumerate() {
            let mono = if e.is_zero() {
                None
            } else {
                Some(format!("{}^{{{}}}", symbol, -*e))
            };
            let (negative, body) = match c.as_rational() {
                Some(r) => {
                    let neg = r.is_negative();
                    let a = r.abs();
                    let body = match (&mono, a.is_one()) {
                        (None, _) => a.to_string(),
                        (Some(m), true) => m.clone(),
                        (Some(m), false) => format!("{}*{}", a, m),
                    };
                    (neg, body)
                }
                None => {
                    let body = match &mono {
                        None => format!("({})", c.render()),
                        Some(m) => format!("({})*{}", c.render(), m),
                    };
                    (false, body)
                }
            };
            match (i, negative) {
                (0, true) => out.push_str(&format!("-{}", body)),
                (0, false) => out.push_str(&body),
                (_, true) => out.push_str(&format!(" - {}", body)),
                (_, false) => out.push_str(&format!(" + {}", body)),
            }
        }
        out
    }
}

impl<C: Coeff> fmt::Display for PowerSum<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let symbol = self.base.map_or("q".to_string(), |p| p.to_string());
        write!(f, "{}", self.render_with(&symbol))
    }
}

impl<C: Coeff> Serialize for PowerSum<C> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl VolumeValue {
    pub fn rational(p: u64, r: BigRational) -> Self {
        Self::constant(Some(p), r)
    }

    pub fn integer(p: u64, n: i64) -> Self {
        Self::constant(Some(p), rat(n))
    }

    /// q^{-w} for q = p^r.
    pub fn q_power(p: u64, r: u32, w: Ratio<i64>) -> Self {
        Self::term(Some(p), rat(1), w * r as i64)
    }

    /// The value as a rational number, if it is one.
    pub fn to_rational(&self) -> Option<BigRational> {
        match self.terms.len() {
            0 => Some(rat(0)),
            1 => {
                let (e, c) = self.terms.iter().next().unwrap();
                e.is_zero().then(|| c.clone())
            }
            _ => None,
        }
    }

    /// Floating-point approximation, for diagnostics only.
    pub fn approx(&self) -> f64 {
        let p = self.base.unwrap_or(1) as f64;
        self.terms
            .iter()
            .map(|(e, c)| c.to_f64().unwrap_or(f64::NAN) * p.powf(-e.to_f64().unwrap()))
            .sum()
    }

    /// Sign of the value, decided by interval evaluation at z = p^{-1/D}.
    pub fn signum(&self) -> Ordering {
        if self.terms.is_empty() {
            return Ordering::Equal;
        }
        let p = self.base.expect("ordering needs a numeric base");
        let d = self.exponent_denominator();
        let target = BigRational::new(BigInt::one(), BigInt::from(p));
        let coeffs: Vec<(u32, &BigRational)> =
            self.terms.iter().map(|(e, c)| ((e * d).to_integer() as u32, c)).collect();
        let mut lo = rat(0);
        let mut hi = rat(1);
        loop {
            // bounds of Σ a_k z^k over z ∈ [lo, hi] with 0 ≤ lo
            let mut min = rat(0);
            let mut max = rat(0);
            for (k, a) in &coeffs {
                let l = num_traits::pow(lo.clone(), *k as usize);
                let h = num_traits::pow(hi.clone(), *k as usize);
                if a.is_positive() {
                    min += *a * &l;
                    max += *a * &h;
                } else {
                    min += *a * &h;
                    max += *a * &l;
                }
            }
            if min.is_positive() {
                return Ordering::Greater;
            }
            if max.is_negative() {
                return Ordering::Less;
            }
            let mid = (&lo + &hi) / rat(2);
            if num_traits::pow(mid.clone(), d as usize) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
}

impl PartialOrd for VolumeValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.base != other.base || self.base.is_none() {
            return None;
        }
        Some(self.sub(other).signum())
    }
}

/// A closed interval [lo, hi] of volumes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntervalVolume {
    pub lo: VolumeValue,
    pub hi: VolumeValue,
}

impl IntervalVolume {
    pub fn exact(v: VolumeValue) -> Self {
        IntervalVolume { lo: v.clone(), hi: v }
    }

    pub fn new(lo: VolumeValue, hi: VolumeValue) -> Self {
        debug_assert!(lo.sub(&hi).signum() != Ordering::Greater);
        IntervalVolume { lo, hi }
    }

    pub fn add(&self, o: &Self) -> Self {
        IntervalVolume { lo: self.lo.add(&o.lo), hi: self.hi.add(&o.hi) }
    }

    pub fn width(&self) -> VolumeValue {
        self.hi.sub(&self.lo)
    }

    pub fn contains(&self, v: &VolumeValue) -> bool {
        self.lo.sub(v).signum() != Ordering::Greater && v.sub(&self.hi).signum() != Ordering::Greater
    }

    /// Whether the width is at most `tol`.
    pub fn within(&self, tol: &VolumeValue) -> bool {
        self.width().sub(tol).signum() != Ordering::Greater
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> Ratio<i64> {
        Ratio::new(a, b)
    }

    #[test]
    fn integer_parts_fold_into_coefficients() {
        let v = VolumeValue::q_power(5, 1, r(3, 2));
        assert_eq!(v.to_string(), "1/5*5^{-1/2}");
        let w = VolumeValue::q_power(3, 2, r(1, 2));
        assert_eq!(w.to_rational(), Some(BigRational::new(1.into(), 3.into())));
    }

    #[test]
    fn rendering() {
        let v = VolumeValue::integer(5, 1).add(&VolumeValue::q_power(5, 1, r(1, 2)));
        assert_eq!(v.to_string(), "1 + 5^{-1/2}");
        let w = VolumeValue::integer(5, 1).sub(&VolumeValue::q_power(5, 1, r(1, 2)).scale(&rat(2)));
        assert_eq!(w.to_string(), "1 - 2*5^{-1/2}");
        assert_eq!(VolumeValue::zero(Some(5)).to_string(), "0");
    }

    #[test]
    fn inverse_of_geometric_factor() {
        // (1 - 5^{-3/2})^{-1}
        let x = VolumeValue::integer(5, 1).sub(&VolumeValue::q_power(5, 1, r(3, 2)));
        let y = x.inverse().unwrap();
        assert_eq!(x.mul(&y), VolumeValue::integer(5, 1));
        assert!((y.approx() - 1.0 / (1.0 - 5f64.powf(-1.5))).abs() < 1e-12);
    }

    #[test]
    fn exact_ordering() {
        let a = VolumeValue::q_power(5, 1, r(1, 2));
        let b = VolumeValue::rational(5, BigRational::new(447.into(), 1000.into()));
        let c = VolumeValue::rational(5, BigRational::new(448.into(), 1000.into()));
        assert!(b < a && a < c);
        assert_eq!(a.partial_cmp(&a), Some(Ordering::Equal));
    }

    #[test]
    fn formal_base() {
        let q = |e: i64| PowerSum::<BigRational>::term(None, rat(1), Ratio::from_integer(e));
        let x = q(2).add(&q(-1));
        assert_eq!(x.to_string(), "q^{1} + q^{-2}");
        assert_eq!(q(3).inverse().unwrap(), q(-3));
        assert!(x.inverse().is_none());
    }
}
