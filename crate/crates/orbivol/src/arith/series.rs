//! Truncated Laurent series in u = t^{1/N} over a finite field.

use std::fmt;

use num_rational::Ratio;

use super::{ArithError, Field, FieldDescriptor, Fq};

/// An element of K((u)) with u^N = t, known up to u-adic precision `prec`.
/// `prec == None` marks an exact element (a Laurent polynomial).
#[derive(Clone)]
pub struct TruncatedSeries {
    field: Field,
    ram: u32,
    val: i64,
    prec: Option<i64>,
    coeffs: Vec<Fq>,
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.0 != 0)
            .map(|(k, c)| format!("{}*u^{}", c.0, self.val + k as i64))
            .collect();
        let body = if terms.is_empty() { "0".to_string() } else { terms.join(" + ") };
        match self.prec {
            Some(p) => write!(f, "{} + O(u^{}) [N={}]", body, p, self.ram),
            None => write!(f, "{} [N={}]", body, self.ram),
        }
    }
}

impl PartialEq for TruncatedSeries {
    fn eq(&self, other: &Self) -> bool {
        *self.field == *other.field
            && self.ram == other.ram
            && self.val == other.val
            && self.prec == other.prec
            && self.coeffs == other.coeffs
    }
}

fn min_prec(a: Option<i64>, b: Option<i64>) -> Option<i64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

impl TruncatedSeries {
    /// Builds `Σ coeffs[k] u^{val+k} + O(u^prec)`.
    pub fn new(field: &Field, ram: u32, val: i64, coeffs: Vec<Fq>, prec: Option<i64>) -> Self {
        let mut s = TruncatedSeries {
            field: field.clone(),
            ram,
            val,
            prec,
            coeffs,
        };
        s.normalize();
        s
    }

    /// An exact Laurent polynomial.
    pub fn exact(field: &Field, ram: u32, val: i64, coeffs: Vec<Fq>) -> Self {
        Self::new(field, ram, val, coeffs, None)
    }

    pub fn zero(field: &Field, ram: u32) -> Self {
        Self::exact(field, ram, 0, Vec::new())
    }

    pub fn zero_to(field: &Field, ram: u32, prec: i64) -> Self {
        Self::new(field, ram, prec, Vec::new(), Some(prec))
    }

    pub fn constant(field: &Field, ram: u32, c: Fq) -> Self {
        Self::exact(field, ram, 0, vec![c])
    }

    pub fn monomial(field: &Field, ram: u32, c: Fq, k: i64) -> Self {
        Self::exact(field, ram, k, vec![c])
    }

    fn normalize(&mut self) {
        if let Some(p) = self.prec {
            let keep = (p - self.val).max(0) as usize;
            self.coeffs.truncate(keep);
        }
        let lead = self.coeffs.iter().position(|c| c.0 != 0);
        match lead {
            None => {
                self.coeffs.clear();
                self.val = self.prec.unwrap_or(0);
            }
            Some(k) => {
                self.coeffs.drain(..k);
                self.val += k as i64;
                while self.coeffs.last() == Some(&Fq(0)) {
                    self.coeffs.pop();
                }
            }
        }
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn ram_index(&self) -> u32 {
        self.ram
    }

    pub fn prec(&self) -> Option<i64> {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    /// True for both exact zero and zero-to-precision.
    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_exact_zero(&self) -> bool {
        self.coeffs.is_empty() && self.prec.is_none()
    }

    /// u-adic valuation, if some nonzero coefficient is known.
    pub fn valuation(&self) -> Option<i64> {
        (!self.coeffs.is_empty()).then_some(self.val)
    }

    /// A proven lower bound for the u-adic valuation (`None` for exact zero).
    pub fn valuation_lower_bound(&self) -> Option<i64> {
        if self.coeffs.is_empty() {
            self.prec
        } else {
            Some(self.val)
        }
    }

    /// Valuation measured in powers of t.
    pub fn t_valuation(&self) -> Option<Ratio<i64>> {
        self.valuation().map(|v| Ratio::new(v, self.ram as i64))
    }

    pub fn leading_coeff(&self) -> Option<Fq> {
        self.coeffs.first().copied()
    }

    /// Coefficient of u^k; `None` when k is beyond the known precision.
    pub fn coeff(&self, k: i64) -> Option<Fq> {
        if let Some(p) = self.prec {
            if k >= p {
                return None;
            }
        }
        if k < self.val || self.coeffs.is_empty() {
            return Some(Fq(0));
        }
        Some(self.coeffs.get((k - self.val) as usize).copied().unwrap_or(Fq(0)))
    }

    /// Reduction modulo the maximal ideal, for integral elements.
    pub fn residue(&self) -> Option<Fq> {
        if let Some(v) = self.valuation() {
            if v < 0 {
                return None;
            }
        }
        self.coeff(0)
    }

    pub fn truncate(&self, prec: i64) -> Self {
        Self::new(&self.field, self.ram, self.val, self.coeffs.clone(), min_prec(self.prec, Some(prec)))
    }

    fn check(&self, other: &Self) -> Result<(), ArithError> {
        if *self.field != *other.field || self.ram != other.ram {
            Err(ArithError::Mismatch)
        } else {
            Ok(())
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self, ArithError> {
        self.check(other)?;
        let f = &self.field;
        if self.coeffs.is_empty() && other.coeffs.is_empty() {
            let prec = min_prec(self.prec, other.prec);
            return Ok(Self::new(f, self.ram, prec.unwrap_or(0), Vec::new(), prec));
        }
        let lo = match (self.coeffs.is_empty(), other.coeffs.is_empty()) {
            (true, _) => other.val,
            (_, true) => self.val,
            _ => self.val.min(other.val),
        };
        let hi = (self.val + self.coeffs.len() as i64).max(other.val + other.coeffs.len() as i64);
        let coeffs = (lo..hi)
            .map(|k| {
                let a = if self.coeffs.is_empty() { Fq(0) } else { self.coeff(k).unwrap_or(Fq(0)) };
                let b = if other.coeffs.is_empty() { Fq(0) } else { other.coeff(k).unwrap_or(Fq(0)) };
                f.add(a, b)
            })
            .collect();
        Ok(Self::new(f, self.ram, lo, coeffs, min_prec(self.prec, other.prec)))
    }

    pub fn neg(&self) -> Self {
        let f = &self.field;
        Self::new(f, self.ram, self.val, self.coeffs.iter().map(|&c| f.neg(c)).collect(), self.prec)
    }

    pub fn sub(&self, other: &Self) -> Result<Self, ArithError> {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: Fq) -> Self {
        let f = &self.field;
        if c.0 == 0 {
            return Self::new(f, self.ram, 0, Vec::new(), None);
        }
        Self::new(f, self.ram, self.val, self.coeffs.iter().map(|&x| f.mul(c, x)).collect(), self.prec)
    }

    /// Multiplication: valuations add, absolute precision is the minimum of the
    /// two shifted precisions.
    pub fn mul(&self, other: &Self) -> Result<Self, ArithError> {
        self.check(other)?;
        let f = &self.field;
        let lb_a = self.valuation_lower_bound();
        let lb_b = other.valuation_lower_bound();
        let prec = match (lb_a, lb_b) {
            (None, _) | (_, None) => None,
            (Some(va), Some(vb)) => {
                let pa = other.prec.map(|p| p + va);
                let pb = self.prec.map(|p| p + vb);
                min_prec(pa, pb)
            }
        };
        if self.coeffs.is_empty() || other.coeffs.is_empty() {
            let v = prec.unwrap_or(0);
            return Ok(Self::new(f, self.ram, v, Vec::new(), prec));
        }
        let mut out = vec![Fq(0); self.coeffs.len() + other.coeffs.len() - 1];
        let limit = prec.map(|p| (p - self.val - other.val).max(0) as usize);
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.0 == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                if let Some(l) = limit {
                    if i + j >= l {
                        break;
                    }
                }
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Ok(Self::new(f, self.ram, self.val + other.val, out, prec))
    }

    pub fn pow(&self, k: u32) -> Result<Self, ArithError> {
        let mut acc = Self::constant(&self.field, self.ram, Fq(1));
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Ok(acc)
    }

    /// Multiplicative inverse with `rel_prec` u-adic digits of relative
    /// precision (capped by the operand's own relative precision).
    pub fn inverse(&self, rel_prec: i64) -> Result<Self, ArithError> {
        let f = &self.field;
        let v = self.valuation().ok_or(ArithError::NotInvertible)?;
        let own = self.prec.map(|p| p - v);
        let rel = own.map_or(rel_prec, |o| o.min(rel_prec));
        let a0inv = f.inv(self.coeffs[0]).unwrap();
        let mut b = vec![Fq(0); rel.max(0) as usize];
        for k in 0..b.len() {
            let mut s = if k == 0 { Fq(1) } else { Fq(0) };
            for j in 1..=k {
                let aj = self.coeffs.get(j).copied().unwrap_or(Fq(0));
                s = f.sub(s, f.mul(aj, b[k - j]));
            }
            b[k] = f.mul(s, a0inv);
        }
        Ok(Self::new(f, self.ram, -v, b, Some(-v + rel)))
    }

    /// An n-th root whose leading coefficient is the smallest-encoded n-th root
    /// of this series' leading coefficient. Requires n | valuation and p ∤ n.
    pub fn nth_root(&self, n: u64, rel_prec: i64) -> Result<Self, ArithError> {
        let f = &self.field;
        if n % f.p() == 0 {
            return Err(ArithError::WildRamification(n));
        }
        let v = self.valuation().ok_or(ArithError::NotInvertible)?;
        if v.rem_euclid(n as i64) != 0 {
            return Err(ArithError::NoRoot(n));
        }
        let a0 = self.coeffs[0];
        let y0 = f.nth_root(a0, n).ok_or(ArithError::NoRoot(n))?;
        let own = self.prec.map(|p| p - v);
        let rel = own.map_or(rel_prec, |o| o.min(rel_prec)).max(1) as usize;
        // coefficientwise Hensel: the u^k coefficient of y^n is n y0^{n-1} y_k + (terms in y_<k)
        let denom = f.inv(f.mul(f.from_int(n as i64), f.pow(y0, n - 1))).unwrap();
        let mut y = vec![y0];
        for k in 1..rel {
            let mut trial = y.clone();
            trial.push(Fq(0));
            let partial = Self::new(f, self.ram, 0, trial, Some(k as i64 + 1)).pow(n as u32)?;
            let have = partial.coeff(k as i64).unwrap_or(Fq(0));
            let want = self.coeffs.get(k).copied().unwrap_or(Fq(0));
            y.push(f.mul(f.sub(want, have), denom));
        }
        Ok(Self::new(f, self.ram, v / n as i64, y, Some(v / n as i64 + rel as i64)))
    }

    /// Coefficientwise x ↦ x^q (the Frobenius of the unramified part, fixing u).
    pub fn frob(&self, q: u64) -> Self {
        let f = &self.field;
        Self::new(f, self.ram, self.val, self.coeffs.iter().map(|&c| f.pow(c, q)).collect(), self.prec)
    }

    /// The substitution u ↦ ζu, which multiplies the u^m coefficient by ζ^m.
    pub fn act(&self, zeta: Fq) -> Self {
        let f = &self.field;
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| f.mul(c, f.powi(zeta, self.val + k as i64).unwrap_or(Fq(0))))
            .collect();
        Self::new(f, self.ram, self.val, coeffs, self.prec)
    }

    /// The same element viewed with ramification index d·N (u = w^d).
    pub fn lift_ram(&self, d: u32) -> Self {
        let d64 = d as i64;
        let mut coeffs = Vec::new();
        for (k, &c) in self.coeffs.iter().enumerate() {
            if k > 0 {
                coeffs.extend(std::iter::repeat(Fq(0)).take(d as usize - 1));
            }
            coeffs.push(c);
        }
        Self::new(&self.field, self.ram * d, self.val * d64, coeffs, self.prec.map(|p| p * d64))
    }

    /// Substitutes u ↦ u·h for a unit series h (an O_L-reparametrization).
    pub fn reparametrize(&self, h: &Self) -> Result<Self, ArithError> {
        self.check(h)?;
        if h.valuation() != Some(0) {
            return Err(ArithError::NotInvertible);
        }
        let f = &self.field;
        let u = Self::monomial(f, self.ram, Fq(1), 1);
        let uh = u.mul(h)?;
        let mut acc = Self::new(f, self.ram, 0, Vec::new(), self.prec);
        for (k, &c) in self.coeffs.iter().enumerate() {
            let e = self.val + k as i64;
            let term = if e >= 0 {
                uh.pow(e as u32)?
            } else {
                uh.inverse(self.prec.map_or(64, |p| p - self.val))?.pow((-e) as u32)?
            };
            acc = acc.add(&term.scale(c))?;
        }
        Ok(acc)
    }

    /// The sub-series supported on exponents divisible by N (the part in F_q((t))-span).
    pub fn is_in_base(&self) -> bool {
        let n = self.ram as i64;
        self.coeffs
            .iter()
            .enumerate()
            .all(|(k, c)| c.0 == 0 || (self.val + k as i64).rem_euclid(n) == 0)
    }

    /// Equality of the coefficients that both sides know.
    pub fn agrees_with(&self, other: &Self) -> bool {
        if self.check(other).is_err() {
            return false;
        }
        let p = min_prec(self.prec, other.prec);
        let lo = self.val.min(other.val);
        let hi = p.unwrap_or_else(|| {
            (self.val + self.coeffs.len() as i64).max(other.val + other.coeffs.len() as i64)
        });
        (lo..hi).all(|k| self.coeff(k) == other.coeff(k))
    }
}

/// The ring O_L = K[[u]] with u^N = t together with its μ_N-action u ↦ ζu.
#[derive(Clone, Debug)]
pub struct RamifiedContext {
    field: Field,
    n: u32,
}

/// Sets up arithmetic with a tame N-th root of t over `field`.
pub fn adjoin_ramified_root(field: &Field, n: u32) -> Result<RamifiedContext, ArithError> {
    if n == 0 || n as u64 % field.p() == 0 {
        return Err(ArithError::WildRamification(n as u64));
    }
    Ok(RamifiedContext { field: field.clone(), n })
}

impl RamifiedContext {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn uniformizer(&self) -> TruncatedSeries {
        TruncatedSeries::monomial(&self.field, self.n, Fq(1), 1)
    }

    pub fn t(&self) -> TruncatedSeries {
        TruncatedSeries::monomial(&self.field, self.n, Fq(1), self.n as i64)
    }

    /// Series from coefficients of u^0, u^1, … with the given precision.
    pub fn series(&self, coeffs: Vec<Fq>, prec: Option<i64>) -> TruncatedSeries {
        TruncatedSeries::new(&self.field, self.n, 0, coeffs, prec)
    }

    /// Applies ζ ∈ μ_N; rejects ζ with ζ^N ≠ 1.
    pub fn act(&self, zeta: Fq, x: &TruncatedSeries) -> Result<TruncatedSeries, ArithError> {
        if self.field.pow(zeta, self.n as u64) != Fq(1) {
            return Err(ArithError::NoRoots { n: self.n as u64, qm1: self.field.q() - 1 });
        }
        Ok(x.act(zeta))
    }

    pub fn descriptor(&self) -> &FieldDescriptor {
        &self.field
    }
}
