//! Finite abelian groups, their characters, and Fourier transforms of tables.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use serde::{Deserialize, Serialize};

use super::cyclo::Cyclo;
use super::FourierError;
use crate::integrate::Coeff;

/// Z/d_1 × … × Z/d_k. Elements are tuples, enumerated lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FiniteAbelianGroup {
    pub factors: Vec<u64>,
}

impl FiniteAbelianGroup {
    pub fn new(factors: Vec<u64>) -> Result<Self, FourierError> {
        if factors.iter().any(|&d| d == 0) {
            return Err(FourierError::BadGroup);
        }
        Ok(FiniteAbelianGroup { factors })
    }

    pub fn trivial() -> Self {
        FiniteAbelianGroup { factors: Vec::new() }
    }

    pub fn order(&self) -> usize {
        self.factors.iter().product::<u64>() as usize
    }

    pub fn exponent(&self) -> u64 {
        self.factors.iter().fold(1, |a, d| a.lcm(d))
    }

    pub fn element(&self, mut idx: usize) -> Vec<u64> {
        let mut out = vec![0; self.factors.len()];
        for (i, &d) in self.factors.iter().enumerate().rev() {
            out[i] = (idx as u64) % d;
            idx /= d as usize;
        }
        out
    }

    pub fn index(&self, x: &[u64]) -> usize {
        self.factors
            .iter()
            .zip(x)
            .fold(0usize, |acc, (&d, &a)| acc * d as usize + (a % d) as usize)
    }

    pub fn elements(&self) -> impl Iterator<Item = Vec<u64>> + '_ {
        (0..self.order()).map(|i| self.element(i))
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        self.factors.iter().zip(a.iter().zip(b)).map(|(&d, (&x, &y))| (x + y) % d).collect()
    }

    pub fn label(&self, x: &[u64]) -> String {
        let parts: Vec<String> = x.iter().map(|a| a.to_string()).collect();
        format!("({})", parts.join(","))
    }

    pub fn parse_label(&self, s: &str) -> Result<Vec<u64>, FourierError> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let parts: Vec<u64> = if inner.trim().is_empty() {
            Vec::new()
        } else {
            inner
                .split(',')
                .map(|p| p.trim().parse::<u64>().map_err(|_| FourierError::Parse(s.to_string())))
                .collect::<Result<_, _>>()?
        };
        if parts.len() != self.factors.len() || parts.iter().zip(&self.factors).any(|(a, d)| a >= d) {
            return Err(FourierError::Parse(s.to_string()));
        }
        Ok(parts)
    }
}

/// The character t ↦ exp(2πi Σ a_i t_i / d_i), labelled by a.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    pub group: FiniteAbelianGroup,
    pub a: Vec<u64>,
}

impl Character {
    /// Value in Q/Z, in [0, 1).
    pub fn phase(&self, t: &[u64]) -> Ratio<i64> {
        let r = self
            .group
            .factors
            .iter()
            .zip(self.a.iter().zip(t))
            .fold(Ratio::from_integer(0), |acc, (&d, (&a, &x))| acc + Ratio::new((a * x % d) as i64, d as i64));
        r - r.floor()
    }

    pub fn value(&self, t: &[u64]) -> Cyclo {
        let ph = self.phase(t);
        Cyclo::root(*ph.denom() as u64, *ph.numer())
    }

    pub fn is_trivial(&self) -> bool {
        self.a.iter().all(|&x| x == 0)
    }
}

/// All characters, in the element order of the group.
pub fn characters(group: &FiniteAbelianGroup) -> Vec<Character> {
    group.elements().map(|a| Character { group: group.clone(), a }).collect()
}

/// t ↦ N_t.
#[derive(Clone, Debug, PartialEq)]
pub struct CountTable {
    pub group: FiniteAbelianGroup,
    pub values: Vec<Cyclo>,
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    group: Vec<u64>,
    values: BTreeMap<String, String>,
}

pub(crate) fn parse_rational(s: &str) -> Result<BigRational, FourierError> {
    s.trim().parse::<BigRational>().map_err(|_| FourierError::Parse(s.to_string()))
}

impl CountTable {
    pub fn new(group: FiniteAbelianGroup, values: Vec<Cyclo>) -> Result<Self, FourierError> {
        if values.len() != group.order() {
            return Err(FourierError::Shape);
        }
        Ok(CountTable { group, values })
    }

    /// `{"group":[2,2],"values":{"(0,0)":"3"}}`; missing entries are 0, but
    /// at least one entry must be given.
    pub fn from_json(text: &str) -> Result<Self, FourierError> {
        let raw: TableJson = serde_json::from_str(text).map_err(|e| FourierError::Parse(e.to_string()))?;
        if raw.values.is_empty() {
            return Err(FourierError::Parse("empty table".into()));
        }
        let group = FiniteAbelianGroup::new(raw.group)?;
        let mut values = vec![Cyclo::integer(0); group.order()];
        for (k, v) in &raw.values {
            let t = group.parse_label(k)?;
            values[group.index(&t)] = super::identity::parse_cyclo(v)?;
        }
        Ok(CountTable { group, values })
    }

    pub fn to_json(&self) -> serde_json::Value {
        let values: BTreeMap<String, String> = self
            .group
            .elements()
            .zip(&self.values)
            .enumerate()
            .filter(|(i, (_, v))| *i == 0 || !Coeff::is_zero(*v))
            .map(|(_, tv)| tv)
            .map(|(t, v)| (self.group.label(&t), v.to_string()))
            .collect();
        serde_json::json!({ "group": self.group.factors, "values": values })
    }
}

fn inv_order(group: &FiniteAbelianGroup) -> Cyclo {
    Cyclo::integer(group.order() as i64).inv().unwrap()
}

/// χ ↦ (1/|A|) Σ_t χ(t)⁻¹ N_t, in character order.
pub fn fourier_transform(table: &CountTable) -> Vec<(Character, Cyclo)> {
    let scale = inv_order(&table.group);
    characters(&table.group)
        .into_iter()
        .map(|chi| {
            let mut acc = Cyclo::integer(0);
            for (t, n) in table.group.elements().zip(&table.values) {
                acc = acc.add(&chi.value(&t).inv().unwrap().mul(n));
            }
            let v = acc.mul(&scale);
            (chi, v)
        })
        .collect()
}

/// N_t = Σ_χ χ(t) f(χ).
pub fn inverse_fourier(group: &FiniteAbelianGroup, transform: &[(Character, Cyclo)]) -> CountTable {
    let values = group
        .elements()
        .map(|t| transform.iter().fold(Cyclo::integer(0), |acc, (chi, f)| acc.add(&chi.value(&t).mul(f))))
        .collect();
    CountTable { group: group.clone(), values }
}

/// The average (1/|A|) Σ_t N_t.
pub fn stable_count(table: &CountTable) -> Cyclo {
    let total = table.values.iter().fold(Cyclo::integer(0), |a, v| a.add(v));
    total.mul(&inv_order(&table.group))
}
