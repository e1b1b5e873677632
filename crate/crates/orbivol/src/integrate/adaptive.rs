//! Integrals of |f|^{1/r} over O^n.

use std::sync::atomic::{AtomicU64, Ordering};

use num_rational::Ratio;
use rayon::prelude::*;

use crate::arith::{prime_power, Fq};

use super::poly::{tp_val, MPoly, TPoly};
use super::value::{IntervalVolume, VolumeValue};
use super::IntegrateError;

/// The density |f|^{1/r} on O_F^n, f with coefficients in F_q[t].
#[derive(Clone, Debug)]
pub struct FormIntegrand {
    pub f: MPoly,
    pub r: u32,
}

fn split_q(q: u64) -> Result<(u64, u32), IntegrateError> {
    prime_power(q).ok_or(IntegrateError::NotPrimePower(q))
}

/// ∫_{O^n} |Π x_i^{e_i}|^{1/r} = Π (1 - q^{-1}) / (1 - q^{-1-e_i/r}).
pub fn integrate_monomial(e: &[u32], r: u32, q: u64) -> Result<VolumeValue, IntegrateError> {
    if r == 0 {
        return Err(IntegrateError::BadPower);
    }
    let (p, rf) = split_q(q)?;
    let one = VolumeValue::integer(p, 1);
    let num = one.sub(&VolumeValue::q_power(p, rf, Ratio::from_integer(1)));
    let mut acc = one.clone();
    for &ei in e {
        let den = one.sub(&VolumeValue::q_power(p, rf, Ratio::new(r as i64 + ei as i64, r as i64)));
        acc = acc.mul(&num).mul(&den.inverse().expect("1 - q^-s is nonzero"));
    }
    Ok(acc)
}

struct Walk<'a> {
    p: u64,
    rf: u32,
    q: u64,
    n: usize,
    r: u32,
    max_level: usize,
    max_cells: u64,
    visited: &'a AtomicU64,
}

struct Tally {
    exact: VolumeValue,
    slack: VolumeValue,
}

impl Walk<'_> {
    /// q^{-(m n + v / r)}
    fn mass(&self, m: usize, v: u32) -> VolumeValue {
        let e = Ratio::new((m * self.n) as i64 * self.r as i64 + v as i64, self.r as i64);
        VolumeValue::q_power(self.p, self.rf, e)
    }

    fn residues(&self, idx: u64) -> Vec<TPoly> {
        let mut k = idx;
        (0..self.n)
            .map(|_| {
                let a = (k % self.q) as u32;
                k /= self.q;
                if a == 0 { Vec::new() } else { vec![Fq(a)] }
            })
            .collect()
    }

    /// Cell with g(y) = f(c + t^m y).
    fn cell(&self, g: &MPoly, m: usize) -> Result<Tally, IntegrateError> {
        if self.visited.fetch_add(1, Ordering::Relaxed) >= self.max_cells {
            return Err(IntegrateError::TooManyCells(self.max_cells));
        }
        let zero = VolumeValue::zero(Some(self.p));
        let v0 = tp_val(&g.constant_term());
        let v1 = g.nonconstant_valuation();
        match (v0, v1) {
            (None, None) => return Ok(Tally { exact: zero.clone(), slack: zero }),
            (Some(a), None) => return Ok(Tally { exact: self.mass(m, a), slack: zero }),
            (Some(a), Some(b)) if a < b => return Ok(Tally { exact: self.mass(m, a), slack: zero }),
            _ => {}
        }
        if m >= self.max_level {
            let vmin = match (v0, v1) {
                (Some(a), Some(b)) => a.min(b),
                (None, Some(b)) => b,
                _ => unreachable!(),
            };
            return Ok(Tally { exact: zero, slack: self.mass(m, vmin) });
        }
        let children = self.q.pow(self.n as u32);
        let run = |idx: u64| -> Result<Tally, IntegrateError> {
            let c = self.residues(idx);
            self.cell(&g.recenter(&c, 1), m + 1)
        };
        let parts: Vec<Result<Tally, IntegrateError>> = if m == 0 {
            (0..children).into_par_iter().map(run).collect()
        } else {
            (0..children).map(run).collect()
        };
        let mut acc = Tally { exact: zero.clone(), slack: zero };
        for t in parts {
            let t = t?;
            acc.exact = acc.exact.add(&t.exact);
            acc.slack = acc.slack.add(&t.slack);
        }
        Ok(acc)
    }
}

/// Adaptive cell integration of |f|^{1/r}; cells whose valuation is not
/// determined at `max_level` are bracketed by [0, q^{-mn - v_min/r}].
pub fn integrate_adaptive(
    f: &FormIntegrand,
    max_level: usize,
    max_cells: u64,
) -> Result<IntervalVolume, IntegrateError> {
    if f.r == 0 {
        return Err(IntegrateError::BadPower);
    }
    let field = f.f.field();
    let visited = AtomicU64::new(0);
    let walk = Walk {
        p: field.p(),
        rf: field.r(),
        q: field.q(),
        n: f.f.nvars(),
        r: f.r,
        max_level,
        max_cells,
        visited: &visited,
    };
    let t = walk.cell(&f.f, 0)?;
    Ok(IntervalVolume::new(t.exact.clone(), t.exact.add(&t.slack)))
}
