//! Independent computations of the fiber volumes of the specialization map.
//!
//! The twisted-form oracle splits M(O_F)^# by the Γ-torsor of each point. For
//! a cocycle c = (x_β, x_γ) the points with torsor c are the solutions of
//! γ(x) = x_γ·x and φ(x) = x_β⁻¹·x over O_F[t^{1/M}, F̄_q]. Diagonalizing x_γ as
//! P diag(ξ^{k_i}) P⁻¹ writes them as x = P (u^{k_i} w_i) with w in an O_F-form
//! of affine space, so each residue point w̄ carries mass q^{-n-Σk_i/M}/|Γ_c(F)|
//! and reduces to the object (P z̄, x_β⁻¹, x_γ).
//!
//! The Kummer oracle handles [A^1/μ_N] with N | q - 1 by integrating over the
//! coarse coordinate u = x^N directly: the valuation of u mod N gives α and
//! the unit class of its leading coefficient gives the twist.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::One;

use crate::arith::{embedding, linalg, linalg::Mat, make_field, Fq};
use crate::integrate::{IntervalVolume, VolumeValue};
use crate::torsor::enumerate_h1;

use super::{OrbifoldError, QuotientStackDesc, TwistedInertia};

/// Columns of eigenvectors of ρ(h) with their exponents k (eigenvalue ξ^k).
fn eigenbasis(stack: &QuotientStackDesc, h: usize) -> (Mat, Vec<u64>) {
    let f = &stack.work;
    let n = stack.n;
    let mut cols: Vec<(usize, u64, Vec<Fq>)> = Vec::with_capacity(n);
    for k in 0..stack.exponent {
        let lam = f.pow(stack.xi, k);
        let shifted = linalg::sub(f, &stack.rho[h], &linalg::scale(f, lam, &linalg::identity(n)));
        for v in linalg::kernel(f, &shifted, n) {
            let lead = v.iter().position(|x| x.0 != 0).unwrap();
            cols.push((lead, k, v));
        }
    }
    assert_eq!(cols.len(), n, "elements of order prime to p are semisimple");
    cols.sort_by_key(|(lead, k, _)| (*lead, *k));
    let p: Mat = (0..n).map(|i| cols.iter().map(|(_, _, v)| v[i]).collect()).collect();
    (p, cols.into_iter().map(|(_, k, _)| k).collect())
}

/// Exact fiber volumes of every class, summed torsor by torsor. Level 0
/// only brackets each fiber by [0, total volume]; any level ≥ 1 is exact,
/// since the mass of a residue point depends on nothing finer.
pub fn oracle_fiber_volumes(
    stack: &QuotientStackDesc,
    inertia: &TwistedInertia,
    level: u32,
) -> Result<Vec<IntervalVolume>, OrbifoldError> {
    let grp = stack.g();
    let f = &stack.work;
    let mut exact = vec![VolumeValue::zero(Some(stack.p)); inertia.len()];
    for class in enumerate_h1(grp, stack.q)? {
        let c = class.representative;
        let stab = (0..grp.order()).filter(|&h| grp.act(h, c) == c).count();
        let (p_mat, ks) = eigenbasis(stack, c.x_gamma);
        let b = linalg::inverse(f, &p_mat).expect("eigenbasis is invertible");
        let g = grp.inv(c.x_beta);
        let t = linalg::mul(f, &linalg::mul(f, &linalg::frob(f, &b, stack.q), &stack.rho[g]), &p_mat);
        let mut hits: BTreeMap<usize, u64> = BTreeMap::new();
        for w in linalg::twisted_fixed_space(f, stack.q, &t) {
            let z: Vec<Fq> = w.iter().zip(&ks).map(|(&x, &k)| if k == 0 { x } else { Fq(0) }).collect();
            let y = linalg::apply(f, &p_mat, &z);
            let idx = inertia
                .class_of(&y, g, c.x_gamma)
                .ok_or_else(|| OrbifoldError::InvalidAction("reduction is not an inertia object".into()))?;
            *hits.entry(idx).or_default() += 1;
        }
        let ksum: i64 = ks.iter().map(|&k| k as i64).sum();
        let w = Ratio::from_integer(stack.n as i64) + Ratio::new(ksum, stack.exponent as i64);
        let mass = VolumeValue::q_power(stack.p, stack.r, w).scale(&BigRational::new(BigInt::one(), BigInt::from(stab)));
        for (idx, count) in hits {
            exact[idx] = exact[idx].add(&mass.scale(&BigRational::from_integer(BigInt::from(count))));
        }
    }
    if level == 0 {
        let total = exact.iter().fold(VolumeValue::zero(Some(stack.p)), |a, v| a.add(v));
        let zero = VolumeValue::zero(Some(stack.p));
        return Ok(exact.iter().map(|_| IntervalVolume::new(zero.clone(), total.clone())).collect());
    }
    Ok(exact.into_iter().map(IntervalVolume::exact).collect())
}

/// The oracle interval for one class.
pub fn fiber_volume_oracle(
    stack: &QuotientStackDesc,
    inertia: &TwistedInertia,
    class: usize,
    level: u32,
) -> Result<IntervalVolume, OrbifoldError> {
    Ok(oracle_fiber_volumes(stack, inertia, level)?.swap_remove(class))
}

/// (1 - q^{-1}) q^{-D/N} / (1 - q^{-1/N}): the mass of v(u) ≥ D under |u|^{-(N-1)/N} du.
fn shell_tail(p: u64, r: u32, n: u64, depth: u64) -> VolumeValue {
    let one = VolumeValue::integer(p, 1);
    let num = one
        .sub(&VolumeValue::q_power(p, r, Ratio::from_integer(1)))
        .mul(&VolumeValue::q_power(p, r, Ratio::new(depth as i64, n as i64)));
    let den = one.sub(&VolumeValue::q_power(p, r, Ratio::new(1, n as i64)));
    num.div(&den).expect("1 - q^{-1/N} is invertible")
}

/// ∫_{O_F} |N u|^{-(N-1)/N} du, summed shell by shell v(u) = v until the
/// remaining mass is at most `tol`.
pub fn coarse_line_integral(p: u64, r: u32, n: u64, tol: &VolumeValue) -> IntervalVolume {
    let mut lo = VolumeValue::zero(Some(p));
    let shell = VolumeValue::integer(p, 1).sub(&VolumeValue::q_power(p, r, Ratio::from_integer(1)));
    let mut depth = 0u64;
    loop {
        let tail = shell_tail(p, r, n, depth);
        if !(tail.sub(tol).signum() == std::cmp::Ordering::Greater) {
            return IntervalVolume::new(lo.clone(), lo.add(&tail));
        }
        lo = lo.add(&shell.mul(&VolumeValue::q_power(p, r, Ratio::new(depth as i64, n as i64))));
        depth += 1;
    }
}

/// Kummer-theoretic fiber volumes for [A^1/μ_N] with weight 1 and N | q - 1,
/// from the shells v(u) < N·level of the coarse line. The remaining mass is
/// added to the upper end of every class over the origin.
pub fn kummer_line_oracle(
    stack: &QuotientStackDesc,
    inertia: &TwistedInertia,
    level: u32,
) -> Result<Vec<IntervalVolume>, OrbifoldError> {
    let q = stack.q;
    let n = stack.order() as u64;
    if stack.n != 1 || (q - 1) % n != 0 {
        return Err(OrbifoldError::Unsupported("Kummer oracle needs [A^1/μ_N] with N | q - 1".into()));
    }
    let w = &stack.work;
    let zeta = stack.root(n).ok_or_else(|| OrbifoldError::Unsupported("group is not cyclic".into()))?;
    let scalar = |x: Fq| -> Result<usize, OrbifoldError> {
        stack
            .index_of_work(&vec![vec![x]])
            .ok_or_else(|| OrbifoldError::Unsupported("action is not μ_N with weight 1".into()))
    };
    let alphas: Vec<usize> = (0..n).map(|j| scalar(w.pow(zeta, j))).collect::<Result<_, _>>()?;
    let base = make_field(stack.p, stack.r)?;
    let emb = embedding(&base, w)?;
    let depth = n * level as u64;
    let mut exact = vec![VolumeValue::zero(Some(stack.p)); inertia.len()];
    for eps in base.elements().filter(|e| e.0 != 0) {
        let e = emb[eps.0 as usize];
        let g = scalar(w.pow(e, (q - 1) / n))?;
        let root = w.nth_root(e, n).expect("the working field holds N-th roots of F_q");
        for v in 0..depth {
            let y = if v == 0 { root } else { Fq(0) };
            let idx = inertia
                .class_of(&[y], g, alphas[(v % n) as usize])
                .ok_or_else(|| OrbifoldError::InvalidAction("reduction is not an inertia object".into()))?;
            let mass = VolumeValue::q_power(stack.p, stack.r, Ratio::from_integer(1) + Ratio::new(v as i64, n as i64));
            exact[idx] = exact[idx].add(&mass);
        }
    }
    let tail = shell_tail(stack.p, stack.r, n, depth);
    Ok(exact
        .into_iter()
        .zip(&inertia.classes)
        .map(|(v, c)| {
            if c.y[0].0 == 0 {
                IntervalVolume::new(v.clone(), v.add(&tail))
            } else {
                IntervalVolume::exact(v)
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbifold::{fiber_volume, twisted_inertia, DEFAULT_MAX_CELLS};

    fn check_exact(st: &QuotientStackDesc) {
        let ti = twisted_inertia(st, DEFAULT_MAX_CELLS).unwrap();
        let oracle = oracle_fiber_volumes(st, &ti, 1).unwrap();
        for (c, iv) in ti.classes.iter().zip(&oracle) {
            assert_eq!(iv.lo, fiber_volume(st, c), "{:?}", c);
            assert_eq!(iv.width(), VolumeValue::zero(Some(st.p)));
        }
    }

    #[test]
    fn twisted_forms_match_on_small_stacks() {
        check_exact(&QuotientStackDesc::mu_n(5, 1, 2, &[1]).unwrap());
        check_exact(&QuotientStackDesc::mu_n(5, 1, 3, &[1]).unwrap());
        check_exact(&QuotientStackDesc::mu_n(7, 1, 3, &[1, 2]).unwrap());
        check_exact(&QuotientStackDesc::mu_n(7, 1, 3, &[]).unwrap());
        check_exact(&QuotientStackDesc::trivial(3, 1, 2).unwrap());
    }

    #[test]
    fn level_zero_is_a_bracket() {
        let st = QuotientStackDesc::mu_n(5, 1, 2, &[1]).unwrap();
        let ti = twisted_inertia(&st, DEFAULT_MAX_CELLS).unwrap();
        let iv = fiber_volume_oracle(&st, &ti, 0, 0).unwrap();
        assert_eq!(iv.lo, VolumeValue::zero(Some(5)));
        assert!(iv.contains(&fiber_volume(&st, &ti.classes[0])));
    }

    #[test]
    fn kummer_shells() {
        let st = QuotientStackDesc::mu_n(5, 1, 2, &[1]).unwrap();
        let ti = twisted_inertia(&st, DEFAULT_MAX_CELLS).unwrap();
        let tol = VolumeValue::q_power(5, 1, Ratio::from_integer(6));
        for (c, iv) in ti.classes.iter().zip(kummer_line_oracle(&st, &ti, 8).unwrap()) {
            assert!(iv.contains(&fiber_volume(&st, c)), "{:?} {:?}", c, iv);
            assert!(iv.within(&tol));
        }
        let not_split = QuotientStackDesc::mu_n(5, 1, 3, &[1]).unwrap();
        let ti = twisted_inertia(&not_split, DEFAULT_MAX_CELLS).unwrap();
        assert!(kummer_line_oracle(&not_split, &ti, 2).is_err());
    }

    #[test]
    fn coarse_line() {
        let tol = VolumeValue::q_power(5, 1, Ratio::from_integer(8));
        let iv = coarse_line_integral(5, 1, 2, &tol);
        assert!(iv.contains(&VolumeValue::integer(5, 1).add(&VolumeValue::q_power(5, 1, Ratio::new(1, 2)))));
        assert!(iv.within(&tol));
    }
}
