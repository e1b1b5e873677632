//! The groupoid of F_q-points of the twisted inertia stack of [A^n/Γ].
//!
//! An object is (y, g, α) with y ∈ A^n(F̄_q), g, α ∈ Γ such that
//! φ(y) = g·y, α·y = y and g⁻¹ φ(α) g = α^q. The element h ∈ Γ sends it to
//! (h·y, φ(h) g h⁻¹, h α h⁻¹). Each class is stored through its
//! lexicographically smallest object.

use std::collections::{BTreeSet, HashMap, HashSet};

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{linalg, Fq, TruncatedSeries};
use crate::integrate::VolumeValue;

use super::{OrbifoldError, QuotientStackDesc};

pub const DEFAULT_MAX_CELLS: u64 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InertiaClass {
    /// Coordinates in the working field of the stack.
    pub y: Vec<Fq>,
    pub g: usize,
    pub alpha: usize,
    pub weight: Ratio<i64>,
    pub aut: usize,
}

type Triple = (Vec<Fq>, usize, usize);

#[derive(Clone, Debug)]
pub struct TwistedInertia {
    pub classes: Vec<InertiaClass>,
    index: HashMap<Triple, usize>,
}

impl TwistedInertia {
    /// The class containing the object (y, g, α), if it is one.
    pub fn class_of(&self, y: &[Fq], g: usize, alpha: usize) -> Option<usize> {
        self.index.get(&(y.to_vec(), g, alpha)).copied()
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

/// Weight of α: Σ c_i / M where ρ(α) has eigenvalues ξ_M^{c_i}, 0 < c_i ≤ M.
pub fn element_weight(stack: &QuotientStackDesc, alpha: usize) -> Ratio<i64> {
    let m = stack.exponent as i64;
    let total: i64 = stack
        .eigen_exponents(alpha)
        .into_iter()
        .map(|j| if j == 0 { m } else { j as i64 })
        .sum();
    Ratio::new(total, m)
}

fn act(stack: &QuotientStackDesc, h: usize, t: &Triple) -> Triple {
    let g = stack.g();
    let hi = g.inv(h);
    (
        linalg::apply(&stack.work, &stack.rho[h], &t.0),
        g.mul(g.mul(g.phi(h), t.1), hi),
        g.mul(g.mul(h, t.2), hi),
    )
}

/// Solutions of φ(y) = g·y.
pub fn twisted_points(stack: &QuotientStackDesc, g: usize) -> Vec<Vec<Fq>> {
    linalg::twisted_fixed_space(&stack.work, stack.q, &stack.rho[g])
}

fn check_budget(stack: &QuotientStackDesc, max_cells: u64) -> Result<(), OrbifoldError> {
    let order = stack.order() as u64;
    let cells = (stack.q as u128).pow(stack.n as u32) * (order as u128) * (order as u128);
    if cells > max_cells as u128 {
        return Err(OrbifoldError::TooManyCells(cells.min(u64::MAX as u128) as u64));
    }
    Ok(())
}

/// Enumerates all classes with their automorphism counts. Fails when
/// q^n |Γ|² exceeds `max_cells`.
pub fn twisted_inertia(stack: &QuotientStackDesc, max_cells: u64) -> Result<TwistedInertia, OrbifoldError> {
    check_budget(stack, max_cells)?;
    let grp = stack.g();
    let q = stack.q;
    let order = stack.order();
    let per_g: Vec<Vec<Triple>> = (0..order)
        .into_par_iter()
        .map(|g| {
            let alphas: Vec<usize> = (0..order)
                .filter(|&a| {
                    let lhs = grp.mul(grp.mul(grp.inv(g), grp.phi(a)), g);
                    lhs == grp.pow(a, q)
                })
                .collect();
            let mut out = Vec::new();
            for y in twisted_points(stack, g) {
                for &a in &alphas {
                    if linalg::apply(&stack.work, &stack.rho[a], &y) == y {
                        out.push((y.clone(), g, a));
                    }
                }
            }
            out
        })
        .collect();
    let all: BTreeSet<Triple> = per_g.into_iter().flatten().collect();
    let mut seen: HashSet<Triple> = HashSet::with_capacity(all.len());
    let mut classes = Vec::new();
    let mut index = HashMap::with_capacity(all.len());
    for t in &all {
        if seen.contains(t) {
            continue;
        }
        let idx = classes.len();
        let mut aut = 0;
        for h in 0..order {
            let image = act(stack, h, t);
            if &image == t {
                aut += 1;
            }
            index.insert(image.clone(), idx);
            seen.insert(image);
        }
        classes.push(InertiaClass {
            y: t.0.clone(),
            g: t.1,
            alpha: t.2,
            weight: element_weight(stack, t.2),
            aut,
        });
    }
    Ok(TwistedInertia { classes, index })
}

/// q^{-w} / |Aut|.
pub fn fiber_volume(stack: &QuotientStackDesc, cls: &InertiaClass) -> VolumeValue {
    let inv_aut = BigRational::new(BigInt::one(), BigInt::from(cls.aut));
    VolumeValue::q_power(stack.p, stack.r, cls.weight).scale(&inv_aut)
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassReport {
    pub y: Vec<u32>,
    pub g: serde_json::Value,
    pub alpha: serde_json::Value,
    pub weight: String,
    pub aut: usize,
    pub volume: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct StringyReport {
    pub classes: Vec<ClassReport>,
    pub stringy_volume: VolumeValue,
    /// (Σ 1/|Aut|) / q^n.
    pub naive_count_over_qd: VolumeValue,
    pub agree: bool,
}

/// Σ q^{-w}/|Aut| over all classes, compared with the unweighted count.
pub fn stringy_volume(stack: &QuotientStackDesc, inertia: &TwistedInertia) -> StringyReport {
    let mut stringy = VolumeValue::zero(Some(stack.p));
    let mut count = BigRational::zero();
    let mut classes = Vec::with_capacity(inertia.len());
    for c in &inertia.classes {
        let v = fiber_volume(stack, c);
        stringy = stringy.add(&v);
        count += BigRational::new(BigInt::one(), BigInt::from(c.aut));
        classes.push(ClassReport {
            y: c.y.iter().map(|x| x.0).collect(),
            g: stack.element_label(c.g),
            alpha: stack.element_label(c.alpha),
            weight: c.weight.to_string(),
            aut: c.aut,
            volume: v.to_string(),
        });
    }
    let naive = VolumeValue::rational(stack.p, count)
        .mul(&VolumeValue::q_power(stack.p, stack.r, Ratio::from_integer(stack.n as i64)));
    let agree = naive == stringy;
    StringyReport { classes, stringy_volume: stringy, naive_count_over_qd: naive, agree }
}

/// The untwisted count Σ q^{-w(α)}/|Γ(F_q)| over pairs y ∈ F_q^n, α ∈ Γ(F_q)
/// with α·y = y. It ignores torsor twists and disagrees with the stringy volume.
pub fn naive_volume(stack: &QuotientStackDesc) -> VolumeValue {
    let rational = stack.g().rational_points();
    let inv = BigRational::new(BigInt::one(), BigInt::from(rational.len()));
    let mut total = VolumeValue::zero(Some(stack.p));
    for y in twisted_points(stack, 0) {
        for &a in &rational {
            if linalg::apply(&stack.work, &stack.rho[a], &y) == y {
                total = total.add(&VolumeValue::q_power(stack.p, stack.r, element_weight(stack, a)));
            }
        }
    }
    total.scale(&inv)
}

/// #[A^n/Γ](F_q) = #{(y, g) : φ(y) = g·y} / |Γ|.
pub fn groupoid_mass(stack: &QuotientStackDesc) -> BigRational {
    let pairs: usize = (0..stack.order()).map(|g| twisted_points(stack, g).len()).sum();
    BigRational::new(BigInt::from(pairs), BigInt::from(stack.order()))
}

/// A μ_N-equivariant point Spec O_L → A^n, u^N = t, with α the image of the
/// canonical generator: x(ξ_N u) = ρ(α) x(u).
#[derive(Clone, Debug)]
pub struct EquivariantPoint {
    pub coords: Vec<TruncatedSeries>,
    pub alpha: usize,
}

fn apply_series(stack: &QuotientStackDesc, h: usize, x: &[TruncatedSeries]) -> Result<Vec<TruncatedSeries>, OrbifoldError> {
    let rho = &stack.rho[h];
    let mut out = Vec::with_capacity(x.len());
    for row in rho {
        let mut acc = TruncatedSeries::zero(x[0].field(), x[0].ram_index());
        for (c, xi) in row.iter().zip(x) {
            acc = acc.add(&xi.scale(*c))?;
        }
        out.push(acc);
    }
    Ok(out)
}

fn all_agree(a: &[TruncatedSeries], b: &[TruncatedSeries]) -> bool {
    a.iter().zip(b).all(|(x, y)| x.agrees_with(y))
}

/// The inertia class of the reduction of an equivariant point, with the
/// descent datum read off from the Frobenius action on the coordinates.
pub fn specialize(stack: &QuotientStackDesc, inertia: &TwistedInertia, pt: &EquivariantPoint) -> Result<usize, OrbifoldError> {
    if pt.coords.len() != stack.n || stack.n == 0 {
        return Err(OrbifoldError::Spec("point needs n > 0 coordinates".into()));
    }
    let ram = pt.coords[0].ram_index();
    if pt.coords.iter().any(|c| **c.field() != *stack.work || c.ram_index() != ram) {
        return Err(OrbifoldError::Spec("coordinates must live over the working field with one ramification index".into()));
    }
    if pt.coords.iter().any(|c| c.valuation_lower_bound().is_some_and(|v| v < 0)) {
        return Err(OrbifoldError::Spec("point is not integral".into()));
    }
    let zeta = stack
        .root(ram as u64)
        .ok_or_else(|| OrbifoldError::Unsupported(format!("ramification {} does not divide exp(Γ)", ram)))?;
    let moved: Vec<TruncatedSeries> = pt.coords.iter().map(|c| c.act(zeta)).collect();
    if !all_agree(&moved, &apply_series(stack, pt.alpha, &pt.coords)?) {
        return Err(OrbifoldError::NotEquivariant);
    }
    let frob: Vec<TruncatedSeries> = pt.coords.iter().map(|c| c.frob(stack.q)).collect();
    let mut g = None;
    for h in 0..stack.order() {
        if all_agree(&frob, &apply_series(stack, h, &pt.coords)?) {
            g = Some(h);
            break;
        }
    }
    let g = g.ok_or(OrbifoldError::NotRational)?;
    let y: Vec<Fq> = pt
        .coords
        .iter()
        .map(|c| c.residue().ok_or_else(|| OrbifoldError::Spec("residue beyond precision".into())))
        .collect::<Result<_, _>>()?;
    inertia.class_of(&y, g, pt.alpha).ok_or(OrbifoldError::NotEquivariant)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::make_field;

    fn r(a: i64, b: i64) -> Ratio<i64> {
        Ratio::new(a, b)
    }

    fn tally(inertia: &TwistedInertia) -> Vec<(bool, Ratio<i64>, usize)> {
        let mut v: Vec<_> = inertia
            .classes
            .iter()
            .map(|c| (c.y.iter().all(|x| x.0 == 0), c.weight, c.aut))
            .collect();
        v.sort();
        v
    }

    #[test]
    fn mu2_line_classes() {
        let st = QuotientStackDesc::mu_n(5, 1, 2, &[1]).unwrap();
        let ti = twisted_inertia(&st, DEFAULT_MAX_CELLS).unwrap();
        assert_eq!(
            tally(&ti),
            vec![
                (false, r(1, 1), 1),
                (false, r(1, 1), 1),
                (false, r(1, 1), 1),
                (false, r(1, 1), 1),
                (true, r(1, 2), 2),
                (true, r(1, 2), 2),
                (true, r(1, 1), 2),
                (true, r(1, 1), 2),
            ]
        );
        let rep = stringy_volume(&st, &ti);
        assert_eq!(rep.stringy_volume.to_string(), "1 + 5^{-1/2}");
        assert_eq!(rep.naive_count_over_qd.to_string(), "6/5");
        assert!(!rep.agree);
        // ignoring twists gives (5/2) q^{-1} + q^{-1/2}/2
        assert_eq!(naive_volume(&st).to_string(), "1/2 + 1/2*5^{-1/2}");
    }

    #[test]
    fn trivial_group_is_weil() {
        let st = QuotientStackDesc::trivial(7, 1, 1).unwrap();
        let ti = twisted_inertia(&st, DEFAULT_MAX_CELLS).unwrap();
        assert_eq!(ti.len(), 7);
        assert!(ti.classes.iter().all(|c| c.aut == 1 && c.weight == r(1, 1)));
        assert_eq!(stringy_volume(&st, &ti).stringy_volume, VolumeValue::integer(7, 1));
    }

    #[test]
    fn classifying_stack_of_mu3() {
        let st = QuotientStackDesc::mu_n(7, 1, 3, &[]).unwrap();
        let ti = twisted_inertia(&st, DEFAULT_MAX_CELLS).unwrap();
        assert_eq!(ti.len(), 9);
        assert!(ti.classes.iter().all(|c| c.aut == 3));
        assert_eq!(groupoid_mass(&st), BigRational::one());
    }

    #[test]
    fn budget_guard() {
        let st = QuotientStackDesc::mu_n(5, 1, 2, &[1, 1]).unwrap();
        assert!(matches!(twisted_inertia(&st, 10), Err(OrbifoldError::TooManyCells(100))));
    }

    #[test]
    fn specialization_on_the_line() {
        let st = QuotientStackDesc::mu_n(5, 1, 2, &[1]).unwrap();
        let ti = twisted_inertia(&st, DEFAULT_MAX_CELLS).unwrap();
        let w = &st.work;
        let minus = (0..2).find(|&h| st.rho[h][0][0] != Fq(1)).unwrap();
        let u = TruncatedSeries::monomial(w, 2, Fq(1), 1);
        let c = specialize(&st, &ti, &EquivariantPoint { coords: vec![u.clone()], alpha: minus }).unwrap();
        assert_eq!(ti.classes[c].y, vec![Fq(0)]);
        assert_eq!((ti.classes[c].g, ti.classes[c].alpha), (0, minus));
        let u3 = TruncatedSeries::monomial(w, 2, Fq(1), 3);
        let x = u.add(&u3).unwrap();
        assert_eq!(specialize(&st, &ti, &EquivariantPoint { coords: vec![x], alpha: minus }).unwrap(), c);
        // u is not fixed by the trivial embedding
        assert!(matches!(
            specialize(&st, &ti, &EquivariantPoint { coords: vec![u], alpha: 0 }),
            Err(OrbifoldError::NotEquivariant)
        ));
        // a constant point
        let k = make_field(5, 1).unwrap();
        let three = crate::arith::embedding(&k, w).unwrap()[3];
        let x = TruncatedSeries::constant(w, 2, three);
        let c = specialize(&st, &ti, &EquivariantPoint { coords: vec![x], alpha: 0 }).unwrap();
        assert_eq!(ti.classes[c].g, 0);
        assert_eq!(ti.classes[c].aut, 1);
    }
}
