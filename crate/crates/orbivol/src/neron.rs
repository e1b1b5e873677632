//! Elliptic curves over F_q with good reduction: point counts and rational
//! 2-isogenies.

use num_rational::Ratio;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{make_field, ArithError, Field, Fq};
use crate::integrate::VolumeValue;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NeronError {
    #[error("characteristic 2 is not supported")]
    CharacteristicTwo,
    #[error("the curve is singular")]
    Singular,
    #[error("the point is not a rational 2-torsion point")]
    NotTwoTorsion,
    #[error("the quotient curve is singular")]
    SingularQuotient,
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// y² + a1 xy + a3 y = x³ + a2 x² + a4 x + a6.
#[derive(Clone, Debug)]
pub struct WeierstrassCurve {
    pub field: Field,
    pub a: [Fq; 5],
    pub disc: Fq,
}

fn discriminant(f: &Field, [a1, a2, a3, a4, a6]: [Fq; 5]) -> Fq {
    let c = |n: i64| f.from_int(n);
    let m = |x: Fq, y: Fq| f.mul(x, y);
    let b2 = f.add(m(a1, a1), m(c(4), a2));
    let b4 = f.add(m(c(2), a4), m(a1, a3));
    let b6 = f.add(m(a3, a3), m(c(4), a6));
    let b8 = [m(m(a1, a1), a6), m(c(4), m(a2, a6)), f.neg(m(a1, m(a3, a4))), m(a2, m(a3, a3)), f.neg(m(a4, a4))]
        .into_iter()
        .fold(f.zero(), |s, x| f.add(s, x));
    [
        f.neg(m(m(b2, b2), b8)),
        f.neg(m(c(8), m(b4, m(b4, b4)))),
        f.neg(m(c(27), m(b6, b6))),
        m(c(9), m(b2, m(b4, b6))),
    ]
    .into_iter()
    .fold(f.zero(), |s, x| f.add(s, x))
}

impl WeierstrassCurve {
    pub fn new(field: &Field, a: [Fq; 5]) -> Result<Self, NeronError> {
        let disc = discriminant(field, a);
        if disc == field.zero() {
            return Err(NeronError::Singular);
        }
        Ok(WeierstrassCurve { field: field.clone(), a, disc })
    }

    /// y² = x³ + a2 x² + a4 x + a6, coefficients as integers.
    pub fn short(field: &Field, a2: i64, a4: i64, a6: i64) -> Result<Self, NeronError> {
        let z = field.zero();
        Self::new(field, [z, field.from_int(a2), z, field.from_int(a4), field.from_int(a6)])
    }

    pub fn q(&self) -> u64 {
        self.field.q()
    }

    fn lhs_minus_rhs(&self, x: Fq, y: Fq) -> Fq {
        let f = &self.field;
        let [a1, a2, a3, a4, a6] = self.a;
        let lhs = f.add(f.mul(y, y), f.mul(y, f.add(f.mul(a1, x), a3)));
        let rhs = f.add(f.mul(f.add(f.mul(f.add(x, a2), x), a4), x), a6);
        f.sub(lhs, rhs)
    }

    pub fn contains(&self, x: Fq, y: Fq) -> bool {
        self.lhs_minus_rhs(x, y) == self.field.zero()
    }

    /// Completes the square: y ↦ y - (a1 x + a3)/2 gives a1 = a3 = 0.
    fn even_form(&self) -> Result<[Fq; 3], NeronError> {
        let f = &self.field;
        if f.p() == 2 {
            return Err(NeronError::CharacteristicTwo);
        }
        let [a1, a2, a3, a4, a6] = self.a;
        let quarter = f.inv(f.from_int(4)).unwrap();
        let half = f.inv(f.from_int(2)).unwrap();
        Ok([
            f.add(a2, f.mul(quarter, f.mul(a1, a1))),
            f.add(a4, f.mul(half, f.mul(a1, a3))),
            f.add(a6, f.mul(quarter, f.mul(a3, a3))),
        ])
    }

    /// The x-coordinates of the rational 2-torsion points.
    pub fn two_torsion(&self) -> Result<Vec<Fq>, NeronError> {
        let f = &self.field;
        let [a2, a4, a6] = self.even_form()?;
        Ok(f
            .elements()
            .filter(|&x| f.add(f.mul(f.add(f.mul(f.add(x, a2), x), a4), x), a6) == f.zero())
            .collect())
    }
}

/// |E(F_q)|, the point at infinity included. Enumerates by x-coordinate.
pub fn count_points(e: &WeierstrassCurve) -> u64 {
    let f = &e.field;
    let xs: Vec<Fq> = f.elements().collect();
    1 + xs
        .par_iter()
        .map(|&x| f.elements().filter(|&y| e.contains(x, y)).count() as u64)
        .sum::<u64>()
}

/// A degree-2 isogeny E → E' with kernel {O, T}.
#[derive(Clone, Debug)]
pub struct IsogenyData {
    pub source: WeierstrassCurve,
    pub target: WeierstrassCurve,
    pub kernel: (Fq, Fq),
    pub degree: u64,
    /// (x0, a, b): the source is y² = (x - x0)((x - x0)² + a(x - x0) + b)
    /// after completing the square.
    normal: (Fq, Fq, Fq),
}

impl IsogenyData {
    /// Image of an affine point outside the kernel; None means the origin.
    pub fn map_point(&self, x: Fq, y: Fq) -> Option<(Fq, Fq)> {
        let f = &self.source.field;
        let [a1, _, a3, _, _] = self.source.a;
        let (x0, _, b) = self.normal;
        let half = f.inv(f.from_int(2)).unwrap();
        let y = f.add(y, f.mul(half, f.add(f.mul(a1, x), a3)));
        let u = f.sub(x, x0);
        let u2 = f.mul(u, u);
        let inv = f.inv(u2)?;
        Some((f.mul(f.mul(y, y), inv), f.mul(f.mul(y, f.sub(b, u2)), inv)))
    }
}

/// E' = E/⟨T⟩. With E written as y² = x(x² + ax + b) and T = (0, 0), the
/// quotient is y² = x(x² - 2ax + (a² - 4b)).
pub fn two_isogenous(e: &WeierstrassCurve, t: (Fq, Fq)) -> Result<IsogenyData, NeronError> {
    let f = &e.field;
    let [a1, _, a3, _, _] = e.a;
    if !e.contains(t.0, t.1) || f.add(f.add(f.mul(f.from_int(2), t.1), f.mul(a1, t.0)), a3) != f.zero() {
        return Err(NeronError::NotTwoTorsion);
    }
    let [a2, a4, _] = e.even_form()?;
    let x0 = t.0;
    let a = f.add(f.mul(f.from_int(3), x0), a2);
    let b = f.add(f.add(f.mul(f.from_int(3), f.mul(x0, x0)), f.mul(f.from_int(2), f.mul(a2, x0))), a4);
    let z = f.zero();
    let a_new = f.mul(f.from_int(-2), a);
    let b_new = f.sub(f.mul(a, a), f.mul(f.from_int(4), b));
    let target = WeierstrassCurve::new(f, [z, a_new, z, b_new, z]).map_err(|_| NeronError::SingularQuotient)?;
    Ok(IsogenyData { source: e.clone(), target, kernel: t, degree: 2, normal: (x0, a, b) })
}

#[derive(Clone, Debug, Serialize)]
pub struct VolumeReport {
    pub q: u64,
    pub count_source: u64,
    pub count_target: u64,
    pub volume_source: VolumeValue,
    pub volume_target: VolumeValue,
    pub equal: bool,
}

pub fn weil_volume_of_count(field: &Field, count: u64) -> VolumeValue {
    VolumeValue::integer(field.p(), count as i64).mul(&VolumeValue::q_power(field.p(), field.r(), Ratio::from_integer(1)))
}

pub fn verify_volume_equality(e: &WeierstrassCurve, e2: &WeierstrassCurve) -> VolumeReport {
    let (c1, c2) = (count_points(e), count_points(e2));
    VolumeReport {
        q: e.q(),
        count_source: c1,
        count_target: c2,
        volume_source: weil_volume_of_count(&e.field, c1),
        volume_target: weil_volume_of_count(&e2.field, c2),
        equal: c1 == c2,
    }
}

/// (N - q - 1)² ≤ 4q.
pub fn within_hasse_bound(count: u64, q: u64) -> bool {
    let d = count as i64 - q as i64 - 1;
    d * d <= 4 * q as i64
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteEntry {
    pub q: u64,
    /// The roots e1 < e2 < e3 of y² = (x - e1)(x - e2)(x - e3).
    pub roots: [u32; 3],
    pub kernel_x: u32,
    pub count_source: u64,
    pub count_target: u64,
    pub equal: bool,
    pub hasse_bound: bool,
}

impl SuiteEntry {
    pub fn passes(&self) -> bool {
        self.equal && self.hasse_bound
    }
}

/// Every curve y² = (x - e1)(x - e2)(x - e3) with distinct roots in F_p,
/// through each of its three rational 2-isogenies.
pub fn isogeny_suite(p: u64) -> Result<Vec<SuiteEntry>, NeronError> {
    let f = make_field(p, 1)?;
    let mut out = Vec::new();
    for e1 in 0..p {
        for e2 in e1 + 1..p {
            for e3 in e2 + 1..p {
                let (r1, r2, r3) = (e1 as i64, e2 as i64, e3 as i64);
                let curve = WeierstrassCurve::short(&f, -(r1 + r2 + r3), r1 * r2 + r1 * r3 + r2 * r3, -(r1 * r2 * r3))?;
                let n = count_points(&curve);
                for &k in &[e1, e2, e3] {
                    let iso = two_isogenous(&curve, (Fq(k as u32), f.zero()))?;
                    let m = count_points(&iso.target);
                    out.push(SuiteEntry {
                        q: p,
                        roots: [e1 as u32, e2 as u32, e3 as u32],
                        kernel_x: k as u32,
                        count_source: n,
                        count_target: m,
                        equal: n == m,
                        hasse_bound: within_hasse_bound(n, p) && within_hasse_bound(m, p),
                    });
                }
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrate::{count_smooth_points, AffineSchemeDesc};

    fn field(p: u64) -> Field {
        make_field(p, 1).unwrap()
    }

    fn brute(p: i64, a2: i64, a4: i64, a6: i64) -> u64 {
        let mut n = 1;
        for x in 0..p {
            for y in 0..p {
                if (y * y - x * x * x - a2 * x * x - a4 * x - a6).rem_euclid(p) == 0 {
                    n += 1;
                }
            }
        }
        n
    }

    #[test]
    fn small_counts() {
        let e = WeierstrassCurve::short(&field(7), 0, -1, 0).unwrap();
        assert_eq!(count_points(&e), 8);
        let e = WeierstrassCurve::short(&field(5), 0, 1, 0).unwrap();
        assert_eq!(count_points(&e), brute(5, 0, 1, 0));
        assert!(matches!(WeierstrassCurve::short(&field(5), 0, 0, 0), Err(NeronError::Singular)));
        // y² = x³ + x is singular at p = 2
        assert!(WeierstrassCurve::short(&field(2), 0, 1, 0).is_err());
    }

    #[test]
    fn general_form_counts() {
        // y² + xy + y = x³ - x over F_11 against the completed square
        let f = field(11);
        let e = WeierstrassCurve::new(&f, [f.one(), f.zero(), f.one(), f.from_int(-1), f.zero()]).unwrap();
        let [a2, a4, a6] = e.even_form().unwrap();
        assert_eq!(count_points(&e), brute(11, a2.0 as i64, a4.0 as i64, a6.0 as i64));
    }

    #[test]
    fn isogeny_maps_points() {
        let f = field(13);
        for (a2, a4, a6) in [(0, -1, 0), (3, 2, 0), (1, -4, -4)] {
            let e = WeierstrassCurve::short(&f, a2, a4, a6).unwrap();
            for x0 in e.two_torsion().unwrap() {
                let iso = two_isogenous(&e, (x0, f.zero())).unwrap();
                for x in f.elements() {
                    for y in f.elements().filter(|&y| e.contains(x, y)) {
                        if let Some((u, v)) = iso.map_point(x, y) {
                            assert!(iso.target.contains(u, v));
                        }
                    }
                }
                assert_eq!(count_points(&e), count_points(&iso.target));
            }
        }
    }

    #[test]
    fn rejects_bad_kernels() {
        let f = field(7);
        let e = WeierstrassCurve::short(&f, 0, -1, 0).unwrap();
        assert_eq!(two_isogenous(&e, (f.from_int(2), f.zero())).unwrap_err(), NeronError::NotTwoTorsion);
        let (x, y) = f
            .elements()
            .flat_map(|x| f.elements().map(move |y| (x, y)))
            .find(|&(x, y)| y != f.zero() && e.contains(x, y))
            .unwrap();
        assert_eq!(two_isogenous(&e, (x, y)).unwrap_err(), NeronError::NotTwoTorsion);
    }

    #[test]
    fn dual_isogeny_returns_the_count() {
        let f = field(11);
        let e = WeierstrassCurve::short(&f, 1, -2, 0).unwrap();
        let iso = two_isogenous(&e, (f.zero(), f.zero())).unwrap();
        let back = two_isogenous(&iso.target, (f.zero(), f.zero())).unwrap();
        let r = verify_volume_equality(&e, &back.target);
        assert!(r.equal);
        assert_eq!(r.volume_source.to_string(), format!("{}/11", r.count_source));
        assert!(verify_volume_equality(&e, &e).equal);
    }

    #[test]
    fn affine_chart_plus_infinity() {
        let f = field(7);
        let x = AffineSchemeDesc::parse(&f, &["x", "y"], &["y^2 - x^3 + x"], 1).unwrap();
        let e = WeierstrassCurve::short(&f, 0, -1, 0).unwrap();
        assert_eq!(count_smooth_points(&x) + 1, count_points(&e));
    }

    #[test]
    fn suite_at_five() {
        let s = isogeny_suite(5).unwrap();
        assert_eq!(s.len(), 3 * 10);
        assert!(s.iter().all(SuiteEntry::passes));
    }
}
