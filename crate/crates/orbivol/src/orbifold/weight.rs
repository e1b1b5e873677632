//! Weights (ages) of μ_N-actions and the substitution x ↦ B⁻¹ diag(t^{c_i/N}) B x.

use num_rational::Ratio;
use serde::Serialize;

use crate::arith::{
    embedding, lcm, linalg, linalg::Mat, make_field, splitting_degree, Field, Fq, TruncatedSeries,
};

use super::stack::canonical_root;
use super::OrbifoldError;

/// Σ c_i with c_i ∈ (0, 1] lifting χ_i ∈ Q/Z.
pub fn weight_of_tuple(chis: &[Ratio<i64>]) -> Ratio<i64> {
    chis.iter().fold(Ratio::from_integer(0), |acc, chi| {
        let frac = chi - chi.floor();
        acc + if frac == Ratio::from_integer(0) { Ratio::from_integer(1) } else { frac }
    })
}

/// A linear μ_N-action on A^n over F_q: `matrix` (entries in F_{q^s}) is the
/// image of the chosen primitive N-th root of unity.
#[derive(Clone, Debug)]
pub struct MuNAction {
    pub p: u64,
    pub r: u32,
    pub order: u64,
    pub s: u32,
    pub matrix: Mat,
}

/// Diagonalization data of a μ_N-action over a field containing μ_N.
#[derive(Clone, Debug)]
pub struct Diagonalization {
    pub field: Field,
    pub xi: Fq,
    /// Eigenvalue of the i-th coordinate is ξ^{c_i}, 1 ≤ c_i ≤ N.
    pub exponents: Vec<u64>,
    /// B with B A B⁻¹ = diag(ξ^{c_i}).
    pub b: Mat,
    pub b_inv: Mat,
    pub matrix: Mat,
}

impl MuNAction {
    pub fn new(p: u64, r: u32, order: u64, s: u32, matrix: Mat) -> Self {
        MuNAction { p, r, order, s, matrix }
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.r)
    }

    /// Diagonalizes over F_{q^S}, S = lcm(s, ord_N(q)). Eigenvector columns are
    /// ordered by the position of their leading 1, so diagonal actions get B = 1.
    pub fn diagonalize(&self) -> Result<Diagonalization, OrbifoldError> {
        let q = self.q();
        let n = self.matrix.len();
        let k = make_field(self.p, self.r * self.s)?;
        let big = lcm(self.s as u64, splitting_degree(q, self.order)? as u64) as u32;
        let w = make_field(self.p, self.r * big)?;
        let emb = embedding(&k, &w)?;
        let a: Mat = self
            .matrix
            .iter()
            .map(|row| row.iter().map(|&x| emb[x.0 as usize]).collect())
            .collect();
        if linalg::pow(&w, &a, self.order) != linalg::identity(n) {
            return Err(OrbifoldError::InvalidAction("A^N != 1".into()));
        }
        let xi = canonical_root(&w, self.r, self.order)?;
        let mut cols: Vec<(usize, u64, Vec<Fq>)> = Vec::new();
        for c in 1..=self.order {
            let lam = w.pow(xi, c);
            let shifted = linalg::sub(&w, &a, &linalg::scale(&w, lam, &linalg::identity(n)));
            for v in linalg::kernel(&w, &shifted, n) {
                let lead = v.iter().position(|x| x.0 != 0).unwrap();
                cols.push((lead, c, v));
            }
        }
        if cols.len() != n {
            return Err(OrbifoldError::InvalidAction("matrix is not diagonalizable over μ_N".into()));
        }
        cols.sort_by_key(|(lead, c, _)| (*lead, *c));
        let p_mat: Mat = (0..n).map(|i| cols.iter().map(|(_, _, v)| v[i]).collect()).collect();
        let b = linalg::inverse(&w, &p_mat).expect("eigenvectors of distinct eigenspaces are independent");
        Ok(Diagonalization {
            field: w,
            xi,
            exponents: cols.iter().map(|(_, c, _)| *c).collect(),
            b,
            b_inv: p_mat,
            matrix: a,
        })
    }
}

/// (Σ c_i) / N.
pub fn action_weight(act: &MuNAction) -> Result<Ratio<i64>, OrbifoldError> {
    let d = act.diagonalize()?;
    let total: u64 = d.exponents.iter().sum();
    Ok(Ratio::new(total as i64, act.order as i64))
}

#[derive(Clone, Debug, Serialize)]
pub struct LambdaCertificate {
    /// Every M_e = B⁻¹ E_e B is fixed by Frobenius.
    pub blocks_rational: bool,
    /// ^φB B⁻¹ commutes with diag(t^{c_i/N}).
    pub conjugator_commutes: bool,
    /// The assembled series matrix equals its Frobenius conjugate.
    pub series_fixed: bool,
}

impl LambdaCertificate {
    pub fn passes(&self) -> bool {
        self.blocks_rational && self.conjugator_commutes && self.series_fixed
    }
}

/// The substitution Σ_e u^e M_e (u^N = t) with its rationality certificate.
#[derive(Clone, Debug)]
pub struct LambdaMap {
    pub diag: Diagonalization,
    /// (e, M_e) for each distinct exponent e = c_i.
    pub blocks: Vec<(u64, Mat)>,
    /// Entries of B⁻¹ λ̃ B as series in u with ram index N.
    pub series: Vec<Vec<TruncatedSeries>>,
    pub certificate: LambdaCertificate,
}

impl LambdaMap {
    /// Applies the substitution to a point with coordinates over O_F.
    pub fn apply(&self, x: &[TruncatedSeries]) -> Result<Vec<TruncatedSeries>, OrbifoldError> {
        let n = x.len();
        let mut out = Vec::with_capacity(n);
        for row in &self.series {
            let mut acc = TruncatedSeries::zero(&self.diag.field, self.series_ram());
            for (s, xi) in row.iter().zip(x) {
                acc = acc.add(&s.mul(xi)?)?;
            }
            out.push(acc);
        }
        Ok(out)
    }

    fn series_ram(&self) -> u32 {
        self.series.first().and_then(|r| r.first()).map_or(1, |s| s.ram_index())
    }
}

/// Builds B⁻¹ diag(t^{c_i/N}) B and checks that it is defined over O_F.
/// Fails with `NotRational` when the action is not Frobenius-compatible.
pub fn lambda_map(act: &MuNAction) -> Result<LambdaMap, OrbifoldError> {
    let d = act.diagonalize()?;
    let w = &d.field;
    let q = act.q();
    let n = d.exponents.len();
    let mut distinct: Vec<u64> = d.exponents.clone();
    distinct.sort();
    distinct.dedup();
    let blocks: Vec<(u64, Mat)> = distinct
        .iter()
        .map(|&e| {
            let proj: Vec<Fq> = d.exponents.iter().map(|&c| Fq((c == e) as u32)).collect();
            (e, linalg::mul(w, &linalg::mul(w, &d.b_inv, &linalg::diag(&proj)), &d.b))
        })
        .collect();
    let blocks_rational = blocks.iter().all(|(_, m)| &linalg::frob(w, m, q) == m);
    let conj = linalg::mul(w, &linalg::frob(w, &d.b, q), &d.b_inv);
    let conjugator_commutes = (0..n).all(|i| (0..n).all(|j| d.exponents[i] == d.exponents[j] || conj[i][j].0 == 0));
    let ram = act.order as u32;
    let series: Vec<Vec<TruncatedSeries>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let mut coeffs = vec![Fq(0); act.order as usize + 1];
                    for (e, m) in &blocks {
                        coeffs[*e as usize] = w.add(coeffs[*e as usize], m[i][j]);
                    }
                    TruncatedSeries::exact(w, ram, 0, coeffs)
                })
                .collect()
        })
        .collect();
    let series_fixed = series.iter().flatten().all(|s| s.frob(q) == *s);
    let certificate = LambdaCertificate { blocks_rational, conjugator_commutes, series_fixed };
    if !certificate.passes() {
        return Err(OrbifoldError::NotRational);
    }
    Ok(LambdaMap { diag: d, blocks, series, certificate })
}

/// Rotation by the angle of ξ: [[cos, -sin], [sin, cos]] with cos = (ξ + ξ⁻¹)/2
/// and sin = (ξ - ξ⁻¹)/(2i), i² = -1. Needs p odd and -1 a square in F_{q^s}.
pub fn rotation_action(p: u64, r: u32, order: u64) -> Result<MuNAction, OrbifoldError> {
    let q = p.pow(r);
    let s = lcm(splitting_degree(q, order)? as u64, splitting_degree(q, 4)? as u64) as u32;
    let k = make_field(p, r * s)?;
    let xi = canonical_root(&k, r, order)?;
    let xinv = k.inv(xi).unwrap();
    let two_inv = k.inv(k.from_int(2)).ok_or(OrbifoldError::InvalidAction("p = 2".into()))?;
    let i = k.nth_root(k.from_int(-1), 2).ok_or(OrbifoldError::InvalidAction("no square root of -1".into()))?;
    let cos = k.mul(k.add(xi, xinv), two_inv);
    let sin = k.div(k.mul(k.sub(xi, xinv), two_inv), i).unwrap();
    let matrix = vec![vec![cos, k.neg(sin)], vec![sin, cos]];
    Ok(MuNAction::new(p, r, order, s, matrix))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> Ratio<i64> {
        Ratio::new(a, b)
    }

    #[test]
    fn tuple_weights() {
        assert_eq!(weight_of_tuple(&[r(0, 1)]), r(1, 1));
        assert_eq!(weight_of_tuple(&[r(1, 2), r(1, 2)]), r(1, 1));
        assert_eq!(weight_of_tuple(&[r(1, 3), r(2, 3), r(0, 1)]), r(2, 1));
        assert_eq!(weight_of_tuple(&[r(-1, 3)]), r(2, 3));
    }

    #[test]
    fn simple_actions() {
        let id = MuNAction::new(5, 1, 1, 1, linalg::identity(3));
        assert_eq!(action_weight(&id).unwrap(), r(3, 1));
        let neg = MuNAction::new(5, 1, 2, 1, vec![vec![Fq(4)]]);
        assert_eq!(action_weight(&neg).unwrap(), r(1, 2));
        let rot = rotation_action(5, 1, 3).unwrap();
        assert_eq!(rot.s, 2);
        assert_eq!(action_weight(&rot).unwrap(), r(1, 1));
    }

    #[test]
    fn diagonal_lambda_is_coordinatewise() {
        let f = make_field(7, 1).unwrap();
        let xi = canonical_root(&f, 1, 3).unwrap();
        let a = linalg::diag(&[xi, f.pow(xi, 2)]);
        let lm = lambda_map(&MuNAction::new(7, 1, 3, 1, a)).unwrap();
        assert_eq!(lm.diag.b, linalg::identity(2));
        assert_eq!(lm.diag.exponents, vec![1, 2]);
        assert_eq!(lm.series[0][0], TruncatedSeries::monomial(&lm.diag.field, 3, Fq(1), 1));
        assert!(lm.series[0][1].is_exact_zero());
    }

    #[test]
    fn rotation_certificate() {
        let rot = rotation_action(5, 1, 3).unwrap();
        let lm = lambda_map(&rot).unwrap();
        assert!(lm.certificate.passes());
        assert_ne!(lm.diag.b, linalg::identity(2));
        // the constant lattice rotation is not a μ_3-action over F_5
        let lattice = MuNAction::new(5, 1, 3, 1, vec![vec![Fq(0), Fq(4)], vec![Fq(1), Fq(4)]]);
        assert!(matches!(lambda_map(&lattice), Err(OrbifoldError::NotRational)));
    }
}
