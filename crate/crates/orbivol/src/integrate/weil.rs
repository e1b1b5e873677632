//! Point counts and canonical volumes of smooth affine schemes over O_F.

use rayon::prelude::*;

use crate::arith::{linalg, Field, Fq};

use super::poly::{MPoly, TPoly};
use super::value::VolumeValue;
use super::IntegrateError;

/// A closed subscheme of A^n over O_F, expected smooth of relative dimension `dim`.
#[derive(Clone, Debug)]
pub struct AffineSchemeDesc {
    pub field: Field,
    pub vars: Vec<String>,
    pub equations: Vec<MPoly>,
    pub dim: usize,
}

impl AffineSchemeDesc {
    pub fn parse(field: &Field, vars: &[&str], equations: &[&str], dim: usize) -> Result<Self, IntegrateError> {
        let vars: Vec<String> = vars.iter().map(|s| s.to_string()).collect();
        let equations = equations
            .iter()
            .map(|e| MPoly::parse(field, &vars, e))
            .collect::<Result<Vec<_>, _>>()?;
        if dim > vars.len() {
            return Err(IntegrateError::BadDimension { n: vars.len(), d: dim });
        }
        Ok(AffineSchemeDesc { field: field.clone(), vars, equations, dim })
    }

    /// Affine space A^n.
    pub fn affine_space(field: &Field, n: usize) -> Self {
        let vars = (1..=n).map(|i| format!("x{}", i)).collect();
        AffineSchemeDesc { field: field.clone(), vars, equations: Vec::new(), dim: n }
    }

    pub fn n(&self) -> usize {
        self.vars.len()
    }

    fn decode(&self, mut idx: u64) -> Vec<Fq> {
        let q = self.field.q();
        (0..self.n())
            .map(|_| {
                let a = Fq((idx % q) as u32);
                idx /= q;
                a
            })
            .collect()
    }

    /// Whether the reduction vanishes at `pt` with Jacobian of rank n - d there.
    pub fn is_smooth_point(&self, pt: &[Fq]) -> bool {
        if self.equations.iter().any(|e| e.eval_residue(pt) != Fq(0)) {
            return false;
        }
        if self.equations.is_empty() {
            return self.dim == self.n();
        }
        let jac: linalg::Mat = self
            .equations
            .iter()
            .map(|e| (0..self.n()).map(|i| e.derivative(i).eval_residue(pt)).collect())
            .collect();
        linalg::rank(&self.field, &jac) == self.n() - self.dim
    }

    /// Smooth F_q-points of the special fiber, in encoding order.
    pub fn smooth_points(&self) -> Vec<Vec<Fq>> {
        let total = self.field.q().pow(self.n() as u32);
        (0..total)
            .into_par_iter()
            .map(|i| self.decode(i))
            .filter(|pt| self.is_smooth_point(pt))
            .collect()
    }
}

/// |X(k)^{sm}|: points of the special fiber where X is smooth of relative dimension d.
pub fn count_smooth_points(x: &AffineSchemeDesc) -> u64 {
    if x.equations.is_empty() && x.dim == x.n() {
        return x.field.q().pow(x.n() as u32);
    }
    x.smooth_points().len() as u64
}

/// vol(X(O_F)) = |X(k)| / q^d.
pub fn weil_volume(x: &AffineSchemeDesc) -> VolumeValue {
    let f = &x.field;
    VolumeValue::integer(f.p(), count_smooth_points(x) as i64).mul(&weil_fiber_volume(x))
}

/// The volume q^{-d} of each residue fiber.
pub fn weil_fiber_volume(x: &AffineSchemeDesc) -> VolumeValue {
    let f = &x.field;
    VolumeValue::q_power(f.p(), f.r(), num_rational::Ratio::from_integer(x.dim as i64))
}

/// Number of solutions in (O/t^m)^n reducing to smooth k-points, found by
/// lifting one t-adic digit at a time and testing every candidate digit.
pub fn lift_count(x: &AffineSchemeDesc, m: usize, max_cells: u64) -> Result<u64, IntegrateError> {
    if m == 0 {
        return Err(IntegrateError::BadLevel);
    }
    let q = x.field.q();
    let n = x.n();
    if x.equations.is_empty() {
        return Ok(q.pow((n * m) as u32));
    }
    let mut layer: Vec<Vec<TPoly>> = x
        .smooth_points()
        .into_iter()
        .map(|pt| pt.into_iter().map(|c| vec![c]).collect())
        .collect();
    let digits = q.pow(n as u32);
    for j in 1..m {
        let work = layer.len() as u64 * digits;
        if work > max_cells {
            return Err(IntegrateError::TooManyCells(max_cells));
        }
        layer = layer
            .par_iter()
            .flat_map_iter(|pt| {
                (0..digits).filter_map(move |d| {
                    let delta = x.decode(d);
                    let cand: Vec<TPoly> = pt
                        .iter()
                        .zip(&delta)
                        .map(|(c, &dc)| {
                            let mut c = c.clone();
                            c.resize(j, Fq(0));
                            c.push(dc);
                            c
                        })
                        .collect();
                    x.equations
                        .iter()
                        .all(|e| e.eval_mod(&cand, j + 1).is_empty())
                        .then_some(cand)
                })
            })
            .collect();
    }
    Ok(layer.len() as u64)
}
