//! Quotient stacks [A^n/Γ] for finite linear Γ over F_{q^s}.

use serde::Deserialize;

use crate::arith::{
    embedding, is_prime, lcm, linalg, linalg::Mat, make_field, primitive_root, splitting_degree,
    Field, Fq,
};
use crate::torsor::{GroupWithFrobenius, MatrixGroup};

use super::OrbifoldError;

const GROUP_LIMIT: usize = 4096;

/// JSON description of a stack.
#[derive(Clone, Debug, Deserialize)]
pub struct StackSpec {
    pub p: u64,
    pub r: u32,
    pub n: usize,
    pub group: GroupSpec,
    #[serde(default)]
    pub ext_degree: Option<u32>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "kind")]
pub enum GroupSpec {
    /// μ_N acting through ζ ↦ diag(ζ^{a_i}), or through an explicit matrix
    /// giving the image of the chosen primitive root.
    #[serde(rename = "muN")]
    MuN {
        #[serde(rename = "N")]
        order: u64,
        #[serde(default)]
        weights: Option<Vec<i64>>,
        #[serde(default)]
        matrix: Option<Vec<Vec<u32>>>,
    },
    #[serde(rename = "matrix_list")]
    MatrixList { generators: Vec<Vec<Vec<u32>>> },
    #[serde(rename = "trivial")]
    Trivial,
}

/// [A^n/Γ] over F_q with Γ ⊂ GL_n(F_{q^s}) stable under Frobenius.
#[derive(Clone, Debug)]
pub struct QuotientStackDesc {
    pub p: u64,
    pub r: u32,
    pub q: u64,
    pub n: usize,
    /// Field of definition of the matrix entries, F_{q^s}.
    pub coeff_field: Field,
    pub group: MatrixGroup,
    /// Field large enough for twisted points and for the eigenvalues of Γ.
    pub work: Field,
    /// Group elements with entries embedded in `work`.
    pub rho: Vec<Mat>,
    /// exp(Γ).
    pub exponent: u64,
    /// The chosen primitive exp(Γ)-th root of unity in `work`.
    pub xi: Fq,
    mu_log: Option<Vec<u64>>,
}

/// The primitive N-th root of unity used throughout, for q = p^r: the
/// smallest-encoded one in F_{q^{s_N}} (s_N minimal), carried into `target` by the standard embedding.
pub fn canonical_root(target: &Field, r: u32, n: u64) -> Result<Fq, OrbifoldError> {
    let q = target.p().pow(r);
    let s = splitting_degree(q, n)?;
    let small = make_field(target.p(), r * s)?;
    let xi = primitive_root(&small, n)?;
    let emb = embedding(&small, target)?;
    Ok(emb[xi.0 as usize])
}

impl QuotientStackDesc {
    pub fn from_spec(spec: &StackSpec) -> Result<Self, OrbifoldError> {
        if !is_prime(spec.p) {
            return Err(OrbifoldError::Spec(format!("p = {} is not prime", spec.p)));
        }
        let q = spec.p.pow(spec.r);
        match &spec.group {
            GroupSpec::Trivial => Self::trivial(spec.p, spec.r, spec.n),
            GroupSpec::MuN { order, weights: Some(w), matrix: None } => {
                if w.len() != spec.n {
                    return Err(OrbifoldError::Spec("weights must have length n".into()));
                }
                Self::mu_n(spec.p, spec.r, *order, w)
            }
            GroupSpec::MuN { order, weights: None, matrix: Some(m) } => {
                let s = match spec.ext_degree {
                    Some(s) => s,
                    None => splitting_degree(q, *order)?,
                };
                let k = make_field(spec.p, spec.r * s)?;
                let a = decode_matrix(&k, m, spec.n)?;
                Self::mu_n_matrix(spec.p, spec.r, *order, &a, s)
            }
            GroupSpec::MuN { .. } => Err(OrbifoldError::Spec("muN needs exactly one of weights, matrix".into())),
            GroupSpec::MatrixList { generators } => {
                let s = spec.ext_degree.unwrap_or(1);
                let k = make_field(spec.p, spec.r * s)?;
                let gens = generators
                    .iter()
                    .map(|g| decode_matrix(&k, g, spec.n))
                    .collect::<Result<Vec<_>, _>>()?;
                Self::matrix_list(spec.p, spec.r, &gens, s)
            }
        }
    }

    /// Γ = 1 acting on A^n.
    pub fn trivial(p: u64, r: u32, n: usize) -> Result<Self, OrbifoldError> {
        Self::matrix_list(p, r, &[linalg::identity(n)], 1)
    }

    /// μ_N acting by ζ ↦ diag(ζ^{a_1}, …, ζ^{a_n}); the action need not be faithful.
    pub fn mu_n(p: u64, r: u32, order: u64, weights: &[i64]) -> Result<Self, OrbifoldError> {
        let q = p.pow(r);
        let s = splitting_degree(q, order)?;
        let k = make_field(p, r * s)?;
        let xi = canonical_root(&k, r, order)?;
        let d: Vec<Fq> = weights
            .iter()
            .map(|&a| k.powi(xi, a).expect("roots of unity are units"))
            .collect();
        Self::mu_n_matrix(p, r, order, &linalg::diag(&d), s)
    }

    /// μ_N acting through the matrix `a`, the image of the chosen primitive root.
    /// Requires a^N = 1 and ^φa = a^q.
    pub fn mu_n_matrix(p: u64, r: u32, order: u64, a: &Mat, s: u32) -> Result<Self, OrbifoldError> {
        let q = p.pow(r);
        let k = make_field(p, r * s)?;
        if linalg::pow(&k, a, order) != linalg::identity(a.len()) {
            return Err(OrbifoldError::InvalidAction("A^N != 1".into()));
        }
        if linalg::frob(&k, a, q) != linalg::pow(&k, a, q) {
            return Err(OrbifoldError::InvalidAction("Frobenius of A differs from A^q".into()));
        }
        // a faithful copy of μ_N in the corner keeps Γ = μ_N even when `a` is not faithful
        let xi = canonical_root(&k, r, order)?;
        let n = a.len();
        let mut full = linalg::identity(n + 1);
        full[0][0] = xi;
        for i in 0..n {
            for j in 0..n {
                full[i + 1][j + 1] = a[i][j];
            }
        }
        Self::build(p, r, &[full], s, n, Some((order, xi)))
    }

    /// The group generated by `gens` (entries in F_{q^s}).
    pub fn matrix_list(p: u64, r: u32, gens: &[Mat], s: u32) -> Result<Self, OrbifoldError> {
        let n = gens.first().map_or(0, |g| g.len());
        Self::build(p, r, gens, s, n, None)
    }

    /// Γ generated by `gens`, acting through the lower-right n x n block.
    fn build(p: u64, r: u32, gens: &[Mat], s: u32, n: usize, mu: Option<(u64, Fq)>) -> Result<Self, OrbifoldError> {
        let q = p.pow(r);
        let m = gens.first().map_or(0, |g| g.len());
        if gens.is_empty() || gens.iter().any(|g| g.len() != m || g.iter().any(|row| row.len() != m)) {
            return Err(OrbifoldError::Spec("generators must be square of equal size".into()));
        }
        let k = make_field(p, r * s)?;
        let group = MatrixGroup::generate(&k, gens, q, GROUP_LIMIT)?;
        let order = group.elements.len() as u64;
        if order % p == 0 {
            return Err(OrbifoldError::WildGroup { order, p });
        }
        let exponent = group.group.exponent();
        let big_s = lcm(s as u64 * exponent, splitting_degree(q, exponent)? as u64) as u32;
        let work = make_field(p, r * big_s)?;
        let emb = embedding(&k, &work)?;
        let off = m - n;
        let rho = group
            .elements
            .iter()
            .map(|g| g[off..].iter().map(|row| row[off..].iter().map(|&x| emb[x.0 as usize]).collect()).collect())
            .collect();
        let mu_log = mu.map(|(nn, xi)| {
            group
                .elements
                .iter()
                .map(|g| (0..nn).find(|&j| k.pow(xi, j) == g[0][0]).expect("corner entry is a power of xi"))
                .collect()
        });
        let xi = canonical_root(&work, r, exponent)?;
        Ok(QuotientStackDesc { p, r, q, n, coeff_field: k, group, work, rho, exponent, xi, mu_log })
    }

    /// For μ_N stacks, the j with h = ξ_N^j.
    pub fn mu_exponent(&self, h: usize) -> Option<u64> {
        self.mu_log.as_ref().map(|v| v[h])
    }

    /// A readable label for a group element: j for ξ_N^j, else the action matrix.
    pub fn element_label(&self, h: usize) -> serde_json::Value {
        match self.mu_exponent(h) {
            Some(j) => serde_json::json!(j),
            None => {
                let off = self.group.elements[h].len() - self.n;
                let m: Vec<Vec<u32>> = self.group.elements[h][off..]
                    .iter()
                    .map(|row| row[off..].iter().map(|x| x.0).collect())
                    .collect();
                serde_json::json!(m)
            }
        }
    }

    pub fn g(&self) -> &GroupWithFrobenius {
        &self.group.group
    }

    pub fn order(&self) -> usize {
        self.rho.len()
    }

    /// The compatible primitive N-th root ξ^{exp/N}, for N | exp(Γ).
    pub fn root(&self, n: u64) -> Option<Fq> {
        (self.exponent % n == 0).then(|| self.work.pow(self.xi, self.exponent / n))
    }

    /// Eigenvalue exponents of ρ(h): multiplicity of ξ^j for j = 0..exp(Γ).
    pub fn eigen_exponents(&self, h: usize) -> Vec<u64> {
        let f = &self.work;
        let mut out = Vec::with_capacity(self.n);
        for j in 0..self.exponent {
            let lam = f.pow(self.xi, j);
            let shifted = linalg::sub(f, &self.rho[h], &linalg::scale(f, lam, &linalg::identity(self.n)));
            let mult = self.n - linalg::rank(f, &shifted);
            out.extend(std::iter::repeat(j).take(mult));
        }
        out
    }

    /// Index of a matrix over `work` in Γ.
    pub fn index_of_work(&self, m: &Mat) -> Option<usize> {
        self.rho.iter().position(|x| x == m)
    }
}

fn decode_matrix(k: &Field, rows: &[Vec<u32>], n: usize) -> Result<Mat, OrbifoldError> {
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(OrbifoldError::Spec("matrix must be n x n".into()));
    }
    rows.iter()
        .map(|r| {
            r.iter()
                .map(|&x| {
                    if (x as u64) < k.q() {
                        Ok(Fq(x))
                    } else {
                        Err(OrbifoldError::Spec(format!("entry {} outside F_{}", x, k.q())))
                    }
                })
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mu2_on_line() {
        let st = QuotientStackDesc::mu_n(5, 1, 2, &[1]).unwrap();
        assert_eq!(st.order(), 2);
        assert_eq!(st.exponent, 2);
        assert_eq!(st.eigen_exponents(1), vec![1]);
        assert_eq!(st.eigen_exponents(0), vec![0]);
    }

    #[test]
    fn mu3_over_f5_is_not_constant() {
        let st = QuotientStackDesc::mu_n(5, 1, 3, &[1]).unwrap();
        assert_eq!(st.coeff_field.q(), 25);
        assert_eq!(st.g().rational_points(), vec![0]);
        // working field holds the twisted points: S = lcm(2 * 3, 2)
        assert_eq!(st.work.q(), 5u64.pow(6));
    }

    #[test]
    fn compatible_roots() {
        let st = QuotientStackDesc::matrix_list(7, 1, &[vec![vec![Fq(3)]]], 1).unwrap();
        assert_eq!(st.exponent, 6);
        let f = &st.work;
        let x2 = st.root(2).unwrap();
        assert_eq!(f.pow(x2, 2), Fq(1));
        assert_ne!(x2, Fq(1));
        assert_eq!(st.root(3).map(|x| f.pow(x, 3)), Some(Fq(1)));
    }

    #[test]
    fn invalid_specs() {
        // the constant lattice rotation is not an algebraic μ_3-action over F_5
        let rot = vec![vec![Fq(0), Fq(4)], vec![Fq(1), Fq(4)]];
        assert!(matches!(
            QuotientStackDesc::mu_n_matrix(5, 1, 3, &rot, 1),
            Err(OrbifoldError::InvalidAction(_))
        ));
        assert!(QuotientStackDesc::matrix_list(5, 1, &[rot], 1).is_ok());
        assert!(matches!(
            QuotientStackDesc::mu_n(3, 1, 3, &[1]),
            Err(OrbifoldError::Arith(_))
        ));
        let spec: StackSpec = serde_json::from_str(r#"{"p":5,"r":1,"n":1,"group":{"kind":"muN","N":2,"weights":[1]}}"#).unwrap();
        assert_eq!(QuotientStackDesc::from_spec(&spec).unwrap().order(), 2);
        assert!(serde_json::from_str::<StackSpec>(r#"{"p":5,"n":1,"group":{"kind":"muN","N":2}}"#).is_err());
    }
}
