//! Gerbes on Bμ_N, their Hasse invariants, and the evaluation
//! inv(x^*α_L) = χ_L(e(x)) on [A^1/μ_N].

use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::arith::{embedding, make_field, Fq, TruncatedSeries};
use crate::orbifold::{specialize, EquivariantPoint, InertiaClass, OrbifoldError, QuotientStackDesc, TwistedInertia};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HasseError {
    #[error("N must be positive")]
    ZeroOrder,
    #[error("values do not define a homomorphism to Z/{0}")]
    NotHomomorphism(u64),
    #[error("group element {0} is outside the domain of the character")]
    OutOfDomain(usize),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Orbifold(#[from] OrbifoldError),
}

/// An element of Q/Z, kept in [0, 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QmodZ(Ratio<i64>);

impl QmodZ {
    pub fn new(num: i64, den: i64) -> Self {
        let r = Ratio::new(num, den);
        QmodZ(r - r.floor())
    }

    pub fn zero() -> Self {
        QmodZ(Ratio::from_integer(0))
    }

    pub fn value(&self) -> Ratio<i64> {
        self.0
    }

    pub fn add(&self, o: &Self) -> Self {
        let r = self.0 + o.0;
        QmodZ(r - r.floor())
    }

    /// e^{2πiλ} as (re, im), for display.
    pub fn to_unit_circle(&self) -> (f64, f64) {
        let angle = 2.0 * std::f64::consts::PI * (*self.0.numer() as f64 / *self.0.denom() as f64);
        (angle.cos(), angle.sin())
    }
}

impl fmt::Display for QmodZ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl Serialize for QmodZ {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// A class in H²(Bμ_N, G_m)_unr ≅ Z/N.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct BmuNGerbeClass {
    pub n: u64,
    pub cls: u64,
}

impl BmuNGerbeClass {
    pub fn new(n: u64, cls: u64) -> Result<Self, HasseError> {
        if n == 0 {
            return Err(HasseError::ZeroOrder);
        }
        Ok(BmuNGerbeClass { n, cls: cls % n })
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.n, o.n);
        BmuNGerbeClass { n: self.n, cls: (self.cls + o.cls) % self.n }
    }
}

/// A character μ_N → G_m, ζ ↦ ζ^χ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MuNCharacter {
    pub n: u64,
    pub chi: u64,
}

impl MuNCharacter {
    pub fn new(n: u64, chi: u64) -> Result<Self, HasseError> {
        if n == 0 {
            return Err(HasseError::ZeroOrder);
        }
        Ok(MuNCharacter { n, chi: chi % n })
    }
}

pub fn invariant(g: &BmuNGerbeClass) -> QmodZ {
    QmodZ::new(g.cls as i64, g.n as i64)
}

/// The image under Z/N → Z/dN, 1 ↦ d.
pub fn push_along_inclusion(g: &BmuNGerbeClass, d: u64) -> Result<BmuNGerbeClass, HasseError> {
    BmuNGerbeClass::new(g.n * d, g.cls * d)
}

/// The gerbe generated by Frobenius acting through the torsor L_χ.
pub fn torsor_gerbe(chi: &MuNCharacter) -> BmuNGerbeClass {
    BmuNGerbeClass { n: chi.n, cls: chi.chi }
}

/// A homomorphism Γ → Z/M, given on every group element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Character {
    pub modulus: u64,
    pub values: Vec<u64>,
}

impl Character {
    pub fn new(stack: &QuotientStackDesc, modulus: u64, values: Vec<u64>) -> Result<Self, HasseError> {
        if modulus == 0 {
            return Err(HasseError::ZeroOrder);
        }
        let g = stack.g();
        if values.len() != g.order() {
            return Err(HasseError::NotHomomorphism(modulus));
        }
        for a in 0..g.order() {
            for b in 0..g.order() {
                if (values[a] + values[b]) % modulus != values[g.mul(a, b)] % modulus {
                    return Err(HasseError::NotHomomorphism(modulus));
                }
            }
        }
        Ok(Character { modulus, values })
    }

    /// ξ^j ↦ χ j on a μ_N stack.
    pub fn from_mu(stack: &QuotientStackDesc, chi: &MuNCharacter) -> Result<Self, HasseError> {
        let values = (0..stack.order())
            .map(|h| stack.mu_exponent(h).map(|j| j * chi.chi % chi.n).ok_or(HasseError::OutOfDomain(h)))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(stack, chi.n, values)
    }

    pub fn trivial(stack: &QuotientStackDesc) -> Self {
        Character { modulus: 1, values: vec![0; stack.order()] }
    }
}

/// L(α) ∈ Z/M read in Q/Z.
pub fn chi_of_inertia(l: &Character, cls: &InertiaClass) -> Result<QmodZ, HasseError> {
    let v = l.values.get(cls.alpha).ok_or(HasseError::OutOfDomain(cls.alpha))?;
    Ok(QmodZ::new(*v as i64, l.modulus as i64))
}

/// The tame symbol (a, b) = (-1)^{v(a)v(b)} a^{v(b)} / b^{v(a)} mod t, for
/// nonzero a, b ∈ F_q((t)).
pub fn tame_symbol(a: &TruncatedSeries, b: &TruncatedSeries) -> Option<Fq> {
    let f = a.field();
    let (va, vb) = (a.valuation()?, b.valuation()?);
    let (ca, cb) = (a.leading_coeff()?, b.leading_coeff()?);
    let sign = if (va * vb).is_odd() { f.from_int(-1) } else { f.one() };
    let num = f.powi(ca, vb)?;
    let den = f.powi(cb, va)?;
    Some(f.mul(sign, f.div(num, den)?))
}

#[derive(Clone, Debug, Serialize)]
pub struct HasseCheck {
    pub lhs: QmodZ,
    pub rhs: QmodZ,
    pub equal: bool,
}

/// The invariant of x^*α_L computed as the tame symbol of u against the
/// unit ε₀ whose Kummer class is the unramified character sending Frobenius
/// to ξ_N; set against χ_L of the specialization of x = u^{1/N}.
pub fn hasse_specialization_check(
    stack: &QuotientStackDesc,
    inertia: &TwistedInertia,
    l: &Character,
    u: &TruncatedSeries,
    rel_prec: i64,
) -> Result<HasseCheck, HasseError> {
    let q = stack.q;
    let n = stack.order() as u64;
    if stack.n != 1 || (q - 1) % n != 0 || stack.mu_exponent(0).is_none() {
        return Err(HasseError::Unsupported("needs [A^1/μ_N] with N | q - 1".into()));
    }
    let base = make_field(stack.p, stack.r).map_err(OrbifoldError::from)?;
    if **u.field() != *base || u.ram_index() != 1 {
        return Err(HasseError::Unsupported("u must be a series in t over F_q".into()));
    }
    let w = &stack.work;
    let emb = embedding(&base, w).map_err(OrbifoldError::from)?;
    let gen = (0..stack.order())
        .find(|&h| stack.mu_exponent(h) == Some(1))
        .expect("μ_N has a generator");
    let chi = l.values[gen];

    // left side: (ε₀, u) with ε₀^{(q-1)/N} = ξ_N
    let xi_w = stack.root(n).unwrap();
    let eps0 = base
        .elements()
        .find(|&e| e.0 != 0 && emb[base.pow(e, (q - 1) / n).0 as usize] == xi_w)
        .expect("F_q^× surjects onto μ_N");
    let e0 = TruncatedSeries::constant(&base, 1, eps0);
    let symbol = tame_symbol(&e0, u).ok_or_else(|| HasseError::Unsupported("u = 0".into()))?;
    let s = emb[base.pow(symbol, (q - 1) / n).0 as usize];
    let j = (0..n).find(|&j| w.pow(xi_w, j) == s).expect("symbol power is an N-th root of unity");
    let lhs = QmodZ::new((chi * j) as i64, l.modulus as i64);

    // right side: specialize x = u^{1/N}
    let v = u.valuation().ok_or_else(|| HasseError::Unsupported("u = 0".into()))?;
    let prec = u.prec().unwrap_or(v + rel_prec);
    let coeffs: Vec<Fq> = (v..prec).map(|k| emb[u.coeff(k).unwrap().0 as usize]).collect();
    let uw = TruncatedSeries::new(w, 1, v, coeffs, u.prec());
    let x = uw
        .lift_ram(n as u32)
        .nth_root(n, rel_prec * n as i64)
        .map_err(OrbifoldError::from)?;
    let moved = x.act(xi_w);
    let alpha = (0..stack.order())
        .find(|&h| moved.agrees_with(&x.scale(stack.rho[h][0][0])))
        .ok_or(OrbifoldError::NotEquivariant)?;
    let cls = specialize(stack, inertia, &EquivariantPoint { coords: vec![x], alpha })?;
    let rhs = chi_of_inertia(l, &inertia.classes[cls])?;
    Ok(HasseCheck { lhs, rhs, equal: lhs == rhs })
}

/// The coarse points t^v ε (1 + c t) with v ≤ max_v, ε ∈ F_q^×, c ∈ F_q.
pub fn coarse_points(p: u64, r: u32, max_v: i64) -> Result<Vec<TruncatedSeries>, HasseError> {
    let k = make_field(p, r).map_err(OrbifoldError::from)?;
    let mut out = Vec::new();
    for v in 0..=max_v {
        for e in k.elements().filter(|e| e.0 != 0) {
            for c in k.elements() {
                out.push(TruncatedSeries::exact(&k, 1, v, vec![e, k.mul(e, c)]));
            }
        }
    }
    Ok(out)
}
