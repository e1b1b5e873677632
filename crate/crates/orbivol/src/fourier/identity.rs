//! The twisted character-sum identity between a group and its dual side, and
//! the stable and isotypic equalities obtained by summing it over all twists.
//!
//! Data: twist groups A_G ∋ t and A_Ĝ ∋ s, counts N^G[t][κ] indexed by the
//! characters κ of A_Ĝ with weights F_G(κ), and N^Ĝ[s][ν] indexed by the
//! characters ν of A_G with weights F_Ĝ(ν). For every (s, t):
//!
//!   Σ_κ κ(s) q^{-F_G(κ)} N^G[t][κ] = Σ_ν ν(t) q^{-F_Ĝ(ν)} N^Ĝ[s][ν].
//!
//! Values are polynomials in a formal q^{±1/D} over Q(ζ_m).

use std::collections::BTreeMap;

use num_rational::{BigRational, Ratio};
use rand::Rng;
use serde::Serialize;

use super::cyclo::Cyclo;
use super::group::{characters, parse_rational, Character, FiniteAbelianGroup};
use super::FourierError;
use crate::integrate::{Coeff, PowerSum};

pub type Value = PowerSum<Cyclo>;

/// q^{-e} with q formal.
pub fn q_pow(e: Ratio<i64>) -> Value {
    Value::term(None, Cyclo::one(), e)
}

fn scalar(c: Cyclo) -> Value {
    Value::constant(None, c)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MainIdentityData {
    pub a_g: FiniteAbelianGroup,
    pub a_dual: FiniteAbelianGroup,
    /// F_G(κ), κ ranging over the characters of A_Ĝ.
    pub f_g: Vec<Ratio<i64>>,
    /// F_Ĝ(ν), ν ranging over the characters of A_G.
    pub f_dual: Vec<Ratio<i64>>,
    /// N^G[t][κ].
    pub n_g: Vec<Vec<Value>>,
    /// N^Ĝ[s][ν].
    pub n_dual: Vec<Vec<Value>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityReport {
    pub pairs: usize,
    /// Failing (s, t) as element indices.
    pub failing: Vec<(usize, usize)>,
}

impl IdentityReport {
    pub fn passes(&self) -> bool {
        self.failing.is_empty()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StableEquality {
    pub lhs: Value,
    pub rhs: Value,
    pub equal: bool,
    /// The double sums agree with the orbit averages of the κ = 1 entries.
    pub collapse_ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct KappaIdentity {
    /// #^λ on the G side.
    pub isotypic: Value,
    /// The stable count of the λ-block on the Ĝ side.
    pub stable_block: Value,
    /// q^{F_G(1) - F_Ĝ(λ)}.
    pub transfer_factor: Value,
    pub equal: bool,
    pub collapse_ok: bool,
}

impl MainIdentityData {
    pub fn validate(&self) -> Result<(), FourierError> {
        let (ng, nd) = (self.a_g.order(), self.a_dual.order());
        let ok = self.f_g.len() == nd
            && self.f_dual.len() == ng
            && self.n_g.len() == ng
            && self.n_g.iter().all(|r| r.len() == nd)
            && self.n_dual.len() == nd
            && self.n_dual.iter().all(|r| r.len() == ng);
        if ok {
            Ok(())
        } else {
            Err(FourierError::Shape)
        }
    }

    /// Σ_κ κ(s) q^{-F_G(κ)} N^G[t][κ].
    pub fn g_side(&self, s: usize, t: usize) -> Value {
        let sv = self.a_dual.element(s);
        characters(&self.a_dual)
            .iter()
            .enumerate()
            .fold(Value::zero(None), |acc, (k, kappa)| {
                acc.add(&self.n_g[t][k].mul(&q_pow(self.f_g[k])).scale(&kappa.value(&sv)))
            })
    }

    /// Σ_ν ν(t) q^{-F_Ĝ(ν)} N^Ĝ[s][ν].
    pub fn dual_side(&self, s: usize, t: usize) -> Value {
        let tv = self.a_g.element(t);
        characters(&self.a_g)
            .iter()
            .enumerate()
            .fold(Value::zero(None), |acc, (k, nu)| {
                acc.add(&self.n_dual[s][k].mul(&q_pow(self.f_dual[k])).scale(&nu.value(&tv)))
            })
    }

    fn both_orders(&self) -> Cyclo {
        Cyclo::integer((self.a_g.order() * self.a_dual.order()) as i64)
    }
}

pub fn verify_main_identity(d: &MainIdentityData) -> IdentityReport {
    let mut failing = Vec::new();
    for s in 0..d.a_dual.order() {
        for t in 0..d.a_g.order() {
            if d.g_side(s, t) != d.dual_side(s, t) {
                failing.push((s, t));
            }
        }
    }
    IdentityReport { pairs: d.a_g.order() * d.a_dual.order(), failing }
}

fn weighted_double_sums(d: &MainIdentityData, weight: &dyn Fn(usize) -> Cyclo) -> (Value, Value) {
    let mut lhs = Value::zero(None);
    let mut rhs = Value::zero(None);
    for s in 0..d.a_dual.order() {
        for t in 0..d.a_g.order() {
            let w = weight(t);
            lhs = lhs.add(&d.g_side(s, t).scale(&w));
            rhs = rhs.add(&d.dual_side(s, t).scale(&w));
        }
    }
    (lhs, rhs)
}

/// Sums the identity over all (s, t) and normalizes both sides to stable counts.
pub fn derive_stable_equality(d: &MainIdentityData) -> StableEquality {
    let (sum_g, sum_dual) = weighted_double_sums(d, &|_| Cyclo::one());
    let norm = d.both_orders().inv().unwrap();
    let lhs = sum_g.mul(&q_pow(-d.f_g[0])).scale(&norm);
    let rhs = sum_dual.mul(&q_pow(-d.f_dual[0])).scale(&norm);
    let avg_g = (0..d.a_g.order())
        .fold(Value::zero(None), |a, t| a.add(&d.n_g[t][0]))
        .scale(&Cyclo::integer(d.a_g.order() as i64).inv().unwrap());
    let avg_dual = (0..d.a_dual.order())
        .fold(Value::zero(None), |a, s| a.add(&d.n_dual[s][0]))
        .scale(&Cyclo::integer(d.a_dual.order() as i64).inv().unwrap());
    let collapse_ok = lhs == avg_g && rhs == avg_dual;
    StableEquality { equal: lhs == rhs, lhs, rhs, collapse_ok }
}

/// Sums the identity against λ⁻¹(t), λ a character of A_G given by index.
pub fn derive_kappa_identity(d: &MainIdentityData, lambda: usize) -> Result<KappaIdentity, FourierError> {
    let chars = characters(&d.a_g);
    let lam: &Character = chars.get(lambda).ok_or(FourierError::Shape)?;
    let weight = |t: usize| lam.value(&d.a_g.element(t)).inv().unwrap();
    let (sum_g, sum_dual) = weighted_double_sums(d, &weight);
    let norm = d.both_orders().inv().unwrap();
    let isotypic = sum_g.mul(&q_pow(-d.f_g[0])).scale(&norm);
    let stable_block = sum_dual.mul(&q_pow(-d.f_dual[lambda])).scale(&norm);
    let transfer_factor = q_pow(d.f_dual[lambda] - d.f_g[0]);
    let direct_iso = (0..d.a_g.order())
        .fold(Value::zero(None), |a, t| a.add(&d.n_g[t][0].scale(&weight(t))))
        .scale(&Cyclo::integer(d.a_g.order() as i64).inv().unwrap());
    let direct_block = (0..d.a_dual.order())
        .fold(Value::zero(None), |a, s| a.add(&d.n_dual[s][lambda]))
        .scale(&Cyclo::integer(d.a_dual.order() as i64).inv().unwrap());
    let collapse_ok = isotypic == direct_iso && stable_block == direct_block;
    let equal = isotypic == transfer_factor.mul(&stable_block);
    Ok(KappaIdentity { isotypic, stable_block, transfer_factor, equal, collapse_ok })
}

/// Builds data satisfying the identity from a joint table J[κ][ν]:
/// N^G[t][κ] = q^{F_G(κ)} Σ_ν ν(t) J[κ][ν] and N^Ĝ[s][ν] = q^{F_Ĝ(ν)} Σ_κ κ(s) J[κ][ν].
pub fn mirror_data(
    a_g: FiniteAbelianGroup,
    a_dual: FiniteAbelianGroup,
    f_g: Vec<Ratio<i64>>,
    f_dual: Vec<Ratio<i64>>,
    joint: &[Vec<Value>],
) -> Result<MainIdentityData, FourierError> {
    let kappas = characters(&a_dual);
    let nus = characters(&a_g);
    if joint.len() != kappas.len() || joint.iter().any(|r| r.len() != nus.len()) {
        return Err(FourierError::Shape);
    }
    let n_g = a_g
        .elements()
        .map(|t| {
            (0..kappas.len())
                .map(|k| {
                    let s = nus
                        .iter()
                        .enumerate()
                        .fold(Value::zero(None), |a, (v, nu)| a.add(&joint[k][v].scale(&nu.value(&t))));
                    s.mul(&q_pow(-f_g[k]))
                })
                .collect()
        })
        .collect();
    let n_dual = a_dual
        .elements()
        .map(|s| {
            (0..nus.len())
                .map(|v| {
                    let x = kappas
                        .iter()
                        .enumerate()
                        .fold(Value::zero(None), |a, (k, kappa)| a.add(&joint[k][v].scale(&kappa.value(&s))));
                    x.mul(&q_pow(-f_dual[v]))
                })
                .collect()
        })
        .collect();
    let d = MainIdentityData { a_g, a_dual, f_g, f_dual, n_g, n_dual };
    d.validate()?;
    Ok(d)
}

const GROUP_MENU: &[&[u64]] = &[&[], &[2], &[3], &[4], &[2, 2], &[6], &[2, 4]];

fn random_group<R: Rng>(rng: &mut R) -> FiniteAbelianGroup {
    FiniteAbelianGroup { factors: GROUP_MENU[rng.gen_range(0..GROUP_MENU.len())].to_vec() }
}

/// A random instance from the mirror construction. Both sides share F(1).
pub fn random_instance<R: Rng>(rng: &mut R) -> MainIdentityData {
    let a_g = random_group(rng);
    let a_dual = random_group(rng);
    let dim = Ratio::from_integer(rng.gen_range(1..=3));
    let mut weights = |n: usize| -> Vec<Ratio<i64>> {
        (0..n)
            .map(|i| if i == 0 { dim } else { Ratio::new(rng.gen_range(0..=18), 6) })
            .collect()
    };
    let f_g = weights(a_dual.order());
    let f_dual = weights(a_g.order());
    let joint: Vec<Vec<Value>> = (0..a_dual.order())
        .map(|_| {
            (0..a_g.order())
                .map(|_| {
                    if rng.gen_bool(0.5) {
                        Value::zero(None)
                    } else {
                        let c = Cyclo::integer(rng.gen_range(-3..=3));
                        scalar(c).mul(&q_pow(Ratio::new(rng.gen_range(-2..=4), 2)))
                    }
                })
                .collect()
        })
        .collect();
    mirror_data(a_g, a_dual, f_g, f_dual, &joint).expect("shapes match by construction")
}

/// Changes one entry and returns the (s, t) pairs that must then fail.
pub fn perturb<R: Rng>(d: &MainIdentityData, rng: &mut R) -> (MainIdentityData, Vec<(usize, usize)>) {
    let mut out = d.clone();
    let mut delta = 0;
    while delta == 0 {
        delta = rng.gen_range(-3..=3);
    }
    let bump = scalar(Cyclo::integer(delta)).mul(&q_pow(Ratio::new(rng.gen_range(-2..=2), 2)));
    let (ng, nd) = (d.a_g.order(), d.a_dual.order());
    if rng.gen_bool(0.5) {
        let (t, k) = (rng.gen_range(0..ng), rng.gen_range(0..nd));
        out.n_g[t][k] = out.n_g[t][k].add(&bump);
        (out, (0..nd).map(|s| (s, t)).collect())
    } else {
        let (s, v) = (rng.gen_range(0..nd), rng.gen_range(0..ng));
        out.n_dual[s][v] = out.n_dual[s][v].add(&bump);
        (out, (0..ng).map(|t| (s, t)).collect())
    }
}

/// Isotypic counts of Y from those of a union of components Y■ whose
/// cohomology induces up from Γ■ ⊂ Γ: #^κ Y = #^{κ|Γ■} Y■. The inclusion is
/// given by the images of the standard generators of Γ■. Requires
/// dim H(Y) = [Γ : Γ■] dim H(Y■).
pub fn induced_count_transfer(
    sub: &FiniteAbelianGroup,
    full: &FiniteAbelianGroup,
    inclusion: &[Vec<u64>],
    sub_counts: &[Value],
    dims: (u64, u64),
) -> Result<Vec<Value>, FourierError> {
    if inclusion.len() != sub.factors.len() || sub_counts.len() != sub.order() {
        return Err(FourierError::Shape);
    }
    for (img, &d) in inclusion.iter().zip(&sub.factors) {
        if img.len() != full.factors.len() || img.iter().zip(&full.factors).any(|(&a, &m)| (a * d) % m != 0) {
            return Err(FourierError::NotInjective);
        }
    }
    let image = |x: &[u64]| -> Vec<u64> {
        let mut acc = vec![0; full.factors.len()];
        for (img, &c) in inclusion.iter().zip(x) {
            for _ in 0..c {
                acc = full.add(&acc, img);
            }
        }
        acc
    };
    let mut seen = std::collections::HashSet::new();
    if !sub.elements().all(|x| seen.insert(image(&x))) {
        return Err(FourierError::NotInjective);
    }
    let index = (full.order() / sub.order()) as u64;
    if dims.1 != index * dims.0 {
        return Err(FourierError::DimensionRatio { sub: dims.0, full: dims.1, index });
    }
    let gens: Vec<Vec<u64>> = (0..sub.factors.len())
        .map(|i| {
            let mut e = vec![0; sub.factors.len()];
            e[i] = 1;
            image(&e)
        })
        .collect();
    Ok(characters(full)
        .iter()
        .map(|kappa| {
            let b: Vec<u64> = gens
                .iter()
                .zip(&sub.factors)
                .map(|(g, &d)| (kappa.phase(g) * d as i64).to_integer() as u64)
                .collect();
            sub_counts[sub.index(&b)].clone()
        })
        .collect())
}

/// Parses values in the rendered form, e.g. `3 - 1/2*q^{-1/2} + (ζ4 + 1)*q^{1}`.
pub fn parse_value(text: &str) -> Result<Value, FourierError> {
    let err = || FourierError::Parse(text.to_string());
    let mut out = Value::zero(None);
    for (neg, term) in split_terms(text.trim()).ok_or_else(err)? {
        let (coef, mono) = match term.strip_prefix('(') {
            Some(rest) => {
                let close = rest.find(')').ok_or_else(err)?;
                let c = parse_cyclo(&rest[..close])?;
                let tail = rest[close + 1..].trim();
                let mono = if tail.is_empty() { None } else { Some(tail.strip_prefix('*').ok_or_else(err)?) };
                (c, mono)
            }
            None => match term.split_once('*') {
                Some((c, m)) => (Cyclo::rational(parse_rational(c)?), Some(m)),
                None if term.starts_with('q') => (Cyclo::one(), Some(term)),
                None => (Cyclo::rational(parse_rational(term)?), None),
            },
        };
        let e = match mono {
            None => Ratio::from_integer(0),
            Some(m) => {
                let inner = m.trim().strip_prefix("q^{").and_then(|x| x.strip_suffix('}')).ok_or_else(err)?;
                -inner.trim().parse::<Ratio<i64>>().map_err(|_| err())?
            }
        };
        let c = if neg { coef.neg() } else { coef };
        out = out.add(&Value::term(None, c, e));
    }
    Ok(out)
}

fn split_terms(text: &str) -> Option<Vec<(bool, &str)>> {
    let mut out = Vec::new();
    let (mut neg, mut rest) = match text.strip_prefix('-') {
        Some(r) => (true, r),
        None => (false, text),
    };
    if text == "0" {
        return Some(out);
    }
    loop {
        let mut depth = 0i32;
        let mut cut = None;
        let bytes = rest.as_bytes();
        for (i, ch) in rest.char_indices() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                ' ' if depth == 0 && i + 2 < rest.len() && (bytes[i + 1] == b'+' || bytes[i + 1] == b'-') && bytes[i + 2] == b' ' => {
                    cut = Some(i);
                    break;
                }
                _ => {}
            }
        }
        match cut {
            Some(i) => {
                out.push((neg, rest[..i].trim()));
                neg = rest.as_bytes()[i + 1] == b'-';
                rest = &rest[i + 3..];
            }
            None => {
                out.push((neg, rest.trim()));
                return (!out.iter().any(|(_, t)| t.is_empty())).then_some(out);
            }
        }
    }
}

pub(crate) fn parse_cyclo(text: &str) -> Result<Cyclo, FourierError> {
    let err = || FourierError::Parse(text.to_string());
    let mut acc = Cyclo::integer(0);
    for (neg, term) in split_terms(text.trim()).ok_or_else(err)? {
        let (c, root) = match term.split_once('*') {
            Some((c, r)) => (parse_rational(c)?, Some(r)),
            None if term.starts_with('ζ') => (BigRational::from_integer(1.into()), Some(term)),
            None => (parse_rational(term)?, None),
        };
        let z = match root {
            None => Cyclo::one(),
            Some(r) => {
                let body = r.strip_prefix('ζ').ok_or_else(err)?;
                let (m, k) = match body.split_once('^') {
                    Some((m, k)) => (m, k),
                    None => (body, "1"),
                };
                let m: u64 = m.parse().map_err(|_| err())?;
                let k: i64 = k.parse().map_err(|_| err())?;
                if m == 0 {
                    return Err(err());
                }
                Cyclo::root(m, k)
            }
        };
        let term = z.mul(&Cyclo::rational(c));
        acc = acc.add(&if neg { term.neg() } else { term });
    }
    Ok(acc)
}

fn table_json(rows: &FiniteAbelianGroup, cols: &FiniteAbelianGroup, t: &[Vec<Value>]) -> serde_json::Value {
    let mut out = BTreeMap::new();
    for (i, row) in t.iter().enumerate() {
        let entries: BTreeMap<String, String> = row
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(j, v)| (cols.label(&cols.element(j)), v.to_string()))
            .collect();
        out.insert(rows.label(&rows.element(i)), entries);
    }
    serde_json::json!(out)
}

fn weights_json(g: &FiniteAbelianGroup, f: &[Ratio<i64>]) -> serde_json::Value {
    let m: BTreeMap<String, String> = f.iter().enumerate().map(|(i, x)| (g.label(&g.element(i)), x.to_string())).collect();
    serde_json::json!(m)
}

impl MainIdentityData {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "a_g": self.a_g.factors,
            "a_dual": self.a_dual.factors,
            "f_g": weights_json(&self.a_dual, &self.f_g),
            "f_dual": weights_json(&self.a_g, &self.f_dual),
            "n_g": table_json(&self.a_g, &self.a_dual, &self.n_g),
            "n_dual": table_json(&self.a_dual, &self.a_g, &self.n_dual),
        })
    }

    pub fn from_json(text: &str) -> Result<Self, FourierError> {
        let v: serde_json::Value = serde_json::from_str(text).map_err(|e| FourierError::Parse(e.to_string()))?;
        let group = |key: &str| -> Result<FiniteAbelianGroup, FourierError> {
            let f: Vec<u64> = serde_json::from_value(v[key].clone()).map_err(|e| FourierError::Parse(e.to_string()))?;
            FiniteAbelianGroup::new(f)
        };
        let a_g = group("a_g")?;
        let a_dual = group("a_dual")?;
        let weights = |key: &str, g: &FiniteAbelianGroup| -> Result<Vec<Ratio<i64>>, FourierError> {
            let mut out = vec![Ratio::from_integer(0); g.order()];
            if let Some(obj) = v[key].as_object() {
                for (k, x) in obj {
                    let s = x.as_str().ok_or_else(|| FourierError::Parse(key.to_string()))?;
                    out[g.index(&g.parse_label(k)?)] = s.parse().map_err(|_| FourierError::Parse(s.to_string()))?;
                }
            }
            Ok(out)
        };
        let table = |key: &str, rows: &FiniteAbelianGroup, cols: &FiniteAbelianGroup| -> Result<Vec<Vec<Value>>, FourierError> {
            let mut out = vec![vec![Value::zero(None); cols.order()]; rows.order()];
            if let Some(obj) = v[key].as_object() {
                for (rk, row) in obj {
                    let i = rows.index(&rows.parse_label(rk)?);
                    for (ck, x) in row.as_object().ok_or_else(|| FourierError::Parse(rk.clone()))? {
                        let j = cols.index(&cols.parse_label(ck)?);
                        out[i][j] = parse_value(x.as_str().ok_or_else(|| FourierError::Parse(ck.clone()))?)?;
                    }
                }
            }
            Ok(out)
        };
        let d = MainIdentityData {
            f_g: weights("f_g", &a_dual)?,
            f_dual: weights("f_dual", &a_g)?,
            n_g: table("n_g", &a_g, &a_dual)?,
            n_dual: table("n_dual", &a_dual, &a_g)?,
            a_g,
            a_dual,
        };
        d.validate()?;
        Ok(d)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn g(f: &[u64]) -> FiniteAbelianGroup {
        FiniteAbelianGroup::new(f.to_vec()).unwrap()
    }

    fn int(n: i64) -> Value {
        scalar(Cyclo::integer(n))
    }

    #[test]
    fn trivial_groups_are_one_equation() {
        let d = MainIdentityData {
            a_g: g(&[]),
            a_dual: g(&[]),
            f_g: vec![Ratio::from_integer(1)],
            f_dual: vec![Ratio::from_integer(1)],
            n_g: vec![vec![int(5)]],
            n_dual: vec![vec![int(5)]],
        };
        assert_eq!(verify_main_identity(&d), IdentityReport { pairs: 1, failing: vec![] });
        let mut bad = d.clone();
        bad.n_dual[0][0] = int(4);
        assert_eq!(verify_main_identity(&bad).failing, vec![(0, 0)]);
    }

    #[test]
    fn one_kappa_transfer_factor() {
        // a single nontrivial block: J supported at (κ, ν) = (trivial, λ)
        let (a, b) = (g(&[2]), g(&[2]));
        let f_g = vec![Ratio::from_integer(2), Ratio::new(3, 2)];
        let f_dual = vec![Ratio::from_integer(2), Ratio::new(1, 2)];
        let joint = vec![vec![int(0), int(3)], vec![int(0), int(0)]];
        let d = mirror_data(a, b, f_g, f_dual, &joint).unwrap();
        assert!(verify_main_identity(&d).passes());
        let stable = derive_stable_equality(&d);
        assert!(stable.equal && stable.collapse_ok);
        assert!(stable.lhs.is_zero());
        let k = derive_kappa_identity(&d, 1).unwrap();
        assert!(k.equal && k.collapse_ok);
        assert_eq!(k.transfer_factor, q_pow(Ratio::new(-3, 2)));
        assert_eq!(k.stable_block, int(3).mul(&q_pow(Ratio::new(-1, 2))));
        assert_eq!(k.isotypic, int(3).mul(&q_pow(Ratio::from_integer(-2))));
    }

    #[test]
    fn random_mirrors_and_perturbations() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let d = random_instance(&mut rng);
            assert!(verify_main_identity(&d).passes());
            assert!(derive_stable_equality(&d).equal);
            for lam in 0..d.a_g.order() {
                let k = derive_kappa_identity(&d, lam).unwrap();
                assert!(k.equal && k.collapse_ok);
            }
            let (bad, predicted) = perturb(&d, &mut rng);
            assert_eq!(verify_main_identity(&bad).failing, {
                let mut p = predicted;
                p.sort();
                p
            });
        }
    }

    #[test]
    fn induction_from_z2_to_z4() {
        let sub_counts = vec![int(3), int(5)];
        let full = induced_count_transfer(&g(&[2]), &g(&[4]), &[vec![2]], &sub_counts, (1, 2)).unwrap();
        assert_eq!(full, vec![int(3), int(5), int(3), int(5)]);
        assert!(matches!(
            induced_count_transfer(&g(&[2]), &g(&[4]), &[vec![2]], &sub_counts, (2, 2)),
            Err(FourierError::DimensionRatio { .. })
        ));
        assert!(induced_count_transfer(&g(&[2]), &g(&[4]), &[vec![1]], &sub_counts, (1, 2)).is_err());
        let same = induced_count_transfer(&g(&[3]), &g(&[3]), &[vec![1]], &[int(1), int(0), int(2)], (4, 4)).unwrap();
        assert_eq!(same, vec![int(1), int(0), int(2)]);
    }

    #[test]
    fn values_round_trip_through_text() {
        let v = int(3)
            .sub(&q_pow(Ratio::new(1, 2)).scale(&Cyclo::rational(BigRational::new(1.into(), 2.into()))))
            .add(&scalar(Cyclo::root(4, 1).add(&Cyclo::integer(1))).mul(&q_pow(Ratio::from_integer(-1))));
        assert_eq!(parse_value(&v.to_string()).unwrap(), v);
        assert_eq!(parse_value("0").unwrap(), Value::zero(None));
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let d = random_instance(&mut rng);
        assert_eq!(MainIdentityData::from_json(&d.to_json().to_string()).unwrap(), d);
    }
}
