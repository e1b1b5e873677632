//! Γ-torsors over F = F_q((t)) through the tame presentation ⟨β, γ | βγβ⁻¹ = γ^q⟩.
//!
//! A cocycle is a pair (x_β, x_γ) with x_β φ(x_γ) x_β⁻¹ = x_γ^q, and
//! (x_β, x_γ) ~ (y⁻¹ x_β φ(y), y⁻¹ x_γ y). Group elements are indices into a
//! multiplication table, with the identity at index 0.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::arith::{linalg, linalg::Mat, FieldDescriptor};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TorsorError {
    #[error("group order {order} is divisible by the characteristic {p}")]
    WildOrder { order: usize, p: u64 },
    #[error("multiplication table is not a group with identity at index 0")]
    BadTable,
    #[error("the Frobenius action is not a group automorphism")]
    BadFrobenius,
    #[error("({0}, {1}) is not a cocycle")]
    NotCocycle(usize, usize),
    #[error("cocycle is not strongly ramified")]
    NotStronglyRamified,
    #[error("matrix generators do not generate a finite group within {0} elements")]
    TooLarge(usize),
    #[error("generator is not invertible")]
    Singular,
}

/// A finite group with an automorphism φ (Frobenius on Γ(F^un)).
#[derive(Clone, Debug)]
pub struct GroupWithFrobenius {
    mul: Vec<Vec<usize>>,
    inv: Vec<usize>,
    phi: Vec<usize>,
}

impl GroupWithFrobenius {
    pub fn from_table(mul: Vec<Vec<usize>>, phi: Vec<usize>) -> Result<Self, TorsorError> {
        let n = mul.len();
        if n == 0 || mul.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(TorsorError::BadTable);
        }
        if (0..n).any(|a| mul[0][a] != a || mul[a][0] != a) {
            return Err(TorsorError::BadTable);
        }
        let mut inv = vec![usize::MAX; n];
        for a in 0..n {
            inv[a] = (0..n).find(|&b| mul[a][b] == 0).ok_or(TorsorError::BadTable)?;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                        return Err(TorsorError::BadTable);
                    }
                }
            }
        }
        let g = GroupWithFrobenius { mul, inv, phi };
        g.check_phi()?;
        Ok(g)
    }

    fn check_phi(&self) -> Result<(), TorsorError> {
        let n = self.order();
        if self.phi.len() != n {
            return Err(TorsorError::BadFrobenius);
        }
        let mut seen = vec![false; n];
        for &x in &self.phi {
            if x >= n || std::mem::replace(&mut seen[x], true) {
                return Err(TorsorError::BadFrobenius);
            }
        }
        for a in 0..n {
            for b in 0..n {
                if self.phi[self.mul(a, b)] != self.mul(self.phi[a], self.phi[b]) {
                    return Err(TorsorError::BadFrobenius);
                }
            }
        }
        Ok(())
    }

    /// Z/n with trivial Frobenius; element k is g^k.
    pub fn cyclic(n: usize) -> Self {
        let mul = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        let inv = (0..n).map(|a| (n - a) % n).collect();
        GroupWithFrobenius { mul, inv, phi: (0..n).collect() }
    }

    /// The same group with φ replaced by h ↦ p φ(h) p⁻¹ (an inner form).
    pub fn twisted_by(&self, p: usize) -> Self {
        let phi = (0..self.order())
            .map(|h| self.mul(self.mul(p, self.phi[h]), self.inv[p]))
            .collect();
        GroupWithFrobenius { mul: self.mul.clone(), inv: self.inv.clone(), phi }
    }

    pub fn order(&self) -> usize {
        self.mul.len()
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inv[a]
    }

    pub fn phi(&self, a: usize) -> usize {
        self.phi[a]
    }

    pub fn pow(&self, a: usize, k: u64) -> usize {
        let mut acc = 0;
        let mut base = a;
        let mut e = k % self.elem_order(a) as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn elem_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn exponent(&self) -> u64 {
        (0..self.order()).fold(1, |e, a| crate::arith::lcm(e, self.elem_order(a) as u64))
    }

    pub fn is_abelian(&self) -> bool {
        let n = self.order();
        (0..n).all(|a| (0..n).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    /// Elements fixed by φ, i.e. Γ(F).
    pub fn rational_points(&self) -> Vec<usize> {
        (0..self.order()).filter(|&a| self.phi[a] == a).collect()
    }

    pub fn is_cocycle(&self, c: Cocycle, q: u64) -> bool {
        let lhs = self.mul(self.mul(c.x_beta, self.phi[c.x_gamma]), self.inv[c.x_beta]);
        lhs == self.pow(c.x_gamma, q)
    }

    /// y · (x_β, x_γ) = (y⁻¹ x_β φ(y), y⁻¹ x_γ y).
    pub fn act(&self, y: usize, c: Cocycle) -> Cocycle {
        let yi = self.inv[y];
        Cocycle {
            x_beta: self.mul(self.mul(yi, c.x_beta), self.phi[y]),
            x_gamma: self.mul(self.mul(yi, c.x_gamma), y),
        }
    }

    /// The orbit of `c`, sorted.
    pub fn orbit(&self, c: Cocycle) -> Vec<Cocycle> {
        let mut o: Vec<Cocycle> = (0..self.order()).map(|y| self.act(y, c)).collect();
        o.sort();
        o.dedup();
        o
    }
}

/// A matrix group with elements listed identity first, then in entry order.
#[derive(Clone, Debug)]
pub struct MatrixGroup {
    pub elements: Vec<Mat>,
    pub group: GroupWithFrobenius,
}

impl MatrixGroup {
    /// Closure of `gens` over the field `f`; φ is entrywise x ↦ x^q.
    pub fn generate(f: &FieldDescriptor, gens: &[Mat], q: u64, limit: usize) -> Result<Self, TorsorError> {
        let n = gens.first().map_or(0, |g| g.len());
        for g in gens {
            if linalg::inverse(f, g).is_none() {
                return Err(TorsorError::Singular);
            }
        }
        let id = linalg::identity(n);
        let mut found = vec![id.clone()];
        let mut frontier = vec![id.clone()];
        let mut seen: std::collections::HashSet<Mat> = found.iter().cloned().collect();
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = linalg::mul(f, &x, g);
                if seen.insert(y.clone()) {
                    if seen.len() > limit {
                        return Err(TorsorError::TooLarge(limit));
                    }
                    found.push(y.clone());
                    frontier.push(y);
                }
            }
        }
        found.sort_by(|a, b| (a != &id).cmp(&(b != &id)).then_with(|| a.cmp(b)));
        let index: std::collections::HashMap<&Mat, usize> =
            found.iter().enumerate().map(|(i, m)| (m, i)).collect();
        let mul = found
            .iter()
            .map(|a| found.iter().map(|b| index[&linalg::mul(f, a, b)]).collect())
            .collect::<Vec<Vec<usize>>>();
        let phi = found
            .iter()
            .map(|a| index.get(&linalg::frob(f, a, q)).copied().ok_or(TorsorError::BadFrobenius))
            .collect::<Result<Vec<usize>, _>>()?;
        let nn = found.len();
        let mut inv = vec![0; nn];
        for a in 0..nn {
            inv[a] = (0..nn).find(|&b| mul[a][b] == 0).unwrap();
        }
        let group = GroupWithFrobenius { mul, inv, phi };
        group.check_phi()?;
        Ok(MatrixGroup { elements: found, group })
    }

    pub fn index_of(&self, m: &Mat) -> Option<usize> {
        self.elements.iter().position(|x| x == m)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Cocycle {
    pub x_beta: usize,
    pub x_gamma: usize,
}

impl Cocycle {
    pub fn new(x_beta: usize, x_gamma: usize) -> Self {
        Cocycle { x_beta, x_gamma }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TorsorTag {
    /// Both unramified and strongly ramified: the trivial torsor.
    Trivial,
    Unramified,
    StronglyRamified,
    General,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TorsorClass {
    pub representative: Cocycle,
    pub size: usize,
    pub tag: TorsorTag,
}

/// (residue degree f, ramification index e, multiplicity).
pub type EtaleAlgebraShape = Vec<(usize, usize, usize)>;

fn check_order(g: &GroupWithFrobenius, q: u64) -> Result<(), TorsorError> {
    let p = crate::arith::prime_power(q).map_or(q, |(p, _)| p);
    if g.order() as u64 % p == 0 {
        return Err(TorsorError::WildOrder { order: g.order(), p });
    }
    Ok(())
}

/// All classes in H¹(F, Γ), each with its minimal representative, in
/// representative order.
pub fn enumerate_h1(g: &GroupWithFrobenius, q: u64) -> Result<Vec<TorsorClass>, TorsorError> {
    check_order(g, q)?;
    let n = g.order();
    let mut seen = vec![false; n * n];
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            let c = Cocycle::new(a, b);
            if seen[a * n + b] || !g.is_cocycle(c, q) {
                continue;
            }
            let orbit = g.orbit(c);
            for o in &orbit {
                seen[o.x_beta * n + o.x_gamma] = true;
            }
            out.push(TorsorClass { representative: c, size: orbit.len(), tag: classify(g, c) });
        }
    }
    Ok(out)
}

/// Unramified iff equivalent to (x, 1); strongly ramified iff equivalent to (1, x).
pub fn classify(g: &GroupWithFrobenius, c: Cocycle) -> TorsorTag {
    let orbit = g.orbit(c);
    let unram = orbit.iter().any(|o| o.x_gamma == 0);
    let strong = orbit.iter().any(|o| o.x_beta == 0);
    match (unram, strong) {
        (true, true) => TorsorTag::Trivial,
        (true, false) => TorsorTag::Unramified,
        (false, true) => TorsorTag::StronglyRamified,
        (false, false) => TorsorTag::General,
    }
}

/// Orbits of β·y = x_β φ(y), γ·y = x_γ y on Γ. Each orbit is a field of degree
/// e·f, where e is the common length of its γ-cycles.
pub fn orbit_decomposition(g: &GroupWithFrobenius, c: Cocycle) -> EtaleAlgebraShape {
    let n = g.order();
    let beta = |y: usize| g.mul(c.x_beta, g.phi(y));
    let gamma = |y: usize| g.mul(c.x_gamma, y);
    let mut comp = vec![usize::MAX; n];
    let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for start in 0..n {
        if comp[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        comp[start] = start;
        let mut size = 0;
        while let Some(y) = stack.pop() {
            size += 1;
            for z in [beta(y), gamma(y)] {
                if comp[z] == usize::MAX {
                    comp[z] = start;
                    stack.push(z);
                }
            }
        }
        let mut e = 1;
        let mut y = gamma(start);
        while y != start {
            y = gamma(y);
            e += 1;
        }
        *counts.entry((size / e, e)).or_insert(0) += 1;
    }
    counts.into_iter().map(|((f, e), m)| (f, e, m)).collect()
}

/// Twisting data for a cocycle: the unramified torsor P = (x_β⁻¹, 1), the inner
/// form Γ_P (φ replaced by x_β φ(·) x_β⁻¹) and the image (1, x_γ) of the class there.
#[derive(Clone, Debug)]
pub struct Twist {
    pub p_cocycle: Cocycle,
    pub inner_form: GroupWithFrobenius,
    pub twisted: Cocycle,
    pub twisted_tag: TorsorTag,
}

/// Moves a class to the inner form where it becomes strongly ramified.
pub fn twist_to_strongly_ramified(g: &GroupWithFrobenius, c: Cocycle, q: u64) -> Result<Twist, TorsorError> {
    if !g.is_cocycle(c, q) {
        return Err(TorsorError::NotCocycle(c.x_beta, c.x_gamma));
    }
    let inner = g.twisted_by(c.x_beta);
    let twisted = twist_cocycle(g, c, c.x_beta);
    debug_assert!(inner.is_cocycle(twisted, q));
    let twisted_tag = classify(&inner, twisted);
    Ok(Twist {
        p_cocycle: Cocycle::new(g.inv(c.x_beta), 0),
        inner_form: inner,
        twisted,
        twisted_tag,
    })
}

/// The image of a class of Γ in the inner form twisted by `p`: (x_β p⁻¹, x_γ).
pub fn twist_cocycle(g: &GroupWithFrobenius, c: Cocycle, p: usize) -> Cocycle {
    Cocycle::new(g.mul(c.x_beta, g.inv(p)), c.x_gamma)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InertiaSubgroup {
    /// Sorted elements of I_Q.
    pub members: Vec<usize>,
    pub n: usize,
    /// The element matched with the chosen primitive N-th root of unity.
    pub generator: usize,
}

/// For a strongly ramified class, the stabilizer of the component through the
/// identity in the normalized form (1, x_γ); it is cyclic, generated by x_γ.
pub fn inertia_subgroup(g: &GroupWithFrobenius, c: Cocycle, q: u64) -> Result<InertiaSubgroup, TorsorError> {
    if !g.is_cocycle(c, q) {
        return Err(TorsorError::NotCocycle(c.x_beta, c.x_gamma));
    }
    let normal = g
        .orbit(c)
        .into_iter()
        .filter(|o| o.x_beta == 0)
        .min()
        .ok_or(TorsorError::NotStronglyRamified)?;
    let n = g.order();
    // component of the identity under β, γ
    let mut comp = vec![false; n];
    comp[0] = true;
    let mut stack = vec![0];
    while let Some(y) = stack.pop() {
        for z in [g.mul(normal.x_beta, g.phi(y)), g.mul(normal.x_gamma, y)] {
            if !comp[z] {
                comp[z] = true;
                stack.push(z);
            }
        }
    }
    let members: Vec<usize> = (0..n)
        .filter(|&h| (0..n).filter(|&y| comp[y]).all(|y| comp[g.mul(y, h)]))
        .collect();
    Ok(InertiaSubgroup { n: members.len(), members, generator: normal.x_gamma })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{make_field, roots_of_unity};

    #[test]
    fn h1_counts_for_cyclic_groups() {
        for q in [3u64, 5, 7, 11] {
            assert_eq!(enumerate_h1(&GroupWithFrobenius::cyclic(2), q).unwrap().len(), 4);
        }
        assert_eq!(enumerate_h1(&GroupWithFrobenius::cyclic(1), 5).unwrap().len(), 1);
        for q in [7u64, 13] {
            assert_eq!(enumerate_h1(&GroupWithFrobenius::cyclic(3), q).unwrap().len(), 9);
        }
        // q ≡ 2 mod 3: only unramified classes survive
        assert_eq!(enumerate_h1(&GroupWithFrobenius::cyclic(3), 5).unwrap().len(), 3);
        assert!(enumerate_h1(&GroupWithFrobenius::cyclic(5), 5).is_err());
    }

    #[test]
    fn tags() {
        let g = GroupWithFrobenius::cyclic(2);
        assert_eq!(classify(&g, Cocycle::new(1, 0)), TorsorTag::Unramified);
        assert_eq!(classify(&g, Cocycle::new(0, 1)), TorsorTag::StronglyRamified);
        assert_eq!(classify(&g, Cocycle::new(0, 0)), TorsorTag::Trivial);
        assert_eq!(classify(&g, Cocycle::new(1, 1)), TorsorTag::General);
    }

    #[test]
    fn quadratic_algebras() {
        let g = GroupWithFrobenius::cyclic(2);
        assert_eq!(orbit_decomposition(&g, Cocycle::new(0, 0)), vec![(1, 1, 2)]);
        assert_eq!(orbit_decomposition(&g, Cocycle::new(0, 1)), vec![(1, 2, 1)]);
        assert_eq!(orbit_decomposition(&g, Cocycle::new(1, 0)), vec![(2, 1, 1)]);
    }

    #[test]
    fn twisting() {
        let g = GroupWithFrobenius::cyclic(4);
        let t = twist_to_strongly_ramified(&g, Cocycle::new(2, 1), 5).unwrap();
        assert_eq!(t.twisted, Cocycle::new(0, 1));
        assert_eq!(t.p_cocycle, Cocycle::new(2, 0));
        assert_eq!(t.twisted_tag, TorsorTag::StronglyRamified);
        let back = twist_cocycle(&t.inner_form, t.twisted, g.inv(2));
        assert_eq!(back, Cocycle::new(2, 1));
    }

    #[test]
    fn inertia_of_strongly_ramified() {
        let z2 = GroupWithFrobenius::cyclic(2);
        let i = inertia_subgroup(&z2, Cocycle::new(0, 1), 5).unwrap();
        assert_eq!((i.n, i.members.clone()), (2, vec![0, 1]));
        assert_eq!(inertia_subgroup(&z2, Cocycle::new(0, 0), 5).unwrap().n, 1);
        let z6 = GroupWithFrobenius::cyclic(6);
        let i = inertia_subgroup(&z6, Cocycle::new(0, 2), 7).unwrap();
        assert_eq!(i.members, vec![0, 2, 4]);
        assert!(inertia_subgroup(&z2, Cocycle::new(1, 0), 5).is_err());
    }

    #[test]
    fn nonconstant_matrix_group() {
        // μ_3 ⊂ F_25^× acting by scalars: Frobenius x ↦ x^5 inverts it
        let f = make_field(5, 2).unwrap();
        let xi = roots_of_unity(&f, 3).unwrap()[0];
        let mg = MatrixGroup::generate(&f, &[vec![vec![xi]]], 5, 100).unwrap();
        assert_eq!(mg.elements.len(), 3);
        let g = &mg.group;
        assert_eq!(g.rational_points(), vec![0]);
        // x_γ^{q-1} condition becomes φ(x_γ) = x_γ^5 up to conjugation, which always holds
        let classes = enumerate_h1(g, 5).unwrap();
        let pairs = (0..3).flat_map(|a| (0..3).map(move |b| Cocycle::new(a, b))).filter(|&c| g.is_cocycle(c, 5)).count();
        assert_eq!(classes.iter().map(|c| c.size).sum::<usize>(), pairs);
    }
}
