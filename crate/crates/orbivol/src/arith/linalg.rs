//! Small dense matrices over a finite field.

use super::{FieldDescriptor, Fq};

pub type Mat = Vec<Vec<Fq>>;

pub fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| (0..n).map(|j| Fq((i == j) as u32)).collect())
        .collect()
}

pub fn diag(d: &[Fq]) -> Mat {
    let n = d.len();
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { d[i] } else { Fq(0) }).collect())
        .collect()
}

pub fn mul(f: &FieldDescriptor, a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let m = b.first().map_or(0, |r| r.len());
    let k = b.len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| {
                    (0..k).fold(Fq(0), |acc, l| f.add(acc, f.mul(a[i][l], b[l][j])))
                })
                .collect()
        })
        .collect()
}

pub fn apply(f: &FieldDescriptor, a: &Mat, v: &[Fq]) -> Vec<Fq> {
    a.iter()
        .map(|row| {
            row.iter()
                .zip(v)
                .fold(Fq(0), |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
        })
        .collect()
}

pub fn sub(f: &FieldDescriptor, a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(&x, &y)| f.sub(x, y)).collect())
        .collect()
}

pub fn scale(f: &FieldDescriptor, c: Fq, a: &Mat) -> Mat {
    a.iter()
        .map(|r| r.iter().map(|&x| f.mul(c, x)).collect())
        .collect()
}

/// Entrywise x ↦ x^q.
pub fn frob(f: &FieldDescriptor, a: &Mat, q: u64) -> Mat {
    a.iter()
        .map(|r| r.iter().map(|&x| f.pow(x, q)).collect())
        .collect()
}

pub fn frob_vec(f: &FieldDescriptor, v: &[Fq], q: u64) -> Vec<Fq> {
    v.iter().map(|&x| f.pow(x, q)).collect()
}

pub fn pow(f: &FieldDescriptor, a: &Mat, mut e: u64) -> Mat {
    let mut result = identity(a.len());
    let mut b = a.clone();
    while e > 0 {
        if e & 1 == 1 {
            result = mul(f, &result, &b);
        }
        b = mul(f, &b, &b);
        e >>= 1;
    }
    result
}

/// Reduced row echelon form; returns the pivot columns.
fn rref(f: &FieldDescriptor, a: &mut Mat) -> Vec<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(pr) = (row..rows).find(|&i| a[i][col] != Fq(0)) else {
            continue;
        };
        a.swap(row, pr);
        let inv = f.inv(a[row][col]).unwrap();
        for x in a[row].iter_mut() {
            *x = f.mul(*x, inv);
        }
        for i in 0..rows {
            if i != row && a[i][col] != Fq(0) {
                let c = a[i][col];
                for j in 0..cols {
                    let v = f.mul(c, a[row][j]);
                    a[i][j] = f.sub(a[i][j], v);
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    pivots
}

pub fn rank(f: &FieldDescriptor, a: &Mat) -> usize {
    let mut m = a.clone();
    rref(f, &mut m).len()
}

/// Basis of the right kernel {v : A v = 0}, one vector per free column, each
/// normalized to have a 1 in its free column.
pub fn kernel(f: &FieldDescriptor, a: &Mat, cols: usize) -> Vec<Vec<Fq>> {
    let mut m = a.clone();
    let pivots = rref(f, &mut m);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&fc| {
            let mut v = vec![Fq(0); cols];
            v[fc] = Fq(1);
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(m[r][fc]);
            }
            v
        })
        .collect()
}

pub fn inverse(f: &FieldDescriptor, a: &Mat) -> Option<Mat> {
    let n = a.len();
    let mut aug: Mat = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| Fq((i == j) as u32)));
            row
        })
        .collect();
    let pivots = rref(f, &mut aug);
    if pivots.len() < n || (n > 0 && pivots[n - 1] != n - 1) {
        return None;
    }
    Some(aug.into_iter().map(|r| r[n..].to_vec()).collect())
}

pub fn is_zero(a: &Mat) -> bool {
    a.iter().all(|r| r.iter().all(|&x| x == Fq(0)))
}

/// All vectors w ∈ K^n with w^(q) = T w, where K is the field `f` and the
/// power is taken entrywise. The solution set is an F_q-vector space; it is
/// found by linear algebra over F_p and returned in increasing encoding order.
pub fn twisted_fixed_space(f: &FieldDescriptor, q: u64, t: &Mat) -> Vec<Vec<Fq>> {
    let basis = twisted_fixed_basis(f, q, t);
    span_over_fp(f, &basis)
}

/// An F_p-basis of {w : w^(q) = T w}.
pub fn twisted_fixed_basis(f: &FieldDescriptor, q: u64, t: &Mat) -> Vec<Vec<Fq>> {
    let n = t.len();
    let r = f.r() as usize;
    let p = f.p() as u32;
    let dim = n * r;
    // columns: image of the F_p-basis vector x^d in coordinate i
    let mut cols: Vec<Vec<u32>> = Vec::with_capacity(dim);
    for i in 0..n {
        for d in 0..r {
            let mut e = vec![Fq(0); n];
            let mut c = vec![0u32; r];
            c[d] = 1;
            e[i] = f.from_coords(&c);
            let lhs = frob_vec(f, &e, q);
            let rhs = apply(f, t, &e);
            let diff: Vec<u32> = lhs
                .iter()
                .zip(&rhs)
                .flat_map(|(&a, &b)| f.coords(f.sub(a, b)))
                .collect();
            cols.push(diff);
        }
    }
    // matrix over F_p with `dim` rows and `dim` columns
    let mut m: Vec<Vec<u32>> = (0..dim).map(|row| cols.iter().map(|c| c[row]).collect()).collect();
    let kernel = fp_kernel(&mut m, p);
    kernel
        .into_iter()
        .map(|v| {
            (0..n)
                .map(|i| f.from_coords(&v[i * r..(i + 1) * r]))
                .collect()
        })
        .collect()
}

/// All F_p-linear combinations of `basis`, sorted.
pub fn span_over_fp(f: &FieldDescriptor, basis: &[Vec<Fq>]) -> Vec<Vec<Fq>> {
    let n = basis.first().map_or(0, |v| v.len());
    let p = f.p();
    let mut out = vec![vec![Fq(0); n]];
    for b in basis {
        let mut next = Vec::with_capacity(out.len() * p as usize);
        for v in &out {
            for c in 0..p {
                let cf = Fq(c as u32);
                next.push(
                    v.iter()
                        .zip(b)
                        .map(|(&x, &y)| f.add(x, f.mul(cf, y)))
                        .collect(),
                );
            }
        }
        out = next;
    }
    out.sort();
    out
}

fn fp_kernel(m: &mut [Vec<u32>], p: u32) -> Vec<Vec<u32>> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let p64 = p as u64;
    let inv = |a: u32| -> u32 {
        let mut r = 1u64;
        let mut b = a as u64;
        let mut e = p64 - 2;
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p64;
            }
            b = b * b % p64;
            e >>= 1;
        }
        r as u32
    };
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..cols {
        let Some(pr) = (row..rows).find(|&i| m[i][col] != 0) else {
            continue;
        };
        m.swap(row, pr);
        let iv = inv(m[row][col]) as u64;
        for x in m[row].iter_mut() {
            *x = (*x as u64 * iv % p64) as u32;
        }
        for i in 0..rows {
            if i != row && m[i][col] != 0 {
                let c = m[i][col] as u64;
                for j in 0..cols {
                    let sub = (c * m[row][j] as u64 % p64) as u32;
                    m[i][j] = (m[i][j] + p - sub) % p;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == rows {
            break;
        }
    }
    (0..cols)
        .filter(|c| !pivots.contains(c))
        .map(|fc| {
            let mut v = vec![0u32; cols];
            v[fc] = 1;
            for (r, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - m[r][fc]) % p;
            }
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::make_field;

    #[test]
    fn inverse_roundtrip() {
        let f = make_field(5, 2).unwrap();
        let a = vec![vec![Fq(3), Fq(7)], vec![Fq(11), Fq(2)]];
        let ai = inverse(&f, &a).unwrap();
        assert_eq!(mul(&f, &a, &ai), identity(2));
        let sing = vec![vec![Fq(1), Fq(2)], vec![Fq(2), Fq(4)]];
        assert!(inverse(&f, &sing).is_none());
    }

    #[test]
    fn kernel_dimension() {
        let f = make_field(7, 1).unwrap();
        let a = vec![vec![Fq(1), Fq(2), Fq(3)], vec![Fq(2), Fq(4), Fq(6)]];
        let k = kernel(&f, &a, 3);
        assert_eq!(k.len(), 2);
        for v in &k {
            assert!(apply(&f, &a, v).iter().all(|&x| x == Fq(0)));
        }
    }

    #[test]
    fn twisted_fixed_space_has_q_to_the_n_points() {
        // y^5 = -y over F_25: brute force count is 5 (0 and the four 4th roots of -1)
        let f = make_field(5, 2).unwrap();
        let t = vec![vec![f.from_int(-1)]];
        let sols = twisted_fixed_space(&f, 5, &t);
        let brute: Vec<Vec<Fq>> = f
            .elements()
            .filter(|&y| f.pow(y, 5) == f.neg(y))
            .map(|y| vec![y])
            .collect();
        assert_eq!(sols, brute);
        assert_eq!(sols.len(), 5);
    }
}
