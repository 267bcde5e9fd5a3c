//! Dense linear algebra over `F_p`, used on the finite quotients `A/t^cA`.

use crate::series::mod_inv;

/// A subspace of `F_p^n` kept in reduced row echelon form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subspace {
    p: u32,
    n: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn zero(p: u32, n: usize) -> Self {
        Subspace { p, n, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn full(p: u32, n: usize) -> Self {
        let mut s = Self::zero(p, n);
        for i in 0..n {
            let mut v = vec![0; n];
            v[i] = 1;
            s.insert(v);
        }
        s
    }

    pub fn span<I: IntoIterator<Item = Vec<u32>>>(p: u32, n: usize, vecs: I) -> Self {
        let mut s = Self::zero(p, n);
        for v in vecs {
            s.insert(v);
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn basis(&self) -> &[Vec<u32>] {
        &self.rows
    }

    /// Remainder of `v` after eliminating the pivot columns; linear in `v`
    /// and zero exactly on the subspace.
    pub fn reduce(&self, v: &[u32]) -> Vec<u32> {
        let p = self.p as u64;
        let mut v = v.to_vec();
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = v[pc] as u64;
            if c == 0 {
                continue;
            }
            for (x, &r) in v.iter_mut().zip(row) {
                *x = ((*x as u64 + (p - c) * r as u64) % p) as u32;
            }
        }
        v
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.reduce(v).iter().all(|&x| x == 0)
    }

    pub fn contains_space(&self, other: &Subspace) -> bool {
        other.rows.iter().all(|r| self.contains(r))
    }

    /// Adds `v`; returns whether the dimension grew.
    pub fn insert(&mut self, v: Vec<u32>) -> bool {
        debug_assert_eq!(v.len(), self.n);
        let p = self.p as u64;
        let mut v = self.reduce(&v);
        let Some(pc) = v.iter().position(|&x| x != 0) else {
            return false;
        };
        let inv = mod_inv(v[pc], self.p) as u64;
        for x in v.iter_mut() {
            *x = (*x as u64 * inv % p) as u32;
        }
        for row in self.rows.iter_mut() {
            let c = row[pc] as u64;
            if c != 0 {
                for (x, &y) in row.iter_mut().zip(&v) {
                    *x = ((*x as u64 + (p - c) * y as u64) % p) as u32;
                }
            }
        }
        let pos = self.pivots.partition_point(|&q| q < pc);
        self.rows.insert(pos, v);
        self.pivots.insert(pos, pc);
        true
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        let mut s = self.clone();
        for r in &other.rows {
            s.insert(r.clone());
        }
        s
    }
}

/// Basis of the kernel of the linear map sending the `k`-th standard basis
/// vector of `F_p^{images.len()}` to `images[k]`.
pub fn kernel(p: u32, images: &[Vec<u32>]) -> Vec<Vec<u32>> {
    let n_in = images.len();
    let m = images.first().map_or(0, Vec::len);
    // augmented vectors (image | tracking)
    let mut echelon = Subspace::zero(p, m + n_in);
    let mut ker = Vec::new();
    for (k, img) in images.iter().enumerate() {
        let mut v = img.clone();
        v.extend((0..n_in).map(|i| u32::from(i == k)));
        let r = echelon.reduce(&v);
        if r[..m].iter().all(|&x| x == 0) {
            ker.push(r[m..].to_vec());
        } else {
            echelon.insert(v);
        }
    }
    ker
}

pub fn add_scaled(p: u32, acc: &mut [u32], v: &[u32], c: u32) {
    let p64 = p as u64;
    for (x, &y) in acc.iter_mut().zip(v) {
        *x = ((*x as u64 + c as u64 * y as u64) % p64) as u32;
    }
}
