//! Over-rings of `A_m`: the inductive procedure, the closed-form lists and an
//! exhaustive oracle.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{AlgebraElement, CubicAlgebra};
use crate::error::{Error, Result};
use crate::families::{enumerate_closed, make_am, make_family, make_jm, FamilyDescriptor};
use crate::fp::{add_scaled, Subspace};
use crate::lattice::Lattice;
use crate::series::TruncatedSeries;

/// Every lattice `M` with `t^w A + D ⊆ M ⊆ A`, in no particular order.
///
/// Since `1 ∈ M` and `(1, b_1, b_2)` is a basis of `A`, such an `M` is `D`
/// plus a rank two lattice in `D b_1 + D b_2` containing `t^w`, which is
/// listed through its 2×2 echelon form.
pub fn unital_lattices(alg: &Arc<CubicAlgebra>, w: usize) -> Result<Vec<Lattice>> {
    let cfg = alg.config();
    let p = alg.p() as u64;
    let (u1, u2) = (alg.basis(1), alg.basis(2));
    let mut out = Vec::new();
    for d1 in 0..=w {
        let count = p.pow(d1 as u32);
        for d2 in 0..=w {
            for idx in 0..count {
                let mut digits = Vec::with_capacity(d1);
                let mut r = idx;
                for _ in 0..d1 {
                    digits.push((r % p) as i64);
                    r /= p;
                }
                // t^w b_2 must lie in the span: v(x) >= d1 + d2 - w
                let low = (d1 + d2).saturating_sub(w).min(d1);
                if digits[..low].iter().any(|&c| c != 0) {
                    continue;
                }
                let x = TruncatedSeries::from_coeffs(cfg, &digits);
                let gens = [alg.one(), u1.shift_up(d1), u1.scale(&x).add(&u2.shift_up(d2))];
                out.push(Lattice::from_generators(alg, &gens)?);
            }
        }
    }
    Ok(out)
}

/// All orders between `A_m` and `A`, found by exhaustive scan; sorted.
pub fn brute_force_overrings(alg: &Arc<CubicAlgebra>, m: usize) -> Result<Vec<Lattice>> {
    if alg.p() > 7 || m > 3 {
        return Err(Error::Envelope(format!(
            "exhaustive over-ring scan is limited to p <= 7 and m <= 3 (got p = {}, m = {m})",
            alg.p()
        )));
    }
    brute_force_unchecked(alg, m)
}

pub(crate) fn brute_force_unchecked(alg: &Arc<CubicAlgebra>, m: usize) -> Result<Vec<Lattice>> {
    let mut out: Vec<Lattice> = unital_lattices(alg, m)?.into_iter().filter(Lattice::is_order).collect();
    out.sort();
    out.dedup();
    Ok(out)
}

/// `B̄ = B/tB` with structure constants in the basis of classes of the
/// echelon columns of `B`, together with the image `Ā` of `A_m`.
#[derive(Clone, Debug)]
pub struct QuotientAlgebra {
    pub base: Lattice,
    pub m: usize,
    /// `table[i][j]` holds the coordinates of `b_i b_j`.
    pub table: [[[u32; 3]; 3]; 3],
    pub one: [u32; 3],
    pub a_bar: Subspace,
}

fn residue_coords(b: &Lattice, x: &AlgebraElement) -> Result<[u32; 3]> {
    let c = b.coordinates(x).ok_or_else(|| Error::NotContained("element outside the order".into()))?;
    Ok(std::array::from_fn(|i| c[i].constant_term()))
}

/// `table[i][j]` holds the coordinates of `b_i b_j`.
pub(crate) type ResidueTable = [[[u32; 3]; 3]; 3];

/// Structure constants of `B/tB` in the basis of column classes, and the
/// coordinates of `1`.
pub(crate) fn residue_table(b: &Lattice) -> Result<(ResidueTable, [u32; 3])> {
    let alg = b.algebra();
    let cols = b.cols();
    let mut table = [[[0; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            table[i][j] = residue_coords(b, &alg.mul(&cols[i], &cols[j]))?;
        }
    }
    Ok((table, residue_coords(b, &alg.one())?))
}

pub fn quotient_algebra(b: &Lattice, m: usize) -> Result<QuotientAlgebra> {
    let alg = b.algebra();
    if !b.is_order() {
        return Err(Error::Precondition("quotient needs an order".into()));
    }
    let am = make_am(alg, m)?;
    if !b.contains_lattice(&am) {
        return Err(Error::Precondition(format!("order does not contain A_{m}")));
    }
    let (table, one) = residue_table(b)?;
    let mut a_bar = Subspace::zero(alg.p(), 3);
    for g in am.cols() {
        a_bar.insert(residue_coords(b, g)?.to_vec());
    }
    Ok(QuotientAlgebra { base: b.clone(), m, table, one, a_bar })
}

impl QuotientAlgebra {
    pub fn p(&self) -> u32 {
        self.base.algebra().p()
    }

    pub fn mul(&self, x: &[u32], y: &[u32]) -> Vec<u32> {
        let p = self.p();
        let mut out = vec![0; 3];
        for i in 0..3 {
            for j in 0..3 {
                let c = (x[i] as u64 * y[j] as u64 % p as u64) as u32;
                if c != 0 {
                    add_scaled(p, &mut out, &self.table[i][j], c);
                }
            }
        }
        out
    }

    fn is_subalgebra(&self, s: &Subspace) -> bool {
        let b = s.basis();
        b.iter().all(|x| b.iter().all(|y| s.contains(&self.mul(x, y))))
    }

    /// Every proper subalgebra containing `1`.
    pub fn proper_unital_subalgebras(&self) -> Vec<Subspace> {
        let p = self.p();
        let unit = Subspace::span(p, 3, [self.one.to_vec()]);
        let mut out = vec![unit.clone()];
        // lines of B̄/⟨1⟩ through a fixed complement of ⟨1⟩
        let comp: Vec<Vec<u32>> = (0..3)
            .map(|i| (0..3).map(|j| u32::from(i == j)).collect())
            .filter(|e: &Vec<u32>| !unit.contains(e))
            .collect();
        let mut comp_space = unit.clone();
        let comp: Vec<Vec<u32>> = comp.into_iter().filter(|e| comp_space.insert(e.clone())).collect();
        let (u, v) = (&comp[0], &comp[1]);
        let mut dirs = vec![u.clone()];
        for c in 0..p {
            let mut w = v.clone();
            add_scaled(p, &mut w, u, c);
            dirs.push(w);
        }
        for d in dirs {
            let mut s = unit.clone();
            s.insert(d);
            if self.is_subalgebra(&s) {
                out.push(s);
            }
        }
        out
    }

    /// `ĀS = B̄`.
    pub fn generates_with_a(&self, s: &Subspace) -> bool {
        let mut prod = Subspace::zero(self.p(), 3);
        for x in self.a_bar.basis() {
            for y in s.basis() {
                prod.insert(self.mul(x, y));
            }
        }
        prod.dim() == 3
    }

    /// `S → B / B J_m` is onto.
    pub fn surjects_mod_bj(&self, s: &Subspace) -> Result<bool> {
        let b = &self.base;
        let alg = b.algebra();
        let bj = b.product(&make_jm(alg, self.m.max(1))?)?;
        let mut gens: Vec<AlgebraElement> = s.basis().iter().map(|v| self.lift(v)).collect();
        gens.extend(bj.cols().iter().cloned());
        Ok(Lattice::from_generators(alg, &gens)? == *b)
    }

    pub fn lift(&self, v: &[u32]) -> AlgebraElement {
        let cols = self.base.cols();
        let mut x = self.base.algebra().zero();
        for i in 0..3 {
            if v[i] != 0 {
                x = x.add(&cols[i].scale_int(v[i]));
            }
        }
        x
    }

    /// Preimage of `S` in `B`: the lifts of `S` plus `tB`.
    pub fn preimage(&self, s: &Subspace) -> Result<Lattice> {
        let mut gens: Vec<AlgebraElement> = s.basis().iter().map(|v| self.lift(v)).collect();
        gens.extend(self.base.cols().iter().map(|c| c.shift_up(1)));
        Lattice::from_generators(self.base.algebra(), &gens)
    }
}

/// A candidate subalgebra with the outcome of both selection tests.
#[derive(Clone, Debug)]
pub struct Candidate {
    pub space: Subspace,
    pub generates: bool,
    pub surjects: bool,
}

/// Both tests on every proper unital subalgebra of `B̄`.
pub fn candidate_conditions(q: &QuotientAlgebra) -> Result<Vec<Candidate>> {
    q.proper_unital_subalgebras()
        .into_iter()
        .map(|s| {
            let generates = q.generates_with_a(&s);
            let surjects = q.surjects_mod_bj(&s)?;
            Ok(Candidate { space: s, generates, surjects })
        })
        .collect()
}

/// Proper unital subalgebras `S` with `ĀS = B̄`. Fails loudly if the
/// equivalent surjectivity test disagrees on some subalgebra.
pub fn subalgebra_candidates(q: &QuotientAlgebra) -> Result<Vec<Subspace>> {
    let mut out = Vec::new();
    for c in candidate_conditions(q)? {
        if c.generates != c.surjects {
            return Err(Error::ClassificationFailure(format!(
                "the two subalgebra tests disagree on {:?}",
                c.space.basis()
            )));
        }
        if c.generates {
            out.push(c.space);
        }
    }
    Ok(out)
}

/// Over-rings of `A_{m+1}` that are not over-rings of `A_m` and whose
/// product with `A_m` is `B`.
pub fn procedure_step(b: &Lattice, m: usize) -> Result<Vec<Lattice>> {
    let alg = b.algebra();
    if m == 0 {
        return Err(Error::Precondition("the procedure starts at m = 1".into()));
    }
    if !b.contains_lattice(&make_am(alg, m)?) || b.contains_lattice(&make_am(alg, m - 1)?) {
        return Err(Error::Precondition(format!("order must contain A_{m} but not A_{}", m - 1)));
    }
    let q = quotient_algebra(b, m)?;
    let mut out = Vec::new();
    for s in subalgebra_candidates(&q)? {
        let c = q.preimage(&s)?;
        debug_assert!(c.is_order());
        out.push(c);
    }
    out.sort();
    Ok(out)
}

/// Over-rings of `A_1`, from a direct scan of the unital subalgebras of
/// `A/tA`.
pub fn base_overrings(alg: &Arc<CubicAlgebra>) -> Result<Vec<Lattice>> {
    brute_force_unchecked(alg, 1)
}

/// Over-rings of `A_m` computed by iterating the procedure from `m = 1`.
pub fn overrings_by_procedure(alg: &Arc<CubicAlgebra>, m: usize) -> Result<Vec<Lattice>> {
    if m == 0 {
        return Ok(vec![Lattice::full(alg)]);
    }
    let mut all = base_overrings(alg)?;
    let full = Lattice::full(alg);
    let mut fresh: Vec<Lattice> = all.iter().filter(|l| **l != full).cloned().collect();
    for level in 1..m {
        let mut next = Vec::new();
        for b in &fresh {
            next.extend(procedure_step(b, level)?);
        }
        next.sort();
        next.dedup();
        all.extend(next.iter().cloned());
        fresh = next;
    }
    all.sort();
    all.dedup();
    Ok(all)
}

/// Closed-form over-rings of `A_m` as descriptors.
pub fn enumerate_overrings_closed(alg: &CubicAlgebra, m: usize) -> Vec<FamilyDescriptor> {
    enumerate_closed(alg.p(), alg.case(), m as u32)
}

/// Lattices of the closed-form list, sorted.
pub fn closed_form_lattices(alg: &Arc<CubicAlgebra>, m: usize) -> Result<Vec<Lattice>> {
    let mut out = enumerate_overrings_closed(alg, m).iter().map(|d| make_family(alg, d)).collect::<Result<Vec<_>>>()?;
    out.sort();
    Ok(out)
}

/// Set comparison of two sorted lattice lists.
#[derive(Clone, Debug, Serialize)]
pub struct OverringDiff {
    pub closed: usize,
    pub oracle: usize,
    pub only_closed: Vec<Lattice>,
    pub only_oracle: Vec<Lattice>,
}

impl OverringDiff {
    pub fn new(closed: &[Lattice], oracle: &[Lattice]) -> Self {
        let cs: BTreeSet<&Lattice> = closed.iter().collect();
        let os: BTreeSet<&Lattice> = oracle.iter().collect();
        OverringDiff {
            closed: closed.len(),
            oracle: oracle.len(),
            only_closed: cs.difference(&os).map(|l| (*l).clone()).collect(),
            only_oracle: os.difference(&cs).map(|l| (*l).clone()).collect(),
        }
    }

    pub fn diff(&self) -> usize {
        self.only_closed.len() + self.only_oracle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diff() == 0
    }
}

impl fmt::Display for OverringDiff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "closed={} oracle={} diff={}", self.closed, self.oracle, self.diff())
    }
}
