//! Full rank `D`-lattices inside `A`, stored in canonical column echelon form.
//!
//! Column `j` of the echelon matrix is zero below row `j`, carries the pivot
//! `t^{d_j}` in row `j`, and its entries above the pivot row `i < j` are
//! polynomials of degree `< d_i`. Over the local ring `D` this form is
//! unique, so lattice equality is coefficient equality.
//!
//! Truncation at `t^N` is tracked through a guard `g`: a lattice is only
//! accepted when `d_0 + d_1 + d_2 <= N - g`. Elimination errors introduced
//! by dividing by pivots live in degrees `>= N - sum(d)`, so under the guard
//! they never reach a pivot or a reduced entry.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, AlgebraSpec, CubicAlgebra};
use crate::error::{Error, Result};
use crate::fp::{kernel, Subspace};
use crate::series::{TruncatedSeries, Valuation};

pub const DEFAULT_GUARD: usize = 2;

#[derive(Clone)]
pub struct Lattice {
    alg: Arc<CubicAlgebra>,
    cols: [AlgebraElement; 3],
    pivots: [u32; 3],
    guard: usize,
}

/// Coordinates of `x mod t^c` in the `F_p`-basis `t^i b_j` (index `3i + j`).
pub(crate) fn window_vec(x: &AlgebraElement, c: usize) -> Vec<u32> {
    let mut v = vec![0; 3 * c];
    for i in 0..c {
        for j in 0..3 {
            v[3 * i + j] = x.coords[j].coeff(i);
        }
    }
    v
}

pub(crate) fn window_elem(alg: &CubicAlgebra, v: &[u32]) -> AlgebraElement {
    let c = v.len() / 3;
    let cfg = alg.config();
    let coords = std::array::from_fn(|j| {
        let coeffs: Vec<i64> = (0..c).map(|i| v[3 * i + j] as i64).collect();
        TruncatedSeries::from_coeffs(cfg, &coeffs)
    });
    AlgebraElement::new(coords)
}

impl Lattice {
    pub fn from_generators(alg: &Arc<CubicAlgebra>, gens: &[AlgebraElement]) -> Result<Self> {
        Self::from_generators_guarded(alg, gens, DEFAULT_GUARD)
    }

    /// Echelon form of the `D`-span of `gens`.
    pub fn from_generators_guarded(alg: &Arc<CubicAlgebra>, gens: &[AlgebraElement], guard: usize) -> Result<Self> {
        let n = alg.prec();
        let mut pool: Vec<AlgebraElement> = gens.iter().filter(|g| !g.is_zero()).cloned().collect();
        let mut cols: [Option<AlgebraElement>; 3] = [None, None, None];
        let mut pivots = [0u32; 3];
        for row in (0..3).rev() {
            let best =
                pool.iter().enumerate().filter_map(|(k, v)| v.coords[row].valuation().finite().map(|d| (d, k))).min();
            let Some((d, k)) = best else {
                continue;
            };
            let mut piv = pool.swap_remove(k);
            let unit = piv.coords[row].shift_down(d as usize);
            let unit_inv = unit.inv().expect("leading coefficient is nonzero");
            piv = piv.scale(&unit_inv);
            piv.coords[row] = TruncatedSeries::monomial(alg.config(), 1, d as usize);
            for v in pool.iter_mut() {
                if v.coords[row].is_zero() {
                    continue;
                }
                let q = v.coords[row].shift_down(d as usize);
                *v = v.sub(&piv.scale(&q));
                v.coords[row] = TruncatedSeries::zero(alg.config());
            }
            pool.retain(|v| !v.is_zero());
            pivots[row] = d;
            cols[row] = Some(piv);
        }
        let rank = cols.iter().filter(|c| c.is_some()).count();
        if rank < 3 {
            return Err(Error::DegenerateLattice { rank });
        }
        let total: usize = pivots.iter().map(|&d| d as usize).sum();
        if total + guard > n {
            return Err(Error::Precision(format!(
                "pivot valuations {pivots:?} leave fewer than {guard} guard digits at precision {n}"
            )));
        }
        let mut cols = cols.map(Option::unwrap);
        // reduce entries above the pivots
        for j in 1..3 {
            for i in (0..j).rev() {
                let d = pivots[i] as usize;
                let q = cols[j].coords[i].shift_down(d);
                if !q.is_zero() {
                    cols[j] = cols[j].sub(&cols[i].scale(&q));
                }
                cols[j].coords[i] = cols[j].coords[i].reduce_mod_t_pow(d);
            }
            for i in j + 1..3 {
                cols[j].coords[i] = TruncatedSeries::zero(alg.config());
            }
        }
        cols[0].coords[1] = TruncatedSeries::zero(alg.config());
        cols[0].coords[2] = TruncatedSeries::zero(alg.config());
        Ok(Lattice { alg: Arc::clone(alg), cols, pivots, guard })
    }

    /// The maximal order `A`.
    pub fn full(alg: &Arc<CubicAlgebra>) -> Self {
        let cols = std::array::from_fn(|j| alg.basis(j));
        Lattice { alg: Arc::clone(alg), cols, pivots: [0; 3], guard: DEFAULT_GUARD }
    }

    /// `t^k A`.
    pub fn t_power(alg: &Arc<CubicAlgebra>, k: usize) -> Result<Self> {
        let gens: Vec<_> = (0..3).map(|j| alg.basis(j).shift_up(k)).collect();
        Self::from_generators(alg, &gens)
    }

    pub fn algebra(&self) -> &Arc<CubicAlgebra> {
        &self.alg
    }

    pub fn cols(&self) -> &[AlgebraElement; 3] {
        &self.cols
    }

    pub fn pivots(&self) -> [u32; 3] {
        self.pivots
    }

    pub fn guard(&self) -> usize {
        self.guard
    }

    /// Length of `A / M` over `F_p`.
    pub fn colength(&self) -> u32 {
        self.pivots.iter().sum()
    }

    fn same_algebra(&self, other: &Lattice) -> Result<()> {
        if Arc::ptr_eq(&self.alg, &other.alg) || *self.alg == *other.alg {
            Ok(())
        } else {
            Err(Error::Config("lattices live in different algebras".into()))
        }
    }

    pub fn contains(&self, x: &AlgebraElement) -> bool {
        let mut r = x.clone();
        for j in (0..3).rev() {
            if r.coords[j].is_zero() {
                continue;
            }
            let d = self.pivots[j];
            match r.coords[j].valuation() {
                Valuation::Finite(v) if v >= d => {}
                _ => return false,
            }
            let q = r.coords[j].shift_down(d as usize);
            r = r.sub(&self.cols[j].scale(&q));
            r.coords[j] = TruncatedSeries::zero(self.alg.config());
        }
        true
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.cols.iter().all(|c| self.contains(c))
    }

    /// Coordinates of `x` with respect to the echelon basis, if `x` lies in
    /// the lattice.
    pub fn coordinates(&self, x: &AlgebraElement) -> Option<[TruncatedSeries; 3]> {
        let mut r = x.clone();
        let zero = TruncatedSeries::zero(self.alg.config());
        let mut out = [zero.clone(), zero.clone(), zero];
        for j in (0..3).rev() {
            if r.coords[j].is_zero() {
                continue;
            }
            let d = self.pivots[j];
            match r.coords[j].valuation() {
                Valuation::Finite(v) if v >= d => {}
                _ => return None,
            }
            let q = r.coords[j].shift_down(d as usize);
            r = r.sub(&self.cols[j].scale(&q));
            r.coords[j] = TruncatedSeries::zero(self.alg.config());
            out[j] = q;
        }
        Some(out)
    }

    pub fn sum(&self, other: &Lattice) -> Result<Lattice> {
        self.same_algebra(other)?;
        let gens: Vec<_> = self.cols.iter().chain(other.cols.iter()).cloned().collect();
        Lattice::from_generators_guarded(&self.alg, &gens, self.guard)
    }

    /// Lattice spanned by the pairwise products of the two bases.
    pub fn product(&self, other: &Lattice) -> Result<Lattice> {
        self.same_algebra(other)?;
        let mut gens = Vec::with_capacity(9);
        for x in &self.cols {
            for y in &other.cols {
                gens.push(self.alg.mul(x, y));
            }
        }
        Lattice::from_generators_guarded(&self.alg, &gens, self.guard)
    }

    /// The principal multiple `x * M`.
    pub fn mul_element(&self, x: &AlgebraElement) -> Result<Lattice> {
        let gens: Vec<_> = self.cols.iter().map(|c| self.alg.mul(x, c)).collect();
        Lattice::from_generators_guarded(&self.alg, &gens, self.guard)
    }

    /// `t^k M`.
    pub fn shift_up(&self, k: usize) -> Result<Lattice> {
        let gens: Vec<_> = self.cols.iter().map(|c| c.shift_up(k)).collect();
        Lattice::from_generators_guarded(&self.alg, &gens, self.guard)
    }

    /// Largest `k` with `M ⊆ t^k A`.
    pub fn content(&self) -> u32 {
        self.cols.iter().map(AlgebraElement::coord_valuation).min().and_then(Valuation::finite).unwrap_or(0)
    }

    /// `t^{-k} M`, which must lie in `A`.
    pub fn shift_down(&self, k: usize) -> Result<Lattice> {
        if (self.content() as usize) < k {
            return Err(Error::NotContained(format!("lattice is not inside t^{k}A")));
        }
        let gens: Vec<_> = self.cols.iter().map(|c| c.shift_down(k)).collect();
        Lattice::from_generators_guarded(&self.alg, &gens, self.guard)
    }

    /// `t^{-content} M`: the representative inside `A` but not inside `tA`.
    pub fn primitive(&self) -> Result<Lattice> {
        let k = self.content() as usize;
        if k == 0 {
            Ok(self.clone())
        } else {
            self.shift_down(k)
        }
    }

    pub fn contains_one(&self) -> bool {
        self.contains(&self.alg.one())
    }

    pub fn is_order(&self) -> bool {
        if !self.contains_one() {
            return false;
        }
        for i in 0..3 {
            for j in i..3 {
                if !self.contains(&self.alg.mul(&self.cols[i], &self.cols[j])) {
                    return false;
                }
            }
        }
        true
    }

    /// `B` is an over-ring of `C`: both orders and `C ⊆ B`.
    pub fn is_overring(b: &Lattice, c: &Lattice) -> bool {
        b.same_algebra(c).is_ok() && b.is_order() && c.is_order() && b.contains_lattice(c)
    }

    /// `C·M ⊆ M`.
    pub fn is_module_over(&self, c: &Lattice) -> bool {
        c.cols.iter().all(|x| self.cols.iter().all(|m| self.contains(&self.alg.mul(x, m))))
    }

    /// Length of `sup / sub` for `sub ⊆ sup`.
    pub fn index(sub: &Lattice, sup: &Lattice) -> Result<u32> {
        sub.same_algebra(sup)?;
        if !sup.contains_lattice(sub) {
            return Err(Error::NotContained("index needs sub ⊆ sup".into()));
        }
        Ok(sub.colength() - sup.colength())
    }

    /// Smallest `c` with `t^c A ⊆ M`.
    pub fn conductor_exponent(&self) -> usize {
        let start = *self.pivots.iter().max().unwrap() as usize;
        let bound = self.colength() as usize;
        (start..=bound.max(start))
            .find(|&c| (0..3).all(|j| self.contains(&self.alg.basis(j).shift_up(c))))
            .unwrap_or(bound)
    }

    /// Image of `M` in `A / t^c A` as an `F_p`-subspace of dimension `3c`.
    pub fn window_span(&self, c: usize) -> Subspace {
        let p = self.alg.p();
        let mut s = Subspace::zero(p, 3 * c);
        for col in &self.cols {
            for i in 0..c {
                s.insert(window_vec(&col.shift_up(i), c));
            }
        }
        s
    }

    /// `(self : m) = {x ∈ A : x·m ⊆ self}`.
    pub fn colon(&self, m: &Lattice) -> Result<Lattice> {
        self.same_algebra(m)?;
        let alg = &self.alg;
        let c = self.conductor_exponent();
        if c == 0 {
            return Ok(Lattice::full(alg));
        }
        let target = self.window_span(c);
        // b_j * m_k, shifted by t^i below
        let prods: Vec<Vec<AlgebraElement>> =
            (0..3).map(|j| m.cols.iter().map(|mk| alg.mul(&alg.basis(j), mk)).collect()).collect();
        let mut images = Vec::with_capacity(3 * c);
        for i in 0..c {
            for j in 0..3 {
                let mut img = Vec::with_capacity(9 * c);
                for prod in &prods[j] {
                    img.extend(target.reduce(&window_vec(&prod.shift_up(i), c)));
                }
                images.push(img);
            }
        }
        let mut gens: Vec<AlgebraElement> = kernel(alg.p(), &images).iter().map(|v| window_elem(alg, v)).collect();
        gens.extend((0..3).map(|j| alg.basis(j).shift_up(c)));
        Lattice::from_generators_guarded(alg, &gens, self.guard)
    }

    /// The multiplier ring `{x ∈ L : xM ⊆ M}`; it lies in `A` for every
    /// lattice `M ⊆ A`.
    pub fn multiplier_ring(&self) -> Result<Lattice> {
        self.colon(self)
    }

    /// Rows of the echelon matrix: `hnf()[i][j]` is entry `(i, j)`.
    pub fn hnf(&self) -> [[TruncatedSeries; 3]; 3] {
        std::array::from_fn(|i| std::array::from_fn(|j| self.cols[j].coords[i].clone()))
    }

    fn key(&self) -> impl Iterator<Item = u32> + '_ {
        self.cols.iter().flat_map(|c| c.coords.iter().flat_map(|s| s.coeffs().iter().copied()))
    }
}

#[derive(Serialize, Deserialize)]
pub struct LatticeJson {
    pub algebra: AlgebraSpec,
    /// Columns, each a list of three coefficient arrays.
    pub hnf: Vec<Vec<Vec<i64>>>,
}

impl Lattice {
    pub fn to_json(&self) -> LatticeJson {
        let hnf = self
            .cols
            .iter()
            .map(|c| {
                c.coords
                    .iter()
                    .map(|s| {
                        let n = s.coeffs().iter().rposition(|&x| x != 0).map_or(0, |i| i + 1);
                        s.coeffs()[..n].iter().map(|&x| x as i64).collect()
                    })
                    .collect()
            })
            .collect();
        LatticeJson { algebra: self.alg.spec(), hnf }
    }

    /// Rebuilds the lattice spanned by the given columns in `alg`, or in a
    /// freshly built algebra when `alg` is `None`.
    pub fn from_json(j: &LatticeJson, alg: Option<&Arc<CubicAlgebra>>) -> Result<Lattice> {
        let alg = match alg {
            Some(a) if a.spec() == j.algebra => Arc::clone(a),
            Some(_) => return Err(Error::Parse("lattice refers to a different algebra".into())),
            None => Arc::new(j.algebra.build()?),
        };
        let cfg = alg.config();
        let mut gens = Vec::with_capacity(j.hnf.len());
        for col in &j.hnf {
            if col.len() != 3 {
                return Err(Error::Parse("each column needs three coordinates".into()));
            }
            let coords = std::array::from_fn(|i| TruncatedSeries::from_coeffs(cfg, &col[i]));
            gens.push(AlgebraElement::new(coords));
        }
        Lattice::from_generators(&alg, &gens)
    }
}

impl Serialize for Lattice {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(s)
    }
}

impl PartialEq for Lattice {
    fn eq(&self, other: &Self) -> bool {
        self.pivots == other.pivots && self.cols == other.cols
    }
}

impl Eq for Lattice {}

impl Hash for Lattice {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.pivots.hash(state);
        self.cols.hash(state);
    }
}

impl PartialOrd for Lattice {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Lattice {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(other.key())
    }
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice({}; pivots {:?}; cols {:?})", self.alg.case(), self.pivots, self.cols)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::BranchCase;
    use crate::series::RingConfig;

    fn alg(case: BranchCase) -> Arc<CubicAlgebra> {
        Arc::new(CubicAlgebra::new(RingConfig::new(5, 12).unwrap(), case).unwrap())
    }

    fn diag(a: &Arc<CubicAlgebra>, d: [usize; 3]) -> Lattice {
        let gens: Vec<_> = (0..3).map(|j| a.basis(j).shift_up(d[j])).collect();
        Lattice::from_generators(a, &gens).unwrap()
    }

    fn a_m(a: &Arc<CubicAlgebra>, m: usize) -> Lattice {
        let mut gens = vec![a.one()];
        gens.extend((0..3).map(|j| a.basis(j).shift_up(m)));
        Lattice::from_generators(a, &gens).unwrap()
    }

    #[test]
    fn redundant_generators_give_a() {
        let a = alg(BranchCase::OneBranchRamified);
        let tau = a.basis(1);
        let gens = vec![a.one(), tau.clone(), a.basis(2), tau.shift_up(1)];
        assert_eq!(Lattice::from_generators(&a, &gens).unwrap(), Lattice::full(&a));
    }

    #[test]
    fn a1_is_diagonal() {
        let a = alg(BranchCase::OneBranchRamified);
        assert_eq!(a_m(&a, 1), diag(&a, [0, 1, 1]));
        assert_eq!(a_m(&a, 1).pivots(), [0, 1, 1]);
    }

    #[test]
    fn c2_tau_is_diagonal() {
        let a = alg(BranchCase::OneBranchRamified);
        let mut gens = vec![a.one(), a.basis(1).shift_up(1)];
        gens.extend((0..3).map(|j| a.basis(j).shift_up(2)));
        assert_eq!(Lattice::from_generators(&a, &gens).unwrap(), diag(&a, [0, 1, 2]));
    }

    #[test]
    fn degenerate_and_imprecise_inputs() {
        let a = alg(BranchCase::OneBranchRamified);
        let err = Lattice::from_generators(&a, &[a.one(), a.basis(1)]).unwrap_err();
        assert!(matches!(err, Error::DegenerateLattice { rank: 2 }));
        let gens: Vec<_> = (0..3).map(|j| a.basis(j).shift_up(4)).collect();
        assert!(matches!(Lattice::from_generators(&a, &gens), Err(Error::Precision(_))));
    }

    #[test]
    fn membership() {
        let a = alg(BranchCase::OneBranchRamified);
        let a1 = a_m(&a, 1);
        assert!(a1.contains(&a.basis(1).shift_up(1)));
        assert!(!a1.contains(&a.basis(1)));
        assert!(a1.contains(&a.zero()));
    }

    #[test]
    fn products_sums_and_orders() {
        let a = alg(BranchCase::OneBranchRamified);
        let a1 = a_m(&a, 1);
        let full = Lattice::full(&a);
        assert_eq!(a1.product(&a1).unwrap(), a1);
        assert_eq!(a1.sum(&a1).unwrap(), a1);
        assert_eq!(full.product(&full).unwrap(), full);
        assert!(a1.is_order());
        let not_ring = Lattice::from_generators(&a, &[a.one(), a.basis(1), a.basis(2).shift_up(1)]).unwrap();
        assert!(!not_ring.is_order());

        let a3 = alg(BranchCase::ThreeBranches);
        let gens = vec![a3.element([&[1], &[], &[]]), a3.element([&[], &[1], &[1]]), a3.element([&[], &[], &[0, 1]])];
        assert!(Lattice::from_generators(&a3, &gens).unwrap().is_order());
    }

    #[test]
    fn overrings_and_index() {
        let a = alg(BranchCase::OneBranchRamified);
        let full = Lattice::full(&a);
        let a1 = a_m(&a, 1);
        let a2 = a_m(&a, 2);
        assert!(Lattice::is_overring(&full, &a1));
        assert!(!Lattice::is_overring(&a1, &full));
        let c2 = diag(&a, [0, 1, 2]);
        assert!(Lattice::is_overring(&c2, &a2));
        assert_eq!(Lattice::index(&a1, &full).unwrap(), 2);
        assert_eq!(Lattice::index(&a2, &full).unwrap(), 4);
        assert_eq!(Lattice::index(&c2.shift_up(1).unwrap(), &c2).unwrap(), 3);
        assert!(Lattice::index(&full, &a1).is_err());
    }

    #[test]
    fn conductor_and_colon() {
        let a = alg(BranchCase::OneBranchRamified);
        let a2 = a_m(&a, 2);
        assert_eq!(a2.conductor_exponent(), 2);
        assert_eq!(a2.multiplier_ring().unwrap(), a2);
        let full = Lattice::full(&a);
        assert_eq!(full.colon(&a2).unwrap(), full);
        // (A2 : A) is the conductor t²A
        assert_eq!(a2.colon(&full).unwrap(), Lattice::t_power(&a, 2).unwrap());
    }

    #[test]
    fn json_round_trip() {
        let a = alg(BranchCase::TwoBranchesUnramified);
        let m = a_m(&a, 2).product(&diag(&a, [0, 1, 1])).unwrap();
        let text = serde_json::to_string(&m).unwrap();
        let j: LatticeJson = serde_json::from_str(&text).unwrap();
        assert_eq!(Lattice::from_json(&j, None).unwrap(), m);
        assert_eq!(Lattice::from_json(&j, Some(&a)).unwrap(), m);
    }

    #[test]
    fn echelon_is_idempotent_on_every_case() {
        for case in BranchCase::ALL {
            let a = alg(case);
            let x = a.element([&[1, 2, 3], &[0, 4, 1], &[2, 0, 0, 1]]);
            let y = a.element([&[0, 1], &[3, 3], &[1]]);
            let z = a.element([&[0, 0, 2], &[1], &[4, 1]]);
            let m = Lattice::from_generators(&a, &[x, y, z, a.t_pow(3)]).unwrap();
            let again = Lattice::from_generators(&a, m.cols()).unwrap();
            assert_eq!(m, again);
        }
    }
}
