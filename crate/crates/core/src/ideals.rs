//! Fractional ideals up to isomorphism.
//!
//! Two lattices `M, M'` are isomorphic as modules over an order iff
//! `λM = M'` for some `λ ∈ L^×`. Every class has representatives with
//! `1 ∈ M ⊆ A`: scale by a per-branch power of the uniformizers until each
//! branch valuation is zero, then divide by a unit of `A` lying in `M`.
//! Two such representatives are isomorphic iff they have the same colength
//! and the colon `(M' : M)` contains a unit of `A`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::algebra::{AlgebraElement, CubicAlgebra};
use crate::duality::trace_dual;
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::overrings::unital_lattices;
use crate::series::TruncatedSeries;

/// Bound on the number of echelon matrices the full window scan visits.
pub const WINDOW_SCAN_LIMIT: u64 = 2_000_000;

/// `λ = numerator · t^{-shift}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Scaling {
    pub numerator: AlgebraElement,
    pub shift: u32,
}

impl Scaling {
    /// Checks `λ M = M'` exactly.
    pub fn maps(&self, from: &Lattice, to: &Lattice) -> Result<bool> {
        Ok(from.mul_element(&self.numerator)? == to.shift_up(self.shift as usize)?)
    }
}

/// A unit of `A` inside `M`, if there is one.
pub fn find_unit(m: &Lattice) -> Option<AlgebraElement> {
    let alg = m.algebra();
    let p = alg.p();
    let res = alg.residue_coordinates();
    let cols = m.cols();
    let residues: Vec<Vec<u32>> =
        cols.iter().map(|c| res.iter().flatten().map(|&i| c.coords[i].constant_term()).collect()).collect();
    let sizes: Vec<usize> = res.iter().map(Vec::len).collect();
    let width = residues[0].len();
    for code in 1..(p as u64).pow(3) {
        let coef =
            [(code % p as u64) as u32, (code / p as u64 % p as u64) as u32, (code / (p as u64 * p as u64)) as u32];
        let mut comb = vec![0u64; width];
        for (j, r) in residues.iter().enumerate() {
            for (acc, &x) in comb.iter_mut().zip(r) {
                *acc = (*acc + coef[j] as u64 * x as u64) % p as u64;
            }
        }
        let mut start = 0;
        let ok = sizes.iter().all(|&s| {
            let nz = comb[start..start + s].iter().any(|&x| x != 0);
            start += s;
            nz
        });
        if ok {
            let mut x = alg.zero();
            for j in 0..3 {
                if coef[j] != 0 {
                    x = x.add(&cols[j].scale_int(coef[j]));
                }
            }
            return Some(x);
        }
    }
    None
}

/// A representative `N = λ M` with `1 ∈ N ⊆ A`, together with `λ`.
pub fn normalize(m: &Lattice) -> Result<(Lattice, Scaling)> {
    let alg = m.algebra();
    let branches = alg.ramification().len();
    let mut vals = vec![u32::MAX; branches];
    for c in m.cols() {
        for (i, v) in alg.multival(c).into_iter().enumerate() {
            if let Some(v) = v.finite() {
                vals[i] = vals[i].min(v);
            }
        }
    }
    let e = alg.ramification();
    let s = (0..branches).map(|i| vals[i].div_ceil(e[i])).max().unwrap_or(0);
    let mut mu = alg.zero();
    for i in 0..branches {
        mu = mu.add(&alg.branch_power(i, s * e[i] - vals[i]));
    }
    let scaled = m.mul_element(&mu)?.shift_down(s as usize)?;
    let u = find_unit(&scaled).ok_or_else(|| Error::Precondition("normalized lattice has no unit".into()))?;
    let u_inv = alg.inv(&u)?;
    let rep = scaled.mul_element(&u_inv)?;
    Ok((rep, Scaling { numerator: alg.mul(&u_inv, &mu), shift: s }))
}

/// `λ` with `λ M = M'` for normalized `M, M'`, if they are isomorphic.
fn normalized_iso(m: &Lattice, n: &Lattice) -> Result<Option<AlgebraElement>> {
    if m.colength() != n.colength() {
        return Ok(None);
    }
    let colon = n.colon(m)?;
    Ok(find_unit(&colon))
}

/// A scaling `λ ∈ L^×` with `λ M = M'`, or `None` if the lattices are not
/// isomorphic.
pub fn isomorphism(m: &Lattice, n: &Lattice) -> Result<Option<Scaling>> {
    let alg = m.algebra();
    let (rm, sm) = normalize(m)?;
    let (rn, sn) = normalize(n)?;
    let Some(u) = normalized_iso(&rm, &rn)? else {
        return Ok(None);
    };
    // N = sn⁻¹ · u · sm · M. Write sn.numerator⁻¹ = t^{-s'} ν with ν ∈ A.
    let e = alg.ramification();
    let inv_num = invert_numerator(alg, &sn.numerator, &e)?;
    let numerator = alg.mul(&alg.mul(&inv_num.numerator, &u), &sm.numerator);
    // λ = ν · t^{-s'} · t^{sn.shift} · u · sm.numerator · t^{-sm.shift}
    let up = sn.shift as i64 - inv_num.shift as i64 - sm.shift as i64;
    let (numerator, shift) = if up >= 0 { (numerator.shift_up(up as usize), 0) } else { (numerator, (-up) as u32) };
    Ok(Some(Scaling { numerator, shift }))
}

/// Writes `x⁻¹ = t^{-s} ν` with `ν ∈ A`, for `x` a unit of `A` times
/// branch powers of uniformizers.
fn invert_numerator(alg: &CubicAlgebra, x: &AlgebraElement, e: &[u32]) -> Result<Scaling> {
    let vals = alg.multival(x);
    let branches = e.len();
    let v: Vec<u32> = vals
        .iter()
        .map(|v| v.finite().ok_or_else(|| Error::NonUnit("scaling vanishes on a branch".into())))
        .collect::<Result<_>>()?;
    let s = (0..branches).map(|i| v[i].div_ceil(e[i])).max().unwrap_or(0);
    // x · Σ π_i^{s e_i - v_i} = t^s · unit
    let mut comp = alg.zero();
    for i in 0..branches {
        comp = comp.add(&alg.branch_power(i, s * e[i] - v[i]));
    }
    let prod = alg.mul(x, &comp).shift_down(s as usize);
    let unit_inv = alg.inv(&prod)?;
    Ok(Scaling { numerator: alg.mul(&comp, &unit_inv), shift: s })
}

pub fn is_isomorphic(m: &Lattice, n: &Lattice) -> Result<bool> {
    Ok(isomorphism(m, n)?.is_some())
}

/// A `C`-module lattice `M` of full rank.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FractionalIdeal {
    pub base: Lattice,
    pub module: Lattice,
}

impl FractionalIdeal {
    pub fn new(base: Lattice, module: Lattice) -> Result<Self> {
        if !module.is_module_over(&base) {
            return Err(Error::Precondition("lattice is not stable under the order".into()));
        }
        Ok(FractionalIdeal { base, module })
    }
}

pub fn is_isomorphic_ideals(m: &FractionalIdeal, n: &FractionalIdeal) -> Result<bool> {
    if m.base != n.base {
        return Err(Error::Precondition("ideals of different orders".into()));
    }
    is_isomorphic(&m.module, &n.module)
}

/// Every `C`-stable lattice with `t^w A ⊆ M ⊆ A`, by a full scan of echelon
/// forms. Refuses when the scan would exceed [`WINDOW_SCAN_LIMIT`].
pub fn enumerate_ideal_lattices(c: &Lattice, w: usize) -> Result<Vec<FractionalIdeal>> {
    let alg = c.algebra();
    let tw = Lattice::t_power(alg, w)?;
    if !c.contains_lattice(&tw) {
        return Err(Error::Precondition(format!("order does not contain t^{w}A")));
    }
    let p = alg.p() as u64;
    let mut total: u64 = 0;
    for d0 in 0..=w as u32 {
        for d1 in 0..=w as u32 {
            total = total.saturating_add((w as u64 + 1) * p.saturating_pow(2 * d0 + d1));
        }
    }
    if total > WINDOW_SCAN_LIMIT {
        return Err(Error::Envelope(format!(
            "window scan would visit {total} echelon forms (limit {WINDOW_SCAN_LIMIT})"
        )));
    }
    let cfg = alg.config();
    let poly = |digits: &[u32]| {
        let c: Vec<i64> = digits.iter().map(|&d| d as i64).collect();
        TruncatedSeries::from_coeffs(cfg, &c)
    };
    let mut out = Vec::new();
    for d in pivot_triples(w) {
        let [d0, d1, d2] = d;
        let n_free = 2 * d0 + d1;
        for code in 0..p.pow(n_free as u32) {
            let mut digits = Vec::with_capacity(n_free);
            let mut r = code;
            for _ in 0..n_free {
                digits.push((r % p) as u32);
                r /= p;
            }
            let x01 = poly(&digits[..d0]);
            let x02 = poly(&digits[d0..2 * d0]);
            let x12 = poly(&digits[2 * d0..]);
            let gens = [
                alg.basis(0).shift_up(d0),
                alg.basis(0).scale(&x01).add(&alg.basis(1).shift_up(d1)),
                alg.basis(0).scale(&x02).add(&alg.basis(1).scale(&x12)).add(&alg.basis(2).shift_up(d2)),
            ];
            let m = Lattice::from_generators(alg, &gens)?;
            if m.contains_lattice(&tw) && m.is_module_over(c) {
                out.push(FractionalIdeal { base: c.clone(), module: m });
            }
        }
    }
    Ok(out)
}

fn pivot_triples(w: usize) -> Vec<[usize; 3]> {
    let mut v = Vec::new();
    for a in 0..=w {
        for b in 0..=w {
            for c in 0..=w {
                v.push([a, b, c]);
            }
        }
    }
    v
}

/// `C`-stable lattices `M` with `1 ∈ M ⊆ A`: one or more representatives of
/// every ideal class of `C`.
pub fn normalized_ideal_lattices(c: &Lattice) -> Result<Vec<Lattice>> {
    normalized_in_window(c, c.conductor_exponent())
}

/// `C`-stable lattices with `t^w A ⊆ M`, `1 ∈ M ⊆ A`.
pub fn normalized_in_window(c: &Lattice, w: usize) -> Result<Vec<Lattice>> {
    let alg = c.algebra();
    let mut out: Vec<Lattice> = unital_lattices(alg, w)?.into_iter().filter(|m| m.is_module_over(c)).collect();
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClassTag {
    OverRing,
    DualOfOverRing,
    Unexpected,
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassTag::OverRing => "over-ring",
            ClassTag::DualOfOverRing => "dual",
            ClassTag::Unexpected => "UNEXPECTED",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct IdealClass {
    pub representative: Lattice,
    pub multiplier_ring: Lattice,
    pub tag: ClassTag,
    /// Number of normalized lattices in the class.
    pub size: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct ClassCensus {
    pub base: Lattice,
    pub window: usize,
    pub classes: Vec<IdealClass>,
    /// Whether the class count was reproduced at a larger window.
    pub stable: Option<bool>,
}

impl ClassCensus {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn unexpected(&self) -> usize {
        self.classes.iter().filter(|c| c.tag == ClassTag::Unexpected).count()
    }
}

/// Splits normalized lattices into isomorphism classes.
fn partition(lattices: &[Lattice]) -> Result<Vec<(Lattice, Lattice, usize)>> {
    // colength and multiplier ring are invariants of a class
    let mut buckets: BTreeMap<(u32, Lattice), Vec<(Lattice, usize)>> = BTreeMap::new();
    for m in lattices {
        let key = (m.colength(), m.multiplier_ring()?);
        let reps = buckets.entry(key).or_default();
        let mut found = false;
        for (rep, size) in reps.iter_mut() {
            if normalized_iso(rep, m)?.is_some() {
                *size += 1;
                found = true;
                break;
            }
        }
        if !found {
            reps.push((m.clone(), 1));
        }
    }
    Ok(buckets
        .into_iter()
        .flat_map(|((_, ring), reps)| reps.into_iter().map(move |(r, s)| (r, ring.clone(), s)))
        .collect())
}

/// Ideal classes of the order `c`, each tagged as an over-ring, a dual of
/// an over-ring, or unexpected.
pub fn iso_classes(c: &Lattice) -> Result<ClassCensus> {
    iso_classes_with_window(c, c.conductor_exponent())
}

/// As [`iso_classes`], scanning normalized lattices down to `t^w A`; `w`
/// must be at least the conductor exponent.
pub fn iso_classes_with_window(c: &Lattice, w: usize) -> Result<ClassCensus> {
    if !c.is_order() {
        return Err(Error::Precondition("ideal classes need an order".into()));
    }
    if w < c.conductor_exponent() {
        return Err(Error::Precondition(format!(
            "window {w} is below the conductor exponent {}",
            c.conductor_exponent()
        )));
    }
    let lattices = normalized_in_window(c, w)?;
    let overrings: Vec<Lattice> = lattices.iter().filter(|m| m.is_order()).cloned().collect();
    let duals: Vec<Lattice> =
        overrings.iter().map(|b| trace_dual(b).and_then(|d| normalize(&d).map(|x| x.0))).collect::<Result<_>>()?;
    let mut classes = Vec::new();
    for (rep, ring, size) in partition(&lattices)? {
        let mut tag = ClassTag::Unexpected;
        for b in &overrings {
            if normalized_iso(b, &rep)?.is_some() {
                tag = ClassTag::OverRing;
                break;
            }
        }
        if tag == ClassTag::Unexpected {
            for d in &duals {
                if normalized_iso(d, &rep)?.is_some() {
                    tag = ClassTag::DualOfOverRing;
                    break;
                }
            }
        }
        classes.push(IdealClass { representative: rep, multiplier_ring: ring, tag, size });
    }
    Ok(ClassCensus { base: c.clone(), window: w, classes, stable: None })
}

/// Classes of `c` computed from the full window scan at window `w`.
pub fn iso_classes_in_window(c: &Lattice, w: usize) -> Result<usize> {
    let ideals = enumerate_ideal_lattices(c, w)?;
    let reps: Vec<Lattice> = ideals.iter().map(|i| normalize(&i.module).map(|x| x.0)).collect::<Result<_>>()?;
    let mut reps = reps;
    reps.sort();
    reps.dedup();
    Ok(partition(&reps)?.len())
}

/// The census with a stability re-run at window `w + 1`: the full window
/// scan when it fits the envelope, otherwise the normalized lattices of the
/// larger window.
pub fn iso_classes_checked(c: &Lattice) -> Result<ClassCensus> {
    let mut census = iso_classes(c)?;
    let w = census.window + 1;
    let n = match iso_classes_in_window(c, w) {
        Ok(n) => n,
        Err(Error::Envelope(_)) => partition(&normalized_in_window(c, w)?)?.len(),
        Err(e) => return Err(e),
    };
    census.stable = Some(n == census.len());
    Ok(census)
}

/// Outcome of the growth-degree estimate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ParEstimate {
    pub counts: Vec<(u32, usize)>,
    /// Degree of the interpolating polynomial, when it is determined by
    /// fewer points than supplied.
    pub degree: Option<usize>,
}

impl ParEstimate {
    pub fn is_conclusive(&self) -> bool {
        self.degree.is_some()
    }
}

/// Degree of the polynomial through `(x, y)`, when at least one point is
/// left over to confirm it.
pub fn interpolation_degree(points: &[(u32, usize)]) -> Option<usize> {
    // exact rational divided differences
    let n = points.len();
    if n == 0 {
        return None;
    }
    let xs: Vec<i128> = points.iter().map(|&(x, _)| x as i128).collect();
    let mut table: Vec<(i128, i128)> = points.iter().map(|&(_, y)| (y as i128, 1)).collect();
    let mut leading = vec![table[0]];
    for level in 1..n {
        let mut next = Vec::with_capacity(n - level);
        for i in 0..n - level {
            let (a, b) = table[i + 1];
            let (c, d) = table[i];
            let num = a * d - c * b;
            let den = b * d * (xs[i + level] - xs[i]);
            let g = gcd(num.abs(), den.abs()).max(1);
            next.push((num / g, den / g));
        }
        leading.push(next[0]);
        table = next;
    }
    let degree = leading.iter().rposition(|&(num, _)| num != 0).unwrap_or(0);
    (degree + 2 <= n).then_some(degree)
}

fn gcd(a: i128, b: i128) -> i128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Class counts of the same named order over several primes, and the
/// growth degree in `p`.
pub fn par_estimate<F>(primes: &[u32], mut build: F) -> Result<ParEstimate>
where
    F: FnMut(u32) -> Result<Lattice>,
{
    let mut counts = Vec::with_capacity(primes.len());
    for &p in primes {
        let c = build(p)?;
        counts.push((p, iso_classes(&c)?.len()));
    }
    let degree = interpolation_degree(&counts);
    Ok(ParEstimate { counts, degree })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::BranchCase;
    use crate::families::{make_am, make_family, FamilyDescriptor, Subscript};
    use crate::series::RingConfig;
    use std::sync::Arc;

    fn alg(case: BranchCase) -> Arc<CubicAlgebra> {
        Arc::new(CubicAlgebra::new(RingConfig::new(5, 20).unwrap(), case).unwrap())
    }

    #[test]
    fn window_scan_small() {
        let a = alg(BranchCase::OneBranchRamified);
        let full = Lattice::full(&a);
        let only = enumerate_ideal_lattices(&full, 0).unwrap();
        assert_eq!(only.len(), 1);
        assert_eq!(only[0].module, full);

        let a1 = make_am(&a, 1).unwrap();
        let c1 =
            make_family(&a, &FamilyDescriptor::shifted(BranchCase::OneBranchRamified, 0, Subscript::Rho(1), vec![]))
                .unwrap();
        let found: Vec<Lattice> = enumerate_ideal_lattices(&a1, 1).unwrap().into_iter().map(|i| i.module).collect();
        assert!(found.iter().all(|m| m.is_module_over(&a1)));
        for m in [&full, &a1, &c1] {
            assert!(found.contains(m));
        }
        let dual = trace_dual(&a1).unwrap();
        assert!(!dual.is_order());
        let mut hits = 0;
        for m in &found {
            if is_isomorphic(m, &dual).unwrap() {
                hits += 1;
                assert!(!m.is_order());
            }
        }
        assert!(hits > 0);
    }

    #[test]
    fn envelope_is_enforced() {
        let a = Arc::new(CubicAlgebra::new(RingConfig::new(13, 20).unwrap(), BranchCase::ThreeBranches).unwrap());
        let a3 = make_am(&a, 3).unwrap();
        assert!(matches!(enumerate_ideal_lattices(&a3, 3), Err(Error::Envelope(_))));
    }

    #[test]
    fn isomorphism_basics() {
        let a = alg(BranchCase::TwoBranchesRamified);
        let a1 = make_am(&a, 1).unwrap();
        let full = Lattice::full(&a);
        let shifted = a1.shift_up(1).unwrap();
        let w = isomorphism(&a1, &shifted).unwrap().unwrap();
        assert!(w.maps(&a1, &shifted).unwrap());
        let back = isomorphism(&shifted, &a1).unwrap().unwrap();
        assert!(back.maps(&shifted, &a1).unwrap());
        assert!(!is_isomorphic(&full, &a1).unwrap());

        let i = FractionalIdeal::new(a1.clone(), full.clone()).unwrap();
        let j = FractionalIdeal::new(a1.clone(), a1.clone()).unwrap();
        assert!(!is_isomorphic_ideals(&i, &j).unwrap());
        assert!(FractionalIdeal::new(full, a1).is_err());
    }

    #[test]
    fn normalization_lands_in_window() {
        let a = alg(BranchCase::ThreeBranches);
        let a2 = make_am(&a, 2).unwrap();
        let m = a2.mul_element(&a.branch_power(1, 3)).unwrap_err();
        assert!(matches!(m, Error::DegenerateLattice { .. }));
        let lam = a.one().add(&a.branch_power(1, 2)).add(&a.branch_power(2, 1));
        let m = a2.mul_element(&lam).unwrap();
        let (rep, s) = normalize(&m).unwrap();
        assert!(rep.contains_one());
        assert!(Lattice::full(&a).contains_lattice(&rep));
        assert!(s.maps(&m, &rep).unwrap());
    }

    #[test]
    fn census_of_maximal_order_and_a1() {
        let a = alg(BranchCase::OneBranchRamified);
        assert_eq!(iso_classes(&Lattice::full(&a)).unwrap().len(), 1);
        let census = iso_classes_checked(&make_am(&a, 1).unwrap()).unwrap();
        assert_eq!(census.len(), 4);
        assert_eq!(census.unexpected(), 0);
        assert_eq!(census.stable, Some(true));
        let duals = census.classes.iter().filter(|c| c.tag == ClassTag::DualOfOverRing).count();
        assert_eq!(duals, 1);
    }

    #[test]
    fn classes_partition_exactly() {
        let a = alg(BranchCase::TwoBranchesUnramified);
        let c = make_am(&a, 1).unwrap();
        let census = iso_classes(&c).unwrap();
        let reps: Vec<&Lattice> = census.classes.iter().map(|k| &k.representative).collect();
        for (i, x) in reps.iter().enumerate() {
            for (j, y) in reps.iter().enumerate() {
                assert_eq!(is_isomorphic(x, y).unwrap(), i == j);
            }
        }
        let all = normalized_ideal_lattices(&c).unwrap();
        for m in &all {
            let hits = reps.iter().filter(|r| is_isomorphic(m, r).unwrap()).count();
            assert_eq!(hits, 1);
            let k = census.classes.iter().find(|k| is_isomorphic(m, &k.representative).unwrap()).unwrap();
            assert_eq!(m.multiplier_ring().unwrap(), k.multiplier_ring);
        }
        assert_eq!(all.len(), census.classes.iter().map(|k| k.size).sum::<usize>());
    }

    #[test]
    fn growth_degree() {
        assert_eq!(interpolation_degree(&[(5, 4), (7, 4), (11, 4)]), Some(0));
        assert_eq!(interpolation_degree(&[(5, 8), (7, 10), (11, 14), (13, 16)]), Some(1));
        assert_eq!(interpolation_degree(&[(5, 8), (7, 10)]), None);
        assert_eq!(interpolation_degree(&[(5, 25), (7, 49), (11, 121)]), None);
        assert_eq!(interpolation_degree(&[(5, 25), (7, 49), (11, 121), (13, 169)]), Some(2));
    }
}
