//! Duals `B* = Hom_D(B, D)`, realized inside `L` through the trace form.

use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{adjugate3, AlgebraElement, BranchCase, CubicAlgebra};
use crate::error::{Error, Result};
use crate::families::{family_generator, recognize, FamilyDescriptor, FamilyKind, Subscript};
use crate::ideals::{isomorphism, Scaling};
use crate::lattice::Lattice;
use crate::series::TruncatedSeries;

/// `{x ∈ L : Tr(xM) ⊆ D}`, scaled by a power of `t` into `A` but not into
/// `tA`.
pub fn trace_dual(m: &Lattice) -> Result<Lattice> {
    let alg = m.algebra();
    let g = alg.gram();
    let h = m.hnf();
    // (Hᵀ G)_{jk} = Tr(m_j b_k); x = Σ y_k b_k is dual iff Hᵀ G y ∈ D³
    let prod: [[TruncatedSeries; 3]; 3] = std::array::from_fn(|j| {
        std::array::from_fn(|k| {
            let mut acc = TruncatedSeries::zero(alg.config());
            for i in 0..3 {
                acc += &(&h[i][j] * &g[i][k]);
            }
            acc
        })
    });
    // columns of adj(HᵀG) span det(HᵀG) · M*
    let adj = adjugate3(&prod);
    let gens: Vec<AlgebraElement> =
        (0..3).map(|c| AlgebraElement::new(std::array::from_fn(|r| adj[r][c].clone()))).collect();
    Lattice::from_generators_guarded(alg, &gens, m.guard())
        .map_err(|e| match e {
            Error::DegenerateLattice { .. } => Error::Precondition("trace form is degenerate".into()),
            e => e,
        })?
        .primitive()
}

/// `Hom_C(B, C) = {λ ∈ C : λB ⊆ C}` for a Gorenstein `C ⊆ B`.
pub fn dual_via_hom(b: &Lattice, c: &Lattice) -> Result<Lattice> {
    if !b.contains_lattice(c) {
        return Err(Error::Precondition("need C ⊆ B".into()));
    }
    if !is_gorenstein(c)? {
        return Err(Error::Precondition("C is not Gorenstein".into()));
    }
    c.colon(b)
}

/// The closed-form representative of `B*` for `B = t^k C + D`:
/// `D + t^h g D + t^{k+c} A`. For `C = D + eD + t^qA` the generator is
/// `e + t^q α` with `α` the unit-parameter element of the case. `None` for `A_k`, where the formula has no
/// generator to use.
pub fn closed_form_dual(alg: &Arc<CubicAlgebra>, d: &FamilyDescriptor) -> Result<Option<Lattice>> {
    d.validate()?;
    if d.kind != FamilyKind::ShiftedC || d.is_trivial() {
        return Ok(None);
    }
    let g = match d.sub {
        // the parameter is invisible in C_{0,q} but not in its dual
        Subscript::Pair { l: 0, q } => {
            let e = d.branch;
            let alpha = match alg.case() {
                BranchCase::ThreeBranches => alg.basis((e + 1) % 3),
                _ => alg.basis(1),
            };
            alg.basis(e).add(&alpha.shift_up(q as usize))
        }
        _ => family_generator(alg, d)?,
    };
    let h = d.level() as usize;
    let top = d.conductor() as usize;
    let mut gens = vec![alg.one(), g.shift_up(h)];
    gens.extend((0..3).map(|j| alg.basis(j).shift_up(top)));
    Lattice::from_generators(alg, &gens).map(Some)
}

/// `B` is Gorenstein iff its dual is isomorphic to `B`.
pub fn is_gorenstein(b: &Lattice) -> Result<bool> {
    Ok(gorenstein_witness(b)?.is_some())
}

/// `λ` with `λ · B* = B`, when `B` is Gorenstein.
pub fn gorenstein_witness(b: &Lattice) -> Result<Option<Scaling>> {
    if !b.is_order() {
        return Err(Error::Precondition("Gorenstein test needs an order".into()));
    }
    isomorphism(&trace_dual(b)?, b)
}

#[derive(Clone, Debug, Serialize)]
pub struct DualReport {
    pub input: Lattice,
    pub trace_dual: Lattice,
    pub descriptor: Option<FamilyDescriptor>,
    pub closed_form: Option<Lattice>,
    /// `λ` with `λ · trace_dual = closed_form`.
    pub witness: Option<Scaling>,
    pub note: Option<String>,
}

pub fn dual_report(b: &Lattice) -> Result<DualReport> {
    let dual = trace_dual(b)?;
    let mut report = DualReport {
        input: b.clone(),
        trace_dual: dual.clone(),
        descriptor: None,
        closed_form: None,
        witness: None,
        note: None,
    };
    if !b.is_order() {
        report.note = Some("input is not an order; no closed form".into());
        return Ok(report);
    }
    let d = recognize(b)?;
    match closed_form_dual(b.algebra(), &d)? {
        Some(cf) => {
            report.witness = isomorphism(&dual, &cf)?;
            if report.witness.is_none() {
                report.note = Some("trace dual is not isomorphic to the closed form".into());
            }
            report.closed_form = Some(cf);
        }
        None => {
            report.note = Some(format!("closed form does not apply to {}; trace dual reported alone", d));
        }
    }
    report.descriptor = Some(d);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classify::{is_local, radical};
    use crate::families::{enumerate_closed, make_am, make_family};
    use crate::series::RingConfig;

    fn alg(case: BranchCase) -> Arc<CubicAlgebra> {
        Arc::new(CubicAlgebra::new(RingConfig::new(5, 20).unwrap(), case).unwrap())
    }

    fn c2(a: &Arc<CubicAlgebra>) -> Lattice {
        let d = FamilyDescriptor::shifted(BranchCase::OneBranchRamified, 0, Subscript::Rho(2), vec![0]);
        make_family(a, &d).unwrap()
    }

    #[test]
    fn dual_of_maximal_order() {
        let a = alg(BranchCase::ThreeBranches);
        assert_eq!(trace_dual(&Lattice::full(&a)).unwrap(), Lattice::full(&a));
        let a = alg(BranchCase::OneBranchRamified);
        let d = trace_dual(&Lattice::full(&a)).unwrap();
        // the inverse different is τ⁻²A
        let tau = a.tau().unwrap();
        assert_eq!(d.mul_element(&a.mul(&tau, &tau)).unwrap().primitive().unwrap(), Lattice::full(&a));
        assert!(isomorphism(&d, &Lattice::full(&a)).unwrap().is_some());
    }

    #[test]
    fn plane_curve_is_self_dual() {
        let a = alg(BranchCase::OneBranchRamified);
        let c = c2(&a);
        let dual = trace_dual(&c).unwrap();
        let w = isomorphism(&dual, &c).unwrap().expect("C_2 is Gorenstein");
        assert!(w.maps(&dual, &c).unwrap());
        assert!(is_gorenstein(&c).unwrap());
        assert!(is_gorenstein(&Lattice::full(&a)).unwrap());
        assert!(!is_gorenstein(&make_am(&a, 2).unwrap()).unwrap());
    }

    #[test]
    fn hom_dual() {
        let a = alg(BranchCase::OneBranchRamified);
        let c = c2(&a);
        assert_eq!(dual_via_hom(&c, &c).unwrap(), c);

        let b2 = alg(BranchCase::TwoBranchesRamified);
        let case = BranchCase::TwoBranchesRamified;
        let b = make_family(&b2, &FamilyDescriptor::shifted(case, 1, Subscript::Pair { l: 1, q: 0 }, vec![1])).unwrap();
        let cd = FamilyDescriptor::shifted(case, 0, Subscript::Pair { l: 2, q: 0 }, vec![1, 0]);
        let c = make_family(&b2, &cd).unwrap();
        let hom = dual_via_hom(&b, &c).unwrap();
        // t D + t^2 (e + τ) D + t^4 A
        let g = family_generator(&b2, &cd).unwrap();
        let mut gens = vec![b2.t_pow(1), g.shift_up(2)];
        gens.extend((0..3).map(|j| b2.basis(j).shift_up(4)));
        assert_eq!(hom, Lattice::from_generators(&b2, &gens).unwrap());
        assert!(isomorphism(&hom, &trace_dual(&b).unwrap()).unwrap().is_some());
    }

    #[test]
    fn closed_form_bullets() {
        let u = alg(BranchCase::OneBranchUnramified);
        let d = FamilyDescriptor::shifted(BranchCase::OneBranchUnramified, 1, Subscript::Rho(1), vec![2]);
        let cf = closed_form_dual(&u, &d).unwrap().unwrap();
        let g = family_generator(&u, &d).unwrap();
        let mut gens = vec![u.one(), g.shift_up(1)];
        gens.extend((0..3).map(|j| u.basis(j).shift_up(3)));
        assert_eq!(cf, Lattice::from_generators(&u, &gens).unwrap());
        let b = make_family(&u, &d).unwrap();
        assert!(isomorphism(&trace_dual(&b).unwrap(), &cf).unwrap().is_some());

        let r = alg(BranchCase::TwoBranchesRamified);
        let d = FamilyDescriptor::shifted(BranchCase::TwoBranchesRamified, 1, Subscript::Rho(1), vec![3]);
        let cf = closed_form_dual(&r, &d).unwrap().unwrap();
        assert_eq!(cf.conductor_exponent(), 4);
        let b = make_family(&r, &d).unwrap();
        assert!(isomorphism(&trace_dual(&b).unwrap(), &cf).unwrap().is_some());

        assert!(closed_form_dual(&r, &FamilyDescriptor::am(BranchCase::TwoBranchesRamified, 2)).unwrap().is_none());
    }

    #[test]
    fn closed_form_and_involution_on_all_small_rings() {
        for case in BranchCase::ALL {
            let a = alg(case);
            for d in enumerate_closed(5, case, 2) {
                let b = make_family(&a, &d).unwrap();
                let rep = dual_report(&b).unwrap();
                if let Some(cf) = &rep.closed_form {
                    let w = rep.witness.as_ref().unwrap_or_else(|| panic!("{d}"));
                    assert!(w.maps(&rep.trace_dual, cf).unwrap());
                }
                let dd = trace_dual(&rep.trace_dual).unwrap();
                assert!(isomorphism(&dd, &b).unwrap().is_some(), "{d}");
            }
        }
    }

    /// Gorenstein iff the dual is generated by one element (Nakayama).
    #[test]
    fn gorenstein_matches_generator_count() {
        for case in BranchCase::ALL {
            let a = alg(case);
            for d in enumerate_closed(5, case, 3) {
                let b = make_family(&a, &d).unwrap();
                if !is_local(&b).unwrap() {
                    continue;
                }
                let j = radical(&b).unwrap();
                let f = j.colength() - b.colength();
                let dual = trace_dual(&b).unwrap();
                let jd = j.product(&dual).unwrap();
                let gens = (jd.colength() - dual.colength()) / f;
                assert_eq!(is_gorenstein(&b).unwrap(), gens == 1, "{d}");
            }
        }
    }
}
