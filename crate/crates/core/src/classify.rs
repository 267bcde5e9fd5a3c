//! Locality, embedding dimension and singularity names.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{AlgebraElement, BranchCase, CubicAlgebra};
use crate::error::{Error, Result};
use crate::families::{family_generator, make_family, recognize, FamilyDescriptor, FamilyKind, Subscript};
use crate::fp::{kernel, Subspace};
use crate::lattice::Lattice;
use crate::overrings::{residue_table, ResidueTable as Table};
use crate::series::Valuation;

fn residue_mul(p: u32, table: &Table, x: &[u32], y: &[u32]) -> Vec<u32> {
    let mut out = vec![0u64; 3];
    for i in 0..3 {
        for j in 0..3 {
            let c = (x[i] as u64 * y[j] as u64) % p as u64;
            if c == 0 {
                continue;
            }
            for k in 0..3 {
                out[k] = (out[k] + c * table[i][j][k] as u64) % p as u64;
            }
        }
    }
    out.into_iter().map(|v| v as u32).collect()
}

/// Radical of `C/tC`: the kernel of the trace form. Valid because the
/// characteristic exceeds the dimension.
fn residue_radical(p: u32, table: &Table) -> Subspace {
    let tr: Vec<u32> = (0..3).map(|i| (0..3).map(|j| table[i][j][j]).fold(0, |a, b| (a + b) % p)).collect();
    let unit = |i: usize| {
        let mut v = vec![0; 3];
        v[i] = 1;
        v
    };
    // Trace of b_i * b_j.
    let form: Vec<Vec<u32>> = (0..3)
        .map(|j| {
            (0..3)
                .map(|i| {
                    let prod = residue_mul(p, table, &unit(i), &unit(j));
                    prod.iter().zip(&tr).fold(0u64, |a, (&x, &t)| (a + x as u64 * t as u64) % p as u64) as u32
                })
                .collect()
        })
        .collect();
    Subspace::span(p, 3, kernel(p, &form))
}

/// Jacobson radical of an order: lifts of the residue radical plus `tC`.
pub fn radical(c: &Lattice) -> Result<Lattice> {
    let alg = c.algebra();
    let p = alg.p();
    let (table, _) = residue_table(c)?;
    let rad = residue_radical(p, &table);
    let cols = c.cols();
    let mut gens: Vec<AlgebraElement> = cols.iter().map(|x| x.shift_up(1)).collect();
    for v in rad.basis() {
        let mut x = alg.zero();
        for (i, &coef) in v.iter().enumerate() {
            if coef != 0 {
                x = x.add(&cols[i].scale_int(coef));
            }
        }
        gens.push(x);
    }
    Lattice::from_generators_guarded(alg, &gens, c.guard())
}

/// Number of idempotents of `C/tC`; idempotents lift uniquely to `C`.
fn residue_idempotent_count(c: &Lattice) -> Result<usize> {
    let p = c.algebra().p();
    let (table, _) = residue_table(c)?;
    let mut count = 0;
    for a in 0..p {
        for b in 0..p {
            for d in 0..p {
                let x = [a, b, d];
                if residue_mul(p, &table, &x, &x) == x {
                    count += 1;
                }
            }
        }
    }
    Ok(count)
}

pub fn is_decomposable(c: &Lattice) -> Result<bool> {
    Ok(residue_idempotent_count(c)? > 2)
}

pub fn is_local(c: &Lattice) -> Result<bool> {
    Ok(!is_decomposable(c)?)
}

/// `dim_k J/J^2` for a local order with residue field `k`.
pub fn embedding_dim(c: &Lattice) -> Result<u32> {
    if !c.is_order() {
        return Err(Error::Precondition("not an order".into()));
    }
    if is_decomposable(c)? {
        return Err(Error::NotLocal("nontrivial idempotent in the residue ring".into()));
    }
    let j = radical(c)?;
    let j2 = j.product(&j)?;
    let f = j.colength() - c.colength();
    let d = j2.colength() - j.colength();
    debug_assert_eq!(d % f, 0);
    Ok(d / f)
}

/// A row of the table of plane curve cubic singularities.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingularityType {
    pub name: String,
    /// Classical name when the singularity is in fact quadratic.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alias: Option<String>,
    pub branches: usize,
    pub vx: Vec<Valuation>,
    pub vy: Vec<Valuation>,
    pub param_count: u32,
}

impl fmt::Display for SingularityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let show = |v: &[Valuation]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{}", self.name)?;
        if let Some(a) = &self.alias {
            write!(f, " (= {a})")?;
        }
        write!(f, "  v(x)=({})  v(y)=({})  par={}", show(&self.vx), show(&self.vy), self.param_count)
    }
}

fn fin(v: u32) -> Valuation {
    Valuation::Finite(v)
}

fn not_plane(d: &FamilyDescriptor) -> Error {
    Error::NotPlaneCurve(format!("{d} is not a plane curve singularity"))
}

/// Name, expected multivaluations and parameter count from the table.
/// The `y` valuations are in the algebra's branch order.
fn table_row(d: &FamilyDescriptor) -> Result<SingularityType> {
    use BranchCase::*;
    if d.kind != FamilyKind::ShiftedC || d.k != 0 || d.is_trivial() {
        return Err(not_plane(d));
    }
    let inf = Valuation::Infinite;
    let (name, vx, vy, par) = match (d.case, d.sub) {
        (OneBranchRamified, Subscript::Rho(rho)) => {
            let r = rho / 2;
            if rho % 2 == 0 {
                (format!("E_{}", 6 * r), vec![fin(3)], vec![fin(3 * r + 1)], r)
            } else {
                (format!("E_{}", 6 * r + 2), vec![fin(3)], vec![fin(3 * r + 2)], r)
            }
        }
        (OneBranchUnramified, Subscript::Rho(r)) => (format!("E*_{{{r},0}}"), vec![fin(1)], vec![fin(r)], r),
        (TwoBranchesRamified, Subscript::Rho(r)) => {
            (format!("E_{}", 6 * r + 1), vec![fin(2), fin(1)], vec![fin(2 * r + 1), inf], r)
        }
        (TwoBranchesRamified, Subscript::Pair { l, q }) if l >= 1 => {
            (format!("E_{{{l},{}}}", 2 * q + 1), vec![fin(2), fin(1)], vec![fin(2 * l), inf], l)
        }
        (TwoBranchesUnramified, Subscript::Pair { l, q }) if l >= 1 => {
            (format!("E*_{{{l},{}}}", 2 * q), vec![fin(1), fin(1)], vec![fin(l), inf], l)
        }
        (ThreeBranches, Subscript::Pair { l, q }) if l >= 1 => {
            let b = if q == 0 { 0 } else { d.branch };
            let mut vy = vec![inf; 3];
            vy[b] = fin(l);
            vy[(b + 1) % 3] = fin(l + q);
            (format!("E_{{{l},{}}}", 2 * q), vec![fin(1); 3], vy, l)
        }
        _ => return Err(not_plane(d)),
    };
    let alias = match name.as_str() {
        "E_1" => Some("A_1".to_string()),
        "E_2" => Some("A_2".to_string()),
        _ => None,
    };
    Ok(SingularityType { name, alias, branches: d.case.branch_count(), vx, vy, param_count: par })
}

/// Table row of a `k = 0` family member, checked against the ring: `x = t`
/// and `y = t^h g` must lie in the radical with the listed multivaluations
/// and span `J/J^2`.
pub fn singularity_type(alg: &Arc<CubicAlgebra>, d: &FamilyDescriptor) -> Result<SingularityType> {
    let row = table_row(d)?;
    let c = make_family(alg, d)?;
    if is_decomposable(&c)? {
        return Err(not_plane(d));
    }
    let x = alg.t_pow(1);
    let y = family_generator(alg, d)?.shift_up(d.level() as usize);
    let fail = |what: &str| Error::ClassificationFailure(format!("{d}: {what}"));
    if alg.multival(&x) != row.vx {
        return Err(fail("v(x) differs from the table"));
    }
    if alg.multival(&y) != row.vy {
        return Err(fail("v(y) differs from the table"));
    }
    let j = radical(&c)?;
    let j2 = j.product(&j)?;
    if !j.contains(&x) || !j.contains(&y) {
        return Err(fail("generator outside the maximal ideal"));
    }
    let spanned = Lattice::from_generators_guarded(
        alg,
        &[x, y, j2.cols()[0].clone(), j2.cols()[1].clone(), j2.cols()[2].clone()],
        c.guard(),
    )?;
    if spanned != j {
        return Err(fail("x, y do not generate the maximal ideal"));
    }
    Ok(row)
}

/// Summary of an order, as printed by the command line.
#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub descriptor: FamilyDescriptor,
    pub local: bool,
    pub decomposable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub edim: Option<u32>,
    #[serde(rename = "type", skip_serializing_if = "Option::is_none")]
    pub singularity: Option<SingularityType>,
    /// Multivaluations of the canonical generators.
    pub multivaluations: Vec<Vec<Valuation>>,
    pub param_count: u32,
}

pub fn classify(c: &Lattice) -> Result<Classification> {
    let alg = c.algebra();
    let descriptor = recognize(c)?;
    let decomposable = is_decomposable(c)?;
    let edim = if decomposable { None } else { Some(embedding_dim(c)?) };
    let singularity = match singularity_type(alg, &descriptor) {
        Ok(t) => Some(t),
        Err(Error::NotPlaneCurve(_)) => None,
        Err(e) => return Err(e),
    };
    let param_count = match descriptor.kind {
        FamilyKind::ShiftedC if !descriptor.is_trivial() => descriptor.level(),
        _ => 0,
    };
    Ok(Classification {
        descriptor,
        local: !decomposable,
        decomposable,
        edim,
        singularity,
        multivaluations: c.cols().iter().map(|x| alg.multival(x)).collect(),
        param_count,
    })
}
