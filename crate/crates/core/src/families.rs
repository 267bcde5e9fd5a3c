//! Named orders: `A_m`, `J_m` and the shifted rings `t^k C + D`, where `C`
//! runs over the plane curve families of each branch case.
//!
//! Every family ring has the shape `C = D + t^h g D + t^c A` for a generator
//! `g` depending on the case, the subscripts and a parameter `a ∈ D` stored
//! as its residue digits.
//!
//! | case | subscript | `g` | `h` | `c` | digits of `a` |
//! |------|-----------|-----|-----|-----|---------------|
//! | 1r | `ρ = 2r` | `τ + aτ²` | `r` | `2r` | `r` |
//! | 1r | `ρ = 2r+1` | `τ² + a t τ` | `r` | `2r+1` | `r` |
//! | 1u | `r` | `θ + aθ²` (main) or `θ² + t a θ` (alt) | `r` | `2r` | `r` / `r-1` |
//! | 2r | `C_r` | `τ + t a e` | `r` | `2r+1` | `r` |
//! | 2r | `(l, q)` | `e + t^q a τ`, `a` a unit | `l` | `2l+q` | `l` |
//! | 2u | `(l, q)` | `e₁ + t^q a θ` (main) or `θ + t a e₁` (alt, `q = 0`) | `l` | `2l+q` | `l` / `l-1` |
//! | 3 | `(0, q)` | `e_b` | `0` | `q` | `0` |
//! | 3 | `(l, 0)` | `e₁ + a e₂`, `a ≢ 0, 1 (mod t)` | `l` | `2l` | `l` |
//! | 3 | `(l, q)` | `e_b + t^q a e_{b+1}`, `a` a unit | `l` | `2l+q` | `l` |

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, BranchCase, CubicAlgebra};
use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::series::{RingConfig, TruncatedSeries};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FamilyKind {
    Am,
    Jm,
    ShiftedC,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Subscript {
    /// `ρ` for 1r, `r` for 1u, and `r` of `C_r` for 2r.
    Rho(u32),
    Pair {
        l: u32,
        q: u32,
    },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Chart {
    #[default]
    Main,
    Alt,
}

/// A named order. For `Am`/`Jm` only `m` is meaningful; for `ShiftedC` the
/// ring is `t^k C + D`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FamilyDescriptor {
    pub case: BranchCase,
    pub kind: FamilyKind,
    pub m: u32,
    pub k: u32,
    pub sub: Subscript,
    pub chart: Chart,
    /// Index of the idempotent `e_b` in the three branch case.
    pub branch: usize,
    /// Residue digits of `a`, lowest degree first.
    pub a: Vec<u32>,
}

impl FamilyDescriptor {
    pub fn am(case: BranchCase, m: u32) -> Self {
        FamilyDescriptor {
            case,
            kind: FamilyKind::Am,
            m,
            k: 0,
            sub: trivial_subscript(case),
            chart: Chart::Main,
            branch: 0,
            a: Vec::new(),
        }
    }

    pub fn jm(case: BranchCase, m: u32) -> Self {
        FamilyDescriptor { kind: FamilyKind::Jm, ..Self::am(case, m) }
    }

    pub fn shifted(case: BranchCase, k: u32, sub: Subscript, a: Vec<u32>) -> Self {
        FamilyDescriptor { case, kind: FamilyKind::ShiftedC, m: 0, k, sub, chart: Chart::Main, branch: 0, a }
    }

    pub fn with_chart(mut self, chart: Chart) -> Self {
        self.chart = chart;
        self
    }

    pub fn with_branch(mut self, branch: usize) -> Self {
        self.branch = branch;
        self
    }

    /// The conductor exponent `c` of the unshifted ring `C`.
    pub fn base_conductor(&self) -> u32 {
        match (self.case, self.sub) {
            (BranchCase::OneBranchRamified, Subscript::Rho(rho)) => rho,
            (BranchCase::OneBranchUnramified, Subscript::Rho(r)) => 2 * r,
            (BranchCase::TwoBranchesRamified, Subscript::Rho(r)) => 2 * r + 1,
            (_, Subscript::Pair { l, q }) => 2 * l + q,
            (_, Subscript::Rho(_)) => 0,
        }
    }

    /// Smallest `m` with `A_m` inside the ring.
    pub fn conductor(&self) -> u32 {
        match self.kind {
            FamilyKind::Am => self.m,
            FamilyKind::Jm => self.m,
            FamilyKind::ShiftedC => self.k + self.base_conductor(),
        }
    }

    /// The `k` of `t^k C + D`, with `A_m` read as `t^m A + D`.
    pub fn shift(&self) -> u32 {
        match self.kind {
            FamilyKind::ShiftedC => self.k,
            _ => self.m,
        }
    }

    /// The exponent `h` of the middle generator `t^h g`.
    pub fn level(&self) -> u32 {
        match (self.case, self.sub) {
            (_, Subscript::Rho(rho)) if self.case == BranchCase::OneBranchRamified => rho / 2,
            (_, Subscript::Rho(r)) => r,
            (_, Subscript::Pair { l, .. }) => l,
        }
    }

    /// Whether `C` is the maximal order.
    pub fn is_trivial(&self) -> bool {
        self.kind == FamilyKind::ShiftedC && self.base_conductor() == 0
    }

    /// Length of `A / (t^k C + D)`.
    pub fn colength(&self) -> u32 {
        match self.kind {
            FamilyKind::Am => 2 * self.m,
            FamilyKind::Jm => 3 * self.m - 1,
            FamilyKind::ShiftedC => {
                let c = self.base_conductor();
                let h = if c == 0 { 0 } else { self.level() };
                c + h + 2 * self.k
            }
        }
    }

    /// `t^k A + D` written as `Am`; every other descriptor is unchanged.
    pub fn canonical(&self) -> Self {
        if self.is_trivial() {
            FamilyDescriptor::am(self.case, self.k)
        } else {
            self.clone()
        }
    }

    /// Number of residue digits `a` carries and whether `a` must be a unit.
    fn digit_rule(&self) -> Result<(usize, bool)> {
        use BranchCase::*;
        let bad = |msg: &str| Err(Error::InvalidDescriptor(format!("{msg}: {self}")));
        if self.kind != FamilyKind::ShiftedC {
            return Ok((0, false));
        }
        if self.chart == Chart::Alt {
            let ok = match (self.case, self.sub) {
                (OneBranchUnramified, Subscript::Rho(r)) => r >= 1,
                (TwoBranchesUnramified, Subscript::Pair { l, q }) => l >= 1 && q == 0,
                _ => false,
            };
            if !ok {
                return bad("no alternate chart for these subscripts");
            }
        }
        if self.branch != 0 {
            let ok = matches!((self.case, self.sub), (ThreeBranches, Subscript::Pair { q, .. }) if q >= 1)
                && self.branch < 3;
            if !ok {
                return bad("branch choice not allowed");
            }
        }
        let rule = match (self.case, self.sub) {
            (OneBranchRamified, Subscript::Rho(rho)) => (rho as usize / 2, false),
            (OneBranchUnramified, Subscript::Rho(r)) => match self.chart {
                Chart::Main => (r as usize, false),
                Chart::Alt => (r as usize - 1, false),
            },
            (TwoBranchesRamified, Subscript::Rho(r)) => (r as usize, false),
            (TwoBranchesRamified | TwoBranchesUnramified | ThreeBranches, Subscript::Pair { l, .. }) => {
                match self.chart {
                    Chart::Alt => (l as usize - 1, false),
                    Chart::Main => (l as usize, l > 0),
                }
            }
            _ => return bad("subscript does not match the branch case"),
        };
        Ok(rule)
    }

    /// Checks the normalization of `a` and the case rules.
    pub fn validate(&self) -> Result<()> {
        let (digits, unit) = self.digit_rule()?;
        if self.kind != FamilyKind::ShiftedC {
            if self.kind == FamilyKind::Jm && self.m == 0 {
                return Err(Error::InvalidDescriptor("J_m needs m >= 1".into()));
            }
            return Ok(());
        }
        if self.a.len() != digits {
            return Err(Error::InvalidDescriptor(format!("parameter needs exactly {digits} residue digits: {self}")));
        }
        if unit && self.a[0] == 0 {
            return Err(Error::InvalidDescriptor(format!("parameter must be a unit: {self}")));
        }
        if self.case == BranchCase::ThreeBranches {
            if let Subscript::Pair { l, q: 0 } = self.sub {
                if l > 0 && self.a[0] == 1 {
                    return Err(Error::InvalidDescriptor(format!(
                        "three branch parameter with q = 0 must satisfy a ≢ 1 (mod t): {self}"
                    )));
                }
            }
        }
        Ok(())
    }
}

fn trivial_subscript(case: BranchCase) -> Subscript {
    match case {
        BranchCase::OneBranchRamified | BranchCase::OneBranchUnramified => Subscript::Rho(0),
        _ => Subscript::Pair { l: 0, q: 0 },
    }
}

impl fmt::Display for FamilyDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            FamilyKind::Am => write!(f, "{} A_{}", self.case, self.m),
            FamilyKind::Jm => write!(f, "{} J_{}", self.case, self.m),
            FamilyKind::ShiftedC => {
                write!(f, "{} k={} ", self.case, self.k)?;
                match self.sub {
                    Subscript::Rho(r) => write!(f, "rho={r}")?,
                    Subscript::Pair { l, q } => write!(f, "l={l} q={q}")?,
                }
                if self.chart == Chart::Alt {
                    write!(f, " alt")?;
                }
                if self.branch != 0 {
                    write!(f, " branch={}", self.branch)?;
                }
                write!(f, " a={:?}", self.a)
            }
        }
    }
}

/// Reduces a raw parameter to the canonical residue digits of the family
/// and validates the result.
pub fn canonical_alpha(
    case: BranchCase,
    k: u32,
    sub: Subscript,
    chart: Chart,
    branch: usize,
    raw_a: &TruncatedSeries,
) -> Result<FamilyDescriptor> {
    let mut d = FamilyDescriptor::shifted(case, k, sub, Vec::new()).with_chart(chart).with_branch(branch);
    let (digits, _) = d.digit_rule()?;
    d.a = (0..digits).map(|i| raw_a.coeff(i)).collect();
    d.validate()?;
    Ok(d)
}

pub fn make_am(alg: &Arc<CubicAlgebra>, m: usize) -> Result<Lattice> {
    let mut gens = vec![alg.one()];
    gens.extend((0..3).map(|j| alg.basis(j).shift_up(m)));
    Lattice::from_generators(alg, &gens)
}

/// `J_m = t A_{m-1}`.
pub fn make_jm(alg: &Arc<CubicAlgebra>, m: usize) -> Result<Lattice> {
    if m == 0 {
        return Err(Error::Precondition("J_m needs m >= 1".into()));
    }
    make_am(alg, m - 1)?.shift_up(1)
}

fn series(cfg: RingConfig, digits: &[u32]) -> TruncatedSeries {
    let c: Vec<i64> = digits.iter().map(|&d| d as i64).collect();
    TruncatedSeries::from_coeffs(cfg, &c)
}

/// The generator `g` of the middle term `t^h g D`.
pub fn family_generator(alg: &CubicAlgebra, d: &FamilyDescriptor) -> Result<AlgebraElement> {
    use BranchCase::*;
    if alg.case() != d.case {
        return Err(Error::InvalidDescriptor(format!(
            "descriptor case {} does not match algebra case {}",
            d.case,
            alg.case()
        )));
    }
    let a = series(alg.config(), &d.a);
    let b = |i: usize| alg.basis(i);
    let g = match (d.case, d.sub) {
        _ if d.base_conductor() == 0 => alg.one(),
        (OneBranchRamified, Subscript::Rho(rho)) if rho % 2 == 0 => b(1).add(&b(2).scale(&a)),
        (OneBranchRamified, Subscript::Rho(_)) => b(2).add(&b(1).scale(&a).shift_up(1)),
        (OneBranchUnramified, Subscript::Rho(_)) => match d.chart {
            Chart::Main => b(1).add(&b(2).scale(&a)),
            Chart::Alt => b(2).add(&b(1).scale(&a).shift_up(1)),
        },
        (TwoBranchesRamified, Subscript::Rho(_)) => b(1).add(&b(0).scale(&a).shift_up(1)),
        (TwoBranchesRamified | TwoBranchesUnramified, Subscript::Pair { l, q }) => {
            if l == 0 {
                b(0)
            } else if d.chart == Chart::Alt {
                b(1).add(&b(0).scale(&a).shift_up(1))
            } else {
                b(0).add(&b(1).scale(&a).shift_up(q as usize))
            }
        }
        (ThreeBranches, Subscript::Pair { l, q }) => {
            let e = d.branch;
            if l == 0 {
                b(e)
            } else if q == 0 {
                b(0).add(&b(1).scale(&a))
            } else {
                b(e).add(&b((e + 1) % 3).scale(&a).shift_up(q as usize))
            }
        }
        _ => return Err(Error::InvalidDescriptor(format!("subscript does not fit the case: {d}"))),
    };
    Ok(g)
}

/// The canonical lattice of the named order.
pub fn make_family(alg: &Arc<CubicAlgebra>, d: &FamilyDescriptor) -> Result<Lattice> {
    d.validate()?;
    if alg.case() != d.case {
        return Err(Error::InvalidDescriptor(format!(
            "descriptor case {} does not match algebra case {}",
            d.case,
            alg.case()
        )));
    }
    match d.kind {
        FamilyKind::Am => make_am(alg, d.m as usize),
        FamilyKind::Jm => make_jm(alg, d.m as usize),
        FamilyKind::ShiftedC => {
            let k = d.k as usize;
            let c = d.base_conductor() as usize;
            let h = d.level() as usize;
            let g = family_generator(alg, d)?;
            let mut gens = vec![alg.one(), g.shift_up(k + h)];
            gens.extend((0..3).map(|j| alg.basis(j).shift_up(k + c)));
            Lattice::from_generators(alg, &gens)
        }
    }
}

/// Every residue digit vector of length `n` over `F_p`, lexicographic in
/// the highest digit first.
fn digit_vectors(p: u32, n: usize) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * p as usize);
        for v in &out {
            for c in 0..p {
                let mut w = v.clone();
                w.push(c);
                next.push(w);
            }
        }
        out = next;
    }
    out.sort_by(|x, y| x.iter().rev().cmp(y.iter().rev()));
    out
}

/// Subscripts of the case whose base conductor is exactly `c`.
fn subscripts_with_conductor(case: BranchCase, c: u32) -> Vec<Subscript> {
    use BranchCase::*;
    let mut out = Vec::new();
    match case {
        OneBranchRamified => out.push(Subscript::Rho(c)),
        OneBranchUnramified => {
            if c % 2 == 0 {
                out.push(Subscript::Rho(c / 2));
            }
        }
        _ => {
            if case == TwoBranchesRamified && c % 2 == 1 {
                out.push(Subscript::Rho((c - 1) / 2));
            }
            for l in 0..=c / 2 {
                out.push(Subscript::Pair { l, q: c - 2 * l });
            }
        }
    }
    out
}

/// All canonical descriptors of the shifted rings `t^k C + D` with a given
/// `k` and subscript.
pub fn descriptors_for(p: u32, case: BranchCase, k: u32, sub: Subscript) -> Vec<FamilyDescriptor> {
    let base = FamilyDescriptor::shifted(case, k, sub, Vec::new());
    if base.base_conductor() == 0 {
        return vec![base.canonical()];
    }
    let mut variants = vec![base.clone()];
    match (case, sub) {
        (BranchCase::OneBranchUnramified, _) => variants.push(base.clone().with_chart(Chart::Alt)),
        (BranchCase::TwoBranchesUnramified, Subscript::Pair { l, q: 0 }) if l >= 1 => {
            variants.push(base.clone().with_chart(Chart::Alt))
        }
        (BranchCase::ThreeBranches, Subscript::Pair { q, .. }) if q >= 1 => {
            variants.push(base.clone().with_branch(1));
            variants.push(base.clone().with_branch(2));
        }
        _ => {}
    }
    let mut out = Vec::new();
    for v in variants {
        let Ok((n, _)) = v.digit_rule() else { continue };
        for a in digit_vectors(p, n) {
            let d = FamilyDescriptor { a, ..v.clone() };
            if d.validate().is_ok() {
                out.push(d);
            }
        }
    }
    out
}

/// All over-rings of `A_m` as descriptors, sorted by `(k, subscript, a)`.
pub fn enumerate_closed(p: u32, case: BranchCase, m: u32) -> Vec<FamilyDescriptor> {
    let mut out = Vec::new();
    for k in 0..=m {
        for c in 0..=m - k {
            for sub in subscripts_with_conductor(case, c) {
                out.extend(descriptors_for(p, case, k, sub));
            }
        }
    }
    out.sort_by_cached_key(|d| (d.shift(), d.sub, d.chart, d.branch, d.a.iter().rev().copied().collect::<Vec<_>>()));
    out
}

/// The descriptor whose ring equals `m`, found by search over the
/// descriptors with the same conductor and colength.
pub fn recognize(m: &Lattice) -> Result<FamilyDescriptor> {
    let alg = m.algebra();
    if !m.is_order() {
        return Err(Error::Precondition("recognition needs an order".into()));
    }
    let cond = m.conductor_exponent() as u32;
    let colength = m.colength();
    for k in 0..=cond {
        for sub in subscripts_with_conductor(alg.case(), cond - k) {
            let probe = FamilyDescriptor::shifted(alg.case(), k, sub, Vec::new());
            if probe.base_conductor() > 0 && probe.colength() != colength {
                continue;
            }
            for d in descriptors_for(alg.p(), alg.case(), k, sub) {
                if d.colength() == colength && make_family(alg, &d)? == *m {
                    return Ok(d);
                }
            }
        }
    }
    Err(Error::ClassificationFailure(format!(
        "no family member with conductor {cond} and colength {colength} equals {m:?}"
    )))
}

#[derive(Serialize, Deserialize)]
struct DescriptorJson {
    case: BranchCase,
    kind: FamilyKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    m: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    rho: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    l: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    q: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    a: Option<Vec<u32>>,
    #[serde(default, skip_serializing_if = "is_main")]
    chart: Chart,
    #[serde(default, skip_serializing_if = "is_zero")]
    branch: usize,
}

fn is_main(c: &Chart) -> bool {
    *c == Chart::Main
}

fn is_zero(b: &usize) -> bool {
    *b == 0
}

impl Serialize for FamilyDescriptor {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let shifted = self.kind == FamilyKind::ShiftedC;
        let (rho, l, q) = match self.sub {
            Subscript::Rho(r) => (Some(r), None, None),
            Subscript::Pair { l, q } => (None, Some(l), Some(q)),
        };
        DescriptorJson {
            case: self.case,
            kind: self.kind,
            m: (!shifted).then_some(self.m),
            k: shifted.then_some(self.k),
            rho: rho.filter(|_| shifted),
            l: l.filter(|_| shifted),
            q: q.filter(|_| shifted),
            a: shifted.then(|| self.a.clone()),
            chart: self.chart,
            branch: self.branch,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FamilyDescriptor {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let j = DescriptorJson::deserialize(d)?;
        let desc = match j.kind {
            FamilyKind::Am | FamilyKind::Jm => {
                let m = j.m.ok_or_else(|| D::Error::missing_field("m"))?;
                FamilyDescriptor { kind: j.kind, ..FamilyDescriptor::am(j.case, m) }
            }
            FamilyKind::ShiftedC => {
                let sub = match (j.rho, j.l, j.q) {
                    (Some(r), None, None) => Subscript::Rho(r),
                    (None, Some(l), Some(q)) => Subscript::Pair { l, q },
                    _ => return Err(D::Error::custom("expected either \"rho\" or both \"l\" and \"q\"")),
                };
                let mut d = FamilyDescriptor::shifted(j.case, j.k.unwrap_or(0), sub, j.a.unwrap_or_default())
                    .with_chart(j.chart)
                    .with_branch(j.branch);
                // a full series is accepted and reduced to its residue digits
                if let Ok((n, _)) = d.digit_rule() {
                    d.a.resize(n, 0);
                }
                d
            }
        };
        Ok(desc)
    }
}
