//! The five étale cubic algebras `A` over `D`, each with a fixed `D`-basis.
//!
//! | case | basis            | relations                         |
//! |------|------------------|-----------------------------------|
//! | `1r` | `1, τ, τ²`       | `τ³ = t`                          |
//! | `1u` | `1, θ, θ²`       | `f(θ) = 0`, `f` cubic irreducible |
//! | `2r` | `e, τ, e'`       | `τ² = t·e`, `e + e' = 1`          |
//! | `2u` | `e₁, θ, e'`      | `f(θ) = 0` in `e₁A`, `f` quadratic|
//! | `3`  | `e₁, e₂, e₃`     | orthogonal idempotents            |

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{RingConfig, TruncatedSeries, Valuation};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BranchCase {
    OneBranchRamified,
    OneBranchUnramified,
    TwoBranchesRamified,
    TwoBranchesUnramified,
    ThreeBranches,
}

impl BranchCase {
    pub const ALL: [BranchCase; 5] = [
        BranchCase::OneBranchRamified,
        BranchCase::OneBranchUnramified,
        BranchCase::TwoBranchesRamified,
        BranchCase::TwoBranchesUnramified,
        BranchCase::ThreeBranches,
    ];

    /// Short code used on the command line and in JSON.
    pub fn code(self) -> &'static str {
        match self {
            BranchCase::OneBranchRamified => "1r",
            BranchCase::OneBranchUnramified => "1u",
            BranchCase::TwoBranchesRamified => "2r",
            BranchCase::TwoBranchesUnramified => "2u",
            BranchCase::ThreeBranches => "3",
        }
    }

    pub fn branch_count(self) -> usize {
        match self {
            BranchCase::OneBranchRamified | BranchCase::OneBranchUnramified => 1,
            BranchCase::TwoBranchesRamified | BranchCase::TwoBranchesUnramified => 2,
            BranchCase::ThreeBranches => 3,
        }
    }

    pub fn is_ramified(self) -> bool {
        matches!(self, BranchCase::OneBranchRamified | BranchCase::TwoBranchesRamified)
    }

    /// Ramified or split: the cases that survive over an algebraically closed
    /// residue field.
    pub fn is_geometric(self) -> bool {
        !matches!(self, BranchCase::OneBranchUnramified | BranchCase::TwoBranchesUnramified)
    }
}

impl fmt::Display for BranchCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for BranchCase {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "1r" | "OneBranchRamified" => BranchCase::OneBranchRamified,
            "1u" | "OneBranchUnramified" => BranchCase::OneBranchUnramified,
            "2r" | "TwoBranchesRamified" => BranchCase::TwoBranchesRamified,
            "2u" | "TwoBranchesUnramified" => BranchCase::TwoBranchesUnramified,
            "3" | "ThreeBranches" => BranchCase::ThreeBranches,
            other => return Err(Error::Parse(format!("unknown branch case {other:?}"))),
        })
    }
}

impl Serialize for BranchCase {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.code())
    }
}

impl<'de> Deserialize<'de> for BranchCase {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Coordinates of an element of `A` with respect to the fixed basis.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlgebraElement {
    pub coords: [TruncatedSeries; 3],
}

impl AlgebraElement {
    pub fn new(coords: [TruncatedSeries; 3]) -> Self {
        AlgebraElement { coords }
    }

    pub fn zero(cfg: RingConfig) -> Self {
        let z = TruncatedSeries::zero(cfg);
        AlgebraElement { coords: [z.clone(), z.clone(), z] }
    }

    pub fn basis(cfg: RingConfig, i: usize) -> Self {
        let mut x = Self::zero(cfg);
        x.coords[i] = TruncatedSeries::one(cfg);
        x
    }

    /// Integer coordinates, each given low degree first.
    pub fn from_coeffs(cfg: RingConfig, coords: [&[i64]; 3]) -> Self {
        AlgebraElement { coords: coords.map(|c| TruncatedSeries::from_coeffs(cfg, c)) }
    }

    pub fn config(&self) -> RingConfig {
        self.coords[0].config()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(TruncatedSeries::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        AlgebraElement { coords: std::array::from_fn(|i| &self.coords[i] + &other.coords[i]) }
    }

    pub fn sub(&self, other: &Self) -> Self {
        AlgebraElement { coords: std::array::from_fn(|i| &self.coords[i] - &other.coords[i]) }
    }

    pub fn neg(&self) -> Self {
        AlgebraElement { coords: std::array::from_fn(|i| -&self.coords[i]) }
    }

    /// Multiplication by a scalar of `D`.
    pub fn scale(&self, a: &TruncatedSeries) -> Self {
        AlgebraElement { coords: std::array::from_fn(|i| &self.coords[i] * a) }
    }

    pub fn scale_int(&self, c: u32) -> Self {
        AlgebraElement { coords: std::array::from_fn(|i| self.coords[i].scale(c)) }
    }

    pub fn shift_up(&self, k: usize) -> Self {
        AlgebraElement { coords: std::array::from_fn(|i| self.coords[i].shift_up(k)) }
    }

    pub fn shift_down(&self, k: usize) -> Self {
        AlgebraElement { coords: std::array::from_fn(|i| self.coords[i].shift_down(k)) }
    }

    /// Smallest `t`-valuation among the coordinates.
    pub fn coord_valuation(&self) -> Valuation {
        self.coords.iter().map(TruncatedSeries::valuation).min().unwrap()
    }
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}; {}; {}]", self.coords[0], self.coords[1], self.coords[2])
    }
}

impl Serialize for AlgebraElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords.serialize(s)
    }
}

/// JSON form of an algebra: the case, the minimal polynomial of the
/// unramified branch and the coefficient ring.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraSpec {
    pub case: BranchCase,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<i64>>,
    pub p: u32,
    pub prec: usize,
}

impl AlgebraSpec {
    pub fn build(&self) -> Result<CubicAlgebra> {
        let cfg = RingConfig::new(self.p, self.prec)?;
        match &self.f {
            Some(f) => CubicAlgebra::with_poly(cfg, self.case, f),
            None => CubicAlgebra::new(cfg, self.case),
        }
    }
}

/// An étale cubic algebra `A` over `D_N` with its multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubicAlgebra {
    config: RingConfig,
    case: BranchCase,
    /// Monic minimal polynomial of `θ`, low degree first (unramified cases).
    poly: Option<Vec<u32>>,
    /// `table[i][j] = b_i * b_j`.
    table: [[AlgebraElement; 3]; 3],
    one: AlgebraElement,
    gram: [[TruncatedSeries; 3]; 3],
}

impl CubicAlgebra {
    /// The algebra of the given case; unramified cases use the smallest
    /// irreducible polynomial in lexicographic coefficient order.
    pub fn new(config: RingConfig, case: BranchCase) -> Result<Self> {
        let poly = match case {
            BranchCase::OneBranchUnramified => Some(smallest_irreducible(config.p, 3)),
            BranchCase::TwoBranchesUnramified => Some(smallest_irreducible(config.p, 2)),
            _ => None,
        };
        Self::build(config, case, poly)
    }

    /// Unramified cases with an explicit monic polynomial `[c0, c1, .., 1]`.
    pub fn with_poly(config: RingConfig, case: BranchCase, f: &[i64]) -> Result<Self> {
        let degree = match case {
            BranchCase::OneBranchUnramified => 3,
            BranchCase::TwoBranchesUnramified => 2,
            _ => {
                return Err(Error::Config(format!("case {case} takes no minimal polynomial")));
            }
        };
        if f.len() != degree + 1 {
            return Err(Error::Config(format!("expected a monic polynomial of degree {degree}")));
        }
        let f: Vec<u32> = f.iter().map(|&c| c.rem_euclid(config.p as i64) as u32).collect();
        if f[degree] != 1 {
            return Err(Error::Config("minimal polynomial must be monic".into()));
        }
        if !is_irreducible_small(&f, config.p) {
            return Err(Error::Config(format!("{f:?} is reducible mod {}", config.p)));
        }
        Self::build(config, case, Some(f))
    }

    fn build(config: RingConfig, case: BranchCase, poly: Option<Vec<u32>>) -> Result<Self> {
        if config.prec < 2 {
            return Err(Error::Config("precision must be at least 2".into()));
        }
        let z = AlgebraElement::zero(config);
        let b = |i| AlgebraElement::basis(config, i);
        let t = TruncatedSeries::t(config);
        let c = |x: i64| TruncatedSeries::constant(config, x);
        let mut table: [[AlgebraElement; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| z.clone()));
        let one;
        match case {
            BranchCase::OneBranchRamified => {
                one = b(0);
                table[0] = [b(0), b(1), b(2)];
                table[1][1] = b(2);
                table[1][2] = b(0).scale(&t);
                table[2][2] = b(1).scale(&t);
            }
            BranchCase::OneBranchUnramified => {
                let f = poly.as_ref().unwrap();
                let (c0, c1, c2) = (f[0] as i64, f[1] as i64, f[2] as i64);
                one = b(0);
                table[0] = [b(0), b(1), b(2)];
                table[1][1] = b(2);
                // θ³ = -c0 - c1 θ - c2 θ²
                table[1][2] = AlgebraElement::new([c(-c0), c(-c1), c(-c2)]);
                // θ⁴ = c2 c0 + (c2 c1 - c0) θ + (c2² - c1) θ²
                table[2][2] = AlgebraElement::new([c(c2 * c0), c(c2 * c1 - c0), c(c2 * c2 - c1)]);
            }
            BranchCase::TwoBranchesRamified => {
                one = b(0).add(&b(2));
                table[0][0] = b(0);
                table[0][1] = b(1);
                table[1][1] = b(0).scale(&t);
                table[2][2] = b(2);
            }
            BranchCase::TwoBranchesUnramified => {
                let f = poly.as_ref().unwrap();
                let (c0, c1) = (f[0] as i64, f[1] as i64);
                one = b(0).add(&b(2));
                table[0][0] = b(0);
                table[0][1] = b(1);
                table[1][1] = AlgebraElement::new([c(-c0), c(-c1), c(0)]);
                table[2][2] = b(2);
            }
            BranchCase::ThreeBranches => {
                one = AlgebraElement::new([c(1), c(1), c(1)]);
                for i in 0..3 {
                    table[i][i] = b(i);
                }
            }
        }
        for i in 0..3 {
            for j in 0..i {
                table[i][j] = table[j][i].clone();
            }
        }
        let zero_series = TruncatedSeries::zero(config);
        let mut alg = CubicAlgebra {
            config,
            case,
            poly,
            table,
            one,
            gram: std::array::from_fn(|_| std::array::from_fn(|_| zero_series.clone())),
        };
        alg.gram = std::array::from_fn(|i| std::array::from_fn(|j| alg.trace_of(&alg.table[i][j].clone())));
        alg.check_structure()?;
        Ok(alg)
    }

    fn check_structure(&self) -> Result<()> {
        let basis: Vec<_> = (0..3).map(|i| self.basis(i)).collect();
        for x in &basis {
            if self.mul(&self.one, x) != *x {
                return Err(Error::Config("multiplication table is not unital".into()));
            }
            for y in &basis {
                for z in &basis {
                    if self.mul(&self.mul(x, y), z) != self.mul(x, &self.mul(y, z)) {
                        return Err(Error::Config("multiplication table is not associative".into()));
                    }
                }
            }
        }
        let expected = self.expected_discriminant_valuation();
        let got = self.gram_determinant().valuation();
        if got != Valuation::Finite(expected) {
            return Err(Error::Config(format!("trace form discriminant has valuation {got}, expected {expected}")));
        }
        Ok(())
    }

    pub fn config(&self) -> RingConfig {
        self.config
    }

    pub fn spec(&self) -> AlgebraSpec {
        AlgebraSpec {
            case: self.case,
            f: self.poly.as_ref().map(|f| f.iter().map(|&c| c as i64).collect()),
            p: self.config.p,
            prec: self.config.prec,
        }
    }

    pub fn case(&self) -> BranchCase {
        self.case
    }

    pub fn p(&self) -> u32 {
        self.config.p
    }

    pub fn prec(&self) -> usize {
        self.config.prec
    }

    pub fn poly(&self) -> Option<&[u32]> {
        self.poly.as_deref()
    }

    pub fn one(&self) -> AlgebraElement {
        self.one.clone()
    }

    pub fn zero(&self) -> AlgebraElement {
        AlgebraElement::zero(self.config)
    }

    pub fn basis(&self, i: usize) -> AlgebraElement {
        AlgebraElement::basis(self.config, i)
    }

    pub fn scalar(&self, a: &TruncatedSeries) -> AlgebraElement {
        self.one.scale(a)
    }

    /// `t^k` as an element of `A`.
    pub fn t_pow(&self, k: usize) -> AlgebraElement {
        self.one.shift_up(k)
    }

    pub fn element(&self, coords: [&[i64]; 3]) -> AlgebraElement {
        AlgebraElement::from_coeffs(self.config, coords)
    }

    /// The uniformizer `τ` of the ramified branch.
    pub fn tau(&self) -> Option<AlgebraElement> {
        self.case.is_ramified().then(|| self.basis(1))
    }

    /// The residue generator `θ` of the unramified branch.
    pub fn theta(&self) -> Option<AlgebraElement> {
        (!self.case.is_ramified() && self.case != BranchCase::ThreeBranches).then(|| self.basis(1))
    }

    /// Primitive idempotents of `A`, one per branch, in branch order.
    pub fn idempotents(&self) -> Vec<AlgebraElement> {
        match self.case {
            BranchCase::OneBranchRamified | BranchCase::OneBranchUnramified => vec![self.one()],
            BranchCase::TwoBranchesRamified | BranchCase::TwoBranchesUnramified => {
                vec![self.basis(0), self.basis(2)]
            }
            BranchCase::ThreeBranches => (0..3).map(|i| self.basis(i)).collect(),
        }
    }

    pub fn mul(&self, x: &AlgebraElement, y: &AlgebraElement) -> AlgebraElement {
        let mut acc = self.zero();
        for i in 0..3 {
            if x.coords[i].is_zero() {
                continue;
            }
            for j in 0..3 {
                if y.coords[j].is_zero() {
                    continue;
                }
                let s = &x.coords[i] * &y.coords[j];
                if s.is_zero() {
                    continue;
                }
                for k in 0..3 {
                    let c = &self.table[i][j].coords[k];
                    if c.is_zero() {
                        continue;
                    }
                    acc.coords[k] += &(&s * c);
                }
            }
        }
        acc
    }

    /// Product that checks both operands belong to this algebra's configuration.
    pub fn checked_mul(&self, x: &AlgebraElement, y: &AlgebraElement) -> Result<AlgebraElement> {
        if x.config() != self.config || y.config() != self.config {
            return Err(Error::Config("element does not belong to this algebra".into()));
        }
        Ok(self.mul(x, y))
    }

    pub fn pow(&self, x: &AlgebraElement, e: u32) -> AlgebraElement {
        let mut acc = self.one();
        for _ in 0..e {
            acc = self.mul(&acc, x);
        }
        acc
    }

    /// Columns are `x * b_j` in basis coordinates.
    pub fn mult_matrix(&self, x: &AlgebraElement) -> [[TruncatedSeries; 3]; 3] {
        let cols: [AlgebraElement; 3] = std::array::from_fn(|j| self.mul(x, &self.basis(j)));
        std::array::from_fn(|i| std::array::from_fn(|j| cols[j].coords[i].clone()))
    }

    /// Trace of multiplication by `x`.
    pub fn trace_of(&self, x: &AlgebraElement) -> TruncatedSeries {
        let mut tr = TruncatedSeries::zero(self.config);
        for j in 0..3 {
            tr += &self.mul(x, &self.basis(j)).coords[j];
        }
        tr
    }

    /// `Tr(b_i b_j)`.
    pub fn gram(&self) -> &[[TruncatedSeries; 3]; 3] {
        &self.gram
    }

    pub fn gram_determinant(&self) -> TruncatedSeries {
        det3(&self.gram)
    }

    /// Valuation of the discriminant of `A` over `D`.
    pub fn expected_discriminant_valuation(&self) -> u32 {
        match self.case {
            BranchCase::OneBranchRamified => 2,
            BranchCase::TwoBranchesRamified => 1,
            _ => 0,
        }
    }

    /// Ramification index of each branch.
    pub fn ramification(&self) -> Vec<u32> {
        match self.case {
            BranchCase::OneBranchRamified => vec![3],
            BranchCase::OneBranchUnramified => vec![1],
            BranchCase::TwoBranchesRamified => vec![2, 1],
            BranchCase::TwoBranchesUnramified => vec![1, 1],
            BranchCase::ThreeBranches => vec![1, 1, 1],
        }
    }

    /// Degree of the residue field of each branch over `F_p`.
    pub fn residue_degrees(&self) -> Vec<usize> {
        match self.case {
            BranchCase::OneBranchRamified => vec![1],
            BranchCase::OneBranchUnramified => vec![3],
            BranchCase::TwoBranchesRamified => vec![1, 1],
            BranchCase::TwoBranchesUnramified => vec![2, 1],
            BranchCase::ThreeBranches => vec![1, 1, 1],
        }
    }

    /// Basis indices whose constant terms coordinatize the residue field of
    /// each branch; every other basis direction lies in the radical of `A`
    /// modulo `t`.
    pub fn residue_coordinates(&self) -> Vec<Vec<usize>> {
        match self.case {
            BranchCase::OneBranchRamified => vec![vec![0]],
            BranchCase::OneBranchUnramified => vec![vec![0, 1, 2]],
            BranchCase::TwoBranchesRamified => vec![vec![0], vec![2]],
            BranchCase::TwoBranchesUnramified => vec![vec![0, 1], vec![2]],
            BranchCase::ThreeBranches => vec![vec![0], vec![1], vec![2]],
        }
    }

    /// Valuations of `x` on each branch of `A`, in branch order.
    pub fn multival(&self, x: &AlgebraElement) -> Vec<Valuation> {
        let v = |i: usize| x.coords[i].valuation();
        match self.case {
            BranchCase::OneBranchRamified => {
                vec![v(0).affine(3, 0).min(v(1).affine(3, 1)).min(v(2).affine(3, 2))]
            }
            BranchCase::OneBranchUnramified => vec![v(0).min(v(1)).min(v(2))],
            BranchCase::TwoBranchesRamified => {
                vec![v(0).affine(2, 0).min(v(1).affine(2, 1)), v(2)]
            }
            BranchCase::TwoBranchesUnramified => vec![v(0).min(v(1)), v(2)],
            BranchCase::ThreeBranches => vec![v(0), v(1), v(2)],
        }
    }

    pub fn is_unit_elem(&self, x: &AlgebraElement) -> bool {
        self.multival(x).iter().all(|&v| v == Valuation::Finite(0))
    }

    /// An element with valuation `n` on branch `branch` and zero component
    /// on the other branches.
    pub fn branch_power(&self, branch: usize, n: u32) -> AlgebraElement {
        let n = n as usize;
        match (self.case, branch) {
            (BranchCase::OneBranchRamified, 0) => self.basis(n % 3).shift_up(n / 3),
            (BranchCase::TwoBranchesRamified, 0) => {
                let b = if n % 2 == 0 { 0 } else { 1 };
                self.basis(b).shift_up(n / 2)
            }
            (BranchCase::OneBranchUnramified, 0) => self.one().shift_up(n),
            (_, i) => self.idempotents()[i].shift_up(n),
        }
    }

    /// Inverse of a unit of `A`.
    pub fn inv(&self, x: &AlgebraElement) -> Result<AlgebraElement> {
        if !self.is_unit_elem(x) {
            return Err(Error::NonUnit(format!("{x:?} is not a unit of A")));
        }
        let m = self.mult_matrix(x);
        let one = self.one();
        let sol = solve_unimodular(&m, &one.coords)
            .ok_or_else(|| Error::NonUnit(format!("{x:?} has a singular multiplication map")))?;
        Ok(AlgebraElement::new(sol))
    }
}

/// Determinant of a 3×3 matrix over `D_N`.
pub fn det3(m: &[[TruncatedSeries; 3]; 3]) -> TruncatedSeries {
    let minor = |r1: usize, r2: usize, c1: usize, c2: usize| &(&m[r1][c1] * &m[r2][c2]) - &(&m[r1][c2] * &m[r2][c1]);
    let a = &m[0][0] * &minor(1, 2, 1, 2);
    let b = &m[0][1] * &minor(1, 2, 0, 2);
    let c = &m[0][2] * &minor(1, 2, 0, 1);
    &(&a - &b) + &c
}

/// Adjugate of a 3×3 matrix over `D_N`: `adj(m) * m = det(m) * I`.
pub fn adjugate3(m: &[[TruncatedSeries; 3]; 3]) -> [[TruncatedSeries; 3]; 3] {
    std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            // cofactor of entry (j, i)
            let rows: Vec<usize> = (0..3).filter(|&r| r != j).collect();
            let cols: Vec<usize> = (0..3).filter(|&c| c != i).collect();
            let d = &(&m[rows[0]][cols[0]] * &m[rows[1]][cols[1]]) - &(&m[rows[0]][cols[1]] * &m[rows[1]][cols[0]]);
            if (i + j) % 2 == 0 {
                d
            } else {
                -&d
            }
        })
    })
}

/// Solves `m x = rhs` for a matrix with unit determinant.
pub fn solve_unimodular(m: &[[TruncatedSeries; 3]; 3], rhs: &[TruncatedSeries; 3]) -> Option<[TruncatedSeries; 3]> {
    let mut a: Vec<Vec<TruncatedSeries>> = (0..3)
        .map(|i| {
            let mut row = m[i].to_vec();
            row.push(rhs[i].clone());
            row
        })
        .collect();
    for col in 0..3 {
        let pivot = (col..3).find(|&r| a[r][col].is_unit())?;
        a.swap(col, pivot);
        let inv = a[col][col].inv().ok()?;
        for c in col..4 {
            a[col][c] = &a[col][c] * &inv;
        }
        for r in 0..3 {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for c in col..4 {
                    let d = &factor * &a[col][c];
                    a[r][c] -= &d;
                }
            }
        }
    }
    Some(std::array::from_fn(|i| a[i][3].clone()))
}

fn poly_eval(f: &[u32], x: u32, p: u32) -> u32 {
    let p64 = p as u64;
    f.iter().rev().fold(0u64, |acc, &c| (acc * x as u64 + c as u64) % p64) as u32
}

/// Irreducibility for degree 2 and 3: no roots in `F_p`.
fn is_irreducible_small(f: &[u32], p: u32) -> bool {
    (0..p).all(|x| poly_eval(f, x, p) != 0)
}

/// The monic irreducible polynomial of the given degree whose coefficient
/// vector `[c0, c1, ..]` is lexicographically smallest.
pub fn smallest_irreducible(p: u32, degree: usize) -> Vec<u32> {
    let total = (p as u64).pow(degree as u32);
    for code in 0..total {
        // c0 is the most significant digit
        let mut f = vec![0u32; degree + 1];
        let mut rest = code;
        for i in (0..degree).rev() {
            f[i] = (rest % p as u64) as u32;
            rest /= p as u64;
        }
        f[degree] = 1;
        if is_irreducible_small(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials of every degree exist over F_p")
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn alg(case: BranchCase) -> CubicAlgebra {
        CubicAlgebra::new(RingConfig::new(5, 8).unwrap(), case).unwrap()
    }

    #[test]
    fn defining_relations() {
        let a = alg(BranchCase::OneBranchRamified);
        let tau = a.tau().unwrap();
        let tau2 = a.mul(&tau, &tau);
        assert_eq!(a.mul(&tau, &tau2), a.t_pow(1));

        let a3 = alg(BranchCase::ThreeBranches);
        assert!(a3.mul(&a3.basis(0), &a3.basis(1)).is_zero());

        let a2 = alg(BranchCase::TwoBranchesRamified);
        let tau = a2.tau().unwrap();
        assert_eq!(a2.mul(&tau, &tau), a2.basis(0).shift_up(1));
    }

    #[test]
    fn default_polynomials() {
        assert_eq!(smallest_irreducible(5, 3), vec![1, 0, 1, 1]);
        assert_eq!(smallest_irreducible(5, 2), vec![1, 1, 1]);
        let a = alg(BranchCase::OneBranchUnramified);
        let th = a.theta().unwrap();
        // θ³ + θ² + 1 = 0
        let f = a.mul(&th, &a.mul(&th, &th)).add(&a.mul(&th, &th)).add(&a.one());
        assert!(f.is_zero());
    }

    #[test]
    fn explicit_polynomial_is_validated() {
        let cfg = RingConfig::new(7, 6).unwrap();
        assert!(CubicAlgebra::with_poly(cfg, BranchCase::TwoBranchesUnramified, &[1, 0, 1]).is_ok());
        // x² - 1 splits
        assert!(CubicAlgebra::with_poly(cfg, BranchCase::TwoBranchesUnramified, &[-1, 0, 1]).is_err());
        assert!(CubicAlgebra::with_poly(cfg, BranchCase::ThreeBranches, &[1, 0, 1]).is_err());
    }

    #[test]
    fn traces() {
        for case in BranchCase::ALL {
            let a = alg(case);
            assert_eq!(a.trace_of(&a.one()), TruncatedSeries::constant(a.config(), 3));
        }
        let a = alg(BranchCase::OneBranchRamified);
        assert!(a.trace_of(&a.tau().unwrap()).is_zero());
        let a = alg(BranchCase::ThreeBranches);
        assert!(a.trace_of(&a.basis(0)).is_one());
    }

    #[test]
    fn discriminant_valuations() {
        let expected = [2, 0, 1, 0, 0];
        for (case, e) in BranchCase::ALL.into_iter().zip(expected) {
            let a = alg(case);
            assert_eq!(a.gram_determinant().valuation(), Valuation::Finite(e), "{case}");
        }
        // -27 t² for x³ - t
        let a = alg(BranchCase::OneBranchRamified);
        assert_eq!(a.gram_determinant(), TruncatedSeries::monomial(a.config(), -27, 2));
    }

    #[test]
    fn multivaluations() {
        use Valuation::{Finite, Infinite};
        let a = alg(BranchCase::OneBranchRamified);
        assert_eq!(a.multival(&a.t_pow(1)), vec![Finite(3)]);
        let a3 = alg(BranchCase::ThreeBranches);
        let x = a3.element([&[0, 1], &[0, 0, 1], &[]]);
        assert_eq!(a3.multival(&x), vec![Finite(1), Finite(2), Infinite]);
        let a2 = alg(BranchCase::TwoBranchesRamified);
        let alpha = a2.element([&[0, 1], &[1], &[]]);
        assert_eq!(a2.multival(&alpha)[0], Finite(1));
        assert_eq!(a2.multival(&alpha.shift_up(1))[0], Finite(3));
    }

    #[test]
    fn units() {
        let a = alg(BranchCase::OneBranchRamified);
        assert!(a.is_unit_elem(&a.one()));
        assert!(!a.is_unit_elem(&a.tau().unwrap()));
        let u = alg(BranchCase::OneBranchUnramified);
        let th = u.theta().unwrap();
        assert!(u.is_unit_elem(&th));
        let inv = u.inv(&th).unwrap();
        assert_eq!(u.mul(&th, &inv), u.one());
        assert!(a.inv(&a.tau().unwrap()).is_err());
    }

    #[test]
    fn branch_powers_have_the_requested_valuation() {
        for case in BranchCase::ALL {
            let a = alg(case);
            for b in 0..case.branch_count() {
                for n in 0..5 {
                    let x = a.branch_power(b, n);
                    let mv = a.multival(&x);
                    for (i, v) in mv.iter().enumerate() {
                        if i == b {
                            assert_eq!(*v, Valuation::Finite(n), "{case} branch {b}");
                        } else {
                            assert_eq!(*v, Valuation::Infinite);
                        }
                    }
                }
            }
        }
    }

    fn element(p: u32, n: usize) -> impl Strategy<Value = [Vec<i64>; 3]> {
        let c = proptest::collection::vec(0..p as i64, n);
        [c.clone(), c.clone(), c]
    }

    proptest! {
        #![proptest_config(ProptestConfig { cases: 64, rng_seed: proptest::test_runner::RngSeed::Fixed(11), ..ProptestConfig::default() })]

        #[test]
        fn algebra_laws(x in element(5, 6), y in element(5, 6), z in element(5, 6), s in proptest::collection::vec(0..5i64, 6)) {
            let cfg = RingConfig::new(5, 6).unwrap();
            for case in BranchCase::ALL {
                let a = CubicAlgebra::new(cfg, case).unwrap();
                let x = a.element([&x[0], &x[1], &x[2]]);
                let y = a.element([&y[0], &y[1], &y[2]]);
                let z = a.element([&z[0], &z[1], &z[2]]);
                prop_assert_eq!(a.mul(&a.mul(&x, &y), &z), a.mul(&x, &a.mul(&y, &z)));
                prop_assert_eq!(a.mul(&x, &y), a.mul(&y, &x));
                prop_assert_eq!(a.mul(&a.one(), &x), x.clone());
                let s = TruncatedSeries::from_coeffs(cfg, &s);
                prop_assert_eq!(a.trace_of(&x.scale(&s).add(&y)), &(&s * &a.trace_of(&x)) + &a.trace_of(&y));
                let (mx, my) = (a.multival(&x), a.multival(&y));
                let mxy = a.multival(&a.mul(&x, &y));
                let e = a.ramification();
                for b in 0..mx.len() {
                    if let (Valuation::Finite(u), Valuation::Finite(v)) = (mx[b], my[b]) {
                        // per-branch precision: N * e
                        if u + v < 6 * e[b] - 2 {
                            prop_assert_eq!(mxy[b], Valuation::Finite(u + v));
                        }
                    }
                }
            }
        }
    }
}
