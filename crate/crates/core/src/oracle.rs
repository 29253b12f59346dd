//! Exact matrix representations used as independent ground truth.
//!
//! The tensor representation acts on `E^{⊗d}` with `E = Q^2`; it is the
//! defining representation of the Schur algebra but has dimension `2^d`. The
//! weight representation is the direct sum of the simple modules of highest
//! weights `d, d-2, ...`; it is much smaller and its faithfulness is itself
//! checked (rank of the basis images) rather than assumed.

use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::exactmath::{binom, Rational};
use crate::linalg::{self, min_poly_from_powers, Poly, SparseVec};
use crate::schur::{self, SchurContext};
use crate::straighten::{Element, Flavor, Generator, NormalMonomial, Rules};

/// Dense square matrix of exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    n: usize,
    entries: Vec<Rational>,
}

impl ExactMatrix {
    pub fn zeros(n: usize) -> Self {
        ExactMatrix { n, entries: vec![Rational::zero(); n * n] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = ExactMatrix::zeros(n);
        for i in 0..n {
            m.entries[i * n + i] = Rational::one();
        }
        m
    }

    pub fn diagonal(diag: Vec<Rational>) -> Self {
        let n = diag.len();
        let mut m = ExactMatrix::zeros(n);
        for (i, q) in diag.into_iter().enumerate() {
            m.entries[i * n + i] = q;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let n = rows.len();
        let mut m = ExactMatrix::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), n, "matrix must be square");
            for (j, v) in row.iter().enumerate() {
                m.entries[i * n + j] = Rational::from_integer((*v).into());
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, q: Rational) {
        self.entries[i * self.n + j] = q;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|q| q.is_integer())
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.n).all(|i| (0..self.n).all(|j| i == j || self.get(i, j).is_zero()))
    }

    pub fn diag(&self) -> Vec<Rational> {
        (0..self.n).map(|i| self.get(i, i).clone()).collect()
    }

    pub fn scale(&self, q: &Rational) -> Self {
        ExactMatrix { n: self.n, entries: self.entries.iter().map(|x| x * q).collect() }
    }

    /// `self += q * other`
    pub fn add_scaled(&mut self, q: &Rational, other: &ExactMatrix) {
        assert_eq!(self.n, other.n);
        for (x, y) in self.entries.iter_mut().zip(&other.entries) {
            if !y.is_zero() {
                *x += q * y;
            }
        }
    }

    /// Multiplies each column `j` by `diag[j]`.
    pub fn scale_columns(&self, diag: &[Rational]) -> Self {
        let n = self.n;
        let mut out = self.clone();
        for row in out.entries.chunks_mut(n) {
            for (x, q) in row.iter_mut().zip(diag) {
                if !x.is_zero() {
                    *x *= q;
                }
            }
        }
        out
    }

    pub fn mul(&self, rhs: &ExactMatrix) -> ExactMatrix {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        let n = self.n;
        let rhs_rows: Vec<Vec<(usize, &Rational)>> = (0..n)
            .map(|k| (0..n).map(|j| (j, rhs.get(k, j))).filter(|(_, q)| !q.is_zero()).collect())
            .collect();
        let mut out = ExactMatrix::zeros(n);
        for (lhs_row, out_row) in self.entries.chunks(n).zip(out.entries.chunks_mut(n)) {
            for (a, row) in lhs_row.iter().zip(&rhs_rows) {
                if a.is_zero() {
                    continue;
                }
                for (j, b) in row {
                    out_row[*j] += a * *b;
                }
            }
        }
        out
    }

    pub fn sub(&self, rhs: &ExactMatrix) -> ExactMatrix {
        let mut out = self.clone();
        out.add_scaled(&-Rational::one(), rhs);
        out
    }

    /// Entries as a sparse vector indexed by `i * n + j`.
    pub fn flatten(&self) -> SparseVec {
        self.entries.iter().enumerate().filter(|(_, q)| !q.is_zero()).map(|(k, q)| (k, q.clone())).collect()
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| crate::exactmath::fmt_rational(self.get(i, j))).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RepKind {
    Tensor,
    Weight,
}

impl RepKind {
    pub fn name(self) -> &'static str {
        match self {
            RepKind::Tensor => "tensor",
            RepKind::Weight => "weight",
        }
    }
}

/// Matrices for `e, f, H1, H2` in a representation of `B_d`, with cached
/// divided powers.
pub struct Rep {
    pub kind: RepKind,
    pub d: u32,
    pub e: ExactMatrix,
    pub f: ExactMatrix,
    pub h1: ExactMatrix,
    pub h2: ExactMatrix,
    e_div: Mutex<Vec<Arc<ExactMatrix>>>,
    f_div: Mutex<Vec<Arc<ExactMatrix>>>,
}

impl Rep {
    fn new(kind: RepKind, d: u32, e: ExactMatrix, f: ExactMatrix, h1: ExactMatrix, h2: ExactMatrix) -> Self {
        let id = Arc::new(ExactMatrix::identity(e.dim()));
        Rep {
            kind,
            d,
            e,
            f,
            h1,
            h2,
            e_div: Mutex::new(vec![id.clone()]),
            f_div: Mutex::new(vec![id]),
        }
    }

    pub fn dim(&self) -> usize {
        self.e.dim()
    }

    fn divided(cache: &Mutex<Vec<Arc<ExactMatrix>>>, gen: &ExactMatrix, m: u32) -> Arc<ExactMatrix> {
        let mut cache = cache.lock().unwrap();
        while cache.len() <= m as usize {
            let k = cache.len();
            let prev = cache[k - 1].clone();
            let next = prev.mul(gen).scale(&Rational::new(BigInt::one(), BigInt::from(k)));
            cache.push(Arc::new(next));
        }
        cache[m as usize].clone()
    }

    /// `e^m / m!`
    pub fn e_divided(&self, m: u32) -> Arc<ExactMatrix> {
        Rep::divided(&self.e_div, &self.e, m)
    }

    /// `f^m / m!`
    pub fn f_divided(&self, m: u32) -> Arc<ExactMatrix> {
        Rep::divided(&self.f_div, &self.f, m)
    }
}

/// `rho_d` on `E^{⊗d}`. Basis words `w in {1,2}^d` are ordered
/// lexicographically (letter 2 is bit 1, first letter most significant).
pub fn tensor_rep(d: u32) -> Rep {
    let n = 1usize << d;
    let (mut e, mut f) = (ExactMatrix::zeros(n), ExactMatrix::zeros(n));
    let mut twos = Vec::with_capacity(n);
    for w in 0..n {
        twos.push(w.count_ones() as i64);
        for pos in 0..d {
            let bit = 1usize << pos;
            if w & bit != 0 {
                // e turns a letter 2 into a 1
                e.set(w & !bit, w, Rational::one());
            } else {
                f.set(w | bit, w, Rational::one());
            }
        }
    }
    let h2 = ExactMatrix::diagonal(twos.iter().map(|&t| Rational::from_integer(t.into())).collect());
    let h1 = ExactMatrix::diagonal(twos.iter().map(|&t| Rational::from_integer((d as i64 - t).into())).collect());
    Rep::new(RepKind::Tensor, d, e, f, h1, h2)
}

/// Direct sum of the simple modules with highest weights `m = d - 2k`. In the
/// block for `m`, with basis `v_0..v_m`: `f v_j = (j+1) v_{j+1}`,
/// `e v_j = (m-j+1) v_{j-1}`, `H2 v_j = (k+j) v_j`, `H1 = d - H2`.
pub fn weight_rep(d: u32) -> Rep {
    let blocks: Vec<(i64, i64)> = (0..=d as i64 / 2).map(|k| (d as i64 - 2 * k, k)).collect();
    let n: usize = blocks.iter().map(|(m, _)| (*m + 1) as usize).sum();
    let (mut e, mut f) = (ExactMatrix::zeros(n), ExactMatrix::zeros(n));
    let mut h2 = Vec::with_capacity(n);
    let mut offset = 0;
    for &(m, k) in &blocks {
        for j in 0..=m {
            let idx = offset + j as usize;
            h2.push(k + j);
            if j < m {
                f.set(idx + 1, idx, Rational::from_integer((j + 1).into()));
            }
            if j > 0 {
                e.set(idx - 1, idx, Rational::from_integer((m - j + 1).into()));
            }
        }
        offset += (m + 1) as usize;
    }
    let h1 = ExactMatrix::diagonal(h2.iter().map(|&t| Rational::from_integer((d as i64 - t).into())).collect());
    let h2 = ExactMatrix::diagonal(h2.into_iter().map(|t| Rational::from_integer(t.into())).collect());
    Rep::new(RepKind::Weight, d, e, f, h1, h2)
}

pub fn rep(kind: RepKind, d: u32) -> Rep {
    match kind {
        RepKind::Tensor => tensor_rep(d),
        RepKind::Weight => weight_rep(d),
    }
}

fn binom_diag(diag: &[Rational], b: u32) -> Vec<Rational> {
    diag.iter()
        .map(|q| {
            assert!(q.is_integer(), "Cartan eigenvalues are integers");
            Rational::from_integer(binom(&q.to_integer(), b as i64))
        })
        .collect()
}

/// Image of one normal-order monomial.
pub fn eval_monomial(m: &NormalMonomial, flavor: Flavor, rep: &Rep) -> ExactMatrix {
    let (left, right, primary, alternate) = match flavor {
        Flavor::Fhe => (rep.f_divided(m.a), rep.e_divided(m.c), &rep.h2, &rep.h1),
        Flavor::Ehf => (rep.e_divided(m.a), rep.f_divided(m.c), &rep.h1, &rep.h2),
    };
    debug_assert!(primary.is_diagonal() && alternate.is_diagonal());
    let mut middle = binom_diag(&primary.diag(), m.b);
    if m.alt > 0 {
        for (x, y) in middle.iter_mut().zip(binom_diag(&alternate.diag(), m.alt)) {
            *x *= y;
        }
    }
    left.scale_columns(&middle).mul(&right)
}

/// Image of an element; binomials of the diagonal Cartan matrices are taken
/// entrywise.
pub fn eval_element(x: &Element, rep: &Rep) -> ExactMatrix {
    let mut out = ExactMatrix::zeros(rep.dim());
    for (m, q) in x.terms() {
        out.add_scaled(q, &eval_monomial(m, x.flavor(), rep));
    }
    out
}

/// Rank over `Q` of the images of `monos`, viewed as vectors of length `n^2`.
pub fn rank_of_images(monos: &[NormalMonomial], flavor: Flavor, rep: &Rep) -> usize {
    let rows: Vec<SparseVec> = monos.par_iter().map(|m| eval_monomial(m, flavor, rep).flatten()).collect();
    linalg::rank(rows)
}

pub fn matrix_min_poly(m: &ExactMatrix) -> Poly {
    let n = m.dim();
    let mut power = ExactMatrix::identity(n);
    min_poly_from_powers(
        |k| {
            if k > 0 {
                power = power.mul(m);
            }
            power.flatten()
        },
        n,
    )
    .expect("Cayley-Hamilton bounds the degree by n")
}

/// `prod_{i=0}^{d} (T - i)`, the minimal polynomial of `H1` and of `H2`.
pub fn expected_cartan_min_poly(d: u32) -> Poly {
    Poly::from_roots((0..=d as i64).map(|i| Rational::from_integer(i.into())))
}

/// `(T+d)(T+d-2)...(T-d)`, the minimal polynomial of `h`.
pub fn expected_h_min_poly(d: u32) -> Poly {
    Poly::from_roots((0..=d as i64).map(|k| Rational::from_integer((d as i64 - 2 * k).into())))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleChoice {
    Tensor,
    Weight,
    Both,
}

impl OracleChoice {
    pub fn kinds(self) -> Vec<RepKind> {
        match self {
            OracleChoice::Tensor => vec![RepKind::Tensor],
            OracleChoice::Weight => vec![RepKind::Weight],
            OracleChoice::Both => vec![RepKind::Tensor, RepKind::Weight],
        }
    }
}

impl std::str::FromStr for OracleChoice {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "tensor" => Ok(OracleChoice::Tensor),
            "weight" => Ok(OracleChoice::Weight),
            "both" => Ok(OracleChoice::Both),
            other => Err(format!("unknown oracle `{other}` (expected tensor, weight or both)")),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct VerifyReport {
    pub d: u32,
    pub checks: Vec<Check>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn push(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            write!(f, "[{}] {}", if c.passed { "PASS" } else { "FAIL" }, c.name)?;
            if !c.detail.is_empty() {
                write!(f, ": {}", c.detail)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Every defining relation, evaluated without truncation, is zero in `rep`.
pub fn relations_hold_in(rep: &Rep, flavor: Flavor) -> Result<(), String> {
    let failing: Vec<String> = schur::defining_relations(rep.d, flavor)
        .into_par_iter()
        .filter(|r| !eval_element(&r.residual, rep).is_zero())
        .map(|r| r.name)
        .collect();
    if failing.is_empty() {
        Ok(())
    } else {
        Err(failing.join("; "))
    }
}

/// Checks `eval(x * y) = eval(x) eval(y)` for every ordered pair of basis
/// elements, using products from the symbolic structure table.
pub fn products_agree(table: &schur::StructureTable, rep: &Rep) -> Result<(), String> {
    let images: Vec<ExactMatrix> = table.basis.par_iter().map(|m| eval_monomial(m, table.flavor, rep)).collect();
    let n = table.len();
    let bad: Vec<(usize, usize)> = (0..n * n)
        .into_par_iter()
        .filter_map(|idx| {
            let (i, j) = (idx / n, idx % n);
            let mut lhs = ExactMatrix::zeros(rep.dim());
            for (k, q) in table.entry(i, j) {
                lhs.add_scaled(q, &images[k.to_owned()]);
            }
            (lhs != images[i].mul(&images[j])).then_some((i, j))
        })
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        let shown: Vec<String> = bad
            .iter()
            .take(5)
            .map(|(i, j)| format!("{} * {}", table.basis[*i].render(table.flavor), table.basis[*j].render(table.flavor)))
            .collect();
        Err(format!("{} of {} products differ, e.g. {}", bad.len(), n * n, shown.join(", ")))
    }
}

/// Runs the oracle-backed verification for `B_d` with the chosen
/// representations.
pub fn verify_suite(d: u32, oracle: OracleChoice) -> VerifyReport {
    verify_suite_with(d, oracle, Rules::default())
}

pub fn verify_suite_with(d: u32, oracle: OracleChoice, rules: Rules) -> VerifyReport {
    let mut report = VerifyReport { d, checks: Vec::new() };
    let dim = schur::dimension(d);
    let flavors = [Flavor::Fhe, Flavor::Ehf];

    let tables: Vec<schur::StructureTable> = flavors
        .iter()
        .map(|&fl| schur::structure_constants_with(&SchurContext::new(d, fl), rules))
        .collect();
    for t in &tables {
        let ok = t.is_integral();
        report.push(format!("structure constants integral ({})", t.flavor.name()), ok, "");
    }
    let sym_ok = tables[0].symmetry() == tables[1];
    report.push("symmetry exchanges fhe and ehf tables", sym_ok, "");

    for fl in flavors {
        let ctx = SchurContext::new(d, fl);
        let rel = schur::check_relations(&ctx);
        let failed: Vec<&str> = rel.failures().map(|r| r.name.as_str()).collect();
        report.push(format!("defining relations normalize to zero ({})", fl.name()), failed.is_empty(), failed.join("; "));
        report.push(format!("relations of S(2,{}) hold in B_{d} ({})", d + 2, fl.name()), schur::quotient_map_check(&ctx), "");
    }

    let ctx = SchurContext::fhe(d);
    let expected = [
        ("H1", Generator::H1, expected_cartan_min_poly(d)),
        ("H2", Generator::H2, expected_cartan_min_poly(d)),
        ("h", Generator::H, expected_h_min_poly(d)),
    ];
    for (name, g, want) in &expected {
        let got = schur::min_poly_with(&ctx.generator(*g), &ctx, rules);
        let ok = &got == want;
        report.push(format!("symbolic min poly of {name}"), ok, if ok { String::new() } else { format!("got {got}, want {want}") });
    }

    for kind in oracle.kinds() {
        let rep = rep(kind, d);
        let tag = kind.name();
        let mut sum = rep.h1.clone();
        sum.add_scaled(&Rational::one(), &rep.h2);
        let ok = sum == ExactMatrix::identity(rep.dim()).scale(&Rational::from_integer(d.into()));
        report.push(format!("{tag}: H1 + H2 = d"), ok, "");

        let integral = (0..=d).all(|a| rep.e_divided(a).is_integral() && rep.f_divided(a).is_integral());
        report.push(format!("{tag}: divided powers e^(a), f^(a) integral for a <= d"), integral, "");

        for fl in flavors {
            let res = relations_hold_in(&rep, fl);
            report.push(format!("{tag}: relations hold as matrices ({})", fl.name()), res.is_ok(), res.err().unwrap_or_default());
        }

        for fl in flavors {
            let r = rank_of_images(&schur::basis(&SchurContext::new(d, fl)), fl, &rep);
            report.push(
                format!("{tag}: rank of basis images = {dim} ({})", fl.name()),
                r == dim,
                if r == dim { String::new() } else { format!("rank {r}") },
            );
        }

        for t in &tables {
            let res = products_agree(t, &rep);
            report.push(format!("{tag}: symbolic products match matrix products ({})", t.flavor.name()), res.is_ok(), res.err().unwrap_or_default());
        }

        for (name, g, want) in &expected {
            let m = eval_element(&Element::generator(Flavor::Fhe, *g), &rep);
            let got = matrix_min_poly(&m);
            let ok = &got == want;
            report.push(format!("{tag}: matrix min poly of {name}"), ok, if ok { String::new() } else { format!("got {got}, want {want}") });
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rat;
    use crate::straighten::Mode;

    #[test]
    fn tensor_d1_matches_canonical_matrices() {
        let r = tensor_rep(1);
        assert_eq!(r.e, ExactMatrix::from_rows(&[vec![0, 1], vec![0, 0]]));
        assert_eq!(r.f, ExactMatrix::from_rows(&[vec![0, 0], vec![1, 0]]));
        assert_eq!(r.h1, ExactMatrix::from_rows(&[vec![1, 0], vec![0, 0]]));
        assert_eq!(r.h2, ExactMatrix::from_rows(&[vec![0, 0], vec![0, 1]]));
    }

    #[test]
    fn tensor_d0_and_d2() {
        let r = tensor_rep(0);
        assert_eq!(r.dim(), 1);
        assert!(r.e.is_zero() && r.f.is_zero() && r.h1.is_zero() && r.h2.is_zero());
        let r = tensor_rep(2);
        assert_eq!(r.h2.diag(), vec![rat(0), rat(1), rat(1), rat(2)]);
    }

    #[test]
    fn weight_reps() {
        let w = weight_rep(1);
        let t = tensor_rep(1);
        // single block m = 1; v_0 has H2 = 0, like the first tensor basis vector
        assert_eq!(w.e, t.e);
        assert_eq!(w.f, t.f);
        assert_eq!(w.h2, t.h2);
        assert_eq!(weight_rep(2).dim(), 4);
        for d in 0..=10 {
            let w = weight_rep(d);
            let lhs = w.e.mul(&w.f).sub(&w.f.mul(&w.e));
            assert_eq!(lhs, w.h1.sub(&w.h2), "d={d}");
        }
    }

    #[test]
    fn eval_examples() {
        let r = tensor_rep(1);
        assert_eq!(eval_element(&Element::one(Flavor::Fhe), &r), ExactMatrix::identity(2));
        let h2 = Element::generator(Flavor::Fhe, Generator::H2);
        assert_eq!(eval_element(&h2, &r), ExactMatrix::from_rows(&[vec![0, 0], vec![0, 1]]));
        let r2 = tensor_rep(2);
        let m = eval_monomial(&NormalMonomial::new(1, 1, 1), Flavor::Fhe, &r2);
        let expected = eval_monomial(&NormalMonomial::new(0, 2, 0), Flavor::Fhe, &r2).scale(&rat(2));
        assert_eq!(m, expected);
    }

    #[test]
    fn ranks() {
        let basis1 = schur::basis(&SchurContext::fhe(1));
        assert_eq!(rank_of_images(&basis1, Flavor::Fhe, &tensor_rep(1)), 4);
        let basis2 = schur::basis(&SchurContext::fhe(2));
        assert_eq!(rank_of_images(&basis2, Flavor::Fhe, &tensor_rep(2)), 10);
        assert_eq!(rank_of_images(&[NormalMonomial::ONE], Flavor::Fhe, &tensor_rep(2)), 1);
    }

    #[test]
    fn matrix_min_polys() {
        let r = tensor_rep(2);
        let h1 = eval_element(&Element::generator(Flavor::Fhe, Generator::H1), &r);
        assert_eq!(matrix_min_poly(&h1), expected_cartan_min_poly(2));
        let r1 = tensor_rep(1);
        let h = eval_element(&Element::generator(Flavor::Fhe, Generator::H), &r1);
        assert_eq!(matrix_min_poly(&h).to_string(), "T^2 - 1");
        assert_eq!(matrix_min_poly(&ExactMatrix::zeros(3)).to_string(), "T");
    }

    #[test]
    fn homomorphism_on_small_products() {
        let r = tensor_rep(3);
        let e = Element::generator(Flavor::Fhe, Generator::E);
        let f = Element::generator(Flavor::Fhe, Generator::F);
        let x = &e.mul(&f, Mode::Universal) + &Element::generator(Flavor::Fhe, Generator::H1);
        let y = f.pow(2, Mode::Universal);
        let xy = x.mul(&y, Mode::Schur(3));
        assert_eq!(eval_element(&xy, &r), eval_element(&x, &r).mul(&eval_element(&y, &r)));
    }

    #[test]
    fn verify_small() {
        let report = verify_suite(2, OracleChoice::Both);
        assert!(report.passed(), "{report}");
    }

    #[test]
    fn faulty_commutator_is_caught() {
        let report = verify_suite_with(2, OracleChoice::Weight, Rules::faulty_commutator());
        assert!(!report.passed());
        assert!(report.checks.iter().any(|c| !c.passed && c.name.contains("products match")), "{report}");
    }
}
