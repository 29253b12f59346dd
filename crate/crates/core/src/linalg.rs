//! Exact linear algebra over the rationals: ranks of sparse vector families,
//! first linear dependencies, and monic polynomials in one variable `T`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::exactmath::{fmt_rational, Rational};

/// Sparse rational vector, column index to nonzero entry.
pub type SparseVec = BTreeMap<usize, Rational>;

/// Rank over `Q` by fraction-free elimination.
///
/// Each row is first scaled to a primitive integer row. Elimination then
/// combines rows by cross-multiplication (`p * v - v[c] * pivot`) and strips
/// the content after every step, so no fractions are ever formed.
pub fn rank(rows: impl IntoIterator<Item = SparseVec>) -> usize {
    let mut pivots: BTreeMap<usize, Vec<(usize, BigInt)>> = BTreeMap::new();
    for row in rows {
        let mut v = primitive_integer_row(&row);
        for (&col, pivot) in &pivots {
            if v.is_empty() {
                break;
            }
            let Some(x) = lookup(&v, col) else { continue };
            let p = &pivot[0].1;
            v = combine(&v, p, pivot, &x);
            make_primitive(&mut v);
        }
        if let Some((col, _)) = v.first() {
            pivots.insert(*col, v);
        }
    }
    pivots.len()
}

fn lookup(v: &[(usize, BigInt)], col: usize) -> Option<BigInt> {
    v.binary_search_by_key(&col, |(c, _)| *c).ok().map(|i| v[i].1.clone())
}

// p * v - x * w, merging sorted sparse rows
fn combine(v: &[(usize, BigInt)], p: &BigInt, w: &[(usize, BigInt)], x: &BigInt) -> Vec<(usize, BigInt)> {
    let mut out = Vec::with_capacity(v.len() + w.len());
    let (mut i, mut j) = (0, 0);
    while i < v.len() || j < w.len() {
        let (col, val) = match (v.get(i), w.get(j)) {
            (Some((cv, a)), Some((cw, b))) if cv == cw => {
                i += 1;
                j += 1;
                (*cv, p * a - x * b)
            }
            (Some((cv, a)), Some((cw, _))) if cv < cw => {
                i += 1;
                (*cv, p * a)
            }
            (Some((cv, a)), None) => {
                i += 1;
                (*cv, p * a)
            }
            (_, Some((cw, b))) => {
                j += 1;
                (*cw, -(x * b))
            }
            (None, None) => unreachable!(),
        };
        if !val.is_zero() {
            out.push((col, val));
        }
    }
    out
}

fn make_primitive(v: &mut [(usize, BigInt)]) {
    let g = v.iter().fold(BigInt::zero(), |g, (_, x)| g.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for (_, x) in v.iter_mut() {
            *x /= &g;
        }
    }
}

fn primitive_integer_row(row: &SparseVec) -> Vec<(usize, BigInt)> {
    let den = row.values().fold(BigInt::one(), |l, q| l.lcm(q.denom()));
    let mut v: Vec<(usize, BigInt)> = row
        .iter()
        .filter(|(_, q)| !q.is_zero())
        .map(|(&c, q)| (c, (q * Rational::from_integer(den.clone())).to_integer()))
        .collect();
    make_primitive(&mut v);
    v
}

/// Incremental search for the first vector that lies in the span of the
/// earlier ones.
#[derive(Default)]
pub struct DependencyFinder {
    count: usize,
    // pivot column -> (reduced row with pivot entry 1, combination of inputs)
    pivots: BTreeMap<usize, (SparseVec, SparseVec)>,
}

impl DependencyFinder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds the next vector. If it is a combination `sum_j c_j v_j` of the
    /// vectors pushed so far, returns `c` (one entry per earlier vector) and
    /// leaves the finder unchanged.
    pub fn push(&mut self, v: &SparseVec) -> Option<Vec<Rational>> {
        let idx = self.count;
        let mut w: SparseVec = v.iter().filter(|(_, q)| !q.is_zero()).map(|(k, q)| (*k, q.clone())).collect();
        let mut comb = SparseVec::new();
        comb.insert(idx, Rational::one());
        for (&col, (row, row_comb)) in &self.pivots {
            let Some(x) = w.get(&col).cloned() else { continue };
            axpy(&mut w, &-&x, row);
            axpy(&mut comb, &-&x, row_comb);
        }
        match w.iter().next() {
            None => {
                // comb . inputs = 0 with comb[idx] = 1
                let coeffs = (0..idx).map(|j| -comb.get(&j).cloned().unwrap_or_else(Rational::zero)).collect();
                Some(coeffs)
            }
            Some((&col, lead)) => {
                let inv = lead.recip();
                for q in w.values_mut() {
                    *q *= &inv;
                }
                for q in comb.values_mut() {
                    *q *= &inv;
                }
                self.pivots.insert(col, (w, comb));
                self.count += 1;
                None
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

// y += a * x
fn axpy(y: &mut SparseVec, a: &Rational, x: &SparseVec) {
    for (k, q) in x {
        let slot = y.entry(*k).or_insert_with(Rational::zero);
        *slot += a * q;
        if slot.is_zero() {
            y.remove(k);
        }
    }
}

/// Minimal polynomial from a sequence of powers `v_0 = 1, v_1 = x, ...`
/// given as vectors. Stops at the first dependency.
pub fn min_poly_from_powers(mut powers: impl FnMut(usize) -> SparseVec, max_degree: usize) -> Option<Poly> {
    let mut finder = DependencyFinder::new();
    for k in 0..=max_degree {
        let v = powers(k);
        if let Some(c) = finder.push(&v) {
            // x^k = sum c_j x^j  =>  T^k - sum c_j T^j
            let mut coeffs: Vec<Rational> = c.into_iter().map(|q| -q).collect();
            coeffs.push(Rational::one());
            return Some(Poly::new(coeffs));
        }
    }
    None
}

/// Polynomial in `T` with rational coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    /// `prod (T - r)`
    pub fn from_roots(roots: impl IntoIterator<Item = Rational>) -> Self {
        let mut p = vec![Rational::one()];
        for r in roots {
            let mut next = vec![Rational::zero(); p.len() + 1];
            for (k, c) in p.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * &r;
            }
            p = next;
        }
        Poly::new(p)
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(One::is_one)
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs.iter().rev().fold(Rational::zero(), |acc, c| acc * x + c)
    }
}

impl fmt::Display for Poly {
    /// Descending powers, e.g. `T^3 - 4*T`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            first = false;
            let var = match k {
                0 => String::new(),
                1 => "T".to_string(),
                _ => format!("T^{k}"),
            };
            if var.is_empty() {
                f.write_str(&fmt_rational(&mag))?;
            } else if mag.is_one() {
                f.write_str(&var)?;
            } else {
                write!(f, "{}*{var}", fmt_rational(&mag))?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}
