//! Exact scalars and integer-valued polynomials in the binomial basis.
//!
//! Every polynomial in a single Cartan variable `H` is stored as an integer
//! combination of `binom(H, b)`. Integer-valued polynomials are exactly the
//! integer combinations of these, so the representation never needs
//! denominators.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational scalar, always kept in lowest terms with a positive
/// denominator.
pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn rat_frac(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Renders `n` or `n/d`; a denominator of one is dropped.
pub fn fmt_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// `n(n-1)...(n-k+1)/k!` for any integer `n`; zero when `k < 0`.
pub fn binom(n: &BigInt, k: i64) -> BigInt {
    if k < 0 {
        return BigInt::zero();
    }
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k {
        num *= n - BigInt::from(i);
        den *= BigInt::from(i + 1);
    }
    num / den
}

/// Binomial coefficient for machine integers, with the same conventions as
/// [`binom`].
pub fn binom_i(n: i64, k: i64) -> BigInt {
    if k < 0 {
        return BigInt::zero();
    }
    if n >= 0 && k > n {
        return BigInt::zero();
    }
    // symmetric shortcut for nonnegative n
    let k = if n >= 0 && 2 * k > n { n - k } else { k };
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= BigInt::from(n - i);
        acc /= BigInt::from(i + 1);
    }
    acc
}

/// Which Cartan element a polynomial is written in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    H1,
    H2,
    /// `h = H1 - H2`
    Hdiff,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::H1 => "H1",
            Var::H2 => "H2",
            Var::Hdiff => "h",
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Integer-valued polynomial `sum_b coeffs[b] * binom(H, b)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IVPoly {
    var: Var,
    coeffs: Vec<BigInt>,
}

impl IVPoly {
    pub fn new(var: Var, mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IVPoly { var, coeffs }
    }

    pub fn zero(var: Var) -> Self {
        IVPoly { var, coeffs: Vec::new() }
    }

    pub fn constant(var: Var, c: impl Into<BigInt>) -> Self {
        IVPoly::new(var, vec![c.into()])
    }

    pub fn one(var: Var) -> Self {
        IVPoly::constant(var, 1)
    }

    /// `binom(H, b)`
    pub fn binomial(var: Var, b: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); b + 1];
        coeffs[b] = BigInt::one();
        IVPoly { var, coeffs }
    }

    pub fn var(&self) -> Var {
        self.var
    }

    pub fn with_var(mut self, var: Var) -> Self {
        self.var = var;
        self
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `binom(H, b)`.
    pub fn coeff(&self, b: usize) -> BigInt {
        self.coeffs.get(b).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Highest index with a nonzero coefficient; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, n: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(b, c)| c * binom(n, b as i64))
            .sum()
    }

    pub fn eval_i(&self, n: i64) -> BigInt {
        self.eval(&BigInt::from(n))
    }

    /// The unique polynomial of degree `<= values.len() - 1` taking
    /// `values[n]` at `H = n`. Coefficients are the forward differences at 0.
    pub fn from_values(var: Var, values: &[BigInt]) -> Self {
        let mut diffs = values.to_vec();
        let mut coeffs = Vec::with_capacity(values.len());
        for round in 0..values.len() {
            coeffs.push(diffs[0].clone());
            for i in 0..values.len() - round - 1 {
                diffs[i] = &diffs[i + 1] - &diffs[i];
            }
        }
        IVPoly::new(var, coeffs)
    }

    /// Product in the binomial basis, via
    /// `binom(H,i) binom(H,j) = sum_k binom(k,i) binom(i,k-j) binom(H,k)`.
    ///
    /// Panics if the two polynomials are in different variables.
    pub fn product(&self, other: &IVPoly) -> IVPoly {
        assert_eq!(self.var, other.var, "ivp_product: variable mismatch");
        if self.is_zero() || other.is_zero() {
            return IVPoly::zero(self.var);
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, ci) in self.coeffs.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            for (j, cj) in other.coeffs.iter().enumerate() {
                if cj.is_zero() {
                    continue;
                }
                let cij = ci * cj;
                for (k, slot) in out.iter_mut().enumerate().take(i + j + 1).skip(i.max(j)) {
                    *slot += &cij * binomial_product_coeff(i, j, k);
                }
            }
        }
        IVPoly::new(self.var, out)
    }

    /// `P(H + s)`, one unit step at a time through Pascal's rule.
    pub fn shift(&self, s: i64) -> IVPoly {
        let mut p = self.clone();
        for _ in 0..s.unsigned_abs() {
            p = if s > 0 { p.shift_up() } else { p.shift_down() };
        }
        p
    }

    // binom(H+1, m) = binom(H, m) + binom(H, m-1)
    fn shift_up(&self) -> IVPoly {
        let n = self.coeffs.len();
        let coeffs = (0..n)
            .map(|k| {
                let next = self.coeffs.get(k + 1).cloned().unwrap_or_default();
                &self.coeffs[k] + next
            })
            .collect();
        IVPoly::new(self.var, coeffs)
    }

    // inverse of shift_up: q_k = p_k - q_{k+1}
    fn shift_down(&self) -> IVPoly {
        let n = self.coeffs.len();
        let mut coeffs = vec![BigInt::zero(); n];
        for k in (0..n).rev() {
            let next = if k + 1 < n { coeffs[k + 1].clone() } else { BigInt::zero() };
            coeffs[k] = &self.coeffs[k] - next;
        }
        IVPoly::new(self.var, coeffs)
    }

    /// `P(d - H)`, recovered from its values at `H = 0..=deg`.
    pub fn complement(&self, d: i64) -> IVPoly {
        let Some(deg) = self.degree() else {
            return self.clone();
        };
        let values: Vec<BigInt> = (0..=deg as i64).map(|n| self.eval_i(d - n)).collect();
        IVPoly::from_values(self.var, &values)
    }

    pub fn scale(&self, k: &BigInt) -> IVPoly {
        IVPoly::new(self.var, self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Coefficients in the power basis `1, H, H^2, ...`.
    pub fn to_power_coeffs(&self) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.coeffs.len()];
        for (b, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let c = Rational::from_integer(c.clone());
            for (k, p) in falling_factorial_power_coeffs(b).into_iter().enumerate() {
                out[k] += &c * p;
            }
        }
        out
    }

    /// Inverse of [`IVPoly::to_power_coeffs`]. Returns `None` when the
    /// polynomial is not integer valued.
    pub fn from_power_coeffs(var: Var, power: &[Rational]) -> Option<IVPoly> {
        let values: Option<Vec<BigInt>> = (0..power.len().max(1))
            .map(|n| {
                let x = rat(n as i64);
                let mut acc = Rational::zero();
                for c in power.iter().rev() {
                    acc = acc * &x + c;
                }
                acc.is_integer().then(|| acc.to_integer())
            })
            .collect();
        values.map(|v| IVPoly::from_values(var, &v))
    }
}

/// Coefficient of `binom(H,k)` in `binom(H,i) * binom(H,j)`.
pub fn binomial_product_coeff(i: usize, j: usize, k: usize) -> BigInt {
    if k < i.max(j) || k > i + j {
        return BigInt::zero();
    }
    binom_i(k as i64, i as i64) * binom_i(i as i64, (k - j) as i64)
}

/// Power-basis coefficients of `binom(H, b)`.
fn falling_factorial_power_coeffs(b: usize) -> Vec<Rational> {
    // H(H-1)...(H-b+1)
    let mut poly = vec![BigInt::one()];
    for i in 0..b {
        let mut next = vec![BigInt::zero(); poly.len() + 1];
        for (k, c) in poly.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= c * BigInt::from(i);
        }
        poly = next;
    }
    let fact: BigInt = (1..=b as u64).map(BigInt::from).product();
    poly.into_iter().map(|c| Rational::new(c, fact.clone())).collect()
}

impl Add for &IVPoly {
    type Output = IVPoly;
    fn add(self, rhs: &IVPoly) -> IVPoly {
        assert_eq!(self.var, rhs.var, "IVPoly addition: variable mismatch");
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect();
        IVPoly::new(self.var, coeffs)
    }
}

impl Sub for &IVPoly {
    type Output = IVPoly;
    fn sub(self, rhs: &IVPoly) -> IVPoly {
        self + &(-rhs)
    }
}

impl Neg for &IVPoly {
    type Output = IVPoly;
    fn neg(self) -> IVPoly {
        IVPoly::new(self.var, self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &IVPoly {
    type Output = IVPoly;
    fn mul(self, rhs: &IVPoly) -> IVPoly {
        self.product(rhs)
    }
}

impl fmt::Display for IVPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (b, c) in self.coeffs.iter().enumerate() {
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
            if b == 0 {
                write!(f, "{mag}")?;
            } else {
                if !mag.is_one() {
                    write!(f, "{mag}*")?;
                }
                write!(f, "binom({},{b})", self.var)?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Greatest common divisor of a set of integers (zero for an empty set).
pub fn content<'a>(xs: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    xs.into_iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ivp(coeffs: &[i64]) -> IVPoly {
        IVPoly::new(Var::H2, coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    fn vals(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn binom_conventions() {
        assert_eq!(binom_i(5, 2), BigInt::from(10));
        assert_eq!(binom_i(7, -1), BigInt::zero());
        assert_eq!(binom_i(-1, 3), BigInt::from(-1));
        assert_eq!(binom(&BigInt::from(-1), 3), BigInt::from(-1));
        assert_eq!(binom(&BigInt::from(3), 5), BigInt::zero());
        assert_eq!(binom_i(0, 0), BigInt::one());
        for n in -6..8 {
            for k in -2..8 {
                assert_eq!(binom(&BigInt::from(n), k), binom_i(n, k), "({n},{k})");
            }
        }
    }

    #[test]
    fn from_values_examples() {
        assert_eq!(IVPoly::from_values(Var::H2, &vals(&[0, 1, 4])), ivp(&[0, 1, 2]));
        assert_eq!(IVPoly::from_values(Var::H2, &vals(&[1, 1, 1])), ivp(&[1]));
        assert_eq!(IVPoly::from_values(Var::H2, &vals(&[0, 1])), ivp(&[0, 1]));
    }

    #[test]
    fn product_examples() {
        let h = ivp(&[0, 1]);
        assert_eq!(h.product(&h), ivp(&[0, 1, 2]));
        assert_eq!(h.product(&IVPoly::one(Var::H2)), h);
        // oracle: evaluate H * binom(H,2) at 0..3 and take forward differences
        let values: Vec<BigInt> = (0..=3).map(|n| BigInt::from(n) * binom_i(n, 2)).collect();
        let expected = IVPoly::from_values(Var::H2, &values);
        assert_eq!(expected, ivp(&[0, 0, 2, 3]));
        assert_eq!(h.product(&IVPoly::binomial(Var::H2, 2)), expected);
    }

    #[test]
    #[should_panic(expected = "variable mismatch")]
    fn product_rejects_mixed_variables() {
        let _ = IVPoly::one(Var::H1).product(&IVPoly::one(Var::H2));
    }

    #[test]
    fn shift_examples() {
        assert_eq!(ivp(&[0, 1]).shift(-1), ivp(&[-1, 1]));
        assert_eq!(IVPoly::binomial(Var::H2, 3).shift(0), IVPoly::binomial(Var::H2, 3));
        assert_eq!(IVPoly::binomial(Var::H2, 2).shift(1), ivp(&[0, 1, 1]));
    }

    #[test]
    fn complement_examples() {
        assert_eq!(ivp(&[0, 1]).complement(2), ivp(&[2, -1]));
        assert_eq!(IVPoly::one(Var::H2).complement(7), IVPoly::one(Var::H2));
        // binom(3-H, 2) at H = 0,1,2 is 3,1,0
        let expected = IVPoly::from_values(Var::H2, &vals(&[3, 1, 0]));
        assert_eq!(expected, ivp(&[3, -2, 1]));
        assert_eq!(IVPoly::binomial(Var::H2, 2).complement(3), expected);
    }

    #[test]
    fn power_basis_views() {
        let p = IVPoly::binomial(Var::H2, 2);
        assert_eq!(p.to_power_coeffs(), vec![rat(0), rat_frac(-1, 2), rat_frac(1, 2)]);
        assert_eq!(IVPoly::from_power_coeffs(Var::H2, &p.to_power_coeffs()), Some(p));
        assert_eq!(IVPoly::from_power_coeffs(Var::H2, &[rat(0), rat_frac(1, 2)]), None);
    }

    #[test]
    fn display() {
        assert_eq!(ivp(&[2, -1]).to_string(), "2 - binom(H2,1)");
        assert_eq!(ivp(&[]).to_string(), "0");
        assert_eq!(ivp(&[0, 0, -3]).to_string(), "-3*binom(H2,2)");
    }
}
