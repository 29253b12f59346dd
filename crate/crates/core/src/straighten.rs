//! Normal-order elements of the enveloping algebra of gl2 and their product.
//!
//! An element is a rational combination of monomials
//! `L^(a) binom(P, b) binom(A, alt) R^(c)` where, for the `Fhe` flavor,
//! `L = f`, `R = e`, `P = H2`, `A = H1`, and for `Ehf` the roles of `e, f`
//! and `H1, H2` are interchanged. In these (primary, alternate) coordinates
//! the two flavors obey literally the same commutation rules, so the
//! multiplication code below is written once.
//!
//! Truncated elements (the algebra `B_d`) never carry an alternate binomial:
//! it is eliminated through `A = d - P`.

use std::cmp::Reverse;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::exactmath::{binom_i, binomial_product_coeff, fmt_rational, IVPoly, Rational, Var};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flavor {
    /// `f^(a) binom(H2,b) e^(c)`
    Fhe,
    /// `e^(a) binom(H1,b) f^(c)`
    Ehf,
}

impl Flavor {
    /// The Cartan element whose binomials appear in the truncated basis.
    pub fn primary(self) -> Var {
        match self {
            Flavor::Fhe => Var::H2,
            Flavor::Ehf => Var::H1,
        }
    }

    pub fn alternate(self) -> Var {
        match self {
            Flavor::Fhe => Var::H1,
            Flavor::Ehf => Var::H2,
        }
    }

    pub fn swapped(self) -> Flavor {
        match self {
            Flavor::Fhe => Flavor::Ehf,
            Flavor::Ehf => Flavor::Fhe,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Flavor::Fhe => "fhe",
            Flavor::Ehf => "ehf",
        }
    }

    fn left_gen(self) -> &'static str {
        match self {
            Flavor::Fhe => "F",
            Flavor::Ehf => "E",
        }
    }

    fn right_gen(self) -> &'static str {
        match self {
            Flavor::Fhe => "E",
            Flavor::Ehf => "F",
        }
    }
}

impl std::str::FromStr for Flavor {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "fhe" => Ok(Flavor::Fhe),
            "ehf" => Ok(Flavor::Ehf),
            other => Err(format!("unknown flavor `{other}` (expected fhe or ehf)")),
        }
    }
}

/// Normal-order monomial. `alt` is the index of the alternate Cartan
/// binomial and is always zero for truncated elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NormalMonomial {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub alt: u32,
}

impl NormalMonomial {
    pub const ONE: NormalMonomial = NormalMonomial { a: 0, b: 0, c: 0, alt: 0 };

    pub fn new(a: u32, b: u32, c: u32) -> Self {
        NormalMonomial { a, b, c, alt: 0 }
    }

    pub fn with_alt(a: u32, b: u32, c: u32, alt: u32) -> Self {
        NormalMonomial { a, b, c, alt }
    }

    pub fn degree(&self) -> u32 {
        self.a + self.b + self.c + self.alt
    }

    pub fn height(&self) -> u32 {
        self.a + self.c
    }

    /// Ordering used when rendering: highest height first, then larger left
    /// exponent, then increasing Cartan degree with `H1` factors first.
    pub fn display_key(&self, flavor: Flavor) -> (Reverse<u32>, Reverse<u32>, u32, Reverse<u32>) {
        let h1 = if flavor == Flavor::Fhe { self.alt } else { self.b };
        (Reverse(self.height()), Reverse(self.a), self.b + self.alt, Reverse(h1))
    }

    /// Factors of the monomial in the given flavor, e.g. `F(2)*binom(H2,1)*E(1)`.
    /// Empty for the identity.
    pub fn render(&self, flavor: Flavor) -> String {
        let mut parts = Vec::new();
        if self.a > 0 {
            parts.push(format!("{}({})", flavor.left_gen(), self.a));
        }
        if self.alt > 0 {
            parts.push(format!("binom({},{})", flavor.alternate(), self.alt));
        }
        if self.b > 0 {
            parts.push(format!("binom({},{})", flavor.primary(), self.b));
        }
        if self.c > 0 {
            parts.push(format!("{}({})", flavor.right_gen(), self.c));
        }
        parts.join("*")
    }
}

/// Generators accepted when building elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    E,
    F,
    H1,
    H2,
    /// `h = H1 - H2`
    H,
    /// divided power `e^(m)`
    EDiv(u32),
    /// divided power `f^(m)`
    FDiv(u32),
    /// `binom(H1, m)` or `binom(H2, m)`
    Binom(Var, u32),
}

/// Whether products are truncated to `B_d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Universal,
    Schur(u32),
}

/// Knobs on the commutation step `e f^(k) = f^(k) e + f^(k-1)(H1 - H2 - k + 1)`.
///
/// `Rules::default()` is the correct identity. The faulty variant flips the
/// sign of the correction term and exists so verification code can prove it
/// detects a broken straightener.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Rules {
    flip_commutator: bool,
}

impl Rules {
    pub fn faulty_commutator() -> Rules {
        Rules { flip_commutator: true }
    }

    pub fn is_faulty(&self) -> bool {
        self.flip_commutator
    }
}

/// Finite rational combination of normal-order monomials.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    flavor: Flavor,
    terms: BTreeMap<NormalMonomial, Rational>,
}

impl Element {
    pub fn zero(flavor: Flavor) -> Self {
        Element { flavor, terms: BTreeMap::new() }
    }

    pub fn one(flavor: Flavor) -> Self {
        Element::scalar(flavor, Rational::one())
    }

    pub fn scalar(flavor: Flavor, q: Rational) -> Self {
        Element::monomial(flavor, NormalMonomial::ONE, q)
    }

    pub fn monomial(flavor: Flavor, m: NormalMonomial, q: Rational) -> Self {
        let mut x = Element::zero(flavor);
        x.add_term(m, q);
        x
    }

    /// Basis monomial with coefficient one.
    pub fn basis(flavor: Flavor, m: NormalMonomial) -> Self {
        Element::monomial(flavor, m, Rational::one())
    }

    pub fn from_terms(flavor: Flavor, terms: impl IntoIterator<Item = (NormalMonomial, Rational)>) -> Self {
        let mut x = Element::zero(flavor);
        for (m, q) in terms {
            x.add_term(m, q);
        }
        x
    }

    pub fn generator(flavor: Flavor, g: Generator) -> Self {
        let unit = |m: NormalMonomial| Element::basis(flavor, m);
        let fhe = flavor == Flavor::Fhe;
        match g {
            Generator::E => Element::generator(flavor, Generator::EDiv(1)),
            Generator::F => Element::generator(flavor, Generator::FDiv(1)),
            Generator::H1 => Element::generator(flavor, Generator::Binom(Var::H1, 1)),
            Generator::H2 => Element::generator(flavor, Generator::Binom(Var::H2, 1)),
            Generator::H => &Element::generator(flavor, Generator::H1) - &Element::generator(flavor, Generator::H2),
            Generator::EDiv(m) if !fhe => unit(NormalMonomial::new(m, 0, 0)),
            Generator::EDiv(m) => unit(NormalMonomial::new(0, 0, m)),
            Generator::FDiv(m) if fhe => unit(NormalMonomial::new(m, 0, 0)),
            Generator::FDiv(m) => unit(NormalMonomial::new(0, 0, m)),
            Generator::Binom(Var::Hdiff, m) => {
                // binom(h, m) is not a basis monomial; build it by products
                let h = Element::generator(flavor, Generator::H);
                let mut acc = Element::one(flavor);
                for i in 0..m {
                    let shifted = &h - &Element::scalar(flavor, Rational::from_integer(i.into()));
                    acc = acc.mul(&shifted, Mode::Universal);
                }
                let fact: BigInt = (1..=m as u64).map(BigInt::from).product();
                acc.scale(&Rational::new(BigInt::one(), fact))
            }
            Generator::Binom(v, m) if v == flavor.primary() => unit(NormalMonomial::new(0, m, 0)),
            Generator::Binom(_, m) => unit(NormalMonomial::with_alt(0, 0, 0, m)),
        }
    }

    pub fn flavor(&self) -> Flavor {
        self.flavor
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in lexicographic `(a, b, c, alt)` order.
    pub fn terms(&self) -> impl Iterator<Item = (&NormalMonomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, m: &NormalMonomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add_term(&mut self, m: NormalMonomial, q: Rational) {
        if q.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(q);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += q;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn scale(&self, q: &Rational) -> Element {
        if q.is_zero() {
            return Element::zero(self.flavor);
        }
        Element {
            flavor: self.flavor,
            terms: self.terms.iter().map(|(m, c)| (*m, c * q)).collect(),
        }
    }

    /// True when every coefficient is an integer.
    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|q| q.is_integer())
    }

    /// True when no term uses the alternate Cartan binomial.
    pub fn is_single_cartan(&self) -> bool {
        self.terms.keys().all(|m| m.alt == 0)
    }

    pub fn max_degree(&self) -> Option<u32> {
        self.terms.keys().map(NormalMonomial::degree).max()
    }

    /// The automorphism exchanging `e` with `f` and `H1` with `H2`. In
    /// normal-order coordinates it keeps every index and flips the flavor.
    pub fn symmetry(&self) -> Element {
        Element { flavor: self.flavor.swapped(), terms: self.terms.clone() }
    }

    pub fn mul(&self, rhs: &Element, mode: Mode) -> Element {
        self.mul_with(rhs, mode, Rules::default())
    }

    /// Product in normal order. In `Mode::Schur(d)` the result is reduced to
    /// the truncated basis of `B_d`.
    ///
    /// Panics if the flavors differ.
    pub fn mul_with(&self, rhs: &Element, mode: Mode, rules: Rules) -> Element {
        assert_eq!(self.flavor, rhs.flavor, "mul: flavor mismatch");
        let collapse = match mode {
            Mode::Universal => None,
            Mode::Schur(d) => Some(d),
        };
        let mut acc: BTreeMap<NormalMonomial, Rational> = BTreeMap::new();
        for (m1, q1) in &self.terms {
            for (m2, q2) in &rhs.terms {
                let q = q1 * q2;
                mul_monomials(m1, m2, collapse, rules, |m, n| {
                    let v = acc.entry(m).or_insert_with(Rational::zero);
                    *v += &q * n;
                });
            }
        }
        acc.retain(|_, q| !q.is_zero());
        let product = Element { flavor: self.flavor, terms: acc };
        match mode {
            Mode::Universal => product,
            Mode::Schur(d) => crate::schur::normalize_terms(&product, d),
        }
    }

    /// Multiplies `self` by itself `n` times.
    pub fn pow(&self, n: u32, mode: Mode) -> Element {
        let mut acc = match mode {
            Mode::Universal => Element::one(self.flavor),
            Mode::Schur(d) => crate::schur::normalize_terms(&Element::one(self.flavor), d),
        };
        for _ in 0..n {
            acc = acc.mul(self, mode);
        }
        acc
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        assert_eq!(self.flavor, rhs.flavor, "add: flavor mismatch");
        let mut out = self.clone();
        for (m, q) in &rhs.terms {
            out.add_term(*m, q.clone());
        }
        out
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self + &(-rhs)
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        Element {
            flavor: self.flavor,
            terms: self.terms.iter().map(|(m, q)| (*m, -q)).collect(),
        }
    }
}

/// Renders `coeff*factors` terms joined by ` + ` / ` - `; zero renders as `0`.
pub(crate) fn render_terms<'a>(terms: impl IntoIterator<Item = (String, &'a Rational)>) -> String {
    let mut out = String::new();
    for (factors, q) in terms {
        let neg = q.is_negative();
        let mag = q.abs();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if factors.is_empty() {
            out.push_str(&fmt_rational(&mag));
        } else {
            if !mag.is_one() {
                out.push_str(&fmt_rational(&mag));
                out.push('*');
            }
            out.push_str(&factors);
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by_key(|(m, _)| m.display_key(self.flavor));
        f.write_str(&render_terms(terms.into_iter().map(|(m, q)| (m.render(self.flavor), q))))
    }
}

/// `L^(i) L^(j) = binom(i+j, i) L^(i+j)`
pub fn fdiv_merge(i: u32, j: u32) -> (BigInt, u32) {
    (binom_i((i + j) as i64, i as i64), i + j)
}

/// Either of the two root generators.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Root {
    E,
    F,
}

/// `Q` with `g P(H) = Q(H) g`.
pub fn commute_poly_left(g: Root, p: &IVPoly) -> IVPoly {
    let s = match (g, p.var()) {
        (Root::E, Var::H1) | (Root::F, Var::H2) => -1,
        (Root::E, Var::H2) | (Root::F, Var::H1) => 1,
        (Root::E, Var::Hdiff) => -2,
        (Root::F, Var::Hdiff) => 2,
    };
    p.shift(s)
}

/// `e f^(k) = f^(k) e + f^(k-1)(H1 - H2 - k + 1)` as an `Fhe` element; in
/// `Mode::Schur(d)` the middle polynomial is rewritten in `H2` alone but no
/// truncation is applied.
pub fn commute_e_past_fdiv(k: u32, mode: Mode) -> Element {
    assert!(k >= 1, "commute_e_past_fdiv needs k >= 1");
    let collapse = match mode {
        Mode::Universal => None,
        Mode::Schur(d) => Some(d),
    };
    let groups = straightened(1, k, collapse, Rules::default());
    let mut x = Element::zero(Flavor::Fhe);
    for g in groups.iter() {
        for (&(b, alt), n) in &g.poly.terms {
            x.add_term(NormalMonomial::with_alt(g.left, b, g.right, alt), &g.scale * Rational::from_integer(n.clone()));
        }
    }
    x
}

/// Polynomial in the primary and alternate Cartan elements, as an integer
/// combination of `binom(P, b) binom(A, alt)` keyed by `(b, alt)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct CartanPoly {
    pub(crate) terms: BTreeMap<(u32, u32), BigInt>,
}

impl CartanPoly {
    pub(crate) fn basis(b: u32, alt: u32) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert((b, alt), BigInt::one());
        CartanPoly { terms }
    }

    fn add(&mut self, key: (u32, u32), n: BigInt) {
        if n.is_zero() {
            return;
        }
        let slot = self.terms.entry(key).or_default();
        *slot += n;
        if slot.is_zero() {
            self.terms.remove(&key);
        }
    }

    /// `alt - primary - k + 1`, the correction polynomial of the commutation step.
    fn commutator(k: u32) -> Self {
        let mut p = CartanPoly::default();
        p.add((0, 1), BigInt::one());
        p.add((1, 0), -BigInt::one());
        p.add((0, 0), BigInt::one() - BigInt::from(k));
        p
    }

    /// Moves the polynomial across `n` copies of the right-hand root
    /// generator (`R^(n) P = shifted(P) R^(n)`), or equivalently moves the
    /// left-hand root to the left: primary shifts by `+n`, alternate by `-n`.
    pub(crate) fn shift(&self, n: u32) -> Self {
        if n == 0 {
            return self.clone();
        }
        let mut out = CartanPoly::default();
        for (&(b, alt), k) in &self.terms {
            let p = (0..n).fold(IVPoly::binomial(Var::H2, b as usize), |p, _| commute_poly_left(Root::E, &p));
            let a = (0..n).fold(IVPoly::binomial(Var::H1, alt as usize), |p, _| commute_poly_left(Root::E, &p));
            for (i, pc) in p.coeffs().iter().enumerate() {
                if pc.is_zero() {
                    continue;
                }
                for (j, ac) in a.coeffs().iter().enumerate() {
                    if !ac.is_zero() {
                        out.add((i as u32, j as u32), k * pc * ac);
                    }
                }
            }
        }
        out
    }

    pub(crate) fn mul(&self, rhs: &CartanPoly) -> Self {
        let mut out = CartanPoly::default();
        for (&(b1, a1), n1) in &self.terms {
            for (&(b2, a2), n2) in &rhs.terms {
                let n = n1 * n2;
                for kb in b1.max(b2)..=b1 + b2 {
                    let cb = binomial_product_coeff(b1 as usize, b2 as usize, kb as usize);
                    if cb.is_zero() {
                        continue;
                    }
                    for ka in a1.max(a2)..=a1 + a2 {
                        let ca = binomial_product_coeff(a1 as usize, a2 as usize, ka as usize);
                        if !ca.is_zero() {
                            out.add((kb, ka), &n * &cb * ca);
                        }
                    }
                }
            }
        }
        out
    }

    /// Eliminates the alternate variable through `A = d - P`.
    pub(crate) fn collapse(&self, d: u32) -> Self {
        let mut out = CartanPoly::default();
        for (&(b, alt), n) in &self.terms {
            if alt == 0 {
                out.add((b, 0), n.clone());
                continue;
            }
            let comp = complement_binomial(alt, d);
            let prod = IVPoly::binomial(Var::H2, b as usize).product(&comp);
            for (k, c) in prod.coeffs().iter().enumerate() {
                out.add((k as u32, 0), n * c);
            }
        }
        out
    }
}

/// `binom(d - H, m)` in the binomial basis of `H`, memoized.
fn complement_binomial(m: u32, d: u32) -> IVPoly {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), IVPoly>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(p) = cache.lock().unwrap().get(&(m, d)) {
        return p.clone();
    }
    let p = IVPoly::binomial(Var::H2, m as usize).complement(d as i64);
    cache.lock().unwrap().insert((m, d), p.clone());
    p
}

/// One normal-order group `scale * L^(left) poly R^(right)`.
#[derive(Clone, Debug)]
pub(crate) struct Group {
    pub(crate) left: u32,
    pub(crate) right: u32,
    pub(crate) scale: Rational,
    pub(crate) poly: CartanPoly,
}

type StraightenKey = (u32, u32, Option<u32>, Rules);

/// Normal form of `R^(r) L^(s)`, grouped by `(left, right)` exponents.
/// Built by peeling one plain `R` at a time off the left:
/// `R^(r) = (1/r) R R^(r-1)`.
pub(crate) fn straightened(r: u32, s: u32, collapse: Option<u32>, rules: Rules) -> Arc<Vec<Group>> {
    static CACHE: OnceLock<Mutex<HashMap<StraightenKey, Arc<Vec<Group>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (r, s, collapse, rules);
    if let Some(v) = cache.lock().unwrap().get(&key) {
        return v.clone();
    }
    let result = match collapse {
        Some(d) => {
            let full = straightened(r, s, None, rules);
            full.iter()
                .map(|g| Group { left: g.left, right: g.right, scale: g.scale.clone(), poly: g.poly.collapse(d) })
                .filter(|g| !g.poly.terms.is_empty())
                .collect()
        }
        None => straighten_left(r, s, rules),
    };
    let result = Arc::new(result);
    cache.lock().unwrap().insert(key, result.clone());
    result
}

fn straighten_left(r: u32, s: u32, rules: Rules) -> Vec<Group> {
    if r == 0 || s == 0 {
        return vec![Group { left: s, right: r, scale: Rational::one(), poly: CartanPoly::basis(0, 0) }];
    }
    let prev = straightened(r - 1, s, None, rules);
    let sign = if rules.flip_commutator { -BigInt::one() } else { BigInt::one() };
    // accumulate R * prev, keyed by (left, right); rationals kept per term
    let mut acc: BTreeMap<(u32, u32), BTreeMap<(u32, u32), Rational>> = BTreeMap::new();
    let mut push = |left: u32, right: u32, scale: &Rational, poly: &CartanPoly, factor: BigInt| {
        let slot = acc.entry((left, right)).or_default();
        for (&key, n) in &poly.terms {
            *slot.entry(key).or_insert_with(Rational::zero) += scale * Rational::from_integer(n * &factor);
        }
    };
    for g in prev.iter() {
        // R L^(i) = L^(i) R + L^(i-1) (A - P - i + 1)
        push(g.left, g.right + 1, &g.scale, &g.poly.shift(1), BigInt::from(g.right + 1));
        if g.left >= 1 {
            let corr = CartanPoly::commutator(g.left).mul(&g.poly);
            push(g.left - 1, g.right, &g.scale, &corr, sign.clone());
        }
    }
    let inv_r = Rational::new(BigInt::one(), BigInt::from(r));
    groups_from(acc, &inv_r)
}

/// Normal form of `R^(r) L^(s)` built by peeling plain `L`s off the right
/// instead, through `R^(k) L = L R^(k) + (A - P - k + 1) R^(k-1)`. Used to
/// cross-check [`straightened`].
#[cfg(test)]
pub(crate) fn straighten_right(r: u32, s: u32) -> Vec<Group> {
    if r == 0 || s == 0 {
        return vec![Group { left: s, right: r, scale: Rational::one(), poly: CartanPoly::basis(0, 0) }];
    }
    let prev = straighten_right(r, s - 1);
    let mut acc: BTreeMap<(u32, u32), BTreeMap<(u32, u32), Rational>> = BTreeMap::new();
    let mut push = |left: u32, right: u32, scale: &Rational, poly: &CartanPoly, factor: BigInt| {
        let slot = acc.entry((left, right)).or_default();
        for (&key, n) in &poly.terms {
            *slot.entry(key).or_insert_with(Rational::zero) += scale * Rational::from_integer(n * &factor);
        }
    };
    for g in &prev {
        // poly L = L shifted(poly); L^(i) L = (i+1) L^(i+1)
        push(g.left + 1, g.right, &g.scale, &g.poly.shift(1), BigInt::from(g.left + 1));
        if g.right >= 1 {
            let corr = g.poly.mul(&CartanPoly::commutator(g.right));
            push(g.left, g.right - 1, &g.scale, &corr, BigInt::one());
        }
    }
    let inv_s = Rational::new(BigInt::one(), BigInt::from(s));
    groups_from(acc, &inv_s)
}

fn groups_from(acc: BTreeMap<(u32, u32), BTreeMap<(u32, u32), Rational>>, factor: &Rational) -> Vec<Group> {
    let mut out = Vec::new();
    for ((left, right), poly) in acc {
        let poly: Vec<_> = poly.into_iter().filter(|(_, q)| !q.is_zero()).collect();
        if poly.is_empty() {
            continue;
        }
        // pull out a common denominator so the polynomial stays integral
        let den = poly.iter().fold(BigInt::one(), |l, (_, q)| num_integer::Integer::lcm(&l, q.denom()));
        let scale = factor * Rational::new(BigInt::one(), den.clone());
        let terms = poly
            .into_iter()
            .map(|(k, q)| (k, (q * Rational::from_integer(den.clone())).to_integer()))
            .collect();
        out.push(Group { left, right, scale, poly: CartanPoly { terms } });
    }
    out
}

/// Expands `m1 * m2` and feeds each resulting monomial with its integer-or-
/// rational coefficient to `emit`. With `collapse = Some(d)` the Cartan part
/// is kept in the primary variable only.
fn mul_monomials(
    m1: &NormalMonomial,
    m2: &NormalMonomial,
    collapse: Option<u32>,
    rules: Rules,
    mut emit: impl FnMut(NormalMonomial, Rational),
) {
    let mut p1 = CartanPoly::basis(m1.b, m1.alt);
    let mut p2 = CartanPoly::basis(m2.b, m2.alt);
    if let Some(d) = collapse {
        p1 = p1.collapse(d);
        p2 = p2.collapse(d);
    }
    let groups = straightened(m1.c, m2.a, collapse, rules);
    for g in groups.iter() {
        // P1 L^(i) = L^(i) P1(shifted by i); R^(j) P2 = P2(shifted by j) R^(j)
        let mid = p1.shift(g.left).mul(&g.poly).mul(&p2.shift(g.right));
        let (lc, left) = fdiv_merge(m1.a, g.left);
        let (rc, right) = fdiv_merge(g.right, m2.c);
        let q = &g.scale * Rational::from_integer(lc * rc);
        for (&(b, alt), n) in &mid.terms {
            emit(NormalMonomial::with_alt(left, b, right, alt), &q * Rational::from_integer(n.clone()));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{rat, rat_frac};

    fn fhe(g: Generator) -> Element {
        Element::generator(Flavor::Fhe, g)
    }

    fn groups_to_element(groups: &[Group]) -> Element {
        let mut x = Element::zero(Flavor::Fhe);
        for g in groups {
            for (&(b, alt), n) in &g.poly.terms {
                x.add_term(NormalMonomial::with_alt(g.left, b, g.right, alt), &g.scale * Rational::from_integer(n.clone()));
            }
        }
        x
    }

    #[test]
    fn fdiv_merge_examples() {
        assert_eq!(fdiv_merge(2, 3), (BigInt::from(10), 5));
        assert_eq!(fdiv_merge(0, 4), (BigInt::one(), 4));
        assert_eq!(fdiv_merge(1, 1), (BigInt::from(2), 2));
    }

    #[test]
    fn commute_poly_left_examples() {
        let h2 = IVPoly::binomial(Var::H2, 1);
        assert_eq!(commute_poly_left(Root::E, &h2), IVPoly::new(Var::H2, vec![1.into(), 1.into()]));
        assert_eq!(commute_poly_left(Root::F, &h2), IVPoly::new(Var::H2, vec![(-1).into(), 1.into()]));
        assert_eq!(commute_poly_left(Root::E, &IVPoly::one(Var::H2)), IVPoly::one(Var::H2));
        let h1 = IVPoly::binomial(Var::H1, 1);
        assert_eq!(commute_poly_left(Root::E, &h1), h1.shift(-1));
        assert_eq!(commute_poly_left(Root::F, &h1), h1.shift(1));
    }

    #[test]
    fn commute_e_past_f() {
        // k = 1: f e + (H1 - H2)
        let x = commute_e_past_fdiv(1, Mode::Universal);
        let expected = &(&fhe(Generator::F).mul(&fhe(Generator::E), Mode::Universal) + &fhe(Generator::H1))
            - &fhe(Generator::H2);
        assert_eq!(x, expected);
        // k = 2: f^(2) e + f (H1 - H2 - 1)
        let x = commute_e_past_fdiv(2, Mode::Universal);
        let mut expected = Element::basis(Flavor::Fhe, NormalMonomial::new(2, 0, 1));
        expected.add_term(NormalMonomial::with_alt(1, 0, 0, 1), rat(1));
        expected.add_term(NormalMonomial::new(1, 1, 0), rat(-1));
        expected.add_term(NormalMonomial::new(1, 0, 0), rat(-1));
        assert_eq!(x, expected);
        // collapsed at d = 1: f e + 1 - 2 binom(H2,1)
        let x = commute_e_past_fdiv(1, Mode::Schur(1));
        let mut expected = Element::basis(Flavor::Fhe, NormalMonomial::new(1, 0, 1));
        expected.add_term(NormalMonomial::ONE, rat(1));
        expected.add_term(NormalMonomial::new(0, 1, 0), rat(-2));
        assert_eq!(x, expected);
    }

    #[test]
    fn mul_examples() {
        let e = fhe(Generator::E);
        let f = fhe(Generator::F);
        let ef = e.mul(&f, Mode::Universal);
        let expected = &(&f.mul(&e, Mode::Universal) + &fhe(Generator::H1)) - &fhe(Generator::H2);
        assert_eq!(ef, expected);
        assert_eq!(Element::one(Flavor::Fhe).mul(&ef, Mode::Universal), ef);
        let f5 = fhe(Generator::FDiv(2)).mul(&fhe(Generator::FDiv(3)), Mode::Universal);
        assert_eq!(f5, Element::monomial(Flavor::Fhe, NormalMonomial::new(5, 0, 0), rat(10)));
        // plain powers become scaled divided powers
        assert_eq!(f.pow(2, Mode::Universal), fhe(Generator::FDiv(2)).scale(&rat(2)));
    }

    #[test]
    fn straightening_routes_agree() {
        for r in 0..=6 {
            for s in 0..=6 {
                let left = groups_to_element(&straightened(r, s, None, Rules::default()));
                let right = groups_to_element(&straighten_right(r, s));
                assert_eq!(left, right, "e^({r}) f^({s})");
                assert!(left.is_integral(), "e^({r}) f^({s}) not integral");
            }
        }
    }

    #[test]
    fn faulty_rules_change_products() {
        let e = fhe(Generator::E);
        let f = fhe(Generator::F);
        assert_ne!(e.mul_with(&f, Mode::Universal, Rules::faulty_commutator()), e.mul(&f, Mode::Universal));
    }

    #[test]
    fn symmetry_examples() {
        let x = Element::basis(Flavor::Fhe, NormalMonomial::new(2, 1, 1));
        let y = x.symmetry();
        assert_eq!(y.flavor(), Flavor::Ehf);
        assert_eq!(y.to_string(), "E(2)*binom(H1,1)*F(1)");
        assert_eq!(Element::one(Flavor::Fhe).symmetry(), Element::one(Flavor::Ehf));
        assert_eq!(y.symmetry(), x);
    }

    #[test]
    fn generators_per_flavor() {
        let e = Element::generator(Flavor::Ehf, Generator::E);
        assert_eq!(e.to_string(), "E(1)");
        let h = Element::generator(Flavor::Ehf, Generator::H);
        assert_eq!(h.to_string(), "binom(H1,1) - binom(H2,1)");
        let h = fhe(Generator::H);
        assert_eq!(h.to_string(), "binom(H1,1) - binom(H2,1)");
        let b = fhe(Generator::Binom(Var::Hdiff, 2));
        // binom(h,2) = h(h-1)/2
        let hh = h.mul(&h, Mode::Universal);
        assert_eq!(b, (&hh - &h).scale(&rat_frac(1, 2)));
    }

    #[test]
    fn render() {
        let mut x = Element::zero(Flavor::Fhe);
        x.add_term(NormalMonomial::new(1, 0, 1), rat(1));
        x.add_term(NormalMonomial::ONE, rat(2));
        x.add_term(NormalMonomial::new(0, 1, 0), rat(-2));
        assert_eq!(x.to_string(), "F(1)*E(1) + 2 - 2*binom(H2,1)");
        assert_eq!(Element::zero(Flavor::Fhe).to_string(), "0");
        let y = Element::monomial(Flavor::Fhe, NormalMonomial::new(2, 0, 0), rat_frac(-1, 2));
        assert_eq!(y.to_string(), "-1/2*F(2)");
    }
}
