//! The truncated algebra `B_d`, isomorphic to the Schur algebra `S(2,d)`.
//!
//! Elements are kept in the truncated Kostant basis
//! `f^(a) binom(H2,b) e^(c)` with `a + b + c <= d` (or its mirror image for
//! the `Ehf` flavor). Monomials of larger degree are rewritten with the
//! closed reduction formula
//!
//! ```text
//! f^(a) binom(H2,b) e^(c) = sum_{k=s}^{min(a,c)} (-1)^(k-s) binom(k-1,s-1) binom(b+k,k)
//!                             f^(a-k) binom(H2,b+k) e^(c-k),      s = a+b+c-d,
//! ```
//!
//! whose terms all have degree `a+b+c-k <= d`, so one pass suffices.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::exactmath::{binom_i, fmt_rational, IVPoly, Rational};
use crate::linalg::{min_poly_from_powers, Poly, SparseVec};
use crate::straighten::{render_terms, CartanPoly, Element, Flavor, Generator, Mode, NormalMonomial, Rules};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SchurContext {
    pub d: u32,
    pub flavor: Flavor,
}

impl SchurContext {
    pub fn new(d: u32, flavor: Flavor) -> Self {
        SchurContext { d, flavor }
    }

    pub fn fhe(d: u32) -> Self {
        SchurContext::new(d, Flavor::Fhe)
    }

    pub fn mode(&self) -> Mode {
        Mode::Schur(self.d)
    }

    pub fn generator(&self, g: Generator) -> Element {
        normalize(&Element::generator(self.flavor, g), self)
    }

    pub fn dimension(&self) -> usize {
        dimension(self.d)
    }
}

/// `binom(d+3, 3)`
pub fn dimension(d: u32) -> usize {
    let d = d as usize;
    (d + 1) * (d + 2) * (d + 3) / 6
}

/// All `(a, b, c)` with `a + b + c <= d`, lexicographically.
pub fn basis(ctx: &SchurContext) -> Vec<NormalMonomial> {
    let d = ctx.d;
    let mut out = Vec::with_capacity(ctx.dimension());
    for a in 0..=d {
        for b in 0..=d - a {
            for c in 0..=d - a - b {
                out.push(NormalMonomial::new(a, b, c));
            }
        }
    }
    out
}

/// Rewrites one monomial of the context's flavor into the truncated basis.
pub fn reduce_monomial(a: u32, b: u32, c: u32, ctx: &SchurContext) -> Element {
    Element::from_terms(ctx.flavor, reduce_terms(a, b, c, ctx.d))
}

fn reduce_terms(a: u32, b: u32, c: u32, d: u32) -> Vec<(NormalMonomial, Rational)> {
    let deg = a + b + c;
    if deg <= d {
        return vec![(NormalMonomial::new(a, b, c), Rational::one())];
    }
    let s = deg - d;
    let top = a.min(c);
    let mut out = Vec::new();
    // empty when min(a, c) < s
    for k in s..=top {
        let sign = if (k - s).is_multiple_of(2) { BigInt::one() } else { -BigInt::one() };
        let coeff = sign * binom_i(k as i64 - 1, s as i64 - 1) * binom_i((b + k) as i64, k as i64);
        let m = NormalMonomial::new(a - k, b + k, c - k);
        debug_assert!(m.degree() <= d);
        out.push((m, Rational::from_integer(coeff)));
    }
    out
}

/// Reduces every term of `x` into the truncated basis of `B_d` for `x`'s own
/// flavor, eliminating the alternate Cartan element first.
pub(crate) fn normalize_terms(x: &Element, d: u32) -> Element {
    let mut acc: BTreeMap<NormalMonomial, Rational> = BTreeMap::new();
    for (m, q) in x.terms() {
        let poly = CartanPoly::basis(m.b, m.alt).collapse(d);
        for (&(b, _), n) in &poly.terms {
            let qn = q * Rational::from_integer(n.clone());
            for (r, coeff) in reduce_terms(m.a, b, m.c, d) {
                assert!(r.degree() <= d, "reduction left a term of degree > d");
                *acc.entry(r).or_insert_with(Rational::zero) += &qn * coeff;
            }
        }
    }
    Element::from_terms(x.flavor(), acc)
}

/// Image of `x` in `B_d`, written in the truncated Kostant basis.
///
/// Panics if `x` and `ctx` disagree on the flavor.
pub fn normalize(x: &Element, ctx: &SchurContext) -> Element {
    assert_eq!(x.flavor(), ctx.flavor, "normalize: flavor mismatch");
    normalize_terms(x, ctx.d)
}

pub fn mul_bd(x: &Element, y: &Element, ctx: &SchurContext) -> Element {
    assert_eq!(x.flavor(), ctx.flavor, "mul_bd: flavor mismatch");
    x.mul(y, ctx.mode())
}

/// Products of all ordered pairs of basis elements.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureTable {
    pub d: u32,
    pub flavor: Flavor,
    pub basis: Vec<NormalMonomial>,
    /// `products[i * n + j]` lists `(k, coefficient)` sorted by `k`.
    pub products: Vec<Vec<(usize, Rational)>>,
}

impl StructureTable {
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn entry(&self, i: usize, j: usize) -> &[(usize, Rational)] {
        &self.products[i * self.basis.len() + j]
    }

    pub fn index_of(&self, m: &NormalMonomial) -> Option<usize> {
        self.basis.binary_search(m).ok()
    }

    pub fn is_integral(&self) -> bool {
        self.products.iter().flatten().all(|(_, q)| q.is_integer())
    }

    /// Applies the `e <-> f`, `H1 <-> H2` automorphism to every entry.
    pub fn symmetry(&self) -> StructureTable {
        let ctx = SchurContext::new(self.d, self.flavor);
        let mut out = self.clone();
        out.flavor = self.flavor.swapped();
        for (idx, entry) in out.products.iter_mut().enumerate() {
            let x = self.element_of(&ctx, &self.products[idx]).symmetry();
            *entry = x.terms().map(|(m, q)| (self.index_of(m).expect("basis monomial"), q.clone())).collect();
        }
        out
    }

    pub fn element_of(&self, ctx: &SchurContext, entry: &[(usize, Rational)]) -> Element {
        Element::from_terms(ctx.flavor, entry.iter().map(|(k, q)| (self.basis[*k], q.clone())))
    }

    pub fn to_json(&self) -> String {
        let doc = TableJson {
            d: self.d,
            flavor: self.flavor.name().to_string(),
            basis: self.basis.iter().map(|m| MonoJson { a: m.a, b: m.b, c: m.c }).collect(),
            products: self
                .products
                .iter()
                .enumerate()
                .map(|(idx, terms)| ProductJson {
                    i: idx / self.basis.len(),
                    j: idx % self.basis.len(),
                    terms: terms
                        .iter()
                        .map(|(k, q)| TermJson { k: *k, num: q.numer().to_string(), den: q.denom().to_string() })
                        .collect(),
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("table serializes")
    }

    pub fn from_json(s: &str) -> Result<StructureTable, serde_json::Error> {
        let doc: TableJson = serde_json::from_str(s)?;
        let flavor = doc.flavor.parse::<Flavor>().map_err(serde::de::Error::custom)?;
        let n = doc.basis.len();
        let mut products = vec![Vec::new(); n * n];
        for p in doc.products {
            let terms = p
                .terms
                .into_iter()
                .map(|t| {
                    let num: BigInt = t.num.parse().map_err(serde::de::Error::custom)?;
                    let den: BigInt = t.den.parse().map_err(serde::de::Error::custom)?;
                    Ok((t.k, Rational::new(num, den)))
                })
                .collect::<Result<Vec<_>, serde_json::Error>>()?;
            products[p.i * n + p.j] = terms;
        }
        Ok(StructureTable {
            d: doc.d,
            flavor,
            basis: doc.basis.into_iter().map(|m| NormalMonomial::new(m.a, m.b, m.c)).collect(),
            products,
        })
    }

    /// Header `i,j,k,num,den`, then one row per nonzero coefficient.
    pub fn to_csv(&self) -> String {
        let n = self.basis.len();
        let mut out = String::from("i,j,k,num,den\n");
        for (idx, terms) in self.products.iter().enumerate() {
            for (k, q) in terms {
                out.push_str(&format!("{},{},{},{},{}\n", idx / n, idx % n, k, q.numer(), q.denom()));
            }
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    d: u32,
    flavor: String,
    basis: Vec<MonoJson>,
    products: Vec<ProductJson>,
}

#[derive(Serialize, Deserialize)]
struct MonoJson {
    a: u32,
    b: u32,
    c: u32,
}

#[derive(Serialize, Deserialize)]
struct ProductJson {
    i: usize,
    j: usize,
    terms: Vec<TermJson>,
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    k: usize,
    num: String,
    den: String,
}

pub fn structure_constants(ctx: &SchurContext) -> StructureTable {
    structure_constants_with(ctx, Rules::default())
}

pub fn structure_constants_with(ctx: &SchurContext, rules: Rules) -> StructureTable {
    let basis = basis(ctx);
    let n = basis.len();
    let elems: Vec<Element> = basis.iter().map(|m| Element::basis(ctx.flavor, *m)).collect();
    let products = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let x = elems[idx / n].mul_with(&elems[idx % n], ctx.mode(), rules);
            x.terms()
                .map(|(m, q)| (basis.binary_search(m).expect("product stays in the basis"), q.clone()))
                .collect::<Vec<_>>()
        })
        .collect();
    StructureTable { d: ctx.d, flavor: ctx.flavor, basis, products }
}

/// Which PBW-style view of an element to produce.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PbwKind {
    /// `f^a H2^b e^c` (or `e^a H1^b f^c`)
    Power,
    /// `f^a h^b e^c` (or `e^a h^b f^c`)
    HBasis,
}

/// Coordinates over plain powers `L^a X^b R^c`, `a + b + c <= d`, where `X`
/// is the primary Cartan element or `h`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PbwView {
    pub kind: PbwKind,
    pub flavor: Flavor,
    pub coeffs: BTreeMap<NormalMonomial, Rational>,
}

impl fmt::Display for PbwView {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (l, r) = match self.flavor {
            Flavor::Fhe => ("f", "e"),
            Flavor::Ehf => ("e", "f"),
        };
        let x = match self.kind {
            PbwKind::Power => self.flavor.primary().name(),
            PbwKind::HBasis => "h",
        };
        let pow = |g: &str, n: u32| match n {
            0 => None,
            1 => Some(g.to_string()),
            _ => Some(format!("{g}^{n}")),
        };
        let mut terms: Vec<_> = self.coeffs.iter().filter(|(_, q)| !q.is_zero()).collect();
        terms.sort_by_key(|(m, _)| m.display_key(self.flavor));
        let rendered = terms.into_iter().map(|(m, q)| {
            let factors: Vec<String> = [pow(l, m.a), pow(x, m.b), pow(r, m.c)].into_iter().flatten().collect();
            (factors.join("*"), q)
        });
        f.write_str(&render_terms(rendered))
    }
}

fn factorial(n: u32) -> BigInt {
    (1..=n as u64).map(BigInt::from).product()
}

/// Truncated PBW coordinates `L^a P^b R^c` of `normalize(x)`.
pub fn to_power_basis(x: &Element, ctx: &SchurContext) -> PbwView {
    let y = normalize(x, ctx);
    let mut coeffs = BTreeMap::new();
    for (m, q) in y.terms() {
        let scale = q / Rational::from_integer(factorial(m.a) * factorial(m.c));
        let p = IVPoly::binomial(ctx.flavor.primary(), m.b as usize).to_power_coeffs();
        for (k, pk) in p.into_iter().enumerate() {
            add_to(&mut coeffs, NormalMonomial::new(m.a, k as u32, m.c), &scale * pk);
        }
    }
    PbwView { kind: PbwKind::Power, flavor: ctx.flavor, coeffs }
}

/// Inverse of [`to_power_basis`].
pub fn from_power_basis(view: &PbwView, ctx: &SchurContext) -> Element {
    assert_eq!(view.kind, PbwKind::Power);
    let mut x = Element::zero(ctx.flavor);
    for (m, q) in &view.coeffs {
        let scale = q * Rational::from_integer(factorial(m.a) * factorial(m.c));
        // P^b in the binomial basis, from its values at 0..=b
        let values: Vec<BigInt> = (0..=m.b as u64).map(|n| BigInt::from(n).pow(m.b)).collect();
        let p = IVPoly::from_values(ctx.flavor.primary(), &values);
        for (k, pk) in p.coeffs().iter().enumerate() {
            x.add_term(NormalMonomial::new(m.a, k as u32, m.c), &scale * Rational::from_integer(pk.clone()));
        }
    }
    normalize(&x, ctx)
}

// `P = (d + sign * h) / 2` with sign -1 for H2 and +1 for H1
fn h_sign(flavor: Flavor) -> i64 {
    match flavor {
        Flavor::Fhe => -1,
        Flavor::Ehf => 1,
    }
}

/// Truncated PBW coordinates `L^a h^b R^c` of `normalize(x)`.
pub fn to_h_basis(x: &Element, ctx: &SchurContext) -> PbwView {
    let power = to_power_basis(x, ctx);
    let d = Rational::from_integer(ctx.d.into());
    let sign = Rational::from_integer(h_sign(ctx.flavor).into());
    let half = Rational::new(BigInt::one(), BigInt::from(2));
    let mut coeffs = BTreeMap::new();
    for (m, q) in &power.coeffs {
        // ((d + sign h)/2)^b = sum_i binom(b,i) d^(b-i) (sign h)^i / 2^b
        for i in 0..=m.b {
            let c = Rational::from_integer(binom_i(m.b as i64, i as i64))
                * pow_q(&d, m.b - i)
                * pow_q(&sign, i)
                * pow_q(&half, m.b);
            add_to(&mut coeffs, NormalMonomial::new(m.a, i, m.c), q * c);
        }
    }
    PbwView { kind: PbwKind::HBasis, flavor: ctx.flavor, coeffs }
}

/// Inverse of [`to_h_basis`].
pub fn from_h_basis(view: &PbwView, ctx: &SchurContext) -> Element {
    assert_eq!(view.kind, PbwKind::HBasis);
    let d = Rational::from_integer(ctx.d.into());
    let sign = Rational::from_integer(h_sign(ctx.flavor).into());
    let mut coeffs = BTreeMap::new();
    for (m, q) in &view.coeffs {
        // h^b = (sign (2P - d))^b = sign^b sum_i binom(b,i) 2^i P^i (-d)^(b-i)
        for i in 0..=m.b {
            let c = pow_q(&sign, m.b)
                * Rational::from_integer(binom_i(m.b as i64, i as i64))
                * pow_q(&Rational::from_integer(2.into()), i)
                * pow_q(&-d.clone(), m.b - i);
            add_to(&mut coeffs, NormalMonomial::new(m.a, i, m.c), q * c);
        }
    }
    from_power_basis(&PbwView { kind: PbwKind::Power, flavor: ctx.flavor, coeffs }, ctx)
}

fn pow_q(x: &Rational, n: u32) -> Rational {
    (0..n).fold(Rational::one(), |acc, _| acc * x)
}

fn add_to(map: &mut BTreeMap<NormalMonomial, Rational>, m: NormalMonomial, q: Rational) {
    if q.is_zero() {
        return;
    }
    let slot = map.entry(m).or_insert_with(Rational::zero);
    *slot += q;
    if slot.is_zero() {
        map.remove(&m);
    }
}

/// Coordinates of an element over `basis(ctx)` as a sparse vector.
pub fn coordinates(x: &Element, basis: &[NormalMonomial]) -> SparseVec {
    x.terms()
        .map(|(m, q)| (basis.binary_search(m).expect("element is in the truncated basis"), q.clone()))
        .collect()
}

/// Minimal polynomial of `normalize(x)` acting by left multiplication on
/// `B_d`. `B_d` is unital and acts faithfully on itself, so this is the
/// first linear dependency among `1, x, x^2, ...` computed with `mul_bd`.
pub fn min_poly(x: &Element, ctx: &SchurContext) -> Poly {
    min_poly_with(x, ctx, Rules::default())
}

pub fn min_poly_with(x: &Element, ctx: &SchurContext, rules: Rules) -> Poly {
    let y = normalize(x, ctx);
    let basis = basis(ctx);
    let mut power = normalize(&Element::one(ctx.flavor), ctx);
    let n = basis.len();
    min_poly_from_powers(
        |k| {
            if k > 0 {
                power = power.mul_with(&y, ctx.mode(), rules);
            }
            coordinates(&power, &basis)
        },
        n,
    )
    .expect("powers are dependent within dim + 1 steps")
}

/// One defining relation or derived identity, stored as `lhs - rhs` computed
/// without truncation.
#[derive(Clone, Debug)]
pub struct Relation {
    pub name: String,
    pub residual: Element,
}

#[derive(Clone, Debug)]
pub struct RelationResult {
    pub name: String,
    pub normalized: Element,
}

impl RelationResult {
    pub fn holds(&self) -> bool {
        self.normalized.is_zero()
    }
}

#[derive(Clone, Debug)]
pub struct RelationReport {
    pub d: u32,
    pub flavor: Flavor,
    pub results: Vec<RelationResult>,
}

impl RelationReport {
    pub fn all_hold(&self) -> bool {
        self.results.iter().all(RelationResult::holds)
    }

    pub fn failures(&self) -> impl Iterator<Item = &RelationResult> {
        self.results.iter().filter(|r| !r.holds())
    }
}

struct RelationBuilder {
    flavor: Flavor,
    out: Vec<Relation>,
}

impl RelationBuilder {
    fn g(&self, g: Generator) -> Element {
        Element::generator(self.flavor, g)
    }

    fn k(&self, n: i64) -> Element {
        Element::scalar(self.flavor, Rational::from_integer(n.into()))
    }

    fn push(&mut self, name: impl Into<String>, residual: Element) {
        self.out.push(Relation { name: name.into(), residual });
    }
}

fn mul(x: &Element, y: &Element) -> Element {
    x.mul(y, Mode::Universal)
}

fn commutator(x: &Element, y: &Element) -> Element {
    &mul(x, y) - &mul(y, x)
}

/// `prod_{i=0}^{n} (x - start - step * i)`
fn shifted_product(x: &Element, start: i64, step: i64, n: u32) -> Element {
    let flavor = x.flavor();
    (0..=n as i64).fold(Element::one(flavor), |acc, i| {
        let factor = x - &Element::scalar(flavor, Rational::from_integer((start + step * i).into()));
        mul(&acc, &factor)
    })
}

/// The relations of the `sl2`-style presentation with parameter `d`:
/// the three commutators and `(h+d)(h+d-2)...(h-d) = 0`.
pub fn sl2_relations(d: u32, flavor: Flavor) -> Vec<Relation> {
    let mut rb = RelationBuilder { flavor, out: Vec::new() };
    let (e, f, h) = (rb.g(Generator::E), rb.g(Generator::F), rb.g(Generator::H));
    rb.push("he - eh = 2e", &commutator(&h, &e) - &e.scale(&Rational::from_integer(2.into())));
    rb.push("ef - fe = h", &commutator(&e, &f) - &h);
    rb.push("hf - fh = -2f", &commutator(&h, &f) + &f.scale(&Rational::from_integer(2.into())));
    rb.push(format!("(h+{d})(h+{})...(h-{d}) = 0", d as i64 - 2), shifted_product(&h, -(d as i64), 2, d));
    rb.out
}

/// Every defining relation of the three presentations of `B_d` plus the
/// derived vanishing and commutation identities, as unreduced residuals.
pub fn defining_relations(d: u32, flavor: Flavor) -> Vec<Relation> {
    let mut rb = RelationBuilder { flavor, out: Vec::new() };
    let (e, f, h1, h2) = (rb.g(Generator::E), rb.g(Generator::F), rb.g(Generator::H1), rb.g(Generator::H2));
    let di = d as i64;

    // enveloping algebra of gl2 together with H1 + H2 = d and the truncation
    rb.push("H1 H2 = H2 H1", commutator(&h1, &h2));
    rb.push("H1 e - e H1 = e", &commutator(&h1, &e) - &e);
    rb.push("H1 f - f H1 = -f", &commutator(&h1, &f) + &f);
    rb.push("H2 e - e H2 = -e", &commutator(&h2, &e) + &e);
    rb.push("H2 f - f H2 = f", &commutator(&h2, &f) - &f);
    rb.push("ef - fe = H1 - H2", &commutator(&e, &f) - &(&h1 - &h2));
    rb.push("H1 + H2 = d", &(&h1 + &h2) - &rb.k(di));
    rb.push(format!("H1(H1-1)...(H1-{d}) = 0"), shifted_product(&h1, 0, 1, d));
    rb.push(format!("H2(H2-1)...(H2-{d}) = 0"), shifted_product(&h2, 0, 1, d));

    // sl2 presentation
    let sl2 = sl2_relations(d, flavor);
    rb.out.extend(sl2);

    // presentation in e, f, H1 and in e, f, H2
    rb.push("ef - fe = 2H1 - d", &commutator(&e, &f) - &(&h1.scale(&Rational::from_integer(2.into())) - &rb.k(di)));
    rb.push("ef - fe = d - 2H2", &commutator(&e, &f) - &(&rb.k(di) - &h2.scale(&Rational::from_integer(2.into()))));

    // binom(H1,b1) binom(H2,b2) = 0 for b1 + b2 in {d+1, d+2}
    for total in d + 1..=d + 2 {
        for b1 in 0..=total {
            let x = mul(&rb.g(Generator::Binom(crate::Var::H1, b1)), &rb.g(Generator::Binom(crate::Var::H2, total - b1)));
            rb.push(format!("binom(H1,{b1}) binom(H2,{}) = 0", total - b1), x);
        }
    }

    // f^a binom(H2,b) = binom(H2,b) e^a = e^a binom(H1,b) = binom(H1,b) f^a = 0 for a + b = d + 1
    for a in 0..=d + 1 {
        let b = d + 1 - a;
        let fa = f.pow(a, Mode::Universal);
        let ea = e.pow(a, Mode::Universal);
        let bh1 = rb.g(Generator::Binom(crate::Var::H1, b));
        let bh2 = rb.g(Generator::Binom(crate::Var::H2, b));
        rb.push(format!("f^{a} binom(H2,{b}) = 0"), mul(&fa, &bh2));
        rb.push(format!("binom(H2,{b}) e^{a} = 0"), mul(&bh2, &ea));
        rb.push(format!("e^{a} binom(H1,{b}) = 0"), mul(&ea, &bh1));
        rb.push(format!("binom(H1,{b}) f^{a} = 0"), mul(&bh1, &fa));
    }

    // (H1 - H2) binom(H2,b) = (d-2b) binom(H2,b) - (2b+2) binom(H2,b+1), and mirrored
    for b in 0..=d {
        let bi = b as i64;
        for (x, y) in [(Generator::H1, crate::Var::H2), (Generator::H2, crate::Var::H1)] {
            let other = if x == Generator::H1 { Generator::H2 } else { Generator::H1 };
            let diff = &rb.g(x) - &rb.g(other);
            let bb = rb.g(Generator::Binom(y, b));
            let bb1 = rb.g(Generator::Binom(y, b + 1));
            let rhs = &bb.scale(&Rational::from_integer((di - 2 * bi).into()))
                - &bb1.scale(&Rational::from_integer((2 * bi + 2).into()));
            let (xn, on) = if x == Generator::H1 { ("H1", "H2") } else { ("H2", "H1") };
            rb.push(
                format!("({xn} - {on}) binom({y},{b}) = {}binom({y},{b}) - {}binom({y},{})", di - 2 * bi, 2 * bi + 2, b + 1),
                &mul(&diff, &bb) - &rhs,
            );
        }
    }
    rb.out
}

/// Normalizes every relation from [`defining_relations`] in `B_d`.
pub fn check_relations(ctx: &SchurContext) -> RelationReport {
    check_relation_list(ctx, defining_relations(ctx.d, ctx.flavor))
}

pub fn check_relation_list(ctx: &SchurContext, relations: Vec<Relation>) -> RelationReport {
    let results = relations
        .into_par_iter()
        .map(|r| RelationResult { name: r.name, normalized: normalize(&r.residual, ctx) })
        .collect();
    RelationReport { d: ctx.d, flavor: ctx.flavor, results }
}

/// Generators of `B_{d+2}` map onto those of `B_d`: every relation of the
/// `sl2` presentation with parameter `d + 2` vanishes in `B_d`.
pub fn quotient_map_check(ctx: &SchurContext) -> bool {
    check_relation_list(ctx, sl2_relations(ctx.d + 2, ctx.flavor)).all_hold()
}

impl fmt::Display for RelationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            let status = if r.holds() { "ok" } else { "FAIL" };
            write!(f, "[{status}] {}", r.name)?;
            if !r.holds() {
                write!(f, "  (reduces to {})", r.normalized)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Renders a rational the way tables and reports do.
pub fn render_rational(q: &Rational) -> String {
    fmt_rational(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rat;

    fn fhe(d: u32) -> SchurContext {
        SchurContext::fhe(d)
    }

    #[test]
    fn basis_sizes() {
        assert_eq!(basis(&fhe(0)), vec![NormalMonomial::ONE]);
        assert_eq!(basis(&fhe(1)).len(), 4);
        assert_eq!(basis(&fhe(2)).len(), 10);
        for d in 0..8 {
            assert_eq!(basis(&fhe(d)).len(), dimension(d));
        }
    }

    #[test]
    fn reduce_examples() {
        let ctx = fhe(1);
        assert_eq!(reduce_monomial(1, 0, 1, &ctx), Element::basis(Flavor::Fhe, NormalMonomial::new(0, 1, 0)));
        assert!(reduce_monomial(1, 1, 0, &ctx).is_zero());
        assert!(reduce_monomial(0, 0, 2, &ctx).is_zero());
        let ctx2 = fhe(2);
        assert_eq!(
            reduce_monomial(1, 1, 1, &ctx2),
            Element::monomial(Flavor::Fhe, NormalMonomial::new(0, 2, 0), rat(2))
        );
        for d in 0..4 {
            assert!(reduce_monomial(0, 0, d + 1, &fhe(d)).is_zero());
        }
        assert_eq!(reduce_monomial(1, 0, 1, &ctx2), Element::basis(Flavor::Fhe, NormalMonomial::new(1, 0, 1)));
    }

    #[test]
    fn normalize_examples() {
        let ctx = fhe(1);
        let x = Element::basis(Flavor::Fhe, NormalMonomial::new(1, 1, 0));
        assert!(normalize(&x, &ctx).is_zero());
        let ctx2 = fhe(2);
        let mut x = Element::basis(Flavor::Fhe, NormalMonomial::new(0, 2, 0));
        x.add_term(NormalMonomial::new(1, 1, 1), rat(1));
        assert_eq!(normalize(&x, &ctx2), Element::monomial(Flavor::Fhe, NormalMonomial::new(0, 2, 0), rat(3)));
        let b = Element::basis(Flavor::Fhe, NormalMonomial::new(1, 1, 0));
        assert_eq!(normalize(&b, &ctx2), b);
    }

    #[test]
    fn mul_bd_examples() {
        let ctx = fhe(2);
        let e = Element::generator(Flavor::Fhe, Generator::E);
        let f = Element::generator(Flavor::Fhe, Generator::F);
        assert_eq!(mul_bd(&e, &f, &ctx).to_string(), "F(1)*E(1) + 2 - 2*binom(H2,1)");
        assert_eq!(mul_bd(&e, &f, &fhe(1)).to_string(), "1 - binom(H2,1)");
        let e2 = Element::generator(Flavor::Fhe, Generator::EDiv(2));
        assert!(mul_bd(&e2, &e, &ctx).is_zero());
        assert_eq!(e2.mul(&e, Mode::Universal), Element::monomial(Flavor::Fhe, NormalMonomial::new(0, 0, 3), rat(3)));
        let x = Element::basis(Flavor::Fhe, NormalMonomial::new(1, 1, 0));
        assert_eq!(mul_bd(&x, &Element::one(Flavor::Fhe), &ctx), normalize(&x, &ctx));
    }

    #[test]
    fn tables() {
        let t0 = structure_constants(&fhe(0));
        assert_eq!(t0.len(), 1);
        assert_eq!(t0.entry(0, 0), &[(0, rat(1))]);
        let t1 = structure_constants(&fhe(1));
        let fi = t1.index_of(&NormalMonomial::new(1, 0, 0)).unwrap();
        let ei = t1.index_of(&NormalMonomial::new(0, 0, 1)).unwrap();
        let hi = t1.index_of(&NormalMonomial::new(0, 1, 0)).unwrap();
        assert_eq!(t1.entry(fi, ei), &[(hi, rat(1))]);
        for t in [&t0, &t1] {
            for j in 0..t.len() {
                assert_eq!(t.entry(0, j), &[(j, rat(1))]);
                assert_eq!(t.entry(j, 0), &[(j, rat(1))]);
            }
        }
        assert!(t1.is_integral());
        let back = StructureTable::from_json(&t1.to_json()).unwrap();
        assert_eq!(back, t1);
        assert_eq!(t1.to_csv().lines().next(), Some("i,j,k,num,den"));
    }

    #[test]
    fn power_basis_examples() {
        let ctx = fhe(3);
        let f2 = Element::generator(Flavor::Fhe, Generator::FDiv(2));
        let v = to_power_basis(&f2, &ctx);
        assert_eq!(v.to_string(), "1/2*f^2");
        let b2 = Element::generator(Flavor::Fhe, Generator::Binom(crate::Var::H2, 2));
        assert_eq!(to_power_basis(&b2, &ctx).to_string(), "-1/2*H2 + 1/2*H2^2");
        for m in basis(&ctx) {
            let x = Element::basis(Flavor::Fhe, m);
            assert_eq!(from_power_basis(&to_power_basis(&x, &ctx), &ctx), x);
        }
    }

    #[test]
    fn h_basis_examples() {
        let ctx = fhe(2);
        let h2 = ctx.generator(Generator::H2);
        assert_eq!(to_h_basis(&h2, &ctx).to_string(), "1 - 1/2*h");
        let h = ctx.generator(Generator::H);
        assert_eq!(to_h_basis(&h, &ctx).to_string(), "h");
        let ectx = SchurContext::new(2, Flavor::Ehf);
        assert_eq!(to_h_basis(&ectx.generator(Generator::H), &ectx).to_string(), "h");
        for ctx in [ctx, ectx] {
            for m in basis(&ctx) {
                let x = Element::basis(ctx.flavor, m);
                assert_eq!(from_h_basis(&to_h_basis(&x, &ctx), &ctx), x);
            }
        }
    }

    #[test]
    fn min_poly_examples() {
        let ctx = fhe(3);
        let p = min_poly(&ctx.generator(Generator::H1), &ctx);
        assert_eq!(p, Poly::from_roots((0..=3).map(rat)));
        let ctx2 = fhe(2);
        assert_eq!(min_poly(&ctx2.generator(Generator::H), &ctx2).to_string(), "T^3 - 4*T");
        assert_eq!(min_poly(&Element::one(Flavor::Fhe), &ctx2).to_string(), "T - 1");
    }

    #[test]
    fn relations_hold_small_d() {
        for d in 0..=3 {
            for flavor in [Flavor::Fhe, Flavor::Ehf] {
                let report = check_relations(&SchurContext::new(d, flavor));
                assert!(report.all_hold(), "d={d} {flavor:?}\n{report}");
            }
        }
    }

    #[test]
    fn perturbed_relation_is_reported() {
        let ctx = fhe(1);
        let e = Element::generator(Flavor::Fhe, Generator::E);
        let f = Element::generator(Flavor::Fhe, Generator::F);
        let h = Element::generator(Flavor::Fhe, Generator::H);
        let bad = &(&commutator(&e, &f) - &h) - &Element::one(Flavor::Fhe);
        let report = check_relation_list(&ctx, vec![Relation { name: "ef - fe = h + 1".into(), residual: bad }]);
        assert!(!report.all_hold());
        assert_eq!(report.failures().count(), 1);
    }

    #[test]
    fn quotient_maps() {
        for d in [0, 1, 4] {
            assert!(quotient_map_check(&fhe(d)), "d={d}");
        }
    }
}
