//! Free graded-commutative polynomial algebras over named generators.
//!
//! A [`GeneratorTable`] fixes an ordered list of generators with integer
//! degrees. A [`SuperPoly`] is a finite linear combination of normal-ordered
//! monomials: generators appear in table order, odd generators with exponent
//! at most one. Products reorder factors with Koszul signs, and derivatives
//! are left derivatives unless stated otherwise.
//!
//! # Text format
//!
//! ```text
//! poly   ::= "0" | ["-"] term ((" + " | " - ") term)*
//! term   ::= coeff ("*" factor)* | factor ("*" factor)*
//! factor ::= name ("^" posint)?
//! coeff  ::= int | int "/" posint
//! ```
//!
//! Serialization omits a unit coefficient (`c1*y1`, `-c1*c2`) and sorts
//! terms by polynomial degree, then by descending exponent vector. Parsing
//! accepts factors in any order and applies the Koszul sign of reordering.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A named generator of a graded-commutative algebra.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Generator {
    pub name: String,
    pub degree: i64,
}

impl Generator {
    pub fn new(name: impl Into<String>, degree: i64) -> Self {
        Generator {
            name: name.into(),
            degree,
        }
    }

    pub fn is_odd(&self) -> bool {
        self.degree.rem_euclid(2) == 1
    }
}

/// An ordered list of generators; the order is the normal order of
/// monomials.
#[derive(Debug, Clone)]
pub struct GeneratorTable {
    gens: Vec<Generator>,
    by_name: HashMap<String, usize>,
    odd: Vec<usize>,
}

impl PartialEq for GeneratorTable {
    fn eq(&self, other: &Self) -> bool {
        self.gens == other.gens
    }
}

impl Eq for GeneratorTable {}

fn valid_name(name: &str) -> bool {
    let letters = name.chars().take_while(|c| c.is_ascii_lowercase()).count();
    let rest = &name[letters..];
    letters > 0 && !rest.is_empty() && rest.chars().all(|c| c.is_ascii_digit())
}

impl GeneratorTable {
    /// Builds a table, checking that names match `[a-z]+[0-9]+` and are
    /// distinct.
    pub fn new(gens: Vec<Generator>) -> Result<Arc<Self>> {
        if gens.len() > u16::MAX as usize {
            return Err(Error::Argument("too many generators".into()));
        }
        let mut by_name = HashMap::new();
        for (i, g) in gens.iter().enumerate() {
            if !valid_name(&g.name) {
                return Err(Error::Argument(format!(
                    "generator name {:?} does not match [a-z]+[0-9]+",
                    g.name
                )));
            }
            if by_name.insert(g.name.clone(), i).is_some() {
                return Err(Error::Argument(format!("duplicate generator {:?}", g.name)));
            }
        }
        let odd = (0..gens.len()).filter(|&i| gens[i].is_odd()).collect();
        Ok(Arc::new(GeneratorTable { gens, by_name, odd }))
    }

    pub fn len(&self) -> usize {
        self.gens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gens.is_empty()
    }

    pub fn generator(&self, index: usize) -> &Generator {
        &self.gens[index]
    }

    pub fn generators(&self) -> &[Generator] {
        &self.gens
    }

    pub fn degree(&self, index: usize) -> i64 {
        self.gens[index].degree
    }

    pub fn is_odd(&self, index: usize) -> bool {
        self.gens[index].is_odd()
    }

    /// Index of the generator called `name`.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.by_name.get(name).copied()
    }

    /// Index of `name`, or an argument error.
    pub fn require(&self, name: &str) -> Result<usize> {
        self.index_of(name)
            .ok_or_else(|| Error::Argument(format!("unknown generator {name:?}")))
    }

    /// Degree of a monomial.
    pub fn monomial_degree(&self, m: &[u16]) -> i64 {
        m.iter()
            .zip(&self.gens)
            .map(|(&e, g)| e as i64 * g.degree)
            .sum()
    }

    /// Product of two monomials with its Koszul sign, or `None` if an odd
    /// generator would appear twice.
    pub fn multiply_monomials(&self, a: &[u16], b: &[u16]) -> Option<(bool, Monomial)> {
        let mut negative = false;
        for &j in &self.odd {
            if b[j] == 0 {
                continue;
            }
            if a[j] != 0 {
                return None;
            }
            // b's odd factor j moves left past a's odd factors after j
            for &i in self.odd.iter().rev() {
                if i <= j {
                    break;
                }
                if a[i] != 0 {
                    negative = !negative;
                }
            }
        }
        let m: Monomial = a.iter().zip(b).map(|(x, y)| x + y).collect();
        Some((negative, m))
    }

    /// Number of odd generators of `m` strictly before (or after) `index`.
    fn odd_count(&self, m: &[u16], index: usize, before: bool) -> usize {
        self.odd
            .iter()
            .filter(|&&i| if before { i < index } else { i > index })
            .filter(|&&i| m[i] != 0)
            .count()
    }
}

/// Exponent vector of a normal-ordered monomial, indexed by generator.
pub type Monomial = Box<[u16]>;

/// An element of the free graded-commutative algebra on a table.
#[derive(Clone)]
pub struct SuperPoly<S> {
    table: Arc<GeneratorTable>,
    terms: BTreeMap<Monomial, S>,
}

impl<S: Scalar> PartialEq for SuperPoly<S> {
    fn eq(&self, other: &Self) -> bool {
        same_table(&self.table, &other.table) && self.terms == other.terms
    }
}

fn same_table(a: &Arc<GeneratorTable>, b: &Arc<GeneratorTable>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl<S: Scalar> fmt::Debug for SuperPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SuperPoly({self})")
    }
}

impl<S: Scalar> SuperPoly<S> {
    /// The zero polynomial.
    pub fn zero(table: &Arc<GeneratorTable>) -> Self {
        SuperPoly {
            table: table.clone(),
            terms: BTreeMap::new(),
        }
    }

    /// A constant.
    pub fn constant(table: &Arc<GeneratorTable>, c: S) -> Self {
        let mut p = Self::zero(table);
        p.add_term(vec![0; table.len()].into_boxed_slice(), c);
        p
    }

    /// The unit.
    pub fn one(table: &Arc<GeneratorTable>) -> Self {
        Self::constant(table, S::one())
    }

    /// The generator with the given index.
    pub fn generator(table: &Arc<GeneratorTable>, index: usize) -> Self {
        let mut m = vec![0u16; table.len()];
        m[index] = 1;
        Self::monomial(table, m.into_boxed_slice(), S::one())
    }

    /// The generator called `name`.
    pub fn var(table: &Arc<GeneratorTable>, name: &str) -> Result<Self> {
        Ok(Self::generator(table, table.require(name)?))
    }

    /// `c` times a normal-ordered monomial.
    pub fn monomial(table: &Arc<GeneratorTable>, m: Monomial, c: S) -> Self {
        assert_eq!(m.len(), table.len(), "monomial length mismatch");
        let mut p = Self::zero(table);
        p.add_term(m, c);
        p
    }

    /// Builds a polynomial from terms, merging repeated monomials.
    pub fn from_terms(
        table: &Arc<GeneratorTable>,
        terms: impl IntoIterator<Item = (Monomial, S)>,
    ) -> Self {
        let mut p = Self::zero(table);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    pub fn table(&self) -> &Arc<GeneratorTable> {
        &self.table
    }

    /// Terms in normal order of the underlying map.
    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &S)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of a monomial.
    pub fn coefficient(&self, m: &[u16]) -> S {
        self.terms.get(m).cloned().unwrap_or_else(S::zero)
    }

    /// Adds `c` times the monomial `m` in place.
    pub fn add_term(&mut self, m: Monomial, c: S) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing = existing.clone() + c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    fn check_table(&self, other: &Self) -> Result<()> {
        if same_table(&self.table, &other.table) {
            Ok(())
        } else {
            Err(Error::Argument(
                "operands use different generator tables".into(),
            ))
        }
    }

    /// Sum, failing on mismatched tables.
    pub fn try_add(&self, other: &Self) -> Result<Self> {
        self.check_table(other)?;
        let mut out = self.clone();
        out.add_assign_ref(other);
        Ok(out)
    }

    /// In-place sum; both operands must share a table.
    pub fn add_assign_ref(&mut self, other: &Self) {
        debug_assert!(same_table(&self.table, &other.table));
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }

    /// In-place `self += c * other`.
    pub fn add_scaled(&mut self, other: &Self, c: &S) {
        debug_assert!(same_table(&self.table, &other.table));
        if c.is_zero() {
            return;
        }
        for (m, d) in &other.terms {
            self.add_term(m.clone(), d.clone() * c.clone());
        }
    }

    /// Scalar multiple.
    pub fn scale(&self, c: &S) -> Self {
        if c.is_zero() {
            return Self::zero(&self.table);
        }
        SuperPoly {
            table: self.table.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, d)| (m.clone(), d.clone() * c.clone()))
                .collect(),
        }
    }

    /// Multiplication by `±1`.
    pub fn signed(&self, sign: i32) -> Self {
        if sign >= 0 {
            self.clone()
        } else {
            -self
        }
    }

    /// Product, failing on mismatched tables.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_table(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        let mut out = Self::zero(&self.table);
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                if let Some((negative, m)) = self.table.multiply_monomials(ma, mb) {
                    let c = ca.clone() * cb.clone();
                    out.add_term(m, if negative { -c } else { c });
                }
            }
        }
        out
    }

    /// Degree of a homogeneous polynomial; `None` for zero or mixed degree.
    pub fn degree(&self) -> Option<i64> {
        let mut degrees = self.terms.keys().map(|m| self.table.monomial_degree(m));
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    /// Whether every term has the given degree (true for zero).
    pub fn is_homogeneous_of(&self, degree: i64) -> bool {
        self.terms
            .keys()
            .all(|m| self.table.monomial_degree(m) == degree)
    }

    /// Decomposition into homogeneous components keyed by degree.
    pub fn homogeneous_components(&self) -> BTreeMap<i64, Self> {
        let mut out: BTreeMap<i64, Self> = BTreeMap::new();
        for (m, c) in &self.terms {
            out.entry(self.table.monomial_degree(m))
                .or_insert_with(|| Self::zero(&self.table))
                .add_term(m.clone(), c.clone());
        }
        out
    }

    /// Largest exponent sum over all terms (zero has degree 0).
    pub fn poly_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|m| m.iter().map(|&e| e as u32).sum())
            .max()
            .unwrap_or(0)
    }

    /// Keeps the terms whose monomial satisfies `keep`.
    pub fn filter(&self, mut keep: impl FnMut(&[u16]) -> bool) -> Self {
        SuperPoly {
            table: self.table.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(m, _)| keep(m))
                .map(|(m, c)| (m.clone(), c.clone()))
                .collect(),
        }
    }

    /// Whether some term involves the generator `index`.
    pub fn involves(&self, index: usize) -> bool {
        self.terms.keys().any(|m| m[index] != 0)
    }

    /// Left derivative `∂⃗/∂v` for the generator with index `v`.
    pub fn partial(&self, v: usize) -> Self {
        self.derivative(v, true)
    }

    /// Left derivative by generator name.
    pub fn partial_by_name(&self, name: &str) -> Result<Self> {
        Ok(self.partial(self.table.require(name)?))
    }

    /// Right derivative `·∂⃖/∂v`.
    pub fn right_partial(&self, v: usize) -> Self {
        self.derivative(v, false)
    }

    fn derivative(&self, v: usize, left: bool) -> Self {
        let odd = self.table.is_odd(v);
        let mut out = Self::zero(&self.table);
        for (m, c) in &self.terms {
            let e = m[v];
            if e == 0 {
                continue;
            }
            let mut coeff = c.clone() * S::int(e as i64);
            if odd && self.table.odd_count(m, v, left) % 2 == 1 {
                coeff = -coeff;
            }
            let mut reduced = m.clone();
            reduced[v] -= 1;
            out.add_term(reduced, coeff);
        }
        out
    }

    /// Kills every term containing a generator with `vars[i] == true`.
    pub fn set_to_zero_mask(&self, vars: &[bool]) -> Self {
        self.filter(|m| m.iter().zip(vars).all(|(&e, &kill)| !kill || e == 0))
    }

    /// Kills every term containing one of the listed generators.
    pub fn set_to_zero(&self, vars: &[usize]) -> Self {
        let mut mask = vec![false; self.table.len()];
        for &v in vars {
            mask[v] = true;
        }
        self.set_to_zero_mask(&mask)
    }

    /// Applies the algebra morphism sending generator `i` to `images[i]`
    /// (or to itself when `None`). Images of odd generators must be odd and
    /// images of even generators even for the result to be a morphism.
    pub fn substitute(&self, images: &[Option<Self>]) -> Self {
        assert_eq!(images.len(), self.table.len(), "one image per generator");
        let mut out = Self::zero(&self.table);
        let mut unit = vec![0u16; self.table.len()].into_boxed_slice();
        for (m, c) in &self.terms {
            // untouched generators are collected into one monomial factor,
            // the rest are multiplied in normal order
            let mut acc = Self::constant(&self.table, c.clone());
            for (i, &e) in m.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                match &images[i] {
                    None => {
                        unit[i] = e;
                        acc =
                            acc.mul_unchecked(&Self::monomial(&self.table, unit.clone(), S::one()));
                        unit[i] = 0;
                    }
                    Some(img) => {
                        for _ in 0..e {
                            acc = acc.mul_unchecked(img);
                        }
                    }
                }
                if acc.is_zero() {
                    break;
                }
            }
            out.add_assign_ref(&acc);
        }
        out
    }

    /// Canonical text form.
    pub fn serialize(&self) -> String {
        self.to_string()
    }

    /// Parses the text format against a table.
    pub fn parse(table: &Arc<GeneratorTable>, text: &str) -> Result<Self> {
        Parser {
            table,
            text,
            pos: 0,
        }
        .parse_poly()
    }

    fn sorted_terms(&self) -> Vec<(&Monomial, &S)> {
        let mut terms: Vec<_> = self.terms.iter().collect();
        terms.sort_by(|(a, _), (b, _)| {
            let da: u32 = a.iter().map(|&e| e as u32).sum();
            let db: u32 = b.iter().map(|&e| e as u32).sum();
            da.cmp(&db).then_with(|| b.cmp(a))
        });
        terms
    }

    fn format_monomial(&self, m: &[u16]) -> String {
        let factors: Vec<String> = m
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                let name = &self.table.generator(i).name;
                if e == 1 {
                    name.clone()
                } else {
                    format!("{name}^{e}")
                }
            })
            .collect();
        factors.join("*")
    }
}

impl<S: Scalar> fmt::Display for SuperPoly<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.sorted_terms().into_iter().enumerate() {
            let negative = c.is_negative();
            let magnitude = c.abs();
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let body = self.format_monomial(m);
            if body.is_empty() {
                write!(f, "{magnitude}")?;
            } else if magnitude.is_one() {
                write!(f, "{body}")?;
            } else {
                write!(f, "{magnitude}*{body}")?;
            }
        }
        Ok(())
    }
}

struct Parser<'a> {
    table: &'a Arc<GeneratorTable>,
    text: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            line: 1,
            column: self.text[..self.pos].chars().count() + 1,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn skip_spaces(&mut self) {
        while self.peek() == Some(' ') {
            self.pos += 1;
        }
    }

    fn take_while(&mut self, f: impl Fn(char) -> bool) -> &'a str {
        let start = self.pos;
        while let Some(c) = self.peek() {
            if !f(c) {
                break;
            }
            self.pos += c.len_utf8();
        }
        &self.text[start..self.pos]
    }

    fn parse_poly<S: Scalar>(mut self) -> Result<SuperPoly<S>> {
        let mut out = SuperPoly::zero(self.table);
        self.skip_spaces();
        if self.peek().is_none() {
            return Err(self.error("empty polynomial"));
        }
        let mut negative = false;
        if self.peek() == Some('-') {
            negative = true;
            self.pos += 1;
            self.skip_spaces();
        }
        loop {
            let term: SuperPoly<S> = self.parse_term()?;
            if negative {
                out.add_assign_ref(&-&term);
            } else {
                out.add_assign_ref(&term);
            }
            self.skip_spaces();
            match self.peek() {
                None => return Ok(out),
                Some('+') => negative = false,
                Some('-') => negative = true,
                Some(c) => return Err(self.error(format!("expected '+' or '-', found {c:?}"))),
            }
            self.pos += 1;
            self.skip_spaces();
        }
    }

    fn parse_term<S: Scalar>(&mut self) -> Result<SuperPoly<S>> {
        let mut acc = SuperPoly::one(self.table);
        let mut first = true;
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_digit() => {
                    if !first {
                        return Err(self.error("a coefficient may only start a term"));
                    }
                    let start = self.pos;
                    self.take_while(|c| c.is_ascii_digit());
                    if self.peek() == Some('/') {
                        self.pos += 1;
                        if self.take_while(|c| c.is_ascii_digit()).is_empty() {
                            return Err(self.error("expected a positive denominator"));
                        }
                    }
                    let text = &self.text[start..self.pos];
                    let c = S::parse_coeff(text)
                        .filter(|_| !text.ends_with("/0"))
                        .ok_or_else(|| self.error(format!("invalid coefficient {text:?}")))?;
                    acc = acc.scale(&c);
                }
                Some(c) if c.is_ascii_lowercase() => {
                    let start = self.pos;
                    self.take_while(|c| c.is_ascii_lowercase());
                    self.take_while(|c| c.is_ascii_digit());
                    let name = &self.text[start..self.pos];
                    let index = self.table.index_of(name).ok_or_else(|| {
                        self.pos = start;
                        self.error(format!("unknown generator {name:?}"))
                    })?;
                    let mut power = 1u32;
                    if self.peek() == Some('^') {
                        self.pos += 1;
                        let digits = self.take_while(|c| c.is_ascii_digit());
                        power = digits
                            .parse()
                            .ok()
                            .filter(|&p| p > 0)
                            .ok_or_else(|| self.error("expected a positive exponent"))?;
                    }
                    let g = SuperPoly::generator(self.table, index);
                    for _ in 0..power {
                        acc = acc.mul_unchecked(&g);
                    }
                }
                Some(c) => return Err(self.error(format!("unexpected character {c:?}"))),
                None => return Err(self.error("unexpected end of input")),
            }
            first = false;
            if self.peek() == Some('*') {
                self.pos += 1;
            } else {
                return Ok(acc);
            }
        }
    }
}

impl<S: Scalar> Add for &SuperPoly<S> {
    type Output = SuperPoly<S>;
    fn add(self, rhs: Self) -> SuperPoly<S> {
        self.try_add(rhs).expect("generator tables differ")
    }
}

impl<S: Scalar> Sub for &SuperPoly<S> {
    type Output = SuperPoly<S>;
    fn sub(self, rhs: Self) -> SuperPoly<S> {
        self.try_add(&-rhs).expect("generator tables differ")
    }
}

impl<S: Scalar> Neg for &SuperPoly<S> {
    type Output = SuperPoly<S>;
    fn neg(self) -> SuperPoly<S> {
        SuperPoly {
            table: self.table.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), -c.clone()))
                .collect(),
        }
    }
}

impl<S: Scalar> Mul for &SuperPoly<S> {
    type Output = SuperPoly<S>;
    fn mul(self, rhs: Self) -> SuperPoly<S> {
        self.multiply(rhs).expect("generator tables differ")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    type P = SuperPoly<Rational>;

    fn table() -> Arc<GeneratorTable> {
        GeneratorTable::new(vec![
            Generator::new("x1", 0),
            Generator::new("y1", 0),
            Generator::new("y2", 0),
            Generator::new("c1", 1),
            Generator::new("c2", 1),
            Generator::new("b1", -1),
        ])
        .unwrap()
    }

    fn p(t: &Arc<GeneratorTable>, s: &str) -> P {
        P::parse(t, s).unwrap()
    }

    #[test]
    fn spec_examples() {
        let t = table();
        let poly = p(&t, "x1*y1 - 2*c1");
        assert_eq!(&P::one(&t) * &poly, poly);
        let c1 = p(&t, "c1");
        assert!((&c1 * &c1).is_zero());
        assert_eq!(&p(&t, "c2") * &c1, p(&t, "-c1*c2"));
        assert_eq!(p(&t, "y1^2").partial_by_name("y1").unwrap(), p(&t, "2*y1"));
        assert_eq!(p(&t, "c1*c2").partial_by_name("c1").unwrap(), p(&t, "c2"));
        assert_eq!(p(&t, "c1*c2").partial_by_name("c2").unwrap(), p(&t, "-c1"));
        let y = t.require("y1").unwrap();
        let y2 = t.require("y2").unwrap();
        let b = t.require("b1").unwrap();
        assert_eq!(
            p(&t, "y1*c1 + x1*c2").set_to_zero(&[y, y2, b]),
            p(&t, "x1*c2")
        );
    }

    #[test]
    fn serialization() {
        let t = table();
        assert_eq!(P::zero(&t).serialize(), "0");
        let mut m = vec![0u16; t.len()];
        m[0] = 1;
        m[2] = 1;
        let q = P::monomial(&t, m.into_boxed_slice(), Rational::ratio(3, 2));
        assert_eq!(q.serialize(), "3/2*x1*y2");
        assert_eq!(p(&t, "c2*y1 + 1").serialize(), "1 + y1*c2");
        assert_eq!(p(&t, "-c2*c1").serialize(), "c1*c2");
        assert_eq!(p(&t, "-1/3*y1^2 - y2").serialize(), "-y2 - 1/3*y1^2");
    }

    #[test]
    fn parse_errors_carry_columns() {
        let t = table();
        match P::parse(&t, "x1 + z9") {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 6),
            other => panic!("unexpected {other:?}"),
        }
        assert!(P::parse(&t, "").is_err());
        assert!(P::parse(&t, "1/0").is_err());
        assert!(P::parse(&t, "x1 +").is_err());
        assert!(P::parse(&t, "x1^0").is_err());
    }

    #[test]
    fn mismatched_tables_are_rejected() {
        let t = table();
        let other = GeneratorTable::new(vec![Generator::new("x1", 0)]).unwrap();
        assert!(P::one(&t).multiply(&P::one(&other)).is_err());
        assert!(GeneratorTable::new(vec![Generator::new("X1", 0)]).is_err());
        assert!(GeneratorTable::new(vec![Generator::new("x", 0)]).is_err());
    }

    #[test]
    fn right_derivative_relation() {
        let t = table();
        // A ∂⃖_v = (-1)^{|v|(|A|-|v|)} ∂⃗_v A for homogeneous A
        let a = p(&t, "c1*c2*b1*y1");
        let deg = a.degree().unwrap();
        for v in 0..t.len() {
            let dv = t.degree(v);
            let expected = a
                .partial(v)
                .signed(crate::graded::parity_sign(dv * (deg - dv)));
            assert_eq!(a.right_partial(v), expected);
        }
    }

    #[test]
    fn substitution_is_multiplicative() {
        let t = table();
        let c1 = t.require("c1").unwrap();
        let y1 = t.require("y1").unwrap();
        let mut images = vec![None; t.len()];
        images[c1] = Some(p(&t, "c1 + y1*c2"));
        images[y1] = Some(p(&t, "y1 + x1^2"));
        let a = p(&t, "c2*y1 - x1");
        let b = p(&t, "c1*b1 + 3");
        let lhs = (&a * &b).substitute(&images);
        let rhs = &a.substitute(&images) * &b.substitute(&images);
        assert_eq!(lhs, rhs);
    }
}
