//! Exact symbolic expressions over independent variables and jet coordinates.
//!
//! [`Expr`] is always held in canonical form: a fully expanded sum of
//! monomials with exact rational coefficients, keyed by a graded
//! lexicographic monomial order. Structural equality is therefore
//! mathematical equality. [`Tree`] is the unreduced syntax tree produced by
//! the parser and by certificate construction; [`Tree::canonicalize`]
//! reduces it.

mod parse;
mod print;
mod tree;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

pub use parse::{parse, parse_tree};
pub use print::ExprDisplay;
pub use tree::Tree;

use crate::error::{Error, ScopeError};

/// Exact rational scalar used for every coefficient.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> Rational {
    BigRational::from_integer(BigInt::from(value))
}

/// Derivative counts, one per independent variable.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(Vec<u16>);

impl MultiIndex {
    pub fn zero(dims: usize) -> Self {
        MultiIndex(vec![0; dims])
    }

    pub fn unit(dims: usize, axis: usize) -> Self {
        let mut counts = vec![0; dims];
        counts[axis] = 1;
        MultiIndex(counts)
    }

    pub fn from_counts(counts: Vec<u16>) -> Self {
        MultiIndex(counts)
    }

    pub fn counts(&self) -> &[u16] {
        &self.0
    }

    pub fn dims(&self) -> usize {
        self.0.len()
    }

    /// Total order `|J|`.
    pub fn order(&self) -> u32 {
        self.0.iter().map(|&c| u32::from(c)).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn incremented(&self, axis: usize) -> Self {
        let mut next = self.clone();
        next.0[axis] += 1;
        next
    }

    pub fn decremented(&self, axis: usize) -> Option<Self> {
        let mut next = self.clone();
        next.0[axis] = next.0[axis].checked_sub(1)?;
        Some(next)
    }

    pub fn plus(&self, other: &MultiIndex) -> Self {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - other`, when `other <= self` componentwise.
    pub fn minus(&self, other: &MultiIndex) -> Option<Self> {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_sub(*b))
            .collect::<Option<Vec<_>>>()
            .map(MultiIndex)
    }

    /// First axis with a nonzero count.
    pub fn first_axis(&self) -> Option<usize> {
        self.0.iter().position(|&c| c > 0)
    }

    /// All multi-indices `K` with `K <= self` componentwise.
    pub fn lower_set(&self) -> Vec<MultiIndex> {
        let mut out = vec![Vec::with_capacity(self.0.len())];
        for &c in &self.0 {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (0..=c).map(move |k| {
                        let mut p = prefix.clone();
                        p.push(k);
                        p
                    })
                })
                .collect();
        }
        out.into_iter().map(MultiIndex).collect()
    }

    /// Product of binomial coefficients `C(J, K) = Π C(j_λ, k_λ)`.
    pub fn binomial(&self, lower: &MultiIndex) -> BigInt {
        self.0
            .iter()
            .zip(&lower.0)
            .map(|(&n, &k)| binomial(u32::from(n), u32::from(k)))
            .product()
    }

    /// All multi-indices of `dims` axes with total order at most `max`.
    pub fn all_up_to(dims: usize, max: u32) -> Vec<MultiIndex> {
        let mut out = vec![MultiIndex::zero(dims)];
        let mut frontier = out.clone();
        for _ in 0..max {
            let mut next = BTreeSet::new();
            for idx in &frontier {
                for axis in 0..dims {
                    next.insert(idx.incremented(axis));
                }
            }
            frontier = next.into_iter().collect();
            out.extend(frontier.iter().cloned());
        }
        out
    }
}

fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// A symbol an [`Expr`] can depend on.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    /// Independent variable, by declaration index.
    Indep(usize),
    /// Jet coordinate `u^dep_J`.
    Jet { dep: usize, index: MultiIndex },
    /// Stencil slot `u^dep[shift]` of a discrete problem.
    Slot { dep: usize, shift: i32 },
}

impl Var {
    pub fn jet(dep: usize, index: MultiIndex) -> Self {
        Var::Jet { dep, index }
    }

    pub fn slot(dep: usize, shift: i32) -> Self {
        Var::Slot { dep, shift }
    }

    pub fn is_independent(&self) -> bool {
        matches!(self, Var::Indep(_))
    }

    /// Derivative order of a jet coordinate; zero for everything else.
    pub fn order(&self) -> u32 {
        match self {
            Var::Jet { index, .. } => index.order(),
            _ => 0,
        }
    }

    fn rank(&self) -> u8 {
        match self {
            Var::Indep(_) => 0,
            Var::Jet { .. } => 1,
            Var::Slot { .. } => 2,
        }
    }
}

// Symbol order: independents in declaration order, then jets by dependent
// variable and descending multi-index, then stencil slots by dependent
// variable and descending shift. Earlier symbols dominate in the monomial
// order, so `u_t` prints before `u_x` before `u`.
impl Ord for Var {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Var::Indep(a), Var::Indep(b)) => a.cmp(b),
            (Var::Jet { dep: da, index: ia }, Var::Jet { dep: db, index: ib }) => {
                da.cmp(db).then_with(|| ib.cmp(ia))
            }
            (Var::Slot { dep: da, shift: sa }, Var::Slot { dep: db, shift: sb }) => {
                da.cmp(db).then_with(|| sb.cmp(sa))
            }
            _ => self.rank().cmp(&other.rank()),
        }
    }
}

impl PartialOrd for Var {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Product of symbol powers, sorted by symbol order, exponents positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Monomial(vec![(v, 1)])
    }

    pub fn factors(&self) -> &[(Var, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, v: &Var) -> u32 {
        self.0
            .binary_search_by(|(w, _)| w.cmp(v))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    out.push((self.0[i].0.clone(), self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// Removes one power of `v`, returning the old exponent.
    fn lowered(&self, v: &Var) -> Option<(u32, Monomial)> {
        let pos = self.0.binary_search_by(|(w, _)| w.cmp(v)).ok()?;
        let mut out = self.0.clone();
        let exp = out[pos].1;
        if exp == 1 {
            out.remove(pos);
        } else {
            out[pos].1 -= 1;
        }
        Some((exp, Monomial(out)))
    }
}

// Graded lexicographic: total degree first, then the exponent of the
// earliest symbol where the two monomials differ.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            for k in 0.. {
                match (self.0.get(k), other.0.get(k)) {
                    (Some((va, ea)), Some((vb, eb))) => match va.cmp(vb) {
                        Ordering::Equal if ea == eb => continue,
                        Ordering::Equal => return ea.cmp(eb),
                        Ordering::Less => return Ordering::Greater,
                        Ordering::Greater => return Ordering::Less,
                    },
                    (Some(_), None) => return Ordering::Greater,
                    (None, Some(_)) => return Ordering::Less,
                    (None, None) => return Ordering::Equal,
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical polynomial with exact rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Expr {
    terms: BTreeMap<Monomial, Rational>,
}

impl Expr {
    pub fn zero() -> Self {
        Expr::default()
    }

    pub fn one() -> Self {
        Expr::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Expr::term(Monomial::one(), c)
    }

    pub fn integer(c: i64) -> Self {
        Expr::constant(int(c))
    }

    pub fn var(v: Var) -> Self {
        Expr::term(Monomial::var(v), Rational::one())
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Expr { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// The value of a constant expression.
    pub fn as_constant(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending monomial order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    /// Already canonical; present so callers can state intent.
    pub fn canonicalize(&self) -> Expr {
        self.clone()
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(slot) => {
                slot.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut slot) => {
                *slot.get_mut() += c;
                if slot.get().is_zero() {
                    slot.remove();
                }
            }
        }
    }

    pub fn scale(&self, c: &Rational) -> Expr {
        if c.is_zero() {
            return Expr::zero();
        }
        Expr {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Expr {
        let mut acc = Expr::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Partial derivative with respect to a single symbol.
    pub fn partial(&self, v: &Var) -> Expr {
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            if let Some((exp, rest)) = m.lowered(v) {
                out.add_term(rest, c * int(i64::from(exp)));
            }
        }
        out
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        self.terms
            .keys()
            .flat_map(|m| m.0.iter().map(|(v, _)| v.clone()))
            .collect()
    }

    pub fn contains(&self, pred: impl Fn(&Var) -> bool) -> bool {
        self.terms.keys().any(|m| m.0.iter().any(|(v, _)| pred(v)))
    }

    /// Highest jet order among the symbols present.
    pub fn max_order(&self) -> u32 {
        self.vars().iter().map(Var::order).max().unwrap_or(0)
    }

    /// Simultaneous substitution of symbols by expressions.
    pub fn substitute(&self, bindings: &BTreeMap<Var, Expr>) -> Expr {
        let mut powers: BTreeMap<(Var, u32), Expr> = BTreeMap::new();
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            let mut kept = Monomial::one();
            let mut value = Expr::constant(c.clone());
            for (v, e) in &m.0 {
                match bindings.get(v) {
                    Some(b) => {
                        let p = powers
                            .entry((v.clone(), *e))
                            .or_insert_with(|| b.pow(*e))
                            .clone();
                        value = &value * &p;
                    }
                    None => kept = kept.mul(&Monomial(vec![(v.clone(), *e)])),
                }
            }
            for (vm, vc) in value.terms {
                out.add_term(vm.mul(&kept), vc);
            }
        }
        out
    }

    /// Renames symbols; `f` must be injective on the symbols present.
    pub fn map_vars(&self, f: impl Fn(&Var) -> Var) -> Expr {
        let mut out = Expr::zero();
        for (m, c) in &self.terms {
            let mut mono = Monomial::one();
            for (v, e) in &m.0 {
                mono = mono.mul(&Monomial(vec![(f(v), *e)]));
            }
            out.add_term(mono, c.clone());
        }
        out
    }

    /// Exact value at a point; fails on the first symbol without a value.
    pub fn eval(&self, value: impl Fn(&Var) -> Option<Rational>) -> Result<Rational, Error> {
        let mut total = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (v, e) in &m.0 {
                let x = value(v).ok_or_else(|| Error::MissingSymbol(v.clone()))?;
                t *= num_traits::pow(x, *e as usize);
            }
            total += t;
        }
        Ok(total)
    }

    /// Splits into parts homogeneous in the symbols selected by `pred`,
    /// keyed by their degree in those symbols.
    pub fn homogeneous_parts(&self, pred: impl Fn(&Var) -> bool) -> BTreeMap<u32, Expr> {
        let mut parts: BTreeMap<u32, Expr> = BTreeMap::new();
        for (m, c) in &self.terms {
            let deg = m.0.iter().filter(|(v, _)| pred(v)).map(|(_, e)| e).sum();
            parts.entry(deg).or_default().add_term(m.clone(), c.clone());
        }
        parts
    }

    /// Leading term in the monomial order.
    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn display<'a>(&'a self, scope: &'a dyn Scope) -> ExprDisplay<'a> {
        ExprDisplay::new(self, scope)
    }

    pub fn to_tree(&self) -> Tree {
        Tree::from(self)
    }
}

impl From<Var> for Expr {
    fn from(v: Var) -> Self {
        Expr::var(v)
    }
}

impl From<Rational> for Expr {
    fn from(c: Rational) -> Self {
        Expr::constant(c)
    }
}

impl<'a> Add<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn add(self, rhs: &'a Expr) -> Expr {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<'a> Sub<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn sub(self, rhs: &'a Expr) -> Expr {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl<'a> Mul<&'a Expr> for &'a Expr {
    type Output = Expr;
    fn mul(self, rhs: &'a Expr) -> Expr {
        let mut out = Expr::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Expr {
    type Output = Expr;
    fn neg(mut self) -> Expr {
        for c in self.terms.values_mut() {
            *c = -c.clone();
        }
        self
    }
}

impl AddAssign<&Expr> for Expr {
    fn add_assign(&mut self, rhs: &Expr) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Expr> for Expr {
    fn sub_assign(&mut self, rhs: &Expr) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c);
        }
    }
}

macro_rules! owned_binop {
    ($trait:ident, $method:ident) => {
        impl $trait<Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $trait<&'a Expr> for Expr {
            type Output = Expr;
            fn $method(self, rhs: &'a Expr) -> Expr {
                (&self).$method(rhs)
            }
        }
        impl<'a> $trait<Expr> for &'a Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                self.$method(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl AddAssign<Expr> for Expr {
    fn add_assign(&mut self, rhs: Expr) {
        *self += &rhs;
    }
}

impl SubAssign<Expr> for Expr {
    fn sub_assign(&mut self, rhs: Expr) {
        *self -= &rhs;
    }
}

impl std::iter::Sum for Expr {
    fn sum<I: Iterator<Item = Expr>>(iter: I) -> Expr {
        iter.fold(Expr::zero(), |mut acc, e| {
            acc += &e;
            acc
        })
    }
}

/// Symbol resolution and naming shared by the parser, printer and
/// random-point generator.
pub trait Scope: Sync {
    fn independents(&self) -> &[String];
    fn dependents(&self) -> &[String];
    /// Validates a jet coordinate, e.g. against the order headroom.
    fn jet(&self, dep: usize, index: MultiIndex) -> Result<Var, ScopeError>;
    /// Validates a stencil slot.
    fn slot(&self, dep: usize, shift: i32) -> Result<Var, ScopeError>;
    /// Every symbol a point assignment must cover.
    fn symbols(&self) -> Vec<Var>;

    fn independent_index(&self, name: &str) -> Option<usize> {
        self.independents().iter().position(|n| n == name)
    }

    fn dependent_index(&self, name: &str) -> Option<usize> {
        self.dependents().iter().position(|n| n == name)
    }

    fn var_name(&self, v: &Var) -> String {
        match v {
            Var::Indep(i) => self.independents()[*i].clone(),
            Var::Jet { dep, index } => {
                let name = &self.dependents()[*dep];
                if index.is_zero() {
                    return name.clone();
                }
                let axes: Vec<&str> = index
                    .counts()
                    .iter()
                    .enumerate()
                    .flat_map(|(axis, &c)| {
                        std::iter::repeat_n(self.independents()[axis].as_str(), c as usize)
                    })
                    .collect();
                format!("d({};{})", name, axes.join(","))
            }
            Var::Slot { dep, shift } => format!("{}[{}]", self.dependents()[*dep], shift),
        }
    }
}

/// Declaration of the independent and dependent variables with the
/// Lagrangian order and the derivative headroom every operation respects.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JetSpace {
    independents: Vec<String>,
    dependents: Vec<String>,
    order: u32,
    max_order: u32,
}

impl JetSpace {
    /// Builds a space with the default headroom `2κ + 2`; see
    /// [`JetSpace::with_headroom`].
    pub fn new<S: AsRef<str>>(
        independents: &[S],
        dependents: &[S],
        order: u32,
    ) -> Result<Self, Error> {
        let independents: Vec<String> = independents
            .iter()
            .map(|s| s.as_ref().to_string())
            .collect();
        let dependents: Vec<String> = dependents.iter().map(|s| s.as_ref().to_string()).collect();
        if independents.is_empty() {
            return Err(Error::Space(
                "at least one independent variable required".into(),
            ));
        }
        if dependents.is_empty() {
            return Err(Error::Space(
                "at least one dependent variable required".into(),
            ));
        }
        if order == 0 {
            return Err(Error::Space("Lagrangian order must be at least 1".into()));
        }
        validate_names(independents.iter().chain(&dependents))?;
        Ok(JetSpace {
            independents,
            dependents,
            order,
            max_order: 2 * order + 2,
        })
    }

    pub fn with_headroom(mut self, max_order: u32) -> Self {
        self.max_order = max_order.max(self.order);
        self
    }

    pub fn dims(&self) -> usize {
        self.independents.len()
    }

    pub fn fields(&self) -> usize {
        self.dependents.len()
    }

    /// Lagrangian order κ.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Highest derivative order any operation may create.
    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    pub fn indep(&self, axis: usize) -> Var {
        Var::Indep(axis)
    }

    /// The order-zero jet coordinate `u^dep`.
    pub fn field(&self, dep: usize) -> Var {
        Var::jet(dep, MultiIndex::zero(self.dims()))
    }

    /// Jet coordinate from derivative axes, e.g. `[0, 1]` for `u_tx`.
    pub fn derivative(&self, dep: usize, axes: &[usize]) -> Var {
        let mut idx = MultiIndex::zero(self.dims());
        for &a in axes {
            idx = idx.incremented(a);
        }
        Var::jet(dep, idx)
    }

    pub fn check_var(&self, v: &Var) -> Result<(), Error> {
        match v {
            Var::Jet { index, .. } if index.order() > self.max_order => Err(Error::OrderOverflow {
                order: index.order(),
                max: self.max_order,
            }),
            Var::Slot { .. } => Err(Error::Space(
                "stencil slot in a jet-space expression".into(),
            )),
            _ => Ok(()),
        }
    }

    /// Parses an expression in this space.
    pub fn parse(&self, text: &str) -> Result<Expr, Error> {
        Ok(parse(text, self)?)
    }

    pub fn show(&self, e: &Expr) -> String {
        e.display(self).to_string()
    }
}

impl Scope for JetSpace {
    fn independents(&self) -> &[String] {
        &self.independents
    }

    fn dependents(&self) -> &[String] {
        &self.dependents
    }

    fn jet(&self, dep: usize, index: MultiIndex) -> Result<Var, ScopeError> {
        if index.order() > self.max_order {
            return Err(ScopeError::OrderExceeded {
                order: index.order(),
                max: self.max_order,
            });
        }
        Ok(Var::jet(dep, index))
    }

    fn slot(&self, _dep: usize, _shift: i32) -> Result<Var, ScopeError> {
        Err(ScopeError::SlotsNotAllowed)
    }

    fn symbols(&self) -> Vec<Var> {
        let mut out: Vec<Var> = (0..self.dims()).map(Var::Indep).collect();
        let indices = MultiIndex::all_up_to(self.dims(), self.max_order);
        for dep in 0..self.fields() {
            out.extend(indices.iter().map(|j| Var::jet(dep, j.clone())));
        }
        out
    }
}

pub(crate) fn validate_names<'a>(names: impl Iterator<Item = &'a String>) -> Result<(), Error> {
    let mut seen = BTreeSet::new();
    for name in names {
        let mut chars = name.chars();
        let ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
        if !ok {
            return Err(Error::Space(format!("'{name}' is not an ASCII identifier")));
        }
        if name == "d" {
            return Err(Error::Space("'d' is reserved for derivatives".into()));
        }
        if !seen.insert(name.as_str()) {
            return Err(Error::Space(format!("'{name}' declared twice")));
        }
    }
    Ok(())
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.0)
    }
}

/// Sign helper used by the Euler operator and adjoints: `(-1)^k`.
pub(crate) fn alternating(k: u32) -> Rational {
    if k.is_multiple_of(2) {
        Rational::one()
    } else {
        -Rational::one()
    }
}
