//! Test oracle and seeded generators.
//!
//! The oracle never calls the engine's differential operators: expressions
//! are composed with concrete polynomial fields `u(x)` and differentiated
//! as ordinary polynomials in `x`; stencil expressions are evaluated on
//! concrete sequences.

#![allow(dead_code)]

use std::collections::BTreeMap;

use noether_core::discrete::StencilSpace;
use noether_core::expr::{int, Expr, JetSpace, MultiIndex, Rational, Var};
use noether_core::variational::LinearDiffOp;
use num_traits::{One, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub use rand::SeedableRng;
pub type Rng8 = ChaCha8Rng;

/// Dense polynomial in `dims` variables, exponent vector to coefficient.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly(pub BTreeMap<Vec<u32>, Rational>);

impl Poly {
    pub fn constant(dims: usize, c: Rational) -> Poly {
        let mut p = Poly::default();
        if !c.is_zero() {
            p.0.insert(vec![0; dims], c);
        }
        p
    }

    pub fn variable(dims: usize, axis: usize) -> Poly {
        let mut e = vec![0; dims];
        e[axis] = 1;
        Poly(BTreeMap::from([(e, Rational::one())]))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.0.clone();
        for (e, c) in &other.0 {
            let slot = out.entry(e.clone()).or_insert_with(Rational::zero);
            *slot += c;
            if slot.is_zero() {
                out.remove(e);
            }
        }
        Poly(out)
    }

    pub fn neg(&self) -> Poly {
        Poly(self.0.iter().map(|(e, c)| (e.clone(), -c)).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out: BTreeMap<Vec<u32>, Rational> = BTreeMap::new();
        for (ea, ca) in &self.0 {
            for (eb, cb) in &other.0 {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *out.entry(e).or_insert_with(Rational::zero) += ca * cb;
            }
        }
        out.retain(|_, c| !c.is_zero());
        Poly(out)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::default();
        }
        Poly(self.0.iter().map(|(e, k)| (e.clone(), k * c)).collect())
    }

    pub fn diff(&self, axis: usize) -> Poly {
        let mut out = BTreeMap::new();
        for (e, c) in &self.0 {
            if e[axis] == 0 {
                continue;
            }
            let mut lowered = e.clone();
            lowered[axis] -= 1;
            out.insert(lowered, c * int(e[axis] as i64));
        }
        Poly(out)
    }

    pub fn diff_multi(&self, index: &MultiIndex) -> Poly {
        let mut out = self.clone();
        for (axis, &k) in index.counts().iter().enumerate() {
            for _ in 0..k {
                out = out.diff(axis);
            }
        }
        out
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        self.0
            .iter()
            .map(|(e, c)| {
                e.iter().zip(point).fold(c.clone(), |acc, (&k, x)| {
                    acc * num_traits::pow(x.clone(), k as usize)
                })
            })
            .fold(Rational::zero(), |a, b| a + b)
    }
}

/// Composes `e` with the fields: `x_λ ↦ x_λ`, `u^i_J ↦ ∂_J u^i`.
pub fn along(e: &Expr, fields: &[Poly], dims: usize) -> Poly {
    let mut out = Poly::default();
    for (mono, c) in e.terms() {
        let mut term = Poly::constant(dims, c.clone());
        for (v, k) in mono.factors() {
            let base = match v {
                Var::Indep(axis) => Poly::variable(dims, *axis),
                Var::Jet { dep, index } => fields[*dep].diff_multi(index),
                Var::Slot { .. } => panic!("slots have no continuous meaning"),
            };
            for _ in 0..*k {
                term = term.mul(&base);
            }
        }
        out = out.add(&term);
    }
    out
}

/// `∂e/∂v` computed term by term from the canonical data.
pub fn partial(e: &Expr, v: &Var) -> Vec<(Rational, Vec<(Var, u32)>)> {
    let mut out = Vec::new();
    for (mono, c) in e.terms() {
        let factors = mono.factors();
        if let Some(pos) = factors.iter().position(|(w, _)| w == v) {
            let k = factors[pos].1;
            let mut rest = factors.to_vec();
            if k == 1 {
                rest.remove(pos);
            } else {
                rest[pos].1 -= 1;
            }
            out.push((c * int(k as i64), rest));
        }
    }
    out
}

fn along_terms(terms: &[(Rational, Vec<(Var, u32)>)], fields: &[Poly], dims: usize) -> Poly {
    let mut out = Poly::default();
    for (c, factors) in terms {
        let mut term = Poly::constant(dims, c.clone());
        for (v, k) in factors {
            let base = match v {
                Var::Indep(axis) => Poly::variable(dims, *axis),
                Var::Jet { dep, index } => fields[*dep].diff_multi(index),
                Var::Slot { .. } => unreachable!(),
            };
            for _ in 0..*k {
                term = term.mul(&base);
            }
        }
        out = out.add(&term);
    }
    out
}

/// `ψ_i = Σ_J (-∂)_J (∂f/∂u^i_J)` along the fields.
pub fn euler_lagrange_along(f: &Expr, fields: &[Poly], dims: usize) -> Vec<Poly> {
    let mut out = vec![Poly::default(); fields.len()];
    for v in f.vars() {
        if let Var::Jet { dep, index } = &v {
            let mut p = along_terms(&partial(f, &v), fields, dims).diff_multi(index);
            if index.order() % 2 == 1 {
                p = p.neg();
            }
            out[*dep] = out[*dep].add(&p);
        }
    }
    out
}

/// `Σ_λ ∂_λ (B^λ along the fields)`.
pub fn divergence_along(b: &[Expr], fields: &[Poly], dims: usize) -> Poly {
    b.iter()
        .enumerate()
        .fold(Poly::default(), |acc, (axis, comp)| {
            acc.add(&along(comp, fields, dims).diff(axis))
        })
}

pub fn pairing_along(a: &[Expr], b: &[Expr], fields: &[Poly], dims: usize) -> Poly {
    a.iter().zip(b).fold(Poly::default(), |acc, (x, y)| {
        acc.add(&along(x, fields, dims).mul(&along(y, fields, dims)))
    })
}

pub fn small_rational(rng: &mut Rng8) -> Rational {
    Rational::new(
        rng.gen_range(-9i64..=9).into(),
        rng.gen_range(1i64..=4).into(),
    )
}

pub fn random_field(rng: &mut Rng8, dims: usize, degree: u32) -> Poly {
    let mut p = Poly::default();
    for e in MultiIndex::all_up_to(dims, degree) {
        let exps: Vec<u32> = e.counts().iter().map(|&k| k as u32).collect();
        p = p.add(&Poly(BTreeMap::from([(exps, small_rational(rng))])));
    }
    p
}

pub fn random_fields(rng: &mut Rng8, dims: usize, count: usize, degree: u32) -> Vec<Poly> {
    (0..count)
        .map(|_| random_field(rng, dims, degree))
        .collect()
}

/// Symbols available to generated jet expressions.
pub fn jet_symbols(space: &JetSpace, max_order: u32) -> Vec<Var> {
    let mut out: Vec<Var> = (0..space.dims()).map(Var::Indep).collect();
    for dep in 0..space.fields() {
        for index in MultiIndex::all_up_to(space.dims(), max_order) {
            out.push(Var::jet(dep, index));
        }
    }
    out
}

/// Sum of `terms` monomials of degree `1..=max_degree` over `symbols`, with
/// a constant term and small integer coefficients.
pub fn random_expr(rng: &mut Rng8, symbols: &[Var], terms: usize, max_degree: u32) -> Expr {
    let mut e = Expr::integer(rng.gen_range(-3..=3));
    for _ in 0..terms {
        let mut t = Expr::integer(rng.gen_range(1..=5) * if rng.gen_bool(0.5) { 1 } else { -1 });
        for _ in 0..rng.gen_range(1..=max_degree) {
            t = t * Expr::var(symbols[rng.gen_range(0..symbols.len())].clone());
        }
        e += &t;
    }
    e
}

pub fn random_operator(
    rng: &mut Rng8,
    space: &JetSpace,
    rows: usize,
    cols: usize,
    order: u32,
) -> LinearDiffOp {
    let symbols = jet_symbols(space, 1);
    let mut op = LinearDiffOp::zero(rows, cols);
    let indices = MultiIndex::all_up_to(space.dims(), order);
    for r in 0..rows {
        for c in 0..cols {
            for _ in 0..3 {
                let index = indices[rng.gen_range(0..indices.len())].clone();
                op.set(r, c, index, random_expr(rng, &symbols, 2, 2));
            }
        }
    }
    op
}

pub fn stencil_symbols(space: &StencilSpace, reach: i32) -> Vec<Var> {
    let mut out = vec![space.site()];
    for dep in 0..space.fields() {
        out.extend((-reach..=reach).map(|k| Var::slot(dep, k)));
    }
    out
}

/// A concrete sequence per field, `u_i(n)`.
pub type Sequence = dyn Fn(usize, i64) -> Rational;

/// Evaluates a stencil expression at site `n`.
pub fn eval_at(e: &Expr, seq: &Sequence, n: i64) -> Rational {
    e.eval(|v| match v {
        Var::Indep(_) => Some(int(n)),
        Var::Slot { dep, shift } => Some(seq(*dep, n + i64::from(*shift))),
        Var::Jet { .. } => None,
    })
    .expect("stencil expression")
}

/// `E_i(L)(n) = Σ_j (∂L/∂u_i[j])(n - j)`, from the canonical data only.
pub fn discrete_euler_lagrange_at(
    l: &Expr,
    seq: &Sequence,
    n: i64,
    fields: usize,
) -> Vec<Rational> {
    let mut out = vec![Rational::zero(); fields];
    for v in l.vars() {
        if let Var::Slot { dep, shift } = v {
            let site = n - i64::from(shift);
            for (c, factors) in partial(l, &v) {
                let value = factors.iter().fold(c, |acc, (w, k)| {
                    let x = match w {
                        Var::Indep(_) => int(site),
                        Var::Slot { dep, shift } => seq(*dep, site + i64::from(*shift)),
                        Var::Jet { .. } => unreachable!(),
                    };
                    acc * num_traits::pow(x, *k as usize)
                });
                out[dep] += value;
            }
        }
    }
    out
}
