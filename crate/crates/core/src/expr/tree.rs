use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{Expr, Rational, Var};
use crate::error::Error;

/// Unreduced expression tree.
///
/// Evaluation walks the tree directly and never goes through [`Expr`]
/// arithmetic, which is what lets `verify` use it as an independent check on
/// canonicalization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tree {
    Const(Rational),
    Var(Var),
    Sum(Vec<Tree>),
    Product(Vec<Tree>),
    Pow(Box<Tree>, u32),
    Neg(Box<Tree>),
}

impl Tree {
    pub fn zero() -> Self {
        Tree::Const(Rational::zero())
    }

    pub fn sum(parts: impl IntoIterator<Item = Tree>) -> Self {
        Tree::Sum(parts.into_iter().collect())
    }

    pub fn product(parts: impl IntoIterator<Item = Tree>) -> Self {
        Tree::Product(parts.into_iter().collect())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Self {
        Tree::Neg(Box::new(self))
    }

    /// `self - other`
    pub fn minus(self, other: Tree) -> Self {
        Tree::Sum(vec![self, other.neg()])
    }

    pub fn canonicalize(&self) -> Expr {
        match self {
            Tree::Const(c) => Expr::constant(c.clone()),
            Tree::Var(v) => Expr::var(v.clone()),
            Tree::Sum(parts) => parts.iter().map(Tree::canonicalize).sum(),
            Tree::Product(parts) => parts
                .iter()
                .fold(Expr::one(), |acc, p| &acc * &p.canonicalize()),
            Tree::Pow(base, e) => base.canonicalize().pow(*e),
            Tree::Neg(inner) => -inner.canonicalize(),
        }
    }

    pub fn eval(&self, value: &impl Fn(&Var) -> Option<Rational>) -> Result<Rational, Error> {
        Ok(match self {
            Tree::Const(c) => c.clone(),
            Tree::Var(v) => value(v).ok_or_else(|| Error::MissingSymbol(v.clone()))?,
            Tree::Sum(parts) => {
                // Accumulate over the lcm of the denominators and reduce once;
                // adding Ratios one by one renormalizes a large numerator at
                // every step.
                let mut num = BigInt::zero();
                let mut den = BigInt::one();
                for p in parts {
                    let term = p.eval(value)?;
                    let (n, d) = term.into_raw();
                    let g = den.gcd(&d);
                    let scale = &d / &g;
                    num = num * &scale + n * (&den / &g);
                    den *= scale;
                }
                Rational::new(num, den)
            }
            Tree::Product(parts) => {
                let mut acc = Rational::one();
                for p in parts {
                    acc *= p.eval(value)?;
                }
                acc
            }
            Tree::Pow(base, e) => num_traits::pow(base.eval(value)?, *e as usize),
            Tree::Neg(inner) => -inner.eval(value)?,
        })
    }

    /// Symbols referenced anywhere in the tree.
    pub fn vars(&self, out: &mut Vec<Var>) {
        match self {
            Tree::Const(_) => {}
            Tree::Var(v) => out.push(v.clone()),
            Tree::Sum(ps) | Tree::Product(ps) => ps.iter().for_each(|p| p.vars(out)),
            Tree::Pow(b, _) | Tree::Neg(b) => b.vars(out),
        }
    }
}

impl From<&Expr> for Tree {
    fn from(e: &Expr) -> Self {
        Tree::Sum(
            e.terms()
                .map(|(m, c)| {
                    let mut factors = vec![Tree::Const(c.clone())];
                    factors.extend(m.factors().iter().map(|(v, k)| match k {
                        1 => Tree::Var(v.clone()),
                        _ => Tree::Pow(Box::new(Tree::Var(v.clone())), *k),
                    }));
                    Tree::Product(factors)
                })
                .collect(),
        )
    }
}

impl From<Expr> for Tree {
    fn from(e: Expr) -> Self {
        Tree::from(&e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{int, JetSpace};

    #[test]
    fn canonicalize_is_idempotent_through_tree() {
        let s = JetSpace::new(&["t"], &["u"], 1).unwrap();
        let e = s.parse("(u + d(u;t))^3 - t*u").unwrap();
        assert_eq!(Tree::from(&e).canonicalize(), e);
    }

    #[test]
    fn tree_eval_matches_expr_eval() {
        let s = JetSpace::new(&["t"], &["u"], 1).unwrap();
        let t = crate::expr::parse_tree("(u+1)^2 - 3*t*u", &s).unwrap();
        let value = |v: &Var| Some(if v.is_independent() { int(2) } else { int(-3) });
        assert_eq!(
            t.eval(&value).unwrap(),
            t.canonicalize().eval(value).unwrap()
        );
    }
}
