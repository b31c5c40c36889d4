use std::fmt;

use num_traits::{One, Signed};

use super::{Expr, Scope};

/// Prints canonical forms in the parser's own grammar, largest monomial
/// first, so printed output re-parses to the same `Expr`.
pub struct ExprDisplay<'a> {
    expr: &'a Expr,
    scope: &'a dyn Scope,
}

impl<'a> ExprDisplay<'a> {
    pub(super) fn new(expr: &'a Expr, scope: &'a dyn Scope) -> Self {
        ExprDisplay { expr, scope }
    }
}

impl fmt::Display for ExprDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.expr.is_zero() {
            return f.write_str("0");
        }
        for (k, (mono, coeff)) in self.expr.terms().rev().enumerate() {
            let negative = coeff.is_negative();
            match (k, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let magnitude = coeff.abs();
            let mut first = true;
            if !magnitude.is_one() || mono.is_one() {
                write!(f, "{}", magnitude)?;
                first = false;
            }
            for (v, e) in mono.factors() {
                if !first {
                    f.write_str("*")?;
                }
                first = false;
                f.write_str(&self.scope.var_name(v))?;
                if *e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}
