//! Difference calculus on a one-dimensional lattice: shifts, the discrete
//! Euler–Lagrange operator and first integrals from discrete symmetries.

use std::collections::BTreeMap;

use crate::error::{Error, Result, ScopeError};
use crate::expr::{rat, validate_names, Expr, MultiIndex, Rational, Scope, Var};

/// Stencil declaration: site symbol `n`, fields addressed as `u[k]`.
///
/// `width` bounds Lagrangian slots to `0..=width`; `window` bounds every
/// intermediate expression to `-window..=window`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StencilSpace {
    independents: Vec<String>,
    dependents: Vec<String>,
    width: i32,
    window: i32,
}

pub const SITE: &str = "n";

impl StencilSpace {
    /// Default window `3·width + 3`, enough for the Euler–Lagrange operator
    /// and summation by parts of width-bounded characteristics.
    pub fn new<S: AsRef<str>>(dependents: &[S], width: i32) -> Result<Self> {
        let dependents: Vec<String> = dependents.iter().map(|s| s.as_ref().to_string()).collect();
        if dependents.is_empty() {
            return Err(Error::Space(
                "at least one dependent variable required".into(),
            ));
        }
        if width < 1 {
            return Err(Error::Space("stencil width must be at least 1".into()));
        }
        let independents = vec![SITE.to_string()];
        validate_names(independents.iter().chain(&dependents))?;
        Ok(StencilSpace {
            independents,
            dependents,
            width,
            window: 3 * width + 3,
        })
    }

    pub fn with_window(mut self, window: i32) -> Self {
        self.window = window.max(self.width);
        self
    }

    pub fn width(&self) -> i32 {
        self.width
    }

    pub fn window(&self) -> i32 {
        self.window
    }

    pub fn fields(&self) -> usize {
        self.dependents.len()
    }

    pub fn site(&self) -> Var {
        Var::Indep(0)
    }

    pub fn slot_var(&self, dep: usize, shift: i32) -> Var {
        Var::slot(dep, shift)
    }

    pub fn parse(&self, text: &str) -> Result<Expr> {
        Ok(crate::expr::parse(text, self)?)
    }

    pub fn show(&self, e: &Expr) -> String {
        e.display(self).to_string()
    }

    fn check_shift(&self, shift: i32) -> Result<()> {
        if shift.abs() > self.window {
            Err(Error::WindowOverflow {
                shift,
                window: self.window,
            })
        } else {
            Ok(())
        }
    }
}

impl Scope for StencilSpace {
    fn independents(&self) -> &[String] {
        &self.independents
    }

    fn dependents(&self) -> &[String] {
        &self.dependents
    }

    fn jet(&self, _dep: usize, _index: MultiIndex) -> Result<Var, ScopeError> {
        Err(ScopeError::DerivativesNotAllowed)
    }

    fn slot(&self, dep: usize, shift: i32) -> Result<Var, ScopeError> {
        if shift.abs() > self.window {
            return Err(ScopeError::WindowExceeded {
                shift,
                window: self.window,
            });
        }
        Ok(Var::slot(dep, shift))
    }

    fn symbols(&self) -> Vec<Var> {
        let mut out = vec![Var::Indep(0)];
        for dep in 0..self.fields() {
            out.extend((-self.window..=self.window).map(|k| Var::slot(dep, k)));
        }
        out
    }
}

/// A Lagrangian `L(n, u[0], …, u[w])` of the action `Σ_n L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscreteLagrangian(Expr);

impl DiscreteLagrangian {
    pub fn new(space: &StencilSpace, l: Expr) -> Result<Self> {
        for v in l.vars() {
            if let Var::Slot { shift, .. } = v {
                if !(0..=space.width()).contains(&shift) {
                    return Err(Error::WindowOverflow {
                        shift,
                        window: space.width(),
                    });
                }
            }
        }
        Ok(DiscreteLagrangian(l))
    }

    pub fn expr(&self) -> &Expr {
        &self.0
    }
}

fn slot_shift(v: &Var) -> Option<(usize, i32)> {
    match v {
        Var::Slot { dep, shift } => Some((*dep, *shift)),
        _ => None,
    }
}

/// `S^k`: `n ↦ n + k`, `u[j] ↦ u[j + k]`.
pub fn shift(space: &StencilSpace, e: &Expr, k: i32) -> Result<Expr> {
    if k == 0 {
        return Ok(e.clone());
    }
    for v in e.vars() {
        if let Some((_, j)) = slot_shift(&v) {
            space.check_shift(j + k)?;
        }
    }
    let moved = e.map_vars(|v| match v {
        Var::Slot { dep, shift } => Var::slot(*dep, shift + k),
        other => other.clone(),
    });
    if !moved.contains(|v| *v == space.site()) {
        return Ok(moved);
    }
    let site = BTreeMap::from([(
        space.site(),
        Expr::var(space.site()) + Expr::integer(i64::from(k)),
    )]);
    Ok(moved.substitute(&site))
}

/// `(S - id) e`.
pub fn difference(space: &StencilSpace, e: &Expr) -> Result<Expr> {
    Ok(shift(space, e, 1)? - e)
}

/// `E_i(e) = Σ_j S^{-j} ∂e/∂u_i[j]` for an arbitrary stencil expression.
pub fn euler_operator(space: &StencilSpace, e: &Expr) -> Result<Vec<Expr>> {
    let mut out = vec![Expr::zero(); space.fields()];
    for v in e.vars() {
        if let Some((dep, j)) = slot_shift(&v) {
            out[dep] += &shift(space, &e.partial(&v), -j)?;
        }
    }
    Ok(out)
}

pub fn discrete_euler_lagrange(space: &StencilSpace, l: &DiscreteLagrangian) -> Result<Vec<Expr>> {
    euler_operator(space, l.expr())
}

/// `pr Q(e) = Σ_{i,j} S^j(Q_i) ∂e/∂u_i[j]`.
pub fn prolong_apply(space: &StencilSpace, q: &[Expr], e: &Expr) -> Result<Expr> {
    check_fields(space, q.len())?;
    let mut out = Expr::zero();
    for v in e.vars() {
        if let Some((dep, j)) = slot_shift(&v) {
            if !q[dep].is_zero() {
                out += &(shift(space, &q[dep], j)? * e.partial(&v));
            }
        }
    }
    Ok(out)
}

fn check_fields(space: &StencilSpace, found: usize) -> Result<()> {
    if found == space.fields() {
        Ok(())
    } else {
        Err(Error::ShapeMismatch {
            what: "characteristic",
            expected: space.fields(),
            found,
        })
    }
}

/// `A` with `pr Q(e) = Σ_i Q_i E_i(e) + (S - id) A`, peeling the highest
/// slot first.
pub fn sum_by_parts(space: &StencilSpace, e: &Expr, q: &[Expr]) -> Result<Expr> {
    check_fields(space, q.len())?;
    let mut a = Expr::zero();
    for v in e.vars().into_iter().rev() {
        let Some((dep, j)) = slot_shift(&v) else {
            continue;
        };
        if j == 0 || q[dep].is_zero() {
            continue;
        }
        let h = &q[dep] * &shift(space, &e.partial(&v), -j)?;
        let range = if j > 0 { 0..j } else { j..0 };
        let mut partial = Expr::zero();
        for m in range {
            partial += &shift(space, &h, m)?;
        }
        if j > 0 {
            a += &partial;
        } else {
            a -= &partial;
        }
    }
    Ok(a)
}

/// Solves `(S - id) M = g`, or `None` when `g` is not a total difference.
pub fn invert_difference(space: &StencilSpace, g: &Expr) -> Result<Option<Expr>> {
    let identity: Vec<Expr> = (0..space.fields())
        .map(|dep| Expr::var(Var::slot(dep, 0)))
        .collect();
    let mut m = Expr::zero();
    for (degree, part) in g.homogeneous_parts(|v| matches!(v, Var::Slot { .. })) {
        if degree == 0 {
            m += &site_antiderivative(space, &part)?;
            continue;
        }
        if euler_operator(space, &part)?.iter().any(|e| !e.is_zero()) {
            return Ok(None);
        }
        let a = sum_by_parts(space, &part, &identity)?;
        m += &a.scale(&rat(1, i64::from(degree)));
    }
    Ok((difference(space, &m)? == *g).then_some(m))
}

/// `M(n)` with `M(n+1) - M(n) = p(n)` and no constant term.
fn site_antiderivative(space: &StencilSpace, p: &Expr) -> Result<Expr> {
    let n = Expr::var(space.site());
    let mut rest = p.clone();
    let mut out = Expr::zero();
    while let Some((mono, c)) = rest.leading_term() {
        let d = mono.degree();
        let step = n
            .pow(d + 1)
            .scale(&(c / Rational::from_integer((d + 1).into())));
        rest -= &difference(space, &step)?;
        out += &step;
    }
    Ok(out)
}

/// A first integral with its ingredients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FirstIntegral {
    /// `I = M - A`
    pub integral: Expr,
    /// `M` with `pr Q(L) = (S - id) M`.
    pub potential: Expr,
    /// `A` from summation by parts.
    pub boundary: Expr,
    pub euler_lagrange: Vec<Expr>,
    /// `(S - id) I - Σ_i E_i(L) Q_i`, canonically zero.
    pub certificate: Expr,
}

impl FirstIntegral {
    pub fn certified(&self) -> bool {
        self.certificate.is_zero()
    }
}

/// Discrete Noether theorem: if `pr Q(L)` is a total difference then
/// `(S - id) I = Σ_i E_i(L) Q_i`, so `I` is constant along solutions.
pub fn discrete_first_integral(
    space: &StencilSpace,
    l: &DiscreteLagrangian,
    q: &[Expr],
) -> Result<FirstIntegral> {
    let variation = prolong_apply(space, q, l.expr())?;
    let Some(potential) = invert_difference(space, &variation)? else {
        return Err(Error::NotADiscreteSymmetry {
            residual: variation,
        });
    };
    let euler_lagrange = discrete_euler_lagrange(space, l)?;
    let boundary = sum_by_parts(space, l.expr(), q)?;
    let integral = &potential - &boundary;
    let pairing: Expr = euler_lagrange.iter().zip(q).map(|(e, q)| e * q).sum();
    let certificate = difference(space, &integral)? - pairing;
    Ok(FirstIntegral {
        integral,
        potential,
        boundary,
        euler_lagrange,
        certificate,
    })
}
