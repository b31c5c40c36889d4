//! Total derivatives, generalized vector fields and prolongation.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::expr::{Expr, JetSpace, MultiIndex, Scope, Var};

/// An `n`-component vector of expressions; a conservation law candidate
/// through its divergence.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Current(pub Vec<Expr>);

impl Current {
    pub fn zero(dims: usize) -> Self {
        Current(vec![Expr::zero(); dims])
    }

    pub fn components(&self) -> &[Expr] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Expr::is_zero)
    }

    pub fn scale(&self, c: &crate::expr::Rational) -> Current {
        Current(self.0.iter().map(|e| e.scale(c)).collect())
    }

    pub fn add(&self, other: &Current) -> Current {
        Current(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &Current) -> Current {
        Current(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> Current {
        Current(self.0.iter().map(f).collect())
    }
}

/// Vertical generalized vector field `Σ Q_i ∂/∂u^i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralizedField {
    pub characteristics: Vec<Expr>,
}

impl GeneralizedField {
    pub fn new(space: &JetSpace, characteristics: Vec<Expr>) -> Result<Self> {
        check_len("characteristic", space.fields(), characteristics.len())?;
        Ok(GeneralizedField { characteristics })
    }
}

/// Infinitesimal transformation `Σ X^λ ∂/∂x^λ + Σ Y^i ∂/∂u^i`, with an
/// optional divergence term `C` for symmetries holding only up to a total
/// divergence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryCandidate {
    x: Vec<Expr>,
    y: Vec<Expr>,
    c: Current,
}

impl SymmetryCandidate {
    /// `X` must depend on the independent variables only.
    pub fn new(space: &JetSpace, x: Vec<Expr>, y: Vec<Expr>, c: Option<Current>) -> Result<Self> {
        check_len("X", space.dims(), x.len())?;
        check_len("Y", space.fields(), y.len())?;
        let c = c.unwrap_or_else(|| Current::zero(space.dims()));
        check_len("C", space.dims(), c.0.len())?;
        if let Some(bad) = x.iter().position(|e| e.contains(|v| !v.is_independent())) {
            return Err(Error::InvalidCandidate(format!(
                "X[{}] depends on dependent variables; base components must be functions of {} only",
                space.independents()[bad],
                space.independents().join(", ")
            )));
        }
        Ok(SymmetryCandidate { x, y, c })
    }

    pub fn zero(space: &JetSpace) -> Self {
        SymmetryCandidate {
            x: vec![Expr::zero(); space.dims()],
            y: vec![Expr::zero(); space.fields()],
            c: Current::zero(space.dims()),
        }
    }

    pub fn vertical(space: &JetSpace, y: Vec<Expr>) -> Result<Self> {
        SymmetryCandidate::new(space, vec![Expr::zero(); space.dims()], y, None)
    }

    pub fn base(&self) -> &[Expr] {
        &self.x
    }

    pub fn fiber(&self) -> &[Expr] {
        &self.y
    }

    pub fn divergence_term(&self) -> &Current {
        &self.c
    }

    pub fn with_divergence_term(mut self, c: Current) -> Self {
        self.c = c;
        self
    }
}

fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::ShapeMismatch {
            what,
            expected,
            found,
        })
    }
}

/// `D_λ e = ∂e/∂x_λ + Σ u^i_{J+λ} ∂e/∂u^i_J`.
pub fn total_derivative(space: &JetSpace, e: &Expr, axis: usize) -> Result<Expr> {
    let mut out = e.partial(&Var::Indep(axis));
    for v in e.vars() {
        match &v {
            Var::Jet { dep, index } => {
                let next = Var::jet(*dep, index.incremented(axis));
                space.check_var(&next)?;
                out += &(Expr::var(next) * e.partial(&v));
            }
            Var::Slot { .. } => space.check_var(&v)?,
            Var::Indep(_) => {}
        }
    }
    Ok(out)
}

/// Composite total derivative `D_J e`.
pub fn total_derivative_multi(space: &JetSpace, e: &Expr, index: &MultiIndex) -> Result<Expr> {
    let mut out = e.clone();
    for (axis, &count) in index.counts().iter().enumerate() {
        for _ in 0..count {
            if out.is_zero() {
                return Ok(out);
            }
            out = total_derivative(space, &out, axis)?;
        }
    }
    Ok(out)
}

/// `Div P = Σ_λ D_λ P^λ`.
pub fn divergence(space: &JetSpace, p: &Current) -> Result<Expr> {
    check_len("current", space.dims(), p.0.len())?;
    let mut out = Expr::zero();
    for (axis, comp) in p.0.iter().enumerate() {
        out += &total_derivative(space, comp, axis)?;
    }
    Ok(out)
}

/// Memoized `D_J` of a fixed expression.
pub(crate) struct Derivatives<'a> {
    space: &'a JetSpace,
    cache: BTreeMap<MultiIndex, Expr>,
}

impl<'a> Derivatives<'a> {
    pub(crate) fn new(space: &'a JetSpace, base: Expr) -> Self {
        let cache = BTreeMap::from([(MultiIndex::zero(space.dims()), base)]);
        Derivatives { space, cache }
    }

    pub(crate) fn get(&mut self, index: &MultiIndex) -> Result<Expr> {
        if let Some(e) = self.cache.get(index) {
            return Ok(e.clone());
        }
        let axis = index.first_axis().expect("zero index is always cached");
        let lower = index.decremented(axis).expect("axis has a positive count");
        let below = self.get(&lower)?;
        let e = total_derivative(self.space, &below, axis)?;
        self.cache.insert(index.clone(), e.clone());
        Ok(e)
    }
}

/// Characteristics `Q_i = Y^i - Σ_λ X^λ u^i_λ`.
pub fn evolutionary_representative(space: &JetSpace, s: &SymmetryCandidate) -> GeneralizedField {
    let characteristics = (0..space.fields())
        .map(|i| {
            let mut q = s.y[i].clone();
            for (axis, x) in s.x.iter().enumerate() {
                if !x.is_zero() {
                    q -= &(x * &Expr::var(space.derivative(i, &[axis])));
                }
            }
            q
        })
        .collect();
    GeneralizedField { characteristics }
}

/// `pr Z(e) = Σ_{i,J} D_J(Q_i) ∂e/∂u^i_J`.
pub fn prolong_apply(space: &JetSpace, z: &GeneralizedField, e: &Expr) -> Result<Expr> {
    check_len("characteristic", space.fields(), z.characteristics.len())?;
    let mut derivs: Vec<Derivatives> = z
        .characteristics
        .iter()
        .map(|q| Derivatives::new(space, q.clone()))
        .collect();
    let mut out = Expr::zero();
    for v in e.vars() {
        if let Var::Jet { dep, index } = &v {
            let dq = derivs[*dep].get(index)?;
            if !dq.is_zero() {
                out += &(dq * e.partial(&v));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tx() -> JetSpace {
        JetSpace::new(&["t", "x"], &["u"], 1).unwrap()
    }

    fn t_only() -> JetSpace {
        JetSpace::new(&["t"], &["u"], 1).unwrap()
    }

    #[test]
    fn total_derivative_examples() {
        let s = tx();
        let u = s.parse("u").unwrap();
        assert_eq!(
            total_derivative(&s, &u, 1).unwrap(),
            s.parse("d(u;x)").unwrap()
        );
        let e = s.parse("u*d(u;t)").unwrap();
        assert_eq!(
            total_derivative(&s, &e, 0).unwrap(),
            s.parse("d(u;t)^2 + u*d(u;t,t)").unwrap()
        );
        let e = s.parse("x^2").unwrap();
        assert_eq!(
            total_derivative(&s, &e, 1).unwrap(),
            s.parse("2*x").unwrap()
        );
    }

    #[test]
    fn headroom_overflow_is_an_error() {
        let s = t_only().with_headroom(2);
        let e = s.parse("d(u;t,t)").unwrap();
        assert_eq!(
            total_derivative(&s, &e, 0),
            Err(Error::OrderOverflow { order: 3, max: 2 })
        );
    }

    #[test]
    fn divergence_examples() {
        let s = t_only();
        let p = Current(vec![s.parse("d(u;t)").unwrap()]);
        assert_eq!(divergence(&s, &p).unwrap(), s.parse("d(u;t,t)").unwrap());

        let s = tx();
        let g = s.parse("u*d(u;x)").unwrap();
        let p = Current(vec![
            total_derivative(&s, &g, 1).unwrap(),
            -total_derivative(&s, &g, 0).unwrap(),
        ]);
        assert!(divergence(&s, &p).unwrap().is_zero());

        let p = Current(vec![
            s.parse("1/2*d(u;t)^2 + 1/2*u^2").unwrap(),
            s.parse("-d(u;t)*d(u;x)").unwrap(),
        ]);
        assert_eq!(
            divergence(&s, &p).unwrap(),
            s.parse("d(u;t)*(d(u;t,t) - d(u;x,x)) + u*d(u;t) - d(u;x)*d(u;t,x)")
                .unwrap()
        );
    }

    #[test]
    fn divergence_shape_mismatch() {
        let s = tx();
        assert!(matches!(
            divergence(&s, &Current(vec![Expr::zero()])),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn evolutionary_representative_examples() {
        let s = t_only();
        let one = Expr::one();
        let time = SymmetryCandidate::new(&s, vec![one.clone()], vec![Expr::zero()], None).unwrap();
        assert_eq!(
            evolutionary_representative(&s, &time).characteristics,
            vec![s.parse("-d(u;t)").unwrap()]
        );
        let shift = SymmetryCandidate::vertical(&s, vec![one.clone()]).unwrap();
        assert_eq!(
            evolutionary_representative(&s, &shift).characteristics,
            vec![one]
        );
        let boost = SymmetryCandidate::vertical(&s, vec![s.parse("t").unwrap()]).unwrap();
        assert_eq!(
            evolutionary_representative(&s, &boost).characteristics,
            vec![s.parse("t").unwrap()]
        );
    }

    #[test]
    fn base_components_must_not_depend_on_fields() {
        let s = t_only();
        let err = SymmetryCandidate::new(&s, vec![s.parse("u").unwrap()], vec![Expr::zero()], None)
            .unwrap_err();
        assert!(matches!(err, Error::InvalidCandidate(_)));
    }

    #[test]
    fn prolongation_examples() {
        let s = t_only();
        let z = GeneralizedField::new(&s, vec![Expr::one()]).unwrap();
        assert_eq!(
            prolong_apply(&s, &z, &s.parse("u^2").unwrap()).unwrap(),
            s.parse("2*u").unwrap()
        );
        let z = GeneralizedField::new(&s, vec![s.parse("-d(u;t)").unwrap()]).unwrap();
        let f = s.parse("1/2*d(u;t)^2 - 1/2*u^2").unwrap();
        assert_eq!(
            prolong_apply(&s, &z, &f).unwrap(),
            s.parse("u*d(u;t) - d(u;t)*d(u;t,t)").unwrap()
        );
        assert!(prolong_apply(&s, &z, &s.parse("t^3 + 2").unwrap())
            .unwrap()
            .is_zero());
    }
}
