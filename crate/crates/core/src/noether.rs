//! Conserved currents from divergence symmetries, Noether identities from
//! gauge families, triviality classification and the adjoint-linearization
//! test for non-variational systems.
//!
//! Sign convention: every current satisfies `Div B = Σ ψ_i Q_i` exactly,
//! with `ψ` the Euler–Lagrange expressions and `Q` the characteristic.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::expr::{Expr, JetSpace, MultiIndex, Var};
use crate::jet::{
    divergence, evolutionary_representative, prolong_apply, total_derivative, Current, Derivatives,
    GeneralizedField, SymmetryCandidate,
};
use crate::linsolve;
use crate::variational::{
    boundary_current, euler_lagrange, formal_adjoint, invert_divergence, linearize, EulerLagrange,
    LinearDiffOp,
};

/// Outcome of the invariance test `pr Q(f) + Div(f·X) - Div C = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymmetryCheck {
    pub holds: bool,
    pub residual: Expr,
}

pub fn check_divergence_symmetry(
    space: &JetSpace,
    f: &Expr,
    s: &SymmetryCandidate,
) -> Result<SymmetryCheck> {
    let z = evolutionary_representative(space, s);
    let mut residual = prolong_apply(space, &z, f)?;
    let transported = Current(s.base().iter().map(|x| f * x).collect());
    residual += &divergence(space, &transported)?;
    residual -= &divergence(space, s.divergence_term())?;
    Ok(SymmetryCheck {
        holds: residual.is_zero(),
        residual,
    })
}

/// A Theorem I current together with the data that certifies it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoetherCurrent {
    pub current: Current,
    pub characteristic: GeneralizedField,
    pub euler_lagrange: EulerLagrange,
    /// `Div B - Σ ψ_i Q_i`, canonically zero for a correct current.
    pub certificate: Expr,
}

impl NoetherCurrent {
    pub fn certified(&self) -> bool {
        self.certificate.is_zero()
    }
}

/// `B = C - f·X - A`, where `A` is the boundary current of the
/// evolutionary representative (`pr Q(f) = Σ ψ_i Q_i + Div A`).
pub fn noether_current(
    space: &JetSpace,
    f: &Expr,
    s: &SymmetryCandidate,
) -> Result<NoetherCurrent> {
    let check = check_divergence_symmetry(space, f, s)?;
    if !check.holds {
        return Err(Error::NotASymmetry {
            residual: check.residual,
        });
    }
    let psi = euler_lagrange(space, f)?;
    let z = evolutionary_representative(space, s);
    let a = boundary_current(space, f, &z)?;
    let current = Current(
        (0..space.dims())
            .map(|axis| &s.divergence_term().0[axis] - &(f * &s.base()[axis]) - &a.0[axis])
            .collect(),
    );
    let certificate = divergence(space, &current)? - psi.pair(&z);
    Ok(NoetherCurrent {
        current,
        characteristic: z,
        euler_lagrange: psi,
        certificate,
    })
}

/// A symmetry family `δu^i = 𝒟_i(p)` parametrized by one arbitrary function
/// `p`, itself modelled as a dependent variable of the space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaugeFamily {
    parameter: usize,
    operator: LinearDiffOp,
}

impl GaugeFamily {
    /// Builds the operator from per-field expressions linear and homogeneous
    /// in the jets of `p`.
    pub fn from_exprs(space: &JetSpace, parameter: usize, exprs: &[Expr]) -> Result<Self> {
        if exprs.len() != space.fields() {
            return Err(Error::ShapeMismatch {
                what: "gauge operator",
                expected: space.fields(),
                found: exprs.len(),
            });
        }
        let is_param = |v: &Var| matches!(v, Var::Jet { dep, .. } if *dep == parameter);
        let mut operator = LinearDiffOp::zero(space.fields(), 1);
        for (row, e) in exprs.iter().enumerate() {
            let mut rebuilt = Expr::zero();
            for v in e.vars().into_iter().filter(|v| is_param(v)) {
                let coeff = e.partial(&v);
                if coeff.contains(is_param) {
                    return Err(Error::NonLinearGauge(
                        crate::expr::Scope::dependents(space)[row].clone(),
                    ));
                }
                rebuilt += &(&coeff * &Expr::var(v.clone()));
                if let Var::Jet { index, .. } = v {
                    operator.set(row, 0, index, coeff);
                }
            }
            if rebuilt != *e {
                return Err(Error::NonLinearGauge(
                    crate::expr::Scope::dependents(space)[row].clone(),
                ));
            }
        }
        Ok(GaugeFamily {
            parameter,
            operator,
        })
    }

    pub fn from_operator(parameter: usize, operator: LinearDiffOp) -> Self {
        GaugeFamily {
            parameter,
            operator,
        }
    }

    pub fn parameter(&self) -> usize {
        self.parameter
    }

    pub fn operator(&self) -> &LinearDiffOp {
        &self.operator
    }

    /// The vertical symmetry obtained by fixing `p`.
    pub fn specialize(&self, space: &JetSpace, p: &Expr) -> Result<SymmetryCandidate> {
        let y = self.operator.apply(space, std::slice::from_ref(p))?;
        SymmetryCandidate::vertical(space, y)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NoetherIdentity {
    /// `Σ_i (𝒟_i)*(ψ_i)`
    pub expr: Expr,
    pub gauge: GaugeFamily,
    pub verified: bool,
}

/// Computes `Σ_i (𝒟_i)*(ψ_i)`; it vanishes identically exactly when the
/// gauge family is a symmetry family of `f`.
pub fn noether_identity(
    space: &JetSpace,
    f: &Expr,
    gauge: &GaugeFamily,
) -> Result<NoetherIdentity> {
    let psi = euler_lagrange(space, f)?;
    let adjoint = formal_adjoint(space, gauge.operator())?;
    let expr = adjoint
        .apply(space, psi.components())?
        .into_iter()
        .next()
        .unwrap_or_default();
    Ok(NoetherIdentity {
        verified: expr.is_zero(),
        expr,
        gauge: gauge.clone(),
    })
}

/// Directed on-shell substitution: each rule replaces a leading jet
/// coordinate and all of its prolongations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    rules: Vec<Rule>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub dep: usize,
    pub index: MultiIndex,
    pub replacement: Expr,
}

const MAX_REDUCTION_PASSES: usize = 64;

impl NormalForm {
    pub fn new(rules: Vec<Rule>) -> Self {
        NormalForm { rules }
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    /// The equations `lead - replacement = 0` this normal form encodes.
    pub fn equations(&self) -> Vec<Expr> {
        self.rules
            .iter()
            .map(|r| Expr::var(Var::jet(r.dep, r.index.clone())) - &r.replacement)
            .collect()
    }

    /// Substitutes until no leading derivative (or prolongation of one)
    /// remains. The first matching rule wins.
    pub fn reduce(&self, space: &JetSpace, e: &Expr) -> Result<Expr> {
        let mut derivs: Vec<Derivatives> = self
            .rules
            .iter()
            .map(|r| Derivatives::new(space, r.replacement.clone()))
            .collect();
        let mut current = e.clone();
        for _ in 0..MAX_REDUCTION_PASSES {
            let mut bindings = BTreeMap::new();
            for v in current.vars() {
                let Var::Jet { dep, index } = &v else {
                    continue;
                };
                let hit = self.rules.iter().enumerate().find_map(|(k, r)| {
                    (r.dep == *dep)
                        .then(|| index.minus(&r.index))
                        .flatten()
                        .map(|rest| (k, rest))
                });
                if let Some((k, rest)) = hit {
                    let value = derivs[k].get(&rest).map_err(|err| match err {
                        Error::OrderOverflow { .. } => Error::NonTerminating,
                        other => other,
                    })?;
                    bindings.insert(v.clone(), value);
                }
            }
            if bindings.is_empty() {
                return Ok(current);
            }
            current = current.substitute(&bindings);
        }
        Err(Error::NonTerminating)
    }

    pub fn reduce_current(&self, space: &JetSpace, b: &Current) -> Result<Current> {
        Ok(Current(
            b.0.iter()
                .map(|e| self.reduce(space, e))
                .collect::<Result<Vec<_>>>()?,
        ))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Triviality {
    Nontrivial,
    FirstKind,
    SecondKind,
    Mixed,
}

impl Triviality {
    pub fn is_trivial(self) -> bool {
        self != Triviality::Nontrivial
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Triviality::Nontrivial => "nontrivial",
            Triviality::FirstKind => "trivial-first-kind",
            Triviality::SecondKind => "trivial-second-kind",
            Triviality::Mixed => "mixed-trivial",
        }
    }
}

impl fmt::Display for Triviality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Verdict plus the split `B = first_kind + second_kind` that witnesses it.
/// For a nontrivial law `first_kind` is the on-shell-vanishing part removed
/// by reduction and `second_kind` is the reduced residue.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrivialityVerdict {
    pub kind: Triviality,
    pub first_kind: Current,
    pub second_kind: Current,
    pub divergence: Expr,
}

impl TrivialityVerdict {
    /// Re-derives the verdict's claims from its certificate data.
    pub fn recheck(&self, space: &JetSpace, b: &Current, nf: &NormalForm) -> Result<bool> {
        if self.first_kind.add(&self.second_kind) != *b {
            return Ok(false);
        }
        let first_vanishes = nf.reduce_current(space, &self.first_kind)?.is_zero();
        let second_null = divergence(space, &self.second_kind)?.is_zero();
        Ok(match self.kind {
            Triviality::SecondKind => self.first_kind.is_zero() && second_null,
            Triviality::FirstKind => self.second_kind.is_zero() && first_vanishes,
            Triviality::Mixed => first_vanishes && second_null,
            Triviality::Nontrivial => {
                first_vanishes
                    && nf.reduce(space, &divergence(space, b)?)?.is_zero()
                    && !second_null
            }
        })
    }
}

/// Classifies a conservation law of the normal system `nf`.
///
/// Second kind when `Div B` vanishes identically; first kind when every
/// component vanishes on-shell; mixed when the on-shell reduction leaves a
/// residue with null divergence, or when a bounded search finds an
/// on-shell-vanishing correction `C` that makes the residue's divergence
/// null.
pub fn classify_triviality(
    space: &JetSpace,
    b: &Current,
    nf: &NormalForm,
) -> Result<TrivialityVerdict> {
    let div = divergence(space, b)?;
    if div.is_zero() {
        return Ok(TrivialityVerdict {
            kind: Triviality::SecondKind,
            first_kind: Current::zero(space.dims()),
            second_kind: b.clone(),
            divergence: div,
        });
    }
    let on_shell = nf.reduce(space, &div)?;
    if !on_shell.is_zero() {
        return Err(Error::NotConserved { residual: on_shell });
    }
    let residue = nf.reduce_current(space, b)?;
    if residue.is_zero() {
        return Ok(TrivialityVerdict {
            kind: Triviality::FirstKind,
            first_kind: b.clone(),
            second_kind: residue,
            divergence: div,
        });
    }
    let verdict = |kind, second: Current| TrivialityVerdict {
        kind,
        first_kind: b.sub(&second),
        second_kind: second,
        divergence: div.clone(),
    };
    if divergence(space, &residue)?.is_zero() {
        return Ok(verdict(Triviality::Mixed, residue));
    }
    if let Some(correction) = on_shell_correction(space, &residue, nf)? {
        let second = residue.sub(&correction);
        let kind = if second.is_zero() {
            Triviality::FirstKind
        } else {
            Triviality::Mixed
        };
        return Ok(verdict(kind, second));
    }
    Ok(verdict(Triviality::Nontrivial, residue))
}

/// Degree bound on the `x`-monomial multipliers of the correction ansatz.
const CORRECTION_MULTIPLIER_DEGREE: u32 = 2;
/// Derivative bound on the normal-form equations in the correction ansatz.
const CORRECTION_DERIVATIVE_ORDER: u32 = 1;

/// Searches `C^λ = Σ c·m(x)·D_J(E_k)` with `Div C = Div residue`, where
/// `E_k` are the normal-form equations. Such a `C` vanishes on-shell, so
/// `residue - C` is a null divergence.
fn on_shell_correction(
    space: &JetSpace,
    residue: &Current,
    nf: &NormalForm,
) -> Result<Option<Current>> {
    let target = divergence(space, residue)?;
    let multipliers = x_monomials(space.dims(), CORRECTION_MULTIPLIER_DEGREE);
    let orders = MultiIndex::all_up_to(space.dims(), CORRECTION_DERIVATIVE_ORDER);
    let mut basis: Vec<(usize, Expr)> = Vec::new();
    let mut columns = Vec::new();
    for equation in nf.equations() {
        let mut derivs = Derivatives::new(space, equation);
        for index in &orders {
            let Ok(de) = derivs.get(index) else { continue };
            for m in &multipliers {
                let element = m * &de;
                for axis in 0..space.dims() {
                    if let Ok(d) = total_derivative(space, &element, axis) {
                        basis.push((axis, element.clone()));
                        columns.push(d);
                    }
                }
            }
        }
    }
    let Some(coeffs) = linsolve::solve(&columns, &target) else {
        return Ok(None);
    };
    let mut correction = Current::zero(space.dims());
    for ((axis, element), c) in basis.iter().zip(&coeffs) {
        correction.0[*axis] += &element.scale(c);
    }
    let vanishes = nf.reduce_current(space, &correction)?.is_zero();
    let null = divergence(space, &residue.sub(&correction))?.is_zero();
    Ok((vanishes && null).then_some(correction))
}

fn x_monomials(dims: usize, degree: u32) -> Vec<Expr> {
    MultiIndex::all_up_to(dims, degree)
        .into_iter()
        .map(|powers| {
            powers
                .counts()
                .iter()
                .enumerate()
                .fold(Expr::one(), |acc, (axis, &k)| {
                    acc * Expr::var(Var::Indep(axis)).pow(u32::from(k))
                })
        })
        .collect()
}

/// Theorem II ⇒ Theorem I bridge: fixes `p`, derives the induced current
/// and classifies it.
pub fn improper_law(
    space: &JetSpace,
    f: &Expr,
    gauge: &GaugeFamily,
    p: &Expr,
    nf: &NormalForm,
) -> Result<(NoetherCurrent, TrivialityVerdict)> {
    let s = gauge.specialize(space, p)?;
    let current = noether_current(space, f, &s)?;
    let verdict = classify_triviality(space, &current.current, nf)?;
    Ok((current, verdict))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MagriOutcome {
    pub holds: bool,
    /// `(V F)*(w)` reduced on-shell.
    pub adjoint_residual: Vec<Expr>,
    /// A current with `Div P = Σ w_i F_i`, when that is a total divergence.
    pub current: Option<Current>,
}

/// Tests whether `w` lies in the kernel of the adjoint linearization of `F`
/// on solutions of `F = 0`.
pub fn magri_check(
    space: &JetSpace,
    system: &[Expr],
    multiplier: &[Expr],
    nf: &NormalForm,
) -> Result<MagriOutcome> {
    if multiplier.len() != system.len() {
        return Err(Error::ShapeMismatch {
            what: "multiplier",
            expected: system.len(),
            found: multiplier.len(),
        });
    }
    let adjoint = formal_adjoint(space, &linearize(space, system))?;
    let adjoint_residual = adjoint
        .apply(space, multiplier)?
        .iter()
        .map(|e| nf.reduce(space, e))
        .collect::<Result<Vec<_>>>()?;
    let holds = adjoint_residual.iter().all(Expr::is_zero);
    let current = if holds {
        let density: Expr = system.iter().zip(multiplier).map(|(f, w)| f * w).sum();
        invert_divergence(space, &density)?
    } else {
        None
    };
    Ok(MagriOutcome {
        holds,
        adjoint_residual,
        current,
    })
}
