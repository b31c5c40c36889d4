//! Euler–Lagrange operator, integration by parts, Fréchet linearization and
//! formal adjoints.

use std::collections::BTreeMap;

use num_traits::One;

use crate::error::{Error, Result};
use crate::expr::{alternating, Expr, JetSpace, MultiIndex, Rational, Var};
use crate::jet::{self, divergence, total_derivative, Current, Derivatives, GeneralizedField};

/// The Lagrangian expressions `ψ_i`, one per dependent variable.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct EulerLagrange(pub Vec<Expr>);

impl EulerLagrange {
    pub fn components(&self) -> &[Expr] {
        &self.0
    }

    /// `Σ ψ_i Q_i`
    pub fn pair(&self, z: &GeneralizedField) -> Expr {
        self.0
            .iter()
            .zip(&z.characteristics)
            .map(|(psi, q)| psi * q)
            .sum()
    }
}

/// `ψ_i = Σ_J (-1)^{|J|} D_J(∂f/∂u^i_J)` for a Lagrangian of order at most κ.
pub fn euler_lagrange(space: &JetSpace, f: &Expr) -> Result<EulerLagrange> {
    let order = f.max_order();
    if order > space.order() {
        return Err(Error::LagrangianOrder {
            order,
            max: space.order(),
        });
    }
    euler_operator(space, f).map(EulerLagrange)
}

/// The Euler operator without the Lagrangian-order precondition.
pub fn euler_operator(space: &JetSpace, f: &Expr) -> Result<Vec<Expr>> {
    let mut out = vec![Expr::zero(); space.fields()];
    for v in f.vars() {
        if let Var::Jet { dep, index } = &v {
            let term = jet::total_derivative_multi(space, &f.partial(&v), index)?;
            out[*dep] += &term.scale(&alternating(index.order()));
        }
    }
    Ok(out)
}

/// Coefficients `g_{slot,J}` of a bilinear form `Σ g_{slot,J} D_J(target_slot)`.
pub(crate) type BilinearCoefficients = Vec<BTreeMap<MultiIndex, Expr>>;

/// Repeated integration by parts.
///
/// Rewrites `Σ_{s,J} g_{s,J} D_J(t_s)` as `Σ_s h_s t_s + Div Γ`, returning
/// `(h, Γ)`. The lexicographically largest multi-index is peeled first,
/// along its lowest nonzero axis; every new index is lexicographically
/// smaller, so the recursion terminates and `Γ` is deterministic.
pub(crate) fn integrate_by_parts(
    space: &JetSpace,
    mut coefficients: BilinearCoefficients,
    targets: &[Expr],
) -> Result<(Vec<Expr>, Current)> {
    let mut gamma = Current::zero(space.dims());
    let mut remainder = Vec::with_capacity(targets.len());
    for (slot, target) in targets.iter().enumerate() {
        let map = &mut coefficients[slot];
        let mut derivs = Derivatives::new(space, target.clone());
        while let Some((index, _)) = map.iter().next_back() {
            if index.is_zero() {
                break;
            }
            let index = index.clone();
            let g = map.remove(&index).expect("key just observed");
            if g.is_zero() {
                continue;
            }
            let axis = index.first_axis().expect("nonzero index");
            let lower = index.decremented(axis).expect("positive count");
            let dt = derivs.get(&lower)?;
            gamma.0[axis] += &(&g * &dt);
            let dg = total_derivative(space, &g, axis)?;
            *map.entry(lower).or_default() -= &dg;
        }
        remainder.push(
            map.remove(&MultiIndex::zero(space.dims()))
                .unwrap_or_default(),
        );
    }
    Ok((remainder, gamma))
}

/// Boundary current `A` with `pr Z(f) = Σ ψ_i Q_i + Div A`.
pub fn boundary_current(space: &JetSpace, f: &Expr, z: &GeneralizedField) -> Result<Current> {
    if z.characteristics.len() != space.fields() {
        return Err(Error::ShapeMismatch {
            what: "characteristic",
            expected: space.fields(),
            found: z.characteristics.len(),
        });
    }
    let mut coefficients: BilinearCoefficients = vec![BTreeMap::new(); space.fields()];
    for v in f.vars() {
        if let Var::Jet { dep, index } = &v {
            coefficients[*dep].insert(index.clone(), f.partial(&v));
        }
    }
    let (_, gamma) = integrate_by_parts(space, coefficients, &z.characteristics)?;
    Ok(gamma)
}

/// Matrix of scalar linear differential operators. Entry `(r, c)` maps the
/// `c`-th argument into the `r`-th output: `Σ_J a^{r,c,J} D_J`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearDiffOp {
    rows: usize,
    cols: usize,
    entries: Vec<BTreeMap<MultiIndex, Expr>>,
}

impl LinearDiffOp {
    pub fn zero(rows: usize, cols: usize) -> Self {
        LinearDiffOp {
            rows,
            cols,
            entries: vec![BTreeMap::new(); rows * cols],
        }
    }

    pub fn identity(size: usize, dims: usize) -> Self {
        let mut op = LinearDiffOp::zero(size, size);
        for i in 0..size {
            op.set(i, i, MultiIndex::zero(dims), Expr::one());
        }
        op
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Sets a coefficient; zero coefficients are dropped.
    pub fn set(&mut self, row: usize, col: usize, index: MultiIndex, coeff: Expr) {
        let entry = &mut self.entries[row * self.cols + col];
        if coeff.is_zero() {
            entry.remove(&index);
        } else {
            entry.insert(index, coeff);
        }
    }

    fn accumulate(&mut self, row: usize, col: usize, index: MultiIndex, coeff: &Expr) {
        let entry = &mut self.entries[row * self.cols + col];
        let slot = entry.entry(index.clone()).or_default();
        *slot += coeff;
        if slot.is_zero() {
            entry.remove(&index);
        }
    }

    pub fn entry(&self, row: usize, col: usize) -> &BTreeMap<MultiIndex, Expr> {
        &self.entries[row * self.cols + col]
    }

    pub fn coefficient(&self, row: usize, col: usize, index: &MultiIndex) -> Expr {
        self.entry(row, col).get(index).cloned().unwrap_or_default()
    }

    /// Highest `|J|` with a nonzero coefficient.
    pub fn order(&self) -> u32 {
        self.entries
            .iter()
            .flat_map(|e| e.keys().map(MultiIndex::order))
            .max()
            .unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(BTreeMap::is_empty)
    }

    pub fn apply(&self, space: &JetSpace, args: &[Expr]) -> Result<Vec<Expr>> {
        if args.len() != self.cols {
            return Err(Error::ShapeMismatch {
                what: "operator argument",
                expected: self.cols,
                found: args.len(),
            });
        }
        let mut derivs: Vec<Derivatives> = args
            .iter()
            .map(|a| Derivatives::new(space, a.clone()))
            .collect();
        let mut out = vec![Expr::zero(); self.rows];
        for (r, slot) in out.iter_mut().enumerate() {
            for (c, d) in derivs.iter_mut().enumerate() {
                for (index, coeff) in self.entry(r, c) {
                    *slot += &(coeff * &d.get(index)?);
                }
            }
        }
        Ok(out)
    }
}

/// Fréchet derivative of `F`: `a^{r,c,J} = ∂F_r/∂u^c_J`.
pub fn linearize(space: &JetSpace, system: &[Expr]) -> LinearDiffOp {
    let mut op = LinearDiffOp::zero(system.len(), space.fields());
    for (r, f) in system.iter().enumerate() {
        for v in f.vars() {
            if let Var::Jet { dep, index } = &v {
                op.set(r, *dep, index.clone(), f.partial(&v));
            }
        }
    }
    op
}

/// `D*(q) = Σ_J (-1)^{|J|} D_J(a^J q)`, expanded by Leibniz into
/// coefficient form on the transposed shape.
pub fn formal_adjoint(space: &JetSpace, op: &LinearDiffOp) -> Result<LinearDiffOp> {
    let mut adj = LinearDiffOp::zero(op.cols, op.rows);
    for r in 0..op.rows {
        for c in 0..op.cols {
            for (index, a) in op.entry(r, c) {
                let sign = alternating(index.order());
                let mut derivs = Derivatives::new(space, a.clone());
                for lower in index.lower_set() {
                    let rest = index.minus(&lower).expect("lower set");
                    let weight = Rational::from_integer(index.binomial(&lower)) * &sign;
                    let term = derivs.get(&rest)?.scale(&weight);
                    adj.accumulate(c, r, lower, &term);
                }
            }
        }
    }
    Ok(adj)
}

/// `Γ` with `w·D(p) - D*(w)·p = Div Γ`, built by the integration-by-parts
/// recursion. Also returns the recursion's own `D*(w)`.
pub fn adjoint_boundary(
    space: &JetSpace,
    op: &LinearDiffOp,
    w: &[Expr],
    p: &[Expr],
) -> Result<(Vec<Expr>, Current)> {
    if w.len() != op.rows || p.len() != op.cols {
        return Err(Error::ShapeMismatch {
            what: "adjoint pairing",
            expected: op.rows + op.cols,
            found: w.len() + p.len(),
        });
    }
    let mut coefficients: BilinearCoefficients = vec![BTreeMap::new(); op.cols];
    for (r, wr) in w.iter().enumerate() {
        for (c, slot) in coefficients.iter_mut().enumerate() {
            for (index, a) in op.entry(r, c) {
                *slot.entry(index.clone()).or_default() += &(wr * a);
            }
        }
    }
    integrate_by_parts(space, coefficients, p)
}

/// Witness of a failed self-adjointness check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdjointMismatch {
    pub row: usize,
    pub col: usize,
    pub index: MultiIndex,
    pub operator: Expr,
    pub adjoint: Expr,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelfAdjointness {
    pub holds: bool,
    pub witness: Option<AdjointMismatch>,
}

/// Compares `D*` with `D` coefficient by coefficient, highest multi-index
/// first; the first difference is the witness.
pub fn is_self_adjoint(space: &JetSpace, op: &LinearDiffOp) -> Result<SelfAdjointness> {
    if op.rows != op.cols {
        return Err(Error::ShapeMismatch {
            what: "self-adjointness needs a square operator",
            expected: op.rows,
            found: op.cols,
        });
    }
    let adj = formal_adjoint(space, op)?;
    for r in 0..op.rows {
        for c in 0..op.cols {
            let mut indices: Vec<&MultiIndex> = op
                .entry(r, c)
                .keys()
                .chain(adj.entry(r, c).keys())
                .collect();
            indices.sort();
            indices.dedup();
            for index in indices.into_iter().rev() {
                let a = op.coefficient(r, c, index);
                let b = adj.coefficient(r, c, index);
                if a != b {
                    return Ok(SelfAdjointness {
                        holds: false,
                        witness: Some(AdjointMismatch {
                            row: r,
                            col: c,
                            index: index.clone(),
                            operator: a,
                            adjoint: b,
                        }),
                    });
                }
            }
        }
    }
    Ok(SelfAdjointness {
        holds: true,
        witness: None,
    })
}

/// Finds `P` with `Div P = g` when `g` is a total divergence.
///
/// Each part of `g` homogeneous of degree `k > 0` in the jet coordinates
/// satisfies `k·g_k = Σ u^i E_i(g_k) + Div A(g_k, u)`, so it integrates to
/// `A/k` once its Euler–Lagrange expressions vanish. The jet-free part is
/// integrated in the first independent variable. Returns `None` when `g` is
/// not a divergence.
pub fn invert_divergence(space: &JetSpace, g: &Expr) -> Result<Option<Current>> {
    let mut p = Current::zero(space.dims());
    for (degree, part) in g.homogeneous_parts(|v| matches!(v, Var::Jet { .. })) {
        if degree == 0 {
            p.0[0] += &antiderivative(&part, 0);
            continue;
        }
        if euler_operator(space, &part)?.iter().any(|e| !e.is_zero()) {
            return Ok(None);
        }
        let scaling = GeneralizedField {
            characteristics: (0..space.fields())
                .map(|i| Expr::var(space.field(i)))
                .collect(),
        };
        let a = boundary_current(space, &part, &scaling)?;
        let k = Rational::one() / Rational::from_integer(degree.into());
        p = p.add(&a.scale(&k));
    }
    debug_assert!((divergence(space, &p)? - g).is_zero());
    Ok(Some(p))
}

/// Antiderivative in one independent variable of a jet-free polynomial.
fn antiderivative(e: &Expr, axis: usize) -> Expr {
    let x = Var::Indep(axis);
    let mut out = Expr::zero();
    for (m, c) in e.terms() {
        let k = m.exponent(&x) + 1;
        let lifted = Expr::term(m.clone(), c.clone()) * Expr::var(x.clone());
        out += &lifted.scale(&(Rational::one() / Rational::from_integer(k.into())));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::prolong_apply;

    fn t_only() -> JetSpace {
        JetSpace::new(&["t"], &["u"], 1).unwrap()
    }

    fn tx() -> JetSpace {
        JetSpace::new(&["t", "x"], &["u"], 2).unwrap()
    }

    fn field(s: &JetSpace, q: &str) -> GeneralizedField {
        GeneralizedField::new(s, vec![s.parse(q).unwrap()]).unwrap()
    }

    #[test]
    fn euler_lagrange_examples() {
        let s = t_only();
        let psi = euler_lagrange(&s, &s.parse("1/2*d(u;t)^2").unwrap()).unwrap();
        assert_eq!(psi.0, vec![s.parse("-d(u;t,t)").unwrap()]);
        let psi = euler_lagrange(&s, &Expr::zero()).unwrap();
        assert_eq!(psi.0, vec![Expr::zero()]);
        let s = tx();
        let psi = euler_lagrange(&s, &s.parse("1/2*d(u;t)^2 - 1/2*d(u;x)^2").unwrap()).unwrap();
        assert_eq!(psi.0, vec![s.parse("-d(u;t,t) + d(u;x,x)").unwrap()]);
    }

    #[test]
    fn euler_lagrange_rejects_high_order() {
        let s = t_only();
        let err = euler_lagrange(&s, &s.parse("d(u;t,t)^2").unwrap()).unwrap_err();
        assert_eq!(err, Error::LagrangianOrder { order: 2, max: 1 });
    }

    #[test]
    fn boundary_current_examples() {
        let s = t_only();
        let f = s.parse("1/2*d(u;t)^2").unwrap();
        let a = boundary_current(&s, &f, &field(&s, "1")).unwrap();
        assert_eq!(a.0, vec![s.parse("d(u;t)").unwrap()]);

        let f = s.parse("t*u^3").unwrap();
        let a = boundary_current(&s, &f, &field(&s, "d(u;t)*u")).unwrap();
        assert!(a.is_zero());

        let f = s.parse("1/2*d(u;t)^2 - 1/2*u^2").unwrap();
        let z = field(&s, "-d(u;t)");
        let a = boundary_current(&s, &f, &z).unwrap();
        assert_eq!(a.0, vec![s.parse("-d(u;t)^2").unwrap()]);
        let psi = euler_lagrange(&s, &f).unwrap();
        let lhs = prolong_apply(&s, &z, &f).unwrap();
        assert!((lhs - psi.pair(&z) - divergence(&s, &a).unwrap()).is_zero());
    }

    #[test]
    fn linearize_examples() {
        let s = JetSpace::new(&["t", "x"], &["u"], 1).unwrap();
        let op = linearize(&s, &[s.parse("d(u;t) - u*d(u;x)").unwrap()]);
        let t = MultiIndex::unit(2, 0);
        let x = MultiIndex::unit(2, 1);
        let zero = MultiIndex::zero(2);
        assert_eq!(op.coefficient(0, 0, &t), Expr::one());
        assert_eq!(op.coefficient(0, 0, &x), s.parse("-u").unwrap());
        assert_eq!(op.coefficient(0, 0, &zero), s.parse("-d(u;x)").unwrap());

        let op = linearize(&s, &[s.parse("u").unwrap()]);
        assert_eq!(op, LinearDiffOp::identity(1, 2));

        let op = linearize(&s, &[s.parse("d(u;t,t) + u").unwrap()]);
        let mut expect = LinearDiffOp::identity(1, 2);
        expect.set(0, 0, MultiIndex::from_counts(vec![2, 0]), Expr::one());
        assert_eq!(op, expect);
        assert_eq!(op.order(), 2);
    }

    #[test]
    fn adjoint_examples() {
        let s = JetSpace::new(&["x"], &["u"], 1).unwrap();
        let x = MultiIndex::unit(1, 0);
        let zero = MultiIndex::zero(1);
        let mut dx = LinearDiffOp::zero(1, 1);
        dx.set(0, 0, x.clone(), Expr::one());
        let mut neg = LinearDiffOp::zero(1, 1);
        neg.set(0, 0, x.clone(), -Expr::one());
        assert_eq!(formal_adjoint(&s, &dx).unwrap(), neg);

        let mut mult = LinearDiffOp::zero(1, 1);
        mult.set(0, 0, zero.clone(), s.parse("x*u^2 + 3").unwrap());
        assert_eq!(formal_adjoint(&s, &mult).unwrap(), mult);

        let mut op = LinearDiffOp::zero(1, 1);
        op.set(0, 0, x.clone(), s.parse("u").unwrap());
        op.set(0, 0, zero.clone(), Expr::one());
        let adj = formal_adjoint(&s, &op).unwrap();
        assert_eq!(adj.coefficient(0, 0, &x), s.parse("-u").unwrap());
        assert_eq!(adj.coefficient(0, 0, &zero), s.parse("1 - d(u;x)").unwrap());
    }

    #[test]
    fn adjoint_boundary_certifies_defining_relation() {
        let s = JetSpace::new(&["t", "x"], &["u", "w", "p"], 1).unwrap();
        let mut op = LinearDiffOp::zero(1, 1);
        op.set(
            0,
            0,
            MultiIndex::from_counts(vec![1, 1]),
            s.parse("u*t").unwrap(),
        );
        op.set(
            0,
            0,
            MultiIndex::from_counts(vec![0, 1]),
            s.parse("d(u;x)").unwrap(),
        );
        let w = [Expr::var(s.field(1))];
        let p = [Expr::var(s.field(2))];
        let (h, gamma) = adjoint_boundary(&s, &op, &w, &p).unwrap();
        let adj = formal_adjoint(&s, &op).unwrap();
        assert_eq!(h, adj.apply(&s, &w).unwrap());
        let lhs = &w[0] * &op.apply(&s, &p).unwrap()[0];
        let rhs = &h[0] * &p[0] + divergence(&s, &gamma).unwrap();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn self_adjointness_examples() {
        let s = t_only();
        let psi = euler_lagrange(&s, &s.parse("1/2*d(u;t)^2 - 1/2*u^2").unwrap()).unwrap();
        let op = linearize(&s, &psi.0);
        assert!(is_self_adjoint(&s, &op).unwrap().holds);

        let s = JetSpace::new(&["t", "x"], &["u"], 1).unwrap();
        let op = linearize(&s, &[s.parse("d(u;t) - u*d(u;x)").unwrap()]);
        let verdict = is_self_adjoint(&s, &op).unwrap();
        assert!(!verdict.holds);
        let w = verdict.witness.unwrap();
        assert_eq!(w.index, MultiIndex::unit(2, 0));
        assert_eq!((w.operator, w.adjoint), (Expr::one(), -Expr::one()));

        assert!(
            is_self_adjoint(&s, &LinearDiffOp::zero(1, 1))
                .unwrap()
                .holds
        );
    }

    #[test]
    fn inverts_total_divergences() {
        let s = JetSpace::new(&["t", "x"], &["u"], 1).unwrap();
        let g = s.parse("d(u;t) - d(u;x,x)").unwrap();
        let p = invert_divergence(&s, &g).unwrap().unwrap();
        assert_eq!(
            p.0,
            vec![s.parse("u").unwrap(), s.parse("-d(u;x)").unwrap()]
        );

        let g = s.parse("d(u;t) - u*d(u;x)").unwrap();
        let p = invert_divergence(&s, &g).unwrap().unwrap();
        assert_eq!(
            p.0,
            vec![s.parse("u").unwrap(), s.parse("-1/2*u^2").unwrap()]
        );

        let g = s.parse("3*t^2*x + 1 + t*d(u;x)").unwrap();
        let p = invert_divergence(&s, &g).unwrap().unwrap();
        assert_eq!(divergence(&s, &p).unwrap(), g);

        assert_eq!(
            invert_divergence(&s, &s.parse("u*d(u;t,t)^2").unwrap()).unwrap(),
            None
        );
    }
}
