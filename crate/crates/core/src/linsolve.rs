use std::collections::BTreeMap;

use num_traits::Zero;

use crate::expr::{Expr, Monomial, Rational};

/// Exact solution of `Σ c_k columns[k] = target` by coefficient matching,
/// with free unknowns set to zero. `None` when inconsistent.
pub(crate) fn solve(columns: &[Expr], target: &Expr) -> Option<Vec<Rational>> {
    let mut rows: BTreeMap<&Monomial, usize> = BTreeMap::new();
    for e in columns.iter().chain(std::iter::once(target)) {
        for (m, _) in e.terms() {
            let next = rows.len();
            rows.entry(m).or_insert(next);
        }
    }
    let width = columns.len() + 1;
    let mut matrix = vec![vec![Rational::zero(); width]; rows.len()];
    for (k, e) in columns.iter().enumerate() {
        for (m, c) in e.terms() {
            matrix[rows[m]][k] = c.clone();
        }
    }
    for (m, c) in target.terms() {
        matrix[rows[m]][columns.len()] = c.clone();
    }

    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..columns.len() {
        let Some(p) = (row..matrix.len()).find(|&r| !matrix[r][col].is_zero()) else {
            continue;
        };
        matrix.swap(row, p);
        let inv = matrix[row][col].recip();
        for entry in matrix[row].iter_mut() {
            *entry *= &inv;
        }
        let pivot_row = matrix[row].clone();
        for (r, line) in matrix.iter_mut().enumerate() {
            if r == row || line[col].is_zero() {
                continue;
            }
            let factor = line[col].clone();
            for (entry, p) in line.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *entry -= &factor * p;
                }
            }
        }
        pivots.push(col);
        row += 1;
        if row == matrix.len() {
            break;
        }
    }
    if matrix[row..]
        .iter()
        .any(|line| !line[columns.len()].is_zero())
    {
        return None;
    }
    let mut solution = vec![Rational::zero(); columns.len()];
    for (r, &col) in pivots.iter().enumerate() {
        solution[col] = matrix[r][columns.len()].clone();
    }
    Some(solution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{int, JetSpace};

    #[test]
    fn solves_and_detects_inconsistency() {
        let s = JetSpace::new(&["t"], &["u"], 1).unwrap();
        let cols = [
            s.parse("u + t").unwrap(),
            s.parse("u - t").unwrap(),
            s.parse("2*u").unwrap(),
        ];
        let target = s.parse("3*u + t").unwrap();
        let c = solve(&cols, &target).unwrap();
        let combo: Expr = cols.iter().zip(&c).map(|(e, k)| e.scale(k)).sum();
        assert_eq!(combo, target);
        assert_eq!(solve(&cols, &s.parse("u^2").unwrap()), None);
        assert_eq!(solve(&[], &Expr::zero()), Some(vec![]));
        assert_eq!(solve(&cols[..1], &Expr::integer(0)).unwrap(), vec![int(0)]);
    }
}
