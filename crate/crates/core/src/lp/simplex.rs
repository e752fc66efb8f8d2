//! Dense two-phase tableau simplex with Bland's anti-cycling rule.
//!
//! Solves `max c.x` subject to sparse rows `a.x {<=,>=,=} b` and `0 <= x`.
//! Upper bounds are ordinary `<=` rows supplied by the caller.

use crate::error::{Error, Result};

/// Pivot and reduced-cost tolerance.
const EPS: f64 = 1e-10;
/// Phase-one objective above this means the rows admit no solution.
const FEASIBILITY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Le,
    Ge,
    Eq,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

struct Tableau {
    width: usize,
    rows: usize,
    /// `rows` constraint rows followed by one objective row; last column is the rhs.
    cells: Vec<f64>,
    basis: Vec<usize>,
    pivots: usize,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.cells[r * self.width + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.width - 1)
    }

    fn pivot(&mut self, pr: usize, pc: usize) {
        let w = self.width;
        let p = self.at(pr, pc);
        for c in 0..w {
            self.cells[pr * w + c] /= p;
        }
        let (before, rest) = self.cells.split_at_mut(pr * w);
        let (prow, after) = rest.split_at_mut(w);
        for row in before.chunks_mut(w).chain(after.chunks_mut(w)) {
            let f = row[pc];
            if f != 0.0 {
                for (cell, &pv) in row.iter_mut().zip(prow.iter()) {
                    *cell -= f * pv;
                }
                row[pc] = 0.0;
            }
        }
        self.basis[pr] = pc;
        self.pivots += 1;
    }

    /// Minimizes the objective row over columns `< allowed`. Returns false
    /// when some entering column has no bounding row.
    fn run(&mut self, allowed: usize, max_pivots: usize) -> Result<bool> {
        let obj = self.rows;
        loop {
            let entering = (0..allowed).find(|&c| self.at(obj, c) < -EPS);
            let Some(pc) = entering else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.rows {
                let a = self.at(r, pc);
                if a > EPS {
                    let ratio = self.rhs(r) / a;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((br, bratio)) => {
                            if ratio < bratio - EPS
                                || (ratio <= bratio + EPS && self.basis[r] < self.basis[br])
                            {
                                Some((r, ratio))
                            } else {
                                Some((br, bratio))
                            }
                        }
                    };
                }
            }
            let Some((pr, _)) = leave else {
                return Ok(false);
            };
            if self.pivots >= max_pivots {
                return Err(Error::Domain(format!(
                    "simplex exceeded {max_pivots} pivots"
                )));
            }
            self.pivot(pr, pc);
        }
    }
}

/// Maximizes `objective . x` subject to `constraints` and `x >= 0`.
pub fn maximize(
    num_vars: usize,
    objective: &[f64],
    constraints: &[Constraint],
) -> Result<Solution> {
    assert_eq!(objective.len(), num_vars);

    // Normalize every row to a nonnegative right-hand side.
    let mut rows: Vec<Constraint> = constraints
        .iter()
        .map(|c| {
            let flip = c.rhs < 0.0 || (c.rhs == 0.0 && c.sense == Sense::Ge);
            if flip {
                let sense = match c.sense {
                    Sense::Le => Sense::Ge,
                    Sense::Ge => Sense::Le,
                    Sense::Eq => Sense::Eq,
                };
                let coeffs = c.coeffs.iter().map(|&(j, a)| (j, -a)).collect();
                Constraint {
                    coeffs,
                    sense,
                    rhs: -c.rhs,
                }
            } else {
                c.clone()
            }
        })
        .collect();

    let m = rows.len();
    let slack_count = rows.iter().filter(|r| r.sense != Sense::Eq).count();
    let art_count = rows.iter().filter(|r| r.sense != Sense::Le).count();
    let first_art = num_vars + slack_count;
    let width = first_art + art_count + 1;

    let mut t = Tableau {
        width,
        rows: m,
        cells: vec![0.0; (m + 1) * width],
        basis: vec![0; m],
        pivots: 0,
    };
    let mut slack = num_vars;
    let mut art = first_art;
    for (r, Constraint { coeffs, sense, rhs }) in rows.drain(..).enumerate() {
        for (j, a) in coeffs {
            assert!(j < num_vars, "column {j} out of range");
            t.cells[r * width + j] += a;
        }
        t.cells[r * width + width - 1] = rhs;
        match sense {
            Sense::Le => {
                t.cells[r * width + slack] = 1.0;
                t.basis[r] = slack;
                slack += 1;
            }
            Sense::Ge => {
                t.cells[r * width + slack] = -1.0;
                slack += 1;
                t.cells[r * width + art] = 1.0;
                t.basis[r] = art;
                art += 1;
            }
            Sense::Eq => {
                t.cells[r * width + art] = 1.0;
                t.basis[r] = art;
                art += 1;
            }
        }
    }

    let max_pivots = 50 * (m + width) + 10_000;

    // Phase one: minimize the sum of artificials.
    if art_count > 0 {
        for r in 0..m {
            if t.basis[r] >= first_art {
                for c in 0..width {
                    if c < first_art || c == width - 1 {
                        t.cells[m * width + c] -= t.at(r, c);
                    }
                }
            }
        }
        if !t.run(width - 1, max_pivots)? {
            return Err(Error::Unbounded);
        }
        if -t.rhs(m) > FEASIBILITY_TOL {
            return Err(Error::Infeasible);
        }
        // Pivot leftover zero-level artificials out where a structural
        // column allows; rows without one are redundant and stay inert.
        for r in 0..m {
            if t.basis[r] >= first_art {
                if let Some(c) = (0..first_art).find(|&c| t.at(r, c).abs() > 1e-7) {
                    t.pivot(r, c);
                }
            }
        }
    }

    // Phase two on the original objective, artificials barred from entering.
    for c in 0..width {
        t.cells[m * width + c] = 0.0;
    }
    for (j, &cj) in objective.iter().enumerate() {
        t.cells[m * width + j] = -cj;
    }
    for r in 0..m {
        let b = t.basis[r];
        let f = t.at(m, b);
        if f != 0.0 {
            for c in 0..width {
                t.cells[m * width + c] -= f * t.at(r, c);
            }
        }
    }
    if !t.run(first_art, max_pivots)? {
        return Err(Error::Unbounded);
    }

    let mut x = vec![0.0; num_vars];
    for r in 0..m {
        if t.basis[r] < num_vars {
            x[t.basis[r]] = t.rhs(r);
        }
    }
    let objective_value = objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(Solution {
        x,
        objective: objective_value,
        pivots: t.pivots,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn row(coeffs: &[f64], sense: Sense, rhs: f64) -> Constraint {
        Constraint {
            coeffs: coeffs.iter().copied().enumerate().collect(),
            sense,
            rhs,
        }
    }

    /// Brute-force vertex enumeration: every choice of `n` tight constraints
    /// (rows or `x_j = 0`) solved by Gaussian elimination.
    fn vertex_oracle(n: usize, c: &[f64], rows: &[Constraint]) -> Option<f64> {
        let mut planes: Vec<(Vec<f64>, f64)> = rows
            .iter()
            .map(|r| {
                let mut a = vec![0.0; n];
                for &(j, v) in &r.coeffs {
                    a[j] += v;
                }
                (a, r.rhs)
            })
            .collect();
        for j in 0..n {
            let mut a = vec![0.0; n];
            a[j] = 1.0;
            planes.push((a, 0.0));
        }
        let feasible = |x: &[f64]| {
            x.iter().all(|&v| v >= -1e-7)
                && rows.iter().all(|r| {
                    let lhs: f64 = r.coeffs.iter().map(|&(j, a)| a * x[j]).sum();
                    match r.sense {
                        Sense::Le => lhs <= r.rhs + 1e-7,
                        Sense::Ge => lhs >= r.rhs - 1e-7,
                        Sense::Eq => (lhs - r.rhs).abs() <= 1e-7,
                    }
                })
        };
        let mut best: Option<f64> = None;
        let k = planes.len();
        let mut idx: Vec<usize> = (0..n).collect();
        loop {
            let mut m: Vec<Vec<f64>> = idx
                .iter()
                .map(|&i| {
                    let mut r = planes[i].0.clone();
                    r.push(planes[i].1);
                    r
                })
                .collect();
            let mut singular = false;
            for col in 0..n {
                let p = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()));
                let p = p.unwrap();
                if m[p][col].abs() < 1e-12 {
                    singular = true;
                    break;
                }
                m.swap(col, p);
                for r in 0..n {
                    if r != col {
                        let f = m[r][col] / m[col][col];
                        let pivot = m[col].clone();
                        for (cell, p) in m[r].iter_mut().zip(&pivot).skip(col) {
                            *cell -= f * p;
                        }
                    }
                }
            }
            if !singular {
                let x: Vec<f64> = (0..n).map(|i| m[i][n] / m[i][i]).collect();
                if feasible(&x) {
                    let v: f64 = c.iter().zip(&x).map(|(a, b)| a * b).sum();
                    best = Some(best.map_or(v, |b: f64| b.max(v)));
                }
            }
            // next combination
            let mut i = n;
            loop {
                if i == 0 {
                    return best;
                }
                i -= 1;
                if idx[i] < k - n + i {
                    idx[i] += 1;
                    for j in i + 1..n {
                        idx[j] = idx[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    #[test]
    fn textbook_problem() {
        // max 3x + 5y, x <= 4, 2y <= 12, 3x + 2y <= 18 -> (2, 6), 36
        let rows = vec![
            row(&[1.0, 0.0], Sense::Le, 4.0),
            row(&[0.0, 2.0], Sense::Le, 12.0),
            row(&[3.0, 2.0], Sense::Le, 18.0),
        ];
        let s = maximize(2, &[3.0, 5.0], &rows).unwrap();
        assert!((s.objective - 36.0).abs() < 1e-9);
        assert!((s.x[0] - 2.0).abs() < 1e-9 && (s.x[1] - 6.0).abs() < 1e-9);
    }

    #[test]
    fn ge_and_eq_rows() {
        // max -x - y, x + y >= 2, x - y = 0 -> x = y = 1
        let rows = vec![
            row(&[1.0, 1.0], Sense::Ge, 2.0),
            row(&[1.0, -1.0], Sense::Eq, 0.0),
        ];
        let s = maximize(2, &[-1.0, -1.0], &rows).unwrap();
        assert!((s.objective + 2.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_and_unbounded() {
        let rows = vec![row(&[1.0], Sense::Le, 1.0), row(&[1.0], Sense::Ge, 2.0)];
        assert!(matches!(maximize(1, &[1.0], &rows), Err(Error::Infeasible)));
        let rows = vec![row(&[1.0, -1.0], Sense::Le, 1.0)];
        assert!(matches!(
            maximize(2, &[1.0, 0.0], &rows),
            Err(Error::Unbounded)
        ));
    }

    #[test]
    fn degenerate_problem_terminates() {
        // Beale's cycling example under the largest-coefficient rule.
        let rows = vec![
            row(&[0.25, -8.0, -1.0, 9.0], Sense::Le, 0.0),
            row(&[0.5, -12.0, -0.5, 3.0], Sense::Le, 0.0),
            row(&[0.0, 0.0, 1.0, 0.0], Sense::Le, 1.0),
        ];
        let s = maximize(4, &[0.75, -20.0, 0.5, -6.0], &rows).unwrap();
        assert!((s.objective - 1.25).abs() < 1e-9);
    }

    #[test]
    fn redundant_equalities() {
        let rows = vec![
            row(&[1.0, 1.0], Sense::Eq, 1.0),
            row(&[2.0, 2.0], Sense::Eq, 2.0),
            row(&[1.0, 0.0], Sense::Le, 0.75),
        ];
        let s = maximize(2, &[2.0, 1.0], &rows).unwrap();
        assert!((s.objective - 1.75).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn matches_vertex_enumeration(
            n in 1usize..4,
            data in proptest::collection::vec((-3i32..4, -3i32..4, -3i32..4, 0i32..3, -2i32..6), 1..5),
            obj in proptest::collection::vec(-3i32..4, 3),
        ) {
            let mut rows: Vec<Constraint> = data.iter().map(|&(a, b, c, s, r)| {
                let coeffs = [a, b, c][..n].iter().map(|&v| v as f64).enumerate().collect();
                let sense = match s { 0 => Sense::Le, 1 => Sense::Ge, _ => Sense::Eq };
                Constraint { coeffs, sense, rhs: r as f64 }
            }).collect();
            // box keeps every instance bounded
            for j in 0..n {
                rows.push(Constraint { coeffs: vec![(j, 1.0)], sense: Sense::Le, rhs: 1.0 });
            }
            let c: Vec<f64> = obj[..n].iter().map(|&v| v as f64).collect();
            let expected = vertex_oracle(n, &c, &rows);
            match maximize(n, &c, &rows) {
                Ok(s) => {
                    let e = expected.expect("oracle found no vertex but simplex did");
                    prop_assert!((s.objective - e).abs() < 1e-7, "simplex {} oracle {}", s.objective, e);
                }
                Err(Error::Infeasible) => prop_assert!(expected.is_none()),
                Err(e) => prop_assert!(false, "unexpected error {e}"),
            }
        }
    }
}
