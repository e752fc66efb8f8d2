//! LP relaxation of the slot-assignment integer program.
//!
//! Variables `x[link][slot]` in `[0, 1]`; rows are the coverage, reception,
//! transmission, half-duplex and big-M SINR constraints.

mod simplex;

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{domain, Result};
use crate::radio::NetworkInstance;

pub use simplex::{maximize, Constraint, Sense, Solution};

/// Feasibility tolerance on returned solutions.
pub const EPS_LP: f64 = 1e-9;
/// Relative tolerance on objective comparisons.
pub const EPS_OBJ: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RowKind {
    Coverage { link: usize },
    Reception { slot: usize, node: usize },
    Transmission { slot: usize, node: usize },
    HalfDuplex { slot: usize, node: usize },
    Sinr { slot: usize, link: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub kind: RowKind,
    pub constraint: Constraint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpModel {
    num_links: usize,
    /// Slots carried as variables; 1 for the symmetric model.
    slots: usize,
    frame_length: usize,
    pub objective: Vec<f64>,
    pub rows: Vec<Row>,
    /// Per-link big-M constant of the SINR rows, in power units.
    pub big_m: Vec<f64>,
}

impl LpModel {
    pub fn num_vars(&self) -> usize {
        self.num_links * self.slots
    }

    pub fn num_links(&self) -> usize {
        self.num_links
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn frame_length(&self) -> usize {
        self.frame_length
    }

    pub fn column(&self, link: usize, slot: usize) -> usize {
        link * self.slots + slot
    }

    pub fn count_rows(&self, pred: impl Fn(&RowKind) -> bool) -> usize {
        self.rows.iter().filter(|r| pred(&r.kind)).count()
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.objective.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Largest violation over all rows and the `[0, 1]` box.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for &v in x {
            worst = worst.max(-v).max(v - 1.0);
        }
        for row in &self.rows {
            let c = &row.constraint;
            let lhs: f64 = c.coeffs.iter().map(|&(j, a)| a * x[j]).sum();
            let gap = match c.sense {
                Sense::Le => lhs - c.rhs,
                Sense::Ge => c.rhs - lhs,
                Sense::Eq => (lhs - c.rhs).abs(),
            };
            worst = worst.max(gap);
        }
        worst
    }

    /// Human-readable dump, one row per line:
    /// `<kind> <coef>*x<link>_<slot> ... <sense> <rhs>`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "max");
        for (j, c) in self.objective.iter().enumerate() {
            let _ = write!(out, " {c:+}*x{}_{}", j / self.slots, j % self.slots);
        }
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "{:?}:", row.kind);
            for &(j, a) in &row.constraint.coeffs {
                let _ = write!(out, " {a:+}*x{}_{}", j / self.slots, j % self.slots);
            }
            let sense = match row.constraint.sense {
                Sense::Le => "<=",
                Sense::Ge => ">=",
                Sense::Eq => "=",
            };
            let _ = writeln!(out, " {sense} {}", row.constraint.rhs);
        }
        out
    }
}

/// Builds the full relaxation with one variable per (link, slot).
pub fn build_lp(instance: &NetworkInstance, frame_length: usize) -> Result<LpModel> {
    if frame_length == 0 {
        return Err(domain("frame length must be >= 1"));
    }
    Ok(build(instance, frame_length, frame_length))
}

/// Builds the single-slot form of the relaxation.
///
/// All slots carry identical constraints and only coverage couples them, so
/// averaging any feasible point over slot permutations stays feasible and
/// keeps the objective. The relaxation therefore has an optimum that is the
/// same in every slot: one slot of variables, coverage `y >= 1/T`, and
/// objective `sum b * y`.
pub fn build_symmetric_lp(instance: &NetworkInstance, frame_length: usize) -> Result<LpModel> {
    if frame_length == 0 {
        return Err(domain("frame length must be >= 1"));
    }
    Ok(build(instance, 1, frame_length))
}

fn build(instance: &NetworkInstance, slots: usize, frame_length: usize) -> LpModel {
    let links = instance.links();
    let radio = instance.radio();
    let n = links.len();
    let col = |l: usize, t: usize| l * slots + t;
    let per_var = 1.0 / slots as f64;

    let objective = (0..n * slots)
        .map(|j| links[j / slots].rate * per_var)
        .collect();

    let mut senders: Vec<usize> = links.iter().map(|l| l.sender).collect();
    senders.sort_unstable();
    senders.dedup();
    let mut receivers: Vec<usize> = links.iter().map(|l| l.receiver).collect();
    receivers.sort_unstable();
    receivers.dedup();
    let dual: Vec<usize> = senders
        .iter()
        .copied()
        .filter(|v| receivers.binary_search(v).is_ok())
        .collect();

    // Interference power of every sender at every receiver. Senders that sit
    // on the receiver are excluded; the half-duplex rows already forbid them.
    let interference = |k: usize, l: usize| -> Option<f64> {
        let sk = links[k].sender;
        let rl = links[l].receiver;
        (sk != rl).then(|| instance.rx_power(sk, rl))
    };
    let big_m: Vec<f64> = (0..n)
        .map(|l| {
            let sum: f64 = (0..n)
                .filter(|&k| k != l)
                .filter_map(|k| interference(k, l))
                .sum();
            radio.beta * (radio.noise + sum)
        })
        .collect();

    let mut rows = Vec::new();
    let coverage_rhs = slots as f64 / frame_length as f64;
    for l in 0..n {
        rows.push(Row {
            kind: RowKind::Coverage { link: l },
            constraint: Constraint {
                coeffs: (0..slots).map(|t| (col(l, t), 1.0)).collect(),
                sense: Sense::Ge,
                rhs: coverage_rhs,
            },
        });
    }
    let at_most_one = |coeffs: Vec<(usize, f64)>| Constraint {
        coeffs,
        sense: Sense::Le,
        rhs: 1.0,
    };
    for t in 0..slots {
        for &v in &receivers {
            let coeffs = (0..n)
                .filter(|&l| links[l].receiver == v)
                .map(|l| (col(l, t), 1.0))
                .collect();
            rows.push(Row {
                kind: RowKind::Reception { slot: t, node: v },
                constraint: at_most_one(coeffs),
            });
        }
        for &v in &senders {
            let coeffs = (0..n)
                .filter(|&l| links[l].sender == v)
                .map(|l| (col(l, t), 1.0))
                .collect();
            rows.push(Row {
                kind: RowKind::Transmission { slot: t, node: v },
                constraint: at_most_one(coeffs),
            });
        }
        for &v in &dual {
            let coeffs = (0..n)
                .filter(|&l| links[l].sender == v || links[l].receiver == v)
                .map(|l| (col(l, t), 1.0))
                .collect();
            rows.push(Row {
                kind: RowKind::HalfDuplex { slot: t, node: v },
                constraint: at_most_one(coeffs),
            });
        }
        // S*x_l + M*(1 - x_l) >= beta*(N + sum I_kl x_k), rearranged and
        // scaled so the largest magnitude in the row is 1.
        for l in 0..n {
            let signal = instance.rx_power(links[l].sender, links[l].receiver);
            let mut coeffs = vec![(col(l, t), signal - big_m[l])];
            for k in (0..n).filter(|&k| k != l) {
                if let Some(i) = interference(k, l) {
                    coeffs.push((col(k, t), -radio.beta * i));
                }
            }
            let rhs = radio.beta * radio.noise - big_m[l];
            let scale = coeffs.iter().map(|c| c.1.abs()).fold(rhs.abs(), f64::max);
            let scale = if scale > 0.0 { scale } else { 1.0 };
            for c in &mut coeffs {
                c.1 /= scale;
            }
            rows.push(Row {
                kind: RowKind::Sinr { slot: t, link: l },
                constraint: Constraint {
                    coeffs,
                    sense: Sense::Ge,
                    rhs: rhs / scale,
                },
            });
        }
    }

    LpModel {
        num_links: n,
        slots,
        frame_length,
        objective,
        rows,
        big_m,
    }
}

/// LP values per (link, slot) over the whole frame, plus the objective.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FractionalSolution {
    num_links: usize,
    frame_length: usize,
    values: Vec<f64>,
    /// Objective value of the relaxation.
    pub objective: f64,
}

impl FractionalSolution {
    /// Takes link-major values; they are clamped into `[0, 1]`.
    pub fn new(num_links: usize, frame_length: usize, values: Vec<f64>, objective: f64) -> Self {
        assert_eq!(values.len(), num_links * frame_length);
        let values = values.into_iter().map(|v| v.clamp(0.0, 1.0)).collect();
        FractionalSolution {
            num_links,
            frame_length,
            values,
            objective,
        }
    }

    pub fn num_links(&self) -> usize {
        self.num_links
    }

    pub fn frame_length(&self) -> usize {
        self.frame_length
    }

    pub fn value(&self, link: usize, slot: usize) -> f64 {
        self.values[link * self.frame_length + slot]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

fn run_simplex(model: &LpModel) -> Result<Solution> {
    let mut constraints: Vec<Constraint> =
        model.rows.iter().map(|r| r.constraint.clone()).collect();
    for j in 0..model.num_vars() {
        constraints.push(Constraint {
            coeffs: vec![(j, 1.0)],
            sense: Sense::Le,
            rhs: 1.0,
        });
    }
    let sol = maximize(model.num_vars(), &model.objective, &constraints)?;
    let violation = model.max_violation(&sol.x);
    if violation > 1e3 * EPS_LP {
        return Err(domain(format!(
            "simplex returned a point violating the model by {violation:e}"
        )));
    }
    Ok(sol)
}

/// Solves a model to optimality. Values are clamped into `[0, 1]`.
pub fn solve_lp(model: &LpModel) -> Result<FractionalSolution> {
    let sol = run_simplex(model)?;
    let (n, slots, frame) = (model.num_links, model.slots, model.frame_length);
    let values = if slots == frame {
        sol.x
    } else {
        // Symmetric model: replicate its single slot across the frame.
        (0..n * frame).map(|j| sol.x[(j / frame) * slots]).collect()
    };
    let solution = FractionalSolution::new(n, frame, values, sol.objective);
    Ok(solution)
}

/// Optimal relaxation of `instance` over `frame_length` slots, computed
/// through the single-slot form.
pub fn solve_relaxation(
    instance: &NetworkInstance,
    frame_length: usize,
) -> Result<FractionalSolution> {
    solve_lp(&build_symmetric_lp(instance, frame_length)?)
}
