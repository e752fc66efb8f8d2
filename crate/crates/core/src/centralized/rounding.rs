use std::cmp::Ordering;
use std::collections::{BTreeSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::admission::{admits, node_conflict, sinr_feasible};
use crate::error::Result;
use crate::feasibility::Schedule;
use crate::lp::{solve_relaxation, FractionalSolution};
use crate::radio::NetworkInstance;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoundingOutcome {
    /// Final schedule; satisfies the reception, transmission, half-duplex
    /// and SINR constraints.
    pub schedule: Schedule,
    /// Raw Bernoulli draws before any repair.
    pub rounded: Schedule,
    /// LP relaxation objective.
    pub a_hat: f64,
    /// Throughput of `rounded`.
    pub a_rand: f64,
    /// Throughput change from repair and coverage fix.
    pub delta_a: f64,
    /// Links the coverage fix could not place anywhere.
    pub uncovered: Vec<usize>,
    pub seed: u64,
}

impl RoundingOutcome {
    pub fn throughput(&self) -> f64 {
        self.a_rand + self.delta_a
    }

    pub fn delta_ratio(&self) -> f64 {
        self.delta_a / self.a_hat
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageFix {
    pub schedule: Schedule,
    pub uncovered: Vec<usize>,
    /// `(link, slot)` placements made by the fix; never evicted afterwards.
    pub forced: Vec<(usize, usize)>,
}

fn raw_throughput(instance: &NetworkInstance, schedule: &Schedule) -> f64 {
    let total: f64 = schedule
        .slots()
        .iter()
        .flatten()
        .map(|&l| instance.links()[l].rate)
        .sum();
    total / schedule.frame_length() as f64
}

/// Higher LP value first, then lower link id.
fn by_priority(
    fractional: &FractionalSolution,
    slot: usize,
) -> impl Fn(&usize, &usize) -> Ordering + '_ {
    move |&a, &b| {
        fractional
            .value(b, slot)
            .total_cmp(&fractional.value(a, slot))
            .then(a.cmp(&b))
    }
}

/// Sets each `x[link][slot]` to 1 with probability equal to its LP value.
///
/// Every variable draws from its own ChaCha8 stream (stream number
/// `link * T + slot` under the master `seed`), so a draw never depends on
/// how many other variables exist or in which order they are visited.
pub fn randomized_round(fractional: &FractionalSolution, seed: u64) -> Schedule {
    let frame = fractional.frame_length();
    let mut slots = vec![BTreeSet::new(); frame];
    for link in 0..fractional.num_links() {
        for (t, slot) in slots.iter_mut().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream((link * frame + t) as u64);
            if rng.gen::<f64>() < fractional.value(link, t) {
                slot.insert(link);
            }
        }
    }
    Schedule::from_slots(slots).expect("frame length is positive")
}

/// Per slot, keeps links in priority order: first dropping any link that
/// shares a node with an already kept one, then admitting the survivors one
/// by one while the whole kept set still meets the SINR threshold.
pub fn repair(
    instance: &NetworkInstance,
    fractional: &FractionalSolution,
    raw: &Schedule,
) -> Schedule {
    let mut slots = Vec::with_capacity(raw.frame_length());
    for (t, drawn) in raw.slots().iter().enumerate() {
        let mut order: Vec<usize> = drawn.iter().copied().collect();
        order.sort_by(by_priority(fractional, t));

        let mut node_ok: Vec<usize> = Vec::with_capacity(order.len());
        for &l in &order {
            if !node_ok.iter().any(|&k| node_conflict(instance, k, l)) {
                node_ok.push(l);
            }
        }
        let mut kept: Vec<usize> = Vec::with_capacity(node_ok.len());
        for &l in &node_ok {
            kept.push(l);
            if !sinr_feasible(instance, &kept) {
                kept.pop();
            }
        }
        slots.push(kept.into_iter().collect());
    }
    Schedule::from_slots(slots).expect("frame length is positive")
}

/// Gives every link that ended up unscheduled a slot.
///
/// Candidate slots are tried in decreasing LP value of the link. A slot
/// accepts the link if it fits outright, or after evicting links that were
/// not forced and have a strictly smaller LP value there (node conflicts
/// first, then lowest value first until the SINR holds). If no slot accepts
/// it that way, a second pass may also evict non-forced links that stay
/// scheduled in another slot. Evicted links are
/// re-admitted where they still fit; any that lose their last slot are
/// queued in turn. Each link is processed at most once.
pub fn coverage_fix(
    instance: &NetworkInstance,
    fractional: &FractionalSolution,
    repaired: &Schedule,
) -> CoverageFix {
    let frame = repaired.frame_length();
    let n = instance.num_links();
    let mut slots: Vec<Vec<usize>> = repaired
        .slots()
        .iter()
        .map(|s| s.iter().copied().collect())
        .collect();
    let mut forced: BTreeSet<(usize, usize)> = BTreeSet::new();
    let mut count = vec![0usize; n];
    for slot in &slots {
        for &l in slot {
            count[l] += 1;
        }
    }
    let mut queue: VecDeque<usize> = (0..n).filter(|&l| count[l] == 0).collect();
    let mut processed = vec![false; n];
    let mut uncovered = Vec::new();

    while let Some(link) = queue.pop_front() {
        if processed[link] || count[link] > 0 {
            continue;
        }
        processed[link] = true;
        let mut order: Vec<usize> = (0..frame).collect();
        order.sort_by(|&a, &b| {
            fractional
                .value(link, b)
                .total_cmp(&fractional.value(link, a))
                .then(a.cmp(&b))
        });

        let mut placed = false;
        'search: for relaxed in [false, true] {
            for &t in &order {
                let p = fractional.value(link, t);
                let evictable = |k: usize| {
                    !forced.contains(&(k, t))
                        && (fractional.value(k, t) < p || (relaxed && count[k] > 1))
                };

                let (conflicting, mut rest): (Vec<usize>, Vec<usize>) = slots[t]
                    .iter()
                    .partition(|&&k| node_conflict(instance, k, link));
                if !conflicting.iter().all(|&k| evictable(k)) {
                    continue;
                }
                let mut evicted = conflicting;
                loop {
                    let mut with = rest.clone();
                    with.push(link);
                    if sinr_feasible(instance, &with) {
                        break;
                    }
                    let victim = rest
                        .iter()
                        .copied()
                        .filter(|&k| evictable(k))
                        .min_by(|&a, &b| {
                            fractional
                                .value(a, t)
                                .total_cmp(&fractional.value(b, t))
                                .then(b.cmp(&a))
                        });
                    match victim {
                        Some(v) => {
                            rest.retain(|&k| k != v);
                            evicted.push(v);
                        }
                        None => break,
                    }
                }
                let mut with = rest.clone();
                with.push(link);
                if !sinr_feasible(instance, &with) {
                    continue;
                }

                // Commit, then let evicted links back in where they still fit.
                evicted.sort_by(by_priority(fractional, t));
                let mut members = with;
                let mut dropped = Vec::new();
                for k in evicted {
                    if admits(instance, &members, k) {
                        members.push(k);
                    } else {
                        dropped.push(k);
                    }
                }
                slots[t] = members;
                forced.insert((link, t));
                count[link] += 1;
                for k in dropped {
                    count[k] -= 1;
                    if count[k] == 0 {
                        queue.push_back(k);
                    }
                }
                placed = true;
                break 'search;
            }
        }
        if !placed {
            uncovered.push(link);
        }
    }
    uncovered.sort_unstable();

    let schedule =
        Schedule::from_slots(slots.into_iter().map(|s| s.into_iter().collect()).collect())
            .expect("frame length is positive");
    CoverageFix {
        schedule,
        uncovered,
        forced: forced.into_iter().collect(),
    }
}

/// Rounding, repair and coverage fix on an already solved relaxation.
pub fn app_schedule_from(
    instance: &NetworkInstance,
    fractional: &FractionalSolution,
    seed: u64,
) -> RoundingOutcome {
    let rounded = randomized_round(fractional, seed);
    let repaired = repair(instance, fractional, &rounded);
    let fix = coverage_fix(instance, fractional, &repaired);
    let a_rand = raw_throughput(instance, &rounded);
    let a_final = raw_throughput(instance, &fix.schedule);
    RoundingOutcome {
        schedule: fix.schedule,
        rounded,
        a_hat: fractional.objective,
        a_rand,
        delta_a: a_final - a_rand,
        uncovered: fix.uncovered,
        seed,
    }
}

/// The full centralized pipeline for a frame of `frame_length` slots.
pub fn app_schedule(
    instance: &NetworkInstance,
    frame_length: usize,
    seed: u64,
) -> Result<RoundingOutcome> {
    let fractional = solve_relaxation(instance, frame_length)?;
    Ok(app_schedule_from(instance, &fractional, seed))
}
