//! Exact optimum by exhaustive search over feasible slot contents.
//!
//! Slot feasibility comes from the `feasibility` checkers, so this search
//! is independent of the schedulers it validates.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::feasibility::{check_radio_constraints, check_sinr, Schedule};
use crate::radio::NetworkInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExhaustiveLimits {
    pub max_links: usize,
    pub max_slots: usize,
}

impl Default for ExhaustiveLimits {
    fn default() -> Self {
        ExhaustiveLimits {
            max_links: 8,
            max_slots: 4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExactOptimum {
    pub schedule: Schedule,
    pub throughput: f64,
}

fn members(mask: u32) -> impl Iterator<Item = usize> {
    (0..32).filter(move |i| mask & (1 << i) != 0)
}

fn slot_is_feasible(instance: &NetworkInstance, mask: u32) -> Result<bool> {
    let schedule = Schedule::from_slots(vec![members(mask).collect()])?;
    Ok(check_radio_constraints(instance, &schedule)?.is_empty()
        && check_sinr(instance, &schedule)?.is_empty())
}

/// Bitmasks of every link subset that may share one slot, ascending.
/// Feasibility is closed under taking subsets, which prunes the scan.
pub fn feasible_sets(instance: &NetworkInstance) -> Result<Vec<u32>> {
    let n = instance.num_links();
    if n > 20 {
        return Err(Error::TooLarge {
            links: n,
            slots: 1,
            max_links: 20,
            max_slots: 1,
        });
    }
    let mut ok = vec![false; 1 << n];
    ok[0] = true;
    for mask in 1u32..(1 << n) {
        let subsets_ok = members(mask).all(|i| ok[(mask & !(1 << i)) as usize]);
        ok[mask as usize] = subsets_ok && slot_is_feasible(instance, mask)?;
    }
    Ok((0..1u32 << n).filter(|&m| ok[m as usize]).collect())
}

pub fn exhaustive_opt(
    instance: &NetworkInstance,
    frame_length: usize,
) -> Result<Option<ExactOptimum>> {
    exhaustive_opt_with(instance, frame_length, ExhaustiveLimits::default())
}

/// Maximum-throughput schedule covering every link, or `None` when no
/// covering schedule exists within the frame.
pub fn exhaustive_opt_with(
    instance: &NetworkInstance,
    frame_length: usize,
    limits: ExhaustiveLimits,
) -> Result<Option<ExactOptimum>> {
    let n = instance.num_links();
    if frame_length == 0 {
        return Err(Error::Domain("frame length must be >= 1".into()));
    }
    if n > limits.max_links || frame_length > limits.max_slots {
        return Err(Error::TooLarge {
            links: n,
            slots: frame_length,
            max_links: limits.max_links,
            max_slots: limits.max_slots,
        });
    }
    let sets = feasible_sets(instance)?;
    let weight: Vec<f64> = sets
        .iter()
        .map(|&m| members(m).map(|l| instance.links()[l].rate).sum())
        .collect();

    // best[mask]: largest total rate of t slots whose union is `mask`.
    let full = (1usize << n) - 1;
    let mut best = vec![f64::NEG_INFINITY; 1 << n];
    best[0] = 0.0;
    let mut choice: Vec<Vec<(u32, u32)>> = Vec::with_capacity(frame_length);
    for _ in 0..frame_length {
        let mut next = vec![f64::NEG_INFINITY; 1 << n];
        let mut pick = vec![(0u32, 0u32); 1 << n];
        for (mask, &value) in best.iter().enumerate() {
            if value == f64::NEG_INFINITY {
                continue;
            }
            for (&set, &w) in sets.iter().zip(&weight) {
                let to = mask | set as usize;
                if value + w > next[to] {
                    next[to] = value + w;
                    pick[to] = (mask as u32, set);
                }
            }
        }
        best = next;
        choice.push(pick);
    }
    if best[full] == f64::NEG_INFINITY {
        return Ok(None);
    }

    let mut slots = Vec::with_capacity(frame_length);
    let mut mask = full as u32;
    for pick in choice.iter().rev() {
        let (prev, set) = pick[mask as usize];
        slots.push(members(set).collect::<BTreeSet<usize>>());
        mask = prev;
    }
    slots.reverse();
    Ok(Some(ExactOptimum {
        schedule: Schedule::from_slots(slots)?,
        throughput: best[full] / frame_length as f64,
    }))
}

/// Fewest slots in which every link can be scheduled at least once.
pub fn min_frame_length(instance: &NetworkInstance, max_links: usize) -> Result<Option<usize>> {
    let n = instance.num_links();
    if n > max_links {
        return Err(Error::TooLarge {
            links: n,
            slots: 0,
            max_links,
            max_slots: 0,
        });
    }
    let sets = feasible_sets(instance)?;
    // Only maximal sets matter for covering.
    let maximal: Vec<u32> = sets
        .iter()
        .copied()
        .filter(|&s| !sets.iter().any(|&o| o != s && o & s == s))
        .collect();
    let full = (1u32 << n) - 1;
    let mut seen = vec![false; 1 << n];
    seen[0] = true;
    let mut frontier = vec![0u32];
    for depth in 1..=n {
        let mut next = Vec::new();
        for &m in &frontier {
            for &s in &maximal {
                let to = m | s;
                if !seen[to as usize] {
                    seen[to as usize] = true;
                    next.push(to);
                }
            }
        }
        if seen[full as usize] {
            return Ok(Some(depth));
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasibility::{check_all, throughput};
    use crate::fixtures;

    /// Plain enumeration of every assignment of feasible sets to slots.
    fn brute_force(instance: &NetworkInstance, frame: usize) -> Option<f64> {
        let sets = feasible_sets(instance).unwrap();
        let full = (1u32 << instance.num_links()) - 1;
        let mut best: Option<f64> = None;
        let mut idx = vec![0usize; frame];
        loop {
            let union = idx.iter().fold(0, |acc, &i| acc | sets[i]);
            if union == full {
                let slots = idx.iter().map(|&i| members(sets[i]).collect()).collect();
                let s = Schedule::from_slots(slots).unwrap();
                let a = throughput(instance, &s).unwrap();
                best = Some(best.map_or(a, |b: f64| b.max(a)));
            }
            let mut k = 0;
            loop {
                if k == frame {
                    return best;
                }
                idx[k] += 1;
                if idx[k] < sets.len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }

    #[test]
    fn examples() {
        let opt = exhaustive_opt(&fixtures::single_link(), 1)
            .unwrap()
            .unwrap();
        assert_eq!(opt.throughput, 1.0);
        let opt = exhaustive_opt(&fixtures::conflicting_pair(), 2)
            .unwrap()
            .unwrap();
        assert_eq!(opt.throughput, 1.0);
        let opt = exhaustive_opt(&fixtures::non_interfering_pair(), 2)
            .unwrap()
            .unwrap();
        assert_eq!(opt.throughput, 2.0);
        assert!(exhaustive_opt(&fixtures::conflicting_pair(), 1)
            .unwrap()
            .is_none());
    }

    #[test]
    fn optimum_is_feasible_and_matches_enumeration() {
        let inst = fixtures::accumulation_ring();
        for frame in 1..=3 {
            let opt = exhaustive_opt(&inst, frame).unwrap();
            let brute = brute_force(&inst, frame);
            match (opt, brute) {
                (Some(o), Some(b)) => {
                    assert!((o.throughput - b).abs() < 1e-12);
                    assert!(check_all(&inst, &o.schedule).unwrap().feasible);
                    assert!((throughput(&inst, &o.schedule).unwrap() - o.throughput).abs() < 1e-12);
                }
                (None, None) => {}
                other => panic!("mismatch {other:?}"),
            }
        }
    }

    #[test]
    fn guard_refuses_large_searches() {
        let inst = fixtures::accumulation_ring();
        assert!(matches!(
            exhaustive_opt(&inst, 5),
            Err(Error::TooLarge { .. })
        ));
        let relaxed = ExhaustiveLimits {
            max_links: 8,
            max_slots: 6,
        };
        assert!(exhaustive_opt_with(&inst, 5, relaxed).unwrap().is_some());
    }

    #[test]
    fn minimum_frame() {
        assert_eq!(
            min_frame_length(&fixtures::single_link(), 12).unwrap(),
            Some(1)
        );
        assert_eq!(
            min_frame_length(&fixtures::conflicting_pair(), 12).unwrap(),
            Some(2)
        );
        assert_eq!(
            min_frame_length(&fixtures::non_interfering_pair(), 12).unwrap(),
            Some(1)
        );
        assert_eq!(
            min_frame_length(&fixtures::accumulation_ring(), 12).unwrap(),
            Some(2)
        );
    }
}
