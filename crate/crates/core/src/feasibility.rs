//! Schedules and the constraint checkers used as the reference oracle.
//!
//! Nothing in here is shared with the schedulers: every check is
//! recomputed from the instance so these functions can judge their output.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::radio::NetworkInstance;

/// For each slot, the set of links that transmit in it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Schedule {
    slots: Vec<BTreeSet<usize>>,
}

impl Schedule {
    pub fn empty(frame_length: usize) -> Result<Self> {
        if frame_length == 0 {
            return Err(Error::InvalidSchedule("frame length must be >= 1".into()));
        }
        Ok(Schedule {
            slots: vec![BTreeSet::new(); frame_length],
        })
    }

    pub fn from_slots(slots: Vec<BTreeSet<usize>>) -> Result<Self> {
        if slots.is_empty() {
            return Err(Error::InvalidSchedule("frame length must be >= 1".into()));
        }
        Ok(Schedule { slots })
    }

    pub fn frame_length(&self) -> usize {
        self.slots.len()
    }

    pub fn slots(&self) -> &[BTreeSet<usize>] {
        &self.slots
    }

    pub fn slot(&self, t: usize) -> &BTreeSet<usize> {
        &self.slots[t]
    }

    pub fn insert(&mut self, t: usize, link: usize) -> bool {
        self.slots[t].insert(link)
    }

    pub fn remove(&mut self, t: usize, link: usize) -> bool {
        self.slots[t].remove(&link)
    }

    pub fn times_scheduled(&self, link: usize) -> usize {
        self.slots.iter().filter(|s| s.contains(&link)).count()
    }

    pub fn validate_for(&self, instance: &NetworkInstance) -> Result<()> {
        for (t, slot) in self.slots.iter().enumerate() {
            if let Some(&bad) = slot.iter().find(|&&l| l >= instance.num_links()) {
                return Err(Error::InvalidSchedule(format!(
                    "slot {t} references unknown link {bad}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct NodeWitness {
    pub slot: usize,
    pub node: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SinrWitness {
    pub slot: usize,
    pub link: usize,
    pub sinr: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RadioWitnesses {
    /// Nodes receiving from two or more scheduled links in a slot.
    pub multiple_receptions: Vec<NodeWitness>,
    /// Nodes sending on two or more scheduled links in a slot.
    pub multiple_transmissions: Vec<NodeWitness>,
    /// Nodes that both send and receive in a slot.
    pub half_duplex: Vec<NodeWitness>,
}

impl RadioWitnesses {
    pub fn is_empty(&self) -> bool {
        self.multiple_receptions.is_empty()
            && self.multiple_transmissions.is_empty()
            && self.half_duplex.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstraintReport {
    pub uncovered: Vec<usize>,
    pub radio: RadioWitnesses,
    pub sinr: Vec<SinrWitness>,
    pub feasible: bool,
}

/// Links that never transmit in the frame.
pub fn check_coverage(instance: &NetworkInstance, schedule: &Schedule) -> Result<Vec<usize>> {
    schedule.validate_for(instance)?;
    let covered: BTreeSet<usize> = schedule.slots.iter().flatten().copied().collect();
    Ok((0..instance.num_links())
        .filter(|l| !covered.contains(l))
        .collect())
}

pub fn check_radio_constraints(
    instance: &NetworkInstance,
    schedule: &Schedule,
) -> Result<RadioWitnesses> {
    schedule.validate_for(instance)?;
    let mut out = RadioWitnesses::default();
    for (t, slot) in schedule.slots.iter().enumerate() {
        let mut sends: BTreeMap<usize, usize> = BTreeMap::new();
        let mut receives: BTreeMap<usize, usize> = BTreeMap::new();
        for &l in slot {
            let link = &instance.links()[l];
            *sends.entry(link.sender).or_default() += 1;
            *receives.entry(link.receiver).or_default() += 1;
        }
        let witness = |node| NodeWitness { slot: t, node };
        out.multiple_receptions.extend(
            receives
                .iter()
                .filter(|(_, &c)| c >= 2)
                .map(|(&n, _)| witness(n)),
        );
        out.multiple_transmissions.extend(
            sends
                .iter()
                .filter(|(_, &c)| c >= 2)
                .map(|(&n, _)| witness(n)),
        );
        out.half_duplex.extend(
            sends
                .keys()
                .filter(|n| receives.contains_key(n))
                .map(|&n| witness(n)),
        );
    }
    Ok(out)
}

/// Scheduled links whose SINR against the rest of their slot is below beta.
pub fn check_sinr(instance: &NetworkInstance, schedule: &Schedule) -> Result<Vec<SinrWitness>> {
    schedule.validate_for(instance)?;
    let beta = instance.radio().beta;
    let mut out = Vec::new();
    for (t, slot) in schedule.slots.iter().enumerate() {
        let members: Vec<usize> = slot.iter().copied().collect();
        for &l in &members {
            let others: Vec<usize> = members.iter().copied().filter(|&o| o != l).collect();
            let sinr = instance.sinr_at_receiver(l, &others)?;
            if sinr < beta {
                out.push(SinrWitness {
                    slot: t,
                    link: l,
                    sinr,
                });
            }
        }
    }
    Ok(out)
}

/// Per-slot average of scheduled traffic.
pub fn throughput(instance: &NetworkInstance, schedule: &Schedule) -> Result<f64> {
    schedule.validate_for(instance)?;
    let total: f64 = schedule
        .slots
        .iter()
        .flatten()
        .map(|&l| instance.links()[l].rate)
        .sum();
    Ok(total / schedule.frame_length() as f64)
}

pub fn check_all(instance: &NetworkInstance, schedule: &Schedule) -> Result<ConstraintReport> {
    let uncovered = check_coverage(instance, schedule)?;
    let radio = check_radio_constraints(instance, schedule)?;
    let sinr = check_sinr(instance, schedule)?;
    let feasible = uncovered.is_empty() && radio.is_empty() && sinr.is_empty();
    Ok(ConstraintReport {
        uncovered,
        radio,
        sinr,
        feasible,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::radio::{Link, Node, RadioParams};

    fn sched(slots: &[&[usize]]) -> Schedule {
        Schedule::from_slots(slots.iter().map(|s| s.iter().copied().collect()).collect()).unwrap()
    }

    /// A=0, B=1, C=2, D=3 on a line far apart except where links need them.
    fn four_nodes(links: &[(usize, usize)]) -> NetworkInstance {
        let nodes = vec![
            Node::new(0, 0.0, 0.0),
            Node::new(1, 0.0, 2.0),
            Node::new(2, 1.0, 1.0),
            Node::new(3, 5.0, 5.0),
        ];
        let links = links
            .iter()
            .enumerate()
            .map(|(i, &(s, r))| Link::new(i, s, r, 1.0))
            .collect();
        NetworkInstance::new(nodes, links, RadioParams::standard()).unwrap()
    }

    #[test]
    fn coverage_examples() {
        let inst = fixtures::single_link();
        assert!(check_coverage(&inst, &sched(&[&[0]])).unwrap().is_empty());
        let inst = fixtures::non_interfering_pair();
        assert_eq!(
            check_coverage(&inst, &sched(&[&[0], &[0]])).unwrap(),
            vec![1]
        );
    }

    #[test]
    fn shared_receiver_is_flagged() {
        // A->C and B->C
        let inst = four_nodes(&[(0, 2), (1, 2)]);
        let w = check_radio_constraints(&inst, &sched(&[&[0, 1]])).unwrap();
        assert_eq!(
            w.multiple_receptions,
            vec![NodeWitness { slot: 0, node: 2 }]
        );
        assert!(w.multiple_transmissions.is_empty());
        assert!(w.half_duplex.is_empty());
    }

    #[test]
    fn relay_is_half_duplex_violation() {
        // A->B and B->C
        let inst = four_nodes(&[(0, 1), (1, 2)]);
        let w = check_radio_constraints(&inst, &sched(&[&[0, 1]])).unwrap();
        assert_eq!(w.half_duplex, vec![NodeWitness { slot: 0, node: 1 }]);
        assert!(w.multiple_receptions.is_empty());
    }

    #[test]
    fn shared_sender_and_disjoint_links() {
        let inst = four_nodes(&[(2, 0), (2, 1)]);
        let w = check_radio_constraints(&inst, &sched(&[&[0, 1]])).unwrap();
        assert_eq!(
            w.multiple_transmissions,
            vec![NodeWitness { slot: 0, node: 2 }]
        );

        // A->B and C->D
        let inst = four_nodes(&[(0, 1), (2, 3)]);
        assert!(check_radio_constraints(&inst, &sched(&[&[0, 1]]))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn sinr_examples() {
        let inst = fixtures::single_link();
        assert!(check_sinr(&inst, &sched(&[&[0]])).unwrap().is_empty());
        assert!(check_sinr(&inst, &sched(&[&[]])).unwrap().is_empty());

        let inst = fixtures::sinr16_pair(10.0);
        assert!(check_sinr(&inst, &sched(&[&[0, 1]])).unwrap().is_empty());
        let inst = fixtures::sinr16_pair(20.0);
        let w = check_sinr(&inst, &sched(&[&[0, 1]])).unwrap();
        assert_eq!(w.len(), 2);
        assert!(w.iter().all(|w| w.sinr == 16.0));
    }

    #[test]
    fn throughput_examples() {
        let inst = fixtures::single_link();
        assert_eq!(throughput(&inst, &sched(&[&[0]])).unwrap(), 1.0);
        let inst = fixtures::non_interfering_pair();
        assert_eq!(throughput(&inst, &sched(&[&[0, 1], &[0, 1]])).unwrap(), 2.0);
        assert_eq!(throughput(&inst, &sched(&[&[], &[]])).unwrap(), 0.0);
        let inst = fixtures::conflicting_pair();
        assert_eq!(throughput(&inst, &sched(&[&[0], &[1]])).unwrap(), 1.0);
    }

    #[test]
    fn unknown_link_is_rejected() {
        let inst = fixtures::single_link();
        assert!(check_coverage(&inst, &sched(&[&[3]])).is_err());
        assert!(Schedule::empty(0).is_err());
    }

    #[test]
    fn report_feasible_flag() {
        let inst = fixtures::conflicting_pair();
        let ok = check_all(&inst, &sched(&[&[0], &[1]])).unwrap();
        assert!(ok.feasible);
        let bad = check_all(&inst, &sched(&[&[0, 1], &[]])).unwrap();
        assert!(!bad.feasible);
        assert_eq!(bad.sinr.len(), 2);
    }
}
