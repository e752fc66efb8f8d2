//! Simplified comparison schedulers.
//!
//! These are stand-ins built from one-line descriptions of the classic
//! approaches, not reproductions of the original algorithms:
//!
//! * **PM** colors a protocol-model conflict graph: two links conflict when
//!   they share a node or either receiver lies within `R_I` of the other's
//!   sender.
//! * **PG** places links by decreasing rate into the first slot where the
//!   full aggregate SINR still holds.
//! * **PCG** colors a pairwise physical conflict graph: two links conflict
//!   when they share a node or either one's SINR with only the other as
//!   interferer falls below beta. Accumulated interference is ignored.
//!
//! Colors (slot classes) repeat cyclically to fill the frame; when a
//! scheduler needs more classes than slots the overflowing links are
//! reported as uncovered.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::admission::{admits, node_conflict, sinr_within};
use crate::error::{domain, Error, Result};
use crate::feasibility::Schedule;
use crate::radio::NetworkInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BaselineKind {
    ProtocolModel,
    PhysicalGreedy,
    PhysicalConflictGraph,
}

impl BaselineKind {
    pub fn short_name(self) -> &'static str {
        match self {
            BaselineKind::ProtocolModel => "pm",
            BaselineKind::PhysicalGreedy => "pg",
            BaselineKind::PhysicalConflictGraph => "pcg",
        }
    }
}

impl fmt::Display for BaselineKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for BaselineKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pm" => Ok(BaselineKind::ProtocolModel),
            "pg" => Ok(BaselineKind::PhysicalGreedy),
            "pcg" => Ok(BaselineKind::PhysicalConflictGraph),
            other => Err(domain(format!("unknown baseline {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineSchedule {
    pub kind: BaselineKind,
    pub schedule: Schedule,
    /// Slot classes the scheduler needed.
    pub colors: usize,
    pub uncovered: Vec<usize>,
}

/// Sequential greedy coloring in link id order.
fn greedy_coloring(n: usize, conflict: impl Fn(usize, usize) -> bool) -> Vec<Vec<usize>> {
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for l in 0..n {
        match classes
            .iter_mut()
            .find(|class| class.iter().all(|&k| !conflict(k, l)))
        {
            Some(class) => class.push(l),
            None => classes.push(vec![l]),
        }
    }
    classes
}

fn fill_frame(
    kind: BaselineKind,
    classes: Vec<Vec<usize>>,
    frame_length: usize,
) -> Result<BaselineSchedule> {
    let mut schedule = Schedule::empty(frame_length)?;
    let used = classes.len().min(frame_length);
    for t in 0..frame_length {
        if used > 0 {
            for &l in &classes[t % used] {
                schedule.insert(t, l);
            }
        }
    }
    let mut uncovered: Vec<usize> = classes.iter().skip(used).flatten().copied().collect();
    uncovered.sort_unstable();
    Ok(BaselineSchedule {
        kind,
        schedule,
        colors: classes.len(),
        uncovered,
    })
}

pub fn pm_schedule(
    instance: &NetworkInstance,
    interference_range: f64,
    frame_length: usize,
) -> Result<BaselineSchedule> {
    if !(interference_range > 0.0) {
        return Err(domain(format!(
            "interference range must be positive, got {interference_range}"
        )));
    }
    let links = instance.links();
    let conflict = |a: usize, b: usize| {
        node_conflict(instance, a, b)
            || instance.distance(links[a].receiver, links[b].sender) <= interference_range
            || instance.distance(links[b].receiver, links[a].sender) <= interference_range
    };
    let classes = greedy_coloring(instance.num_links(), conflict);
    fill_frame(BaselineKind::ProtocolModel, classes, frame_length)
}

pub fn pg_schedule(instance: &NetworkInstance, frame_length: usize) -> Result<BaselineSchedule> {
    let mut order: Vec<usize> = (0..instance.num_links()).collect();
    let links = instance.links();
    order.sort_by(|&a, &b| links[b].rate.total_cmp(&links[a].rate).then(a.cmp(&b)));
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for l in order {
        match classes.iter_mut().find(|class| admits(instance, class, l)) {
            Some(class) => class.push(l),
            None => classes.push(vec![l]),
        }
    }
    // A link that fails even alone still gets its own class; report it.
    let beta = instance.radio().beta;
    let hopeless: BTreeSet<usize> = (0..instance.num_links())
        .filter(|&l| sinr_within(instance, l, &[]) < beta)
        .collect();
    for class in &mut classes {
        class.retain(|l| !hopeless.contains(l));
    }
    classes.retain(|c| !c.is_empty());
    let mut out = fill_frame(BaselineKind::PhysicalGreedy, classes, frame_length)?;
    out.uncovered.extend(hopeless);
    out.uncovered.sort_unstable();
    Ok(out)
}

pub fn pcg_schedule(instance: &NetworkInstance, frame_length: usize) -> Result<BaselineSchedule> {
    let beta = instance.radio().beta;
    let conflict = |a: usize, b: usize| {
        node_conflict(instance, a, b)
            || sinr_within(instance, a, &[b]) < beta
            || sinr_within(instance, b, &[a]) < beta
    };
    let classes = greedy_coloring(instance.num_links(), conflict);
    fill_frame(BaselineKind::PhysicalConflictGraph, classes, frame_length)
}

pub fn run_baseline(
    kind: BaselineKind,
    instance: &NetworkInstance,
    interference_range: f64,
    frame_length: usize,
) -> Result<BaselineSchedule> {
    match kind {
        BaselineKind::ProtocolModel => pm_schedule(instance, interference_range, frame_length),
        BaselineKind::PhysicalGreedy => pg_schedule(instance, frame_length),
        BaselineKind::PhysicalConflictGraph => pcg_schedule(instance, frame_length),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::feasibility::{check_all, check_radio_constraints, check_sinr};
    use crate::fixtures;
    use crate::radio::{Link, Node, RadioParams};

    fn shared_receiver() -> NetworkInstance {
        let nodes = vec![
            Node::new(0, 0.0, 0.0),
            Node::new(1, 2.0, 0.0),
            Node::new(2, 1.0, 0.0),
        ];
        let links = vec![Link::new(0, 0, 2, 1.0), Link::new(1, 1, 2, 1.0)];
        NetworkInstance::new(nodes, links, RadioParams::standard()).unwrap()
    }

    #[test]
    fn pm_examples() {
        assert_eq!(
            pm_schedule(&fixtures::single_link(), 2.5, 4)
                .unwrap()
                .colors,
            1
        );
        assert_eq!(pm_schedule(&shared_receiver(), 2.5, 4).unwrap().colors, 2);
        let out = pm_schedule(&fixtures::non_interfering_pair(), 2.5, 4).unwrap();
        assert_eq!(out.colors, 1);
        assert!(out.schedule.slots().iter().all(|s| s.len() == 2));
        assert!(pm_schedule(&fixtures::single_link(), 0.0, 4).is_err());
    }

    #[test]
    fn pm_overflow_is_reported() {
        let out = pm_schedule(&shared_receiver(), 2.5, 1).unwrap();
        assert_eq!(out.uncovered, vec![1]);
    }

    #[test]
    fn pg_examples() {
        let out = pg_schedule(&fixtures::single_link(), 3).unwrap();
        assert_eq!(out.colors, 1);
        assert!(out.schedule.slot(0).contains(&0));

        // Higher rate goes first.
        let base = fixtures::conflicting_pair();
        let mut links = base.links().to_vec();
        links[1].rate = 2.0;
        let inst = NetworkInstance::new(base.nodes().to_vec(), links, *base.radio()).unwrap();
        let out = pg_schedule(&inst, 2).unwrap();
        assert_eq!(out.colors, 2);
        assert_eq!(
            out.schedule.slot(0).iter().copied().collect::<Vec<_>>(),
            vec![1]
        );
        assert_eq!(
            out.schedule.slot(1).iter().copied().collect::<Vec<_>>(),
            vec![0]
        );

        let out = pg_schedule(&fixtures::sinr16_pair(10.0), 2).unwrap();
        assert_eq!(out.colors, 1);
    }

    #[test]
    fn pcg_examples() {
        assert_eq!(
            pcg_schedule(&fixtures::sinr16_pair(10.0), 2)
                .unwrap()
                .colors,
            1
        );
        assert_eq!(pcg_schedule(&shared_receiver(), 2).unwrap().colors, 2);
    }

    #[test]
    fn accumulation_fixture_separates_the_models() {
        let inst = fixtures::accumulation_ring();
        let pcg = pcg_schedule(&inst, 4).unwrap();
        assert_eq!(pcg.colors, 1);
        assert!(!check_sinr(&inst, &pcg.schedule).unwrap().is_empty());
        assert!(check_radio_constraints(&inst, &pcg.schedule)
            .unwrap()
            .is_empty());

        let pm = pm_schedule(&inst, 2.5, 4).unwrap();
        assert!(!check_sinr(&inst, &pm.schedule).unwrap().is_empty());
        assert!(check_radio_constraints(&inst, &pm.schedule)
            .unwrap()
            .is_empty());

        let pg = pg_schedule(&inst, 4).unwrap();
        assert!(check_all(&inst, &pg.schedule).unwrap().feasible);
    }

    #[test]
    fn kind_names_round_trip() {
        for kind in [
            BaselineKind::ProtocolModel,
            BaselineKind::PhysicalGreedy,
            BaselineKind::PhysicalConflictGraph,
        ] {
            assert_eq!(kind.to_string().parse::<BaselineKind>().unwrap(), kind);
        }
        assert!("xyz".parse::<BaselineKind>().is_err());
    }
}
