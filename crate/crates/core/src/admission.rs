//! Slot admission tests used by the schedulers.
//!
//! Kept apart from `feasibility` on purpose: the checkers there judge what
//! the code here produces.

use crate::radio::NetworkInstance;

/// Links that cannot share a slot because they have a node in common
/// (same receiver, same sender, or one's sender is the other's receiver).
pub(crate) fn node_conflict(instance: &NetworkInstance, a: usize, b: usize) -> bool {
    let links = instance.links();
    links[a].shares_node(&links[b])
}

/// SINR of `link` against the senders of `others` (which may contain `link`).
pub(crate) fn sinr_within(instance: &NetworkInstance, link: usize, others: &[usize]) -> f64 {
    let links = instance.links();
    let target = &links[link];
    let signal = instance.rx_power(target.sender, target.receiver);
    let interference: f64 = others
        .iter()
        .filter(|&&k| k != link)
        .map(|&k| instance.rx_power(links[k].sender, target.receiver))
        .sum();
    signal / (instance.radio().noise + interference)
}

/// Every member of `set` clears the SINR threshold.
pub(crate) fn sinr_feasible(instance: &NetworkInstance, set: &[usize]) -> bool {
    let beta = instance.radio().beta;
    set.iter().all(|&l| sinr_within(instance, l, set) >= beta)
}

/// `set` stays admissible after adding `link`: no shared nodes, SINR holds
/// for every member.
pub(crate) fn admits(instance: &NetworkInstance, set: &[usize], link: usize) -> bool {
    if set.iter().any(|&k| node_conflict(instance, k, link)) {
        return false;
    }
    let mut with = set.to_vec();
    with.push(link);
    sinr_feasible(instance, &with)
}
