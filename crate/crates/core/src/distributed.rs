//! Slot-synchronous simulation of the carrier-sensing link scheduler.
//!
//! Each slot runs three phases:
//!
//! 1. **Carrier sensing.** Every contending sender draws a mini-slot
//!    `t_s` in the sensing window and emits a SENSING signal there unless it
//!    already heard one from a sender within the sensing range `R_C`.
//!    Contenders are visited in `(t_s, node id)` order, so equal mini-slots
//!    resolve to the lower node id. Losers retry in the next slot.
//! 2. **RTS/CTS.** Each surviving sender sends RTS to its receiver. A receiver
//!    grants one CTS (earliest `t_s`, then lowest sender id) unless it is
//!    itself a surviving sender. Denied senders back off uniformly 1..=8 slots.
//! 3. **Data/ACK.** Granted links transmit; a link completes iff its SINR,
//!    measured with noise against every other granted link, meets beta.
//!
//! A sender whose links have all completed once keeps quiet while any sender
//! within `R_C` still has a pending link.
//!
//! Trace export is tab separated with the header columns `slot`, `sensing`,
//! `granted`, `denied`, `completed` and `sinr_db`; `sensing` lists
//! `node:link:t_s:go|busy` entries separated by spaces, the link columns are
//! comma separated ids, and `sinr_db` holds the measured SINR of each
//! completed link in the same order, in dB with three decimals.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{domain, Result};
use crate::feasibility::Schedule;
use crate::radio::{linear_to_db, NetworkInstance};

pub const DEFAULT_MINI_SLOTS: usize = 64;
pub const MAX_BACKOFF: usize = 8;

/// `4 * (2 pi beta (alpha - 1) / (alpha - 2))^(1/alpha)`.
pub fn compute_rho(alpha: f64, beta: f64) -> Result<f64> {
    if !(alpha > 2.0 && alpha.is_finite()) {
        return Err(domain(format!("rho needs alpha > 2, got {alpha}")));
    }
    if !(beta >= 1.0 && beta.is_finite()) {
        return Err(domain(format!("rho needs beta >= 1, got {beta}")));
    }
    let inner = 2.0 * std::f64::consts::PI * beta * (alpha - 1.0) / (alpha - 2.0);
    Ok(4.0 * inner.powf(1.0 / alpha))
}

/// Largest `k` with `2^k <= ratio`, for `ratio >= 1`.
fn floor_log2(ratio: f64) -> u32 {
    let mut k = 0;
    while 2f64.powi(k as i32 + 1) <= ratio {
        k += 1;
    }
    k
}

/// Length diversity `floor(log2(d_max / d_min))` over the link lengths.
pub fn compute_diversity(instance: &NetworkInstance) -> u32 {
    let (d_min, d_max) = length_range(instance);
    floor_log2(d_max / d_min)
}

fn length_range(instance: &NetworkInstance) -> (f64, f64) {
    (0..instance.num_links())
        .map(|l| instance.link_length(l))
        .fold((f64::INFINITY, 0.0), |(lo, hi), d| (lo.min(d), hi.max(d)))
}

/// `d_max^alpha (rho + 2)^alpha / beta`, with `d_max` normalized so the
/// shortest link has length 1.
pub fn theorem3_bound_value(d_max: f64, alpha: f64, beta: f64) -> Result<f64> {
    if !(d_max >= 1.0) {
        return Err(domain(format!(
            "normalized d_max must be >= 1, got {d_max}"
        )));
    }
    let rho = compute_rho(alpha, beta)?;
    Ok(d_max.powf(alpha) * (rho + 2.0).powf(alpha) / beta)
}

/// Ceiling on the approximation ratio of the protocol for `instance`.
pub fn theorem3_bound(instance: &NetworkInstance, params: &ProtocolParams) -> f64 {
    let (_, d_max) = length_range(instance);
    let r = instance.radio();
    let d_max = (d_max * params.d_min_normalization).max(1.0);
    d_max.powf(r.alpha) * (params.rho + 2.0).powf(r.alpha) / r.beta
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProtocolParams {
    pub rho: f64,
    pub diversity_k: u32,
    /// `rho * 2^k`, in units where the shortest link has length 1.
    pub sensing_range: f64,
    pub mini_slot_count: usize,
    /// Multiplies plane distances into normalized ones (`1 / d_min`).
    pub d_min_normalization: f64,
}

impl ProtocolParams {
    pub fn new(
        rho: f64,
        diversity_k: u32,
        mini_slot_count: usize,
        d_min_normalization: f64,
    ) -> Result<Self> {
        if !(rho > 4.0 && rho.is_finite()) {
            return Err(domain(format!("rho must exceed 4, got {rho}")));
        }
        if mini_slot_count < 2 {
            return Err(domain("need at least two mini-slots"));
        }
        if !(d_min_normalization > 0.0 && d_min_normalization.is_finite()) {
            return Err(domain("normalization must be positive"));
        }
        Ok(ProtocolParams {
            rho,
            diversity_k,
            sensing_range: rho * 2f64.powi(diversity_k as i32),
            mini_slot_count,
            d_min_normalization,
        })
    }

    pub fn for_instance(instance: &NetworkInstance) -> Result<Self> {
        let r = instance.radio();
        let (d_min, _) = length_range(instance);
        Self::new(
            compute_rho(r.alpha, r.beta)?,
            compute_diversity(instance),
            DEFAULT_MINI_SLOTS,
            1.0 / d_min,
        )
    }

    /// Sensing range in plane units.
    pub fn sensing_range_plane(&self) -> f64 {
        self.sensing_range / self.d_min_normalization
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Contention {
    pub sender: usize,
    pub link: usize,
    pub t_s: usize,
    pub sensed_busy: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlotOutcome {
    pub slot: usize,
    pub sensing: Vec<Contention>,
    /// Links that received CTS and transmitted data.
    pub granted: Vec<usize>,
    /// Links whose RTS went unanswered.
    pub denied: Vec<usize>,
    /// `(link, measured SINR)` for transmissions that were acknowledged.
    pub completed: Vec<(usize, f64)>,
    /// `(link, measured SINR)` for transmissions below beta.
    pub failed: Vec<(usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimTrace {
    pub slots: Vec<SlotOutcome>,
    /// Slot index in which each link first completed.
    pub first_scheduled: Vec<Option<usize>>,
    /// Number of slots until every link completed once.
    pub slots_used: Option<usize>,
    pub complete: bool,
    pub seed: u64,
}

impl SimTrace {
    /// Completed transmissions as a schedule over the simulated slots.
    pub fn schedule(&self) -> Schedule {
        let slots = self
            .slots
            .iter()
            .map(|s| s.completed.iter().map(|&(l, _)| l).collect())
            .collect();
        Schedule::from_slots(slots).expect("at least one slot simulated")
    }

    /// Delivered traffic per simulated slot.
    pub fn throughput(&self, instance: &NetworkInstance) -> f64 {
        let total: f64 = self
            .slots
            .iter()
            .flat_map(|s| &s.completed)
            .map(|&(l, _)| instance.links()[l].rate)
            .sum();
        total / self.slots.len() as f64
    }

    pub fn uncovered(&self) -> Vec<usize> {
        (0..self.first_scheduled.len())
            .filter(|&l| self.first_scheduled[l].is_none())
            .collect()
    }

    pub fn to_text(&self) -> String {
        let mut out = String::from("slot\tsensing\tgranted\tdenied\tcompleted\tsinr_db\n");
        let ids = |v: &mut dyn Iterator<Item = usize>| {
            v.map(|l| l.to_string()).collect::<Vec<_>>().join(",")
        };
        for s in &self.slots {
            let sensing = s
                .sensing
                .iter()
                .map(|c| {
                    format!(
                        "{}:{}:{}:{}",
                        c.sender,
                        c.link,
                        c.t_s,
                        if c.sensed_busy { "busy" } else { "go" }
                    )
                })
                .collect::<Vec<_>>()
                .join(" ");
            let sinr = s
                .completed
                .iter()
                .map(|&(_, v)| match linear_to_db(v) {
                    Ok(db) => format!("{db:.3}"),
                    Err(_) => "-inf".to_string(),
                })
                .collect::<Vec<_>>()
                .join(",");
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}",
                s.slot,
                sensing,
                ids(&mut s.granted.iter().copied()),
                ids(&mut s.denied.iter().copied()),
                ids(&mut s.completed.iter().map(|c| c.0)),
                sinr
            );
        }
        out
    }
}

struct World<'a> {
    instance: &'a NetworkInstance,
    /// Outgoing links per node, ascending.
    outgoing: Vec<Vec<usize>>,
    /// Senders within sensing range of each sender.
    neighbours: Vec<Vec<usize>>,
    backoff_until: Vec<usize>,
    round_robin: Vec<usize>,
    mini_slots: usize,
    first_scheduled: Vec<Option<usize>>,
    rng: ChaCha8Rng,
}

impl<'a> World<'a> {
    fn new(instance: &'a NetworkInstance, params: &ProtocolParams, seed: u64) -> Self {
        let nodes = instance.nodes().len();
        let mut outgoing = vec![Vec::new(); nodes];
        for l in instance.links() {
            outgoing[l.sender].push(l.id);
        }
        let senders: Vec<usize> = (0..nodes).filter(|&v| !outgoing[v].is_empty()).collect();
        let range = params.sensing_range_plane();
        let mut neighbours = vec![Vec::new(); nodes];
        for &a in &senders {
            for &b in &senders {
                if a != b && instance.distance(a, b) <= range {
                    neighbours[a].push(b);
                }
            }
        }
        World {
            instance,
            outgoing,
            neighbours,
            backoff_until: vec![0; nodes],
            round_robin: vec![0; nodes],
            mini_slots: params.mini_slot_count,
            first_scheduled: vec![None; instance.num_links()],
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn pending(&self, node: usize) -> Option<usize> {
        self.outgoing[node]
            .iter()
            .copied()
            .find(|&l| self.first_scheduled[l].is_none())
    }

    fn all_covered(&self) -> bool {
        self.first_scheduled.iter().all(Option::is_some)
    }

    fn step(&mut self, slot: usize) -> SlotOutcome {
        let beta = self.instance.radio().beta;

        // Pick at most one link per contending sender.
        let mut contenders: Vec<(usize, usize)> = Vec::new();
        for node in 0..self.outgoing.len() {
            if self.outgoing[node].is_empty() || self.backoff_until[node] > slot {
                continue;
            }
            let link = match self.pending(node) {
                Some(l) => l,
                None => {
                    if self.neighbours[node]
                        .iter()
                        .any(|&u| self.pending(u).is_some())
                    {
                        continue;
                    }
                    let links = &self.outgoing[node];
                    let l = links[self.round_robin[node] % links.len()];
                    self.round_robin[node] += 1;
                    l
                }
            };
            contenders.push((node, link));
        }

        // Phase 1: carrier sensing.
        let mut sensing: Vec<Contention> = contenders
            .iter()
            .map(|&(sender, link)| Contention {
                sender,
                link,
                t_s: self.rng.gen_range(0..self.mini_slots),
                sensed_busy: false,
            })
            .collect();
        sensing.sort_by_key(|c| (c.t_s, c.sender));
        let mut proceeding: Vec<usize> = Vec::new();
        for i in 0..sensing.len() {
            let sender = sensing[i].sender;
            let busy = proceeding
                .iter()
                .any(|&j| self.neighbours[sender].contains(&sensing[j].sender));
            if busy {
                sensing[i].sensed_busy = true;
            } else {
                proceeding.push(i);
            }
        }

        // Phase 2: RTS/CTS.
        let links = self.instance.links();
        let active_senders: Vec<usize> = proceeding.iter().map(|&i| sensing[i].sender).collect();
        let mut granted = Vec::new();
        let mut denied = Vec::new();
        for &i in &proceeding {
            let c = sensing[i];
            let receiver = links[c.link].receiver;
            // `proceeding` is already in (t_s, sender) order.
            let first_rts = proceeding
                .iter()
                .find(|&&j| links[sensing[j].link].receiver == receiver)
                .copied();
            if !active_senders.contains(&receiver) && first_rts == Some(i) {
                granted.push(c.link);
            } else {
                denied.push(c.link);
                let wait = self.rng.gen_range(1..=MAX_BACKOFF);
                self.backoff_until[c.sender] = slot + wait;
            }
        }

        // Phase 3: data and ACK.
        let mut completed = Vec::new();
        let mut failed = Vec::new();
        for &l in &granted {
            let others: Vec<usize> = granted.iter().copied().filter(|&k| k != l).collect();
            let sinr = self
                .instance
                .sinr_at_receiver(l, &others)
                .expect("granted links are valid");
            if sinr >= beta {
                completed.push((l, sinr));
                self.first_scheduled[l].get_or_insert(slot);
            } else {
                failed.push((l, sinr));
            }
        }
        granted.sort_unstable();
        denied.sort_unstable();
        completed.sort_by_key(|c| c.0);
        failed.sort_by_key(|c| c.0);

        SlotOutcome {
            slot,
            sensing,
            granted,
            denied,
            completed,
            failed,
        }
    }

    fn finish(self, slots: Vec<SlotOutcome>, seed: u64) -> SimTrace {
        let complete = self.all_covered();
        let slots_used = if complete {
            self.first_scheduled.iter().flatten().max().map(|&s| s + 1)
        } else {
            None
        };
        SimTrace {
            slots,
            first_scheduled: self.first_scheduled,
            slots_used,
            complete,
            seed,
        }
    }
}

/// Runs until every link has completed once, or `max_slots` run out.
pub fn run_distributed(
    instance: &NetworkInstance,
    params: &ProtocolParams,
    max_slots: usize,
    seed: u64,
) -> Result<SimTrace> {
    if max_slots == 0 {
        return Err(domain("max_slots must be >= 1"));
    }
    let mut world = World::new(instance, params, seed);
    let mut slots = Vec::new();
    for slot in 0..max_slots {
        slots.push(world.step(slot));
        if world.all_covered() {
            break;
        }
    }
    Ok(world.finish(slots, seed))
}

/// Runs exactly `frame_length` slots with saturated senders.
pub fn run_distributed_frame(
    instance: &NetworkInstance,
    params: &ProtocolParams,
    frame_length: usize,
    seed: u64,
) -> Result<SimTrace> {
    if frame_length == 0 {
        return Err(domain("frame length must be >= 1"));
    }
    let mut world = World::new(instance, params, seed);
    let slots = (0..frame_length).map(|s| world.step(s)).collect();
    Ok(world.finish(slots, seed))
}
