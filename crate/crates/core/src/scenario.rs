//! Scenario generation and the scenario / schedule text formats.
//!
//! Scenario file (every float written in Rust's shortest round-trip form):
//!
//! ```text
//! linksched-scenario v1
//! radio alpha=<f64> beta=<f64> noise=<f64> tx_power=<f64>
//! nodes <count>
//! <id> <x> <y>
//! links <count>
//! <id> <sender> <receiver> <rate>
//! ```
//!
//! Schedule file:
//!
//! ```text
//! linksched-schedule v1
//! frame <T>
//! slot <t>: <link> <link> ...
//! ```
//!
//! Radio powers are linear milliwatts; `beta` is linear.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::feasibility::Schedule;
use crate::radio::{Link, NetworkInstance, Node, RadioParams, D_FLOOR};

const SCENARIO_MAGIC: &str = "linksched-scenario v1";
const SCHEDULE_MAGIC: &str = "linksched-schedule v1";
const MAX_PLACEMENT_TRIES: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub area_side: f64,
    /// Number of sender/receiver pairs `n`.
    pub pairs: usize,
    /// Total nodes; `2 * pairs` when unset. Extra nodes stay idle.
    pub node_count: Option<usize>,
    pub transmission_range: f64,
    pub interference_range: f64,
    pub noise_dbm: f64,
    pub beta_db: f64,
    pub alpha: f64,
    pub frame_length: usize,
    pub runs: usize,
    pub rate: f64,
    pub seed: u64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            area_side: 100.0,
            pairs: 10,
            node_count: None,
            transmission_range: 1.0,
            interference_range: 2.5,
            noise_dbm: -90.0,
            beta_db: 10.0,
            alpha: 4.0,
            frame_length: 100,
            runs: 100,
            rate: 1.0,
            seed: 1,
        }
    }
}

impl ScenarioConfig {
    pub fn node_count(&self) -> usize {
        self.node_count.unwrap_or(2 * self.pairs)
    }

    pub fn radio(&self) -> Result<RadioParams> {
        RadioParams::from_db(self.alpha, self.beta_db, self.noise_dbm)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("area_side", self.area_side),
            ("transmission_range", self.transmission_range),
            ("interference_range", self.interference_range),
            ("rate", self.rate),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(domain(format!("{name} must be positive, got {v}")));
            }
        }
        if self.pairs == 0 {
            return Err(domain("pairs must be >= 1"));
        }
        if self.frame_length == 0 {
            return Err(domain("frame_length must be >= 1"));
        }
        if self.runs == 0 {
            return Err(domain("runs must be >= 1"));
        }
        if self.pairs > self.node_count() / 2 {
            return Err(domain(format!(
                "{} pairs need at least {} nodes, got {}",
                self.pairs,
                2 * self.pairs,
                self.node_count()
            )));
        }
        self.radio()?;
        Ok(())
    }
}

fn far_from_all(nodes: &[Node], x: f64, y: f64) -> bool {
    nodes.iter().all(|n| (n.x - x).hypot(n.y - y) >= D_FLOOR)
}

fn place_pairs(
    config: &ScenarioConfig,
    rng: &mut ChaCha8Rng,
    mut length: impl FnMut(&mut ChaCha8Rng, usize) -> f64,
) -> Result<NetworkInstance> {
    config.validate()?;
    let side = config.area_side;
    let mut nodes: Vec<Node> = Vec::with_capacity(config.node_count());
    let mut links = Vec::with_capacity(config.pairs);
    for pair in 0..config.pairs {
        let mut placed = false;
        for _ in 0..MAX_PLACEMENT_TRIES {
            let sx = rng.gen_range(0.0..side);
            let sy = rng.gen_range(0.0..side);
            let d = length(rng, pair);
            let theta = rng.gen_range(0.0..2.0 * PI);
            let (rx, ry) = (sx + d * theta.cos(), sy + d * theta.sin());
            let inside = (0.0..=side).contains(&rx) && (0.0..=side).contains(&ry);
            if d >= D_FLOOR
                && inside
                && far_from_all(&nodes, sx, sy)
                && far_from_all(&nodes, rx, ry)
            {
                let s = nodes.len();
                nodes.push(Node::new(s, sx, sy));
                nodes.push(Node::new(s + 1, rx, ry));
                links.push(Link::new(pair, s, s + 1, config.rate));
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::Placement(format!(
                "could not place pair {pair} after {MAX_PLACEMENT_TRIES} tries"
            )));
        }
    }
    while nodes.len() < config.node_count() {
        let mut placed = false;
        for _ in 0..MAX_PLACEMENT_TRIES {
            let (x, y) = (rng.gen_range(0.0..side), rng.gen_range(0.0..side));
            if far_from_all(&nodes, x, y) {
                nodes.push(Node::new(nodes.len(), x, y));
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::Placement("could not place an idle node".into()));
        }
    }
    NetworkInstance::new(nodes, links, config.radio()?)
}

/// Uniform senders over the square, each receiver uniform over the disk of
/// radius `transmission_range` around its sender (clipped to the square).
/// Deterministic per seed.
pub fn generate_scenario(config: &ScenarioConfig, seed: u64) -> Result<NetworkInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let range = config.transmission_range;
    place_pairs(config, &mut rng, |rng, _| range * rng.gen::<f64>().sqrt())
}

/// Like `generate_scenario` but with link lengths chosen so the length
/// diversity is exactly `k`: the shortest link has length
/// `d0 = transmission_range / 2^(k+1)`, the longest lies in
/// `[d0 2^k, d0 2^(k+1))`, and the rest fall between.
pub fn generate_with_diversity(
    config: &ScenarioConfig,
    k: u32,
    seed: u64,
) -> Result<NetworkInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d0 = config.transmission_range / 2f64.powi(k as i32 + 1);
    let longest = d0 * 2f64.powi(k as i32) * (1.0 + rng.gen::<f64>());
    let spread = d0 * 2f64.powi(k as i32);
    place_pairs(config, &mut rng, move |rng, pair| match pair {
        0 => d0,
        1 => longest,
        _ => rng.gen_range(d0..=spread),
    })
}

pub fn format_scenario(instance: &NetworkInstance) -> String {
    let r = instance.radio();
    let mut out = String::new();
    let _ = writeln!(out, "{SCENARIO_MAGIC}");
    let _ = writeln!(
        out,
        "radio alpha={:?} beta={:?} noise={:?} tx_power={:?}",
        r.alpha, r.beta, r.noise, r.tx_power
    );
    let _ = writeln!(out, "nodes {}", instance.nodes().len());
    for n in instance.nodes() {
        let _ = writeln!(out, "{} {:?} {:?}", n.id, n.x, n.y);
    }
    let _ = writeln!(out, "links {}", instance.num_links());
    for l in instance.links() {
        let _ = writeln!(out, "{} {} {} {:?}", l.id, l.sender, l.receiver, l.rate);
    }
    out
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            inner: text.lines().enumerate(),
        }
    }

    /// Next non-blank line that is not a `#` comment, with its 1-based number.
    fn next(&mut self) -> Result<(usize, &'a str)> {
        for (i, line) in self.inner.by_ref() {
            let t = line.trim();
            if !t.is_empty() && !t.starts_with('#') {
                return Ok((i + 1, t));
            }
        }
        Err(Error::Parse {
            line: 0,
            msg: "unexpected end of input".into(),
        })
    }

    fn rest(&mut self) -> Option<(usize, &'a str)> {
        self.next().ok()
    }
}

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn field<T: std::str::FromStr>(line: usize, tok: Option<&str>, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("bad {what}: {tok:?}")))
}

fn header_count(line: usize, text: &str, keyword: &str) -> Result<usize> {
    let mut toks = text.split_whitespace();
    if toks.next() != Some(keyword) {
        return Err(parse_err(line, format!("expected `{keyword} <count>`")));
    }
    field(line, toks.next(), "count")
}

pub fn parse_scenario(text: &str) -> Result<NetworkInstance> {
    let mut lines = Lines::new(text);
    let (ln, magic) = lines.next()?;
    if magic != SCENARIO_MAGIC {
        return Err(parse_err(ln, format!("expected `{SCENARIO_MAGIC}`")));
    }
    let (ln, radio_line) = lines.next()?;
    let mut toks = radio_line.split_whitespace();
    if toks.next() != Some("radio") {
        return Err(parse_err(ln, "expected radio line"));
    }
    let mut values = [None; 4];
    let names = ["alpha", "beta", "noise", "tx_power"];
    for tok in toks {
        let (k, v) = tok
            .split_once('=')
            .ok_or_else(|| parse_err(ln, format!("bad radio field {tok:?}")))?;
        let idx = names
            .iter()
            .position(|n| *n == k)
            .ok_or_else(|| parse_err(ln, format!("unknown radio field {k:?}")))?;
        values[idx] = Some(field::<f64>(ln, Some(v), k)?);
    }
    let get = |i: usize| values[i].ok_or_else(|| parse_err(ln, format!("missing {}", names[i])));
    let radio = RadioParams::new(get(0)?, get(1)?, get(2)?, get(3)?)?;

    let (ln, text) = lines.next()?;
    let count = header_count(ln, text, "nodes")?;
    let mut nodes = Vec::with_capacity(count);
    for _ in 0..count {
        let (ln, text) = lines.next()?;
        let mut t = text.split_whitespace();
        nodes.push(Node::new(
            field(ln, t.next(), "node id")?,
            field(ln, t.next(), "x")?,
            field(ln, t.next(), "y")?,
        ));
    }
    let (ln, text) = lines.next()?;
    let count = header_count(ln, text, "links")?;
    let mut links = Vec::with_capacity(count);
    for _ in 0..count {
        let (ln, text) = lines.next()?;
        let mut t = text.split_whitespace();
        links.push(Link::new(
            field(ln, t.next(), "link id")?,
            field(ln, t.next(), "sender")?,
            field(ln, t.next(), "receiver")?,
            field(ln, t.next(), "rate")?,
        ));
    }
    if let Some((ln, _)) = lines.rest() {
        return Err(parse_err(ln, "trailing content"));
    }
    NetworkInstance::new(nodes, links, radio)
}

pub fn format_schedule(schedule: &Schedule) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{SCHEDULE_MAGIC}");
    let _ = writeln!(out, "frame {}", schedule.frame_length());
    for (t, slot) in schedule.slots().iter().enumerate() {
        let _ = write!(out, "slot {t}:");
        for l in slot {
            let _ = write!(out, " {l}");
        }
        out.push('\n');
    }
    out
}

pub fn parse_schedule(text: &str) -> Result<Schedule> {
    let mut lines = Lines::new(text);
    let (ln, magic) = lines.next()?;
    if magic != SCHEDULE_MAGIC {
        return Err(parse_err(ln, format!("expected `{SCHEDULE_MAGIC}`")));
    }
    let (ln, text) = lines.next()?;
    let frame = header_count(ln, text, "frame")?;
    if frame == 0 {
        return Err(parse_err(ln, "frame must be >= 1"));
    }
    let mut slots: Vec<Option<BTreeSet<usize>>> = vec![None; frame];
    while let Some((ln, text)) = lines.rest() {
        let (head, body) = text
            .split_once(':')
            .ok_or_else(|| parse_err(ln, "expected `slot <t>: ...`"))?;
        let mut h = head.split_whitespace();
        if h.next() != Some("slot") {
            return Err(parse_err(ln, "expected `slot <t>: ...`"));
        }
        let t: usize = field(ln, h.next(), "slot index")?;
        if t >= frame {
            return Err(parse_err(ln, format!("slot {t} outside frame of {frame}")));
        }
        if slots[t].is_some() {
            return Err(parse_err(ln, format!("slot {t} listed twice")));
        }
        let links = body
            .split_whitespace()
            .map(|tok| field(ln, Some(tok), "link id"))
            .collect::<Result<BTreeSet<usize>>>()?;
        slots[t] = Some(links);
    }
    Schedule::from_slots(slots.into_iter().map(Option::unwrap_or_default).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distributed::compute_diversity;
    use crate::fixtures;
    use proptest::prelude::*;

    #[test]
    fn single_pair() {
        let cfg = ScenarioConfig {
            pairs: 1,
            ..Default::default()
        };
        let inst = generate_scenario(&cfg, 4).unwrap();
        assert_eq!(inst.num_links(), 1);
        assert!(inst.link_length(0) <= 1.0);
    }

    #[test]
    fn generation_is_deterministic() {
        let cfg = ScenarioConfig {
            pairs: 30,
            ..Default::default()
        };
        let a = format_scenario(&generate_scenario(&cfg, 77).unwrap());
        let b = format_scenario(&generate_scenario(&cfg, 77).unwrap());
        assert_eq!(a, b);
        assert_ne!(a, format_scenario(&generate_scenario(&cfg, 78).unwrap()));
    }

    #[test]
    fn thirty_pairs_validate() {
        let cfg = ScenarioConfig {
            pairs: 30,
            node_count: Some(70),
            ..Default::default()
        };
        let inst = generate_scenario(&cfg, 1).unwrap();
        assert_eq!(inst.nodes().len(), 70);
        let mut receivers = BTreeSet::new();
        for l in inst.links() {
            assert!(inst.link_length(l.id) <= 1.0);
            assert!(receivers.insert(l.receiver));
            assert!(inst.links().iter().all(|o| o.sender != l.receiver));
        }
        for n in inst.nodes() {
            assert!((0.0..=100.0).contains(&n.x) && (0.0..=100.0).contains(&n.y));
        }
    }

    #[test]
    fn config_validation() {
        let bad = ScenarioConfig {
            pairs: 6,
            node_count: Some(10),
            ..Default::default()
        };
        assert!(generate_scenario(&bad, 1).is_err());
        let bad = ScenarioConfig {
            area_side: 0.0,
            ..Default::default()
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn crowded_area_fails_placement() {
        let cfg = ScenarioConfig {
            area_side: 1e-7,
            pairs: 2,
            ..Default::default()
        };
        assert!(matches!(
            generate_scenario(&cfg, 1),
            Err(Error::Placement(_))
        ));
    }

    #[test]
    fn diversity_is_controlled() {
        for k in 0..3 {
            for seed in 0..20 {
                let cfg = ScenarioConfig {
                    area_side: 10.0,
                    pairs: 6,
                    ..Default::default()
                };
                let inst = generate_with_diversity(&cfg, k, seed).unwrap();
                assert_eq!(compute_diversity(&inst), k);
                assert!((0..inst.num_links()).all(|l| inst.link_length(l) < 1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn accumulation_fixture_file_matches() {
        let text = include_str!("../fixtures/accumulation_ring.scn");
        assert_eq!(parse_scenario(text).unwrap(), fixtures::accumulation_ring());
        assert_eq!(format_scenario(&fixtures::accumulation_ring()), text);
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        let text = "linksched-scenario v1\nradio alpha=4 beta=10 noise=0 tx_power=1\nnodes 2\n0 0 0\n1 x 0\n";
        match parse_scenario(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("{other:?}"),
        }
        assert!(parse_scenario("nope").is_err());
        assert!(parse_schedule("linksched-schedule v1\nframe 2\nslot 2: 0\n").is_err());
        assert!(parse_schedule("linksched-schedule v1\nframe 2\nslot 0: 0\nslot 0: 1\n").is_err());
    }

    #[test]
    fn schedule_text_omitted_slots_are_empty() {
        let s = parse_schedule("linksched-schedule v1\nframe 3\nslot 1: 4 2\n").unwrap();
        assert_eq!(s.frame_length(), 3);
        assert!(s.slot(0).is_empty());
        assert_eq!(s.slot(1).iter().copied().collect::<Vec<_>>(), vec![2, 4]);
    }

    proptest! {
        #[test]
        fn scenario_round_trip(seed in any::<u64>(), pairs in 1usize..12) {
            let cfg = ScenarioConfig { pairs, area_side: 20.0, ..Default::default() };
            let inst = generate_scenario(&cfg, seed).unwrap();
            prop_assert_eq!(parse_scenario(&format_scenario(&inst)).unwrap(), inst);
        }

        #[test]
        fn schedule_round_trip(slots in proptest::collection::vec(proptest::collection::btree_set(0usize..50, 0..6), 1..8)) {
            let s = Schedule::from_slots(slots).unwrap();
            prop_assert_eq!(parse_schedule(&format_schedule(&s)).unwrap(), s);
        }
    }
}
