//! Geometry, path loss and SINR arithmetic.
//!
//! Every power quantity inside the crate is linear (milliwatts for the
//! defaults); dB and dBm only show up at configuration boundaries.

use serde::Serialize;

use crate::error::{domain, Error, Result};

/// Closest allowed distance between two distinct nodes.
pub const D_FLOOR: f64 = 1e-6;

/// SNR margin of an isolated unit-length link over the SINR threshold.
pub const DEFAULT_POWER_MARGIN: f64 = 100.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Node {
    pub id: usize,
    pub x: f64,
    pub y: f64,
}

impl Node {
    pub fn new(id: usize, x: f64, y: f64) -> Self {
        Node { id, x, y }
    }

    pub fn distance(&self, other: &Node) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// A directed link `sender -> receiver` carrying `rate` traffic units per slot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Link {
    pub id: usize,
    pub sender: usize,
    pub receiver: usize,
    pub rate: f64,
}

impl Link {
    pub fn new(id: usize, sender: usize, receiver: usize, rate: f64) -> Self {
        Link {
            id,
            sender,
            receiver,
            rate,
        }
    }

    /// True if the two links have any endpoint in common.
    pub fn shares_node(&self, other: &Link) -> bool {
        self.sender == other.sender
            || self.sender == other.receiver
            || self.receiver == other.sender
            || self.receiver == other.receiver
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadioParams {
    /// Path-loss exponent.
    pub alpha: f64,
    /// SINR threshold, linear.
    pub beta: f64,
    /// Ambient noise power, linear.
    pub noise: f64,
    /// Transmit power shared by every node, linear.
    pub tx_power: f64,
}

impl RadioParams {
    pub fn new(alpha: f64, beta: f64, noise: f64, tx_power: f64) -> Result<Self> {
        let params = RadioParams {
            alpha,
            beta,
            noise,
            tx_power,
        };
        params.validate()?;
        Ok(params)
    }

    /// Picks `tx_power` so that a unit-length link with no interference sees
    /// an SNR of `DEFAULT_POWER_MARGIN * beta`.
    pub fn with_default_power(alpha: f64, beta: f64, noise: f64) -> Result<Self> {
        Self::new(alpha, beta, noise, DEFAULT_POWER_MARGIN * beta * noise)
    }

    /// Threshold in dB and noise in dBm; power follows `with_default_power`.
    pub fn from_db(alpha: f64, beta_db: f64, noise_dbm: f64) -> Result<Self> {
        Self::with_default_power(alpha, db_to_linear(beta_db), db_to_linear(noise_dbm))
    }

    /// alpha = 4, beta = 10 dB, N = -90 dBm.
    pub fn standard() -> Self {
        Self::from_db(4.0, 10.0, -90.0).expect("standard radio parameters are valid")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 2.0) {
            return Err(domain(format!("alpha must be > 2, got {}", self.alpha)));
        }
        if !(self.beta.is_finite() && self.beta >= 1.0) {
            return Err(domain(format!("beta must be >= 1, got {}", self.beta)));
        }
        if !(self.noise.is_finite() && self.noise >= 0.0) {
            return Err(domain(format!("noise must be >= 0, got {}", self.noise)));
        }
        if !(self.tx_power.is_finite() && self.tx_power > 0.0) {
            return Err(domain(format!(
                "tx_power must be > 0, got {}",
                self.tx_power
            )));
        }
        Ok(())
    }
}

pub fn db_to_linear(db_value: f64) -> f64 {
    10f64.powf(db_value / 10.0)
}

pub fn linear_to_db(linear_value: f64) -> Result<f64> {
    if !(linear_value > 0.0) {
        return Err(domain(format!(
            "linear_to_db needs a positive input, got {linear_value}"
        )));
    }
    Ok(10.0 * linear_value.log10())
}

/// Path gain `d^-alpha`.
pub fn gain_at_distance(distance: f64, alpha: f64) -> Result<f64> {
    if !(distance >= D_FLOOR) {
        return Err(domain(format!(
            "distance {distance} is below the singularity floor {D_FLOOR}"
        )));
    }
    Ok(distance.powf(-alpha))
}

/// Nodes, directed links and radio parameters, validated on construction.
///
/// Node ids and link ids are dense: `nodes[i].id == i` and `links[i].id == i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NetworkInstance {
    nodes: Vec<Node>,
    links: Vec<Link>,
    radio: RadioParams,
}

impl NetworkInstance {
    pub fn new(nodes: Vec<Node>, links: Vec<Link>, radio: RadioParams) -> Result<Self> {
        radio.validate()?;
        let invalid = |msg: String| Err(Error::InvalidInstance(msg));
        for (i, node) in nodes.iter().enumerate() {
            if node.id != i {
                return invalid(format!("node at position {i} has id {}", node.id));
            }
            if !(node.x.is_finite() && node.y.is_finite()) {
                return invalid(format!("node {i} has non-finite coordinates"));
            }
        }
        for (i, a) in nodes.iter().enumerate() {
            for b in &nodes[i + 1..] {
                if a.distance(b) < D_FLOOR {
                    return invalid(format!("nodes {} and {} coincide", a.id, b.id));
                }
            }
        }
        if links.is_empty() {
            return invalid("instance has no links".into());
        }
        for (i, link) in links.iter().enumerate() {
            if link.id != i {
                return invalid(format!("link at position {i} has id {}", link.id));
            }
            if link.sender >= nodes.len() || link.receiver >= nodes.len() {
                return invalid(format!("link {i} references an unknown node"));
            }
            if link.sender == link.receiver {
                return invalid(format!("link {i} is a self loop"));
            }
            if !(link.rate.is_finite() && link.rate > 0.0) {
                return invalid(format!("link {i} has non-positive rate {}", link.rate));
            }
        }
        Ok(NetworkInstance {
            nodes,
            links,
            radio,
        })
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn links(&self) -> &[Link] {
        &self.links
    }

    pub fn radio(&self) -> &RadioParams {
        &self.radio
    }

    pub fn num_links(&self) -> usize {
        self.links.len()
    }

    pub fn link(&self, id: usize) -> Result<&Link> {
        self.links
            .get(id)
            .ok_or_else(|| domain(format!("unknown link id {id}")))
    }

    pub fn node(&self, id: usize) -> Result<&Node> {
        self.nodes
            .get(id)
            .ok_or_else(|| domain(format!("unknown node id {id}")))
    }

    /// Same instance with different radio parameters.
    pub fn with_radio(&self, radio: RadioParams) -> Result<Self> {
        Self::new(self.nodes.clone(), self.links.clone(), radio)
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        self.nodes[a].distance(&self.nodes[b])
    }

    pub fn link_length(&self, link: usize) -> f64 {
        let l = &self.links[link];
        self.distance(l.sender, l.receiver)
    }

    pub fn link_gain(&self, from_node: usize, to_node: usize) -> Result<f64> {
        let a = self.node(from_node)?;
        let b = self.node(to_node)?;
        if from_node == to_node {
            return Err(domain(format!("link gain of node {from_node} to itself")));
        }
        gain_at_distance(a.distance(b), self.radio.alpha)
    }

    /// Power from `from_node` seen at `to_node`, or infinity when they are
    /// the same node.
    pub(crate) fn rx_power(&self, from_node: usize, to_node: usize) -> f64 {
        if from_node == to_node {
            return f64::INFINITY;
        }
        let d = self.distance(from_node, to_node);
        self.radio.tx_power * d.powf(-self.radio.alpha)
    }

    /// SINR of `link` while every link in `concurrent` also transmits.
    ///
    /// Interference comes from the sender of each concurrent link, evaluated
    /// at this link's receiver. A concurrent sender sitting on the receiver
    /// itself drives the SINR to zero. Ids in `concurrent` must be distinct.
    pub fn sinr_at_receiver(&self, link: usize, concurrent: &[usize]) -> Result<f64> {
        let target = self.link(link)?;
        let mut interference = 0.0;
        for &other in concurrent {
            if other == link {
                return Err(domain(format!(
                    "link {link} listed in its own concurrent set"
                )));
            }
            let sender = self.link(other)?.sender;
            interference += self.rx_power(sender, target.receiver);
        }
        let signal = self.radio.tx_power * self.link_gain(target.sender, target.receiver)?;
        if interference.is_infinite() {
            return Ok(0.0);
        }
        Ok(signal / (self.radio.noise + interference))
    }
}
