//! Small hand-built instances with known answers.

use std::f64::consts::PI;

use crate::radio::{Link, NetworkInstance, Node, RadioParams};

fn build(nodes: &[(f64, f64)], links: &[(usize, usize)], radio: RadioParams) -> NetworkInstance {
    let nodes = nodes
        .iter()
        .enumerate()
        .map(|(i, &(x, y))| Node::new(i, x, y))
        .collect();
    let links = links
        .iter()
        .enumerate()
        .map(|(i, &(s, r))| Link::new(i, s, r, 1.0))
        .collect();
    NetworkInstance::new(nodes, links, radio).expect("fixture is valid")
}

/// One unit-length link under the standard radio parameters.
pub fn single_link() -> NetworkInstance {
    build(
        &[(0.0, 0.0), (1.0, 0.0)],
        &[(0, 1)],
        RadioParams::standard(),
    )
}

/// Two unit links whose receivers face each other with senders 3 apart:
/// `s0(0,0)->r0(1,0)`, `s1(3,0)->r1(2,0)`. With P = 1 and N = 0 each side
/// sees SINR = 16.
pub fn sinr16_pair(beta: f64) -> NetworkInstance {
    let radio = RadioParams::new(4.0, beta, 0.0, 1.0).expect("valid radio");
    build(
        &[(0.0, 0.0), (1.0, 0.0), (3.0, 0.0), (2.0, 0.0)],
        &[(0, 1), (2, 3)],
        radio,
    )
}

/// Two parallel unit links half a unit apart; neither survives the other.
pub fn conflicting_pair() -> NetworkInstance {
    build(
        &[(0.0, 0.0), (1.0, 0.0), (0.0, 0.5), (1.0, 0.5)],
        &[(0, 1), (2, 3)],
        RadioParams::standard(),
    )
}

/// Two unit links 50 units apart.
pub fn non_interfering_pair() -> NetworkInstance {
    build(
        &[(0.0, 0.0), (1.0, 0.0), (50.0, 0.0), (51.0, 0.0)],
        &[(0, 1), (2, 3)],
        RadioParams::standard(),
    )
}

/// Link 0 receives at the origin from one unit away while six outer links
/// have their senders on a ring of radius 2.6 around that receiver, pointing
/// outwards. Every pairwise SINR clears 10 dB and every sender sits just
/// outside the 2.5 interference range of every foreign receiver, but the six
/// outer senders together push the SINR at the origin to about 7.6.
pub fn accumulation_ring() -> NetworkInstance {
    let mut nodes = vec![(0.0, -1.0), (0.0, 0.0)];
    let mut links = vec![(0, 1)];
    for k in 0..6 {
        let angle = PI / 6.0 + k as f64 * PI / 3.0;
        let (s, c) = angle.sin_cos();
        let sender = nodes.len();
        nodes.push((2.6 * c, 2.6 * s));
        nodes.push((3.6 * c, 3.6 * s));
        links.push((sender, sender + 1));
    }
    build(&nodes, &links, RadioParams::standard())
}
