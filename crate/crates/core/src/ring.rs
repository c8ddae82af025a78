//! Ring topology, whiteboards, agent placement, and configurations.
//!
//! The ring has `n` anonymous nodes `0..n`, each holding a [`Whiteboard`].
//! Link `i` connects node `i` to node `(i + 1) % n`; direction `+1` is
//! forward (toward higher indices), `-1` is backward. Agents carry globally
//! unique [`AgentId`]s and a per-protocol program state; the engine keeps a
//! registry of the agents present at every node so that co-located agents
//! can rank themselves by identifier.

use serde::{Deserialize, Serialize};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

use crate::protocols::Pc;

/// Globally unique agent identifier.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize, Default,
)]
#[serde(transparent)]
pub struct AgentId(pub u64);

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

/// Movement direction: `+1` forward, `-1` backward, `0` stay.
pub type Dir = i8;

// ---------------------------------------------------------------------------
// Topology
// ---------------------------------------------------------------------------

/// An `n`-node ring. Pure index arithmetic; no mutable state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RingTopology {
    n: usize,
}

impl RingTopology {
    pub fn new(n: usize) -> Self {
        assert!(n >= 3, "ring needs at least 3 nodes");
        RingTopology { n }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Node reached from `v` going forward.
    pub fn forward(&self, v: usize) -> usize {
        (v + 1) % self.n
    }

    /// Node reached from `v` going backward.
    pub fn backward(&self, v: usize) -> usize {
        (v + self.n - 1) % self.n
    }

    /// Node reached from `v` moving in `dir` (`0` stays put).
    pub fn step(&self, v: usize, dir: Dir) -> usize {
        match dir {
            1 => self.forward(v),
            -1 => self.backward(v),
            0 => v,
            other => panic!("invalid direction {other}"),
        }
    }

    /// Link crossed when moving from `v` in `dir`. Link `i` joins `i` and
    /// `i + 1 (mod n)`, so the forward link of `v` is `v` itself and the
    /// backward link is `v - 1 (mod n)`.
    pub fn link_toward(&self, v: usize, dir: Dir) -> usize {
        match dir {
            1 => v,
            -1 => (v + self.n - 1) % self.n,
            other => panic!("no link for direction {other}"),
        }
    }

    /// Forward distance from `u` to `v` (number of forward steps).
    pub fn forward_distance(&self, u: usize, v: usize) -> usize {
        (v + self.n - u) % self.n
    }
}

// ---------------------------------------------------------------------------
// Whiteboards
// ---------------------------------------------------------------------------

/// Per-node whiteboard. Every field is writable by visiting agents except
/// `registry`, which the engine maintains: it always holds exactly the
/// agents currently located at the node (terminated ones included).
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Whiteboard {
    /// Identifier stamped by the first visiting agent, if any.
    pub id: Option<AgentId>,
    /// Direction hint left for agents waiting at this node.
    pub dir: Dir,
    /// Set when a group below target size parks here to be collected.
    pub waiting: bool,
    /// Trail mark of the forward-moving collection group.
    pub f_marked: bool,
    /// Trail mark of the backward-moving collection group.
    pub b_marked: bool,
    /// Set when this node hosts (or must act as) a candidate meeting point.
    pub candi: bool,
    /// Agents currently at this node, maintained by the engine.
    pub registry: BTreeSet<AgentId>,
}

impl Whiteboard {
    /// Number of agents currently at the node.
    pub fn n_agents(&self) -> usize {
        self.registry.len()
    }

    /// 1-based rank of `id` in the ascending registry order; 0 if absent.
    pub fn rank_of(&self, id: AgentId) -> u32 {
        match self.registry.iter().position(|&a| a == id) {
            Some(i) => i as u32 + 1,
            None => 0,
        }
    }
}

/// A single whiteboard field update, recorded in traces in the order the
/// protocol issued it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "field", content = "value", rename_all = "snake_case")]
pub enum BoardWrite {
    Id(AgentId),
    Dir(Dir),
    Waiting(bool),
    FMarked(bool),
    BMarked(bool),
    Candi(bool),
}

impl BoardWrite {
    /// Apply this write to a live board.
    pub fn apply(&self, board: &mut Whiteboard) {
        match *self {
            BoardWrite::Id(id) => board.id = Some(id),
            BoardWrite::Dir(d) => board.dir = d,
            BoardWrite::Waiting(w) => board.waiting = w,
            BoardWrite::FMarked(m) => board.f_marked = m,
            BoardWrite::BMarked(m) => board.b_marked = m,
            BoardWrite::Candi(c) => board.candi = c,
        }
    }
}

/// Ordered whiteboard writes produced by one atomic action at one node.
pub type BoardWrites = Vec<BoardWrite>;

// ---------------------------------------------------------------------------
// Agents
// ---------------------------------------------------------------------------

/// Mutable per-agent protocol state. Field names follow the whiteboard
/// convention: counters the protocols consult each round plus the program
/// counter describing which phase and leg the agent is in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgentState {
    pub id: AgentId,
    /// Round counter inside the current leg, starting at 1.
    pub rounds: u32,
    /// Identifiers observed so far (duplicates intentionally kept: the
    /// counters below track observations, not distinct values).
    pub ids: Vec<AgentId>,
    /// Observation count; equals `ids.len()` in phases that append to `ids`
    /// and counts id-bearing arrivals in phases that only count.
    pub n_ids: u32,
    /// Number of arrivals so far (a full lap pushes this to `n` or beyond).
    pub n_visited: u32,
    /// 1-based rank among co-located agents, recomputed at phase boundaries.
    pub rank: u32,
    /// Current movement direction.
    pub dir: Dir,
    /// Program counter: phase, leg, and per-phase scratch data.
    pub pc: Pc,
    pub terminated: bool,
}

impl AgentState {
    pub fn new(id: AgentId) -> Self {
        AgentState {
            id,
            rounds: 1,
            ids: Vec::new(),
            n_ids: 0,
            n_visited: 0,
            rank: 0,
            dir: 0,
            pc: Pc::Init,
            terminated: false,
        }
    }
}

/// An agent together with its current node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Agent {
    pub state: AgentState,
    pub pos: usize,
}

// ---------------------------------------------------------------------------
// Configurations
// ---------------------------------------------------------------------------

/// Complete system state between rounds: topology, all whiteboards, all
/// agents, the global round counter, and the link removed in the most
/// recently executed round (`None` before the first round or when the
/// adversary left the ring intact).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Configuration {
    pub round: u64,
    pub topology: RingTopology,
    pub boards: Vec<Whiteboard>,
    pub agents: Vec<Agent>,
    pub missing: Option<usize>,
}

impl Configuration {
    /// Agents at `node`, counted from positions (equals the registry).
    pub fn count_at(&self, node: usize) -> usize {
        self.agents.iter().filter(|a| a.pos == node).count()
    }

    /// Nodes currently holding at least one agent, ascending.
    pub fn occupied_nodes(&self) -> Vec<usize> {
        let mut nodes: Vec<usize> = self.agents.iter().map(|a| a.pos).collect();
        nodes.sort_unstable();
        nodes.dedup();
        nodes
    }

    pub fn all_terminated(&self) -> bool {
        self.agents.iter().all(|a| a.state.terminated)
    }
}

/// Rejected initial placements.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("no agents placed")]
    NoAgents,
    #[error("{k} agents exceed {n} nodes")]
    TooManyAgents { k: usize, n: usize },
    #[error("ring of {0} nodes is too small (minimum 3)")]
    RingTooSmall(usize),
    #[error("node {0} is out of range")]
    NodeOutOfRange(usize),
    #[error("agents {0} and {1} share node {2}")]
    DuplicatePlacement(AgentId, AgentId, usize),
    #[error("duplicate agent id {0}")]
    DuplicateId(AgentId),
}

/// Build the round-0 configuration from explicit `(id, node)` placements.
///
/// Agents must carry distinct identifiers and occupy distinct nodes.
/// Whiteboards start blank; each occupied node's registry holds exactly its
/// starting agent.
pub fn init_configuration(
    n: usize,
    placements: &[(AgentId, usize)],
) -> Result<Configuration, ConfigError> {
    if n < 3 {
        return Err(ConfigError::RingTooSmall(n));
    }
    if placements.is_empty() {
        return Err(ConfigError::NoAgents);
    }
    if placements.len() > n {
        return Err(ConfigError::TooManyAgents {
            k: placements.len(),
            n,
        });
    }

    let mut boards = vec![Whiteboard::default(); n];
    let mut by_node: Vec<Option<AgentId>> = vec![None; n];
    let mut ids = BTreeSet::new();
    let mut agents = Vec::with_capacity(placements.len());

    for &(id, node) in placements {
        if node >= n {
            return Err(ConfigError::NodeOutOfRange(node));
        }
        if !ids.insert(id) {
            return Err(ConfigError::DuplicateId(id));
        }
        if let Some(prev) = by_node[node] {
            return Err(ConfigError::DuplicatePlacement(prev, id, node));
        }
        by_node[node] = Some(id);
        boards[node].registry.insert(id);
        agents.push(Agent {
            state: AgentState::new(id),
            pos: node,
        });
    }

    Ok(Configuration {
        round: 0,
        topology: RingTopology::new(n),
        boards,
        agents,
        missing: None,
    })
}

// ---------------------------------------------------------------------------
// Placement presets
// ---------------------------------------------------------------------------

/// Initial placement patterns used by the sweep tooling and tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Placement {
    /// Agent `i` at node `i * (n / k)`: as evenly spread as integer spacing
    /// allows.
    Equidistant,
    /// One agent at node 0, the rest packed consecutively before it.
    Clustered,
    /// `k` distinct nodes drawn with a seeded generator, assigned in ring
    /// order.
    Random { seed: u64 },
}

impl Placement {
    /// Positions for `k` agents on an `n`-ring. Always distinct.
    pub fn positions(&self, n: usize, k: usize) -> Vec<usize> {
        assert!(k >= 1 && k <= n, "need 1..=n agents");
        match *self {
            Placement::Equidistant => {
                let gap = n / k;
                (0..k).map(|i| i * gap).collect()
            }
            Placement::Clustered => {
                let mut pos = vec![0];
                pos.extend((n - k + 1)..n);
                pos
            }
            Placement::Random { seed } => {
                use rand::seq::SliceRandom;
                use rand::SeedableRng;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let mut nodes: Vec<usize> = (0..n).collect();
                nodes.shuffle(&mut rng);
                let mut pos: Vec<usize> = nodes.into_iter().take(k).collect();
                pos.sort_unstable();
                pos
            }
        }
    }

    /// Placements pairing ids `0..k` with [`Self::positions`].
    pub fn placements(&self, n: usize, k: usize) -> Vec<(AgentId, usize)> {
        self.positions(n, k)
            .into_iter()
            .enumerate()
            .map(|(i, v)| (AgentId(i as u64), v))
            .collect()
    }
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_arithmetic_wraps() {
        let ring = RingTopology::new(8);
        assert_eq!(ring.forward(7), 0);
        assert_eq!(ring.backward(0), 7);
        assert_eq!(ring.step(3, 1), 4);
        assert_eq!(ring.step(3, -1), 2);
        assert_eq!(ring.step(3, 0), 3);
        assert_eq!(ring.link_toward(3, 1), 3);
        assert_eq!(ring.link_toward(3, -1), 2);
        assert_eq!(ring.link_toward(0, -1), 7);
        assert_eq!(ring.forward_distance(6, 2), 4);
        assert_eq!(ring.forward_distance(2, 2), 0);
    }

    #[test]
    fn init_builds_registries() {
        let placements = [(AgentId(3), 0), (AgentId(1), 4), (AgentId(2), 7)];
        let config = init_configuration(8, &placements).unwrap();
        assert_eq!(config.round, 0);
        assert_eq!(config.boards.len(), 8);
        assert_eq!(config.boards[4].registry.len(), 1);
        assert!(config.boards[4].registry.contains(&AgentId(1)));
        assert_eq!(config.boards[1].n_agents(), 0);
        assert_eq!(config.count_at(7), 1);
        assert_eq!(config.occupied_nodes(), vec![0, 4, 7]);
        for agent in &config.agents {
            assert_eq!(agent.state.rounds, 1);
            assert_eq!(agent.state.n_ids, 0);
            assert!(!agent.state.terminated);
        }
    }

    #[test]
    fn init_rejects_bad_input() {
        let dup_node = [(AgentId(0), 2), (AgentId(1), 2)];
        assert_eq!(
            init_configuration(8, &dup_node),
            Err(ConfigError::DuplicatePlacement(AgentId(0), AgentId(1), 2))
        );

        let dup_id = [(AgentId(5), 1), (AgentId(5), 2)];
        assert_eq!(
            init_configuration(8, &dup_id),
            Err(ConfigError::DuplicateId(AgentId(5)))
        );

        assert_eq!(init_configuration(8, &[]), Err(ConfigError::NoAgents));

        let crowded: Vec<_> = (0..5).map(|i| (AgentId(i), i as usize % 4)).collect();
        assert_eq!(
            init_configuration(4, &crowded),
            Err(ConfigError::TooManyAgents { k: 5, n: 4 })
        );

        let out = [(AgentId(0), 9)];
        assert_eq!(
            init_configuration(8, &out),
            Err(ConfigError::NodeOutOfRange(9))
        );

        assert_eq!(
            init_configuration(2, &[(AgentId(0), 0)]),
            Err(ConfigError::RingTooSmall(2))
        );
    }

    #[test]
    fn rank_is_one_based_ascending() {
        let mut board = Whiteboard::default();
        for id in [4, 7, 9] {
            board.registry.insert(AgentId(id));
        }
        assert_eq!(board.rank_of(AgentId(4)), 1);
        assert_eq!(board.rank_of(AgentId(7)), 2);
        assert_eq!(board.rank_of(AgentId(9)), 3);
        assert_eq!(board.rank_of(AgentId(2)), 0);
    }

    #[test]
    fn placements_are_distinct() {
        for n in [8usize, 12, 16, 24, 32] {
            for k in 1..=n.min(20) {
                for placement in [
                    Placement::Equidistant,
                    Placement::Clustered,
                    Placement::Random { seed: 42 },
                ] {
                    let pos = placement.positions(n, k);
                    assert_eq!(pos.len(), k);
                    let mut sorted = pos.clone();
                    sorted.sort_unstable();
                    sorted.dedup();
                    assert_eq!(sorted.len(), k, "{placement:?} n={n} k={k}");
                    assert!(pos.iter().all(|&v| v < n));
                }
            }
        }
    }

    #[test]
    fn clustered_is_one_plus_block() {
        assert_eq!(Placement::Clustered.positions(8, 4), vec![0, 5, 6, 7]);
        assert_eq!(Placement::Equidistant.positions(8, 4), vec![0, 2, 4, 6]);
    }
}
