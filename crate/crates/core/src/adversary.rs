//! Link-removal adversaries.
//!
//! The dynamic ring stays 1-interval connected: at most one link is missing
//! per round. An adversary is a pure function of its own specification and
//! the round-start configuration, so runs are reproducible byte for byte.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::exec::round_rng;
use crate::ring::Configuration;

/// Strategy for picking the missing link each round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AdversarySpec {
    /// Every link present, every round.
    NoneMissing,
    /// The same link missing every round.
    FixedLink { link: usize },
    /// Independent per-round choice: with probability `p_none` no link is
    /// removed, otherwise a uniformly random link is. Pure in (seed, round).
    RandomUniform { seed: u64, p_none: f64 },
    /// Explicit per-round schedule, indexed by round; exhausted entries mean
    /// no link is missing.
    Scripted { script: Vec<Option<usize>> },
    /// Config-inspecting strategies that target the current occupancy.
    Adaptive { policy: AdaptivePolicy },
}

/// Occupancy-driven blocking policies. Ties always resolve to the lowest
/// node index, keeping the choice deterministic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdaptivePolicy {
    /// Remove the forward link of the most crowded node.
    BlockFrontOfLargest,
    /// Remove the forward link of the least crowded occupied node.
    IsolateSmallest,
    /// Remove the link between the two most crowded nodes when they are
    /// adjacent; otherwise fall back to blocking the largest pile's front.
    SplitMajority,
}

impl AdversarySpec {
    /// Compact stable label used in metrics output.
    pub fn label(&self) -> String {
        match self {
            AdversarySpec::NoneMissing => "none".into(),
            AdversarySpec::FixedLink { link } => format!("fixed:{link}"),
            AdversarySpec::RandomUniform { seed, p_none } => {
                format!("random:{seed}:{p_none}")
            }
            AdversarySpec::Scripted { script } => format!("scripted:{}", script.len()),
            AdversarySpec::Adaptive { policy } => {
                let name = match policy {
                    AdaptivePolicy::BlockFrontOfLargest => "block_front_of_largest",
                    AdaptivePolicy::IsolateSmallest => "isolate_smallest",
                    AdaptivePolicy::SplitMajority => "split_majority",
                };
                format!("adaptive:{name}")
            }
        }
    }
}

/// Pick the link missing for the round that starts from `config`.
///
/// Returns `None` when every link is present. Any returned index is a valid
/// link id (`0..n`, where link `i` joins node `i` to node `i+1 mod n`).
pub fn choose_missing(spec: &AdversarySpec, config: &Configuration) -> Option<usize> {
    let n = config.topology.n();
    match spec {
        AdversarySpec::NoneMissing => None,
        AdversarySpec::FixedLink { link } => Some(link % n),
        AdversarySpec::RandomUniform { seed, p_none } => {
            let mut rng = round_rng(*seed, config.round);
            if rng.gen::<f64>() < *p_none {
                None
            } else {
                Some(rng.gen_range(0..n))
            }
        }
        AdversarySpec::Scripted { script } => script
            .get(config.round as usize)
            .copied()
            .flatten()
            .map(|link| link % n),
        AdversarySpec::Adaptive { policy } => adaptive_choice(*policy, config),
    }
}

fn adaptive_choice(policy: AdaptivePolicy, config: &Configuration) -> Option<usize> {
    let n = config.topology.n();
    let counts: Vec<usize> = (0..n).map(|v| config.count_at(v)).collect();
    let largest = (0..n).max_by_key(|&v| (counts[v], std::cmp::Reverse(v)))?;
    match policy {
        AdaptivePolicy::BlockFrontOfLargest => Some(largest),
        AdaptivePolicy::IsolateSmallest => {
            let smallest = (0..n)
                .filter(|&v| counts[v] > 0)
                .min_by_key(|&v| (counts[v], v))?;
            Some(smallest)
        }
        AdaptivePolicy::SplitMajority => {
            let second = (0..n)
                .filter(|&v| v != largest)
                .max_by_key(|&v| (counts[v], std::cmp::Reverse(v)))?;
            if counts[second] == 0 {
                return Some(largest);
            }
            // Adjacent pairs share exactly one link: min(u, v) unless the
            // pair wraps around the ring.
            let (lo, hi) = (largest.min(second), largest.max(second));
            if hi - lo == 1 {
                Some(lo)
            } else if lo == 0 && hi == n - 1 {
                Some(hi)
            } else {
                Some(largest)
            }
        }
    }
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::{init_configuration, AgentId};

    fn config(n: usize, placements: &[(u64, usize)]) -> Configuration {
        let placements: Vec<_> = placements
            .iter()
            .map(|&(id, pos)| (AgentId(id), pos))
            .collect();
        init_configuration(n, &placements).unwrap()
    }

    #[test]
    fn fixed_link_wraps_into_range() {
        let c = config(8, &[(0, 0)]);
        assert_eq!(
            choose_missing(&AdversarySpec::FixedLink { link: 9 }, &c),
            Some(1)
        );
    }

    #[test]
    fn scripted_indexes_by_round_and_exhausts_to_none() {
        let mut c = config(8, &[(0, 0)]);
        let spec = AdversarySpec::Scripted {
            script: vec![Some(0), None, Some(3)],
        };
        assert_eq!(choose_missing(&spec, &c), Some(0));
        c.round = 1;
        assert_eq!(choose_missing(&spec, &c), None);
        c.round = 2;
        assert_eq!(choose_missing(&spec, &c), Some(3));
        c.round = 3;
        assert_eq!(choose_missing(&spec, &c), None);
    }

    #[test]
    fn random_uniform_is_pure_in_seed_and_round() {
        let mut c = config(16, &[(0, 0)]);
        let spec = AdversarySpec::RandomUniform {
            seed: 7,
            p_none: 0.25,
        };
        let first = choose_missing(&spec, &c);
        assert_eq!(choose_missing(&spec, &c), first);
        c.round = 1;
        let second = choose_missing(&spec, &c);
        c.round = 0;
        assert_eq!(choose_missing(&spec, &c), first);
        if let Some(link) = first.or(second) {
            assert!(link < 16);
        }
    }

    #[test]
    fn random_uniform_p_none_one_never_blocks() {
        let spec = AdversarySpec::RandomUniform {
            seed: 3,
            p_none: 1.0,
        };
        let mut c = config(8, &[(0, 0)]);
        for round in 0..32 {
            c.round = round;
            assert_eq!(choose_missing(&spec, &c), None);
        }
    }

    #[test]
    fn block_front_of_largest_prefers_lowest_index_on_ties() {
        // Two agents at node 2 and two at node 5: tie resolves to node 2.
        let c = config(8, &[(0, 2), (1, 2), (2, 5), (3, 5)]);
        let spec = AdversarySpec::Adaptive {
            policy: AdaptivePolicy::BlockFrontOfLargest,
        };
        assert_eq!(choose_missing(&spec, &c), Some(2));
    }

    #[test]
    fn isolate_smallest_targets_least_crowded_occupied_node() {
        let c = config(8, &[(0, 1), (1, 1), (2, 6)]);
        let spec = AdversarySpec::Adaptive {
            policy: AdaptivePolicy::IsolateSmallest,
        };
        assert_eq!(choose_missing(&spec, &c), Some(6));
    }

    #[test]
    fn split_majority_cuts_between_adjacent_piles() {
        let c = config(8, &[(0, 3), (1, 3), (2, 4), (3, 4), (4, 0)]);
        let spec = AdversarySpec::Adaptive {
            policy: AdaptivePolicy::SplitMajority,
        };
        assert_eq!(choose_missing(&spec, &c), Some(3));
    }

    #[test]
    fn split_majority_handles_ring_wrap() {
        let c = config(8, &[(0, 7), (1, 7), (2, 0), (3, 0)]);
        let spec = AdversarySpec::Adaptive {
            policy: AdaptivePolicy::SplitMajority,
        };
        // Top two piles are nodes 0 and 7; their shared link is link 7.
        assert_eq!(choose_missing(&spec, &c), Some(7));
    }

    #[test]
    fn split_majority_falls_back_when_piles_are_apart() {
        let c = config(8, &[(0, 1), (1, 1), (2, 5)]);
        let spec = AdversarySpec::Adaptive {
            policy: AdaptivePolicy::SplitMajority,
        };
        assert_eq!(choose_missing(&spec, &c), Some(1));
    }
}
