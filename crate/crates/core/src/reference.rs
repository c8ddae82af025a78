//! Reference interpreter: a second, independent implementation of the
//! gathering protocols, written as per-agent resumable scripts (a stack of
//! procedure frames driven round by round) rather than the engine's
//! transition-function architecture. The engine is validated against this
//! interpreter action for action; both must produce identical traces.

use std::collections::BTreeMap;

use crate::adversary::{choose_missing, AdversarySpec};
use crate::exec::{
    activation_sequence, ActivationOrder, AgentTraceStep, ExecutionResult, Outcome, PhaseTag,
    StepLabel, TraceRound, TraceWrite,
};
use crate::protocols::{Pc, Protocol, Variant};
use crate::ring::{Agent, AgentId, AgentState, BoardWrite, Configuration, Dir, Whiteboard};

// ---------------------------------------------------------------------------
// script frames
// ---------------------------------------------------------------------------

/// One procedure on an agent's call stack. Procedures never return values;
/// loops are driven by the agent's leg-round counter, and tail calls replace
/// the top frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Frame {
    /// Full-ring id collection (3n rounds), then elect the minimum.
    Select,
    /// Walk to the elected node (3n rounds), then branch on the pile size.
    GatherWalk,
    /// Uneven-pile split: waiting for the guarded walk to finish, then
    /// re-orient into the two-leg search.
    More,
    /// Undersized pile: flag the node and wait out the leg.
    Less,
    /// Guarded walk: n rounds in the agent's direction, halting on flagged
    /// nodes.
    MovingLeg,
    /// Two-leg search that follows a split walk; `second` marks the
    /// reversed leg.
    Latter { second: bool },
    /// Budgeted trail-marking sweep (group members carry the roster).
    Sweep,
    /// Undersized pile during a sweep: flag the node, join a passing group
    /// or terminate by the published cutoff.
    SweepWait,
    /// Bounded id collection with the window rule (3n rounds).
    SemiSelect,
    /// Walk toward flagged candidate nodes (3n rounds), then branch.
    SemiGather,
}

/// Interpreter-side agent: the whiteboard-model variables plus the script
/// stack.
#[derive(Debug, Clone)]
struct RefAgent {
    id: AgentId,
    pos: usize,
    rounds: u32,
    ids: Vec<AgentId>,
    n_ids: u32,
    n_visited: u32,
    rank: u32,
    dir: Dir,
    carried: Vec<AgentId>,
    min: Option<AgentId>,
    iter: u32,
    just_arrived: bool,
    terminated: bool,
    frames: Vec<Frame>,
}

impl RefAgent {
    fn new(id: AgentId, pos: usize, variant: Variant) -> Self {
        let entry = match variant {
            Variant::SelectSplit | Variant::SelectSweep => Frame::Select,
            Variant::WindowedSweep => Frame::SemiSelect,
        };
        RefAgent {
            id,
            pos,
            rounds: 1,
            ids: Vec::new(),
            n_ids: 0,
            n_visited: 0,
            rank: 0,
            dir: 0,
            carried: Vec::new(),
            min: None,
            iter: 0,
            just_arrived: false,
            terminated: false,
            frames: vec![entry],
        }
    }

    fn top(&self) -> Frame {
        *self.frames.last().expect("script stack never empties")
    }

    fn replace_top(&mut self, f: Frame) {
        *self.frames.last_mut().expect("script stack never empties") = f;
    }
}

// ---------------------------------------------------------------------------
// per-round action
// ---------------------------------------------------------------------------

/// 1-based position of `id` in the ascending list `ids`, 0 when absent.
fn rank_in(ids: &[AgentId], id: AgentId) -> u32 {
    match ids.binary_search(&id) {
        Ok(i) => i as u32 + 1,
        Err(_) => 0,
    }
}

fn mark_write(dir: Dir) -> BoardWrite {
    if dir > 0 {
        BoardWrite::FMarked(true)
    } else {
        BoardWrite::BMarked(true)
    }
}

fn mark_seen(board: &Whiteboard, dir: Dir) -> bool {
    if dir > 0 {
        board.f_marked
    } else {
        board.b_marked
    }
}

fn opposite_mark(board: &Whiteboard, dir: Dir) -> bool {
    if dir > 0 {
        board.b_marked
    } else {
        board.f_marked
    }
}

/// True when the pile can stop: it holds at least g agents and the agents
/// elsewhere either also number at least g or do not exist at all.
fn split_terminal(m: usize, k: usize, g: usize) -> bool {
    m >= g && (k - m >= g || k - m == 0)
}

/// The strict-window electorate rule: the id stored at index 4g−2 must be
/// strictly smaller than every other id among the first 8g−3 collected.
fn window_min(ids: &[AgentId], g: usize) -> bool {
    let w = 8 * g - 3;
    let at = 4 * g - 2;
    if ids.len() < w {
        return false;
    }
    let pivot = ids[at];
    ids[..w]
        .iter()
        .enumerate()
        .all(|(h, &x)| h == at || pivot < x)
}

/// Entry into the split walk: compute the rank, assign a direction, clear a
/// stale node flag, and start the guarded walk.
fn enter_more(a: &mut RefAgent, snap: &Whiteboard, g: usize, iter: u32, writes: &mut Vec<BoardWrite>) {
    a.iter = iter;
    a.rounds = 1;
    if snap.waiting {
        writes.push(BoardWrite::Waiting(false));
    }
    let reg: Vec<AgentId> = snap.registry.iter().copied().collect();
    let rank = rank_in(&reg, a.id) as usize;
    a.rank = rank as u32;
    let c = reg.len() - g;
    a.dir = if rank <= g {
        0
    } else if rank <= g + c / 2 {
        1
    } else {
        -1
    };
    a.replace_top(Frame::More);
    a.frames.push(Frame::MovingLeg);
}

fn enter_less(a: &mut RefAgent, iter: u32) {
    a.iter = iter;
    a.rounds = 1;
    a.replace_top(Frame::Less);
}

/// Entry into the budgeted sweep from an oversized pile: the g lowest ids
/// sweep forward, the next block sweeps backward, any surplus beyond 2g of
/// a ≥ 3g pile stays put and terminates.
fn enter_sweep_group(a: &mut RefAgent, snap: &Whiteboard, g: usize) {
    a.rounds = 1;
    let reg: Vec<AgentId> = snap.registry.iter().copied().collect();
    let m = reg.len();
    let rank = rank_in(&reg, a.id) as usize;
    a.rank = rank as u32;
    if rank <= g {
        a.dir = 1;
        a.carried = reg[..g].to_vec();
    } else if m < 3 * g || rank <= 2 * g {
        a.dir = -1;
        let hi = if m < 3 * g { m } else { 2 * g };
        a.carried = reg[g..hi].to_vec();
    } else {
        a.carried = Vec::new();
        a.dir = 0;
        a.terminated = true;
    }
    a.replace_top(Frame::Sweep);
}

fn enter_sweep_wait(a: &mut RefAgent) {
    a.rounds = 1;
    a.replace_top(Frame::SweepWait);
}

/// The pile-size branch shared by the sweeping variants (after the gather
/// walk, and after the regroup walk of the windowed variant).
fn sweep_branch(a: &mut RefAgent, snap: &Whiteboard, g: usize) -> bool {
    let m = snap.n_agents();
    if m >= g && m <= 2 * g - 1 {
        a.terminated = true;
        true
    } else if m >= 2 * g {
        enter_sweep_group(a, snap, g);
        false
    } else {
        enter_sweep_wait(a);
        false
    }
}

/// Run one round of the agent's script: execute deferred id collection,
/// fold any finished leg into the next, and produce this round's writes and
/// move intent. Returns the intent; `writes` receives the own-node writes.
fn act(a: &mut RefAgent, snap: &Whiteboard, p: &Protocol, writes: &mut Vec<BoardWrite>) -> Dir {
    let n = p.n;
    let k = p.k;
    let g = p.g;
    let leg3 = 3 * n as u32;
    let leg1 = n as u32;

    // Deferred collection: an id observed on arrival is recorded at the
    // start of the next action, from that round's snapshot.
    if a.just_arrived {
        a.just_arrived = false;
        match a.top() {
            Frame::Select => {
                if let Some(seen) = snap.id {
                    if (a.n_ids as usize) < k {
                        a.ids.push(seen);
                        a.n_ids += 1;
                    }
                }
            }
            Frame::SemiSelect => {
                if let Some(seen) = snap.id {
                    if (a.n_ids as usize) < 10 * g - 4 {
                        a.ids.push(seen);
                        a.n_ids += 1;
                    }
                }
            }
            Frame::SemiGather => {
                if snap.id.is_some() {
                    a.n_ids += 1;
                }
            }
            _ => {}
        }
    }

    // Candidate flag written by this same action (own writes are visible to
    // the writer within the action).
    let mut candi_self = false;

    loop {
        match a.top() {
            Frame::Select => {
                if a.rounds == 1 {
                    writes.push(BoardWrite::Id(a.id));
                    a.ids.push(a.id);
                    a.n_ids = 1;
                }
                if a.rounds <= leg3 {
                    return 1;
                }
                // Collection over: agents that never completed a lap are all
                // on one node; so is a full assembly.
                if (a.n_visited as usize) < n {
                    a.terminated = true;
                    return 0;
                }
                if snap.n_agents() == a.n_ids as usize {
                    a.terminated = true;
                    return 0;
                }
                a.min = a.ids.iter().copied().min();
                a.rounds = 1;
                a.replace_top(Frame::GatherWalk);
            }
            Frame::GatherWalk => {
                if a.rounds <= leg3 {
                    return if snap.id == a.min { 0 } else { 1 };
                }
                let m = snap.n_agents();
                match p.variant {
                    Variant::SelectSplit => {
                        if split_terminal(m, k, g) {
                            a.terminated = true;
                            return 0;
                        } else if m >= g + 2 {
                            enter_more(a, snap, g, 0, writes);
                        } else {
                            enter_less(a, 0);
                        }
                    }
                    Variant::SelectSweep => {
                        if sweep_branch(a, snap, g) {
                            return 0;
                        }
                    }
                    Variant::WindowedSweep => unreachable!("windowed variant never gathers"),
                }
            }
            Frame::MovingLeg => {
                if a.rounds <= leg1 {
                    if a.dir == 0 || snap.waiting {
                        return 0;
                    }
                    return a.dir;
                }
                a.frames.pop();
            }
            Frame::More => {
                // The guarded walk is over; re-orient for the two-leg search.
                // Standing on a flagged node joins the backward pickup; an
                // undersized group parks and flags its node; everyone else
                // (the reserve pile) searches forward.
                if snap.waiting {
                    a.dir = -1;
                    writes.push(BoardWrite::Waiting(false));
                } else if snap.n_agents() < g {
                    a.dir = 0;
                    writes.push(BoardWrite::Waiting(true));
                } else {
                    a.dir = 1;
                }
                a.rounds = 1;
                a.replace_top(Frame::Latter { second: false });
                a.frames.push(Frame::MovingLeg);
            }
            Frame::Less => {
                if a.rounds == 1 {
                    writes.push(BoardWrite::Waiting(true));
                    return 0;
                }
                if a.rounds <= leg1 {
                    return 0;
                }
                a.dir = -1;
                writes.push(BoardWrite::Waiting(false));
                a.rounds = 1;
                a.replace_top(Frame::Latter { second: false });
                a.frames.push(Frame::MovingLeg);
            }
            Frame::Latter { second: false } => {
                a.dir = -a.dir;
                a.rounds = 1;
                a.replace_top(Frame::Latter { second: true });
                a.frames.push(Frame::MovingLeg);
            }
            Frame::Latter { second: true } => {
                let m = snap.n_agents();
                if split_terminal(m, k, g) {
                    a.terminated = true;
                    return 0;
                } else if m >= g + 2 {
                    let next = a.iter + 1;
                    enter_more(a, snap, g, next, writes);
                } else {
                    let next = a.iter + 1;
                    enter_less(a, next);
                }
            }
            Frame::Sweep => {
                if a.rounds > leg1 {
                    a.terminated = true;
                    return 0;
                }
                if !mark_seen(snap, a.dir) {
                    writes.push(mark_write(a.dir));
                }
                return a.dir;
            }
            Frame::SweepWait => {
                if a.rounds > leg1 {
                    a.terminated = true;
                    return 0;
                }
                if a.rounds == 1 {
                    writes.push(BoardWrite::Waiting(true));
                    return 0;
                }
                if snap.f_marked || snap.b_marked {
                    // A sweep passed: obey the cutoff it published.
                    let cutoff = match snap.id {
                        Some(c) => c,
                        None => return 0,
                    };
                    if a.id <= cutoff {
                        if snap.dir == 0 {
                            return 0;
                        }
                        a.dir = snap.dir;
                        a.carried = snap
                            .registry
                            .iter()
                            .copied()
                            .filter(|&x| x <= cutoff)
                            .collect();
                        a.replace_top(Frame::Sweep);
                        continue;
                    }
                    a.terminated = true;
                    return 0;
                }
                return 0;
            }
            Frame::SemiSelect => {
                if a.rounds == 1 {
                    writes.push(BoardWrite::Id(a.id));
                    a.ids.push(a.id);
                    a.n_ids = 1;
                }
                if a.rounds <= leg3 {
                    let moving =
                        (a.n_ids as usize) < 10 * g - 4 && snap.n_agents() < 2 * g;
                    return if moving { 1 } else { 0 };
                }
                let elected = snap.n_agents() >= 2 * g
                    || (a.n_ids as usize >= 8 * g - 3 && window_min(&a.ids, g));
                if elected {
                    writes.push(BoardWrite::Candi(true));
                    candi_self = true;
                }
                a.n_ids = 1;
                a.rounds = 1;
                a.replace_top(Frame::SemiGather);
            }
            Frame::SemiGather => {
                if a.rounds <= leg3 {
                    if a.n_ids as usize == 4 * g - 1 {
                        return 0;
                    }
                    if snap.candi || candi_self {
                        return 0;
                    }
                    if snap.n_agents() >= 2 * g {
                        // Re-assert the flag a simultaneous pair of arrivals
                        // could not have seen completed.
                        writes.push(BoardWrite::Candi(true));
                        return 0;
                    }
                    return 1;
                }
                if sweep_branch(a, snap, g) {
                    return 0;
                }
            }
        }
    }
}

/// Arrival handling, executed in the same round as a successful move. The
/// opposite-trail test reads the live board (a group that arrived earlier in
/// the same round must be seen); everything else reads the round-start
/// snapshot of the destination.
fn arrive(
    a: &mut RefAgent,
    snap_dest: &Whiteboard,
    live_dest: &Whiteboard,
    g: usize,
    writes: &mut Vec<BoardWrite>,
) {
    match a.top() {
        Frame::Sweep => {
            if opposite_mark(live_dest, a.dir) {
                a.terminated = true;
                return;
            }
            writes.push(mark_write(a.dir));
            writes.push(BoardWrite::Dir(a.dir));
            if snap_dest.waiting {
                let mut u: Vec<AgentId> = a.carried.clone();
                u.extend(snap_dest.registry.iter().copied());
                u.sort_unstable();
                u.dedup();
                let cutoff = if u.len() >= 2 * g {
                    u[g - 1]
                } else {
                    *u.last().expect("merge set contains the waiters")
                };
                writes.push(BoardWrite::Id(cutoff));
                a.rank = rank_in(&u, a.id);
                if a.id > cutoff {
                    a.terminated = true;
                } else {
                    u.retain(|&x| x <= cutoff);
                    a.carried = u;
                }
                writes.push(BoardWrite::Waiting(false));
            }
        }
        Frame::SemiGather => {
            if snap_dest.registry.len() + 1 >= 2 * g && !live_dest.candi {
                writes.push(BoardWrite::Candi(true));
            }
        }
        _ => {}
    }
}

fn label_of(a: &RefAgent, variant: Variant) -> StepLabel {
    let sweep_phase = match variant {
        Variant::WindowedSweep => PhaseTag::FinalSweep,
        _ => PhaseTag::Sweep,
    };
    let (phase, leg) = match a.top() {
        Frame::Select => (PhaseTag::Selection, 0),
        Frame::GatherWalk => (PhaseTag::Gather, 0),
        Frame::Less => (PhaseTag::Split, 3 * a.iter),
        Frame::More => (PhaseTag::Split, 3 * a.iter),
        Frame::Latter { second } => (PhaseTag::Split, 3 * a.iter + 1 + second as u32),
        Frame::MovingLeg => {
            let parent = a.frames[a.frames.len() - 2];
            match parent {
                Frame::More => (PhaseTag::Split, 3 * a.iter),
                Frame::Latter { second } => (PhaseTag::Split, 3 * a.iter + 1 + second as u32),
                _ => unreachable!("guarded walks only run inside split legs"),
            }
        }
        Frame::Sweep | Frame::SweepWait => (sweep_phase, 0),
        Frame::SemiSelect => (PhaseTag::WindowedSelection, 0),
        Frame::SemiGather => (PhaseTag::Regroup, 0),
    };
    StepLabel {
        phase,
        leg,
        phase_round: a.rounds,
    }
}

fn pc_of(a: &RefAgent) -> Pc {
    match a.top() {
        Frame::Select => Pc::Selection,
        Frame::GatherWalk => Pc::Gather {
            min: a.min.expect("gather walk knows its target"),
        },
        Frame::Less => Pc::LessWait { iter: a.iter },
        Frame::More => Pc::SplitMove { iter: a.iter },
        Frame::Latter { second } => Pc::Latter {
            iter: a.iter,
            leg: 1 + second as u8,
        },
        Frame::MovingLeg => {
            let parent = a.frames[a.frames.len() - 2];
            match parent {
                Frame::More => Pc::SplitMove { iter: a.iter },
                Frame::Latter { second } => Pc::Latter {
                    iter: a.iter,
                    leg: 1 + second as u8,
                },
                _ => unreachable!("guarded walks only run inside split legs"),
            }
        }
        Frame::Sweep => Pc::Sweep {
            carried: a.carried.clone(),
        },
        Frame::SweepWait => Pc::SweepWait,
        Frame::SemiSelect => Pc::WindowedSelection,
        Frame::SemiGather => Pc::Regroup,
    }
}

// ---------------------------------------------------------------------------
// driver
// ---------------------------------------------------------------------------

/// Drive `initial` under the given protocol and adversary with the reference
/// interpreter. Same contract as the engine's `run`; the two must agree on
/// every trace record.
pub fn reference_run(
    initial: &Configuration,
    protocol: &Protocol,
    adversary: &AdversarySpec,
    round_limit: u64,
    order: ActivationOrder,
) -> ExecutionResult {
    let topo = initial.topology;
    let n = topo.n();
    let mut boards = initial.boards.clone();
    let mut agents: Vec<RefAgent> = initial
        .agents
        .iter()
        .map(|ag| RefAgent::new(ag.state.id, ag.pos, protocol.variant))
        .collect();
    let ids: Vec<AgentId> = agents.iter().map(|a| a.id).collect();

    // Minimal configuration view for the adversary: positions and round.
    let mut view = initial.clone();

    let phases: &[PhaseTag] = match protocol.variant {
        Variant::SelectSplit => &[PhaseTag::Selection, PhaseTag::Gather, PhaseTag::Split],
        Variant::SelectSweep => &[PhaseTag::Selection, PhaseTag::Gather, PhaseTag::Sweep],
        Variant::WindowedSweep => &[
            PhaseTag::WindowedSelection,
            PhaseTag::Regroup,
            PhaseTag::FinalSweep,
        ],
    };
    let mut link_passes: BTreeMap<PhaseTag, Vec<u64>> = phases
        .iter()
        .map(|&ph| (ph, vec![0u64; n]))
        .collect();
    let mut total_moves = 0u64;
    let mut trace = Vec::new();
    let mut round = 0u64;
    let mut last_missing = initial.missing;

    let outcome = loop {
        if agents.iter().all(|a| a.terminated) {
            break Outcome::AllTerminated;
        }
        if round >= round_limit {
            break Outcome::RoundLimitExceeded;
        }

        for (i, a) in agents.iter().enumerate() {
            view.agents[i].pos = a.pos;
        }
        view.round = round;
        let missing = choose_missing(adversary, &view);
        last_missing = missing;

        let snapshot = boards.clone();
        let mut steps = Vec::new();
        for idx in activation_sequence(&ids, order, round) {
            if agents[idx].terminated {
                continue;
            }
            let pos0 = agents[idx].pos;
            let mut own_writes = Vec::new();
            let intent = act(&mut agents[idx], &snapshot[pos0], protocol, &mut own_writes);
            let label = label_of(&agents[idx], protocol.variant);
            for w in &own_writes {
                w.apply(&mut boards[pos0]);
            }
            let mut writes: Vec<TraceWrite> = own_writes
                .into_iter()
                .map(|write| TraceWrite { node: pos0, write })
                .collect();

            let mut blocked = false;
            if intent != 0 && !agents[idx].terminated {
                let link = topo.link_toward(pos0, intent);
                if missing == Some(link) {
                    blocked = true;
                } else {
                    let dest = topo.step(pos0, intent);
                    let id = agents[idx].id;
                    boards[pos0].registry.remove(&id);
                    boards[dest].registry.insert(id);
                    agents[idx].pos = dest;
                    agents[idx].n_visited += 1;
                    agents[idx].just_arrived = true;
                    total_moves += 1;
                    if let Some(per_link) = link_passes.get_mut(&label.phase) {
                        per_link[link] += 1;
                    }
                    let mut arrival_writes = Vec::new();
                    arrive(
                        &mut agents[idx],
                        &snapshot[dest],
                        &boards[dest],
                        protocol.g,
                        &mut arrival_writes,
                    );
                    for w in &arrival_writes {
                        w.apply(&mut boards[dest]);
                    }
                    writes.extend(
                        arrival_writes
                            .into_iter()
                            .map(|write| TraceWrite { node: dest, write }),
                    );
                }
            }

            let terminated = agents[idx].terminated;
            if !terminated {
                agents[idx].rounds += 1;
            }
            steps.push(AgentTraceStep {
                id: agents[idx].id,
                pos: pos0,
                phase: label.phase,
                leg: label.leg,
                phase_round: label.phase_round,
                intent,
                blocked,
                terminated,
                writes,
            });
        }
        trace.push(TraceRound {
            round,
            missing,
            agents: steps,
        });
        round += 1;
    };

    let final_agents: Vec<Agent> = agents
        .iter()
        .map(|a| {
            let mut st = AgentState::new(a.id);
            st.rounds = a.rounds;
            st.ids = a.ids.clone();
            st.n_ids = a.n_ids;
            st.n_visited = a.n_visited;
            st.rank = a.rank;
            st.dir = a.dir;
            st.pc = pc_of(a);
            st.just_arrived = a.just_arrived;
            st.terminated = a.terminated;
            Agent {
                state: st,
                pos: a.pos,
            }
        })
        .collect();
    let final_config = Configuration {
        round,
        topology: topo,
        boards,
        agents: final_agents,
        missing: last_missing,
    };

    ExecutionResult {
        outcome,
        rounds_elapsed: round,
        total_moves,
        link_passes,
        final_config,
        trace,
    }
}

// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocols::dispatch;
    use crate::ring::init_configuration;

    fn ring_of(n: usize, k: usize) -> Configuration {
        let placements: Vec<(AgentId, usize)> = (0..k).map(|i| (AgentId(i as u64), i)).collect();
        init_configuration(n, &placements).unwrap()
    }

    #[test]
    fn unobstructed_split_variant_assembles_everyone() {
        let n = 8;
        let config = ring_of(n, 7);
        let protocol = dispatch(n, 7, 3).unwrap();
        assert_eq!(protocol.variant, Variant::SelectSplit);
        let result = reference_run(
            &config,
            &protocol,
            &AdversarySpec::NoneMissing,
            20 * n as u64,
            ActivationOrder::Ascending,
        );
        assert_eq!(result.outcome, Outcome::AllTerminated);
        // With every link up, all agents reach the elected node and stop at
        // the first pile check: 3n collection + 3n walk + the check action.
        assert_eq!(result.rounds_elapsed, 6 * n as u64 + 1);
        let occupied = result.final_config.occupied_nodes();
        assert_eq!(occupied, vec![0]);
        assert_eq!(result.final_config.count_at(0), 7);
    }

    #[test]
    fn stranded_pile_splits_into_two_legal_piles() {
        // Ids 0..6 on nodes 0..6; all links up for 28 rounds, then the link
        // into node 0 goes missing forever. Four agents make it to node 0;
        // the other three stack up behind the cut and stop there.
        let n = 8;
        let config = ring_of(n, 7);
        let protocol = dispatch(n, 7, 3).unwrap();
        let mut scriptteil: Vec<Option<usize>> = vec![None; 28];
        script_tail_extend(&mut script_teil, 7, 200);
        let adversary = AdversarySpec::Scripted { script: script_teil };
        let result = reference_run(
            &config,
            &protocol,
            &adversary,
            20 * n as u64,
            ActivationOrder::Ascending,
        );
        assert_eq!(result.outcome, Outcome::AllTerminated);
        assert_eq!(result.final_config.count_at(0), 4);
        assert_eq!(result.final_config.count_at(7), 3);
    }

    fn script_tail_extend(script: &mut Vec<Option<usize>>, link: usize, until: usize) {
        while script.len() < until {
            script.push(Some(link));
        }
    }
}
