//! Partitions of an error into edge-disjoint paths and cycles, their
//! evolution through the reduction stages, and the reduced-weight growth check.
//!
//! Walks are stored as `(edge, from, to)` steps rather than edge sets: on the
//! smallest torus two distinct edges join the same pair of vertices.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{sample_bitflip, trial_seed};
use crate::decoder::{reduce_stage_with, DecodeTrace, DecoderOptions};
use crate::error::{Error, Result};
use crate::lattice::{crossing_parity, in_sublattice, syndrome, torus_distance, Edge, EdgeSet, HomologyClass, TorusLevel, Vertex};

pub type Step = (Edge, Vertex, Vertex);

/// An open trail between two distinct syndrome vertices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionPath {
    pub start: Vertex,
    pub end: Vertex,
    pub steps: Vec<Step>,
}

/// A closed trail with its homology class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionCycle {
    pub steps: Vec<Step>,
    pub class: HomologyClass,
}

/// Edge-disjoint paths and cycles covering an error at a given stage.
///
/// Built only by [`canonical_partition`] and [`induced_partition`], which
/// guarantee that path endpoints lie on the stage sublattice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathPartition {
    level: TorusLevel,
    stage: u32,
    paths: Vec<PartitionPath>,
    cycles: Vec<PartitionCycle>,
}

impl PathPartition {
    pub fn level(&self) -> TorusLevel {
        self.level
    }

    pub fn stage(&self) -> u32 {
        self.stage
    }

    pub fn paths(&self) -> &[PartitionPath] {
        &self.paths
    }

    pub fn cycles(&self) -> &[PartitionCycle] {
        &self.cycles
    }

    fn all_steps(&self) -> impl Iterator<Item = &Step> {
        self.paths
            .iter()
            .flat_map(|p| p.steps.iter())
            .chain(self.cycles.iter().flat_map(|c| c.steps.iter()))
    }

    /// The covered error.
    pub fn edges(&self) -> EdgeSet {
        EdgeSet::from_edges_mod2(self.level, self.all_steps().map(|s| s.0))
    }

    /// Checks walk continuity, edge-disjointness, coverage of `e`, and that
    /// path endpoints are exactly the syndrome of `e`, on the stage sublattice.
    pub fn check(&self, e: &EdgeSet) -> Result<()> {
        let bad = |msg: String| Err(Error::ContractViolation(msg));
        let level = self.level;
        let walks = self
            .paths
            .iter()
            .map(|p| (p.start, p.end, &p.steps))
            .chain(self.cycles.iter().map(|c| {
                let v = c.steps.first().map(|s| s.1).unwrap_or(Vertex::new(0, 0));
                (v, v, &c.steps)
            }));
        for (start, end, steps) in walks {
            if steps.is_empty() {
                return bad("empty walk".into());
            }
            let mut at = start;
            for &(edge, from, to) in steps {
                let (a, b) = level.endpoints(edge);
                if from != at || !((a, b) == (from, to) || (b, a) == (from, to)) {
                    return bad(format!("walk breaks at {edge}"));
                }
                at = to;
            }
            if at != end {
                return bad(format!("walk ends at {at}, expected {end}"));
            }
        }
        let mut seen = EdgeSet::empty(level);
        for s in self.all_steps() {
            if seen.contains(s.0) {
                return bad(format!("edge {} used twice", s.0));
            }
            seen.insert(s.0);
        }
        if &seen != e {
            return bad("partition does not cover the error".into());
        }
        let mut ends: BTreeMap<Vertex, usize> = BTreeMap::new();
        for p in &self.paths {
            if p.start == p.end {
                return bad(format!("closed path at {}", p.start));
            }
            for v in [p.start, p.end] {
                if !in_sublattice(level, v, self.stage) {
                    return bad(format!("endpoint {v} off the stage-{} sublattice", self.stage));
                }
                *ends.entry(v).or_default() += 1;
            }
        }
        let odd: Vec<Vertex> = ends.iter().filter(|(_, &c)| c % 2 == 1).map(|(&v, _)| v).collect();
        if odd != syndrome(e).iter().collect::<Vec<_>>() {
            return bad("path endpoints do not match the syndrome".into());
        }
        if self.cycles.iter().any(|c| c.class != crossing_parity(level, c.steps.iter().map(|s| s.0))) {
            return bad("cycle class is stale".into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReducedWeight {
    pub wt_r: u64,
    /// Number of paths.
    pub paths: usize,
    /// `wt_r + paths`.
    pub combined: u64,
}

/// Remaining edges with lookup by vertex, in edge-index order.
struct Remaining {
    level: TorusLevel,
    edges: EdgeSet,
}

impl Remaining {
    fn least_edge_at(&self, v: Vertex) -> Option<(Edge, Vertex)> {
        self.level
            .incident(v)
            .into_iter()
            .filter(|(e, _)| self.edges.contains(*e))
            .min_by_key(|(e, _)| self.level.edge_index(*e))
    }

    fn take(&mut self, e: Edge) {
        self.edges.remove(e);
    }
}

/// Deterministic greedy decomposition at stage `k`.
///
/// Paths start at the least-indexed odd-degree vertex and follow the
/// least-indexed unused edge until they reach another odd-degree vertex.
/// What remains is split into closed trails the same way, each ending at its
/// first return to the start.
pub fn canonical_partition(e: &EdgeSet) -> PathPartition {
    let level = e.level();
    let mut rest = Remaining {
        level,
        edges: e.clone(),
    };
    let mut odd = syndrome(e);
    let mut paths = Vec::new();
    loop {
        let first_odd = odd.iter().next();
        let Some(start) = first_odd else { break };
        let mut at = start;
        let mut steps = Vec::new();
        loop {
            let (edge, next) = rest.least_edge_at(at).expect("odd-degree walk cannot get stuck");
            rest.take(edge);
            steps.push((edge, at, next));
            at = next;
            if at != start && odd.contains(at) {
                break;
            }
        }
        odd.toggle(start);
        odd.toggle(at);
        paths.push(PartitionPath { start, end: at, steps });
    }
    let mut cycles = Vec::new();
    loop {
        let first_left = rest.edges.iter().next();
        let Some(first) = first_left else { break };
        let start = level.endpoints(first).0;
        let mut at = start;
        let mut steps = Vec::new();
        loop {
            let (edge, next) = rest.least_edge_at(at).expect("even-degree walk cannot get stuck");
            rest.take(edge);
            steps.push((edge, at, next));
            at = next;
            if at == start {
                break;
            }
        }
        cycles.push(cycle_of(level, steps));
    }
    PathPartition {
        level,
        stage: level.k(),
        paths,
        cycles,
    }
}

fn cycle_of(level: TorusLevel, steps: Vec<Step>) -> PartitionCycle {
    let class = crossing_parity(level, steps.iter().map(|s| s.0));
    PartitionCycle { steps, class }
}

/// How a path contributes to `wt_r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathMeasure {
    /// Graph distance between the endpoints.
    #[default]
    Distance,
    /// Length of a shortest path between the endpoints in the same mod-2
    /// homology class as the path itself. Never below `Distance`; differs
    /// only for paths that go the long way round the torus.
    Homologous,
}

/// Stage-graph length of the path under `measure`.
pub fn path_weight(level: TorusLevel, stage: u32, path: &PartitionPath, measure: PathMeasure) -> u64 {
    match measure {
        PathMeasure::Distance => {
            torus_distance(level, path.start, path.end, stage).expect("endpoints lie on the stage sublattice") as u64
        }
        PathMeasure::Homologous => {
            let class = crossing_parity(level, path.steps.iter().map(|s| s.0));
            let m = level.m() as u64;
            // unwrapped displacement is d + j·m with j ≡ crossings (mod 2)
            let axis = |a: u32, b: u32, odd: bool| {
                let d = a.abs_diff(b) as u64;
                if odd {
                    m - d
                } else {
                    d
                }
            };
            (axis(path.start.x, path.end.x, class.wind_h) + axis(path.start.y, path.end.y, class.wind_v))
                / level.spacing(stage) as u64
        }
    }
}

/// Whether the path is longer under [`PathMeasure::Homologous`] than under
/// [`PathMeasure::Distance`].
pub fn path_wraps(level: TorusLevel, stage: u32, path: &PartitionPath) -> bool {
    path_weight(level, stage, path, PathMeasure::Homologous) > path_weight(level, stage, path, PathMeasure::Distance)
}

/// `wt_r` sums endpoint distances of paths in the stage graph and the girth
/// `2^stage` of each non-trivial cycle.
pub fn reduced_weight(pp: &PathPartition) -> ReducedWeight {
    reduced_weight_with(pp, PathMeasure::Distance)
}

pub fn reduced_weight_with(pp: &PathPartition, measure: PathMeasure) -> ReducedWeight {
    let path_part: u64 = pp
        .paths
        .iter()
        .map(|p| path_weight(pp.level, pp.stage, p, measure))
        .sum();
    let girth = 1u64 << pp.stage;
    let cycle_part: u64 = pp.cycles.iter().filter(|c| !c.class.is_trivial()).map(|_| girth).sum();
    let wt_r = path_part + cycle_part;
    ReducedWeight {
        wt_r,
        paths: pp.paths.len(),
        combined: wt_r + pp.paths.len() as u64,
    }
}

/// A walk under construction. Closed when `start == end`.
#[derive(Debug, Clone)]
struct Walk {
    start: Vertex,
    steps: Vec<Step>,
}

impl Walk {
    fn new(start: Vertex, steps: Vec<Step>) -> Self {
        Self { start, steps }
    }

    fn end(&self) -> Vertex {
        self.steps.last().map(|s| s.2).unwrap_or(self.start)
    }

    fn is_open(&self) -> bool {
        self.start != self.end()
    }

    fn reversed(&self) -> Walk {
        Walk::new(self.end(), reverse_steps(&self.steps))
    }
}

fn reverse_steps(steps: &[Step]) -> Vec<Step> {
    steps.iter().rev().map(|&(e, a, b)| (e, b, a)).collect()
}

fn concat(parts: &[&[Step]]) -> Vec<Step> {
    parts.iter().flat_map(|p| p.iter().copied()).collect()
}

/// Least-indexed open walk with an end at `v`, oriented to finish there.
fn take_walk_ending_at(walks: &mut [Walk], v: Vertex) -> Option<usize> {
    let idx = walks.iter().position(|w| w.is_open() && (w.start == v || w.end() == v))?;
    if walks[idx].end() != v {
        walks[idx] = walks[idx].reversed();
    }
    Some(idx)
}

/// Joins open walks that share an end vertex until every vertex carries at
/// most one open end. Lowest vertex first; the two least-indexed walks join.
fn merge_ends(walks: &mut Vec<Walk>) {
    loop {
        let mut ends: BTreeMap<Vertex, Vec<usize>> = BTreeMap::new();
        for (i, w) in walks.iter().enumerate().filter(|(_, w)| w.is_open()) {
            ends.entry(w.start).or_default().push(i);
            ends.entry(w.end()).or_default().push(i);
        }
        let Some((&v, ix)) = ends.iter().find(|(_, ix)| ix.len() >= 2) else {
            return;
        };
        let (i, j) = (ix[0], ix[1]);
        let first = if walks[i].end() == v {
            walks[i].clone()
        } else {
            walks[i].reversed()
        };
        let second = if walks[j].start == v {
            walks[j].clone()
        } else {
            walks[j].reversed()
        };
        walks[i] = Walk::new(first.start, concat(&[&first.steps, &second.steps]));
        walks.remove(j);
    }
}

/// Removes repeated edges pairwise by uncrossing the walks at each repeat,
/// least edge index first.
fn cancel_repeats(level: TorusLevel, walks: &mut Vec<Walk>) {
    loop {
        let mut seen: HashMap<Edge, Vec<(usize, usize)>> = HashMap::new();
        for (i, w) in walks.iter().enumerate() {
            for (p, s) in w.steps.iter().enumerate() {
                seen.entry(s.0).or_default().push((i, p));
            }
        }
        let Some(occ) = seen
            .into_iter()
            .filter(|(_, occ)| occ.len() >= 2)
            .min_by_key(|(e, _)| level.edge_index(*e))
            .map(|(_, occ)| occ)
        else {
            return;
        };
        let ((i, p), (j, q)) = (occ[0], occ[1]);
        let same_direction = walks[i].steps[p].1 == walks[j].steps[q].1;
        if i == j {
            let w = &walks[i];
            let (x, m, u) = (&w.steps[..p], &w.steps[p + 1..q], &w.steps[q + 1..]);
            if same_direction {
                walks[i] = Walk::new(w.start, concat(&[x, &reverse_steps(m), u]));
            } else {
                let loop_walk = Walk::new(w.steps[p].2, m.to_vec());
                walks[i] = Walk::new(w.start, concat(&[x, u]));
                walks.push(loop_walk);
            }
        } else {
            let (w1, w2) = (&walks[i], &walks[j]);
            let (x, y) = (&w1.steps[..p], &w1.steps[p + 1..]);
            let (z, u) = (&w2.steps[..q], &w2.steps[q + 1..]);
            let (n1, n2) = if same_direction {
                (
                    Walk::new(w1.start, concat(&[x, &reverse_steps(z)])),
                    Walk::new(w1.end(), concat(&[&reverse_steps(y), u])),
                )
            } else {
                (Walk::new(w1.start, concat(&[x, u])), Walk::new(w2.start, concat(&[z, y])))
            };
            walks[i] = n1;
            walks[j] = n2;
        }
    }
}

/// The partition of `e_{i-1} = e_i + ê_i` induced by the rule firings of
/// stage `i`, where `pp` partitions `e_i` at stage `i`.
///
/// Each firing extends the least-indexed path ending at its source vertex.
/// After every step, paths meeting at a vertex are joined. Edges then cancel
/// mod 2 by uncrossing, paths are joined again, and closed walks become cycles
/// (dropped when empty).
pub fn induced_partition(pp: &PathPartition, e_hat: &EdgeSet) -> Result<PathPartition> {
    let level = pp.level;
    let stage = pp.stage;
    if stage == 0 {
        return Err(Error::InvalidStage { stage, k: level.k() });
    }
    let e = pp.edges();
    let s = syndrome(&e);
    let out = reduce_stage_with(&s, stage, &DecoderOptions::default())?;
    if &out.correction() != e_hat {
        return Err(Error::TraceMismatch(format!(
            "stage {stage}: correction differs from the decoder's on the partition's syndrome"
        )));
    }
    let mut walks: Vec<Walk> = pp
        .paths
        .iter()
        .map(|p| Walk::new(p.start, p.steps.clone()))
        .chain(pp.cycles.iter().map(|c| Walk::new(c.steps[0].1, c.steps.clone())))
        .collect();
    for step in 1..=3u8 {
        for f in out.firings.iter().filter(|f| f.step == step) {
            let idx = take_walk_ending_at(&mut walks, f.from).ok_or_else(|| {
                Error::TraceMismatch(format!("no path ends at {} for a stage-{stage} rule", f.from))
            })?;
            walks[idx].steps.extend(f.walk(level));
        }
        merge_ends(&mut walks);
    }
    cancel_repeats(level, &mut walks);
    merge_ends(&mut walks);
    let mut paths = Vec::new();
    let mut cycles = Vec::new();
    for w in walks {
        if w.is_open() {
            paths.push(PartitionPath {
                start: w.start,
                end: w.end(),
                steps: w.steps,
            });
        } else if !w.steps.is_empty() {
            cycles.push(cycle_of(level, w.steps));
        }
    }
    let next = PathPartition {
        level,
        stage: stage - 1,
        paths,
        cycles,
    };
    next.check(&(&e ^ e_hat))?;
    Ok(next)
}

/// Partitions of `e_k, e_{k-1}, …, e_0` along a decode trace. Stages after
/// the decoder stopped contribute empty corrections.
pub fn partition_chain(trace: &DecodeTrace, e: &EdgeSet) -> Result<Vec<PathPartition>> {
    if syndrome(e) != trace.input {
        return Err(Error::TraceMismatch("trace was not produced from this error".into()));
    }
    let mut chain = vec![canonical_partition(e)];
    for stage in (1..=e.level().k()).rev() {
        let next = induced_partition(chain.last().expect("non-empty"), &trace.stage_correction(stage))?;
        chain.push(next);
    }
    Ok(chain)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma4Row {
    pub stage: u32,
    pub wt_r: u64,
    pub paths: usize,
    pub combined: u64,
    /// `combined(stage) / combined(stage - 1)`; absent at stage 0 or when
    /// the next value is 0.
    pub ratio_to_next: Option<f64>,
    /// Paths going the long way round the torus (see [`path_wraps`]).
    pub wrapped_paths: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Lemma4Report {
    /// Stages `k` down to `0`.
    pub rows: Vec<Lemma4Row>,
    /// Stages `i + 1` where `combined(i+1) < 6/5 · combined(i)` with
    /// `combined(i) > 0`.
    pub flagged: Vec<u32>,
    pub min_ratio: Option<f64>,
}

/// Combined weight per stage along the partition chain of `e`, with every
/// stage at which the 6/5 growth fails flagged.
pub fn check_lemma4(trace: &DecodeTrace, e: &EdgeSet) -> Result<Lemma4Report> {
    check_lemma4_with(trace, e, PathMeasure::Distance)
}

pub fn check_lemma4_with(trace: &DecodeTrace, e: &EdgeSet, measure: PathMeasure) -> Result<Lemma4Report> {
    let chain = partition_chain(trace, e)?;
    let weights: Vec<ReducedWeight> = chain.iter().map(|pp| reduced_weight_with(pp, measure)).collect();
    let mut rows = Vec::with_capacity(chain.len());
    let mut flagged = Vec::new();
    for (idx, (pp, w)) in chain.iter().zip(&weights).enumerate() {
        let next = weights.get(idx + 1);
        let ratio = next.filter(|n| n.combined > 0).map(|n| w.combined as f64 / n.combined as f64);
        if let Some(n) = next {
            if n.combined > 0 && 5 * w.combined < 6 * n.combined {
                flagged.push(pp.stage);
            }
        }
        rows.push(Lemma4Row {
            stage: pp.stage,
            wt_r: w.wt_r,
            paths: w.paths,
            combined: w.combined,
            ratio_to_next: ratio,
            wrapped_paths: pp.paths.iter().filter(|p| path_wraps(pp.level, pp.stage, p)).count(),
        });
    }
    let min_ratio = rows.iter().filter_map(|r| r.ratio_to_next).reduce(f64::min);
    Ok(Lemma4Report {
        rows,
        flagged,
        min_ratio,
    })
}

/// One reduced-weight growth check on a random bit-flip error.
#[derive(Debug, Clone, PartialEq)]
pub struct Lemma4Sample {
    pub index: u64,
    pub error: EdgeSet,
    pub report: Lemma4Report,
}

/// Checks `samples` errors drawn at flip rate `p`; sample `i` uses the
/// stream seeded by `(seed, k, 0, i)`.
pub fn lemma4_samples(k: u32, p: f64, samples: u64, seed: u64, measure: PathMeasure) -> Result<Vec<Lemma4Sample>> {
    let level = TorusLevel::new(k)?;
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidArgument(format!("flip probability {p} outside [0, 1]")));
    }
    (0..samples)
        .into_par_iter()
        .map(|index| {
            let error = sample_bitflip(level, p, trial_seed(seed, k, 0, index));
            let trace = crate::decoder::decode_with_trace(&syndrome(&error))?;
            let report = check_lemma4_with(&trace, &error, measure)?;
            Ok(Lemma4Sample { index, error, report })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decoder::decode_with_trace;
    use crate::lattice::{face_edges, full_row};
    use proptest::prelude::*;

    fn lvl(k: u32) -> TorusLevel {
        TorusLevel::new(k).unwrap()
    }

    fn set(l: TorusLevel, edges: &[Edge]) -> EdgeSet {
        EdgeSet::from_edges(l, edges.iter().copied())
    }

    #[test]
    fn trivial_partitions() {
        let l = lvl(3);
        let empty = canonical_partition(&EdgeSet::empty(l));
        assert!(empty.paths().is_empty() && empty.cycles().is_empty());
        assert_eq!(reduced_weight(&empty).combined, 0);

        let one = canonical_partition(&set(l, &[Edge::v(2, 5)]));
        assert_eq!(one.paths().len(), 1);
        assert_eq!(reduced_weight(&one).wt_r, 1);

        let face = set(l, &face_edges(l, Vertex::new(6, 6)));
        let pf = canonical_partition(&face);
        assert!(pf.paths().is_empty());
        assert_eq!(pf.cycles().len(), 1);
        assert!(pf.cycles()[0].class.is_trivial());
        assert_eq!(reduced_weight(&pf).wt_r, 0);
    }

    #[test]
    fn reduced_weight_examples() {
        let l = lvl(3);
        let row = canonical_partition(&full_row(l, 2));
        let w = reduced_weight(&row);
        assert_eq!((w.wt_r, w.paths), (8, 0));

        // staircase from (0,0) to (3,1)
        let stair = set(l, &[Edge::h(0, 0), Edge::h(1, 0), Edge::v(2, 0), Edge::h(2, 1)]);
        let w = reduced_weight(&canonical_partition(&stair));
        assert_eq!((w.wt_r, w.paths), (4, 1));

        let two = set(l, &[Edge::h(0, 0), Edge::v(5, 5)]);
        let w = reduced_weight(&canonical_partition(&two));
        assert_eq!((w.wt_r, w.paths, w.combined), (2, 2, 4));
    }

    #[test]
    fn greedy_walk_prefers_least_edge() {
        let l = lvl(3);
        // a "T": from (1,1) edges go left, right and down
        let e = set(l, &[Edge::h(0, 1), Edge::h(1, 1), Edge::v(1, 1)]);
        let pp = canonical_partition(&e);
        pp.check(&e).unwrap();
        // the degree-3 centre is odd, so the first path stops there
        assert_eq!(pp.paths()[0].start, Vertex::new(0, 1));
        assert_eq!(pp.paths()[0].end, Vertex::new(1, 1));
        assert_eq!(pp.paths()[1].start, Vertex::new(2, 1));
        assert_eq!(pp.paths()[1].end, Vertex::new(1, 2));
    }

    #[test]
    fn multi_edges_on_the_smallest_torus() {
        let l = lvl(1);
        let e = set(l, &[Edge::h(0, 0), Edge::h(1, 0)]);
        let pp = canonical_partition(&e);
        pp.check(&e).unwrap();
        assert_eq!(pp.cycles().len(), 1);
        assert_eq!(pp.cycles()[0].class, HomologyClass::new(true, false));
        assert_eq!(reduced_weight(&pp).wt_r, 2);
    }

    /// Combined weight before and after the first stage. The torus is wide
    /// enough that neither figure wraps.
    #[test]
    fn long_way_round_path() {
        let l = lvl(3);
        // (1,0) to (0,0) through x = 2..7: distance 1, but 7 steps in its class
        let e = EdgeSet::from_edges(l, (1..8).map(|x| Edge::h(x, 0)));
        let pp = canonical_partition(&e);
        let p = &pp.paths()[0];
        assert_eq!(path_weight(l, 3, p, PathMeasure::Distance), 1);
        assert_eq!(path_weight(l, 3, p, PathMeasure::Homologous), 7);
        assert!(path_wraps(l, 3, p));
        let short = canonical_partition(&set(l, &[Edge::h(0, 0)]));
        assert!(!path_wraps(l, 3, &short.paths()[0]));
    }

    fn fixture_combined(edges: &[Edge]) -> (u64, u64, PathPartition) {
        let l = lvl(4);
        let e = set(l, edges);
        let trace = decode_with_trace(&syndrome(&e)).unwrap();
        let before = canonical_partition(&e);
        let after = induced_partition(&before, &trace.stage_correction(4)).unwrap();
        (reduced_weight(&before).combined, reduced_weight(&after).combined, after)
    }

    #[test]
    fn growth_equality_fixture_corner() {
        let (hi, lo, after) = fixture_combined(&[Edge::h(1, 4), Edge::h(2, 4), Edge::v(4, 1), Edge::v(4, 2)]);
        assert_eq!((hi, lo), (6, 5));
        assert_eq!(after.paths().len(), 1);
        let p = &after.paths()[0];
        let mut ends = [p.start, p.end];
        ends.sort();
        assert_eq!(ends, [Vertex::new(4, 0), Vertex::new(0, 4)]);
    }

    #[test]
    fn growth_equality_fixture_staircase() {
        let (hi, lo, after) = fixture_combined(&[Edge::h(1, 1), Edge::h(2, 1), Edge::h(4, 2), Edge::h(5, 2)]);
        assert_eq!((hi, lo), (6, 5));
        assert_eq!(after.paths()[0].steps.len(), 8);
    }

    #[test]
    fn corrected_error_ends_at_zero() {
        let l = lvl(4);
        let e = set(l, &[Edge::h(3, 3), Edge::v(7, 2)]);
        let trace = decode_with_trace(&syndrome(&e)).unwrap();
        let rep = check_lemma4(&trace, &e).unwrap();
        assert_eq!(rep.rows.last().unwrap().combined, 0);
        assert_eq!(rep.rows.len(), 5);
        assert!(rep.flagged.is_empty());
    }

    #[test]
    fn fractal_chain_ends_in_a_wrapped_cycle() {
        for k in 4..=8 {
            let e = crate::adversarial::fractal_error(k).unwrap();
            let trace = decode_with_trace(&syndrome(&e)).unwrap();
            let chain = partition_chain(&trace, &e).unwrap();
            let last = chain.last().unwrap();
            assert_eq!(last.stage(), 0);
            assert!(last.cycles().iter().any(|c| !c.class.is_trivial()));
            let rep = check_lemma4(&trace, &e).unwrap();
            assert!(rep.flagged.is_empty(), "k={k}: {:?}", rep.rows);
        }
    }

    #[test]
    fn mismatched_trace_is_rejected() {
        let l = lvl(3);
        let e = set(l, &[Edge::h(1, 0)]);
        let pp = canonical_partition(&e);
        let wrong = set(l, &[Edge::h(5, 5)]);
        assert!(matches!(induced_partition(&pp, &wrong), Err(Error::TraceMismatch(_))));
    }

    fn arb_error(k: u32) -> impl Strategy<Value = EdgeSet> {
        let l = lvl(k);
        proptest::collection::vec(0..l.n(), 0..24).prop_map(move |ix| EdgeSet::from_indices(l, ix))
    }

    proptest! {
        #[test]
        fn canonical_partition_is_sound(e in arb_error(3)) {
            let pp = canonical_partition(&e);
            prop_assert!(pp.check(&e).is_ok());
            prop_assert_eq!(&canonical_partition(&e), &pp);
            prop_assert!(reduced_weight(&pp).wt_r <= e.weight() as u64);
        }

        #[test]
        fn chain_is_sound(e in arb_error(4)) {
            let trace = decode_with_trace(&syndrome(&e)).unwrap();
            let chain = partition_chain(&trace, &e).unwrap();
            let errors = trace.intermediate_errors(&e);
            for (pp, ei) in chain.iter().zip(&errors) {
                prop_assert!(pp.check(ei).is_ok());
            }
        }
    }
}
