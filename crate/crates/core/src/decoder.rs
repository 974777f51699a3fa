//! The renormalisation decoder.
//!
//! Decoding runs stage by stage from `i = k` down to `i = 1`. Stage `i` takes
//! a syndrome on the sublattice `V_i` and pushes it onto `V_{i-1}` with local
//! rules applied inside blocks, where a block is a `2g × 2g` square
//! (`g = 2^(k-i)`) split into four `g × g` cells:
//!
//! ```text
//!   α ── t ── β
//!   │ A  │  B │        cell corners: α top-left, β top-right,
//!   l ───┼─── r                      γ bottom-left, δ bottom-right
//!   │ C  │  D │        cell sides:   t, b, l, r
//!   γ ── b ── δ
//! ```
//!
//! Each stage runs three steps. Step 1 pairs diagonal defects in `D` cells,
//! step 2 pairs adjacent defects in `B` and `C` cells, and step 3 shifts every
//! remaining defect of an `A` cell to the block anchor. Every rule in a step
//! reads the syndrome as it was when the step started, so the blocks can be
//! visited in any order (or concurrently) without changing the output.
//!
//! Corrections are accumulated on unit edges of the level-`k` torus.

use std::collections::{BTreeSet, HashSet};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    cell_side_edges, crossing_parity, in_sublattice, syndrome_of_edges, Edge, EdgeSet, HomologyClass, Side,
    SyndromeSet, TorusLevel, Vertex,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cell {
    A,
    B,
    C,
    D,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Corner {
    Alpha,
    Beta,
    Gamma,
    Delta,
}

/// One block of the stage-`i` tiling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block {
    level: TorusLevel,
    pub stage: u32,
    /// Cell side length `2^(k-i)`.
    pub g: u32,
    pub bx: u32,
    pub by: u32,
}

impl Block {
    pub fn new(level: TorusLevel, stage: u32, bx: u32, by: u32) -> Self {
        assert!(stage >= 1 && stage <= level.k(), "blocks exist for stages 1..=k");
        let g = level.spacing(stage);
        let per_side = Self::per_side(level, stage);
        assert!(bx < per_side && by < per_side);
        Self { level, stage, g, bx, by }
    }

    /// Number of blocks along one side of the torus at this stage, `2^(i-1)`.
    pub fn per_side(level: TorusLevel, stage: u32) -> u32 {
        level.m() / (2 * level.spacing(stage))
    }

    /// All blocks of a stage, row-major by `(by, bx)`.
    pub fn all(level: TorusLevel, stage: u32) -> impl Iterator<Item = Block> {
        let per_side = Self::per_side(level, stage);
        (0..per_side).flat_map(move |by| (0..per_side).map(move |bx| Block::new(level, stage, bx, by)))
    }

    pub fn anchor(&self) -> Vertex {
        Vertex::new(2 * self.g * self.bx, 2 * self.g * self.by)
    }

    pub fn cell_anchor(&self, cell: Cell) -> Vertex {
        let a = self.anchor();
        let (dx, dy) = match cell {
            Cell::A => (0, 0),
            Cell::B => (self.g, 0),
            Cell::C => (0, self.g),
            Cell::D => (self.g, self.g),
        };
        self.level.wrap((a.x + dx) as i64, (a.y + dy) as i64)
    }

    pub fn corner(&self, cell: Cell, corner: Corner) -> Vertex {
        let c = self.cell_anchor(cell);
        let (dx, dy) = match corner {
            Corner::Alpha => (0, 0),
            Corner::Beta => (self.g, 0),
            Corner::Gamma => (0, self.g),
            Corner::Delta => (self.g, self.g),
        };
        self.level.wrap((c.x + dx) as i64, (c.y + dy) as i64)
    }

    pub fn side(&self, cell: Cell, side: Side) -> CellSide {
        CellSide {
            anchor: self.cell_anchor(cell),
            side,
            g: self.g,
        }
    }
}

/// A side of some cell, i.e. a straight run of `g` unit edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CellSide {
    pub anchor: Vertex,
    pub side: Side,
    pub g: u32,
}

impl CellSide {
    pub fn edges(&self, level: TorusLevel) -> impl Iterator<Item = Edge> {
        cell_side_edges(level, self.anchor, self.side, self.g)
    }

    /// The two end vertices, top/left one first.
    pub fn ends(&self, level: TorusLevel) -> (Vertex, Vertex) {
        let (x, y, g) = (self.anchor.x as i64, self.anchor.y as i64, self.g as i64);
        let (a, b) = match self.side {
            Side::T => ((x, y), (x + g, y)),
            Side::B => ((x, y + g), (x + g, y + g)),
            Side::L => ((x, y), (x, y + g)),
            Side::R => ((x + g, y), (x + g, y + g)),
        };
        (level.wrap(a.0, a.1), level.wrap(b.0, b.1))
    }

    /// Winding parities of this side's edges, in O(1). Sides are aligned to
    /// multiples of `g`, so a side crosses a cut only when it ends on it.
    pub fn crossing(&self, level: TorusLevel) -> HomologyClass {
        let m = level.m();
        match self.side {
            Side::T | Side::B => HomologyClass::new(self.anchor.x + self.g == m, false),
            Side::L | Side::R => HomologyClass::new(false, self.anchor.y + self.g == m),
        }
    }

    /// Unit steps walking this side starting from `from`, as (edge, tail, head).
    pub fn walk_from(&self, level: TorusLevel, from: Vertex) -> Vec<(Edge, Vertex, Vertex)> {
        let (start, _) = self.ends(level);
        let mut steps: Vec<(Edge, Vertex, Vertex)> = self
            .edges(level)
            .map(|e| {
                let (t, h) = level.endpoints(e);
                (e, t, h)
            })
            .collect();
        if from != start {
            steps.reverse();
            for s in steps.iter_mut() {
                std::mem::swap(&mut s.1, &mut s.2);
            }
        }
        steps
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuleKind {
    /// Two defects annihilated along a path.
    Pair,
    /// One defect moved to its block anchor.
    Shift,
}

/// A single rule application inside one block.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RuleFiring {
    pub step: u8,
    pub block: (u32, u32),
    pub kind: RuleKind,
    pub from: Vertex,
    pub to: Vertex,
    /// Sides traversed from `from` to `to`, in order.
    pub path: Vec<CellSide>,
}

impl RuleFiring {
    /// The unit-edge walk from `from` to `to`.
    pub fn walk(&self, level: TorusLevel) -> Vec<(Edge, Vertex, Vertex)> {
        let mut out = Vec::new();
        let mut at = self.from;
        for side in &self.path {
            let steps = side.walk_from(level, at);
            at = steps.last().map(|s| s.2).unwrap_or(at);
            out.extend(steps);
        }
        debug_assert_eq!(at, self.to);
        out
    }
}

/// How blocks are visited within a step. The output never depends on it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BlockOrder {
    #[default]
    RowMajor,
    /// Random permutation per step, seeded.
    Shuffled(u64),
    /// Rules evaluated on the rayon pool.
    Parallel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DecoderOptions {
    pub skip_step1: bool,
    pub skip_step2: bool,
    pub block_order: BlockOrder,
}

impl DecoderOptions {
    pub fn is_ablated(&self) -> bool {
        self.skip_step1 || self.skip_step2
    }
}

/// Everything one reduction stage did.
#[derive(Debug, Clone)]
pub struct StageOutput {
    pub stage: u32,
    pub firings: Vec<RuleFiring>,
    /// `s_{i-1}`, on the stage `i-1` sublattice.
    pub syndrome_after: SyndromeSet,
    /// Snapshot vertices used by more than one rule within a step.
    pub conflicts: usize,
    /// Number of (block, step) visits made.
    pub blocks_visited: usize,
}

impl StageOutput {
    /// `ê_i` on unit edges.
    pub fn correction(&self) -> EdgeSet {
        let level = self.syndrome_after.level();
        let mut e = EdgeSet::empty(level);
        for f in &self.firings {
            for side in &f.path {
                for edge in side.edges(level) {
                    e.toggle(edge);
                }
            }
        }
        e
    }

    fn crossing(&self) -> HomologyClass {
        let level = self.syndrome_after.level();
        self.firings
            .iter()
            .flat_map(|f| f.path.iter())
            .fold(HomologyClass::TRIVIAL, |acc, s| acc ^ s.crossing(level))
    }
}

fn candidate_blocks(level: TorusLevel, stage: u32, syndrome: &BTreeSet<Vertex>) -> BTreeSet<(u32, u32)> {
    let g = level.spacing(stage);
    let span = 2 * g;
    let per_side = Block::per_side(level, stage);
    let owners = |c: u32| -> [u32; 2] {
        let b = c / span;
        if c.is_multiple_of(span) {
            [b, (b + per_side - 1) % per_side]
        } else {
            [b, b]
        }
    };
    let mut out = BTreeSet::new();
    for v in syndrome {
        for by in owners(v.y) {
            for bx in owners(v.x) {
                out.insert((by, bx));
            }
        }
    }
    out
}

fn apply_rules(block: &Block, step: u8, s: &BTreeSet<Vertex>, out: &mut Vec<RuleFiring>) {
    let has = |cell, corner| s.contains(&block.corner(cell, corner));
    let mut fire = |kind, cell, from: Corner, to: Corner, sides: &[Side]| {
        out.push(RuleFiring {
            step,
            block: (block.bx, block.by),
            kind,
            from: block.corner(cell, from),
            to: block.corner(cell, to),
            path: sides.iter().map(|&sd| block.side(cell, sd)).collect(),
        });
    };
    use Corner::*;
    match step {
        1 => {
            if has(Cell::D, Alpha) && has(Cell::D, Delta) {
                fire(RuleKind::Pair, Cell::D, Alpha, Delta, &[Side::L, Side::B]);
            }
            if has(Cell::D, Beta) && has(Cell::D, Gamma) {
                fire(RuleKind::Pair, Cell::D, Beta, Gamma, &[Side::R, Side::B]);
            }
        }
        2 => {
            if has(Cell::C, Alpha) && has(Cell::C, Gamma) {
                fire(RuleKind::Pair, Cell::C, Alpha, Gamma, &[Side::L]);
            }
            if has(Cell::C, Beta) && has(Cell::C, Delta) {
                fire(RuleKind::Pair, Cell::C, Beta, Delta, &[Side::R]);
            }
            if has(Cell::B, Alpha) && has(Cell::B, Beta) {
                fire(RuleKind::Pair, Cell::B, Alpha, Beta, &[Side::T]);
            }
            if has(Cell::B, Gamma) && has(Cell::B, Delta) {
                fire(RuleKind::Pair, Cell::B, Gamma, Delta, &[Side::B]);
            }
        }
        3 => {
            if has(Cell::A, Beta) {
                fire(RuleKind::Shift, Cell::A, Beta, Alpha, &[Side::T]);
            }
            if has(Cell::A, Gamma) {
                fire(RuleKind::Shift, Cell::A, Gamma, Alpha, &[Side::L]);
            }
            if has(Cell::A, Delta) {
                fire(RuleKind::Shift, Cell::A, Delta, Alpha, &[Side::B, Side::L]);
            }
        }
        _ => unreachable!("reduction has three steps"),
    }
}

fn shuffle_seed(seed: u64, stage: u32, step: u8) -> u64 {
    seed ^ ((stage as u64) << 32) ^ ((step as u64) << 40) ^ 0x9e37_79b9_7f4a_7c15
}

fn run_step(
    level: TorusLevel,
    stage: u32,
    step: u8,
    snapshot: &BTreeSet<Vertex>,
    order: BlockOrder,
) -> (Vec<RuleFiring>, usize) {
    let mut blocks: Vec<Block> = candidate_blocks(level, stage, snapshot)
        .into_iter()
        .map(|(by, bx)| Block::new(level, stage, bx, by))
        .collect();
    let visited = blocks.len();
    let firings = match order {
        BlockOrder::RowMajor => {
            let mut out = Vec::new();
            for b in &blocks {
                apply_rules(b, step, snapshot, &mut out);
            }
            out
        }
        BlockOrder::Shuffled(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(shuffle_seed(seed, stage, step));
            blocks.shuffle(&mut rng);
            let mut out = Vec::new();
            for b in &blocks {
                apply_rules(b, step, snapshot, &mut out);
            }
            out
        }
        BlockOrder::Parallel => blocks
            .par_iter()
            .flat_map_iter(|b| {
                let mut out = Vec::new();
                apply_rules(b, step, snapshot, &mut out);
                out
            })
            .collect(),
    };
    (firings, visited)
}

fn count_conflicts(firings: &[RuleFiring]) -> usize {
    let mut used = HashSet::new();
    let mut conflicts = 0;
    for f in firings {
        let touched: &[Vertex] = match f.kind {
            RuleKind::Pair => &[f.from, f.to],
            RuleKind::Shift => &[f.from],
        };
        for v in touched {
            if !used.insert(*v) {
                conflicts += 1;
            }
        }
    }
    conflicts
}

fn check_input(s: &SyndromeSet, stage: u32) -> Result<()> {
    let level = s.level();
    level.check_stage(stage)?;
    if stage == 0 {
        return Err(Error::InvalidStage { stage, k: level.k() });
    }
    if !s.len().is_multiple_of(2) {
        return Err(Error::InvalidSyndrome(format!("odd cardinality {}", s.len())));
    }
    if let Some(v) = s.iter().find(|&v| !in_sublattice(level, v, stage)) {
        return Err(Error::InvalidSyndrome(format!("vertex {v} is not on the stage-{stage} sublattice")));
    }
    Ok(())
}

fn reduce_sparse(
    level: TorusLevel,
    syndrome: &BTreeSet<Vertex>,
    stage: u32,
    opts: &DecoderOptions,
) -> Result<(Vec<RuleFiring>, BTreeSet<Vertex>, usize, usize)> {
    let mut current = syndrome.clone();
    let mut firings = Vec::new();
    let mut conflicts = 0;
    let mut visited = 0;
    for step in 1..=3u8 {
        if (step == 1 && opts.skip_step1) || (step == 2 && opts.skip_step2) {
            continue;
        }
        let (fired, v) = run_step(level, stage, step, &current, opts.block_order);
        visited += v;
        conflicts += count_conflicts(&fired);
        for f in &fired {
            for v in [f.from, f.to] {
                if !current.remove(&v) {
                    current.insert(v);
                }
            }
        }
        firings.extend(fired);
    }
    if !opts.is_ablated() && conflicts > 0 {
        return Err(Error::ContractViolation(format!(
            "{conflicts} conflicting rule applications at stage {stage}"
        )));
    }
    if let Some(v) = current.iter().find(|&&v| !in_sublattice(level, v, stage - 1)) {
        return Err(Error::ContractViolation(format!(
            "vertex {v} left off the stage-{} sublattice",
            stage - 1
        )));
    }
    Ok((firings, current, conflicts, visited))
}

/// Runs one reduction stage with explicit options.
pub fn reduce_stage_with(s: &SyndromeSet, stage: u32, opts: &DecoderOptions) -> Result<StageOutput> {
    check_input(s, stage)?;
    let level = s.level();
    let input: BTreeSet<Vertex> = s.iter().collect();
    let (firings, after, conflicts, blocks_visited) = reduce_sparse(level, &input, stage, opts)?;
    Ok(StageOutput {
        stage,
        firings,
        syndrome_after: SyndromeSet::from_vertices(level, after)?,
        conflicts,
        blocks_visited,
    })
}

/// Reduces a stage-`i` syndrome to stage `i-1`, returning `(ê_i, s_{i-1})`.
pub fn reduce_stage(s: &SyndromeSet, stage: u32) -> Result<(EdgeSet, SyndromeSet)> {
    let out = reduce_stage_with(s, stage, &DecoderOptions::default())?;
    Ok((out.correction(), out.syndrome_after))
}

/// One recorded stage of a full decode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageRecord {
    pub stage: u32,
    /// `ê_i` on unit edges.
    pub correction: EdgeSet,
    /// `s_{i-1}`.
    pub syndrome_after: SyndromeSet,
    pub firings: Vec<RuleFiring>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeTrace {
    pub input: SyndromeSet,
    pub stages: Vec<StageRecord>,
}

impl DecodeTrace {
    pub fn level(&self) -> TorusLevel {
        self.input.level()
    }

    /// `ê`, the XOR of every stage correction.
    pub fn correction(&self) -> EdgeSet {
        let mut e = EdgeSet::empty(self.level());
        for st in &self.stages {
            e ^= &st.correction;
        }
        e
    }

    /// The correction recorded for stage `i`, empty if the loop had stopped.
    pub fn stage_correction(&self, stage: u32) -> EdgeSet {
        self.stages
            .iter()
            .find(|r| r.stage == stage)
            .map(|r| r.correction.clone())
            .unwrap_or_else(|| EdgeSet::empty(self.level()))
    }

    /// Intermediate errors `e_k, e_{k-1}, …, e_0`, where
    /// `e_{i-1} = e_i + ê_i`. Index `j` of the result holds `e_{k-j}`.
    pub fn intermediate_errors(&self, error: &EdgeSet) -> Vec<EdgeSet> {
        let k = self.level().k();
        let mut out = vec![error.clone()];
        let mut current = error.clone();
        for stage in (1..=k).rev() {
            current ^= &self.stage_correction(stage);
            out.push(current.clone());
        }
        out
    }
}

fn run_stages<F>(s: &SyndromeSet, opts: &DecoderOptions, mut on_stage: F) -> Result<()>
where
    F: FnMut(u32, Vec<RuleFiring>, &BTreeSet<Vertex>),
{
    let level = s.level();
    if !s.len().is_multiple_of(2) {
        return Err(Error::InvalidSyndrome(format!("odd cardinality {}", s.len())));
    }
    let mut current: BTreeSet<Vertex> = s.iter().collect();
    let mut stage = level.k();
    while !current.is_empty() && stage > 0 {
        let (firings, after, _, _) = reduce_sparse(level, &current, stage, opts)?;
        on_stage(stage, firings, &after);
        current = after;
        stage -= 1;
    }
    if !current.is_empty() {
        return Err(Error::ContractViolation(format!(
            "final syndrome has {} vertices",
            current.len()
        )));
    }
    Ok(())
}

pub fn decode_trace_with(s: &SyndromeSet, opts: &DecoderOptions) -> Result<DecodeTrace> {
    let level = s.level();
    let mut stages = Vec::new();
    run_stages(s, opts, |stage, firings, after| {
        let syndrome_after = SyndromeSet::from_vertices(level, after.iter().copied()).expect("in range");
        let out = StageOutput {
            stage,
            firings,
            syndrome_after,
            conflicts: 0,
            blocks_visited: 0,
        };
        stages.push(StageRecord {
            stage,
            correction: out.correction(),
            syndrome_after: out.syndrome_after,
            firings: out.firings,
        });
    })?;
    Ok(DecodeTrace {
        input: s.clone(),
        stages,
    })
}

pub fn decode_with_trace(s: &SyndromeSet) -> Result<DecodeTrace> {
    decode_trace_with(s, &DecoderOptions::default())
}

pub fn decode_with(s: &SyndromeSet, opts: &DecoderOptions) -> Result<EdgeSet> {
    let level = s.level();
    let mut e = EdgeSet::empty(level);
    run_stages(s, opts, |_, firings, _| {
        for f in &firings {
            for side in &f.path {
                for edge in side.edges(level) {
                    e.toggle(edge);
                }
            }
        }
    })?;
    Ok(e)
}

/// Full decoder: returns `ê` with `σ(ê) = s`.
pub fn decode(s: &SyndromeSet) -> Result<EdgeSet> {
    decode_with(s, &DecoderOptions::default())
}

/// Homology class of `e + decode(σ(e))` for a sparse error, without
/// materialising dense edge sets. Trivial means the error was corrected.
pub fn residual_class_with(level: TorusLevel, error: &[Edge], opts: &DecoderOptions) -> Result<HomologyClass> {
    let s = syndrome_of_edges(level, error);
    let mut class = crossing_parity(level, error.iter().copied());
    run_stages(&s, opts, |stage, firings, after| {
        let out = StageOutput {
            stage,
            firings,
            syndrome_after: SyndromeSet::empty(level),
            conflicts: 0,
            blocks_visited: after.len(),
        };
        class ^= out.crossing();
    })?;
    Ok(class)
}

pub fn residual_class(level: TorusLevel, error: &[Edge]) -> Result<HomologyClass> {
    residual_class_with(level, error, &DecoderOptions::default())
}

/// Whether the full decoder leaves a homologically non-trivial residual.
pub fn is_wrongly_decoded(error: &EdgeSet) -> bool {
    let edges = error.to_vec();
    !residual_class(error.level(), &edges)
        .expect("syndromes of edge sets are valid decoder input")
        .is_trivial()
}
