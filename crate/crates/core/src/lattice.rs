//! Square tilings of the torus and the combinatorics the decoder runs on.
//!
//! The level-`k` torus has `m = 2^k` vertices per side and `n = 2m²` unit
//! edges. Coordinates grow rightward (`x`) and downward (`y`), so the
//! "top-left" corner of a cell is its anchor. The coarser tilings used by the
//! decoder are the sublattices of vertices whose coordinates are multiples of
//! `2^(k-i)` for stage `i`.
//!
//! Edge linear indices put all horizontal edges first, row-major, then all
//! vertical edges: `H(x,y) -> y·m + x`, `V(x,y) -> m² + y·m + x`.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{BitXor, BitXorAssign};
use std::str::FromStr;

use bitvec::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest supported level; `n` is then `2·4096²` edges.
pub const MAX_LEVEL: u32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TorusLevel {
    k: u32,
}

impl TorusLevel {
    pub fn new(k: u32) -> Result<Self> {
        if k == 0 || k > MAX_LEVEL {
            return Err(Error::InvalidLevel(k));
        }
        Ok(Self { k })
    }

    pub fn k(self) -> u32 {
        self.k
    }

    /// Side length `2^k`.
    pub fn m(self) -> u32 {
        1 << self.k
    }

    /// Number of unit edges, `2m²`.
    pub fn n(self) -> usize {
        2 * (self.m() as usize) * (self.m() as usize)
    }

    /// Minimum distance of the code, equal to `m`.
    pub fn d(self) -> u32 {
        self.m()
    }

    pub fn vertex_count(self) -> usize {
        (self.m() as usize) * (self.m() as usize)
    }

    /// Lattice spacing of the stage-`i` sublattice, `2^(k-i)`.
    pub fn spacing(self, stage: u32) -> u32 {
        debug_assert!(stage <= self.k);
        1 << (self.k - stage)
    }

    pub fn check_stage(self, stage: u32) -> Result<()> {
        if stage > self.k {
            return Err(Error::InvalidStage { stage, k: self.k });
        }
        Ok(())
    }

    /// Reduces arbitrary integer coordinates onto the torus.
    pub fn wrap(self, x: i64, y: i64) -> Vertex {
        let m = self.m() as i64;
        Vertex::new(x.rem_euclid(m) as u32, y.rem_euclid(m) as u32)
    }

    pub fn vertex_index(self, v: Vertex) -> usize {
        v.y as usize * self.m() as usize + v.x as usize
    }

    pub fn vertex_at(self, index: usize) -> Vertex {
        let m = self.m() as usize;
        Vertex::new((index % m) as u32, (index / m) as u32)
    }

    pub fn contains_vertex(self, v: Vertex) -> bool {
        v.x < self.m() && v.y < self.m()
    }

    pub fn contains_edge(self, e: Edge) -> bool {
        e.x < self.m() && e.y < self.m()
    }

    pub fn edge_index(self, e: Edge) -> usize {
        let m = self.m() as usize;
        let base = match e.orientation {
            Orientation::H => 0,
            Orientation::V => m * m,
        };
        base + e.y as usize * m + e.x as usize
    }

    pub fn edge_at(self, index: usize) -> Edge {
        let m = self.m() as usize;
        let (orientation, rest) = if index < m * m {
            (Orientation::H, index)
        } else {
            (Orientation::V, index - m * m)
        };
        Edge::new(orientation, (rest % m) as u32, (rest / m) as u32)
    }

    /// Both endpoints of a unit edge, in the order (tail, head).
    pub fn endpoints(self, e: Edge) -> (Vertex, Vertex) {
        let m = self.m();
        let tail = Vertex::new(e.x, e.y);
        let head = match e.orientation {
            Orientation::H => Vertex::new((e.x + 1) % m, e.y),
            Orientation::V => Vertex::new(e.x, (e.y + 1) % m),
        };
        (tail, head)
    }

    /// The four unit edges incident to `v`, as (edge, neighbour) pairs.
    pub fn incident(self, v: Vertex) -> [(Edge, Vertex); 4] {
        let m = self.m();
        let left = (v.x + m - 1) % m;
        let up = (v.y + m - 1) % m;
        [
            (Edge::h(v.x, v.y), Vertex::new((v.x + 1) % m, v.y)),
            (Edge::h(left, v.y), Vertex::new(left, v.y)),
            (Edge::v(v.x, v.y), Vertex::new(v.x, (v.y + 1) % m)),
            (Edge::v(v.x, up), Vertex::new(v.x, up)),
        ]
    }

    /// Winding parities contributed by a single edge: horizontal edges crossing
    /// the cut between columns `m-1` and `0`, vertical edges crossing the cut
    /// between rows `m-1` and `0`.
    pub fn crossing(self, e: Edge) -> HomologyClass {
        let last = self.m() - 1;
        match e.orientation {
            Orientation::H => HomologyClass::new(e.x == last, false),
            Orientation::V => HomologyClass::new(false, e.y == last),
        }
    }
}

impl fmt::Display for TorusLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "k={} (m={}, n={})", self.k, self.m(), self.n())
    }
}

/// A lattice vertex. Ordered row-major, matching the vertex index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Vertex {
    pub x: u32,
    pub y: u32,
}

impl Vertex {
    pub const fn new(x: u32, y: u32) -> Self {
        Self { x, y }
    }
}

impl Ord for Vertex {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.y, self.x).cmp(&(other.y, other.x))
    }
}

impl PartialOrd for Vertex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Orientation {
    H,
    V,
}

/// A unit edge. `H(x,y)` joins `(x,y)–(x+1,y)`, `V(x,y)` joins `(x,y)–(x,y+1)`.
/// Serialized as its text form `"H x y"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub orientation: Orientation,
    pub x: u32,
    pub y: u32,
}

impl Edge {
    pub const fn new(orientation: Orientation, x: u32, y: u32) -> Self {
        Self { orientation, x, y }
    }

    pub const fn h(x: u32, y: u32) -> Self {
        Self::new(Orientation::H, x, y)
    }

    pub const fn v(x: u32, y: u32) -> Self {
        Self::new(Orientation::V, x, y)
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let o = match self.orientation {
            Orientation::H => 'H',
            Orientation::V => 'V',
        };
        write!(f, "{} {} {}", o, self.x, self.y)
    }
}

impl FromStr for Edge {
    type Err = Error;

    /// Parses `"H x y"` or `"V x y"`. Coordinates are not range-checked.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("expected `H x y` or `V x y`, got `{s}`"));
        let mut parts = s.split_whitespace();
        let orientation = match parts.next() {
            Some("H") => Orientation::H,
            Some("V") => Orientation::V,
            _ => return Err(bad()),
        };
        let mut coord = || parts.next().and_then(|t| t.parse::<u32>().ok()).ok_or_else(bad);
        let (x, y) = (coord()?, coord()?);
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(Edge::new(orientation, x, y))
    }
}

impl Serialize for Edge {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Edge {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A set of unit edges stored as a dense bit vector over the `n` edges.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct EdgeSet {
    level: TorusLevel,
    bits: BitVec<u64, Lsb0>,
}

impl EdgeSet {
    pub fn empty(level: TorusLevel) -> Self {
        Self {
            level,
            bits: bitvec![u64, Lsb0; 0; level.n()],
        }
    }

    pub fn full(level: TorusLevel) -> Self {
        Self {
            level,
            bits: bitvec![u64, Lsb0; 1; level.n()],
        }
    }

    pub fn from_edges<I: IntoIterator<Item = Edge>>(level: TorusLevel, edges: I) -> Self {
        let mut set = Self::empty(level);
        for e in edges {
            set.insert(e);
        }
        set
    }

    /// Builds a set by XOR-ing in every edge, so repeated edges cancel.
    pub fn from_edges_mod2<I: IntoIterator<Item = Edge>>(level: TorusLevel, edges: I) -> Self {
        let mut set = Self::empty(level);
        for e in edges {
            set.toggle(e);
        }
        set
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(level: TorusLevel, indices: I) -> Self {
        let mut set = Self::empty(level);
        for i in indices {
            set.bits.set(i, true);
        }
        set
    }

    pub fn level(&self) -> TorusLevel {
        self.level
    }

    pub fn contains(&self, e: Edge) -> bool {
        self.bits[self.level.edge_index(e)]
    }

    pub fn insert(&mut self, e: Edge) {
        let i = self.level.edge_index(e);
        self.bits.set(i, true);
    }

    pub fn remove(&mut self, e: Edge) {
        let i = self.level.edge_index(e);
        self.bits.set(i, false);
    }

    pub fn toggle(&mut self, e: Edge) {
        let i = self.level.edge_index(e);
        let old = self.bits[i];
        self.bits.set(i, !old);
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.bits.count_ones()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.not_any()
    }

    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.iter_ones()
    }

    /// Edges in increasing linear-index order.
    pub fn iter(&self) -> impl Iterator<Item = Edge> + '_ {
        self.bits.iter_ones().map(move |i| self.level.edge_at(i))
    }

    pub fn to_vec(&self) -> Vec<Edge> {
        self.iter().collect()
    }

    /// True when every edge lies on the horizontal line `y = 0`.
    pub fn is_row_supported(&self) -> bool {
        self.iter()
            .all(|e| e.orientation == Orientation::H && e.y == 0)
    }
}

impl BitXorAssign<&EdgeSet> for EdgeSet {
    fn bitxor_assign(&mut self, rhs: &EdgeSet) {
        assert_eq!(self.level, rhs.level, "edge sets from different levels");
        self.bits ^= rhs.bits.as_bitslice();
    }
}

impl BitXor<&EdgeSet> for &EdgeSet {
    type Output = EdgeSet;

    fn bitxor(self, rhs: &EdgeSet) -> EdgeSet {
        let mut out = self.clone();
        out ^= rhs;
        out
    }
}

impl fmt::Debug for EdgeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EdgeSet")
            .field("k", &self.level.k())
            .field("edges", &self.iter().map(|e| e.to_string()).collect::<Vec<_>>())
            .finish()
    }
}

/// A set of vertices, used as a syndrome.
///
/// Syndromes computed from edge sets always have even cardinality; sets built
/// by hand may not, and the decoder rejects those.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SyndromeSet {
    level: TorusLevel,
    vertices: BTreeSet<Vertex>,
}

impl SyndromeSet {
    pub fn empty(level: TorusLevel) -> Self {
        Self {
            level,
            vertices: BTreeSet::new(),
        }
    }

    /// Collects vertices with set semantics; coordinates must be in range.
    pub fn from_vertices<I: IntoIterator<Item = Vertex>>(level: TorusLevel, vertices: I) -> Result<Self> {
        let mut set = Self::empty(level);
        for v in vertices {
            if !level.contains_vertex(v) {
                return Err(Error::InvalidSyndrome(format!("vertex {v} outside the torus {level}")));
            }
            set.vertices.insert(v);
        }
        Ok(set)
    }

    pub fn level(&self) -> TorusLevel {
        self.level
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.vertices.contains(&v)
    }

    pub fn toggle(&mut self, v: Vertex) {
        if !self.vertices.remove(&v) {
            self.vertices.insert(v);
        }
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.vertices.iter().copied()
    }

    pub fn symmetric_difference(&self, other: &SyndromeSet) -> SyndromeSet {
        SyndromeSet {
            level: self.level,
            vertices: self.vertices.symmetric_difference(&other.vertices).copied().collect(),
        }
    }

    /// True when every vertex lies on the stage-`i` sublattice.
    pub fn within_stage(&self, stage: u32) -> bool {
        self.iter().all(|v| in_sublattice(self.level, v, stage))
    }
}

/// Homology class of a cycle as a pair of winding parities.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct HomologyClass {
    /// Parity of crossings of the vertical cut `x = m-1 → 0`.
    pub wind_h: bool,
    /// Parity of crossings of the horizontal cut `y = m-1 → 0`.
    pub wind_v: bool,
}

impl HomologyClass {
    pub const TRIVIAL: HomologyClass = HomologyClass {
        wind_h: false,
        wind_v: false,
    };

    pub const fn new(wind_h: bool, wind_v: bool) -> Self {
        Self { wind_h, wind_v }
    }

    pub fn is_trivial(self) -> bool {
        !self.wind_h && !self.wind_v
    }
}

impl BitXor for HomologyClass {
    type Output = HomologyClass;

    fn bitxor(self, rhs: Self) -> Self {
        HomologyClass::new(self.wind_h ^ rhs.wind_h, self.wind_v ^ rhs.wind_v)
    }
}

impl BitXorAssign for HomologyClass {
    fn bitxor_assign(&mut self, rhs: Self) {
        *self = *self ^ rhs;
    }
}

impl fmt::Display for HomologyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.wind_h as u8, self.wind_v as u8)
    }
}

/// Vertices incident to an odd number of edges of `e`.
pub fn syndrome(e: &EdgeSet) -> SyndromeSet {
    let level = e.level();
    let mut parity = bitvec![u64, Lsb0; 0; level.vertex_count()];
    for edge in e.iter() {
        let (a, b) = level.endpoints(edge);
        let ia = level.vertex_index(a);
        let ib = level.vertex_index(b);
        let va = parity[ia];
        parity.set(ia, !va);
        let vb = parity[ib];
        parity.set(ib, !vb);
    }
    SyndromeSet {
        level,
        vertices: parity.iter_ones().map(|i| level.vertex_at(i)).collect(),
    }
}

/// Syndrome of a sparse list of edges, XOR semantics.
pub fn syndrome_of_edges<'a, I>(level: TorusLevel, edges: I) -> SyndromeSet
where
    I: IntoIterator<Item = &'a Edge>,
{
    let mut s = SyndromeSet::empty(level);
    for &edge in edges {
        let (a, b) = level.endpoints(edge);
        s.toggle(a);
        s.toggle(b);
    }
    s
}

/// Winding parities of a cycle. Fails if `c` has a nonempty boundary.
pub fn homology_class(c: &EdgeSet) -> Result<HomologyClass> {
    let boundary = syndrome(c).len();
    if boundary != 0 {
        return Err(Error::NonCycleInput(boundary));
    }
    Ok(crossing_parity(c.level(), c.iter()))
}

/// The linear functional behind [`homology_class`], without the cycle check.
pub fn crossing_parity<I: IntoIterator<Item = Edge>>(level: TorusLevel, edges: I) -> HomologyClass {
    edges
        .into_iter()
        .fold(HomologyClass::TRIVIAL, |acc, e| acc ^ level.crossing(e))
}

/// Whether `v` belongs to the stage-`i` sublattice `V_i`.
pub fn in_sublattice(level: TorusLevel, v: Vertex, stage: u32) -> bool {
    let g = level.spacing(stage);
    v.x.is_multiple_of(g) && v.y.is_multiple_of(g)
}

fn wrapped(delta: u32, m: u32) -> u32 {
    delta.min(m - delta)
}

/// Graph distance between two stage-`i` vertices in the stage-`i` tiling.
pub fn torus_distance(level: TorusLevel, a: Vertex, b: Vertex, stage: u32) -> Result<u32> {
    level.check_stage(stage)?;
    for v in [a, b] {
        if !level.contains_vertex(v) || !in_sublattice(level, v, stage) {
            return Err(Error::NotInSublattice { vertex: v, stage });
        }
    }
    let m = level.m();
    let dx = wrapped(a.x.abs_diff(b.x), m);
    let dy = wrapped(a.y.abs_diff(b.y), m);
    Ok((dx + dy) / level.spacing(stage))
}

/// Side of a cell: top, bottom, left or right.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    T,
    B,
    L,
    R,
}

/// Unit edges of one side of the `g × g` cell anchored at `anchor`.
pub fn cell_side_edges(level: TorusLevel, anchor: Vertex, side: Side, g: u32) -> impl Iterator<Item = Edge> {
    let m = level.m();
    let (x0, y0) = (anchor.x, anchor.y);
    (0..g).map(move |j| match side {
        Side::T => Edge::h((x0 + j) % m, y0),
        Side::B => Edge::h((x0 + j) % m, (y0 + g) % m),
        Side::L => Edge::v(x0, (y0 + j) % m),
        Side::R => Edge::v((x0 + g) % m, (y0 + j) % m),
    })
}

/// A cell side lifted to the unit edges of the level-`k` torus.
pub fn lift_cell_side(level: TorusLevel, anchor: Vertex, side: Side, g: u32) -> EdgeSet {
    EdgeSet::from_edges(level, cell_side_edges(level, anchor, side, g))
}

/// The four edges bounding the unit face anchored at `anchor`.
pub fn face_edges(level: TorusLevel, anchor: Vertex) -> [Edge; 4] {
    let m = level.m();
    let (x, y) = (anchor.x, anchor.y);
    [
        Edge::h(x, y),
        Edge::h(x, (y + 1) % m),
        Edge::v(x, y),
        Edge::v((x + 1) % m, y),
    ]
}

/// All `m²` unit faces, row-major by anchor.
pub fn faces(level: TorusLevel) -> impl Iterator<Item = EdgeSet> {
    (0..level.vertex_count()).map(move |i| EdgeSet::from_edges(level, face_edges(level, level.vertex_at(i))))
}

/// The horizontal line `{H(x, y) : 0 ≤ x < m}`.
pub fn full_row(level: TorusLevel, y: u32) -> EdgeSet {
    EdgeSet::from_edges(level, (0..level.m()).map(|x| Edge::h(x, y)))
}

/// The vertical line `{V(x, y) : 0 ≤ y < m}`.
pub fn full_column(level: TorusLevel, x: u32) -> EdgeSet {
    EdgeSet::from_edges(level, (0..level.m()).map(|y| Edge::v(x, y)))
}
