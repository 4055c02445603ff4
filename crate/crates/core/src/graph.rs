//! Simple undirected graphs and the combinatorial predicates used throughout
//! the crate: girth, regularity and bipartiteness, independence, induced
//! 1-factors and homomorphisms.

use std::collections::VecDeque;
use std::fmt;
use std::io::{BufRead, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Vertex = usize;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(Vertex, Vertex),
    #[error("vertex {vertex} out of range (n = {n})")]
    VertexOutOfRange { vertex: Vertex, n: usize },
    #[error("vertex {vertex} has degree {degree}, expected {expected}")]
    NotRegular { vertex: Vertex, degree: usize, expected: usize },
    #[error("graph is not bipartite; odd cycle {0:?}")]
    NotBipartite(Vec<Vertex>),
    #[error("one-factor search limited to |B| <= {limit}, got {size}")]
    SizeLimit { size: usize, limit: usize },
    #[error("edge list parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("i/o error: {0}")]
    Io(String),
}

/// Undirected simple graph on vertices `0..n`.
///
/// Edges are stored as sorted `(u, v)` pairs with `u < v`; adjacency lists
/// are sorted. Both are derived from the same input and never mutated.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
    adj: Vec<Vec<Vertex>>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, m={})", self.n, self.edges.len())
    }
}

impl Graph {
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut list = Vec::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            list.push((u.min(v), u.max(v)));
        }
        list.sort_unstable();
        if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
            return Err(GraphError::DuplicateEdge(w[0].0, w[0].1));
        }
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &list {
            adj[u].push(v);
            adj[v].push(u);
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        Ok(Graph { n, edges: list, adj })
    }

    pub fn empty(n: usize) -> Self {
        Graph { n, edges: Vec::new(), adj: vec![Vec::new(); n] }
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3);
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle is simple")
    }

    pub fn path(n: usize) -> Self {
        Graph::new(n, (1..n).map(|i| (i - 1, i))).expect("path is simple")
    }

    pub fn complete(n: usize) -> Self {
        Graph::new(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).expect("complete graph is simple")
    }

    pub fn star(leaves: usize) -> Self {
        Graph::new(leaves + 1, (1..=leaves).map(|v| (0, v))).expect("star is simple")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.n && v < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    /// Index of edge `uv` in [`Graph::edges`].
    pub fn edge_index(&self, u: Vertex, v: Vertex) -> Option<usize> {
        self.edges.binary_search(&(u.min(v), u.max(v))).ok()
    }

    /// A copy of the graph with the given edges removed (absent edges ignored).
    pub fn without_edges(&self, remove: &[(Vertex, Vertex)]) -> Graph {
        let mut drop: Vec<(Vertex, Vertex)> = remove.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        drop.sort_unstable();
        let kept = self.edges.iter().copied().filter(|e| drop.binary_search(e).is_err());
        Graph::new(self.n, kept).expect("subgraph of a simple graph is simple")
    }

    /// Union of this graph with extra edges on the same vertex set.
    pub fn with_edges<I>(&self, extra: I) -> Result<Graph, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        Graph::new(self.n, self.edges.iter().copied().chain(extra))
    }

    /// Relabels vertices so that old vertex `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[Vertex]) -> Graph {
        assert_eq!(perm.len(), self.n);
        Graph::new(self.n, self.edges.iter().map(|&(u, v)| (perm[u], perm[v])))
            .expect("relabeling must be a permutation")
    }

    pub fn check_vertex(&self, v: Vertex) -> Result<(), GraphError> {
        if v < self.n {
            Ok(())
        } else {
            Err(GraphError::VertexOutOfRange { vertex: v, n: self.n })
        }
    }

    /// Breadth-first distances from `src`, stopping after `max_depth`.
    /// Unreached vertices get `usize::MAX`.
    pub fn bfs_distances(&self, src: Vertex, max_depth: usize) -> Vec<usize> {
        self.multi_source_distances(&[src], max_depth)
    }

    pub fn multi_source_distances(&self, sources: &[Vertex], max_depth: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s] != 0 {
                dist[s] = 0;
                queue.push_back(s);
            }
        }
        while let Some(u) = queue.pop_front() {
            if dist[u] >= max_depth {
                continue;
            }
            for &w in &self.adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Connected components as sorted vertex lists, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                let u = comp[i];
                i += 1;
                for &w in &self.adj[u] {
                    if !seen[w] {
                        seen[w] = true;
                        comp.push(w);
                    }
                }
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Induced subgraph on `vertices` (relabeled `0..k` in the given order).
    pub fn induced(&self, vertices: &[Vertex]) -> Graph {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in vertices.iter().enumerate() {
            pos[v] = i;
        }
        let edges = self
            .edges
            .iter()
            .filter(|&&(u, v)| pos[u] != usize::MAX && pos[v] != usize::MAX)
            .map(|&(u, v)| (pos[u], pos[v]));
        Graph::new(vertices.len(), edges).expect("induced subgraph is simple")
    }

    pub fn write_edge_list<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{} {}", self.n, self.edges.len())?;
        for &(u, v) in &self.edges {
            writeln!(w, "{u} {v}")?;
        }
        Ok(())
    }

    pub fn to_edge_list(&self) -> String {
        let mut buf = Vec::new();
        self.write_edge_list(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("edge list is ASCII")
    }

    /// Parses the `"<n> <m>"` header + `"<u> <v>"` lines format; `#` lines are comments.
    pub fn read_edge_list<R: BufRead>(r: R) -> Result<Graph, GraphError> {
        let mut header: Option<(usize, usize)> = None;
        let mut edges = Vec::new();
        for (i, line) in r.lines().enumerate() {
            let line = line.map_err(|e| GraphError::Io(e.to_string()))?;
            let t = line.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let nums: Vec<usize> = t
                .split_whitespace()
                .map(|x| x.parse::<usize>())
                .collect::<Result<_, _>>()
                .map_err(|e| GraphError::Parse { line: i + 1, msg: e.to_string() })?;
            if nums.len() != 2 {
                return Err(GraphError::Parse { line: i + 1, msg: format!("expected 2 integers, got {}", nums.len()) });
            }
            match header {
                None => header = Some((nums[0], nums[1])),
                Some(_) => edges.push((nums[0], nums[1])),
            }
        }
        let (n, m) = header.ok_or(GraphError::Parse { line: 0, msg: "missing header".into() })?;
        if edges.len() != m {
            return Err(GraphError::Parse {
                line: 0,
                msg: format!("header announces {m} edges, found {}", edges.len()),
            });
        }
        Graph::new(n, edges)
    }

    pub fn parse_edge_list(s: &str) -> Result<Graph, GraphError> {
        Graph::read_edge_list(s.as_bytes())
    }
}

/// Length of a shortest cycle; `Infinite` for forests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Girth {
    Finite(usize),
    Infinite,
}

impl Girth {
    pub fn finite(self) -> Option<usize> {
        match self {
            Girth::Finite(g) => Some(g),
            Girth::Infinite => None,
        }
    }

    /// `true` iff the girth is strictly larger than `g`.
    pub fn exceeds(self, g: usize) -> bool {
        match self {
            Girth::Finite(x) => x > g,
            Girth::Infinite => true,
        }
    }
}

/// Serialized as the cycle length, or `"inf"`.
impl Serialize for Girth {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Girth::Finite(g) => s.serialize_u64(*g as u64),
            Girth::Infinite => s.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Girth {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Len(usize),
            Word(String),
        }
        match Raw::deserialize(d)? {
            Raw::Len(g) => Ok(Girth::Finite(g)),
            Raw::Word(w) if w == "inf" => Ok(Girth::Infinite),
            Raw::Word(w) => Err(serde::de::Error::custom(format!("bad girth {w:?}"))),
        }
    }
}

impl fmt::Display for Girth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Girth::Finite(g) => write!(f, "{g}"),
            Girth::Infinite => write!(f, "inf"),
        }
    }
}

/// Distance from `u` to `v` in `g` with edge `uv` deleted, searching no deeper than `limit`.
fn distance_avoiding_edge(
    g: &Graph,
    u: Vertex,
    v: Vertex,
    limit: usize,
    dist: &mut [usize],
    touched: &mut Vec<Vertex>,
) -> Option<usize> {
    let mut queue = VecDeque::new();
    dist[u] = 0;
    touched.push(u);
    queue.push_back(u);
    let mut found = None;
    'outer: while let Some(x) = queue.pop_front() {
        if dist[x] >= limit {
            break;
        }
        for &w in g.neighbors(x) {
            if x == u && w == v {
                continue;
            }
            if dist[w] == usize::MAX {
                dist[w] = dist[x] + 1;
                touched.push(w);
                if w == v {
                    found = Some(dist[w]);
                    break 'outer;
                }
                queue.push_back(w);
            }
        }
    }
    for &t in touched.iter() {
        dist[t] = usize::MAX;
    }
    touched.clear();
    found
}

/// Exact girth: for every edge `uv`, delete it and measure the `u`-`v` distance.
///
/// Searches are depth-bounded by the best cycle found so far, so the cost on
/// large-girth graphs is dominated by balls of radius `girth - 1`.
pub fn girth(g: &Graph) -> Girth {
    girth_with_jobs(g, 1)
}

/// [`girth`] with the per-edge scans split across `jobs` worker threads.
pub fn girth_with_jobs(g: &Graph, jobs: usize) -> Girth {
    if g.m() == 0 {
        return Girth::Infinite;
    }
    let scan = |edges: &[(Vertex, Vertex)]| -> usize {
        let mut best = usize::MAX;
        let mut dist = vec![usize::MAX; g.n()];
        let mut touched = Vec::new();
        for &(u, v) in edges {
            let limit = if best == usize::MAX { usize::MAX } else { best.saturating_sub(2) };
            if limit == 0 {
                break;
            }
            if let Some(d) = distance_avoiding_edge(g, u, v, limit, &mut dist, &mut touched) {
                best = best.min(d + 1);
            }
        }
        best
    };
    let best = if jobs <= 1 {
        scan(g.edges())
    } else {
        let chunk = g.m().div_ceil(jobs * 4).max(1);
        g.edges().par_chunks(chunk).map(scan).min().unwrap_or(usize::MAX)
    };
    if best == usize::MAX {
        Girth::Infinite
    } else {
        Girth::Finite(best)
    }
}

/// The two sides of a bipartite graph, each a sorted vertex list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bipartition {
    #[serde(rename = "A")]
    pub a: Vec<Vertex>,
    #[serde(rename = "B")]
    pub b: Vec<Vertex>,
}

impl Bipartition {
    pub fn new(mut a: Vec<Vertex>, mut b: Vec<Vertex>) -> Self {
        a.sort_unstable();
        b.sort_unstable();
        Bipartition { a, b }
    }

    /// `true` iff the sides partition `0..g.n()` and every edge crosses.
    pub fn is_valid_for(&self, g: &Graph) -> bool {
        let mut side = vec![0u8; g.n()];
        let tagged = self.a.iter().map(|&v| (v, 1u8)).chain(self.b.iter().map(|&v| (v, 2u8)));
        for (v, s) in tagged {
            if v >= g.n() || side[v] != 0 {
                return false;
            }
            side[v] = s;
        }
        side.iter().all(|&s| s != 0) && g.edges().iter().all(|&(u, v)| side[u] != side[v])
    }

    /// Side membership as a dense vector: `true` for `A`.
    pub fn a_mask(&self, n: usize) -> Vec<bool> {
        let mut mask = vec![false; n];
        for &v in &self.a {
            mask[v] = true;
        }
        mask
    }
}

/// Two-colors each component, then confirms every vertex has degree `d`.
pub fn check_regular_bipartite(g: &Graph, d: usize) -> Result<Bipartition, GraphError> {
    let bip = two_color(g)?;
    for v in 0..g.n() {
        if g.degree(v) != d {
            return Err(GraphError::NotRegular { vertex: v, degree: g.degree(v), expected: d });
        }
    }
    Ok(bip)
}

/// 2-coloring by BFS; the first vertex of each component goes to `A`.
pub fn two_color(g: &Graph) -> Result<Bipartition, GraphError> {
    let n = g.n();
    let mut color = vec![u8::MAX; n];
    let mut parent = vec![usize::MAX; n];
    for s in 0..n {
        if color[s] != u8::MAX {
            continue;
        }
        color[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &w in g.neighbors(u) {
                if color[w] == u8::MAX {
                    color[w] = 1 - color[u];
                    parent[w] = u;
                    queue.push_back(w);
                } else if color[w] == color[u] {
                    return Err(GraphError::NotBipartite(odd_cycle(&parent, u, w)));
                }
            }
        }
    }
    let a = (0..n).filter(|&v| color[v] == 0).collect();
    let b = (0..n).filter(|&v| color[v] == 1).collect();
    Ok(Bipartition { a, b })
}

/// Closes the BFS-tree paths from `u` and `w` (same color, adjacent) into an odd cycle.
fn odd_cycle(parent: &[usize], u: Vertex, w: Vertex) -> Vec<Vertex> {
    let path_to_root = |mut x: Vertex| {
        let mut p = vec![x];
        while parent[x] != usize::MAX {
            x = parent[x];
            p.push(x);
        }
        p
    };
    let pu = path_to_root(u);
    let pw = path_to_root(w);
    // strip the common suffix, keeping the lowest common ancestor once
    let mut i = pu.len();
    let mut j = pw.len();
    while i > 1 && j > 1 && pu[i - 2] == pw[j - 2] {
        i -= 1;
        j -= 1;
    }
    let mut cycle: Vec<Vertex> = pu[..i].to_vec();
    cycle.extend(pw[..j - 1].iter().rev());
    cycle
}

/// `true` iff no edge of `g` has both endpoints in `s`.
pub fn is_independent(g: &Graph, s: &[Vertex]) -> Result<bool, GraphError> {
    for &v in s {
        g.check_vertex(v)?;
    }
    Ok(independence_witness(g, s).is_none())
}

/// Some edge inside `s`, if any. Vertices must be in range.
pub fn independence_witness(g: &Graph, s: &[Vertex]) -> Option<(Vertex, Vertex)> {
    if s.len() < 2 {
        return None;
    }
    if s.len() * 8 < g.n() {
        let mut sorted = s.to_vec();
        sorted.sort_unstable();
        for &u in &sorted {
            for &w in g.neighbors(u) {
                if w > u && sorted.binary_search(&w).is_ok() {
                    return Some((u, w));
                }
            }
        }
        return None;
    }
    let mut mask = vec![false; g.n()];
    for &v in s {
        mask[v] = true;
    }
    for &u in s {
        for &w in g.neighbors(u) {
            if mask[w] {
                return Some((u.min(w), u.max(w)));
            }
        }
    }
    None
}

/// Qualified sets contain an edge.
pub fn is_qualified(g: &Graph, s: &[Vertex]) -> bool {
    independence_witness(g, s).is_some()
}

/// A 1-factor from `B` to `A`: pairs `(b_i, a_i)` with `a_i b_j` an edge iff `i = j`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OneFactor {
    pub pairs: Vec<(Vertex, Vertex)>,
}

impl OneFactor {
    pub fn new(pairs: Vec<(Vertex, Vertex)>) -> Self {
        OneFactor { pairs }
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn b_side(&self) -> Vec<Vertex> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    pub fn a_side(&self) -> Vec<Vertex> {
        self.pairs.iter().map(|p| p.1).collect()
    }

    /// Keeps only the pairs whose `b` endpoint is in `keep`.
    pub fn restrict(&self, keep: &[Vertex]) -> OneFactor {
        OneFactor { pairs: self.pairs.iter().copied().filter(|(b, _)| keep.contains(b)).collect() }
    }
}

/// Why a proposed 1-factor is rejected.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
pub enum FactorDefect {
    #[error("factor does not saturate B (vertex {0} unpaired or repeated)")]
    Unsaturated(Vertex),
    #[error("endpoint {0} is not in the target side or is repeated")]
    BadEndpoint(Vertex),
    #[error("paired vertices {0} and {1} are not adjacent")]
    MissingEdge(Vertex, Vertex),
    #[error("cross pair {0}-{1} is an edge")]
    ForbiddenEdge(Vertex, Vertex),
}

/// Checks `f` is a 1-factor from `b_set` to `a_set` in the induced sense.
pub fn verify_one_factor(g: &Graph, b_set: &[Vertex], a_set: &[Vertex], f: &OneFactor) -> Result<(), FactorDefect> {
    let n = g.n();
    let mut in_b = vec![false; n];
    let mut in_a = vec![false; n];
    for &v in b_set {
        if v >= n {
            return Err(FactorDefect::Unsaturated(v));
        }
        in_b[v] = true;
    }
    for &v in a_set {
        if v >= n {
            return Err(FactorDefect::BadEndpoint(v));
        }
        in_a[v] = true;
    }
    let mut partner = vec![usize::MAX; n];
    let mut b_used = vec![false; n];
    for &(b, a) in &f.pairs {
        if b >= n || !in_b[b] || b_used[b] {
            return Err(FactorDefect::Unsaturated(b));
        }
        b_used[b] = true;
        if a >= n || !in_a[a] || partner[a] != usize::MAX {
            return Err(FactorDefect::BadEndpoint(a));
        }
        partner[a] = b;
    }
    if let Some(&b) = b_set.iter().find(|&&b| !b_used[b]) {
        return Err(FactorDefect::Unsaturated(b));
    }
    for &(b, a) in &f.pairs {
        if !g.has_edge(b, a) {
            return Err(FactorDefect::MissingEdge(b, a));
        }
    }
    for &(b, a) in &f.pairs {
        for &w in g.neighbors(b) {
            if partner[w] != usize::MAX && w != a {
                return Err(FactorDefect::ForbiddenEdge(b, w));
            }
        }
    }
    Ok(())
}

pub const ONE_FACTOR_SEARCH_LIMIT: usize = 20;

/// Backtracking search for an induced 1-factor from `b_set` to `a_set`.
pub fn find_one_factor(g: &Graph, b_set: &[Vertex], a_set: &[Vertex]) -> Result<Option<OneFactor>, GraphError> {
    if b_set.len() > ONE_FACTOR_SEARCH_LIMIT {
        return Err(GraphError::SizeLimit { size: b_set.len(), limit: ONE_FACTOR_SEARCH_LIMIT });
    }
    for &v in b_set.iter().chain(a_set) {
        g.check_vertex(v)?;
    }
    if a_set.len() < b_set.len() {
        return Ok(None);
    }
    let mut chosen: Vec<(Vertex, Vertex)> = Vec::with_capacity(b_set.len());
    if extend_factor(g, b_set, a_set, &mut chosen) {
        Ok(Some(OneFactor::new(chosen)))
    } else {
        Ok(None)
    }
}

fn extend_factor(g: &Graph, b_set: &[Vertex], a_set: &[Vertex], chosen: &mut Vec<(Vertex, Vertex)>) -> bool {
    let k = chosen.len();
    if k == b_set.len() {
        return true;
    }
    let b = b_set[k];
    for &a in a_set {
        if !g.has_edge(b, a) || chosen.iter().any(|&(_, x)| x == a) {
            continue;
        }
        // induced condition against every earlier pair, in both directions
        if chosen.iter().any(|&(pb, pa)| g.has_edge(b, pa) || g.has_edge(pb, a)) {
            continue;
        }
        chosen.push((b, a));
        if extend_factor(g, b_set, a_set, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// `true` iff `phi` maps every edge of `h` onto an edge of `g`.
pub fn check_homomorphism(h: &Graph, g: &Graph, phi: &[Vertex]) -> Result<bool, GraphError> {
    if phi.len() != h.n() {
        return Err(GraphError::VertexOutOfRange { vertex: phi.len(), n: h.n() });
    }
    for &x in phi {
        g.check_vertex(x)?;
    }
    Ok(h.edges().iter().all(|&(u, v)| g.has_edge(phi[u], phi[v])))
}
