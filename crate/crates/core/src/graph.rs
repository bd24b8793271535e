//! Simple undirected graphs with densified vertex ids.
//!
//! Every computation in the crate runs on [`Graph`]: vertices are `0..n`,
//! adjacency lists are sorted and symmetric, and self-loops or duplicate
//! edges can never be represented. Graphs are immutable once built; edits
//! such as removing a single link return a new graph.

use std::collections::{HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An undirected link, stored with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Link {
    u: u32,
    v: u32,
}

impl Link {
    /// Builds a normalized link. Returns `None` for a self-loop.
    pub fn new(a: usize, b: usize) -> Option<Link> {
        if a == b {
            return None;
        }
        let (u, v) = if a < b { (a, b) } else { (b, a) };
        Some(Link { u: u as u32, v: v as u32 })
    }

    pub fn u(&self) -> usize {
        self.u as usize
    }

    pub fn v(&self) -> usize {
        self.v as usize
    }

    pub fn endpoints(&self) -> (usize, usize) {
        (self.u(), self.v())
    }

    pub fn touches(&self, x: usize) -> bool {
        self.u() == x || self.v() == x
    }
}

impl fmt::Display for Link {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.u, self.v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EditMode {
    Remove,
    Add,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<u32>>,
    m: usize,
    labels: Option<Vec<String>>,
}

/// Result of validating a graph. Never mutates the input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub connected: bool,
    pub min_degree: usize,
    pub component_count: usize,
}

/// Counts of the lines the loader dropped.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LoadWarnings {
    pub duplicate_edges: usize,
    pub self_loops: usize,
}

impl LoadWarnings {
    pub fn total(&self) -> usize {
        self.duplicate_edges + self.self_loops
    }
}

#[derive(Debug, Clone)]
pub struct LoadedGraph {
    pub graph: Graph,
    pub warnings: LoadWarnings,
}

impl Graph {
    /// Builds a graph on `n` vertices from an edge iterator. Self-loops and
    /// repeated edges are silently dropped.
    pub fn from_edges<I>(n: usize, edges: I) -> Graph
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
        for (a, b) in edges {
            assert!(a < n && b < n, "edge ({a}, {b}) outside 0..{n}");
            if a == b {
                continue;
            }
            adj[a].push(b as u32);
            adj[b].push(a as u32);
        }
        let mut m2 = 0;
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
            m2 += list.len();
        }
        Graph { adj, m: m2 / 2, labels: None }
    }

    pub fn from_links<'a, I>(n: usize, links: I) -> Graph
    where
        I: IntoIterator<Item = &'a Link>,
    {
        Graph::from_edges(n, links.into_iter().map(|l| l.endpoints()))
    }

    /// Graph on `n` vertices with no edges.
    pub fn empty(n: usize) -> Graph {
        Graph { adj: vec![Vec::new(); n], m: 0, labels: None }
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adj[v]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        if a >= self.n() || b >= self.n() || a == b {
            return false;
        }
        let (x, y) = if self.adj[a].len() <= self.adj[b].len() { (a, b) } else { (b, a) };
        self.adj[x].binary_search(&(y as u32)).is_ok()
    }

    pub fn has_link(&self, link: Link) -> bool {
        self.has_edge(link.u(), link.v())
    }

    /// All links in lexicographic order.
    pub fn links(&self) -> Vec<Link> {
        let mut out = Vec::with_capacity(self.m);
        for (u, list) in self.adj.iter().enumerate() {
            for &v in list {
                if (v as usize) > u {
                    out.push(Link { u: u as u32, v });
                }
            }
        }
        out
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn min_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).min().unwrap_or(0)
    }

    pub fn average_degree(&self) -> f64 {
        if self.n() == 0 {
            0.0
        } else {
            2.0 * self.m as f64 / self.n() as f64
        }
    }

    /// Original vertex label, if the graph was loaded from text.
    pub fn label(&self, v: usize) -> Option<&str> {
        self.labels.as_ref().map(|l| l[v].as_str())
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Same structure carrying another graph's labels (used for perturbed
    /// outputs, which live on the identical vertex set).
    pub fn with_labels_of(mut self, other: &Graph) -> Graph {
        if other.n() == self.n() {
            self.labels = other.labels.clone();
        }
        self
    }

    pub fn edit_link(&self, link: Link, mode: EditMode) -> Result<Graph> {
        if link.v() >= self.n() {
            return Err(Error::VertexOutOfRange(link.v()));
        }
        let present = self.has_link(link);
        let mut adj = self.adj.clone();
        let (u, v) = link.endpoints();
        let m = match mode {
            EditMode::Remove => {
                if !present {
                    return Err(Error::MissingLink(link));
                }
                adj[u].retain(|&x| x as usize != v);
                adj[v].retain(|&x| x as usize != u);
                self.m - 1
            }
            EditMode::Add => {
                if present {
                    return Err(Error::DuplicateLink(link));
                }
                let pos = adj[u].binary_search(&(v as u32)).unwrap_err();
                adj[u].insert(pos, v as u32);
                let pos = adj[v].binary_search(&(u as u32)).unwrap_err();
                adj[v].insert(pos, u as u32);
                self.m + 1
            }
        };
        Ok(Graph { adj, m, labels: self.labels.clone() })
    }

    pub fn without_link(&self, link: Link) -> Result<Graph> {
        self.edit_link(link, EditMode::Remove)
    }

    pub fn with_link(&self, link: Link) -> Result<Graph> {
        self.edit_link(link, EditMode::Add)
    }

    /// Component id per vertex and the number of components.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let n = self.n();
        let mut comp = vec![usize::MAX; n];
        let mut count = 0;
        let mut queue = VecDeque::new();
        for s in 0..n {
            if comp[s] != usize::MAX {
                continue;
            }
            comp[s] = count;
            queue.push_back(s);
            while let Some(x) = queue.pop_front() {
                for &y in &self.adj[x] {
                    let y = y as usize;
                    if comp[y] == usize::MAX {
                        comp[y] = count;
                        queue.push_back(y);
                    }
                }
            }
            count += 1;
        }
        (comp, count)
    }

    pub fn is_connected(&self) -> bool {
        self.n() > 0 && self.components().1 == 1
    }

    pub fn validate(&self) -> ValidationReport {
        let (_, count) = self.components();
        ValidationReport {
            connected: self.n() > 0 && count == 1,
            min_degree: self.min_degree(),
            component_count: count,
        }
    }

    /// Errors unless the graph is connected with at least one edge.
    pub fn require_connected(&self) -> Result<()> {
        let (_, count) = self.components();
        if count != 1 || self.m == 0 {
            return Err(Error::Disconnected { components: count });
        }
        Ok(())
    }

    /// Hop distances from `src`; `usize::MAX` marks unreachable vertices.
    pub fn bfs_distances(&self, src: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n()];
        dist[src] = 0;
        let mut queue = VecDeque::from([src]);
        while let Some(x) = queue.pop_front() {
            let d = dist[x] + 1;
            for &y in &self.adj[x] {
                let y = y as usize;
                if dist[y] == usize::MAX {
                    dist[y] = d;
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// Two-colouring check over every component.
    pub fn is_bipartite(&self) -> bool {
        let n = self.n();
        let mut colour = vec![u8::MAX; n];
        let mut queue = VecDeque::new();
        for s in 0..n {
            if colour[s] != u8::MAX {
                continue;
            }
            colour[s] = 0;
            queue.push_back(s);
            while let Some(x) = queue.pop_front() {
                for &y in &self.adj[x] {
                    let y = y as usize;
                    if colour[y] == u8::MAX {
                        colour[y] = 1 - colour[x];
                        queue.push_back(y);
                    } else if colour[y] == colour[x] {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Largest connected component as a new graph, with the map from new
    /// ids back to ids in `self`.
    pub fn largest_component(&self) -> (Graph, Vec<usize>) {
        let (comp, count) = self.components();
        let mut sizes = vec![0usize; count];
        for &c in &comp {
            sizes[c] += 1;
        }
        let best = (0..count).max_by_key(|&c| (sizes[c], std::cmp::Reverse(c))).unwrap_or(0);
        let keep: Vec<usize> = (0..self.n()).filter(|&v| comp[v] == best).collect();
        let mut index = vec![usize::MAX; self.n()];
        for (new, &old) in keep.iter().enumerate() {
            index[old] = new;
        }
        let edges = self
            .links()
            .into_iter()
            .filter(|l| comp[l.u()] == best)
            .map(|l| (index[l.u()], index[l.v()]));
        let mut g = Graph::from_edges(keep.len(), edges);
        if let Some(labels) = &self.labels {
            g.labels = Some(keep.iter().map(|&v| labels[v].clone()).collect());
        }
        (g, keep)
    }

    /// Edge-list text, one `u v` pair per line in lexicographic order.
    pub fn to_edge_list(&self, original_labels: bool) -> String {
        let mut out = String::with_capacity(self.m * 12);
        for link in self.links() {
            let (u, v) = link.endpoints();
            match (&self.labels, original_labels) {
                (Some(labels), true) => {
                    out.push_str(&labels[u]);
                    out.push(' ');
                    out.push_str(&labels[v]);
                }
                _ => {
                    out.push_str(&u.to_string());
                    out.push(' ');
                    out.push_str(&v.to_string());
                }
            }
            out.push('\n');
        }
        out
    }
}

/// Parses a whitespace-separated edge list. Lines starting with `#` or `%`
/// are comments; columns after the second are ignored. Labels are densified
/// in order of first appearance.
pub fn load_edge_list(text: &str) -> Result<LoadedGraph> {
    let mut index: HashMap<&str, u32> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut raw: Vec<(u32, u32)> = Vec::new();
    let mut warnings = LoadWarnings::default();

    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (a, b) = match (fields.next(), fields.next()) {
            (Some(a), Some(b)) => (a, b),
            _ => {
                return Err(Error::Parse {
                    line: lineno + 1,
                    reason: format!("expected two vertex labels, found {trimmed:?}"),
                })
            }
        };
        let ia = *index.entry(a).or_insert_with(|| {
            labels.push(a.to_string());
            (labels.len() - 1) as u32
        });
        let ib = *index.entry(b).or_insert_with(|| {
            labels.push(b.to_string());
            (labels.len() - 1) as u32
        });
        if ia == ib {
            warnings.self_loops += 1;
            continue;
        }
        raw.push(if ia < ib { (ia, ib) } else { (ib, ia) });
    }

    let before = raw.len();
    raw.sort_unstable();
    raw.dedup();
    warnings.duplicate_edges = before - raw.len();
    if raw.is_empty() {
        return Err(Error::EmptyGraph);
    }

    let mut graph = Graph::from_edges(labels.len(), raw.iter().map(|&(a, b)| (a as usize, b as usize)));
    graph.labels = Some(labels);
    Ok(LoadedGraph { graph, warnings })
}
