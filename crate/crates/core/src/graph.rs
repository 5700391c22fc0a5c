//! Finite multigraphs, the graph families studied by the crate, subdivision
//! and the length conditions that make a subdivision admissible.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type VertexId = usize;
/// Edge ids are dense: the id of an edge is its position in the edge list.
pub type EdgeId = usize;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("edge {0} is a self-loop; subdivide it first")]
    SelfLoop(EdgeId),
    #[error("expected {expected} heights, got {got}")]
    HeightCount { expected: usize, got: usize },
    #[error("malformed graph: {0}")]
    Malformed(String),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

/// A finite multigraph with optional vertex labels and optional doubled heights.
///
/// Parallel edges and self-loops are allowed; they are told apart by edge id.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Graph {
    labels: Vec<Option<String>>,
    edges: Vec<[VertexId; 2]>,
    heights2: Option<Vec<i64>>,
}

impl Graph {
    /// A graph on `n` unlabeled vertices and no edges.
    pub fn with_vertices(n: usize) -> Self {
        Graph {
            labels: vec![None; n],
            edges: Vec::new(),
            heights2: None,
        }
    }

    pub fn add_vertex(&mut self, label: Option<String>) -> VertexId {
        self.labels.push(label);
        if let Some(h) = &mut self.heights2 {
            h.push(0);
        }
        self.labels.len() - 1
    }

    pub fn add_labeled(&mut self, label: impl Into<String>) -> VertexId {
        self.add_vertex(Some(label.into()))
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId) -> Result<EdgeId, GraphError> {
        for w in [u, v] {
            if w >= self.labels.len() {
                return Err(GraphError::UnknownVertex(w));
            }
        }
        self.edges.push([u, v]);
        Ok(self.edges.len() - 1)
    }

    pub fn set_heights2(&mut self, heights: Vec<i64>) -> Result<(), GraphError> {
        if heights.len() != self.labels.len() {
            return Err(GraphError::HeightCount {
                expected: self.labels.len(),
                got: heights.len(),
            });
        }
        self.heights2 = Some(heights);
        Ok(())
    }

    pub fn clear_heights(&mut self) {
        self.heights2 = None;
    }

    pub fn num_vertices(&self) -> usize {
        self.labels.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edge(&self, e: EdgeId) -> [VertexId; 2] {
        self.edges[e]
    }

    pub fn edges(&self) -> &[[VertexId; 2]] {
        &self.edges
    }

    pub fn label(&self, v: VertexId) -> Option<&str> {
        self.labels.get(v).and_then(|l| l.as_deref())
    }

    /// The label of `v`, falling back to its id.
    pub fn display_name(&self, v: VertexId) -> String {
        self.label(v)
            .map(str::to_owned)
            .unwrap_or_else(|| v.to_string())
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<VertexId> {
        self.labels.iter().position(|l| l.as_deref() == Some(label))
    }

    pub fn heights2(&self) -> Option<&[i64]> {
        self.heights2.as_deref()
    }

    /// Degree of `v`; a self-loop counts twice.
    pub fn degree(&self, v: VertexId) -> usize {
        self.edges
            .iter()
            .map(|&[a, b]| (a == v) as usize + (b == v) as usize)
            .sum()
    }

    /// Incident edge ids per vertex. A self-loop is listed once.
    pub fn incidence(&self) -> Vec<Vec<EdgeId>> {
        let mut inc = vec![Vec::new(); self.num_vertices()];
        for (e, &[a, b]) in self.edges.iter().enumerate() {
            inc[a].push(e);
            if b != a {
                inc[b].push(e);
            }
        }
        inc
    }

    pub fn self_loops(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, [a, b])| a == b)
            .map(|(e, _)| e)
    }

    pub fn has_self_loops(&self) -> bool {
        self.self_loops().next().is_some()
    }

    /// The endpoint of `e` opposite to `v`.
    pub fn opposite(&self, e: EdgeId, v: VertexId) -> VertexId {
        let [a, b] = self.edges[e];
        if a == v {
            b
        } else {
            a
        }
    }

    /// Same graph with edges renumbered in canonical order:
    /// by (min endpoint, max endpoint, old id), each written as `[min, max]`.
    pub fn canonical(&self) -> Graph {
        let mut order: Vec<EdgeId> = (0..self.edges.len()).collect();
        order.sort_by_key(|&e| {
            let [a, b] = self.edges[e];
            (a.min(b), a.max(b), e)
        });
        Graph {
            labels: self.labels.clone(),
            edges: order
                .into_iter()
                .map(|e| {
                    let [a, b] = self.edges[e];
                    [a.min(b), a.max(b)]
                })
                .collect(),
            heights2: self.heights2.clone(),
        }
    }

    pub fn to_json(&self) -> GraphJson {
        let g = self.canonical();
        GraphJson {
            vertices: (0..g.num_vertices())
                .map(|v| VertexJson {
                    id: v,
                    label: g.labels[v].clone(),
                    height2: g.heights2.as_ref().map(|h| h[v]),
                })
                .collect(),
            edges: g.edges,
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("graph json is always serializable")
    }

    pub fn from_json(json: &GraphJson) -> Result<Graph, GraphError> {
        let mut vertices: Vec<&VertexJson> = json.vertices.iter().collect();
        vertices.sort_by_key(|v| v.id);
        for (i, v) in vertices.iter().enumerate() {
            if v.id != i {
                return Err(GraphError::Malformed(format!(
                    "vertex ids must be 0..{}, found {}",
                    vertices.len(),
                    v.id
                )));
            }
        }
        let with_height = vertices.iter().filter(|v| v.height2.is_some()).count();
        if with_height != 0 && with_height != vertices.len() {
            return Err(GraphError::Malformed(
                "height2 must be given for every vertex or for none".into(),
            ));
        }
        let mut g = Graph {
            labels: vertices.iter().map(|v| v.label.clone()).collect(),
            edges: Vec::with_capacity(json.edges.len()),
            heights2: None,
        };
        for &[a, b] in &json.edges {
            g.add_edge(a, b)?;
        }
        if with_height > 0 {
            g.heights2 = Some(vertices.iter().map(|v| v.height2.unwrap_or(0)).collect());
        }
        Ok(g)
    }

    pub fn from_json_str(s: &str) -> Result<Graph, GraphError> {
        let json: GraphJson = serde_json::from_str(s)?;
        Graph::from_json(&json)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexJson {
    pub id: VertexId,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height2: Option<i64>,
}

/// On-disk graph format.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<VertexJson>,
    pub edges: Vec<[VertexId; 2]>,
}

/// The graph families that appear in the study of 3-strand braid groups.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GraphFamily {
    /// The cycle on `k` vertices.
    Cycle { k: usize },
    /// Two vertices joined by `m` parallel arcs.
    Theta { m: usize },
    /// `Θ_m` with `n1` rays at `a1` and `n2` rays at `a2`.
    Pulsar { m: usize, n1: usize, n2: usize },
    /// A `2n`-cycle `v1..v2n` with `rays[i]` rays attached at `v(2i+1)`.
    Sun { rays: Vec<usize> },
    /// A wedge of circles and rays at a single vertex.
    Rose { circles: usize, rays: usize },
    /// The path on `k` vertices.
    Path { k: usize },
}

impl GraphFamily {
    pub fn validate(&self) -> Result<(), GraphError> {
        let bad = |msg: String| Err(GraphError::InvalidParameter(msg));
        match self {
            GraphFamily::Cycle { k } if *k < 3 => bad(format!("cycle needs k >= 3, got {k}")),
            GraphFamily::Theta { m } if *m < 1 => bad("theta needs m >= 1".into()),
            GraphFamily::Pulsar { m, .. } if *m < 1 => bad("pulsar needs m >= 1".into()),
            GraphFamily::Sun { rays } if rays.is_empty() => bad("sun needs n >= 1".into()),
            GraphFamily::Path { k } if *k < 1 => bad("path needs k >= 1".into()),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for GraphFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphFamily::Cycle { k } => write!(f, "cycle({k})"),
            GraphFamily::Theta { m } => write!(f, "theta({m})"),
            GraphFamily::Pulsar { m, n1, n2 } => write!(f, "pulsar({m},{n1},{n2})"),
            GraphFamily::Sun { rays } => {
                let r: Vec<String> = rays.iter().map(|x| x.to_string()).collect();
                write!(f, "sun({})", r.join(","))
            }
            GraphFamily::Rose { circles, rays } => write!(f, "rose({circles},{rays})"),
            GraphFamily::Path { k } => write!(f, "path({k})"),
        }
    }
}

/// Labels used by the sun generator: cycle vertex `v{i}`, ray middle
/// `w{j},{k}` and ray tip `v{j},{k}` for the `k`-th ray at `v{j}`.
pub fn sun_tip_label(j: usize, k: usize) -> String {
    format!("v{j},{k}")
}

pub fn sun_middle_label(j: usize, k: usize) -> String {
    format!("w{j},{k}")
}

/// Builds a family member. With `subdivided`, every edge of the family graph
/// carries one extra degree-2 vertex (loops of a rose get three so that they
/// become embedded 4-cycles).
pub fn generate(family: &GraphFamily, subdivided: bool) -> Result<Graph, GraphError> {
    family.validate()?;
    let mut g = Graph::default();
    match family {
        GraphFamily::Cycle { k } => {
            let len = if subdivided { 2 * k } else { *k };
            ring(&mut g, len);
        }
        GraphFamily::Path { k } => {
            let len = if subdivided { 2 * k - 1 } else { *k };
            let ids: Vec<_> = (1..=len).map(|i| g.add_labeled(format!("p{i}"))).collect();
            for w in ids.windows(2) {
                g.add_edge(w[0], w[1])?;
            }
        }
        GraphFamily::Theta { m } => theta(&mut g, *m, subdivided)?,
        GraphFamily::Pulsar { m, n1, n2 } => {
            theta(&mut g, *m, subdivided)?;
            let (a1, a2) = (0, 1);
            for (base, count, mid, tip) in [(a1, *n1, "c", "c"), (a2, *n2, "d", "d")] {
                for i in 1..=count {
                    if subdivided {
                        let x = g.add_labeled(format!("{mid}{i}"));
                        let y = g.add_labeled(format!("{tip}{i}'"));
                        g.add_edge(base, x)?;
                        g.add_edge(x, y)?;
                    } else {
                        let y = g.add_labeled(format!("{tip}{i}'"));
                        g.add_edge(base, y)?;
                    }
                }
            }
        }
        GraphFamily::Sun { rays } => {
            let n = rays.len();
            if subdivided {
                ring(&mut g, 2 * n);
            } else {
                // The unsubdivided cycle carries only the odd-indexed vertices.
                let ids: Vec<_> = (0..n)
                    .map(|i| g.add_labeled(format!("v{}", 2 * i + 1)))
                    .collect();
                for i in 0..n {
                    g.add_edge(ids[i], ids[(i + 1) % n])?;
                }
            }
            for (i, &x) in rays.iter().enumerate() {
                let j = 2 * i + 1;
                let base = if subdivided { 2 * i } else { i };
                for k in 1..=x {
                    if subdivided {
                        let mid = g.add_labeled(sun_middle_label(j, k));
                        let tip = g.add_labeled(sun_tip_label(j, k));
                        g.add_edge(base, mid)?;
                        g.add_edge(mid, tip)?;
                    } else {
                        let tip = g.add_labeled(sun_tip_label(j, k));
                        g.add_edge(base, tip)?;
                    }
                }
            }
        }
        GraphFamily::Rose { circles, rays } => {
            let o = g.add_labeled("o");
            for l in 1..=*circles {
                if subdivided {
                    let a = g.add_labeled(format!("l{l},1"));
                    let b = g.add_labeled(format!("l{l},2"));
                    let c = g.add_labeled(format!("l{l},3"));
                    g.add_edge(o, a)?;
                    g.add_edge(a, b)?;
                    g.add_edge(b, c)?;
                    g.add_edge(c, o)?;
                } else {
                    g.add_edge(o, o)?;
                }
            }
            for r in 1..=*rays {
                let tip = g.add_labeled(format!("r{r}"));
                if subdivided {
                    let mid = g.add_labeled(format!("s{r}"));
                    g.add_edge(o, mid)?;
                    g.add_edge(mid, tip)?;
                } else {
                    g.add_edge(o, tip)?;
                }
            }
        }
    }
    Ok(g)
}

fn ring(g: &mut Graph, len: usize) {
    let ids: Vec<_> = (1..=len).map(|i| g.add_labeled(format!("v{i}"))).collect();
    for i in 0..len {
        g.edges.push([ids[i], ids[(i + 1) % len]]);
    }
}

fn theta(g: &mut Graph, m: usize, subdivided: bool) -> Result<(), GraphError> {
    let a1 = g.add_labeled("a1");
    let a2 = g.add_labeled("a2");
    for j in 1..=m {
        if subdivided {
            let b = g.add_labeled(format!("b{j}"));
            g.add_edge(a1, b)?;
            g.add_edge(b, a2)?;
        } else {
            g.add_edge(a1, a2)?;
        }
    }
    Ok(())
}

/// Replaces edge `e` by a path through `times` fresh degree-2 vertices.
///
/// The first segment keeps the id `e`; the others are appended. Heights are
/// dropped because the new vertices have none.
pub fn subdivide(g: &Graph, e: EdgeId, times: usize) -> Result<Graph, GraphError> {
    if e >= g.num_edges() {
        return Err(GraphError::UnknownEdge(e));
    }
    if times == 0 {
        return Err(GraphError::InvalidParameter(
            "subdivision count must be >= 1".into(),
        ));
    }
    let mut out = g.clone();
    out.heights2 = None;
    let [a, b] = g.edges[e];
    let fresh: Vec<VertexId> = (0..times).map(|_| out.add_vertex(None)).collect();
    out.edges[e] = [a, fresh[0]];
    for w in fresh.windows(2) {
        out.edges.push([w[0], w[1]]);
    }
    out.edges.push([fresh[times - 1], b]);
    Ok(out)
}

/// Vertices of degree other than 2.
pub fn essential_vertices(g: &Graph) -> BTreeSet<VertexId> {
    (0..g.num_vertices())
        .filter(|&v| g.degree(v) != 2)
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    TooFewVertices {
        vertices: usize,
        strands: usize,
    },
    /// A path between distinct essential vertices through degree-2 vertices only.
    ShortPath {
        from: VertexId,
        to: VertexId,
        edges: Vec<EdgeId>,
        required: usize,
    },
    ShortCycle {
        edges: Vec<EdgeId>,
        required: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub strands: usize,
    pub ok: bool,
    pub violations: Vec<Violation>,
}

/// Checks the length conditions under which `Conf□_n(g)` is a deformation
/// retract of the topological configuration space: at least `n` vertices,
/// every path between distinct essential vertices has at least `n - 1` edges,
/// and every embedded cycle has at least `n + 1` edges.
pub fn is_admissible(g: &Graph, n: usize) -> Result<AdmissibilityReport, GraphError> {
    if let Some(e) = g.self_loops().next() {
        return Err(GraphError::SelfLoop(e));
    }
    let mut violations = Vec::new();
    if g.num_vertices() < n {
        violations.push(Violation::TooFewVertices {
            vertices: g.num_vertices(),
            strands: n,
        });
    }

    let inc = g.incidence();
    let essential = essential_vertices(g);
    let min_path = n.saturating_sub(1);
    for &s in &essential {
        for &first in &inc[s] {
            let mut path = vec![first];
            let mut cur = g.opposite(first, s);
            while !essential.contains(&cur) {
                let last = *path.last().unwrap();
                let next = inc[cur].iter().copied().find(|&f| f != last).unwrap();
                path.push(next);
                cur = g.opposite(next, cur);
            }
            let last = *path.last().unwrap();
            // Each such path is found from both ends; keep one.
            if cur != s && (s, first) < (cur, last) && path.len() < min_path {
                violations.push(Violation::ShortPath {
                    from: s,
                    to: cur,
                    edges: path,
                    required: min_path,
                });
            }
        }
    }

    let min_cycle = n + 1;
    let mut seen = BTreeSet::new();
    for e in 0..g.num_edges() {
        if let Some(mut cycle) = shortest_cycle_through(g, &inc, e) {
            if cycle.len() < min_cycle {
                cycle.sort_unstable();
                if seen.insert(cycle.clone()) {
                    violations.push(Violation::ShortCycle {
                        edges: cycle,
                        required: min_cycle,
                    });
                }
            }
        }
    }

    Ok(AdmissibilityReport {
        strands: n,
        ok: violations.is_empty(),
        violations,
    })
}

/// Edge set of a shortest embedded cycle through `e`, if any.
fn shortest_cycle_through(g: &Graph, inc: &[Vec<EdgeId>], e: EdgeId) -> Option<Vec<EdgeId>> {
    let [s, t] = g.edge(e);
    let mut via: Vec<Option<EdgeId>> = vec![None; g.num_vertices()];
    let mut seen = vec![false; g.num_vertices()];
    seen[s] = true;
    let mut queue = VecDeque::from([s]);
    while let Some(u) = queue.pop_front() {
        if u == t {
            break;
        }
        for &f in &inc[u] {
            if f == e {
                continue;
            }
            let w = g.opposite(f, u);
            if !seen[w] {
                seen[w] = true;
                via[w] = Some(f);
                queue.push_back(w);
            }
        }
    }
    if !seen[t] {
        return None;
    }
    let mut cycle = vec![e];
    let mut cur = t;
    while cur != s {
        let f = via[cur].unwrap();
        cycle.push(f);
        cur = g.opposite(f, cur);
    }
    Some(cycle)
}

/// Length of a shortest embedded cycle, if the graph has one.
pub fn girth(g: &Graph) -> Option<usize> {
    if g.has_self_loops() {
        return Some(1);
    }
    let inc = g.incidence();
    (0..g.num_edges())
        .filter_map(|e| shortest_cycle_through(g, &inc, e).map(|c| c.len()))
        .min()
}

/// Reads the node and edge statements of a DOT graph.
///
/// Node names become labels unless a `label` attribute is present; a
/// `height2` attribute sets the doubled height (all nodes or none). Default
/// attribute statements and subgraphs are not supported.
pub fn parse_dot(src: &str) -> Result<Graph, GraphError> {
    let tokens = dot_tokens(src)?;
    let mut pos = 0;
    let malformed = |m: &str| GraphError::Malformed(format!("dot: {m}"));

    while pos < tokens.len() && tokens[pos] != "{" {
        pos += 1;
    }
    if pos == tokens.len() {
        return Err(malformed("missing '{'"));
    }
    pos += 1;

    let mut g = Graph::default();
    let mut names: HashMap<String, VertexId> = HashMap::new();
    let mut heights: HashMap<VertexId, i64> = HashMap::new();
    let mut node = |g: &mut Graph, name: &str| -> VertexId {
        *names
            .entry(name.to_string())
            .or_insert_with(|| g.add_labeled(name))
    };

    while pos < tokens.len() && tokens[pos] != "}" {
        if tokens[pos] == ";" {
            pos += 1;
            continue;
        }
        let first = tokens[pos].clone();
        pos += 1;
        if is_punct(&first) {
            return Err(malformed(&format!("unexpected '{first}'")));
        }
        if matches!(first.as_str(), "graph" | "node" | "edge") {
            return Err(malformed("default attribute statements are not supported"));
        }
        let mut chain = vec![first];
        while pos < tokens.len() && (tokens[pos] == "--" || tokens[pos] == "->") {
            let next = tokens
                .get(pos + 1)
                .filter(|t| !is_punct(t))
                .ok_or_else(|| malformed("dangling edge"))?;
            chain.push(next.clone());
            pos += 2;
        }
        let mut attrs = Vec::new();
        if tokens.get(pos).map(String::as_str) == Some("[") {
            pos += 1;
            while pos < tokens.len() && tokens[pos] != "]" {
                if matches!(tokens[pos].as_str(), "," | ";") {
                    pos += 1;
                    continue;
                }
                if tokens.get(pos + 1).map(String::as_str) != Some("=") || pos + 2 >= tokens.len() {
                    return Err(malformed("attributes must be key=value"));
                }
                attrs.push((tokens[pos].clone(), tokens[pos + 2].clone()));
                pos += 3;
            }
            pos += 1;
        }
        let ids: Vec<VertexId> = chain.iter().map(|n| node(&mut g, n)).collect();
        if ids.len() == 1 {
            let v = ids[0];
            for (k, val) in attrs {
                match k.as_str() {
                    "label" => g.labels[v] = Some(val),
                    "height2" => {
                        let h = val
                            .parse()
                            .map_err(|_| malformed("height2 must be an integer"))?;
                        heights.insert(v, h);
                    }
                    _ => {}
                }
            }
        } else {
            for w in ids.windows(2) {
                g.add_edge(w[0], w[1])?;
            }
        }
    }
    if pos == tokens.len() {
        return Err(malformed("missing '}'"));
    }
    if !heights.is_empty() {
        if heights.len() != g.num_vertices() {
            return Err(malformed(
                "height2 must be given for every node or for none",
            ));
        }
        g.heights2 = Some((0..g.num_vertices()).map(|v| heights[&v]).collect());
    }
    Ok(g)
}

fn is_punct(t: &str) -> bool {
    matches!(t, "{" | "}" | "[" | "]" | ";" | "," | "=" | "--" | "->")
}

fn dot_tokens(src: &str) -> Result<Vec<String>, GraphError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '#' || (c == '/' && chars.get(i + 1) == Some(&'/')) {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
        } else if c == '/' && chars.get(i + 1) == Some(&'*') {
            i += 2;
            while i + 1 < chars.len() && !(chars[i] == '*' && chars[i + 1] == '/') {
                i += 1;
            }
            i += 2;
        } else if c == '-' && matches!(chars.get(i + 1), Some('-') | Some('>')) {
            out.push(chars[i..i + 2].iter().collect());
            i += 2;
        } else if "{}[];,=".contains(c) {
            out.push(c.to_string());
            i += 1;
        } else if c == '"' {
            let mut s = String::new();
            i += 1;
            while i < chars.len() && chars[i] != '"' {
                if chars[i] == '\\' && i + 1 < chars.len() {
                    i += 1;
                }
                s.push(chars[i]);
                i += 1;
            }
            if i == chars.len() {
                return Err(GraphError::Malformed("dot: unterminated string".into()));
            }
            i += 1;
            out.push(s);
        } else {
            let start = i;
            while i < chars.len()
                && (chars[i].is_alphanumeric() || matches!(chars[i], '_' | '.' | '\'' | '-'))
            {
                if chars[i] == '-' && matches!(chars.get(i + 1), Some('-') | Some('>')) {
                    break;
                }
                i += 1;
            }
            if i == start {
                return Err(GraphError::Malformed(format!(
                    "dot: unexpected character {c:?}"
                )));
            }
            out.push(chars[start..i].iter().collect());
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(g: &Graph) -> (usize, usize) {
        (g.num_vertices(), g.num_edges())
    }

    #[test]
    fn family_sizes() {
        assert_eq!(
            count(&generate(&GraphFamily::Theta { m: 4 }, true).unwrap()),
            (6, 8)
        );
        assert_eq!(
            count(&generate(&GraphFamily::Cycle { k: 4 }, false).unwrap()),
            (4, 4)
        );
        assert_eq!(
            count(&generate(&GraphFamily::Pulsar { m: 3, n1: 1, n2: 2 }, true).unwrap()),
            (11, 12)
        );
        let sun = generate(
            &GraphFamily::Sun {
                rays: vec![0, 0, 0],
            },
            true,
        )
        .unwrap();
        assert_eq!(count(&sun), (6, 6));
        let names: Vec<_> = (0..6).map(|v| sun.label(v).unwrap().to_string()).collect();
        assert_eq!(names, ["v1", "v2", "v3", "v4", "v5", "v6"]);
        assert!((0..6).all(|v| sun.degree(v) == 2));
    }

    #[test]
    fn invalid_parameters() {
        assert!(matches!(
            generate(&GraphFamily::Cycle { k: 2 }, false),
            Err(GraphError::InvalidParameter(_))
        ));
        assert!(generate(&GraphFamily::Theta { m: 0 }, true).is_err());
        assert!(generate(&GraphFamily::Sun { rays: vec![] }, true).is_err());
    }

    #[test]
    fn theta_labels() {
        let g = generate(&GraphFamily::Theta { m: 3 }, true).unwrap();
        for l in ["a1", "a2", "b1", "b2", "b3"] {
            assert!(g.vertex_by_label(l).is_some(), "{l}");
        }
        let p = generate(&GraphFamily::Pulsar { m: 2, n1: 1, n2: 1 }, true).unwrap();
        for l in ["c1", "c1'", "d1", "d1'"] {
            assert!(p.vertex_by_label(l).is_some(), "{l}");
        }
    }

    #[test]
    fn subdivide_edge_and_loop() {
        let mut g = Graph::with_vertices(2);
        g.add_edge(0, 1).unwrap();
        let s = subdivide(&g, 0, 1).unwrap();
        assert_eq!(count(&s), (3, 2));
        assert_eq!(s.degree(2), 2);

        let mut l = Graph::with_vertices(1);
        l.add_edge(0, 0).unwrap();
        let c = subdivide(&l, 0, 3).unwrap();
        assert_eq!(count(&c), (4, 4));
        assert!(!c.has_self_loops());
        assert_eq!(girth(&c), Some(4));

        assert!(matches!(
            subdivide(&g, 5, 1),
            Err(GraphError::UnknownEdge(5))
        ));
        assert!(subdivide(&g, 0, 0).is_err());
    }

    #[test]
    fn essential() {
        let c4 = generate(&GraphFamily::Cycle { k: 4 }, false).unwrap();
        assert!(essential_vertices(&c4).is_empty());
        let t = generate(&GraphFamily::Theta { m: 4 }, true).unwrap();
        let ess: Vec<_> = essential_vertices(&t)
            .into_iter()
            .map(|v| t.display_name(v))
            .collect();
        assert_eq!(ess, ["a1", "a2"]);
        // Six-slot sun: cycle vertices with rays, plus every ray tip.
        let s = generate(
            &GraphFamily::Sun {
                rays: vec![3, 1, 3, 2, 0, 2],
            },
            true,
        )
        .unwrap();
        let ess = essential_vertices(&s);
        let based: Vec<_> = ["v1", "v3", "v5", "v7", "v11"]
            .iter()
            .map(|l| s.vertex_by_label(l).unwrap())
            .collect();
        assert_eq!(ess.len(), based.len() + 11);
        assert!(based.iter().all(|v| ess.contains(v)));
        assert!(!ess.contains(&s.vertex_by_label("v9").unwrap()));
    }

    #[test]
    fn admissibility_examples() {
        let t = generate(&GraphFamily::Theta { m: 4 }, true).unwrap();
        assert!(is_admissible(&t, 3).unwrap().ok);
        let c4 = generate(&GraphFamily::Cycle { k: 4 }, false).unwrap();
        assert!(is_admissible(&c4, 3).unwrap().ok);
        let c3 = generate(&GraphFamily::Cycle { k: 3 }, false).unwrap();
        let r = is_admissible(&c3, 3).unwrap();
        assert!(!r.ok);
        assert!(
            matches!(&r.violations[..], [Violation::ShortCycle { edges, required: 4 }] if edges.len() == 3)
        );
    }

    #[test]
    fn admissibility_failures() {
        let raw = generate(&GraphFamily::Theta { m: 3 }, false).unwrap();
        let r = is_admissible(&raw, 3).unwrap();
        assert!(!r.ok);
        // the three arcs a1-a2 have length 1 < 2; every arc lies on a reported 2-cycle
        let paths = r
            .violations
            .iter()
            .filter(|v| matches!(v, Violation::ShortPath { .. }))
            .count();
        assert_eq!(paths, 3);
        let mut covered = BTreeSet::new();
        for v in &r.violations {
            if let Violation::ShortCycle { edges, required } = v {
                assert_eq!((edges.len(), *required), (2, 4));
                covered.extend(edges.iter().copied());
            }
        }
        assert_eq!(covered.len(), 3);

        let p = generate(&GraphFamily::Path { k: 2 }, false).unwrap();
        assert!(matches!(
            is_admissible(&p, 3).unwrap().violations[0],
            Violation::TooFewVertices {
                vertices: 2,
                strands: 3
            }
        ));

        let rose = generate(
            &GraphFamily::Rose {
                circles: 1,
                rays: 0,
            },
            false,
        )
        .unwrap();
        assert!(matches!(
            is_admissible(&rose, 3),
            Err(GraphError::SelfLoop(0))
        ));
    }

    #[test]
    fn json_round_trip_and_canonical_order() {
        let mut g = Graph::with_vertices(3);
        g.add_edge(2, 1).unwrap();
        g.add_edge(0, 2).unwrap();
        g.add_edge(1, 2).unwrap();
        g.set_heights2(vec![0, 3, 1]).unwrap();
        let json = g.to_json();
        assert_eq!(json.edges, vec![[0, 2], [1, 2], [1, 2]]);
        let back = Graph::from_json_str(&g.to_json_string()).unwrap();
        assert_eq!(back, g.canonical());
        assert_eq!(back.heights2(), Some(&[0, 3, 1][..]));

        let text = r#"{"vertices":[{"id":0,"label":"a1","height2":4},{"id":1}],"edges":[[0,1]]}"#;
        assert!(Graph::from_json_str(text).is_err());
        let text = r#"{"vertices":[{"id":1},{"id":0}],"edges":[[0,1]]}"#;
        assert_eq!(count(&Graph::from_json_str(text).unwrap()), (2, 1));
        let text = r#"{"vertices":[{"id":0}],"edges":[[0,1]]}"#;
        assert!(matches!(
            Graph::from_json_str(text),
            Err(GraphError::UnknownVertex(1))
        ));
    }

    #[test]
    fn dot_import() {
        let src = r#"
            graph theta {
                // suspension points
                a1 [height2=4]; a2 [height2=0];
                b1 [height2=2]; "b2" [height2=2, color=red];
                a1 -- b1 -- a2;
                a1 -- b2 -- a2
            }"#;
        let g = parse_dot(src).unwrap();
        assert_eq!(count(&g), (4, 4));
        assert_eq!(g.heights2(), Some(&[4, 0, 2, 2][..]));
        assert_eq!(g.label(3), Some("b2"));
        assert!(parse_dot("graph { a -- }").is_err());
        assert!(parse_dot("graph { a [height2=1]; b }").is_err());
    }
}
