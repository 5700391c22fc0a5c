//! Height functions on graphs, the PL Morse function they induce on
//! `Conf□_n(Γ)`, descending links, and the certificates built from them.
//!
//! A height `h` on the vertices of `Γ` (with distinct values at the ends of
//! every edge) induces `f({y1..yn}) = h(y1) + … + h(yn)` on configuration
//! vertices, extended affinely over cubes. Each positive-dimensional cube has a
//! unique vertex where `f` is maximal, its *top vertex*; the cubes with top
//! vertex `v` are the cubes descending at `v`, and the descending link of `v`
//! is the link of `v` in their union.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::cube::{
    conf_vertex_link, sublevel_complex, ComplexError, Cube, CubeComplex, Link, Move,
};
use crate::graph::{sun_middle_label, sun_tip_label, Graph, VertexId};
use crate::homology::{cube_homology, HomologyError, HomologyReport};
use crate::simplicial::{
    classify_contractible_union, LinkClassification, Simplex, SimplicialComplex,
};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MorseError {
    #[error("expected {expected} heights, got {got}")]
    HeightCount { expected: usize, got: usize },
    #[error("edge {edge} has equal heights at both ends")]
    FlatEdge { edge: usize },
    #[error("graph does not match the preset: {0}")]
    ParameterMismatch(String),
    #[error("complex has {0} connected components")]
    Disconnected(usize),
    #[error("sublevel complex has {0} connected components")]
    SublevelDisconnected(usize),
    #[error("collapse budget exhausted classifying the descending link of {vertex:?}")]
    Indeterminate { vertex: Cube },
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
}

/// Doubled heights `2·h(v)` indexed by vertex id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HeightFunction {
    pub values2: Vec<i64>,
}

impl HeightFunction {
    pub fn new(values2: Vec<i64>) -> Self {
        HeightFunction { values2 }
    }

    /// Heights stored on the graph itself.
    pub fn from_graph(g: &Graph) -> Option<Self> {
        g.heights2().map(|h| HeightFunction::new(h.to_vec()))
    }

    /// Checks the count and that no edge is flat.
    pub fn validate(&self, g: &Graph) -> Result<(), MorseError> {
        if self.values2.len() != g.num_vertices() {
            return Err(MorseError::HeightCount {
                expected: g.num_vertices(),
                got: self.values2.len(),
            });
        }
        match g
            .edges()
            .iter()
            .position(|&[a, b]| self.values2[a] == self.values2[b])
        {
            Some(edge) => Err(MorseError::FlatEdge { edge }),
            None => Ok(()),
        }
    }

    pub fn get(&self, v: VertexId) -> i64 {
        self.values2[v]
    }

    pub fn by_label(&self, g: &Graph, label: &str) -> Option<i64> {
        g.vertex_by_label(label).map(|v| self.values2[v])
    }
}

fn lookup(g: &Graph, label: &str) -> Result<VertexId, MorseError> {
    g.vertex_by_label(label)
        .ok_or_else(|| MorseError::ParameterMismatch(format!("no vertex labelled {label}")))
}

fn expect_size(g: &Graph, vertices: usize, edges: usize) -> Result<(), MorseError> {
    if g.num_vertices() != vertices || g.num_edges() != edges {
        return Err(MorseError::ParameterMismatch(format!(
            "expected {vertices} vertices and {edges} edges, found {} and {}",
            g.num_vertices(),
            g.num_edges()
        )));
    }
    Ok(())
}

/// Sun heights on the subdivided sun graph `S(rays)` with `v1` on top:
/// `h(v_i) = |i − n − 1|`, ray tips one above their base, ray midpoints half.
pub fn sun_height(g: &Graph, rays: &[usize]) -> Result<HeightFunction, MorseError> {
    sun_height_at(g, rays, 0)
}

/// As [`sun_height`], with the cycle rotated so that `v(2·apex+1)` plays the
/// role of `v1`.
pub fn sun_height_at(g: &Graph, rays: &[usize], apex: usize) -> Result<HeightFunction, MorseError> {
    let total: usize = rays.iter().sum();
    let n = rays.len();
    expect_size(g, 2 * n + 2 * total, 2 * n + 2 * total)?;
    sun_values(g, rays, apex, None)
}

fn sun_values(
    g: &Graph,
    rays: &[usize],
    apex: usize,
    skip: Option<(usize, usize)>,
) -> Result<HeightFunction, MorseError> {
    let n = rays.len();
    if apex >= n {
        return Err(MorseError::ParameterMismatch(format!(
            "apex {apex} out of range"
        )));
    }
    let mut values2 = vec![i64::MIN; g.num_vertices()];
    let two_n = 2 * n;
    let top = 2 * apex; // zero-based cycle position of the apex
    let cycle2 = |pos: usize| -> i64 {
        let rotated = (pos + two_n - top) % two_n + 1;
        2 * (rotated as i64 - n as i64 - 1).abs()
    };
    for pos in 0..two_n {
        values2[lookup(g, &format!("v{}", pos + 1))?] = cycle2(pos);
    }
    for (i, &x) in rays.iter().enumerate() {
        let j = 2 * i + 1;
        let base = cycle2(2 * i);
        for k in 1..=x {
            if skip == Some((j, k)) {
                continue;
            }
            values2[lookup(g, &sun_middle_label(j, k))?] = base + 1;
            values2[lookup(g, &sun_tip_label(j, k))?] = base + 2;
        }
    }
    Ok(HeightFunction::new(values2))
}

/// Heights for the sun graph `S(x1 + 1, x2, …)` obtained from `S(base_rays)`
/// by a new length-two ray at `v1`: the new tip sits at `5n + 8`, the new
/// midpoint at `3n + 4`, all other vertices keep their sun heights.
pub fn sun_extension_height(g: &Graph, base_rays: &[usize]) -> Result<HeightFunction, MorseError> {
    sun_extension_height_at(g, base_rays, 0)
}

/// As [`sun_extension_height`], attaching the new ray at `v(2·slot+1)` and
/// rotating the cycle so that this vertex is on top.
pub fn sun_extension_height_at(
    g: &Graph,
    base_rays: &[usize],
    slot: usize,
) -> Result<HeightFunction, MorseError> {
    let n = base_rays.len();
    if slot >= n {
        return Err(MorseError::ParameterMismatch(format!(
            "no cycle vertex v{}",
            2 * slot + 1
        )));
    }
    let mut rays = base_rays.to_vec();
    rays[slot] += 1;
    let total: usize = rays.iter().sum();
    expect_size(g, 2 * n + 2 * total, 2 * n + 2 * total)?;
    let j = 2 * slot + 1;
    let k = rays[slot];
    let mut h = sun_values(g, &rays, slot, Some((j, k)))?;
    let n = n as i64;
    h.values2[lookup(g, &sun_middle_label(j, k))?] = 2 * (3 * n + 4);
    h.values2[lookup(g, &sun_tip_label(j, k))?] = 2 * (5 * n + 8);
    Ok(h)
}

/// Heights for the subdivided pulsar graph: `a2 → 0`, `b_j → 1`, `a1 → 2`,
/// `c_i → 5`, `c_i' → 6`, `d_i → 1/2`, `d_i' → 1` (all doubled).
pub fn pulsar_height(
    g: &Graph,
    m: usize,
    n1: usize,
    n2: usize,
) -> Result<HeightFunction, MorseError> {
    expect_size(g, m + 2 + 2 * n1 + 2 * n2, 2 * m + 2 * n1 + 2 * n2)?;
    let mut values2 = vec![0; g.num_vertices()];
    values2[lookup(g, "a2")?] = 0;
    values2[lookup(g, "a1")?] = 4;
    for j in 1..=m {
        values2[lookup(g, &format!("b{j}"))?] = 2;
    }
    for i in 1..=n1 {
        values2[lookup(g, &format!("c{i}"))?] = 10;
        values2[lookup(g, &format!("c{i}'"))?] = 12;
    }
    for i in 1..=n2 {
        values2[lookup(g, &format!("d{i}"))?] = 1;
        values2[lookup(g, &format!("d{i}'"))?] = 2;
    }
    Ok(HeightFunction::new(values2))
}

/// Reads `(m, n1, n2)` off the labels of a generated pulsar graph.
pub fn pulsar_params_from_labels(g: &Graph) -> Option<(usize, usize, usize)> {
    g.vertex_by_label("a1")?;
    g.vertex_by_label("a2")?;
    let count = |p: char, primed: bool| {
        (0..g.num_vertices())
            .filter_map(|v| g.label(v))
            .filter(|l| {
                l.starts_with(p)
                    && l.ends_with('\'') == primed
                    && l[1..].trim_end_matches('\'').parse::<usize>().is_ok()
            })
            .count()
    };
    Some((count('b', false), count('c', true), count('d', true)))
}

/// Reads the ray counts off the labels of a generated subdivided sun graph.
pub fn sun_rays_from_labels(g: &Graph) -> Option<Vec<usize>> {
    let mut cycle = 0;
    let mut tips: BTreeMap<usize, usize> = BTreeMap::new();
    for v in 0..g.num_vertices() {
        let l = g.label(v)?;
        if l.starts_with('w') {
            continue;
        }
        let rest = l.strip_prefix('v')?;
        match rest.split_once(',') {
            None => {
                rest.parse::<usize>().ok()?;
                cycle += 1;
            }
            Some((j, _)) => *tips.entry(j.parse().ok()?).or_default() += 1,
        }
    }
    if cycle == 0 || cycle % 2 == 1 {
        return None;
    }
    Some(
        (0..cycle / 2)
            .map(|i| tips.get(&(2 * i + 1)).copied().unwrap_or(0))
            .collect(),
    )
}

/// The induced Morse function on a configuration complex together with its
/// descending links.
#[derive(Clone, Debug)]
pub struct MorseData {
    complex: CubeComplex,
    height: HeightFunction,
    vertex_values2: Vec<i64>,
    top_vertex: Vec<Vec<usize>>,
    descending: Vec<Link>,
}

/// Computes vertex values, the top-vertex partition and all descending links.
pub fn induced_morse(c: &CubeComplex, h: &HeightFunction) -> Result<MorseData, MorseError> {
    h.validate(c.graph())?;
    if let Some(e) = c.graph().self_loops().next() {
        return Err(ComplexError::SelfLoop(e).into());
    }
    let g = c.graph();
    let vertex_values2: Vec<i64> = c
        .vertices()
        .iter()
        .map(|v| v.vertices.iter().map(|&x| h.get(x)).sum())
        .collect();
    let mut top_vertex = vec![Vec::new(); c.dimension().map_or(0, |d| d + 1)];
    let mut simplices: Vec<Vec<Vec<Move>>> = vec![Vec::new(); c.vertices().len()];
    if let Some(level) = top_vertex.first_mut() {
        *level = (0..c.vertices().len()).collect();
    }
    for (k, level) in top_vertex.iter_mut().enumerate().skip(1) {
        *level = c
            .cells(k)
            .iter()
            .map(|cube| {
                let mut tokens = cube.vertices.clone();
                let mut moves = Vec::with_capacity(k);
                for &e in &cube.edges {
                    let [a, b] = g.edge(e);
                    let (hi, lo) = if h.get(a) > h.get(b) { (a, b) } else { (b, a) };
                    tokens.push(hi);
                    moves.push(Move {
                        edge: e,
                        token: hi,
                        target: lo,
                    });
                }
                let top = c
                    .index_of(&Cube::vertex(tokens))
                    .expect("top vertex is a corner");
                simplices[top].push(moves);
                top
            })
            .collect();
    }
    let descending = simplices
        .into_iter()
        .map(|s| {
            let moves: Vec<Move> = {
                let mut all: Vec<Move> = s.iter().flatten().copied().collect();
                all.sort();
                all.dedup();
                all
            };
            let pos: BTreeMap<Move, usize> =
                moves.iter().enumerate().map(|(i, &m)| (m, i)).collect();
            let complex = SimplicialComplex::from_simplices(
                s.iter()
                    .map(|sim| sim.iter().map(|m| pos[m]).collect::<Vec<_>>()),
            );
            Link { moves, complex }
        })
        .collect();
    Ok(MorseData {
        complex: c.clone(),
        height: h.clone(),
        vertex_values2,
        top_vertex,
        descending,
    })
}

/// Descending link of a configuration in the full `Conf□_n(Γ)`, computed from
/// `Γ` alone: the clique complex on the downward moves, two moves adjacent
/// when their edges are disjoint.
pub fn descending_link_by_moves(g: &Graph, h: &HeightFunction, tokens: &[VertexId]) -> Link {
    let all = conf_vertex_link(g, tokens);
    Link::clique_of_moves(
        all.moves
            .into_iter()
            .filter(|m| h.get(m.target) < h.get(m.token))
            .collect(),
    )
}

impl MorseData {
    pub fn complex(&self) -> &CubeComplex {
        &self.complex
    }

    pub fn height(&self) -> &HeightFunction {
        &self.height
    }

    pub fn vertex_values2(&self) -> &[i64] {
        &self.vertex_values2
    }

    pub fn value2(&self, v: &Cube) -> Option<i64> {
        self.complex.index_of(v).map(|i| self.vertex_values2[i])
    }

    /// Index (in the vertex list) of the top vertex of cube `i` of dimension `k`.
    pub fn top_vertex(&self, k: usize, i: usize) -> usize {
        self.top_vertex[k][i]
    }

    /// Maximum of `f` over a cube of the underlying configuration space.
    pub fn cube_max(&self, cube: &Cube) -> i64 {
        let h = &self.height;
        let g = self.complex.graph();
        cube.vertices.iter().map(|&v| h.get(v)).sum::<i64>()
            + cube
                .edges
                .iter()
                .map(|&e| g.edge(e).iter().map(|&v| h.get(v)).max().unwrap())
                .sum::<i64>()
    }

    pub fn descending_link(&self, v: &Cube) -> Option<&Link> {
        self.complex.index_of(v).map(|i| &self.descending[i])
    }

    pub fn descending_links(&self) -> &[Link] {
        &self.descending
    }

    /// `Σ_v (1 − χ(Lk↓ v))`, which equals `χ` of the complex because every
    /// positive-dimensional cube is descending at exactly one vertex.
    pub fn morse_euler_sum(&self) -> i64 {
        self.descending
            .iter()
            .map(|l| 1 - l.complex.euler_characteristic())
            .sum()
    }

    pub fn sublevel(&self, cut2: i64) -> CubeComplex {
        sublevel_complex(&self.complex, self, cut2)
    }

    fn classify(&self, i: usize, budget: usize) -> Result<LinkClassification, MorseError> {
        let class = classify_contractible_union(&self.descending[i].complex, budget);
        if let LinkClassification::Indeterminate { .. } = class {
            return Err(MorseError::Indeterminate {
                vertex: self.complex.vertices()[i].clone(),
            });
        }
        Ok(class)
    }

    fn witness(&self, i: usize, class: &LinkClassification) -> FailureWitness {
        let v = &self.complex.vertices()[i];
        let g = self.complex.graph();
        FailureWitness {
            vertex: v.clone(),
            labels: v.vertices.iter().map(|&x| g.display_name(x)).collect(),
            value2: self.vertex_values2[i],
            kind: class.kind().to_string(),
            link_facets: self.descending[i].complex.facets().to_vec(),
        }
    }
}

/// Counts of descending-link classifications.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ClassificationSummary {
    pub empty: usize,
    pub union_of_contractible: usize,
    pub not_contractible_union: usize,
}

impl ClassificationSummary {
    fn record(&mut self, c: &LinkClassification) {
        match c {
            LinkClassification::Empty => self.empty += 1,
            LinkClassification::UnionOfContractible { .. } => self.union_of_contractible += 1,
            LinkClassification::NotContractibleUnion { .. } => self.not_contractible_union += 1,
            LinkClassification::Indeterminate { .. } => {
                unreachable!("indeterminate links are errors")
            }
        }
    }
}

/// A configuration whose descending link breaks a certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FailureWitness {
    pub vertex: Cube,
    pub labels: Vec<String>,
    pub value2: i64,
    pub kind: String,
    pub link_facets: Vec<Simplex>,
}

/// Evidence that the complex is homotopy equivalent to a wedge of circles.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WedgeCertificate {
    pub ok: bool,
    pub summary: ClassificationSummary,
    /// Rank of the free fundamental group (`b1`) when `ok`.
    pub free_rank: Option<usize>,
    pub failures: Vec<FailureWitness>,
    #[serde(skip)]
    pub classifications: Vec<LinkClassification>,
}

/// Certifies a wedge of circles when every descending link is empty or a
/// union of contractible pieces. The complex must be connected.
pub fn wedge_certificate(md: &MorseData, budget: usize) -> Result<WedgeCertificate, MorseError> {
    let comps = md.complex.num_components();
    if comps != 1 {
        return Err(MorseError::Disconnected(comps));
    }
    let mut summary = ClassificationSummary::default();
    let mut failures = Vec::new();
    let mut classifications = Vec::with_capacity(md.descending.len());
    for i in 0..md.descending.len() {
        let class = md.classify(i, budget)?;
        summary.record(&class);
        if let LinkClassification::NotContractibleUnion { .. } = class {
            failures.push(md.witness(i, &class));
        }
        classifications.push(class);
    }
    let ok = failures.is_empty();
    let free_rank = if ok {
        Some(cube_homology(&md.complex)?.betti(1))
    } else {
        None
    };
    Ok(WedgeCertificate {
        ok,
        summary,
        free_rank,
        failures,
        classifications,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitFailure {
    /// A vertex above the cut has an empty descending link (a new local minimum).
    EmptyLinkAboveCut,
    NotContractibleUnion,
}

/// Evidence that `π1(X) = π1(sublevel) ∗ F` for a free group `F`.
#[derive(Clone, Debug, Serialize)]
pub struct SplitCertificate {
    pub cut2: i64,
    pub ok: bool,
    pub vertices_above_cut: usize,
    pub summary: ClassificationSummary,
    pub failure: Option<SplitFailure>,
    pub failures: Vec<FailureWitness>,
    pub sublevel_f_vector: Vec<usize>,
    pub betti: Vec<usize>,
    pub sublevel_betti: Vec<usize>,
    /// `b1(X) − b1(sublevel)`: the rank of the free factor.
    pub rank_free_factor: i64,
    pub b0_agree: bool,
    pub b2_agree: bool,
    #[serde(skip)]
    pub sublevel: CubeComplex,
    #[serde(skip)]
    pub homology: HomologyReport,
    #[serde(skip)]
    pub sublevel_homology: HomologyReport,
}

/// Checks that every configuration above `cut2` has a descending link that
/// is a nonempty union of contractible pieces, over a connected sublevel set.
pub fn split_certificate(
    md: &MorseData,
    cut2: i64,
    budget: usize,
) -> Result<SplitCertificate, MorseError> {
    let comps = md.complex.num_components();
    if comps != 1 {
        return Err(MorseError::Disconnected(comps));
    }
    let sublevel = md.sublevel(cut2);
    let sub_comps = sublevel.num_components();
    if sub_comps != 1 {
        return Err(MorseError::SublevelDisconnected(sub_comps));
    }
    let mut summary = ClassificationSummary::default();
    let mut failures = Vec::new();
    let mut failure = None;
    let mut above = 0;
    for i in 0..md.descending.len() {
        if md.vertex_values2[i] <= cut2 {
            continue;
        }
        above += 1;
        let class = md.classify(i, budget)?;
        summary.record(&class);
        let code = match class {
            LinkClassification::Empty => Some(SplitFailure::EmptyLinkAboveCut),
            LinkClassification::NotContractibleUnion { .. } => {
                Some(SplitFailure::NotContractibleUnion)
            }
            _ => None,
        };
        if let Some(code) = code {
            failure.get_or_insert(code);
            failures.push(md.witness(i, &class));
        }
    }
    let homology = cube_homology(&md.complex)?;
    let sublevel_homology = cube_homology(&sublevel)?;
    Ok(SplitCertificate {
        cut2,
        ok: failure.is_none(),
        vertices_above_cut: above,
        summary,
        failure,
        failures,
        sublevel_f_vector: sublevel.f_vector(),
        betti: homology.betti.clone(),
        sublevel_betti: sublevel_homology.betti.clone(),
        rank_free_factor: homology.betti(1) as i64 - sublevel_homology.betti(1) as i64,
        b0_agree: homology.betti(0) == sublevel_homology.betti(0),
        b2_agree: homology.betti(2) == sublevel_homology.betti(2),
        sublevel,
        homology,
        sublevel_homology,
    })
}
