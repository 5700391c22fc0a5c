//! The discretized configuration space `Conf□_n(Γ)` as an explicit cube complex.
//!
//! A `k`-cube is a set of `k` edges of `Γ` (the moving tokens) together with
//! `n - k` vertices (the stationary tokens), all cells pairwise disjoint. Its
//! codimension-one faces come from replacing one moving edge by one of its
//! endpoints.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EdgeId, Graph, VertexId};
use crate::morse::MorseData;
use crate::simplicial::SimplicialComplex;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ComplexError {
    #[error("cell {0:?} does not belong to the complex")]
    NotACell(Cube),
    #[error("cube {0:?} is not a vertex")]
    NotAVertex(Cube),
    #[error("cube {cube:?} is invalid: {reason}")]
    InvalidCube { cube: Cube, reason: String },
    #[error("face {face:?} of {cube:?} is missing")]
    MissingFace { cube: Cube, face: Cube },
    #[error("graph has a self-loop (edge {0}); links are only defined for loop-free graphs")]
    SelfLoop(EdgeId),
}

/// A cell of `Conf□_n(Γ)`: sorted moving edges and sorted stationary vertices.
///
/// The derived order (edges first, then vertices, lexicographically) is the
/// canonical cell order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cube {
    pub edges: Vec<EdgeId>,
    pub vertices: Vec<VertexId>,
}

impl Cube {
    pub fn new(mut edges: Vec<EdgeId>, mut vertices: Vec<VertexId>) -> Cube {
        edges.sort_unstable();
        vertices.sort_unstable();
        Cube { edges, vertices }
    }

    pub fn vertex(mut tokens: Vec<VertexId>) -> Cube {
        tokens.sort_unstable();
        Cube {
            edges: Vec::new(),
            vertices: tokens,
        }
    }

    pub fn dimension(&self) -> usize {
        self.edges.len()
    }

    /// The face obtained by parking the token on edge `slot` at vertex `at`.
    fn face(&self, slot: usize, at: VertexId) -> Cube {
        let mut edges = self.edges.clone();
        edges.remove(slot);
        let mut vertices = self.vertices.clone();
        let pos = vertices.binary_search(&at).unwrap_or_else(|p| p);
        vertices.insert(pos, at);
        Cube { edges, vertices }
    }

    /// Checks the disjointness condition against `g` for `n` tokens.
    fn validate(&self, g: &Graph, n: usize) -> Result<(), String> {
        if self.edges.len() + self.vertices.len() != n {
            return Err(format!(
                "holds {} tokens, expected {n}",
                self.edges.len() + self.vertices.len()
            ));
        }
        if self.edges.windows(2).any(|w| w[0] >= w[1])
            || self.vertices.windows(2).any(|w| w[0] >= w[1])
        {
            return Err("ids must be strictly increasing".into());
        }
        let mut used = BTreeSet::new();
        for &e in &self.edges {
            if e >= g.num_edges() {
                return Err(format!("unknown edge {e}"));
            }
            let [a, b] = g.edge(e);
            if !used.insert(a) || (a != b && !used.insert(b)) {
                return Err(format!("edge {e} meets another cell"));
            }
        }
        for &v in &self.vertices {
            if v >= g.num_vertices() {
                return Err(format!("unknown vertex {v}"));
            }
            if !used.insert(v) {
                return Err(format!("vertex {v} meets another cell"));
            }
        }
        Ok(())
    }
}

/// `Conf□_n(Γ)` or a subcomplex of it.
#[derive(Clone, Debug)]
pub struct CubeComplex {
    graph: Arc<Graph>,
    strands: usize,
    cells: Vec<Vec<Cube>>,
    index: Vec<HashMap<Cube, usize>>,
    /// `faces[k][i][slot] = [lower face, upper face]` as indices into `cells[k - 1]`.
    faces: Vec<Vec<Vec<[usize; 2]>>>,
}

impl PartialEq for CubeComplex {
    fn eq(&self, other: &Self) -> bool {
        self.strands == other.strands && self.cells == other.cells && *self.graph == *other.graph
    }
}

/// Builds `Conf□_n(g)`. An empty complex is returned when `g` has fewer than
/// `n` vertices.
pub fn build_conf(g: &Graph, n: usize) -> CubeComplex {
    build_conf_shared(Arc::new(g.clone()), n)
}

pub fn build_conf_shared(g: Arc<Graph>, n: usize) -> CubeComplex {
    let mut cells: Vec<Vec<Cube>> = vec![Vec::new(); n + 1];
    let mut covered = vec![false; g.num_vertices()];
    let mut chosen = Vec::new();
    choose_edges(&g, n, 0, &mut chosen, &mut covered, &mut cells);
    while cells.len() > 1 && cells.last().is_some_and(Vec::is_empty) {
        cells.pop();
    }
    if cells.len() == 1 && cells[0].is_empty() {
        cells.clear();
    }
    for level in &mut cells {
        level.sort();
    }
    CubeComplex::assemble(g, n, cells).expect("Conf□ is closed under taking faces")
}

fn choose_edges(
    g: &Graph,
    n: usize,
    from: EdgeId,
    chosen: &mut Vec<EdgeId>,
    covered: &mut [bool],
    cells: &mut [Vec<Cube>],
) {
    let free: Vec<VertexId> = (0..g.num_vertices()).filter(|&v| !covered[v]).collect();
    let need = n - chosen.len();
    if free.len() >= need {
        for stationary in combinations(&free, need) {
            cells[chosen.len()].push(Cube {
                edges: chosen.clone(),
                vertices: stationary,
            });
        }
    }
    if chosen.len() == n {
        return;
    }
    for e in from..g.num_edges() {
        let [a, b] = g.edge(e);
        if covered[a] || covered[b] {
            continue;
        }
        covered[a] = true;
        covered[b] = true;
        chosen.push(e);
        choose_edges(g, n, e + 1, chosen, covered, cells);
        chosen.pop();
        covered[a] = false;
        covered[b] = false;
    }
}

/// All `k`-subsets of `items` in lexicographic order.
fn combinations(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(
        items: &[usize],
        k: usize,
        start: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..items.len() {
            if items.len() - i < k - cur.len() {
                break;
            }
            cur.push(items[i]);
            rec(items, k, i + 1, cur, out);
            cur.pop();
        }
    }
    rec(items, k, 0, &mut cur, &mut out);
    out
}

/// Endpoints of `e` as `[lower, upper]`: by doubled height when the graph has
/// heights and they differ, otherwise by vertex id.
pub fn oriented_edge(g: &Graph, e: EdgeId) -> [VertexId; 2] {
    let [a, b] = g.edge(e);
    let key = |v: VertexId| (g.heights2().map(|h| h[v]), v);
    if key(a) <= key(b) {
        [a, b]
    } else {
        [b, a]
    }
}

/// A cube written as (edges by endpoint labels, stationary vertex labels).
pub type LabelledCube = (Vec<[String; 2]>, Vec<String>);

impl CubeComplex {
    /// Builds a complex from an explicit cell list, validating each cube
    /// against the graph and requiring closure under faces.
    pub fn from_cells(
        graph: Arc<Graph>,
        strands: usize,
        cells: impl IntoIterator<Item = Cube>,
    ) -> Result<CubeComplex, ComplexError> {
        let mut by_dim: Vec<BTreeSet<Cube>> = Vec::new();
        for c in cells {
            c.validate(&graph, strands)
                .map_err(|reason| ComplexError::InvalidCube {
                    cube: c.clone(),
                    reason,
                })?;
            let d = c.dimension();
            if by_dim.len() <= d {
                by_dim.resize(d + 1, BTreeSet::new());
            }
            by_dim[d].insert(c);
        }
        let cells = by_dim
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect();
        CubeComplex::assemble(graph, strands, cells)
    }

    fn assemble(
        graph: Arc<Graph>,
        strands: usize,
        cells: Vec<Vec<Cube>>,
    ) -> Result<CubeComplex, ComplexError> {
        let index: Vec<HashMap<Cube, usize>> = cells
            .iter()
            .map(|level| {
                level
                    .iter()
                    .cloned()
                    .enumerate()
                    .map(|(i, c)| (c, i))
                    .collect()
            })
            .collect();
        let mut faces = vec![Vec::new(); cells.len()];
        for k in 1..cells.len() {
            faces[k] = cells[k]
                .iter()
                .map(|cube| {
                    (0..k)
                        .map(|slot| {
                            let ends = oriented_edge(&graph, cube.edges[slot]);
                            let mut pair = [0; 2];
                            for (side, &at) in ends.iter().enumerate() {
                                let face = cube.face(slot, at);
                                pair[side] = *index[k - 1].get(&face).ok_or_else(|| {
                                    ComplexError::MissingFace {
                                        cube: cube.clone(),
                                        face: face.clone(),
                                    }
                                })?;
                            }
                            Ok(pair)
                        })
                        .collect::<Result<Vec<_>, ComplexError>>()
                })
                .collect::<Result<Vec<_>, ComplexError>>()?;
        }
        Ok(CubeComplex {
            graph,
            strands,
            cells,
            index,
            faces,
        })
    }

    /// The subcomplex of cubes satisfying `keep`; `keep` must be closed
    /// under taking faces.
    pub fn subcomplex(&self, keep: impl Fn(&Cube) -> bool) -> Result<CubeComplex, ComplexError> {
        let cells = self.cells.iter().flatten().filter(|c| keep(c)).cloned();
        CubeComplex::from_cells(self.graph.clone(), self.strands, cells)
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn shared_graph(&self) -> Arc<Graph> {
        self.graph.clone()
    }

    pub fn strands(&self) -> usize {
        self.strands
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Top dimension, `None` when empty.
    pub fn dimension(&self) -> Option<usize> {
        self.cells.len().checked_sub(1)
    }

    pub fn cells(&self, k: usize) -> &[Cube] {
        self.cells.get(k).map_or(&[], Vec::as_slice)
    }

    pub fn vertices(&self) -> &[Cube] {
        self.cells(0)
    }

    pub fn index_of(&self, c: &Cube) -> Option<usize> {
        self.index.get(c.dimension())?.get(c).copied()
    }

    /// `[lower, upper]` face indices for each moving-edge slot of cube `i`
    /// in dimension `k >= 1`.
    pub fn faces(&self, k: usize, i: usize) -> &[[usize; 2]] {
        &self.faces[k][i]
    }

    /// Number of cells per dimension, without trailing zeros.
    pub fn f_vector(&self) -> Vec<usize> {
        self.cells.iter().map(Vec::len).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        alternating_sum(&self.f_vector())
    }

    /// The corners (0-cubes) of a cube, as indices into the vertex list.
    pub fn corners(&self, c: &Cube) -> Vec<usize> {
        let mut out = Vec::with_capacity(1 << c.dimension());
        for mask in 0u32..(1u32 << c.dimension()) {
            let mut tokens = c.vertices.clone();
            for (slot, &e) in c.edges.iter().enumerate() {
                tokens.push(oriented_edge(&self.graph, e)[(mask >> slot & 1) as usize]);
            }
            out.push(self.index[0][&Cube::vertex(tokens)]);
        }
        out
    }

    /// Connected components of the 1-skeleton, as a label per vertex.
    pub fn component_labels(&self) -> Vec<usize> {
        let nv = self.vertices().len();
        let mut parent: Vec<usize> = (0..nv).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for faces in self.faces.get(1).into_iter().flatten() {
            let [a, b] = faces[0];
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra != rb {
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        (0..nv).map(|v| find(&mut parent, v)).collect()
    }

    pub fn num_components(&self) -> usize {
        let labels = self.component_labels();
        labels.iter().enumerate().filter(|(i, l)| *i == **l).count()
    }

    pub fn is_connected(&self) -> bool {
        self.num_components() == 1
    }

    /// Splits the complex into its connected components.
    pub fn components(&self) -> Vec<CubeComplex> {
        let labels = self.component_labels();
        let mut roots: Vec<usize> = labels.clone();
        roots.sort_unstable();
        roots.dedup();
        roots
            .into_iter()
            .map(|r| {
                self.subcomplex(|c| {
                    let corner = self.corners(c)[0];
                    labels[corner] == r
                })
                .expect("a connected component is a subcomplex")
            })
            .collect()
    }

    /// Cells by dimension rewritten in terms of vertex labels, for comparing
    /// complexes built over different but compatibly labelled graphs.
    pub fn labelled_cells(&self) -> Vec<BTreeSet<LabelledCube>> {
        let g = &self.graph;
        self.cells
            .iter()
            .map(|level| {
                level
                    .iter()
                    .map(|c| {
                        let mut edges: Vec<[String; 2]> = c
                            .edges
                            .iter()
                            .map(|&e| {
                                let [a, b] = g.edge(e);
                                let mut pair = [g.display_name(a), g.display_name(b)];
                                pair.sort();
                                pair
                            })
                            .collect();
                        edges.sort();
                        let mut verts: Vec<String> =
                            c.vertices.iter().map(|&v| g.display_name(v)).collect();
                        verts.sort();
                        (edges, verts)
                    })
                    .collect()
            })
            .collect()
    }

    pub fn to_json(&self) -> ComplexJson {
        ComplexJson {
            n: self.strands,
            f_vector: self.f_vector(),
            cells: self
                .cells
                .iter()
                .enumerate()
                .map(|(k, c)| (k.to_string(), c.clone()))
                .collect(),
        }
    }

    fn require_loop_free(&self) -> Result<(), ComplexError> {
        match self.graph.self_loops().next() {
            Some(e) => Err(ComplexError::SelfLoop(e)),
            None => Ok(()),
        }
    }

    fn require_vertex(&self, v: &Cube) -> Result<usize, ComplexError> {
        if v.dimension() != 0 {
            return Err(ComplexError::NotAVertex(v.clone()));
        }
        self.index_of(v)
            .ok_or_else(|| ComplexError::NotACell(v.clone()))
    }
}

pub fn alternating_sum(f: &[usize]) -> i64 {
    f.iter()
        .enumerate()
        .map(|(k, &c)| if k % 2 == 0 { c as i64 } else { -(c as i64) })
        .sum()
}

/// Export form: `{"n":3,"f_vector":[...],"cells":{"0":[...],...}}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub n: usize,
    pub f_vector: Vec<usize>,
    pub cells: BTreeMap<String, Vec<Cube>>,
}

/// A single token move `token → target` along `edge`: a 1-cube at a vertex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Move {
    pub edge: EdgeId,
    pub token: VertexId,
    pub target: VertexId,
}

/// A vertex link: link vertex `i` is `moves[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Link {
    pub moves: Vec<Move>,
    pub complex: SimplicialComplex,
}

impl Link {
    /// Clique complex on `moves` (sorted by edge id), with two moves adjacent
    /// when their edges are disjoint.
    pub fn clique_of_moves(mut moves: Vec<Move>) -> Link {
        moves.sort();
        let mut adj: BTreeMap<usize, BTreeSet<usize>> =
            (0..moves.len()).map(|i| (i, BTreeSet::new())).collect();
        for i in 0..moves.len() {
            for j in i + 1..moves.len() {
                let (a, b) = (moves[i], moves[j]);
                let disjoint = a.token != b.token
                    && a.token != b.target
                    && a.target != b.token
                    && a.target != b.target;
                if disjoint {
                    adj.get_mut(&i).unwrap().insert(j);
                    adj.get_mut(&j).unwrap().insert(i);
                }
            }
        }
        Link {
            complex: SimplicialComplex::clique_complex(&adj),
            moves,
        }
    }
}

/// Link of a vertex of `c`, read off from the cubes of `c` that contain it.
///
/// Link vertices are the 1-cubes at `v` in edge-id order; every cube at `v`
/// contributes the simplex of its edges.
pub fn vertex_link(c: &CubeComplex, v: &Cube) -> Result<Link, ComplexError> {
    c.require_loop_free()?;
    c.require_vertex(v)?;
    let occupied: BTreeSet<VertexId> = v.vertices.iter().copied().collect();
    let g = c.graph();
    let mut simplices: Vec<Vec<Move>> = Vec::new();
    for k in 1..c.cells.len() {
        for cube in &c.cells[k] {
            if !cube.vertices.iter().all(|x| occupied.contains(x)) {
                continue;
            }
            let mut moves = Vec::with_capacity(k);
            for &e in &cube.edges {
                let [a, b] = g.edge(e);
                match (occupied.contains(&a), occupied.contains(&b)) {
                    (true, false) => moves.push(Move {
                        edge: e,
                        token: a,
                        target: b,
                    }),
                    (false, true) => moves.push(Move {
                        edge: e,
                        token: b,
                        target: a,
                    }),
                    _ => break,
                }
            }
            if moves.len() == k {
                simplices.push(moves);
            }
        }
    }
    Ok(link_from_simplices(simplices))
}

fn link_from_simplices(simplices: Vec<Vec<Move>>) -> Link {
    let moves: Vec<Move> = simplices
        .iter()
        .flatten()
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let pos: HashMap<Move, usize> = moves.iter().enumerate().map(|(i, &m)| (m, i)).collect();
    let complex = SimplicialComplex::from_simplices(
        simplices
            .iter()
            .map(|s| s.iter().map(|m| pos[m]).collect::<Vec<_>>()),
    );
    Link { moves, complex }
}

/// Link of a vertex in the full `Conf□_n(Γ)`, computed from `Γ` alone as the
/// clique complex of pairwise disjoint moves.
pub fn conf_vertex_link(g: &Graph, tokens: &[VertexId]) -> Link {
    let occupied: BTreeSet<VertexId> = tokens.iter().copied().collect();
    let inc = g.incidence();
    let mut moves = Vec::new();
    for &t in &occupied {
        for &e in &inc[t] {
            let target = g.opposite(e, t);
            if target != t && !occupied.contains(&target) {
                moves.push(Move {
                    edge: e,
                    token: t,
                    target,
                });
            }
        }
    }
    Link::clique_of_moves(moves)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FlagReport {
    pub ok: bool,
    pub vertices_checked: usize,
    pub failing_vertex: Option<Cube>,
    pub non_flag_clique: Option<Vec<Move>>,
}

/// Gromov's link condition: every vertex link is a flag complex.
pub fn is_locally_cat0(c: &CubeComplex) -> Result<FlagReport, ComplexError> {
    c.require_loop_free()?;
    let mut links: Vec<Vec<Vec<Move>>> = vec![Vec::new(); c.vertices().len()];
    let g = c.graph();
    for k in 1..c.cells.len() {
        for cube in &c.cells[k] {
            let corners = c.corners(cube);
            for (mask, &corner) in corners.iter().enumerate() {
                let moves = cube
                    .edges
                    .iter()
                    .enumerate()
                    .map(|(slot, &e)| {
                        let ends = oriented_edge(g, e);
                        let at = mask >> slot & 1;
                        Move {
                            edge: e,
                            token: ends[at],
                            target: ends[1 - at],
                        }
                    })
                    .collect();
                links[corner].push(moves);
            }
        }
    }
    for (i, simplices) in links.into_iter().enumerate() {
        let link = link_from_simplices(simplices);
        if let Some(clique) = link.complex.non_flag_clique() {
            return Ok(FlagReport {
                ok: false,
                vertices_checked: i + 1,
                failing_vertex: Some(c.vertices()[i].clone()),
                non_flag_clique: Some(clique.iter().map(|&j| link.moves[j]).collect()),
            });
        }
    }
    Ok(FlagReport {
        ok: true,
        vertices_checked: c.vertices().len(),
        failing_vertex: None,
        non_flag_clique: None,
    })
}

/// Closed forms for `Conf□_3(Θ_m)` with the standard subdivision:
/// `(C(m+2,3), 2m·C(m,2), (m²−m)(m−2))`.
pub fn theta_f_vector_closed_form(m: u64) -> Result<(u64, u64, u64), crate::graph::GraphError> {
    if m < 2 {
        return Err(crate::graph::GraphError::InvalidParameter(format!(
            "closed form needs m >= 2, got {m}"
        )));
    }
    let vertices = (m + 2) * (m + 1) * m / 6;
    let edges = 2 * m * (m * (m - 1) / 2);
    let squares = (m * m - m) * (m - 2);
    Ok((vertices, edges, squares))
}

/// The full subcomplex on vertices with Morse value at most `cut2`. Since a
/// cube's maximum is attained at its top vertex, this keeps exactly the cubes
/// whose top vertex lies at or below the cut.
pub fn sublevel_complex(c: &CubeComplex, md: &MorseData, cut2: i64) -> CubeComplex {
    c.subcomplex(|cube| md.cube_max(cube) <= cut2)
        .expect("sublevel sets of a Morse function are subcomplexes")
}
