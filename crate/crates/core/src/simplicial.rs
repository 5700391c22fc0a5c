//! Abstract simplicial complexes given by their facets, with connected
//! components, Euler characteristic, flagness and a certificate-producing
//! search for elementary collapses.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::homology;

pub type Simplex = Vec<usize>;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SimplicialError {
    #[error("complex is empty")]
    Empty,
    #[error("complex has {0} connected components")]
    Disconnected(usize),
}

/// A finite simplicial complex stored as its inclusion-maximal simplices.
///
/// Every facet is a sorted, duplicate-free vertex list; facets are sorted and
/// pairwise incomparable. The vertex set is the union of the facets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct SimplicialComplex {
    facets: Vec<Simplex>,
}

impl SimplicialComplex {
    pub fn empty() -> Self {
        SimplicialComplex::default()
    }

    /// Builds a complex from any generating set of simplices; non-maximal
    /// and repeated simplices are discarded.
    pub fn from_simplices<I, S>(simplices: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: IntoIterator<Item = usize>,
    {
        let mut all: Vec<Simplex> = simplices
            .into_iter()
            .map(|s| {
                let mut s: Vec<usize> = s.into_iter().collect();
                s.sort_unstable();
                s.dedup();
                s
            })
            .filter(|s| !s.is_empty())
            .collect();
        all.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| a.cmp(b)));
        all.dedup();
        let mut facets: Vec<Simplex> = Vec::new();
        for s in all {
            if !facets.iter().any(|f| is_subset(&s, f)) {
                facets.push(s);
            }
        }
        facets.sort();
        SimplicialComplex { facets }
    }

    pub fn facets(&self) -> &[Simplex] {
        &self.facets
    }

    pub fn is_empty(&self) -> bool {
        self.facets.is_empty()
    }

    pub fn vertices(&self) -> BTreeSet<usize> {
        self.facets.iter().flatten().copied().collect()
    }

    /// Dimension, or `None` for the empty complex.
    pub fn dimension(&self) -> Option<usize> {
        self.facets.iter().map(|f| f.len() - 1).max()
    }

    pub fn contains(&self, s: &[usize]) -> bool {
        let mut s = s.to_vec();
        s.sort_unstable();
        self.facets.iter().any(|f| is_subset(&s, f))
    }

    /// All nonempty simplices, grouped by dimension.
    pub fn simplices_by_dim(&self) -> Vec<Vec<Simplex>> {
        let mut by_dim: Vec<BTreeSet<Simplex>> =
            vec![BTreeSet::new(); self.dimension().map_or(0, |d| d + 1)];
        for f in &self.facets {
            for mask in 1u64..(1u64 << f.len()) {
                let s: Simplex = (0..f.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| f[i])
                    .collect();
                by_dim[s.len() - 1].insert(s);
            }
        }
        by_dim
            .into_iter()
            .map(|s| s.into_iter().collect())
            .collect()
    }

    /// Euler characteristic; zero for the empty complex.
    pub fn euler_characteristic(&self) -> i64 {
        self.simplices_by_dim()
            .iter()
            .enumerate()
            .map(|(d, s)| {
                if d % 2 == 0 {
                    s.len() as i64
                } else {
                    -(s.len() as i64)
                }
            })
            .sum()
    }

    /// Vertex adjacency of the 1-skeleton.
    pub fn one_skeleton(&self) -> BTreeMap<usize, BTreeSet<usize>> {
        let mut adj: BTreeMap<usize, BTreeSet<usize>> = BTreeMap::new();
        for f in &self.facets {
            for &a in f {
                let entry = adj.entry(a).or_default();
                entry.extend(f.iter().copied().filter(|&b| b != a));
            }
        }
        adj
    }

    /// Connected components, in order of their smallest vertex.
    pub fn components(&self) -> Vec<SimplicialComplex> {
        let verts: Vec<usize> = self.vertices().into_iter().collect();
        let pos: BTreeMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut parent: Vec<usize> = (0..verts.len()).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let next = p[y];
                p[y] = r;
                y = next;
            }
            r
        }
        for f in &self.facets {
            for v in &f[1..] {
                let a = find(&mut parent, pos[&f[0]]);
                let b = find(&mut parent, pos[v]);
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut groups: BTreeMap<usize, Vec<Simplex>> = BTreeMap::new();
        for f in &self.facets {
            let root = find(&mut parent, pos[&f[0]]);
            groups.entry(verts[root]).or_default().push(f.clone());
        }
        let mut comps: Vec<(usize, SimplicialComplex)> = groups
            .into_values()
            .map(|facets| {
                let min = facets.iter().map(|f| f[0]).min().unwrap();
                (min, SimplicialComplex { facets })
            })
            .collect();
        comps.sort_by_key(|(m, _)| *m);
        comps.into_iter().map(|(_, c)| c).collect()
    }

    /// True when every clique of the 1-skeleton spans a simplex.
    pub fn is_flag(&self) -> bool {
        self.non_flag_clique().is_none()
    }

    /// A clique of the 1-skeleton that is not a simplex, if any.
    pub fn non_flag_clique(&self) -> Option<Simplex> {
        let adj = self.one_skeleton();
        maximal_cliques(&adj)
            .into_iter()
            .find(|c| !c.is_empty() && !self.contains(c))
    }

    /// The cone with apex `apex`, which must not be a vertex already.
    pub fn cone(&self, apex: usize) -> SimplicialComplex {
        assert!(
            !self.vertices().contains(&apex),
            "apex must be a new vertex"
        );
        if self.is_empty() {
            return SimplicialComplex::from_simplices([[apex]]);
        }
        SimplicialComplex::from_simplices(self.facets.iter().map(|f| {
            let mut s = f.clone();
            s.push(apex);
            s
        }))
    }

    /// Flag complex of a graph: the maximal cliques become facets.
    pub fn clique_complex(adj: &BTreeMap<usize, BTreeSet<usize>>) -> SimplicialComplex {
        SimplicialComplex::from_simplices(maximal_cliques(adj))
    }
}

fn is_subset(small: &[usize], big: &[usize]) -> bool {
    let mut it = big.iter();
    small.iter().all(|x| it.any(|y| y == x))
}

/// Bron–Kerbosch with pivoting. Isolated vertices come out as singletons.
pub fn maximal_cliques(adj: &BTreeMap<usize, BTreeSet<usize>>) -> Vec<Simplex> {
    fn expand(
        adj: &BTreeMap<usize, BTreeSet<usize>>,
        r: &mut Vec<usize>,
        mut p: BTreeSet<usize>,
        mut x: BTreeSet<usize>,
        out: &mut Vec<Simplex>,
    ) {
        if p.is_empty() {
            if x.is_empty() {
                let mut c = r.clone();
                c.sort_unstable();
                out.push(c);
            }
            return;
        }
        let pivot = *p
            .union(&x)
            .max_by_key(|u| adj[*u].intersection(&p).count())
            .unwrap();
        let candidates: Vec<usize> = p.difference(&adj[&pivot]).copied().collect();
        for v in candidates {
            r.push(v);
            let np = p.intersection(&adj[&v]).copied().collect();
            let nx = x.intersection(&adj[&v]).copied().collect();
            expand(adj, r, np, nx, out);
            r.pop();
            p.remove(&v);
            x.insert(v);
        }
    }
    let mut out = Vec::new();
    expand(
        adj,
        &mut Vec::new(),
        adj.keys().copied().collect(),
        BTreeSet::new(),
        &mut out,
    );
    out.sort();
    out
}

/// One elementary collapse: `face` is free with unique proper coface `coface`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CollapseStep {
    pub face: Simplex,
    pub coface: Simplex,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CollapseOutcome {
    /// The steps reduce the complex to a single vertex.
    Collapsible(Vec<CollapseStep>),
    /// The search space was exhausted (or an invariant rules collapse out).
    NotCollapsible,
    /// The node budget ran out first.
    Indeterminate,
}

/// Searches for a sequence of elementary collapses down to one vertex.
///
/// Lowest-dimensional free faces are tried first, ties broken by vertex ids;
/// dead-end states are memoised and each visited state costs one unit of
/// `budget`.
pub fn is_collapsible(
    s: &SimplicialComplex,
    budget: usize,
) -> Result<CollapseOutcome, SimplicialError> {
    if s.is_empty() {
        return Err(SimplicialError::Empty);
    }
    let comps = s.components().len();
    if comps > 1 {
        return Err(SimplicialError::Disconnected(comps));
    }
    // Collapses preserve homotopy type, so χ must already be 1.
    if s.euler_characteristic() != 1 {
        return Ok(CollapseOutcome::NotCollapsible);
    }
    let state: BTreeSet<Simplex> = s.simplices_by_dim().into_iter().flatten().collect();
    let mut search = CollapseSearch {
        budget,
        visited: 0,
        dead: HashSet::new(),
        steps: Vec::new(),
    };
    match search.run(state) {
        Some(true) => Ok(CollapseOutcome::Collapsible(search.steps)),
        Some(false) => Ok(CollapseOutcome::NotCollapsible),
        None => Ok(CollapseOutcome::Indeterminate),
    }
}

struct CollapseSearch {
    budget: usize,
    visited: usize,
    dead: HashSet<BTreeSet<Simplex>>,
    steps: Vec<CollapseStep>,
}

impl CollapseSearch {
    /// `Some(found)` when decided, `None` when the budget ran out.
    fn run(&mut self, state: BTreeSet<Simplex>) -> Option<bool> {
        if state.len() == 1 {
            return Some(true);
        }
        if self.dead.contains(&state) {
            return Some(false);
        }
        if self.visited >= self.budget {
            return None;
        }
        self.visited += 1;
        let mut exhausted = true;
        for (face, coface) in free_pairs(&state) {
            let mut next = state.clone();
            next.remove(&face);
            next.remove(&coface);
            self.steps.push(CollapseStep { face, coface });
            match self.run(next) {
                Some(true) => return Some(true),
                Some(false) => {}
                None => exhausted = false,
            }
            self.steps.pop();
            if !exhausted {
                return None;
            }
        }
        self.dead.insert(state);
        Some(false)
    }
}

/// Free faces with their unique cofaces, lowest dimension first.
fn free_pairs(state: &BTreeSet<Simplex>) -> Vec<(Simplex, Simplex)> {
    let mut cofaces: BTreeMap<&Simplex, Vec<&Simplex>> = BTreeMap::new();
    for t in state {
        if t.len() < 2 {
            continue;
        }
        for skip in 0..t.len() {
            let face: Simplex = t
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != skip)
                .map(|(_, &v)| v)
                .collect();
            if let Some(f) = state.get(&face) {
                cofaces.entry(f).or_default().push(t);
            }
        }
    }
    let mut out: Vec<(Simplex, Simplex)> = cofaces
        .iter()
        .filter(|(_, cs)| cs.len() == 1 && !cofaces.contains_key(cs[0]))
        .map(|(f, cs)| ((*f).clone(), cs[0].clone()))
        .collect();
    out.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
    out
}

/// A component that failed to collapse, with its reduced homology.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub facets: Vec<Simplex>,
    pub reduced_betti: Vec<usize>,
    pub torsion: Vec<Vec<String>>,
}

impl Witness {
    fn of(component: &SimplicialComplex) -> Witness {
        let h = homology::simplicial_homology(component);
        let mut reduced_betti = h.betti.clone();
        if let Some(b0) = reduced_betti.first_mut() {
            *b0 -= 1;
        }
        Witness {
            facets: component.facets.clone(),
            reduced_betti,
            torsion: h
                .torsion
                .iter()
                .map(|t| t.iter().map(|x| x.to_string()).collect())
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LinkClassification {
    Empty,
    /// Every component collapsed to a point.
    UnionOfContractible {
        components: usize,
    },
    NotContractibleUnion {
        witness: Witness,
    },
    /// Some component exhausted the collapse budget.
    Indeterminate {
        facets: Vec<Simplex>,
    },
}

impl LinkClassification {
    pub fn kind(&self) -> &'static str {
        match self {
            LinkClassification::Empty => "empty",
            LinkClassification::UnionOfContractible { .. } => "union_of_contractible",
            LinkClassification::NotContractibleUnion { .. } => "not_contractible_union",
            LinkClassification::Indeterminate { .. } => "indeterminate",
        }
    }

    pub fn is_union_of_contractible(&self) -> bool {
        matches!(self, LinkClassification::UnionOfContractible { .. })
    }
}

/// Decides whether `s` is a disjoint union of collapsible (hence contractible)
/// pieces. A definite failure wins over budget exhaustion.
pub fn classify_contractible_union(s: &SimplicialComplex, budget: usize) -> LinkClassification {
    if s.is_empty() {
        return LinkClassification::Empty;
    }
    let comps = s.components();
    let mut undecided = None;
    for c in &comps {
        match is_collapsible(c, budget).expect("components are connected and nonempty") {
            CollapseOutcome::Collapsible(_) => {}
            CollapseOutcome::NotCollapsible => {
                return LinkClassification::NotContractibleUnion {
                    witness: Witness::of(c),
                }
            }
            CollapseOutcome::Indeterminate => {
                undecided.get_or_insert_with(|| c.facets.clone());
            }
        }
    }
    match undecided {
        Some(facets) => LinkClassification::Indeterminate { facets },
        None => LinkClassification::UnionOfContractible {
            components: comps.len(),
        },
    }
}

/// Wire form of a simplicial complex: `{"facets":[[0,1],[2]]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicialJson {
    pub facets: Vec<Simplex>,
}

impl From<&SimplicialComplex> for SimplicialJson {
    fn from(s: &SimplicialComplex) -> Self {
        SimplicialJson {
            facets: s.facets.clone(),
        }
    }
}

impl From<SimplicialJson> for SimplicialComplex {
    fn from(j: SimplicialJson) -> Self {
        SimplicialComplex::from_simplices(j.facets)
    }
}
