//! Integral cellular homology of cube complexes (and of small simplicial
//! complexes) through Smith normal form, plus closed-surface recognition.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::cube::{alternating_sum, vertex_link, CubeComplex};
use crate::simplicial::SimplicialComplex;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HomologyError {
    #[error("boundary of boundary is nonzero in degree {0}")]
    BoundaryNotNilpotent(usize),
    #[error(transparent)]
    Complex(#[from] crate::cube::ComplexError),
}

/// Sparse integer matrix stored by rows; rows hold `(column, value)` pairs
/// with nonzero values in increasing column order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatrix {
    nrows: usize,
    ncols: usize,
    rows: Vec<Vec<(usize, i64)>>,
}

impl SparseMatrix {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        SparseMatrix {
            nrows,
            ncols,
            rows: vec![Vec::new(); nrows],
        }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let ncols = rows.first().map_or(0, Vec::len);
        let mut m = SparseMatrix::zeros(rows.len(), ncols);
        for (r, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), ncols, "ragged matrix");
            m.rows[r] = row
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0)
                .map(|(c, &v)| (c, v))
                .collect();
        }
        m
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0; self.ncols]; self.nrows];
        for (r, row) in self.rows.iter().enumerate() {
            for &(c, v) in row {
                d[r][c] = v;
            }
        }
        d
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.rows[r]
            .iter()
            .find(|(cc, _)| *cc == c)
            .map_or(0, |(_, v)| *v)
    }

    /// Adds `v` to entry `(r, c)`.
    pub fn add(&mut self, r: usize, c: usize, v: i64) {
        let row = &mut self.rows[r];
        match row.binary_search_by_key(&c, |(cc, _)| *cc) {
            Ok(i) => {
                row[i].1 += v;
                if row[i].1 == 0 {
                    row.remove(i);
                }
            }
            Err(i) if v != 0 => row.insert(i, (c, v)),
            Err(_) => {}
        }
    }

    pub fn column(&self, c: usize) -> Vec<(usize, i64)> {
        self.rows
            .iter()
            .enumerate()
            .filter_map(|(r, row)| row.iter().find(|(cc, _)| *cc == c).map(|(_, v)| (r, *v)))
            .collect()
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(Vec::is_empty)
    }

    pub fn mul(&self, other: &SparseMatrix) -> SparseMatrix {
        assert_eq!(self.ncols, other.nrows, "dimension mismatch");
        let mut out = SparseMatrix::zeros(self.nrows, other.ncols);
        for (r, row) in self.rows.iter().enumerate() {
            let mut acc: BTreeMap<usize, i64> = BTreeMap::new();
            for &(k, a) in row {
                for &(c, b) in &other.rows[k] {
                    *acc.entry(c).or_insert(0) += a * b;
                }
            }
            out.rows[r] = acc.into_iter().filter(|(_, v)| *v != 0).collect();
        }
        out
    }
}

/// Invariant factors `d1 | d2 | … | dr` (all positive) of an integer matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub invariant_factors: Vec<BigInt>,
}

impl SmithForm {
    pub fn rank(&self) -> usize {
        self.invariant_factors.len()
    }

    /// Factors greater than one: the torsion they contribute to homology.
    pub fn torsion(&self) -> Vec<BigInt> {
        self.invariant_factors
            .iter()
            .filter(|d| !d.is_one())
            .cloned()
            .collect()
    }
}

/// Smith normal form over the integers.
///
/// Unit pivots are eliminated first on the sparse representation (choosing
/// the pivot with the smallest fill-in estimate); whatever remains is reduced
/// densely with arbitrary-precision arithmetic.
pub fn smith_normal_form(m: &SparseMatrix) -> SmithForm {
    let mut rows: Vec<BTreeMap<usize, BigInt>> = m
        .rows
        .iter()
        .map(|r| r.iter().map(|&(c, v)| (c, BigInt::from(v))).collect())
        .collect();
    let mut cols: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m.ncols];
    for (r, row) in rows.iter().enumerate() {
        for &c in row.keys() {
            cols[c].insert(r);
        }
    }
    let mut alive: BTreeSet<usize> = (0..m.nrows).filter(|&r| !rows[r].is_empty()).collect();
    let mut units = 0usize;

    loop {
        let mut best: Option<(usize, usize, usize)> = None;
        'scan: for &r in &alive {
            let rl = rows[r].len() - 1;
            for (&c, v) in &rows[r] {
                if v.abs().is_one() {
                    let cost = rl * (cols[c].len() - 1);
                    if best.is_none_or(|(b, _, _)| cost < b) {
                        best = Some((cost, r, c));
                        if cost == 0 {
                            break 'scan;
                        }
                    }
                }
            }
        }
        let Some((_, pr, pc)) = best else { break };
        let pivot_row = std::mem::take(&mut rows[pr]);
        let pivot = pivot_row[&pc].clone();
        let others: Vec<usize> = cols[pc].iter().copied().filter(|&r| r != pr).collect();
        for r in others {
            // pivot is ±1, so value / pivot == value * pivot
            let factor = &rows[r][&pc] * &pivot;
            for (&c, v) in &pivot_row {
                let entry = rows[r].entry(c).or_insert_with(BigInt::zero);
                *entry -= &factor * v;
                if entry.is_zero() {
                    rows[r].remove(&c);
                    cols[c].remove(&r);
                } else {
                    cols[c].insert(r);
                }
            }
            if rows[r].is_empty() {
                alive.remove(&r);
            }
        }
        for &c in pivot_row.keys() {
            cols[c].remove(&pr);
        }
        alive.remove(&pr);
        units += 1;
    }

    let mut invariant_factors = vec![BigInt::one(); units];
    let rest: Vec<usize> = alive.into_iter().collect();
    if !rest.is_empty() {
        let used: BTreeSet<usize> = rest.iter().flat_map(|&r| rows[r].keys().copied()).collect();
        let col_pos: BTreeMap<usize, usize> =
            used.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut dense = vec![vec![BigInt::zero(); used.len()]; rest.len()];
        for (i, &r) in rest.iter().enumerate() {
            for (c, v) in &rows[r] {
                dense[i][col_pos[c]] = v.clone();
            }
        }
        invariant_factors.extend(dense_smith(dense));
    }
    SmithForm { invariant_factors }
}

/// Diagonal of the Smith form of a dense matrix, nonzero entries only.
#[allow(clippy::needless_range_loop)]
fn dense_smith(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let nr = a.len();
    let nc = a.first().map_or(0, Vec::len);
    let mut diag = Vec::new();
    for t in 0..nr.min(nc) {
        loop {
            // smallest nonzero entry of the trailing block becomes the pivot
            let mut best: Option<(usize, usize)> = None;
            for i in t..nr {
                for j in t..nc {
                    if !a[i][j].is_zero()
                        && best.is_none_or(|(bi, bj)| a[i][j].abs() < a[bi][bj].abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                diag.sort();
                return diag;
            };
            a.swap(t, pi);
            for row in a.iter_mut() {
                row.swap(t, pj);
            }
            let mut clean = true;
            for i in t + 1..nr {
                if !a[i][t].is_zero() {
                    let q = a[i][t].div_floor(&a[t][t]);
                    for j in t..nc {
                        let d = &q * &a[t][j];
                        a[i][j] -= d;
                    }
                    clean &= a[i][t].is_zero();
                }
            }
            for j in t + 1..nc {
                if !a[t][j].is_zero() {
                    let q = a[t][j].div_floor(&a[t][t]);
                    for i in t..nr {
                        let d = &q * &a[i][t];
                        a[i][j] -= d;
                    }
                    clean &= a[t][j].is_zero();
                }
            }
            if !clean {
                continue;
            }
            // the pivot must divide the whole trailing block
            let bad = (t + 1..nr).find(|&i| (t + 1..nc).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
            match bad {
                Some(i) => {
                    for j in t..nc {
                        let v = a[i][j].clone();
                        a[t][j] += v;
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
    }
    diag.sort();
    diag
}

/// Boundary maps `∂_k` for `k = 1..=dim` (rows are `(k-1)`-cells, columns `k`-cells).
#[derive(Clone, Debug)]
pub struct ChainComplex {
    pub cell_counts: Vec<usize>,
    pub boundaries: Vec<SparseMatrix>,
}

impl ChainComplex {
    /// `∂_k`, if `1 <= k <= dim`.
    pub fn boundary(&self, k: usize) -> Option<&SparseMatrix> {
        k.checked_sub(1).and_then(|i| self.boundaries.get(i))
    }

    fn check(self) -> Result<ChainComplex, HomologyError> {
        for k in 1..self.boundaries.len() {
            if !self.boundaries[k - 1].mul(&self.boundaries[k]).is_zero() {
                return Err(HomologyError::BoundaryNotNilpotent(k));
            }
        }
        Ok(self)
    }
}

/// Cubical boundary: the `i`-th moving edge (by id) contributes
/// `(-1)^i (lower face − upper face)`.
pub fn boundary_matrices(c: &CubeComplex) -> Result<ChainComplex, HomologyError> {
    let cell_counts = c.f_vector();
    let mut boundaries = Vec::new();
    for k in 1..cell_counts.len() {
        let mut m = SparseMatrix::zeros(cell_counts[k - 1], cell_counts[k]);
        for i in 0..cell_counts[k] {
            for (slot, &[lo, hi]) in c.faces(k, i).iter().enumerate() {
                let sign = if slot % 2 == 0 { 1 } else { -1 };
                m.add(lo, i, sign);
                m.add(hi, i, -sign);
            }
        }
        boundaries.push(m);
    }
    ChainComplex {
        cell_counts,
        boundaries,
    }
    .check()
}

/// Simplicial boundary on the simplices of `s` in sorted order.
pub fn simplicial_chain_complex(s: &SimplicialComplex) -> ChainComplex {
    let by_dim = s.simplices_by_dim();
    let cell_counts: Vec<usize> = by_dim.iter().map(Vec::len).collect();
    let mut boundaries = Vec::new();
    for k in 1..by_dim.len() {
        let pos: BTreeMap<&Vec<usize>, usize> = by_dim[k - 1]
            .iter()
            .enumerate()
            .map(|(i, f)| (f, i))
            .collect();
        let mut m = SparseMatrix::zeros(by_dim[k - 1].len(), by_dim[k].len());
        for (j, simplex) in by_dim[k].iter().enumerate() {
            for skip in 0..simplex.len() {
                let face: Vec<usize> = simplex
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, &v)| v)
                    .collect();
                m.add(pos[&face], j, if skip % 2 == 0 { 1 } else { -1 });
            }
        }
        boundaries.push(m);
    }
    ChainComplex {
        cell_counts,
        boundaries,
    }
    .check()
    .expect("simplicial boundary squares to zero")
}

fn serialize_torsion<S: Serializer>(t: &[Vec<BigInt>], s: S) -> Result<S::Ok, S::Error> {
    let strings: Vec<Vec<String>> = t
        .iter()
        .map(|d| d.iter().map(BigInt::to_string).collect())
        .collect();
    strings.serialize(s)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyReport {
    pub betti: Vec<usize>,
    /// Invariant factors greater than one, per degree.
    #[serde(serialize_with = "serialize_torsion")]
    pub torsion: Vec<Vec<BigInt>>,
    pub euler_from_cells: i64,
    pub euler_from_betti: i64,
    pub euler_consistent: bool,
}

impl HomologyReport {
    pub fn betti(&self, k: usize) -> usize {
        self.betti.get(k).copied().unwrap_or(0)
    }

    pub fn is_torsion_free(&self) -> bool {
        self.torsion.iter().all(Vec::is_empty)
    }
}

/// `b_k = f_k − rank ∂_k − rank ∂_{k+1}`, torsion from the factors of `∂_{k+1}`.
pub fn homology_report(cc: &ChainComplex) -> HomologyReport {
    let forms: Vec<SmithForm> = cc.boundaries.iter().map(smith_normal_form).collect();
    let rank = |k: usize| {
        k.checked_sub(1)
            .and_then(|i| forms.get(i))
            .map_or(0, SmithForm::rank)
    };
    let dims = cc.cell_counts.len();
    let betti: Vec<usize> = (0..dims)
        .map(|k| cc.cell_counts[k] - rank(k) - rank(k + 1))
        .collect();
    let torsion: Vec<Vec<BigInt>> = (0..dims)
        .map(|k| forms.get(k).map_or_else(Vec::new, SmithForm::torsion))
        .collect();
    let euler_from_cells = alternating_sum(&cc.cell_counts);
    let euler_from_betti = alternating_sum(&betti);
    HomologyReport {
        betti,
        torsion,
        euler_from_cells,
        euler_from_betti,
        euler_consistent: euler_from_cells == euler_from_betti,
    }
}

pub fn cube_homology(c: &CubeComplex) -> Result<HomologyReport, HomologyError> {
    Ok(homology_report(&boundary_matrices(c)?))
}

pub fn simplicial_homology(s: &SimplicialComplex) -> HomologyReport {
    homology_report(&simplicial_chain_complex(s))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SurfaceReport {
    pub is_closed_surface: bool,
    pub orientable: Option<bool>,
    pub genus: Option<i64>,
    pub euler_characteristic: i64,
    pub failure: Option<String>,
    /// Per-component reports when the complex is disconnected.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub components: Vec<SurfaceReport>,
}

impl SurfaceReport {
    fn fail(chi: i64, reason: String) -> SurfaceReport {
        SurfaceReport {
            is_closed_surface: false,
            orientable: None,
            genus: None,
            euler_characteristic: chi,
            failure: Some(reason),
            components: Vec::new(),
        }
    }
}

/// Decides whether `c` is a closed surface and, if so, whether it is
/// orientable and of which genus.
pub fn surface_report(c: &CubeComplex) -> Result<SurfaceReport, HomologyError> {
    let chi = c.euler_characteristic();
    if c.is_empty() {
        return Ok(SurfaceReport::fail(chi, "empty complex".into()));
    }
    if c.num_components() > 1 {
        let components = c
            .components()
            .iter()
            .map(surface_report)
            .collect::<Result<Vec<_>, _>>()?;
        let mut r = SurfaceReport::fail(chi, format!("{} components", components.len()));
        r.is_closed_surface = components.iter().all(|s| s.is_closed_surface);
        if r.is_closed_surface {
            r.failure = None;
            r.orientable = Some(components.iter().all(|s| s.orientable == Some(true)));
        }
        r.components = components;
        return Ok(r);
    }
    if c.dimension() != Some(2) {
        return Ok(SurfaceReport::fail(
            chi,
            format!("dimension {}", c.dimension().unwrap()),
        ));
    }
    let mut squares_at_edge = vec![0usize; c.cells(1).len()];
    for i in 0..c.cells(2).len() {
        for pair in c.faces(2, i) {
            for &e in pair {
                squares_at_edge[e] += 1;
            }
        }
    }
    if let Some(e) = squares_at_edge.iter().position(|&n| n != 2) {
        return Ok(SurfaceReport::fail(
            chi,
            format!(
                "edge {:?} lies in {} squares",
                c.cells(1)[e],
                squares_at_edge[e]
            ),
        ));
    }
    for v in c.vertices() {
        let link = vertex_link(c, v)?;
        let s = &link.complex;
        let cycle = s.dimension() == Some(1)
            && s.components().len() == 1
            && s.one_skeleton().values().all(|n| n.len() == 2)
            && s.facets().iter().all(|f| f.len() == 2);
        if !cycle {
            return Ok(SurfaceReport::fail(
                chi,
                format!("link of {v:?} is not a single cycle"),
            ));
        }
    }
    let d2 = boundary_matrices(c)?.boundaries.swap_remove(1);
    let orientable = orient_surface(&d2, 0).is_some();
    Ok(SurfaceReport {
        is_closed_surface: true,
        orientable: Some(orientable),
        genus: orientable.then(|| (2 - chi) / 2),
        euler_characteristic: chi,
        failure: None,
        components: Vec::new(),
    })
}

/// Propagates an orientation from square `start` across shared edges so that
/// every edge receives opposite signs from its two squares. Returns the sign
/// per square, or `None` when the propagation meets a contradiction.
pub fn orient_surface(d2: &SparseMatrix, start: usize) -> Option<Vec<i64>> {
    let nsq = d2.ncols();
    let mut at_edge: Vec<Vec<(usize, i64)>> = vec![Vec::new(); d2.nrows()];
    for (e, row) in d2.rows.iter().enumerate() {
        at_edge[e] = row.clone();
    }
    let mut edges_of: Vec<Vec<(usize, i64)>> = vec![Vec::new(); nsq];
    for (e, row) in at_edge.iter().enumerate() {
        for &(s, v) in row {
            edges_of[s].push((e, v));
        }
    }
    let mut sign = vec![0i64; nsq];
    sign[start] = 1;
    let mut queue = VecDeque::from([start]);
    while let Some(s) = queue.pop_front() {
        for &(e, v) in &edges_of[s] {
            for &(t, w) in &at_edge[e] {
                if t == s {
                    continue;
                }
                // need sign[s]·v + sign[t]·w = 0
                let want = -sign[s] * v * w;
                if sign[t] == 0 {
                    sign[t] = want;
                    queue.push_back(t);
                } else if sign[t] != want {
                    return None;
                }
            }
        }
    }
    Some(sign)
}
