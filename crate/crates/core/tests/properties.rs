use std::collections::{BTreeMap, BTreeSet};

use confspace::cube::{conf_vertex_link, vertex_link, Link, Move};
use confspace::graph::is_admissible;
use confspace::homology::{boundary_matrices, cube_homology, smith_normal_form, SparseMatrix};
use confspace::morse::descending_link_by_moves;
use confspace::simplicial::{classify_contractible_union, is_collapsible, CollapseOutcome};
use confspace::{
    build_conf, generate, induced_morse, Graph, GraphFamily, HeightFunction, SimplicialComplex,
};
use proptest::prelude::*;

fn small_graph() -> impl Strategy<Value = Graph> {
    (2usize..=7).prop_flat_map(|v| {
        prop::collection::vec((0..v, 0..v), 0..=9).prop_map(move |pairs| {
            let mut g = Graph::with_vertices(v);
            for (a, b) in pairs {
                if a != b {
                    g.add_edge(a, b).unwrap();
                }
            }
            g
        })
    })
}

fn graph_and_height() -> impl Strategy<Value = (Graph, HeightFunction)> {
    small_graph().prop_flat_map(|g| {
        let v = g.num_vertices();
        prop::collection::vec(0i64..6, v).prop_map(move |raw| {
            // push values apart along edges until no edge is flat
            let mut vals = raw;
            while let Some(&[a, b]) = g.edges().iter().find(|&&[a, b]| vals[a] == vals[b]) {
                vals[a.max(b)] += 7;
            }
            (g.clone(), HeightFunction::new(vals))
        })
    })
}

/// Cube counts by brute force over edge and vertex subsets.
fn f_vector_oracle(g: &Graph, n: usize) -> Vec<usize> {
    let (v, e) = (g.num_vertices(), g.num_edges());
    let mut f = vec![0usize; n + 1];
    for emask in 0u32..1 << e {
        let k = emask.count_ones() as usize;
        if k > n {
            continue;
        }
        let mut used = 0u32;
        let mut ok = true;
        for i in (0..e).filter(|i| emask >> i & 1 == 1) {
            let [a, b] = g.edge(i);
            let bits = (1 << a) | (1 << b);
            ok &= used & bits == 0;
            used |= bits;
        }
        if !ok {
            continue;
        }
        f[k] += (0u32..1 << v)
            .filter(|vm| vm & used == 0 && vm.count_ones() as usize == n - k)
            .count();
    }
    while f.last() == Some(&0) {
        f.pop();
    }
    f
}

fn facet_moves(link: &Link) -> BTreeSet<BTreeSet<Move>> {
    link.complex
        .facets()
        .iter()
        .map(|f| f.iter().map(|&i| link.moves[i]).collect())
        .collect()
}

fn relabel(s: &SimplicialComplex, perm: &[usize]) -> SimplicialComplex {
    SimplicialComplex::from_simplices(
        s.facets()
            .iter()
            .map(|f| f.iter().map(|&v| perm[v]).collect::<Vec<_>>()),
    )
}

fn outcome_kind(o: &CollapseOutcome) -> &'static str {
    match o {
        CollapseOutcome::Collapsible(_) => "collapsible",
        CollapseOutcome::NotCollapsible => "not collapsible",
        CollapseOutcome::Indeterminate => "indeterminate",
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn f_vector_matches_subset_enumeration(g in small_graph(), n in 1usize..=3) {
        let c = build_conf(&g, n);
        prop_assert_eq!(c.f_vector(), f_vector_oracle(&g, n));
    }

    #[test]
    fn empty_exactly_when_too_few_vertices(g in small_graph(), n in 1usize..=8) {
        prop_assert_eq!(build_conf(&g, n).is_empty(), g.num_vertices() < n);
    }

    #[test]
    fn boundaries_square_to_zero_and_euler_agrees(g in small_graph(), n in 1usize..=3) {
        let c = build_conf(&g, n);
        prop_assert!(boundary_matrices(&c).is_ok());
        let h = cube_homology(&c).unwrap();
        prop_assert!(h.euler_consistent);
        prop_assert_eq!(h.euler_from_cells, c.euler_characteristic());
        prop_assert_eq!(h.betti(0), c.num_components());
    }

    #[test]
    fn vertex_link_by_cubes_equals_clique_of_moves(g in small_graph(), n in 1usize..=3) {
        let c = build_conf(&g, n);
        for v in c.vertices() {
            let direct = vertex_link(&c, v).unwrap();
            let clique = conf_vertex_link(&g, &v.vertices);
            prop_assert_eq!(facet_moves(&direct), facet_moves(&clique));
        }
    }

    #[test]
    fn morse_partition_identity((g, h) in graph_and_height(), n in 1usize..=3) {
        let c = build_conf(&g, n);
        let md = induced_morse(&c, &h).unwrap();
        prop_assert_eq!(md.morse_euler_sum(), c.euler_characteristic());
        for (i, v) in c.vertices().iter().enumerate() {
            let clique = descending_link_by_moves(&g, &h, &v.vertices);
            prop_assert_eq!(facet_moves(&md.descending_links()[i]), facet_moves(&clique));
        }
    }

    #[test]
    fn level_sweep_adds_descending_cubes((g, h) in graph_and_height(), n in 1usize..=3) {
        let c = build_conf(&g, n);
        let md = induced_morse(&c, &h).unwrap();
        let dims = c.f_vector().len();
        let mut new_at: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
        for k in 0..dims {
            for i in 0..c.cells(k).len() {
                let level = md.vertex_values2()[md.top_vertex(k, i)];
                new_at.entry(level).or_insert_with(|| vec![0; dims])[k] += 1;
            }
        }
        let mut running = vec![0; dims];
        for (level, added) in new_at {
            for k in 0..dims {
                running[k] += added[k];
            }
            let mut f = md.sublevel(level).f_vector();
            f.resize(dims, 0);
            prop_assert_eq!(&f, &running);
        }
    }

    #[test]
    fn collapsibility_ignores_vertex_names(
        simplices in prop::collection::vec(prop::collection::btree_set(0usize..6, 1..=3), 1..6),
        perm in Just((0..6).collect::<Vec<usize>>()).prop_shuffle(),
    ) {
        let s = SimplicialComplex::from_simplices(simplices.into_iter().map(|x| x.into_iter().collect::<Vec<_>>()));
        let t = relabel(&s, &perm);
        match (is_collapsible(&s, 100_000), is_collapsible(&t, 100_000)) {
            (Ok(a), Ok(b)) => prop_assert_eq!(outcome_kind(&a), outcome_kind(&b)),
            (a, b) => prop_assert_eq!(a.is_err(), b.is_err()),
        }
        prop_assert_eq!(classify_contractible_union(&s, 100_000).kind(), classify_contractible_union(&t, 100_000).kind());
    }

    #[test]
    fn cones_are_contractible(
        simplices in prop::collection::vec(prop::collection::btree_set(0usize..6, 1..=3), 1..6),
    ) {
        let s = SimplicialComplex::from_simplices(simplices.into_iter().map(|x| x.into_iter().collect::<Vec<_>>()));
        let c = s.cone(99);
        prop_assert_eq!(c.components().len(), 1);
        prop_assert!(matches!(is_collapsible(&c, 100_000), Ok(CollapseOutcome::Collapsible(_))));
        prop_assert_eq!(classify_contractible_union(&c, 100_000).kind(), "union_of_contractible");
    }

    #[test]
    fn smith_form_survives_unimodular_operations(
        rows in prop::collection::vec(prop::collection::vec(-4i64..=4, 5), 1..=5),
        ops in prop::collection::vec((0usize..5, 0usize..5, -3i64..=3, any::<bool>()), 0..12),
    ) {
        let mut m = rows.clone();
        let r = m.len();
        for (a, b, k, by_rows) in ops {
            if by_rows {
                let (a, b) = (a % r, b % r);
                if a != b {
                    let src = m[b].clone();
                    for (x, y) in m[a].iter_mut().zip(src) {
                        *x += k * y;
                    }
                } else {
                    m.swap(a, (a + 1) % r);
                }
            } else if a != b {
                for row in m.iter_mut() {
                    row[a] += k * row[b];
                }
            } else {
                for row in m.iter_mut() {
                    row[a] = -row[a];
                }
            }
        }
        let before = smith_normal_form(&SparseMatrix::from_dense(&rows));
        let after = smith_normal_form(&SparseMatrix::from_dense(&m));
        prop_assert_eq!(before.invariant_factors, after.invariant_factors);
    }

    #[test]
    fn graph_json_round_trips(g in small_graph()) {
        let back = Graph::from_json_str(&g.to_json_string()).unwrap();
        prop_assert_eq!(&back, &g.canonical());
        prop_assert_eq!(back.to_json_string(), g.to_json_string());
    }
}

#[test]
fn generated_families_are_admissible_for_three_strands() {
    let mut families = vec![GraphFamily::Cycle { k: 3 }, GraphFamily::Path { k: 3 }];
    families.extend((2..=8).map(|m| GraphFamily::Theta { m }));
    families.extend(
        [(3, 1, 0), (4, 2, 1), (2, 0, 3)].map(|(m, n1, n2)| GraphFamily::Pulsar { m, n1, n2 }),
    );
    families.extend(
        [vec![0, 0], vec![1, 0, 2], vec![3, 1, 3, 2, 0, 2]].map(|rays| GraphFamily::Sun { rays }),
    );
    families.extend([(1, 0), (2, 3)].map(|(circles, rays)| GraphFamily::Rose { circles, rays }));
    for family in families {
        let g = generate(&family, true).unwrap();
        let report = is_admissible(&g, 3).unwrap();
        assert!(report.ok, "{family}: {:?}", report.violations);
    }
}
