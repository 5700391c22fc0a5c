//! Worked examples for the height presets, certificates and surface checks.

use confspace::cube::Cube;
use confspace::graph::{parse_dot, subdivide};
use confspace::homology::{boundary_matrices, cube_homology, orient_surface, surface_report};
use confspace::morse::{
    pulsar_height, pulsar_params_from_labels, split_certificate, sun_extension_height, sun_height,
    sun_rays_from_labels, wedge_certificate, MorseError, SplitFailure,
};
use confspace::simplicial::LinkClassification;
use confspace::{build_conf, generate, induced_morse, Graph, GraphFamily, HeightFunction};

const BUDGET: usize = confspace::DEFAULT_COLLAPSE_BUDGET;

fn sun(rays: &[usize]) -> Graph {
    generate(
        &GraphFamily::Sun {
            rays: rays.to_vec(),
        },
        true,
    )
    .unwrap()
}

fn at(g: &Graph, h: &HeightFunction, label: &str) -> i64 {
    h.by_label(g, label)
        .unwrap_or_else(|| panic!("no vertex {label}"))
}

fn config(g: &Graph, labels: &[&str]) -> Cube {
    Cube::vertex(
        labels
            .iter()
            .map(|l| g.vertex_by_label(l).unwrap())
            .collect(),
    )
}

#[test]
fn sun_height_on_the_six_slot_sun() {
    let rays = [3, 1, 3, 2, 0, 2];
    let g = sun(&rays);
    let h = sun_height(&g, &rays).unwrap();
    assert_eq!(at(&g, &h, "v1"), 12);
    assert_eq!(at(&g, &h, "v7"), 0);
    assert_eq!(at(&g, &h, "v12"), 10);
    assert_eq!(at(&g, &h, "v1,1"), 14);
    assert_eq!(at(&g, &h, "w1,1"), 13);
    h.validate(&g).unwrap();
}

#[test]
fn sun_extension_heights() {
    let g = sun(&[1, 0, 0, 0, 0, 0]);
    let h = sun_extension_height(&g, &[0; 6]).unwrap();
    assert_eq!(at(&g, &h, "v1,1"), 76);
    assert_eq!(at(&g, &h, "w1,1"), 44);
    assert_eq!(at(&g, &h, "v1"), 12);

    let g = sun(&[2, 1]);
    let h = sun_extension_height(&g, &[1, 1]).unwrap();
    assert_eq!(at(&g, &h, "v1,2"), 36);
    assert_eq!(at(&g, &h, "w1,2"), 20);
    // the older ray at v1 keeps its sun height
    assert_eq!(at(&g, &h, "v1,1"), 6);
    let old_max = (0..g.num_vertices())
        .filter(|&v| !matches!(g.label(v), Some("v1,2" | "w1,2")))
        .map(|v| h.get(v))
        .max()
        .unwrap();
    assert_eq!(old_max, 2 * (2 + 1));
}

#[test]
fn presets_reject_mismatched_graphs() {
    let g = sun(&[1, 0]);
    assert!(matches!(
        sun_height(&g, &[0, 1, 0]),
        Err(MorseError::ParameterMismatch(_))
    ));
    let t = generate(&GraphFamily::Theta { m: 3 }, true).unwrap();
    assert!(matches!(
        pulsar_height(&t, 3, 1, 0),
        Err(MorseError::ParameterMismatch(_))
    ));
    assert!(matches!(
        HeightFunction::new(vec![0; 3]).validate(&t),
        Err(MorseError::HeightCount {
            expected: 5,
            got: 3
        })
    ));
}

#[test]
fn parameters_are_recovered_from_labels() {
    for rays in [vec![0, 0], vec![0, 1], vec![3, 1, 3, 2, 0, 2]] {
        assert_eq!(sun_rays_from_labels(&sun(&rays)), Some(rays));
    }
    for (m, n1, n2) in [(3, 1, 0), (4, 2, 1), (2, 0, 3)] {
        let g = generate(&GraphFamily::Pulsar { m, n1, n2 }, true).unwrap();
        assert_eq!(pulsar_params_from_labels(&g), Some((m, n1, n2)));
    }
    let t = generate(&GraphFamily::Theta { m: 3 }, true).unwrap();
    assert_eq!(sun_rays_from_labels(&t), None);
}

#[test]
fn pulsar_height_tables() {
    let g = generate(&GraphFamily::Pulsar { m: 4, n1: 1, n2: 0 }, true).unwrap();
    let h = pulsar_height(&g, 4, 1, 0).unwrap();
    let expect = [
        ("a2", 0),
        ("b1", 2),
        ("b2", 2),
        ("b3", 2),
        ("b4", 2),
        ("a1", 4),
        ("c1", 10),
        ("c1'", 12),
    ];
    for (label, v) in expect {
        assert_eq!(at(&g, &h, label), v, "{label}");
    }
    let g = generate(&GraphFamily::Pulsar { m: 3, n1: 0, n2: 2 }, true).unwrap();
    let h = pulsar_height(&g, 3, 0, 2).unwrap();
    for (label, v) in [("d1", 1), ("d1'", 2), ("d2", 1), ("d2'", 2)] {
        assert_eq!(at(&g, &h, label), v, "{label}");
    }
    h.validate(&g).unwrap();
}

#[test]
fn four_cycle_is_free_of_rank_one_under_any_height() {
    let g = generate(&GraphFamily::Cycle { k: 4 }, false).unwrap();
    let c = build_conf(&g, 3);
    for values in [[4, 2, 0, 2], [0, 1, 0, 1], [3, 1, 2, 0], [0, 5, 9, 5]] {
        let md = induced_morse(&c, &HeightFunction::new(values.to_vec())).unwrap();
        let w = wedge_certificate(&md, BUDGET).unwrap();
        assert!(w.ok, "{values:?}");
        assert_eq!(w.free_rank, Some(1));
    }
}

#[test]
fn sun_with_one_ray_is_certified() {
    let g = sun(&[1, 0]);
    let c = build_conf(&g, 3);
    let md = induced_morse(&c, &sun_height(&g, &[1, 0]).unwrap()).unwrap();
    let w = wedge_certificate(&md, BUDGET).unwrap();
    let h = cube_homology(&c).unwrap();
    assert!(w.ok);
    assert_eq!(w.free_rank, Some(h.betti(1)));
    assert_eq!(h.betti(1) as i64, 1 - c.euler_characteristic());
}

#[test]
fn sun_heights_leave_a_circle_on_the_six_cycle() {
    // Under the plain sun height the three tokens at v1, v3, v5 can each
    // slide down two ways; the disjoint pairs form a 4-cycle.
    let g = sun(&[0, 0, 0]);
    let c = build_conf(&g, 3);
    let md = induced_morse(&c, &sun_height(&g, &[0, 0, 0]).unwrap()).unwrap();
    let w = wedge_certificate(&md, BUDGET).unwrap();
    assert!(!w.ok);
    assert_eq!(w.failures.len(), 1);
    assert_eq!(w.failures[0].vertex, config(&g, &["v1", "v3", "v5"]));
    let link = md
        .descending_link(&config(&g, &["v1", "v3", "v5"]))
        .unwrap();
    assert_eq!(link.complex.euler_characteristic(), 0);
    assert_eq!(link.complex.facets().len(), 4);
    // the homology still says "circle"
    assert_eq!(cube_homology(&c).unwrap().betti, vec![1, 1, 0, 0]);
}

#[test]
fn theta_four_is_not_a_wedge_of_circles() {
    let g = generate(&GraphFamily::Theta { m: 4 }, true).unwrap();
    let c = build_conf(&g, 3);
    let md = induced_morse(&c, &pulsar_height(&g, 4, 0, 0).unwrap()).unwrap();
    let w = wedge_certificate(&md, BUDGET).unwrap();
    assert!(!w.ok);
    assert!(w.free_rank.is_none());
    assert!(w
        .failures
        .iter()
        .all(|f| f.kind == "not_contractible_union"));
}

#[test]
fn theta_split_has_nothing_above_the_cut() {
    for m in 2..=5 {
        let g = generate(&GraphFamily::Theta { m }, true).unwrap();
        let c = build_conf(&g, 3);
        let md = induced_morse(&c, &pulsar_height(&g, m, 0, 0).unwrap()).unwrap();
        let s = split_certificate(&md, 8, BUDGET).unwrap();
        assert!(s.ok);
        assert_eq!(s.vertices_above_cut, 0);
        assert_eq!(s.rank_free_factor, 0);
        assert_eq!(s.sublevel.f_vector(), c.f_vector());
    }
}

#[test]
fn certificates_reject_disconnected_input() {
    let mut g = Graph::with_vertices(4);
    g.add_edge(0, 1).unwrap();
    g.add_edge(2, 3).unwrap();
    let c = build_conf(&g, 2);
    assert_eq!(c.num_components(), 3);
    let md = induced_morse(&c, &HeightFunction::new(vec![0, 1, 0, 1])).unwrap();
    assert_eq!(
        wedge_certificate(&md, BUDGET).unwrap_err(),
        MorseError::Disconnected(3)
    );
    assert_eq!(
        split_certificate(&md, 0, BUDGET).unwrap_err(),
        MorseError::Disconnected(3)
    );

    // two opposite corners of the configuration 4-cycle
    let g = generate(&GraphFamily::Cycle { k: 4 }, false).unwrap();
    let c = build_conf(&g, 3);
    let md = induced_morse(&c, &HeightFunction::new(vec![0, 2, 0, 2])).unwrap();
    assert_eq!(
        split_certificate(&md, 2, BUDGET).unwrap_err(),
        MorseError::SublevelDisconnected(2)
    );
}

#[test]
fn empty_link_above_the_cut_has_its_own_code() {
    let g = generate(&GraphFamily::Cycle { k: 4 }, false).unwrap();
    let c = build_conf(&g, 3);
    let md = induced_morse(&c, &HeightFunction::new(vec![0, 1, 0, 3])).unwrap();
    // configurations are named by their empty vertex: values 4, 3, 4, 1 around
    // the configuration cycle, so the one at 3 is a second local minimum
    let s = split_certificate(&md, 1, BUDGET);
    match s {
        Err(MorseError::SublevelDisconnected(_)) => panic!("sublevel is a single vertex"),
        Err(e) => panic!("{e}"),
        Ok(s) => {
            assert!(!s.ok);
            assert_eq!(s.failure, Some(SplitFailure::EmptyLinkAboveCut));
        }
    }
}

#[test]
fn wedge_classifications_cover_every_vertex() {
    let g = sun(&[1, 1]);
    let c = build_conf(&g, 3);
    let md = induced_morse(&c, &sun_height(&g, &[1, 1]).unwrap()).unwrap();
    let w = wedge_certificate(&md, BUDGET).unwrap();
    assert_eq!(w.classifications.len(), c.vertices().len());
    let s = &w.summary;
    assert_eq!(
        s.empty + s.union_of_contractible + s.not_contractible_union,
        c.vertices().len()
    );
    let minima = w
        .classifications
        .iter()
        .filter(|k| matches!(k, LinkClassification::Empty))
        .count();
    assert_eq!(minima, s.empty);
    assert!(minima >= 1);
}

#[test]
fn theta_four_orientation_does_not_depend_on_the_first_square() {
    let c = build_conf(&generate(&GraphFamily::Theta { m: 4 }, true).unwrap(), 3);
    let d2 = boundary_matrices(&c).unwrap().boundary(2).unwrap().clone();
    let reference = orient_surface(&d2, 0).expect("orientable");
    for start in 0..d2.ncols() {
        let signs = orient_surface(&d2, start).expect("orientable from every start");
        let flip = signs[0] * reference[0];
        assert!(
            signs.iter().zip(&reference).all(|(a, b)| *a == flip * b),
            "start {start}"
        );
    }
}

#[test]
fn surface_reports() {
    let theta = |m| build_conf(&generate(&GraphFamily::Theta { m }, true).unwrap(), 3);
    let s = surface_report(&theta(4)).unwrap();
    assert!(s.is_closed_surface);
    assert_eq!((s.orientable, s.genus), (Some(true), Some(3)));
    let s = surface_report(&theta(3)).unwrap();
    assert!(!s.is_closed_surface);
    assert_eq!(s.euler_characteristic, -2);
    assert_eq!(cube_homology(&theta(2)).unwrap().betti, vec![1, 1]);
    let c4 = build_conf(&generate(&GraphFamily::Cycle { k: 4 }, false).unwrap(), 3);
    assert!(!surface_report(&c4).unwrap().is_closed_surface);
    let point = build_conf(&generate(&GraphFamily::Path { k: 3 }, false).unwrap(), 3);
    assert_eq!(point.f_vector(), vec![1]);
    assert!(boundary_matrices(&point).unwrap().boundaries.is_empty());
}

fn isomorphic(a: &Graph, b: &Graph) -> bool {
    fn edge_multiset(g: &Graph, perm: &[usize]) -> Vec<[usize; 2]> {
        let mut e: Vec<[usize; 2]> = g
            .edges()
            .iter()
            .map(|&[x, y]| {
                let (x, y) = (perm[x], perm[y]);
                [x.min(y), x.max(y)]
            })
            .collect();
        e.sort();
        e
    }
    fn permutations(n: usize) -> Vec<Vec<usize>> {
        if n == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for p in permutations(n - 1) {
            for i in 0..n {
                let mut q = p.clone();
                q.insert(i, n - 1);
                out.push(q);
            }
        }
        out
    }
    if a.num_vertices() != b.num_vertices() || a.num_edges() != b.num_edges() {
        return false;
    }
    let target = edge_multiset(b, &(0..b.num_vertices()).collect::<Vec<_>>());
    permutations(a.num_vertices())
        .iter()
        .any(|p| edge_multiset(a, p) == target)
}

#[test]
fn subdividing_every_edge_gives_the_generated_theta() {
    let raw = generate(&GraphFamily::Theta { m: 4 }, false).unwrap();
    let mut g = raw.clone();
    for e in 0..raw.num_edges() {
        g = subdivide(&g, e, 1).unwrap();
    }
    let generated = generate(&GraphFamily::Theta { m: 4 }, true).unwrap();
    assert!(isomorphic(&g, &generated));
    assert_eq!(
        build_conf(&g, 3).f_vector(),
        build_conf(&generated, 3).f_vector()
    );
    assert!(!isomorphic(&raw, &generated));
}

#[test]
fn dot_input_matches_the_generator() {
    let dot = "graph theta3 { a1 -- b1 -- a2; a1 -- b2 -- a2; a1 -- b3 -- a2; }";
    let g = parse_dot(dot).unwrap();
    let generated = generate(&GraphFamily::Theta { m: 3 }, true).unwrap();
    assert!(isomorphic(&g, &generated));
    assert_eq!(
        build_conf(&g, 3).labelled_cells(),
        build_conf(&generated, 3).labelled_cells()
    );
}
