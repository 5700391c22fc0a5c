//! Inputs shared by the criterion benchmarks in `benches/`.

use confspace::morse::pulsar_height;
use confspace::{generate, Graph, GraphFamily, HeightFunction};

/// The subdivided theta graph with `m` arcs.
pub fn theta(m: usize) -> Graph {
    generate(&GraphFamily::Theta { m }, true).expect("theta graphs exist for m >= 2")
}

/// A subdivided pulsar graph with its preset height.
pub fn pulsar(m: usize, n1: usize, n2: usize) -> (Graph, HeightFunction) {
    let g = generate(&GraphFamily::Pulsar { m, n1, n2 }, true).expect("valid pulsar parameters");
    let h = pulsar_height(&g, m, n1, n2).expect("preset matches the generated graph");
    (g, h)
}
