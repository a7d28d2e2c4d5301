use ndarray::Array2;
use vulngraph_tensor::Matrix;

/// Dense adjacency operators derived from a directed edge list.
///
/// `a_in[v][u] = 1` when edge u -> v exists, so `a_in @ X` sums messages
/// from predecessors; `a_out` is the transpose direction. `mask` is the
/// row-major n*n attention neighborhood: undirected adjacency plus
/// self-loops.
#[derive(Debug, Clone)]
pub struct AdjacencyView {
    pub n: usize,
    pub a_in: Matrix,
    pub a_out: Matrix,
    pub mask: Vec<bool>,
}

impl AdjacencyView {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Self {
        assert!(n >= 1, "graph must have at least one node");
        let mut a_in = Array2::zeros((n, n));
        let mut a_out = Array2::zeros((n, n));
        let mut mask = vec![false; n * n];
        for i in 0..n {
            mask[i * n + i] = true;
        }
        for &(u, v) in edges {
            assert!(u < n && v < n, "edge ({u}, {v}) out of range");
            a_in[(v, u)] = 1.0;
            a_out[(u, v)] = 1.0;
            mask[u * n + v] = true;
            mask[v * n + u] = true;
        }
        AdjacencyView { n, a_in, a_out, mask }
    }
}
