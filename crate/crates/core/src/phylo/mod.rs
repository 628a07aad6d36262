//! Phylogenetic trees as points of the tropical projective torus.
//!
//! A rooted tree on `m` labelled leaves maps to its cophenetic (path length)
//! dissimilarity vector in `R^e`, `e = m (m - 1) / 2`. The tree is equidistant
//! exactly when that vector is an ultrametric.

mod newick;
mod tree;

pub use newick::{parse_newick, parse_newick_lines, to_newick};
pub use tree::{Node, NodeId, PhyloTree, TreeBuilder};

use crate::error::{Error, Result};

/// Default tolerance for [`is_ultrametric`] and [`is_equidistant`].
pub const DEFAULT_TOL: f64 = 1e-9;

/// Pairwise leaf distances `u(i, j)`, `i < j`, in lexicographic label order.
#[derive(Debug, Clone, PartialEq)]
pub struct DissimilarityMap {
    labels: Vec<String>,
    values: Vec<f64>,
}

impl DissimilarityMap {
    pub fn new(labels: Vec<String>, values: Vec<f64>) -> Result<Self> {
        let m = labels.len();
        if m < 2 {
            return Err(Error::invalid("dissimilarity map needs at least 2 leaves"));
        }
        if !labels.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::invalid("labels must be strictly increasing"));
        }
        if values.len() != m * (m - 1) / 2 {
            return Err(Error::DimensionMismatch {
                expected: m * (m - 1) / 2,
                found: values.len(),
            });
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid("dissimilarities must be finite and non-negative"));
        }
        Ok(DissimilarityMap { labels, values })
    }

    pub fn leaf_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    fn index(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        let m = self.labels.len();
        i * m - i * (i + 1) / 2 + (j - i - 1)
    }

    /// `u(i, j)` by leaf position; zero on the diagonal.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i == j {
            0.0
        } else {
            self.values[self.index(i, j)]
        }
    }

    /// Column names `pair_<a>_<b>` in value order.
    pub fn pair_names(&self) -> Vec<String> {
        pair_names(&self.labels)
    }
}

pub fn pair_names(labels: &[String]) -> Vec<String> {
    let mut out = Vec::with_capacity(labels.len() * labels.len().saturating_sub(1) / 2);
    for (i, a) in labels.iter().enumerate() {
        for b in &labels[i + 1..] {
            out.push(format!("pair_{a}_{b}"));
        }
    }
    out
}

/// Sum of branch lengths on the path between every pair of leaves.
pub fn cophenetic_vector(tree: &PhyloTree) -> DissimilarityMap {
    let depth = tree.depths();
    let labels = tree.sorted_labels();
    let mut leaf_of = vec![0; labels.len()];
    for v in tree.leaves() {
        let label = tree.node(v).label.as_ref().expect("leaves are labelled");
        leaf_of[labels.binary_search(label).expect("label present")] = v;
    }
    let ancestors = |mut v: NodeId| {
        let mut path = vec![v];
        while let Some(p) = tree.node(v).parent {
            path.push(p);
            v = p;
        }
        path.reverse();
        path
    };
    let paths: Vec<Vec<NodeId>> = leaf_of.iter().map(|&v| ancestors(v)).collect();
    let m = labels.len();
    let mut values = Vec::with_capacity(m * (m - 1) / 2);
    for i in 0..m {
        for j in i + 1..m {
            let lca = paths[i]
                .iter()
                .zip(&paths[j])
                .take_while(|(a, b)| a == b)
                .last()
                .map(|(a, _)| *a)
                .expect("paths share the root");
            values.push(depth[leaf_of[i]] + depth[leaf_of[j]] - 2.0 * depth[lca]);
        }
    }
    DissimilarityMap { labels, values }
}

/// Three-point condition: in every triple the largest value occurs at least
/// twice, up to `tol` relative to that largest value.
pub fn is_ultrametric(u: &DissimilarityMap, tol: f64) -> bool {
    let m = u.leaf_count();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let mut t = [u.get(i, j), u.get(i, k), u.get(j, k)];
                t.sort_by(f64::total_cmp);
                if t[2] - t[1] > tol * t[2] {
                    return false;
                }
            }
        }
    }
    true
}

/// All root-to-leaf depths agree up to `tol` relative to the largest depth.
pub fn is_equidistant(tree: &PhyloTree, tol: f64) -> bool {
    let depths = tree.leaf_depths();
    let hi = depths.values().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = depths.values().copied().fold(f64::INFINITY, f64::min);
    hi - lo <= tol * hi
}
