use rand::Rng as _;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};
use crate::phylo::{cophenetic_vector, is_equidistant, pair_names, PhyloTree, TreeBuilder, DEFAULT_TOL};
use crate::rng::{self, stream, Rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoalescentConfig {
    pub leaves: usize,
    /// Effective population size.
    pub ne: f64,
    /// Species depth divided by `ne`.
    pub ratio: f64,
    /// Gene trees per class.
    pub trees: usize,
    pub seed: u64,
}

impl CoalescentConfig {
    pub fn species_depth(&self) -> f64 {
        self.ratio * self.ne
    }

    fn validate(&self) -> Result<()> {
        if self.leaves < 3 {
            return Err(Error::invalid("need at least 3 leaves"));
        }
        if !(self.ne.is_finite() && self.ne > 0.0) {
            return Err(Error::invalid("effective population size must be positive"));
        }
        if !(self.ratio.is_finite() && self.ratio > 0.0) {
            return Err(Error::invalid("depth ratio must be positive"));
        }
        if self.trees == 0 {
            return Err(Error::invalid("need at least one gene tree per class"));
        }
        Ok(())
    }
}

fn exp_draw(rng: &mut Rng, rate: f64) -> f64 {
    Exp::new(rate).expect("positive rate").sample(rng)
}

/// Rate-1 pure-birth tree with `m` leaves `s1..sm`, rescaled so every leaf
/// sits at depth `depth`.
pub fn yule_tree(m: usize, depth: f64, seed: u64) -> Result<PhyloTree> {
    yule_with(m, depth, &mut rng::seeded(seed, stream::SPECIES))
}

fn yule_with(m: usize, depth: f64, rng: &mut Rng) -> Result<PhyloTree> {
    if m < 3 {
        return Err(Error::invalid("Yule tree needs at least 3 leaves"));
    }
    if !(depth.is_finite() && depth > 0.0) {
        return Err(Error::invalid("species depth must be positive"));
    }
    // (parent, birth time) per node; node 0 is the root at time 0
    let mut parent: Vec<Option<usize>> = vec![None, Some(0), Some(0)];
    let mut born = vec![0.0, 0.0, 0.0];
    let mut lineages = vec![1, 2];
    let mut t = 0.0;
    while lineages.len() < m {
        t += exp_draw(rng, lineages.len() as f64);
        let idx = rng.random_range(0..lineages.len());
        let split = lineages[idx];
        for _ in 0..2 {
            parent.push(Some(split));
            born.push(t);
        }
        lineages[idx] = parent.len() - 2;
        lineages.push(parent.len() - 1);
    }
    t += exp_draw(rng, m as f64);

    let scale = depth / t;
    let mut b = TreeBuilder::new();
    let mut ids = Vec::with_capacity(parent.len());
    for v in 0..parent.len() {
        let end = if lineages.contains(&v) {
            t
        } else {
            // an internal node ends when its children are born
            born[(v + 1..parent.len()).find(|&c| parent[c] == Some(v)).unwrap_or(v)]
        };
        let length = if v == 0 { 0.0 } else { (end - born[v]) * scale };
        ids.push(b.add_node(None, length));
    }
    for (v, p) in parent.iter().enumerate() {
        if let Some(p) = p {
            b.attach(ids[*p], ids[v]);
        }
    }
    let mut tree_nodes = b;
    for (i, &leaf) in lineages.iter().enumerate() {
        tree_nodes.set_label(ids[leaf], format!("s{}", i + 1));
    }
    tree_nodes.build(ids[0])
}

/// Gene trees under the multispecies coalescent, one lineage per species.
/// Times are in generations; lineages coalesce pairwise at rate `1 / (2 ne)`.
pub fn msc_gene_trees(species: &PhyloTree, ne: f64, n: usize, seed: u64) -> Result<Vec<PhyloTree>> {
    gene_trees_on_streams(species, ne, n, seed, stream::GENE_BASE)
}

fn gene_trees_on_streams(species: &PhyloTree, ne: f64, n: usize, seed: u64, base: u64) -> Result<Vec<PhyloTree>> {
    if !(ne.is_finite() && ne > 0.0) {
        return Err(Error::invalid("effective population size must be positive"));
    }
    if !is_equidistant(species, DEFAULT_TOL) {
        return Err(Error::invalid("species tree is not equidistant"));
    }
    (0..n)
        .map(|i| one_gene_tree(species, ne, &mut rng::seeded(seed, base + i as u64)))
        .collect()
}

fn one_gene_tree(species: &PhyloTree, ne: f64, rng: &mut Rng) -> Result<PhyloTree> {
    let depth = species.depths();
    let height = species.height();
    // age of each species node, measured back from the present
    let age = |v: usize| {
        if species.is_leaf(v) {
            0.0
        } else {
            (height - depth[v]).max(0.0)
        }
    };

    // gene nodes: (label, age, parent)
    let mut label: Vec<Option<String>> = Vec::new();
    let mut g_age: Vec<f64> = Vec::new();
    let mut g_parent: Vec<Option<usize>> = Vec::new();
    let mut outgoing: Vec<Vec<usize>> = vec![Vec::new(); species.len()];

    for v in species.preorder().into_iter().rev() {
        let node = species.node(v);
        let mut active: Vec<usize> = if species.is_leaf(v) {
            label.push(node.label.clone());
            g_age.push(0.0);
            g_parent.push(None);
            vec![label.len() - 1]
        } else {
            node.children.iter().flat_map(|&c| std::mem::take(&mut outgoing[c])).collect()
        };
        let mut t = age(v);
        let top = if node.parent.is_some() { t + node.length } else { f64::INFINITY };
        while active.len() > 1 {
            let k = active.len() as f64;
            let wait = exp_draw(rng, k * (k - 1.0) / 2.0 / (2.0 * ne));
            if t + wait > top {
                break;
            }
            t += wait;
            let i = rng.random_range(0..active.len());
            let mut j = rng.random_range(0..active.len() - 1);
            if j >= i {
                j += 1;
            }
            label.push(None);
            g_age.push(t);
            g_parent.push(None);
            let merged = label.len() - 1;
            g_parent[active[i]] = Some(merged);
            g_parent[active[j]] = Some(merged);
            let (lo, hi) = if i < j { (i, j) } else { (j, i) };
            active.swap_remove(hi);
            active[lo] = merged;
        }
        outgoing[v] = active;
    }
    let root = outgoing[species.root()][0];

    let mut b = TreeBuilder::new();
    for v in 0..label.len() {
        let length = g_parent[v].map_or(0.0, |p| g_age[p] - g_age[v]);
        b.add_node(label[v].clone(), length);
    }
    for (v, p) in g_parent.iter().enumerate() {
        if let Some(p) = p {
            b.attach(*p, v);
        }
    }
    b.build(root)
}

/// Species trees and gene trees behind a coalescent dataset.
#[derive(Debug, Clone)]
pub struct CoalescentSample {
    pub species: [PhyloTree; 2],
    pub gene_trees: [Vec<PhyloTree>; 2],
    pub dataset: Dataset,
}

/// Two independent species trees of depth `ratio * ne`, `trees` gene trees
/// under each. Features are cophenetic distances divided by `ne`.
pub fn simulate_coalescent(cfg: &CoalescentConfig) -> Result<CoalescentSample> {
    cfg.validate()?;
    let mut rng = rng::seeded(cfg.seed, stream::SPECIES);
    let s0 = yule_with(cfg.leaves, cfg.species_depth(), &mut rng)?;
    let s1 = yule_with(cfg.leaves, cfg.species_depth(), &mut rng)?;
    let g0 = gene_trees_on_streams(&s0, cfg.ne, cfg.trees, cfg.seed, stream::GENE_BASE)?;
    let g1 = gene_trees_on_streams(&s1, cfg.ne, cfg.trees, cfg.seed, stream::GENE_BASE + (1 << 31))?;

    let labels = s0.sorted_labels();
    let mut rows = Vec::with_capacity(2 * cfg.trees);
    for t in g0.iter().chain(&g1) {
        let u = cophenetic_vector(t);
        debug_assert_eq!(u.labels(), labels.as_slice());
        rows.push(u.values().iter().map(|x| x / cfg.ne).collect());
    }
    let classes = [0u8, 1].iter().flat_map(|&k| std::iter::repeat_n(k, cfg.trees)).collect();
    let mut dataset = Dataset::new(pair_names(&labels), rows, Some(classes))?;
    dataset.provenance.insert("generator".into(), "coalescent".into());
    dataset.provenance.insert("seed".into(), cfg.seed.to_string());
    Ok(CoalescentSample {
        species: [s0, s1],
        gene_trees: [g0, g1],
        dataset,
    })
}

pub fn make_coalescent_dataset(cfg: &CoalescentConfig) -> Result<Dataset> {
    simulate_coalescent(cfg).map(|s| s.dataset)
}
