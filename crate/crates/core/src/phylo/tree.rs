use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub parent: Option<NodeId>,
    pub children: Vec<NodeId>,
    /// Length of the edge to the parent; zero for the root.
    pub length: f64,
    /// Set on leaves only.
    pub label: Option<String>,
}

/// Rooted tree with labelled leaves and non-negative branch lengths, stored as
/// an arena. Internal nodes may have any number (>= 1) of children.
#[derive(Debug, Clone, PartialEq)]
pub struct PhyloTree {
    nodes: Vec<Node>,
    root: NodeId,
}

/// Incremental construction helper used by the parser and the simulators.
#[derive(Debug, Default)]
pub struct TreeBuilder {
    nodes: Vec<Node>,
}

impl TreeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_node(&mut self, label: Option<String>, length: f64) -> NodeId {
        self.nodes.push(Node {
            parent: None,
            children: Vec::new(),
            length,
            label,
        });
        self.nodes.len() - 1
    }

    pub fn attach(&mut self, parent: NodeId, child: NodeId) {
        self.nodes[child].parent = Some(parent);
        self.nodes[parent].children.push(child);
    }

    pub fn set_length(&mut self, node: NodeId, length: f64) {
        self.nodes[node].length = length;
    }

    pub fn set_label(&mut self, node: NodeId, label: String) {
        self.nodes[node].label = Some(label);
    }

    pub fn build(self, root: NodeId) -> Result<PhyloTree> {
        PhyloTree::from_nodes(self.nodes, root)
    }
}

impl PhyloTree {
    pub fn from_nodes(mut nodes: Vec<Node>, root: NodeId) -> Result<Self> {
        if root >= nodes.len() || nodes[root].parent.is_some() {
            return Err(Error::invalid("invalid root"));
        }
        nodes[root].length = 0.0;
        let mut seen = vec![false; nodes.len()];
        let mut stack = vec![root];
        let mut labels = BTreeSet::new();
        while let Some(v) = stack.pop() {
            if std::mem::replace(&mut seen[v], true) {
                return Err(Error::invalid("tree contains a cycle"));
            }
            let node = &nodes[v];
            if !(node.length.is_finite() && node.length >= 0.0) {
                return Err(Error::invalid(format!("branch length {} is not finite and non-negative", node.length)));
            }
            if node.children.is_empty() {
                let label = node
                    .label
                    .as_ref()
                    .ok_or_else(|| Error::invalid("leaf without label"))?;
                if !labels.insert(label.clone()) {
                    return Err(Error::invalid(format!("duplicate leaf label `{label}`")));
                }
            }
            for &c in &node.children {
                if nodes[c].parent != Some(v) {
                    return Err(Error::invalid("inconsistent parent links"));
                }
                stack.push(c);
            }
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::invalid("tree is not connected"));
        }
        if labels.len() < 2 {
            return Err(Error::invalid("tree needs at least 2 leaves"));
        }
        for n in &mut nodes {
            if !n.children.is_empty() {
                n.label = None;
            }
        }
        Ok(PhyloTree { nodes, root })
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn is_leaf(&self, id: NodeId) -> bool {
        self.nodes[id].children.is_empty()
    }

    /// Leaves in depth-first (Newick) order.
    pub fn leaves(&self) -> Vec<NodeId> {
        self.preorder().into_iter().filter(|&v| self.is_leaf(v)).collect()
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.children.is_empty()).count()
    }

    /// Leaf labels in lexicographic order.
    pub fn sorted_labels(&self) -> Vec<String> {
        let mut l: Vec<String> = self.nodes.iter().filter_map(|n| n.label.clone()).collect();
        l.sort();
        l
    }

    pub fn preorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![self.root];
        while let Some(v) = stack.pop() {
            out.push(v);
            stack.extend(self.nodes[v].children.iter().rev());
        }
        out
    }

    /// Root-to-node path length for every node.
    pub fn depths(&self) -> Vec<f64> {
        let mut depth = vec![0.0; self.nodes.len()];
        for v in self.preorder() {
            if let Some(p) = self.nodes[v].parent {
                depth[v] = depth[p] + self.nodes[v].length;
            }
        }
        depth
    }

    /// Root-to-leaf path lengths keyed by leaf label.
    pub fn leaf_depths(&self) -> BTreeMap<String, f64> {
        let depth = self.depths();
        self.leaves()
            .into_iter()
            .map(|v| (self.nodes[v].label.clone().unwrap(), depth[v]))
            .collect()
    }

    /// Maximum root-to-leaf path length.
    pub fn height(&self) -> f64 {
        self.leaf_depths().values().copied().fold(0.0, f64::max)
    }

    /// Multiplies every branch length by `factor > 0`.
    pub fn scaled(&self, factor: f64) -> Result<PhyloTree> {
        if !(factor.is_finite() && factor > 0.0) {
            return Err(Error::invalid(format!("scale factor must be positive, got {factor}")));
        }
        let mut out = self.clone();
        out.nodes.iter_mut().for_each(|n| n.length *= factor);
        Ok(out)
    }

    /// Mutable access to one branch length.
    pub fn set_length(&mut self, id: NodeId, length: f64) -> Result<()> {
        if !(length.is_finite() && length >= 0.0) {
            return Err(Error::invalid("branch length must be finite and non-negative"));
        }
        if id != self.root {
            self.nodes[id].length = length;
        }
        Ok(())
    }

    /// Leaf-label sets below every internal node except the root, each sorted.
    /// Two trees on the same leaves have the same rooted topology iff these
    /// sets agree.
    pub fn clusters(&self) -> BTreeSet<Vec<String>> {
        let mut below: Vec<Vec<String>> = vec![Vec::new(); self.nodes.len()];
        for v in self.preorder().into_iter().rev() {
            if let Some(l) = &self.nodes[v].label {
                below[v].push(l.clone());
            }
            for &c in &self.nodes[v].children {
                let child = std::mem::take(&mut below[c]);
                below[v].extend(child.iter().cloned());
                below[c] = child;
            }
        }
        self.preorder()
            .into_iter()
            .filter(|&v| v != self.root && !self.is_leaf(v))
            .map(|v| {
                let mut s = below[v].clone();
                s.sort();
                s
            })
            .collect()
    }

    pub fn same_topology(&self, other: &PhyloTree) -> bool {
        self.sorted_labels() == other.sorted_labels() && self.clusters() == other.clusters()
    }

    /// Internal nodes whose children are exactly two leaves.
    pub fn cherry_count(&self) -> usize {
        self.nodes
            .iter()
            .filter(|n| n.children.len() == 2 && n.children.iter().all(|&c| self.is_leaf(c)))
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cherry() -> PhyloTree {
        let mut b = TreeBuilder::new();
        let root = b.add_node(None, 0.0);
        let x = b.add_node(Some("x".into()), 1.0);
        let y = b.add_node(Some("y".into()), 2.0);
        b.attach(root, x);
        b.attach(root, y);
        b.build(root).unwrap()
    }

    #[test]
    fn basic_queries() {
        let t = cherry();
        assert_eq!(t.leaf_count(), 2);
        assert_eq!(t.height(), 2.0);
        assert_eq!(t.cherry_count(), 1);
        assert!(t.clusters().is_empty());
        assert_eq!(t.scaled(2.0).unwrap().height(), 4.0);
    }

    #[test]
    fn rejects_invalid() {
        let mut b = TreeBuilder::new();
        let root = b.add_node(None, 0.0);
        let x = b.add_node(Some("x".into()), 1.0);
        let y = b.add_node(Some("x".into()), 1.0);
        b.attach(root, x);
        b.attach(root, y);
        assert!(b.build(root).is_err());

        let mut b = TreeBuilder::new();
        let root = b.add_node(None, 0.0);
        let x = b.add_node(Some("x".into()), -1.0);
        let y = b.add_node(Some("y".into()), 1.0);
        b.attach(root, x);
        b.attach(root, y);
        assert!(b.build(root).is_err());

        let mut b = TreeBuilder::new();
        let root = b.add_node(None, 0.0);
        let x = b.add_node(Some("x".into()), 1.0);
        b.attach(root, x);
        assert!(b.build(root).is_err());
    }
}
