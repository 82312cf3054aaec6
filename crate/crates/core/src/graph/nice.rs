use super::{Graph, TreeDecomposition};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Leaf,
    Introduce(usize),
    Forget(usize),
    Join,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceNode {
    pub kind: NodeKind,
    /// Sorted bag contents.
    pub bag: Vec<usize>,
    pub children: Vec<usize>,
}

/// A rooted nice tree decomposition. Nodes are stored in post-order, so
/// every child precedes its parent and the root is the last node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceTreeDecomposition {
    nodes: Vec<NiceNode>,
}

impl NiceTreeDecomposition {
    /// Wraps a node list that is already in post-order with the root last.
    pub fn from_nodes(nodes: Vec<NiceNode>) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::Decomposition("nice decomposition without nodes".into()));
        }
        for (i, node) in nodes.iter().enumerate() {
            if node.children.iter().any(|&c| c >= i) {
                return Err(Error::Decomposition(format!(
                    "node {i} has a child that does not precede it"
                )));
            }
        }
        Ok(NiceTreeDecomposition { nodes })
    }

    pub fn nodes(&self) -> &[NiceNode] {
        &self.nodes
    }

    pub fn node(&self, t: usize) -> &NiceNode {
        &self.nodes[t]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn width(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| n.bag.len())
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }

    /// `V_t` for every node: the vertices appearing in the subtree at `t`.
    pub fn subtree_vertices(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::with_capacity(self.nodes.len());
        for node in &self.nodes {
            let mut vs = node.bag.clone();
            for &c in &node.children {
                vs.extend_from_slice(&out[c]);
            }
            vs.sort_unstable();
            vs.dedup();
            out.push(vs);
        }
        out
    }

    /// Forgets the node kinds and returns the underlying decomposition.
    pub fn to_tree_decomposition(&self) -> TreeDecomposition {
        let bags = self.nodes.iter().map(|n| n.bag.clone()).collect();
        let edges: Vec<_> = self
            .nodes
            .iter()
            .enumerate()
            .flat_map(|(t, n)| n.children.iter().map(move |&c| (c, t)))
            .collect();
        TreeDecomposition::new(bags, &edges).expect("node indices are in range")
    }

    /// Checks node-kind invariants, empty root and leaf bags, and the
    /// decomposition axioms against `g`.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        let mut parents = vec![0usize; self.nodes.len()];
        for (t, node) in self.nodes.iter().enumerate() {
            let bad = |msg: &str| Err(Error::Decomposition(format!("node {t}: {msg}")));
            for &c in &node.children {
                parents[c] += 1;
            }
            if node.bag.windows(2).any(|w| w[0] >= w[1]) {
                return bad("bag is not sorted and duplicate-free");
            }
            let child_bag = |i: usize| &self.nodes[node.children[i]].bag;
            match node.kind {
                NodeKind::Leaf => {
                    if !node.children.is_empty() || !node.bag.is_empty() {
                        return bad("leaf must be childless with an empty bag");
                    }
                }
                NodeKind::Introduce(v) => {
                    if node.children.len() != 1 {
                        return bad("introduce node needs exactly one child");
                    }
                    let mut expect = child_bag(0).clone();
                    if expect.contains(&v) {
                        return bad("introduced vertex already in the child bag");
                    }
                    expect.push(v);
                    expect.sort_unstable();
                    if expect != node.bag {
                        return bad("introduce bag must be the child bag plus the vertex");
                    }
                }
                NodeKind::Forget(v) => {
                    if node.children.len() != 1 {
                        return bad("forget node needs exactly one child");
                    }
                    let mut expect = child_bag(0).clone();
                    let Some(pos) = expect.iter().position(|&u| u == v) else {
                        return bad("forgotten vertex missing from the child bag");
                    };
                    expect.remove(pos);
                    if expect != node.bag {
                        return bad("forget bag must be the child bag minus the vertex");
                    }
                }
                NodeKind::Join => {
                    if node.children.len() != 2 {
                        return bad("join node needs exactly two children");
                    }
                    if child_bag(0) != &node.bag || child_bag(1) != &node.bag {
                        return bad("join children must share the parent's bag");
                    }
                }
            }
        }
        let root = self.root();
        if !self.nodes[root].bag.is_empty() {
            return Err(Error::Decomposition("root bag must be empty".into()));
        }
        for (t, &p) in parents.iter().enumerate() {
            let want = usize::from(t != root);
            if p != want {
                return Err(Error::Decomposition(format!(
                    "node {t} has {p} parents; expected {want}"
                )));
            }
        }
        self.to_tree_decomposition().validate(g)
    }
}

struct Builder {
    nodes: Vec<NiceNode>,
}

impl Builder {
    fn push(&mut self, kind: NodeKind, bag: Vec<usize>, children: Vec<usize>) -> usize {
        self.nodes.push(NiceNode { kind, bag, children });
        self.nodes.len() - 1
    }

    /// Walks from the node `top` (with its bag) to a node whose bag is
    /// `target`: forgets first, then introduces, both in ascending order.
    fn transition(&mut self, mut top: usize, target: &[usize]) -> usize {
        let current = self.nodes[top].bag.clone();
        let mut bag = current.clone();
        for &v in current.iter().filter(|v| target.binary_search(v).is_err()) {
            bag.retain(|&u| u != v);
            top = self.push(NodeKind::Forget(v), bag.clone(), vec![top]);
        }
        for &v in target.iter().filter(|v| current.binary_search(v).is_err()) {
            let pos = bag.binary_search(&v).unwrap_err();
            bag.insert(pos, v);
            top = self.push(NodeKind::Introduce(v), bag.clone(), vec![top]);
        }
        top
    }
}

/// Converts a (validated) tree decomposition into a nice one of the same
/// width, rooted at the first bag.
pub fn make_nice(td: &TreeDecomposition) -> NiceTreeDecomposition {
    let mut b = Builder { nodes: Vec::new() };
    if td.node_count() == 0 {
        b.push(NodeKind::Leaf, Vec::new(), Vec::new());
        return NiceTreeDecomposition { nodes: b.nodes };
    }

    // Root the decomposition tree at bag 0 and order children by bag.
    let count = td.node_count();
    let mut parent = vec![usize::MAX; count];
    let mut order = Vec::with_capacity(count);
    let mut stack = vec![0usize];
    parent[0] = 0;
    while let Some(a) = stack.pop() {
        order.push(a);
        for &c in td.tree_neighbors(a) {
            if parent[c] == usize::MAX {
                parent[c] = a;
                stack.push(c);
            }
        }
    }
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); count];
    for &a in &order[1..] {
        children[parent[a]].push(a);
    }
    for cs in &mut children {
        cs.sort_by(|&x, &y| td.bag(x).cmp(td.bag(y)).then(x.cmp(&y)));
    }

    let mut top = vec![usize::MAX; count];
    for &a in order.iter().rev() {
        let bag = td.bag(a).to_vec();
        let branches: Vec<usize> = if children[a].is_empty() {
            let leaf = b.push(NodeKind::Leaf, Vec::new(), Vec::new());
            vec![b.transition(leaf, &bag)]
        } else {
            children[a]
                .iter()
                .map(|&c| b.transition(top[c], &bag))
                .collect()
        };
        let mut acc = branches[0];
        for &other in &branches[1..] {
            acc = b.push(NodeKind::Join, bag.clone(), vec![acc, other]);
        }
        top[a] = acc;
    }
    b.transition(top[0], &[]);
    NiceTreeDecomposition { nodes: b.nodes }
}
