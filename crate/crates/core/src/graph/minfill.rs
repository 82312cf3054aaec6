use std::collections::BTreeSet;

use super::{Graph, TreeDecomposition};

fn fill_in(adj: &[BTreeSet<usize>], v: usize) -> usize {
    let ns: Vec<usize> = adj[v].iter().copied().collect();
    let mut missing = 0;
    for (i, &a) in ns.iter().enumerate() {
        for &b in &ns[i + 1..] {
            if !adj[a].contains(&b) {
                missing += 1;
            }
        }
    }
    missing
}

/// Tree decomposition from a greedy min-fill elimination ordering (ties
/// broken by degree, then vertex id). No optimality guarantee.
pub fn heuristic_decomposition(g: &Graph) -> TreeDecomposition {
    let n = g.n();
    let mut adj: Vec<BTreeSet<usize>> = (0..n).map(|v| g.neighbors(v).iter().copied().collect()).collect();
    let mut alive = vec![true; n];
    let mut position = vec![usize::MAX; n];
    let mut order = Vec::with_capacity(n);
    let mut bags = Vec::with_capacity(n);

    for step in 0..n {
        let v = (0..n)
            .filter(|&v| alive[v])
            .min_by_key(|&v| (fill_in(&adj, v), adj[v].len(), v))
            .expect("a live vertex remains");
        let ns: Vec<usize> = adj[v].iter().copied().collect();
        for (i, &a) in ns.iter().enumerate() {
            for &b in &ns[i + 1..] {
                adj[a].insert(b);
                adj[b].insert(a);
            }
        }
        for &a in &ns {
            adj[a].remove(&v);
        }
        let mut bag = ns;
        bag.push(v);
        bags.push(bag);
        alive[v] = false;
        position[v] = step;
        order.push(v);
    }

    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    let mut roots = Vec::new();
    for (step, bag) in bags.iter().enumerate() {
        let v = order[step];
        match bag.iter().filter(|&&u| u != v).map(|&u| position[u]).min() {
            Some(p) => edges.push((step, p)),
            None => roots.push(step),
        }
    }
    for w in roots.windows(2) {
        edges.push((w[0], w[1]));
    }
    TreeDecomposition::new(bags, &edges).expect("edges reference existing bags")
}
