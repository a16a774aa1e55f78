//! Maximum cardinality matching in general graphs (blossom algorithm).
//!
//! Classic Edmonds blossom search over an index-based adjacency list:
//! repeatedly grow an alternating BFS forest from each exposed vertex,
//! shrinking odd cycles (blossoms) by re-basing their vertices, and augment
//! when an exposed vertex is reached. O(V³), which is far more than enough
//! for the auxiliary graphs this crate builds (a handful of dozen vertices).
//!
//! The flower module drives this on its Gallai auxiliary graph; it is kept
//! separate and fully index-based so it can be tested against brute force
//! in isolation.

use std::collections::VecDeque;

/// Maximum matching of the simple graph on vertices `0..n` with the given
/// adjacency lists. Returns the mate of each vertex (`None` = exposed).
/// Self-loop entries and duplicate list entries are tolerated and ignored.
/// Deterministic: vertices and neighbors are scanned in index order.
pub fn maximum_matching(n: usize, adj: &[Vec<usize>]) -> Vec<Option<usize>> {
    assert_eq!(adj.len(), n);
    let mut mate: Vec<Option<usize>> = vec![None; n];
    // Greedy warm start saves most augmentation rounds.
    for v in 0..n {
        if mate[v].is_none() {
            for &u in &adj[v] {
                if u != v && mate[u].is_none() {
                    mate[v] = Some(u);
                    mate[u] = Some(v);
                    break;
                }
            }
        }
    }
    let skip = vec![false; n];
    for root in 0..n {
        if mate[root].is_none() {
            augment_from(root, adj, &mut mate, &skip);
        }
    }
    mate
}

/// One augmentation attempt from the exposed vertex `root`, ignoring
/// vertices with `skip` set (as if they were deleted from the graph).
/// Callers use this to re-maximize a matching after masking vertices out;
/// `root` itself must not be skipped.
pub(crate) fn augment_exposed(
    root: usize,
    adj: &[Vec<usize>],
    mate: &mut [Option<usize>],
    skip: &[bool],
) -> bool {
    debug_assert!(mate[root].is_none() && !skip[root]);
    augment_from(root, adj, mate, skip)
}

/// Number of matched pairs.
pub fn matching_size(mate: &[Option<usize>]) -> usize {
    mate.iter().flatten().count() / 2
}

/// One phase of the blossom search: look for an augmenting path starting at
/// the exposed vertex `root` and flip it if found. Vertices with `skip` set
/// are treated as absent.
fn augment_from(root: usize, adj: &[Vec<usize>], mate: &mut [Option<usize>], skip: &[bool]) -> bool {
    let n = adj.len();
    let mut used = vec![false; n];
    // Predecessor links for odd-level vertices of the alternating forest.
    let mut parent: Vec<Option<usize>> = vec![None; n];
    // Blossom representative of each vertex.
    let mut base: Vec<usize> = (0..n).collect();

    used[root] = true;
    let mut queue = VecDeque::from([root]);
    let mut exposed: Option<usize> = None;

    'search: while let Some(v) = queue.pop_front() {
        for &to in &adj[v] {
            if skip[to] || base[v] == base[to] || mate[v] == Some(to) {
                continue;
            }
            let to_is_even_in_tree = to == root
                || mate[to].is_some_and(|m| parent[m].is_some());
            if to_is_even_in_tree {
                // Even-even edge: the two tree paths plus this edge close an
                // odd cycle. Shrink it onto the least common ancestor.
                let cur_base = blossom_base(v, to, &base, &parent, mate);
                let mut in_blossom = vec![false; n];
                mark_path(v, cur_base, to, &mut in_blossom, &base, &mut parent, mate);
                mark_path(to, cur_base, v, &mut in_blossom, &base, &mut parent, mate);
                for i in 0..n {
                    if in_blossom[base[i]] {
                        base[i] = cur_base;
                        if !used[i] {
                            used[i] = true;
                            queue.push_back(i);
                        }
                    }
                }
            } else if parent[to].is_none() {
                parent[to] = Some(v);
                match mate[to] {
                    None => {
                        exposed = Some(to);
                        break 'search;
                    }
                    Some(m) => {
                        if !used[m] {
                            used[m] = true;
                            queue.push_back(m);
                        }
                    }
                }
            }
        }
    }

    match exposed {
        None => false,
        Some(mut u) => {
            // Flip matched/unmatched status along the alternating path back
            // to the root.
            loop {
                let pv = parent[u].expect("odd vertex has a tree parent");
                let next = mate[pv];
                mate[u] = Some(pv);
                mate[pv] = Some(u);
                match next {
                    Some(x) => u = x,
                    None => break,
                }
            }
            true
        }
    }
}

/// Least common ancestor of `a` and `b` in the alternating forest, in terms
/// of blossom bases.
fn blossom_base(
    a: usize,
    b: usize,
    base: &[usize],
    parent: &[Option<usize>],
    mate: &[Option<usize>],
) -> usize {
    let n = base.len();
    let mut on_path = vec![false; n];
    let mut x = a;
    loop {
        x = base[x];
        on_path[x] = true;
        match mate[x] {
            Some(m) => match parent[m] {
                Some(p) => x = p,
                None => break,
            },
            None => break, // reached the root
        }
    }
    let mut y = b;
    loop {
        y = base[y];
        if on_path[y] {
            return y;
        }
        y = parent[mate[y].expect("non-root on tree path is matched")]
            .expect("tree path continues to the root");
    }
}

/// Walks from `v` up to the blossom base `b`, marking traversed bases and
/// re-pointing parent links into the blossom so later augmentations can
/// thread through it. `child` is the vertex on the other side of the edge
/// that closed the blossom.
fn mark_path(
    mut v: usize,
    b: usize,
    mut child: usize,
    in_blossom: &mut [bool],
    base: &[usize],
    parent: &mut [Option<usize>],
    mate: &[Option<usize>],
) {
    while base[v] != b {
        let m = mate[v].expect("blossom interior vertex is matched");
        in_blossom[base[v]] = true;
        in_blossom[base[m]] = true;
        parent[v] = Some(child);
        child = m;
        v = parent[m].expect("blossom interior continues toward the base");
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive maximum matching by recursion over the edge list.
    fn brute_max_matching(n: usize, edges: &[(usize, usize)]) -> usize {
        fn rec(edges: &[(usize, usize)], used: &mut Vec<bool>) -> usize {
            match edges.split_first() {
                None => 0,
                Some((&(u, v), rest)) => {
                    let skip = rec(rest, used);
                    if !used[u] && !used[v] {
                        used[u] = true;
                        used[v] = true;
                        let take = 1 + rec(rest, used);
                        used[u] = false;
                        used[v] = false;
                        skip.max(take)
                    } else {
                        skip
                    }
                }
            }
        }
        let _ = n;
        rec(edges, &mut vec![false; n])
    }

    fn adj_from_edges(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    fn check(n: usize, edges: &[(usize, usize)]) {
        let adj = adj_from_edges(n, edges);
        let mate = maximum_matching(n, &adj);
        // Validity: mutual mates joined by real edges.
        for v in 0..n {
            if let Some(u) = mate[v] {
                assert_eq!(mate[u], Some(v), "mates must be mutual");
                assert!(
                    edges.iter().any(|&(a, b)| (a, b) == (u, v) || (a, b) == (v, u)),
                    "matched pair ({u},{v}) is not an edge"
                );
            }
        }
        assert_eq!(
            matching_size(&mate),
            brute_max_matching(n, edges),
            "wrong matching size on n={n}, edges={edges:?}"
        );
    }

    #[test]
    fn paths_cycles_cliques() {
        check(4, &[(0, 1), (1, 2), (2, 3)]); // P4 -> 2
        check(3, &[(0, 1), (1, 2), (0, 2)]); // triangle -> 1
        check(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]); // C5 -> 2
        let k6: Vec<(usize, usize)> = (0..6)
            .flat_map(|u| ((u + 1)..6).map(move |v| (u, v)))
            .collect();
        check(6, &k6); // K6 -> 3
    }

    #[test]
    fn blossoms_force_odd_cycle_handling() {
        // Two triangles joined by a path: the textbook blossom case.
        check(
            8,
            &[
                (0, 1),
                (1, 2),
                (2, 0),
                (2, 3),
                (3, 4),
                (4, 5),
                (5, 6),
                (6, 7),
                (7, 5),
            ],
        );
        // Pentagon with a chord and a pendant.
        check(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (1, 3), (2, 5)]);
    }

    #[test]
    fn petersen_has_a_perfect_matching() {
        // Outer C5, inner pentagram, spokes.
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((5 + i, 5 + (i + 2) % 5));
            edges.push((i, 5 + i));
        }
        let adj = adj_from_edges(10, &edges);
        let mate = maximum_matching(10, &adj);
        assert_eq!(matching_size(&mate), 5);
    }

    #[test]
    fn exhaustive_on_all_graphs_up_to_six_vertices() {
        for n in 0..=6usize {
            let pairs: Vec<(usize, usize)> = (0..n)
                .flat_map(|u| ((u + 1)..n).map(move |v| (u, v)))
                .collect();
            let m = pairs.len();
            // All graphs for n <= 5; sampled masks for n = 6 to keep the
            // test quick.
            let masks: Vec<u32> = if n <= 5 {
                (0..(1u32 << m)).collect()
            } else {
                (0..(1u32 << m)).step_by(41).collect()
            };
            for mask in masks {
                let edges: Vec<(usize, usize)> = pairs
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &e)| e)
                    .collect();
                check(n, &edges);
            }
        }
    }

    #[test]
    fn deterministic_output() {
        let edges = [(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)];
        let adj = adj_from_edges(4, &edges);
        assert_eq!(maximum_matching(4, &adj), maximum_matching(4, &adj));
    }
}
