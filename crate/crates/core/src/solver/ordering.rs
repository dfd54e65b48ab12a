use std::collections::VecDeque;

use crate::assembly::CsrMatrix;

/// Reverse Cuthill–McKee ordering of the matrix graph. Returns `perm` with
/// `perm[new] = old`. Each connected component starts from a
/// pseudo-peripheral node; ties are broken by degree, then index.
pub fn reverse_cuthill_mckee(a: &CsrMatrix) -> Vec<usize> {
    let n = a.nrows();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| a.row(i).map(|(j, _)| j).filter(|&j| j != i).collect())
        .collect();
    let degree: Vec<usize> = adj.iter().map(Vec::len).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for seed in 0..n {
        if visited[seed] {
            continue;
        }
        let start = pseudo_peripheral(&adj, &degree, seed);
        let mut queue = VecDeque::from([start]);
        visited[start] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut next: Vec<usize> = adj[v].iter().copied().filter(|&w| !visited[w]).collect();
            next.sort_by_key(|&w| (degree[w], w));
            for w in next {
                visited[w] = true;
                queue.push_back(w);
            }
        }
    }
    order.reverse();
    order
}

/// Repeats BFS from the farthest low-degree node until the eccentricity
/// stops growing.
fn pseudo_peripheral(adj: &[Vec<usize>], degree: &[usize], seed: usize) -> usize {
    let mut root = seed;
    let mut ecc = 0;
    loop {
        let levels = bfs_levels(adj, root);
        let max_level = levels.iter().filter_map(|l| *l).max().unwrap_or(0);
        if max_level <= ecc && root != seed {
            return root;
        }
        ecc = max_level;
        let candidate = (0..adj.len())
            .filter(|&v| levels[v] == Some(max_level))
            .min_by_key(|&v| (degree[v], v))
            .unwrap_or(root);
        if candidate == root {
            return root;
        }
        root = candidate;
    }
}

fn bfs_levels(adj: &[Vec<usize>], root: usize) -> Vec<Option<usize>> {
    let mut level = vec![None; adj.len()];
    level[root] = Some(0);
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        let l = level[v].unwrap();
        for &w in &adj[v] {
            if level[w].is_none() {
                level[w] = Some(l + 1);
                queue.push_back(w);
            }
        }
    }
    level
}

/// Symmetric permutation `B[i][j] = A[perm[i]][perm[j]]`.
pub fn permute_symmetric(a: &CsrMatrix, perm: &[usize]) -> CsrMatrix {
    let mut inv = vec![0; perm.len()];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    let mut t = Vec::with_capacity(a.nnz());
    for i in 0..a.nrows() {
        t.extend(a.row(i).map(|(j, v)| (inv[i], inv[j], v)));
    }
    CsrMatrix::from_triplets(a.nrows(), a.ncols(), t)
}
