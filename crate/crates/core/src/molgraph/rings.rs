//! Ring bonds, minimum cycle basis and relevant cycles.
//!
//! Candidate cycles are built Horton-style from every ring atom and ring bond
//! using all shortest paths (capped), then filtered by Gaussian elimination
//! over GF(2) on bond incidence vectors.

use std::collections::{HashMap, HashSet, VecDeque};

pub(crate) struct RingSet {
    /// Minimum cycle basis.
    pub basis: Vec<Vec<usize>>,
    /// Cycles that are not sums of strictly shorter cycles. Independent of
    /// atom numbering, unlike the basis when several choices tie.
    pub relevant: Vec<Vec<usize>>,
}

const PATH_CAP: usize = 8;

/// Marks bonds that lie on at least one cycle (non-bridges).
pub(crate) fn ring_bonds(n: usize, adj: &[Vec<(usize, usize)>], nbonds: usize) -> Vec<bool> {
    let mut is_bridge = vec![false; nbonds];
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0usize; n];
    let mut timer = 0;
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        // (vertex, parent bond, next neighbor position)
        let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
        disc[root] = timer;
        low[root] = timer;
        timer += 1;
        while let Some(top) = stack.last_mut() {
            let (v, pb) = (top.0, top.1);
            if top.2 < adj[v].len() {
                let (w, b) = adj[v][top.2];
                top.2 += 1;
                if b == pb {
                    continue;
                }
                if disc[w] == usize::MAX {
                    disc[w] = timer;
                    low[w] = timer;
                    timer += 1;
                    stack.push((w, b, 0));
                } else {
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[v]);
                    if low[v] > disc[p] {
                        is_bridge[pb] = true;
                    }
                }
            }
        }
    }
    is_bridge.into_iter().map(|b| !b).collect()
}

struct Eliminator {
    rows: Vec<(usize, Vec<u64>)>,
}

impl Eliminator {
    fn new() -> Self {
        Eliminator { rows: Vec::new() }
    }

    fn reduce(&self, v: &mut [u64], upto: usize) {
        for (pivot, row) in &self.rows[..upto] {
            if v[pivot / 64] >> (pivot % 64) & 1 == 1 {
                for (x, y) in v.iter_mut().zip(row) {
                    *x ^= *y;
                }
            }
        }
    }

    fn insert(&mut self, mut v: Vec<u64>) -> bool {
        let upto = self.rows.len();
        self.reduce(&mut v, upto);
        match first_bit(&v) {
            Some(p) => {
                self.rows.push((p, v));
                true
            }
            None => false,
        }
    }
}

fn first_bit(v: &[u64]) -> Option<usize> {
    v.iter()
        .enumerate()
        .find(|(_, w)| **w != 0)
        .map(|(i, w)| i * 64 + w.trailing_zeros() as usize)
}

pub(crate) fn perceive(
    n: usize,
    adj: &[Vec<(usize, usize)>],
    ends: &[(usize, usize)],
    ring_bond: &[bool],
) -> RingSet {
    let mut basis = Vec::new();
    let mut relevant = Vec::new();
    let mut system_of = vec![usize::MAX; n];
    let mut systems: Vec<Vec<usize>> = Vec::new();
    for start in 0..n {
        if system_of[start] != usize::MAX || !adj[start].iter().any(|&(_, b)| ring_bond[b]) {
            continue;
        }
        let id = systems.len();
        let mut members = vec![start];
        system_of[start] = id;
        let mut k = 0;
        while k < members.len() {
            let v = members[k];
            k += 1;
            for &(w, b) in &adj[v] {
                if ring_bond[b] && system_of[w] == usize::MAX {
                    system_of[w] = id;
                    members.push(w);
                }
            }
        }
        members.sort_unstable();
        systems.push(members);
    }
    for members in &systems {
        let (b, r) = system_cycles(members, adj, ends, ring_bond);
        basis.extend(b);
        relevant.extend(r);
    }
    basis.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    relevant.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    RingSet { basis, relevant }
}

fn system_cycles(
    members: &[usize],
    adj: &[Vec<(usize, usize)>],
    ends: &[(usize, usize)],
    ring_bond: &[bool],
) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
    let mut edge_id: HashMap<usize, usize> = HashMap::new();
    let mut local_edges = Vec::new();
    for &v in members {
        for &(_, b) in &adj[v] {
            if ring_bond[b] && !edge_id.contains_key(&b) {
                edge_id.insert(b, local_edges.len());
                local_edges.push(b);
            }
        }
    }
    let m = local_edges.len();
    let rank = m + 1 - members.len();
    let words = m.div_ceil(64);
    let bond_of = |a: usize, b: usize| -> usize {
        adj[a]
            .iter()
            .find(|&&(w, bb)| w == b && ring_bond[bb])
            .map(|&(_, bb)| edge_id[&bb])
            .expect("consecutive cycle atoms are bonded")
    };

    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut candidates: Vec<(Vec<usize>, Vec<u64>)> = Vec::new();
    for &x in members {
        let (dist, preds) = bfs(x, adj, ring_bond);
        let mut memo: HashMap<usize, Vec<Vec<usize>>> = HashMap::new();
        for &b in &local_edges {
            let (mut u, mut v) = ends[b];
            if dist[u] == usize::MAX || dist[v] == usize::MAX {
                continue;
            }
            if dist[u] > dist[v] {
                std::mem::swap(&mut u, &mut v);
            }
            if dist[v] - dist[u] > 1 || dist[u] + dist[v] + 1 < 3 {
                continue;
            }
            let pu = paths(u, x, &preds, &mut memo);
            let pv = paths(v, x, &preds, &mut memo);
            for a in &pu {
                for c in &pv {
                    let inner: HashSet<usize> = a[1..].iter().copied().collect();
                    if c[1..].iter().any(|z| inner.contains(z)) {
                        continue;
                    }
                    let mut cycle = a.clone();
                    cycle.extend(c[1..].iter().rev());
                    let mut bits = vec![0u64; words];
                    for k in 0..cycle.len() {
                        let e = bond_of(cycle[k], cycle[(k + 1) % cycle.len()]);
                        bits[e / 64] |= 1 << (e % 64);
                    }
                    if seen.insert(bits.clone()) {
                        candidates.push((normalize(cycle), bits));
                    }
                }
            }
        }
    }
    candidates.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));

    let mut elim = Eliminator::new();
    let mut basis = Vec::new();
    let mut relevant = Vec::new();
    let mut i = 0;
    while i < candidates.len() && basis.len() < rank {
        let len = candidates[i].0.len();
        let shorter = elim.rows.len();
        let mut j = i;
        while j < candidates.len() && candidates[j].0.len() == len {
            j += 1;
        }
        for (cycle, bits) in &candidates[i..j] {
            let mut v = bits.clone();
            elim.reduce(&mut v, shorter);
            if first_bit(&v).is_some() {
                relevant.push(cycle.clone());
            }
        }
        for (cycle, bits) in &candidates[i..j] {
            if basis.len() < rank && elim.insert(bits.clone()) {
                basis.push(cycle.clone());
            }
        }
        i = j;
    }
    (basis, relevant)
}

fn bfs(x: usize, adj: &[Vec<(usize, usize)>], ring_bond: &[bool]) -> (Vec<usize>, Vec<Vec<usize>>) {
    let n = adj.len();
    let mut dist = vec![usize::MAX; n];
    let mut preds = vec![Vec::new(); n];
    dist[x] = 0;
    let mut q = VecDeque::from([x]);
    while let Some(v) = q.pop_front() {
        for &(w, b) in &adj[v] {
            if !ring_bond[b] {
                continue;
            }
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                preds[w].push(v);
                q.push_back(w);
            } else if dist[w] == dist[v] + 1 {
                preds[w].push(v);
            }
        }
    }
    (dist, preds)
}

fn paths(
    v: usize,
    x: usize,
    preds: &[Vec<usize>],
    memo: &mut HashMap<usize, Vec<Vec<usize>>>,
) -> Vec<Vec<usize>> {
    if let Some(p) = memo.get(&v) {
        return p.clone();
    }
    let out = if v == x {
        vec![vec![x]]
    } else {
        let mut out = Vec::new();
        'outer: for &p in &preds[v] {
            for mut path in paths(p, x, preds, memo) {
                path.push(v);
                out.push(path);
                if out.len() >= PATH_CAP {
                    break 'outer;
                }
            }
        }
        out
    };
    memo.insert(v, out.clone());
    out
}

/// Rotates a cycle to start at its smallest atom, walking towards the smaller
/// of that atom's two cycle neighbors.
fn normalize(cycle: Vec<usize>) -> Vec<usize> {
    let len = cycle.len();
    let start = (0..len).min_by_key(|&k| cycle[k]).unwrap_or(0);
    let next = cycle[(start + 1) % len];
    let prev = cycle[(start + len - 1) % len];
    if next <= prev {
        (0..len).map(|k| cycle[(start + k) % len]).collect()
    } else {
        (0..len).map(|k| cycle[(start + len - k) % len]).collect()
    }
}
