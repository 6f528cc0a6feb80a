use std::collections::{BTreeMap, HashMap};

use crate::error::{Error, Result};
use crate::pattern::{Command, Pattern};
use crate::QuditId;

/// Graphs with at most this many unit edges are colored exactly.
pub const EXACT_EDGE_LIMIT: usize = 12;

/// Search budget (assignments tried) for the heuristic backtracking pass.
const SEARCH_BUDGET: usize = 50_000;

/// The entanglement multigraph of a pattern: one edge per `E` command,
/// multiplicities reduced mod `d` since `CZ^d = I`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntanglementGraph {
    pub nodes: Vec<QuditId>,
    pub edges: BTreeMap<(QuditId, QuditId), u32>,
}

impl EntanglementGraph {
    pub fn from_pattern(p: &Pattern) -> Self {
        let mut edges: BTreeMap<(QuditId, QuditId), u32> = BTreeMap::new();
        for c in p.commands() {
            if let Command::E(i, j) = c {
                let key = (*i.min(j), *i.max(j));
                let m = edges.entry(key).or_insert(0);
                *m = (*m + 1) % p.dim().d();
            }
        }
        edges.retain(|_, m| *m != 0);
        EntanglementGraph {
            nodes: p.qudits().to_vec(),
            edges,
        }
    }

    pub fn from_edges(nodes: Vec<QuditId>, list: &[(QuditId, QuditId)]) -> Self {
        let mut edges = BTreeMap::new();
        for &(i, j) in list {
            *edges.entry((i.min(j), i.max(j))).or_insert(0) += 1;
        }
        EntanglementGraph { nodes, edges }
    }

    /// Each edge repeated by its multiplicity.
    pub fn unit_edges(&self) -> Vec<(QuditId, QuditId)> {
        self.edges
            .iter()
            .flat_map(|(&e, &m)| std::iter::repeat_n(e, m as usize))
            .collect()
    }

    pub fn degree(&self, q: QuditId) -> usize {
        self.edges
            .iter()
            .filter(|((a, b), _)| *a == q || *b == q)
            .map(|(_, &m)| m as usize)
            .sum()
    }

    /// `Delta(G)`, counting multiplicities.
    pub fn max_degree(&self) -> usize {
        let mut deg: HashMap<QuditId, usize> = HashMap::new();
        for (&(a, b), &m) in &self.edges {
            *deg.entry(a).or_insert(0) += m as usize;
            *deg.entry(b).or_insert(0) += m as usize;
        }
        deg.values().copied().max().unwrap_or(0)
    }

    pub fn is_simple(&self) -> bool {
        self.edges.values().all(|&m| m <= 1)
    }
}

/// A proper edge coloring: `colors[k]` is the color of `edges[k]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeColoring {
    pub edges: Vec<(QuditId, QuditId)>,
    pub colors: Vec<usize>,
    pub num_colors: usize,
    pub lower_bound: usize,
    /// True when `num_colors` is known to be optimal.
    pub exact: bool,
}

impl EdgeColoring {
    /// Edges grouped by color, in color order.
    pub fn layers(&self) -> Vec<Vec<(QuditId, QuditId)>> {
        let mut out = vec![Vec::new(); self.num_colors];
        for (e, &c) in self.edges.iter().zip(&self.colors) {
            out[c].push(*e);
        }
        out
    }

    pub fn is_proper(&self) -> bool {
        let mut seen: HashMap<(QuditId, usize), usize> = HashMap::new();
        for (k, (&(a, b), &c)) in self.edges.iter().zip(&self.colors).enumerate() {
            if c >= self.num_colors {
                return false;
            }
            for v in [a, b] {
                if seen.insert((v, c), k).is_some() {
                    return false;
                }
            }
        }
        true
    }
}

struct Search<'a> {
    edges: &'a [(QuditId, QuditId)],
    adj: Vec<Vec<usize>>,
    colors: Vec<Option<usize>>,
    k: usize,
    steps: usize,
    budget: usize,
}

impl Search<'_> {
    fn available(&self, e: usize) -> Vec<usize> {
        let mut used = vec![false; self.k];
        for &f in &self.adj[e] {
            if let Some(c) = self.colors[f] {
                used[c] = true;
            }
        }
        (0..self.k).filter(|&c| !used[c]).collect()
    }

    /// Most constrained uncolored edge, ties broken by uncolored neighbours.
    fn pick(&self) -> Option<(usize, Vec<usize>)> {
        let mut best: Option<(usize, usize, usize, Vec<usize>)> = None;
        for e in 0..self.edges.len() {
            if self.colors[e].is_some() {
                continue;
            }
            let avail = self.available(e);
            let open = self.adj[e]
                .iter()
                .filter(|&&f| self.colors[f].is_none())
                .count();
            let key = (avail.len(), usize::MAX - open, e);
            if best.as_ref().is_none_or(|b| (b.0, b.1, b.2) > key) {
                best = Some((key.0, key.1, key.2, avail));
            }
        }
        best.map(|(_, _, e, avail)| (e, avail))
    }

    fn solve(&mut self) -> Option<bool> {
        let Some((e, avail)) = self.pick() else {
            return Some(true);
        };
        // Colors not used anywhere yet are interchangeable: try only one.
        let max_used = self.colors.iter().flatten().copied().max();
        let mut tried_fresh = false;
        for c in avail {
            let fresh = max_used.is_none_or(|m| c > m);
            if fresh {
                if tried_fresh {
                    continue;
                }
                tried_fresh = true;
            }
            self.steps += 1;
            if self.steps > self.budget {
                return None;
            }
            self.colors[e] = Some(c);
            match self.solve() {
                Some(true) => return Some(true),
                None => return None,
                Some(false) => {}
            }
            self.colors[e] = None;
        }
        Some(false)
    }
}

fn adjacency(edges: &[(QuditId, QuditId)]) -> Vec<Vec<usize>> {
    let mut by_node: HashMap<QuditId, Vec<usize>> = HashMap::new();
    for (k, &(a, b)) in edges.iter().enumerate() {
        by_node.entry(a).or_default().push(k);
        by_node.entry(b).or_default().push(k);
    }
    edges
        .iter()
        .enumerate()
        .map(|(k, &(a, b))| {
            let mut v: Vec<usize> = by_node[&a]
                .iter()
                .chain(&by_node[&b])
                .copied()
                .filter(|&f| f != k)
                .collect();
            v.sort_unstable();
            v.dedup();
            v
        })
        .collect()
}

/// Tries to color with `k` colors. `Some(None)` means proven impossible,
/// `None` means the budget ran out.
fn try_colors(edges: &[(QuditId, QuditId)], k: usize, budget: usize) -> Option<Option<Vec<usize>>> {
    let mut s = Search {
        edges,
        adj: adjacency(edges),
        colors: vec![None; edges.len()],
        k,
        steps: 0,
        budget,
    };
    match s.solve() {
        Some(true) => Some(Some(s.colors.into_iter().map(|c| c.unwrap()).collect())),
        Some(false) => Some(None),
        None => None,
    }
}

fn greedy(edges: &[(QuditId, QuditId)]) -> Vec<usize> {
    let mut used: HashMap<QuditId, Vec<usize>> = HashMap::new();
    let mut out = Vec::with_capacity(edges.len());
    for &(a, b) in edges {
        let mut c = 0;
        loop {
            let busy = |v: QuditId| used.get(&v).is_some_and(|l| l.contains(&c));
            if !busy(a) && !busy(b) {
                break;
            }
            c += 1;
        }
        used.entry(a).or_default().push(c);
        used.entry(b).or_default().push(c);
        out.push(c);
    }
    out
}

/// Misra-Gries edge coloring of a simple graph with at most `Delta + 1`
/// colors.
fn misra_gries(edges: &[(QuditId, QuditId)], delta: usize) -> Vec<usize> {
    let ncol = delta + 1;
    let key = |a: QuditId, b: QuditId| (a.min(b), a.max(b));
    let mut color: HashMap<(QuditId, QuditId), usize> = HashMap::new();
    let mut at: HashMap<(QuditId, usize), QuditId> = HashMap::new();
    let mut nbrs: HashMap<QuditId, Vec<QuditId>> = HashMap::new();
    for &(a, b) in edges {
        nbrs.entry(a).or_default().push(b);
        nbrs.entry(b).or_default().push(a);
    }

    fn set(
        color: &mut HashMap<(QuditId, QuditId), usize>,
        at: &mut HashMap<(QuditId, usize), QuditId>,
        a: QuditId,
        b: QuditId,
        c: Option<usize>,
    ) {
        let k = (a.min(b), a.max(b));
        if let Some(old) = color.remove(&k) {
            at.remove(&(a, old));
            at.remove(&(b, old));
        }
        if let Some(c) = c {
            color.insert(k, c);
            at.insert((a, c), b);
            at.insert((b, c), a);
        }
    }

    for &(u, v) in edges {
        let free = |at: &HashMap<(QuditId, usize), QuditId>, x: QuditId, c: usize| {
            !at.contains_key(&(x, c))
        };
        // Maximal fan of u starting at v.
        let mut fan = vec![v];
        loop {
            let last = *fan.last().unwrap();
            let next = nbrs[&u].iter().copied().find(|&w| {
                !fan.contains(&w) && color.get(&key(u, w)).is_some_and(|&c| free(&at, last, c))
            });
            match next {
                Some(w) => fan.push(w),
                None => break,
            }
        }
        let c = (0..ncol).find(|&c| free(&at, u, c)).unwrap();
        let d = (0..ncol)
            .find(|&d| free(&at, *fan.last().unwrap(), d))
            .unwrap();
        if c != d {
            // Invert the cd-path starting at u (it starts with color d).
            let mut path = Vec::new();
            let mut x = u;
            let mut want = d;
            while let Some(&y) = at.get(&(x, want)) {
                path.push((x, y, want));
                x = y;
                want = if want == d { c } else { d };
            }
            for &(a, b, _) in &path {
                set(&mut color, &mut at, a, b, None);
            }
            for &(a, b, col) in &path {
                set(
                    &mut color,
                    &mut at,
                    a,
                    b,
                    Some(if col == d { c } else { d }),
                );
            }
        }
        // Longest prefix that is still a fan and ends where d is free.
        let mut w_index = 0;
        for i in 0..fan.len() {
            if i > 0 {
                let ci = color.get(&key(u, fan[i])).copied();
                if !ci.is_some_and(|ci| free(&at, fan[i - 1], ci)) {
                    break;
                }
            }
            if free(&at, fan[i], d) {
                w_index = i;
                break;
            }
        }
        // Rotate the fan prefix and color (u, w) with d.
        let shifted: Vec<Option<usize>> = (0..w_index)
            .map(|i| color.get(&key(u, fan[i + 1])).copied())
            .collect();
        for i in 0..=w_index {
            set(&mut color, &mut at, u, fan[i], None);
        }
        for (i, c) in shifted.into_iter().enumerate() {
            set(&mut color, &mut at, u, fan[i], c);
        }
        set(&mut color, &mut at, u, fan[w_index], Some(d));
    }
    edges.iter().map(|&(a, b)| color[&key(a, b)]).collect()
}

fn compact(colors: &mut [usize]) -> usize {
    let mut map: BTreeMap<usize, usize> = BTreeMap::new();
    for &c in colors.iter() {
        let n = map.len();
        map.entry(c).or_insert(n);
    }
    for c in colors.iter_mut() {
        *c = map[c];
    }
    map.len()
}

/// Edge-colors the graph (each unit edge separately): exact search up to
/// [`EXACT_EDGE_LIMIT`] edges, otherwise a budgeted search at `Delta` and
/// `Delta + 1` colors with Misra-Gries (simple graphs) or greedy fallback.
pub fn color_edges(g: &EntanglementGraph) -> EdgeColoring {
    let edges = g.unit_edges();
    let delta = g.max_degree();
    if edges.is_empty() {
        return EdgeColoring {
            edges,
            colors: vec![],
            num_colors: 0,
            lower_bound: 0,
            exact: true,
        };
    }
    let finish = |mut colors: Vec<usize>, exact: bool| {
        let num_colors = compact(&mut colors);
        let out = EdgeColoring {
            edges: edges.clone(),
            colors,
            num_colors,
            lower_bound: delta,
            exact,
        };
        assert!(out.is_proper(), "edge coloring must be proper");
        assert!(out.num_colors >= delta);
        out
    };
    if edges.len() <= EXACT_EDGE_LIMIT {
        for k in delta.. {
            if let Some(Some(c)) = try_colors(&edges, k, usize::MAX) {
                return finish(c, true);
            }
        }
    }
    for k in [delta, delta + 1] {
        if let Some(Some(c)) = try_colors(&edges, k, SEARCH_BUDGET) {
            return finish(c, k == delta);
        }
    }
    if g.is_simple() {
        finish(misra_gries(&edges, delta), false)
    } else {
        finish(greedy(&edges), false)
    }
}

/// `(achieved colors, Delta(G))`.
pub fn entanglement_depth(g: &EntanglementGraph) -> (usize, usize) {
    let c = color_edges(g);
    (c.num_colors, c.lower_bound)
}

/// Reorders the leading entangling block of a standard pattern into color
/// layers so that its depth equals the number of colors. Edge
/// multiplicities are reduced mod `d`.
pub fn schedule_entanglement(p: &Pattern) -> Result<Pattern> {
    if !p.is_standard() {
        return Err(Error::NotStandard("standard"));
    }
    let g = EntanglementGraph::from_pattern(p);
    let coloring = color_edges(&g);
    let mut commands: Vec<Command> = coloring
        .layers()
        .into_iter()
        .flatten()
        .map(|(a, b)| Command::E(a, b))
        .collect();
    commands.extend(p.commands().iter().filter(|c| !c.is_entangling()).cloned());
    p.with_commands(commands)
}
