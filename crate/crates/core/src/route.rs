//! Coupling graphs, greedy SWAP routing, and two-qubit-gate/depth statistics.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::circuit::{CircuitBuilder, CliffordCircuit, Gate, GateQubits};
use crate::encode::ExperimentCircuit;
use crate::error::{Error, Result};
use crate::pauli::PauliString;

const UNREACHABLE: usize = usize::MAX;

/// Undirected device connectivity on nodes `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingGraph {
    n: usize,
    adj: Vec<Vec<usize>>,
    dist: Vec<Vec<usize>>,
}

impl CouplingGraph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n || u == v {
                return Err(Error::InvalidParameter(format!("bad edge ({u}, {v}) for {n} nodes")));
            }
            if !adj[u].contains(&v) {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
        adj.iter_mut().for_each(|a| a.sort_unstable());
        let dist = (0..n).map(|s| bfs(&adj, s)).collect();
        Ok(Self { n, adj, dist })
    }

    /// Every pair connected.
    pub fn complete(n: usize) -> Self {
        let edges: Vec<(usize, usize)> =
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Self::new(n, &edges).expect("valid edges")
    }

    /// A path `0 - 1 - … - n-1`.
    pub fn line(n: usize) -> Self {
        let edges: Vec<(usize, usize)> = (1..n).map(|v| (v - 1, v)).collect();
        Self::new(n, &edges).expect("valid edges")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn neighbours(&self, u: usize) -> &[usize] {
        &self.adj[u]
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        (0..self.n)
            .flat_map(|u| self.adj[u].iter().filter(move |&&v| v > u).map(move |&v| (u, v)))
            .collect()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Hop distance, `None` if disconnected.
    pub fn distance(&self, u: usize, v: usize) -> Option<usize> {
        let d = self.dist[u][v];
        (d != UNREACHABLE).then_some(d)
    }

    pub fn is_connected(&self) -> bool {
        self.n == 0 || self.dist[0].iter().all(|&d| d != UNREACHABLE)
    }

    /// Longest simple path found by exhaustive DFS, giving up after `budget`
    /// expansions and returning the best found so far.
    pub fn longest_path(&self, budget: u64) -> Vec<usize> {
        let mut best = Vec::new();
        let mut visited = vec![false; self.n];
        let mut path = Vec::new();
        let mut spent = 0u64;
        for s in 0..self.n {
            self.extend_path(s, &mut visited, &mut path, &mut best, &mut spent, budget);
            if best.len() == self.n || spent >= budget {
                break;
            }
        }
        best
    }

    fn extend_path(
        &self,
        u: usize,
        visited: &mut [bool],
        path: &mut Vec<usize>,
        best: &mut Vec<usize>,
        spent: &mut u64,
        budget: u64,
    ) {
        *spent += 1;
        visited[u] = true;
        path.push(u);
        if path.len() > best.len() {
            *best = path.clone();
        }
        for &v in &self.adj[u] {
            if !visited[v] && *spent < budget && best.len() < self.n {
                self.extend_path(v, visited, path, best, spent, budget);
            }
        }
        path.pop();
        visited[u] = false;
    }

    pub fn to_edge_list(&self) -> String {
        self.to_string()
    }
}

fn bfs(adj: &[Vec<usize>], s: usize) -> Vec<usize> {
    let mut d = vec![UNREACHABLE; adj.len()];
    d[s] = 0;
    let mut q = VecDeque::from([s]);
    while let Some(u) = q.pop_front() {
        for &v in &adj[u] {
            if d[v] == UNREACHABLE {
                d[v] = d[u] + 1;
                q.push_back(v);
            }
        }
    }
    d
}

/// Edge list, one `u v` pair per line. The node count is one more than the
/// largest index unless a `# nodes N` comment says otherwise.
impl fmt::Display for CouplingGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "# nodes {}", self.n)?;
        for (u, v) in self.edges() {
            writeln!(f, "{u} {v}")?;
        }
        Ok(())
    }
}

impl FromStr for CouplingGraph {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut edges = Vec::new();
        let mut declared = None;
        for (i, raw) in s.lines().enumerate() {
            let line = raw.trim();
            if let Some(rest) = line.strip_prefix("# nodes") {
                let n = rest
                    .trim()
                    .parse::<usize>()
                    .map_err(|e| Error::parse(i + 1, format!("bad node count: {e}")))?;
                declared = Some(n);
                continue;
            }
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let nums: Vec<usize> = line
                .split_whitespace()
                .map(str::parse)
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::parse(i + 1, format!("bad node index: {e}")))?;
            match nums[..] {
                [u, v] => edges.push((u, v)),
                _ => return Err(Error::parse(i + 1, "expected `u v`")),
            }
        }
        let implied = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
        CouplingGraph::new(declared.unwrap_or(implied).max(implied), &edges)
    }
}

/// Node positions of a heavy-hex tiling in doubled coordinates `(2y, 2x)`,
/// in node-index order, plus its edges.
fn heavy_hex_layout(rows: usize, cols: usize) -> Result<(Vec<(usize, usize)>, Vec<(usize, usize)>)> {
    if rows == 0 || cols == 0 {
        return Err(Error::InvalidParameter("heavy-hex needs rows, cols >= 1".into()));
    }
    // hexagon (r, c) spans x in [2c + s, 2c + s + 2] on honeycomb lines
    // y = r and y = r + 1, with s = r mod 2
    let mut hex_edges = std::collections::BTreeSet::new();
    for r in 0..rows {
        let s = r % 2;
        for c in 0..cols {
            let x0 = 2 * c + s;
            for y in [r, r + 1] {
                for x in x0..x0 + 2 {
                    hex_edges.insert(((2 * y, 2 * x), (2 * y, 2 * x + 2)));
                }
            }
            for x in [x0, x0 + 2] {
                hex_edges.insert(((2 * r, 2 * x), (2 * r + 2, 2 * x)));
            }
        }
    }
    let mut points = std::collections::BTreeSet::new();
    let mut pairs = Vec::new();
    for &(a, b) in &hex_edges {
        let mid = ((a.0 + b.0) / 2, (a.1 + b.1) / 2);
        points.extend([a, b, mid]);
        pairs.push((a, mid));
        pairs.push((mid, b));
    }
    let index: BTreeMap<(usize, usize), usize> =
        points.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let edges = pairs.iter().map(|(a, b)| (index[a], index[b])).collect();
    Ok((points.into_iter().collect(), edges))
}

/// Heavy-hex lattice: a `rows × cols` brick-wall honeycomb with an extra
/// node on every edge. Nodes are numbered row-major by position.
pub fn heavy_hex_graph(rows: usize, cols: usize) -> Result<CouplingGraph> {
    let (points, edges) = heavy_hex_layout(rows, cols)?;
    CouplingGraph::new(points.len(), &edges)
}

/// Nodes along honeycomb line `y` (`0..=rows`) of [`heavy_hex_graph`], left
/// to right. Consecutive entries are adjacent.
pub fn heavy_hex_line(rows: usize, cols: usize, y: usize) -> Result<Vec<usize>> {
    if y > rows {
        return Err(Error::InvalidParameter(format!("line {y} outside 0..={rows}")));
    }
    let (points, _) = heavy_hex_layout(rows, cols)?;
    Ok(points
        .iter()
        .enumerate()
        .filter(|(_, p)| p.0 == 2 * y)
        .map(|(i, _)| i)
        .collect())
}

/// Layout for `blocks` code blocks of `block_len` qubits on the smallest
/// heavy-hex tiling whose lines fit a block: block `b` occupies the first
/// `block_len` nodes of line `b`. Returns the graph dimensions and layout.
pub fn heavy_hex_line_layout(
    block_len: usize,
    blocks: usize,
) -> Result<((usize, usize), Vec<usize>)> {
    let rows = blocks.max(1);
    let mut cols = 1;
    loop {
        let lines: Vec<Vec<usize>> = (0..blocks)
            .map(|y| heavy_hex_line(rows, cols, y))
            .collect::<Result<_>>()?;
        if lines.iter().all(|l| l.len() >= block_len) {
            let layout = lines.iter().flat_map(|l| l[..block_len].to_vec()).collect();
            return Ok(((rows, cols), layout));
        }
        cols += 1;
    }
}

/// A circuit rewritten onto a coupling graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutedCircuit {
    /// Acts on all graph nodes.
    pub circuit: CliffordCircuit,
    /// Logical qubit `i` starts on node `initial_layout[i]`.
    pub initial_layout: Vec<usize>,
    /// Logical qubit `i` ends on node `final_layout[i]`.
    pub final_layout: Vec<usize>,
    pub swap_count: usize,
}

/// Greedy router: before each two-qubit gate whose qubits are not adjacent,
/// the first qubit steps along a shortest path toward the second (ties to the
/// lowest node index) until they touch. Gates are rescheduled as early as
/// possible; terminal measurements are mapped through the final layout and keep
/// their order, so measured bits stay in logical order.
pub fn route_circuit(
    c: &CliffordCircuit,
    g: &CouplingGraph,
    layout: &[usize],
) -> Result<RoutedCircuit> {
    let n = c.n_qubits();
    if n > g.n() {
        return Err(Error::InvalidParameter(format!(
            "{n} qubits do not fit on {} nodes",
            g.n()
        )));
    }
    if layout.len() != n {
        return Err(Error::Dimension {
            expected: n,
            found: layout.len(),
        });
    }
    let mut occupant: Vec<Option<usize>> = vec![None; g.n()];
    for (l, &p) in layout.iter().enumerate() {
        if p >= g.n() || occupant[p].is_some() {
            return Err(Error::InvalidParameter(format!(
                "layout is not injective into the graph at node {p}"
            )));
        }
        occupant[p] = Some(l);
    }
    let mut l2p = layout.to_vec();
    let mut out = CircuitBuilder::new(g.n());
    let mut measurements = Vec::new();
    let mut swap_count = 0;
    for m in c.moments() {
        for gate in m.gates() {
            match gate.qubits() {
                GateQubits::One(q) => {
                    if gate.is_measurement() {
                        measurements.push(q);
                    } else {
                        out.add(gate.map_qubits(|_| l2p[q]))?;
                    }
                }
                GateQubits::Two(a, b) => {
                    loop {
                        let (pa, pb) = (l2p[a], l2p[b]);
                        let d = g.distance(pa, pb).ok_or_else(|| {
                            Error::RoutingInfeasible(format!("nodes {pa} and {pb} are disconnected"))
                        })?;
                        if d <= 1 {
                            break;
                        }
                        let next = *g
                            .neighbours(pa)
                            .iter()
                            .find(|&&v| g.distance(v, pb) == Some(d - 1))
                            .expect("shortest path exists");
                        out.add(Gate::Swap(pa, next))?;
                        swap_count += 1;
                        let moved = occupant[next];
                        occupant.swap(pa, next);
                        l2p[a] = next;
                        if let Some(o) = moved {
                            l2p[o] = pa;
                        }
                    }
                    let (pa, pb) = (l2p[a], l2p[b]);
                    out.add(gate.map_qubits(|q| if q == a { pa } else { pb }))?;
                }
            }
        }
    }
    let mut circuit = out.finish();
    if !measurements.is_empty() {
        circuit.push_moment(measurements.iter().map(|&q| Gate::M(l2p[q])).collect())?;
    }
    Ok(RoutedCircuit {
        circuit,
        initial_layout: layout.to_vec(),
        final_layout: l2p,
        swap_count,
    })
}

impl RoutedCircuit {
    /// Whether every two-qubit gate sits on a graph edge.
    pub fn respects(&self, g: &CouplingGraph) -> bool {
        self.circuit.gates().all(|gate| match gate.qubits() {
            GateQubits::Two(a, b) => g.has_edge(a, b),
            GateQubits::One(_) => true,
        })
    }

    /// Exact semantic check against the unrouted circuit: every single-qubit
    /// `X` and `Z`, pushed through both circuits, lands on the same operator
    /// once logical qubits are read off through the layouts.
    pub fn is_equivalent_to(&self, original: &CliffordCircuit) -> Result<bool> {
        let n = original.n_qubits();
        let total = self.circuit.n_qubits();
        let orig = original.without_measurements();
        let routed = self.circuit.without_measurements();
        for q in 0..n {
            for letter in [crate::pauli::Pauli::X, crate::pauli::Pauli::Z] {
                let p = PauliString::single(n, q, letter);
                let want = crate::circuit::conjugate_by_circuit(&p, &orig)?;
                let got = crate::circuit::conjugate_by_circuit(
                    &p.embed(total, &self.initial_layout)?,
                    &routed,
                )?;
                if got != want.embed(total, &self.final_layout)? {
                    return Ok(false);
                }
            }
        }
        Ok(self.circuit.measured_qubits()
            == original
                .measured_qubits()
                .iter()
                .map(|&q| self.final_layout[q])
                .collect::<Vec<_>>())
    }
}

/// An experiment rewritten onto a device, restricted to the nodes it touches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoutedExperiment {
    /// Qubit `i` of the routed circuit is graph node `nodes[i]`. Measured bits
    /// keep the unrouted record order, so blocks and codes are unchanged.
    pub experiment: ExperimentCircuit,
    pub nodes: Vec<usize>,
    pub swap_count: usize,
}

/// Routes the encoder and the logical part of an experiment separately, so the
/// first post-encoding moment is still well defined, then drops idle nodes.
pub fn route_experiment(
    e: &ExperimentCircuit,
    g: &CouplingGraph,
    layout: &[usize],
) -> Result<RoutedExperiment> {
    let (encoder, rest) = e.circuit.split_at(e.noise_start);
    let first = route_circuit(&encoder, g, layout)?;
    let second = route_circuit(&rest, g, &first.final_layout)?;
    let mut full = first.circuit.clone();
    full.append(&second.circuit)?;

    let mut used = vec![false; g.n()];
    for &p in layout {
        used[p] = true;
    }
    for gate in full.gates() {
        for q in gate.qubits().as_slice() {
            used[q] = true;
        }
    }
    let nodes: Vec<usize> = (0..g.n()).filter(|&v| used[v]).collect();
    let mut index = vec![0; g.n()];
    for (i, &v) in nodes.iter().enumerate() {
        index[v] = i;
    }
    let mut experiment = e.clone();
    experiment.circuit = full.embed(nodes.len(), &index)?;
    experiment.noise_start = first.circuit.depth();
    Ok(RoutedExperiment {
        experiment,
        nodes,
        swap_count: first.swap_count + second.swap_count,
    })
}

/// How SWAPs are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum StatsMode {
    /// Every two-qubit gate, SWAP included, counts once.
    NativeCz,
    /// SWAP counts as three CX gates in three consecutive moments.
    #[default]
    NativeCx,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitStats {
    pub two_qubit_count: usize,
    pub depth: usize,
    pub swap_count: usize,
}

pub fn circuit_stats(c: &CliffordCircuit, mode: StatsMode) -> CircuitStats {
    let mut two_qubit_count = 0;
    let mut depth = 0;
    let mut swap_count = 0;
    for m in c.moments() {
        let swaps = m.gates().iter().filter(|g| matches!(g, Gate::Swap(..))).count();
        let others = m.gates().iter().filter(|g| g.is_two_qubit()).count() - swaps;
        swap_count += swaps;
        match mode {
            StatsMode::NativeCz => {
                two_qubit_count += swaps + others;
                depth += 1;
            }
            StatsMode::NativeCx => {
                two_qubit_count += 3 * swaps + others;
                depth += if swaps > 0 { 3 } else { 1 };
            }
        }
    }
    CircuitStats {
        two_qubit_count,
        depth,
        swap_count,
    }
}

/// Gate counts by name.
pub fn gate_histogram(c: &CliffordCircuit) -> BTreeMap<&'static str, usize> {
    let mut h = BTreeMap::new();
    for g in c.gates() {
        *h.entry(g.name()).or_insert(0) += 1;
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_heavy_hex_cell() {
        let g = heavy_hex_graph(1, 1).unwrap();
        assert_eq!(g.n(), 12);
        assert_eq!(g.edges().len(), 12);
        assert!(g.max_degree() <= 2);
        assert_eq!(g.longest_path(1_000_000).len(), 12);
    }

    #[test]
    fn larger_tilings_have_degree_three() {
        for (r, c) in [(1, 2), (2, 2), (3, 3)] {
            let g = heavy_hex_graph(r, c).unwrap();
            assert_eq!(g.max_degree(), 3);
            assert!(g.is_connected());
        }
        assert!(heavy_hex_graph(0, 2).is_err());
    }

    #[test]
    fn lines_are_paths() {
        let g = heavy_hex_graph(2, 2).unwrap();
        for y in 0..=2 {
            let line = heavy_hex_line(2, 2, y).unwrap();
            assert!(line.windows(2).all(|w| g.has_edge(w[0], w[1])));
        }
        let ((r, c), layout) = heavy_hex_line_layout(7, 2).unwrap();
        assert_eq!((r, c), (2, 2));
        assert_eq!(layout.len(), 14);
    }

    #[test]
    fn edge_list_round_trip() {
        let g = heavy_hex_graph(2, 2).unwrap();
        let back: CouplingGraph = g.to_edge_list().parse().unwrap();
        assert_eq!(back, g);
        let h: CouplingGraph = "0 1\n1 2 # tail\n".parse().unwrap();
        assert_eq!(h.n(), 3);
    }

    #[test]
    fn compliant_circuit_is_untouched() {
        let c: CliffordCircuit = "QUBITS 3\nCX q0 q1\nCX q1 q2\nM q0 q1 q2\n".parse().unwrap();
        let g = CouplingGraph::line(3);
        let r = route_circuit(&c, &g, &[0, 1, 2]).unwrap();
        assert_eq!(r.swap_count, 0);
        assert_eq!(r.final_layout, vec![0, 1, 2]);
        assert_eq!(r.circuit, c);
    }

    #[test]
    fn distance_two_needs_one_swap() {
        let c: CliffordCircuit = "QUBITS 3\nCX q0 q2\n".parse().unwrap();
        let g = CouplingGraph::line(3);
        let r = route_circuit(&c, &g, &[0, 1, 2]).unwrap();
        assert_eq!(r.swap_count, 1);
        assert!(r.respects(&g));
        assert!(r.is_equivalent_to(&c).unwrap());
        assert_eq!(r.final_layout, vec![1, 0, 2]);
    }

    #[test]
    fn disconnected_layout_fails() {
        let c: CliffordCircuit = "QUBITS 2\nCZ q0 q1\n".parse().unwrap();
        let g = CouplingGraph::new(4, &[(0, 1), (2, 3)]).unwrap();
        assert!(matches!(
            route_circuit(&c, &g, &[0, 3]),
            Err(Error::RoutingInfeasible(_))
        ));
    }

    #[test]
    fn stats_modes() {
        let c: CliffordCircuit = "QUBITS 3\nH q0\nSWAP q0 q1\nCX q1 q2\n".parse().unwrap();
        let cz = circuit_stats(&c, StatsMode::NativeCz);
        let cx = circuit_stats(&c, StatsMode::NativeCx);
        assert_eq!((cz.two_qubit_count, cz.depth, cz.swap_count), (2, 3, 1));
        assert_eq!((cx.two_qubit_count, cx.depth), (4, 5));
        assert_eq!(circuit_stats(&CliffordCircuit::new(2), StatsMode::NativeCx).depth, 0);
        let json = serde_json::to_value(cx).unwrap();
        let keys: Vec<&String> = json.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["depth", "swap_count", "two_qubit_count"]);
    }

    #[test]
    fn routed_experiments_keep_their_meaning() {
        use crate::codes::StabilizerCode;
        use crate::encode::{build_experiment_circuit, ExperimentKind, LogicalBasis};
        for code in [
            StabilizerCode::repetition(7).unwrap(),
            StabilizerCode::triangular_color(3).unwrap(),
        ] {
            for basis in [LogicalBasis::Z, LogicalBasis::X] {
                if basis == LogicalBasis::X && !code.is_self_dual_css() {
                    continue;
                }
                let e = build_experiment_circuit(ExperimentKind::Bell, &code, 2, basis).unwrap();
                let ((rows, cols), layout) = heavy_hex_line_layout(code.n, 2).unwrap();
                let g = heavy_hex_graph(rows, cols).unwrap();
                let r = route_experiment(&e, &g, &layout).unwrap();
                let re = &r.experiment;
                assert_eq!(re.n_qubits(), r.nodes.len());
                assert_eq!(re.circuit.measured_qubits().len(), e.circuit.measured_qubits().len());
                assert_eq!(re.ideal_value().unwrap(), 1.0);
                let (enc, _) = re.circuit.split_at(re.noise_start);
                let swaps = enc.gates().filter(|g| matches!(g, Gate::Swap(..))).count();
                let (orig, _) = e.circuit.split_at(e.noise_start);
                assert_eq!(enc.gates().count(), orig.gates().count() + swaps);
                for gate in re.circuit.gates() {
                    if let GateQubits::Two(a, b) = gate.qubits() {
                        assert!(g.has_edge(r.nodes[a], r.nodes[b]));
                    }
                }
            }
        }
    }
}
