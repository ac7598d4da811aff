//! Finite state spaces: weighted graphs with a reference measure.
//!
//! A [`StateSpace`] plays the role of a discretized Riemannian measure space.
//! Each vertex carries a positive measure weight `mu`, each edge a nonnegative
//! conductance `w` (the quadratic-form coefficient) and a positive geometric
//! length (used for geodesic distances). Grid builders for intervals and
//! circles produce second-order discretizations of the flat Laplacian.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use nalgebra::DVector;

use crate::error::{Error, Result};

/// A real-valued function on the vertices of a [`StateSpace`].
pub type Function = DVector<f64>;

/// Undirected weighted edge. `weight` is the conductance entering the energy
/// form, `length` the geometric length entering geodesic distances.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub weight: f64,
    pub length: f64,
}

impl Edge {
    pub fn new(i: usize, j: usize, weight: f64, length: f64) -> Self {
        Self { i, j, weight, length }
    }
}

/// Finite measure space with weighted edges.
///
/// Immutable after construction; safe to share across threads.
#[derive(Debug, Clone)]
pub struct StateSpace {
    mu: DVector<f64>,
    edges: Vec<Edge>,
    coords: Option<Vec<Vec<f64>>>,
    /// Per-vertex list of `(neighbor, edge index)` over edges with `w > 0`.
    adjacency: Vec<Vec<(usize, usize)>>,
    connected: bool,
}

impl StateSpace {
    /// Validates the invariants and builds the adjacency structure.
    ///
    /// Rejects nonpositive measures, negative conductances, nonpositive
    /// lengths, self-loops, duplicate edges and out-of-range indices.
    pub fn new(
        mu: Vec<f64>,
        edges: Vec<Edge>,
        coords: Option<Vec<Vec<f64>>>,
    ) -> Result<Self> {
        let n = mu.len();
        if n == 0 {
            return Err(Error::TooFewVertices { n: 0, min: 1 });
        }
        for (index, &value) in mu.iter().enumerate() {
            if !(value > 0.0) || !value.is_finite() {
                return Err(Error::NonPositiveMeasure { index, value });
            }
        }
        if let Some(c) = &coords {
            if c.len() != n {
                return Err(Error::DimensionMismatch { expected: n, got: c.len() });
            }
        }
        let mut seen = HashSet::new();
        for e in &edges {
            if e.i >= n {
                return Err(Error::VertexOutOfRange { index: e.i, n });
            }
            if e.j >= n {
                return Err(Error::VertexOutOfRange { index: e.j, n });
            }
            if e.i == e.j {
                return Err(Error::SelfLoop(e.i));
            }
            if !(e.weight >= 0.0) || !e.weight.is_finite() {
                return Err(Error::NegativeConductance { i: e.i, j: e.j, value: e.weight });
            }
            if !(e.length > 0.0) || !e.length.is_finite() {
                return Err(Error::NonPositiveLength { i: e.i, j: e.j, value: e.length });
            }
            let key = (e.i.min(e.j), e.i.max(e.j));
            if !seen.insert(key) {
                return Err(Error::DuplicateEdge { i: key.0, j: key.1 });
            }
        }
        let mut adjacency = vec![Vec::new(); n];
        for (idx, e) in edges.iter().enumerate() {
            if e.weight > 0.0 {
                adjacency[e.i].push((e.j, idx));
                adjacency[e.j].push((e.i, idx));
            }
        }
        let connected = reachable_count(&adjacency, 0) == n;
        Ok(Self { mu: DVector::from_vec(mu), edges, coords, adjacency, connected })
    }

    pub fn n(&self) -> usize {
        self.mu.len()
    }

    pub fn mu(&self) -> &DVector<f64> {
        &self.mu
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        self.coords.as_deref()
    }

    /// First coordinate of vertex `i`, for spaces built with 1-d labels.
    pub fn coord1(&self, i: usize) -> Option<f64> {
        self.coords.as_ref().and_then(|c| c.get(i)).and_then(|v| v.first().copied())
    }

    /// Result of a traversal over edges with positive conductance.
    pub fn is_connected(&self) -> bool {
        self.connected
    }

    /// Neighbors of `i` as `(vertex, edge index)`, conductance-positive only.
    pub fn neighbors(&self, i: usize) -> &[(usize, usize)] {
        &self.adjacency[i]
    }

    pub fn total_measure(&self) -> f64 {
        self.mu.iter().sum()
    }

    pub fn check_vertex(&self, i: usize) -> Result<()> {
        if i < self.n() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange { index: i, n: self.n() })
        }
    }

    pub fn check_function(&self, f: &Function) -> Result<()> {
        if f.len() == self.n() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch { expected: self.n(), got: f.len() })
        }
    }

    /// mu-weighted inner product (f, g)_mu.
    pub fn inner_mu(&self, f: &Function, g: &Function) -> Result<f64> {
        self.check_function(f)?;
        self.check_function(g)?;
        Ok((0..self.n()).map(|i| self.mu[i] * f[i] * g[i]).sum())
    }

    /// mu-weighted norm.
    pub fn norm_mu(&self, f: &Function) -> Result<f64> {
        Ok(self.inner_mu(f, f)?.sqrt())
    }

    /// Shortest-path distances from `p` along edge lengths, restricted to
    /// conductance-positive edges. Unreachable vertices get `f64::INFINITY`.
    pub fn geodesics_from(&self, p: usize) -> Result<Vec<f64>> {
        self.check_vertex(p)?;
        let n = self.n();
        let mut dist = vec![f64::INFINITY; n];
        dist[p] = 0.0;
        let mut heap = BinaryHeap::new();
        heap.push(HeapEntry { dist: 0.0, vertex: p });
        while let Some(HeapEntry { dist: d, vertex: u }) = heap.pop() {
            if d > dist[u] {
                continue;
            }
            for &(v, eidx) in &self.adjacency[u] {
                let nd = d + self.edges[eidx].length;
                if nd < dist[v] {
                    dist[v] = nd;
                    heap.push(HeapEntry { dist: nd, vertex: v });
                }
            }
        }
        Ok(dist)
    }

    /// Geodesic distance between `p` and `q`; errors if they are not
    /// connected by conductance-positive edges.
    pub fn geodesic_distance(&self, p: usize, q: usize) -> Result<f64> {
        self.check_vertex(q)?;
        let dist = self.geodesics_from(p)?;
        let d = dist[q];
        if d.is_finite() {
            Ok(d)
        } else {
            Err(Error::DisconnectedPair { p, q })
        }
    }

    /// Writes the space in the definition file format (see [`read_space`]).
    pub fn write<W: Write>(&self, w: &mut W, psi: Option<&DVector<f64>>) -> Result<()> {
        let dim = self.coords.as_ref().map_or(0, |c| c.first().map_or(0, Vec::len));
        writeln!(w, "n {} dim {} psi {}", self.n(), dim, u8::from(psi.is_some()))?;
        for i in 0..self.n() {
            write!(w, "{} {:e}", i, self.mu[i])?;
            if let Some(c) = &self.coords {
                for x in &c[i] {
                    write!(w, " {x:e}")?;
                }
            }
            if let Some(p) = psi {
                write!(w, " {:e}", p[i])?;
            }
            writeln!(w)?;
        }
        for e in &self.edges {
            writeln!(w, "{} {} {:e} {:e}", e.i, e.j, e.weight, e.length)?;
        }
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        self.write(&mut file, None)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let (space, _) = read_space(file)?;
        Ok(space)
    }
}

#[derive(PartialEq)]
struct HeapEntry {
    dist: f64,
    vertex: usize,
}

impl Eq for HeapEntry {}

impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // Min-heap on distance; lengths are finite positive so total_cmp is a
        // plain numeric order here.
        other.dist.total_cmp(&self.dist).then_with(|| other.vertex.cmp(&self.vertex))
    }
}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn reachable_count(adjacency: &[Vec<(usize, usize)>], start: usize) -> usize {
    let mut visited = vec![false; adjacency.len()];
    let mut stack = vec![start];
    visited[start] = true;
    let mut count = 0;
    while let Some(u) = stack.pop() {
        count += 1;
        for &(v, _) in &adjacency[u] {
            if !visited[v] {
                visited[v] = true;
                stack.push(v);
            }
        }
    }
    count
}

fn check_grid_bounds(a: f64, b: f64) -> Result<()> {
    if !a.is_finite() || !b.is_finite() || !(a < b) {
        return Err(Error::InvalidBounds { a, b });
    }
    Ok(())
}

/// Uniform grid on `[a, b]` with `n` vertices.
///
/// Vertex `i` sits at `x_i = a + i h` with `h = (b - a)/(n - 1)`; the measure
/// is trapezoidal (`h` inside, `h/2` at the endpoints) and nearest neighbors
/// are joined by conductance `1/h` over length `h`. The induced generator is
/// the standard second-order Neumann discretization of `-d²/dx²`: the energy
/// sum imposes no boundary constraint, so the boundary behaves reflectingly.
pub fn build_line_grid(a: f64, b: f64, n: usize) -> Result<StateSpace> {
    check_grid_bounds(a, b)?;
    if n < 2 {
        return Err(Error::TooFewVertices { n, min: 2 });
    }
    let h = (b - a) / (n - 1) as f64;
    let mut mu = vec![h; n];
    mu[0] = 0.5 * h;
    mu[n - 1] = 0.5 * h;
    let coords = (0..n).map(|i| vec![a + i as f64 * h]).collect();
    let edges = (0..n - 1).map(|i| Edge::new(i, i + 1, 1.0 / h, h)).collect();
    StateSpace::new(mu, edges, Some(coords))
}

/// Periodic nearest-neighbor grid with `n` vertices on a circle of the given
/// circumference. Every vertex carries measure `h = circumference / n`; the
/// stored coordinate is arclength from vertex 0.
pub fn build_circle_grid(circumference: f64, n: usize) -> Result<StateSpace> {
    if !circumference.is_finite() || !(circumference > 0.0) {
        return Err(Error::InvalidBounds { a: 0.0, b: circumference });
    }
    if n < 3 {
        return Err(Error::TooFewVertices { n, min: 3 });
    }
    let h = circumference / n as f64;
    let mu = vec![h; n];
    let coords = (0..n).map(|i| vec![i as f64 * h]).collect();
    let edges = (0..n).map(|i| Edge::new(i, (i + 1) % n, 1.0 / h, h)).collect();
    StateSpace::new(mu, edges, Some(coords))
}

/// Reads a state-space definition file.
///
/// Format: a header `n <count> dim <d> psi <0|1>`, then `<count>` vertex lines
/// `index mu [coords...] [psi]`, then edge lines `i j w len`. Blank lines and
/// `#` comments are skipped. Returns the optional psi column alongside the
/// space.
pub fn read_space<R: Read>(reader: R) -> Result<(StateSpace, Option<DVector<f64>>)> {
    let buf = BufReader::new(reader);
    let mut lines = Vec::new();
    for (lineno, line) in buf.lines().enumerate() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        lines.push((lineno + 1, trimmed.to_string()));
    }
    let parse_err = |line: usize, message: &str| Error::Parse { line, message: message.into() };
    let Some((hline, header)) = lines.first() else {
        return Err(parse_err(1, "empty file"));
    };
    let tokens: Vec<&str> = header.split_whitespace().collect();
    if tokens.len() != 6 || tokens[0] != "n" || tokens[2] != "dim" || tokens[4] != "psi" {
        return Err(parse_err(*hline, "expected header `n <count> dim <d> psi <0|1>`"));
    }
    let n: usize = tokens[1]
        .parse()
        .map_err(|_| parse_err(*hline, "vertex count is not an integer"))?;
    let dim: usize = tokens[3]
        .parse()
        .map_err(|_| parse_err(*hline, "coordinate dimension is not an integer"))?;
    let has_psi = match tokens[5] {
        "0" => false,
        "1" => true,
        _ => return Err(parse_err(*hline, "psi flag must be 0 or 1")),
    };
    if lines.len() < 1 + n {
        return Err(parse_err(*hline, "fewer vertex lines than the declared count"));
    }

    let mut mu = vec![0.0; n];
    let mut coords = vec![Vec::new(); n];
    let mut psi = vec![0.0; n];
    let expected_fields = 2 + dim + usize::from(has_psi);
    for (lineno, line) in &lines[1..=n] {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != expected_fields {
            return Err(parse_err(
                *lineno,
                &format!("expected {expected_fields} fields on vertex line, got {}", fields.len()),
            ));
        }
        let index: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(*lineno, "vertex index is not an integer"))?;
        if index >= n {
            return Err(parse_err(*lineno, "vertex index out of range"));
        }
        let m: f64 = fields[1]
            .parse()
            .map_err(|_| parse_err(*lineno, "vertex measure is not a number"))?;
        if !(m > 0.0) {
            return Err(parse_err(*lineno, "vertex measure must be positive"));
        }
        mu[index] = m;
        for field in &fields[2..2 + dim] {
            let x: f64 = field
                .parse()
                .map_err(|_| parse_err(*lineno, "vertex coordinate is not a number"))?;
            coords[index].push(x);
        }
        if has_psi {
            psi[index] = fields[expected_fields - 1]
                .parse()
                .map_err(|_| parse_err(*lineno, "psi value is not a number"))?;
        }
    }

    let mut edges = Vec::new();
    for (lineno, line) in &lines[1 + n..] {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(parse_err(*lineno, "expected edge line `i j w len`"));
        }
        let i: usize = fields[0]
            .parse()
            .map_err(|_| parse_err(*lineno, "edge endpoint is not an integer"))?;
        let j: usize = fields[1]
            .parse()
            .map_err(|_| parse_err(*lineno, "edge endpoint is not an integer"))?;
        let w: f64 = fields[2]
            .parse()
            .map_err(|_| parse_err(*lineno, "edge conductance is not a number"))?;
        let len: f64 = fields[3]
            .parse()
            .map_err(|_| parse_err(*lineno, "edge length is not a number"))?;
        if w < 0.0 {
            return Err(parse_err(*lineno, "edge conductance must be nonnegative"));
        }
        if !(len > 0.0) {
            return Err(parse_err(*lineno, "edge length must be positive"));
        }
        edges.push(Edge::new(i, j, w, len));
    }

    let coords = if dim > 0 { Some(coords) } else { None };
    let space = StateSpace::new(mu, edges, coords)?;
    let psi = has_psi.then(|| DVector::from_vec(psi));
    Ok((space, psi))
}
