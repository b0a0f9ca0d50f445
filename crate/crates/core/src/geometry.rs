//! The triangle tiling M, polyforms cut from it, and their lattice domains.
//!
//! Internally every planar point is stored in doubled coordinates, so the
//! square centers `(Z + 1/2)^2` become odd integer pairs and no fractions are
//! ever needed. Lattice vertices of a [`Domain`] use ordinary coordinates.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::algebra::IntMatrix;
use crate::error::{Error, Result};

/// A point in doubled coordinates.
pub type DPoint = (i64, i64);
/// A lattice vertex in ordinary coordinates.
pub type Vertex = (i64, i64);

pub const NEIGHBOR_OFFSETS: [(i64, i64); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    N,
    E,
    S,
    W,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::N, Side::E, Side::S, Side::W];

    pub fn parse(s: &str) -> Option<Side> {
        match s {
            "N" => Some(Side::N),
            "E" => Some(Side::E),
            "S" => Some(Side::S),
            "W" => Some(Side::W),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::N => "N",
            Side::E => "E",
            Side::S => "S",
            Side::W => "W",
        }
    }
}

/// Triangle of the unit square `[x, x+1] x [y, y+1]` whose base is `side`
/// and whose apex is the square's center.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TriangleId {
    pub x: i64,
    pub y: i64,
    pub side: Side,
}

impl TriangleId {
    pub fn new(x: i64, y: i64, side: Side) -> Self {
        TriangleId { x, y, side }
    }

    /// Corners in counterclockwise order, apex last (doubled coordinates).
    pub fn corners(&self) -> [DPoint; 3] {
        let (x, y) = (2 * self.x, 2 * self.y);
        let a = (x, y);
        let b = (x + 2, y);
        let c = (x + 2, y + 2);
        let d = (x, y + 2);
        let o = (x + 1, y + 1);
        match self.side {
            Side::S => [a, b, o],
            Side::E => [b, c, o],
            Side::N => [c, d, o],
            Side::W => [d, a, o],
        }
    }

    /// Directed sides in counterclockwise order.
    pub fn sides(&self) -> [(DPoint, DPoint); 3] {
        let [p, q, o] = self.corners();
        [(p, q), (q, o), (o, p)]
    }

    /// Rebuild from base endpoints and apex in doubled coordinates.
    pub fn from_points(base_a: DPoint, base_b: DPoint, apex: DPoint) -> Option<TriangleId> {
        if apex.0.rem_euclid(2) != 1 || apex.1.rem_euclid(2) != 1 {
            return None;
        }
        let x = (apex.0 - 1).div_euclid(2);
        let y = (apex.1 - 1).div_euclid(2);
        let mid2 = (base_a.0 + base_b.0 - 2 * apex.0, base_a.1 + base_b.1 - 2 * apex.1);
        let side = match mid2 {
            (0, -2) => Side::S,
            (2, 0) => Side::E,
            (0, 2) => Side::N,
            (-2, 0) => Side::W,
            _ => return None,
        };
        Some(TriangleId { x, y, side })
    }
}

/// One of the 8 symmetries of the square (about the origin) followed by an
/// integer translation. These are exactly the automorphisms of M.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LatticeIsometry {
    /// Counterclockwise quarter turns, applied after the reflection.
    pub rot: u8,
    /// Reflection `(x, y) -> (x, -y)`, applied first.
    pub reflect: bool,
    pub dx: i64,
    pub dy: i64,
}

impl Default for LatticeIsometry {
    fn default() -> Self {
        Self::identity()
    }
}

impl LatticeIsometry {
    pub fn identity() -> Self {
        LatticeIsometry { rot: 0, reflect: false, dx: 0, dy: 0 }
    }

    pub fn new(rot: u8, reflect: bool, dx: i64, dy: i64) -> Self {
        LatticeIsometry { rot: rot % 4, reflect, dx, dy }
    }

    pub fn translation(dx: i64, dy: i64) -> Self {
        Self::new(0, false, dx, dy)
    }

    /// All 8 point-group elements with zero translation.
    pub fn point_group() -> impl Iterator<Item = LatticeIsometry> {
        [false, true].into_iter().flat_map(|r| (0..4).map(move |k| LatticeIsometry::new(k, r, 0, 0)))
    }

    pub fn sign(&self) -> i8 {
        if self.reflect {
            -1
        } else {
            1
        }
    }

    pub fn linear(&self) -> [[i64; 2]; 2] {
        let f = if self.reflect { [[1, 0], [0, -1]] } else { [[1, 0], [0, 1]] };
        let r = match self.rot % 4 {
            0 => [[1, 0], [0, 1]],
            1 => [[0, -1], [1, 0]],
            2 => [[-1, 0], [0, -1]],
            _ => [[0, 1], [-1, 0]],
        };
        mat_mul(r, f)
    }

    fn from_linear(l: [[i64; 2]; 2], dx: i64, dy: i64) -> LatticeIsometry {
        Self::point_group()
            .find(|g| g.linear() == l)
            .map(|g| LatticeIsometry { dx, dy, ..g })
            .expect("not a point-group matrix")
    }

    fn apply_linear(&self, p: (i64, i64)) -> (i64, i64) {
        let l = self.linear();
        (l[0][0] * p.0 + l[0][1] * p.1, l[1][0] * p.0 + l[1][1] * p.1)
    }

    pub fn apply_vertex(&self, v: Vertex) -> Vertex {
        let (x, y) = self.apply_linear(v);
        (x + self.dx, y + self.dy)
    }

    pub fn apply_dpoint(&self, p: DPoint) -> DPoint {
        let (x, y) = self.apply_linear(p);
        (x + 2 * self.dx, y + 2 * self.dy)
    }

    pub fn apply_triangle(&self, t: &TriangleId) -> TriangleId {
        let [a, b, o] = t.corners();
        TriangleId::from_points(self.apply_dpoint(a), self.apply_dpoint(b), self.apply_dpoint(o))
            .expect("lattice isometries map M onto itself")
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LatticeIsometry) -> LatticeIsometry {
        let l = mat_mul(self.linear(), other.linear());
        let (tx, ty) = self.apply_linear((other.dx, other.dy));
        Self::from_linear(l, tx + self.dx, ty + self.dy)
    }

    pub fn inverse(&self) -> LatticeIsometry {
        let l = self.linear();
        let inv = [[l[0][0], l[1][0]], [l[0][1], l[1][1]]];
        let g = Self::from_linear(inv, 0, 0);
        let (tx, ty) = g.apply_linear((self.dx, self.dy));
        LatticeIsometry { dx: -tx, dy: -ty, ..g }
    }
}

fn mat_mul(a: [[i64; 2]; 2], b: [[i64; 2]; 2]) -> [[i64; 2]; 2] {
    let mut out = [[0; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

/// Finite edge-connected set of triangles of M.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MPolyform {
    triangles: BTreeSet<TriangleId>,
}

impl fmt::Debug for MPolyform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MPolyform({} triangles)", self.triangles.len())
    }
}

impl MPolyform {
    pub fn new(triangles: impl IntoIterator<Item = TriangleId>) -> Result<Self> {
        let triangles: BTreeSet<TriangleId> = triangles.into_iter().collect();
        if triangles.is_empty() {
            return Err(Error::InvalidPolyform("no triangles".into()));
        }
        let p = MPolyform { triangles };
        if !p.is_edge_connected() {
            return Err(Error::InvalidPolyform("triangles are not edge-connected".into()));
        }
        Ok(p)
    }

    pub fn triangles(&self) -> &BTreeSet<TriangleId> {
        &self.triangles
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn contains(&self, t: &TriangleId) -> bool {
        self.triangles.contains(t)
    }

    fn is_edge_connected(&self) -> bool {
        let mut by_side: HashMap<(DPoint, DPoint), Vec<TriangleId>> = HashMap::new();
        for t in &self.triangles {
            for (a, b) in t.sides() {
                let key = if a < b { (a, b) } else { (b, a) };
                by_side.entry(key).or_default().push(*t);
            }
        }
        let start = *self.triangles.iter().next().unwrap();
        let mut seen = HashSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(t) = queue.pop_front() {
            for (a, b) in t.sides() {
                let key = if a < b { (a, b) } else { (b, a) };
                for u in &by_side[&key] {
                    if seen.insert(*u) {
                        queue.push_back(*u);
                    }
                }
            }
        }
        seen.len() == self.triangles.len()
    }

    /// All triangles lying inside a closed convex polygon given by its
    /// corners in doubled coordinates (any orientation).
    pub fn from_convex_polygon(corners: &[DPoint]) -> Result<Self> {
        let hull = convex_hull(corners);
        if hull.len() < 3 {
            return Err(Error::InvalidPolyform("degenerate polygon".into()));
        }
        let (xmin, xmax) = minmax(hull.iter().map(|p| p.0));
        let (ymin, ymax) = minmax(hull.iter().map(|p| p.1));
        let mut tris = Vec::new();
        for x in xmin.div_euclid(2) - 1..=xmax.div_euclid(2) + 1 {
            for y in ymin.div_euclid(2) - 1..=ymax.div_euclid(2) + 1 {
                for side in Side::ALL {
                    let t = TriangleId::new(x, y, side);
                    if t.corners().iter().all(|&c| in_closed_hull(&hull, c)) {
                        tris.push(t);
                    }
                }
            }
        }
        Self::new(tris)
    }

    /// Axis-parallel `w x h` rectangle with lower-left corner at the origin.
    pub fn rectangle(w: i64, h: i64) -> Result<Self> {
        if w < 1 || h < 1 {
            return Err(Error::InvalidPolyform(format!("rectangle {w}x{h}")));
        }
        Self::from_convex_polygon(&[(0, 0), (2 * w, 0), (2 * w, 2 * h), (0, 2 * h)])
    }

    /// Square of side `w`; its domain is the `(w-1) x (w-1)` square.
    pub fn square(w: i64) -> Result<Self> {
        Self::rectangle(w, w)
    }

    /// Right isosceles triangle with legs of length `2k` along the axes.
    pub fn right_triangle(k: i64) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidPolyform(format!("triangle {k}")));
        }
        Self::from_convex_polygon(&[(0, 0), (4 * k, 0), (0, 4 * k)])
    }

    /// The square `|x| + |y| <= k` rotated by 45 degrees.
    pub fn diamond(k: i64) -> Result<Self> {
        if k < 1 {
            return Err(Error::InvalidPolyform(format!("diamond {k}")));
        }
        let k2 = 2 * k;
        Self::from_convex_polygon(&[(k2, 0), (0, k2), (-k2, 0), (0, -k2)])
    }

    pub fn transformed(&self, g: &LatticeIsometry) -> MPolyform {
        MPolyform { triangles: self.triangles.iter().map(|t| g.apply_triangle(t)).collect() }
    }

    /// All corner points of the triangles (doubled coordinates).
    pub fn corner_points(&self) -> BTreeSet<DPoint> {
        self.triangles.iter().flat_map(|t| t.corners()).collect()
    }

    /// Lattice points in the open region: exactly those whose 8 incident
    /// triangles all belong to the polyform.
    pub fn interior_lattice_points(&self) -> Vec<Vertex> {
        let mut cand: BTreeSet<Vertex> = BTreeSet::new();
        for t in &self.triangles {
            for (x, y) in t.corners() {
                if x % 2 == 0 && y % 2 == 0 {
                    cand.insert((x / 2, y / 2));
                }
            }
        }
        cand.into_iter().filter(|&(x, y)| incident_triangles(x, y).iter().all(|t| self.contains(t))).collect()
    }

    /// Plain-text format: one `x y d` line per triangle.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for t in &self.triangles {
            s.push_str(&format!("{} {} {}\n", t.x, t.y, t.side.as_str()));
        }
        s
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let mut tris = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let parts: Vec<&str> = line.split_whitespace().collect();
            let bad = || Error::Parse(format!("line {}: expected `x y d`, got `{line}`", lineno + 1));
            if parts.len() != 3 {
                return Err(bad());
            }
            let x = parts[0].parse::<i64>().map_err(|_| bad())?;
            let y = parts[1].parse::<i64>().map_err(|_| bad())?;
            let side = Side::parse(parts[2]).ok_or_else(bad)?;
            tris.push(TriangleId::new(x, y, side));
        }
        Self::new(tris)
    }

    /// Generator shorthand: `square:W`, `rect:WxH`, `triangle:K`, `diamond:K`,
    /// and `poly:x,y;x,y;...` for a convex polygon with corners in doubled
    /// coordinates.
    pub fn parse_generator(spec: &str) -> Result<Self> {
        let (kind, arg) = spec.split_once(':').ok_or_else(|| Error::Parse(format!("not a generator: {spec}")))?;
        let num = |s: &str| s.trim().parse::<i64>().map_err(|_| Error::Parse(format!("bad number in {spec}")));
        match kind {
            "square" => Self::square(num(arg)?),
            "triangle" => Self::right_triangle(num(arg)?),
            "diamond" => Self::diamond(num(arg)?),
            "rect" => {
                let (w, h) = arg.split_once('x').ok_or_else(|| Error::Parse(format!("expected rect:WxH, got {spec}")))?;
                Self::rectangle(num(w)?, num(h)?)
            }
            "poly" => {
                let mut corners = Vec::new();
                for pair in arg.split(';').filter(|p| !p.trim().is_empty()) {
                    let (x, y) =
                        pair.split_once(',').ok_or_else(|| Error::Parse(format!("expected x,y pairs in {spec}")))?;
                    corners.push((num(x)?, num(y)?));
                }
                Self::from_convex_polygon(&corners)
            }
            _ => Err(Error::Parse(format!("unknown generator `{kind}`"))),
        }
    }
}

/// The 8 triangles meeting at lattice point `(x, y)`.
pub fn incident_triangles(x: i64, y: i64) -> [TriangleId; 8] {
    [
        TriangleId::new(x - 1, y - 1, Side::N),
        TriangleId::new(x - 1, y - 1, Side::E),
        TriangleId::new(x, y - 1, Side::N),
        TriangleId::new(x, y - 1, Side::W),
        TriangleId::new(x - 1, y, Side::S),
        TriangleId::new(x - 1, y, Side::E),
        TriangleId::new(x, y, Side::S),
        TriangleId::new(x, y, Side::W),
    ]
}

fn minmax(it: impl Iterator<Item = i64>) -> (i64, i64) {
    it.fold((i64::MAX, i64::MIN), |(lo, hi), v| (lo.min(v), hi.max(v)))
}

fn cross(o: (i64, i64), a: (i64, i64), b: (i64, i64)) -> i64 {
    (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
}

/// Monotone-chain convex hull, counterclockwise, collinear points dropped.
pub fn convex_hull(points: &[(i64, i64)]) -> Vec<(i64, i64)> {
    let mut pts: Vec<(i64, i64)> = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<(i64, i64)> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<(i64, i64)> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Membership in the closed hull returned by [`convex_hull`], including the
/// degenerate point and segment cases.
pub fn in_closed_hull(hull: &[(i64, i64)], p: (i64, i64)) -> bool {
    match hull.len() {
        0 => false,
        1 => hull[0] == p,
        2 => {
            let (a, b) = (hull[0], hull[1]);
            cross(a, b, p) == 0
                && p.0 >= a.0.min(b.0)
                && p.0 <= a.0.max(b.0)
                && p.1 >= a.1.min(b.1)
                && p.1 <= a.1.max(b.1)
        }
        n => (0..n).all(|i| cross(hull[i], hull[(i + 1) % n], p) >= 0),
    }
}

/// Twice the signed area of a polygon.
pub fn twice_area(poly: &[(i64, i64)]) -> i64 {
    let n = poly.len();
    (0..n).map(|i| poly[i].0 * poly[(i + 1) % n].1 - poly[(i + 1) % n].0 * poly[i].1).sum()
}

/// Whether the open region of `p` is convex. The closed union is convex
/// exactly when its area equals the area of its convex hull.
pub fn is_convex(p: &MPolyform) -> bool {
    let pts: Vec<DPoint> = p.corner_points().into_iter().collect();
    let hull = convex_hull(&pts);
    // Each triangle has area 1 in doubled coordinates.
    twice_area(&hull) == 2 * p.len() as i64
}

/// Finite vertex set of Z^2 with the sink obtained by contracting the complement.
#[derive(Clone, PartialEq, Eq)]
pub struct Domain {
    vertices: Vec<Vertex>,
    index: HashMap<Vertex, usize>,
    neighbors: Vec<Vec<usize>>,
}

impl fmt::Debug for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Domain({} vertices)", self.vertices.len())
    }
}

impl Domain {
    /// Build from an arbitrary set of points; must be nonempty and 4-connected.
    pub fn from_points(points: impl IntoIterator<Item = Vertex>) -> Result<Self> {
        let set: BTreeSet<Vertex> = points.into_iter().collect();
        if set.is_empty() {
            return Err(Error::EmptyDomain);
        }
        let vertices: Vec<Vertex> = set.into_iter().collect();
        let index: HashMap<Vertex, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let neighbors = vertices
            .iter()
            .map(|&(x, y)| NEIGHBOR_OFFSETS.iter().filter_map(|(dx, dy)| index.get(&(x + dx, y + dy)).copied()).collect())
            .collect();
        let d = Domain { vertices, index, neighbors };
        if !d.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(d)
    }

    /// Axis-parallel `w x h` block of vertices with lower-left vertex `origin`.
    pub fn rectangle(origin: Vertex, w: i64, h: i64) -> Result<Self> {
        Self::from_points((0..w).flat_map(|i| (0..h).map(move |j| (origin.0 + i, origin.1 + j))))
    }

    /// `n x n` square with lower-left vertex at the origin.
    pub fn square(n: i64) -> Result<Self> {
        Self::rectangle((0, 0), n, n)
    }

    /// `n x n` square centered at the origin (odd `n`).
    pub fn centered_square(n: i64) -> Result<Self> {
        let h = n / 2;
        Self::rectangle((-h, -h), n, n)
    }

    fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.len()];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for &w in &self.neighbors[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.len()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Vertices in lexicographic `(x, y)` order; indices refer to this order.
    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, i: usize) -> Vertex {
        self.vertices[i]
    }

    pub fn index_of(&self, v: Vertex) -> Option<usize> {
        self.index.get(&v).copied()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.index.contains_key(&v)
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i]
    }

    /// Edges from vertex `i` to the sink.
    pub fn sink_edges(&self, i: usize) -> usize {
        4 - self.neighbors[i].len()
    }

    pub fn is_boundary(&self, i: usize) -> bool {
        self.neighbors[i].len() < 4
    }

    /// Indices of boundary vertices, ascending.
    pub fn boundary(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_boundary(i)).collect()
    }

    pub fn interior(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.is_boundary(i)).collect()
    }

    /// Vertices outside the domain adjacent to it, i.e. the boundary of the complement.
    pub fn outer_boundary(&self) -> Vec<Vertex> {
        let mut out = BTreeSet::new();
        for &(x, y) in &self.vertices {
            for (dx, dy) in NEIGHBOR_OFFSETS {
                let w = (x + dx, y + dy);
                if !self.contains(w) {
                    out.insert(w);
                }
            }
        }
        out.into_iter().collect()
    }

    /// `(xmin, ymin, xmax, ymax)`.
    pub fn bounding_box(&self) -> (i64, i64, i64, i64) {
        let (xmin, xmax) = minmax(self.vertices.iter().map(|v| v.0));
        let (ymin, ymax) = minmax(self.vertices.iter().map(|v| v.1));
        (xmin, ymin, xmax, ymax)
    }

    /// Reduced Laplacian, adjacency minus degree (diagonal -4).
    pub fn reduced_laplacian(&self) -> IntMatrix {
        let n = self.len();
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::from(-4);
            for &j in &self.neighbors[i] {
                m[(i, j)] = BigInt::from(1);
            }
        }
        m
    }

    pub fn laplacian_int(&self, h: &[BigInt]) -> Vec<BigInt> {
        (0..self.len())
            .map(|i| {
                let mut acc: BigInt = &h[i] * -4;
                for &j in &self.neighbors[i] {
                    acc += &h[j];
                }
                acc
            })
            .collect()
    }

    pub fn laplacian_i64(&self, h: &[i64]) -> Vec<i64> {
        (0..self.len()).map(|i| -4 * h[i] + self.neighbors[i].iter().map(|&j| h[j]).sum::<i64>()).collect()
    }

    pub fn laplacian_rational(&self, h: &[BigRational]) -> Vec<BigRational> {
        (0..self.len())
            .map(|i| {
                let mut acc = &h[i] * BigRational::from_integer(BigInt::from(-4));
                for &j in &self.neighbors[i] {
                    acc += &h[j];
                }
                acc
            })
            .collect()
    }

    /// Whether the domain equals the lattice points of its closed convex hull.
    pub fn is_convex_domain(&self) -> bool {
        let hull = convex_hull(&self.vertices);
        let (xmin, ymin, xmax, ymax) = self.bounding_box();
        for x in xmin..=xmax {
            for y in ymin..=ymax {
                if in_closed_hull(&hull, (x, y)) && !self.contains((x, y)) {
                    return false;
                }
            }
        }
        true
    }

    /// Closure under adding outside neighbors of vertices with exactly three
    /// inside neighbors.
    pub fn diamond_hull(&self) -> Result<Domain> {
        if !self.is_convex_domain() {
            return Err(Error::NonConvex);
        }
        Domain::from_points(diamond_closure(&self.points()))
    }

    /// Vertices with exactly two inside neighbors, collinear with them.
    pub fn line_segments(&self) -> BTreeSet<Vertex> {
        line_segments_of(&self.vertices.iter().copied().collect())
    }

    pub fn points(&self) -> BTreeSet<Vertex> {
        self.vertices.iter().copied().collect()
    }
}

/// Closure of a point set under adding the missing neighbor of any vertex
/// with exactly three neighbors in the set. Finite for convex sets.
pub fn diamond_closure(set: &BTreeSet<Vertex>) -> BTreeSet<Vertex> {
    let mut set = set.clone();
    loop {
        let mut added = Vec::new();
        for &(x, y) in &set {
            let missing: Vec<Vertex> = NEIGHBOR_OFFSETS
                .iter()
                .map(|(dx, dy)| (x + dx, y + dy))
                .filter(|w| !set.contains(w))
                .collect();
            if missing.len() == 1 {
                added.push(missing[0]);
            }
        }
        let before = set.len();
        set.extend(added);
        if set.len() == before {
            return set;
        }
    }
}

pub fn line_segments_of(set: &BTreeSet<Vertex>) -> BTreeSet<Vertex> {
    set.iter()
        .copied()
        .filter(|&(x, y)| {
            let inside: Vec<usize> =
                (0..4).filter(|&k| set.contains(&(x + NEIGHBOR_OFFSETS[k].0, y + NEIGHBOR_OFFSETS[k].1))).collect();
            inside.len() == 2 && (inside[1] - inside[0]) == 2
        })
        .collect()
}

/// Whether a point set equals the lattice points of its closed convex hull.
pub fn is_convex_point_set(set: &BTreeSet<Vertex>) -> bool {
    if set.is_empty() {
        return true;
    }
    let pts: Vec<Vertex> = set.iter().copied().collect();
    let hull = convex_hull(&pts);
    let (xmin, xmax) = minmax(pts.iter().map(|v| v.0));
    let (ymin, ymax) = minmax(pts.iter().map(|v| v.1));
    for x in xmin..=xmax {
        for y in ymin..=ymax {
            if in_closed_hull(&hull, (x, y)) && !set.contains(&(x, y)) {
                return false;
            }
        }
    }
    true
}

/// Lattice domain `Z^2 ∩ P` of a polyform.
pub fn domain_of(p: &MPolyform) -> Result<Domain> {
    let pts = p.interior_lattice_points();
    if pts.is_empty() {
        return Err(Error::EmptyDomain);
    }
    Domain::from_points(pts)
}

pub fn apply_isometry(g: &LatticeIsometry, p: &MPolyform) -> MPolyform {
    p.transformed(g)
}

/// Exact-zero helper used by callers that build rational vectors.
pub fn rational_zeros(n: usize) -> Vec<BigRational> {
    vec![BigRational::zero(); n]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::det_exact;
    use num_traits::Signed;

    #[test]
    fn square_domains() {
        let d = domain_of(&MPolyform::square(2).unwrap()).unwrap();
        assert_eq!(d.vertices(), &[(1, 1)]);
        assert!(matches!(domain_of(&MPolyform::square(1).unwrap()), Err(Error::EmptyDomain)));
        let d = domain_of(&MPolyform::square(4).unwrap()).unwrap();
        assert_eq!(d.len(), 9);
        assert_eq!(d.boundary().len(), 8);
    }

    #[test]
    fn triangle_domain_has_three_vertices() {
        let p = MPolyform::right_triangle(2).unwrap();
        let d = domain_of(&p).unwrap();
        assert_eq!(d.vertices(), &[(1, 1), (1, 2), (2, 1)]);
        assert!(is_convex(&p));
    }

    #[test]
    fn convexity_of_polyforms() {
        assert!(is_convex(&MPolyform::square(3).unwrap()));
        assert!(is_convex(&MPolyform::diamond(2).unwrap()));
        let a = MPolyform::square(2).unwrap();
        let b = a.transformed(&LatticeIsometry::translation(2, 0));
        let c = a.transformed(&LatticeIsometry::translation(0, 2));
        let l = MPolyform::new(a.triangles().iter().chain(b.triangles()).chain(c.triangles()).copied()).unwrap();
        assert!(!is_convex(&l));
    }

    #[test]
    fn laplacian_determinants() {
        let one = Domain::square(1).unwrap();
        assert_eq!(det_exact(&one.reduced_laplacian()), BigInt::from(-4));
        let two = Domain::square(2).unwrap();
        assert_eq!(det_exact(&two.reduced_laplacian()).abs(), BigInt::from(192));
        let three = Domain::square(3).unwrap();
        assert_eq!(det_exact(&three.reduced_laplacian()).abs(), BigInt::from(100352));
    }

    #[test]
    fn domain_convexity() {
        assert!(Domain::square(4).unwrap().is_convex_domain());
        let holed = Domain::from_points(Domain::square(3).unwrap().vertices().iter().copied().filter(|&v| v != (1, 1)))
            .unwrap();
        assert!(!holed.is_convex_domain());
        let diamond = Domain::from_points((-2..=2).flat_map(|x: i64| (-2..=2).map(move |y: i64| (x, y))).filter(|(x, y)| x.abs() + y.abs() <= 2))
            .unwrap();
        assert!(diamond.is_convex_domain());
    }

    #[test]
    fn diamond_hulls() {
        let one = Domain::square(1).unwrap();
        assert_eq!(one.diamond_hull().unwrap(), one);
        let two = Domain::square(2).unwrap();
        assert_eq!(two.diamond_hull().unwrap(), two);
        let three = Domain::square(3).unwrap();
        let hull = three.diamond_hull().unwrap();
        assert_eq!(hull.len(), 13);
        assert!(hull.vertices().iter().all(|&(x, y)| (x - 1).abs() + (y - 1).abs() <= 2));
        assert_eq!(hull.boundary().len(), three.boundary().len());
        assert_eq!(hull.diamond_hull().unwrap(), hull);
    }

    #[test]
    fn segments() {
        assert!(Domain::square(1).unwrap().line_segments().is_empty());
        let strip = Domain::rectangle((0, 0), 3, 1).unwrap();
        assert_eq!(strip.line_segments().into_iter().collect::<Vec<_>>(), vec![(1, 0)]);
        assert!(Domain::square(2).unwrap().line_segments().is_empty());
    }

    #[test]
    fn isometry_group_laws() {
        let p = MPolyform::right_triangle(2).unwrap();
        assert_eq!(p.transformed(&LatticeIsometry::identity()), p);
        let r = LatticeIsometry::new(1, false, 3, -1);
        let mut q = p.clone();
        for _ in 0..4 {
            q = q.transformed(&r);
        }
        // r^4 is a pure translation; undo it.
        let r4 = r.compose(&r).compose(&r).compose(&r);
        assert_eq!(r4.rot, 0);
        assert!(!r4.reflect);
        assert_eq!(q, p.transformed(&r4));
        let rot_about_origin = LatticeIsometry::new(1, false, 0, 0);
        let mut q = p.clone();
        for _ in 0..4 {
            q = q.transformed(&rot_about_origin);
        }
        assert_eq!(q, p);
        assert_eq!(LatticeIsometry::new(0, true, 0, 0).sign(), -1);
        assert_eq!(LatticeIsometry::new(3, false, 0, 0).sign(), 1);
        for g in LatticeIsometry::point_group() {
            let g = LatticeIsometry { dx: 2, dy: -5, ..g };
            for h in LatticeIsometry::point_group() {
                let h = LatticeIsometry { dx: -1, dy: 4, ..h };
                assert_eq!(p.transformed(&g.compose(&h)), p.transformed(&h).transformed(&g));
            }
            assert_eq!(g.compose(&g.inverse()), LatticeIsometry::identity());
        }
    }

    #[test]
    fn text_roundtrip_and_generators() {
        let p = MPolyform::parse_generator("rect:3x2").unwrap();
        assert_eq!(p.len(), 24);
        let back = MPolyform::parse_text(&format!("# comment\n{}", p.to_text())).unwrap();
        assert_eq!(back, p);
        assert!(MPolyform::parse_generator("blob:3").is_err());
        assert!(MPolyform::parse_text("0 0 Q").is_err());
    }
}
