//! Directed-colored polyforms and edge-matched tilings of one polyform by
//! copies of another.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    domain_of, is_convex, DPoint, Domain, LatticeIsometry, MPolyform, Side, TriangleId, Vertex,
};

/// A maximal straight piece of a polyform boundary, directed and colored.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DCEdge {
    pub color: usize,
    pub tail: DPoint,
    pub head: DPoint,
}

impl DCEdge {
    pub fn transformed(&self, g: &LatticeIsometry) -> DCEdge {
        DCEdge { color: self.color, tail: g.apply_dpoint(self.tail), head: g.apply_dpoint(self.head) }
    }

    /// Whether the two segments share a collinear piece of positive length.
    pub fn overlaps(&self, other: &DCEdge) -> bool {
        let a = self.tail;
        let d = (self.head.0 - a.0, self.head.1 - a.1);
        let cr = |p: DPoint| d.0 * (p.1 - a.1) - d.1 * (p.0 - a.0);
        if cr(other.tail) != 0 || cr(other.head) != 0 {
            return false;
        }
        let t = |p: DPoint| d.0 * (p.0 - a.0) + d.1 * (p.1 - a.1);
        let (t0, t1) = (t(other.tail), t(other.head));
        let hi = (d.0 * d.0 + d.1 * d.1).min(t0.max(t1));
        let lo = 0.max(t0.min(t1));
        hi > lo
    }

    fn bbox(&self) -> (i64, i64, i64, i64) {
        (
            self.tail.0.min(self.head.0),
            self.tail.1.min(self.head.1),
            self.tail.0.max(self.head.0),
            self.tail.1.max(self.head.1),
        )
    }
}

/// A polyform together with its colored and directed boundary edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DCPolyform {
    base: MPolyform,
    edges: Vec<DCEdge>,
}

impl DCPolyform {
    pub fn base(&self) -> &MPolyform {
        &self.base
    }

    pub fn edges(&self) -> &[DCEdge] {
        &self.edges
    }

    pub fn transformed_edges(&self, g: &LatticeIsometry) -> Vec<DCEdge> {
        self.edges.iter().map(|e| e.transformed(g)).collect()
    }
}

fn unit(d: (i64, i64)) -> (i64, i64) {
    (d.0.signum(), d.1.signum())
}

/// Boundary of `p` split into maximal straight edges, traversed
/// counterclockwise from the lexicographically smallest boundary point and
/// colored `0, 1, 2, ...` in that order.
pub fn boundary_edges(p: &MPolyform) -> Result<DCPolyform> {
    let sides: HashSet<(DPoint, DPoint)> = p.triangles().iter().flat_map(|t| t.sides()).collect();
    let mut next: HashMap<DPoint, DPoint> = HashMap::new();
    for &(a, b) in &sides {
        if !sides.contains(&(b, a)) && next.insert(a, b).is_some() {
            return Err(Error::HoleDetected);
        }
    }
    let start = *next.keys().min().ok_or_else(|| Error::InvalidPolyform("no boundary".into()))?;
    let mut walk = vec![start];
    let mut cur = next[&start];
    while cur != start {
        walk.push(cur);
        cur = *next.get(&cur).ok_or(Error::HoleDetected)?;
        if walk.len() > next.len() {
            return Err(Error::HoleDetected);
        }
    }
    if walk.len() != next.len() {
        return Err(Error::HoleDetected);
    }
    let n = walk.len();
    let dir = |i: usize| {
        let (a, b) = (walk[i % n], walk[(i + 1) % n]);
        unit((b.0 - a.0, b.1 - a.1))
    };
    let corners: Vec<DPoint> = (0..n).filter(|&i| dir(i + n - 1) != dir(i)).map(|i| walk[i]).collect();
    let edges = (0..corners.len())
        .map(|k| DCEdge { color: k, tail: corners[k], head: corners[(k + 1) % corners.len()] })
        .collect();
    Ok(DCPolyform { base: p.clone(), edges })
}

/// One tile: an isometry applied to the template, with its orientation sign.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TilePlacement {
    pub isometry: LatticeIsometry,
    pub sign: i8,
}

impl TilePlacement {
    pub fn new(isometry: LatticeIsometry) -> Self {
        TilePlacement { isometry, sign: isometry.sign() }
    }
}

/// A tiling of `target` by directed-colored copies of a template.
#[derive(Clone, Debug)]
pub struct DCTiling {
    template: DCPolyform,
    target: MPolyform,
    placements: Vec<TilePlacement>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TilingValidation {
    pub valid: bool,
    pub diagnostics: Vec<String>,
}

impl DCTiling {
    /// Assemble a tiling without validating it.
    pub fn new(template: &MPolyform, target: MPolyform, placements: Vec<TilePlacement>) -> Result<Self> {
        Ok(DCTiling { template: boundary_edges(template)?, target, placements })
    }

    /// Assemble and reject anything that fails [`DCTiling::validate`].
    pub fn checked(template: &MPolyform, target: MPolyform, placements: Vec<TilePlacement>) -> Result<Self> {
        let t = Self::new(template, target, placements)?;
        let v = t.validate();
        if !v.valid {
            return Err(Error::InvalidTiling(v.diagnostics.join("; ")));
        }
        Ok(t)
    }

    /// `P` tiled by itself with the identity placement.
    pub fn identity(p: &MPolyform) -> Result<Self> {
        Self::new(p, p.clone(), vec![TilePlacement::new(LatticeIsometry::identity())])
    }

    pub fn template(&self) -> &DCPolyform {
        &self.template
    }

    pub fn target(&self) -> &MPolyform {
        &self.target
    }

    pub fn placements(&self) -> &[TilePlacement] {
        &self.placements
    }

    pub fn len(&self) -> usize {
        self.placements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placements.is_empty()
    }

    pub fn with_placements(&self, placements: Vec<TilePlacement>) -> DCTiling {
        DCTiling { placements, ..self.clone() }
    }

    pub fn source_domain(&self) -> Result<Domain> {
        domain_of(self.template.base())
    }

    pub fn target_domain(&self) -> Result<Domain> {
        domain_of(&self.target)
    }

    pub fn validate(&self) -> TilingValidation {
        let mut diag = Vec::new();
        let template = self.template.base();
        for (i, p) in self.placements.iter().enumerate() {
            if p.sign != p.isometry.sign() {
                diag.push(format!("tile {i}: sign {} does not match its isometry", p.sign));
            }
        }
        let mut owner: HashMap<TriangleId, usize> = HashMap::new();
        for (i, p) in self.placements.iter().enumerate() {
            for t in template.triangles() {
                let u = p.isometry.apply_triangle(t);
                if !self.target.contains(&u) {
                    diag.push(format!("tile {i}: triangle {:?} lies outside the target", u));
                    break;
                }
                if let Some(j) = owner.insert(u, i) {
                    diag.push(format!("tiles {j} and {i} overlap at {:?}", u));
                    break;
                }
            }
        }
        if owner.len() != self.target.len() && diag.is_empty() {
            diag.push(format!("tiles cover {} of {} target triangles", owner.len(), self.target.len()));
        }
        let edges: Vec<Vec<DCEdge>> =
            self.placements.iter().map(|p| self.template.transformed_edges(&p.isometry)).collect();
        for i in 0..edges.len() {
            for j in i + 1..edges.len() {
                if let Some(msg) = edge_conflict(&edges[i], &edges[j]) {
                    diag.push(format!("tiles {i} and {j}: {msg}"));
                }
            }
        }
        match (self.source_domain(), self.target_domain()) {
            (Ok(a), Ok(b)) => {
                let mut seen: HashMap<Vertex, usize> = HashMap::new();
                for (i, p) in self.placements.iter().enumerate() {
                    for &v in a.vertices() {
                        let w = p.isometry.apply_vertex(v);
                        if !b.contains(w) {
                            diag.push(format!("tile {i}: vertex {:?} is outside the target domain", w));
                        }
                        if let Some(j) = seen.insert(w, i) {
                            diag.push(format!("domains of tiles {j} and {i} share vertex {:?}", w));
                        }
                    }
                }
            }
            (Err(e), _) | (_, Err(e)) => diag.push(format!("domain: {e}")),
        }
        TilingValidation { valid: diag.is_empty(), diagnostics: diag }
    }

    pub fn to_certificate(&self) -> TilingCertificate {
        self.certificate_with(PolyformRef::inline(self.template.base()), PolyformRef::inline(&self.target))
    }

    pub fn certificate_with(&self, template: PolyformRef, target: PolyformRef) -> TilingCertificate {
        let placements = self
            .placements
            .iter()
            .map(|p| PlacementRecord {
                rot: p.isometry.rot,
                reflect: p.isometry.reflect,
                dx: Offset::Int(p.isometry.dx),
                dy: Offset::Int(p.isometry.dy),
                sign: p.sign,
            })
            .collect();
        TilingCertificate { template, target, placements }
    }

    pub fn from_certificate(cert: &TilingCertificate, base_dir: Option<&Path>) -> Result<DCTiling> {
        let template = cert.template.resolve(base_dir)?;
        let target = cert.target.resolve(base_dir)?;
        let mut placements = Vec::new();
        for (i, r) in cert.placements.iter().enumerate() {
            if r.rot > 3 {
                return Err(Error::Parse(format!("placement {i}: rot must be 0..3")));
            }
            if r.sign != 1 && r.sign != -1 {
                return Err(Error::Parse(format!("placement {i}: sign must be 1 or -1")));
            }
            let dx = r.dx.integral().ok_or_else(|| {
                Error::InvalidTiling(format!("placement {i}: translations must be integral to preserve M"))
            })?;
            let dy = r.dy.integral().ok_or_else(|| {
                Error::InvalidTiling(format!("placement {i}: translations must be integral to preserve M"))
            })?;
            placements.push(TilePlacement { isometry: LatticeIsometry::new(r.rot, r.reflect, dx, dy), sign: r.sign });
        }
        DCTiling::new(&template, target, placements)
    }
}

fn edge_conflict(a: &[DCEdge], b: &[DCEdge]) -> Option<String> {
    for e in a {
        let (x0, y0, x1, y1) = e.bbox();
        for f in b {
            let (u0, v0, u1, v1) = f.bbox();
            if u0 > x1 || x0 > u1 || v0 > y1 || y0 > v1 {
                continue;
            }
            if e.overlaps(f) {
                if (e.tail, e.head) == (f.tail, f.head) && e.color == f.color {
                    continue;
                }
                let what = if (e.tail == f.tail && e.head == f.head) || (e.tail == f.head && e.head == f.tail) {
                    if e.color != f.color {
                        "color mismatch"
                    } else {
                        "direction mismatch"
                    }
                } else {
                    "partial edge contact"
                };
                return Some(format!("{what} between edge {} {:?}->{:?} and edge {} {:?}->{:?}", e.color, e.tail, e.head, f.color, f.tail, f.head));
            }
        }
    }
    None
}

/// Where a polyform in a certificate comes from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PolyformRef {
    /// Generator shorthand or a path to a polyform text file.
    Spec(String),
    /// Inline triangle list.
    Triangles(Vec<(i64, i64, Side)>),
}

impl PolyformRef {
    pub fn inline(p: &MPolyform) -> Self {
        PolyformRef::Triangles(p.triangles().iter().map(|t| (t.x, t.y, t.side)).collect())
    }

    pub fn resolve(&self, base_dir: Option<&Path>) -> Result<MPolyform> {
        match self {
            PolyformRef::Triangles(ts) => MPolyform::new(ts.iter().map(|&(x, y, s)| TriangleId::new(x, y, s))),
            PolyformRef::Spec(s) => load_polyform(s, base_dir),
        }
    }
}

/// Parse a generator shorthand, falling back to reading a polyform file.
pub fn load_polyform(spec: &str, base_dir: Option<&Path>) -> Result<MPolyform> {
    let gen = MPolyform::parse_generator(spec);
    if gen.is_ok() {
        return gen;
    }
    let path = match base_dir {
        Some(dir) if Path::new(spec).is_relative() => dir.join(spec),
        _ => Path::new(spec).to_path_buf(),
    };
    match std::fs::read_to_string(&path) {
        Ok(text) => MPolyform::parse_text(&text),
        Err(_) if spec.contains(':') => gen,
        Err(e) => Err(Error::Parse(format!("cannot read {}: {e}", path.display()))),
    }
}

/// A translation component as written in a certificate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Offset {
    Int(i64),
    Real(f64),
}

impl Offset {
    fn integral(self) -> Option<i64> {
        match self {
            Offset::Int(v) => Some(v),
            Offset::Real(v) if v.fract() == 0.0 && v.abs() < 9e15 => Some(v as i64),
            Offset::Real(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlacementRecord {
    pub rot: u8,
    pub reflect: bool,
    pub dx: Offset,
    pub dy: Offset,
    pub sign: i8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TilingCertificate {
    pub template: PolyformRef,
    pub target: PolyformRef,
    pub placements: Vec<PlacementRecord>,
}

struct Orientation {
    g: LatticeIsometry,
    triangles: Vec<TriangleId>,
    edges: Vec<DCEdge>,
    first: TriangleId,
}

struct Search<'a> {
    target: &'a MPolyform,
    orientations: Vec<Orientation>,
    covered: HashSet<TriangleId>,
    placed: Vec<(LatticeIsometry, Vec<DCEdge>, Vec<TriangleId>)>,
    found: Vec<Vec<LatticeIsometry>>,
    limit: usize,
}

impl Search<'_> {
    fn try_place(&mut self, o: usize, dx: i64, dy: i64) -> bool {
        let or = &self.orientations[o];
        let shift = LatticeIsometry::translation(dx, dy);
        let tris: Vec<TriangleId> = or.triangles.iter().map(|t| shift.apply_triangle(t)).collect();
        if tris.iter().any(|t| !self.target.contains(t) || self.covered.contains(t)) {
            return false;
        }
        let edges: Vec<DCEdge> = or.edges.iter().map(|e| e.transformed(&shift)).collect();
        if self.placed.iter().any(|(_, other, _)| edge_conflict(&edges, other).is_some()) {
            return false;
        }
        self.covered.extend(tris.iter().copied());
        self.placed.push((shift.compose(&or.g), edges, tris));
        true
    }

    fn unplace(&mut self) {
        let (_, _, tris) = self.placed.pop().expect("nonempty");
        for t in &tris {
            self.covered.remove(t);
        }
    }

    fn run(&mut self) {
        if self.found.len() >= self.limit {
            return;
        }
        let anchor = self.target.triangles().iter().find(|t| !self.covered.contains(t)).copied();
        let Some(anchor) = anchor else {
            self.found.push(self.placed.iter().map(|(g, _, _)| *g).collect());
            return;
        };
        for o in 0..self.orientations.len() {
            let first = self.orientations[o].first;
            // The placed tile's smallest triangle must be the anchor itself.
            if first.side != anchor.side {
                continue;
            }
            if self.try_place(o, anchor.x - first.x, anchor.y - first.y) {
                self.run();
                self.unplace();
                if self.found.len() >= self.limit {
                    return;
                }
            }
        }
    }
}

/// All DC-tilings of `target` by `template`, up to `limit`, in a fixed
/// deterministic order.
pub fn search_tilings(template: &MPolyform, target: &MPolyform, limit: usize) -> Result<Vec<DCTiling>> {
    search_tilings_with(template, target, &[], limit)
}

/// Like [`search_tilings`], but only tilings containing every placement in
/// `fixed`.
pub fn search_tilings_with(
    template: &MPolyform,
    target: &MPolyform,
    fixed: &[LatticeIsometry],
    limit: usize,
) -> Result<Vec<DCTiling>> {
    let dc = boundary_edges(template)?;
    if limit == 0 || !target.len().is_multiple_of(template.len()) {
        return Ok(Vec::new());
    }
    let orientations = LatticeIsometry::point_group()
        .map(|g| {
            let triangles: Vec<TriangleId> = template.transformed(&g).triangles().iter().copied().collect();
            let first = triangles[0];
            Orientation { g, edges: dc.transformed_edges(&g), triangles, first }
        })
        .collect();
    let mut search =
        Search { target, orientations, covered: HashSet::new(), placed: Vec::new(), found: Vec::new(), limit };
    for g in fixed {
        let o = search
            .orientations
            .iter()
            .position(|o| o.g.rot == g.rot && o.g.reflect == g.reflect)
            .expect("point group is complete");
        if !search.try_place(o, g.dx, g.dy) {
            return Ok(Vec::new());
        }
    }
    search.run();
    search
        .found
        .into_iter()
        .map(|gs| Ok(DCTiling { template: dc.clone(), target: target.clone(), placements: gs.into_iter().map(TilePlacement::new).collect() }))
        .collect()
}

/// Warnings for inputs outside the convex setting.
pub fn convexity_warnings(template: &MPolyform, target: &MPolyform) -> Vec<String> {
    let mut w = Vec::new();
    if !is_convex(template) {
        w.push("template polyform is not convex".to_string());
    }
    if !is_convex(target) {
        w.push("target polyform is not convex".to_string());
    }
    w
}

/// For each placement, the map from source-domain indices to target-domain
/// indices.
pub fn vertex_maps(t: &DCTiling) -> Result<Vec<Vec<usize>>> {
    let a = t.source_domain()?;
    let b = t.target_domain()?;
    t.placements
        .iter()
        .map(|p| {
            a.vertices()
                .iter()
                .map(|&v| {
                    let w = p.isometry.apply_vertex(v);
                    b.index_of(w).ok_or_else(|| Error::InvalidTiling(format!("{:?} maps outside the target domain", v)))
                })
                .collect()
        })
        .collect()
}

/// Target-domain indices that belong to no tile's domain, ascending.
pub fn internal_boundaries(t: &DCTiling) -> Result<Vec<usize>> {
    let b = t.target_domain()?;
    let covered: HashSet<usize> = vertex_maps(t)?.into_iter().flatten().collect();
    Ok((0..b.len()).filter(|i| !covered.contains(i)).collect())
}

/// Per target vertex: `Some((tile, source index))` for tile vertices and
/// `None` on the internal boundary.
pub fn vertex_owners(t: &DCTiling) -> Result<Vec<Option<(usize, usize)>>> {
    let b = t.target_domain()?;
    let mut owner = vec![None; b.len()];
    for (i, map) in vertex_maps(t)?.iter().enumerate() {
        for (va, &vb) in map.iter().enumerate() {
            owner[vb] = Some((i, va));
        }
    }
    Ok(owner)
}

/// The balance condition at internal-boundary vertices with the tiling's own
/// signs.
pub fn check_boundary_balance(t: &DCTiling) -> Result<bool> {
    let signs: Vec<i8> = t.placements.iter().map(|p| p.sign).collect();
    check_boundary_balance_with_signs(t, &signs)
}

/// For every internal-boundary vertex `b` and every source vertex `v_A`, the
/// signs of the neighbors of `b` that are copies of `v_A` sum to zero.
pub fn check_boundary_balance_with_signs(t: &DCTiling, signs: &[i8]) -> Result<bool> {
    if signs.len() != t.len() {
        return Err(Error::Dimension(format!("{} signs for {} tiles", signs.len(), t.len())));
    }
    let b = t.target_domain()?;
    let owner = vertex_owners(t)?;
    for ib in internal_boundaries(t)? {
        let mut sums: BTreeMap<usize, i64> = BTreeMap::new();
        for &w in b.neighbors(ib) {
            if let Some((tile, va)) = owner[w] {
                *sums.entry(va).or_default() += signs[tile] as i64;
            }
        }
        if sums.values().any(|&s| s != 0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether deleting the internal boundary leaves exactly the tile domains as
/// connected components.
pub fn separation_holds(t: &DCTiling) -> Result<bool> {
    let b = t.target_domain()?;
    let owner = vertex_owners(t)?;
    let mut comp = vec![usize::MAX; b.len()];
    let mut count = 0;
    for s in 0..b.len() {
        if owner[s].is_none() || comp[s] != usize::MAX {
            continue;
        }
        let tile = owner[s].unwrap().0;
        let mut stack = vec![s];
        comp[s] = count;
        let mut size = 0;
        while let Some(v) = stack.pop() {
            size += 1;
            if owner[v].unwrap().0 != tile {
                return Ok(false);
            }
            for &w in b.neighbors(v) {
                if owner[w].is_some() && comp[w] == usize::MAX {
                    comp[w] = count;
                    stack.push(w);
                }
            }
        }
        if size != t.source_domain()?.len() {
            return Ok(false);
        }
        count += 1;
    }
    Ok(count == t.len())
}

/// Whether every internal-boundary vertex lies on a segment shared by two
/// tiles (endpoints included).
pub fn internal_boundary_on_shared_edges(t: &DCTiling) -> Result<bool> {
    let b = t.target_domain()?;
    let edges: Vec<Vec<DCEdge>> = t.placements.iter().map(|p| t.template.transformed_edges(&p.isometry)).collect();
    let on = |e: &DCEdge, p: DPoint| {
        let d = (e.head.0 - e.tail.0, e.head.1 - e.tail.1);
        let q = (p.0 - e.tail.0, p.1 - e.tail.1);
        d.0 * q.1 - d.1 * q.0 == 0 && {
            let s = d.0 * q.0 + d.1 * q.1;
            s >= 0 && s <= d.0 * d.0 + d.1 * d.1
        }
    };
    for ib in internal_boundaries(t)? {
        let (x, y) = b.vertex(ib);
        let p = (2 * x, 2 * y);
        let touching = edges.iter().filter(|es| es.iter().any(|e| on(e, p))).count();
        if touching < 2 {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `T2 ∘ T1`: every tile of `T2` refined by the tiles of `T1`.
pub fn compose_tilings(t1: &DCTiling, t2: &DCTiling) -> Result<DCTiling> {
    if t1.target.triangles() != t2.template.base().triangles() {
        return Err(Error::DomainMismatch);
    }
    let mut placements = Vec::new();
    for p2 in &t2.placements {
        for p1 in &t1.placements {
            placements.push(TilePlacement { isometry: p2.isometry.compose(&p1.isometry), sign: p2.sign * p1.sign });
        }
    }
    Ok(DCTiling { template: t1.template.clone(), target: t2.target.clone(), placements })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle_instance() -> (MPolyform, MPolyform) {
        (MPolyform::right_triangle(2).unwrap(), MPolyform::right_triangle(4).unwrap())
    }

    #[test]
    fn edge_counts() {
        assert_eq!(boundary_edges(&MPolyform::square(3).unwrap()).unwrap().edges().len(), 4);
        let tri = MPolyform::right_triangle(2).unwrap();
        let dc = boundary_edges(&tri).unwrap();
        assert_eq!(dc.edges().len(), 3);
        assert_eq!(dc.edges()[0], DCEdge { color: 0, tail: (0, 0), head: (8, 0) });
        for g in LatticeIsometry::point_group() {
            let moved = tri.transformed(&LatticeIsometry { dx: 3, dy: -2, ..g });
            assert_eq!(boundary_edges(&moved).unwrap().edges().len(), 3);
        }
    }

    #[test]
    fn hole_is_detected() {
        let sq = MPolyform::square(3).unwrap();
        let ring = MPolyform::new(sq.triangles().iter().copied().filter(|t| (t.x, t.y) != (1, 1))).unwrap();
        assert!(matches!(boundary_edges(&ring), Err(Error::HoleDetected)));
    }

    #[test]
    fn square_self_tilings() {
        for w in 2..=4 {
            let p = MPolyform::square(w).unwrap();
            let ts = search_tilings(&p, &p, usize::MAX).unwrap();
            assert_eq!(ts.len(), 8);
            assert!(ts.iter().any(|t| t.placements()[0].isometry == LatticeIsometry::identity()));
        }
    }

    #[test]
    fn triangle_tiling_is_valid() {
        let (a, b) = triangle_instance();
        let ts = search_tilings(&a, &b, usize::MAX).unwrap();
        assert!(!ts.is_empty());
        for t in &ts {
            assert_eq!(t.len(), 4);
            assert!(t.validate().valid);
            assert!(check_boundary_balance(t).unwrap());
            assert!(separation_holds(t).unwrap());
            assert!(internal_boundary_on_shared_edges(t).unwrap());
            let ib = internal_boundaries(t).unwrap();
            assert_eq!(4 * 3 + ib.len(), t.target_domain().unwrap().len());
        }
    }

    #[test]
    fn reflection_swapped_for_rotation_is_invalid() {
        let (a, b) = triangle_instance();
        let t = search_tilings(&a, &b, 1).unwrap().remove(0);
        let i = t.placements().iter().position(|p| p.sign == -1).unwrap();
        // The template is symmetric under (x, y) -> (y, x), a reflection.
        let swap = LatticeIsometry::new(1, true, 0, 0);
        let mut ps = t.placements().to_vec();
        ps[i] = TilePlacement::new(ps[i].isometry.compose(&swap));
        assert_eq!(ps[i].sign, 1);
        let bad = t.with_placements(ps);
        let v = bad.validate();
        assert!(!v.valid);
        assert!(v.diagnostics.iter().any(|d| d.contains("direction")));
    }

    #[test]
    fn corrupted_signs_break_balance() {
        let (a, b) = triangle_instance();
        let t = search_tilings(&a, &b, 1).unwrap().remove(0);
        let signs = vec![1; t.len()];
        assert!(!check_boundary_balance_with_signs(&t, &signs).unwrap());
    }

    #[test]
    fn certificate_round_trip() {
        let (a, b) = triangle_instance();
        let t = search_tilings(&a, &b, 1).unwrap().remove(0);
        let cert = t.certificate_with(PolyformRef::Spec("triangle:2".into()), PolyformRef::Spec("triangle:4".into()));
        let json = serde_json::to_string(&cert).unwrap();
        let back: TilingCertificate = serde_json::from_str(&json).unwrap();
        let t2 = DCTiling::from_certificate(&back, None).unwrap();
        assert_eq!(t2.placements(), t.placements());
        assert!(t2.validate().valid);
        let inline = serde_json::to_string(&t.to_certificate()).unwrap();
        let t3 = DCTiling::from_certificate(&serde_json::from_str(&inline).unwrap(), None).unwrap();
        assert_eq!(t3.placements(), t.placements());
        let half = json.replacen("\"dx\":", "\"dx\":0.5,\"ignored\":", 1);
        let parsed: TilingCertificate = serde_json::from_str(&half).unwrap();
        assert!(DCTiling::from_certificate(&parsed, None).is_err());
    }

    #[test]
    fn identity_tiling_has_empty_boundary() {
        let p = MPolyform::square(4).unwrap();
        let t = DCTiling::identity(&p).unwrap();
        assert!(t.validate().valid);
        assert!(internal_boundaries(&t).unwrap().is_empty());
        assert!(check_boundary_balance(&t).unwrap());
    }
}
