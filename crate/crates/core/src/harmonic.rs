//! Harmonic functions on lattice domains: Dirichlet solves, diagonal
//! families, integer bases, boundary coordinates and the cyclic subgroups
//! they induce.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::algebra::{
    det_exact, floor_rational, frac, lattice_solve, smith_normal_form, solve_exact, solve_many, subgroup_order_in_cokernel,
    IntMatrix,
};
use crate::error::{Error, Result};
use crate::geometry::{diamond_closure, is_convex_point_set, line_segments_of, Domain, Vertex, NEIGHBOR_OFFSETS};
use crate::sandpile::{canonical_rep_big, element_order, group_add, identity, GroupElement};

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Axis-parallel box of lattice points, bounds inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
}

impl Rect {
    pub fn new(x0: i64, y0: i64, x1: i64, y1: i64) -> Result<Rect> {
        if x1 < x0 || y1 < y0 {
            return Err(Error::BoxTooSmall(format!("[{x0},{y0}]..[{x1},{y1}] is empty")));
        }
        Ok(Rect { x0, y0, x1, y1 })
    }

    /// Bounding box of a domain grown by `margin` on every side.
    pub fn around(domain: &Domain, margin: i64) -> Rect {
        let (x0, y0, x1, y1) = domain.bounding_box();
        Rect { x0: x0 - margin, y0: y0 - margin, x1: x1 + margin, y1: y1 + margin }
    }

    pub fn width(&self) -> usize {
        (self.x1 - self.x0 + 1) as usize
    }

    pub fn height(&self) -> usize {
        (self.y1 - self.y0 + 1) as usize
    }

    pub fn contains(&self, (x, y): Vertex) -> bool {
        self.x0 <= x && x <= self.x1 && self.y0 <= y && y <= self.y1
    }

    /// Row-major order: rows from `y0` up to `y1`, `x` increasing in a row.
    pub fn points(&self) -> Vec<Vertex> {
        (self.y0..=self.y1).flat_map(|y| (self.x0..=self.x1).map(move |x| (x, y))).collect()
    }

    fn offset(&self, (x, y): Vertex) -> Option<usize> {
        self.contains((x, y)).then(|| (y - self.y0) as usize * self.width() + (x - self.x0) as usize)
    }
}

/// Exact rational function on a box. Cells may be undefined, which is how
/// functions living on a domain are stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HarmonicFunction {
    rect: Rect,
    values: Vec<Option<BigRational>>,
}

impl HarmonicFunction {
    pub fn from_fn(rect: Rect, mut f: impl FnMut(Vertex) -> BigRational) -> Self {
        let values = rect.points().into_iter().map(|v| Some(f(v))).collect();
        HarmonicFunction { rect, values }
    }

    pub fn from_domain(domain: &Domain, values: &[BigRational]) -> Self {
        let rect = Rect::around(domain, 0);
        let mut out = vec![None; rect.width() * rect.height()];
        for (i, &v) in domain.vertices().iter().enumerate() {
            out[rect.offset(v).unwrap()] = Some(values[i].clone());
        }
        HarmonicFunction { rect, values: out }
    }

    pub fn from_domain_int(domain: &Domain, values: &[BigInt]) -> Self {
        let r: Vec<BigRational> = values.iter().cloned().map(BigRational::from_integer).collect();
        Self::from_domain(domain, &r)
    }

    fn from_map(map: &HashMap<Vertex, BigRational>) -> Self {
        let xs = map.keys().map(|v| v.0);
        let ys = map.keys().map(|v| v.1);
        let rect = Rect { x0: xs.clone().min().unwrap(), x1: xs.max().unwrap(), y0: ys.clone().min().unwrap(), y1: ys.max().unwrap() };
        let mut out = vec![None; rect.width() * rect.height()];
        for (v, val) in map {
            out[rect.offset(*v).unwrap()] = Some(val.clone());
        }
        HarmonicFunction { rect, values: out }
    }

    pub fn rect(&self) -> Rect {
        self.rect
    }

    pub fn get(&self, v: Vertex) -> Option<&BigRational> {
        self.rect.offset(v).and_then(|i| self.values[i].as_ref())
    }

    /// Points where the function is defined.
    pub fn support(&self) -> Vec<Vertex> {
        self.rect.points().into_iter().filter(|&v| self.get(v).is_some()).collect()
    }

    /// Lattice Laplacian at `v`, if `v` and its four neighbors are defined.
    pub fn laplacian_at(&self, (x, y): Vertex) -> Option<BigRational> {
        let mut acc = self.get((x, y))? * rat(-4);
        for (dx, dy) in NEIGHBOR_OFFSETS {
            acc += self.get((x + dx, y + dy))?;
        }
        Some(acc)
    }

    /// Points at which the Laplacian is defined and vanishes.
    pub fn harmonic_on(&self) -> Vec<Vertex> {
        self.support().into_iter().filter(|&v| self.laplacian_at(v).is_some_and(|l| l.is_zero())).collect()
    }

    /// Error unless the Laplacian vanishes at every given point.
    pub fn check_harmonic_at(&self, points: &[Vertex]) -> Result<()> {
        for &v in points {
            match self.laplacian_at(v) {
                None => return Err(Error::BoxTooSmall(format!("neighborhood of {v:?} not covered"))),
                Some(l) if !l.is_zero() => return Err(Error::NonHarmonic(v)),
                _ => {}
            }
        }
        Ok(())
    }

    pub fn is_integer(&self) -> bool {
        self.values.iter().flatten().all(|v| v.is_integer())
    }

    pub fn restrict(&self, domain: &Domain) -> Result<Vec<BigRational>> {
        domain
            .vertices()
            .iter()
            .map(|&v| self.get(v).cloned().ok_or_else(|| Error::BoxTooSmall(format!("{v:?} not covered"))))
            .collect()
    }

    pub fn restrict_int(&self, domain: &Domain) -> Result<Vec<BigInt>> {
        to_integer_values(&self.restrict(domain)?)
    }

    /// `{"box": [x0,y0,x1,y1], "values": [...]}` with row-major exact
    /// rational strings and `null` for undefined cells.
    pub fn to_json(&self) -> serde_json::Value {
        let values: Vec<serde_json::Value> =
            self.values.iter().map(|v| v.as_ref().map_or(serde_json::Value::Null, |q| q.to_string().into())).collect();
        json!({ "box": [self.rect.x0, self.rect.y0, self.rect.x1, self.rect.y1], "values": values })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self> {
        let bad = |m: &str| Error::Parse(m.to_string());
        let b = v.get("box").and_then(|b| b.as_array()).ok_or_else(|| bad("missing box"))?;
        let b: Vec<i64> = b.iter().map(|x| x.as_i64().ok_or_else(|| bad("box entries must be integers"))).collect::<Result<_>>()?;
        if b.len() != 4 {
            return Err(bad("box needs four entries"));
        }
        let rect = Rect::new(b[0], b[1], b[2], b[3])?;
        let vals = v.get("values").and_then(|b| b.as_array()).ok_or_else(|| bad("missing values"))?;
        if vals.len() != rect.width() * rect.height() {
            return Err(bad("values length does not match box"));
        }
        let values = vals
            .iter()
            .map(|x| match x {
                serde_json::Value::Null => Ok(None),
                serde_json::Value::String(s) => s.parse::<BigRational>().map(Some).map_err(|_| bad("bad rational")),
                serde_json::Value::Number(n) => {
                    n.as_i64().map(|i| Some(rat(i))).ok_or_else(|| bad("non-integer number, use a \"p/q\" string"))
                }
                _ => Err(bad("unexpected value")),
            })
            .collect::<Result<_>>()?;
        Ok(HarmonicFunction { rect, values })
    }
}

pub fn to_integer_values(values: &[BigRational]) -> Result<Vec<BigInt>> {
    values.iter().map(|q| if q.is_integer() { Ok(q.to_integer()) } else { Err(Error::NonInteger) }).collect()
}

/// `H` with `Δ_Γ H = -x`.
pub fn dirichlet_solve(domain: &Domain, x: &[BigInt]) -> Vec<BigRational> {
    let rhs: Vec<BigInt> = x.iter().map(|v| -v).collect();
    solve_exact(&domain.reduced_laplacian(), &rhs).expect("reduced Laplacian is nonsingular")
}

/// Error unless `Δ_Γ h` vanishes at every interior vertex of the domain.
pub fn check_harmonic_on_domain(domain: &Domain, h: &[BigRational]) -> Result<()> {
    let lap = domain.laplacian_rational(h);
    for i in domain.interior() {
        if !lap[i].is_zero() {
            return Err(Error::NonHarmonic(domain.vertex(i)));
        }
    }
    Ok(())
}

fn check_harmonic_int(domain: &Domain, h: &[BigInt]) -> Result<Vec<BigInt>> {
    if h.len() != domain.len() {
        return Err(Error::DomainMismatch);
    }
    let lap = domain.laplacian_int(h);
    for i in domain.interior() {
        if !lap[i].is_zero() {
            return Err(Error::NonHarmonic(domain.vertex(i)));
        }
    }
    Ok(lap)
}

/// Unique harmonic extension of `h` (harmonic on the domain) to its diamond hull.
pub fn extend_to_diamond_hull(domain: &Domain, h: &[BigRational]) -> Result<HarmonicFunction> {
    if !domain.is_convex_domain() {
        return Err(Error::NonConvex);
    }
    check_harmonic_on_domain(domain, h)?;
    let mut map: HashMap<Vertex, BigRational> = domain.vertices().iter().copied().zip(h.iter().cloned()).collect();
    loop {
        let mut forced: HashMap<Vertex, BigRational> = HashMap::new();
        for (&(x, y), val) in &map {
            let nbrs: Vec<Vertex> = NEIGHBOR_OFFSETS.iter().map(|(dx, dy)| (x + dx, y + dy)).collect();
            let missing: Vec<Vertex> = nbrs.iter().copied().filter(|w| !map.contains_key(w)).collect();
            if missing.len() != 1 {
                continue;
            }
            let mut value = val * rat(4);
            for w in nbrs.iter().filter(|w| map.contains_key(w)) {
                value -= &map[w];
            }
            if let Some(prev) = forced.insert(missing[0], value.clone()) {
                if prev != value {
                    return Err(Error::Invariant(format!("inconsistent extension at {:?}", missing[0])));
                }
            }
        }
        if forced.is_empty() {
            break;
        }
        map.extend(forced);
    }
    Ok(HarmonicFunction::from_map(&map))
}

/// Which of the two diagonal directions a family is attached to:
/// `Plus` uses the levels of `x + y`, `Minus` those of `x - y`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Diagonal {
    Plus,
    Minus,
}

/// `Geq` vanishes below its defining diagonal, `Leq` above it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    Geq,
    Leq,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Family {
    pub diagonal: Diagonal,
    pub direction: Direction,
}

impl Family {
    pub const PLUS_GEQ: Family = Family { diagonal: Diagonal::Plus, direction: Direction::Geq };
    pub const PLUS_LEQ: Family = Family { diagonal: Diagonal::Plus, direction: Direction::Leq };
    pub const MINUS_GEQ: Family = Family { diagonal: Diagonal::Minus, direction: Direction::Geq };
    pub const MINUS_LEQ: Family = Family { diagonal: Diagonal::Minus, direction: Direction::Leq };
    /// Preference order used by the basis algorithm.
    pub const ORDER: [Family; 4] = [Family::PLUS_GEQ, Family::PLUS_LEQ, Family::MINUS_GEQ, Family::MINUS_LEQ];
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = match self.diagonal {
            Diagonal::Plus => "d+",
            Diagonal::Minus => "d-",
        };
        let s = match self.direction {
            Direction::Geq => ">=",
            Direction::Leq => "<=",
        };
        write!(f, "{d}{s}")
    }
}

/// How the one free value on each non-defining diagonal is fixed.
///
/// `Zero` puts a zero on the orthogonal zero diagonal (or at level +1 of it
/// when the diagonal misses it); with an antisymmetric seed this gives the
/// antisymmetric function. `Symmetric` makes the function symmetric about
/// the orthogonal zero diagonal.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FreeValuePolicy {
    #[default]
    Zero,
    Symmetric,
}

/// Offsets of the zero diagonals `x + y = c_plus` and `x - y = c_minus`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DiagonalFrame {
    pub c_plus: i64,
    pub c_minus: i64,
}

impl DiagonalFrame {
    pub fn new(c_plus: i64, c_minus: i64) -> Self {
        DiagonalFrame { c_plus, c_minus }
    }

    /// Zero diagonals through the center of the bounding box, rounded down.
    /// For squares these are the two main diagonals.
    pub fn centered_on(domain: &Domain) -> Self {
        let (x0, y0, x1, y1) = domain.bounding_box();
        let (sx, sy) = (x0 + x1, y0 + y1);
        DiagonalFrame { c_plus: (sx + sy).div_euclid(2), c_minus: (sx - sy).div_euclid(2) }
    }

    pub fn plus_level(&self, (x, y): Vertex) -> i64 {
        x + y - self.c_plus
    }

    pub fn minus_level(&self, (x, y): Vertex) -> i64 {
        x - y - self.c_minus
    }

    /// `(i, j)` with `v` the intersection of `d+_i` and `d-_j`.
    pub fn locate(&self, v: Vertex) -> (i64, i64) {
        (self.plus_level(v), self.minus_level(v))
    }

    /// Distance from the defining diagonal and position along it.
    fn sheet_coords(&self, family: Family, index: i64, v: Vertex) -> (i64, i64) {
        let (a, b) = self.locate(v);
        let (p, q) = match family.diagonal {
            Diagonal::Plus => (a, b),
            Diagonal::Minus => (b, a),
        };
        let n = match family.direction {
            Direction::Geq => p - index,
            Direction::Leq => index - p,
        };
        (n, q)
    }

    fn seed_parity(&self, index: i64) -> i64 {
        (self.c_plus + self.c_minus + index).rem_euclid(2)
    }
}

/// Values `G(n, q)` of a diagonal family in its own coordinates: `n` counts
/// diagonals away from the defining one, `q` is the orthogonal level. Row
/// `n` holds the `q` of parity `parity + n`.
struct Sheet {
    rows: Vec<(i64, Vec<BigInt>)>,
}

impl Sheet {
    fn build(parity: i64, policy: FreeValuePolicy, n_max: i64, q_reach: i64) -> Result<Sheet> {
        let reach = q_reach.max(0) + n_max.max(0) + 3;
        let mut rows: Vec<(i64, Vec<BigInt>)> = Vec::new();
        for n in 0..=n_max.max(0) {
            let half = reach - n;
            let par = (parity + n).rem_euclid(2);
            let qmin = if (-half - par).rem_euclid(2) == 0 { -half } else { -half + 1 };
            let qmax = if (half - par).rem_euclid(2) == 0 { half } else { half - 1 };
            let len = ((qmax - qmin) / 2 + 1) as usize;
            let mut row = vec![BigInt::zero(); len];
            if n == 0 {
                for (k, slot) in row.iter_mut().enumerate() {
                    let q = qmin + 2 * k as i64;
                    let step = if par == 0 { q.div_euclid(2) } else { (q - 1).div_euclid(2) };
                    *slot = if step.rem_euclid(2) == 0 { BigInt::one() } else { -BigInt::one() };
                }
            } else {
                let get = |rows: &Vec<(i64, Vec<BigInt>)>, m: i64, q: i64| -> BigInt {
                    if m < 0 {
                        return BigInt::zero();
                    }
                    let (lo, r) = &rows[m as usize];
                    r[((q - lo) / 2) as usize].clone()
                };
                let pair_sum = |q: i64| -> BigInt { get(&rows, n - 1, q) * 4 - get(&rows, n - 2, q - 1) - get(&rows, n - 2, q + 1) };
                let at = |q: i64| ((q - qmin) / 2) as usize;
                let anchor = if par == 0 { 0 } else { 1 };
                row[at(anchor)] = match (par, policy) {
                    (0, _) | (_, FreeValuePolicy::Zero) => BigInt::zero(),
                    (_, FreeValuePolicy::Symmetric) => {
                        let s = pair_sum(0);
                        if s.is_odd() {
                            return Err(Error::NonInteger);
                        }
                        s / 2
                    }
                };
                let mut q = anchor + 2;
                while q <= qmax {
                    row[at(q)] = pair_sum(q - 1) - &row[at(q - 2)];
                    q += 2;
                }
                let mut q = anchor - 2;
                while q >= qmin {
                    row[at(q)] = pair_sum(q + 1) - &row[at(q + 2)];
                    q -= 2;
                }
            }
            rows.push((qmin, row));
        }
        Ok(Sheet { rows })
    }

    fn get(&self, n: i64, q: i64) -> BigInt {
        if n < 0 {
            return BigInt::zero();
        }
        let (lo, row) = &self.rows[n as usize];
        row[((q - lo) / 2) as usize].clone()
    }
}

/// Values at `points` of the plane harmonic function of the given family
/// whose defining diagonal has level `index`. The seed on the defining
/// diagonal alternates in ±1 and is +1 next to the orthogonal zero diagonal.
pub fn family_values(
    family: Family,
    index: i64,
    frame: &DiagonalFrame,
    policy: FreeValuePolicy,
    points: &[Vertex],
) -> Result<Vec<BigInt>> {
    let coords: Vec<(i64, i64)> = points.iter().map(|&v| frame.sheet_coords(family, index, v)).collect();
    let n_max = coords.iter().map(|c| c.0).max().unwrap_or(-1);
    if n_max < 0 {
        return Ok(vec![BigInt::zero(); points.len()]);
    }
    let q_reach = coords.iter().map(|c| c.1.abs()).max().unwrap_or(0);
    let sheet = Sheet::build(frame.seed_parity(index), policy, n_max, q_reach)?;
    Ok(coords.iter().map(|&(n, q)| sheet.get(n, q)).collect())
}

/// Diagonal family evaluated on a box. Harmonic at every interior box vertex.
pub fn diagonal_harmonic(
    family: Family,
    index: i64,
    rect: Rect,
    frame: &DiagonalFrame,
    policy: FreeValuePolicy,
) -> Result<HarmonicFunction> {
    let rect = Rect::new(rect.x0, rect.y0, rect.x1, rect.y1)?;
    let pts = rect.points();
    let vals = family_values(family, index, frame, policy, &pts)?;
    let mut it = vals.into_iter();
    Ok(HarmonicFunction::from_fn(rect, |_| BigRational::from_integer(it.next().unwrap())))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BasisStep {
    pub vertex: Vertex,
    pub family: Family,
    pub index: i64,
    /// Size of the grown domain after the step.
    pub grown: usize,
}

/// Integer-valued harmonic functions on a domain forming a basis of the
/// module of all of them.
#[derive(Clone, Debug)]
pub struct IntegerHarmonicBasis {
    domain: Domain,
    frame: DiagonalFrame,
    functions: Vec<Vec<BigInt>>,
    trace: Vec<BasisStep>,
}

impl IntegerHarmonicBasis {
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn frame(&self) -> DiagonalFrame {
        self.frame
    }

    /// Functions as value vectors indexed like the domain's vertices.
    pub fn functions(&self) -> &[Vec<BigInt>] {
        &self.functions
    }

    pub fn trace(&self) -> &[BasisStep] {
        &self.trace
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn trace_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.trace
                .iter()
                .map(|s| json!({"vertex": [s.vertex.0, s.vertex.1], "family": s.family.to_string(), "index": s.index, "grown": s.grown}))
                .collect(),
        )
    }

    /// Coordinates of an integer harmonic function in this basis.
    pub fn coordinates(&self, h: &[BigInt]) -> Result<Vec<BigRational>> {
        check_harmonic_int(&self.domain, h)?;
        let boundary = self.domain.boundary();
        let mut m = IntMatrix::zeros(boundary.len(), self.functions.len());
        for (j, f) in self.functions.iter().enumerate() {
            for (r, &i) in boundary.iter().enumerate() {
                m[(r, j)] = f[i].clone();
            }
        }
        let rhs: Vec<BigInt> = boundary.iter().map(|&i| h[i].clone()).collect();
        solve_exact(&m, &rhs)
    }
}

pub fn basis_algorithm(domain: &Domain) -> Result<IntegerHarmonicBasis> {
    basis_algorithm_with(domain, FreeValuePolicy::Zero)
}

/// Grow the domain one admissible vertex at a time, adding for each vertex
/// a diagonal family that vanishes on what has been grown so far.
///
/// Candidates are scanned lexicographically; vertices adjacent to the grown
/// set are preferred.
pub fn basis_algorithm_with(domain: &Domain, policy: FreeValuePolicy) -> Result<IntegerHarmonicBasis> {
    if !domain.is_convex_domain() {
        return Err(Error::NonConvex);
    }
    let frame = DiagonalFrame::centered_on(domain);
    let all = domain.points();
    let target_segments = domain.line_segments();
    let mut grown: BTreeSet<Vertex> = BTreeSet::new();
    let mut functions = Vec::new();
    let mut trace = Vec::new();
    while grown.len() < domain.len() {
        let admissible: Vec<Vertex> = domain
            .vertices()
            .iter()
            .copied()
            .filter(|v| !grown.contains(v))
            .filter(|&v| {
                let mut t = grown.clone();
                t.insert(v);
                is_convex_point_set(&t) && line_segments_of(&t).is_subset(&target_segments)
            })
            .collect();
        let adjacent = |&(x, y): &Vertex| NEIGHBOR_OFFSETS.iter().any(|(dx, dy)| grown.contains(&(x + dx, y + dy)));
        let v = admissible
            .iter()
            .copied()
            .find(adjacent)
            .or_else(|| admissible.first().copied())
            .ok_or_else(|| Error::Invariant("no admissible vertex".into()))?;
        let (i, j) = frame.locate(v);
        let mut chosen = None;
        for family in Family::ORDER {
            let index = if family.diagonal == Diagonal::Plus { i } else { j };
            let vals = family_values(family, index, &frame, policy, domain.vertices())?;
            if grown.iter().all(|&w| vals[domain.index_of(w).unwrap()].is_zero()) {
                chosen = Some((family, index, vals));
                break;
            }
        }
        let (family, index, vals) =
            chosen.ok_or_else(|| Error::Invariant(format!("no diagonal family vanishes before {v:?}")))?;
        functions.push(vals);
        grown.insert(v);
        grown = diamond_closure(&grown).intersection(&all).copied().collect();
        trace.push(BasisStep { vertex: v, family, index, grown: grown.len() });
    }
    if functions.len() != domain.boundary().len() {
        return Err(Error::Invariant(format!(
            "basis has {} functions but the boundary has {} vertices",
            functions.len(),
            domain.boundary().len()
        )));
    }
    Ok(IntegerHarmonicBasis { domain: domain.clone(), frame, functions, trace })
}

/// Boundary Laplacians of a basis: column `i` is `Δ_Γ B_i` on the boundary
/// vertices (in domain order).
#[derive(Clone, Debug)]
pub struct PotentialMatrix {
    pub boundary: Vec<usize>,
    pub matrix: IntMatrix,
}

impl PotentialMatrix {
    pub fn det(&self) -> BigInt {
        det_exact(&self.matrix)
    }
}

pub fn potential_matrix(basis: &IntegerHarmonicBasis) -> Result<PotentialMatrix> {
    let d = &basis.domain;
    let boundary = d.boundary();
    let mut m = IntMatrix::zeros(boundary.len(), basis.functions.len());
    for (j, f) in basis.functions.iter().enumerate() {
        let lap = d.laplacian_int(f);
        for (r, &i) in boundary.iter().enumerate() {
            m[(r, j)] = lap[i].clone();
        }
    }
    if !m.is_square() || det_exact(&m).is_zero() {
        return Err(Error::Singular);
    }
    Ok(PotentialMatrix { boundary, matrix: m })
}

/// Group order as `|det|` of the potential matrix of the constructed basis.
pub fn order_via_basis(domain: &Domain) -> Result<BigInt> {
    Ok(potential_matrix(&basis_algorithm(domain)?)?.det().abs())
}

/// Chip vector class-equivalent to `x` and supported on the boundary.
pub fn boundary_support_rep(domain: &Domain, x: &[BigInt]) -> Result<Vec<BigInt>> {
    if x.len() != domain.len() {
        return Err(Error::DomainMismatch);
    }
    let interior = domain.interior();
    if interior.is_empty() {
        return Ok(x.to_vec());
    }
    let lap = domain.reduced_laplacian();
    let a = lap.select_rows(&interior);
    let b: Vec<BigInt> = interior.iter().map(|&i| -&x[i]).collect();
    let z = lattice_solve(&a, &b).ok_or_else(|| Error::NoIntegerSolution("interior rows of the Laplacian".into()))?;
    let shift = lap.mul_vec(&z);
    let out: Vec<BigInt> = x.iter().zip(&shift).map(|(a, b)| a + b).collect();
    if interior.iter().any(|&i| !out[i].is_zero()) {
        return Err(Error::Invariant("boundary representative has interior support".into()));
    }
    Ok(out)
}

/// Boundary coordinates of sandpile classes: `σ`, its inverse `φ` and the
/// floor map, all relative to one integer basis.
#[derive(Clone, Debug)]
pub struct ToppingInvariants {
    basis: IntegerHarmonicBasis,
    potential: PotentialMatrix,
    inverse: Vec<Vec<BigRational>>,
}

impl ToppingInvariants {
    pub fn new(basis: IntegerHarmonicBasis) -> Result<Self> {
        let potential = potential_matrix(&basis)?;
        let inverse = crate::algebra::inverse(&potential.matrix)?;
        Ok(ToppingInvariants { basis, potential, inverse })
    }

    pub fn for_domain(domain: &Domain) -> Result<Self> {
        Self::new(basis_algorithm(domain)?)
    }

    pub fn basis(&self) -> &IntegerHarmonicBasis {
        &self.basis
    }

    pub fn potential(&self) -> &PotentialMatrix {
        &self.potential
    }

    pub fn domain(&self) -> &Domain {
        &self.basis.domain
    }

    /// `-P^{-1} x'|_∂ mod 1` for a boundary-supported representative `x'`.
    pub fn sigma(&self, x: &[BigInt]) -> Result<Vec<BigRational>> {
        let xb = boundary_support_rep(self.domain(), x)?;
        let rhs: Vec<BigInt> = self.potential.boundary.iter().map(|&i| xb[i].clone()).collect();
        Ok(self
            .inverse
            .iter()
            .map(|row| {
                let mut acc = BigRational::zero();
                for (a, b) in row.iter().zip(&rhs) {
                    acc += a * BigRational::from_integer(b.clone());
                }
                frac(&-acc)
            })
            .collect())
    }

    /// `Σ s_i B_i` on the domain.
    pub fn phi(&self, s: &[BigRational]) -> Vec<BigRational> {
        let n = self.domain().len();
        let mut out = vec![BigRational::zero(); n];
        for (si, f) in s.iter().zip(&self.basis.functions) {
            if si.is_zero() {
                continue;
            }
            for (o, v) in out.iter_mut().zip(f) {
                *o += si * BigRational::from_integer(v.clone());
            }
        }
        out
    }

    /// `-[⌊Δ_Γ φ(s)⌋]`.
    pub fn floor_map(&self, s: &[BigRational]) -> Result<GroupElement> {
        let lap = self.domain().laplacian_rational(&self.phi(s));
        let x: Vec<BigInt> = lap.iter().map(|q| -floor_rational(q)).collect();
        canonical_rep_big(self.domain(), &x)
    }

    /// Every `s` in `[0,1)^∂` with `P s` integral, via the Smith form of `P`.
    /// Returns `None` if there are more than `limit` of them.
    pub fn integral_torus_points(&self, limit: usize) -> Option<Vec<Vec<BigRational>>> {
        let snf = smith_normal_form(&self.potential.matrix);
        let d: Vec<BigInt> = snf.diagonal().into_iter().map(|x| x.abs()).collect();
        let total: BigInt = d.iter().product();
        if total > BigInt::from(limit) {
            return None;
        }
        let k = d.len();
        let mut out = Vec::new();
        let mut t = vec![BigInt::zero(); k];
        loop {
            let w: Vec<BigRational> = t.iter().zip(&d).map(|(ti, di)| BigRational::new(ti.clone(), di.clone())).collect();
            let s: Vec<BigRational> = snf.v.mul_rational_vec(&w).iter().map(frac).collect();
            out.push(s);
            let mut pos = 0;
            loop {
                if pos == k {
                    return Some(out);
                }
                t[pos] += 1;
                if t[pos] < d[pos] {
                    break;
                }
                t[pos] = BigInt::zero();
                pos += 1;
            }
        }
    }
}

pub fn sigma(x: &[BigInt], basis: &IntegerHarmonicBasis) -> Result<Vec<BigRational>> {
    ToppingInvariants::new(basis.clone())?.sigma(x)
}

pub fn phi(s: &[BigRational], basis: &IntegerHarmonicBasis) -> Result<Vec<BigRational>> {
    Ok(ToppingInvariants::new(basis.clone())?.phi(s))
}

pub fn floor_map(s: &[BigRational], basis: &IntegerHarmonicBasis) -> Result<GroupElement> {
    ToppingInvariants::new(basis.clone())?.floor_map(s)
}

/// `[⌊t Δ_Γ Ĥ⌋]` for an integer function `Ĥ` harmonic on the domain.
pub fn harmonic_dynamics(domain: &Domain, h: &[BigInt], t: &BigRational) -> Result<GroupElement> {
    let lap = check_harmonic_int(domain, h)?;
    let x: Vec<BigInt> = lap.into_iter().map(|l| floor_rational(&(t * BigRational::from_integer(l)))).collect();
    canonical_rep_big(domain, &x)
}

/// Whether `⌊t Δ_Γ Ĥ⌋ = t Δ_Γ Ĥ`, i.e. the floor does nothing at time `t`.
pub fn dynamics_is_exact(domain: &Domain, h: &[BigInt], t: &BigRational) -> bool {
    domain.laplacian_int(h).into_iter().all(|l| (t * BigRational::from_integer(l)).is_integer())
}

#[derive(Clone, Debug)]
pub struct CyclicSubgroup {
    pub generator: GroupElement,
    pub order: BigInt,
    /// Whether the values of `H` on the domain have gcd one.
    pub coprime: bool,
}

impl CyclicSubgroup {
    /// `0, C, 2C, ...` up to the order.
    pub fn elements(&self, domain: &Domain) -> Result<Vec<GroupElement>> {
        let mut out = vec![identity(domain)];
        let mut k = BigInt::one();
        while k < self.order {
            let next = group_add(domain, out.last().unwrap(), &self.generator)?;
            out.push(next);
            k += 1;
        }
        Ok(out)
    }
}

/// Generator `[-(1/n) Δ_Γ(H|_Γ)]` of the cyclic subgroup induced by a
/// harmonic `H` whose values next to the domain are divisible by `n`.
pub fn cyclic_subgroup_from_harmonic(h: &HarmonicFunction, domain: &Domain, n: u64) -> Result<CyclicSubgroup> {
    if n < 2 {
        return Err(Error::InvalidArgument("n must be at least 2".into()));
    }
    let nn = BigInt::from(n);
    h.check_harmonic_at(domain.vertices())?;
    for w in domain.outer_boundary() {
        let v = h.get(w).ok_or_else(|| Error::BoxTooSmall(format!("{w:?} not covered")))?;
        if !v.is_integer() || !(v.to_integer() % &nn).is_zero() {
            return Err(Error::Divisibility(w));
        }
    }
    let vals = h.restrict_int(domain)?;
    let lap = domain.laplacian_int(&vals);
    let mut g = Vec::with_capacity(lap.len());
    for (i, l) in lap.into_iter().enumerate() {
        let (q, r) = l.div_rem(&nn);
        if !r.is_zero() {
            return Err(Error::Divisibility(domain.vertex(i)));
        }
        g.push(-q);
    }
    let generator = canonical_rep_big(domain, &g)?;
    let order = element_order(domain, &generator)?;
    let gcd = vals.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    let coprime = gcd.is_one();
    if coprime && order != nn {
        return Err(Error::Invariant(format!("generator has order {order}, expected {n}")));
    }
    Ok(CyclicSubgroup { generator, order, coprime })
}

/// `H = xy` on the box of the centered odd square of side `n` plus its
/// outer boundary.
pub fn h_xy(n: i64) -> Result<HarmonicFunction> {
    if n < 1 || n % 2 == 0 {
        return Err(Error::InvalidArgument(format!("side {n} must be odd and positive")));
    }
    let r = n / 2 + 1;
    Ok(HarmonicFunction::from_fn(Rect { x0: -r, y0: -r, x1: r, y1: r }, |(x, y)| rat(x * y)))
}

/// Alternating sum over odd `k` of the four diagonal families of index
/// `±k`, symmetric free values, evaluated at `points`.
fn h_pi_values(frame: &DiagonalFrame, points: &[Vertex]) -> Result<Vec<BigInt>> {
    let reach = points
        .iter()
        .map(|&v| {
            let (a, b) = frame.locate(v);
            a.abs().max(b.abs())
        })
        .max()
        .unwrap_or(0);
    let mut out = vec![BigInt::zero(); points.len()];
    let mut k = 1;
    let mut sign = BigInt::one();
    while k <= reach {
        let terms = [
            (Family::PLUS_GEQ, k, 1),
            (Family::PLUS_LEQ, -k, 1),
            (Family::MINUS_GEQ, k, -1),
            (Family::MINUS_LEQ, -k, -1),
        ];
        for (family, index, s) in terms {
            let vals = family_values(family, index, frame, FreeValuePolicy::Symmetric, points)?;
            for (o, v) in out.iter_mut().zip(vals) {
                *o += &sign * s * v;
            }
        }
        sign = -sign;
        k += 2;
    }
    Ok(out)
}

/// The prime-related harmonic function on the even `n x n` square
/// `{0..n-1}^2`, on the box including its outer boundary.
pub fn h_pi(n: i64) -> Result<HarmonicFunction> {
    if n < 2 || n % 2 != 0 {
        return Err(Error::InvalidArgument(format!("side {n} must be even and positive")));
    }
    let frame = DiagonalFrame::new(n - 1, 0);
    let rect = Rect { x0: -1, y0: -1, x1: n, y1: n };
    let pts = rect.points();
    let vals = h_pi_values(&frame, &pts)?;
    let mut it = vals.into_iter();
    Ok(HarmonicFunction::from_fn(rect, |_| BigRational::from_integer(it.next().unwrap())))
}

/// `H+` in wedge coordinates: `x = a + b`, `y = a - b` with `a`, `b` the
/// levels of the two zero diagonals crossing at a square center.
pub struct HPlus {
    sheet: Sheet,
}

impl HPlus {
    /// Table covering `|x| <= x_max + 4` and `|y| <= x_max + 4`.
    pub fn new(x_max: i64) -> Result<HPlus> {
        let r = x_max.abs() + 6;
        Ok(HPlus { sheet: Sheet::build(0, FreeValuePolicy::Symmetric, r, r)? })
    }

    /// Value at odd `(x, y)`.
    pub fn at(&self, x: i64, y: i64) -> BigInt {
        assert!((x + y) % 2 == 0, "x and y must have equal parity");
        let (a, b) = ((x + y) / 2, (x - y) / 2);
        let mut acc = BigInt::zero();
        let mut k = 1;
        let mut positive = true;
        while k <= a {
            let v = self.sheet.get(a - k, b);
            if positive {
                acc += v;
            } else {
                acc -= v;
            }
            positive = !positive;
            k += 2;
        }
        acc
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HPlusCheck {
    pub holds: bool,
    pub identity_checks: usize,
    pub epsilon_checks: usize,
    pub counterexample: Option<String>,
}

/// Check `(x-y) H+(x,y) = -(x+y) H+(x,-y)` for odd `x <= x_max` and odd
/// `|y| <= x`, and that the correction term `ε(x, y)` vanishes wherever its
/// denominators are nonzero.
pub fn verify_hplus_identity(x_max: i64) -> Result<HPlusCheck> {
    if x_max < 3 || x_max % 2 == 0 {
        return Err(Error::InvalidArgument(format!("x_max = {x_max} must be odd and at least 3")));
    }
    let hp = HPlus::new(x_max)?;
    let h = |x: i64, y: i64| rat(hp.at(x, y));
    let mut report = HPlusCheck { holds: true, identity_checks: 0, epsilon_checks: 0, counterexample: None };
    for x in (1..=x_max).step_by(2) {
        for y in (-x..=x).step_by(2) {
            report.identity_checks += 1;
            let lhs = rat(x - y) * h(x, y);
            let rhs = -rat(x + y) * h(x, -y);
            if lhs != rhs {
                report.holds = false;
                report.counterexample = Some(format!("identity fails at ({x}, {y}): {lhs} != {rhs}"));
                return Ok(report);
            }
            if x + y == 0 || x + y - 2 == 0 {
                continue;
            }
            report.epsilon_checks += 1;
            let eps = rat(4 * y) / rat(x + y) * h(x, y) + rat(x - y + 2) / rat(x + y - 2) * h(x, y - 2)
                - h(x, y + 2)
                - rat(2 * y) / rat(x + y - 2) * h(x - 2, y);
            if !eps.is_zero() {
                report.holds = false;
                report.counterexample = Some(format!("epsilon({x}, {y}) = {eps}"));
                return Ok(report);
            }
        }
    }
    Ok(report)
}

/// Diamond-shaped function `H⋄_i` on the `n x n` square `{0..n-1}^2`, on
/// the box including its outer boundary. The signs of the three partner
/// families are chosen so that all outer boundary values are divisible by 4.
pub fn h_diamond(n: i64, i: i64) -> Result<HarmonicFunction> {
    if n < 1 {
        return Err(Error::InvalidArgument(format!("side {n} must be positive")));
    }
    if !(1..=n).contains(&i) {
        return Err(Error::IndexOutOfRange(format!("diamond index {i} not in 1..={n}")));
    }
    let frame = DiagonalFrame::new(n - 1, 0);
    let rect = Rect { x0: -1, y0: -1, x1: n, y1: n };
    let pts = rect.points();
    let parts = [
        family_values(Family::PLUS_GEQ, i, &frame, FreeValuePolicy::Zero, &pts)?,
        family_values(Family::MINUS_GEQ, n - i + 1, &frame, FreeValuePolicy::Zero, &pts)?,
        family_values(Family::PLUS_LEQ, -i, &frame, FreeValuePolicy::Zero, &pts)?,
        family_values(Family::MINUS_LEQ, -n + i - 1, &frame, FreeValuePolicy::Zero, &pts)?,
    ];
    let domain = Domain::square(n)?;
    let outer: Vec<usize> = domain.outer_boundary().into_iter().map(|w| rect.offset(w).unwrap()).collect();
    for mask in 0..8u8 {
        let signs = [1i64, sign_bit(mask, 0), sign_bit(mask, 1), sign_bit(mask, 2)];
        let total: Vec<BigInt> =
            (0..pts.len()).map(|p| (0..4).map(|f| &parts[f][p] * signs[f]).sum::<BigInt>()).collect();
        if outer.iter().all(|&p| (&total[p] % BigInt::from(4)).is_zero()) {
            let mut it = total.into_iter();
            return Ok(HarmonicFunction::from_fn(rect, |_| BigRational::from_integer(it.next().unwrap())));
        }
    }
    Err(Error::Invariant(format!("no sign choice makes H⋄_{i} divisible by 4 on the boundary")))
}

fn sign_bit(mask: u8, bit: u8) -> i64 {
    if mask >> bit & 1 == 1 {
        -1
    } else {
        1
    }
}

/// Harmonic functions behind the order-4 generators on `{0..n-1}^2`:
/// the `n` diamonds for even `n`; diamonds `2..=n` plus the `d+_0` family
/// for odd `n`.
pub fn div4_harmonics(n: i64) -> Result<Vec<HarmonicFunction>> {
    let mut out = Vec::new();
    if n % 2 == 0 {
        for i in 1..=n {
            out.push(h_diamond(n, i)?);
        }
    } else {
        let frame = DiagonalFrame::new(n - 1, 0);
        let rect = Rect { x0: -1, y0: -1, x1: n, y1: n };
        out.push(diagonal_harmonic(Family::PLUS_GEQ, 0, rect, &frame, FreeValuePolicy::Zero)?);
        for i in 2..=n {
            out.push(h_diamond(n, i)?);
        }
    }
    Ok(out)
}

/// Chip vectors `-(1/4) Δ_Γ(H|_Γ)` for the functions of [`div4_harmonics`].
pub fn div4_generators(n: i64) -> Result<Vec<Vec<BigInt>>> {
    let domain = Domain::square(n)?;
    div4_harmonics(n)?
        .iter()
        .map(|h| {
            let vals = h.restrict_int(&domain)?;
            domain
                .laplacian_int(&vals)
                .into_iter()
                .enumerate()
                .map(|(i, l)| {
                    let (q, r) = l.div_rem(&BigInt::from(4));
                    if r.is_zero() {
                        Ok(-q)
                    } else {
                        Err(Error::Divisibility(domain.vertex(i)))
                    }
                })
                .collect()
        })
        .collect()
}

/// Order of the subgroup of the sandpile group generated by the classes of
/// the given chip vectors: `|det Δ| / |coker [Δ | g_1 ... g_k]|`.
pub fn generated_subgroup_order(domain: &Domain, generators: &[Vec<BigInt>]) -> BigInt {
    let mut g = IntMatrix::zeros(domain.len(), generators.len());
    for (j, col) in generators.iter().enumerate() {
        for i in 0..domain.len() {
            g[(i, j)] = col[i].clone();
        }
    }
    subgroup_order_in_cokernel(&domain.reduced_laplacian(), &g).expect("reduced Laplacian is nonsingular")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Div4Check {
    pub order: BigInt,
    pub expected: BigInt,
    pub generators: usize,
}

impl Div4Check {
    pub fn holds(&self) -> bool {
        self.order == self.expected
    }
}

/// Compare the order of the subgroup generated by the order-4 generators
/// with `4^n`.
pub fn verify_div4_subgroup(n: i64) -> Result<Div4Check> {
    let domain = Domain::square(n)?;
    let gens = div4_generators(n)?;
    Ok(Div4Check {
        order: generated_subgroup_order(&domain, &gens),
        expected: BigInt::from(4).pow(n as u32),
        generators: gens.len(),
    })
}

/// Exact inverse property `-Δ φ(σ(x)) ≡ x`, used by tests and the CLI.
pub fn sigma_roundtrip(inv: &ToppingInvariants, x: &[BigInt]) -> Result<bool> {
    let s = inv.sigma(x)?;
    let lap = inv.domain().laplacian_rational(&inv.phi(&s));
    let back = to_integer_values(&lap.iter().map(|q| -q).collect::<Vec<_>>())?;
    Ok(canonical_rep_big(inv.domain(), &back)? == canonical_rep_big(inv.domain(), x)?)
}

/// Solve `Δ_Γ X = -rhs` for many right-hand sides at once.
pub fn dirichlet_solve_many(domain: &Domain, rhs: &[Vec<BigInt>]) -> Result<Vec<Vec<BigRational>>> {
    let r = rhs.iter().map(|x| x.iter().map(|v| BigRational::from_integer(-v)).collect()).collect();
    solve_many(&domain.reduced_laplacian(), r)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn dirichlet_single_vertex() {
        let d = Domain::square(1).unwrap();
        assert_eq!(dirichlet_solve(&d, &ints(&[1])), vec![BigRational::new(1.into(), 4.into())]);
        assert_eq!(dirichlet_solve(&d, &ints(&[0])), vec![BigRational::zero()]);
    }

    #[test]
    fn family_seed_and_vanishing_side() {
        let frame = DiagonalFrame::new(0, 0);
        let rect = Rect::new(-6, -6, 6, 6).unwrap();
        let h = diagonal_harmonic(Family::PLUS_GEQ, 0, rect, &frame, FreeValuePolicy::Zero).unwrap();
        assert_eq!(h.get((0, 0)).unwrap(), &rat(1));
        assert_eq!(h.get((1, -1)).unwrap(), &rat(-1));
        assert_eq!(h.get((-1, 1)).unwrap(), &rat(-1));
        assert_eq!(h.get((2, -2)).unwrap(), &rat(1));
        for v in rect.points() {
            let a = v.0 + v.1;
            let val = h.get(v).unwrap();
            if a < 0 {
                assert!(val.is_zero());
            } else if a > 0 {
                assert!((val.to_integer() % BigInt::from(4)).is_zero(), "{v:?} -> {val}");
            }
        }
        let inner: Vec<Vertex> = Rect::new(-5, -5, 5, 5).unwrap().points();
        h.check_harmonic_at(&inner).unwrap();
    }

    #[test]
    fn every_family_is_harmonic() {
        let frame = DiagonalFrame::new(3, 0);
        let rect = Rect::new(-3, -3, 7, 7).unwrap();
        let inner = Rect::new(-2, -2, 6, 6).unwrap().points();
        for policy in [FreeValuePolicy::Zero, FreeValuePolicy::Symmetric] {
            for family in Family::ORDER {
                for index in -4..=4 {
                    let h = diagonal_harmonic(family, index, rect, &frame, policy).unwrap();
                    h.check_harmonic_at(&inner).unwrap();
                }
            }
        }
    }

    #[test]
    fn symmetric_policy_is_symmetric() {
        let frame = DiagonalFrame::new(1, 0);
        let rect = Rect::new(-6, -6, 8, 8).unwrap();
        let h = diagonal_harmonic(Family::PLUS_GEQ, 1, rect, &frame, FreeValuePolicy::Symmetric).unwrap();
        for (x, y) in Rect::new(-5, -5, 7, 7).unwrap().points() {
            assert_eq!(h.get((x, y)), h.get((y, x)));
        }
    }

    #[test]
    fn small_bases() {
        let one = Domain::square(1).unwrap();
        let b = basis_algorithm(&one).unwrap();
        assert_eq!(b.len(), 1);
        assert!(b.functions()[0][0].abs().is_one());
        assert_eq!(potential_matrix(&b).unwrap().det().abs(), BigInt::from(4));
        let four = Domain::square(4).unwrap();
        assert_eq!(basis_algorithm(&four).unwrap().len(), 12);
        assert_eq!(order_via_basis(&Domain::square(3).unwrap()).unwrap(), BigInt::from(100352));
    }

    #[test]
    fn non_convex_rejected() {
        let l = Domain::from_points([(0, 0), (1, 0), (2, 0), (0, 1), (2, 1)]).unwrap();
        assert!(matches!(basis_algorithm(&l), Err(Error::NonConvex)));
    }

    #[test]
    fn boundary_rep_of_center_chip() {
        let d = Domain::square(3).unwrap();
        let mut x = vec![BigInt::zero(); 9];
        x[4] = BigInt::one();
        let xb = boundary_support_rep(&d, &x).unwrap();
        assert!(xb[4].is_zero());
        assert_eq!(canonical_rep_big(&d, &xb).unwrap(), canonical_rep_big(&d, &x).unwrap());
    }

    #[test]
    fn sigma_on_single_vertex() {
        let inv = ToppingInvariants::for_domain(&Domain::square(1).unwrap()).unwrap();
        assert_eq!(inv.sigma(&ints(&[1])).unwrap(), vec![BigRational::new(1.into(), 4.into())]);
        assert_eq!(inv.sigma(&ints(&[0])).unwrap(), vec![BigRational::zero()]);
    }

    #[test]
    fn xy_extends_to_diamond() {
        let d = Domain::centered_square(3).unwrap();
        let vals: Vec<BigRational> = d.vertices().iter().map(|&(x, y)| rat(x * y)).collect();
        let ext = extend_to_diamond_hull(&d, &vals).unwrap();
        let support = ext.support();
        assert_eq!(support.len(), 13);
        for (x, y) in support {
            assert_eq!(ext.get((x, y)).unwrap(), &rat(x * y));
        }
    }

    #[test]
    fn hplus_edge_values() {
        let hp = HPlus::new(15).unwrap();
        for x in (3..=15).step_by(2) {
            assert_eq!(hp.at(x, x).abs(), BigInt::one());
            assert!(hp.at(x, -x).is_zero());
            assert_eq!(hp.at(x, x - 2).abs(), BigInt::from(x - 1));
            assert_eq!(hp.at(x, -x + 2).abs(), BigInt::one());
        }
        for x in (5..=15).step_by(2) {
            assert_eq!(hp.at(x, x - 4).abs(), BigInt::from((x - 2) * (x - 2)));
            assert_eq!(hp.at(x, -x + 4).abs(), BigInt::from(2 * x - 4));
        }
    }

    #[test]
    fn hplus_identity_small() {
        let r = verify_hplus_identity(7).unwrap();
        assert!(r.holds, "{:?}", r.counterexample);
    }

    #[test]
    fn diamond_shape() {
        for n in 2..=5 {
            for i in 1..=n {
                let h = h_diamond(n, i).unwrap();
                h.check_harmonic_at(&Rect::new(0, 0, n - 1, n - 1).unwrap().points()).unwrap();
            }
        }
        assert!(matches!(h_diamond(3, 4), Err(Error::IndexOutOfRange(_))));
    }

    #[test]
    fn json_roundtrip() {
        let h = h_xy(3).unwrap();
        let back = HarmonicFunction::from_json(&h.to_json()).unwrap();
        assert_eq!(back, h);
    }
}
