//! Sandpile group maps induced by DC-tilings.
//!
//! A tiling `T` of `P_B` by `P_A` yields `μ(T) = Δ_B ∘ paste ∘ Δ_A^{-1}`.
//! By the balance condition at internal-boundary vertices this matrix equals
//! the signed copy `Σ s_i ψ_i`, so it is integral.

use std::collections::{BTreeSet, HashSet, VecDeque};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::algebra::{inverse, lattice_solve, solve_exact, subgroup_order_in_cokernel, IntMatrix};
use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::harmonic::{boundary_support_rep, check_harmonic_on_domain, dirichlet_solve, HarmonicFunction};
use crate::sandpile::{canonical_rep, canonical_rep_big, group_add, group_order, identity, ChipConfig, GroupElement};
use crate::tiling::{compose_tilings, internal_boundaries, vertex_maps, DCTiling, TilingCertificate};

/// Domains up to this size get exact determinant and Smith-form checks.
pub const EXACT_LIMIT: usize = 200;
/// Source groups up to this order may be enumerated for kernel checks.
pub const ENUMERATION_LIMIT: u64 = 4096;

/// An integral map `Z^{Γ_A} -> Z^{Γ_B}` meant to descend to `G_A -> G_B`.
#[derive(Clone, Debug)]
pub struct GroupMap {
    source: Domain,
    target: Domain,
    matrix: IntMatrix,
    tiling: Option<DCTiling>,
}

impl GroupMap {
    pub fn new(source: Domain, target: Domain, matrix: IntMatrix, tiling: Option<DCTiling>) -> Result<Self> {
        if matrix.rows() != target.len() || matrix.cols() != source.len() {
            return Err(Error::Dimension(format!(
                "{}x{} matrix for {} -> {} vertices",
                matrix.rows(),
                matrix.cols(),
                source.len(),
                target.len()
            )));
        }
        Ok(GroupMap { source, target, matrix, tiling })
    }

    pub fn identity(domain: &Domain) -> Self {
        GroupMap {
            source: domain.clone(),
            target: domain.clone(),
            matrix: IntMatrix::identity(domain.len()),
            tiling: None,
        }
    }

    pub fn source(&self) -> &Domain {
        &self.source
    }

    pub fn target(&self) -> &Domain {
        &self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    pub fn tiling(&self) -> Option<&DCTiling> {
        self.tiling.as_ref()
    }

    pub fn apply_vec(&self, x: &[BigInt]) -> Vec<BigInt> {
        self.matrix.mul_vec(x)
    }

    pub fn apply(&self, a: &GroupElement) -> Result<GroupElement> {
        if a.rep().len() != self.source.len() {
            return Err(Error::DomainMismatch);
        }
        canonical_rep_big(&self.target, &self.apply_vec(&a.rep().to_big()))
    }

    /// Images of the unit vectors; two maps agree on the group exactly when
    /// these coincide.
    pub fn unit_images(&self) -> Result<Vec<GroupElement>> {
        (0..self.source.len())
            .map(|v| canonical_rep_big(&self.target, &self.matrix.column(v)))
            .collect()
    }
}

fn tile_signs(t: &DCTiling) -> Vec<i8> {
    t.placements().iter().map(|p| p.sign).collect()
}

fn paste_with(maps: &[Vec<usize>], signs: &[i8], n_target: usize, h: &[BigRational]) -> Vec<BigRational> {
    let mut out = vec![BigRational::zero(); n_target];
    for (map, &s) in maps.iter().zip(signs) {
        for (va, &vb) in map.iter().enumerate() {
            out[vb] = if s < 0 { -h[va].clone() } else { h[va].clone() };
        }
    }
    out
}

/// `Ĥ_B`: signed copies of `h` on every tile domain, zero on the internal
/// boundary. Values are indexed by the target domain.
pub fn copy_paste(t: &DCTiling, h: &[BigRational]) -> Result<Vec<BigRational>> {
    copy_paste_with_signs(t, h, &tile_signs(t))
}

pub fn copy_paste_with_signs(t: &DCTiling, h: &[BigRational], signs: &[i8]) -> Result<Vec<BigRational>> {
    let a = t.source_domain()?;
    if h.len() != a.len() {
        return Err(Error::DomainMismatch);
    }
    if signs.len() != t.len() {
        return Err(Error::Dimension(format!("{} signs for {} tiles", signs.len(), t.len())));
    }
    let valid = t.validate();
    if !valid.valid {
        return Err(Error::InvalidTiling(valid.diagnostics.join("; ")));
    }
    let b = t.target_domain()?;
    Ok(paste_with(&vertex_maps(t)?, signs, b.len(), h))
}

/// [`copy_paste`] on function objects.
pub fn copy_paste_function(t: &DCTiling, h: &HarmonicFunction) -> Result<HarmonicFunction> {
    let a = t.source_domain()?;
    let values = copy_paste(t, &h.restrict(&a)?)?;
    Ok(HarmonicFunction::from_domain(&t.target_domain()?, &values))
}

/// `μ(T)(a)`: lift to a boundary-supported chip vector, solve the Dirichlet
/// problem on `Γ_A`, paste, and take the class of `-Δ_B Ĥ_B`.
pub fn mu_apply(t: &DCTiling, a: &GroupElement) -> Result<GroupElement> {
    let src = t.source_domain()?;
    let dst = t.target_domain()?;
    let x = boundary_support_rep(&src, &a.rep().to_big())?;
    let h_a = dirichlet_solve(&src, &x);
    let h_b = copy_paste(t, &h_a)?;
    let lap = dst.laplacian_rational(&h_b);
    let chips = lap
        .iter()
        .map(|q| if q.is_integer() { Ok(-q.to_integer()) } else { Err(Error::Integrality("Laplacian of the pasted function".into())) })
        .collect::<Result<Vec<BigInt>>>()?;
    canonical_rep_big(&dst, &chips)
}

/// `L = Δ_B ∘ paste ∘ Δ_A^{-1}` as an explicit matrix, checked to be integral.
pub fn mu_matrix(t: &DCTiling) -> Result<GroupMap> {
    let src = t.source_domain()?;
    let dst = t.target_domain()?;
    let inv = inverse(&src.reduced_laplacian())?;
    let valid = t.validate();
    if !valid.valid {
        return Err(Error::InvalidTiling(valid.diagnostics.join("; ")));
    }
    let maps = vertex_maps(t)?;
    let signs = tile_signs(t);
    let mut m = IntMatrix::zeros(dst.len(), src.len());
    // The Laplacian is symmetric, so row v of the inverse is column v.
    for (v, col) in inv.iter().enumerate() {
        let pasted = paste_with(&maps, &signs, dst.len(), col);
        for (r, q) in dst.laplacian_rational(&pasted).into_iter().enumerate() {
            if !q.is_integer() {
                return Err(Error::Integrality(format!("image of unit vector {v} at {:?} is {q}", dst.vertex(r))));
            }
            m[(r, v)] = q.to_integer();
        }
    }
    let map = GroupMap::new(src, dst, m, Some(t.clone()))?;
    if !well_defined(&map)? {
        return Err(Error::Invariant("map does not preserve the Laplacian lattice".into()));
    }
    Ok(map)
}

/// `Σ s_i ψ_i` for arbitrary signs. With the tiling's own signs this equals
/// [`mu_matrix`]; with other signs it is a negative control.
pub fn signed_copy_matrix(t: &DCTiling, signs: &[i8]) -> Result<GroupMap> {
    if signs.len() != t.len() {
        return Err(Error::Dimension(format!("{} signs for {} tiles", signs.len(), t.len())));
    }
    let src = t.source_domain()?;
    let dst = t.target_domain()?;
    let mut m = IntMatrix::zeros(dst.len(), src.len());
    for (map, &s) in vertex_maps(t)?.iter().zip(signs) {
        for (va, &vb) in map.iter().enumerate() {
            m[(vb, va)] += BigInt::from(s);
        }
    }
    GroupMap::new(src, dst, m, Some(t.clone()))
}

/// Whether `m` maps `Δ_A Z^{Γ_A}` into `Δ_B Z^{Γ_B}`.
///
/// When `m` carries a tiling, the pasted unit vector is tried first as an
/// explicit witness `z` with `Δ_B z = L Δ_A e_v`; otherwise membership is
/// decided exactly (small targets) or with the stabilization engine.
pub fn well_defined(m: &GroupMap) -> Result<bool> {
    let lap_a = m.source.reduced_laplacian();
    let lap_b = m.target.reduced_laplacian();
    let witness = match &m.tiling {
        Some(t) => Some((vertex_maps(t)?, tile_signs(t))),
        None => None,
    };
    for v in 0..m.source.len() {
        let y = m.matrix.mul_vec(&lap_a.column(v));
        if let Some((maps, signs)) = &witness {
            let mut z = vec![BigInt::zero(); m.target.len()];
            for (map, &s) in maps.iter().zip(signs) {
                z[map[v]] += BigInt::from(s);
            }
            if m.target.laplacian_int(&z) == y {
                continue;
            }
        }
        if !in_laplacian_lattice(&m.target, &lap_b, &y)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn in_laplacian_lattice(domain: &Domain, lap: &IntMatrix, y: &[BigInt]) -> Result<bool> {
    if domain.len() <= EXACT_LIMIT {
        Ok(solve_exact(lap, y)?.iter().all(|q| q.is_integer()))
    } else {
        Ok(canonical_rep_big(domain, y)? == identity(domain))
    }
}

/// All elements of `G_Γ`, by closing `{e}` under adding unit vectors.
pub fn enumerate_group(domain: &Domain, limit: u64) -> Result<Vec<GroupElement>> {
    let e = identity(domain);
    let mut seen: HashSet<GroupElement> = HashSet::from([e.clone()]);
    let mut order = vec![e.clone()];
    let mut queue = VecDeque::from([e]);
    while let Some(g) = queue.pop_front() {
        for v in 0..domain.len() {
            let mut c = g.rep().clone();
            c.0[v] += 1;
            let h = canonical_rep(domain, &c)?;
            if seen.insert(h.clone()) {
                if seen.len() as u64 > limit {
                    return Err(Error::TooLarge(format!("group has more than {limit} elements")));
                }
                order.push(h.clone());
                queue.push_back(h);
            }
        }
    }
    Ok(order)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomorphismReport {
    pub source_order: Option<BigInt>,
    pub target_order: Option<BigInt>,
    pub image_order: Option<BigInt>,
    pub injective: Option<bool>,
    pub well_defined: bool,
    pub homomorphism_samples: usize,
    pub homomorphism_ok: bool,
    /// How the image order was obtained.
    pub method: String,
    pub problems: Vec<String>,
}

impl MonomorphismReport {
    pub fn ok(&self) -> bool {
        self.well_defined && self.homomorphism_ok && self.injective == Some(true)
    }

    pub fn to_json(&self, tiling: Option<&TilingCertificate>) -> serde_json::Value {
        let s = |x: &Option<BigInt>| x.as_ref().map(|v| v.to_string());
        json!({
            "source_order": s(&self.source_order),
            "target_order": s(&self.target_order),
            "image_order": s(&self.image_order),
            "injective": self.injective,
            "well_defined": self.well_defined,
            "homomorphism_samples": self.homomorphism_samples,
            "homomorphism_ok": self.homomorphism_ok,
            "method": self.method,
            "problems": self.problems,
            "tiling": tiling,
        })
    }
}

fn random_element(domain: &Domain, rng: &mut ChaCha8Rng) -> Result<GroupElement> {
    let c = ChipConfig((0..domain.len()).map(|_| rng.gen_range(0..8)).collect());
    canonical_rep(domain, &c)
}

/// Well-definedness, sampled additivity, and injectivity via the order of
/// the image subgroup.
pub fn verify_monomorphism(m: &GroupMap, samples: usize, seed: u64) -> Result<MonomorphismReport> {
    let mut problems = Vec::new();
    let wd = well_defined(m)?;
    if !wd {
        problems.push("some Laplacian column is not mapped into the target Laplacian lattice".to_string());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hom_ok = true;
    for k in 0..samples {
        let a = random_element(&m.source, &mut rng)?;
        let b = random_element(&m.source, &mut rng)?;
        let lhs = m.apply(&group_add(&m.source, &a, &b)?)?;
        let rhs = group_add(&m.target, &m.apply(&a)?, &m.apply(&b)?)?;
        if lhs != rhs {
            hom_ok = false;
            problems.push(format!("sample {k}: image of a sum differs from the sum of images"));
            break;
        }
        if let Some(t) = &m.tiling {
            if k < 8 && mu_apply(t, &a)? != m.apply(&a)? {
                hom_ok = false;
                problems.push(format!("sample {k}: Dirichlet construction disagrees with the matrix"));
                break;
            }
        }
    }
    let small_src = m.source.len() <= EXACT_LIMIT;
    let small_dst = m.target.len() <= EXACT_LIMIT;
    let source_order = small_src.then(|| group_order(&m.source));
    let target_order = small_dst.then(|| group_order(&m.target));
    let (image_order, method) = if !wd {
        (None, "skipped: map is not well defined".to_string())
    } else if small_dst {
        (Some(subgroup_order_in_cokernel(&m.target.reduced_laplacian(), &m.matrix)?), "smith form".to_string())
    } else if source_order.as_ref().is_some_and(|o| *o <= BigInt::from(ENUMERATION_LIMIT)) {
        let elements = enumerate_group(&m.source, ENUMERATION_LIMIT)?;
        let zero = identity(&m.target);
        let mut kernel = 0u64;
        for a in &elements {
            if m.apply(a)? == zero {
                kernel += 1;
            }
        }
        (Some(BigInt::from(elements.len() as u64 / kernel)), "kernel enumeration".to_string())
    } else {
        (None, "not computed: both groups too large".to_string())
    };
    let injective = match (&image_order, &source_order) {
        (Some(i), Some(s)) => Some(i == s),
        _ => None,
    };
    if injective == Some(false) {
        problems.push("image subgroup is smaller than the source group".to_string());
    }
    Ok(MonomorphismReport {
        source_order,
        target_order,
        image_order,
        injective,
        well_defined: wd,
        homomorphism_samples: samples,
        homomorphism_ok: hom_ok,
        method,
        problems,
    })
}

/// `m2 ∘ m1`.
pub fn compose(m1: &GroupMap, m2: &GroupMap) -> Result<GroupMap> {
    if m1.target != m2.source {
        return Err(Error::DomainMismatch);
    }
    let tiling = match (&m1.tiling, &m2.tiling) {
        (Some(t1), Some(t2)) => Some(compose_tilings(t1, t2)?),
        _ => None,
    };
    let map = GroupMap::new(m1.source.clone(), m2.target.clone(), m2.matrix.mul(&m1.matrix), tiling)?;
    if !well_defined(&map)? {
        return Err(Error::Invariant("composite does not preserve the Laplacian lattice".into()));
    }
    Ok(map)
}

/// Result of the tile-by-tile curing construction.
#[derive(Clone, Debug)]
pub struct Cured {
    /// One integer correction per tile, indexed by the target domain.
    pub corrections: Vec<Vec<BigInt>>,
    /// `Ĥ_B + Σ X_i`, harmonic on the interior of `Γ_B`.
    pub harmonic: Vec<BigRational>,
}

/// Integer corrections `X_i` vanishing on `Γ_i` that remove the Laplacian of
/// `Ĥ_B` next to the internal boundary. Free Smith coordinates are zero.
pub fn cure_functions(t: &DCTiling, h_hat: &[BigRational]) -> Result<Cured> {
    let b = t.target_domain()?;
    if h_hat.len() != b.len() {
        return Err(Error::DomainMismatch);
    }
    let lap = b.laplacian_rational(h_hat);
    let ib: BTreeSet<usize> = internal_boundaries(t)?.into_iter().collect();
    let interior = b.interior();
    let lap_b = b.reduced_laplacian();
    let mut corrections = Vec::new();
    for map in vertex_maps(t)? {
        let tile: BTreeSet<usize> = map.iter().copied().collect();
        let unknowns: Vec<usize> = (0..b.len()).filter(|v| !tile.contains(v)).collect();
        let mut rhs = Vec::with_capacity(interior.len());
        for &r in &interior {
            let cure = tile.contains(&r) && b.neighbors(r).iter().any(|w| ib.contains(w));
            if cure {
                if !lap[r].is_integer() {
                    return Err(Error::Integrality(format!("Laplacian at {:?} is {}", b.vertex(r), lap[r])));
                }
                rhs.push(-lap[r].to_integer());
            } else {
                rhs.push(BigInt::zero());
            }
        }
        let mut x = vec![BigInt::zero(); b.len()];
        if !unknowns.is_empty() && !interior.is_empty() {
            let system = lap_b.select_rows(&interior).select_cols(&unknowns);
            let sol = lattice_solve(&system, &rhs)
                .ok_or_else(|| Error::NoIntegerSolution("curing system of a tile".into()))?;
            for (k, &u) in unknowns.iter().enumerate() {
                x[u] = sol[k].clone();
            }
        } else if rhs.iter().any(|v| !v.is_zero()) {
            return Err(Error::NoIntegerSolution("curing system has no unknowns".into()));
        }
        corrections.push(x);
    }
    let mut harmonic = h_hat.to_vec();
    for x in &corrections {
        for (h, xi) in harmonic.iter_mut().zip(x) {
            *h += BigRational::from_integer(xi.clone());
        }
    }
    check_harmonic_on_domain(&b, &harmonic)?;
    if b.laplacian_rational(&harmonic).iter().any(|q| !q.is_integer()) {
        return Err(Error::Integrality("cured function has a non-integer Laplacian".into()));
    }
    Ok(Cured { corrections, harmonic })
}

/// Chip vector `-Δ h`, which must be integral.
pub fn chips_of(domain: &Domain, h: &[BigRational]) -> Result<Vec<BigInt>> {
    domain
        .laplacian_rational(h)
        .iter()
        .map(|q| if q.is_integer() { Ok(-q.to_integer()) } else { Err(Error::Integrality("Laplacian".into())) })
        .collect()
}

/// Whether a map acts as the identity on the group (same domain on both sides).
pub fn is_identity_map(m: &GroupMap) -> Result<bool> {
    if m.source != m.target {
        return Ok(false);
    }
    let lap = m.source.reduced_laplacian();
    for v in 0..m.source.len() {
        let mut d = m.matrix.column(v);
        d[v] -= BigInt::one();
        if !in_laplacian_lattice(&m.source, &lap, &d)? {
            return Ok(false);
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::MPolyform;
    use crate::tiling::search_tilings;

    #[test]
    fn identity_tiling_gives_identity_matrix() {
        let p = MPolyform::square(4).unwrap();
        let t = DCTiling::identity(&p).unwrap();
        let m = mu_matrix(&t).unwrap();
        assert_eq!(m.matrix(), &IntMatrix::identity(9));
        let r = verify_monomorphism(&m, 10, 1).unwrap();
        assert!(r.ok());
        assert_eq!(r.image_order, Some(BigInt::from(100352)));
    }

    #[test]
    fn triangle_tiling_is_injective() {
        let a = MPolyform::right_triangle(2).unwrap();
        let b = MPolyform::right_triangle(4).unwrap();
        let t = search_tilings(&a, &b, 1).unwrap().remove(0);
        let m = mu_matrix(&t).unwrap();
        let signs: Vec<i8> = t.placements().iter().map(|p| p.sign).collect();
        assert_eq!(m.matrix(), signed_copy_matrix(&t, &signs).unwrap().matrix());
        let r = verify_monomorphism(&m, 20, 7).unwrap();
        assert!(r.ok(), "{:?}", r);
        assert_eq!(r.image_order, r.source_order);
        let bad = signed_copy_matrix(&t, &vec![1; t.len()]).unwrap();
        assert!(!verify_monomorphism(&bad, 5, 7).unwrap().well_defined);
    }

    #[test]
    fn curing_keeps_the_class() {
        let a = MPolyform::right_triangle(2).unwrap();
        let b = MPolyform::right_triangle(4).unwrap();
        let t = search_tilings(&a, &b, 1).unwrap().remove(0);
        let src = t.source_domain().unwrap();
        let dst = t.target_domain().unwrap();
        for x in [vec![1, 0, 0], vec![0, 2, 1], vec![3, 3, 1]] {
            let x: Vec<BigInt> = x.into_iter().map(BigInt::from).collect();
            let h_hat = copy_paste(&t, &dirichlet_solve(&src, &x)).unwrap();
            let cured = cure_functions(&t, &h_hat).unwrap();
            let before = canonical_rep_big(&dst, &chips_of(&dst, &h_hat).unwrap()).unwrap();
            let after = canonical_rep_big(&dst, &chips_of(&dst, &cured.harmonic).unwrap()).unwrap();
            assert_eq!(before, after);
        }
    }
}
