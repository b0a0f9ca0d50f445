//! Toppling, recurrence and the group structure on recurrent configurations.

use std::collections::VecDeque;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::algebra::{det_exact, invariant_factors, IntMatrix};
use crate::error::{Error, Result};
use crate::geometry::Domain;

/// Chip counts indexed like the vertices of a domain.
///
/// Heights are 64-bit; every conversion from big integers is checked.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ChipConfig(pub Vec<i64>);

impl ChipConfig {
    pub fn zeros(n: usize) -> Self {
        ChipConfig(vec![0; n])
    }

    pub fn constant(n: usize, v: i64) -> Self {
        ChipConfig(vec![v; n])
    }

    pub fn from_big(values: &[BigInt]) -> Result<Self> {
        values.iter().map(|v| v.to_i64().ok_or(Error::Overflow)).collect::<Result<Vec<_>>>().map(ChipConfig)
    }

    pub fn to_big(&self) -> Vec<BigInt> {
        self.0.iter().map(|&v| BigInt::from(v)).collect()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_stable(&self) -> bool {
        self.0.iter().all(|&v| (0..4).contains(&v))
    }

    pub fn add(&self, other: &ChipConfig) -> Result<ChipConfig> {
        if self.len() != other.len() {
            return Err(Error::DomainMismatch);
        }
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.checked_add(*b).ok_or(Error::Overflow))
            .collect::<Result<Vec<_>>>()
            .map(ChipConfig)
    }

    pub fn scale(&self, k: i64) -> Result<ChipConfig> {
        self.0.iter().map(|a| a.checked_mul(k).ok_or(Error::Overflow)).collect::<Result<Vec<_>>>().map(ChipConfig)
    }
}

/// Stable configuration paired with the number of topples at each vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stabilized {
    pub config: ChipConfig,
    pub odometer: Vec<u64>,
}

/// Relax a nonnegative configuration. Vertices are processed from a FIFO
/// queue and topple `floor(c/4)` times at once.
pub fn stabilize(domain: &Domain, c: &ChipConfig) -> Result<Stabilized> {
    check_len(domain, c)?;
    if let Some(i) = c.0.iter().position(|&v| v < 0) {
        return Err(Error::NegativeInput(i));
    }
    let mut h = c.0.clone();
    let mut odo = vec![0u64; h.len()];
    let mut queued = vec![false; h.len()];
    let mut queue: VecDeque<usize> = VecDeque::new();
    for (i, &v) in h.iter().enumerate() {
        if v >= 4 {
            queue.push_back(i);
            queued[i] = true;
        }
    }
    while let Some(v) = queue.pop_front() {
        queued[v] = false;
        let k = h[v] / 4;
        if k == 0 {
            continue;
        }
        h[v] -= 4 * k;
        odo[v] += k as u64;
        for &w in domain.neighbors(v) {
            h[w] = h[w].checked_add(k).ok_or(Error::Overflow)?;
            if h[w] >= 4 && !queued[w] {
                queued[w] = true;
                queue.push_back(w);
            }
        }
    }
    Ok(Stabilized { config: ChipConfig(h), odometer: odo })
}

/// Reference relaxation: single topples driven by a LIFO stack. Used to
/// check that the result does not depend on the toppling schedule.
pub fn stabilize_stack_order(domain: &Domain, c: &ChipConfig) -> Result<Stabilized> {
    check_len(domain, c)?;
    if let Some(i) = c.0.iter().position(|&v| v < 0) {
        return Err(Error::NegativeInput(i));
    }
    let mut h = c.0.clone();
    let mut odo = vec![0u64; h.len()];
    let mut stack: Vec<usize> = (0..h.len()).filter(|&i| h[i] >= 4).collect();
    while let Some(v) = stack.pop() {
        if h[v] < 4 {
            continue;
        }
        h[v] -= 4;
        odo[v] += 1;
        if h[v] >= 4 {
            stack.push(v);
        }
        for &w in domain.neighbors(v) {
            h[w] += 1;
            if h[w] >= 4 {
                stack.push(w);
            }
        }
    }
    Ok(Stabilized { config: ChipConfig(h), odometer: odo })
}

fn check_len(domain: &Domain, c: &ChipConfig) -> Result<()> {
    if domain.len() != c.len() {
        return Err(Error::DomainMismatch);
    }
    Ok(())
}

/// Dhar's burning test on a stable configuration.
pub fn is_recurrent(domain: &Domain, c: &ChipConfig) -> bool {
    if c.len() != domain.len() || !c.is_stable() {
        return false;
    }
    let n = domain.len();
    let mut unburnt_nbrs: Vec<i64> = (0..n).map(|i| domain.neighbors(i).len() as i64).collect();
    let mut burnt = vec![false; n];
    let mut stack: Vec<usize> = (0..n).filter(|&i| c.0[i] >= unburnt_nbrs[i]).collect();
    let mut count = 0;
    while let Some(v) = stack.pop() {
        if burnt[v] {
            continue;
        }
        burnt[v] = true;
        count += 1;
        for &w in domain.neighbors(v) {
            unburnt_nbrs[w] -= 1;
            if !burnt[w] && c.0[w] >= unburnt_nbrs[w] {
                stack.push(w);
            }
        }
    }
    count == n
}

/// Burning configuration: number of sink edges at each vertex.
pub fn burning_config(domain: &Domain) -> ChipConfig {
    ChipConfig((0..domain.len()).map(|i| domain.sink_edges(i) as i64).collect())
}

/// Recurrent configuration standing for one element of the sandpile group.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroupElement {
    rep: ChipConfig,
}

impl GroupElement {
    pub fn rep(&self) -> &ChipConfig {
        &self.rep
    }

    /// Wrap a configuration after checking that it is stable and recurrent.
    pub fn from_recurrent(domain: &Domain, rep: ChipConfig) -> Result<Self> {
        if !is_recurrent(domain, &rep) {
            return Err(Error::Invariant("configuration is not recurrent".into()));
        }
        Ok(GroupElement { rep })
    }
}

pub fn group_add(domain: &Domain, a: &GroupElement, b: &GroupElement) -> Result<GroupElement> {
    let sum = a.rep.add(&b.rep)?;
    check_len(domain, &sum)?;
    Ok(GroupElement { rep: stabilize(domain, &sum)?.config })
}

/// Identity element, `(2m - (2m)°)°` with `m` the maximal stable configuration.
pub fn identity(domain: &Domain) -> GroupElement {
    let n = domain.len();
    let two_m = ChipConfig::constant(n, 6);
    let s = stabilize(domain, &two_m).expect("nonnegative input").config;
    let diff = ChipConfig(two_m.0.iter().zip(&s.0).map(|(a, b)| a - b).collect());
    GroupElement { rep: stabilize(domain, &diff).expect("nonnegative input").config }
}

pub fn group_order(domain: &Domain) -> BigInt {
    det_exact(&domain.reduced_laplacian()).abs()
}

/// Invariant factors greater than one of the reduced Laplacian.
pub fn group_decomposition(domain: &Domain) -> Vec<BigInt> {
    invariant_factors(&domain.reduced_laplacian()).into_iter().filter(|d| !d.is_one() && !d.is_zero()).collect()
}

/// A configuration `w = -Δ f` with every entry at least 16, where
/// `f` is a concave quadratic that is nonnegative around the domain.
/// Adding multiples of `w` never changes the class.
pub fn positive_zero_class(domain: &Domain) -> ChipConfig {
    let (xmin, ymin, xmax, ymax) = domain.bounding_box();
    let (sx, sy) = (xmin + xmax, ymin + ymax);
    let g = |(x, y): (i64, i64)| (2 * x - sx).pow(2) + (2 * y - sy).pow(2);
    let big = g((xmin - 1, ymin - 1)).max(g((xmax + 1, ymax + 1))).max(g((xmin - 1, ymax + 1))).max(g((xmax + 1, ymin - 1)));
    let f: Vec<i64> = domain.vertices().iter().map(|&v| big - g(v)).collect();
    let lap = domain.laplacian_i64(&f);
    ChipConfig(lap.into_iter().map(|v| -v).collect())
}

/// The unique recurrent configuration in the class `x + Δ Z^Γ`.
///
/// `x` is shifted by the smallest multiple of [`positive_zero_class`] that
/// makes it pointwise at least 3; relaxing anything above the maximal stable
/// configuration yields a recurrent configuration.
pub fn canonical_rep(domain: &Domain, x: &ChipConfig) -> Result<GroupElement> {
    check_len(domain, x)?;
    let w = positive_zero_class(domain);
    let mut k: i64 = 0;
    for (xi, wi) in x.0.iter().zip(&w.0) {
        if *xi < 3 {
            let need = (3 - xi + wi - 1) / wi;
            k = k.max(need);
        }
    }
    let shifted = x.add(&w.scale(k)?)?;
    let rep = stabilize(domain, &shifted)?.config;
    debug_assert!(is_recurrent(domain, &rep));
    Ok(GroupElement { rep })
}

pub fn canonical_rep_big(domain: &Domain, x: &[BigInt]) -> Result<GroupElement> {
    canonical_rep(domain, &ChipConfig::from_big(x)?)
}

/// Whether `x` lies in `Δ Z^Γ`.
pub fn is_zero_class(domain: &Domain, x: &ChipConfig) -> Result<bool> {
    Ok(canonical_rep(domain, x)? == identity(domain))
}

/// `n · a` by doubling.
pub fn multiply(domain: &Domain, a: &GroupElement, n: &BigInt) -> Result<GroupElement> {
    let mut result = identity(domain);
    let mut base = a.clone();
    let mut n = n.clone();
    let two = BigInt::from(2);
    while n.is_positive() {
        if (&n % &two).is_one() {
            result = group_add(domain, &result, &base)?;
        }
        base = group_add(domain, &base, &base)?;
        n /= &two;
    }
    Ok(result)
}

/// Least `n >= 1` with `n · a = e`.
///
/// The candidate is the least common denominator of `Δ^{-1} a` (exact); it
/// is then confirmed with the engine and reduced by every prime factor that
/// trial division can find.
pub fn element_order(domain: &Domain, a: &GroupElement) -> Result<BigInt> {
    let lap = domain.reduced_laplacian();
    let y = crate::algebra::solve_exact(&lap, &a.rep.to_big())?;
    let mut n = BigInt::one();
    for v in &y {
        n = num_integer::Integer::lcm(&n, v.denom());
    }
    let e = identity(domain);
    if multiply(domain, a, &n)? != e {
        return Err(Error::Invariant("order candidate does not annihilate the element".into()));
    }
    if let Some(factors) = crate::algebra::factorize(&n, 2_000_000) {
        for (p, _) in factors {
            while (&n % &p).is_zero() && multiply(domain, a, &(&n / &p))? == e {
                n /= &p;
            }
        }
    }
    Ok(n)
}

/// Enumerate all recurrent configurations by brute force. Only sensible
/// for tiny domains (4^|Γ| candidates).
pub fn enumerate_recurrent(domain: &Domain) -> Vec<ChipConfig> {
    let n = domain.len();
    assert!(n <= 10, "enumeration is exponential in the domain size");
    let total = 1usize << (2 * n);
    (0..total)
        .map(|code| ChipConfig((0..n).map(|i| ((code >> (2 * i)) & 3) as i64).collect()))
        .filter(|c| is_recurrent(domain, c))
        .collect()
}

/// P2 PGM image, row-major with north at the top. Cells outside the domain
/// are written as 0.
pub fn render_pgm(domain: &Domain, c: &ChipConfig) -> String {
    let (xmin, ymin, xmax, ymax) = domain.bounding_box();
    let w = xmax - xmin + 1;
    let h = ymax - ymin + 1;
    let mut out = format!("P2\n{w} {h}\n255\n");
    for y in (ymin..=ymax).rev() {
        let row: Vec<String> = (xmin..=xmax)
            .map(|x| match domain.index_of((x, y)) {
                Some(i) => (c.0[i].clamp(0, 3) * 85).to_string(),
                None => "0".to_string(),
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

/// Plain grid of heights, north at the top; `.` marks cells outside the domain.
pub fn render_text(domain: &Domain, c: &ChipConfig) -> String {
    let (xmin, ymin, xmax, ymax) = domain.bounding_box();
    let mut out = String::new();
    for y in (ymin..=ymax).rev() {
        for x in xmin..=xmax {
            match domain.index_of((x, y)) {
                Some(i) => out.push_str(&c.0[i].to_string()),
                None => out.push('.'),
            }
        }
        out.push('\n');
    }
    out
}

/// Integer image `Δ x` of an integer vector.
pub fn laplacian_image(domain: &Domain, z: &[i64]) -> ChipConfig {
    ChipConfig(domain.laplacian_i64(z))
}

/// Integer matrix whose columns are the given configurations.
pub fn configs_as_columns(configs: &[ChipConfig]) -> IntMatrix {
    let n = configs.first().map_or(0, |c| c.len());
    let mut m = IntMatrix::zeros(n, configs.len());
    for (j, c) in configs.iter().enumerate() {
        for i in 0..n {
            m[(i, j)] = BigInt::from(c.0[i]);
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_vertex_topples_once() {
        let d = Domain::square(1).unwrap();
        let s = stabilize(&d, &ChipConfig(vec![4])).unwrap();
        assert_eq!(s.config.0, vec![0]);
        assert_eq!(s.odometer, vec![1]);
        assert!(matches!(stabilize(&d, &ChipConfig(vec![-1])), Err(Error::NegativeInput(0))));
    }

    #[test]
    fn stable_input_unchanged() {
        let d = Domain::square(3).unwrap();
        let c = ChipConfig(vec![0, 1, 2, 3, 2, 1, 0, 3, 3]);
        let s = stabilize(&d, &c).unwrap();
        assert_eq!(s.config, c);
        assert!(s.odometer.iter().all(|&k| k == 0));
    }

    #[test]
    fn schedulers_agree_on_all_fours() {
        let d = Domain::square(2).unwrap();
        let c = ChipConfig::constant(4, 4);
        let a = stabilize(&d, &c).unwrap();
        let b = stabilize_stack_order(&d, &c).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn burning_examples() {
        let d = Domain::square(2).unwrap();
        assert!(is_recurrent(&d, &ChipConfig::constant(4, 3)));
        assert!(!is_recurrent(&d, &ChipConfig::zeros(4)));
        let one = Domain::square(1).unwrap();
        assert!(is_recurrent(&one, &ChipConfig(vec![0])));
    }

    #[test]
    fn single_vertex_group_is_z4() {
        let d = Domain::square(1).unwrap();
        let e = identity(&d);
        assert_eq!(e.rep().0, vec![0]);
        for a in 0..4 {
            for b in 0..4 {
                let ga = GroupElement::from_recurrent(&d, ChipConfig(vec![a])).unwrap();
                let gb = GroupElement::from_recurrent(&d, ChipConfig(vec![b])).unwrap();
                assert_eq!(group_add(&d, &ga, &gb).unwrap().rep().0, vec![(a + b) % 4]);
            }
        }
        let one = GroupElement::from_recurrent(&d, ChipConfig(vec![1])).unwrap();
        assert_eq!(element_order(&d, &one).unwrap(), BigInt::from(4));
        assert_eq!(element_order(&d, &e).unwrap(), BigInt::one());
    }

    #[test]
    fn identity_is_idempotent() {
        let d = Domain::square(3).unwrap();
        let e = identity(&d);
        assert_eq!(group_add(&d, &e, &e).unwrap(), e);
        assert!(is_recurrent(&d, e.rep()));
    }

    #[test]
    fn canonical_rep_basics() {
        let d = Domain::square(3).unwrap();
        assert_eq!(canonical_rep(&d, &ChipConfig::zeros(9)).unwrap(), identity(&d));
        let r = ChipConfig(vec![3, 2, 3, 3, 1, 3, 3, 2, 3]);
        assert!(is_recurrent(&d, &r));
        assert_eq!(canonical_rep(&d, &r).unwrap().rep(), &r);
        let neg = ChipConfig(vec![-5, 0, 7, 0, -100, 0, 1, 2, 3]);
        let g = canonical_rep(&d, &neg).unwrap();
        assert!(is_recurrent(&d, g.rep()));
    }

    #[test]
    fn orders_and_decompositions() {
        assert_eq!(group_order(&Domain::square(1).unwrap()), BigInt::from(4));
        assert_eq!(group_decomposition(&Domain::square(1).unwrap()), vec![BigInt::from(4)]);
        let two = group_decomposition(&Domain::square(2).unwrap());
        assert_eq!(two.iter().product::<BigInt>(), BigInt::from(192));
    }

    #[test]
    fn pgm_levels() {
        let d = Domain::rectangle((0, 0), 4, 1).unwrap();
        let pgm = render_pgm(&d, &ChipConfig(vec![0, 1, 2, 3]));
        assert_eq!(pgm, "P2\n4 1\n255\n0 85 170 255\n");
    }
}
