//! Convolution algebras of finite groups acting on `ℓ^p(G)`.
//!
//! Groups are explicit multiplication tables. A function `f` on `G` acts by
//! left convolution, `(f∗ξ)(s) = Σ_t f(t) ξ(t⁻¹s)`, and the reduced norm is
//! the operator norm of that matrix. Since every finite group is amenable the
//! same number is also the full group algebra norm.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::cvec;
use crate::lpcore::{Exponent, Operator, WeightedSpace, C64};
use crate::opnorm::{is_invertible_isometry_with, opnorm, NormEstimate, SearchConfig};

/// Agreement tolerance for norm identities between two searches.
pub const NORM_AGREEMENT: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiniteGroup {
    elements: Vec<String>,
    table: Vec<Vec<usize>>,
    #[serde(skip)]
    identity: usize,
    #[serde(skip)]
    inverses: Vec<usize>,
}

#[derive(Deserialize)]
struct GroupRepr {
    elements: Vec<serde_json::Value>,
    table: Vec<Vec<usize>>,
}

impl<'de> Deserialize<'de> for FiniteGroup {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = GroupRepr::deserialize(d)?;
        let labels = r
            .elements
            .into_iter()
            .map(|v| match v {
                serde_json::Value::String(s) => s,
                other => other.to_string(),
            })
            .collect();
        FiniteGroup::new(labels, r.table).map_err(serde::de::Error::custom)
    }
}

impl FiniteGroup {
    /// Validates closure, associativity, identity and inverses exhaustively.
    pub fn new(elements: Vec<String>, table: Vec<Vec<usize>>) -> Result<Self> {
        let n = elements.len();
        if n == 0 {
            return Err(Error::InvalidGroup("no elements".into()));
        }
        if table.len() != n || table.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidGroup(format!("table is not {n}x{n}")));
        }
        if table.iter().flatten().any(|&x| x >= n) {
            return Err(Error::InvalidGroup("table entry out of range".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or_else(|| Error::InvalidGroup("no identity".into()))?;
        let mut inverses = vec![0; n];
        for g in 0..n {
            inverses[g] = (0..n)
                .find(|&h| table[g][h] == identity && table[h][g] == identity)
                .ok_or_else(|| Error::InvalidGroup(format!("element {g} has no inverse")))?;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidGroup(format!("({a}{b}){c} != {a}({b}{c})")));
                    }
                }
            }
        }
        Ok(FiniteGroup {
            elements,
            table,
            identity,
            inverses,
        })
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    pub fn cyclic(n: usize) -> Self {
        let n = n.max(1);
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::new((0..n).map(|k| k.to_string()).collect(), table).expect("cyclic group")
    }

    /// Direct product; element `(g, h)` has index `g · |H| + h`.
    pub fn product(g: &FiniteGroup, h: &FiniteGroup) -> Self {
        let (m, n) = (g.order(), h.order());
        let mut elements = Vec::with_capacity(m * n);
        for a in 0..m {
            for b in 0..n {
                elements.push(format!("({},{})", g.elements[a], h.elements[b]));
            }
        }
        let table = (0..m * n)
            .map(|x| {
                (0..m * n)
                    .map(|y| g.mul(x / n, y / n) * n + h.mul(x % n, y % n))
                    .collect()
            })
            .collect();
        Self::new(elements, table).expect("product of groups")
    }

    /// Permutations of `{1,2,3}` in one-line notation, composed as functions.
    pub fn symmetric3() -> Self {
        let perms: Vec<[usize; 3]> = vec![[0, 1, 2], [1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]];
        let index = |q: [usize; 3]| perms.iter().position(|r| *r == q).unwrap();
        let table = perms
            .iter()
            .map(|s| perms.iter().map(|t| index([s[t[0]], s[t[1]], s[t[2]]])).collect())
            .collect();
        let labels = perms
            .iter()
            .map(|q| q.iter().map(|i| char::from(b'1' + *i as u8)).collect())
            .collect();
        Self::new(labels, table).expect("S3")
    }

    /// Parses names such as `Z4`, `S3`, `Z2xZ2` or `trivial`.
    pub fn from_name(name: &str) -> Result<Self> {
        let parts: Vec<&str> = name.split(['x', '×']).map(str::trim).collect();
        let mut acc: Option<FiniteGroup> = None;
        for part in parts {
            let g = match part {
                "S3" => Self::symmetric3(),
                "trivial" | "1" | "e" => Self::trivial(),
                _ => match part.strip_prefix('Z').and_then(|k| k.parse::<usize>().ok()) {
                    Some(k) if k >= 1 => Self::cyclic(k),
                    _ => return Err(Error::Parse(format!("unknown group {part:?}"))),
                },
            };
            acc = Some(match acc {
                None => g,
                Some(a) => Self::product(&a, &g),
            });
        }
        acc.ok_or_else(|| Error::Parse("empty group name".into()))
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[String] {
        &self.elements
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverses[a]
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order()).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.elements.iter().position(|e| e == label)
    }
}

/// Finds a bijection `σ` with `σ(ab) = σ(a)σ(b)` from the table `a` to the
/// table `b`, by backtracking with element orders as a filter.
pub fn find_isomorphism(a: &[Vec<usize>], b: &[Vec<usize>]) -> Option<Vec<usize>> {
    let n = a.len();
    if b.len() != n {
        return None;
    }
    let order_of = |t: &[Vec<usize>], x: usize| {
        let e = (0..n).find(|&e| (0..n).all(|g| t[e][g] == g))?;
        let mut y = x;
        let mut k = 1;
        while y != e {
            y = t[y][x];
            k += 1;
            if k > n {
                return None;
            }
        }
        Some(k)
    };
    let oa: Vec<_> = (0..n).map(|x| order_of(a, x)).collect();
    let ob: Vec<_> = (0..n).map(|x| order_of(b, x)).collect();
    if oa.contains(&None) || ob.contains(&None) {
        return None;
    }
    let mut sigma = vec![usize::MAX; n];
    let mut used = vec![false; n];

    fn consistent(a: &[Vec<usize>], b: &[Vec<usize>], sigma: &[usize], k: usize) -> bool {
        // check every product involving element k whose three images are known
        for x in 0..=k {
            for (l, r) in [(k, x), (x, k)] {
                let prod = a[l][r];
                if prod <= k && b[sigma[l]][sigma[r]] != sigma[prod] {
                    return false;
                }
            }
        }
        true
    }

    fn extend(
        k: usize,
        a: &[Vec<usize>],
        b: &[Vec<usize>],
        oa: &[Option<usize>],
        ob: &[Option<usize>],
        sigma: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if k == a.len() {
            return true;
        }
        for y in 0..a.len() {
            if used[y] || oa[k] != ob[y] {
                continue;
            }
            sigma[k] = y;
            used[y] = true;
            if consistent(a, b, sigma, k) && extend(k + 1, a, b, oa, ob, sigma, used) {
                return true;
            }
            used[y] = false;
        }
        sigma[k] = usize::MAX;
        false
    }

    extend(0, a, b, &oa, &ob, &mut sigma, &mut used).then_some(sigma)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupFunction {
    group: FiniteGroup,
    #[serde(with = "cvec")]
    values: Vec<C64>,
}

impl GroupFunction {
    pub fn new(group: FiniteGroup, values: Vec<C64>) -> Result<Self> {
        if values.len() != group.order() {
            return Err(Error::DimensionMismatch {
                expected: group.order(),
                found: values.len(),
            });
        }
        Ok(GroupFunction { group, values })
    }

    pub fn delta(group: &FiniteGroup, g: usize) -> Self {
        let mut values = vec![C64::new(0.0, 0.0); group.order()];
        values[g] = C64::new(1.0, 0.0);
        GroupFunction {
            group: group.clone(),
            values,
        }
    }

    pub fn random(group: &FiniteGroup, rng: &mut impl Rng) -> Self {
        let values = (0..group.order())
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        GroupFunction {
            group: group.clone(),
            values,
        }
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().map(|z| z.norm()).sum()
    }

    /// `(f∗g)(s) = Σ_t f(t) g(t⁻¹s)`.
    pub fn convolve(&self, other: &GroupFunction) -> Result<GroupFunction> {
        if self.group != other.group {
            return Err(Error::DimensionMismatch {
                expected: self.group.order(),
                found: other.group.order(),
            });
        }
        let g = &self.group;
        let mut values = vec![C64::new(0.0, 0.0); g.order()];
        for t in 0..g.order() {
            for u in 0..g.order() {
                values[g.mul(t, u)] += self.values[t] * other.values[u];
            }
        }
        GroupFunction::new(g.clone(), values)
    }
}

/// Left regular representation: `M[s,u] = f(s u⁻¹)`, so `M ξ = f∗ξ`.
pub fn conv_matrix(f: &GroupFunction) -> Operator {
    let g = &f.group;
    let n = g.order();
    let m = DMatrix::from_fn(n, n, |s, u| f.values[g.mul(s, g.inv(u))]);
    Operator::unweighted(m)
}

/// Left translation by `g`.
pub fn translation(group: &FiniteGroup, g: usize) -> Operator {
    conv_matrix(&GroupFunction::delta(group, g))
}

pub fn fp_lambda_norm(f: &GroupFunction, p: Exponent, cfg: &SearchConfig) -> Result<NormEstimate> {
    opnorm(&conv_matrix(f), p, cfg)
}

/// `(1/2) [[a+b, a−b], [a−b, a+b]]`, the element with character values
/// `a` and `b` in the group algebra of `Z₂`.
pub fn z2_matrix(a: C64, b: C64) -> Operator {
    let s = (a + b) * 0.5;
    let d = (a - b) * 0.5;
    Operator::unweighted(DMatrix::from_row_slice(2, 2, &[s, d, d, s]))
}

pub fn z2_norm(a: C64, b: C64, p: Exponent, cfg: &SearchConfig) -> Result<NormEstimate> {
    opnorm(&z2_matrix(a, b), p, cfg)
}

/// Distance in the sup norm of coefficients from `c` to the set of
/// `γ δ_g` with `|γ| = 1`.
pub fn distance_to_phase_translations(c: &[C64]) -> f64 {
    let mut best = f64::INFINITY;
    for g in 0..c.len() {
        let others = c
            .iter()
            .enumerate()
            .filter(|(h, _)| *h != g)
            .map(|(_, z)| z.norm())
            .fold(0.0, f64::max);
        best = best.min(others.max((c[g].norm() - 1.0).abs()));
    }
    best
}

/// Unit phases `e^{ikπ/4}`, `k = 0..8`.
pub fn phase_grid() -> Vec<C64> {
    (0..8)
        .map(|k| C64::from_polar(1.0, k as f64 * std::f64::consts::FRAC_PI_4))
        .collect()
}

pub const ISOMETRY_TOL: f64 = 1e-9;
pub const NON_MEMBER_DISTANCE: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsomGroupReport {
    pub order: usize,
    pub translations_checked: usize,
    /// `(element, phase)` pairs that were not recognised as isometries.
    pub member_failures: Vec<(usize, usize)>,
    pub non_members_checked: usize,
    /// Coefficient vectors that passed although they should not.
    #[serde(serialize_with = "ser_vecs")]
    pub non_member_passes: Vec<Vec<C64>>,
}

fn ser_vecs<S: serde::Serializer>(v: &[Vec<C64>], s: S) -> std::result::Result<S::Ok, S::Error> {
    let w: Vec<_> = v.iter().map(|x| crate::json::to_cx(x)).collect();
    w.serialize(s)
}

impl IsomGroupReport {
    pub fn violations(&self) -> usize {
        self.member_failures.len() + self.non_member_passes.len()
    }
}

/// Checks that phase × translation elements are isometries and that sampled
/// elements of the span away from that set are not.
///
/// Half of the non-members are Gaussian coefficient vectors and half are
/// perturbations of a random `γ δ_g`, both kept only at coefficient distance
/// `≥ 0.1` from every `γ δ_g`.
pub fn isom_group_verify(g: &FiniteGroup, p: Exponent, trials: usize, cfg: &SearchConfig) -> Result<IsomGroupReport> {
    if p.is_two() {
        return Err(Error::ExponentTwo);
    }
    let n = g.order();
    let phases = phase_grid();
    let members: Vec<(usize, usize)> = (0..n).flat_map(|h| (0..phases.len()).map(move |k| (h, k))).collect();
    let member_failures: Vec<(usize, usize)> = members
        .par_iter()
        .filter(|&&(h, k)| {
            let op = translation(g, h).scale(phases[k]);
            !is_invertible_isometry_with(&op, p, ISOMETRY_TOL, cfg)
        })
        .copied()
        .collect();

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut samples = Vec::with_capacity(trials);
    while samples.len() < trials {
        let mut c: Vec<C64> = (0..n)
            .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
            .collect();
        if samples.len() % 2 == 1 {
            let h = rng.random_range(0..n);
            let gamma = C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
            let size = rng.random_range(0.05..0.5);
            let scale = c.iter().map(|z| z.norm()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
            for z in c.iter_mut() {
                *z *= size / scale;
            }
            c[h] += gamma;
        }
        if distance_to_phase_translations(&c) >= NON_MEMBER_DISTANCE {
            samples.push(c);
        }
    }
    let non_member_passes: Vec<Vec<C64>> = samples
        .par_iter()
        .filter(|c| {
            let f = GroupFunction::new(g.clone(), c.to_vec()).expect("sized to the group");
            is_invertible_isometry_with(&conv_matrix(&f), p, ISOMETRY_TOL, cfg)
        })
        .cloned()
        .collect();
    Ok(IsomGroupReport {
        order: n,
        translations_checked: members.len(),
        member_failures,
        non_members_checked: trials,
        non_member_passes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecoveredGroup {
    /// Multiplication table of the phase classes of translation isometries.
    pub table: Vec<Vec<usize>>,
    /// Class index of each group element's translation.
    pub classes: Vec<usize>,
    /// Isomorphism from the recovered table onto the group's table.
    pub isomorphism: Vec<usize>,
}

fn same_up_to_phase(a: &Operator, b: &Operator, tol: f64) -> bool {
    let (ma, mb) = (a.matrix(), b.matrix());
    let Some(k) = mb.iter().position(|z| z.norm() > 0.5) else {
        return false;
    };
    let gamma = ma.as_slice()[k] / mb.as_slice()[k];
    (gamma.norm() - 1.0).abs() <= tol && a.max_abs_diff(&b.scale(gamma)) <= tol
}

/// Rebuilds the group from its translation isometries: the elements
/// `i^k Lt_g` are collected, identified up to a unimodular scalar, and the
/// classes are multiplied as matrices.
pub fn recover_group(g: &FiniteGroup, p: Exponent) -> Result<RecoveredGroup> {
    if p.is_two() {
        return Err(Error::ExponentTwo);
    }
    let cfg = SearchConfig::default();
    let tol = 1e-12;
    let quarter: Vec<C64> = (0..4).map(|k| C64::new(0.0, 1.0).powi(k)).collect();
    let mut reps: Vec<Operator> = Vec::new();
    let mut classes = vec![usize::MAX; g.order()];
    for h in 0..g.order() {
        for &gamma in &quarter {
            let op = translation(g, h).scale(gamma);
            if !is_invertible_isometry_with(&op, p, ISOMETRY_TOL, &cfg) {
                return Err(Error::NotIsometry { p: p.value() });
            }
            let class = match reps.iter().position(|r| same_up_to_phase(&op, r, tol)) {
                Some(c) => c,
                None => {
                    reps.push(op);
                    reps.len() - 1
                }
            };
            if classes[h] == usize::MAX {
                classes[h] = class;
            }
        }
    }
    let m = reps.len();
    let mut table = vec![vec![0; m]; m];
    for a in 0..m {
        for b in 0..m {
            let prod = reps[a].compose(&reps[b])?;
            table[a][b] = reps
                .iter()
                .position(|r| same_up_to_phase(&prod, r, tol))
                .ok_or_else(|| Error::InvalidGroup("classes not closed under products".into()))?;
        }
    }
    let isomorphism = find_isomorphism(&table, g.table())
        .ok_or_else(|| Error::InvalidGroup("recovered table is not isomorphic to the group".into()))?;
    Ok(RecoveredGroup {
        table,
        classes,
        isomorphism,
    })
}

/// A candidate homomorphism `F^p_λ(G) → F^p_λ(H)` given by the images of
/// the translations `Lt_g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HomRepr")]
pub struct HomCandidate {
    pub source: FiniteGroup,
    pub target: FiniteGroup,
    pub images: Vec<Operator>,
}

#[derive(Deserialize)]
struct HomRepr {
    source: FiniteGroup,
    target: FiniteGroup,
    images: Vec<Operator>,
}

impl TryFrom<HomRepr> for HomCandidate {
    type Error = Error;
    fn try_from(r: HomRepr) -> Result<Self> {
        HomCandidate::new(r.source, r.target, r.images)
    }
}

impl HomCandidate {
    pub fn new(source: FiniteGroup, target: FiniteGroup, images: Vec<Operator>) -> Result<Self> {
        if images.len() != source.order() {
            return Err(Error::DimensionMismatch {
                expected: source.order(),
                found: images.len(),
            });
        }
        let m = target.order();
        if let Some(bad) = images.iter().find(|op| op.nrows() != m || op.ncols() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: bad.ncols(),
            });
        }
        let id = Operator::identity(WeightedSpace::uniform(m));
        if images[source.identity()].max_abs_diff(&id) > 1e-12 {
            return Err(Error::NotHomomorphism("identity is not sent to the identity".into()));
        }
        Ok(HomCandidate { source, target, images })
    }

    /// Images `γ(g) Lt_{θ(g)}`.
    pub fn from_data(source: &FiniteGroup, target: &FiniteGroup, theta: &[usize], gamma: &[C64]) -> Result<Self> {
        let images = theta
            .iter()
            .zip(gamma)
            .map(|(&h, &c)| translation(target, h).scale(c))
            .collect();
        HomCandidate::new(source.clone(), target.clone(), images)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomDecomposition {
    pub theta: Vec<usize>,
    #[serde(with = "cvec")]
    pub gamma: Vec<C64>,
    pub injective: bool,
}

/// Writes each image as `γ(g) Lt_{θ(g)}` and checks both laws.
pub fn hom_decompose(h: &HomCandidate, p: Exponent, tol: f64) -> Result<HomDecomposition> {
    hom_decompose_with(h, p, tol, &SearchConfig::default())
}

pub fn hom_decompose_with(h: &HomCandidate, p: Exponent, tol: f64, cfg: &SearchConfig) -> Result<HomDecomposition> {
    if p.is_two() {
        return Err(Error::ExponentTwo);
    }
    let (src, tgt) = (&h.source, &h.target);
    let norms: Vec<Result<NormEstimate>> = h.images.par_iter().map(|op| opnorm(op, p, cfg)).collect();
    for (element, norm) in norms.into_iter().enumerate() {
        let norm = norm?.lower_bound;
        if norm > 1.0 + tol {
            return Err(Error::NotContractive { element, norm });
        }
    }
    let translations: Vec<Operator> = (0..tgt.order()).map(|t| translation(tgt, t)).collect();
    let mut theta = Vec::with_capacity(src.order());
    let mut gamma = Vec::with_capacity(src.order());
    for (element, img) in h.images.iter().enumerate() {
        let m = img.matrix();
        let first = (0..m.nrows())
            .flat_map(|i| (0..m.ncols()).map(move |j| (i, j)))
            .find(|&(i, j)| m[(i, j)].norm() > 0.5)
            .ok_or(Error::NonSpatialImage { element })?;
        let phase = m[first];
        if (phase.norm() - 1.0).abs() > tol {
            return Err(Error::NonSpatialImage { element });
        }
        let unphased = img.scale(phase.conj());
        let target = translations
            .iter()
            .position(|t| t.max_abs_diff(&unphased) <= tol)
            .ok_or(Error::NonSpatialImage { element })?;
        theta.push(target);
        gamma.push(phase);
    }
    for a in 0..src.order() {
        for b in 0..src.order() {
            let ab = src.mul(a, b);
            if theta[ab] != tgt.mul(theta[a], theta[b]) {
                return Err(Error::NotHomomorphism(format!("θ({a}·{b}) != θ({a})θ({b})")));
            }
            if (gamma[ab] - gamma[a] * gamma[b]).norm() > tol {
                return Err(Error::NotHomomorphism(format!("γ({a}·{b}) != γ({a})γ({b})")));
            }
        }
    }
    let mut seen = vec![false; tgt.order()];
    let injective = theta.iter().all(|&t| !std::mem::replace(&mut seen[t], true));
    Ok(HomDecomposition {
        theta,
        gamma,
        injective,
    })
}

/// `f^♯(s) = f(s⁻¹)`.
pub fn sharp(f: &GroupFunction) -> GroupFunction {
    let g = &f.group;
    let values = (0..g.order()).map(|s| f.values[g.inv(s)]).collect();
    GroupFunction {
        group: g.clone(),
        values,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DualityReport {
    pub transpose_exact: bool,
    pub norm_p: f64,
    pub norm_dual: f64,
    pub difference: f64,
    pub agrees: bool,
}

/// Compares `λ_p(f)'` with `λ_{p'}(f^♯)` entrywise and in norm.
pub fn duality_check(f: &GroupFunction, p: Exponent, cfg: &SearchConfig) -> Result<DualityReport> {
    let q = p.dual()?;
    let fs = sharp(f);
    let transpose_exact = conv_matrix(f).transpose() == conv_matrix(&fs);
    let norm_p = fp_lambda_norm(f, p, cfg)?.lower_bound;
    let norm_dual = fp_lambda_norm(&fs, q, cfg)?.lower_bound;
    let difference = (norm_p - norm_dual).abs();
    Ok(DualityReport {
        transpose_exact,
        norm_p,
        norm_dual,
        difference,
        agrees: difference <= NORM_AGREEMENT,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Subgroup {
    parent: FiniteGroup,
    members: Vec<usize>,
}

impl Subgroup {
    pub fn new(parent: &FiniteGroup, mut members: Vec<usize>) -> Result<Self> {
        members.sort_unstable();
        members.dedup();
        let n = parent.order();
        if members.iter().any(|&m| m >= n) {
            return Err(Error::InvalidSubgroup("member out of range".into()));
        }
        if !members.contains(&parent.identity()) {
            return Err(Error::InvalidSubgroup("identity missing".into()));
        }
        for &a in &members {
            if members.binary_search(&parent.inv(a)).is_err() {
                return Err(Error::InvalidSubgroup(format!("inverse of {a} missing")));
            }
            for &b in &members {
                if members.binary_search(&parent.mul(a, b)).is_err() {
                    return Err(Error::InvalidSubgroup(format!("{a}·{b} leaves the subset")));
                }
            }
        }
        Ok(Subgroup {
            parent: parent.clone(),
            members,
        })
    }

    pub fn parent(&self) -> &FiniteGroup {
        &self.parent
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// The subgroup as a group in its own right, members in increasing order.
    pub fn as_group(&self) -> FiniteGroup {
        let pos: BTreeMap<usize, usize> = self.members.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let table = self
            .members
            .iter()
            .map(|&a| self.members.iter().map(|&b| pos[&self.parent.mul(a, b)]).collect())
            .collect();
        let labels = self.members.iter().map(|&m| self.parent.elements[m].clone()).collect();
        FiniteGroup::new(labels, table).expect("closed subset of a group")
    }

    pub fn is_normal(&self) -> bool {
        let g = &self.parent;
        (0..g.order()).all(|s| {
            self.members
                .iter()
                .all(|&n| self.members.binary_search(&g.mul(g.mul(s, n), g.inv(s))).is_ok())
        })
    }

    /// `G/N` with cosets ordered by least representative, and the projection.
    pub fn quotient(&self) -> Result<(FiniteGroup, Vec<usize>)> {
        if !self.is_normal() {
            return Err(Error::InvalidNormalSubgroup("not closed under conjugation".into()));
        }
        let g = &self.parent;
        let mut proj = vec![usize::MAX; g.order()];
        let mut reps = Vec::new();
        for s in 0..g.order() {
            if proj[s] != usize::MAX {
                continue;
            }
            for &n in &self.members {
                proj[g.mul(s, n)] = reps.len();
            }
            reps.push(s);
        }
        let table = reps
            .iter()
            .map(|&a| reps.iter().map(|&b| proj[g.mul(a, b)]).collect())
            .collect();
        let labels = reps.iter().map(|&r| format!("{}N", g.elements[r])).collect();
        Ok((FiniteGroup::new(labels, table)?, proj))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormComparison {
    pub smaller_side: f64,
    pub larger_side: f64,
    pub difference: f64,
    pub holds: bool,
}

/// Extends `f` on `H` by zero to `G` and compares the two reduced norms.
pub fn subgroup_isometry_check(
    h: &Subgroup,
    f: &GroupFunction,
    p: Exponent,
    cfg: &SearchConfig,
) -> Result<NormComparison> {
    let hg = h.as_group();
    if f.group != hg {
        return Err(Error::InvalidSubgroup("function is not defined on the subgroup".into()));
    }
    let mut ext = vec![C64::new(0.0, 0.0); h.parent.order()];
    for (i, &m) in h.members.iter().enumerate() {
        ext[m] = f.values[i];
    }
    let ext = GroupFunction::new(h.parent.clone(), ext)?;
    let on_h = fp_lambda_norm(f, p, cfg)?.lower_bound;
    let on_g = fp_lambda_norm(&ext, p, cfg)?.lower_bound;
    let difference = (on_h - on_g).abs();
    Ok(NormComparison {
        smaller_side: on_h,
        larger_side: on_g,
        difference,
        holds: difference <= NORM_AGREEMENT,
    })
}

/// `π(f)(sN) = Σ_{n∈N} f(sn)`.
pub fn pushforward(n: &Subgroup, f: &GroupFunction) -> Result<GroupFunction> {
    let (q, proj) = n.quotient()?;
    let mut values = vec![C64::new(0.0, 0.0); q.order()];
    for (s, &c) in proj.iter().enumerate() {
        values[c] += f.values[s];
    }
    GroupFunction::new(q, values)
}

/// Checks `‖π(f)‖ ≤ ‖f‖ + 1e-6` for the quotient map `G → G/N`.
pub fn quotient_contraction_check(
    n: &Subgroup,
    f: &GroupFunction,
    p: Exponent,
    cfg: &SearchConfig,
) -> Result<NormComparison> {
    if f.group != n.parent {
        return Err(Error::DimensionMismatch {
            expected: n.parent.order(),
            found: f.group.order(),
        });
    }
    let pf = pushforward(n, f)?;
    let down = fp_lambda_norm(&pf, p, cfg)?.lower_bound;
    let up = fp_lambda_norm(f, p, cfg)?.lower_bound;
    Ok(NormComparison {
        smaller_side: down,
        larger_side: up,
        difference: up - down,
        holds: down <= up + NORM_AGREEMENT,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn p(v: f64) -> Exponent {
        Exponent::new(v).unwrap()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn named_groups() {
        let k = FiniteGroup::from_name("Z2xZ2").unwrap();
        assert_eq!(k.order(), 4);
        assert_eq!((0..4).filter(|&g| k.element_order(g) == 2).count(), 3);
        let s3 = FiniteGroup::from_name("S3").unwrap();
        assert!(!s3.is_abelian());
        assert!(FiniteGroup::from_name("Q8").is_err());
        assert_eq!(FiniteGroup::from_name("trivial").unwrap().order(), 1);
    }

    #[test]
    fn bad_tables_rejected() {
        let labels = || vec!["a".to_string(), "b".to_string()];
        assert!(FiniteGroup::new(labels(), vec![vec![0, 1], vec![1, 1]]).is_err());
        assert!(FiniteGroup::new(labels(), vec![vec![0, 1]]).is_err());
        let json = r#"{"elements": [0, 1, 2], "table": [[0,1,2],[1,2,0],[2,0,1]]}"#;
        let g: FiniteGroup = serde_json::from_str(json).unwrap();
        assert_eq!(g.elements()[2], "2");
    }

    #[test]
    fn conv_matrix_examples() {
        let z3 = FiniteGroup::cyclic(3);
        assert_eq!(
            conv_matrix(&GroupFunction::delta(&z3, 0)),
            Operator::identity(WeightedSpace::uniform(3))
        );
        let lt = conv_matrix(&GroupFunction::delta(&z3, 1));
        for u in 0..3 {
            assert_eq!(lt.get((u + 1) % 3, u), c(1.0, 0.0));
        }
        let z2 = FiniteGroup::cyclic(2);
        let f = GroupFunction::new(z2, vec![c(2.0, 1.0), c(-3.0, 0.5)]).unwrap();
        let m = conv_matrix(&f);
        assert_eq!(
            m.rows(),
            vec![vec![c(2.0, 1.0), c(-3.0, 0.5)], vec![c(-3.0, 0.5), c(2.0, 1.0)]]
        );
    }

    #[test]
    fn conv_matrix_is_multiplicative() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for g in [FiniteGroup::symmetric3(), FiniteGroup::from_name("Z2xZ4").unwrap()] {
            let f = GroupFunction::random(&g, &mut rng);
            let h = GroupFunction::random(&g, &mut rng);
            let lhs = conv_matrix(&f.convolve(&h).unwrap());
            let rhs = conv_matrix(&f).compose(&conv_matrix(&h)).unwrap();
            assert!(lhs.max_abs_diff(&rhs) < 1e-12);
        }
    }

    #[test]
    fn z2_values() {
        let cfg = SearchConfig::default();
        let one = c(1.0, 0.0);
        for q in [1.0, 1.5, 3.0, 4.0] {
            assert_relative_eq!(z2_norm(one, one, p(q), &cfg).unwrap().lower_bound, 1.0, epsilon = 1e-12);
            assert_relative_eq!(
                z2_norm(one, -one, p(q), &cfg).unwrap().lower_bound,
                1.0,
                epsilon = 1e-12
            );
            assert_relative_eq!(
                z2_norm(one, c(0.0, 0.0), p(q), &cfg).unwrap().lower_bound,
                1.0,
                epsilon = 1e-9
            );
        }
        let mi = c(0.0, -1.0);
        assert_relative_eq!(
            z2_norm(one, mi, p(1.0), &cfg).unwrap().lower_bound,
            2f64.sqrt(),
            epsilon = 1e-12
        );
        assert_relative_eq!(
            z2_norm(one, mi, p(2.0), &cfg).unwrap().lower_bound,
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn z2_norm_matches_group_norm() {
        let (a, b) = (c(0.3, -1.0), c(2.0, 0.25));
        let f = GroupFunction::new(FiniteGroup::cyclic(2), vec![(a + b) * 0.5, (a - b) * 0.5]).unwrap();
        let cfg = SearchConfig::default();
        let x = z2_norm(a, b, p(3.0), &cfg).unwrap().lower_bound;
        let y = fp_lambda_norm(&f, p(3.0), &cfg).unwrap().lower_bound;
        assert_relative_eq!(x, y, max_relative = 1e-12);
        let z = z2_norm(b, a, p(3.0), &cfg).unwrap().lower_bound;
        assert_relative_eq!(x, z, max_relative = 1e-9);
    }

    #[test]
    fn p1_and_p2_closed_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cfg = SearchConfig::default();
        let g = FiniteGroup::cyclic(5);
        let f = GroupFunction::random(&g, &mut rng);
        assert_relative_eq!(
            fp_lambda_norm(&f, p(1.0), &cfg).unwrap().lower_bound,
            f.l1_norm(),
            max_relative = 1e-9
        );
        let fourier = (0..5)
            .map(|k| {
                (0..5)
                    .map(|j| f.values()[j] * C64::from_polar(1.0, std::f64::consts::TAU * (j * k) as f64 / 5.0))
                    .sum::<C64>()
                    .norm()
            })
            .fold(0.0, f64::max);
        assert_relative_eq!(
            fp_lambda_norm(&f, p(2.0), &cfg).unwrap().lower_bound,
            fourier,
            max_relative = 1e-8
        );
    }

    #[test]
    fn isometry_group_on_small_groups() {
        let cfg = SearchConfig::default();
        let r = isom_group_verify(&FiniteGroup::cyclic(3), p(3.0), 30, &cfg).unwrap();
        assert_eq!(r.violations(), 0);
        assert_eq!(r.translations_checked, 24);
        let r = isom_group_verify(&FiniteGroup::trivial(), p(1.5), 10, &cfg).unwrap();
        assert_eq!(r.violations(), 0);
        assert_eq!(
            isom_group_verify(&FiniteGroup::cyclic(3), p(2.0), 1, &cfg).unwrap_err(),
            Error::ExponentTwo
        );
    }

    #[test]
    fn phase_translation_distance() {
        assert_eq!(distance_to_phase_translations(&[c(0.0, 1.0), c(0.0, 0.0)]), 0.0);
        assert_relative_eq!(distance_to_phase_translations(&[c(1.0, 0.0), c(0.3, 0.0)]), 0.3);
        assert_relative_eq!(distance_to_phase_translations(&[c(0.5, 0.0), c(0.0, 0.0)]), 0.5);
    }

    #[test]
    fn recovered_groups() {
        let r = recover_group(&FiniteGroup::cyclic(4), p(3.0)).unwrap();
        assert_eq!(r.table.len(), 4);
        let k = FiniteGroup::from_name("Z2xZ2").unwrap();
        let r = recover_group(&k, p(1.5)).unwrap();
        assert!(find_isomorphism(&r.table, FiniteGroup::cyclic(4).table()).is_none());
        let r = recover_group(&FiniteGroup::symmetric3(), p(3.0)).unwrap();
        assert!(find_isomorphism(&r.table, FiniteGroup::cyclic(6).table()).is_none());
    }

    #[test]
    fn isomorphism_finder() {
        let a = FiniteGroup::from_name("Z2xZ3").unwrap();
        assert!(find_isomorphism(a.table(), FiniteGroup::cyclic(6).table()).is_some());
        let b = FiniteGroup::from_name("Z2xZ2").unwrap();
        assert!(find_isomorphism(b.table(), FiniteGroup::cyclic(4).table()).is_none());
    }

    #[test]
    fn hom_examples() {
        let z4 = FiniteGroup::cyclic(4);
        let z2 = FiniteGroup::cyclic(2);
        let one = vec![c(1.0, 0.0); 4];
        let id = HomCandidate::from_data(&z4, &z4, &[0, 1, 2, 3], &one).unwrap();
        let d = hom_decompose(&id, p(3.0), 1e-9).unwrap();
        assert_eq!(d.theta, vec![0, 1, 2, 3]);
        assert!(d.injective);

        let q = HomCandidate::from_data(&z4, &z2, &[0, 1, 0, 1], &one).unwrap();
        let d = hom_decompose(&q, p(3.0), 1e-9).unwrap();
        assert_eq!(d.theta, vec![0, 1, 0, 1]);
        assert!(!d.injective);

        let twist: Vec<C64> = (0..4).map(|k| c(0.0, 1.0).powi(k)).collect();
        let t = HomCandidate::from_data(&z4, &z4, &[0, 1, 2, 3], &twist).unwrap();
        let d = hom_decompose(&t, p(1.5), 1e-9).unwrap();
        assert_eq!(d.gamma, twist);
        assert!(d.injective);
    }

    #[test]
    fn hom_failures() {
        let z2 = FiniteGroup::cyclic(2);
        let half = Operator::from_real_rows(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap();
        let h = HomCandidate::new(
            z2.clone(),
            z2.clone(),
            vec![Operator::identity(WeightedSpace::uniform(2)), half],
        )
        .unwrap();
        assert_eq!(
            hom_decompose(&h, p(3.0), 1e-9).unwrap_err(),
            Error::NonSpatialImage { element: 1 }
        );

        let bad = HomCandidate::from_data(&z2, &z2, &[0, 1], &[c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert!(matches!(
            hom_decompose(&bad, p(3.0), 1e-9).unwrap_err(),
            Error::NotHomomorphism(_)
        ));

        let big = Operator::from_real_rows(&[&[0.0, 2.0], &[2.0, 0.0]]).unwrap();
        let h = HomCandidate::new(z2.clone(), z2, vec![Operator::identity(WeightedSpace::uniform(2)), big]).unwrap();
        assert!(matches!(
            hom_decompose(&h, p(3.0), 1e-9).unwrap_err(),
            Error::NotContractive { element: 1, .. }
        ));
    }

    #[test]
    fn sharp_properties() {
        let s3 = FiniteGroup::symmetric3();
        let r = s3.index_of("231").unwrap();
        assert_eq!(
            sharp(&GroupFunction::delta(&s3, r)),
            GroupFunction::delta(&s3, s3.inv(r))
        );
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = GroupFunction::random(&s3, &mut rng);
        let g = GroupFunction::random(&s3, &mut rng);
        assert_eq!(sharp(&sharp(&f)), f);
        let lhs = sharp(&f.convolve(&g).unwrap());
        let rhs = sharp(&g).convolve(&sharp(&f)).unwrap();
        assert!(lhs
            .values()
            .iter()
            .zip(rhs.values())
            .all(|(a, b)| (a - b).norm() < 1e-12));
        let z2 = FiniteGroup::cyclic(2);
        let h = GroupFunction::random(&z2, &mut rng);
        assert_eq!(sharp(&h), h);
    }

    #[test]
    fn duality_examples() {
        let cfg = SearchConfig::default();
        let z2 = FiniteGroup::cyclic(2);
        let f = GroupFunction::new(z2, vec![c(0.5, -0.5), c(0.5, 0.5)]).unwrap();
        let r = duality_check(&f, p(1.5), &cfg).unwrap();
        assert!(r.transpose_exact && r.agrees, "{r:?}");
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = GroupFunction::random(&FiniteGroup::cyclic(3), &mut rng);
        let r = duality_check(&f, p(4.0), &cfg).unwrap();
        assert!(r.transpose_exact && r.agrees, "{r:?}");
        assert!(duality_check(&f, p(1.0), &cfg).is_err());
    }

    #[test]
    fn subgroup_and_quotient() {
        let cfg = SearchConfig::default();
        let z4 = FiniteGroup::cyclic(4);
        assert!(Subgroup::new(&z4, vec![0, 1]).is_err());
        let h = Subgroup::new(&z4, vec![0, 2]).unwrap();
        let f = GroupFunction::new(h.as_group(), vec![c(0.5, -0.5), c(0.5, 0.5)]).unwrap();
        assert!(subgroup_isometry_check(&h, &f, p(3.0), &cfg).unwrap().holds);

        let r = quotient_contraction_check(&h, &GroupFunction::delta(&z4, 1), p(3.0), &cfg).unwrap();
        assert!(r.holds);
        assert_relative_eq!(r.smaller_side, 1.0, epsilon = 1e-12);

        let s3 = FiniteGroup::symmetric3();
        let t = Subgroup::new(&s3, vec![0, 1]).unwrap();
        assert!(!t.is_normal());
        assert!(matches!(t.quotient().unwrap_err(), Error::InvalidNormalSubgroup(_)));

        let z6 = FiniteGroup::cyclic(6);
        let n = Subgroup::new(&z6, vec![0, 2, 4]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = GroupFunction::random(&z6, &mut rng);
        assert!(quotient_contraction_check(&n, &f, p(3.0), &cfg).unwrap().holds);

        let trivial = Subgroup::new(&z6, vec![0]).unwrap();
        let r = quotient_contraction_check(&trivial, &f, p(3.0), &cfg).unwrap();
        assert!(r.difference.abs() < 1e-9);
    }
}
