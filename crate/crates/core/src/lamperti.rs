//! Spatial structure of operators on weighted `ℓ^p_n`.
//!
//! For `p ≠ 2` every invertible isometry of `ℓ^p` is a weighted permutation
//! with unimodular phases, `T = m_f u_φ`. This module builds such operators,
//! recovers `(φ, f)` from a matrix, handles the partial versions attached to
//! quadruples `(E, F, φ, f)`, and tests hermitian elements.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::{cnum, cvec};
use crate::lpcore::{rn_derivative, Exponent, Operator, Permutation, WeightedSpace, C64};
use crate::opnorm::{is_invertible_isometry_with, opnorm, NormEstimate, SearchConfig};

/// Entries below this fraction of the largest modulus count as zero.
pub const SUPPORT_THRESHOLD: f64 = 1e-10;

const UNIMODULAR_TOL: f64 = 1e-9;

fn is_zero(z: C64, scale: f64) -> bool {
    z.norm() <= SUPPORT_THRESHOLD * scale
}

/// `m_f u_φ` on a weighted space: a permutation `φ` of the atoms together
/// with unimodular phases `f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpatialIsometry {
    pub space: WeightedSpace,
    pub perm: Permutation,
    #[serde(with = "cvec")]
    pub phases: Vec<C64>,
}

impl SpatialIsometry {
    pub fn new(space: WeightedSpace, perm: Permutation, phases: Vec<C64>) -> Result<Self> {
        if perm.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: perm.len(),
            });
        }
        if phases.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: phases.len(),
            });
        }
        if let Some(i) = phases.iter().position(|z| (z.norm() - 1.0).abs() > UNIMODULAR_TOL) {
            return Err(Error::Parse(format!("phase {i} is not unimodular")));
        }
        Ok(SpatialIsometry { space, perm, phases })
    }

    /// Product `(m_f u_φ)(m_g u_ψ) = m_{f·(g∘φ⁻¹)} u_{φ∘ψ}`.
    pub fn compose(&self, other: &SpatialIsometry) -> Result<SpatialIsometry> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch {
                expected: self.space.dim(),
                found: other.space.dim(),
            });
        }
        let inv = self.perm.inverse();
        let phases = (0..self.space.dim())
            .map(|i| self.phases[i] * other.phases[inv.apply(i)])
            .collect();
        SpatialIsometry::new(self.space.clone(), self.perm.compose(&other.perm), phases)
    }
}

/// Matrix of `m_f u_φ`: entry `(i, φ⁻¹(i))` is `f_i (w(φ⁻¹(i)) / w(i))^{1/p}`.
pub fn build_spatial_isometry(si: &SpatialIsometry, p: Exponent) -> Operator {
    let n = si.space.dim();
    let rn = rn_derivative(&si.space, &si.perm).expect("validated on construction");
    let inv = si.perm.inverse();
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, inv.apply(i))] = si.phases[i] * rn[i].powf(1.0 / p.value());
    }
    Operator::on_space(si.space.clone(), m).expect("square on its space")
}

fn refuse_two(p: Exponent) -> Result<()> {
    if p.is_two() {
        Err(Error::ExponentTwo)
    } else {
        Ok(())
    }
}

/// Recovers `(φ, f)` with `A = m_f u_φ`.
pub fn lamperti_decompose(a: &Operator, p: Exponent, tol: f64) -> Result<SpatialIsometry> {
    lamperti_decompose_with(a, p, tol, &SearchConfig::default())
}

pub fn lamperti_decompose_with(a: &Operator, p: Exponent, tol: f64, cfg: &SearchConfig) -> Result<SpatialIsometry> {
    refuse_two(p)?;
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.ncols(),
            found: a.nrows(),
        });
    }
    if !is_invertible_isometry_with(a, p, tol, cfg) {
        return Err(Error::NotIsometry { p: p.value() });
    }
    let n = a.ncols();
    let scale = a.max_abs();
    let mut perm = vec![usize::MAX; n];
    for j in 0..n {
        let support: Vec<usize> = (0..n).filter(|&i| !is_zero(a.get(i, j), scale)).collect();
        match support.as_slice() {
            [i] => perm[j] = *i,
            _ => {
                return Err(Error::NotSpatial(format!(
                    "column {j} has {} nonzero entries",
                    support.len()
                )))
            }
        }
    }
    let perm = Permutation::new(perm).map_err(|e| Error::NotSpatial(e.to_string()))?;
    let inv = perm.inverse();
    let phases: Vec<C64> = (0..n)
        .map(|i| {
            let z = a.get(i, inv.apply(i));
            z / z.norm()
        })
        .collect();
    let si = SpatialIsometry::new(a.domain().clone(), perm, phases)?;
    let rebuilt = build_spatial_isometry(&si, p);
    let dev = rebuilt.max_abs_diff(a);
    if dev > tol.max(1e-12) * scale.max(1.0) {
        return Err(Error::NotSpatial(format!(
            "moduli differ from the weight ratios by {dev:e}"
        )));
    }
    Ok(si)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsometryDistance {
    /// `max(‖f−g‖_∞, 2 − 2δ_{φ,ψ})`
    pub analytic: f64,
    pub numeric: NormEstimate,
    /// `|analytic − numeric| ≤ 1e-6`
    pub agrees: bool,
}

pub const DISTANCE_AGREEMENT: f64 = 1e-6;

/// Distance between `m_f u_φ` and `m_g u_ψ`, analytically and by norm search.
pub fn isometry_distance(
    a: &SpatialIsometry,
    b: &SpatialIsometry,
    p: Exponent,
    cfg: &SearchConfig,
) -> Result<IsometryDistance> {
    if a.space != b.space {
        return Err(Error::DimensionMismatch {
            expected: a.space.dim(),
            found: b.space.dim(),
        });
    }
    let sup = a
        .phases
        .iter()
        .zip(&b.phases)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max);
    let perm_term = if a.perm == b.perm { 0.0 } else { 2.0 };
    let analytic = sup.max(perm_term);
    let diff = build_spatial_isometry(a, p).sub(&build_spatial_isometry(b, p))?;
    let numeric = opnorm(&diff, p, cfg)?;
    let agrees = (numeric.lower_bound - analytic).abs() <= DISTANCE_AGREEMENT;
    Ok(IsometryDistance {
        analytic,
        numeric,
        agrees,
    })
}

/// `(E, F, φ: E → F, f)`: the data of a spatial partial isometry.
/// Phases are indexed by the atoms of `F`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SpatialQuadruple {
    map: BTreeMap<usize, usize>,
    phases: BTreeMap<usize, C64>,
}

impl SpatialQuadruple {
    /// Builds a quadruple from `(e, φ(e), f(φ(e)))` triples.
    pub fn new(triples: impl IntoIterator<Item = (usize, usize, C64)>) -> Result<Self> {
        let mut q = SpatialQuadruple::default();
        for (e, f, phase) in triples {
            if (phase.norm() - 1.0).abs() > UNIMODULAR_TOL {
                return Err(Error::Parse(format!("phase at {f} is not unimodular")));
            }
            if q.map.insert(e, f).is_some() {
                return Err(Error::InvalidPermutation(format!("{e} mapped twice")));
            }
            if q.phases.insert(f, phase).is_some() {
                return Err(Error::InvalidPermutation(format!("{f} hit twice")));
            }
        }
        Ok(q)
    }

    pub fn domain_set(&self) -> Vec<usize> {
        self.map.keys().copied().collect()
    }

    pub fn range_set(&self) -> Vec<usize> {
        self.phases.keys().copied().collect()
    }

    pub fn image(&self, e: usize) -> Option<usize> {
        self.map.get(&e).copied()
    }

    pub fn phase(&self, f: usize) -> Option<C64> {
        self.phases.get(&f).copied()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// `(F, E, φ⁻¹, f̄∘φ)`, the data of the reverse partial isometry.
    pub fn reverse(&self) -> SpatialQuadruple {
        let mut r = SpatialQuadruple::default();
        for (&e, &f) in &self.map {
            r.map.insert(f, e);
            r.phases.insert(e, self.phases[&f].conj());
        }
        r
    }

    /// Spatial isometry data when `E = F = all atoms`.
    pub fn as_isometry(&self, space: &WeightedSpace) -> Option<SpatialIsometry> {
        let n = space.dim();
        if self.map.len() != n || self.map.keys().copied().ne(0..n) {
            return None;
        }
        let perm = Permutation::new(self.map.values().copied().collect()).ok()?;
        let phases = (0..n).map(|i| self.phases[&i]).collect();
        SpatialIsometry::new(space.clone(), perm, phases).ok()
    }

    fn check_space(&self, space: &WeightedSpace) -> Result<()> {
        let n = space.dim();
        match self.map.iter().find(|(&e, &f)| e >= n || f >= n) {
            Some((e, f)) => Err(Error::InvalidPermutation(format!(
                "{e} -> {f} leaves a space of {n} atoms"
            ))),
            None => Ok(()),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct QuadrupleRepr {
    domain: Vec<usize>,
    range: Vec<usize>,
    bijection: Vec<(usize, usize)>,
    phases: Vec<PhaseEntry>,
}

#[derive(Serialize, Deserialize)]
struct PhaseEntry {
    atom: usize,
    #[serde(with = "cnum")]
    phase: C64,
}

impl Serialize for SpatialQuadruple {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        QuadrupleRepr {
            domain: self.domain_set(),
            range: self.range_set(),
            bijection: self.map.iter().map(|(&e, &f)| (e, f)).collect(),
            phases: self
                .phases
                .iter()
                .map(|(&atom, &phase)| PhaseEntry { atom, phase })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpatialQuadruple {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = QuadrupleRepr::deserialize(d)?;
        let phases: BTreeMap<usize, C64> = r.phases.iter().map(|e| (e.atom, e.phase)).collect();
        let triples = r
            .bijection
            .iter()
            .map(|&(e, f)| (e, f, phases.get(&f).copied().unwrap_or(C64::new(f64::NAN, 0.0))));
        SpatialQuadruple::new(triples.collect::<Vec<_>>()).map_err(serde::de::Error::custom)
    }
}

/// The partial isometry of `(E, F, φ, f)` and its reverse. The forward map
/// sends `e_j ↦ f(φ(j)) (w_j / w_{φ(j)})^{1/p} e_{φ(j)}` for `j ∈ E`, so
/// `reverse · s = 1_E` and `s · reverse = 1_F`.
pub fn build_spatial_partial_isometry(
    space: &WeightedSpace,
    q: &SpatialQuadruple,
    p: Exponent,
) -> Result<(Operator, Operator)> {
    q.check_space(space)?;
    let n = space.dim();
    let pv = p.value();
    let mut s = DMatrix::zeros(n, n);
    let mut r = DMatrix::zeros(n, n);
    for (&e, &f) in &q.map {
        let ratio = space.weight(e) / space.weight(f);
        let phase = q.phases[&f];
        s[(f, e)] = phase * ratio.powf(1.0 / pv);
        r[(e, f)] = phase.conj() * ratio.powf(-1.0 / pv);
    }
    Ok((
        Operator::on_space(space.clone(), s)?,
        Operator::on_space(space.clone(), r)?,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum SpatialVerdict {
    Spatial {
        quadruple: SpatialQuadruple,
    },
    NotSpatial {
        reason: String,
        row: Option<usize>,
        col: Option<usize>,
    },
}

impl SpatialVerdict {
    pub fn is_spatial(&self) -> bool {
        matches!(self, SpatialVerdict::Spatial { .. })
    }

    pub fn quadruple(&self) -> Option<&SpatialQuadruple> {
        match self {
            SpatialVerdict::Spatial { quadruple } => Some(quadruple),
            SpatialVerdict::NotSpatial { .. } => None,
        }
    }
}

/// Decides whether `S` is a spatial partial isometry: at most one nonzero per
/// row and column, each of modulus `(w_col / w_row)^{1/p}` (relative `tol`).
pub fn classify_spatial(s: &Operator, p: Exponent, tol: f64) -> Result<SpatialVerdict> {
    refuse_two(p)?;
    if !s.is_square() {
        return Ok(SpatialVerdict::NotSpatial {
            reason: "not an operator on a single space".into(),
            row: None,
            col: None,
        });
    }
    let n = s.ncols();
    let space = s.domain();
    let scale = s.max_abs();
    let mut row_used: Vec<Option<usize>> = vec![None; n];
    let mut triples = Vec::new();
    for j in 0..n {
        let mut hit = None;
        for i in 0..n {
            if is_zero(s.get(i, j), scale) {
                continue;
            }
            if hit.is_some() {
                return Ok(SpatialVerdict::NotSpatial {
                    reason: "column has more than one nonzero entry".into(),
                    row: Some(i),
                    col: Some(j),
                });
            }
            if row_used[i].is_some() {
                return Ok(SpatialVerdict::NotSpatial {
                    reason: "row has more than one nonzero entry".into(),
                    row: Some(i),
                    col: Some(j),
                });
            }
            hit = Some(i);
            row_used[i] = Some(j);
        }
        if let Some(i) = hit {
            let z = s.get(i, j);
            let expected = (space.weight(j) / space.weight(i)).powf(1.0 / p.value());
            if (z.norm() - expected).abs() > tol * expected {
                return Ok(SpatialVerdict::NotSpatial {
                    reason: format!("entry modulus {} differs from weight ratio {}", z.norm(), expected),
                    row: Some(i),
                    col: Some(j),
                });
            }
            triples.push((j, i, z / z.norm()));
        }
    }
    Ok(SpatialVerdict::Spatial {
        quadruple: SpatialQuadruple::new(triples)?,
    })
}

/// `exp(M)` by scaling and squaring of the Taylor series.
pub fn matrix_exp(m: &DMatrix<C64>) -> DMatrix<C64> {
    let n = m.nrows();
    let norm1 = m
        .column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm1 > 0.5 {
        (norm1 / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let x = m / C64::new(2f64.powi(squarings), 0.0);
    let mut sum = DMatrix::<C64>::identity(n, n);
    let mut term = DMatrix::<C64>::identity(n, n);
    // with ‖x‖ ≤ 1/2 the tail after a term is at most twice that term
    for k in 1..64 {
        term = &term * &x / C64::new(k as f64, 0.0);
        sum += &term;
        let tn = term
            .column_iter()
            .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max);
        if 2.0 * tn <= 1e-16 {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    sum
}

/// `t ∈ {kπ/32 : k = 1..32} ∪ {π/2}`.
pub fn default_t_grid() -> Vec<f64> {
    let mut t: Vec<f64> = (1..=32).map(|k| k as f64 * std::f64::consts::PI / 32.0).collect();
    if !t.contains(&std::f64::consts::FRAC_PI_2) {
        t.push(std::f64::consts::FRAC_PI_2);
    }
    t
}

/// True iff `‖exp(i t a)‖_p ≤ 1 + tol` for every `t` in the grid.
pub fn hermitian_test(a: &Operator, p: Exponent, t_grid: &[f64], tol: f64) -> Result<bool> {
    hermitian_test_with(a, p, t_grid, tol, &SearchConfig::default())
}

pub fn hermitian_test_with(a: &Operator, p: Exponent, t_grid: &[f64], tol: f64, cfg: &SearchConfig) -> Result<bool> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.ncols(),
            found: a.nrows(),
        });
    }
    for &t in t_grid {
        let e = matrix_exp(&(a.matrix() * C64::new(0.0, t)));
        let op = Operator::on_space(a.domain().clone(), e)?;
        if opnorm(&op, p, cfg)?.lower_bound > 1.0 + tol {
            return Ok(false);
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoreEntry {
    pub index: usize,
    pub diagonal: bool,
    pub max_off_diagonal: f64,
    pub location: Option<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoreReport {
    pub entries: Vec<CoreEntry>,
    pub failing: Vec<usize>,
}

impl CoreReport {
    pub fn all_pass(&self) -> bool {
        self.failing.is_empty()
    }
}

/// Checks that each generator is a multiplication operator (diagonal in the
/// atomic basis). At `p ≠ 2` these are exactly the elements of the core.
pub fn core_check(generators: &[Operator], p: Exponent, tol: f64) -> Result<CoreReport> {
    refuse_two(p)?;
    let mut entries = Vec::new();
    let mut failing = Vec::new();
    for (index, g) in generators.iter().enumerate() {
        let mut max_off = 0.0;
        let mut location = None;
        for i in 0..g.nrows() {
            for j in 0..g.ncols() {
                if i != j && g.get(i, j).norm() > max_off {
                    max_off = g.get(i, j).norm();
                    location = Some((i, j));
                }
            }
        }
        let diagonal = g.is_square() && max_off <= tol * g.max_abs().max(1.0);
        if !diagonal {
            failing.push(index);
        }
        entries.push(CoreEntry {
            index,
            diagonal,
            max_off_diagonal: max_off,
            location: if diagonal { None } else { location },
        });
    }
    Ok(CoreReport { entries, failing })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoExponentVerdict {
    pub decomposition: SpatialIsometry,
    /// `w(φ⁻¹(i)) = w(i)` for every atom.
    pub weight_preserving: bool,
    pub unimodular_entries: bool,
    /// First atom whose Radon–Nikodym ratio differs from 1.
    pub counterexample: Option<(usize, f64)>,
}

impl TwoExponentVerdict {
    pub fn passed(&self) -> bool {
        self.weight_preserving && self.unimodular_entries
    }
}

/// An isometry for two distinct exponents must permute atoms of equal mass.
pub fn two_exponent_check(a: &Operator, p: Exponent, q: Exponent, tol: f64) -> Result<TwoExponentVerdict> {
    if p == q {
        return Err(Error::InvalidExponent(q.value()));
    }
    let cfg = SearchConfig::default();
    for e in [p, q] {
        if !is_invertible_isometry_with(a, e, tol, &cfg) {
            return Err(Error::NotIsometry { p: e.value() });
        }
    }
    let exponent = if p.is_two() { q } else { p };
    let decomposition = lamperti_decompose_with(a, exponent, tol, &cfg)?;
    let rn = rn_derivative(&decomposition.space, &decomposition.perm)?;
    let counterexample = rn
        .iter()
        .enumerate()
        .find(|(_, r)| (**r - 1.0).abs() > tol)
        .map(|(i, &r)| (i, r));
    let scale = a.max_abs();
    let unimodular_entries = a
        .matrix()
        .iter()
        .filter(|z| !is_zero(**z, scale))
        .all(|z| (z.norm() - 1.0).abs() <= tol);
    Ok(TwoExponentVerdict {
        decomposition,
        weight_preserving: counterexample.is_none(),
        unimodular_entries,
        counterexample,
    })
}
