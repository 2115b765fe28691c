//! Weighted `ℓ^p` arithmetic over finitely many atoms.
//!
//! A [`WeightedSpace`] is a finite set of atoms `0..n`, each carrying a strictly
//! positive mass. Every finite-dimensional `L^p` space is isometric to one of
//! these, so the rest of the crate works exclusively on them.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default tolerance for equality flags.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Complex sign `z/|z|`, with `sign(0) = 0`.
#[inline]
pub fn csign(z: C64) -> C64 {
    let r = z.norm();
    if r == 0.0 {
        C64::new(0.0, 0.0)
    } else {
        z / r
    }
}

/// An exponent `p ∈ [1, ∞)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Exponent(f64);

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_finite() && p >= 1.0 {
            Ok(Exponent(p))
        } else {
            Err(Error::InvalidExponent(p))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_two(self) -> bool {
        self.0 == 2.0
    }

    /// Hölder conjugate `p' = p/(p-1)`; infinite for `p = 1`.
    pub fn conjugate_value(self) -> f64 {
        if self.0 == 1.0 {
            f64::INFINITY
        } else {
            self.0 / (self.0 - 1.0)
        }
    }

    /// Hölder conjugate as an exponent. Fails for `p = 1` since `p' = ∞`.
    pub fn dual(self) -> Result<Exponent> {
        Exponent::new(self.conjugate_value())
    }
}

impl TryFrom<f64> for Exponent {
    type Error = Error;
    fn try_from(p: f64) -> Result<Self> {
        Exponent::new(p)
    }
}

impl From<Exponent> for f64 {
    fn from(p: Exponent) -> f64 {
        p.0
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Finite set of atoms with strictly positive masses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "WeightsRepr", into = "WeightsRepr")]
pub struct WeightedSpace {
    weights: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct WeightsRepr {
    weights: Vec<f64>,
}

impl TryFrom<WeightsRepr> for WeightedSpace {
    type Error = Error;
    fn try_from(r: WeightsRepr) -> Result<Self> {
        WeightedSpace::new(r.weights)
    }
}

impl From<WeightedSpace> for WeightsRepr {
    fn from(s: WeightedSpace) -> Self {
        WeightsRepr { weights: s.weights }
    }
}

impl WeightedSpace {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidWeights(format!("atom {i} has weight {w}")));
        }
        Ok(WeightedSpace { weights })
    }

    /// Counting measure on `n` atoms.
    pub fn uniform(n: usize) -> Self {
        WeightedSpace { weights: vec![1.0; n] }
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn weight(&self, atom: usize) -> f64 {
        self.weights[atom]
    }

    pub fn is_uniform(&self) -> bool {
        self.weights.iter().all(|&w| w == 1.0)
    }
}

/// Bijection of `0..n`, stored as the image list `i ↦ map[i]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Permutation(Vec<usize>);

impl TryFrom<Vec<usize>> for Permutation {
    type Error = Error;
    fn try_from(v: Vec<usize>) -> Result<Self> {
        Permutation::new(v)
    }
}

impl From<Permutation> for Vec<usize> {
    fn from(p: Permutation) -> Self {
        p.0
    }
}

impl Permutation {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let n = map.len();
        let mut seen = vec![false; n];
        for (i, &j) in map.iter().enumerate() {
            if j >= n {
                return Err(Error::InvalidPermutation(format!("{i} maps to {j}, outside 0..{n}")));
            }
            if std::mem::replace(&mut seen[j], true) {
                return Err(Error::InvalidPermutation(format!("{j} is hit twice")));
            }
        }
        Ok(Permutation(map))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    /// `self ∘ other`, i.e. `i ↦ self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&j| self.0[j]).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }
}

/// A vector of `ℓ^p` over a weighted space.
#[derive(Debug, Clone, PartialEq)]
pub struct LpVector {
    space: WeightedSpace,
    entries: Vec<C64>,
}

impl LpVector {
    pub fn new(space: WeightedSpace, entries: Vec<C64>) -> Result<Self> {
        if space.dim() != entries.len() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: entries.len(),
            });
        }
        Ok(LpVector { space, entries })
    }

    /// Vector over the counting measure.
    pub fn unweighted(entries: Vec<C64>) -> Self {
        LpVector {
            space: WeightedSpace::uniform(entries.len()),
            entries,
        }
    }

    pub fn from_real(space: WeightedSpace, entries: &[f64]) -> Result<Self> {
        LpVector::new(space, entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn space(&self) -> &WeightedSpace {
        &self.space
    }

    pub fn entries(&self) -> &[C64] {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    fn check_same_space(&self, other: &LpVector) -> Result<()> {
        if self.space != other.space {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &LpVector, f: impl Fn(C64, C64) -> C64) -> Result<LpVector> {
        self.check_same_space(other)?;
        Ok(LpVector {
            space: self.space.clone(),
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &LpVector) -> Result<LpVector> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &LpVector) -> Result<LpVector> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn scale(&self, c: C64) -> LpVector {
        LpVector {
            space: self.space.clone(),
            entries: self.entries.iter().map(|&a| a * c).collect(),
        }
    }

    /// Weighted sesquilinear pairing `Σ w_i x_i conj(y_i)`.
    pub fn pairing(&self, other: &LpVector) -> Result<C64> {
        self.check_same_space(other)?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .zip(self.space.weights())
            .map(|((&x, &y), &w)| x * y.conj() * w)
            .sum())
    }

    /// True when the pointwise product vanishes.
    pub fn disjoint_from(&self, other: &LpVector) -> bool {
        self.entries
            .iter()
            .zip(&other.entries)
            .all(|(a, b)| *a == C64::new(0.0, 0.0) || *b == C64::new(0.0, 0.0))
    }
}

/// `Σ_i w_i |x_i|^p`.
pub fn weighted_pnorm_pow(entries: &[C64], weights: &[f64], p: f64) -> f64 {
    entries.iter().zip(weights).map(|(x, &w)| w * x.norm().powf(p)).sum()
}

/// Unweighted p-norm; `p = ∞` gives the max modulus.
pub fn pnorm(entries: &[C64], p: f64) -> f64 {
    if p.is_infinite() {
        return entries.iter().map(|x| x.norm()).fold(0.0, f64::max);
    }
    if p == 1.0 {
        return entries.iter().map(|x| x.norm()).sum();
    }
    if p == 2.0 {
        return entries.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    }
    // scale by the max modulus to keep powf in range
    let m = entries.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if m == 0.0 {
        return 0.0;
    }
    m * entries
        .iter()
        .map(|x| (x.norm() / m).powf(p))
        .sum::<f64>()
        .powf(1.0 / p)
}

/// `(Σ_i w_i |x_i|^p)^{1/p}`.
pub fn vec_norm(x: &LpVector, p: Exponent) -> f64 {
    weighted_pnorm_pow(&x.entries, x.space.weights(), p.0).powf(1.0 / p.0)
}

/// Componentwise `sign(x_i) |x_i|^{p-1}`: the norming functional of `x`
/// under the weighted pairing, so that `⟨x, J(x)⟩ = ‖x‖_p^p`.
pub fn duality_map(x: &LpVector, p: Exponent) -> LpVector {
    LpVector {
        space: x.space.clone(),
        entries: duality_entries(&x.entries, p.0),
    }
}

pub(crate) fn duality_entries(x: &[C64], p: f64) -> Vec<C64> {
    x.iter()
        .map(|&z| {
            let r = z.norm();
            if r == 0.0 {
                C64::new(0.0, 0.0)
            } else if p == 1.0 {
                z / r
            } else {
                z * r.powf(p - 2.0)
            }
        })
        .collect()
}

/// Atomwise Radon–Nikodym derivative `d(μ∘φ⁻¹)/dμ`, i.e.
/// `w(φ⁻¹(i)) / w(i)`.
pub fn rn_derivative(space: &WeightedSpace, perm: &Permutation) -> Result<Vec<f64>> {
    if perm.len() != space.dim() {
        return Err(Error::InvalidPermutation(format!(
            "permutation of {} points on a space of {} atoms",
            perm.len(),
            space.dim()
        )));
    }
    let inv = perm.inverse();
    Ok((0..space.dim())
        .map(|i| space.weight(inv.apply(i)) / space.weight(i))
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChangeOfVariables {
    pub lhs: C64,
    pub rhs: C64,
    pub difference: f64,
}

/// Evaluates `∫ f dμ` and `∫ (φ∘f) · d(μ∘φ⁻¹)/dμ dμ`, where
/// `(φ∘f)(i) = f(φ⁻¹(i))`.
pub fn change_of_variables_check(f: &LpVector, perm: &Permutation) -> Result<ChangeOfVariables> {
    let space = f.space();
    let rn = rn_derivative(space, perm)?;
    let inv = perm.inverse();
    let lhs: C64 = f.entries.iter().zip(space.weights()).map(|(&x, &w)| x * w).sum();
    let rhs: C64 = (0..space.dim())
        .map(|i| f.entries[inv.apply(i)] * rn[i] * space.weight(i))
        .sum();
    Ok(ChangeOfVariables {
        lhs,
        rhs,
        difference: (lhs - rhs).norm(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ClarksonDirection {
    /// `lhs ≥ rhs` (p > 2)
    AtLeast,
    /// `lhs ≤ rhs` (p < 2)
    AtMost,
    /// parallelogram law (p = 2)
    Equal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClarksonRecord {
    pub lhs: f64,
    pub rhs: f64,
    pub direction: ClarksonDirection,
    /// The inequality in `direction` holds, up to `tol` relative slack.
    pub holds: bool,
    /// `|lhs - rhs| ≤ tol · max(1, rhs)`.
    pub equality: bool,
}

/// `‖x+y‖^p + ‖x−y‖^p` against `2(‖x‖^p + ‖y‖^p)`.
pub fn clarkson_check(x: &LpVector, y: &LpVector, p: Exponent, tol: f64) -> Result<ClarksonRecord> {
    let w = x.space.weights();
    let pv = p.value();
    let sum = x.add(y)?;
    let diff = x.sub(y)?;
    let lhs = weighted_pnorm_pow(&sum.entries, w, pv) + weighted_pnorm_pow(&diff.entries, w, pv);
    let rhs = 2.0 * (weighted_pnorm_pow(&x.entries, w, pv) + weighted_pnorm_pow(&y.entries, w, pv));
    let slack = tol * rhs.max(1.0);
    let direction = if pv > 2.0 {
        ClarksonDirection::AtLeast
    } else if pv < 2.0 {
        ClarksonDirection::AtMost
    } else {
        ClarksonDirection::Equal
    };
    let equality = (lhs - rhs).abs() <= slack;
    let holds = match direction {
        ClarksonDirection::AtLeast => lhs >= rhs - slack,
        ClarksonDirection::AtMost => lhs <= rhs + slack,
        ClarksonDirection::Equal => equality,
    };
    Ok(ClarksonRecord {
        lhs,
        rhs,
        direction,
        holds,
        equality,
    })
}

/// Bounded operator between weighted spaces. `matrix[(i, j)]` is the
/// coefficient from domain atom `j` to codomain atom `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    domain: WeightedSpace,
    codomain: WeightedSpace,
    matrix: DMatrix<C64>,
}

impl Operator {
    pub fn new(domain: WeightedSpace, codomain: WeightedSpace, matrix: DMatrix<C64>) -> Result<Self> {
        if matrix.ncols() != domain.dim() {
            return Err(Error::DimensionMismatch {
                expected: domain.dim(),
                found: matrix.ncols(),
            });
        }
        if matrix.nrows() != codomain.dim() {
            return Err(Error::DimensionMismatch {
                expected: codomain.dim(),
                found: matrix.nrows(),
            });
        }
        Ok(Operator {
            domain,
            codomain,
            matrix,
        })
    }

    /// Square operator on `space`.
    pub fn on_space(space: WeightedSpace, matrix: DMatrix<C64>) -> Result<Self> {
        Operator::new(space.clone(), space, matrix)
    }

    /// Operator between counting-measure spaces.
    pub fn unweighted(matrix: DMatrix<C64>) -> Self {
        Operator {
            domain: WeightedSpace::uniform(matrix.ncols()),
            codomain: WeightedSpace::uniform(matrix.nrows()),
            matrix,
        }
    }

    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        if let Some(bad) = rows.iter().find(|r| r.len() != ncols) {
            return Err(Error::DimensionMismatch {
                expected: ncols,
                found: bad.len(),
            });
        }
        Ok(Operator::unweighted(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j])))
    }

    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let rows: Vec<Vec<C64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect())
            .collect();
        Operator::from_rows(&rows)
    }

    pub fn identity(space: WeightedSpace) -> Self {
        let n = space.dim();
        Operator {
            domain: space.clone(),
            codomain: space,
            matrix: DMatrix::identity(n, n),
        }
    }

    pub fn zeros(domain: WeightedSpace, codomain: WeightedSpace) -> Self {
        let m = DMatrix::zeros(codomain.dim(), domain.dim());
        Operator {
            domain,
            codomain,
            matrix: m,
        }
    }

    /// Diagonal multiplication operator.
    pub fn diagonal(space: WeightedSpace, diag: &[C64]) -> Result<Self> {
        if diag.len() != space.dim() {
            return Err(Error::DimensionMismatch {
                expected: space.dim(),
                found: diag.len(),
            });
        }
        let n = diag.len();
        Operator::on_space(
            space,
            DMatrix::from_fn(n, n, |i, j| if i == j { diag[i] } else { C64::new(0.0, 0.0) }),
        )
    }

    pub fn domain(&self) -> &WeightedSpace {
        &self.domain
    }

    pub fn codomain(&self) -> &WeightedSpace {
        &self.codomain
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.matrix
    }

    pub fn nrows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.matrix.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.domain == self.codomain
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.matrix[(i, j)]
    }

    pub fn rows(&self) -> Vec<Vec<C64>> {
        (0..self.nrows())
            .map(|i| (0..self.ncols()).map(|j| self.matrix[(i, j)]).collect())
            .collect()
    }

    pub fn apply(&self, x: &LpVector) -> Result<LpVector> {
        if x.space() != &self.domain {
            return Err(Error::DimensionMismatch {
                expected: self.domain.dim(),
                found: x.dim(),
            });
        }
        let v = &self.matrix * nalgebra::DVector::from_column_slice(x.entries());
        LpVector::new(self.codomain.clone(), v.as_slice().to_vec())
    }

    /// Composition `self · other`.
    pub fn compose(&self, other: &Operator) -> Result<Operator> {
        if other.codomain != self.domain {
            return Err(Error::DimensionMismatch {
                expected: self.domain.dim(),
                found: other.codomain.dim(),
            });
        }
        Ok(Operator {
            domain: other.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: &self.matrix * &other.matrix,
        })
    }

    fn check_same_shape(&self, other: &Operator) -> Result<()> {
        if self.domain != other.domain || self.codomain != other.codomain {
            return Err(Error::DimensionMismatch {
                expected: self.ncols(),
                found: other.ncols(),
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &Operator) -> Result<Operator> {
        self.check_same_shape(other)?;
        Ok(Operator {
            matrix: &self.matrix + &other.matrix,
            ..self.clone()
        })
    }

    pub fn sub(&self, other: &Operator) -> Result<Operator> {
        self.check_same_shape(other)?;
        Ok(Operator {
            matrix: &self.matrix - &other.matrix,
            ..self.clone()
        })
    }

    pub fn scale(&self, c: C64) -> Operator {
        Operator {
            matrix: &self.matrix * c,
            ..self.clone()
        }
    }

    /// Plain (non-conjugated) transpose between the swapped spaces.
    pub fn transpose(&self) -> Operator {
        Operator {
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            matrix: self.matrix.transpose(),
        }
    }

    pub fn try_inverse(&self) -> Option<Operator> {
        if !self.is_square() {
            return None;
        }
        self.matrix.clone().try_inverse().map(|inv| Operator {
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            matrix: inv,
        })
    }

    pub fn max_abs(&self) -> f64 {
        self.matrix.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation `max |a_ij - b_ij|`.
    pub fn max_abs_diff(&self, other: &Operator) -> f64 {
        if self.matrix.shape() != other.matrix.shape() {
            return f64::INFINITY;
        }
        self.matrix
            .iter()
            .zip(other.matrix.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// The matrix of the same operator between counting-measure spaces:
    /// `D_cod^{1/p} A D_dom^{-1/p}`. Operator norms are preserved.
    pub fn unweighted_matrix(&self, p: f64) -> DMatrix<C64> {
        if self.domain.is_uniform() && self.codomain.is_uniform() {
            return self.matrix.clone();
        }
        let rw: Vec<f64> = self.codomain.weights().iter().map(|w| w.powf(1.0 / p)).collect();
        let cw: Vec<f64> = self.domain.weights().iter().map(|w| w.powf(-1.0 / p)).collect();
        DMatrix::from_fn(self.nrows(), self.ncols(), |i, j| self.matrix[(i, j)] * rw[i] * cw[j])
    }

    /// `max_j Σ_i w_i |a_ij| / w_j`: the exact `p = 1` operator norm.
    pub fn weighted_column_sum_norm(&self) -> f64 {
        (0..self.ncols())
            .map(|j| {
                (0..self.nrows())
                    .map(|i| self.codomain.weight(i) * self.matrix[(i, j)].norm())
                    .sum::<f64>()
                    / self.domain.weight(j)
            })
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn p(v: f64) -> Exponent {
        Exponent::new(v).unwrap()
    }

    #[test]
    fn exponent_range() {
        assert!(Exponent::new(0.5).is_err());
        assert!(Exponent::new(f64::INFINITY).is_err());
        assert!(Exponent::new(f64::NAN).is_err());
        assert_eq!(p(1.0).conjugate_value(), f64::INFINITY);
        assert_relative_eq!(p(3.0).conjugate_value(), 1.5);
        assert!(p(1.0).dual().is_err());
    }

    #[test]
    fn weights_must_be_positive() {
        assert!(WeightedSpace::new(vec![1.0, 0.0]).is_err());
        assert!(WeightedSpace::new(vec![1.0, -2.0]).is_err());
        assert!(WeightedSpace::new(vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn norm_examples() {
        let x = LpVector::from_real(WeightedSpace::uniform(2), &[1.0, 0.0]).unwrap();
        assert_relative_eq!(vec_norm(&x, p(3.0)), 1.0);
        let x = LpVector::from_real(WeightedSpace::uniform(2), &[1.0, 1.0]).unwrap();
        assert_relative_eq!(vec_norm(&x, p(2.0)), 2f64.sqrt());
        let x = LpVector::from_real(WeightedSpace::new(vec![2.0, 1.0]).unwrap(), &[1.0, 1.0]).unwrap();
        assert_relative_eq!(vec_norm(&x, p(1.0)), 3.0);
    }

    #[test]
    fn vector_dimension_mismatch() {
        let err = LpVector::new(WeightedSpace::uniform(3), vec![c(1.0, 0.0)]).unwrap_err();
        assert_eq!(err, Error::DimensionMismatch { expected: 3, found: 1 });
        let x = LpVector::unweighted(vec![c(1.0, 0.0)]);
        let y = LpVector::unweighted(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        assert!(x.add(&y).is_err());
    }

    #[test]
    fn duality_examples() {
        let x = LpVector::unweighted(vec![c(1.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(duality_map(&x, p(2.0)).entries(), &[c(1.0, 0.0), c(0.0, 0.0)]);
        let x = LpVector::unweighted(vec![c(2.0, 0.0), c(0.0, 0.0)]);
        assert_eq!(duality_map(&x, p(3.0)).entries(), &[c(4.0, 0.0), c(0.0, 0.0)]);
        let x = LpVector::unweighted(vec![c(0.0, 1.0), c(1.0, 0.0)]);
        assert_eq!(duality_map(&x, p(2.0)).entries(), &[c(0.0, 1.0), c(1.0, 0.0)]);
        // sign(0) = 0 even at p = 1
        assert_eq!(duality_map(&x.scale(c(0.0, 0.0)), p(1.0)).entries()[0], c(0.0, 0.0));
    }

    #[test]
    fn rn_examples() {
        let swap = Permutation::new(vec![1, 0]).unwrap();
        assert_eq!(
            rn_derivative(&WeightedSpace::uniform(2), &swap).unwrap(),
            vec![1.0, 1.0]
        );
        let space = WeightedSpace::new(vec![1.0, 2.0]).unwrap();
        assert_eq!(rn_derivative(&space, &swap).unwrap(), vec![2.0, 0.5]);
        let cycle = Permutation::new(vec![1, 2, 0]).unwrap();
        let space = WeightedSpace::new(vec![3.0, 3.0, 3.0]).unwrap();
        assert_eq!(rn_derivative(&space, &cycle).unwrap(), vec![1.0; 3]);
        assert!(rn_derivative(&space, &swap).is_err());
    }

    #[test]
    fn permutation_validation() {
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![0, 2]).is_err());
        let s = Permutation::new(vec![2, 0, 1]).unwrap();
        assert!(s.compose(&s.inverse()).is_identity());
    }

    #[test]
    fn change_of_variables_examples() {
        let swap = Permutation::new(vec![1, 0]).unwrap();
        let f = LpVector::from_real(WeightedSpace::uniform(2), &[1.0, 1.0]).unwrap();
        assert_eq!(change_of_variables_check(&f, &swap).unwrap().difference, 0.0);
        let f = LpVector::from_real(WeightedSpace::new(vec![1.0, 2.0]).unwrap(), &[1.0, 0.0]).unwrap();
        let r = change_of_variables_check(&f, &swap).unwrap();
        assert_eq!(r.lhs, c(1.0, 0.0));
        assert_eq!(r.rhs, c(1.0, 0.0));
        assert_eq!(r.difference, 0.0);
    }

    #[test]
    fn clarkson_examples() {
        let e1 = LpVector::from_real(WeightedSpace::uniform(2), &[1.0, 0.0]).unwrap();
        let e2 = LpVector::from_real(WeightedSpace::uniform(2), &[0.0, 1.0]).unwrap();
        let r = clarkson_check(&e1, &e2, p(3.0), DEFAULT_TOL).unwrap();
        assert!(r.equality && r.holds);

        let r = clarkson_check(&e1, &e1, p(2.0), DEFAULT_TOL).unwrap();
        assert_eq!((r.lhs, r.rhs), (4.0, 4.0));
        assert!(r.equality);

        let r = clarkson_check(&e1, &e1, p(4.0), DEFAULT_TOL).unwrap();
        assert_eq!((r.lhs, r.rhs), (16.0, 4.0));
        assert_eq!(r.direction, ClarksonDirection::AtLeast);
        assert!(r.holds && !r.equality);
    }

    #[test]
    fn unweighted_matrix_preserves_p1_norm() {
        let space = WeightedSpace::new(vec![1.0, 4.0]).unwrap();
        let a = Operator::on_space(
            space,
            DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(2.0, 0.0), c(0.0, 1.0), c(0.5, 0.0)]),
        )
        .unwrap();
        let b = Operator::unweighted(a.unweighted_matrix(1.0));
        assert_relative_eq!(
            a.weighted_column_sum_norm(),
            b.weighted_column_sum_norm(),
            max_relative = 1e-14
        );
    }
}
