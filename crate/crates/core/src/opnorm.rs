//! `p → p` operator norms.
//!
//! Computing `‖A‖_{p→p}` is NP-hard for general `p`, so the main entry point
//! [`opnorm`] returns a *lower bound*: the best value reached by a multistart
//! dual-ascent iteration (the power method of Boyd, generalised to complex
//! entries). For domains of dimension at most three, [`opnorm_oracle`] gives an
//! independent brute-force reference with a certified upper bound.
//!
//! Weights are absorbed once, up front: an operator between weighted spaces
//! has the same norm as `D_cod^{1/p} A D_dom^{-1/p}` between counting
//! measures.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::json::Cx;
use crate::lpcore::{duality_entries, pnorm, Exponent, LpVector, Operator, C64};

/// Smallest reciprocal 1-norm condition number treated as invertible.
pub const RCOND_THRESHOLD: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    /// Random unit start vectors, on top of the deterministic start menu.
    pub starts: usize,
    pub max_iterations: usize,
    /// Stop a start once the relative gain of one step drops below this.
    pub convergence_tol: f64,
    pub rng_seed: u64,
    pub certify_max_dim: usize,
    /// Magnitude steps per coordinate in the oracle grid (phases use twice as many).
    pub grid_resolution: usize,
    /// Coordinate-pair starts are only enumerated up to this dimension.
    pub pair_start_max_dim: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            starts: 16,
            max_iterations: 5000,
            convergence_tol: 1e-14,
            rng_seed: 0,
            certify_max_dim: 3,
            grid_resolution: 10,
            pair_start_max_dim: 16,
        }
    }
}

impl SearchConfig {
    pub fn with_seed(seed: u64) -> Self {
        SearchConfig {
            rng_seed: seed,
            ..Default::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if self.starts == 0 && self.pair_start_max_dim == 0 {
            return Err(Error::Parse("search needs at least one start".into()));
        }
        // also rejects NaN
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(self.convergence_tol > 0.0) {
            return Err(Error::Parse("convergence_tol must be positive".into()));
        }
        Ok(())
    }
}

/// Result of a norm computation. `lower_bound` is always attained by `witness`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormEstimate {
    pub lower_bound: f64,
    pub witness: LpVector,
    pub certified: bool,
    pub upper_bound: Option<f64>,
    pub iterations: usize,
    pub starts: usize,
}

impl NormEstimate {
    pub fn value(&self) -> f64 {
        self.lower_bound
    }

    /// `upper_bound - lower_bound` when an upper bound is known.
    pub fn gap(&self) -> Option<f64> {
        self.upper_bound.map(|u| u - self.lower_bound)
    }
}

#[derive(Serialize)]
struct NormEstimateRepr {
    lower_bound: f64,
    witness: Vec<Cx>,
    certified: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    upper_bound: Option<f64>,
    iterations: usize,
    starts: usize,
}

impl Serialize for NormEstimate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        NormEstimateRepr {
            lower_bound: self.lower_bound,
            witness: crate::json::to_cx(self.witness.entries()),
            certified: self.certified,
            upper_bound: self.upper_bound,
            iterations: self.iterations,
            starts: self.starts,
        }
        .serialize(s)
    }
}

fn matvec(m: &DMatrix<C64>, x: &[C64], out: &mut [C64]) {
    out.iter_mut().for_each(|o| *o = C64::new(0.0, 0.0));
    for (j, &xj) in x.iter().enumerate() {
        if xj == C64::new(0.0, 0.0) {
            continue;
        }
        for (o, &a) in out.iter_mut().zip(m.column(j).iter()) {
            *o += a * xj;
        }
    }
}

/// `Bᴴ y`
fn adjoint_matvec(m: &DMatrix<C64>, y: &[C64], out: &mut [C64]) {
    for (j, o) in out.iter_mut().enumerate() {
        *o = m.column(j).iter().zip(y).map(|(a, &yi)| a.conj() * yi).sum();
    }
}

/// Maximiser of `Re⟨x, z⟩` over the unit `p`-sphere.
fn dual_step(z: &[C64], p: f64) -> Vec<C64> {
    if p == 1.0 {
        // p' = ∞: the best x sits on the coordinate of largest |z_k|
        let mut best = 0;
        let mut best_mod = -1.0;
        for (k, zk) in z.iter().enumerate() {
            let r = zk.norm();
            if r > best_mod {
                best = k;
                best_mod = r;
            }
        }
        let mut x = vec![C64::new(0.0, 0.0); z.len()];
        x[best] = crate::lpcore::csign(z[best]);
        if best_mod == 0.0 {
            x[best] = C64::new(1.0, 0.0);
        }
        return x;
    }
    let q = p / (p - 1.0);
    let mut x = duality_entries(z, q);
    normalize(&mut x, p);
    x
}

fn normalize(x: &mut [C64], p: f64) -> f64 {
    let n = pnorm(x, p);
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
    n
}

struct Ascent {
    value: f64,
    x: Vec<C64>,
    iterations: usize,
    trace: Vec<f64>,
}

/// Dual-ascent iteration from `x0` on an unweighted matrix. Each accepted
/// step does not decrease `‖Bx‖_p`; a step that would is rejected and ends
/// the run.
fn ascend(b: &DMatrix<C64>, p: f64, x0: Vec<C64>, max_iter: usize, tol: f64, keep_trace: bool) -> Ascent {
    let (m, n) = b.shape();
    let mut x = x0;
    normalize(&mut x, p);
    let mut y = vec![C64::new(0.0, 0.0); m];
    let mut z = vec![C64::new(0.0, 0.0); n];
    matvec(b, &x, &mut y);
    let mut value = pnorm(&y, p);
    let mut trace = Vec::new();
    if keep_trace {
        trace.push(value);
    }
    let mut iterations = 0;
    while iterations < max_iter && value > 0.0 {
        let dy = duality_entries(&y, p);
        adjoint_matvec(b, &dy, &mut z);
        if z.iter().all(|v| *v == C64::new(0.0, 0.0)) {
            break;
        }
        let xn = dual_step(&z, p);
        let mut yn = vec![C64::new(0.0, 0.0); m];
        matvec(b, &xn, &mut yn);
        let vn = pnorm(&yn, p);
        iterations += 1;
        if vn <= value {
            break;
        }
        let gain = vn - value;
        x = xn;
        y = yn;
        value = vn;
        if keep_trace {
            trace.push(value);
        }
        if gain <= tol * value {
            break;
        }
    }
    Ascent {
        value,
        x,
        iterations,
        trace,
    }
}

fn start_vectors(n: usize, p: f64, cfg: &SearchConfig) -> Vec<Vec<C64>> {
    let zero = C64::new(0.0, 0.0);
    let mut starts = Vec::new();
    for k in 0..n {
        let mut e = vec![zero; n];
        e[k] = C64::new(1.0, 0.0);
        starts.push(e);
    }
    if n >= 2 && n <= cfg.pair_start_max_dim {
        let s = 2f64.powf(-1.0 / p);
        let phases = [
            C64::new(1.0, 0.0),
            C64::new(0.0, 1.0),
            C64::new(-1.0, 0.0),
            C64::new(0.0, -1.0),
        ];
        for i in 0..n {
            for j in i + 1..n {
                for ph in phases {
                    let mut v = vec![zero; n];
                    v[i] = C64::new(s, 0.0);
                    v[j] = ph * s;
                    starts.push(v);
                }
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    for _ in 0..cfg.starts {
        let v: Vec<C64> = (0..n)
            .map(|_| C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng)))
            .collect();
        starts.push(v);
    }
    starts
}

fn check_nonempty(a: &Operator) -> Result<()> {
    if a.nrows() == 0 || a.ncols() == 0 {
        Err(Error::EmptyOperator)
    } else {
        Ok(())
    }
}

/// Converts an unweighted unit vector back to the operator's weighted domain.
fn weighted_witness(a: &Operator, x: &[C64], p: f64) -> LpVector {
    let entries = x
        .iter()
        .zip(a.domain().weights())
        .map(|(&v, &w)| v * w.powf(-1.0 / p))
        .collect();
    LpVector::new(a.domain().clone(), entries).expect("witness matches domain")
}

/// Multistart lower bound for `‖A‖_{p→p}`.
///
/// Starts: every coordinate vector, every coordinate pair with relative phase
/// in `{1, i, -1, -i}` (up to `cfg.pair_start_max_dim`), and `cfg.starts`
/// seeded Gaussian vectors. Starts run in parallel and are merged by value,
/// ties going to the earlier start, so the result depends only on the seed.
pub fn opnorm(a: &Operator, p: Exponent, cfg: &SearchConfig) -> Result<NormEstimate> {
    check_nonempty(a)?;
    cfg.validate()?;
    let pv = p.value();
    let b = a.unweighted_matrix(pv);
    let starts = start_vectors(a.ncols(), pv, cfg);
    let nstarts = starts.len();
    let runs: Vec<Ascent> = starts
        .into_par_iter()
        .map(|x0| ascend(&b, pv, x0, cfg.max_iterations, cfg.convergence_tol, false))
        .collect();
    let iterations = runs.iter().map(|r| r.iterations).sum();
    let mut best = 0;
    for (k, r) in runs.iter().enumerate() {
        if r.value > runs[best].value {
            best = k;
        }
    }
    let best = &runs[best];
    Ok(NormEstimate {
        lower_bound: best.value,
        witness: weighted_witness(a, &best.x, pv),
        certified: false,
        upper_bound: None,
        iterations,
        starts: nstarts,
    })
}

/// Value sequence of a single ascent run from `x0` (in the weighted domain).
/// Used to check that the iteration never decreases.
pub fn ascent_trace(a: &Operator, p: Exponent, x0: &LpVector, max_iterations: usize) -> Result<Vec<f64>> {
    check_nonempty(a)?;
    let pv = p.value();
    let b = a.unweighted_matrix(pv);
    let x: Vec<C64> = x0
        .entries()
        .iter()
        .zip(a.domain().weights())
        .map(|(&v, &w)| v * w.powf(1.0 / pv))
        .collect();
    Ok(ascend(&b, pv, x, max_iterations, 0.0, true).trace)
}

fn col_sum_norm(b: &DMatrix<C64>) -> f64 {
    b.column_iter()
        .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn row_sum_norm(b: &DMatrix<C64>) -> f64 {
    b.row_iter()
        .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Largest singular value.
pub fn spectral_norm(b: &DMatrix<C64>) -> f64 {
    if b.nrows() == 0 || b.ncols() == 0 {
        return 0.0;
    }
    b.clone().singular_values().iter().copied().fold(0.0, f64::max)
}

/// Riesz–Thorin upper bounds, interpolating between `p ∈ {1, 2, ∞}`.
fn interpolation_upper_bound(b: &DMatrix<C64>, p: f64) -> f64 {
    let n1 = col_sum_norm(b);
    let ninf = row_sum_norm(b);
    let n2 = spectral_norm(b);
    let outer = n1.powf(1.0 / p) * ninf.powf(1.0 - 1.0 / p);
    let through_two = if p <= 2.0 {
        let t = 2.0 - 2.0 / p;
        n1.powf(1.0 - t) * n2.powf(t)
    } else {
        let t = 2.0 / p;
        n2.powf(t) * ninf.powf(1.0 - t)
    };
    outer.min(through_two)
}

/// Ratio `‖Bx‖_p / ‖x‖_p` with `x_face = 1` and the remaining coordinates
/// given in polar form.
fn face_ratio(b: &DMatrix<C64>, p: f64, face: usize, polar: &[(f64, f64)], buf: &mut [C64], out: &mut [C64]) -> f64 {
    let mut k = 0;
    for (i, slot) in buf.iter_mut().enumerate() {
        if i == face {
            *slot = C64::new(1.0, 0.0);
        } else {
            let (r, t) = polar[k];
            *slot = C64::from_polar(r, t);
            k += 1;
        }
    }
    matvec(b, buf, out);
    pnorm(out, p) / pnorm(buf, p)
}

#[derive(Clone)]
struct GridPoint {
    value: f64,
    face: usize,
    polar: Vec<(f64, f64)>,
}

const POLISH_CANDIDATES: usize = 12;

fn push_candidate(top: &mut Vec<GridPoint>, g: GridPoint) {
    if top.len() == POLISH_CANDIDATES && g.value <= top[top.len() - 1].value {
        return;
    }
    let pos = top.iter().position(|t| g.value > t.value).unwrap_or(top.len());
    top.insert(pos, g);
    top.truncate(POLISH_CANDIDATES);
}

/// Pattern search on the polar parameters over every combination of
/// `{−h, 0, +h}` moves, halving the steps until they drop below `1e-11`.
fn polish(b: &DMatrix<C64>, p: f64, start: &GridPoint, r_step: f64, t_step: f64) -> GridPoint {
    let n = b.ncols();
    let mut buf = vec![C64::new(0.0, 0.0); n];
    let mut out = vec![C64::new(0.0, 0.0); b.nrows()];
    let mut cur = start.clone();
    let params = 2 * cur.polar.len();
    let moves = 3usize.pow(params as u32);
    let mut steps = (r_step, t_step);
    let mut evals = 0;
    while steps.0.max(steps.1) > 1e-11 && evals < 400_000 {
        let mut improved = false;
        for code in 0..moves {
            let mut trial = cur.polar.clone();
            let mut c = code;
            let mut zero = true;
            for k in 0..params {
                let d = (c % 3) as f64 - 1.0;
                c /= 3;
                if d == 0.0 {
                    continue;
                }
                zero = false;
                let slot = &mut trial[k / 2];
                if k % 2 == 0 {
                    slot.0 = (slot.0 + d * steps.0).max(0.0);
                } else {
                    slot.1 += d * steps.1;
                }
            }
            if zero {
                continue;
            }
            let v = face_ratio(b, p, cur.face, &trial, &mut buf, &mut out);
            evals += 1;
            if v > cur.value {
                cur.value = v;
                cur.polar = trial;
                improved = true;
            }
        }
        if !improved {
            steps = (steps.0 * 0.5, steps.1 * 0.5);
        }
    }
    cur
}

/// Brute-force reference norm for domains of dimension `≤ 3`.
///
/// Every unit direction is, after scaling, a vector whose largest coordinate
/// equals `1`; the oracle scans each such face on a grid of magnitudes
/// `k/R` and phases `2πl/(2R)`, polishes the best grid points by pattern
/// search, and reports
/// `upper = min(M(1+ε)/(1−ε), Riesz–Thorin bound)`, where `M` is the grid
/// maximum and `ε = (n−1)^{1/p} (1/(2R) + π/(2R))` bounds the distance from
/// any face point to the grid.
pub fn opnorm_oracle(a: &Operator, p: Exponent, grid_resolution: usize) -> Result<NormEstimate> {
    const MAX_DIM: usize = 3;
    check_nonempty(a)?;
    let n = a.ncols();
    if n > MAX_DIM {
        return Err(Error::OracleScope { dim: n, max: MAX_DIM });
    }
    let pv = p.value();
    let b = a.unweighted_matrix(pv);
    let rt = interpolation_upper_bound(&b, pv);

    if n == 1 {
        let v = pnorm(b.column(0).as_slice(), pv);
        return Ok(NormEstimate {
            lower_bound: v,
            witness: weighted_witness(a, &[C64::new(1.0, 0.0)], pv),
            certified: true,
            upper_bound: Some(v),
            iterations: 1,
            starts: 1,
        });
    }

    let res = grid_resolution.max(2);
    let phases = 2 * res;
    let r_step = 1.0 / res as f64;
    let t_step = std::f64::consts::TAU / phases as f64;
    // (magnitude, phase) samples for one free coordinate; zero magnitude once
    let mut samples: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    for k in 1..=res {
        for l in 0..phases {
            samples.push((k as f64 * r_step, l as f64 * t_step));
        }
    }
    let free = n - 1;
    let jobs: Vec<(usize, usize)> = (0..n)
        .flat_map(|face| (0..samples.len()).map(move |s| (face, s)))
        .collect();
    let partials: Vec<(Vec<GridPoint>, usize)> = jobs
        .par_iter()
        .map(|&(face, s0)| {
            let mut buf = vec![C64::new(0.0, 0.0); n];
            let mut out = vec![C64::new(0.0, 0.0); b.nrows()];
            let mut top = Vec::with_capacity(POLISH_CANDIDATES + 1);
            let mut count = 0;
            let mut polar = vec![samples[s0]; free];
            let inner: &[(f64, f64)] = if free == 2 { &samples } else { &[(0.0, 0.0)] };
            for &s1 in inner {
                if free == 2 {
                    polar[1] = s1;
                }
                let v = face_ratio(&b, pv, face, &polar, &mut buf, &mut out);
                count += 1;
                push_candidate(
                    &mut top,
                    GridPoint {
                        value: v,
                        face,
                        polar: polar.clone(),
                    },
                );
            }
            (top, count)
        })
        .collect();
    let mut top = Vec::new();
    let mut samples_seen = 0;
    for (part, count) in partials {
        samples_seen += count;
        for g in part {
            push_candidate(&mut top, g);
        }
    }
    let grid_max = top[0].value;
    let polished: Vec<GridPoint> = top.par_iter().map(|g| polish(&b, pv, g, r_step, t_step)).collect();
    let mut best = &polished[0];
    for g in &polished {
        if g.value > best.value {
            best = g;
        }
    }

    let eps = (free as f64).powf(1.0 / pv) * (0.5 * r_step + 0.5 * t_step);
    let mut upper = rt;
    if eps < 1.0 {
        upper = upper.min(grid_max * (1.0 + eps) / (1.0 - eps));
    }
    let lower = best.value.max(grid_max);
    let upper = upper.max(lower);

    let mut x = vec![C64::new(0.0, 0.0); n];
    let mut out = vec![C64::new(0.0, 0.0); b.nrows()];
    face_ratio(&b, pv, best.face, &best.polar, &mut x, &mut out);
    normalize(&mut x, pv);
    Ok(NormEstimate {
        lower_bound: lower,
        witness: weighted_witness(a, &x, pv),
        certified: true,
        upper_bound: Some(upper),
        iterations: samples_seen,
        starts: POLISH_CANDIDATES,
    })
}

/// Runs the estimator and, for small domains, merges in the oracle bounds.
pub fn opnorm_certified(a: &Operator, p: Exponent, cfg: &SearchConfig) -> Result<NormEstimate> {
    if a.ncols() > cfg.certify_max_dim {
        return Err(Error::OracleScope {
            dim: a.ncols(),
            max: cfg.certify_max_dim,
        });
    }
    let est = opnorm(a, p, cfg)?;
    let oracle = opnorm_oracle(a, p, cfg.grid_resolution)?;
    let (lower, witness) = if oracle.lower_bound > est.lower_bound {
        (oracle.lower_bound, oracle.witness)
    } else {
        (est.lower_bound, est.witness)
    };
    Ok(NormEstimate {
        lower_bound: lower,
        witness,
        certified: true,
        upper_bound: oracle.upper_bound.map(|u| u.max(lower)),
        iterations: est.iterations + oracle.iterations,
        starts: est.starts + oracle.starts,
    })
}

/// Reciprocal condition number in the 1-norm of the unweighted matrix,
/// zero when singular.
pub fn reciprocal_condition(a: &Operator, p: Exponent) -> f64 {
    if !a.is_square() || a.ncols() == 0 {
        return 0.0;
    }
    let b = a.unweighted_matrix(p.value());
    match b.clone().try_inverse() {
        Some(inv) => {
            let c = col_sum_norm(&b) * col_sum_norm(&inv);
            if c.is_finite() && c > 0.0 {
                1.0 / c
            } else {
                0.0
            }
        }
        None => 0.0,
    }
}

/// True when `A` is invertible with `‖A‖ ≤ 1 + tol` and `‖A⁻¹‖ ≤ 1 + tol`.
pub fn is_invertible_isometry(a: &Operator, p: Exponent, tol: f64) -> bool {
    is_invertible_isometry_with(a, p, tol, &SearchConfig::default())
}

pub fn is_invertible_isometry_with(a: &Operator, p: Exponent, tol: f64, cfg: &SearchConfig) -> bool {
    if !a.is_square() || a.ncols() == 0 || reciprocal_condition(a, p) < RCOND_THRESHOLD {
        return false;
    }
    let Some(inv) = a.try_inverse() else {
        return false;
    };
    let within = |op: &Operator| opnorm(op, p, cfg).is_ok_and(|e| e.lower_bound <= 1.0 + tol);
    within(a) && within(&inv)
}

/// `‖s x s⁻¹‖`.
pub fn conjugated_norm(x: &Operator, s: &Operator, p: Exponent, cfg: &SearchConfig) -> Result<NormEstimate> {
    if reciprocal_condition(s, p) < RCOND_THRESHOLD {
        return Err(Error::SingularConjugator);
    }
    let inv = s.try_inverse().ok_or(Error::SingularConjugator)?;
    let conj = s.compose(x)?.compose(&inv)?;
    opnorm(&conj, p, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lpcore::{vec_norm, WeightedSpace};
    use approx::assert_relative_eq;

    fn p(v: f64) -> Exponent {
        Exponent::new(v).unwrap()
    }

    fn real(rows: &[&[f64]]) -> Operator {
        Operator::from_real_rows(rows).unwrap()
    }

    #[test]
    fn identity_has_norm_one() {
        let a = Operator::identity(WeightedSpace::uniform(3));
        let e = opnorm(&a, p(1.5), &SearchConfig::default()).unwrap();
        assert_relative_eq!(e.lower_bound, 1.0, max_relative = 1e-14);
        assert!(!e.certified);
    }

    #[test]
    fn swap_has_norm_one() {
        let a = real(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let e = opnorm(&a, p(4.0), &SearchConfig::default()).unwrap();
        assert_relative_eq!(e.lower_bound, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn averaging_projection_has_norm_one() {
        let a = real(&[&[0.5, 0.5], &[0.5, 0.5]]);
        let e = opnorm(&a, p(3.0), &SearchConfig::default()).unwrap();
        assert_relative_eq!(e.lower_bound, 1.0, max_relative = 1e-12);
        let o = opnorm_oracle(&a, p(3.0), 16).unwrap();
        assert_relative_eq!(o.lower_bound, 1.0, max_relative = 1e-9);
        assert!(o.upper_bound.unwrap() >= 1.0);
    }

    #[test]
    fn witness_attains_lower_bound() {
        let space = WeightedSpace::new(vec![1.0, 3.0, 0.5]).unwrap();
        let m = DMatrix::from_fn(3, 3, |i, j| C64::new((i * 3 + j) as f64 - 4.0, (i as f64) - (j as f64)));
        let a = Operator::on_space(space, m).unwrap();
        let e = opnorm(&a, p(3.0), &SearchConfig::default()).unwrap();
        let ax = a.apply(&e.witness).unwrap();
        let ratio = vec_norm(&ax, p(3.0)) / vec_norm(&e.witness, p(3.0));
        assert_relative_eq!(ratio, e.lower_bound, max_relative = 1e-10);
    }

    #[test]
    fn empty_operator_rejected() {
        let a = Operator::unweighted(DMatrix::zeros(0, 0));
        assert_eq!(
            opnorm(&a, p(2.0), &SearchConfig::default()).unwrap_err(),
            Error::EmptyOperator
        );
    }

    #[test]
    fn oracle_examples() {
        let id = Operator::identity(WeightedSpace::uniform(2));
        let o = opnorm_oracle(&id, p(3.0), 16).unwrap();
        assert!(o.certified);
        assert_relative_eq!(o.lower_bound, 1.0, max_relative = 1e-12);
        assert!(o.upper_bound.unwrap() - 1.0 <= 1e-4);

        let h = real(&[&[1.0, 1.0], &[1.0, -1.0]]);
        let o = opnorm_oracle(&h, p(1.0), 16).unwrap();
        assert_relative_eq!(o.lower_bound, 2.0, max_relative = 1e-12);

        let o = opnorm_oracle(&h, p(4.0), 16).unwrap();
        assert!(o.lower_bound >= 2f64.sqrt() && o.lower_bound <= 2.0);
        assert!(o.upper_bound.unwrap() >= o.lower_bound);

        let big = Operator::identity(WeightedSpace::uniform(4));
        assert_eq!(
            opnorm_oracle(&big, p(3.0), 8).unwrap_err(),
            Error::OracleScope { dim: 4, max: 3 }
        );
    }

    #[test]
    fn certify_refuses_large_domains() {
        let big = Operator::identity(WeightedSpace::uniform(4));
        let err = opnorm_certified(&big, p(3.0), &SearchConfig::default()).unwrap_err();
        assert!(err.is_scope());
    }

    #[test]
    fn isometry_examples() {
        let d = Operator::diagonal(WeightedSpace::uniform(2), &[C64::new(0.0, 1.0), C64::new(-1.0, 0.0)]).unwrap();
        for q in [1.0, 1.5, 2.0, 3.0, 4.0] {
            assert!(is_invertible_isometry(&d, p(q), 1e-9));
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let rot = real(&[&[s, -s], &[s, s]]);
        assert!(is_invertible_isometry(&rot, p(2.0), 1e-9));
        assert!(!is_invertible_isometry(&rot, p(4.0), 1e-9));
        let singular = real(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert!(!is_invertible_isometry(&singular, p(3.0), 1e-9));
    }

    #[test]
    fn conjugated_norm_examples() {
        let cfg = SearchConfig::default();
        let x = real(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let id = Operator::identity(WeightedSpace::uniform(2));
        assert_relative_eq!(
            conjugated_norm(&x, &id, p(3.0), &cfg).unwrap().lower_bound,
            opnorm(&x, p(3.0), &cfg).unwrap().lower_bound
        );
        let s = real(&[&[1.0, 0.0], &[0.0, 2.0]]);
        assert_relative_eq!(
            conjugated_norm(&x, &s, p(3.0), &cfg).unwrap().lower_bound,
            0.5,
            max_relative = 1e-14
        );
        let singular = real(&[&[1.0, 0.0], &[0.0, 0.0]]);
        assert_eq!(
            conjugated_norm(&x, &singular, p(3.0), &cfg).unwrap_err(),
            Error::SingularConjugator
        );
    }

    #[test]
    fn ascent_is_monotone() {
        let m = DMatrix::from_fn(4, 4, |i, j| {
            C64::new(((i + 2 * j) % 5) as f64 - 2.0, (i * j) as f64 * 0.3)
        });
        let a = Operator::unweighted(m);
        let x0 = LpVector::unweighted(vec![C64::new(1.0, 0.2); 4]);
        for q in [1.0, 1.5, 3.0, 4.0] {
            let trace = ascent_trace(&a, p(q), &x0, 200).unwrap();
            assert!(trace.windows(2).all(|w| w[1] >= w[0]));
        }
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let m = DMatrix::from_fn(5, 5, |i, j| C64::new((i as f64 - j as f64).sin(), (i * j) as f64 * 0.1));
        let a = Operator::unweighted(m);
        let cfg = SearchConfig::with_seed(42);
        assert_eq!(opnorm(&a, p(3.0), &cfg).unwrap(), opnorm(&a, p(3.0), &cfg).unwrap());
    }
}
