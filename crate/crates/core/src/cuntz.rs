//! Leavitt algebras, their spatial representations, and graph relations.
//!
//! `L_n` is generated by `s_1..s_n, t_1..t_n` with `t_j s_k = δ_{jk}` and
//! `Σ s_j t_j = 1`. Expressions are reduced to a canonical basis of words
//! `s_μ t_ν`. On `ℓ^p(Z)` the generators act by `s_j e_m = e_{nm+j}`; this
//! module truncates that representation to a window `[−N, N]` and keeps
//! track of which images fall outside.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lamperti::{build_spatial_partial_isometry, classify_spatial, SpatialVerdict};
use crate::lpcore::{Exponent, Operator, WeightedSpace, C64};
use crate::opnorm::{opnorm, SearchConfig};

/// Generator of `L_n`, indexed from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    S(usize),
    T(usize),
}

impl Letter {
    pub fn index(self) -> usize {
        match self {
            Letter::S(j) | Letter::T(j) => j,
        }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Letter::S(j) => write!(f, "s{j}"),
            Letter::T(j) => write!(f, "t{j}"),
        }
    }
}

fn parse_letters(s: &str) -> Result<Vec<Letter>> {
    let s: String = s.chars().filter(|c| !c.is_whitespace() && *c != '*').collect();
    if s.is_empty() || s == "1" {
        return Ok(Vec::new());
    }
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let kind = bytes[i];
        let start = i + 1;
        i = start;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        let k: usize = s[start..i]
            .parse()
            .map_err(|_| Error::InvalidWord(format!("missing index in {s:?}")))?;
        out.push(match kind {
            b's' => Letter::S(k),
            b't' => Letter::T(k),
            _ => return Err(Error::InvalidWord(format!("unknown letter in {s:?}"))),
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LeavittWord {
    n: usize,
    letters: Vec<Letter>,
    coefficient: C64,
}

fn check_letters(n: usize, letters: &[Letter]) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidWord(format!("need at least two generators, got {n}")));
    }
    match letters.iter().find(|l| l.index() == 0 || l.index() > n) {
        Some(l) => Err(Error::InvalidWord(format!("{l} out of range for L_{n}"))),
        None => Ok(()),
    }
}

impl LeavittWord {
    pub fn new(n: usize, letters: Vec<Letter>, coefficient: C64) -> Result<Self> {
        check_letters(n, &letters)?;
        Ok(LeavittWord {
            n,
            letters,
            coefficient,
        })
    }

    pub fn parse(n: usize, s: &str) -> Result<Self> {
        Self::new(n, parse_letters(s)?, C64::new(1.0, 0.0))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn coefficient(&self) -> C64 {
        self.coefficient
    }
}

/// Finite linear combination of words in `L_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeavittExpr {
    n: usize,
    terms: BTreeMap<Vec<Letter>, C64>,
}

impl LeavittExpr {
    pub fn zero(n: usize) -> Self {
        LeavittExpr {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(n: usize) -> Self {
        Self::word(n, Vec::new())
    }

    fn word(n: usize, letters: Vec<Letter>) -> Self {
        let mut e = Self::zero(n);
        e.terms.insert(letters, C64::new(1.0, 0.0));
        e
    }

    pub fn from_words(words: &[LeavittWord]) -> Result<Self> {
        let n = words.first().map_or(2, |w| w.n);
        let mut e = Self::zero(n);
        for w in words {
            if w.n != n {
                return Err(Error::Arity(n, w.n));
            }
            e.add_term(w.letters.clone(), w.coefficient);
        }
        Ok(e)
    }

    /// Parses `"s1t1 + s2t2 - 2*t1s2"`; `1` is the empty word.
    pub fn parse(n: usize, s: &str) -> Result<Self> {
        let mut e = Self::zero(n);
        let mut sign = 1.0;
        let mut rest = s.trim();
        while !rest.is_empty() {
            let end = rest[1..].find(['+', '-']).map_or(rest.len(), |k| k + 1);
            let (head, tail) = rest.split_at(end);
            let mut term = head.trim();
            if let Some(t) = term.strip_prefix('+') {
                term = t.trim();
            } else if let Some(t) = term.strip_prefix('-') {
                sign = -sign;
                term = t.trim();
            }
            let (coef, word) = match term.split_once('*') {
                Some((c, w)) => (
                    c.trim()
                        .parse::<f64>()
                        .map_err(|_| Error::InvalidWord(format!("bad coefficient {c:?}")))?,
                    w,
                ),
                None => match term.parse::<f64>() {
                    Ok(c) => (c, ""),
                    Err(_) => (1.0, term),
                },
            };
            let letters = parse_letters(word)?;
            check_letters(n, &letters)?;
            e.add_term(letters, C64::new(sign * coef, 0.0));
            sign = 1.0;
            rest = tail.trim();
        }
        Ok(e)
    }

    fn add_term(&mut self, letters: Vec<Letter>, c: C64) {
        let slot = self.terms.entry(letters).or_insert(C64::new(0.0, 0.0));
        *slot += c;
        let zero = *slot == C64::new(0.0, 0.0);
        if zero {
            self.terms.retain(|_, v| *v != C64::new(0.0, 0.0));
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[Letter], C64)> {
        self.terms.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &LeavittExpr) -> Result<LeavittExpr> {
        if self.n != other.n {
            return Err(Error::Arity(self.n, other.n));
        }
        let mut e = self.clone();
        for (w, c) in &other.terms {
            e.add_term(w.clone(), *c);
        }
        Ok(e)
    }

    pub fn sub(&self, other: &LeavittExpr) -> Result<LeavittExpr> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: C64) -> LeavittExpr {
        let mut e = Self::zero(self.n);
        for (w, v) in &self.terms {
            e.add_term(w.clone(), v * c);
        }
        e
    }

    /// Concatenation product, without reduction.
    pub fn mul(&self, other: &LeavittExpr) -> Result<LeavittExpr> {
        if self.n != other.n {
            return Err(Error::Arity(self.n, other.n));
        }
        let mut e = Self::zero(self.n);
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                let mut w = a.clone();
                w.extend_from_slice(b);
                e.add_term(w, x * y);
            }
        }
        Ok(e)
    }
}

impl fmt::Display for LeavittExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (w, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if *c != C64::new(1.0, 0.0) {
                if c.im == 0.0 {
                    write!(f, "{}*", c.re)?;
                } else {
                    write!(f, "({}{:+}i)*", c.re, c.im)?;
                }
            }
            if w.is_empty() {
                write!(f, "1")?;
            }
            for l in w {
                write!(f, "{l}")?;
            }
        }
        Ok(())
    }
}

impl FromStr for LeavittExpr {
    type Err = Error;

    /// Infers `n` from the largest generator index (at least 2).
    fn from_str(s: &str) -> Result<Self> {
        let chars: Vec<char> = s.chars().collect();
        let mut n = 2;
        for (k, c) in chars.iter().enumerate() {
            if *c == 's' || *c == 't' {
                let digits: String = chars[k + 1..].iter().take_while(|d| d.is_ascii_digit()).collect();
                if let Ok(j) = digits.parse::<usize>() {
                    n = n.max(j);
                }
            }
        }
        Self::parse(n, s)
    }
}

/// One rewriting step on a word. `t_j s_k → δ_{jk}` anywhere, and at the
/// junction of `s_μ t_ν` the unit rule `s_n t_n → 1 − Σ_{j<n} s_j t_j`.
fn rewrite(n: usize, w: &[Letter]) -> Option<Vec<(Vec<Letter>, f64)>> {
    for i in 0..w.len().saturating_sub(1) {
        if let (Letter::T(j), Letter::S(k)) = (w[i], w[i + 1]) {
            if j != k {
                return Some(Vec::new());
            }
            let mut v = w[..i].to_vec();
            v.extend_from_slice(&w[i + 2..]);
            return Some(vec![(v, 1.0)]);
        }
    }
    for i in 0..w.len().saturating_sub(1) {
        if w[i] == Letter::S(n) && w[i + 1] == Letter::T(n) {
            let (pre, post) = (&w[..i], &w[i + 2..]);
            let mut out = vec![([pre, post].concat(), 1.0)];
            for j in 1..n {
                out.push(([pre, &[Letter::S(j), Letter::T(j)], post].concat(), -1.0));
            }
            return Some(out);
        }
    }
    None
}

/// Canonical form in the basis of words `s_μ t_ν` where `μ` does not end in
/// `s_n` or `ν` does not start with `t_n`.
///
/// Every rewrite either shortens a word or replaces the junction `s_n t_n`
/// with a junction `s_j t_j`, `j < n`, so the process terminates.
pub fn leavitt_normal_form(expr: &LeavittExpr) -> LeavittExpr {
    let n = expr.n;
    let mut pending: Vec<(Vec<Letter>, C64)> = expr.terms.iter().map(|(w, c)| (w.clone(), *c)).collect();
    let mut out = LeavittExpr::zero(n);
    while let Some((w, c)) = pending.pop() {
        match rewrite(n, &w) {
            None => out.add_term(w, c),
            Some(parts) => pending.extend(parts.into_iter().map(|(v, s)| (v, c * s))),
        }
    }
    out
}

/// True iff both expressions have the same normal form.
pub fn leavitt_equal(a: &LeavittExpr, b: &LeavittExpr) -> Result<bool> {
    Ok(leavitt_normal_form(&a.sub(b)?).is_zero())
}

/// Where a generator sends a basis vector of the window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Image {
    Index(i64),
    Zero,
    /// The image lies outside the window.
    Undefined,
}

/// `s_j e_m = e_{nm+j}`, `t_j e_m = e_{(m−j)/n}` (zero unless `n | m−j`),
/// restricted to indices `−N..=N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TruncatedRep {
    n: usize,
    radius: i64,
    p: Exponent,
}

impl TruncatedRep {
    pub fn new(n: usize, radius: usize, p: Exponent) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidWord(format!("need at least two generators, got {n}")));
        }
        if radius < n {
            return Err(Error::Truncation(format!("window radius {radius} below n = {n}")));
        }
        Ok(TruncatedRep {
            n,
            radius: radius as i64,
            p,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn radius(&self) -> i64 {
        self.radius
    }

    pub fn p(&self) -> Exponent {
        self.p
    }

    pub fn size(&self) -> usize {
        (2 * self.radius + 1) as usize
    }

    pub fn contains(&self, m: i64) -> bool {
        m.abs() <= self.radius
    }

    /// Position of index `m` in the window basis.
    pub fn position(&self, m: i64) -> usize {
        (m + self.radius) as usize
    }

    pub fn index_at(&self, pos: usize) -> i64 {
        pos as i64 - self.radius
    }

    fn bounded(&self, m: i64) -> Image {
        if self.contains(m) {
            Image::Index(m)
        } else {
            Image::Undefined
        }
    }

    pub fn act(&self, l: Letter, m: i64) -> Image {
        let n = self.n as i64;
        match l {
            Letter::S(j) => self.bounded(n * m + j as i64),
            Letter::T(j) => {
                let d = m - j as i64;
                if d.rem_euclid(n) == 0 {
                    self.bounded(d.div_euclid(n))
                } else {
                    Image::Zero
                }
            }
        }
    }

    /// Applies a word right to left.
    pub fn act_word(&self, w: &[Letter], m: i64) -> Image {
        let mut cur = Image::Index(m);
        for &l in w.iter().rev() {
            cur = match cur {
                Image::Index(k) => self.act(l, k),
                other => other,
            };
        }
        cur
    }

    pub fn letters(&self) -> Vec<Letter> {
        (1..=self.n).map(Letter::S).chain((1..=self.n).map(Letter::T)).collect()
    }

    /// Matrix of a generator on the window; columns whose image is
    /// undefined are left zero.
    pub fn operator(&self, l: Letter) -> Operator {
        let size = self.size();
        let mut m = DMatrix::zeros(size, size);
        for col in 0..size {
            if let Image::Index(k) = self.act(l, self.index_at(col)) {
                m[(self.position(k), col)] = C64::new(1.0, 0.0);
            }
        }
        Operator::unweighted(m)
    }

    pub fn s_operator(&self, j: usize) -> Operator {
        self.operator(Letter::S(j))
    }

    pub fn t_operator(&self, j: usize) -> Operator {
        self.operator(Letter::T(j))
    }

    /// Indices all of whose images under words of length `≤ 2` stay in the
    /// window.
    pub fn interior(&self) -> Vec<i64> {
        let letters = self.letters();
        (-self.radius..=self.radius)
            .filter(|&m| {
                letters.iter().all(|&a| {
                    self.act(a, m) != Image::Undefined
                        && letters.iter().all(|&b| self.act_word(&[a, b], m) != Image::Undefined)
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationViolation {
    pub relation: String,
    pub index: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CuntzReport {
    pub n: usize,
    pub window: i64,
    pub interior_size: usize,
    pub interior_range: Option<(i64, i64)>,
    pub violations: Vec<RelationViolation>,
}

impl CuntzReport {
    pub fn exact(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `t_j s_k = δ_{jk}` and `Σ_j s_j t_j = 1` on the interior by
/// integer index arithmetic.
pub fn cuntz_relation_check(rep: &TruncatedRep) -> CuntzReport {
    let interior = rep.interior();
    let n = rep.n;
    let violations: Vec<RelationViolation> = interior
        .par_iter()
        .flat_map_iter(|&m| {
            let mut v = Vec::new();
            for j in 1..=n {
                for k in 1..=n {
                    let want = if j == k { Image::Index(m) } else { Image::Zero };
                    if rep.act_word(&[Letter::T(j), Letter::S(k)], m) != want {
                        v.push(RelationViolation {
                            relation: format!("t{j}s{k}"),
                            index: m,
                        });
                    }
                }
            }
            let hits: Vec<Image> = (1..=n)
                .map(|j| rep.act_word(&[Letter::S(j), Letter::T(j)], m))
                .filter(|i| *i != Image::Zero)
                .collect();
            if hits != [Image::Index(m)] {
                v.push(RelationViolation {
                    relation: "sum s_j t_j".into(),
                    index: m,
                });
            }
            v
        })
        .collect();
    CuntzReport {
        n,
        window: rep.radius,
        interior_size: interior.len(),
        interior_range: interior.first().zip(interior.last()).map(|(a, b)| (*a, *b)),
        violations,
    }
}

/// Images `φ(e_{jk})` of the matrix units of `M_n`, indexed from 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixUnitSystem {
    pub images: Vec<Vec<Operator>>,
}

impl MatrixUnitSystem {
    pub fn new(images: Vec<Vec<Operator>>) -> Result<Self> {
        let n = images.len();
        if n == 0 || images.iter().any(|r| r.len() != n) {
            return Err(Error::MatrixUnitRelation(format!(
                "need an n x n array of images, n = {n}"
            )));
        }
        let d = images[0][0].ncols();
        if images.iter().flatten().any(|op| op.nrows() != d || op.ncols() != d) {
            return Err(Error::MatrixUnitRelation("images act on different spaces".into()));
        }
        Ok(MatrixUnitSystem { images })
    }

    /// `e_{jk}` on `ℓ^p_n`.
    pub fn canonical(n: usize) -> Self {
        let images = (0..n)
            .map(|j| {
                (0..n)
                    .map(|k| {
                        let mut m = DMatrix::zeros(n, n);
                        m[(j, k)] = C64::new(1.0, 0.0);
                        Operator::unweighted(m)
                    })
                    .collect()
            })
            .collect();
        MatrixUnitSystem { images }
    }

    /// `s φ(e_{jk}) s⁻¹`.
    pub fn conjugate(&self, s: &Operator) -> Result<Self> {
        let inv = s.try_inverse().ok_or(Error::SingularConjugator)?;
        let images = self
            .images
            .iter()
            .map(|r| {
                r.iter()
                    .map(|e| s.compose(e)?.compose(&inv))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(images)
    }

    /// `φ(e_{jk}) ⊗ 1_m`, in the basis ordered `(i, r) ↦ i·m + r`.
    pub fn dilate(&self, m: usize) -> Self {
        let one = DMatrix::<C64>::identity(m, m);
        let images = self
            .images
            .iter()
            .map(|r| {
                r.iter()
                    .map(|e| Operator::unweighted(e.matrix().kronecker(&one)))
                    .collect()
            })
            .collect();
        MatrixUnitSystem { images }
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    pub fn dim(&self) -> usize {
        self.images[0][0].ncols()
    }

    pub fn combine(&self, x: &DMatrix<C64>) -> Operator {
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for j in 0..self.n() {
            for k in 0..self.n() {
                m += self.images[j][k].matrix() * x[(j, k)];
            }
        }
        Operator::unweighted(m)
    }

    /// `e_{jk} e_{lm} = δ_{kl} e_{jm}` and `Σ e_{jj} = 1`, within `tol`.
    pub fn check_relations(&self, tol: f64) -> Result<()> {
        let n = self.n();
        let d = self.dim();
        let zero = Operator::zeros(WeightedSpace::uniform(d), WeightedSpace::uniform(d));
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    for m in 0..n {
                        let prod = self.images[j][k].compose(&self.images[l][m])?;
                        let want = if k == l { &self.images[j][m] } else { &zero };
                        if prod.max_abs_diff(want) > tol {
                            return Err(Error::MatrixUnitRelation(format!(
                                "e{j}{k} e{l}{m} differs by {:e}",
                                prod.max_abs_diff(want)
                            )));
                        }
                    }
                }
            }
        }
        let mut sum = zero;
        for j in 0..n {
            sum = sum.add(&self.images[j][j])?;
        }
        let dev = sum.max_abs_diff(&Operator::identity(WeightedSpace::uniform(d)));
        if dev > tol {
            return Err(Error::MatrixUnitRelation(format!(
                "diagonal units sum to 1 only within {dev:e}"
            )));
        }
        Ok(())
    }
}

pub const MATRIX_UNIT_TOL: f64 = 1e-9;
pub const SAMPLING_AGREEMENT: f64 = 1e-3;
pub const SAMPLES: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixSystemVerdict {
    pub spatial: bool,
    /// First `(j, k)` whose image is not spatial or whose reverse is not
    /// `φ(e_{kj})`, with a reason.
    pub counterexample: Option<(usize, usize, String)>,
    /// Largest relative gap between `‖Σ x_{jk} φ(e_{jk})‖` and `‖x‖` over
    /// the samples.
    pub max_relative_gap: f64,
    pub isometric: bool,
}

/// Tests whether a matrix-unit system is spatial, and cross-checks by
/// comparing norms of random combinations with norms in `M_n^p`.
pub fn spatial_matrix_system_check(
    sys: &MatrixUnitSystem,
    p: Exponent,
    cfg: &SearchConfig,
) -> Result<MatrixSystemVerdict> {
    if p.is_two() {
        return Err(Error::ExponentTwo);
    }
    sys.check_relations(MATRIX_UNIT_TOL)?;
    let n = sys.n();
    let space = WeightedSpace::uniform(sys.dim());
    let mut counterexample = None;
    'outer: for j in 0..n {
        for k in 0..n {
            let img = &sys.images[j][k];
            match classify_spatial(img, p, MATRIX_UNIT_TOL)? {
                SpatialVerdict::NotSpatial { reason, .. } => {
                    counterexample = Some((j, k, reason));
                    break 'outer;
                }
                SpatialVerdict::Spatial { quadruple } => {
                    let (_, reverse) = build_spatial_partial_isometry(&space, &quadruple, p)?;
                    if reverse.max_abs_diff(&sys.images[k][j]) > MATRIX_UNIT_TOL {
                        counterexample = Some((j, k, "reverse differs from the transposed unit".into()));
                        break 'outer;
                    }
                }
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let xs: Vec<DMatrix<C64>> = (0..SAMPLES)
        .map(|_| {
            DMatrix::from_fn(n, n, |_, _| {
                C64::new(StandardNormal.sample(&mut rng), StandardNormal.sample(&mut rng))
            })
        })
        .collect();
    let gaps = xs
        .par_iter()
        .map(|x| {
            let big = opnorm(&sys.combine(x), p, cfg)?.lower_bound;
            let small = opnorm(&Operator::unweighted(x.clone()), p, cfg)?.lower_bound;
            Ok((big - small).abs() / small)
        })
        .collect::<Result<Vec<f64>>>()?;
    let max_relative_gap = gaps.into_iter().fold(0.0, f64::max);
    Ok(MatrixSystemVerdict {
        spatial: counterexample.is_none(),
        counterexample,
        max_relative_gap,
        isometric: max_relative_gap <= SAMPLING_AGREEMENT,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub d: usize,
    pub r: usize,
}

/// Finite directed graph; edge `a` runs from `d(a)` to `r(a)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DirectedGraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
}

#[derive(Deserialize)]
struct GraphRepr {
    vertices: Vec<serde_json::Value>,
    edges: Vec<EdgeRepr>,
}

#[derive(Deserialize)]
struct EdgeRepr {
    d: serde_json::Value,
    r: serde_json::Value,
}

fn label(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

impl<'de> Deserialize<'de> for DirectedGraph {
    /// Edge endpoints name a vertex label; a number that is not a label is
    /// read as a position in the vertex list.
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = GraphRepr::deserialize(d)?;
        let vertices: Vec<String> = r.vertices.iter().map(label).collect();
        let resolve = |v: &serde_json::Value| -> Result<usize> {
            let l = label(v);
            if let Some(i) = vertices.iter().position(|x| *x == l) {
                return Ok(i);
            }
            v.as_u64()
                .map(|i| i as usize)
                .filter(|&i| i < vertices.len())
                .ok_or_else(|| Error::InvalidGraph(format!("unknown vertex {l}")))
        };
        let edges = r
            .edges
            .iter()
            .map(|e| {
                Ok(Edge {
                    d: resolve(&e.d)?,
                    r: resolve(&e.r)?,
                })
            })
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        DirectedGraph::new(vertices, edges).map_err(serde::de::Error::custom)
    }
}

impl DirectedGraph {
    pub fn new(vertices: Vec<String>, edges: Vec<Edge>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidGraph("no vertices".into()));
        }
        if let Some(e) = edges.iter().find(|e| e.d >= vertices.len() || e.r >= vertices.len()) {
            return Err(Error::InvalidGraph(format!("edge {} -> {} leaves the graph", e.d, e.r)));
        }
        Ok(DirectedGraph { vertices, edges })
    }

    /// `1 → 2 → ⋯ → n`.
    pub fn line(n: usize) -> Self {
        let edges = (1..n).map(|k| Edge { d: k - 1, r: k }).collect();
        Self::new((1..=n).map(|k| k.to_string()).collect(), edges).expect("line graph")
    }

    /// One vertex with `n` loops.
    pub fn rose(n: usize) -> Self {
        Self::new(vec!["v".into()], vec![Edge { d: 0, r: 0 }; n]).expect("rose graph")
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Vertices that are the range of no edge.
    pub fn sources(&self) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&v| self.edges.iter().all(|e| e.r != v))
            .collect()
    }

    pub fn is_regular(&self) -> bool {
        self.sources().is_empty()
    }
}

/// Operators for `e_v`, and `(s_a, t_a)` for each edge.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphAssignment {
    pub vertices: Vec<Operator>,
    pub edges: Vec<EdgeOperators>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeOperators {
    pub s: Operator,
    pub t: Operator,
}

impl GraphAssignment {
    /// Diagonal units for vertices and `s_a = e_{r(a), d(a)}` for edges, on
    /// `ℓ^p` of the vertex set.
    pub fn matrix_units(q: &DirectedGraph) -> Self {
        let n = q.vertices.len();
        let unit = |i: usize, j: usize| {
            let mut m = DMatrix::zeros(n, n);
            m[(i, j)] = C64::new(1.0, 0.0);
            Operator::unweighted(m)
        };
        GraphAssignment {
            vertices: (0..n).map(|v| unit(v, v)).collect(),
            edges: q
                .edges
                .iter()
                .map(|e| EdgeOperators {
                    s: unit(e.r, e.d),
                    t: unit(e.d, e.r),
                })
                .collect(),
        }
    }

    /// The rose `C_n` acting through a truncated Cuntz representation.
    pub fn from_cuntz(rep: &TruncatedRep) -> Self {
        GraphAssignment {
            vertices: vec![Operator::identity(WeightedSpace::uniform(rep.size()))],
            edges: (1..=rep.n)
                .map(|j| EdgeOperators {
                    s: rep.s_operator(j),
                    t: rep.t_operator(j),
                })
                .collect(),
        }
    }

    fn all(&self) -> impl Iterator<Item = &Operator> {
        self.vertices.iter().chain(self.edges.iter().flat_map(|e| [&e.s, &e.t]))
    }
}

pub const GRAPH_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationFailure {
    /// Relation number, 1 to 5.
    pub relation: u8,
    pub indices: Vec<usize>,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GraphReport {
    pub failures: Vec<RelationFailure>,
    /// Vertices receiving no edge, where the sum relation is not asserted.
    pub skipped_vertices: Vec<usize>,
    pub columns_checked: usize,
}

impl GraphReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

fn restricted_diff(a: &Operator, b: &Operator, cols: &[usize]) -> f64 {
    let (ma, mb) = (a.matrix(), b.matrix());
    cols.iter()
        .flat_map(|&j| (0..ma.nrows()).map(move |i| (ma[(i, j)] - mb[(i, j)]).norm()))
        .fold(0.0, f64::max)
}

/// Verifies the five Leavitt path relations
///
/// 1. `e_v e_w = δ_{vw} e_v`
/// 2. `e_{r(a)} s_a = s_a e_{d(a)} = s_a`
/// 3. `t_a e_{r(a)} = e_{d(a)} t_a = t_a`
/// 4. `t_a s_b = δ_{ab} e_{d(b)}`
/// 5. `e_v = Σ_{r(a)=v} s_a t_a`
///
/// as matrix identities, comparing only the given columns when `columns` is
/// set (the interior of a truncated representation).
pub fn graph_relation_check(
    q: &DirectedGraph,
    asg: &GraphAssignment,
    columns: Option<&[usize]>,
) -> Result<GraphReport> {
    if asg.vertices.len() != q.vertices.len() {
        return Err(Error::InvalidGraph(format!(
            "{} vertex operators for {} vertices",
            asg.vertices.len(),
            q.vertices.len()
        )));
    }
    if asg.edges.len() != q.edges.len() {
        return Err(Error::InvalidGraph(format!(
            "{} edge operators for {} edges",
            asg.edges.len(),
            q.edges.len()
        )));
    }
    let d = asg.vertices[0].ncols();
    if let Some(op) = asg.all().find(|op| op.nrows() != d || op.ncols() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: op.ncols(),
        });
    }
    let all_cols: Vec<usize> = (0..d).collect();
    let cols = columns.unwrap_or(&all_cols);
    let space = WeightedSpace::uniform(d);
    let zero = Operator::zeros(space.clone(), space);
    let e = &asg.vertices;
    let mut failures = Vec::new();
    let mut check = |relation: u8, indices: Vec<usize>, lhs: Operator, rhs: &Operator| {
        let deviation = restricted_diff(&lhs, rhs, cols);
        if deviation > GRAPH_TOL {
            failures.push(RelationFailure {
                relation,
                indices,
                deviation,
            });
        }
    };
    let nv = e.len();
    for v in 0..nv {
        for w in 0..nv {
            let want = if v == w { &e[v] } else { &zero };
            check(1, vec![v, w], e[v].compose(&e[w])?, want);
        }
    }
    for (a, (edge, ops)) in q.edges.iter().zip(&asg.edges).enumerate() {
        check(2, vec![a, 0], e[edge.r].compose(&ops.s)?, &ops.s);
        check(2, vec![a, 1], ops.s.compose(&e[edge.d])?, &ops.s);
        check(3, vec![a, 0], ops.t.compose(&e[edge.r])?, &ops.t);
        check(3, vec![a, 1], e[edge.d].compose(&ops.t)?, &ops.t);
    }
    for (a, ta) in asg.edges.iter().enumerate() {
        for (b, (edge_b, sb)) in q.edges.iter().zip(&asg.edges).enumerate() {
            let want = if a == b { &e[edge_b.d] } else { &zero };
            check(4, vec![a, b], ta.t.compose(&sb.s)?, want);
        }
    }
    let skipped_vertices = q.sources();
    for v in 0..nv {
        if skipped_vertices.contains(&v) {
            continue;
        }
        let mut sum = zero.clone();
        for (edge, ops) in q.edges.iter().zip(&asg.edges) {
            if edge.r == v {
                sum = sum.add(&ops.s.compose(&ops.t)?)?;
            }
        }
        check(5, vec![v], sum, &e[v]);
    }
    Ok(GraphReport {
        failures,
        skipped_vertices,
        columns_checked: cols.len(),
    })
}

/// Positions of the interior indices of a truncated representation.
pub fn interior_columns(rep: &TruncatedRep) -> Vec<usize> {
    rep.interior().into_iter().map(|m| rep.position(m)).collect()
}

/// Dimension of the algebra generated by `ops`: the span of all nonempty
/// products, computed by Gram–Schmidt on the vectorised matrices.
pub fn generated_algebra_dimension(ops: &[Operator], tol: f64) -> usize {
    let mut basis: Vec<DVector<C64>> = Vec::new();
    let try_add = |m: &DMatrix<C64>, basis: &mut Vec<DVector<C64>>| -> bool {
        let mut v = DVector::from_column_slice(m.as_slice());
        let scale = v.norm().max(1.0);
        for _ in 0..2 {
            for b in basis.iter() {
                let c = b.dotc(&v);
                v -= b * c;
            }
        }
        let r = v.norm();
        if r > tol * scale {
            basis.push(v / C64::new(r, 0.0));
            true
        } else {
            false
        }
    };
    let mut frontier: Vec<DMatrix<C64>> = Vec::new();
    for op in ops {
        if try_add(op.matrix(), &mut basis) {
            frontier.push(op.matrix().clone());
        }
    }
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for f in &frontier {
            for g in ops {
                for prod in [f * g.matrix(), g.matrix() * f] {
                    if try_add(&prod, &mut basis) {
                        next.push(prod);
                    }
                }
            }
        }
        frontier = next;
    }
    basis.len()
}
