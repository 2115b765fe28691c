//! Crossed products of finite actions and the `Z₂∗Z₃` action on the Cantor set.
//!
//! A finite group acting on a finite set gives a twisted convolution algebra
//! of functions `G → C(X)`. Its reduced norm comes from the regular
//! covariant pair on `ℓ^p(G × X)`. The Cantor set is modelled by finite
//! prefixes of alternating sequences of letters `a`, `b`, `b²`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::groupalg::FiniteGroup;
use crate::json::{from_cx, to_cx, Cx};
use crate::lpcore::{Exponent, Operator, C64};
use crate::opnorm::{opnorm, NormEstimate, SearchConfig};

/// `G ↷ X` given by the table `act[g][x]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteAction {
    group: FiniteGroup,
    points: Vec<String>,
    act: Vec<Vec<usize>>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GroupSpec {
    Name(String),
    Table(FiniteGroup),
}

#[derive(Deserialize)]
struct ActionRepr {
    group: GroupSpec,
    points: Vec<serde_json::Value>,
    act: Vec<Vec<usize>>,
}

impl<'de> Deserialize<'de> for FiniteAction {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let r = ActionRepr::deserialize(d)?;
        let group = match r.group {
            GroupSpec::Name(n) => FiniteGroup::from_name(&n).map_err(serde::de::Error::custom)?,
            GroupSpec::Table(g) => g,
        };
        let points = r
            .points
            .into_iter()
            .map(|v| match v {
                serde_json::Value::String(s) => s,
                other => other.to_string(),
            })
            .collect();
        FiniteAction::new(group, points, r.act).map_err(serde::de::Error::custom)
    }
}

impl FiniteAction {
    /// Checks `e·x = x` and `g·(h·x) = (gh)·x` for all `g, h, x`.
    pub fn new(group: FiniteGroup, points: Vec<String>, act: Vec<Vec<usize>>) -> Result<Self> {
        let m = points.len();
        if m == 0 {
            return Err(Error::InvalidAction("no points".into()));
        }
        if act.len() != group.order() || act.iter().any(|r| r.len() != m) {
            return Err(Error::InvalidAction(format!("table is not {}x{m}", group.order())));
        }
        if act.iter().flatten().any(|&y| y >= m) {
            return Err(Error::InvalidAction("point out of range".into()));
        }
        if (0..m).any(|x| act[group.identity()][x] != x) {
            return Err(Error::InvalidAction("identity moves a point".into()));
        }
        for g in 0..group.order() {
            for h in 0..group.order() {
                for x in 0..m {
                    if act[g][act[h][x]] != act[group.mul(g, h)][x] {
                        return Err(Error::InvalidAction(format!("g{g}·(g{h}·x{x}) != (g{g}g{h})·x{x}")));
                    }
                }
            }
        }
        Ok(FiniteAction { group, points, act })
    }

    pub fn trivial(group: &FiniteGroup, points: usize) -> Self {
        let act = vec![(0..points).collect(); group.order()];
        let labels = (0..points).map(|x| x.to_string()).collect();
        Self::new(group.clone(), labels, act).expect("trivial action")
    }

    /// `G ↷ G` by left translation.
    pub fn translation(group: &FiniteGroup) -> Self {
        let act = group.table().to_vec();
        Self::new(group.clone(), group.elements().to_vec(), act).expect("translation action")
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn num_points(&self) -> usize {
        self.points.len()
    }

    pub fn act(&self, g: usize, x: usize) -> usize {
        self.act[g][x]
    }
}

/// `f: G → C(X)`, stored as `values[g][x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossedElement {
    action: FiniteAction,
    values: Vec<Vec<C64>>,
}

impl Serialize for CrossedElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let rows: Vec<Vec<Cx>> = self.values.iter().map(|r| to_cx(r)).collect();
        rows.serialize(s)
    }
}

impl CrossedElement {
    pub fn new(action: &FiniteAction, values: Vec<Vec<C64>>) -> Result<Self> {
        let (n, m) = (action.group.order(), action.num_points());
        if values.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: values.len(),
            });
        }
        if let Some(r) = values.iter().find(|r| r.len() != m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                found: r.len(),
            });
        }
        Ok(CrossedElement {
            action: action.clone(),
            values,
        })
    }

    /// Reads `[[v_{g,x}]]` with entries as numbers or `[re, im]`.
    pub fn from_json(action: &FiniteAction, text: &str) -> Result<Self> {
        let rows: Vec<Vec<Cx>> = serde_json::from_str(text)?;
        Self::new(action, rows.iter().map(|r| from_cx(r)).collect())
    }

    /// `δ_g ⊗ h`.
    pub fn delta(action: &FiniteAction, g: usize, h: &[C64]) -> Result<Self> {
        let mut values = vec![vec![C64::new(0.0, 0.0); action.num_points()]; action.group.order()];
        if h.len() != action.num_points() {
            return Err(Error::DimensionMismatch {
                expected: action.num_points(),
                found: h.len(),
            });
        }
        values[g] = h.to_vec();
        Self::new(action, values)
    }

    /// `δ_e ⊗ 1`, the unit.
    pub fn unit(action: &FiniteAction) -> Self {
        let one = vec![C64::new(1.0, 0.0); action.num_points()];
        Self::delta(action, action.group.identity(), &one).expect("sized to the action")
    }

    pub fn action(&self) -> &FiniteAction {
        &self.action
    }

    pub fn values(&self) -> &[Vec<C64>] {
        &self.values
    }

    pub fn max_abs_diff(&self, other: &CrossedElement) -> f64 {
        self.values
            .iter()
            .flatten()
            .zip(other.values.iter().flatten())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

/// `(f∗g)(s)(x) = Σ_t f(t)(x) · g(t⁻¹s)(t⁻¹·x)`.
pub fn twisted_convolution(f: &CrossedElement, g: &CrossedElement) -> Result<CrossedElement> {
    if f.action != g.action {
        return Err(Error::ActionMismatch);
    }
    let act = &f.action;
    let grp = &act.group;
    let (n, m) = (grp.order(), act.num_points());
    let mut values = vec![vec![C64::new(0.0, 0.0); m]; n];
    for t in 0..n {
        let ti = grp.inv(t);
        for s in 0..n {
            let r = grp.mul(ti, s);
            for x in 0..m {
                values[s][x] += f.values[t][x] * g.values[r][act.act(ti, x)];
            }
        }
    }
    CrossedElement::new(act, values)
}

/// `(φ, u)` on `ℓ^p(G × B)`, where the base `B` is a list of points and
/// `φ₀(h)` multiplies the `i`-th coordinate by `h(seed_i)`. The basis vector
/// `(s, i)` sits at position `s·|B| + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularPair {
    action: FiniteAction,
    seeds: Vec<usize>,
}

impl RegularPair {
    pub fn new(action: &FiniteAction, seeds: Vec<usize>) -> Result<Self> {
        if seeds.is_empty() || seeds.iter().any(|&x| x >= action.num_points()) {
            return Err(Error::InvalidAction("base points out of range".into()));
        }
        Ok(RegularPair {
            action: action.clone(),
            seeds,
        })
    }

    /// Seeded by the multiplication representation of `C(X)` on `ℓ^p(X)`.
    pub fn full(action: &FiniteAction) -> Self {
        RegularPair {
            action: action.clone(),
            seeds: (0..action.num_points()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.action.group.order() * self.seeds.len()
    }

    /// `φ(h)ξ(s) = φ₀(α_{s⁻¹}(h)) ξ(s)`: diagonal with entry `h(s·seed_i)`.
    pub fn phi(&self, h: &[C64]) -> Operator {
        let b = self.seeds.len();
        let diag: Vec<C64> = (0..self.dim())
            .map(|k| h[self.action.act(k / b, self.seeds[k % b])])
            .collect();
        Operator::unweighted(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)))
    }

    /// `u_r ξ(t) = ξ(r⁻¹t)`: sends `(t, i)` to `(rt, i)`.
    pub fn u(&self, r: usize) -> Operator {
        let b = self.seeds.len();
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for k in 0..d {
            let row = self.action.group.mul(r, k / b) * b + k % b;
            m[(row, k)] = C64::new(1.0, 0.0);
        }
        Operator::unweighted(m)
    }

    /// `Σ_s φ(f(s)) u_s`.
    pub fn integrate(&self, f: &CrossedElement) -> Result<Operator> {
        if f.action != self.action {
            return Err(Error::ActionMismatch);
        }
        let d = self.dim();
        let mut m = DMatrix::zeros(d, d);
        for s in 0..self.action.group.order() {
            m += self.phi(&f.values[s]).matrix() * self.u(s).matrix();
        }
        Ok(Operator::unweighted(m))
    }

    /// `α_s(h)(x) = h(s⁻¹·x)`.
    pub fn alpha(&self, s: usize, h: &[C64]) -> Vec<C64> {
        let si = self.action.group.inv(s);
        (0..h.len()).map(|x| h[self.action.act(si, x)]).collect()
    }

    /// Largest entry of `u_s φ(h) u_s⁻¹ − φ(α_s(h))` over all `s`.
    pub fn covariance_defect(&self, h: &[C64]) -> Result<f64> {
        let g = &self.action.group;
        let mut worst: f64 = 0.0;
        for s in 0..g.order() {
            let lhs = self.u(s).compose(&self.phi(h))?.compose(&self.u(g.inv(s)))?;
            worst = worst.max(lhs.max_abs_diff(&self.phi(&self.alpha(s, h))));
        }
        Ok(worst)
    }
}

/// Norm of the integrated form in the regular pair seeded by all of `X`.
pub fn reduced_norm(f: &CrossedElement, p: Exponent, cfg: &SearchConfig) -> Result<NormEstimate> {
    let op = RegularPair::full(&f.action).integrate(f)?;
    opnorm(&op, p, cfg)
}

/// Rank of the span of the given operators, by SVD of the stacked vectors.
pub fn span_dimension(ops: &[Operator], tol: f64) -> usize {
    if ops.is_empty() {
        return 0;
    }
    let len = ops[0].matrix().len();
    let stacked = DMatrix::from_fn(len, ops.len(), |i, j| ops[j].matrix().as_slice()[i]);
    stacked.rank(tol)
}

/// Letters of `Z₂∗Z₃`: `a`, `b`, `b²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CantorLetter {
    A,
    B,
    B2,
}

impl CantorLetter {
    /// `2` for the `Z₂` factor, `3` for `Z₃`.
    pub fn factor(self) -> u8 {
        match self {
            CantorLetter::A => 2,
            _ => 3,
        }
    }
}

impl fmt::Display for CantorLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CantorLetter::A => "a",
            CantorLetter::B => "b",
            CantorLetter::B2 => "b^2",
        })
    }
}

/// Parses `a`, `b`, `b^2`, `b2`, `b^k`, `a^k` sequences, e.g. `ab^2a`.
/// Powers are reduced (`a^2` disappears, `b^4 = b`).
pub fn parse_group_word(s: &str) -> Result<Vec<CantorLetter>> {
    let chars: Vec<char> = s
        .chars()
        .filter(|c| !c.is_whitespace() && *c != '·' && *c != '*')
        .collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        i += 1;
        if c == 'e' || c == '1' {
            continue;
        }
        if c != 'a' && c != 'b' {
            return Err(Error::Parse(format!("unexpected {c:?} in group word {s:?}")));
        }
        if i < chars.len() && chars[i] == '^' {
            i += 1;
        }
        let start = i;
        while i < chars.len() && chars[i].is_ascii_digit() {
            i += 1;
        }
        let k: usize = if start == i {
            1
        } else {
            chars[start..i]
                .iter()
                .collect::<String>()
                .parse()
                .map_err(|_| Error::Parse(s.into()))?
        };
        match (c, if c == 'a' { k % 2 } else { k % 3 }) {
            (_, 0) => {}
            ('a', _) => out.push(CantorLetter::A),
            (_, 1) => out.push(CantorLetter::B),
            _ => out.push(CantorLetter::B2),
        }
    }
    Ok(out)
}

/// Finite prefix `x(0) x(1) ⋯` of a point of the Cantor set; consecutive
/// letters come from different factors.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlternatingWord {
    letters: Vec<CantorLetter>,
}

impl AlternatingWord {
    pub fn new(letters: Vec<CantorLetter>) -> Result<Self> {
        if let Some(k) = letters.windows(2).position(|w| w[0].factor() == w[1].factor()) {
            return Err(Error::InvalidAction(format!(
                "letters {k} and {} come from the same factor",
                k + 1
            )));
        }
        Ok(AlternatingWord { letters })
    }

    pub fn letters(&self) -> &[CantorLetter] {
        &self.letters
    }

    pub fn depth(&self) -> usize {
        self.letters.len()
    }

    /// Length of the longest common prefix.
    pub fn common_prefix(&self, other: &AlternatingWord) -> usize {
        self.letters
            .iter()
            .zip(&other.letters)
            .take_while(|(a, b)| a == b)
            .count()
    }

    /// Agreement on the shorter of the two prefixes.
    pub fn agrees_with(&self, other: &AlternatingWord) -> bool {
        self.common_prefix(other) == self.depth().min(other.depth())
    }

    /// All alternating words of the given depth, in lexicographic order.
    pub fn enumerate(depth: usize) -> Vec<AlternatingWord> {
        let mut out: Vec<Vec<CantorLetter>> = vec![Vec::new()];
        for _ in 0..depth {
            let mut next = Vec::new();
            for w in out {
                let opts: &[CantorLetter] = match w.last() {
                    None => &[CantorLetter::A, CantorLetter::B, CantorLetter::B2],
                    Some(CantorLetter::A) => &[CantorLetter::B, CantorLetter::B2],
                    Some(_) => &[CantorLetter::A],
                };
                for &l in opts {
                    let mut v = w.clone();
                    v.push(l);
                    next.push(v);
                }
            }
            out = next;
        }
        out.into_iter().map(|letters| AlternatingWord { letters }).collect()
    }
}

impl fmt::Display for AlternatingWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for AlternatingWord {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        AlternatingWord::new(parse_group_word(s)?)
    }
}

impl Serialize for AlternatingWord {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let v: Vec<String> = self.letters.iter().map(|l| l.to_string()).collect();
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for AlternatingWord {
    /// Accepts `"abab^2"` or `["a", "b", "b^2"]`.
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Letters(Vec<String>),
        }
        let text = match Repr::deserialize(d)? {
            Repr::Text(t) => t,
            Repr::Letters(v) => v.concat(),
        };
        text.parse().map_err(serde::de::Error::custom)
    }
}

fn shift(x: &AlternatingWord) -> Result<AlternatingWord> {
    if x.depth() < 2 {
        return Err(Error::Truncation(format!("cannot drop the first letter of {x}")));
    }
    Ok(AlternatingWord {
        letters: x.letters[1..].to_vec(),
    })
}

fn prepend(l: CantorLetter, x: &AlternatingWord) -> AlternatingWord {
    let mut letters = Vec::with_capacity(x.depth() + 1);
    letters.push(l);
    letters.extend_from_slice(&x.letters);
    AlternatingWord { letters }
}

/// One generator acting on a point.
///
/// `a` deletes a leading `a` and otherwise prepends one. `b` deletes a
/// leading `b`, turns a leading `b²` into `b`, and prepends `b²` in front of
/// an `a`; that is, it multiplies the sequence on the left by `b⁻¹`, which
/// is what makes it an action of order 3.
pub fn act_letter(g: CantorLetter, x: &AlternatingWord) -> Result<AlternatingWord> {
    let first = *x
        .letters
        .first()
        .ok_or_else(|| Error::Truncation("empty point".into()))?;
    match (g, first) {
        (CantorLetter::A, CantorLetter::A) => shift(x),
        (CantorLetter::A, _) => Ok(prepend(CantorLetter::A, x)),
        (CantorLetter::B, CantorLetter::B) => shift(x),
        (CantorLetter::B, CantorLetter::B2) => {
            let mut y = x.clone();
            y.letters[0] = CantorLetter::B;
            Ok(y)
        }
        (CantorLetter::B, CantorLetter::A) => Ok(prepend(CantorLetter::B2, x)),
        (CantorLetter::B2, _) => act_letter(CantorLetter::B, &act_letter(CantorLetter::B, x)?),
    }
}

/// Acts by a group word, rightmost letter first.
pub fn cantor_act(g: &[CantorLetter], x: &AlternatingWord) -> Result<AlternatingWord> {
    let mut y = x.clone();
    for &l in g.iter().rev() {
        y = act_letter(l, &y)?;
    }
    Ok(y)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrderReport {
    pub depth: usize,
    pub words: usize,
    pub a_squared_failures: usize,
    pub b_cubed_failures: usize,
    pub min_common_prefix: usize,
}

impl OrderReport {
    pub fn passed(&self) -> bool {
        self.a_squared_failures == 0 && self.b_cubed_failures == 0
    }
}

/// Checks `a² = id` and `b³ = id` on every word of the given depth.
pub fn order_check(depth: usize) -> Result<OrderReport> {
    if depth < 3 {
        return Err(Error::Truncation(format!("depth {depth} below 3")));
    }
    let words = AlternatingWord::enumerate(depth);
    let a2 = [CantorLetter::A, CantorLetter::A];
    let b3 = [CantorLetter::B, CantorLetter::B, CantorLetter::B];
    let results = words
        .par_iter()
        .map(|x| {
            let y = cantor_act(&a2, x)?;
            let z = cantor_act(&b3, x)?;
            Ok((
                y.agrees_with(x),
                z.agrees_with(x),
                x.common_prefix(&y).min(x.common_prefix(&z)),
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OrderReport {
        depth,
        words: words.len(),
        a_squared_failures: results.iter().filter(|r| !r.0).count(),
        b_cubed_failures: results.iter().filter(|r| !r.1).count(),
        min_common_prefix: results.iter().map(|r| r.2).min().unwrap_or(0),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Census {
    pub word: String,
    pub depth: usize,
    pub words: usize,
    pub fixed: usize,
    pub fraction: f64,
}

/// Fraction of depth-`N` points fixed by `g` on their common prefix.
pub fn fixed_point_census(g: &[CantorLetter], depth: usize) -> Result<Census> {
    if g.is_empty() {
        return Err(Error::Parse("the identity has no proper fixed-point census".into()));
    }
    let words = AlternatingWord::enumerate(depth);
    let fixed = words
        .par_iter()
        .map(|x| Ok(cantor_act(g, x)?.agrees_with(x)))
        .collect::<Result<Vec<bool>>>()?
        .into_iter()
        .filter(|&b| b)
        .count();
    Ok(Census {
        word: g.iter().map(|l| l.to_string()).collect(),
        depth,
        words: words.len(),
        fixed,
        fraction: fixed as f64 / words.len() as f64,
    })
}

/// `(θ, c_H, c_G)` between `σ: G ↷ X` and `ρ: H ↷ Y`. Entries may be
/// missing (`null` in JSON).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeData {
    pub theta: Vec<usize>,
    /// `c_H[g][x]`
    pub c_h: Vec<Vec<Option<usize>>>,
    /// `c_G[h][y]`
    pub c_g: Vec<Vec<Option<usize>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoeViolation {
    /// `"forward"` for `θ(σ_g x) = ρ_{c_H(g,x)} θ(x)`, `"backward"` for
    /// `θ⁻¹(ρ_h y) = σ_{c_G(h,y)} θ⁻¹(y)`.
    pub identity: String,
    pub element: usize,
    pub point: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoeReport {
    pub checked: usize,
    pub violations: Vec<CoeViolation>,
}

impl CoeReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Verifies both cocycle identities at every group element and point.
pub fn coe_verify(data: &CoeData, sigma: &FiniteAction, rho: &FiniteAction) -> Result<CoeReport> {
    let (nx, ny) = (sigma.num_points(), rho.num_points());
    let (ng, nh) = (sigma.group.order(), rho.group.order());
    let mut missing = Vec::new();
    if data.theta.len() != nx {
        missing.push(format!("theta has {} of {nx} points", data.theta.len()));
    }
    for g in 0..ng {
        for x in 0..nx {
            if data.c_h.get(g).and_then(|r| r.get(x)).copied().flatten().is_none() {
                missing.push(format!("c_H({g},{x})"));
            }
        }
    }
    for h in 0..nh {
        for y in 0..ny {
            if data.c_g.get(h).and_then(|r| r.get(y)).copied().flatten().is_none() {
                missing.push(format!("c_G({h},{y})"));
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::Coverage(missing));
    }
    let mut inv = vec![usize::MAX; ny];
    for (x, &y) in data.theta.iter().enumerate() {
        if y >= ny || inv[y] != usize::MAX {
            return Err(Error::InvalidAction("theta is not a bijection".into()));
        }
        inv[y] = x;
    }
    if nx != ny {
        return Err(Error::InvalidAction("theta is not a bijection".into()));
    }
    if data.c_h.iter().flatten().flatten().any(|&h| h >= nh) || data.c_g.iter().flatten().flatten().any(|&g| g >= ng) {
        return Err(Error::InvalidAction("cocycle value outside the group".into()));
    }
    let mut violations = Vec::new();
    for g in 0..ng {
        for x in 0..nx {
            let h = data.c_h[g][x].expect("coverage checked");
            if data.theta[sigma.act(g, x)] != rho.act(h, data.theta[x]) {
                violations.push(CoeViolation {
                    identity: "forward".into(),
                    element: g,
                    point: x,
                });
            }
        }
    }
    for h in 0..nh {
        for y in 0..ny {
            let g = data.c_g[h][y].expect("coverage checked");
            if inv[rho.act(h, y)] != sigma.act(g, inv[y]) {
                violations.push(CoeViolation {
                    identity: "backward".into(),
                    element: h,
                    point: y,
                });
            }
        }
    }
    Ok(CoeReport {
        checked: ng * nx + nh * ny,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupalg::{conv_matrix, fp_lambda_norm, GroupFunction};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn random_element(act: &FiniteAction, rng: &mut impl Rng) -> CrossedElement {
        let values = (0..act.group().order())
            .map(|_| {
                (0..act.num_points())
                    .map(|_| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
                    .collect()
            })
            .collect();
        CrossedElement::new(act, values).unwrap()
    }

    fn swap() -> FiniteAction {
        FiniteAction::new(
            FiniteGroup::cyclic(2),
            vec!["x".into(), "y".into()],
            vec![vec![0, 1], vec![1, 0]],
        )
        .unwrap()
    }

    fn word(s: &str) -> AlternatingWord {
        s.parse().unwrap()
    }

    #[test]
    fn action_axioms_enforced() {
        let z2 = FiniteGroup::cyclic(2);
        assert!(FiniteAction::new(z2.clone(), vec!["x".into(), "y".into()], vec![vec![1, 0], vec![1, 0]]).is_err());
        let z3 = FiniteGroup::cyclic(3);
        // a 2-cycle cannot carry Z3
        assert!(FiniteAction::new(
            z3,
            vec!["x".into(), "y".into()],
            vec![vec![0, 1], vec![1, 0], vec![0, 1]]
        )
        .is_err());
    }

    #[test]
    fn convolution_unit_and_associativity() {
        let act = swap();
        let e = CrossedElement::unit(&act);
        assert_eq!(twisted_convolution(&e, &e).unwrap(), e);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (f, g, h) = (
            random_element(&act, &mut rng),
            random_element(&act, &mut rng),
            random_element(&act, &mut rng),
        );
        assert!(twisted_convolution(&f, &e).unwrap().max_abs_diff(&f) == 0.0);
        assert!(twisted_convolution(&e, &f).unwrap().max_abs_diff(&f) == 0.0);
        let l = twisted_convolution(&twisted_convolution(&f, &g).unwrap(), &h).unwrap();
        let r = twisted_convolution(&f, &twisted_convolution(&g, &h).unwrap()).unwrap();
        assert!(l.max_abs_diff(&r) < 1e-12);
    }

    #[test]
    fn trivial_action_is_group_convolution() {
        let s3 = FiniteGroup::symmetric3();
        let act = FiniteAction::trivial(&s3, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (f, g) = (random_element(&act, &mut rng), random_element(&act, &mut rng));
        let gf =
            |c: &CrossedElement| GroupFunction::new(s3.clone(), c.values().iter().map(|r| r[0]).collect()).unwrap();
        let lhs = gf(&twisted_convolution(&f, &g).unwrap());
        let rhs = gf(&f).convolve(&gf(&g)).unwrap();
        assert!(lhs
            .values()
            .iter()
            .zip(rhs.values())
            .all(|(a, b)| (a - b).norm() < 1e-12));
        let pair = RegularPair::full(&act);
        assert!(pair.integrate(&f).unwrap().max_abs_diff(&conv_matrix(&gf(&f))) < 1e-15);
        let cfg = SearchConfig::default();
        let p = Exponent::new(3.0).unwrap();
        assert_relative_eq!(
            reduced_norm(&f, p, &cfg).unwrap().lower_bound,
            fp_lambda_norm(&gf(&f), p, &cfg).unwrap().lower_bound,
            max_relative = 1e-12
        );
    }

    #[test]
    fn mismatched_actions_rejected() {
        let f = CrossedElement::unit(&swap());
        let g = CrossedElement::unit(&FiniteAction::trivial(&FiniteGroup::cyclic(2), 2));
        assert_eq!(twisted_convolution(&f, &g).unwrap_err(), Error::ActionMismatch);
    }

    #[test]
    fn regular_pair_properties() {
        let act = swap();
        let pair = RegularPair::full(&act);
        assert_eq!(pair.u(0), Operator::identity(crate::lpcore::WeightedSpace::uniform(4)));
        let h = vec![C64::new(2.0, -1.0), C64::new(0.5, 3.0)];
        assert_eq!(pair.covariance_defect(&h).unwrap(), 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (f, g) = (random_element(&act, &mut rng), random_element(&act, &mut rng));
        let lhs = pair.integrate(&twisted_convolution(&f, &g).unwrap()).unwrap();
        let rhs = pair
            .integrate(&f)
            .unwrap()
            .compose(&pair.integrate(&g).unwrap())
            .unwrap();
        assert!(lhs.max_abs_diff(&rhs) < 1e-12);

        let z3 = FiniteGroup::cyclic(3);
        let triv = RegularPair::full(&FiniteAction::trivial(&z3, 1));
        for s in 0..3 {
            assert_eq!(triv.u(s), crate::groupalg::translation(&z3, s));
        }
    }

    #[test]
    fn reduced_norm_of_unit() {
        let cfg = SearchConfig::default();
        for act in [swap(), FiniteAction::translation(&FiniteGroup::cyclic(3))] {
            for p in [1.0, 1.5, 2.0, 3.0] {
                let n = reduced_norm(&CrossedElement::unit(&act), Exponent::new(p).unwrap(), &cfg).unwrap();
                assert_relative_eq!(n.lower_bound, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn translation_action_spans_full_matrix_algebra() {
        for n in [2, 3] {
            let g = FiniteGroup::cyclic(n);
            let act = FiniteAction::translation(&g);
            let pair = RegularPair::full(&act);
            let mut ops = Vec::new();
            for s in 0..n {
                for x in 0..n {
                    let mut h = vec![C64::new(0.0, 0.0); n];
                    h[x] = C64::new(1.0, 0.0);
                    ops.push(pair.integrate(&CrossedElement::delta(&act, s, &h).unwrap()).unwrap());
                }
            }
            assert_eq!(span_dimension(&ops, 1e-9), n * n);
            let nrm = opnorm(&ops[1], Exponent::new(3.0).unwrap(), &SearchConfig::default()).unwrap();
            assert_relative_eq!(nrm.lower_bound, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn cantor_examples() {
        let a = [CantorLetter::A];
        let b = [CantorLetter::B];
        assert_eq!(cantor_act(&a, &word("abab")).unwrap(), word("bab"));
        assert_eq!(cantor_act(&a, &word("baba")).unwrap(), word("ababa"));
        assert_eq!(cantor_act(&b, &word("baba")).unwrap(), word("aba"));
        assert_eq!(cantor_act(&b, &word("b^2aba")).unwrap(), word("baba"));
        assert_eq!(cantor_act(&b, &word("aba")).unwrap(), word("b^2aba"));
        assert!(matches!(cantor_act(&a, &word("a")).unwrap_err(), Error::Truncation(_)));
    }

    #[test]
    fn group_word_parsing() {
        use CantorLetter::*;
        assert_eq!(parse_group_word("ab^2a").unwrap(), vec![A, B2, A]);
        assert_eq!(parse_group_word("a^2b^4").unwrap(), vec![B]);
        assert!(parse_group_word("abc").is_err());
        assert!("aa".parse::<AlternatingWord>().is_err());
        let w: AlternatingWord = serde_json::from_str(r#"["a", "b^2", "a"]"#).unwrap();
        assert_eq!(w, word("ab2a"));
    }

    #[test]
    fn composite_words_act_right_to_left() {
        let x = word("babab");
        let ab = parse_group_word("ab").unwrap();
        let direct = cantor_act(&[CantorLetter::A], &cantor_act(&[CantorLetter::B], &x).unwrap()).unwrap();
        assert_eq!(cantor_act(&ab, &x).unwrap(), direct);
    }

    #[test]
    fn enumeration_counts() {
        // depth 1: a, b, b²; each a is followed by two choices, each b-letter by one
        let counts: Vec<usize> = (1..=6).map(|n| AlternatingWord::enumerate(n).len()).collect();
        assert_eq!(counts, vec![3, 4, 6, 8, 12, 16]);
    }

    #[test]
    fn generator_orders() {
        for n in 3..=8 {
            let r = order_check(n).unwrap();
            assert!(r.passed(), "{r:?}");
            assert!(r.min_common_prefix >= n - 2);
        }
        assert!(order_check(2).is_err());
    }

    #[test]
    fn census_values() {
        let a = parse_group_word("a").unwrap();
        let ab = parse_group_word("ab").unwrap();
        assert_eq!(fixed_point_census(&a, 8).unwrap().fixed, 0);
        let c4 = fixed_point_census(&ab, 4).unwrap();
        let c8 = fixed_point_census(&ab, 8).unwrap();
        assert!(c8.fraction <= c4.fraction);
        // fixed prefixes of (ab)^∞-type points, counted independently
        assert_eq!((c8.fixed, c8.words), (2, 32));
        assert_eq!(c8.fraction, 0.0625);
        assert!(fixed_point_census(&[], 4).is_err());
    }

    #[test]
    fn coe_examples() {
        let z3 = FiniteGroup::cyclic(3);
        let act = FiniteAction::translation(&z3);
        let proj: Vec<Vec<Option<usize>>> = (0..3).map(|g| vec![Some(g); 3]).collect();
        let data = CoeData {
            theta: vec![0, 1, 2],
            c_h: proj.clone(),
            c_g: proj.clone(),
        };
        assert!(coe_verify(&data, &act, &act).unwrap().passed());

        // relabel points by x ↦ x + 1, which commutes with translation
        let data2 = CoeData {
            theta: vec![1, 2, 0],
            c_h: proj.clone(),
            c_g: proj.clone(),
        };
        assert!(coe_verify(&data2, &act, &act).unwrap().passed());

        let mut bad = data.clone();
        bad.c_h[1][2] = Some(2);
        let r = coe_verify(&bad, &act, &act).unwrap();
        assert_eq!(r.violations.len(), 1);
        assert_eq!((r.violations[0].element, r.violations[0].point), (1, 2));

        let mut partial = data;
        partial.c_g[2][0] = None;
        assert_eq!(
            coe_verify(&partial, &act, &act).unwrap_err(),
            Error::Coverage(vec!["c_G(2,0)".into()])
        );
    }
}
