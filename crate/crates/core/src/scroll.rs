//! Rational normal scrolls `S(e_1, ..., e_d)` and sections of `O(aH + bR)`.
//!
//! A section is a sum `Σ_α P_α(s, t) φ^α` over exponent tuples `α` with
//! `|α| = a`, where `P_α` is a binary form of degree `α·e + b`. Forms are
//! stored densely: entry `k` is the coefficient of `s^{D-k} t^k`.
//!
//! Directions are 0-based in code (`φ_0 … φ_{d-1}`).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::PrimeField;
use crate::poly::{Poly, Quadric};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ScrollError {
    #[error("scroll type {0:?} has a zero direction")]
    ZeroDirection(Vec<u32>),
    #[error("scroll degree {0} is below 2")]
    DegreeTooSmall(u32),
    #[error("negative H-degree {0}")]
    NegativeA(i64),
    #[error("bidegree mismatch: expected {expected}, got {got}")]
    BidegreeMismatch { expected: Bidegree, got: Bidegree },
    #[error("sections live on different scrolls")]
    ScrollMismatch,
    #[error("malformed term: {0}")]
    MalformedTerm(String),
}

/// Splitting type of a scroll; `e` is kept sorted descending.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct ScrollType {
    e: Vec<u32>,
}

impl TryFrom<Vec<u32>> for ScrollType {
    type Error = ScrollError;
    fn try_from(e: Vec<u32>) -> Result<Self, ScrollError> {
        ScrollType::new(e)
    }
}

impl From<ScrollType> for Vec<u32> {
    fn from(s: ScrollType) -> Vec<u32> {
        s.e
    }
}

impl ScrollType {
    /// Sorts `e` descending; rejects zero entries and total degree below 2.
    pub fn new(mut e: Vec<u32>) -> Result<Self, ScrollError> {
        e.sort_unstable_by(|a, b| b.cmp(a));
        if e.is_empty() || e.contains(&0) {
            return Err(ScrollError::ZeroDirection(e));
        }
        let f: u32 = e.iter().sum();
        if f < 2 {
            return Err(ScrollError::DegreeTooSmall(f));
        }
        Ok(ScrollType { e })
    }

    /// The balanced scroll of degree `f` and dimension `d`.
    pub fn balanced(f: u32, d: usize) -> Result<Self, ScrollError> {
        let q = f / d as u32;
        let r = (f % d as u32) as usize;
        ScrollType::new((0..d).map(|i| q + u32::from(i < r)).collect())
    }

    pub fn e(&self) -> &[u32] {
        &self.e
    }

    pub fn d(&self) -> usize {
        self.e.len()
    }

    pub fn f(&self) -> u32 {
        self.e.iter().sum()
    }

    pub fn min_e(&self) -> u32 {
        *self.e.last().unwrap()
    }

    /// Number of ambient coordinates, `f + d`.
    pub fn ambient_dim(&self) -> usize {
        self.f() as usize + self.d()
    }

    /// Degree `α·e + b` of the coefficient form attached to `α`.
    pub fn form_degree(&self, alpha: &[u32], b: i64) -> i64 {
        alpha
            .iter()
            .zip(&self.e)
            .map(|(&x, &y)| x as i64 * y as i64)
            .sum::<i64>()
            + b
    }

    /// Ambient index of `x_{i,l} = s^l t^{e_i-l} φ_i`.
    pub fn ambient_index(&self, i: usize, l: u32) -> usize {
        assert!(l <= self.e[i]);
        let offset: usize = self.e[..i].iter().map(|&x| x as usize + 1).sum();
        offset + (self.e[i] - l) as usize
    }

    pub fn ambient_coordinates(&self) -> Vec<AmbientCoordinate> {
        let mut out = Vec::with_capacity(self.ambient_dim());
        for (i, &ei) in self.e.iter().enumerate() {
            for l in (0..=ei).rev() {
                out.push(AmbientCoordinate { i, l });
            }
        }
        out
    }

    /// Index of `s^l t^{e_i-1-l} φ_i` in the basis of `F = H^0(O(H-R))`.
    pub fn f_index(&self, i: usize, l: u32) -> usize {
        assert!(l < self.e[i]);
        let offset: usize = self.e[..i].iter().map(|&x| x as usize).sum();
        offset + (self.e[i] - 1 - l) as usize
    }

    /// Inverse of [`ScrollType::f_index`].
    pub fn f_element(&self, mut c: usize) -> (usize, u32) {
        for (i, &ei) in self.e.iter().enumerate() {
            if c < ei as usize {
                return (i, ei - 1 - c as u32);
            }
            c -= ei as usize;
        }
        panic!("F index out of range");
    }
}

impl std::fmt::Display for ScrollType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.e.iter().map(u32::to_string).collect();
        write!(f, "S({})", parts.join(","))
    }
}

/// The class `aH + bR`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Bidegree {
    pub a: i64,
    pub b: i64,
}

impl Bidegree {
    pub const fn new(a: i64, b: i64) -> Self {
        Bidegree { a, b }
    }
}

impl std::ops::Add for Bidegree {
    type Output = Bidegree;
    fn add(self, o: Bidegree) -> Bidegree {
        Bidegree::new(self.a + o.a, self.b + o.b)
    }
}

impl std::fmt::Display for Bidegree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{})", self.a, self.b)
    }
}

/// The ambient coordinate `x_{i,l}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AmbientCoordinate {
    pub i: usize,
    pub l: u32,
}

/// A basis element `s^{s_power} t^{D - s_power} φ^α`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BasisElement {
    pub alpha: Vec<u32>,
    pub s_power: u32,
}

/// Exponent tuples of length `d` summing to `a`, in descending lexicographic
/// order (so `φ_0^a` comes first).
pub fn exponent_tuples(d: usize, a: u32) -> Vec<Vec<u32>> {
    fn rec(d: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() + 1 == d {
            cur.push(left);
            out.push(cur.clone());
            cur.pop();
            return;
        }
        for x in (0..=left).rev() {
            cur.push(x);
            rec(d, left - x, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if d > 0 {
        rec(d, a, &mut Vec::new(), &mut out);
    }
    out
}

/// `dim H^0(O(aH + bR))` by enumeration over exponent tuples.
pub fn h0(scroll: &ScrollType, deg: Bidegree) -> usize {
    if deg.a < 0 {
        return 0;
    }
    exponent_tuples(scroll.d(), deg.a as u32)
        .iter()
        .map(|alpha| (scroll.form_degree(alpha, deg.b) + 1).max(0) as usize)
        .sum()
}

/// The closed formula `f·C(a+d-1, d) + (b+1)·C(a+d-1, d-1)`, when
/// `a·min e + b ≥ -1`.
pub fn h0_formula(scroll: &ScrollType, deg: Bidegree) -> Option<i64> {
    if deg.a < 0 || deg.a * scroll.min_e() as i64 + deg.b < -1 {
        return None;
    }
    let d = scroll.d() as u64;
    let a = deg.a as u64;
    Some(scroll.f() as i64 * binomial(a + d - 1, d) as i64 + (deg.b + 1) * binomial(a + d - 1, d - 1) as i64)
}

/// Global generation of `O(aH + bR)`: `a ≥ 0` and `a·min e + b ≥ 0`.
pub fn is_globally_generated(scroll: &ScrollType, deg: Bidegree) -> bool {
    deg.a >= 0 && deg.a * scroll.min_e() as i64 + deg.b >= 0
}

/// Monomial basis of `H^0(O(aH + bR))`: `α` descending lexicographically, then
/// `s`-power descending.
pub fn basis(scroll: &ScrollType, deg: Bidegree) -> Vec<BasisElement> {
    if deg.a < 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for alpha in exponent_tuples(scroll.d(), deg.a as u32) {
        let dd = scroll.form_degree(&alpha, deg.b);
        for sp in (0..=dd).rev() {
            out.push(BasisElement {
                alpha: alpha.clone(),
                s_power: sp as u32,
            });
        }
    }
    out
}

pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r: u64 = 1;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

/// Product of two binary forms in the dense descending-`s` layout.
pub fn form_mul(field: &PrimeField, x: &[u32], y: &[u32]) -> Vec<u32> {
    if x.is_empty() || y.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u32; x.len() + y.len() - 1];
    for (i, &a) in x.iter().enumerate() {
        if a == 0 {
            continue;
        }
        for (j, &b) in y.iter().enumerate() {
            out[i + j] = field.mul_add(out[i + j], a, b);
        }
    }
    out
}

/// An element of `H^0(O(aH + bR))` on a fixed scroll.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScrollSection {
    scroll: ScrollType,
    deg: Bidegree,
    terms: BTreeMap<Vec<u32>, Vec<u32>>,
}

impl ScrollSection {
    pub fn zero(scroll: &ScrollType, deg: Bidegree) -> Result<Self, ScrollError> {
        if deg.a < 0 {
            return Err(ScrollError::NegativeA(deg.a));
        }
        Ok(ScrollSection {
            scroll: scroll.clone(),
            deg,
            terms: BTreeMap::new(),
        })
    }

    /// The unit section of `O`.
    pub fn one(scroll: &ScrollType) -> Self {
        Self::monomial(scroll, Bidegree::new(0, 0), &vec![0; scroll.d()], 0, 1).unwrap()
    }

    /// `c · s^{s_power} t^{D - s_power} φ^α` in bidegree `deg`.
    pub fn monomial(
        scroll: &ScrollType,
        deg: Bidegree,
        alpha: &[u32],
        s_power: u32,
        c: u32,
    ) -> Result<Self, ScrollError> {
        let mut x = Self::zero(scroll, deg)?;
        let dd = x.check_alpha(alpha)?;
        if s_power as i64 > dd {
            return Err(ScrollError::MalformedTerm(format!(
                "s-power {s_power} exceeds form degree {dd}"
            )));
        }
        if c != 0 {
            let mut coeffs = vec![0; dd as usize + 1];
            coeffs[(dd - s_power as i64) as usize] = c;
            x.terms.insert(alpha.to_vec(), coeffs);
        }
        Ok(x)
    }

    /// The basic section `φ_i` of `O(H - e_i R)`.
    pub fn phi(scroll: &ScrollType, i: usize) -> Self {
        let mut alpha = vec![0; scroll.d()];
        alpha[i] = 1;
        Self::monomial(scroll, Bidegree::new(1, -(scroll.e()[i] as i64)), &alpha, 0, 1).unwrap()
    }

    /// A binary form of degree `coeffs.len() - 1` as a section of `O(bR)`.
    pub fn form(field: &PrimeField, scroll: &ScrollType, coeffs: &[u32]) -> Self {
        assert!(!coeffs.is_empty());
        let deg = Bidegree::new(0, coeffs.len() as i64 - 1);
        let mut x = Self::zero(scroll, deg).unwrap();
        x.insert_term(field, vec![0; scroll.d()], coeffs.to_vec());
        x
    }

    /// Builds a section from `(α, coefficients)` pairs, validating lengths.
    pub fn from_terms(
        field: &PrimeField,
        scroll: &ScrollType,
        deg: Bidegree,
        terms: Vec<(Vec<u32>, Vec<u32>)>,
    ) -> Result<Self, ScrollError> {
        let mut x = Self::zero(scroll, deg)?;
        for (alpha, coeffs) in terms {
            let dd = x.check_alpha(&alpha)?;
            if coeffs.len() as i64 != dd + 1 {
                return Err(ScrollError::MalformedTerm(format!(
                    "alpha {alpha:?} needs {} coefficients, got {}",
                    dd + 1,
                    coeffs.len()
                )));
            }
            if coeffs.iter().any(|&c| c >= field.p()) {
                return Err(ScrollError::MalformedTerm("coefficient out of range".into()));
            }
            if x.terms.contains_key(&alpha) {
                return Err(ScrollError::MalformedTerm(format!("duplicate alpha {alpha:?}")));
            }
            x.insert_term(field, alpha, coeffs);
        }
        Ok(x)
    }

    /// The section with the given coordinates in [`basis`] order.
    pub fn from_coords(scroll: &ScrollType, deg: Bidegree, coords: &[u32]) -> Result<Self, ScrollError> {
        let mut x = Self::zero(scroll, deg)?;
        let mut k = 0;
        for alpha in exponent_tuples(scroll.d(), deg.a as u32) {
            let dd = scroll.form_degree(&alpha, deg.b);
            if dd < 0 {
                continue;
            }
            let n = dd as usize + 1;
            let coeffs = coords
                .get(k..k + n)
                .ok_or_else(|| ScrollError::MalformedTerm("too few coordinates".into()))?;
            k += n;
            if coeffs.iter().any(|&c| c != 0) {
                x.terms.insert(alpha, coeffs.to_vec());
            }
        }
        if k != coords.len() {
            return Err(ScrollError::MalformedTerm("too many coordinates".into()));
        }
        Ok(x)
    }

    /// Coordinates in [`basis`] order.
    pub fn to_coords(&self) -> Vec<u32> {
        let mut out = Vec::with_capacity(h0(&self.scroll, self.deg));
        for alpha in exponent_tuples(self.scroll.d(), self.deg.a as u32) {
            let dd = self.scroll.form_degree(&alpha, self.deg.b);
            if dd < 0 {
                continue;
            }
            match self.terms.get(&alpha) {
                Some(c) => out.extend_from_slice(c),
                None => out.extend(std::iter::repeat(0).take(dd as usize + 1)),
            }
        }
        out
    }

    fn check_alpha(&self, alpha: &[u32]) -> Result<i64, ScrollError> {
        if alpha.len() != self.scroll.d() || alpha.iter().sum::<u32>() as i64 != self.deg.a {
            return Err(ScrollError::MalformedTerm(format!(
                "exponent tuple {alpha:?} does not fit bidegree {}",
                self.deg
            )));
        }
        let dd = self.scroll.form_degree(alpha, self.deg.b);
        if dd < 0 {
            return Err(ScrollError::MalformedTerm(format!(
                "exponent tuple {alpha:?} has negative form degree"
            )));
        }
        Ok(dd)
    }

    fn insert_term(&mut self, field: &PrimeField, alpha: Vec<u32>, coeffs: Vec<u32>) {
        match self.terms.get_mut(&alpha) {
            Some(c) => {
                for (x, y) in c.iter_mut().zip(&coeffs) {
                    *x = field.add(*x, *y);
                }
                if c.iter().all(|&x| x == 0) {
                    self.terms.remove(&alpha);
                }
            }
            None => {
                if coeffs.iter().any(|&x| x != 0) {
                    self.terms.insert(alpha, coeffs);
                }
            }
        }
    }

    pub fn scroll(&self) -> &ScrollType {
        &self.scroll
    }

    pub fn bidegree(&self) -> Bidegree {
        self.deg
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Vec<u32>)> {
        self.terms.iter()
    }

    pub fn term(&self, alpha: &[u32]) -> Option<&[u32]> {
        self.terms.get(alpha).map(Vec::as_slice)
    }

    fn check_same(&self, other: &Self) -> Result<(), ScrollError> {
        if self.scroll != other.scroll {
            return Err(ScrollError::ScrollMismatch);
        }
        if self.deg != other.deg {
            return Err(ScrollError::BidegreeMismatch {
                expected: self.deg,
                got: other.deg,
            });
        }
        Ok(())
    }

    /// `self + c·other`.
    pub fn add_scaled(&self, field: &PrimeField, other: &Self, c: u32) -> Result<Self, ScrollError> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (alpha, coeffs) in &other.terms {
            let scaled = coeffs.iter().map(|&x| field.mul(x, c)).collect();
            out.insert_term(field, alpha.clone(), scaled);
        }
        Ok(out)
    }

    pub fn add(&self, field: &PrimeField, other: &Self) -> Result<Self, ScrollError> {
        self.add_scaled(field, other, 1)
    }

    pub fn sub(&self, field: &PrimeField, other: &Self) -> Result<Self, ScrollError> {
        self.add_scaled(field, other, field.neg(1))
    }

    pub fn scale(&self, field: &PrimeField, c: u32) -> Self {
        let mut out = ScrollSection {
            scroll: self.scroll.clone(),
            deg: self.deg,
            terms: BTreeMap::new(),
        };
        for (alpha, coeffs) in &self.terms {
            out.insert_term(field, alpha.clone(), coeffs.iter().map(|&x| field.mul(x, c)).collect());
        }
        out
    }

    pub fn neg(&self, field: &PrimeField) -> Self {
        self.scale(field, field.neg(1))
    }

    /// Product of sections; bidegrees add.
    pub fn multiply(&self, field: &PrimeField, other: &Self) -> Result<Self, ScrollError> {
        if self.scroll != other.scroll {
            return Err(ScrollError::ScrollMismatch);
        }
        let mut out = Self::zero(&self.scroll, self.deg + other.deg)?;
        for (a1, c1) in &self.terms {
            for (a2, c2) in &other.terms {
                let alpha: Vec<u32> = a1.iter().zip(a2).map(|(x, y)| x + y).collect();
                out.insert_term(field, alpha, form_mul(field, c1, c2));
            }
        }
        Ok(out)
    }

    /// Multiplies by a binary form (a section of `O(kR)`).
    pub fn mul_form(&self, field: &PrimeField, form: &[u32]) -> Self {
        let mut out = Self::zero(&self.scroll, self.deg + Bidegree::new(0, form.len() as i64 - 1)).unwrap();
        for (alpha, c) in &self.terms {
            out.insert_term(field, alpha.clone(), form_mul(field, c, form));
        }
        out
    }
}

/// The 2×f matrix Φ. Column `c` corresponds to the `F` basis element
/// `f_c = s^l t^{e_i-1-l} φ_i` and holds `(x(s·f_c), x(t·f_c)) = (x_{i,l+1}, x_{i,l})`
/// as ambient coordinate indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhiMatrix {
    pub top: Vec<usize>,
    pub bottom: Vec<usize>,
}

impl PhiMatrix {
    pub fn cols(&self) -> usize {
        self.top.len()
    }

    /// `x_{top,c1}·x_{bot,c2} − x_{top,c2}·x_{bot,c1}` for each pair `c1 < c2`.
    pub fn minors(&self, field: &PrimeField) -> Vec<Quadric> {
        let n = self.cols();
        let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for c1 in 0..n {
            for c2 in c1 + 1..n {
                let mut q = Quadric::default();
                q.add_term(field, self.top[c1] as u32, self.bottom[c2] as u32, 1);
                q.add_term(field, self.top[c2] as u32, self.bottom[c1] as u32, field.neg(1));
                out.push(q);
            }
        }
        out
    }
}

pub fn phi_matrix(scroll: &ScrollType) -> PhiMatrix {
    let mut top = Vec::new();
    let mut bottom = Vec::new();
    for (i, &ei) in scroll.e().iter().enumerate() {
        for l in (0..ei).rev() {
            top.push(scroll.ambient_index(i, l + 1));
            bottom.push(scroll.ambient_index(i, l));
        }
    }
    PhiMatrix { top, bottom }
}

/// Lifts a section of `O(2H)` to a quadric in the ambient coordinates.
/// `s^m t^{e_i+e_j-m} φ_iφ_j` becomes `x_{i,l}·x_{j,m-l}` with `l = min(e_i, m)`.
pub fn section_to_quadric(field: &PrimeField, x: &ScrollSection) -> Result<Quadric, ScrollError> {
    let want = Bidegree::new(2, 0);
    if x.bidegree() != want {
        return Err(ScrollError::BidegreeMismatch {
            expected: want,
            got: x.bidegree(),
        });
    }
    let scroll = x.scroll();
    let mut q = Quadric::default();
    for (alpha, coeffs) in x.terms() {
        let mut dirs = Vec::with_capacity(2);
        for (i, &k) in alpha.iter().enumerate() {
            for _ in 0..k {
                dirs.push(i);
            }
        }
        let (i, j) = (dirs[0], dirs[1]);
        let (ei, ej) = (scroll.e()[i], scroll.e()[j]);
        let dd = ei + ej;
        for (k, &c) in coeffs.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let m = dd - k as u32;
            let l = ei.min(m);
            assert!(m - l <= ej, "unsatisfiable split");
            q.add_term(
                field,
                scroll.ambient_index(i, l) as u32,
                scroll.ambient_index(j, m - l) as u32,
                c,
            );
        }
    }
    Ok(q)
}

/// Substitutes `x_{i,l} ↦ s^l t^{e_i-l} φ_i` into a homogeneous polynomial of
/// degree `k`, giving a section of `O(kH)`.
pub fn pullback(field: &PrimeField, scroll: &ScrollType, poly: &Poly) -> Result<ScrollSection, ScrollError> {
    let coords = scroll.ambient_coordinates();
    let k = match poly.degree() {
        Some(k) => k,
        None if poly.is_zero() => 0,
        None => return Err(ScrollError::MalformedTerm("inhomogeneous polynomial".into())),
    };
    let mut out = ScrollSection::zero(scroll, Bidegree::new(k as i64, 0))?;
    for (mono, &c) in poly.terms() {
        let mut alpha = vec![0u32; scroll.d()];
        let mut sp = 0u32;
        for &v in mono {
            let AmbientCoordinate { i, l } = coords[v as usize];
            alpha[i] += 1;
            sp += l;
        }
        let term = ScrollSection::monomial(scroll, out.bidegree(), &alpha, sp, c)?;
        out = out.add(field, &term)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f() -> PrimeField {
        PrimeField::default()
    }

    fn g13() -> ScrollType {
        ScrollType::new(vec![3, 2, 2, 2]).unwrap()
    }

    fn random_section(rng: &mut ChaCha8Rng, s: &ScrollType, deg: Bidegree) -> ScrollSection {
        let coords: Vec<u32> = (0..h0(s, deg)).map(|_| f().random(rng)).collect();
        ScrollSection::from_coords(s, deg, &coords).unwrap()
    }

    /// Counts monomials `s^u t^v φ^α` with `u + v = α·e + b` by brute force over all
    /// `(α, u, v)` in a box.
    fn brute_h0(s: &ScrollType, deg: Bidegree) -> usize {
        let d = s.d();
        let a = deg.a as u32;
        let mut count = 0;
        let total = (a as usize + 1).pow(d as u32);
        for code in 0..total {
            let mut alpha = Vec::with_capacity(d);
            let mut c = code;
            for _ in 0..d {
                alpha.push((c % (a as usize + 1)) as u32);
                c /= a as usize + 1;
            }
            if alpha.iter().sum::<u32>() != a {
                continue;
            }
            let dd = s.form_degree(&alpha, deg.b);
            for u in 0..=60i64 {
                for v in 0..=60i64 {
                    if u + v == dd {
                        count += 1;
                    }
                }
            }
        }
        count
    }

    #[test]
    fn h0_examples() {
        assert_eq!(h0(&g13(), Bidegree::new(1, 0)), 13);
        assert_eq!(h0(&g13(), Bidegree::new(0, 3)), 4);
        assert_eq!(h0(&g13(), Bidegree::new(2, 0)), 55);
        assert_eq!(brute_h0(&g13(), Bidegree::new(2, 0)), 55);
        assert_eq!(h0_formula(&g13(), Bidegree::new(2, 0)), Some(55));
    }

    #[test]
    fn basis_examples() {
        let s = g13();
        let b = basis(&s, Bidegree::new(0, 1));
        assert_eq!(b.iter().map(|x| x.s_power).collect::<Vec<_>>(), vec![1, 0]);
        let b = basis(&s, Bidegree::new(1, -3));
        assert_eq!(
            b,
            vec![BasisElement {
                alpha: vec![1, 0, 0, 0],
                s_power: 0
            }]
        );
        let b = basis(&s, Bidegree::new(1, -2));
        let got: Vec<(Vec<u32>, u32)> = b.into_iter().map(|x| (x.alpha, x.s_power)).collect();
        assert_eq!(
            got,
            vec![
                (vec![1, 0, 0, 0], 1),
                (vec![1, 0, 0, 0], 0),
                (vec![0, 1, 0, 0], 0),
                (vec![0, 0, 1, 0], 0),
                (vec![0, 0, 0, 1], 0),
            ]
        );
    }

    #[test]
    fn multiply_examples() {
        let fl = f();
        let s = g13();
        let x = random_section(&mut ChaCha8Rng::seed_from_u64(1), &s, Bidegree::new(1, -1));
        assert_eq!(x.multiply(&fl, &ScrollSection::one(&s)).unwrap(), x);

        let sphi1 = ScrollSection::phi(&s, 0).mul_form(&fl, &[1, 0]);
        let tphi2 = ScrollSection::phi(&s, 1).mul_form(&fl, &[0, 1]);
        let prod = sphi1.multiply(&fl, &tphi2).unwrap();
        assert_eq!(prod.bidegree(), Bidegree::new(2, -3));
        let terms: Vec<_> = prod.terms().collect();
        assert_eq!(terms.len(), 1);
        assert_eq!(terms[0].0, &vec![1, 1, 0, 0]);
        // form s·t in degree 2
        assert_eq!(terms[0].1, &vec![0, 1, 0]);

        let a = ScrollSection::form(&fl, &s, &[1, 1]);
        let b = ScrollSection::form(&fl, &s, &[1, fl.neg(1)]);
        assert_eq!(
            a.multiply(&fl, &b).unwrap(),
            ScrollSection::form(&fl, &s, &[1, 0, fl.neg(1)])
        );
    }

    #[test]
    fn phi_matrix_shapes() {
        let s11 = ScrollType::new(vec![1, 1]).unwrap();
        let phi = phi_matrix(&s11);
        assert_eq!(phi.top, vec![s11.ambient_index(0, 1), s11.ambient_index(1, 1)]);
        assert_eq!(phi.bottom, vec![s11.ambient_index(0, 0), s11.ambient_index(1, 0)]);
        let phi = phi_matrix(&g13());
        assert_eq!(phi.cols(), 9);
        assert_eq!(phi.minors(&f()).len(), 36);
    }

    #[test]
    fn minors_vanish_on_scroll() {
        for e in [vec![1, 1], vec![3, 2, 2, 2], vec![4, 1], vec![2, 2, 1]] {
            let s = ScrollType::new(e).unwrap();
            for q in phi_matrix(&s).minors(&f()) {
                assert!(pullback(&f(), &s, &q.to_poly()).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn quadric_split_rule() {
        let fl = f();
        let s = g13();
        // s-power 1 on φ_1φ_2 splits as x_{1,1}·x_{2,0}
        let y = ScrollSection::monomial(&s, Bidegree::new(2, 0), &[1, 1, 0, 0], 1, 1).unwrap();
        let q = section_to_quadric(&fl, &y).unwrap();
        let terms: Vec<_> = q.terms().collect();
        assert_eq!(terms.len(), 1);
        let (i, j) = *terms[0].0;
        let want = (s.ambient_index(0, 1) as u32, s.ambient_index(1, 0) as u32);
        assert_eq!((i.min(j), i.max(j)), (want.0.min(want.1), want.0.max(want.1)));

        let x = ScrollSection::monomial(&s, Bidegree::new(2, 0), &[2, 0, 0, 0], 6, 1).unwrap();
        let q = section_to_quadric(&fl, &x).unwrap();
        let i = s.ambient_index(0, 3) as u32;
        assert_eq!(q.terms().next().unwrap().0, &(i, i));
    }

    #[test]
    fn alternative_split_differs_by_minors() {
        let fl = f();
        let s = g13();
        // s^3 t^2 φ_1 φ_2: default split x_{1,3} x_{2,0}; alternative x_{1,2} x_{2,1}
        let x = ScrollSection::monomial(&s, Bidegree::new(2, 0), &[1, 1, 0, 0], 3, 1).unwrap();
        let q = section_to_quadric(&fl, &x).unwrap();
        let mut alt = Quadric::default();
        alt.add_term(&fl, s.ambient_index(0, 2) as u32, s.ambient_index(1, 1) as u32, 1);
        let n = s.ambient_dim();
        let mut diff = q.to_sym2_vector(n);
        for (d, a) in diff.iter_mut().zip(alt.to_sym2_vector(n)) {
            *d = fl.sub(*d, a);
        }
        let mut cols: Vec<Vec<u32>> = phi_matrix(&s).minors(&fl).iter().map(|m| m.to_sym2_vector(n)).collect();
        let r0 = crate::linalg::DenseMatrix::from_columns(diff.len(), &cols).rank(&fl);
        cols.push(diff);
        let r1 = crate::linalg::DenseMatrix::from_columns(cols[0].len(), &cols).rank(&fl);
        assert_eq!(r0, r1);
    }

    #[test]
    fn negative_b_drops_alphas() {
        let s = g13();
        // b = -3 kills every direction with e_i = 2
        assert_eq!(h0(&s, Bidegree::new(1, -3)), 1);
        assert_eq!(h0(&s, Bidegree::new(1, -4)), 0);
        assert_eq!(h0_formula(&s, Bidegree::new(1, -4)), None);
        assert!(is_globally_generated(&s, Bidegree::new(1, -2)));
        assert!(!is_globally_generated(&s, Bidegree::new(1, -3)));
    }

    #[test]
    fn rejects_zero_directions() {
        assert!(matches!(
            ScrollType::new(vec![2, 0]),
            Err(ScrollError::ZeroDirection(_))
        ));
        assert_eq!(ScrollType::new(vec![2, 3, 2, 2]).unwrap().e(), &[3, 2, 2, 2]);
        assert_eq!(ScrollType::balanced(9, 4).unwrap(), g13());
    }

    fn scroll_strategy() -> impl Strategy<Value = ScrollType> {
        proptest::collection::vec(1u32..=5, 1..=5)
            .prop_filter("degree >= 2", |e| e.iter().sum::<u32>() >= 2)
            .prop_map(|e| ScrollType::new(e).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn h0_matches_basis_and_formula(s in scroll_strategy(), a in 0i64..=4, b in -6i64..=6) {
            let deg = Bidegree::new(a, b);
            let n = h0(&s, deg);
            prop_assert_eq!(n, basis(&s, deg).len());
            if let Some(v) = h0_formula(&s, deg) {
                prop_assert_eq!(v, n as i64);
            }
        }

        #[test]
        fn multiply_ring_axioms(s in scroll_strategy(), seed in any::<u64>(),
                                a1 in 0i64..=2, b1 in -1i64..=2, a2 in 0i64..=2, b2 in -1i64..=2) {
            let fl = f();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let d1 = Bidegree::new(a1, b1);
            let d2 = Bidegree::new(a2, b2);
            let x = random_section(&mut rng, &s, d1);
            let x2 = random_section(&mut rng, &s, d1);
            let y = random_section(&mut rng, &s, d2);
            let z = random_section(&mut rng, &s, Bidegree::new(1, 0));
            let xy = x.multiply(&fl, &y).unwrap();
            prop_assert_eq!(&xy, &y.multiply(&fl, &x).unwrap());
            prop_assert_eq!(
                xy.multiply(&fl, &z).unwrap(),
                x.multiply(&fl, &y.multiply(&fl, &z).unwrap()).unwrap()
            );
            let c = rng.gen_range(0..fl.p());
            let lhs = x.add_scaled(&fl, &x2, c).unwrap().multiply(&fl, &y).unwrap();
            let rhs = xy.add_scaled(&fl, &x2.multiply(&fl, &y).unwrap(), c).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn quadric_lift_pulls_back(s in scroll_strategy(), seed in any::<u64>()) {
            let fl = f();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x = random_section(&mut rng, &s, Bidegree::new(2, 0));
            let q = section_to_quadric(&fl, &x).unwrap();
            prop_assert_eq!(pullback(&fl, &s, &q.to_poly()).unwrap(), x);
        }

        #[test]
        fn coords_roundtrip(s in scroll_strategy(), seed in any::<u64>(), a in 0i64..=3, b in -3i64..=3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let deg = Bidegree::new(a, b);
            let x = random_section(&mut rng, &s, deg);
            prop_assert_eq!(ScrollSection::from_coords(&s, deg, &x.to_coords()).unwrap(), x);
        }
    }
}
