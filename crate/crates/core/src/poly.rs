//! Sparse multivariate polynomials over GF(p), used for the ambient side:
//! quadrics on P^{g-1}, entries of Eagon-Northcott differentials, and products
//! of those when checking complexes.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::linalg::{PrimeField, SparseMatrix};

/// A monomial as a sorted list of variable indices (with repetition).
pub type Monomial = Vec<u32>;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Poly {
    terms: BTreeMap<Monomial, u32>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: u32) -> Self {
        let mut p = Poly::zero();
        if c != 0 {
            p.terms.insert(Vec::new(), c);
        }
        p
    }

    pub fn var(i: u32) -> Self {
        let mut p = Poly::zero();
        p.terms.insert(vec![i], 1);
        p
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &u32)> {
        self.terms.iter()
    }

    pub fn add_term(&mut self, field: &PrimeField, mono: Monomial, c: u32) {
        debug_assert!(mono.windows(2).all(|w| w[0] <= w[1]));
        if c == 0 {
            return;
        }
        let e = self.terms.entry(mono).or_insert(0);
        *e = field.add(*e, c);
        if *e == 0 {
            self.terms.retain(|_, v| *v != 0);
        }
    }

    pub fn add_scaled(&mut self, field: &PrimeField, other: &Poly, c: u32) {
        for (m, &v) in &other.terms {
            self.add_term(field, m.clone(), field.mul(v, c));
        }
    }

    pub fn mul(&self, field: &PrimeField, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, &c1) in &self.terms {
            for (m2, &c2) in &other.terms {
                let mut m = Vec::with_capacity(m1.len() + m2.len());
                m.extend_from_slice(m1);
                m.extend_from_slice(m2);
                m.sort_unstable();
                out.add_term(field, m, field.mul(c1, c2));
            }
        }
        out
    }

    /// Total degree of every term, if homogeneous.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(Vec::len);
        let d = it.next()?;
        it.all(|x| x == d).then_some(d)
    }
}

/// A quadratic form in the ambient coordinates, keyed by `(i, j)` with `i <= j`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(from = "Vec<QuadricTerm>", into = "Vec<QuadricTerm>")]
pub struct Quadric {
    terms: BTreeMap<(u32, u32), u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadricTerm {
    pub monomial: [u32; 2],
    pub coeff: u32,
}

impl From<Vec<QuadricTerm>> for Quadric {
    fn from(v: Vec<QuadricTerm>) -> Self {
        let mut terms = BTreeMap::new();
        for t in v {
            let [a, b] = t.monomial;
            terms.insert((a.min(b), a.max(b)), t.coeff);
        }
        Quadric { terms }
    }
}

impl From<Quadric> for Vec<QuadricTerm> {
    fn from(q: Quadric) -> Self {
        q.terms
            .into_iter()
            .map(|((a, b), coeff)| QuadricTerm {
                monomial: [a, b],
                coeff,
            })
            .collect()
    }
}

impl Quadric {
    pub fn add_term(&mut self, field: &PrimeField, i: u32, j: u32, c: u32) {
        if c == 0 {
            return;
        }
        let key = (i.min(j), i.max(j));
        let e = self.terms.entry(key).or_insert(0);
        *e = field.add(*e, c);
        if *e == 0 {
            self.terms.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &u32)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn to_poly(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(&(a, b), &c)| (vec![a, b], c)).collect(),
        }
    }

    pub fn from_poly(p: &Poly) -> Option<Quadric> {
        let mut terms = BTreeMap::new();
        for (m, &c) in p.terms() {
            if m.len() != 2 {
                return None;
            }
            terms.insert((m[0], m[1]), c);
        }
        Some(Quadric { terms })
    }

    /// Coordinates in the monomial basis of Sym^2 of `n` variables (see [`sym2_index`]).
    pub fn to_sym2_vector(&self, n: usize) -> Vec<u32> {
        let mut v = vec![0; n * (n + 1) / 2];
        for (&(a, b), &c) in &self.terms {
            v[sym2_index(n, a as usize, b as usize)] = c;
        }
        v
    }
}

/// Index of `x_i x_j` (`i <= j`) among the degree-2 monomials of `n` variables
/// in lexicographic order `x_0^2, x_0x_1, ..., x_0x_{n-1}, x_1^2, ...`.
pub fn sym2_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = (i.min(j), i.max(j));
    i * n - i * (i + 1) / 2 + j
}

/// All monomials of degree `deg` in `n` variables, in lexicographic order of
/// their sorted index lists.
pub fn monomials(n: usize, deg: usize) -> Vec<Monomial> {
    fn rec(n: u32, deg: usize, start: u32, cur: &mut Vec<u32>, out: &mut Vec<Monomial>) {
        if cur.len() == deg {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(n, deg, v, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n as u32, deg, 0, &mut Vec::new(), &mut out);
    out
}

/// A sparse matrix with polynomial entries.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PolyMatrix {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), Poly>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        PolyMatrix {
            rows,
            cols,
            entries: BTreeMap::new(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, r: usize, c: usize) -> Option<&Poly> {
        self.entries.get(&(r, c))
    }

    pub fn entries(&self) -> impl Iterator<Item = (&(usize, usize), &Poly)> {
        self.entries.iter()
    }

    /// Adds `c·p` to entry `(r, col)`.
    pub fn add_to(&mut self, field: &PrimeField, r: usize, col: usize, p: &Poly, c: u32) {
        assert!(r < self.rows && col < self.cols);
        let e = self.entries.entry((r, col)).or_default();
        e.add_scaled(field, p, c);
        if e.is_zero() {
            self.entries.remove(&(r, col));
        }
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn mul(&self, field: &PrimeField, other: &PolyMatrix) -> PolyMatrix {
        assert_eq!(self.cols, other.rows);
        let mut by_col: Vec<Vec<(usize, &Poly)>> = vec![Vec::new(); self.cols];
        for (&(r, k), p) in &self.entries {
            by_col[k].push((r, p));
        }
        let mut out = PolyMatrix::zeros(self.rows, other.cols);
        for (&(k, c), q) in &other.entries {
            for &(r, p) in &by_col[k] {
                out.add_to(field, r, c, &p.mul(field, q), 1);
            }
        }
        out
    }

    /// The degree-`m` component as a scalar matrix, for a map between free
    /// modules whose basis elements sit in the given generator degrees.
    /// Columns are indexed by `(col, monomial)` pairs, rows by `(row, monomial)`,
    /// with monomials in the order of [`monomials`].
    pub fn degree_slice(
        &self,
        field: &PrimeField,
        nvars: usize,
        row_degrees: &[usize],
        col_degrees: &[usize],
        m: usize,
    ) -> SparseMatrix {
        assert_eq!(row_degrees.len(), self.rows);
        assert_eq!(col_degrees.len(), self.cols);
        let lists: Vec<Vec<Monomial>> = (0..=m).map(|k| monomials(nvars, k)).collect();
        let index: Vec<HashMap<&[u32], usize>> = lists
            .iter()
            .map(|l| l.iter().enumerate().map(|(i, mm)| (mm.as_slice(), i)).collect())
            .collect();
        let offsets = |degrees: &[usize]| -> (Vec<usize>, usize) {
            let mut off = Vec::with_capacity(degrees.len());
            let mut n = 0;
            for &d in degrees {
                off.push(n);
                if m >= d {
                    n += lists[m - d].len();
                }
            }
            (off, n)
        };
        let (row_offset, nrows) = offsets(row_degrees);
        let (col_offset, ncols) = offsets(col_degrees);
        let mut triplets = Vec::new();
        let mut prod = Vec::new();
        for (&(r, c), p) in &self.entries {
            if m < col_degrees[c] {
                continue;
            }
            let dst = &index[m - row_degrees[r]];
            for (si, mono) in lists[m - col_degrees[c]].iter().enumerate() {
                for (pm, &pc) in p.terms() {
                    prod.clear();
                    prod.extend_from_slice(mono);
                    prod.extend_from_slice(pm);
                    prod.sort_unstable();
                    triplets.push((row_offset[r] + dst[prod.as_slice()], col_offset[c] + si, pc));
                }
            }
        }
        SparseMatrix::from_triplets(field, nrows, ncols, triplets)
    }
}
