//! 5-gonal canonical curves as Pfaffian loci on a 4-dimensional scroll.
//!
//! For genus `g` the scroll has degree `f = g - 4`, and the curve is cut out by
//! the five 4×4 Pfaffians of a skew-symmetric 5×5 matrix Ψ whose `(q, i)` entry
//! is a section of `O(H + (a_q - b_i)R)`, where `(a_i)` is a balanced partition
//! of `2g - 12` and `a_i + b_i = f - 2`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{DenseMatrix, LinalgError, PrimeField};
use crate::poly::{monomials, Quadric};
use crate::scroll::{h0, phi_matrix, section_to_quadric, Bidegree, ScrollError, ScrollSection, ScrollType};

pub const MIN_GENUS: u32 = 9;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GonalError {
    #[error("genus {0} is below {MIN_GENUS}")]
    GenusTooSmall(u32),
    #[error(transparent)]
    Scroll(#[from] ScrollError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("malformed matrix: {0}")]
    Malformed(String),
    #[error("degenerate instance (seed {seed}): {reason}; try another seed")]
    Degenerate { seed: u64, reason: String },
    #[error("invalid bundle: {0}")]
    InvalidBundle(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TypeTag {
    I,
    II,
    III,
    IV,
    V,
    #[serde(rename = "EVEN")]
    Even,
}

impl std::fmt::Display for TypeTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            TypeTag::I => "I",
            TypeTag::II => "II",
            TypeTag::III => "III",
            TypeTag::IV => "IV",
            TypeTag::V => "V",
            TypeTag::Even => "EVEN",
        };
        f.write_str(s)
    }
}

/// Numerical data determined by the genus.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GonalConfig {
    pub g: u32,
    pub n: u32,
    pub f: u32,
    pub d: u32,
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    pub type_tag: TypeTag,
    /// Type parameter for odd genus (`n = 5r + 1` for type II, etc.).
    pub r: Option<u32>,
}

/// Balanced 5-partition of `total`, ascending (smaller parts first).
pub fn balanced_partition(total: i64) -> Vec<i64> {
    let q = total.div_euclid(5);
    let rem = total.rem_euclid(5) as usize;
    (0..5).map(|i| q + i64::from(i >= 5 - rem)).collect()
}

pub fn config_for_genus(g: u32) -> Result<GonalConfig, GonalError> {
    if g < MIN_GENUS {
        return Err(GonalError::GenusTooSmall(g));
    }
    let f = g - 4;
    let a = balanced_partition(2 * g as i64 - 12);
    let b: Vec<i64> = a.iter().map(|&x| f as i64 - 2 - x).collect();
    let (n, type_tag, r) = if g % 2 == 1 {
        let n = (g - 1) / 2;
        let (tag, r) = match n % 5 {
            0 => (TypeTag::I, n / 5 - 1),
            1 => (TypeTag::II, (n - 1) / 5),
            2 => (TypeTag::III, (n - 2) / 5),
            3 => (TypeTag::IV, (n - 3) / 5),
            _ => (TypeTag::V, (n - 4) / 5),
        };
        (n, tag, Some(r))
    } else {
        (g / 2, TypeTag::Even, None)
    };
    Ok(GonalConfig {
        g,
        n,
        f,
        d: 4,
        a,
        b,
        type_tag,
        r,
    })
}

impl GonalConfig {
    pub fn scroll(&self) -> ScrollType {
        ScrollType::balanced(self.f, self.d as usize).expect("f >= 5")
    }

    /// Bidegree of `Ψ_{qi}`: `(1, a_q - b_i)`.
    pub fn entry_bidegree(&self, q: usize, i: usize) -> Bidegree {
        Bidegree::new(1, self.a[q] - self.b[i])
    }

    /// Bidegree of the `i`-th Pfaffian: `(2, -a_i)`.
    pub fn pfaffian_bidegree(&self, i: usize) -> Bidegree {
        Bidegree::new(2, -self.a[i])
    }

    /// `(g-2)(g-3)/2`.
    pub fn quadric_count(&self) -> usize {
        let g = self.g as usize;
        (g - 2) * (g - 3) / 2
    }
}

/// Whether `∧²F* ⊗ L = ⊕_{i<j} O(H - (b_i + b_j - (f-2))R)` is globally generated.
pub fn bertini_predicate(config: &GonalConfig, scroll: &ScrollType) -> bool {
    let min_e = scroll.min_e() as i64;
    let f2 = config.f as i64 - 2;
    (0..5).all(|i| (i + 1..5).all(|j| min_e - (config.b[i] + config.b[j] - f2) >= 0))
}

/// A skew-symmetric 5×5 matrix of sections; only the upper triangle is stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SkewPsi {
    pub config: GonalConfig,
    pub scroll: ScrollType,
    pub field: PrimeField,
    pub seed: u64,
    upper: Vec<ScrollSection>,
}

/// Position of `(q, i)`, `q < i`, in row-major upper-triangular order.
fn upper_index(q: usize, i: usize) -> usize {
    debug_assert!(q < i && i < 5);
    q * (9 - q) / 2 + (i - q - 1)
}

pub fn upper_pairs() -> impl Iterator<Item = (usize, usize)> {
    (0..5).flat_map(|q| (q + 1..5).map(move |i| (q, i)))
}

impl SkewPsi {
    /// Builds Ψ from its ten upper-triangular entries in row-major order,
    /// checking every bidegree against the configuration.
    pub fn from_upper(
        config: GonalConfig,
        field: PrimeField,
        seed: u64,
        upper: Vec<ScrollSection>,
    ) -> Result<Self, GonalError> {
        let scroll = config.scroll();
        if upper.len() != 10 {
            return Err(GonalError::Malformed(format!("{} upper entries", upper.len())));
        }
        for ((q, i), x) in upper_pairs().zip(&upper) {
            let want = config.entry_bidegree(q, i);
            if x.bidegree() != want || x.scroll() != &scroll {
                return Err(GonalError::Malformed(format!(
                    "entry ({q},{i}) has bidegree {}, expected {want}",
                    x.bidegree()
                )));
            }
        }
        Ok(SkewPsi {
            config,
            scroll,
            field,
            seed,
            upper,
        })
    }

    /// The entry `Ψ_{qi}` (negated upper entry below the diagonal, zero on it).
    pub fn entry(&self, q: usize, i: usize) -> ScrollSection {
        use std::cmp::Ordering::*;
        match q.cmp(&i) {
            Less => self.upper[upper_index(q, i)].clone(),
            Greater => self.upper[upper_index(i, q)].neg(&self.field),
            Equal => ScrollSection::zero(&self.scroll, self.config.entry_bidegree(q, q)).expect("a = 1"),
        }
    }

    pub fn upper(&self) -> &[ScrollSection] {
        &self.upper
    }

    pub fn full_matrix(&self) -> Vec<Vec<ScrollSection>> {
        (0..5).map(|q| (0..5).map(|i| self.entry(q, i)).collect()).collect()
    }
}

/// Draws every upper-triangular entry with independent uniform coordinates in
/// the monomial basis of its section space.
pub fn random_psi(config: &GonalConfig, field: &PrimeField, seed: u64) -> SkewPsi {
    let scroll = config.scroll();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let upper = upper_pairs()
        .map(|(q, i)| {
            let deg = config.entry_bidegree(q, i);
            let coords: Vec<u32> = (0..h0(&scroll, deg)).map(|_| field.random(&mut rng)).collect();
            ScrollSection::from_coords(&scroll, deg, &coords).expect("basis-sized coordinates")
        })
        .collect();
    SkewPsi::from_upper(config.clone(), *field, seed, upper).expect("bidegrees from config")
}

fn pf4(field: &PrimeField, m: &[Vec<ScrollSection>], k: [usize; 4]) -> Result<ScrollSection, ScrollError> {
    let [k1, k2, k3, k4] = k;
    let t1 = m[k1][k2].multiply(field, &m[k3][k4])?;
    let t2 = m[k1][k3].multiply(field, &m[k2][k4])?;
    let t3 = m[k1][k4].multiply(field, &m[k2][k3])?;
    t1.sub(field, &t2)?.add(field, &t3)
}

/// Signed deletion Pfaffians `(-1)^i Pf(M with row/column i removed)` (0-based `i`)
/// of a full 5×5 skew-symmetric matrix of sections.
pub fn pfaffians_of_matrix(field: &PrimeField, m: &[Vec<ScrollSection>]) -> Result<Vec<ScrollSection>, GonalError> {
    (0..5)
        .map(|i| {
            let mut k = [0usize; 4];
            let mut t = 0;
            for j in (0..5).filter(|&j| j != i) {
                k[t] = j;
                t += 1;
            }
            let p =
                pf4(field, m, k).map_err(|e| GonalError::Malformed(format!("Pfaffian {i} is not homogeneous: {e}")))?;
            Ok(if i % 2 == 0 { p } else { p.neg(field) })
        })
        .collect()
}

pub fn pfaffians(psi: &SkewPsi) -> Result<Vec<ScrollSection>, GonalError> {
    pfaffians_of_matrix(&psi.field, &psi.full_matrix())
}

/// Whether `Σ_i Ψ_{qi} · Pf_i = 0` for every row `q`.
pub fn laplace_identity(psi: &SkewPsi, pfaffians: &[ScrollSection]) -> Result<bool, GonalError> {
    for q in 0..5 {
        let mut acc: Option<ScrollSection> = None;
        for (i, p) in pfaffians.iter().enumerate() {
            let t = psi.entry(q, i).multiply(&psi.field, p)?;
            acc = Some(match acc {
                None => t,
                Some(a) => a.add(&psi.field, &t)?,
            });
        }
        if !acc.is_some_and(|a| a.is_zero()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The quadrics of the curve: the `C(f,2)` minors of Φ followed by the lifts of
/// `Pf_i · s^{a_i-k} t^k`, `k = 0..=a_i`, for each `i`.
pub fn curve_quadrics(
    field: &PrimeField,
    config: &GonalConfig,
    scroll: &ScrollType,
    pfaffians: &[ScrollSection],
) -> Result<Vec<Quadric>, GonalError> {
    let mut out = phi_matrix(scroll).minors(field);
    for (i, pf) in pfaffians.iter().enumerate() {
        let ai = config.a[i] as usize;
        for k in 0..=ai {
            let mut mono = vec![0u32; ai + 1];
            mono[k] = 1;
            out.push(section_to_quadric(field, &pf.mul_form(field, &mono))?);
        }
    }
    Ok(out)
}

/// Rank of a set of quadrics in `Sym_2` of `g` variables.
pub fn quadric_rank(field: &PrimeField, quadrics: &[Quadric], g: usize) -> usize {
    let cols: Vec<Vec<u32>> = quadrics.iter().map(|q| q.to_sym2_vector(g)).collect();
    DenseMatrix::from_columns(g * (g + 1) / 2, &cols).rank(field)
}

/// `dim Sym_m(V) / I_m` for `m ∈ {2, 3}`, where `I_3 = V·I_2`.
pub fn hilbert_check(field: &PrimeField, quadrics: &[Quadric], g: usize, m: usize) -> usize {
    match m {
        2 => g * (g + 1) / 2 - quadric_rank(field, quadrics, g),
        3 => {
            let mons = monomials(g, 3);
            let index: std::collections::HashMap<&[u32], usize> =
                mons.iter().enumerate().map(|(i, x)| (x.as_slice(), i)).collect();
            let mut cols = Vec::with_capacity(g * quadrics.len());
            for q in quadrics {
                for v in 0..g as u32 {
                    let mut col = vec![0u32; mons.len()];
                    for (&(x, y), &c) in q.terms() {
                        let mut m3 = [x, y, v];
                        m3.sort_unstable();
                        let k = index[&m3[..]];
                        col[k] = field.add(col[k], c);
                    }
                    cols.push(col);
                }
            }
            mons.len() - DenseMatrix::from_columns(mons.len(), &cols).rank(field)
        }
        _ => panic!("hilbert_check supports m = 2, 3"),
    }
}

/// Everything downstream commands need about one random curve.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CurveBundle {
    pub psi: SkewPsi,
    pub pfaffians: Vec<ScrollSection>,
    pub quadrics: Vec<Quadric>,
}

impl CurveBundle {
    pub fn config(&self) -> &GonalConfig {
        &self.psi.config
    }

    pub fn field(&self) -> PrimeField {
        self.psi.field
    }

    pub fn genus(&self) -> u32 {
        self.psi.config.g
    }

    /// Assembles the bundle from Ψ, checking the quadric count and independence.
    pub fn from_psi(psi: SkewPsi) -> Result<Self, GonalError> {
        let field = psi.field;
        let pf = pfaffians(&psi)?;
        for (i, p) in pf.iter().enumerate() {
            if p.bidegree() != psi.config.pfaffian_bidegree(i) {
                return Err(GonalError::Malformed(format!(
                    "Pfaffian {i} has bidegree {}",
                    p.bidegree()
                )));
            }
        }
        let quadrics = curve_quadrics(&field, &psi.config, &psi.scroll, &pf)?;
        let want = psi.config.quadric_count();
        if quadrics.len() != want {
            return Err(GonalError::Malformed(format!(
                "{} quadrics, expected {want}",
                quadrics.len()
            )));
        }
        let rank = quadric_rank(&field, &quadrics, psi.config.g as usize);
        if rank != want {
            return Err(GonalError::Degenerate {
                seed: psi.seed,
                reason: format!("quadrics span only {rank} of {want} dimensions"),
            });
        }
        Ok(CurveBundle {
            psi,
            pfaffians: pf,
            quadrics,
        })
    }

    /// Checks `dim (S_C)_m = (2m-1)(g-1)` for `m = 2, 3`.
    pub fn check_hilbert(&self) -> Result<(), GonalError> {
        let g = self.genus() as usize;
        for m in [2, 3] {
            let got = hilbert_check(&self.field(), &self.quadrics, g, m);
            let want = (2 * m - 1) * (g - 1);
            if got != want {
                return Err(GonalError::Degenerate {
                    seed: self.psi.seed,
                    reason: format!("Hilbert function in degree {m} is {got}, expected {want}"),
                });
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> BundleJson {
        let terms = |x: &ScrollSection| {
            x.terms()
                .map(|(alpha, coeffs)| TermJson {
                    alpha: alpha.clone(),
                    coeffs: coeffs.clone(),
                })
                .collect()
        };
        let cfg = self.config();
        BundleJson {
            version: 1,
            prime: self.field().p(),
            genus: cfg.g,
            seed: self.psi.seed,
            scroll: self.psi.scroll.e().to_vec(),
            a: cfg.a.clone(),
            b: cfg.b.clone(),
            psi: upper_pairs()
                .zip(self.psi.upper())
                .map(|((row, col), x)| PsiEntryJson {
                    row,
                    col,
                    terms: terms(x),
                })
                .collect(),
            pfaffians: self
                .pfaffians
                .iter()
                .enumerate()
                .map(|(index, x)| PfaffianJson { index, terms: terms(x) })
                .collect(),
            quadrics: self.quadrics.iter().cloned().map(Vec::from).collect(),
        }
    }

    /// Rebuilds and validates a bundle: Pfaffians and quadrics are recomputed
    /// from Ψ and must match the stored ones.
    pub fn from_json(j: &BundleJson) -> Result<Self, GonalError> {
        let bad = |s: String| GonalError::InvalidBundle(s);
        if j.version != 1 {
            return Err(bad(format!("unsupported version {}", j.version)));
        }
        let field = PrimeField::new(j.prime)?;
        let config = config_for_genus(j.genus)?;
        if config.a != j.a || config.b != j.b {
            return Err(bad("partitions do not match the genus".into()));
        }
        let scroll = config.scroll();
        if scroll.e() != j.scroll.as_slice() {
            return Err(bad(format!("scroll {:?} is not the balanced scroll", j.scroll)));
        }
        let mut upper: Vec<Option<ScrollSection>> = vec![None; 10];
        for e in &j.psi {
            if e.row >= e.col || e.col >= 5 {
                return Err(bad(format!("entry ({},{}) is not upper triangular", e.row, e.col)));
            }
            let terms = e.terms.iter().map(|t| (t.alpha.clone(), t.coeffs.clone())).collect();
            let x = ScrollSection::from_terms(&field, &scroll, config.entry_bidegree(e.row, e.col), terms)?;
            let slot = &mut upper[upper_index(e.row, e.col)];
            if slot.is_some() {
                return Err(bad(format!("duplicate entry ({},{})", e.row, e.col)));
            }
            *slot = Some(x);
        }
        let upper: Vec<ScrollSection> = upper
            .into_iter()
            .map(|x| x.ok_or_else(|| bad("missing Ψ entry".into())))
            .collect::<Result<_, _>>()?;
        let psi = SkewPsi::from_upper(config, field, j.seed, upper)?;
        let bundle = CurveBundle::from_psi(psi)?;
        let stored = bundle.to_json();
        if stored.pfaffians != j.pfaffians {
            return Err(bad("stored Pfaffians differ from those of Ψ".into()));
        }
        if stored.quadrics != j.quadrics {
            return Err(bad("stored quadrics differ from those of Ψ".into()));
        }
        Ok(bundle)
    }
}

/// Generates, validates and packages a random curve of genus `g`.
pub fn generate_curve(g: u32, field: &PrimeField, seed: u64) -> Result<CurveBundle, GonalError> {
    let config = config_for_genus(g)?;
    let bundle = CurveBundle::from_psi(random_psi(&config, field, seed))?;
    bundle.check_hilbert()?;
    Ok(bundle)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub alpha: Vec<u32>,
    pub coeffs: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiEntryJson {
    pub row: usize,
    pub col: usize,
    pub terms: Vec<TermJson>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PfaffianJson {
    pub index: usize,
    pub terms: Vec<TermJson>,
}

/// On-disk form of a [`CurveBundle`]. Indices are 0-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BundleJson {
    pub version: u32,
    pub prime: u32,
    pub genus: u32,
    pub seed: u64,
    pub scroll: Vec<u32>,
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    pub psi: Vec<PsiEntryJson>,
    pub pfaffians: Vec<PfaffianJson>,
    pub quadrics: Vec<Vec<crate::poly::QuadricTerm>>,
}
