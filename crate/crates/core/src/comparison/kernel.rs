use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::exterior::{binom, subsets};
use crate::gonal5::{random_psi, upper_pairs, GonalConfig, SkewPsi};
use crate::linalg::{DenseMatrix, PrimeField};
use crate::scroll::{form_mul, Bidegree, ScrollSection};

use super::blocks::{entry_action, monomial_form, source_dim, source_offset};
use super::ComparisonError;

const EXTRA_FACTOR_RETRIES: usize = 16;

/// Largest `C(f, j)` for which kernel elements are expanded into coordinates.
pub const MAX_EXPANDED_SUBSETS: u64 = 1 << 20;

/// Rank test showing `entry_action(Ψ_{q,col}, g·g'_m)` lies in the span of the
/// factors.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MembershipCheck {
    pub q: usize,
    pub m: usize,
    pub in_span: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub factor_rank: usize,
    pub checks: Vec<MembershipCheck>,
    pub verified: bool,
}

/// A decomposable element `(f_1 ∧ … ∧ f_j) ⊗ g` of `Λ^j F ⊗ S_{b-j} G` in
/// source block `column`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct KernelElement {
    pub column: usize,
    pub j: usize,
    pub shift: usize,
    /// Coefficients of `g`, descending in `s`.
    pub cofactor: Vec<u32>,
    /// Factors in `F` coordinates; the first `forced` come from Ψ.
    pub factors: Vec<Vec<u32>>,
    pub forced: usize,
    pub certificate: Certificate,
}

/// The column used by the construction: the first index of maximal `b_i`.
pub fn distinguished_column(config: &GonalConfig) -> usize {
    let max = *config.b.iter().max().unwrap();
    config.b.iter().position(|&b| b == max).unwrap()
}

/// `Σ_{q ≠ col} (j - a_q)` factors are forced by Ψ at index `j = n - 2 + c`.
pub fn forced_factor_count(config: &GonalConfig, shift: usize) -> usize {
    let col = distinguished_column(config);
    let j = (config.n as usize - 2 + shift) as i64;
    (0..5)
        .filter(|&q| q != col)
        .map(|q| (j - config.a[q]).max(0) as usize)
        .sum()
}

/// Whether the genus is in the range where the construction is known to work for shift `c`
/// (`g ≥ 30c + 13` odd, `g ≥ 30c + 28` even).
pub fn theorem_threshold(g: u32, shift: usize) -> bool {
    let c = shift as u32;
    if g % 2 == 1 {
        g >= 30 * c + 13
    } else {
        g >= 30 * c + 28
    }
}

fn forced_factors(
    psi: &SkewPsi,
    col: usize,
    j: usize,
    cofactor: &[u32],
) -> Result<Vec<(usize, usize, Vec<u32>)>, ComparisonError> {
    let field = &psi.field;
    let mut out = Vec::new();
    for q in (0..5).filter(|&q| q != col) {
        let a = psi.config.a[q];
        if (j as i64) < a + 1 {
            return Err(ComparisonError::NotScalar { q, i: col, j });
        }
        let d = j - a as usize - 1;
        let entry = psi.entry(q, col);
        for m in 0..=d {
            let h = form_mul(field, cofactor, &monomial_form(d, m));
            out.push((q, m, entry_action(field, &entry, &h)?));
        }
    }
    Ok(out)
}

fn rank_of(field: &PrimeField, vectors: &[Vec<u32>], len: usize) -> usize {
    DenseMatrix::from_columns(len, vectors).rank(field)
}

/// Re-derives every vector the construction needs from Ψ and tests it against
/// the span of the factors.
pub fn certify(psi: &SkewPsi, el: &KernelElement) -> Result<Certificate, ComparisonError> {
    let field = &psi.field;
    let f = psi.config.f as usize;
    let factor_rank = rank_of(field, &el.factors, f);
    let mut checks = Vec::new();
    for q in (0..5).filter(|&q| q != el.column) {
        let d = el.j as i64 - psi.config.a[q] - 1;
        if d < 0 {
            return Err(ComparisonError::NotScalar {
                q,
                i: el.column,
                j: el.j,
            });
        }
        let entry = psi.entry(q, el.column);
        for m in 0..=d as usize {
            let h = entry.mul_form(field, &form_mul(field, &el.cofactor, &monomial_form(d as usize, m)));
            let mut with = el.factors.clone();
            with.push(h.to_coords());
            checks.push(MembershipCheck {
                q,
                m,
                in_span: rank_of(field, &with, f) == factor_rank,
            });
        }
    }
    let verified = factor_rank == el.j && el.cofactor.iter().any(|&x| x != 0) && checks.iter().all(|c| c.in_span);
    Ok(Certificate {
        factor_rank,
        checks,
        verified,
    })
}

/// The decomposable kernel element of `ψ_{n-2+c}` built from the distinguished
/// column: `g` and the extra factors are drawn from `rng`.
pub fn kernel_element<R: Rng>(psi: &SkewPsi, shift: usize, rng: &mut R) -> Result<KernelElement, ComparisonError> {
    let cfg = &psi.config;
    let field = &psi.field;
    let col = distinguished_column(cfg);
    let j = cfg.n as usize - 2 + shift;
    let b = cfg.b[col];
    if b < j as i64 {
        return Err(ComparisonError::NotScalar { q: col, i: col, j });
    }
    let needed = forced_factor_count(cfg, shift);
    if needed > j {
        return Err(ComparisonError::Threshold {
            genus: cfg.g,
            shift,
            needed,
            available: j,
        });
    }
    let mut cofactor: Vec<u32> = Vec::new();
    while cofactor.iter().all(|&x| x == 0) {
        cofactor = (0..=(b as usize - j)).map(|_| field.random(rng)).collect();
    }
    build_element(psi, shift, col, j, cofactor, rng)
}

fn build_element<R: Rng>(
    psi: &SkewPsi,
    shift: usize,
    col: usize,
    j: usize,
    cofactor: Vec<u32>,
    rng: &mut R,
) -> Result<KernelElement, ComparisonError> {
    let field = &psi.field;
    let f = psi.config.f as usize;
    let forced: Vec<Vec<u32>> = forced_factors(psi, col, j, &cofactor)?
        .into_iter()
        .map(|(_, _, v)| v)
        .collect();
    if rank_of(field, &forced, f) < forced.len() {
        return Err(ComparisonError::Degenerate {
            seed: psi.seed,
            reason: "forced factors are linearly dependent".into(),
        });
    }
    for _ in 0..EXTRA_FACTOR_RETRIES {
        let mut factors = forced.clone();
        while factors.len() < j {
            factors.push((0..f).map(|_| field.random(rng)).collect());
        }
        if rank_of(field, &factors, f) < j {
            continue;
        }
        let mut el = KernelElement {
            column: col,
            j,
            shift,
            cofactor: cofactor.clone(),
            factors,
            forced: forced.len(),
            certificate: Certificate {
                factor_rank: 0,
                checks: Vec::new(),
                verified: false,
            },
        };
        el.certificate = certify(psi, &el)?;
        return Ok(el);
    }
    Err(ComparisonError::Degenerate {
        seed: psi.seed,
        reason: "could not complete the factors to an independent set".into(),
    })
}

/// Determinant over GF(p) by elimination.
fn det(field: &PrimeField, mut m: Vec<Vec<u32>>) -> u32 {
    let n = m.len();
    let mut d = 1u32;
    for c in 0..n {
        let Some(r) = (c..n).find(|&r| m[r][c] != 0) else {
            return 0;
        };
        if r != c {
            m.swap(r, c);
            d = field.neg(d);
        }
        d = field.mul(d, m[c][c]);
        let inv = field.inv(m[c][c]);
        for r2 in c + 1..n {
            let x = field.mul(m[r2][c], inv);
            if x == 0 {
                continue;
            }
            for k in c..n {
                m[r2][k] = field.sub(m[r2][k], field.mul(x, m[c][k]));
            }
        }
    }
    d
}

impl KernelElement {
    /// Coordinates of `∧ factors` in the colex basis of `Λ^j F`: the `j×j` minors.
    pub fn wedge_coordinates(&self, field: &PrimeField, f: usize) -> Option<Vec<u32>> {
        if binom(f, self.j) > MAX_EXPANDED_SUBSETS {
            return None;
        }
        Some(
            subsets(f, self.j)
                .into_iter()
                .map(|s| {
                    det(
                        field,
                        s.iter().map(|&r| self.factors.iter().map(|v| v[r]).collect()).collect(),
                    )
                })
                .collect(),
        )
    }

    /// The element as a vector in the source of `assemble_psi(psi, j)`.
    pub fn source_vector(&self, psi: &SkewPsi) -> Option<Vec<u32>> {
        let field = &psi.field;
        let f = psi.config.f as usize;
        let wedge = self.wedge_coordinates(field, f)?;
        let total: usize = (0..5).map(|i| source_dim(psi, i, self.j)).sum();
        let off = source_offset(psi, self.column, self.j);
        let mult = self.cofactor.len();
        let mut v = vec![0u32; total];
        for (r, &w) in wedge.iter().enumerate() {
            for (k, &g) in self.cofactor.iter().enumerate() {
                v[off + r * mult + k] = field.mul(w, g);
            }
        }
        Some(v)
    }
}

/// A genus-13 Ψ whose distinguished column is `(sφ_1, φ_2, φ_3, φ_4)`, the
/// remaining entries random.
pub fn normalized_psi_g13(field: &PrimeField, seed: u64) -> Result<SkewPsi, ComparisonError> {
    let generic = random_psi(&crate::gonal5::config_for_genus(13)?, field, seed);
    let cfg = generic.config.clone();
    let scroll = generic.scroll.clone();
    let column: Vec<ScrollSection> = (0..4)
        .map(|k| {
            let phi = ScrollSection::phi(&scroll, k);
            if k == 0 {
                phi.mul_form(field, &[1, 0])
            } else {
                phi
            }
        })
        .collect();
    let upper: Vec<ScrollSection> = upper_pairs()
        .zip(generic.upper())
        .map(|((q, i), x)| {
            if q == 0 {
                // Ψ_{0i} = −Ψ_{i0}
                debug_assert_eq!(column[i - 1].bidegree(), Bidegree::new(1, cfg.a[0] - cfg.b[i]));
                column[i - 1].neg(field)
            } else {
                x.clone()
            }
        })
        .collect();
    Ok(SkewPsi::from_upper(cfg, *field, seed, upper)?)
}

/// The genus-13 family `∧_q Ψ_{q,0}((λs+μt)) ⊗ (λs+μt)`, one element per `(λ:μ)`.
pub fn kernel_family_g13(psi: &SkewPsi, lambda: u32, mu: u32) -> Result<KernelElement, ComparisonError> {
    if psi.config.g != 13 {
        return Err(ComparisonError::WrongGenus(psi.config.g));
    }
    if lambda == 0 && mu == 0 {
        return Err(ComparisonError::ZeroParameter);
    }
    let col = distinguished_column(&psi.config);
    let j = psi.config.n as usize - 2;
    // no random factors are needed: the forced ones already number j
    let mut rng = rand::rngs::mock::StepRng::new(0, 0);
    build_element(psi, 0, col, j, vec![lambda, mu], &mut rng)
}

/// `dim` of the span of the given source vectors.
pub fn span_dim(field: &PrimeField, vectors: &[Vec<u32>]) -> usize {
    let len = vectors.first().map_or(0, Vec::len);
    rank_of(field, vectors, len)
}
