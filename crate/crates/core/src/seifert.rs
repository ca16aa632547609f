//! Seifert bundle invariants over a cyclic 4-orbifold: Chern class, the three
//! criteria for `H₁(M, ℤ) = 0`, `H₂(M, ℤ)`, and a bounded search for a
//! background class `c₁(B)`.
//!
//! Classes in `H²(X − P, ℤ)` are represented by their pairings with a
//! declared integral basis `{β_r}` of `H₂(X, ℤ)` (the config's
//! `integral_pairing`).

use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::exactmath::{
    factorize, gcd_all, mod_inverse, smith_normal_form, to_integer, ArithError, Int, IntMatrix,
    Rational,
};
use crate::orbmodel::{Id, OrbifoldConfig};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeifertError {
    #[error("the base has no integral pairing")]
    MissingIntegralPairing,
    #[error("integral pairing has the wrong shape")]
    PairingShape,
    #[error("isotropy surface {0} has no homology class")]
    MissingQClass(Id),
    #[error("entry {0} is not an integer")]
    NonIntegralEntry(String),
    #[error("c1(B) has length {got}, expected b2 = {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("residue for {0} is not the inverse of j modulo m")]
    ResidueMismatch(Id),
    #[error("H1(M) is not zero")]
    H1NotZero,
    #[error("a primitive Chern class needs b2 >= 3 (got {0})")]
    PrimitiveNeedsB2(usize),
    #[error("no background class within bound {0}")]
    NotFound(i64),
    #[error("search budget of {0} candidates exhausted")]
    BudgetExceeded(u64),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// A finitely generated abelian group `ℤ^rank ⊕ ⊕ ℤ_{dᵢ}` with
/// `d₁ | d₂ | …`, all `dᵢ ≥ 2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianGroup {
    pub rank: usize,
    pub torsion: Vec<Int>,
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        Self {
            rank: 0,
            torsion: Vec::new(),
        }
    }

    /// Normalizes `ℤ^rank ⊕ ⊕ ℤ_{orders}`. Orders of `1` are dropped and `0`
    /// adds a free summand.
    pub fn from_cyclic(rank: usize, orders: &[Int]) -> Result<Self, ArithError> {
        let mut rank = rank;
        // per prime, exponents of the cyclic prime-power summands
        let mut by_prime: BTreeMap<Int, Vec<u32>> = BTreeMap::new();
        for o in orders {
            let o = o.abs();
            if o.is_zero() {
                rank += 1;
                continue;
            }
            for (p, e) in factorize(&o)? {
                by_prime.entry(p).or_default().push(e);
            }
        }
        let len = by_prime.values().map(Vec::len).max().unwrap_or(0);
        let mut torsion = vec![Int::one(); len];
        for (p, mut exps) in by_prime {
            exps.sort_unstable();
            // largest exponents go to the last factors
            let offset = len - exps.len();
            for (k, e) in exps.into_iter().enumerate() {
                torsion[offset + k] *= num_traits::pow(p.clone(), e as usize);
            }
        }
        Ok(Self { rank, torsion })
    }

    /// Number of `ℤ_{pⁱ}` summands in the primary decomposition, keyed by
    /// `(p, i)`.
    pub fn prime_power_profile(&self) -> BTreeMap<(Int, u32), usize> {
        let mut out = BTreeMap::new();
        for d in &self.torsion {
            for (p, e) in factorize(d).expect("invariant factors are positive") {
                *out.entry((p, e)).or_insert(0) += 1;
            }
        }
        out
    }

    /// Order of a finite group; `None` if the rank is positive.
    pub fn order(&self) -> Option<Int> {
        (self.rank == 0).then(|| self.torsion.iter().product())
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    /// Whether this group is a quotient of `other`, for finite groups: each
    /// primary component embeds factor-by-factor.
    pub fn is_quotient_of_finite(&self, other: &AbelianGroup) -> bool {
        if self.rank > 0 || other.rank > 0 {
            return self.rank <= other.rank;
        }
        if self.torsion.len() > other.torsion.len() {
            return false;
        }
        let off = other.torsion.len() - self.torsion.len();
        self.torsion
            .iter()
            .zip(&other.torsion[off..])
            .all(|(a, b)| b.is_multiple_of(a))
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.rank > 0 {
            parts.push(if self.rank == 1 {
                "Z".to_string()
            } else {
                format!("Z^{}", self.rank)
            });
        }
        let mut i = 0;
        while i < self.torsion.len() {
            let d = &self.torsion[i];
            let n = self.torsion[i..].iter().take_while(|x| *x == d).count();
            parts.push(if n == 1 {
                format!("Z_{d}")
            } else {
                format!("Z_{d}^{n}")
            });
            i += n;
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// A class in `H²(X − P, ℚ)` given by its pairings with the integral basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalClass(pub Vec<Rational>);

impl RationalClass {
    pub fn scaled(&self, k: &Int) -> RationalClass {
        RationalClass(
            self.0
                .iter()
                .map(|v| v * Rational::from_integer(k.clone()))
                .collect(),
        )
    }

    /// Entries as integers, if all are integral.
    pub fn integral(&self) -> Result<Vec<Int>, SeifertError> {
        self.0
            .iter()
            .map(|v| to_integer(v).ok_or_else(|| SeifertError::NonIntegralEntry(v.to_string())))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeifertSpec {
    pub base: OrbifoldConfig,
    pub b_residues: BTreeMap<Id, Int>,
    pub c1b: Vec<Int>,
}

impl SeifertSpec {
    /// Builds a spec with residues `bᵢ = jᵢ⁻¹ mod mᵢ`.
    pub fn new(base: OrbifoldConfig, c1b: Vec<Int>) -> Result<Self, SeifertError> {
        if c1b.len() != base.b2 {
            return Err(SeifertError::LengthMismatch {
                got: c1b.len(),
                expected: base.b2,
            });
        }
        let b_residues = compute_b_residues(&base)?;
        Ok(Self {
            base,
            b_residues,
            c1b,
        })
    }

    /// Checks the residues and the length of `c₁(B)`.
    pub fn check(&self) -> Result<(), SeifertError> {
        if self.c1b.len() != self.base.b2 {
            return Err(SeifertError::LengthMismatch {
                got: self.c1b.len(),
                expected: self.base.b2,
            });
        }
        let expected = compute_b_residues(&self.base)?;
        for (id, b) in &expected {
            if self.b_residues.get(id) != Some(b) {
                return Err(SeifertError::ResidueMismatch(id.clone()));
            }
        }
        if let Some(extra) = self.b_residues.keys().find(|k| !expected.contains_key(*k)) {
            return Err(SeifertError::ResidueMismatch(extra.clone()));
        }
        Ok(())
    }

    /// `m = lcm(mᵢ)`.
    pub fn order(&self) -> Int {
        self.base.lcm_multiplicity()
    }
}

/// `bᵢ ∈ (0, mᵢ)` with `jᵢbᵢ ≡ 1 (mod mᵢ)` for every isotropy surface.
pub fn compute_b_residues(cfg: &OrbifoldConfig) -> Result<BTreeMap<Id, Int>, SeifertError> {
    let mut out = BTreeMap::new();
    for s in cfg.isotropy_surfaces() {
        out.insert(s.id.clone(), mod_inverse(&s.j, &s.multiplicity)?);
    }
    Ok(out)
}

fn integral_pairing(cfg: &OrbifoldConfig) -> Result<&IntMatrix, SeifertError> {
    let p = cfg
        .integral_pairing
        .as_ref()
        .ok_or(SeifertError::MissingIntegralPairing)?;
    if p.rows() != cfg.b2 || p.cols() != cfg.surfaces.len() {
        return Err(SeifertError::PairingShape);
    }
    Ok(p)
}

/// `⟨c₁(M), β_r⟩ = ⟨c₁(B), β_r⟩ + Σᵢ (bᵢ/mᵢ)⟨β_r, Dᵢ⟩`.
pub fn chern_class(spec: &SeifertSpec) -> Result<RationalClass, SeifertError> {
    let cfg = &spec.base;
    let p = integral_pairing(cfg)?;
    if spec.c1b.len() != cfg.b2 {
        return Err(SeifertError::LengthMismatch {
            got: spec.c1b.len(),
            expected: cfg.b2,
        });
    }
    let mut out: Vec<Rational> = spec
        .c1b
        .iter()
        .map(|c| Rational::from_integer(c.clone()))
        .collect();
    for (i, s) in cfg.surfaces.iter().enumerate() {
        if !s.is_isotropy() {
            continue;
        }
        if s.qclass.is_none() {
            return Err(SeifertError::MissingQClass(s.id.clone()));
        }
        let b = spec
            .b_residues
            .get(&s.id)
            .ok_or_else(|| SeifertError::ResidueMismatch(s.id.clone()))?;
        let coef = Rational::new(b.clone(), s.multiplicity.clone());
        for (r, o) in out.iter_mut().enumerate() {
            *o += &coef * Rational::from_integer(p[(r, i)].clone());
        }
    }
    Ok(RationalClass(out))
}

/// Primitivity in the dual lattice: the entries are integers with gcd 1.
pub fn is_primitive(alpha: &[Rational]) -> Result<bool, SeifertError> {
    let ints = RationalClass(alpha.to_vec()).integral()?;
    Ok(gcd_all(&ints).is_one())
}

/// The block matrix `[Pᵀ | diag(mᵢ)]` over the isotropy surfaces, whose
/// cokernel is the cokernel of `H²(X) → ⊕ ℤ_{mᵢ}`.
pub fn torsion_map_matrix(cfg: &OrbifoldConfig) -> Result<IntMatrix, SeifertError> {
    let p = integral_pairing(cfg)?;
    let iso: Vec<usize> = cfg
        .surfaces
        .iter()
        .enumerate()
        .filter(|(_, s)| s.is_isotropy())
        .map(|(i, _)| i)
        .collect();
    let n = iso.len();
    let mut m = IntMatrix::zeros(n, cfg.b2 + n);
    for (row, &i) in iso.iter().enumerate() {
        for r in 0..cfg.b2 {
            m[(row, r)] = p[(r, i)].clone();
        }
        m[(row, cfg.b2 + row)] = cfg.surfaces[i].multiplicity.clone();
    }
    Ok(m)
}

/// Surjectivity of `βᵣ ↦ (⟨βᵣ, Dᵢ⟩ mod mᵢ)ᵢ` onto `⊕ᵢ ℤ_{mᵢ}`.
pub fn check_surjectivity_onto_torsion(cfg: &OrbifoldConfig) -> Result<bool, SeifertError> {
    let m = torsion_map_matrix(cfg)?;
    let snf = smith_normal_form(&m);
    let f = snf.invariant_factors();
    Ok(f.len() == m.rows() && f.iter().all(One::is_one))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct H1Decision {
    pub b1_zero: bool,
    pub surjective: bool,
    pub primitive: bool,
    pub holds: bool,
    /// `m`, the lcm of the multiplicities.
    pub order: Int,
    /// `c₁(M/m) = m·c₁(M)` as a pairing vector.
    pub scaled_chern: Vec<Int>,
    pub chern: RationalClass,
}

pub fn h1_zero_decision(spec: &SeifertSpec) -> Result<H1Decision, SeifertError> {
    spec.check()?;
    let chern = chern_class(spec)?;
    let m = spec.order();
    let scaled = chern.scaled(&m).integral()?;
    let b1_zero = spec.base.b1 == 0;
    let surjective = check_surjectivity_onto_torsion(&spec.base)?;
    let primitive = gcd_all(&scaled).is_one();
    Ok(H1Decision {
        b1_zero,
        surjective,
        primitive,
        holds: b1_zero && surjective && primitive,
        order: m,
        scaled_chern: scaled,
        chern,
    })
}

/// `H₂(M, ℤ) = ℤ^{b₂−1} ⊕ ⊕ᵢ ℤ_{mᵢ}^{2gᵢ}`, valid when `H₁(M) = 0`.
pub fn h2_of_m(spec: &SeifertSpec) -> Result<AbelianGroup, SeifertError> {
    if !h1_zero_decision(spec)?.holds {
        return Err(SeifertError::H1NotZero);
    }
    let orders = h2_torsion_orders(&spec.base);
    let rank = spec.base.b2.saturating_sub(1);
    Ok(AbelianGroup::from_cyclic(rank, &orders)?)
}

/// The cyclic orders `mᵢ`, each repeated `2gᵢ` times.
pub fn h2_torsion_orders(cfg: &OrbifoldConfig) -> Vec<Int> {
    cfg.isotropy_surfaces()
        .flat_map(|s| std::iter::repeat_n(s.multiplicity.clone(), 2 * s.genus as usize))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ParityMode {
    Equal,
    NotEqual,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchOptions {
    pub want_primitive: bool,
    /// `c₁(B) ≡ α` or `≢ α (mod 2)`, with `α` a pairing vector mod 2.
    pub parity: Option<(Vec<u8>, ParityMode)>,
    /// Each coordinate of `c₁(B)` ranges over `[-bound, bound]`.
    pub bound: i64,
    /// Integral classes (coefficients over `{β_r}`) on which `c₁(M)` must be
    /// positive. `None` means every basis class.
    pub ample: Option<Vec<Vec<Int>>>,
    pub budget: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        Self {
            want_primitive: true,
            parity: None,
            bound: 4,
            ample: None,
            budget: 1_000_000,
        }
    }
}

/// Search order of a single coordinate: `0, 1, -1, 2, -2, …`.
fn coordinate_order(bound: i64) -> Vec<i64> {
    let mut v = vec![0];
    for k in 1..=bound {
        v.push(k);
        v.push(-k);
    }
    v
}

/// First `c₁(B)` in the order induced by [`coordinate_order`] (lexicographic
/// over coordinates) that meets the positivity, primitivity and parity
/// constraints.
pub fn search_background_class(
    cfg: &OrbifoldConfig,
    opts: &SearchOptions,
) -> Result<SeifertSpec, SeifertError> {
    let n = cfg.b2;
    if opts.want_primitive && n < 3 {
        return Err(SeifertError::PrimitiveNeedsB2(n));
    }
    if let Some((alpha, _)) = &opts.parity {
        if alpha.len() != n {
            return Err(SeifertError::LengthMismatch {
                got: alpha.len(),
                expected: n,
            });
        }
    }
    let zero = SeifertSpec::new(cfg.clone(), vec![Int::zero(); n])?;
    // c₁(M) = c1B + base
    let base = chern_class(&zero)?.0;
    let m = zero.order();
    let ample: Vec<Vec<Int>> = opts.ample.clone().unwrap_or_else(|| {
        (0..n)
            .map(|i| {
                let mut v = vec![Int::zero(); n];
                v[i] = Int::one();
                v
            })
            .collect()
    });
    let ample_const: Vec<Rational> = ample
        .iter()
        .map(|w| {
            w.iter().zip(&base).fold(Rational::zero(), |acc, (a, b)| {
                acc + Rational::from_integer(a.clone()) * b
            })
        })
        .collect();
    // suffix sums of |w_r|·bound: the most the remaining coordinates can add
    let slack: Vec<Vec<Int>> = ample
        .iter()
        .map(|w| {
            let mut s = vec![Int::zero(); n + 1];
            for r in (0..n).rev() {
                s[r] = &s[r + 1] + w[r].abs() * Int::from(opts.bound);
            }
            s
        })
        .collect();
    let order = coordinate_order(opts.bound);

    struct Ctx<'a> {
        n: usize,
        order: &'a [i64],
        ample: &'a [Vec<Int>],
        ample_const: &'a [Rational],
        slack: &'a [Vec<Int>],
        base: &'a [Rational],
        m: &'a Int,
        opts: &'a SearchOptions,
        visited: u64,
    }

    fn dfs(
        ctx: &mut Ctx,
        prefix: &mut Vec<i64>,
        partial: &mut Vec<Rational>,
    ) -> Result<Option<Vec<i64>>, SeifertError> {
        let k = prefix.len();
        for (c, s) in partial.iter().zip(ctx.slack) {
            if c + Rational::from_integer(s[k].clone()) <= Rational::zero() {
                return Ok(None);
            }
        }
        if k == ctx.n {
            ctx.visited += 1;
            if ctx.visited > ctx.opts.budget {
                return Err(SeifertError::BudgetExceeded(ctx.opts.budget));
            }
            if let Some((alpha, ParityMode::NotEqual)) = &ctx.opts.parity {
                let same = prefix
                    .iter()
                    .zip(alpha)
                    .all(|(c, a)| (c.rem_euclid(2) as u8) == a % 2);
                if same {
                    return Ok(None);
                }
            }
            if ctx.opts.want_primitive {
                let scaled: Vec<Int> = prefix
                    .iter()
                    .zip(ctx.base)
                    .map(|(c, b)| {
                        let v = (Rational::from_integer(Int::from(*c)) + b)
                            * Rational::from_integer(ctx.m.clone());
                        v.to_integer()
                    })
                    .collect();
                if !gcd_all(&scaled).is_one() {
                    return Ok(None);
                }
            }
            return Ok(Some(prefix.clone()));
        }
        for &v in ctx.order {
            if let Some((alpha, ParityMode::Equal)) = &ctx.opts.parity {
                if v.rem_euclid(2) as u8 != alpha[k] % 2 {
                    continue;
                }
            }
            let saved = partial.clone();
            for (c, w) in partial.iter_mut().zip(ctx.ample) {
                *c += Rational::from_integer(&w[k] * Int::from(v));
            }
            prefix.push(v);
            let found = dfs(ctx, prefix, partial)?;
            prefix.pop();
            *partial = saved;
            if found.is_some() {
                return Ok(found);
            }
        }
        Ok(None)
    }

    let mut ctx = Ctx {
        n,
        order: &order,
        ample: &ample,
        ample_const: &ample_const,
        slack: &slack,
        base: &base,
        m: &m,
        opts,
        visited: 0,
    };
    let mut partial = ctx.ample_const.to_vec();
    match dfs(&mut ctx, &mut Vec::new(), &mut partial)? {
        Some(c) => SeifertSpec::new(cfg.clone(), c.into_iter().map(Int::from).collect()),
        None => Err(SeifertError::NotFound(opts.bound)),
    }
}
