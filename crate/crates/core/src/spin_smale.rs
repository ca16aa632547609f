//! Second Stiefel–Whitney class, spin decision, and the Smale–Barden
//! invariants of the total space together with the G-K condition.

use std::collections::BTreeMap;

use num_integer::Integer;
use num_traits::Zero;
use thiserror::Error;

use crate::exactmath::{to_integer, Int, IntMatrix};
use crate::orbmodel::{Id, OrbifoldConfig};
use crate::seifert::{h1_zero_decision, h2_of_m, SeifertError, SeifertSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpinError {
    #[error("the base has no integral pairing")]
    MissingIntegralPairing,
    #[error("surface {0} avoids the singular points but has non-integral self-intersection")]
    NonIntegralSelfIntersection(Id),
    #[error("no value assigned to unknown {0}")]
    UnresolvedUnknown(String),
    #[error("H1(M) is not zero")]
    H1NotZero,
    #[error(transparent)]
    Seifert(#[from] SeifertError),
}

fn bit(v: &Int) -> u8 {
    if v.is_odd() {
        1
    } else {
        0
    }
}

fn pairing(cfg: &OrbifoldConfig) -> Result<&IntMatrix, SpinError> {
    match &cfg.integral_pairing {
        Some(p) if p.rows() == cfg.b2 && p.cols() == cfg.surfaces.len() => Ok(p),
        _ => Err(SpinError::MissingIntegralPairing),
    }
}

fn column_mod2(p: &IntMatrix, c: usize) -> Vec<u8> {
    (0..p.rows()).map(|r| bit(&p[(r, c)])).collect()
}

fn add_into(acc: &mut [u8], v: &[u8]) {
    for (a, b) in acc.iter_mut().zip(v) {
        *a ^= b;
    }
}

/// A symbolic coefficient of `w₂` on a surface through a singular point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Unknown {
    pub name: String,
    pub surface: Id,
    /// `[D]` as a pairing vector mod 2.
    pub column: Vec<u8>,
}

/// A class in `H²(X − P, ℤ₂)` as a pairing vector mod 2, plus unknown
/// multiples of some surface classes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mod2Class {
    pub values: Vec<u8>,
    pub unknowns: Vec<Unknown>,
}

impl Mod2Class {
    /// Substitutes every unknown.
    pub fn resolve(&self, assignment: &BTreeMap<String, u8>) -> Result<Vec<u8>, SpinError> {
        let mut v = self.values.clone();
        for u in &self.unknowns {
            let a = assignment
                .get(&u.name)
                .ok_or_else(|| SpinError::UnresolvedUnknown(u.name.clone()))?;
            if a % 2 == 1 {
                add_into(&mut v, &u.column);
            }
        }
        Ok(v)
    }

    /// Surface coefficients: determined surfaces as `0/1`, unknown ones by
    /// name.
    pub fn unknown_names(&self) -> Vec<String> {
        self.unknowns.iter().map(|u| u.name.clone()).collect()
    }

    /// Every assignment of the unknowns, in binary counting order.
    pub fn assignments(&self) -> Vec<BTreeMap<String, u8>> {
        let n = self.unknowns.len();
        (0..1u32 << n)
            .map(|mask| {
                self.unknowns
                    .iter()
                    .enumerate()
                    .map(|(k, u)| (u.name.clone(), ((mask >> (n - 1 - k)) & 1) as u8))
                    .collect()
            })
            .collect()
    }
}

/// `w₂(X − P)` by the Wu rule `S² ≡ w₂·S`: a surface avoiding the singular
/// points contributes `S² mod 2` times its class; a surface through one gets
/// an unknown coefficient `a_k`.
pub fn w2_base_class(cfg: &OrbifoldConfig) -> Result<Mod2Class, SpinError> {
    let p = pairing(cfg)?;
    let mut values = vec![0u8; cfg.b2];
    let mut unknowns = Vec::new();
    for (i, s) in cfg.surfaces.iter().enumerate() {
        if cfg.touches_singular_point(&s.id) {
            unknowns.push(Unknown {
                name: format!("a{}", unknowns.len() + 1),
                surface: s.id.clone(),
                column: column_mod2(p, i),
            });
            continue;
        }
        let sq = to_integer(&s.self_intersection)
            .ok_or_else(|| SpinError::NonIntegralSelfIntersection(s.id.clone()))?;
        if sq.is_odd() {
            add_into(&mut values, &column_mod2(p, i));
        }
    }
    Ok(Mod2Class { values, unknowns })
}

/// Generators of `ker π*` in `H²(X − P, ℤ₂)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiStarKernel {
    pub generators: Vec<Vec<u8>>,
    /// Whether some multiplicity is even.
    pub even_case: bool,
}

/// `Σ bᵢ[Dᵢ]` as a pairing vector mod 2.
fn residue_sum_mod2(spec: &SeifertSpec) -> Result<Vec<u8>, SpinError> {
    let p = pairing(&spec.base)?;
    let mut v = vec![0u8; spec.base.b2];
    for (i, s) in spec.base.surfaces.iter().enumerate() {
        if let Some(b) = spec.b_residues.get(&s.id) {
            if b.is_odd() {
                add_into(&mut v, &column_mod2(p, i));
            }
        }
    }
    Ok(v)
}

pub fn pi_star_kernel(spec: &SeifertSpec) -> Result<PiStarKernel, SpinError> {
    if !h1_zero_decision(spec)?.holds {
        return Err(SpinError::H1NotZero);
    }
    let p = pairing(&spec.base)?;
    let even: Vec<Vec<u8>> = spec
        .base
        .surfaces
        .iter()
        .enumerate()
        .filter(|(_, s)| s.is_isotropy() && s.multiplicity.is_even())
        .map(|(i, _)| column_mod2(p, i))
        .collect();
    if !even.is_empty() {
        return Ok(PiStarKernel {
            generators: even,
            even_case: true,
        });
    }
    let mut g: Vec<u8> = spec.c1b.iter().map(bit).collect();
    add_into(&mut g, &residue_sum_mod2(spec)?);
    Ok(PiStarKernel {
        generators: vec![g],
        even_case: false,
    })
}

/// Membership of `v` in the ℤ₂-span of `gens`.
pub fn in_span_mod2(gens: &[Vec<u8>], v: &[u8]) -> bool {
    let n = v.len();
    let mut rows: Vec<Vec<u8>> = gens.iter().filter(|g| g.len() == n).cloned().collect();
    let mut target = v.to_vec();
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c] == 1) else {
            continue;
        };
        rows.swap(r, p);
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[c] == 1 {
                add_into(row, &pivot);
            }
        }
        if target[c] == 1 {
            add_into(&mut target, &pivot);
        }
        r += 1;
    }
    target.iter().all(|b| *b == 0)
}

/// The class `α = Σ bᵢ[Dᵢ] + w₂` for a given assignment of unknowns; the
/// bundle is spin exactly when `c₁(B) + α ∈ ker π*`.
pub fn spin_parity_target(
    cfg: &OrbifoldConfig,
    assignment: &BTreeMap<String, u8>,
) -> Result<Vec<u8>, SpinError> {
    let w2 = w2_base_class(cfg)?.resolve(assignment)?;
    let spec = SeifertSpec::new(cfg.clone(), vec![Int::zero(); cfg.b2])?;
    let mut v = residue_sum_mod2(&spec)?;
    add_into(&mut v, &w2);
    Ok(v)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinVerdict {
    pub spin: bool,
    /// `w₂ + Σ bᵢ[Dᵢ] + c₁(B)` mod 2.
    pub tested: Vec<u8>,
    pub kernel: PiStarKernel,
}

pub fn spin_decision(
    spec: &SeifertSpec,
    assignment: &BTreeMap<String, u8>,
) -> Result<SpinVerdict, SpinError> {
    let kernel = pi_star_kernel(spec)?;
    let mut tested = spin_parity_target(&spec.base, assignment)?;
    let c1b: Vec<u8> = spec.c1b.iter().map(bit).collect();
    add_into(&mut tested, &c1b);
    Ok(SpinVerdict {
        spin: in_span_mod2(&kernel.generators, &tested),
        tested,
        kernel,
    })
}

/// An assignment of the unknowns with its spin verdict.
pub type SweepRow = (BTreeMap<String, u8>, bool);

/// Spin verdict for every assignment of the unknowns.
pub fn spin_sweep(spec: &SeifertSpec) -> Result<Vec<SweepRow>, SpinError> {
    let w2 = w2_base_class(&spec.base)?;
    w2.assignments()
        .into_iter()
        .map(|a| spin_decision(spec, &a).map(|v| (a, v.spin)))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BardenInvariant {
    Zero,
    Infinity,
    /// `i(M) = j ≥ 1`; never produced by this pipeline.
    Finite(u32),
}

impl std::fmt::Display for BardenInvariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BardenInvariant::Zero => write!(f, "0"),
            BardenInvariant::Infinity => write!(f, "inf"),
            BardenInvariant::Finite(j) => write!(f, "{j}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmaleBardenData {
    /// `b₂(M)`.
    pub k: usize,
    /// `c(pⁱ)`, keyed by `(p, i)`: the torsion is `T ⊕ T` with
    /// `T = ⊕ ℤ_{pⁱ}^{c(pⁱ)}`.
    pub torsion_profile: BTreeMap<(Int, u32), usize>,
    pub i_m: BardenInvariant,
    /// `t(p) = #{i : c(pⁱ) > 0}`.
    pub t: BTreeMap<Int, usize>,
    pub t_max: usize,
    pub c_max: usize,
}

impl SmaleBardenData {
    pub fn new(k: usize, profile: BTreeMap<(Int, u32), usize>, i_m: BardenInvariant) -> Self {
        let mut t: BTreeMap<Int, usize> = BTreeMap::new();
        for ((p, _), c) in &profile {
            if *c > 0 {
                *t.entry(p.clone()).or_insert(0) += 1;
            }
        }
        let t_max = t.values().copied().max().unwrap_or(0);
        let c_max = profile.values().copied().max().unwrap_or(0);
        Self {
            k,
            torsion_profile: profile,
            i_m,
            t,
            t_max,
            c_max,
        }
    }
}

pub fn smale_barden_report(spec: &SeifertSpec, spin: bool) -> Result<SmaleBardenData, SpinError> {
    let h2 = h2_of_m(spec).map_err(|e| match e {
        SeifertError::H1NotZero => SpinError::H1NotZero,
        e => SpinError::Seifert(e),
    })?;
    // summands of the same order come in pairs; an odd count is rounded up
    let profile = h2
        .prime_power_profile()
        .into_iter()
        .map(|(k, n)| (k, n.div_ceil(2)))
        .collect();
    let i_m = if spin {
        BardenInvariant::Zero
    } else {
        BardenInvariant::Infinity
    };
    Ok(SmaleBardenData::new(h2.rank, profile, i_m))
}

/// The G-K condition: `t(p) ≤ k + 1` for all `p`, `i(M) ∈ {0, ∞}`, and
/// `t(2) ≤ k` when `i(M) = ∞`.
pub fn gk_check(data: &SmaleBardenData) -> bool {
    let bound_ok = data.t.values().all(|t| *t <= data.k + 1);
    let barden_ok = match data.i_m {
        BardenInvariant::Zero => true,
        BardenInvariant::Infinity => data.t.get(&Int::from(2)).copied().unwrap_or(0) <= data.k,
        BardenInvariant::Finite(_) => false,
    };
    bound_ok && barden_ok
}

/// Assigns `1` to every named unknown.
pub fn one_assignment(names: &[&str]) -> BTreeMap<String, u8> {
    names.iter().map(|n| (n.to_string(), 1u8)).collect()
}

impl PiStarKernel {
    pub fn dimension(&self) -> usize {
        let mut rank = 0;
        let mut rows = self.generators.clone();
        let n = rows.first().map_or(0, Vec::len);
        for c in 0..n {
            let Some(p) = (rank..rows.len()).find(|&i| rows[i][c] == 1) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != rank && row[c] == 1 {
                    add_into(row, &pivot);
                }
            }
            rank += 1;
        }
        rank
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{int, rat, RatMatrix};
    use crate::orbmodel::{SingularPointData, SurfaceData};

    fn config(sq: &[i64]) -> OrbifoldConfig {
        let n = sq.len();
        let mut cfg = OrbifoldConfig::empty();
        cfg.b2 = n;
        cfg.euler = 2 + n as i64;
        cfg.pairing = RatMatrix::diagonal(&sq.iter().map(|v| rat(*v, 1)).collect::<Vec<_>>());
        for (i, v) in sq.iter().enumerate() {
            let mut q = vec![rat(0, 1); n];
            q[i] = rat(1, 1);
            cfg.surfaces
                .push(SurfaceData::new(format!("D{i}"), 0, rat(*v, 1)).with_qclass(q));
        }
        cfg.integral_pairing = Some(IntMatrix::diagonal(
            &sq.iter().map(|v| int(*v)).collect::<Vec<_>>(),
        ));
        cfg
    }

    #[test]
    fn w2_even_and_odd() {
        assert_eq!(
            w2_base_class(&config(&[2, -2, 4])).unwrap().values,
            vec![0, 0, 0]
        );
        assert_eq!(w2_base_class(&config(&[-1])).unwrap().values, vec![1]);
        let mut cfg = config(&[-1, 1]);
        cfg.points
            .push(SingularPointData::double_point("x", vec!["D0".into()]));
        let w = w2_base_class(&cfg).unwrap();
        assert_eq!(w.values, vec![0, 1]);
        assert_eq!(w.unknown_names(), vec!["a1".to_string()]);
        assert_eq!(w.assignments().len(), 2);
        assert!(matches!(
            w.resolve(&BTreeMap::new()),
            Err(SpinError::UnresolvedUnknown(_))
        ));
    }

    #[test]
    fn kernel_without_isotropy() {
        let cfg = config(&[1, 1, 1]);
        let spec = SeifertSpec::new(cfg, vec![int(1), int(0), int(0)]).unwrap();
        let k = pi_star_kernel(&spec).unwrap();
        assert_eq!(k.generators, vec![vec![1, 0, 0]]);
        assert_eq!(k.dimension(), 1);
    }

    #[test]
    fn span_membership() {
        let gens = vec![vec![1, 1, 0], vec![0, 1, 1]];
        assert!(in_span_mod2(&gens, &[1, 0, 1]));
        assert!(in_span_mod2(&gens, &[0, 0, 0]));
        assert!(!in_span_mod2(&gens, &[1, 0, 0]));
    }

    #[test]
    fn gk_examples() {
        let mut prof = BTreeMap::new();
        prof.insert((int(2), 1), 1);
        let d = SmaleBardenData::new(0, prof, BardenInvariant::Infinity);
        assert!(!gk_check(&d));
        let free = SmaleBardenData::new(3, BTreeMap::new(), BardenInvariant::Zero);
        assert!(gk_check(&free));
        assert_eq!((free.t_max, free.c_max), (0, 0));
    }
}
