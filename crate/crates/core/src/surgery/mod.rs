//! Symbolic surgery on orbifold configurations: blow-ups, blow-downs of
//! (−2)-spheres, torus-pair resolution and the orbifold Gompf fiber sum, with
//! a replayable log of every step.

mod blocks;
mod gompf;
mod local;

pub use blocks::{
    block_w_start, build_block_w, build_block_w_prime, build_block_w_surgery, build_block_y,
    build_z, build_z_prime, build_z_with_log, default_z_integral_pairing, z_gluing_plan,
};
pub use gompf::{gompf_fiber_sum, GluingPlan, Join};
pub use local::{
    blow_down_minus2, blow_up, forget, integral_pairing_from_classes, rebase, rename,
    resolve_torus_pair, set_integral_pairing, set_isotropy,
};

use thiserror::Error;

use crate::exactmath::{fmt_rat, Int, IntMatrix, Rational};
use crate::orbmodel::{Id, OrbifoldConfig};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurgeryError {
    #[error("unknown surface {0}")]
    UnknownSurface(Id),
    #[error("id {0} is already in use")]
    NameClash(String),
    #[error("{0} is a singular point, not a smooth point")]
    NotSmoothPoint(String),
    #[error("surface {surface} has isotropy and cannot pass through a regular point")]
    IsotropyAtPoint { surface: Id },
    #[error("surfaces {a} and {b} do not meet at {label}")]
    NotTransverseAt { a: Id, b: Id, label: String },
    #[error("surface {surface} passes through {label} but is not listed")]
    UnlistedSurfaceAtPoint { surface: Id, label: String },
    #[error("{surface} is not a blow-down candidate: {reason}")]
    NotMinusTwoSphere { surface: Id, reason: String },
    #[error("{surface} passes through a singular point")]
    MeetsSingularPoint { surface: Id },
    #[error("surface {0} has no homology class")]
    MissingQClass(Id),
    #[error("surface {surface}: geometric and homological self-intersection disagree")]
    HomologyMismatch { surface: Id },
    #[error("the new point {point} would lie on more than two surfaces")]
    TooManyIncident { point: Id },
    #[error("{0} is not a multiplicity-1 torus")]
    NotTorus(Id),
    #[error("{a} and {b} must meet in exactly one smooth point")]
    NotSingleIntersection { a: Id, b: Id },
    #[error("surface {surface}: self-intersection {value} is not a non-negative integer")]
    UnsupportedSelfIntersection { surface: Id, value: String },
    #[error("fiber genera differ: {a} vs {b}")]
    GenusMismatch { a: u32, b: u32 },
    #[error("fiber self-intersections sum to {sum}, not 0")]
    NormalBundleObstruction { sum: String },
    #[error("singular point {point} on a fiber is not matched")]
    UnmatchedSingularPoint { point: Id },
    #[error("marked point {location} on a fiber is not matched")]
    UnmatchedMarkedPoint { location: String },
    #[error("matched points {a} and {b} are of different kinds")]
    MatchTypeMismatch { a: String, b: String },
    #[error("matched singular points {a} and {b} have different orders")]
    SingularOrderMismatch { a: Id, b: Id },
    #[error("join {output}: {reason}")]
    BadJoin { output: Id, reason: String },
    #[error("join {output}: Euler characteristic {euler} gives no valid genus")]
    NonIntegralGenus { output: Id, euler: i64 },
    #[error("euler {euler} inconsistent with b1 = {b1}, b2 = {b2}")]
    BettiInconsistent { euler: i64, b1: usize, b2: usize },
    #[error("declared basis does not give a nondegenerate pairing")]
    DegenerateBasis,
    #[error("surface {surface}: invalid isotropy ({reason})")]
    InvalidIsotropy { surface: Id, reason: String },
    #[error("{0} is not prime")]
    NotPrime(Int),
    #[error("integral class {row} pairs non-integrally with {surface}")]
    NonIntegralPairing { row: usize, surface: Id },
    #[error("integral pairing must be {rows}x{cols}")]
    PairingShape { rows: usize, cols: usize },
}

/// One step of a surgery script.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SurgeryOp {
    BlowUp {
        at: String,
        through: Vec<Id>,
        exceptional: Id,
    },
    BlowDown {
        sphere: Id,
        point: Id,
    },
    /// Stop tracking a surface; homology is unchanged.
    Forget {
        surface: Id,
    },
    Rename {
        from: Id,
        to: Id,
    },
    ResolveTorusPair {
        t1: Id,
        t2: Id,
        sigma: Id,
        exceptional: Id,
    },
    /// Fiber sum with the current config on side A.
    FiberSum {
        other: Box<OrbifoldConfig>,
        plan: GluingPlan,
    },
    SetIsotropy {
        surface: Id,
        m: Int,
        j: Int,
    },
    Rebase {
        basis: Vec<Id>,
    },
    SetIntegralPairing {
        matrix: IntMatrix,
    },
}

impl SurgeryOp {
    pub fn name(&self) -> &'static str {
        match self {
            SurgeryOp::BlowUp { .. } => "blow_up",
            SurgeryOp::BlowDown { .. } => "blow_down",
            SurgeryOp::Forget { .. } => "forget",
            SurgeryOp::Rename { .. } => "rename",
            SurgeryOp::ResolveTorusPair { .. } => "resolve_torus_pair",
            SurgeryOp::FiberSum { .. } => "fiber_sum",
            SurgeryOp::SetIsotropy { .. } => "isotropy",
            SurgeryOp::Rebase { .. } => "rebase",
            SurgeryOp::SetIntegralPairing { .. } => "integral_pairing",
        }
    }

    pub fn apply(&self, cfg: &OrbifoldConfig) -> Result<OrbifoldConfig, SurgeryError> {
        match self {
            SurgeryOp::BlowUp {
                at,
                through,
                exceptional,
            } => blow_up(cfg, at, through, exceptional),
            SurgeryOp::BlowDown { sphere, point } => blow_down_minus2(cfg, sphere, point),
            SurgeryOp::Forget { surface } => forget(cfg, surface),
            SurgeryOp::Rename { from, to } => rename(cfg, from, to),
            SurgeryOp::ResolveTorusPair {
                t1,
                t2,
                sigma,
                exceptional,
            } => resolve_torus_pair(cfg, t1, t2, sigma, exceptional),
            SurgeryOp::FiberSum { other, plan } => gompf_fiber_sum(cfg, other, plan),
            SurgeryOp::SetIsotropy { surface, m, j } => set_isotropy(cfg, surface, m, j),
            SurgeryOp::Rebase { basis } => rebase(cfg, basis),
            SurgeryOp::SetIntegralPairing { matrix } => set_integral_pairing(cfg, matrix.clone()),
        }
    }

    /// The `(Δχ, Δb₂)` this operation must produce, when it is fixed in
    /// advance.
    pub fn expected_delta(&self, before: &OrbifoldConfig) -> Option<(i64, i64)> {
        match self {
            SurgeryOp::BlowUp { .. } | SurgeryOp::ResolveTorusPair { .. } => Some((1, 1)),
            SurgeryOp::BlowDown { .. } => Some((-1, -1)),
            SurgeryOp::FiberSum { other, plan } => {
                let fiber = other.surface(&plan.fiber_b)?;
                Some((
                    other.euler - fiber.euler(),
                    plan.b2 as i64 - before.b2 as i64,
                ))
            }
            _ => Some((0, 0)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Stats {
    pub euler: i64,
    pub b1: usize,
    pub b2: usize,
}

impl Stats {
    pub fn of(cfg: &OrbifoldConfig) -> Self {
        Self {
            euler: cfg.euler,
            b1: cfg.b1,
            b2: cfg.b2,
        }
    }
}

/// Change of one surface's `(genus, self-intersection)`; `None` means the
/// surface is absent on that side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceDelta {
    pub id: Id,
    pub before: Option<(u32, Rational)>,
    pub after: Option<(u32, Rational)>,
}

impl SurfaceDelta {
    pub fn describe(&self) -> String {
        let side = |s: &Option<(u32, Rational)>| match s {
            Some((g, sq)) => format!("g={g} sq={}", fmt_rat(sq)),
            None => "-".to_string(),
        };
        format!(
            "{}: {} -> {}",
            self.id,
            side(&self.before),
            side(&self.after)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogEntry {
    pub op: SurgeryOp,
    pub before: Stats,
    pub after: Stats,
    pub deltas: Vec<SurfaceDelta>,
    /// Facts taken on trust from the operation's input rather than derived.
    pub asserted: Option<String>,
}

fn surface_deltas(before: &OrbifoldConfig, after: &OrbifoldConfig) -> Vec<SurfaceDelta> {
    let snap = |c: &OrbifoldConfig, id: &str| {
        c.surface(id)
            .map(|s| (s.genus, s.self_intersection.clone()))
    };
    let mut ids: Vec<&str> = before.surfaces.iter().map(|s| s.id.as_str()).collect();
    for s in &after.surfaces {
        if before.surface(&s.id).is_none() {
            ids.push(&s.id);
        }
    }
    ids.into_iter()
        .filter_map(|id| {
            let (b, a) = (snap(before, id), snap(after, id));
            (b != a).then(|| SurfaceDelta {
                id: id.to_string(),
                before: b,
                after: a,
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurgeryLog {
    pub initial: OrbifoldConfig,
    pub entries: Vec<LogEntry>,
}

impl SurgeryLog {
    pub fn new(initial: OrbifoldConfig) -> Self {
        Self {
            initial,
            entries: Vec::new(),
        }
    }

    /// Re-applies every logged operation to the initial config.
    pub fn replay(&self) -> Result<OrbifoldConfig, SurgeryError> {
        self.entries
            .iter()
            .try_fold(self.initial.clone(), |cfg, e| e.op.apply(&cfg))
    }

    /// Self-intersection of `id` initially and after every step that can
    /// change it geometrically (blow-ups, blow-downs, resolutions, sums).
    pub fn self_intersection_trajectory(&self, id: &str) -> Vec<Rational> {
        let mut out = Vec::new();
        let mut cur = self
            .initial
            .surface(id)
            .map(|s| s.self_intersection.clone());
        if let Some(v) = &cur {
            out.push(v.clone());
        }
        for e in &self.entries {
            if let Some(d) = e.deltas.iter().find(|d| d.id == id) {
                cur = d.after.as_ref().map(|(_, sq)| sq.clone());
            }
            let geometric = matches!(
                e.op,
                SurgeryOp::BlowUp { .. }
                    | SurgeryOp::BlowDown { .. }
                    | SurgeryOp::ResolveTorusPair { .. }
                    | SurgeryOp::FiberSum { .. }
            );
            if geometric {
                if let Some(v) = &cur {
                    out.push(v.clone());
                }
            }
        }
        out
    }
}

/// A config together with the log of how it was reached.
#[derive(Clone, Debug)]
pub struct Surgery {
    current: OrbifoldConfig,
    log: SurgeryLog,
}

impl Surgery {
    pub fn new(initial: OrbifoldConfig) -> Self {
        Self {
            current: initial.clone(),
            log: SurgeryLog::new(initial),
        }
    }

    pub fn config(&self) -> &OrbifoldConfig {
        &self.current
    }

    pub fn log(&self) -> &SurgeryLog {
        &self.log
    }

    pub fn finish(self) -> (OrbifoldConfig, SurgeryLog) {
        (self.current, self.log)
    }

    pub fn apply(&mut self, op: SurgeryOp) -> Result<&mut Self, SurgeryError> {
        let next = op.apply(&self.current)?;
        let asserted = match &op {
            SurgeryOp::FiberSum { plan, .. } => Some(format!(
                "b1 = {}, b2 = {} and basis [{}] asserted by the gluing plan",
                plan.b1,
                plan.b2,
                plan.basis.join(", ")
            )),
            _ => None,
        };
        self.log.entries.push(LogEntry {
            before: Stats::of(&self.current),
            after: Stats::of(&next),
            deltas: surface_deltas(&self.current, &next),
            asserted,
            op,
        });
        self.current = next;
        Ok(self)
    }

    pub fn blow_up(
        &mut self,
        at: &str,
        through: &[&str],
        exc: &str,
    ) -> Result<&mut Self, SurgeryError> {
        self.apply(SurgeryOp::BlowUp {
            at: at.into(),
            through: through.iter().map(|s| s.to_string()).collect(),
            exceptional: exc.into(),
        })
    }

    pub fn blow_down(&mut self, sphere: &str, point: &str) -> Result<&mut Self, SurgeryError> {
        self.apply(SurgeryOp::BlowDown {
            sphere: sphere.into(),
            point: point.into(),
        })
    }

    pub fn forget(&mut self, surface: &str) -> Result<&mut Self, SurgeryError> {
        self.apply(SurgeryOp::Forget {
            surface: surface.into(),
        })
    }

    pub fn rename(&mut self, from: &str, to: &str) -> Result<&mut Self, SurgeryError> {
        self.apply(SurgeryOp::Rename {
            from: from.into(),
            to: to.into(),
        })
    }

    pub fn resolve_torus_pair(
        &mut self,
        t1: &str,
        t2: &str,
        sigma: &str,
        exc: &str,
    ) -> Result<&mut Self, SurgeryError> {
        self.apply(SurgeryOp::ResolveTorusPair {
            t1: t1.into(),
            t2: t2.into(),
            sigma: sigma.into(),
            exceptional: exc.into(),
        })
    }
}
