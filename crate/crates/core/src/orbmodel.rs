//! Combinatorial model of a cyclic 4-orbifold: isotropy surfaces, isolated
//! singular points, intersection events and the rational intersection pairing,
//! together with the local-invariant calculus at singular points.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::exactmath::{
    gcd, int, mod_inverse, modulo, radical_quotient, ArithError, Int, IntMatrix, RatMatrix,
    Rational,
};

pub type Id = String;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceData {
    pub id: Id,
    pub genus: u32,
    pub multiplicity: Int,
    /// Local invariant `j`, stored in `[0, m)`; zero when `m = 1`.
    pub j: Int,
    pub self_intersection: Rational,
    /// Coordinates in the config's declared basis of `H₂(X, ℚ)`.
    pub qclass: Option<Vec<Rational>>,
}

impl SurfaceData {
    pub fn new(id: impl Into<Id>, genus: u32, self_intersection: Rational) -> Self {
        Self {
            id: id.into(),
            genus,
            multiplicity: Int::one(),
            j: Int::zero(),
            self_intersection,
            qclass: None,
        }
    }

    pub fn with_qclass(mut self, q: Vec<Rational>) -> Self {
        self.qclass = Some(q);
        self
    }

    /// Sets the multiplicity and reduces `j` modulo it.
    pub fn with_isotropy(mut self, m: Int, j: Int) -> Self {
        self.j = if m.is_one() {
            Int::zero()
        } else {
            modulo(&j, &m)
        };
        self.multiplicity = m;
        self
    }

    pub fn euler(&self) -> i64 {
        2 - 2 * i64::from(self.genus)
    }

    pub fn is_isotropy(&self) -> bool {
        self.multiplicity > Int::one()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SingularPointData {
    pub id: Id,
    pub order: Int,
    pub exponents: (Int, Int),
    /// Incident surfaces; the first lies along the `z₁` axis, the second
    /// along `z₂`.
    pub incident: Vec<Id>,
}

impl SingularPointData {
    /// Ordinary double point `ℂ²/±1`.
    pub fn double_point(id: impl Into<Id>, incident: Vec<Id>) -> Self {
        Self {
            id: id.into(),
            order: int(2),
            exponents: (int(1), int(1)),
            incident,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Location {
    Smooth(String),
    Singular(Id),
}

impl Location {
    pub fn label(&self) -> &str {
        match self {
            Location::Smooth(l) | Location::Singular(l) => l,
        }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Smooth(l) => write!(f, "smooth:{l}"),
            Location::Singular(p) => write!(f, "point:{p}"),
        }
    }
}

/// A transverse positive intersection of two distinct surfaces.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct IntersectionEvent {
    pub a: Id,
    pub b: Id,
    pub location: Location,
    pub sign: i8,
}

impl IntersectionEvent {
    /// Builds a positive event with the surface pair stored in sorted order.
    pub fn new(a: impl Into<Id>, b: impl Into<Id>, location: Location) -> Self {
        let (a, b) = (a.into(), b.into());
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        Self {
            a,
            b,
            location,
            sign: 1,
        }
    }

    pub fn involves(&self, id: &str) -> bool {
        self.a == id || self.b == id
    }

    pub fn other(&self, id: &str) -> Option<&str> {
        if self.a == id {
            Some(&self.b)
        } else if self.b == id {
            Some(&self.a)
        } else {
            None
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbifoldConfig {
    pub surfaces: Vec<SurfaceData>,
    pub points: Vec<SingularPointData>,
    pub events: Vec<IntersectionEvent>,
    pub b1: usize,
    pub b2: usize,
    pub euler: i64,
    /// Rational intersection pairing over the declared `H₂(X, ℚ)` basis.
    pub pairing: RatMatrix,
    /// `P[r][i] = ⟨β_r, D_i⟩` for a declared integral basis `{β_r}` of
    /// `H₂(X, ℤ)`; columns follow `surfaces`.
    pub integral_pairing: Option<IntMatrix>,
}

impl OrbifoldConfig {
    /// The empty configuration (a homology 4-sphere with nothing marked).
    pub fn empty() -> Self {
        Self {
            surfaces: Vec::new(),
            points: Vec::new(),
            events: Vec::new(),
            b1: 0,
            b2: 0,
            euler: 2,
            pairing: RatMatrix::zeros(0, 0),
            integral_pairing: None,
        }
    }

    pub fn surface(&self, id: &str) -> Option<&SurfaceData> {
        self.surfaces.iter().find(|s| s.id == id)
    }

    pub fn surface_mut(&mut self, id: &str) -> Option<&mut SurfaceData> {
        self.surfaces.iter_mut().find(|s| s.id == id)
    }

    pub fn surface_index(&self, id: &str) -> Option<usize> {
        self.surfaces.iter().position(|s| s.id == id)
    }

    pub fn point(&self, id: &str) -> Option<&SingularPointData> {
        self.points.iter().find(|p| p.id == id)
    }

    pub fn events_of<'a>(
        &'a self,
        id: &'a str,
    ) -> impl Iterator<Item = &'a IntersectionEvent> + 'a {
        self.events.iter().filter(move |e| e.involves(id))
    }

    /// Whether the surface passes through a singular point.
    pub fn touches_singular_point(&self, id: &str) -> bool {
        self.points
            .iter()
            .any(|p| p.incident.iter().any(|s| s == id))
    }

    /// Local contribution of an event to the rational intersection number:
    /// `1` at a smooth point, `1/d` at a singular point of order `d`.
    pub fn event_weight(&self, e: &IntersectionEvent) -> Rational {
        let base = match &e.location {
            Location::Smooth(_) => Rational::one(),
            Location::Singular(p) => match self.point(p) {
                Some(pt) => Rational::new(Int::one(), pt.order.clone()),
                None => Rational::one(),
            },
        };
        base * Rational::from_integer(Int::from(e.sign))
    }

    /// Geometric intersection number of two distinct surfaces, summed over
    /// their recorded events.
    pub fn local_intersection(&self, a: &str, b: &str) -> Rational {
        self.events
            .iter()
            .filter(|e| (e.a == a && e.b == b) || (e.a == b && e.b == a))
            .fold(Rational::zero(), |acc, e| acc + self.event_weight(e))
    }

    /// Homological intersection `qₐᵀ·Q·q_b`, when both classes are known.
    pub fn homological_intersection(&self, a: &str, b: &str) -> Option<Rational> {
        let qa = self.surface(a)?.qclass.as_ref()?;
        let qb = self.surface(b)?.qclass.as_ref()?;
        if qa.len() != self.pairing.rows() || qb.len() != self.pairing.rows() {
            return None;
        }
        Some(self.pairing.bilinear(qa, qb))
    }

    pub fn isotropy_surfaces(&self) -> impl Iterator<Item = &SurfaceData> {
        self.surfaces.iter().filter(|s| s.is_isotropy())
    }

    /// `lcm` of all surface multiplicities.
    pub fn lcm_multiplicity(&self) -> Int {
        self.surfaces
            .iter()
            .fold(Int::one(), |acc, s| acc.lcm(&s.multiplicity))
    }
}

/// A violated configuration invariant, with its locus.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Violation {
    DuplicateId(Id),
    MultiplicityNotPositive(Id),
    TrivialMultiplicityNonzeroJ(Id),
    ResidueNotCanonical(Id),
    LocalInvariantNotCoprime {
        surface: Id,
    },
    PointOrderTooSmall(Id),
    PointExponentNotCoprime(Id),
    TooManyIncidentSurfaces(Id),
    IncidentUnknownSurface {
        point: Id,
        surface: Id,
    },
    IncidentMultiplicitiesNotCoprime {
        point: Id,
    },
    EventUnknownSurface {
        surface: Id,
    },
    EventUnknownPoint {
        point: Id,
    },
    SelfTangency {
        surface: Id,
    },
    NonPositiveIntersection {
        a: Id,
        b: Id,
    },
    EventNotIncident {
        a: Id,
        b: Id,
        point: Id,
    },
    CoprimalityViolation {
        a: Id,
        b: Id,
    },
    PairingDimension {
        b2: usize,
        rows: usize,
        cols: usize,
    },
    PairingNotSymmetric,
    QClassLength {
        surface: Id,
    },
    SelfIntersectionMismatch {
        surface: Id,
        recorded: String,
        homological: String,
    },
    IntersectionMismatch {
        a: Id,
        b: Id,
        events: String,
        homological: String,
    },
    IntegralPairingShape {
        rows: usize,
        cols: usize,
    },
    EulerMismatch {
        euler: i64,
        b1: usize,
        b2: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            DuplicateId(id) => write!(f, "duplicate id {id}"),
            MultiplicityNotPositive(id) => write!(f, "surface {id}: multiplicity must be >= 1"),
            TrivialMultiplicityNonzeroJ(id) => {
                write!(f, "surface {id}: multiplicity 1 requires j = 0")
            }
            ResidueNotCanonical(id) => write!(f, "surface {id}: j is not reduced into [0, m)"),
            LocalInvariantNotCoprime { surface } => {
                write!(f, "surface {surface}: gcd(j, m) != 1")
            }
            PointOrderTooSmall(id) => write!(f, "point {id}: order must be >= 2"),
            PointExponentNotCoprime(id) => {
                write!(f, "point {id}: exponents must be units modulo the order")
            }
            TooManyIncidentSurfaces(id) => write!(f, "point {id}: more than two incident surfaces"),
            IncidentUnknownSurface { point, surface } => {
                write!(f, "point {point}: unknown incident surface {surface}")
            }
            IncidentMultiplicitiesNotCoprime { point } => {
                write!(f, "point {point}: incident multiplicities are not coprime")
            }
            EventUnknownSurface { surface } => {
                write!(f, "event references unknown surface {surface}")
            }
            EventUnknownPoint { point } => write!(f, "event references unknown point {point}"),
            SelfTangency { surface } => write!(f, "event of surface {surface} with itself"),
            NonPositiveIntersection { a, b } => {
                write!(f, "intersection {a}.{b} is not positive")
            }
            EventNotIncident { a, b, point } => {
                write!(
                    f,
                    "intersection {a}.{b} at {point}: surfaces not incident to the point"
                )
            }
            CoprimalityViolation { a, b } => {
                write!(
                    f,
                    "intersecting surfaces {a}, {b} have non-coprime multiplicities"
                )
            }
            PairingDimension { b2, rows, cols } => {
                write!(f, "pairing is {rows}x{cols} but b2 = {b2}")
            }
            PairingNotSymmetric => write!(f, "pairing is not symmetric"),
            QClassLength { surface } => write!(f, "surface {surface}: qclass has wrong length"),
            SelfIntersectionMismatch {
                surface,
                recorded,
                homological,
            } => write!(
                f,
                "surface {surface}: self-intersection {recorded} but class squares to {homological}"
            ),
            IntersectionMismatch {
                a,
                b,
                events,
                homological,
            } => write!(
                f,
                "surfaces {a}, {b}: events give {events} but classes pair to {homological}"
            ),
            IntegralPairingShape { rows, cols } => {
                write!(
                    f,
                    "integral pairing is {rows}x{cols}, expected b2 x #surfaces"
                )
            }
            EulerMismatch { euler, b1, b2 } => {
                write!(f, "euler characteristic {euler} != 2 - 2*{b1} + {b2}")
            }
        }
    }
}

/// Checks every configuration invariant. The result is sorted, so it does not
/// depend on the order of the surface, point or event lists.
pub fn validate_config(cfg: &OrbifoldConfig) -> Vec<Violation> {
    use crate::exactmath::fmt_rat;
    let mut out = BTreeSet::new();

    let mut seen = BTreeSet::new();
    for s in &cfg.surfaces {
        if !seen.insert(("s", s.id.as_str())) {
            out.insert(Violation::DuplicateId(s.id.clone()));
        }
        if s.multiplicity < Int::one() {
            out.insert(Violation::MultiplicityNotPositive(s.id.clone()));
            continue;
        }
        if s.multiplicity.is_one() {
            if !s.j.is_zero() {
                out.insert(Violation::TrivialMultiplicityNonzeroJ(s.id.clone()));
            }
        } else {
            if s.j < Int::zero() || s.j >= s.multiplicity {
                out.insert(Violation::ResidueNotCanonical(s.id.clone()));
            }
            if !gcd(&s.j, &s.multiplicity).is_one() {
                out.insert(Violation::LocalInvariantNotCoprime {
                    surface: s.id.clone(),
                });
            }
        }
    }
    for p in &cfg.points {
        if !seen.insert(("p", p.id.as_str())) {
            out.insert(Violation::DuplicateId(p.id.clone()));
        }
        if p.order < int(2) {
            out.insert(Violation::PointOrderTooSmall(p.id.clone()));
        } else if !gcd(&p.exponents.0, &p.order).is_one() || !gcd(&p.exponents.1, &p.order).is_one()
        {
            out.insert(Violation::PointExponentNotCoprime(p.id.clone()));
        }
        if p.incident.len() > 2 {
            out.insert(Violation::TooManyIncidentSurfaces(p.id.clone()));
        }
        let mut mults = Vec::new();
        for sid in &p.incident {
            match cfg.surface(sid) {
                Some(s) => mults.push(s.multiplicity.clone()),
                None => {
                    out.insert(Violation::IncidentUnknownSurface {
                        point: p.id.clone(),
                        surface: sid.clone(),
                    });
                }
            }
        }
        if mults.len() == 2 && !gcd(&mults[0], &mults[1]).is_one() {
            out.insert(Violation::IncidentMultiplicitiesNotCoprime {
                point: p.id.clone(),
            });
        }
    }
    for e in &cfg.events {
        let sa = cfg.surface(&e.a);
        let sb = cfg.surface(&e.b);
        for (id, s) in [(&e.a, sa), (&e.b, sb)] {
            if s.is_none() {
                out.insert(Violation::EventUnknownSurface {
                    surface: id.clone(),
                });
            }
        }
        if e.a == e.b {
            out.insert(Violation::SelfTangency {
                surface: e.a.clone(),
            });
        }
        if e.sign != 1 {
            out.insert(Violation::NonPositiveIntersection {
                a: e.a.clone(),
                b: e.b.clone(),
            });
        }
        if let Location::Singular(pid) = &e.location {
            match cfg.point(pid) {
                None => {
                    out.insert(Violation::EventUnknownPoint { point: pid.clone() });
                }
                Some(p) => {
                    if !p.incident.contains(&e.a) || !p.incident.contains(&e.b) {
                        out.insert(Violation::EventNotIncident {
                            a: e.a.clone(),
                            b: e.b.clone(),
                            point: pid.clone(),
                        });
                    }
                }
            }
        }
        if let (Some(sa), Some(sb)) = (sa, sb) {
            if !gcd(&sa.multiplicity, &sb.multiplicity).is_one() {
                out.insert(Violation::CoprimalityViolation {
                    a: e.a.clone(),
                    b: e.b.clone(),
                });
            }
        }
    }

    let n = cfg.b2;
    if cfg.pairing.rows() != n || cfg.pairing.cols() != n {
        out.insert(Violation::PairingDimension {
            b2: n,
            rows: cfg.pairing.rows(),
            cols: cfg.pairing.cols(),
        });
    } else {
        if !cfg.pairing.is_symmetric() {
            out.insert(Violation::PairingNotSymmetric);
        }
        let mut with_class = Vec::new();
        for s in &cfg.surfaces {
            let Some(q) = &s.qclass else { continue };
            if q.len() != n {
                out.insert(Violation::QClassLength {
                    surface: s.id.clone(),
                });
                continue;
            }
            let sq = cfg.pairing.bilinear(q, q);
            if sq != s.self_intersection {
                out.insert(Violation::SelfIntersectionMismatch {
                    surface: s.id.clone(),
                    recorded: fmt_rat(&s.self_intersection),
                    homological: fmt_rat(&sq),
                });
            }
            with_class.push(s);
        }
        for (i, a) in with_class.iter().enumerate() {
            for b in &with_class[i + 1..] {
                if a.id == b.id {
                    continue;
                }
                let hom = cfg.pairing.bilinear(
                    a.qclass.as_ref().expect("filtered"),
                    b.qclass.as_ref().expect("filtered"),
                );
                let geo = cfg.local_intersection(&a.id, &b.id);
                if hom != geo {
                    let (x, y) = if a.id <= b.id { (a, b) } else { (b, a) };
                    out.insert(Violation::IntersectionMismatch {
                        a: x.id.clone(),
                        b: y.id.clone(),
                        events: fmt_rat(&geo),
                        homological: fmt_rat(&hom),
                    });
                }
            }
        }
    }
    if let Some(ip) = &cfg.integral_pairing {
        if ip.rows() != n || ip.cols() != cfg.surfaces.len() {
            out.insert(Violation::IntegralPairingShape {
                rows: ip.rows(),
                cols: ip.cols(),
            });
        }
    }
    if cfg.euler != 2 - 2 * cfg.b1 as i64 + cfg.b2 as i64 {
        out.insert(Violation::EulerMismatch {
            euler: cfg.euler,
            b1: cfg.b1,
            b2: cfg.b2,
        });
    }
    out.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocalInvariantError {
    #[error("point {0} lies on two isotropy surfaces; no assignment rule covers this case")]
    UnsupportedGeometry(Id),
    #[error("point {point} does not list surface {surface} as incident")]
    NotIncident { point: Id, surface: Id },
    #[error("unknown surface {0}")]
    UnknownSurface(Id),
    #[error("invalid local invariant at {point}: {reason}")]
    Invalid { point: Id, reason: String },
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Local invariants `(m, j₁, j₂)` at a singular point, with the derived
/// divisibility data `m = m₁·m₂·d`, `j₁ = m₁e₁`, `j₂ = m₂e₂`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointLocalInvariant {
    pub point_id: Id,
    pub m: Int,
    pub j1: Int,
    pub j2: Int,
    pub m1: Int,
    pub m2: Int,
    pub d: Int,
    pub e1: Int,
    pub e2: Int,
}

impl PointLocalInvariant {
    /// Reduces `j₁, j₂` modulo `m`, derives `(m₁, m₂, d, e₁, e₂)` and checks
    /// the divisibility structure.
    pub fn from_triple(
        point_id: impl Into<Id>,
        m: Int,
        j1: Int,
        j2: Int,
    ) -> Result<Self, LocalInvariantError> {
        let point_id = point_id.into();
        let invalid = |reason: &str| LocalInvariantError::Invalid {
            point: point_id.clone(),
            reason: reason.to_string(),
        };
        if m < Int::one() {
            return Err(invalid("m must be positive"));
        }
        let j1 = modulo(&j1, &m);
        let j2 = modulo(&j2, &m);
        let m1 = gcd(&j1, &m);
        let m2 = gcd(&j2, &m);
        if !gcd(&m1, &m2).is_one() {
            return Err(invalid("gcd(m1, m2) != 1"));
        }
        let (d, rem) = m.div_rem(&(&m1 * &m2));
        if !rem.is_zero() {
            return Err(invalid("m1*m2 does not divide m"));
        }
        let e1 = &j1 / &m1;
        let e2 = &j2 / &m2;
        if !gcd(&e1, &(&m2 * &d)).is_one() || !gcd(&e2, &(&m1 * &d)).is_one() {
            return Err(invalid("e1 or e2 not coprime to the complementary order"));
        }
        Ok(Self {
            point_id,
            m,
            j1,
            j2,
            m1,
            m2,
            d,
            e1,
            e2,
        })
    }

    /// Rechecks the divisibility invariants of a stored value.
    pub fn is_consistent(&self) -> bool {
        Self::from_triple(
            self.point_id.clone(),
            self.m.clone(),
            self.j1.clone(),
            self.j2.clone(),
        )
        .map(|p| p == *self)
        .unwrap_or(false)
    }
}

/// Assigns `(m, j₁, j₂)` at a point of order `d`, exponents `(e₁, e₂)`,
/// lying on one isotropy surface with invariants `(n, j)` along the `z₁`
/// axis.
pub fn local_invariant_on_surface(
    point_id: &str,
    d: &Int,
    exponents: (&Int, &Int),
    n: &Int,
    j: &Int,
) -> Result<PointLocalInvariant, LocalInvariantError> {
    let e = modulo(&(exponents.0 * mod_inverse(exponents.1, d)?), d);
    let x = radical_quotient(d, j)?;
    let j2 = j + n * x;
    let e2 = j2.clone();
    let e1 = &e * &e2;
    let j1 = n * &e1;
    PointLocalInvariant::from_triple(point_id, n * d, j1, j2)
}

/// Local invariants at every singular point, compatible with the invariants
/// of the (pairwise disjoint) isotropy surfaces through them.
pub fn assign_local_invariants(
    cfg: &OrbifoldConfig,
) -> Result<BTreeMap<Id, PointLocalInvariant>, LocalInvariantError> {
    let mut out = BTreeMap::new();
    for p in &cfg.points {
        let mut iso = Vec::new();
        for (slot, sid) in p.incident.iter().enumerate() {
            let s = cfg
                .surface(sid)
                .ok_or_else(|| LocalInvariantError::UnknownSurface(sid.clone()))?;
            if s.is_isotropy() {
                iso.push((slot, s));
            }
        }
        let pli = match iso.as_slice() {
            [] => PointLocalInvariant::from_triple(
                p.id.clone(),
                p.order.clone(),
                p.exponents.0.clone(),
                p.exponents.1.clone(),
            )?,
            [(0, s)] => local_invariant_on_surface(
                &p.id,
                &p.order,
                (&p.exponents.0, &p.exponents.1),
                &s.multiplicity,
                &s.j,
            )?,
            [(_, s)] => {
                // surface along z₂: solve with the axes swapped, then swap back
                let t = local_invariant_on_surface(
                    &p.id,
                    &p.order,
                    (&p.exponents.1, &p.exponents.0),
                    &s.multiplicity,
                    &s.j,
                )?;
                PointLocalInvariant::from_triple(p.id.clone(), t.m, t.j2, t.j1)?
            }
            _ => return Err(LocalInvariantError::UnsupportedGeometry(p.id.clone())),
        };
        out.insert(p.id.clone(), pli);
    }
    Ok(out)
}

/// Compatibility of a point's invariants with an incident surface: the
/// surface in slot `k` has multiplicity `m_k` and `j ≡ j_{other} (mod m_k)`.
pub fn check_compatibility(
    pli: &PointLocalInvariant,
    point: &SingularPointData,
    surf: &SurfaceData,
) -> Result<bool, LocalInvariantError> {
    if !point.incident.contains(&surf.id) {
        return Err(LocalInvariantError::NotIncident {
            point: point.id.clone(),
            surface: surf.id.clone(),
        });
    }
    let m = &surf.multiplicity;
    let fits = |slot_m: &Int, other_j: &Int| -> bool {
        slot_m == m && (m.is_one() || modulo(&surf.j, m) == modulo(other_j, m))
    };
    Ok(fits(&pli.m1, &pli.j2) || fits(&pli.m2, &pli.j1))
}

/// `#{x ∈ P : p | d(x)} ≤ b₂`.
pub fn check_even_point_bound(cfg: &OrbifoldConfig, p: &Int) -> bool {
    let count = cfg
        .points
        .iter()
        .filter(|x| x.order.is_multiple_of(p))
        .count();
    count <= cfg.b2
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::rat;

    fn two_surfaces(m1: i64, m2: i64) -> OrbifoldConfig {
        let mut cfg = OrbifoldConfig::empty();
        cfg.surfaces
            .push(SurfaceData::new("A", 0, rat(0, 1)).with_isotropy(int(m1), int(1)));
        cfg.surfaces
            .push(SurfaceData::new("B", 0, rat(0, 1)).with_isotropy(int(m2), int(1)));
        cfg.events.push(IntersectionEvent::new(
            "A",
            "B",
            Location::Smooth("x".into()),
        ));
        cfg
    }

    #[test]
    fn coprimality_violation() {
        let v = validate_config(&two_surfaces(2, 4));
        assert_eq!(
            v,
            vec![Violation::CoprimalityViolation {
                a: "A".into(),
                b: "B".into()
            }]
        );
        assert!(validate_config(&two_surfaces(2, 3)).is_empty());
    }

    #[test]
    fn non_coprime_local_invariant() {
        let mut cfg = OrbifoldConfig::empty();
        let mut s = SurfaceData::new("D", 1, rat(0, 1));
        s.multiplicity = int(6);
        s.j = int(3);
        cfg.surfaces.push(s);
        assert_eq!(
            validate_config(&cfg),
            vec![Violation::LocalInvariantNotCoprime {
                surface: "D".into()
            }]
        );
    }

    #[test]
    fn assign_on_surface_three() {
        let pli =
            local_invariant_on_surface("x", &int(2), (&int(1), &int(1)), &int(3), &int(1)).unwrap();
        assert_eq!(
            (pli.m.clone(), pli.j1.clone(), pli.j2.clone()),
            (int(6), int(3), int(1))
        );
        assert_eq!(
            (pli.m1.clone(), pli.m2.clone(), pli.d.clone()),
            (int(3), int(1), int(2))
        );
    }

    #[test]
    fn assign_passthrough_and_even_j() {
        let mut cfg = OrbifoldConfig::empty();
        cfg.points
            .push(SingularPointData::double_point("x", vec![]));
        let map = assign_local_invariants(&cfg).unwrap();
        let p = &map["x"];
        assert_eq!(
            (p.m.clone(), p.j1.clone(), p.j2.clone()),
            (int(2), int(1), int(1))
        );

        // n = 9, j = 2: x = 1 so j2 = 11, and gcd(11, 18) = 1
        let pli =
            local_invariant_on_surface("y", &int(2), (&int(1), &int(1)), &int(9), &int(2)).unwrap();
        assert_eq!(pli.m, int(18));
        assert_eq!(pli.j2, int(11));
        assert_eq!(pli.m2, int(1));
        assert_eq!(pli.m1, int(9));
    }

    #[test]
    fn two_isotropy_surfaces_refused() {
        let mut cfg = two_surfaces(2, 3);
        cfg.events.clear();
        cfg.points.push(SingularPointData {
            id: "x".into(),
            order: int(5),
            exponents: (int(1), int(2)),
            incident: vec!["A".into(), "B".into()],
        });
        assert!(matches!(
            assign_local_invariants(&cfg),
            Err(LocalInvariantError::UnsupportedGeometry(_))
        ));
    }

    #[test]
    fn second_slot_surface() {
        let mut cfg = OrbifoldConfig::empty();
        cfg.surfaces.push(SurfaceData::new("A", 0, rat(0, 1)));
        cfg.surfaces
            .push(SurfaceData::new("B", 0, rat(0, 1)).with_isotropy(int(5), int(2)));
        cfg.points.push(SingularPointData {
            id: "x".into(),
            order: int(3),
            exponents: (int(1), int(2)),
            incident: vec!["A".into(), "B".into()],
        });
        let map = assign_local_invariants(&cfg).unwrap();
        let pli = &map["x"];
        assert_eq!(pli.m2, int(5));
        assert_eq!(pli.m1, int(1));
        assert!(check_compatibility(pli, &cfg.points[0], &cfg.surfaces[1]).unwrap());
        assert!(check_compatibility(pli, &cfg.points[0], &cfg.surfaces[0]).unwrap());
    }

    #[test]
    fn compatibility_examples() {
        let pli = PointLocalInvariant::from_triple("x", int(6), int(3), int(1)).unwrap();
        let pt = SingularPointData::double_point("x", vec!["D".into()]);
        let ok = SurfaceData::new("D", 1, rat(0, 1)).with_isotropy(int(3), int(1));
        let bad_j = SurfaceData::new("D", 1, rat(0, 1)).with_isotropy(int(3), int(2));
        let bad_m = SurfaceData::new("D", 1, rat(0, 1)).with_isotropy(int(9), int(1));
        assert!(check_compatibility(&pli, &pt, &ok).unwrap());
        assert!(!check_compatibility(&pli, &pt, &bad_j).unwrap());
        assert!(!check_compatibility(&pli, &pt, &bad_m).unwrap());
        let other = SurfaceData::new("E", 1, rat(0, 1));
        assert!(matches!(
            check_compatibility(&pli, &pt, &other),
            Err(LocalInvariantError::NotIncident { .. })
        ));
    }

    #[test]
    fn even_point_bound() {
        let mut cfg = OrbifoldConfig::empty();
        assert!(check_even_point_bound(&cfg, &int(2)));
        cfg.b2 = 2;
        cfg.euler = 4;
        cfg.pairing = RatMatrix::identity(2);
        for i in 0..3 {
            cfg.points
                .push(SingularPointData::double_point(format!("x{i}"), vec![]));
        }
        assert!(!check_even_point_bound(&cfg, &int(2)));
        assert!(check_even_point_bound(&cfg, &int(3)));
    }

    #[test]
    fn euler_and_pairing_checks() {
        let mut cfg = OrbifoldConfig::empty();
        cfg.b2 = 1;
        cfg.euler = 3;
        cfg.pairing = RatMatrix::identity(1);
        cfg.surfaces
            .push(SurfaceData::new("L", 0, rat(1, 1)).with_qclass(vec![rat(1, 1)]));
        cfg.surfaces
            .push(SurfaceData::new("C", 1, rat(9, 1)).with_qclass(vec![rat(3, 1)]));
        // L.C = 3 but no events recorded
        let v = validate_config(&cfg);
        assert_eq!(v.len(), 1);
        assert!(matches!(v[0], Violation::IntersectionMismatch { .. }));
        for l in ["a", "b", "c"] {
            cfg.events
                .push(IntersectionEvent::new("L", "C", Location::Smooth(l.into())));
        }
        assert!(validate_config(&cfg).is_empty());
        cfg.euler = 4;
        assert_eq!(validate_config(&cfg).len(), 1);
    }
}
