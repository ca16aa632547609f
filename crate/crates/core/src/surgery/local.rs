use std::collections::BTreeSet;

use num_traits::{One, Signed, Zero};

use super::SurgeryError;
use crate::exactmath::{fmt_rat, gcd, int, rat, to_integer, Int, IntMatrix, RatMatrix, Rational};
use crate::orbmodel::{
    Id, IntersectionEvent, Location, OrbifoldConfig, SingularPointData, SurfaceData,
};

fn require_surface<'a>(cfg: &'a OrbifoldConfig, id: &str) -> Result<&'a SurfaceData, SurgeryError> {
    cfg.surface(id)
        .ok_or_else(|| SurgeryError::UnknownSurface(id.to_string()))
}

fn require_fresh(cfg: &OrbifoldConfig, id: &str) -> Result<(), SurgeryError> {
    if cfg.surface(id).is_some() || cfg.point(id).is_some() {
        return Err(SurgeryError::NameClash(id.to_string()));
    }
    Ok(())
}

/// Label of the point where an exceptional curve meets a proper transform.
pub(crate) fn exceptional_label(exc: &str, surface: &str) -> String {
    format!("{exc}*{surface}")
}

/// Blows up a smooth regular point. Every listed surface passes through the
/// point, pairwise transversely; their proper transforms are separated and
/// each meets the new (−1)-sphere once.
pub fn blow_up(
    cfg: &OrbifoldConfig,
    at: &str,
    through: &[Id],
    exc: &str,
) -> Result<OrbifoldConfig, SurgeryError> {
    if cfg.point(at).is_some() {
        return Err(SurgeryError::NotSmoothPoint(at.to_string()));
    }
    require_fresh(cfg, exc)?;
    let listed: BTreeSet<&str> = through.iter().map(String::as_str).collect();
    if listed.len() != through.len() {
        return Err(SurgeryError::NameClash(at.to_string()));
    }
    for id in through {
        let s = require_surface(cfg, id)?;
        if s.is_isotropy() {
            return Err(SurgeryError::IsotropyAtPoint {
                surface: id.clone(),
            });
        }
    }
    let here = Location::Smooth(at.to_string());
    for e in cfg.events.iter().filter(|e| e.location == here) {
        for id in [&e.a, &e.b] {
            if !listed.contains(id.as_str()) {
                return Err(SurgeryError::UnlistedSurfaceAtPoint {
                    surface: id.clone(),
                    label: at.to_string(),
                });
            }
        }
    }
    for (i, a) in through.iter().enumerate() {
        for b in &through[i + 1..] {
            let meets = cfg
                .events
                .iter()
                .any(|e| e.location == here && e.involves(a) && e.involves(b));
            if !meets {
                return Err(SurgeryError::NotTransverseAt {
                    a: a.clone(),
                    b: b.clone(),
                    label: at.to_string(),
                });
            }
        }
    }

    let mut out = cfg.clone();
    let n = cfg.b2;
    let mut pairing = RatMatrix::zeros(n + 1, n + 1);
    for r in 0..n {
        for c in 0..n {
            pairing[(r, c)] = cfg.pairing[(r, c)].clone();
        }
    }
    pairing[(n, n)] = rat(-1, 1);
    out.pairing = pairing;
    for s in &mut out.surfaces {
        let hit = listed.contains(s.id.as_str());
        if let Some(q) = &mut s.qclass {
            q.push(if hit { rat(-1, 1) } else { Rational::zero() });
        }
        if hit {
            s.self_intersection -= Rational::one();
        }
    }
    let mut e_class = vec![Rational::zero(); n + 1];
    e_class[n] = Rational::one();
    out.surfaces
        .push(SurfaceData::new(exc, 0, rat(-1, 1)).with_qclass(e_class));
    out.events.retain(|e| e.location != here);
    for id in through {
        out.events.push(IntersectionEvent::new(
            exc,
            id.clone(),
            Location::Smooth(exceptional_label(exc, id)),
        ));
    }
    if let Some(p) = &cfg.integral_pairing {
        let cols = p.cols();
        let mut m = IntMatrix::zeros(p.rows() + 1, cols + 1);
        for r in 0..p.rows() {
            for c in 0..cols {
                m[(r, c)] = p[(r, c)].clone();
            }
        }
        for (c, s) in cfg.surfaces.iter().enumerate() {
            if listed.contains(s.id.as_str()) {
                m[(p.rows(), c)] = Int::one();
            }
        }
        m[(p.rows(), cols)] = int(-1);
        out.integral_pairing = Some(m);
    }
    out.b2 += 1;
    out.euler += 1;
    Ok(out)
}

/// Blows down a (−2)-sphere to an ordinary double point `point`.
///
/// Rational homology is the orthogonal complement of the sphere's class `ε`,
/// each class `A` descending to `A + (A·ε/2)ε`. Self-intersections are
/// updated independently from the events (`+½` per surface meeting the
/// sphere) and the two answers must agree.
pub fn blow_down_minus2(
    cfg: &OrbifoldConfig,
    sphere: &str,
    point: &str,
) -> Result<OrbifoldConfig, SurgeryError> {
    let s = require_surface(cfg, sphere)?;
    let reject = |reason: &str| SurgeryError::NotMinusTwoSphere {
        surface: sphere.to_string(),
        reason: reason.to_string(),
    };
    if s.genus != 0 {
        return Err(reject("genus is not 0"));
    }
    if s.is_isotropy() {
        return Err(reject("multiplicity is not 1"));
    }
    if s.self_intersection != rat(-2, 1) {
        return Err(reject("self-intersection is not -2"));
    }
    if cfg.touches_singular_point(sphere)
        || cfg
            .events_of(sphere)
            .any(|e| matches!(e.location, Location::Singular(_)))
    {
        return Err(SurgeryError::MeetsSingularPoint {
            surface: sphere.to_string(),
        });
    }
    let eps = s
        .qclass
        .clone()
        .ok_or_else(|| SurgeryError::MissingQClass(sphere.to_string()))?;
    require_fresh(cfg, point)?;

    let mut met: Vec<Id> = Vec::new();
    for other in &cfg.surfaces {
        if other.id == sphere {
            continue;
        }
        let count = cfg
            .events_of(sphere)
            .filter(|e| e.other(sphere) == Some(other.id.as_str()))
            .count();
        if count > 1 {
            return Err(reject(&format!("meets {} more than once", other.id)));
        }
        if count == 1 {
            met.push(other.id.clone());
        }
    }
    if met.len() > 2 {
        return Err(SurgeryError::TooManyIncident {
            point: point.to_string(),
        });
    }

    let n = cfg.b2;
    let f = cfg.pairing.mul_vec(&eps);
    let k = f
        .iter()
        .position(|v| !v.is_zero())
        .ok_or_else(|| reject("class pairs trivially with everything"))?;
    let keep: Vec<usize> = (0..n).filter(|&i| i != k).collect();
    // v_i = e_i − (f_i/f_k) e_k spans ε^⊥
    let basis: Vec<Vec<Rational>> = keep
        .iter()
        .map(|&i| {
            let mut v = vec![Rational::zero(); n];
            v[i] = Rational::one();
            v[k] = -&f[i] / &f[k];
            v
        })
        .collect();
    let mut pairing = RatMatrix::zeros(n - 1, n - 1);
    for (a, va) in basis.iter().enumerate() {
        for (b, vb) in basis.iter().enumerate() {
            pairing[(a, b)] = cfg.pairing.bilinear(va, vb);
        }
    }

    let mut out = cfg.clone();
    out.surfaces.retain(|x| x.id != sphere);
    for x in &mut out.surfaces {
        if met.contains(&x.id) {
            x.self_intersection += rat(1, 2);
        }
        if let Some(q) = &x.qclass {
            let dot: Rational = q
                .iter()
                .zip(&f)
                .fold(Rational::zero(), |acc, (a, b)| acc + a * b);
            let half = &dot / rat(2, 1);
            let projected: Vec<Rational> = q.iter().zip(&eps).map(|(a, e)| a + &half * e).collect();
            let coords: Vec<Rational> = keep.iter().map(|&i| projected[i].clone()).collect();
            if pairing.bilinear(&coords, &coords) != x.self_intersection {
                return Err(SurgeryError::HomologyMismatch {
                    surface: x.id.clone(),
                });
            }
            x.qclass = Some(coords);
        }
    }
    out.pairing = pairing;
    out.events.retain(|e| !e.involves(sphere));
    let incident: Vec<Id> = out
        .surfaces
        .iter()
        .filter(|x| met.contains(&x.id))
        .map(|x| x.id.clone())
        .collect();
    if let [a, b] = incident.as_slice() {
        out.events.push(IntersectionEvent::new(
            a.clone(),
            b.clone(),
            Location::Singular(point.to_string()),
        ));
    }
    out.points
        .push(SingularPointData::double_point(point, incident));
    // the integral lattice of the quotient is not tracked
    out.integral_pairing = None;
    out.b2 -= 1;
    out.euler -= 1;
    Ok(out)
}

/// Stops tracking a surface. Its class stays in homology.
pub fn forget(cfg: &OrbifoldConfig, id: &str) -> Result<OrbifoldConfig, SurgeryError> {
    let idx = cfg
        .surface_index(id)
        .ok_or_else(|| SurgeryError::UnknownSurface(id.to_string()))?;
    let mut out = cfg.clone();
    out.surfaces.remove(idx);
    out.events.retain(|e| !e.involves(id));
    for p in &mut out.points {
        p.incident.retain(|s| s != id);
    }
    if let Some(p) = &cfg.integral_pairing {
        let cols: Vec<usize> = (0..p.cols()).filter(|&c| c != idx).collect();
        let mut m = IntMatrix::zeros(p.rows(), cols.len());
        for r in 0..p.rows() {
            for (j, &c) in cols.iter().enumerate() {
                m[(r, j)] = p[(r, c)].clone();
            }
        }
        out.integral_pairing = Some(m);
    }
    Ok(out)
}

pub fn rename(cfg: &OrbifoldConfig, from: &str, to: &str) -> Result<OrbifoldConfig, SurgeryError> {
    require_surface(cfg, from)?;
    if from == to {
        return Ok(cfg.clone());
    }
    require_fresh(cfg, to)?;
    let mut out = cfg.clone();
    for s in &mut out.surfaces {
        if s.id == from {
            s.id = to.to_string();
        }
    }
    for p in &mut out.points {
        for s in &mut p.incident {
            if s == from {
                *s = to.to_string();
            }
        }
    }
    let sub = |x: &str| {
        if x == from {
            to.to_string()
        } else {
            x.to_string()
        }
    };
    out.events = out
        .events
        .iter()
        .map(|e| {
            let mut n = IntersectionEvent::new(sub(&e.a), sub(&e.b), e.location.clone());
            n.sign = e.sign;
            n
        })
        .collect();
    Ok(out)
}

/// Resolves two tori meeting once into a genus-2 surface `Σ ~ T₁ + T₂`, then
/// blows up the common point of `T₁`, `T₂` and `Σ`.
///
/// `Σ` meets `Tᵢ` at the common point and in `Tᵢ²` further smooth points,
/// so each `Tᵢ²` must be a non-negative integer.
pub fn resolve_torus_pair(
    cfg: &OrbifoldConfig,
    t1: &str,
    t2: &str,
    sigma: &str,
    exc: &str,
) -> Result<OrbifoldConfig, SurgeryError> {
    let s1 = require_surface(cfg, t1)?;
    let s2 = require_surface(cfg, t2)?;
    for s in [s1, s2] {
        if s.genus != 1 || s.is_isotropy() {
            return Err(SurgeryError::NotTorus(s.id.clone()));
        }
    }
    let mutual: Vec<&IntersectionEvent> = cfg
        .events
        .iter()
        .filter(|e| e.involves(t1) && e.involves(t2) && t1 != t2)
        .collect();
    let label = match mutual.as_slice() {
        [e] => match &e.location {
            Location::Smooth(l) => l.clone(),
            Location::Singular(_) => {
                return Err(SurgeryError::NotSingleIntersection {
                    a: t1.into(),
                    b: t2.into(),
                })
            }
        },
        _ => {
            return Err(SurgeryError::NotSingleIntersection {
                a: t1.into(),
                b: t2.into(),
            })
        }
    };
    if cfg.events.iter().any(|e| {
        e.location == Location::Smooth(label.clone()) && !(e.involves(t1) && e.involves(t2))
    }) {
        return Err(SurgeryError::UnlistedSurfaceAtPoint {
            surface: t1.into(),
            label,
        });
    }
    require_fresh(cfg, sigma)?;
    let mut extra = Vec::new();
    for s in [s1, s2] {
        let sq = to_integer(&s.self_intersection)
            .filter(|v| !v.is_negative())
            .ok_or_else(|| SurgeryError::UnsupportedSelfIntersection {
                surface: s.id.clone(),
                value: fmt_rat(&s.self_intersection),
            })?;
        let count: usize =
            sq.try_into()
                .map_err(|_| SurgeryError::UnsupportedSelfIntersection {
                    surface: s.id.clone(),
                    value: fmt_rat(&s.self_intersection),
                })?;
        for k in 0..count {
            extra.push((s.id.clone(), format!("{sigma}.{}#{}", s.id, k + 1)));
        }
    }

    let mut out = cfg.clone();
    let sq = &s1.self_intersection + &s2.self_intersection + rat(2, 1);
    let mut sig = SurfaceData::new(sigma, 2, sq);
    if let (Some(q1), Some(q2)) = (&s1.qclass, &s2.qclass) {
        sig.qclass = Some(q1.iter().zip(q2).map(|(a, b)| a + b).collect());
    }
    out.surfaces.push(sig);
    if let Some(p) = &cfg.integral_pairing {
        let (i1, i2) = (
            cfg.surface_index(t1).expect("checked"),
            cfg.surface_index(t2).expect("checked"),
        );
        let mut m = IntMatrix::zeros(p.rows(), p.cols() + 1);
        for r in 0..p.rows() {
            for c in 0..p.cols() {
                m[(r, c)] = p[(r, c)].clone();
            }
            m[(r, p.cols())] = &p[(r, i1)] + &p[(r, i2)];
        }
        out.integral_pairing = Some(m);
    }
    let here = Location::Smooth(label.clone());
    out.events
        .push(IntersectionEvent::new(sigma, t1, here.clone()));
    out.events.push(IntersectionEvent::new(sigma, t2, here));
    for (t, l) in extra {
        out.events
            .push(IntersectionEvent::new(sigma, t, Location::Smooth(l)));
    }
    blow_up(&out, &label, &[t1.into(), t2.into(), sigma.into()], exc)
}

pub fn set_isotropy(
    cfg: &OrbifoldConfig,
    id: &str,
    m: &Int,
    j: &Int,
) -> Result<OrbifoldConfig, SurgeryError> {
    require_surface(cfg, id)?;
    let bad = |reason: &str| SurgeryError::InvalidIsotropy {
        surface: id.to_string(),
        reason: reason.to_string(),
    };
    if *m < Int::one() {
        return Err(bad("multiplicity must be positive"));
    }
    if *m > Int::one() && !gcd(j, m).is_one() {
        return Err(bad("j must be a unit modulo m"));
    }
    let mut out = cfg.clone();
    let s = out.surface_mut(id).expect("checked");
    *s = s.clone().with_isotropy(m.clone(), j.clone());
    Ok(out)
}

/// Changes the rational basis to the classes of the given surfaces.
pub fn rebase(cfg: &OrbifoldConfig, basis: &[Id]) -> Result<OrbifoldConfig, SurgeryError> {
    if basis.len() != cfg.b2 {
        return Err(SurgeryError::DegenerateBasis);
    }
    let n = cfg.b2;
    let mut cols = Vec::with_capacity(n);
    for id in basis {
        let s = require_surface(cfg, id)?;
        let q = s
            .qclass
            .clone()
            .ok_or_else(|| SurgeryError::MissingQClass(id.clone()))?;
        cols.push(q);
    }
    let b = RatMatrix::from_rows(cols.clone()).transpose();
    let inv = b.inverse().ok_or(SurgeryError::DegenerateBasis)?;
    let mut out = cfg.clone();
    out.pairing = b.transpose().mul(&cfg.pairing).mul(&b);
    for s in &mut out.surfaces {
        if let Some(q) = &s.qclass {
            s.qclass = Some(inv.mul_vec(q));
        }
    }
    Ok(out)
}

pub fn set_integral_pairing(
    cfg: &OrbifoldConfig,
    matrix: IntMatrix,
) -> Result<OrbifoldConfig, SurgeryError> {
    if matrix.rows() != cfg.b2 || matrix.cols() != cfg.surfaces.len() {
        return Err(SurgeryError::PairingShape {
            rows: cfg.b2,
            cols: cfg.surfaces.len(),
        });
    }
    let mut out = cfg.clone();
    out.integral_pairing = Some(matrix);
    Ok(out)
}

/// `P[r][i] = ⟨β_r, D_i⟩` for integral classes `β_r` given in the rational
/// basis; every surface must have a class and every entry must be integral.
pub fn integral_pairing_from_classes(
    cfg: &OrbifoldConfig,
    classes: &[Vec<Rational>],
) -> Result<IntMatrix, SurgeryError> {
    let mut m = IntMatrix::zeros(classes.len(), cfg.surfaces.len());
    for (r, beta) in classes.iter().enumerate() {
        for (c, s) in cfg.surfaces.iter().enumerate() {
            let q = s
                .qclass
                .as_ref()
                .ok_or_else(|| SurgeryError::MissingQClass(s.id.clone()))?;
            let v = cfg.pairing.bilinear(beta, q);
            m[(r, c)] = to_integer(&v).ok_or_else(|| SurgeryError::NonIntegralPairing {
                row: r,
                surface: s.id.clone(),
            })?;
        }
    }
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbmodel::validate_config;

    fn cp2() -> OrbifoldConfig {
        let mut cfg = OrbifoldConfig::empty();
        cfg.b2 = 1;
        cfg.euler = 3;
        cfg.pairing = RatMatrix::identity(1);
        cfg.surfaces
            .push(SurfaceData::new("C", 1, rat(9, 1)).with_qclass(vec![rat(3, 1)]));
        cfg
    }

    fn two_tori(a: i64) -> OrbifoldConfig {
        // T1 ~ x + a·y, T2 ~ y on a hyperbolic plane, meeting once
        let mut cfg = OrbifoldConfig::empty();
        cfg.b2 = 2;
        cfg.b1 = 2;
        cfg.euler = 0;
        cfg.pairing =
            RatMatrix::from_rows(vec![vec![rat(0, 1), rat(1, 1)], vec![rat(1, 1), rat(0, 1)]]);
        cfg.surfaces
            .push(SurfaceData::new("T1", 1, rat(2 * a, 1)).with_qclass(vec![rat(1, 1), rat(a, 1)]));
        cfg.surfaces
            .push(SurfaceData::new("T2", 1, rat(0, 1)).with_qclass(vec![rat(0, 1), rat(1, 1)]));
        cfg.events.push(IntersectionEvent::new(
            "T1",
            "T2",
            Location::Smooth("x".into()),
        ));
        cfg
    }

    #[test]
    fn blow_up_on_cubic() {
        let out = blow_up(&cp2(), "q", &["C".into()], "E").unwrap();
        assert_eq!((out.b2, out.euler), (2, 4));
        assert_eq!(out.surface("C").unwrap().self_intersection, rat(8, 1));
        assert!(
            validate_config(&out).is_empty(),
            "{:?}",
            validate_config(&out)
        );
    }

    #[test]
    fn blow_up_empty_point() {
        let out = blow_up(&cp2(), "q", &[], "E").unwrap();
        assert_eq!(out.surface("C").unwrap().self_intersection, rat(9, 1));
        assert_eq!(out.surfaces.len(), 2);
        assert!(validate_config(&out).is_empty());
    }

    #[test]
    fn blow_up_at_singular_point_rejected() {
        let mut cfg = cp2();
        cfg.points
            .push(SingularPointData::double_point("x", vec![]));
        assert_eq!(
            blow_up(&cfg, "x", &[], "E"),
            Err(SurgeryError::NotSmoothPoint("x".into()))
        );
    }

    #[test]
    fn blow_down_isolated_sphere() {
        let mut cfg = cp2();
        cfg = blow_up(&cfg, "q", &[], "E1").unwrap();
        cfg = blow_up(&cfg, "E1*x", &[], "E2").unwrap();
        // E1 − E2 is a (−2)-class disjoint from C
        cfg.surfaces
            .push(SurfaceData::new("S", 0, rat(-2, 1)).with_qclass(vec![
                rat(0, 1),
                rat(1, 1),
                rat(-1, 1),
            ]));
        cfg.surfaces.retain(|s| s.id == "C" || s.id == "S");
        let out = blow_down_minus2(&cfg, "S", "z").unwrap();
        assert_eq!((out.b2, out.euler), (2, 4));
        assert_eq!(out.points.len(), 1);
        assert!(out.points[0].incident.is_empty());
        assert_eq!(out.surface("C").unwrap().self_intersection, rat(9, 1));
        assert!(
            validate_config(&out).is_empty(),
            "{:?}",
            validate_config(&out)
        );
    }

    #[test]
    fn blow_down_rejects_wrong_square() {
        let cfg = blow_up(&cp2(), "q", &[], "E").unwrap();
        assert!(matches!(
            blow_down_minus2(&cfg, "E", "z"),
            Err(SurgeryError::NotMinusTwoSphere { .. })
        ));
    }

    #[test]
    fn resolve_flat_tori() {
        let out = resolve_torus_pair(&two_tori(0), "T1", "T2", "S", "X").unwrap();
        let sq: Vec<_> = ["T1", "T2", "S"]
            .iter()
            .map(|id| out.surface(id).unwrap().self_intersection.clone())
            .collect();
        assert_eq!(sq, vec![rat(-1, 1), rat(-1, 1), rat(1, 1)]);
        assert_eq!(out.surface("S").unwrap().genus, 2);
        assert!(
            validate_config(&out).is_empty(),
            "{:?}",
            validate_config(&out)
        );
        for (a, b) in [("T1", "T2"), ("T1", "S"), ("T2", "S")] {
            assert!(out.local_intersection(a, b).is_zero());
        }
    }

    #[test]
    fn resolve_with_positive_square() {
        // T1² = 2 here; the formulas give (1, -1, 3)
        let out = resolve_torus_pair(&two_tori(1), "T1", "T2", "S", "X").unwrap();
        let sq: Vec<_> = ["T1", "T2", "S"]
            .iter()
            .map(|id| out.surface(id).unwrap().self_intersection.clone())
            .collect();
        assert_eq!(sq, vec![rat(1, 1), rat(-1, 1), rat(3, 1)]);
        assert!(
            validate_config(&out).is_empty(),
            "{:?}",
            validate_config(&out)
        );
    }

    #[test]
    fn rebase_preserves_squares() {
        let cfg = blow_up(&cp2(), "q", &["C".into()], "E").unwrap();
        let out = rebase(&cfg, &["C".into(), "E".into()]).unwrap();
        assert_eq!(
            out.pairing,
            RatMatrix::from_rows(vec![
                vec![rat(8, 1), rat(1, 1)],
                vec![rat(1, 1), rat(-1, 1)]
            ])
        );
        assert!(validate_config(&out).is_empty());
    }
}
