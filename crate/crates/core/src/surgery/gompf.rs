use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};

use super::SurgeryError;
use crate::exactmath::{fmt_rat, RatMatrix, Rational};
use crate::orbmodel::{Id, IntersectionEvent, Location, OrbifoldConfig, SurfaceData};

/// One output surface of a fiber sum, glued from pieces on either side.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Join {
    pub output: Id,
    pub from_a: Vec<Id>,
    pub from_b: Vec<Id>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GluingPlan {
    pub fiber_a: Id,
    pub fiber_b: Id,
    /// Marked points of `F_A` paired with marked points of `F_B`.
    pub point_matching: Vec<(Location, Location)>,
    pub joins: Vec<Join>,
    /// Output surfaces whose classes form a rational basis of `H₂`.
    pub basis: Vec<Id>,
    pub b1: usize,
    pub b2: usize,
}

/// Marked points of a fiber: its intersection events and the singular points
/// it passes through.
fn marked_points(cfg: &OrbifoldConfig, fiber: &str) -> BTreeSet<Location> {
    let mut out: BTreeSet<Location> = cfg.events_of(fiber).map(|e| e.location.clone()).collect();
    for p in &cfg.points {
        if p.incident.iter().any(|s| s == fiber) {
            out.insert(Location::Singular(p.id.clone()));
        }
    }
    out
}

/// Surfaces other than the fiber through a marked point.
fn crossers(cfg: &OrbifoldConfig, fiber: &str, loc: &Location) -> Vec<Id> {
    let mut out: Vec<Id> = match loc {
        Location::Smooth(_) => cfg
            .events_of(fiber)
            .filter(|e| &e.location == loc)
            .filter_map(|e| e.other(fiber).map(str::to_string))
            .collect(),
        Location::Singular(p) => cfg
            .point(p)
            .map(|pt| {
                pt.incident
                    .iter()
                    .filter(|s| *s != fiber)
                    .cloned()
                    .collect()
            })
            .unwrap_or_default(),
    };
    out.sort();
    out.dedup();
    out
}

/// Orbifold Gompf sum of `a` and `b` along `F_A ⊂ a` and `F_B ⊂ b`.
///
/// Pieces crossing the fibers are glued along matched points into the
/// plan's joins. Betti numbers and the rational basis are supplied by the
/// plan and only checked against `χ = 2 − 2b₁ + b₂` and nondegeneracy.
pub fn gompf_fiber_sum(
    a: &OrbifoldConfig,
    b: &OrbifoldConfig,
    plan: &GluingPlan,
) -> Result<OrbifoldConfig, SurgeryError> {
    let fa = a
        .surface(&plan.fiber_a)
        .ok_or_else(|| SurgeryError::UnknownSurface(plan.fiber_a.clone()))?;
    let fb = b
        .surface(&plan.fiber_b)
        .ok_or_else(|| SurgeryError::UnknownSurface(plan.fiber_b.clone()))?;
    if fa.genus != fb.genus {
        return Err(SurgeryError::GenusMismatch {
            a: fa.genus,
            b: fb.genus,
        });
    }
    let normal = &fa.self_intersection + &fb.self_intersection;
    if !normal.is_zero() {
        return Err(SurgeryError::NormalBundleObstruction {
            sum: fmt_rat(&normal),
        });
    }
    if fa.multiplicity != fb.multiplicity {
        return Err(SurgeryError::BadJoin {
            output: plan.fiber_a.clone(),
            reason: "fibers have different multiplicities".into(),
        });
    }

    let marks_a = marked_points(a, &fa.id);
    let marks_b = marked_points(b, &fb.id);
    let mut used_a = BTreeSet::new();
    let mut used_b = BTreeSet::new();
    for (la, lb) in &plan.point_matching {
        for (loc, marks, used) in [(la, &marks_a, &mut used_a), (lb, &marks_b, &mut used_b)] {
            if !marks.contains(loc) || !used.insert(loc.clone()) {
                return Err(SurgeryError::UnmatchedMarkedPoint {
                    location: loc.to_string(),
                });
            }
        }
        match (la, lb) {
            (Location::Smooth(_), Location::Smooth(_)) => {}
            (Location::Singular(pa), Location::Singular(pb)) => {
                let (xa, xb) = (a.point(pa).expect("marked"), b.point(pb).expect("marked"));
                if xa.order != xb.order {
                    return Err(SurgeryError::SingularOrderMismatch {
                        a: pa.clone(),
                        b: pb.clone(),
                    });
                }
            }
            _ => {
                return Err(SurgeryError::MatchTypeMismatch {
                    a: la.to_string(),
                    b: lb.to_string(),
                })
            }
        }
    }
    for (marks, used) in [(&marks_a, &used_a), (&marks_b, &used_b)] {
        if let Some(loc) = marks.difference(used).next() {
            return Err(match loc {
                Location::Singular(p) => SurgeryError::UnmatchedSingularPoint { point: p.clone() },
                Location::Smooth(_) => SurgeryError::UnmatchedMarkedPoint {
                    location: loc.to_string(),
                },
            });
        }
    }

    // piece -> join index, keyed by side
    let mut owner: BTreeMap<(bool, Id), usize> = BTreeMap::new();
    for (ji, j) in plan.joins.iter().enumerate() {
        let bad = |reason: String| SurgeryError::BadJoin {
            output: j.output.clone(),
            reason,
        };
        if j.from_a.is_empty() && j.from_b.is_empty() {
            return Err(bad("no pieces".into()));
        }
        for (side, cfg, fiber, ids) in [(true, a, &fa.id, &j.from_a), (false, b, &fb.id, &j.from_b)]
        {
            for id in ids {
                if id == fiber || cfg.surface(id).is_none() {
                    return Err(bad(format!("{id} is not a surface off the fiber")));
                }
                if owner.insert((side, id.clone()), ji).is_some() {
                    return Err(bad(format!("{id} is used twice")));
                }
            }
        }
    }

    let mut pair_count = vec![0i64; plan.joins.len()];
    let mut edges: Vec<Vec<(usize, usize)>> = vec![Vec::new(); plan.joins.len()];
    let piece_index = |ji: usize, side: bool, id: &str| -> usize {
        let j = &plan.joins[ji];
        if side {
            j.from_a.iter().position(|x| x == id).expect("owned")
        } else {
            j.from_a.len() + j.from_b.iter().position(|x| x == id).expect("owned")
        }
    };
    for (la, lb) in &plan.point_matching {
        let ca = crossers(a, &fa.id, la);
        let cb = crossers(b, &fb.id, lb);
        match (ca.as_slice(), cb.as_slice()) {
            ([], []) => {}
            ([x], [y]) => {
                let ja = owner.get(&(true, x.clone()));
                let jb = owner.get(&(false, y.clone()));
                match (ja, jb) {
                    (Some(&ja), Some(&jb)) if ja == jb => {
                        pair_count[ja] += 1;
                        edges[ja].push((piece_index(ja, true, x), piece_index(ja, false, y)));
                    }
                    _ => {
                        return Err(SurgeryError::BadJoin {
                            output: format!("{x}|{y}"),
                            reason: format!("pieces glued at {la} ~ {lb} are not in one join"),
                        })
                    }
                }
            }
            _ => {
                return Err(SurgeryError::BadJoin {
                    output: format!("{la}~{lb}"),
                    reason: "matched points must each carry exactly one crossing surface".into(),
                })
            }
        }
    }
    for (side, cfg, fiber) in [(true, a, &fa.id), (false, b, &fb.id)] {
        for loc in marked_points(cfg, fiber) {
            for x in crossers(cfg, fiber, &loc) {
                if !owner.contains_key(&(side, x.clone())) {
                    return Err(SurgeryError::BadJoin {
                        output: x,
                        reason: "crosses the fiber but belongs to no join".into(),
                    });
                }
            }
        }
    }

    let mut rename: BTreeMap<(bool, Id), Id> = BTreeMap::new();
    let mut joined: Vec<SurfaceData> = Vec::new();
    for (ji, j) in plan.joins.iter().enumerate() {
        let bad = |reason: &str| SurgeryError::BadJoin {
            output: j.output.clone(),
            reason: reason.to_string(),
        };
        let pieces: Vec<&SurfaceData> = j
            .from_a
            .iter()
            .map(|id| a.surface(id).expect("checked"))
            .chain(j.from_b.iter().map(|id| b.surface(id).expect("checked")))
            .collect();
        // connectivity of the gluing graph
        let mut comp: Vec<usize> = (0..pieces.len()).collect();
        fn root(c: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while c[r] != r {
                r = c[r];
            }
            c[x] = r;
            r
        }
        for &(x, y) in &edges[ji] {
            let (rx, ry) = (root(&mut comp, x), root(&mut comp, y));
            comp[rx] = ry;
        }
        let r0 = root(&mut comp, 0);
        if (0..pieces.len()).any(|i| root(&mut comp, i) != r0) {
            return Err(bad("pieces are not connected by matched points"));
        }
        let m = &pieces[0].multiplicity;
        let jv = &pieces[0].j;
        if pieces.iter().any(|p| &p.multiplicity != m || &p.j != jv) {
            return Err(bad("pieces carry different isotropy"));
        }
        let euler: i64 = pieces.iter().map(|p| p.euler()).sum::<i64>() - 2 * pair_count[ji];
        if euler > 2 || (2 - euler) % 2 != 0 {
            return Err(SurgeryError::NonIntegralGenus {
                output: j.output.clone(),
                euler,
            });
        }
        let sq = pieces
            .iter()
            .fold(Rational::zero(), |acc, p| acc + &p.self_intersection);
        let mut s = SurfaceData::new(j.output.clone(), ((2 - euler) / 2) as u32, sq);
        s.multiplicity = m.clone();
        s.j = jv.clone();
        joined.push(s);
        for id in &j.from_a {
            rename.insert((true, id.clone()), j.output.clone());
        }
        for id in &j.from_b {
            rename.insert((false, id.clone()), j.output.clone());
        }
    }

    let mut out = OrbifoldConfig::empty();
    let mut ids = BTreeSet::new();
    let mut claim = |id: &str| -> Result<(), SurgeryError> {
        if ids.insert(id.to_string()) {
            Ok(())
        } else {
            Err(SurgeryError::NameClash(id.to_string()))
        }
    };
    for s in &joined {
        claim(&s.id)?;
    }
    out.surfaces.extend(joined);
    for (side, cfg, fiber) in [(true, a, &fa.id), (false, b, &fb.id)] {
        for s in &cfg.surfaces {
            if &s.id == fiber || rename.contains_key(&(side, s.id.clone())) {
                continue;
            }
            claim(&s.id)?;
            let mut s = s.clone();
            s.qclass = None;
            out.surfaces.push(s);
        }
    }
    let map = |side: bool, id: &str| -> Id {
        rename
            .get(&(side, id.to_string()))
            .cloned()
            .unwrap_or_else(|| id.to_string())
    };
    let mut labels: BTreeMap<String, bool> = BTreeMap::new();
    for (side, cfg, fiber, used) in [(true, a, &fa.id, &used_a), (false, b, &fb.id, &used_b)] {
        for p in &cfg.points {
            if used.contains(&Location::Singular(p.id.clone())) {
                continue;
            }
            claim(&p.id)?;
            let mut p = p.clone();
            p.incident = p.incident.iter().map(|s| map(side, s)).collect();
            out.points.push(p);
        }
        for e in cfg.events.iter().filter(|e| !e.involves(fiber)) {
            if let Location::Smooth(l) = &e.location {
                if *labels.entry(l.clone()).or_insert(side) != side {
                    return Err(SurgeryError::NameClash(l.clone()));
                }
            }
            let (x, y) = (map(side, &e.a), map(side, &e.b));
            if x == y {
                return Err(SurgeryError::BadJoin {
                    output: x,
                    reason: "pieces of one join meet away from the fiber".into(),
                });
            }
            out.events
                .push(IntersectionEvent::new(x, y, e.location.clone()));
        }
    }

    out.b1 = plan.b1;
    out.b2 = plan.b2;
    out.euler = a.euler + b.euler - fa.euler();
    if out.euler != 2 - 2 * plan.b1 as i64 + plan.b2 as i64 {
        return Err(SurgeryError::BettiInconsistent {
            euler: out.euler,
            b1: plan.b1,
            b2: plan.b2,
        });
    }
    if plan.basis.len() != plan.b2 {
        return Err(SurgeryError::DegenerateBasis);
    }
    let n = plan.b2;
    let mut gram = RatMatrix::zeros(n, n);
    for (r, x) in plan.basis.iter().enumerate() {
        let sx = out
            .surface(x)
            .ok_or_else(|| SurgeryError::UnknownSurface(x.clone()))?;
        gram[(r, r)] = sx.self_intersection.clone();
        for (c, y) in plan.basis.iter().enumerate() {
            if r != c {
                gram[(r, c)] = out.local_intersection(x, y);
            }
        }
    }
    if gram.det().is_zero() {
        return Err(SurgeryError::DegenerateBasis);
    }
    for (r, x) in plan.basis.iter().enumerate() {
        let mut q = vec![Rational::zero(); n];
        q[r] = Rational::one();
        out.surface_mut(x).expect("checked").qclass = Some(q);
    }
    out.pairing = gram;
    Ok(out)
}
