//! The two building blocks and the orbifold `Z` assembled from them.

use num_traits::{One, Zero};

use super::local::{exceptional_label, integral_pairing_from_classes};
use super::{GluingPlan, Join, Surgery, SurgeryError, SurgeryLog, SurgeryOp};
use crate::exactmath::{int, is_prime, rat, Int, IntMatrix, RatMatrix, Rational};
use crate::orbmodel::{
    IntersectionEvent, Location, OrbifoldConfig, SingularPointData, SurfaceData,
};

const Y_FIBERS: [&str; 11] = ["3", "4", "5", "6", "7", "8", "9", "10", "1a", "1b", "2a"];

fn unit(n: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[i] = Rational::one();
    v
}

fn scaled(n: usize, i: usize, k: i64) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); n];
    v[i] = rat(k, 1);
    v
}

fn smooth(l: &str) -> Location {
    Location::Smooth(l.to_string())
}

fn singular(p: &str) -> Location {
    Location::Singular(p.to_string())
}

/// Block `Y`: `b₁ = 2`, `b₂ = 6`, `χ = 4`, with eight double points.
///
/// Rational basis `(T₁, S₁, U₁, U₂, U₃, U₄)`. `T₁` meets `S₁` and `S₂` at
/// double points, so `T₁·Sᵢ = ½`; the generic fibers `T_p` are `2[S₁]`.
pub fn build_block_y() -> OrbifoldConfig {
    let n = 6;
    let h = rat(1, 2);
    let z = Rational::zero;
    let o = Rational::one;
    let pairing = RatMatrix::from_rows(vec![
        vec![z(), h.clone(), z(), z(), z(), z()],
        vec![h, z(), z(), z(), z(), z()],
        vec![z(), z(), z(), o(), z(), z()],
        vec![z(), z(), o(), z(), z(), z()],
        vec![z(), z(), z(), z(), z(), o()],
        vec![z(), z(), z(), z(), o(), z()],
    ]);
    let mut cfg = OrbifoldConfig {
        b1: 2,
        b2: n,
        euler: 4,
        pairing,
        ..OrbifoldConfig::empty()
    };
    cfg.surfaces
        .push(SurfaceData::new("T1", 1, z()).with_qclass(unit(n, 0)));
    for s in ["S1", "S2"] {
        cfg.surfaces
            .push(SurfaceData::new(s, 0, z()).with_qclass(unit(n, 1)));
    }
    for f in Y_FIBERS {
        cfg.surfaces
            .push(SurfaceData::new(format!("Tp{f}"), 1, z()).with_qclass(scaled(n, 1, 2)));
    }
    for i in 1..=4 {
        cfg.surfaces
            .push(SurfaceData::new(format!("U{i}"), 1, z()).with_qclass(unit(n, i + 1)));
    }
    cfg.points.push(SingularPointData::double_point(
        "y11",
        vec!["T1".into(), "S1".into()],
    ));
    cfg.points.push(SingularPointData::double_point(
        "y21",
        vec!["T1".into(), "S2".into()],
    ));
    for (s, pre) in [("S1", "y1"), ("S2", "y2")] {
        for k in 2..=4 {
            cfg.points.push(SingularPointData::double_point(
                format!("{pre}{k}"),
                vec![s.into()],
            ));
        }
    }
    cfg.events
        .push(IntersectionEvent::new("T1", "S1", singular("y11")));
    cfg.events
        .push(IntersectionEvent::new("T1", "S2", singular("y21")));
    for f in Y_FIBERS {
        cfg.events.push(IntersectionEvent::new(
            "T1",
            format!("Tp{f}"),
            smooth(&format!("p{f}")),
        ));
    }
    cfg.events
        .push(IntersectionEvent::new("U1", "U2", smooth("u12")));
    cfg.events
        .push(IntersectionEvent::new("U3", "U4", smooth("u34")));
    let classes = vec![
        scaled(n, 0, 2),
        scaled(n, 1, 2),
        unit(n, 2),
        unit(n, 3),
        unit(n, 4),
        unit(n, 5),
    ];
    cfg.integral_pairing =
        Some(integral_pairing_from_classes(&cfg, &classes).expect("block Y classes are integral"));
    cfg
}

/// `ℂP²` with a cubic `C` and two lines `L`, `L′` (id `Lp`) meeting at
/// `s0 ∈ C`. The other points of `L ∩ C` are `l1`, `l2`; those of
/// `L′ ∩ C` are `s1p`, `s1pp`.
pub fn block_w_start() -> OrbifoldConfig {
    let mut cfg = OrbifoldConfig {
        b2: 1,
        euler: 3,
        pairing: RatMatrix::identity(1),
        ..OrbifoldConfig::empty()
    };
    cfg.surfaces
        .push(SurfaceData::new("C", 1, rat(9, 1)).with_qclass(vec![rat(3, 1)]));
    cfg.surfaces
        .push(SurfaceData::new("L", 0, rat(1, 1)).with_qclass(vec![rat(1, 1)]));
    cfg.surfaces
        .push(SurfaceData::new("Lp", 0, rat(1, 1)).with_qclass(vec![rat(1, 1)]));
    cfg.events
        .push(IntersectionEvent::new("L", "Lp", smooth("s0")));
    for l in ["s0", "l1", "l2"] {
        cfg.events.push(IntersectionEvent::new("C", "L", smooth(l)));
    }
    for l in ["s0", "s1p", "s1pp"] {
        cfg.events
            .push(IntersectionEvent::new("C", "Lp", smooth(l)));
    }
    cfg.integral_pairing = Some(IntMatrix::from_rows(&[vec![3, 1, 1]]));
    cfg
}

/// The chain `ℂP² → … → W′`: blow up `s0` and then `E ∩ L`, blow down the
/// (−2)-curve `E` to `s1`, blow up a point of `L ∩ C`, blow down `L` to
/// `s2`. The second exceptional curve is not tracked.
pub fn build_block_w_prime() -> Surgery {
    let mut s = Surgery::new(block_w_start());
    s.blow_up("s0", &["C", "L", "Lp"], "E")
        .and_then(|s| s.blow_up(&exceptional_label("E", "L"), &["E", "L"], "Ep"))
        .and_then(|s| s.forget("Ep"))
        .and_then(|s| s.blow_down("E", "s1"))
        .and_then(|s| s.blow_up("l1", &["L", "C"], "A2"))
        .and_then(|s| s.blow_down("L", "s2"))
        .and_then(|s| s.rename("Lp", "A1"))
        .expect("block W chain is well formed");
    s
}

/// `W′` blown up at eight further points `s3..s10` of `C`.
pub fn build_block_w_surgery() -> Surgery {
    let mut s = build_block_w_prime();
    for i in 3..=10 {
        s.blow_up(&format!("s{i}"), &["C"], &format!("E{i}"))
            .expect("points of C are regular");
    }
    s
}

pub fn build_block_w() -> OrbifoldConfig {
    build_block_w_surgery().finish().0
}

/// Gluing `Y` and `W` along `T₁ = C`.
pub fn z_gluing_plan() -> GluingPlan {
    let mut matching = vec![
        (singular("y11"), singular("s1")),
        (singular("y21"), singular("s2")),
    ];
    for i in 3..=10 {
        matching.push((
            smooth(&format!("p{i}")),
            smooth(&exceptional_label(&format!("E{i}"), "C")),
        ));
    }
    matching.push((smooth("p1a"), smooth("s1p")));
    matching.push((smooth("p1b"), smooth("s1pp")));
    matching.push((smooth("p2a"), smooth(&exceptional_label("A2", "C"))));
    let mut joins = vec![
        Join {
            output: "V1".into(),
            from_a: vec!["S1".into(), "Tp1a".into(), "Tp1b".into()],
            from_b: vec!["A1".into()],
        },
        Join {
            output: "V2".into(),
            from_a: vec!["S2".into(), "Tp2a".into()],
            from_b: vec!["A2".into()],
        },
    ];
    for i in 3..=10 {
        joins.push(Join {
            output: format!("V{i}"),
            from_a: vec![format!("Tp{i}")],
            from_b: vec![format!("E{i}")],
        });
    }
    let mut basis: Vec<String> = (1..=10).map(|i| format!("V{i}")).collect();
    basis.extend((1..=4).map(|i| format!("U{i}")));
    GluingPlan {
        fiber_a: "T1".into(),
        fiber_b: "C".into(),
        point_matching: matching,
        joins,
        basis,
        b1: 0,
        b2: 14,
    }
}

/// `Z′ = Y #_{T₁ = C} W`.
pub fn build_z_prime() -> Surgery {
    let mut s = Surgery::new(build_block_y());
    s.apply(SurgeryOp::FiberSum {
        other: Box::new(build_block_w()),
        plan: z_gluing_plan(),
    })
    .expect("the Y/W gluing plan is consistent");
    s
}

/// `P[r][i] = ⟨β_r, V_i⟩` for `β = (2V₁, 2V₂, V₃, …, V₁₆)`.
pub fn default_z_integral_pairing(cfg: &OrbifoldConfig) -> Result<IntMatrix, SurgeryError> {
    let n = cfg.b2;
    let classes: Vec<Vec<Rational>> = (0..n)
        .map(|i| if i < 2 { scaled(n, i, 2) } else { unit(n, i) })
        .collect();
    integral_pairing_from_classes(cfg, &classes)
}

/// `Z` with isotropy `mᵢ = pⁱ`, `jᵢ = 1` on `V₁..V₁₆`, together with the log of
/// its construction from `Y`.
pub fn build_z_with_log(p: &Int) -> Result<(OrbifoldConfig, SurgeryLog), SurgeryError> {
    if !is_prime(p) {
        return Err(SurgeryError::NotPrime(p.clone()));
    }
    let mut s = build_z_prime();
    s.resolve_torus_pair("U1", "U2", "W1", "X1")?
        .resolve_torus_pair("U3", "U4", "W2", "X2")?
        .forget("X1")?
        .forget("X2")?;
    for i in 1..=4 {
        s.rename(&format!("U{i}"), &format!("V{}", 10 + i))?;
    }
    s.rename("W1", "V15")?.rename("W2", "V16")?;
    s.apply(SurgeryOp::Rebase {
        basis: (1..=16).map(|i| format!("V{i}")).collect(),
    })?;
    let mut m = Int::one();
    for i in 1..=16 {
        m *= p;
        s.apply(SurgeryOp::SetIsotropy {
            surface: format!("V{i}"),
            m: m.clone(),
            j: int(1),
        })?;
    }
    let matrix = default_z_integral_pairing(s.config())?;
    s.apply(SurgeryOp::SetIntegralPairing { matrix })?;
    Ok(s.finish())
}

pub fn build_z(p: &Int) -> Result<OrbifoldConfig, SurgeryError> {
    build_z_with_log(p).map(|(c, _)| c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orbmodel::validate_config;

    #[test]
    fn block_y_data() {
        let y = build_block_y();
        assert!(validate_config(&y).is_empty(), "{:?}", validate_config(&y));
        assert_eq!((y.euler, y.b1, y.b2, y.points.len()), (4, 2, 6, 8));
        assert_eq!(y.local_intersection("U1", "U2"), rat(1, 1));
        assert_eq!(2 * y.euler - 8, 0);
    }

    #[test]
    fn block_w_chain() {
        let wp = build_block_w_prime();
        let cfg = wp.config();
        assert!(
            validate_config(cfg).is_empty(),
            "{:?}",
            validate_config(cfg)
        );
        assert_eq!((cfg.b2, cfg.euler), (2, 4));
        assert_eq!(cfg.surface("C").unwrap().self_intersection, rat(8, 1));
        let traj = wp.log().self_intersection_trajectory("C");
        assert_eq!(
            traj,
            vec![
                rat(9, 1),
                rat(8, 1),
                rat(8, 1),
                rat(17, 2),
                rat(15, 2),
                rat(8, 1)
            ]
        );
        let w = build_block_w();
        assert!(validate_config(&w).is_empty(), "{:?}", validate_config(&w));
        assert_eq!(w.euler, 12);
        assert_eq!(w.surface("C").unwrap().self_intersection, rat(0, 1));
        assert_eq!(w.surface("A1").unwrap().self_intersection, rat(1, 2));
        assert_eq!(w.surface("A2").unwrap().self_intersection, rat(-1, 2));
        assert_eq!(w.points.len(), 2);
    }

    #[test]
    fn z_prime_sum() {
        let s = build_z_prime();
        let z = s.config();
        assert!(validate_config(z).is_empty(), "{:?}", validate_config(z));
        assert_eq!((z.euler, z.b1, z.b2), (16, 0, 14));
        assert_eq!(z.surface("V1").unwrap().genus, 2);
        assert_eq!(z.surface("V1").unwrap().self_intersection, rat(1, 2));
        assert_eq!(z.surface("V2").unwrap().genus, 1);
        assert_eq!(z.surface("V7").unwrap().self_intersection, rat(-1, 1));
    }

    #[test]
    fn z_assembled() {
        let (z, log) = build_z_with_log(&int(3)).unwrap();
        assert!(validate_config(&z).is_empty(), "{:?}", validate_config(&z));
        assert_eq!((z.euler, z.b1, z.b2, z.surfaces.len()), (18, 0, 16, 16));
        assert_eq!(log.replay().unwrap(), z);
        let mut expected = vec![rat(1, 2), rat(-1, 2)];
        expected.extend(std::iter::repeat_n(rat(-1, 1), 12));
        expected.extend([rat(1, 1), rat(1, 1)]);
        let sq: Vec<_> = z
            .surfaces
            .iter()
            .map(|s| s.self_intersection.clone())
            .collect();
        assert_eq!(sq, expected);
        assert_eq!(z.pairing, RatMatrix::diagonal(&expected));
        let genus: Vec<u32> = z.surfaces.iter().map(|s| s.genus).collect();
        assert_eq!(genus.iter().filter(|g| **g == 2).count(), 3);
        assert_eq!(genus.iter().filter(|g| **g == 1).count(), 13);
        assert!(z.events.is_empty());
        let ip = z.integral_pairing.as_ref().unwrap();
        let mut diag = vec![int(1), int(-1)];
        diag.extend(std::iter::repeat_n(int(-1), 12));
        diag.extend([int(1), int(1)]);
        assert_eq!(*ip, IntMatrix::diagonal(&diag));
        assert!(build_z(&int(4)).is_err());
    }
}
