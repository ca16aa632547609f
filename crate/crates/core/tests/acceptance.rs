//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::time::Instant;

use num_traits::{One, Zero};
use rand::Rng;

use orbiseifert::exactmath::{int, mod_inverse, rat, smith_normal_form, Int, IntMatrix, Rational};
use orbiseifert::fpgroup::{
    abelianize, build_pi1_orb_presentation, coset_enumerate, simply_connected_decision,
    CosetStatus, Presentation,
};
use orbiseifert::orbmodel::{
    assign_local_invariants, check_compatibility, OrbifoldConfig, SingularPointData, SurfaceData,
};
use orbiseifert::seifert::{
    check_surjectivity_onto_torsion, h1_zero_decision, h2_of_m, search_background_class,
    AbelianGroup, ParityMode, SearchOptions, SeifertSpec,
};
use orbiseifert::spin_smale::{
    gk_check, pi_star_kernel, smale_barden_report, spin_decision, spin_parity_target,
    w2_base_class, BardenInvariant,
};
use orbiseifert::surgery::{
    build_block_w, build_block_w_prime, build_block_y, build_z, build_z_prime,
};

type Check = Result<(), String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn to_matrix(rows: &[Vec<i64>]) -> IntMatrix {
    IntMatrix::from_rows(rows)
}

fn criterion_1_blocks() -> Check {
    let y = build_block_y();
    ensure!(
        (y.euler, y.b1, y.b2) == (4, 2, 6),
        "Y: chi, b1, b2 = {}, {}, {}",
        y.euler,
        y.b1,
        y.b2
    );
    let doubles = y.points.iter().filter(|p| p.order == int(2)).count();
    ensure!(
        y.points.len() == 8 && doubles == 8,
        "Y has {} points",
        y.points.len()
    );
    let wp = build_block_w_prime();
    let wp = wp.config();
    ensure!(
        (wp.b2, wp.euler) == (2, 4),
        "W': b2 = {}, chi = {}",
        wp.b2,
        wp.euler
    );
    let w = build_block_w();
    ensure!(w.euler == 12, "chi(W) = {}", w.euler);
    let sq = |id: &str| w.surface(id).map(|s| s.self_intersection.clone());
    ensure!(sq("C") == Some(Rational::zero()), "C^2 = {:?}", sq("C"));
    ensure!(sq("A1") == Some(rat(1, 2)), "A1^2 = {:?}", sq("A1"));
    ensure!(sq("A2") == Some(rat(-1, 2)), "A2^2 = {:?}", sq("A2"));
    Ok(())
}

fn criterion_2_gompf() -> Check {
    let zp = build_z_prime();
    ensure!(zp.config().euler == 16, "chi(Z') = {}", zp.config().euler);
    let z = build_z(&int(3)).map_err(|e| e.to_string())?;
    ensure!(z.b2 == 16, "b2(Z) = {}", z.b2);
    let mut genus: Vec<u32> = z.surfaces.iter().map(|s| s.genus).collect();
    genus.sort_unstable();
    let mut want = vec![1; 13];
    want.extend([2, 2, 2]);
    ensure!(genus == want, "genus multiset {genus:?}");
    let mut sq_want = vec![rat(1, 2), rat(-1, 2)];
    sq_want.extend(std::iter::repeat_n(rat(-1, 1), 12));
    sq_want.extend([rat(1, 1), rat(1, 1)]);
    let sq: Vec<Rational> = (1..=16)
        .map(|i| {
            z.surface(&format!("V{i}"))
                .map(|s| s.self_intersection.clone())
                .unwrap_or_else(|| rat(999, 1))
        })
        .collect();
    ensure!(sq == sq_want, "self-intersections {sq:?}");
    ensure!(
        z.events.is_empty(),
        "{} intersection events",
        z.events.len()
    );
    for a in &z.surfaces {
        for b in &z.surfaces {
            if a.id != b.id {
                ensure!(
                    z.local_intersection(&a.id, &b.id).is_zero(),
                    "{} meets {}",
                    a.id,
                    b.id
                );
            }
        }
    }
    Ok(())
}

fn criterion_3_blow_down() -> Check {
    let wp = build_block_w_prime();
    let traj = wp.log().self_intersection_trajectory("C");
    let want = vec![
        rat(9, 1),
        rat(8, 1),
        rat(8, 1),
        rat(17, 2),
        rat(15, 2),
        rat(8, 1),
    ];
    ensure!(traj == want, "C^2 trajectory {traj:?}");
    Ok(())
}

fn check_points(cfg: &OrbifoldConfig) -> Check {
    let table = assign_local_invariants(cfg).map_err(|e| e.to_string())?;
    ensure!(table.len() == cfg.points.len(), "missing points");
    for p in &cfg.points {
        let pli = &table[&p.id];
        ensure!(pli.is_consistent(), "{} inconsistent: {pli:?}", p.id);
        for s in &p.incident {
            let surf = cfg.surface(s).ok_or("unknown surface")?;
            let ok = check_compatibility(pli, p, surf).map_err(|e| e.to_string())?;
            ensure!(ok, "{} incompatible with {s}", p.id);
        }
    }
    Ok(())
}

fn criterion_4_local() -> Check {
    for p in [3, 5] {
        let z = build_z(&int(p)).map_err(|e| e.to_string())?;
        ensure!(z.points.len() >= 2, "Z has {} points", z.points.len());
        check_points(&z)?;
    }
    let mut rng = common::rng(4);
    let mut tried = 0;
    while tried < 200 {
        let n: i64 = rng.gen_range(2..=30);
        let j: i64 = rng.gen_range(1..n);
        let d: i64 = rng.gen_range(2..=50);
        let e1: i64 = rng.gen_range(1..d);
        let e2: i64 = rng.gen_range(1..d);
        let coprime = |a: i64, b: i64| common::gcd_i128(a as i128, b as i128) == 1;
        if !coprime(j, n) || !coprime(e1, d) || !coprime(e2, d) {
            continue;
        }
        tried += 1;
        let mut cfg = OrbifoldConfig::empty();
        cfg.surfaces
            .push(SurfaceData::new("D", 1, Rational::zero()).with_isotropy(int(n), int(j)));
        cfg.points.push(SingularPointData {
            id: "x".into(),
            order: int(d),
            exponents: (int(e1), int(e2)),
            incident: vec!["D".into()],
        });
        check_points(&cfg).map_err(|e| format!("(n,j,d,e)=({n},{j},{d},{e1},{e2}): {e}"))?;
        let pli = &assign_local_invariants(&cfg).map_err(|e| e.to_string())?["x"];
        let (m, j1, j2) =
            common::local_triple_oracle(n as i128, j as i128, d as i128, e1 as i128, e2 as i128);
        let got = (pli.m.clone(), pli.j1.clone(), pli.j2.clone());
        ensure!(
            got == (Int::from(m), Int::from(j1), Int::from(j2)),
            "(n,j,d,e)=({n},{j},{d},{e1},{e2}): got {got:?}, oracle ({m},{j1},{j2})"
        );
    }
    Ok(())
}

fn z_spec(p: i64, opts: &SearchOptions) -> Result<SeifertSpec, String> {
    let z = build_z(&int(p)).map_err(|e| e.to_string())?;
    search_background_class(&z, opts).map_err(|e| e.to_string())
}

fn random_torsion_config(
    rng: &mut rand::rngs::StdRng,
) -> (OrbifoldConfig, Vec<Vec<i64>>, Vec<i64>) {
    loop {
        let b2 = rng.gen_range(1..=4);
        let k = rng.gen_range(1..=3);
        let moduli: Vec<i64> = (0..k).map(|_| rng.gen_range(2..=21)).collect();
        if moduli.iter().product::<i64>() > 10_000 {
            continue;
        }
        let pairing: Vec<Vec<i64>> = (0..b2)
            .map(|_| (0..k).map(|_| rng.gen_range(-6..=6)).collect())
            .collect();
        let mut cfg = OrbifoldConfig::empty();
        cfg.b2 = b2;
        for (i, m) in moduli.iter().enumerate() {
            cfg.surfaces.push(
                SurfaceData::new(format!("D{i}"), 1, Rational::zero())
                    .with_isotropy(int(*m), Int::one()),
            );
        }
        cfg.integral_pairing = Some(to_matrix(&pairing));
        return (cfg, pairing, moduli);
    }
}

fn criterion_5_seifert() -> Check {
    let spec = z_spec(3, &SearchOptions::default())?;
    let b16 = spec.b_residues.get("V16").cloned();
    ensure!(b16 == Some(Int::one()), "b16 = {b16:?}");
    let d = h1_zero_decision(&spec).map_err(|e| e.to_string())?;
    ensure!(d.holds, "h1 decision {d:?}");
    let h2 = h2_of_m(&spec).map_err(|e| e.to_string())?;
    let mut orders = Vec::new();
    for (i, s) in spec.base.surfaces.iter().enumerate() {
        let m: Int = num_traits::pow(int(3), i + 1);
        ensure!(s.multiplicity == m, "{}: m = {}", s.id, s.multiplicity);
        orders.extend(std::iter::repeat_n(m, 2 * s.genus as usize));
    }
    let want = AbelianGroup::from_cyclic(15, &orders).map_err(|e| e.to_string())?;
    ensure!(h2 == want, "H2 = {h2}, expected {want}");

    let mut rng = common::rng(5);
    for _ in 0..300 {
        let (cfg, pairing, moduli) = random_torsion_config(&mut rng);
        let got = check_surjectivity_onto_torsion(&cfg).map_err(|e| e.to_string())?;
        let want = common::surjective_oracle(&pairing, &moduli);
        ensure!(
            got == want,
            "pairing {pairing:?} moduli {moduli:?}: {got} vs {want}"
        );
    }
    Ok(())
}

fn criterion_6_spin() -> Check {
    // p = 2: every multiplicity is even, so ker π* is spanned by the columns
    // of the integral pairing mod 2; full rank makes every class spin.
    let spec2 = z_spec(2, &SearchOptions::default())?;
    let kernel = pi_star_kernel(&spec2).map_err(|e| e.to_string())?;
    ensure!(kernel.even_case, "p = 2 kernel not in the even case");
    ensure!(
        kernel.dimension() == 16,
        "kernel dimension {}",
        kernel.dimension()
    );
    let w2 = w2_base_class(&spec2.base).map_err(|e| e.to_string())?;
    let mut rng = common::rng(6);
    let mut specs = vec![spec2.clone()];
    while specs.len() < 40 {
        let c: Vec<Int> = (0..16).map(|_| int(rng.gen_range(-4..=4))).collect();
        let s = SeifertSpec::new(spec2.base.clone(), c).map_err(|e| e.to_string())?;
        if h1_zero_decision(&s).map(|d| d.holds).unwrap_or(false) {
            specs.push(s);
        }
    }
    for s in &specs {
        for a in w2.assignments() {
            let v = spin_decision(s, &a).map_err(|e| e.to_string())?;
            ensure!(v.spin, "p = 2, c1B {:?}, {a:?}: non-spin", s.c1b);
        }
    }

    // p = 3: for each assignment, a spin and a non-spin background class
    let z3 = build_z(&int(3)).map_err(|e| e.to_string())?;
    let assignments = w2_base_class(&z3).map_err(|e| e.to_string())?.assignments();
    ensure!(assignments.len() == 4, "{} assignments", assignments.len());
    for a in &assignments {
        let alpha = spin_parity_target(&z3, a).map_err(|e| e.to_string())?;
        for (mode, want) in [(ParityMode::Equal, true), (ParityMode::NotEqual, false)] {
            let opts = SearchOptions {
                parity: Some((alpha.clone(), mode)),
                ..SearchOptions::default()
            };
            let s = search_background_class(&z3, &opts).map_err(|e| e.to_string())?;
            ensure!(
                h1_zero_decision(&s).map(|d| d.holds).unwrap_or(false),
                "found spec fails H1"
            );
            let v = spin_decision(&s, a).map_err(|e| e.to_string())?;
            ensure!(v.spin == want, "p = 3, {a:?}, {mode:?}: spin = {}", v.spin);
        }
    }
    Ok(())
}

fn criterion_7_smale_barden() -> Check {
    let spec = z_spec(3, &SearchOptions::default())?;
    for spin in [true, false] {
        let d = smale_barden_report(&spec, spin).map_err(|e| e.to_string())?;
        ensure!(d.k == 15, "k = {}", d.k);
        ensure!(d.t_max == 16 && d.t_max == d.k + 1, "t = {}", d.t_max);
        ensure!(d.c_max == 2, "c = {}", d.c_max);
        ensure!(
            matches!(d.i_m, BardenInvariant::Zero | BardenInvariant::Infinity),
            "i(M) = {}",
            d.i_m
        );
        ensure!(gk_check(&d), "G-K fails for spin = {spin}");
    }
    Ok(())
}

fn criterion_8_pi1() -> Check {
    let p = build_pi1_orb_presentation(&int(3), 16).map_err(|e| e.to_string())?;
    let table = coset_enumerate(&p, &[], 10_000);
    let n = match table.status {
        CosetStatus::Complete(n) => n,
        s => return Err(format!("enumeration {s:?}")),
    };
    ensure!(4 % n == 0, "index {n}");
    ensure!(table.verify(&p, &[]), "table fails relator replay");
    let ab = abelianize(&p);
    let klein = AbelianGroup::from_cyclic(0, &[int(2), int(2)]).map_err(|e| e.to_string())?;
    ensure!(ab.is_quotient_of_finite(&klein), "abelianization {ab}");
    let spec = z_spec(3, &SearchOptions::default())?;
    let h1 = h1_zero_decision(&spec).map_err(|e| e.to_string())?.holds;
    let sc = simply_connected_decision(&table, h1).map_err(|e| e.to_string())?;
    ensure!(sc, "not simply connected");

    for g in common::small_groups() {
        let pres = Presentation::parse(g.gens, g.rels).map_err(|e| e.to_string())?;
        for r in &pres.relators {
            let img = common::eval_word(r.letters(), &g.perms);
            ensure!(
                img.iter().enumerate().all(|(i, x)| i == *x),
                "{}: oracle permutations violate a relator",
                g.name
            );
        }
        let order = common::closure_order(&g.perms);
        let t = coset_enumerate(&pres, &[], 10_000);
        ensure!(
            t.status == CosetStatus::Complete(order),
            "{}: {:?}, oracle {order}",
            g.name,
            t.status
        );
    }
    Ok(())
}

fn criterion_9_exactmath() -> Check {
    let mut rng = common::rng(9);
    for case in 0..500 {
        let rows = rng.gen_range(1..=8);
        let cols = rng.gen_range(1..=8);
        let raw = common::random_matrix(&mut rng, rows, cols, 20);
        let a = to_matrix(&raw);
        let snf = smith_normal_form(&a);
        ensure!(
            snf.u.is_unimodular() && snf.v.is_unimodular(),
            "case {case}: U or V not unimodular"
        );
        ensure!(
            snf.u.mul(&a).mul(&snf.v) == snf.d,
            "case {case}: U·A·V != D"
        );
        for r in 0..rows {
            for c in 0..cols {
                ensure!(
                    r == c || snf.d[(r, c)].is_zero(),
                    "case {case}: D not diagonal"
                );
            }
        }
        let f = snf.invariant_factors();
        ensure!(
            f.windows(2).all(|w| (&w[1] % &w[0]).is_zero()) && f.iter().all(|x| *x > Int::zero()),
            "case {case}: factors {f:?}"
        );
        let p = to_matrix(&common::random_unimodular(&mut rng, rows, 12));
        let q = to_matrix(&common::random_unimodular(&mut rng, cols, 12));
        let g = smith_normal_form(&p.mul(&a).mul(&q)).invariant_factors();
        ensure!(g == f, "case {case}: PAQ factors {g:?} vs {f:?}");
    }
    let mut pairs = 0;
    while pairs < 10_000 {
        let m: i64 = rng.gen_range(2..=1_000_000);
        let a: i64 = rng.gen_range(-1_000_000..=1_000_000);
        let Some(want) = common::inverse_oracle(a as i128, m as i128) else {
            ensure!(
                mod_inverse(&int(a), &int(m)).is_err(),
                "{a} mod {m} should fail"
            );
            continue;
        };
        pairs += 1;
        let got = mod_inverse(&int(a), &int(m)).map_err(|e| e.to_string())?;
        ensure!(got == Int::from(want), "{a}^-1 mod {m}: {got} vs {want}");
        ensure!(
            ((int(a) * &got) % int(m) + int(m)) % int(m) == Int::one(),
            "{a}·{got} != 1 mod {m}"
        );
    }
    Ok(())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 9] = [
        ("1 building blocks Y and W", criterion_1_blocks),
        ("2 Gompf sum and Z", criterion_2_gompf),
        ("3 blow-down trajectory of C", criterion_3_blow_down),
        ("4 local invariants", criterion_4_local),
        (
            "5 Seifert invariants (default lattice model)",
            criterion_5_seifert,
        ),
        ("6 spin / non-spin", criterion_6_spin),
        (
            "7 G-K and Smale-Barden invariants",
            criterion_7_smale_barden,
        ),
        ("8 fundamental group", criterion_8_pi1),
        ("9 exactmath properties", criterion_9_exactmath),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panic: {msg}"))
        });
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(()) => println!("PASS  criterion {name} ({ms} ms)"),
            Err(e) => {
                failed += 1;
                println!("FAIL  criterion {name} ({ms} ms): {e}");
            }
        }
    }
    let _ = panic::take_hook();
    if failed > 0 {
        println!("{failed} criterion(s) failed");
        std::process::exit(1);
    }
}
