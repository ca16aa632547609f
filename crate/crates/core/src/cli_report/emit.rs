//! Report rendering.
//!
//! The structured format is one `key = value` per line, keys dotted and
//! indexed (`config.surface[0]`), lists in brackets with space-separated
//! items, first line `schema = orbiseifert-report/1`. Every value is
//! produced from ordered data, so equal reports render byte-identically.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use super::pipeline::{Pi1Section, Report, SbEntry, Stage};
use crate::exactmath::{fmt_rat, Int};
use crate::fpgroup::CosetStatus;

pub const SCHEMA: &str = "orbiseifert-report/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Human,
    Structured,
}

impl Format {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "human" => Some(Format::Human),
            "structured" => Some(Format::Structured),
            _ => None,
        }
    }
}

pub fn emit_report(r: &Report, format: Format) -> String {
    match format {
        Format::Human => human(r),
        Format::Structured => structured(r),
    }
}

fn list<T: ToString>(v: &[T]) -> String {
    format!(
        "[{}]",
        v.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    )
}

fn bits(v: &[u8]) -> String {
    v.iter().map(|b| b.to_string()).collect()
}

fn assignment(a: &BTreeMap<String, u8>) -> String {
    if a.is_empty() {
        return "-".into();
    }
    a.iter()
        .map(|(k, v)| format!("{k}:{v}"))
        .collect::<Vec<_>>()
        .join(",")
}

fn profile(p: &BTreeMap<(Int, u32), usize>) -> String {
    list(
        &p.iter()
            .map(|((q, i), c)| format!("{q}^{i}:{c}"))
            .collect::<Vec<_>>(),
    )
}

fn cosets(s: &CosetStatus) -> String {
    match s {
        CosetStatus::Complete(n) => format!("complete {n}"),
        CosetStatus::Exhausted(b) => format!("exhausted {b}"),
    }
}

fn status<T>(s: &Stage<T>) -> String {
    match s {
        Ok(_) => "ok".into(),
        Err(e) => format!("error: {e}"),
    }
}

fn sb_line(e: &SbEntry) -> String {
    format!(
        "spin={} k={} i={} t_max={} c_max={} gk={}",
        e.spin, e.data.k, e.data.i_m, e.data.t_max, e.data.c_max, e.gk
    )
}

/// Renders a coset enumeration on its own.
pub fn emit_group(p: &Pi1Section, format: Format) -> String {
    match format {
        Format::Human => group_human(p),
        Format::Structured => {
            let mut o = format!("schema = {SCHEMA}\n");
            for (k, v) in group_pairs(p) {
                let _ = writeln!(o, "{k} = {v}");
            }
            o
        }
    }
}

fn group_pairs(p: &Pi1Section) -> Vec<(String, String)> {
    let mut out = vec![
        ("pi1.source".to_string(), p.source.to_string()),
        (
            "pi1.generators".into(),
            p.presentation.num_generators().to_string(),
        ),
        (
            "pi1.relators".into(),
            p.presentation.relators.len().to_string(),
        ),
        ("pi1.subgroup".into(), p.subgroup.len().to_string()),
        ("pi1.cosets".into(), cosets(&p.status)),
        ("pi1.defined".into(), p.defined.to_string()),
        ("pi1.replay".into(), p.replay_ok.to_string()),
        ("pi1.abelianization".into(), p.abelianization.to_string()),
        ("pi1.simplified".into(), p.simplified.to_string()),
    ];
    if p.dump {
        for (i, row) in p.table.rows.iter().enumerate() {
            out.push((format!("pi1.table[{i}]"), list(row)));
        }
    }
    out
}

fn group_human(p: &Pi1Section) -> String {
    let mut o = String::new();
    let _ = writeln!(
        o,
        "{} presentation: {} generators, {} relators",
        p.source,
        p.presentation.num_generators(),
        p.presentation.relators.len()
    );
    let _ = writeln!(
        o,
        "cosets: {} ({} defined, relator replay {})",
        cosets(&p.status),
        p.defined,
        if p.replay_ok { "ok" } else { "not checked" }
    );
    let _ = writeln!(o, "abelianization: {}", p.abelianization);
    let _ = writeln!(o, "simplified: {}", p.simplified);
    if p.dump {
        o.push_str(&p.table.render(&p.presentation));
    }
    o
}

fn structured(r: &Report) -> String {
    let mut o = String::new();
    let mut kv = |k: &str, v: String| {
        let _ = writeln!(o, "{k} = {v}");
    };
    kv("schema", SCHEMA.into());
    kv("scenario", r.label.clone());
    let s = &r.summary;
    kv("config.euler", s.euler.to_string());
    kv("config.b1", s.b1.to_string());
    kv("config.b2", s.b2.to_string());
    kv("config.surface_count", s.surfaces.len().to_string());
    for (i, x) in s.surfaces.iter().enumerate() {
        kv(
            &format!("config.surface[{i}]"),
            format!(
                "id={} genus={} m={} j={} sq={}",
                x.id,
                x.genus,
                x.multiplicity,
                x.j,
                fmt_rat(&x.self_intersection)
            ),
        );
    }
    kv("config.point_count", s.points.len().to_string());
    for (i, p) in s.points.iter().enumerate() {
        kv(
            &format!("config.point[{i}]"),
            format!(
                "id={} order={} exp={},{} incident={}",
                p.id,
                p.order,
                p.exponents.0,
                p.exponents.1,
                p.incident.join(",")
            ),
        );
    }
    kv("config.event_count", s.events.to_string());
    kv("config.violation_count", r.violations.len().to_string());
    for (i, v) in r.violations.iter().enumerate() {
        kv(&format!("config.violation[{i}]"), v.clone());
    }

    kv("local.status", status(&r.local));
    if let Ok(rows) = &r.local {
        for (i, row) in rows.iter().enumerate() {
            let p = &row.invariant;
            let compat: Vec<String> = row
                .compatible
                .iter()
                .map(|(s, ok)| format!("{s}:{ok}"))
                .collect();
            kv(
                &format!("local[{i}]"),
                format!(
                    "point={} m={} j1={} j2={} m1={} m2={} d={} e1={} e2={} compatible={}",
                    p.point_id,
                    p.m,
                    p.j1,
                    p.j2,
                    p.m1,
                    p.m2,
                    p.d,
                    p.e1,
                    p.e2,
                    compat.join(",")
                ),
            );
        }
    }

    kv("seifert.status", status(&r.seifert));
    if let Ok(sf) = &r.seifert {
        kv("seifert.c1b_source", sf.c1b_source.into());
        kv("seifert.c1b", list(&sf.spec.c1b));
        let res: Vec<String> = sf
            .spec
            .b_residues
            .iter()
            .map(|(k, v)| format!("{k}:{v}"))
            .collect();
        kv("seifert.residues", list(&res));
        let d = &sf.decision;
        kv("seifert.order", d.order.to_string());
        kv("seifert.scaled_chern", list(&d.scaled_chern));
        kv("seifert.b1_zero", d.b1_zero.to_string());
        kv("seifert.torsion_map_factors", list(&sf.torsion_map_factors));
        kv("seifert.surjective", d.surjective.to_string());
        kv("seifert.primitive", d.primitive.to_string());
        kv("seifert.h1_zero", d.holds.to_string());
        match &sf.h2 {
            Some(h) => {
                kv("seifert.h2", h.to_string());
                kv("seifert.h2_rank", h.rank.to_string());
                kv("seifert.h2_profile", profile(&h.prime_power_profile()));
            }
            None => kv("seifert.h2", "-".into()),
        }
    }

    kv("spin.status", status(&r.spin));
    if let Ok(sp) = &r.spin {
        let u: Vec<String> = sp
            .unknowns
            .iter()
            .map(|(n, s)| format!("{n}:{s}"))
            .collect();
        kv("spin.unknowns", list(&u));
        kv("spin.w2_determined", bits(&sp.w2_determined));
        kv("spin.kernel_even_case", sp.kernel.even_case.to_string());
        let k: Vec<String> = sp.kernel.generators.iter().map(|g| bits(g)).collect();
        kv("spin.kernel", list(&k));
        kv("spin.selected", assignment(&sp.selected));
        for (i, row) in sp.rows.iter().enumerate() {
            kv(
                &format!("spin.row[{i}]"),
                format!(
                    "assign={} spin={} tested={}",
                    assignment(&row.assignment),
                    row.spin,
                    bits(&row.tested)
                ),
            );
        }
    }

    kv("smale_barden.status", status(&r.smale_barden));
    if let Ok(entries) = &r.smale_barden {
        for (i, e) in entries.iter().enumerate() {
            kv(&format!("smale_barden[{i}]"), sb_line(e));
            let t: Vec<String> = e.data.t.iter().map(|(p, n)| format!("{p}:{n}")).collect();
            kv(&format!("smale_barden[{i}].t"), list(&t));
            kv(
                &format!("smale_barden[{i}].c"),
                profile(&e.data.torsion_profile),
            );
        }
    }

    match &r.pi1 {
        None => kv("pi1.status", "not run".into()),
        Some(st) => {
            kv("pi1.status", status(st));
            if let Ok(p) = st {
                for (k, v) in group_pairs(p) {
                    kv(&k, v);
                }
            }
        }
    }
    match &r.simply_connected {
        None => kv("simply_connected", "not run".into()),
        Some(Ok(v)) => kv("simply_connected", v.to_string()),
        Some(Err(e)) => kv("simply_connected", format!("error: {e}")),
    }

    kv("log.count", r.log.len().to_string());
    for (i, l) in r.log.iter().enumerate() {
        kv(
            &format!("log[{i}]"),
            format!(
                "{} | euler {}->{} b2 {}->{} | {}",
                l.op,
                l.euler.0,
                l.euler.1,
                l.b2.0,
                l.b2.1,
                l.deltas.join("; ")
            ),
        );
        if let Some(a) = &l.asserted {
            kv(&format!("log[{i}].asserted"), a.clone());
        }
    }
    for v in &r.verdicts {
        kv(&format!("verdict.{}", v.name), v.status.as_str().into());
    }
    kv("exit", r.exit_code().to_string());
    o
}

fn human(r: &Report) -> String {
    let mut o = String::new();
    let _ = writeln!(o, "Scenario: {}", r.label);
    let s = &r.summary;
    let _ = writeln!(o, "\n== Configuration ==");
    let _ = writeln!(o, "euler = {}, b1 = {}, b2 = {}", s.euler, s.b1, s.b2);
    let width = s
        .surfaces
        .iter()
        .map(|x| x.id.len())
        .max()
        .unwrap_or(2)
        .max(2);
    let _ = writeln!(
        o,
        "{:<width$}  genus  m      j      self-intersection",
        "id"
    );
    for x in &s.surfaces {
        let _ = writeln!(
            o,
            "{:<width$}  {:<5}  {:<5}  {:<5}  {}",
            x.id,
            x.genus,
            x.multiplicity.to_string(),
            x.j.to_string(),
            fmt_rat(&x.self_intersection)
        );
    }
    for p in &s.points {
        let _ = writeln!(
            o,
            "point {}: order {}, exponents ({}, {}), on {}",
            p.id,
            p.order,
            p.exponents.0,
            p.exponents.1,
            if p.incident.is_empty() {
                "-".to_string()
            } else {
                p.incident.join(", ")
            }
        );
    }
    let _ = writeln!(o, "intersection events: {}", s.events);
    if r.violations.is_empty() {
        let _ = writeln!(o, "validation: ok");
    } else {
        for v in &r.violations {
            let _ = writeln!(o, "violation: {v}");
        }
    }

    let _ = writeln!(o, "\n== Local invariants ==");
    match &r.local {
        Ok(rows) if rows.is_empty() => {
            let _ = writeln!(o, "(no singular points)");
        }
        Ok(rows) => {
            for row in rows {
                let p = &row.invariant;
                let compat: Vec<String> = row
                    .compatible
                    .iter()
                    .map(|(s, ok)| format!("{s} {}", if *ok { "ok" } else { "FAIL" }))
                    .collect();
                let _ = writeln!(
                    o,
                    "{}: (m, j1, j2) = ({}, {}, {}), m1 = {}, m2 = {}, d = {}, e = ({}, {}); {}",
                    p.point_id,
                    p.m,
                    p.j1,
                    p.j2,
                    p.m1,
                    p.m2,
                    p.d,
                    p.e1,
                    p.e2,
                    compat.join(", ")
                );
            }
        }
        Err(e) => {
            let _ = writeln!(o, "error: {e}");
        }
    }

    let _ = writeln!(o, "\n== Seifert bundle ==");
    match &r.seifert {
        Ok(sf) => {
            let d = &sf.decision;
            let _ = writeln!(o, "c1(B) ({}) = {}", sf.c1b_source, list(&sf.spec.c1b));
            let _ = writeln!(o, "m = {}, m*c1(M) = {}", d.order, list(&d.scaled_chern));
            let _ = writeln!(o, "b1 = 0: {}", d.b1_zero);
            let _ = writeln!(
                o,
                "surjective onto torsion: {} (invariant factors {})",
                d.surjective,
                list(&sf.torsion_map_factors)
            );
            let _ = writeln!(o, "c1(M/m) primitive: {}", d.primitive);
            let _ = writeln!(o, "H1(M) = 0: {}", d.holds);
            if let Some(h) = &sf.h2 {
                let _ = writeln!(o, "H2(M) = {h}");
            }
        }
        Err(e) => {
            let _ = writeln!(o, "error: {e}");
        }
    }

    let _ = writeln!(o, "\n== Spin ==");
    match &r.spin {
        Ok(sp) => {
            let u: Vec<String> = sp
                .unknowns
                .iter()
                .map(|(n, s)| format!("{n} on {s}"))
                .collect();
            let _ = writeln!(
                o,
                "unknowns: {}",
                if u.is_empty() {
                    "-".into()
                } else {
                    u.join(", ")
                }
            );
            let _ = writeln!(o, "w2 (determined part) = {}", bits(&sp.w2_determined));
            for g in &sp.kernel.generators {
                let _ = writeln!(o, "ker pi* generator: {}", bits(g));
            }
            for row in &sp.rows {
                let _ = writeln!(
                    o,
                    "{}: {}",
                    assignment(&row.assignment),
                    if row.spin { "spin" } else { "non-spin" }
                );
            }
        }
        Err(e) => {
            let _ = writeln!(o, "error: {e}");
        }
    }

    let _ = writeln!(o, "\n== Smale-Barden ==");
    match &r.smale_barden {
        Ok(entries) => {
            for e in entries {
                let _ = writeln!(o, "{}", sb_line(e));
                let _ = writeln!(o, "  c(p^i): {}", profile(&e.data.torsion_profile));
            }
        }
        Err(e) => {
            let _ = writeln!(o, "error: {e}");
        }
    }

    if let Some(st) = &r.pi1 {
        let _ = writeln!(o, "\n== Fundamental group ==");
        match st {
            Ok(p) => o.push_str(&group_human(p)),
            Err(e) => {
                let _ = writeln!(o, "error: {e}");
            }
        }
    }
    if let Some(sc) = &r.simply_connected {
        let _ = writeln!(
            o,
            "simply connected: {}",
            match sc {
                Ok(v) => v.to_string(),
                Err(e) => format!("error: {e}"),
            }
        );
    }

    let _ = writeln!(o, "\n== Surgery log ==");
    if r.log.is_empty() {
        let _ = writeln!(o, "(empty)");
    }
    for l in &r.log {
        let _ = writeln!(
            o,
            "{}  [euler {} -> {}, b2 {} -> {}]",
            l.op, l.euler.0, l.euler.1, l.b2.0, l.b2.1
        );
        for d in &l.deltas {
            let _ = writeln!(o, "    {d}");
        }
        if let Some(a) = &l.asserted {
            let _ = writeln!(o, "    asserted: {a}");
        }
    }

    let _ = writeln!(o, "\n== Verdicts ==");
    for v in &r.verdicts {
        let _ = writeln!(o, "{:<18} {:<12} {}", v.name, v.status.as_str(), v.detail);
    }
    o
}
