use std::collections::BTreeMap;

use super::scenario::{
    op_text, BaseSpec, Builtin, GroupSource, Scenario, SeifertBlock, SpinTarget,
};
use crate::exactmath::{smith_normal_form, Int, Rational};
use crate::fpgroup::{
    abelianize, build_pi1_orb_presentation, coset_enumerate, simply_connected_decision,
    tietze_simplify, tietze_with_table, CosetStatus, CosetTable, Presentation, Word,
};
use crate::orbmodel::{
    assign_local_invariants, check_compatibility, validate_config, Id, OrbifoldConfig,
    PointLocalInvariant,
};
use crate::seifert::{
    compute_b_residues, h1_zero_decision, h2_of_m, search_background_class, torsion_map_matrix,
    AbelianGroup, H1Decision, ParityMode, SearchOptions, SeifertSpec,
};
use crate::spin_smale::{
    gk_check, smale_barden_report, spin_decision, spin_parity_target, w2_base_class, PiStarKernel,
    SmaleBardenData,
};
use crate::surgery::{SurgeryError, SurgeryLog};

pub const DEFAULT_COSET_BOUND: usize = 10_000;
pub const DEFAULT_MAX_EXPONENT: u32 = 16;
pub const DEFAULT_SEARCH_BOUND: i64 = 4;

/// Command-line overrides of the scenario's settings.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PipelineOptions {
    pub spin_target: Option<SpinTarget>,
    pub search_bound: Option<i64>,
    pub coset_bound: Option<usize>,
    pub max_exponent: Option<u32>,
    pub dump_cosets: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub name: &'static str,
    pub status: Status,
    pub detail: String,
}

/// A stage result; errors carry the stage name.
pub type Stage<T> = Result<T, String>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceRow {
    pub id: Id,
    pub genus: u32,
    pub multiplicity: Int,
    pub j: Int,
    pub self_intersection: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointRow {
    pub id: Id,
    pub order: Int,
    pub exponents: (Int, Int),
    pub incident: Vec<Id>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigSummary {
    pub euler: i64,
    pub b1: usize,
    pub b2: usize,
    pub surfaces: Vec<SurfaceRow>,
    pub points: Vec<PointRow>,
    pub events: usize,
}

impl ConfigSummary {
    pub fn of(cfg: &OrbifoldConfig) -> Self {
        Self {
            euler: cfg.euler,
            b1: cfg.b1,
            b2: cfg.b2,
            surfaces: cfg
                .surfaces
                .iter()
                .map(|s| SurfaceRow {
                    id: s.id.clone(),
                    genus: s.genus,
                    multiplicity: s.multiplicity.clone(),
                    j: s.j.clone(),
                    self_intersection: s.self_intersection.clone(),
                })
                .collect(),
            points: cfg
                .points
                .iter()
                .map(|p| PointRow {
                    id: p.id.clone(),
                    order: p.order.clone(),
                    exponents: p.exponents.clone(),
                    incident: p.incident.clone(),
                })
                .collect(),
            events: cfg.events.len(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalRow {
    pub invariant: PointLocalInvariant,
    pub compatible: Vec<(Id, bool)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeifertSection {
    /// `given` or `search`.
    pub c1b_source: &'static str,
    pub spec: SeifertSpec,
    pub decision: H1Decision,
    /// Invariant factors of the torsion map `[Pᵀ | diag m]`.
    pub torsion_map_factors: Vec<Int>,
    pub h2: Option<AbelianGroup>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinRow {
    pub assignment: BTreeMap<String, u8>,
    pub spin: bool,
    /// `w₂ + Σbᵢ[Dᵢ] + c₁(B)` mod 2.
    pub tested: Vec<u8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinSection {
    pub unknowns: Vec<(String, Id)>,
    pub w2_determined: Vec<u8>,
    pub kernel: PiStarKernel,
    pub rows: Vec<SpinRow>,
    /// The assignment the spin target refers to.
    pub selected: BTreeMap<String, u8>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SbEntry {
    pub spin: bool,
    pub data: SmaleBardenData,
    pub gk: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pi1Section {
    /// `pi1_orb` or `explicit`.
    pub source: &'static str,
    pub presentation: Presentation,
    pub subgroup: Vec<Word>,
    pub status: CosetStatus,
    pub defined: usize,
    pub replay_ok: bool,
    pub abelianization: AbelianGroup,
    pub simplified: Presentation,
    pub table: CosetTable,
    /// Whether reports print the full table.
    pub dump: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogLine {
    pub op: String,
    pub euler: (i64, i64),
    pub b2: (usize, usize),
    pub deltas: Vec<String>,
    pub asserted: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Report {
    pub label: String,
    pub summary: ConfigSummary,
    pub violations: Vec<String>,
    pub local: Stage<Vec<LocalRow>>,
    pub seifert: Stage<SeifertSection>,
    pub spin: Stage<SpinSection>,
    pub smale_barden: Stage<Vec<SbEntry>>,
    pub pi1: Option<Stage<Pi1Section>>,
    pub simply_connected: Option<Stage<bool>>,
    pub log: Vec<LogLine>,
    pub verdicts: Vec<Verdict>,
}

impl Report {
    /// 0 when every verdict passes, 1 when one fails, 3 when none fails but
    /// one is inconclusive.
    pub fn exit_code(&self) -> u8 {
        if self.verdicts.iter().any(|v| v.status == Status::Fail) {
            1
        } else if self
            .verdicts
            .iter()
            .any(|v| v.status == Status::Inconclusive)
        {
            3
        } else {
            0
        }
    }

    pub fn verdict(&self, name: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PipelineError {
    #[error("build: {0}")]
    Build(SurgeryError),
    #[error("build: script step {step}: {error}")]
    Script { step: usize, error: SurgeryError },
}

pub fn log_lines(log: &SurgeryLog) -> Vec<LogLine> {
    log.entries
        .iter()
        .map(|e| LogLine {
            op: op_text(&e.op),
            euler: (e.before.euler, e.after.euler),
            b2: (e.before.b2, e.after.b2),
            deltas: e.deltas.iter().map(|d| d.describe()).collect(),
            asserted: e.asserted.clone(),
        })
        .collect()
}

fn local_stage(cfg: &OrbifoldConfig) -> Stage<Vec<LocalRow>> {
    let table = assign_local_invariants(cfg).map_err(|e| format!("local invariants: {e}"))?;
    let mut rows = Vec::new();
    for (pid, inv) in table {
        let point = cfg.point(&pid).expect("assigned points exist");
        let mut compatible = Vec::new();
        for sid in &point.incident {
            let s = cfg.surface(sid).expect("incident surfaces exist");
            let ok = check_compatibility(&inv, point, s)
                .map_err(|e| format!("local invariants: {e}"))?;
            compatible.push((sid.clone(), ok));
        }
        rows.push(LocalRow {
            invariant: inv,
            compatible,
        });
    }
    Ok(rows)
}

/// Unknown coefficients named in order, each set to the given value or `0`.
fn selected_assignment(
    cfg: &OrbifoldConfig,
    given: Option<&BTreeMap<String, u8>>,
) -> Stage<BTreeMap<String, u8>> {
    let w2 = w2_base_class(cfg).map_err(|e| format!("spin: {e}"))?;
    let mut out = BTreeMap::new();
    for name in w2.unknown_names() {
        let v = given.and_then(|g| g.get(&name)).copied().unwrap_or(0);
        out.insert(name, v);
    }
    if let Some(g) = given {
        if let Some(extra) = g.keys().find(|k| !out.contains_key(*k)) {
            return Err(format!("spin: no unknown named {extra}"));
        }
    }
    Ok(out)
}

fn seifert_stage(
    cfg: &OrbifoldConfig,
    block: &SeifertBlock,
    opts: &PipelineOptions,
) -> Stage<SeifertSection> {
    let residues = compute_b_residues(cfg).map_err(|e| format!("seifert: {e}"))?;
    if let Some(given) = &block.residues {
        if *given != residues {
            return Err("seifert: given residues differ from b = j^-1 mod m".into());
        }
    }
    let target = opts.spin_target.unwrap_or(block.spin_target);
    let (source, spec) = match &block.c1b {
        Some(c) => (
            "given",
            SeifertSpec::new(cfg.clone(), c.clone()).map_err(|e| format!("seifert: {e}"))?,
        ),
        None => {
            let parity = match target {
                SpinTarget::Any => None,
                t => {
                    let a = selected_assignment(cfg, block.assignment.as_ref())?;
                    let alpha = spin_parity_target(cfg, &a).map_err(|e| format!("seifert: {e}"))?;
                    let mode = if t == SpinTarget::Spin {
                        ParityMode::Equal
                    } else {
                        ParityMode::NotEqual
                    };
                    Some((alpha, mode))
                }
            };
            let search = SearchOptions {
                parity,
                bound: opts
                    .search_bound
                    .or(block.search_bound)
                    .unwrap_or(DEFAULT_SEARCH_BOUND),
                ..SearchOptions::default()
            };
            (
                "search",
                search_background_class(cfg, &search).map_err(|e| format!("seifert: {e}"))?,
            )
        }
    };
    let decision = h1_zero_decision(&spec).map_err(|e| format!("seifert: {e}"))?;
    let torsion_map_factors = torsion_map_matrix(cfg)
        .map(|m| smith_normal_form(&m).invariant_factors())
        .map_err(|e| format!("seifert: {e}"))?;
    let h2 = if decision.holds {
        Some(h2_of_m(&spec).map_err(|e| format!("seifert: {e}"))?)
    } else {
        None
    };
    Ok(SeifertSection {
        c1b_source: source,
        spec,
        decision,
        torsion_map_factors,
        h2,
    })
}

fn spin_stage(seifert: &Stage<SeifertSection>, block: &SeifertBlock) -> Stage<SpinSection> {
    let s = seifert
        .as_ref()
        .map_err(|_| "spin: skipped, no Seifert spec".to_string())?;
    if !s.decision.holds {
        return Err("spin: skipped, H1(M) is not zero".into());
    }
    let cfg = &s.spec.base;
    let w2 = w2_base_class(cfg).map_err(|e| format!("spin: {e}"))?;
    let selected = selected_assignment(cfg, block.assignment.as_ref())?;
    let mut rows = Vec::new();
    let mut kernel = None;
    for a in w2.assignments() {
        let v = spin_decision(&s.spec, &a).map_err(|e| format!("spin: {e}"))?;
        kernel.get_or_insert(v.kernel.clone());
        rows.push(SpinRow {
            assignment: a,
            spin: v.spin,
            tested: v.tested,
        });
    }
    Ok(SpinSection {
        unknowns: w2
            .unknowns
            .iter()
            .map(|u| (u.name.clone(), u.surface.clone()))
            .collect(),
        w2_determined: w2.values.clone(),
        kernel: kernel.expect("at least one assignment"),
        rows,
        selected,
    })
}

fn sb_stage(seifert: &Stage<SeifertSection>, spin: &Stage<SpinSection>) -> Stage<Vec<SbEntry>> {
    let s = seifert
        .as_ref()
        .map_err(|_| "smale-barden: skipped, no Seifert spec".to_string())?;
    let sp = spin
        .as_ref()
        .map_err(|_| "smale-barden: skipped, no spin verdict".to_string())?;
    let mut values: Vec<bool> = sp.rows.iter().map(|r| r.spin).collect();
    values.sort_unstable_by(|a, b| b.cmp(a));
    values.dedup();
    values
        .into_iter()
        .map(|spin| {
            let data =
                smale_barden_report(&s.spec, spin).map_err(|e| format!("smale-barden: {e}"))?;
            let gk = gk_check(&data);
            Ok(SbEntry { spin, data, gk })
        })
        .collect()
}

/// Fundamental group stage. `None` when the scenario has no group block
/// and its base is not `paper_Z`.
pub fn pi1_section(scenario: &Scenario, opts: &PipelineOptions) -> Option<Stage<Pi1Section>> {
    let block = scenario.group.as_ref();
    let is_z = matches!(scenario.base, BaseSpec::Builtin(Builtin::PaperZ(_)));
    if block.is_none() && !is_z {
        return None;
    }
    let bound = opts
        .coset_bound
        .or(block.and_then(|b| b.coset_bound))
        .unwrap_or(DEFAULT_COSET_BOUND);
    let max_exponent = opts
        .max_exponent
        .or(block.and_then(|b| b.max_exponent))
        .unwrap_or(DEFAULT_MAX_EXPONENT);
    let subgroup = block.map(|b| b.subgroup.clone()).unwrap_or_default();
    let run = || -> Stage<Pi1Section> {
        let (source, p) = match block.map(|b| &b.source) {
            Some(GroupSource::Explicit(p)) => ("explicit", p.clone()),
            _ => {
                let prime = scenario
                    .prime()
                    .ok_or("pi1: source pi1_orb needs builtin = paper_Z")?;
                let p = build_pi1_orb_presentation(prime, max_exponent)
                    .map_err(|e| format!("pi1: {e}"))?;
                ("pi1_orb", p)
            }
        };
        Ok(group_section(
            source,
            p,
            subgroup.clone(),
            bound,
            opts.dump_cosets,
        ))
    };
    Some(run())
}

/// Enumerates cosets of `subgroup` and simplifies the presentation.
pub fn group_section(
    source: &'static str,
    p: Presentation,
    subgroup: Vec<Word>,
    bound: usize,
    dump: bool,
) -> Pi1Section {
    let table = coset_enumerate(&p, &subgroup, bound);
    let replay_ok = table.verify(&p, &subgroup);
    let simplified = if subgroup.is_empty() && table.index().is_some() {
        tietze_with_table(&p, &table)
    } else {
        tietze_simplify(&p)
    };
    Pi1Section {
        source,
        abelianization: abelianize(&p),
        status: table.status,
        defined: table.defined,
        replay_ok,
        dump,
        table,
        presentation: p,
        subgroup,
        simplified,
    }
}

/// Runs every stage on the scenario. Only a failure to build the config is
/// an error; later stage failures are recorded in the report.
pub fn run_pipeline(scenario: &Scenario, opts: &PipelineOptions) -> Result<Report, PipelineError> {
    let (cfg, log) = scenario.realize().map_err(|(step, e)| match step {
        Some(step) => PipelineError::Script { step, error: e },
        None => PipelineError::Build(e),
    })?;
    let violations: Vec<String> = validate_config(&cfg)
        .iter()
        .map(|v| v.to_string())
        .collect();
    let local = local_stage(&cfg);
    let block = scenario.seifert.clone().unwrap_or_default();
    let seifert = seifert_stage(&cfg, &block, opts);
    let spin = spin_stage(&seifert, &block);
    let smale_barden = sb_stage(&seifert, &spin);
    let pi1 = pi1_section(scenario, opts);
    let simply_connected = match &pi1 {
        Some(Ok(sec)) if sec.source == "pi1_orb" && sec.subgroup.is_empty() => {
            let h1 = seifert.as_ref().map(|s| s.decision.holds).unwrap_or(false);
            Some(
                simply_connected_decision(&sec.table, h1)
                    .map_err(|e| format!("simply connected: {e}")),
            )
        }
        _ => None,
    };

    let mut verdicts = Vec::new();
    let pass_fail = |ok: bool| if ok { Status::Pass } else { Status::Fail };
    verdicts.push(Verdict {
        name: "config_valid",
        status: pass_fail(violations.is_empty()),
        detail: format!("{} violation(s)", violations.len()),
    });
    verdicts.push(match &local {
        Ok(rows) => {
            let bad = rows
                .iter()
                .filter(|r| !r.invariant.is_consistent() || r.compatible.iter().any(|(_, ok)| !ok))
                .count();
            Verdict {
                name: "local_invariants",
                status: pass_fail(bad == 0),
                detail: format!("{} point(s), {bad} incompatible", rows.len()),
            }
        }
        Err(e) => Verdict {
            name: "local_invariants",
            status: Status::Fail,
            detail: e.clone(),
        },
    });
    verdicts.push(match &seifert {
        Ok(s) => Verdict {
            name: "h1_zero",
            status: pass_fail(s.decision.holds),
            detail: format!(
                "b1_zero={} surjective={} primitive={}",
                s.decision.b1_zero, s.decision.surjective, s.decision.primitive
            ),
        },
        Err(e) => Verdict {
            name: "h1_zero",
            status: Status::Fail,
            detail: e.clone(),
        },
    });
    let target = opts.spin_target.unwrap_or(block.spin_target);
    if target != SpinTarget::Any {
        let want = target == SpinTarget::Spin;
        verdicts.push(match &spin {
            Ok(sp) => {
                let got = sp
                    .rows
                    .iter()
                    .find(|r| r.assignment == sp.selected)
                    .map(|r| r.spin);
                Verdict {
                    name: "spin_target",
                    status: pass_fail(got == Some(want)),
                    detail: format!("target={} spin={got:?}", target.as_str()),
                }
            }
            Err(e) => Verdict {
                name: "spin_target",
                status: Status::Inconclusive,
                detail: e.clone(),
            },
        });
    }
    verdicts.push(match &smale_barden {
        Ok(entries) => Verdict {
            name: "gk",
            status: pass_fail(!entries.is_empty() && entries.iter().all(|e| e.gk)),
            detail: format!("{} case(s)", entries.len()),
        },
        Err(e) => Verdict {
            name: "gk",
            status: Status::Inconclusive,
            detail: e.clone(),
        },
    });
    if let Some(p) = &pi1 {
        verdicts.push(match p {
            Ok(sec) => {
                let (name, status) = match (sec.source, sec.status) {
                    (_, CosetStatus::Exhausted(_)) => ("cosets", Status::Inconclusive),
                    ("pi1_orb", CosetStatus::Complete(n)) => {
                        ("pi1_orb", pass_fail(4 % n == 0 && sec.replay_ok))
                    }
                    (_, CosetStatus::Complete(_)) => ("cosets", pass_fail(sec.replay_ok)),
                };
                Verdict {
                    name,
                    status,
                    detail: format!("{:?}", sec.status),
                }
            }
            Err(e) => Verdict {
                name: "cosets",
                status: Status::Fail,
                detail: e.clone(),
            },
        });
    }
    if let Some(sc) = &simply_connected {
        verdicts.push(match sc {
            Ok(v) => Verdict {
                name: "simply_connected",
                status: pass_fail(*v),
                detail: "finite cover order divides 4 and H1(M) = 0".into(),
            },
            Err(e) => Verdict {
                name: "simply_connected",
                status: Status::Inconclusive,
                detail: e.clone(),
            },
        });
    }

    Ok(Report {
        label: scenario.label(),
        summary: ConfigSummary::of(&cfg),
        violations,
        local,
        seifert,
        spin,
        smale_barden,
        pi1,
        simply_connected,
        log: log_lines(&log),
        verdicts,
    })
}
