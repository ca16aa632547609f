//! Line-oriented scenario files.
//!
//! ```text
//! # comment
//! [base]
//! builtin = paper_Z        # block_Y | block_W | paper_Z | explicit
//! p = 3
//!
//! [config]                 # only with builtin = explicit
//! b1 = 0
//! b2 = 1
//! euler = 3
//! pairing = 1              # rows separated by ';'
//! integral_pairing = 1     # or none
//! surface L genus=0 sq=1 class=1 [m=3 j=1]
//! point x order=2 exp=1,1 incident=L
//! event A B at=smooth:q    # or at=point:x
//!
//! [script]
//! blow_up at=q through=A,B exc=E
//! blow_down sphere=E point=s
//! forget surface=E
//! rename from=A to=B
//! resolve t1=T1 t2=T2 sigma=S exc=X
//! set_isotropy surface=S m=3 j=1
//! rebase basis=A,B
//! set_integral_pairing matrix=1 0 ; 0 -1
//!
//! [seifert]
//! c1b = search             # or integers, one per basis class
//! residues = auto          # or S:2 T:1
//! spin_target = any        # spin | nonspin | any
//! assign = a1:0 a2:1       # or none
//! search_bound = 4
//!
//! [group]
//! source = pi1_orb         # or explicit
//! generators = x y
//! relators = x^2, y^2, (x y)^2
//! subgroup =
//! coset_bound = 10000
//! max_exponent = 16
//! ```

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::exactmath::{fmt_rat, is_prime, parse_rat, Int, IntMatrix, RatMatrix, Rational};
use crate::fpgroup::{parse_relators, Presentation, Word};
use crate::orbmodel::{
    Id, IntersectionEvent, Location, OrbifoldConfig, SingularPointData, SurfaceData,
};
use crate::surgery::{
    build_block_w_surgery, build_block_y, build_z_with_log, SurgeryError, SurgeryLog, SurgeryOp,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for ParseError {}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Builtin {
    BlockY,
    BlockW,
    PaperZ(Int),
}

impl Builtin {
    pub fn name(&self) -> &'static str {
        match self {
            Builtin::BlockY => "block_Y",
            Builtin::BlockW => "block_W",
            Builtin::PaperZ(_) => "paper_Z",
        }
    }

    /// The config and the log of its construction.
    pub fn build(&self) -> Result<(OrbifoldConfig, SurgeryLog), SurgeryError> {
        match self {
            Builtin::BlockY => {
                let cfg = build_block_y();
                Ok((cfg.clone(), SurgeryLog::new(cfg)))
            }
            Builtin::BlockW => {
                let (cfg, log) = build_block_w_surgery().finish();
                Ok((cfg, log))
            }
            Builtin::PaperZ(p) => build_z_with_log(p),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BaseSpec {
    Builtin(Builtin),
    Explicit(OrbifoldConfig),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SpinTarget {
    Spin,
    NonSpin,
    #[default]
    Any,
}

impl SpinTarget {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "spin" => Some(SpinTarget::Spin),
            "nonspin" => Some(SpinTarget::NonSpin),
            "any" => Some(SpinTarget::Any),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            SpinTarget::Spin => "spin",
            SpinTarget::NonSpin => "nonspin",
            SpinTarget::Any => "any",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SeifertBlock {
    /// `None` searches for a background class.
    pub c1b: Option<Vec<Int>>,
    /// `None` derives the residues from the local invariants.
    pub residues: Option<BTreeMap<Id, Int>>,
    pub spin_target: SpinTarget,
    pub assignment: Option<BTreeMap<String, u8>>,
    pub search_bound: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GroupSource {
    Pi1Orb,
    Explicit(Presentation),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupBlock {
    pub source: GroupSource,
    pub subgroup: Vec<Word>,
    pub coset_bound: Option<usize>,
    pub max_exponent: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scenario {
    pub base: BaseSpec,
    pub script: Vec<SurgeryOp>,
    pub seifert: Option<SeifertBlock>,
    pub group: Option<GroupBlock>,
}

impl Scenario {
    pub fn builtin(b: Builtin) -> Self {
        Self {
            base: BaseSpec::Builtin(b),
            script: Vec::new(),
            seifert: None,
            group: None,
        }
    }

    pub fn explicit(cfg: OrbifoldConfig) -> Self {
        Self {
            base: BaseSpec::Explicit(cfg),
            script: Vec::new(),
            seifert: None,
            group: None,
        }
    }

    /// Short label such as `paper_Z p=3`.
    pub fn label(&self) -> String {
        match &self.base {
            BaseSpec::Builtin(Builtin::PaperZ(p)) => format!("paper_Z p={p}"),
            BaseSpec::Builtin(b) => b.name().to_string(),
            BaseSpec::Explicit(_) => "explicit".to_string(),
        }
    }

    /// The prime of a `paper_Z` base.
    pub fn prime(&self) -> Option<&Int> {
        match &self.base {
            BaseSpec::Builtin(Builtin::PaperZ(p)) => Some(p),
            _ => None,
        }
    }

    /// Builds the base and runs the script, returning the final config and
    /// the concatenated log.
    pub fn realize(&self) -> Result<(OrbifoldConfig, SurgeryLog), (Option<usize>, SurgeryError)> {
        let (mut cfg, mut log) = match &self.base {
            BaseSpec::Builtin(b) => b.build().map_err(|e| (None, e))?,
            BaseSpec::Explicit(c) => (c.clone(), SurgeryLog::new(c.clone())),
        };
        for (k, op) in self.script.iter().enumerate() {
            let mut s = crate::surgery::Surgery::new(cfg.clone());
            s.apply(op.clone()).map_err(|e| (Some(k), e))?;
            let (next, l) = s.finish();
            log.entries.extend(l.entries);
            cfg = next;
        }
        Ok((cfg, log))
    }
}

fn join_ints(v: &[Int]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn int_matrix_text(m: &IntMatrix) -> String {
    (0..m.rows())
        .map(|r| join_ints(m.row(r)))
        .collect::<Vec<_>>()
        .join(" ; ")
}

fn location_text(l: &Location) -> String {
    l.to_string()
}

/// Script syntax of one operation; fiber sums have none and render as a
/// summary.
pub fn op_text(op: &SurgeryOp) -> String {
    match op {
        SurgeryOp::BlowUp {
            at,
            through,
            exceptional,
        } => format!(
            "blow_up at={at} through={} exc={exceptional}",
            through.join(",")
        ),
        SurgeryOp::BlowDown { sphere, point } => format!("blow_down sphere={sphere} point={point}"),
        SurgeryOp::Forget { surface } => format!("forget surface={surface}"),
        SurgeryOp::Rename { from, to } => format!("rename from={from} to={to}"),
        SurgeryOp::ResolveTorusPair {
            t1,
            t2,
            sigma,
            exceptional,
        } => format!("resolve t1={t1} t2={t2} sigma={sigma} exc={exceptional}"),
        SurgeryOp::FiberSum { plan, .. } => format!(
            "fiber_sum fiber_a={} fiber_b={} joins={} b2={}",
            plan.fiber_a,
            plan.fiber_b,
            plan.joins.len(),
            plan.b2
        ),
        SurgeryOp::SetIsotropy { surface, m, j } => {
            format!("set_isotropy surface={surface} m={m} j={j}")
        }
        SurgeryOp::Rebase { basis } => format!("rebase basis={}", basis.join(",")),
        SurgeryOp::SetIntegralPairing { matrix } => {
            format!("set_integral_pairing matrix={}", int_matrix_text(matrix))
        }
    }
}

/// The `[config]` section body for a config.
pub fn config_text(cfg: &OrbifoldConfig) -> String {
    let mut out = String::new();
    out.push_str(&format!("b1 = {}\n", cfg.b1));
    out.push_str(&format!("b2 = {}\n", cfg.b2));
    out.push_str(&format!("euler = {}\n", cfg.euler));
    out.push_str(&format!("pairing = {}\n", cfg.pairing.to_text()));
    match &cfg.integral_pairing {
        Some(m) => out.push_str(&format!("integral_pairing = {}\n", int_matrix_text(m))),
        None => out.push_str("integral_pairing = none\n"),
    }
    for s in &cfg.surfaces {
        out.push_str(&format!(
            "surface {} genus={} sq={}",
            s.id,
            s.genus,
            fmt_rat(&s.self_intersection)
        ));
        if s.is_isotropy() {
            out.push_str(&format!(" m={} j={}", s.multiplicity, s.j));
        }
        if let Some(q) = &s.qclass {
            let q: Vec<String> = q.iter().map(fmt_rat).collect();
            out.push_str(&format!(" class={}", q.join(",")));
        }
        out.push('\n');
    }
    for p in &cfg.points {
        out.push_str(&format!(
            "point {} order={} exp={},{} incident={}\n",
            p.id,
            p.order,
            p.exponents.0,
            p.exponents.1,
            p.incident.join(",")
        ));
    }
    for e in &cfg.events {
        out.push_str(&format!(
            "event {} {} at={}\n",
            e.a,
            e.b,
            location_text(&e.location)
        ));
    }
    out
}

/// Renders a scenario; [`parse_scenario`] reads it back to an equal value.
pub fn emit_scenario(s: &Scenario) -> String {
    let mut out = String::from("[base]\n");
    match &s.base {
        BaseSpec::Builtin(b) => {
            out.push_str(&format!("builtin = {}\n", b.name()));
            if let Builtin::PaperZ(p) = b {
                out.push_str(&format!("p = {p}\n"));
            }
        }
        BaseSpec::Explicit(cfg) => {
            out.push_str("builtin = explicit\n\n[config]\n");
            out.push_str(&config_text(cfg));
        }
    }
    if !s.script.is_empty() {
        out.push_str("\n[script]\n");
        for op in &s.script {
            out.push_str(&op_text(op));
            out.push('\n');
        }
    }
    if let Some(sb) = &s.seifert {
        out.push_str("\n[seifert]\n");
        match &sb.c1b {
            Some(v) => out.push_str(&format!("c1b = {}\n", join_ints(v))),
            None => out.push_str("c1b = search\n"),
        }
        match &sb.residues {
            Some(r) => {
                let parts: Vec<String> = r.iter().map(|(k, v)| format!("{k}:{v}")).collect();
                out.push_str(&format!("residues = {}\n", parts.join(" ")));
            }
            None => out.push_str("residues = auto\n"),
        }
        out.push_str(&format!("spin_target = {}\n", sb.spin_target.as_str()));
        match &sb.assignment {
            Some(a) => {
                let parts: Vec<String> = a.iter().map(|(k, v)| format!("{k}:{v}")).collect();
                out.push_str(&format!("assign = {}\n", parts.join(" ")));
            }
            None => out.push_str("assign = none\n"),
        }
        if let Some(b) = sb.search_bound {
            out.push_str(&format!("search_bound = {b}\n"));
        }
    }
    if let Some(g) = &s.group {
        out.push_str("\n[group]\n");
        let names: Vec<String> = match &g.source {
            GroupSource::Pi1Orb => {
                out.push_str("source = pi1_orb\n");
                crate::fpgroup::PI1_GENERATORS
                    .iter()
                    .map(|s| s.to_string())
                    .collect()
            }
            GroupSource::Explicit(p) => {
                out.push_str("source = explicit\n");
                out.push_str(&format!("generators = {}\n", p.generators.join(" ")));
                out.push_str(&format!("relators = {}\n", p.render_relators().join(", ")));
                p.generators.clone()
            }
        };
        let sub: Vec<String> = g.subgroup.iter().map(|w| w.render(&names)).collect();
        out.push_str(&format!("subgroup = {}\n", sub.join(", ")));
        if let Some(b) = g.coset_bound {
            out.push_str(&format!("coset_bound = {b}\n"));
        }
        if let Some(e) = g.max_exponent {
            out.push_str(&format!("max_exponent = {e}\n"));
        }
    }
    out
}

/// One meaningful line: its number, the column where content starts, and
/// the content with comments stripped.
struct Line<'a> {
    no: usize,
    col: usize,
    text: &'a str,
}

impl Line<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            line: self.no,
            col: self.col,
            msg: msg.into(),
        })
    }

    fn err_at<T>(&self, needle: &str, msg: impl Into<String>) -> Result<T, ParseError> {
        let off = self.text.find(needle).unwrap_or(0);
        Err(ParseError {
            line: self.no,
            col: self.col + self.text[..off].chars().count(),
            msg: msg.into(),
        })
    }

    /// `key = value`, if the line has that shape.
    fn key_value(&self) -> Option<(&str, &str)> {
        let (k, v) = self.text.split_once('=')?;
        let k = k.trim();
        (!k.is_empty() && !k.contains(char::is_whitespace)).then(|| (k, v.trim()))
    }
}

/// `head k=v k=v …` with optional positional tokens after the head.
struct Directive<'a> {
    head: &'a str,
    positional: Vec<&'a str>,
    args: Vec<(&'a str, &'a str)>,
}

fn directive<'a>(line: &Line<'a>) -> Result<Directive<'a>, ParseError> {
    let mut toks = line.text.split_whitespace();
    let head = toks.next().unwrap_or("");
    let mut positional = Vec::new();
    let mut args: Vec<(&str, &str)> = Vec::new();
    for t in toks {
        match t.split_once('=') {
            Some((k, v)) => {
                if args.iter().any(|(a, _)| *a == k) {
                    return line.err_at(t, format!("repeated argument '{k}'"));
                }
                args.push((k, v));
            }
            None if args.is_empty() => positional.push(t),
            None => return line.err_at(t, format!("expected key=value, found '{t}'")),
        }
    }
    Ok(Directive {
        head,
        positional,
        args,
    })
}

impl<'a> Directive<'a> {
    fn check(
        &self,
        line: &Line,
        allowed: &[&str],
        required: &[&str],
        npos: usize,
    ) -> Result<(), ParseError> {
        if self.positional.len() != npos {
            return line.err(format!(
                "'{}' takes {npos} positional argument(s), found {}",
                self.head,
                self.positional.len()
            ));
        }
        for (k, _) in &self.args {
            if !allowed.contains(k) {
                return line.err_at(
                    &format!("{k}="),
                    format!("unknown key '{k}' for '{}'", self.head),
                );
            }
        }
        for r in required {
            if !self.args.iter().any(|(k, _)| k == r) {
                return line.err(format!("'{}' needs '{r}='", self.head));
            }
        }
        Ok(())
    }

    fn get(&self, k: &str) -> Option<&'a str> {
        self.args.iter().find(|(a, _)| *a == k).map(|(_, v)| *v)
    }

    fn req(&self, k: &str) -> &'a str {
        self.get(k).unwrap_or("")
    }
}

fn ids(v: &str) -> Vec<Id> {
    if v.is_empty() {
        Vec::new()
    } else {
        v.split(',').map(str::to_string).collect()
    }
}

fn parse_int(line: &Line, v: &str) -> Result<Int, ParseError> {
    v.parse::<Int>()
        .or_else(|_| line.err_at(v, format!("expected an integer, found '{v}'")))
}

fn parse_usize(line: &Line, v: &str) -> Result<usize, ParseError> {
    v.parse::<usize>()
        .or_else(|_| line.err_at(v, format!("expected a non-negative integer, found '{v}'")))
}

fn parse_rational(line: &Line, v: &str) -> Result<Rational, ParseError> {
    parse_rat(v).map_or_else(
        || line.err_at(v, format!("expected a rational, found '{v}'")),
        Ok,
    )
}

/// Rows separated by `;`, entries by whitespace.
fn parse_rows<T>(
    line: &Line,
    v: &str,
    entry: impl Fn(&str) -> Option<T>,
) -> Result<Vec<Vec<T>>, ParseError> {
    if v.trim().is_empty() {
        return Ok(Vec::new());
    }
    let mut rows = Vec::new();
    for r in v.split(';') {
        let mut row = Vec::new();
        for e in r.split_whitespace() {
            match entry(e) {
                Some(x) => row.push(x),
                None => return line.err_at(e, format!("bad matrix entry '{e}'")),
            }
        }
        rows.push(row);
    }
    if rows.iter().any(|r| r.len() != rows[0].len()) {
        return line.err("matrix rows have different lengths");
    }
    Ok(rows)
}

fn parse_int_matrix(line: &Line, v: &str, cols_if_empty: usize) -> Result<IntMatrix, ParseError> {
    let rows = parse_rows(line, v, |e| e.parse::<Int>().ok())?;
    Ok(if rows.is_empty() {
        IntMatrix::zeros(0, cols_if_empty)
    } else {
        IntMatrix::from_rows(&rows)
    })
}

fn parse_pairs(line: &Line, v: &str) -> Result<BTreeMap<String, Int>, ParseError> {
    let mut out = BTreeMap::new();
    for t in v.split_whitespace() {
        let Some((k, x)) = t.rsplit_once(':') else {
            return line.err_at(t, format!("expected name:value, found '{t}'"));
        };
        if out.insert(k.to_string(), parse_int(line, x)?).is_some() {
            return line.err_at(t, format!("repeated name '{k}'"));
        }
    }
    Ok(out)
}

/// A `#` starts a comment at the beginning of a line or after whitespace;
/// generated labels may contain `#` elsewhere.
fn strip_comment(raw: &str) -> &str {
    let mut prev_ws = true;
    for (i, c) in raw.char_indices() {
        if c == '#' && prev_ws {
            return &raw[..i];
        }
        prev_ws = c.is_whitespace();
    }
    raw
}

#[derive(PartialEq, Eq, Clone, Copy)]
enum Section {
    Base,
    Config,
    Script,
    Seifert,
    Group,
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ParseError> {
    let mut lines: Vec<Line> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = strip_comment(raw);
        let trimmed = body.trim_start();
        let col = body.len() - trimmed.len() + 1;
        let t = trimmed.trim_end();
        if !t.is_empty() {
            lines.push(Line {
                no: i + 1,
                col,
                text: t,
            });
        }
    }

    let mut section: Option<Section> = None;
    let mut seen: Vec<Section> = Vec::new();
    let mut builtin: Option<(&Line, &str)> = None;
    let mut prime: Option<(&Line, Int)> = None;
    let mut cfg = OrbifoldConfig::empty();
    let mut cfg_keys: BTreeMap<&str, usize> = BTreeMap::new();
    let mut script: Vec<(&Line, SurgeryOp)> = Vec::new();
    let mut seifert: Option<SeifertBlock> = None;
    let mut group_kv: Vec<(&Line, &str, &str)> = Vec::new();
    let mut has_group = false;

    for line in &lines {
        if line.text.starts_with('[') {
            let Some(name) = line
                .text
                .strip_prefix('[')
                .and_then(|s| s.strip_suffix(']'))
            else {
                return line.err("malformed section header");
            };
            let s = match name.trim() {
                "base" => Section::Base,
                "config" => Section::Config,
                "script" => Section::Script,
                "seifert" => Section::Seifert,
                "group" => Section::Group,
                other => return line.err(format!("unknown section [{other}]")),
            };
            if seen.contains(&s) {
                return line.err(format!("repeated section [{}]", name.trim()));
            }
            seen.push(s);
            if s == Section::Seifert {
                seifert = Some(SeifertBlock::default());
            }
            if s == Section::Group {
                has_group = true;
            }
            section = Some(s);
            continue;
        }
        match section {
            None => return line.err("content before the first section"),
            Some(Section::Base) => {
                let Some((k, v)) = line.key_value() else {
                    return line.err("expected key = value");
                };
                match k {
                    "builtin" => builtin = Some((line, v)),
                    "p" => prime = Some((line, parse_int(line, v)?)),
                    _ => return line.err(format!("unknown key '{k}' in [base]")),
                }
            }
            Some(Section::Config) => parse_config_line(line, &mut cfg, &mut cfg_keys)?,
            Some(Section::Script) => script.push((line, parse_op(line)?)),
            Some(Section::Seifert) => {
                let sb = seifert.as_mut().expect("section opened");
                parse_seifert_line(line, sb)?;
            }
            Some(Section::Group) => {
                let Some((k, v)) = line.key_value() else {
                    return line.err("expected key = value");
                };
                group_kv.push((line, k, v));
            }
        }
    }

    let Some((bline, bname)) = builtin else {
        return Err(ParseError {
            line: 1,
            col: 1,
            msg: "missing [base] builtin = …".into(),
        });
    };
    let base = match bname {
        "block_Y" => BaseSpec::Builtin(Builtin::BlockY),
        "block_W" => BaseSpec::Builtin(Builtin::BlockW),
        "paper_Z" => {
            let Some((pline, p)) = prime.clone() else {
                return bline.err("paper_Z needs p = <prime>");
            };
            if !is_prime(&p) {
                return pline.err(format!("{p} is not prime"));
            }
            BaseSpec::Builtin(Builtin::PaperZ(p))
        }
        "explicit" => {
            if let Some(m) = &cfg.integral_pairing {
                if m.rows() == 0 {
                    cfg.integral_pairing = Some(IntMatrix::zeros(0, cfg.surfaces.len()));
                }
            }
            BaseSpec::Explicit(cfg.clone())
        }
        other => return bline.err_at(other, format!("unknown builtin '{other}'")),
    };
    if let (Some((pline, _)), false) = (
        &prime,
        matches!(base, BaseSpec::Builtin(Builtin::PaperZ(_))),
    ) {
        return pline.err("p is only allowed with builtin = paper_Z");
    }
    if seen.contains(&Section::Config) && !matches!(base, BaseSpec::Explicit(_)) {
        return bline.err("[config] requires builtin = explicit");
    }
    let scenario_group = if has_group {
        Some(parse_group(&group_kv)?)
    } else {
        None
    };
    let s = Scenario {
        base,
        script: script.iter().map(|(_, op)| op.clone()).collect(),
        seifert,
        group: scenario_group,
    };
    if let Err((at, e)) = s.realize() {
        return match at {
            Some(k) => script[k].0.err(format!("script step fails: {e}")),
            None => bline.err(format!("base fails to build: {e}")),
        };
    }
    Ok(s)
}

fn parse_config_line<'a>(
    line: &'a Line,
    cfg: &mut OrbifoldConfig,
    keys: &mut BTreeMap<&'a str, usize>,
) -> Result<(), ParseError> {
    if let Some((k, v)) = line.key_value() {
        if keys.insert(k, line.no).is_some() {
            return line.err(format!("repeated key '{k}'"));
        }
        match k {
            "b1" => cfg.b1 = parse_usize(line, v)?,
            "b2" => cfg.b2 = parse_usize(line, v)?,
            "euler" => {
                cfg.euler = v
                    .parse::<i64>()
                    .or_else(|_| line.err_at(v, "expected an integer"))?
            }
            "pairing" => {
                let rows = parse_rows(line, v, parse_rat)?;
                cfg.pairing = if rows.is_empty() {
                    RatMatrix::zeros(0, 0)
                } else {
                    RatMatrix::from_rows(rows)
                };
            }
            "integral_pairing" => {
                cfg.integral_pairing = if v == "none" {
                    None
                } else {
                    Some(parse_int_matrix(line, v, 0)?)
                };
            }
            _ => return line.err(format!("unknown key '{k}' in [config]")),
        }
        return Ok(());
    }
    let d = directive(line)?;
    match d.head {
        "surface" => {
            d.check(
                line,
                &["genus", "sq", "m", "j", "class"],
                &["genus", "sq"],
                1,
            )?;
            let genus = d
                .req("genus")
                .parse::<u32>()
                .or_else(|_| line.err_at("genus=", "genus must be a non-negative integer"))?;
            let sq = parse_rational(line, d.req("sq"))?;
            let mut s = SurfaceData::new(d.positional[0], genus, sq);
            match (d.get("m"), d.get("j")) {
                (Some(m), Some(j)) => {
                    s = s.with_isotropy(parse_int(line, m)?, parse_int(line, j)?);
                }
                (None, None) => {}
                _ => return line.err("m and j must be given together"),
            }
            if let Some(c) = d.get("class") {
                let q: Result<Vec<Rational>, ParseError> = if c.is_empty() {
                    Ok(Vec::new())
                } else {
                    c.split(',').map(|x| parse_rational(line, x)).collect()
                };
                s.qclass = Some(q?);
            }
            cfg.surfaces.push(s);
        }
        "point" => {
            d.check(
                line,
                &["order", "exp", "incident"],
                &["order", "exp", "incident"],
                1,
            )?;
            let order = parse_int(line, d.req("order"))?;
            let Some((e1, e2)) = d.req("exp").split_once(',') else {
                return line.err_at("exp=", "exp takes two integers e1,e2");
            };
            let mut p = SingularPointData::double_point(d.positional[0], ids(d.req("incident")));
            p.order = order;
            p.exponents = (parse_int(line, e1)?, parse_int(line, e2)?);
            cfg.points.push(p);
        }
        "event" => {
            d.check(line, &["at"], &["at"], 2)?;
            let at = d.req("at");
            let loc = if let Some(l) = at.strip_prefix("smooth:") {
                Location::Smooth(l.to_string())
            } else if let Some(l) = at.strip_prefix("point:") {
                Location::Singular(l.to_string())
            } else {
                return line.err_at("at=", "at must be smooth:<label> or point:<id>");
            };
            cfg.events.push(IntersectionEvent::new(
                d.positional[0],
                d.positional[1],
                loc,
            ));
        }
        other => return line.err(format!("unknown [config] entry '{other}'")),
    }
    Ok(())
}

fn parse_op(line: &Line) -> Result<SurgeryOp, ParseError> {
    let d = directive(line)?;
    let op = match d.head {
        "blow_up" => {
            d.check(
                line,
                &["at", "through", "exc"],
                &["at", "through", "exc"],
                0,
            )?;
            SurgeryOp::BlowUp {
                at: d.req("at").into(),
                through: ids(d.req("through")),
                exceptional: d.req("exc").into(),
            }
        }
        "blow_down" => {
            d.check(line, &["sphere", "point"], &["sphere", "point"], 0)?;
            SurgeryOp::BlowDown {
                sphere: d.req("sphere").into(),
                point: d.req("point").into(),
            }
        }
        "forget" => {
            d.check(line, &["surface"], &["surface"], 0)?;
            SurgeryOp::Forget {
                surface: d.req("surface").into(),
            }
        }
        "rename" => {
            d.check(line, &["from", "to"], &["from", "to"], 0)?;
            SurgeryOp::Rename {
                from: d.req("from").into(),
                to: d.req("to").into(),
            }
        }
        "resolve" => {
            let keys = ["t1", "t2", "sigma", "exc"];
            d.check(line, &keys, &keys, 0)?;
            SurgeryOp::ResolveTorusPair {
                t1: d.req("t1").into(),
                t2: d.req("t2").into(),
                sigma: d.req("sigma").into(),
                exceptional: d.req("exc").into(),
            }
        }
        "set_isotropy" => {
            d.check(line, &["surface", "m", "j"], &["surface", "m", "j"], 0)?;
            SurgeryOp::SetIsotropy {
                surface: d.req("surface").into(),
                m: parse_int(line, d.req("m"))?,
                j: parse_int(line, d.req("j"))?,
            }
        }
        "rebase" => {
            d.check(line, &["basis"], &["basis"], 0)?;
            SurgeryOp::Rebase {
                basis: ids(d.req("basis")),
            }
        }
        "set_integral_pairing" => {
            // the matrix spans the rest of the line
            let Some((_, v)) = line.text.split_once("matrix=") else {
                return line.err("'set_integral_pairing' needs 'matrix='");
            };
            SurgeryOp::SetIntegralPairing {
                matrix: parse_int_matrix(line, v, 0)?,
            }
        }
        other => return line.err(format!("unknown script operation '{other}'")),
    };
    Ok(op)
}

fn parse_seifert_line(line: &Line, sb: &mut SeifertBlock) -> Result<(), ParseError> {
    let Some((k, v)) = line.key_value() else {
        return line.err("expected key = value");
    };
    match k {
        "c1b" => {
            sb.c1b = if v == "search" {
                None
            } else {
                Some(
                    v.split_whitespace()
                        .map(|x| parse_int(line, x))
                        .collect::<Result<_, _>>()?,
                )
            };
        }
        "residues" => {
            sb.residues = if v == "auto" {
                None
            } else {
                Some(parse_pairs(line, v)?)
            };
        }
        "spin_target" => {
            sb.spin_target = SpinTarget::parse(v)
                .map_or_else(|| line.err_at(v, "spin_target is spin, nonspin or any"), Ok)?;
        }
        "assign" => {
            sb.assignment = if v == "none" {
                None
            } else {
                let pairs = parse_pairs(line, v)?;
                let mut out = BTreeMap::new();
                for (k, x) in pairs {
                    if x > Int::from(1) || x < Int::zero() {
                        return line.err_at(&k, "assignments are 0 or 1");
                    }
                    out.insert(k, if x.is_zero() { 0 } else { 1 });
                }
                Some(out)
            };
        }
        "search_bound" => {
            let b = v.parse::<i64>().ok().filter(|b| *b >= 0).map_or_else(
                || line.err_at(v, "search_bound is a non-negative integer"),
                Ok,
            )?;
            sb.search_bound = Some(b);
        }
        _ => return line.err(format!("unknown key '{k}' in [seifert]")),
    }
    Ok(())
}

fn parse_group(kv: &[(&Line, &str, &str)]) -> Result<GroupBlock, ParseError> {
    let mut source: Option<(&Line, &str)> = None;
    let mut gens: Option<(&Line, &str)> = None;
    let mut rels: Option<(&Line, &str)> = None;
    let mut sub: Option<(&Line, &str)> = None;
    let mut coset_bound = None;
    let mut max_exponent = None;
    let mut seen: Vec<&str> = Vec::new();
    for (line, k, v) in kv {
        if seen.contains(k) {
            return line.err(format!("repeated key '{k}'"));
        }
        seen.push(k);
        match *k {
            "source" => source = Some((line, v)),
            "generators" => gens = Some((line, v)),
            "relators" => rels = Some((line, v)),
            "subgroup" => sub = Some((line, v)),
            "coset_bound" => {
                let b = parse_usize(line, v)?;
                if b == 0 {
                    return line.err("coset_bound must be at least 1");
                }
                coset_bound = Some(b);
            }
            "max_exponent" => {
                let e = v
                    .parse::<u32>()
                    .ok()
                    .filter(|e| (1..=16).contains(e))
                    .map_or_else(|| line.err_at(v, "max_exponent is in 1..=16"), Ok)?;
                max_exponent = Some(e);
            }
            _ => return line.err(format!("unknown key '{k}' in [group]")),
        }
    }
    let word_err = |line: &Line, e: crate::fpgroup::FpError| -> ParseError {
        ParseError {
            line: line.no,
            col: line.col,
            msg: e.to_string(),
        }
    };
    let (source, names): (GroupSource, Vec<String>) = match source {
        Some((_, "pi1_orb")) | None => {
            if let Some((l, _)) = gens.or(rels) {
                return l.err("generators and relators need source = explicit");
            }
            (
                GroupSource::Pi1Orb,
                crate::fpgroup::PI1_GENERATORS
                    .iter()
                    .map(|s| s.to_string())
                    .collect(),
            )
        }
        Some((sl, "explicit")) => {
            let Some((gl, g)) = gens else {
                return sl.err("explicit source needs generators = …");
            };
            let names: Vec<String> = g.split_whitespace().map(str::to_string).collect();
            let words = match rels {
                Some((rl, r)) => parse_relators(r, &names).map_err(|e| word_err(rl, e))?,
                None => Vec::new(),
            };
            let p = Presentation::new(names.clone(), words).map_err(|e| word_err(gl, e))?;
            (GroupSource::Explicit(p), names)
        }
        Some((sl, other)) => return sl.err_at(other, format!("unknown group source '{other}'")),
    };
    let subgroup = match sub {
        Some((sl, s)) => parse_relators(s, &names).map_err(|e| word_err(sl, e))?,
        None => Vec::new(),
    };
    Ok(GroupBlock {
        source,
        subgroup,
        coset_bound,
        max_exponent,
    })
}
