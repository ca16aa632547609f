//! Finitely presented groups: words, a relator parser, abelianization,
//! Tietze simplification, Todd–Coxeter coset enumeration, and the
//! presentation of the orbifold fundamental group of `Z`.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use thiserror::Error;

use crate::exactmath::{is_prime, smith_normal_form, Int, IntMatrix};
use crate::seifert::AbelianGroup;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FpError {
    #[error("{0} is not prime")]
    NotPrime(Int),
    #[error("exponent bound {0} outside 1..=16")]
    BadExponent(u32),
    #[error("parse error at column {col}: {msg}")]
    Parse { col: usize, msg: String },
    #[error("duplicate generator {0}")]
    DuplicateGenerator(String),
    #[error("letter {0} references a missing generator")]
    BadLetter(i32),
    #[error("decision needs a complete table of index dividing 4, got {0}")]
    NotApplicable(String),
}

/// A freely reduced word. Letter `k > 0` is generator `k - 1`, `-k` its
/// inverse.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<i32>);

impl Word {
    pub fn new(letters: Vec<i32>) -> Self {
        let mut out: Vec<i32> = Vec::with_capacity(letters.len());
        for l in letters {
            assert!(l != 0, "letter 0 is not a generator");
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn identity() -> Self {
        Word(Vec::new())
    }

    /// Generator `g` (0-based) to the power `e`.
    pub fn power_of(g: usize, e: i64) -> Self {
        let l = g as i32 + 1;
        let l = if e < 0 { -l } else { l };
        Word(vec![l; e.unsigned_abs() as usize])
    }

    pub fn letters(&self) -> &[i32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Self {
        Word(self.0.iter().rev().map(|l| -l).collect())
    }

    pub fn mul(&self, other: &Word) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word::new(v)
    }

    pub fn pow(&self, e: i64) -> Self {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut v = Vec::with_capacity(base.len() * e.unsigned_abs() as usize);
        for _ in 0..e.unsigned_abs() {
            v.extend_from_slice(&base.0);
        }
        Word::new(v)
    }

    /// `[u, v] = u v u⁻¹ v⁻¹`.
    pub fn commutator(u: &Word, v: &Word) -> Self {
        u.mul(v).mul(&u.inverse()).mul(&v.inverse())
    }

    /// Strips letters `x … x⁻¹` from both ends.
    pub fn cyclically_reduced(&self) -> Self {
        let mut a = 0;
        let mut b = self.0.len();
        while b - a >= 2 && self.0[a] == -self.0[b - 1] {
            a += 1;
            b -= 1;
        }
        Word(self.0[a..b].to_vec())
    }

    /// Exponent sum of each of `n` generators.
    pub fn exponent_sums(&self, n: usize) -> Vec<i64> {
        let mut v = vec![0i64; n];
        for l in &self.0 {
            v[l.unsigned_abs() as usize - 1] += l.signum() as i64;
        }
        v
    }

    fn occurrences(&self, g: usize) -> usize {
        self.0
            .iter()
            .filter(|l| l.unsigned_abs() as usize == g + 1)
            .count()
    }

    /// Replaces every occurrence of generator `g` by `w`.
    fn substitute(&self, g: usize, w: &Word) -> Word {
        let winv = w.inverse();
        let mut v = Vec::new();
        for &l in &self.0 {
            if l.unsigned_abs() as usize == g + 1 {
                v.extend_from_slice(if l > 0 { &w.0 } else { &winv.0 });
            } else {
                v.push(l);
            }
        }
        Word::new(v)
    }

    /// Renumbers letters after generator `g` was removed.
    fn drop_generator(&self, g: usize) -> Word {
        let g = g as i32 + 1;
        Word(
            self.0
                .iter()
                .map(|&l| if l.abs() > g { l - l.signum() } else { l })
                .collect(),
        )
    }

    /// Text with the given generator names, e.g. `x^2 y^-1`.
    pub fn render(&self, names: &[String]) -> String {
        if self.0.is_empty() {
            return "1".into();
        }
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < self.0.len() {
            let l = self.0[i];
            let mut k = i;
            while k < self.0.len() && self.0[k] == l {
                k += 1;
            }
            let run = (k - i) as i64 * l.signum() as i64;
            let name = &names[l.unsigned_abs() as usize - 1];
            parts.push(if run == 1 {
                name.clone()
            } else {
                format!("{name}^{run}")
            });
            i = k;
        }
        parts.join(" ")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Presentation {
    pub generators: Vec<String>,
    pub relators: Vec<Word>,
}

impl Presentation {
    /// Checks the letters, then cyclically reduces the relators and drops
    /// empty ones.
    pub fn new(generators: Vec<String>, relators: Vec<Word>) -> Result<Self, FpError> {
        let mut seen = BTreeSet::new();
        for g in &generators {
            if !seen.insert(g) {
                return Err(FpError::DuplicateGenerator(g.clone()));
            }
        }
        let n = generators.len() as i32;
        for r in &relators {
            if let Some(l) = r.0.iter().find(|l| l.abs() > n) {
                return Err(FpError::BadLetter(*l));
            }
        }
        let relators = relators
            .iter()
            .map(Word::cyclically_reduced)
            .filter(|r| !r.is_empty())
            .collect();
        Ok(Self {
            generators,
            relators,
        })
    }

    /// Parses comma-separated relators over the given generators, e.g.
    /// `x^2, y^2, (x y)^2, [x, y]`.
    pub fn parse(generators: &[&str], relators: &str) -> Result<Self, FpError> {
        let gens: Vec<String> = generators.iter().map(|s| s.to_string()).collect();
        let words = parse_relators(relators, &gens)?;
        Presentation::new(gens, words)
    }

    pub fn num_generators(&self) -> usize {
        self.generators.len()
    }

    pub fn total_length(&self) -> usize {
        self.relators.iter().map(Word::len).sum()
    }

    pub fn render_relators(&self) -> Vec<String> {
        self.relators
            .iter()
            .map(|r| r.render(&self.generators))
            .collect()
    }
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "< {} | {} >",
            self.generators.join(", "),
            self.render_relators().join(", ")
        )
    }
}

struct Parser<'a> {
    chars: Vec<char>,
    pos: usize,
    gens: &'a [String],
}

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, FpError> {
        Err(FpError::Parse {
            col: self.pos + 1,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len()
            && (self.chars[self.pos].is_whitespace() || self.chars[self.pos] == '*')
        {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn word(&mut self) -> Result<Word, FpError> {
        let mut w = Word::identity();
        while let Some(c) = self.peek() {
            if c == ',' || c == ')' || c == ']' {
                break;
            }
            w = w.mul(&self.factor()?);
        }
        Ok(w)
    }

    fn factor(&mut self) -> Result<Word, FpError> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            if matches!(self.chars.get(self.pos), Some('-') | Some('+')) {
                self.pos += 1;
            }
            while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            let text: String = self.chars[start..self.pos].iter().collect();
            let Ok(e) = text.parse::<i64>() else {
                self.pos = start;
                return self.err("expected an integer exponent");
            };
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Word, FpError> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let w = self.word()?;
                if self.peek() != Some(')') {
                    return self.err("expected ')'");
                }
                self.pos += 1;
                Ok(w)
            }
            Some('[') => {
                self.pos += 1;
                let u = self.word()?;
                if self.peek() != Some(',') {
                    return self.err("expected ',' in commutator");
                }
                self.pos += 1;
                let v = self.word()?;
                if self.peek() != Some(']') {
                    return self.err("expected ']'");
                }
                self.pos += 1;
                Ok(Word::commutator(&u, &v))
            }
            Some('1') => {
                self.pos += 1;
                Ok(Word::identity())
            }
            Some(c) if c.is_alphabetic() || c == '_' => {
                let start = self.pos;
                while self.pos < self.chars.len()
                    && (self.chars[self.pos].is_alphanumeric()
                        || self.chars[self.pos] == '_'
                        || self.chars[self.pos] == '\'')
                {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                match self.gens.iter().position(|g| *g == name) {
                    Some(i) => Ok(Word::power_of(i, 1)),
                    None => {
                        self.pos = start;
                        self.err(format!("unknown generator '{name}'"))
                    }
                }
            }
            Some(c) => self.err(format!("unexpected '{c}'")),
            None => self.err("unexpected end of input"),
        }
    }
}

/// Parses a single word.
pub fn parse_word(text: &str, gens: &[String]) -> Result<Word, FpError> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
        gens,
    };
    let w = p.word()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(w)
}

/// Parses a comma-separated list of words; an all-blank text is empty.
pub fn parse_relators(text: &str, gens: &[String]) -> Result<Vec<Word>, FpError> {
    let mut p = Parser {
        chars: text.chars().collect(),
        pos: 0,
        gens,
    };
    let mut out = Vec::new();
    if p.peek().is_none() {
        return Ok(out);
    }
    loop {
        out.push(p.word()?);
        match p.peek() {
            Some(',') => p.pos += 1,
            None => return Ok(out),
            Some(c) => return p.err(format!("unexpected '{c}'")),
        }
    }
}

/// Relator exponent-sum matrix, one row per relator.
pub fn exponent_matrix(p: &Presentation) -> IntMatrix {
    let n = p.num_generators();
    let rows: Vec<Vec<Int>> = p
        .relators
        .iter()
        .map(|r| r.exponent_sums(n).into_iter().map(Int::from).collect())
        .collect();
    if rows.is_empty() {
        IntMatrix::zeros(0, n)
    } else {
        IntMatrix::from_rows(&rows)
    }
}

pub fn abelianize(p: &Presentation) -> AbelianGroup {
    let n = p.num_generators();
    let m = exponent_matrix(p);
    let factors = smith_normal_form(&m).invariant_factors();
    let rank = n - factors.len();
    AbelianGroup::from_cyclic(rank, &factors).expect("invariant factors are positive")
}

/// Longest word a generator may be replaced by during elimination.
const MAX_SUBSTITUTION: usize = 24;

/// Free and cyclic reduction, removal of trivial and repeated relators,
/// merging of pure powers `g^a, g^b` into `g^gcd(a,b)`, and elimination of
/// generators occurring exactly once in some relator.
pub fn tietze_simplify(p: &Presentation) -> Presentation {
    let mut gens = p.generators.clone();
    let mut rels: Vec<Word> = p.relators.clone();
    loop {
        rels = tidy(rels);
        if merge_powers(&mut rels) {
            continue;
        }
        match pick_elimination(&rels, gens.len()) {
            Some((ri, g)) => {
                let r = rels.remove(ri);
                let w = isolate(&r, g);
                rels = rels
                    .iter()
                    .map(|x| x.substitute(g, &w).drop_generator(g))
                    .collect();
                gens.remove(g);
            }
            None => break,
        }
    }
    Presentation {
        generators: gens,
        relators: rels,
    }
}

/// Cyclic reduction, a canonical rotation up to inversion, deduplication.
fn tidy(rels: Vec<Word>) -> Vec<Word> {
    let mut seen = BTreeSet::new();
    let mut out = Vec::new();
    for r in rels {
        let r = r.cyclically_reduced();
        if r.is_empty() {
            continue;
        }
        if seen.insert(canonical_cyclic(&r)) {
            out.push(r);
        }
    }
    out
}

/// Relators longer than this are deduplicated verbatim.
const MAX_ROTATED: usize = 64;

fn canonical_cyclic(r: &Word) -> Vec<i32> {
    if r.len() > MAX_ROTATED {
        return r.0.clone();
    }
    let mut best: Option<Vec<i32>> = None;
    for w in [r.clone(), r.inverse()] {
        let n = w.len();
        for s in 0..n {
            let rot: Vec<i32> = w.0[s..].iter().chain(&w.0[..s]).copied().collect();
            if best.as_ref().is_none_or(|b| rot < *b) {
                best = Some(rot);
            }
        }
    }
    best.unwrap_or_default()
}

fn pure_power(r: &Word) -> Option<(usize, i64)> {
    let first = *r.0.first()?;
    r.0.iter()
        .all(|l| *l == first)
        .then(|| (first.unsigned_abs() as usize - 1, r.len() as i64))
}

fn merge_powers(rels: &mut Vec<Word>) -> bool {
    for i in 0..rels.len() {
        let Some((g, a)) = pure_power(&rels[i]) else {
            continue;
        };
        for j in i + 1..rels.len() {
            if let Some((h, b)) = pure_power(&rels[j]) {
                if g == h {
                    let d = a.gcd(&b);
                    rels[i] = Word::power_of(g, d);
                    rels.remove(j);
                    return true;
                }
            }
        }
    }
    false
}

/// The shortest relator in which some generator occurs exactly once, if the
/// resulting substitution is short enough.
fn pick_elimination(rels: &[Word], n: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize, usize)> = None;
    for (ri, r) in rels.iter().enumerate() {
        if r.len() > MAX_SUBSTITUTION + 1 {
            continue;
        }
        for g in 0..n {
            // ties go to the later generator, keeping early ones
            if r.occurrences(g) == 1
                && best.is_none_or(|(len, _, bg)| r.len() < len || (r.len() == len && g > bg))
            {
                best = Some((r.len(), ri, g));
            }
        }
    }
    best.map(|(_, ri, g)| (ri, g))
}

/// Solves `r = 1` for the single occurrence of `g`.
fn isolate(r: &Word, g: usize) -> Word {
    let i =
        r.0.iter()
            .position(|l| l.unsigned_abs() as usize == g + 1)
            .unwrap();
    // r = u g^ε v  ⇒  g^ε = u⁻¹ v⁻¹
    let u = Word(r.0[..i].to_vec());
    let v = Word(r.0[i + 1..].to_vec());
    let w = u.inverse().mul(&v.inverse());
    if r.0[i] > 0 {
        w
    } else {
        w.inverse()
    }
}

/// Relators read off a complete table over the trivial subgroup, where the
/// action on cosets is regular: each generator that acts trivially, equals
/// an earlier kept generator, or equals a product of two kept generators
/// yields a derived relator. Kept generators are those not expressed this
/// way, in presentation order.
pub fn table_consequences(p: &Presentation, table: &CosetTable) -> Vec<Word> {
    if table.index().is_none() {
        return Vec::new();
    }
    let image = |w: &Word| table.trace(0, w);
    let mut kept: Vec<usize> = Vec::new();
    let mut out = Vec::new();
    'gens: for g in 0..p.num_generators() {
        let gw = Word::power_of(g, 1);
        let target = image(&gw);
        if target == 0 {
            out.push(gw);
            continue;
        }
        for &h in &kept {
            for e in [1, -1] {
                let hw = Word::power_of(h, e);
                if image(&hw) == target {
                    out.push(gw.mul(&hw.inverse()));
                    continue 'gens;
                }
            }
        }
        for &h in &kept {
            for &k in &kept {
                let hk = Word::power_of(h, 1).mul(&Word::power_of(k, 1));
                if !hk.is_empty() && image(&hk) == target {
                    out.push(gw.mul(&hk.inverse()));
                    continue 'gens;
                }
            }
        }
        kept.push(g);
    }
    out
}

/// Adds [`table_consequences`] and then runs [`tietze_simplify`].
pub fn tietze_with_table(p: &Presentation, table: &CosetTable) -> Presentation {
    let mut q = p.clone();
    q.relators.extend(table_consequences(p, table));
    tietze_simplify(&q)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CosetStatus {
    Complete(usize),
    Exhausted(usize),
}

/// Columns `2g` and `2g + 1` hold the action of generator `g` and its
/// inverse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetTable {
    pub status: CosetStatus,
    pub rows: Vec<Vec<usize>>,
    /// Total cosets defined during the run.
    pub defined: usize,
}

impl CosetTable {
    pub fn index(&self) -> Option<usize> {
        match self.status {
            CosetStatus::Complete(n) => Some(n),
            CosetStatus::Exhausted(_) => None,
        }
    }

    /// Image of coset `c` under a word.
    pub fn trace(&self, c: usize, w: &Word) -> usize {
        w.letters().iter().fold(c, |c, &l| self.rows[c][column(l)])
    }

    /// Every relator fixes every coset, every subgroup generator fixes coset
    /// 0, and each column is a permutation.
    pub fn verify(&self, p: &Presentation, subgroup: &[Word]) -> bool {
        if self.index().is_none() {
            return false;
        }
        let n = self.rows.len();
        for col in 0..2 * p.num_generators() {
            let mut hit = vec![false; n];
            for c in 0..n {
                let d = self.rows[c][col];
                if d >= n || hit[d] || self.rows[d][col ^ 1] != c {
                    return false;
                }
                hit[d] = true;
            }
        }
        (0..n).all(|c| p.relators.iter().all(|r| self.trace(c, r) == c))
            && subgroup.iter().all(|h| self.trace(0, h) == 0)
    }

    pub fn render(&self, p: &Presentation) -> String {
        let mut s = String::from("coset");
        for g in &p.generators {
            s.push_str(&format!(" {g} {g}^-1"));
        }
        s.push('\n');
        for (c, row) in self.rows.iter().enumerate() {
            s.push_str(&c.to_string());
            for d in row {
                s.push(' ');
                s.push_str(&d.to_string());
            }
            s.push('\n');
        }
        s
    }
}

const NONE: usize = usize::MAX;

fn column(l: i32) -> usize {
    let g = l.unsigned_abs() as usize - 1;
    if l > 0 {
        2 * g
    } else {
        2 * g + 1
    }
}

struct Enumerator {
    table: Vec<Vec<usize>>,
    parent: Vec<usize>,
    cols: usize,
    max: usize,
    live: usize,
}

struct Overflow;

impl Enumerator {
    fn rep(&mut self, c: usize) -> usize {
        let mut r = c;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut c = c;
        while self.parent[c] != r {
            let next = self.parent[c];
            self.parent[c] = r;
            c = next;
        }
        r
    }

    fn is_live(&self, c: usize) -> bool {
        self.parent[c] == c
    }

    fn define(&mut self, c: usize, x: usize) -> Result<(), Overflow> {
        if self.table.len() >= self.max {
            return Err(Overflow);
        }
        let d = self.table.len();
        self.table.push(vec![NONE; self.cols]);
        self.parent.push(d);
        self.live += 1;
        self.table[c][x] = d;
        self.table[d][x ^ 1] = c;
        Ok(())
    }

    fn merge(&mut self, a: usize, b: usize, queue: &mut Vec<usize>) {
        let (a, b) = (self.rep(a), self.rep(b));
        if a == b {
            return;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.parent[hi] = lo;
        self.live -= 1;
        queue.push(hi);
    }

    fn coincidence(&mut self, a: usize, b: usize) {
        let mut queue = Vec::new();
        self.merge(a, b, &mut queue);
        let mut i = 0;
        while i < queue.len() {
            let e = queue[i];
            i += 1;
            for x in 0..self.cols {
                let f = self.table[e][x];
                if f == NONE {
                    continue;
                }
                self.table[f][x ^ 1] = NONE;
                let e1 = self.rep(e);
                let f1 = self.rep(f);
                if self.table[e1][x] != NONE {
                    let t = self.table[e1][x];
                    self.merge(f1, t, &mut queue);
                } else if self.table[f1][x ^ 1] != NONE {
                    let t = self.table[f1][x ^ 1];
                    self.merge(e1, t, &mut queue);
                } else {
                    self.table[e1][x] = f1;
                    self.table[f1][x ^ 1] = e1;
                }
            }
        }
    }

    /// HLT scan of `w` at coset `c`, defining cosets to complete it.
    fn scan_and_fill(&mut self, c: usize, w: &[usize]) -> Result<(), Overflow> {
        if w.is_empty() {
            return Ok(());
        }
        let mut f = c;
        let mut b = c;
        let mut i = 0usize;
        let mut j = w.len() as isize - 1;
        loop {
            while (i as isize) <= j && self.table[f][w[i]] != NONE {
                f = self.table[f][w[i]];
                i += 1;
            }
            if (i as isize) > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j >= i as isize && self.table[b][w[j as usize] ^ 1] != NONE {
                b = self.table[b][w[j as usize] ^ 1];
                j -= 1;
            }
            if j < i as isize {
                self.coincidence(f, b);
                return Ok(());
            }
            if j == i as isize {
                self.table[f][w[i]] = b;
                self.table[b][w[i] ^ 1] = f;
                return Ok(());
            }
            self.define(f, w[i])?;
        }
    }
}

/// Todd–Coxeter enumeration of the cosets of `⟨subgroup⟩`, HLT style with
/// coincidence processing. At most `max_cosets` cosets are ever defined.
pub fn coset_enumerate(p: &Presentation, subgroup: &[Word], max_cosets: usize) -> CosetTable {
    assert!(max_cosets >= 1);
    let cols = 2 * p.num_generators();
    let mut e = Enumerator {
        table: vec![vec![NONE; cols]],
        parent: vec![0],
        cols,
        max: max_cosets,
        live: 1,
    };
    let rels: Vec<Vec<usize>> = p
        .relators
        .iter()
        .map(|r| r.letters().iter().map(|&l| column(l)).collect())
        .collect();
    let subs: Vec<Vec<usize>> = subgroup
        .iter()
        .map(|h| h.letters().iter().map(|&l| column(l)).collect())
        .collect();
    let exhausted = |e: &Enumerator| CosetTable {
        status: CosetStatus::Exhausted(max_cosets),
        rows: Vec::new(),
        defined: e.table.len(),
    };
    for h in &subs {
        if e.scan_and_fill(0, h).is_err() {
            return exhausted(&e);
        }
    }
    let mut c = 0;
    while c < e.table.len() {
        if e.is_live(c) {
            for r in &rels {
                if e.scan_and_fill(c, r).is_err() {
                    return exhausted(&e);
                }
                if !e.is_live(c) {
                    break;
                }
            }
            if e.is_live(c) {
                for x in 0..cols {
                    if e.table[c][x] == NONE && e.define(c, x).is_err() {
                        return exhausted(&e);
                    }
                }
            }
        }
        c += 1;
    }
    // compact the live cosets
    let live: Vec<usize> = (0..e.table.len()).filter(|&c| e.is_live(c)).collect();
    let mut renum = vec![NONE; e.table.len()];
    for (k, &c) in live.iter().enumerate() {
        renum[c] = k;
    }
    let rows: Vec<Vec<usize>> = live
        .iter()
        .map(|&c| e.table[c].iter().map(|&d| renum[d]).collect())
        .collect();
    let table = CosetTable {
        status: CosetStatus::Complete(rows.len()),
        rows,
        defined: e.table.len(),
    };
    assert!(
        table.verify(p, subgroup),
        "coset table fails the relator replay"
    );
    table
}

/// Index of the orbifold-group generators in [`build_pi1_orb_presentation`].
pub const PI1_GENERATORS: [&str; 11] = [
    "x1", "y1", "z1", "x2", "y2", "z2", "alpha", "beta", "g1", "g2", "U",
];

/// Presentation of `π₁^orb(Z)` for multiplicities `mᵢ = pⁱ`, with torsion
/// relators for `i ≤ max_exponent`. `g1`, `g2` are the loops around `V₁`,
/// `V₂` and `U` the common loop around `V₃ … V₈`; loops around the
/// remaining surfaces are trivial and omitted.
pub fn build_pi1_orb_presentation(p: &Int, max_exponent: u32) -> Result<Presentation, FpError> {
    if !is_prime(p) {
        return Err(FpError::NotPrime(p.clone()));
    }
    if !(1..=16).contains(&max_exponent) {
        return Err(FpError::BadExponent(max_exponent));
    }
    let gens: Vec<String> = PI1_GENERATORS.iter().map(|s| s.to_string()).collect();
    let mut text = vec![
        // the circle-bundle relation over V3..V8
        "[alpha, beta] U".to_string(),
        // V2: a torus with one orbifold point glued to a pillowcase
        "[alpha, beta] x2 y2 z2 g2^-2".into(),
        "x2^2 g2^-1".into(),
        "y2^2 g2^-1".into(),
        "z2^2 g2^-1".into(),
        // V1: genus two with both handles pushed to alpha, beta
        "[alpha, beta]^2 x1 y1 z1 g1^-1".into(),
        "x1^2 g1^-1".into(),
        "y1^2 g1^-1".into(),
        "z1^2 g1^-1".into(),
        // lifts of the fiber loops to the pillowcase
        "alpha (x2 y2)^-1".into(),
        "beta (z2 x2)^-1".into(),
        // special fibers identify the two pillowcases
        "x1 x2^-1".into(),
        "y1 y2^-1".into(),
        "z1 z2^-1".into(),
        // a generic section
        "U^8 g1^5 g2^3".into(),
    ];
    for c in ["g1", "g2", "U"] {
        for g in PI1_GENERATORS {
            if g != c {
                text.push(format!("[{c}, {g}]"));
            }
        }
    }
    let mut rels = parse_relators(&text.join(", "), &gens)?;
    let pow = |e: u32| -> i64 {
        let v: Int = num_traits::pow(p.clone(), e as usize);
        i64::try_from(v).expect("torsion exponent fits in i64")
    };
    rels.push(Word::power_of(8, pow(1)));
    if max_exponent >= 2 {
        rels.push(Word::power_of(9, pow(2)));
    }
    for i in 3..=max_exponent.min(8) {
        rels.push(Word::power_of(10, pow(i)));
    }
    Presentation::new(gens, rels)
}

/// `π₁(M)` is trivial when `π₁^orb` is a quotient of `ℤ₂ × ℤ₂` (making
/// `π₁(M)` abelian) and `H₁(M) = 0`.
pub fn simply_connected_decision(pi1orb: &CosetTable, h1_zero: bool) -> Result<bool, FpError> {
    match pi1orb.status {
        CosetStatus::Complete(n) if 4 % n == 0 => Ok(h1_zero),
        CosetStatus::Complete(n) => Err(FpError::NotApplicable(format!("index {n}"))),
        CosetStatus::Exhausted(b) => Err(FpError::NotApplicable(format!("exhausted at {b}"))),
    }
}
