//! Line-oriented problem files.
//!
//! ```text
//! # harmonic oscillator
//! independent t
//! dependent u
//! lagrangian L = 1/2*d(u;t)^2 - 1/2*u^2
//! symmetry time { X[t] = 1, Y[u] = 0 }
//! normal N { u_tt <- -u }
//! check energy = current L time --normal N
//! ```
//!
//! Blocks may span lines; entries are separated by commas or newlines
//! outside parentheses. Object names are unique across all kinds; check
//! directives have their own namespace.

use std::collections::{BTreeMap, BTreeSet};

use crate::discrete::{DiscreteLagrangian, StencilSpace};
use crate::error::{Error, ParseError, ParseErrorKind, Result, ScopeError};
use crate::expr::{parse, Expr, JetSpace, MultiIndex, Scope, Var};
use crate::jet::{Current, SymmetryCandidate};
use crate::noether::{GaugeFamily, NormalForm, Rule};

/// Headroom used while gauge blocks are read, before their order is known.
const PROVISIONAL_HEADROOM: u32 = 64;

#[derive(Clone, Debug, Default)]
pub struct ParseOptions {
    /// Overrides the derivative headroom `2κ + σ + 2`.
    pub max_order: Option<u32>,
}

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    /// Subcommand words, without the file argument.
    pub args: Vec<String>,
}

#[derive(Clone, Debug)]
pub struct DiscreteProblem {
    pub space: StencilSpace,
    pub lagrangian: DiscreteLagrangian,
}

#[derive(Clone, Debug, Default)]
pub struct Problem {
    space: Option<JetSpace>,
    stencil: Option<StencilSpace>,
    pub lagrangians: BTreeMap<String, Expr>,
    pub symmetries: BTreeMap<String, SymmetryCandidate>,
    pub gauges: BTreeMap<String, GaugeFamily>,
    pub normals: BTreeMap<String, NormalForm>,
    pub currents: BTreeMap<String, Current>,
    pub equations: BTreeMap<String, Vec<Expr>>,
    pub multipliers: BTreeMap<String, Vec<Expr>>,
    pub discretes: BTreeMap<String, DiscreteProblem>,
    pub dsymmetries: BTreeMap<String, Vec<Expr>>,
    pub checks: BTreeMap<String, Check>,
}

impl Problem {
    pub fn parse(text: &str) -> Result<Self> {
        Problem::parse_with(text, &ParseOptions::default())
    }

    pub fn parse_with(text: &str, options: &ParseOptions) -> Result<Self> {
        let statements = Cursor::new(text).statements()?;
        Ok(Builder::default().build(statements, options)?)
    }

    pub fn space(&self) -> Result<&JetSpace> {
        self.space
            .as_ref()
            .ok_or_else(|| Error::Space("no independent variables declared".into()))
    }

    /// The file-wide stencil used for discrete characteristics.
    pub fn stencil(&self) -> Result<&StencilSpace> {
        self.stencil
            .as_ref()
            .ok_or_else(|| Error::Space("no dependent variables declared".into()))
    }

    pub fn lagrangian(&self, name: &str) -> Result<&Expr> {
        lookup(&self.lagrangians, "lagrangian", name)
    }

    pub fn symmetry(&self, name: &str) -> Result<&SymmetryCandidate> {
        lookup(&self.symmetries, "symmetry", name)
    }

    pub fn gauge(&self, name: &str) -> Result<&GaugeFamily> {
        lookup(&self.gauges, "gauge", name)
    }

    pub fn normal(&self, name: &str) -> Result<&NormalForm> {
        lookup(&self.normals, "normal form", name)
    }

    pub fn current(&self, name: &str) -> Result<&Current> {
        lookup(&self.currents, "current", name)
    }

    pub fn equation_system(&self, name: &str) -> Result<&[Expr]> {
        lookup(&self.equations, "equations", name).map(Vec::as_slice)
    }

    pub fn multiplier(&self, name: &str) -> Result<&[Expr]> {
        lookup(&self.multipliers, "multiplier", name).map(Vec::as_slice)
    }

    pub fn discrete(&self, name: &str) -> Result<&DiscreteProblem> {
        lookup(&self.discretes, "discrete problem", name)
    }

    pub fn dsymmetry(&self, name: &str) -> Result<&[Expr]> {
        lookup(&self.dsymmetries, "discrete symmetry", name).map(Vec::as_slice)
    }
}

fn lookup<'a, T>(map: &'a BTreeMap<String, T>, kind: &'static str, name: &str) -> Result<&'a T> {
    map.get(name).ok_or_else(|| Error::Unknown {
        kind,
        name: name.to_string(),
    })
}

/// Source text with its 1-based position.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Snippet {
    text: String,
    line: usize,
    col: usize,
}

impl Snippet {
    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError::new(self.line, self.col, kind)
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        ParseError::syntax(self.line, self.col, msg)
    }

    fn expr(&self, scope: &dyn Scope) -> Result<Expr, ParseError> {
        parse(&self.text, scope).map_err(|e| e.offset(self.line, self.col))
    }
}

type Located = (char, usize, usize);

fn snippet(chars: &[Located]) -> Option<Snippet> {
    let start = chars.iter().position(|(c, ..)| !c.is_whitespace())?;
    let end = chars.iter().rposition(|(c, ..)| !c.is_whitespace())?;
    let (_, line, col) = chars[start];
    Some(Snippet {
        text: chars[start..=end].iter().map(|(c, ..)| c).collect(),
        line,
        col,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Op {
    Assign,
    Arrow,
}

#[derive(Clone, Debug)]
struct Entry {
    key: Snippet,
    op: Op,
    value: Snippet,
}

#[derive(Clone, Debug)]
enum Statement {
    Names {
        keyword: Snippet,
        names: Vec<Snippet>,
    },
    Order(Snippet),
    Assign {
        keyword: Snippet,
        name: Snippet,
        value: Snippet,
    },
    Block {
        keyword: Snippet,
        name: Snippet,
        entries: Vec<Entry>,
    },
}

struct Cursor {
    chars: Vec<Located>,
    pos: usize,
}

fn is_name_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.'
}

impl Cursor {
    fn new(text: &str) -> Self {
        let mut chars = Vec::new();
        for (l, line) in text.lines().enumerate() {
            let body = line.split('#').next().unwrap_or("");
            chars.extend(body.chars().enumerate().map(|(c, ch)| (ch, l + 1, c + 1)));
            chars.push(('\n', l + 1, body.chars().count() + 1));
        }
        Cursor { chars, pos: 0 }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|(c, ..)| *c)
    }

    fn here(&self) -> (usize, usize) {
        self.chars
            .get(self.pos)
            .or(self.chars.last())
            .map(|&(_, l, c)| (l, c))
            .unwrap_or((1, 1))
    }

    fn error(&self, msg: impl Into<String>) -> ParseError {
        let (l, c) = self.here();
        ParseError::syntax(l, c, msg)
    }

    fn skip_blank(&mut self, newlines: bool) {
        while let Some(c) = self.peek() {
            if c == '\n' && !newlines || !c.is_whitespace() {
                break;
            }
            self.pos += 1;
        }
    }

    fn word(&mut self) -> Option<Snippet> {
        let start = self.pos;
        while self.peek().is_some_and(is_name_char) {
            self.pos += 1;
        }
        snippet(&self.chars[start..self.pos])
    }

    fn expect_word(&mut self, what: &str) -> Result<Snippet, ParseError> {
        self.skip_blank(false);
        self.word()
            .ok_or_else(|| self.error(format!("expected {what}")))
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        self.skip_blank(false);
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{c}'")))
        }
    }

    fn rest_of_line(&mut self) -> Option<Snippet> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c != '\n') {
            self.pos += 1;
        }
        snippet(&self.chars[start..self.pos])
    }

    fn end_of_line(&mut self) -> Result<(), ParseError> {
        self.skip_blank(false);
        match self.peek() {
            None | Some('\n') => Ok(()),
            Some(c) => Err(self.error(format!("unexpected '{c}'"))),
        }
    }

    fn statements(mut self) -> Result<Vec<Statement>, ParseError> {
        let mut out = Vec::new();
        loop {
            self.skip_blank(true);
            if self.peek().is_none() {
                return Ok(out);
            }
            let keyword = self
                .word()
                .ok_or_else(|| self.error("expected a keyword"))?;
            out.push(self.statement(keyword)?);
        }
    }

    fn statement(&mut self, keyword: Snippet) -> Result<Statement, ParseError> {
        match keyword.text.as_str() {
            "independent" | "dependent" | "arbitrary" => {
                let mut names = Vec::new();
                loop {
                    self.skip_blank(false);
                    match self.peek() {
                        None | Some('\n') => break,
                        _ => names.push(self.expect_word("a variable name")?),
                    }
                }
                if names.is_empty() {
                    return Err(
                        keyword.syntax(format!("'{}' needs at least one name", keyword.text))
                    );
                }
                Ok(Statement::Names { keyword, names })
            }
            "order" => {
                let value = self.expect_word("an order")?;
                self.end_of_line()?;
                Ok(Statement::Order(value))
            }
            "lagrangian" | "check" => {
                let name = self.expect_word("a name")?;
                self.expect('=')?;
                let value = self
                    .rest_of_line()
                    .ok_or_else(|| self.error("expected a value after '='"))?;
                Ok(Statement::Assign {
                    keyword,
                    name,
                    value,
                })
            }
            "symmetry" | "gauge" | "normal" | "current" | "equations" | "multiplier"
            | "discrete" | "dsymmetry" => {
                let name = self.expect_word("a name")?;
                self.skip_blank(true);
                self.expect('{')?;
                let entries = self.block()?;
                Ok(Statement::Block {
                    keyword,
                    name,
                    entries,
                })
            }
            other => Err(keyword.syntax(format!("unknown keyword '{other}'"))),
        }
    }

    fn block(&mut self) -> Result<Vec<Entry>, ParseError> {
        let open = self.here();
        let mut entries = Vec::new();
        let mut start = self.pos;
        let mut depth = 0usize;
        loop {
            let Some(c) = self.peek() else {
                return Err(ParseError::syntax(open.0, open.1, "unclosed '{'"));
            };
            match c {
                '(' | '[' => depth += 1,
                ')' | ']' => depth = depth.saturating_sub(1),
                '{' => return Err(self.error("nested '{'")),
                ',' | '\n' | '}' if depth == 0 => {
                    if let Some(entry) = entry(&self.chars[start..self.pos])? {
                        entries.push(entry);
                    }
                    start = self.pos + 1;
                    if c == '}' {
                        self.pos += 1;
                        return Ok(entries);
                    }
                }
                _ => {}
            }
            self.pos += 1;
        }
    }
}

fn entry(chars: &[Located]) -> Result<Option<Entry>, ParseError> {
    let Some(whole) = snippet(chars) else {
        return Ok(None);
    };
    let mut depth = 0usize;
    for (k, &(c, ..)) in chars.iter().enumerate() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => depth = depth.saturating_sub(1),
            '<' if depth == 0 && chars.get(k + 1).map(|x| x.0) == Some('-') => {
                return split(&whole, chars, k, 2, Op::Arrow).map(Some)
            }
            '=' if depth == 0 => return split(&whole, chars, k, 1, Op::Assign).map(Some),
            _ => {}
        }
    }
    Err(whole.syntax("expected 'key = value' or 'lead <- value'"))
}

fn split(
    whole: &Snippet,
    chars: &[Located],
    at: usize,
    len: usize,
    op: Op,
) -> Result<Entry, ParseError> {
    let key = snippet(&chars[..at]).ok_or_else(|| whole.syntax("missing key"))?;
    let value = snippet(&chars[at + len..]).ok_or_else(|| {
        let (_, l, c) = chars[at];
        ParseError::syntax(l, c, "missing value")
    })?;
    Ok(Entry { key, op, value })
}

#[derive(Default)]
struct Builder {
    independents: Vec<String>,
    dependents: Vec<String>,
    arbitrary: Vec<String>,
    order: Option<u32>,
    names: BTreeSet<String>,
}

fn parse_error(e: Error, at: &Snippet) -> ParseError {
    match e {
        Error::Parse(p) => p,
        other => at.syntax(other.to_string()),
    }
}

impl Builder {
    fn build(
        mut self,
        statements: Vec<Statement>,
        options: &ParseOptions,
    ) -> Result<Problem, ParseError> {
        let mut blocks = Vec::new();
        for st in statements {
            match st {
                Statement::Names { keyword, names } => {
                    let list = match keyword.text.as_str() {
                        "independent" => &mut self.independents,
                        "dependent" => &mut self.dependents,
                        _ => &mut self.arbitrary,
                    };
                    list.extend(names.into_iter().map(|n| n.text));
                }
                Statement::Order(value) => {
                    let k: u32 = value
                        .text
                        .parse()
                        .ok()
                        .filter(|&k| k >= 1)
                        .ok_or_else(|| value.syntax("order must be a positive integer"))?;
                    if self.order.replace(k).is_some() {
                        return Err(value.syntax("order declared twice"));
                    }
                }
                other => blocks.push(other),
            }
        }
        let mut check_names = BTreeSet::new();
        for st in &blocks {
            let (Statement::Assign { keyword, name, .. } | Statement::Block { keyword, name, .. }) =
                st
            else {
                unreachable!()
            };
            let names = if keyword.text == "check" {
                &mut check_names
            } else {
                &mut self.names
            };
            if !names.insert(name.text.clone()) {
                return Err(name.syntax(format!("duplicate name '{}'", name.text)));
            }
        }

        let mut problem = Problem::default();
        let all_deps: Vec<String> = self
            .dependents
            .iter()
            .chain(&self.arbitrary)
            .cloned()
            .collect();
        let order = self.order.unwrap_or(1);
        let first = blocks.first().map(keyword_of);

        if !self.independents.is_empty() {
            let at = first.clone().unwrap_or(Snippet {
                text: String::new(),
                line: 1,
                col: 1,
            });
            let provisional = JetSpace::new(&self.independents, &all_deps, order)
                .map_err(|e| parse_error(e, &at))?
                .with_headroom(PROVISIONAL_HEADROOM);
            let mut sigma = 0;
            for st in &blocks {
                if let Statement::Block {
                    keyword, entries, ..
                } = st
                {
                    if keyword.text == "gauge" {
                        for e in entries {
                            sigma = sigma.max(e.value.expr(&provisional)?.max_order());
                        }
                    }
                }
            }
            let headroom = options.max_order.unwrap_or(2 * order + sigma + 2);
            problem.space = Some(provisional.with_headroom(headroom));
        }

        let mut stencil_width = 1;
        for st in &blocks {
            if let Statement::Block {
                keyword, entries, ..
            } = st
            {
                if keyword.text == "discrete" {
                    if let Some(e) = entries.iter().find(|e| e.key.text == "width") {
                        stencil_width = stencil_width.max(width(e)?);
                    }
                }
            }
        }
        let window = 3 * stencil_width + 3;
        if !self.dependents.is_empty() {
            let at = first.clone().unwrap_or(Snippet {
                text: String::new(),
                line: 1,
                col: 1,
            });
            problem.stencil = Some(
                StencilSpace::new(&self.dependents, stencil_width)
                    .map_err(|e| parse_error(e, &at))?
                    .with_window(window),
            );
        }

        for st in blocks {
            match st {
                Statement::Assign {
                    keyword,
                    name,
                    value,
                } => {
                    if keyword.text == "check" {
                        let args = value.text.split_whitespace().map(str::to_string).collect();
                        problem.checks.insert(
                            name.text.clone(),
                            Check {
                                name: name.text,
                                args,
                            },
                        );
                    } else {
                        let space = self.space(&problem, &keyword)?;
                        let l = value.expr(space)?;
                        if l.max_order() > order {
                            return Err(value.error(ParseErrorKind::Scope(
                                ScopeError::OrderExceeded {
                                    order: l.max_order(),
                                    max: order,
                                },
                            )));
                        }
                        problem.lagrangians.insert(name.text, l);
                    }
                }
                Statement::Block {
                    keyword,
                    name,
                    entries,
                } => {
                    self.block(&mut problem, &keyword, &name, &entries, window)?;
                }
                _ => unreachable!(),
            }
        }
        Ok(problem)
    }

    fn space<'a>(&self, problem: &'a Problem, at: &Snippet) -> Result<&'a JetSpace, ParseError> {
        problem
            .space
            .as_ref()
            .ok_or_else(|| at.syntax(format!("'{}' needs an 'independent' declaration", at.text)))
    }

    fn stencil<'a>(
        &self,
        problem: &'a Problem,
        at: &Snippet,
    ) -> Result<&'a StencilSpace, ParseError> {
        problem
            .stencil
            .as_ref()
            .ok_or_else(|| at.syntax(format!("'{}' needs a 'dependent' declaration", at.text)))
    }

    fn block(
        &self,
        problem: &mut Problem,
        keyword: &Snippet,
        name: &Snippet,
        entries: &[Entry],
        window: i32,
    ) -> Result<(), ParseError> {
        let key = name.text.clone();
        match keyword.text.as_str() {
            "symmetry" => {
                let space = self.space(problem, keyword)?;
                let mut x = vec![Expr::zero(); space.dims()];
                let mut y = vec![Expr::zero(); space.fields()];
                let mut c = vec![Expr::zero(); space.dims()];
                for e in entries {
                    let (label, slot) = indexed(e, Op::Assign)?;
                    let (target, names) = match label.as_str() {
                        "X" => (&mut x, space.independents()),
                        "Y" => (&mut y, space.dependents()),
                        "C" => (&mut c, space.independents()),
                        _ => return Err(e.key.syntax("expected X[..], Y[..] or C[..]")),
                    };
                    let k = position(names, &slot, &e.key)?;
                    target[k] = e.value.expr(space)?;
                }
                let s = SymmetryCandidate::new(space, x, y, Some(Current(c)))
                    .map_err(|err| parse_error(err, name))?;
                problem.symmetries.insert(key, s);
            }
            "gauge" => {
                let space = self.space(problem, keyword)?;
                let mut exprs = vec![Expr::zero(); space.fields()];
                let mut used = BTreeSet::new();
                for e in entries {
                    expect_op(e, Op::Arrow)?;
                    let k = position(space.dependents(), &e.key.text, &e.key)?;
                    let value = e.value.expr(space)?;
                    for v in value.vars() {
                        if let Var::Jet { dep, .. } = v {
                            if self.is_arbitrary(space, dep) {
                                used.insert(dep);
                            }
                        }
                    }
                    exprs[k] = value;
                }
                let parameter = match used.len() {
                    1 => *used.iter().next().unwrap(),
                    0 if self.arbitrary.len() == 1 => self.dependents.len(),
                    _ => {
                        return Err(
                            name.syntax("a gauge block must use exactly one 'arbitrary' function")
                        )
                    }
                };
                let g = GaugeFamily::from_exprs(space, parameter, &exprs)
                    .map_err(|err| parse_error(err, name))?;
                problem.gauges.insert(key, g);
            }
            "normal" => {
                let space = self.space(problem, keyword)?;
                let mut rules = Vec::new();
                for e in entries {
                    expect_op(e, Op::Arrow)?;
                    let (dep, index) = lead(space, &e.key)?;
                    rules.push(Rule {
                        dep,
                        index,
                        replacement: e.value.expr(space)?,
                    });
                }
                problem.normals.insert(key, NormalForm::new(rules));
            }
            "current" => {
                let space = self.space(problem, keyword)?;
                let mut b = vec![Expr::zero(); space.dims()];
                for e in entries {
                    let (label, slot) = indexed(e, Op::Assign)?;
                    if label != "B" {
                        return Err(e.key.syntax("expected B[..]"));
                    }
                    b[position(space.independents(), &slot, &e.key)?] = e.value.expr(space)?;
                }
                problem.currents.insert(key, Current(b));
            }
            "equations" | "multiplier" => {
                let space = self.space(problem, keyword)?;
                let expected = if keyword.text == "equations" {
                    "F"
                } else {
                    "w"
                };
                let mut v = vec![Expr::zero(); space.fields()];
                for e in entries {
                    let (label, slot) = indexed(e, Op::Assign)?;
                    if label != expected {
                        return Err(e.key.syntax(format!("expected {expected}[..]")));
                    }
                    v[position(space.dependents(), &slot, &e.key)?] = e.value.expr(space)?;
                }
                let map = if keyword.text == "equations" {
                    &mut problem.equations
                } else {
                    &mut problem.multipliers
                };
                map.insert(key, v);
            }
            "discrete" => {
                let stencil = self.stencil(problem, keyword)?;
                let mut w = 1;
                let mut l = None;
                for e in entries {
                    expect_op(e, Op::Assign)?;
                    match e.key.text.as_str() {
                        "width" => w = width(e)?,
                        "L" => l = Some(&e.value),
                        _ => return Err(e.key.syntax("expected 'width' or 'L'")),
                    }
                }
                let l = l.ok_or_else(|| name.syntax("discrete block needs 'L = ...'"))?;
                let space = StencilSpace::new(&self.dependents, w)
                    .map_err(|err| parse_error(err, name))?
                    .with_window(window);
                let expr = l.expr(stencil)?;
                let lagrangian =
                    DiscreteLagrangian::new(&space, expr).map_err(|err| match err {
                        Error::WindowOverflow { shift, window } => {
                            l.error(ParseErrorKind::Scope(ScopeError::WindowExceeded {
                                shift,
                                window,
                            }))
                        }
                        other => parse_error(other, l),
                    })?;
                problem
                    .discretes
                    .insert(key, DiscreteProblem { space, lagrangian });
            }
            "dsymmetry" => {
                let stencil = self.stencil(problem, keyword)?;
                let mut q = vec![Expr::zero(); stencil.fields()];
                for e in entries {
                    let (label, slot) = indexed(e, Op::Assign)?;
                    if label != "Q" {
                        return Err(e.key.syntax("expected Q[..]"));
                    }
                    q[position(stencil.dependents(), &slot, &e.key)?] = e.value.expr(stencil)?;
                }
                problem.dsymmetries.insert(key, q);
            }
            _ => unreachable!("keywords are checked by the cursor"),
        }
        Ok(())
    }

    fn is_arbitrary(&self, space: &JetSpace, dep: usize) -> bool {
        self.arbitrary.contains(&space.dependents()[dep])
    }
}

fn keyword_of(st: &Statement) -> Snippet {
    match st {
        Statement::Names { keyword, .. }
        | Statement::Assign { keyword, .. }
        | Statement::Block { keyword, .. } => keyword.clone(),
        Statement::Order(s) => s.clone(),
    }
}

fn expect_op(e: &Entry, op: Op) -> Result<(), ParseError> {
    if e.op == op {
        Ok(())
    } else {
        let want = if op == Op::Assign { "'='" } else { "'<-'" };
        Err(e.key.syntax(format!("expected {want} in this block")))
    }
}

fn width(e: &Entry) -> Result<i32, ParseError> {
    e.value
        .text
        .parse()
        .ok()
        .filter(|&w: &i32| (1..=64).contains(&w))
        .ok_or_else(|| e.value.syntax("width must be an integer between 1 and 64"))
}

/// Splits `X[t]` into `("X", "t")`.
fn indexed(e: &Entry, op: Op) -> Result<(String, String), ParseError> {
    expect_op(e, op)?;
    let text = &e.key.text;
    let parsed = text
        .strip_suffix(']')
        .and_then(|t| t.split_once('['))
        .map(|(l, s)| (l.trim().to_string(), s.trim().to_string()));
    parsed.ok_or_else(|| e.key.syntax(format!("expected NAME[var], found '{text}'")))
}

fn position(names: &[String], name: &str, at: &Snippet) -> Result<usize, ParseError> {
    names
        .iter()
        .position(|n| n == name)
        .ok_or_else(|| at.error(ParseErrorKind::UndeclaredSymbol(name.to_string())))
}

/// A normal-form lead: `d(u;t,t)` or the shorthand `u_tt`.
fn lead(space: &JetSpace, key: &Snippet) -> Result<(usize, MultiIndex), ParseError> {
    if let Some((dep, axes)) = key.text.rsplit_once('_') {
        if let Some(d) = space.dependent_index(dep) {
            let mut index = MultiIndex::zero(space.dims());
            for ch in axes.chars() {
                let axis = space
                    .independent_index(&ch.to_string())
                    .ok_or_else(|| key.error(ParseErrorKind::UndeclaredSymbol(ch.to_string())))?;
                index = index.incremented(axis);
            }
            return Ok((d, index));
        }
    }
    let e = key.expr(space)?;
    match e.terms().collect::<Vec<_>>().as_slice() {
        [(m, c)] if num_traits::One::is_one(*c) => match m.factors() {
            [(Var::Jet { dep, index }, 1)] => Ok((*dep, index.clone())),
            _ => Err(key.syntax("lead must be a single jet coordinate such as d(u;t,t)")),
        },
        _ => Err(key.syntax("lead must be a single jet coordinate such as d(u;t,t)")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const OSC: &str = "\
# oscillator
independent t
dependent u
lagrangian L = 1/2*d(u;t)^2 - 1/2*u^2
symmetry time { X[t] = 1, Y[u] = 0 }
normal N {
  u_tt <- -u
}
check energy = current L time --normal N
";

    #[test]
    fn parses_oscillator() {
        let p = Problem::parse(OSC).unwrap();
        let s = p.space().unwrap();
        assert_eq!(s.max_order(), 4);
        assert_eq!(
            p.lagrangian("L").unwrap(),
            &s.parse("1/2*d(u;t)^2 - 1/2*u^2").unwrap()
        );
        assert_eq!(p.symmetry("time").unwrap().base(), &[Expr::one()]);
        let n = p.normal("N").unwrap();
        assert_eq!(n.rules()[0].index, MultiIndex::from_counts(vec![2]));
        assert_eq!(
            p.checks["energy"].args,
            ["current", "L", "time", "--normal", "N"]
        );
    }

    #[test]
    fn gauge_raises_headroom() {
        let text = "\
independent x
dependent u v
arbitrary p
lagrangian L = 1/2*(d(u;x) - v)^2
gauge G { u <- p, v <- d(p;x) }
normal N { v <- d(u;x) }
";
        let p = Problem::parse(text).unwrap();
        assert_eq!(p.space().unwrap().max_order(), 5);
        assert_eq!(p.gauge("G").unwrap().parameter(), 2);
        assert_eq!(p.normal("N").unwrap().rules()[0].index, MultiIndex::zero(1));
    }

    #[test]
    fn discrete_blocks() {
        let text = "\
dependent u
discrete D { width = 1, L = 1/2*(u[1] - u[0])^2 }
dsymmetry Q { Q[u] = 1 }
";
        let p = Problem::parse(text).unwrap();
        assert!(p.space().is_err());
        assert_eq!(p.discrete("D").unwrap().space.width(), 1);
        assert_eq!(p.dsymmetry("Q").unwrap(), &[Expr::one()]);
    }

    fn err(text: &str) -> ParseError {
        match Problem::parse(text) {
            Err(Error::Parse(e)) => e,
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn error_positions() {
        let e = err("independent t\ndependent u\nlagrangian L = d(u;t)^2 + w\n");
        assert_eq!((e.line, e.column), (3, 27));
        assert!(matches!(e.kind, ParseErrorKind::UndeclaredSymbol(_)));

        let e = err("independent t\ndependent u\nlagrangian L = d(u;t,t)\n");
        assert_eq!((e.line, e.column), (3, 16));

        let e = err("independent t\ndependent u\nsymmetry s {\n  X[t] = 1,\n  Y[w] = 0\n}\n");
        assert_eq!((e.line, e.column), (5, 3));

        let e = err("independent t\nfoo bar\n");
        assert_eq!(e.line, 2);

        let e = err("independent t\ndependent u\nlagrangian L = u\nlagrangian L = u\n");
        assert_eq!(e.line, 4);

        let e = err("independent t\ndependent u\nsymmetry s { X[t] = 1\n");
        assert_eq!(e.line, 3);
    }

    #[test]
    fn unknown_names() {
        let p = Problem::parse(OSC).unwrap();
        assert!(matches!(p.symmetry("nope"), Err(Error::Unknown { .. })));
    }

    #[test]
    fn max_order_override() {
        let options = ParseOptions { max_order: Some(9) };
        let p = Problem::parse_with(OSC, &options).unwrap();
        assert_eq!(p.space().unwrap().max_order(), 9);
    }
}
