//! Tokens to a syntax tree. Names are not resolved here.

use super::diag::{Diagnostic, Pos};
use super::lexer::{Tok, Token};
use crate::checker::StepPair;

const KEYWORDS: &[&str] = &["exists", "forall", "mu", "nu", "true", "false", "funct"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum LTerm {
    Var(String),
    Const(String),
}

#[derive(Debug, Clone)]
pub(crate) struct LAtom {
    pub pred: String,
    pub args: Vec<LTerm>,
}

#[derive(Debug, Clone)]
pub(crate) struct LCq {
    pub exists: Vec<String>,
    pub atoms: Vec<LAtom>,
}

/// Logic expression shared by context expressions, queries and properties.
#[derive(Debug, Clone)]
pub(crate) struct LExpr {
    pub pos: Pos,
    pub kind: LKind,
}

#[derive(Debug, Clone)]
pub(crate) enum LKind {
    True,
    False,
    Atom(LAtom),
    Ctx(String, String),
    Ucq(Vec<LCq>),
    FixVar(String),
    Not(Box<LExpr>),
    And(Box<LExpr>, Box<LExpr>),
    Or(Box<LExpr>, Box<LExpr>),
    Implies(Box<LExpr>, Box<LExpr>),
    Exists(String, Box<LExpr>),
    Forall(String, Box<LExpr>),
    Mu(String, Box<LExpr>),
    Nu(String, Box<LExpr>),
    Step(StepPair, Box<LExpr>),
    Group(Box<LExpr>),
}

#[derive(Debug, Clone)]
pub(crate) struct RawBasic {
    pub pos: Pos,
    pub name: String,
    pub inverse: bool,
    pub exists: bool,
}

#[derive(Debug, Clone)]
pub(crate) enum RawAxiom {
    Funct(RawBasic),
    Incl {
        lhs: RawBasic,
        negated: bool,
        rhs: RawBasic,
    },
}

#[derive(Debug, Clone)]
pub(crate) struct RawAssertion {
    pub pos: Pos,
    pub axiom: RawAxiom,
    pub guard: Option<LExpr>,
}

#[derive(Debug, Clone)]
pub(crate) enum RawHeadTerm {
    Var(String),
    Const(String),
    Call(String, Vec<RawHeadTerm>),
}

#[derive(Debug, Clone)]
pub(crate) struct RawHeadAtom {
    pub pred: String,
    pub args: Vec<RawHeadTerm>,
}

#[derive(Debug, Clone)]
pub(crate) struct RawEffect {
    pub pos: Pos,
    pub body: LExpr,
    pub head: Vec<RawHeadAtom>,
}

#[derive(Debug, Clone)]
pub(crate) struct RawAction {
    pub pos: Pos,
    pub name: String,
    pub params: Vec<String>,
    pub effects: Vec<RawEffect>,
}

#[derive(Debug, Clone)]
pub(crate) struct RawRule {
    pub pos: Pos,
    pub query: LExpr,
    pub guard: Option<LExpr>,
    pub action: String,
    pub args: Vec<(Pos, LTerm)>,
}

#[derive(Debug, Clone)]
pub(crate) struct RawContextRule {
    pub pos: Pos,
    pub query: LExpr,
    pub guard: Option<LExpr>,
    pub head: Vec<(Pos, String, String)>,
}

#[derive(Debug, Clone)]
pub(crate) struct RawTree {
    pub value: String,
    pub children: Vec<RawTree>,
}

/// A section's position and its entries.
type Section<T> = Option<(Pos, Vec<T>)>;

#[derive(Debug, Clone, Default)]
pub(crate) struct RawSpec {
    pub dimensions: Section<(Pos, String, RawTree)>,
    pub concepts: Vec<(Pos, String)>,
    pub roles: Vec<(Pos, String)>,
    pub services: Vec<(Pos, String, usize)>,
    pub constants: Vec<(Pos, String)>,
    pub tbox: Vec<RawAssertion>,
    pub abox: Vec<(Pos, String, Vec<String>)>,
    pub init_context: Section<(Pos, String, String)>,
    pub actions: Vec<RawAction>,
    pub process: Vec<RawRule>,
    pub context_rules: Vec<RawContextRule>,
}

type PResult<T> = Result<T, Diagnostic>;

const MAX_NESTING: usize = 256;

pub(crate) struct Parser {
    toks: Vec<Token>,
    i: usize,
    depth: usize,
    pub diags: Vec<Diagnostic>,
}

impl Parser {
    pub fn new(toks: Vec<Token>) -> Self {
        Parser {
            toks,
            i: 0,
            depth: 0,
            diags: Vec::new(),
        }
    }

    /// Drops line breaks; used for property files where `;` separates items.
    pub fn without_newlines(toks: Vec<Token>) -> Self {
        Parser::new(toks.into_iter().filter(|t| t.tok != Tok::Newline).collect())
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.i].tok
    }

    pub fn pos(&self) -> Pos {
        self.toks[self.i].pos
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.i].clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == t {
            self.bump();
            true
        } else {
            false
        }
    }

    fn unexpected(&self, what: &str) -> Diagnostic {
        Diagnostic::error(
            self.pos(),
            format!("expected {what}, found {}", self.peek().describe()),
        )
    }

    fn expect(&mut self, t: &Tok, what: &str) -> PResult<Pos> {
        let pos = self.pos();
        if self.eat(t) {
            Ok(pos)
        } else {
            Err(self.unexpected(what))
        }
    }

    fn is_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn ident(&mut self, what: &str) -> PResult<(Pos, String)> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok((pos, s))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    fn var(&mut self) -> PResult<(Pos, String)> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Var(s) => {
                self.bump();
                Ok((pos, s))
            }
            _ => Err(self.unexpected("a variable")),
        }
    }

    fn skip_newlines(&mut self) {
        while matches!(self.peek(), Tok::Newline) {
            self.bump();
        }
    }

    fn skip_separators(&mut self) {
        while matches!(self.peek(), Tok::Newline | Tok::Semi) {
            self.bump();
        }
    }

    pub fn at_eof(&self) -> bool {
        matches!(self.peek(), Tok::Eof)
    }

    fn nested<T>(&mut self, f: fn(&mut Self) -> PResult<T>) -> PResult<T> {
        if self.depth >= MAX_NESTING {
            return Err(Diagnostic::error(
                self.pos(),
                "expression nested too deeply",
            ));
        }
        self.depth += 1;
        let r = f(self);
        self.depth -= 1;
        r
    }

    // ---- logic expressions ----

    pub fn expr(&mut self) -> PResult<LExpr> {
        self.nested(Self::expr_inner)
    }

    fn expr_inner(&mut self) -> PResult<LExpr> {
        let lhs = self.or_expr()?;
        if matches!(self.peek(), Tok::Arrow) {
            self.bump();
            let rhs = self.expr()?;
            return Ok(LExpr {
                pos: lhs.pos,
                kind: LKind::Implies(Box::new(lhs), Box::new(rhs)),
            });
        }
        Ok(lhs)
    }

    fn or_expr(&mut self) -> PResult<LExpr> {
        let mut lhs = self.and_expr()?;
        while matches!(self.peek(), Tok::Pipe) {
            self.bump();
            let rhs = self.and_expr()?;
            lhs = LExpr {
                pos: lhs.pos,
                kind: LKind::Or(Box::new(lhs), Box::new(rhs)),
            };
        }
        Ok(lhs)
    }

    fn and_expr(&mut self) -> PResult<LExpr> {
        let mut lhs = self.unary()?;
        while matches!(self.peek(), Tok::Amp) {
            self.bump();
            let rhs = self.unary()?;
            lhs = LExpr {
                pos: lhs.pos,
                kind: LKind::And(Box::new(lhs), Box::new(rhs)),
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<LExpr> {
        self.nested(Self::unary_inner)
    }

    fn unary_inner(&mut self) -> PResult<LExpr> {
        let pos = self.pos();
        match self.peek().clone() {
            Tok::Bang => {
                self.bump();
                let e = self.unary()?;
                Ok(LExpr {
                    pos,
                    kind: LKind::Not(Box::new(e)),
                })
            }
            Tok::Diamond | Tok::Box => {
                let first = matches!(self.bump().tok, Tok::Diamond);
                let second = match self.peek() {
                    Tok::Diamond => true,
                    Tok::Box => false,
                    _ => return Err(Diagnostic::error(
                        pos,
                        "unpaired modality: steps must come in pairs such as `[-][-]` or `<->[-]`",
                    )),
                };
                self.bump();
                let e = self.unary()?;
                Ok(LExpr {
                    pos,
                    kind: LKind::Step(StepPair::from_steps(first, second), Box::new(e)),
                })
            }
            Tok::Ident(k) if k == "exists" || k == "forall" => {
                self.bump();
                let mut vars = vec![self.var()?.1];
                while matches!(self.peek(), Tok::Var(_)) {
                    vars.push(self.var()?.1);
                }
                self.expect(&Tok::Dot, "`.` after quantified variables")?;
                let mut body = self.expr()?;
                for v in vars.into_iter().rev() {
                    let kind = if k == "exists" {
                        LKind::Exists(v, Box::new(body))
                    } else {
                        LKind::Forall(v, Box::new(body))
                    };
                    body = LExpr { pos, kind };
                }
                Ok(body)
            }
            Tok::Ident(k) if k == "mu" || k == "nu" => {
                self.bump();
                let (_, z) = self.ident("a fixpoint variable")?;
                self.expect(&Tok::Dot, "`.` after the fixpoint variable")?;
                let body = Box::new(self.expr()?);
                let kind = if k == "mu" {
                    LKind::Mu(z, body)
                } else {
                    LKind::Nu(z, body)
                };
                Ok(LExpr { pos, kind })
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> PResult<LExpr> {
        let pos = self.pos();
        let kind = match self.peek().clone() {
            Tok::Ident(k) if k == "true" => {
                self.bump();
                LKind::True
            }
            Tok::Ident(k) if k == "false" => {
                self.bump();
                LKind::False
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(&Tok::RParen, "`)`")?;
                LKind::Group(Box::new(e))
            }
            Tok::LBracket => {
                self.bump();
                let mut disjuncts = vec![self.cq()?];
                while self.eat(&Tok::Pipe) {
                    disjuncts.push(self.cq()?);
                }
                self.expect(&Tok::RBracket, "`]` or `|`")?;
                LKind::Ucq(disjuncts)
            }
            Tok::Ident(_) => {
                let (_, name) = self.ident("a name")?;
                match self.peek() {
                    Tok::LParen => LKind::Atom(self.atom_args(name)?),
                    Tok::Colon => {
                        self.bump();
                        let (_, value) = self.ident("a context value")?;
                        LKind::Ctx(name, value)
                    }
                    _ => LKind::FixVar(name),
                }
            }
            _ => return Err(self.unexpected("an expression")),
        };
        Ok(LExpr { pos, kind })
    }

    fn cq(&mut self) -> PResult<LCq> {
        let mut exists = Vec::new();
        if self.is_keyword("exists") {
            self.bump();
            exists.push(self.var()?.1);
            while matches!(self.peek(), Tok::Var(_)) {
                exists.push(self.var()?.1);
            }
            self.expect(&Tok::Dot, "`.` after quantified variables")?;
        }
        let mut atoms = vec![self.atom()?];
        while self.eat(&Tok::Amp) {
            atoms.push(self.atom()?);
        }
        Ok(LCq { exists, atoms })
    }

    fn atom(&mut self) -> PResult<LAtom> {
        let (_, name) = self.ident("a concept or role atom")?;
        if !matches!(self.peek(), Tok::LParen) {
            return Err(self.unexpected("`(`"));
        }
        self.atom_args(name)
    }

    fn atom_args(&mut self, pred: String) -> PResult<LAtom> {
        self.expect(&Tok::LParen, "`(`")?;
        let mut args = vec![self.term()?];
        while self.eat(&Tok::Comma) {
            args.push(self.term()?);
        }
        self.expect(&Tok::RParen, "`)` or `,`")?;
        Ok(LAtom { pred, args })
    }

    fn term(&mut self) -> PResult<LTerm> {
        match self.peek().clone() {
            Tok::Var(v) => {
                self.bump();
                Ok(LTerm::Var(v))
            }
            Tok::Ident(_) => Ok(LTerm::Const(self.ident("a constant")?.1)),
            _ => Err(self.unexpected("a variable or constant")),
        }
    }

    // ---- specification sections ----

    pub fn spec(&mut self) -> RawSpec {
        let mut raw = RawSpec::default();
        let mut seen: Vec<String> = Vec::new();
        loop {
            self.skip_separators();
            if self.at_eof() {
                break;
            }
            let pos = self.pos();
            let name = match self.peek().clone() {
                Tok::Ident(s) => s,
                _ => {
                    let d = self.unexpected("a section name");
                    self.diags.push(d);
                    self.recover_section();
                    continue;
                }
            };
            self.bump();
            if let Err(d) = self.expect(&Tok::LBrace, "`{` after section name") {
                self.diags.push(d);
                self.recover_section();
                continue;
            }
            if seen.contains(&name) {
                self.diags.push(Diagnostic::error(
                    pos,
                    format!("duplicate section `{name}`"),
                ));
            }
            seen.push(name.clone());
            match name.as_str() {
                "dimensions" => {
                    let items = self.items(Self::dimension);
                    raw.dimensions
                        .get_or_insert((pos, Vec::new()))
                        .1
                        .extend(items);
                }
                "concepts" => raw.concepts.extend(self.name_list()),
                "roles" => raw.roles.extend(self.name_list()),
                "constants" => raw.constants.extend(self.name_list()),
                "services" => raw.services.extend(self.items(Self::service)),
                "tbox" => raw.tbox.extend(self.items(Self::assertion)),
                "abox" => raw.abox.extend(self.items_comma(Self::fact)),
                "init-context" => {
                    let items = self.items_comma(Self::assignment);
                    raw.init_context
                        .get_or_insert((pos, Vec::new()))
                        .1
                        .extend(items);
                }
                "actions" => raw.actions.extend(self.items(Self::action)),
                "process" => raw.process.extend(self.items(Self::process_rule)),
                "context-rules" => raw.context_rules.extend(self.items(Self::context_rule)),
                other => {
                    self.diags
                        .push(Diagnostic::error(pos, format!("unknown section `{other}`")));
                    self.skip_block();
                }
            }
        }
        raw
    }

    /// Skips to the end of a brace block whose `{` was already consumed.
    fn skip_block(&mut self) {
        let mut depth = 1;
        while !self.at_eof() {
            match self.bump().tok {
                Tok::LBrace => depth += 1,
                Tok::RBrace => {
                    depth -= 1;
                    if depth == 0 {
                        return;
                    }
                }
                _ => {}
            }
        }
    }

    fn recover_section(&mut self) {
        // skip to the next line that could start a section
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::LBrace => {
                    self.bump();
                    self.skip_block();
                    return;
                }
                Tok::Newline => {
                    self.bump();
                    return;
                }
                _ => {
                    self.bump();
                }
            }
        }
    }

    /// Skips the rest of a broken item, stopping before a separator at the
    /// item's nesting level or the section's closing brace.
    fn recover_item(&mut self) {
        let mut depth = 0;
        loop {
            match self.peek() {
                Tok::Eof => return,
                Tok::Newline | Tok::Semi if depth == 0 => return,
                Tok::RBrace if depth == 0 => return,
                Tok::LBrace => depth += 1,
                Tok::RBrace => depth -= 1,
                _ => {}
            }
            self.bump();
        }
    }

    fn items<T>(&mut self, item: fn(&mut Self) -> PResult<T>) -> Vec<T> {
        self.items_sep(item, false)
    }

    fn items_comma<T>(&mut self, item: fn(&mut Self) -> PResult<T>) -> Vec<T> {
        self.items_sep(item, true)
    }

    fn items_sep<T>(&mut self, item: fn(&mut Self) -> PResult<T>, commas: bool) -> Vec<T> {
        let mut out = Vec::new();
        loop {
            while matches!(self.peek(), Tok::Newline | Tok::Semi)
                || (commas && matches!(self.peek(), Tok::Comma))
            {
                self.bump();
            }
            match self.peek() {
                Tok::RBrace => {
                    self.bump();
                    return out;
                }
                Tok::Eof => {
                    let d = Diagnostic::error(self.pos(), "unterminated section, expected `}`");
                    self.diags.push(d);
                    return out;
                }
                _ => {}
            }
            let start = self.i;
            match item(self) {
                Ok(v) => {
                    let ends = matches!(self.peek(), Tok::Newline | Tok::Semi | Tok::RBrace)
                        || (commas && matches!(self.peek(), Tok::Comma));
                    if ends {
                        out.push(v);
                    } else {
                        let d = self.unexpected("end of item");
                        self.diags.push(d);
                        self.recover_item();
                    }
                }
                Err(d) => {
                    self.diags.push(d);
                    self.recover_item();
                }
            }
            if self.i == start {
                self.bump();
            }
        }
    }

    fn name_list(&mut self) -> Vec<(Pos, String)> {
        self.items_comma(|p| p.ident("a name"))
    }

    fn dimension(&mut self) -> PResult<(Pos, String, RawTree)> {
        let (pos, name) = self.ident("a dimension name")?;
        self.expect(&Tok::Colon, "`:` after the dimension name")?;
        let tree = self.tree()?;
        Ok((pos, name, tree))
    }

    fn tree(&mut self) -> PResult<RawTree> {
        self.nested(Self::tree_inner)
    }

    fn tree_inner(&mut self) -> PResult<RawTree> {
        let (_, value) = self.ident("a context value")?;
        let mut children = Vec::new();
        if self.eat(&Tok::LParen) {
            children.push(self.tree()?);
            while self.eat(&Tok::Comma) {
                children.push(self.tree()?);
            }
            self.expect(&Tok::RParen, "`)` or `,`")?;
        }
        Ok(RawTree { value, children })
    }

    fn service(&mut self) -> PResult<(Pos, String, usize)> {
        let (pos, name) = self.ident("a service name")?;
        self.expect(&Tok::Slash, "`/` and the service arity")?;
        let apos = self.pos();
        let (_, n) = self.ident("an arity")?;
        let arity = n
            .parse::<usize>()
            .map_err(|_| Diagnostic::error(apos, format!("invalid arity `{n}`")))?;
        Ok((pos, name, arity))
    }

    fn basic(&mut self) -> PResult<RawBasic> {
        let pos = self.pos();
        let exists = if self.is_keyword("exists") {
            self.bump();
            true
        } else {
            false
        };
        let (_, name) = self.ident("a concept or role name")?;
        let inverse = self.eat(&Tok::Inverse);
        Ok(RawBasic {
            pos,
            name,
            inverse,
            exists,
        })
    }

    fn assertion(&mut self) -> PResult<RawAssertion> {
        let pos = self.pos();
        let axiom = if self.is_keyword("funct") {
            self.bump();
            RawAxiom::Funct(self.basic()?)
        } else {
            let lhs = self.basic()?;
            self.expect(&Tok::Subsumed, "`[=`")?;
            let negated = self.eat(&Tok::Bang);
            let rhs = self.basic()?;
            RawAxiom::Incl { lhs, negated, rhs }
        };
        let guard = self.guard()?;
        Ok(RawAssertion { pos, axiom, guard })
    }

    fn guard(&mut self) -> PResult<Option<LExpr>> {
        if self.eat(&Tok::At) {
            Ok(Some(self.expr()?))
        } else {
            Ok(None)
        }
    }

    fn fact(&mut self) -> PResult<(Pos, String, Vec<String>)> {
        let (pos, pred) = self.ident("a fact")?;
        self.expect(&Tok::LParen, "`(`")?;
        let mut args = vec![self.ident("a constant")?.1];
        while self.eat(&Tok::Comma) {
            args.push(self.ident("a constant")?.1);
        }
        self.expect(&Tok::RParen, "`)` or `,`")?;
        Ok((pos, pred, args))
    }

    fn assignment(&mut self) -> PResult<(Pos, String, String)> {
        let (pos, dim) = self.ident("a dimension")?;
        self.expect(&Tok::Colon, "`:`")?;
        let (_, value) = self.ident("a context value")?;
        Ok((pos, dim, value))
    }

    fn action(&mut self) -> PResult<RawAction> {
        let (pos, name) = self.ident("an action name")?;
        self.expect(&Tok::LParen, "`(` after the action name")?;
        let mut params = Vec::new();
        if !self.eat(&Tok::RParen) {
            params.push(self.var()?.1);
            while self.eat(&Tok::Comma) {
                params.push(self.var()?.1);
            }
            self.expect(&Tok::RParen, "`)` or `,`")?;
        }
        self.skip_newlines();
        self.expect(&Tok::LBrace, "`{` opening the action's effects")?;
        let mut effects = Vec::new();
        loop {
            self.skip_separators();
            if self.eat(&Tok::RBrace) {
                break;
            }
            effects.push(self.effect()?);
            if !matches!(self.peek(), Tok::Newline | Tok::Semi | Tok::RBrace) {
                return Err(self.unexpected("end of effect"));
            }
        }
        Ok(RawAction {
            pos,
            name,
            params,
            effects,
        })
    }

    fn effect(&mut self) -> PResult<RawEffect> {
        let pos = self.pos();
        let body = self.expr()?;
        self.expect(&Tok::LeadsTo, "`~>`")?;
        self.expect(&Tok::LBrace, "`{` opening the effect head")?;
        let mut head = Vec::new();
        loop {
            while matches!(self.peek(), Tok::Newline | Tok::Comma) {
                self.bump();
            }
            if self.eat(&Tok::RBrace) {
                break;
            }
            let (_, pred) = self.ident("a head fact")?;
            self.expect(&Tok::LParen, "`(`")?;
            let mut args = vec![self.head_term()?];
            while self.eat(&Tok::Comma) {
                args.push(self.head_term()?);
            }
            self.expect(&Tok::RParen, "`)` or `,`")?;
            head.push(RawHeadAtom { pred, args });
            if !matches!(self.peek(), Tok::Newline | Tok::Comma | Tok::RBrace) {
                return Err(self.unexpected("`,` or `}`"));
            }
        }
        Ok(RawEffect { pos, body, head })
    }

    fn head_term(&mut self) -> PResult<RawHeadTerm> {
        self.nested(Self::head_term_inner)
    }

    fn head_term_inner(&mut self) -> PResult<RawHeadTerm> {
        match self.peek().clone() {
            Tok::Var(v) => {
                self.bump();
                Ok(RawHeadTerm::Var(v))
            }
            Tok::Ident(_) => {
                let (_, name) = self.ident("a constant or service call")?;
                if self.eat(&Tok::LParen) {
                    let mut args = vec![self.head_term()?];
                    while self.eat(&Tok::Comma) {
                        args.push(self.head_term()?);
                    }
                    self.expect(&Tok::RParen, "`)` or `,`")?;
                    Ok(RawHeadTerm::Call(name, args))
                } else {
                    Ok(RawHeadTerm::Const(name))
                }
            }
            _ => Err(self.unexpected("a variable, constant or service call")),
        }
    }

    fn process_rule(&mut self) -> PResult<RawRule> {
        let pos = self.pos();
        let query = self.expr()?;
        let guard = self.guard()?;
        self.expect(&Tok::MapsTo, "`|->`")?;
        let (_, action) = self.ident("an action name")?;
        self.expect(&Tok::LParen, "`(`")?;
        let mut args = Vec::new();
        if !self.eat(&Tok::RParen) {
            loop {
                let p = self.pos();
                args.push((p, self.term()?));
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(&Tok::RParen, "`)` or `,`")?;
        }
        Ok(RawRule {
            pos,
            query,
            guard,
            action,
            args,
        })
    }

    fn context_rule(&mut self) -> PResult<RawContextRule> {
        let pos = self.pos();
        let query = self.expr()?;
        let guard = self.guard()?;
        self.expect(&Tok::MapsTo, "`|->`")?;
        self.expect(&Tok::LBrace, "`{` opening the new context")?;
        let mut head = Vec::new();
        loop {
            while matches!(self.peek(), Tok::Newline | Tok::Comma) {
                self.bump();
            }
            if self.eat(&Tok::RBrace) {
                break;
            }
            head.push(self.assignment()?);
            if !matches!(self.peek(), Tok::Newline | Tok::Comma | Tok::RBrace) {
                return Err(self.unexpected("`,` or `}`"));
            }
        }
        Ok(RawContextRule {
            pos,
            query,
            guard,
            head,
        })
    }

    // ---- property files ----

    /// `;`-separated formulas.
    pub fn properties(&mut self) -> Vec<LExpr> {
        let mut out = Vec::new();
        loop {
            while self.eat(&Tok::Semi) {}
            if self.at_eof() {
                return out;
            }
            let start = self.i;
            match self.expr() {
                Ok(e) => {
                    if matches!(self.peek(), Tok::Semi | Tok::Eof) {
                        out.push(e);
                    } else {
                        let d = self.unexpected("`;` or end of input");
                        self.diags.push(d);
                        self.skip_to_semi();
                    }
                }
                Err(d) => {
                    self.diags.push(d);
                    self.skip_to_semi();
                }
            }
            if self.i == start {
                self.bump();
            }
        }
    }

    fn skip_to_semi(&mut self) {
        while !matches!(self.peek(), Tok::Semi | Tok::Eof) {
            self.bump();
        }
    }
}
