//! The signature language.
//!
//! ```text
//! # lists over a parameter x
//! container list (x) over {x, rec}
//! shape nil  { x: 0; rec: 0; }
//! shape cons { x: 1; rec: 1; }
//! ```
//!
//! `(PARAMS)` names the parameters among the indices of `over`; the one index
//! left over, if any, is the recursive index. A position entry is a
//! cardinality, a standard groupoid such as `BZ2` or `Disc(3)`, or a quoted
//! path to a groupoid JSON file. Shape names may be quoted. `#` starts a
//! comment.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;

use crate::container::Container;
use crate::error::{Error, Result};
use crate::fixpoint::Signature;
use crate::groupoid::{disc, disc_named, standard_groupoid, FinGroupoid, GFamily, GFunctor};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum PosSpec {
    Count(usize),
    Standard { name: String, args: Vec<usize> },
    File(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShapeDecl {
    pub name: String,
    pub positions: Vec<(String, PosSpec)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SignatureAst {
    pub name: String,
    pub params: Vec<String>,
    pub indices: Vec<String>,
    pub shapes: Vec<ShapeDecl>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Str(String),
    Nat(usize),
    Sym(char),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    column: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_alphabetic() || c == '_' || c == '⋆'
}

fn is_ident_char(c: char) -> bool {
    is_ident_start(c) || c.is_ascii_digit() || c == '\''
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1, 1);
    let err = |line, column, message: String| Error::Parse { line, column, message };
    while let Some(&c) = chars.peek() {
        let (l, col) = (line, column);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        if c.is_whitespace() {
            bump(&mut chars);
        } else if c == '#' {
            while chars.peek().is_some_and(|&c| c != '\n') {
                bump(&mut chars);
            }
        } else if c.is_ascii_digit() {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|d| d.is_ascii_digit()) {
                s.push(d);
                bump(&mut chars);
            }
            let n = s.parse().map_err(|_| err(l, col, format!("number `{s}` is too large")))?;
            out.push(Token { tok: Tok::Nat(n), line: l, column: col });
        } else if is_ident_start(c) {
            let mut s = String::new();
            while let Some(&d) = chars.peek().filter(|&&d| is_ident_char(d)) {
                s.push(d);
                bump(&mut chars);
            }
            out.push(Token { tok: Tok::Ident(s), line: l, column: col });
        } else if c == '"' {
            bump(&mut chars);
            let mut s = String::new();
            loop {
                match bump(&mut chars) {
                    Some('"') => break,
                    Some('\\') => match bump(&mut chars) {
                        Some(e) => s.push(e),
                        None => return Err(err(l, col, "unterminated string".into())),
                    },
                    Some('\n') | None => return Err(err(l, col, "unterminated string".into())),
                    Some(d) => s.push(d),
                }
            }
            out.push(Token { tok: Tok::Str(s), line: l, column: col });
        } else if "(){},;:".contains(c) {
            bump(&mut chars);
            out.push(Token { tok: Tok::Sym(c), line: l, column: col });
        } else {
            return Err(err(l, col, format!("unexpected character `{c}`")));
        }
    }
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    at: usize,
    end: (usize, usize),
}

impl Parser {
    fn here(&self) -> (usize, usize) {
        self.toks.get(self.at).map_or(self.end, |t| (t.line, t.column))
    }

    fn error(&self, message: impl Into<String>) -> Error {
        let (line, column) = self.here();
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|t| &t.tok)
    }

    fn sym(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.at += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn eat(&mut self, c: char) -> bool {
        let hit = self.peek() == Some(&Tok::Sym(c));
        self.at += usize::from(hit);
        hit
    }

    fn keyword(&mut self, k: &str) -> Result<()> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == k => {
                self.at += 1;
                Ok(())
            }
            _ => Err(self.error(format!("expected `{k}`"))),
        }
    }

    fn ident(&mut self, what: &str) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.at += 1;
                Ok(s)
            }
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    fn name(&mut self, what: &str) -> Result<String> {
        if let Some(Tok::Str(s)) = self.peek() {
            let s = s.clone();
            self.at += 1;
            return Ok(s);
        }
        self.ident(what)
    }

    fn nat(&mut self) -> Result<usize> {
        match self.peek() {
            Some(Tok::Nat(n)) => {
                let n = *n;
                self.at += 1;
                Ok(n)
            }
            _ => Err(self.error("expected a number")),
        }
    }

    /// Comma-separated identifiers up to `close`.
    fn ident_list(&mut self, close: char, what: &str) -> Result<Vec<(String, (usize, usize))>> {
        let mut out = Vec::new();
        if self.eat(close) {
            return Ok(out);
        }
        loop {
            let at = self.here();
            out.push((self.ident(what)?, at));
            if self.eat(close) {
                return Ok(out);
            }
            self.sym(',')?;
        }
    }

    fn pos_spec(&mut self) -> Result<PosSpec> {
        match self.peek().cloned() {
            Some(Tok::Nat(n)) => {
                self.at += 1;
                Ok(PosSpec::Count(n))
            }
            Some(Tok::Str(s)) => {
                self.at += 1;
                Ok(PosSpec::File(s))
            }
            Some(Tok::Ident(name)) => {
                self.at += 1;
                let mut args = Vec::new();
                if self.eat('(') && !self.eat(')') {
                    loop {
                        args.push(self.nat()?);
                        if self.eat(')') {
                            break;
                        }
                        self.sym(',')?;
                    }
                }
                Ok(PosSpec::Standard { name, args })
            }
            _ => Err(self.error("expected a cardinality, a groupoid or a file path")),
        }
    }
}

fn duplicate(names: &[(String, (usize, usize))], what: &str) -> Result<()> {
    for (k, (n, (line, column))) in names.iter().enumerate() {
        if names[..k].iter().any(|(m, _)| m == n) {
            return Err(Error::Parse {
                line: *line,
                column: *column,
                message: format!("duplicate {what} `{n}`"),
            });
        }
    }
    Ok(())
}

pub fn parse_signature(text: &str) -> Result<SignatureAst> {
    let toks = lex(text)?;
    let end = text.lines().enumerate().last().map_or((1, 1), |(k, l)| (k + 1, l.chars().count() + 1));
    let mut p = Parser { toks, at: 0, end };
    p.keyword("container")?;
    let name = p.name("a container name")?;
    p.sym('(')?;
    let params = p.ident_list(')', "a parameter name")?;
    p.keyword("over")?;
    p.sym('{')?;
    let indices = p.ident_list('}', "an index name")?;
    duplicate(&indices, "index")?;
    duplicate(&params, "parameter")?;
    for (q, (line, column)) in &params {
        if !indices.iter().any(|(i, _)| i == q) {
            return Err(Error::Parse {
                line: *line,
                column: *column,
                message: format!("parameter `{q}` is not an index"),
            });
        }
    }
    if indices.len() > params.len() + 1 {
        return Err(p.error("at most one index may be left out of the parameters"));
    }
    let indices: Vec<String> = indices.into_iter().map(|(i, _)| i).collect();
    let params: Vec<String> = params.into_iter().map(|(i, _)| i).collect();
    let mut shapes: Vec<ShapeDecl> = Vec::new();
    while p.peek().is_some() {
        p.keyword("shape")?;
        let at = p.here();
        let sname = p.name("a shape name")?;
        if shapes.iter().any(|s| s.name == sname) {
            return Err(Error::Parse {
                line: at.0,
                column: at.1,
                message: format!("duplicate shape `{sname}`"),
            });
        }
        p.sym('{')?;
        let mut positions: Vec<(String, PosSpec)> = Vec::new();
        while !p.eat('}') {
            let at = p.here();
            let ix = p.ident("an index name")?;
            let fail = |message: String| Error::Parse {
                line: at.0,
                column: at.1,
                message,
            };
            if !indices.contains(&ix) {
                return Err(fail(format!("position on undeclared index `{ix}`")));
            }
            if positions.iter().any(|(i, _)| *i == ix) {
                return Err(fail(format!("index `{ix}` declared twice in `{sname}`")));
            }
            p.sym(':')?;
            positions.push((ix, p.pos_spec()?));
            if !p.eat(';') {
                p.sym('}')?;
                break;
            }
        }
        if let Some(missing) = indices.iter().find(|i| positions.iter().all(|(j, _)| j != *i)) {
            return Err(Error::Parse {
                line: at.0,
                column: at.1,
                message: format!("shape `{sname}` does not declare index `{missing}`"),
            });
        }
        shapes.push(ShapeDecl {
            name: sname,
            positions,
        });
    }
    Ok(SignatureAst {
        name,
        params,
        indices,
        shapes,
    })
}

fn quoted(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn quote_name(s: &str) -> String {
    let mut cs = s.chars();
    let plain = cs.next().is_some_and(is_ident_start) && cs.all(is_ident_char);
    let keyword = matches!(s, "container" | "over" | "shape");
    if plain && !keyword {
        s.to_string()
    } else {
        quoted(s)
    }
}

impl SignatureAst {
    /// The recursive index: the one index that is not a parameter.
    pub fn star(&self) -> Option<&str> {
        self.indices
            .iter()
            .find(|i| !self.params.contains(i))
            .map(String::as_str)
    }

    /// Positions listed in index order.
    pub fn normalize(&self) -> SignatureAst {
        let mut ast = self.clone();
        for s in &mut ast.shapes {
            s.positions
                .sort_by_key(|(i, _)| self.indices.iter().position(|j| j == i));
        }
        ast
    }

    pub fn pretty(&self) -> String {
        let ast = self.normalize();
        let mut out = format!(
            "container {} ({}) over {{{}}}\n",
            quote_name(&ast.name),
            ast.params.join(", "),
            ast.indices.join(", ")
        );
        for s in &ast.shapes {
            let _ = write!(out, "shape {} {{", quote_name(&s.name));
            for (i, spec) in &s.positions {
                let v = match spec {
                    PosSpec::Count(n) => n.to_string(),
                    PosSpec::File(f) => quoted(f),
                    PosSpec::Standard { name, args } if args.is_empty() => name.clone(),
                    PosSpec::Standard { name, args } => {
                        let args: Vec<String> = args.iter().map(usize::to_string).collect();
                        format!("{name}({})", args.join(", "))
                    }
                };
                let _ = write!(out, " {i}: {v};");
            }
            out.push_str(" }\n");
        }
        out
    }

    /// The container described, with shapes in declaration order and no
    /// shape automorphisms. `load` resolves file references.
    pub fn to_container(&self, load: &dyn Fn(&str) -> Result<FinGroupoid>) -> Result<Container> {
        let shapes = Arc::new(disc_named(self.shapes.iter().map(|s| s.name.clone()).collect()));
        let mut families = Vec::with_capacity(self.indices.len());
        for ix in &self.indices {
            let mut fibers = Vec::with_capacity(self.shapes.len());
            for s in &self.shapes {
                let spec = &s.positions.iter().find(|(i, _)| i == ix).expect("every index declared").1;
                let g = match spec {
                    PosSpec::Count(n) => disc(*n),
                    PosSpec::Standard { name, args } => standard_groupoid(name, args)?,
                    PosSpec::File(path) => load(path)?,
                };
                fibers.push(Arc::new(g));
            }
            let transport = (0..shapes.num_objects())
                .map(|a| GFunctor::identity(fibers[a].clone()))
                .collect();
            families.push(GFamily::new(shapes.clone(), fibers, transport)?);
        }
        Container::new(self.indices.clone(), shapes, families)
    }

    pub fn to_signature(&self, load: &dyn Fn(&str) -> Result<FinGroupoid>) -> Result<Signature> {
        let star = self
            .star()
            .ok_or_else(|| Error::Precondition(format!("`{}` has no recursive index", self.name)))?;
        Signature::new(&self.name, self.to_container(load)?, star)
    }

    /// The declaration of a container with discrete shapes and positions.
    pub fn from_container(name: &str, c: &Container, params: &[String]) -> Option<SignatureAst> {
        if !c.shapes.is_discrete() || !c.is_discrete() {
            return None;
        }
        let shapes = (0..c.num_shapes())
            .map(|s| ShapeDecl {
                name: c.shapes.object_name(s).to_string(),
                positions: c
                    .indices
                    .iter()
                    .enumerate()
                    .map(|(k, i)| (i.clone(), PosSpec::Count(c.fiber(k, s).num_objects())))
                    .collect(),
            })
            .collect();
        Some(SignatureAst {
            name: name.to_string(),
            params: params.to_vec(),
            indices: c.indices.clone(),
            shapes,
        })
    }
}

/// Files referenced by a signature are not available.
pub fn no_files(path: &str) -> Result<FinGroupoid> {
    Err(Error::Unsupported(format!("cannot load `{path}` here")))
}

pub const LIST: &str = "container list (x) over {x, rec}\nshape nil { x: 0; rec: 0; }\nshape cons { x: 1; rec: 1; }\n";

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_err(text: &str) -> (usize, usize, String) {
        match parse_signature(text) {
            Err(Error::Parse { line, column, message }) => (line, column, message),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn list_signature() {
        let ast = parse_signature(LIST).unwrap();
        assert_eq!(ast.star(), Some("rec"));
        assert_eq!(ast.shapes.len(), 2);
        assert_eq!(ast.shapes[1].positions, vec![("x".into(), PosSpec::Count(1)), ("rec".into(), PosSpec::Count(1))]);
        let sig = ast.to_signature(&no_files).unwrap();
        assert_eq!(sig.arity(1), 1);
        assert_eq!(sig.positions(0, 0), 0);
        assert_eq!(ast.pretty(), LIST);
    }

    #[test]
    fn empty_container() {
        let ast = parse_signature("container void (x) over {x}").unwrap();
        assert!(ast.shapes.is_empty() && ast.star().is_none());
        assert_eq!(ast.to_container(&no_files).unwrap().num_shapes(), 0);
    }

    #[test]
    fn errors_carry_positions() {
        let (line, column, msg) = parse_err("container c (x) over {x}\nshape s { y: 1 }");
        assert_eq!((line, column), (2, 11));
        assert!(msg.contains("undeclared"));
        let (line, _, msg) = parse_err("container c (x) over {x}\nshape s { x: 1 }\nshape s { x: 2 }");
        assert_eq!(line, 3);
        assert!(msg.contains("duplicate shape"));
        assert!(parse_err("container c (x) over {x}\nshape s { }").2.contains("does not declare"));
        assert!(parse_err("container c (x) over {x, y, z}").2.contains("at most one"));
        assert_eq!(parse_err("container c (x over {x}").0, 1);
        assert!(parse_err("container c (x) over {x}\nshape s { x: -1 }").2.contains("unexpected"));
    }

    #[test]
    fn normalizes_and_round_trips() {
        let text = "# trees\ncontainer \"bin tree\" (x) over {x, rec}\nshape leaf { rec: 0; x: 0 }\n\
                    shape node { x: 1; rec: 2; }\nshape twist { x: BZ2; rec: Disc(2); }\nshape f { x: \"g.json\"; rec: 0; }\n";
        let ast = parse_signature(text).unwrap();
        let printed = ast.pretty();
        let again = parse_signature(&printed).unwrap();
        assert_eq!(again, ast.normalize());
        assert_eq!(again.pretty(), printed);
        assert!(printed.contains("shape f { x: \"g.json\"; rec: 0; }"));
        let c = ast.to_container(&|_| Ok(disc(5)));
        assert!(!c.unwrap().is_discrete());
    }

    #[test]
    fn from_container_round_trips() {
        let ast = parse_signature(LIST).unwrap();
        let c = ast.to_container(&no_files).unwrap();
        let back = SignatureAst::from_container("list", &c, &["x".into()]).unwrap();
        assert_eq!(back, ast);
    }
}
