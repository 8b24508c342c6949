//! Recursive-descent reader for the FOF fragment of TPTP.
//!
//! Accepted: `fof(name, role, formula [, annotations...]).` with roles
//! `axiom`, `hypothesis`, `lemma`, `definition` and `conjecture`; binary
//! connectives `& | => <= <=> <~> ~| ~&`; `~`; `!`/`?` with variable lists;
//! infix `=` and `!=`; `%` line comments and `/* */` block comments.

use std::collections::{HashMap, HashSet};

use thiserror::Error;

use super::{Formula, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("symbol `{symbol}` used with arity {first} and {second}")]
    ArityClash { symbol: String, first: usize, second: usize },
    #[error("problem has no conjecture")]
    MissingConjecture,
    #[error("problem has more than one conjecture")]
    MultipleConjectures,
    #[error("duplicate formula name `{0}`")]
    DuplicateName(String),
    #[error("unsupported formula role `{0}`")]
    UnsupportedRole(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Lower(String),
    Upper(String),
    Quoted(String),
    Dollar(String),
    Number(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Dot,
    Colon,
    Bang,
    Question,
    Tilde,
    Amp,
    Bar,
    Imp,
    RevImp,
    Iff,
    Xor,
    Nor,
    Nand,
    Eq,
    Neq,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Lower(s) | Tok::Upper(s) | Tok::Dollar(s) | Tok::Number(s) => format!("`{s}`"),
            Tok::Quoted(s) => format!("'{s}'"),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBrack => "[",
            Tok::RBrack => "]",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::Colon => ":",
            Tok::Bang => "!",
            Tok::Question => "?",
            Tok::Tilde => "~",
            Tok::Amp => "&",
            Tok::Bar => "|",
            Tok::Imp => "=>",
            Tok::RevImp => "<=",
            Tok::Iff => "<=>",
            Tok::Xor => "<~>",
            Tok::Nor => "~|",
            Tok::Nand => "~&",
            Tok::Eq => "=",
            Tok::Neq => "!=",
            _ => "?",
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let err = |line, column, msg: String| ParseError { line, column, kind: ParseErrorKind::Syntax(msg) };
    macro_rules! bump {
        () => {{
            if chars[i] == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
            i += 1;
        }};
    }
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        if c.is_whitespace() {
            bump!();
            continue;
        }
        if c == '%' {
            while i < chars.len() && chars[i] != '\n' {
                bump!();
            }
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            bump!();
            bump!();
            loop {
                if i >= chars.len() {
                    return Err(err(l0, c0, "unterminated block comment".into()));
                }
                if chars[i] == '*' && chars.get(i + 1) == Some(&'/') {
                    bump!();
                    bump!();
                    break;
                }
                bump!();
            }
            continue;
        }
        let word_char = |c: char| c.is_ascii_alphanumeric() || c == '_';
        let tok = if c.is_ascii_alphabetic() || c == '$' {
            let start = i;
            bump!();
            while i < chars.len() && word_char(chars[i]) {
                bump!();
            }
            let w: String = chars[start..i].iter().collect();
            if c == '$' {
                Tok::Dollar(w)
            } else if c.is_ascii_uppercase() {
                Tok::Upper(w)
            } else {
                Tok::Lower(w)
            }
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                bump!();
            }
            Tok::Number(chars[start..i].iter().collect())
        } else if c == '\'' {
            bump!();
            let mut s = String::new();
            loop {
                match chars.get(i) {
                    None => return Err(err(l0, c0, "unterminated quoted name".into())),
                    Some('\'') => {
                        bump!();
                        break;
                    }
                    Some('\\') => {
                        bump!();
                        match chars.get(i) {
                            Some(&e) => {
                                s.push(e);
                                bump!();
                            }
                            None => return Err(err(l0, c0, "unterminated quoted name".into())),
                        }
                    }
                    Some(&ch) => {
                        s.push(ch);
                        bump!();
                    }
                }
            }
            if s.is_empty() {
                return Err(err(l0, c0, "empty quoted name".into()));
            }
            Tok::Quoted(s)
        } else {
            let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
            let (tok, len) = if rest.starts_with("<=>") {
                (Tok::Iff, 3)
            } else if rest.starts_with("<~>") {
                (Tok::Xor, 3)
            } else if rest.starts_with("=>") {
                (Tok::Imp, 2)
            } else if rest.starts_with("<=") {
                (Tok::RevImp, 2)
            } else if rest.starts_with("~|") {
                (Tok::Nor, 2)
            } else if rest.starts_with("~&") {
                (Tok::Nand, 2)
            } else if rest.starts_with("!=") {
                (Tok::Neq, 2)
            } else {
                let t = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '[' => Tok::LBrack,
                    ']' => Tok::RBrack,
                    ',' => Tok::Comma,
                    '.' => Tok::Dot,
                    ':' => Tok::Colon,
                    '!' => Tok::Bang,
                    '?' => Tok::Question,
                    '~' => Tok::Tilde,
                    '&' => Tok::Amp,
                    '|' => Tok::Bar,
                    '=' => Tok::Eq,
                    other => return Err(err(l0, c0, format!("unexpected character `{other}`"))),
                };
                (t, 1)
            };
            for _ in 0..len {
                bump!();
            }
            tok
        };
        out.push(Spanned { tok, line: l0, column: c0 });
    }
    out.push(Spanned { tok: Tok::Eof, line, column: col });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let s = &self.toks[self.pos];
        (s.line, s.column)
    }

    fn error<T>(&self, msg: impl Into<String>) -> PResult<T> {
        let (line, column) = self.here();
        Err(ParseError { line, column, kind: ParseErrorKind::Syntax(msg.into()) })
    }

    fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> PResult<()> {
        if *self.peek() == want {
            self.next();
            Ok(())
        } else {
            self.error(format!("expected {}, found {}", want.describe(), self.peek().describe()))
        }
    }

    fn name(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Lower(s) | Tok::Quoted(s) | Tok::Number(s) => {
                self.next();
                Ok(s)
            }
            other => self.error(format!("expected a name, found {}", other.describe())),
        }
    }

    fn formula(&mut self) -> PResult<Formula> {
        let first = self.unit()?;
        match self.peek() {
            Tok::Amp | Tok::Bar => {
                let op = self.peek().clone();
                let mut acc = first;
                while *self.peek() == op {
                    self.next();
                    let rhs = self.unit()?;
                    acc = if op == Tok::Amp { Formula::and(acc, rhs) } else { Formula::or(acc, rhs) };
                }
                if is_binary(self.peek()) {
                    return self.error("mixed connectives need parentheses");
                }
                Ok(acc)
            }
            Tok::Imp | Tok::RevImp | Tok::Iff | Tok::Xor | Tok::Nor | Tok::Nand => {
                let op = self.next();
                let rhs = self.unit()?;
                if is_binary(self.peek()) {
                    return self.error("non-associative connective needs parentheses");
                }
                Ok(match op {
                    Tok::Imp => Formula::imp(first, rhs),
                    Tok::RevImp => Formula::imp(rhs, first),
                    Tok::Iff => Formula::iff(first, rhs),
                    Tok::Xor => Formula::neg(Formula::iff(first, rhs)),
                    Tok::Nor => Formula::neg(Formula::or(first, rhs)),
                    Tok::Nand => Formula::neg(Formula::and(first, rhs)),
                    _ => unreachable!(),
                })
            }
            _ => Ok(first),
        }
    }

    fn unit(&mut self) -> PResult<Formula> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.next();
                Ok(Formula::neg(self.unit()?))
            }
            Tok::Bang | Tok::Question => {
                let universal = self.next() == Tok::Bang;
                self.expect(Tok::LBrack)?;
                let mut vars = Vec::new();
                loop {
                    match self.next() {
                        Tok::Upper(v) => vars.push(v),
                        other => {
                            self.pos -= 1;
                            return self.error(format!("expected a variable, found {}", other.describe()));
                        }
                    }
                    if *self.peek() == Tok::Comma {
                        self.next();
                    } else {
                        break;
                    }
                }
                self.expect(Tok::RBrack)?;
                self.expect(Tok::Colon)?;
                let mut body = self.unit()?;
                for v in vars.into_iter().rev() {
                    body = if universal { Formula::forall(v, body) } else { Formula::exists(v, body) };
                }
                Ok(body)
            }
            Tok::LParen => {
                self.next();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Dollar(w) => self.error(format!("`{w}` is not supported")),
            _ => self.atomic(),
        }
    }

    fn atomic(&mut self) -> PResult<Formula> {
        let lhs = self.term()?;
        match self.peek() {
            Tok::Eq | Tok::Neq => {
                let neg = self.next() == Tok::Neq;
                let rhs = self.term()?;
                let eq = Formula::atom("=", vec![lhs, rhs]);
                Ok(if neg { Formula::neg(eq) } else { eq })
            }
            _ => match lhs {
                Term::App(p, args) => Ok(Formula::Atom(p, args)),
                Term::Var(v) => self.error(format!("variable `{v}` used as a formula")),
            },
        }
    }

    fn term(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Upper(v) => {
                self.next();
                Ok(Term::Var(v))
            }
            Tok::Lower(_) | Tok::Quoted(_) | Tok::Number(_) => {
                let f = self.name()?;
                let mut args = Vec::new();
                if *self.peek() == Tok::LParen {
                    self.next();
                    loop {
                        args.push(self.term()?);
                        if *self.peek() == Tok::Comma {
                            self.next();
                        } else {
                            break;
                        }
                    }
                    self.expect(Tok::RParen)?;
                }
                Ok(Term::App(f, args))
            }
            Tok::Dollar(w) => self.error(format!("`{w}` is not supported")),
            other => self.error(format!("expected a term, found {}", other.describe())),
        }
    }

    /// Skips an annotation list up to (not including) the closing `)` of the
    /// enclosing `fof(...)`.
    fn skip_annotations(&mut self) -> PResult<()> {
        let mut depth = 0usize;
        loop {
            match self.peek() {
                Tok::Eof => return self.error("unterminated annotation"),
                Tok::LParen | Tok::LBrack => depth += 1,
                Tok::RParen | Tok::RBrack if depth == 0 => return Ok(()),
                Tok::RParen | Tok::RBrack => depth -= 1,
                _ => {}
            }
            self.next();
        }
    }
}

fn is_binary(t: &Tok) -> bool {
    matches!(t, Tok::Amp | Tok::Bar | Tok::Imp | Tok::RevImp | Tok::Iff | Tok::Xor | Tok::Nor | Tok::Nand)
}

/// Universally closes free variables, in order of first occurrence.
fn close(f: Formula) -> Formula {
    let mut order = Vec::new();
    fn walk(f: &Formula, bound: &mut Vec<String>, order: &mut Vec<String>) {
        fn term(t: &Term, bound: &[String], order: &mut Vec<String>) {
            match t {
                Term::Var(v) => {
                    if !bound.contains(v) && !order.contains(v) {
                        order.push(v.clone());
                    }
                }
                Term::App(_, args) => args.iter().for_each(|a| term(a, bound, order)),
            }
        }
        match f {
            Formula::Atom(_, args) => args.iter().for_each(|a| term(a, bound, order)),
            Formula::Neg(a) => walk(a, bound, order),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) | Formula::Iff(a, b) => {
                walk(a, bound, order);
                walk(b, bound, order);
            }
            Formula::Forall(v, a) | Formula::Exists(v, a) => {
                bound.push(v.clone());
                walk(a, bound, order);
                bound.pop();
            }
        }
    }
    walk(&f, &mut Vec::new(), &mut order);
    order.into_iter().rev().fold(f, |acc, v| Formula::forall(v, acc))
}

#[derive(Default)]
struct Arities {
    preds: HashMap<String, usize>,
    funs: HashMap<String, usize>,
}

impl Arities {
    fn record(map: &mut HashMap<String, usize>, sym: &str, n: usize) -> Result<(), ParseErrorKind> {
        match map.get(sym) {
            Some(&m) if m != n => Err(ParseErrorKind::ArityClash { symbol: sym.to_string(), first: m, second: n }),
            Some(_) => Ok(()),
            None => {
                map.insert(sym.to_string(), n);
                Ok(())
            }
        }
    }

    fn term(&mut self, t: &Term) -> Result<(), ParseErrorKind> {
        if let Term::App(f, args) = t {
            Self::record(&mut self.funs, f, args.len())?;
            for a in args {
                self.term(a)?;
            }
        }
        Ok(())
    }

    fn formula(&mut self, f: &Formula) -> Result<(), ParseErrorKind> {
        let mut result = Ok(());
        f.visit_atoms(&mut |p, args| {
            if result.is_err() {
                return;
            }
            result = Self::record(&mut self.preds, p, args.len());
            for a in args {
                if result.is_ok() {
                    result = self.term(a);
                }
            }
        });
        result
    }
}

/// Parses a TPTP FOF problem into the single closed, alpha-normalised
/// formula `(axiom_1 & ... & axiom_n) => conjecture`.
pub fn parse_problem(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let mut names = HashSet::new();
    let mut axioms = Vec::new();
    let mut conjecture: Option<Formula> = None;
    let mut arities = Arities::default();
    while *p.peek() != Tok::Eof {
        let (line, column) = p.here();
        let fail = |kind| ParseError { line, column, kind };
        match p.next() {
            Tok::Lower(w) if w == "fof" => {}
            other => {
                p.pos -= 1;
                return p.error(format!("expected `fof`, found {}", other.describe()));
            }
        }
        p.expect(Tok::LParen)?;
        let name = p.name()?;
        p.expect(Tok::Comma)?;
        let role = match p.next() {
            Tok::Lower(r) => r,
            other => {
                p.pos -= 1;
                return p.error(format!("expected a role, found {}", other.describe()));
            }
        };
        p.expect(Tok::Comma)?;
        let f = close(p.formula()?);
        if *p.peek() == Tok::Comma {
            p.next();
            p.skip_annotations()?;
        }
        p.expect(Tok::RParen)?;
        p.expect(Tok::Dot)?;
        if !names.insert(name.clone()) {
            return Err(fail(ParseErrorKind::DuplicateName(name)));
        }
        arities.formula(&f).map_err(fail)?;
        match role.as_str() {
            "axiom" | "hypothesis" | "lemma" | "definition" => axioms.push(f),
            "conjecture" => {
                if conjecture.is_some() {
                    return Err(fail(ParseErrorKind::MultipleConjectures));
                }
                conjecture = Some(f);
            }
            other => return Err(fail(ParseErrorKind::UnsupportedRole(other.to_string()))),
        }
    }
    let (line, column) = p.here();
    let conjecture = conjecture.ok_or(ParseError { line, column, kind: ParseErrorKind::MissingConjecture })?;
    let problem = match axioms.into_iter().reduce(Formula::and) {
        Some(ax) => Formula::imp(ax, conjecture),
        None => conjecture,
    };
    Ok(problem.alpha_normalize())
}

/// Parses a single bare formula (no `fof` wrapper), closing free variables.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("trailing input starting at {}", p.peek().describe()));
    }
    let f = close(f);
    Arities::default().formula(&f).map_err(|kind| ParseError { line: 1, column: 1, kind })?;
    Ok(f.alpha_normalize())
}

/// Parses a single term. Variables are kept as they are.
pub fn parse_term(text: &str) -> Result<Term, ParseError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let t = p.term()?;
    if *p.peek() != Tok::Eof {
        return p.error(format!("trailing input starting at {}", p.peek().describe()));
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_simple_conjecture() {
        let f = parse_problem("fof(c,conjecture, p => p).").unwrap();
        assert_eq!(f, Formula::imp(Formula::prop("p"), Formula::prop("p")));
    }

    #[test]
    fn closes_free_variables_universally() {
        let f = parse_problem("fof(c,conjecture, p(X)).").unwrap();
        assert_eq!(f, Formula::forall("X", Formula::atom("p", vec![Term::var("X")])));
    }

    #[test]
    fn combines_axioms_into_an_implication() {
        let text = "% comment\nfof(a1, axiom, p).\nfof(a2, hypothesis, q).\nfof(c, conjecture, p & q).";
        let f = parse_problem(text).unwrap();
        let (p, q) = (Formula::prop("p"), Formula::prop("q"));
        assert_eq!(f, Formula::imp(Formula::and(p.clone(), q.clone()), Formula::and(p, q)));
    }

    #[test]
    fn reports_line_and_column_of_syntax_errors() {
        let err = parse_problem("fof(c, conjecture,\n  p => ).").unwrap_err();
        assert_eq!((err.line, err.column), (2, 8));
        assert!(matches!(err.kind, ParseErrorKind::Syntax(_)));
    }

    #[test]
    fn rejects_arity_clash() {
        let err = parse_problem("fof(a, axiom, p(a)).\nfof(c, conjecture, p(a,b)).").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::ArityClash { ref symbol, first: 1, second: 2 } if symbol == "p"));
        let err = parse_problem("fof(c, conjecture, p(f(a), f)).").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::ArityClash { .. }));
    }

    #[test]
    fn rejects_missing_or_duplicate_conjecture_and_duplicate_names() {
        let err = parse_problem("fof(a, axiom, p).").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::MissingConjecture);
        let err = parse_problem("fof(a, conjecture, p).\nfof(b, conjecture, q).").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::MultipleConjectures);
        let err = parse_problem("fof(a, axiom, p).\nfof(a, conjecture, q).").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::DuplicateName("a".into()));
    }

    #[test]
    fn handles_equality_quantifier_lists_and_annotations() {
        let f = parse_problem("fof(c, conjecture, ! [X,Y] : (X = Y => Y != f(X)), file('x', c)).").unwrap();
        let x = Term::var("X");
        let y = Term::var("Y");
        let expected = Formula::forall(
            "X",
            Formula::forall(
                "Y",
                Formula::imp(
                    Formula::atom("=", vec![x.clone(), y.clone()]),
                    Formula::neg(Formula::atom("=", vec![y, Term::App("f".into(), vec![x])])),
                ),
            ),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn mixed_connectives_require_parentheses() {
        assert!(parse_problem("fof(c, conjecture, p & q | r).").is_err());
        assert!(parse_problem("fof(c, conjecture, p => q => r).").is_err());
        assert!(parse_problem("fof(c, conjecture, (p & q) | r).").is_ok());
    }
}
