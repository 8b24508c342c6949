use std::fmt::{self, Write};

use super::{Formula, Term};

/// Renders a formula in TPTP FOF syntax. Every binary connective and
/// quantifier is parenthesised, so the output re-parses unambiguously.
pub fn print_formula(f: &Formula) -> String {
    let mut s = String::new();
    write_formula(&mut s, f).expect("writing to a String cannot fail");
    s
}

fn is_lower_word(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_lowercase())
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

fn write_name(out: &mut impl Write, name: &str) -> fmt::Result {
    if is_lower_word(name) {
        out.write_str(name)
    } else {
        out.write_char('\'')?;
        for c in name.chars() {
            if c == '\'' || c == '\\' {
                out.write_char('\\')?;
            }
            out.write_char(c)?;
        }
        out.write_char('\'')
    }
}

pub(crate) fn write_term(out: &mut impl Write, t: &Term) -> fmt::Result {
    match t {
        Term::Var(v) => out.write_str(v),
        Term::App(f, args) => {
            write_name(out, f)?;
            write_args(out, args)
        }
    }
}

fn write_args(out: &mut impl Write, args: &[Term]) -> fmt::Result {
    if args.is_empty() {
        return Ok(());
    }
    out.write_char('(')?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.write_char(',')?;
        }
        write_term(out, a)?;
    }
    out.write_char(')')
}

fn write_formula(out: &mut impl Write, f: &Formula) -> fmt::Result {
    match f {
        Formula::Atom(p, args) if p == "=" && args.len() == 2 => {
            out.write_char('(')?;
            write_term(out, &args[0])?;
            out.write_str(" = ")?;
            write_term(out, &args[1])?;
            out.write_char(')')
        }
        Formula::Atom(p, args) => {
            write_name(out, p)?;
            write_args(out, args)
        }
        Formula::Neg(a) => {
            out.write_char('~')?;
            write_formula(out, a)
        }
        Formula::And(a, b) => write_binary(out, a, "&", b),
        Formula::Or(a, b) => write_binary(out, a, "|", b),
        Formula::Imp(a, b) => write_binary(out, a, "=>", b),
        Formula::Iff(a, b) => write_binary(out, a, "<=>", b),
        Formula::Forall(v, a) => write_quant(out, '!', v, a),
        Formula::Exists(v, a) => write_quant(out, '?', v, a),
    }
}

fn write_binary(out: &mut impl Write, a: &Formula, op: &str, b: &Formula) -> fmt::Result {
    out.write_char('(')?;
    write_formula(out, a)?;
    write!(out, " {op} ")?;
    write_formula(out, b)?;
    out.write_char(')')
}

fn write_quant(out: &mut impl Write, q: char, v: &str, a: &Formula) -> fmt::Result {
    write!(out, "({q} [{v}] : ")?;
    write_formula(out, a)?;
    out.write_char(')')
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_formula(f, self)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prints_the_documented_forms() {
        let p = Formula::prop("p");
        assert_eq!(print_formula(&Formula::imp(p.clone(), p.clone())), "(p => p)");
        assert_eq!(print_formula(&Formula::or(Formula::neg(p.clone()), p)), "(~p | p)");
        let q = Formula::forall("X", Formula::atom("p", vec![Term::var("X")]));
        assert_eq!(print_formula(&q), "(! [X] : p(X))");
    }

    #[test]
    fn quotes_non_lower_names_and_infixes_equality() {
        let f = Formula::atom("=", vec![Term::var("X"), Term::constant("Big")]);
        assert_eq!(print_formula(&f), "(X = 'Big')");
    }
}
