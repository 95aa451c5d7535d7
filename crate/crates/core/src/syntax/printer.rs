use std::fmt::Write;

use super::ast::*;

// Precedence levels, loosest first.
const LAM: u8 = 0;
const ARROW: u8 = 1;
const SIGMA: u8 = 2;
const EQ: u8 = 3;
const JOIN: u8 = 4;
const MEET: u8 = 5;
const APP: u8 = 6;
const INST: u8 = 7;
const POSTFIX: u8 = 8;
const ATOM: u8 = 9;

pub fn print_expr(e: &Expr) -> String {
    let mut out = String::new();
    expr(&mut out, e, LAM);
    out
}

pub fn print_cell(c: &CellExpr) -> String {
    match c {
        CellExpr::Identity(w, _) => format!("id{{{w}}}"),
        CellExpr::Steps(steps) => steps
            .iter()
            .map(|s| {
                let mut t = String::new();
                if !s.left.is_identity() {
                    let _ = write!(t, "{} <| ", s.left);
                }
                t.push_str(s.gen.name());
                if !s.right.is_identity() {
                    let _ = write!(t, " |> {}", s.right);
                }
                t
            })
            .collect::<Vec<_>>()
            .join(" ; "),
    }
}

pub fn print_lock(l: &LockAnn) -> String {
    let mut s = l.word.to_string();
    if !l.names.is_empty() {
        s.push(';');
        for n in &l.names {
            s.push(' ');
            s.push_str(&n.name);
        }
    }
    s
}

pub fn print_decl(d: &Decl) -> String {
    let mut out = String::new();
    match &d.kind {
        DeclKind::Def => out.push_str("def "),
        DeclKind::Axiom => out.push_str("axiom "),
        DeclKind::Check => out.push_str("check "),
        DeclKind::FailCheck(code) => {
            let _ = write!(out, "fail-check {} ", code.as_str());
        }
    }
    out.push_str(&d.name.name);
    for b in &d.binders {
        out.push(' ');
        binder(&mut out, b);
    }
    out.push_str(" : ");
    expr(&mut out, &d.ty, LAM);
    if let Some(body) = &d.body {
        out.push_str(" := ");
        expr(&mut out, body, LAM);
    }
    out
}

pub fn print_module(m: &SurfaceModule) -> String {
    let mut out = String::new();
    for i in &m.imports {
        let _ = writeln!(out, "import {}", i.name);
    }
    if !m.imports.is_empty() {
        out.push('\n');
    }
    for d in &m.decls {
        out.push_str(&print_decl(d));
        out.push_str("\n\n");
    }
    out
}

fn binder(out: &mut String, b: &Binder) {
    out.push('(');
    let names: Vec<&str> = b.names.iter().map(|n| n.name.as_str()).collect();
    out.push_str(&names.join(" "));
    out.push_str(" : ");
    expr(out, &b.ty, LAM);
    if let Some(ann) = &b.ann {
        out.push_str(" @ ");
        out.push_str(&print_lock(ann));
    }
    out.push(')');
}

/// True when `(e : T)` would read as a binder group.
fn only_identifiers(e: &Expr) -> bool {
    match &e.kind {
        ExprKind::Var { cell: None, .. } => true,
        ExprKind::App { fun, arg } => only_identifiers(fun) && only_identifiers(arg),
        _ => false,
    }
}

fn level(e: &Expr) -> u8 {
    use ExprKind::*;
    match &e.kind {
        Lam { .. } | LetMod { .. } | Let { .. } => LAM,
        Pi { .. } | Arrow { .. } => ARROW,
        Sigma { .. } | Prod { .. } => SIGMA,
        Eq { .. } | Leq(..) => EQ,
        Join(..) => JOIN,
        Meet(..) => MEET,
        App { .. } | Id { .. } | Suc(_) | Lift(_) | LiftIn(_) | Lower(_) => APP,
        Inst { .. } => INST,
        Fst(_) | Snd(_) => POSTFIX,
        _ => ATOM,
    }
}

fn expr(out: &mut String, e: &Expr, min: u8) {
    if level(e) < min {
        out.push('(');
        expr(out, e, LAM);
        out.push(')');
        return;
    }
    use ExprKind::*;
    match &e.kind {
        Var { name, cell } => {
            out.push_str(name);
            if let Some(c) = cell {
                let _ = write!(out, "^{{{}}}", print_cell(c));
            }
        }
        Univ(n) => {
            let _ = write!(out, "U {n}");
        }
        Pi { binders, cod } => {
            for b in binders {
                binder(out, b);
                out.push(' ');
            }
            out.push_str("-> ");
            expr(out, cod, ARROW);
        }
        Arrow { dom, cod } => {
            expr(out, dom, SIGMA);
            out.push_str(" -> ");
            expr(out, cod, ARROW);
        }
        Lam { params, body } => {
            out.push_str("fun");
            for p in params {
                out.push(' ');
                match p {
                    LamParam::Name(n) => out.push_str(&n.name),
                    LamParam::Typed(b) => binder(out, b),
                }
            }
            out.push_str(" => ");
            expr(out, body, LAM);
        }
        App { fun, arg } => {
            expr(out, fun, APP);
            out.push(' ');
            expr(out, arg, INST);
        }
        Sigma { binders, snd } => {
            for b in binders {
                binder(out, b);
                out.push(' ');
            }
            out.push_str("* ");
            expr(out, snd, SIGMA);
        }
        Prod { fst, snd } => {
            expr(out, fst, EQ);
            out.push_str(" * ");
            expr(out, snd, SIGMA);
        }
        Pair { fst, snd } => {
            out.push('(');
            expr(out, fst, LAM);
            out.push_str(", ");
            expr(out, snd, LAM);
            out.push(')');
        }
        Fst(a) => {
            expr(out, a, POSTFIX);
            out.push_str(".1");
        }
        Snd(a) => {
            expr(out, a, POSTFIX);
            out.push_str(".2");
        }
        Ann { term, ty } => {
            let wrap = only_identifiers(term);
            out.push_str(if wrap { "((" } else { "(" });
            expr(out, term, LAM);
            out.push_str(" : ");
            expr(out, ty, LAM);
            out.push_str(if wrap { "))" } else { ")" });
        }
        Eq { lhs, rhs } => {
            expr(out, lhs, JOIN);
            out.push_str(" = ");
            expr(out, rhs, JOIN);
        }
        Leq(lhs, rhs) => {
            expr(out, lhs, JOIN);
            out.push_str(" <= ");
            expr(out, rhs, JOIN);
        }
        Join(a, b) => {
            expr(out, a, JOIN);
            out.push_str(" \\/ ");
            expr(out, b, MEET);
        }
        Meet(a, b) => {
            expr(out, a, MEET);
            out.push_str(" /\\ ");
            expr(out, b, APP);
        }
        Id { ty, lhs, rhs } => {
            out.push_str("Id ");
            expr(out, ty, INST);
            out.push(' ');
            expr(out, lhs, INST);
            out.push(' ');
            expr(out, rhs, INST);
        }
        Refl => out.push_str("refl"),
        J { motive, base, eq } => call(out, "J", &[motive, base, eq].map(|b| &**b)),
        Modal { lock, ty } => {
            let _ = write!(out, "<{}| ", print_lock(lock));
            expr(out, ty, LAM);
            out.push('>');
        }
        ModIntro { lock, body } => {
            let _ = write!(out, "mod{{{}}}(", print_lock(lock));
            expr(out, body, LAM);
            out.push(')');
        }
        LetMod {
            outer,
            inner,
            var,
            scrut,
            motive,
            body,
        } => {
            out.push_str("let");
            if let Some(o) = outer {
                let _ = write!(out, "{{{}}}", print_lock(o));
            }
            let _ = write!(out, " mod{{{inner}}}({}) = ", var.name);
            expr(out, scrut, LAM);
            if let Some((y, m)) = motive {
                let _ = write!(out, " return {} => ", y.name);
                expr(out, m, LAM);
            }
            out.push_str(" in ");
            expr(out, body, LAM);
        }
        Let { var, ty, val, body } => {
            let _ = write!(out, "let {} : ", var.name);
            expr(out, ty, LAM);
            out.push_str(" := ");
            expr(out, val, LAM);
            out.push_str(" in ");
            expr(out, body, LAM);
        }
        Coe { cell, term } => {
            let _ = write!(out, "coe{{{}}}(", print_cell(cell));
            expr(out, term, LAM);
            out.push(')');
        }
        Inst { body, arg } => {
            expr(out, body, INST);
            out.push_str(" # ");
            expr(out, arg, POSTFIX);
        }
        Int => out.push_str("Int"),
        Num(n) => {
            let _ = write!(out, "{n}");
        }
        Nat => out.push_str("Nat"),
        Suc(a) => prefix(out, "suc", a),
        NatRec {
            motive,
            zero,
            succ,
            target,
        } => call(out, "natrec", &[motive, zero, succ, target].map(|b| &**b)),
        Bool => out.push_str("Bool"),
        True => out.push_str("true"),
        False => out.push_str("false"),
        If {
            motive,
            then_,
            else_,
            target,
        } => call(out, "if", &[motive, then_, else_, target].map(|b| &**b)),
        Unit => out.push_str("Unit"),
        Tt => out.push_str("tt"),
        Empty => out.push_str("Empty"),
        Absurd { motive, target } => call(out, "absurd", &[motive, target].map(|b| &**b)),
        Lift(a) => prefix(out, "Lift", a),
        LiftIn(a) => prefix(out, "lift", a),
        Lower(a) => prefix(out, "lower", a),
    }
}

fn prefix(out: &mut String, kw: &str, arg: &Expr) {
    out.push_str(kw);
    out.push(' ');
    expr(out, arg, INST);
}

fn call(out: &mut String, kw: &str, args: &[&Expr]) {
    out.push_str(kw);
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        expr(out, a, LAM);
    }
    out.push(')');
}

#[cfg(test)]
mod tests {
    use super::super::parser::parse_expr;
    use super::*;

    fn roundtrip(src: &str) -> String {
        print_expr(&parse_expr(src).unwrap())
    }

    #[test]
    fn modal_type_prints_canonically() {
        assert_eq!(roundtrip("<p| Int>"), "<p| Int>");
        assert_eq!(roundtrip("⟨p; i| A # i⟩"), "<p; i| A # i>");
    }

    #[test]
    fn ascription_is_not_a_telescope() {
        let s = roundtrip("((x : A)) -> B");
        assert_eq!(s, "((x : A)) -> B");
        assert!(matches!(parse_expr(&s).unwrap().kind, ExprKind::Arrow { .. }));
    }

    #[test]
    fn precedence() {
        assert_eq!(roundtrip("(a /\\ b) \\/ c"), "a /\\ b \\/ c");
        assert_eq!(roundtrip("a /\\ (b \\/ c)"), "a /\\ (b \\/ c)");
        assert_eq!(roundtrip("f (g x) y"), "f (g x) y");
        assert_eq!(roundtrip("(A -> B) -> C"), "(A -> B) -> C");
        assert_eq!(roundtrip("x^{g <| eps_gs ; eps0}.1"), "x^{g <| eps_gs ; eps0}.1");
    }
}
