//! Pretty-printer with minimal parentheses.

use super::Formula;

// binding strength; higher binds tighter
const IFF: u8 = 1;
const IMPLIES: u8 = 2;
const OR: u8 = 3;
const AND: u8 = 4;
const UNARY: u8 = 5;

fn strength(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => IFF,
        Formula::Implies(..) => IMPLIES,
        Formula::Or(..) => OR,
        Formula::And(..) => AND,
        _ => UNARY,
    }
}

pub(super) fn print(f: &Formula) -> String {
    let mut out = String::new();
    write(f, &mut out);
    out
}

fn operand(f: &Formula, min: u8, out: &mut String) {
    if strength(f) < min {
        out.push('(');
        write(f, out);
        out.push(')');
    } else {
        write(f, out);
    }
}

fn binary(a: &Formula, op: &str, b: &Formula, left: u8, right: u8, out: &mut String) {
    operand(a, left, out);
    out.push(' ');
    out.push_str(op);
    out.push(' ');
    operand(b, right, out);
}

fn prefixed(prefix: &str, body: &Formula, out: &mut String) {
    out.push_str(prefix);
    out.push(' ');
    operand(body, UNARY, out);
}

fn write(f: &Formula, out: &mut String) {
    use Formula as F;
    match f {
        F::Atom(s) | F::Var(s) => out.push_str(s),
        F::Top => out.push_str("#t"),
        F::Bottom => out.push_str("#f"),
        F::Not(a) => {
            out.push('!');
            operand(a, UNARY, out);
        }
        // `&` and `|` associate to the left; `->` to the right
        F::And(a, b) => binary(a, "&", b, AND, UNARY, out),
        F::Or(a, b) => binary(a, "|", b, OR, AND, out),
        F::Implies(a, b) => binary(a, "->", b, OR, IMPLIES, out),
        F::Iff(a, b) => binary(a, "<->", b, IFF, IMPLIES, out),
        F::Box(a) => prefixed("[]", a, out),
        F::Diamond(a) => prefixed("<>", a, out),
        F::Stit(ag, a) => prefixed(&format!("[{ag}]"), a, out),
        F::Knows(ag, a) => prefixed(&format!("K:{ag}"), a, out),
        F::Believes(ag, None, a) => prefixed(&format!("B:{ag}"), a, out),
        F::Believes(ag, Some(c), a) => {
            out.push_str(&format!("B:{ag}["));
            write(c, out);
            out.push(']');
            out.push(' ');
            operand(a, UNARY, out);
        }
        F::OughtObj(ag, a) => prefixed(&format!("O:{ag}"), a, out),
        F::OughtSubj(ag, a) => prefixed(&format!("Os:{ag}"), a, out),
        F::OughtDox(ag, a) => prefixed(&format!("Ob:{ag}"), a, out),
    }
}
