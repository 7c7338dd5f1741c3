//! Parser for the IR dump format and alpha-equivalence on parsed methods.
//!
//! Statements are kept as token lists; identifiers listed on the `locals:`
//! line are locals, `bb<N>` tokens are block references.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrBlock {
    pub id: usize,
    pub dead: bool,
    pub preds: Vec<usize>,
    pub stmts: Vec<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrMethod {
    pub signature: String,
    pub locals: Vec<String>,
    pub blocks: Vec<IrBlock>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.msg)
    }
}

impl std::error::Error for ParseError {}

/// Splits a statement line into tokens: identifiers (with `@`, `%`, `$`),
/// numbers, quoted strings and punctuation, with `::` and multi-character
/// operators kept whole.
pub fn tokenize(line: &str) -> Result<Vec<String>, String> {
    const OPS: [&str; 15] = [">>>", "===", "!==", "::", "==", "!=", "<=", ">=", "<<", ">>", "++", "--", "&&", "||", "=>"];
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c == '\'' || c == '"' || c == '`' {
            let start = i;
            i += 1;
            while i < chars.len() && chars[i] != c {
                if chars[i] == '\\' {
                    i += 1;
                }
                i += 1;
            }
            if i >= chars.len() {
                return Err("unterminated string".into());
            }
            i += 1;
            out.push(chars[start..i].iter().collect());
        } else if c.is_alphanumeric() || c == '_' || c == '@' || c == '%' || c == '$' || c == '.' && i + 1 < chars.len() && chars[i + 1].is_ascii_digit() {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || matches!(chars[i], '_' | '@' | '%' | '$')) {
                i += 1;
            }
            if start < i && chars[start].is_ascii_digit() {
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '.' || chars[i] == '-' && matches!(chars[i - 1], 'e' | 'E')) {
                    i += 1;
                }
            }
            if start == i {
                i += 1;
            }
            out.push(chars[start..i].iter().collect());
        } else {
            let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
            match OPS.iter().find(|op| rest.starts_with(*op)) {
                Some(op) => {
                    out.push(op.to_string());
                    i += op.len();
                }
                None => {
                    out.push(c.to_string());
                    i += 1;
                }
            }
        }
    }
    Ok(out)
}

fn block_ref(tok: &str) -> Option<usize> {
    tok.strip_prefix("bb").and_then(|n| n.parse().ok())
}

/// Parses every `method ... { ... }` in `text`; the version header and
/// blank lines are skipped.
pub fn parse_ir(text: &str) -> Result<Vec<IrMethod>, ParseError> {
    let mut out = Vec::new();
    let mut cur: Option<IrMethod> = None;
    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let err = |msg: &str| ParseError { line, msg: msg.to_string() };
        let t = raw.trim();
        if t.is_empty() || (cur.is_none() && t.starts_with("//")) {
            continue;
        }
        match &mut cur {
            None => {
                let sig = t
                    .strip_prefix("method ")
                    .and_then(|r| r.strip_suffix('{'))
                    .ok_or_else(|| err("expected `method <signature> {`"))?;
                cur = Some(IrMethod { signature: sig.trim().to_string(), locals: Vec::new(), blocks: Vec::new() });
            }
            Some(m) => {
                if t == "}" {
                    out.push(cur.take().unwrap());
                } else if let Some(rest) = t.strip_prefix("locals:") {
                    m.locals = rest.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
                } else if t.starts_with("bb") && t.contains(':') && !t.contains('=') {
                    let (head, comment) = match t.split_once("//") {
                        Some((h, c)) => (h.trim(), Some(c.trim())),
                        None => (t, None),
                    };
                    let id = head.strip_suffix(':').and_then(block_ref).ok_or_else(|| err("bad block header"))?;
                    let mut b = IrBlock { id, dead: false, preds: Vec::new(), stmts: Vec::new() };
                    match comment {
                        Some("dead") => b.dead = true,
                        Some(c) => {
                            let list = c.strip_prefix("preds:").ok_or_else(|| err("bad block comment"))?;
                            for p in list.split(',') {
                                b.preds.push(block_ref(p.trim()).ok_or_else(|| err("bad predecessor"))?);
                            }
                        }
                        None => {}
                    }
                    m.blocks.push(b);
                } else {
                    let b = m.blocks.last_mut().ok_or_else(|| err("statement outside a block"))?;
                    b.stmts.push(tokenize(t).map_err(|e| err(&e))?);
                }
            }
        }
    }
    if cur.is_some() {
        return Err(ParseError { line: text.lines().count(), msg: "unterminated method".into() });
    }
    Ok(out)
}

fn render_tokens(toks: &[String]) -> String {
    let mut s = String::new();
    for (i, t) in toks.iter().enumerate() {
        let prev = if i > 0 { toks[i - 1].as_str() } else { "" };
        let glue_before = matches!(t.as_str(), "." | "(" | ")" | "[" | "]" | "," | "::" | ":")
            || matches!(prev, "." | "(" | "[" | "::" | "!" | "~")
            || (prev == "-" || prev == "+") && i >= 2 && matches!(toks[i - 2].as_str(), "=" | "(" | "," | "return")
            || (t == "++" || t == "--");
        let glue_before = glue_before && !(t == "(" && matches!(prev, "=" | "return" | ",")) && !(prev == "," );
        if i > 0 && !glue_before {
            s.push(' ');
        }
        s.push_str(t);
    }
    s
}

impl fmt::Display for IrMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "method {} {{", self.signature)?;
        if self.locals.is_empty() {
            writeln!(f, "  locals:")?;
        } else {
            writeln!(f, "  locals: {}", self.locals.join(", "))?;
        }
        for b in &self.blocks {
            write!(f, "  bb{}:", b.id)?;
            if b.dead {
                write!(f, " // dead")?;
            } else if !b.preds.is_empty() {
                let p: Vec<String> = b.preds.iter().map(|p| format!("bb{p}")).collect();
                write!(f, " // preds: {}", p.join(", "))?;
            }
            writeln!(f)?;
            for s in &b.stmts {
                writeln!(f, "    {}", render_tokens(s))?;
            }
        }
        writeln!(f, "}}")
    }
}

fn is_call(toks: &[String]) -> bool {
    toks.last().map(|t| t == ")").unwrap_or(false) && !toks.iter().any(|t| t == "new" || t == "newarray")
}

/// Drops `t = ` from calls whose result local is never read, and removes
/// such locals from the locals list.
pub fn drop_unused_results(m: &mut IrMethod) {
    let mut counts: HashMap<String, usize> = HashMap::new();
    for b in &m.blocks {
        for s in &b.stmts {
            for t in s {
                *counts.entry(t.clone()).or_default() += 1;
            }
        }
    }
    let locals: BTreeSet<String> = m.locals.iter().cloned().collect();
    let mut dropped = BTreeSet::new();
    for b in &mut m.blocks {
        for s in &mut b.stmts {
            if s.len() > 2 && s[1] == "=" && locals.contains(&s[0]) && counts.get(&s[0]) == Some(&1) && is_call(&s[2..]) {
                dropped.insert(s[0].clone());
                s.drain(0..2);
            }
        }
    }
    m.locals.retain(|l| !dropped.contains(l));
}

fn bind(x: &str, y: &str, fwd: &mut HashMap<String, String>, back: &mut HashMap<String, String>) -> bool {
    match (fwd.get(x), back.get(y)) {
        (Some(fy), Some(bx)) => fy == y && bx == x,
        (None, None) => {
            fwd.insert(x.to_string(), y.to_string());
            back.insert(y.to_string(), x.to_string());
            true
        }
        _ => false,
    }
}

fn is_identity(s: &[String]) -> bool {
    s.len() == 3 && s[1] == "=" && (s[2] == "@this" || s[2].starts_with("@param"))
}

/// Normal form for golden comparison: parameter and `this` identity
/// statements go, unused call results go, and empty blocks that no branch
/// names are removed.
pub fn normalize(m: &mut IrMethod) {
    for b in &mut m.blocks {
        b.stmts.retain(|s| !is_identity(s));
    }
    drop_unused_results(m);
    let named: BTreeSet<usize> = m.blocks.iter().flat_map(|b| b.stmts.iter().flatten()).filter_map(|t| block_ref(t)).collect();
    m.blocks.retain(|b| !b.stmts.is_empty() || named.contains(&b.id));
    let used: BTreeSet<&String> = m.blocks.iter().flat_map(|b| b.stmts.iter().flatten()).collect();
    let keep: Vec<String> = m.locals.iter().filter(|l| used.contains(l)).cloned().collect();
    m.locals = keep;
}

/// Checks that `a` and `b` are equal up to a bijective renaming of locals
/// (except those for which `fixed` holds, which must match exactly) and of
/// block ids. The method signature is not compared.
pub fn alpha_eq(a: &IrMethod, b: &IrMethod, fixed: &dyn Fn(&str) -> bool) -> Result<(), String> {
    if a.blocks.len() != b.blocks.len() {
        return Err(format!("block count {} vs {}", a.blocks.len(), b.blocks.len()));
    }
    let la: BTreeSet<&str> = a.locals.iter().map(|s| s.as_str()).collect();
    let lb: BTreeSet<&str> = b.locals.iter().map(|s| s.as_str()).collect();
    let mut lf: HashMap<String, String> = HashMap::new();
    let mut lbk: HashMap<String, String> = HashMap::new();
    let mut bf: HashMap<String, String> = HashMap::new();
    let mut bbk: HashMap<String, String> = HashMap::new();
    for (i, (x, y)) in a.blocks.iter().zip(&b.blocks).enumerate() {
        if !bind(&format!("bb{}", x.id), &format!("bb{}", y.id), &mut bf, &mut bbk) {
            return Err(format!("block {i}: inconsistent block renaming"));
        }
        if x.dead != y.dead {
            return Err(format!("block {i}: dead flag differs"));
        }
        if x.stmts.len() != y.stmts.len() {
            return Err(format!("block {i}: {} vs {} statements", x.stmts.len(), y.stmts.len()));
        }
        for (j, (s, t)) in x.stmts.iter().zip(&y.stmts).enumerate() {
            let here = || format!("block {i} stmt {j}: `{}` vs `{}`", render_tokens(s), render_tokens(t));
            if s.len() != t.len() {
                return Err(here());
            }
            for (p, q) in s.iter().zip(t) {
                let (pl, ql) = (la.contains(p.as_str()), lb.contains(q.as_str()));
                if pl != ql {
                    return Err(here());
                }
                if pl {
                    if fixed(p) || fixed(q) {
                        if p != q {
                            return Err(here());
                        }
                    } else if !bind(p, q, &mut lf, &mut lbk) {
                        return Err(here());
                    }
                } else if block_ref(p).is_some() && block_ref(q).is_some() {
                    if !bind(p, q, &mut bf, &mut bbk) {
                        return Err(here());
                    }
                } else if p != q {
                    return Err(here());
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "// arklight-ir v1\nmethod a.ets: %dflt.f/1 {\n  locals: x, temp0\n  bb0:\n    x = @param0\n    if x > 0 goto bb1 else bb2\n  bb1: // preds: bb0\n    temp0 = console.log('a, b')\n    goto bb2\n  bb2: // preds: bb0, bb1\n    return x\n}\n";

    #[test]
    fn round_trips_dump_text() {
        let ms = parse_ir(SAMPLE).unwrap();
        assert_eq!(ms.len(), 1);
        let printed = format!("// arklight-ir v1\n{}", ms[0]);
        assert_eq!(printed, SAMPLE);
    }

    #[test]
    fn alpha_renaming_of_temps_and_blocks() {
        let a = parse_ir(SAMPLE).unwrap().remove(0);
        let b = parse_ir(&SAMPLE.replace("temp0", "t9").replace("bb1", "bb7")).unwrap().remove(0);
        assert!(alpha_eq(&a, &b, &|n| n == "x").is_ok());
        let c = parse_ir(&SAMPLE.replace("return x", "return temp0")).unwrap().remove(0);
        assert!(alpha_eq(&a, &c, &|n| n == "x").is_err());
    }

    #[test]
    fn renaming_must_be_injective() {
        let a = parse_ir("method m {\n  locals: p, q\n  bb0:\n    p = 1\n    q = 2\n    return\n}\n").unwrap().remove(0);
        let b = parse_ir("method m {\n  locals: r\n  bb0:\n    r = 1\n    r = 2\n    return\n}\n").unwrap().remove(0);
        assert!(alpha_eq(&a, &b, &|_| false).is_err());
    }

    #[test]
    fn normal_form_drops_identities_and_empty_blocks() {
        let mut a = parse_ir("method m {\n  locals: x, temp0\n  bb0:\n    x = @param0\n  bb1:\n    if x > 0 goto bb1 else bb2\n  bb2:\n    temp0 = f(x)\n    return\n}\n").unwrap().remove(0);
        normalize(&mut a);
        assert_eq!(a.blocks.len(), 2);
        assert_eq!(a.locals, vec!["x"]);
        assert_eq!(a.blocks[1].stmts[0], vec!["f", "(", "x", ")"]);
    }

    #[test]
    fn unused_call_results_are_dropped() {
        let mut a = parse_ir(SAMPLE).unwrap().remove(0);
        drop_unused_results(&mut a);
        assert_eq!(a.locals, vec!["x"]);
        assert_eq!(a.blocks[1].stmts[0][0], "console");
    }
}
