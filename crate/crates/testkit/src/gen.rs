//! Seeded source generators for property tests and the efficiency corpus.

use std::fmt::Write;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

struct IntGen {
    rng: ChaCha8Rng,
    vars: Vec<String>,
    counters: usize,
    out: String,
}

impl IntGen {
    fn var(&mut self) -> String {
        self.vars.choose(&mut self.rng).unwrap().clone()
    }

    fn expr(&mut self, depth: u32) -> String {
        let leaf = depth == 0 || self.rng.gen_bool(0.3);
        if leaf {
            return if self.rng.gen_bool(0.6) { self.var() } else { self.rng.gen_range(0..10).to_string() };
        }
        match self.rng.gen_range(0..10) {
            0..=3 => {
                let op = *["+", "-", "*", "&", "|", "^", "<<", ">>", "<", "<=", ">", ">=", "==", "!=", "===", "!=="].choose(&mut self.rng).unwrap();
                format!("({} {op} {})", self.expr(depth - 1), self.expr(depth - 1))
            }
            4 => {
                let op = *["%", "/"].choose(&mut self.rng).unwrap();
                format!("({} {op} {})", self.expr(depth - 1), self.rng.gen_range(1..6))
            }
            5 => {
                let op = *["-", "!", "~"].choose(&mut self.rng).unwrap();
                format!("{op}({})", self.expr(depth - 1))
            }
            6 => format!("({} ? {} : {})", self.expr(depth - 1), self.expr(depth - 1), self.expr(depth - 1)),
            7 => {
                let op = *["&&", "||"].choose(&mut self.rng).unwrap();
                format!("({} {op} {})", self.expr(depth - 1), self.expr(depth - 1))
            }
            8 => {
                let v = self.var();
                match self.rng.gen_range(0..4) {
                    0 => format!("{v}++"),
                    1 => format!("{v}--"),
                    2 => format!("++{v}"),
                    _ => format!("--{v}"),
                }
            }
            _ => {
                let v = self.var();
                format!("({v} = {})", self.expr(depth - 1))
            }
        }
    }

    fn stmts(&mut self, indent: usize, n: usize, depth: u32) {
        for _ in 0..n {
            self.stmt(indent, depth);
        }
    }

    fn stmt(&mut self, indent: usize, depth: u32) {
        let pad = "  ".repeat(indent);
        let kind = if depth == 0 { self.rng.gen_range(0..3) } else { self.rng.gen_range(0..6) };
        match kind {
            0 => {
                let v = self.var();
                let e = self.expr(2);
                let _ = writeln!(self.out, "{pad}{v} = {e};");
            }
            1 => {
                let v = self.var();
                let op = *["+=", "-=", "*=", "&=", "|=", "^="].choose(&mut self.rng).unwrap();
                let e = self.expr(1);
                let _ = writeln!(self.out, "{pad}{v} {op} {e};");
            }
            2 => {
                let v = self.var();
                let op = *["++", "--"].choose(&mut self.rng).unwrap();
                let _ = writeln!(self.out, "{pad}{v}{op};");
            }
            3 => {
                let c = self.expr(2);
                let _ = writeln!(self.out, "{pad}if ({c}) {{");
                let n = self.rng.gen_range(1..3);
                self.stmts(indent + 1, n, depth - 1);
                if self.rng.gen_bool(0.5) {
                    let _ = writeln!(self.out, "{pad}}} else {{");
                    let n = self.rng.gen_range(1..3);
                    self.stmts(indent + 1, n, depth - 1);
                }
                let _ = writeln!(self.out, "{pad}}}");
            }
            4 => {
                let c = format!("k{}", self.counters);
                self.counters += 1;
                let bound = self.rng.gen_range(0..4);
                let _ = writeln!(self.out, "{pad}let {c}: number = 0;");
                let _ = writeln!(self.out, "{pad}while ({c} < {bound}) {{");
                let n = self.rng.gen_range(1..3);
                self.stmts(indent + 1, n, depth - 1);
                let _ = writeln!(self.out, "{pad}  {c}++;");
                let _ = writeln!(self.out, "{pad}}}");
            }
            _ => {
                let c = format!("j{}", self.counters);
                self.counters += 1;
                let bound = self.rng.gen_range(0..4);
                let _ = writeln!(self.out, "{pad}for (let {c} = 0; {c} < {bound}; {c}++) {{");
                let n = self.rng.gen_range(1..3);
                self.stmts(indent + 1, n, depth - 1);
                if self.rng.gen_bool(0.3) {
                    let v = self.var();
                    let _ = writeln!(self.out, "{pad}  if ({v} > 50) {{\n{pad}    break;\n{pad}  }}");
                }
                let _ = writeln!(self.out, "{pad}}}");
            }
        }
    }
}

/// A `function main(): void` over integer variables with assignments,
/// compound assignments, increments, branches and bounded loops. Loop
/// counters are never written by loop bodies, so every program terminates.
pub fn int_program(seed: u64) -> String {
    let mut r = rng(seed);
    let nvars = r.gen_range(2..6);
    let vars: Vec<String> = (0..nvars).map(|i| format!("v{i}")).collect();
    let mut g = IntGen { rng: r, vars, counters: 0, out: String::new() };
    g.out.push_str("function main(): void {\n");
    for v in g.vars.clone() {
        let init = g.rng.gen_range(-5..10);
        let _ = writeln!(g.out, "  let {v}: number = {init};");
    }
    let n = g.rng.gen_range(2..8);
    g.stmts(1, n, 2);
    g.out.push_str("}\n");
    g.out
}

/// Random single-inheritance hierarchy with a driver. Root classes declare
/// every method, subclasses override a random subset, and `mK` only calls
/// methods with larger index, so programs terminate. Variables are typed with
/// an ancestor of the class they hold, so every program runs without errors.
pub fn hierarchy_program(seed: u64) -> String {
    let mut r = rng(seed);
    let nclasses = r.gen_range(2..8);
    let nmethods = r.gen_range(1..4);
    let mut parent: Vec<Option<usize>> = Vec::new();
    for i in 0..nclasses {
        parent.push(if i > 0 && r.gen_bool(0.7) { Some(r.gen_range(0..i)) } else { None });
    }
    let ancestors = |mut c: usize| {
        let mut v = vec![c];
        while let Some(p) = parent[c] {
            v.push(p);
            c = p;
        }
        v
    };
    let mut out = String::new();
    let call = |r: &mut ChaCha8Rng, out: &mut String, min_method: usize, pad: &str, tag: &str| {
        let concrete = r.gen_range(0..nclasses);
        let anc = ancestors(concrete);
        let stat = anc.choose(r).copied().unwrap();
        let m = r.gen_range(min_method..nmethods);
        let _ = writeln!(out, "{pad}let o{tag}: C{stat} = new C{concrete}();");
        let _ = writeln!(out, "{pad}o{tag}.m{m}();");
    };
    for i in 0..nclasses {
        let ext = parent[i].map(|p| format!(" extends C{p}")).unwrap_or_default();
        let _ = writeln!(out, "class C{i}{ext} {{");
        for m in 0..nmethods {
            if parent[i].is_some() && r.gen_bool(0.5) {
                continue;
            }
            let _ = writeln!(out, "  m{m}(): number {{");
            if m + 1 < nmethods && r.gen_bool(0.6) {
                call(&mut r, &mut out, m + 1, "    ", "");
            }
            let _ = writeln!(out, "    return {};", i * 10 + m);
            let _ = writeln!(out, "  }}");
        }
        let _ = writeln!(out, "}}");
    }
    let _ = writeln!(out, "function use(o: C0): void {{\n  o.m0();\n}}");
    let _ = writeln!(out, "function main(): void {{");
    let ncalls = r.gen_range(1..5);
    for k in 0..ncalls {
        call(&mut r, &mut out, 0, "  ", &k.to_string());
    }
    let roots0: Vec<usize> = (0..nclasses).filter(|&c| ancestors(c).contains(&0)).collect();
    if let Some(c) = roots0.choose(&mut r) {
        let _ = writeln!(out, "  use(new C{c}());");
    }
    let _ = writeln!(out, "}}");
    out
}

/// Synthetic multi-file project for timing scene construction and call
/// graphs. Each file defines a small class family and a driver function
/// calling into the previous file; `main` in the first file calls every
/// driver.
pub fn corpus(files: usize, seed: u64) -> Vec<(String, String)> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    for f in 0..files {
        let mut s = String::new();
        let _ = writeln!(s, "// generated module {f}");
        let _ = writeln!(s, "abstract class Shape{f} {{");
        let _ = writeln!(s, "  name: string = 'shape{f}';");
        let _ = writeln!(s, "  abstract area(): number;");
        let _ = writeln!(s, "  describe(): string {{\n    return `${{this.name}}: ${{this.area()}}`;\n  }}");
        let _ = writeln!(s, "}}");
        let kinds = r.gen_range(3..5);
        for k in 0..kinds {
            let _ = writeln!(s, "class Shape{f}_{k} extends Shape{f} {{");
            let _ = writeln!(s, "  size: number;");
            let _ = writeln!(s, "  constructor(size: number) {{\n    super();\n    this.size = size;\n  }}");
            let _ = writeln!(s, "  area(): number {{");
            let _ = writeln!(s, "    let total = 0;");
            let _ = writeln!(s, "    for (let i = 0; i < this.size; i++) {{");
            let _ = writeln!(s, "      if (i % {} == 0) {{\n        total += i * {};\n      }} else {{\n        total -= 1;\n      }}", k + 2, k + 1);
            let _ = writeln!(s, "    }}");
            let _ = writeln!(s, "    return total;");
            let _ = writeln!(s, "  }}");
            if r.gen_bool(0.5) {
                let _ = writeln!(s, "  scale(by: number): Shape{f} {{\n    return new Shape{f}_{k}(this.size * by);\n  }}");
            }
            let _ = writeln!(s, "}}");
        }
        let _ = writeln!(s, "class Registry{f} {{");
        let _ = writeln!(s, "  items: Shape{f}[] = [];");
        let _ = writeln!(s, "  add(s: Shape{f}): void {{\n    this.items.push(s);\n  }}");
        let _ = writeln!(s, "  total(): number {{");
        let _ = writeln!(s, "    let sum = 0;");
        let _ = writeln!(s, "    for (let i = 0; i < this.items.length; i++) {{\n      sum += this.items[i].area();\n    }}");
        let _ = writeln!(s, "    return sum;");
        let _ = writeln!(s, "  }}");
        let _ = writeln!(s, "  report(): void {{");
        let _ = writeln!(s, "    for (let i = 0; i < this.items.length; i++) {{\n      console.log(this.items[i].describe());\n    }}");
        let _ = writeln!(s, "  }}");
        let _ = writeln!(s, "}}");
        let _ = writeln!(s, "export function drive{f}(n: number): number {{");
        let _ = writeln!(s, "  let reg = new Registry{f}();");
        for k in 0..kinds {
            if r.gen_bool(0.8) {
                let _ = writeln!(s, "  reg.add(new Shape{f}_{k}(n + {k}));");
            }
        }
        let _ = writeln!(s, "  let result = reg.total();");
        if f > 0 {
            let _ = writeln!(s, "  result += drive{}(n - 1);", f - 1);
        }
        let _ = writeln!(s, "  let label = result > 100 ? 'big' : 'small';");
        let _ = writeln!(s, "  while (result > 1000) {{\n    result = result / 2;\n  }}");
        let _ = writeln!(s, "  if (label === 'big') {{\n    reg.report();\n  }}");
        let _ = writeln!(s, "  return result;");
        let _ = writeln!(s, "}}");
        if f == 0 {
            let _ = writeln!(s, "function main(): void {{");
            for g in (0..files).rev() {
                let _ = writeln!(s, "  console.log(drive{g}({}));", g % 7 + 1);
            }
            let _ = writeln!(s, "}}");
        }
        out.push((format!("src/module{f:02}.ets"), s));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(int_program(7), int_program(7));
        assert_eq!(hierarchy_program(7), hierarchy_program(7));
        assert_eq!(corpus(3, 1), corpus(3, 1));
        assert_ne!(int_program(7), int_program(8));
    }

    #[test]
    fn corpus_has_the_requested_scale() {
        let c = corpus(50, 0);
        let lines: usize = c.iter().map(|(_, s)| s.lines().count()).sum();
        assert_eq!(c.len(), 50);
        assert!((4_000..7_000).contains(&lines), "{lines} lines");
    }
}
