//! Reference interpreter over lowered method bodies of a [`Scene`].
//!
//! Runs the simplified CFG with a small object heap and dynamic dispatch on
//! the runtime class of receivers. Every call that binds to a method is
//! recorded as a caller/callee pair. Stub methods without bodies return
//! `undefined`, except for a few console and array builtins.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use arklight::ir::{ArkBody, Atom, CallKind, ClassRef, Cond, Constant, FieldBase, Invoke, Place, Rvalue, Stmt};
use arklight::scene::{ClassSignature, MethodSignature, Scene};

use crate::value::{binary, unary, Value};

#[derive(Debug, Clone, PartialEq)]
pub struct Object {
    /// `None` for arrays.
    pub class: Option<ClassSignature>,
    pub fields: BTreeMap<String, Value>,
    pub elems: Vec<Value>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub ret: Value,
    /// Local values when the method returned.
    pub locals: BTreeMap<String, Value>,
}

pub struct IrInterp<'s> {
    scene: &'s Scene,
    pub heap: Vec<Object>,
    statics: HashMap<(String, String), Value>,
    steps: usize,
    limit: usize,
    depth: usize,
    /// Observed caller → callee pairs.
    pub edges: BTreeSet<(MethodSignature, MethodSignature)>,
    /// Lines written through `console`.
    pub output: Vec<String>,
}

fn const_value(c: &Constant) -> Value {
    match c {
        Constant::Number(n) => Value::Num(*n),
        Constant::String(s) => Value::Str(s.clone()),
        Constant::Bool(b) => Value::Bool(*b),
        Constant::Null => Value::Null,
        Constant::Undefined => Value::Undefined,
        Constant::FuncRef(m) => Value::Func(m.clone()),
    }
}

fn class_key(c: &ClassRef) -> String {
    c.sig.as_ref().map(|s| s.to_string()).unwrap_or_else(|| c.name.clone())
}

struct Frame<'b> {
    body: &'b ArkBody,
    sig: MethodSignature,
    this: Value,
    args: Vec<Value>,
    locals: BTreeMap<String, Value>,
}

impl<'s> IrInterp<'s> {
    pub fn new(scene: &'s Scene, limit: usize) -> Self {
        IrInterp { scene, heap: Vec::new(), statics: HashMap::new(), steps: 0, limit, depth: 0, edges: BTreeSet::new(), output: Vec::new() }
    }

    pub fn call(&mut self, sig: &MethodSignature, this: Value, args: Vec<Value>) -> Result<Outcome, String> {
        let m = self.scene.method(sig).ok_or_else(|| format!("no method {sig}"))?;
        let Some(body) = &m.body else {
            return Ok(Outcome { ret: self.builtin(sig, &this, &args), locals: BTreeMap::new() });
        };
        self.depth += 1;
        if self.depth > 200 {
            return Err("call depth exceeded".into());
        }
        let mut f = Frame { body, sig: sig.clone(), this, args, locals: BTreeMap::new() };
        let r = self.exec(&mut f);
        self.depth -= 1;
        Ok(Outcome { ret: r?, locals: f.locals })
    }

    fn builtin(&mut self, sig: &MethodSignature, this: &Value, args: &[Value]) -> Value {
        match (sig.class.name.as_str(), sig.name.as_str()) {
            ("console" | "hilog", _) => {
                let line: Vec<String> = args.iter().map(|a| a.display()).collect();
                self.output.push(line.join(" "));
                Value::Undefined
            }
            ("Array", "push") => {
                if let Value::Obj(o) = this {
                    self.heap[*o].elems.extend(args.iter().cloned());
                    return Value::Num(self.heap[*o].elems.len() as f64);
                }
                Value::Undefined
            }
            _ => Value::Undefined,
        }
    }

    fn atom(&self, f: &Frame, a: &Atom) -> Result<Value, String> {
        match a {
            Atom::Const(c) => Ok(const_value(c)),
            Atom::Local(l) => f.locals.get(l).cloned().ok_or_else(|| format!("{}: local `{l}` read before assignment", f.sig)),
        }
    }

    fn local(&self, f: &Frame, l: &str) -> Result<Value, String> {
        self.atom(f, &Atom::Local(l.to_string()))
    }

    fn object(&self, v: &Value, what: &str) -> Result<usize, String> {
        match v {
            Value::Obj(o) => Ok(*o),
            Value::Null | Value::Undefined => Err(format!("null dereference at {what}")),
            other => Err(format!("{what} on non-object {other:?}")),
        }
    }

    fn read_field(&self, f: &Frame, base: &FieldBase, field: &str) -> Result<Value, String> {
        match base {
            FieldBase::Class(c) => Ok(self.statics.get(&(class_key(c), field.to_string())).cloned().unwrap_or(Value::Undefined)),
            FieldBase::Local(l) => {
                let v = self.local(f, l)?;
                match (&v, field) {
                    (Value::Str(s), "length") => return Ok(Value::Num(s.chars().count() as f64)),
                    (Value::Obj(o), "length") if self.heap[*o].class.is_none() => {
                        return Ok(Value::Num(self.heap[*o].elems.len() as f64))
                    }
                    _ => {}
                }
                let o = self.object(&v, &format!("read of .{field}"))?;
                Ok(self.heap[o].fields.get(field).cloned().unwrap_or(Value::Undefined))
            }
        }
    }

    fn index(&self, f: &Frame, base: &str, index: &Atom) -> Result<(usize, usize), String> {
        let o = self.object(&self.local(f, base)?, "array access")?;
        let i = self.atom(f, index)?.to_number();
        if i < 0.0 || i.fract() != 0.0 {
            return Err(format!("bad array index {i}"));
        }
        Ok((o, i as usize))
    }

    fn rvalue(&mut self, f: &Frame, r: &Rvalue) -> Result<Value, String> {
        Ok(match r {
            Rvalue::Atom(a) => self.atom(f, a)?,
            Rvalue::Field { base, field } => self.read_field(f, base, field)?,
            Rvalue::Array { base, index } => {
                let (o, i) = self.index(f, base, index)?;
                self.heap[o].elems.get(i).cloned().unwrap_or(Value::Undefined)
            }
            Rvalue::Param(i) => f.args.get(*i).cloned().unwrap_or(Value::Undefined),
            Rvalue::This => f.this.clone(),
            Rvalue::Binary(op, a, b) => binary(*op, &self.atom(f, a)?, &self.atom(f, b)?)?,
            Rvalue::Unary(op, a) => unary(*op, &self.atom(f, a)?),
        })
    }

    fn assign(&mut self, f: &mut Frame, p: &Place, v: Value) -> Result<(), String> {
        match p {
            Place::Local(l) => {
                f.locals.insert(l.clone(), v);
            }
            Place::Field { base: FieldBase::Class(c), field } => {
                self.statics.insert((class_key(c), field.clone()), v);
            }
            Place::Field { base: FieldBase::Local(l), field } => {
                let o = self.object(&self.local(f, l)?, &format!("write of .{field}"))?;
                self.heap[o].fields.insert(field.clone(), v);
            }
            Place::Array { base, index } => {
                let (o, i) = self.index(f, base, index)?;
                let elems = &mut self.heap[o].elems;
                if i >= elems.len() {
                    elems.resize(i + 1, Value::Undefined);
                }
                elems[i] = v;
            }
        }
        Ok(())
    }

    fn stub_class(&self, name: &str) -> Option<ClassSignature> {
        self.scene.classes_named(name).into_iter().find(|c| c.is_stub).map(|c| c.signature.clone())
    }

    /// Runtime target of a call, with the receiver to bind to `this`.
    fn target(&self, f: &Frame, inv: &Invoke) -> Result<(MethodSignature, Value), String> {
        let argc = inv.args.len();
        let lookup = |c: &ClassSignature| {
            self.scene.lookup_method(c, &inv.method, argc).map(|m| m.signature.clone()).ok_or_else(|| format!("no method {}.{}/{argc}", c, inv.method))
        };
        match &inv.kind {
            CallKind::Free(Some(sig)) => {
                let m = self.scene.declared_method(&sig.class, &sig.name, argc).map(|m| m.signature.clone()).unwrap_or_else(|| sig.clone());
                Ok((m, Value::Undefined))
            }
            CallKind::Free(None) => Err(format!("unresolved function `{}`", inv.method)),
            CallKind::Pointer => match self.local(f, &inv.method)? {
                Value::Func(m) => Ok((m, Value::Undefined)),
                other => Err(format!("call of non-function {other:?}")),
            },
            CallKind::Static(c) => {
                let c = c.sig.as_ref().ok_or_else(|| format!("unresolved class `{}`", c.name))?;
                Ok((lookup(c)?, Value::Undefined))
            }
            CallKind::Special { base, class } => {
                let c = class.sig.as_ref().ok_or_else(|| format!("unresolved class `{}`", class.name))?;
                Ok((lookup(c)?, self.local(f, base)?))
            }
            CallKind::Instance(b) => {
                let recv = self.local(f, b)?;
                let class = match &recv {
                    Value::Obj(o) => match &self.heap[*o].class {
                        Some(c) => c.clone(),
                        None => self.stub_class("Array").ok_or("no Array stub")?,
                    },
                    Value::Str(_) => self.stub_class("String").ok_or("no String stub")?,
                    Value::Null | Value::Undefined => return Err(format!("null dereference calling .{}", inv.method)),
                    other => return Err(format!("method call on {other:?}")),
                };
                Ok((lookup(&class)?, recv))
            }
        }
    }

    fn exec(&mut self, f: &mut Frame) -> Result<Value, String> {
        let cfg = &f.body.cfg;
        let mut b = 0;
        loop {
            let block = &cfg.blocks[b];
            let mut next = None;
            for node in &block.stmts {
                self.steps += 1;
                if self.steps > self.limit {
                    return Err("step limit exceeded".into());
                }
                match &node.stmt {
                    Stmt::Assign { lhs, rhs } => {
                        let v = self.rvalue(f, rhs)?;
                        self.assign(f, lhs, v)?;
                    }
                    Stmt::Invoke(inv) => {
                        let (callee, this) = self.target(f, inv)?;
                        let args = inv.args.iter().map(|a| self.atom(f, a)).collect::<Result<Vec<_>, _>>()?;
                        self.edges.insert((f.sig.clone(), callee.clone()));
                        let out = self.call(&callee, this, args)?;
                        if let Some(r) = &inv.result {
                            f.locals.insert(r.clone(), out.ret);
                        }
                    }
                    Stmt::New { result, class } => {
                        self.heap.push(Object { class: class.sig.clone(), fields: BTreeMap::new(), elems: Vec::new() });
                        f.locals.insert(result.clone(), Value::Obj(self.heap.len() - 1));
                    }
                    Stmt::NewArray { result, len } => {
                        let n = self.atom(f, len)?.to_number();
                        let n = if n >= 0.0 && n.fract() == 0.0 { n as usize } else { return Err(format!("bad array length {n}")) };
                        self.heap.push(Object { class: None, fields: BTreeMap::new(), elems: vec![Value::Undefined; n] });
                        f.locals.insert(result.clone(), Value::Obj(self.heap.len() - 1));
                    }
                    Stmt::If { cond, then, els } => {
                        let taken = match cond {
                            Cond::Compare(op, a, c) => binary(*op, &self.atom(f, a)?, &self.atom(f, c)?)?.truthy(),
                            Cond::Truthy(a) => self.atom(f, a)?.truthy(),
                        };
                        next = Some(if taken { *then } else { *els });
                    }
                    Stmt::Goto(t) => next = Some(*t),
                    Stmt::Return(a) => {
                        return match a {
                            Some(a) => self.atom(f, a),
                            None => Ok(Value::Undefined),
                        }
                    }
                    Stmt::Label(_) | Stmt::Nop => {}
                    Stmt::Sugar(_) => return Err("sugar statement in simplified CFG".into()),
                }
            }
            b = match next.or_else(|| block.succs.first().copied()) {
                Some(n) => n,
                None => return Ok(Value::Undefined),
            };
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scene(src: &str) -> Scene {
        Scene::from_sources(vec![("main.ets", src)], Default::default()).unwrap()
    }

    #[test]
    fn dispatches_on_runtime_class() {
        let s = scene(
            "class A { f(): number { return 1; } }\nclass B extends A { f(): number { return 2; } }\nfunction main(): number { let a: A = new B(); let r = a.f(); console.log(r); return r; }\n",
        );
        let main = s.resolve_method("%dflt.main/0").unwrap();
        let mut it = IrInterp::new(&s, 10_000);
        let out = it.call(&main, Value::Undefined, vec![]).unwrap();
        assert_eq!(out.ret, Value::Num(2.0));
        assert_eq!(it.output, vec!["2"]);
        assert!(it.edges.iter().any(|(_, c)| c.class.name == "B" && c.name == "f"));
        assert!(!it.edges.iter().any(|(_, c)| c.class.name == "A" && c.name == "f"));
    }

    #[test]
    fn null_field_dereference_is_an_error() {
        let s = scene("class P { v: number = 1; }\nclass T { p: P; get(): number { return this.p.v; } }\nfunction main(): void { new T().get(); }\n");
        let main = s.resolve_method("%dflt.main/0").unwrap();
        let err = IrInterp::new(&s, 10_000).call(&main, Value::Undefined, vec![]).unwrap_err();
        assert!(err.contains("null dereference"), "{err}");
    }
}
