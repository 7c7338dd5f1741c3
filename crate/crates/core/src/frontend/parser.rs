//! Recursive-descent parser producing a [`Module`].
//!
//! Errors inside a top-level declaration abandon that declaration only; the
//! parser resynchronizes at the next line that starts a declaration.

use super::ast::*;
use super::lexer::{lex, Keyword, Punct, TemplatePart, Token, TokenKind};
use super::source::{SourceFile, Span};
use crate::diag::{Code, Diagnostic};

#[derive(Debug)]
struct ParseError {
    code: Code,
    span: Span,
    message: String,
}

type PResult<T> = Result<T, ParseError>;

pub fn parse(source: &SourceFile) -> (Module, Vec<Diagnostic>) {
    let (tokens, mut diags) = lex(source);
    let mut p = Parser { tokens, pos: 0, ui_depth: 0 };
    let module = p.module(source, &mut diags);
    (module, diags)
}

/// Parses a standalone expression, e.g. from a template hole.
fn parse_tokens_as_expr(mut tokens: Vec<Token>, span: Span) -> PResult<Expr> {
    tokens.push(Token { kind: TokenKind::Eof, span: Span::new(span.hi, span.hi, span.line, span.col), newline_before: true });
    let mut p = Parser { tokens, pos: 0, ui_depth: 0 };
    let e = p.expr()?;
    if !p.at_eof() {
        return Err(p.err_here("unexpected token in template hole"));
    }
    Ok(e)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    /// Non-zero while parsing a `build` body or component children.
    ui_depth: u32,
}

fn describe(kind: &TokenKind) -> String {
    match kind {
        TokenKind::Ident(s) => format!("identifier `{s}`"),
        TokenKind::Keyword(k) => format!("keyword `{}`", k.as_str()),
        TokenKind::Number(n) => format!("number `{n}`"),
        TokenKind::Str(_) => "string literal".into(),
        TokenKind::Template(_) => "template string".into(),
        TokenKind::Punct(p) => format!("`{}`", p.as_str()),
        TokenKind::Eof => "end of file".into(),
    }
}

impl Parser {
    // ---- token helpers -------------------------------------------------

    fn peek(&self) -> &Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn peek_at(&self, n: usize) -> &Token {
        &self.tokens[(self.pos + n).min(self.tokens.len() - 1)]
    }

    fn at_eof(&self) -> bool {
        self.peek().kind == TokenKind::Eof
    }

    fn bump(&mut self) -> Token {
        let t = self.peek().clone();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn prev_span(&self) -> Span {
        self.tokens[self.pos.saturating_sub(1)].span
    }

    fn is(&self, p: Punct) -> bool {
        self.peek().is_punct(p)
    }

    fn is_kw(&self, k: Keyword) -> bool {
        self.peek().is_keyword(k)
    }

    fn eat(&mut self, p: Punct) -> bool {
        if self.is(p) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: Keyword) -> bool {
        if self.is_kw(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn err_here(&self, msg: &str) -> ParseError {
        let t = self.peek();
        ParseError { code: Code::ParseError, span: t.span, message: format!("{msg}, found {}", describe(&t.kind)) }
    }

    fn unsupported(&self, span: Span, what: &str) -> ParseError {
        ParseError { code: Code::UnsupportedSyntax, span, message: format!("unsupported syntax: {what}") }
    }

    fn expect(&mut self, p: Punct) -> PResult<Span> {
        if self.is(p) {
            Ok(self.bump().span)
        } else {
            Err(self.err_here(&format!("expected `{}`", p.as_str())))
        }
    }

    fn ident(&mut self) -> PResult<(String, Span)> {
        match &self.peek().kind {
            TokenKind::Ident(s) => {
                let s = s.clone();
                Ok((s, self.bump().span))
            }
            _ => Err(self.err_here("expected identifier")),
        }
    }

    /// Identifier or keyword used as a name (property and member names).
    fn name(&mut self) -> PResult<(String, Span)> {
        match &self.peek().kind {
            TokenKind::Ident(s) => {
                let s = s.clone();
                Ok((s, self.bump().span))
            }
            TokenKind::Keyword(k) => {
                let s = k.as_str().to_string();
                Ok((s, self.bump().span))
            }
            _ => Err(self.err_here("expected name")),
        }
    }

    /// Statement terminator: `;`, or an implicit one before `}`, EOF or a new line.
    fn terminator(&mut self) -> PResult<()> {
        if self.eat(Punct::Semi) {
            return Ok(());
        }
        let t = self.peek();
        if t.newline_before || t.is_punct(Punct::RBrace) || t.kind == TokenKind::Eof {
            Ok(())
        } else {
            Err(self.err_here("expected `;` or new line"))
        }
    }

    // ---- items -----------------------------------------------------------

    fn module(&mut self, source: &SourceFile, diags: &mut Vec<Diagnostic>) -> Module {
        let mut items = Vec::new();
        while !self.at_eof() {
            let start = self.pos;
            match self.item() {
                Ok(item) => items.push(item),
                Err(e) => {
                    diags.push(Diagnostic::error(&source.path, e.code, e.span, e.message));
                    self.recover(start);
                }
            }
        }
        let span = Span::new(0, source.text.len() as u32, 1, 1);
        Module { items, span }
    }

    fn starts_declaration(t: &Token) -> bool {
        use Keyword::*;
        match &t.kind {
            TokenKind::Keyword(k) => matches!(
                k,
                Class | Struct | Interface | Function | Namespace | Let | Const | Var | Import | Export | Declare | Abstract
            ),
            TokenKind::Punct(Punct::At) => true,
            _ => false,
        }
    }

    /// Skips to the next line that begins a declaration at brace depth zero
    /// (or at column one, which tolerates unbalanced braces).
    fn recover(&mut self, start: usize) {
        self.pos = start;
        self.bump();
        let mut depth: i64 = 0;
        // Account for braces opened by the abandoned declaration.
        for t in &self.tokens[start..self.pos] {
            match t.kind {
                TokenKind::Punct(Punct::LBrace) => depth += 1,
                TokenKind::Punct(Punct::RBrace) => depth -= 1,
                _ => {}
            }
        }
        while !self.at_eof() {
            let t = self.peek();
            if t.newline_before && Self::starts_declaration(t) && (depth <= 0 || t.span.col == 1) {
                return;
            }
            match t.kind {
                TokenKind::Punct(Punct::LBrace) => depth += 1,
                TokenKind::Punct(Punct::RBrace) => depth -= 1,
                _ => {}
            }
            self.bump();
        }
    }

    fn decorators(&mut self) -> PResult<Vec<Decorator>> {
        let mut out = Vec::new();
        while self.is(Punct::At) {
            let at = self.bump().span;
            let (name, _) = self.ident()?;
            let mut args = Vec::new();
            if self.is(Punct::LParen) && !self.peek().newline_before {
                args = self.call_args()?;
            }
            out.push(Decorator { name, args, span: at.to(self.prev_span()) });
        }
        Ok(out)
    }

    fn item(&mut self) -> PResult<Item> {
        let start = self.peek().span;
        let decorators = self.decorators()?;
        let mut modifiers = Modifiers::default();
        loop {
            if self.eat_kw(Keyword::Export) {
                modifiers.is_export = true;
                if let TokenKind::Ident(s) = &self.peek().kind {
                    if s == "default" {
                        self.bump();
                    }
                }
            } else if self.eat_kw(Keyword::Declare) {
                modifiers.is_declare = true;
            } else if self.eat_kw(Keyword::Abstract) {
                modifiers.is_abstract = true;
            } else {
                break;
            }
        }
        let t = self.peek().clone();
        let item = match &t.kind {
            TokenKind::Keyword(Keyword::Class) | TokenKind::Keyword(Keyword::Struct) | TokenKind::Keyword(Keyword::Interface) => {
                Item::Class(self.class_decl(decorators, modifiers, start)?)
            }
            TokenKind::Keyword(Keyword::Function) => {
                self.bump();
                Item::Function(self.function_rest(decorators, modifiers, start, false)?)
            }
            TokenKind::Keyword(Keyword::Namespace) => {
                self.bump();
                let (name, _) = self.ident()?;
                self.expect(Punct::LBrace)?;
                let mut items = Vec::new();
                while !self.is(Punct::RBrace) {
                    if self.at_eof() {
                        return Err(self.err_here("expected `}`"));
                    }
                    items.push(self.item()?);
                }
                self.bump();
                Item::Namespace(NamespaceDecl { decorators, modifiers, name, items, span: start.to(self.prev_span()) })
            }
            TokenKind::Keyword(Keyword::Let) | TokenKind::Keyword(Keyword::Const) | TokenKind::Keyword(Keyword::Var) => {
                let mut v = self.var_decl()?;
                self.terminator()?;
                v.decorators = decorators;
                v.modifiers = modifiers;
                v.span = start.to(v.span);
                Item::Var(v)
            }
            TokenKind::Keyword(Keyword::Import) => Item::Import(self.import_decl()?),
            TokenKind::Keyword(k @ (Keyword::Enum | Keyword::Type | Keyword::Async)) => {
                return Err(self.unsupported(t.span, &format!("`{}` declarations", k.as_str())))
            }
            _ => {
                if !decorators.is_empty() || modifiers != Modifiers::default() {
                    return Err(self.err_here("expected declaration after decorators or modifiers"));
                }
                Item::Stmt(self.stmt()?)
            }
        };
        Ok(item)
    }

    fn import_decl(&mut self) -> PResult<ImportDecl> {
        let start = self.bump().span;
        let mut names = Vec::new();
        if self.eat(Punct::LBrace) {
            while !self.eat(Punct::RBrace) {
                let (n, _) = self.name()?;
                if let TokenKind::Ident(s) = &self.peek().kind {
                    if s == "as" {
                        self.bump();
                        let (alias, _) = self.ident()?;
                        names.push(alias);
                    } else {
                        names.push(n);
                    }
                } else {
                    names.push(n);
                }
                if !self.eat(Punct::Comma) && !self.is(Punct::RBrace) {
                    return Err(self.err_here("expected `,` or `}`"));
                }
            }
        } else if self.is(Punct::Star) {
            return Err(self.unsupported(self.peek().span, "namespace imports"));
        } else {
            names.push(self.ident()?.0);
        }
        match &self.peek().kind {
            TokenKind::Ident(s) if s == "from" => {
                self.bump();
            }
            _ => return Err(self.err_here("expected `from`")),
        }
        let from = match self.bump().kind {
            TokenKind::Str(s) => s,
            _ => return Err(self.err_here("expected module path string")),
        };
        self.terminator()?;
        Ok(ImportDecl { names, from, span: start.to(self.prev_span()) })
    }

    fn class_decl(&mut self, decorators: Vec<Decorator>, modifiers: Modifiers, start: Span) -> PResult<ClassDecl> {
        let kind = match self.bump().kind {
            TokenKind::Keyword(Keyword::Class) => ClassKind::Class,
            TokenKind::Keyword(Keyword::Struct) => ClassKind::Struct,
            _ => ClassKind::Interface,
        };
        let (name, _) = self.ident()?;
        if self.is(Punct::Lt) {
            return Err(self.unsupported(self.peek().span, "generic class declarations"));
        }
        let mut extends = None;
        let mut implements = Vec::new();
        if self.eat_kw(Keyword::Extends) {
            if kind == ClassKind::Interface {
                // interfaces may extend several interfaces
                implements.push(self.type_anno()?);
                while self.eat(Punct::Comma) {
                    implements.push(self.type_anno()?);
                }
            } else {
                extends = Some(self.type_anno()?);
            }
        }
        if self.eat_kw(Keyword::Implements) {
            implements.push(self.type_anno()?);
            while self.eat(Punct::Comma) {
                implements.push(self.type_anno()?);
            }
        }
        self.expect(Punct::LBrace)?;
        let mut members = Vec::new();
        while !self.eat(Punct::RBrace) {
            if self.at_eof() {
                return Err(self.err_here("expected `}`"));
            }
            if self.eat(Punct::Semi) {
                continue;
            }
            members.push(self.member(kind)?);
        }
        Ok(ClassDecl { decorators, modifiers, kind, name, extends, implements, members, span: start.to(self.prev_span()) })
    }

    fn member(&mut self, owner: ClassKind) -> PResult<Member> {
        let start = self.peek().span;
        let decorators = self.decorators()?;
        let mut modifiers = Modifiers::default();
        loop {
            // A modifier keyword directly followed by `(`, `:` or `=` is a member name.
            let next = self.peek_at(1);
            if next.is_punct(Punct::LParen) || next.is_punct(Punct::Colon) || next.is_punct(Punct::Assign) {
                break;
            }
            match self.peek().kind {
                TokenKind::Keyword(Keyword::Static) => modifiers.is_static = true,
                TokenKind::Keyword(Keyword::Abstract) => modifiers.is_abstract = true,
                TokenKind::Keyword(Keyword::Readonly) => modifiers.is_readonly = true,
                TokenKind::Keyword(Keyword::Declare) => modifiers.is_declare = true,
                TokenKind::Keyword(Keyword::Private | Keyword::Public | Keyword::Protected) => {}
                TokenKind::Keyword(Keyword::Async) => return Err(self.unsupported(self.peek().span, "async methods")),
                TokenKind::Ident(ref s) if (s == "get" || s == "set") && matches!(next.kind, TokenKind::Ident(_)) => {
                    return Err(self.unsupported(self.peek().span, "accessors"))
                }
                _ => break,
            }
            self.bump();
        }
        let (name, _) = self.name()?;
        if self.is(Punct::LParen) || self.is(Punct::Lt) {
            if self.is(Punct::Lt) {
                return Err(self.unsupported(self.peek().span, "generic methods"));
            }
            let build_ui = owner == ClassKind::Struct && name == "build";
            if build_ui {
                self.ui_depth += 1;
            }
            let f = self.function_tail(decorators, modifiers, name, start);
            if build_ui {
                self.ui_depth -= 1;
            }
            return Ok(Member::Method(f?));
        }
        let optional = self.eat(Punct::Question) || {
            // `name!: T` definite assignment
            self.eat(Punct::Bang)
        };
        let ty = if self.eat(Punct::Colon) { Some(self.type_anno()?) } else { None };
        let init = if self.eat(Punct::Assign) { Some(self.expr()?) } else { None };
        self.terminator()?;
        Ok(Member::Field(FieldDecl { decorators, modifiers, name, optional, ty, init, span: start.to(self.prev_span()) }))
    }

    /// After the `function` keyword.
    fn function_rest(&mut self, decorators: Vec<Decorator>, modifiers: Modifiers, start: Span, _expr: bool) -> PResult<FunctionDecl> {
        if self.is(Punct::Star) {
            return Err(self.unsupported(self.peek().span, "generator functions"));
        }
        let (name, _) = self.ident()?;
        if self.is(Punct::Lt) {
            return Err(self.unsupported(self.peek().span, "generic functions"));
        }
        self.function_tail(decorators, modifiers, name, start)
    }

    /// Parameters, optional return type, and a body or a terminator.
    fn function_tail(&mut self, decorators: Vec<Decorator>, modifiers: Modifiers, name: String, start: Span) -> PResult<FunctionDecl> {
        let params = self.params()?;
        let ret = if self.eat(Punct::Colon) { Some(self.type_anno()?) } else { None };
        let body = if self.is(Punct::LBrace) {
            Some(self.block()?)
        } else {
            self.terminator()?;
            None
        };
        Ok(FunctionDecl { decorators, modifiers, name, params, ret, body, span: start.to(self.prev_span()) })
    }

    fn params(&mut self) -> PResult<Vec<Param>> {
        self.expect(Punct::LParen)?;
        let mut params = Vec::new();
        while !self.eat(Punct::RParen) {
            let start = self.peek().span;
            let rest = self.eat(Punct::Ellipsis);
            let (name, _) = self.ident()?;
            let optional = self.eat(Punct::Question);
            let ty = if self.eat(Punct::Colon) { Some(self.type_anno()?) } else { None };
            if self.is(Punct::Assign) {
                return Err(self.unsupported(self.peek().span, "default parameter values"));
            }
            params.push(Param { name, ty, rest, optional, span: start.to(self.prev_span()) });
            if !self.eat(Punct::Comma) && !self.is(Punct::RParen) {
                return Err(self.err_here("expected `,` or `)`"));
            }
        }
        Ok(params)
    }

    // ---- types -----------------------------------------------------------

    fn type_anno(&mut self) -> PResult<TypeAnno> {
        let first = self.type_postfix()?;
        if !self.is(Punct::Pipe) {
            return Ok(first);
        }
        let mut parts = vec![first];
        while self.eat(Punct::Pipe) {
            parts.push(self.type_postfix()?);
        }
        let span = parts[0].span.to(self.prev_span());
        Ok(TypeAnno { kind: TypeKind::Union(parts), span })
    }

    fn type_postfix(&mut self) -> PResult<TypeAnno> {
        let mut t = self.type_primary()?;
        while self.is(Punct::LBracket) && self.peek_at(1).is_punct(Punct::RBracket) && !self.peek().newline_before {
            self.bump();
            self.bump();
            let span = t.span.to(self.prev_span());
            t = TypeAnno { kind: TypeKind::Array(Box::new(t)), span };
        }
        Ok(t)
    }

    fn type_primary(&mut self) -> PResult<TypeAnno> {
        let start = self.peek().span;
        match self.peek().kind.clone() {
            TokenKind::Ident(mut name) => {
                self.bump();
                while self.is(Punct::Dot) {
                    self.bump();
                    name.push('.');
                    name.push_str(&self.ident()?.0);
                }
                let mut args = Vec::new();
                if self.is(Punct::Lt) && !self.peek().newline_before {
                    self.bump();
                    loop {
                        args.push(self.type_anno()?);
                        if !self.eat(Punct::Comma) {
                            break;
                        }
                    }
                    self.close_angle()?;
                }
                Ok(TypeAnno { kind: TypeKind::Named(name, args), span: start.to(self.prev_span()) })
            }
            TokenKind::Keyword(k @ (Keyword::Void | Keyword::Null | Keyword::Undefined | Keyword::This)) => {
                self.bump();
                Ok(TypeAnno { kind: TypeKind::Named(k.as_str().to_string(), vec![]), span: start })
            }
            TokenKind::Punct(Punct::LParen) => {
                let params = self.params()?;
                self.expect(Punct::Arrow)?;
                let ret = self.type_anno()?;
                let tys = params
                    .into_iter()
                    .map(|p| p.ty.unwrap_or(TypeAnno { kind: TypeKind::Named("any".into(), vec![]), span: p.span }))
                    .collect();
                Ok(TypeAnno { kind: TypeKind::Function(tys, Box::new(ret)), span: start.to(self.prev_span()) })
            }
            TokenKind::Punct(Punct::LBrace) => Err(self.unsupported(start, "object type literals")),
            TokenKind::Str(_) | TokenKind::Number(_) => Err(self.unsupported(start, "literal types")),
            _ => Err(self.err_here("expected type")),
        }
    }

    /// Closes a type-argument list, splitting `>>` / `>>>` tokens.
    fn close_angle(&mut self) -> PResult<()> {
        let t = self.peek().clone();
        let rest = match t.kind {
            TokenKind::Punct(Punct::Gt) => {
                self.bump();
                return Ok(());
            }
            TokenKind::Punct(Punct::Shr) => Punct::Gt,
            TokenKind::Punct(Punct::UShr) => Punct::Shr,
            TokenKind::Punct(Punct::GtEq) => Punct::Assign,
            TokenKind::Punct(Punct::ShrAssign) => Punct::GtEq,
            TokenKind::Punct(Punct::UShrAssign) => Punct::ShrAssign,
            _ => return Err(self.err_here("expected `>`")),
        };
        let span = Span::new(t.span.lo + 1, t.span.hi, t.span.line, t.span.col + 1);
        self.tokens[self.pos] = Token { kind: TokenKind::Punct(rest), span, newline_before: false };
        Ok(())
    }

    // ---- statements ------------------------------------------------------

    fn block(&mut self) -> PResult<Block> {
        let start = self.expect(Punct::LBrace)?;
        let mut stmts = Vec::new();
        while !self.is(Punct::RBrace) {
            if self.at_eof() {
                return Err(self.err_here("expected `}`"));
            }
            stmts.push(self.stmt()?);
        }
        self.bump();
        Ok(Block { stmts, span: start.to(self.prev_span()) })
    }

    fn var_decl(&mut self) -> PResult<VarDecl> {
        let t = self.bump();
        let kind = match t.kind {
            TokenKind::Keyword(Keyword::Let) => VarKind::Let,
            TokenKind::Keyword(Keyword::Const) => VarKind::Const,
            _ => VarKind::Var,
        };
        if self.is(Punct::LBrace) || self.is(Punct::LBracket) {
            return Err(self.unsupported(self.peek().span, "destructuring declarations"));
        }
        let (name, _) = self.ident()?;
        let ty = if self.eat(Punct::Colon) { Some(self.type_anno()?) } else { None };
        let init = if self.eat(Punct::Assign) { Some(self.expr()?) } else { None };
        if self.is(Punct::Comma) {
            return Err(self.unsupported(self.peek().span, "multiple declarators"));
        }
        Ok(VarDecl { decorators: vec![], modifiers: Modifiers::default(), kind, name, ty, init, span: t.span.to(self.prev_span()) })
    }

    fn is_component_start(&self) -> bool {
        let TokenKind::Ident(name) = &self.peek().kind else { return false };
        if !self.peek_at(1).is_punct(Punct::LParen) || self.peek_at(1).newline_before {
            return false;
        }
        if self.ui_depth > 0 && name.chars().next().is_some_and(|c| c.is_ascii_uppercase()) {
            return true;
        }
        // Outside UI code only the `Name(...) {` form is a component.
        let mut depth = 0usize;
        let mut i = self.pos + 1;
        while i < self.tokens.len() {
            match self.tokens[i].kind {
                TokenKind::Punct(Punct::LParen) => depth += 1,
                TokenKind::Punct(Punct::RParen) => {
                    depth -= 1;
                    if depth == 0 {
                        let next = &self.tokens[(i + 1).min(self.tokens.len() - 1)];
                        return next.is_punct(Punct::LBrace) && !next.newline_before;
                    }
                }
                TokenKind::Eof => return false,
                _ => {}
            }
            i += 1;
        }
        false
    }

    fn component(&mut self) -> PResult<ComponentBlock> {
        let (name, start) = self.ident()?;
        let args = self.call_args()?;
        let children = if self.is(Punct::LBrace) && !self.peek().newline_before {
            self.ui_depth += 1;
            let b = self.block();
            self.ui_depth -= 1;
            Some(b?)
        } else {
            None
        };
        let mut chain = Vec::new();
        while self.is(Punct::Dot) {
            let dot = self.bump().span;
            let (cname, _) = self.name()?;
            if !self.is(Punct::LParen) {
                return Err(self.err_here("expected `(` after component attribute name"));
            }
            let args = self.call_args()?;
            chain.push(ChainCall { name: cname, args, span: dot.to(self.prev_span()) });
        }
        let span = start.to(self.prev_span());
        self.terminator()?;
        Ok(ComponentBlock { name, args, children, chain, span })
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        let start = self.peek().span;
        let t = self.peek().clone();
        let kind = match &t.kind {
            TokenKind::Punct(Punct::LBrace) => StmtKind::Block(self.block()?),
            TokenKind::Punct(Punct::Semi) => {
                self.bump();
                StmtKind::Empty
            }
            TokenKind::Keyword(Keyword::Let | Keyword::Const | Keyword::Var) => {
                let v = self.var_decl()?;
                self.terminator()?;
                StmtKind::Var(v)
            }
            TokenKind::Keyword(Keyword::If) => {
                self.bump();
                self.expect(Punct::LParen)?;
                let cond = self.expr()?;
                self.expect(Punct::RParen)?;
                let then = Box::new(self.stmt()?);
                let otherwise = if self.eat_kw(Keyword::Else) { Some(Box::new(self.stmt()?)) } else { None };
                StmtKind::If { cond, then, otherwise }
            }
            TokenKind::Keyword(Keyword::While) => {
                self.bump();
                self.expect(Punct::LParen)?;
                let cond = self.expr()?;
                self.expect(Punct::RParen)?;
                let body = Box::new(self.stmt()?);
                StmtKind::While { cond, body }
            }
            TokenKind::Keyword(Keyword::For) => {
                self.bump();
                self.expect(Punct::LParen)?;
                let init = if self.is(Punct::Semi) {
                    None
                } else if self.is_kw(Keyword::Let) || self.is_kw(Keyword::Const) || self.is_kw(Keyword::Var) {
                    let s = self.peek().span;
                    let v = self.var_decl()?;
                    if let TokenKind::Ident(w) = &self.peek().kind {
                        if w == "of" {
                            return Err(self.unsupported(self.peek().span, "for-of loops"));
                        }
                    }
                    if self.is_kw(Keyword::In) {
                        return Err(self.unsupported(self.peek().span, "for-in loops"));
                    }
                    Some(Box::new(Stmt { kind: StmtKind::Var(v), span: s.to(self.prev_span()) }))
                } else {
                    let e = self.expr()?;
                    Some(Box::new(Stmt { span: e.span, kind: StmtKind::Expr(e) }))
                };
                self.expect(Punct::Semi)?;
                let cond = if self.is(Punct::Semi) { None } else { Some(self.expr()?) };
                self.expect(Punct::Semi)?;
                let update = if self.is(Punct::RParen) { None } else { Some(self.expr()?) };
                self.expect(Punct::RParen)?;
                let body = Box::new(self.stmt()?);
                StmtKind::For { init, cond, update, body }
            }
            TokenKind::Keyword(Keyword::Return) => {
                self.bump();
                let t = self.peek();
                let value = if t.is_punct(Punct::Semi) || t.is_punct(Punct::RBrace) || t.newline_before || t.kind == TokenKind::Eof {
                    None
                } else {
                    Some(self.expr()?)
                };
                self.terminator()?;
                StmtKind::Return(value)
            }
            TokenKind::Keyword(Keyword::Break) => {
                self.bump();
                self.terminator()?;
                StmtKind::Break
            }
            TokenKind::Keyword(Keyword::Continue) => {
                self.bump();
                self.terminator()?;
                StmtKind::Continue
            }
            TokenKind::Keyword(k @ (Keyword::Switch | Keyword::Try | Keyword::Do | Keyword::Enum | Keyword::Type)) => {
                return Err(self.unsupported(t.span, &format!("`{}` statements", k.as_str())))
            }
            TokenKind::Keyword(Keyword::Class | Keyword::Struct | Keyword::Interface | Keyword::Function) => {
                return Err(self.unsupported(t.span, "nested declarations"))
            }
            _ if self.is_component_start() => StmtKind::Component(self.component()?),
            _ => {
                let e = self.expr()?;
                self.terminator()?;
                StmtKind::Expr(e)
            }
        };
        Ok(Stmt { kind, span: start.to(self.prev_span()) })
    }

    // ---- expressions -----------------------------------------------------

    pub(crate) fn expr(&mut self) -> PResult<Expr> {
        self.assignment()
    }

    fn assignment(&mut self) -> PResult<Expr> {
        if let Some(arrow) = self.try_arrow()? {
            return Ok(arrow);
        }
        let target = self.conditional()?;
        let op = match self.peek().kind {
            TokenKind::Punct(Punct::Assign) => None,
            TokenKind::Punct(Punct::PlusAssign) => Some(BinaryOp::Add),
            TokenKind::Punct(Punct::MinusAssign) => Some(BinaryOp::Sub),
            TokenKind::Punct(Punct::StarAssign) => Some(BinaryOp::Mul),
            TokenKind::Punct(Punct::SlashAssign) => Some(BinaryOp::Div),
            TokenKind::Punct(Punct::PercentAssign) => Some(BinaryOp::Rem),
            TokenKind::Punct(Punct::AmpAssign) => Some(BinaryOp::BitAnd),
            TokenKind::Punct(Punct::PipeAssign) => Some(BinaryOp::BitOr),
            TokenKind::Punct(Punct::CaretAssign) => Some(BinaryOp::BitXor),
            TokenKind::Punct(Punct::ShlAssign) => Some(BinaryOp::Shl),
            TokenKind::Punct(Punct::ShrAssign) => Some(BinaryOp::Shr),
            TokenKind::Punct(Punct::UShrAssign) => Some(BinaryOp::UShr),
            _ => return Ok(target),
        };
        if !matches!(target.kind, ExprKind::Ident(_) | ExprKind::Member { .. } | ExprKind::Index { .. }) {
            return Err(ParseError { code: Code::ParseError, span: target.span, message: "invalid assignment target".into() });
        }
        self.bump();
        let value = self.assignment()?;
        let span = target.span.to(value.span);
        Ok(Expr { kind: ExprKind::Assign { op, target: Box::new(target), value: Box::new(value) }, span })
    }

    /// Arrow functions: `x => ...` or `(params) [: T] => ...`.
    fn try_arrow(&mut self) -> PResult<Option<Expr>> {
        let start = self.peek().span;
        let save = self.pos;
        let params = match &self.peek().kind {
            TokenKind::Ident(name) if self.peek_at(1).is_punct(Punct::Arrow) => {
                let p = Param { name: name.clone(), ty: None, rest: false, optional: false, span: start };
                self.bump();
                vec![p]
            }
            TokenKind::Punct(Punct::LParen) => match self.params() {
                Ok(ps) => {
                    if self.is(Punct::Colon) {
                        self.bump();
                        if self.type_anno().is_err() {
                            self.pos = save;
                            return Ok(None);
                        }
                    }
                    if !self.is(Punct::Arrow) {
                        self.pos = save;
                        return Ok(None);
                    }
                    ps
                }
                Err(_) => {
                    self.pos = save;
                    return Ok(None);
                }
            },
            _ => return Ok(None),
        };
        self.expect(Punct::Arrow)?;
        let body = if self.is(Punct::LBrace) {
            ArrowBody::Block(self.block()?)
        } else {
            ArrowBody::Expr(Box::new(self.assignment()?))
        };
        Ok(Some(Expr { kind: ExprKind::Arrow { params, body }, span: start.to(self.prev_span()) }))
    }

    fn conditional(&mut self) -> PResult<Expr> {
        let cond = self.logical_or()?;
        if !self.is(Punct::Question) {
            return Ok(cond);
        }
        self.bump();
        let a = self.assignment()?;
        self.expect(Punct::Colon)?;
        let b = self.assignment()?;
        let span = cond.span.to(b.span);
        Ok(Expr { kind: ExprKind::Conditional(Box::new(cond), Box::new(a), Box::new(b)), span })
    }

    fn logical_or(&mut self) -> PResult<Expr> {
        let mut lhs = self.logical_and()?;
        while self.is(Punct::OrOr) {
            self.bump();
            let rhs = self.logical_and()?;
            let span = lhs.span.to(rhs.span);
            lhs = Expr { kind: ExprKind::Logical(LogicalOp::Or, Box::new(lhs), Box::new(rhs)), span };
        }
        if self.is(Punct::QuestionQuestion) {
            return Err(self.unsupported(self.peek().span, "nullish coalescing"));
        }
        Ok(lhs)
    }

    fn logical_and(&mut self) -> PResult<Expr> {
        let mut lhs = self.binary(0)?;
        while self.is(Punct::AndAnd) {
            self.bump();
            let rhs = self.binary(0)?;
            let span = lhs.span.to(rhs.span);
            lhs = Expr { kind: ExprKind::Logical(LogicalOp::And, Box::new(lhs), Box::new(rhs)), span };
        }
        Ok(lhs)
    }

    fn binary_op(&self) -> Option<(BinaryOp, u8)> {
        use BinaryOp::*;
        let op = match &self.peek().kind {
            TokenKind::Punct(p) => match p {
                Punct::Pipe => (BitOr, 0),
                Punct::Caret => (BitXor, 1),
                Punct::Amp => (BitAnd, 2),
                Punct::EqEq => (Eq, 3),
                Punct::NotEq => (NotEq, 3),
                Punct::EqEqEq => (StrictEq, 3),
                Punct::NotEqEq => (StrictNotEq, 3),
                Punct::Lt => (Lt, 4),
                Punct::LtEq => (LtEq, 4),
                Punct::Gt => (Gt, 4),
                Punct::GtEq => (GtEq, 4),
                Punct::Shl => (Shl, 5),
                Punct::Shr => (Shr, 5),
                Punct::UShr => (UShr, 5),
                Punct::Plus => (Add, 6),
                Punct::Minus => (Sub, 6),
                Punct::Star => (Mul, 7),
                Punct::Slash => (Div, 7),
                Punct::Percent => (Rem, 7),
                _ => return None,
            },
            TokenKind::Keyword(Keyword::Instanceof) => (InstanceOf, 4),
            TokenKind::Keyword(Keyword::In) => (In, 4),
            _ => return None,
        };
        Some(op)
    }

    /// Precedence climbing over the left-associative binary operators.
    fn binary(&mut self, min_prec: u8) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while let Some((op, prec)) = self.binary_op() {
            if prec < min_prec {
                break;
            }
            self.bump();
            let rhs = self.binary(prec + 1)?;
            let span = lhs.span.to(rhs.span);
            lhs = Expr { kind: ExprKind::Binary(op, Box::new(lhs), Box::new(rhs)), span };
        }
        if let TokenKind::Ident(s) = &self.peek().kind {
            if s == "as" && !self.peek().newline_before {
                return Err(self.unsupported(self.peek().span, "type assertions"));
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let start = self.peek().span;
        let op = match self.peek().kind {
            TokenKind::Punct(Punct::Bang) => Some(UnaryOp::Not),
            TokenKind::Punct(Punct::Minus) => Some(UnaryOp::Neg),
            TokenKind::Punct(Punct::Plus) => Some(UnaryOp::Plus),
            TokenKind::Punct(Punct::Tilde) => Some(UnaryOp::BitNot),
            TokenKind::Keyword(Keyword::Typeof) => Some(UnaryOp::TypeOf),
            TokenKind::Punct(Punct::PlusPlus) | TokenKind::Punct(Punct::MinusMinus) => {
                let increment = self.bump().is_punct(Punct::PlusPlus);
                let target = self.unary()?;
                check_update_target(&target)?;
                let span = start.to(target.span);
                return Ok(Expr { kind: ExprKind::Update { increment, prefix: true, target: Box::new(target) }, span });
            }
            TokenKind::Keyword(Keyword::Await) => return Err(self.unsupported(start, "await expressions")),
            TokenKind::Keyword(Keyword::Void) => return Err(self.unsupported(start, "void expressions")),
            _ => None,
        };
        if let Some(op) = op {
            self.bump();
            let operand = self.unary()?;
            let span = start.to(operand.span);
            return Ok(Expr { kind: ExprKind::Unary(op, Box::new(operand)), span });
        }
        let e = self.postfix()?;
        let t = self.peek();
        if !t.newline_before && (t.is_punct(Punct::PlusPlus) || t.is_punct(Punct::MinusMinus)) {
            let increment = t.is_punct(Punct::PlusPlus);
            check_update_target(&e)?;
            self.bump();
            let span = e.span.to(self.prev_span());
            return Ok(Expr { kind: ExprKind::Update { increment, prefix: false, target: Box::new(e) }, span });
        }
        Ok(e)
    }

    fn call_args(&mut self) -> PResult<Vec<Expr>> {
        self.expect(Punct::LParen)?;
        let mut args = Vec::new();
        while !self.eat(Punct::RParen) {
            if self.is(Punct::Ellipsis) {
                return Err(self.unsupported(self.peek().span, "spread arguments"));
            }
            args.push(self.expr()?);
            if !self.eat(Punct::Comma) && !self.is(Punct::RParen) {
                return Err(self.err_here("expected `,` or `)`"));
            }
        }
        Ok(args)
    }

    fn postfix(&mut self) -> PResult<Expr> {
        let mut e = self.primary()?;
        loop {
            let t = self.peek();
            if t.is_punct(Punct::Dot) {
                self.bump();
                let (property, _) = self.name()?;
                let span = e.span.to(self.prev_span());
                e = Expr { kind: ExprKind::Member { object: Box::new(e), property }, span };
            } else if t.is_punct(Punct::LParen) && !t.newline_before {
                let args = self.call_args()?;
                let span = e.span.to(self.prev_span());
                e = Expr { kind: ExprKind::Call { callee: Box::new(e), args }, span };
            } else if t.is_punct(Punct::LBracket) && !t.newline_before {
                self.bump();
                let index = self.expr()?;
                self.expect(Punct::RBracket)?;
                let span = e.span.to(self.prev_span());
                e = Expr { kind: ExprKind::Index { object: Box::new(e), index: Box::new(index) }, span };
            } else if t.is_punct(Punct::QuestionDot) {
                return Err(self.unsupported(t.span, "optional chaining"));
            } else if t.is_punct(Punct::Bang) && !t.newline_before && !self.peek_at(1).is_punct(Punct::Assign) {
                // non-null assertion `x!` is a type-level no-op
                let next = self.peek_at(1);
                if next.is_punct(Punct::Dot) || next.is_punct(Punct::RParen) || next.is_punct(Punct::Semi) || next.newline_before {
                    self.bump();
                } else {
                    break;
                }
            } else {
                break;
            }
        }
        Ok(e)
    }

    fn primary(&mut self) -> PResult<Expr> {
        let t = self.peek().clone();
        let span = t.span;
        let kind = match t.kind {
            TokenKind::Ident(name) => {
                self.bump();
                ExprKind::Ident(name)
            }
            TokenKind::Number(n) => {
                self.bump();
                ExprKind::Number(n)
            }
            TokenKind::Str(s) => {
                self.bump();
                ExprKind::Str(s)
            }
            TokenKind::Template(parts) => {
                self.bump();
                let mut segs = Vec::new();
                for part in parts {
                    match part {
                        TemplatePart::Str(s) => segs.push(TemplateSegment::Str(s)),
                        TemplatePart::Hole(toks, hspan) => segs.push(TemplateSegment::Expr(parse_tokens_as_expr(toks, hspan)?)),
                    }
                }
                ExprKind::Template(segs)
            }
            TokenKind::Keyword(Keyword::True) => {
                self.bump();
                ExprKind::Bool(true)
            }
            TokenKind::Keyword(Keyword::False) => {
                self.bump();
                ExprKind::Bool(false)
            }
            TokenKind::Keyword(Keyword::Null) => {
                self.bump();
                ExprKind::Null
            }
            TokenKind::Keyword(Keyword::Undefined) => {
                self.bump();
                ExprKind::Undefined
            }
            TokenKind::Keyword(Keyword::This) => {
                self.bump();
                ExprKind::This
            }
            TokenKind::Keyword(Keyword::Super) => {
                self.bump();
                ExprKind::Super
            }
            TokenKind::Keyword(Keyword::New) => {
                self.bump();
                let (mut class, _) = self.ident()?;
                while self.is(Punct::Dot) {
                    self.bump();
                    class.push('.');
                    class.push_str(&self.ident()?.0);
                }
                if self.is(Punct::Lt) {
                    // type arguments carry no runtime meaning
                    self.bump();
                    loop {
                        self.type_anno()?;
                        if !self.eat(Punct::Comma) {
                            break;
                        }
                    }
                    self.close_angle()?;
                }
                let args = if self.is(Punct::LParen) && !self.peek().newline_before { self.call_args()? } else { Vec::new() };
                ExprKind::New { class, args }
            }
            TokenKind::Keyword(Keyword::Function) => {
                self.bump();
                let name = match &self.peek().kind {
                    TokenKind::Ident(n) => {
                        let n = n.clone();
                        self.bump();
                        Some(n)
                    }
                    _ => None,
                };
                let params = self.params()?;
                let ret = if self.eat(Punct::Colon) { Some(self.type_anno()?) } else { None };
                let body = self.block()?;
                ExprKind::Function { name, params, ret, body }
            }
            TokenKind::Punct(Punct::LParen) => {
                self.bump();
                let mut inner = self.expr()?;
                self.expect(Punct::RParen)?;
                inner.span = span.to(self.prev_span());
                return Ok(inner);
            }
            TokenKind::Punct(Punct::LBracket) => {
                self.bump();
                let mut elems = Vec::new();
                while !self.eat(Punct::RBracket) {
                    if self.is(Punct::Ellipsis) {
                        return Err(self.unsupported(self.peek().span, "spread elements"));
                    }
                    elems.push(self.expr()?);
                    if !self.eat(Punct::Comma) && !self.is(Punct::RBracket) {
                        return Err(self.err_here("expected `,` or `]`"));
                    }
                }
                ExprKind::Array(elems)
            }
            TokenKind::Punct(Punct::LBrace) => {
                self.bump();
                let mut props = Vec::new();
                while !self.eat(Punct::RBrace) {
                    let key = match self.peek().kind.clone() {
                        TokenKind::Str(s) => {
                            self.bump();
                            s
                        }
                        TokenKind::Punct(Punct::Ellipsis) => return Err(self.unsupported(self.peek().span, "object spread")),
                        TokenKind::Punct(Punct::LBracket) => return Err(self.unsupported(self.peek().span, "computed keys")),
                        _ => self.name()?.0,
                    };
                    let kspan = self.prev_span();
                    let value = if self.eat(Punct::Colon) {
                        self.expr()?
                    } else if self.is(Punct::LParen) {
                        return Err(self.unsupported(self.peek().span, "object literal methods"));
                    } else {
                        Expr { kind: ExprKind::Ident(key.clone()), span: kspan }
                    };
                    props.push((key, value));
                    if !self.eat(Punct::Comma) && !self.is(Punct::RBrace) {
                        return Err(self.err_here("expected `,` or `}`"));
                    }
                }
                ExprKind::Object(props)
            }
            TokenKind::Keyword(Keyword::Class) => return Err(self.unsupported(span, "class expressions")),
            TokenKind::Keyword(Keyword::Async) => return Err(self.unsupported(span, "async functions")),
            TokenKind::Punct(Punct::Slash) | TokenKind::Punct(Punct::SlashAssign) => {
                return Err(self.unsupported(span, "regular expression literals"))
            }
            _ => return Err(self.err_here("expected expression")),
        };
        Ok(Expr { kind, span: span.to(self.prev_span()) })
    }
}

fn check_update_target(e: &Expr) -> PResult<()> {
    if matches!(e.kind, ExprKind::Ident(_) | ExprKind::Member { .. } | ExprKind::Index { .. }) {
        Ok(())
    } else {
        Err(ParseError { code: Code::ParseError, span: e.span, message: "invalid increment/decrement target".into() })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_ok(src: &str) -> Module {
        let (m, diags) = parse(&SourceFile::new("t.ets", src));
        assert!(diags.is_empty(), "unexpected diagnostics: {diags:?}");
        m
    }

    const HELLO_UI: &str = r#"@Entry
@Component
struct Index {
  @State message: string = 'Hello World'

  build() {
    Row() {
      Column() {
        Text(this.message)
          .fontSize(50)
          .fontWeight(FontWeight.Bold)
        Divider()
        Button('Click me')
          .onClick(() => {
            this.message = 'Hello ArkTS'
          })
          .width('50%')
      }
      .width('100%')
    }
    .height('100%')
  }
}
"#;

    fn component_names(b: &ComponentBlock, out: &mut Vec<String>) {
        out.push(b.name.clone());
        if let Some(children) = &b.children {
            for s in &children.stmts {
                if let StmtKind::Component(c) = &s.kind {
                    component_names(c, out);
                }
            }
        }
    }

    #[test]
    fn arkui_struct_with_decorators_and_components() {
        let m = parse_ok(HELLO_UI);
        assert_eq!(m.items.len(), 1);
        let Item::Class(c) = &m.items[0] else { panic!() };
        assert_eq!(c.kind, ClassKind::Struct);
        assert_eq!(c.name, "Index");
        let decos: Vec<_> = c.decorators.iter().map(|d| d.name.as_str()).collect();
        assert_eq!(decos, ["Entry", "Component"]);
        let Member::Field(f) = &c.members[0] else { panic!() };
        assert_eq!(f.name, "message");
        assert_eq!(f.decorators[0].name, "State");
        let Member::Method(build) = &c.members[1] else { panic!() };
        assert_eq!(build.name, "build");
        let body = build.body.as_ref().unwrap();
        let StmtKind::Component(row) = &body.stmts[0].kind else { panic!() };
        let mut names = Vec::new();
        component_names(row, &mut names);
        assert_eq!(names, ["Row", "Column", "Text", "Divider", "Button"]);
        assert_eq!(row.chain.len(), 1);
        assert_eq!(row.chain[0].name, "height");
        let StmtKind::Component(col) = &row.children.as_ref().unwrap().stmts[0].kind else { panic!() };
        let StmtKind::Component(button) = &col.children.as_ref().unwrap().stmts[2].kind else { panic!() };
        let chain: Vec<_> = button.chain.iter().map(|c| c.name.as_str()).collect();
        assert_eq!(chain, ["onClick", "width"]);
    }

    #[test]
    fn empty_file() {
        let m = parse_ok("");
        assert!(m.items.is_empty());
    }

    #[test]
    fn listing_with_two_functions() {
        let m = parse_ok(
            "function makeAnimalSound(animal: Animal) {\n    animal.sound();\n}\n\nfunction main() {\n    let dog = new Dog();\n    let cat = new Cat();\n    makeAnimalSound(dog);\n}\n",
        );
        let names: Vec<_> = m
            .items
            .iter()
            .map(|i| match i {
                Item::Function(f) => f.name.as_str(),
                _ => panic!("expected function"),
            })
            .collect();
        assert_eq!(names, ["makeAnimalSound", "main"]);
    }

    #[test]
    fn unsupported_syntax_recovers_at_next_declaration() {
        let src = "enum Color { Red }\nfunction ok() { return 1 }\n";
        let (m, diags) = parse(&SourceFile::new("t.ets", src));
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, Code::UnsupportedSyntax);
        assert_eq!(m.items.len(), 1);
        assert!(matches!(&m.items[0], Item::Function(f) if f.name == "ok"));
    }

    #[test]
    fn error_inside_class_skips_whole_class() {
        let src = "class A {\n  f() { let x = switch }\n}\nclass B {}\n";
        let (m, diags) = parse(&SourceFile::new("t.ets", src));
        assert!(!diags.is_empty());
        assert_eq!(m.items.len(), 1);
        assert!(matches!(&m.items[0], Item::Class(c) if c.name == "B"));
    }

    #[test]
    fn asi_and_member_continuation() {
        let m = parse_ok("function f() {\n  let a = b\n    .c()\n  x++\n  return\n}\n");
        let Item::Function(f) = &m.items[0] else { panic!() };
        let stmts = &f.body.as_ref().unwrap().stmts;
        assert_eq!(stmts.len(), 3);
        assert!(matches!(stmts[2].kind, StmtKind::Return(None)));
    }

    #[test]
    fn precedence_and_assignment() {
        let m = parse_ok("x = a.b + c.d * 2 < 3 && y");
        let Item::Stmt(Stmt { kind: StmtKind::Expr(e), .. }) = &m.items[0] else { panic!() };
        let ExprKind::Assign { op: None, value, .. } = &e.kind else { panic!() };
        let ExprKind::Logical(LogicalOp::And, lhs, _) = &value.kind else { panic!() };
        let ExprKind::Binary(BinaryOp::Lt, sum, _) = &lhs.kind else { panic!() };
        assert!(matches!(&sum.kind, ExprKind::Binary(BinaryOp::Add, _, r) if matches!(r.kind, ExprKind::Binary(BinaryOp::Mul, _, _))));
    }

    #[test]
    fn arrow_and_anonymous_functions() {
        let m = parse_ok("fun = (x) => x + 1\nset(function () { go() }, 1)\nlet g = y => { return y }\n");
        assert_eq!(m.items.len(), 3);
    }

    #[test]
    fn spans_nest_within_parents() {
        let m = parse_ok(HELLO_UI);
        fn check(n: &AstNode) {
            for c in &n.children {
                assert!(n.span.contains(&c.span), "{:?} {:?} not within {:?} {:?}", c.kind, c.span, n.kind, n.span);
                check(c);
            }
        }
        check(&m.node_tree());
    }

    #[test]
    fn component_block_outside_build_needs_braces() {
        let m = parse_ok("function f() {\n  Row() {\n    Column() {}.height(100)\n  }\n  Foo(1)\n}\n");
        let Item::Function(f) = &m.items[0] else { panic!() };
        let stmts = &f.body.as_ref().unwrap().stmts;
        let StmtKind::Component(row) = &stmts[0].kind else { panic!("{:?}", stmts[0].kind) };
        let StmtKind::Component(col) = &row.children.as_ref().unwrap().stmts[0].kind else { panic!() };
        assert_eq!(col.chain[0].name, "height");
        assert!(matches!(stmts[1].kind, StmtKind::Expr(_)));
    }

    #[test]
    fn interface_and_stub_declarations() {
        let m = parse_ok("declare class console {\n  static log(...args: any[]): void\n}\ninterface Animal {\n  sound(): void;\n}\n");
        let Item::Class(c) = &m.items[0] else { panic!() };
        let Member::Method(log) = &c.members[0] else { panic!() };
        assert!(log.modifiers.is_static && log.body.is_none() && log.params[0].rest);
        let Item::Class(i) = &m.items[1] else { panic!() };
        assert_eq!(i.kind, ClassKind::Interface);
    }

    #[test]
    fn generic_type_args_close_on_shift_token() {
        let m = parse_ok("let x: Array<Array<number>> = new Array<number>()\n");
        let Item::Var(v) = &m.items[0] else { panic!() };
        assert_eq!(v.ty.as_ref().unwrap().to_string(), "Array<Array<number>>");
    }
}
