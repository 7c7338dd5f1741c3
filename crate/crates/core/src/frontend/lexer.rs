//! Tokenizer for ArkLang source text.
//!
//! Whitespace and comments are dropped. Every token records whether a line
//! break preceded it, which the parser uses for automatic statement
//! termination.

use super::source::{SourceFile, Span};
use crate::diag::{Code, Diagnostic};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Keyword {
    Let,
    Const,
    Var,
    Function,
    Class,
    Struct,
    Interface,
    Namespace,
    Extends,
    Implements,
    New,
    Return,
    If,
    Else,
    While,
    For,
    Break,
    Continue,
    This,
    Super,
    Null,
    Undefined,
    True,
    False,
    Static,
    Abstract,
    Private,
    Public,
    Protected,
    Readonly,
    Export,
    Import,
    Declare,
    Typeof,
    Instanceof,
    In,
    Void,
    // Recognized only so they can be reported as unsupported.
    Enum,
    Switch,
    Try,
    Async,
    Await,
    Do,
    Type,
}

impl Keyword {
    fn from_str(s: &str) -> Option<Keyword> {
        use Keyword::*;
        Some(match s {
            "let" => Let,
            "const" => Const,
            "var" => Var,
            "function" => Function,
            "class" => Class,
            "struct" => Struct,
            "interface" => Interface,
            "namespace" => Namespace,
            "extends" => Extends,
            "implements" => Implements,
            "new" => New,
            "return" => Return,
            "if" => If,
            "else" => Else,
            "while" => While,
            "for" => For,
            "break" => Break,
            "continue" => Continue,
            "this" => This,
            "super" => Super,
            "null" => Null,
            "undefined" => Undefined,
            "true" => True,
            "false" => False,
            "static" => Static,
            "abstract" => Abstract,
            "private" => Private,
            "public" => Public,
            "protected" => Protected,
            "readonly" => Readonly,
            "export" => Export,
            "import" => Import,
            "declare" => Declare,
            "typeof" => Typeof,
            "instanceof" => Instanceof,
            "in" => In,
            "void" => Void,
            "enum" => Enum,
            "switch" => Switch,
            "try" => Try,
            "async" => Async,
            "await" => Await,
            "do" => Do,
            "type" => Type,
            _ => return None,
        })
    }

    pub fn as_str(self) -> &'static str {
        use Keyword::*;
        match self {
            Let => "let",
            Const => "const",
            Var => "var",
            Function => "function",
            Class => "class",
            Struct => "struct",
            Interface => "interface",
            Namespace => "namespace",
            Extends => "extends",
            Implements => "implements",
            New => "new",
            Return => "return",
            If => "if",
            Else => "else",
            While => "while",
            For => "for",
            Break => "break",
            Continue => "continue",
            This => "this",
            Super => "super",
            Null => "null",
            Undefined => "undefined",
            True => "true",
            False => "false",
            Static => "static",
            Abstract => "abstract",
            Private => "private",
            Public => "public",
            Protected => "protected",
            Readonly => "readonly",
            Export => "export",
            Import => "import",
            Declare => "declare",
            Typeof => "typeof",
            Instanceof => "instanceof",
            In => "in",
            Void => "void",
            Enum => "enum",
            Switch => "switch",
            Try => "try",
            Async => "async",
            Await => "await",
            Do => "do",
            Type => "type",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Punct {
    LParen,
    RParen,
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Dot,
    Ellipsis,
    Colon,
    Question,
    QuestionDot,
    QuestionQuestion,
    Arrow,
    Assign,
    EqEq,
    EqEqEq,
    NotEq,
    NotEqEq,
    Lt,
    LtEq,
    Gt,
    GtEq,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    PlusPlus,
    MinusMinus,
    PlusAssign,
    MinusAssign,
    StarAssign,
    SlashAssign,
    PercentAssign,
    AmpAssign,
    PipeAssign,
    CaretAssign,
    ShlAssign,
    ShrAssign,
    UShrAssign,
    AndAnd,
    OrOr,
    Bang,
    Amp,
    Pipe,
    Caret,
    Tilde,
    Shl,
    Shr,
    UShr,
    At,
}

impl Punct {
    pub fn as_str(self) -> &'static str {
        use Punct::*;
        match self {
            LParen => "(",
            RParen => ")",
            LBrace => "{",
            RBrace => "}",
            LBracket => "[",
            RBracket => "]",
            Semi => ";",
            Comma => ",",
            Dot => ".",
            Ellipsis => "...",
            Colon => ":",
            Question => "?",
            QuestionDot => "?.",
            QuestionQuestion => "??",
            Arrow => "=>",
            Assign => "=",
            EqEq => "==",
            EqEqEq => "===",
            NotEq => "!=",
            NotEqEq => "!==",
            Lt => "<",
            LtEq => "<=",
            Gt => ">",
            GtEq => ">=",
            Plus => "+",
            Minus => "-",
            Star => "*",
            Slash => "/",
            Percent => "%",
            PlusPlus => "++",
            MinusMinus => "--",
            PlusAssign => "+=",
            MinusAssign => "-=",
            StarAssign => "*=",
            SlashAssign => "/=",
            PercentAssign => "%=",
            AmpAssign => "&=",
            PipeAssign => "|=",
            CaretAssign => "^=",
            ShlAssign => "<<=",
            ShrAssign => ">>=",
            UShrAssign => ">>>=",
            AndAnd => "&&",
            OrOr => "||",
            Bang => "!",
            Amp => "&",
            Pipe => "|",
            Caret => "^",
            Tilde => "~",
            Shl => "<<",
            Shr => ">>",
            UShr => ">>>",
            At => "@",
        }
    }
}

// Longest first so that maximal munch falls out of a linear scan.
const PUNCTS: &[(&str, Punct)] = &[
    (">>>=", Punct::UShrAssign),
    ("<<=", Punct::ShlAssign),
    (">>=", Punct::ShrAssign),
    (">>>", Punct::UShr),
    ("===", Punct::EqEqEq),
    ("!==", Punct::NotEqEq),
    ("...", Punct::Ellipsis),
    ("=>", Punct::Arrow),
    ("==", Punct::EqEq),
    ("!=", Punct::NotEq),
    ("<=", Punct::LtEq),
    (">=", Punct::GtEq),
    ("++", Punct::PlusPlus),
    ("--", Punct::MinusMinus),
    ("+=", Punct::PlusAssign),
    ("-=", Punct::MinusAssign),
    ("*=", Punct::StarAssign),
    ("/=", Punct::SlashAssign),
    ("%=", Punct::PercentAssign),
    ("&=", Punct::AmpAssign),
    ("|=", Punct::PipeAssign),
    ("^=", Punct::CaretAssign),
    ("&&", Punct::AndAnd),
    ("||", Punct::OrOr),
    ("<<", Punct::Shl),
    (">>", Punct::Shr),
    ("?.", Punct::QuestionDot),
    ("??", Punct::QuestionQuestion),
    ("(", Punct::LParen),
    (")", Punct::RParen),
    ("{", Punct::LBrace),
    ("}", Punct::RBrace),
    ("[", Punct::LBracket),
    ("]", Punct::RBracket),
    (";", Punct::Semi),
    (",", Punct::Comma),
    (".", Punct::Dot),
    (":", Punct::Colon),
    ("?", Punct::Question),
    ("=", Punct::Assign),
    ("<", Punct::Lt),
    (">", Punct::Gt),
    ("+", Punct::Plus),
    ("-", Punct::Minus),
    ("*", Punct::Star),
    ("/", Punct::Slash),
    ("%", Punct::Percent),
    ("!", Punct::Bang),
    ("&", Punct::Amp),
    ("|", Punct::Pipe),
    ("^", Punct::Caret),
    ("~", Punct::Tilde),
    ("@", Punct::At),
];

#[derive(Debug, Clone, PartialEq)]
pub enum TemplatePart {
    Str(String),
    /// Tokens of an interpolation hole `${...}` and the span of its contents.
    Hole(Vec<Token>, Span),
}

#[derive(Debug, Clone, PartialEq)]
pub enum TokenKind {
    Ident(String),
    Keyword(Keyword),
    Number(f64),
    Str(String),
    Template(Vec<TemplatePart>),
    Punct(Punct),
    Eof,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: Span,
    pub newline_before: bool,
}

impl Token {
    pub fn is_punct(&self, p: Punct) -> bool {
        self.kind == TokenKind::Punct(p)
    }

    pub fn is_keyword(&self, k: Keyword) -> bool {
        self.kind == TokenKind::Keyword(k)
    }
}

pub fn lex(source: &SourceFile) -> (Vec<Token>, Vec<Diagnostic>) {
    let mut lexer = Lexer {
        file: source,
        bytes: source.text.as_bytes(),
        pos: 0,
        end: source.text.len(),
        diags: Vec::new(),
    };
    let tokens = lexer.run(true);
    (tokens, lexer.diags)
}

struct Lexer<'a> {
    file: &'a SourceFile,
    bytes: &'a [u8],
    pos: usize,
    end: usize,
    diags: Vec<Diagnostic>,
}

impl<'a> Lexer<'a> {
    fn span(&self, lo: usize, hi: usize) -> Span {
        let (line, col) = self.file.position(lo as u32);
        Span::new(lo as u32, hi as u32, line, col)
    }

    fn peek(&self, off: usize) -> u8 {
        let i = self.pos + off;
        if i < self.end {
            self.bytes[i]
        } else {
            0
        }
    }

    fn error(&mut self, lo: usize, code: Code, msg: &str) {
        let span = self.span(lo, self.pos.max(lo));
        self.diags.push(Diagnostic::error(&self.file.path, code, span, msg));
    }

    fn skip_to_next_line(&mut self) {
        while self.pos < self.end && self.bytes[self.pos] != b'\n' {
            self.pos += 1;
        }
    }

    /// Skips whitespace and comments; reports whether a newline was crossed.
    fn skip_trivia(&mut self) -> bool {
        let mut newline = false;
        loop {
            let c = self.peek(0);
            match c {
                b'\n' => {
                    newline = true;
                    self.pos += 1;
                }
                b' ' | b'\t' | b'\r' => self.pos += 1,
                b'/' if self.peek(1) == b'/' => self.skip_to_next_line(),
                b'/' if self.peek(1) == b'*' => {
                    let lo = self.pos;
                    self.pos += 2;
                    loop {
                        if self.pos >= self.end {
                            self.pos = lo;
                            self.error(lo, Code::Unterminated, "unterminated block comment");
                            self.skip_to_next_line();
                            break;
                        }
                        if self.peek(0) == b'*' && self.peek(1) == b'/' {
                            self.pos += 2;
                            break;
                        }
                        if self.peek(0) == b'\n' {
                            newline = true;
                        }
                        self.pos += 1;
                    }
                }
                _ if c >= 0x80 => {
                    // Non-ASCII whitespace (e.g. NBSP) is skipped; anything else is an error.
                    let ch = self.file.text[self.pos..].chars().next().unwrap();
                    if ch.is_whitespace() {
                        self.pos += ch.len_utf8();
                    } else {
                        return newline;
                    }
                }
                _ => return newline,
            }
        }
    }

    fn run(&mut self, with_eof: bool) -> Vec<Token> {
        let mut out = Vec::new();
        let mut newline_before = true;
        loop {
            newline_before |= self.skip_trivia();
            if self.pos >= self.end {
                break;
            }
            let lo = self.pos;
            if let Some(kind) = self.next_kind() {
                out.push(Token { kind, span: self.span(lo, self.pos), newline_before });
                newline_before = false;
            } else {
                // Line-skipping error recovery means a newline follows.
                newline_before = true;
            }
        }
        if with_eof {
            out.push(Token { kind: TokenKind::Eof, span: self.span(self.end, self.end), newline_before: true });
        }
        out
    }

    fn next_kind(&mut self) -> Option<TokenKind> {
        let c = self.peek(0);
        let lo = self.pos;
        if c.is_ascii_alphabetic() || c == b'_' || c == b'$' || c >= 0x80 {
            let text = &self.file.text[self.pos..self.end];
            let len: usize = text
                .char_indices()
                .find(|&(_, ch)| !(ch.is_alphanumeric() || ch == '_' || ch == '$'))
                .map(|(i, _)| i)
                .unwrap_or(text.len());
            if len == 0 {
                let ch = text.chars().next().unwrap();
                self.pos += ch.len_utf8();
                self.error(lo, Code::ParseError, &format!("unexpected character `{ch}`"));
                return None;
            }
            let word = &text[..len];
            self.pos += len;
            return Some(match Keyword::from_str(word) {
                Some(k) => TokenKind::Keyword(k),
                None => TokenKind::Ident(word.to_string()),
            });
        }
        if c.is_ascii_digit() || (c == b'.' && self.peek(1).is_ascii_digit()) {
            return Some(self.number());
        }
        if c == b'\'' || c == b'"' {
            return self.string(c);
        }
        if c == b'`' {
            return self.template();
        }
        for (text, p) in PUNCTS {
            if self.bytes[self.pos..self.end].starts_with(text.as_bytes()) {
                self.pos += text.len();
                return Some(TokenKind::Punct(*p));
            }
        }
        self.pos += 1;
        self.error(lo, Code::ParseError, &format!("unexpected character `{}`", c as char));
        None
    }

    fn number(&mut self) -> TokenKind {
        let lo = self.pos;
        if self.peek(0) == b'0' && matches!(self.peek(1), b'x' | b'X') {
            self.pos += 2;
            while self.peek(0).is_ascii_hexdigit() || self.peek(0) == b'_' {
                self.pos += 1;
            }
            let digits: String = self.file.text[lo + 2..self.pos].chars().filter(|&c| c != '_').collect();
            return TokenKind::Number(u64::from_str_radix(&digits, 16).unwrap_or(0) as f64);
        }
        while self.peek(0).is_ascii_digit() || self.peek(0) == b'_' {
            self.pos += 1;
        }
        if self.peek(0) == b'.' && self.peek(1).is_ascii_digit() {
            self.pos += 1;
            while self.peek(0).is_ascii_digit() {
                self.pos += 1;
            }
        }
        if matches!(self.peek(0), b'e' | b'E') {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.peek(0), b'+' | b'-') {
                self.pos += 1;
            }
            if self.peek(0).is_ascii_digit() {
                while self.peek(0).is_ascii_digit() {
                    self.pos += 1;
                }
            } else {
                self.pos = save;
            }
        }
        let text: String = self.file.text[lo..self.pos].chars().filter(|&c| c != '_').collect();
        TokenKind::Number(text.parse().unwrap_or(0.0))
    }

    fn escape(&mut self, out: &mut String) {
        // positioned on the backslash
        self.pos += 1;
        let c = self.peek(0);
        self.pos += 1;
        match c {
            b'n' => out.push('\n'),
            b't' => out.push('\t'),
            b'r' => out.push('\r'),
            b'0' => out.push('\0'),
            b'\n' => {}
            _ => {
                self.pos -= 1;
                let ch = self.file.text[self.pos..].chars().next().unwrap_or('\\');
                self.pos += ch.len_utf8();
                out.push(ch);
            }
        }
    }

    fn string(&mut self, quote: u8) -> Option<TokenKind> {
        let lo = self.pos;
        self.pos += 1;
        let mut out = String::new();
        loop {
            let c = self.peek(0);
            if self.pos >= self.end || c == b'\n' {
                self.error(lo, Code::Unterminated, "unterminated string literal");
                self.skip_to_next_line();
                return None;
            }
            if c == quote {
                self.pos += 1;
                return Some(TokenKind::Str(out));
            }
            if c == b'\\' {
                self.escape(&mut out);
                continue;
            }
            let ch = self.file.text[self.pos..].chars().next().unwrap();
            out.push(ch);
            self.pos += ch.len_utf8();
        }
    }

    fn template(&mut self) -> Option<TokenKind> {
        let lo = self.pos;
        self.pos += 1;
        let mut parts = Vec::new();
        let mut lit = String::new();
        loop {
            if self.pos >= self.end {
                self.pos = lo;
                self.error(lo, Code::Unterminated, "unterminated template string");
                self.skip_to_next_line();
                return None;
            }
            match self.peek(0) {
                b'`' => {
                    self.pos += 1;
                    if !lit.is_empty() {
                        parts.push(TemplatePart::Str(lit));
                    }
                    return Some(TokenKind::Template(parts));
                }
                b'\\' => self.escape(&mut lit),
                b'$' if self.peek(1) == b'{' => {
                    if !lit.is_empty() {
                        parts.push(TemplatePart::Str(std::mem::take(&mut lit)));
                    }
                    self.pos += 2;
                    let inner_lo = self.pos;
                    let mut depth = 0usize;
                    while self.pos < self.end {
                        match self.peek(0) {
                            b'{' => depth += 1,
                            b'}' if depth == 0 => break,
                            b'}' => depth -= 1,
                            _ => {}
                        }
                        self.pos += 1;
                    }
                    if self.pos >= self.end {
                        self.pos = lo;
                        self.error(lo, Code::Unterminated, "unterminated template hole");
                        self.skip_to_next_line();
                        return None;
                    }
                    let inner_hi = self.pos;
                    let mut sub = Lexer {
                        file: self.file,
                        bytes: self.bytes,
                        pos: inner_lo,
                        end: inner_hi,
                        diags: Vec::new(),
                    };
                    let toks = sub.run(false);
                    self.diags.append(&mut sub.diags);
                    parts.push(TemplatePart::Hole(toks, self.span(inner_lo, inner_hi)));
                    self.pos += 1;
                }
                _ => {
                    let ch = self.file.text[self.pos..].chars().next().unwrap();
                    lit.push(ch);
                    self.pos += ch.len_utf8();
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn kinds(src: &str) -> Vec<TokenKind> {
        let (toks, diags) = lex(&SourceFile::new("t.ets", src));
        assert!(diags.is_empty(), "{diags:?}");
        toks.into_iter().map(|t| t.kind).filter(|k| *k != TokenKind::Eof).collect()
    }

    #[test]
    fn minimal_declaration() {
        assert_eq!(
            kinds("let x = 1"),
            vec![
                TokenKind::Keyword(Keyword::Let),
                TokenKind::Ident("x".into()),
                TokenKind::Punct(Punct::Assign),
                TokenKind::Number(1.0),
            ]
        );
    }

    #[test]
    fn template_with_one_hole() {
        let k = kinds("`!${name}!`");
        assert_eq!(k.len(), 1);
        let TokenKind::Template(parts) = &k[0] else { panic!("not a template: {k:?}") };
        assert_eq!(parts.len(), 3);
        assert_eq!(parts[0], TemplatePart::Str("!".into()));
        match &parts[1] {
            TemplatePart::Hole(toks, _) => {
                assert_eq!(toks.len(), 1);
                assert_eq!(toks[0].kind, TokenKind::Ident("name".into()));
            }
            p => panic!("expected hole, got {p:?}"),
        }
        assert_eq!(parts[2], TemplatePart::Str("!".into()));
    }

    #[test]
    fn decorator_tokens() {
        assert_eq!(kinds("@Entry"), vec![TokenKind::Punct(Punct::At), TokenKind::Ident("Entry".into())]);
    }

    #[test]
    fn comments_are_dropped_and_newlines_tracked() {
        let (toks, _) = lex(&SourceFile::new("t.ets", "a // c\n/* x\n */ b"));
        assert_eq!(toks.len(), 3);
        assert!(toks[1].newline_before);
        assert_eq!(toks[1].span.line, 3);
    }

    #[test]
    fn unterminated_string_resumes_next_line() {
        let (toks, diags) = lex(&SourceFile::new("t.ets", "let s = 'abc\nlet y = 2"));
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, Code::Unterminated);
        assert!(toks.iter().any(|t| t.kind == TokenKind::Ident("y".into())));
    }

    #[test]
    fn unterminated_comment_reports() {
        let (_, diags) = lex(&SourceFile::new("t.ets", "a /* never\nclosed"));
        assert_eq!(diags[0].code, Code::Unterminated);
    }

    #[test]
    fn numbers_and_maximal_munch() {
        assert_eq!(
            kinds("0x10 1.5 x>>>=y"),
            vec![
                TokenKind::Number(16.0),
                TokenKind::Number(1.5),
                TokenKind::Ident("x".into()),
                TokenKind::Punct(Punct::UShrAssign),
                TokenKind::Ident("y".into()),
            ]
        );
    }
}
