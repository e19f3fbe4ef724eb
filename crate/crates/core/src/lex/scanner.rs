use super::keywords;
use super::{Language, Token, TokenType};

const C_OPERATORS: &[&str] = &[
    "<<=", ">>=", "...", "->", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "+=", "-=", "*=", "/=",
    "%=", "&=", "^=", "|=", "##", "+", "-", "*", "/", "%", "=", "<", ">", "!", "~", "&", "|", "^", "?", ":", ".", "#",
    "[", "]",
];

const JAVA_OPERATORS: &[&str] = &[
    ">>>=", "<<=", ">>=", ">>>", "...", "->", "::", "++", "--", "<<", ">>", "<=", ">=", "==", "!=", "&&", "||", "+=",
    "-=", "*=", "/=", "%=", "&=", "^=", "|=", "+", "-", "*", "/", "%", "=", "<", ">", "!", "~", "&", "|", "^", "?",
    ":", ".", "[", "]",
];

fn is_ident_start(c: char) -> bool {
    c == '_' || c == '$' || c.is_alphabetic()
}

fn is_ident_continue(c: char) -> bool {
    c == '_' || c == '$' || c.is_alphanumeric()
}

fn is_horizontal_space(c: char) -> bool {
    c != '\n' && c.is_whitespace()
}

pub(super) struct Scanner<'a> {
    src: &'a str,
    bytes: &'a [u8],
    language: Language,
    pos: usize,
    line: usize,
    tokens: Vec<Token>,
    recovered: bool,
    at_line_start: bool,
    in_directive: bool,
    /// Index of the first token of the statement currently being read.
    stmt_start: Option<usize>,
}

impl<'a> Scanner<'a> {
    pub(super) fn new(src: &'a str, language: Language) -> Self {
        Scanner {
            src,
            bytes: src.as_bytes(),
            language,
            pos: 0,
            line: 1,
            tokens: Vec::new(),
            recovered: false,
            at_line_start: true,
            in_directive: false,
            stmt_start: None,
        }
    }

    pub(super) fn run(mut self) -> (Vec<Token>, bool) {
        while let Some(c) = self.peek() {
            if c == '\n' {
                self.advance_to(self.pos + 1);
                self.at_line_start = true;
                self.in_directive = false;
            } else if c.is_whitespace() {
                self.advance_to(self.pos + c.len_utf8());
            } else if let Some(len) = self.escaped_newline_len() {
                self.advance_to(self.pos + len);
            } else if self.starts_with("//") || self.starts_with("/*") {
                self.skip_comment();
            } else if c == '#' && self.language == Language::C && self.at_line_start && !self.in_directive {
                self.directive();
            } else {
                self.token();
            }
        }
        (self.tokens, self.recovered)
    }

    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.src.get(self.pos + offset..)?.chars().next()
    }

    fn starts_with(&self, s: &str) -> bool {
        self.src[self.pos..].starts_with(s)
    }

    fn advance_to(&mut self, target: usize) {
        self.line += self.bytes[self.pos..target].iter().filter(|&&b| b == b'\n').count();
        self.pos = target;
    }

    /// Length of a backslash-newline at the cursor (`\` `\n` or `\` `\r\n`).
    fn escaped_newline_len(&self) -> Option<usize> {
        let rest = &self.bytes[self.pos..];
        match rest {
            [b'\\', b'\n', ..] => Some(2),
            [b'\\', b'\r', b'\n', ..] => Some(3),
            _ => None,
        }
    }

    fn skip_comment(&mut self) {
        if self.starts_with("//") {
            let end = self.src[self.pos..].find('\n').map_or(self.src.len(), |i| self.pos + i);
            self.advance_to(end);
        } else {
            match self.src[self.pos + 2..].find("*/") {
                Some(i) => self.advance_to(self.pos + 2 + i + 2),
                None => {
                    self.recovered = true;
                    self.advance_to(self.src.len());
                }
            }
        }
    }

    /// Skips spaces, escaped newlines and comments without crossing a raw
    /// line break.
    fn skip_inline_trivia(&mut self) {
        while let Some(c) = self.peek() {
            if is_horizontal_space(c) {
                self.advance_to(self.pos + c.len_utf8());
            } else if let Some(len) = self.escaped_newline_len() {
                self.advance_to(self.pos + len);
            } else if self.starts_with("//") || self.starts_with("/*") {
                self.skip_comment();
            } else {
                break;
            }
        }
    }

    fn push(&mut self, kind: TokenType, start: usize, start_line: usize) {
        let kind = if kind == TokenType::ExprStmt && !self.in_directive {
            if self.closes_declaration() {
                TokenType::DeclStmt
            } else {
                TokenType::ExprStmt
            }
        } else {
            kind
        };
        self.tokens.push(Token {
            kind,
            text: self.src[start..self.pos].to_string(),
            offset: start,
            line: start_line,
        });
        self.at_line_start = false;
        if self.in_directive {
            return;
        }
        match kind {
            TokenType::Block | TokenType::ExprStmt | TokenType::DeclStmt => self.stmt_start = None,
            _ => {
                if self.stmt_start.is_none() {
                    self.stmt_start = Some(self.tokens.len() - 1);
                }
            }
        }
    }

    fn closes_declaration(&self) -> bool {
        let Some(first) = self.stmt_start else {
            return false;
        };
        let stmt = &self.tokens[first..];
        let lang = self.language;
        let plain_name = |i: usize| {
            stmt.get(i)
                .is_some_and(|t| t.kind == TokenType::Name && !keywords::is_keyword(&t.text, lang))
        };
        let t0 = &stmt[0];
        match t0.kind {
            TokenType::Specifier | TokenType::Annotation => return true,
            TokenType::Name => {}
            _ => return false,
        }
        if keywords::is_type_keyword(&t0.text, lang) {
            return true;
        }
        if !plain_name(0) {
            return false;
        }
        if keywords::looks_like_type_name(&t0.text) || plain_name(1) {
            return true;
        }
        // `type *var;` and `type *var = ...;`
        stmt.get(1).is_some_and(|t| t.text == "*")
            && plain_name(2)
            && stmt.get(3).is_none_or(|t| matches!(t.text.as_str(), "=" | "," | "["))
    }

    fn directive(&mut self) {
        let start = self.pos;
        let start_line = self.line;
        self.advance_to(self.pos + 1);
        self.in_directive = true;
        let hash_end = self.pos;
        while let Some(c) = self.peek() {
            if is_horizontal_space(c) {
                self.advance_to(self.pos + c.len_utf8());
            } else {
                break;
            }
        }
        let name_start = self.pos;
        let name = if self.peek().is_some_and(is_ident_start) {
            self.scan_ident();
            self.src[name_start..self.pos].to_string()
        } else {
            self.pos = hash_end;
            String::new()
        };
        self.push(TokenType::Directive, start, start_line);

        match name.as_str() {
            "define" => self.define_rest(),
            "include" | "include_next" | "import" => {
                self.skip_inline_trivia();
                if self.peek() == Some('<') {
                    let line_end = self.src[self.pos..].find('\n').map_or(self.src.len(), |i| self.pos + i);
                    if let Some(close) = self.src[self.pos..line_end].find('>') {
                        let tok_start = self.pos;
                        let tok_line = self.line;
                        self.advance_to(self.pos + close + 1);
                        self.push(TokenType::Literal, tok_start, tok_line);
                    }
                }
            }
            _ => {}
        }
    }

    fn define_rest(&mut self) {
        self.skip_inline_trivia();
        if !self.peek().is_some_and(is_ident_start) {
            return;
        }
        let start = self.pos;
        let start_line = self.line;
        self.scan_ident();
        self.push(TokenType::Name, start, start_line);

        // Function-like macro parameters must follow the name directly.
        if self.peek() == Some('(') {
            loop {
                self.skip_inline_trivia();
                match self.peek() {
                    None | Some('\n') => return,
                    Some(')') => {
                        self.token();
                        break;
                    }
                    Some('(') if self.peek_at(1) == Some(')') => {
                        self.token();
                        break;
                    }
                    Some(_) => self.token(),
                }
            }
        }
        self.define_value();
    }

    /// The macro body up to the end of the logical line. Comments split it,
    /// so a body interrupted by a comment yields one value per segment.
    fn define_value(&mut self) {
        loop {
            self.skip_inline_trivia();
            match self.peek() {
                None | Some('\n') => return,
                Some(_) => {}
            }
            let start = self.pos;
            let start_line = self.line;
            while let Some(c) = self.peek() {
                if c == '\n' || self.starts_with("//") || self.starts_with("/*") {
                    break;
                }
                if let Some(len) = self.escaped_newline_len() {
                    self.advance_to(self.pos + len);
                } else if c == '"' || c == '\'' {
                    let end = self.scan_quoted(self.pos + 1, c);
                    self.advance_to(end);
                } else {
                    self.advance_to(self.pos + c.len_utf8());
                }
            }
            let end = trim_value_end(&self.bytes[start..self.pos]) + start;
            let resume = self.pos;
            let resume_line = self.line;
            self.pos = end;
            self.line = start_line + self.bytes[start..end].iter().filter(|&&b| b == b'\n').count();
            if end > start {
                self.push(TokenType::Value, start, start_line);
            }
            self.pos = resume;
            self.line = resume_line;
        }
    }

    fn scan_ident(&mut self) {
        let len: usize = self.src[self.pos..]
            .char_indices()
            .find(|&(i, c)| {
                if i == 0 {
                    !is_ident_start(c)
                } else {
                    !is_ident_continue(c)
                }
            })
            .map_or(self.src.len() - self.pos, |(i, _)| i);
        self.advance_to(self.pos + len);
    }

    /// Returns the end of a quoted literal whose body starts at `from`. Stops
    /// after the closing quote, or before an unescaped newline / at end of
    /// input (flagging recovery).
    fn scan_quoted(&mut self, from: usize, quote: char) -> usize {
        let mut chars = self.src[from..].char_indices();
        while let Some((i, c)) = chars.next() {
            match c {
                '\\' => {
                    chars.next();
                }
                '\n' => {
                    self.recovered = true;
                    return from + i;
                }
                c if c == quote => return from + i + 1,
                _ => {}
            }
        }
        self.recovered = true;
        self.src.len()
    }

    fn scan_text_block(&mut self, from: usize) -> usize {
        let mut chars = self.src[from..].char_indices();
        while let Some((i, c)) = chars.next() {
            match c {
                '\\' => {
                    chars.next();
                }
                '"' if self.src[from + i..].starts_with("\"\"\"") => return from + i + 3,
                _ => {}
            }
        }
        self.recovered = true;
        self.src.len()
    }

    fn scan_number(&mut self) {
        let mut prev = '\0';
        let mut first = true;
        while let Some(c) = self.peek() {
            let accept = first
                || c.is_ascii_alphanumeric()
                || c == '_'
                || c == '.'
                || ((c == '+' || c == '-') && matches!(prev, 'e' | 'E' | 'p' | 'P'));
            if !accept {
                break;
            }
            first = false;
            prev = c;
            self.advance_to(self.pos + c.len_utf8());
        }
    }

    fn token(&mut self) {
        let start = self.pos;
        let start_line = self.line;
        let Some(c) = self.peek() else { return };
        let next = self.peek_at(c.len_utf8());

        if is_ident_start(c) {
            self.scan_ident();
            let word = &self.src[start..self.pos];
            if self.language == Language::C
                && matches!(word, "L" | "u" | "U" | "u8")
                && matches!(self.peek(), Some('"') | Some('\''))
            {
                let quote = self.peek().unwrap_or('"');
                let end = self.scan_quoted(self.pos + 1, quote);
                self.advance_to(end);
                self.push(TokenType::Literal, start, start_line);
                return;
            }
            let kind = if keywords::is_literal_keyword(word) {
                TokenType::Literal
            } else if keywords::is_specifier(word, self.language) {
                TokenType::Specifier
            } else {
                TokenType::Name
            };
            self.push(kind, start, start_line);
            return;
        }

        if c.is_ascii_digit() || (c == '.' && next.is_some_and(|n| n.is_ascii_digit())) {
            self.scan_number();
            self.push(TokenType::Literal, start, start_line);
            return;
        }

        match c {
            '"' if self.language == Language::Java && self.starts_with("\"\"\"") => {
                let end = self.scan_text_block(self.pos + 3);
                self.advance_to(end);
                self.push(TokenType::Literal, start, start_line);
                return;
            }
            '"' | '\'' => {
                let end = self.scan_quoted(self.pos + 1, c);
                self.advance_to(end);
                self.push(TokenType::Literal, start, start_line);
                return;
            }
            '@' if self.language == Language::Java && next.is_some_and(is_ident_start) => {
                self.advance_to(self.pos + 1);
                self.scan_ident();
                self.push(TokenType::Annotation, start, start_line);
                return;
            }
            '(' if next == Some(')') => {
                self.advance_to(self.pos + 2);
                self.push(TokenType::ArgumentList, start, start_line);
                return;
            }
            '(' | ')' | ',' => {
                self.advance_to(self.pos + 1);
                self.push(TokenType::ArgumentList, start, start_line);
                return;
            }
            '{' | '}' => {
                self.advance_to(self.pos + 1);
                self.push(TokenType::Block, start, start_line);
                return;
            }
            ';' => {
                self.advance_to(self.pos + 1);
                self.push(TokenType::ExprStmt, start, start_line);
                return;
            }
            _ => {}
        }

        let operators = match self.language {
            Language::C => C_OPERATORS,
            Language::Java => JAVA_OPERATORS,
        };
        if let Some(op) = operators.iter().find(|op| self.starts_with(op)) {
            self.advance_to(self.pos + op.len());
            self.push(TokenType::Operator, start, start_line);
            return;
        }

        self.advance_to(self.pos + c.len_utf8());
        self.push(TokenType::OtherPunct, start, start_line);
    }
}

/// Length of `segment` once trailing whitespace and line continuations are
/// removed.
fn trim_value_end(segment: &[u8]) -> usize {
    let mut end = segment.len();
    loop {
        match &segment[..end] {
            [.., b'\\', b'\r', b'\n'] => end -= 3,
            [.., b'\\', b'\n'] => end -= 2,
            [.., b' ' | b'\t' | b'\r' | 0x0b | 0x0c] => end -= 1,
            _ => return end,
        }
    }
}
