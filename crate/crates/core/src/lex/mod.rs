//! C and Java lexing into typed tokens.
//!
//! Token types follow the srcML vocabulary used by token-level history tools
//! (`name`, `literal`, `operator`, ...). Labels are assigned lexically with a
//! little statement context, not by a parser: `;` becomes `decl_stmt` when the
//! statement it closes starts like a declaration and `expr_stmt` otherwise.
//!
//! The right-hand side of a `#define` is kept as a single `value` token, and
//! `#include <...>` targets are single `literal` tokens.

mod comments;
pub mod keywords;
mod scanner;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use comments::strip_comments_linewise;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    C,
    Java,
}

impl Language {
    /// `.java` is Java; `.c` and `.h` are C.
    pub fn from_extension(ext: &str) -> Option<Language> {
        match ext.to_ascii_lowercase().as_str() {
            "java" => Some(Language::Java),
            "c" | "h" => Some(Language::C),
            _ => None,
        }
    }

    pub fn from_path(path: &str) -> Option<Language> {
        let ext = path.rsplit_once('.')?.1;
        if ext.contains('/') {
            return None;
        }
        Language::from_extension(ext)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Language::C => "c",
            Language::Java => "java",
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Language {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "c" => Ok(Language::C),
            "java" => Ok(Language::Java),
            _ => Err(UnknownLabel(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown label `{0}`")]
pub struct UnknownLabel(pub String);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenType {
    Name,
    Literal,
    Operator,
    ArgumentList,
    ExprStmt,
    DeclStmt,
    Block,
    Specifier,
    Directive,
    Annotation,
    Value,
    OtherPunct,
}

impl TokenType {
    pub const ALL: [TokenType; 12] = [
        TokenType::Name,
        TokenType::Literal,
        TokenType::Operator,
        TokenType::ArgumentList,
        TokenType::ExprStmt,
        TokenType::DeclStmt,
        TokenType::Block,
        TokenType::Specifier,
        TokenType::Directive,
        TokenType::Annotation,
        TokenType::Value,
        TokenType::OtherPunct,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TokenType::Name => "name",
            TokenType::Literal => "literal",
            TokenType::Operator => "operator",
            TokenType::ArgumentList => "argument_list",
            TokenType::ExprStmt => "expr_stmt",
            TokenType::DeclStmt => "decl_stmt",
            TokenType::Block => "block",
            TokenType::Specifier => "specifier",
            TokenType::Directive => "directive",
            TokenType::Annotation => "annotation",
            TokenType::Value => "value",
            TokenType::OtherPunct => "other_punct",
        }
    }

    pub fn is_terminator(self) -> bool {
        matches!(self, TokenType::ExprStmt | TokenType::DeclStmt)
    }
}

impl fmt::Display for TokenType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TokenType {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TokenType::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| UnknownLabel(s.to_string()))
    }
}

/// The diffable identity of a token: its type and verbatim text.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Lexeme {
    pub kind: TokenType,
    pub text: String,
}

impl Lexeme {
    pub fn new(kind: TokenType, text: impl Into<String>) -> Self {
        Lexeme {
            kind,
            text: text.into(),
        }
    }
}

/// `type|text`, the notation token repositories use.
impl fmt::Display for Lexeme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.kind, self.text)
    }
}

impl FromStr for Lexeme {
    type Err = UnknownLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, text) = s.split_once('|').ok_or_else(|| UnknownLabel(s.to_string()))?;
        Ok(Lexeme::new(kind.parse()?, text))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Token {
    pub kind: TokenType,
    pub text: String,
    /// Byte offset of the first byte of `text` in the source.
    pub offset: usize,
    /// 1-based line of `offset`.
    pub line: usize,
}

impl Token {
    pub fn lexeme(&self) -> Lexeme {
        Lexeme::new(self.kind, self.text.clone())
    }

    pub fn end(&self) -> usize {
        self.offset + self.text.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenizedFile {
    pub path: String,
    pub language: Language,
    pub tokens: Vec<Token>,
    /// Set when an unterminated literal or comment forced the lexer to treat
    /// the remainder of a line or file as one unit.
    pub recovered: bool,
}

impl TokenizedFile {
    pub fn lexemes(&self) -> Vec<Lexeme> {
        self.tokens.iter().map(Token::lexeme).collect()
    }

    /// Byte ranges of `source` not covered by any token, in order.
    pub fn discarded_spans(&self, source_len: usize) -> Vec<std::ops::Range<usize>> {
        let mut spans = Vec::new();
        let mut cursor = 0;
        for token in &self.tokens {
            if token.offset > cursor {
                spans.push(cursor..token.offset);
            }
            cursor = token.end();
        }
        if cursor < source_len {
            spans.push(cursor..source_len);
        }
        spans
    }
}

/// Decodes raw file bytes, replacing invalid UTF-8 sequences with U+FFFD.
pub fn decode(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

pub fn lex(source: &str, language: Language) -> TokenizedFile {
    lex_path("", source, language)
}

pub fn lex_path(path: &str, source: &str, language: Language) -> TokenizedFile {
    let (tokens, recovered) = scanner::Scanner::new(source, language).run();
    TokenizedFile {
        path: path.to_string(),
        language,
        tokens,
        recovered,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(src: &str, language: Language) -> Vec<String> {
        lex(src, language)
            .tokens
            .iter()
            .map(|t| format!("{}|{}", t.kind, t.text))
            .collect()
    }

    #[test]
    fn int_declaration() {
        assert_eq!(pairs("int i;", Language::C), ["name|int", "name|i", "decl_stmt|;"]);
    }

    #[test]
    fn empty_source() {
        let file = lex("", Language::C);
        assert!(file.tokens.is_empty());
        assert!(!file.recovered);
    }

    // Hand-lexed before the scanner existed.
    #[test]
    fn listing_one_added_line() {
        assert_eq!(
            pairs("static struct cards card_list[] __devinitdata = {", Language::C),
            [
                "specifier|static",
                "name|struct",
                "name|cards",
                "name|card_list",
                "operator|[",
                "operator|]",
                "name|__devinitdata",
                "operator|=",
                "block|{",
            ]
        );
    }

    #[test]
    fn expression_statement_semicolon() {
        assert_eq!(
            pairs("dqm->total_queue_count++;", Language::C),
            [
                "name|dqm",
                "operator|->",
                "name|total_queue_count",
                "operator|++",
                "expr_stmt|;"
            ]
        );
        assert_eq!(
            pairs("return IRQ_NONE;", Language::C),
            ["name|return", "name|IRQ_NONE", "expr_stmt|;"]
        );
    }

    #[test]
    fn declaration_heuristics() {
        assert_eq!(pairs("foo_t x;", Language::C).last().unwrap(), "decl_stmt|;");
        assert_eq!(pairs("struct a *p;", Language::C).last().unwrap(), "decl_stmt|;");
        assert_eq!(pairs("x = 1;", Language::C).last().unwrap(), "expr_stmt|;");
        assert_eq!(
            pairs("{ static int a = 1; b(); }", Language::C),
            [
                "block|{",
                "specifier|static",
                "name|int",
                "name|a",
                "operator|=",
                "literal|1",
                "decl_stmt|;",
                "name|b",
                "argument_list|()",
                "expr_stmt|;",
                "block|}"
            ]
        );
    }

    #[test]
    fn comments_produce_no_tokens() {
        let src = "a /* b */ c // d\n/** doc */ e";
        assert_eq!(pairs(src, Language::Java), ["name|a", "name|c", "name|e"]);
    }

    #[test]
    fn string_with_comment_text_is_one_literal() {
        assert_eq!(
            pairs("s = \"// not /* a */ comment\";", Language::C),
            [
                "name|s",
                "operator|=",
                "literal|\"// not /* a */ comment\"",
                "expr_stmt|;"
            ]
        );
    }

    #[test]
    fn literals() {
        assert_eq!(
            pairs("x = 0x1Fu + 1.5e-3 + 'a' + L\"w\" + true;", Language::C),
            [
                "name|x",
                "operator|=",
                "literal|0x1Fu",
                "operator|+",
                "literal|1.5e-3",
                "operator|+",
                "literal|'a'",
                "operator|+",
                "literal|L\"w\"",
                "operator|+",
                "literal|true",
                "expr_stmt|;"
            ]
        );
    }

    #[test]
    fn define_right_hand_side_is_one_value() {
        assert_eq!(
            pairs("#define EXTCON_PROP_USB_MAX\t\t1\n", Language::C),
            ["directive|#define", "name|EXTCON_PROP_USB_MAX", "value|1"]
        );
        assert_eq!(
            pairs(
                "#define MAX(a, b) ((a) > (b) ? (a) : (b)) /* max */\nint x;",
                Language::C
            ),
            [
                "directive|#define",
                "name|MAX",
                "argument_list|(",
                "name|a",
                "argument_list|,",
                "name|b",
                "argument_list|)",
                "value|((a) > (b) ? (a) : (b))",
                "name|int",
                "name|x",
                "decl_stmt|;"
            ]
        );
        assert_eq!(
            pairs("#define A 1 + \\\n  2\n", Language::C),
            ["directive|#define", "name|A", "value|1 + \\\n  2"]
        );
        assert_eq!(
            pairs("#define EMPTY\n", Language::C),
            ["directive|#define", "name|EMPTY"]
        );
    }

    #[test]
    fn include_targets() {
        assert_eq!(
            pairs("#include <linux/module.h>\n#include \"local.h\"\n", Language::C),
            [
                "directive|#include",
                "literal|<linux/module.h>",
                "directive|#include",
                "literal|\"local.h\""
            ]
        );
    }

    #[test]
    fn conditional_directive_rest_is_lexed() {
        assert_eq!(
            pairs("#  ifdef CONFIG_X\nx;\n#endif", Language::C),
            [
                "directive|#  ifdef",
                "name|CONFIG_X",
                "name|x",
                "expr_stmt|;",
                "directive|#endif"
            ]
        );
    }

    #[test]
    fn java_annotation_and_modifiers() {
        assert_eq!(
            pairs("@Override public void run() { }", Language::Java),
            [
                "annotation|@Override",
                "specifier|public",
                "name|void",
                "name|run",
                "argument_list|()",
                "block|{",
                "block|}"
            ]
        );
    }

    #[test]
    fn empty_parens_are_one_argument_list() {
        assert_eq!(
            pairs("private SchemaHelper() {\n}\n", Language::Java),
            [
                "specifier|private",
                "name|SchemaHelper",
                "argument_list|()",
                "block|{",
                "block|}"
            ]
        );
        assert_eq!(
            pairs("f( )", Language::C),
            ["name|f", "argument_list|(", "argument_list|)"]
        );
    }

    #[test]
    fn unterminated_string_is_recovered() {
        let file = lex("a = \"oops\nb;", Language::C);
        assert!(file.recovered);
        assert_eq!(file.tokens[2].text, "\"oops");
        assert_eq!(file.tokens[3].text, "b");
        assert_eq!(file.tokens[3].line, 2);
    }

    #[test]
    fn unterminated_comment_is_recovered() {
        let file = lex("a; /* never closed", Language::C);
        assert!(file.recovered);
        assert_eq!(file.tokens.len(), 2);
    }

    #[test]
    fn backslash_newline_is_whitespace() {
        assert_eq!(pairs("a \\\n b", Language::C), ["name|a", "name|b"]);
    }

    #[test]
    fn offsets_and_lines() {
        let src = "int a;\n  b = 2;";
        let file = lex(src, Language::C);
        for t in &file.tokens {
            assert_eq!(&src[t.offset..t.end()], t.text);
        }
        assert_eq!(file.tokens[3].line, 2);
        assert_eq!(file.tokens[3].offset, 9);
    }

    #[test]
    fn unknown_characters_are_other_punct() {
        assert_eq!(pairs("a ` b", Language::C), ["name|a", "other_punct|`", "name|b"]);
        assert_eq!(pairs("\u{FFFD}", Language::C), ["other_punct|\u{FFFD}"]);
    }

    #[test]
    fn decode_replaces_invalid_bytes() {
        assert_eq!(decode(b"a\xffb"), "a\u{FFFD}b");
    }

    #[test]
    fn lexeme_notation_round_trips() {
        let l: Lexeme = "decl_stmt|;".parse().unwrap();
        assert_eq!(l, Lexeme::new(TokenType::DeclStmt, ";"));
        assert_eq!(l.to_string(), "decl_stmt|;");
        assert!("bogus|x".parse::<Lexeme>().is_err());
    }

    #[test]
    fn language_from_path() {
        assert_eq!(Language::from_path("src/a.java"), Some(Language::Java));
        assert_eq!(Language::from_path("drivers/x.H"), Some(Language::C));
        assert_eq!(Language::from_path("README"), None);
        assert_eq!(Language::from_path("a.d/readme"), None);
    }
}
