//! Commit predicates: `col op value` comparisons and `label:scheme=value`
//! tests joined by AND, OR, NOT and parentheses.

use std::fmt;

use rusqlite::types::Value;

/// Columns of the `commits` table a filter may reference.
pub const COLUMNS: &[&str] = &[
    "commit_id",
    "seq",
    "message",
    "timestamp",
    "is_merge",
    "n_files",
    "n_tokens_added",
    "n_tokens_removed",
    "n_lines_added",
    "n_lines_removed",
    "n_hunks",
    "n_line_hunks",
];

const SCHEMES: &[&str] = &["detector", "maintenance", "taxonomy"];

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid filter at byte {at}: {message}")]
pub struct FilterError {
    pub at: usize,
    pub message: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl CmpOp {
    fn sql(self) -> &'static str {
        match self {
            CmpOp::Eq => "=",
            CmpOp::Ne => "<>",
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Literal {
    Int(i64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Cmp {
        column: &'static str,
        op: CmpOp,
        value: Literal,
    },
    Label {
        scheme: &'static str,
        label: String,
        negated: bool,
    },
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Filter {
    expr: Option<Expr>,
}

impl Filter {
    pub fn all() -> Self {
        Filter { expr: None }
    }

    pub fn parse(text: &str) -> Result<Self, FilterError> {
        let tokens = tokenize(text)?;
        if tokens.is_empty() {
            return Ok(Filter::all());
        }
        let mut parser = Parser {
            tokens,
            pos: 0,
            end: text.len(),
        };
        let expr = parser.or()?;
        if let Some((at, tok)) = parser.tokens.get(parser.pos) {
            return Err(FilterError {
                at: *at,
                message: format!("unexpected {tok}"),
            });
        }
        Ok(Filter { expr: Some(expr) })
    }

    pub fn expr(&self) -> Option<&Expr> {
        self.expr.as_ref()
    }

    /// SQL condition over `commits` aliased as `c`, with positional params.
    pub(crate) fn to_sql(&self) -> (String, Vec<Value>) {
        let mut params = Vec::new();
        let sql = match &self.expr {
            None => "1".to_string(),
            Some(e) => emit(e, &mut params),
        };
        (sql, params)
    }
}

fn emit(expr: &Expr, params: &mut Vec<Value>) -> String {
    match expr {
        Expr::Cmp { column, op, value } => {
            params.push(match value {
                Literal::Int(i) => Value::Integer(*i),
                Literal::Text(s) => Value::Text(s.clone()),
            });
            format!("c.{column} {} ?{}", op.sql(), params.len())
        }
        Expr::Label { scheme, label, negated } => {
            params.push(Value::Text(scheme.to_string()));
            let s = params.len();
            params.push(Value::Text(label.clone()));
            let l = params.len();
            format!(
                "{}EXISTS (SELECT 1 FROM labels l WHERE l.commit_id = c.commit_id AND l.scheme = ?{s} AND l.label = ?{l})",
                if *negated { "NOT " } else { "" }
            )
        }
        Expr::Not(inner) => format!("NOT ({})", emit(inner, params)),
        Expr::And(a, b) => format!("({} AND {})", emit(a, params), emit(b, params)),
        Expr::Or(a, b) => format!("({} OR {})", emit(a, params), emit(b, params)),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Word(String),
    Quoted(String),
    Op(CmpOp),
    Open,
    Close,
    Colon,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "`{w}`"),
            Tok::Quoted(q) => write!(f, "'{q}'"),
            Tok::Op(op) => write!(f, "`{}`", op.sql()),
            Tok::Open => f.write_str("`(`"),
            Tok::Close => f.write_str("`)`"),
            Tok::Colon => f.write_str("`:`"),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Tok)>, FilterError> {
    let mut out = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(at, c)) = chars.peek() {
        let tok = match c {
            _ if c.is_whitespace() => {
                chars.next();
                continue;
            }
            '(' => {
                chars.next();
                Tok::Open
            }
            ')' => {
                chars.next();
                Tok::Close
            }
            ':' => {
                chars.next();
                Tok::Colon
            }
            '<' => operator(&mut chars, at, CmpOp::Le, Some(CmpOp::Lt))?,
            '>' => operator(&mut chars, at, CmpOp::Ge, Some(CmpOp::Gt))?,
            '!' => operator(&mut chars, at, CmpOp::Ne, None)?,
            '=' => operator(&mut chars, at, CmpOp::Eq, Some(CmpOp::Eq))?,
            '≤' | '≥' | '≠' => {
                chars.next();
                Tok::Op(match c {
                    '≤' => CmpOp::Le,
                    '≥' => CmpOp::Ge,
                    _ => CmpOp::Ne,
                })
            }
            '\'' | '"' => {
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        Some((_, ch)) if ch == c => break,
                        Some((_, ch)) => s.push(ch),
                        None => {
                            return Err(FilterError {
                                at,
                                message: "unterminated quoted value".into(),
                            })
                        }
                    }
                }
                Tok::Quoted(s)
            }
            _ if c.is_alphanumeric() || c == '_' || c == '-' || c == '.' => {
                let mut s = String::new();
                while let Some(&(_, ch)) = chars.peek() {
                    if ch.is_alphanumeric() || ch == '_' || ch == '-' || ch == '.' {
                        s.push(ch);
                        chars.next();
                    } else {
                        break;
                    }
                }
                Tok::Word(s)
            }
            _ => {
                return Err(FilterError {
                    at,
                    message: format!("unexpected character {c:?}"),
                })
            }
        };
        out.push((at, tok));
    }
    Ok(out)
}

/// Consumes `c` or `c=`; `with_eq` is the operator for the two-char form.
fn operator(
    chars: &mut std::iter::Peekable<std::str::CharIndices<'_>>,
    at: usize,
    with_eq: CmpOp,
    alone: Option<CmpOp>,
) -> Result<Tok, FilterError> {
    let (_, c) = chars.next().expect("peeked");
    if chars.peek().map(|&(_, n)| n) == Some('=') {
        chars.next();
        return Ok(Tok::Op(with_eq));
    }
    alone.map(Tok::Op).ok_or_else(|| FilterError {
        at,
        message: format!("expected `{c}=`"),
    })
}

struct Parser {
    tokens: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn at(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(a, _)| *a)
    }

    fn error(&self, message: impl Into<String>) -> FilterError {
        FilterError {
            at: self.at(),
            message: message.into(),
        }
    }

    fn keyword(&mut self, kw: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Word(w)) if w.eq_ignore_ascii_case(kw)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn or(&mut self) -> Result<Expr, FilterError> {
        let mut lhs = self.and()?;
        while self.keyword("or") {
            lhs = Expr::Or(Box::new(lhs), Box::new(self.and()?));
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Expr, FilterError> {
        let mut lhs = self.unary()?;
        while self.keyword("and") {
            lhs = Expr::And(Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, FilterError> {
        if self.keyword("not") {
            return Ok(Expr::Not(Box::new(self.unary()?)));
        }
        if self.peek() == Some(&Tok::Open) {
            self.pos += 1;
            let inner = self.or()?;
            if self.peek() != Some(&Tok::Close) {
                return Err(self.error("expected `)`"));
            }
            self.pos += 1;
            return Ok(inner);
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr, FilterError> {
        let name = match self.peek() {
            Some(Tok::Word(w)) => w.to_ascii_lowercase(),
            _ => return Err(self.error("expected a column name or label test")),
        };
        let name_at = self.at();
        self.pos += 1;
        if name == "label" && self.peek() == Some(&Tok::Colon) {
            self.pos += 1;
            let scheme = match self.peek() {
                Some(Tok::Word(w)) => SCHEMES
                    .iter()
                    .find(|s| s.eq_ignore_ascii_case(w))
                    .copied()
                    .ok_or_else(|| self.error(format!("unknown label scheme `{w}`")))?,
                _ => return Err(self.error("expected a label scheme")),
            };
            self.pos += 1;
            let negated = match self.peek() {
                Some(Tok::Op(CmpOp::Eq)) => false,
                Some(Tok::Op(CmpOp::Ne)) => true,
                _ => return Err(self.error("label tests support only = and !=")),
            };
            self.pos += 1;
            let label = self.value_text()?;
            return Ok(Expr::Label { scheme, label, negated });
        }
        let column = COLUMNS
            .iter()
            .find(|c| **c == name)
            .copied()
            .ok_or_else(|| FilterError {
                at: name_at,
                message: format!("unknown column `{name}`"),
            })?;
        let op = match self.peek() {
            Some(Tok::Op(op)) => *op,
            _ => return Err(self.error("expected a comparison operator")),
        };
        self.pos += 1;
        let value = match self.tokens.get(self.pos).map(|(_, t)| t.clone()) {
            Some(Tok::Quoted(s)) => Literal::Text(s),
            Some(Tok::Word(w)) => match w.parse::<i64>() {
                Ok(i) => Literal::Int(i),
                Err(_) if matches!(w.as_str(), "true" | "false") => Literal::Int((w == "true") as i64),
                Err(_) => Literal::Text(w),
            },
            _ => return Err(self.error("expected a value")),
        };
        self.pos += 1;
        Ok(Expr::Cmp { column, op, value })
    }

    fn value_text(&mut self) -> Result<String, FilterError> {
        let mut text = match self.peek() {
            Some(Tok::Word(w)) | Some(Tok::Quoted(w)) => w.clone(),
            _ => return Err(self.error("expected a label value")),
        };
        self.pos += 1;
        // Taxonomy labels are `operation:target`.
        while self.peek() == Some(&Tok::Colon) {
            self.pos += 1;
            match self.peek() {
                Some(Tok::Word(w)) | Some(Tok::Quoted(w)) => {
                    text.push(':');
                    text.push_str(w);
                    self.pos += 1;
                }
                _ => return Err(self.error("expected a label value after `:`")),
            }
        }
        Ok(text)
    }
}
