use super::Language;

#[derive(Clone, Copy, PartialEq, Eq)]
enum State {
    Code,
    LineComment,
    BlockComment,
    Quoted(char),
    TextBlock,
}

/// Blanks out `//` and `/* */` comments, keeping line breaks so line numbers
/// survive. String and character literals are left untouched, including any
/// comment-like text inside them.
pub fn strip_comments_linewise(source: &str, language: Language) -> String {
    let chars: Vec<char> = source.chars().collect();
    let mut out = String::with_capacity(source.len());
    let mut state = State::Code;
    let mut i = 0;

    while i < chars.len() {
        let c = chars[i];
        let next = chars.get(i + 1).copied();
        match state {
            State::Code => match (c, next) {
                ('/', Some('/')) => {
                    state = State::LineComment;
                    out.push_str("  ");
                    i += 2;
                    continue;
                }
                ('/', Some('*')) => {
                    state = State::BlockComment;
                    out.push_str("  ");
                    i += 2;
                    continue;
                }
                ('"', _) if language == Language::Java && next == Some('"') && chars.get(i + 2) == Some(&'"') => {
                    state = State::TextBlock;
                    out.push_str("\"\"\"");
                    i += 3;
                    continue;
                }
                ('"', _) | ('\'', _) => {
                    state = State::Quoted(c);
                    out.push(c);
                }
                _ => out.push(c),
            },
            State::LineComment => {
                if c == '\n' {
                    state = State::Code;
                    out.push('\n');
                } else if c == '\r' {
                    out.push('\r');
                } else {
                    out.push(' ');
                }
            }
            State::BlockComment => {
                if c == '*' && next == Some('/') {
                    state = State::Code;
                    out.push_str("  ");
                    i += 2;
                    continue;
                }
                out.push(if c == '\n' || c == '\r' { c } else { ' ' });
            }
            State::Quoted(quote) => {
                out.push(c);
                if c == '\\' {
                    if let Some(n) = next {
                        out.push(n);
                        i += 2;
                        continue;
                    }
                } else if c == quote || c == '\n' {
                    state = State::Code;
                }
            }
            State::TextBlock => {
                out.push(c);
                if c == '\\' {
                    if let Some(n) = next {
                        out.push(n);
                        i += 2;
                        continue;
                    }
                } else if c == '"' && next == Some('"') && chars.get(i + 2) == Some(&'"') {
                    out.push_str("\"\"");
                    state = State::Code;
                    i += 3;
                    continue;
                }
            }
        }
        i += 1;
    }
    out
}
