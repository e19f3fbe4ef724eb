use super::Language;

const C_SPECIFIERS: &[&str] = &[
    "static", "extern", "register", "auto", "inline", "const", "volatile", "restrict",
];

const JAVA_SPECIFIERS: &[&str] = &[
    "public",
    "private",
    "protected",
    "static",
    "final",
    "abstract",
    "synchronized",
    "native",
    "transient",
    "volatile",
    "strictfp",
];

const C_TYPE_KEYWORDS: &[&str] = &[
    "void", "char", "short", "int", "long", "float", "double", "signed", "unsigned", "_Bool", "bool", "_Complex",
    "struct", "union", "enum", "typedef",
];

const JAVA_TYPE_KEYWORDS: &[&str] = &[
    "void",
    "boolean",
    "byte",
    "char",
    "short",
    "int",
    "long",
    "float",
    "double",
    "class",
    "interface",
    "enum",
    "var",
];

const LITERAL_KEYWORDS: &[&str] = &["true", "false", "null"];

/// Keywords that alter control flow; their token type is `name`.
pub const CONTROL_FLOW: &[&str] = &[
    "if", "else", "for", "while", "do", "switch", "case", "default", "break", "continue", "return", "goto",
];

const C_OTHER_KEYWORDS: &[&str] = &["sizeof", "_Alignof", "_Static_assert", "_Generic"];

const JAVA_OTHER_KEYWORDS: &[&str] = &[
    "new",
    "this",
    "super",
    "throw",
    "throws",
    "try",
    "catch",
    "finally",
    "import",
    "package",
    "extends",
    "implements",
    "instanceof",
    "assert",
];

pub fn is_specifier(word: &str, language: Language) -> bool {
    match language {
        Language::C => C_SPECIFIERS.contains(&word),
        Language::Java => JAVA_SPECIFIERS.contains(&word),
    }
}

pub fn is_literal_keyword(word: &str) -> bool {
    LITERAL_KEYWORDS.contains(&word)
}

/// Built-in type keywords plus the aggregate introducers (`struct`, `class`, ...).
pub fn is_type_keyword(word: &str, language: Language) -> bool {
    match language {
        Language::C => C_TYPE_KEYWORDS.contains(&word),
        Language::Java => JAVA_TYPE_KEYWORDS.contains(&word),
    }
}

/// Type keyword of either language. Used where the language of a lexeme is
/// no longer known (classification over stored diffs).
pub fn is_any_type_keyword(word: &str) -> bool {
    C_TYPE_KEYWORDS.contains(&word) || JAVA_TYPE_KEYWORDS.contains(&word)
}

pub fn is_control_flow(word: &str) -> bool {
    CONTROL_FLOW.contains(&word)
}

pub fn is_keyword(word: &str, language: Language) -> bool {
    is_specifier(word, language)
        || is_type_keyword(word, language)
        || is_literal_keyword(word)
        || is_control_flow(word)
        || match language {
            Language::C => C_OTHER_KEYWORDS.contains(&word),
            Language::Java => JAVA_OTHER_KEYWORDS.contains(&word),
        }
}

/// Any keyword of either language.
pub fn is_any_keyword(word: &str) -> bool {
    is_keyword(word, Language::C) || is_keyword(word, Language::Java)
}

/// Heuristic for names that denote types: built-in type keywords and the
/// C convention of a `_t` suffix (`size_t`, `vm_fault_t`, `u32_t`).
pub fn looks_like_type_name(word: &str) -> bool {
    is_any_type_keyword(word) || (word.len() > 2 && word.ends_with("_t"))
}
