use super::diag::{Diagnostic, Pos};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Var(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Semi,
    Colon,
    Dot,
    At,
    Amp,
    Pipe,
    Bang,
    Arrow,
    MapsTo,
    LeadsTo,
    Subsumed,
    Inverse,
    Slash,
    Diamond,
    Box,
    Newline,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Var(s) => format!("`?{s}`"),
            Tok::Newline => "end of line".into(),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::Comma => ",",
            Tok::Semi => ";",
            Tok::Colon => ":",
            Tok::Dot => ".",
            Tok::At => "@",
            Tok::Amp => "&",
            Tok::Pipe => "|",
            Tok::Bang => "!",
            Tok::Arrow => "->",
            Tok::MapsTo => "|->",
            Tok::LeadsTo => "~>",
            Tok::Subsumed => "[=",
            Tok::Inverse => "^-",
            Tok::Slash => "/",
            Tok::Diamond => "<->",
            Tok::Box => "[-]",
            _ => "?",
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

fn is_ident_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Tokenizes `src`. Line breaks become `Newline` tokens unless they occur
/// inside parentheses or square brackets. Comments start with `#` or `//`.
pub fn lex(src: &str) -> Result<Vec<Token>, Diagnostic> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    let mut depth: i64 = 0;
    macro_rules! advance {
        ($n:expr) => {{
            for _ in 0..$n {
                if chars[i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                i += 1;
            }
        }};
    }
    let at = |i: usize, s: &str| -> bool {
        s.chars()
            .enumerate()
            .all(|(k, c)| chars.get(i + k) == Some(&c))
    };
    while i < chars.len() {
        let c = chars[i];
        let pos = Pos::new(line, col);
        if c == '\n' {
            if depth <= 0
                && !matches!(
                    out.last(),
                    Some(Token {
                        tok: Tok::Newline,
                        ..
                    }) | None
                )
            {
                out.push(Token {
                    tok: Tok::Newline,
                    pos,
                });
            }
            advance!(1);
            continue;
        }
        if c.is_whitespace() {
            advance!(1);
            continue;
        }
        if c == '#' || at(i, "//") {
            while i < chars.len() && chars[i] != '\n' {
                advance!(1);
            }
            continue;
        }
        if c == '?' {
            let start = i + 1;
            let mut j = start;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            if j == start {
                return Err(Diagnostic::error(pos, "expected a variable name after `?`"));
            }
            let name: String = chars[start..j].iter().collect();
            advance!(j - i);
            out.push(Token {
                tok: Tok::Var(name),
                pos,
            });
            continue;
        }
        if is_ident_char(c) {
            let mut j = i;
            while j < chars.len() && is_ident_char(chars[j]) {
                j += 1;
            }
            let mut name: String = chars[i..j].iter().collect();
            // hyphenated section keywords
            for (head, tail) in [("context", "-rules"), ("init", "-context")] {
                if name == head && at(j, tail) {
                    name.push_str(tail);
                    j += tail.chars().count();
                }
            }
            advance!(j - i);
            out.push(Token {
                tok: Tok::Ident(name),
                pos,
            });
            continue;
        }
        let (tok, len) = if at(i, "|->") {
            (Tok::MapsTo, 3)
        } else if at(i, "<->") {
            (Tok::Diamond, 3)
        } else if at(i, "[-]") {
            (Tok::Box, 3)
        } else if at(i, "⟨-⟩") {
            (Tok::Diamond, 3)
        } else if at(i, "[=") {
            (Tok::Subsumed, 2)
        } else if at(i, "->") {
            (Tok::Arrow, 2)
        } else if at(i, "~>") {
            (Tok::LeadsTo, 2)
        } else if at(i, "^-") {
            (Tok::Inverse, 2)
        } else {
            let t = match c {
                '{' => Tok::LBrace,
                '}' => Tok::RBrace,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                ',' => Tok::Comma,
                ';' => Tok::Semi,
                ':' => Tok::Colon,
                '.' => Tok::Dot,
                '@' => Tok::At,
                '&' | '∧' => Tok::Amp,
                '|' | '∨' => Tok::Pipe,
                '!' | '¬' => Tok::Bang,
                '→' => Tok::Arrow,
                '↦' => Tok::MapsTo,
                '⤳' => Tok::LeadsTo,
                '⊑' => Tok::Subsumed,
                '⁻' => Tok::Inverse,
                '/' => Tok::Slash,
                '∃' => Tok::Ident("exists".into()),
                '∀' => Tok::Ident("forall".into()),
                'μ' => Tok::Ident("mu".into()),
                'ν' => Tok::Ident("nu".into()),
                other => {
                    return Err(Diagnostic::error(
                        pos,
                        format!("unexpected character `{}`", other.escape_default()),
                    ))
                }
            };
            (t, 1)
        };
        match tok {
            Tok::LParen | Tok::LBracket => depth += 1,
            Tok::RParen | Tok::RBracket => depth -= 1,
            _ => {}
        }
        advance!(len);
        out.push(Token { tok, pos });
    }
    out.push(Token {
        tok: Tok::Eof,
        pos: Pos::new(line, col),
    });
    Ok(out)
}
