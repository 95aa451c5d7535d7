use crate::diagnostic::{Code, Report, Span};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Num(u64),
    /// Punctuation, with Unicode spellings folded to their ASCII form.
    Sym(&'static str),
    Eof,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: Span,
}

// Longest first, so prefixes never shadow longer symbols.
const SYMBOLS: &[(&str, &str)] = &[
    (":=", ":="),
    ("->", "->"),
    ("→", "->"),
    ("=>", "=>"),
    ("⇒", "=>"),
    ("<=", "<="),
    ("≤", "<="),
    ("/\\", "/\\"),
    ("∧", "/\\"),
    ("\\/", "\\/"),
    ("∨", "\\/"),
    ("<|", "<|"),
    ("◁", "<|"),
    ("|>", "|>"),
    ("▷", "|>"),
    ("⟨", "<"),
    ("⟩", ">"),
    ("×", "*"),
    ("·", "#"),
    ("∘", "."),
    ("λ", "\\"),
    ("(", "("),
    (")", ")"),
    ("{", "{"),
    ("}", "}"),
    (",", ","),
    (":", ":"),
    (";", ";"),
    (".", "."),
    ("=", "="),
    ("*", "*"),
    ("#", "#"),
    ("^", "^"),
    ("@", "@"),
    ("<", "<"),
    (">", ">"),
    ("|", "|"),
    ("\\", "\\"),
    ("_", "_"),
];

fn ident_start(c: char) -> bool {
    (c.is_alphabetic() || c == '_') && c != 'λ'
}

fn ident_continue(c: char) -> bool {
    (c.is_alphanumeric() || c == '_' || c == '\'' || c == '₀' || c == '₁') && c != 'λ'
}

pub fn lex(src: &str) -> Result<Vec<Token>, Report> {
    let mut out = Vec::new();
    let mut pos = 0;
    let bytes = src.as_bytes();
    while pos < src.len() {
        let rest = &src[pos..];
        let c = rest.chars().next().unwrap();
        if c.is_whitespace() {
            pos += c.len_utf8();
            continue;
        }
        if rest.starts_with("--") {
            pos += rest.find('\n').unwrap_or(rest.len());
            continue;
        }
        if c.is_ascii_digit() {
            let len = rest.bytes().take_while(u8::is_ascii_digit).count();
            let text = &rest[..len];
            let n = text.parse::<u64>().map_err(|_| {
                Report::new(Code::Parse, Span::new(pos, pos + len), "numeral out of range")
            })?;
            out.push(Token {
                tok: Tok::Num(n),
                span: Span::new(pos, pos + len),
            });
            pos += len;
            continue;
        }
        if ident_start(c) && !(c == '_' && !rest[1..].starts_with(ident_continue)) {
            let mut len = 0;
            let mut chars = rest.char_indices().peekable();
            while let Some((i, ch)) = chars.next() {
                let ok = if i == 0 {
                    true
                } else if ch == '-' {
                    // kebab-case names: `fail-check`, `E-2CELL-BOUNDARY`
                    matches!(chars.peek(), Some((_, n)) if n.is_alphanumeric())
                        && bytes.get(pos + i - 1) != Some(&b'-')
                } else {
                    ident_continue(ch)
                };
                if !ok {
                    break;
                }
                len = i + ch.len_utf8();
            }
            out.push(Token {
                tok: Tok::Ident(rest[..len].to_string()),
                span: Span::new(pos, pos + len),
            });
            pos += len;
            continue;
        }
        if let Some((text, sym)) = SYMBOLS.iter().find(|(t, _)| rest.starts_with(t)) {
            out.push(Token {
                tok: Tok::Sym(sym),
                span: Span::new(pos, pos + text.len()),
            });
            pos += text.len();
            continue;
        }
        return Err(Report::new(
            Code::Parse,
            Span::new(pos, pos + c.len_utf8()),
            format!("unexpected character {c:?}"),
        ));
    }
    out.push(Token {
        tok: Tok::Eof,
        span: Span::new(src.len(), src.len()),
    });
    Ok(out)
}
