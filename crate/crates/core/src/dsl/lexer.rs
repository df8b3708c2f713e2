use super::{ParseDiagnostic, SourceSpan};

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    IriRef(String),
    Str(String),
    Int(i64),
    Double(f64),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Dot,
    Colon,
    Bang,
    Assign,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::IriRef(s) => format!("`<{s}>`"),
            Tok::Str(_) => "string literal".into(),
            Tok::Int(_) | Tok::Double(_) => "number".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Assign => "`=`".into(),
            Tok::EqEq => "`==`".into(),
            Tok::NotEq => "`!=`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Ge => "`>=`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub start: usize,
    pub end: usize,
}

pub(crate) fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

pub(crate) fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '-'
}

pub(crate) fn tokenize(src: &str) -> Result<Vec<Token>, ParseDiagnostic> {
    Lexer { src, pos: 0 }.run()
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl Lexer<'_> {
    fn peek(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn peek_at(&self, n: usize) -> Option<char> {
        self.src[self.pos..].chars().nth(n)
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn error(&self, start: usize, message: impl Into<String>) -> ParseDiagnostic {
        let end = self.pos.max(start).min(self.src.len());
        ParseDiagnostic::error(message, SourceSpan::new(self.src, start, end))
    }

    fn run(mut self) -> Result<Vec<Token>, ParseDiagnostic> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia();
            let start = self.pos;
            let Some(c) = self.peek() else {
                out.push(Token {
                    tok: Tok::Eof,
                    start,
                    end: start,
                });
                return Ok(out);
            };
            let tok = match c {
                '{' => self.single(Tok::LBrace),
                '}' => self.single(Tok::RBrace),
                '(' => self.single(Tok::LParen),
                ')' => self.single(Tok::RParen),
                ',' => self.single(Tok::Comma),
                '.' => self.single(Tok::Dot),
                ':' => self.single(Tok::Colon),
                '!' if self.peek_at(1) == Some('=') => self.double(Tok::NotEq),
                '!' => self.single(Tok::Bang),
                '=' if self.peek_at(1) == Some('=') => self.double(Tok::EqEq),
                '=' => self.single(Tok::Assign),
                '>' if self.peek_at(1) == Some('=') => self.double(Tok::Ge),
                '>' => self.single(Tok::Gt),
                '<' if self.peek_at(1) == Some('=') => self.double(Tok::Le),
                '<' => match self.iri_ref() {
                    Some(iri) => Tok::IriRef(iri),
                    None => self.single(Tok::Lt),
                },
                '"' => Tok::Str(self.string()?),
                '-' if self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) => self.number()?,
                c if c.is_ascii_digit() => self.number()?,
                c if is_ident_start(c) => {
                    while self.peek().is_some_and(is_ident_continue) {
                        self.bump();
                    }
                    Tok::Ident(self.src[start..self.pos].to_string())
                }
                other => {
                    self.bump();
                    return Err(self.error(start, format!("unexpected character {other:?}")));
                }
            };
            out.push(Token {
                tok,
                start,
                end: self.pos,
            });
        }
    }

    fn single(&mut self, tok: Tok) -> Tok {
        self.bump();
        tok
    }

    fn double(&mut self, tok: Tok) -> Tok {
        self.bump();
        self.bump();
        tok
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('/') if self.peek_at(1) == Some('/') => {
                    while self.peek().is_some_and(|c| c != '\n') {
                        self.bump();
                    }
                }
                _ => return,
            }
        }
    }

    /// `<scheme:rest>` with no whitespace; anything else leaves `<` as an
    /// operator.
    fn iri_ref(&mut self) -> Option<String> {
        let rest = &self.src[self.pos + 1..];
        let close = rest.find(|c: char| c == '>' || c.is_whitespace() || c == '<' || c == '"')?;
        if !rest[close..].starts_with('>') {
            return None;
        }
        let body = &rest[..close];
        let (scheme, tail) = body.split_once(':')?;
        let scheme_ok = scheme.starts_with(|c: char| c.is_ascii_alphabetic())
            && scheme
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'));
        if !scheme_ok || tail.is_empty() {
            return None;
        }
        let body = body.to_string();
        self.pos += close + 2;
        Some(body)
    }

    fn string(&mut self) -> Result<String, ParseDiagnostic> {
        let start = self.pos;
        self.bump();
        let mut out = String::new();
        loop {
            match self.bump() {
                None => return Err(self.error(start, "unterminated string literal")),
                Some('"') => return Ok(out),
                Some('\\') => {
                    let esc = self.pos;
                    match self.bump() {
                        Some('"') => out.push('"'),
                        Some('\\') => out.push('\\'),
                        Some('n') => out.push('\n'),
                        Some('t') => out.push('\t'),
                        Some('r') => out.push('\r'),
                        Some('u') => out.push(self.unicode_escape(esc)?),
                        _ => return Err(self.error(esc - 1, "unknown escape sequence")),
                    }
                }
                Some(c) => out.push(c),
            }
        }
    }

    fn unicode_escape(&mut self, start: usize) -> Result<char, ParseDiagnostic> {
        if self.bump() != Some('{') {
            return Err(self.error(start, "expected `{` after `\\u`"));
        }
        let digits_start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_hexdigit()) {
            self.bump();
        }
        let digits = &self.src[digits_start..self.pos];
        if self.bump() != Some('}') || digits.is_empty() || digits.len() > 6 {
            return Err(self.error(start, "malformed unicode escape"));
        }
        u32::from_str_radix(digits, 16)
            .ok()
            .and_then(char::from_u32)
            .ok_or_else(|| self.error(start, "invalid unicode scalar value"))
    }

    fn number(&mut self) -> Result<Tok, ParseDiagnostic> {
        let start = self.pos;
        if self.peek() == Some('-') {
            self.bump();
        }
        let digits = |l: &mut Self| {
            while l.peek().is_some_and(|c| c.is_ascii_digit()) {
                l.bump();
            }
        };
        digits(self);
        let mut is_double = false;
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            is_double = true;
            self.bump();
            digits(self);
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            let sign = matches!(self.peek_at(1), Some('+' | '-'));
            let digit_at = if sign { 2 } else { 1 };
            if self.peek_at(digit_at).is_some_and(|c| c.is_ascii_digit()) {
                is_double = true;
                self.bump();
                if sign {
                    self.bump();
                }
                digits(self);
            }
        }
        let text = &self.src[start..self.pos];
        if is_double {
            match text.parse::<f64>() {
                Ok(d) if d.is_finite() => Ok(Tok::Double(d)),
                _ => Err(self.error(start, format!("number `{text}` is out of range"))),
            }
        } else {
            text.parse::<i64>()
                .map(Tok::Int)
                .map_err(|_| self.error(start, format!("integer `{text}` is out of range")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Tok> {
        tokenize(src).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn distinguishes_iri_refs_from_less_than() {
        assert_eq!(toks("<urn:a:b>"), vec![Tok::IriRef("urn:a:b".into()), Tok::Eof]);
        assert_eq!(
            toks("a < b"),
            vec![Tok::Ident("a".into()), Tok::Lt, Tok::Ident("b".into()), Tok::Eof]
        );
        assert_eq!(
            toks("<= >= != =="),
            vec![Tok::Le, Tok::Ge, Tok::NotEq, Tok::EqEq, Tok::Eof]
        );
    }

    #[test]
    fn numbers() {
        assert_eq!(
            toks("1 -2 1000.0 1e21 -0.5 2.5E-3"),
            vec![
                Tok::Int(1),
                Tok::Int(-2),
                Tok::Double(1000.0),
                Tok::Double(1e21),
                Tok::Double(-0.5),
                Tok::Double(2.5e-3),
                Tok::Eof
            ]
        );
        assert!(tokenize("99999999999999999999").is_err());
        assert!(tokenize("1e999").is_err());
    }

    #[test]
    fn strings_comments_and_errors() {
        assert_eq!(
            toks("\"a\\\"b\\u{41}\" // trailing\nx"),
            vec![Tok::Str("a\"bA".into()), Tok::Ident("x".into()), Tok::Eof]
        );
        assert!(tokenize("\"open").is_err());
        assert!(tokenize("#").is_err());
    }
}
