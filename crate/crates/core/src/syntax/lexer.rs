use num_bigint::BigUint;

use super::{ParseError, SourceSpan};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Nat(BigUint),
    Rat(BigUint, BigUint),
    Str(String),
    Backslash,
    Colon,
    Semi,
    Comma,
    Dot,
    Arrow,
    Wedge,
    LParen,
    RParen,
    LAngle,
    RAngle,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Tilde,
    Bar,
    BarBar,
    Bang,
    Question,
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Nat(n) => format!("`{n}`"),
            Tok::Rat(n, d) => format!("`{n}/{d}`"),
            Tok::Str(_) => "string literal".into(),
            Tok::Eof => "end of input".into(),
            other => format!("`{}`", other.symbol()),
        }
    }

    fn symbol(&self) -> &'static str {
        match self {
            Tok::Backslash => "\\",
            Tok::Colon => ":",
            Tok::Semi => ";",
            Tok::Comma => ",",
            Tok::Dot => ".",
            Tok::Arrow => "->",
            Tok::Wedge => "/\\",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::LAngle => "<",
            Tok::RAngle => ">",
            Tok::LBracket => "[",
            Tok::RBracket => "]",
            Tok::LBrace => "{",
            Tok::RBrace => "}",
            Tok::Tilde => "~",
            Tok::Bar => "|",
            Tok::BarBar => "||",
            Tok::Bang => "!",
            Tok::Question => "?",
            _ => "",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Token {
    pub tok: Tok,
    pub start: usize,
    pub end: usize,
}

pub struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '\''
}

impl<'a> Lexer<'a> {
    pub fn new(src: &'a str) -> Lexer<'a> {
        Lexer { src, pos: 0 }
    }

    fn peek_char(&self) -> Option<char> {
        self.src[self.pos..].chars().next()
    }

    fn rest(&self) -> &str {
        &self.src[self.pos..]
    }

    fn error(&self, start: usize, end: usize, msg: impl Into<String>) -> ParseError {
        ParseError::new(msg, SourceSpan::from_offsets(self.src, start, end))
    }

    fn skip_trivia(&mut self) {
        loop {
            let rest = self.rest();
            let trimmed = rest.trim_start();
            self.pos += rest.len() - trimmed.len();
            if self.rest().starts_with("--") {
                match self.rest().find('\n') {
                    Some(n) => self.pos += n,
                    None => self.pos = self.src.len(),
                }
            } else {
                break;
            }
        }
    }

    pub fn tokenize(mut self) -> Result<Vec<Token>, ParseError> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia();
            let start = self.pos;
            let Some(c) = self.peek_char() else {
                out.push(Token { tok: Tok::Eof, start, end: start });
                return Ok(out);
            };
            let tok = if is_ident_start(c) {
                let len = self.rest().find(|ch: char| !is_ident_char(ch)).unwrap_or(self.rest().len());
                let s = self.rest()[..len].to_string();
                self.pos += len;
                Tok::Ident(s)
            } else if c.is_ascii_digit() {
                self.number(start)?
            } else if c == '"' {
                self.string(start)?
            } else {
                let two = self.rest().get(..2).unwrap_or("");
                let (tok, len) = match two {
                    "->" => (Tok::Arrow, 2),
                    "/\\" => (Tok::Wedge, 2),
                    "||" => (Tok::BarBar, 2),
                    _ => match c {
                        '\\' => (Tok::Backslash, 1),
                        ':' => (Tok::Colon, 1),
                        ';' => (Tok::Semi, 1),
                        ',' => (Tok::Comma, 1),
                        '.' => (Tok::Dot, 1),
                        '(' => (Tok::LParen, 1),
                        ')' => (Tok::RParen, 1),
                        '<' => (Tok::LAngle, 1),
                        '>' => (Tok::RAngle, 1),
                        '[' => (Tok::LBracket, 1),
                        ']' => (Tok::RBracket, 1),
                        '{' => (Tok::LBrace, 1),
                        '}' => (Tok::RBrace, 1),
                        '~' => (Tok::Tilde, 1),
                        '|' => (Tok::Bar, 1),
                        '!' => (Tok::Bang, 1),
                        '?' => (Tok::Question, 1),
                        _ => {
                            let end = start + c.len_utf8();
                            return Err(self.error(start, end, format!("unexpected character {c:?}")));
                        }
                    },
                };
                self.pos += len;
                tok
            };
            out.push(Token { tok, start, end: self.pos });
        }
    }

    fn digits(&mut self) -> BigUint {
        let len = self.rest().find(|ch: char| !ch.is_ascii_digit()).unwrap_or(self.rest().len());
        let n = self.rest()[..len].parse().expect("digits");
        self.pos += len;
        n
    }

    fn number(&mut self, start: usize) -> Result<Tok, ParseError> {
        let n = self.digits();
        let mut chars = self.rest().chars();
        if chars.next() == Some('/') && chars.next().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
            let d = self.digits();
            if d == BigUint::from(0u8) {
                return Err(self.error(start, self.pos, "zero denominator"));
            }
            return Ok(Tok::Rat(n, d));
        }
        Ok(Tok::Nat(n))
    }

    fn string(&mut self, start: usize) -> Result<Tok, ParseError> {
        self.pos += 1;
        let mut s = String::new();
        loop {
            let Some(c) = self.peek_char() else {
                return Err(self.error(start, self.pos, "unterminated string"));
            };
            self.pos += c.len_utf8();
            match c {
                '"' => return Ok(Tok::Str(s)),
                '\\' => {
                    let Some(e) = self.peek_char() else {
                        return Err(self.error(start, self.pos, "unterminated string"));
                    };
                    self.pos += e.len_utf8();
                    match e {
                        'n' => s.push('\n'),
                        '"' => s.push('"'),
                        '\\' => s.push('\\'),
                        _ => return Err(self.error(self.pos - 2, self.pos, format!("unknown escape \\{e}"))),
                    }
                }
                c => s.push(c),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        Lexer::new(s).tokenize().unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn symbols_and_comments() {
        assert_eq!(
            toks("a! x' -- note\n|| <1, 3/4>.0"),
            vec![
                Tok::Ident("a".into()),
                Tok::Bang,
                Tok::Ident("x'".into()),
                Tok::BarBar,
                Tok::LAngle,
                Tok::Nat(1u8.into()),
                Tok::Comma,
                Tok::Rat(3u8.into(), 4u8.into()),
                Tok::RAngle,
                Tok::Dot,
                Tok::Nat(0u8.into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn types_and_strings() {
        assert_eq!(
            toks(r#"A -> B /\ C "x\"y""#),
            vec![
                Tok::Ident("A".into()),
                Tok::Arrow,
                Tok::Ident("B".into()),
                Tok::Wedge,
                Tok::Ident("C".into()),
                Tok::Str("x\"y".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn bad_character_has_span() {
        let err = Lexer::new("x $").tokenize().unwrap_err();
        assert_eq!(err.span.start, 2);
        assert_eq!(err.span.column, 3);
    }
}
