use super::ast::Pos;
use super::QueryError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    LParen,
    RParen,
    LBracket,
    RBracket,
    Colon,
    Comma,
    Dot,
    Dash,
    Star,
    Lt,
    Le,
    Eq,
    Ne,
    Ge,
    Gt,
    Ident(String),
    /// backquoted; never a keyword
    QuotedIdent(String),
    /// unsigned; a leading minus is a separate [`Tok::Dash`]
    Int(u64),
    Float(f64),
    Str(String),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBracket => "'['".into(),
            Tok::RBracket => "']'".into(),
            Tok::Colon => "':'".into(),
            Tok::Comma => "','".into(),
            Tok::Dot => "'.'".into(),
            Tok::Dash => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Lt => "'<'".into(),
            Tok::Le => "'<='".into(),
            Tok::Eq => "'='".into(),
            Tok::Ne => "'<>'".into(),
            Tok::Ge => "'>='".into(),
            Tok::Gt => "'>'".into(),
            Tok::Ident(s) | Tok::QuotedIdent(s) => format!("identifier {s:?}"),
            Tok::Int(v) => format!("integer {v}"),
            Tok::Float(v) => format!("number {v}"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub tok: Tok,
    pub pos: Pos,
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    src: &'a str,
    line: u32,
    col: u32,
}

impl Lexer<'_> {
    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn offset(&mut self) -> usize {
        self.chars.peek().map_or(self.src.len(), |&(i, _)| i)
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }
}

fn syntax(pos: Pos, message: impl Into<String>) -> QueryError {
    QueryError::Syntax {
        pos,
        message: message.into(),
    }
}

pub fn tokenize(src: &str) -> Result<Vec<Token>, QueryError> {
    let mut lx = Lexer {
        chars: src.char_indices().peekable(),
        src,
        line: 1,
        col: 1,
    };
    let mut out = Vec::new();
    loop {
        while lx.peek().is_some_and(char::is_whitespace) {
            lx.bump();
        }
        let pos = lx.pos();
        let Some(c) = lx.peek() else {
            out.push(Token { tok: Tok::Eof, pos });
            return Ok(out);
        };
        let tok = match c {
            '(' | ')' | '[' | ']' | ':' | ',' | '.' | '-' | '*' | '=' => {
                lx.bump();
                match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '[' => Tok::LBracket,
                    ']' => Tok::RBracket,
                    ':' => Tok::Colon,
                    ',' => Tok::Comma,
                    '.' => Tok::Dot,
                    '-' => Tok::Dash,
                    '*' => Tok::Star,
                    _ => Tok::Eq,
                }
            }
            '<' => {
                lx.bump();
                match lx.peek() {
                    Some('=') => {
                        lx.bump();
                        Tok::Le
                    }
                    Some('>') => {
                        lx.bump();
                        Tok::Ne
                    }
                    _ => Tok::Lt,
                }
            }
            '>' => {
                lx.bump();
                if lx.peek() == Some('=') {
                    lx.bump();
                    Tok::Ge
                } else {
                    Tok::Gt
                }
            }
            '\'' => {
                lx.bump();
                let mut s = String::new();
                loop {
                    match lx.bump() {
                        None => return Err(syntax(pos, "unterminated string literal")),
                        Some('\'') => break,
                        Some('\\') => match lx.bump() {
                            Some(e @ ('\\' | '\'')) => s.push(e),
                            Some('n') => s.push('\n'),
                            Some('t') => s.push('\t'),
                            _ => return Err(syntax(lx.pos(), "invalid escape in string literal")),
                        },
                        Some(ch) => s.push(ch),
                    }
                }
                Tok::Str(s)
            }
            c if c.is_ascii_digit() => {
                let start = lx.offset();
                let mut is_float = false;
                while lx.peek().is_some_and(|c| c.is_ascii_digit()) {
                    lx.bump();
                }
                if lx.peek() == Some('.') {
                    // a fraction needs a digit right after the dot
                    let mut ahead = lx.chars.clone();
                    ahead.next();
                    if ahead.peek().is_some_and(|&(_, c)| c.is_ascii_digit()) {
                        is_float = true;
                        lx.bump();
                        while lx.peek().is_some_and(|c| c.is_ascii_digit()) {
                            lx.bump();
                        }
                    }
                }
                if matches!(lx.peek(), Some('e' | 'E')) {
                    is_float = true;
                    lx.bump();
                    if matches!(lx.peek(), Some('+' | '-')) {
                        lx.bump();
                    }
                    if !lx.peek().is_some_and(|c| c.is_ascii_digit()) {
                        return Err(syntax(lx.pos(), "expected exponent digits"));
                    }
                    while lx.peek().is_some_and(|c| c.is_ascii_digit()) {
                        lx.bump();
                    }
                }
                let end = lx.offset();
                let text = &src[start..end];
                if lx.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
                    return Err(syntax(lx.pos(), format!("unexpected character after number {text}")));
                }
                if is_float {
                    match text.parse::<f64>() {
                        Ok(v) if v.is_finite() => Tok::Float(v),
                        _ => return Err(syntax(pos, format!("number {text} out of range"))),
                    }
                } else {
                    match text.parse::<u64>() {
                        Ok(v) => Tok::Int(v),
                        Err(_) => return Err(syntax(pos, format!("integer {text} out of range"))),
                    }
                }
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = lx.offset();
                while lx.peek().is_some_and(|c| c.is_alphanumeric() || c == '_') {
                    lx.bump();
                }
                let end = lx.offset();
                Tok::Ident(src[start..end].to_owned())
            }
            '`' => {
                lx.bump();
                let mut s = String::new();
                loop {
                    match lx.bump() {
                        None => return Err(syntax(pos, "unterminated quoted identifier")),
                        Some('`') => break,
                        Some(ch) => s.push(ch),
                    }
                }
                if s.is_empty() {
                    return Err(syntax(pos, "empty quoted identifier"));
                }
                Tok::QuotedIdent(s)
            }
            other => return Err(syntax(pos, format!("unexpected character {other:?}"))),
        };
        out.push(Token { tok, pos });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn operators_and_arrows() {
        assert_eq!(
            toks("(a)<-[e:F]-(b) <= <> >= 1.5 2 'x\\'y'"),
            vec![
                Tok::LParen,
                Tok::Ident("a".into()),
                Tok::RParen,
                Tok::Lt,
                Tok::Dash,
                Tok::LBracket,
                Tok::Ident("e".into()),
                Tok::Colon,
                Tok::Ident("F".into()),
                Tok::RBracket,
                Tok::Dash,
                Tok::LParen,
                Tok::Ident("b".into()),
                Tok::RParen,
                Tok::Le,
                Tok::Ne,
                Tok::Ge,
                Tok::Float(1.5),
                Tok::Int(2),
                Tok::Str("x'y".into()),
                Tok::Eof
            ]
        );
    }

    #[test]
    fn positions() {
        let t = tokenize("MATCH\n  (a)").unwrap();
        assert_eq!(t[1].pos, Pos { line: 2, col: 3 });
    }

    #[test]
    fn errors_carry_positions() {
        match tokenize("MATCH (a) WHERE a.x = 'oops") {
            Err(QueryError::Syntax { pos, .. }) => assert_eq!(pos, Pos { line: 1, col: 23 }),
            other => panic!("{other:?}"),
        }
        assert!(tokenize("1e999").is_err());
        assert!(tokenize("12abc").is_err());
        assert!(tokenize("a # b").is_err());
    }
}
