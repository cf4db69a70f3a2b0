use crate::error::{Error, Result};

/// Section keywords. A bare word spelled like one of these at the start of a
/// line opens a section; names spelled this way are always quoted on output.
pub(crate) const KEYWORDS: &[&str] = &[
    "TYPE",
    "OBJECT",
    "ATTRIBUTE",
    "INCIDENCE",
    "GENERATOR:",
    "SUCCESSOR",
    "LAYOUT",
    "INTENT",
    "EXTENT",
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum TokenKind {
    Word { text: String, quoted: bool },
    Open,
    Close,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Token {
    pub kind: TokenKind,
    pub line: usize,
    pub column: usize,
    pub line_start: bool,
}

impl Token {
    pub fn keyword(&self) -> Option<&str> {
        match &self.kind {
            TokenKind::Word { text, quoted: false } if self.line_start && KEYWORDS.contains(&text.as_str()) => {
                Some(text)
            }
            _ => None,
        }
    }

    pub fn word(&self) -> Option<&str> {
        match &self.kind {
            TokenKind::Word { text, .. } => Some(text),
            _ => None,
        }
    }
}

fn is_bare_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '.' | '_' | '/' | ':' | '#' | '-' | '=' | '<' | '>')
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    for (line_no, line) in text.lines().enumerate() {
        let line_no = line_no + 1;
        let mut chars = line.char_indices().peekable();
        let mut line_start = true;
        while let Some(&(offset, c)) = chars.peek() {
            let column = line[..offset].chars().count() + 1;
            if c.is_whitespace() {
                chars.next();
                continue;
            }
            if c == '#' && line_start {
                break;
            }
            let kind = match c {
                '{' => {
                    chars.next();
                    TokenKind::Open
                }
                '}' => {
                    chars.next();
                    TokenKind::Close
                }
                '"' => {
                    chars.next();
                    let mut text = String::new();
                    let mut closed = false;
                    while let Some((_, c)) = chars.next() {
                        match c {
                            '"' => {
                                closed = true;
                                break;
                            }
                            '\\' => match chars.next() {
                                Some((_, '"')) => text.push('"'),
                                Some((_, '\\')) => text.push('\\'),
                                Some((_, 'n')) => text.push('\n'),
                                Some((_, 't')) => text.push('\t'),
                                Some((o, other)) => {
                                    let col = line[..o].chars().count() + 1;
                                    return Err(Error::syntax(line_no, col, format!("unknown escape `\\{other}`")));
                                }
                                None => break,
                            },
                            other => text.push(other),
                        }
                    }
                    if !closed {
                        return Err(Error::syntax(line_no, column, "unterminated quoted name"));
                    }
                    TokenKind::Word { text, quoted: true }
                }
                c if is_bare_char(c) => {
                    let mut text = String::new();
                    while let Some(&(_, c)) = chars.peek() {
                        if !is_bare_char(c) {
                            break;
                        }
                        text.push(c);
                        chars.next();
                    }
                    TokenKind::Word { text, quoted: false }
                }
                other => {
                    return Err(Error::syntax(
                        line_no,
                        column,
                        format!("unexpected character `{other}`"),
                    ));
                }
            };
            tokens.push(Token {
                kind,
                line: line_no,
                column,
                line_start,
            });
            line_start = false;
        }
    }
    Ok(tokens)
}

/// Writes `name` bare when the lexer would read it back unchanged,
/// otherwise double-quoted with backslash escapes.
pub(crate) fn quote(name: &str) -> String {
    let bare =
        !name.is_empty() && name.chars().all(is_bare_char) && !name.starts_with('#') && !KEYWORDS.contains(&name);
    if bare {
        return name.to_owned();
    }
    let mut out = String::with_capacity(name.len() + 2);
    out.push('"');
    for c in name.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Appends `name { items }` (or `name { }`) and a newline.
pub(crate) fn write_entry<I, S>(out: &mut String, name: &str, items: I)
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    out.push_str(&quote(name));
    out.push_str(" {");
    for item in items {
        out.push(' ');
        out.push_str(&quote(item.as_ref()));
    }
    out.push_str(" }\n");
}

/// A name with its source position.
#[derive(Debug, Clone)]
pub(crate) struct Spanned {
    pub text: String,
    pub line: usize,
    pub column: usize,
}

pub(crate) struct Cursor {
    tokens: Vec<Token>,
    pos: usize,
    /// Position reported for errors at end of input.
    end: (usize, usize),
}

impl Cursor {
    pub fn new(text: &str) -> Result<Cursor> {
        let tokens = tokenize(text)?;
        let lines = text.lines().count();
        let last = text.lines().last().map(|l| l.chars().count()).unwrap_or(0);
        Ok(Cursor {
            tokens,
            pos: 0,
            end: (lines.max(1), last + 1),
        })
    }

    pub fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    pub fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn here(&self) -> (usize, usize) {
        self.peek().map(|t| (t.line, t.column)).unwrap_or(self.end)
    }

    pub fn error(&self, message: impl Into<String>) -> Error {
        let (line, column) = self.here();
        Error::syntax(line, column, message)
    }

    /// True if the next token is the section keyword `kw`.
    pub fn at_keyword(&self, kw: &str) -> bool {
        self.peek().and_then(Token::keyword) == Some(kw)
    }

    pub fn at_any_keyword(&self) -> bool {
        self.peek().and_then(Token::keyword).is_some()
    }

    pub fn expect_keyword(&mut self, kw: &str) -> Result<()> {
        if self.at_keyword(kw) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected `{kw}`")))
        }
    }

    /// `GENERATOR: OBJECT` and friends: a keyword followed by a plain word
    /// on the same line.
    pub fn expect_compound(&mut self, first: &str, second: &str) -> Result<()> {
        self.expect_keyword(first)?;
        match self.peek() {
            Some(t) if !t.line_start && t.word() == Some(second) => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error(format!("expected `{first} {second}`"))),
        }
    }

    pub fn word(&mut self) -> Result<Spanned> {
        match self.peek() {
            Some(t) if t.keyword().is_none() => {
                if let Some(text) = t.word() {
                    let s = Spanned {
                        text: text.to_owned(),
                        line: t.line,
                        column: t.column,
                    };
                    self.pos += 1;
                    return Ok(s);
                }
                Err(self.error("expected a name"))
            }
            _ => Err(self.error("expected a name")),
        }
    }

    /// `name { item item ... }`
    pub fn entry(&mut self) -> Result<(Spanned, Vec<Spanned>)> {
        let name = self.word()?;
        match self.peek() {
            Some(Token {
                kind: TokenKind::Open, ..
            }) => self.pos += 1,
            _ => return Err(self.error("expected `{`")),
        }
        let mut items = Vec::new();
        loop {
            match self.peek() {
                Some(Token {
                    kind: TokenKind::Close, ..
                }) => {
                    self.pos += 1;
                    break;
                }
                Some(Token {
                    kind: TokenKind::Word { text, .. },
                    line,
                    column,
                    ..
                }) => {
                    items.push(Spanned {
                        text: text.clone(),
                        line: *line,
                        column: *column,
                    });
                    self.pos += 1;
                }
                Some(_) => return Err(self.error("unexpected `{`")),
                None => return Err(self.error("unterminated list, expected `}`")),
            }
        }
        Ok((name, items))
    }

    /// Entries until the next section keyword or end of input.
    pub fn entries(&mut self) -> Result<Vec<(Spanned, Vec<Spanned>)>> {
        let mut out = Vec::new();
        while !self.at_end() && !self.at_any_keyword() {
            out.push(self.entry()?);
        }
        Ok(out)
    }

    pub fn expect_end(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_and_comments() {
        let toks = tokenize("# header\nTYPE K1\n  g1 { a }\n").unwrap();
        assert_eq!(toks.len(), 6);
        assert_eq!(toks[0].keyword(), Some("TYPE"));
        assert_eq!((toks[2].line, toks[2].column), (3, 3));
        assert!(toks[2].line_start);
        assert!(!toks[3].line_start);
    }

    #[test]
    fn quoting_round_trips() {
        for name in [
            "plain",
            "with space",
            "quote\"inside",
            "back\\slash",
            "OBJECT",
            "#hash",
            "",
            "café",
        ] {
            let quoted = quote(name);
            let toks = tokenize(&format!("x {quoted}")).unwrap();
            assert_eq!(toks[1].word(), Some(name), "{quoted}");
        }
        assert_eq!(quote("project=plan1"), "project=plan1");
        assert_eq!(quote("size<=10"), "size<=10");
    }

    #[test]
    fn bad_characters_report_position() {
        let err = tokenize("TYPE T\nOBJECT\ng1 { ; }\n").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 3, column: 6, .. }), "{err}");
        assert!(matches!(
            tokenize("\"open"),
            Err(Error::Syntax { line: 1, column: 1, .. })
        ));
    }
}
