//! Tokenizer for the supported Java subset.
//!
//! Comments and whitespace are skipped; identifiers, keywords, literals and
//! punctuation come out as a flat token list with line/column positions for
//! error reporting. `>` is never merged into `>>`, so nested generic
//! closers lex cleanly; the expression parser reassembles adjacent `>` tokens
//! into shift operators where they belong.

use super::ParseError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keyword {
    Abstract,
    Assert,
    Boolean,
    Break,
    Byte,
    Case,
    Catch,
    Char,
    Class,
    Const,
    Continue,
    Default,
    Do,
    Double,
    Else,
    Enum,
    Extends,
    Final,
    Finally,
    Float,
    For,
    Goto,
    If,
    Implements,
    Import,
    Instanceof,
    Int,
    Interface,
    Long,
    Native,
    New,
    Package,
    Private,
    Protected,
    Public,
    Return,
    Short,
    Static,
    Strictfp,
    Super,
    Switch,
    Synchronized,
    This,
    Throw,
    Throws,
    Transient,
    Try,
    Void,
    Volatile,
    While,
    True,
    False,
    Null,
}

fn keyword_of(text: &str) -> Option<Keyword> {
    use Keyword::*;
    Some(match text {
        "abstract" => Abstract,
        "assert" => Assert,
        "boolean" => Boolean,
        "break" => Break,
        "byte" => Byte,
        "case" => Case,
        "catch" => Catch,
        "char" => Char,
        "class" => Class,
        "const" => Const,
        "continue" => Continue,
        "default" => Default,
        "do" => Do,
        "double" => Double,
        "else" => Else,
        "enum" => Enum,
        "extends" => Extends,
        "final" => Final,
        "finally" => Finally,
        "float" => Float,
        "for" => For,
        "goto" => Goto,
        "if" => If,
        "implements" => Implements,
        "import" => Import,
        "instanceof" => Instanceof,
        "int" => Int,
        "interface" => Interface,
        "long" => Long,
        "native" => Native,
        "new" => New,
        "package" => Package,
        "private" => Private,
        "protected" => Protected,
        "public" => Public,
        "return" => Return,
        "short" => Short,
        "static" => Static,
        "strictfp" => Strictfp,
        "super" => Super,
        "switch" => Switch,
        "synchronized" => Synchronized,
        "this" => This,
        "throw" => Throw,
        "throws" => Throws,
        "transient" => Transient,
        "try" => Try,
        "void" => Void,
        "volatile" => Volatile,
        "while" => While,
        "true" => True,
        "false" => False,
        "null" => Null,
        _ => return None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Ident,
    Keyword(Keyword),
    IntLit,
    FloatLit,
    StringLit,
    CharLit,
    LBrace,
    RBrace,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Comma,
    Dot,
    Ellipsis,
    At,
    Question,
    Colon,
    /// Assignment and compound assignment: `=` `+=` `-=` `*=` `/=` `%=` `&=`
    /// `|=` `^=` `<<=`.
    Assign,
    EqEq,
    NotEq,
    Lt,
    Gt,
    Le,
    Ge,
    AndAnd,
    OrOr,
    Not,
    Tilde,
    Plus,
    Minus,
    Star,
    Slash,
    Percent,
    Amp,
    Pipe,
    Caret,
    Shl,
    PlusPlus,
    MinusMinus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Token {
    pub kind: TokenKind,
    /// Identifier or literal text; empty for fixed punctuation.
    pub text: String,
    pub line: u32,
    pub col: u32,
}

pub fn tokenize(source: &str) -> Result<Vec<Token>, ParseError> {
    Lexer {
        chars: source.chars().collect(),
        pos: 0,
        line: 1,
        col: 1,
        tokens: Vec::new(),
    }
    .run()
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: u32,
    col: u32,
    tokens: Vec<Token>,
}

impl Lexer {
    fn run(mut self) -> Result<Vec<Token>, ParseError> {
        while let Some(c) = self.peek() {
            let (line, col) = (self.line, self.col);
            match c {
                ' ' | '\t' | '\r' | '\n' | '\u{0c}' => {
                    self.bump();
                }
                '/' => match self.peek_at(1) {
                    Some('/') => self.skip_line_comment(),
                    Some('*') => self.skip_block_comment()?,
                    Some('=') => {
                        self.bump();
                        self.bump();
                        self.push(TokenKind::Assign, line, col);
                    }
                    _ => {
                        self.bump();
                        self.push(TokenKind::Slash, line, col);
                    }
                },
                c if c.is_ascii_digit() => self.lex_number()?,
                c if c == '_' || c == '$' || c.is_alphabetic() => self.lex_word(),
                '"' => self.lex_string()?,
                '\'' => self.lex_char()?,
                _ => self.lex_punct()?,
            }
        }
        Ok(self.tokens)
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn push(&mut self, kind: TokenKind, line: u32, col: u32) {
        self.tokens.push(Token {
            kind,
            text: String::new(),
            line,
            col,
        });
    }

    fn push_text(&mut self, kind: TokenKind, text: String, line: u32, col: u32) {
        self.tokens.push(Token {
            kind,
            text,
            line,
            col,
        });
    }

    fn error(&self, message: impl Into<String>) -> ParseError {
        ParseError {
            line: self.line,
            col: self.col,
            message: message.into(),
        }
    }

    fn skip_line_comment(&mut self) {
        while let Some(c) = self.peek() {
            if c == '\n' {
                break;
            }
            self.bump();
        }
    }

    fn skip_block_comment(&mut self) -> Result<(), ParseError> {
        let (line, col) = (self.line, self.col);
        self.bump();
        self.bump();
        loop {
            match self.peek() {
                Some('*') if self.peek_at(1) == Some('/') => {
                    self.bump();
                    self.bump();
                    return Ok(());
                }
                Some(_) => {
                    self.bump();
                }
                None => {
                    return Err(ParseError {
                        line,
                        col,
                        message: "unterminated block comment".to_string(),
                    })
                }
            }
        }
    }

    fn lex_word(&mut self) {
        let (line, col) = (self.line, self.col);
        let mut text = String::new();
        while let Some(c) = self.peek() {
            if c == '_' || c == '$' || c.is_alphanumeric() {
                text.push(c);
                self.bump();
            } else {
                break;
            }
        }
        match keyword_of(&text) {
            Some(kw) => self.push(TokenKind::Keyword(kw), line, col),
            None => self.push_text(TokenKind::Ident, text, line, col),
        }
    }

    fn lex_number(&mut self) -> Result<(), ParseError> {
        let (line, col) = (self.line, self.col);
        let mut text = String::new();
        let mut is_float = false;

        if self.peek() == Some('0') && matches!(self.peek_at(1), Some('x' | 'X' | 'b' | 'B')) {
            text.push(self.bump().unwrap());
            text.push(self.bump().unwrap());
            while let Some(c) = self.peek() {
                if c.is_ascii_hexdigit() || c == '_' {
                    text.push(c);
                    self.bump();
                } else {
                    break;
                }
            }
            if matches!(self.peek(), Some('l' | 'L')) {
                self.bump();
            }
            self.push_text(TokenKind::IntLit, text, line, col);
            return Ok(());
        }

        let digits = |lexer: &mut Self, text: &mut String| {
            while let Some(c) = lexer.peek() {
                if c.is_ascii_digit() || c == '_' {
                    text.push(c);
                    lexer.bump();
                } else {
                    break;
                }
            }
        };
        digits(self, &mut text);
        if self.peek() == Some('.') && self.peek_at(1).is_some_and(|c| c.is_ascii_digit()) {
            is_float = true;
            text.push(self.bump().unwrap());
            digits(self, &mut text);
        }
        if matches!(self.peek(), Some('e' | 'E')) {
            is_float = true;
            text.push(self.bump().unwrap());
            if matches!(self.peek(), Some('+' | '-')) {
                text.push(self.bump().unwrap());
            }
            if !self.peek().is_some_and(|c| c.is_ascii_digit()) {
                return Err(self.error("malformed exponent in numeric literal"));
            }
            digits(self, &mut text);
        }
        match self.peek() {
            Some('f' | 'F' | 'd' | 'D') => {
                is_float = true;
                self.bump();
            }
            Some('l' | 'L') => {
                self.bump();
            }
            _ => {}
        }
        self.push_text(
            if is_float {
                TokenKind::FloatLit
            } else {
                TokenKind::IntLit
            },
            text,
            line,
            col,
        );
        Ok(())
    }

    fn lex_string(&mut self) -> Result<(), ParseError> {
        let (line, col) = (self.line, self.col);
        if self.peek_at(1) == Some('"') && self.peek_at(2) == Some('"') {
            return Err(self.error("text blocks are not supported"));
        }
        self.bump();
        let mut text = String::new();
        loop {
            match self.peek() {
                Some('"') => {
                    self.bump();
                    break;
                }
                Some('\\') => {
                    self.bump();
                    if self.bump().is_none() {
                        return Err(self.error("unterminated string literal"));
                    }
                }
                Some('\n') | None => {
                    return Err(ParseError {
                        line,
                        col,
                        message: "unterminated string literal".to_string(),
                    })
                }
                Some(c) => {
                    text.push(c);
                    self.bump();
                }
            }
        }
        self.push_text(TokenKind::StringLit, text, line, col);
        Ok(())
    }

    fn lex_char(&mut self) -> Result<(), ParseError> {
        let (line, col) = (self.line, self.col);
        self.bump();
        match self.peek() {
            Some('\\') => {
                self.bump();
                self.bump();
            }
            Some('\'') | None => return Err(self.error("empty character literal")),
            Some(_) => {
                self.bump();
            }
        }
        if self.peek() != Some('\'') {
            return Err(self.error("unterminated character literal"));
        }
        self.bump();
        self.push_text(TokenKind::CharLit, String::new(), line, col);
        Ok(())
    }

    fn lex_punct(&mut self) -> Result<(), ParseError> {
        use TokenKind::*;
        let (line, col) = (self.line, self.col);
        let c = self.bump().expect("caller checked peek");
        let next = self.peek();
        let kind = match c {
            '{' => LBrace,
            '}' => RBrace,
            '(' => LParen,
            ')' => RParen,
            '[' => LBracket,
            ']' => RBracket,
            ';' => Semi,
            ',' => Comma,
            '.' => {
                if next == Some('.') && self.peek_at(1) == Some('.') {
                    self.bump();
                    self.bump();
                    Ellipsis
                } else {
                    Dot
                }
            }
            '@' => At,
            '?' => Question,
            ':' => {
                if next == Some(':') {
                    return Err(self.error("method references (`::`) are not supported"));
                }
                Colon
            }
            '=' => {
                if next == Some('=') {
                    self.bump();
                    EqEq
                } else {
                    Assign
                }
            }
            '!' => {
                if next == Some('=') {
                    self.bump();
                    NotEq
                } else {
                    Not
                }
            }
            '<' => match next {
                Some('=') => {
                    self.bump();
                    Le
                }
                Some('<') => {
                    self.bump();
                    if self.peek() == Some('=') {
                        self.bump();
                        Assign
                    } else {
                        Shl
                    }
                }
                _ => Lt,
            },
            '>' => {
                // `>` stays singular for the sake of generics; `>=` is safe.
                if next == Some('=') {
                    self.bump();
                    Ge
                } else {
                    Gt
                }
            }
            '&' => match next {
                Some('&') => {
                    self.bump();
                    AndAnd
                }
                Some('=') => {
                    self.bump();
                    Assign
                }
                _ => Amp,
            },
            '|' => match next {
                Some('|') => {
                    self.bump();
                    OrOr
                }
                Some('=') => {
                    self.bump();
                    Assign
                }
                _ => Pipe,
            },
            '^' => {
                if next == Some('=') {
                    self.bump();
                    Assign
                } else {
                    Caret
                }
            }
            '~' => Tilde,
            '+' => match next {
                Some('+') => {
                    self.bump();
                    PlusPlus
                }
                Some('=') => {
                    self.bump();
                    Assign
                }
                _ => Plus,
            },
            '-' => match next {
                Some('-') => {
                    self.bump();
                    MinusMinus
                }
                Some('=') => {
                    self.bump();
                    Assign
                }
                Some('>') => return Err(self.error("lambdas and arrow syntax are not supported")),
                _ => Minus,
            },
            '*' => {
                if next == Some('=') {
                    self.bump();
                    Assign
                } else {
                    Star
                }
            }
            '%' => {
                if next == Some('=') {
                    self.bump();
                    Assign
                } else {
                    Percent
                }
            }
            other => {
                return Err(ParseError {
                    line,
                    col,
                    message: format!("unexpected character `{other}`"),
                })
            }
        };
        self.push(kind, line, col);
        Ok(())
    }
}
