//! Recursive-descent parser for the supported Java subset.
//!
//! Supported: top-level classes and interfaces (plus nested, local and
//! anonymous ones), fields, methods, constructors, initializer blocks,
//! `extends`/`implements`, the common statements, and expressions detailed
//! enough to recover method calls with their receivers. Generics are parsed
//! and their arguments discarded. Annotations are skipped syntactically.
//!
//! Out of subset (reported as parse errors with a location): enums, records,
//! lambdas and method references, text blocks, arrow switches, qualified
//! `this`/`super`/`new`, and explicit call type arguments.

use super::ast::*;
use super::lexer::Keyword as Kw;
use super::lexer::{tokenize, Keyword, Token, TokenKind};
use super::ParseError;
use crate::graph::ModuleKind;

/// Parses one source file into a [`SourceUnit`].
pub fn parse_unit(path: &str, source: &str) -> Result<SourceUnit, ParseError> {
    let tokens = tokenize(source)?;
    Parser { tokens, pos: 0 }.parse_compilation_unit(path)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn peek_kind(&self) -> Option<TokenKind> {
        self.peek().map(|t| t.kind)
    }

    fn kind_at(&self, offset: usize) -> Option<TokenKind> {
        self.tokens.get(self.pos + offset).map(|t| t.kind)
    }

    fn advance(&mut self) -> Option<&Token> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn check(&mut self, kind: TokenKind) -> bool {
        if self.peek_kind() == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> PResult<&Token> {
        match self.peek_kind() {
            Some(k) if k == kind => Ok(self.advance().expect("peeked")),
            _ => Err(self.error_here(format!("expected {what}"))),
        }
    }

    fn expect_ident(&mut self, what: &str) -> PResult<String> {
        match self.peek() {
            Some(t) if t.kind == TokenKind::Ident => {
                let text = t.text.clone();
                self.pos += 1;
                Ok(text)
            }
            _ => Err(self.error_here(format!("expected {what}"))),
        }
    }

    fn error_here(&self, message: String) -> ParseError {
        match self.peek() {
            Some(t) => ParseError {
                line: t.line,
                col: t.col,
                message,
            },
            None => {
                let (line, col) = self
                    .tokens
                    .last()
                    .map(|t| (t.line, t.col))
                    .unwrap_or((1, 1));
                ParseError {
                    line,
                    col,
                    message: format!("{message}, found end of input"),
                }
            }
        }
    }

    /// Runs a speculative parse, restoring the position on failure.
    fn attempt<T>(&mut self, f: impl FnOnce(&mut Self) -> PResult<T>) -> Option<T> {
        let saved = self.pos;
        match f(self) {
            Ok(value) => Some(value),
            Err(_) => {
                self.pos = saved;
                None
            }
        }
    }

    // ------------------------------------------------------------------
    // Compilation unit
    // ------------------------------------------------------------------

    fn parse_compilation_unit(mut self, path: &str) -> PResult<SourceUnit> {
        let mut package = None;
        self.skip_annotations()?;
        if self.check(TokenKind::Keyword(Keyword::Package)) {
            package = Some(self.parse_dotted_name("package name")?);
            self.expect(TokenKind::Semi, "`;` after package declaration")?;
        }

        let mut imports = Vec::new();
        while self.peek_kind() == Some(TokenKind::Keyword(Keyword::Import)) {
            self.advance();
            let mut text = String::new();
            if self.check(TokenKind::Keyword(Keyword::Static)) {
                text.push_str("static ");
            }
            text.push_str(&self.parse_dotted_name("import path")?);
            if self.check(TokenKind::Dot) {
                self.expect(TokenKind::Star, "`*` in wildcard import")?;
                text.push_str(".*");
            }
            self.expect(TokenKind::Semi, "`;` after import")?;
            imports.push(text);
        }

        let mut types = Vec::new();
        while self.peek().is_some() {
            if self.check(TokenKind::Semi) {
                continue;
            }
            let _mods = self.parse_modifiers()?;
            match self.peek_kind() {
                Some(TokenKind::Keyword(Keyword::Class)) => {
                    self.advance();
                    types.push(self.parse_type_decl(ModuleKind::Class)?);
                }
                Some(TokenKind::Keyword(Keyword::Interface)) => {
                    self.advance();
                    types.push(self.parse_type_decl(ModuleKind::Interface)?);
                }
                Some(TokenKind::Keyword(Keyword::Enum)) => {
                    return Err(self.error_here("enum declarations are not supported".to_string()))
                }
                Some(_) => {
                    return Err(self.error_here("expected a type declaration".to_string()));
                }
                None => break,
            }
        }

        Ok(SourceUnit {
            path: path.to_string(),
            package,
            imports,
            types,
        })
    }

    fn parse_dotted_name(&mut self, what: &str) -> PResult<String> {
        let mut name = self.expect_ident(what)?;
        while self.peek_kind() == Some(TokenKind::Dot) && self.kind_at(1) == Some(TokenKind::Ident)
        {
            self.advance();
            name.push('.');
            name.push_str(&self.expect_ident(what)?);
        }
        Ok(name)
    }

    /// Consumes annotations and modifier keywords; reports whether `static`
    /// appeared (the only modifier counting cares about).
    fn parse_modifiers(&mut self) -> PResult<bool> {
        let mut is_static = false;
        loop {
            match self.peek_kind() {
                Some(TokenKind::At) => self.skip_annotation()?,
                Some(TokenKind::Keyword(kw)) => match kw {
                    Keyword::Static => {
                        is_static = true;
                        self.advance();
                    }
                    Keyword::Public
                    | Keyword::Private
                    | Keyword::Protected
                    | Keyword::Final
                    | Keyword::Abstract
                    | Keyword::Native
                    | Keyword::Synchronized
                    | Keyword::Transient
                    | Keyword::Volatile
                    | Keyword::Strictfp
                    | Keyword::Default => {
                        self.advance();
                    }
                    _ => break,
                },
                _ => break,
            }
        }
        Ok(is_static)
    }

    fn skip_annotations(&mut self) -> PResult<()> {
        while self.peek_kind() == Some(TokenKind::At) {
            self.skip_annotation()?;
        }
        Ok(())
    }

    fn skip_annotation(&mut self) -> PResult<()> {
        self.expect(TokenKind::At, "`@`")?;
        // `@interface` declarations are not supported.
        if self.peek_kind() == Some(TokenKind::Keyword(Keyword::Interface)) {
            return Err(self.error_here("annotation type declarations are not supported".into()));
        }
        self.parse_dotted_name("annotation name")?;
        if self.peek_kind() == Some(TokenKind::LParen) {
            let mut depth = 0usize;
            loop {
                match self.advance().map(|t| t.kind) {
                    Some(TokenKind::LParen) => depth += 1,
                    Some(TokenKind::RParen) => {
                        depth -= 1;
                        if depth == 0 {
                            break;
                        }
                    }
                    Some(_) => {}
                    None => return Err(self.error_here("unterminated annotation arguments".into())),
                }
            }
        }
        Ok(())
    }

    // ------------------------------------------------------------------
    // Types and declarations
    // ------------------------------------------------------------------

    fn parse_type_decl(&mut self, kind: ModuleKind) -> PResult<TypeDecl> {
        let line = self.peek().map(|t| t.line).unwrap_or(0);
        let name = self.expect_ident("type name")?;
        let type_params = if self.peek_kind() == Some(TokenKind::Lt) {
            self.parse_type_params()?
        } else {
            Vec::new()
        };

        let mut extends = Vec::new();
        let mut implements = Vec::new();
        if self.check(TokenKind::Keyword(Keyword::Extends)) {
            extends.push(self.parse_type_ref()?);
            // Interfaces may extend several interfaces.
            while kind == ModuleKind::Interface && self.check(TokenKind::Comma) {
                extends.push(self.parse_type_ref()?);
            }
        }
        if self.check(TokenKind::Keyword(Keyword::Implements)) {
            if kind == ModuleKind::Interface {
                return Err(self.error_here("interfaces cannot implement".to_string()));
            }
            implements.push(self.parse_type_ref()?);
            while self.check(TokenKind::Comma) {
                implements.push(self.parse_type_ref()?);
            }
        }

        self.expect(TokenKind::LBrace, "`{` opening the type body")?;
        let members = self.parse_members(&name)?;
        self.expect(TokenKind::RBrace, "`}` closing the type body")?;

        Ok(TypeDecl {
            name,
            kind,
            type_params,
            extends,
            implements,
            members,
            line,
        })
    }

    fn parse_type_params(&mut self) -> PResult<Vec<String>> {
        self.expect(TokenKind::Lt, "`<`")?;
        let mut names = Vec::new();
        loop {
            self.skip_annotations()?;
            names.push(self.expect_ident("type parameter name")?);
            if self.check(TokenKind::Keyword(Keyword::Extends)) {
                self.parse_type_ref()?;
                while self.check(TokenKind::Amp) {
                    self.parse_type_ref()?;
                }
            }
            if self.check(TokenKind::Comma) {
                continue;
            }
            self.expect(TokenKind::Gt, "`>` closing type parameters")?;
            break;
        }
        Ok(names)
    }

    /// Type reference with optional generic arguments (discarded) and array
    /// dimensions.
    fn parse_type_ref(&mut self) -> PResult<TypeRef> {
        let mut ty = self.parse_type_ref_base()?;
        ty.dims += self.parse_dims();
        Ok(ty)
    }

    /// Like [`Self::parse_type_ref`] but leaving `[` unconsumed, for `new`
    /// expressions where brackets carry sizes.
    fn parse_type_ref_base(&mut self) -> PResult<TypeRef> {
        self.skip_annotations()?;
        if let Some(TokenKind::Keyword(kw)) = self.peek_kind() {
            if matches!(
                kw,
                Keyword::Boolean
                    | Keyword::Byte
                    | Keyword::Char
                    | Keyword::Short
                    | Keyword::Int
                    | Keyword::Long
                    | Keyword::Float
                    | Keyword::Double
                    | Keyword::Void
            ) {
                self.advance();
                return Ok(TypeRef::primitive());
            }
        }
        let mut name = self.expect_ident("type name")?;
        if self.peek_kind() == Some(TokenKind::Lt) {
            self.skip_type_args()?;
        }
        while self.peek_kind() == Some(TokenKind::Dot) && self.kind_at(1) == Some(TokenKind::Ident)
        {
            self.advance();
            name.push('.');
            name.push_str(&self.expect_ident("type name segment")?);
            if self.peek_kind() == Some(TokenKind::Lt) {
                self.skip_type_args()?;
            }
        }
        Ok(TypeRef::named(name))
    }

    fn parse_dims(&mut self) -> u8 {
        let mut dims = 0;
        while self.peek_kind() == Some(TokenKind::LBracket)
            && self.kind_at(1) == Some(TokenKind::RBracket)
        {
            self.advance();
            self.advance();
            dims += 1;
        }
        dims
    }

    /// Skips `<...>` type arguments, including wildcards and nesting.
    fn skip_type_args(&mut self) -> PResult<()> {
        self.expect(TokenKind::Lt, "`<`")?;
        if self.check(TokenKind::Gt) {
            return Ok(()); // diamond
        }
        loop {
            if self.check(TokenKind::Question) {
                if self.check(TokenKind::Keyword(Keyword::Extends))
                    || self.check(TokenKind::Keyword(Keyword::Super))
                {
                    self.parse_type_ref()?;
                }
            } else {
                self.parse_type_ref()?;
            }
            if self.check(TokenKind::Comma) {
                continue;
            }
            self.expect(TokenKind::Gt, "`>` closing type arguments")?;
            return Ok(());
        }
    }

    fn parse_members(&mut self, enclosing_name: &str) -> PResult<Vec<Member>> {
        let mut members = Vec::new();
        loop {
            match self.peek_kind() {
                None => return Err(self.error_here("unterminated type body".to_string())),
                Some(TokenKind::RBrace) => return Ok(members),
                Some(TokenKind::Semi) => {
                    self.advance();
                }
                _ => members.push(self.parse_member(enclosing_name)?),
            }
        }
    }

    fn parse_member(&mut self, enclosing_name: &str) -> PResult<Member> {
        let is_static = self.parse_modifiers()?;

        match self.peek_kind() {
            Some(TokenKind::LBrace) => {
                let body = self.parse_block()?;
                return Ok(Member::Initializer(body));
            }
            Some(TokenKind::Keyword(Keyword::Class)) => {
                self.advance();
                return Ok(Member::Nested(self.parse_type_decl(ModuleKind::Class)?));
            }
            Some(TokenKind::Keyword(Keyword::Interface)) => {
                self.advance();
                return Ok(Member::Nested(self.parse_type_decl(ModuleKind::Interface)?));
            }
            Some(TokenKind::Keyword(Keyword::Enum)) => {
                return Err(self.error_here("enum declarations are not supported".to_string()))
            }
            _ => {}
        }

        let type_params = if self.peek_kind() == Some(TokenKind::Lt) {
            self.parse_type_params()?
        } else {
            Vec::new()
        };

        // Constructor: the enclosing type's name immediately followed by `(`.
        if self.peek_kind() == Some(TokenKind::Ident)
            && self.peek().map(|t| t.text.as_str()) == Some(enclosing_name)
            && self.kind_at(1) == Some(TokenKind::LParen)
        {
            let name = self.expect_ident("constructor name")?;
            let params = self.parse_params()?;
            self.skip_throws()?;
            let body = if self.check(TokenKind::Semi) {
                None
            } else {
                Some(self.parse_block()?)
            };
            return Ok(Member::Constructor(MethodDecl {
                name,
                type_params,
                return_type: None,
                params,
                body,
                is_static,
            }));
        }

        let ty = self.parse_type_ref()?;
        let name = self.expect_ident("member name")?;

        if self.peek_kind() == Some(TokenKind::LParen) {
            let params = self.parse_params()?;
            let _ = self.parse_dims(); // ancient C-style return dims
            self.skip_throws()?;
            let body = if self.check(TokenKind::Semi) {
                None
            } else {
                Some(self.parse_block()?)
            };
            return Ok(Member::Method(MethodDecl {
                name,
                type_params,
                return_type: Some(ty),
                params,
                body,
                is_static,
            }));
        }

        if !type_params.is_empty() {
            return Err(self.error_here("type parameters on a field".to_string()));
        }
        let declarators = self.parse_declarators(name)?;
        self.expect(TokenKind::Semi, "`;` after field declaration")?;
        Ok(Member::Field(FieldDecl {
            ty,
            declarators,
            is_static,
        }))
    }

    fn parse_declarators(&mut self, first: String) -> PResult<Vec<(String, u8, Option<Expr>)>> {
        let mut declarators = Vec::new();
        let mut name = first;
        loop {
            let dims = self.parse_dims();
            let init = if self.check(TokenKind::Assign) {
                Some(self.parse_initializer()?)
            } else {
                None
            };
            declarators.push((name, dims, init));
            if self.check(TokenKind::Comma) {
                name = self.expect_ident("declarator name")?;
                continue;
            }
            return Ok(declarators);
        }
    }

    fn parse_initializer(&mut self) -> PResult<Expr> {
        if self.peek_kind() == Some(TokenKind::LBrace) {
            self.parse_array_init()
        } else {
            self.parse_expr()
        }
    }

    fn parse_array_init(&mut self) -> PResult<Expr> {
        self.expect(TokenKind::LBrace, "`{` opening array initializer")?;
        let mut values = Vec::new();
        loop {
            if self.check(TokenKind::RBrace) {
                return Ok(Expr::ArrayInit(values));
            }
            values.push(self.parse_initializer()?);
            if self.check(TokenKind::Comma) {
                continue;
            }
            self.expect(TokenKind::RBrace, "`}` closing array initializer")?;
            return Ok(Expr::ArrayInit(values));
        }
    }

    fn parse_params(&mut self) -> PResult<Vec<Param>> {
        self.expect(TokenKind::LParen, "`(` opening parameters")?;
        let mut params = Vec::new();
        if self.check(TokenKind::RParen) {
            return Ok(params);
        }
        loop {
            loop {
                match self.peek_kind() {
                    Some(TokenKind::At) => self.skip_annotation()?,
                    Some(TokenKind::Keyword(Keyword::Final)) => {
                        self.advance();
                    }
                    _ => break,
                }
            }
            let mut ty = self.parse_type_ref()?;
            let varargs = self.check(TokenKind::Ellipsis);
            let name = self.expect_ident("parameter name")?;
            ty.dims += self.parse_dims();
            params.push(Param { ty, name, varargs });
            if self.check(TokenKind::Comma) {
                continue;
            }
            self.expect(TokenKind::RParen, "`)` closing parameters")?;
            return Ok(params);
        }
    }

    fn skip_throws(&mut self) -> PResult<()> {
        if self.check(TokenKind::Keyword(Keyword::Throws)) {
            self.parse_type_ref()?;
            while self.check(TokenKind::Comma) {
                self.parse_type_ref()?;
            }
        }
        Ok(())
    }

    // ------------------------------------------------------------------
    // Statements
    // ------------------------------------------------------------------

    fn parse_block(&mut self) -> PResult<Vec<Stmt>> {
        self.expect(TokenKind::LBrace, "`{` opening a block")?;
        let mut stmts = Vec::new();
        loop {
            match self.peek_kind() {
                None => return Err(self.error_here("unterminated block".to_string())),
                Some(TokenKind::RBrace) => {
                    self.advance();
                    return Ok(stmts);
                }
                _ => stmts.push(self.parse_stmt()?),
            }
        }
    }

    fn parse_stmt(&mut self) -> PResult<Stmt> {
        use Keyword::*;
        match self.peek_kind() {
            Some(TokenKind::LBrace) => return Ok(Stmt::Block(self.parse_block()?)),
            Some(TokenKind::Semi) => {
                self.advance();
                return Ok(Stmt::Empty);
            }
            Some(TokenKind::Keyword(kw)) => match kw {
                If => return self.parse_if(),
                While => {
                    self.advance();
                    self.expect(TokenKind::LParen, "`(` after while")?;
                    let cond = self.parse_expr()?;
                    self.expect(TokenKind::RParen, "`)` after while condition")?;
                    let body = Box::new(self.parse_stmt()?);
                    return Ok(Stmt::While { cond, body });
                }
                Do => {
                    self.advance();
                    let body = Box::new(self.parse_stmt()?);
                    self.expect(TokenKind::Keyword(While), "`while` after do body")?;
                    self.expect(TokenKind::LParen, "`(` after while")?;
                    let cond = self.parse_expr()?;
                    self.expect(TokenKind::RParen, "`)` after do-while condition")?;
                    self.expect(TokenKind::Semi, "`;` after do-while")?;
                    return Ok(Stmt::DoWhile { body, cond });
                }
                For => return self.parse_for(),
                Return => {
                    self.advance();
                    let value = if self.peek_kind() == Some(TokenKind::Semi) {
                        None
                    } else {
                        Some(self.parse_expr()?)
                    };
                    self.expect(TokenKind::Semi, "`;` after return")?;
                    return Ok(Stmt::Return(value));
                }
                Throw => {
                    self.advance();
                    let value = self.parse_expr()?;
                    self.expect(TokenKind::Semi, "`;` after throw")?;
                    return Ok(Stmt::Throw(value));
                }
                Try => return self.parse_try(),
                Switch => return self.parse_switch(),
                Break => {
                    self.advance();
                    if self.peek_kind() == Some(TokenKind::Ident) {
                        self.advance(); // label
                    }
                    self.expect(TokenKind::Semi, "`;` after break")?;
                    return Ok(Stmt::Break);
                }
                Continue => {
                    self.advance();
                    if self.peek_kind() == Some(TokenKind::Ident) {
                        self.advance(); // label
                    }
                    self.expect(TokenKind::Semi, "`;` after continue")?;
                    return Ok(Stmt::Continue);
                }
                Assert => {
                    self.advance();
                    let cond = self.parse_expr()?;
                    let message = if self.check(TokenKind::Colon) {
                        Some(self.parse_expr()?)
                    } else {
                        None
                    };
                    self.expect(TokenKind::Semi, "`;` after assert")?;
                    return Ok(Stmt::Assert { cond, message });
                }
                Synchronized => {
                    self.advance();
                    self.expect(TokenKind::LParen, "`(` after synchronized")?;
                    let lock = self.parse_expr()?;
                    self.expect(TokenKind::RParen, "`)` after synchronized lock")?;
                    let body = self.parse_block()?;
                    return Ok(Stmt::Synchronized { lock, body });
                }
                Class => {
                    self.advance();
                    return Ok(Stmt::LocalType(self.parse_type_decl(ModuleKind::Class)?));
                }
                Interface => {
                    self.advance();
                    return Ok(Stmt::LocalType(
                        self.parse_type_decl(ModuleKind::Interface)?,
                    ));
                }
                Enum => return Err(self.error_here("unsupported local declaration".to_string())),
                Final | Abstract | Static => {
                    // Local class or a final local variable.
                    self.parse_modifiers()?;
                    match self.peek_kind() {
                        Some(TokenKind::Keyword(Class)) => {
                            self.advance();
                            return Ok(Stmt::LocalType(self.parse_type_decl(ModuleKind::Class)?));
                        }
                        Some(TokenKind::Keyword(Interface)) => {
                            self.advance();
                            return Ok(Stmt::LocalType(
                                self.parse_type_decl(ModuleKind::Interface)?,
                            ));
                        }
                        _ => {
                            let decl = self.parse_local_var_core()?;
                            self.expect(TokenKind::Semi, "`;` after local declaration")?;
                            return Ok(decl);
                        }
                    }
                }
                _ => {}
            },
            Some(TokenKind::At) => {
                self.skip_annotations()?;
                return self.parse_stmt();
            }
            _ => {}
        }

        // Labeled statement.
        if self.peek_kind() == Some(TokenKind::Ident) && self.kind_at(1) == Some(TokenKind::Colon) {
            self.advance();
            self.advance();
            return self.parse_stmt();
        }

        // Local variable declaration, or failing that an expression statement.
        if let Some(decl) = self.attempt(|p| {
            let decl = p.parse_local_var_core()?;
            p.expect(TokenKind::Semi, "`;` after local declaration")?;
            Ok(decl)
        }) {
            return Ok(decl);
        }
        let expr = self.parse_expr()?;
        self.expect(TokenKind::Semi, "`;` after expression statement")?;
        Ok(Stmt::Expr(expr))
    }

    /// `Type name [= init] (, name [= init])*` without the trailing `;`.
    fn parse_local_var_core(&mut self) -> PResult<Stmt> {
        let ty = self.parse_type_ref()?;
        let name = self.expect_ident("variable name")?;
        let declarators = self.parse_declarators(name)?;
        Ok(Stmt::LocalVar { ty, declarators })
    }

    fn parse_if(&mut self) -> PResult<Stmt> {
        self.expect(TokenKind::Keyword(Keyword::If), "`if`")?;
        self.expect(TokenKind::LParen, "`(` after if")?;
        let cond = self.parse_expr()?;
        self.expect(TokenKind::RParen, "`)` after if condition")?;
        let then_branch = Box::new(self.parse_stmt()?);
        let else_branch = if self.check(TokenKind::Keyword(Keyword::Else)) {
            Some(Box::new(self.parse_stmt()?))
        } else {
            None
        };
        Ok(Stmt::If {
            cond,
            then_branch,
            else_branch,
        })
    }

    fn parse_for(&mut self) -> PResult<Stmt> {
        self.expect(TokenKind::Keyword(Keyword::For), "`for`")?;
        self.expect(TokenKind::LParen, "`(` after for")?;

        // Enhanced for: `Type name : iterable`.
        if let Some(stmt) = self.attempt(|p| {
            loop {
                match p.peek_kind() {
                    Some(TokenKind::At) => p.skip_annotation()?,
                    Some(TokenKind::Keyword(Keyword::Final)) => {
                        p.advance();
                    }
                    _ => break,
                }
            }
            let ty = p.parse_type_ref()?;
            let name = p.expect_ident("loop variable")?;
            p.expect(TokenKind::Colon, "`:`")?;
            let iterable = p.parse_expr()?;
            p.expect(TokenKind::RParen, "`)` closing for header")?;
            let body = Box::new(p.parse_stmt()?);
            Ok(Stmt::ForEach {
                ty,
                name,
                iterable,
                body,
            })
        }) {
            return Ok(stmt);
        }

        let mut init = Vec::new();
        if !self.check(TokenKind::Semi) {
            if let Some(decl) = self.attempt(|p| {
                let decl = p.parse_local_var_core()?;
                p.expect(TokenKind::Semi, "`;` after for initializer")?;
                Ok(decl)
            }) {
                init.push(decl);
            } else {
                init.push(Stmt::Expr(self.parse_expr()?));
                while self.check(TokenKind::Comma) {
                    init.push(Stmt::Expr(self.parse_expr()?));
                }
                self.expect(TokenKind::Semi, "`;` after for initializer")?;
            }
        }
        let cond = if self.peek_kind() == Some(TokenKind::Semi) {
            None
        } else {
            Some(self.parse_expr()?)
        };
        self.expect(TokenKind::Semi, "`;` after for condition")?;
        let mut update = Vec::new();
        if self.peek_kind() != Some(TokenKind::RParen) {
            update.push(self.parse_expr()?);
            while self.check(TokenKind::Comma) {
                update.push(self.parse_expr()?);
            }
        }
        self.expect(TokenKind::RParen, "`)` closing for header")?;
        let body = Box::new(self.parse_stmt()?);
        Ok(Stmt::For {
            init,
            cond,
            update,
            body,
        })
    }

    fn parse_try(&mut self) -> PResult<Stmt> {
        self.expect(TokenKind::Keyword(Keyword::Try), "`try`")?;
        let mut resources = Vec::new();
        if self.check(TokenKind::LParen) {
            loop {
                if self.check(TokenKind::RParen) {
                    break;
                }
                if let Some(decl) = self.attempt(|p| p.parse_local_var_core()) {
                    resources.push(decl);
                } else {
                    resources.push(Stmt::Expr(self.parse_expr()?));
                }
                if self.check(TokenKind::Semi) {
                    continue;
                }
                self.expect(TokenKind::RParen, "`)` closing try resources")?;
                break;
            }
        }
        let body = self.parse_block()?;
        let mut catches = Vec::new();
        while self.check(TokenKind::Keyword(Keyword::Catch)) {
            self.expect(TokenKind::LParen, "`(` after catch")?;
            loop {
                match self.peek_kind() {
                    Some(TokenKind::At) => self.skip_annotation()?,
                    Some(TokenKind::Keyword(Keyword::Final)) => {
                        self.advance();
                    }
                    _ => break,
                }
            }
            let mut types = vec![self.parse_type_ref()?];
            while self.check(TokenKind::Pipe) {
                types.push(self.parse_type_ref()?);
            }
            let name = self.expect_ident("catch parameter")?;
            self.expect(TokenKind::RParen, "`)` after catch parameter")?;
            let body = self.parse_block()?;
            catches.push(Catch { types, name, body });
        }
        let finally = if self.check(TokenKind::Keyword(Keyword::Finally)) {
            Some(self.parse_block()?)
        } else {
            None
        };
        if catches.is_empty() && finally.is_none() && resources.is_empty() {
            return Err(self.error_here("try without catch, finally or resources".to_string()));
        }
        Ok(Stmt::Try {
            resources,
            body,
            catches,
            finally,
        })
    }

    fn parse_switch(&mut self) -> PResult<Stmt> {
        self.expect(TokenKind::Keyword(Keyword::Switch), "`switch`")?;
        self.expect(TokenKind::LParen, "`(` after switch")?;
        let scrutinee = self.parse_expr()?;
        self.expect(TokenKind::RParen, "`)` after switch scrutinee")?;
        self.expect(TokenKind::LBrace, "`{` opening switch body")?;
        let mut bodies = Vec::new();
        let mut case_exprs = Vec::new();
        loop {
            match self.peek_kind() {
                None => return Err(self.error_here("unterminated switch".to_string())),
                Some(TokenKind::RBrace) => {
                    self.advance();
                    break;
                }
                Some(TokenKind::Keyword(Keyword::Case)) => {
                    self.advance();
                    case_exprs.push(self.parse_expr()?);
                    while self.check(TokenKind::Comma) {
                        case_exprs.push(self.parse_expr()?);
                    }
                    self.expect(TokenKind::Colon, "`:` after case label")?;
                }
                Some(TokenKind::Keyword(Keyword::Default)) => {
                    self.advance();
                    self.expect(TokenKind::Colon, "`:` after default")?;
                }
                _ => bodies.push(self.parse_stmt()?),
            }
        }
        Ok(Stmt::Switch {
            scrutinee,
            bodies,
            case_exprs,
        })
    }

    // ------------------------------------------------------------------
    // Expressions
    // ------------------------------------------------------------------

    fn parse_expr(&mut self) -> PResult<Expr> {
        let lhs = self.parse_ternary()?;
        if self.check(TokenKind::Assign) {
            let rhs = self.parse_expr()?;
            return Ok(Expr::Binary {
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            });
        }
        Ok(lhs)
    }

    fn parse_ternary(&mut self) -> PResult<Expr> {
        let cond = self.parse_binary(0)?;
        if self.check(TokenKind::Question) {
            let then_value = self.parse_expr()?;
            self.expect(TokenKind::Colon, "`:` in conditional expression")?;
            let else_value = self.parse_ternary()?;
            return Ok(Expr::Ternary {
                cond: Box::new(cond),
                then_value: Box::new(then_value),
                else_value: Box::new(else_value),
            });
        }
        Ok(cond)
    }

    /// Binary operator levels, loosest first.
    const BINARY_LEVELS: usize = 10;

    fn level_matches(&self, level: usize) -> Option<BinOp> {
        use TokenKind::*;
        let kind = self.peek_kind()?;
        let simple = |op: BinOp| Some(op);
        match (level, kind) {
            (0, OrOr) => simple(BinOp::Simple),
            (1, AndAnd) => simple(BinOp::Simple),
            (2, Pipe) => simple(BinOp::Simple),
            (3, Caret) => simple(BinOp::Simple),
            (4, Amp) => simple(BinOp::Simple),
            (5, EqEq | NotEq) => simple(BinOp::Simple),
            (6, Lt | Le | Ge) => simple(BinOp::Simple),
            (6, Gt) => {
                // `>>` and `>>>` are adjacent Gt tokens and belong to the
                // shift level below.
                if self.gt_run_len() >= 2 {
                    None
                } else {
                    simple(BinOp::Simple)
                }
            }
            (6, Keyword(Kw::Instanceof)) => simple(BinOp::InstanceOf),
            (7, Shl) => simple(BinOp::Simple),
            (7, Gt) if self.gt_run_len() >= 2 => Some(BinOp::ShiftRight(self.gt_run_len().min(3))),
            (8, Plus | Minus) => simple(BinOp::Simple),
            (9, Star | Slash | Percent) => simple(BinOp::Simple),
            _ => None,
        }
    }

    /// Number of immediately adjacent `>` tokens starting at the cursor.
    fn gt_run_len(&self) -> usize {
        let mut len = 0;
        let mut prev: Option<&Token> = None;
        for t in &self.tokens[self.pos..] {
            if t.kind != TokenKind::Gt {
                break;
            }
            if let Some(p) = prev {
                if t.line != p.line || t.col != p.col + 1 {
                    break;
                }
            }
            len += 1;
            prev = Some(t);
        }
        len
    }

    fn parse_binary(&mut self, level: usize) -> PResult<Expr> {
        if level >= Self::BINARY_LEVELS {
            return self.parse_unary();
        }
        let mut lhs = self.parse_binary(level + 1)?;
        while let Some(op) = self.level_matches(level) {
            match op {
                BinOp::Simple => {
                    self.advance();
                    let rhs = self.parse_binary(level + 1)?;
                    lhs = Expr::Binary {
                        lhs: Box::new(lhs),
                        rhs: Box::new(rhs),
                    };
                }
                BinOp::ShiftRight(count) => {
                    for _ in 0..count {
                        self.advance();
                    }
                    let rhs = self.parse_binary(level + 1)?;
                    lhs = Expr::Binary {
                        lhs: Box::new(lhs),
                        rhs: Box::new(rhs),
                    };
                }
                BinOp::InstanceOf => {
                    self.advance();
                    let ty = self.parse_type_ref()?;
                    // Pattern binding, if present, is parsed and ignored.
                    if self.peek_kind() == Some(TokenKind::Ident) {
                        self.advance();
                    }
                    lhs = Expr::InstanceOf {
                        expr: Box::new(lhs),
                        ty,
                    };
                }
            }
        }
        Ok(lhs)
    }

    fn parse_unary(&mut self) -> PResult<Expr> {
        use TokenKind::*;
        match self.peek_kind() {
            Some(Plus | Minus | Not | Tilde | PlusPlus | MinusMinus) => {
                self.advance();
                Ok(Expr::Unary(Box::new(self.parse_unary()?)))
            }
            Some(LParen) => {
                if let Some(cast) = self.attempt(|p| p.parse_cast()) {
                    return Ok(cast);
                }
                // Parenthesized expression, then postfix continuations.
                self.advance();
                let inner = self.parse_expr()?;
                self.expect(RParen, "`)` closing parenthesized expression")?;
                self.parse_postfix_tail(inner)
            }
            _ => self.parse_postfix(),
        }
    }

    fn parse_cast(&mut self) -> PResult<Expr> {
        self.expect(TokenKind::LParen, "`(`")?;
        let ty = self.parse_type_ref()?;
        self.expect(TokenKind::RParen, "`)` closing cast")?;
        // Decide cast vs parenthesized name: a cast must be followed by
        // something that starts an operand. For reference types, `+`/`-`
        // would be binary arithmetic on a parenthesized value instead.
        let next_starts_operand = match self.peek_kind() {
            Some(
                TokenKind::Ident
                | TokenKind::IntLit
                | TokenKind::FloatLit
                | TokenKind::StringLit
                | TokenKind::CharLit
                | TokenKind::LParen
                | TokenKind::Not
                | TokenKind::Tilde,
            ) => true,
            Some(TokenKind::Keyword(
                Keyword::New
                | Keyword::This
                | Keyword::Super
                | Keyword::True
                | Keyword::False
                | Keyword::Null,
            )) => true,
            Some(
                TokenKind::Plus | TokenKind::Minus | TokenKind::PlusPlus | TokenKind::MinusMinus,
            ) => ty.primitive,
            _ => false,
        };
        if !next_starts_operand {
            return Err(self.error_here("not a cast".to_string()));
        }
        let operand = self.parse_unary()?;
        Ok(Expr::Cast {
            ty,
            expr: Box::new(operand),
        })
    }

    fn parse_postfix(&mut self) -> PResult<Expr> {
        let primary = self.parse_primary()?;
        self.parse_postfix_tail(primary)
    }

    fn parse_postfix_tail(&mut self, mut expr: Expr) -> PResult<Expr> {
        loop {
            match self.peek_kind() {
                Some(TokenKind::Dot) => match self.kind_at(1) {
                    Some(TokenKind::Ident) => {
                        self.advance();
                        let name = self.expect_ident("member name")?;
                        if self.peek_kind() == Some(TokenKind::LParen) {
                            let args = self.parse_args()?;
                            expr = Expr::Call {
                                receiver: Some(Box::new(expr)),
                                on_super: false,
                                name,
                                args,
                            };
                        } else {
                            expr = Expr::FieldAccess {
                                receiver: Box::new(expr),
                                name,
                            };
                        }
                    }
                    Some(TokenKind::Lt) => {
                        return Err(self.error_here(
                            "explicit call type arguments are not supported".to_string(),
                        ))
                    }
                    Some(TokenKind::Keyword(Keyword::This | Keyword::Super | Keyword::New)) => {
                        return Err(self
                            .error_here("qualified this/super/new is not supported".to_string()))
                    }
                    _ => return Err(self.error_here("expected member after `.`".to_string())),
                },
                Some(TokenKind::LBracket) => {
                    self.advance();
                    let index = self.parse_expr()?;
                    self.expect(TokenKind::RBracket, "`]` closing index")?;
                    expr = Expr::ArrayAccess {
                        array: Box::new(expr),
                        index: Box::new(index),
                    };
                }
                Some(TokenKind::PlusPlus | TokenKind::MinusMinus) => {
                    self.advance();
                    expr = Expr::Unary(Box::new(expr));
                }
                _ => return Ok(expr),
            }
        }
    }

    fn parse_args(&mut self) -> PResult<Vec<Expr>> {
        self.expect(TokenKind::LParen, "`(` opening arguments")?;
        let mut args = Vec::new();
        if self.check(TokenKind::RParen) {
            return Ok(args);
        }
        loop {
            args.push(self.parse_expr()?);
            if self.check(TokenKind::Comma) {
                continue;
            }
            self.expect(TokenKind::RParen, "`)` closing arguments")?;
            return Ok(args);
        }
    }

    fn parse_primary(&mut self) -> PResult<Expr> {
        use Keyword::*;
        match self.peek_kind() {
            Some(
                TokenKind::IntLit | TokenKind::FloatLit | TokenKind::StringLit | TokenKind::CharLit,
            ) => {
                self.advance();
                Ok(Expr::Literal)
            }
            Some(TokenKind::Keyword(True | False | Null)) => {
                self.advance();
                Ok(Expr::Literal)
            }
            Some(TokenKind::Keyword(This)) => {
                self.advance();
                if self.peek_kind() == Some(TokenKind::LParen) {
                    let args = self.parse_args()?;
                    return Ok(Expr::ConstructorDelegate { args });
                }
                Ok(Expr::This)
            }
            Some(TokenKind::Keyword(Super)) => {
                self.advance();
                if self.peek_kind() == Some(TokenKind::LParen) {
                    let args = self.parse_args()?;
                    return Ok(Expr::ConstructorDelegate { args });
                }
                self.expect(TokenKind::Dot, "`.` after super")?;
                let name = self.expect_ident("member after super")?;
                if self.peek_kind() == Some(TokenKind::LParen) {
                    let args = self.parse_args()?;
                    return Ok(Expr::Call {
                        receiver: None,
                        on_super: true,
                        name,
                        args,
                    });
                }
                // Inherited field: the declared-type walk through the class's
                // own supertypes covers it.
                Ok(Expr::FieldAccess {
                    receiver: Box::new(Expr::This),
                    name,
                })
            }
            Some(TokenKind::Keyword(New)) => self.parse_new(),
            Some(TokenKind::Keyword(
                Boolean | Byte | Char | Short | Int | Long | Float | Double | Void,
            )) => {
                // Primitive class literal: `int.class`.
                self.advance();
                let _ = self.parse_dims();
                self.expect(TokenKind::Dot, "`.` after primitive type")?;
                self.expect(TokenKind::Keyword(Class), "`class`")?;
                Ok(Expr::ClassLiteral)
            }
            Some(TokenKind::Ident) => self.parse_name_chain(),
            _ => Err(self.error_here("expected an expression".to_string())),
        }
    }

    /// Parses `a`, `a.b.c`, `a.b.m(...)`, `a(...)`, `a.b.c.class`.
    fn parse_name_chain(&mut self) -> PResult<Expr> {
        let first = self.expect_ident("name")?;
        if self.peek_kind() == Some(TokenKind::LParen) {
            let args = self.parse_args()?;
            return Ok(Expr::Call {
                receiver: None,
                on_super: false,
                name: first,
                args,
            });
        }
        let mut parts = vec![first];
        loop {
            if self.peek_kind() != Some(TokenKind::Dot) {
                return Ok(Expr::Name(parts));
            }
            match self.kind_at(1) {
                Some(TokenKind::Ident) => {
                    if self.kind_at(2) == Some(TokenKind::LParen) {
                        self.advance(); // dot
                        let name = self.expect_ident("method name")?;
                        let args = self.parse_args()?;
                        return Ok(Expr::Call {
                            receiver: Some(Box::new(Expr::Name(parts))),
                            on_super: false,
                            name,
                            args,
                        });
                    }
                    self.advance(); // dot
                    parts.push(self.expect_ident("name segment")?);
                }
                Some(TokenKind::Keyword(Keyword::Class)) => {
                    self.advance();
                    self.advance();
                    return Ok(Expr::ClassLiteral);
                }
                _ => return Ok(Expr::Name(parts)),
            }
        }
    }

    fn parse_new(&mut self) -> PResult<Expr> {
        self.expect(TokenKind::Keyword(Keyword::New), "`new`")?;
        let ty = self.parse_type_ref_base()?;
        match self.peek_kind() {
            Some(TokenKind::LParen) => {
                let args = self.parse_args()?;
                let body = if self.peek_kind() == Some(TokenKind::LBrace) {
                    self.advance();
                    let members = self.parse_members("")?;
                    self.expect(TokenKind::RBrace, "`}` closing anonymous class body")?;
                    Some(members)
                } else {
                    None
                };
                Ok(Expr::New { ty, args, body })
            }
            Some(TokenKind::LBracket) => {
                let mut sizes = Vec::new();
                let mut ty = ty;
                loop {
                    if self.peek_kind() == Some(TokenKind::LBracket) {
                        self.advance();
                        if self.check(TokenKind::RBracket) {
                            ty.dims += 1;
                        } else {
                            sizes.push(self.parse_expr()?);
                            self.expect(TokenKind::RBracket, "`]` closing array size")?;
                            ty.dims += 1;
                        }
                    } else {
                        break;
                    }
                }
                let init = if self.peek_kind() == Some(TokenKind::LBrace) {
                    match self.parse_array_init()? {
                        Expr::ArrayInit(values) => Some(values),
                        _ => unreachable!("parse_array_init returns ArrayInit"),
                    }
                } else {
                    None
                };
                Ok(Expr::NewArray { ty, sizes, init })
            }
            _ => Err(self.error_here("expected `(` or `[` after new".to_string())),
        }
    }
}

enum BinOp {
    Simple,
    ShiftRight(usize),
    InstanceOf,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(src: &str) -> SourceUnit {
        parse_unit("test.java", src).unwrap()
    }

    #[test]
    fn minimal_class_with_field() {
        let unit = parse("class X { Y y; }");
        assert_eq!(unit.types.len(), 1);
        let decl = &unit.types[0];
        assert_eq!(decl.name, "X");
        assert_eq!(decl.kind, ModuleKind::Class);
        match &decl.members[0] {
            Member::Field(f) => {
                assert_eq!(f.ty.name, "Y");
                assert_eq!(f.declarators[0].0, "y");
            }
            other => panic!("expected field, got {other:?}"),
        }
    }

    #[test]
    fn comments_only_file_is_empty() {
        let unit = parse("// nothing here\n/* and nothing\n here */\n");
        assert!(unit.types.is_empty());
    }

    #[test]
    fn package_and_imports_are_recorded() {
        let unit = parse(
            "package com.example.app;\nimport java.util.List;\nimport static java.lang.Math.*;\nclass K {}",
        );
        assert_eq!(unit.package.as_deref(), Some("com.example.app"));
        assert_eq!(
            unit.imports,
            vec!["java.util.List", "static java.lang.Math.*"]
        );
        assert_eq!(unit.qualified_name(&unit.types[0]), "com.example.app.K");
    }

    #[test]
    fn extends_and_implements_lists() {
        let unit = parse("class A extends B implements C, D {} interface E extends F, G {}");
        let a = &unit.types[0];
        assert_eq!(a.extends[0].name, "B");
        assert_eq!(
            a.implements
                .iter()
                .map(|t| t.name.as_str())
                .collect::<Vec<_>>(),
            vec!["C", "D"]
        );
        let e = &unit.types[1];
        assert_eq!(
            e.extends
                .iter()
                .map(|t| t.name.as_str())
                .collect::<Vec<_>>(),
            vec!["F", "G"]
        );
    }

    #[test]
    fn constructor_and_method_signatures() {
        let unit = parse(
            "class A { A(D d1) { d1.run(); } C work(B b, D... rest) throws Bad { return null; } }",
        );
        let decl = &unit.types[0];
        match &decl.members[0] {
            Member::Constructor(c) => {
                assert_eq!(c.params[0].ty.name, "D");
                assert!(c.return_type.is_none());
            }
            other => panic!("expected constructor, got {other:?}"),
        }
        match &decl.members[1] {
            Member::Method(m) => {
                assert_eq!(m.return_type.as_ref().unwrap().name, "C");
                assert_eq!(m.params.len(), 2);
                assert!(m.params[1].varargs);
            }
            other => panic!("expected method, got {other:?}"),
        }
    }

    #[test]
    fn generic_types_are_erased() {
        let unit = parse("class A { java.util.List<D> xs; Map<K, List<V>> m; }");
        let decl = &unit.types[0];
        let field = |i: usize| match &decl.members[i] {
            Member::Field(f) => f,
            other => panic!("expected field, got {other:?}"),
        };
        assert_eq!(field(0).ty.name, "java.util.List");
        assert_eq!(field(1).ty.name, "Map");
    }

    #[test]
    fn arrays_keep_dimensions() {
        let unit = parse("class A { D[] one; D two[]; int[][] grid; }");
        let decl = &unit.types[0];
        match (&decl.members[0], &decl.members[1], &decl.members[2]) {
            (Member::Field(a), Member::Field(b), Member::Field(c)) => {
                assert_eq!(a.ty.dims, 1);
                assert_eq!(b.ty.dims, 0);
                assert_eq!(b.declarators[0].1, 1);
                assert_eq!(c.ty.dims, 2);
                assert!(c.ty.primitive);
            }
            _ => panic!("expected three fields"),
        }
    }

    #[test]
    fn statements_cover_common_forms() {
        parse(
            r#"class A {
                void m(int n) {
                    int x = 0;
                    for (int i = 0; i < n; i++) { x += i; }
                    for (D d : items) { d.go(); }
                    while (x > 0) { x--; }
                    do { x++; } while (x < 3);
                    if (x == 1) { x = 2; } else x = 3;
                    switch (x) { case 1: x = 9; break; default: break; }
                    try (R r = open()) { r.use(); } catch (Bad | Worse e) { log(e); } finally { x = 0; }
                    synchronized (this) { x = 4; }
                    assert x > 0 : "must be positive";
                    String s = x > 2 ? "big" : "small";
                    Object o = (Object) s;
                    int[] ys = new int[5];
                    D[] ds = new D[]{ null };
                    label: while (true) { break label; }
                    throw new Bad();
                }
            }"#,
        );
    }

    #[test]
    fn anonymous_class_bodies_parse() {
        let unit = parse(
            "class A { void m() { Runnable r = new Runnable() { public void run() { helper(); } }; } }",
        );
        assert_eq!(unit.types.len(), 1);
    }

    #[test]
    fn nested_and_local_classes_parse() {
        let unit =
            parse("class A { static class Inner extends B { } void m() { class Local { } } }");
        let decl = &unit.types[0];
        assert!(matches!(&decl.members[0], Member::Nested(n) if n.name == "Inner"));
    }

    #[test]
    fn shift_operators_via_adjacent_gt() {
        parse("class A { void m() { int x = 8 >> 2; int y = -1 >>> 3; int z = 1 << 4; boolean b = 2 > 1; } }");
    }

    #[test]
    fn nested_generics_do_not_eat_shift() {
        let unit = parse("class A { Map<String, List<D>> m; void f() { int x = a.size() >> 1; } }");
        assert_eq!(unit.types.len(), 1);
    }

    #[test]
    fn record_is_an_ordinary_identifier() {
        // `record` is only contextually reserved in Java; methods, fields and
        // calls may use it freely.
        let unit = parse(
            "class Ledger { int record; void record(int n) { this.record = n; } void use(Ledger l) { l.record(1); } }",
        );
        assert_eq!(unit.types[0].members.len(), 3);
    }

    #[test]
    fn enum_is_out_of_subset_with_location() {
        let err = parse_unit("e.java", "enum Color { RED }").unwrap_err();
        assert_eq!(err.line, 1);
        assert!(err.message.contains("enum"));
    }

    #[test]
    fn unbalanced_brace_is_an_error() {
        assert!(parse_unit("b.java", "class A { void m() { ").is_err());
    }

    #[test]
    fn field_access_vs_assignment_disambiguation() {
        parse("class A { void m() { a.b.c = 5; D d = x; d2.field.n(); } }");
    }

    #[test]
    fn class_literals_parse() {
        parse("class A { Object a = D.class; Object b = int.class; Object c = pkg.D.class; }");
    }
}
