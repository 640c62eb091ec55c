//! Recursive-descent parser from tokens to [`Program`].
//!
//! Grammar (layout tokens written as NL, INDENT, DEDENT):
//!
//! ```text
//! program    := [package] import* (class | directive)* EOF
//! package    := 'package' NAME NL
//! import     := 'import' NAME NL
//! class      := 'class' NAME tparam* ['extends' tyapp+] NL
//!               [INDENT member* DEDENT] 'end' NL
//! member     := 'extends' tyapp+ NL                  (first member only)
//!             | 'abstract' NL [INDENT decl* DEDENT]
//!             | directive
//!             | ['@tailrec' [NL]] NAME tparam* param* [':' type] '=' body
//! decl       := NAME tparam* param* ':' type NL
//! directive  := 'directive' NAME NL (RAW NL)*
//! tparam     := '[' NAME [':' 'Type' | ('subtype'|'<:') type | ('supertype'|'>:') type] ']'
//! param      := '(' NAME ':' type ')'
//! type       := tyapp ['-->' type]
//! tyapp      := tyatom ('[' type ']')*
//! tyatom     := NAME | '(' type ')'
//! ```
//!
//! A definition body is one expression that ends at the first line break
//! not followed by deeper indentation; inside it layout is irrelevant.
//!
//! ```text
//! expr       := 'lambda' lparam '-->' expr
//!             | 'if' expr 'then' expr 'else' expr
//!             | 'match' expr ('case' pattern '==>' expr)+
//!             | or
//! or         := and ('or' and)*
//! and        := cmp ('and' cmp)*
//! cmp        := add (('=='|'<'|'<='|'>'|'>=') add)*
//! add        := mul (('+'|'-') mul)*
//! mul        := unary (('*'|'/') unary)*
//! unary      := ('not' | '-') unary | app
//! app        := atom (atom | '(' NAME ':=' expr ')' | '[' type ']')*
//! atom       := INT | STRING | 'true' | 'false' | NAME | 'this' | '(' expr ')'
//! pattern    := '_' | literal | '-' INT | NAME subpattern*
//! ```
//!
//! Unary minus on an integer literal folds into the literal; on any other
//! operand it becomes `0 - operand`.

use std::sync::Arc;

use num_bigint::BigInt;

use crate::lexer::{unescape_string, LexResult};
use crate::syntax::*;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseResult {
    /// Present iff `diagnostics` holds no error.
    pub program: Option<Program>,
    pub diagnostics: Vec<Diagnostic>,
}

pub fn parse_program(lexed: &LexResult) -> ParseResult {
    if has_errors(&lexed.diagnostics) {
        return ParseResult {
            program: None,
            diagnostics: lexed.diagnostics.clone(),
        };
    }
    let mut parser = Parser::new(&lexed.tokens);
    let program = parser.program();
    let mut diagnostics = lexed.diagnostics.clone();
    diagnostics.extend(parser.diagnostics);
    ParseResult {
        program: (!has_errors(&diagnostics)).then_some(program),
        diagnostics,
    }
}

/// Parses one expression starting at `position`, skipping layout and
/// comment tokens. Returns the expression and the index of the first token
/// after it.
pub fn parse_expression(tokens: &[Token], position: usize) -> Result<(Expr, usize), Diagnostic> {
    let mut parser = ExprParser::new(&tokens[position.min(tokens.len())..]);
    let expr = parser.expr()?;
    Ok((expr, position + parser.pos))
}

type PResult<T> = Result<T, Diagnostic>;

fn unexpected(token: &Token, expected: &str) -> Diagnostic {
    Diagnostic::new(
        Code::UnexpectedToken,
        format!("unexpected {}, expected {}", token.describe(), expected),
        token.span.clone(),
    )
}

fn is_constructor_like(name: &str) -> bool {
    name.ends_with('_') || name.starts_with(|c: char| c.is_uppercase())
}

/// Declaration-level parser; layout tokens are significant here.
struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
    diagnostics: Vec<Diagnostic>,
    comments: Vec<String>,
}

impl<'t> Parser<'t> {
    fn new(tokens: &'t [Token]) -> Self {
        Self {
            tokens,
            pos: 0,
            diagnostics: Vec::new(),
            comments: Vec::new(),
        }
    }

    fn peek(&self) -> &'t Token {
        &self.tokens[self.pos.min(self.tokens.len() - 1)]
    }

    fn peek_kind(&self) -> TokenKind {
        self.peek().kind
    }

    fn advance(&mut self) -> &'t Token {
        let token = self.peek();
        if self.pos < self.tokens.len() - 1 {
            self.pos += 1;
        }
        token
    }

    fn expect_kind(&mut self, kind: TokenKind, expected: &str) -> PResult<&'t Token> {
        if self.peek_kind() == kind {
            Ok(self.advance())
        } else {
            Err(unexpected(self.peek(), expected))
        }
    }

    fn expect_word(&mut self, word: &str) -> PResult<&'t Token> {
        if self.peek().is_word(word) {
            Ok(self.advance())
        } else {
            Err(unexpected(self.peek(), &format!("`{word}`")))
        }
    }

    fn expect_op(&mut self, op: &str) -> PResult<&'t Token> {
        if self.peek().is_op(op) {
            Ok(self.advance())
        } else {
            Err(unexpected(self.peek(), &format!("`{op}`")))
        }
    }

    /// A simple (undotted) name.
    fn simple_name(&mut self, what: &str) -> PResult<&'t Token> {
        let token = self.expect_kind(TokenKind::Identifier, what)?;
        if token.text.contains('.') {
            return Err(Diagnostic::new(
                Code::UnexpectedToken,
                format!("unexpected `{}`, expected {} without dots", token.text, what),
                token.span.clone(),
            ));
        }
        Ok(token)
    }

    /// Skips blank lines, collecting comment text for the next declaration.
    fn skip_blank(&mut self) {
        loop {
            match self.peek_kind() {
                TokenKind::Newline => {
                    self.advance();
                }
                TokenKind::Comment => {
                    let text = self.advance().text.clone();
                    self.comments.push(text[2..].to_string());
                }
                _ => return,
            }
        }
    }

    fn take_comments(&mut self) -> Vec<String> {
        std::mem::take(&mut self.comments)
    }

    /// End of a declaration line: optional trailing comment, then a line
    /// break or end of input.
    fn expect_line_end(&mut self) -> PResult<()> {
        if self.peek_kind() == TokenKind::Comment {
            self.advance();
        }
        match self.peek_kind() {
            TokenKind::Newline => {
                self.advance();
                Ok(())
            }
            TokenKind::EndOfInput | TokenKind::Dedent => Ok(()),
            _ => Err(unexpected(self.peek(), "end of line")),
        }
    }

    fn program(&mut self) -> Program {
        let mut program = Program::default();
        let mut seen_declaration = false;
        loop {
            self.skip_blank();
            let start = self.pos;
            let token = self.peek();
            let result = match token.kind {
                TokenKind::EndOfInput => break,
                TokenKind::ReservedWord if token.text == "package" => {
                    let result = self.package();
                    match result {
                        Ok(name) if seen_declaration || program.package.is_some() => Err(Diagnostic::new(
                            Code::PackageNotFirst,
                            "`package` must be the first declaration and may appear only once",
                            name.span,
                        )),
                        Ok(name) => {
                            program.package = Some(name);
                            Ok(())
                        }
                        Err(e) => Err(e),
                    }
                }
                TokenKind::ReservedWord if token.text == "import" => match self.import() {
                    Ok(name) if !program.items.is_empty() => Err(Diagnostic::new(
                        Code::UnexpectedToken,
                        "`import` must precede all classes and directives",
                        name.span,
                    )),
                    Ok(name) => {
                        program.imports.push(name);
                        Ok(())
                    }
                    Err(e) => Err(e),
                },
                TokenKind::ReservedWord if token.text == "class" => self.class().map(|c| {
                    program.items.push(TopItem::Class(c));
                }),
                TokenKind::ReservedWord if token.text == "directive" => {
                    self.comments.clear();
                    self.directive().map(|d| program.items.push(TopItem::Directive(d)))
                }
                _ => Err(unexpected(token, "`class`, `directive`, `package` or `import`")),
            };
            seen_declaration = true;
            if let Err(diagnostic) = result {
                self.diagnostics.push(diagnostic);
                self.synchronize(start);
            }
        }
        program
    }

    /// Skips to the next top-level keyword at column 1.
    fn synchronize(&mut self, item_start: usize) {
        if self.pos == item_start {
            self.advance();
        }
        self.comments.clear();
        loop {
            let token = self.peek();
            if token.kind == TokenKind::EndOfInput {
                return;
            }
            if token.kind == TokenKind::ReservedWord
                && token.span.col_start == 1
                && matches!(token.text.as_str(), "class" | "package" | "import" | "directive")
            {
                return;
            }
            self.advance();
        }
    }

    fn qualified_name(&mut self) -> PResult<QualifiedName> {
        let token = self.expect_kind(TokenKind::Identifier, "a name")?;
        Ok(QualifiedName {
            name: token.text.clone(),
            span: token.span.clone(),
        })
    }

    fn package(&mut self) -> PResult<QualifiedName> {
        let keyword = self.expect_word("package")?;
        let mut name = self.qualified_name()?;
        name.span = keyword.span.to(&name.span);
        self.expect_line_end()?;
        Ok(name)
    }

    fn import(&mut self) -> PResult<QualifiedName> {
        let keyword = self.expect_word("import")?;
        let mut name = self.qualified_name()?;
        name.span = keyword.span.to(&name.span);
        self.expect_line_end()?;
        Ok(name)
    }

    fn class(&mut self) -> PResult<ClassDecl> {
        let comments = self.take_comments();
        let keyword = self.expect_word("class")?;
        let name_token = self.simple_name("a class name")?;
        if name_token.text.ends_with('_') {
            self.diagnostics.push(Diagnostic::new(
                Code::ConstructorStyleClassName,
                format!(
                    "class name `{}` ends with `_`, which is reserved for default constructors",
                    name_token.text
                ),
                name_token.span.clone(),
            ));
        }
        let type_params = self.type_params()?;
        let mut extends = Vec::new();
        if self.peek().is_word("extends") {
            extends = self.extends_list()?;
        }
        self.expect_line_end()?;

        let mut items = Vec::new();
        self.skip_blank();
        if self.peek_kind() == TokenKind::Indent {
            self.advance();
            loop {
                self.skip_blank();
                let token = self.peek();
                match token.kind {
                    TokenKind::Dedent => {
                        self.advance();
                        break;
                    }
                    TokenKind::EndOfInput => break,
                    TokenKind::ReservedWord if token.text == "extends" && items.is_empty() && extends.is_empty() => {
                        self.comments.clear();
                        extends = self.extends_list()?;
                        self.expect_line_end()?;
                    }
                    TokenKind::ReservedWord if token.text == "abstract" => {
                        self.comments.clear();
                        items.push(ClassItem::Abstract(self.abstract_block()?));
                    }
                    TokenKind::ReservedWord if token.text == "directive" => {
                        self.comments.clear();
                        items.push(ClassItem::Directive(self.directive()?));
                    }
                    TokenKind::Annotation | TokenKind::Identifier => {
                        items.push(ClassItem::Definition(self.definition()?));
                    }
                    _ => return Err(unexpected(token, "a definition, `abstract`, `directive` or `end`")),
                }
            }
        }
        self.skip_blank();
        self.comments.clear();
        let end = self.peek();
        if !end.is_word("end") {
            return Err(Diagnostic::new(
                Code::MissingEnd,
                format!("class `{}` is missing its `end`", name_token.text),
                keyword.span.to(&name_token.span),
            ));
        }
        self.advance();
        self.expect_line_end()?;
        Ok(ClassDecl {
            name: name_token.text.clone(),
            type_params,
            extends,
            items,
            comments,
            span: keyword.span.to(&end.span),
        })
    }

    fn extends_list(&mut self) -> PResult<Vec<TypeExpr>> {
        self.expect_word("extends")?;
        let mut types = Vec::new();
        while matches!(self.peek_kind(), TokenKind::Identifier | TokenKind::OpenParen) {
            types.push(self.sub_parser(|p| p.type_app())?);
        }
        if types.is_empty() {
            return Err(unexpected(self.peek(), "a type after `extends`"));
        }
        Ok(types)
    }

    /// Runs an expression-level production on the tokens from the current
    /// position; layout tokens inside it are not skipped.
    fn sub_parser<T>(&mut self, f: impl FnOnce(&mut ExprParser<'t>) -> PResult<T>) -> PResult<T> {
        let mut sub = ExprParser::layout_sensitive(&self.tokens[self.pos..]);
        let value = f(&mut sub)?;
        self.pos += sub.pos;
        Ok(value)
    }

    fn type_params(&mut self) -> PResult<Vec<TypeParam>> {
        let mut params = Vec::new();
        while self.peek_kind() == TokenKind::OpenBracket {
            params.push(self.sub_parser(|p| p.type_param())?);
        }
        Ok(params)
    }

    fn params(&mut self) -> PResult<Vec<Param>> {
        let mut params = Vec::new();
        while self.peek_kind() == TokenKind::OpenParen {
            let open = self.advance();
            let name = self.simple_name("a parameter name")?;
            self.expect_op(":")?;
            let ty = self.sub_parser(|p| p.type_expr())?;
            let close = self.expect_kind(TokenKind::CloseParen, "`)`")?;
            params.push(Param {
                name: name.text.clone(),
                ty,
                span: open.span.to(&close.span),
            });
        }
        Ok(params)
    }

    fn abstract_block(&mut self) -> PResult<Vec<Definition>> {
        self.expect_word("abstract")?;
        self.expect_line_end()?;
        let mut members = Vec::new();
        self.skip_blank();
        if self.peek_kind() != TokenKind::Indent {
            return Ok(members);
        }
        self.advance();
        loop {
            self.skip_blank();
            match self.peek_kind() {
                TokenKind::Dedent => {
                    self.advance();
                    break;
                }
                TokenKind::EndOfInput => break,
                _ => members.push(self.declaration()?),
            }
        }
        // Comments read before the dedent belong to the next item.
        Ok(members)
    }

    fn declaration(&mut self) -> PResult<Definition> {
        let comments = self.take_comments();
        let name = self.simple_name("a declaration name")?;
        let type_params = self.type_params()?;
        let params = self.params()?;
        self.expect_op(":")?;
        let ty = self.sub_parser(|p| p.type_expr())?;
        let end_span = self.tokens[self.pos - 1].span.clone();
        if self.peek().is_op("=") {
            return Err(Diagnostic::new(
                Code::UnexpectedToken,
                "unexpected `=`, declarations in an `abstract` block have no body",
                self.peek().span.clone(),
            ));
        }
        self.expect_line_end()?;
        Ok(Definition {
            name: name.text.clone(),
            type_params,
            params,
            result_type: Some(ty),
            body: None,
            is_tailrec: false,
            comments,
            span: name.span.to(&end_span),
        })
    }

    fn definition(&mut self) -> PResult<Definition> {
        let comments = self.take_comments();
        let start = self.peek().span.clone();
        let mut is_tailrec = false;
        if self.peek_kind() == TokenKind::Annotation {
            let annotation = self.advance();
            if annotation.text != "@tailrec" {
                return Err(Diagnostic::new(
                    Code::UnexpectedToken,
                    format!("unknown annotation `{}`, expected `@tailrec`", annotation.text),
                    annotation.span.clone(),
                ));
            }
            is_tailrec = true;
            if self.peek_kind() == TokenKind::Comment {
                self.advance();
            }
            while self.peek_kind() == TokenKind::Newline {
                self.advance();
            }
        }
        let name = self.simple_name("a definition name")?;
        let type_params = self.type_params()?;
        let params = self.params()?;
        let result_type = if self.peek().is_op(":") {
            self.advance();
            Some(self.sub_parser(|p| p.type_expr())?)
        } else {
            None
        };
        self.expect_op("=")?;
        let body = self.body()?;
        Ok(Definition {
            name: name.text.clone(),
            type_params,
            params,
            result_type,
            span: start.to(&body.span),
            body: Some(Arc::new(body)),
            is_tailrec,
            comments,
        })
    }

    /// Finds the extent of a definition body and parses it as one
    /// expression with layout ignored.
    fn body(&mut self) -> PResult<Expr> {
        let start = self.pos;
        let mut depth = 0usize;
        let mut i = start;
        let end = loop {
            let token = &self.tokens[i];
            match token.kind {
                TokenKind::EndOfInput => break i,
                TokenKind::Indent => depth += 1,
                TokenKind::Dedent if depth == 0 => break i,
                TokenKind::Dedent => {
                    depth -= 1;
                    if depth == 0 {
                        break i + 1;
                    }
                }
                TokenKind::Newline if depth == 0 => {
                    let next = self.tokens[i + 1..]
                        .iter()
                        .find(|t| !matches!(t.kind, TokenKind::Newline | TokenKind::Comment));
                    if !matches!(next, Some(t) if t.kind == TokenKind::Indent) {
                        break i + 1;
                    }
                }
                _ => {}
            }
            i += 1;
        };
        let mut sub = ExprParser::new(&self.tokens[start..end]);
        let expr = sub.expr()?;
        let rest = sub.peek();
        if rest.kind != TokenKind::EndOfInput {
            return Err(unexpected(rest, "end of definition"));
        }
        // Comment lines after the last line of an indented body come
        // before the dedent but belong to the next item.
        let tail = self.tokens[start..end]
            .iter()
            .rposition(|t| !t.kind.is_trivia())
            .map_or(start, |i| start + i + 1);
        let last_line = self.tokens[tail - 1].span.line_end;
        for token in &self.tokens[tail..end] {
            if token.kind == TokenKind::Comment && token.span.line_start > last_line {
                self.comments.push(token.text[2..].to_string());
            }
        }
        self.pos = end;
        Ok(expr)
    }

    fn directive(&mut self) -> PResult<DirectiveBlock> {
        let keyword = self.expect_word("directive")?;
        let target = self.simple_name("a directive target")?;
        self.expect_line_end()?;
        let mut raw_lines = Vec::new();
        let mut base = None;
        let mut span = keyword.span.to(&target.span);
        while self.peek_kind() == TokenKind::DirectiveLine {
            let token = self.advance();
            if token.text.is_empty() {
                raw_lines.push(String::new());
            } else {
                let col = token.span.col_start as usize;
                let base = *base.get_or_insert(col);
                raw_lines.push(format!("{}{}", " ".repeat(col.saturating_sub(base)), token.text));
                span = span.to(&token.span);
            }
            if self.peek_kind() == TokenKind::Newline {
                self.advance();
            }
        }
        Ok(DirectiveBlock {
            target: target.text.clone(),
            raw_lines,
            span,
        })
    }
}

/// Expression, pattern and type parser. By default it skips layout and
/// comment tokens; the end of its token slice reads as end of input.
struct ExprParser<'t> {
    tokens: &'t [Token],
    pos: usize,
    skip_trivia: bool,
    eof: Token,
}

impl<'t> ExprParser<'t> {
    fn new(tokens: &'t [Token]) -> Self {
        let span = tokens
            .last()
            .map(|t| SourceSpan::point(t.span.file.clone(), t.span.line_end, t.span.col_end))
            .unwrap_or_default();
        Self {
            tokens,
            pos: 0,
            skip_trivia: true,
            eof: Token {
                kind: TokenKind::EndOfInput,
                text: String::new(),
                span,
            },
        }
    }

    fn layout_sensitive(tokens: &'t [Token]) -> Self {
        Self {
            skip_trivia: false,
            ..Self::new(tokens)
        }
    }

    fn skip(&mut self) {
        if self.skip_trivia {
            while self.pos < self.tokens.len() && self.tokens[self.pos].kind.is_trivia() {
                self.pos += 1;
            }
        }
    }

    fn peek(&mut self) -> &Token {
        self.skip();
        self.tokens.get(self.pos).unwrap_or(&self.eof)
    }

    /// Token `n` significant tokens ahead of the current one.
    fn peek_nth(&mut self, n: usize) -> &Token {
        self.skip();
        let mut i = self.pos;
        let mut left = n;
        while i < self.tokens.len() {
            if !(self.skip_trivia && self.tokens[i].kind.is_trivia()) {
                if left == 0 {
                    return &self.tokens[i];
                }
                left -= 1;
            }
            i += 1;
        }
        &self.eof
    }

    fn advance(&mut self) -> Token {
        let token = self.peek().clone();
        if self.pos < self.tokens.len() {
            self.pos += 1;
        }
        token
    }

    fn expect(&mut self, pred: impl Fn(&Token) -> bool, expected: &str) -> PResult<Token> {
        if pred(self.peek()) {
            Ok(self.advance())
        } else {
            Err(unexpected(self.peek(), expected))
        }
    }

    fn expect_op(&mut self, op: &str) -> PResult<Token> {
        self.expect(|t| t.is_op(op), &format!("`{op}`"))
    }

    fn expect_word(&mut self, word: &str) -> PResult<Token> {
        self.expect(|t| t.is_word(word), &format!("`{word}`"))
    }

    fn simple_name(&mut self, what: &str) -> PResult<Token> {
        let token = self.expect(|t| t.kind == TokenKind::Identifier, what)?;
        if token.text.contains('.') {
            return Err(Diagnostic::new(
                Code::UnexpectedToken,
                format!("unexpected `{}`, expected {} without dots", token.text, what),
                token.span,
            ));
        }
        Ok(token)
    }

    // ---- types ----

    fn type_expr(&mut self) -> PResult<TypeExpr> {
        let domain = self.type_app()?;
        if self.peek().is_op("-->") {
            self.advance();
            let codomain = self.type_expr()?;
            return Ok(TypeExpr::Function {
                domain: Box::new(domain),
                codomain: Box::new(codomain),
            });
        }
        Ok(domain)
    }

    fn type_app(&mut self) -> PResult<TypeExpr> {
        let base = self.type_atom()?;
        let mut args = Vec::new();
        while self.peek().kind == TokenKind::OpenBracket {
            self.advance();
            args.push(self.type_expr()?);
            self.expect(|t| t.kind == TokenKind::CloseBracket, "`]`")?;
        }
        if args.is_empty() {
            Ok(base)
        } else {
            Ok(TypeExpr::Applied {
                base: Box::new(base),
                args,
            })
        }
    }

    fn type_atom(&mut self) -> PResult<TypeExpr> {
        let token = self.peek();
        match token.kind {
            TokenKind::Identifier => Ok(TypeExpr::Named(self.advance().text)),
            TokenKind::OpenParen => {
                self.advance();
                let inner = self.type_expr()?;
                self.expect(|t| t.kind == TokenKind::CloseParen, "`)`")?;
                Ok(inner)
            }
            _ => Err(unexpected(token, "a type")),
        }
    }

    fn type_param(&mut self) -> PResult<TypeParam> {
        let open = self.expect(|t| t.kind == TokenKind::OpenBracket, "`[`")?;
        let name = self.simple_name("a type parameter name")?;
        let token = self.peek().clone();
        let bound = if token.is_op(":") {
            self.advance();
            self.expect(|t| t.kind == TokenKind::Identifier && t.text == "Type", "`Type`")?;
            TypeBound::None
        } else if token.is_word("subtype") || token.is_op("<:") {
            self.advance();
            TypeBound::Subtype(self.type_expr()?)
        } else if token.is_word("supertype") || token.is_op(">:") {
            self.advance();
            TypeBound::Supertype(self.type_expr()?)
        } else {
            TypeBound::None
        };
        let close = self.expect(|t| t.kind == TokenKind::CloseBracket, "`]`")?;
        Ok(TypeParam {
            name: name.text,
            bound,
            span: open.span.to(&close.span),
        })
    }

    // ---- expressions ----

    fn expr(&mut self) -> PResult<Expr> {
        let token = self.peek();
        if token.is_word("lambda") {
            self.lambda()
        } else if token.is_word("if") {
            self.if_expr()
        } else if token.is_word("match") {
            self.match_expr()
        } else {
            self.binary(1)
        }
    }

    fn lambda(&mut self) -> PResult<Expr> {
        let keyword = self.expect_word("lambda")?;
        let (param, param_type) = if self.peek().kind == TokenKind::OpenParen {
            self.advance();
            let name = self.simple_name("a parameter name")?;
            self.expect_op(":")?;
            let ty = self.type_expr()?;
            self.expect(|t| t.kind == TokenKind::CloseParen, "`)`")?;
            (name.text, Some(ty))
        } else {
            (self.simple_name("a parameter name")?.text, None)
        };
        self.expect_op("-->")?;
        let body = self.expr()?;
        Ok(Expr::new(
            ExprKind::Lambda {
                param,
                param_type,
                body: Arc::new(body.clone()),
            },
            keyword.span.to(&body.span),
        ))
    }

    fn if_expr(&mut self) -> PResult<Expr> {
        let keyword = self.expect_word("if")?;
        let condition = self.expr()?;
        self.expect_word("then")?;
        let then_branch = self.expr()?;
        if !self.peek().is_word("else") {
            return Err(Diagnostic::new(
                Code::MissingElse,
                format!(
                    "`if` without `else` (found {}); both branches are required",
                    self.peek().describe()
                ),
                keyword.span.to(&then_branch.span),
            ));
        }
        self.advance();
        let else_branch = self.expr()?;
        let span = keyword.span.to(&else_branch.span);
        Ok(Expr::new(
            ExprKind::If {
                condition: Arc::new(condition),
                then_branch: Arc::new(then_branch),
                else_branch: Arc::new(else_branch),
            },
            span,
        ))
    }

    fn match_expr(&mut self) -> PResult<Expr> {
        let keyword = self.expect_word("match")?;
        let scrutinee = self.expr()?;
        let mut cases = Vec::new();
        let mut span = keyword.span.to(&scrutinee.span);
        while self.peek().is_word("case") {
            self.advance();
            let pattern = self.pattern()?;
            if !self.peek().is_op("==>") {
                let next = self.peek().clone();
                return Err(Diagnostic::new(
                    Code::InvalidPattern,
                    format!(
                        "pattern must be a constructor, literal or variable (found {} after it)",
                        next.describe()
                    ),
                    pattern.span.to(&next.span),
                ));
            }
            self.advance();
            let body = self.expr()?;
            span = span.to(&body.span);
            cases.push(MatchCase {
                pattern,
                body: Arc::new(body),
            });
        }
        if cases.is_empty() {
            return Err(Diagnostic::new(
                Code::EmptyMatch,
                format!("`match` needs at least one `case` (found {})", self.peek().describe()),
                keyword.span.to(&scrutinee.span),
            ));
        }
        Ok(Expr::new(
            ExprKind::Match {
                scrutinee: Arc::new(scrutinee),
                cases,
            },
            span,
        ))
    }

    fn binary_op(&mut self, level: u8) -> Option<BinaryOp> {
        let token = self.peek();
        let op = match token.kind {
            TokenKind::OperatorSymbol => BinaryOp::from_symbol(&token.text),
            TokenKind::ReservedWord if token.text == "and" => Some(BinaryOp::And),
            TokenKind::ReservedWord if token.text == "or" => Some(BinaryOp::Or),
            _ => None,
        };
        op.filter(|op| op.precedence() == level)
    }

    /// Left-associative binary operators at precedence `level` and above.
    fn binary(&mut self, level: u8) -> PResult<Expr> {
        if level > 5 {
            return self.unary();
        }
        let mut left = self.binary(level + 1)?;
        while let Some(op) = self.binary_op(level) {
            self.advance();
            let right = self.binary(level + 1)?;
            let span = left.span.to(&right.span);
            left = Expr::new(
                ExprKind::Binary {
                    op,
                    left: Arc::new(left),
                    right: Arc::new(right),
                },
                span,
            );
        }
        Ok(left)
    }

    fn unary(&mut self) -> PResult<Expr> {
        let token = self.peek().clone();
        if token.is_word("not") {
            self.advance();
            let operand = self.unary()?;
            let span = token.span.to(&operand.span);
            return Ok(Expr::new(ExprKind::Not(Arc::new(operand)), span));
        }
        if token.is_op("-") {
            self.advance();
            let operand = self.unary()?;
            let span = token.span.to(&operand.span);
            return Ok(match operand.kind {
                ExprKind::Int(v) => Expr::new(ExprKind::Int(-v), span),
                _ => Expr::new(
                    ExprKind::Binary {
                        op: BinaryOp::Sub,
                        left: Arc::new(Expr::new(ExprKind::Int(BigInt::from(0)), token.span.clone())),
                        right: Arc::new(operand),
                    },
                    span,
                ),
            });
        }
        self.application()
    }

    fn starts_atom(token: &Token) -> bool {
        match token.kind {
            TokenKind::IntegerLiteral | TokenKind::StringLiteral | TokenKind::Identifier | TokenKind::OpenParen => true,
            TokenKind::ReservedWord => matches!(token.text.as_str(), "true" | "false" | "this"),
            _ => false,
        }
    }

    fn application(&mut self) -> PResult<Expr> {
        let mut expr = self.atom()?;
        let mut named: Option<SourceSpan> = None;
        let mut positional: Option<SourceSpan> = None;
        loop {
            let token = self.peek().clone();
            if token.kind == TokenKind::OpenBracket {
                self.advance();
                let type_arg = self.type_expr()?;
                let close = self.expect(|t| t.kind == TokenKind::CloseBracket, "`]`")?;
                let span = expr.span.to(&close.span);
                expr = Expr::new(
                    ExprKind::TypeApply {
                        function: Arc::new(expr),
                        type_arg,
                    },
                    span,
                );
                continue;
            }
            if token.kind == TokenKind::OpenParen
                && self.peek_nth(1).kind == TokenKind::Identifier
                && self.peek_nth(2).is_op(":=")
            {
                self.advance();
                let name = self.simple_name("a parameter name")?;
                self.advance();
                let argument = self.expr()?;
                let close = self.expect(|t| t.kind == TokenKind::CloseParen, "`)`")?;
                let span = expr.span.to(&close.span);
                named = Some(token.span.to(&close.span));
                expr = Expr::new(
                    ExprKind::NamedApply {
                        function: Arc::new(expr),
                        param: name.text,
                        argument: Arc::new(argument),
                    },
                    span,
                );
            } else if Self::starts_atom(&token) {
                let argument = self.atom()?;
                let end = self.tokens[..self.pos]
                    .iter()
                    .rev()
                    .find(|t| !t.kind.is_trivia())
                    .map(|t| t.span.clone())
                    .unwrap_or_else(|| argument.span.clone());
                positional = Some(token.span.to(&end));
                let span = expr.span.to(&end);
                expr = Expr::new(
                    ExprKind::Apply {
                        function: Arc::new(expr),
                        argument: Arc::new(argument),
                    },
                    span,
                );
            } else {
                break;
            }
            if let (Some(a), Some(b)) = (&named, &positional) {
                return Err(Diagnostic::new(
                    Code::MixedArguments,
                    "named (`:=`) and positional arguments cannot be mixed in one call",
                    a.to(b),
                ));
            }
        }
        Ok(expr)
    }

    fn atom(&mut self) -> PResult<Expr> {
        let token = self.peek().clone();
        let kind = match token.kind {
            TokenKind::IntegerLiteral => ExprKind::Int(token.text.parse().expect("lexer yields digits")),
            TokenKind::StringLiteral => ExprKind::Str(unescape_string(&token.text)),
            TokenKind::Identifier => ExprKind::Ident(token.text.clone()),
            TokenKind::ReservedWord if token.text == "true" => ExprKind::Bool(true),
            TokenKind::ReservedWord if token.text == "false" => ExprKind::Bool(false),
            TokenKind::ReservedWord if token.text == "this" => ExprKind::SelfRef,
            TokenKind::OpenParen => {
                self.advance();
                let inner = self.expr()?;
                self.expect(|t| t.kind == TokenKind::CloseParen, "`)`")?;
                return Ok(inner);
            }
            _ => return Err(unexpected(&token, "an expression")),
        };
        self.advance();
        Ok(Expr::new(kind, token.span))
    }

    // ---- patterns ----

    fn pattern(&mut self) -> PResult<Pattern> {
        let token = self.peek().clone();
        if token.kind == TokenKind::Identifier && !token.text.contains('.') && token.text != "_" {
            self.advance();
            let mut args = Vec::new();
            let mut span = token.span.clone();
            while Self::starts_subpattern(self.peek()) {
                let (arg, end) = self.subpattern()?;
                span = span.to(&end);
                args.push(arg);
            }
            if !args.is_empty() && !is_constructor_like(&token.text) {
                return Err(Diagnostic::new(
                    Code::InvalidPattern,
                    format!(
                        "`{}` is applied to arguments but is not a constructor; patterns must be constructors, literals or variables",
                        token.text
                    ),
                    span,
                ));
            }
            let kind = if args.is_empty() && !is_constructor_like(&token.text) {
                PatternKind::Var(token.text)
            } else {
                PatternKind::Constructor { name: token.text, args }
            };
            return Ok(Pattern::new(kind, span));
        }
        if token.kind == TokenKind::OpenParen {
            self.advance();
            let inner = self.pattern()?;
            self.expect(|t| t.kind == TokenKind::CloseParen, "`)`")?;
            return Ok(inner);
        }
        self.simple_pattern()
    }

    fn starts_subpattern(token: &Token) -> bool {
        match token.kind {
            TokenKind::OpenParen | TokenKind::Identifier | TokenKind::IntegerLiteral | TokenKind::StringLiteral => true,
            TokenKind::ReservedWord => matches!(token.text.as_str(), "true" | "false"),
            _ => false,
        }
    }

    /// Argument of a constructor pattern; returns the pattern and the span
    /// of its last token (closing parenthesis included).
    fn subpattern(&mut self) -> PResult<(Pattern, SourceSpan)> {
        if self.peek().kind == TokenKind::OpenParen {
            self.advance();
            let inner = self.pattern()?;
            let close = self.expect(|t| t.kind == TokenKind::CloseParen, "`)`")?;
            return Ok((inner, close.span));
        }
        let token = self.peek().clone();
        if token.kind == TokenKind::Identifier && token.text != "_" && !token.text.contains('.') {
            self.advance();
            let kind = if is_constructor_like(&token.text) {
                PatternKind::Constructor {
                    name: token.text,
                    args: Vec::new(),
                }
            } else {
                PatternKind::Var(token.text)
            };
            return Ok((Pattern::new(kind, token.span.clone()), token.span));
        }
        let pattern = self.simple_pattern()?;
        let span = pattern.span.clone();
        Ok((pattern, span))
    }

    /// Wildcard or literal.
    fn simple_pattern(&mut self) -> PResult<Pattern> {
        let token = self.peek().clone();
        let kind = match token.kind {
            TokenKind::Identifier if token.text == "_" => PatternKind::Wildcard,
            TokenKind::IntegerLiteral => {
                PatternKind::Literal(Literal::Int(token.text.parse().expect("lexer yields digits")))
            }
            TokenKind::StringLiteral => PatternKind::Literal(Literal::Str(unescape_string(&token.text))),
            TokenKind::ReservedWord if token.text == "true" => PatternKind::Literal(Literal::Bool(true)),
            TokenKind::ReservedWord if token.text == "false" => PatternKind::Literal(Literal::Bool(false)),
            TokenKind::OperatorSymbol if token.text == "-" => {
                self.advance();
                let digits = self.expect(|t| t.kind == TokenKind::IntegerLiteral, "an integer literal")?;
                let value: BigInt = digits.text.parse().expect("lexer yields digits");
                return Ok(Pattern::new(
                    PatternKind::Literal(Literal::Int(-value)),
                    token.span.to(&digits.span),
                ));
            }
            _ => {
                return Err(Diagnostic::new(
                    Code::InvalidPattern,
                    format!(
                        "unexpected {} in pattern; patterns must be constructors, literals or variables",
                        token.describe()
                    ),
                    token.span,
                ))
            }
        };
        self.advance();
        Ok(Pattern::new(kind, token.span))
    }
}
