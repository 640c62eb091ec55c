mod common;

use proptest::prelude::*;
use soda::lexer::tokenize;
use soda::syntax::{pretty_print, structurally_equal, TokenKind};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn printed_programs_parse_back(program in common::program()) {
        let printed = pretty_print(&program);
        let parsed = common::parse(&printed).map_err(|d| TestCaseError::fail(format!("{}\n{printed}", common::render_diagnostics(&d))))?;
        prop_assert!(structurally_equal(&parsed, &program), "mismatch for\n{}", printed);
        prop_assert_eq!(pretty_print(&parsed), printed);
    }

    #[test]
    fn lexing_covers_every_character(program in common::program()) {
        // Token texts plus the gaps between them give back the source.
        let source = pretty_print(&program);
        let lexed = tokenize(&source, "t.soda");
        prop_assert!(lexed.diagnostics.is_empty());
        let lines: Vec<&str> = source.split('\n').collect();
        for token in &lexed.tokens {
            if matches!(token.kind, TokenKind::Newline | TokenKind::Indent | TokenKind::Dedent | TokenKind::EndOfInput) {
                continue;
            }
            let s = &token.span;
            prop_assert_eq!(s.line_start, s.line_end);
            let line = lines[s.line_start as usize - 1];
            let text: String = line.chars().skip(s.col_start as usize - 1).take((s.col_end - s.col_start) as usize).collect();
            if token.kind == TokenKind::DirectiveLine {
                prop_assert_eq!(text.trim_start(), token.text.trim_start());
            } else {
                prop_assert_eq!(text, token.text.clone());
            }
        }
    }
}
