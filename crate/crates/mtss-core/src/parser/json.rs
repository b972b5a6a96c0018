//! Minimal JSON value parser that keeps a source span on every value and
//! object key. The document mapper needs those spans to point diagnostics
//! at the offending construct, which rules out off-the-shelf parsers.
//!
//! The grammar is standard JSON: objects, arrays, strings (with escapes),
//! numbers, `true`/`false`/`null`. No extensions, no recovery.

use super::{ParseCode, ParseDiagnostic, SourceSpan};

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum JsonValue {
    Null(SourceSpan),
    Bool(bool, SourceSpan),
    Number(f64, SourceSpan),
    String(String, SourceSpan),
    Array(Vec<JsonValue>, SourceSpan),
    Object(Vec<JsonField>, SourceSpan),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct JsonField {
    pub key: String,
    pub key_span: SourceSpan,
    pub value: JsonValue,
}

impl JsonValue {
    pub fn span(&self) -> SourceSpan {
        match self {
            JsonValue::Null(s)
            | JsonValue::Bool(_, s)
            | JsonValue::Number(_, s)
            | JsonValue::String(_, s)
            | JsonValue::Array(_, s)
            | JsonValue::Object(_, s) => *s,
        }
    }

    pub fn type_name(&self) -> &'static str {
        match self {
            JsonValue::Null(_) => "null",
            JsonValue::Bool(..) => "boolean",
            JsonValue::Number(..) => "number",
            JsonValue::String(..) => "string",
            JsonValue::Array(..) => "array",
            JsonValue::Object(..) => "object",
        }
    }
}

/// Parse a complete JSON document. Trailing content after the root value
/// is an error. Returns a single syntax diagnostic on failure.
pub(crate) fn parse_value(input: &str) -> Result<JsonValue, ParseDiagnostic> {
    let mut p = Parser::new(input);
    p.skip_ws();
    let value = p.value()?;
    p.skip_ws();
    if p.pos < p.bytes.len() {
        return Err(p.error_here("unexpected trailing content after document"));
    }
    Ok(value)
}

/// Recursion guard: deeply nested inputs must fail cleanly, not blow the
/// stack (the parser must survive arbitrary bytes).
const MAX_DEPTH: usize = 256;

struct Parser<'a> {
    input: &'a str,
    bytes: &'a [u8],
    pos: usize,
    line: u32,
    column: u32,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn new(input: &'a str) -> Parser<'a> {
        Parser {
            input,
            bytes: input.as_bytes(),
            pos: 0,
            line: 1,
            column: 1,
            depth: 0,
        }
    }

    fn mark(&self) -> (usize, u32, u32) {
        (self.pos, self.line, self.column)
    }

    fn span_from(&self, mark: (usize, u32, u32)) -> SourceSpan {
        SourceSpan {
            byte_offset_start: mark.0,
            byte_offset_end: self.pos,
            line: mark.1,
            column: mark.2,
        }
    }

    fn span_here(&self) -> SourceSpan {
        SourceSpan {
            byte_offset_start: self.pos,
            byte_offset_end: (self.pos + 1).min(self.bytes.len()),
            line: self.line,
            column: self.column,
        }
    }

    fn error_here(&self, message: impl Into<String>) -> ParseDiagnostic {
        ParseDiagnostic {
            code: ParseCode::P001,
            message: message.into(),
            span: self.span_here(),
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    /// Advance over one char, maintaining line/column. `width` is the
    /// UTF-8 width of the char at `pos`.
    fn advance(&mut self, width: usize) {
        if self.bytes.get(self.pos) == Some(&b'\n') {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        self.pos += width;
    }

    fn advance_byte(&mut self) {
        self.advance(1);
    }

    fn skip_ws(&mut self) {
        while let Some(b) = self.peek() {
            match b {
                b' ' | b'\t' | b'\n' | b'\r' => self.advance_byte(),
                _ => break,
            }
        }
    }

    fn expect(&mut self, b: u8) -> Result<(), ParseDiagnostic> {
        if self.peek() == Some(b) {
            self.advance_byte();
            Ok(())
        } else {
            Err(self.error_here(format!("expected `{}`", b as char)))
        }
    }

    fn value(&mut self) -> Result<JsonValue, ParseDiagnostic> {
        if self.depth >= MAX_DEPTH {
            return Err(self.error_here("nesting too deep"));
        }
        match self.peek() {
            Some(b'{') => self.object(),
            Some(b'[') => self.array(),
            Some(b'"') => {
                let mark = self.mark();
                let text = self.string()?;
                Ok(JsonValue::String(text, self.span_from(mark)))
            }
            Some(b't') | Some(b'f') | Some(b'n') => self.keyword(),
            Some(b) if b == b'-' || b.is_ascii_digit() => self.number(),
            Some(_) => Err(self.error_here("expected a JSON value")),
            None => Err(self.error_here("unexpected end of input")),
        }
    }

    fn object(&mut self) -> Result<JsonValue, ParseDiagnostic> {
        let mark = self.mark();
        self.expect(b'{')?;
        self.depth += 1;
        let mut fields: Vec<JsonField> = Vec::new();
        self.skip_ws();
        if self.peek() == Some(b'}') {
            self.advance_byte();
            self.depth -= 1;
            return Ok(JsonValue::Object(fields, self.span_from(mark)));
        }
        loop {
            self.skip_ws();
            if self.peek() != Some(b'"') {
                return Err(self.error_here("expected a string key"));
            }
            let key_mark = self.mark();
            let key = self.string()?;
            let key_span = self.span_from(key_mark);
            self.skip_ws();
            self.expect(b':')?;
            self.skip_ws();
            let value = self.value()?;
            fields.push(JsonField {
                key,
                key_span,
                value,
            });
            self.skip_ws();
            match self.peek() {
                Some(b',') => {
                    self.advance_byte();
                }
                Some(b'}') => {
                    self.advance_byte();
                    self.depth -= 1;
                    return Ok(JsonValue::Object(fields, self.span_from(mark)));
                }
                _ => return Err(self.error_here("expected `,` or `}`")),
            }
        }
    }

    fn array(&mut self) -> Result<JsonValue, ParseDiagnostic> {
        let mark = self.mark();
        self.expect(b'[')?;
        self.depth += 1;
        let mut items = Vec::new();
        self.skip_ws();
        if self.peek() == Some(b']') {
            self.advance_byte();
            self.depth -= 1;
            return Ok(JsonValue::Array(items, self.span_from(mark)));
        }
        loop {
            self.skip_ws();
            items.push(self.value()?);
            self.skip_ws();
            match self.peek() {
                Some(b',') => {
                    self.advance_byte();
                }
                Some(b']') => {
                    self.advance_byte();
                    self.depth -= 1;
                    return Ok(JsonValue::Array(items, self.span_from(mark)));
                }
                _ => return Err(self.error_here("expected `,` or `]`")),
            }
        }
    }

    fn keyword(&mut self) -> Result<JsonValue, ParseDiagnostic> {
        let mark = self.mark();
        for (word, make) in [
            ("true", JsonValue::Bool(true, SourceSpan::ZERO)),
            ("false", JsonValue::Bool(false, SourceSpan::ZERO)),
            ("null", JsonValue::Null(SourceSpan::ZERO)),
        ] {
            if self.input[self.pos..].starts_with(word) {
                for _ in 0..word.len() {
                    self.advance_byte();
                }
                let span = self.span_from(mark);
                return Ok(match make {
                    JsonValue::Bool(b, _) => JsonValue::Bool(b, span),
                    _ => JsonValue::Null(span),
                });
            }
        }
        Err(self.error_here("expected a JSON value"))
    }

    fn number(&mut self) -> Result<JsonValue, ParseDiagnostic> {
        let mark = self.mark();
        if self.peek() == Some(b'-') {
            self.advance_byte();
        }
        match self.peek() {
            Some(b'0') => self.advance_byte(),
            Some(b) if b.is_ascii_digit() => {
                while self.peek().is_some_and(|b| b.is_ascii_digit()) {
                    self.advance_byte();
                }
            }
            _ => return Err(self.error_here("malformed number")),
        }
        if self.peek() == Some(b'.') {
            self.advance_byte();
            if !self.peek().is_some_and(|b| b.is_ascii_digit()) {
                return Err(self.error_here("malformed number: missing fraction digits"));
            }
            while self.peek().is_some_and(|b| b.is_ascii_digit()) {
                self.advance_byte();
            }
        }
        if matches!(self.peek(), Some(b'e') | Some(b'E')) {
            self.advance_byte();
            if matches!(self.peek(), Some(b'+') | Some(b'-')) {
                self.advance_byte();
            }
            if !self.peek().is_some_and(|b| b.is_ascii_digit()) {
                return Err(self.error_here("malformed number: missing exponent digits"));
            }
            while self.peek().is_some_and(|b| b.is_ascii_digit()) {
                self.advance_byte();
            }
        }
        let text = &self.input[mark.0..self.pos];
        let value: f64 = text.parse().map_err(|_| ParseDiagnostic {
            code: ParseCode::P001,
            message: format!("malformed number `{text}`"),
            span: self.span_from(mark),
        })?;
        Ok(JsonValue::Number(value, self.span_from(mark)))
    }

    fn string(&mut self) -> Result<String, ParseDiagnostic> {
        self.expect(b'"')?;
        let mut out = String::new();
        loop {
            let Some(b) = self.peek() else {
                return Err(self.error_here("unterminated string"));
            };
            match b {
                b'"' => {
                    self.advance_byte();
                    return Ok(out);
                }
                b'\\' => {
                    self.advance_byte();
                    let Some(esc) = self.peek() else {
                        return Err(self.error_here("unterminated escape"));
                    };
                    match esc {
                        b'"' => out.push('"'),
                        b'\\' => out.push('\\'),
                        b'/' => out.push('/'),
                        b'b' => out.push('\u{0008}'),
                        b'f' => out.push('\u{000C}'),
                        b'n' => out.push('\n'),
                        b'r' => out.push('\r'),
                        b't' => out.push('\t'),
                        b'u' => {
                            self.advance_byte();
                            let cp = self.hex4()?;
                            if (0xD800..0xDC00).contains(&cp) {
                                // high surrogate: require a low surrogate pair
                                if self.peek() == Some(b'\\') {
                                    self.advance_byte();
                                    if self.peek() != Some(b'u') {
                                        return Err(self.error_here("expected low surrogate"));
                                    }
                                    self.advance_byte();
                                    let lo = self.hex4()?;
                                    if !(0xDC00..0xE000).contains(&lo) {
                                        return Err(self.error_here("invalid low surrogate"));
                                    }
                                    let c = 0x10000 + ((cp - 0xD800) << 10) + (lo - 0xDC00);
                                    out.push(char::from_u32(c).ok_or_else(|| {
                                        self.error_here("invalid surrogate pair")
                                    })?);
                                } else {
                                    return Err(self.error_here("unpaired surrogate"));
                                }
                            } else if (0xDC00..0xE000).contains(&cp) {
                                return Err(self.error_here("unpaired low surrogate"));
                            } else {
                                out.push(
                                    char::from_u32(cp)
                                        .ok_or_else(|| self.error_here("invalid code point"))?,
                                );
                            }
                            continue;
                        }
                        _ => return Err(self.error_here("invalid escape")),
                    }
                    self.advance_byte();
                }
                0x00..=0x1F => {
                    return Err(self.error_here("unescaped control character in string"));
                }
                _ => {
                    let c = self.input[self.pos..].chars().next().expect("valid utf-8");
                    out.push(c);
                    self.advance(c.len_utf8());
                }
            }
        }
    }

    /// Read exactly four hex digits, leaving `pos` after them.
    fn hex4(&mut self) -> Result<u32, ParseDiagnostic> {
        let mut v: u32 = 0;
        for _ in 0..4 {
            let Some(b) = self.peek() else {
                return Err(self.error_here("truncated \\u escape"));
            };
            let d = (b as char)
                .to_digit(16)
                .ok_or_else(|| self.error_here("bad hex digit in \\u escape"))?;
            v = v * 16 + d;
            self.advance_byte();
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn num(v: &JsonValue) -> f64 {
        match v {
            JsonValue::Number(n, _) => *n,
            other => panic!("expected number, got {other:?}"),
        }
    }

    #[test]
    fn parses_nested_document() {
        let v = parse_value(r#"{"a": [1, 2.5], "b": {"c": "x\ny", "d": null}}"#).unwrap();
        let JsonValue::Object(fields, _) = &v else {
            panic!()
        };
        assert_eq!(fields[0].key, "a");
        let JsonValue::Array(items, _) = &fields[0].value else {
            panic!()
        };
        assert_eq!(num(&items[1]), 2.5);
        let JsonValue::Object(inner, _) = &fields[1].value else {
            panic!()
        };
        let JsonValue::String(s, _) = &inner[0].value else {
            panic!()
        };
        assert_eq!(s, "x\ny");
    }

    #[test]
    fn spans_track_lines_and_columns() {
        let v = parse_value("{\n  \"k\": 42\n}").unwrap();
        let JsonValue::Object(fields, span) = &v else {
            panic!()
        };
        assert_eq!(span.line, 1);
        assert_eq!(fields[0].key_span.line, 2);
        assert_eq!(fields[0].key_span.column, 3);
        assert_eq!(fields[0].value.span().line, 2);
        assert_eq!(fields[0].value.span().column, 8);
    }

    #[test]
    fn rejects_trailing_garbage() {
        let err = parse_value("{} x").unwrap_err();
        assert_eq!(err.code, ParseCode::P001);
        assert_eq!(err.span.byte_offset_start, 3);
    }

    #[test]
    fn rejects_bad_tokens() {
        for bad in ["{", "[1,", "\"abc", "01", "1.", "tru", "{\"a\" 1}", "-", "1e"] {
            assert!(parse_value(bad).is_err(), "should reject {bad:?}");
        }
    }

    #[test]
    fn unicode_and_escapes() {
        let v = parse_value(r#""café 🎬 ok""#).unwrap();
        let JsonValue::String(s, _) = v else { panic!() };
        assert_eq!(s, "café 🎬 ok");
    }

    #[test]
    fn deep_nesting_fails_cleanly() {
        let input = "[".repeat(10_000);
        assert!(parse_value(&input).is_err());
    }
}
