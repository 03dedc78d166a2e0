//! Moment expressions such as `tr(ab)^2 ~tr(ab)^2 |tr(a)|^4`.
//!
//! ```text
//! expr   := factor (ws factor)*
//! factor := "tr(" word ")" pow? | "~tr(" word ")" pow? | "|tr(" word ")|^" evenint
//! pow    := "^" posint
//! ```
//!
//! Factors on the same (cyclically reduced) word merge their exponents.

use std::fmt;

use hm_core::words::{parse_word_at, MomentSpec, MomentTerm};
use hm_core::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentExpression {
    pub spec: MomentSpec,
    pub source: String,
}

impl MomentExpression {
    /// Canonical text; parses back to an equal spec.
    pub fn render(&self) -> String {
        self.spec.to_string()
    }
}

impl fmt::Display for MomentExpression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

fn err(pos: usize, msg: &str) -> Error {
    Error::Parse {
        pos,
        msg: msg.to_string(),
    }
}

struct Scanner<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Scanner<'a> {
    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn eat(&mut self, token: &str) -> bool {
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn skip_ws(&mut self) -> bool {
        let start = self.pos;
        while self.rest().starts_with(|c: char| c.is_ascii_whitespace()) {
            self.pos += 1;
        }
        self.pos > start
    }

    /// Word text up to the next `)`, parsed and cyclically reduced.
    fn word(&mut self, factor_start: usize) -> Result<hm_core::Word> {
        let start = self.pos;
        let close = self
            .rest()
            .find(')')
            .ok_or_else(|| err(start, "missing ')'"))?;
        let body = &self.text[start..start + close];
        let word = parse_word_at(body, start)?.cyclically_reduce();
        if word.is_empty() {
            return Err(err(factor_start, "word reduces to the identity"));
        }
        self.pos = start + close + 1;
        Ok(word)
    }

    fn posint(&mut self) -> Result<u32> {
        let start = self.pos;
        let len = self
            .rest()
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(self.rest().len());
        let digits = &self.text[start..start + len];
        if digits.is_empty() {
            return Err(err(start, "expected an exponent"));
        }
        if digits.starts_with('0') {
            return Err(err(start, "exponent must be a positive integer without leading zeros"));
        }
        self.pos += len;
        digits.parse().map_err(|_| err(start, "exponent too large"))
    }
}

pub fn parse_expression(text: &str) -> Result<MomentExpression> {
    let mut s = Scanner { text, pos: 0 };
    let mut terms = Vec::new();
    s.skip_ws();
    if s.rest().is_empty() {
        return Err(err(0, "empty expression"));
    }
    loop {
        let start = s.pos;
        let term = if s.eat("|tr(") {
            let word = s.word(start)?;
            if !s.eat("|^") {
                return Err(err(s.pos, "expected '|^' after '|tr(...)'"));
            }
            let exp_pos = s.pos;
            let k = s.posint()?;
            if k % 2 != 0 {
                return Err(err(exp_pos, "exponent of |tr(...)| must be even"));
            }
            MomentTerm { word, alpha: k / 2, beta: k / 2 }
        } else {
            let conj = s.eat("~");
            if !s.eat("tr(") {
                return Err(err(s.pos, "expected 'tr(', '~tr(' or '|tr('"));
            }
            let word = s.word(start)?;
            let k = if s.eat("^") { s.posint()? } else { 1 };
            if conj {
                MomentTerm { word, alpha: 0, beta: k }
            } else {
                MomentTerm { word, alpha: k, beta: 0 }
            }
        };
        terms.push(term);
        let had_ws = s.skip_ws();
        if s.rest().is_empty() {
            break;
        }
        if !had_ws {
            return Err(err(s.pos, "expected whitespace between factors"));
        }
    }
    let spec = MomentSpec::new(terms).map_err(|e| match e {
        Error::Domain(msg) => err(0, &msg),
        other => other,
    })?;
    Ok(MomentExpression {
        spec,
        source: text.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn terms(text: &str) -> Vec<(String, u32, u32)> {
        parse_expression(text)
            .unwrap()
            .spec
            .terms()
            .iter()
            .map(|t| (t.word.to_string(), t.alpha, t.beta))
            .collect()
    }

    fn pos(text: &str) -> usize {
        match parse_expression(text) {
            Err(Error::Parse { pos, .. }) => pos,
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn examples() {
        assert_eq!(terms("|tr(a)|^2"), [("a".to_string(), 1, 1)]);
        assert_eq!(terms("tr(a^2) ~tr(a^2)"), [("a^2".to_string(), 1, 1)]);
        let mut got = terms("tr(ab)^2 ~tr(ab)^2 |tr(a)|^4");
        got.sort();
        assert_eq!(got, [("a".to_string(), 2, 2), ("ab".to_string(), 2, 2)]);
    }

    #[test]
    fn words_are_cyclically_reduced() {
        assert_eq!(terms("tr(b a b^-1)"), [("a".to_string(), 1, 0)]);
        assert_eq!(terms("  ~tr(a b)^3  "), [("ab".to_string(), 0, 3)]);
    }

    #[test]
    fn error_offsets() {
        assert_eq!(pos("|tr(a)|^3"), 8);
        assert_eq!(pos("tr(a) tr(b"), 9);
        assert_eq!(pos("tr(a)tr(b)"), 5);
        assert_eq!(pos("tr(a) xr(b)"), 6);
        assert_eq!(pos("tr(a1)"), 4);
        assert_eq!(pos("tr(a)^0"), 6);
        assert_eq!(pos("|tr(a)^2"), 6);
        assert_eq!(pos("tr(a) tr(a a^-1)"), 6);
        assert_eq!(pos(""), 0);
    }

    #[test]
    fn render_round_trips() {
        for text in ["|tr(a)|^2 tr(b)^3", "tr(ab^-1) ~tr(a^2)^2", "|tr(abab)|^4 tr(a)"] {
            let e = parse_expression(text).unwrap();
            assert_eq!(parse_expression(&e.render()).unwrap().spec, e.spec);
        }
    }
}
