use super::Formula;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown token {token:?} at offset {offset}")]
    UnknownToken { offset: usize, token: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } | ParseError::UnknownToken { offset, .. } => *offset,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Atom(String),
    False,
    True,
    Not,
    Ig,
    RIg,
    Know,
    Kw,
    And,
    Or,
    Implies,
    Iff,
    LParen,
    RParen,
}

impl Token {
    fn describe(&self) -> String {
        match self {
            Token::Atom(name) => format!("atom {name:?}"),
            Token::False => "'false'".into(),
            Token::True => "'true'".into(),
            Token::Not => "'~'".into(),
            Token::Ig => "'I'".into(),
            Token::RIg => "'IR'".into(),
            Token::Know => "'K'".into(),
            Token::Kw => "'Kw'".into(),
            Token::And => "'&'".into(),
            Token::Or => "'|'".into(),
            Token::Implies => "'->'".into(),
            Token::Iff => "'<->'".into(),
            Token::LParen => "'('".into(),
            Token::RParen => "')'".into(),
        }
    }
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let mut tokens = Vec::new();
    let mut chars = text.char_indices().peekable();
    while let Some(&(offset, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let mut word = String::new();
            while let Some(&(_, c)) = chars.peek() {
                if c.is_ascii_alphanumeric() || c == '_' {
                    word.push(c);
                    chars.next();
                } else {
                    break;
                }
            }
            let token = match word.as_str() {
                "I" => Token::Ig,
                "IR" => Token::RIg,
                "K" => Token::Know,
                "Kw" => Token::Kw,
                "false" => Token::False,
                "true" => Token::True,
                w if w.starts_with(|c: char| c.is_ascii_lowercase()) => Token::Atom(word),
                _ => {
                    return Err(ParseError::UnknownToken {
                        offset,
                        token: word,
                    })
                }
            };
            tokens.push((offset, token));
            continue;
        }
        chars.next();
        let token = match c {
            '~' | '¬' => Token::Not,
            '&' | '∧' => Token::And,
            '|' | '∨' => Token::Or,
            '(' => Token::LParen,
            ')' => Token::RParen,
            '→' => Token::Implies,
            '↔' => Token::Iff,
            '⊥' => Token::False,
            '⊤' => Token::True,
            '□' => Token::Know,
            '-' if chars.next_if(|&(_, c)| c == '>').is_some() => Token::Implies,
            '<' if chars.next_if(|&(_, c)| c == '-').is_some() => {
                if chars.next_if(|&(_, c)| c == '>').is_some() {
                    Token::Iff
                } else {
                    return Err(ParseError::UnknownToken {
                        offset,
                        token: "<-".into(),
                    });
                }
            }
            other => {
                return Err(ParseError::UnknownToken {
                    offset,
                    token: other.to_string(),
                })
            }
        };
        tokens.push((offset, token));
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn eat(&mut self, token: &Token) -> bool {
        if self.peek() == Some(token) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &str) -> ParseError {
        let found = self
            .peek()
            .map_or_else(|| "end of input".to_string(), Token::describe);
        ParseError::Syntax {
            offset: self.offset(),
            message: format!("expected {expected}, found {found}"),
        }
    }

    fn iff(&mut self) -> Result<Formula, ParseError> {
        let left = self.implication()?;
        if self.eat(&Token::Iff) {
            let right = self.iff()?;
            return Ok(Formula::iff(left, right));
        }
        Ok(left)
    }

    fn implication(&mut self) -> Result<Formula, ParseError> {
        let left = self.disjunction()?;
        if self.eat(&Token::Implies) {
            let right = self.implication()?;
            return Ok(Formula::implies(left, right));
        }
        Ok(left)
    }

    fn disjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.conjunction()?;
        while self.eat(&Token::Or) {
            acc = Formula::or(acc, self.conjunction()?);
        }
        Ok(acc)
    }

    fn conjunction(&mut self) -> Result<Formula, ParseError> {
        let mut acc = self.unary()?;
        while self.eat(&Token::And) {
            acc = Formula::and(acc, self.unary()?);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        let Some(token) = self.peek().cloned() else {
            return Err(self.error("a formula"));
        };
        let wrap: Option<fn(Formula) -> Formula> = match token {
            Token::Not => Some(Formula::not),
            Token::Ig => Some(Formula::ig),
            Token::RIg => Some(Formula::rig),
            Token::Know => Some(Formula::boxed),
            Token::Kw => Some(Formula::kw),
            _ => None,
        };
        if let Some(wrap) = wrap {
            self.pos += 1;
            return Ok(wrap(self.unary()?));
        }
        match token {
            Token::Atom(name) => {
                self.pos += 1;
                Ok(Formula::Atom(name))
            }
            Token::False => {
                self.pos += 1;
                Ok(Formula::Bottom)
            }
            Token::True => {
                self.pos += 1;
                Ok(Formula::top())
            }
            Token::LParen => {
                self.pos += 1;
                let inner = self.iff()?;
                if !self.eat(&Token::RParen) {
                    return Err(self.error("')'"));
                }
                Ok(inner)
            }
            _ => Err(self.error("a formula")),
        }
    }
}

/// Parses a formula from the concrete grammar.
///
/// Precedence from loosest to tightest is `<->`, `->`, `|`, `&`, then the
/// prefix operators `~ I IR K Kw`. `->` and `<->` associate to the right.
pub fn parse(text: &str) -> Result<Formula, ParseError> {
    let tokens = tokenize(text)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        end: text.len(),
    };
    let formula = parser.iff()?;
    if parser.pos < parser.tokens.len() {
        return Err(parser.error("end of input"));
    }
    Ok(formula)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula {
        Formula::atom("p")
    }

    #[test]
    fn conjunction_of_prefix_operators() {
        assert_eq!(
            parse("I p & ~IR p").unwrap(),
            Formula::and(Formula::ig(p()), Formula::not(Formula::rig(p())))
        );
    }

    #[test]
    fn second_order_ignorance_implies_rumsfeld() {
        assert_eq!(
            parse("I I p -> IR p").unwrap(),
            Formula::implies(Formula::ig(Formula::ig(p())), Formula::rig(p()))
        );
    }

    #[test]
    fn dangling_binary_operator_reports_offset() {
        let err = parse("I &").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { offset: 2, .. }), "{err}");
    }

    #[test]
    fn unknown_tokens() {
        assert!(matches!(
            parse("p $ q").unwrap_err(),
            ParseError::UnknownToken { offset: 2, .. }
        ));
        assert!(matches!(
            parse("Q").unwrap_err(),
            ParseError::UnknownToken { offset: 0, .. }
        ));
    }

    #[test]
    fn truncated_and_unbalanced_input() {
        assert_eq!(parse("").unwrap_err().offset(), 0);
        assert_eq!(parse("(p & q").unwrap_err().offset(), 6);
        assert_eq!(parse("p q").unwrap_err().offset(), 2);
    }

    #[test]
    fn associativity() {
        let q = Formula::atom("q");
        let r = Formula::atom("r");
        assert_eq!(
            parse("p <-> q <-> r").unwrap(),
            Formula::iff(p(), Formula::iff(q.clone(), r.clone()))
        );
        assert_eq!(
            parse("p | q | r").unwrap(),
            Formula::or(Formula::or(p(), q.clone()), r.clone())
        );
        assert_eq!(
            parse("p & q -> r").unwrap(),
            Formula::implies(Formula::and(p(), q), r)
        );
    }

    #[test]
    fn constants_and_unicode() {
        assert_eq!(parse("true").unwrap(), Formula::not(Formula::Bottom));
        assert_eq!(parse("false").unwrap(), Formula::Bottom);
        assert_eq!(parse("¬□p").unwrap(), parse("~K p").unwrap());
        assert_eq!(parse("Kw p").unwrap(), Formula::kw(p()));
    }
}
