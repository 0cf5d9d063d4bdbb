use crate::error::{Error, Result};
use crate::words::{OrderedAlphabet, Symbol};

/// Regular expression over the letters of one alphabet.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Regex {
    Empty,
    Epsilon,
    Letter(Symbol),
    Union(Box<Regex>, Box<Regex>),
    Concat(Box<Regex>, Box<Regex>),
    Star(Box<Regex>),
}

impl Regex {
    pub fn union(a: Regex, b: Regex) -> Regex {
        Regex::Union(Box::new(a), Box::new(b))
    }

    pub fn concat(a: Regex, b: Regex) -> Regex {
        Regex::Concat(Box::new(a), Box::new(b))
    }

    pub fn star(a: Regex) -> Regex {
        Regex::Star(Box::new(a))
    }

    pub fn word(symbols: &[Symbol]) -> Regex {
        symbols
            .iter()
            .map(|&s| Regex::Letter(s))
            .reduce(Regex::concat)
            .unwrap_or(Regex::Epsilon)
    }

    /// Renders in the textual syntax accepted by [`parse_regex`].
    ///
    /// `Empty` has no concrete syntax and renders as `()`, which does not parse.
    pub fn render(&self, alphabet: &OrderedAlphabet) -> String {
        let mut out = String::new();
        self.render_into(alphabet, 0, &mut out);
        out
    }

    // prec: 0 = union context, 1 = concat operand, 2 = star operand
    fn render_into(&self, alphabet: &OrderedAlphabet, prec: u8, out: &mut String) {
        match self {
            Regex::Empty => out.push_str("()"),
            Regex::Epsilon => out.push_str("eps"),
            Regex::Letter(s) => out.push(alphabet.letter(*s)),
            Regex::Union(a, b) => {
                if prec > 0 {
                    out.push('(');
                }
                a.render_into(alphabet, 0, out);
                out.push('+');
                // the parser associates to the left
                b.render_into(alphabet, matches!(**b, Regex::Union(..)) as u8, out);
                if prec > 0 {
                    out.push(')');
                }
            }
            Regex::Concat(a, b) => {
                if prec > 1 {
                    out.push('(');
                }
                a.render_into(alphabet, 1, out);
                // keep "eps" from fusing with following letters
                if matches!(**a, Regex::Epsilon) || matches!(**b, Regex::Epsilon) {
                    out.push(' ');
                }
                b.render_into(alphabet, if matches!(**b, Regex::Concat(..)) { 2 } else { 1 }, out);
                if prec > 1 {
                    out.push(')');
                }
            }
            Regex::Star(a) => {
                a.render_into(alphabet, 2, out);
                out.push('*');
            }
        }
    }
}

/// Parses `expr := term ('+' term)*; term := factor+; factor := base '*'*;
/// base := letter | 'eps' | '(' expr ')'`. Whitespace is ignored; the keyword
/// `eps` takes precedence over letters spelling it.
pub fn parse_regex(text: &str, alphabet: &OrderedAlphabet) -> Result<Regex> {
    let chars: Vec<(usize, char)> = text.chars().enumerate().filter(|(_, c)| !c.is_whitespace()).collect();
    let mut p = Parser {
        chars,
        pos: 0,
        alphabet,
        end: text.chars().count(),
    };
    let r = p.expr()?;
    if p.pos < p.chars.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(r)
}

struct Parser<'a> {
    chars: Vec<(usize, char)>,
    pos: usize,
    alphabet: &'a OrderedAlphabet,
    end: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn error(&self, msg: &str) -> Error {
        let pos = self.chars.get(self.pos).map(|&(i, _)| i).unwrap_or(self.end);
        Error::RegexSyntax {
            pos,
            msg: msg.to_string(),
        }
    }

    fn expr(&mut self) -> Result<Regex> {
        let mut acc = self.term()?;
        while self.peek() == Some('+') {
            self.pos += 1;
            let rhs = self.term()?;
            acc = Regex::union(acc, rhs);
        }
        Ok(acc)
    }

    fn starts_base(&self) -> bool {
        matches!(self.peek(), Some(c) if c != '+' && c != ')' && c != '*')
    }

    fn term(&mut self) -> Result<Regex> {
        if !self.starts_base() {
            return Err(self.error("expected a letter, 'eps' or '('"));
        }
        let mut acc = self.factor()?;
        while self.starts_base() {
            let rhs = self.factor()?;
            acc = Regex::concat(acc, rhs);
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<Regex> {
        let mut base = self.base()?;
        while self.peek() == Some('*') {
            self.pos += 1;
            base = Regex::star(base);
        }
        Ok(base)
    }

    fn is_eps_keyword(&self) -> bool {
        let rest: String = self.chars[self.pos..].iter().take(3).map(|&(_, c)| c).collect();
        rest == "eps"
    }

    fn base(&mut self) -> Result<Regex> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(_) if self.is_eps_keyword() => {
                self.pos += 3;
                Ok(Regex::Epsilon)
            }
            Some(c) => match self.alphabet.symbol(c) {
                Some(s) => {
                    self.pos += 1;
                    Ok(Regex::Letter(s))
                }
                None => Err(self.error(&format!("unknown letter '{c}'"))),
            },
            None => Err(self.error("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn abc() -> OrderedAlphabet {
        OrderedAlphabet::new("abc".chars()).unwrap()
    }

    #[test]
    fn star_binds_tighter_than_concat() {
        let a = abc();
        let r = parse_regex("b*a", &a).unwrap();
        assert_eq!(r, Regex::concat(Regex::star(Regex::Letter(1)), Regex::Letter(0)));
    }

    #[test]
    fn eps_keyword() {
        assert_eq!(parse_regex("eps", &abc()).unwrap(), Regex::Epsilon);
    }

    #[test]
    fn worked_example_shape() {
        let bin = OrderedAlphabet::binary();
        let r = parse_regex("(000+01)*0(1(11)*+11)", &bin).unwrap();
        let Regex::Concat(lhs, rhs) = r else { panic!("expected concatenation") };
        let Regex::Concat(star, zero) = *lhs else { panic!() };
        assert!(matches!(*star, Regex::Star(ref inner) if matches!(**inner, Regex::Union(..))));
        assert_eq!(*zero, Regex::Letter(0));
        assert!(matches!(*rhs, Regex::Union(..)));
    }

    #[test]
    fn errors_carry_position() {
        let a = abc();
        assert_eq!(
            parse_regex("ab+(c", &a),
            Err(Error::RegexSyntax { pos: 5, msg: "expected ')'".into() })
        );
        assert!(matches!(parse_regex("abd", &a), Err(Error::RegexSyntax { pos: 2, .. })));
        assert!(parse_regex("", &a).is_err());
        assert!(parse_regex("a+", &a).is_err());
        assert!(parse_regex("*a", &a).is_err());
    }

    #[test]
    fn render_round_trips() {
        let a = abc();
        for text in ["b*a", "(ab+c)*b", "a(b+c)", "eps", "eps+a", "(a+b)*", "a eps b", "(ab)*", "a+(b+c)", "a(bc)", "a**"] {
            let r = parse_regex(text, &a).unwrap();
            let again = parse_regex(&r.render(&a), &a).unwrap();
            assert_eq!(r, again, "{text}");
        }
    }
}
