//! Recursive-descent parser for the problem-language expression grammar:
//!
//! ```text
//! expr     := ['-'] term (('+' | '-') term)*
//! term     := factor ('*' factor)*
//! factor   := base ('^' posint)?
//! base     := rational | symbol | symbol '[' ['-'] int ']'
//!           | 'd(' symbol (';' symbol (',' symbol)*)? ')' | '(' expr ')'
//! rational := int ('/' posint)?
//! ```

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::{MultiIndex, Scope, Tree};
use crate::error::{ParseError, ParseErrorKind};
use crate::expr::Expr;

/// Parses and canonicalizes.
pub fn parse(text: &str, scope: &dyn Scope) -> Result<Expr, ParseError> {
    parse_tree(text, scope).map(|t| t.canonicalize())
}

/// Parses without canonicalizing.
pub fn parse_tree(text: &str, scope: &dyn Scope) -> Result<Tree, ParseError> {
    let tokens = lex(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        scope,
    };
    let tree = p.expr()?;
    match p.peek() {
        Tok::End => Ok(tree),
        Tok::Slash => Err(p.error_here(ParseErrorKind::Division)),
        other => Err(p.syntax(format!("unexpected {}", other.describe()))),
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Semi,
    Comma,
    End,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Int(i) => format!("number {i}"),
            Tok::Ident(s) => format!("symbol '{s}'"),
            Tok::End => "end of input".into(),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBracket => "'['".into(),
            Tok::RBracket => "']'".into(),
            Tok::Semi => "';'".into(),
            Tok::Comma => "','".into(),
        }
    }
}

struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let (mut line, mut column) = (1, 1);
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let (l, col) = (line, column);
        if c == '\n' {
            line += 1;
            column = 1;
            i += 1;
            continue;
        }
        if c.is_whitespace() {
            column += 1;
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let digits: String = chars[start..i].iter().collect();
            column += i - start;
            out.push(Spanned {
                tok: Tok::Int(digits.parse().expect("ascii digits")),
                line: l,
                column: col,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            column += i - start;
            out.push(Spanned {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: l,
                column: col,
            });
            continue;
        }
        let tok = match c {
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            '/' => Tok::Slash,
            '^' => Tok::Caret,
            '(' => Tok::LParen,
            ')' => Tok::RParen,
            '[' => Tok::LBracket,
            ']' => Tok::RBracket,
            ';' => Tok::Semi,
            ',' => Tok::Comma,
            other => {
                return Err(ParseError::syntax(
                    l,
                    col,
                    format!("unexpected character '{other}'"),
                ))
            }
        };
        out.push(Spanned {
            tok,
            line: l,
            column: col,
        });
        i += 1;
        column += 1;
    }
    out.push(Spanned {
        tok: Tok::End,
        line,
        column,
    });
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Spanned>,
    pos: usize,
    scope: &'a dyn Scope,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.tokens[self.pos].tok
    }

    fn peek_at(&self, ahead: usize) -> &Tok {
        let idx = (self.pos + ahead).min(self.tokens.len() - 1);
        &self.tokens[idx].tok
    }

    fn advance(&mut self) -> Tok {
        let t = self.tokens[self.pos].tok.clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn error_here(&self, kind: ParseErrorKind) -> ParseError {
        let s = &self.tokens[self.pos];
        ParseError::new(s.line, s.column, kind)
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        self.error_here(ParseErrorKind::Syntax(msg.into()))
    }

    fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.advance();
            Ok(())
        } else {
            Err(self.syntax(format!(
                "expected {}, found {}",
                want.describe(),
                self.peek().describe()
            )))
        }
    }

    fn expr(&mut self) -> Result<Tree, ParseError> {
        let mut parts = Vec::new();
        let negate_first = if *self.peek() == Tok::Minus {
            self.advance();
            true
        } else {
            false
        };
        let first = self.term()?;
        parts.push(if negate_first { first.neg() } else { first });
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.advance();
                    parts.push(self.term()?);
                }
                Tok::Minus => {
                    self.advance();
                    parts.push(self.term()?.neg());
                }
                _ => break,
            }
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            Tree::Sum(parts)
        })
    }

    fn term(&mut self) -> Result<Tree, ParseError> {
        let mut factors = vec![self.factor()?];
        loop {
            match self.peek() {
                Tok::Star => {
                    self.advance();
                    factors.push(self.factor()?);
                }
                Tok::Slash => return Err(self.error_here(ParseErrorKind::Division)),
                _ => break,
            }
        }
        Ok(if factors.len() == 1 {
            factors.pop().unwrap()
        } else {
            Tree::Product(factors)
        })
    }

    fn factor(&mut self) -> Result<Tree, ParseError> {
        let base = self.base()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.advance();
        match self.advance() {
            Tok::Int(n) if !n.is_zero() => {
                let e = n
                    .to_u32()
                    .ok_or_else(|| self.syntax("exponent too large"))?;
                Ok(Tree::Pow(Box::new(base), e))
            }
            _ => {
                self.pos -= 1;
                Err(self.syntax("exponent must be a positive integer"))
            }
        }
    }

    fn base(&mut self) -> Result<Tree, ParseError> {
        match self.peek().clone() {
            Tok::Int(num) => {
                self.advance();
                if *self.peek() == Tok::Slash {
                    if let Tok::Int(den) = self.peek_at(1).clone() {
                        self.advance();
                        if den.is_zero() {
                            return Err(self.syntax("denominator must be positive"));
                        }
                        self.advance();
                        if *self.peek() == Tok::Slash {
                            return Err(self.error_here(ParseErrorKind::Division));
                        }
                        return Ok(Tree::Const(BigRational::new(num, den)));
                    }
                    return Err(self.error_here(ParseErrorKind::Division));
                }
                Ok(Tree::Const(BigRational::from_integer(num)))
            }
            Tok::Ident(name) => {
                let at = self.pos;
                self.advance();
                match self.peek() {
                    Tok::LParen if name == "d" => self.derivative(),
                    Tok::LParen => {
                        self.pos = at;
                        Err(self.error_here(ParseErrorKind::Function(name)))
                    }
                    Tok::LBracket => self.slot(name, at),
                    _ => self.symbol(&name, at),
                }
            }
            Tok::LParen => {
                self.advance();
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(inner)
            }
            other => Err(self.syntax(format!("expected an operand, found {}", other.describe()))),
        }
    }

    fn symbol(&mut self, name: &str, at: usize) -> Result<Tree, ParseError> {
        let scope = self.scope;
        if let Some(i) = scope.independent_index(name) {
            return Ok(Tree::Var(super::Var::Indep(i)));
        }
        if let Some(dep) = scope.dependent_index(name) {
            let dims = scope.independents().len();
            return match scope.jet(dep, MultiIndex::zero(dims)) {
                Ok(v) => Ok(Tree::Var(v)),
                // Stencil scopes reject bare fields: slots must be explicit.
                Err(_) => {
                    self.pos = at;
                    Err(self.syntax(format!("write '{name}[k]' for a stencil slot")))
                }
            };
        }
        self.pos = at;
        Err(self.error_here(ParseErrorKind::UndeclaredSymbol(name.to_string())))
    }

    fn slot(&mut self, name: String, at: usize) -> Result<Tree, ParseError> {
        self.advance();
        let negative = if *self.peek() == Tok::Minus {
            self.advance();
            true
        } else {
            false
        };
        let shift = match self.advance() {
            Tok::Int(n) => n
                .to_i32()
                .ok_or_else(|| self.syntax("slot index too large"))?,
            _ => {
                self.pos -= 1;
                return Err(self.syntax("expected an integer slot index"));
            }
        };
        self.expect(Tok::RBracket)?;
        let shift = if negative { -shift } else { shift };
        let dep = match self.scope.dependent_index(&name) {
            Some(d) => d,
            None => {
                self.pos = at;
                return Err(self.error_here(ParseErrorKind::UndeclaredSymbol(name)));
            }
        };
        self.scope.slot(dep, shift).map(Tree::Var).map_err(|e| {
            let s = &self.tokens[at];
            ParseError::new(s.line, s.column, e.into())
        })
    }

    fn derivative(&mut self) -> Result<Tree, ParseError> {
        let open = self.pos - 1;
        self.expect(Tok::LParen)?;
        let dep_at = self.pos;
        let dep_name = match self.advance() {
            Tok::Ident(s) => s,
            _ => {
                self.pos = dep_at;
                return Err(self.syntax("expected a dependent variable after 'd('"));
            }
        };
        let scope = self.scope;
        let dep = match scope.dependent_index(&dep_name) {
            Some(d) => d,
            None => {
                self.pos = dep_at;
                return Err(self.error_here(ParseErrorKind::UndeclaredSymbol(dep_name)));
            }
        };
        let mut index = MultiIndex::zero(scope.independents().len());
        if *self.peek() == Tok::Semi {
            self.advance();
            loop {
                let at = self.pos;
                match self.advance() {
                    Tok::Ident(axis) => match scope.independent_index(&axis) {
                        Some(a) => index = index.incremented(a),
                        None => {
                            self.pos = at;
                            return Err(self.error_here(ParseErrorKind::UndeclaredSymbol(axis)));
                        }
                    },
                    _ => {
                        self.pos = at;
                        return Err(self.syntax("expected an independent variable"));
                    }
                }
                if *self.peek() == Tok::Comma {
                    self.advance();
                } else {
                    break;
                }
            }
        }
        self.expect(Tok::RParen)?;
        scope.jet(dep, index).map(Tree::Var).map_err(|e| {
            let s = &self.tokens[open];
            ParseError::new(s.line, s.column, e.into())
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::{rat, JetSpace, Var};

    fn space() -> JetSpace {
        JetSpace::new(&["t", "x"], &["u", "v"], 1).unwrap()
    }

    #[test]
    fn half_velocity_squared() {
        let s = JetSpace::new(&["t"], &["u"], 1).unwrap();
        let e = parse("1/2*d(u;t)^2", &s).unwrap();
        let expect = Expr::var(s.derivative(0, &[0])).pow(2).scale(&rat(1, 2));
        assert_eq!(e, expect);
    }

    #[test]
    fn mixed_partials_cancel() {
        assert!(parse("d(u;t,x) - d(u;x,t)", &space()).unwrap().is_zero());
    }

    #[test]
    fn expanded_square_cancels() {
        assert!(parse("(u+1)^2 - u^2 - 2*u - 1", &space())
            .unwrap()
            .is_zero());
    }

    #[test]
    fn d_without_axes_is_the_field() {
        let s = space();
        assert_eq!(parse("d(v)", &s).unwrap(), Expr::var(s.field(1)));
    }

    #[test]
    fn whitespace_is_insignificant() {
        let s = space();
        assert_eq!(
            parse(" 3 * d( u ; t , x ) ^ 2\n - t", &s).unwrap(),
            parse("3*d(u;t,x)^2-t", &s).unwrap()
        );
    }

    #[test]
    fn leading_minus_inside_parentheses() {
        let s = space();
        assert_eq!(parse("(-u)^2", &s).unwrap(), parse("u^2", &s).unwrap());
    }

    #[test]
    fn syntax_error_position() {
        let err = parse("u +\n  * v", &space()).unwrap_err();
        assert_eq!((err.line, err.column), (2, 3));
    }

    #[test]
    fn undeclared_symbol() {
        let err = parse("u + w", &space()).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UndeclaredSymbol("w".into()));
        assert_eq!(err.column, 5);
        let err = parse("d(u;y)", &space()).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UndeclaredSymbol("y".into()));
    }

    #[test]
    fn order_limit_enforced() {
        let s = JetSpace::new(&["t"], &["u"], 1).unwrap().with_headroom(2);
        let err = parse("d(u;t,t,t)", &s).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Scope(_)));
    }

    #[test]
    fn division_and_functions_rejected() {
        let s = space();
        assert_eq!(parse("u/2", &s).unwrap_err().kind, ParseErrorKind::Division);
        assert_eq!(
            parse("(u+1)/2", &s).unwrap_err().kind,
            ParseErrorKind::Division
        );
        assert_eq!(
            parse("1/2/3", &s).unwrap_err().kind,
            ParseErrorKind::Division
        );
        assert_eq!(
            parse("sin(u)", &s).unwrap_err().kind,
            ParseErrorKind::Function("sin".into())
        );
    }

    #[test]
    fn bad_exponents() {
        assert!(parse("u^0", &space()).is_err());
        assert!(parse("u^v", &space()).is_err());
    }

    #[test]
    fn slots_rejected_in_jet_space() {
        let err = parse("u[1]", &space()).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Scope(_)));
    }

    #[test]
    fn fraction_lowest_terms() {
        let s = space();
        let e = parse("2/4*u", &s).unwrap();
        assert_eq!(
            e.coefficient(&crate::expr::Monomial::var(Var::jet(
                0,
                crate::expr::MultiIndex::zero(2)
            ))),
            rat(1, 2)
        );
    }
}
