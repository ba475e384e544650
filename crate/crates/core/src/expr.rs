//! Exact literal expressions for angles and surds.
//!
//! Configuration and catalog values may be written as `pi/2`,
//! `(3-sqrt(3))/6` or `(1+3*sqrt(3/155))/2`. The grammar is the usual
//! arithmetic one with `+ - * / ^`, parentheses, unary minus, the constant
//! `pi` and the functions `sqrt`, `sin`, `cos`. A number directly followed by
//! `pi` or `(` multiplies (`3pi/2`).

use crate::{Error, Result};

/// Evaluate a literal expression in double precision.
pub fn eval(input: &str) -> Result<f64> {
    let mut p = Parser {
        src: input,
        chars: input.chars().filter(|c| !c.is_whitespace()).collect(),
        pos: 0,
    };
    let v = p.sum()?;
    if p.pos != p.chars.len() {
        return Err(p.error(format!("unexpected `{}`", p.chars[p.pos])));
    }
    if !v.is_finite() {
        return Err(p.error("value is not finite".into()));
    }
    Ok(v)
}

/// Evaluate a comma-separated list of expressions.
pub fn eval_list(input: &str) -> Result<Vec<f64>> {
    if input.trim().is_empty() {
        return Ok(Vec::new());
    }
    split_top_level(input).into_iter().map(eval).collect()
}

/// Split on commas that are not inside parentheses.
pub fn split_top_level(input: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, c) in input.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(input[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(input[start..].trim());
    out
}

struct Parser<'a> {
    src: &'a str,
    chars: Vec<char>,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, reason: String) -> Error {
        Error::Parse {
            input: self.src.to_string(),
            reason,
        }
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<f64> {
        let mut v = self.product()?;
        loop {
            if self.eat('+') {
                v += self.product()?;
            } else if self.eat('-') {
                v -= self.product()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn product(&mut self) -> Result<f64> {
        let mut v = self.unary()?;
        loop {
            if self.eat('*') {
                v *= self.unary()?;
            } else if self.eat('/') {
                v /= self.unary()?;
            } else if matches!(self.peek(), Some('(' | 'p' | 's' | 'c' | 'π')) {
                // implicit multiplication: 3pi, 2(1+x), 2sqrt(2)
                v *= self.unary()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn unary(&mut self) -> Result<f64> {
        if self.eat('-') {
            return Ok(-self.unary()?);
        }
        if self.eat('+') {
            return self.unary();
        }
        let base = self.atom()?;
        if self.eat('^') {
            let exp = self.unary()?;
            return Ok(base.powf(exp));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<f64> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let v = self.sum()?;
                if !self.eat(')') {
                    return Err(self.error("missing `)`".into()));
                }
                Ok(v)
            }
            Some('π') => {
                self.pos += 1;
                Ok(std::f64::consts::PI)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_alphabetic()) {
                    self.pos += 1;
                }
                let name: String = self.chars[start..self.pos].iter().collect();
                match name.as_str() {
                    "pi" => Ok(std::f64::consts::PI),
                    "sqrt" | "sin" | "cos" => {
                        if !self.eat('(') {
                            return Err(self.error(format!("`{name}` needs an argument")));
                        }
                        let arg = self.sum()?;
                        if !self.eat(')') {
                            return Err(self.error("missing `)`".into()));
                        }
                        Ok(match name.as_str() {
                            "sqrt" => arg.sqrt(),
                            "sin" => arg.sin(),
                            _ => arg.cos(),
                        })
                    }
                    _ => Err(self.error(format!("unknown identifier `{name}`"))),
                }
            }
            Some(c) => Err(self.error(format!("unexpected `{c}`"))),
            None => Err(self.error("unexpected end of input".into())),
        }
    }

    fn number(&mut self) -> Result<f64> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit() || c == '.') {
            self.pos += 1;
        }
        // exponent, but not the `e` of an identifier
        if matches!(self.peek(), Some('e' | 'E'))
            && self
                .chars
                .get(self.pos + 1)
                .is_some_and(|c| c.is_ascii_digit() || *c == '-' || *c == '+')
        {
            self.pos += 2;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse::<f64>()
            .map_err(|_| self.error(format!("bad number `{text}`")))
    }
}
