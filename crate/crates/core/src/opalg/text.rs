//! Line-oriented text form of operator expressions.
//!
//! Each non-empty line is `coefficient | word`. Lines starting with `#` are
//! comments. Words are whitespace separated primitives and need not be in
//! canonical order:
//!
//! ```text
//! -2/27i | p_x^2 exp(-2/3*x)
//! [hbar + 1/2*m] | x@1 V^(2)(x - x@1) p_x@1
//! ```

use num_traits::{One, Zero};

use super::expr::{OperatorExpr, OperatorTerm, Primitive};
use super::factor::{Axis, Coord, FactorKind, LinearForm, PositionFactor};
use super::scalar::{parse_rational, rat_int, Coefficient, GaussRational, Powers, Rational};
use crate::{Error, Result};

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Parses a whole document into a raw (non-canonical) expression.
pub fn parse_expr(text: &str) -> Result<OperatorExpr> {
    let mut terms = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (c, w) = line.split_once('|').ok_or_else(|| err(n + 1, "expected `coefficient | word`"))?;
        let coefficient = parse_coefficient(c.trim()).map_err(|m| err(n + 1, m))?;
        let word = parse_word(w.trim()).map_err(|m| err(n + 1, m))?;
        terms.push(OperatorTerm::new(coefficient, word));
    }
    Ok(OperatorExpr::from_terms(terms))
}

/// Canonical text form; identical to `Display` for [`OperatorExpr`].
pub fn format_expr(e: &OperatorExpr) -> String {
    e.to_string()
}

pub fn parse_coefficient(s: &str) -> std::result::Result<Coefficient, String> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
        let mut total = Coefficient::zero();
        for part in inner.split(" + ") {
            total += &parse_monomial(part.trim())?;
        }
        return Ok(total);
    }
    parse_monomial(s)
}

fn parse_monomial(s: &str) -> std::result::Result<Coefficient, String> {
    if s.is_empty() {
        return Err("empty coefficient".into());
    }
    let mut scalar = GaussRational::one();
    let mut powers = Powers::one();
    let mut rest = s;
    // a leading minus on a bare parameter, e.g. `-hbar`
    if let Some(r) = s.strip_prefix('-') {
        if r.starts_with(|c: char| c.is_ascii_alphabetic()) && !r.starts_with('i') {
            scalar = GaussRational::from_int(-1);
            rest = r;
        }
    }
    for (k, part) in rest.split('*').enumerate() {
        let part = part.trim();
        if k == 0 {
            if let Some(g) = parse_gauss(part) {
                scalar = &scalar * &g;
                continue;
            }
        }
        let (name, exp) = match part.split_once('^') {
            Some((n, e)) => (n, e.parse::<i32>().map_err(|_| format!("bad exponent in `{part}`"))?),
            None => (part, 1),
        };
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(format!("bad parameter `{part}`"));
        }
        powers.multiply(name, exp);
    }
    Ok(Coefficient::monomial(scalar, powers))
}

/// `2/3`, `-2/27i`, `i`, `-i`, `(1/2-3/4i)`.
pub fn parse_gauss(s: &str) -> Option<GaussRational> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix('(').and_then(|r| r.strip_suffix(')')) {
        let inner = inner.strip_suffix('i')?;
        let cut = inner.char_indices().skip(1).filter(|(_, c)| *c == '+' || *c == '-').last()?.0;
        let re = parse_rational(&inner[..cut])?;
        let im_s = &inner[cut..];
        let im = match im_s {
            "+" => Rational::one(),
            "-" => -Rational::one(),
            _ => parse_rational(im_s.trim_start_matches('+'))?,
        };
        return Some(GaussRational::new(re, im));
    }
    if let Some(body) = s.strip_suffix('i') {
        let im = match body {
            "" => Rational::one(),
            "-" => -Rational::one(),
            _ => parse_rational(body)?,
        };
        return Some(GaussRational::new(Rational::zero(), im));
    }
    parse_rational(s).map(GaussRational::real)
}

fn split_top_level(s: &str) -> std::result::Result<Vec<&str>, String> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = None;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '[' => depth += 1,
            ')' | ']' => {
                depth -= 1;
                if depth < 0 {
                    return Err("unbalanced brackets".into());
                }
            }
            _ => {}
        }
        if c.is_whitespace() && depth == 0 {
            if let Some(st) = start.take() {
                out.push(&s[st..i]);
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if depth != 0 {
        return Err("unbalanced brackets".into());
    }
    if let Some(st) = start {
        out.push(&s[st..]);
    }
    Ok(out)
}

pub fn parse_word(s: &str) -> std::result::Result<Vec<Primitive>, String> {
    let mut word = Vec::new();
    for tok in split_top_level(s)? {
        if tok == "1" {
            continue;
        }
        word.extend(parse_primitive(tok)?);
    }
    Ok(word)
}

fn split_power(tok: &str) -> std::result::Result<(&str, u32), String> {
    match tok.rsplit_once('^') {
        Some((base, e)) if !e.starts_with('(') && !base.ends_with(')') || base.ends_with(')') && e.chars().all(|c| c.is_ascii_digit()) => {
            let n = e.parse::<u32>().map_err(|_| format!("bad power in `{tok}`"))?;
            Ok((base, n))
        }
        _ => Ok((tok, 1)),
    }
}

pub fn parse_coord(s: &str) -> Option<Coord> {
    let (a, p) = match s.split_once('@') {
        Some((a, p)) => (a, p.parse::<usize>().ok()?),
        None => (s, 0),
    };
    Some(Coord::new(p, Axis::from_name(a)?))
}

fn parse_primitive(tok: &str) -> std::result::Result<Vec<Primitive>, String> {
    if let Some(rest) = tok.strip_prefix("p_") {
        let (base, n) = split_power(rest)?;
        let c = parse_coord(base).ok_or_else(|| format!("bad momentum `{tok}`"))?;
        return Ok(vec![Primitive::Momentum(c); n as usize]);
    }
    if let Some(c) = parse_coord(tok) {
        return Ok(vec![Primitive::Position(PositionFactor::power(c, 1))]);
    }
    if !tok.contains('(') {
        if let Some((base, e)) = tok.split_once('^') {
            if let (Some(c), Ok(n)) = (parse_coord(base), e.parse::<u32>()) {
                return Ok(vec![Primitive::Position(PositionFactor::power(c, n))]);
            }
        }
        return Err(format!("unknown primitive `{tok}`"));
    }
    let (head, arg) = call_parts(tok)?;
    let form = parse_linear_form(arg)?;
    let factor = if head == "exp" {
        PositionFactor::exp(form, Rational::one())
    } else if head == "sign" {
        PositionFactor::sign(form)
    } else if let Some(list) = head.strip_prefix("poly[").and_then(|r| r.strip_suffix(']')) {
        let coeffs = list
            .split(',')
            .map(|c| parse_rational(c).ok_or_else(|| format!("bad polynomial coefficient `{c}`")))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        PositionFactor::new(form, FactorKind::Polynomial(coeffs)).map_err(|e| e.to_string())?
    } else {
        let (name, order) = match head.split_once("^(") {
            Some((n, o)) => {
                let o = o.strip_suffix(')').ok_or_else(|| format!("bad derivative order in `{tok}`"))?;
                (n, o.parse::<u32>().map_err(|_| format!("bad derivative order in `{tok}`"))?)
            }
            None => (head, 0),
        };
        if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
            return Err(format!("bad function name in `{tok}`"));
        }
        PositionFactor { form, kind: FactorKind::AbstractFunc { name: name.to_string(), order } }
    };
    Ok(vec![Primitive::Position(factor)])
}

/// Splits `head(arg)` where `arg` is the last balanced parenthesised group.
fn call_parts(tok: &str) -> std::result::Result<(&str, &str), String> {
    let body = tok.strip_suffix(')').ok_or_else(|| format!("expected `)` at end of `{tok}`"))?;
    let mut depth = 0i32;
    for (i, c) in body.char_indices().rev() {
        match c {
            ')' => depth += 1,
            '(' if depth == 0 => return Ok((&body[..i], &body[i + 1..])),
            '(' => depth -= 1,
            _ => {}
        }
    }
    Err(format!("unbalanced `{tok}`"))
}

/// `x - x@1`, `-2/3*x`, `x/3 + 1`, `2`.
pub fn parse_linear_form(s: &str) -> std::result::Result<LinearForm, String> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err("empty linear form".into());
    }
    let mut pieces = Vec::new();
    let mut start = 0;
    for (i, c) in compact.char_indices() {
        if i > 0 && (c == '+' || c == '-') {
            pieces.push(&compact[start..i]);
            start = i;
        }
    }
    pieces.push(&compact[start..]);
    let mut coeffs = Vec::new();
    let mut offset = Rational::zero();
    for piece in pieces {
        let (sign, body) = match piece.strip_prefix('-') {
            Some(b) => (-rat_int(1), b),
            None => (rat_int(1), piece.trim_start_matches('+')),
        };
        if let Some(r) = parse_rational(body) {
            offset += sign * r;
            continue;
        }
        let (scale, name) = match body.split_once('*') {
            Some((r, n)) => (parse_rational(r).ok_or_else(|| format!("bad coefficient `{r}`"))?, n),
            None => (rat_int(1), body),
        };
        let (name, div) = match name.split_once('/') {
            Some((n, d)) => (n, parse_rational(d).ok_or_else(|| format!("bad divisor `{d}`"))?),
            None => (name, rat_int(1)),
        };
        if div.is_zero() {
            return Err("division by zero in linear form".into());
        }
        let c = parse_coord(name).ok_or_else(|| format!("bad coordinate `{name}`"))?;
        coeffs.push((c, sign * scale / div));
    }
    Ok(LinearForm::new(coeffs, offset))
}
