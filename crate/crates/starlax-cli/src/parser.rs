//! Expression front end for symbols, differential polynomials and
//! q-operator words.
//!
//! One grammar, two semantic contexts:
//!
//! - symbol context: letters `p`, `x`, `k`, jet names (`u`, `u_x`, `u2_xx`,
//!   `u^(4)`, ...), rationals; `*` and `^` denote the noncommutative star
//!   product of the selected kind, juxtaposition (whitespace) denotes the
//!   plain commutative product, `/` divides by a rational constant.
//! - operator context: letters `dq`, `T`, `x`, `q`; `*`, `^` and
//!   juxtaposition all denote operator composition, `/` divides by an
//!   invertible scalar.
//!
//! Exponents are integers; `p^-1` is valid, `p^(1/2)` is a parse error.
//! A parenthesized exponent on a jet base with value >= 4 is a derivative
//! order (`u^(4)` is the fourth derivative; derivative orders below four
//! render as `u_x`, `u_xx`, `u_xxx`), so plain `u^(2)` is the square.

use std::fmt;

use starlax::diffalg::{DiffPoly, Field};
use starlax::qcalc::{QLaurent, QOperator, QcalcError};
use starlax::scalars::{QScalar, Rational};
use starlax::symbols::{mul_commutative, star, Floor, PhaseSymbol, StarProduct, SymbolError};

/// Errors from the front end, split by exit-code class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CliError {
    /// Grammar violations and bad usage: exit code 1.
    Parse(String),
    /// Engine/domain refusals (floors, inconsistent flows, ...): exit code 2.
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 1,
            CliError::Domain(_) => 2,
        }
    }

    pub fn parse_at(pos: usize, message: impl fmt::Display) -> CliError {
        CliError::Parse(format!("ParseError at column {}: {}", pos + 1, message))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "{m}"),
            CliError::Domain(m) => write!(f, "{m}"),
        }
    }
}

impl From<SymbolError> for CliError {
    fn from(e: SymbolError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<starlax::lax::LaxError> for CliError {
    fn from(e: starlax::lax::LaxError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<QcalcError> for CliError {
    fn from(e: QcalcError) -> Self {
        CliError::Domain(e.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Int(i64),
    Name(String),
    /// Jet with explicit parenthesized derivative order (`u^(4)`).
    JetHigh(String, u32),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, CliError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push((i, Tok::Plus));
                i += 1;
            }
            '-' => {
                out.push((i, Tok::Minus));
                i += 1;
            }
            '*' => {
                out.push((i, Tok::Star));
                i += 1;
            }
            '/' => {
                out.push((i, Tok::Slash));
                i += 1;
            }
            '^' => {
                out.push((i, Tok::Caret));
                i += 1;
            }
            '(' => {
                out.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                out.push((i, Tok::RParen));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let text = &src[start..i];
                let n: i64 = text
                    .parse()
                    .map_err(|_| CliError::parse_at(start, format!("integer {text} out of range")))?;
                out.push((start, Tok::Int(n)));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                let name = src[start..i].to_string();
                // jet base followed by ^( int >= 4 ): a derivative-order token
                if is_jet_base(&name) && src[i..].starts_with("^(") {
                    let rest = &src[i + 2..];
                    if let Some(close) = rest.find(')') {
                        let inner = rest[..close].trim();
                        if let Ok(order) = inner.parse::<u32>() {
                            if order >= 4 {
                                out.push((start, Tok::JetHigh(name, order)));
                                i += 2 + close + 1;
                                continue;
                            }
                        }
                    }
                }
                out.push((start, Tok::Name(name)));
            }
            other => {
                return Err(CliError::parse_at(i, format!("unexpected character {other:?}")));
            }
        }
    }
    Ok(out)
}

fn is_jet_base(name: &str) -> bool {
    name == "u" || (name.starts_with('u') && name[1..].chars().all(|c| c.is_ascii_digit()) && name.len() > 1)
}

/// Resolves a jet name like `u`, `u2_xx` into its variable.
fn jet_from_name(name: &str) -> Option<(Field, u32)> {
    if name == "x" {
        return Some((Field::X, 0));
    }
    let (base, order) = match name.find('_') {
        None => (name, 0u32),
        Some(pos) => {
            let suffix = &name[pos + 1..];
            if suffix.is_empty() || suffix.len() > 3 || !suffix.chars().all(|c| c == 'x') {
                return None;
            }
            (&name[..pos], suffix.len() as u32)
        }
    };
    if !is_jet_base(base) {
        return None;
    }
    let field = if base == "u" {
        Field::U(0)
    } else {
        Field::U(base[1..].parse().ok()?)
    };
    Some((field, order))
}

/// Evaluation semantics plugged into the shared grammar.
trait Semantics {
    type Value: Clone;
    fn from_int(&self, n: i64) -> Self::Value;
    fn name(&self, pos: usize, name: &str) -> Result<Self::Value, CliError>;
    fn jet_high(&self, pos: usize, base: &str, order: u32) -> Result<Self::Value, CliError>;
    fn add(&self, a: Self::Value, b: Self::Value) -> Self::Value;
    fn sub(&self, a: Self::Value, b: Self::Value) -> Self::Value;
    fn neg(&self, a: Self::Value) -> Self::Value;
    /// `*`: the algebra product.
    fn product(&self, pos: usize, a: Self::Value, b: Self::Value) -> Result<Self::Value, CliError>;
    /// Juxtaposition: the commutative/structural product.
    fn juxtapose(&self, pos: usize, a: Self::Value, b: Self::Value)
        -> Result<Self::Value, CliError>;
    fn divide(&self, pos: usize, a: Self::Value, b: Self::Value) -> Result<Self::Value, CliError>;
    fn power(&self, pos: usize, a: Self::Value, e: i64) -> Result<Self::Value, CliError>;
    /// Integer value of an expression used in exponent position, if any.
    fn as_integer(&self, v: &Self::Value) -> Option<i64>;
}

struct Parser<'s, S: Semantics> {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    sem: &'s S,
    end: usize,
}

impl<'s, S: Semantics> Parser<'s, S> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), CliError> {
        if self.peek() == Some(&t) {
            self.pos += 1;
            Ok(())
        } else {
            Err(CliError::parse_at(self.here(), format!("expected {what}")))
        }
    }

    fn parse_expr(&mut self) -> Result<S::Value, CliError> {
        let mut acc = self.parse_term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let rhs = self.parse_term()?;
                    acc = self.sem.add(acc, rhs);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let rhs = self.parse_term()?;
                    acc = self.sem.sub(acc, rhs);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_term(&mut self) -> Result<S::Value, CliError> {
        let mut acc = self.parse_factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    let at = self.here();
                    self.pos += 1;
                    let rhs = self.parse_factor()?;
                    acc = self.sem.product(at, acc, rhs)?;
                }
                Some(Tok::Slash) => {
                    let at = self.here();
                    self.pos += 1;
                    let rhs = self.parse_factor()?;
                    acc = self.sem.divide(at, acc, rhs)?;
                }
                // juxtaposition: the structural product
                Some(Tok::Int(_)) | Some(Tok::Name(_)) | Some(Tok::JetHigh(..))
                | Some(Tok::LParen) => {
                    let at = self.here();
                    let rhs = self.parse_factor()?;
                    acc = self.sem.juxtapose(at, acc, rhs)?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn parse_factor(&mut self) -> Result<S::Value, CliError> {
        if self.peek() == Some(&Tok::Minus) {
            self.pos += 1;
            let v = self.parse_factor()?;
            return Ok(self.sem.neg(v));
        }
        let base = self.parse_atom()?;
        // collect a right-associative exponent chain
        let mut exponents: Vec<(usize, i64)> = Vec::new();
        while self.peek() == Some(&Tok::Caret) {
            let at = self.here();
            self.pos += 1;
            exponents.push((at, self.parse_exponent()?));
        }
        if exponents.is_empty() {
            return Ok(base);
        }
        let mut e = exponents.pop().unwrap().1;
        while let Some((at, lower)) = exponents.pop() {
            if e < 0 {
                return Err(CliError::parse_at(at, "negative exponent tower"));
            }
            e = lower
                .checked_pow(e.try_into().map_err(|_| {
                    CliError::parse_at(at, "exponent tower out of range")
                })?)
                .ok_or_else(|| CliError::parse_at(at, "exponent tower out of range"))?;
        }
        let at = self.here();
        self.sem.power(at, base, e)
    }

    fn parse_exponent(&mut self) -> Result<i64, CliError> {
        let at = self.here();
        match self.bump() {
            Some(Tok::Int(n)) => Ok(n),
            Some(Tok::Minus) => match self.bump() {
                Some(Tok::Int(n)) => Ok(-n),
                _ => Err(CliError::parse_at(at, "expected integer exponent")),
            },
            Some(Tok::LParen) => {
                let v = self.parse_expr()?;
                self.expect(Tok::RParen, "closing parenthesis in exponent")?;
                self.sem
                    .as_integer(&v)
                    .ok_or_else(|| CliError::parse_at(at, "exponent must be an integer"))
            }
            _ => Err(CliError::parse_at(at, "expected integer exponent")),
        }
    }

    fn parse_atom(&mut self) -> Result<S::Value, CliError> {
        let at = self.here();
        match self.bump() {
            Some(Tok::Int(n)) => Ok(self.sem.from_int(n)),
            Some(Tok::Name(name)) => self.sem.name(at, &name),
            Some(Tok::JetHigh(base, order)) => self.sem.jet_high(at, &base, order),
            Some(Tok::LParen) => {
                let v = self.parse_expr()?;
                self.expect(Tok::RParen, "closing parenthesis")?;
                Ok(v)
            }
            Some(other) => Err(CliError::parse_at(at, format!("unexpected token {other:?}"))),
            None => Err(CliError::parse_at(at, "unexpected end of input")),
        }
    }
}

fn run_parser<S: Semantics>(src: &str, sem: &S) -> Result<S::Value, CliError> {
    let toks = lex(src)?;
    if toks.is_empty() {
        return Err(CliError::parse_at(0, "empty expression"));
    }
    let mut p = Parser { toks, pos: 0, sem, end: src.len() };
    let v = p.parse_expr()?;
    if p.pos != p.toks.len() {
        return Err(CliError::parse_at(p.here(), "trailing input"));
    }
    Ok(v)
}

struct SymbolSem<'a> {
    product: &'a dyn StarProduct,
}

impl<'a> Semantics for SymbolSem<'a> {
    type Value = PhaseSymbol;

    fn from_int(&self, n: i64) -> PhaseSymbol {
        PhaseSymbol::from_poly(DiffPoly::from_int(n))
    }

    fn name(&self, pos: usize, name: &str) -> Result<PhaseSymbol, CliError> {
        match name {
            "p" => Ok(PhaseSymbol::p()),
            "k" => Ok(PhaseSymbol::from_poly(DiffPoly::kappa())),
            _ => match jet_from_name(name) {
                Some((field, order)) => Ok(PhaseSymbol::from_poly(DiffPoly::jet(field, order))),
                None => Err(CliError::parse_at(
                    pos,
                    format!("unknown letter {name:?} (expected p, k, x, or a jet name)"),
                )),
            },
        }
    }

    fn jet_high(&self, pos: usize, base: &str, order: u32) -> Result<PhaseSymbol, CliError> {
        match jet_from_name(base) {
            Some((field, 0)) => Ok(PhaseSymbol::from_poly(DiffPoly::jet(field, order))),
            _ => Err(CliError::parse_at(pos, format!("bad jet base {base:?}"))),
        }
    }

    fn add(&self, a: PhaseSymbol, b: PhaseSymbol) -> PhaseSymbol {
        &a + &b
    }

    fn sub(&self, a: PhaseSymbol, b: PhaseSymbol) -> PhaseSymbol {
        &a - &b
    }

    fn neg(&self, a: PhaseSymbol) -> PhaseSymbol {
        -&a
    }

    fn product(&self, _pos: usize, a: PhaseSymbol, b: PhaseSymbol) -> Result<PhaseSymbol, CliError> {
        Ok(star(self.product, &a, &b, Floor::Exact)?)
    }

    fn juxtapose(
        &self,
        _pos: usize,
        a: PhaseSymbol,
        b: PhaseSymbol,
    ) -> Result<PhaseSymbol, CliError> {
        Ok(mul_commutative(&a, &b))
    }

    fn divide(&self, pos: usize, a: PhaseSymbol, b: PhaseSymbol) -> Result<PhaseSymbol, CliError> {
        let c = symbol_as_rational(&b).ok_or_else(|| {
            CliError::parse_at(pos, "division is only defined by nonzero rational constants")
        })?;
        if c.is_zero() {
            return Err(CliError::parse_at(pos, "division by zero"));
        }
        Ok(a.mul_rational(&c.recip()))
    }

    fn power(&self, pos: usize, a: PhaseSymbol, e: i64) -> Result<PhaseSymbol, CliError> {
        if e >= 0 {
            let mut acc = PhaseSymbol::one();
            for _ in 0..e {
                acc = star(self.product, &acc, &a, Floor::Exact)?;
            }
            return Ok(acc);
        }
        // negative powers: only invertible monomials c * p^j
        let mut terms = a.iter();
        match (terms.next(), terms.next(), a.floor()) {
            (Some((j, c)), None, Floor::Exact) => {
                if let Some(r) = c.as_rational() {
                    if !r.is_zero() {
                        let inv = r.pow(e as i32);
                        return Ok(PhaseSymbol::monomial(DiffPoly::from_rational(inv), j * e));
                    }
                }
                Err(CliError::parse_at(pos, "negative power of a non-invertible symbol"))
            }
            _ => Err(CliError::parse_at(pos, "negative power of a non-invertible symbol")),
        }
    }

    fn as_integer(&self, v: &PhaseSymbol) -> Option<i64> {
        let r = symbol_as_rational(v)?;
        if r.is_integer() {
            r.numerator().try_into().ok()
        } else {
            None
        }
    }
}

fn symbol_as_rational(s: &PhaseSymbol) -> Option<Rational> {
    if s.is_zero() {
        return Some(Rational::zero());
    }
    let mut terms = s.iter();
    match (terms.next(), terms.next()) {
        (Some((0, c)), None) => c.as_rational(),
        _ => None,
    }
}

/// Parses a phase-space symbol; `*`/`^` use the given product.
pub fn parse_symbol(src: &str, product: &dyn StarProduct) -> Result<PhaseSymbol, CliError> {
    run_parser(src, &SymbolSem { product })
}

/// Parses a differential polynomial (a symbol without any `p`).
pub fn parse_diffpoly(src: &str) -> Result<DiffPoly, CliError> {
    let s = parse_symbol(src, &starlax::symbols::MOYAL)?;
    for (e, _) in s.iter() {
        if e != 0 {
            return Err(CliError::Parse(format!(
                "expected a differential polynomial, found momentum power p^{e}"
            )));
        }
    }
    Ok(s.coeff(0))
}

struct QSem {
    floor: Floor,
}

impl Semantics for QSem {
    type Value = QOperator;

    fn from_int(&self, n: i64) -> QOperator {
        QOperator::coeff(QLaurent::constant(QScalar::from_int(n)))
    }

    fn name(&self, pos: usize, name: &str) -> Result<QOperator, CliError> {
        match name {
            "dq" => Ok(QOperator::dq(1)),
            "T" => Ok(QOperator::tau(1)),
            "x" => Ok(QOperator::coeff(QLaurent::x_pow(1))),
            "q" => Ok(QOperator::coeff(QLaurent::constant(QScalar::q()))),
            _ => Err(CliError::parse_at(
                pos,
                format!("unknown letter {name:?} (expected dq, T, x or q)"),
            )),
        }
    }

    fn jet_high(&self, pos: usize, _base: &str, _order: u32) -> Result<QOperator, CliError> {
        Err(CliError::parse_at(pos, "jet names do not exist in the operator grammar"))
    }

    fn add(&self, a: QOperator, b: QOperator) -> QOperator {
        a.add(&b)
    }

    fn sub(&self, a: QOperator, b: QOperator) -> QOperator {
        a.sub(&b)
    }

    fn neg(&self, a: QOperator) -> QOperator {
        QOperator::zero().sub(&a)
    }

    fn product(&self, _pos: usize, a: QOperator, b: QOperator) -> Result<QOperator, CliError> {
        Ok(a.mul(&b, self.floor)?)
    }

    fn juxtapose(&self, pos: usize, a: QOperator, b: QOperator) -> Result<QOperator, CliError> {
        self.product(pos, a, b)
    }

    fn divide(&self, pos: usize, a: QOperator, b: QOperator) -> Result<QOperator, CliError> {
        let inv = invert_qop(&b).ok_or_else(|| {
            CliError::parse_at(pos, "division is only defined by invertible scalar monomials")
        })?;
        Ok(a.mul(&inv, self.floor)?)
    }

    fn power(&self, pos: usize, a: QOperator, e: i64) -> Result<QOperator, CliError> {
        if e >= 0 {
            let mut acc = QOperator::identity();
            for _ in 0..e {
                acc = acc.mul(&a, self.floor)?;
            }
            return Ok(acc);
        }
        // negative powers of single pure letters or invertible monomials
        let mut words = a.iter();
        if let (Some(((tau, dq), c)), None) = (words.next(), words.next()) {
            if c.is_one() && dq == 0 {
                return Ok(QOperator::tau(tau * e));
            }
            if c.is_one() && tau == 0 {
                return Ok(QOperator::dq(dq * e));
            }
            if tau == 0 && dq == 0 {
                if let Some(inv) = invert_qlaurent(c) {
                    let mut acc = QOperator::identity();
                    for _ in 0..(-e) {
                        acc = acc.mul(&QOperator::coeff(inv.clone()), self.floor)?;
                    }
                    return Ok(acc);
                }
            }
        }
        Err(CliError::parse_at(pos, "negative power of a non-invertible operator"))
    }

    fn as_integer(&self, v: &QOperator) -> Option<i64> {
        let mut words = v.iter();
        if let (Some(((0, 0), c)), None) = (words.next(), words.next()) {
            let mut terms = c.iter();
            if let (Some((0, s)), None) = (terms.next(), terms.next()) {
                if s.denominator().is_one() {
                    let coeffs: Vec<_> = s.numerator().iter().collect();
                    if let [(0, r)] = coeffs.as_slice() {
                        if r.is_integer() {
                            return r.numerator().try_into().ok();
                        }
                    }
                }
            }
        }
        if v.is_zero() {
            return Some(0);
        }
        None
    }
}

fn invert_qop(op: &QOperator) -> Option<QOperator> {
    let mut words = op.iter();
    if let (Some(((0, 0), c)), None) = (words.next(), words.next()) {
        return invert_qlaurent(c).map(QOperator::coeff);
    }
    None
}

fn invert_qlaurent(f: &QLaurent) -> Option<QLaurent> {
    let mut terms = f.iter();
    if let (Some((m, c)), None) = (terms.next(), terms.next()) {
        if !c.is_zero() {
            return Some(QLaurent::monomial(c.recip(), -m));
        }
    }
    None
}

/// Parses a q-operator expression; negative `dq` powers expand to `floor`.
pub fn parse_qop(src: &str, floor: Floor) -> Result<QOperator, CliError> {
    run_parser(src, &QSem { floor })
}
