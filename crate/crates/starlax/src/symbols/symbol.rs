//! The phase-space symbol type and its truncation bookkeeping.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::diffalg::DiffPoly;
use crate::scalars::Rational;

/// Truncation floor of a Laurent symbol.
///
/// `Exact` means the coefficient map is complete; `At(m)` means every
/// coefficient below exponent `m` is unknown/untracked.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Floor {
    Exact,
    At(i64),
}

impl Floor {
    /// The deeper-information-losing combination used by linear operations.
    pub fn combine(self, other: Floor) -> Floor {
        match (self, other) {
            (Floor::Exact, f) | (f, Floor::Exact) => f,
            (Floor::At(a), Floor::At(b)) => Floor::At(a.max(b)),
        }
    }

    pub fn admits(self, exponent: i64) -> bool {
        match self {
            Floor::Exact => true,
            Floor::At(m) => exponent >= m,
        }
    }
}

impl fmt::Display for Floor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Floor::Exact => write!(f, "exact"),
            Floor::At(m) => write!(f, "{m}"),
        }
    }
}

/// Errors of the truncated symbol calculus.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum SymbolError {
    /// The requested floor lies below the contamination bound of the operands.
    FloorTooDeep { required: i64 },
    /// An exact result was requested but the product has an infinite tail.
    InfiniteTail,
    /// A coefficient was requested below the tracked floor.
    FloorTooShallow { floor: i64, needed: i64 },
}

impl fmt::Display for SymbolError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SymbolError::FloorTooDeep { required } => write!(
                f,
                "requested floor is below the contamination bound; coefficients are only reliable at exponents >= {required}"
            ),
            SymbolError::InfiniteTail => write!(
                f,
                "product has an infinite Laurent tail; an explicit finite floor is required"
            ),
            SymbolError::FloorTooShallow { floor, needed } => write!(
                f,
                "coefficient at exponent {needed} is untracked (floor is {floor})"
            ),
        }
    }
}

impl std::error::Error for SymbolError {}

/// A truncated formal Laurent series in `p` with [`DiffPoly`] coefficients.
///
/// Stored in left-normal form; no zero coefficients, and every stored
/// exponent respects the floor, so equality is structural.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PhaseSymbol {
    coeffs: BTreeMap<i64, DiffPoly>,
    floor: Floor,
}

impl PhaseSymbol {
    pub fn zero() -> Self {
        PhaseSymbol { coeffs: BTreeMap::new(), floor: Floor::Exact }
    }

    pub fn zero_with_floor(floor: Floor) -> Self {
        PhaseSymbol { coeffs: BTreeMap::new(), floor }
    }

    pub fn from_parts(coeffs: BTreeMap<i64, DiffPoly>, floor: Floor) -> Self {
        let coeffs = coeffs
            .into_iter()
            .filter(|(e, c)| floor.admits(*e) && !c.is_zero())
            .collect();
        PhaseSymbol { coeffs, floor }
    }

    /// `poly * p^e` in left-normal storage.
    pub fn monomial(poly: DiffPoly, e: i64) -> Self {
        let mut coeffs = BTreeMap::new();
        if !poly.is_zero() {
            coeffs.insert(e, poly);
        }
        PhaseSymbol { coeffs, floor: Floor::Exact }
    }

    pub fn from_poly(poly: DiffPoly) -> Self {
        PhaseSymbol::monomial(poly, 0)
    }

    pub fn one() -> Self {
        PhaseSymbol::from_poly(DiffPoly::one())
    }

    /// The momentum letter `p`.
    pub fn p() -> Self {
        PhaseSymbol::p_pow(1)
    }

    pub fn p_pow(e: i64) -> Self {
        PhaseSymbol::monomial(DiffPoly::one(), e)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn floor(&self) -> Floor {
        self.floor
    }

    /// Highest stored exponent.
    pub fn top(&self) -> Option<i64> {
        self.coeffs.keys().next_back().copied()
    }

    /// Lowest stored exponent.
    pub fn bottom(&self) -> Option<i64> {
        self.coeffs.keys().next().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (i64, &DiffPoly)> {
        self.coeffs.iter().map(|(&e, c)| (e, c))
    }

    /// The coefficient at `e`; zero when absent but tracked.
    ///
    /// Returns an error when `e` lies below a finite floor.
    pub fn coeff_checked(&self, e: i64) -> Result<DiffPoly, SymbolError> {
        if !self.floor.admits(e) {
            let Floor::At(m) = self.floor else { unreachable!() };
            return Err(SymbolError::FloorTooShallow { floor: m, needed: e });
        }
        Ok(self.coeffs.get(&e).cloned().unwrap_or_else(DiffPoly::zero))
    }

    /// The coefficient at `e`, zero when absent (no floor check).
    pub fn coeff(&self, e: i64) -> DiffPoly {
        self.coeffs.get(&e).cloned().unwrap_or_else(DiffPoly::zero)
    }

    pub(crate) fn insert_add(&mut self, e: i64, poly: DiffPoly) {
        use std::collections::btree_map::Entry;
        if poly.is_zero() || !self.floor.admits(e) {
            return;
        }
        match self.coeffs.entry(e) {
            Entry::Vacant(slot) => {
                slot.insert(poly);
            }
            Entry::Occupied(mut slot) => {
                let v = &*slot.get() + &poly;
                if v.is_zero() {
                    slot.remove();
                } else {
                    slot.insert(v);
                }
            }
        }
    }

    /// Re-truncates to a (weakly shallower) floor, dropping deeper terms.
    pub fn truncated(&self, floor: Floor) -> Self {
        PhaseSymbol::from_parts(self.coeffs.clone(), self.floor.combine(floor))
    }

    pub fn map_coeffs(&self, f: impl Fn(&DiffPoly) -> DiffPoly) -> Self {
        PhaseSymbol::from_parts(
            self.coeffs.iter().map(|(&e, c)| (e, f(c))).collect(),
            self.floor,
        )
    }

    /// Substitutes a value for `k` in every coefficient.
    pub fn substitute_kappa(&self, value: &Rational) -> Self {
        self.map_coeffs(|c| c.substitute_kappa(value))
    }

    pub fn mul_rational(&self, c: &Rational) -> Self {
        self.map_coeffs(|p| p.mul_rational(c))
    }

    /// Derivative with respect to `p`; the floor shifts down by one exponent.
    pub fn p_derivative(&self) -> Self {
        let floor = match self.floor {
            Floor::Exact => Floor::Exact,
            Floor::At(m) => Floor::At(m - 1),
        };
        let coeffs = self
            .coeffs
            .iter()
            .filter(|(&e, _)| e != 0)
            .map(|(&e, c)| (e - 1, c.mul_rational(&Rational::from_int(e))))
            .collect();
        PhaseSymbol::from_parts(coeffs, floor)
    }

    /// Total `x`-derivative applied to every coefficient.
    pub fn x_derivative(&self) -> Self {
        self.map_coeffs(DiffPoly::total_x_derivative)
    }
}

impl Add<&PhaseSymbol> for &PhaseSymbol {
    type Output = PhaseSymbol;
    fn add(self, rhs: &PhaseSymbol) -> PhaseSymbol {
        let mut out = PhaseSymbol::zero_with_floor(self.floor.combine(rhs.floor));
        for (e, c) in self.iter().chain(rhs.iter()) {
            out.insert_add(e, c.clone());
        }
        out
    }
}

impl Sub<&PhaseSymbol> for &PhaseSymbol {
    type Output = PhaseSymbol;
    fn sub(self, rhs: &PhaseSymbol) -> PhaseSymbol {
        let mut out = PhaseSymbol::zero_with_floor(self.floor.combine(rhs.floor));
        for (e, c) in self.iter() {
            out.insert_add(e, c.clone());
        }
        for (e, c) in rhs.iter() {
            out.insert_add(e, -c);
        }
        out
    }
}

impl Neg for &PhaseSymbol {
    type Output = PhaseSymbol;
    fn neg(self) -> PhaseSymbol {
        self.map_coeffs(|c| -c)
    }
}

impl PhaseSymbol {
    pub fn text(&self) -> String {
        self.render(false)
    }

    pub fn latex(&self) -> String {
        self.render(true)
    }

    fn render(&self, latex: bool) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts: Vec<(bool, String)> = Vec::new();
        for (&e, poly) in self.coeffs.iter().rev() {
            let pstr = p_text(e, latex);
            if e == 0 {
                for (m, c) in poly.render_terms() {
                    parts.push(crate::diffalg::render_term(m, c, latex));
                }
                continue;
            }
            let rendered = poly.render_terms();
            if rendered.len() == 1 {
                let (m, c) = rendered[0];
                let (neg, body) = crate::diffalg::render_term(m, c, latex);
                let body = if body == "1" {
                    pstr
                } else {
                    format!("{body} {pstr}")
                };
                parts.push((neg, body));
            } else {
                let inner = if latex { poly.latex() } else { poly.text() };
                parts.push((false, format!("({inner}) {pstr}")));
            }
        }
        let mut out = String::new();
        for (i, (neg, body)) in parts.into_iter().enumerate() {
            if i == 0 {
                if neg {
                    out.push('-');
                }
            } else {
                out.push_str(if neg { " - " } else { " + " });
            }
            out.push_str(&body);
        }
        out
    }
}

fn p_text(e: i64, latex: bool) -> String {
    match (latex, e) {
        (_, 1) => "p".into(),
        (false, _) => format!("p^{e}"),
        (true, _) if (0..=9).contains(&e) => format!("p^{e}"),
        (true, _) => format!("p^{{{e}}}"),
    }
}

impl fmt::Display for PhaseSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.text())
    }
}
