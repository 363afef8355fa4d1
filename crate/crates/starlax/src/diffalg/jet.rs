//! Jet variables: dependent fields and their formal `x`-derivatives.

use std::fmt;

/// A dependent field of the differential ring.
///
/// `U(0)` renders as `u`, `U(i)` as `u{i}` for `i >= 1`. `X` is the
/// distinguished independent letter with the derivation rule `D(x) = 1`;
/// it sorts after every `U` field.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum Field {
    U(u16),
    X,
}

impl Field {
    pub fn name(&self) -> String {
        match self {
            Field::U(0) => "u".into(),
            Field::U(i) => format!("u{i}"),
            Field::X => "x".into(),
        }
    }

    pub fn latex(&self) -> String {
        match self {
            Field::U(0) => "u".into(),
            Field::U(i) => format!("u_{{{i}}}"),
            Field::X => "x".into(),
        }
    }
}

/// A jet variable: a field together with its derivative order.
///
/// The pair is the identity of the variable; ordering is lexicographic in
/// (field, order).
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct JetVar {
    pub field: Field,
    pub order: u32,
}

impl JetVar {
    pub fn new(field: Field, order: u32) -> Self {
        JetVar { field, order }
    }

    pub fn base(field: Field) -> Self {
        JetVar { field, order: 0 }
    }

    /// Weight `order + 2` for `U` fields under the scaling grading; `x`
    /// carries weight `-1` so that the total derivative raises weight by one.
    pub fn scaling_weight(&self) -> i64 {
        match self.field {
            Field::U(_) => self.order as i64 + 2,
            Field::X => -1,
        }
    }

    /// Text name: `u`, `u_x`, `u_xx`, `u_xxx`, then `u^(4)`, `u^(5)`, ...
    pub fn name(&self) -> String {
        let base = self.field.name();
        match self.order {
            0 => base,
            1..=3 => format!("{}_{}", base, "x".repeat(self.order as usize)),
            n => format!("{base}^({n})"),
        }
    }

    pub fn latex(&self) -> String {
        match (self.field, self.order) {
            (f, 0) => f.latex(),
            (Field::U(0), n @ 1..=3) => {
                let xs = "x".repeat(n as usize);
                if n == 1 {
                    format!("u_{xs}")
                } else {
                    format!("u_{{{xs}}}")
                }
            }
            (Field::U(0), n) => format!("u^{{({n})}}"),
            (Field::U(i), n @ 1..=3) => format!("u_{{{},{}}}", i, "x".repeat(n as usize)),
            (Field::U(i), n) => format!("u_{{{i}}}^{{({n})}}"),
            (Field::X, _) => unreachable!("x has no jet prolongation"),
        }
    }
}

impl fmt::Display for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}
