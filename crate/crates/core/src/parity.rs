//! Classification of a tail index into the three parity cases.

#[allow(unused_imports)] // needed without std, shadowed by inherent methods with it
use num_traits::Float;

/// Distance from the nearest integer below which an index counts as integer.
pub const INTEGER_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parity {
    EvenInteger,
    OddInteger,
    NonInteger,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParityClass {
    pub tag: Parity,
    pub value: f64,
}

impl ParityClass {
    pub fn classify(value: f64) -> Self {
        let r = value.round();
        let tag = if (value - r).abs() < INTEGER_TOLERANCE {
            if (r as i64) % 2 == 0 {
                Parity::EvenInteger
            } else {
                Parity::OddInteger
            }
        } else {
            Parity::NonInteger
        };
        ParityClass { tag, value }
    }

    /// The rounded index when the class is an integer one.
    pub fn integer(&self) -> Option<u32> {
        match self.tag {
            Parity::NonInteger => None,
            _ => Some(self.value.round() as u32),
        }
    }

    pub fn is_even(&self) -> bool {
        self.tag == Parity::EvenInteger
    }

    pub fn is_odd(&self) -> bool {
        self.tag == Parity::OddInteger
    }

    pub fn name(&self) -> &'static str {
        match self.tag {
            Parity::EvenInteger => "even",
            Parity::OddInteger => "odd",
            Parity::NonInteger => "noninteger",
        }
    }
}
