use std::fmt;

/// Kleene three-valued truth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Truth {
    T,
    F,
    U,
}

impl Truth {
    pub fn not(self) -> Truth {
        match self {
            Truth::T => Truth::F,
            Truth::F => Truth::T,
            Truth::U => Truth::U,
        }
    }

    pub fn and(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::F, _) | (_, Truth::F) => Truth::F,
            (Truth::T, Truth::T) => Truth::T,
            _ => Truth::U,
        }
    }

    pub fn or(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::T, _) | (_, Truth::T) => Truth::T,
            (Truth::F, Truth::F) => Truth::F,
            _ => Truth::U,
        }
    }

    pub fn implies(self, other: Truth) -> Truth {
        self.not().or(other)
    }

    pub fn is_true(self) -> bool {
        self == Truth::T
    }
}

impl From<bool> for Truth {
    fn from(b: bool) -> Truth {
        if b {
            Truth::T
        } else {
            Truth::F
        }
    }
}

impl fmt::Display for Truth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Truth::T => "T",
            Truth::F => "F",
            Truth::U => "U",
        })
    }
}
