/// Built-in payoff shapes on the coordinate sum `s = x1 + ... + xd`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PayoffKind {
    /// `1{s > k}`
    Indicator,
    /// `(s - k)_+`
    Call,
}

/// Payoff together with exponential-growth constants `|f(x)| <= exp(c1 |x|_1 + c2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Payoff {
    pub kind: PayoffKind,
    pub strike: f64,
    pub c1: f64,
    pub c2: f64,
}

pub fn payoff_indicator(k: f64) -> Payoff {
    Payoff {
        kind: PayoffKind::Indicator,
        strike: k,
        c1: 0.0,
        c2: 0.0,
    }
}

/// `(s - k)_+ <= |x|_1 + max(0, -k) <= exp(|x|_1 + max(0, -k))`.
pub fn payoff_call(k: f64) -> Payoff {
    Payoff {
        kind: PayoffKind::Call,
        strike: k,
        c1: 1.0,
        c2: (-k).max(0.0),
    }
}

impl Payoff {
    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        let s: f64 = x.iter().sum();
        match self.kind {
            PayoffKind::Indicator => {
                if s > self.strike {
                    1.0
                } else {
                    0.0
                }
            }
            PayoffKind::Call => (s - self.strike).max(0.0),
        }
    }

    pub fn growth_bound(&self, x: &[f64]) -> f64 {
        let l1: f64 = x.iter().map(|v| v.abs()).sum();
        (self.c1 * l1 + self.c2).exp()
    }

    pub fn id(&self) -> &'static str {
        match self.kind {
            PayoffKind::Indicator => "indicator",
            PayoffKind::Call => "call",
        }
    }
}
