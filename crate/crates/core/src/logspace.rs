//! Nonnegative reals carried in natural-log space.
//!
//! Expected match counts at realistic scales span `e^{+-700}` and beyond, so
//! every probability and count in the analytic engine is a [`LogScalar`]:
//! multiplication is addition of logs, summation is log-sum-exp. Zero is
//! represented as `ln = -inf`.

use core::cmp::Ordering;
use core::ops::{Div, Mul, MulAssign};
// Live only in pure no-std builds: whenever any crate in the graph links
// std (tests via proptest, or a std consumer), the inherent f64 methods
// shadow the trait and the import goes quiet.
#[allow(unused_imports)]
use num_traits::Float;

/// A nonnegative real number stored as its natural logarithm.
///
/// `LogScalar::ZERO` carries `ln = -inf`. Arithmetic never overflows for
/// `|ln| <= 1e6`; summation uses max-shifted log-sum-exp with relative error
/// around machine epsilon per term.
#[derive(Clone, Copy, Debug, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LogScalar {
    ln: f64,
}

impl LogScalar {
    pub const ZERO: LogScalar = LogScalar { ln: f64::NEG_INFINITY };
    pub const ONE: LogScalar = LogScalar { ln: 0.0 };

    /// Wraps a natural logarithm. `NaN` is rejected in debug builds.
    pub fn from_ln(ln: f64) -> LogScalar {
        debug_assert!(!ln.is_nan(), "LogScalar from NaN");
        LogScalar { ln }
    }

    /// Converts a nonnegative linear-space value.
    pub fn from_value(v: f64) -> LogScalar {
        debug_assert!(v >= 0.0, "LogScalar from negative value");
        LogScalar { ln: v.ln() }
    }

    /// A probability in `[0, 1]`; asserted in debug builds.
    pub fn from_prob(p: f64) -> LogScalar {
        debug_assert!((0.0..=1.0).contains(&p), "probability out of range");
        LogScalar { ln: p.ln() }
    }

    pub fn ln(self) -> f64 {
        self.ln
    }

    /// Linear-space value; overflows to `inf` when `ln > ~709`.
    pub fn value(self) -> f64 {
        self.ln.exp()
    }

    pub fn is_zero(self) -> bool {
        self.ln == f64::NEG_INFINITY
    }

    /// `self^k` for a nonnegative integer exponent; `0^0 = 1`.
    pub fn powi(self, k: u64) -> LogScalar {
        if k == 0 {
            return LogScalar::ONE;
        }
        if self.is_zero() {
            return LogScalar::ZERO;
        }
        LogScalar { ln: self.ln * k as f64 }
    }

    /// Log-sum-exp over the terms, max-shifted for stability.
    pub fn sum<I: IntoIterator<Item = LogScalar>>(terms: I) -> LogScalar {
        let mut acc = LogSum::new();
        for t in terms {
            acc.add(t);
        }
        acc.total()
    }
}

impl Mul for LogScalar {
    type Output = LogScalar;
    fn mul(self, rhs: LogScalar) -> LogScalar {
        // 0 * x = 0 even when the other ln is +inf-like large.
        if self.is_zero() || rhs.is_zero() {
            return LogScalar::ZERO;
        }
        LogScalar { ln: self.ln + rhs.ln }
    }
}

impl MulAssign for LogScalar {
    fn mul_assign(&mut self, rhs: LogScalar) {
        *self = *self * rhs;
    }
}

impl Div for LogScalar {
    type Output = LogScalar;
    fn div(self, rhs: LogScalar) -> LogScalar {
        debug_assert!(!rhs.is_zero(), "LogScalar division by zero");
        if self.is_zero() {
            return LogScalar::ZERO;
        }
        LogScalar { ln: self.ln - rhs.ln }
    }
}

impl PartialOrd for LogScalar {
    fn partial_cmp(&self, other: &LogScalar) -> Option<Ordering> {
        self.ln.partial_cmp(&other.ln)
    }
}

/// Streaming log-sum-exp accumulator.
///
/// Keeps a running maximum `m` and the sum of `exp(term - m)`; rescales when
/// a larger term arrives. Suitable for sums of up to ~1e9 terms.
#[derive(Clone, Debug)]
pub struct LogSum {
    max_ln: f64,
    scaled: f64,
}

impl LogSum {
    pub fn new() -> LogSum {
        LogSum { max_ln: f64::NEG_INFINITY, scaled: 0.0 }
    }

    pub fn add(&mut self, term: LogScalar) {
        let ln = term.ln;
        if ln == f64::NEG_INFINITY {
            return;
        }
        if ln <= self.max_ln {
            self.scaled += (ln - self.max_ln).exp();
        } else {
            self.scaled = self.scaled * (self.max_ln - ln).exp() + 1.0;
            self.max_ln = ln;
        }
    }

    pub fn total(&self) -> LogScalar {
        if self.max_ln == f64::NEG_INFINITY {
            return LogScalar::ZERO;
        }
        LogScalar { ln: self.max_ln + self.scaled.ln() }
    }
}

impl Default for LogSum {
    fn default() -> Self {
        LogSum::new()
    }
}

/// `ln Gamma(x)` for `x > 0` by the Lanczos approximation (g = 5, 6 terms).
///
/// Relative error of the underlying Gamma approximation is below `2e-10`,
/// i.e. the absolute error of the returned logarithm is ~1e-10 plus a few
/// ulps of the leading terms.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "ln_gamma domain");
    const COEF: [f64; 6] = [
        76.18009172947146,
        -86.50532032941677,
        24.01409824083091,
        -1.231739572450155,
        0.1208650973866179e-2,
        -0.5395239384953e-5,
    ];
    let tmp = x + 5.5;
    let tmp = tmp - (x + 0.5) * tmp.ln();
    let mut ser = 1.000000000190015;
    for (i, c) in COEF.iter().enumerate() {
        ser += c / (x + 1.0 + i as f64);
    }
    -tmp + (2.5066282746310005 * ser / x).ln()
}

/// `ln n!`.
pub fn ln_factorial(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    ln_gamma(n as f64 + 1.0)
}

/// `ln C(n, k)`.
///
/// Small `k` (or `n - k`) is computed by an exact product loop, which keeps
/// the error at a few ulps for the binomials the noisy knowledge modes need;
/// large balanced binomials fall back to `ln_gamma`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let k = k.min(n - k);
    if k == 0 {
        return 0.0;
    }
    if k <= 64 {
        let mut s = 0.0;
        for i in 0..k {
            s += ((n - i) as f64).ln() - ((i + 1) as f64).ln();
        }
        s
    } else {
        ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
    }
}

/// `ln [n * (n-1) * ... * (n-k+1)]` as an exact term-by-term sum.
///
/// This is the candidate-space factor `C(n, n_Q) * n_Q!` of the expected
/// match count; the explicit sum avoids the catastrophic cancellation a
/// log-gamma difference suffers at large `n`.
pub fn ln_falling_factorial(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n, "falling factorial needs k <= n");
    let mut s = 0.0;
    for i in 0..k {
        s += ((n - i) as f64).ln();
    }
    s
}

/// Nearest integer with ties rounded to even, for nonnegative inputs.
///
/// Used wherever a real-valued parameter (density, ratio) must be converted
/// to a count; the tie rule is part of the declared contract.
pub fn round_ties_even(x: f64) -> u64 {
    debug_assert!(x >= 0.0 && x.is_finite());
    let floor = x.floor();
    let frac = x - floor;
    let base = floor as u64;
    match frac.partial_cmp(&0.5) {
        Some(Ordering::Less) => base,
        Some(Ordering::Greater) => base + 1,
        _ => {
            if base % 2 == 0 {
                base
            } else {
                base + 1
            }
        }
    }
}
