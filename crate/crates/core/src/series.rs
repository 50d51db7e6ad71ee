//! Truncated summation of positive series with a rigorous tail bound.

/// Default cap on the number of terms any single series may use.
pub const DEFAULT_MAX_TERMS: usize = 1_000_000;

/// Value of a truncated infinite series.
///
/// When `diverged` is false the true value lies in
/// `[value, value + truncation_bound]`. When it is true the term cap was
/// reached first: `value` is the last partial sum and `truncation_bound`
/// is `inf`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SumResult {
    pub value: f64,
    pub terms_used: usize,
    pub truncation_bound: f64,
    pub diverged: bool,
}

/// Stopping rule shared by every series: stop once the tail bound falls
/// below `tol` times the partial sum, or give up after `max_terms`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncation {
    pub tol: f64,
    pub max_terms: usize,
}

impl Truncation {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            max_terms: DEFAULT_MAX_TERMS,
        }
    }

    pub fn with_max_terms(mut self, max_terms: usize) -> Self {
        self.max_terms = max_terms;
        self
    }
}

impl Default for Truncation {
    fn default() -> Self {
        Self::new(1e-15)
    }
}

/// Neumaier-compensated accumulator. Summation order is whatever order the
/// caller adds terms in, so results are reproducible bit for bit.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for v in iter {
            acc.add(v);
        }
        acc
    }
}

/// A series evaluated relative to its first term: the represented value is
/// `exp(log_scale) * scaled_value`. Keeping the scale separate lets callers
/// form ratios to the leading term without underflow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct ScaledSeries {
    pub log_scale: f64,
    pub scaled_value: f64,
    pub scaled_bound: f64,
    pub terms: usize,
    pub capped: bool,
}

impl ScaledSeries {
    pub fn into_sum_result(self) -> SumResult {
        let scale = self.log_scale.exp();
        SumResult {
            value: scale * self.scaled_value,
            terms_used: self.terms,
            truncation_bound: if self.capped {
                f64::INFINITY
            } else {
                scale * self.scaled_bound
            },
            diverged: self.capped,
        }
    }
}

/// Sums `sum_n exp(log_term(n))` in ascending `n`.
///
/// `ratio_bound(n, log_t_n, log_t_next)` must return an upper bound on
/// `t_{i+1} / t_i` valid for every `i > n`. Whenever that bound is below one
/// the omitted tail after term `n` is at most `t_{n+1} / (1 - bound)`, and
/// summation stops as soon as this is below `tol` times the partial sum.
pub(crate) fn sum_positive_series<F, R>(log_term: F, ratio_bound: R, trunc: &Truncation) -> ScaledSeries
where
    F: Fn(u64) -> f64,
    R: Fn(u64, f64, f64) -> f64,
{
    let log_scale = log_term(0);
    let mut acc = CompensatedSum::new();
    acc.add(1.0);
    let mut n = 0u64;
    let mut current = log_scale;
    loop {
        let next = log_term(n + 1);
        let scaled_next = (next - log_scale).exp();
        let rho = ratio_bound(n, current, next);
        if rho < 1.0 {
            let bound = scaled_next / (1.0 - rho);
            if bound < trunc.tol * acc.value() {
                return ScaledSeries {
                    log_scale,
                    scaled_value: acc.value(),
                    scaled_bound: bound,
                    terms: (n + 1) as usize,
                    capped: false,
                };
            }
        }
        if (n + 1) as usize >= trunc.max_terms {
            return ScaledSeries {
                log_scale,
                scaled_value: acc.value(),
                scaled_bound: f64::INFINITY,
                terms: (n + 1) as usize,
                capped: true,
            };
        }
        acc.add(scaled_next);
        n += 1;
        current = next;
    }
}
