use crate::engine::TrialResult;

/// Two-sided normal 99% quantile.
pub const CI99_MULTIPLIER: f64 = 2.576;

/// Mergeable Welford accumulator over trial values plus trial diagnostics.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct EstimateStats {
    pub n: u64,
    pub mean: f64,
    /// Sum of squared deviations from the mean.
    pub m2: f64,
    /// Wall-clock seconds of the batch that produced these statistics.
    pub wall_seconds: f64,
    /// Sum of per-trial timings in nanoseconds.
    pub trial_ns: f64,
    pub jumps_sum: f64,
    pub grid_points_sum: f64,
    pub segments_sum: f64,
}

impl EstimateStats {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, value: f64) {
        self.n += 1;
        let delta = value - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (value - self.mean);
    }

    pub fn push_trial(&mut self, t: &TrialResult) {
        self.push(t.value);
        self.trial_ns += t.wall_ns as f64;
        self.jumps_sum += t.n_jumps as f64;
        self.grid_points_sum += t.n_grid_points_total as f64;
        self.segments_sum += t.n_segments as f64;
    }

    /// Pairwise (Chan et al.) combination.
    pub fn merge(&self, other: &Self) -> Self {
        if self.n == 0 {
            return *other;
        }
        if other.n == 0 {
            return *self;
        }
        let n = self.n + other.n;
        let (na, nb) = (self.n as f64, other.n as f64);
        let delta = other.mean - self.mean;
        Self {
            n,
            mean: self.mean + delta * nb / n as f64,
            m2: self.m2 + other.m2 + delta * delta * na * nb / n as f64,
            wall_seconds: self.wall_seconds + other.wall_seconds,
            trial_ns: self.trial_ns + other.trial_ns,
            jumps_sum: self.jumps_sum + other.jumps_sum,
            grid_points_sum: self.grid_points_sum + other.grid_points_sum,
            segments_sum: self.segments_sum + other.segments_sum,
        }
    }

    /// Unbiased per-trial sample variance `m2 / (n - 1)`.
    pub fn var(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n - 1) as f64).max(0.0)
        }
    }

    pub fn stderr(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        (self.var() / self.n as f64).sqrt()
    }

    /// Half-width of the normal 99% confidence interval.
    pub fn ci99(&self) -> f64 {
        CI99_MULTIPLIER * self.stderr()
    }

    pub fn jumps_mean(&self) -> f64 {
        self.per_trial(self.jumps_sum)
    }

    pub fn grid_points_per_segment(&self) -> f64 {
        if self.segments_sum == 0.0 {
            0.0
        } else {
            self.grid_points_sum / self.segments_sum
        }
    }

    fn per_trial(&self, s: f64) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            s / self.n as f64
        }
    }
}

/// Relative change of the running mean of `g(value)` between the first tenth
/// of the sample and the whole sample: `|m(n) - m(n/10)| / |m(n)|`.
pub fn running_moment_drift(values: &[f64], g: impl Fn(f64) -> f64) -> f64 {
    let n = values.len();
    let tenth = (n / 10).max(1);
    let head: f64 = values[..tenth].iter().map(|&v| g(v)).sum::<f64>() / tenth as f64;
    let all: f64 = values.iter().map(|&v| g(v)).sum::<f64>() / n as f64;
    (all - head).abs() / all.abs()
}
