/// A Monte Carlo estimate together with the data needed to reproduce it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: f64,
    pub samples: u64,
    pub seed: u64,
}

impl Estimate {
    /// Estimate of a Bernoulli mean `p_hat` with the usual binomial
    /// standard error `sqrt(p(1-p)/samples)`.
    pub fn bernoulli(successes: u64, samples: u64, seed: u64) -> Estimate {
        let p = successes as f64 / samples as f64;
        Estimate {
            value: p,
            std_error: (p * (1.0 - p) / samples as f64).sqrt(),
            samples,
            seed,
        }
    }

    /// Estimate of a general sample mean from the running sum and sum of
    /// squares.
    pub fn from_sums(sum: f64, sum_sq: f64, samples: u64, seed: u64) -> Estimate {
        let nf = samples as f64;
        let mean = sum / nf;
        let var = (sum_sq / nf - mean * mean).max(0.0);
        Estimate {
            value: mean,
            std_error: (var / nf).sqrt(),
            samples,
            seed,
        }
    }
}
