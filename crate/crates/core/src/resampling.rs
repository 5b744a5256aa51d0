//! Resampling from the chain's own past.
//!
//! A base kernel runs normally except at deterministic times a_1 < a_2 < …
//! where the next state is instead drawn uniformly from the post-burn-in
//! past {X_B, …, X_{n-1}}. The schedule a_k = B + ceil(b2 · k^alpha) with
//! alpha > 1 spaces resamples further and further apart, which is what keeps
//! the limit distribution intact; [`ResampleSchedule::divergence_delta`]
//! computes the diagnostic quantity whose divergence certifies a schedule
//! for a given kernel contraction rate.

use crate::core::{
    ChainTrace, Error, Result, RngStream, State, TransitionKernel, STREAM_KERNEL, STREAM_RESAMPLE,
};

/// Default schedule growth factor.
pub const DEFAULT_B2: f64 = 1.0;
/// Default schedule exponent; values near 1.3 work well in practice.
pub const DEFAULT_ALPHA: f64 = 1.3;

/// Time indices must stay exactly representable in f64 arithmetic.
const MAX_TIME: f64 = 9_007_199_254_740_992.0; // 2^53

/// Deterministic resampling times a_k = B + ceil(b2 · k^alpha).
#[derive(Clone, Debug, PartialEq)]
pub struct ResampleSchedule {
    burn_in: usize,
    b2: f64,
    alpha: f64,
}

impl ResampleSchedule {
    pub fn new(burn_in: usize, b2: f64, alpha: f64) -> Result<Self> {
        if !(b2 > 0.0) || !b2.is_finite() {
            return Err(Error::InvalidConfig(format!("schedule b2 must be > 0, got {b2}")));
        }
        if !(alpha >= 1.0) || !alpha.is_finite() {
            return Err(Error::InvalidConfig(format!("schedule alpha must be >= 1, got {alpha}")));
        }
        Ok(Self { burn_in, b2, alpha })
    }

    /// Schedule with the default b2 = 1, alpha = 1.3.
    pub fn with_defaults(burn_in: usize) -> Self {
        Self { burn_in, b2: DEFAULT_B2, alpha: DEFAULT_ALPHA }
    }

    pub fn burn_in(&self) -> usize {
        self.burn_in
    }

    pub fn b2(&self) -> f64 {
        self.b2
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// k-th scheduled time, B + ceil(b2 · k^alpha). Consecutive k may map to
    /// the same time; duplicates are merged at run time.
    pub fn time(&self, k: u64) -> Result<u64> {
        if k == 0 {
            return Err(Error::Domain("schedule index k must be >= 1".into()));
        }
        let offset = (self.b2 * (k as f64).powf(self.alpha)).ceil();
        let t = self.burn_in as f64 + offset;
        if !(t < MAX_TIME) {
            return Err(Error::ScheduleOverflow { k });
        }
        Ok(t as u64)
    }

    /// All distinct scheduled times <= horizon, in increasing order.
    pub fn times_up_to(&self, horizon: u64) -> Result<Vec<u64>> {
        let mut out = Vec::new();
        let mut k = 1u64;
        loop {
            let t = match self.time(k) {
                Ok(t) => t,
                Err(Error::ScheduleOverflow { .. }) => break,
                Err(e) => return Err(e),
            };
            if t > horizon {
                break;
            }
            if out.last() != Some(&t) {
                out.push(t);
            }
            k += 1;
        }
        Ok(out)
    }

    /// The divergence diagnostic
    /// delta_n = -a_1 log(rho) + sum_{k=2}^n [log(a_k) - log(c + a_{k-1})]
    /// with c = 1/(1-rho), computed on the burn-in-relative times
    /// a_k = ceil(b2 · k^alpha). `rho` is the geometric contraction rate of
    /// the base kernel; delta_n -> infinity certifies the schedule. This is
    /// a diagnostic, not a gate: rho is rarely known for real kernels.
    pub fn divergence_delta(&self, rho: f64, n: u64) -> Result<f64> {
        if !(rho > 0.0 && rho < 1.0) {
            return Err(Error::Domain(format!("rho must be in (0,1), got {rho}")));
        }
        if n == 0 {
            return Err(Error::Domain("n must be >= 1".into()));
        }
        let c = 1.0 / (1.0 - rho);
        let rel = |k: u64| -> Result<f64> { Ok((self.time(k)? - self.burn_in as u64) as f64) };
        let mut delta = -rel(1)? * rho.ln();
        let mut prev = rel(1)?;
        for k in 2..=n {
            let a_k = rel(k)?;
            delta += a_k.ln() - (c + prev).ln();
            prev = a_k;
        }
        Ok(delta)
    }

    /// Rough size of the past buffer a resampled run will hold at step
    /// `n_steps`: every post-burn-in state is kept, with no thinning.
    pub fn buffer_bytes(&self, n_steps: usize, dim: usize) -> usize {
        n_steps.saturating_sub(self.burn_in) * dim * std::mem::size_of::<f64>()
    }
}

/// The growing store of post-burn-in states {X_B, …, X_{n-1}}.
#[derive(Clone, Debug, Default)]
pub struct PastBuffer {
    states: Vec<State>,
}

impl PastBuffer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, x: State) {
        self.states.push(x);
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Uniform draw from the buffer (equal weights).
    pub fn draw(&self, rng: &mut RngStream) -> Result<&State> {
        if self.states.is_empty() {
            return Err(Error::Internal("past buffer empty at a scheduled time".into()));
        }
        Ok(&self.states[rng.index(self.states.len())])
    }
}

/// Run a chain with optional resampling from the past, recording the listed
/// coordinates (all of them when `record` is None).
///
/// Kernel moves consume the substream labeled [`STREAM_KERNEL`], resampling
/// index draws the substream labeled [`STREAM_RESAMPLE`]; a run whose
/// schedule never fires is therefore bit-identical to a plain run.
pub fn run_chain(
    kernel: &dyn TransitionKernel,
    schedule: Option<&ResampleSchedule>,
    n_steps: usize,
    x0: &State,
    rng: &RngStream,
    record: Option<&[usize]>,
) -> Result<ChainTrace> {
    if n_steps == 0 {
        return Err(Error::InvalidConfig("n_steps must be >= 1".into()));
    }
    if x0.dim() != kernel.dim() {
        return Err(Error::DimensionMismatch { expected: kernel.dim(), got: x0.dim() });
    }
    let mut kernel_rng = rng.substream(STREAM_KERNEL);
    let mut resample_rng = rng.substream(STREAM_RESAMPLE);

    let scheduled = match schedule {
        Some(s) => s.times_up_to(n_steps as u64)?,
        None => Vec::new(),
    };
    let burn_in = schedule.map_or(0, ResampleSchedule::burn_in);
    let mut next_event = scheduled.iter().copied().peekable();

    let mut trace = ChainTrace::new(kernel.dim(), record, rng.seed())?;
    let mut buffer = PastBuffer::new();
    if schedule.is_some() && burn_in == 0 {
        buffer.push(x0.clone());
    }

    let mut x = x0.clone();
    for n in 1..=n_steps {
        let fire = next_event.peek() == Some(&(n as u64));
        if fire {
            next_event.next();
            if n <= burn_in {
                return Err(Error::Internal(format!(
                    "scheduled time {n} not past burn-in {burn_in}"
                )));
            }
            x = buffer.draw(&mut resample_rng)?.clone();
            trace.push_row(&x, true, true);
        } else {
            let (next, accepted) = kernel.step(&x, &mut kernel_rng)?;
            x = next;
            trace.push_row(&x, false, accepted);
        }
        if schedule.is_some() && n >= burn_in {
            buffer.push(x.clone());
        }
    }
    Ok(trace)
}

/// Plain kernel run (no resampling), full state recorded.
pub fn run_plain(
    kernel: &dyn TransitionKernel,
    n_steps: usize,
    x0: &State,
    rng: &RngStream,
) -> Result<ChainTrace> {
    run_chain(kernel, None, n_steps, x0, rng, None)
}

/// Kernel run with resampling from the past, full state recorded.
pub fn run_with_resampling(
    kernel: &dyn TransitionKernel,
    schedule: &ResampleSchedule,
    n_steps: usize,
    x0: &State,
    rng: &RngStream,
) -> Result<ChainTrace> {
    run_chain(kernel, Some(schedule), n_steps, x0, rng, None)
}
