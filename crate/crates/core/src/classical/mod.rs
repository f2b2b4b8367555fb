//! Classical strategies, the parity-obliviousness check on encodings, the
//! closed-form noncontextual bound and an exact LP oracle for it.

mod oracle;
pub mod simplex;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::zmod::{self, InputSpace, ZmodError};
use crate::Task;

pub use oracle::{
    classical_bound_oracle, classical_unconstrained_oracle, BoundMethod, BoundReport,
};

/// Row sums of floating-point encodings must be within this of one.
pub const ROW_SUM_TOL: f64 = 1e-12;

/// Largest decoder space the oracle will enumerate.
pub const MAX_DECODERS: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ClassicalError {
    #[error(transparent)]
    Zmod(#[from] ZmodError),
    #[error("invalid classical strategy: {0}")]
    InvalidStrategy(String),
    #[error("decoder space m^(K·n) = {count} exceeds the enumeration cap")]
    DecoderSpaceOverflow { count: u128 },
    #[error("message alphabet K = {k} must lie in 1..=m^2 = {max}")]
    AlphabetSize { k: usize, max: usize },
    #[error("parity-constrained LP reported infeasible; the uniform encoding is always feasible")]
    Infeasible,
    #[error("bounded LP reported unbounded")]
    Unbounded,
}

pub type Result<T> = std::result::Result<T, ClassicalError>;

/// Encoding probabilities `p(M|x)`, row-major with rows indexed by `x`.
#[derive(Clone, Debug, PartialEq)]
pub enum Encoding {
    Exact(Vec<BigRational>),
    Float(Vec<f64>),
}

impl Encoding {
    pub fn len(&self) -> usize {
        match self {
            Encoding::Exact(v) => v.len(),
            Encoding::Float(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn get(&self, i: usize) -> f64 {
        match self {
            Encoding::Exact(v) => v[i].to_f64().unwrap_or(f64::NAN),
            Encoding::Float(v) => v[i],
        }
    }
}

/// A stochastic encoding over a `K`-letter alphabet plus a deterministic
/// decoder table `b(M, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassicalStrategy {
    space: InputSpace,
    alphabet: usize,
    encoding: Encoding,
    decoder: Vec<u32>,
}

impl ClassicalStrategy {
    pub fn new(
        space: InputSpace,
        alphabet: usize,
        encoding: Encoding,
        decoder: Vec<u32>,
    ) -> Result<Self> {
        let invalid = |s: String| Err(ClassicalError::InvalidStrategy(s));
        if alphabet == 0 {
            return invalid("empty message alphabet".into());
        }
        if encoding.len() != space.size() * alphabet {
            return invalid(format!(
                "encoding has {} entries, expected {}",
                encoding.len(),
                space.size() * alphabet
            ));
        }
        if decoder.len() != alphabet * space.n() {
            return invalid(format!(
                "decoder has {} entries, expected {}",
                decoder.len(),
                alphabet * space.n()
            ));
        }
        if let Some(b) = decoder.iter().find(|&&b| b >= space.m()) {
            return invalid(format!("decoder output {b} out of range"));
        }
        match &encoding {
            Encoding::Exact(v) => {
                if v.iter().any(|p| p < &BigRational::zero()) {
                    return invalid("negative probability".into());
                }
                for row in v.chunks(alphabet) {
                    let s: BigRational = row.iter().sum();
                    if s != BigRational::from_integer(BigInt::from(1)) {
                        return invalid(format!("row sums to {s}, not 1"));
                    }
                }
            }
            Encoding::Float(v) => {
                if v.iter().any(|p| !p.is_finite() || *p < -ROW_SUM_TOL) {
                    return invalid("negative or non-finite probability".into());
                }
                for row in v.chunks(alphabet) {
                    let s: f64 = row.iter().sum();
                    if (s - 1.0).abs() > ROW_SUM_TOL {
                        return invalid(format!("row sums to {s}, not 1"));
                    }
                }
            }
        }
        Ok(Self {
            space,
            alphabet,
            encoding,
            decoder,
        })
    }

    /// Sends the digit `x_position` (zero-based) as the message; the decoder
    /// outputs `M + 1 mod m` on that question and `0` on every other one.
    pub fn single_digit(space: InputSpace, position: usize) -> Self {
        let m = space.m() as usize;
        let one = BigRational::from_integer(BigInt::from(1));
        let mut encoding = vec![BigRational::zero(); space.size() * m];
        for x in 0..space.size() {
            encoding[x * m + space.digit(x, position) as usize] = one.clone();
        }
        let mut decoder = vec![0u32; m * space.n()];
        for msg in 0..m {
            decoder[msg * space.n() + position] = ((msg + 1) % m) as u32;
        }
        Self::new(space, m, Encoding::Exact(encoding), decoder)
            .expect("single-digit strategy is well formed")
    }

    /// Uniformly random message, decoder constant `b`.
    pub fn uniform(space: InputSpace, alphabet: usize, b: u32) -> Self {
        let p = BigRational::new(BigInt::from(1), BigInt::from(alphabet));
        let encoding = vec![p; space.size() * alphabet];
        let decoder = vec![b; alphabet * space.n()];
        Self::new(space, alphabet, Encoding::Exact(encoding), decoder)
            .expect("uniform strategy is well formed")
    }

    pub fn space(&self) -> InputSpace {
        self.space
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn encoding(&self) -> &Encoding {
        &self.encoding
    }

    pub fn decoder(&self) -> &[u32] {
        &self.decoder
    }

    pub fn probability(&self, x: usize, msg: usize) -> f64 {
        self.encoding.get(x * self.alphabet + msg)
    }

    /// Decoder output for message `msg` and one-based question `y`.
    pub fn decode(&self, msg: usize, y: usize) -> u32 {
        self.decoder[msg * self.space.n() + (y - 1)]
    }

    /// Column `x ↦ p(msg|x)` as a dense vector.
    pub fn column(&self, msg: usize) -> Vec<f64> {
        (0..self.space.size())
            .map(|x| self.probability(x, msg))
            .collect()
    }
}

/// Closed-form optimum over parity-oblivious classical (equivalently,
/// preparation-noncontextual) strategies: exclusion `1 − (n−1)/(mn)`,
/// retrieval `1/n + (n−1)/(nm)`.
pub fn noncontextual_bound(n: usize, m: u32, task: Task) -> Result<BigRational> {
    if !zmod::is_prime(m) {
        return Err(ZmodError::NotPrime(m).into());
    }
    if n < 2 {
        return Err(ZmodError::TooFewDigits(n).into());
    }
    let n = BigInt::from(n);
    let m = BigInt::from(m);
    let one = BigRational::from_integer(BigInt::from(1));
    let nm = &n * &m;
    let tail = BigRational::new(&n - 1, nm);
    Ok(match task {
        Task::Exclusion => one - tail,
        Task::Retrieval => BigRational::new(BigInt::from(1), n) + tail,
    })
}

/// Largest violation of the equal class-sum conditions
/// `Σ_{x∈C_k} p(M|x) = Σ_{x∈C_k'} p(M|x)` over messages, reduced masks and
/// class pairs. Zero certifies parity-obliviousness.
pub fn check_parity_oblivious_classical(s: &ClassicalStrategy) -> Result<f64> {
    let space = s.space();
    if space.n() < 2 {
        return Ok(0.0);
    }
    let masks = zmod::enumerate_parity_masks(space.n(), space.m(), true)?;
    let mut worst: f64 = 0.0;
    for mask in &masks {
        let table = zmod::parity_classes(mask)?;
        for msg in 0..s.alphabet() {
            let sums: Vec<f64> = (0..space.m())
                .map(|k| {
                    table
                        .class_indices(k)
                        .iter()
                        .map(|&x| s.probability(x, msg))
                        .sum()
                })
                .collect();
            let hi = sums.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let lo = sums.iter().copied().fold(f64::INFINITY, f64::min);
            worst = worst.max(hi - lo);
        }
    }
    Ok(worst)
}

fn success_indicator(task: Task, b: u32, target: u32) -> bool {
    task.succeeds(b, target)
}

/// `(1/(n m^n)) Σ_x Σ_y Σ_M p(M|x) [b(M,y) wins against x_y]`.
pub fn evaluate_classical(s: &ClassicalStrategy, task: Task) -> f64 {
    let space = s.space();
    let mut total = 0.0;
    for x in 0..space.size() {
        for msg in 0..s.alphabet() {
            let p = s.probability(x, msg);
            if p == 0.0 {
                continue;
            }
            let wins = (1..=space.n())
                .filter(|&y| success_indicator(task, s.decode(msg, y), space.digit(x, y - 1)))
                .count();
            total += p * wins as f64;
        }
    }
    total / (space.n() * space.size()) as f64
}

/// Exact counterpart of [`evaluate_classical`] for rational encodings.
pub fn evaluate_classical_exact(s: &ClassicalStrategy, task: Task) -> Option<BigRational> {
    let Encoding::Exact(enc) = s.encoding() else {
        return None;
    };
    let space = s.space();
    let mut total = BigRational::zero();
    for x in 0..space.size() {
        for msg in 0..s.alphabet() {
            let p = &enc[x * s.alphabet() + msg];
            if p.is_zero() {
                continue;
            }
            let wins = (1..=space.n())
                .filter(|&y| success_indicator(task, s.decode(msg, y), space.digit(x, y - 1)))
                .count();
            total += p * BigRational::from_integer(BigInt::from(wins));
        }
    }
    Some(total / BigRational::from_integer(BigInt::from(space.n() * space.size())))
}
