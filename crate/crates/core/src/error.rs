use thiserror::Error;

/// Errors raised by the library. Messages carry the module that produced them.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("gcp: modulus q = {0} must be even and positive")]
    InvalidModulus(u32),
    #[error("gcp: variable index x{index} outside 1..={nu}")]
    InvalidVariable { index: usize, nu: usize },
    #[error("gcp: {0} is not a permutation of 1..=nu")]
    InvalidPermutation(String),
    #[error("gcp: expected {expected} linear coefficients, got {got}")]
    CoefficientCount { expected: usize, got: usize },
    #[error("gcp: value {value} not in Z_{modulus}")]
    ValueOutOfRange { value: u32, modulus: u32 },
    #[error("gcp: sequences differ in length or modulus ({0})")]
    PairMismatch(String),
    #[error("gcp: empty sequence")]
    EmptySequence,
    #[error("gcp: expected a binary sequence, got modulus {0}")]
    NotBinary(u32),
    #[error("gcp: quaternary lift needs nu >= 2, got {0}")]
    LiftTooShort(usize),
    #[error("gcp: cannot parse sequence text: {0}")]
    Parse(String),

    #[error("cpm: symbol {0} outside {{-1, +1}}")]
    InvalidSymbol(i32),
    #[error("cpm: invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("cpm: frequency pulse integrates to {integral}, expected 0.5")]
    Unnormalized { integral: f64 },
    #[error("cpm: correlative state has length {got}, expected L-1 = {expected}")]
    StateLength { expected: usize, got: usize },
    #[error("cpm: no {z}-symbol tail cancels a residue of {residue} quarter turns")]
    Unreachable { residue: u8, z: usize },

    #[error("burst: {0}")]
    InvalidBurst(String),
    #[error("burst: waveform lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("burst: empty sidelobe region (N = {n} <= 2L + 2 = {})", 2 * l + 2)]
    EmptyRegion { n: usize, l: usize },

    #[error("chansim: {0}")]
    InvalidChannel(String),
    #[error("chansim: {0}")]
    InvalidExperiment(String),
}

pub type Result<T> = std::result::Result<T, Error>;
