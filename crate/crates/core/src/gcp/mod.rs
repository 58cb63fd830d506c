//! Sequence algebra for Golay complementary pairs.
//!
//! Generalized Boolean functions (GBFs) map `{0,1}^nu -> Z_q`. The sequence
//! of a GBF lists `f(i_1, ..., i_nu)` for `i = 0 .. 2^nu`, where
//! `i = sum_k i_k 2^(k-1)` (so `x_1` is the least significant bit).
//!
//! Correlations of sequences over `Z_2` and `Z_4` are evaluated on Gaussian
//! integers, so a vanishing sidelobe sum is certified exactly.

mod gauss;
pub mod text;

use std::fmt;

use num_complex::Complex64;

use crate::cpm::{CpmSymbols, ModIndex};
use crate::error::{Error, Result};

pub use gauss::{aacf_exact, pacf_exact, GaussInt};

/// A sequence over `Z_q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ZqSequence {
    modulus: u32,
    values: Vec<u32>,
}

impl ZqSequence {
    pub fn new(modulus: u32, values: Vec<u32>) -> Result<Self> {
        if modulus == 0 {
            return Err(Error::InvalidModulus(modulus));
        }
        if let Some(&value) = values.iter().find(|&&v| v >= modulus) {
            return Err(Error::ValueOutOfRange { value, modulus });
        }
        Ok(ZqSequence { modulus, values })
    }

    pub fn binary(bits: &[u8]) -> Result<Self> {
        Self::new(2, bits.iter().map(|&b| b as u32).collect())
    }

    pub fn modulus(&self) -> u32 {
        self.modulus
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// `exp(j 2 pi v / q)` for every element.
    pub fn to_unit_circle(&self) -> Vec<Complex64> {
        let q = self.modulus as f64;
        self.values
            .iter()
            .map(|&v| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * v as f64 / q))
            .collect()
    }

    /// Exact unit-circle image when `q` divides 4.
    pub fn to_gaussian(&self) -> Option<Vec<GaussInt>> {
        if 4 % self.modulus != 0 {
            return None;
        }
        let step = 4 / self.modulus;
        Some(
            self.values
                .iter()
                .map(|&v| GaussInt::quarter_turn(v * step))
                .collect(),
        )
    }

    /// Bipolar form `(-1)^v` of a binary sequence.
    pub fn to_bipolar(&self) -> Result<Vec<i8>> {
        if self.modulus != 2 {
            return Err(Error::NotBinary(self.modulus));
        }
        Ok(self
            .values
            .iter()
            .map(|&v| if v == 0 { 1 } else { -1 })
            .collect())
    }
}

impl fmt::Display for ZqSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::format_sequence(self))
    }
}

/// `coeff * x_{v1} * x_{v2} * ...`; an empty variable list is a constant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Monomial {
    pub coeff: u32,
    pub vars: Vec<usize>,
}

impl Monomial {
    pub fn constant(coeff: u32) -> Self {
        Monomial {
            coeff,
            vars: Vec::new(),
        }
    }

    pub fn new(coeff: u32, vars: &[usize]) -> Self {
        Monomial {
            coeff,
            vars: vars.to_vec(),
        }
    }
}

fn check_modulus(q: u32) -> Result<()> {
    if q == 0 || q % 2 != 0 {
        Err(Error::InvalidModulus(q))
    } else {
        Ok(())
    }
}

/// Evaluates the GBF `sum(terms)` into its length-`2^nu` sequence over `Z_q`.
pub fn boolean_sequence(terms: &[Monomial], nu: usize, q: u32) -> Result<ZqSequence> {
    check_modulus(q)?;
    for term in terms {
        if let Some(&index) = term.vars.iter().find(|&&v| v == 0 || v > nu) {
            return Err(Error::InvalidVariable { index, nu });
        }
    }
    let values = (0..1usize << nu)
        .map(|i| {
            terms.iter().fold(0u64, |acc, term| {
                let on = term.vars.iter().all(|&v| (i >> (v - 1)) & 1 == 1);
                if on {
                    (acc + term.coeff as u64) % q as u64
                } else {
                    acc
                }
            }) as u32
        })
        .collect();
    ZqSequence::new(q, values)
}

/// Parameters of a Davis-Jedwab quadratic GBF
/// `f = (q/2) sum_k x_perm(k) x_perm(k+1) + sum_k c_k x_k + c`
/// and of its complementary mate `f + (q/2) x_perm(1) + c'`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GbfSpec {
    q: u32,
    nu: usize,
    perm: Vec<usize>,
    linear_coeffs: Vec<u32>,
    const_term: u32,
    pair_offset: u32,
}

impl GbfSpec {
    /// `perm` is 1-based. Coefficients are reduced mod `q`.
    pub fn new(
        q: u32,
        nu: usize,
        perm: Vec<usize>,
        linear_coeffs: Vec<u32>,
        const_term: u32,
        pair_offset: u32,
    ) -> Result<Self> {
        check_modulus(q)?;
        if nu == 0 {
            return Err(Error::InvalidPermutation("nu must be at least 1".into()));
        }
        let mut seen = vec![false; nu];
        if perm.len() != nu {
            return Err(Error::InvalidPermutation(format!("{perm:?}")));
        }
        for &p in &perm {
            if p == 0 || p > nu || seen[p - 1] {
                return Err(Error::InvalidPermutation(format!("{perm:?}")));
            }
            seen[p - 1] = true;
        }
        if linear_coeffs.len() != nu {
            return Err(Error::CoefficientCount {
                expected: nu,
                got: linear_coeffs.len(),
            });
        }
        Ok(GbfSpec {
            q,
            nu,
            perm,
            linear_coeffs: linear_coeffs.into_iter().map(|c| c % q).collect(),
            const_term: const_term % q,
            pair_offset: pair_offset % q,
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    pub fn linear_coeffs(&self) -> &[u32] {
        &self.linear_coeffs
    }

    pub fn const_term(&self) -> u32 {
        self.const_term
    }

    pub fn pair_offset(&self) -> u32 {
        self.pair_offset
    }

    /// Sequence length `2^nu`.
    pub fn len(&self) -> usize {
        1 << self.nu
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Monomials of the first GBF `f`.
    pub fn terms(&self) -> Vec<Monomial> {
        let half = self.q / 2;
        let mut terms: Vec<Monomial> = self
            .perm
            .windows(2)
            .map(|w| Monomial::new(half, &[w[0], w[1]]))
            .collect();
        terms.extend(
            self.linear_coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| Monomial::new(c, &[k + 1])),
        );
        terms.push(Monomial::constant(self.const_term));
        terms
    }

    /// Monomials of the mate `f + (q/2) x_perm(1) + c'`.
    pub fn mate_terms(&self) -> Vec<Monomial> {
        let mut terms = self.terms();
        terms.push(Monomial::new(self.q / 2, &[self.perm[0]]));
        terms.push(Monomial::constant(self.pair_offset));
        terms
    }

    /// Every spec with the given `q` and `nu`: all permutations, all linear
    /// coefficients, constants and pair offsets.
    pub fn enumerate(q: u32, nu: usize) -> Result<Vec<GbfSpec>> {
        check_modulus(q)?;
        let mut perms = Vec::new();
        permutations(&mut (1..=nu).collect::<Vec<_>>(), 0, &mut perms);
        let coeff_count = (q as usize).pow(nu as u32);
        let mut specs = Vec::with_capacity(perms.len() * coeff_count * (q * q) as usize);
        for perm in &perms {
            for idx in 0..coeff_count {
                let mut rest = idx;
                let coeffs: Vec<u32> = (0..nu)
                    .map(|_| {
                        let c = (rest % q as usize) as u32;
                        rest /= q as usize;
                        c
                    })
                    .collect();
                for c in 0..q {
                    for c_prime in 0..q {
                        specs.push(GbfSpec::new(q, nu, perm.clone(), coeffs.clone(), c, c_prime)?);
                    }
                }
            }
        }
        Ok(specs)
    }
}

fn permutations(items: &mut Vec<usize>, start: usize, out: &mut Vec<Vec<usize>>) {
    if start == items.len() {
        out.push(items.clone());
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permutations(items, start + 1, out);
        items.swap(start, i);
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PairOrigin {
    DavisJedwab(GbfSpec),
    QuaternaryLift(GbfSpec),
    External,
}

/// Two equal-length sequences over the same `Z_q`, expected to be complementary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GcpPair {
    a: ZqSequence,
    b: ZqSequence,
    origin: PairOrigin,
}

impl GcpPair {
    pub fn new(a: ZqSequence, b: ZqSequence, origin: PairOrigin) -> Result<Self> {
        if a.len() != b.len() || a.modulus() != b.modulus() {
            return Err(Error::PairMismatch(format!(
                "{}/Z_{} vs {}/Z_{}",
                a.len(),
                a.modulus(),
                b.len(),
                b.modulus()
            )));
        }
        if a.is_empty() {
            return Err(Error::EmptySequence);
        }
        Ok(GcpPair { a, b, origin })
    }

    pub fn external(a: ZqSequence, b: ZqSequence) -> Result<Self> {
        Self::new(a, b, PairOrigin::External)
    }

    pub fn a(&self) -> &ZqSequence {
        &self.a
    }

    pub fn b(&self) -> &ZqSequence {
        &self.b
    }

    pub fn origin(&self) -> &PairOrigin {
        &self.origin
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// `rho_a(0) + rho_b(0)`, the in-phase term excluded from the defect.
    pub fn energy(&self) -> f64 {
        2.0 * self.len() as f64
    }
}

/// Builds the Davis-Jedwab pair `(f, f + (q/2) x_perm(1) + c')`.
pub fn davis_jedwab_pair(spec: &GbfSpec) -> GcpPair {
    let a = boolean_sequence(&spec.terms(), spec.nu, spec.q).expect("spec validated");
    let b = boolean_sequence(&spec.mate_terms(), spec.nu, spec.q).expect("spec validated");
    GcpPair::new(a, b, PairOrigin::DavisJedwab(spec.clone())).expect("equal lengths")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorrelationKind {
    Aperiodic,
    Periodic,
}

/// Correlation values by integer shift. Aperiodic sequences cover
/// `-(N-1)..=N-1`; periodic ones cover `0..N`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationSeq {
    kind: CorrelationKind,
    len: usize,
    values: Vec<Complex64>,
}

impl CorrelationSeq {
    pub fn kind(&self) -> CorrelationKind {
        self.kind
    }

    /// Length of the correlated sequence.
    pub fn seq_len(&self) -> usize {
        self.len
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn lags(&self) -> std::ops::RangeInclusive<isize> {
        match self.kind {
            CorrelationKind::Aperiodic => -(self.len as isize - 1)..=self.len as isize - 1,
            CorrelationKind::Periodic => 0..=self.len as isize - 1,
        }
    }

    /// Value at shift `k`; zero outside the support for aperiodic kind,
    /// shifts taken mod N for periodic kind.
    pub fn at(&self, k: isize) -> Complex64 {
        let n = self.len as isize;
        match self.kind {
            CorrelationKind::Aperiodic => {
                if k.abs() >= n {
                    Complex64::new(0.0, 0.0)
                } else {
                    self.values[(k + n - 1) as usize]
                }
            }
            CorrelationKind::Periodic => self.values[k.rem_euclid(n) as usize],
        }
    }
}

pub fn aacf(x: &[Complex64]) -> Result<CorrelationSeq> {
    if x.is_empty() {
        return Err(Error::EmptySequence);
    }
    let n = x.len();
    let positive: Vec<Complex64> = (0..n)
        .map(|k| (0..n - k).map(|i| x[i] * x[i + k].conj()).sum())
        .collect();
    let mut values: Vec<Complex64> = positive[1..].iter().rev().map(|v| v.conj()).collect();
    values.extend_from_slice(&positive);
    Ok(CorrelationSeq {
        kind: CorrelationKind::Aperiodic,
        len: n,
        values,
    })
}

pub fn pacf(x: &[Complex64]) -> Result<CorrelationSeq> {
    if x.is_empty() {
        return Err(Error::EmptySequence);
    }
    let n = x.len();
    let values = (0..n)
        .map(|k| (0..n).map(|i| x[i] * x[(i + k) % n].conj()).sum())
        .collect();
    Ok(CorrelationSeq {
        kind: CorrelationKind::Periodic,
        len: n,
        values,
    })
}

/// Largest `|rho_a(k) + rho_b(k)|` over `k != 0`, with both sequences mapped
/// to the unit circle by `v -> exp(j 2 pi v / q)`. Zero certifies a GCP.
pub fn gcp_defect(pair: &GcpPair) -> f64 {
    if let (Some(a), Some(b)) = (pair.a.to_gaussian(), pair.b.to_gaussian()) {
        return exact_defect(&a, &b) as f64;
    }
    let a = aacf(&pair.a.to_unit_circle()).expect("non-empty pair");
    let b = aacf(&pair.b.to_unit_circle()).expect("non-empty pair");
    (1..pair.len() as isize)
        .map(|k| (a.at(k) + b.at(k)).norm())
        .fold(0.0, f64::max)
}

/// Exact counterpart of [`gcp_defect`] for Gaussian-integer sequences; the
/// result is the largest sidelobe-sum magnitude, which is an integer only
/// when the sum lies on an axis, so the squared norm is maximized and its
/// square root returned.
fn exact_defect(a: &[GaussInt], b: &[GaussInt]) -> f64 {
    let ra = aacf_exact(a);
    let rb = aacf_exact(b);
    let worst = ra
        .iter()
        .zip(&rb)
        .skip(1)
        .map(|(&x, &y)| (x + y).norm_sqr())
        .max()
        .unwrap_or(0);
    (worst as f64).sqrt()
}

/// True when the pair's sidelobe sums vanish identically, checked in exact
/// arithmetic for `q` dividing 4.
pub fn is_complementary_exact(a: &[GaussInt], b: &[GaussInt]) -> bool {
    a.len() == b.len()
        && aacf_exact(a)
            .iter()
            .zip(aacf_exact(b))
            .skip(1)
            .all(|(&x, y)| (x + y).is_zero())
}

/// Differential encoding of `[C, C]` with the boundary bit `C_{-1} = 1`:
/// `I_m = (2 C_m - 1)(2 C_{m-1} - 1)`.
pub fn diff_encode(c: &ZqSequence) -> Result<CpmSymbols> {
    if c.modulus() != 2 {
        return Err(Error::NotBinary(c.modulus()));
    }
    let bipolar = |bit: u32| 2 * bit as i32 - 1;
    let mut prev = 1u32;
    let mut out = Vec::with_capacity(2 * c.len());
    for &bit in c.values().iter().chain(c.values()) {
        out.push(bipolar(bit) * bipolar(prev));
        prev = bit;
    }
    CpmSymbols::new(out)
}

/// Unit-magnitude PAM weights of the dominant Laurent pulse.
///
/// For `h = 1/2` the values are stored exactly as quarter-turn exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoSymbols {
    values: Vec<Complex64>,
    quarter_turns: Option<Vec<u8>>,
}

impl PseudoSymbols {
    pub fn from_quarter_turns(turns: Vec<u8>) -> Self {
        let values = turns
            .iter()
            .map(|&k| GaussInt::quarter_turn(k as u32).to_complex())
            .collect();
        PseudoSymbols {
            values,
            quarter_turns: Some(turns),
        }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn quarter_turns(&self) -> Option<&[u8]> {
        self.quarter_turns.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn to_gaussian(&self) -> Option<Vec<GaussInt>> {
        self.quarter_turns.as_ref().map(|t| {
            t.iter()
                .map(|&k| GaussInt::quarter_turn(k as u32))
                .collect()
        })
    }

    /// Exponents as a `Z_4` sequence (`gamma = j^v`).
    pub fn to_z4(&self) -> Option<ZqSequence> {
        self.quarter_turns
            .as_ref()
            .map(|t| ZqSequence::new(4, t.iter().map(|&k| k as u32).collect()).expect("k < 4"))
    }

    /// Entries `range` of the sequence.
    pub fn slice(&self, range: std::ops::Range<usize>) -> PseudoSymbols {
        PseudoSymbols {
            values: self.values[range.clone()].to_vec(),
            quarter_turns: self.quarter_turns.as_ref().map(|t| t[range].to_vec()),
        }
    }
}

/// `gamma_n = exp(j pi h sum_{m<=n} I_m)`.
pub fn pseudo_symbols(i: &CpmSymbols, h: ModIndex) -> PseudoSymbols {
    if h == ModIndex::HALF {
        let mut acc: i64 = 0;
        let turns = i
            .values()
            .iter()
            .map(|&s| {
                acc += s as i64;
                acc.rem_euclid(4) as u8
            })
            .collect();
        return PseudoSymbols::from_quarter_turns(turns);
    }
    let mut acc: i64 = 0;
    let values = i
        .values()
        .iter()
        .map(|&s| {
            acc += s as i64;
            Complex64::from_polar(1.0, std::f64::consts::PI * h.value() * acc as f64)
        })
        .collect();
    PseudoSymbols {
        values,
        quarter_turns: None,
    }
}

/// Closed form of the pseudo-symbols produced by `diff_encode(c)` at `h = 1/2`:
/// `j^(n+3) (-1)^C_n` on the first half and `j^(n-N+3) (-1)^C_(n-N) j^N` on the second.
pub fn pseudo_symbols_closed(c: &ZqSequence) -> Result<PseudoSymbols> {
    if c.modulus() != 2 {
        return Err(Error::NotBinary(c.modulus()));
    }
    let n = c.len();
    let turns = (0..2 * n)
        .map(|idx| {
            let (base, extra) = if idx < n { (idx, 0) } else { (idx - n, n) };
            ((base + 3 + 2 * c.values()[base] as usize + extra) % 4) as u8
        })
        .collect();
    Ok(PseudoSymbols::from_quarter_turns(turns))
}

/// Lifts a binary Davis-Jedwab pair to the `Z_4` GBFs of its pseudo-symbols:
/// `f_C = 2 Q(x) + 2 sum c_k x_k + 2c + x_1 + 2 x_2 + 3` and
/// `f_D = f_C + 2 x_perm(1) + 2c'`.
pub fn quaternary_lift(spec: &GbfSpec) -> Result<GcpPair> {
    if spec.q != 2 {
        return Err(Error::NotBinary(spec.q));
    }
    if spec.nu < 2 {
        return Err(Error::LiftTooShort(spec.nu));
    }
    let mut terms: Vec<Monomial> = spec
        .perm
        .windows(2)
        .map(|w| Monomial::new(2, &[w[0], w[1]]))
        .collect();
    terms.extend(
        spec.linear_coeffs
            .iter()
            .enumerate()
            .map(|(k, &c)| Monomial::new(2 * c, &[k + 1])),
    );
    terms.push(Monomial::new(1, &[1]));
    terms.push(Monomial::new(2, &[2]));
    terms.push(Monomial::constant((2 * spec.const_term + 3) % 4));
    let f_c = boolean_sequence(&terms, spec.nu, 4)?;

    terms.push(Monomial::new(2, &[spec.perm[0]]));
    terms.push(Monomial::constant(2 * spec.pair_offset % 4));
    let f_d = boolean_sequence(&terms, spec.nu, 4)?;
    GcpPair::new(f_c, f_d, PairOrigin::QuaternaryLift(spec.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    // Brute-force oracle: literal double sum, independent of `aacf`.
    fn naive_aacf_bipolar(x: &[i64], k: usize) -> i64 {
        let mut s = 0;
        for n in 0..x.len() {
            if n + k < x.len() {
                s += x[n] * x[n + k];
            }
        }
        s
    }

    fn bipolar(seq: &ZqSequence) -> Vec<i64> {
        seq.values().iter().map(|&v| 1 - 2 * v as i64).collect()
    }

    fn gcp1_spec() -> GbfSpec {
        GbfSpec::new(2, 4, vec![1, 2, 3, 4], vec![1, 0, 1, 1], 0, 1).unwrap()
    }

    #[test]
    fn boolean_sequence_matches_worked_example() {
        let x1 = boolean_sequence(&[Monomial::new(1, &[1])], 3, 2).unwrap();
        assert_eq!(x1.values(), &[0, 1, 0, 1, 0, 1, 0, 1]);
        let x3 = boolean_sequence(&[Monomial::new(1, &[3])], 3, 2).unwrap();
        assert_eq!(x3.values(), &[0, 0, 0, 0, 1, 1, 1, 1]);
        let f = boolean_sequence(&[Monomial::new(1, &[1, 3]), Monomial::constant(1)], 3, 2)
            .unwrap();
        assert_eq!(f.values(), &[1, 1, 1, 1, 1, 0, 1, 0]);
        let zero = boolean_sequence(&[], 3, 2).unwrap();
        assert_eq!(zero.values(), &[0; 8]);
    }

    #[test]
    fn boolean_sequence_errors() {
        assert_eq!(
            boolean_sequence(&[Monomial::new(1, &[4])], 3, 2),
            Err(Error::InvalidVariable { index: 4, nu: 3 })
        );
        assert_eq!(
            boolean_sequence(&[Monomial::new(1, &[0])], 3, 2),
            Err(Error::InvalidVariable { index: 0, nu: 3 })
        );
        assert_eq!(boolean_sequence(&[], 3, 3), Err(Error::InvalidModulus(3)));
    }

    #[test]
    fn spec_validation() {
        assert!(GbfSpec::new(2, 3, vec![1, 1, 2], vec![0; 3], 0, 0).is_err());
        assert!(GbfSpec::new(2, 3, vec![1, 2], vec![0; 3], 0, 0).is_err());
        assert!(matches!(
            GbfSpec::new(2, 3, vec![1, 2, 3], vec![0; 2], 0, 0),
            Err(Error::CoefficientCount { expected: 3, got: 2 })
        ));
        assert_eq!(
            GbfSpec::new(5, 2, vec![1, 2], vec![0; 2], 0, 0),
            Err(Error::InvalidModulus(5))
        );
        let s = GbfSpec::new(4, 2, vec![2, 1], vec![5, 6], 7, 9).unwrap();
        assert_eq!(s.linear_coeffs(), &[1, 2]);
        assert_eq!((s.const_term(), s.pair_offset()), (3, 1));
    }

    #[test]
    fn gcp1_reproduces_printed_pair() {
        let pair = davis_jedwab_pair(&gcp1_spec());
        assert_eq!(pair.a().to_string(), "+-++-+++-+---+++");
        assert_eq!(pair.b().to_string(), "---+++-++++-++-+");
        assert_eq!(gcp_defect(&pair), 0.0);
    }

    #[test]
    fn gcp2_printed_pair_needs_swapped_linear_terms() {
        // The printed second pair comes out with c = [1,1,1,0]; the listed
        // [1,1,0,1] yields a different (still complementary) pair.
        let printed = GbfSpec::new(2, 4, vec![2, 3, 4, 1], vec![1, 1, 1, 0], 0, 1).unwrap();
        let pair = davis_jedwab_pair(&printed);
        assert_eq!(pair.a().to_string(), "+--+-+-+++--++++");
        assert_eq!(pair.b().to_string(), "-+-++--+------++");

        let listed = GbfSpec::new(2, 4, vec![2, 3, 4, 1], vec![1, 1, 0, 1], 0, 1).unwrap();
        let other = davis_jedwab_pair(&listed);
        assert_ne!(other.a().to_string(), "+--+-+-+++--++++");
        assert_eq!(gcp_defect(&other), 0.0);
    }

    #[test]
    fn smallest_pair_by_hand() {
        let spec = GbfSpec::new(2, 2, vec![1, 2], vec![0, 0], 0, 0).unwrap();
        let pair = davis_jedwab_pair(&spec);
        assert_eq!(pair.a().values(), &[0, 0, 0, 1]);
        assert_eq!(pair.b().values(), &[0, 1, 0, 0]);
        let (a, b) = (bipolar(pair.a()), bipolar(pair.b()));
        for k in 1..4 {
            assert_eq!(naive_aacf_bipolar(&a, k) + naive_aacf_bipolar(&b, k), 0);
        }
    }

    #[test]
    fn defect_of_brute_force_checked_pairs() {
        let pair = davis_jedwab_pair(&gcp1_spec());
        let (a, b) = (bipolar(pair.a()), bipolar(pair.b()));
        for k in 1..16 {
            assert_eq!(naive_aacf_bipolar(&a, k) + naive_aacf_bipolar(&b, k), 0, "k={k}");
        }
        assert_eq!(naive_aacf_bipolar(&a, 0) + naive_aacf_bipolar(&b, 0), 32);
        assert_eq!(pair.energy(), 32.0);

        let zeros = ZqSequence::binary(&[0, 0, 0, 0]).unwrap();
        let flat = GcpPair::external(zeros.clone(), zeros).unwrap();
        assert_eq!(gcp_defect(&flat), 6.0);
    }

    #[test]
    fn defect_float_path_for_larger_alphabets() {
        // Z_8 Davis-Jedwab pair: only the floating-point route applies.
        let spec = GbfSpec::new(8, 3, vec![3, 1, 2], vec![1, 5, 2], 3, 6).unwrap();
        let pair = davis_jedwab_pair(&spec);
        assert!(pair.a().to_gaussian().is_none());
        assert!(gcp_defect(&pair) < 1e-12);
    }

    #[test]
    fn pair_mismatch_is_rejected() {
        let a = ZqSequence::binary(&[0, 1]).unwrap();
        let b = ZqSequence::binary(&[0, 1, 1]).unwrap();
        assert!(matches!(GcpPair::external(a.clone(), b), Err(Error::PairMismatch(_))));
        let q4 = ZqSequence::new(4, vec![0, 3]).unwrap();
        assert!(GcpPair::external(a, q4).is_err());
    }

    #[test]
    fn aacf_examples() {
        let r = aacf(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert_eq!(r.at(0), c(2.0, 0.0));
        assert_eq!(r.at(1), c(1.0, 0.0));
        assert_eq!(r.at(5), c(0.0, 0.0));
        let r = aacf(&[c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert_eq!(r.at(1), c(0.0, -1.0));
        assert_eq!(r.at(-1), c(0.0, 1.0));
        assert_eq!(r.lags(), -1..=1);

        let g1 = davis_jedwab_pair(&gcp1_spec());
        let r = aacf(&g1.a().to_unit_circle()).unwrap();
        assert!((r.at(0) - c(16.0, 0.0)).norm() < 1e-12);
        assert_eq!(aacf(&[]), Err(Error::EmptySequence));
    }

    #[test]
    fn pacf_examples() {
        let ones = vec![c(1.0, 0.0); 4];
        let p = pacf(&ones).unwrap();
        assert!(p.values().iter().all(|&v| v == c(4.0, 0.0)));
        let p = pacf(&[c(1.0, 0.0), c(-1.0, 0.0)]).unwrap();
        assert_eq!(p.at(1), c(-2.0, 0.0));
        assert_eq!(p.at(3), c(-2.0, 0.0));
        let x = [c(0.3, -1.2), c(2.0, 0.5), c(-0.7, 0.1)];
        let p = pacf(&x).unwrap();
        let energy: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        assert!((p.at(0).re - energy).abs() < 1e-12 && p.at(0).im.abs() < 1e-12);
        assert_eq!(pacf(&[]), Err(Error::EmptySequence));
    }

    #[test]
    fn diff_encode_examples() {
        let enc = |bits: &[u8]| diff_encode(&ZqSequence::binary(bits).unwrap()).unwrap();
        assert_eq!(enc(&[0, 0, 0, 0]).values(), &[-1, 1, 1, 1, 1, 1, 1, 1]);
        assert_eq!(enc(&[0, 1, 0, 1]).values(), &[-1; 8]);
        assert_eq!(enc(&[1, 1]).values(), &[1, 1, 1, 1]);
        let q4 = ZqSequence::new(4, vec![0, 1]).unwrap();
        assert_eq!(diff_encode(&q4), Err(Error::NotBinary(4)));
    }

    #[test]
    fn pseudo_symbol_examples() {
        let one = CpmSymbols::new(vec![1]).unwrap();
        let g = pseudo_symbols(&one, ModIndex::HALF);
        assert_eq!(g.values(), &[c(0.0, 1.0)]);
        let two = CpmSymbols::new(vec![-1, -1]).unwrap();
        let g = pseudo_symbols(&two, ModIndex::HALF);
        assert_eq!(g.values(), &[c(0.0, -1.0), c(-1.0, 0.0)]);

        // Non-half index takes the floating-point route.
        let g = pseudo_symbols(&two, ModIndex::new(1, 4).unwrap());
        assert!(g.quarter_turns().is_none());
        assert!((g.values()[1] - c(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn closed_form_examples() {
        let g1 = davis_jedwab_pair(&gcp1_spec());
        let closed = pseudo_symbols_closed(g1.a()).unwrap();
        assert_eq!(closed.len(), 32);
        // C_0 = 0 gives j^3 = -j.
        assert_eq!(closed.values()[0], c(0.0, -1.0));
        assert_eq!(closed.values()[16], closed.values()[0]);
        let recursive = pseudo_symbols(&diff_encode(g1.a()).unwrap(), ModIndex::HALF);
        assert_eq!(recursive, closed);

        // N = 2: halves differ by j^2.
        let short = pseudo_symbols_closed(&ZqSequence::binary(&[0, 1]).unwrap()).unwrap();
        let t = short.quarter_turns().unwrap();
        assert_ne!(&t[..2], &t[2..]);
        assert_eq!((t[0] + 2) % 4, t[2]);
        assert_eq!((t[1] + 2) % 4, t[3]);
    }

    #[test]
    fn lift_matches_closed_form() {
        let spec = gcp1_spec();
        let lift = quaternary_lift(&spec).unwrap();
        assert_eq!(gcp_defect(&lift), 0.0);
        let bin = davis_jedwab_pair(&spec);
        let closed_a = pseudo_symbols_closed(bin.a()).unwrap().to_z4().unwrap();
        let closed_b = pseudo_symbols_closed(bin.b()).unwrap().to_z4().unwrap();
        assert_eq!(lift.a().values(), &closed_a.values()[..16]);
        assert_eq!(lift.b().values(), &closed_b.values()[..16]);
        let x1 = spec.perm()[0] - 1;
        for (i, (&fa, &fb)) in lift.a().values().iter().zip(lift.b().values()).enumerate() {
            let bit = ((i >> x1) & 1) as u32;
            assert_eq!((fb + 4 - fa) % 4, (2 * bit + 2 * spec.pair_offset()) % 4);
        }
    }

    #[test]
    fn lift_errors() {
        let short = GbfSpec::new(2, 1, vec![1], vec![0], 0, 0).unwrap();
        assert_eq!(quaternary_lift(&short), Err(Error::LiftTooShort(1)));
        let q4 = GbfSpec::new(4, 2, vec![1, 2], vec![0, 0], 0, 0).unwrap();
        assert_eq!(quaternary_lift(&q4), Err(Error::NotBinary(4)));
    }

    #[test]
    fn enumeration_sizes() {
        assert_eq!(GbfSpec::enumerate(2, 2).unwrap().len(), 2 * 4 * 4);
        assert_eq!(GbfSpec::enumerate(2, 3).unwrap().len(), 6 * 8 * 4);
    }
}
