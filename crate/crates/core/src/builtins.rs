//! Training sequences used in the experiments.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gcp::text::parse_sequence;
use crate::gcp::{davis_jedwab_pair, gcp_defect, GbfSpec, ZqSequence};

const GCP1: (&str, &str) = ("+-++-+++-+---+++", "---+++-++++-++-+");
const GCP2: (&str, &str) = ("+--+-+-+++--++++", "-+-++--+------++");
const GSM: &str = "+-+++----+---+--";
const HP: &str = "----++++++++----";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Builtin {
    Gcp1,
    Gcp2,
    Gsm,
    Hp,
}

impl Builtin {
    pub const ALL: [Builtin; 4] = [Builtin::Gcp1, Builtin::Gcp2, Builtin::Gsm, Builtin::Hp];

    pub fn name(self) -> &'static str {
        match self {
            Builtin::Gcp1 => "gcp1",
            Builtin::Gcp2 => "gcp2",
            Builtin::Gsm => "gsm",
            Builtin::Hp => "hp",
        }
    }

    /// Generating spec, for the complementary pairs.
    pub fn spec(self) -> Option<GbfSpec> {
        let (perm, coeffs) = match self {
            Builtin::Gcp1 => (vec![1, 2, 3, 4], vec![1, 0, 1, 1]),
            Builtin::Gcp2 => (vec![2, 3, 4, 1], vec![1, 1, 1, 0]),
            _ => return None,
        };
        Some(GbfSpec::new(2, 4, perm, coeffs, 0, 1).expect("valid builtin spec"))
    }

    pub fn printed(self) -> Vec<&'static str> {
        match self {
            Builtin::Gcp1 => vec![GCP1.0, GCP1.1],
            Builtin::Gcp2 => vec![GCP2.0, GCP2.1],
            Builtin::Gsm => vec![GSM],
            Builtin::Hp => vec![HP],
        }
    }

    pub fn sequences(self) -> Vec<ZqSequence> {
        self.printed()
            .into_iter()
            .map(|s| parse_sequence(s, 2).expect("builtin text parses"))
            .collect()
    }

    pub fn is_pair(self) -> bool {
        self.spec().is_some()
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Builtin {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Builtin::ALL
            .into_iter()
            .find(|b| b.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| Error::InvalidExperiment(format!("unknown builtin {s:?}")))
    }
}

/// Confirms the embedded pairs are generated by their specs and complementary.
pub fn self_check() -> Result<()> {
    for b in Builtin::ALL.into_iter().filter(|b| b.is_pair()) {
        let seqs = b.sequences();
        let pair = davis_jedwab_pair(&b.spec().expect("pair has spec"));
        if pair.a() != &seqs[0] || pair.b() != &seqs[1] {
            return Err(Error::InvalidExperiment(format!("{b}: spec does not reproduce text")));
        }
        if gcp_defect(&pair) != 0.0 {
            return Err(Error::InvalidExperiment(format!("{b}: not complementary")));
        }
    }
    Ok(())
}

/// Uniform random binary sequence.
pub fn random_binary(n: usize, seed: u64) -> ZqSequence {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ZqSequence::new(2, (0..n).map(|_| rng.gen_range(0..2)).collect()).expect("binary values")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for b in Builtin::ALL {
            assert_eq!(b.name().parse::<Builtin>().unwrap(), b);
        }
        assert!("gcp3".parse::<Builtin>().is_err());
    }

    #[test]
    fn embedded_text_is_consistent() {
        self_check().unwrap();
        assert_eq!(Builtin::Gsm.sequences()[0].to_string(), GSM);
        assert_eq!(Builtin::Hp.sequences()[0].len(), 16);
        assert!(!Builtin::Hp.is_pair());
    }

    #[test]
    fn random_is_seeded() {
        assert_eq!(random_binary(16, 4), random_binary(16, 4));
        assert_ne!(random_binary(64, 4), random_binary(64, 5));
    }
}
