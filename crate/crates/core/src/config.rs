//! Build configuration shared by the optimizer and the command line: the
//! pixel scale, the starting density and named random streams.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// A density in `[0, 1]` kept as a reduced fraction so it can be echoed
/// exactly in file headers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Density {
    num: u64,
    den: u64,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl Density {
    pub fn new(num: u64, den: u64) -> Result<Self> {
        if den == 0 || num > den {
            return Err(Error::InvalidArgument(format!(
                "density {num}/{den} is not in [0, 1]"
            )));
        }
        let g = gcd(num, den).max(1);
        Ok(Density {
            num: num / g,
            den: den / g,
        })
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `round(self * n)`, halves rounded up.
    pub fn count_of(&self, n: usize) -> usize {
        ((2 * self.num as u128 * n as u128 + self.den as u128) / (2 * self.den as u128)) as usize
    }
}

impl fmt::Display for Density {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Density {
    type Err = Error;

    /// Accepts `a/b` or a decimal such as `0.125`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("bad density {s:?}"));
        let s = s.trim();
        if let Some((a, b)) = s.split_once('/') {
            return Density::new(
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            );
        }
        let (int, frac) = s.split_once('.').unwrap_or((s, ""));
        if frac.len() > 12 || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let den = 10u64.pow(frac.len() as u32);
        let int: u64 = if int.is_empty() {
            0
        } else {
            int.parse().map_err(|_| bad())?
        };
        let frac: u64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| bad())?
        };
        Density::new(int.checked_mul(den).ok_or_else(bad)? + frac, den)
    }
}

/// Deterministic random stream named `name`, derived from the master seed.
pub fn sub_rng(seed: u64, name: &str) -> ChaCha8Rng {
    let mut h = Sha256::new();
    h.update(seed.to_le_bytes());
    h.update(name.as_bytes());
    let digest: [u8; 32] = h.finalize().into();
    ChaCha8Rng::from_seed(digest)
}

/// Spacing bound for relaxed dots: the minimum inter-dot distance should
/// exceed this factor over the square root of the density.
pub const MIN_DISTANCE_FACTOR: f64 = 0.7;

/// Smallest squared pixel distance strictly above
/// `MIN_DISTANCE_FACTOR / sqrt(d0)`; 1 when `d0` is zero.
pub fn min_spacing_d2(d0: Density) -> i64 {
    if d0.num() == 0 {
        return 1;
    }
    let bound = MIN_DISTANCE_FACTOR * MIN_DISTANCE_FACTOR / d0.value();
    (bound.floor() as i64 + 1).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_bound() {
        assert_eq!(min_spacing_d2(Density::new(1, 8).unwrap()), 4);
        assert_eq!(min_spacing_d2(Density::new(1, 2).unwrap()), 1);
        assert_eq!(min_spacing_d2(Density::new(0, 1).unwrap()), 1);
    }
    use rand::Rng;

    #[test]
    fn density_parses_and_reduces() {
        assert_eq!(
            "1/8".parse::<Density>().unwrap(),
            Density::new(1, 8).unwrap()
        );
        assert_eq!(
            "0.125".parse::<Density>().unwrap(),
            Density::new(1, 8).unwrap()
        );
        assert_eq!("2/16".parse::<Density>().unwrap().to_string(), "1/8");
        assert_eq!("1".parse::<Density>().unwrap().to_string(), "1/1");
        assert!("3/2".parse::<Density>().is_err());
        assert!("x".parse::<Density>().is_err());
        assert!("1/0".parse::<Density>().is_err());
    }

    #[test]
    fn count_rounds_half_up() {
        let d = Density::new(1, 8).unwrap();
        assert_eq!(d.count_of(384), 48);
        assert_eq!(d.count_of(4), 1);
        assert_eq!(d.count_of(3), 0);
        assert_eq!(Density::new(0, 1).unwrap().count_of(384), 0);
    }

    #[test]
    fn named_streams_differ_and_repeat() {
        let a: u64 = sub_rng(7, "borders").gen();
        let b: u64 = sub_rng(7, "interiors").gen();
        let c: u64 = sub_rng(7, "borders").gen();
        assert_ne!(a, b);
        assert_eq!(a, c);
    }
}
