use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::expsum::e;

/// Identifier of the generator recorded in every report row.
pub const RNG_ID: &str = "chacha8";

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// ChaCha8 seeded with `seed`, on stream `stream`. Every row of a report
/// draws from its own stream, so rows can be computed in any order.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// How random coefficient sequences are drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distribution {
    /// `e(u)` with `u` uniform in `[0, 1)`.
    Unit,
    /// Standard complex gaussian, `E|a|² = 1`.
    Gaussian,
    /// Gaussian entries kept with probability `density`, else 0.
    Sparse { density: f64 },
    /// `p·e(u)` when `p | n`, else 0: the counterexample shape with random phases.
    Stride { p: u64 },
    Zero,
}

impl Distribution {
    pub fn sample<R: Rng>(&self, rng: &mut R, offset: i64, len: usize) -> Vec<Complex64> {
        let gaussian = |rng: &mut R| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
        };
        (offset + 1..)
            .take(len)
            .map(|n| match *self {
                Distribution::Unit => e(rng.random::<f64>()),
                Distribution::Gaussian => gaussian(rng),
                Distribution::Sparse { density } => {
                    if rng.random::<f64>() < density {
                        gaussian(rng)
                    } else {
                        Complex64::default()
                    }
                }
                Distribution::Stride { p } => {
                    let phase = e(rng.random::<f64>());
                    if n.rem_euclid(p as i64) == 0 {
                        phase * p as f64
                    } else {
                        Complex64::default()
                    }
                }
                Distribution::Zero => Complex64::default(),
            })
            .collect()
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Distribution::Unit => f.write_str("unit"),
            Distribution::Gaussian => f.write_str("gaussian"),
            Distribution::Sparse { density } => write!(f, "sparse:{density}"),
            Distribution::Stride { p } => write!(f, "stride:{p}"),
            Distribution::Zero => f.write_str("zero"),
        }
    }
}

/// `unit`, `gaussian`, `sparse:<density>`, `stride:<p>` or `zero`.
impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Parse(format!("unknown distribution {s:?}"));
        match s.split_once(':') {
            None => match s {
                "unit" => Ok(Distribution::Unit),
                "gaussian" => Ok(Distribution::Gaussian),
                "zero" => Ok(Distribution::Zero),
                _ => Err(bad()),
            },
            Some(("sparse", d)) => {
                let density: f64 = d.parse().map_err(|_| bad())?;
                if !(0.0..=1.0).contains(&density) {
                    return Err(Error::Parse(format!("density {density} outside [0, 1]")));
                }
                Ok(Distribution::Sparse { density })
            }
            Some(("stride", p)) => {
                let p: u64 = p.parse().map_err(|_| bad())?;
                if p == 0 {
                    return Err(Error::Parse("stride must be positive".into()));
                }
                Ok(Distribution::Stride { p })
            }
            _ => Err(bad()),
        }
    }
}
