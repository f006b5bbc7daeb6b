//! Seeded random sampling of the scalar composition bounds.

use cz_core::young::{check_lemma_42, check_lemma_43, LemmaTriple};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::Result;

/// Relative slack of the ordering test.
pub const LEMMA_REL_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ScalarLemma {
    Lemma42,
    Lemma43,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaTally {
    pub samples: usize,
    pub pass: usize,
    pub fail: usize,
    /// first few failing `(t, ρ)`
    pub failures: Vec<(f64, f64)>,
}

impl ScalarLemma {
    pub fn eval(&self, t: f64, rho: f64) -> Result<LemmaTriple> {
        Ok(match self {
            ScalarLemma::Lemma42 => check_lemma_42(t, rho)?,
            ScalarLemma::Lemma43 => check_lemma_43(t, rho)?,
        })
    }

    /// `ρ` range of the sampler.
    fn rho_range(&self) -> (f64, f64) {
        match self {
            ScalarLemma::Lemma42 => (0.0, 10.0),
            ScalarLemma::Lemma43 => (1.0, 10.0),
        }
    }
}

/// Draws `t = 10^U` with `U` uniform on `(−6, 6)` and `ρ` uniform on the
/// lemma's range (open at the left end), and counts ordered triples.
/// The second bound also gets the boundary point `t = ρ^ρ` for every draw.
pub fn sample_lemma(which: ScalarLemma, samples: usize, seed: u64) -> Result<LemmaTally> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = which.rho_range();
    let mut tally = LemmaTally { samples: 0, pass: 0, fail: 0, failures: Vec::new() };
    let record = |t: f64, rho: f64, tally: &mut LemmaTally| -> Result<()> {
        tally.samples += 1;
        if which.eval(t, rho)?.is_ordered(LEMMA_REL_TOL) {
            tally.pass += 1;
        } else {
            tally.fail += 1;
            if tally.failures.len() < 8 {
                tally.failures.push((t, rho));
            }
        }
        Ok(())
    };
    for _ in 0..samples {
        let t = 10f64.powf(rng.gen_range(-6.0..6.0));
        let rho = hi - rng.gen_range(0.0..(hi - lo));
        record(t, rho, &mut tally)?;
        if which == ScalarLemma::Lemma43 {
            record(rho.powf(rho), rho, &mut tally)?;
        }
    }
    Ok(tally)
}
