use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::FRAC_1_SQRT_2;

use super::{exp_series, CoefficientSeries, Method};
use crate::error::{Error, Result};
use crate::rng::SeedPath;

/// Largest number of Gaussian terms a single sequence may hold.
pub const MAX_TERMS: usize = 1 << 24;

/// The random inputs `X(1..=R)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianSequence {
    /// `values[k - 1]` holds `X(k)`.
    values: Vec<Complex64>,
    /// Stream the values were drawn from; `None` for hand-built inputs.
    seed_path: Option<SeedPath>,
}

impl GaussianSequence {
    /// Draws `X(1..=len)` from the stream at `path`.
    ///
    /// Values are drawn in index order, so a longer draw from the same path
    /// extends a shorter one.
    pub fn sample(len: usize, path: SeedPath) -> Result<Self> {
        check_len(len)?;
        let mut rng = path.rng();
        let values = (0..len).map(|_| draw(&mut rng)).collect();
        Ok(GaussianSequence {
            values,
            seed_path: Some(path),
        })
    }

    /// Wraps explicit values `X(1), X(2), ...`.
    pub fn from_values(values: Vec<Complex64>) -> Result<Self> {
        check_len(values.len())?;
        if let Some(k) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Domain(format!("X({}) is not finite", k + 1)));
        }
        Ok(GaussianSequence {
            values,
            seed_path: None,
        })
    }

    /// `X ≡ 0` of the given length.
    pub fn zeros(len: usize) -> Result<Self> {
        Self::from_values(vec![Complex64::new(0.0, 0.0); len])
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn seed_path(&self) -> Option<SeedPath> {
        self.seed_path
    }

    /// `X(k)` for `1 <= k <= len`.
    pub fn x(&self, k: usize) -> Complex64 {
        self.values[k - 1]
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Fails unless `X(1..=needed)` is available.
    pub fn require(&self, needed: usize) -> Result<()> {
        if needed > self.len() {
            Err(Error::MissingInput {
                needed,
                available: self.len(),
            })
        } else {
            Ok(())
        }
    }

    /// Exponent coefficients `c_k = X(k)/√k` for `k <= r`, indexed by power.
    pub fn exponent(&self, r: usize) -> Result<Vec<Complex64>> {
        self.require(r)?;
        let mut c = Vec::with_capacity(r + 1);
        c.push(Complex64::new(0.0, 0.0));
        c.extend(
            self.values[..r]
                .iter()
                .enumerate()
                .map(|(i, x)| x / ((i + 1) as f64).sqrt()),
        );
        Ok(c)
    }

    /// `A(0..=n_max)` using every available term up to `n_max`.
    pub fn coefficients(&self, n_max: usize, method: Method) -> Result<CoefficientSeries> {
        let r = self.len().min(n_max);
        Ok(exp_series(&self.exponent(r)?, n_max, method))
    }

    /// Keeps `X(1..from)` and redraws `X(from..=len)` from `path`.
    pub fn resample_suffix(&self, from: usize, path: SeedPath) -> GaussianSequence {
        let keep = from.saturating_sub(1).min(self.len());
        let mut rng = path.rng();
        let mut values = self.values[..keep].to_vec();
        values.extend((keep..self.len()).map(|_| draw(&mut rng)));
        GaussianSequence {
            values,
            seed_path: None,
        }
    }
}

/// Which inputs a campaign draws: Gaussian samples, or the degenerate
/// `X ≡ 0` used for closed-form sanity runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputModel {
    #[default]
    Gaussian,
    Zero,
}

impl InputModel {
    pub fn sample(self, len: usize, path: SeedPath) -> Result<GaussianSequence> {
        match self {
            InputModel::Gaussian => GaussianSequence::sample(len, path),
            InputModel::Zero => GaussianSequence::zeros(len),
        }
    }
}

fn check_len(len: usize) -> Result<()> {
    if len == 0 {
        return Err(Error::Size("a Gaussian sequence needs R >= 1".into()));
    }
    if len > MAX_TERMS {
        return Err(Error::Size(format!(
            "R = {len} exceeds the memory budget of {MAX_TERMS} terms"
        )));
    }
    Ok(())
}

/// One standard complex Gaussian.
pub(crate) fn draw<R: rand::Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re * FRAC_1_SQRT_2, im * FRAC_1_SQRT_2)
}
