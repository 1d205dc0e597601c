//! Spin-j bookkeeping: dimension, the half-integer `m` labels and the fixed
//! storage order of the Wigner-Dicke basis.
//!
//! Index 0 holds `m = +j` and indices descend to `m = -j` at `d - 1`. For a
//! qubit this puts the excited state `|1/2, +1/2>` first, so
//! `<sigma_z> = rho_00 - rho_11`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported `2j`.
pub const MAX_TWO_J: u32 = 25;

const HALF_INT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpinSystem {
    two_j: u32,
}

impl SpinSystem {
    pub const QUBIT: SpinSystem = SpinSystem { two_j: 1 };
    pub const SPIN_3_2: SpinSystem = SpinSystem { two_j: 3 };

    pub fn new(j: f64) -> Result<Self> {
        if !j.is_finite() {
            return Err(Error::domain(format!("spin j = {j} is not finite")));
        }
        let two_j = (2.0 * j).round();
        if (2.0 * j - two_j).abs() > HALF_INT_TOL {
            return Err(Error::domain(format!("spin j = {j} is not a half-integer")));
        }
        if two_j < 1.0 {
            return Err(Error::domain(format!("spin j = {j} must be at least 1/2")));
        }
        if two_j > MAX_TWO_J as f64 {
            return Err(Error::domain(format!(
                "spin j = {j} exceeds the supported maximum {}/2",
                MAX_TWO_J
            )));
        }
        Ok(SpinSystem { two_j: two_j as u32 })
    }

    pub fn from_two_j(two_j: u32) -> Result<Self> {
        Self::new(two_j as f64 / 2.0)
    }

    pub fn two_j(&self) -> u32 {
        self.two_j
    }

    pub fn j(&self) -> f64 {
        self.two_j as f64 / 2.0
    }

    /// Hilbert-space dimension `2j + 1`.
    pub fn dim(&self) -> usize {
        self.two_j as usize + 1
    }

    /// `m` label of storage index `i`.
    pub fn m_at(&self, index: usize) -> f64 {
        debug_assert!(index < self.dim());
        self.j() - index as f64
    }

    /// Storage index of the label `m`.
    pub fn index_of(&self, m: f64) -> Result<usize> {
        let two_m = (2.0 * m).round();
        if !m.is_finite() || (2.0 * m - two_m).abs() > HALF_INT_TOL {
            return Err(Error::domain(format!("m = {m} is not a half-integer")));
        }
        let two_m = two_m as i64;
        let two_j = self.two_j as i64;
        if two_m.abs() > two_j || (two_j - two_m) % 2 != 0 {
            return Err(Error::domain(format!(
                "m = {m} is not in {{-j, ..., +j}} for j = {}",
                self.j()
            )));
        }
        Ok(((two_j - two_m) / 2) as usize)
    }

    /// `m` labels in storage order, `+j` first.
    pub fn m_values(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.dim()).map(move |i| self.m_at(i))
    }

    /// `binom(2j, j + m)` for the label at storage index `i`.
    pub fn binomial_at(&self, index: usize) -> f64 {
        binomial(self.two_j as u64, (self.two_j as usize - index) as u64)
    }
}

/// Exact for the small arguments used here (`n <= 25`).
pub(crate) fn binomial(n: u64, k: u64) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1)) as f64
}
