// SPDX-License-Identifier: Apache-2.0

//! Energy-failure functions.
//!
//! A gate spending energy `e` fails (flips its output) with probability
//! `chi(e)`. Three analytic families are supported, each with a closed-form
//! inverse `psi = chi^-1` (energy needed for a failure probability) and its
//! first two derivatives. All of them are "physical": strictly decreasing,
//! convex, differentiable, `chi(0) = eps0` and `chi(e) -> 0` as `e -> inf`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid model parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
    #[error("energy must be finite and non-negative, got {0}")]
    EnergyDomain(f64),
    #[error("failure probability {eps} outside (0, {eps0}]")]
    FailureDomain { eps: f64, eps0: f64 },
    #[error("slope must be negative and finite, got {0}")]
    SlopeDomain(f64),
    #[error("cannot parse model spec `{spec}`: {reason}")]
    Parse { spec: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `eps0 * exp(-c e)`
    Exponential,
    /// `eps0 / (1 + e)^beta`
    Polynomial,
    /// `eps0 * exp(-c e^beta)`, `beta` in (0, 1]
    StretchedExponential,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Family::Exponential => "exp",
            Family::Polynomial => "poly",
            Family::StretchedExponential => "sexp",
        }
    }
}

/// A validated energy-failure function.
///
/// `eps0` is the failure probability of a gate given no energy (the output
/// floats); it doubles as the upper box bound on every gate's failure
/// probability in the allocation problems.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyFailureModel {
    family: Family,
    eps0: f64,
    c: f64,
    beta: f64,
}

pub const DEFAULT_EPS0: f64 = 0.5;

impl EnergyFailureModel {
    pub fn new(family: Family, eps0: f64, c: f64, beta: f64) -> Result<Self, ModelError> {
        if !(eps0 > 0.0 && eps0 <= 1.0) {
            return Err(ModelError::InvalidParameter {
                field: "eps0",
                reason: format!("must lie in (0, 1], got {eps0}"),
            });
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(ModelError::InvalidParameter {
                field: "c",
                reason: format!("must be positive and finite, got {c}"),
            });
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(ModelError::InvalidParameter {
                field: "beta",
                reason: format!("must be positive and finite, got {beta}"),
            });
        }
        if family == Family::StretchedExponential && beta > 1.0 {
            return Err(ModelError::InvalidParameter {
                field: "beta",
                reason: format!("stretched exponential needs beta <= 1, got {beta}"),
            });
        }
        let beta = if family == Family::Exponential { 1.0 } else { beta };
        let c = if family == Family::Polynomial { 1.0 } else { c };
        Ok(EnergyFailureModel { family, eps0, c, beta })
    }

    pub fn exponential(eps0: f64, c: f64) -> Result<Self, ModelError> {
        Self::new(Family::Exponential, eps0, c, 1.0)
    }

    pub fn polynomial(eps0: f64, beta: f64) -> Result<Self, ModelError> {
        Self::new(Family::Polynomial, eps0, 1.0, beta)
    }

    pub fn stretched_exponential(eps0: f64, c: f64, beta: f64) -> Result<Self, ModelError> {
        Self::new(Family::StretchedExponential, eps0, c, beta)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn eps0(&self) -> f64 {
        self.eps0
    }

    /// Rate constant; always 1 for the polynomial family, where it is unused.
    pub fn c(&self) -> f64 {
        self.c
    }

    /// Exponent; always 1 for the exponential family.
    pub fn beta(&self) -> f64 {
        self.beta
    }

    fn check_eps(&self, eps: f64) -> Result<(), ModelError> {
        if eps > 0.0 && eps <= self.eps0 {
            Ok(())
        } else {
            Err(ModelError::FailureDomain { eps, eps0: self.eps0 })
        }
    }

    /// Failure probability of a gate spending energy `e`.
    pub fn chi(&self, e: f64) -> Result<f64, ModelError> {
        if !(e.is_finite() && e >= 0.0) {
            return Err(ModelError::EnergyDomain(e));
        }
        Ok(match self.family {
            Family::Exponential => self.eps0 * (-self.c * e).exp(),
            Family::Polynomial => self.eps0 / (1.0 + e).powf(self.beta),
            Family::StretchedExponential => self.eps0 * (-self.c * e.powf(self.beta)).exp(),
        })
    }

    /// Energy a gate needs to fail with probability `eps`.
    pub fn psi(&self, eps: f64) -> Result<f64, ModelError> {
        self.check_eps(eps)?;
        let ratio = self.eps0 / eps;
        Ok(match self.family {
            Family::Exponential => ratio.ln() / self.c,
            Family::Polynomial => ratio.powf(1.0 / self.beta) - 1.0,
            Family::StretchedExponential => (ratio.ln() / self.c).powf(1.0 / self.beta),
        })
    }

    /// Derivative of [`psi`](Self::psi); strictly negative except for the
    /// stretched exponential with `beta < 1` at `eps = eps0`, where it is 0.
    pub fn psi_prime(&self, eps: f64) -> Result<f64, ModelError> {
        self.check_eps(eps)?;
        let inv_beta = 1.0 / self.beta;
        Ok(match self.family {
            Family::Exponential => -1.0 / (self.c * eps),
            Family::Polynomial => -inv_beta * self.eps0.powf(inv_beta) * eps.powf(-inv_beta - 1.0),
            Family::StretchedExponential => {
                let l = (self.eps0 / eps).ln() / self.c;
                -inv_beta * l.powf(inv_beta - 1.0) / (self.c * eps)
            }
        })
    }

    /// Second derivative of [`psi`](Self::psi); positive on the open domain.
    pub fn psi_second(&self, eps: f64) -> Result<f64, ModelError> {
        self.check_eps(eps)?;
        let inv_beta = 1.0 / self.beta;
        Ok(match self.family {
            Family::Exponential => 1.0 / (self.c * eps * eps),
            Family::Polynomial => inv_beta * (inv_beta + 1.0) * self.eps0.powf(inv_beta) * eps.powf(-inv_beta - 2.0),
            Family::StretchedExponential => {
                let l = (self.eps0 / eps).ln() / self.c;
                let ce = self.c * eps;
                let curvature = if inv_beta == 1.0 {
                    0.0
                } else {
                    inv_beta * (inv_beta - 1.0) * l.powf(inv_beta - 2.0) / (ce * ce)
                };
                curvature + inv_beta * l.powf(inv_beta - 1.0) / (self.c * eps * eps)
            }
        })
    }

    /// Inverts the derivative: the `eps` in (0, eps0] with `psi'(eps) = slope`.
    ///
    /// Slopes at or above `psi'(eps0)` map to `eps0` (the box bound is active).
    pub fn psi_prime_inverse(&self, slope: f64) -> Result<f64, ModelError> {
        if !(slope.is_finite() && slope < 0.0) {
            if slope == 0.0 {
                return Ok(self.eps0);
            }
            return Err(ModelError::SlopeDomain(slope));
        }
        if slope >= self.psi_prime(self.eps0)? {
            return Ok(self.eps0);
        }
        let mass = -slope;
        let inv_beta = 1.0 / self.beta;
        let eps = match self.family {
            Family::Exponential => 1.0 / (self.c * mass),
            Family::Polynomial => (self.eps0.powf(inv_beta) / (self.beta * mass)).powf(self.beta / (1.0 + self.beta)),
            Family::StretchedExponential => {
                // Solve (1/beta) L^(1/beta - 1) e^(cL) / (c eps0) = mass for L >= 0;
                // the left side is increasing in L. Work with its logarithm.
                let target = (mass * self.c * self.eps0 * self.beta).ln();
                let lhs = |l: f64| (inv_beta - 1.0) * l.ln() + self.c * l;
                let mut lo = 0.0_f64;
                let mut hi = 1.0_f64;
                while lhs(hi) < target {
                    lo = hi;
                    hi *= 2.0;
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if mid <= lo || mid >= hi {
                        break;
                    }
                    if lhs(mid) < target {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                self.eps0 * (-self.c * 0.5 * (lo + hi)).exp()
            }
        };
        Ok(eps.min(self.eps0))
    }

    /// Samples `chi` on a logarithmic energy grid and reports monotonicity,
    /// convexity and limit behaviour.
    pub fn validate_physical(&self) -> PhysicalReport {
        const POINTS: usize = 200;
        const E_MIN: f64 = 1e-6;
        const E_MAX: f64 = 1e6;
        const CONVEXITY_TOL: f64 = 1e-12;

        let ratio = (E_MAX / E_MIN).powf(1.0 / (POINTS - 1) as f64);
        let grid: Vec<f64> = (0..POINTS).map(|i| E_MIN * ratio.powi(i as i32)).collect();
        let values: Vec<f64> = grid.iter().map(|&e| self.chi(e).unwrap_or(f64::NAN)).collect();

        let mut monotonicity_violations = Vec::new();
        for i in 0..POINTS - 1 {
            let (a, b) = (values[i], values[i + 1]);
            // Equal neighbours are only acceptable once chi has underflowed.
            if b > a || (b == a && a > f64::MIN_POSITIVE) || a.is_nan() {
                monotonicity_violations.push(grid[i]);
            }
        }

        let mut convexity_violations = Vec::new();
        for i in 1..POINTS - 1 {
            let (x0, x1, x2) = (grid[i - 1], grid[i], grid[i + 1]);
            let w = (x2 - x1) / (x2 - x0);
            let chord = w * values[i - 1] + (1.0 - w) * values[i + 1];
            if values[i] - chord > CONVEXITY_TOL {
                convexity_violations.push(grid[i]);
            }
        }

        let at_zero = self.chi(0.0).unwrap_or(f64::NAN);
        // Stretched exponentials approach eps0 like e^beta, so probe far below the grid.
        let near_zero = self.chi(1e-100).unwrap_or(f64::NAN);
        let limit_at_zero_ok =
            (at_zero - self.eps0).abs() <= 1e-15 * self.eps0 && (near_zero - self.eps0).abs() <= 1e-9 * self.eps0;
        let tail = values[POINTS - 1];
        let tail_decays = tail < values[0] && tail >= 0.0;

        PhysicalReport {
            model: *self,
            grid_points: POINTS,
            monotonicity_violations,
            convexity_violations,
            limit_at_zero: at_zero,
            limit_at_zero_ok,
            tail_value: tail,
            tail_decays,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PhysicalReport {
    pub model: EnergyFailureModel,
    pub grid_points: usize,
    /// Grid energies `e_i` with `chi(e_{i+1}) >= chi(e_i)`.
    pub monotonicity_violations: Vec<f64>,
    /// Grid energies where `chi` lies above the chord through its neighbours.
    pub convexity_violations: Vec<f64>,
    pub limit_at_zero: f64,
    pub limit_at_zero_ok: bool,
    pub tail_value: f64,
    pub tail_decays: bool,
}

impl PhysicalReport {
    pub fn passed(&self) -> bool {
        self.monotonicity_violations.is_empty()
            && self.convexity_violations.is_empty()
            && self.limit_at_zero_ok
            && self.tail_decays
    }
}

impl fmt::Display for EnergyFailureModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Exponential => write!(f, "exp:{}:{}", self.eps0, self.c),
            Family::Polynomial => write!(f, "poly:{}:{}", self.eps0, self.beta),
            Family::StretchedExponential => {
                write!(f, "sexp:{}:{}:{}", self.eps0, self.c, self.beta)
            }
        }
    }
}

/// Parses `exp:eps0:c`, `poly:eps0:beta` (or `poly:eps0:c:beta`, `c` ignored)
/// and `sexp:eps0:c:beta`.
impl FromStr for EnergyFailureModel {
    type Err = ModelError;

    fn from_str(spec: &str) -> Result<Self, Self::Err> {
        let fail = |reason: String| ModelError::Parse { spec: spec.to_string(), reason };
        let parts: Vec<&str> = spec.trim().split(':').collect();
        let num = |idx: usize, field: &str| -> Result<f64, ModelError> {
            let raw = parts.get(idx).ok_or_else(|| fail(format!("missing field `{field}`")))?;
            raw.trim().parse::<f64>().map_err(|_| fail(format!("field `{field}` is not a number: `{raw}`")))
        };
        let family = match parts[0].trim().to_ascii_lowercase().as_str() {
            "exp" | "exponential" => Family::Exponential,
            "poly" | "polynomial" => Family::Polynomial,
            "sexp" | "stretched" => Family::StretchedExponential,
            other => return Err(fail(format!("field `family`: unknown family `{other}`"))),
        };
        let (eps0, c, beta) = match (family, parts.len()) {
            (Family::Exponential, 3) => (num(1, "eps0")?, num(2, "c")?, 1.0),
            (Family::Polynomial, 3) => (num(1, "eps0")?, 1.0, num(2, "beta")?),
            (Family::Polynomial, 4) => (num(1, "eps0")?, 1.0, num(3, "beta")?),
            (Family::StretchedExponential, 4) => (num(1, "eps0")?, num(2, "c")?, num(3, "beta")?),
            (_, n) => return Err(fail(format!("wrong number of fields ({n})"))),
        };
        EnergyFailureModel::new(family, eps0, c, beta).map_err(|e| match e {
            ModelError::InvalidParameter { field, reason } => fail(format!("field `{field}`: {reason}")),
            other => other,
        })
    }
}
