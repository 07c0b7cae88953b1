//! Parametrized varieties `X = closure of g(Y)`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::scalar::C64;

/// A polynomial (or rational) map from a source space onto a variety.
pub trait Parametrization: Send + Sync {
    fn source_dim(&self) -> usize;
    fn ambient_dim(&self) -> usize;
    fn eval(&self, y: &[C64]) -> Vec<C64>;
    /// `ambient_dim x source_dim`.
    fn jacobian(&self, y: &[C64]) -> DMatrix<C64>;
    /// Whether the image is a cone, so points are compared up to scaling.
    fn is_cone(&self) -> bool;
}

/// The varieties this crate knows how to parametrize.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VarietySpec {
    /// `(s^3, s^2 t, s t^2, t^3)`.
    TwistedCubic,
    /// `(s^4, s^3 t, s t^3, t^4)`.
    X2Quartic,
    /// The unit circle `((1 - t^2)/(1 + t^2), 2t/(1 + t^2))`.
    Circle,
    /// `(s^a_0 t^b_0, ..., s^a_n t^b_n)` for the listed exponent pairs.
    MonomialCurve { exponents: Vec<(u32, u32)> },
    /// Sums of `r` rank-one tensors in `C^a (x) C^b (x) C^c`.
    Secant { r: usize, a: usize, b: usize, c: usize },
}

impl VarietySpec {
    fn curve_exponents(&self) -> Option<Vec<(u32, u32)>> {
        match self {
            VarietySpec::TwistedCubic => Some(vec![(3, 0), (2, 1), (1, 2), (0, 3)]),
            VarietySpec::X2Quartic => Some(vec![(4, 0), (3, 1), (1, 3), (0, 4)]),
            VarietySpec::MonomialCurve { exponents } => Some(exponents.clone()),
            _ => None,
        }
    }

    /// Short label, e.g. `sigma_1;2,2,3`.
    pub fn label(&self) -> String {
        match self {
            VarietySpec::TwistedCubic => "twisted-cubic".into(),
            VarietySpec::X2Quartic => "x2-quartic".into(),
            VarietySpec::Circle => "circle".into(),
            VarietySpec::MonomialCurve { exponents } => format!("monomial-curve{exponents:?}"),
            VarietySpec::Secant { r, a, b, c } => format!("sigma_{r};{a},{b},{c}"),
        }
    }
}

fn powi(z: C64, k: u32) -> C64 {
    z.powu(k)
}

impl Parametrization for VarietySpec {
    fn source_dim(&self) -> usize {
        match self {
            VarietySpec::Circle => 1,
            VarietySpec::Secant { r, a, b, c } => r * (a + b + c),
            _ => 2,
        }
    }

    fn ambient_dim(&self) -> usize {
        match self {
            VarietySpec::Circle => 2,
            VarietySpec::Secant { a, b, c, .. } => a * b * c,
            _ => self.curve_exponents().map_or(0, |e| e.len()),
        }
    }

    fn eval(&self, y: &[C64]) -> Vec<C64> {
        if let Some(exps) = self.curve_exponents() {
            let (s, t) = (y[0], y[1]);
            return exps.iter().map(|&(i, j)| powi(s, i) * powi(t, j)).collect();
        }
        match *self {
            VarietySpec::Circle => {
                let t = y[0];
                let den = C64::new(1.0, 0.0) + t * t;
                vec![(C64::new(1.0, 0.0) - t * t) / den, t * 2.0 / den]
            }
            VarietySpec::Secant { r, a, b, c } => {
                let mut x = vec![C64::new(0.0, 0.0); a * b * c];
                for s in 0..r {
                    let base = s * (a + b + c);
                    let (u, v, w) = (&y[base..base + a], &y[base + a..base + a + b], &y[base + a + b..base + a + b + c]);
                    for i in 0..a {
                        for j in 0..b {
                            let uv = u[i] * v[j];
                            for k in 0..c {
                                x[(i * b + j) * c + k] += uv * w[k];
                            }
                        }
                    }
                }
                x
            }
            _ => unreachable!("curves handled above"),
        }
    }

    fn jacobian(&self, y: &[C64]) -> DMatrix<C64> {
        let zero = C64::new(0.0, 0.0);
        if let Some(exps) = self.curve_exponents() {
            let (s, t) = (y[0], y[1]);
            let d = |e: u32, z: C64| if e == 0 { zero } else { powi(z, e - 1) * e as f64 };
            return DMatrix::from_fn(exps.len(), 2, |row, col| {
                let (i, j) = exps[row];
                if col == 0 {
                    d(i, s) * powi(t, j)
                } else {
                    powi(s, i) * d(j, t)
                }
            });
        }
        match *self {
            VarietySpec::Circle => {
                let t = y[0];
                let one = C64::new(1.0, 0.0);
                let den = one + t * t;
                let den2 = den * den;
                // d/dt (1-t^2)/(1+t^2) = -4t/(1+t^2)^2, d/dt 2t/(1+t^2) = 2(1-t^2)/(1+t^2)^2
                DMatrix::from_column_slice(2, 1, &[-(t * 4.0) / den2, (one - t * t) * 2.0 / den2])
            }
            VarietySpec::Secant { r, a, b, c } => {
                let n = a + b + c;
                let mut jac = DMatrix::from_element(a * b * c, r * n, zero);
                for s in 0..r {
                    let base = s * n;
                    let (u, v, w) = (&y[base..base + a], &y[base + a..base + a + b], &y[base + a + b..base + n]);
                    for i in 0..a {
                        for j in 0..b {
                            for k in 0..c {
                                let row = (i * b + j) * c + k;
                                jac[(row, base + i)] += v[j] * w[k];
                                jac[(row, base + a + j)] += u[i] * w[k];
                                jac[(row, base + a + b + k)] += u[i] * v[j];
                            }
                        }
                    }
                }
                jac
            }
            _ => unreachable!("curves handled above"),
        }
    }

    fn is_cone(&self) -> bool {
        !matches!(self, VarietySpec::Circle)
    }
}
