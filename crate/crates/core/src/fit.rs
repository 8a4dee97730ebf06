//! Least-squares fits of boundary and sequence data.
//!
//! `RootAffine` (`a x^(1/r) + b`) is linear in `(a, b)` for fixed `r` and is
//! solved by ordinary least squares on `(x^(1/r), 1)`. `Exponential`
//! (`a e^(b x)`) is solved by ordinary least squares on `(x, ln y)`, so it
//! minimizes the residual in log space. Both report the residual in the
//! original scale as well.

use num_traits::Float;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum FitFamily<F> {
    /// `a * exp(b * x)`
    Exponential,
    /// `a * x^(1/root) + b`
    RootAffine { root: F },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FitResult<F> {
    pub family: FitFamily<F>,
    pub a: F,
    pub b: F,
    /// Sum of squared errors in the original scale.
    pub residual: F,
}

impl<F: Float> FitFamily<F> {
    pub fn eval(&self, a: F, b: F, x: F) -> F {
        match *self {
            FitFamily::Exponential => a * (b * x).exp(),
            FitFamily::RootAffine { root } => a * x.powf(root.recip()) + b,
        }
    }

    fn check(&self, points: &[(F, F)]) -> Result<()> {
        if points.iter().any(|&(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::Domain("fit points must be finite".into()));
        }
        match *self {
            FitFamily::Exponential => {
                if points.iter().any(|&(_, y)| y <= F::zero()) {
                    return Err(Error::Domain("exponential fit needs every y > 0".into()));
                }
            }
            FitFamily::RootAffine { root } => {
                if root.is_nan() || root < F::one() {
                    return Err(Error::Domain("root must be at least 1".into()));
                }
                if points.iter().any(|&(x, _)| x <= F::zero()) {
                    return Err(Error::Domain("root-affine fit needs every x > 0".into()));
                }
            }
        }
        Ok(())
    }

    /// The point in the space where the fit is linear.
    fn linearize(&self, (x, y): (F, F)) -> (F, F) {
        match *self {
            FitFamily::Exponential => (x, y.ln()),
            FitFamily::RootAffine { root } => (x.powf(root.recip()), y),
        }
    }
}

/// Sum of squared errors of `(a, b)` on `points`, original scale.
pub fn residual<F: Float>(points: &[(F, F)], family: FitFamily<F>, a: F, b: F) -> F {
    points.iter().fold(F::zero(), |acc, &(x, y)| {
        let e = family.eval(a, b, x) - y;
        acc + e * e
    })
}

/// Sum of squared errors in the space the fitter minimizes: log space for
/// `Exponential` (requires `a > 0`), original space for `RootAffine`.
pub fn transformed_residual<F: Float>(points: &[(F, F)], family: FitFamily<F>, a: F, b: F) -> F {
    match family {
        FitFamily::Exponential => {
            let ln_a = a.ln();
            points.iter().fold(F::zero(), |acc, &(x, y)| {
                let e = ln_a + b * x - y.ln();
                acc + e * e
            })
        }
        FitFamily::RootAffine { .. } => residual(points, family, a, b),
    }
}

pub fn fit<F: Float>(points: &[(F, F)], family: FitFamily<F>) -> Result<FitResult<F>> {
    if points.len() < 2 {
        return Err(Error::Fit(format!("need at least 2 points, got {}", points.len())));
    }
    family.check(points)?;
    let lin: Vec<(F, F)> = points.iter().map(|&p| family.linearize(p)).collect();
    let n = F::from(lin.len()).expect("point count fits a float");
    let (su, sv) = lin
        .iter()
        .fold((F::zero(), F::zero()), |(su, sv), &(u, v)| (su + u, sv + v));
    let (mu, mv) = (su / n, sv / n);
    // centered sums keep the normal equations well conditioned
    let (suu, suv) = lin.iter().fold((F::zero(), F::zero()), |(suu, suv), &(u, v)| {
        let du = u - mu;
        (suu + du * du, suv + du * (v - mv))
    });
    let scale = lin.iter().fold(F::zero(), |acc, &(u, _)| acc + u * u);
    if suu <= F::epsilon() * scale {
        return Err(Error::Fit("degenerate design: all abscissae coincide".into()));
    }
    let slope = suv / suu;
    let intercept = mv - slope * mu;
    let (a, b) = match family {
        FitFamily::Exponential => (intercept.exp(), slope),
        FitFamily::RootAffine { .. } => (slope, intercept),
    };
    Ok(FitResult {
        family,
        a,
        b,
        residual: residual(points, family, a, b),
    })
}

impl<F: Float> FitResult<F> {
    pub fn eval(&self, x: F) -> F {
        self.family.eval(self.a, self.b, x)
    }

    pub fn transformed_residual(&self, points: &[(F, F)]) -> F {
        transformed_residual(points, self.family, self.a, self.b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_root_affine() {
        let pts: Vec<(f64, f64)> = (1..=40)
            .map(|x| (x as f64, 2.0 * (x as f64).powf(0.125) - 1.0))
            .collect();
        let f = fit(&pts, FitFamily::RootAffine { root: 8.0 }).unwrap();
        assert!((f.a - 2.0).abs() < 1e-9 && (f.b + 1.0).abs() < 1e-9, "{f:?}");
        assert!(f.residual < 1e-18);
    }

    #[test]
    fn recovers_exponential() {
        let pts: Vec<(f64, f64)> = (0..20).map(|i| {
            let x = i as f64 * 0.25;
            (x, 3.0 * (0.5 * x).exp())
        }).collect();
        let f = fit(&pts, FitFamily::Exponential).unwrap();
        assert!((f.a - 3.0).abs() < 1e-9 && (f.b - 0.5).abs() < 1e-9, "{f:?}");
    }

    #[test]
    fn single_precision() {
        let pts: Vec<(f32, f32)> = (1..=10).map(|x| (x as f32, 4.0 * x as f32 + 1.0)).collect();
        let f = fit(&pts, FitFamily::RootAffine { root: 1.0 }).unwrap();
        assert!((f.a - 4.0).abs() < 1e-4 && (f.b - 1.0).abs() < 1e-3);
    }

    #[test]
    fn rejects_bad_input() {
        let same = [(2.0, 1.0), (2.0, 3.0)];
        assert!(matches!(fit(&same, FitFamily::RootAffine { root: 2.0 }), Err(Error::Fit(_))));
        assert!(matches!(fit(&[(1.0, 1.0)], FitFamily::Exponential), Err(Error::Fit(_))));
        let neg = [(1.0, 1.0), (2.0, -1.0)];
        assert!(matches!(fit(&neg, FitFamily::Exponential), Err(Error::Domain(_))));
        let zero_x = [(0.0, 1.0), (2.0, 1.0)];
        assert!(matches!(fit(&zero_x, FitFamily::RootAffine { root: 2.0 }), Err(Error::Domain(_))));
        assert!(matches!(fit(&neg, FitFamily::RootAffine { root: 0.5 }), Err(Error::Domain(_))));
    }
}
