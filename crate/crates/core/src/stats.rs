//! Pearson correlation and ordinary least squares with t/F tests.
//!
//! Tail probabilities come from the regularized incomplete beta function,
//! evaluated by modified Lentz continued fractions with the usual symmetry
//! reduction `I_x(a, b) = 1 - I_{1-x}(b, a)`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

const BETA_CF_TOLERANCE: f64 = 1e-12;
const BETA_CF_MAX_TERMS: usize = 500;
/// Relative singular-value floor for declaring a design rank deficient.
const RANK_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("inputs differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} observations, got {got}")]
    TooFewObservations { needed: usize, got: usize },
    #[error("input has zero variance")]
    ZeroVariance,
    #[error("design matrix is rank deficient")]
    RankDeficient,
    #[error("design needs an `intercept` column and at least one predictor")]
    MissingTerms,
    #[error("column `{0}` has the wrong length")]
    BadColumn(String),
}

/// `ln Γ(x)` for `x > 0` via the Lanczos approximation (g = 7, 9 terms).
pub fn ln_gamma(x: f64) -> f64 {
    const G: f64 = 7.0;
    const COEF: [f64; 9] = [
        0.999_999_999_999_809_9,
        676.520_368_121_885_1,
        -1_259.139_216_722_402_8,
        771.323_428_777_653_1,
        -176.615_029_162_140_6,
        12.507_343_278_686_905,
        -0.138_571_095_265_720_12,
        9.984_369_578_019_572e-6,
        1.505_632_735_149_311_6e-7,
    ];
    if x < 0.5 {
        // reflection
        let pi = std::f64::consts::PI;
        return (pi / (pi * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = COEF[0];
    for (i, &c) in COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

/// Continued fraction for `I_x(a, b)`, convergent for `x < (a+1)/(a+b+2)`.
fn beta_continued_fraction(x: f64, a: f64, b: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=BETA_CF_MAX_TERMS {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + aa / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < BETA_CF_TOLERANCE {
            break;
        }
    }
    h
}

/// Regularized incomplete beta `I_x(a, b)` for `a, b > 0`, `x` in `[0, 1]`.
pub fn regularized_incomplete_beta(x: f64, a: f64, b: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_front = a * x.ln() + b * (1.0 - x).ln() - ln_beta(a, b);
    let front = ln_front.exp();
    if x < (a + 1.0) / (a + b + 2.0) {
        front * beta_continued_fraction(x, a, b) / a
    } else {
        1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b
    }
}

/// Student t CDF with `df` degrees of freedom.
pub fn student_t_cdf(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return if t > 0.0 { 1.0 } else { 0.0 };
    }
    let tail = 0.5 * regularized_incomplete_beta(df / (df + t * t), df / 2.0, 0.5);
    if t >= 0.0 {
        1.0 - tail
    } else {
        tail
    }
}

/// Two-tailed p-value `P(|T| >= |t|)`.
pub fn t_two_tailed_p(t: f64, df: f64) -> f64 {
    if t.is_nan() {
        return 1.0;
    }
    if t.is_infinite() {
        return 0.0;
    }
    regularized_incomplete_beta(df / (df + t * t), df / 2.0, 0.5).clamp(0.0, 1.0)
}

/// Upper tail `P(F >= f)` of the F distribution.
pub fn f_survival(f: f64, df1: f64, df2: f64) -> f64 {
    if f.is_infinite() {
        return 0.0;
    }
    if f <= 0.0 {
        return 1.0;
    }
    regularized_incomplete_beta(df2 / (df2 + df1 * f), df2 / 2.0, df1 / 2.0).clamp(0.0, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationResult {
    pub r: f64,
    pub p_two_tailed: f64,
    pub n: usize,
}

/// Two-tailed p for a sample correlation `r` over `n` pairs.
pub fn correlation_p_value(r: f64, n: usize) -> f64 {
    let df = (n - 2) as f64;
    if r.abs() >= 1.0 {
        return 0.0;
    }
    let t = r * df.sqrt() / (1.0 - r * r).sqrt();
    t_two_tailed_p(t, df)
}

pub fn pearson_corr(x: &[f64], y: &[f64]) -> Result<CorrelationResult, StatsError> {
    if x.len() != y.len() {
        return Err(StatsError::LengthMismatch(x.len(), y.len()));
    }
    let n = x.len();
    if n < 3 {
        return Err(StatsError::TooFewObservations { needed: 3, got: n });
    }
    let mx = x.iter().sum::<f64>() / n as f64;
    let my = y.iter().sum::<f64>() / n as f64;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    Ok(CorrelationResult {
        r,
        p_two_tailed: correlation_p_value(r, n),
        n,
    })
}

pub const INTERCEPT: &str = "intercept";

/// Named design-matrix columns. Build with an intercept, then add numeric
/// predictors and dummy-coded categories.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    n: usize,
    names: Vec<String>,
    columns: Vec<Vec<f64>>,
}

impl Design {
    pub fn with_intercept(n: usize) -> Self {
        Self {
            n,
            names: vec![INTERCEPT.to_string()],
            columns: vec![vec![1.0; n]],
        }
    }

    pub fn add_column(&mut self, name: &str, values: Vec<f64>) -> Result<&mut Self, StatsError> {
        if values.len() != self.n {
            return Err(StatsError::BadColumn(name.to_string()));
        }
        self.names.push(name.to_string());
        self.columns.push(values);
        Ok(self)
    }

    /// One 0/1 column per level other than `reference`, for levels that
    /// actually occur, in sorted order. Columns are named `prefix[level]`.
    pub fn add_dummies<T>(
        &mut self,
        prefix: &str,
        levels: &[T],
        reference: &T,
    ) -> Result<&mut Self, StatsError>
    where
        T: Ord + Clone + std::fmt::Display,
    {
        if levels.len() != self.n {
            return Err(StatsError::BadColumn(prefix.to_string()));
        }
        let mut present: Vec<T> = levels.to_vec();
        present.sort();
        present.dedup();
        for level in present.into_iter().filter(|l| l != reference) {
            let col = levels.iter().map(|l| f64::from(*l == level)).collect();
            self.names.push(format!("{prefix}[{level}]"));
            self.columns.push(col);
        }
        Ok(self)
    }

    pub fn n_rows(&self) -> usize {
        self.n
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.n, self.columns.len(), |i, j| self.columns[j][i])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficient {
    pub name: String,
    pub estimate: f64,
    pub std_error: f64,
    pub t: f64,
    pub p: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult {
    pub coefficients: Vec<Coefficient>,
    pub r_squared: f64,
    pub adj_r_squared: f64,
    pub f_statistic: f64,
    pub f_p: f64,
    pub df_model: usize,
    pub df_resid: usize,
    pub n: usize,
    #[serde(skip)]
    pub fitted: Vec<f64>,
    #[serde(skip)]
    pub residuals: Vec<f64>,
}

impl RegressionResult {
    pub fn coefficient(&self, name: &str) -> Option<&Coefficient> {
        self.coefficients.iter().find(|c| c.name == name)
    }
}

/// OLS through a Householder QR of the design. Coefficient tests are
/// two-tailed t-tests; the F-test compares against the intercept-only model.
pub fn ols_regression(design: &Design, y: &[f64]) -> Result<RegressionResult, StatsError> {
    let n = design.n;
    if y.len() != n {
        return Err(StatsError::LengthMismatch(n, y.len()));
    }
    if design.names.first().map(String::as_str) != Some(INTERCEPT) || design.columns.len() < 2 {
        return Err(StatsError::MissingTerms);
    }
    let p_total = design.columns.len();
    if n <= p_total {
        return Err(StatsError::TooFewObservations {
            needed: p_total + 1,
            got: n,
        });
    }

    let x = design.matrix();
    let mut scaled = x.clone();
    for mut col in scaled.column_iter_mut() {
        let norm = col.norm();
        if norm == 0.0 {
            return Err(StatsError::RankDeficient);
        }
        col /= norm;
    }
    let sv = scaled.singular_values();
    if sv.min() <= RANK_TOLERANCE * sv.max() {
        return Err(StatsError::RankDeficient);
    }

    let yv = DVector::from_column_slice(y);
    let qr = x.clone().qr();
    let r = qr.r();
    let qty = qr.q().transpose() * &yv;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or(StatsError::RankDeficient)?;
    let fitted = &x * &beta;
    let residuals = &yv - &fitted;

    let rss = residuals.norm_squared();
    let mean = yv.mean();
    let tss: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    if tss == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    let df_model = p_total - 1;
    let df_resid = n - p_total;
    let sigma2 = rss / df_resid as f64;
    let r_inv = r.try_inverse().ok_or(StatsError::RankDeficient)?;
    let cov_unscaled = &r_inv * r_inv.transpose();

    let coefficients = design
        .names
        .iter()
        .enumerate()
        .map(|(j, name)| {
            let estimate = beta[j];
            let std_error = (sigma2 * cov_unscaled[(j, j)]).sqrt();
            let t = if std_error > 0.0 {
                estimate / std_error
            } else if estimate == 0.0 {
                0.0
            } else {
                estimate.signum() * f64::INFINITY
            };
            Coefficient {
                name: name.clone(),
                estimate,
                std_error,
                t,
                p: t_two_tailed_p(t, df_resid as f64),
            }
        })
        .collect();

    let r_squared = 1.0 - rss / tss;
    let adj_r_squared = 1.0 - (1.0 - r_squared) * (n - 1) as f64 / df_resid as f64;
    let f_statistic = if rss > 0.0 {
        (r_squared / df_model as f64) / ((1.0 - r_squared) / df_resid as f64)
    } else {
        f64::INFINITY
    };
    Ok(RegressionResult {
        coefficients,
        r_squared,
        adj_r_squared,
        f_statistic,
        f_p: f_survival(f_statistic, df_model as f64, df_resid as f64),
        df_model,
        df_resid,
        n,
        fitted: fitted.iter().copied().collect(),
        residuals: residuals.iter().copied().collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ln_gamma_known_values() {
        assert_relative_eq!(ln_gamma(1.0), 0.0, epsilon = 1e-14);
        assert_relative_eq!(
            ln_gamma(0.5),
            std::f64::consts::PI.sqrt().ln(),
            epsilon = 1e-14
        );
        assert_relative_eq!(ln_gamma(10.0), 362_880f64.ln(), max_relative = 1e-14);
    }

    #[test]
    fn incomplete_beta_closed_forms() {
        // I_x(1, 1) = x; I_x(a, 1) = x^a
        for x in [0.1, 0.37, 0.9] {
            assert_relative_eq!(regularized_incomplete_beta(x, 1.0, 1.0), x, epsilon = 1e-13);
            assert_relative_eq!(
                regularized_incomplete_beta(x, 3.0, 1.0),
                x.powi(3),
                epsilon = 1e-13
            );
        }
        assert_eq!(regularized_incomplete_beta(0.0, 2.0, 3.0), 0.0);
        assert_eq!(regularized_incomplete_beta(1.0, 2.0, 3.0), 1.0);
    }

    #[test]
    fn t_cdf_cauchy_case() {
        // df = 1 is Cauchy: F(t) = 1/2 + atan(t)/pi
        for t in [-3.0, -0.5, 0.0, 0.7, 12.0] {
            let want = 0.5 + f64::atan(t) / std::f64::consts::PI;
            assert_relative_eq!(student_t_cdf(t, 1.0), want, epsilon = 1e-12);
        }
    }

    #[test]
    fn perfect_line() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0];
        let y: Vec<f64> = x.iter().map(|v| 2.0 * v + 1.0).collect();
        let c = pearson_corr(&x, &y).unwrap();
        assert_relative_eq!(c.r, 1.0, epsilon = 1e-15);
        assert!(c.p_two_tailed < 1e-12);
    }

    #[test]
    fn published_pairs() {
        assert!((correlation_p_value(0.178, 49) - 0.22).abs() <= 0.01);
        assert!((correlation_p_value(0.44, 29) - 0.018).abs() <= 0.003);
        assert!((correlation_p_value(0.401, 26) - 0.042).abs() <= 0.003);
    }

    #[test]
    fn correlation_errors() {
        assert_eq!(
            pearson_corr(&[1.0, 2.0], &[1.0, 2.0, 3.0]),
            Err(StatsError::LengthMismatch(2, 3))
        );
        assert_eq!(
            pearson_corr(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]),
            Err(StatsError::ZeroVariance)
        );
        assert!(matches!(
            pearson_corr(&[1.0, 2.0], &[1.0, 2.0]),
            Err(StatsError::TooFewObservations { .. })
        ));
    }

    #[test]
    fn two_group_dummy() {
        let groups = ["a", "a", "a", "b", "b", "b", "b"];
        let y = [1.0, 2.0, 3.0, 10.0, 12.0, 11.0, 15.0];
        let mut d = Design::with_intercept(7);
        d.add_dummies("g", &groups, &"a").unwrap();
        let fit = ols_regression(&d, &y).unwrap();
        assert_relative_eq!(
            fit.coefficient("intercept").unwrap().estimate,
            2.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            fit.coefficient("g[b]").unwrap().estimate,
            12.0 - 2.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(fit.fitted[0], 2.0, epsilon = 1e-12);
        assert_relative_eq!(fit.fitted[6], 12.0, epsilon = 1e-12);
        assert_eq!(fit.df_model + fit.df_resid + 1, fit.n);
        let c = pearson_corr(&fit.fitted, &y).unwrap();
        assert_relative_eq!(c.r * c.r, fit.r_squared, epsilon = 1e-12);
    }

    #[test]
    fn rank_deficient_and_small() {
        let mut d = Design::with_intercept(5);
        d.add_column("x", vec![1.0, 2.0, 3.0, 4.0, 5.0]).unwrap();
        d.add_column("x2", vec![2.0, 4.0, 6.0, 8.0, 10.0]).unwrap();
        assert_eq!(
            ols_regression(&d, &[1.0, 3.0, 2.0, 5.0, 4.0]),
            Err(StatsError::RankDeficient)
        );
        let mut d = Design::with_intercept(2);
        d.add_column("x", vec![1.0, 2.0]).unwrap();
        assert!(matches!(
            ols_regression(&d, &[1.0, 2.0]),
            Err(StatsError::TooFewObservations { .. })
        ));
        assert_eq!(
            ols_regression(&Design::with_intercept(4), &[1.0, 2.0, 3.0, 4.0]),
            Err(StatsError::MissingTerms)
        );
    }

    #[test]
    fn f_test_matches_squared_t_for_one_predictor() {
        let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];
        let y = [2.1, 2.9, 4.2, 4.8, 6.3, 6.8, 8.1, 9.4];
        let mut d = Design::with_intercept(8);
        d.add_column("x", x.to_vec()).unwrap();
        let fit = ols_regression(&d, &y).unwrap();
        let slope = fit.coefficient("x").unwrap();
        assert_relative_eq!(fit.f_statistic, slope.t * slope.t, max_relative = 1e-10);
        assert_relative_eq!(fit.f_p, slope.p, max_relative = 1e-8);
        let corr = pearson_corr(&x, &y).unwrap();
        assert_relative_eq!(corr.p_two_tailed, slope.p, max_relative = 1e-8);
    }
}
