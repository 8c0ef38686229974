//! Domain types shared by every estimator: observations, datasets,
//! kernels, and kernel-expansion decision functions.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{real, Scalar};

/// Whether outcomes are real-valued or supported on integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutcomeKind {
    Continuous,
    Discrete,
}

/// One subject: covariates, binary treatment, observed outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationRecord<F> {
    pub covariates: Vec<F>,
    pub treatment: u8,
    pub outcome: F,
}

impl<F: Scalar> ObservationRecord<F> {
    pub fn new(covariates: Vec<F>, treatment: u8, outcome: F) -> Self {
        Self {
            covariates,
            treatment,
            outcome,
        }
    }
}

/// The estimation sample.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dataset<F> {
    records: Vec<ObservationRecord<F>>,
    outcome_kind: OutcomeKind,
    dim: usize,
}

impl<F: Scalar> Dataset<F> {
    pub fn new(records: Vec<ObservationRecord<F>>, outcome_kind: OutcomeKind) -> Result<Self> {
        let first = records
            .first()
            .ok_or_else(|| Error::Data("dataset must be nonempty".to_string()))?;
        let dim = first.covariates.len();
        for (i, r) in records.iter().enumerate() {
            if r.covariates.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "record {i} has {} covariates, expected {dim}",
                    r.covariates.len()
                )));
            }
            if r.treatment > 1 {
                return Err(Error::Data(format!(
                    "record {i} has treatment {}, expected 0 or 1",
                    r.treatment
                )));
            }
            if !r.outcome.is_finite() || r.covariates.iter().any(|v| !v.is_finite()) {
                return Err(Error::Data(format!("record {i} has a non-finite value")));
            }
            if outcome_kind == OutcomeKind::Discrete && r.outcome.fract() != F::zero() {
                return Err(Error::Data(format!(
                    "record {i} outcome {} is not an integer but the dataset is discrete",
                    r.outcome
                )));
            }
        }
        Ok(Self {
            records,
            outcome_kind,
            dim,
        })
    }

    pub fn records(&self) -> &[ObservationRecord<F>] {
        &self.records
    }

    pub fn outcome_kind(&self) -> OutcomeKind {
        self.outcome_kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn outcomes(&self) -> impl Iterator<Item = F> + '_ {
        self.records.iter().map(|r| r.outcome)
    }

    /// Distinct outcome values of a discrete dataset, ascending.
    pub fn outcome_support(&self) -> Result<Vec<i64>> {
        if self.outcome_kind != OutcomeKind::Discrete {
            return Err(Error::InvalidArgument(
                "outcome support is only defined for discrete outcomes".to_string(),
            ));
        }
        let mut support: Vec<i64> = self
            .records
            .iter()
            .map(|r| r.outcome.to_real() as i64)
            .collect();
        support.sort_unstable();
        support.dedup();
        Ok(support)
    }

    /// New dataset holding the records at `indices` (fold views).
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let records = indices.iter().map(|&i| self.records[i].clone()).collect();
        Dataset::new(records, self.outcome_kind)
    }

    /// Reads `x1,...,xd,a,y` rows. `kind` of `None` infers discrete outcomes
    /// when every `y` is an exact integer.
    pub fn from_csv_reader<R: Read>(reader: R, kind: Option<OutcomeKind>) -> Result<Self> {
        let mut csv = csv::Reader::from_reader(reader);
        let headers = csv
            .headers()
            .map_err(|e| Error::Csv {
                row: 0,
                message: e.to_string(),
            })?
            .clone();
        let cols = headers.len();
        if cols < 3 || headers.get(cols - 2) != Some("a") || headers.get(cols - 1) != Some("y") {
            return Err(Error::Csv {
                row: 0,
                message: "expected header x1,...,xd,a,y".to_string(),
            });
        }
        let dim = cols - 2;
        let mut records = Vec::new();
        for (i, row) in csv.records().enumerate() {
            let rownum = i + 1;
            let row = row.map_err(|e| Error::Csv {
                row: rownum,
                message: e.to_string(),
            })?;
            if row.len() != cols {
                return Err(Error::Csv {
                    row: rownum,
                    message: format!("expected {cols} fields, found {}", row.len()),
                });
            }
            let parse = |field: &str, name: &str| -> Result<f64> {
                field.trim().parse::<f64>().map_err(|_| Error::Csv {
                    row: rownum,
                    message: format!("cannot parse {name} value {field:?}"),
                })
            };
            let mut covariates = Vec::with_capacity(dim);
            for j in 0..dim {
                covariates.push(real(parse(&row[j], &headers[j])?));
            }
            let a = parse(&row[dim], "a")?;
            if a != 0.0 && a != 1.0 {
                return Err(Error::Csv {
                    row: rownum,
                    message: format!("treatment must be 0 or 1, found {a}"),
                });
            }
            let y = real(parse(&row[dim + 1], "y")?);
            records.push(ObservationRecord::new(covariates, a as u8, y));
        }
        let kind = kind.unwrap_or_else(|| {
            if records
                .iter()
                .all(|r: &ObservationRecord<F>| r.outcome.fract() == F::zero())
            {
                OutcomeKind::Discrete
            } else {
                OutcomeKind::Continuous
            }
        });
        Dataset::new(records, kind)
    }

    pub fn from_csv_path(path: &Path, kind: Option<OutcomeKind>) -> Result<Self> {
        Self::from_csv_reader(std::fs::File::open(path)?, kind)
    }

    pub fn to_csv_writer<W: Write>(&self, writer: W) -> Result<()> {
        let mut csv = csv::Writer::from_writer(writer);
        let mut header: Vec<String> = (1..=self.dim).map(|j| format!("x{j}")).collect();
        header.push("a".to_string());
        header.push("y".to_string());
        csv.write_record(&header)
            .map_err(|e| Error::Serialization(e.to_string()))?;
        for r in &self.records {
            let mut row: Vec<String> = r.covariates.iter().map(|v| v.to_string()).collect();
            row.push(r.treatment.to_string());
            row.push(r.outcome.to_string());
            csv.write_record(&row)
                .map_err(|e| Error::Serialization(e.to_string()))?;
        }
        csv.flush()?;
        Ok(())
    }
}

/// Kernel choice for the decision-function space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum KernelSpec<F> {
    Linear,
    Gaussian { sigma: F },
}

/// Kernel family without tuning, used where sigma is chosen later.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Linear,
    Gaussian,
}

impl<F: Scalar> KernelSpec<F> {
    pub fn gaussian(sigma: F) -> Result<Self> {
        if !(sigma > F::zero()) {
            return Err(Error::InvalidArgument(format!(
                "gaussian kernel needs sigma > 0, got {sigma}"
            )));
        }
        Ok(KernelSpec::Gaussian { sigma })
    }

    pub fn kind(&self) -> KernelKind {
        match self {
            KernelSpec::Linear => KernelKind::Linear,
            KernelSpec::Gaussian { .. } => KernelKind::Gaussian,
        }
    }

    /// k(x, z): inner product, or exp(-sigma^2 ||x-z||^2).
    pub fn eval(&self, x: &[F], z: &[F]) -> Result<F> {
        if x.len() != z.len() {
            return Err(Error::DimensionMismatch(format!(
                "kernel arguments have lengths {} and {}",
                x.len(),
                z.len()
            )));
        }
        Ok(match *self {
            KernelSpec::Linear => x.iter().zip(z).map(|(&a, &b)| a * b).sum(),
            KernelSpec::Gaussian { sigma } => {
                let dist2: F = x
                    .iter()
                    .zip(z)
                    .map(|(&a, &b)| {
                        let d = a - b;
                        d * d
                    })
                    .sum();
                (-sigma * sigma * dist2).exp()
            }
        })
    }
}

/// Per-coordinate z-score transform frozen at training time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardizer<F> {
    pub mean: Vec<F>,
    pub scale: Vec<F>,
}

impl<F: Scalar> Standardizer<F> {
    /// Identity transform in `dim` coordinates.
    pub fn identity(dim: usize) -> Self {
        Self {
            mean: vec![F::zero(); dim],
            scale: vec![F::one(); dim],
        }
    }

    /// Training-sample mean and standard deviation per coordinate.
    /// Constant coordinates get scale 1 so they pass through centered.
    pub fn fit(rows: &[&[F]]) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| Error::Data("cannot standardize an empty sample".to_string()))?;
        let dim = first.len();
        let n = real::<F>(rows.len() as f64);
        let mut mean = vec![F::zero(); dim];
        for row in rows {
            for (m, &v) in mean.iter_mut().zip(*row) {
                *m += v;
            }
        }
        for m in &mut mean {
            *m /= n;
        }
        let mut scale = vec![F::zero(); dim];
        for row in rows {
            for ((s, &v), &m) in scale.iter_mut().zip(*row).zip(&mean) {
                let d = v - m;
                *s += d * d;
            }
        }
        for s in &mut scale {
            *s = (*s / n).sqrt();
            if !(*s > F::zero()) {
                *s = F::one();
            }
        }
        Ok(Self { mean, scale })
    }

    pub fn fit_dataset(data: &Dataset<F>) -> Result<Self> {
        let rows: Vec<&[F]> = data.records().iter().map(|r| &r.covariates[..]).collect();
        Self::fit(&rows)
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn apply(&self, x: &[F]) -> Result<Vec<F>> {
        if x.len() != self.mean.len() {
            return Err(Error::DimensionMismatch(format!(
                "standardizer expects dimension {}, got {}",
                self.mean.len(),
                x.len()
            )));
        }
        Ok(x.iter()
            .zip(&self.mean)
            .zip(&self.scale)
            .map(|((&v, &m), &s)| (v - m) / s)
            .collect())
    }
}

/// Kernel expansion f(x) = b + sum_i beta_i k(s_i, x~), where x~ is the
/// standardized input. Stores its own standardization so it can be
/// evaluated on raw covariates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionFunction<F> {
    pub intercept: F,
    pub coefficients: Vec<F>,
    pub support_points: Vec<Vec<F>>,
    pub kernel: KernelSpec<F>,
    pub standardizer: Standardizer<F>,
}

impl<F: Scalar> DecisionFunction<F> {
    pub fn new(
        intercept: F,
        coefficients: Vec<F>,
        support_points: Vec<Vec<F>>,
        kernel: KernelSpec<F>,
        standardizer: Standardizer<F>,
    ) -> Result<Self> {
        if coefficients.len() != support_points.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} coefficients for {} support points",
                coefficients.len(),
                support_points.len()
            )));
        }
        Ok(Self {
            intercept,
            coefficients,
            support_points,
            kernel,
            standardizer,
        })
    }

    /// Constant function f(x) = b.
    pub fn constant(intercept: F, dim: usize) -> Self {
        Self {
            intercept,
            coefficients: Vec::new(),
            support_points: Vec::new(),
            kernel: KernelSpec::Linear,
            standardizer: Standardizer::identity(dim),
        }
    }

    /// Evaluates on raw covariates (standardizing internally).
    pub fn eval(&self, x: &[F]) -> Result<F> {
        self.eval_standardized(&self.standardizer.apply(x)?)
    }

    /// Evaluates on covariates that are already standardized.
    pub fn eval_standardized(&self, x_std: &[F]) -> Result<F> {
        let mut acc = self.intercept;
        for (beta, point) in self.coefficients.iter().zip(&self.support_points) {
            acc = acc + *beta * self.kernel.eval(point, x_std)?;
        }
        Ok(acc)
    }

    /// Treatment decision 1{f(x) > 0}; the tie f(x) = 0 maps to 0.
    pub fn decide(&self, x: &[F]) -> Result<u8> {
        Ok(u8::from(self.eval(x)? > F::zero()))
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Deterministic regime d(x) = 1{f(x) > 0}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Regime<F> {
    pub decision: DecisionFunction<F>,
}

impl<F: Scalar> Regime<F> {
    pub fn new(decision: DecisionFunction<F>) -> Self {
        Self { decision }
    }

    pub fn assign(&self, x: &[F]) -> Result<u8> {
        self.decision.decide(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear_df(
        intercept: f64,
        coefficients: Vec<f64>,
        support_points: Vec<Vec<f64>>,
        dim: usize,
    ) -> DecisionFunction<f64> {
        DecisionFunction::new(
            intercept,
            coefficients,
            support_points,
            KernelSpec::Linear,
            Standardizer::identity(dim),
        )
        .unwrap()
    }

    #[test]
    fn kernel_linear_dot_product() {
        let k = KernelSpec::<f64>::Linear;
        assert_eq!(k.eval(&[1.0, 2.0], &[3.0, 4.0]).unwrap(), 11.0);
    }

    #[test]
    fn kernel_gaussian_at_zero_distance() {
        let k = KernelSpec::gaussian(1.0).unwrap();
        assert_eq!(k.eval(&[0.3, -0.2], &[0.3, -0.2]).unwrap(), 1.0);
    }

    #[test]
    fn kernel_gaussian_direct_value() {
        // sigma = 0.5, ||x-z||^2 = 4 -> exp(-0.25 * 4) = exp(-1)
        let k = KernelSpec::gaussian(0.5).unwrap();
        let v = k.eval(&[0.0, 0.0], &[2.0, 0.0]).unwrap();
        assert!((v - (-1.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn kernel_dimension_mismatch_errors() {
        let k = KernelSpec::<f64>::Linear;
        assert!(k.eval(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn kernel_gaussian_requires_positive_sigma() {
        assert!(KernelSpec::gaussian(0.0).is_err());
        assert!(KernelSpec::gaussian(-1.0).is_err());
    }

    #[test]
    fn decision_intercept_only() {
        let f = linear_df(0.3, vec![], vec![], 2);
        assert!((f.eval(&[5.0, -7.0]).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(f.decide(&[5.0, -7.0]).unwrap(), 1);
    }

    #[test]
    fn decision_single_support_point() {
        let f = linear_df(-1.0, vec![2.0], vec![vec![1.0, 0.0]], 2);
        assert!((f.eval(&[1.0, 0.0]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(f.decide(&[1.0, 0.0]).unwrap(), 1);
        assert!((f.eval(&[0.0, 0.0]).unwrap() + 1.0).abs() < 1e-15);
        assert_eq!(f.decide(&[0.0, 0.0]).unwrap(), 0);
    }

    #[test]
    fn tie_maps_to_control() {
        let f = linear_df(0.0, vec![], vec![], 1);
        assert_eq!(f.decide(&[3.0]).unwrap(), 0);
    }

    #[test]
    fn linear_expansion_collapses_to_hyperplane() {
        let support = vec![vec![1.0, -2.0], vec![0.5, 4.0], vec![-3.0, 0.1]];
        let beta = vec![0.7, -1.3, 2.2];
        let f = linear_df(0.4, beta.clone(), support.clone(), 2);
        let mut w = [0.0f64; 2];
        for (b, s) in beta.iter().zip(&support) {
            w[0] += b * s[0];
            w[1] += b * s[1];
        }
        for x in [[0.0, 0.0], [1.0, 1.0], [-2.5, 3.5], [10.0, -40.0]] {
            let direct = w[0] * x[0] + w[1] * x[1] + 0.4;
            assert!((f.eval(&x).unwrap() - direct).abs() < 1e-12);
        }
    }

    #[test]
    fn regime_sign_is_scale_invariant() {
        let f = linear_df(0.4, vec![0.7, -1.3], vec![vec![1.0, -2.0], vec![0.5, 4.0]], 2);
        let mut scaled = f.clone();
        let c = 17.5;
        scaled.intercept *= c;
        for b in &mut scaled.coefficients {
            *b *= c;
        }
        for x in [[0.0, 0.0], [1.0, 1.0], [-2.5, 3.5], [0.3, -0.1]] {
            if f.eval(&x).unwrap() != 0.0 {
                assert_eq!(f.decide(&x).unwrap(), scaled.decide(&x).unwrap());
            }
        }
    }

    #[test]
    fn standardizer_round_trip_through_decision() {
        let rows: Vec<Vec<f64>> = vec![vec![1.0, 10.0], vec![3.0, 30.0], vec![5.0, 20.0]];
        let refs: Vec<&[f64]> = rows.iter().map(|r| &r[..]).collect();
        let std = Standardizer::fit(&refs).unwrap();
        let z = std.apply(&[3.0, 20.0]).unwrap();
        assert!(z[0].abs() < 1e-12 && z[1].abs() < 1e-12);
    }

    #[test]
    fn dataset_validation() {
        let ok = Dataset::new(
            vec![ObservationRecord::new(vec![1.0, 2.0], 1, 3.0)],
            OutcomeKind::Continuous,
        );
        assert!(ok.is_ok());
        assert!(Dataset::<f64>::new(vec![], OutcomeKind::Continuous).is_err());
        let bad_arm = Dataset::new(
            vec![ObservationRecord::new(vec![1.0], 2, 3.0)],
            OutcomeKind::Continuous,
        );
        assert!(bad_arm.is_err());
        let bad_discrete = Dataset::new(
            vec![ObservationRecord::new(vec![1.0], 0, 2.5)],
            OutcomeKind::Discrete,
        );
        assert!(bad_discrete.is_err());
    }

    #[test]
    fn csv_round_trip() {
        let data = Dataset::new(
            vec![
                ObservationRecord::new(vec![0.25, -1.5], 1, 2.125),
                ObservationRecord::new(vec![1.0, 0.0], 0, -3.0),
            ],
            OutcomeKind::Continuous,
        )
        .unwrap();
        let mut buf = Vec::new();
        data.to_csv_writer(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("x1,x2,a,y\n"));
        let back = Dataset::<f64>::from_csv_reader(&buf[..], Some(OutcomeKind::Continuous)).unwrap();
        assert_eq!(back.records(), data.records());
    }

    #[test]
    fn csv_errors_carry_row_numbers() {
        let text = "x1,a,y\n1.0,1,2.0\n1.0,7,2.0\n";
        let err = Dataset::<f64>::from_csv_reader(text.as_bytes(), None).unwrap_err();
        match err {
            Error::Csv { row, .. } => assert_eq!(row, 2),
            other => panic!("expected csv error, got {other:?}"),
        }
    }

    #[test]
    fn decision_function_json_round_trip() {
        let f = linear_df(0.4, vec![0.7], vec![vec![1.0, -2.0]], 2);
        let back = DecisionFunction::<f64>::from_json(&f.to_json().unwrap()).unwrap();
        assert_eq!(f, back);
    }
}
