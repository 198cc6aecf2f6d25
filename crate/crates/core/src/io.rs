//! File formats: headerless CSV for matrices, JSON for systems, datasets,
//! attack specs and reports.

use std::fs;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::attack::{AttackSpec, AttackVerification};
use crate::error::{Error, Result};
use crate::minnorm::{MinNormSolution, PerturbationBoundAudit};
use crate::model::{Dataset, SystemModel};

pub fn matrix_to_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
        .collect()
}

pub fn rows_to_matrix(rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    let r = rows.len();
    let c = rows.first().map(|row| row.len()).unwrap_or(0);
    if rows.iter().any(|row| row.len() != c) {
        return Err(Error::Parse("ragged matrix rows".into()));
    }
    Ok(DMatrix::from_fn(r, c, |i, j| rows[i][j]))
}

/// Writes one matrix row per line, comma-separated, shortest round-trip floats.
pub fn write_matrix_csv(path: &Path, m: &DMatrix<f64>) -> Result<()> {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format!("{}", m[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn read_matrix_csv(path: &Path) -> Result<DMatrix<f64>> {
    let text = fs::read_to_string(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> = line
            .split(',')
            .map(|tok| tok.trim().parse::<f64>())
            .collect();
        rows.push(row.map_err(|e| Error::Parse(format!("{path:?}:{}: {e}", lineno + 1)))?);
    }
    if rows.is_empty() {
        return Err(Error::Parse(format!("{path:?} holds no matrix rows")));
    }
    rows_to_matrix(&rows)
}

/// JSON shape of a system file; `A` may be null for analysis-only configs.
/// Field names are part of the wire format.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct SystemModelFile {
    pub n: usize,
    pub m: usize,
    pub p: usize,
    pub l: usize,
    pub A: Option<Vec<Vec<f64>>>,
    pub B: Vec<Vec<f64>>,
    pub C: Vec<Vec<f64>>,
    pub D: Vec<Vec<f64>>,
    pub E: Vec<Vec<f64>>,
    pub F: Vec<Vec<f64>>,
}

fn shaped(rows: &[Vec<f64>], r: usize, c: usize, name: &str) -> Result<DMatrix<f64>> {
    let m = rows_to_matrix(rows)?;
    // r x 0 matrices serialize as r empty rows
    let m = if c == 0 && m.ncols() == 0 {
        DMatrix::zeros(r, 0)
    } else {
        m
    };
    if m.shape() != (r, c) {
        return Err(Error::Dimension(format!(
            "{name} is {:?}, expected ({r}, {c})",
            m.shape()
        )));
    }
    Ok(m)
}

impl SystemModelFile {
    pub fn from_model(sys: &SystemModel) -> Self {
        SystemModelFile {
            n: sys.state_dim(),
            m: sys.input_dim(),
            p: sys.output_dim(),
            l: sys.noise_dim(),
            A: sys.a_true.as_ref().map(matrix_to_rows),
            B: matrix_to_rows(&sys.b),
            C: matrix_to_rows(&sys.c),
            D: matrix_to_rows(&sys.d),
            E: matrix_to_rows(&sys.e),
            F: matrix_to_rows(&sys.f),
        }
    }

    pub fn into_model(self) -> Result<SystemModel> {
        let a = match &self.A {
            None => None,
            Some(rows) => Some(shaped(rows, self.n, self.n, "A")?),
        };
        SystemModel::new(
            a,
            shaped(&self.B, self.n, self.m, "B")?,
            shaped(&self.C, self.p, self.n, "C")?,
            shaped(&self.D, self.p, self.m, "D")?,
            shaped(&self.E, self.n, self.l, "E")?,
            shaped(&self.F, self.p, self.l, "F")?,
        )
    }
}

pub fn write_system_json(path: &Path, sys: &SystemModel) -> Result<()> {
    let file = SystemModelFile::from_model(sys);
    fs::write(path, serde_json::to_string_pretty(&file)?)?;
    Ok(())
}

pub fn read_system_json(path: &Path) -> Result<SystemModel> {
    let file: SystemModelFile = serde_json::from_str(&fs::read_to_string(path)?)?;
    file.into_model()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
#[allow(non_snake_case)]
pub struct DatasetFile {
    pub X_minus: Vec<Vec<f64>>,
    pub X_plus: Vec<Vec<f64>>,
    pub U_minus: Vec<Vec<f64>>,
    pub Y_minus: Vec<Vec<f64>>,
}

impl DatasetFile {
    pub fn from_dataset(data: &Dataset) -> Self {
        DatasetFile {
            X_minus: matrix_to_rows(&data.x_minus),
            X_plus: matrix_to_rows(&data.x_plus),
            U_minus: matrix_to_rows(&data.u_minus),
            Y_minus: matrix_to_rows(&data.y_minus),
        }
    }

    pub fn into_dataset(self) -> Result<Dataset> {
        Dataset::new(
            rows_to_matrix(&self.X_minus)?,
            rows_to_matrix(&self.X_plus)?,
            rows_to_matrix(&self.U_minus)?,
            rows_to_matrix(&self.Y_minus)?,
        )
    }
}

pub fn write_dataset_json(path: &Path, data: &Dataset) -> Result<()> {
    fs::write(
        path,
        serde_json::to_string_pretty(&DatasetFile::from_dataset(data))?,
    )?;
    Ok(())
}

pub fn read_dataset_json(path: &Path) -> Result<Dataset> {
    let file: DatasetFile = serde_json::from_str(&fs::read_to_string(path)?)?;
    file.into_dataset()
}

pub const DATASET_CSV_NAMES: [&str; 4] =
    ["X_minus.csv", "X_plus.csv", "U_minus.csv", "Y_minus.csv"];

/// Writes the four block CSVs into a directory.
pub fn write_dataset_csv_dir(dir: &Path, data: &Dataset) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_matrix_csv(&dir.join("X_minus.csv"), &data.x_minus)?;
    write_matrix_csv(&dir.join("X_plus.csv"), &data.x_plus)?;
    write_matrix_csv(&dir.join("U_minus.csv"), &data.u_minus)?;
    write_matrix_csv(&dir.join("Y_minus.csv"), &data.y_minus)?;
    Ok(())
}

pub fn read_dataset_csv_dir(dir: &Path) -> Result<Dataset> {
    Dataset::new(
        read_matrix_csv(&dir.join("X_minus.csv"))?,
        read_matrix_csv(&dir.join("X_plus.csv"))?,
        read_matrix_csv(&dir.join("U_minus.csv"))?,
        read_matrix_csv(&dir.join("Y_minus.csv"))?,
    )
}

/// Reads a dataset from either a JSON file or a CSV directory.
pub fn read_dataset(path: &Path) -> Result<Dataset> {
    if path.is_dir() {
        read_dataset_csv_dir(path)
    } else {
        read_dataset_json(path)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackSpecFile {
    pub lambda: f64,
    pub x0: Vec<f64>,
    pub u0: Vec<f64>,
}

impl AttackSpecFile {
    pub fn from_spec(spec: &AttackSpec) -> Self {
        AttackSpecFile {
            lambda: spec.lambda,
            x0: spec.x0.iter().cloned().collect(),
            u0: spec.u0.iter().cloned().collect(),
        }
    }

    pub fn into_spec(self) -> AttackSpec {
        AttackSpec {
            lambda: self.lambda,
            x0: DVector::from_vec(self.x0),
            u0: DVector::from_vec(self.u0),
        }
    }
}

pub fn read_attack_spec(path: &Path) -> Result<AttackSpec> {
    let file: AttackSpecFile = serde_json::from_str(&fs::read_to_string(path)?)?;
    Ok(file.into_spec())
}

pub fn write_attack_spec(path: &Path, spec: &AttackSpec) -> Result<()> {
    fs::write(
        path,
        serde_json::to_string_pretty(&AttackSpecFile::from_spec(spec))?,
    )?;
    Ok(())
}

/// Machine-readable informativity verdict.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InformativityReportFile {
    pub informative: bool,
    pub cond_image: bool,
    pub cond_kernel: bool,
    pub horizon: usize,
    pub state_dim: usize,
    pub j_star_dim: usize,
    pub v_star_data_dim: usize,
    pub witness: Option<Vec<f64>>,
}

impl InformativityReportFile {
    pub fn from_report(report: &crate::analysis::InformativityReport) -> Self {
        InformativityReportFile {
            informative: report.informative,
            cond_image: report.cond_image,
            cond_kernel: report.cond_kernel,
            horizon: report.j_star.ambient_dim(),
            state_dim: report.v_star_data.ambient_dim(),
            j_star_dim: report.j_star.dim(),
            v_star_data_dim: report.v_star_data.dim(),
            witness: report.witness.as_ref().map(|w| w.iter().cloned().collect()),
        }
    }
}

/// Machine-readable attack verification report.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AttackReportFile {
    pub lambda: f64,
    pub dim_j_before: usize,
    pub dim_j_after: usize,
    pub v_orthogonality_residual: f64,
    pub subspace_growth_residual: f64,
    pub growth_ok: bool,
    pub eigen_residual: f64,
    pub membership_residual: f64,
    pub model_set_ok: bool,
    pub post_attack_informative: bool,
    pub all_passed: bool,
}

impl AttackReportFile {
    pub fn from_report(lambda: f64, report: &AttackVerification) -> Self {
        AttackReportFile {
            lambda,
            dim_j_before: report.dim_j_before,
            dim_j_after: report.dim_j_after,
            v_orthogonality_residual: report.v_orthogonality_residual,
            subspace_growth_residual: report.subspace_growth_residual,
            growth_ok: report.growth_ok,
            eigen_residual: report.eigen_residual,
            membership_residual: report.membership_residual,
            model_set_ok: report.model_set_ok,
            post_attack_informative: report.post_attack_informative,
            all_passed: report.all_passed(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerturbationBoundFile {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub distance: f64,
    pub sigma_min_x_minus: f64,
    pub sampled: bool,
}

impl PerturbationBoundFile {
    pub fn from_audit(a: &PerturbationBoundAudit) -> Self {
        PerturbationBoundFile {
            lhs: a.lhs,
            rhs: a.rhs,
            holds: a.holds,
            distance: a.distance,
            sigma_min_x_minus: a.sigma_min_x_minus,
            sampled: a.sampled,
        }
    }
}

/// Machine-readable minimum-norm solution report.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MinNormReportFile {
    pub lambda_star: f64,
    pub v_star: Vec<f64>,
    pub objective: f64,
    pub frob_norm: f64,
    pub relative_error: f64,
    pub rho: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub post_attack_informative: bool,
    pub bound: Option<PerturbationBoundFile>,
}

impl MinNormReportFile {
    pub fn from_solution(
        sol: &MinNormSolution,
        x_plus_norm: f64,
        post_attack_informative: bool,
        bound: Option<PerturbationBoundFile>,
    ) -> Self {
        MinNormReportFile {
            lambda_star: sol.lambda_star,
            v_star: sol.v_star.iter().cloned().collect(),
            objective: sol.objective_value,
            frob_norm: sol.frob_norm,
            relative_error: sol.frob_norm / x_plus_norm.max(f64::MIN_POSITIVE),
            rho: sol.rho.iter().cloned().collect(),
            iterations: sol.iterations,
            converged: sol.converged,
            post_attack_informative,
            bound,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datagen::line_network_5;
    use std::path::PathBuf;

    fn scratch_dir(tag: &str) -> PathBuf {
        let dir =
            std::env::temp_dir().join(format!("informativity-io-{tag}-{}", std::process::id()));
        let _ = std::fs::remove_dir_all(&dir);
        std::fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn matrix_csv_round_trip() {
        let dir = scratch_dir("csv");
        let m = DMatrix::from_row_slice(2, 3, &[1.5, -2.25, 3.0e-17, 0.1, 4.0, -5.5]);
        let path = dir.join("m.csv");
        write_matrix_csv(&path, &m).unwrap();
        let back = read_matrix_csv(&path).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn system_json_round_trip_with_empty_noise() {
        let dir = scratch_dir("sys");
        let sys = line_network_5();
        let path = dir.join("system.json");
        write_system_json(&path, &sys).unwrap();
        let back = read_system_json(&path).unwrap();
        assert_eq!(back.noise_dim(), 0);
        assert_eq!(back.a_true.unwrap(), sys.a_true.unwrap());
        assert_eq!(back.b, sys.b);
    }

    #[test]
    fn system_json_rejects_unknown_fields() {
        let text = r#"{"n":1,"m":1,"p":1,"l":0,"A":null,"B":[[0.0]],"C":[[1.0]],"D":[[0.0]],"E":[[]],"F":[[]],"extra":1}"#;
        assert!(serde_json::from_str::<SystemModelFile>(text).is_err());
    }

    #[test]
    fn dataset_csv_dir_round_trip() {
        let dir = scratch_dir("data");
        let data = Dataset::new(
            DMatrix::from_row_slice(2, 3, &[1., 2., 3., 4., 5., 6.]),
            DMatrix::from_row_slice(2, 3, &[2., 3., 4., 5., 6., 7.]),
            DMatrix::from_row_slice(1, 3, &[0.1, 0.2, 0.3]),
            DMatrix::from_row_slice(1, 3, &[1., 4., 9.]),
        )
        .unwrap();
        write_dataset_csv_dir(&dir, &data).unwrap();
        let back = read_dataset(&dir).unwrap();
        assert_eq!(back.x_plus, data.x_plus);
        let json_path = dir.join("dataset.json");
        write_dataset_json(&json_path, &data).unwrap();
        let back = read_dataset(&json_path).unwrap();
        assert_eq!(back.y_minus, data.y_minus);
    }

    #[test]
    fn attack_spec_round_trip() {
        let dir = scratch_dir("spec");
        let spec = AttackSpec {
            lambda: 0.5014,
            x0: DVector::from_vec(vec![0.0, 0.0, -0.0194, 0.0776, 0.0004]),
            u0: DVector::zeros(1),
        };
        let path = dir.join("attack.json");
        write_attack_spec(&path, &spec).unwrap();
        let back = read_attack_spec(&path).unwrap();
        assert_eq!(back.lambda, spec.lambda);
        assert_eq!(back.x0, spec.x0);
    }
}
