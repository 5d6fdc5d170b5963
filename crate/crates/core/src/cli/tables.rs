use crate::distributions::PositiveLaw;
use crate::engine::{estimate_psi, EstimateReport, SimConfig};
use crate::error::{Error, Result};
use crate::lundberg;
use crate::tilting::{check_admissible, hazard_r_max, RiskModel, Tilt, TiltingPair};

pub const TABLE_NAMES: [&str; 5] = ["table1", "table2", "table3", "table4", "table5"];

const LOADING: f64 = 0.5;
const LINEAR_FACTOR: f64 = 1.95;

/// One column of a table: a model and its tilt.
#[derive(Debug, Clone)]
pub struct TableCase {
    pub label: String,
    pub model: RiskModel,
    pub pair: TiltingPair,
}

#[derive(Debug, Clone)]
pub struct TableSpec {
    pub name: &'static str,
    pub description: &'static str,
    pub u_grid: Vec<f64>,
    pub cases: Vec<TableCase>,
}

/// A finished table row.
#[derive(Debug, Clone)]
pub struct TableRow {
    pub label: String,
    pub report: EstimateReport,
}

fn linear_case(claim: PositiveLaw, wait: PositiveLaw) -> Result<TableCase> {
    let model = RiskModel::with_loading(claim, wait, LOADING)?;
    let xi = LINEAR_FACTOR * lundberg::xi_hat(&model)?;
    Ok(TableCase {
        label: claim.to_string(),
        model,
        pair: TiltingPair::new(Tilt::Linear { xi }, &model)?,
    })
}

fn hazard_case(
    claim: PositiveLaw,
    wait: PositiveLaw,
    theta: f64,
    factor: f64,
) -> Result<TableCase> {
    let model = RiskModel::with_loading(claim, wait, LOADING)?;
    let r = factor * hazard_r_max(&model, theta)?;
    Ok(TableCase {
        label: claim.to_string(),
        model,
        pair: TiltingPair::new(Tilt::HazardTwist { r, theta }, &model)?,
    })
}

fn check_mean(law: &PositiveLaw, target: f64, rel_tol: f64) -> Result<()> {
    let m = law.mean();
    if ((m - target) / target).abs() > rel_tol {
        return Err(Error::Config(format!(
            "{law} has mean {m}, expected {target} within {rel_tol}"
        )));
    }
    Ok(())
}

/// Configuration of a named table.
pub fn table_spec(name: &str) -> Result<TableSpec> {
    let exp1 = PositiveLaw::exp(1.0)?;
    let short_grid = vec![0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 10.0, 20.0, 30.0];
    let long_grid = vec![
        0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 10.0, 15.0, 20.0, 30.0, 40.0, 50.0,
    ];
    let spec = match name {
        "table1" => TableSpec {
            name: "table1",
            description: "Exp(1) claims, Exp(1) waits, loading 1/2, linear tilt at 1.95 xi_hat",
            u_grid: short_grid,
            cases: vec![linear_case(exp1, exp1)?],
        },
        "table2" => {
            let claims = [
                PositiveLaw::gamma(2.0, 1.0)?,
                PositiveLaw::weibull(0.75, 1.68)?,
                PositiveLaw::inv_gamma(3.0, 4.0)?,
                PositiveLaw::inv_weibull(3.0, 1.48)?,
            ];
            let mut cases = Vec::new();
            for claim in claims {
                check_mean(&claim, 2.0, 5e-3)?;
                cases.push(linear_case(claim, exp1)?);
            }
            TableSpec {
                name: "table2",
                description: "generalized gamma family claims with mean 2, Exp(1) waits, loading 1/2, linear tilt at 1.95 xi_hat",
                u_grid: long_grid,
                cases,
            }
        }
        "table3" => {
            let mut cases = Vec::new();
            for sigma in [0.5, 1.0, 1.5] {
                cases.push(linear_case(PositiveLaw::log_normal(0.0, sigma)?, exp1)?);
            }
            TableSpec {
                name: "table3",
                description:
                    "LN(0, sigma) claims, Exp(1) waits, loading 1/2, linear tilt at 1.95 xi_hat",
                u_grid: long_grid,
                cases,
            }
        }
        "table4" => {
            let wait = PositiveLaw::weibull(0.375, 0.5)?;
            let mut cases = Vec::new();
            for a in [1.5, 2.0, 2.5] {
                cases.push(hazard_case(PositiveLaw::pareto(a, 3.0)?, wait, 1.2, 0.95)?);
            }
            TableSpec {
                name: "table4",
                description: "Pa(a, 3) claims, Wei(0.375, 0.5) waits, loading 1/2, hazard twist theta = 1.2, r = 0.95 r_M(theta)",
                u_grid: vec![
                    0.0, 5.0, 10.0, 15.0, 20.0, 30.0, 40.0, 50.0, 100.0, 150.0, 200.0, 250.0,
                ],
                cases,
            }
        }
        "table5" => TableSpec {
            name: "table5",
            description:
                "Exp(1) claims, Ga(2,1) waits, loading 1/2, hazard twist theta = 1, r = 0.9 r_M(1)",
            u_grid: short_grid,
            cases: vec![hazard_case(exp1, PositiveLaw::gamma(2.0, 1.0)?, 1.0, 0.9)?],
        },
        other => {
            return Err(Error::Config(format!(
                "unknown table {other:?}, expected one of {}",
                TABLE_NAMES.join(", ")
            )))
        }
    };
    for case in &spec.cases {
        let adm = check_admissible(&case.pair)?;
        if !adm.in_c_p {
            return Err(Error::Config(format!(
                "{}: tilt {} is not admissible ({} > {})",
                case.label,
                case.pair.tilt(),
                adm.lhs,
                adm.rhs
            )));
        }
    }
    Ok(spec)
}

/// Runs every case at every `u`, case by case.
pub fn run_table(spec: &TableSpec, k: u64, seed: u64) -> Result<Vec<TableRow>> {
    let mut rows = Vec::new();
    for case in &spec.cases {
        for &u in &spec.u_grid {
            let mut report = estimate_psi(&case.pair, &SimConfig::new(u, k, seed))?;
            if let Some(psi) = lundberg::exact_psi(&case.model, u) {
                report = report.with_exact(psi);
            }
            rows.push(TableRow {
                label: case.label.clone(),
                report,
            });
        }
    }
    Ok(rows)
}
