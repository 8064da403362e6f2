//! The benchmark table: optimized partial sums for `r²/2 + λr⁴ + λr⁶` at
//! three states and two couplings, next to published values and a Numerov
//! reference.

use crate::error::{Error, Result};
use crate::numerov::{solve_eigenvalue, GridConfig};
use crate::parallel::{self, Execution};
use crate::potential::{Param, PotentialSpec, QuantumState};
use crate::renorm::{optimize_sequence, RenormConfig};
use crate::verify::Check;

/// Orders printed in the published table.
pub const ORDERS: [usize; 9] = [2, 5, 10, 15, 20, 25, 30, 35, 40];

#[derive(Clone, Debug, PartialEq)]
pub struct Column {
    pub state: QuantumState,
    pub coupling: &'static str,
    /// Published partial sums, one per entry of [`ORDERS`].
    pub published: [f64; 9],
    pub published_numerical: f64,
}

impl Column {
    pub fn potential(&self) -> PotentialSpec {
        let coupling =
            Param::Exact(crate::scalar::parse_rational(self.coupling).expect("coupling literal"));
        PotentialSpec::sextic(Param::int(1), coupling.clone(), coupling).expect("valid potential")
    }

    pub fn published_at(&self, order: usize) -> Option<f64> {
        ORDERS
            .iter()
            .position(|&o| o == order)
            .map(|i| self.published[i])
    }
}

pub fn columns() -> [Column; 6] {
    let column = |n, l, coupling, published, published_numerical| Column {
        state: QuantumState::new(n, l),
        coupling,
        published,
        published_numerical,
    };
    [
        column(
            0,
            0,
            "0.01",
            [
                1.535791, 1.616383, 1.620603, 1.621682, 1.621688, 1.621689, 1.621690, 1.621690,
                1.621690,
            ],
            1.621690,
        ),
        column(
            0,
            0,
            "10",
            [
                5.382133, 6.042488, 6.097330, 6.125723, 6.126339, 6.126361, 6.126367, 6.126369,
                6.126370,
            ],
            6.126371,
        ),
        column(
            1,
            0,
            "0.01",
            [
                3.670797, 4.144668, 4.184985, 4.193532, 4.223470, 4.223784, 4.223822, 4.223840,
                4.223842,
            ],
            4.223843,
        ),
        column(
            1,
            0,
            "10",
            [
                15.99931, 18.75063, 19.07378, 19.15066, 19.57157, 19.57557, 19.57838, 19.57880,
                19.57928,
            ],
            19.57939,
        ),
        column(
            1,
            1,
            "0.01",
            [
                4.765971, 5.545735, 5.614234, 5.629195, 5.683960, 5.684735, 5.685455, 5.685520,
                5.685545,
            ],
            5.685575,
        ),
        column(
            1,
            1,
            "10",
            [
                22.01213, 26.18935, 26.67913, 26.79595, 26.84757, 26.87657, 27.40164, 27.39683,
                27.39740,
            ],
            27.39812,
        ),
    ]
}

#[derive(Clone, Debug, PartialEq)]
pub struct TableConfig {
    /// Largest order computed; rows above it are dropped.
    pub max_order: usize,
    pub renorm: RenormConfig,
    pub execution: Execution,
}

impl Default for TableConfig {
    fn default() -> Self {
        Self {
            max_order: 40,
            renorm: RenormConfig::default(),
            execution: Execution::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cell {
    pub order: usize,
    pub omega0: Option<f64>,
    pub value: Option<f64>,
    /// The value at working precision.
    pub text: Option<String>,
    pub published: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ColumnReport {
    pub column: Column,
    pub cells: Vec<Cell>,
    pub numerical: Option<f64>,
    pub numerical_error: Option<String>,
}

impl ColumnReport {
    pub fn cell(&self, order: usize) -> Option<&Cell> {
        self.cells.iter().find(|c| c.order == order)
    }

    pub fn value(&self, order: usize) -> Option<f64> {
        self.cell(order).and_then(|c| c.value)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TableReport {
    pub orders: Vec<usize>,
    pub columns: Vec<ColumnReport>,
}

fn compute_column(column: &Column, orders: &[usize], config: &TableConfig) -> ColumnReport {
    let potential = column.potential();
    let cells = match optimize_sequence(&potential, column.state, orders, &config.renorm) {
        Ok(results) => orders
            .iter()
            .zip(results)
            .map(|(&order, result)| {
                let published = column.published_at(order);
                match result {
                    Ok(r) => Cell {
                        order,
                        omega0: Some(r.omega0),
                        value: Some(r.partial_sum),
                        text: Some(r.partial_sum_text),
                        published,
                        error: None,
                    },
                    Err(err) => Cell {
                        order,
                        omega0: None,
                        value: None,
                        text: None,
                        published,
                        error: Some(err.to_string()),
                    },
                }
            })
            .collect(),
        Err(err) => orders
            .iter()
            .map(|&order| Cell {
                order,
                omega0: None,
                value: None,
                text: None,
                published: column.published_at(order),
                error: Some(err.to_string()),
            })
            .collect(),
    };
    let numerical = GridConfig::auto(&potential, column.state)
        .and_then(|grid| solve_eigenvalue(&potential, column.state, &grid));
    let (numerical, numerical_error) = match numerical {
        Ok(e) => (Some(e.energy), None),
        Err(err) => (None, Some(err.to_string())),
    };
    ColumnReport {
        column: column.clone(),
        cells,
        numerical,
        numerical_error,
    }
}

/// Computes every column, in parallel when enabled.
pub fn compute_table(config: &TableConfig) -> Result<TableReport> {
    config.renorm.validate()?;
    let orders: Vec<usize> = ORDERS
        .iter()
        .copied()
        .filter(|&o| o <= config.max_order)
        .collect();
    if orders.is_empty() {
        return Err(Error::InvalidArgument(format!(
            "max order {} is below the first table row {}",
            config.max_order, ORDERS[0]
        )));
    }
    let columns = columns();
    let reports = parallel::map(config.execution, &columns, |column| {
        compute_column(column, &orders, config)
    });
    Ok(TableReport {
        orders,
        columns: reports,
    })
}

fn label(column: &Column) -> String {
    format!("{} lambda={}", column.state, column.coupling)
}

/// Highest-order agreement with the published sums and numerical values.
pub fn converged_checks(
    report: &TableReport,
    sum_tolerance: f64,
    numerical_tolerance: f64,
) -> Vec<Check> {
    let top = *report.orders.last().expect("non-empty table");
    let mut checks = Vec::new();
    for col in &report.columns {
        let name = format!("N={top} partial sum, {}", label(&col.column));
        checks.push(match (col.value(top), col.column.published_at(top)) {
            (Some(ours), Some(published)) => Check::within(name, ours, published, sum_tolerance),
            (None, _) => Check::fail(
                name,
                col.cell(top)
                    .and_then(|c| c.error.clone())
                    .unwrap_or_default(),
            ),
            (_, None) => Check::fail(name, "no published value at this order".into()),
        });
        let name = format!("numerical energy, {}", label(&col.column));
        checks.push(match col.numerical {
            Some(ours) => Check::within(
                name,
                ours,
                col.column.published_numerical,
                numerical_tolerance,
            ),
            None => Check::fail(name, col.numerical_error.clone().unwrap_or_default()),
        });
    }
    checks
}

/// Low-order rows against the published ones (relative), and shrinking
/// distance to the numerical value along `monotone_orders`.
pub fn low_order_checks(
    report: &TableReport,
    rows: &[usize],
    relative_tolerance: f64,
    monotone_orders: &[usize],
) -> Vec<Check> {
    let mut checks = Vec::new();
    for col in &report.columns {
        for &order in rows {
            let name = format!("N={order} partial sum, {}", label(&col.column));
            checks.push(match (col.value(order), col.column.published_at(order)) {
                (Some(ours), Some(published)) => {
                    Check::within(name, ours, published, relative_tolerance * published.abs())
                }
                _ => Check::fail(name, "value unavailable".into()),
            });
        }
        let name = format!(
            "error shrinks over N={monotone_orders:?}, {}",
            label(&col.column)
        );
        let distances: Option<Vec<f64>> = col.numerical.and_then(|reference| {
            monotone_orders
                .iter()
                .map(|&o| col.value(o).map(|v| (v - reference).abs()))
                .collect()
        });
        checks.push(match distances {
            Some(d) => {
                let passed = d.windows(2).all(|w| w[1] < w[0]);
                let detail = d
                    .iter()
                    .map(|x| format!("{x:.3e}"))
                    .collect::<Vec<_>>()
                    .join(" > ");
                Check::new(name, passed, detail)
            }
            None => Check::fail(name, "value unavailable".into()),
        });
    }
    checks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_values_are_indexed_by_order() {
        let cols = columns();
        assert_eq!(cols[0].published_at(2), Some(1.535791));
        assert_eq!(cols[5].published_at(40), Some(27.39740));
        assert_eq!(cols[3].published_at(3), None);
        assert_eq!(
            cols[4].potential().coefficient(1),
            Some(&Param::ratio(1, 100))
        );
    }

    #[test]
    fn low_order_table() {
        let config = TableConfig {
            max_order: 5,
            renorm: RenormConfig {
                digits: 15,
                grid_points: 400,
                ..RenormConfig::default()
            },
            ..TableConfig::default()
        };
        let report = compute_table(&config).unwrap();
        assert_eq!(report.orders, vec![2, 5]);
        let checks = low_order_checks(&report, &[2, 5], 1e-6, &[2, 5]);
        assert!(checks.iter().all(|c| c.passed), "{checks:#?}");
    }

    #[test]
    fn rejects_tiny_order() {
        let config = TableConfig {
            max_order: 1,
            ..TableConfig::default()
        };
        assert!(compute_table(&config).is_err());
    }
}
