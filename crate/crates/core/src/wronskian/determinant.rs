//! Wronskians as determinants of derivative matrices. Derivatives of order
//! two and higher come from the differential equations themselves, never
//! from differencing samples.

use crate::error::{Result, SusyError};
use crate::jordan_chain::JordanChain;
use crate::schrodinger::{Grid, PotentialSpec, SampledFunction};

/// `table[m][i]` = m-th derivative of `y` at node `i`, for
/// `y'' = (V - energy) y - source`.
fn derivative_table(
    y: &SampledFunction,
    energy: f64,
    source: Option<&[Vec<f64>]>,
    potential: &[Vec<f64>],
    max_order: usize,
    what: &str,
) -> Result<Vec<Vec<f64>>> {
    let d = y
        .derivatives()
        .ok_or_else(|| SusyError::InvalidInput(format!("{what} carries no derivative data")))?;
    let n = y.len();
    let mut table = vec![y.values().to_vec(), d.to_vec()];
    for m in 2..=max_order {
        let mut row = vec![0.0; n];
        let mut binom = 1.0;
        for k in 0..=m - 2 {
            let vk = &potential[k];
            let yk = &table[m - 2 - k];
            for i in 0..n {
                row[i] += binom * vk[i] * yk[i];
            }
            binom = binom * (m - 2 - k) as f64 / (k + 1) as f64;
        }
        for i in 0..n {
            row[i] -= energy * table[m - 2][i];
            if let Some(s) = source {
                row[i] -= s[m - 2][i];
            }
        }
        table.push(row);
    }
    table.truncate(max_order + 1);
    Ok(table)
}

/// Determinant by LU with partial pivoting; `a` is row-major `n × n`.
pub(crate) fn determinant(a: &mut [f64], n: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&r, &s| a[r * n + col].abs().total_cmp(&a[s * n + col].abs()))
            .unwrap();
        if a[pivot * n + col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            for k in 0..n {
                a.swap(col * n + k, pivot * n + k);
            }
            det = -det;
        }
        let p = a[col * n + col];
        det *= p;
        for r in col + 1..n {
            let f = a[r * n + col] / p;
            if f != 0.0 {
                for k in col..n {
                    a[r * n + k] -= f * a[col * n + k];
                }
            }
        }
    }
    det
}

/// Wronskian (with derivative) of functions given by their derivative tables.
fn wronskian_from_tables(grid: &Grid, tables: &[Vec<Vec<f64>>]) -> Result<SampledFunction> {
    let size = tables.len();
    let n = grid.len();
    let mut values = Vec::with_capacity(n);
    let mut derivs = Vec::with_capacity(n);
    let mut m = vec![0.0; size * size];
    for i in 0..n {
        // row r = r-th derivative, column c = function c
        for r in 0..size {
            for (c, t) in tables.iter().enumerate() {
                m[r * size + c] = t[r][i];
            }
        }
        let mut work = m.clone();
        values.push(determinant(&mut work, size));
        for (c, t) in tables.iter().enumerate() {
            m[(size - 1) * size + c] = t[size][i];
        }
        derivs.push(determinant(&mut m, size));
    }
    SampledFunction::with_derivatives(*grid, values, derivs)
}

fn chain_tables(chain: &JordanChain, upto: usize, max_order: usize) -> Result<Vec<Vec<Vec<f64>>>> {
    let grid = chain.grid();
    let vd = chain
        .potential()
        .derivative_samples(grid, max_order.saturating_sub(2))?;
    let mut tables: Vec<Vec<Vec<f64>>> = Vec::with_capacity(upto + 1);
    for j in 0..=upto {
        let src = if j == 0 {
            None
        } else {
            Some(tables[j - 1].as_slice())
        };
        let t = derivative_table(
            &chain.functions()[j],
            chain.lambda(),
            src,
            &vd,
            max_order,
            &format!("u_{j}"),
        )?;
        tables.push(t);
    }
    Ok(tables)
}

fn check_upto(chain: &JordanChain, upto: usize) -> Result<()> {
    if upto > chain.order() {
        return Err(SusyError::InvalidInput(format!(
            "Wronskian up to u_{upto} needs a chain of order ≥ {upto}, got {}",
            chain.order()
        )));
    }
    Ok(())
}

/// `W_{u_0..u_upto}` with its first derivative.
pub fn direct_wronskian(chain: &JordanChain, upto: usize) -> Result<SampledFunction> {
    check_upto(chain, upto)?;
    let size = upto + 1;
    let tables = chain_tables(chain, upto, size)?;
    wronskian_from_tables(chain.grid(), &tables)
}

/// `W_{u_0..u_upto, y}` for a solution `y` of `y'' + (energy - V) y = 0`
/// (with derivative data) on the chain's potential.
pub fn wronskian_with_solution(
    chain: &JordanChain,
    upto: usize,
    y: &SampledFunction,
    energy: f64,
) -> Result<SampledFunction> {
    check_upto(chain, upto)?;
    if y.grid() != chain.grid() {
        return Err(SusyError::InvalidInput(
            "appended solution is sampled on a different grid".into(),
        ));
    }
    let size = upto + 2;
    let mut tables = chain_tables(chain, upto, size)?;
    let vd = chain
        .potential()
        .derivative_samples(chain.grid(), size - 2)?;
    tables.push(derivative_table(
        y,
        energy,
        None,
        &vd,
        size,
        "appended solution",
    )?);
    wronskian_from_tables(chain.grid(), &tables)
}

/// Wronskian of arbitrary solutions of `y_c'' = (V - e_c) y_c - s_c` where
/// each source is the previous entry (`chained[c]`) or absent.
pub(crate) fn wronskian_of_solutions(
    grid: &Grid,
    potential: &PotentialSpec,
    functions: &[(&SampledFunction, f64, bool)],
) -> Result<SampledFunction> {
    let size = functions.len();
    let vd = potential.derivative_samples(grid, size.saturating_sub(2))?;
    let mut tables: Vec<Vec<Vec<f64>>> = Vec::with_capacity(size);
    for (c, (f, e, chained)) in functions.iter().enumerate() {
        let src = if *chained && c > 0 {
            Some(tables[c - 1].as_slice())
        } else {
            None
        };
        let t = derivative_table(f, *e, src, &vd, size, "function")?;
        tables.push(t);
    }
    wronskian_from_tables(grid, &tables)
}
