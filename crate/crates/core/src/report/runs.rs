//! The four CSV artifacts.
//!
//! All output is deterministic and byte-stable for a fixed configuration:
//! fixed column order, `\n` line endings, scientific notation with 17
//! significant digits. Sections beyond the first table are introduced by `#`
//! comment lines, and every file starts with comments naming the case and
//! the metric conventions.

use std::collections::BTreeMap;
use std::sync::Mutex;

use num_traits::ToPrimitive;

use super::{CaseConfig, OutputKind, ReportError};
use crate::djm::{self, SeriesSolution};
use crate::exact::ExactCase;
use crate::oracle::GridState;
use crate::rational::{to_f64, Rational};

/// Oracle defaults for the comparison runs (the library API accepts any
/// resolution; these are the documented report settings).
const ORACLE_U_MAX: f64 = 20.0;
const ORACLE_CELLS: usize = 2000;
const ORACLE_DT: f64 = 1e-3;

fn sci(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x }; // normalize -0.0
    format!("{x:.16e}")
}

/// Worker cap: `PBE_DJM_THREADS` when set, otherwise the machine's
/// parallelism.
fn thread_cap() -> usize {
    std::env::var("PBE_DJM_THREADS")
        .ok()
        .and_then(|s| s.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

/// Order-preserving parallel map over independent work items.
fn parallel_map<T, R, F>(items: Vec<T>, f: F) -> Vec<R>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Sync,
{
    let workers = thread_cap().min(items.len());
    if workers <= 1 {
        return items.into_iter().map(f).collect();
    }
    let mut queue: Vec<(usize, T)> = items.into_iter().enumerate().collect();
    queue.reverse(); // pop() hands work out front-to-back
    let queue = Mutex::new(queue);
    let done = Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let item = queue.lock().expect("queue lock").pop();
                match item {
                    Some((index, item)) => {
                        let result = f(item);
                        done.lock().expect("result lock").push((index, result));
                    }
                    None => break,
                }
            });
        }
    });
    let mut results = done.into_inner().expect("result lock");
    results.sort_by_key(|(index, _)| *index);
    results.into_iter().map(|(_, r)| r).collect()
}

fn exact_case(config: &CaseConfig) -> Result<Option<ExactCase>, ReportError> {
    match config.problem.example_id() {
        Some(id @ 1..=4) => {
            let radius = config.r_value.as_ref().map(to_f64);
            Ok(Some(ExactCase::new(id, radius)?))
        }
        _ => Ok(None),
    }
}

fn series_for(config: &CaseConfig, order: u32) -> Result<SeriesSolution, ReportError> {
    let spec = config.problem.to_spec()?;
    Ok(djm::compute_series(&spec, order as usize)?)
}

fn preamble(config: &CaseConfig, output: OutputKind) -> String {
    let mut out = String::new();
    out.push_str(&format!("# case: {}\n", config.case_name));
    out.push_str(&format!("# output: {}\n", output.keyword()));
    out.push_str(&format!("# problem: {}\n", config.problem.emit()));
    out
}

/// Density profiles: `t, u, djm_value[, exact_value]`, with a separate
/// Dirac-coefficient section when the solution carries a point mass (the
/// smooth field and the Dirac channel are not comparable pointwise).
pub fn run_density(config: &CaseConfig) -> Result<String, ReportError> {
    config.validate()?;
    let order = config.max_terms();
    let series = series_for(config, order)?;
    let phi = series.partial_sum(order as usize);
    let case = exact_case(config)?;
    let grid = config.u_grid();
    let radius = config.r_value.clone();

    let mut out = preamble(config, OutputKind::Density);
    out.push_str(&format!("# truncation order: {order}\n"));
    out.push_str("# djm_value and exact_value are the smooth channel\n");
    out.push_str(if case.is_some() {
        "t,u,djm_value,exact_value\n"
    } else {
        "t,u,djm_value\n"
    });
    for t in &config.t_values {
        let evaluator = phi.evaluator(t, radius.as_ref())?;
        let t_f = to_f64(t);
        for u in &grid {
            let (djm, _) = evaluator.eval(u);
            out.push_str(&sci(t_f));
            out.push(',');
            out.push_str(&sci(to_f64(u)));
            out.push(',');
            out.push_str(&sci(djm));
            if let Some(case) = &case {
                let (exact, _) = case.eval(t_f, to_f64(u));
                out.push(',');
                out.push_str(&sci(exact));
            }
            out.push('\n');
        }
    }

    if phi.has_distributional_terms() {
        out.push_str("# dirac coefficients by (t, r)\n");
        out.push_str(if case.is_some() {
            "t,r,djm_dirac,exact_dirac\n"
        } else {
            "t,r,djm_dirac\n"
        });
        let r = radius.as_ref().expect("validated: radius present");
        for t in &config.t_values {
            let evaluator = phi.evaluator(t, Some(r))?;
            let t_f = to_f64(t);
            out.push_str(&sci(t_f));
            out.push(',');
            out.push_str(&sci(to_f64(r)));
            out.push(',');
            out.push_str(&sci(evaluator.dirac_coefficient()));
            if let Some(case) = &case {
                out.push(',');
                out.push_str(&sci(case.eval(t_f, to_f64(r)).1));
            }
            out.push('\n');
        }
    }
    Ok(out)
}

/// Error tables: rows are the configured times, columns the truncation
/// orders, each entry the sup over the configured u-grid of the pointwise
/// absolute error of the smooth channel. Dirac-bearing cases get a companion
/// table for the Dirac coefficient.
pub fn run_error_table(config: &CaseConfig) -> Result<String, ReportError> {
    config.validate()?;
    let case = exact_case(config)?.ok_or(ReportError::NoExactSolution)?;
    let order = config.max_terms();
    let series = series_for(config, order)?;
    let grid = config.u_grid();
    let radius = config.r_value.clone();

    let mut out = preamble(config, OutputKind::ErrorTable);
    out.push_str(&format!(
        "# metric: sup over u in [{}, {}] step {} of |djm smooth - exact smooth| at fixed t\n",
        sci(to_f64(&config.u_min)),
        sci(to_f64(&config.u_max)),
        sci(to_f64(&config.u_step)),
    ));
    out.push_str("t");
    for n in &config.n_terms {
        out.push_str(&format!(",n={n}"));
    }
    out.push('\n');

    type Row = Result<(Vec<f64>, Vec<f64>), ReportError>;
    let rows: Vec<Row> = parallel_map(config.t_values.clone(), |t| {
        let t_f = to_f64(&t);
        let mut sups = Vec::with_capacity(config.n_terms.len());
        let mut dirac_errors = Vec::with_capacity(config.n_terms.len());
        for &n in &config.n_terms {
            let phi = series.partial_sum(n as usize);
            let evaluator = phi.evaluator(&t, radius.as_ref())?;
            let mut sup = 0.0f64;
            for u in &grid {
                let (djm, _) = evaluator.eval(u);
                let (exact, _) = case.eval(t_f, to_f64(u));
                sup = sup.max((djm - exact).abs());
            }
            sups.push(sup);
            if phi.has_distributional_terms() {
                let r = radius.as_ref().expect("validated");
                let exact_dirac = case.eval(t_f, to_f64(r)).1;
                dirac_errors.push((evaluator.dirac_coefficient() - exact_dirac).abs());
            }
        }
        Ok((sups, dirac_errors))
    });

    let mut dirac_rows = Vec::new();
    for (t, row) in config.t_values.iter().zip(rows) {
        let (sups, dirac_errors) = row?;
        out.push_str(&sci(to_f64(t)));
        for sup in sups {
            out.push(',');
            out.push_str(&sci(sup));
        }
        out.push('\n');
        if !dirac_errors.is_empty() {
            dirac_rows.push((to_f64(t), dirac_errors));
        }
    }

    if !dirac_rows.is_empty() {
        out.push_str("# dirac channel: |djm dirac coefficient - exact dirac coefficient|\n");
        out.push_str("t");
        for n in &config.n_terms {
            out.push_str(&format!(",n={n}"));
        }
        out.push('\n');
        for (t, errors) in dirac_rows {
            out.push_str(&sci(t));
            for e in errors {
                out.push(',');
                out.push_str(&sci(e));
            }
            out.push('\n');
        }
    }
    Ok(out)
}

/// Moments `mu_0, mu_1, mu_2` of the truncated series against a reference:
/// the exact solution's moments where one exists, otherwise the moments of
/// the next-lower truncation (the usual consistency display for the
/// aggregation-breakage cases).
pub fn run_moments(config: &CaseConfig) -> Result<String, ReportError> {
    config.validate()?;
    let order = config.max_terms();
    let series = series_for(config, order)?;
    let phi = series.partial_sum(order as usize);
    let case = exact_case(config)?;
    let radius = config.r_value.clone();

    let mut out = preamble(config, OutputKind::Moments);
    out.push_str(&format!("# djm moments: exact moments of the {order}-term series\n"));
    match &case {
        Some(_) => out.push_str("# reference: moments of the closed-form solution\n"),
        None => out.push_str(&format!(
            "# reference: moments of the {}-term series\n",
            order.saturating_sub(1)
        )),
    }
    out.push_str("t,mu0_djm,mu1_djm,mu2_djm,mu0_ref,mu1_ref,mu2_ref\n");

    let djm_polys: Vec<_> = (0..=2u32)
        .map(|j| phi.total_moment(j))
        .collect::<Result<_, _>>()?;
    let ref_polys: Option<Vec<_>> = match &case {
        Some(_) => None,
        None => {
            let prev = series.partial_sum(order.saturating_sub(1) as usize);
            Some(
                (0..=2u32)
                    .map(|j| prev.total_moment(j))
                    .collect::<Result<_, _>>()?,
            )
        }
    };

    for t in &config.t_values {
        let t_f = to_f64(t);
        out.push_str(&sci(t_f));
        for poly in &djm_polys {
            let value = poly.eval(t, radius.as_ref())?;
            out.push(',');
            out.push_str(&sci(to_f64(&value)));
        }
        for j in 0..=2u32 {
            let reference = match &case {
                Some(case) => case.moment(j, t_f)?,
                None => {
                    let polys = ref_polys.as_ref().expect("set above");
                    to_f64(&polys[j as usize].eval(t, radius.as_ref())?)
                }
            };
            out.push(',');
            out.push_str(&sci(reference));
        }
        out.push('\n');
    }
    Ok(out)
}

/// Series against the grid oracle: `t, u, djm_n, oracle, abs_diff`, plus a
/// successive-truncation section per time with `|Phi_j - Phi_n|` for every
/// configured order `j < n`.
pub fn run_oracle_compare(config: &CaseConfig) -> Result<String, ReportError> {
    config.validate()?;
    let spec = config.problem.to_spec()?;
    if spec.initial().has_distributional_terms() {
        return Err(ReportError::OracleNeedsSmoothInitial);
    }
    let order = config.max_terms();
    let series = djm::compute_series(&spec, order as usize)?;
    let phi = series.partial_sum(order as usize);
    let grid = config.u_grid();

    // advance the oracle once through the sorted set of requested times
    let mut sorted_times: Vec<Rational> = config.t_values.clone();
    sorted_times.sort();
    sorted_times.dedup();
    let mut states: BTreeMap<Rational, GridState> = BTreeMap::new();
    let mut state = GridState::init(ORACLE_U_MAX, ORACLE_CELLS, spec.initial())?;
    for t in &sorted_times {
        let target = t.to_f64().unwrap_or_else(|| to_f64(t));
        state = state.advance(&spec, ORACLE_DT, target)?;
        states.insert(t.clone(), state.clone());
    }

    let mut out = preamble(config, OutputKind::OracleCompare);
    out.push_str(&format!(
        "# oracle: midpoint-quadrature RK4 grid, u_max={ORACLE_U_MAX}, n_cells={ORACLE_CELLS}, dt={ORACLE_DT}\n"
    ));
    out.push_str(&format!("# djm_n: smooth value of the {order}-term series\n"));
    out.push_str("t,u,djm_n,oracle,abs_diff\n");
    for t in &config.t_values {
        let evaluator = phi.evaluator(t, None)?;
        let oracle_state = states.get(t).expect("advanced above");
        for u in &grid {
            let (djm, _) = evaluator.eval(u);
            let sampled = oracle_state.sample(to_f64(u));
            out.push_str(&sci(to_f64(t)));
            out.push(',');
            out.push_str(&sci(to_f64(u)));
            out.push(',');
            out.push_str(&sci(djm));
            out.push(',');
            out.push_str(&sci(sampled));
            out.push(',');
            out.push_str(&sci((djm - sampled).abs()));
            out.push('\n');
        }
    }

    let lower_orders: Vec<u32> = config
        .n_terms
        .iter()
        .copied()
        .filter(|&j| j < order)
        .collect();
    if !lower_orders.is_empty() {
        for t in &config.t_values {
            out.push_str(&format!(
                "# successive truncation at t = {}: |Phi_j - Phi_{order}|\n",
                sci(to_f64(t))
            ));
            out.push_str("u");
            for j in &lower_orders {
                out.push_str(&format!(",diff_phi_{j}"));
            }
            out.push('\n');
            let full = phi.evaluator(t, None)?;
            let partial: Vec<_> = lower_orders
                .iter()
                .map(|&j| series.partial_sum(j as usize).evaluator(t, None))
                .collect::<Result<_, _>>()?;
            for u in &grid {
                let (reference, _) = full.eval(u);
                out.push_str(&sci(to_f64(u)));
                for evaluator in &partial {
                    let (value, _) = evaluator.eval(u);
                    out.push(',');
                    out.push_str(&sci((value - reference).abs()));
                }
                out.push('\n');
            }
        }
    }
    Ok(out)
}

/// Produces every artifact the configuration requests, in a fixed order.
pub fn run_all(config: &CaseConfig) -> Result<Vec<(OutputKind, String)>, ReportError> {
    config.validate()?;
    let mut artifacts = Vec::new();
    for output in &config.outputs {
        let text = match output {
            OutputKind::Density => run_density(config)?,
            OutputKind::ErrorTable => run_error_table(config)?,
            OutputKind::Moments => run_moments(config)?,
            OutputKind::OracleCompare => run_oracle_compare(config)?,
        };
        artifacts.push((*output, text));
    }
    Ok(artifacts)
}
