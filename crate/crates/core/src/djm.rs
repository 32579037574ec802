//! The Daftardar-Jafari recursion over the term algebra.
//!
//! For the autonomous problems treated here the initial datum is the zeroth
//! component, the linear breakage operator feeds each next component, and the
//! quadratic aggregation operator enters through telescoped increments
//! `G_m = N(S_m) - N(S_{m-1})` of the partial sums. Every component stays in
//! the exact term class, so the recursion is carried with no rounding at all.

use num_traits::One;
use thiserror::Error;

use crate::algebra::{AlgebraError, Expr, TPoly, Term};
use crate::rational::{factorial, rat_int, Rational};

/// Default cap on the term count of a single component. Aggregation runs
/// grow combinatorially with the order, and the failure must be explicit
/// rather than a silent truncation.
pub const DEFAULT_TERM_CAP: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("component {component} has {count} terms, exceeding the cap of {cap}")]
    TermBlowup {
        component: usize,
        count: usize,
        cap: usize,
    },
    #[error("unknown example id {0} (expected 1..=6)")]
    UnknownExample(u8),
    #[error("invalid problem specification: {0}")]
    InvalidSpec(String),
}

/// Aggregation kernel selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregation {
    /// Pure breakage.
    None,
    /// Constant unit kernel `K(u, v) = 1`.
    ConstantUnit,
}

/// One solvable problem: selection power `k` in `S(v) = v^k`, binary uniform
/// breakage `B(u, v) = 2/v` (fixed), optional constant aggregation, and the
/// initial number density.
///
/// The built-in breakage kernel satisfies the fragment-count and
/// volume-conservation constraints by construction:
/// `int_0^v (2/v) du = 2` and `int_0^v u (2/v) du = v`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    selection_power: u32,
    aggregation: Aggregation,
    initial: Expr,
    has_radius: bool,
}

impl ProblemSpec {
    pub fn new(
        selection_power: u32,
        aggregation: Aggregation,
        initial: Expr,
        has_radius: bool,
    ) -> Result<Self, EngineError> {
        if selection_power == 0 {
            return Err(EngineError::InvalidSpec(
                "selection power must be positive".into(),
            ));
        }
        if initial.references_radius() && !has_radius {
            return Err(EngineError::InvalidSpec(
                "initial condition references r but the spec declares no radius".into(),
            ));
        }
        if aggregation == Aggregation::ConstantUnit {
            if initial.has_distributional_terms() {
                return Err(EngineError::Algebra(AlgebraError::UnsupportedClass(
                    "aggregation with distributional initial data",
                )));
            }
            if initial.exp_rates().len() > 1 {
                return Err(EngineError::Algebra(AlgebraError::MixedRates));
            }
        }
        Ok(ProblemSpec {
            selection_power,
            aggregation,
            initial,
            has_radius,
        })
    }

    pub fn pure_breakage(selection_power: u32, initial: Expr) -> Result<Self, EngineError> {
        let has_radius = initial.references_radius();
        ProblemSpec::new(selection_power, Aggregation::None, initial, has_radius)
    }

    /// The six built-in test cases:
    ///
    /// 1. `S(v) = v`,   `c_in = e^{-u}`
    /// 2. `S(v) = v^2`, `c_in = e^{-u}`
    /// 3. `S(v) = v`,   `c_in = delta(u - r)`
    /// 4. `S(v) = v^2`, `c_in = delta(u - r)`
    /// 5. `S(v) = v`,   `c_in = e^{-u}`,     constant aggregation
    /// 6. `S(v) = v`,   `c_in = 4u e^{-2u}`, constant aggregation
    pub fn example(id: u8) -> Result<Self, EngineError> {
        let exp_neg_u = Expr::from_term(Term::smooth(Rational::one(), 0, 0, rat_int(1)));
        let monodisperse = Expr::from_term(Term::dirac(Rational::one(), 0, 0));
        let scaled = Expr::from_term(Term::smooth(rat_int(4), 0, 1, rat_int(2)));
        match id {
            1 => ProblemSpec::new(1, Aggregation::None, exp_neg_u, false),
            2 => ProblemSpec::new(2, Aggregation::None, exp_neg_u, false),
            3 => ProblemSpec::new(1, Aggregation::None, monodisperse, true),
            4 => ProblemSpec::new(2, Aggregation::None, monodisperse, true),
            5 => ProblemSpec::new(1, Aggregation::ConstantUnit, exp_neg_u, false),
            6 => ProblemSpec::new(1, Aggregation::ConstantUnit, scaled, false),
            other => Err(EngineError::UnknownExample(other)),
        }
    }

    pub fn selection_power(&self) -> u32 {
        self.selection_power
    }

    pub fn aggregation(&self) -> Aggregation {
        self.aggregation
    }

    pub fn initial(&self) -> &Expr {
        &self.initial
    }

    pub fn has_radius(&self) -> bool {
        self.has_radius
    }

    /// The in-scope test matrix covers `k` in {1, 2}; other powers run but
    /// are unvalidated.
    pub fn is_validated_selection(&self) -> bool {
        matches!(self.selection_power, 1 | 2)
    }
}

/// Components `c_0..c_n` and partial sums `Phi_0..Phi_n` of one series run.
#[derive(Debug, Clone)]
pub struct SeriesSolution {
    spec: ProblemSpec,
    components: Vec<Expr>,
    partial_sums: Vec<Expr>,
}

impl SeriesSolution {
    pub fn spec(&self) -> &ProblemSpec {
        &self.spec
    }

    pub fn order(&self) -> usize {
        self.components.len() - 1
    }

    pub fn components(&self) -> &[Expr] {
        &self.components
    }

    pub fn partial_sums(&self) -> &[Expr] {
        &self.partial_sums
    }

    pub fn component(&self, m: usize) -> &Expr {
        &self.components[m]
    }

    pub fn partial_sum(&self, n: usize) -> &Expr {
        &self.partial_sums[n]
    }
}

/// The breakage right-hand side `2 int_u^inf v^{k-1} c dv - u^k c`, exactly.
pub fn breakage_rhs(spec: &ProblemSpec, c: &Expr) -> Result<Expr, AlgebraError> {
    let k = spec.selection_power;
    let birth = c.tail_integral(k - 1)?.scale(&rat_int(2));
    let death = c.shift_u_power(k);
    Ok(birth.sub(&death))
}

/// The `m`-th telescoped aggregation increment `G_m = N(S_m) - N(S_{m-1})`
/// with `N(c) = 1/2 c*c - c mu_0(c)`, computed by bilinear expansion:
///
/// `G_m = 1/2 c_m * (S_m + S_{m-1}) - c_m mu_0(S_m) - S_{m-1} mu_0(c_m)`.
///
/// `components` is `c_0..c_m`; `G_0 = N(c_0)`.
pub fn aggregation_g(spec: &ProblemSpec, components: &[Expr]) -> Result<Expr, AlgebraError> {
    assert!(
        spec.aggregation == Aggregation::ConstantUnit,
        "aggregation increment of a pure-breakage problem"
    );
    assert!(!components.is_empty());
    let mut prev_sum = Expr::empty();
    for c in &components[..components.len() - 1] {
        prev_sum = prev_sum.add(c);
    }
    let newest = components.last().expect("nonempty");
    let sum = prev_sum.add(newest);
    aggregation_g_inner(newest, &sum, &prev_sum)
}

fn aggregation_g_inner(
    newest: &Expr,
    sum: &Expr,
    prev_sum: &Expr,
) -> Result<Expr, AlgebraError> {
    let half = Rational::new(1.into(), 2.into());
    let birth = newest.convolve(&sum.add(prev_sum))?.scale(&half);
    let death_a = newest.mul_tpoly(&sum.total_moment(0)?);
    let death_b = prev_sum.mul_tpoly(&newest.total_moment(0)?);
    Ok(birth.sub(&death_a).sub(&death_b))
}

/// Literal `N(S_m) - N(S_{m-1})`; used to cross-check the bilinear expansion.
pub fn aggregation_g_naive(
    spec: &ProblemSpec,
    components: &[Expr],
) -> Result<Expr, AlgebraError> {
    assert!(spec.aggregation == Aggregation::ConstantUnit);
    let nonlinear = |c: &Expr| -> Result<Expr, AlgebraError> {
        let half = Rational::new(1.into(), 2.into());
        let birth = c.convolve(c)?.scale(&half);
        Ok(birth.sub(&c.mul_tpoly(&c.total_moment(0)?)))
    };
    let mut prev_sum = Expr::empty();
    for c in &components[..components.len() - 1] {
        prev_sum = prev_sum.add(c);
    }
    let sum = prev_sum.add(components.last().expect("nonempty"));
    if prev_sum.is_empty() {
        nonlinear(&sum)
    } else {
        Ok(nonlinear(&sum)?.sub(&nonlinear(&prev_sum)?))
    }
}

/// Next component `c_{m+1} = L^{-1}(breakage(c_m) + G_m)`.
///
/// The antiderivative constant is zero: the initial datum lives entirely in
/// `c_0`, and every iterate is polynomial in `t`.
pub fn next_component(spec: &ProblemSpec, components: &[Expr]) -> Result<Expr, EngineError> {
    assert!(!components.is_empty(), "series must start from c_0");
    let newest = components.last().expect("nonempty");
    let mut rhs = breakage_rhs(spec, newest)?;
    if spec.aggregation == Aggregation::ConstantUnit {
        rhs = rhs.add(&aggregation_g(spec, components)?);
    }
    Ok(rhs.time_antiderivative())
}

/// Runs the recursion up to `c_n` with the default term-count cap.
pub fn compute_series(spec: &ProblemSpec, n: usize) -> Result<SeriesSolution, EngineError> {
    compute_series_with_cap(spec, n, DEFAULT_TERM_CAP)
}

/// Runs the recursion up to `c_n`, failing with [`EngineError::TermBlowup`]
/// if any component exceeds `term_cap` terms.
pub fn compute_series_with_cap(
    spec: &ProblemSpec,
    n: usize,
    term_cap: usize,
) -> Result<SeriesSolution, EngineError> {
    let mut components = vec![spec.initial.clone()];
    let mut partial_sums = vec![spec.initial.clone()];
    let mut prev_sum = Expr::empty();
    for m in 0..n {
        let newest = components.last().expect("nonempty");
        let mut rhs = breakage_rhs(spec, newest)?;
        if spec.aggregation == Aggregation::ConstantUnit {
            let sum = partial_sums.last().expect("nonempty");
            rhs = rhs.add(&aggregation_g_inner(newest, sum, &prev_sum)?);
        }
        let next = rhs.time_antiderivative();
        if next.len() > term_cap {
            return Err(EngineError::TermBlowup {
                component: m + 1,
                count: next.len(),
                cap: term_cap,
            });
        }
        prev_sum = partial_sums.last().expect("nonempty").clone();
        partial_sums.push(prev_sum.add(&next));
        components.push(next);
    }
    Ok(SeriesSolution {
        spec: spec.clone(),
        components,
        partial_sums,
    })
}

/// The printed general term of breakage examples 1-4, normalized.
///
/// Summands whose factorial index is negative (`(m-1)!` at `m = 0`,
/// `(m-2)!` below `m = 2`) are absent, which reproduces the printed
/// low-order components.
pub fn closed_form_term(example_id: u8, m: u32) -> Result<Expr, EngineError> {
    let sign = |p: u32| -> Rational {
        if p % 2 == 0 {
            Rational::one()
        } else {
            -Rational::one()
        }
    };
    let inv_factorial =
        |p: u32| -> Rational { Rational::new(1.into(), factorial(p)) };
    let mut terms: Vec<Term> = Vec::new();
    match example_id {
        // (-t)^m u^{m-2} e^{-u} (u^2 - 2mu + m(m-1)) / m!
        1 => {
            let lead = sign(m) * inv_factorial(m);
            terms.push(Term::smooth(lead.clone(), m, m, rat_int(1)));
            if m >= 1 {
                terms.push(Term::smooth(
                    &lead * rat_int(-2) * rat_int(m.into()),
                    m,
                    m - 1,
                    rat_int(1),
                ));
            }
            if m >= 2 {
                terms.push(Term::smooth(
                    &lead * rat_int(m.into()) * rat_int((m - 1).into()),
                    m,
                    m - 2,
                    rat_int(1),
                ));
            }
        }
        // (-t)^m u^{2m-2} e^{-u} (u^2 - 2mu - 2m) / m!
        2 => {
            let lead = sign(m) * inv_factorial(m);
            terms.push(Term::smooth(lead.clone(), m, 2 * m, rat_int(1)));
            if m >= 1 {
                terms.push(Term::smooth(
                    &lead * rat_int(-2) * rat_int(m.into()),
                    m,
                    2 * m - 1,
                    rat_int(1),
                ));
                terms.push(Term::smooth(
                    &lead * rat_int(-2) * rat_int(m.into()),
                    m,
                    2 * m - 2,
                    rat_int(1),
                ));
            }
        }
        // delta(u-r) (-ut)^m / m! + 2t theta(r-u) (-ut)^{m-1} / (m-1)!
        //   + t^2 (r-u) theta(r-u) (-ut)^{m-2} / (m-2)!
        3 => {
            terms.push(Term::dirac(sign(m) * inv_factorial(m), m, m));
            if m >= 1 {
                terms.push(Term::theta(
                    rat_int(2) * sign(m - 1) * inv_factorial(m - 1),
                    m,
                    m - 1,
                    0,
                ));
            }
            if m >= 2 {
                let lead = sign(m - 2) * inv_factorial(m - 2);
                terms.push(Term::theta(lead.clone(), m, m - 2, 1));
                terms.push(Term::theta(-lead, m, m - 1, 0));
            }
        }
        // delta(u-r) (-u^2 t)^m / m! + 2rt theta(r-u) (-u^2 t)^{m-1} / (m-1)!
        4 => {
            terms.push(Term::dirac(sign(m) * inv_factorial(m), m, 2 * m));
            if m >= 1 {
                terms.push(Term::theta(
                    rat_int(2) * sign(m - 1) * inv_factorial(m - 1),
                    m,
                    2 * (m - 1),
                    1,
                ));
            }
        }
        other => return Err(EngineError::UnknownExample(other)),
    }
    Ok(Expr::normalize(terms))
}

/// Degree-`n` truncation of `exp(-r t)` (`radius_power = 1`) or of
/// `exp(-r^p t)` in general: `sum_{m<=n} (-1)^m t^m r^{pm} / m!`.
pub fn exp_truncation(n: u32, radius_power: u32) -> TPoly {
    let mut p = TPoly::zero();
    for m in 0..=n {
        let sign = if m % 2 == 0 { 1 } else { -1 };
        p.add_coeff(
            m,
            radius_power * m,
            Rational::new(sign.into(), factorial(m)),
        );
    }
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn exp_neg_u() -> Expr {
        Expr::from_term(Term::smooth(Rational::one(), 0, 0, rat_int(1)))
    }

    #[test]
    fn breakage_rhs_linear_selection() {
        // k=1, c=e^{-u}: e^{-u}(2 - u)
        let spec = ProblemSpec::example(1).unwrap();
        let rhs = breakage_rhs(&spec, &exp_neg_u()).unwrap();
        let expected = Expr::normalize([
            Term::smooth(rat_int(2), 0, 0, rat_int(1)),
            Term::smooth(rat_int(-1), 0, 1, rat_int(1)),
        ]);
        assert_eq!(rhs, expected);
    }

    #[test]
    fn breakage_rhs_quadratic_selection() {
        // k=2, c=e^{-u}: e^{-u}(2u + 2 - u^2)
        let spec = ProblemSpec::example(2).unwrap();
        let rhs = breakage_rhs(&spec, &exp_neg_u()).unwrap();
        let expected = Expr::normalize([
            Term::smooth(rat_int(2), 0, 1, rat_int(1)),
            Term::smooth(rat_int(2), 0, 0, rat_int(1)),
            Term::smooth(rat_int(-1), 0, 2, rat_int(1)),
        ]);
        assert_eq!(rhs, expected);
    }

    #[test]
    fn breakage_rhs_monodisperse() {
        // k=1, c=delta(u-r): 2 theta(r-u) - r delta(u-r)
        let spec = ProblemSpec::example(3).unwrap();
        let rhs = breakage_rhs(&spec, spec.initial()).unwrap();
        let expected = Expr::normalize([
            Term::theta(rat_int(2), 0, 0, 0),
            Term::dirac(rat_int(-1), 0, 1),
        ]);
        assert_eq!(rhs, expected);
    }

    #[test]
    fn aggregation_increment_zeroth() {
        // G_0 for c_0 = e^{-u}: (1/2) u e^{-u} - e^{-u}
        let spec = ProblemSpec::example(5).unwrap();
        let g0 = aggregation_g(&spec, &[exp_neg_u()]).unwrap();
        let expected = Expr::normalize([
            Term::smooth(rat(1, 2), 0, 1, rat_int(1)),
            Term::smooth(rat_int(-1), 0, 0, rat_int(1)),
        ]);
        assert_eq!(g0, expected);
    }

    #[test]
    fn aggregation_increment_empty() {
        let spec = ProblemSpec::example(5).unwrap();
        assert_eq!(
            aggregation_g(&spec, &[Expr::empty()]).unwrap(),
            Expr::empty()
        );
    }

    #[test]
    fn aggregation_increment_scaled_initial() {
        // G_0 for c_0 = 4u e^{-2u}: (4/3) u^3 e^{-2u} - 4u e^{-2u}; the
        // printed first-order component is its time integral plus the
        // breakage bracket.
        let spec = ProblemSpec::example(6).unwrap();
        let c0 = spec.initial().clone();
        let g0 = aggregation_g(&spec, &[c0.clone()]).unwrap();
        let expected = Expr::normalize([
            Term::smooth(rat(4, 3), 0, 3, rat_int(2)),
            Term::smooth(rat_int(-4), 0, 1, rat_int(2)),
        ]);
        assert_eq!(g0, expected);

        // reconcile against the printed c_1 = t(-4 e^{-2u} u + (4/3) e^{-2u} u^3)
        //                                 + t(-4 e^{-2u} u^2 + e^{-2u} (2 + 4u))
        let c1 = next_component(&spec, &[c0]).unwrap();
        let printed = Expr::normalize([
            Term::smooth(rat_int(-4), 1, 1, rat_int(2)),
            Term::smooth(rat(4, 3), 1, 3, rat_int(2)),
            Term::smooth(rat_int(-4), 1, 2, rat_int(2)),
            Term::smooth(rat_int(2), 1, 0, rat_int(2)),
            Term::smooth(rat_int(4), 1, 1, rat_int(2)),
        ]);
        assert_eq!(c1, printed);
    }

    #[test]
    fn bilinear_expansion_matches_naive_telescoping() {
        for example in [5u8, 6] {
            let spec = ProblemSpec::example(example).unwrap();
            let series = compute_series(&spec, 5).unwrap();
            for m in 0..=5usize {
                let comps = &series.components()[..=m];
                assert_eq!(
                    aggregation_g(&spec, comps).unwrap(),
                    aggregation_g_naive(&spec, comps).unwrap(),
                    "example {example}, m={m}"
                );
            }
        }
    }

    #[test]
    fn next_component_examples() {
        let spec = ProblemSpec::example(1).unwrap();
        let c1 = next_component(&spec, &[exp_neg_u()]).unwrap();
        assert_eq!(c1, closed_form_term(1, 1).unwrap());

        let spec4 = ProblemSpec::example(4).unwrap();
        let c1 = next_component(&spec4, &[spec4.initial().clone()]).unwrap();
        let expected = Expr::normalize([
            Term::dirac(rat_int(-1), 1, 2),
            Term::theta(rat_int(2), 1, 0, 1),
        ]);
        assert_eq!(c1, expected);

        let empty_spec = ProblemSpec::pure_breakage(1, Expr::empty()).unwrap();
        let series = compute_series(&empty_spec, 4).unwrap();
        for c in series.components() {
            assert!(c.is_empty());
        }
    }

    #[test]
    fn compute_series_printed_components() {
        // example 1, c_2 = (t^2/2) e^{-u} (u^2 - 4u + 2)
        let series = compute_series(&ProblemSpec::example(1).unwrap(), 2).unwrap();
        let expected = Expr::normalize([
            Term::smooth(rat(1, 2), 2, 2, rat_int(1)),
            Term::smooth(rat_int(-2), 2, 1, rat_int(1)),
            Term::smooth(rat_int(1), 2, 0, rat_int(1)),
        ]);
        assert_eq!(series.component(2), &expected);

        // example 2, c_2 = (t^2/2) u^2 e^{-u} (u^2 - 4u - 4)
        let series = compute_series(&ProblemSpec::example(2).unwrap(), 2).unwrap();
        let expected = Expr::normalize([
            Term::smooth(rat(1, 2), 2, 4, rat_int(1)),
            Term::smooth(rat_int(-2), 2, 3, rat_int(1)),
            Term::smooth(rat_int(-2), 2, 2, rat_int(1)),
        ]);
        assert_eq!(series.component(2), &expected);

        // n = 0 is just the initial condition
        let spec = ProblemSpec::example(3).unwrap();
        let series = compute_series(&spec, 0).unwrap();
        assert_eq!(series.partial_sum(0), spec.initial());
    }

    #[test]
    fn partial_sums_telescope() {
        let series = compute_series(&ProblemSpec::example(5).unwrap(), 4).unwrap();
        for m in 1..=4usize {
            let rebuilt = series.partial_sum(m - 1).add(series.component(m));
            assert_eq!(&rebuilt, series.partial_sum(m));
        }
    }

    #[test]
    fn closed_form_examples() {
        // (1, 1) -> -t e^{-u} (u - 2)
        let expected = Expr::normalize([
            Term::smooth(rat_int(-1), 1, 1, rat_int(1)),
            Term::smooth(rat_int(2), 1, 0, rat_int(1)),
        ]);
        assert_eq!(closed_form_term(1, 1).unwrap(), expected);

        // (4, 2) -> (t^2/2) r^4 delta(u-r) - 2 r t^2 u^2 theta(r-u)
        let expected = Expr::normalize([
            Term::dirac(rat(1, 2), 2, 4),
            Term::theta(rat_int(-2), 2, 2, 1),
        ]);
        assert_eq!(closed_form_term(4, 2).unwrap(), expected);

        // (3, 2) -> delta (ut)^2/2 + 2t theta (-ut) + t^2 (r-u) theta
        let expected = Expr::normalize([
            Term::dirac(rat(1, 2), 2, 2),
            Term::theta(rat_int(-2), 2, 1, 0),
            Term::theta(rat_int(1), 2, 0, 1),
            Term::theta(rat_int(-1), 2, 1, 0),
        ]);
        assert_eq!(closed_form_term(3, 2).unwrap(), expected);

        assert_eq!(
            closed_form_term(7, 0),
            Err(EngineError::UnknownExample(7))
        );
    }

    #[test]
    fn closed_form_zeroth_terms_are_the_initial_data() {
        for id in 1..=4u8 {
            let spec = ProblemSpec::example(id).unwrap();
            assert_eq!(&closed_form_term(id, 0).unwrap(), spec.initial());
        }
    }

    #[test]
    fn recursion_matches_closed_forms_small_order() {
        for id in 1..=4u8 {
            let spec = ProblemSpec::example(id).unwrap();
            let series = compute_series(&spec, 6).unwrap();
            for m in 0..=6u32 {
                assert_eq!(
                    series.component(m as usize),
                    &closed_form_term(id, m).unwrap(),
                    "example {id}, m={m}"
                );
            }
        }
    }

    #[test]
    fn printed_abe_components_example5() {
        // c_1 = t(2e^{-u} - e^{-u}u) + t(-e^{-u} + e^{-u}u/2)
        let spec = ProblemSpec::example(5).unwrap();
        let series = compute_series(&spec, 2).unwrap();
        let printed_c1 = Expr::normalize([
            Term::smooth(rat_int(2), 1, 0, rat_int(1)),
            Term::smooth(rat_int(-1), 1, 1, rat_int(1)),
            Term::smooth(rat_int(-1), 1, 0, rat_int(1)),
            Term::smooth(rat(1, 2), 1, 1, rat_int(1)),
        ]);
        assert_eq!(series.component(1), &printed_c1);

        // c_2 = (1/4)e^{-u}t^2(2-4u+u^2) - t(-e^{-u} + e^{-u}u/2)
        //     + (1/144)e^{-u}t(72(-2+u) - 18t(6+(-6+u)u) + t^2(-24+(-6+u)^2 u))
        let c = rat(1, 144);
        let printed_c2 = Expr::normalize([
            // (1/4) t^2 (2 - 4u + u^2)
            Term::smooth(rat(1, 2), 2, 0, rat_int(1)),
            Term::smooth(rat_int(-1), 2, 1, rat_int(1)),
            Term::smooth(rat(1, 4), 2, 2, rat_int(1)),
            // -t(-1 + u/2)
            Term::smooth(rat_int(1), 1, 0, rat_int(1)),
            Term::smooth(rat(-1, 2), 1, 1, rat_int(1)),
            // (1/144) t * 72(-2 + u)
            Term::smooth(&c * rat_int(-144), 1, 0, rat_int(1)),
            Term::smooth(&c * rat_int(72), 1, 1, rat_int(1)),
            // (1/144) t * (-18t)(6 - 6u + u^2)
            Term::smooth(&c * rat_int(-108), 2, 0, rat_int(1)),
            Term::smooth(&c * rat_int(108), 2, 1, rat_int(1)),
            Term::smooth(&c * rat_int(-18), 2, 2, rat_int(1)),
            // (1/144) t * t^2 (-24 + u(36 - 12u + u^2))
            Term::smooth(&c * rat_int(-24), 3, 0, rat_int(1)),
            Term::smooth(&c * rat_int(36), 3, 1, rat_int(1)),
            Term::smooth(&c * rat_int(-12), 3, 2, rat_int(1)),
            Term::smooth(c.clone(), 3, 3, rat_int(1)),
        ]);
        assert_eq!(series.component(2), &printed_c2);
    }

    #[test]
    fn term_blowup_is_reported() {
        let spec = ProblemSpec::example(5).unwrap();
        let err = compute_series_with_cap(&spec, 6, 10).unwrap_err();
        assert!(matches!(err, EngineError::TermBlowup { .. }));
    }

    #[test]
    fn aggregation_rejects_distributional_initial_data() {
        let monodisperse = Expr::from_term(Term::dirac(Rational::one(), 0, 0));
        let err =
            ProblemSpec::new(1, Aggregation::ConstantUnit, monodisperse, true).unwrap_err();
        assert_eq!(
            err,
            EngineError::Algebra(AlgebraError::UnsupportedClass(
                "aggregation with distributional initial data"
            ))
        );
    }

    #[test]
    fn mass_conservation_small_order() {
        for id in 1..=6u8 {
            let spec = ProblemSpec::example(id).unwrap();
            let series = compute_series(&spec, 5).unwrap();
            for m in 1..=5usize {
                let mu1 = series.component(m).total_moment(1).unwrap();
                assert!(mu1.is_zero(), "example {id}, m={m}: {mu1:?}");
            }
        }
    }

    #[test]
    fn zeroth_moment_structure_linear_breakage() {
        // k=1, c_in = e^{-u}: mu_0(Phi_n) = 1 + t exactly for n >= 1
        let spec = ProblemSpec::example(1).unwrap();
        let series = compute_series(&spec, 8).unwrap();
        let expected = TPoly::from_coeffs([
            ((0, 0), Rational::one()),
            ((1, 0), Rational::one()),
        ]);
        for n in 1..=8usize {
            assert_eq!(series.partial_sum(n).total_moment(0).unwrap(), expected);
        }
    }

    #[test]
    fn determinism() {
        let spec = ProblemSpec::example(5).unwrap();
        let a = compute_series(&spec, 4).unwrap();
        let b = compute_series(&spec, 4).unwrap();
        assert_eq!(a.components(), b.components());
    }

    #[test]
    fn exp_truncation_matches_dirac_channel() {
        let series = compute_series(&ProblemSpec::example(3).unwrap(), 6).unwrap();
        let channel = series.partial_sum(6).dirac_component().unwrap();
        assert_eq!(channel, exp_truncation(6, 1));

        let series = compute_series(&ProblemSpec::example(4).unwrap(), 6).unwrap();
        let channel = series.partial_sum(6).dirac_component().unwrap();
        assert_eq!(channel, exp_truncation(6, 2));
    }
}
