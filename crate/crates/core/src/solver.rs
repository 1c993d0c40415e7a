//! The constructive pipeline: trace elimination followed by the 15×15 system.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::DegeneracyPolicy;
use crate::oracle::apply_lhs;
use crate::params::ParameterSet;
use crate::perm_system::{ADiagnostics, PermSystem};
use crate::rhs::RhsBundle;
use crate::tensor::{LeviCivita, Metric, Rank3Tensor};
use crate::trace_system::{compute_source_traces, GammaDiagnostics, TraceSystem};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveConfig {
    pub policy: DegeneracyPolicy,
    /// Largest accepted `‖L(N) − B‖_F / ‖B‖_F`.
    pub residual_tol: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            policy: DegeneracyPolicy::default(),
            residual_tol: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Solved,
    DegenerateGamma,
    DegenerateA,
    ResidualTooLarge,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Solved => "solved",
            Status::DegenerateGamma => "degenerate_gamma",
            Status::DegenerateA => "degenerate_a",
            Status::ResidualTooLarge => "residual_too_large",
        }
    }
}

/// Outcome of one solve. The solution is withheld unless the status is
/// [`Status::Solved`].
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub solution: Option<Rank3Tensor>,
    pub det_gamma: f64,
    pub det_a: f64,
    pub rcond_gamma: f64,
    pub rcond_a: f64,
    pub residual_rel: Option<f64>,
    pub status: Status,
}

impl SolveReport {
    pub fn is_solved(&self) -> bool {
        self.status == Status::Solved
    }
}

/// Pipeline checkpoints, reported to an observer as they complete.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Gamma,
    PermSystem,
    Traces,
    Sources,
    Extract,
    Residual,
}

/// Floor on `‖B‖_F` in the relative residual.
pub const NORM_FLOOR: f64 = 1e-300;

/// `‖L(N) − B‖_F / max(‖B‖_F, 1e-300)`, with `L` evaluated directly.
pub fn residual(
    p: &ParameterSet,
    g: &Metric,
    eps: &LeviCivita,
    n: &Rank3Tensor,
    b: &Rank3Tensor,
) -> f64 {
    let r = apply_lhs(p, g, eps, n) - *b;
    r.frobenius() / b.frobenius().max(NORM_FLOOR)
}

pub fn solve(p: &ParameterSet, g: &Metric, b: &Rank3Tensor, cfg: &SolveConfig) -> SolveReport {
    solve_observed(p, g, b, cfg, &mut |_| {})
}

/// [`solve`], calling `observe` after each stage.
pub fn solve_observed(
    p: &ParameterSet,
    g: &Metric,
    b: &Rank3Tensor,
    cfg: &SolveConfig,
    observe: &mut dyn FnMut(Stage),
) -> SolveReport {
    let s = g.sign_factor();
    let gamma = GammaDiagnostics::new(p, s);
    let a = ADiagnostics::new(p, s);
    let mut report = SolveReport {
        solution: None,
        det_gamma: gamma.det,
        det_a: a.det,
        rcond_gamma: gamma.rcond,
        rcond_a: a.rcond,
        residual_rel: None,
        status: Status::Solved,
    };

    let ts = match TraceSystem::from_diagnostics(gamma, s, &cfg.policy) {
        Ok(ts) => ts,
        Err(_) => {
            report.status = Status::DegenerateGamma;
            return report;
        }
    };
    observe(Stage::Gamma);
    let ps = match PermSystem::from_diagnostics(a, &cfg.policy) {
        Ok(ps) => ps,
        Err(_) => {
            report.status = Status::DegenerateA;
            return report;
        }
    };
    observe(Stage::PermSystem);

    if b.max_abs() == 0.0 {
        report.solution = Some(Rank3Tensor::ZERO);
        report.residual_rel = Some(0.0);
        return report;
    }

    let eps = LeviCivita::new(g);
    let source = compute_source_traces(b, g, &eps);
    observe(Stage::Traces);
    let bundle = RhsBundle::from_source_traces(b, &source, p, &ts, g, &eps);
    observe(Stage::Sources);
    let n = ps.extract_solution(&bundle);
    observe(Stage::Extract);
    let res = residual(p, g, &eps, &n, b);
    observe(Stage::Residual);
    report.residual_rel = Some(res);
    if res.is_finite() && res <= cfg.residual_tol {
        report.solution = Some(n);
    } else {
        report.status = Status::ResidualTooLarge;
    }
    report
}

/// One problem: coefficients, metric and source.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub params: ParameterSet,
    pub metric: Metric,
    pub source: Rank3Tensor,
}

impl Instance {
    /// Thirty coefficients then 64 source components, all uniform in
    /// `[−scale, scale]`, drawn from one seeded stream.
    pub fn random(seed: u64, scale: f64, metric: Metric) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = ParameterSet::random_with(&mut rng, scale);
        let source = uniform_tensor(&mut rng, scale);
        Self {
            params,
            metric,
            source,
        }
    }

    pub fn solve(&self, cfg: &SolveConfig) -> SolveReport {
        solve(&self.params, &self.metric, &self.source, cfg)
    }
}

/// Solves each instance independently, preserving order.
pub fn batch_solve(instances: &[Instance], cfg: &SolveConfig) -> Vec<SolveReport> {
    instances.iter().map(|i| i.solve(cfg)).collect()
}

/// Draws parameter sets from `seed` until both Γ and A pass the gate.
/// Returns the accepted set and the number of rejected draws.
pub fn random_solvable_params(
    seed: u64,
    scale: f64,
    sign_factor: f64,
    policy: &DegeneracyPolicy,
) -> (ParameterSet, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rejected = 0;
    loop {
        let p = ParameterSet::random_with(&mut rng, scale);
        let ok = TraceSystem::new(&p, sign_factor, policy).is_ok()
            && PermSystem::new(&p, sign_factor, policy).is_ok();
        if ok {
            return (p, rejected);
        }
        rejected += 1;
        assert!(scale > 0.0, "a zero parameter set is never solvable");
    }
}

/// A source tensor with i.i.d. uniform components in `[−scale, scale]`.
pub fn random_tensor(seed: u64, scale: f64) -> Rank3Tensor {
    uniform_tensor(&mut ChaCha8Rng::seed_from_u64(seed), scale)
}

fn uniform_tensor<R: Rng + ?Sized>(rng: &mut R, scale: f64) -> Rank3Tensor {
    let mut t = Rank3Tensor::ZERO;
    if scale > 0.0 {
        for x in t.0.iter_mut() {
            *x = rng.gen_range(-scale..=scale);
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::oracle_solve;

    #[test]
    fn identity_returns_source() {
        let b = random_tensor(1, 1.0);
        let r = solve(
            &ParameterSet::identity(),
            &Metric::minkowski(),
            &b,
            &SolveConfig::default(),
        );
        assert_eq!(r.status, Status::Solved);
        assert!((r.solution.unwrap() - b).max_abs() < 1e-15);
    }

    #[test]
    fn matches_oracle_on_random_instances() {
        let cfg = SolveConfig::default();
        for seed in 0..5 {
            for g in [Metric::euclidean(), Metric::minkowski()] {
                let (p, _) = random_solvable_params(seed, 1.0, g.sign_factor(), &cfg.policy);
                let b = random_tensor(seed + 100, 1.0);
                let r = solve(&p, &g, &b, &cfg);
                assert_eq!(r.status, Status::Solved, "seed {seed}");
                let o = oracle_solve(&p, &g, &b).unwrap();
                let n = r.solution.unwrap();
                assert!((n - o).max_abs() < 1e-8 * o.max_abs().max(1.0));
            }
        }
    }

    #[test]
    fn zero_params_report_degenerate_gamma() {
        let r = solve(
            &ParameterSet::ZERO,
            &Metric::euclidean(),
            &random_tensor(2, 1.0),
            &SolveConfig::default(),
        );
        assert_eq!(r.status, Status::DegenerateGamma);
        assert!(r.solution.is_none());
        assert_eq!(r.det_gamma, 0.0);
    }

    #[test]
    fn zero_source_short_circuits_after_gates() {
        let (p, _) = random_solvable_params(3, 1.0, 1.0, &DegeneracyPolicy::default());
        let r = solve(
            &p,
            &Metric::euclidean(),
            &Rank3Tensor::ZERO,
            &SolveConfig::default(),
        );
        assert_eq!(r.solution, Some(Rank3Tensor::ZERO));
        assert_eq!(r.residual_rel, Some(0.0));
    }

    #[test]
    fn observer_sees_every_stage() {
        let mut seen = Vec::new();
        let b = random_tensor(4, 1.0);
        solve_observed(
            &ParameterSet::identity(),
            &Metric::euclidean(),
            &b,
            &SolveConfig::default(),
            &mut |s| seen.push(s),
        );
        assert_eq!(
            seen,
            [
                Stage::Gamma,
                Stage::PermSystem,
                Stage::Traces,
                Stage::Sources,
                Stage::Extract,
                Stage::Residual
            ]
        );
    }

    #[test]
    fn batch_agrees_with_single() {
        let cfg = SolveConfig::default();
        assert!(batch_solve(&[], &cfg).is_empty());
        let instances: Vec<_> = (0..4)
            .map(|k| {
                let metric = if k % 2 == 0 {
                    Metric::euclidean()
                } else {
                    Metric::minkowski()
                };
                let (params, _) = random_solvable_params(k, 1.0, metric.sign_factor(), &cfg.policy);
                Instance {
                    params,
                    metric,
                    source: random_tensor(k + 50, 1.0),
                }
            })
            .collect();
        let batch = batch_solve(&instances, &cfg);
        for (i, r) in instances.iter().zip(&batch) {
            assert_eq!(r, &solve(&i.params, &i.metric, &i.source, &cfg));
        }
    }

    #[test]
    fn residual_of_perturbed_solution() {
        let g = Metric::euclidean();
        let eps = LeviCivita::new(&g);
        let p = ParameterSet::identity();
        let b = random_tensor(6, 1.0);
        assert_eq!(residual(&p, &g, &eps, &b, &b), 0.0);
        let mut n = b;
        n.0[7] += 1.0;
        assert!((residual(&p, &g, &eps, &n, &b) - 1.0 / b.frobenius()).abs() < 1e-15);
    }

    #[test]
    fn hand_solved_trace_coupling() {
        // a₁ = 1, a₉₁ = 1/2: N = B − (1/3) B⁽¹⁾_α g_{μν}
        let g = Metric::euclidean();
        let mut p = ParameterSet::identity();
        p.a9[0] = 0.5;
        let b = random_tensor(7, 1.0);
        let t = crate::tensor::trace(&b, crate::tensor::TraceKind::First, &g);
        let expected = Rank3Tensor::from_fn(|a, m, n| b.get(a, m, n) - t[a] * g.lower(m, n) / 3.0);
        let r = solve(&p, &g, &b, &SolveConfig::default());
        assert!((r.solution.unwrap() - expected).max_abs() < 1e-14);
    }
}
