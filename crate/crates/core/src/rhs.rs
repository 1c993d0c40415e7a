//! Source-side tensors of the fifteen-equation system.
//!
//! After trace elimination the equation reduces to
//! `perms(N) + duals(N) = ĥ`. Contracting that reduced equation with
//! `ε^{αμ}{}_{βγ}`, `ε^{αν}{}_{βγ}` and `ε^{μν}{}_{βγ}` produces three more
//! source tensors, named breve, bar and ring below. Their trace corrections
//! use the already solved traces `Xᵢ = Σⱼ γ̃ᵢⱼ B⁽ʲ⁾`.

use crate::params::{Coupling, ParameterSet};
use crate::tensor::{
    dual, vector_wedge_metric, CoVector, DualKind, LeviCivita, Metric, Pattern, Rank3Tensor,
    WedgePattern,
};
use crate::trace_system::{compute_source_traces, TraceSet, TraceSystem};

/// Which source tensor a slot of the right-hand column reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Hat,
    Breve,
    Bar,
    Ring,
}

/// Layout of the fifteen-slot right-hand column.
pub const COLUMN_ORDER: [(Source, Pattern); 15] = [
    (Source::Hat, Pattern::AMN),
    (Source::Hat, Pattern::NAM),
    (Source::Hat, Pattern::MNA),
    (Source::Hat, Pattern::ANM),
    (Source::Hat, Pattern::NMA),
    (Source::Hat, Pattern::MAN),
    (Source::Breve, Pattern::AMN),
    (Source::Breve, Pattern::MNA),
    (Source::Breve, Pattern::NAM),
    (Source::Bar, Pattern::AMN),
    (Source::Bar, Pattern::MNA),
    (Source::Bar, Pattern::NAM),
    (Source::Ring, Pattern::AMN),
    (Source::Ring, Pattern::MNA),
    (Source::Ring, Pattern::NAM),
];

fn weighted(c: [f64; 3], x: &TraceSet) -> CoVector {
    c[0] * x[0] + c[1] * x[1] + c[2] * x[2]
}

/// `ĥ = B − Σᵢ (a₇ᵢ Xᵢ_μ g_{αν} + a₈ᵢ Xᵢ_ν g_{αμ} + a₉ᵢ Xᵢ_α g_{μν})
///        − ε^ρ{}_{αμν} Σ_{i≤3} bᵢ Xᵢ_ρ`, with `i` running over the three
/// traces and the pseudo-trace (`a₇₄ = c₁` …).
pub fn build_hat(
    b: &Rank3Tensor,
    solved: &TraceSet,
    p: &ParameterSet,
    g: &Metric,
    eps: &LeviCivita,
) -> Rank3Tensor {
    let mut mu_part = CoVector::ZERO;
    let mut nu_part = CoVector::ZERO;
    let mut alpha_part = CoVector::ZERO;
    for (i, x) in solved.iter().enumerate() {
        mu_part = mu_part + p.coupling(Coupling::Seven, i + 1) * *x;
        nu_part = nu_part + p.coupling(Coupling::Eight, i + 1) * *x;
        alpha_part = alpha_part + p.coupling(Coupling::Nine, i + 1) * *x;
    }
    let eps_part = weighted(p.b_vec, solved);

    let mut hat = *b;
    for a in 0..4 {
        for m in 0..4 {
            for n in 0..4 {
                let mut corr = mu_part[m] * g.lower(a, n)
                    + nu_part[n] * g.lower(a, m)
                    + alpha_part[a] * g.lower(m, n);
                for r in 0..4 {
                    corr += eps.up1(r, a, m, n) * eps_part[r];
                }
                hat[(a, m, n)] -= corr;
            }
        }
    }
    hat
}

/// `b̆_{αμν} = ε^{βγ}{}_{αμ} ĥ_{βγν} + 2(−1)^s (C·X)_{[α} g_{μ]ν}`.
pub fn build_breve(
    hat: &Rank3Tensor,
    solved: &TraceSet,
    p: &ParameterSet,
    g: &Metric,
    eps: &LeviCivita,
) -> Rank3Tensor {
    let b = |k, l| p.b(k, l);
    let c = [
        b(2, 1) + b(2, 3) + b(3, 1) + b(3, 3),
        b(1, 1) + b(1, 3) - b(3, 1) - b(3, 3),
        -(b(1, 1) + b(1, 3) + b(2, 1) + b(2, 3)),
    ];
    let s = eps.sign_factor();
    let contracted = dual(hat, DualKind::First, eps).permuted(Pattern::NAM);
    contracted + (2.0 * s) * vector_wedge_metric(&weighted(c, solved), g, WedgePattern::AlphaMuNu)
}

/// `b̄_{αμν} = ε^{βγ}{}_{αν} ĥ_{βμγ} − 2(−1)^s (D·X)_{[α} g_{ν]μ}`.
pub fn build_bar(
    hat: &Rank3Tensor,
    solved: &TraceSet,
    p: &ParameterSet,
    g: &Metric,
    eps: &LeviCivita,
) -> Rank3Tensor {
    let b = |k, l| p.b(k, l);
    let d = [
        b(2, 1) + b(2, 2) + b(3, 1) + b(3, 2),
        b(1, 1) + b(1, 2) - b(3, 1) - b(3, 2),
        -(b(1, 1) + b(1, 2) + b(2, 1) + b(2, 2)),
    ];
    let s = eps.sign_factor();
    let contracted = dual(hat, DualKind::Second, eps).permuted(Pattern::MAN);
    contracted - (2.0 * s) * vector_wedge_metric(&weighted(d, solved), g, WedgePattern::AlphaNuMu)
}

/// `r̊_{αμν} = ε^{βγ}{}_{μν} ĥ_{αβγ} + 2(−1)^s (R·X)_{[μ} g_{ν]α}`.
pub fn build_ring(
    hat: &Rank3Tensor,
    solved: &TraceSet,
    p: &ParameterSet,
    g: &Metric,
    eps: &LeviCivita,
) -> Rank3Tensor {
    let b = |k, l| p.b(k, l);
    let r = [
        b(2, 2) + b(2, 3) + b(3, 2) + b(3, 3),
        b(1, 2) + b(1, 3) - b(3, 2) - b(3, 3),
        -(b(2, 2) + b(2, 3) + b(1, 2) + b(1, 3)),
    ];
    let s = eps.sign_factor();
    let contracted = dual(hat, DualKind::Third, eps);
    contracted + (2.0 * s) * vector_wedge_metric(&weighted(r, solved), g, WedgePattern::MuNuAlpha)
}

/// The four source tensors feeding the fifteen-slot column.
#[derive(Debug, Clone, PartialEq)]
pub struct RhsBundle {
    pub hat: Rank3Tensor,
    pub breve: Rank3Tensor,
    pub bar: Rank3Tensor,
    pub ring: Rank3Tensor,
}

impl RhsBundle {
    pub fn build(
        b: &Rank3Tensor,
        p: &ParameterSet,
        ts: &TraceSystem,
        g: &Metric,
        eps: &LeviCivita,
    ) -> Self {
        let source = compute_source_traces(b, g, eps);
        Self::from_source_traces(b, &source, p, ts, g, eps)
    }

    pub fn from_source_traces(
        b: &Rank3Tensor,
        source: &TraceSet,
        p: &ParameterSet,
        ts: &TraceSystem,
        g: &Metric,
        eps: &LeviCivita,
    ) -> Self {
        let solved = ts.solve_traces(source);
        let hat = build_hat(b, &solved, p, g, eps);
        Self {
            breve: build_breve(&hat, &solved, p, g, eps),
            bar: build_bar(&hat, &solved, p, g, eps),
            ring: build_ring(&hat, &solved, p, g, eps),
            hat,
        }
    }

    pub fn tensor(&self, which: Source) -> &Rank3Tensor {
        match which {
            Source::Hat => &self.hat,
            Source::Breve => &self.breve,
            Source::Bar => &self.bar,
            Source::Ring => &self.ring,
        }
    }

    /// The right-hand column at the index triple `at = (α, μ, ν)`.
    pub fn column(&self, at: (usize, usize, usize)) -> [f64; 15] {
        COLUMN_ORDER.map(|(src, pat)| self.tensor(src).at_pattern(pat, at))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DegeneracyPolicy;

    fn sample_tensor(seed: u64) -> Rank3Tensor {
        let mut state = seed
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        Rank3Tensor::from_fn(|_, _, _| {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        })
    }

    #[test]
    fn identity_params_leave_hat_equal_to_source() {
        let g = Metric::minkowski();
        let eps = LeviCivita::new(&g);
        let p = ParameterSet::identity();
        let ts = TraceSystem::new(&p, g.sign_factor(), &DegeneracyPolicy::default()).unwrap();
        let b = sample_tensor(3);
        let bundle = RhsBundle::build(&b, &p, &ts, &g, &eps);
        assert_eq!(bundle.hat, b);
        // with no b_kl the remaining sources are pure ε-contractions of B
        let expected = Rank3Tensor::from_fn(|a, m, n| {
            let mut acc = 0.0;
            for x in 0..4 {
                for y in 0..4 {
                    acc += eps.up2(x, y, a, m) * b.get(x, y, n);
                }
            }
            acc
        });
        assert!((bundle.breve - expected).max_abs() < 1e-14);
    }

    #[test]
    fn single_a91_hat() {
        let lambda = 0.5;
        let g = Metric::euclidean();
        let eps = LeviCivita::new(&g);
        let mut p = ParameterSet::identity();
        p.a9[0] = lambda;
        let ts = TraceSystem::new(&p, 1.0, &DegeneracyPolicy::default()).unwrap();
        let b = sample_tensor(11);
        let hat = RhsBundle::build(&b, &p, &ts, &g, &eps).hat;
        let b1 = crate::tensor::trace(&b, crate::tensor::TraceKind::First, &g);
        let expected = Rank3Tensor::from_fn(|a, m, n| {
            b.get(a, m, n) - lambda / (1.0 + lambda) * b1[a] * g.lower(m, n)
        });
        assert!((hat - expected).max_abs() < 1e-14);
    }

    #[test]
    fn zero_source_gives_zero_bundle() {
        let g = Metric::minkowski();
        let eps = LeviCivita::new(&g);
        let p = ParameterSet::random(4, 1.0);
        let ts = TraceSystem::new(&p, g.sign_factor(), &DegeneracyPolicy::default()).unwrap();
        let bundle = RhsBundle::build(&Rank3Tensor::ZERO, &p, &ts, &g, &eps);
        for t in [&bundle.hat, &bundle.breve, &bundle.bar, &bundle.ring] {
            assert_eq!(t.max_abs(), 0.0);
        }
        assert_eq!(bundle.column((0, 1, 2)), [0.0; 15]);
    }

    #[test]
    fn column_reads_hat_permutations() {
        let bundle = RhsBundle {
            hat: Rank3Tensor::basis(0, 1, 2),
            breve: Rank3Tensor::ZERO,
            bar: Rank3Tensor::ZERO,
            ring: Rank3Tensor::ZERO,
        };
        // slot k is 1 exactly when the k-th pattern maps `at` onto (0,1,2)
        let cases = [
            ((0, 1, 2), 0),
            ((1, 2, 0), 1),
            ((2, 0, 1), 2),
            ((0, 2, 1), 3),
            ((2, 1, 0), 4),
            ((1, 0, 2), 5),
        ];
        for (at, slot) in cases {
            let col = bundle.column(at);
            let mut expected = [0.0; 15];
            expected[slot] = 1.0;
            assert_eq!(col, expected, "at {at:?}");
        }
    }

    #[test]
    fn scatter_then_column_round_trips() {
        let at = (3, 0, 2);
        let values: [f64; 15] = core::array::from_fn(|k| 0.5 + k as f64);
        let mut bundle = RhsBundle {
            hat: Rank3Tensor::ZERO,
            breve: Rank3Tensor::ZERO,
            bar: Rank3Tensor::ZERO,
            ring: Rank3Tensor::ZERO,
        };
        for ((src, pat), v) in COLUMN_ORDER.iter().zip(values) {
            let (i, j, k) = pat.resolve(at);
            let t = match src {
                Source::Hat => &mut bundle.hat,
                Source::Breve => &mut bundle.breve,
                Source::Bar => &mut bundle.bar,
                Source::Ring => &mut bundle.ring,
            };
            t.set(i, j, k, v);
        }
        assert_eq!(bundle.column(at), values);
    }
}
