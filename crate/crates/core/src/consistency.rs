//! Self-checks of the algebra the solver relies on. Each function returns a
//! relative error, `max|lhs − rhs| / max(max|lhs|, max|rhs|)`, so a caller
//! can compare it against whatever tolerance it needs.

use crate::linalg::{self, Matrix};
use crate::oracle::apply_lhs;
use crate::params::ParameterSet;
use crate::perm_system::{build_a_matrix, unknown_column, SYSTEM_DIM};
use crate::rhs::RhsBundle;
use crate::tensor::{
    antisymmetrize_pair, duals, traces, vector_wedge_metric, LeviCivita, Metric, Pattern,
    Rank3Tensor, SlotPair, WedgePattern,
};
use crate::trace_system::{build_gamma, combine, compute_source_traces, TraceSystem};
use crate::DegeneracyPolicy;

fn rel_err(diff: f64, a: f64, b: f64) -> f64 {
    let scale = a.max(b);
    if scale == 0.0 {
        diff
    } else {
        diff / scale
    }
}

fn tensor_err(lhs: &Rank3Tensor, rhs: &Rank3Tensor) -> f64 {
    rel_err((*lhs - *rhs).max_abs(), lhs.max_abs(), rhs.max_abs())
}

fn perm_sign(p: &[usize]) -> f64 {
    let mut sign = 1.0;
    for i in 0..p.len() {
        for j in (i + 1)..p.len() {
            if p[i] == p[j] {
                return 0.0;
            }
            if p[i] > p[j] {
                sign = -sign;
            }
        }
    }
    sign
}

/// `k! δ^{[κ…}_{α…]}`: the sign of the permutation taking `lower` to
/// `upper`, or zero when there is none.
fn generalized_delta<const K: usize>(upper: [usize; K], lower: [usize; K]) -> f64 {
    let mut pi = [0usize; K];
    for (i, u) in upper.iter().enumerate() {
        match lower.iter().position(|l| l == u) {
            Some(j) => pi[i] = j,
            None => return 0.0,
        }
    }
    if perm_sign(&lower) == 0.0 {
        return 0.0;
    }
    perm_sign(&pi)
}

/// `ε_{αμβγ} ε^{κλρσ} = (−1)^s · 4! δ^{[κ}_α δ^λ_μ δ^ρ_β δ^{σ]}_γ` and
/// `ε_{μαβγ} ε^{μκλρ} = (−1)^s · 3! δ^{[κ}_α δ^λ_β δ^{ρ]}_γ`.
pub fn epsilon_contraction_error(g: &Metric) -> f64 {
    let eps = LeviCivita::new(g);
    let s = g.sign_factor();
    let mut worst = 0.0f64;
    for lo in 0..256usize {
        let l = [lo >> 6, (lo >> 4) & 3, (lo >> 2) & 3, lo & 3];
        let el = eps.lower(l[0], l[1], l[2], l[3]);
        for up in 0..256usize {
            let u = [up >> 6, (up >> 4) & 3, (up >> 2) & 3, up & 3];
            let lhs = el * eps.upper(u[0], u[1], u[2], u[3]);
            let rhs = s * generalized_delta(u, l);
            worst = worst.max((lhs - rhs).abs());
        }
    }
    for lo in 0..64usize {
        let l = [lo >> 4, (lo >> 2) & 3, lo & 3];
        for up in 0..64usize {
            let u = [up >> 4, (up >> 2) & 3, up & 3];
            let lhs: f64 = (0..4)
                .map(|m| eps.lower(m, l[0], l[1], l[2]) * eps.upper(m, u[0], u[1], u[2]))
                .sum();
            let rhs = s * generalized_delta(u, l);
            worst = worst.max((lhs - rhs).abs());
        }
    }
    worst
}

/// `T_{βγν} = Σ ε^{xy}{}_{βγ} X_{f(x, y, ν)}`.
fn contract_up2(eps: &LeviCivita, f: impl Fn(usize, usize, usize) -> f64) -> Rank3Tensor {
    Rank3Tensor::from_fn(|b, c, n| {
        let mut acc = 0.0;
        for x in 0..4 {
            for y in 0..4 {
                let e = eps.up2(x, y, b, c);
                if e != 0.0 {
                    acc += e * f(x, y, n);
                }
            }
        }
        acc
    })
}

/// `ε^{αμ}{}_{βγ} M⁽ⁱ⁾_{αμν} = ε^{αμ}{}_{βγ} M⁽ⁱ⁾_{μνα}` for each `i`.
pub fn dual_cyclic_symmetry_error(n: &Rank3Tensor, g: &Metric) -> f64 {
    let eps = LeviCivita::new(g);
    duals(n, &eps)
        .iter()
        .map(|m| {
            let lhs = contract_up2(&eps, |a, mu, nu| m.get(a, mu, nu));
            let rhs = contract_up2(&eps, |a, mu, nu| m.get(mu, nu, a));
            tensor_err(&lhs, &rhs)
        })
        .fold(0.0, f64::max)
}

/// The six dual-contraction identities:
///
/// ```text
/// ε^{αμ}{}_{βγ} M⁽¹⁾_{αμν} = 2(−1)^{s+1} [(N⁽²⁾_{[β} − N⁽³⁾_{[β}) g_{γ]ν} + N_{[βγ]ν}]
/// ε^{αμ}{}_{βγ} M⁽²⁾_{αμν} = 2(−1)^{s+1} [(N⁽¹⁾_{[β} − N⁽³⁾_{[β}) g_{γ]ν} + N_{[β|ν|γ]}]
/// ε^{αμ}{}_{βγ} M⁽³⁾_{αμν} = 2(−1)^{s+1} [(N⁽¹⁾_{[β} − N⁽²⁾_{[β}) g_{γ]ν} + N_{ν[βγ]}]
/// ε^{αμ}{}_{βγ} M⁽¹⁾_{ναμ} = 4(−1)^s N_{[βγ]ν}
/// ε^{αμ}{}_{βγ} M⁽²⁾_{ναμ} = 4(−1)^s N_{[β|ν|γ]}
/// ε^{αμ}{}_{βγ} M⁽³⁾_{ναμ} = 4(−1)^s N_{ν[βγ]}
/// ```
pub fn dual_contraction_errors(n: &Rank3Tensor, g: &Metric) -> [f64; 6] {
    let eps = LeviCivita::new(g);
    let s = g.sign_factor();
    let ms = duals(n, &eps);
    let [t1, t2, t3] = traces(n, g);
    let inner = [
        antisymmetrize_pair(n, SlotPair::FirstSecond),
        antisymmetrize_pair(&n.permuted(Pattern::ANM), SlotPair::FirstSecond),
        antisymmetrize_pair(&n.permuted(Pattern::NAM), SlotPair::FirstSecond),
    ];
    let vecs = [t2 - t3, t1 - t3, t1 - t2];
    let mut out = [0.0; 6];
    for k in 0..3 {
        let m = &ms[k];
        let lhs = contract_up2(&eps, |a, mu, nu| m.get(a, mu, nu));
        let rhs =
            (-2.0 * s) * (vector_wedge_metric(&vecs[k], g, WedgePattern::AlphaMuNu) + inner[k]);
        out[k] = tensor_err(&lhs, &rhs);
        let lhs = contract_up2(&eps, |a, mu, nu| m.get(nu, a, mu));
        out[3 + k] = tensor_err(&lhs, &((4.0 * s) * inner[k]));
    }
    out
}

/// Traces of `L(N)` against `Γ` applied to the traces of `N`.
pub fn trace_closure_error(p: &ParameterSet, g: &Metric, n: &Rank3Tensor) -> f64 {
    let eps = LeviCivita::new(g);
    let lhs = compute_source_traces(&apply_lhs(p, g, &eps, n), g, &eps);
    let x = compute_source_traces(n, g, &eps);
    let rhs = combine(&build_gamma(p, g.sign_factor()), &x);
    let mut diff = 0.0f64;
    let mut scale = 0.0f64;
    for (l, r) in lhs.iter().zip(&rhs) {
        diff = diff.max((*l - *r).max_abs());
        scale = scale.max(l.max_abs()).max(r.max_abs());
    }
    rel_err(diff, scale, 0.0)
}

/// With `B := L(N)`, the worst relative violation of `A 𝒩 = ℬ` per row,
/// over all 64 index triples. `None` when Γ is degenerate, since the
/// sources cannot be formed then.
pub fn fifteen_equation_errors(
    p: &ParameterSet,
    g: &Metric,
    n: &Rank3Tensor,
) -> Option<[f64; SYSTEM_DIM]> {
    let eps = LeviCivita::new(g);
    let s = g.sign_factor();
    let ts = TraceSystem::new(p, s, &DegeneracyPolicy::default()).ok()?;
    let b = apply_lhs(p, g, &eps, n);
    let bundle = RhsBundle::build(&b, p, &ts, g, &eps);
    let a: Matrix<SYSTEM_DIM> = build_a_matrix(p, s);
    let ds = duals(n, &eps);

    let mut diff = [0.0f64; SYSTEM_DIM];
    let mut scale = [0.0f64; SYSTEM_DIM];
    for flat in 0..64 {
        let at = crate::tensor::triple(flat);
        let lhs = linalg::mat_vec(&a, &unknown_column(n, &ds, at));
        let rhs = bundle.column(at);
        for r in 0..SYSTEM_DIM {
            diff[r] = diff[r].max((lhs[r] - rhs[r]).abs());
            scale[r] = scale[r].max(lhs[r].abs()).max(rhs[r].abs());
        }
    }
    Some(core::array::from_fn(|r| rel_err(diff[r], scale[r], 0.0)))
}
