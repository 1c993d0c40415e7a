//! Trace elimination.
//!
//! Contracting the equation with `g^{αμ}`, `g^{αν}`, `g^{μν}` and
//! `ε^{λαμν}` closes on the four traces: `Γ X = Y` with
//! `X = (N⁽¹⁾, N⁽²⁾, N⁽³⁾, M)` and `Y` the same traces of the source.

use crate::linalg::{self, DegeneracyPolicy, Matrix};
use crate::params::ParameterSet;
use crate::tensor::{pseudo_trace, traces, CoVector, LeviCivita, Metric, Rank3Tensor};

/// The four traces `(T⁽¹⁾, T⁽²⁾, T⁽³⁾, T⁽⁴⁾ = M)` of a rank-3 tensor.
pub type TraceSet = [CoVector; 4];

/// Builds the 4×4 trace matrix Γ.
///
/// Rows follow the contractions with `g^{αμ}`, `g^{αν}`, `g^{μν}` and
/// `ε^{λαμν}`; columns the traces `N⁽¹⁾, N⁽²⁾, N⁽³⁾, M`.
pub fn build_gamma(p: &ParameterSet, sign_factor: f64) -> Matrix<4> {
    let a = |i| p.perm(i);
    let b = |k, l| p.b(k, l);
    let s = sign_factor;
    let mut g = [[0.0; 4]; 4];

    // Permutation terms collapse onto one trace each.
    let perms = [
        [a(1) + a(6), a(3) + a(4), a(2) + a(5)],
        [a(2) + a(4), a(1) + a(5), a(3) + a(6)],
        [a(3) + a(5), a(2) + a(6), a(1) + a(4)],
    ];
    for j in 0..3 {
        let (c7, c8, c9) = (p.a7[j], p.a8[j], p.a9[j]);
        g[0][j] = perms[0][j] + c7 + 4.0 * c8 + c9;
        g[1][j] = perms[1][j] + 4.0 * c7 + c8 + c9;
        g[2][j] = perms[2][j] + c7 + c8 + 4.0 * c9;
    }

    let c = |i: usize| p.c[i - 1];
    g[0][3] = c(1) + 4.0 * c(2) + c(3) - b(1, 1) + b(1, 3) + b(2, 1) - b(2, 3) - b(3, 1) + b(3, 3);
    g[1][3] = 4.0 * c(1) + c(2) + c(3) + b(1, 1) - b(1, 2) - b(2, 1) + b(2, 2) + b(3, 1) - b(3, 2);
    g[2][3] = c(1) + c(2) + 4.0 * c(3) + b(1, 2) - b(1, 3) - b(2, 2) + b(2, 3) + b(3, 2) - b(3, 3);

    let bv = |i: usize| p.b_vec[i - 1];
    g[3][0] = -2.0 * s * (b(2, 1) + b(2, 2) + b(2, 3) + b(3, 1) + b(3, 2) + b(3, 3) - 3.0 * bv(1));
    g[3][1] = -2.0 * s * (b(1, 1) + b(1, 2) + b(1, 3) - b(3, 1) - b(3, 2) - b(3, 3) - 3.0 * bv(2));
    g[3][2] = 2.0 * s * (b(1, 1) + b(1, 2) + b(1, 3) + b(2, 1) + b(2, 2) + b(2, 3) + 3.0 * bv(3));
    g[3][3] = a(1) + a(2) + a(3) - a(4) - a(5) - a(6);
    g
}

/// The four source traces in the order of the column `Y`.
pub fn compute_source_traces(b: &Rank3Tensor, g: &Metric, eps: &LeviCivita) -> TraceSet {
    let [t1, t2, t3] = traces(b, g);
    [t1, t2, t3, pseudo_trace(b, eps, g)]
}

/// Γ is refused by the degeneracy gate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegenerateGamma {
    pub det: f64,
    pub rcond: f64,
}

/// Non-degenerate trace system with its inverse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSystem {
    gamma: Matrix<4>,
    gamma_inv: Matrix<4>,
    det_gamma: f64,
    rcond: f64,
    sign_factor: f64,
}

/// Γ, its determinant and condition estimate, before gating.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GammaDiagnostics {
    pub gamma: Matrix<4>,
    pub det: f64,
    pub rcond: f64,
}

impl GammaDiagnostics {
    pub fn new(p: &ParameterSet, sign_factor: f64) -> Self {
        let gamma = build_gamma(p, sign_factor);
        let det = linalg::det4(&gamma);
        let rcond = if det != 0.0 && det.is_finite() {
            linalg::rcond(&gamma, &linalg::inverse4(&gamma, det))
        } else {
            0.0
        };
        Self { gamma, det, rcond }
    }
}

impl TraceSystem {
    pub fn new(
        p: &ParameterSet,
        sign_factor: f64,
        policy: &DegeneracyPolicy,
    ) -> Result<Self, DegenerateGamma> {
        let diag = GammaDiagnostics::new(p, sign_factor);
        Self::from_diagnostics(diag, sign_factor, policy)
    }

    pub fn from_diagnostics(
        diag: GammaDiagnostics,
        sign_factor: f64,
        policy: &DegeneracyPolicy,
    ) -> Result<Self, DegenerateGamma> {
        let GammaDiagnostics { gamma, det, rcond } = diag;
        if policy.is_degenerate(det, linalg::max_norm(&gamma), 4, rcond) {
            return Err(DegenerateGamma { det, rcond });
        }
        Ok(Self {
            gamma,
            gamma_inv: linalg::inverse4(&gamma, det),
            det_gamma: det,
            rcond,
            sign_factor,
        })
    }

    pub fn gamma(&self) -> &Matrix<4> {
        &self.gamma
    }

    /// Entries `γ̃ᵢⱼ` of `Γ⁻¹`.
    pub fn gamma_inv(&self) -> &Matrix<4> {
        &self.gamma_inv
    }

    pub fn det(&self) -> f64 {
        self.det_gamma
    }

    pub fn rcond(&self) -> f64 {
        self.rcond
    }

    pub fn sign_factor(&self) -> f64 {
        self.sign_factor
    }

    /// `N⁽ⁱ⁾ = Σⱼ γ̃ᵢⱼ B⁽ʲ⁾`.
    pub fn solve_traces(&self, source: &TraceSet) -> TraceSet {
        combine(&self.gamma_inv, source)
    }
}

/// Applies a 4×4 coefficient matrix across a set of four covectors.
pub fn combine(m: &Matrix<4>, x: &TraceSet) -> TraceSet {
    core::array::from_fn(|i| {
        let mut out = [0.0; 4];
        for (mu, o) in out.iter_mut().enumerate() {
            *o = (0..4).map(|j| m[i][j] * x[j][mu]).sum();
        }
        CoVector(out)
    })
}
